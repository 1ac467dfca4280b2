//! Moduli of uniform convexity.
//!
//! A modulus `eta(r, eps)` certifies that whenever `d(x,a) <= r`,
//! `d(y,a) <= r` and `d(x,y) >= eps*r`, the midpoint of `x` and `y` drops
//! toward `a`: `d(midpoint, a) <= (1 - eta(r, eps))*r`. A modulus is
//! *monotone* when it is nonincreasing in `r` for fixed `eps`. Some moduli
//! factor as `eta(r, eps) = eps * eta_tilde(r, eps)` with `eta_tilde`
//! nondecreasing in `eps`; the factored form yields strictly better rate
//! certificates downstream.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::directed::{add_dir, div_dir, mul_dir, slack, sub_dir, Dir};
use crate::error::{Error, Result};
use crate::spaces::{Point, Space};

#[derive(Clone, Debug, PartialEq)]
enum ModulusKind {
    /// `eps^2 / 8`, valid in every CAT(0) space; independent of `r`.
    Quadratic,
    /// Clarkson-type modulus `1 - (1 - (eps/2)^p)^(1/p)` for l_p, p >= 2;
    /// independent of `r`.
    Lp { p: f64 },
    /// Constant `delta`; useful as a deliberately false modulus in tests.
    Constant { delta: f64 },
    /// User-supplied grid, looked up conservatively (delta rounded down).
    Table {
        r_breaks: Vec<f64>,
        eps_breaks: Vec<f64>,
        /// `values[i][j]` is delta at `(r_breaks[i], eps_breaks[j])`.
        values: Vec<Vec<f64>>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Modulus {
    kind: ModulusKind,
    monotone_in_r: bool,
    factored: bool,
}

/// The quadratic modulus `eta(r, eps) = eps^2/8` (CAT(0) spaces), factored
/// form `eta_tilde(r, eps) = eps/8`.
pub fn cat0_modulus() -> Modulus {
    Modulus {
        kind: ModulusKind::Quadratic,
        monotone_in_r: true,
        factored: true,
    }
}

/// Clarkson-type modulus for finite-dimensional l_p with p >= 2:
/// `eta(r, eps) = 1 - (1 - (eps/2)^p)^(1/p)`, independent of `r`.
///
/// The factored form `eta/eps` is nondecreasing in `eps` because `eta` is
/// convex in `eps` with `eta(0) = 0`.
pub fn lp_modulus(p: f64) -> Result<Modulus> {
    if !(p >= 2.0) || !p.is_finite() {
        return Err(Error::Unsupported(format!(
            "l_p modulus requires finite p >= 2, got {p}"
        )));
    }
    Ok(Modulus {
        kind: ModulusKind::Lp { p },
        monotone_in_r: true,
        factored: true,
    })
}

/// Constant modulus; not monotone-validated, intended for negative tests and
/// experiments with hand-asserted moduli.
pub fn constant_modulus(delta: f64) -> Result<Modulus> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::Modulus(format!("delta = {delta} outside (0, 1]")));
    }
    Ok(Modulus {
        kind: ModulusKind::Constant { delta },
        monotone_in_r: true,
        factored: false,
    })
}

/// Grid-backed modulus with conservative lookup: the stored delta for the
/// next break above `r` and the previous break below `eps`. Queries above the
/// last `r` break or below the first `eps` break have no conservative answer
/// and error out.
pub fn table_modulus(
    r_breaks: Vec<f64>,
    eps_breaks: Vec<f64>,
    values: Vec<Vec<f64>>,
) -> Result<Modulus> {
    if r_breaks.is_empty() || eps_breaks.is_empty() {
        return Err(Error::Modulus("table modulus needs a nonempty grid".into()));
    }
    if !r_breaks.windows(2).all(|w| w[0] < w[1]) || !eps_breaks.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::Modulus("table breakpoints must be strictly increasing".into()));
    }
    if eps_breaks[0] <= 0.0 || *eps_breaks.last().unwrap() > 2.0 {
        return Err(Error::Modulus("eps breakpoints must lie in (0, 2]".into()));
    }
    if values.len() != r_breaks.len() || values.iter().any(|row| row.len() != eps_breaks.len()) {
        return Err(Error::Modulus("table shape does not match breakpoints".into()));
    }
    for row in &values {
        if row.iter().any(|v| !(*v > 0.0 && *v <= 1.0)) {
            return Err(Error::Modulus("table values must lie in (0, 1]".into()));
        }
        if !row.windows(2).all(|w| w[0] <= w[1]) {
            return Err(Error::Modulus("table must be nondecreasing along eps".into()));
        }
    }
    for j in 0..eps_breaks.len() {
        for i in 1..r_breaks.len() {
            if values[i][j] > values[i - 1][j] {
                return Err(Error::Modulus("table must be nonincreasing along r".into()));
            }
        }
    }
    Ok(Modulus {
        kind: ModulusKind::Table { r_breaks, eps_breaks, values },
        monotone_in_r: true,
        factored: false,
    })
}

impl Modulus {
    pub fn is_monotone(&self) -> bool {
        self.monotone_in_r
    }

    pub fn has_factored(&self) -> bool {
        self.factored
    }

    /// Same modulus with the factored form forgotten; rate evaluators then
    /// take the general (non-factored) formulas.
    pub fn without_factored(&self) -> Modulus {
        let mut m = self.clone();
        m.factored = false;
        m
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            ModulusKind::Quadratic => "cat0".into(),
            ModulusKind::Lp { p } => format!("lp({p})"),
            ModulusKind::Constant { delta } => format!("constant({delta})"),
            ModulusKind::Table { r_breaks, eps_breaks, .. } => {
                format!("table({}x{})", r_breaks.len(), eps_breaks.len())
            }
        }
    }

    fn check_args(r: f64, eps: f64) -> Result<()> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Modulus(format!("r = {r} outside (0, inf)")));
        }
        if !(eps > 0.0 && eps <= 2.0) {
            return Err(Error::Modulus(format!("eps = {eps} outside (0, 2]")));
        }
        Ok(())
    }

    /// `eta(r, eps)`, nearest rounding; result clamped into (0, 1].
    pub fn eval(&self, r: f64, eps: f64) -> Result<f64> {
        self.eval_dir(r, eps, None)
    }

    /// `eta(r, eps)` rounded in `dir` when a direction is given.
    pub fn eval_dir(&self, r: f64, eps: f64, dir: Option<Dir>) -> Result<f64> {
        Self::check_args(r, eps)?;
        let v = match &self.kind {
            ModulusKind::Quadratic => {
                let sq = match dir {
                    Some(d) => mul_dir(eps, eps, d),
                    None => eps * eps,
                };
                sq / 8.0
            }
            ModulusKind::Lp { p } => lp_delta(*p, eps, dir),
            ModulusKind::Constant { delta } => *delta,
            ModulusKind::Table { r_breaks, eps_breaks, values } => {
                // Round r up and eps down to grid points; both directions
                // can only lower the reported delta.
                let i = match r_breaks.iter().position(|&rb| rb >= r) {
                    Some(i) => i,
                    None => {
                        return Err(Error::Modulus(format!(
                            "r = {r} beyond the table grid (max {})",
                            r_breaks.last().unwrap()
                        )))
                    }
                };
                let j = match eps_breaks.iter().rposition(|&eb| eb <= eps) {
                    Some(j) => j,
                    None => {
                        return Err(Error::Modulus(format!(
                            "eps = {eps} below the table grid (min {})",
                            eps_breaks[0]
                        )))
                    }
                };
                values[i][j]
            }
        };
        let v = v.min(1.0);
        if !(v > 0.0) {
            return Err(Error::Modulus(format!(
                "modulus produced {v} outside (0, 1] at (r = {r}, eps = {eps})"
            )));
        }
        Ok(v)
    }

    /// The factored evaluator `eta_tilde` with `eta = eps * eta_tilde`.
    pub fn factored_eval(&self, r: f64, eps: f64) -> Result<f64> {
        self.factored_eval_dir(r, eps, None)
    }

    pub fn factored_eval_dir(&self, r: f64, eps: f64, dir: Option<Dir>) -> Result<f64> {
        if !self.factored {
            return Err(Error::MissingCertificate(format!(
                "modulus `{}` has no factored form",
                self.describe()
            )));
        }
        Self::check_args(r, eps)?;
        match &self.kind {
            ModulusKind::Quadratic => Ok(eps / 8.0),
            ModulusKind::Lp { p } => {
                let delta = lp_delta(*p, eps, dir);
                Ok(match dir {
                    Some(d) => div_dir(delta, eps, d),
                    None => delta / eps,
                })
            }
            _ => unreachable!("factored flag only set on closed-form kinds"),
        }
    }
}

/// `1 - (1 - (eps/2)^p)^(1/p)` with optional directed rounding.
///
/// Evaluated cancellation-free so accuracy is relative to the (possibly
/// tiny) result: for p = 2 as `u / (1 + sqrt(1-u))` with `u = (eps/2)^2`,
/// otherwise as `-expm1(ln1p(-u) / p)`. Directed rounding then only needs a
/// few ulps of slack on the library calls.
fn lp_delta(p: f64, eps: f64, dir: Option<Dir>) -> f64 {
    let half = eps / 2.0; // exact
    if p == 2.0 {
        let (u, root_dir) = match dir {
            None => (half * half, None),
            Some(d) => (mul_dir(half, half, d), Some(d.flip())),
        };
        if u >= 1.0 {
            return 1.0;
        }
        let root = match root_dir {
            None => (1.0 - u).sqrt(),
            Some(rd) => slack(sub_dir(1.0, u, rd).sqrt(), 1, rd),
        };
        match dir {
            None => u / (1.0 + root),
            Some(d) => div_dir(u, add_dir(1.0, root, d.flip()), d),
        }
    } else {
        let u = match dir {
            None => half.powf(p),
            Some(d) => slack(half.powf(p), 4, d),
        };
        if u >= 1.0 {
            return 1.0;
        }
        // delta increases with u, so one final relative nudge in the target
        // direction covers the ln1p/expm1 rounding.
        let delta = -((-u).ln_1p() / p).exp_m1();
        match dir {
            None => delta,
            Some(d) => slack(delta, 8, d),
        }
    }
}

/// Groetsch-type bound `(1 - 2*lambda*(1-lambda)*eta(r, eps)) * r` on the
/// distance from a geodesic combination to the common center.
pub fn groetsch_bound(m: &Modulus, r: f64, eps: f64, lambda: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::invalid(format!("lambda = {lambda} outside [0, 1]")));
    }
    if lambda == 0.0 || lambda == 1.0 {
        Modulus::check_args(r, eps)?;
        return Ok(r);
    }
    let eta = m.eval(r, eps)?;
    Ok((1.0 - 2.0 * lambda * (1.0 - lambda) * eta) * r)
}

/// Largest `eps` in (0, 2] with `eta(r, eps) <= target`, assuming the modulus
/// is nondecreasing in `eps` (all built-ins are). `None` when even the
/// smallest representable `eps` exceeds the target.
pub fn invert_eps(m: &Modulus, r: f64, target: f64) -> Result<Option<f64>> {
    if target <= 0.0 {
        return Ok(None);
    }
    if m.eval(r, 2.0)? <= target {
        return Ok(Some(2.0));
    }
    let mut lo = 1e-12;
    if m.eval(r, lo)? > target {
        return Ok(None);
    }
    let mut hi = 2.0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if m.eval(r, mid)? <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(lo))
}

/// Witness tuple for a modulus violation.
#[derive(Clone, Debug)]
pub struct ModulusWitness {
    pub r: f64,
    pub eps: f64,
    pub a: Point,
    pub x: Point,
    pub y: Point,
    pub midpoint_dist: f64,
    pub bound: f64,
}

#[derive(Clone, Debug)]
pub struct ModulusCheck {
    /// Number of admissible tuples actually tested.
    pub trials: usize,
    pub violations: usize,
    /// Maximum of `d(midpoint, a) - (1 - eta)*r` over the tested tuples;
    /// negative means the modulus held with room to spare.
    pub worst_margin: f64,
    pub witness: Option<ModulusWitness>,
}

/// Sampling envelope for `verify_modulus`. The hyperboloid chart loses
/// precision far from the apex, so the hyperbolic plane is tested on a
/// tighter range than the flat spaces.
fn verify_envelope(space: &Space) -> (f64, f64, f64) {
    // (center scale, min r, max r)
    match space {
        Space::Hyperbolic2 => (2.0, 1e-2, 10.0),
        _ => (2.0, 1e-2, 1e2),
    }
}

/// Empirically check implication (definition of uniform convexity) on random
/// tuples: centers `a`, radii `r`, separations `eps*r`, then
/// `d(midpoint, a) <= (1 - eta(r, eps))*r + 1e-9`.
pub fn verify_modulus(space: &Space, m: &Modulus, trials: usize, seed: u64) -> Result<ModulusCheck> {
    if trials == 0 {
        return Err(Error::invalid("verify_modulus needs trials >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (center_scale, r_min, r_max) = verify_envelope(space);
    let log_span = (r_max / r_min).ln();

    let mut done = 0usize;
    let mut violations = 0usize;
    let mut worst = f64::NEG_INFINITY;
    let mut witness = None;
    let mut attempts_left = trials.saturating_mul(400);

    while done < trials && attempts_left > 0 {
        attempts_left -= 1;
        let a = space.sample_point(&mut rng, center_scale);
        let r = r_min * (rng.gen::<f64>() * log_span).exp();
        let eps = loop {
            let e = rng.gen_range(0.0..=2.0);
            if e > 0.0 {
                break e;
            }
        };
        // Rejection for the separation constraint, capped.
        let mut found = None;
        for _ in 0..60 {
            let x = space.sample_in_ball(&a, r, &mut rng)?;
            let y = space.sample_in_ball(&a, r, &mut rng)?;
            if space.dist_unchecked(&x, &y) >= eps * r {
                found = Some((x, y));
                break;
            }
        }
        let Some((x, y)) = found else { continue };

        let mid = space.combine_unchecked(&x, &y, 0.5);
        let lhs = space.dist_unchecked(&mid, &a);
        let bound = (1.0 - m.eval(r, eps)?) * r;
        let margin = lhs - bound;
        if margin > worst {
            worst = margin;
        }
        if lhs > bound + 1e-9 {
            violations += 1;
            if witness.is_none() {
                witness = Some(ModulusWitness {
                    r,
                    eps,
                    a: a.clone(),
                    x,
                    y,
                    midpoint_dist: lhs,
                    bound,
                });
            }
        }
        done += 1;
    }

    Ok(ModulusCheck {
        trials: done,
        violations,
        worst_margin: worst,
        witness,
    })
}
