//! Picard, Krasnoselski-Mann, and Ishikawa orbits.
//!
//! An Ishikawa step with scalars `(lambda_n, s_n)` is
//!
//! ```text
//! y_n     = (1 - s_n) x_n      (+) s_n      T x_n
//! x_{n+1} = (1 - lambda_n) x_n (+) lambda_n T y_n
//! ```
//!
//! `s == 0` reproduces the Krasnoselski-Mann iteration bit-for-bit and
//! `lambda == 1, s == 0` the Picard iteration. Schedules carry the
//! certificates the rate formulas consume: a divergence rate `theta` for
//! `sum lambda_n (1 - lambda_n)`, a Cauchy modulus `gamma` for
//! `sum s_n (1 - lambda_n)`, a Cauchy modulus `delta` for `sum s_n`, and
//! `(L, N0)` with `s_n <= 1 - 1/L` for `n >= N0`. All built-in certificates
//! are closed forms evaluated conservatively; `validate_schedule` checks any
//! of them against partial sums up to a horizon before they are trusted.

use crate::directed::{ceil_index, div_dir, mul_dir, sub_dir, Dir};
use crate::error::{Error, Result};
use crate::mappings::NonexpansiveMap;
use crate::modulus::Modulus;
use crate::spaces::{Point, Space};

/// Deterministic binary exponentiation; the same bits regardless of context.
fn powu(base: f64, mut n: u64) -> f64 {
    let mut acc = 1.0f64;
    let mut b = base;
    while n > 0 {
        if n & 1 == 1 {
            acc *= b;
        }
        b *= b;
        n >>= 1;
    }
    acc
}

#[derive(Clone, Debug, PartialEq)]
pub enum LambdaSeq {
    Const(f64),
    /// `1/2 + (-1)^n / 4`, i.e. 3/4 on even and 1/4 on odd steps;
    /// `lambda_n (1 - lambda_n) = 3/16` throughout.
    Alternating,
}

impl LambdaSeq {
    pub fn at(&self, n: usize) -> f64 {
        match self {
            LambdaSeq::Const(v) => *v,
            LambdaSeq::Alternating => {
                if n % 2 == 0 {
                    0.75
                } else {
                    0.25
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SSeq {
    Zero,
    Const(f64),
    /// `s_n = c * q^n` with `q` in (0, 1).
    Geometric { c: f64, q: f64 },
    /// `s_n = 1 / (n + 2)^2`.
    InverseSquare,
}

impl SSeq {
    pub fn at(&self, n: usize) -> f64 {
        match self {
            SSeq::Zero => 0.0,
            SSeq::Const(v) => *v,
            SSeq::Geometric { c, q } => c * powu(*q, n as u64),
            SSeq::InverseSquare => {
                let t = (n + 2) as f64;
                1.0 / (t * t)
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, SSeq::Zero) || matches!(self, SSeq::Const(v) if *v == 0.0)
            || matches!(self, SSeq::Geometric { c, .. } if *c == 0.0)
    }
}

/// Rate of divergence: `theta(n)` with `sum_{i <= theta(n)} a_i >= n`.
#[derive(Clone, Debug, PartialEq)]
pub enum DivergenceRate {
    /// `theta(n) = ceil(scale * n)`.
    LinearCeil { scale: f64 },
    /// `theta(n) = ceil(n / (lambda (1 - lambda)))` for constant `lambda`.
    ConstLambda { lambda: f64 },
}

impl DivergenceRate {
    /// Conservative (upward-rounded) evaluation.
    pub fn eval(&self, n: u64) -> Result<u64> {
        match self {
            DivergenceRate::LinearCeil { scale } => {
                ceil_index(mul_dir(n as f64, *scale, Dir::Up))
            }
            DivergenceRate::ConstLambda { lambda } => {
                let denom = mul_dir(*lambda, sub_dir(1.0, *lambda, Dir::Down), Dir::Down);
                if !(denom > 0.0) {
                    return Err(Error::Hypothesis(
                        "lambda (1 - lambda) = 0: no divergence rate exists".into(),
                    ));
                }
                ceil_index(div_dir(n as f64, denom, Dir::Up))
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            DivergenceRate::LinearCeil { scale } => format!("ceil({scale}*n)"),
            DivergenceRate::ConstLambda { lambda } => format!("ceil(n/({lambda}(1-{lambda})))"),
        }
    }
}

/// `theta(n) = ceil(n / (lambda (1 - lambda)))`, a rate of divergence for the
/// constant-weight series.
pub fn const_lambda_divergence_rate(lambda: f64) -> Result<DivergenceRate> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::invalid(format!("lambda = {lambda} outside (0, 1)")));
    }
    Ok(DivergenceRate::ConstLambda { lambda })
}

/// Cauchy modulus: `gamma(eps)` such that partial sums past `gamma(eps)`
/// oscillate by less than `eps`.
#[derive(Clone, Debug, PartialEq)]
pub enum CauchyModulus {
    Zero,
    /// Index with geometric tail `c q^{k+1} / (1-q) <= eps`.
    GeometricTail { c: f64, q: f64 },
    /// Index with `1/(k+2) <= eps`, a tail bound for `sum 1/(n+2)^2`.
    InverseSquareTail,
    /// `gamma(eps) = inner(eps / divisor)`.
    ArgScaled { inner: Box<CauchyModulus>, divisor: f64 },
}

impl CauchyModulus {
    pub fn eval(&self, eps: f64) -> Result<u64> {
        if !(eps > 0.0) {
            return Err(Error::invalid("Cauchy modulus argument must be > 0"));
        }
        match self {
            CauchyModulus::Zero => Ok(0),
            CauchyModulus::GeometricTail { c, q } => {
                if *c == 0.0 {
                    return Ok(0);
                }
                let tail = |k: u64| c * powu(*q, k + 1) / (1.0 - q);
                // Closed-form start, then fix upward for rounding.
                let guess = ((eps * (1.0 - q) / c).ln() / q.ln()).ceil() - 1.0;
                let mut k = if guess.is_finite() && guess > 0.0 { guess as u64 } else { 0 };
                while k > 0 && tail(k - 1) <= eps {
                    k -= 1;
                }
                while tail(k) > eps {
                    k += 1;
                    if k > 1 << 40 {
                        return Err(Error::Numeric("geometric tail index diverged".into()));
                    }
                }
                Ok(k)
            }
            CauchyModulus::InverseSquareTail => {
                let k = ceil_index(div_dir(1.0, eps, Dir::Up))?;
                Ok(k.saturating_sub(2))
            }
            CauchyModulus::ArgScaled { inner, divisor } => {
                inner.eval(div_dir(eps, *divisor, Dir::Down))
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            CauchyModulus::Zero => "0".into(),
            CauchyModulus::GeometricTail { c, q } => format!("geometric-tail({c}, {q})"),
            CauchyModulus::InverseSquareTail => "inverse-square-tail".into(),
            CauchyModulus::ArgScaled { inner, divisor } => {
                format!("{}(eps/{divisor})", inner.describe())
            }
        }
    }
}

/// Turn a Cauchy modulus for `sum s_n` into one for `sum s_n (1 - lambda)`
/// with constant `lambda`: `gamma(eps) = delta(eps / (1 - lambda))`.
pub fn weighted_series_modulus(delta: &CauchyModulus, lambda: f64) -> Result<CauchyModulus> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::invalid(format!("lambda = {lambda} outside [0, 1)")));
    }
    if lambda == 0.0 {
        return Ok(delta.clone());
    }
    Ok(CauchyModulus::ArgScaled {
        inner: Box::new(delta.clone()),
        divisor: 1.0 - lambda,
    })
}

/// Scalar schedule with its certificates.
#[derive(Clone, Debug)]
pub struct ScalarSchedule {
    pub lambda: LambdaSeq,
    pub s: SSeq,
    pub theta: Option<DivergenceRate>,
    pub gamma: Option<CauchyModulus>,
    pub delta: Option<CauchyModulus>,
    /// `(L, N0)` with `s_n <= 1 - 1/L` for all `n >= N0`.
    pub l_n0: Option<(u64, u64)>,
}

impl ScalarSchedule {
    /// Build a schedule and derive every certificate that has a closed form
    /// for the given families.
    pub fn new(lambda: LambdaSeq, s: SSeq) -> Result<Self> {
        if let LambdaSeq::Const(v) = lambda {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(format!("lambda = {v} outside [0, 1]")));
            }
        }
        match s {
            SSeq::Const(v) if !(0.0..=1.0).contains(&v) => {
                return Err(Error::invalid(format!("s = {v} outside [0, 1]")));
            }
            SSeq::Geometric { c, q } => {
                if !(0.0..=1.0).contains(&c) || !(q > 0.0 && q < 1.0) {
                    return Err(Error::invalid(
                        "geometric schedule needs c in [0, 1] and q in (0, 1)",
                    ));
                }
            }
            _ => {}
        }

        let theta = match lambda {
            LambdaSeq::Const(v) if v > 0.0 && v < 1.0 => {
                Some(DivergenceRate::ConstLambda { lambda: v })
            }
            LambdaSeq::Alternating => Some(DivergenceRate::LinearCeil { scale: 16.0 / 3.0 }),
            _ => None,
        };

        let delta = match s {
            SSeq::Zero => Some(CauchyModulus::Zero),
            SSeq::Const(v) if v == 0.0 => Some(CauchyModulus::Zero),
            SSeq::Const(_) => None, // divergent series
            SSeq::Geometric { c, q } => Some(CauchyModulus::GeometricTail { c, q }),
            SSeq::InverseSquare => Some(CauchyModulus::InverseSquareTail),
        };

        let gamma = match (&delta, &lambda) {
            (Some(d), LambdaSeq::Const(v)) if *v < 1.0 => {
                Some(weighted_series_modulus(d, *v)?)
            }
            (Some(_), LambdaSeq::Const(_)) => Some(CauchyModulus::Zero), // lambda == 1
            // The coarse bound ignoring the (1 - lambda) factor stays valid.
            (Some(d), LambdaSeq::Alternating) => Some(d.clone()),
            (None, _) => None,
        };

        let l_n0 = match s {
            SSeq::Zero => Some((1, 0)),
            SSeq::Const(v) if v == 0.0 => Some((1, 0)),
            SSeq::Const(v) if v < 1.0 => Some(((1.0 / (1.0 - v)).ceil() as u64, 0)),
            SSeq::Const(_) => None, // s == 1 never drops below 1 - 1/L
            SSeq::Geometric { c, q } => {
                let mut n0 = 0u64;
                while c * powu(q, n0) > 0.5 {
                    n0 += 1;
                }
                Some((2, n0))
            }
            SSeq::InverseSquare => Some((2, 0)),
        };

        Ok(ScalarSchedule { lambda, s, theta, gamma, delta, l_n0 })
    }

    pub fn km(lambda: LambdaSeq) -> Result<Self> {
        Self::new(lambda, SSeq::Zero)
    }

    fn picard() -> Self {
        ScalarSchedule {
            lambda: LambdaSeq::Const(1.0),
            s: SSeq::Zero,
            theta: None,
            gamma: Some(CauchyModulus::Zero),
            delta: Some(CauchyModulus::Zero),
            l_n0: Some((1, 0)),
        }
    }

    pub fn with_theta(mut self, theta: DivergenceRate) -> Self {
        self.theta = Some(theta);
        self
    }

    pub fn with_gamma(mut self, gamma: CauchyModulus) -> Self {
        self.gamma = Some(gamma);
        self
    }

    pub fn with_l_n0(mut self, l: u64, n0: u64) -> Self {
        self.l_n0 = Some((l, n0));
        self
    }

    pub fn lambda_at(&self, n: usize) -> f64 {
        self.lambda.at(n)
    }

    pub fn s_at(&self, n: usize) -> f64 {
        self.s.at(n)
    }

    /// Partial sum `sum_{i=0}^{n} lambda_i (1 - lambda_i)`.
    pub fn lambda_partial_sum(&self, n: usize) -> f64 {
        (0..=n)
            .map(|i| {
                let l = self.lambda_at(i);
                l * (1.0 - l)
            })
            .sum()
    }

    /// Partial sum `alpha_n = sum_{i=0}^{n} s_i (1 - lambda_i)`; the quantity
    /// the `gamma` certificate is about.
    pub fn weighted_partial_sum(&self, n: usize) -> f64 {
        (0..=n)
            .map(|i| self.s_at(i) * (1.0 - self.lambda_at(i)))
            .sum()
    }
}

/// Check every declared certificate against partial sums up to `horizon`
/// steps; the error names the violated hypothesis.
pub fn validate_schedule(sched: &ScalarSchedule, horizon: usize) -> Result<()> {
    let probe = horizon.min(10_000);
    for n in (0..probe).chain([horizon.saturating_sub(1), 10 * horizon + 7]) {
        let l = sched.lambda_at(n);
        let s = sched.s_at(n);
        if !(0.0..=1.0).contains(&l) {
            return Err(Error::Hypothesis(format!("lambda_{n} = {l} outside [0, 1]")));
        }
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::Hypothesis(format!("s_{n} = {s} outside [0, 1]")));
        }
    }

    if let Some(theta) = &sched.theta {
        for n in [0u64, 1, 2, 3, 5, 8, 13, 21, 34, 50] {
            let idx = theta.eval(n)?;
            if idx > 2_000_000 {
                continue;
            }
            let sum = sched.lambda_partial_sum(idx as usize);
            if sum < n as f64 - 1e-9 {
                return Err(Error::Hypothesis(format!(
                    "sum lambda_n(1-lambda_n) divergence certificate failed at n={n}: \
                     partial sum up to theta({n})={idx} is {sum:.6}"
                )));
            }
        }
    }

    if let Some((l, n0)) = sched.l_n0 {
        if l < 1 {
            return Err(Error::Hypothesis("L must be >= 1".into()));
        }
        let cap = 1.0 - 1.0 / l as f64;
        let n0 = n0 as usize;
        for n in (n0..n0 + probe.max(64)).chain([n0 + 10 * horizon + 3]) {
            let s = sched.s_at(n);
            if s > cap + 1e-12 {
                return Err(Error::Hypothesis(format!(
                    "s_{n} = {s} exceeds 1 - 1/L = {cap} (L = {l}, N0 = {n0})"
                )));
            }
        }
    }

    let window = horizon.min(20_000);
    let check_modulus = |m: &CauchyModulus, weighted: bool, name: &str| -> Result<()> {
        for eps in [1.0, 0.25, 0.06, 0.015] {
            let k = m.eval(eps)? as usize;
            if k > 4_000_000 {
                continue;
            }
            let base = if weighted {
                sched.weighted_partial_sum(k)
            } else {
                (0..=k).map(|i| sched.s_at(i)).sum()
            };
            let mut run = base;
            let mut sup: f64 = 0.0;
            for m in 1..=window {
                let i = k + m;
                run += if weighted {
                    sched.s_at(i) * (1.0 - sched.lambda_at(i))
                } else {
                    sched.s_at(i)
                };
                sup = sup.max((run - base).abs());
            }
            // Partial sums may touch the limit exactly in floating point;
            // only a clear overshoot falsifies the certificate.
            if sup > eps * (1.0 + 1e-9) {
                return Err(Error::Hypothesis(format!(
                    "{name} Cauchy modulus failed at eps={eps}: oscillation {sup:.6} \
                     past index {k}"
                )));
            }
        }
        Ok(())
    };
    if let Some(gamma) = &sched.gamma {
        check_modulus(gamma, true, "sum s_n(1-lambda_n)")?;
    }
    if let Some(delta) = &sched.delta {
        check_modulus(delta, false, "sum s_n")?;
    }
    Ok(())
}

/// One Ishikawa step: intermediate point, both images, and the next iterate.
#[derive(Clone, Debug)]
pub struct StepData {
    pub tx: Point,
    pub y: Point,
    pub ty: Point,
    pub next: Point,
}

pub fn ishikawa_step(
    space: &Space,
    map: &NonexpansiveMap,
    sched: &ScalarSchedule,
    n: usize,
    x: &Point,
) -> Result<StepData> {
    let tx = map.apply(space, x)?;
    let y = space.combine_unchecked(x, &tx, sched.s_at(n));
    // With s_n == 0 the intermediate point is x itself; reuse T x so the
    // Krasnoselski-Mann specialization is bit-identical.
    let ty = if y == *x { tx.clone() } else { map.apply(space, &y)? };
    let next = space.combine_unchecked(x, &ty, sched.lambda_at(n));
    Ok(StepData { tx, y, ty, next })
}

/// Recorded orbit: points plus per-step diagnostics. Everything here is
/// recomputable from `x_0`, the map, and the schedule.
#[derive(Clone, Debug)]
pub struct OrbitRecord {
    pub points: Vec<Point>,
    pub ys: Vec<Point>,
    /// `d(x_n, T x_n)` for `n = 0..=steps`.
    pub d_x_tx: Vec<f64>,
    /// `d(x_n, T y_n)` for `n = 0..steps`.
    pub d_x_ty: Vec<f64>,
    /// `d(x_n, x_{n+1})` for `n = 0..steps`.
    pub d_step: Vec<f64>,
    /// `d(x_n, p)` for a supplied anchor point.
    pub d_to_p: Option<Vec<f64>>,
}

impl OrbitRecord {
    pub fn steps(&self) -> usize {
        self.points.len() - 1
    }

    /// Smallest recorded `n` with `d(x_n, T x_n) < eps`.
    pub fn first_hit(&self, eps: f64) -> Option<usize> {
        self.d_x_tx.iter().position(|&d| d < eps)
    }

    /// Record distances to an anchor point (typically a fixed point).
    pub fn attach_anchor(&mut self, space: &Space, p: &Point) -> Result<()> {
        space.validate_point(p)?;
        self.d_to_p = Some(
            self.points
                .iter()
                .map(|x| space.dist_unchecked(x, p))
                .collect(),
        );
        Ok(())
    }

    pub fn max_dist_from(&self, space: &Space, x: &Point) -> f64 {
        self.points
            .iter()
            .map(|pt| space.dist_unchecked(pt, x))
            .fold(0.0, f64::max)
    }

    pub fn min_diag(&self) -> f64 {
        self.d_x_tx.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn run_orbit(
    space: &Space,
    map: &NonexpansiveMap,
    sched: &ScalarSchedule,
    x0: &Point,
    steps: usize,
) -> Result<OrbitRecord> {
    space.validate_point(x0)?;
    if !map.domain.contains(space, x0, 1e-9)? {
        return Err(Error::invalid("x0 lies outside the map's domain"));
    }
    let mut points = Vec::with_capacity(steps + 1);
    let mut ys = Vec::with_capacity(steps);
    let mut d_x_tx = Vec::with_capacity(steps + 1);
    let mut d_x_ty = Vec::with_capacity(steps);
    let mut d_step = Vec::with_capacity(steps);

    let mut x = x0.clone();
    for n in 0..steps {
        let st = ishikawa_step(space, map, sched, n, &x)?;
        if !map.domain.contains_unchecked(space, &st.next, 1e-9)? {
            let proj = crate::analysis::chebyshev_projection(space, &st.next, &map.domain, 1e-12)?;
            let excess = space.dist_unchecked(&st.next, &proj);
            return Err(Error::DomainViolation { step: n, excess });
        }
        d_x_tx.push(space.dist_unchecked(&x, &st.tx));
        d_x_ty.push(space.dist_unchecked(&x, &st.ty));
        d_step.push(space.dist_unchecked(&x, &st.next));
        ys.push(st.y);
        points.push(x);
        x = st.next;
    }
    let tx = map.apply(space, &x)?;
    d_x_tx.push(space.dist_unchecked(&x, &tx));
    points.push(x);

    Ok(OrbitRecord { points, ys, d_x_tx, d_x_ty, d_step, d_to_p: None })
}

/// Picard orbit `x_{n+1} = T x_n`.
pub fn picard_orbit(
    space: &Space,
    map: &NonexpansiveMap,
    x0: &Point,
    steps: usize,
) -> Result<OrbitRecord> {
    run_orbit(space, map, &ScalarSchedule::picard(), x0, steps)
}

/// Krasnoselski-Mann orbit `x_{n+1} = (1-lambda_n) x_n (+) lambda_n T x_n`;
/// the schedule's `s` component is ignored.
pub fn km_orbit(
    space: &Space,
    map: &NonexpansiveMap,
    sched: &ScalarSchedule,
    x0: &Point,
    steps: usize,
) -> Result<OrbitRecord> {
    let km = ScalarSchedule { s: SSeq::Zero, ..sched.clone() };
    run_orbit(space, map, &km, x0, steps)
}

/// Full Ishikawa orbit with the schedule's `(lambda_n, s_n)`.
pub fn ishikawa_orbit(
    space: &Space,
    map: &NonexpansiveMap,
    sched: &ScalarSchedule,
    x0: &Point,
    steps: usize,
) -> Result<OrbitRecord> {
    run_orbit(space, map, sched, x0, steps)
}

#[derive(Clone, Debug)]
pub struct ChainViolation {
    pub step: usize,
    pub rule: &'static str,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug, Default)]
pub struct ChainReport {
    pub checked_steps: usize,
    pub violations: Vec<ChainViolation>,
}

impl ChainReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn band(scale: f64) -> f64 {
    1e-9 * scale.max(1.0)
}

/// Verify the per-step inequality chain of Ishikawa iterates along a recorded
/// orbit:
///
/// 1. `d(x_n, x_{n+1}) = lambda_n d(x_n, T y_n)`
/// 2. `d(y_n, x_n) = s_n d(x_n, T x_n)`
/// 3. `(1 - s_n) d(x_n, Tx_n) <= d(x_n, Ty_n) <= (1 + s_n) d(x_n, Tx_n)`
/// 4. `d(y_n, T y_n) <= d(x_n, T x_n)`
/// 5. `d(x_{n+1}, T x_{n+1}) <= (1 + 2 s_n (1 - lambda_n)) d(x_n, T x_n)`
///
/// and, when an anchor fixed point is supplied, the Fejer property
/// `d(x_{n+1}, p) <= d(x_n, p)` together with `d(x_n, Tx_n) <= 2 d(x_n, p)`.
pub fn check_ishikawa_chain(
    space: &Space,
    map: &NonexpansiveMap,
    orbit: &OrbitRecord,
    sched: &ScalarSchedule,
    p: Option<&Point>,
) -> Result<ChainReport> {
    let steps = orbit.steps();
    let mut report = ChainReport { checked_steps: steps, ..Default::default() };
    let d_to_p = match p {
        Some(p) => Some(
            orbit
                .points
                .iter()
                .map(|x| space.dist_unchecked(x, p))
                .collect::<Vec<_>>(),
        ),
        None => None,
    };
    let mut push = |step, rule, lhs: f64, rhs: f64| {
        report.violations.push(ChainViolation { step, rule, lhs, rhs });
    };

    for n in 0..steps {
        let lam = sched.lambda_at(n);
        let s = sched.s_at(n);
        let dtx = orbit.d_x_tx[n];
        let dty = orbit.d_x_ty[n];
        let tol = band(dtx.max(dty));

        let lhs = orbit.d_step[n];
        let rhs = lam * dty;
        if (lhs - rhs).abs() > tol {
            push(n, "step-equals-lambda-ty", lhs, rhs);
        }

        let dyx = space.dist_unchecked(&orbit.ys[n], &orbit.points[n]);
        if (dyx - s * dtx).abs() > tol {
            push(n, "y-offset-equals-s-tx", dyx, s * dtx);
        }

        if (1.0 - s) * dtx > dty + tol {
            push(n, "ty-lower", (1.0 - s) * dtx, dty);
        }
        if dty > (1.0 + s) * dtx + tol {
            push(n, "ty-upper", dty, (1.0 + s) * dtx);
        }

        let ty_img = map.apply(space, &orbit.ys[n])?;
        let dyty = space.dist_unchecked(&orbit.ys[n], &ty_img);
        if dyty > dtx + tol {
            push(n, "y-diag-bounded", dyty, dtx);
        }

        let growth = (1.0 + 2.0 * s * (1.0 - lam)) * dtx;
        if orbit.d_x_tx[n + 1] > growth + band(growth) {
            push(n, "diag-growth", orbit.d_x_tx[n + 1], growth);
        }

        if let Some(dp) = &d_to_p {
            if dp[n + 1] > dp[n] + band(dp[n]) {
                push(n, "fejer", dp[n + 1], dp[n]);
            }
            if dtx > 2.0 * dp[n] + band(dp[n]) {
                push(n, "diag-vs-anchor", dtx, 2.0 * dp[n]);
            }
        }
    }
    Ok(report)
}

/// Spot-check the descent inequality behind the rate certificates: at every
/// step where `d(x_n, p) <= beta` and both `d(x_n, p)` and `d(x_n, Ty_n)` are
/// positive,
///
/// `d(x_{n+1}, p) <= d(x_n, p) - 2 d(x_n,p) lambda_n (1-lambda_n) eta(beta, a/beta)`
///
/// with `a = d(x_n, Ty_n)`.
pub fn check_descent_inequality(
    space: &Space,
    orbit: &OrbitRecord,
    sched: &ScalarSchedule,
    p: &Point,
    modulus: &Modulus,
    beta: f64,
) -> Result<ChainReport> {
    let steps = orbit.steps();
    let mut report = ChainReport { checked_steps: steps, ..Default::default() };
    for n in 0..steps {
        let dp = space.dist_unchecked(&orbit.points[n], p);
        let a = orbit.d_x_ty[n];
        if dp <= 0.0 || a <= 0.0 || dp > beta {
            continue;
        }
        let eps_arg = (a / beta).min(2.0);
        let eta = modulus.eval(beta, eps_arg)?;
        let lam = sched.lambda_at(n);
        let rhs = dp - 2.0 * dp * lam * (1.0 - lam) * eta;
        let lhs = space.dist_unchecked(&orbit.points[n + 1], p);
        if lhs > rhs + band(dp) {
            report.violations.push(ChainViolation { step: n, rule: "descent", lhs, rhs });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mappings::{identity, projection_map, rotation_map};
    use crate::spaces::ConvexSet;

    fn e2() -> Space {
        Space::euclidean(2).unwrap()
    }

    fn v(x: f64, y: f64) -> Point {
        Point::vector(vec![x, y])
    }

    #[test]
    fn picard_identity_is_constant() {
        let s = e2();
        let orbit = picard_orbit(&s, &identity(ConvexSet::Whole), &v(0.3, 0.4), 16).unwrap();
        assert!(orbit.points.iter().all(|p| *p == v(0.3, 0.4)));
        assert_eq!(orbit.first_hit(1e-12), Some(0));
    }

    #[test]
    fn picard_involution_alternates() {
        let s = e2();
        let neg = rotation_map(&s, v(0.0, 0.0), std::f64::consts::PI).unwrap();
        let orbit = picard_orbit(&s, &neg, &v(1.0, 0.0), 4).unwrap();
        for (n, p) in orbit.points.iter().enumerate() {
            let expect = if n % 2 == 0 { v(1.0, 0.0) } else { v(-1.0, 0.0) };
            assert!(s.dist(p, &expect).unwrap() < 1e-12);
        }
    }

    #[test]
    fn picard_quarter_rotation_has_period_four() {
        let s = e2();
        let rot = rotation_map(&s, v(0.0, 0.0), std::f64::consts::FRAC_PI_2).unwrap();
        let orbit = picard_orbit(&s, &rot, &v(1.0, 0.0), 4).unwrap();
        assert!(s.dist(&orbit.points[4], &v(1.0, 0.0)).unwrap() < 1e-12);
    }

    #[test]
    fn km_with_zero_lambda_stays_put() {
        let s = e2();
        let rot = rotation_map(&s, v(0.0, 0.0), 1.0).unwrap();
        let sched = ScalarSchedule::km(LambdaSeq::Const(0.0)).unwrap();
        let orbit = km_orbit(&s, &rot, &sched, &v(1.0, 0.0), 8).unwrap();
        assert!(orbit.points.iter().all(|p| *p == v(1.0, 0.0)));
    }

    #[test]
    fn km_with_unit_lambda_is_picard() {
        let s = e2();
        let rot = rotation_map(&s, v(0.0, 0.0), 0.9).unwrap();
        let sched = ScalarSchedule::km(LambdaSeq::Const(1.0)).unwrap();
        let km = km_orbit(&s, &rot, &sched, &v(1.0, 0.0), 12).unwrap();
        let pic = picard_orbit(&s, &rot, &v(1.0, 0.0), 12).unwrap();
        assert_eq!(km.points, pic.points);
    }

    #[test]
    fn km_midpoint_of_point_reflection_hits_center() {
        let s = e2();
        let neg = rotation_map(&s, v(0.0, 0.0), std::f64::consts::PI).unwrap();
        let sched = ScalarSchedule::km(LambdaSeq::Const(0.5)).unwrap();
        let orbit = km_orbit(&s, &neg, &sched, &v(1.0, 0.0), 5).unwrap();
        for p in &orbit.points[1..] {
            assert!(s.dist(p, &v(0.0, 0.0)).unwrap() < 1e-12);
        }
    }

    #[test]
    fn ishikawa_with_zero_s_matches_km_bitwise() {
        let s = e2();
        let rot = rotation_map(&s, v(0.2, -0.1), 0.77).unwrap();
        let sched = ScalarSchedule::new(LambdaSeq::Alternating, SSeq::Zero).unwrap();
        let a = ishikawa_orbit(&s, &rot, &sched, &v(1.5, 0.25), 400).unwrap();
        let b = km_orbit(&s, &rot, &sched, &v(1.5, 0.25), 400).unwrap();
        assert_eq!(a.points, b.points);
        assert_eq!(a.d_x_tx, b.d_x_tx);
    }

    #[test]
    fn ishikawa_with_zero_lambda_is_constant() {
        let s = e2();
        let rot = rotation_map(&s, v(0.0, 0.0), 1.3).unwrap();
        let sched = ScalarSchedule::new(
            LambdaSeq::Const(0.0),
            SSeq::Geometric { c: 0.5, q: 0.5 },
        )
        .unwrap();
        let orbit = ishikawa_orbit(&s, &rot, &sched, &v(1.0, 0.0), 10).unwrap();
        assert!(orbit.points.iter().all(|p| *p == v(1.0, 0.0)));
    }

    #[test]
    fn km_quarter_rotation_closed_form_diagnostic() {
        // One KM step with lambda = 1/2 scales the iterate by (1+i)/2, so
        // d(x_n, Tx_n) = sqrt(2) * (sqrt(2)/2)^n.
        let s = e2();
        let rot = rotation_map(&s, v(0.0, 0.0), std::f64::consts::FRAC_PI_2).unwrap();
        let sched = ScalarSchedule::km(LambdaSeq::Const(0.5)).unwrap();
        let orbit = km_orbit(&s, &rot, &sched, &v(1.0, 0.0), 50).unwrap();
        let ratio = 2.0f64.sqrt() / 2.0;
        for n in 0..=50 {
            let expect = 2.0f64.sqrt() * ratio.powi(n as i32);
            let got = orbit.d_x_tx[n];
            assert!(
                (got - expect).abs() <= 1e-9 * expect.max(1e-12),
                "n = {n}: got {got}, expect {expect}"
            );
        }
        assert_eq!(orbit.first_hit(0.1), Some(8));
        assert_eq!(orbit.first_hit(10.0), Some(0));
        assert_eq!(orbit.first_hit(1e-30), None);
    }

    #[test]
    fn km_diagnostic_is_nonincreasing() {
        let s = e2();
        let rot = rotation_map(&s, v(0.3, 0.3), 2.1).unwrap();
        let sched = ScalarSchedule::km(LambdaSeq::Alternating).unwrap();
        let orbit = km_orbit(&s, &rot, &sched, &v(1.4, -0.2), 300).unwrap();
        for w in orbit.d_x_tx.windows(2) {
            assert!(w[1] <= w[0] + 1e-9 * w[0].max(1.0));
        }
    }

    #[test]
    fn chain_holds_on_identity_orbit() {
        let s = e2();
        let id = identity(ConvexSet::Whole);
        let sched = ScalarSchedule::new(LambdaSeq::Const(0.5), SSeq::InverseSquare).unwrap();
        let orbit = ishikawa_orbit(&s, &id, &sched, &v(0.7, 0.1), 50).unwrap();
        let report =
            check_ishikawa_chain(&s, &id, &orbit, &sched, Some(&v(0.7, 0.1))).unwrap();
        assert!(report.ok(), "{:?}", report.violations.first());
    }

    #[test]
    fn chain_holds_on_hyperbolic_rotation_orbit() {
        let s = Space::hyperbolic2();
        let center = Space::hyperbolic_point(0.1, 0.2);
        let rot = rotation_map(&s, center.clone(), 0.9).unwrap();
        let sched = ScalarSchedule::new(
            LambdaSeq::Const(0.5),
            SSeq::Geometric { c: 1.0, q: 0.5 },
        )
        .unwrap();
        let x0 = Space::hyperbolic_point(0.9, -0.3);
        let orbit = ishikawa_orbit(&s, &rot, &sched, &x0, 1000).unwrap();
        let report = check_ishikawa_chain(&s, &rot, &orbit, &sched, Some(&center)).unwrap();
        assert!(report.ok(), "{:?}", report.violations.first());
    }

    #[test]
    fn chain_holds_on_projection_orbit() {
        let s = e2();
        let ball = ConvexSet::ball(v(0.0, 0.0), 1.0).unwrap();
        let proj = projection_map(ball);
        let sched = ScalarSchedule::new(LambdaSeq::Alternating, SSeq::InverseSquare).unwrap();
        let orbit = ishikawa_orbit(&s, &proj, &sched, &v(3.0, 4.0), 400).unwrap();
        let report = check_ishikawa_chain(&s, &proj, &orbit, &sched, Some(&v(0.6, 0.8))).unwrap();
        assert!(report.ok(), "{:?}", report.violations.first());
    }

    #[test]
    fn descent_inequality_spot_check() {
        let s = e2();
        let rot = rotation_map(&s, v(0.0, 0.0), std::f64::consts::FRAC_PI_2).unwrap();
        let sched = ScalarSchedule::new(
            LambdaSeq::Const(0.5),
            SSeq::Geometric { c: 0.5, q: 0.5 },
        )
        .unwrap();
        let orbit = ishikawa_orbit(&s, &rot, &sched, &v(1.0, 0.0), 200).unwrap();
        let report = check_descent_inequality(
            &s,
            &orbit,
            &sched,
            &v(0.0, 0.0),
            &crate::modulus::cat0_modulus(),
            1.0,
        )
        .unwrap();
        assert!(report.ok(), "{:?}", report.violations.first());
    }

    #[test]
    fn orbit_errors_when_leaving_domain() {
        let line = Space::euclidean(1).unwrap();
        let shift = crate::mappings::translation_map(&line, vec![1.0])
            .unwrap()
            .with_domain(ConvexSet::ball(Point::vector(vec![0.0]), 2.0).unwrap());
        let sched = ScalarSchedule::km(LambdaSeq::Const(1.0)).unwrap();
        let err = km_orbit(&line, &shift, &sched, &Point::vector(vec![0.0]), 10).unwrap_err();
        match err {
            Error::DomainViolation { step, .. } => assert_eq!(step, 2),
            other => panic!("expected domain violation, got {other}"),
        }
    }

    #[test]
    fn schedule_certificates_validate() {
        for (lam, s) in [
            (LambdaSeq::Const(0.5), SSeq::Zero),
            (LambdaSeq::Const(0.3), SSeq::Geometric { c: 0.9, q: 0.5 }),
            (LambdaSeq::Alternating, SSeq::InverseSquare),
            (LambdaSeq::Const(0.6), SSeq::Geometric { c: 0.3, q: 0.7 }),
        ] {
            let sched = ScalarSchedule::new(lam, s).unwrap();
            validate_schedule(&sched, 2000).unwrap();
        }
    }

    #[test]
    fn bogus_certificates_are_rejected() {
        let good = ScalarSchedule::new(LambdaSeq::Const(0.5), SSeq::Zero).unwrap();

        let bad_theta = good.clone().with_theta(DivergenceRate::LinearCeil { scale: 1.0 });
        let err = validate_schedule(&bad_theta, 1000).unwrap_err();
        assert!(err.to_string().contains("divergence"), "{err}");

        let sched = ScalarSchedule::new(
            LambdaSeq::Const(0.5),
            SSeq::Geometric { c: 1.0, q: 0.5 },
        )
        .unwrap();
        let bad_l = sched.clone().with_l_n0(2, 0); // s_0 = 1 > 1/2
        let err = validate_schedule(&bad_l, 1000).unwrap_err();
        assert!(err.to_string().contains("1 - 1/L"), "{err}");

        let bad_gamma = good.with_gamma(CauchyModulus::GeometricTail { c: 1e-12, q: 0.5 });
        // gamma(eps) = 0 claims tiny oscillation; true sums are zero here, so
        // craft a schedule where s is nonzero instead.
        let sched = ScalarSchedule::new(LambdaSeq::Const(0.5), SSeq::InverseSquare)
            .unwrap()
            .with_gamma(CauchyModulus::Zero);
        // Oscillation past 0 of sum s_n(1-lambda_n) is ~0.23 which violates
        // eps = 0.06 and below.
        let err = validate_schedule(&sched, 4000).unwrap_err();
        assert!(err.to_string().contains("Cauchy"), "{err}");
        drop(bad_gamma);
    }

    #[test]
    fn divergence_rate_golden_values() {
        let theta = const_lambda_divergence_rate(0.5).unwrap();
        assert_eq!(theta.eval(0).unwrap(), 0);
        assert_eq!(theta.eval(16).unwrap(), 64);
        // Partial sums certify the rate, equality at the exact multiple.
        let sched = ScalarSchedule::km(LambdaSeq::Const(0.5)).unwrap();
        let idx = theta.eval(10).unwrap() as usize;
        assert!(sched.lambda_partial_sum(idx) >= 10.0);
    }

    #[test]
    fn geometric_tail_matches_log_formula() {
        // s_n = 2^-n: tail past k is 2^-k, so gamma(eps) = ceil(log2(1/eps)).
        let g = CauchyModulus::GeometricTail { c: 1.0, q: 0.5 };
        assert_eq!(g.eval(1.0).unwrap(), 0);
        assert_eq!(g.eval(0.1).unwrap(), 4);
        assert_eq!(g.eval(0.25).unwrap(), 2);
        let scaled = weighted_series_modulus(&g, 0.5).unwrap();
        assert_eq!(scaled.eval(0.5).unwrap(), 0); // delta(1.0)
        assert_eq!(scaled.eval(0.05).unwrap(), 4); // delta(0.1)
    }

    #[test]
    fn inverse_square_tail_bound_is_valid() {
        let m = CauchyModulus::InverseSquareTail;
        for eps in [0.5, 0.1, 0.013] {
            let k = m.eval(eps).unwrap() as usize;
            let tail: f64 = (k + 1..k + 200_000)
                .map(|i| 1.0 / ((i + 2) as f64).powi(2))
                .sum();
            assert!(tail < eps, "eps = {eps}, k = {k}, tail = {tail}");
        }
    }
}
