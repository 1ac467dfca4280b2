//! Explicit rate certificates for asymptotic regularity of Ishikawa orbits.
//!
//! Every function here evaluates a closed-form bound N(eps) built from a
//! modulus of uniform convexity `eta`, a distance bound `b >= d(x0, p)` to
//! some fixed point (or the diameter `d_C` of a bounded domain), a divergence
//! rate `theta` for `sum lambda_n (1 - lambda_n)`, `(L, N0)` taming the
//! `s_n`, and a Cauchy modulus for the coupling series. Two guarantee shapes
//! occur and are tracked as data:
//!
//! - existence: some `N <= bound` has a small diagnostic (`ty_hit_bound`,
//!   `tx_hit_bound`, `approx_fixed_point_bound`);
//! - for-all: every `n >= bound` has `d(x_n, T x_n) < eps`
//!   (`regularity_bound` and its factored / constant-lambda / quadratic
//!   specializations, `km_regularity_bound`).
//!
//! All real arithmetic is evaluated with directed rounding (see
//! [`crate::directed`]) so a certificate can only be enlarged by
//! floating-point error, never shrunk. Branch conditions written as
//! `eps <= threshold` are resolved conservatively at exact equality by
//! evaluating both branches and emitting the larger bound.

use serde::Serialize;

use crate::directed::{add_dir, ceil_index, div_dir, mul_dir, sub_dir, Dir};
use crate::error::{Error, Result};
use crate::iterate::{CauchyModulus, DivergenceRate, ScalarSchedule};
use crate::modulus::Modulus;

pub use crate::iterate::{const_lambda_divergence_rate, weighted_series_modulus};

/// Arithmetic mode: `Conservative` applies directed rounding, `Nearest` is
/// plain f64. The public bound functions always emit the conservative value;
/// `Nearest` exists so tests can measure how far the two modes drift apart.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rounding {
    Nearest,
    Conservative,
}

#[derive(Clone, Copy)]
struct Arith(Rounding);

impl Arith {
    fn add(&self, a: f64, b: f64, dir: Dir) -> f64 {
        match self.0 {
            Rounding::Nearest => a + b,
            Rounding::Conservative => add_dir(a, b, dir),
        }
    }
    fn mul(&self, a: f64, b: f64, dir: Dir) -> f64 {
        match self.0 {
            Rounding::Nearest => a * b,
            Rounding::Conservative => mul_dir(a, b, dir),
        }
    }
    fn div(&self, a: f64, b: f64, dir: Dir) -> f64 {
        match self.0 {
            Rounding::Nearest => a / b,
            Rounding::Conservative => div_dir(a, b, dir),
        }
    }
    fn eval(&self, m: &Modulus, r: f64, eps: f64, dir: Dir) -> Result<f64> {
        match self.0 {
            Rounding::Nearest => m.eval(r, eps),
            Rounding::Conservative => m.eval_dir(r, eps, Some(dir)),
        }
    }
    fn eval_factored(&self, m: &Modulus, r: f64, eps: f64, dir: Dir) -> Result<f64> {
        match self.0 {
            Rounding::Nearest => m.factored_eval(r, eps),
            Rounding::Conservative => m.factored_eval_dir(r, eps, Some(dir)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Formula {
    TyHit,
    TxHit,
    ApproxFixedPoint,
    Regularity,
    RegularityFactored,
    RegularityConstLambda,
    RegularityCat0,
    KmRegularity,
}

impl Formula {
    pub fn name(&self) -> &'static str {
        match self {
            Formula::TyHit => "ty_hit",
            Formula::TxHit => "tx_hit",
            Formula::ApproxFixedPoint => "afp",
            Formula::Regularity => "regularity",
            Formula::RegularityFactored => "regularity_factored",
            Formula::RegularityConstLambda => "regularity_const_lambda",
            Formula::RegularityCat0 => "regularity_cat0",
            Formula::KmRegularity => "km_regularity",
        }
    }
}

/// Quantifier shape of a certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Guarantee {
    /// `d(x_n, T x_n) < eps` for every `n >= bound`.
    ForAllFrom,
    /// Some `n <= bound` satisfies the diagnostic.
    ExistsUpTo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `eps` below the threshold: the theta-composed expression.
    Main,
    /// `eps` above the threshold: the residual term only.
    Tail,
    /// Exact equality: both branches evaluated, the larger emitted.
    Boundary,
}

/// Inputs echoed into certificate records for provenance.
#[derive(Clone, Debug, Default, Serialize)]
pub struct InputsEcho {
    pub eps: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n0: Option<u64>,
    pub modulus: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<&'static str>,
}

/// An evaluated bound with provenance.
#[derive(Clone, Debug, Serialize)]
pub struct RateCertificate {
    pub formula: Formula,
    pub bound: u64,
    pub guarantee: Guarantee,
    pub branch: Branch,
    pub inputs: InputsEcho,
}

fn check_eps_b(eps: f64, b: f64) -> Result<()> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::invalid(format!("eps = {eps} must be positive")));
    }
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::invalid(format!("distance bound {b} must be positive")));
    }
    Ok(())
}

/// Core index `ceil((b+1) / (eps * eta(b, eps/b)))` of the existence bounds,
/// meaningful for `eps <= 2b`.
pub fn hit_inner_index(eps: f64, modulus: &Modulus, b: f64, rounding: Rounding) -> Result<u64> {
    let a = Arith(rounding);
    let arg = a.div(eps, b, Dir::Down);
    // In-branch callers have eps <= 2b, so arg <= 2; the modulus itself
    // rejects arguments outside (0, 2] rather than clamping them.
    debug_assert!(arg <= 2.0);
    let eta = a.eval(modulus, b, arg, Dir::Down)?;
    let denom = a.mul(eps, eta, Dir::Down);
    let num = a.add(b, 1.0, Dir::Up);
    ceil_index(a.div(num, denom, Dir::Up))
}

fn ty_hit_with(
    eps: f64,
    k: u64,
    modulus: &Modulus,
    b: f64,
    theta: &DivergenceRate,
    rounding: Rounding,
) -> Result<u64> {
    check_eps_b(eps, b)?;
    let threshold = 2.0 * b;
    if eps > threshold {
        return Ok(k);
    }
    let idx = hit_inner_index(eps, modulus, b, rounding)?
        .checked_add(k)
        .ok_or_else(|| Error::Numeric("bound index overflow".into()))?;
    let main = theta.eval(idx)?;
    Ok(if eps == threshold { main.max(k) } else { main })
}

/// Existence bound for the bridged diagnostic: some `N` with
/// `k <= N <= bound` has `d(x_N, T y_N) < eps`. Needs a divergence rate for
/// `sum lambda_n (1 - lambda_n)` and `b >= d(x0, p)` for a fixed point `p`.
pub fn ty_hit_bound(
    eps: f64,
    k: u64,
    modulus: &Modulus,
    b: f64,
    theta: &DivergenceRate,
) -> Result<u64> {
    ty_hit_with(eps, k, modulus, b, theta, Rounding::Conservative)
}

/// Existence bound for the fixed-point diagnostic: some `N` with
/// `k <= N <= bound` has `d(x_N, T x_N) < eps`. Reduces to
/// `ty_hit_bound(eps/L, k + N0, ...)`.
pub fn tx_hit_bound(
    eps: f64,
    k: u64,
    modulus: &Modulus,
    b: f64,
    theta: &DivergenceRate,
    l: u64,
    n0: u64,
) -> Result<u64> {
    if l < 1 {
        return Err(Error::invalid("L must be >= 1"));
    }
    let scaled = div_dir(eps, l as f64, Dir::Down);
    let k2 = k
        .checked_add(n0)
        .ok_or_else(|| Error::Numeric("bound index overflow".into()))?;
    ty_hit_with(scaled, k2, modulus, b, theta, Rounding::Conservative)
}

/// Approximate fixed-point bound: `tx_hit_bound` with `k = 0`.
pub fn approx_fixed_point_bound(
    eps: f64,
    modulus: &Modulus,
    b: f64,
    theta: &DivergenceRate,
    l: u64,
    n0: u64,
) -> Result<u64> {
    tx_hit_bound(eps, 0, modulus, b, theta, l, n0)
}

/// Inputs of the full regularity bound.
#[derive(Clone, Debug)]
pub struct RateInputs<'a> {
    pub eps: f64,
    /// `b >= d(x0, p)` for some fixed point `p`, or the domain diameter.
    pub b: f64,
    pub modulus: &'a Modulus,
    pub theta: &'a DivergenceRate,
    /// Cauchy modulus for `sum s_n (1 - lambda_n)`.
    pub gamma: &'a CauchyModulus,
    pub l: u64,
    pub n0: u64,
}

impl<'a> RateInputs<'a> {
    fn validate(&self) -> Result<()> {
        check_eps_b(self.eps, self.b)?;
        if self.l < 1 {
            return Err(Error::invalid("L must be >= 1"));
        }
        if !self.modulus.is_monotone() {
            return Err(Error::Hypothesis(
                "the regularity bound needs a monotone modulus".into(),
            ));
        }
        Ok(())
    }

    fn echo(&self, variant: Option<&'static str>) -> InputsEcho {
        InputsEcho {
            eps: self.eps,
            b: Some(self.b),
            l: Some(self.l),
            n0: Some(self.n0),
            modulus: self.modulus.describe(),
            theta: Some(self.theta.describe()),
            gamma: Some(self.gamma.describe()),
            variant,
            ..Default::default()
        }
    }

    /// `gamma(eps / 8b) + N0 + 1`, the theta-free residual term.
    fn tail_term(&self) -> Result<u64> {
        let arg = div_dir(self.eps, mul_dir(8.0, self.b, Dir::Up), Dir::Down);
        self.gamma
            .eval(arg)?
            .checked_add(self.n0 + 1)
            .ok_or_else(|| Error::Numeric("bound index overflow".into()))
    }
}

/// Core index `ceil(2L(b+1) / (eps * eta(b, eps/(2Lb))))` of the regularity
/// bound (or its factored halving), meaningful for `eps <= 4Lb`.
pub fn regularity_inner_index(
    eps: f64,
    modulus: &Modulus,
    b: f64,
    l: u64,
    factored: bool,
    rounding: Rounding,
) -> Result<u64> {
    let a = Arith(rounding);
    let two_lb = a.mul(2.0 * l as f64, b, Dir::Up);
    let arg = a.div(eps, two_lb, Dir::Down);
    debug_assert!(arg <= 2.0);
    let (coeff, eta) = if factored {
        (l as f64, a.eval_factored(modulus, b, arg, Dir::Down)?)
    } else {
        (2.0 * l as f64, a.eval(modulus, b, arg, Dir::Down)?)
    };
    let num = a.mul(coeff, a.add(b, 1.0, Dir::Up), Dir::Up);
    let denom = a.mul(eps, eta, Dir::Down);
    ceil_index(a.div(num, denom, Dir::Up))
}

fn regularity_with(inp: &RateInputs, factored: bool) -> Result<RateCertificate> {
    inp.validate()?;
    if factored && !inp.modulus.has_factored() {
        return Err(Error::MissingCertificate(format!(
            "modulus `{}` has no factored form",
            inp.modulus.describe()
        )));
    }
    let tail = inp.tail_term()?;
    let threshold = 4.0 * inp.l as f64 * inp.b;
    let formula = if factored { Formula::RegularityFactored } else { Formula::Regularity };
    let variant = if factored { Some("factored") } else { None };

    let build = |bound, branch| RateCertificate {
        formula,
        bound,
        guarantee: Guarantee::ForAllFrom,
        branch,
        inputs: inp.echo(variant),
    };

    if inp.eps > threshold {
        return Ok(build(tail, Branch::Tail));
    }
    let inner =
        regularity_inner_index(inp.eps, inp.modulus, inp.b, inp.l, factored, Rounding::Conservative)?;
    let idx = inner
        .checked_add(tail)
        .ok_or_else(|| Error::Numeric("bound index overflow".into()))?;
    let main = inp.theta.eval(idx)?;
    if inp.eps == threshold {
        Ok(build(main.max(tail), Branch::Boundary))
    } else {
        Ok(build(main, Branch::Main))
    }
}

/// Full rate of asymptotic regularity for Ishikawa orbits:
///
/// `theta( ceil(2L(b+1) / (eps * eta(b, eps/(2Lb)))) + gamma(eps/8b) + N0 + 1 )`
///
/// for `eps <= 4Lb`, and `gamma(eps/8b) + N0 + 1` otherwise. For-all
/// guarantee: `d(x_n, T x_n) < eps` for every `n >=` the bound.
pub fn regularity_bound(inp: &RateInputs) -> Result<RateCertificate> {
    regularity_with(inp, false)
}

/// Sharper variant for moduli factored as `eta = eps * eta_tilde`: the inner
/// index becomes `ceil(L(b+1) / (eps * eta_tilde(b, eps/(2Lb))))`. Never
/// exceeds `regularity_bound` on the same inputs (the non-factored inner term
/// is `2Lb/eps >= 1` times larger inside the branch).
pub fn factored_regularity_bound(inp: &RateInputs) -> Result<RateCertificate> {
    regularity_with(inp, true)
}

/// Krasnoselski-Mann rate: `ty_hit_bound` with `k = 0` promoted to a for-all
/// guarantee, valid because the diagnostic sequence is nonincreasing for KM
/// orbits. The schedule must have `s == 0`.
pub fn km_regularity_bound(
    eps: f64,
    modulus: &Modulus,
    b: f64,
    theta: &DivergenceRate,
    sched: &ScalarSchedule,
) -> Result<RateCertificate> {
    if !sched.s.is_zero() {
        return Err(Error::Hypothesis(
            "the KM rate applies only to schedules with s == 0".into(),
        ));
    }
    check_eps_b(eps, b)?;
    let threshold = 2.0 * b;
    let (bound, branch) = if eps > threshold {
        (0, Branch::Tail)
    } else {
        let main = theta.eval(hit_inner_index(eps, modulus, b, Rounding::Conservative)?)?;
        if eps == threshold {
            (main, Branch::Boundary)
        } else {
            (main, Branch::Main)
        }
    };
    Ok(RateCertificate {
        formula: Formula::KmRegularity,
        bound,
        guarantee: Guarantee::ForAllFrom,
        branch,
        inputs: InputsEcho {
            eps,
            b: Some(b),
            modulus: modulus.describe(),
            theta: Some(theta.describe()),
            ..Default::default()
        },
    })
}

fn const_lambda_m_term(
    eps: f64,
    d_c: f64,
    lambda: f64,
    n0: u64,
    delta: &CauchyModulus,
) -> Result<u64> {
    let denom = mul_dir(
        mul_dir(8.0, d_c, Dir::Up),
        sub_dir(1.0, lambda, Dir::Up),
        Dir::Up,
    );
    let arg = div_dir(eps, denom, Dir::Down);
    delta
        .eval(arg)?
        .checked_add(n0 + 1)
        .ok_or_else(|| Error::Numeric("bound index overflow".into()))
}

/// Constant-lambda regularity bound over a bounded domain of diameter `d_C`,
/// with `delta` a Cauchy modulus for `sum s_n`:
///
/// `ceil( 1/(lambda(1-lambda)) * 2L(d_C+1) / (eps * eta(d_C, eps/(2Ld_C))) ) + M`
///
/// for `eps <= 4Ld_C` and `M` otherwise, where
/// `M = delta(eps / (8 d_C (1-lambda))) + N0 + 1`. When the modulus carries a
/// factored form the sharper variant with `L(d_C+1)` over `eta_tilde` is
/// evaluated instead.
pub fn const_lambda_regularity_bound(
    eps: f64,
    modulus: &Modulus,
    d_c: f64,
    lambda: f64,
    l: u64,
    n0: u64,
    delta: &CauchyModulus,
) -> Result<RateCertificate> {
    check_eps_b(eps, d_c)?;
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::Hypothesis(format!(
            "constant-lambda bound needs lambda in (0, 1); lambda(1-lambda) = 0 at {lambda}"
        )));
    }
    if l < 1 {
        return Err(Error::invalid("L must be >= 1"));
    }
    let factored = modulus.has_factored();
    let m_term = const_lambda_m_term(eps, d_c, lambda, n0, delta)?;
    let echo = |variant| InputsEcho {
        eps,
        d_c: Some(d_c),
        lambda: Some(lambda),
        l: Some(l),
        n0: Some(n0),
        modulus: modulus.describe(),
        delta: Some(delta.describe()),
        variant: Some(variant),
        ..Default::default()
    };
    let build = |bound, branch, variant| RateCertificate {
        formula: Formula::RegularityConstLambda,
        bound,
        guarantee: Guarantee::ForAllFrom,
        branch,
        inputs: echo(variant),
    };
    let variant = if factored { "factored" } else { "general" };

    let threshold = 4.0 * l as f64 * d_c;
    if eps > threshold {
        return Ok(build(m_term, Branch::Tail, variant));
    }
    let weight = div_dir(
        1.0,
        mul_dir(lambda, sub_dir(1.0, lambda, Dir::Down), Dir::Down),
        Dir::Up,
    );
    let a = Arith(Rounding::Conservative);
    let two_ld = a.mul(2.0 * l as f64, d_c, Dir::Up);
    let arg = a.div(eps, two_ld, Dir::Down);
    debug_assert!(arg <= 2.0);
    let (coeff, eta) = if factored {
        (l as f64, modulus.factored_eval_dir(d_c, arg, Some(Dir::Down))?)
    } else {
        (2.0 * l as f64, modulus.eval_dir(d_c, arg, Some(Dir::Down))?)
    };
    let num = a.mul(coeff, a.add(d_c, 1.0, Dir::Up), Dir::Up);
    let denom = a.mul(eps, eta, Dir::Down);
    let inner = ceil_index(a.mul(weight, a.div(num, denom, Dir::Up), Dir::Up))?;
    let main = inner
        .checked_add(m_term)
        .ok_or_else(|| Error::Numeric("bound index overflow".into()))?;
    if eps == threshold {
        Ok(build(main.max(m_term), Branch::Boundary, variant))
    } else {
        Ok(build(main, Branch::Main, variant))
    }
}

/// Quadratic-modulus specialization over a bounded domain:
/// `ceil(D / eps^2) + M` for `eps <= 4Ld_C` (else `M`), with
/// `D = 16 L^2 d_C (d_C + 1) / (lambda (1 - lambda))` and `M` as in the
/// constant-lambda bound. Coincides with the factored constant-lambda bound
/// under the quadratic modulus.
pub fn cat0_regularity_bound(
    eps: f64,
    d_c: f64,
    lambda: f64,
    l: u64,
    n0: u64,
    delta: &CauchyModulus,
) -> Result<RateCertificate> {
    check_eps_b(eps, d_c)?;
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::Hypothesis(format!(
            "quadratic-modulus bound needs lambda in (0, 1); lambda(1-lambda) = 0 at {lambda}"
        )));
    }
    if l < 1 {
        return Err(Error::invalid("L must be >= 1"));
    }
    let m_term = const_lambda_m_term(eps, d_c, lambda, n0, delta)?;
    let echo = InputsEcho {
        eps,
        d_c: Some(d_c),
        lambda: Some(lambda),
        l: Some(l),
        n0: Some(n0),
        modulus: "cat0".into(),
        delta: Some(delta.describe()),
        ..Default::default()
    };
    let build = |bound, branch| RateCertificate {
        formula: Formula::RegularityCat0,
        bound,
        guarantee: Guarantee::ForAllFrom,
        branch,
        inputs: echo.clone(),
    };

    let threshold = 4.0 * l as f64 * d_c;
    if eps > threshold {
        return Ok(build(m_term, Branch::Tail));
    }
    let l2 = (l as f64) * (l as f64);
    let num = mul_dir(
        mul_dir(16.0 * l2, d_c, Dir::Up),
        add_dir(d_c, 1.0, Dir::Up),
        Dir::Up,
    );
    let d = div_dir(
        num,
        mul_dir(lambda, sub_dir(1.0, lambda, Dir::Down), Dir::Down),
        Dir::Up,
    );
    let inner = ceil_index(div_dir(d, mul_dir(eps, eps, Dir::Down), Dir::Up))?;
    let main = inner
        .checked_add(m_term)
        .ok_or_else(|| Error::Numeric("bound index overflow".into()))?;
    if eps == threshold {
        Ok(build(main.max(m_term), Branch::Boundary))
    } else {
        Ok(build(main, Branch::Main))
    }
}
