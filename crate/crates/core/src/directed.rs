//! Directed floating-point arithmetic.
//!
//! Rate certificates must never under-report a bound, so the formula
//! evaluators round every intermediate toward the conservative side. Each
//! helper returns a value guaranteed to bound the exact real result from the
//! requested side, and is exactness-aware: when an operation is exact in f64
//! (residual zero), no nudge is applied, so dyadic inputs reproduce the
//! hand-computed reference values bit-for-bit.
//!
//! Exactness detection uses the fused multiply-add residual: `a.mul_add(b, -a*b)`
//! is the exact rounding error of the product, and `q.mul_add(b, -a)` the
//! signed residual of the quotient `q = a/b`.

/// Rounding direction for a computed scalar.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dir {
    Down,
    Up,
}

impl Dir {
    pub fn flip(self) -> Dir {
        match self {
            Dir::Down => Dir::Up,
            Dir::Up => Dir::Down,
        }
    }
}

#[inline]
fn nudge(x: f64, dir: Dir) -> f64 {
    match dir {
        Dir::Down => x.next_down(),
        Dir::Up => x.next_up(),
    }
}

/// `x` adjusted by `ulps` steps in direction `dir`; for library functions
/// without correctly-rounded guarantees (powf, ln) a few ulps of slack
/// suffice at the magnitudes used here.
pub fn slack(mut x: f64, ulps: u32, dir: Dir) -> f64 {
    for _ in 0..ulps {
        x = nudge(x, dir);
    }
    x
}

pub fn add_dir(a: f64, b: f64, dir: Dir) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        return s;
    }
    // Knuth two-sum residual.
    let bv = s - a;
    let err = (a - (s - bv)) + (b - bv);
    match dir {
        Dir::Up if err > 0.0 => s.next_up(),
        Dir::Down if err < 0.0 => s.next_down(),
        _ => s,
    }
}

pub fn sub_dir(a: f64, b: f64, dir: Dir) -> f64 {
    add_dir(a, -b, dir)
}

pub fn mul_dir(a: f64, b: f64, dir: Dir) -> f64 {
    let p = a * b;
    if !p.is_finite() {
        return p;
    }
    let err = a.mul_add(b, -p);
    match dir {
        Dir::Up if err > 0.0 => p.next_up(),
        Dir::Down if err < 0.0 => p.next_down(),
        _ => p,
    }
}

/// Directed quotient; requires `b > 0`.
pub fn div_dir(a: f64, b: f64, dir: Dir) -> f64 {
    debug_assert!(b > 0.0);
    let q = a / b;
    if !q.is_finite() {
        return q;
    }
    // r = q*b - a, exact: r < 0 means q underestimates a/b.
    let r = q.mul_add(b, -a);
    match dir {
        Dir::Up if r < 0.0 => q.next_up(),
        Dir::Down if r > 0.0 => q.next_down(),
        _ => q,
    }
}

/// Ceiling of an up-rounded quantity as an integer index.
///
/// Fails when the value exceeds the range where f64 resolves integers, since
/// a bound that cannot be represented exactly cannot be certified.
pub fn ceil_index(x: f64) -> crate::Result<u64> {
    if !x.is_finite() {
        return Err(crate::Error::Numeric("bound evaluation overflowed".into()));
    }
    if x <= 0.0 {
        return Ok(0);
    }
    const MAX_EXACT: f64 = 9_007_199_254_740_992.0; // 2^53
    if x >= MAX_EXACT {
        return Err(crate::Error::Numeric(format!(
            "bound {x:.3e} exceeds the exactly representable integer range"
        )));
    }
    Ok(x.ceil() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_operations_stay_exact() {
        assert_eq!(mul_dir(1.0, 0.125, Dir::Up), 0.125);
        assert_eq!(mul_dir(1.0, 0.125, Dir::Down), 0.125);
        assert_eq!(div_dir(2.0, 0.125, Dir::Up), 16.0);
        assert_eq!(div_dir(2.0, 0.125, Dir::Down), 16.0);
        assert_eq!(add_dir(3.0, 0.5, Dir::Up), 3.5);
    }

    #[test]
    fn inexact_operations_bracket_nearest() {
        // 0.1 * 0.1 is inexact; the directed results must straddle it.
        let nearest = 0.1f64 * 0.1f64;
        let lo = mul_dir(0.1, 0.1, Dir::Down);
        let hi = mul_dir(0.1, 0.1, Dir::Up);
        assert!(lo <= nearest && nearest <= hi);
        assert!(lo < hi);

        let q = 1.0f64 / 3.0f64;
        let lo = div_dir(1.0, 3.0, Dir::Down);
        let hi = div_dir(1.0, 3.0, Dir::Up);
        assert!(lo <= q && q <= hi);
        assert!(hi - lo <= 2.0 * f64::EPSILON);
    }

    #[test]
    fn directed_results_differ_by_at_most_one_ulp() {
        let mut x = 0.37f64;
        for _ in 0..1000 {
            x = (x * 1.7 + 0.3).fract() + 0.01;
            let y = x * 3.1 + 0.2;
            let lo = mul_dir(x, y, Dir::Down);
            let hi = mul_dir(x, y, Dir::Up);
            assert!(hi == lo || hi == lo.next_up());
            let lo = div_dir(x, y, Dir::Down);
            let hi = div_dir(x, y, Dir::Up);
            assert!(hi == lo || hi == lo.next_up());
        }
    }

    #[test]
    fn ceil_index_behaviour() {
        assert_eq!(ceil_index(16.0).unwrap(), 16);
        assert_eq!(ceil_index(16.000000000000004).unwrap(), 17);
        assert_eq!(ceil_index(-3.0).unwrap(), 0);
        assert!(ceil_index(1e300).is_err());
        assert!(ceil_index(f64::INFINITY).is_err());
    }
}
