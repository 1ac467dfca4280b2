//! Asymptotic centers, nearest-point projection, and fixed-point
//! diagnostics.
//!
//! The asymptotic radius of a truncated sequence at a probe point is the max
//! of distances over a tail window; the asymptotic center minimizes that
//! functional over a closed convex set. The minimizer is located by a
//! derivative-free coordinate geodesic search with shrinking steps, which
//! works uniformly across all four concrete spaces; a brute-force grid
//! oracle lives in the test suites as the independent reference.

use crate::error::{Error, Result};
use crate::iterate::{km_orbit, picard_orbit, LambdaSeq, ScalarSchedule};
use crate::mappings::NonexpansiveMap;
use crate::modulus::{invert_eps, Modulus};
use crate::spaces::{hyperbolic_exp, minkowski_dot, ConvexSet, Point, Space};

/// A truncated bounded sequence with the tail window from which limsup-style
/// quantities are estimated.
#[derive(Clone, Debug)]
pub struct BoundedSequence {
    pub points: Vec<Point>,
    pub tail_start: usize,
}

impl BoundedSequence {
    pub fn new(points: Vec<Point>, tail_start: usize) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("sequence must be nonempty"));
        }
        if tail_start >= points.len() {
            return Err(Error::invalid(format!(
                "tail window starts at {tail_start} but the sequence has {} points",
                points.len()
            )));
        }
        Ok(BoundedSequence { points, tail_start })
    }

    pub fn tail(&self) -> &[Point] {
        &self.points[self.tail_start..]
    }

    /// Max pairwise distance; the declared bound of the sequence.
    pub fn bound(&self, space: &Space) -> Result<f64> {
        let mut b: f64 = 0.0;
        for (i, x) in self.points.iter().enumerate() {
            for y in &self.points[i + 1..] {
                b = b.max(space.dist(x, y)?);
            }
        }
        Ok(b)
    }
}

/// Tail-window estimate of `limsup_n d(y, x_n)`.
pub fn asymptotic_radius_at(space: &Space, y: &Point, seq: &BoundedSequence) -> Result<f64> {
    space.validate_point(y)?;
    let mut r: f64 = 0.0;
    for x in seq.tail() {
        r = r.max(space.dist(y, x)?);
    }
    Ok(r)
}

fn radius_unchecked(space: &Space, y: &Point, tail: &[Point]) -> f64 {
    tail.iter()
        .map(|x| space.dist_unchecked(y, x))
        .fold(0.0, f64::max)
}

/// Nearest point of a closed convex set. Balls, half-spaces (Euclidean),
/// ray segments, and hyperbolic/Euclidean geodesic segments have closed
/// forms; remaining segment cases fall back to a golden-section line search,
/// which converges because distance functions are convex along geodesics.
pub fn chebyshev_projection(
    space: &Space,
    x: &Point,
    set: &ConvexSet,
    tol: f64,
) -> Result<Point> {
    space.validate_point(x)?;
    match set {
        ConvexSet::Whole => Ok(x.clone()),
        ConvexSet::Ball { center, radius } => {
            let d = space.dist_unchecked(center, x);
            if d <= *radius {
                Ok(x.clone())
            } else if *radius == 0.0 {
                Ok(center.clone())
            } else {
                Ok(space.combine_unchecked(center, x, radius / d))
            }
        }
        ConvexSet::Halfspace { normal, offset } => {
            if !matches!(space, Space::Euclidean { .. }) {
                return Err(Error::Unsupported(
                    "half-space projection has a closed form only in euclidean space".into(),
                ));
            }
            let c = x.as_coords()?;
            if c.len() != normal.len() {
                return Err(Error::invalid("half-space normal dimension mismatch"));
            }
            let dot: f64 = normal.iter().zip(c.iter()).map(|(n, v)| n * v).sum();
            if dot <= *offset {
                return Ok(x.clone());
            }
            let nn: f64 = normal.iter().map(|n| n * n).sum();
            if nn == 0.0 {
                return Err(Error::invalid("half-space normal must be nonzero"));
            }
            let t = (dot - offset) / nn;
            Ok(Point::Vector(
                c.iter().zip(normal.iter()).map(|(v, n)| v - t * n).collect(),
            ))
        }
        ConvexSet::Segment { a, b } => project_segment(space, x, a, b, tol),
        ConvexSet::RaySegment { ray, lo, hi } => match *x {
            Point::Tree { ray: r, radius } => {
                if radius == 0.0 || r == *ray {
                    Ok(Point::tree(*ray, radius.clamp(*lo, *hi)))
                } else {
                    // Any path to the segment passes through the origin;
                    // closest member is the low end.
                    Ok(Point::tree(*ray, *lo))
                }
            }
            _ => Err(Error::invalid("ray segment projection needs a tree point")),
        },
    }
}

fn project_segment(space: &Space, x: &Point, a: &Point, b: &Point, tol: f64) -> Result<Point> {
    let len = space.dist_unchecked(a, b);
    if len == 0.0 {
        return Ok(a.clone());
    }
    match space {
        Space::Euclidean { .. } => {
            let (xa, aa, ba) = (x.as_coords()?, a.as_coords()?, b.as_coords()?);
            let mut num = 0.0;
            let mut den = 0.0;
            for i in 0..aa.len() {
                let dir = ba[i] - aa[i];
                num += (xa[i] - aa[i]) * dir;
                den += dir * dir;
            }
            let t = (num / den).clamp(0.0, 1.0);
            Ok(space.combine_unchecked(a, b, t))
        }
        Space::Hyperbolic2 => {
            // Minkowski-project onto the plane spanned by the segment, then
            // clamp the geodesic parameter to the segment.
            let (xh, ah, bh) = (x.as_hyperboloid()?, a.as_hyperboloid()?, b.as_hyperboloid()?);
            let sh = len.sinh();
            let cm1 = 2.0 * (0.5 * len).sinh().powi(2);
            let w = [
                ((bh[0] - ah[0]) - cm1 * ah[0]) / sh,
                ((bh[1] - ah[1]) - cm1 * ah[1]) / sh,
                ((bh[2] - ah[2]) - cm1 * ah[2]) / sh,
            ];
            let alpha = -minkowski_dot(xh, ah);
            let beta = minkowski_dot(xh, &w);
            let t_geo = if alpha.abs() > 0.0 { (beta / alpha).atanh() } else { 0.0 };
            let t = if t_geo.is_finite() { t_geo.clamp(0.0, len) } else { len };
            let (ct, st) = (t.cosh(), t.sinh());
            let mut p = [
                ct * ah[0] + st * w[0],
                ct * ah[1] + st * w[1],
                ct * ah[2] + st * w[2],
            ];
            crate::spaces::renormalize_hyperboloid(&mut p);
            Ok(Point::Hyperboloid(p))
        }
        _ => {
            // Golden-section over the geodesic parameter.
            let f = |t: f64| space.dist_unchecked(x, &space.combine_unchecked(a, b, t));
            let t = golden_min(f, 0.0, 1.0, (tol / len).max(1e-14));
            Ok(space.combine_unchecked(a, b, t))
        }
    }
}

/// Golden-section minimizer of a unimodal function on [a, b].
fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..300 {
        if b - a <= tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

#[derive(Clone, Debug)]
pub struct AsymptoticCenterResult {
    pub center: Point,
    /// Functional value at the center (tail-window asymptotic radius).
    pub radius: f64,
    /// Objective evaluations spent by the search.
    pub evals: usize,
    /// Radius of the ball around the center that must contain every probe
    /// whose functional value is within `tol` of optimal, obtained by
    /// inverting the supplied modulus. `None` without a modulus.
    pub uniqueness_radius: Option<f64>,
}

/// Probe moves of length `h` from `z`, before projection onto the constraint
/// set.
fn probe_moves(space: &Space, z: &Point, h: f64) -> Vec<Point> {
    match (space, z) {
        (Space::Euclidean { dim } | Space::Lp { dim, .. }, Point::Vector(c)) => {
            let mut out = Vec::with_capacity(2 * dim);
            for i in 0..*dim {
                for sgn in [1.0, -1.0] {
                    let mut q = c.clone();
                    q[i] += sgn * h;
                    out.push(Point::Vector(q));
                }
            }
            out
        }
        (Space::Hyperbolic2, Point::Hyperboloid(c)) => (0..4)
            .map(|k| hyperbolic_exp(c, k as f64 * std::f64::consts::FRAC_PI_2, h))
            .collect(),
        (Space::RTree { rays }, &Point::Tree { ray, radius }) => {
            let mut out = vec![Point::tree(ray, radius + h)];
            if h <= radius {
                out.push(Point::tree(ray, radius - h));
            } else {
                for j in 0..*rays {
                    if j != ray {
                        out.push(Point::tree(j, h - radius));
                    }
                }
                out.push(Point::tree(0, 0.0));
            }
            out
        }
        _ => Vec::new(),
    }
}

/// Minimize the tail-window asymptotic radius over a closed convex set by
/// projected coordinate geodesic search with shrinking steps.
///
/// The returned functional value is within `tol` of the best probed
/// refinement; positional accuracy follows from convexity of the functional.
/// A modulus of uniform convexity, when supplied, is inverted to report the
/// uniqueness ball radius implied by a `tol`-optimal probe.
pub fn asymptotic_center(
    space: &Space,
    seq: &BoundedSequence,
    set: &ConvexSet,
    tol: f64,
    modulus: Option<&Modulus>,
) -> Result<AsymptoticCenterResult> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let tail = seq.tail();
    for p in tail {
        space.validate_point(p)?;
    }
    let mut z = chebyshev_projection(space, &tail[0], set, 1e-12)?;
    let mut fz = radius_unchecked(space, &z, tail);
    let mut evals = 1usize;

    // Initial step spans the sequence spread.
    let spread = tail
        .iter()
        .map(|p| space.dist_unchecked(&z, p))
        .fold(0.0, f64::max);
    let mut h = spread.max(tol);
    let h_min = (tol * 1e-3).max(1e-12);
    const BUDGET: usize = 400_000;

    while h > h_min {
        let mut improved = false;
        for cand in probe_moves(space, &z, h) {
            let cand = chebyshev_projection(space, &cand, set, 1e-12)?;
            let fc = radius_unchecked(space, &cand, tail);
            evals += 1;
            if fc < fz {
                z = cand;
                fz = fc;
                improved = true;
            }
        }
        if !improved {
            h *= 0.5;
        }
        if evals > BUDGET {
            return Err(Error::Numeric(format!(
                "asymptotic center search exhausted its budget at step {h:.3e} \
                 (functional value {fz:.6e})"
            )));
        }
    }

    let uniqueness_radius = match modulus {
        None => None,
        Some(m) => {
            let scale = fz + tol;
            invert_eps(m, scale.max(1e-9), tol / scale.max(1e-9))?.map(|e| e * scale)
        }
    };

    Ok(AsymptoticCenterResult { center: z, radius: fz, evals, uniqueness_radius })
}

/// Membership in the approximate fixed-point set: `d(y, x) <= b` and
/// `d(y, Ty) < eps`, both compared exactly as written.
pub fn approx_fixed_set_member(
    space: &Space,
    map: &NonexpansiveMap,
    x: &Point,
    b: f64,
    eps: f64,
    y: &Point,
) -> Result<bool> {
    if !(eps > 0.0 && b > 0.0) {
        return Err(Error::invalid("approximate fixed-point set needs eps > 0 and b > 0"));
    }
    let near = space.dist(y, x)? <= b;
    let ty = map.apply(space, y)?;
    Ok(near && space.dist(y, &ty)? < eps)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeVerdict {
    /// Orbits bounded and approximate fixed points witnessed at every
    /// requested accuracy: behaviour of a map with fixed points.
    FixedPointLikely,
    /// All indicators negative: no fixed point within the probed window.
    NoFixedPointDetected,
    /// Indicators disagree; horizon or cap too small to classify.
    Inconsistent,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct ProbeReport {
    pub picard_bounded: bool,
    pub km_bounded: bool,
    /// Largest excursion from the start point along each orbit.
    pub picard_excursion: f64,
    pub km_excursion: f64,
    /// Minimum observed diagnostic `d(x_n, T x_n)` along each orbit.
    pub picard_min_diag: f64,
    pub km_min_diag: f64,
    /// Per requested accuracy: was a member of the approximate fixed-point
    /// set witnessed along the averaged orbit?
    pub fix_eps_witnessed: Vec<(f64, bool)>,
    pub verdict: ProbeVerdict,
}

/// Run Picard and averaged (lambda = 1/2) orbits from `x0` and report the
/// boundedness indicators that characterize maps with fixed points. This is
/// a diagnostic, not a decision procedure: unboundedness is witnessed only
/// up to `radius_cap` within `horizon` steps.
pub fn fixed_point_probe(
    space: &Space,
    map: &NonexpansiveMap,
    x0: &Point,
    horizon: usize,
    radius_cap: f64,
    eps_ladder: &[f64],
) -> Result<ProbeReport> {
    if horizon == 0 {
        return Err(Error::invalid("probe horizon must be >= 1"));
    }
    if !(radius_cap > 0.0) {
        return Err(Error::invalid("radius cap must be positive"));
    }
    let picard = picard_orbit(space, map, x0, horizon)?;
    let sched = ScalarSchedule::km(LambdaSeq::Const(0.5))?;
    let km = km_orbit(space, map, &sched, x0, horizon)?;

    let picard_excursion = picard.max_dist_from(space, x0);
    let km_excursion = km.max_dist_from(space, x0);
    let picard_bounded = picard_excursion <= radius_cap;
    let km_bounded = km_excursion <= radius_cap;

    let mut fix_eps_witnessed = Vec::with_capacity(eps_ladder.len());
    for &eps in eps_ladder {
        let mut witnessed = false;
        for (y, &diag) in km.points.iter().zip(km.d_x_tx.iter()) {
            if diag < eps && space.dist_unchecked(y, x0) <= radius_cap {
                witnessed = true;
                break;
            }
        }
        fix_eps_witnessed.push((eps, witnessed));
    }

    let afp_all = fix_eps_witnessed.iter().all(|(_, w)| *w);
    let indicators = [picard_bounded, km_bounded, afp_all];
    let verdict = if indicators.iter().all(|&b| b) {
        ProbeVerdict::FixedPointLikely
    } else if indicators.iter().all(|&b| !b) {
        ProbeVerdict::NoFixedPointDetected
    } else {
        ProbeVerdict::Inconsistent
    };

    Ok(ProbeReport {
        picard_bounded,
        km_bounded,
        picard_excursion,
        km_excursion,
        picard_min_diag: picard.min_diag(),
        km_min_diag: km.min_diag(),
        fix_eps_witnessed,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mappings::{identity, rotation_map, translation_map};
    use crate::modulus::cat0_modulus;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn e2() -> Space {
        Space::euclidean(2).unwrap()
    }

    fn v(x: f64, y: f64) -> Point {
        Point::vector(vec![x, y])
    }

    fn alternating() -> BoundedSequence {
        let pts = (0..10)
            .map(|i| if i % 2 == 0 { v(-1.0, 0.0) } else { v(1.0, 0.0) })
            .collect();
        BoundedSequence::new(pts, 0).unwrap()
    }

    #[test]
    fn radius_at_probe_points() {
        let s = e2();
        let constant = BoundedSequence::new(vec![v(0.3, 0.4); 6], 2).unwrap();
        assert_eq!(asymptotic_radius_at(&s, &v(0.3, 0.4), &constant).unwrap(), 0.0);

        let seq = alternating();
        assert_eq!(asymptotic_radius_at(&s, &v(0.0, 0.0), &seq).unwrap(), 1.0);
        let r = asymptotic_radius_at(&s, &v(0.0, 1.0), &seq).unwrap();
        assert!((r - 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn radius_is_one_lipschitz_and_convex() {
        let s = e2();
        let seq = alternating();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..300 {
            let y = s.sample_point(&mut rng, 3.0);
            let z = s.sample_point(&mut rng, 3.0);
            let ry = asymptotic_radius_at(&s, &y, &seq).unwrap();
            let rz = asymptotic_radius_at(&s, &z, &seq).unwrap();
            let d = s.dist(&y, &z).unwrap();
            assert!((ry - rz).abs() <= d + 1e-9);
            let lam = rng.gen_range(0.0..=1.0);
            let mid = s.combine(&y, &z, lam).unwrap();
            let rm = asymptotic_radius_at(&s, &mid, &seq).unwrap();
            assert!(rm <= (1.0 - lam) * ry + lam * rz + 1e-9);
        }
    }

    #[test]
    fn center_of_constant_sequence_is_the_point() {
        let s = e2();
        let seq = BoundedSequence::new(vec![v(0.25, -0.75); 8], 0).unwrap();
        let res = asymptotic_center(&s, &seq, &ConvexSet::Whole, 1e-9, None).unwrap();
        assert!(s.dist(&res.center, &v(0.25, -0.75)).unwrap() < 1e-6);
        assert!(res.radius < 1e-6);
    }

    #[test]
    fn center_of_alternating_pair_is_midpoint() {
        let s = e2();
        let res =
            asymptotic_center(&s, &alternating(), &ConvexSet::Whole, 1e-9, Some(&cat0_modulus()))
                .unwrap();
        assert!(s.dist(&res.center, &v(0.0, 0.0)).unwrap() < 1e-6, "center {:?}", res.center);
        assert!((res.radius - 1.0).abs() < 1e-6);
        assert!(res.uniqueness_radius.is_some());
    }

    #[test]
    fn center_respects_halfplane_constraint() {
        let s = e2();
        let halfplane = ConvexSet::Halfspace { normal: vec![-1.0, 0.0], offset: -0.5 };
        let res = asymptotic_center(&s, &alternating(), &halfplane, 1e-9, None).unwrap();
        assert!(s.dist(&res.center, &v(0.5, 0.0)).unwrap() < 1e-6, "center {:?}", res.center);
        assert!((res.radius - 1.5).abs() < 1e-6);
    }

    #[test]
    fn center_works_on_the_tree() {
        let tree = Space::rtree(4).unwrap();
        // Points on two rays at radius 1; the origin is the balance point.
        let pts = vec![
            Point::tree(0, 1.0),
            Point::tree(1, 1.0),
            Point::tree(0, 1.0),
            Point::tree(1, 1.0),
        ];
        let seq = BoundedSequence::new(pts, 0).unwrap();
        let res = asymptotic_center(&tree, &seq, &ConvexSet::Whole, 1e-9, None).unwrap();
        assert!(tree.dist(&res.center, &Point::tree(0, 0.0)).unwrap() < 1e-6);
        assert!((res.radius - 1.0).abs() < 1e-6);
    }

    #[test]
    fn projection_closed_forms() {
        let s = e2();
        let ball = ConvexSet::ball(v(0.0, 0.0), 1.0).unwrap();
        let inside = v(0.25, 0.25);
        assert_eq!(chebyshev_projection(&s, &inside, &ball, 1e-12).unwrap(), inside);
        let p = chebyshev_projection(&s, &v(2.0, 0.0), &ball, 1e-12).unwrap();
        assert!(s.dist(&p, &v(1.0, 0.0)).unwrap() < 1e-12);

        let half = ConvexSet::Halfspace { normal: vec![0.0, 1.0], offset: 0.0 };
        let p = chebyshev_projection(&s, &v(3.0, 2.0), &half, 1e-12).unwrap();
        assert!(s.dist(&p, &v(3.0, 0.0)).unwrap() < 1e-12);
    }

    #[test]
    fn hyperbolic_segment_projection_matches_grid_oracle() {
        let s = Space::hyperbolic2();
        let a = Space::hyperbolic_point(-0.5, 0.0);
        let b = Space::hyperbolic_point(0.5, 0.0);
        let seg = ConvexSet::Segment { a: a.clone(), b: b.clone() };
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..25 {
            let x = s.sample_point(&mut rng, 1.5);
            let p = chebyshev_projection(&s, &x, &seg, 1e-12).unwrap();
            // Dense 1-D scan as the independent oracle.
            let mut best = f64::INFINITY;
            let mut best_t = 0.0;
            for k in 0..=4000 {
                let t = k as f64 / 4000.0;
                let d = s.dist_unchecked(&x, &s.combine_unchecked(&a, &b, t));
                if d < best {
                    best = d;
                    best_t = t;
                }
            }
            let oracle = s.combine_unchecked(&a, &b, best_t);
            assert!(
                s.dist(&p, &oracle).unwrap() < 1e-3,
                "projection disagrees with scan"
            );
            let dp = s.dist(&x, &p).unwrap();
            assert!(dp <= best + 1e-6, "projection not nearest: {dp} vs {best}");
        }
    }

    #[test]
    fn segment_projection_is_direction_independent() {
        // Two independent routes to the minimizer agree (uniqueness check).
        let tree = Space::rtree(5).unwrap();
        let a = Point::tree(0, 0.2);
        let b = Point::tree(1, 0.9);
        let fwd = ConvexSet::Segment { a: a.clone(), b: b.clone() };
        let rev = ConvexSet::Segment { a: b, b: a };
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..25 {
            let x = tree.sample_point(&mut rng, 2.0);
            let p = chebyshev_projection(&tree, &x, &fwd, 1e-12).unwrap();
            let q = chebyshev_projection(&tree, &x, &rev, 1e-12).unwrap();
            assert!(tree.dist(&p, &q).unwrap() < 1e-6);
        }
    }

    #[test]
    fn approx_fixed_set_membership() {
        let s = e2();
        let rot = rotation_map(&s, v(0.0, 0.0), 1.0).unwrap();
        // A true fixed point qualifies for every eps.
        for eps in [1.0, 1e-3, 1e-9] {
            assert!(approx_fixed_set_member(&s, &rot, &v(0.5, 0.5), 2.0, eps, &v(0.0, 0.0))
                .unwrap());
        }
        // Too far from the anchor: excluded regardless of the diagnostic.
        assert!(!approx_fixed_set_member(&s, &rot, &v(5.0, 5.0), 1.0, 1.0, &v(0.0, 0.0)).unwrap());
        // Identity admits every point within the radius.
        let id = identity(ConvexSet::Whole);
        assert!(approx_fixed_set_member(&s, &id, &v(0.0, 0.0), 1.0, 1e-12, &v(0.5, 0.0)).unwrap());
    }

    #[test]
    fn probe_classifies_rotation_and_identity() {
        let s = e2();
        let rot = rotation_map(&s, v(0.2, 0.1), std::f64::consts::FRAC_PI_2).unwrap();
        let report =
            fixed_point_probe(&s, &rot, &v(1.0, 0.0), 2000, 25.0, &[1.0, 0.1, 0.01]).unwrap();
        assert_eq!(report.verdict, ProbeVerdict::FixedPointLikely);
        assert!(report.km_min_diag < 0.01);

        let id = identity(ConvexSet::Whole);
        let report = fixed_point_probe(&s, &id, &v(0.3, 0.4), 50, 5.0, &[0.5]).unwrap();
        assert_eq!(report.verdict, ProbeVerdict::FixedPointLikely);
        assert_eq!(report.picard_min_diag, 0.0);
    }

    #[test]
    fn probe_detects_fixed_point_free_translation() {
        let line = Space::euclidean(1).unwrap();
        let shift = translation_map(&line, vec![1.0]).unwrap();
        let report = fixed_point_probe(
            &line,
            &shift,
            &Point::vector(vec![0.0]),
            400,
            50.0,
            &[1.0, 0.1],
        )
        .unwrap();
        assert_eq!(report.verdict, ProbeVerdict::NoFixedPointDetected);
        assert!(!report.picard_bounded);
        assert!(report.picard_excursion > 50.0);
    }
}
