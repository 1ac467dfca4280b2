//! Geodesic spaces: a metric `dist` together with a convexity mapping
//! `combine` writing the point (1-lambda)x (+) lambda y on the geodesic
//! from x to y.
//!
//! Four concrete spaces are provided:
//!
//! - `Euclidean { dim }`: R^n with the Euclidean norm, affine combination.
//! - `Lp { p, dim }`: R^n with the l_p norm for p >= 2, affine combination.
//! - `Hyperbolic2`: the hyperbolic plane in the hyperboloid (Minkowski)
//!   model; points are 3-vectors with <x,x>_M = -1 and positive time
//!   coordinate, geodesics run along cosh/sinh flows and are renormalized
//!   onto the sheet after every combination.
//! - `RTree { rays }`: a star tree; a point is (ray index, radial
//!   coordinate >= 0), geodesics between distinct rays pass through the
//!   shared origin. All representations (i, 0) denote the same origin and
//!   are canonicalized to ray 0.

use rand::Rng;
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Absolute/relative tolerance used by the geometric predicates.
pub const GEOM_TOL: f64 = 1e-9;

pub type Coords = SmallVec<[f64; 4]>;

#[derive(Clone, Debug, PartialEq)]
pub enum Point {
    /// Coordinate vector for `Euclidean` and `Lp`.
    Vector(Coords),
    /// Point on the upper hyperboloid sheet, `(x1, x2, t)` with
    /// `x1^2 + x2^2 - t^2 = -1`, `t > 0`.
    Hyperboloid([f64; 3]),
    /// Point of the star tree: ray index plus radial coordinate.
    Tree { ray: u32, radius: f64 },
}

impl Point {
    pub fn vector(coords: impl Into<Coords>) -> Self {
        Point::Vector(coords.into())
    }

    /// Star-tree point; a zero radius is canonicalized to ray 0 so that all
    /// origin representations compare equal structurally.
    pub fn tree(ray: u32, radius: f64) -> Self {
        if radius == 0.0 {
            Point::Tree { ray: 0, radius: 0.0 }
        } else {
            Point::Tree { ray, radius }
        }
    }

    pub fn as_coords(&self) -> Result<&[f64]> {
        match self {
            Point::Vector(c) => Ok(c),
            _ => Err(Error::invalid("expected a coordinate-vector point")),
        }
    }

    pub fn as_hyperboloid(&self) -> Result<&[f64; 3]> {
        match self {
            Point::Hyperboloid(h) => Ok(h),
            _ => Err(Error::invalid("expected a hyperboloid point")),
        }
    }
}

/// Minkowski bilinear form with signature (+, +, -).
pub fn minkowski_dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] - a[2] * b[2]
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Space {
    Euclidean { dim: usize },
    Lp { p: f64, dim: usize },
    Hyperbolic2,
    RTree { rays: u32 },
}

impl Space {
    pub fn euclidean(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("euclidean dimension must be >= 1"));
        }
        Ok(Space::Euclidean { dim })
    }

    pub fn lp(p: f64, dim: usize) -> Result<Self> {
        if !(p >= 2.0) || !p.is_finite() {
            return Err(Error::Unsupported(format!(
                "l_p space requires finite p >= 2, got {p}"
            )));
        }
        if dim == 0 {
            return Err(Error::invalid("l_p dimension must be >= 1"));
        }
        Ok(Space::Lp { p, dim })
    }

    pub fn hyperbolic2() -> Self {
        Space::Hyperbolic2
    }

    pub fn rtree(rays: u32) -> Result<Self> {
        if rays < 2 {
            return Err(Error::invalid("star tree needs at least 2 rays"));
        }
        Ok(Space::RTree { rays })
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Space::Euclidean { .. } => "euclidean",
            Space::Lp { .. } => "lp",
            Space::Hyperbolic2 => "hyperbolic2",
            Space::RTree { .. } => "rtree",
        }
    }

    /// Lift planar coordinates onto the hyperboloid sheet.
    pub fn hyperbolic_point(x1: f64, x2: f64) -> Point {
        let t = (1.0 + x1 * x1 + x2 * x2).sqrt();
        Point::Hyperboloid([x1, x2, t])
    }

    /// Check that `x` is a structurally valid point of this space.
    pub fn validate_point(&self, x: &Point) -> Result<()> {
        match (self, x) {
            (Space::Euclidean { dim } | Space::Lp { dim, .. }, Point::Vector(c)) => {
                if c.len() != *dim {
                    return Err(Error::invalid(format!(
                        "point has {} coordinates, space has dimension {dim}",
                        c.len()
                    )));
                }
                if c.iter().any(|v| !v.is_finite()) {
                    return Err(Error::invalid("point has non-finite coordinates"));
                }
                Ok(())
            }
            (Space::Hyperbolic2, Point::Hyperboloid(h)) => {
                if h.iter().any(|v| !v.is_finite()) {
                    return Err(Error::invalid("point has non-finite coordinates"));
                }
                let q = minkowski_dot(h, h);
                if (q + 1.0).abs() > GEOM_TOL * h[2].max(1.0) || h[2] <= 0.0 {
                    return Err(Error::invalid(format!(
                        "point off the hyperboloid sheet: <x,x> = {q:.3e}"
                    )));
                }
                Ok(())
            }
            (Space::RTree { rays }, Point::Tree { ray, radius }) => {
                if *radius < 0.0 || !radius.is_finite() {
                    return Err(Error::invalid("tree radius must be finite and >= 0"));
                }
                if *radius > 0.0 && ray >= rays {
                    return Err(Error::invalid(format!(
                        "ray index {ray} out of range (tree has {rays} rays)"
                    )));
                }
                Ok(())
            }
            _ => Err(Error::invalid(format!(
                "point representation does not match space `{}`",
                self.kind_name()
            ))),
        }
    }

    /// Metric of the space.
    pub fn dist(&self, x: &Point, y: &Point) -> Result<f64> {
        self.validate_point(x)?;
        self.validate_point(y)?;
        Ok(self.dist_unchecked(x, y))
    }

    /// Metric without point validation; orbit loops use this after validating
    /// their inputs once.
    pub fn dist_unchecked(&self, x: &Point, y: &Point) -> f64 {
        match (self, x, y) {
            (Space::Euclidean { .. }, Point::Vector(a), Point::Vector(b)) => {
                let mut s = 0.0;
                for (u, v) in a.iter().zip(b.iter()) {
                    let d = u - v;
                    s += d * d;
                }
                s.sqrt()
            }
            (Space::Lp { p, .. }, Point::Vector(a), Point::Vector(b)) => {
                lp_norm(*p, a.iter().zip(b.iter()).map(|(u, v)| u - v))
            }
            (Space::Hyperbolic2, Point::Hyperboloid(a), Point::Hyperboloid(b)) => {
                // 2*asinh(|x-y|_M / 2) avoids the cancellation that
                // acosh(-<x,y>_M) suffers for nearby points.
                let v = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
                let q = minkowski_dot(&v, &v).max(0.0);
                2.0 * (0.5 * q.sqrt()).asinh()
            }
            (Space::RTree { .. }, &Point::Tree { ray: ri, radius: a }, &Point::Tree { ray: rj, radius: b }) => {
                if ri == rj || a == 0.0 || b == 0.0 {
                    (a - b).abs()
                } else {
                    a + b
                }
            }
            _ => f64::NAN,
        }
    }

    /// The convexity mapping: the point at parameter `lambda` on the geodesic
    /// from `x` to `y`. Exact at the endpoints and for coincident inputs.
    pub fn combine(&self, x: &Point, y: &Point, lambda: f64) -> Result<Point> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::invalid(format!("lambda = {lambda} outside [0, 1]")));
        }
        self.validate_point(x)?;
        self.validate_point(y)?;
        Ok(self.combine_unchecked(x, y, lambda))
    }

    pub fn combine_unchecked(&self, x: &Point, y: &Point, lambda: f64) -> Point {
        if lambda == 0.0 {
            return x.clone();
        }
        if lambda == 1.0 {
            return y.clone();
        }
        match (self, x, y) {
            (Space::Euclidean { .. } | Space::Lp { .. }, Point::Vector(a), Point::Vector(b)) => {
                if a == b {
                    return x.clone();
                }
                let c: Coords = a
                    .iter()
                    .zip(b.iter())
                    .map(|(u, v)| (1.0 - lambda) * u + lambda * v)
                    .collect();
                Point::Vector(c)
            }
            (Space::Hyperbolic2, Point::Hyperboloid(a), Point::Hyperboloid(b)) => {
                let d = self.dist_unchecked(x, y);
                if d == 0.0 {
                    return x.clone();
                }
                // Unit tangent at a toward b: (y - cosh(d) x)/sinh(d),
                // evaluated as ((y - x) - (cosh(d)-1) x)/sinh(d).
                let sh = d.sinh();
                let cm1 = 2.0 * (0.5 * d).sinh().powi(2);
                let u = [
                    ((b[0] - a[0]) - cm1 * a[0]) / sh,
                    ((b[1] - a[1]) - cm1 * a[1]) / sh,
                    ((b[2] - a[2]) - cm1 * a[2]) / sh,
                ];
                let t = lambda * d;
                let (ct, st) = (t.cosh(), t.sinh());
                let mut p = [
                    ct * a[0] + st * u[0],
                    ct * a[1] + st * u[1],
                    ct * a[2] + st * u[2],
                ];
                renormalize_hyperboloid(&mut p);
                Point::Hyperboloid(p)
            }
            (Space::RTree { .. }, &Point::Tree { ray: ri, radius: a }, &Point::Tree { ray: rj, radius: b }) => {
                if ri == rj || a == 0.0 || b == 0.0 {
                    // Single geodesic ray (possibly through the origin when
                    // one endpoint is the origin): 1-D affine interpolation.
                    let target_ray = if a == 0.0 && b > 0.0 { rj } else { ri };
                    let r = (1.0 - lambda) * a + lambda * b;
                    Point::tree(target_ray, r.max(0.0))
                } else {
                    // Walk the through-origin path by arclength.
                    let t = lambda * (a + b);
                    if t <= a {
                        Point::tree(ri, a - t)
                    } else {
                        Point::tree(rj, t - a)
                    }
                }
            }
            _ => x.clone(),
        }
    }

    /// `k` evenly spaced points of the geodesic segment `[x, y]`.
    pub fn geodesic_sample(&self, x: &Point, y: &Point, k: usize) -> Result<Vec<Point>> {
        if k < 2 {
            return Err(Error::invalid("geodesic sample needs k >= 2 points"));
        }
        self.validate_point(x)?;
        self.validate_point(y)?;
        let denom = (k - 1) as f64;
        Ok((0..k)
            .map(|i| self.combine_unchecked(x, y, i as f64 / denom))
            .collect())
    }

    /// Semantic point equality: distance below `tol`.
    pub fn points_eq(&self, x: &Point, y: &Point, tol: f64) -> Result<bool> {
        Ok(self.dist(x, y)? <= tol)
    }

    /// A reference point of the space (origin / apex).
    pub fn origin(&self) -> Point {
        match self {
            Space::Euclidean { dim } | Space::Lp { dim, .. } => {
                Point::Vector(std::iter::repeat(0.0).take(*dim).collect())
            }
            Space::Hyperbolic2 => Point::Hyperboloid([0.0, 0.0, 1.0]),
            Space::RTree { .. } => Point::tree(0, 0.0),
        }
    }

    /// Random point within distance roughly `scale` of the origin.
    pub fn sample_point<R: Rng>(&self, rng: &mut R, scale: f64) -> Point {
        match self {
            Space::Euclidean { dim } | Space::Lp { dim, .. } => Point::Vector(
                (0..*dim)
                    .map(|_| rng.gen_range(-scale..=scale))
                    .collect(),
            ),
            Space::Hyperbolic2 => {
                let apex = self.origin();
                let phi = rng.gen_range(0.0..std::f64::consts::TAU);
                let t = rng.gen_range(0.0..=scale);
                hyperbolic_exp(apex.as_hyperboloid().unwrap(), phi, t)
            }
            Space::RTree { rays } => {
                let ray = rng.gen_range(0..*rays);
                Point::tree(ray, rng.gen_range(0.0..=scale))
            }
        }
    }

    /// Random point at distance at most `r` from `center` (exact membership,
    /// not necessarily uniform).
    pub fn sample_in_ball<R: Rng>(&self, center: &Point, r: f64, rng: &mut R) -> Result<Point> {
        self.validate_point(center)?;
        if r < 0.0 {
            return Err(Error::invalid("ball radius must be >= 0"));
        }
        match (self, center) {
            (Space::Euclidean { dim } | Space::Lp { dim, .. }, Point::Vector(c)) => {
                let p = if let Space::Lp { p, .. } = self { *p } else { 2.0 };
                // Rejection from the cube; acceptance is fine for the small
                // dimensions used here.
                loop {
                    let z: Coords = (0..*dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
                    if lp_norm(p, z.iter().copied()) <= 1.0 {
                        let q: Coords =
                            c.iter().zip(z.iter()).map(|(ci, zi)| ci + r * zi).collect();
                        return Ok(Point::Vector(q));
                    }
                }
            }
            (Space::Hyperbolic2, Point::Hyperboloid(c)) => {
                let phi = rng.gen_range(0.0..std::f64::consts::TAU);
                let t = r * rng.gen_range(0.0..=1.0);
                Ok(hyperbolic_exp(c, phi, t))
            }
            (Space::RTree { rays }, &Point::Tree { ray, radius }) => {
                loop {
                    let j = rng.gen_range(0..*rays);
                    if j == ray {
                        let lo = (radius - r).max(0.0);
                        let hi = radius + r;
                        return Ok(Point::tree(ray, rng.gen_range(lo..=hi)));
                    }
                    if r > radius {
                        // Cross-ray points exist only beyond the origin.
                        let s = rng.gen_range(0.0..=(r - radius));
                        return Ok(Point::tree(j, s));
                    }
                }
            }
            _ => Err(Error::invalid("point representation does not match space")),
        }
    }
}

/// Sum-based l_p norm with fast paths for the common exponents.
fn lp_norm(p: f64, diffs: impl Iterator<Item = f64>) -> f64 {
    if p == 2.0 {
        diffs.map(|d| d * d).sum::<f64>().sqrt()
    } else if p == 3.0 {
        diffs.map(|d| d.abs().powi(3)).sum::<f64>().cbrt()
    } else if p == 4.0 {
        diffs.map(|d| d * d * d * d).sum::<f64>().sqrt().sqrt()
    } else {
        diffs.map(|d| d.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// Project a near-sheet vector back onto the hyperboloid. Radial rescaling
/// does not move the represented point, so this only suppresses drift.
pub(crate) fn renormalize_hyperboloid(p: &mut [f64; 3]) {
    let q = -minkowski_dot(p, p);
    if q > 0.0 {
        let s = q.sqrt();
        p[0] /= s;
        p[1] /= s;
        p[2] /= s;
    }
    if p[2] < 0.0 {
        p[0] = -p[0];
        p[1] = -p[1];
        p[2] = -p[2];
    }
}

/// Orthonormal tangent basis at a hyperboloid point.
pub fn hyperbolic_tangent_basis(c: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
    let e1 = [1.0, 0.0, 0.0];
    let a = minkowski_dot(&e1, c);
    let mut u1 = [e1[0] + a * c[0], e1[1] + a * c[1], e1[2] + a * c[2]];
    let n1 = minkowski_dot(&u1, &u1).sqrt();
    u1 = [u1[0] / n1, u1[1] / n1, u1[2] / n1];

    let e2 = [0.0, 1.0, 0.0];
    let b = minkowski_dot(&e2, c);
    let mut w = [e2[0] + b * c[0], e2[1] + b * c[1], e2[2] + b * c[2]];
    let proj = minkowski_dot(&w, &u1);
    w = [w[0] - proj * u1[0], w[1] - proj * u1[1], w[2] - proj * u1[2]];
    let n2 = minkowski_dot(&w, &w).sqrt();
    ([u1[0], u1[1], u1[2]], [w[0] / n2, w[1] / n2, w[2] / n2])
}

/// Geodesic flow from `c` in tangent direction `phi` for arclength `t`.
pub fn hyperbolic_exp(c: &[f64; 3], phi: f64, t: f64) -> Point {
    let (u1, u2) = hyperbolic_tangent_basis(c);
    let (cp, sp) = (phi.cos(), phi.sin());
    let u = [
        cp * u1[0] + sp * u2[0],
        cp * u1[1] + sp * u2[1],
        cp * u1[2] + sp * u2[2],
    ];
    let (ct, st) = (t.cosh(), t.sinh());
    let mut p = [
        ct * c[0] + st * u[0],
        ct * c[1] + st * u[1],
        ct * c[2] + st * u[2],
    ];
    renormalize_hyperboloid(&mut p);
    Point::Hyperboloid(p)
}

/// Convex subsets with membership, sampling, and a diameter bound where one
/// exists. Closed balls and geodesic segments are convex in every space here;
/// half-spaces apply to the coordinate-vector spaces.
#[derive(Clone, Debug, PartialEq)]
pub enum ConvexSet {
    Whole,
    Ball { center: Point, radius: f64 },
    /// `{ x : normal . x <= offset }` in a coordinate-vector space.
    Halfspace { normal: Vec<f64>, offset: f64 },
    /// Geodesic segment between two points.
    Segment { a: Point, b: Point },
    /// `{ (ray, t) : lo <= t <= hi }` in the star tree.
    RaySegment { ray: u32, lo: f64, hi: f64 },
}

impl ConvexSet {
    pub fn ball(center: Point, radius: f64) -> Result<Self> {
        if radius < 0.0 || !radius.is_finite() {
            return Err(Error::invalid("ball radius must be finite and >= 0"));
        }
        Ok(ConvexSet::Ball { center, radius })
    }

    pub fn ray_segment(ray: u32, lo: f64, hi: f64) -> Result<Self> {
        if lo < 0.0 || hi < lo {
            return Err(Error::invalid("ray segment needs 0 <= lo <= hi"));
        }
        Ok(ConvexSet::RaySegment { ray, lo, hi })
    }

    /// Membership with a tolerance band at the boundary (boundary points are
    /// members).
    pub fn contains(&self, space: &Space, x: &Point, tol: f64) -> Result<bool> {
        space.validate_point(x)?;
        self.contains_unchecked(space, x, tol)
    }

    /// Membership without point validation, for orbit loops that validate
    /// their inputs once.
    pub fn contains_unchecked(&self, space: &Space, x: &Point, tol: f64) -> Result<bool> {
        match self {
            ConvexSet::Whole => Ok(true),
            ConvexSet::Ball { center, radius } => {
                Ok(space.dist_unchecked(center, x) <= radius + tol)
            }
            ConvexSet::Halfspace { normal, offset } => {
                let c = x.as_coords()?;
                if c.len() != normal.len() {
                    return Err(Error::invalid("half-space normal dimension mismatch"));
                }
                let dot: f64 = normal.iter().zip(c.iter()).map(|(n, v)| n * v).sum();
                Ok(dot <= offset + tol)
            }
            ConvexSet::Segment { .. } => {
                let p = crate::analysis::chebyshev_projection(space, x, self, tol.min(1e-10))?;
                Ok(space.dist_unchecked(x, &p) <= tol)
            }
            ConvexSet::RaySegment { ray, lo, hi } => match *x {
                Point::Tree { ray: r, radius } => {
                    if r == *ray || radius == 0.0 {
                        Ok(radius >= lo - tol && radius <= hi + tol)
                    } else {
                        // Nearest member is (ray, lo) through the origin.
                        Ok(radius + lo <= tol)
                    }
                }
                _ => Err(Error::invalid("ray segment membership needs a tree point")),
            },
        }
    }

    /// Draw a member of the set. `scale` bounds the sampling envelope for
    /// unbounded sets.
    pub fn sample<R: Rng>(&self, space: &Space, scale: f64, rng: &mut R) -> Result<Point> {
        match self {
            ConvexSet::Whole => Ok(space.sample_point(rng, scale)),
            ConvexSet::Ball { center, radius } => space.sample_in_ball(center, *radius, rng),
            ConvexSet::Halfspace { normal, offset } => {
                let dim = normal.len();
                loop {
                    let p = space.sample_point(rng, scale);
                    let c = p.as_coords()?;
                    if c.len() != dim {
                        return Err(Error::invalid("half-space normal dimension mismatch"));
                    }
                    let dot: f64 = normal.iter().zip(c.iter()).map(|(n, v)| n * v).sum();
                    if dot <= *offset {
                        return Ok(p);
                    }
                }
            }
            ConvexSet::Segment { a, b } => {
                let t: f64 = rng.gen_range(0.0..=1.0);
                space.combine(a, b, t)
            }
            ConvexSet::RaySegment { ray, lo, hi } => {
                Ok(Point::tree(*ray, rng.gen_range(*lo..=*hi)))
            }
        }
    }

    /// An upper bound on the diameter, when the set is bounded.
    pub fn diameter(&self, space: &Space) -> Option<f64> {
        match self {
            ConvexSet::Whole | ConvexSet::Halfspace { .. } => None,
            ConvexSet::Ball { radius, .. } => Some(2.0 * radius),
            ConvexSet::Segment { a, b } => space.dist(a, b).ok(),
            ConvexSet::RaySegment { lo, hi, .. } => Some(hi - lo),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0f64).max(a.abs()).max(b.abs())
    }

    #[test]
    fn euclidean_distance_pythagoras() {
        let s = Space::euclidean(2).unwrap();
        let d = s
            .dist(&Point::vector(vec![0.0, 0.0]), &Point::vector(vec![3.0, 4.0]))
            .unwrap();
        assert_eq!(d, 5.0);
    }

    #[test]
    fn rtree_distance_through_origin() {
        let s = Space::rtree(5).unwrap();
        let d = s.dist(&Point::tree(1, 2.0), &Point::tree(3, 3.0)).unwrap();
        assert_eq!(d, 5.0);
    }

    #[test]
    fn hyperbolic_distance_matches_arccosh() {
        let s = Space::hyperbolic2();
        let x = Point::Hyperboloid([0.0, 0.0, 1.0]);
        let y = Point::Hyperboloid([1.0f64.sinh(), 0.0, 1.0f64.cosh()]);
        let d = s.dist(&x, &y).unwrap();
        // Independent evaluation: arccosh(-<x,y>_M).
        let expect = (1.0f64.cosh()).acosh();
        assert!(approx(d, expect, 1e-12), "d = {d}");
        assert!(approx(d, 1.0, 1e-12));
    }

    #[test]
    fn dist_rejects_mismatched_points() {
        let s = Space::euclidean(2).unwrap();
        assert!(s.dist(&Point::vector(vec![0.0, 0.0]), &Point::tree(0, 1.0)).is_err());
        assert!(s
            .dist(&Point::vector(vec![0.0]), &Point::vector(vec![0.0, 0.0]))
            .is_err());
    }

    #[test]
    fn combine_midpoint_euclidean() {
        let s = Space::euclidean(2).unwrap();
        let m = s
            .combine(&Point::vector(vec![0.0, 0.0]), &Point::vector(vec![2.0, 0.0]), 0.5)
            .unwrap();
        assert_eq!(m, Point::vector(vec![1.0, 0.0]));
    }

    #[test]
    fn combine_rtree_lands_on_origin() {
        let s = Space::rtree(4).unwrap();
        let m = s.combine(&Point::tree(1, 2.0), &Point::tree(3, 3.0), 0.4).unwrap();
        assert_eq!(m, Point::tree(0, 0.0));
        // 0.4 * 5 = 2 units from (1, 2), i.e. exactly the origin.
        assert_eq!(s.dist(&m, &Point::tree(1, 2.0)).unwrap(), 2.0);
    }

    #[test]
    fn combine_degenerate_returns_x() {
        let s = Space::hyperbolic2();
        let x = Space::hyperbolic_point(0.3, -0.4);
        let m = s.combine(&x, &x, 0.7).unwrap();
        assert_eq!(m, x);
    }

    #[test]
    fn combine_endpoint_exactness() {
        let s = Space::euclidean(2).unwrap();
        let x = Point::vector(vec![0.123, 4.5]);
        let y = Point::vector(vec![-1.0, 2.0]);
        assert_eq!(s.combine(&x, &y, 0.0).unwrap(), x);
        assert_eq!(s.combine(&x, &y, 1.0).unwrap(), y);
        assert!(s.combine(&x, &y, 1.5).is_err());
    }

    #[test]
    fn geodesic_sample_spacing() {
        let s = Space::euclidean(2).unwrap();
        let pts = s
            .geodesic_sample(&Point::vector(vec![0.0, 0.0]), &Point::vector(vec![1.0, 0.0]), 3)
            .unwrap();
        assert_eq!(pts[1], Point::vector(vec![0.5, 0.0]));
        assert!(s.geodesic_sample(&pts[0], &pts[2], 1).is_err());

        let x = Space::hyperbolic_point(0.0, 0.0);
        let h = Space::hyperbolic2();
        let y = hyperbolic_exp(x.as_hyperboloid().unwrap(), 0.3, 2.0);
        let pts = h.geodesic_sample(&x, &y, 5).unwrap();
        for w in pts.windows(2) {
            let gap = h.dist(&w[0], &w[1]).unwrap();
            assert!(approx(gap, 0.5, 1e-9), "gap = {gap}");
        }
    }

    #[test]
    fn geodesic_sample_constant_when_equal() {
        let s = Space::rtree(3).unwrap();
        let x = Point::tree(1, 1.0);
        let pts = s.geodesic_sample(&x, &x, 4).unwrap();
        assert!(pts.iter().all(|p| *p == x));
    }

    #[test]
    fn ball_membership_boundary_band() {
        let s = Space::euclidean(2).unwrap();
        let ball = ConvexSet::ball(Point::vector(vec![0.0, 0.0]), 1.0).unwrap();
        assert!(ball.contains(&s, &Point::vector(vec![0.5, 0.0]), GEOM_TOL).unwrap());
        assert!(ball.contains(&s, &Point::vector(vec![1.0, 0.0]), GEOM_TOL).unwrap());
        assert!(!ball
            .contains(&s, &Point::vector(vec![1.0 + 1e-6, 0.0]), GEOM_TOL)
            .unwrap());
    }

    #[test]
    fn rtree_single_ray_combine_is_affine() {
        let s = Space::rtree(3).unwrap();
        let a = Point::tree(2, 0.5);
        let b = Point::tree(2, 2.5);
        let m = s.combine(&a, &b, 0.25).unwrap();
        assert_eq!(m, Point::tree(2, 1.0));
    }

    #[test]
    fn hyperboloid_constraint_drift_stays_small() {
        let s = Space::hyperbolic2();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut x = Space::hyperbolic_point(0.5, -0.25);
        let anchors: Vec<Point> = (0..8)
            .map(|_| s.sample_point(&mut rng, 3.0))
            .collect();
        for i in 0..1_000_000usize {
            let y = &anchors[i % anchors.len()];
            x = s.combine_unchecked(&x, y, 0.37);
            x = s.combine_unchecked(&x, &anchors[(i + 3) % anchors.len()], 0.11);
        }
        let h = x.as_hyperboloid().unwrap();
        let drift = (minkowski_dot(h, h) + 1.0).abs();
        assert!(drift < 1e-6, "drift = {drift:.3e}");
    }

    #[test]
    fn sample_in_ball_stays_in_ball() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for space in [
            Space::euclidean(3).unwrap(),
            Space::lp(3.0, 3).unwrap(),
            Space::hyperbolic2(),
            Space::rtree(5).unwrap(),
        ] {
            let c = space.sample_point(&mut rng, 1.5);
            for _ in 0..500 {
                let r = rng.gen_range(0.01..4.0);
                let p = space.sample_in_ball(&c, r, &mut rng).unwrap();
                let d = space.dist(&c, &p).unwrap();
                assert!(d <= r + 1e-9, "{}: d = {d}, r = {r}", space.kind_name());
            }
        }
    }

    #[test]
    fn lp_rejects_small_p() {
        assert!(Space::lp(1.5, 2).is_err());
    }
}
