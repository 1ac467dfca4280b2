//! Nonexpansive self-maps of convex subsets.
//!
//! The catalog covers isometries with a known fixed point (rotations),
//! nearest-point projections (fixed-point sets of positive dimension),
//! averaged maps, scalings, compositions, and a fixed-point-free translation
//! used as a counterexample. Nonexpansiveness is a *checked* property, not an
//! enforced one: `check_nonexpansive` samples pairs and reports the worst
//! excess, which is how deliberately expansive test maps are caught.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::spaces::{minkowski_dot, ConvexSet, Coords, Point, Space};

type Mat3 = [[f64; 3]; 3];

fn mat3_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    m
}

fn mat3_apply(m: &Mat3, v: &[f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

#[derive(Clone, Debug)]
enum MapKind {
    Identity,
    PlaneRotation { center: Coords, cos: f64, sin: f64 },
    /// Precomposed Lorentz similarity `B * R(angle) * B^-1` about `center`.
    HyperbolicRotation { matrix: Mat3 },
    Projection { target: ConvexSet },
    Averaged { inner: Box<NonexpansiveMap>, lambda: f64 },
    Compose { maps: Vec<NonexpansiveMap> },
    Scale { center: Coords, factor: f64 },
    Translation { offset: Vec<f64> },
}

/// A self-map of a convex domain, with optional fixed-point metadata and a
/// label for reports.
#[derive(Clone, Debug)]
pub struct NonexpansiveMap {
    kind: MapKind,
    pub domain: ConvexSet,
    pub known_fixed_point: Option<Point>,
    pub label: String,
}

pub fn identity(domain: ConvexSet) -> NonexpansiveMap {
    NonexpansiveMap {
        kind: MapKind::Identity,
        domain,
        known_fixed_point: None,
        label: "identity".into(),
    }
}

/// Rotation about `center`: Euclidean (dimension 2) or the hyperbolic plane.
/// An isometry with `center` as fixed point.
pub fn rotation_map(space: &Space, center: Point, angle: f64) -> Result<NonexpansiveMap> {
    space.validate_point(&center)?;
    let kind = match space {
        Space::Euclidean { dim: 2 } => {
            let c: Coords = center.as_coords()?.iter().copied().collect();
            MapKind::PlaneRotation { center: c, cos: angle.cos(), sin: angle.sin() }
        }
        Space::Hyperbolic2 => {
            let c = center.as_hyperboloid()?;
            // Lorentz boost taking the apex to `center` (symmetric form).
            let g = 1.0 + c[2];
            let boost: Mat3 = [
                [1.0 + c[0] * c[0] / g, c[0] * c[1] / g, c[0]],
                [c[0] * c[1] / g, 1.0 + c[1] * c[1] / g, c[1]],
                [c[0], c[1], c[2]],
            ];
            // Inverse of a symmetric Lorentz boost is J B J.
            let mut inv = boost;
            inv[0][2] = -inv[0][2];
            inv[1][2] = -inv[1][2];
            inv[2][0] = -inv[2][0];
            inv[2][1] = -inv[2][1];
            let (s, co) = angle.sin_cos();
            let rot: Mat3 = [[co, -s, 0.0], [s, co, 0.0], [0.0, 0.0, 1.0]];
            MapKind::HyperbolicRotation { matrix: mat3_mul(&mat3_mul(&boost, &rot), &inv) }
        }
        _ => {
            return Err(Error::Unsupported(format!(
                "rotations are defined on euclidean(2) and hyperbolic2, not `{}`",
                space.kind_name()
            )))
        }
    };
    Ok(NonexpansiveMap {
        kind,
        domain: ConvexSet::Whole,
        known_fixed_point: Some(center),
        label: format!("rotation({angle})"),
    })
}

/// Nearest-point projection onto a closed convex target, wrapped as a map.
/// Fixed points are exactly the members of the target.
pub fn projection_map(target: ConvexSet) -> NonexpansiveMap {
    let fp = match &target {
        ConvexSet::Ball { center, .. } => Some(center.clone()),
        ConvexSet::Segment { a, .. } => Some(a.clone()),
        ConvexSet::RaySegment { ray, lo, .. } => Some(Point::tree(*ray, *lo)),
        _ => None,
    };
    NonexpansiveMap {
        kind: MapKind::Projection { target },
        domain: ConvexSet::Whole,
        known_fixed_point: fp,
        label: "projection".into(),
    }
}

/// The averaged map `x -> (1-lambda) x (+) lambda T x`. Fixed points of `T`
/// are preserved exactly because `combine(p, p, lambda) = p`.
pub fn averaged(inner: NonexpansiveMap, lambda: f64) -> Result<NonexpansiveMap> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::invalid(format!("averaging lambda = {lambda} outside (0, 1]")));
    }
    let domain = inner.domain.clone();
    let known_fixed_point = inner.known_fixed_point.clone();
    let label = format!("averaged({}, {lambda})", inner.label);
    Ok(NonexpansiveMap {
        kind: MapKind::Averaged { inner: Box::new(inner), lambda },
        domain,
        known_fixed_point,
        label,
    })
}

/// Composition, applied left to right. A fixed point is carried over only
/// when every component declares the same one.
pub fn compose(maps: Vec<NonexpansiveMap>) -> Result<NonexpansiveMap> {
    if maps.is_empty() {
        return Err(Error::invalid("compose needs at least one map"));
    }
    let domain = maps[0].domain.clone();
    let fp = maps[0].known_fixed_point.clone().filter(|p| {
        maps.iter()
            .all(|m| m.known_fixed_point.as_ref() == Some(p))
    });
    let label = format!(
        "compose({})",
        maps.iter().map(|m| m.label.as_str()).collect::<Vec<_>>().join(", ")
    );
    Ok(NonexpansiveMap {
        kind: MapKind::Compose { maps },
        domain,
        known_fixed_point: fp,
        label,
    })
}

/// `x -> center + factor * (x - center)` on a coordinate-vector space.
/// Nonexpansive iff `factor <= 1`; larger factors make deliberately
/// expansive test instances.
pub fn scale_map(space: &Space, center: Point, factor: f64) -> Result<NonexpansiveMap> {
    match space {
        Space::Euclidean { .. } | Space::Lp { .. } => {}
        _ => {
            return Err(Error::Unsupported(format!(
                "scale maps need a coordinate-vector space, not `{}`",
                space.kind_name()
            )))
        }
    }
    space.validate_point(&center)?;
    if factor < 0.0 || !factor.is_finite() {
        return Err(Error::invalid("scale factor must be finite and >= 0"));
    }
    let c: Coords = center.as_coords()?.iter().copied().collect();
    Ok(NonexpansiveMap {
        kind: MapKind::Scale { center: c, factor },
        domain: ConvexSet::Whole,
        known_fixed_point: if factor != 1.0 { Some(center) } else { None },
        label: format!("scale({factor})"),
    })
}

/// Translation on a coordinate-vector space; an isometry without fixed
/// points, used as the unbounded-orbit counterexample.
pub fn translation_map(space: &Space, offset: Vec<f64>) -> Result<NonexpansiveMap> {
    match space {
        Space::Euclidean { dim } | Space::Lp { dim, .. } if *dim == offset.len() => {}
        _ => {
            return Err(Error::Unsupported(
                "translation needs a coordinate-vector space of matching dimension".into(),
            ))
        }
    }
    Ok(NonexpansiveMap {
        kind: MapKind::Translation { offset },
        domain: ConvexSet::Whole,
        known_fixed_point: None,
        label: "translation".into(),
    })
}

impl NonexpansiveMap {
    pub fn with_domain(mut self, domain: ConvexSet) -> Self {
        self.domain = domain;
        self
    }

    pub fn with_fixed_point(mut self, p: Point) -> Self {
        self.known_fixed_point = Some(p);
        self
    }

    pub fn apply(&self, space: &Space, x: &Point) -> Result<Point> {
        match &self.kind {
            MapKind::Identity => Ok(x.clone()),
            MapKind::PlaneRotation { center, cos, sin } => {
                let c = x.as_coords()?;
                if c.len() != 2 || center.len() != 2 {
                    return Err(Error::invalid("plane rotation needs 2-D points"));
                }
                let (dx, dy) = (c[0] - center[0], c[1] - center[1]);
                Ok(Point::vector(vec![
                    center[0] + cos * dx - sin * dy,
                    center[1] + sin * dx + cos * dy,
                ]))
            }
            MapKind::HyperbolicRotation { matrix } => {
                let h = x.as_hyperboloid()?;
                let mut p = mat3_apply(matrix, h);
                // The matrix is Lorentz up to rounding; project back.
                let q = -minkowski_dot(&p, &p);
                if q > 0.0 {
                    let s = q.sqrt();
                    p = [p[0] / s, p[1] / s, p[2] / s];
                }
                Ok(Point::Hyperboloid(p))
            }
            MapKind::Projection { target } => {
                crate::analysis::chebyshev_projection(space, x, target, 1e-12)
            }
            MapKind::Averaged { inner, lambda } => {
                let tx = inner.apply(space, x)?;
                Ok(space.combine_unchecked(x, &tx, *lambda))
            }
            MapKind::Compose { maps } => {
                let mut p = x.clone();
                for m in maps {
                    p = m.apply(space, &p)?;
                }
                Ok(p)
            }
            MapKind::Scale { center, factor } => {
                let c = x.as_coords()?;
                if c.len() != center.len() {
                    return Err(Error::invalid("scale center dimension mismatch"));
                }
                Ok(Point::Vector(
                    c.iter()
                        .zip(center.iter())
                        .map(|(xi, ci)| ci + factor * (xi - ci))
                        .collect(),
                ))
            }
            MapKind::Translation { offset } => {
                let c = x.as_coords()?;
                if c.len() != offset.len() {
                    return Err(Error::invalid("translation offset dimension mismatch"));
                }
                Ok(Point::Vector(
                    c.iter().zip(offset.iter()).map(|(xi, oi)| xi + oi).collect(),
                ))
            }
        }
    }
}

/// Worst-pair report from sampling `d(Tx, Ty) - d(x, y)`.
#[derive(Clone, Debug)]
pub struct NonexpansivenessCheck {
    pub trials: usize,
    /// Maximum observed `d(Tx,Ty) - d(x,y)`.
    pub max_excess: f64,
    /// Pairs exceeding the 1e-9 band.
    pub violations: usize,
    pub witness: Option<(Point, Point, f64)>,
}

/// Sample point pairs from the domain and measure expansion.
pub fn check_nonexpansive(
    space: &Space,
    map: &NonexpansiveMap,
    trials: usize,
    seed: u64,
) -> Result<NonexpansivenessCheck> {
    if trials == 0 {
        return Err(Error::invalid("check_nonexpansive needs trials >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_excess = f64::NEG_INFINITY;
    let mut violations = 0;
    let mut witness = None;
    for _ in 0..trials {
        let x = map.domain.sample(space, 2.0, &mut rng)?;
        let y = map.domain.sample(space, 2.0, &mut rng)?;
        let d = space.dist_unchecked(&x, &y);
        let dt = space.dist_unchecked(&map.apply(space, &x)?, &map.apply(space, &y)?);
        let excess = dt - d;
        if excess > max_excess {
            max_excess = excess;
        }
        if excess > 1e-9 {
            violations += 1;
            if witness.is_none() {
                witness = Some((x, y, excess));
            }
        }
    }
    Ok(NonexpansivenessCheck { trials, max_excess, violations, witness })
}

/// Sample the domain and count images that leave it (beyond `tol`).
pub fn check_self_map(
    space: &Space,
    map: &NonexpansiveMap,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut escapes = 0;
    for _ in 0..trials {
        let x = map.domain.sample(space, 2.0, &mut rng)?;
        let tx = map.apply(space, &x)?;
        if !map.domain.contains(space, &tx, tol)? {
            escapes += 1;
        }
    }
    Ok(escapes)
}

/// Distance `d(T p, p)` for the declared fixed point, if any.
pub fn fixed_point_residual(space: &Space, map: &NonexpansiveMap) -> Result<Option<f64>> {
    match &map.known_fixed_point {
        None => Ok(None),
        Some(p) => {
            let tp = map.apply(space, p)?;
            Ok(Some(space.dist(&tp, p)?))
        }
    }
}
