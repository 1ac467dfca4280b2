//! Declarative experiment configs.
//!
//! One JSON document per experiment, assembled from the descriptor
//! vocabularies of the underlying library: spaces (`euclidean`, `lp`,
//! `hyperbolic2`, `rtree`), convex sets (`whole`, `ball`, `halfspace`,
//! `segment`, `ray_segment`), mappings (`identity`, `rotation`,
//! `projection`, `averaged`, `compose`, `scale`, `translation`), scalar
//! schedules with optional certificate overrides, and moduli (`cat0`,
//! `lp`, `table`, `constant`).

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use asymreg::iterate::{DivergenceRate, LambdaSeq, SSeq, ScalarSchedule};
use asymreg::mappings::{self, NonexpansiveMap};
use asymreg::modulus::{self, Modulus};
use asymreg::spaces::{ConvexSet, Point, Space};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceSpec {
    Euclidean { dim: usize },
    Lp { p: f64, dim: usize },
    Hyperbolic2,
    Rtree { rays: u32 },
}

impl SpaceSpec {
    pub fn build(&self) -> Result<Space> {
        Ok(match self {
            SpaceSpec::Euclidean { dim } => Space::euclidean(*dim)?,
            SpaceSpec::Lp { p, dim } => Space::lp(*p, *dim)?,
            SpaceSpec::Hyperbolic2 => Space::hyperbolic2(),
            SpaceSpec::Rtree { rays } => Space::rtree(*rays)?,
        })
    }
}

/// A point: either a coordinate array (full 3-vector on the hyperboloid) or
/// a `{ray, radius}` pair for the star tree.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum PointSpec {
    Coords(Vec<f64>),
    Tree { ray: u32, radius: f64 },
}

impl PointSpec {
    pub fn build(&self, space: &Space) -> Result<Point> {
        let p = match self {
            PointSpec::Coords(c) => match space {
                Space::Hyperbolic2 => {
                    if c.len() != 3 {
                        bail!("hyperbolic points are 3-vectors on the hyperboloid sheet");
                    }
                    Point::Hyperboloid([c[0], c[1], c[2]])
                }
                _ => Point::vector(c.clone()),
            },
            PointSpec::Tree { ray, radius } => Point::tree(*ray, *radius),
        };
        space.validate_point(&p)?;
        Ok(p)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetSpec {
    Whole,
    Ball { center: PointSpec, radius: f64 },
    Halfspace { normal: Vec<f64>, offset: f64 },
    Segment { a: PointSpec, b: PointSpec },
    RaySegment { ray: u32, lo: f64, hi: f64 },
}

impl SetSpec {
    pub fn build(&self, space: &Space) -> Result<ConvexSet> {
        Ok(match self {
            SetSpec::Whole => ConvexSet::Whole,
            SetSpec::Ball { center, radius } => {
                ConvexSet::ball(center.build(space)?, *radius)?
            }
            SetSpec::Halfspace { normal, offset } => ConvexSet::Halfspace {
                normal: normal.clone(),
                offset: *offset,
            },
            SetSpec::Segment { a, b } => ConvexSet::Segment {
                a: a.build(space)?,
                b: b.build(space)?,
            },
            SetSpec::RaySegment { ray, lo, hi } => ConvexSet::ray_segment(*ray, *lo, *hi)?,
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapSpec {
    Identity,
    Rotation { center: PointSpec, angle: f64 },
    Projection { target: SetSpec },
    Averaged { inner: Box<MapSpec>, lambda: f64 },
    Compose { maps: Vec<MapSpec> },
    Scale { center: PointSpec, factor: f64 },
    Translation { offset: Vec<f64> },
}

impl MapSpec {
    pub fn build(&self, space: &Space) -> Result<NonexpansiveMap> {
        Ok(match self {
            MapSpec::Identity => mappings::identity(ConvexSet::Whole),
            MapSpec::Rotation { center, angle } => {
                mappings::rotation_map(space, center.build(space)?, *angle)?
            }
            MapSpec::Projection { target } => mappings::projection_map(target.build(space)?),
            MapSpec::Averaged { inner, lambda } => {
                mappings::averaged(inner.build(space)?, *lambda)?
            }
            MapSpec::Compose { maps } => {
                let built = maps
                    .iter()
                    .map(|m| m.build(space))
                    .collect::<Result<Vec<_>>>()?;
                mappings::compose(built)?
            }
            MapSpec::Scale { center, factor } => {
                mappings::scale_map(space, center.build(space)?, *factor)?
            }
            MapSpec::Translation { offset } => mappings::translation_map(space, offset.clone())?,
        })
    }

    pub fn describe(&self) -> String {
        match self {
            MapSpec::Identity => "identity".into(),
            MapSpec::Rotation { angle, .. } => format!("rotation({angle})"),
            MapSpec::Projection { .. } => "projection".into(),
            MapSpec::Averaged { inner, lambda } => {
                format!("averaged({}, {lambda})", inner.describe())
            }
            MapSpec::Compose { maps } => format!(
                "compose({})",
                maps.iter().map(|m| m.describe()).collect::<Vec<_>>().join(", ")
            ),
            MapSpec::Scale { factor, .. } => format!("scale({factor})"),
            MapSpec::Translation { .. } => "translation".into(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LambdaSpec {
    Const { value: f64 },
    Alternating,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SSpec {
    Zero,
    Const { value: f64 },
    Geometric { c: f64, q: f64 },
    InverseSquare,
}

/// Schedule descriptor; `l`/`n0` and `theta_scale` override the derived
/// certificates (they are validated against partial sums before use).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ScheduleSpec {
    pub lambda: LambdaSpec,
    pub s: SSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n0: Option<u64>,
    /// Optional override: divergence rate `theta(n) = ceil(scale * n)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_scale: Option<f64>,
}

impl ScheduleSpec {
    pub fn build(&self) -> Result<ScalarSchedule> {
        let lambda = match self.lambda {
            LambdaSpec::Const { value } => LambdaSeq::Const(value),
            LambdaSpec::Alternating => LambdaSeq::Alternating,
        };
        let s = match self.s {
            SSpec::Zero => SSeq::Zero,
            SSpec::Const { value } => SSeq::Const(value),
            SSpec::Geometric { c, q } => SSeq::Geometric { c, q },
            SSpec::InverseSquare => SSeq::InverseSquare,
        };
        let mut sched = ScalarSchedule::new(lambda, s)?;
        match (self.l, self.n0) {
            (Some(l), n0) => sched = sched.with_l_n0(l, n0.unwrap_or(0)),
            (None, Some(n0)) => {
                let l = sched
                    .l_n0
                    .map(|(l, _)| l)
                    .context("n0 override needs a derivable or explicit L")?;
                sched = sched.with_l_n0(l, n0);
            }
            (None, None) => {}
        }
        if let Some(scale) = self.theta_scale {
            sched = sched.with_theta(DivergenceRate::LinearCeil { scale });
        }
        Ok(sched)
    }

    pub fn describe(&self) -> String {
        let lam = match self.lambda {
            LambdaSpec::Const { value } => format!("lambda={value}"),
            LambdaSpec::Alternating => "lambda=alternating".into(),
        };
        let s = match self.s {
            SSpec::Zero => "s=0".into(),
            SSpec::Const { value } => format!("s={value}"),
            SSpec::Geometric { c, q } => format!("s={c}*{q}^n"),
            SSpec::InverseSquare => "s=1/(n+2)^2".into(),
        };
        format!("{lam}, {s}")
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModulusSpec {
    Cat0,
    Lp { p: f64 },
    Constant { delta: f64 },
    Table {
        r_breaks: Vec<f64>,
        eps_breaks: Vec<f64>,
        values: Vec<Vec<f64>>,
    },
}

impl ModulusSpec {
    pub fn build(&self) -> Result<Modulus> {
        Ok(match self {
            ModulusSpec::Cat0 => modulus::cat0_modulus(),
            ModulusSpec::Lp { p } => modulus::lp_modulus(*p)?,
            ModulusSpec::Constant { delta } => modulus::constant_modulus(*delta)?,
            ModulusSpec::Table { r_breaks, eps_breaks, values } => {
                modulus::table_modulus(r_breaks.clone(), eps_breaks.clone(), values.clone())?
            }
        })
    }

    pub fn is_quadratic(&self) -> bool {
        matches!(self, ModulusSpec::Cat0)
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum FormulaSpec {
    TyHit,
    TxHit,
    Afp,
    Regularity,
    RegularityFactored,
    RegularityConstLambda,
    RegularityCat0,
    KmRegularity,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub id: String,
    pub space: SpaceSpec,
    pub map: MapSpec,
    /// Convex domain the map is run on; defaults to the whole space.
    #[serde(default = "default_domain")]
    pub domain: SetSpec,
    pub modulus: ModulusSpec,
    pub schedule: ScheduleSpec,
    pub x0: PointSpec,
    /// Distance bound `b >= d(x0, p)`; when absent it is sourced from the
    /// map's known fixed point, then from the domain diameter.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    /// Domain diameter override for the bounded-domain formulas.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_c: Option<f64>,
    pub epsilons: Vec<f64>,
    /// Formulas to evaluate; defaults to every formula whose hypotheses the
    /// config satisfies.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formulas: Option<Vec<FormulaSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_domain() -> SetSpec {
    SetSpec::Whole
}

fn default_seed() -> u64 {
    0
}

pub fn load_config(path: &std::path::Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    let cfg: ExperimentConfig = serde_json::from_str(&text)
        .with_context(|| format!("cannot parse config {}", path.display()))?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trips_through_json() {
        let cfg = ExperimentConfig {
            id: "demo".into(),
            space: SpaceSpec::Euclidean { dim: 2 },
            map: MapSpec::Rotation {
                center: PointSpec::Coords(vec![0.0, 0.0]),
                angle: 1.5,
            },
            domain: SetSpec::Ball {
                center: PointSpec::Coords(vec![0.0, 0.0]),
                radius: 2.0,
            },
            modulus: ModulusSpec::Cat0,
            schedule: ScheduleSpec {
                lambda: LambdaSpec::Const { value: 0.5 },
                s: SSpec::Geometric { c: 0.5, q: 0.5 },
                l: None,
                n0: None,
                theta_scale: None,
            },
            x0: PointSpec::Coords(vec![1.0, 0.0]),
            b: Some(1.0),
            d_c: None,
            epsilons: vec![1.0, 0.1],
            formulas: None,
            horizon: None,
            seed: 7,
        };
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back.id, cfg.id);
        assert_eq!(back.space, cfg.space);
        assert_eq!(back.map, cfg.map);
        assert_eq!(back.schedule, cfg.schedule);
    }

    #[test]
    fn tree_points_parse_from_object_form() {
        let text = r#"{"ray": 2, "radius": 1.5}"#;
        let spec: PointSpec = serde_json::from_str(text).unwrap();
        let space = Space::rtree(5).unwrap();
        let p = spec.build(&space).unwrap();
        assert_eq!(p, Point::tree(2, 1.5));
    }

    #[test]
    fn hyperbolic_points_must_sit_on_the_sheet() {
        let space = Space::hyperbolic2();
        let bad = PointSpec::Coords(vec![1.0, 0.0, 1.0]);
        assert!(bad.build(&space).is_err());
        let good = PointSpec::Coords(vec![0.0, 0.0, 1.0]);
        assert!(good.build(&space).is_ok());
    }
}
