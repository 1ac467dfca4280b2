//! Experiment runner: validate hypotheses, evaluate certificates, stream the
//! orbit once, and check every guarantee against it.

use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};

use asymreg::analysis::chebyshev_projection;
use asymreg::iterate::{ishikawa_step, validate_schedule, ScalarSchedule};
use asymreg::mappings::{check_nonexpansive, check_self_map, fixed_point_residual, NonexpansiveMap};
use asymreg::modulus::{verify_modulus, Modulus};
use asymreg::rates::{
    approx_fixed_point_bound, cat0_regularity_bound, const_lambda_regularity_bound,
    factored_regularity_bound, km_regularity_bound, regularity_bound, tx_hit_bound, ty_hit_bound,
    Branch, Formula, Guarantee, RateInputs,
};
use asymreg::spaces::{ConvexSet, Point, Space};
use asymreg::iterate::LambdaSeq;

use crate::config::{ExperimentConfig, FormulaSpec};
use crate::report::{CertificateOutcome, ExperimentReport, OrbitSummary};

/// CLI-level overrides.
#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub horizon: Option<usize>,
}

/// Steps over which the per-step inequality chain and the Fejer property are
/// monitored; horizons beyond this only track hits and windows.
const CHAIN_WINDOW: usize = 100_000;

pub struct BuiltExperiment {
    pub cfg: ExperimentConfig,
    pub space: Space,
    pub map: NonexpansiveMap,
    pub modulus: Modulus,
    pub sched: ScalarSchedule,
    pub x0: Point,
    pub b: f64,
    pub b_source: &'static str,
    pub d_c: Option<f64>,
    pub seed: u64,
}

/// Build every object in the config and check the theorem hypotheses that
/// are checkable before running an orbit. Errors name the violated
/// hypothesis.
pub fn build_and_validate(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<BuiltExperiment> {
    if cfg.epsilons.is_empty() {
        bail!("config `{}`: epsilon ladder is empty", cfg.id);
    }
    if cfg.epsilons.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        bail!("config `{}`: every epsilon must be positive", cfg.id);
    }
    let seed = opts.seed.unwrap_or(cfg.seed);
    let space = cfg.space.build()?;
    let domain = cfg.domain.build(&space)?;
    let map = cfg.map.build(&space)?.with_domain(domain.clone());
    let modulus = cfg.modulus.build()?;
    let sched = cfg.schedule.build()?;
    let x0 = cfg.x0.build(&space)?;

    if !domain.contains(&space, &x0, 1e-9)? {
        bail!("config `{}`: x0 lies outside the declared domain", cfg.id);
    }

    validate_schedule(&sched, 2_000)
        .map_err(|e| anyhow!("config `{}`: schedule validation failed: {e}", cfg.id))?;

    let escapes = check_self_map(&space, &map, 200, seed, 1e-9)?;
    if escapes > 0 {
        bail!(
            "config `{}`: map is not a self-map of its domain ({escapes}/200 sampled images escaped)",
            cfg.id
        );
    }
    let nonexp = check_nonexpansive(&space, &map, 300, seed.wrapping_add(1))?;
    if nonexp.violations > 0 {
        bail!(
            "config `{}`: nonexpansiveness validation failed (max excess {:.3e} over {} pairs)",
            cfg.id,
            nonexp.max_excess,
            nonexp.trials
        );
    }
    if let Some(res) = fixed_point_residual(&space, &map)? {
        if res > 1e-9 {
            bail!(
                "config `{}`: declared fixed point moves by {res:.3e} under the map",
                cfg.id
            );
        }
    }
    let spot = verify_modulus(&space, &modulus, 300, seed.wrapping_add(2))?;
    if spot.violations > 0 {
        bail!(
            "config `{}`: modulus spot-check failed ({} violations, worst margin {:.3e})",
            cfg.id,
            spot.violations,
            spot.worst_margin
        );
    }

    let (b, b_source) = resolve_b(cfg, &space, &map, &x0, &domain)?;
    let d_c = cfg.d_c.or_else(|| domain.diameter(&space));

    Ok(BuiltExperiment {
        cfg: cfg.clone(),
        space,
        map,
        modulus,
        sched,
        x0,
        b,
        b_source,
        d_c,
        seed,
    })
}

/// Sourcing order: explicit config value, then distance to the map's known
/// fixed point, then the domain diameter.
fn resolve_b(
    cfg: &ExperimentConfig,
    space: &Space,
    map: &NonexpansiveMap,
    x0: &Point,
    domain: &ConvexSet,
) -> Result<(f64, &'static str)> {
    if let Some(b) = cfg.b {
        if !(b > 0.0) {
            bail!("config `{}`: b must be positive", cfg.id);
        }
        return Ok((b, "config"));
    }
    if let Some(p) = &map.known_fixed_point {
        let d = space.dist(x0, p)?;
        if d > 0.0 {
            return Ok((d, "fixed-point distance"));
        }
        // x0 is itself fixed; any positive b works.
        return Ok((1e-9, "fixed-point distance"));
    }
    if let Some(d) = cfg.d_c.or_else(|| domain.diameter(space)) {
        return Ok((d, "domain diameter"));
    }
    bail!(
        "config `{}`: no distance bound available; set `b`, use a map with a known \
         fixed point, or declare a bounded domain",
        cfg.id
    );
}

#[derive(Clone, Debug)]
pub struct CertRow {
    pub formula: Formula,
    pub eps: f64,
    pub bound: u64,
    pub guarantee: Guarantee,
    pub branch: Branch,
}

fn const_lambda(sched: &ScalarSchedule) -> Option<f64> {
    match sched.lambda {
        LambdaSeq::Const(v) if v > 0.0 && v < 1.0 => Some(v),
        _ => None,
    }
}

/// Decide which formulas apply, honouring an explicit request exactly (a
/// request whose hypotheses fail is a config error).
fn formula_set(built: &BuiltExperiment) -> Result<Vec<FormulaSpec>> {
    if let Some(fs) = &built.cfg.formulas {
        return Ok(fs.clone());
    }
    let mut out = Vec::new();
    let sched = &built.sched;
    if sched.theta.is_some() && sched.l_n0.is_some() {
        out.extend([FormulaSpec::TyHit, FormulaSpec::TxHit, FormulaSpec::Afp]);
        if sched.gamma.is_some() {
            out.push(FormulaSpec::Regularity);
            if built.modulus.has_factored() {
                out.push(FormulaSpec::RegularityFactored);
            }
        }
        if sched.s.is_zero() {
            out.push(FormulaSpec::KmRegularity);
        }
    }
    if const_lambda(sched).is_some() && sched.delta.is_some() && built.d_c.is_some() {
        out.push(FormulaSpec::RegularityConstLambda);
        if built.cfg.modulus.is_quadratic() {
            out.push(FormulaSpec::RegularityCat0);
        }
    }
    if out.is_empty() {
        bail!(
            "config `{}`: no rate formula applies (schedule certificates missing)",
            built.cfg.id
        );
    }
    Ok(out)
}

/// Evaluate one formula at one accuracy.
fn eval_formula(built: &BuiltExperiment, f: FormulaSpec, eps: f64) -> Result<CertRow> {
    let sched = &built.sched;
    let need_theta = || {
        sched.theta.as_ref().ok_or_else(|| {
            anyhow!(
                "config `{}`: no divergence rate for sum lambda_n(1-lambda_n); \
                 lambda(1-lambda) vanishes or the family has no certificate",
                built.cfg.id
            )
        })
    };
    let need_ln0 = || {
        sched.l_n0.ok_or_else(|| {
            anyhow!(
                "config `{}`: no (L, N0) certificate with s_n <= 1 - 1/L",
                built.cfg.id
            )
        })
    };
    let need_gamma = || {
        sched.gamma.as_ref().ok_or_else(|| {
            anyhow!(
                "config `{}`: no Cauchy modulus for sum s_n(1-lambda_n) \
                 (the series may diverge)",
                built.cfg.id
            )
        })
    };
    let need_delta = || {
        sched.delta.as_ref().ok_or_else(|| {
            anyhow!("config `{}`: no Cauchy modulus for sum s_n", built.cfg.id)
        })
    };
    let need_lambda = || {
        const_lambda(sched).ok_or_else(|| {
            anyhow!(
                "config `{}`: constant-lambda formulas need lambda constant in (0, 1); \
                 lambda(1-lambda) = 0 is not admissible",
                built.cfg.id
            )
        })
    };
    let need_dc = || {
        built.d_c.ok_or_else(|| {
            anyhow!(
                "config `{}`: bounded-domain formulas need a domain diameter (`d_c` \
                 or a bounded domain)",
                built.cfg.id
            )
        })
    };

    let row = match f {
        FormulaSpec::TyHit => CertRow {
            formula: Formula::TyHit,
            eps,
            bound: ty_hit_bound(eps, 0, &built.modulus, built.b, need_theta()?)?,
            guarantee: Guarantee::ExistsUpTo,
            branch: Branch::Main,
        },
        FormulaSpec::TxHit => {
            let (l, n0) = need_ln0()?;
            CertRow {
                formula: Formula::TxHit,
                eps,
                bound: tx_hit_bound(eps, 0, &built.modulus, built.b, need_theta()?, l, n0)?,
                guarantee: Guarantee::ExistsUpTo,
                branch: Branch::Main,
            }
        }
        FormulaSpec::Afp => {
            let (l, n0) = need_ln0()?;
            CertRow {
                formula: Formula::ApproxFixedPoint,
                eps,
                bound: approx_fixed_point_bound(eps, &built.modulus, built.b, need_theta()?, l, n0)?,
                guarantee: Guarantee::ExistsUpTo,
                branch: Branch::Main,
            }
        }
        FormulaSpec::Regularity | FormulaSpec::RegularityFactored => {
            let (l, n0) = need_ln0()?;
            let inputs = RateInputs {
                eps,
                b: built.b,
                modulus: &built.modulus,
                theta: need_theta()?,
                gamma: need_gamma()?,
                l,
                n0,
            };
            let cert = if matches!(f, FormulaSpec::Regularity) {
                regularity_bound(&inputs)?
            } else {
                factored_regularity_bound(&inputs)?
            };
            CertRow {
                formula: cert.formula,
                eps,
                bound: cert.bound,
                guarantee: cert.guarantee,
                branch: cert.branch,
            }
        }
        FormulaSpec::KmRegularity => {
            let cert = km_regularity_bound(eps, &built.modulus, built.b, need_theta()?, sched)?;
            CertRow {
                formula: cert.formula,
                eps,
                bound: cert.bound,
                guarantee: cert.guarantee,
                branch: cert.branch,
            }
        }
        FormulaSpec::RegularityConstLambda => {
            let (l, n0) = need_ln0()?;
            let cert = const_lambda_regularity_bound(
                eps,
                &built.modulus,
                need_dc()?,
                need_lambda()?,
                l,
                n0,
                need_delta()?,
            )?;
            CertRow {
                formula: cert.formula,
                eps,
                bound: cert.bound,
                guarantee: cert.guarantee,
                branch: cert.branch,
            }
        }
        FormulaSpec::RegularityCat0 => {
            let (l, n0) = need_ln0()?;
            if !built.cfg.modulus.is_quadratic() {
                bail!(
                    "config `{}`: the quadratic-modulus formula needs the `cat0` modulus",
                    built.cfg.id
                );
            }
            let cert = cat0_regularity_bound(eps, need_dc()?, need_lambda()?, l, n0, need_delta()?)?;
            CertRow {
                formula: cert.formula,
                eps,
                bound: cert.bound,
                guarantee: cert.guarantee,
                branch: cert.branch,
            }
        }
    };
    Ok(row)
}

pub fn evaluate_certificates(built: &BuiltExperiment) -> Result<Vec<CertRow>> {
    let formulas = formula_set(built)?;
    let mut rows = Vec::with_capacity(formulas.len() * built.cfg.epsilons.len());
    for &eps in &built.cfg.epsilons {
        for &f in &formulas {
            rows.push(eval_formula(built, f, eps)?);
        }
    }
    Ok(rows)
}

/// Which orbit diagnostic a formula's guarantee speaks about.
fn diagnostic_of(f: Formula) -> &'static str {
    match f {
        Formula::TyHit | Formula::TxHit => "ty",
        _ => "tx",
    }
}

struct Window {
    start: u64,
    end: u64,
    eps: f64,
    row: usize,
    ok: bool,
}

struct StreamOutcome {
    first_hit_tx: Vec<Option<u64>>,
    first_hit_ty: Vec<Option<u64>>,
    windows: Vec<Window>,
    min_diag: f64,
    final_diag: f64,
    fejer_violations: Option<u64>,
    chain_violations: u64,
    chain_window: usize,
}

fn band(scale: f64) -> f64 {
    1e-9 * scale.max(1.0)
}

/// One pass over the orbit with O(1) memory: first hits for both
/// diagnostics, for-all windows, and the inequality chain over the leading
/// `CHAIN_WINDOW` steps.
fn stream_orbit(
    built: &BuiltExperiment,
    horizon: usize,
    mut windows: Vec<Window>,
) -> Result<StreamOutcome> {
    let space = &built.space;
    let map = &built.map;
    let sched = &built.sched;
    let epsilons = &built.cfg.epsilons;
    let anchor = built.map.known_fixed_point.clone();

    windows.sort_by_key(|w| w.start);
    let mut next_window = 0usize;
    let mut active: Vec<usize> = Vec::new();

    let mut first_hit_tx: Vec<Option<u64>> = vec![None; epsilons.len()];
    let mut first_hit_ty: Vec<Option<u64>> = vec![None; epsilons.len()];
    let mut unhit_tx = epsilons.len();
    let mut unhit_ty = epsilons.len();

    let chain_window = horizon.min(CHAIN_WINDOW);
    let mut chain_violations = 0u64;
    let mut fejer_violations = anchor.as_ref().map(|_| 0u64);
    let mut d_p_prev = match &anchor {
        Some(p) => Some(space.dist(&built.x0, p)?),
        None => None,
    };

    let mut min_diag = f64::INFINITY;
    let mut prev_growth_cap: Option<f64> = None;
    let mut x = built.x0.clone();
    let max_eps = epsilons.iter().cloned().fold(f64::MIN, f64::max);

    for n in 0..=horizon {
        // Diagnostics at x_n; the final index reuses only the tx leg.
        let (diag_tx, diag_ty, step) = if n < horizon {
            let st = ishikawa_step(space, map, sched, n, &x)?;
            let dtx = space.dist_unchecked(&x, &st.tx);
            let dty = space.dist_unchecked(&x, &st.ty);
            (dtx, dty, Some(st))
        } else {
            let tx = map.apply(space, &x)?;
            (space.dist_unchecked(&x, &tx), f64::NAN, None)
        };
        min_diag = min_diag.min(diag_tx);

        if unhit_tx > 0 && diag_tx < max_eps {
            for (i, &eps) in epsilons.iter().enumerate() {
                if first_hit_tx[i].is_none() && diag_tx < eps {
                    first_hit_tx[i] = Some(n as u64);
                    unhit_tx -= 1;
                }
            }
        }
        if unhit_ty > 0 && step.is_some() {
            for (i, &eps) in epsilons.iter().enumerate() {
                if first_hit_ty[i].is_none() && diag_ty < eps {
                    first_hit_ty[i] = Some(n as u64);
                    unhit_ty -= 1;
                }
            }
        }

        while next_window < windows.len() && windows[next_window].start == n as u64 {
            active.push(next_window);
            next_window += 1;
        }
        if !active.is_empty() {
            let nn = n as u64;
            active.retain(|&w| {
                if nn > windows[w].end {
                    return false;
                }
                if diag_tx >= windows[w].eps {
                    windows[w].ok = false;
                }
                true
            });
        }

        // Growth rule tying step n-1 to n.
        if let Some(cap) = prev_growth_cap.take() {
            if diag_tx > cap + band(cap) {
                chain_violations += 1;
            }
        }

        if let Some(st) = &step {
            if n < chain_window {
                let lam = sched.lambda_at(n);
                let s = sched.s_at(n);
                let tol = band(diag_tx.max(diag_ty));
                let d_step = space.dist_unchecked(&x, &st.next);
                if (d_step - lam * diag_ty).abs() > tol {
                    chain_violations += 1;
                }
                let dyx = space.dist_unchecked(&st.y, &x);
                if (dyx - s * diag_tx).abs() > tol {
                    chain_violations += 1;
                }
                if (1.0 - s) * diag_tx > diag_ty + tol || diag_ty > (1.0 + s) * diag_tx + tol {
                    chain_violations += 1;
                }
                let dyty = space.dist_unchecked(&st.y, &st.ty);
                if dyty > diag_tx + tol {
                    chain_violations += 1;
                }
                prev_growth_cap = Some((1.0 + 2.0 * s * (1.0 - lam)) * diag_tx);

                if let (Some(p), Some(dp), Some(viol)) =
                    (&anchor, d_p_prev.as_mut(), fejer_violations.as_mut())
                {
                    let d_next = space.dist_unchecked(&st.next, p);
                    if d_next > *dp + band(*dp) {
                        *viol += 1;
                    }
                    if diag_tx > 2.0 * *dp + band(*dp) {
                        *viol += 1;
                    }
                    *dp = d_next;
                }
            }
        }

        if let Some(st) = step {
            if !map.domain.contains_unchecked(space, &st.next, 1e-9)? {
                let proj = chebyshev_projection(space, &st.next, &map.domain, 1e-12)?;
                let excess = space.dist_unchecked(&st.next, &proj);
                return Err(asymreg::Error::DomainViolation { step: n, excess }.into());
            }
            x = st.next;
        }
    }

    Ok(StreamOutcome {
        first_hit_tx,
        first_hit_ty,
        windows,
        min_diag,
        final_diag: {
            let tx = map.apply(space, &x)?;
            space.dist_unchecked(&x, &tx)
        },
        fejer_violations,
        chain_violations,
        chain_window,
    })
}

pub fn run_experiment(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<ExperimentReport> {
    let start = Instant::now();
    let built = build_and_validate(cfg, opts)?;
    let rows = evaluate_certificates(&built)?;

    let max_bound = rows.iter().map(|r| r.bound).max().unwrap_or(0);
    let needed = max_bound
        .checked_add(100)
        .context("certificate bound overflows the feasible horizon")? as usize;
    let horizon = opts.horizon.or(cfg.horizon).unwrap_or(needed);
    if horizon < needed {
        bail!(
            "config `{}`: horizon {horizon} is below the tail-verification requirement \
             (max bound {max_bound} + 100)",
            cfg.id
        );
    }

    let windows: Vec<Window> = rows
        .iter()
        .enumerate()
        .filter(|(_, r)| r.guarantee == Guarantee::ForAllFrom)
        .map(|(i, r)| Window {
            start: r.bound,
            end: r.bound + 100,
            eps: r.eps,
            row: i,
            ok: true,
        })
        .collect();

    let out = stream_orbit(&built, horizon, windows)?;

    let eps_index = |eps: f64| {
        built
            .cfg
            .epsilons
            .iter()
            .position(|&e| e == eps)
            .expect("certificate eps comes from the ladder")
    };

    let mut outcomes = Vec::with_capacity(rows.len());
    let mut window_by_row: Vec<Option<bool>> = vec![None; rows.len()];
    for w in &out.windows {
        window_by_row[w.row] = Some(w.ok);
    }
    for (i, row) in rows.iter().enumerate() {
        let diag = diagnostic_of(row.formula);
        let first_hit = match diag {
            "ty" => out.first_hit_ty[eps_index(row.eps)],
            _ => out.first_hit_tx[eps_index(row.eps)],
        };
        let tail_ok = window_by_row[i];
        let hit_ok = first_hit.map(|h| h <= row.bound).unwrap_or(false);
        let pass = match row.guarantee {
            Guarantee::ExistsUpTo => hit_ok,
            Guarantee::ForAllFrom => tail_ok.unwrap_or(false) && hit_ok,
        };
        let margin = first_hit.map(|h| {
            if row.bound > 0 {
                h as f64 / row.bound as f64
            } else {
                0.0
            }
        });
        outcomes.push(CertificateOutcome {
            formula: row.formula.name().to_string(),
            epsilon: row.eps,
            bound: row.bound,
            guarantee: match row.guarantee {
                Guarantee::ForAllFrom => "for_all_from".into(),
                Guarantee::ExistsUpTo => "exists_up_to".into(),
            },
            branch: format!("{:?}", row.branch).to_lowercase(),
            diagnostic: diag.into(),
            first_hit,
            tail_ok,
            margin,
            pass,
        });
    }

    let pass = outcomes.iter().all(|o| o.pass);
    Ok(ExperimentReport {
        experiment_id: cfg.id.clone(),
        space: format!("{:?}", built.space),
        map: cfg.map.describe(),
        modulus: built.modulus.describe(),
        schedule: cfg.schedule.describe(),
        b: built.b,
        b_source: built.b_source.into(),
        d_c: built.d_c,
        seed: built.seed,
        horizon,
        orbit: OrbitSummary {
            steps: horizon,
            final_diag: out.final_diag,
            min_diag: out.min_diag,
            fejer_violations: out.fejer_violations,
            chain_violations: out.chain_violations,
            chain_window: out.chain_window,
        },
        certificates: outcomes,
        pass,
        wallclock_ms: start.elapsed().as_millis(),
    })
}

/// Validation-only entry point: hypotheses plus the certificate table.
pub fn validate_only(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Vec<CertRow>> {
    let built = build_and_validate(cfg, opts)?;
    evaluate_certificates(&built)
}

#[derive(Debug)]
pub struct SuiteEntry {
    pub file: std::path::PathBuf,
    pub id: String,
    pub outcome: Result<ExperimentReport>,
}

#[derive(Debug)]
pub struct SuiteSummary {
    pub entries: Vec<SuiteEntry>,
}

impl SuiteSummary {
    pub fn all_pass(&self) -> bool {
        self.entries
            .iter()
            .all(|e| matches!(&e.outcome, Ok(r) if r.pass))
    }
}

/// Run every `*.json` config in a directory; per-file errors are recorded
/// and do not stop the rest of the suite.
pub fn run_suite(dir: &std::path::Path, opts: &RunOptions) -> Result<SuiteSummary> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .with_context(|| format!("cannot read suite directory {}", dir.display()))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    if files.is_empty() {
        bail!("no experiment configs (*.json) in {}", dir.display());
    }

    use rayon::prelude::*;
    let entries: Vec<SuiteEntry> = files
        .par_iter()
        .map(|path| {
            let outcome = crate::config::load_config(path)
                .and_then(|cfg| run_experiment(&cfg, opts));
            let id = outcome
                .as_ref()
                .map(|r| r.experiment_id.clone())
                .unwrap_or_else(|_| {
                    path.file_stem()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_default()
                });
            SuiteEntry { file: path.clone(), id, outcome }
        })
        .collect();

    Ok(SuiteSummary { entries })
}
