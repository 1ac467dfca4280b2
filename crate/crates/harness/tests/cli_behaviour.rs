//! Behavioural tests of the experiment runner: determinism, report formats,
//! hypothesis gating, and suite semantics.

use std::path::PathBuf;

use asymreg_harness::config::{
    ExperimentConfig, LambdaSpec, MapSpec, ModulusSpec, PointSpec, SSpec, ScheduleSpec, SetSpec,
    SpaceSpec,
};
use asymreg_harness::experiment::{run_experiment, run_suite, RunOptions};
use asymreg_harness::report::{emit_report, ExperimentReport, Format};

fn small_rotation_config() -> ExperimentConfig {
    ExperimentConfig {
        id: "rotation_smoke".into(),
        space: SpaceSpec::Euclidean { dim: 2 },
        map: MapSpec::Rotation {
            center: PointSpec::Coords(vec![0.0, 0.0]),
            angle: std::f64::consts::FRAC_PI_2,
        },
        domain: SetSpec::Whole,
        modulus: ModulusSpec::Cat0,
        schedule: ScheduleSpec {
            lambda: LambdaSpec::Const { value: 0.5 },
            s: SSpec::Zero,
            l: None,
            n0: None,
            theta_scale: None,
        },
        x0: PointSpec::Coords(vec![1.0, 0.0]),
        b: Some(1.0),
        d_c: None,
        epsilons: vec![1.0, 0.3],
        formulas: None,
        horizon: None,
        seed: 5,
    }
}

fn identity_config() -> ExperimentConfig {
    ExperimentConfig {
        id: "identity_smoke".into(),
        map: MapSpec::Identity,
        ..small_rotation_config()
    }
}

#[test]
fn same_config_and_seed_produce_identical_json() {
    let cfg = small_rotation_config();
    let opts = RunOptions::default();
    let a = run_experiment(&cfg, &opts).unwrap();
    let b = run_experiment(&cfg, &opts).unwrap();
    assert_eq!(a.to_json(), b.to_json());
}

#[test]
fn report_round_trips_through_json() {
    let report = run_experiment(&small_rotation_config(), &RunOptions::default()).unwrap();
    let text = report.to_json();
    let back: ExperimentReport = serde_json::from_str(&text).unwrap();
    // wallclock is deliberately excluded from the serialized form.
    let mut orig = report.clone();
    orig.wallclock_ms = 0;
    assert_eq!(back, orig);
}

#[test]
fn csv_has_one_row_per_formula_and_epsilon() {
    let report = run_experiment(&small_rotation_config(), &RunOptions::default()).unwrap();
    let csv = report.to_csv().unwrap();
    let mut lines = csv.lines();
    let header = lines.next().unwrap();
    assert_eq!(
        header,
        "experiment_id,formula,epsilon,bound,guarantee_kind,first_hit,tail_ok,\
         lemma41_violations,wallclock_ms"
    );
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), report.certificates.len());
    // 2 epsilons x 6 applicable formulas (ty, tx, afp, regularity, factored, km).
    assert_eq!(rows.len(), 12);
}

#[test]
fn emit_report_writes_requested_formats() {
    let report = run_experiment(&small_rotation_config(), &RunOptions::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let files = emit_report(&report, Format::Both, dir.path()).unwrap();
    assert_eq!(files.len(), 2);
    let json = std::fs::read_to_string(&files[0]).unwrap();
    assert_eq!(json, report.to_json());
}

#[test]
fn identity_map_hits_every_accuracy_at_step_zero() {
    let report = run_experiment(&identity_config(), &RunOptions::default()).unwrap();
    assert!(report.pass);
    for cert in &report.certificates {
        assert_eq!(cert.first_hit, Some(0), "formula {}", cert.formula);
        assert!(cert.pass);
    }
}

#[test]
fn unit_lambda_with_ishikawa_rates_is_a_config_error() {
    use asymreg_harness::config::FormulaSpec;
    let mut cfg = small_rotation_config();
    cfg.schedule.lambda = LambdaSpec::Const { value: 1.0 };
    cfg.formulas = Some(vec![FormulaSpec::Regularity]);
    let err = run_experiment(&cfg, &RunOptions::default()).unwrap_err();
    let msg = format!("{err:#}");
    assert!(msg.contains("lambda(1-lambda)"), "unexpected message: {msg}");

    // Without an explicit request the config is rejected because nothing
    // applies.
    cfg.formulas = None;
    let err = run_experiment(&cfg, &RunOptions::default()).unwrap_err();
    assert!(format!("{err:#}").contains("no rate formula applies"));
}

#[test]
fn horizon_override_below_requirement_is_rejected() {
    let cfg = small_rotation_config();
    let opts = RunOptions { seed: None, horizon: Some(10) };
    let err = run_experiment(&cfg, &opts).unwrap_err();
    assert!(format!("{err:#}").contains("horizon"));
}

#[test]
fn expansive_map_fails_validation_and_suite_continues() {
    let dir = tempfile::tempdir().unwrap();
    let good = small_rotation_config();
    std::fs::write(
        dir.path().join("a_good.json"),
        serde_json::to_string_pretty(&good).unwrap(),
    )
    .unwrap();

    let mut sabotaged = small_rotation_config();
    sabotaged.id = "sabotaged".into();
    sabotaged.map = MapSpec::Scale {
        center: PointSpec::Coords(vec![0.0, 0.0]),
        factor: 2.0,
    };
    std::fs::write(
        dir.path().join("b_sabotaged.json"),
        serde_json::to_string_pretty(&sabotaged).unwrap(),
    )
    .unwrap();

    std::fs::write(dir.path().join("c_corrupt.json"), "{ not json").unwrap();

    let summary = run_suite(dir.path(), &RunOptions::default()).unwrap();
    assert_eq!(summary.entries.len(), 3);
    assert!(!summary.all_pass());
    assert!(matches!(&summary.entries[0].outcome, Ok(r) if r.pass));
    let err = summary.entries[1].outcome.as_ref().unwrap_err();
    assert!(format!("{err:#}").contains("nonexpansiveness"));
    assert!(summary.entries[2].outcome.is_err());
}

#[test]
fn empty_suite_directory_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let err = run_suite(dir.path(), &RunOptions::default()).unwrap_err();
    assert!(format!("{err:#}").contains("no experiment configs"));
}

#[test]
fn orbit_dump_has_expected_columns() {
    let cfg = small_rotation_config();
    let opts = RunOptions::default();
    let built = asymreg_harness::experiment::build_and_validate(&cfg, &opts).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("orbit.csv");
    asymreg_harness::report::write_orbit_dump(
        &built.space,
        &built.map,
        &built.sched,
        &built.x0,
        64,
        built.map.known_fixed_point.as_ref(),
        serde_json::json!({"experiment_id": cfg.id}),
        &path,
    )
    .unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "n,d_x_tx,d_x_ty,d_x_p");
    assert_eq!(lines.count(), 64);
    assert!(path.with_extension("meta.json").exists());
}

#[test]
fn bundled_configs_parse_and_validate() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut names = Vec::new();
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            let cfg = asymreg_harness::load_config(&path).unwrap();
            asymreg_harness::experiment::build_and_validate(&cfg, &RunOptions::default())
                .unwrap_or_else(|e| panic!("{}: {e:#}", path.display()));
            names.push(cfg.id);
        }
    }
    assert_eq!(names.len(), 12, "bundled suite should have 12 experiments");
}
