use bayesopt::{FirstIterationSnapshot, RunReport};
use bayesopt_web::api::{first_iteration, objective_curve, run_optimization, DemoSettings};

#[test]
fn empty_settings_use_defaults() {
    let s = DemoSettings::parse("").unwrap();
    assert_eq!(s.config().unwrap(), bayesopt::BoConfig::default());
}

#[test]
fn curve_spans_bounds() {
    let v: serde_json::Value = serde_json::from_str(&objective_curve(r#"{"bounds": [-1, 1]}"#, 11).unwrap()).unwrap();
    let x = v["x"].as_array().unwrap();
    assert_eq!(x.len(), 11);
    assert_eq!(x[0].as_f64(), Some(-1.0));
    assert_eq!(x[10].as_f64(), Some(1.0));
    assert_eq!(v["f"][5].as_f64(), Some(0.0));
}

#[test]
fn first_iteration_matches_run() {
    let settings = r#"{"acquisition": "mpi", "restarts": 5, "iterations": 3}"#;
    let snap: FirstIterationSnapshot = serde_json::from_str(&first_iteration(settings).unwrap()).unwrap();
    let run: RunReport = serde_json::from_str(&run_optimization(settings).unwrap()).unwrap();
    assert_eq!(run.trials.len(), 3);
    assert_eq!(run.trials[0].x_proposed, snap.x_proposed);
    assert_eq!(snap.grid.len(), snap.acquisition.len());
}

#[test]
fn bad_settings_are_reported() {
    for bad in [
        r#"{"acquisition": "ucb"}"#,
        r#"{"iterations": 0}"#,
        r#"{"bounds": [2, -2]}"#,
        r#"{"noise_std": -1}"#,
        r#"{"lengthscale": 0}"#,
        r#"{"colour": "red"}"#,
        "not json",
    ] {
        assert!(run_optimization(bad).is_err(), "{bad}");
    }
}
