use std::fs;
use std::path::Path;

use pxp_tdvp::cli::{main_with_args, Document, EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK};
use tempfile::TempDir;

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn run(args: &[&str]) -> i32 {
    main_with_args(std::iter::once("pxp-tdvp").chain(args.iter().copied()))
}

const Z2_HALF: &str = "\
model.K = 2
model.J = 0.5
model.Omega = 1
state.theta = 1.5707963267948966, 1.5707963267948966
";

fn value(doc: &Document, q: &str) -> f64 {
    doc.table
        .rows
        .iter()
        .find(|r| r[0] == pxp_tdvp::cli::Cell::Text(q.into()))
        .and_then(|r| r[1].as_f64())
        .unwrap()
}

#[test]
fn leakage_at_half_filling() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "l.cfg", Z2_HALF);
    let out = dir.path().join("l.csv");
    assert_eq!(run(&["leakage", "--config", &cfg, "--output", out.to_str().unwrap()]), EXIT_OK);
    let doc = Document::from_csv(&fs::read_to_string(&out).unwrap()).unwrap();
    assert!((value(&doc, "gamma2") - 1.0 / 12.0).abs() < 1e-12);
    assert!((value(&doc, "gamma2_spin_half") - 1.0 / 12.0).abs() < 1e-12);
}

#[test]
fn evolve_t_end_zero_gives_one_row() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "e.cfg", &format!("{Z2_HALF}run.t_end = 0\n"));
    let out = dir.path().join("e.csv");
    assert_eq!(run(&["evolve", "--config", &cfg, "--output", out.to_str().unwrap()]), EXIT_OK);
    let text = fs::read_to_string(&out).unwrap();
    let doc = Document::from_csv(&text).unwrap();
    assert_eq!(doc.table.rows.len(), 1);
    assert_eq!(
        doc.table.columns,
        ["t", "theta_1", "theta_2", "phi_1", "phi_2", "energy", "gamma2", "accumulated_leakage"]
    );
    assert!(!text.contains('\r'));
}

#[test]
fn trajectory_round_trip_is_exact() {
    let dir = TempDir::new().unwrap();
    let body = "model.K = 3\nmodel.J = 1\nmodel.Omega = 1, 0.9, 1.1\nmodel.Delta = 0.2\n\
                state.theta = 1, 1.3, 1.1\nstate.phi = 0.3, -0.2, 0.1\nrun.t_end = 0.5\nrun.dt = 0.01\n";
    let cfg = write(dir.path(), "e.cfg", body);
    for ext in ["csv", "json"] {
        let out = dir.path().join(format!("t.{ext}"));
        assert_eq!(run(&["evolve", "--config", &cfg, "--output", out.to_str().unwrap()]), EXIT_OK);
        let text = fs::read_to_string(&out).unwrap();
        let doc = if ext == "csv" { Document::from_csv(&text) } else { Document::from_json(&text) }.unwrap();
        assert_eq!(doc.table.rows.len(), 51);
        // re-run from the embedded config: identical numbers
        let again: String = doc.config.iter().map(|(k, v)| format!("{k} = {v}\n")).collect();
        let cfg2 = write(dir.path(), &format!("again_{ext}.cfg"), &again);
        let out2 = dir.path().join(format!("t2.{ext}"));
        assert_eq!(run(&["evolve", "--config", &cfg2, "--output", out2.to_str().unwrap()]), EXIT_OK);
        assert_eq!(fs::read_to_string(&out2).unwrap(), text);
    }
}

#[test]
fn config_errors_exit_2_with_line() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "bad.cfg", "model.K = 2\nmodel.J = 0.5\nmodel.Omega = x\n");
    assert_eq!(run(&["evolve", "--config", &cfg]), EXIT_CONFIG);
    let cfg = write(dir.path(), "bad2.cfg", "model.K = 2\nmodel.J = 0.7\nmodel.Omega = 1\nstate.theta = 1\n");
    assert_eq!(run(&["leakage", "--config", &cfg]), EXIT_CONFIG);
    assert_eq!(run(&["evolve"]), EXIT_CONFIG);
    assert_eq!(run(&["evolve", "--config", "/nonexistent/x.cfg"]), EXIT_CONFIG);
}

#[test]
fn pole_exits_3_with_partial_output() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "p.cfg", "model.K = 2\nmodel.J = 1\nmodel.Omega = 1\nstate.theta = 0, 1\nrun.t_end = 1\n");
    let out = dir.path().join("p.csv");
    assert_eq!(run(&["evolve", "--config", &cfg, "--output", out.to_str().unwrap()]), EXIT_NUMERIC);
    let doc = Document::from_csv(&fs::read_to_string(&out).unwrap()).unwrap();
    assert!(doc.meta.contains(&("termination".into(), "pole_event".into())));
}

#[test]
fn sweep_rows_in_grid_order_for_any_thread_count() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "s.cfg",
        "model.K = 2\nmodel.J = 0.5\nmodel.Omega = 1\nstate.theta = 1, 2\nrun.t_end = 0.2\nrun.dt = 0.01\n\
         sweep.axis1.name = model.J\nsweep.axis1.values = 1.5, 0.5, 1\n\
         sweep.axis2.name = state.theta.2\nsweep.axis2.start = 0.5\nsweep.axis2.stop = 3.141592653589793\nsweep.axis2.count = 3\n",
    );
    let mut outputs = vec![];
    for threads in ["1", "4"] {
        let out = dir.path().join(format!("s{threads}.csv"));
        assert_eq!(
            run(&["sweep", "--config", &cfg, "--threads", threads, "--output", out.to_str().unwrap()]),
            EXIT_OK
        );
        outputs.push(fs::read_to_string(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let doc = Document::from_csv(&outputs[0]).unwrap();
    assert_eq!(doc.table.rows.len(), 9);
    assert_eq!(doc.table.column("model.J").unwrap(), [1.5, 1.5, 1.5, 0.5, 0.5, 0.5, 1.0, 1.0, 1.0]);
    let causes: Vec<_> = doc.table.rows.iter().map(|r| r.last().unwrap().clone()).collect();
    assert_eq!(causes[2], pxp_tdvp::cli::Cell::Text("pole_event".into()));
    assert_eq!(causes[0], pxp_tdvp::cli::Cell::Text("completed".into()));
}
