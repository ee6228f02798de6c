use std::fs;
use std::path::Path;
use std::process::Command;

use nlground_cli::{parse_config, CliError};

fn write(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn nlground(config: &Path, out: &Path, extra: &[&str]) -> (i32, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_nlground"))
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .unwrap();
    let text = String::from_utf8_lossy(&o.stdout).to_string() + &String::from_utf8_lossy(&o.stderr);
    (o.status.code().unwrap(), text)
}

fn summary(out: &Path) -> Vec<(String, String)> {
    let mut r = csv::Reader::from_path(out.join("summary.csv")).unwrap();
    r.records().map(|x| {
        let x = x.unwrap();
        (x[0].to_string(), x[1].to_string())
    })
    .collect()
}

fn value(rows: &[(String, String)], key: &str) -> String {
    rows.iter().find(|(k, _)| k == key).unwrap_or_else(|| panic!("no {key}")).1.clone()
}

fn num(rows: &[(String, String)], key: &str) -> f64 {
    value(rows, key).parse().unwrap()
}

const LINE_Q4: &str = r#"{
  "task": "solve",
  "grid": { "dim": 1, "kind": "line1d", "r_dom": 20.0, "h": 0.01 },
  "exponent": { "p_inf": 4.0 },
  "potential": { "v_inf": 1.0 }
}"#;

#[test]
fn minimal_config_gets_defaults() {
    let cfg = parse_config(LINE_Q4).unwrap();
    assert_eq!(cfg.raw.solver.max_iter, 5000);
    assert_eq!(cfg.raw.solver.tol_grad, 1e-7);
    assert_eq!(cfg.raw.exponent.tail_tol, 0.05);
    assert_eq!(cfg.raw.output.dir, "out");
    assert_eq!(cfg.raw.find_min_a.floor, 2.1);
    assert_eq!(cfg.spec.exponent().p_minus(), 4.0);
    assert_eq!(cfg.grid.len(), 4001);
}

fn clamp_config(clamp: &str) -> String {
    format!(
        r#"{{
  "task": "solve",
  "grid": {{ "dim": 1, "kind": "line1d", "r_dom": 50.0, "h": 0.05 }},
  "exponent": {{ "expr": "4 - 2/(1+r)", "p_inf": 4.0 {clamp} }},
  "potential": {{ "v_inf": 1.0 }}
}}"#
    )
}

#[test]
fn clamped_exponent_meets_the_hypotheses() {
    let cfg = parse_config(&clamp_config(r#", "clamp_floor": 2.1"#)).unwrap();
    let p = cfg.spec.exponent();
    assert_eq!(p.p_minus(), 2.1);
    // re-evaluate the clamped expression on every node
    for (i, &v) in p.values().iter().enumerate() {
        let r = cfg.grid.radius(i);
        assert_eq!(v, (4.0 - 2.0 / (1.0 + r)).max(2.1));
    }
    assert!(p.p_plus() <= 4.0);
    let Err(e) = parse_config(&clamp_config("")) else { panic!("p = 2 at the origin must be rejected") };
    assert_eq!(e.exit_code(), 2);
    assert!(e.to_string().starts_with("exponent:"), "{e}");
}

#[test]
fn unknown_function_reports_key_and_offset() {
    let text = LINE_Q4.replace(r#""p_inf": 4.0 }"#, r#""expr": "foo(r)", "p_inf": 4.0 }"#);
    let Err(CliError::Config { key, message }) = parse_config(&text) else { panic!() };
    assert_eq!(key, "exponent.expr");
    assert!(message.contains("offset 0"), "{message}");
    assert!(message.contains("foo"));
}

#[test]
fn schema_errors_name_the_key_path() {
    let text = LINE_Q4.replace(r#""h": 0.01"#, r#""h": "small""#);
    let Err(e) = parse_config(&text) else { panic!() };
    assert!(e.to_string().starts_with("grid.h:"), "{e}");
    let text = LINE_Q4.replace(r#""v_inf": 1.0"#, r#""v_inf": 1.0, "colour": 3"#);
    let Err(e) = parse_config(&text) else { panic!() };
    assert!(e.to_string().contains("colour"), "{e}");
    let text = LINE_Q4.replace(r#""task": "solve""#, r#""task": "optimise""#);
    let Err(e) = parse_config(&text) else { panic!() };
    assert!(e.to_string().starts_with("task:"), "{e}");
    let text = LINE_Q4.replace(r#""task": "solve""#, r#""task": "trial-bound""#);
    let Err(e) = parse_config(&text) else { panic!() };
    assert!(e.to_string().starts_with("trial:"), "{e}");
}

fn sech_oracle() -> f64 {
    // lambda of sqrt(2) sech(x) for p = 4, V = 1 by fine trapezoid quadrature
    let (l, n) = (30.0, 600_000);
    let h = 2.0 * l / n as f64;
    let (mut e, mut r) = (0.0, 0.0);
    for i in 0..=n {
        let x = -l + i as f64 * h;
        let wt = if i == 0 || i == n { 0.5 * h } else { h };
        let w = 2f64.sqrt() / x.cosh();
        let dw = -w * x.tanh();
        e += wt * (dw * dw + w * w);
        r += wt * w.powi(4);
    }
    e / (r / 4.0).sqrt()
}

#[test]
fn solve_task_reproduces_the_line_soliton() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.json", LINE_Q4);
    let out = tmp.path().join("out");
    let (code, text) = nlground(&cfg, &out, &["--quiet"]);
    assert_eq!(code, 0, "{text}");
    assert!(text.is_empty());
    let s = summary(&out);
    let oracle = sech_oracle();
    assert!((num(&s, "lambda") - oracle).abs() <= 1e-3 * oracle);
    assert_eq!(value(&s, "converged"), "true");
    assert_eq!(value(&s, "history_monotone"), "true");
    let header = fs::read_to_string(out.join("w.csv")).unwrap();
    assert!(header.starts_with("index,coord1,value\n"));
    assert!(out.join("report.txt").exists());
    // the resolved config replays to the same result
    let again = tmp.path().join("again");
    let (code, _) = nlground(&out.join("config.json"), &again, &["--quiet"]);
    assert_eq!(code, 0);
    assert_eq!(fs::read(out.join("summary.csv")).unwrap(), fs::read(again.join("summary.csv")).unwrap());
}

#[test]
fn verify_lemmas_prints_a_full_table() {
    let tmp = tempfile::tempdir().unwrap();
    let body = r#"{
  "task": "verify-lemmas",
  "grid": { "dim": 1, "kind": "line1d", "r_dom": 20.0, "h": 0.05 },
  "exponent": { "expr": "3.5 - 0.8*exp(-r^2)", "p_inf": 3.5 },
  "potential": { "expr": "1 + exp(-r)", "v_inf": 1.0 },
  "verify": { "samples": 50 }
}"#;
    let cfg = write(tmp.path(), "c.json", body);
    let out = tmp.path().join("out");
    let (code, text) = nlground(&cfg, &out, &[]);
    assert_eq!(code, 0, "{text}");
    let table = fs::read_to_string(out.join("lemmas.csv")).unwrap();
    for name in [
        "modular-lower-bound",
        "modular-upper-bound",
        "unit-modular-at-norm",
        "cross-modular-bound",
        "modular-difference-bound",
        "translate-rho-limit",
        "translate-norm-limit",
        "translate-energy-limit",
    ] {
        let row = table.lines().find(|l| l.starts_with(name)).unwrap_or_else(|| panic!("{name}"));
        assert!(row.ends_with(",pass"), "{row}");
        assert!(text.contains(name));
    }
}

#[test]
fn check_criterion_on_constant_data_is_not_strict() {
    let tmp = tempfile::tempdir().unwrap();
    let body = LINE_Q4.replace("solve", "check-criterion").replace("0.01", "0.02");
    let cfg = write(tmp.path(), "c.json", &body);
    let out = tmp.path().join("out");
    let (code, text) = nlground(&cfg, &out, &["--quiet"]);
    assert_eq!(code, 0, "{text}");
    let s = summary(&out);
    assert_eq!(value(&s, "strict"), "false");
    assert!(num(&s, "margin").abs() <= 0.02 * num(&s, "threshold"));
    for key in ["lambda1_upper", "lambda1_inf", "threshold", "residual", "iterations"] {
        value(&s, key);
    }
}

#[test]
fn seeded_runs_write_identical_files() {
    let tmp = tempfile::tempdir().unwrap();
    let body = r#"{
  "task": "solve",
  "grid": { "dim": 1, "kind": "line1d", "r_dom": 12.0, "h": 0.02 },
  "exponent": { "expr": "3 + 0.4*exp(-r^2)", "p_inf": 3.0 },
  "potential": { "expr": "1 - 0.3*exp(-r^2)", "v_inf": 1.0 },
  "solver": { "init_perturbation": 0.3 }
}"#;
    let cfg = write(tmp.path(), "c.json", body);
    let (a, b, c) = (tmp.path().join("a"), tmp.path().join("b"), tmp.path().join("c"));
    assert_eq!(nlground(&cfg, &a, &["--seed", "7", "--quiet"]).0, 0);
    assert_eq!(nlground(&cfg, &b, &["--seed", "7", "--quiet"]).0, 0);
    assert_eq!(nlground(&cfg, &c, &["--seed", "8", "--quiet"]).0, 0);
    for f in ["w.csv", "summary.csv", "history.csv", "report.txt"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    assert_ne!(fs::read(a.join("history.csv")).unwrap(), fs::read(c.join("history.csv")).unwrap());
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let stalled = LINE_Q4.replace(r#""v_inf": 1.0 }"#, r#""v_inf": 1.0 }, "solver": { "max_iter": 1 }"#);
    assert_eq!(nlground(&write(tmp.path(), "a.json", &stalled), &out, &["--quiet"]).0, 3);
    let shallow = r#"{
  "task": "find-min-a",
  "grid": { "dim": 1, "kind": "line1d", "r_dom": 20.0, "h": 0.02 },
  "exponent": { "p_inf": 4.0 },
  "potential": { "v_inf": 1.0 },
  "trial": { "psi": "r", "radius": 1.0 },
  "find_min_a": { "a0": 0.125, "a_max": 0.25 }
}"#;
    assert_eq!(nlground(&write(tmp.path(), "b.json", shallow), &out, &["--quiet"]).0, 4);
    assert_eq!(value(&summary(&out), "found"), "false");
    let broken = LINE_Q4.replace("20.0", "-1.0");
    let (code, text) = nlground(&write(tmp.path(), "c.json", &broken), &out, &[]);
    assert_eq!(code, 2);
    assert!(text.contains("grid:"), "{text}");
    let missing = tmp.path().join("nope.json");
    assert_eq!(nlground(&missing, &out, &[]).0, 2);
    let radial_shift = r#"{
  "task": "translate-experiment",
  "grid": { "dim": 2, "kind": "radialNd", "r_dom": 10.0, "h": 0.05 },
  "exponent": { "p_inf": 3.0 },
  "potential": { "v_inf": 1.0 },
  "translate": { "u_expr": "max(1 - r^2, 0)^3", "shifts": [[1.0]] }
}"#;
    assert_eq!(nlground(&write(tmp.path(), "d.json", radial_shift), &out, &[]).0, 2);
    let off_grid = radial_shift.replace("radialNd", "line1d").replace("\"dim\": 2", "\"dim\": 1").replace("[[1.0]]", "[[9.5]]");
    assert_eq!(nlground(&write(tmp.path(), "e.json", &off_grid), &out, &[]).0, 2);
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            nlground_cli::load_config(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            seen += 1;
        }
    }
    assert!(seen >= 8);
}
