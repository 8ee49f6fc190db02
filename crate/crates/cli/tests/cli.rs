use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_sanovlab"));
    c.env_remove("SANOVLAB_CAP");
    c
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn run(config: &Path, out: &Path, extra: &[&str]) -> Output {
    bin().arg("run").arg(config).arg("--out").arg(out).args(extra).output().unwrap()
}

fn validate(config: &Path) -> Output {
    bin().arg("validate").arg(config).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

struct CsvRow {
    n: usize,
    value: f64,
    exponent: f64,
    pass: bool,
}

fn read_csv(dir: &Path) -> Vec<CsvRow> {
    let text = std::fs::read_to_string(dir.join("rates.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,value,exponent,bound,pass"));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            assert_eq!(f.len(), 5);
            CsvRow { n: f[0].parse().unwrap(), value: f[1].parse().unwrap(), exponent: f[2].parse().unwrap(), pass: f[4] == "true" }
        })
        .collect()
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

#[test]
fn reference_in_family_has_vanishing_exponents() {
    let tmp = TempDir::new().unwrap();
    // eps_n >= 2 for every listed n, so M_n is all of A^n.
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"kind": "classical-sanov", "omega": [{"probs": [0.3, 0.7]}], "q": {"probs": [0.3, 0.7]},
            "n_list": [1, 10, 50, 100], "eps_schedule": {"scale": 10.0, "exponent": -0.3333333333333333}}"#,
    );
    let out = tmp.path().join("out");
    let o = run(&cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = read_csv(&out);
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.pass && r.exponent.abs() <= 1e-15));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["schema"], "sanovlab.report/v1");
    assert_eq!(report["summary"]["h_omega"], 0.0);
    for row in report["rows"].as_array().unwrap() {
        assert_eq!(row["i_n"], 0.0);
        for check in row["checks"].as_array().unwrap() {
            assert!(check.get("bound").is_some());
        }
    }

    // With the default schedule the exponents only vanish in the limit.
    let cfg = write_config(
        tmp.path(),
        "d.json",
        r#"{"kind": "classical-sanov", "omega": [{"probs": [0.3, 0.7]}], "q": {"probs": [0.3, 0.7]},
            "n_list": [10, 100, 1000, 4000]}"#,
    );
    assert_eq!(run(&cfg, &out, &[]).status.code(), Some(0));
    let rows = read_csv(&out);
    assert!(rows.windows(2).all(|w| w[1].exponent.abs() < w[0].exponent.abs()));
    assert!(rows[3].exponent.abs() < 1e-6);
}

#[test]
fn commuting_quantum_run_matches_classical_run() {
    let tmp = TempDir::new().unwrap();
    let classical = write_config(
        tmp.path(),
        "c.json",
        r#"{"kind": "classical-sanov", "omega": [{"probs": [0.25, 0.75]}, {"probs": [0.9, 0.1]}],
            "q": {"probs": [0.55, 0.45]}, "n_list": [1, 2, 4, 8, 16, 64, 256]}"#,
    );
    let quantum = write_config(
        tmp.path(),
        "q.json",
        r#"{"kind": "quantum-sanov", "psi_set": [{"diagonal": [0.25, 0.75]}, {"diagonal": [0.9, 0.1]}],
            "phi": {"diagonal": [0.55, 0.45]}, "l": 1, "n_list": [1, 2, 4, 8, 16, 64, 256]}"#,
    );
    let (co, qo) = (tmp.path().join("c"), tmp.path().join("q"));
    assert_eq!(run(&classical, &co, &[]).status.code(), Some(0));
    let o = run(&quantum, &qo, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (c, q) = (read_csv(&co), read_csv(&qo));
    assert_eq!(c.len(), q.len());
    for (a, b) in c.iter().zip(&q) {
        assert_eq!(a.n, b.n);
        assert!((a.value - b.value).abs() <= 1e-10);
        assert!((a.exponent - b.exponent).abs() <= 1e-10);
        assert_eq!(a.pass, b.pass);
    }
}

#[test]
fn example2_csv_reproduces_decay_constant() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("e2");
    let o = run(&configs_dir().join("example2.json"), &out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows: Vec<_> = read_csv(&out).into_iter().filter(|r| (9..=21).contains(&r.n)).collect();
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.value.ln())).collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let c = std::f64::consts::FRAC_PI_4 + 0.5 * std::f64::consts::LN_2;
    assert!((slope + c).abs() <= 0.10 * c, "slope {slope}");
}

#[test]
fn identical_runs_give_identical_csv() {
    let tmp = TempDir::new().unwrap();
    for name in ["example2.json", "hiai_petz.json", "quantum_qubits.json"] {
        let cfg = configs_dir().join(name);
        let a = tmp.path().join(format!("{name}-a"));
        let b = tmp.path().join(format!("{name}-b"));
        assert_eq!(run(&cfg, &a, &["--threads", "1"]).status.code(), Some(0));
        assert_eq!(run(&cfg, &b, &["--threads", "3"]).status.code(), Some(0));
        let ca = std::fs::read(a.join("rates.csv")).unwrap();
        let cb = std::fs::read(b.join("rates.csv")).unwrap();
        assert_eq!(ca, cb, "{name}");
    }
}

#[test]
fn seed_changes_random_pairs() {
    let tmp = TempDir::new().unwrap();
    let a = write_config(tmp.path(), "a.json", r#"{"kind": "hiai-petz", "random_pairs": 5, "seed": 1}"#);
    let b = write_config(tmp.path(), "b.json", r#"{"kind": "hiai-petz", "random_pairs": 5, "seed": 2}"#);
    assert_eq!(run(&a, &tmp.path().join("a"), &[]).status.code(), Some(0));
    assert_eq!(run(&b, &tmp.path().join("b"), &[]).status.code(), Some(0));
    let ca = std::fs::read(tmp.path().join("a/rates.csv")).unwrap();
    let cb = std::fs::read(tmp.path().join("b/rates.csv")).unwrap();
    assert_ne!(ca, cb);
}

#[test]
fn shipped_configs_validate() {
    for entry in std::fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        let o = validate(&path);
        assert_eq!(o.status.code(), Some(0), "{}: {}", path.display(), stderr(&o));
    }
}

#[test]
fn non_psd_matrix_is_rejected_with_its_eigenvalue() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "bad.json",
        "{\n  \"kind\": \"neyman-pearson\",\n  \"psi\": {\"bloch\": [0, 0, 0.5]},\n  \"phi\": {\"matrix\": {\"re\": [[1.2, 0], [0, -0.2]]}},\n  \"n_list\": [1]\n}",
    );
    let o = validate(&cfg);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("negative eigenvalue -2e-1"), "{err}");
    assert!(err.contains("line 4"), "{err}");
    assert!(err.contains("`phi`"), "{err}");
}

#[test]
fn long_bloch_vector_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "bad.json",
        "{\"kind\": \"quantum-sanov\",\n \"psi_set\": [{\"bloch\": [0, 0, 0.5]},\n   {\"bloch\": [0.72, 0, 0.96]}],\n \"phi\": {\"bloch\": [0, 0, 0]}, \"l\": 1, \"n_list\": [1, 2]}",
    );
    let o = validate(&cfg);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("length 1.2"), "{err}");
    assert!(err.contains("line 3"), "{err}");
    assert!(err.contains("psi_set[1]"), "{err}");
    assert_eq!(run(&cfg, &tmp.path().join("out"), &[]).status.code(), Some(2));
}

#[test]
fn syntax_and_schema_errors_report_lines() {
    let tmp = TempDir::new().unwrap();
    let syntax = write_config(tmp.path(), "s.json", "{\n  \"kind\": \"example2\",\n  \"n_list\": [5, 7,\n}");
    let o = validate(&syntax);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));

    let unknown = write_config(tmp.path(), "u.json", "{\n  \"kind\": \"example2\",\n  \"n_lst\": [5]\n}");
    let o = validate(&unknown);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown field `n_lst`") && stderr(&o).contains("line 3"), "{}", stderr(&o));

    let missing = write_config(tmp.path(), "m.json", "{\"kind\": \"example1\", \"delta\": 0.1, \"n_list\": [1]}");
    let o = validate(&missing);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`v` is required"), "{}", stderr(&o));

    let even = write_config(tmp.path(), "e.json", "{\"kind\": \"example2\",\n\"n_list\": [5,\n 8]}");
    let o = validate(&even);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3") && stderr(&o).contains("odd"), "{}", stderr(&o));

    assert_eq!(validate(&tmp.path().join("absent.json")).status.code(), Some(2));
}

#[test]
fn cap_precedence_and_exit_code() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "np.json",
        r#"{"kind": "neyman-pearson", "psi": {"bloch": [0.3, 0, 0.4]}, "phi": {"bloch": [0, 0, 0.2]},
            "n_list": [1, 3], "cap": 4}"#,
    );
    let out = tmp.path().join("out");
    let o = run(&cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("required dimension 8"), "{}", stderr(&o));

    let o = bin().arg("run").arg(&cfg).arg("--out").arg(&out).env("SANOVLAB_CAP", "8").output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let o = bin()
        .arg("run")
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .args(["--cap", "2"])
        .env("SANOVLAB_CAP", "64")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("--cap 8"), "{}", stderr(&o));
}
