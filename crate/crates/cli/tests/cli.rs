use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use stroblim::csv_io::TrajectoryTable;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stroblim"))
}

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn bundled(n: usize) -> PathBuf {
    scenarios().join(format!("example{n}.scenario"))
}

fn run(args: &[&str]) -> Output {
    bin()
        .args(args)
        .env("STROBLIM_THREADS", "2")
        .output()
        .expect("spawn")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

const SMALL: &str = r#"{
  "name": "small",
  "hamiltonian": { "builder": "swap" },
  "projectors": [["u"]],
  "selected_index": 0,
  "gamma": 5.0,
  "tau": 0.04,
  "initial_sys": [{ "population": 0.2 }],
  "initial_pr": "u",
  "t_max": 2.0
}"#;

fn write_scenario(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn run_writes_one_file_per_method() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["run", p(&bundled(1)), "--out-dir", p(dir.path())]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    for f in ["example1_exact.csv", "example1_limit.csv", "example1.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let exact = TrajectoryTable::read(&dir.path().join("example1_exact.csv")).unwrap();
    assert_eq!(
        exact.columns,
        [
            "p_up",
            "purity",
            "trace_unnormalized",
            "p_err",
            "r1",
            "r2",
            "r3"
        ]
    );
    assert_eq!(exact.rows.len(), 4 * 251);
    assert!(exact.rows.iter().all(|r| r.method == "exact"));
}

#[test]
fn example4_run_has_three_methods() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "run",
        p(&bundled(4)),
        "--out-dir",
        p(dir.path()),
        "--grid-points",
        "21",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let all = TrajectoryTable::read(&dir.path().join("example4.csv")).unwrap();
    let mut methods: Vec<&str> = all.rows.iter().map(|r| r.method.as_str()).collect();
    methods.dedup();
    assert_eq!(methods, ["exact", "closed_form", "limit"]);
    let trace = all.column("trace_unnormalized").unwrap();
    assert!(all
        .rows
        .iter()
        .all(|r| (r.values[trace] - 1.0).abs() < 1e-10));
    let t: Vec<f64> = all
        .rows
        .iter()
        .filter(|r| r.method == "limit" && r.state == "alpha2=0.3")
        .map(|r| r.t)
        .collect();
    assert_eq!(t.len(), 21);
    assert!((t[20] - 10.0).abs() < 1e-12);
}

#[test]
fn emitted_csv_round_trips_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        "m.scenario",
        &SMALL.replace(
            "\"t_max\": 2.0",
            "\"t_max\": 2.0, \"outputs\": [\"matrix\", \"probabilities\"]",
        ),
    );
    assert_eq!(
        code(&run(&["run", p(&path), "--out-dir", p(dir.path())])),
        0
    );
    let text = fs::read_to_string(dir.path().join("small.csv")).unwrap();
    assert!(text.starts_with("t,p_up,purity,trace_unnormalized,p_err,rho_0_0_re,rho_0_0_im,"));
    assert!(text.ends_with('\n'));
    let table = TrajectoryTable::read_from(text.as_bytes()).unwrap();
    assert_eq!(table.to_csv_string(), text);
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        assert_eq!(
            code(&run(&["run", p(&bundled(2)), "--out-dir", p(d.path())])),
            0
        );
        let csv = d.path().join("example2.csv");
        assert_eq!(
            code(&run(&["plot", p(&csv), p(&d.path().join("b.svg"))])),
            0
        );
    }
    for f in ["example2.csv", "b.svg"] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn inconsistent_omega_is_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        "bad.scenario",
        &SMALL.replace("\"tau\": 0.04", "\"tau\": 0.04, \"omega\": 2.0"),
    );
    let out = run(&["run", p(&path), "--out-dir", p(dir.path())]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("omega"), "{}", stderr(&out));
    assert!(!dir.path().join("small.csv").exists());
}

#[test]
fn schema_errors_name_line_or_key() {
    let dir = tempfile::tempdir().unwrap();
    let typo = write_scenario(
        dir.path(),
        "typo.scenario",
        &SMALL.replace("\"t_max\"", "\"tmax\""),
    );
    let out = run(&["run", p(&typo)]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("line 10"), "{}", stderr(&out));

    let key = write_scenario(
        dir.path(),
        "key.scenario",
        &SMALL.replace("\"swap\"", "\"ising\""),
    );
    let out = run(&["run", p(&key)]);
    assert_eq!(code(&out), 2);
    assert!(
        stderr(&out).contains("hamiltonian.builder"),
        "{}",
        stderr(&out)
    );

    let out = run(&["run", p(&dir.path().join("missing.scenario"))]);
    assert_eq!(code(&out), 2);
}

#[test]
fn usage_errors_are_exit_2() {
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["run"])), 2);
    assert_eq!(
        code(&run(&["run", p(&bundled(1)), "--grid-points", "1"])),
        2
    );
    let out = bin()
        .args(["sweep", p(&bundled(1)), "--tau", "0.04,0.02"])
        .env("STROBLIM_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn vanishing_probability_is_exit_3() {
    // γτ = π/2: the first SWAP moves |↓⟩ entirely out of the selected sector
    let dir = tempfile::tempdir().unwrap();
    let tau = std::f64::consts::PI / 10.0;
    let text = SMALL
        .replace("\"tau\": 0.04", &format!("\"tau\": {tau}"))
        .replace("{ \"population\": 0.2 }", "\"d\"")
        .replace(
            "\"selected_index\": 0,",
            "\"selected_index\": 0, \"methods\": [\"exact\"],",
        );
    let path = write_scenario(dir.path(), "zero.scenario", &text);
    let out = run(&["run", p(&path), "--out-dir", p(dir.path())]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    assert!(stderr(&out).contains("probability"));
}

#[test]
fn compare_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["compare", p(&bundled(1)), "--out-dir", p(dir.path())]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).trim_end().ends_with("PASS"));
    let dev = fs::read_to_string(dir.path().join("example1_deviation.csv")).unwrap();
    assert!(dev.starts_with("t,state,reference,candidate,p_up,trace_distance,bloch\n"));

    let out = run(&[
        "compare",
        p(&bundled(1)),
        "--out-dir",
        p(dir.path()),
        "--tolerance",
        "1e-6",
    ]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).trim_end().ends_with("FAIL"));
}

#[test]
fn compare_same_method_twice_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let text = SMALL.replace(
        "\"t_max\": 2.0",
        "\"t_max\": 2.0, \"methods\": [\"limit\", \"limit\"]",
    );
    let path = write_scenario(dir.path(), "twice.scenario", &text);
    let out = run(&[
        "compare",
        p(&path),
        "--out-dir",
        p(dir.path()),
        "--tolerance",
        "0",
    ]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(
        stdout(&out).contains("deviation 0.000000e0"),
        "{}",
        stdout(&out)
    );
}

#[test]
fn compare_needs_two_methods() {
    let dir = tempfile::tempdir().unwrap();
    let text = SMALL.replace("\"t_max\": 2.0", "\"t_max\": 2.0, \"mode\": \"limit-only\"");
    let path = write_scenario(dir.path(), "one.scenario", &text);
    assert_eq!(
        code(&run(&["compare", p(&path), "--out-dir", p(dir.path())])),
        2
    );
    assert_eq!(
        code(&run(&["run", p(&path), "--out-dir", p(dir.path())])),
        0
    );
    assert!(dir.path().join("small_limit.csv").exists());
    assert!(!dir.path().join("small_exact.csv").exists());
}

#[test]
fn sweep_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), "s.scenario", SMALL);
    let out = run(&[
        "sweep",
        p(&path),
        "--tau",
        "0.04",
        "--out-dir",
        p(dir.path()),
    ]);
    assert_eq!(code(&out), 2);

    let out = run(&[
        "sweep",
        p(&path),
        "--tau",
        "0.04,0.01,0.0025",
        "--out-dir",
        p(dir.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let table = fs::read_to_string(dir.path().join("small_sweep.csv")).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "tau,gamma,max_deviation,ratio");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].ends_with(','));

    let out = run(&[
        "sweep",
        p(&path),
        "--tau",
        "0.0025,0.04",
        "--out-dir",
        p(dir.path()),
    ]);
    assert_eq!(code(&out), 1);
}

#[test]
fn sweep_is_independent_of_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), "s.scenario", SMALL);
    let mut tables = Vec::new();
    for threads in ["1", "3"] {
        let sub = dir.path().join(threads);
        let out = bin()
            .args([
                "sweep",
                p(&path),
                "--tau",
                "0.04,0.02,0.01",
                "--out-dir",
                p(&sub),
            ])
            .env("STROBLIM_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(code(&out), 0);
        tables.push(fs::read(sub.join("small_sweep.csv")).unwrap());
    }
    assert_eq!(tables[0], tables[1]);
}

#[test]
fn plot_chooses_chart_kind() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&run(&["run", p(&bundled(1)), "--out-dir", p(dir.path())])),
        0
    );
    let svg = dir.path().join("plots/p.svg");
    let out = run(&["plot", p(&dir.path().join("example1.csv")), p(&svg)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg"));
    assert_eq!(text.matches("<polyline").count(), 8);
    assert!(!text.contains("<circle"));

    assert_eq!(
        code(&run(&["run", p(&bundled(2)), "--out-dir", p(dir.path())])),
        0
    );
    let svg = dir.path().join("b.svg");
    assert_eq!(
        code(&run(&[
            "plot",
            p(&dir.path().join("example2.csv")),
            p(&svg)
        ])),
        0
    );
    assert!(fs::read_to_string(&svg).unwrap().contains("<circle"));
}

#[test]
fn plot_rejects_bad_csv() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "t,p_up,state,method\n").unwrap();
    assert_eq!(
        code(&run(&["plot", p(&empty), p(&dir.path().join("e.svg"))])),
        2
    );
    let unknown = dir.path().join("unknown.csv");
    fs::write(&unknown, "t,p_up,energy,state,method\n0,1,2,a,exact\n").unwrap();
    let out = run(&["plot", p(&unknown), p(&dir.path().join("u.svg"))]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("energy"));
    assert!(!dir.path().join("u.svg").exists());
}
