use std::process::{Command, Output};

use fredholm_cli::commands::parse_certificates_json;
use fredholm_cli::figure::read_csv;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fredholm"))
        .args(args)
        .env_remove("FREDHOLM_THREADS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(code(&run(&["attain", "2+3x"])), 2);
    assert_eq!(code(&run(&["verify", "everything"])), 2);
    assert_eq!(code(&run(&["zeros", "--region", "disk:0,0"])), 2);
    assert_eq!(code(&run(&["zeros", "--region", "rect:1,0,0,1"])), 2);
    assert_eq!(code(&run(&["figure", "--threads", "0"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
}

#[test]
fn verify_suites_pass() {
    for suite in ["identities", "ramanujan", "constants", "appendix", "expsums"] {
        let out = run(&["verify", suite]);
        assert_eq!(code(&out), 0, "{suite}: {}", String::from_utf8_lossy(&out.stderr));
        let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(report["passed"], true);
        assert_eq!(report["suite"], suite);
        assert!(!report["checks"].as_array().unwrap().is_empty());
    }
}

#[test]
fn zero_table_near_real_zero_has_one_record() {
    let out = run(&["zeros", "--region", "disk:-0.6586,0,0.01"]);
    assert_eq!(code(&out), 0);
    let zeros = parse_certificates_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(zeros.len(), 1);
    assert!((zeros[0].re + 0.65862675).abs() < 1e-7);
}

#[test]
fn empty_region_writes_empty_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zeros.jsonl");
    let out = run(&["zeros", "--region", "disk:0.3,0.1,0", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "");
}

#[test]
fn zero_table_csv_has_header_and_rows() {
    let out = run(&["zeros", "--region", "disk:0,0,0.7", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("re,im,radius,winding,contour_floor,tail_bound,method"));
    assert_eq!(lines.count(), 2);
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let a = run(&["zeros", "--threads", "1"]);
    let b = run(&["zeros", "--threads", "3"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["attain", "--", "-5i"]);
    let d = run(&["attain", "--", "-5i"]);
    assert_eq!(code(&c), 0);
    assert_eq!(c.stdout, d.stdout);
}

#[test]
fn thread_count_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_fredholm"))
        .args(["verify", "ramanujan"])
        .env("FREDHOLM_THREADS", "0")
        .output()
        .unwrap();
    // the variable is read, and a zero count is refused like the flag
    assert_eq!(code(&out), 2);
    let out = Command::new(env!("CARGO_BIN_EXE_fredholm"))
        .args(["verify", "ramanujan", "--threads", "2"])
        .env("FREDHOLM_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
}

#[test]
fn attain_reports_certificate() {
    let out = run(&["attain", "2+3i", "--a", "2"]);
    assert_eq!(code(&out), 0);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["params"]["n0"], 54);
    assert_eq!(json["f_certificate"]["winding"], 1);
    assert_eq!(json["f_certificate"]["frame"], "microscope");
    assert_eq!(json["s_zero"]["method"], "taylor-appendix");
    assert_eq!((json["v_re"].as_f64(), json["v_im"].as_f64()), (Some(2.0), Some(3.0)));
}

#[test]
fn attain_beyond_parameter_cap_is_reported() {
    let out = run(&["attain", "0", "--a", "9"]);
    assert_ne!(code(&out), 0);
}

#[test]
fn small_figure_with_svg() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("fig.csv");
    let svg = dir.path().join("fig.svg");
    let out = run(&[
        "figure",
        "--terms",
        "6",
        "--out",
        csv.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    let data = read_csv(text.as_bytes()).unwrap();
    let circles = std::fs::read_to_string(&svg).unwrap().matches("<circle").count();
    assert_eq!(circles, data.len());
    assert!(text.lines().any(|l| l.starts_with("# winding count")));
}

#[test]
fn constants_and_moments_emit_json() {
    let out = run(&["constants", "--m-max", "6"]);
    assert_eq!(code(&out), 0);
    let table: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(table["c"].as_array().unwrap().len(), 13);
    let out = run(&["moments", "--n", "10", "--grid", "4096"]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["M2"], 10);
    assert_eq!(report["M4"], 190);
}
