use std::process::{Command, Output};

use apuf_core::{
    challenge_to_phi, expected_report_1, pair_correlation, response_similarity, similarity_factor, Challenge, Response,
};

fn apuf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_apuf")).args(args).env_remove("APUF_FORMAT").output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = apuf(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// CSV body as rows of cells, header dropped.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

#[test]
fn similarity_worked_example() {
    assert_eq!(stdout(&["similarity", "00000", "10000", "--n", "5"]), "n,s,rho,p_same\n5,4.5,0.8,0.795167\n");
    assert_eq!(rows(&stdout(&["similarity", "0110", "0110"]))[0][3], "1");
}

#[test]
fn similarity_accepts_phi_arrays() {
    let a = stdout(&["similarity", "00110", "[1,1,1,1,1,1]"]);
    let b = stdout(&["similarity", "00110", "00000"]);
    assert_eq!(a, b);
}

#[test]
fn similarity_matches_library_on_fuzzed_pairs() {
    let n = 24;
    let mut code = 0x9e37u64;
    for _ in 0..100 {
        code = code.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let a = Challenge::from_index(n, code >> 40).unwrap();
        let b = Challenge::from_index(n, (code >> 16) & 0xff_ffff).unwrap();
        let out = stdout(&["--full-precision", "similarity", &a.to_string(), &b.to_string()]);
        let row = &rows(&out)[0];
        let (pa, pb) = (challenge_to_phi(&a), challenge_to_phi(&b));
        assert_eq!(row[1].parse::<f64>().unwrap(), similarity_factor(&pa, &pb).unwrap().value());
        assert_eq!(row[2].parse::<f64>().unwrap(), pair_correlation(&pa, &pb).unwrap());
        assert_eq!(row[3].parse::<f64>().unwrap(), response_similarity(&pa, &pb).unwrap());
    }
}

#[test]
fn length_mismatch_fails() {
    let out = apuf(&["similarity", "0000", "00000"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("stages"));
    assert!(!apuf(&["similarity", "0000", "0000", "--n", "5"]).status.success());
    assert!(!apuf(&["similarity", "0020", "0000"]).status.success());
}

#[test]
fn predict_examples() {
    assert_eq!(
        stdout(&["predict", "--known", "00000:+1", "--target", "00110"]),
        "predicted,accuracy,pmf_plus\n1,0.704833,0.704833\n"
    );
    let same = stdout(&["predict", "--known", "00110:-1", "--target", "00110"]);
    assert_eq!(rows(&same)[0], ["-1", "1", "0"]);
    let two = stdout(&[
        "predict",
        "--known",
        "[1,1,1,1,1,1,1,1,1]:+1",
        "--known",
        "[1,1,1,1,-1,-1,-1,-1,1]:+1",
        "--target",
        "[1,-1,1,1,1,1,1,-1,1]",
    ]);
    assert_eq!(rows(&two)[0], ["1", "0.666667", "0.666667"]);
}

#[test]
fn predict_rejects_three_known() {
    let out = apuf(&["predict", "--known", "00:+1", "--known", "01:+1", "--known", "10:+1", "--target", "11"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("at most two"));
}

#[test]
fn expected_one_known() {
    let out = stdout(&["--full-precision", "expected", "--n", "32"]);
    let row = &rows(&out)[0];
    let r = expected_report_1(32).unwrap();
    assert_eq!(row[1].parse::<f64>().unwrap(), r.min_entropy);
    assert_eq!(row[2].parse::<f64>().unwrap(), r.shannon);
    assert_eq!(row[3].parse::<f64>().unwrap(), r.accuracy);
    assert_eq!(row[4], "4294967295");
}

#[test]
fn expected_two_known() {
    let out = stdout(&["--full-precision", "expected", "--n", "32", "--rho12", "0", "--r1", "-1", "--r2", "-1"]);
    let row = &rows(&out)[0];
    let r = apuf_core::expected_report_2(32, 0.0, Response::Minus, Response::Minus).unwrap();
    assert_eq!(row[..4], ["32", "0", "-1", "-1"]);
    assert_eq!(row[4].parse::<f64>().unwrap(), r.min_entropy);
    assert_eq!(row[5].parse::<f64>().unwrap(), r.shannon);
    assert_eq!(row[6].parse::<f64>().unwrap(), r.accuracy);
    let out = stdout(&["expected", "--n", "8", "--rho12", "1", "--breakdown"]);
    assert_eq!(rows(&out).len(), 2);
    assert!(!apuf(&["expected", "--n", "32", "--rho12", "0.01"]).status.success());
}

#[test]
fn bins_counts_and_lists() {
    let out =
        stdout(&["bins", "--anchor", "00000", "--semimetric", "similarity_factor", "--value", "5", "--count-only"]);
    assert_eq!(rows(&out), [["5", "1", "1", "1"]]);
    let out = stdout(&["bins", "--anchor", "00000", "--semimetric", "similarity_factor", "--value", "5"]);
    assert_eq!(rows(&out), [["00000", "5"]]);
    let out = stdout(&["bins", "--anchor", "000000", "--semimetric", "accuracy", "--value", "0.5", "--limit", "3"]);
    assert_eq!(rows(&out).len(), 3);
    let out = apuf(&["bins", "--anchor", "00000", "--semimetric", "accuracy", "--value", "0.9"]);
    assert!(!out.status.success());
}

#[test]
fn bins_around_two_anchors() {
    let base = [
        "bins",
        "--anchor",
        "[1,1,1,1,1,1,1,1,1]",
        "--r1",
        "+1",
        "--anchor2",
        "[1,1,1,1,-1,-1,-1,-1,1]:+1",
        "--semimetric",
        "accuracy",
        "--value",
        "0.6666666666666666",
    ];
    let counts = stdout(&[&base[..], &["--count-only"]].concat());
    let total: u64 = rows(&counts).iter().map(|r| r[6].parse::<u64>().unwrap()).sum();
    let listed = stdout(&base);
    assert_eq!(rows(&listed).len() as u64, total);
    let target = apuf_core::phi_to_challenge(&apuf_core::PhiVector::new(vec![1, -1, 1, 1, 1, 1, 1, -1, 1]).unwrap());
    assert!(rows(&listed).iter().any(|r| r[0] == target.to_string()));
    let missing_r1 = apuf(&base.iter().copied().filter(|a| *a != "--r1" && *a != "+1").collect::<Vec<_>>());
    assert!(!missing_r1.status.success());
}

#[test]
fn region_partitions_space() {
    let out = stdout(&["region", "--n", "8", "--rho12", "0"]);
    let total: u64 = rows(&out).iter().map(|r| r[5].parse::<u64>().unwrap()).sum();
    assert_eq!(total, 256);
    assert!(!apuf(&["region", "--n", "8", "--rho12", "0.1"]).status.success());
}

#[test]
fn entropy_curve_rows() {
    let out = stdout(&["entropy-curve", "--n", "6"]);
    let body = rows(&out);
    assert_eq!(body.len(), 12);
    let total: u64 = body.iter().map(|r| r[6].parse::<u64>().unwrap()).sum();
    assert_eq!(total, 64);
}

#[test]
fn json_lines_and_env_default() {
    let out = stdout(&["--json", "similarity", "00000", "10000"]);
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["s"], 4.5);
    let env = Command::new(env!("CARGO_BIN_EXE_apuf"))
        .args(["similarity", "00000", "10000"])
        .env("APUF_FORMAT", "json")
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(env.stdout).unwrap(), out);
}

#[test]
fn full_precision_round_trips() {
    let out = stdout(&["--full-precision", "--json", "entropy-curve", "--n", "9"]);
    let curve = apuf_core::entropy_curve(9).unwrap();
    for (line, point) in out.lines().zip(&curve) {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["p_same"].as_f64().unwrap(), point.p);
        assert_eq!(v["shannon"].as_f64().unwrap(), point.report.shannon);
        assert_eq!(v["min_entropy"].as_f64().unwrap(), point.report.min_entropy);
        assert_eq!(v["bin_size"].as_str().unwrap(), point.bin_size.to_string());
    }
}

#[test]
fn mc_exit_status_tracks_threshold() {
    let ok = apuf(&["mc", "--instances", "20000", "--seed", "3", "similarity", "00000", "10000"]);
    assert!(ok.status.success());
    let strict =
        apuf(&["mc", "--instances", "20000", "--seed", "3", "--z-threshold", "0", "similarity", "00000", "10000"]);
    assert_eq!(strict.status.code(), Some(2));
    let cond = stdout(&["mc", "--instances", "20000", "accuracy", "--known", "00000:+1", "--target", "00000"]);
    let row = &rows(&cond)[0];
    assert_eq!((row[5].as_str(), row[7].as_str(), row[8].as_str()), ("1", "1", "0"));
}
