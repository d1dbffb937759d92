use std::path::Path;

use sma_core::cli::run;
use sma_core::fixtures;
use sma_core::format::{parse_lm, write_gm, write_gw, write_lm, write_qo};
use sma_core::jordan::synthesize_jordan;
use sma_core::selftest::induced_map;
use sma_core::{GaussianRational as G, Matrix, QuasiOrder, TransitiveMap};
use tempfile::TempDir;

fn sma(args: &[&str]) -> (i32, String) {
    let out = run(std::iter::once("sma").chain(args.iter().copied()));
    (out.exit_code, out.report)
}

fn put(dir: &TempDir, file: &str, body: &str) -> String {
    let path = dir.path().join(file);
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

fn path_in(dir: &TempDir, file: &str) -> String {
    dir.path().join(file).display().to_string()
}

#[test]
fn witness_on_rectangle_weights() {
    let dir = TempDir::new().unwrap();
    let g = fixtures::rectangle_weights();
    let qo = put(&dir, "r.qo", &write_qo(g.rho()));
    let gw = put(&dir, "r.gw", &write_gw(&g));
    let (code, report) = sma(&["witness", &qo, &gw]);
    assert_eq!(code, 1);
    assert!(report.contains("WITNESS\n4 4\n0 0 1 1\n0 0 1 1\n0 0 0 0\n0 0 0 0\n"));
    assert!(report.contains("RANK 1\nIMAGE-RANK 2\n"));

    let (code, report) = sma(&["trivial", &qo, &gw]);
    assert_eq!(code, 1);
    assert!(report.contains("WALK (1,4)+ (2,4)- (2,3)+ (1,3)-\nPRODUCT 2\n"));
}

#[test]
fn trivial_weights_give_separator() {
    let dir = TempDir::new().unwrap();
    let qo = put(&dir, "t.qo", "3\n1 2\n2 3\n1 3\n");
    let gw = put(&dir, "t.gw", "1 2 2\n2 3 3\n1 3 6\n");
    let (code, report) = sma(&["trivial", &qo, &gw]);
    assert_eq!((code, report.as_str()), (0, "VERDICT trivial\nSEPARATOR 1 1/2 1/6\n"));
    let (code, report) = sma(&["witness", &qo, &gw]);
    assert_eq!(code, 0);
    assert!(report.starts_with("VERDICT RankPreserver\n"));
}

#[test]
fn info_on_diagonal() {
    let dir = TempDir::new().unwrap();
    let qo = put(&dir, "d.qo", "3\n");
    let (code, report) = sma(&["info", &qo]);
    assert_eq!(code, 0);
    assert!(report.contains("CENTER-DIMENSION 3\n"));
    assert!(report.contains("RECTANGLES 0\n"));
    assert!(report.contains("INNER false\n"));
}

#[test]
fn jordan_embedding_of_vee_into_wedge() {
    let dir = TempDir::new().unwrap();
    let v = put(&dir, "v.qo", &write_qo(&fixtures::vee()));
    let l = put(&dir, "l.qo", &write_qo(&fixtures::wedge()));
    let (code, report) = sma(&["embed", "--jordan", &v, &l]);
    assert_eq!((code, report.as_str()), (0, "VERDICT embeds\nCLASSES none\nPERM 1,2,3\n"));
    let (code, report) = sma(&["embed", &v, &l]);
    assert_eq!(code, 1);
    assert!(report.starts_with("VERDICT none\n"));
}

#[test]
fn input_errors_name_file_line_and_rule() {
    let dir = TempDir::new().unwrap();
    let bad = put(&dir, "bad.qo", "# chain without closure\n3\n1 2\n2 3\n");
    let (code, report) = sma(&["info", &bad]);
    assert_eq!(code, 2);
    assert!(report.contains("bad.qo:4: relation must be transitive"), "{report}");
    let (code, _) = sma(&["--close", "info", &bad]);
    assert_eq!(code, 0);

    let qo = put(&dir, "t.qo", "2\n1 2\n");
    let gw = put(&dir, "t.gw", "1 2 0\n");
    let (code, report) = sma(&["trivial", &qo, &gw]);
    assert_eq!(code, 2);
    assert!(report.contains("t.gw:1: weight at (1,2) is zero"), "{report}");

    let gm = put(&dir, "m.gm", "2 2\n1 0\n5 1\n");
    let (code, report) = sma(&["diagonalize", &qo, &gm]);
    assert_eq!(code, 2);
    assert!(report.contains("m.gm:3: entry (2,1) lies outside the relation"), "{report}");

    let (code, report) = sma(&["info", &path_in(&dir, "missing.qo")]);
    assert_eq!(code, 2);
    assert!(report.contains("missing.qo:0: cannot read file"));

    let (code, _) = sma(&["no-such-command"]);
    assert_eq!(code, 2);
}

#[test]
fn classify_output_feeds_synthesize() {
    let dir = TempDir::new().unwrap();
    let rho = fixtures::two_way_factorization();
    let s = Matrix::from_i64_rows(&[&[1, 2, 0], &[0, 1, -1], &[1, 0, 1]]);
    let g = TransitiveMap::from_separator(rho.clone(), &[G::from(1), G::from(3), G::from(-2)]).unwrap();
    let phi = synthesize_jordan(&rho, &s, &[], &g).unwrap();
    let qo = put(&dir, "f.qo", &write_qo(&rho));
    let lm = put(&dir, "f.lm", &write_lm(&phi));
    let prefix = path_in(&dir, "cert");
    let (code, report) = sma(&["classify", &qo, &lm, "--write", &prefix]);
    assert_eq!(code, 0, "{report}");
    let classes = report
        .lines()
        .find_map(|l| l.strip_prefix("CLASSES "))
        .unwrap()
        .to_string();
    let s_path = format!("{prefix}.gm");
    let g_path = format!("{prefix}.gw");
    let (code, text) = sma(&["synthesize", &qo, "--s", &s_path, "--classes", &classes, "--g", &g_path]);
    assert_eq!(code, 0, "{text}");
    assert_eq!(parse_lm(&text, "out.lm", &rho).unwrap(), phi);
}

#[test]
fn classify_into_codomain_reports_permutation() {
    let dir = TempDir::new().unwrap();
    let rho = QuasiOrder::upper_triangular(3);
    let qo = put(&dir, "t.qo", &write_qo(&rho));
    let lm = put(&dir, "t.lm", &write_lm(&sma_core::jordan::LinearMapOnSMA::transpose_map(rho.clone())));
    let target = put(&dir, "r.qo", &write_qo(&rho.reverse()));
    let (code, report) = sma(&["classify", &qo, &lm, "--codomain", &target]);
    assert_eq!(code, 0, "{report}");
    assert!(report.contains("CLASSES none\n"));
    assert!(report.contains("PERM 1,2,3\n"));
    let (code, report) = sma(&["classify", &qo, &lm, "--codomain", &qo]);
    assert_eq!(code, 1);
    assert!(report.starts_with("VERDICT outside-codomain\n"));
}

#[test]
fn non_jordan_map_is_rejected_with_units() {
    let dir = TempDir::new().unwrap();
    let phi = fixtures::non_unital_rank_one_preserver();
    let qo = put(&dir, "n.qo", &write_qo(phi.rho()));
    let lm = put(&dir, "n.lm", &write_lm(&phi));
    let (code, report) = sma(&["classify", &qo, &lm]);
    assert_eq!((code, report.as_str()), (1, "VERDICT not-jordan\nUNITS (1,1) (2,3)\n"));
    let (code, report) = sma(&["check-rank-one", &qo, &lm]);
    assert_eq!(code, 0);
    assert!(report.contains("FORM sampled\n"));
    let (code, report) = sma(&["check-rank", &qo, &lm]);
    assert_eq!(code, 1);
    assert!(report.contains("fails unitality"));
}

#[test]
fn rank_checks() {
    let dir = TempDir::new().unwrap();
    let phi = fixtures::bordered_diagonal_map(5);
    let qo = put(&dir, "d.qo", &write_qo(phi.rho()));
    let lm = put(&dir, "d.lm", &write_lm(&phi));
    let (code, report) = sma(&["check-rank", "--max-rank", "4", &qo, &lm]);
    assert_eq!((code, report.as_str()), (0, "VERDICT preserves-sampled-ranks\nMAX-RANK 4\n"));
    let (code, report) = sma(&["check-rank", &qo, &lm]);
    assert_eq!(code, 1);
    assert!(report.contains("WITNESS\n5 5\n"));
    assert!(report.contains("RANK 5\nIMAGE-RANK 4\n"));

    let rho = QuasiOrder::upper_triangular(3);
    let qo = put(&dir, "t.qo", &write_qo(&rho));
    let lm = put(&dir, "t.lm", &write_lm(&sma_core::jordan::LinearMapOnSMA::transpose_map(rho)));
    let (code, report) = sma(&["check-rank", &qo, &lm]);
    assert_eq!(code, 0, "{report}");
    assert!(report.starts_with("VERDICT RankPreserver\nFORM rank\n"));
    assert!(report.contains("CLASSES none\n"));

    let zig = induced_map(&fixtures::zigzag10_weights());
    let qo = put(&dir, "z.qo", &write_qo(zig.rho()));
    let lm = put(&dir, "z.lm", &write_lm(&zig));
    let (code, report) = sma(&["check-rank", "--max-rank", "4", &qo, &lm]);
    assert_eq!(code, 1);
    assert!(report.contains("RANK 4\nIMAGE-RANK 5\n"));
}

#[test]
fn diagonalize_commuting_pair() {
    let dir = TempDir::new().unwrap();
    let qo = put(&dir, "t.qo", "2\n1 2\n");
    let a = put(&dir, "a.gm", &write_gm(&Matrix::from_i64_rows(&[&[1, 1], &[0, 2]])));
    let b = put(&dir, "b.gm", &write_gm(&Matrix::from_i64_rows(&[&[2, 1], &[0, 3]])));
    let (code, report) = sma(&["diagonalize", &qo, &a, &b]);
    assert_eq!(code, 0, "{report}");
    assert!(report.contains("S\n2 2\n1 1\n0 1\n"));
    assert!(report.contains("a.gm 1 2\n"));
    let n = put(&dir, "n.gm", "2 2\n1 1\n0 1\n");
    let (code, report) = sma(&["diagonalize", &qo, &n]);
    assert_eq!(code, 1);
    assert!(report.starts_with("VERDICT not-diagonalizable\n"));
}

#[test]
fn blocks_and_close() {
    let dir = TempDir::new().unwrap();
    let qo = put(&dir, "c.qo", "3\n1 2\n2 3\n");
    let (code, report) = sma(&["close", &qo]);
    assert_eq!((code, report.as_str()), (0, "3\n1 2\n1 3\n2 3\n"));
    let l = put(&dir, "l.qo", &write_qo(&fixtures::wedge()));
    let (code, report) = sma(&["blocks", &l]);
    assert_eq!(code, 0);
    assert!(report.starts_with("PERM 3,1,2\nSIZES 1 1 1\n"));
}

#[test]
fn reports_are_deterministic_and_json_lines_parse() {
    let dir = TempDir::new().unwrap();
    let qo = put(&dir, "r.qo", &write_qo(&fixtures::rectangle()));
    let first = sma(&["--seed", "7", "all-trivial", &qo]);
    let second = sma(&["--seed", "7", "all-trivial", &qo]);
    assert_eq!(first, second);
    assert_eq!(first.0, 1);

    let (code, report) = sma(&["--format", "json-lines", "all-trivial", &qo]);
    assert_eq!(code, 1);
    for line in report.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v.get("key").is_some());
    }
}

#[test]
fn selftest_small_run_passes() {
    let (code, report) = sma(&["selftest", "--n", "3", "--seed", "5"]);
    assert_eq!(code, 0, "{report}");
    assert_eq!(report.lines().filter(|l| l.ends_with(" PASS")).count(), 7);
}

#[test]
fn binary_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_sma");
    let dir = TempDir::new().unwrap();
    let qo = put(&dir, "d.qo", "2\n");
    let status = std::process::Command::new(exe).args(["info", &qo]).output().unwrap();
    assert_eq!(status.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&status.stdout).starts_with("N 2\n"));
    let status = std::process::Command::new(exe)
        .args(["info", &path_in(&dir, "nope.qo")])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
    assert!(!status.stderr.is_empty());
    assert!(Path::new(exe).exists());
}
