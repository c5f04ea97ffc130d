use std::path::Path;
use std::process::{Command, Output};

use kolakoski_core::harness::{ConjectureId, VerificationReport};
use kolakoski_core::{build_tables, cache, Alphabet, TorsionTable};

fn kolakoski(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kolakoski"))
        .args(args)
        .env_remove("KOLAKOSKI_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn reports(o: &Output) -> Vec<VerificationReport> {
    stdout(o)
        .lines()
        .map(|l| serde_json::from_str(l).expect("one JSON report per line"))
        .collect()
}

#[test]
fn expand_examples() {
    let o = kolakoski(&["expand", "--m", "1", "--n", "2", "--s", "1,2", "--t", "1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "len=3: 1,2,2");

    let o = kolakoski(&["expand", "--m", "1", "--n", "2", "--s", "1,2,2", "--t", "1"]);
    assert_eq!(stdout(&o).trim(), "len=5: 1,2,2,1,1");
}

#[test]
fn expand_rejects_bad_alphabet() {
    let o = kolakoski(&["expand", "--m", "-1", "--n", "2", "--s", "1", "--t", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = kolakoski(&["expand", "--m", "1", "--n", "2", "--s", "1", "--t", ""]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn orbit_examples() {
    let o = kolakoski(&["orbit", "--m", "1", "--n", "2", "--word", "ones:3"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().next().unwrap().trim(), "4");

    let o = kolakoski(&["orbit", "--m", "-1", "--n", "2", "--word", "-1,2,-1,2,-1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().next().unwrap().trim(), "8");
}

#[test]
fn verify_orbit1_covers_residue_classes() {
    let o = kolakoski(&["verify", "orbit1", "--jmax", "4", "--residues"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rs = reports(&o);
    assert_eq!(rs.len(), 1 + 1 + 2 + 4);
    for r in &rs {
        assert_eq!(r.conjecture_id, ConjectureId::Orbit1);
        assert_eq!(r.observed, 1 << r.j);
        assert!(r.pass);
    }
}

#[test]
fn verify_orbit2_explicit_n() {
    let o = kolakoski(&[
        "verify",
        "orbit2",
        "--jmax",
        "3",
        "--n",
        "-2,0,2",
        "--parallelism",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rs = reports(&o);
    assert_eq!(rs.len(), 3 * 3 * 2);
    assert!(rs.iter().all(|r| r.pass && r.m == -1));
}

#[test]
fn verify_parity_and_residue() {
    let o = kolakoski(&[
        "verify", "parity", "--jmax", "3", "--n", "2,4", "--format", "csv",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("conjecture_id,"));
    assert_eq!(
        out.lines()
            .filter(|l| l.contains("parity_equivalence"))
            .count(),
        6
    );
    assert!(stderr(&o).contains("equivalence confirmed"));

    let o = kolakoski(&["verify", "residue", "--m", "-1", "--j", "3", "--n0", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = &reports(&o)[0];
    assert_eq!(r.conjecture_id, ConjectureId::ResidueReduction);
    assert_eq!(r.expected, r.observed);
}

#[test]
fn verify_guards() {
    let o = kolakoski(&["verify", "orbit1", "--jmax", "9", "--n", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = kolakoski(&["verify", "orbit1", "--jmax", "3", "--n", "3"]);
    assert_ne!(o.status.code(), Some(0));
    let o = kolakoski(&[
        "verify",
        "residue",
        "--j",
        "3",
        "--n0",
        "0",
        "--witnesses",
        "0,2",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = kolakoski(&[
        "verify",
        "orbit1",
        "--jmax",
        "6",
        "--n",
        "2",
        "--memory-cap",
        "1000",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn text_format_lines() {
    let o = kolakoski(&[
        "verify", "orbit1", "--jmax", "2", "--n", "2", "--format", "text",
    ]);
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 2);
    assert!(out.lines().all(|l| l.starts_with("PASS orbit1")));
}

fn write_table(path: &Path, m: i64, n: i64, k: u32) -> TorsionTable {
    let table = build_tables(Alphabet::new(m, n).unwrap(), k).unwrap();
    cache::save(&table, path).unwrap();
    table
}

#[test]
fn tables_build_info_verify() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.ktor");
    let p = path.to_str().unwrap();
    let o = kolakoski(&[
        "tables", "build", "--m", "1", "--n", "2", "--kmax", "8", "--out", p,
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let written = std::fs::read(&path).unwrap();
    assert_eq!(written.len(), cache::file_len(8));
    let built = build_tables(Alphabet::new(1, 2).unwrap(), 8).unwrap();
    assert_eq!(written, cache::to_bytes(&built));

    let o = kolakoski(&["tables", "info", p]);
    assert!(stdout(&o).contains("m=1, n=2, k_max=8"));
    let o = kolakoski(&["tables", "verify-cache", p]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let mut bad = written.clone();
    bad[cache::HEADER_LEN + 5] ^= 0x10;
    std::fs::write(&path, &bad).unwrap();
    let o = kolakoski(&["tables", "verify-cache", p]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn cache_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_kolakoski"))
        .args(["tables", "build", "--m", "1", "--n", "2", "--kmax", "9"])
        .env("KOLAKOSKI_CACHE_DIR", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(dir.path().join("m1_n2.ktor").exists());

    let o = Command::new(env!("CARGO_BIN_EXE_kolakoski"))
        .args(["verify", "orbit1", "--jmax", "4", "--n", "2"])
        .env("KOLAKOSKI_CACHE_DIR", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    let rs = reports(&o);
    assert!(rs
        .iter()
        .all(|r| r.table_source == kolakoski_core::harness::TableSource::Cache));
}

#[test]
fn selfcheck_flags_broken_table() {
    let o = kolakoski(&["selfcheck", "quick"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.ktor");
    let table = write_table(&good, 1, 2, 6);
    let o = kolakoski(&["selfcheck", "quick", "--table", good.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    // Swap two images at k = 4: still a permutation, so it loads, but wrong.
    let mut levels_m: Vec<Vec<u32>> = Vec::new();
    let mut levels_n: Vec<Vec<u32>> = Vec::new();
    for k in 1..=6 {
        levels_m.push(
            table
                .level(kolakoski_core::Letter::M, k)
                .unwrap()
                .as_slice()
                .to_vec(),
        );
        levels_n.push(
            table
                .level(kolakoski_core::Letter::N, k)
                .unwrap()
                .as_slice()
                .to_vec(),
        );
    }
    levels_m[3].swap(0, 2);
    let broken = TorsionTable::from_levels(table.alphabet(), levels_m, levels_n).unwrap();
    let bad = dir.path().join("bad.ktor");
    cache::save(&broken, &bad).unwrap();
    let o = kolakoski(&["selfcheck", "quick", "--table", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("[FAIL] table-oracle-equivalence"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(kolakoski(&[]).status.code(), Some(2));
    assert_eq!(
        kolakoski(&["orbit", "--m", "1", "--n", "1", "--word", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        kolakoski(&["tables", "info", "/nonexistent/file.ktor"])
            .status
            .code(),
        Some(2)
    );
}
