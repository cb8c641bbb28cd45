use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const METRIC_345: &str = "3\na b c\n0 3 4\n3 0 5\n4 5 0\n";

fn tsrealize(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tsrealize")).args(args).current_dir(dir).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn workdir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("345.txt"), METRIC_345).unwrap();
    dir
}

#[test]
fn gen_families() {
    let dir = workdir();
    let d = dir.path();
    let o = tsrealize(d, &["gen", "random", "--n", "5", "--seed", "7", "--out", "r.txt"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(d.join("r.txt")).unwrap();
    assert_eq!(text.lines().nth(1).unwrap().split_whitespace().count(), 5);

    let o = tsrealize(d, &["gen", "l1", "--n", "10", "--seed", "1"]);
    let points: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    assert_eq!(points.len(), 10);
    let mut unique = points.clone();
    unique.sort();
    unique.dedup();
    assert_eq!(unique.len(), 10);

    let o = tsrealize(d, &["gen", "splits2", "--n", "6", "--seed", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.contains('|')).count(), 12);
    assert!(stderr(&o).contains("12 splits"));
}

#[test]
fn gen_rejects_bad_parameters() {
    let dir = workdir();
    let o = tsrealize(dir.path(), &["gen", "random", "--n", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("at least"));
    let o = tsrealize(dir.path(), &["gen", "nosuch", "--n", "4"]);
    assert_eq!(o.status.code(), Some(2));
    let o = tsrealize(dir.path(), &["bench", "random", "--n", "4", "--count", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn realize_then_verify() {
    let dir = workdir();
    let d = dir.path();
    let o = tsrealize(d, &["realize", "345.txt", "--out", "345.json"]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("n=3 vertices=4 edges=3 total_length=6"), "{}", stderr(&o));
    let o = tsrealize(d, &["verify", "345.txt", "345.json"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("PASS"));

    fs::write(d.join("two.txt"), "2\np q\n0 7\n7 0\n").unwrap();
    let o = tsrealize(d, &["realize", "two.txt", "--format", "dot"]);
    assert!(stdout(&o).contains("n0 -- n1 [label=\"7\"]"));
    assert!(stderr(&o).contains("vertices=2 edges=1"));
}

#[test]
fn realize_points_file() {
    let dir = workdir();
    let d = dir.path();
    fs::write(d.join("p.txt"), "0 0\n2 0\n0 1\n3 3\n").unwrap();
    assert!(tsrealize(d, &["realize", "p.txt", "--out", "p.json"]).status.success());
    let o = tsrealize(d, &["verify", "p.txt", "p.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn verify_reports_failures() {
    let dir = workdir();
    let d = dir.path();
    tsrealize(d, &["realize", "345.txt", "--out", "g.json"]);
    let good = fs::read_to_string(d.join("g.json")).unwrap();

    // the a-edge of the star becomes 2
    let bad = good.replacen("\"weight\": \"1\"", "\"weight\": \"2\"", 1);
    fs::write(d.join("bad.json"), bad).unwrap();
    let o = tsrealize(d, &["verify", "345.txt", "bad.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("d(a, b) = 4"), "{}", stdout(&o));

    let edgeless = r#"{"nodes":[{"id":0,"coords":{"a":"0","b":"3","c":"4"}},{"id":1,"coords":{"a":"3","b":"0","c":"5"}},{"id":2,"coords":{"a":"4","b":"5","c":"0"}}],"edges":[],"labels":{"a":0,"b":1,"c":2}}"#;
    fs::write(d.join("edgeless.json"), edgeless).unwrap();
    let o = tsrealize(d, &["verify", "345.txt", "edgeless.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("disconnected"));
}

#[test]
fn parse_errors_exit_one() {
    let dir = workdir();
    fs::write(dir.path().join("broken.txt"), "3\na b c\n0 3\n").unwrap();
    let o = tsrealize(dir.path(), &["realize", "broken.txt"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn export_mip_counts() {
    let dir = workdir();
    let d = dir.path();
    tsrealize(d, &["realize", "345.txt", "--out", "g.json"]);
    let o = tsrealize(d, &["export-mip", "345.txt", "g.json", "--reduce", "--out", "r.lp"]);
    assert!(stderr(&o).contains("variables=15 binary=3 continuous=12"), "{}", stderr(&o));
    let o = tsrealize(d, &["export-mip", "345.txt", "g.json", "--out", "f.lp"]);
    assert!(stderr(&o).contains("variables=21"));
    let lp = fs::read_to_string(d.join("f.lp")).unwrap();
    let model = tsrealize::mip::read_lp(&lp).unwrap();
    assert_eq!(model.variables.len(), 21);
    assert!(lp.ends_with("End\n"));
}

#[test]
fn export_mip_rejects_non_realizations() {
    let dir = workdir();
    let d = dir.path();
    tsrealize(d, &["realize", "345.txt", "--out", "g.json"]);
    let bad = fs::read_to_string(d.join("g.json")).unwrap().replacen("\"weight\": \"1\"", "\"weight\": \"2\"", 1);
    fs::write(d.join("bad.json"), bad).unwrap();
    let o = tsrealize(d, &["export-mip", "345.txt", "bad.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("not a realization"));
}

#[test]
fn oracle_tasks() {
    let dir = workdir();
    let d = dir.path();
    let o = tsrealize(d, &["oracle", "vertices", "345.txt"]);
    assert!(stdout(&o).starts_with("vertices=4\n"));

    fs::write(d.join("l.txt"), "0 0\n2 0\n0 1\n").unwrap();
    let o = tsrealize(d, &["oracle", "mmn", "l.txt"]);
    assert_eq!(stdout(&o), "mmn_length=3\n");

    tsrealize(d, &["realize", "345.txt", "--out", "g.json"]);
    let o = tsrealize(d, &["oracle", "subreal", "345.txt", "g.json", "--out", "best.json"]);
    assert_eq!(stdout(&o), "optimal_length=6 edges=3\n");
    assert_eq!(tsrealize(d, &["verify", "345.txt", "best.json"]).status.code(), Some(0));

    let o = tsrealize(d, &["oracle", "vertices", "345.txt", "--max-oracle-n", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("too large"));
}

#[test]
fn bench_csv() {
    let dir = workdir();
    let o = tsrealize(dir.path(), &["bench", "doubletree", "--n", "4,5", "--count", "4", "--seed", "2", "--with-oracle"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = stdout(&o);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "family,n,count,mean_total_length,mean_runtime_ms,oracle_solved,mean_r_sg,max_r_sg,mean_r_ts");
    assert_eq!(lines.len(), 3);
    let cells: Vec<&str> = lines[2].split(',').collect();
    assert_eq!(&cells[..3], &["doubletree", "5", "4"]);
    assert_eq!(cells[4], "");
    assert_eq!(cells[5], "4");
    assert!(cells[6].parse::<f64>().unwrap() >= 1.0);

    let timed = tsrealize(dir.path(), &["bench", "random", "--n", "4", "--count", "2", "--timing"]);
    let row = stdout(&timed).lines().nth(1).unwrap().to_string();
    assert!(!row.split(',').nth(4).unwrap().is_empty());
    assert_eq!(row.split(',').nth(5), Some("0"));
}

#[test]
fn bench_thread_cap() {
    let dir = workdir();
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_tsrealize"))
            .args(["bench", "l1", "--n", "5", "--count", "6", "--with-oracle"])
            .env("TSREALIZE_THREADS", threads)
            .current_dir(dir.path())
            .output()
            .unwrap()
    };
    assert_eq!(stdout(&run("1")), stdout(&run("4")));
    assert_eq!(run("zero").status.code(), Some(2));
}
