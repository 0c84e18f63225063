use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use substream::harness::read_csv;

fn substream(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_substream"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path_graph(dir: &Path) -> String {
    let p = dir.join("g.txt");
    fs::write(&p, "# a path\n0 1\n1 2\n2 3\n3 4\n4 5\n").unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn run_writes_one_row_plus_greedy() {
    let dir = tempfile::tempdir().unwrap();
    let g = path_graph(dir.path());
    let out = dir.path().join("r.csv");
    let o = substream(&[
        "run", "--graph", &g, "--objective", "coverage", "--algo", "quickstream", "--k", "50", "--c", "1", "--eps", "0.1",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_csv(&out).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].algo, "greedy");
    assert_eq!(rows[1].algo, "quickstream");
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 3);
}

#[test]
fn sweep_is_cartesian() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = substream(&[
        "sweep", "--graph", "ba:1500:2:1", "--k", "10,100,1000", "--algo", "quickstream,ltl,sieve", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_csv(&out).unwrap();
    assert_eq!(rows.iter().filter(|r| r.algo != "greedy").count(), 9);
    assert_eq!(rows.iter().filter(|r| r.algo == "greedy").count(), 3);
}

#[test]
fn verify_small_passes() {
    let o = substream(&["verify", "--max-n", "10"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(text.lines().filter(|l| l.contains(": ok")).count(), 5);
}

#[test]
fn lowerbound_prints_table() {
    let o = substream(&["lowerbound", "--trials", "200", "--budget", "0,5"]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.starts_with("budget,frequency"));
    assert!(text.lines().nth(1).unwrap().starts_with("0,0,"));
    let o = substream(&["lowerbound", "--budget=-1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn exit_codes() {
    let o = substream(&["run", "--k", "3", "--bogus"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));

    let o = substream(&["run", "--graph", "/nonexistent/graph.txt", "--k", "3"]);
    assert_eq!(o.status.code(), Some(2));

    let o = substream(&["run", "--graph", "ba:50:2:0", "--k", "0"]);
    assert_eq!(o.status.code(), Some(1));

    let o = substream(&["run", "--graph", "ba:50:2:0", "--k", "3", "--algo", "nope"]);
    assert_eq!(o.status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "0 1\n1 x\n").unwrap();
    let o = substream(&["run", "--graph", bad.to_str().unwrap(), "--k", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    let o = substream(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn config_file_with_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# experiment\ngraph = ba:200:3:4\nalgo = sieve\nk = 5,7\nreps = 2\nlazy = true\n").unwrap();
    let out = dir.path().join("r.csv");
    let o = substream(&["run", "--config", cfg.to_str().unwrap(), "--k", "4", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_csv(&out).unwrap();
    let runs: Vec<_> = rows.iter().filter(|r| r.algo == "sieve").collect();
    assert_eq!(runs.len(), 2);
    assert!(runs.iter().all(|r| r.k == 4 && r.lazy && r.dataset == "ba:200:3:4"));

    let o = substream(&["run", "--config", dir.path().join("missing.cfg").to_str().unwrap(), "--k", "4"]);
    assert_eq!(o.status.code(), Some(2));
}

fn without_wall_time(text: &str) -> Vec<String> {
    text.lines()
        .map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head).to_string())
        .collect()
}

#[test]
fn csv_replay_is_byte_identical() {
    let args = [
        "sweep", "--graph", "ba:400:3:2", "--objective", "revenue", "--k", "5,20", "--algo", "ltl,random,qs-br,qs-nm",
        "--order", "shuffle", "--reps", "3", "--seed", "11",
    ];
    let a = substream(&args);
    let b = substream(&args);
    assert!(a.status.success());
    let (a, b) = (String::from_utf8(a.stdout).unwrap(), String::from_utf8(b.stdout).unwrap());
    assert_eq!(without_wall_time(&a), without_wall_time(&b));
    assert_eq!(a.lines().count(), 1 + 2 + 2 * 4 * 3);
}
