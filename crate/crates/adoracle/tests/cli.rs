use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn adoracle(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_adoracle"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write_graph(dir: &Path) {
    // a 6-cycle with one zero-weight edge and labels that are not dense
    let text = "# cycle\n10 20 3\n20 30 0\n30 40 2\n40 50 5\n50 60 1\n60 10 4\n";
    fs::write(dir.join("g.txt"), text).unwrap();
}

#[test]
fn build_query_audit_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_graph(d);
    for kind in ["tz", "warmup", "small-k", "near-linear"] {
        let out = adoracle(
            &["build", "--input", "g.txt", "--kind", kind, "--k", "3", "--epsilon", "1/2", "--seed", "5", "--out", "o.ado"],
            d,
        );
        assert!(out.status.success(), "{kind}: {}", String::from_utf8_lossy(&out.stderr));

        let out = adoracle(&["query", "--oracle", "o.ado", "--pairs", "20,30"], d);
        assert_eq!(String::from_utf8_lossy(&out.stdout), "20 30 0\n");

        let out = adoracle(&["audit", "--oracle", "o.ado", "--graph", "g.txt", "--pairs", "all"], d);
        assert!(out.status.success(), "{kind}: {}", String::from_utf8_lossy(&out.stderr));
        let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(report["violation_count"], 0);
        assert_eq!(report["pairs_audited"], 10);
        assert_eq!(report["passed"], true);
    }
}

#[test]
fn query_from_file_uses_labels() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_graph(d);
    let out = adoracle(&["build", "--input", "g.txt", "--kind", "tz", "--k", "1", "--out", "o.ado"], d);
    assert!(out.status.success());
    fs::write(d.join("pairs.txt"), "10 40\n# comment\n50 20\n").unwrap();
    let out = adoracle(&["query", "--oracle", "o.ado", "--pairs", "pairs.txt"], d);
    assert_eq!(String::from_utf8_lossy(&out.stdout), "10 40 5\n50 20 7\n");
    let out = adoracle(&["query", "--oracle", "o.ado", "--pairs", "10,99"], d);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn corrupt_oracle_and_bad_input_fail() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_graph(d);
    adoracle(&["build", "--input", "g.txt", "--kind", "tz", "--k", "2", "--out", "o.ado"], d);
    let mut bytes = fs::read(d.join("o.ado")).unwrap();
    let mid = bytes.len() / 2;
    bytes[mid] ^= 1;
    fs::write(d.join("o.ado"), bytes).unwrap();
    let out = adoracle(&["query", "--oracle", "o.ado", "--pairs", "10,20"], d);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("checksum"));

    fs::write(d.join("bad.txt"), "1 2 3\n2 3 -4\n").unwrap();
    let out = adoracle(&["build", "--input", "bad.txt", "--kind", "tz", "--k", "2", "--out", "x.ado"], d);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn disconnected_input_needs_largest_component() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("g.gr"), "p sp 5 3\na 1 2 1\na 2 3 1\na 4 5 1\n").unwrap();
    let out = adoracle(&["build", "--input", "g.gr", "--kind", "small-k", "--k", "3", "--out", "o.ado"], d);
    assert_eq!(out.status.code(), Some(2));
    let out = adoracle(
        &["build", "--input", "g.gr", "--kind", "small-k", "--k", "3", "--out", "o.ado", "--largest-component"],
        d,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = adoracle(&["query", "--oracle", "o.ado", "--pairs", "1,3"], d);
    assert_eq!(String::from_utf8_lossy(&out.stdout), "1 3 2\n");
    let out = adoracle(&["audit", "--oracle", "o.ado", "--graph", "g.gr", "--pairs", "all"], d);
    assert!(out.status.success());
}

#[test]
fn spanner_and_bench_commands() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_graph(d);
    let out = adoracle(&["spanner", "--input", "g.txt", "--k-prime", "1", "--out", "h.txt"], d);
    assert!(out.status.success());
    let h = fs::read_to_string(d.join("h.txt")).unwrap();
    // the zero edge is contracted away, leaving a 5-cycle
    assert_eq!(h.lines().filter(|l| !l.starts_with('#')).count(), 5);

    fs::write(
        d.join("s.toml"),
        "[[cells]]\nedges = [[0, 1, 1], [1, 2, 1]]\nkinds = [\"tz\"]\nk = [1]\npairs = \"all\"\n",
    )
    .unwrap();
    let out = adoracle(&["bench", "--scenario", "s.toml", "--out", "r.csv", "--json", "r.json"], d);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(d.join("r.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("r.json")).unwrap()).unwrap();
    assert_eq!(json["rows"][0]["stretch_max"], "1");
}
