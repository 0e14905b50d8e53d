use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use graphlayout::core::analytics::{distribute, pagerank};
use graphlayout::core::ordering::{self, Strategy};
use graphlayout::core::partition::{partition_lp, Mode, PartitionConfig};
use graphlayout::core::{generate, metrics};
use graphlayout::io::{self, Format};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_graphlayout"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn code(dir: &Path, args: &[&str]) -> i32 {
    run(dir, args).status.code().unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

/// Second row of a two-line CSV, as `header -> value`.
fn row(csv: &str, column: &str) -> String {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let values: Vec<&str> = lines.next().unwrap().split(',').collect();
    values[header.iter().position(|h| *h == column).unwrap()].to_string()
}

#[test]
fn six_cycle_lp_mm() {
    let d = tempfile::tempdir().unwrap();
    let d = d.path();
    assert_eq!(code(d, &["--out", "g", "generate", "cycle", "--n", "6"]), 0);
    assert_eq!(code(d, &["--out", "p", "partition", "g/cycle.edges", "--parts", "2", "--mode", "mm"]), 0);
    let part = read(d, "p/partition.txt");
    assert_eq!(part.lines().count(), 6);
    assert_eq!(row(&read(d, "p/partition.csv"), "ec"), (4.0f64 / 12.0).to_string());
}

#[test]
fn one_part_has_no_cut_and_no_traffic() {
    let d = tempfile::tempdir().unwrap();
    let d = d.path();
    code(d, &["--out", "g", "--seed", "1", "generate", "ba-like", "--n", "200", "--attach", "3"]);
    assert_eq!(code(d, &["--out", "p", "partition", "g/ba-like.edges", "--parts", "1"]), 0);
    assert!(read(d, "p/partition.txt").lines().all(|l| l == "0"));
    assert_eq!(row(&read(d, "p/partition.csv"), "ec"), "0");
    assert_eq!(
        code(d, &["--out", "b", "bench", "g/ba-like.edges", "--partition", "p/partition.txt", "--analytic", "pagerank"]),
        0
    );
    assert_eq!(row(&read(d, "b/summary.csv"), "total_sent"), "0");
    assert!(read(d, "b/trace.csv").lines().skip(1).all(|l| l.ends_with(",0,0")));
}

#[test]
fn exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let d = d.path();
    assert_eq!(code(d, &["metrics", "missing.edges"]), 2);
    assert_eq!(code(d, &["partition", "missing.edges"]), 1, "missing --parts is a usage error");
    assert_eq!(code(d, &["frobnicate"]), 1);
    fs::write(d.join("bad.edges"), "0 1\n1 x\n").unwrap();
    assert_eq!(code(d, &["metrics", "bad.edges"]), 1);
    fs::write(d.join("neg.edges"), "0 1 -1\n").unwrap();
    assert_eq!(code(d, &["metrics", "neg.edges"]), 1);
    fs::write(d.join("ok.edges"), "0 1\n1 2\n").unwrap();
    assert_eq!(code(d, &["bench", "ok.edges", "--analytic", "bfs", "--root", "9"]), 1);
    assert_eq!(code(d, &["--help"]), 0);
}

#[test]
fn unmet_balance_exits_three_with_output() {
    // A star cannot be split into two parts with edge imbalance 1.0.
    let d = tempfile::tempdir().unwrap();
    let d = d.path();
    code(d, &["--out", "g", "generate", "star", "--leaves", "9"]);
    let args = ["--out", "p", "partition", "g/star.edges", "--parts", "2", "--vbal", "1.0", "--ebal", "1.0"];
    let out = run(d, &args);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("constraint violated"));
    assert_eq!(read(d, "p/partition.txt").lines().count(), 10);
}

#[test]
fn dgl_with_pinned_root_on_path() {
    let d = tempfile::tempdir().unwrap();
    let d = d.path();
    code(d, &["--out", "g", "generate", "path", "--n", "5"]);
    assert_eq!(code(d, &["--out", "o", "order", "g/path.edges", "--strategy", "dgl", "--root", "0"]), 0);
    assert_eq!(read(d, "o/ordering.txt"), "4\n3\n2\n1\n0\n");
}

#[test]
fn file_pipeline_matches_library_calls() {
    let d = tempfile::tempdir().unwrap();
    let d = d.path();
    code(d, &["--out", "g", "--seed", "3", "generate", "ba-like", "--n", "300", "--attach", "3"]);
    let c = code(d, &["--out", "p", "--seed", "3", "partition", "g/ba-like.edges", "--parts", "4", "--mode", "m"]);
    assert!(c == 0 || c == 3);
    code(d, &["--out", "o", "--seed", "3", "order", "g/ba-like.edges", "--strategy", "rcm"]);
    code(
        d,
        &["--out", "m", "metrics", "g/ba-like.edges", "--partition", "p/partition.txt", "--ordering", "o/ordering.txt", "--hops", "2"],
    );
    code(
        d,
        &["--out", "b", "bench", "g/ba-like.edges", "--partition", "p/partition.txt", "--ordering", "o/ordering.txt", "--analytic", "pagerank", "--iters", "7"],
    );

    // Edge-list ids are compacted in first-appearance order, so the library
    // side starts from the file as read.
    let g = io::read_graph(&d.join("g/ba-like.edges"), Format::EdgeList, false).unwrap();
    let made = generate::ba_like(300, 3, 3).unwrap();
    assert_eq!((g.n(), g.m()), (made.n(), made.m()));
    let cfg = PartitionConfig::new(4).with_mode(Mode::M).with_seed(3);
    let part = partition_lp(&g, &cfg).unwrap().partition;
    assert_eq!(io::partition_string(&part), read(d, "p/partition.txt"));
    let ord = ordering::order_global(&g, Strategy::Rcm, 3);
    assert_eq!(io::ordering_string(&ord), read(d, "o/ordering.txt"));

    let h = ord.apply(&g).unwrap();
    let r = metrics::layout_report(&g, &part, &h, Some(2)).unwrap();
    let csv = read(d, "m/metrics.csv");
    assert_eq!(row(&csv, "ec"), r.ec.to_string());
    assert_eq!(row(&csv, "coloc"), r.coloc.to_string());
    assert_eq!(row(&csv, "gapsum"), r.gapsum.to_string());
    assert_eq!(row(&csv, "replication"), r.replication.unwrap().to_string());

    let hp = part.permuted(&h, ord.perm()).unwrap();
    let (ranks, trace) = pagerank(&distribute(&h, &hp).unwrap(), 7, 0.85);
    assert_eq!(row(&read(d, "b/summary.csv"), "total_sent"), trace.total_sent().to_string());
    let values = read(d, "b/values.csv");
    for (v, line) in values.lines().skip(1).enumerate() {
        assert_eq!(line, format!("{v},{}", ranks[ord.perm()[v]]));
    }
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [a.path(), b.path()] {
        code(d, &["--out", "g", "--seed", "9", "generate", "planted", "--blocks", "3", "--block-size", "40"]);
        code(d, &["--out", "p", "--seed", "9", "partition", "g/planted.edges", "--parts", "3"]);
        code(d, &["--out", "c", "--seed", "9", "bench", "g/planted.edges", "--partition", "p/partition.txt", "--analytic", "count", "--iters", "4"]);
    }
    for f in ["g/planted.edges", "p/partition.txt", "p/partition.csv", "c/trace.csv", "c/summary.csv"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn formats_convert_losslessly() {
    let d = tempfile::tempdir().unwrap();
    let d = d.path();
    for fmt in ["edgelist", "metis", "csr"] {
        assert_eq!(code(d, &["--out", fmt, "--format", fmt, "generate", "clique-pair", "--k", "4"]), 0);
    }
    let a = io::read_graph(&d.join("edgelist/clique-pair.edges"), Format::EdgeList, false).unwrap();
    let b = io::read_graph(&d.join("metis/clique-pair.metis"), Format::Metis, false).unwrap();
    let c = io::read_graph(&d.join("csr/clique-pair.glcsr"), Format::Csr, false).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, c);
}
