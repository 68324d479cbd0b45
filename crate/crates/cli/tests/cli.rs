use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn ontominer(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ontominer"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn mine_bank(out: &Path, extra: &[&str]) -> Output {
    let kb = fixture("bank.kb");
    let mut args = vec![
        "mine",
        "--kb",
        kb.to_str().unwrap(),
        "--ref-concept",
        "Client",
        "--minsup",
        "0.5",
        "--max-depth",
        "3",
        "--mode",
        "sem",
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    ontominer(&args)
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn depth_one_yields_the_reference_pattern() {
    let dir = tempfile::tempdir().unwrap();
    let out = mine_bank(dir.path(), &["--max-depth", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(read(dir.path(), "patterns.txt"), "1.000000\tQ(key) :- Client(key)\n");
}

#[test]
fn co_owner_pattern_has_support_two_thirds() {
    let dir = tempfile::tempdir().unwrap();
    assert!(mine_bank(dir.path(), &[]).status.success());
    let patterns = read(dir.path(), "patterns.txt");
    assert!(patterns
        .lines()
        .any(|l| l.starts_with("0.666667\t") && l.contains("p_familyAccount(x1,key,")));
    let stats = read(dir.path(), "stats.csv");
    assert!(stats.starts_with("depth,gen,sat,sfree,cand,freq\n1,1,1,1,1,1\n"));
    let graph = read(dir.path(), "trie.graphml");
    assert!(graph.contains("<key id=\"support\" for=\"node\""));
    assert_eq!(graph.matches("<node ").count(), patterns.lines().count());
    assert!(read(dir.path(), "runtime.txt").trim().parse::<f64>().is_ok());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert!(mine_bank(a.path(), &[]).status.success());
    assert!(mine_bank(b.path(), &[]).status.success());
    for f in ["patterns.txt", "stats.csv", "trie.graphml"] {
        assert_eq!(read(a.path(), f), read(b.path(), f), "{f}");
    }
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# bank run\nmax_depth = 1\nrecord-runtime = true\n").unwrap();
    let out = mine_bank(dir.path(), &["--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    // the command line sets depth 3, which wins over the file
    assert!(read(dir.path(), "patterns.txt").lines().count() > 1);
    assert!(read(dir.path(), "stats.csv").starts_with("depth,gen,sat,sfree,cand,freq,runtime_seconds\n"));
}

#[test]
fn dumps_and_comparison() {
    let dir = tempfile::tempdir().unwrap();
    let kb = fixture("bank.kb");
    let (prog, models) = (dir.path().join("program.txt"), dir.path().join("models.txt"));
    let out = ontominer(&[
        "compare",
        "--kb",
        kb.to_str().unwrap(),
        "--ref-concept",
        "Client",
        "--minsup",
        "1/2",
        "--max-depth",
        "2",
        "--with-tax",
        "--out",
        dir.path().to_str().unwrap(),
        "--dump-program",
        prog.to_str().unwrap(),
        "--dump-models",
        models.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(dir.path(), "compare.csv");
    assert!(csv.starts_with("depth,cand_sem,freq_sem,cand_nosem,freq_nosem,cand_sem-tax,freq_sem-tax,reduction_cand,reduction_freq\n"));
    assert_eq!(csv.lines().count(), 3);
    for mode in ["sem", "nosem", "sem-tax"] {
        assert!(dir.path().join(mode).join("patterns.txt").exists());
    }
    assert!(fs::read_to_string(&prog).unwrap().contains(" :- "));
    let m = fs::read_to_string(&models).unwrap();
    assert!(m.contains("Client(Anna)") && m.contains("---"));
}

fn exit_code(kb_text: &str, ref_concept: &str, extra: &[&str]) -> i32 {
    let dir = tempfile::tempdir().unwrap();
    let kb = dir.path().join("kb.txt");
    fs::write(&kb, kb_text).unwrap();
    let mut args = vec![
        "mine",
        "--kb",
        kb.to_str().unwrap(),
        "--ref-concept",
        ref_concept,
        "--minsup",
        "0.5",
        "--max-depth",
        "2",
        "--out",
        dir.path().to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    ontominer(&args).status.code().unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(exit_code("(concept A", "A", &[]), 1);
    assert_eq!(exit_code("(concept A)\n(instance A a)\n", "A", &["--minsup", "zero"]), 1);
    assert_eq!(
        exit_code("(concept A)\n(concept B)\n(disjoint A B)\n(instance A a)\n(instance B a)\n", "A", &[]),
        2
    );
    assert_eq!(exit_code("(concept A)\n(concept B)\n(instance B a)\n", "A", &[]), 3);
    let wide = "(concept A)\n(concept B)\n(concept C)\n(subclass A (or B C))\n\
                (instance A a)\n(instance A b)\n(instance A c)\n";
    assert_eq!(exit_code(wide, "A", &["--max-branches", "2"]), 4);
    assert_eq!(exit_code("(concept A)\n(instance A a)\n", "A", &[]), 0);
}
