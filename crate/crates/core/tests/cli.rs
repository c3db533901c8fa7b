use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use wapgraph::graph::named;
use wapgraph::io;

fn wapgraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wapgraph")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_g6(dir: &Path, name: &str, g: &wapgraph::Graph) -> String {
    let p = dir.join(name);
    fs::write(&p, format!("{}\n", io::to_graph6(g))).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn member_reads_a_pentagon_file() {
    let dir = tempfile::tempdir().unwrap();
    let c5 = write_g6(dir.path(), "pentagon.g6", &named::cycle(5).unwrap());
    let o = wapgraph(&["member", "--class", "c4free", "--in", &c5]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "true\n");
    let k4 = write_g6(dir.path(), "k4.g6", &named::complete(4).unwrap());
    assert_eq!(stdout(&wapgraph(&["member", "--class", "c4free", "--in", &k4])), "false\n");
}

#[test]
fn enumerate_all_order_four() {
    let o = wapgraph(&["enumerate", "--class", "all", "--order", "4"]);
    assert_eq!(code(&o), 0);
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines.len(), 11);
    let graphs = io::parse_graph6_lines(&stdout(&o)).unwrap();
    assert!(graphs.iter().all(|g| g.order() == 4));
}

#[test]
fn gadget_bundle_replays() {
    let dir = tempfile::tempdir().unwrap();
    let c5 = write_g6(dir.path(), "pentagon.g6", &named::cycle(5).unwrap());
    let out = dir.path().join("out");
    let o = wapgraph(&["c4-gadget", "--witness", &c5, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let bundle = out.join("c4_gadget.json");
    assert!(out.join("c4_gadget.meta.json").exists());
    let o = wapgraph(&["replay", bundle.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let o = wapgraph(&["replay", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 1);

    let tampered = fs::read_to_string(&bundle).unwrap().replacen("\"v_x\": ", "\"v_x\": 1", 1);
    let bad = out.join("bad.json");
    fs::write(&bad, tampered).unwrap();
    assert_eq!(code(&wapgraph(&["replay", bad.to_str().unwrap()])), 1);

    let newer = fs::read_to_string(&bundle).unwrap().replace("\"schema_version\": 1", "\"schema_version\": 7");
    fs::write(&bad, newer).unwrap();
    assert_eq!(code(&wapgraph(&["replay", bad.to_str().unwrap()])), 2);
}

#[test]
fn identical_configs_give_identical_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let base = write_g6(dir.path(), "k1.g6", &wapgraph::Graph::empty(1));
    let mut bundles = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let o = wapgraph(&["windmill-witness", "--base", &base, "--out", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
        bundles.push(fs::read(out.join("windmill_witness.json")).unwrap());
    }
    assert_eq!(bundles[0], bundles[1]);
}

#[test]
fn sweeps_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(code(&wapgraph(&["check-ap", "--class", "linear-forests", "--order", "4", "--out", out])), 1);
    assert_eq!(code(&wapgraph(&["replay", &format!("{out}/ap_report.json")])), 0);
    assert_eq!(code(&wapgraph(&["prop-diam2", "--order", "6", "--out", out])), 0);
    assert_eq!(code(&wapgraph(&["replay", &format!("{out}/diam2_sweep.json")])), 0);
    assert_eq!(code(&wapgraph(&["refutation-tree", "--depth", "1", "--out", out, "--jobs", "2"])), 0);
    assert_eq!(code(&wapgraph(&["replay", &format!("{out}/refutation_tree.json")])), 0);

    let k1 = write_g6(dir.path(), "k1.g6", &wapgraph::Graph::empty(1));
    let o = wapgraph(&["check-cap", "--class", "linear-forests", "--base", &k1, "--witness-extra", "2", "--ext-extra", "1", "--out", out]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert_eq!(code(&wapgraph(&["replay", &format!("{out}/cap_certificate.json")])), 0);

    let two = write_g6(dir.path(), "two.g6", &wapgraph::Graph::empty(2));
    let o = wapgraph(&["check-wap", "--class", "linear-forests", "--base", &two, "--ext-extra", "2", "--out", out]);
    assert_eq!(code(&o), 1);
    assert_eq!(code(&wapgraph(&["replay", &format!("{out}/wap_refutations.json")])), 0);

    assert_eq!(code(&wapgraph(&["check-ap", "--class", "bogus", "--order", "3"])), 2);
    assert_eq!(code(&wapgraph(&["check-ap", "--class", "all", "--order", "9"])), 2);
    assert_eq!(code(&wapgraph(&["enumerate", "--order", "3"])), 2);
}

#[test]
fn amalgamate_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_g6(dir.path(), "a.g6", &wapgraph::Graph::empty(2));
    let b = write_g6(dir.path(), "b.g6", &wapgraph::Graph::from_edges(3, &[(0, 2), (1, 2)]).unwrap());
    let c = write_g6(dir.path(), "c.g6", &wapgraph::Graph::from_edges(4, &[(0, 2), (2, 3), (3, 1)]).unwrap());
    let out = dir.path().join("o");
    let o = wapgraph(&["amalgamate", "--class", "linear-forests", "--base", &a, "--left", &b, "--right", &c, "--cross-edges", "--out", out.to_str().unwrap()]);
    assert_eq!((code(&o), stdout(&o).as_str()), (1, "none\n"));
    assert_eq!(code(&wapgraph(&["replay", out.join("amalgam.json").to_str().unwrap()])), 0);
    let o = wapgraph(&["amalgamate", "--class", "all", "--base", &a, "--left", &b, "--right", &c, "--right-map", "1,0"]);
    assert_eq!(code(&o), 0);
    assert_eq!(io::from_graph6(stdout(&o).trim()).unwrap().order(), 5);
    assert_eq!(code(&wapgraph(&["amalgamate", "--class", "all", "--base", &a, "--left", &b, "--right", &c, "--left-map", "0,x"])), 2);
}

#[test]
fn chain_checkpoint_resume_and_diagnose() {
    let dir = tempfile::tempdir().unwrap();
    let run = |d: &Path, extra: &[&str]| {
        let mut args = vec!["chain", "--class", "all", "--seed", "4", "--out", d.to_str().unwrap()];
        args.extend_from_slice(extra);
        wapgraph(&args)
    };
    let (x, y) = (dir.path().join("x"), dir.path().join("y"));
    assert_eq!(code(&run(&x, &["--steps", "80"])), 0);
    assert_eq!(code(&run(&x, &["--steps", "70", "--resume"])), 0);
    assert_eq!(code(&run(&y, &["--steps", "150"])), 0);
    assert_eq!(fs::read(x.join("ledger.json")).unwrap(), fs::read(y.join("ledger.json")).unwrap());
    let o = run(&y, &["--steps", "0", "--resume", "--diagnose", "2"]);
    assert!(stdout(&o).contains("extension property (k = 2)"));
    assert_eq!(code(&wapgraph(&["replay", y.to_str().unwrap()])), 0);
    let o = run(&x, &["--steps", "10", "--class", "no-such-class"]);
    assert_eq!(code(&o), 2);
}
