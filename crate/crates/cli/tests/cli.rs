use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use finitemix_core::builders::simple_base;
use finitemix_core::io::{from_json, to_json};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_finitemix"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn build_examples() {
    let o = run(&["build", "--family", "base", "--n", "6", "--k", "1"]);
    assert!(o.status.success());
    let seq = from_json(&stdout(&o)).unwrap();
    assert_eq!(seq.len(), 4);
    assert!(stderr(&o).contains("length=4"));
    assert!(stderr(&o).contains("length_bound=7.1699"));

    let o = run(&["build", "--family", "hhc", "--n", "12", "--k", "2"]);
    assert_eq!(from_json(&stdout(&o)).unwrap().len(), 3);

    let o = run(&["build", "--family", "1peer-hypercube", "--n", "6"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.starts_with("error: NonPowerOfTwo:"), "{err}");
    assert_eq!(err.lines().count(), 1);
    assert!(o.stdout.is_empty());
}

#[test]
fn build_accepts_full_tags_and_grids() {
    let o = run(&[
        "build", "--family", "torus", "--n", "12", "--rows", "2", "--cols", "6",
    ]);
    assert!(o.status.success());
    assert_eq!(from_json(&stdout(&o)).unwrap().builder_tag(), "torus:2x6");
    let o = run(&["build", "--family", "simple-base:k=2", "--n", "7"]);
    assert_eq!(from_json(&stdout(&o)).unwrap().len(), 4);
    let o = run(&["build", "--family", "base", "--n", "6"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error: UnknownFamily:"));
}

#[test]
fn usage_errors_are_single_line() {
    for args in [
        vec!["build", "--n", "3"],
        vec!["frobnicate"],
        vec!["build", "--family", "ring", "--n", "x"],
        vec!["build", "--family", "ring", "--n", "5", "--extra"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let err = stderr(&o);
        assert!(err.starts_with("error: Usage:"), "{err}");
        assert_eq!(err.lines().count(), 1, "{err}");
    }
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("base.json");
    let ring = dir.path().join("ring.json");
    let bad = dir.path().join("bad.json");
    run(&[
        "build",
        "--family",
        "base",
        "--n",
        "25",
        "--k",
        "1",
        "--out",
        path(&base),
    ]);
    run(&[
        "build",
        "--family",
        "ring",
        "--n",
        "25",
        "--out",
        path(&ring),
    ]);
    fs::write(&bad, "{\"n\": 3,").unwrap();

    let o = run(&["verify", path(&base)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("finite_time=true"));

    let o = run(&["verify", path(&ring)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("finite_time=false"));

    let o = run(&["verify", path(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error: MalformedJson:"));

    let o = run(&["verify", path(&dir.path().join("missing.json"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error: Io:"));
}

#[test]
fn verify_reports_violations() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("heavy.json");
    fs::write(
        &file,
        r#"{"n":3,"k":1,"builder":"custom","graphs":[{"directed":false,"edges":[[1,2,"1/2"],[2,3,"1/2"]]}]}"#,
    )
    .unwrap();
    let o = run(&["verify", path(&file)]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(
        out.contains("violation: graph 1: node 2 has degree 2 > k=1"),
        "{out}"
    );
    assert!(out.contains("valid=false"));
}

#[test]
fn json_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("s.json");
    let o = run(&[
        "build",
        "--family",
        "simple-base",
        "--n",
        "7",
        "--k",
        "2",
        "--out",
        path(&file),
    ]);
    assert!(o.status.success());
    let text = fs::read_to_string(&file).unwrap();
    let seq = from_json(&text).unwrap();
    assert_eq!(seq, simple_base(7, 2).unwrap());
    assert_eq!(to_json(&seq), text);
    assert!(text.contains("\"3/7\""));
}

#[test]
fn gossip_on_five_thousand_nodes() {
    let o = run(&[
        "gossip", "--family", "base", "--k", "1", "--n", "5000", "--iters", "40",
    ]);
    assert!(o.status.success());
    let errors: Vec<f64> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(errors.len(), 41);
    let hit = errors.iter().position(|&e| e <= 1e-18 * errors[0]).unwrap();
    assert!(hit <= 26, "{hit}");
}

#[test]
fn gossip_from_file_matches_built_family() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("s.json");
    run(&["build", "--family", "exp", "--n", "9", "--out", path(&file)]);
    let a = run(&[
        "gossip",
        "--input",
        path(&file),
        "--iters",
        "6",
        "--seed",
        "4",
        "--d",
        "2",
    ]);
    let b = run(&[
        "gossip", "--family", "exp", "--n", "9", "--iters", "6", "--seed", "4", "--d", "2",
    ]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let o = run(&[
        "gossip",
        "--input",
        path(&file),
        "--family",
        "ring",
        "--n",
        "9",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn rate_of_small_ring() {
    let o = run(&["rate", "--family", "ring", "--n", "4"]);
    assert!(o.status.success());
    let beta: f64 = stdout(&o)
        .trim()
        .strip_prefix("beta=")
        .unwrap()
        .parse()
        .unwrap();
    assert!((beta - 1.0 / 3.0).abs() < 1e-9);

    let o = run(&["rate", "--family", "base", "--n", "6", "--k", "1"]);
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("round=")).count(), 4);
    assert!(out.contains("finite_time=true m=4"));
}

#[test]
fn export_dot_writes_one_file_per_round() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("s.json");
    let outdir = dir.path().join("dots");
    run(&[
        "build",
        "--family",
        "simple-base",
        "--n",
        "5",
        "--k",
        "1",
        "--out",
        path(&file),
    ]);
    let o = run(&["export-dot", path(&file), "--outdir", path(&outdir)]);
    assert!(o.status.success());
    let mut names: Vec<String> = fs::read_dir(&outdir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        [
            "round_1.dot",
            "round_2.dot",
            "round_3.dot",
            "round_4.dot",
            "round_5.dot"
        ]
    );
    let third = fs::read_to_string(outdir.join("round_3.dot")).unwrap();
    assert!(third.contains("4 -- 5 [label=\"4/5\"];"));
}

#[test]
fn dsgd_saves_and_reloads_problem() {
    let dir = tempfile::tempdir().unwrap();
    let problem = dir.path().join("p.json");
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let common = [
        "--family", "base", "--k", "2", "--eta", "0.05", "--rounds", "20", "--seed", "3",
    ];
    let mut first = vec![
        "dsgd", "--n", "9", "--d", "3", "--zeta", "1", "--sigma", "0.1",
    ];
    first.extend(common);
    first.extend(["--save-problem", path(&problem), "--out", path(&a)]);
    assert!(run(&first).status.success());
    let mut second = vec!["dsgd", "--problem", path(&problem)];
    second.extend(common);
    second.extend(["--out", path(&b)]);
    assert!(run(&second).status.success());
    let csv = fs::read_to_string(&a).unwrap();
    assert_eq!(csv, fs::read_to_string(&b).unwrap());
    assert!(csv.starts_with("round,grad_norm_sq,consensus_error,suboptimality\n"));
    assert_eq!(csv.lines().count(), 22);
}

#[test]
fn failed_runs_leave_no_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never.csv");
    let o = run(&[
        "dsgd",
        "--n",
        "6",
        "--mu",
        "3",
        "--l-smooth",
        "1",
        "--family",
        "ring",
        "--eta",
        "0.1",
        "--rounds",
        "5",
        "--out",
        path(&out),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error: BadSpectrum:"));
    assert!(!out.exists());
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn sweeps_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let rates = dir.path().join("rates.json");
    fs::write(
        &rates,
        r#"{"kind":"rate_table","families":["ring","base","1peer-hypercube"],"n":[4,6],"k":[1,2]}"#,
    )
    .unwrap();
    let out = dir.path().join("rates.csv");
    let o = Command::new(env!("CARGO_BIN_EXE_finitemix"))
        .args(["sweep", "--config", path(&rates), "--out", path(&out)])
        .env("FINITEMIX_THREADS", "3")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "family,n,k,length,max_degree,finite_time,beta");
    assert_eq!(lines.len(), 1 + 2 + 4 + 2);
    assert!(lines.contains(&"base:k=1,6,1,4,1,true,"));
    assert!(lines
        .iter()
        .any(|l| l.starts_with("1peer-hypercube,6,") && l.contains("error")));

    let problem = dir.path().join("p.json");
    run(&[
        "dsgd",
        "--n",
        "8",
        "--d",
        "2",
        "--zeta",
        "1",
        "--family",
        "ring",
        "--eta",
        "0.1",
        "--rounds",
        "1",
        "--save-problem",
        path(&problem),
    ]);
    let cfg = dir.path().join("dsgd.json");
    fs::write(
        &cfg,
        r#"{"kind":"dsgd","problem_file":"p.json","families":["ring","base:k=1","1peer-hypercube"],"eta":0.05,"rounds":30}"#,
    )
    .unwrap();
    let o = run(&["sweep", "--config", path(&cfg)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("family,length,final_grad_norm_sq,mean_consensus_error,comm_cost\n"));
    assert_eq!(out.lines().count(), 4);

    fs::write(
        &cfg,
        r#"{"kind":"dsgd","families":["ring"],"eta":0.1,"rounds":1}"#,
    )
    .unwrap();
    let o = run(&["sweep", "--config", path(&cfg)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error: BadConfig:"));
}
