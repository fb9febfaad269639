use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use longhaul_core::io::write_instance;
use longhaul_core::example_instance;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_longhaul"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn example_file(dir: &Path) -> PathBuf {
    let f = dir.join("example.json");
    write_instance(&f, &example_instance()).unwrap();
    f
}

fn generated(dir: &Path, preset: &str, seed: u64, extra: &[&str]) -> PathBuf {
    let f = dir.join(format!("{preset}-{seed}.json"));
    let seed = seed.to_string();
    let mut args = vec!["generate", "--preset", preset, "--seed", &seed, "-o", p(&f)];
    args.extend_from_slice(extra);
    assert!(run(&args).status.success());
    f
}

fn csv_lines(o: &Output) -> Vec<Vec<String>> {
    stdout(o)
        .lines()
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn generate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for f in [&a, &b] {
        assert!(run(&["generate", "--seed", "7", "-o", p(f)]).status.success());
    }
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    assert_eq!(run(&["generate", "--seed", "7"]).stdout, bytes);
    assert_ne!(run(&["generate", "--seed", "8"]).stdout, bytes);
    assert!(run(&["validate", p(&a)]).status.success());
}

#[test]
fn solve_example_with_sync1_and_warm_start() {
    let dir = tempfile::tempdir().unwrap();
    let inst = example_file(dir.path());
    let plan = dir.path().join("plan.json");
    let o = run(&[
        "solve",
        p(&inst),
        "--flavor",
        "ltr",
        "--sync",
        "sync1",
        "--warm-start",
        "--plan-out",
        p(&plan),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_lines(&o);
    let col = |name: &str| rows[0].iter().position(|c| c == name).unwrap();
    assert_eq!(rows[1][col("status")], "Optimal");
    assert_eq!(rows[1][col("objective")].parse::<f64>().unwrap(), 2.0);
    let v = run(&["validate", p(&plan), "--instance", p(&inst)]);
    assert!(v.status.success());
    assert!(stdout(&v).starts_with("ok: plan cost 2"));
}

#[test]
fn csv_headers_are_stable() {
    let dir = tempfile::tempdir().unwrap();
    let inst = example_file(dir.path());

    let o = run(&["solve", p(&inst), "--flavor", "ltc"]);
    assert_eq!(
        stdout(&o).lines().next().unwrap(),
        "instance,formulation,status,objective,bound,gap_pct,root_lp,root_bound,nodes,cuts_added,time_s"
    );
    let o = run(&["solve", p(&inst), "--no-header"]);
    assert_eq!(stdout(&o).lines().count(), 1);

    let o = run(&["compare", p(&inst), p(&inst)]);
    assert!(o.status.success());
    let rows = csv_lines(&o);
    assert_eq!(
        rows[0].join(","),
        "formulation,vars,cons,solved,time_all_s,time_solved_s,gap_all_pct,gap_unsolved_pct,nodes_solved"
    );
    let names: Vec<&str> = rows[1..].iter().map(|r| r[0].as_str()).collect();
    assert_eq!(names, ["LT", "LTC", "LTR"]);
    assert!(rows[1..].iter().all(|r| r[3] == "2" && r[6] == "0.0" && r[7].is_empty()));
}

#[test]
fn cuts_report_on_an_s2_shaped_instance() {
    let dir = tempfile::tempdir().unwrap();
    // The full S2 network and horizon with three requests.
    let inst = generated(dir.path(), "s2", 3, &["--requests", "3"]);
    let o = run(&["cuts", p(&inst), "--flavor", "ltc", "--families", "pd2", "--optimum", "100"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_lines(&o);
    assert_eq!(rows[0].join(","), "instance,formulation,ineq_count,time_s,root_gap");
    assert_eq!(rows.len(), 3);
    assert_eq!((rows[1][1].as_str(), rows[1][2].as_str()), ("LTC", "0"));
    assert_eq!(rows[2][1], "LTC + PD2");
    assert!(rows[2][2].parse::<usize>().unwrap() > 0);
    let gaps: Vec<f64> = rows[1..].iter().map(|r| r[4].parse().unwrap()).collect();
    assert!(gaps[1] <= gaps[0] + 1e-9);
}

#[test]
fn cuts_on_the_example_use_the_solved_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let inst = example_file(dir.path());
    let o = run(&["cuts", p(&inst), "--flavor", "lt", "--families", "prec,pd1,pd3,sec1", "--sec-k", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_lines(&o);
    let labels: Vec<&str> = rows[1..].iter().map(|r| r[1].as_str()).collect();
    assert_eq!(labels, ["LT", "LT + PREC", "LT + PD1", "LT + PD3-V2-A", "LT + SEC1-R2"]);
    assert!(rows[1..].iter().all(|r| (0.0..=100.0).contains(&r[4].parse::<f64>().unwrap())));
}

#[test]
fn build_is_reproducible_and_named() {
    let dir = tempfile::tempdir().unwrap();
    let inst = example_file(dir.path());
    let a = run(&["build", p(&inst), "--flavor", "lt", "--cuts", "pd2"]);
    let b = run(&["build", p(&inst), "--flavor", "lt", "--cuts", "pd2"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert_eq!(text.lines().filter(|l| l.starts_with(" pick_once_r")).count(), 2);
    assert!(text.contains(" cut_pd2_0:"));
    longhaul_core::LpFile::parse(&text).unwrap();
}

#[test]
fn solve_outputs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let inst = example_file(dir.path());
    let mut outs = Vec::new();
    for k in 0..2 {
        let plan = dir.path().join(format!("plan{k}.json"));
        let res = dir.path().join(format!("res{k}.json"));
        let o = run(&["solve", p(&inst), "--flavor", "ltc", "--cuts", "all", "--plan-out", p(&plan), "--result-out", p(&res)]);
        assert!(o.status.success());
        outs.push((std::fs::read(plan).unwrap(), std::fs::read(res).unwrap()));
    }
    assert_eq!(outs[0], outs[1]);
}

#[test]
fn relax_reports_a_lower_bound() {
    let dir = tempfile::tempdir().unwrap();
    let inst = example_file(dir.path());
    let o = run(&["relax", p(&inst), "--flavor", "ltr"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], "Optimal");
    assert!(v["value"].as_f64().unwrap() <= 2.0 + 1e-6);
}

#[test]
fn oracle_agrees_with_solve() {
    let dir = tempfile::tempdir().unwrap();
    let inst = example_file(dir.path());
    let plan = dir.path().join("oracle.json");
    let o = run(&["oracle", p(&inst), "--plan-out", p(&plan)]);
    assert_eq!(stdout(&o).trim(), "optimal 2");
    assert!(run(&["validate", p(&plan), "--instance", p(&inst)]).status.success());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    let o = run(&["--json-errors", "validate", p(&missing)]);
    assert_eq!(o.status.code(), Some(4));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["code"], 4);
    assert!(err["error"].as_str().unwrap().len() > 3);

    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{").unwrap();
    let o = run(&["solve", p(&garbage)]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(String::from_utf8_lossy(&o.stderr).lines().count(), 1);

    let inst = example_file(dir.path());
    assert_eq!(run(&["solve", p(&inst), "--cuts", "nope"]).status.code(), Some(4));
    assert_eq!(run(&["solve", p(&inst), "--no-such-flag"]).status.code(), Some(4));
    assert_eq!(run(&[]).status.code(), Some(4));
    assert_eq!(run(&["--help"]).status.code(), Some(0));

    // Two requests whose deliveries need the only truck at the same time.
    let mut tight = example_instance();
    tight.requests[1].delivery.window = tight.requests[0].delivery.window;
    tight.requests[1].delivery.location = tight.requests[0].delivery.location;
    tight.requests[1].pickup = tight.requests[0].pickup.clone();
    tight.trucks.truncate(1);
    let f = dir.path().join("tight.json");
    write_instance(&f, &tight).unwrap();
    let oracle = run(&["oracle", p(&f)]);
    let solve = run(&["solve", p(&f), "--flavor", "ltc"]);
    assert_eq!(stdout(&oracle).trim(), "infeasible");
    assert_eq!(oracle.status.code(), Some(2));
    assert_eq!(solve.status.code(), Some(2));

    // A root-only run on a formulation whose root is fractional.
    let o = run(&["solve", p(&inst), "--flavor", "lt", "--node-limit", "0"]);
    let rows = csv_lines(&o);
    if rows[1][2] != "Optimal" {
        assert_eq!(o.status.code(), Some(3));
    }

    let plan = dir.path().join("bad_plan.json");
    std::fs::write(&plan, "{\"schema_version\":1,\"trucks\":[[],[]],\"drivers\":[[],[]],\"days_off\":[[],[]]}").unwrap();
    let o = run(&["validate", p(&plan), "--instance", p(&inst)]);
    assert_eq!(o.status.code(), Some(2));
}
