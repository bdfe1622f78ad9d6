//! End-to-end checks of the binary: generate, plan, verify, re-plan,
//! exit codes, and byte-determinism of emitted documents.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_sprinkler")
}

fn workdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sprinkler-cli-test-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

fn small_config(dir: &Path) -> PathBuf {
    let p = dir.join("small.config");
    write(&p, "sprinkler-config v1\nm1 80\nm2 160\nseed 7\n");
    p
}

fn gen_instance(dir: &Path) -> (PathBuf, PathBuf) {
    let prefix = dir.join("inst");
    ok(&[
        "gen",
        "--rows",
        "5",
        "--cols",
        "5",
        "--demand-frac",
        "0.7",
        "--arc-frac",
        "0.2",
        "--depots",
        "2",
        "--seed",
        "3",
        "--out",
        prefix.to_str().unwrap(),
    ]);
    (dir.join("inst.network"), dir.join("inst.demands"))
}

#[test]
fn plan_simulate_round_trip() {
    let dir = workdir("plan");
    let (net, dem) = gen_instance(&dir);
    let cfg = small_config(&dir);
    let plan = dir.join("plan.txt");
    ok(&[
        "plan",
        "--network",
        net.to_str().unwrap(),
        "--demands",
        dem.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        plan.to_str().unwrap(),
        "--kpi",
        dir.join("plan.kpi").to_str().unwrap(),
        "--trace",
        dir.join("plan.trace").to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&plan).unwrap();
    assert!(text.starts_with("sprinkler-plan v1\n"));
    assert!(text.contains("stage fixed"));
    let kpi = std::fs::read_to_string(dir.join("plan.kpi")).unwrap();
    assert!(kpi.starts_with("scenario\tresponse_time"));
    assert!(!std::fs::read_to_string(dir.join("plan.trace")).unwrap().is_empty());

    let out = ok(&[
        "simulate",
        "--network",
        net.to_str().unwrap(),
        "--demands",
        dem.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
        "--plan",
        plan.to_str().unwrap(),
    ]);
    assert!(out.contains("plan verified"));
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = workdir("determinism");
    let (net, dem) = gen_instance(&dir);
    let cfg = small_config(&dir);
    for name in ["a", "b"] {
        ok(&[
            "plan",
            "--network",
            net.to_str().unwrap(),
            "--demands",
            dem.to_str().unwrap(),
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            dir.join(format!("{name}.plan")).to_str().unwrap(),
            "--trace",
            dir.join(format!("{name}.trace")).to_str().unwrap(),
        ]);
    }
    let a = std::fs::read(dir.join("a.plan")).unwrap();
    let b = std::fs::read(dir.join("b.plan")).unwrap();
    assert_eq!(a, b);
    let a = std::fs::read(dir.join("a.trace")).unwrap();
    let b = std::fs::read(dir.join("b.trace")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn replan_emits_plan_and_report() {
    let dir = workdir("replan");
    let (net, dem) = gen_instance(&dir);
    let cfg = small_config(&dir);
    let plan = dir.join("plan.txt");
    ok(&[
        "plan",
        "--network",
        net.to_str().unwrap(),
        "--demands",
        dem.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        plan.to_str().unwrap(),
    ]);
    let events = dir.join("ev.txt");
    write(&events, "sprinkler-events v1\nevent 10 30 1 2\n");
    let replanned = dir.join("replanned.txt");
    let report = dir.join("report.txt");
    ok(&[
        "replan",
        "--network",
        net.to_str().unwrap(),
        "--demands",
        dem.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
        "--plan",
        plan.to_str().unwrap(),
        "--events",
        events.to_str().unwrap(),
        "--out",
        replanned.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&replanned).unwrap();
    assert!(text.contains("stage replan"));
    let report = std::fs::read_to_string(&report).unwrap();
    assert!(report.contains("replan at 10 min"));
    assert!(report.contains("objective_after"));

    // the adjusted plan still verifies
    ok(&[
        "simulate",
        "--network",
        net.to_str().unwrap(),
        "--demands",
        dem.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
        "--plan",
        replanned.to_str().unwrap(),
    ]);
}

#[test]
fn sweep_and_bench_emit_tables() {
    let dir = workdir("tables");
    let (net, dem) = gen_instance(&dir);
    let cfg = small_config(&dir);
    let events = dir.join("ev.txt");
    write(&events, "sprinkler-events v1\nevent 10 30 1 2\n");
    let sweep = ok(&[
        "sweep",
        "--network",
        net.to_str().unwrap(),
        "--demands",
        dem.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
        "--events",
        events.to_str().unwrap(),
        "--sweep-param",
        "response-time",
        "--sweep-values",
        "5,10,15",
    ]);
    assert_eq!(sweep.lines().count(), 4); // header + one row per value
    assert!(sweep.starts_with("scenario\t"));

    let bench = ok(&[
        "bench",
        "--network",
        net.to_str().unwrap(),
        "--demands",
        dem.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
        "--runs",
        "2",
    ]);
    let mut lines = bench.lines();
    assert_eq!(lines.next(), Some("variant\tobj\tt_s\tobj_1min\tobj_5min\tave\tnum"));
    assert!(lines.next().unwrap().starts_with("improved\t"));
    assert!(lines.next().unwrap().starts_with("plain\t"));
}

#[test]
fn exit_codes_follow_failure_class() {
    let dir = workdir("exitcodes");
    let (net, dem) = gen_instance(&dir);
    // malformed network: parse error, exit 2
    let broken = dir.join("broken.network");
    write(&broken, "sprinkler-network v1\nlink 0 1 road 50\n");
    let out = run(&[
        "plan",
        "--network",
        broken.to_str().unwrap(),
        "--demands",
        dem.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));

    // infeasible: tank smaller than a single street
    let tiny = dir.join("tiny.config");
    write(&tiny, "sprinkler-config v1\ncapacity 10\n");
    let out = run(&[
        "plan",
        "--network",
        net.to_str().unwrap(),
        "--demands",
        dem.to_str().unwrap(),
        "--config",
        tiny.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));

    // oracle cap: internal limitation, exit 4
    let out = run(&[
        "brute",
        "--network",
        net.to_str().unwrap(),
        "--demands",
        dem.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn brute_solves_tiny_instances() {
    let dir = workdir("brute");
    let prefix = dir.join("tiny");
    ok(&[
        "gen",
        "--rows",
        "2",
        "--cols",
        "2",
        "--demand-frac",
        "1",
        "--arc-frac",
        "0",
        "--depots",
        "1",
        "--seed",
        "1",
        "--out",
        prefix.to_str().unwrap(),
    ]);
    let out = ok(&[
        "brute",
        "--network",
        dir.join("tiny.network").to_str().unwrap(),
        "--demands",
        dir.join("tiny.demands").to_str().unwrap(),
    ]);
    assert!(out.starts_with("optimum "));
}
