//! End-to-end tests against the built `ec` binary.

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn ec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ec"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ec_with_stdin(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_ec"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child.stdin.as_mut().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn measure_reports_fields_in_order() {
    let out = ec(&["measure", "--tt", "0111"]);
    assert!(out.status.success());
    let line = stdout(&out);
    assert!(line.contains("d=2"));
    assert!(line.contains("psens=1"));
    assert!(line.starts_with("n=2 d=2 s=2 psens=1 bs=2 c=2 deg=2 dependent=0,1"));
}

#[test]
fn gen_or_pipes_into_energy() {
    let netlist = stdout(&ec(&["gen", "or", "--n", "16"]));
    let out = ec_with_stdin(&["energy", "--exhaustive"], &netlist);
    assert!(out.status.success());
    let line = stdout(&out);
    let energy: usize = line
        .split_whitespace()
        .find_map(|kv| kv.strip_prefix("max_energy="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(energy <= 20, "energy {energy} above the square-root bound");
    assert!(line.contains("mode=exhaustive"));
}

#[test]
fn energy_histogram_covers_the_input_space() {
    let netlist = stdout(&ec(&["gen", "or", "--n", "9"]));
    let out = ec_with_stdin(&["energy", "--exhaustive", "--histogram"], &netlist);
    assert!(out.status.success());
    let text = stdout(&out);
    let histogram = text
        .lines()
        .find_map(|l| l.strip_prefix("histogram="))
        .expect("histogram line");
    let total: u64 = histogram
        .split(',')
        .map(|pair| pair.split_once(':').unwrap().1.parse::<u64>().unwrap())
        .sum();
    assert_eq!(total, 512);
    // Histogram needs the exhaustive sweep.
    let out = ec_with_stdin(&["energy", "--input", "000000000", "--histogram"], &netlist);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn energy_of_constant_circuit_is_zero() {
    let out = ec_with_stdin(
        &["energy", "--input", "0000"],
        "inputs 4\ng0 = CONST 0\nout g0\n",
    );
    assert!(out.status.success());
    assert_eq!(stdout(&out), "energy=0 output=0\n");
}

#[test]
fn netlist_round_trips_through_export() {
    for gen_args in [
        vec!["gen", "addr", "--n", "2"],
        vec!["gen", "eaddr", "--n", "1", "--g", "10"],
        vec!["gen", "linear", "--tt", "0111"],
        vec!["gen", "quadratic", "--tt", "0110"],
    ] {
        let netlist = stdout(&ec(&gen_args));
        let out = ec_with_stdin(&["export", "--format", "netlist"], &netlist);
        assert!(out.status.success());
        assert_eq!(stdout(&out), netlist, "round trip for {gen_args:?}");
    }
}

#[test]
fn identical_invocations_are_byte_identical() {
    for args in [
        vec!["gen", "or", "--n", "9", "--stats"],
        vec!["measure", "--tt", "01100110"],
        vec!["oracle", "--tt", "0110", "--max-gates", "6"],
    ] {
        assert_eq!(stdout(&ec(&args)), stdout(&ec(&args)), "{args:?}");
    }
    // The parallel exhaustive sweep reduces to the same report every run.
    let netlist = stdout(&ec(&["gen", "or", "--n", "16"]));
    let first = stdout(&ec_with_stdin(&["energy", "--exhaustive", "--histogram"], &netlist));
    let second = stdout(&ec_with_stdin(&["energy", "--exhaustive", "--histogram"], &netlist));
    assert_eq!(first, second);
}

#[test]
fn stats_comment_survives_reparsing() {
    let netlist = stdout(&ec(&["gen", "or", "--n", "9", "--stats"]));
    assert!(netlist.starts_with("# gates_total="));
    assert!(netlist.contains("bound_satisfied=true"));
    let out = ec_with_stdin(&["export", "--format", "netlist"], &netlist);
    assert!(out.status.success());
}

#[test]
fn compile_linear_from_tree_text() {
    let out = ec(&["compile", "linear", "--tree", "(x0 (x1 0 1) 1)"]);
    assert!(out.status.success());
    let netlist = stdout(&out);
    // Variable 0 high takes the root's 1-leaf: only the output disjunction fires.
    let energy_out = ec_with_stdin(&["energy", "--input", "10"], &netlist);
    assert_eq!(stdout(&energy_out).trim(), "energy=1 output=1");
}

#[test]
fn oracle_certifies_and2() {
    let out = ec(&["oracle", "--tt", "0001", "--max-gates", "6"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "lower=1 upper=1 certified=true witness_gates=1\n");
    let with_witness = ec(&["oracle", "--tt", "0001", "--max-gates", "6", "--witness"]);
    assert!(stdout(&with_witness).contains("= AND"));
}

#[test]
fn verify_suites_run_from_pipes() {
    let or9 = stdout(&ec(&["gen", "or", "--n", "9"]));
    let out = ec_with_stdin(&["verify", "--suite", "lemma5"], &or9);
    assert!(out.status.success());
    assert!(stdout(&out).contains("passed=true"));

    let out = ec_with_stdin(&["verify", "--suite", "bounds"], &or9);
    assert!(out.status.success());

    // A monotone tree passes the monotone suite.
    let monotone = "inputs 2\ng0 = IN 0\ng1 = IN 1\ng2 = OR g0 g1\nout g2\n";
    let out = ec_with_stdin(&["verify", "--suite", "lemma4"], monotone);
    assert!(out.status.success());

    // The monotone suite refuses circuits with negations (domain error).
    let out = ec_with_stdin(&["verify", "--suite", "lemma4"], &or9);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn analyze_tree_and_path() {
    let addr = stdout(&ec(&["gen", "addr", "--n", "1"]));
    let out = ec_with_stdin(&["analyze", "tree"], &addr);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("function_matches=true"));
    assert!(text.contains("min_depth=2"));

    let out = ec_with_stdin(
        &["analyze", "path", "--input", "000", "--flip", "1"],
        &addr,
    );
    assert!(out.status.success());
    let line = stdout(&out);
    assert!(line.starts_with("path=g"));
    assert!(line.contains("length="));
}

#[test]
fn export_dot_emits_graphviz() {
    let out = ec_with_stdin(
        &["export", "--format", "dot"],
        "inputs 1\ng0 = IN 0\ng1 = NOT g0\nout g1\n",
    );
    assert!(out.status.success());
    let dot = stdout(&out);
    assert!(dot.starts_with("digraph circuit {"));
    assert!(dot.contains("g0 -> g1;"));
}

#[test]
fn truth_tables_load_from_files() {
    let path = std::env::temp_dir().join(format!("ec-tt-{}.txt", std::process::id()));
    std::fs::write(&path, "0111\n").unwrap();
    let arg = format!("@{}", path.display());
    let out = ec(&["measure", "--tt", &arg]);
    std::fs::remove_file(&path).ok();
    assert!(out.status.success());
    assert!(stdout(&out).contains("d=2"));
}

#[test]
fn exit_codes() {
    // Usage error: missing required flag.
    let out = ec(&["measure"]);
    assert_eq!(out.status.code(), Some(2));
    // Domain error: malformed truth table.
    let out = ec(&["measure", "--tt", "011"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().starts_with("error:"));
    // Domain error: oracle cap.
    let out = ec(&["oracle", "--tt", "0110", "--max-gates", "9"]);
    assert_eq!(out.status.code(), Some(1));
    // Usage errors: energy needs exactly one mode flag.
    let out = ec_with_stdin(&["energy"], "inputs 1\ng0 = IN 0\nout g0\n");
    assert_eq!(out.status.code(), Some(2));
    let out = ec_with_stdin(
        &["energy", "--input", "1", "--exhaustive"],
        "inputs 1\ng0 = IN 0\nout g0\n",
    );
    assert_eq!(out.status.code(), Some(2));
}
