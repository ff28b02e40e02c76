use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trafficflow")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines().map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn redirect_reproduces_three_lane_example() {
    let text = stdout(&["redirect", "--lanes", "3", "--initial", "11211221", "--anchor", "3", "--boundary", "padded:0:0"]);
    let lanes: Vec<String> = rows(&text).into_iter().skip(1).map(|r| r[1].clone()).collect();
    assert_eq!(lanes, ["10100110", "00101010", "01010101"]);
}

#[test]
fn pushforward_pair_at_one_half() {
    let text = stdout(&["pushforward", "--v", "1", "--word", "11", "--density", "0.5"]);
    assert_eq!(text, "v,word,p,t,probability,probability_exact\n1,11,0.5,1,0.1875,3/16\n");
}

#[test]
fn pushforward_distribution_sums_to_one() {
    let text = stdout(&["pushforward", "--v", "2", "--k", "3", "--density", "1/3"]);
    let table = rows(&text);
    assert_eq!(table.len(), 9);
    let total: f64 = table[1..].iter().map(|r| r[4].parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-8);
}

#[test]
fn simulate_zero_steps_echoes_input() {
    let text = stdout(&["simulate", "--initial", "0210", "--lanes", "2", "--steps", "0"]);
    assert_eq!(text, "step,configuration,particles,density,density_exact\n0,0210,3,0.75,3/4\n");
}

#[test]
fn simulate_superfast() {
    let text = stdout(&["simulate", "--initial", "1100", "--v", "inf", "--steps", "1"]);
    assert_eq!(rows(&text)[2][1], "1001");
}

#[test]
fn lifetime_rows_match() {
    let text = stdout(&["lifetime", "--n-max", "5"]);
    let table = rows(&text);
    assert_eq!(table[0], ["word", "length", "ones", "minimal_index", "predicted", "simulated", "match"]);
    let find = |w: &str| table.iter().find(|r| r[0] == w).unwrap().clone();
    assert_eq!(&find("001011")[4..], ["2", "2", "true"]);
    assert_eq!(&find("0011")[4..], ["1", "1", "true"]);
    assert_eq!(&find("0001011011")[4..], ["4", "4", "true"]);
    assert!(table[1..].iter().all(|r| r[6] == "true"));
    assert_eq!(table.len() - 1, 1 + 1 + 2 + 5 + 14);
}

#[test]
fn lifetime_budget_is_a_computational_error() {
    assert_eq!(run(&["lifetime", "--n-max", "11"]).status.code(), Some(1));
}

#[test]
fn fundamental_diagram_rows() {
    let text = stdout(&["fundamental-diagram", "--v-list", "1,2", "--densities", "0,0.3,0.5", "--length", "100"]);
    let table = rows(&text);
    assert_eq!(table[0], ["v", "M", "L", "density", "flux_measured", "flux_predicted", "transient_steps"]);
    let row = |v: &str, rho: &str| table.iter().find(|r| r[0] == v && r[3] == rho).unwrap().clone();
    assert_eq!(row("1", "0.3")[4..6], ["0.3", "0.3"]);
    assert_eq!(row("1", "0")[4..6], ["0", "0"]);
    assert_eq!(row("2", "0.5")[4..6], ["0.5", "0.5"]);
}

#[test]
fn fundamental_diagram_rejects_short_rings() {
    assert_eq!(run(&["fundamental-diagram", "--length", "5"]).status.code(), Some(2));
}

#[test]
fn converge_empty_ring_is_clean() {
    let text = stdout(&["converge", "--density", "0", "--length", "64", "--steps", "0", "--seeds", "1"]);
    assert_eq!(rows(&text)[1][2], "CLEAN");
}

#[test]
fn tracer_along_free_flow() {
    let text = stdout(&["tracer", "--initial", "1000100010001000", "--v", "2", "--steps", "8", "--warmup", "0", "--start", "-1"]);
    let table = rows(&text);
    assert_eq!(table[0], ["step", "position", "displacement", "running_velocity"]);
    let positions: Vec<i64> = table[1..].iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(positions.windows(2).skip(1).all(|w| w[1] - w[0] == 2));
}

#[test]
fn identical_seeds_give_identical_bytes() {
    let args = ["converge", "--length", "200", "--steps", "40", "--seeds", "3", "--every", "10", "--seed", "17"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let fd = ["fundamental-diagram", "--length", "50", "--points", "4", "--lanes", "2", "--v", "2", "--seed", "3"];
    assert_eq!(run(&fd).stdout, run(&fd).stdout);
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.conf");
    fs::write(&config, "# pushforward settings\nv = 1\nword = 11\ndensity = 1/2  # exact\nsteps = 3\n").unwrap();
    let path = config.to_str().unwrap();
    let text = stdout(&["pushforward", "--config", path]);
    assert!(text.contains("\n1,11,0.5,3,"), "{text}");
    let text = stdout(&["pushforward", "--config", path, "--steps", "1"]);
    assert!(text.contains("\n1,11,0.5,1,0.1875,3/16\n"), "{text}");
}

#[test]
fn config_file_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.conf");
    fs::write(&config, "speed = 3\n").unwrap();
    let out = run(&["simulate", "--initial", "01", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown key"));
}

#[test]
fn output_file_uses_lf_endings() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("out.csv");
    stdout(&["simulate", "--initial", "0110", "--steps", "2", "--output", target.to_str().unwrap()]);
    let bytes = fs::read(&target).unwrap();
    assert!(!bytes.contains(&b'\r'));
    assert_eq!(String::from_utf8(bytes).unwrap().lines().count(), 4);
}

#[test]
fn usage_and_computational_exit_codes() {
    assert_eq!(run(&["simulate", "--steps", "x"]).status.code(), Some(2));
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["simulate", "--initial", "0120"]).status.code(), Some(1));
    assert_eq!(run(&["simulate", "--initial", "00", "--v", "inf"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn redirect_assignments_list_every_particle() {
    let text = stdout(&["redirect", "--lanes", "2", "--initial", "0210", "--assignments"]);
    assert_eq!(text, "site,slot,lane\n1,0,1\n1,1,0\n2,0,1\n");
    assert_eq!(run(&["redirect", "--lanes", "2", "--initial", "0210", "--assignments", "--anchor", "1"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("lanes.conf");
    fs::write(&config, "lanes = 2\ninitial = 0210\nassignments = true\n").unwrap();
    assert_eq!(stdout(&["redirect", "--config", config.to_str().unwrap()]), text);
}
