use std::fs;
use std::process::{Command, Output};
use translator_lab::elliptic::OperatorParams;
use translator_lab::geometry::Point;
use translator_lab::Domain;
use translator_lab_cli::args::{BoundaryData, Command as Cmd};
use translator_lab_cli::{parse_args, ArgsError};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_translator-lab")).args(args).output().unwrap()
}

fn parse(args: &[&str]) -> Result<Cmd, ArgsError> {
    parse_args(std::iter::once("translator-lab").chain(args.iter().copied())).map(|c| c.command)
}

fn usage_flag(args: &[&str]) -> String {
    match parse(args) {
        Err(ArgsError::Usage(e)) => e.flag,
        other => panic!("expected a usage error, got {other:?}"),
    }
}

#[test]
fn solve_config_has_defaults() {
    let Cmd::Solve { problem, params, out } = parse(&["solve", "--domain", "disk:1.0", "--phi", "0", "--n", "64"]).unwrap() else {
        panic!("wrong subcommand");
    };
    assert_eq!(problem.domain, Domain::disk(Point::default(), 1.0).unwrap());
    assert_eq!(problem.n, 64);
    assert_eq!(problem.options.steps, 10);
    assert_eq!(problem.options.tol, 1e-10);
    assert_eq!(params, OperatorParams::translator(1.0));
    assert!(matches!(&problem.phi, BoundaryData::Expr(e) if e.eval(0.3, 0.7) == 0.0));
    assert_eq!(out, None);
}

#[test]
#[allow(clippy::approx_constant)]
fn grim_config() {
    let Cmd::Grim { theta, sample, seed, .. } = parse(&["grim", "--theta", "0.5236", "--sample", "100"]).unwrap() else {
        panic!("wrong subcommand");
    };
    assert_eq!((theta, sample, seed), (0.5236, 100, 0));
}

#[test]
fn usage_errors_name_the_flag() {
    assert_eq!(usage_flag(&["solve", "--domain", "disk:1", "--n", "-3"]), "--n");
    assert_eq!(usage_flag(&["solve", "--domain", "disk:1", "--phi", "x^^2"]), "--phi");
    assert_eq!(usage_flag(&["solve", "--domain", "triangle:1"]), "--domain");
    assert_eq!(usage_flag(&["solve", "--domain", "disk:1", "--frobnicate", "1"]), "--frobnicate");
    assert_eq!(usage_flag(&["solve", "--domain", "disk:1", "--t", "1.5"]), "--t");
    assert_eq!(usage_flag(&["grim", "--theta", "1.6"]), "--theta");
    assert_eq!(usage_flag(&["bowl", "--R", "1", "--step", "0.1"]), "--step");
    assert_eq!(usage_flag(&["mu-radial", "--mu", "0.5", "--R", "2.5"]), "--R");
    assert_eq!(usage_flag(&["perron", "--m", "1.6"]), "--m");
    assert_eq!(usage_flag(&["perron", "--mode", "unbounded"]), "--domain");
}

#[test]
fn help_exits_zero_for_every_subcommand() {
    for sub in ["solve", "bowl", "wing", "mu-radial", "grim", "perron", "verify", "flux"] {
        let o = bin(&[sub, "--help"]);
        assert_eq!(o.status.code(), Some(0), "{sub}");
        let text = String::from_utf8(o.stdout).unwrap();
        assert!(text.contains("Options:") && text.contains("--help"), "{sub}: {text}");
    }
    assert_eq!(bin(&["--help"]).status.code(), Some(0));
}

#[test]
fn exit_codes() {
    assert_eq!(bin(&["solve", "--n", "-3", "--domain", "disk:1"]).status.code(), Some(2));
    assert_eq!(bin(&["nonsense"]).status.code(), Some(2));
    // Steep data puts the residual floor above this tolerance.
    let o = bin(&["solve", "--domain", "disk:1", "--phi", "40*x", "--n", "16", "--tol", "1e-14"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn solve_writes_field_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("field.csv");
    let o = bin(&["solve", "--domain", "disk:1.0", "--n", "32", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("x,y,u\n") && !csv.contains('\r'));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.with_extension("json")).unwrap()).unwrap();
    assert!(report["report"]["residual"].as_f64().unwrap() < 1e-10);
    assert_eq!(report["report"]["iters"].as_array().unwrap().len(), 11);
    assert_eq!(report["report"]["trace"].as_array().unwrap().len(), 11);

    let again = dir.path().join("again.csv");
    bin(&["solve", "--domain", "disk:1.0", "--n", "32", "--out", again.to_str().unwrap()]);
    assert_eq!(fs::read(&out).unwrap(), fs::read(&again).unwrap());
    assert_eq!(fs::read(out.with_extension("json")).unwrap(), fs::read(again.with_extension("json")).unwrap());
}

#[test]
fn domain_from_file_and_phi_file() {
    let dir = tempfile::tempdir().unwrap();
    let dom = dir.path().join("dom.cfg");
    fs::write(&dom, "# unit disk\nkind=disk radius=1\n").unwrap();
    let samples = dir.path().join("phi.csv");
    fs::write(&samples, "x,y,u\n1,0,0.5\n-1,0,0.5\n0,1,0.5\n0,-1,0.5\n").unwrap();
    let o = bin(&["solve", "--domain", dom.to_str().unwrap(), "--phi-file", samples.to_str().unwrap(), "--n", "16"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = String::from_utf8(o.stdout).unwrap();
    let top = csv.lines().nth(1).unwrap();
    assert!(top.ends_with(",5.0000000000000000e-1"), "{top}");
}

#[test]
fn profiles_and_grim_emit_csv() {
    let bowl = String::from_utf8(bin(&["bowl", "--R", "1", "--step", "1e-3"]).stdout).unwrap();
    assert!(bowl.starts_with("r,u,du\n"));
    assert_eq!(bowl.lines().count(), 1002);
    let grim = bin(&["grim", "--theta", "0.3", "--a", "1", "--sample", "50", "--seed", "7"]);
    let text = String::from_utf8(grim.stdout).unwrap();
    assert!(text.starts_with("x,y,w,residual\n"));
    for line in text.lines().skip(1) {
        let r: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(r.abs() < 1e-10);
    }
    let again = String::from_utf8(bin(&["grim", "--theta", "0.3", "--a", "1", "--sample", "50", "--seed", "7"]).stdout).unwrap();
    assert_eq!(text, again);
}

#[test]
fn verify_passes_on_disk_and_flux_control() {
    let o = bin(&["verify", "--domain", "disk:1", "--phi", "x*y", "--n", "32"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["pass"], true);
    for k in ["comparison", "height", "gradient", "barrier", "flux"] {
        assert_eq!(report["checks"][k]["pass"], true, "{k}");
    }
    let o = bin(&["flux", "--domain", "square:2", "--n", "32"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn perron_strip_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.csv");
    let o = bin(&["perron", "--mode", "strip", "--m", "1", "--f", "x^2/8", "--L", "2", "--n", "32", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let side: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.with_extension("json")).unwrap()).unwrap();
    let trace = side["report"]["trace"].as_array().unwrap();
    assert!(!trace.is_empty());
    assert!(trace.iter().all(|r| r["sweep"].is_u64() && r["sup_change"].is_f64()));
    assert!(trace.last().unwrap()["sup_change"].as_f64().unwrap() < 1e-8);
}
