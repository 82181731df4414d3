use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use coupled_pm::axioms::{Axiom, AxiomReport};
use coupled_pm::cli::{read_json, ContractionReport, DemoReport};
use coupled_pm::solver::ProbeReport;
use coupled_pm::{ConvergenceCertificate, IterationTrace, Point, Status};
use tempfile::TempDir;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coupled-pm"))
        .args(args)
        .output()
        .expect("spawn binary")
}

struct Case {
    dir: TempDir,
}

impl Case {
    fn new(config: &str) -> Self {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("problem.cfg"), config).unwrap();
        Case { dir }
    }

    fn file(&self, name: &str, text: &str) {
        fs::write(self.dir.path().join(name), text).unwrap();
    }

    fn out(&self) -> PathBuf {
        self.dir.path().join("out")
    }

    fn run(&self, cmd: &str, extra: &[&str]) -> Output {
        let cfg = self.dir.path().join("problem.cfg");
        let out = self.out();
        let mut args = vec![cmd, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
        args.extend_from_slice(extra);
        bin(&args)
    }
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn report<T: for<'de> serde::Deserialize<'de>>(dir: &Path, name: &str) -> T {
    read_json(&dir.join(name)).unwrap()
}

const EXAMPLE: &str = "\
# scaled sum on the max space
space.kind = max_halfline
map.builtin = scaled_sum
map.divisor = 6
start = 1, 2
spec.mode = MIXED_ARG
spec.k = 0.16666666666666666
spec.l = 0.16666666666666666
tol = 1e-9
";

#[test]
fn check_axioms_on_max_space_passes() {
    let case = Case::new("space.kind = max_halfline\n");
    let o = case.run("check-axioms", &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rep: AxiomReport = report(&case.out(), "axiom_report.json");
    assert!(rep.passed);
    assert!(rep.violations.is_empty());
}

#[test]
fn check_axioms_reports_table_witness() {
    let case = Case::new("space.kind = tabulated\nspace.matrix = bad.txt\n");
    case.file("bad.txt", "2\n2 1\n1 1\n");
    let o = case.run("check-axioms", &[]);
    assert_eq!(code(&o), 2);
    let rep: AxiomReport = report(&case.out(), "axiom_report.json");
    assert!(!rep.passed);
    let v = rep.violations.iter().find(|v| v.axiom == Axiom::P2).expect("P2 witness");
    assert_eq!(v.witness, vec![Point::Index(0), Point::Index(1)]);
    assert_eq!((v.lhs, v.rhs), (2.0, 1.0));
}

#[test]
fn missing_space_is_a_config_error() {
    let case = Case::new("map.expr = \"x\"\n");
    assert_eq!(code(&case.run("check-axioms", &[])), 64);
}

#[test]
fn unknown_key_and_bad_flags_are_config_errors() {
    let case = Case::new("space.kind = max_halfline\nspace.colour = red\n");
    assert_eq!(code(&case.run("check-axioms", &[])), 64);
    assert_eq!(code(&bin(&["solve", "--no-such-flag"])), 64);
    let case = Case::new("space.kind = max_halfline\nspec.mode = MIXED_ARG\nspec.k = 0.6\nspec.l = 0.5\n");
    assert_eq!(code(&case.run("check-axioms", &[])), 64);
}

#[test]
fn solve_example_converges() {
    let case = Case::new(EXAMPLE);
    let o = case.run("solve", &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let cert: ConvergenceCertificate = report(&case.out(), "certificate.json");
    assert_eq!(cert.status, Status::Converged);
    assert_eq!(cert.d0, 3.0);
    assert_eq!(cert.a_priori_bound_iters, Some(21));
    let (x, y) = cert.fixed_point.unwrap();
    assert!(x.as_real().unwrap().abs() <= 1e-9 && y.as_real().unwrap().abs() <= 1e-9);
    let trace: IterationTrace = report(&case.out(), "trace.json");
    assert_eq!(trace.steps.len(), cert.iterations + 1);
    assert!(cert.notes.is_empty(), "{:?}", cert.notes);
}

#[test]
fn solve_with_expression_matches_builtin() {
    let a = Case::new(EXAMPLE);
    let b = Case::new(&EXAMPLE.replace("map.builtin = scaled_sum\nmap.divisor = 6\n", "map.expr = \"(x + y) / 6\"\n"));
    assert_eq!(code(&a.run("solve", &[])), 0);
    assert_eq!(code(&b.run("solve", &[])), 0);
    let ta = fs::read(a.out().join("trace.json")).unwrap();
    let tb = fs::read(b.out().join("trace.json")).unwrap();
    assert_eq!(ta, tb);
}

#[test]
fn solve_stationary_without_spec() {
    let case = Case::new("space.kind = max_halfline\nmap.expr = \"(x + y) / 2\"\nstart = 1, 1\n");
    let o = case.run("solve", &[]);
    assert_eq!(code(&o), 3);
    let cert: ConvergenceCertificate = report(&case.out(), "certificate.json");
    assert_eq!(cert.status, Status::StationaryNoCert);
    assert_eq!(cert.fixed_point, Some((Point::Real(1.0), Point::Real(1.0))));
    assert_eq!(cert.final_residual, 2.0);
}

#[test]
fn solve_diverging_map() {
    let case = Case::new("space.kind = max_halfline\nmap.expr = \"x + y + 1\"\nstart = 1, 1\n");
    let o = case.run("solve", &[]);
    assert_eq!(code(&o), 4);
    let cert: ConvergenceCertificate = report(&case.out(), "certificate.json");
    assert_eq!(cert.status, Status::Diverging);
}

#[test]
fn solve_max_iters_override() {
    let case = Case::new(EXAMPLE);
    let o = case.run("solve", &["--max-iters", "3"]);
    assert_eq!(code(&o), 4);
    let cert: ConvergenceCertificate = report(&case.out(), "certificate.json");
    assert_eq!(cert.status, Status::MaxIters);
}

#[test]
fn solve_warns_when_spec_is_violated() {
    let case = Case::new(
        "space.kind = max_halfline\nmap.expr = \"(x + y) / 2\"\nstart = 1, 2\n\
         spec.mode = MIXED_ARG\nspec.k = 0.4\nspec.l = 0.4\n",
    );
    let o = case.run("solve", &[]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    let cert: ConvergenceCertificate = report(&case.out(), "certificate.json");
    assert!(!cert.notes.is_empty());
}

#[test]
fn verify_accepts_and_rejects() {
    let good = Case::new(EXAMPLE);
    assert_eq!(code(&good.run("verify", &[])), 0);
    let rep: ContractionReport = report(&good.out(), "contraction_report.json");
    assert!(rep.passed);
    assert!(rep.quadruples_checked > 0);

    let bad = Case::new(&EXAMPLE.replace("map.divisor = 6", "map.divisor = 2"));
    assert_eq!(code(&bad.run("verify", &[])), 2);
    let rep: ContractionReport = report(&bad.out(), "contraction_report.json");
    assert!(!rep.passed);
    assert!(!rep.violations.is_empty());
}

#[test]
fn verify_without_spec_is_a_config_error() {
    let case = Case::new("space.kind = max_halfline\nmap.expr = \"x / 2\"\n");
    assert_eq!(code(&case.run("verify", &[])), 64);
}

#[test]
fn probe_finds_two_boundary_fixed_points() {
    let case = Case::new("space.kind = max_halfline\nmap.expr = \"(x + y) / 2\"\nstarts = 0, 0; 1, 1\n");
    let o = case.run("probe", &[]);
    assert_eq!(code(&o), 3);
    let rep: ProbeReport = report(&case.out(), "probe_report.json");
    assert_eq!(rep.distinct_points.len(), 2);
    assert!(rep.pairwise_ps[0][1] >= 0.5);
}

#[test]
fn probe_with_contraction_has_one_cluster() {
    let case = Case::new(&EXAMPLE.replace("start = 1, 2", "starts = 1, 2; 5, 0; 10, 10"));
    assert_eq!(code(&case.run("probe", &[])), 0);
    let rep: ProbeReport = report(&case.out(), "probe_report.json");
    assert_eq!(rep.distinct_points.len(), 1);
    assert_eq!(rep.cluster_of, vec![Some(0); 3]);
}

#[test]
fn tabulated_problem_solves() {
    let case = Case::new(
        "space.kind = tabulated\nspace.matrix = m.txt\nmap.table = f.txt\nstart = 2, 1\n\
         spec.mode = MIXED_ARG\nspec.k = 0.25\nspec.l = 0.25\n",
    );
    case.file("m.txt", "3\n0 1 1\n1 0 1\n1 1 0\n");
    case.file("f.txt", "3\n0 0 0\n0 0 0\n0 0 0\n");
    let o = case.run("solve", &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let cert: ConvergenceCertificate = report(&case.out(), "certificate.json");
    assert_eq!(cert.fixed_point, Some((Point::Index(0), Point::Index(0))));
}

#[test]
fn effective_config_round_trips() {
    let case = Case::new(EXAMPLE);
    assert_eq!(code(&case.run("solve", &["--seed", "9"])), 0);
    let effective = fs::read_to_string(case.out().join("effective_config.txt")).unwrap();
    assert!(effective.contains("seed = 9"));

    let again = Case::new(&effective);
    assert_eq!(code(&again.run("solve", &[])), 0);
    for name in ["certificate.json", "trace.json", "effective_config.txt"] {
        let a = fs::read(case.out().join(name)).unwrap();
        let b = fs::read(again.out().join(name)).unwrap();
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn demo_succeeds_and_reports_both_outcomes() {
    for tol in ["1e-9", "1e-12"] {
        let dir = tempfile::tempdir().unwrap();
        let o = bin(&["demo", "--tol", tol, "--out", dir.path().to_str().unwrap()]);
        assert_eq!(code(&o), 0, "tol {tol}: {}", String::from_utf8_lossy(&o.stderr));
        let rep: DemoReport = report(dir.path(), "demo_report.json");
        assert!(rep.converged_to_origin);
        assert!(rep.boundary_not_unique);
        assert!(rep.contraction_check.passed);
        assert!(!rep.boundary_check.passed);
        assert!(!String::from_utf8_lossy(&o.stdout).is_empty());
    }
}
