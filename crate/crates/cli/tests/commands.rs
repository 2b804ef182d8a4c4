use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde::de::DeserializeOwned;

use sepfact_cli::io::{CanonicalJson, CertificateJson, EnsembleJson, MatrixJson, PptJson};
use sepfact_cli::report::{CoarseJson, FaceJson, RecoveryJson, RejectionJson, RelationJson, SampleReport};

const DIAG: &str = r#"{"rows":4,"cols":4,
  "re":[[0.5,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0.5]],
  "im":[[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]}"#;
const MIXED: &str = r#"{"rows":4,"cols":4,
  "re":[[0.25,0,0,0],[0,0.25,0,0],[0,0,0.25,0],[0,0,0,0.25]],
  "im":[[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]}"#;
const SAME_RAY: &str = r#"{"m":2,"n":2,"components":[
  {"weight":0.5,"e":[[1,0],[0,0]],"f":[[1,0],[0,0]]},
  {"weight":0.5,"e":[[0,1],[0,0]],"f":[[0,0],[1,0]]}]}"#;

struct Dir(tempfile::TempDir);

impl Dir {
    fn new() -> Self {
        Dir(tempfile::tempdir().unwrap())
    }

    fn file(&self, name: &str, body: &str) -> PathBuf {
        let p = self.0.path().join(name);
        fs::write(&p, body).unwrap();
        p
    }

    fn out(&self) -> PathBuf {
        self.0.path().join("out.json")
    }
}

fn sepfact(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sepfact"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("SEPFACT_EPS_RANK")
        .output()
        .unwrap()
}

fn report<T: DeserializeOwned>(out: &Path) -> T {
    serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap()
}

#[test]
fn recover_two_term_diagonal_state() {
    let d = Dir::new();
    let input = d.file("diag.json", DIAG);
    let o = sepfact(&["recover", "--in", input.to_str().unwrap()], &d.out());
    assert_eq!(o.status.code(), Some(0));
    let r: RecoveryJson = report(&d.out());
    assert_eq!(r.ensemble.components.len(), 2);
    assert!(r.residual <= 1e-8);
    assert!(r.certificate.valid);
    for c in &r.ensemble.components {
        assert!((c.weight - 0.5).abs() < 1e-12);
    }
}

#[test]
fn recover_maximally_mixed_is_rejected() {
    let d = Dir::new();
    let input = d.file("mixed.json", MIXED);
    let o = sepfact(&["recover", "--in", input.to_str().unwrap()], &d.out());
    assert_eq!(o.status.code(), Some(2));
    let r: RejectionJson = report(&d.out());
    assert_eq!(r.reason, "NotInRegime");
}

#[test]
fn canon_of_alternating_transposes() {
    let d = Dir::new();
    let input = d.file("w.json", r#"[{"g":"pt","side":"A"},{"g":"pt","side":"B"},{"g":"pt","side":"A"}]"#);
    let o = sepfact(&["canon", "--in", input.to_str().unwrap()], &d.out());
    assert_eq!(o.status.code(), Some(0));
    let c: CanonicalJson = report(&d.out());
    assert_eq!(c.pt, "B");
    assert!(!c.swap);
    assert!(!c.extends_to_full_state_space);
}

#[test]
fn canon_with_swap_on_unequal_dims_is_a_contract_error() {
    let d = Dir::new();
    let input = d.file("w.json", r#"[{"g":"swap"}]"#);
    let o = sepfact(&["canon", "--in", input.to_str().unwrap(), "--dims", "2x3"], &d.out());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn malformed_input_names_the_field() {
    let d = Dir::new();
    let input = d.file("bad.json", r#"{"m":2,"n":2,"components":[{"weight":"half","e":[[1,0],[0,0]],"f":[[1,0],[0,0]]}]}"#);
    let o = sepfact(&["certify", "--in", input.to_str().unwrap()], &d.out());
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("components[0].weight"), "{err}");
}

#[test]
fn missing_input_file_exits_one() {
    let d = Dir::new();
    let o = sepfact(&["construct", "--in", "/nonexistent/ens.json"], &d.out());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn construct_reproduces_the_ensemble_state() {
    let d = Dir::new();
    let input = d.file("ens.json", SAME_RAY);
    assert_eq!(sepfact(&["construct", "--in", input.to_str().unwrap()], &d.out()).status.code(), Some(0));
    let m: MatrixJson = report(&d.out());
    assert_eq!((m.rows, m.cols), (4, 4));
    assert!((m.re[0][0] - 0.5).abs() < 1e-15 && (m.re[1][1] - 0.5).abs() < 1e-15);
}

#[test]
fn same_ray_pair_gives_a_ball_and_an_invalid_certificate() {
    let d = Dir::new();
    let input = d.file("ens.json", SAME_RAY);
    let p = input.to_str().unwrap();

    assert_eq!(sepfact(&["relation", "--in", p], &d.out()).status.code(), Some(0));
    let r: RelationJson = report(&d.out());
    assert_eq!(r.relation, "ThreeBall");

    assert_eq!(sepfact(&["face", "--in", p], &d.out()).status.code(), Some(0));
    let f: FaceJson = report(&d.out());
    assert_eq!((f.q, f.affine_dim, f.simplex), (1, 3, false));

    assert_eq!(sepfact(&["coarse", "--in", p], &d.out()).status.code(), Some(0));
    let c: CoarseJson = report(&d.out());
    assert_eq!(c.q, 1);
    assert!((c.blocks[0].gamma - 1.0).abs() < 1e-12);

    // the certificate is still written; the exit code carries the verdict
    assert_eq!(sepfact(&["certify", "--in", p], &d.out()).status.code(), Some(2));
    let cert: CertificateJson = report(&d.out());
    assert!(!cert.valid);
    assert!(cert.ray_gap < 1e-9);
}

#[test]
fn relation_needs_two_components() {
    let d = Dir::new();
    let input = d.file("one.json", r#"{"m":2,"n":2,"components":[{"weight":1,"e":[[1,0],[0,0]],"f":[[1,0],[0,0]]}]}"#);
    assert_eq!(sepfact(&["relation", "--in", input.to_str().unwrap()], &d.out()).status.code(), Some(1));
}

#[test]
fn ppt_reports_the_minimum_eigenvalue() {
    let d = Dir::new();
    let input = d.file("diag.json", DIAG);
    assert_eq!(sepfact(&["ppt", "--in", input.to_str().unwrap()], &d.out()).status.code(), Some(0));
    let p: PptJson = report(&d.out());
    assert!(p.passes);
    assert!(p.min_eig_pt.abs() < 1e-12);
}

#[test]
fn sample_writes_report_and_histogram() {
    let d = Dir::new();
    let svg = d.0.path().join("h.svg");
    let o = sepfact(
        &["sample", "--dims", "2x2", "--k", "2", "--count", "100", "--svg", svg.to_str().unwrap()],
        &d.out(),
    );
    assert_eq!(o.status.code(), Some(0));
    let r: SampleReport = report(&d.out());
    assert_eq!(r.valid_fraction, 1.0);
    assert_eq!(r.recovery.success_rate, 1.0);
    assert!(r.header.measure.contains("simplex"));
    assert!(fs::read_to_string(&svg).unwrap().starts_with("<svg"));
}

#[test]
fn sample_rejects_k_above_max_dim() {
    let d = Dir::new();
    let o = sepfact(&["sample", "--dims", "2x3", "--k", "4"], &d.out());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn eps_rank_flag_overrides_environment() {
    let d = Dir::new();
    let input = d.file("diag.json", DIAG);
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_sepfact"));
        c.args(["recover", "--in", input.to_str().unwrap()]).env_remove("SEPFACT_EPS_RANK");
        if let Some(v) = env {
            c.env("SEPFACT_EPS_RANK", v);
        }
        if let Some(v) = flag {
            c.args(["--eps-rank", v]);
        }
        c.output().unwrap().status.code()
    };
    assert_eq!(run(Some("not-a-number"), None), Some(1));
    assert_eq!(run(Some("-1"), None), Some(1));
    assert_eq!(run(Some("-1"), Some("1e-9")), Some(0));
}

#[test]
fn stdout_is_the_default_destination() {
    let d = Dir::new();
    let input = d.file("ens.json", SAME_RAY);
    let o = Command::new(env!("CARGO_BIN_EXE_sepfact"))
        .args(["construct", "--in", input.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let m: MatrixJson = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(m.rows, 4);
}

#[test]
fn recovered_ensemble_round_trips_through_construct() {
    let d = Dir::new();
    let input = d.file("diag.json", DIAG);
    assert_eq!(sepfact(&["recover", "--in", input.to_str().unwrap()], &d.out()).status.code(), Some(0));
    let r: RecoveryJson = report(&d.out());
    let ens: EnsembleJson = r.ensemble;
    let again = d.file("ens.json", &serde_json::to_string(&ens).unwrap());
    assert_eq!(sepfact(&["construct", "--in", again.to_str().unwrap()], &d.out()).status.code(), Some(0));
    let m: MatrixJson = report(&d.out());
    assert!((m.re[0][0] - 0.5).abs() < 1e-12 && (m.re[3][3] - 0.5).abs() < 1e-12);
    assert!(m.re[1][1].abs() < 1e-12);
}
