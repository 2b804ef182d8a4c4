//! Command implementations behind the `sepfact` binary.
//!
//! [`run`] reads the input file, executes one command and writes a JSON
//! report. Exit codes: 0 on success, 2 when the input is well formed but lies
//! outside the regime the command needs, 1 on malformed input or bad flags.

pub mod io;
pub mod report;

use std::fs;
use std::path::PathBuf;

use thiserror::Error;

use sepfact_core::decomposition::{
    certify_vk, coarse_decompose, recover_unique_report, vk_certificate, DecompositionError,
};
use sepfact_core::faces::{face_of_ensemble, face_relation, is_simplex};
use sepfact_core::states::{density_of, validate_state, DensityMatrix};
use sepfact_core::{automorphisms, septests, Dims, Side, Tolerance};

use crate::io::{
    ensemble_from_json, ensemble_to_json, matrix_from_json, matrix_to_json, parse, vector_to_json, word_from_json,
    CanonicalJson, CertificateJson, EnsembleJson, GeneratorJson, MatrixJson, PptJson,
};
use crate::report::{
    sample_experiment, svg_histogram, BlockJson, CoarseJson, FaceBlockJson, FaceJson, RecoveryJson, RejectionJson,
    RelationJson,
};

/// Environment variable consulted for `eps_rank` when `--eps-rank` is absent.
pub const EPS_RANK_ENV: &str = "SEPFACT_EPS_RANK";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    /// Ensemble to density matrix.
    Construct,
    /// Ensemble to uniqueness certificate.
    Certify,
    /// Density matrix to its unique ensemble.
    Recover,
    /// Ensemble to coarse block decomposition.
    Coarse,
    /// Ensemble to block-simplex face.
    Face,
    /// Two-component ensemble to the relation of its terms.
    Relation,
    /// Generator word to normal form.
    Canon,
    /// Density matrix to partial-transpose report.
    Ppt,
    /// Random ensembles to margin and recovery statistics.
    Sample,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub input_path: Option<PathBuf>,
    /// Report destination; `None` means standard output.
    pub output_path: Option<PathBuf>,
    pub seed: u64,
    pub eps_rank: Option<f64>,
    pub sample_count: usize,
    pub dims: Option<Dims>,
    pub k: Option<usize>,
    pub svg_path: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            input_path: None,
            output_path: None,
            seed: 0,
            eps_rank: None,
            sample_count: 1,
            dims: None,
            k: None,
            svg_path: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input at `{field}`: {message}")]
    Parse { field: String, message: String },
    #[error("{0}")]
    Contract(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    /// Well-formed input outside the command's regime. `report` replaces the
    /// default rejection report when set.
    #[error("rejected ({reason}): {detail}")]
    Regime { reason: String, detail: String, report: Option<String> },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Regime { .. } => 2,
            _ => 1,
        }
    }
}

/// Runs one command: writes the report (or a rejection report) and returns the exit code.
/// Diagnostics go to standard error.
pub fn run(config: &RunConfig) -> i32 {
    match execute(config) {
        Ok(report) => match emit(config, &report) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("error: {e}");
                e.exit_code()
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            if let CliError::Regime { reason, detail, report } = &e {
                let text = report.clone().unwrap_or_else(|| {
                    to_json(&RejectionJson { status: "rejected".into(), reason: reason.clone(), detail: detail.clone() })
                });
                if let Err(io) = emit(config, &text) {
                    eprintln!("error: {io}");
                    return io.exit_code();
                }
            }
            e.exit_code()
        }
    }
}

fn emit(config: &RunConfig, report: &str) -> Result<(), CliError> {
    match &config.output_path {
        Some(p) => fs::write(p, format!("{report}\n"))
            .map_err(|e| CliError::Io { path: p.display().to_string(), message: e.to_string() }),
        None => {
            println!("{report}");
            Ok(())
        }
    }
}

fn to_json<S: serde::Serialize>(value: &S) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

pub fn tolerance(config: &RunConfig) -> Result<Tolerance<f64>, CliError> {
    match config.eps_rank {
        None => Ok(Tolerance::default()),
        Some(x) => Tolerance::default()
            .with_eps_rank(x)
            .map_err(|e| CliError::Parse { field: "--eps-rank".into(), message: e.to_string() }),
    }
}

fn read_input(config: &RunConfig) -> Result<String, CliError> {
    let path = config
        .input_path
        .as_ref()
        .ok_or_else(|| CliError::Contract(format!("{:?} needs --in", config.command)))?;
    fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })
}

/// Executes the command and returns the serialized report.
pub fn execute(config: &RunConfig) -> Result<String, CliError> {
    let tol = tolerance(config)?;
    match config.command {
        Command::Construct => {
            let ens = read_ensemble(config)?;
            Ok(to_json(&matrix_to_json(density_of(&ens).matrix())))
        }
        Command::Certify => {
            let ens = read_ensemble(config)?;
            match certify_vk(&ens, &tol) {
                Ok(c) => Ok(to_json(&CertificateJson::from(&c))),
                // the certificate is still the report; the exit code carries the verdict
                Err(rej) => Err(CliError::Regime {
                    reason: format!("{:?}", rej.hypothesis),
                    detail: format!("margin {:e}", rej.margin),
                    report: Some(to_json(&CertificateJson::from(&rej.certificate))),
                }),
            }
        }
        Command::Recover => {
            let rho = read_density(config, &tol)?;
            let rec = recover_unique_report(&rho, &tol, config.seed).map_err(regime)?;
            let cert = vk_certificate(&rec.ensemble, &tol);
            Ok(to_json(&RecoveryJson {
                ensemble: ensemble_to_json(&rec.ensemble),
                residual: rec.residual,
                retries: rec.retries,
                certificate: CertificateJson::from(&cert),
            }))
        }
        Command::Coarse => {
            let ens = read_ensemble(config)?;
            let cd = coarse_decompose(&ens, &tol).map_err(regime)?;
            Ok(to_json(&CoarseJson {
                q: cd.q(),
                blocks: cd
                    .blocks
                    .iter()
                    .map(|b| BlockJson {
                        gamma: b.gamma,
                        ray: vector_to_json(&b.ray),
                        members: b.members.clone(),
                        f_members: b.f_members.iter().map(|v| vector_to_json(v)).collect(),
                        l_basis: b.l_basis.iter().map(|v| vector_to_json(v)).collect(),
                        sigma: matrix_to_json(b.sigma.matrix()),
                    })
                    .collect(),
            }))
        }
        Command::Face => {
            let ens = read_ensemble(config)?;
            let face = face_of_ensemble(&ens, &tol).map_err(regime)?;
            Ok(to_json(&FaceJson {
                q: face.q,
                affine_dim: face.affine_dim,
                simplex: is_simplex(&face),
                blocks: face
                    .blocks
                    .iter()
                    .map(|b| FaceBlockJson {
                        ray: vector_to_json(&b.ray),
                        block_dim: b.block_dim,
                        f_basis: b.f_basis.iter().map(|v| vector_to_json(v)).collect(),
                        l_basis: b.l_basis.iter().map(|v| vector_to_json(v)).collect(),
                    })
                    .collect(),
            }))
        }
        Command::Relation => {
            let ens = read_ensemble(config)?;
            if ens.len() != 2 {
                return Err(CliError::Parse {
                    field: "ensemble.components".into(),
                    message: format!("relation needs exactly 2 components, got {}", ens.len()),
                });
            }
            let c = ens.components();
            let rel = face_relation(&c[0].pv, &c[1].pv, &tol);
            Ok(to_json(&RelationJson { relation: format!("{rel:?}") }))
        }
        Command::Canon => {
            let gens: Vec<GeneratorJson> = parse(&read_input(config)?, "word")?;
            let word = word_from_json(&gens, config.dims)?;
            let canon = automorphisms::canonicalize(&word);
            let ext = automorphisms::extends_to_full_state_space(&canon);
            Ok(to_json(&CanonicalJson::new(&canon, ext)))
        }
        Command::Ppt => {
            let rho = read_density(config, &tol)?;
            Ok(to_json(&PptJson::from(&septests::ppt_test(&rho, Side::A, &tol))))
        }
        Command::Sample => {
            let dims = config.dims.ok_or_else(|| CliError::Parse { field: "--dims".into(), message: "sample needs --dims".into() })?;
            let k = config.k.ok_or_else(|| CliError::Parse { field: "--k".into(), message: "sample needs --k".into() })?;
            let (report, margins) = sample_experiment(dims, k, config.sample_count, config.seed, &tol)?;
            if let Some(p) = &config.svg_path {
                fs::write(p, svg_histogram(&margins, "min(ray_gap, f_min_sv)"))
                    .map_err(|e| CliError::Io { path: p.display().to_string(), message: e.to_string() })?;
            }
            Ok(to_json(&report))
        }
    }
}

fn regime(e: DecompositionError) -> CliError {
    let reason = match &e {
        DecompositionError::NotInRegime { .. } => "NotInRegime",
        DecompositionError::DegeneratePencil { .. } => "DegeneratePencil",
        DecompositionError::DependentF { .. } => "DependentF",
        DecompositionError::State(_) | DecompositionError::Linalg(_) => {
            return CliError::Contract(e.to_string());
        }
        _ => "Rejected",
    };
    CliError::Regime { reason: reason.into(), detail: e.to_string(), report: None }
}

fn read_ensemble(config: &RunConfig) -> Result<sepfact_core::states::Ensemble<f64>, CliError> {
    let j: EnsembleJson = parse(&read_input(config)?, "ensemble")?;
    ensemble_from_json(&j)
}

/// Dims from `--dims`, else `√rows × √rows` when the row count is a perfect square.
fn density_dims(config: &RunConfig, rows: usize) -> Result<Dims, CliError> {
    if let Some(d) = config.dims {
        return Ok(d);
    }
    let r = (rows as f64).sqrt().round() as usize;
    if r * r == rows && r >= 1 {
        Ok(Dims { m: r, n: r })
    } else {
        Err(CliError::Parse {
            field: "--dims".into(),
            message: format!("{rows} rows is not a perfect square; pass --dims MxN"),
        })
    }
}

fn read_density(config: &RunConfig, tol: &Tolerance<f64>) -> Result<DensityMatrix<f64>, CliError> {
    let j: MatrixJson = parse(&read_input(config)?, "matrix")?;
    let m = matrix_from_json(&j, "matrix")?;
    let dims = density_dims(config, m.rows())?;
    validate_state(&m, dims, tol).map_err(|e| CliError::Parse { field: "matrix".into(), message: e.to_string() })
}
