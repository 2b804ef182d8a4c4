//! Report records and the sampling experiment.

use serde::{Deserialize, Serialize};

use sepfact_core::decomposition::{recover_unique_report, vk_certificate};
use sepfact_core::sampling;
use sepfact_core::states::density_of;
use sepfact_core::{Dims, Tolerance};

use crate::io::{CertificateJson, EnsembleJson, MatrixJson, VectorJson};
use crate::CliError;

/// Sampling measure, stated in every sample report.
pub const MEASURE: &str = "factors uniform on the unit spheres of C^m and C^n; weights uniform on the simplex; \
this is an engineering choice, the density statement being tested is topological";

/// Ray tolerance used when matching recovered components to the sampled ones.
const MATCH_RAY: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RejectionJson {
    pub status: String,
    pub reason: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryJson {
    pub ensemble: EnsembleJson,
    pub residual: f64,
    pub retries: usize,
    pub certificate: CertificateJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockJson {
    pub gamma: f64,
    pub ray: VectorJson,
    pub members: Vec<usize>,
    pub f_members: Vec<VectorJson>,
    pub l_basis: Vec<VectorJson>,
    pub sigma: MatrixJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoarseJson {
    pub q: usize,
    pub blocks: Vec<BlockJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceBlockJson {
    pub ray: VectorJson,
    pub block_dim: usize,
    pub f_basis: Vec<VectorJson>,
    pub l_basis: Vec<VectorJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceJson {
    pub q: usize,
    pub affine_dim: usize,
    pub simplex: bool,
    pub blocks: Vec<FaceBlockJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationJson {
    pub relation: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
}

impl Quantiles {
    /// Linear interpolation between order statistics.
    pub fn of(values: &[f64]) -> Self {
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let at = |p: f64| {
            if v.is_empty() {
                return f64::NAN;
            }
            let x = p * (v.len() - 1) as f64;
            let (lo, hi) = (x.floor() as usize, x.ceil() as usize);
            v[lo] + (v[hi] - v[lo]) * (x - lo as f64)
        };
        Self { min: at(0.0), q25: at(0.25), median: at(0.5), q75: at(0.75), max: at(1.0) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleHeader {
    pub measure: String,
    pub dims: String,
    pub k: usize,
    pub count: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginStats {
    pub ray_gap: Quantiles,
    pub f_min_sv: Quantiles,
    pub min_weight: Quantiles,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryStats {
    /// Instances with a valid certificate.
    pub attempted: usize,
    /// Of those, recoveries that reproduced the sampled components.
    pub succeeded: usize,
    pub success_rate: f64,
    pub max_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleReport {
    pub header: SampleHeader,
    pub valid_fraction: f64,
    pub margins: MarginStats,
    pub recovery: RecoveryStats,
}

/// Draws `count` ensembles; instance `i` uses the seed `derive_seed(seed, i)`.
///
/// Returns the report and, per instance, `min(ray_gap, f_min_sv)` for the histogram.
pub fn sample_experiment(
    dims: Dims,
    k: usize,
    count: usize,
    seed: u64,
    tol: &Tolerance<f64>,
) -> Result<(SampleReport, Vec<f64>), CliError> {
    if k == 0 || k > dims.max() {
        return Err(CliError::Parse { field: "--k".into(), message: format!("need 1 <= k <= max(m, n) = {}, got {k}", dims.max()) });
    }
    if count == 0 {
        return Err(CliError::Parse { field: "--count".into(), message: "count must be at least 1".into() });
    }
    let mut gaps = Vec::with_capacity(count);
    let mut svs = Vec::with_capacity(count);
    let mut weights = Vec::with_capacity(count);
    let mut valid = 0;
    let mut succeeded = 0;
    let mut max_residual: f64 = 0.0;
    for i in 0..count {
        let inst = sampling::derive_seed(seed, i as u64);
        let ens = sampling::ensemble::<f64, _>(&mut sampling::rng(inst), dims, k);
        let cert = vk_certificate(&ens, tol);
        gaps.push(cert.ray_gap);
        svs.push(cert.f_min_sv);
        weights.push(cert.min_weight);
        if !cert.valid {
            continue;
        }
        valid += 1;
        if let Ok(rec) = recover_unique_report(&density_of(&ens), tol, inst) {
            max_residual = max_residual.max(rec.residual);
            let all_found = ens.components().iter().all(|c| {
                rec.ensemble.components().iter().any(|r| r.pv.same_rays(&c.pv, MATCH_RAY))
            });
            if all_found && rec.ensemble.len() == ens.len() {
                succeeded += 1;
            }
        }
    }
    let margins_for_plot = gaps.iter().zip(&svs).map(|(a, b)| a.min(*b)).collect();
    let report = SampleReport {
        header: SampleHeader { measure: MEASURE.into(), dims: dims.to_string(), k, count, seed },
        valid_fraction: valid as f64 / count as f64,
        margins: MarginStats { ray_gap: Quantiles::of(&gaps), f_min_sv: Quantiles::of(&svs), min_weight: Quantiles::of(&weights) },
        recovery: RecoveryStats {
            attempted: valid,
            succeeded,
            success_rate: if valid == 0 { 0.0 } else { succeeded as f64 / valid as f64 },
            max_residual,
        },
    };
    Ok((report, margins_for_plot))
}

/// Static SVG histogram of values in `[0, 1]`, 20 bins.
pub fn svg_histogram(values: &[f64], label: &str) -> String {
    const BINS: usize = 20;
    const W: f64 = 400.0;
    const H: f64 = 200.0;
    let mut counts = [0usize; BINS];
    for &v in values {
        let b = ((v.clamp(0.0, 1.0) * BINS as f64) as usize).min(BINS - 1);
        counts[b] += 1;
    }
    let peak = counts.iter().copied().max().unwrap_or(0).max(1) as f64;
    let bw = W / BINS as f64;
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
        W, H + 40.0, W, H + 40.0
    );
    for (i, &c) in counts.iter().enumerate() {
        let h = H * c as f64 / peak;
        out += &format!(
            "  <rect x=\"{:.1}\" y=\"{:.1}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"#4a7ab5\"/>\n",
            i as f64 * bw,
            H - h,
            bw - 1.0,
            h
        );
    }
    out += &format!("  <line x1=\"0\" y1=\"{H}\" x2=\"{W}\" y2=\"{H}\" stroke=\"black\"/>\n");
    out += &format!("  <text x=\"0\" y=\"{}\" font-size=\"12\">0</text>\n", H + 15.0);
    out += &format!("  <text x=\"{}\" y=\"{}\" font-size=\"12\">1</text>\n", W - 8.0, H + 15.0);
    out += &format!(
        "  <text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{} (n = {})</text>\n",
        W / 2.0,
        H + 32.0,
        label,
        values.len()
    );
    out += "</svg>\n";
    out
}
