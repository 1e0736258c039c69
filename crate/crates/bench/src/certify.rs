//! Post-run certificate table over recorded partition telemetry.

use ftpomdp_core::bounds::{certificate, CertificateInputs};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{BenchError, Result};
use crate::output::TelemetryFile;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateRow {
    pub confidence: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub mean_bound: f64,
    pub mean_estimation: f64,
    pub mean_partition: f64,
    pub decisions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub solver: String,
    pub base_seed: u64,
    pub n: u64,
    pub rows: Vec<CertificateRow>,
}

/// One row per configured confidence `1 - delta`, with `delta1 = 0.75 delta`
/// and `delta2 = 0.25 delta`, averaging each decision's certificate.
pub fn run_certificate_report(config: &ExperimentConfig, telemetry: &TelemetryFile) -> Result<CertificateReport> {
    if telemetry.decisions.is_empty() {
        return Err(BenchError::MissingTelemetry(format!("{} recorded no partition data", telemetry.solver)));
    }
    let cert = &config.certificate;
    let ladder = cert.ladder(telemetry.horizon)?;
    let n = telemetry.n_sims as u64;
    let mut rows = Vec::with_capacity(cert.confidences.len());
    for &confidence in &cert.confidences {
        let (delta1, delta2) = CertificateInputs::split_delta(1.0 - confidence);
        let (mut bound, mut estimation, mut partition) = (0.0, 0.0, 0.0);
        for entry in &telemetry.decisions {
            let inputs = CertificateInputs {
                n,
                delta1,
                delta2,
                gamma: telemetry.gamma,
                horizon: telemetry.horizon,
                holder: cert.holder,
                c_cov: cert.c_cov,
                k_z: cert.k_z,
                radius_cap: cert.radius_cap,
                m_list: entry.decision.m_values.clone(),
                h_l_size: entry.decision.h_l_size,
            };
            let c = certificate(&inputs, &ladder)?;
            bound += c.bound;
            estimation += c.estimation;
            partition += c.partition;
        }
        let k = telemetry.decisions.len() as f64;
        rows.push(CertificateRow {
            confidence,
            delta1,
            delta2,
            mean_bound: bound / k,
            mean_estimation: estimation / k,
            mean_partition: partition / k,
            decisions: telemetry.decisions.len(),
        });
    }
    Ok(CertificateReport { solver: telemetry.solver.clone(), base_seed: telemetry.base_seed, n, rows })
}
