//! CSV trace and JSON summary output.
//!
//! `export` writes two files into the output directory:
//!
//! * `trace.csv` — one row per simulated slot with the stable column schema
//!   `slot,tx_power_w,tau0,q_1..q_K,d_1..d_K,z_ap,z_1..z_K,g_1..g_K`
//!   (q in watts with η/τ₀ applied, d in bits, queue backlogs as maintained
//!   by the policy). Runs without a trace produce the header only.
//! * `summary.json` — the config echo plus the aggregate metrics.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::ScenarioConfig;
use super::metrics::{QueueSnapshot, RunMetrics, ViolationCounts};
use super::SimError;

/// The JSON summary: scenario echo plus aggregates. Parses back to an equal
/// value, so downstream tooling can rely on exact round-trips.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub config: ScenarioConfig,
    pub horizon: usize,
    pub received_power: Vec<f64>,
    pub total_received_power: f64,
    pub avg_tx_power: f64,
    pub throughput: Vec<f64>,
    pub transmit_fraction: f64,
    pub final_queues: QueueSnapshot,
    pub convergence_time: usize,
    pub converged: bool,
    pub violations: ViolationCounts,
    pub max_kkt_residual: f64,
    pub regime_warning: bool,
    pub threshold: Option<f64>,
}

impl RunSummary {
    pub fn new(config: &ScenarioConfig, metrics: &RunMetrics) -> Self {
        Self {
            config: ScenarioConfig { trace: config.trace, ..config.clone() },
            horizon: metrics.horizon,
            received_power: metrics.received_power.clone(),
            total_received_power: metrics.total_received_power,
            avg_tx_power: metrics.avg_tx_power,
            throughput: metrics.throughput.clone(),
            transmit_fraction: metrics.transmit_fraction,
            final_queues: metrics.final_queues.clone(),
            convergence_time: metrics.convergence_time,
            converged: metrics.converged,
            violations: metrics.violations,
            max_kkt_residual: metrics.max_kkt_residual,
            regime_warning: metrics.regime_warning,
            threshold: metrics.threshold,
        }
    }
}

pub fn trace_header(k: usize) -> String {
    let mut s = String::from("slot,tx_power_w,tau0");
    for i in 1..=k {
        let _ = write!(s, ",q_{i}");
    }
    for i in 1..=k {
        let _ = write!(s, ",d_{i}");
    }
    s.push_str(",z_ap");
    for i in 1..=k {
        let _ = write!(s, ",z_{i}");
    }
    for i in 1..=k {
        let _ = write!(s, ",g_{i}");
    }
    s
}

/// Writes `trace.csv` and `summary.json` under `dir` (created if missing).
pub fn export(metrics: &RunMetrics, config: &ScenarioConfig, dir: &Path) -> Result<(), SimError> {
    std::fs::create_dir_all(dir)?;
    let k = config.topology.num_ers();

    let mut csv = std::io::BufWriter::new(std::fs::File::create(dir.join("trace.csv"))?);
    writeln!(csv, "{}", trace_header(k))?;
    if let Some(rows) = &metrics.trace {
        for r in rows {
            let mut line = format!("{},{},{}", r.slot, r.tx_power, r.tau0);
            for v in &r.received {
                let _ = write!(line, ",{v}");
            }
            for _ in r.received.len()..k {
                line.push_str(",0");
            }
            for v in &r.throughput {
                let _ = write!(line, ",{v}");
            }
            for _ in r.throughput.len()..k {
                line.push_str(",0");
            }
            let _ = write!(line, ",{}", r.z_ap);
            for v in &r.z {
                let _ = write!(line, ",{v}");
            }
            for _ in r.z.len()..k {
                line.push_str(",0");
            }
            for v in &r.g {
                let _ = write!(line, ",{v}");
            }
            for _ in r.g.len()..k {
                line.push_str(",0");
            }
            writeln!(csv, "{line}")?;
        }
    }
    csv.flush()?;

    let summary = RunSummary::new(config, metrics);
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    std::fs::write(dir.join("summary.json"), json)?;
    Ok(())
}
