//! Command-line front end: run a scenario, sweep a parameter, calibrate the
//! optimal-policy threshold, or compare policies on one topology.
//!
//! Exits with status 1 when any per-slot invariant was violated during a
//! run, and 2 on configuration or I/O errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use wpcn::policy_wpt::{self, WptConfig};
use wpcn::sim::{
    aggregate, export, run_many, run_scenario, PolicySpec, RunMetrics, RunSummary, ScenarioConfig,
};

#[derive(Parser)]
#[command(name = "wpcn", about = "Wirelessly powered communication network simulator", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Overrides {
    /// Override the config's RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's horizon (timeslot count).
    #[arg(long)]
    horizon: Option<usize>,
    /// Output directory (overrides the config's `run.output`).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and print/export its metrics.
    Run {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
        /// Keep and export the per-slot trace (large for long horizons).
        #[arg(long)]
        trace: bool,
    },
    /// Run the scenario across a parameter sweep with seed replication.
    Sweep {
        config: PathBuf,
        /// Swept parameter: `v` (control parameter) or `dr` (distance ratio
        /// of the farthest E-R to the closest).
        #[arg(long)]
        param: String,
        /// Comma-separated parameter values.
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
        /// Number of seeds per value (seed, seed+1, ...).
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Calibrate the optimal-policy threshold for the config's topology.
    Calibrate {
        config: PathBuf,
        /// Monte-Carlo samples.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run several policies on the config's topology and compare.
    Compare {
        config: PathBuf,
        /// Comma-separated policies: optimal, mdpp, qf-wpt, qgf-it.
        #[arg(long, value_delimiter = ',')]
        policies: Vec<String>,
        /// Number of seeds per policy.
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        #[command(flatten)]
        overrides: Overrides,
    },
}

fn main() -> ExitCode {
    match dispatch() {
        Ok(0) => ExitCode::SUCCESS,
        Ok(violations) => {
            eprintln!("error: {violations} per-slot invariant violation(s) observed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn load(config: &PathBuf, overrides: &Overrides) -> Result<ScenarioConfig, Box<dyn std::error::Error>> {
    let mut cfg = ScenarioConfig::from_path(config)?;
    if let Some(seed) = overrides.seed {
        cfg.seed = seed;
    }
    if let Some(h) = overrides.horizon {
        cfg.horizon = h;
    }
    if let Some(out) = &overrides.out {
        cfg.output = Some(out.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn dispatch() -> Result<u64, Box<dyn std::error::Error>> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, overrides, trace } => {
            let mut cfg = load(&config, &overrides)?;
            cfg.trace = cfg.trace || trace;
            let metrics = run_scenario(&cfg)?;
            print_run(&cfg, &metrics);
            if let Some(dir) = cfg.output.clone() {
                export(&metrics, &cfg, &dir)?;
                println!(
                    "wrote {} and {}",
                    dir.join("trace.csv").display(),
                    dir.join("summary.json").display()
                );
            }
            Ok(metrics.violations.total())
        }
        Command::Sweep { config, param, values, seeds, overrides } => {
            let base = load(&config, &overrides)?;
            if values.is_empty() {
                return Err("sweep needs at least one value".into());
            }
            let mut tagged = Vec::new();
            for &value in &values {
                for s in 0..seeds {
                    let mut cfg = apply_param(&base, &param, value)?;
                    cfg.seed = base.seed + s;
                    cfg.output = None;
                    cfg.trace = false;
                    tagged.push((value, cfg));
                }
            }
            let cfgs: Vec<ScenarioConfig> = tagged.iter().map(|(_, c)| c.clone()).collect();
            let metrics = run_many(&cfgs)?;
            let mut violations = 0;
            println!("param,value,seeds,total_received_mean_w,total_received_ci95_w,avg_tx_mean_w,convergence_mean_slots");
            let mut csv_rows = vec![sweep_header(base.topology.num_ers())];
            for &value in &values {
                let group: Vec<(&ScenarioConfig, &RunMetrics)> = tagged
                    .iter()
                    .zip(&metrics)
                    .filter(|((v, _), _)| *v == value)
                    .map(|((_, c), m)| (c, m))
                    .collect();
                let totals: Vec<f64> = group.iter().map(|(_, m)| m.total_received_power).collect();
                let txs: Vec<f64> = group.iter().map(|(_, m)| m.avg_tx_power).collect();
                let convs: Vec<f64> = group.iter().map(|(_, m)| m.convergence_time as f64).collect();
                let (t, x, c) = (aggregate(&totals), aggregate(&txs), aggregate(&convs));
                println!(
                    "{param},{value},{seeds},{:.6e},{:.3e},{:.6e},{:.1}",
                    t.mean, t.ci95, x.mean, c.mean
                );
                for (cfg, m) in &group {
                    violations += m.violations.total();
                    csv_rows.push(sweep_row(&param, value, cfg, m));
                }
            }
            if let Some(dir) = &base.output {
                std::fs::create_dir_all(dir)?;
                std::fs::write(dir.join("sweep.csv"), csv_rows.join("\n") + "\n")?;
                println!("wrote {}", dir.join("sweep.csv").display());
            }
            Ok(violations)
        }
        Command::Calibrate { config, samples, seed } => {
            let overrides = Overrides { seed, horizon: None, out: None };
            let mut cfg = load(&config, &overrides)?;
            if let Some(s) = samples {
                cfg.calibration_samples = s;
            }
            let wpt = WptConfig {
                p_avg: cfg.policy.p_avg(),
                p_peak: cfg.policy.p_peak(),
                v: 1.0,
                eta: cfg.topology.eta,
            };
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(1);
            let th =
                policy_wpt::calibrate_threshold(&cfg.topology, &wpt, cfg.calibration_samples, &mut rng)
                    .map_err(|e| format!("calibration failed: {e}"))?;
            println!(
                "threshold = {th:.9e} (quantile {:.4} of {} samples, seed {})",
                1.0 - wpt.p_avg / wpt.p_peak,
                cfg.calibration_samples,
                cfg.seed
            );
            Ok(0)
        }
        Command::Compare { config, policies, seeds, overrides } => {
            let base = load(&config, &overrides)?;
            if policies.is_empty() {
                return Err("compare needs at least one policy".into());
            }
            let mut violations = 0;
            println!("policy,seeds,total_received_mean_w,total_received_ci95_w,per_er_received_mean_w");
            for name in &policies {
                let policy = policy_by_name(&base, name)?;
                let cfgs: Vec<ScenarioConfig> = (0..seeds)
                    .map(|s| ScenarioConfig {
                        policy: policy.clone(),
                        seed: base.seed + s,
                        output: None,
                        trace: false,
                        ..base.clone()
                    })
                    .collect();
                let metrics = run_many(&cfgs)?;
                violations += metrics.iter().map(|m| m.violations.total()).sum::<u64>();
                let totals: Vec<f64> = metrics.iter().map(|m| m.total_received_power).collect();
                let t = aggregate(&totals);
                let k = base.topology.num_ers();
                let per_er: Vec<String> = (0..k)
                    .map(|i| {
                        let vals: Vec<f64> = metrics.iter().map(|m| m.received_power[i]).collect();
                        format!("{:.6e}", aggregate(&vals).mean)
                    })
                    .collect();
                println!("{name},{seeds},{:.6e},{:.3e},{}", t.mean, t.ci95, per_er.join(";"));
            }
            Ok(violations)
        }
    }
}

fn apply_param(
    base: &ScenarioConfig,
    param: &str,
    value: f64,
) -> Result<ScenarioConfig, Box<dyn std::error::Error>> {
    let mut cfg = base.clone();
    match param {
        "v" | "V" => {
            cfg.policy = match cfg.policy {
                PolicySpec::Mdpp { p_avg, p_peak, .. } => PolicySpec::Mdpp { p_avg, p_peak, v: value },
                PolicySpec::QfWpt { p_avg, p_peak, p_min, utility, .. } => {
                    PolicySpec::QfWpt { p_avg, p_peak, p_min, v: value, utility }
                }
                PolicySpec::QgfIt { p_avg, p_peak, d_min, utility, .. } => {
                    PolicySpec::QgfIt { p_avg, p_peak, d_min, v: value, utility }
                }
                PolicySpec::Optimal { .. } => {
                    return Err("the optimal policy has no control parameter V".into())
                }
            };
        }
        "dr" => {
            // Move the farthest E-R so its distance becomes `value` times the
            // closest E-R's, keeping its bearing from the E-AP.
            if !(value >= 1.0) {
                return Err("dr must be at least 1".into());
            }
            let topo = &mut cfg.topology;
            let k = topo.num_ers();
            if k < 2 {
                return Err("dr sweep needs at least two E-Rs".into());
            }
            let distances: Vec<f64> = (0..k).map(|i| topo.er_distance(i)).collect();
            let far =
                (0..k).max_by(|&a, &b| distances[a].partial_cmp(&distances[b]).unwrap()).unwrap();
            let close = (0..k)
                .filter(|&i| i != far)
                .min_by(|&a, &b| distances[a].partial_cmp(&distances[b]).unwrap())
                .unwrap();
            let target = value * distances[close];
            let dir = [
                (topo.er_positions[far][0] - topo.eap_position[0]) / distances[far],
                (topo.er_positions[far][1] - topo.eap_position[1]) / distances[far],
            ];
            topo.er_positions[far] =
                [topo.eap_position[0] + dir[0] * target, topo.eap_position[1] + dir[1] * target];
        }
        other => return Err(format!("unknown sweep parameter '{other}' (expected v or dr)").into()),
    }
    cfg.validate()?;
    Ok(cfg)
}

fn policy_by_name(
    base: &ScenarioConfig,
    name: &str,
) -> Result<PolicySpec, Box<dyn std::error::Error>> {
    let p_avg = base.policy.p_avg();
    let p_peak = base.policy.p_peak();
    let (v, p_min, d_min, utility) = match &base.policy {
        PolicySpec::Optimal { .. } => (1e4, 0.0, 0.0, wpcn::policy_fair::Utility::Sum),
        PolicySpec::Mdpp { v, .. } => (*v, 0.0, 0.0, wpcn::policy_fair::Utility::Sum),
        PolicySpec::QfWpt { v, p_min, utility, .. } => (*v, *p_min, 0.0, *utility),
        PolicySpec::QgfIt { v, d_min, utility, .. } => (*v, 0.0, *d_min, *utility),
    };
    Ok(match name {
        "optimal" => PolicySpec::Optimal { p_avg, p_peak },
        "mdpp" => PolicySpec::Mdpp { p_avg, p_peak, v },
        "qf-wpt" => PolicySpec::QfWpt { p_avg, p_peak, p_min, v, utility },
        "qgf-it" => PolicySpec::QgfIt { p_avg, p_peak, d_min, v, utility },
        other => return Err(format!("unknown policy '{other}'").into()),
    })
}

fn print_run(cfg: &ScenarioConfig, m: &RunMetrics) {
    let summary = RunSummary::new(cfg, m);
    println!("policy            : {}", cfg.policy.name());
    println!("horizon           : {} slots (seed {})", m.horizon, cfg.seed);
    if let Some(th) = m.threshold {
        println!("threshold         : {th:.6e}");
    }
    println!("avg tx power      : {:.6e} W (budget {:.3e} W)", m.avg_tx_power, cfg.policy.p_avg());
    println!("transmit fraction : {:.4}", m.transmit_fraction);
    println!("total received    : {:.6e} W", m.total_received_power);
    let has_bits = summary.throughput.iter().any(|d| *d > 0.0);
    for (i, q) in m.received_power.iter().enumerate() {
        if has_bits {
            println!("  E-R {:>2}          : {:.6e} W, {:.4} bits/slot", i + 1, q, m.throughput[i]);
        } else {
            println!("  E-R {:>2}          : {:.6e} W", i + 1, q);
        }
    }
    if m.converged {
        println!("convergence       : slot {}", m.convergence_time);
    } else {
        println!("convergence       : not within horizon");
    }
    println!("violations        : {:?}", m.violations);
    if m.max_kkt_residual > 0.0 {
        println!("max KKT residual  : {:.3e}", m.max_kkt_residual);
    }
}

fn sweep_header(k: usize) -> String {
    let mut s = String::from("param,value,seed,total_received_w,avg_tx_w,convergence_time,converged");
    for i in 1..=k {
        s.push_str(&format!(",q_{i}"));
    }
    s
}

fn sweep_row(param: &str, value: f64, cfg: &ScenarioConfig, m: &RunMetrics) -> String {
    let mut s = format!(
        "{param},{value},{},{},{},{},{}",
        cfg.seed, m.total_received_power, m.avg_tx_power, m.convergence_time, m.converged
    );
    for q in &m.received_power {
        s.push_str(&format!(",{q}"));
    }
    s
}
