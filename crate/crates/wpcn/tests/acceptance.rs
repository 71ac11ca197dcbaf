//! Acceptance experiments: one test per criterion, each printing a pass/fail
//! line with the measured numbers. The Monte-Carlo run bank (≈250 scenario
//! runs of up to 10⁶ slots) is computed once and shared across the tests;
//! expect the full suite to take tens of minutes of CPU.
//!
//! Criterion summary:
//! 1. Near-optimality of MDPP against the calibrated threshold policy across
//!    (P_avg, V), with the B/V bound.
//! 2. Long-run average transmit power within 0.5% of the budget for every
//!    converged queue-driven run.
//! 3. Convergence time nondecreasing in V.
//! 4. Max-min fairness equalizes the two receivers; no-fairness MDPP starves
//!    the far one.
//! 5. Total-power ordering max-min ≤ proportional-fair ≤ no-fairness, and
//!    max-min totals nonincreasing in the distance ratio.
//! 6. Joint-policy per-slot invariants: peak power, energy causality, τ-sum,
//!    and the water-level stationarity residual.
//! 7. Minimum-throughput satisfaction under an achievable floor.
//! 8. Numerics: eigen/SVD residual bounds, Lambert W defect, and the γ
//!    subproblem against grid-search oracles.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use wpcn::channel::Topology;
use wpcn::numerics::{empirical_quantile, hermitian_eig, lambert_w0, svd, CMatrix};
use wpcn::policy_fair::{solve_gamma, Utility};
use wpcn::sim::{aggregate, presets, run_many, RunMetrics, ScenarioConfig};

const HORIZON: usize = 1_000_000;
const SEEDS: u64 = 10;
const FAIR_SEEDS: u64 = 10;
const P_AVGS: [f64; 3] = [0.2, 0.4, 0.8];
const GAP_VS: [f64; 3] = [1e3, 1e4, 1e5];
const CONV_VS: [f64; 4] = [1e2, 1e3, 1e4, 1e5];
const DRS: [f64; 4] = [1.0, 1.5, 2.0, 2.5];
/// Control parameter for the fair policies. The γ box reaches to P_peak while
/// the per-slot received power is ~10⁻⁴ W, so the fairness queues equilibrate
/// through rare bang-bang γ pulses; V below the pulse quantum keeps the queue
/// levels pinned to the pulse structure and equilibration within the horizon.
const FAIR_V: f64 = 1e-3;
/// No-fairness reference for the near–far sweep.
const MDPP_REF_V: f64 = 1e4;
/// Control parameter for the joint policy (bits-scale queues).
const QGF_V: f64 = 100.0;

struct Bank {
    /// Per P_avg (mW key): per-seed metrics of the calibrated threshold policy.
    optimal: BTreeMap<u64, Vec<RunMetrics>>,
    /// Per (P_avg mW, V) key: per-seed MDPP metrics.
    mdpp: BTreeMap<(u64, u64), Vec<RunMetrics>>,
    /// Per (dr×10, policy name): per-seed metrics of the fairness sweep.
    fair: BTreeMap<(u64, &'static str), Vec<RunMetrics>>,
    /// Symmetric ten-receiver joint-policy run without a throughput floor.
    uplink_base: RunMetrics,
    /// Same with the criterion's floor: (d_min, metrics).
    uplink_floored: (f64, RunMetrics),
    /// Asymmetric variant where the floor genuinely binds on the far
    /// receiver: (d_min, far index, unconstrained far average, metrics).
    uplink_binding: (f64, usize, f64, RunMetrics),
}

fn pavg_key(p: f64) -> u64 {
    (p * 1000.0).round() as u64
}

fn dr_key(dr: f64) -> u64 {
    (dr * 10.0).round() as u64
}

static BANK: OnceLock<Bank> = OnceLock::new();

fn bank() -> &'static Bank {
    BANK.get_or_init(build_bank)
}

fn asymmetric_uplink_topology() -> (Topology, usize) {
    let mut topo = presets::uplink_topology();
    topo.er_positions[0] = [4.0, 0.0];
    (topo, 0)
}

fn build_bank() -> Bank {
    let mut configs: Vec<ScenarioConfig> = Vec::new();

    // Threshold-optimal and MDPP runs on the two-receiver baseline.
    for &p_avg in &P_AVGS {
        for s in 0..SEEDS {
            configs.push(presets::optimal_scenario(p_avg, HORIZON, 1 + s));
        }
        for &v in &GAP_VS {
            for s in 0..SEEDS {
                configs.push(presets::mdpp_scenario(p_avg, v, HORIZON, 1 + s));
            }
        }
    }
    // Extra V = 100 point for the convergence-time trend at P_avg = 0.4.
    for s in 0..SEEDS {
        configs.push(presets::mdpp_scenario(0.4, 1e2, HORIZON, 1 + s));
    }

    // Near–far fairness sweep: max-min, proportional-fair, and MDPP.
    for &dr in &DRS {
        for s in 0..FAIR_SEEDS {
            configs.push(presets::fair_scenario(dr, Utility::MaxMin, 0.4, FAIR_V, HORIZON, 101 + s));
            configs.push(presets::fair_scenario(
                dr,
                Utility::ProportionalFair,
                0.4,
                FAIR_V,
                HORIZON,
                101 + s,
            ));
            configs.push(presets::mdpp_fairness_scenario(dr, 0.4, MDPP_REF_V, HORIZON, 101 + s));
        }
    }

    // Joint-policy runs on the ten-receiver circle (plus the asymmetric
    // variant); the floored runs are configured after the baseline is known.
    configs.push(presets::uplink_scenario(0.0, QGF_V, HORIZON, 7));
    let (asym_topo, _) = asymmetric_uplink_topology();
    configs.push(ScenarioConfig {
        topology: asym_topo,
        ..presets::uplink_scenario(0.0, QGF_V, HORIZON, 7)
    });

    let metrics = run_many(&configs).expect("acceptance runs");
    let mut it = metrics.into_iter();

    let mut optimal = BTreeMap::new();
    let mut mdpp: BTreeMap<(u64, u64), Vec<RunMetrics>> = BTreeMap::new();
    for &p_avg in &P_AVGS {
        let runs: Vec<RunMetrics> = (0..SEEDS).map(|_| it.next().unwrap()).collect();
        optimal.insert(pavg_key(p_avg), runs);
        for &v in &GAP_VS {
            let runs: Vec<RunMetrics> = (0..SEEDS).map(|_| it.next().unwrap()).collect();
            mdpp.insert((pavg_key(p_avg), v as u64), runs);
        }
    }
    let runs: Vec<RunMetrics> = (0..SEEDS).map(|_| it.next().unwrap()).collect();
    mdpp.insert((pavg_key(0.4), 100), runs);

    let mut fair: BTreeMap<(u64, &'static str), Vec<RunMetrics>> = BTreeMap::new();
    for &dr in &DRS {
        for _ in 0..FAIR_SEEDS {
            fair.entry((dr_key(dr), "maxmin")).or_default().push(it.next().unwrap());
            fair.entry((dr_key(dr), "pf")).or_default().push(it.next().unwrap());
            fair.entry((dr_key(dr), "mdpp")).or_default().push(it.next().unwrap());
        }
    }

    let uplink_base = it.next().unwrap();
    let asym_base = it.next().unwrap();
    assert!(it.next().is_none());

    // Second wave: throughput floors derived from the unconstrained runs.
    let mean_d: f64 =
        uplink_base.throughput.iter().sum::<f64>() / uplink_base.throughput.len() as f64;
    let d_min = 0.1 * mean_d;

    let (asym_topo, far) = asymmetric_uplink_topology();
    let far_unconstrained = asym_base.throughput[far];
    // Above the unconstrained share (so the floor binds) but well inside the
    // achievable region (the scheduler can always serve the far receiver more
    // often).
    let d_min_binding = 1.15 * far_unconstrained;

    let floored = vec![
        presets::uplink_scenario(d_min, QGF_V, HORIZON, 7),
        ScenarioConfig {
            topology: asym_topo,
            ..presets::uplink_scenario(d_min_binding, QGF_V, HORIZON, 7)
        },
    ];
    let mut floored_metrics = run_many(&floored).expect("floored runs").into_iter();

    Bank {
        optimal,
        mdpp,
        fair,
        uplink_base,
        uplink_floored: (d_min, floored_metrics.next().unwrap()),
        uplink_binding: (d_min_binding, far, far_unconstrained, floored_metrics.next().unwrap()),
    }
}

fn totals(runs: &[RunMetrics]) -> Vec<f64> {
    runs.iter().map(|m| m.total_received_power).collect()
}

/// Spearman rank correlation with average ranks for ties.
fn spearman(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let n = v.len();
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).unwrap());
        let mut r = vec![0.0; n];
        let mut i = 0;
        while i < n {
            let mut j = i;
            while j + 1 < n && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for &k in &idx[i..=j] {
                r[k] = avg;
            }
            i = j + 1;
        }
        r
    }
    let rx = ranks(x);
    let ry = ranks(y);
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum::<f64>().sqrt();
    let sy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum::<f64>().sqrt();
    cov / (sx * sy)
}

#[test]
fn criterion_1_near_optimality_gap_bound() {
    let bank = bank();
    let b = presets::P_PEAK * presets::P_PEAK / 2.0;
    let mut failures = Vec::new();
    for &p_avg in &P_AVGS {
        let opt = aggregate(&totals(&bank.optimal[&pavg_key(p_avg)]));
        for &v in &GAP_VS {
            let md = aggregate(&totals(&bank.mdpp[&(pavg_key(p_avg), v as u64)]));
            let sigma = (opt.se * opt.se + md.se * md.se).sqrt();
            let upper_ok = opt.mean <= md.mean + 3.0 * sigma;
            let lower_ok = md.mean >= opt.mean - b / v - 3.0 * sigma;
            println!(
                "criterion 1 point P_avg={p_avg} V={v:.0e}: opt={:.6e} mdpp={:.6e} gap={:+.2e} \
                 3σ={:.2e} B/V={:.1e} [opt<=mdpp+3σ: {}] [mdpp>=opt-B/V-3σ: {}]",
                opt.mean,
                md.mean,
                opt.mean - md.mean,
                3.0 * sigma,
                b / v,
                if upper_ok { "ok" } else { "FAIL" },
                if lower_ok { "ok" } else { "FAIL" },
            );
            if !upper_ok {
                failures.push(format!(
                    "P_avg={p_avg} V={v:.0e}: measured optimality gap {:.3e} W exceeds 3σ̂={:.3e} W",
                    opt.mean - md.mean,
                    3.0 * sigma
                ));
            }
            if !lower_ok {
                failures.push(format!("P_avg={p_avg} V={v:.0e}: B/V bound violated"));
            }
        }
    }
    if failures.is_empty() {
        println!("criterion 1 (near-optimality gap bound): PASS");
    } else {
        println!("criterion 1 (near-optimality gap bound): FAIL");
        panic!(
            "the drift-plus-penalty policy shows its real finite-V optimality gap, which shrinks \
             with V but exceeds Monte-Carlo noise at small V; failing points:\n{}",
            failures.join("\n")
        );
    }
}

#[test]
fn criterion_2_average_power_constraint() {
    let bank = bank();
    let mut checked = 0usize;
    let mut converged = 0usize;
    let mut worst: f64 = 0.0;
    let mut check = |p_avg: f64, budget_binds: bool, runs: &[RunMetrics]| {
        for m in runs {
            checked += 1;
            if m.converged {
                converged += 1;
                let rel = m.avg_tx_power / p_avg - 1.0;
                worst = worst.max(rel);
                assert!(
                    m.avg_tx_power <= p_avg * 1.005,
                    "converged run exceeds the average power budget: {} > {}",
                    m.avg_tx_power,
                    p_avg * 1.005
                );
                if budget_binds {
                    // MDPP spends the whole budget when it binds.
                    assert!(
                        m.avg_tx_power >= p_avg * 0.99,
                        "converged MDPP run left budget unused: {} < {}",
                        m.avg_tx_power,
                        p_avg * 0.99
                    );
                }
            }
        }
    };
    for (&(pk, _), runs) in &bank.mdpp {
        check(pk as f64 / 1000.0, true, runs);
    }
    for (&(_, name), runs) in &bank.fair {
        check(0.4, name == "mdpp", runs);
    }
    check(0.03, false, std::slice::from_ref(&bank.uplink_base));
    check(0.03, false, std::slice::from_ref(&bank.uplink_floored.1));
    check(0.03, false, std::slice::from_ref(&bank.uplink_binding.3));
    assert!(converged > 0, "no run converged; the criterion would be vacuous");
    println!(
        "criterion 2 (average power): PASS — {converged}/{checked} runs converged, worst overshoot {:+.3e} relative",
        worst
    );
}

#[test]
fn criterion_3_convergence_time_monotone_in_v() {
    let bank = bank();
    let mut vs = Vec::new();
    let mut means = Vec::new();
    for &v in &CONV_VS {
        let runs = &bank.mdpp[&(pavg_key(0.4), v as u64)];
        let conv: Vec<f64> = runs.iter().map(|m| m.convergence_time as f64).collect();
        let a = aggregate(&conv);
        println!("criterion 3 point V={v:.0e}: mean convergence {:.0} slots", a.mean);
        vs.push(v);
        means.push(a.mean);
    }
    let rho = spearman(&vs, &means);
    let nondecreasing = means.windows(2).all(|w| w[1] >= w[0]);
    assert!(
        rho > 0.9,
        "Spearman correlation {rho} ≤ 0.9 between V and mean convergence time"
    );
    println!(
        "criterion 3 (convergence time vs V): PASS — Spearman ρ = {rho:.3}, nondecreasing: {nondecreasing}"
    );
}

#[test]
fn criterion_4_maxmin_equal_power_and_mdpp_starvation() {
    let bank = bank();
    let mut failures = Vec::new();
    for &dr in &DRS {
        let runs = &bank.fair[&(dr_key(dr), "maxmin")];
        let q1 = aggregate(&runs.iter().map(|m| m.received_power[0]).collect::<Vec<_>>());
        let q2 = aggregate(&runs.iter().map(|m| m.received_power[1]).collect::<Vec<_>>());
        let gap = (q1.mean - q2.mean).abs() / q1.mean.max(q2.mean);
        let ok = gap <= 0.05;
        println!(
            "criterion 4 point dr={dr}: max-min Q1={:.4e} Q2={:.4e} relative gap={:.1}% [{}]",
            q1.mean,
            q2.mean,
            gap * 100.0,
            if ok { "ok" } else { "FAIL" }
        );
        if !ok {
            failures.push(format!("dr={dr}: max-min power gap {:.1}% exceeds 5%", gap * 100.0));
        }
    }

    let runs = &bank.fair[&(dr_key(2.5), "mdpp")];
    let q1 = aggregate(&runs.iter().map(|m| m.received_power[0]).collect::<Vec<_>>());
    let tot = aggregate(&totals(runs));
    let share = q1.mean / tot.mean;
    println!(
        "criterion 4 point dr=2.5 no-fairness: near receiver share = {:.1}% [{}]",
        share * 100.0,
        if share >= 0.9 { "ok" } else { "FAIL" }
    );
    if share < 0.9 {
        failures.push(format!("no-fairness near share {:.1}% below 90%", share * 100.0));
    }

    if failures.is_empty() {
        println!("criterion 4 (max-min fairness): PASS");
    } else {
        println!("criterion 4 (max-min fairness): FAIL");
        panic!(
            "the max-min queues cannot equalize received power here: the near receiver's \
             incidental harvest from beams aimed at the far one (≈M·g_near per slot against the \
             far receiver's best directed gain) puts a floor on the imbalance at these antenna \
             counts; failing points:\n{}",
            failures.join("\n")
        );
    }
}

#[test]
fn criterion_5_fairness_ordering_and_monotonicity() {
    let bank = bank();
    let mut mmf_means = Vec::new();
    for &dr in &DRS {
        let mmf = aggregate(&totals(&bank.fair[&(dr_key(dr), "maxmin")]));
        let pf = aggregate(&totals(&bank.fair[&(dr_key(dr), "pf")]));
        let md = aggregate(&totals(&bank.fair[&(dr_key(dr), "mdpp")]));
        mmf_means.push(mmf.mean);
        if dr > 1.0 {
            let s1 = 3.0 * (mmf.se * mmf.se + pf.se * pf.se).sqrt();
            let s2 = 3.0 * (pf.se * pf.se + md.se * md.se).sqrt();
            println!(
                "criterion 5 point dr={dr}: totals maxmin={:.4e} ≤ pf={:.4e} ≤ no-fairness={:.4e}",
                mmf.mean, pf.mean, md.mean
            );
            assert!(
                mmf.mean <= pf.mean + s1,
                "dr={dr}: max-min total {} above proportional-fair {} beyond 3σ̂",
                mmf.mean,
                pf.mean
            );
            assert!(
                pf.mean <= md.mean + s2,
                "dr={dr}: proportional-fair total {} above no-fairness {} beyond 3σ̂",
                pf.mean,
                md.mean
            );
        }
    }
    for w in mmf_means.windows(2) {
        assert!(
            w[1] <= w[0],
            "max-min total increased along the distance sweep: {} -> {}",
            w[0],
            w[1]
        );
    }
    println!(
        "criterion 5 (fairness ordering): PASS — max-min totals {:?} nonincreasing",
        mmf_means.iter().map(|v| format!("{v:.3e}")).collect::<Vec<_>>()
    );
}

#[test]
fn criterion_6_joint_policy_per_slot_invariants() {
    let bank = bank();
    for (name, m) in [
        ("unconstrained", &bank.uplink_base),
        ("floored", &bank.uplink_floored.1),
        ("binding", &bank.uplink_binding.3),
    ] {
        assert_eq!(
            m.violations.total(),
            0,
            "{name}: per-slot invariant violations: {:?}",
            m.violations
        );
        assert!(
            m.max_kkt_residual <= 1e-9,
            "{name}: water-level stationarity residual {} above 1e-9",
            m.max_kkt_residual
        );
    }
    println!(
        "criterion 6 (joint-policy invariants): PASS — zero violations across {} slots, max KKT residual {:.2e}",
        3 * HORIZON,
        bank.uplink_base
            .max_kkt_residual
            .max(bank.uplink_floored.1.max_kkt_residual)
            .max(bank.uplink_binding.3.max_kkt_residual)
    );
}

#[test]
fn criterion_7_minimum_throughput_satisfaction() {
    let bank = bank();
    let (d_min, m) = &bank.uplink_floored;
    for (i, d) in m.throughput.iter().enumerate() {
        assert!(
            *d >= d_min * 0.99,
            "receiver {i}: average throughput {d} below the floor {d_min} (99% tolerance)"
        );
    }
    let (d_min_b, far, unconstrained, mb) = &bank.uplink_binding;
    assert!(
        mb.throughput[*far] >= d_min_b * 0.99,
        "far receiver: {} below binding floor {}",
        mb.throughput[*far],
        d_min_b
    );
    println!(
        "criterion 7 (minimum throughput): PASS — symmetric floor {:.4} bits/slot met by all \
         (min {:.4}); binding floor {:.4} lifted the far receiver from {:.4} to {:.4} bits/slot",
        d_min,
        m.throughput.iter().cloned().fold(f64::INFINITY, f64::min),
        d_min_b,
        unconstrained,
        mb.throughput[*far]
    );
}

#[test]
fn criterion_8_numerics_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(2025);

    // Hermitian eigendecomposition residuals on 10³ random instances.
    let mut worst_eig: f64 = 0.0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=64);
        let mut a = CMatrix::zeros(n, n);
        for i in 0..n {
            a.set(i, i, Complex64::new(rng.gen_range(-1.0..1.0), 0.0));
            for j in i + 1..n {
                let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                a.set(i, j, z);
                a.set(j, i, z.conj());
            }
        }
        let eig = hermitian_eig(&a).unwrap();
        let bound = 1e-10 * (1.0 + a.frobenius_norm());
        for (lam, v) in eig.eigenvalues.iter().zip(&eig.eigenvectors) {
            let av = a.mul_vec(v).unwrap();
            let r: f64 =
                av.iter().zip(v).map(|(x, y)| (x - y * *lam).norm_sqr()).sum::<f64>().sqrt();
            worst_eig = worst_eig.max(r / bound);
            assert!(r <= bound, "eigen residual {r} above bound {bound} at n={n}");
        }
    }

    // SVD reconstruction residuals on 10³ random instances.
    let mut worst_svd: f64 = 0.0;
    for _ in 0..1000 {
        let m = rng.gen_range(1..=64);
        let n = rng.gen_range(1..=64);
        let data: Vec<Complex64> = (0..m * n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let a = CMatrix::new(m, n, data).unwrap();
        let dec = svd(&a).unwrap();
        let mut rec = CMatrix::zeros(m, n);
        for k in 0..dec.rank {
            let u = dec.left.column(k);
            let v = dec.right.column(k);
            for i in 0..m {
                for j in 0..n {
                    let cur = rec.get(i, j);
                    rec.set(i, j, cur + u[i] * v[j].conj() * dec.singulars[k]);
                }
            }
        }
        let bound = 1e-9 * (1.0 + a.frobenius_norm());
        let err = rec.sub(&a).unwrap().frobenius_norm();
        worst_svd = worst_svd.max(err / bound);
        assert!(err <= bound, "SVD reconstruction {err} above bound {bound} at {m}x{n}");
    }

    // Lambert W defect on a 10³-point domain grid.
    let branch = -(-1.0f64).exp();
    let mut worst_w: f64 = 0.0;
    for k in 0..1000 {
        let x = if k < 500 {
            branch + (0.5 - branch) * k as f64 / 499.0
        } else {
            10f64.powf(-6.0 + 14.0 * (k - 500) as f64 / 499.0)
        };
        let w = lambert_w0(x).unwrap();
        let defect = (w * w.exp() - x).abs() / x.abs().max(1.0);
        worst_w = worst_w.max(defect);
        assert!(defect <= 1e-12, "Lambert defect {defect} at x={x}");
    }

    // γ subproblem against brute-force grid oracles for K ≤ 3. The grids are
    // per-coordinate for the separable utilities and diagonal for max-min
    // (any coordinate above the minimum only adds cost).
    let utilities = [
        Utility::Sum,
        Utility::ProportionalFair,
        Utility::MaxMin,
        Utility::AlphaFair(0.5),
        Utility::AlphaFair(3.0),
    ];
    let steps = 1000;
    for trial in 0..120 {
        let k = 1 + trial % 3;
        let upper = 2.0;
        let v = rng.gen_range(0.05..10.0);
        let g: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..6.0)).collect();
        for utility in &utilities {
            let gamma = solve_gamma(utility, v, &g, upper).unwrap();
            let f = |x: &[f64]| -> f64 {
                -v * utility.eval(x) + x.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>()
            };
            let got = f(&gamma);
            let oracle = match utility {
                Utility::MaxMin => (0..=steps)
                    .map(|s| f(&vec![upper * s as f64 / steps as f64; k]))
                    .fold(f64::INFINITY, f64::min),
                _ => {
                    let mut best = 0.0;
                    for i in 0..k {
                        let mut best_i = f64::INFINITY;
                        for s in 0..=steps {
                            let t = (upper * s as f64 / steps as f64).max(1e-9);
                            best_i = best_i.min(-v * utility.eval(&[t]) + g[i] * t);
                        }
                        best += best_i;
                    }
                    best
                }
            };
            assert!(
                got <= oracle + 1e-9 * (1.0 + oracle.abs()),
                "{utility:?}: closed form {got} worse than grid oracle {oracle}"
            );
        }
    }

    // Quantile sanity used by the calibration path.
    let samples: Vec<f64> = (1..=100).map(|v| v as f64).collect();
    assert_eq!(empirical_quantile(&samples, 0.8).unwrap(), 80.0);

    println!(
        "criterion 8 (numerics): PASS — worst eig residual {:.2e} of bound, worst SVD residual {:.2e} of bound, worst W defect {:.2e}",
        worst_eig, worst_svd, worst_w
    );
}
