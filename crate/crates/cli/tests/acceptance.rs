//! End-to-end acceptance checks of the numerical contract, one test per
//! claim. Each test prints a single PASS/FAIL line with its measurements
//! (visible with `--nocapture`) and asserts the stated tolerance.
//!
//! The tests share one lock so the per-test runtime budgets are measured
//! without contention from sibling tests.

use std::process::Command;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use heavylimits::cluster::{ClusterConstants, ClusterLaw};
use heavylimits::limit::{cms_sample, triple_v, PoissonSeries};
use heavylimits::metric::{d_m1, M1Options};
use heavylimits::models::{InnovationLaw, ModelSpec};
use heavylimits::path::CadlagPath;
use heavylimits::seeds::{self, Purpose};
use heavylimits::verify::{
    ecf_compare, fclt_experiment, karamata_check, ks_critical, ks_two_sample,
    partial_sum_process, self_normalized_process, ExperimentConfig, Functional,
};
use heavylimits::Path64;
use rand::Rng;
use rayon::prelude::*;

static SEQUENTIAL: Mutex<()> = Mutex::new(());

fn lock() -> std::sync::MutexGuard<'static, ()> {
    SEQUENTIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn report(name: &str, ok: bool, detail: &str) {
    println!("{}: {name} ({detail})", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{name}: {detail}");
}

fn iid_spec(alpha: f64, p: f64) -> ModelSpec<f64> {
    ModelSpec::iid(InnovationLaw::new(alpha, p, 1.0).unwrap())
}

fn ma_spec(alpha: f64, p: f64, coeffs: &[f64]) -> ModelSpec<f64> {
    ModelSpec::ma(InnovationLaw::new(alpha, p, 1.0).unwrap(), coeffs.to_vec()).unwrap()
}

/// Extremal index of the MA(1) model with coefficients (1, 0.5) at tail index
/// 1: the Monte Carlo estimate must sit within 0.01 of the closed form 2/3
/// using 1e5 tail draws, in under 10 seconds.
#[test]
fn extremal_index_of_ma_matches_closed_form() {
    let _guard = lock();
    let spec = ma_spec(1.0, 0.5, &[1.0, 0.5]);
    let start = Instant::now();
    let mut rng = seeds::derive(2026, Purpose::Cluster, 0);
    let law = ClusterLaw::estimate(&spec, 100_000, &mut rng).unwrap();
    let elapsed = start.elapsed();
    let err = (law.theta.value - 2.0 / 3.0).abs();
    let ok = err < 0.01 && elapsed < Duration::from_secs(10);
    report(
        "extremal index MA(1,0.5), alpha=1",
        ok,
        &format!("theta={:.5}, |err|={err:.5} < 0.01, {:.2?} < 10s", law.theta.value, elapsed),
    );
}

/// For an iid cluster with p = 1 the two drift terms cancel: the first
/// characteristic triple has gamma exactly zero at alpha 0.5 and 1.5.
#[test]
fn iid_triple_drift_cancels_exactly() {
    let _guard = lock();
    let mut ok = true;
    let mut details = Vec::new();
    for alpha in [0.5f64, 1.5] {
        let constants = ClusterConstants::iid(alpha, 1.0);
        let tv = triple_v(alpha, 1.0, 1.0, &constants).unwrap();
        ok &= tv.drift == 0.0;
        details.push(format!("alpha={alpha}: drift={:?}", tv.drift));
    }
    report("iid drift cancellation", ok, &details.join(", "));
}

/// Truncated second moment of the normalized marginal against its slowly
/// varying limit u^(2-alpha) alpha/(2-alpha): relative error below 2% for
/// alpha in {0.5, 1, 1.5} and u in {0.25, 0.5, 1} at n = 1e6, within 1 s.
#[test]
fn truncated_second_moment_near_limit() {
    let _guard = lock();
    let start = Instant::now();
    let mut ok = true;
    let mut worst = 0.0f64;
    for alpha in [0.5f64, 1.0, 1.5] {
        let spec = iid_spec(alpha, 1.0);
        for u in [0.25f64, 0.5, 1.0] {
            let r = karamata_check(&spec, 1_000_000, u).unwrap();
            worst = worst.max(r.rel_error);
            ok &= r.rel_error < 0.02;
        }
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(1);
    report(
        "truncated-moment limit, 9 cells",
        ok,
        &format!("worst rel_error={worst:.3e} < 0.02, {elapsed:.2?} < 1s"),
    );
}

/// The series construction of V(1) (iid cluster, alpha = 0.8, p = 1, 1e4
/// points) agrees with the direct stable sampler: two-sample KS below the 1%
/// critical value in at least 8 of 10 fixed seeds, within 2 minutes.
#[test]
fn series_v_matches_direct_stable_sampler() {
    let _guard = lock();
    let (alpha, p) = (0.8, 1.0);
    let spec = iid_spec(alpha, p);
    let constants = ClusterConstants::iid(alpha, p);
    let params = triple_v(alpha, p, 1.0, &constants).unwrap().stable_params().unwrap();
    let start = Instant::now();
    let mut passes = 0;
    for seed in 1..=10u64 {
        let mut cluster_rng = seeds::derive(seed, Purpose::Cluster, 0);
        let law = ClusterLaw::estimate(&spec, 1000, &mut cluster_rng).unwrap();
        let series_vals: Vec<f64> = (0..2000u64)
            .into_par_iter()
            .map(|r| {
                let mut rng = seeds::derive(seed, Purpose::Series, r);
                let series = PoissonSeries::sample(&law, 10_000, &mut rng).unwrap();
                let (v, _) = series.build_v(p, None).unwrap();
                v.eval(0, 1.0)
            })
            .collect();
        let mut stable_rng = seeds::derive(seed, Purpose::StableSampler, 0);
        let direct: Vec<f64> = (0..2000).map(|_| cms_sample(&params, &mut stable_rng)).collect();
        let ks = ks_two_sample(&series_vals, &direct).unwrap();
        if ks.statistic < ks_critical(ks.eff_size, 0.01) {
            passes += 1;
        }
    }
    let elapsed = start.elapsed();
    let ok = passes >= 8 && elapsed < Duration::from_secs(120);
    report(
        "series V(1) vs stable sampler",
        ok,
        &format!("{passes}/10 seeds under the 1% critical value, {elapsed:.2?} < 2min"),
    );
}

/// Empirical characteristic function of 1e5 simulated V(1) draws against the
/// quadrature characteristic function of the triple, on |z| <= 5 with step
/// 0.25: max modulus error below 0.02 plus the noise floor, within 2 minutes.
#[test]
fn ecf_matches_quadrature_cf() {
    let _guard = lock();
    let (alpha, p) = (0.8, 1.0);
    let constants = ClusterConstants::iid(alpha, p);
    let tv = triple_v(alpha, p, 1.0, &constants).unwrap();
    let params = tv.stable_params().unwrap();
    let start = Instant::now();
    let mut rng = seeds::derive(2026, Purpose::StableSampler, 0);
    let samples: Vec<f64> = (0..100_000).map(|_| cms_sample(&params, &mut rng)).collect();
    let ecf = ecf_compare(&samples, &tv, 5.0, 0.25, 1e-8).unwrap();
    let elapsed = start.elapsed();
    let ok = ecf.pass && elapsed < Duration::from_secs(120);
    report(
        "ECF vs quadrature CF",
        ok,
        &format!(
            "max_error={:.4} < {:.4}, {elapsed:.2?} < 2min",
            ecf.max_error, ecf.threshold
        ),
    );
}

/// Full pipeline: self-normalized partial-sum terminals of 2000 finite series
/// (n = 1e4) against 2000 series-simulated V(1)/sqrt(W(1)) draws. KS below
/// the 1% critical value in at least 8 of 10 seeds, for the iid model and the
/// MA(1) model with coefficients (1, 0.5), within 10 minutes total.
#[test]
fn self_normalized_sums_converge_iid_and_ma() {
    let _guard = lock();
    let start = Instant::now();
    let mut details = Vec::new();
    let mut ok = true;
    for (label, spec) in [
        ("iid", iid_spec(0.8, 1.0)),
        ("ma(1,0.5)", ma_spec(0.8, 1.0, &[1.0, 0.5])),
    ] {
        let mut passes = 0;
        for seed in 1..=10u64 {
            let mut config = ExperimentConfig::new(spec.clone(), 10_000, 2000, seed);
            config.functionals = vec![Functional::SelfNormAtOne];
            let out = fclt_experiment(&config).unwrap();
            if out.report.functionals[0].pass_1pct {
                passes += 1;
            }
        }
        ok &= passes >= 8;
        details.push(format!("{label}: {passes}/10"));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(600);
    report(
        "self-normalized convergence",
        ok,
        &format!("{} seeds under the 1% critical value, {elapsed:.2?} < 10min", details.join(", ")),
    );
}

fn random_step_path<R: Rng>(rng: &mut R) -> Path64 {
    let k = rng.gen_range(2..=5);
    let mut interior: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..0.95)).collect();
    interior.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    interior.dedup();
    let mut knots = vec![0.0];
    knots.extend(interior);
    knots.push(1.0);
    let values: Vec<f64> = knots.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
    CadlagPath::step(knots, vec![values]).expect("strictly increasing knots")
}

/// Metric axioms and calibration of the M1 distance: identity, symmetry, and
/// the triangle inequality within 1e-3 on 100 random step-path triples; the
/// uniform-distance upper bound on every pair; exact values on constants; and
/// monotone ramp-to-step convergence. Under 1 minute.
#[test]
fn m1_metric_axioms_and_calibration() {
    let _guard = lock();
    let tol = 1e-3;
    let opts = M1Options::default();
    let start = Instant::now();
    let mut rng = seeds::derive(2026, Purpose::Diagnostics, 7);
    let mut ok = true;
    for _ in 0..100 {
        let a = random_step_path(&mut rng);
        let b = random_step_path(&mut rng);
        let c = random_step_path(&mut rng);
        let d_aa = d_m1(&a, &a, opts).unwrap().value;
        let d_ab = d_m1(&a, &b, opts).unwrap().value;
        let d_ba = d_m1(&b, &a, opts).unwrap().value;
        let d_ac = d_m1(&a, &c, opts).unwrap().value;
        let d_bc = d_m1(&b, &c, opts).unwrap().value;
        ok &= d_aa <= tol;
        ok &= (d_ab - d_ba).abs() <= tol;
        ok &= d_ac <= d_ab + d_bc + tol;
        ok &= d_ab <= a.uniform_dist(&b).unwrap() + tol;
    }
    for _ in 0..10 {
        let (x, y) = (rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        let d = d_m1(&CadlagPath::constant(x), &CadlagPath::constant(y), opts).unwrap();
        ok &= (d.value - (x - y).abs()).abs() <= tol;
    }
    let step = CadlagPath::step(vec![0.0, 0.5, 1.0], vec![vec![0.0, 1.0, 1.0]]).unwrap();
    let mut ramp_vals = Vec::new();
    for eps in [0.1f64, 0.05, 0.025, 0.0125] {
        let ramp = CadlagPath::piecewise_linear(
            vec![0.0, 0.5 - eps, 0.5 + eps, 1.0],
            vec![vec![0.0, 0.0, 1.0, 1.0]],
        )
        .unwrap();
        ramp_vals.push(d_m1(&step, &ramp, opts).unwrap().value);
    }
    ok &= ramp_vals.windows(2).all(|w| w[1] < w[0]);
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(60);
    report(
        "M1 metric axioms",
        ok,
        &format!(
            "100 triples within tol={tol}, ramp distances {:?} decreasing, {elapsed:.2?} < 1min",
            ramp_vals.iter().map(|v| (v * 1e4).round() / 1e4).collect::<Vec<_>>()
        ),
    );
}

/// The self-normalized path equals divide-by-sqrt of the frozen terminal
/// applied to the partial-sum pair, pointwise to 1e-12, on 100 random inputs.
#[test]
fn pipeline_composition_identity() {
    let _guard = lock();
    let specs = [iid_spec(0.8, 0.7), iid_spec(1.5, 0.4), ma_spec(0.9, 1.0, &[1.0, 0.5])];
    let mut worst = 0.0f64;
    let mut ok = true;
    for r in 0..100u64 {
        let spec = &specs[(r % 3) as usize];
        let n = 40 + (r as usize % 30);
        let norm = spec.norm_seq(n, 5).unwrap();
        let mut rng = seeds::derive(404, Purpose::Paths, r);
        let xs = spec.sample_path(n, &mut rng).unwrap();
        let l = partial_sum_process(&xs, &norm).unwrap();
        let direct = self_normalized_process(&xs, &norm).unwrap();
        let (x, frozen) = l
            .component(0)
            .unwrap()
            .freeze_terminal(&l.component(1).unwrap())
            .unwrap();
        let piped = x.divide_by_sqrt(&frozen).unwrap();
        ok &= piped.knots() == direct.knots();
        for i in 0..direct.knots().len() {
            let d = (piped.right_at_knot(0, i) - direct.right_at_knot(0, i)).abs();
            worst = worst.max(d);
        }
    }
    ok &= worst <= 1e-12;
    report(
        "pipeline composition identity",
        ok,
        &format!("100 inputs, max |divide(freeze(L)) - selfnorm| = {worst:.2e} <= 1e-12"),
    );
}

/// Every sampled W path is nondecreasing, and every jump the summation
/// functional accumulates from a same-signed cluster is single-signed:
/// 1e4 sampled series, zero violations.
#[test]
fn w_monotone_and_cluster_jumps_single_signed() {
    let _guard = lock();
    let positive_specs = [iid_spec(0.8, 1.0), ma_spec(1.3, 1.0, &[1.0, 0.5])];
    let mixed = ma_spec(1.1, 0.3, &[1.0, 0.5]);
    let mut laws = Vec::new();
    for (i, spec) in positive_specs.iter().chain([&mixed]).enumerate() {
        let mut rng = seeds::derive(99, Purpose::Cluster, i as u64);
        laws.push(ClusterLaw::estimate(spec, 20_000, &mut rng).unwrap());
    }
    let violations: usize = (0..10_000u64)
        .into_par_iter()
        .map(|r| {
            let law = &laws[(r % 3) as usize];
            let mut rng = seeds::derive(123, Purpose::Series, r);
            let series = PoissonSeries::sample(law, 100, &mut rng).unwrap();
            let mut bad = 0;
            let (w, _) = series.build_w().unwrap();
            if !w.is_nondecreasing() {
                bad += 1;
            }
            // Each cluster carries a single sign by construction; the jump
            // the functional accumulates at its arrival time must match it.
            for point in &series.points {
                let pos = point.cluster.iter().any(|x| *x > 0.0);
                let neg = point.cluster.iter().any(|x| *x < 0.0);
                if pos && neg {
                    bad += 1;
                }
            }
            let phi = series
                .to_point_measure()
                .unwrap()
                .summation_functional(0.1)
                .unwrap();
            for i in 0..phi.knots().len() {
                let jump_w = phi.right_at_knot(1, i) - phi.left_at_knot(1, i);
                if jump_w < 0.0 {
                    bad += 1;
                }
            }
            if law.model.p == 1.0 {
                for i in 0..phi.knots().len() {
                    let jump_v = phi.right_at_knot(0, i) - phi.left_at_knot(0, i);
                    if jump_v < 0.0 {
                        bad += 1;
                    }
                }
            }
            bad
        })
        .sum();
    report(
        "W monotone, jumps single-signed",
        violations == 0,
        &format!("10000 series, {violations} violations"),
    );
}

/// Two runs of the verification command with the same config and seed write
/// byte-identical report and sample files (timestamps live in the manifest,
/// which is excluded).
#[test]
fn verify_outputs_are_byte_identical() {
    let _guard = lock();
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("exp.toml");
    std::fs::write(
        &config,
        "[model]\nkind = \"iid\"\nalpha = 0.8\np = 1.0\n\n\
         [experiment]\nn = 2000\nreps = 400\nseed = 20260814\nn_points = 2000\n\
         theta_samples = 20000\nconstant_samples = 20000\necf_samples = 50000\n",
    )
    .unwrap();
    let run = |out: &std::path::Path| {
        Command::new(env!("CARGO_BIN_EXE_heavylimits"))
            .args(["--config", config.to_str().unwrap(), "--out", out.to_str().unwrap(), "verify"])
            .output()
            .expect("binary runs")
    };
    let (out_a, out_b) = (dir.path().join("a"), dir.path().join("b"));
    let ra = run(&out_a);
    let rb = run(&out_b);
    let mut ok = ra.status.code() == Some(0) && rb.status.code() == Some(0);
    let files = [
        "report.json",
        "samples_value_at_one.csv",
        "samples_value_at_half.csv",
        "samples_sup_abs.csv",
        "samples_self_norm_at_one.csv",
    ];
    let mut compared = 0;
    for name in files {
        let a = std::fs::read(out_a.join(name)).expect(name);
        let b = std::fs::read(out_b.join(name)).expect(name);
        ok &= a == b;
        compared += 1;
    }
    report(
        "verify output determinism",
        ok,
        &format!("exit codes (0, 0), {compared} payload files byte-identical"),
    );
}
