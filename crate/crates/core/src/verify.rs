//! Finite-sample processes and the convergence experiment.
//!
//! The finite side turns a simulated series into normalized partial-sum
//! paths; the limit side samples the Poisson cluster series. The experiment
//! compares marginal functionals of both sides with two-sample
//! Kolmogorov-Smirnov statistics and cross-checks the limit marginals against
//! their characteristic functions. Replicates use independently derived RNG
//! streams and are reduced in index order, so reports are reproducible for a
//! fixed seed regardless of thread count.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cluster::{ClusterConstants, ClusterError, ClusterLaw, McEstimate};
use crate::limit::{
    cms_sample, triple_v, triple_w, CharTriple, LimitError, PoissonSeries, StableParams,
};
use crate::models::{ModelError, ModelKind, ModelSpec, NormSeq};
use crate::path::{CadlagPath, PathError};
use crate::scalar::Real;
use crate::seeds::{self, Purpose};
use crate::special::kolmogorov_critical;
use crate::special::kolmogorov_survival;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("sample must be nonempty")]
    EmptySample,
    #[error("sample length must match the normalizing sequence")]
    LengthMismatch,
    #[error("self-normalization needs a nonzero sum of squares")]
    DegenerateSample,
    #[error("closed-form tail moments are only available for iid models")]
    IidOnly,
    #[error("invalid experiment configuration: {0}")]
    BadConfig(&'static str),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
    #[error(transparent)]
    Limit(#[from] LimitError),
    #[error(transparent)]
    Path(#[from] PathError),
}

/// The normalized two-component partial-sum path on the grid `k/n`:
/// `t -> (S_k / a_n - k b_n, sum_{i<=k} X_i^2 / a_n^2)`.
pub fn partial_sum_process<T: Real>(
    xs: &[T],
    norm: &NormSeq<T>,
) -> Result<CadlagPath<T>, VerifyError> {
    if xs.is_empty() {
        return Err(VerifyError::EmptySample);
    }
    if xs.len() != norm.n {
        return Err(VerifyError::LengthMismatch);
    }
    let n = xs.len();
    let nt = T::of_usize(n);
    let mut knots = Vec::with_capacity(n + 1);
    let mut first = Vec::with_capacity(n + 1);
    let mut second = Vec::with_capacity(n + 1);
    let mut sum = T::zero();
    let mut sum_sq = T::zero();
    knots.push(T::zero());
    first.push(T::zero());
    second.push(T::zero());
    for (k, x) in xs.iter().enumerate() {
        sum += *x;
        sum_sq += *x * *x;
        knots.push(T::of_usize(k + 1) / nt);
        first.push(sum / norm.a_n - T::of_usize(k + 1) * norm.b_n);
        second.push(sum_sq / (norm.a_n * norm.a_n));
    }
    CadlagPath::step(knots, vec![first, second]).map_err(VerifyError::from)
}

/// The self-normalized partial-sum path `t -> (S_k - k c_n) / zeta_n` with
/// `zeta_n^2 = sum_i X_i^2`.
pub fn self_normalized_process<T: Real>(
    xs: &[T],
    norm: &NormSeq<T>,
) -> Result<CadlagPath<T>, VerifyError> {
    if xs.is_empty() {
        return Err(VerifyError::EmptySample);
    }
    if xs.len() != norm.n {
        return Err(VerifyError::LengthMismatch);
    }
    let zeta = xs.iter().fold(T::zero(), |s, x| s + *x * *x).sqrt();
    if !(zeta > T::zero()) {
        return Err(VerifyError::DegenerateSample);
    }
    let n = xs.len();
    let nt = T::of_usize(n);
    let mut knots = Vec::with_capacity(n + 1);
    let mut vals = Vec::with_capacity(n + 1);
    let mut sum = T::zero();
    knots.push(T::zero());
    vals.push(T::zero());
    for (k, x) in xs.iter().enumerate() {
        sum += *x;
        knots.push(T::of_usize(k + 1) / nt);
        vals.push((sum - T::of_usize(k + 1) * norm.c_n) / zeta);
    }
    CadlagPath::step(knots, vec![vals]).map_err(VerifyError::from)
}

/// Two-sample Kolmogorov-Smirnov comparison.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct KsResult<T> {
    pub statistic: T,
    pub p_value: T,
    /// Effective sample size `m k / (m + k)`.
    pub eff_size: T,
}

/// Two-sample KS statistic and asymptotic p-value (tie-safe merge walk).
pub fn ks_two_sample<T: Real>(a: &[T], b: &[T]) -> Result<KsResult<T>, VerifyError> {
    if a.is_empty() || b.is_empty() {
        return Err(VerifyError::EmptySample);
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(|x, y| x.partial_cmp(y).expect("finite samples"));
    b.sort_by(|x, y| x.partial_cmp(y).expect("finite samples"));
    let (m, k) = (a.len(), b.len());
    let (mt, kt) = (T::of_usize(m), T::of_usize(k));
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = T::zero();
    while i < m && j < k {
        let x = a[i].min(b[j]);
        while i < m && a[i] <= x {
            i += 1;
        }
        while j < k && b[j] <= x {
            j += 1;
        }
        d = d.max((T::of_usize(i) / mt - T::of_usize(j) / kt).abs());
    }
    d = d.max(T::of_usize(m - i) / mt).max(T::of_usize(k - j) / kt);
    let eff_size = mt * kt / (mt + kt);
    let p_value = kolmogorov_survival(d * eff_size.sqrt());
    Ok(KsResult { statistic: d, p_value, eff_size })
}

/// Critical KS statistic at tail level `q` for effective size `eff`.
pub fn ks_critical<T: Real>(eff_size: T, q: T) -> T {
    kolmogorov_critical(q) / eff_size.sqrt()
}

/// One row of an empirical-characteristic-function comparison.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EcfRow<T> {
    pub z: T,
    pub ecf_re: T,
    pub ecf_im: T,
    pub cf_re: T,
    pub cf_im: T,
    pub error: T,
}

/// Empirical characteristic function of a sample against the quadrature
/// characteristic function of a triple.
#[derive(Clone, Debug, Serialize)]
pub struct EcfReport<T> {
    pub rows: Vec<EcfRow<T>>,
    pub max_error: T,
    /// Monte Carlo noise scale `1/sqrt(n)` of the ECF.
    pub noise_floor: T,
    /// Acceptance threshold used for the pass flag: `0.02 + 2/sqrt(n)`.
    pub threshold: T,
    pub pass: bool,
}

/// Compares the ECF of `samples` with the CF of `triple` on a symmetric grid
/// `z = -z_max, ..., z_max` with step `z_step`.
pub fn ecf_compare<T: Real>(
    samples: &[T],
    triple: &CharTriple<T>,
    z_max: T,
    z_step: T,
    cf_tol: T,
) -> Result<EcfReport<T>, VerifyError> {
    if samples.is_empty() {
        return Err(VerifyError::EmptySample);
    }
    if !(z_step > T::zero()) || !(z_max >= z_step) {
        return Err(VerifyError::BadConfig("ECF grid must have positive step and span"));
    }
    let steps = (z_max / z_step).round().to_i64().unwrap_or(0);
    let grid: Vec<T> = (-steps..=steps).map(|k| z_step * T::of(k as f64)).collect();
    let n = T::of_usize(samples.len());
    let rows = grid
        .par_iter()
        .map(|z| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for x in samples {
                let zx = *z * *x;
                acc += Complex::new(zx.cos(), zx.sin());
            }
            let ecf = acc / n;
            let cf = triple.char_function(*z, cf_tol)?.value;
            Ok(EcfRow {
                z: *z,
                ecf_re: ecf.re,
                ecf_im: ecf.im,
                cf_re: cf.re,
                cf_im: cf.im,
                error: (ecf - cf).norm(),
            })
        })
        .collect::<Result<Vec<_>, LimitError>>()?;
    let max_error = rows.iter().fold(T::zero(), |s, r| s.max(r.error));
    let noise_floor = T::one() / n.sqrt();
    let threshold = T::of(0.02) + T::of(2.0) / n.sqrt();
    Ok(EcfReport { rows, max_error, noise_floor, threshold, pass: max_error < threshold })
}

/// Truncated-second-moment check of the normalization: for an IID model,
/// `n E[(X_1/a_n)^2 1{|X_1| <= u a_n}]` in closed form against its limit
/// `u^{2-alpha} alpha / (2 - alpha)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct KaramataReport<T> {
    pub n: usize,
    pub u: T,
    pub empirical: T,
    pub limit: T,
    pub rel_error: T,
}

pub fn karamata_check<T: Real>(
    spec: &ModelSpec<T>,
    n: usize,
    u: T,
) -> Result<KaramataReport<T>, VerifyError> {
    if spec.kind != ModelKind::Iid {
        return Err(VerifyError::IidOnly);
    }
    if n == 0 {
        return Err(VerifyError::BadConfig("n must be positive"));
    }
    if !(u > T::zero()) {
        return Err(VerifyError::BadConfig("u must be positive"));
    }
    let alpha = spec.law.alpha;
    let a_n = spec.law.scale * T::of_usize(n).powf(T::one() / alpha);
    let empirical =
        T::of_usize(n) * spec.law.truncated_square_mean(u * a_n) / (a_n * a_n);
    let limit = u.powf(T::of(2.0) - alpha) * alpha / (T::of(2.0) - alpha);
    let rel_error = (empirical - limit).abs() / limit;
    Ok(KaramataReport { n, u, empirical, limit, rel_error })
}

/// Estimated probability that the compensated small-jump part of the
/// normalized partial sum exceeds `delta` in supremum norm.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SmallJumpRow<T> {
    pub u: T,
    pub prob: T,
    pub stderr: T,
}

/// Monte Carlo tightness diagnostic: for each threshold `u`, the fraction of
/// replicates with `max_k |sum_{i<=k} ((X_i/a_n) 1{|X_i| <= u a_n} - m_u)|
/// > delta`, where `m_u` is the truncated marginal mean at level `u a_n`.
pub fn small_jump_diagnostic<T: Real>(
    spec: &ModelSpec<T>,
    n: usize,
    us: &[T],
    delta: T,
    reps: usize,
    seed: u64,
) -> Result<Vec<SmallJumpRow<T>>, VerifyError> {
    if n == 0 || reps == 0 {
        return Err(VerifyError::BadConfig("n and reps must be positive"));
    }
    if !(delta > T::zero()) {
        return Err(VerifyError::BadConfig("delta must be positive"));
    }
    if us.iter().any(|u| !(*u > T::zero())) {
        return Err(VerifyError::BadConfig("thresholds must be positive"));
    }
    let norm = spec.norm_seq(n, seed)?;
    let a_n = norm.a_n;
    let means: Vec<T> = us
        .iter()
        .enumerate()
        .map(|(i, u)| {
            let mut rng = seeds::derive(seed, Purpose::Diagnostics, 1_000_000 + i as u64);
            spec.truncated_marginal_mean(*u * a_n, 2_000_000, &mut rng).0 / a_n
        })
        .collect();
    let exceed: Vec<usize> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = seeds::derive(seed, Purpose::Diagnostics, r as u64);
            let xs = spec.sample_path(n, &mut rng).expect("n > 0");
            let mut hits = vec![0usize; us.len()];
            let mut acc = vec![T::zero(); us.len()];
            let mut sup = vec![T::zero(); us.len()];
            for x in &xs {
                for (k, u) in us.iter().enumerate() {
                    let scaled = *x / a_n;
                    let kept =
                        if x.abs() <= *u * a_n { scaled } else { T::zero() };
                    acc[k] += kept - means[k];
                    sup[k] = sup[k].max(acc[k].abs());
                }
            }
            for (k, s) in sup.iter().enumerate() {
                if *s > delta {
                    hits[k] = 1;
                }
            }
            hits
        })
        .reduce(
            || vec![0usize; us.len()],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    let rt = T::of_usize(reps);
    Ok(us
        .iter()
        .zip(exceed)
        .map(|(u, hits)| {
            let prob = T::of_usize(hits) / rt;
            let stderr = (prob * (T::one() - prob) / rt).sqrt();
            SmallJumpRow { u: *u, prob, stderr }
        })
        .collect())
}

/// Marginal functionals compared between the finite-sample and limit sides.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    /// First component at t = 1.
    ValueAtOne,
    /// First component at t = 1/2.
    ValueAtHalf,
    /// Supremum of the absolute first component.
    SupAbs,
    /// Self-normalized value at t = 1.
    SelfNormAtOne,
}

impl Functional {
    pub fn name(self) -> &'static str {
        match self {
            Functional::ValueAtOne => "value_at_one",
            Functional::ValueAtHalf => "value_at_half",
            Functional::SupAbs => "sup_abs",
            Functional::SelfNormAtOne => "self_norm_at_one",
        }
    }

    pub const ALL: [Functional; 4] = [
        Functional::ValueAtOne,
        Functional::ValueAtHalf,
        Functional::SupAbs,
        Functional::SelfNormAtOne,
    ];
}

/// Configuration of a convergence experiment.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig<T> {
    pub model: ModelSpec<T>,
    /// Series length of the finite side.
    pub n: usize,
    /// Replicates per side.
    pub reps: usize,
    /// Points kept in each Poisson series.
    pub n_points: usize,
    /// Jump threshold for the limit path when `alpha >= 1`.
    pub u_min: T,
    pub seed: u64,
    pub functionals: Vec<Functional>,
    /// Tail draws for the extremal index estimate.
    pub theta_samples: usize,
    /// Cluster draws for the moment constants.
    pub constant_samples: usize,
    /// Stable samples for the ECF cross-check.
    pub ecf_samples: usize,
    pub ecf_z_max: T,
    pub ecf_z_step: T,
    /// Offset added to the drift of the characteristic function the ECF check
    /// compares against. Zero in normal runs; a nonzero value is a negative
    /// control that must make the check fail.
    pub ecf_drift_injection: T,
}

impl<T: Real> ExperimentConfig<T> {
    pub fn new(model: ModelSpec<T>, n: usize, reps: usize, seed: u64) -> Self {
        Self {
            model,
            n,
            reps,
            n_points: 10_000,
            u_min: T::of(0.05),
            seed,
            functionals: Functional::ALL.to_vec(),
            theta_samples: 200_000,
            constant_samples: 200_000,
            ecf_samples: 100_000,
            ecf_z_max: T::of(5.0),
            ecf_z_step: T::of(0.25),
            ecf_drift_injection: T::zero(),
        }
    }

    fn validate(&self) -> Result<(), VerifyError> {
        if self.n == 0 {
            return Err(VerifyError::BadConfig("n must be positive"));
        }
        if self.reps < 2 {
            return Err(VerifyError::BadConfig("need at least two replicates"));
        }
        if self.n_points == 0 {
            return Err(VerifyError::BadConfig("series needs at least one point"));
        }
        if self.functionals.is_empty() {
            return Err(VerifyError::BadConfig("need at least one functional"));
        }
        if self.theta_samples == 0 || self.constant_samples == 0 || self.ecf_samples == 0
        {
            return Err(VerifyError::BadConfig("Monte Carlo sizes must be positive"));
        }
        Ok(())
    }
}

/// KS comparison of one functional.
#[derive(Clone, Debug, Serialize)]
pub struct FunctionalReport<T> {
    pub name: &'static str,
    pub ks: KsResult<T>,
    pub crit_1pct: T,
    pub crit_5pct: T,
    pub pass_1pct: bool,
}

/// Averaged truncation metadata over the limit replicates.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TruncationReport<T> {
    /// Fraction of replicates whose smallest magnitude was below the jump
    /// threshold (always 1 when `alpha < 1`).
    pub covered_fraction: T,
    /// Mean compensation slope (`alpha < 1`).
    pub mean_compensation: Option<T>,
    /// Mean threshold-halving sensitivity of `V(1)` (`alpha >= 1`).
    pub mean_sensitivity: Option<T>,
    /// Mean estimated dropped mass of `W`.
    pub mean_w_tail: T,
    /// Smallest magnitude averaged over replicates.
    pub mean_min_magnitude: T,
}

/// Full experiment report. Serialization is deterministic: field order is
/// fixed and every collection is a vector.
#[derive(Clone, Debug, Serialize)]
pub struct TestReport<T> {
    pub seed: u64,
    pub model: ModelSpec<T>,
    pub n: usize,
    pub reps: usize,
    pub n_points: usize,
    pub u_min: Option<T>,
    pub norm: NormSeq<T>,
    pub theta: McEstimate<T>,
    pub constants: ClusterConstants<T>,
    pub triple_v: CharTriple<T>,
    pub triple_w: CharTriple<T>,
    pub stable_v: StableParams<T>,
    pub stable_w: StableParams<T>,
    pub functionals: Vec<FunctionalReport<T>>,
    pub ecf: EcfReport<T>,
    pub truncation: TruncationReport<T>,
    pub all_pass: bool,
}

/// Raw per-functional samples, for export next to the report.
#[derive(Clone, Debug, Serialize)]
pub struct FunctionalSamples<T> {
    pub name: &'static str,
    pub finite: Vec<T>,
    pub limit: Vec<T>,
}

/// Report plus the samples behind its KS rows.
#[derive(Clone, Debug)]
pub struct ExperimentOutput<T> {
    pub report: TestReport<T>,
    pub samples: Vec<FunctionalSamples<T>>,
}

fn finite_side<T: Real>(
    config: &ExperimentConfig<T>,
    norm: &NormSeq<T>,
) -> Result<Vec<Vec<T>>, VerifyError> {
    (0..config.reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = seeds::derive(config.seed, Purpose::Paths, r as u64);
            let xs = config.model.sample_path(config.n, &mut rng)?;
            let l = partial_sum_process(&xs, norm)?;
            let zeta = xs.iter().fold(T::zero(), |s, x| s + *x * *x).sqrt();
            let sum: T = xs.iter().fold(T::zero(), |s, x| s + *x);
            config
                .functionals
                .iter()
                .map(|f| {
                    Ok(match f {
                        Functional::ValueAtOne => l.eval(0, T::one()),
                        Functional::ValueAtHalf => l.eval(0, T::of(0.5)),
                        Functional::SupAbs => l.sup_abs(0),
                        Functional::SelfNormAtOne => {
                            if !(zeta > T::zero()) {
                                return Err(VerifyError::DegenerateSample);
                            }
                            (sum - T::of_usize(config.n) * norm.c_n) / zeta
                        }
                    })
                })
                .collect()
        })
        .collect()
}

struct LimitRep<T> {
    values: Vec<T>,
    covered: bool,
    compensation: Option<T>,
    sensitivity: Option<T>,
    w_tail: T,
    min_magnitude: T,
}

fn limit_side<T: Real>(
    config: &ExperimentConfig<T>,
    law: &ClusterLaw<T>,
    u_min: Option<T>,
) -> Result<Vec<LimitRep<T>>, VerifyError> {
    let p = config.model.law.p;
    (0..config.reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = seeds::derive(config.seed, Purpose::Series, r as u64);
            let series = PoissonSeries::sample(law, config.n_points, &mut rng)?;
            let (v, vmeta) = series.build_v(p, u_min)?;
            let (w, wmeta) = series.build_w()?;
            let values = config
                .functionals
                .iter()
                .map(|f| match f {
                    Functional::ValueAtOne => v.eval(0, T::one()),
                    Functional::ValueAtHalf => v.eval(0, T::of(0.5)),
                    Functional::SupAbs => v.sup_abs(0),
                    Functional::SelfNormAtOne => {
                        v.eval(0, T::one()) / wmeta.terminal.sqrt()
                    }
                })
                .collect();
            debug_assert!(w.is_nondecreasing());
            Ok(LimitRep {
                values,
                covered: vmeta.covered,
                compensation: (vmeta.u_min.is_none()).then_some(vmeta.compensation),
                sensitivity: vmeta.sensitivity,
                w_tail: wmeta.truncation_tail_mean,
                min_magnitude: vmeta.min_magnitude,
            })
        })
        .collect()
}

/// Runs the full convergence experiment for one model.
pub fn fclt_experiment<T: Real>(
    config: &ExperimentConfig<T>,
) -> Result<ExperimentOutput<T>, VerifyError> {
    config.validate()?;
    let model = &config.model;
    let alpha = model.law.alpha;
    let p = model.law.p;
    let norm = model.norm_seq(config.n, config.seed)?;

    let mut cluster_rng = seeds::derive(config.seed, Purpose::Cluster, 0);
    let law = ClusterLaw::estimate(model, config.theta_samples, &mut cluster_rng)?;
    let constants = if model.kind == ModelKind::Iid {
        ClusterConstants::iid(alpha, p)
    } else {
        let mut rng = seeds::derive(config.seed, Purpose::Cluster, 1);
        law.constants(config.constant_samples, &mut rng)?
    };
    let tv = triple_v(alpha, p, law.theta.value, &constants)?;
    let tw = triple_w(alpha, law.theta.value, constants.m2.value)?;
    let stable_v = tv.stable_params()?;
    let stable_w = tw.stable_params()?;

    let u_min = (alpha >= T::one()).then_some(config.u_min);
    let finite = finite_side(config, &norm)?;
    let limits = limit_side(config, &law, u_min)?;

    let mut functionals = Vec::with_capacity(config.functionals.len());
    let mut samples = Vec::with_capacity(config.functionals.len());
    let mut all_pass = true;
    for (fi, f) in config.functionals.iter().enumerate() {
        let fin: Vec<T> = finite.iter().map(|row| row[fi]).collect();
        let lim: Vec<T> = limits.iter().map(|rep| rep.values[fi]).collect();
        let ks = ks_two_sample(&fin, &lim)?;
        let crit_1pct = ks_critical(ks.eff_size, T::of(0.01));
        let crit_5pct = ks_critical(ks.eff_size, T::of(0.05));
        let pass_1pct = ks.statistic < crit_1pct;
        all_pass &= pass_1pct;
        functionals.push(FunctionalReport { name: f.name(), ks, crit_1pct, crit_5pct, pass_1pct });
        samples.push(FunctionalSamples { name: f.name(), finite: fin, limit: lim });
    }

    let mut stable_rng = seeds::derive(config.seed, Purpose::StableSampler, 0);
    let stable_samples: Vec<T> =
        (0..config.ecf_samples).map(|_| cms_sample(&stable_v, &mut stable_rng)).collect();
    let mut ecf_triple = tv;
    ecf_triple.drift += config.ecf_drift_injection;
    let ecf =
        ecf_compare(&stable_samples, &ecf_triple, config.ecf_z_max, config.ecf_z_step, T::of(1e-8))?;
    all_pass &= ecf.pass;

    let rt = T::of_usize(config.reps);
    let covered_fraction =
        T::of_usize(limits.iter().filter(|r| r.covered).count()) / rt;
    let mean = |xs: Vec<T>| -> Option<T> {
        (!xs.is_empty())
            .then(|| xs.iter().fold(T::zero(), |s, x| s + *x) / T::of_usize(xs.len()))
    };
    let truncation = TruncationReport {
        covered_fraction,
        mean_compensation: mean(limits.iter().filter_map(|r| r.compensation).collect()),
        mean_sensitivity: mean(limits.iter().filter_map(|r| r.sensitivity).collect()),
        mean_w_tail: limits.iter().fold(T::zero(), |s, r| s + r.w_tail) / rt,
        mean_min_magnitude: limits.iter().fold(T::zero(), |s, r| s + r.min_magnitude) / rt,
    };

    let report = TestReport {
        seed: config.seed,
        model: model.clone(),
        n: config.n,
        reps: config.reps,
        n_points: config.n_points,
        u_min,
        norm,
        theta: law.theta,
        constants,
        triple_v: tv,
        triple_w: tw,
        stable_v,
        stable_w,
        functionals,
        ecf,
        truncation,
        all_pass,
    };
    Ok(ExperimentOutput { report, samples })
}
