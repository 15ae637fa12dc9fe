//! Tail processes, the extremal index, and spectral clusters.
//!
//! For a finite moving average with coefficients `c_0..c_q`, a large value of
//! `|X_0|` is asymptotically caused by a single large innovation at some lag
//! `J`. Conditionally on `|X_0| > x`, as `x` grows the rescaled window
//! converges to the tail process
//!
//! `Y_i = M eps c_{J+i} / |c_J|`,
//!
//! where `Pr(J = j) = |c_j|^alpha / sum_k |c_k|^alpha`, `M` is Pareto(alpha)
//! on `[1, inf)`, and `eps` is the innovation sign. The extremal index is
//! `theta = Pr(sup_{i>=1} |Y_i| <= 1)`, and the spectral cluster law is the
//! tail process conditioned on `sup_{i<=-1} |Y_i| <= 1` and normalized by its
//! own maximum absolute value.

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::models::{ModelKind, ModelSpec};
use crate::scalar::Real;

#[derive(Debug, Error, PartialEq)]
pub enum ClusterError {
    #[error("Monte Carlo sample count must be positive")]
    EmptyMonteCarlo,
    #[error("log moment requires a nonzero cluster sum")]
    DegenerateLogMoment,
}

/// A Monte Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct McEstimate<T> {
    pub value: T,
    pub stderr: T,
}

/// The tail-process view of a model: anchor weights over the coefficient
/// window `0..=q` plus the innovation law parameters that matter for tails.
#[derive(Clone, Debug, Serialize)]
pub struct TailProcessModel<T> {
    pub alpha: T,
    pub p: T,
    pub coeffs: Vec<T>,
    /// Anchor distribution `Pr(J = j) = |c_j|^alpha / sum_k |c_k|^alpha`.
    pub anchor_weights: Vec<T>,
    /// Window half-width: the moving-average order `q`.
    pub window: usize,
}

impl<T: Real> TailProcessModel<T> {
    pub fn from_spec(spec: &ModelSpec<T>) -> Self {
        let alpha = spec.law.alpha;
        let total = spec.tail_weight();
        let anchor_weights =
            spec.coeffs.iter().map(|c| c.abs().powf(alpha) / total).collect();
        Self {
            alpha,
            p: spec.law.p,
            coeffs: spec.coeffs.clone(),
            anchor_weights,
            window: spec.order(),
        }
    }

    fn draw_anchor<R: Rng>(&self, rng: &mut R) -> usize {
        let u = rng.gen_range(T::zero()..T::one());
        let mut acc = T::zero();
        for (j, w) in self.anchor_weights.iter().enumerate() {
            acc += *w;
            if u < acc {
                return j;
            }
        }
        self.anchor_weights.len() - 1
    }

    /// Draws one tail-process realization on the window `-q..=q`.
    pub fn sample_tail_process<R: Rng>(&self, rng: &mut R) -> TailSample<T> {
        let j = self.draw_anchor(rng);
        let u = T::one() - rng.gen_range(T::zero()..T::one());
        let magnitude = u.powf(-T::one() / self.alpha);
        let s = rng.gen_range(T::zero()..T::one());
        let eps = if s < self.p { T::one() } else { -T::one() };
        let m = self.window;
        let anchor_abs = self.coeffs[j].abs();
        let mut values = vec![T::zero(); 2 * m + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            // Y_i with i = k - j lies in [-q, q] because both k, j do.
            let i = k as isize - j as isize;
            values[(i + m as isize) as usize] = magnitude * eps * *c / anchor_abs;
        }
        TailSample { window: m, values, anchor: j }
    }

    /// Monte Carlo estimate of `theta = Pr(sup_{i>=1} |Y_i| <= 1)` with a
    /// binomial standard error. IID models give exactly 1.
    pub fn extremal_index<R: Rng>(
        &self,
        samples: usize,
        rng: &mut R,
    ) -> Result<McEstimate<T>, ClusterError> {
        if samples == 0 {
            return Err(ClusterError::EmptyMonteCarlo);
        }
        let mut hits = 0usize;
        for _ in 0..samples {
            let y = self.sample_tail_process(rng);
            if y.forward_sup() <= T::one() {
                hits += 1;
            }
        }
        let n = T::of_usize(samples);
        let value = T::of_usize(hits) / n;
        let stderr = (value * (T::one() - value) / n).sqrt();
        Ok(McEstimate { value, stderr })
    }
}

/// One tail-process draw, indexed `-window ..= window`.
#[derive(Clone, Debug)]
pub struct TailSample<T> {
    window: usize,
    values: Vec<T>,
    /// Index of the anchoring coefficient.
    pub anchor: usize,
}

impl<T: Real> TailSample<T> {
    pub fn window(&self) -> usize {
        self.window
    }

    /// `Y_i` for `i` in `-window ..= window`.
    pub fn at(&self, i: isize) -> T {
        let m = self.window as isize;
        assert!(i >= -m && i <= m, "index outside the tail window");
        self.values[(i + m) as usize]
    }

    /// `sup_{1 <= i <= window} |Y_i|` (0 when the window is empty).
    pub fn forward_sup(&self) -> T {
        (1..=self.window as isize).fold(T::zero(), |s, i| s.max(self.at(i).abs()))
    }

    /// `sup_{-window <= i <= -1} |Y_i|` (0 when the window is empty).
    pub fn backward_sup(&self) -> T {
        (1..=self.window as isize).fold(T::zero(), |s, i| s.max(self.at(-i).abs()))
    }

    /// `sup_i |Y_i|` over the whole window; at least 1 because `|Y_0| >= 1`.
    pub fn abs_sup(&self) -> T {
        self.values.iter().fold(T::zero(), |s, v| s.max(v.abs()))
    }
}

/// Spectral cluster sampler: tail process conditioned on
/// `sup_{i<=-1} |Y_i| <= 1`, normalized by its maximum absolute value.
#[derive(Clone, Debug, Serialize)]
pub struct ClusterLaw<T> {
    pub model: TailProcessModel<T>,
    /// Extremal index used to scale Poisson series magnitudes. Also the
    /// acceptance rate of the rejection sampler.
    pub theta: McEstimate<T>,
}

impl<T: Real> ClusterLaw<T> {
    /// Builds the law, estimating `theta` by Monte Carlo (`theta_samples`
    /// tail draws). IID models short-circuit to exactly 1.
    pub fn estimate<R: Rng>(
        spec: &ModelSpec<T>,
        theta_samples: usize,
        rng: &mut R,
    ) -> Result<Self, ClusterError> {
        let model = TailProcessModel::from_spec(spec);
        let theta = if spec.kind == ModelKind::Iid {
            McEstimate { value: T::one(), stderr: T::zero() }
        } else {
            model.extremal_index(theta_samples, rng)?
        };
        Ok(Self { model, theta })
    }

    /// Draws one normalized cluster, returning the nonzero support of the
    /// accepted tail process divided by its maximum absolute value. The
    /// maximum absolute entry of the result is exactly 1.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<T> {
        self.sample_counted(rng).0
    }

    /// As [`Self::sample`], also reporting how many tail-process proposals
    /// the rejection step consumed (its mean is `1/theta`).
    pub fn sample_counted<R: Rng>(&self, rng: &mut R) -> (Vec<T>, u32) {
        let mut attempts = 0u32;
        loop {
            attempts += 1;
            let y = self.model.sample_tail_process(rng);
            if y.backward_sup() <= T::one() {
                let sup = y.abs_sup();
                let j = y.anchor as isize;
                let q = self.model.window as isize;
                // Nonzero support of Y runs over i = -j ..= q - j.
                let eta = (-j..=q - j).map(|i| y.at(i) / sup).collect();
                return (eta, attempts);
            }
        }
    }

    /// Monte Carlo cluster constants at tail index `alpha`.
    ///
    /// * `c_plus  = E[(sum_j eta_j)^alpha  1{sum > 0}]`
    /// * `c_minus = E[(-sum_j eta_j)^alpha 1{sum < 0}]`
    /// * `m2      = E[(sum_j eta_j^2)^{alpha/2}]`
    /// * `log_moment = E[sum_j eta_j ln(|sum_i eta_i| / |eta_j|)]`, evaluated
    ///   as `E[(sum eta) ln|sum eta| - sum_j eta_j ln|eta_j|]` with the
    ///   convention `x ln|x| = 0` at `x = 0`; only used when `alpha = 1`.
    pub fn constants<R: Rng>(
        &self,
        samples: usize,
        rng: &mut R,
    ) -> Result<ClusterConstants<T>, ClusterError> {
        if samples == 0 {
            return Err(ClusterError::EmptyMonteCarlo);
        }
        let alpha = self.model.alpha;
        let mut acc = [Accumulator::new(); 4];
        let xlnx = |x: T| if x == T::zero() { T::zero() } else { x * x.abs().ln() };
        for _ in 0..samples {
            let eta = self.sample(rng);
            let sum: T = eta.iter().fold(T::zero(), |s, e| s + *e);
            let sum_sq: T = eta.iter().fold(T::zero(), |s, e| s + *e * *e);
            acc[0].push(if sum > T::zero() { sum.powf(alpha) } else { T::zero() });
            acc[1].push(if sum < T::zero() { (-sum).powf(alpha) } else { T::zero() });
            acc[2].push(sum_sq.powf(alpha / T::of(2.0)));
            acc[3].push(xlnx(sum) - eta.iter().fold(T::zero(), |s, e| s + xlnx(*e)));
        }
        let n = T::of_usize(samples);
        let [c_plus, c_minus, m2, log_moment] = acc.map(|a| a.estimate(n));
        Ok(ClusterConstants { alpha, c_plus, c_minus, m2, log_moment, samples })
    }
}

#[derive(Clone, Copy)]
struct Accumulator<T> {
    sum: T,
    sum_sq: T,
}

impl<T: Real> Accumulator<T> {
    fn new() -> Self {
        Self { sum: T::zero(), sum_sq: T::zero() }
    }
    fn push(&mut self, x: T) {
        self.sum += x;
        self.sum_sq += x * x;
    }
    fn estimate(self, n: T) -> McEstimate<T> {
        let mean = self.sum / n;
        let var = (self.sum_sq / n - mean * mean).max(T::zero());
        McEstimate { value: mean, stderr: (var / n).sqrt() }
    }
}

/// Cluster moment constants entering the limit characteristic triples.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ClusterConstants<T> {
    pub alpha: T,
    pub c_plus: McEstimate<T>,
    pub c_minus: McEstimate<T>,
    pub m2: McEstimate<T>,
    /// `E[sum_j eta_j ln(|sum_i eta_i| / |eta_j|)]`; enters the drift only
    /// at `alpha = 1`.
    pub log_moment: McEstimate<T>,
    pub samples: usize,
}

impl<T: Real> ClusterConstants<T> {
    /// Exact constants for an IID model with sign probability `p`: clusters
    /// are the single value `+-1`, so `c_plus = p`, `c_minus = q`, `m2 = 1`
    /// and the log moment vanishes.
    pub fn iid(alpha: T, p: T) -> Self {
        let exact = |v: T| McEstimate { value: v, stderr: T::zero() };
        Self {
            alpha,
            c_plus: exact(p),
            c_minus: exact(T::one() - p),
            m2: exact(T::one()),
            log_moment: exact(T::zero()),
            samples: 0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::InnovationLaw;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn ma_spec(alpha: f64, p: f64, coeffs: Vec<f64>) -> ModelSpec<f64> {
        ModelSpec::ma(InnovationLaw::new(alpha, p, 1.0).unwrap(), coeffs).unwrap()
    }

    /// Closed-form extremal index of a finite moving average:
    /// `max_j |c_j|^alpha / sum_j |c_j|^alpha`. Derived independently of the
    /// sampler by telescoping the anchor decomposition.
    fn theta_oracle(alpha: f64, coeffs: &[f64]) -> f64 {
        let s: f64 = coeffs.iter().map(|c| c.abs().powf(alpha)).sum();
        coeffs.iter().map(|c| c.abs().powf(alpha)).fold(0.0, f64::max) / s
    }

    #[test]
    fn tail_process_support_and_marginal() {
        let spec = ma_spec(1.0, 1.0, vec![1.0, 0.5]);
        let tpm = TailProcessModel::from_spec(&spec);
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        for _ in 0..200 {
            let y = tpm.sample_tail_process(&mut rng);
            assert!(y.at(0).abs() >= 1.0 - 1e-12, "conditioning event |Y_0| >= 1");
            // Support is two adjacent entries with ratio c_1/c_0 = 0.5.
            match y.anchor {
                0 => assert_relative_eq!(y.at(1), 0.5 * y.at(0), max_relative = 1e-12),
                1 => assert_relative_eq!(y.at(0), 0.5 * y.at(-1), max_relative = 1e-12),
                _ => panic!("anchor out of range"),
            }
        }
    }

    #[test]
    fn tail_marginal_is_pareto() {
        // Pr(|Y_0| > y) = y^{-alpha} on [1, inf).
        let spec = ma_spec(1.0, 1.0, vec![1.0, 0.5]);
        let tpm = TailProcessModel::from_spec(&spec);
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let n = 200_000;
        let hits = (0..n)
            .filter(|_| tpm.sample_tail_process(&mut rng).at(0).abs() > 3.0)
            .count();
        assert!((hits as f64 / n as f64 - 1.0 / 3.0).abs() < 4e-3);
    }

    #[test]
    fn extremal_index_against_closed_form() {
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        for (alpha, coeffs) in [
            (1.0, vec![1.0, 0.5]),
            (0.5, vec![1.0, 1.0]),
            (1.5, vec![0.4, 1.0, 0.7]),
            (0.8, vec![1.0, -0.6]),
        ] {
            let spec = ma_spec(alpha, 0.6, coeffs.clone());
            let tpm = TailProcessModel::from_spec(&spec);
            let est = tpm.extremal_index(100_000, &mut rng).unwrap();
            let oracle = theta_oracle(alpha, &coeffs);
            assert!(
                (est.value - oracle).abs() < 4.0 * est.stderr.max(1e-4),
                "alpha {alpha}: {} vs {oracle}",
                est.value
            );
        }
    }

    #[test]
    fn iid_extremal_index_is_one() {
        let spec = ModelSpec::iid(InnovationLaw::new(0.8, 0.5, 1.0).unwrap());
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let law = ClusterLaw::estimate(&spec, 10, &mut rng).unwrap();
        assert_eq!(law.theta.value, 1.0);
        assert_eq!(law.theta.stderr, 0.0);
    }

    #[test]
    fn cluster_normalization_and_acceptance_rate() {
        let spec = ma_spec(1.0, 1.0, vec![1.0, 0.5]);
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let law = ClusterLaw::estimate(&spec, 50_000, &mut rng).unwrap();
        let mut attempts_total = 0u64;
        let n = 50_000;
        for _ in 0..n {
            let (eta, attempts) = law.sample_counted(&mut rng);
            attempts_total += attempts as u64;
            let max_abs = eta.iter().fold(0.0f64, |s, e| s.max(e.abs()));
            assert_eq!(max_abs, 1.0, "cluster max must be exactly 1");
            // For coefficients (1, 0.5) and p = 1 the normalized cluster is
            // always the pair (1, 0.5).
            assert_eq!(eta.len(), 2);
            assert_relative_eq!(eta[0], 1.0);
            assert_relative_eq!(eta[1], 0.5);
        }
        // Acceptance rate = theta = 2/3: mean attempts = 3/2.
        let mean_attempts = attempts_total as f64 / n as f64;
        assert!((mean_attempts - 1.5).abs() < 0.02, "mean attempts {mean_attempts}");
    }

    #[test]
    fn constants_for_deterministic_ma_cluster() {
        // eta = (1, 0.5) always: c+ = 1.5^alpha, c- = 0, m2 = 1.25^{alpha/2},
        // log moment = 1.5 ln 1.5 - 0.5 ln 0.5.
        let alpha = 1.0;
        let spec = ma_spec(alpha, 1.0, vec![1.0, 0.5]);
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let law = ClusterLaw::estimate(&spec, 20_000, &mut rng).unwrap();
        let cc = law.constants(2_000, &mut rng).unwrap();
        assert_relative_eq!(cc.c_plus.value, 1.5, max_relative = 1e-12);
        assert_eq!(cc.c_minus.value, 0.0);
        assert_relative_eq!(cc.m2.value, 1.25f64.sqrt(), max_relative = 1e-12);
        let expected_log = 1.5 * 1.5f64.ln() - 0.5 * 0.5f64.ln();
        assert_relative_eq!(cc.log_moment.value, expected_log, max_relative = 1e-12);
    }

    #[test]
    fn constants_for_signed_iid_cluster() {
        // IID with p = 0.3: cluster is +-1, c+ = 0.3, c- = 0.7, m2 = 1.
        let spec = ModelSpec::iid(InnovationLaw::new(1.3f64, 0.3, 1.0).unwrap());
        let mut rng = ChaCha12Rng::seed_from_u64(6);
        let law = ClusterLaw::estimate(&spec, 10, &mut rng).unwrap();
        let cc = law.constants(200_000, &mut rng).unwrap();
        assert!((cc.c_plus.value - 0.3).abs() < 4.0 * cc.c_plus.stderr);
        assert!((cc.c_minus.value - 0.7).abs() < 4.0 * cc.c_minus.stderr);
        assert_relative_eq!(cc.m2.value, 1.0, max_relative = 1e-12);
        let exact = ClusterConstants::iid(1.3, 0.3);
        assert_relative_eq!(exact.c_plus.value, 0.3);
        assert_relative_eq!(exact.c_minus.value, 0.7);
    }

    #[test]
    fn mixed_sign_cluster_constants() {
        // Coefficients (1, -0.5), p = 1: cluster always (1, -0.5), sum 0.5.
        let alpha = 0.5;
        let spec = ma_spec(alpha, 1.0, vec![1.0, -0.5]);
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let law = ClusterLaw::estimate(&spec, 20_000, &mut rng).unwrap();
        let cc = law.constants(1_000, &mut rng).unwrap();
        assert_relative_eq!(cc.c_plus.value, 0.5f64.powf(alpha), max_relative = 1e-12);
        assert_eq!(cc.c_minus.value, 0.0);
        assert_relative_eq!(cc.m2.value, 1.25f64.powf(0.25), max_relative = 1e-12);
    }
}
