//! Stationary input models: two-sided Pareto innovations, IID and finite
//! moving-average series, and their normalizing sequences.
//!
//! The innovation magnitude is exactly Pareto: `Pr(|Z| > x) = (x/scale)^-alpha`
//! for `x >= scale`, with sign `+` with probability `p`, so tail quantities
//! used elsewhere (`a_n`, truncated moments) have closed forms for IID models.
//! Moving averages `X_t = sum_j c_j Z_{t-j}` are regularly varying with tail
//! `Pr(|X| > x) ~ sum_j |c_j|^alpha Pr(|Z| > x)`; their `a_n` uses that
//! first-order tail and their `b_n` is estimated by Monte Carlo.

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::scalar::Real;
use crate::seeds::{self, Purpose};

/// Sample count for Monte Carlo estimates of moving-average `b_n`.
const BN_MC_SAMPLES: usize = 4_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("tail index alpha must lie in (0, 2), got {0}")]
    InvalidAlpha(f64),
    #[error("sign probability p must lie in [0, 1], got {0}")]
    InvalidProbability(f64),
    #[error("scale must be positive, got {0}")]
    InvalidScale(f64),
    #[error("coefficient vector must be nonempty with at least one nonzero entry")]
    DegenerateCoeffs,
    #[error("IID models must have the single coefficient [1]")]
    IidCoeffs,
    #[error("sample length must be positive")]
    EmptySample,
}

/// Two-sided Pareto innovation law.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InnovationLaw<T> {
    pub alpha: T,
    pub p: T,
    pub scale: T,
}

impl<T: Real> InnovationLaw<T> {
    pub fn new(alpha: T, p: T, scale: T) -> Result<Self, ModelError> {
        if !(alpha > T::zero() && alpha < T::of(2.0)) {
            return Err(ModelError::InvalidAlpha(alpha.as_f64()));
        }
        if !(p >= T::zero() && p <= T::one()) {
            return Err(ModelError::InvalidProbability(p.as_f64()));
        }
        if !(scale > T::zero()) {
            return Err(ModelError::InvalidScale(scale.as_f64()));
        }
        Ok(Self { alpha, p, scale })
    }

    /// Probability of a negative sign.
    pub fn q(&self) -> T {
        T::one() - self.p
    }

    /// Inverse-transform magnitude for a uniform `u` in (0, 1]:
    /// `|Z| = scale * u^(-1/alpha)`.
    pub fn magnitude_from_uniform(&self, u: T) -> T {
        assert!(u > T::zero() && u <= T::one(), "uniform draw must be in (0,1]");
        self.scale * u.powf(-T::one() / self.alpha)
    }

    /// One innovation from two uniforms: magnitude from `u`, sign `+` iff
    /// `s < p`.
    pub fn from_uniforms(&self, u: T, s: T) -> T {
        let mag = self.magnitude_from_uniform(u);
        if s < self.p {
            mag
        } else {
            -mag
        }
    }

    /// Draws one innovation.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> T {
        // gen_range on floats is [0, 1); reflect to (0, 1] for the magnitude.
        let u = T::one() - rng.gen_range(T::zero()..T::one());
        let s = rng.gen_range(T::zero()..T::one());
        self.from_uniforms(u, s)
    }

    /// `Pr(|Z| > x)`, exact for all `x`.
    pub fn tail(&self, x: T) -> T {
        if x <= self.scale {
            T::one()
        } else {
            (x / self.scale).powf(-self.alpha)
        }
    }

    /// `E[|Z| 1{|Z| <= v}]` in closed form.
    pub fn truncated_abs_mean(&self, v: T) -> T {
        if v < self.scale {
            return T::zero();
        }
        let a = self.alpha;
        let s = self.scale;
        if (a - T::one()).abs() < T::of(1e-12) {
            s * (v / s).ln()
        } else {
            a * s.powf(a) * (v.powf(T::one() - a) - s.powf(T::one() - a)) / (T::one() - a)
        }
    }

    /// `E[Z 1{|Z| <= v}] = (p - q) E[|Z| 1{|Z| <= v}]`.
    pub fn truncated_mean(&self, v: T) -> T {
        (self.p - self.q()) * self.truncated_abs_mean(v)
    }

    /// `E[Z^2 1{|Z| <= v}]` in closed form (`alpha < 2` so no special case).
    pub fn truncated_square_mean(&self, v: T) -> T {
        if v < self.scale {
            return T::zero();
        }
        let a = self.alpha;
        let s = self.scale;
        a * s.powf(a) * (v.powf(T::of(2.0) - a) - s.powf(T::of(2.0) - a)) / (T::of(2.0) - a)
    }
}

/// Kind of stationary series built on the innovations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Iid,
    Ma,
}

/// A stationary series specification: IID innovations or a finite moving
/// average `X_t = sum_{j=0}^{q} c_j Z_{t-j}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelSpec<T> {
    pub law: InnovationLaw<T>,
    pub coeffs: Vec<T>,
    pub kind: ModelKind,
}

impl<T: Real> ModelSpec<T> {
    pub fn new(law: InnovationLaw<T>, coeffs: Vec<T>, kind: ModelKind) -> Result<Self, ModelError> {
        if coeffs.is_empty() || coeffs.iter().all(|c| *c == T::zero()) {
            return Err(ModelError::DegenerateCoeffs);
        }
        if kind == ModelKind::Iid && coeffs != vec![T::one()] {
            return Err(ModelError::IidCoeffs);
        }
        Ok(Self { law, coeffs, kind })
    }

    pub fn iid(law: InnovationLaw<T>) -> Self {
        Self { law, coeffs: vec![T::one()], kind: ModelKind::Iid }
    }

    pub fn ma(law: InnovationLaw<T>, coeffs: Vec<T>) -> Result<Self, ModelError> {
        Self::new(law, coeffs, ModelKind::Ma)
    }

    /// Moving-average order `q` (0 for IID).
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `sum_j |c_j|^alpha`, the first-order tail multiplier of the series
    /// marginal relative to the innovation marginal.
    pub fn tail_weight(&self) -> T {
        self.coeffs
            .iter()
            .fold(T::zero(), |s, c| s + c.abs().powf(self.law.alpha))
    }

    /// Samples `X_1..X_n`. Moving averages draw `n + q` innovations so the
    /// output is exactly stationary from the first entry.
    pub fn sample_path<R: Rng>(&self, n: usize, rng: &mut R) -> Result<Vec<T>, ModelError> {
        if n == 0 {
            return Err(ModelError::EmptySample);
        }
        let q = self.order();
        let innov: Vec<T> = (0..n + q).map(|_| self.law.sample(rng)).collect();
        let mut out = Vec::with_capacity(n);
        for t in 0..n {
            // X_{t+1} uses innovations z_{t+q}, ..., z_t (newest first).
            let mut x = T::zero();
            for (j, c) in self.coeffs.iter().enumerate() {
                x += *c * innov[t + q - j];
            }
            out.push(x);
        }
        Ok(out)
    }

    /// One draw from the marginal distribution of `X_1`.
    pub fn sample_marginal<R: Rng>(&self, rng: &mut R) -> T {
        self.coeffs
            .iter()
            .fold(T::zero(), |s, c| s + *c * self.law.sample(rng))
    }

    /// `E[(X_1/v_div) 1{|X_1| <= v}] / 1`, i.e. the truncated marginal mean
    /// `E[X_1 1{|X_1| <= v}]`: exact for IID, Monte Carlo for moving
    /// averages (`samples` draws).
    pub fn truncated_marginal_mean<R: Rng>(
        &self,
        v: T,
        samples: usize,
        rng: &mut R,
    ) -> (T, Option<T>) {
        match self.kind {
            ModelKind::Iid => (self.law.truncated_mean(v), None),
            ModelKind::Ma => {
                let mut sum = T::zero();
                let mut sum_sq = T::zero();
                for _ in 0..samples {
                    let x = self.sample_marginal(rng);
                    let y = if x.abs() <= v { x } else { T::zero() };
                    sum += y;
                    sum_sq += y * y;
                }
                let m = T::of_usize(samples);
                let mean = sum / m;
                let var = (sum_sq / m - mean * mean).max(T::zero());
                (mean, Some((var / m).sqrt()))
            }
        }
    }

    /// Normalizing sequence at length `n`.
    ///
    /// * `a_n` solves `n Pr(|X_1| > a_n) = 1`: exactly `scale * n^(1/alpha)`
    ///   for IID, and `scale * (n sum_j |c_j|^alpha)^(1/alpha)` from the
    ///   first-order tail for moving averages.
    /// * `b_n = E[(X_1/a_n) 1{|X_1| <= a_n}]`: closed form for IID, Monte
    ///   Carlo with a sub-seed derived from `seed` for moving averages (the
    ///   standard error is recorded on the result).
    /// * `c_n = a_n b_n`.
    pub fn norm_seq(&self, n: usize, seed: u64) -> Result<NormSeq<T>, ModelError> {
        if n == 0 {
            return Err(ModelError::EmptySample);
        }
        let inv_alpha = T::one() / self.law.alpha;
        match self.kind {
            ModelKind::Iid => {
                let a_n = self.law.scale * T::of_usize(n).powf(inv_alpha);
                let b_n = self.law.truncated_mean(a_n) / a_n;
                Ok(NormSeq {
                    n,
                    a_n,
                    b_n,
                    c_n: a_n * b_n,
                    b_stderr: None,
                    tail_method: TailMethod::Exact,
                })
            }
            ModelKind::Ma => {
                let a_n = self.law.scale * (T::of_usize(n) * self.tail_weight()).powf(inv_alpha);
                let mut rng = seeds::derive(seed, Purpose::NormSeq, n as u64);
                let (mean, stderr) = self.truncated_marginal_mean(a_n, BN_MC_SAMPLES, &mut rng);
                let b_n = mean / a_n;
                Ok(NormSeq {
                    n,
                    a_n,
                    b_n,
                    c_n: a_n * b_n,
                    b_stderr: stderr.map(|s| s / a_n),
                    tail_method: TailMethod::FirstOrderTail,
                })
            }
        }
    }
}

/// How `a_n` was obtained: exact tail inversion (IID) or the first-order tail
/// asymptotic of the series marginal (moving averages).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TailMethod {
    Exact,
    FirstOrderTail,
}

/// Normalizing constants for partial sums of length `n`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct NormSeq<T> {
    pub n: usize,
    pub a_n: T,
    pub b_n: T,
    /// `c_n = a_n * b_n`, the centering used by self-normalized sums.
    pub c_n: T,
    /// Standard error of the Monte Carlo `b_n` (None when exact).
    pub b_stderr: Option<T>,
    pub tail_method: TailMethod,
}
