//! Poisson-cluster limit processes and their characteristic triples.
//!
//! The limit pair is built from a decorated Poisson point process: magnitudes
//! `P_i = (Gamma_i / theta)^{-1/alpha}` from the arrival times `Gamma_i` of a
//! unit-rate Poisson process, uniform times `T_i` on `[0, 1]`, and normalized
//! clusters `eta_i` drawn from the spectral cluster law. `W` sums the squared
//! cluster mass `P_i^2 sum_j eta_ij^2` as jumps; `V` sums the signed cluster
//! mass, compensated by a deterministic drift when `alpha >= 1`.
//!
//! One-dimensional marginals are alpha-stable. Their laws are carried around
//! as a characteristic triple (tail index, Levy tail weights, drift under the
//! `[-1, 1]` truncation convention), with conversions to the common S1
//! parametrization and a direct quadrature evaluation of the characteristic
//! function as an independent cross-check.

use num_complex::Complex;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::cluster::{ClusterConstants, ClusterLaw};
use crate::path::{CadlagPath, PathError};
use crate::quad;
use crate::scalar::Real;
use crate::special::gamma;

const EULER_GAMMA: f64 = 0.577215664901532860606512;

#[derive(Debug, Error, PartialEq)]
pub enum LimitError {
    #[error("atom times must lie in [0, 1] with finite sizes")]
    BadAtom,
    #[error("jump threshold must be nonnegative and finite")]
    BadThreshold,
    #[error("truncation level must lie in (0, 1]")]
    BadTruncation,
    #[error("tail index must lie in (0, 2)")]
    BadAlpha,
    #[error("sign probability must lie in [0, 1]")]
    BadProbability,
    #[error("extremal index must lie in (0, 1]")]
    BadTheta,
    #[error("Levy tail weights must be nonnegative with a positive sum")]
    BadWeights,
    #[error("series needs at least one point")]
    EmptySeries,
    #[error("series magnitudes must be positive, finite, and nonincreasing")]
    BadMagnitudes,
    #[error("clusters must be nonempty and normalized to max |eta| = 1")]
    BadCluster,
    #[error("alpha >= 1 requires a jump threshold")]
    ThresholdRequired,
    #[error("characteristic function error estimate {achieved:.3e} exceeds the tolerance")]
    Tolerance { achieved: f64 },
    #[error(transparent)]
    Path(#[from] PathError),
}

fn near_one<T: Real>(alpha: T) -> bool {
    (alpha - T::one()).abs() < T::of(1e-9)
}

/// A finite point measure on `[0, 1] x R`: pairs `(t_k, x_k)`.
#[derive(Clone, Debug, Serialize)]
pub struct PointMeasure<T> {
    atoms: Vec<(T, T)>,
}

impl<T: Real> PointMeasure<T> {
    pub fn new(mut atoms: Vec<(T, T)>) -> Result<Self, LimitError> {
        for (t, x) in &atoms {
            if !(*t >= T::zero() && *t <= T::one()) || !x.is_finite() {
                return Err(LimitError::BadAtom);
            }
        }
        atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite times"));
        Ok(Self { atoms })
    }

    pub fn atoms(&self) -> &[(T, T)] {
        &self.atoms
    }

    /// The two-dimensional step path `t -> (sum x_k, sum x_k^2)` over atoms
    /// with `t_k <= t` and `|x_k| > u`. Both components jump at the same
    /// times and the second component's jumps are nonnegative.
    pub fn summation_functional(&self, u: T) -> Result<CadlagPath<T>, LimitError> {
        if !(u >= T::zero()) || !u.is_finite() {
            return Err(LimitError::BadThreshold);
        }
        let jumps: Vec<(T, T, T)> = self
            .atoms
            .iter()
            .filter(|(_, x)| x.abs() > u)
            .map(|(t, x)| (*t, *x, *x * *x))
            .collect();
        two_component_jump_path(&jumps).map_err(LimitError::from)
    }
}

/// Builds a step path with the given (time, jump) pairs plus a linear drift.
/// Atoms at time 0 fold into the initial value; atoms at time 1 jump at the
/// terminal knot.
fn jump_drift_path<T: Real>(jumps: &[(T, T)], slope: T) -> Result<CadlagPath<T>, PathError> {
    let mut sorted = jumps.to_vec();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite times"));
    let mut knots = vec![T::zero()];
    let mut left = vec![T::zero()];
    let mut right = vec![T::zero()];
    let mut cum = T::zero();
    let mut i = 0;
    while i < sorted.len() && sorted[i].0 == T::zero() {
        cum += sorted[i].1;
        i += 1;
    }
    left[0] = cum;
    right[0] = cum;
    while i < sorted.len() && sorted[i].0 < T::one() {
        let t = sorted[i].0;
        let before = cum;
        while i < sorted.len() && sorted[i].0 == t {
            cum += sorted[i].1;
            i += 1;
        }
        knots.push(t);
        left.push(before + slope * t);
        right.push(cum + slope * t);
    }
    let before_one = cum;
    while i < sorted.len() {
        cum += sorted[i].1;
        i += 1;
    }
    knots.push(T::one());
    left.push(before_one + slope);
    right.push(cum + slope);
    CadlagPath::new(knots, vec![(left, right)])
}

/// Two-component analogue of [`jump_drift_path`] without drift; the triples
/// are `(time, jump_1, jump_2)`.
fn two_component_jump_path<T: Real>(jumps: &[(T, T, T)]) -> Result<CadlagPath<T>, PathError> {
    let mut sorted = jumps.to_vec();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite times"));
    let mut knots = vec![T::zero()];
    let mut comps = [(vec![T::zero()], vec![T::zero()]), (vec![T::zero()], vec![T::zero()])];
    let mut cum = [T::zero(); 2];
    let mut i = 0;
    while i < sorted.len() && sorted[i].0 == T::zero() {
        cum[0] += sorted[i].1;
        cum[1] += sorted[i].2;
        i += 1;
    }
    for (c, acc) in comps.iter_mut().zip(cum.iter()) {
        c.0[0] = *acc;
        c.1[0] = *acc;
    }
    while i < sorted.len() && sorted[i].0 < T::one() {
        let t = sorted[i].0;
        let before = cum;
        while i < sorted.len() && sorted[i].0 == t {
            cum[0] += sorted[i].1;
            cum[1] += sorted[i].2;
            i += 1;
        }
        knots.push(t);
        for (d, c) in comps.iter_mut().enumerate() {
            c.0.push(before[d]);
            c.1.push(cum[d]);
        }
    }
    let before_one = cum;
    while i < sorted.len() {
        cum[0] += sorted[i].1;
        cum[1] += sorted[i].2;
        i += 1;
    }
    knots.push(T::one());
    for (d, c) in comps.iter_mut().enumerate() {
        c.0.push(before_one[d]);
        c.1.push(cum[d]);
    }
    let [c0, c1] = comps;
    CadlagPath::new(knots, vec![c0, c1])
}

/// Centering term for the truncated limit sum: the mean of a jump of size in
/// `(u, 1]` under the signed tail measure, `(p - q) alpha (1 - u^{1-alpha})
/// / (1 - alpha)`, with the log limit at `alpha = 1`.
pub fn b_u<T: Real>(alpha: T, p: T, u: T) -> Result<T, LimitError> {
    if !(alpha > T::zero() && alpha < T::of(2.0)) {
        return Err(LimitError::BadAlpha);
    }
    if !(p >= T::zero() && p <= T::one()) {
        return Err(LimitError::BadProbability);
    }
    if !(u > T::zero() && u <= T::one()) {
        return Err(LimitError::BadTruncation);
    }
    let skew = p - (T::one() - p);
    if near_one(alpha) {
        Ok(skew * (T::one() / u).ln())
    } else {
        Ok(skew * alpha * (T::one() - u.powf(T::one() - alpha)) / (T::one() - alpha))
    }
}

/// One decorated Poisson point: arrival time, magnitude, normalized cluster.
#[derive(Clone, Debug, Serialize)]
pub struct SeriesPoint<T> {
    pub time: T,
    pub magnitude: T,
    pub cluster: Vec<T>,
}

impl<T: Real> SeriesPoint<T> {
    fn cluster_sum(&self) -> T {
        self.cluster.iter().fold(T::zero(), |s, e| s + *e)
    }

    fn cluster_sum_sq(&self) -> T {
        self.cluster.iter().fold(T::zero(), |s, e| s + *e * *e)
    }
}

/// Truncation metadata for the `W` path.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct WMeta<T> {
    pub terminal: T,
    /// Estimated mean of the squared mass dropped beyond the series cutoff;
    /// exactly 0 for hand-built (finite, exact) series.
    pub truncation_tail_mean: T,
}

/// Truncation metadata for the `V` path.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct VMeta<T> {
    /// Jump threshold actually applied; `None` when `alpha < 1` (all jumps
    /// are kept).
    pub u_min: Option<T>,
    /// Total deterministic slope included in the path.
    pub drift: T,
    /// Mean-compensation slope for the dropped series tail (`alpha < 1` with
    /// a sampled series only).
    pub compensation: T,
    /// Smallest magnitude present in the series.
    pub min_magnitude: T,
    /// True when no jump above the threshold can be missing: the series is
    /// exact, or its smallest magnitude is already below the threshold.
    pub covered: bool,
    /// `|V(1)|` change when the threshold is halved (`alpha >= 1` only).
    pub sensitivity: Option<T>,
}

/// A truncated Poisson cluster series.
#[derive(Clone, Debug, Serialize)]
pub struct PoissonSeries<T> {
    pub alpha: T,
    pub theta: T,
    /// Points in decreasing magnitude order.
    pub points: Vec<SeriesPoint<T>>,
    /// Last unit-rate arrival consumed; 0 marks a hand-built exact series.
    pub gamma_cutoff: T,
}

impl<T: Real> PoissonSeries<T> {
    /// Samples the `n_points` largest points of the series.
    pub fn sample<R: Rng>(
        law: &ClusterLaw<T>,
        n_points: usize,
        rng: &mut R,
    ) -> Result<Self, LimitError> {
        if n_points == 0 {
            return Err(LimitError::EmptySeries);
        }
        let alpha = law.model.alpha;
        let theta = law.theta.value;
        if !(theta > T::zero() && theta <= T::one()) {
            return Err(LimitError::BadTheta);
        }
        let mut gamma_arrival = T::zero();
        let mut points = Vec::with_capacity(n_points);
        for _ in 0..n_points {
            let u = T::one() - rng.gen_range(T::zero()..T::one());
            gamma_arrival += -u.ln();
            let magnitude = (gamma_arrival / theta).powf(-T::one() / alpha);
            let time = rng.gen_range(T::zero()..T::one());
            let cluster = law.sample(rng);
            points.push(SeriesPoint { time, magnitude, cluster });
        }
        Ok(Self { alpha, theta, points, gamma_cutoff: gamma_arrival })
    }

    /// Wraps explicitly given points as an exact (untruncated) series, for
    /// hand-built fixtures. Magnitudes must come in nonincreasing order and
    /// every cluster must be normalized so `max_j |eta_j| = 1`.
    pub fn from_points(
        alpha: T,
        theta: T,
        points: Vec<SeriesPoint<T>>,
    ) -> Result<Self, LimitError> {
        if !(alpha > T::zero() && alpha < T::of(2.0)) {
            return Err(LimitError::BadAlpha);
        }
        if !(theta > T::zero() && theta <= T::one()) {
            return Err(LimitError::BadTheta);
        }
        if points.is_empty() {
            return Err(LimitError::EmptySeries);
        }
        for pt in &points {
            if !(pt.time >= T::zero() && pt.time <= T::one()) {
                return Err(LimitError::BadAtom);
            }
            if !pt.magnitude.is_finite() || !(pt.magnitude > T::zero()) {
                return Err(LimitError::BadMagnitudes);
            }
            if pt.cluster.is_empty() || pt.cluster.iter().any(|e| !e.is_finite()) {
                return Err(LimitError::BadCluster);
            }
            let sup = pt.cluster.iter().fold(T::zero(), |s, e| s.max(e.abs()));
            if sup != T::one() {
                return Err(LimitError::BadCluster);
            }
        }
        if points.windows(2).any(|w| w[0].magnitude < w[1].magnitude) {
            return Err(LimitError::BadMagnitudes);
        }
        Ok(Self { alpha, theta, points, gamma_cutoff: T::zero() })
    }

    /// Flattens the decorated points into individual atoms `(T_i, P_i eta_ij)`.
    pub fn to_point_measure(&self) -> Result<PointMeasure<T>, LimitError> {
        let atoms = self
            .points
            .iter()
            .flat_map(|pt| {
                pt.cluster.iter().map(move |e| (pt.time, pt.magnitude * *e))
            })
            .collect();
        PointMeasure::new(atoms)
    }

    fn min_magnitude(&self) -> T {
        self.points.last().expect("nonempty").magnitude
    }

    /// The nondecreasing quadratic-variation path `W`: jumps of
    /// `P_i^2 sum_j eta_ij^2` at the times `T_i`.
    pub fn build_w(&self) -> Result<(CadlagPath<T>, WMeta<T>), LimitError> {
        let jumps: Vec<(T, T)> = self
            .points
            .iter()
            .map(|pt| (pt.time, pt.magnitude * pt.magnitude * pt.cluster_sum_sq()))
            .collect();
        let path = jump_drift_path(&jumps, T::zero())?;
        let terminal = path.right_at_knot(0, path.knots().len() - 1);
        let truncation_tail_mean = if self.gamma_cutoff > T::zero() {
            // Mean dropped mass via the Poisson transform of the tail
            // arrivals: E sum_{i > n} P_i^2 = theta^{2/alpha}
            // Gamma_n^{1 - 2/alpha} / (2/alpha - 1), times the average
            // squared cluster mass observed in this series.
            let n = T::of_usize(self.points.len());
            let mean_sq =
                self.points.iter().fold(T::zero(), |s, pt| s + pt.cluster_sum_sq()) / n;
            let inv = T::one() / self.alpha;
            let two_inv = T::of(2.0) * inv;
            mean_sq * self.theta.powf(two_inv)
                * self.gamma_cutoff.powf(T::one() - two_inv)
                / (two_inv - T::one())
        } else {
            T::zero()
        };
        Ok((path, WMeta { terminal, truncation_tail_mean }))
    }

    fn filtered_total(&self, u: T) -> T {
        self.points.iter().fold(T::zero(), |s, pt| {
            s + pt
                .cluster
                .iter()
                .map(|e| pt.magnitude * *e)
                .filter(|x| x.abs() > u)
                .fold(T::zero(), |a, x| a + x)
        })
    }

    /// The partial-sum limit path `V`.
    ///
    /// For `alpha < 1` every jump `P_i sum_j eta_ij` is kept (`u_min` is
    /// ignored) and the path carries the deterministic drift `-t (p - q)
    /// alpha / (1 - alpha)` matching the finite-sample centering; a sampled
    /// series additionally gets a linear mean compensation for the dropped
    /// tail beyond its cutoff. For `alpha >= 1` only atoms with
    /// `|P_i eta_ij| > u_min` enter, centered by `-t b_u(alpha, p, u_min)`.
    pub fn build_v(
        &self,
        p: T,
        u_min: Option<T>,
    ) -> Result<(CadlagPath<T>, VMeta<T>), LimitError> {
        if !(p >= T::zero() && p <= T::one()) {
            return Err(LimitError::BadProbability);
        }
        if self.alpha < T::one() && !near_one(self.alpha) {
            let jumps: Vec<(T, T)> = self
                .points
                .iter()
                .map(|pt| (pt.time, pt.magnitude * pt.cluster_sum()))
                .collect();
            let skew = p - (T::one() - p);
            let centering = -skew * self.alpha / (T::one() - self.alpha);
            let compensation = if self.gamma_cutoff > T::zero() {
                let n = T::of_usize(self.points.len());
                let mean_sum =
                    self.points.iter().fold(T::zero(), |s, pt| s + pt.cluster_sum()) / n;
                let inv = T::one() / self.alpha;
                mean_sum * self.theta.powf(inv)
                    * self.gamma_cutoff.powf(T::one() - inv)
                    / (inv - T::one())
            } else {
                T::zero()
            };
            let path = jump_drift_path(&jumps, centering + compensation)?;
            let meta = VMeta {
                u_min: None,
                drift: centering + compensation,
                compensation,
                min_magnitude: self.min_magnitude(),
                covered: true,
                sensitivity: None,
            };
            Ok((path, meta))
        } else {
            let u = u_min.ok_or(LimitError::ThresholdRequired)?;
            if !(u > T::zero() && u <= T::one()) {
                return Err(LimitError::BadTruncation);
            }
            let jumps: Vec<(T, T)> = self
                .points
                .iter()
                .filter_map(|pt| {
                    let mut any = false;
                    let mut sum = T::zero();
                    for e in &pt.cluster {
                        let x = pt.magnitude * *e;
                        if x.abs() > u {
                            any = true;
                            sum += x;
                        }
                    }
                    any.then_some((pt.time, sum))
                })
                .collect();
            let slope = -b_u(self.alpha, p, u)?;
            let path = jump_drift_path(&jumps, slope)?;
            let half = u / T::of(2.0);
            let sensitivity = ((self.filtered_total(u) - b_u(self.alpha, p, u)?)
                - (self.filtered_total(half) - b_u(self.alpha, p, half)?))
            .abs();
            let meta = VMeta {
                u_min: Some(u),
                drift: slope,
                compensation: T::zero(),
                min_magnitude: self.min_magnitude(),
                covered: self.gamma_cutoff == T::zero() || self.min_magnitude() <= u,
                sensitivity: Some(sensitivity),
            };
            Ok((path, meta))
        }
    }
}

/// Characteristic triple of an alpha-stable law without Gaussian part: Levy
/// measure `nu(x, inf) = w_plus x^{-alpha}`, `nu(-inf, -x) = w_minus
/// x^{-alpha}`, and a drift under the `1_{[-1,1]}` compensation convention.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CharTriple<T> {
    pub alpha: T,
    pub pos_weight: T,
    pub neg_weight: T,
    pub drift: T,
}

/// Triple of the partial-sum limit marginal `V(1)`.
pub fn triple_v<T: Real>(
    alpha: T,
    p: T,
    theta: T,
    constants: &ClusterConstants<T>,
) -> Result<CharTriple<T>, LimitError> {
    if !(alpha > T::zero() && alpha < T::of(2.0)) {
        return Err(LimitError::BadAlpha);
    }
    if !(p >= T::zero() && p <= T::one()) {
        return Err(LimitError::BadProbability);
    }
    if !(theta > T::zero() && theta <= T::one()) {
        return Err(LimitError::BadTheta);
    }
    let skew = p - (T::one() - p);
    let (cp, cm) = (constants.c_plus.value, constants.c_minus.value);
    let drift = if near_one(alpha) {
        -theta * constants.log_moment.value
    } else {
        alpha / (alpha - T::one()) * (skew - theta * (cp - cm))
    };
    Ok(CharTriple { alpha, pos_weight: theta * cp, neg_weight: theta * cm, drift })
}

/// Triple of the quadratic-variation limit marginal `W(1)`; the index is
/// `alpha / 2` and the law is totally right-skewed and strictly stable.
pub fn triple_w<T: Real>(alpha: T, theta: T, m2: T) -> Result<CharTriple<T>, LimitError> {
    if !(alpha > T::zero() && alpha < T::of(2.0)) {
        return Err(LimitError::BadAlpha);
    }
    if !(theta > T::zero() && theta <= T::one()) {
        return Err(LimitError::BadTheta);
    }
    if !(m2 > T::zero()) {
        return Err(LimitError::BadWeights);
    }
    Ok(CharTriple {
        alpha: alpha / T::of(2.0),
        pos_weight: theta * m2,
        neg_weight: T::zero(),
        drift: theta * alpha * m2 / (T::of(2.0) - alpha),
    })
}

/// A characteristic function value with its quadrature error estimate.
#[derive(Clone, Copy, Debug)]
pub struct CfValue<T> {
    pub value: Complex<T>,
    pub error: T,
}

/// Head of the Levy integral on `(0, delta]` by termwise integration of the
/// exponential series: `alpha sum_{k>=2} (iz)^k delta^{k-alpha} / (k! (k -
/// alpha))`. Requires `z * delta <= 1/2` so the terms decay fast.
fn levy_head<T: Real>(alpha: T, z: T, delta: T, stop: T) -> (Complex<T>, T) {
    let izd = Complex::new(T::zero(), z * delta);
    let scale = delta.powf(-alpha);
    let mut p = izd;
    let mut sum = Complex::new(T::zero(), T::zero());
    let mut k = 1usize;
    let mut last = T::infinity();
    while k < 80 {
        k += 1;
        p = p * izd / T::of_usize(k);
        let term = p * (scale / (T::of_usize(k) - alpha));
        sum += term;
        last = term.norm();
        if last < stop {
            break;
        }
    }
    // Term ratio is below 1/4, so the dropped tail is below last / 3.
    (sum * alpha, last)
}

/// Oscillatory tail `int_a^inf e^{izx} alpha x^{-alpha-1} dx` along the
/// rotated contour `x = a + i s / z`, where the integrand decays like
/// `e^{-s}` with no oscillation.
fn levy_tail<T: Real>(alpha: T, z: T, a: T, tol: T) -> quad::QuadResult<T> {
    let cutoff = T::of(45.0);
    let f = move |s: T| {
        let w = Complex::new(a, s / z);
        w.powf(-alpha - T::one()) * ((-s).exp() * alpha)
    };
    let mut inner = quad::integrate(f, T::zero(), cutoff, tol);
    let phase = Complex::new((z * a).cos(), (z * a).sin());
    let rot = Complex::new(T::zero(), T::one() / z);
    inner.value = phase * rot * inner.value;
    inner.error = inner.error / z + T::of(1e-18);
    inner
}

impl<T: Real> CharTriple<T> {
    fn validate(&self) -> Result<(), LimitError> {
        if !(self.alpha > T::zero() && self.alpha < T::of(2.0)) {
            return Err(LimitError::BadAlpha);
        }
        if self.pos_weight < T::zero()
            || self.neg_weight < T::zero()
            || !self.pos_weight.is_finite()
            || !self.neg_weight.is_finite()
        {
            return Err(LimitError::BadWeights);
        }
        Ok(())
    }

    /// `int_0^inf (e^{izx} - 1 - izx 1{x<=1}) alpha x^{-alpha-1} dx` for
    /// `z > 0`, split into a series head, adaptive quadrature through the
    /// oscillation scale `1/z`, and a contour-rotated tail.
    fn levy_integral_pos(&self, z: T, tol: T) -> (Complex<T>, T) {
        let alpha = self.alpha;
        let one = T::one();
        let inv = one / z;
        let a = one.max(inv);
        let delta = one.min(inv) * T::of(0.5);
        let budget = tol / T::of(8.0);
        let (head, head_err) = levy_head(alpha, z, delta, budget);
        let compensated = move |x: T| {
            let (zx_cos, zx_sin) = ((z * x).cos(), (z * x).sin());
            Complex::new(zx_cos - one, zx_sin - z * x) * (alpha * x.powf(-alpha - one))
        };
        let plain = move |x: T| {
            let (zx_cos, zx_sin) = ((z * x).cos(), (z * x).sin());
            Complex::new(zx_cos - one, zx_sin) * (alpha * x.powf(-alpha - one))
        };
        let mut total = head;
        let mut err = head_err;
        let mut add = |r: quad::QuadResult<T>| {
            total += r.value;
            err += r.error;
        };
        if z >= one {
            // delta < 1/z <= 1: compensated all the way to 1.
            add(quad::integrate(compensated, delta, inv, budget));
            if inv < one {
                add(quad::integrate(compensated, inv, one, budget));
            }
        } else {
            add(quad::integrate(compensated, delta, one, budget));
            add(quad::integrate(plain, one, inv, budget));
        }
        let tail = levy_tail(alpha, z, a, budget);
        total += tail.value - Complex::new(a.powf(-alpha), T::zero());
        err += tail.error;
        (total, err)
    }

    /// Characteristic function `E e^{izX}` of the infinitely divisible law
    /// with this triple, by direct quadrature of the Levy exponent. The
    /// error estimate bounds the exponent error; values for `z < 0` use the
    /// Hermitian symmetry of the transform.
    pub fn char_function(&self, z: T, tol: T) -> Result<CfValue<T>, LimitError> {
        self.validate()?;
        if !(tol > T::zero()) {
            return Err(LimitError::BadThreshold);
        }
        if z == T::zero() {
            return Ok(CfValue { value: Complex::new(T::one(), T::zero()), error: T::zero() });
        }
        let zp = z.abs();
        let (k, err) = self.levy_integral_pos(zp, tol);
        let exponent = Complex::new(T::zero(), self.drift * zp)
            + k * self.pos_weight
            + k.conj() * self.neg_weight;
        let weight_err = err * (self.pos_weight + self.neg_weight).max(T::one());
        let mut value = exponent.exp();
        if z < T::zero() {
            value = value.conj();
        }
        if weight_err > tol {
            return Err(LimitError::Tolerance { achieved: weight_err.as_f64() });
        }
        Ok(CfValue { value, error: weight_err })
    }

    /// Converts the triple to the S1 stable parametrization
    /// `(alpha, beta, sigma, mu)`: for `alpha != 1` the characteristic
    /// function is `exp(i mu z - sigma^alpha |z|^alpha (1 - i beta
    /// tan(pi alpha / 2) sgn z))`, and at `alpha = 1` it is `exp(i mu z -
    /// sigma |z| (1 + i beta (2/pi) sgn z ln |z|))`.
    pub fn stable_params(&self) -> Result<StableParams<T>, LimitError> {
        self.validate()?;
        let total = self.pos_weight + self.neg_weight;
        if !(total > T::zero()) {
            return Err(LimitError::BadWeights);
        }
        let a = self.alpha;
        let diff = self.pos_weight - self.neg_weight;
        let beta = diff / total;
        if near_one(a) {
            Ok(StableParams {
                alpha: T::one(),
                beta,
                sigma: T::FRAC_PI_2() * total,
                mu: self.drift + (T::one() - T::of(EULER_GAMMA)) * diff,
            })
        } else {
            // Gamma(1 - alpha) cos(pi alpha / 2) is positive on both sides
            // of 1, so this is a valid scale.
            let sigma_alpha = gamma(T::one() - a) * (T::FRAC_PI_2() * a).cos() * total;
            Ok(StableParams {
                alpha: a,
                beta,
                sigma: sigma_alpha.powf(T::one() / a),
                mu: self.drift + diff * a / (a - T::one()),
            })
        }
    }
}

/// S1 parameters of a stable law.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct StableParams<T> {
    pub alpha: T,
    pub beta: T,
    pub sigma: T,
    pub mu: T,
}

/// Draws one stable variate by the Chambers-Mallows-Stuck construction. The
/// `alpha = 1` case (any skew) uses the log-corrected branch, including the
/// `(2/pi) beta sigma ln sigma` scaling shift.
pub fn cms_sample<T: Real, R: Rng>(params: &StableParams<T>, rng: &mut R) -> T {
    let a = params.alpha;
    let b = params.beta;
    let u = (rng.gen_range(T::zero()..T::one()) - T::of(0.5)) * T::PI();
    let e = -(T::one() - rng.gen_range(T::zero()..T::one())).ln();
    if near_one(a) {
        let h = T::FRAC_PI_2();
        let t = h + b * u;
        let x = (t * u.tan() - b * ((h * e * u.cos()) / t).ln()) / h;
        params.sigma * x
            + b * params.sigma * params.sigma.ln() / h
            + params.mu
    } else {
        let half_pi_a = T::FRAC_PI_2() * a;
        let bt = (b * half_pi_a.tan()).atan() / a;
        let s = (T::one() + (b * half_pi_a.tan()).powi(2))
            .powf(T::one() / (T::of(2.0) * a));
        let x = s * (a * (u + bt)).sin() / u.cos().powf(T::one() / a)
            * ((u - a * (u + bt)).cos() / e).powf((T::one() - a) / a);
        params.sigma * x + params.mu
    }
}
