//! Cadlag paths on `[0, 1]` and their completed graphs.
//!
//! A path stores a strictly increasing knot grid `0 = t_0 < ... < t_k = 1`
//! and, per component, a left limit and a right value at every knot. Between
//! knots the path interpolates linearly from the right value at `t_i` to the
//! left limit at `t_{i+1}`; step paths are the special case where those agree,
//! so one representation covers pure jump paths, continuous piecewise-linear
//! paths, and jump-plus-drift paths.

use serde::Serialize;
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, PartialEq)]
pub enum PathError {
    #[error("knots must start at 0, end at 1, and increase strictly")]
    BadKnots,
    #[error("component value arrays must match the knot count")]
    LengthMismatch,
    #[error("path values must be finite")]
    NonFinite,
    #[error("paths must have at least the two boundary knots")]
    TooFewKnots,
    #[error("operation requires a one-dimensional path")]
    NotOneDimensional,
    #[error("component index out of range")]
    BadComponent,
    #[error("paths must have equal dimensions")]
    DimensionMismatch,
    #[error("divisor path must be continuous")]
    NotContinuous,
    #[error("path must be nondecreasing")]
    NotMonotone,
    #[error("divisor path must be strictly positive at time 0")]
    NotPositiveAtZero,
    #[error("terminal value must be strictly positive")]
    NonPositiveTerminal,
}

/// Structural classification of a path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathKind {
    /// Constant between knots (jumps allowed at knots).
    Step,
    /// At least one sloped segment (jumps still allowed at knots).
    PiecewiseLinear,
}

#[derive(Clone, Debug, PartialEq)]
struct Component<T> {
    left: Vec<T>,
    right: Vec<T>,
}

/// A cadlag path on `[0, 1]` with one or more components.
#[derive(Clone, Debug, PartialEq)]
pub struct CadlagPath<T> {
    knots: Vec<T>,
    comps: Vec<Component<T>>,
    kind: PathKind,
}

impl<T: Real> CadlagPath<T> {
    /// General constructor from knots and per-component (left, right) values.
    /// `left[0]` must equal `right[0]`: there is no jump at time 0.
    pub fn new(knots: Vec<T>, comps: Vec<(Vec<T>, Vec<T>)>) -> Result<Self, PathError> {
        if knots.len() < 2 {
            return Err(PathError::TooFewKnots);
        }
        if knots[0] != T::zero() || *knots.last().expect("nonempty") != T::one() {
            return Err(PathError::BadKnots);
        }
        if knots.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(PathError::BadKnots);
        }
        if comps.is_empty() {
            return Err(PathError::LengthMismatch);
        }
        let mut built = Vec::with_capacity(comps.len());
        for (mut left, right) in comps {
            if left.len() != knots.len() || right.len() != knots.len() {
                return Err(PathError::LengthMismatch);
            }
            if left.iter().chain(right.iter()).any(|v| !v.is_finite()) {
                return Err(PathError::NonFinite);
            }
            left[0] = right[0];
            built.push(Component { left, right });
        }
        let kind = Self::classify(&knots, &built);
        Ok(Self { knots, comps: built, kind })
    }

    fn classify(knots: &[T], comps: &[Component<T>]) -> PathKind {
        for c in comps {
            for i in 0..knots.len() - 1 {
                if c.left[i + 1] != c.right[i] {
                    return PathKind::PiecewiseLinear;
                }
            }
        }
        PathKind::Step
    }

    /// Step path: `values[d][i]` is the value on `[t_i, t_{i+1})` (and at 1
    /// for the last knot).
    pub fn step(knots: Vec<T>, values: Vec<Vec<T>>) -> Result<Self, PathError> {
        let comps = values
            .into_iter()
            .map(|right| {
                let mut left = Vec::with_capacity(right.len());
                left.push(*right.first().unwrap_or(&T::zero()));
                left.extend(right.iter().take(right.len().saturating_sub(1)).cloned());
                (left, right)
            })
            .collect();
        Self::new(knots, comps)
    }

    /// Continuous piecewise-linear path through `(knots[i], values[d][i])`.
    pub fn piecewise_linear(knots: Vec<T>, values: Vec<Vec<T>>) -> Result<Self, PathError> {
        let comps = values.into_iter().map(|v| (v.clone(), v)).collect();
        Self::new(knots, comps)
    }

    /// Constant one-dimensional path.
    pub fn constant(value: T) -> Self {
        Self::step(vec![T::zero(), T::one()], vec![vec![value, value]])
            .expect("constant path is valid")
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn kind(&self) -> PathKind {
        self.kind
    }

    pub fn knots(&self) -> &[T] {
        &self.knots
    }

    /// Right value of component `d` at knot index `i`.
    pub fn right_at_knot(&self, d: usize, i: usize) -> T {
        self.comps[d].right[i]
    }

    /// Left limit of component `d` at knot index `i`.
    pub fn left_at_knot(&self, d: usize, i: usize) -> T {
        self.comps[d].left[i]
    }

    fn segment_of(&self, t: T) -> usize {
        // Largest i with knots[i] <= t; t == 1 maps to the last knot.
        debug_assert!(t >= T::zero() && t <= T::one());
        match self.knots.binary_search_by(|k| k.partial_cmp(&t).expect("finite")) {
            Ok(i) => i,
            Err(i) => i - 1,
        }
    }

    /// Value of component `d` at time `t` in `[0, 1]`.
    pub fn eval(&self, d: usize, t: T) -> T {
        let i = self.segment_of(t);
        if i + 1 == self.knots.len() || t == self.knots[i] {
            return self.comps[d].right[i];
        }
        let (t0, t1) = (self.knots[i], self.knots[i + 1]);
        let (v0, v1) = (self.comps[d].right[i], self.comps[d].left[i + 1]);
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }

    /// Left limit of component `d` at time `t` in `(0, 1]`.
    pub fn left_limit(&self, d: usize, t: T) -> T {
        assert!(t > T::zero() && t <= T::one(), "left limits exist on (0, 1]");
        let i = self.segment_of(t);
        if t == self.knots[i] {
            return self.comps[d].left[i];
        }
        self.eval(d, t)
    }

    /// Extracts component `d` as a one-dimensional path.
    pub fn component(&self, d: usize) -> Result<Self, PathError> {
        let comp = self.comps.get(d).ok_or(PathError::BadComponent)?;
        Ok(Self { knots: self.knots.clone(), comps: vec![comp.clone()], kind: self.kind })
    }

    /// True when every component has no jump at any interior knot.
    pub fn is_continuous(&self) -> bool {
        self.comps
            .iter()
            .all(|c| c.left.iter().zip(c.right.iter()).all(|(l, r)| l == r))
    }

    /// True when every component is nondecreasing (all jumps and all segment
    /// slopes nonnegative).
    pub fn is_nondecreasing(&self) -> bool {
        self.comps.iter().all(|c| {
            let jumps_ok = c.left.iter().zip(c.right.iter()).all(|(l, r)| l <= r);
            let segs_ok = (0..self.knots.len() - 1).all(|i| c.right[i] <= c.left[i + 1]);
            jumps_ok && segs_ok
        })
    }

    /// Supremum of `|component d|` over `[0, 1]` (attained at a knot value or
    /// a knot left limit because segments are linear).
    pub fn sup_abs(&self, d: usize) -> T {
        let c = &self.comps[d];
        c.left
            .iter()
            .chain(c.right.iter())
            .fold(T::zero(), |s, v| s.max(v.abs()))
    }

    /// Merged, deduplicated knot grid of two paths.
    fn union_knots(&self, other: &Self) -> Vec<T> {
        let mut merged = Vec::with_capacity(self.knots.len() + other.knots.len());
        let (a, b) = (&self.knots, &other.knots);
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let next = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) => {
                    if x < y {
                        i += 1;
                        *x
                    } else if y < x {
                        j += 1;
                        *y
                    } else {
                        i += 1;
                        j += 1;
                        *x
                    }
                }
                (Some(x), None) => {
                    i += 1;
                    *x
                }
                (None, Some(y)) => {
                    j += 1;
                    *y
                }
                (None, None) => break,
            };
            merged.push(next);
        }
        merged
    }

    /// Uniform (supremum) distance `sup_t max_d |x_d(t) - y_d(t)|`. Exact:
    /// the difference is piecewise linear on the union grid, so the supremum
    /// is attained at a union knot (value or left limit).
    pub fn uniform_dist(&self, other: &Self) -> Result<T, PathError> {
        if self.dim() != other.dim() {
            return Err(PathError::DimensionMismatch);
        }
        let grid = self.union_knots(other);
        let mut best = T::zero();
        for (gi, t) in grid.iter().enumerate() {
            for d in 0..self.dim() {
                let dr = (self.eval(d, *t) - other.eval(d, *t)).abs();
                best = best.max(dr);
                if gi > 0 {
                    let dl = (self.left_limit(d, *t) - other.left_limit(d, *t)).abs();
                    best = best.max(dl);
                }
            }
        }
        Ok(best)
    }

    /// Completed graph of a one-dimensional path: the polyline through the
    /// segment endpoints with vertical edges filling each jump.
    pub fn completed_graph(&self) -> Result<GraphPolyline<T>, PathError> {
        if self.dim() != 1 {
            return Err(PathError::NotOneDimensional);
        }
        let c = &self.comps[0];
        let mut vertices = Vec::with_capacity(2 * self.knots.len());
        vertices.push((self.knots[0], c.right[0]));
        for i in 1..self.knots.len() {
            vertices.push((self.knots[i], c.left[i]));
            if c.right[i] != c.left[i] {
                vertices.push((self.knots[i], c.right[i]));
            }
        }
        Ok(GraphPolyline { vertices })
    }

    /// Pointwise `x(t) / sqrt(y(t))` on the union grid.
    ///
    /// `y` must be continuous, nondecreasing, and strictly positive at 0
    /// (hence everywhere). Knot values are exact; between knots the result
    /// interpolates linearly, which is exact whenever `y` is constant there.
    pub fn divide_by_sqrt(&self, y: &Self) -> Result<Self, PathError> {
        if y.dim() != 1 {
            return Err(PathError::NotOneDimensional);
        }
        if !y.is_continuous() {
            return Err(PathError::NotContinuous);
        }
        if !y.is_nondecreasing() {
            return Err(PathError::NotMonotone);
        }
        if !(y.comps[0].right[0] > T::zero()) {
            return Err(PathError::NotPositiveAtZero);
        }
        let grid = self.union_knots(y);
        let comps = (0..self.dim())
            .map(|d| {
                let mut left = Vec::with_capacity(grid.len());
                let mut right = Vec::with_capacity(grid.len());
                for (gi, t) in grid.iter().enumerate() {
                    let denom_r = y.eval(0, *t).sqrt();
                    right.push(self.eval(d, *t) / denom_r);
                    if gi == 0 {
                        left.push(right[0]);
                    } else {
                        let denom_l = y.left_limit(0, *t).sqrt();
                        left.push(self.left_limit(d, *t) / denom_l);
                    }
                }
                (left, right)
            })
            .collect();
        Self::new(grid, comps)
    }

    /// Freezes the terminal value of a monotone coordinate: returns
    /// `(x, constant path at y(1))`. `y` must be nondecreasing with
    /// `y(1) > 0` so the result can serve as a divisor.
    pub fn freeze_terminal(&self, y: &Self) -> Result<(Self, Self), PathError> {
        if y.dim() != 1 {
            return Err(PathError::NotOneDimensional);
        }
        if !y.is_nondecreasing() {
            return Err(PathError::NotMonotone);
        }
        let terminal = *y.comps[0].right.last().expect("nonempty");
        if !(terminal > T::zero()) {
            return Err(PathError::NonPositiveTerminal);
        }
        Ok((self.clone(), Self::constant(terminal)))
    }
}

/// Completed graph of a cadlag path: a polyline in the `(t, z)` plane,
/// monotone in the graph order.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphPolyline<T> {
    vertices: Vec<(T, T)>,
}

impl<T: Real> GraphPolyline<T> {
    pub fn vertices(&self) -> &[(T, T)] {
        &self.vertices
    }

    /// Total Euclidean length of the polyline.
    pub fn length(&self) -> T {
        self.vertices
            .windows(2)
            .fold(T::zero(), |s, w| {
                let (dt, dz) = (w[1].0 - w[0].0, w[1].1 - w[0].1);
                s + (dt * dt + dz * dz).sqrt()
            })
    }

    /// Resamples the polyline with roughly `resolution` equally spaced points
    /// overall, always keeping the original vertices. Edge subdivision keeps
    /// the maximum spacing at or below `length / resolution`.
    pub fn densify(&self, resolution: usize) -> Vec<(T, T)> {
        let total = self.length();
        if total == T::zero() || self.vertices.len() == 1 {
            return self.vertices.clone();
        }
        let target = total / T::of_usize(resolution.max(1));
        let mut out = Vec::with_capacity(resolution + self.vertices.len());
        out.push(self.vertices[0]);
        for w in self.vertices.windows(2) {
            let (a, b) = (w[0], w[1]);
            let len = {
                let (dt, dz) = (b.0 - a.0, b.1 - a.1);
                (dt * dt + dz * dz).sqrt()
            };
            let pieces = if len == T::zero() {
                1
            } else {
                (len / target).ceil().to_usize().unwrap_or(1).max(1)
            };
            for k in 1..=pieces {
                let f = T::of_usize(k) / T::of_usize(pieces);
                out.push((a.0 + (b.0 - a.0) * f, a.1 + (b.1 - a.1) * f));
            }
        }
        out
    }
}
