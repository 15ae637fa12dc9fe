//! Skorokhod M1 distance between cadlag paths.
//!
//! The M1 distance between two one-dimensional paths equals the continuous
//! Frechet distance between their completed graphs under the ground metric
//! `max(|dt|, |dz|)`: both compare monotone parametrizations of the graphs.
//! We approximate it from above by the discrete Frechet distance on densified
//! graphs and refine by doubling the resolution until the value stabilizes.
//! Multidimensional paths use the product (max over components) form.

use serde::Serialize;

use crate::path::{CadlagPath, PathError};
use crate::scalar::Real;

/// Knobs for the refinement loop.
#[derive(Clone, Copy, Debug)]
pub struct M1Options<T> {
    /// Stop once a doubling changes the value by less than this.
    pub tol: T,
    /// Resolution of the first pass (points per graph).
    pub initial_resolution: usize,
    /// Hard cap on the resolution; reaching it flags non-convergence.
    pub max_resolution: usize,
}

impl<T: Real> Default for M1Options<T> {
    fn default() -> Self {
        Self { tol: T::of(1e-3), initial_resolution: 64, max_resolution: 1 << 14 }
    }
}

/// Outcome of an M1 computation. The value is an upper approximation that
/// decreases toward the true distance as the resolution grows.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct M1Report<T> {
    pub value: T,
    /// Resolution of the final pass.
    pub resolution: usize,
    /// Change produced by the final doubling.
    pub last_change: T,
    /// False when the resolution cap was hit before the change fell below tol.
    pub converged: bool,
}

fn ground_dist<T: Real>(a: (T, T), b: (T, T)) -> T {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

/// Discrete Frechet distance between two point sequences under the
/// `max(|dt|, |dz|)` ground metric. Standard dynamic program with two rolling
/// rows; O(len(a) * len(b)) time, O(len(b)) memory.
fn discrete_frechet<T: Real>(a: &[(T, T)], b: &[(T, T)]) -> T {
    assert!(!a.is_empty() && !b.is_empty());
    let mut prev = vec![T::zero(); b.len()];
    let mut cur = vec![T::zero(); b.len()];
    prev[0] = ground_dist(a[0], b[0]);
    for j in 1..b.len() {
        prev[j] = prev[j - 1].max(ground_dist(a[0], b[j]));
    }
    for &pa in &a[1..] {
        cur[0] = prev[0].max(ground_dist(pa, b[0]));
        for j in 1..b.len() {
            let reach = prev[j].min(cur[j - 1]).min(prev[j - 1]);
            cur[j] = reach.max(ground_dist(pa, b[j]));
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len() - 1]
}

fn frechet_at_resolution<T: Real>(
    x: &CadlagPath<T>,
    y: &CadlagPath<T>,
    resolution: usize,
) -> Result<T, PathError> {
    let gx = x.completed_graph()?.densify(resolution);
    let gy = y.completed_graph()?.densify(resolution);
    Ok(discrete_frechet(&gx, &gy))
}

/// M1 distance between one-dimensional paths.
pub fn d_m1<T: Real>(
    x: &CadlagPath<T>,
    y: &CadlagPath<T>,
    opts: M1Options<T>,
) -> Result<M1Report<T>, PathError> {
    if x.dim() != 1 || y.dim() != 1 {
        return Err(PathError::NotOneDimensional);
    }
    let mut resolution = opts.initial_resolution.max(2);
    let mut value = frechet_at_resolution(x, y, resolution)?;
    let mut last_change = value;
    loop {
        if resolution >= opts.max_resolution {
            return Ok(M1Report { value, resolution, last_change, converged: false });
        }
        resolution *= 2;
        let refined = frechet_at_resolution(x, y, resolution)?;
        last_change = (value - refined).abs();
        value = refined;
        if last_change < opts.tol {
            return Ok(M1Report { value, resolution, last_change, converged: true });
        }
    }
}

/// Product-space M1 distance: the maximum of the componentwise distances.
pub fn d_p<T: Real>(
    x: &CadlagPath<T>,
    y: &CadlagPath<T>,
    opts: M1Options<T>,
) -> Result<M1Report<T>, PathError> {
    if x.dim() != y.dim() {
        return Err(PathError::DimensionMismatch);
    }
    let mut out: Option<M1Report<T>> = None;
    for d in 0..x.dim() {
        let r = d_m1(&x.component(d)?, &y.component(d)?, opts)?;
        out = Some(match out {
            None => r,
            Some(acc) => M1Report {
                value: acc.value.max(r.value),
                resolution: acc.resolution.max(r.resolution),
                last_change: acc.last_change.max(r.last_change),
                converged: acc.converged && r.converged,
            },
        });
    }
    out.ok_or(PathError::LengthMismatch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn step_path(at: f64, height: f64) -> CadlagPath<f64> {
        CadlagPath::step(vec![0.0, at, 1.0], vec![vec![0.0, height, height]]).unwrap()
    }

    fn centered_ramp(eps: f64) -> CadlagPath<f64> {
        CadlagPath::piecewise_linear(
            vec![0.0, 0.5 - eps, 0.5 + eps, 1.0],
            vec![vec![0.0, 0.0, 1.0, 1.0]],
        )
        .unwrap()
    }

    #[test]
    fn identical_paths_have_zero_distance() {
        let x = step_path(0.5, 1.0);
        let r = d_m1(&x, &x, M1Options::default()).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.converged);
    }

    #[test]
    fn step_vs_ramp_matches_closed_form() {
        // Distance between the unit step at 1/2 and the ramp of half-width
        // eps centered there is eps / (1 + 2 eps): the binding pair is the
        // step corner (1/2, 0) against the ramp point at height w solving
        // eps (1 - 2w) = w, and the symmetric matching attains that bound.
        for eps in [0.1, 0.05] {
            let r = d_m1(&step_path(0.5, 1.0), &centered_ramp(eps), M1Options::default())
                .unwrap();
            assert!(r.converged);
            let truth = eps / (1.0 + 2.0 * eps);
            assert!(r.value >= truth - 1e-9, "upper approximation: {} vs {truth}", r.value);
            assert!(r.value <= truth + 2e-3, "close to truth: {} vs {truth}", r.value);
        }
    }

    #[test]
    fn narrower_ramps_get_closer_to_the_step() {
        let step = step_path(0.5, 1.0);
        let mut prev = f64::INFINITY;
        for eps in [0.1, 0.05, 0.025, 0.0125] {
            let r = d_m1(&step, &centered_ramp(eps), M1Options::default()).unwrap();
            assert!(r.value < prev, "monotone in eps: {} < {prev}", r.value);
            prev = r.value;
        }
    }

    #[test]
    fn bounded_by_uniform_distance() {
        let x = step_path(0.3, 1.0);
        let y = step_path(0.35, 0.8);
        let m1 = d_m1(&x, &y, M1Options::default()).unwrap().value;
        let unif = x.uniform_dist(&y).unwrap();
        assert!(m1 <= unif + 1e-3, "{m1} <= {unif}");
    }

    #[test]
    fn symmetry_and_triangle() {
        let a = step_path(0.25, 1.0);
        let b = centered_ramp(0.1);
        let c = step_path(0.75, -0.5);
        let opts = M1Options::default();
        let ab = d_m1(&a, &b, opts).unwrap().value;
        let ba = d_m1(&b, &a, opts).unwrap().value;
        assert_relative_eq!(ab, ba, max_relative = 1e-9);
        let bc = d_m1(&b, &c, opts).unwrap().value;
        let ac = d_m1(&a, &c, opts).unwrap().value;
        assert!(ac <= ab + bc + 1e-3, "{ac} <= {ab} + {bc}");
    }

    #[test]
    fn time_shifted_steps() {
        // Steps of equal height at times s and t: distance min(|t - s|, 1).
        let x = step_path(0.4, 1.0);
        let y = step_path(0.6, 1.0);
        let r = d_m1(&x, &y, M1Options::default()).unwrap();
        assert!((r.value - 0.2).abs() < 2e-3, "{}", r.value);
    }

    #[test]
    fn product_metric_takes_component_max() {
        let x = CadlagPath::step(
            vec![0.0f64, 0.5, 1.0],
            vec![vec![0.0, 1.0, 1.0], vec![0.0, 0.0, 0.0]],
        )
        .unwrap();
        let y = CadlagPath::step(
            vec![0.0, 0.5, 1.0],
            vec![vec![0.0, 1.0, 1.0], vec![0.0, 0.3, 0.3]],
        )
        .unwrap();
        let r = d_p(&x, &y, M1Options::default()).unwrap();
        assert!((r.value - 0.3).abs() < 2e-3, "{}", r.value);
    }
}
