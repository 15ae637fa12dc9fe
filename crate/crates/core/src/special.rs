//! Small special-function kit: gamma function and the Kolmogorov distribution.

use crate::scalar::Real;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function by the Lanczos approximation (g = 7, 9 terms), with the
/// reflection formula for arguments below 1/2. Accurate to ~1e-13 relative
/// over the range used here (arguments in (-1, 2]).
pub fn gamma<T: Real>(x: T) -> T {
    let half = T::of(0.5);
    if x < half {
        // Reflection: gamma(x) gamma(1 - x) = pi / sin(pi x).
        let pi = T::PI();
        return pi / ((pi * x).sin() * gamma(T::one() - x));
    }
    let z = x - T::one();
    let mut acc = T::of(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += T::of(c) / (z + T::of_usize(i));
    }
    let t = z + T::of(LANCZOS_G) + half;
    let two_pi_sqrt = (T::of(2.0) * T::PI()).sqrt();
    two_pi_sqrt * t.powf(z + half) * (-t).exp() * acc
}

/// Survival function `Q(y) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 y^2)` of the
/// Kolmogorov distribution; the asymptotic law of a scaled two-sample
/// Kolmogorov-Smirnov statistic.
pub fn kolmogorov_survival<T: Real>(y: T) -> T {
    if y <= T::of(1e-8) {
        return T::one();
    }
    let mut sum = T::zero();
    let mut sign = T::one();
    for k in 1..=200usize {
        let kk = T::of_usize(k * k);
        let term = (-T::of(2.0) * kk * y * y).exp();
        sum += sign * term;
        if term < T::of(1e-16) {
            break;
        }
        sign = -sign;
    }
    (T::of(2.0) * sum).min(T::one()).max(T::zero())
}

/// Upper quantile of the Kolmogorov distribution: the `y` with `Q(y) = q`.
/// Solved by bisection; `q` must lie in (0, 1).
pub fn kolmogorov_critical<T: Real>(q: T) -> T {
    assert!(q > T::zero() && q < T::one(), "quantile level must be in (0,1)");
    let mut lo = T::of(1e-6);
    let mut hi = T::of(5.0);
    for _ in 0..200 {
        let mid = (lo + hi) * T::of(0.5);
        if kolmogorov_survival(mid) > q {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < T::of(1e-14) {
            break;
        }
    }
    (lo + hi) * T::of(0.5)
}
