//! Gaussian tail function and log-domain helpers.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Above this argument the complementary error function underflows, so the
/// log tail switches to its asymptotic series.
const LN_Q_SERIES_FROM: f64 = 35.0;

/// Standard-normal upper-tail probability.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// `1 - 2 Q(x)`, accurate for small `x`.
pub fn one_minus_two_q(x: f64) -> f64 {
    libm::erf(x * FRAC_1_SQRT_2)
}

/// `1 - Q(u) - Q(v)`, accurate when the result is small.
pub fn one_minus_q_pair(u: f64, v: f64) -> f64 {
    0.5 * libm::erf(u * FRAC_1_SQRT_2) + 0.5 * libm::erf(v * FRAC_1_SQRT_2)
}

/// `ln(x Q(x) / phi(x))` for large `x` from the asymptotic series.
fn ln_scaled_mills_series(x: f64) -> f64 {
    let inv2 = 1.0 / (x * x);
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..10 {
        term *= -((2 * k - 1) as f64) * inv2;
        sum += term;
    }
    sum.ln()
}

/// Natural log of `Q(x)`, finite for every finite `x`.
pub fn ln_q(x: f64) -> f64 {
    if x < LN_Q_SERIES_FROM {
        return q_function(x).ln();
    }
    -0.5 * x * x - (x * (2.0 * PI).sqrt()).ln() + ln_scaled_mills_series(x)
}

/// Natural log of the Mills ratio `Q(x) / phi(x)`, finite for every finite `x`.
pub fn ln_mills(x: f64) -> f64 {
    if x < LN_Q_SERIES_FROM {
        ln_q(x) + 0.5 * x * x + 0.5 * (2.0 * PI).ln()
    } else {
        ln_scaled_mills_series(x) - x.ln()
    }
}

/// Five-point Gauss–Legendre nodes and weights on [-1, 1].
const GL5: [(f64, f64); 5] = [
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (-0.538_469_310_105_683, 0.478_628_670_499_366_5),
    (0.0, 0.568_888_888_888_888_9),
    (0.538_469_310_105_683, 0.478_628_670_499_366_5),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

/// Below this `(b - a) max(1, |a|, |b|)` the tail difference is integrated directly.
const SHORT_INTERVAL: f64 = 0.05;

/// Natural log of `Q(a) - Q(b)` for `a <= b`; `-inf` when the two coincide.
pub fn ln_q_diff(a: f64, b: f64) -> f64 {
    debug_assert!(a <= b);
    ln_q_span(a, b - a)
}

/// Natural log of `Q(a) - Q(a + d)` with the width `d >= 0` given exactly.
pub fn ln_q_span(a: f64, d: f64) -> f64 {
    debug_assert!(d >= 0.0);
    let b = a + d;
    if d == 0.0 {
        return f64::NEG_INFINITY;
    }
    if d * a.abs().max(b.abs()).max(1.0) < SHORT_INTERVAL {
        let (c, r) = (0.5 * (a + b), 0.5 * d);
        let ln_terms = GL5.map(|(x, w)| {
            let z = c + r * x;
            w.ln() - 0.5 * z * z
        });
        let top = ln_terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = ln_terms.iter().map(|t| (t - top).exp()).sum();
        return r.ln() + top + sum.ln() - 0.5 * (2.0 * PI).ln();
    }
    if a >= 0.0 {
        let la = ln_q(a);
        la + (-(ln_q(b) - la).exp_m1()).ln()
    } else if b <= 0.0 {
        ln_q_span(-b, d)
    } else {
        one_minus_q_pair(-a, b).ln()
    }
}

/// Standard-normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// `ln(e^a + e^b)` without overflow.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Differential entropy of a Gaussian with standard deviation `sigma`.
pub fn gaussian_entropy(sigma: f64) -> f64 {
    0.5 * (2.0 * PI * std::f64::consts::E * sigma * sigma).ln()
}
