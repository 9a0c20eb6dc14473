//! Single-user capacity upper bounds and their high-SNR forms.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::error::{check_nonnegative, check_positive, domain, finite, Error, Result};
use crate::special::{one_minus_q_pair, one_minus_two_q, q_function};

const TWO_PI_E: f64 = 2.0 * PI * E;
const BRACKET_LIMIT: f64 = 1e300;

/// A single-user rate in nats per channel use.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CapacityValue(f64);

impl CapacityValue {
    pub fn nats(self) -> f64 {
        self.0
    }

    pub fn bits(self) -> f64 {
        self.0 / std::f64::consts::LN_2
    }
}

/// Rate parameter of the truncated-exponential law meeting a mean-to-peak ratio.
///
/// A value of zero is the sentinel for `alpha = 1/2`, where the law becomes uniform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuStar {
    pub value: f64,
    pub residual: f64,
}

impl MuStar {
    pub const UNIFORM_LIMIT: MuStar = MuStar {
        value: 0.0,
        residual: 0.0,
    };

    pub fn is_uniform_limit(&self) -> bool {
        self.value == 0.0
    }
}

/// Mean-to-peak ratio `1/mu - e^{-mu}/(1 - e^{-mu})` of a truncated exponential.
pub fn mean_ratio(mu: f64) -> f64 {
    if mu < 1e-3 {
        let m2 = mu * mu;
        0.5 - mu / 12.0 + mu * m2 / 720.0 - mu * m2 * m2 / 30240.0
    } else {
        1.0 / mu - 1.0 / mu.exp_m1()
    }
}

/// Solves `mean_ratio(mu) = alpha` by bracketing bisection.
pub fn solve_mu_star(alpha: f64) -> Result<MuStar> {
    crate::channel::check_alpha(alpha)?;
    if alpha == 0.5 {
        return Ok(MuStar::UNIFORM_LIMIT);
    }
    let mut lo = 1e-9;
    while mean_ratio(lo) <= alpha {
        lo *= 0.5;
        if lo < f64::MIN_POSITIVE {
            return Ok(MuStar {
                value: lo,
                residual: mean_ratio(lo) - alpha,
            });
        }
    }
    let mut hi = 1.0;
    while mean_ratio(hi) >= alpha {
        hi *= 2.0;
        if hi > BRACKET_LIMIT {
            return Err(Error::BracketGrowth { limit: BRACKET_LIMIT });
        }
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-14 * mid.max(1.0) || mid == lo || mid == hi {
            break;
        }
        if mean_ratio(mid) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let value = 0.5 * (lo + hi);
    Ok(MuStar {
        value,
        residual: mean_ratio(value) - alpha,
    })
}

pub(crate) fn peak_ub(a: f64, sigma: f64) -> f64 {
    let r = a / sigma;
    let quadratic = 0.5 * (0.25 * r * r).ln_1p();
    let linear = (r / TWO_PI_E.sqrt()).ln_1p();
    quadratic.min(linear)
}

pub(crate) fn peak_asym(a: f64, sigma: f64) -> f64 {
    let r = a / sigma;
    0.5 * (r * r / TWO_PI_E).ln_1p()
}

pub(crate) fn avg_ub(e: f64, sigma: f64) -> f64 {
    (2.0 + e / sigma).ln() + 0.5 * (E / (2.0 * PI)).ln()
}

pub(crate) fn avg_asym(e: f64, sigma: f64) -> f64 {
    let r = e / sigma;
    0.5 * (E * r * r / (2.0 * PI)).ln_1p()
}

/// Power gain of the truncated-exponential input scaled by `rho`, relative to a uniform input
/// over the full amplitude.
///
/// Equals `exp(2 - 2x e^{-x}/(1 - e^{-x})) ((1 - e^{-x})/mu)^2` with `x = rho mu`, and `rho^2` when
/// `mu` is the uniform sentinel.
pub fn scaled_power_gain(rho: f64, mu: f64) -> f64 {
    if rho == 0.0 {
        return 0.0;
    }
    if mu == 0.0 {
        return rho * rho;
    }
    let x = rho * mu;
    let shape = (2.0 - 2.0 * x / x.exp_m1()).exp();
    let tail = -(-x).exp_m1() / mu;
    shape * tail * tail
}

pub(crate) fn joint_asym(rho: f64, a: f64, sigma: f64, mu: f64) -> f64 {
    let r = a / sigma;
    0.5 * (scaled_power_gain(rho, mu) * r * r / TWO_PI_E).ln_1p()
}

/// Peak-constrained upper bound `min{½ln(1 + A²/4σ²), ln(1 + A/(√(2πe)σ))}`.
pub fn cap_ub_peak(a: f64, sigma: f64) -> Result<CapacityValue> {
    check_nonnegative("amplitude", a)?;
    check_positive("sigma", sigma)?;
    Ok(CapacityValue(peak_ub(a, sigma)))
}

/// High-SNR form `½ln(1 + A²/(2πeσ²))` of the peak-constrained bound.
pub fn cap_ub_peak_asymptotic(a: f64, sigma: f64) -> Result<CapacityValue> {
    check_nonnegative("amplitude", a)?;
    check_positive("sigma", sigma)?;
    Ok(CapacityValue(peak_asym(a, sigma)))
}

/// Mean-constrained upper bound `½ln((e/2π)(2 + E/σ)²)`; positive even at `E = 0`.
pub fn cap_ub_avg(e: f64, sigma: f64) -> Result<CapacityValue> {
    check_nonnegative("mean", e)?;
    check_positive("sigma", sigma)?;
    Ok(CapacityValue(avg_ub(e, sigma)))
}

/// High-SNR form `½ln(1 + eE²/(2πσ²))` of the mean-constrained bound.
pub fn cap_ub_avg_asymptotic(e: f64, sigma: f64) -> Result<CapacityValue> {
    check_nonnegative("mean", e)?;
    check_positive("sigma", sigma)?;
    Ok(CapacityValue(avg_asym(e, sigma)))
}

/// The two-parameter bound `B(beta1, beta2)` on the jointly constrained capacity.
pub fn b_function(beta1: f64, beta2: f64, a: f64, sigma: f64, mu: f64) -> Result<f64> {
    check_positive("beta1", beta1)?;
    check_positive("beta2", beta2)?;
    check_positive("amplitude", a)?;
    check_positive("sigma", sigma)?;
    check_positive("mu", mu)?;
    b_eval(beta1, beta2, a, sigma, mu)
}

fn b_eval(beta1: f64, beta2: f64, a: f64, sigma: f64, mu: f64) -> Result<f64> {
    let ratio = mean_ratio(mu);
    let sqrt_2pi = (2.0 * PI).sqrt();

    let weight = finite(
        "prefactor",
        one_minus_q_pair((beta1 + ratio * a) / sigma, (beta1 + (1.0 - ratio) * a) / sigma),
    )?;

    // ln(e^{b2 b1/A} - e^{-b2(1 + b1/A)}) = b2 b1/A + ln(1 - e^{-b2(1 + 2 b1/A)})
    let lead = beta2 * beta1 / a;
    let spread = beta2 * (1.0 + 2.0 * beta1 / a);
    let log_diff = lead + (-(-spread).exp_m1()).ln();
    let log_arg = (a / sigma).ln() + log_diff - (sqrt_2pi * beta2).ln() - one_minus_two_q(beta1 / sigma).ln();
    let log_arg = finite("log-argument", log_arg)?;

    let g1 = (-0.5 * (beta1 / sigma).powi(2)).exp();
    let g2 = (-0.5 * ((a + beta1) / sigma).powi(2)).exp();
    let tails = -0.5
        + q_function(beta1 / sigma)
        + beta1 / (sqrt_2pi * sigma) * g1
        + sigma / a * beta2 / sqrt_2pi * (g1 - g2);
    let tails = finite("gaussian-tail", tails)?;

    let penalty = finite(
        "mean-penalty",
        beta2 * ratio * one_minus_two_q((beta1 + 0.5 * a) / sigma),
    )?;

    finite("total", weight * log_arg + tails + penalty)
}

/// The displayed evaluation point `(beta1, beta2)` of the bound.
pub fn default_betas(a: f64, sigma: f64, mu: f64) -> (f64, f64) {
    let beta1 = sigma * (a / sigma).ln_1p();
    let beta2 = mu * -(-(beta1 * beta1) * mean_ratio(mu) / (2.0 * sigma * sigma)).exp_m1();
    (beta1, beta2)
}

pub(crate) fn bpower(a: f64, sigma: f64, mu: f64, refine: bool) -> Result<f64> {
    if a == 0.0 {
        return Ok(0.0);
    }
    if mu == 0.0 {
        return Ok(peak_ub(a, sigma));
    }
    let (b1, b2) = default_betas(a, sigma, mu);
    let mut best = b_eval(b1, b2, a, sigma, mu)?;
    if refine {
        let objective = |p: [f64; 2]| b_eval(p[0].exp(), p[1].exp(), a, sigma, mu).unwrap_or(f64::INFINITY);
        let (_, refined) = nelder_mead(objective, [b1.ln(), b2.ln()], 0.5, 400, 1e-13);
        best = best.min(refined);
    }
    Ok(best.max(0.0))
}

/// Joint-constraint bound: `B` at the displayed point, optionally refined by a local search.
pub fn cap_ub_bpower(a: f64, sigma: f64, mu: &MuStar, refine: bool) -> Result<CapacityValue> {
    check_nonnegative("amplitude", a)?;
    check_positive("sigma", sigma)?;
    bpower(a, sigma, mu.value, refine).map(CapacityValue)
}

/// High-SNR form of the joint-constraint bound.
pub fn cap_ub_bpower_asymptotic(a: f64, sigma: f64, mu: &MuStar) -> Result<CapacityValue> {
    check_nonnegative("amplitude", a)?;
    check_positive("sigma", sigma)?;
    check_nonnegative("mu", mu.value)?;
    Ok(CapacityValue(joint_asym(1.0, a, sigma, mu.value)))
}

/// High-SNR joint bound for the scaled input `TExp(rho A, rho mu)`.
pub fn cap_ub_scaled_joint(rho: f64, a: f64, sigma: f64, mu: &MuStar) -> Result<CapacityValue> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(domain("rho", format!("must lie in [0, 1], got {rho}")));
    }
    check_nonnegative("amplitude", a)?;
    check_positive("sigma", sigma)?;
    Ok(CapacityValue(joint_asym(rho, a, sigma, mu.value)))
}

fn nelder_mead<F>(f: F, start: [f64; 2], step: f64, max_iter: usize, tol: f64) -> ([f64; 2], f64)
where
    F: Fn([f64; 2]) -> f64,
{
    let mut simplex = [start, [start[0] + step, start[1]], [start[0], start[1] + step]];
    let mut values = simplex.map(&f);
    for _ in 0..max_iter {
        let mut order = [0, 1, 2];
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        simplex = order.map(|i| simplex[i]);
        values = order.map(|i| values[i]);
        if (values[2] - values[0]).abs() <= tol {
            break;
        }
        let centroid = [
            0.5 * (simplex[0][0] + simplex[1][0]),
            0.5 * (simplex[0][1] + simplex[1][1]),
        ];
        let along = |t: f64| {
            [
                centroid[0] + t * (simplex[2][0] - centroid[0]),
                centroid[1] + t * (simplex[2][1] - centroid[1]),
            ]
        };
        let reflected = along(-1.0);
        let fr = f(reflected);
        if fr < values[0] {
            let expanded = along(-2.0);
            let fe = f(expanded);
            if fe < fr {
                simplex[2] = expanded;
                values[2] = fe;
            } else {
                simplex[2] = reflected;
                values[2] = fr;
            }
        } else if fr < values[1] {
            simplex[2] = reflected;
            values[2] = fr;
        } else {
            let contracted = if fr < values[2] { along(-0.5) } else { along(0.5) };
            let fc = f(contracted);
            if fc < values[2].min(fr) {
                simplex[2] = contracted;
                values[2] = fc;
            } else {
                for i in 1..3 {
                    simplex[i] = [
                        0.5 * (simplex[0][0] + simplex[i][0]),
                        0.5 * (simplex[0][1] + simplex[i][1]),
                    ];
                    values[i] = f(simplex[i]);
                }
            }
        }
    }
    let best = (0..3).min_by(|&i, &j| values[i].total_cmp(&values[j])).unwrap();
    (simplex[best], values[best])
}
