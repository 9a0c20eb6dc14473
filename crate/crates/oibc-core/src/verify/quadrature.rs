//! One-dimensional quadrature rules.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum Rule {
    AdaptiveSimpson,
    /// Composite Gauss–Legendre with `nodes` points per panel of `panel_sigmas` noise widths.
    FixedGaussLegendre {
        nodes: usize,
        panel_sigmas: u32,
    },
}

/// How an entropy integral is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rule: Rule,
    /// Absolute tolerance per adaptive panel.
    pub abs_tol: f64,
    /// Integration range beyond the input support, in noise standard deviations.
    pub truncation_sigmas: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rule: Rule::AdaptiveSimpson,
            abs_tol: 1e-10,
            truncation_sigmas: 10.0,
        }
    }
}

impl QuadratureSpec {
    pub fn gauss_legendre() -> Self {
        Self {
            rule: Rule::FixedGaussLegendre {
                nodes: 256,
                panel_sigmas: 8,
            },
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol.is_finite() && self.abs_tol > 0.0) {
            return Err(domain("abs_tol", "tolerance must be positive"));
        }
        if self.truncation_sigmas.is_nan() || self.truncation_sigmas < 8.0 {
            return Err(domain("truncation_sigmas", "truncation must be at least 8 sigma"));
        }
        if let Rule::FixedGaussLegendre { nodes, panel_sigmas } = self.rule {
            if nodes < 2 || panel_sigmas == 0 {
                return Err(domain(
                    "rule",
                    "Gauss-Legendre needs >= 2 nodes and a positive panel",
                ));
            }
        }
        Ok(())
    }
}

const MAX_DEPTH: u32 = 48;
const MAX_PANELS: usize = 400_000;
/// Integrand evaluations allowed per call before refinement stops.
const MAX_EVALUATIONS: usize = 20_000_000;

/// Adaptive Simpson over `[a, b]` split first into panels no wider than `panel`.
///
/// Returns the integral, or the worst per-panel error estimate if refinement ran out of depth.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panel: f64, tol: f64) -> Result<f64> {
    let count = (((b - a) / panel).ceil() as usize).clamp(1, MAX_PANELS);
    let h = (b - a) / count as f64;
    let mut total = 0.0;
    let mut worst: f64 = 0.0;
    let mut budget = MAX_EVALUATIONS;
    for i in 0..count {
        let lo = a + i as f64 * h;
        let hi = if i + 1 == count { b } else { lo + h };
        let (flo, fmid, fhi) = (f(lo), f(0.5 * (lo + hi)), f(hi));
        let whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
        let (v, err) = simpson_step(f, lo, hi, [flo, fmid, fhi], whole, tol, MAX_DEPTH, &mut budget);
        total += v;
        worst = worst.max(err);
    }
    if worst > tol {
        Err(Error::NonConvergence { achieved: worst })
    } else {
        Ok(total)
    }
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    [fa, fm, fb]: [f64; 3],
    whole: f64,
    tol: f64,
    depth: u32,
    budget: &mut usize,
) -> (f64, f64) {
    *budget = budget.saturating_sub(2);
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return (left + right + delta / 15.0, delta.abs() / 15.0);
    }
    if depth == 0 || *budget == 0 {
        return (left + right + delta / 15.0, delta.abs() / 15.0);
    }
    let (l, el) = simpson_step(f, a, m, [fa, flm, fm], left, 0.5 * tol, depth - 1, budget);
    let (r, er) = simpson_step(f, m, b, [fm, frm, fb], right, 0.5 * tol, depth - 1, budget);
    (l + r, el + er)
}

/// Gauss–Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Composite Gauss–Legendre over `[a, b]` with panels no wider than `panel`.
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panel: f64, nodes: usize) -> f64 {
    let (x, w) = gauss_legendre_rule(nodes);
    let count = (((b - a) / panel).ceil() as usize).clamp(1, MAX_PANELS);
    let h = (b - a) / count as f64;
    let mut total = 0.0;
    for i in 0..count {
        let lo = a + i as f64 * h;
        let (c, r) = (lo + 0.5 * h, 0.5 * h);
        total += r * x.iter().zip(&w).map(|(&xi, &wi)| wi * f(c + r * xi)).sum::<f64>();
    }
    total
}
