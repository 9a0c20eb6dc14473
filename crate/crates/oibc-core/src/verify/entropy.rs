//! Differential entropies and mutual informations of noisy superposition inputs.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::mixture::{noisy_draw, InputLaw, MixtureDensity};
use super::quadrature::{adaptive_simpson, gauss_legendre, QuadratureSpec, Rule};
use crate::error::{check_positive, domain, finite, Result};
use crate::source::Decomposition;
use crate::special::gaussian_entropy;

/// Densities below this are treated as zero in `-p ln p`.
pub const DENSITY_FLOOR: f64 = 1e-300;

/// Tolerance below zero accepted for entropy-power slacks.
pub const EPI_TOL: f64 = 1e-9;

/// Monte Carlo agreement band in standard errors.
pub const MC_BAND_SE: f64 = 5.0;

fn neg_p_ln_p(p: f64) -> f64 {
    if p < DENSITY_FLOOR {
        0.0
    } else {
        -p * p.ln()
    }
}

/// Differential entropy of a mixture density by quadrature.
pub fn diff_entropy_quadrature(density: &MixtureDensity, spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    let sigma = density.sigma();
    let (a, b) = density.domain(spec.truncation_sigmas);
    let f = |y: f64| neg_p_ln_p(density.pdf(y));
    let h = match spec.rule {
        Rule::AdaptiveSimpson => adaptive_simpson(&f, a, b, sigma, spec.abs_tol)?,
        Rule::FixedGaussLegendre { nodes, panel_sigmas } => {
            gauss_legendre(&f, a, b, panel_sigmas as f64 * sigma, nodes)
        }
    };
    finite("differential entropy", h)
}

/// `h(law + N(0, sigma^2))`.
pub fn noisy_entropy(law: &InputLaw, sigma: f64, spec: &QuadratureSpec) -> Result<f64> {
    diff_entropy_quadrature(&MixtureDensity::new(law, sigma)?, spec)
}

/// `I(X1; X1 + Z1)` for the strongest user's layer.
pub fn mi_sc_user1(x1: &InputLaw, sigma1: f64, spec: &QuadratureSpec) -> Result<f64> {
    Ok(noisy_entropy(x1, sigma1, spec)? - gaussian_entropy(sigma1))
}

/// `h(X + Z2) - h(X1 + Z2)`: the rate of the remaining layer with `x1` treated as noise.
pub fn mi_sc_user2(x: &InputLaw, x1: &InputLaw, sigma2: f64, spec: &QuadratureSpec) -> Result<f64> {
    if x == x1 {
        return Ok(0.0);
    }
    Ok(noisy_entropy(x, sigma2, spec)? - noisy_entropy(x1, sigma2, spec)?)
}

/// Achievable rate pair of a decomposition, user 1 decoding both layers.
pub fn mi_split(
    decomposition: &Decomposition,
    sigma1: f64,
    sigma2: f64,
    spec: &QuadratureSpec,
) -> Result<[f64; 2]> {
    let x1 = InputLaw::Continuous(decomposition.continuous);
    let x = InputLaw::from(decomposition);
    Ok([
        mi_sc_user1(&x1, sigma1, spec)?,
        mi_sc_user2(&x, &x1, sigma2, spec)?,
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpiCheck {
    /// `h(sum) - 0.5 ln sum_i e^{2 h_i}`.
    pub slack: f64,
    pub holds: bool,
}

/// Entropy-power inequality check for an independent sum.
///
/// A part with entropy `-inf` (a point mass) contributes nothing.
pub fn epi_check(h_sum: f64, parts: &[f64]) -> Result<EpiCheck> {
    if parts.is_empty() {
        return Err(domain("parts", "at least one summand entropy is required"));
    }
    finite("summed entropy", h_sum)?;
    let m = parts.iter().fold(f64::NEG_INFINITY, |m, &h| m.max(2.0 * h));
    if m == f64::NEG_INFINITY {
        return Ok(EpiCheck {
            slack: f64::INFINITY,
            holds: true,
        });
    }
    let lse = m + parts.iter().map(|&h| (2.0 * h - m).exp()).sum::<f64>().ln();
    let slack = finite("epi slack", h_sum - 0.5 * lse)?;
    Ok(EpiCheck {
        slack,
        holds: slack >= -EPI_TOL,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McCheck {
    pub quadrature: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub half_width: f64,
    pub agrees: bool,
}

/// Compares the quadrature entropy with a seeded Monte Carlo estimate of `-E ln p(Y)`.
pub fn monte_carlo_crosscheck(
    law: &InputLaw,
    sigma: f64,
    samples: usize,
    seed: u64,
    spec: &QuadratureSpec,
) -> Result<McCheck> {
    check_positive("sigma", sigma)?;
    if samples < 2 {
        return Err(domain("samples", "at least two samples are required"));
    }
    let density = MixtureDensity::new(law, sigma)?;
    let quadrature = diff_entropy_quadrature(&density, spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let v = -density
            .pdf(noisy_draw(law, sigma, &mut rng))
            .max(DENSITY_FLOOR)
            .ln();
        sum += v;
        sum_sq += v * v;
    }
    let n = samples as f64;
    let estimate = sum / n;
    let var = ((sum_sq - n * estimate * estimate) / (n - 1.0)).max(0.0);
    let std_error = (var / n).sqrt();
    let half_width = MC_BAND_SE * std_error;
    Ok(McCheck {
        quadrature,
        estimate,
        std_error,
        half_width,
        agrees: (estimate - quadrature).abs() <= half_width,
    })
}
