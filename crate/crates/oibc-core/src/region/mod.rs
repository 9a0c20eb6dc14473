//! Rate-region boundaries shared by the two-user and K-user computations.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelConfig, ConstraintKind, IntensityConstraint};
use crate::error::{domain, Result};
use crate::scalar::{avg_asym, avg_ub, bpower, peak_asym, peak_ub, scaled_power_gain};

const TWO_PI_E: f64 = 2.0 * PI * E;

pub mod hull;
pub mod k_user;
pub mod two_user;

/// Rates of all users in nats, strongest receiver first.
pub type RateTuple = Vec<f64>;

/// Rates of a two-user channel in nats.
pub type RatePair = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Inner,
    Outer,
    Asymptotic,
}

impl BoundKind {
    pub fn label(self) -> &'static str {
        match self {
            BoundKind::Inner => "inner",
            BoundKind::Outer => "outer",
            BoundKind::Asymptotic => "asymptotic",
        }
    }
}

/// Which single-user bound the joint-constraint outer region is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OuterForm {
    #[default]
    Full,
    HighSnr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BoundOptions {
    /// Run the local search over the two-parameter joint bound.
    pub refine: bool,
    pub outer_form: OuterForm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub params: Vec<f64>,
    pub rates: RateTuple,
}

/// Ordered rate points with the parameters that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionBoundary {
    pub kind: BoundKind,
    pub constraint: ConstraintKind,
    pub param_names: Vec<String>,
    pub points: Vec<BoundaryPoint>,
}

impl RegionBoundary {
    pub fn r1(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.rates[0]).collect()
    }

    pub fn r2(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.rates[1]).collect()
    }

    /// Checks nonnegative finite rates and, for two users, ascending R1 with nonincreasing R2.
    pub fn validate(&self) -> Result<()> {
        for p in &self.points {
            if p.rates.iter().any(|r| !r.is_finite() || *r < 0.0) {
                return Err(domain("rates", format!("invalid rate tuple {:?}", p.rates)));
            }
        }
        if self.points.first().is_some_and(|p| p.rates.len() == 2) {
            for w in self.points.windows(2) {
                let (a, b) = (&w[0].rates, &w[1].rates);
                let tol = 1e-12 * (1.0 + a[1].abs());
                if b[0] < a[0] || b[1] > a[1] + tol {
                    return Err(domain(
                        "boundary",
                        format!("{} boundary is not monotone near {:?}", self.kind.label(), a),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Uniform grid of `n` points on [0, 1], including both ends.
pub fn rho_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![1.0],
        _ => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}

pub(crate) fn check_rho(rho: f64) -> Result<()> {
    if (0.0..=1.0).contains(&rho) {
        Ok(())
    } else {
        Err(domain("rho", format!("must lie in [0, 1], got {rho}")))
    }
}

/// Constraint-specific single-user quantities used by every region formula.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Family {
    pub constraint: IntensityConstraint,
    pub scale: f64,
    pub mu: f64,
    pub opts: BoundOptions,
}

impl Family {
    pub fn new(cfg: &ChannelConfig, opts: BoundOptions) -> Result<Self> {
        let constraint = cfg.constraint();
        let mu = match constraint {
            IntensityConstraint::Joint(j) => j.mu_star()?.value,
            _ => 0.0,
        };
        Ok(Self {
            constraint,
            scale: constraint.scale(),
            mu,
            opts,
        })
    }

    pub fn kind(&self) -> ConstraintKind {
        self.constraint.kind()
    }

    /// Upper bound on the capacity with input scaled by `rho`, as used in the outer regions.
    pub fn outer_cap(&self, rho: f64, sigma: f64) -> Result<f64> {
        let s = rho * self.scale;
        Ok(match self.kind() {
            ConstraintKind::Peak => peak_ub(s, sigma),
            ConstraintKind::Average => avg_ub(s, sigma),
            ConstraintKind::Joint => match self.opts.outer_form {
                OuterForm::Full => bpower(s, sigma, self.mu, self.opts.refine)?,
                OuterForm::HighSnr => {
                    let r = s / sigma;
                    0.5 * (scaled_power_gain(1.0, self.mu) * r * r / TWO_PI_E).ln_1p()
                }
            },
        })
    }

    /// `e^{2 C} - 1` for the high-SNR rate of the `rho`-scaled input.
    pub fn asym_snr(&self, rho: f64, sigma: f64) -> f64 {
        let r = self.scale / sigma;
        match self.kind() {
            ConstraintKind::Peak => (rho * r).powi(2) / TWO_PI_E,
            ConstraintKind::Average => E * (rho * r).powi(2) / (2.0 * PI),
            ConstraintKind::Joint => scaled_power_gain(rho, self.mu) * r * r / TWO_PI_E,
        }
    }

    /// High-SNR single-user rate of the `rho`-scaled input.
    pub fn asym_rate(&self, rho: f64, sigma: f64) -> f64 {
        match self.kind() {
            ConstraintKind::Peak => peak_asym(rho * self.scale, sigma),
            ConstraintKind::Average => avg_asym(rho * self.scale, sigma),
            ConstraintKind::Joint => 0.5 * self.asym_snr(rho, sigma).ln_1p(),
        }
    }

    /// Bound subtracted from a split-input rate: the capacity bound of the input fraction `rho`.
    pub fn split_cap(&self, rho: f64, sigma: f64) -> Result<f64> {
        let s = rho * self.scale;
        Ok(match self.kind() {
            ConstraintKind::Peak => peak_ub(s, sigma),
            ConstraintKind::Average => avg_ub(s, sigma),
            ConstraintKind::Joint => bpower(s, sigma, rho * self.mu, self.opts.refine)?,
        })
    }
}
