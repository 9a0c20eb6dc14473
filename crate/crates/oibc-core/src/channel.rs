//! Channel configuration: noise levels and the intensity constraint.

use serde::{Deserialize, Serialize};

use crate::error::{check_nonnegative, check_positive, domain, Result};
use crate::scalar::{solve_mu_star, MuStar};

/// Peak amplitude bound `Pr(X <= A) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakConstraint {
    pub amplitude: f64,
}

impl PeakConstraint {
    pub fn new(amplitude: f64) -> Result<Self> {
        check_nonnegative("amplitude", amplitude)?;
        Ok(Self { amplitude })
    }
}

/// Mean intensity bound `E[X] <= E`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AverageConstraint {
    pub mean: f64,
}

impl AverageConstraint {
    pub fn new(mean: f64) -> Result<Self> {
        check_nonnegative("mean", mean)?;
        Ok(Self { mean })
    }
}

/// Peak and mean bounds together, with `alpha = E / A`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointConstraint {
    pub amplitude: f64,
    pub alpha: f64,
}

impl JointConstraint {
    pub fn new(amplitude: f64, alpha: f64) -> Result<Self> {
        check_nonnegative("amplitude", amplitude)?;
        check_alpha(alpha)?;
        Ok(Self { amplitude, alpha })
    }

    pub fn mean(&self) -> f64 {
        self.alpha * self.amplitude
    }

    pub fn mu_star(&self) -> Result<MuStar> {
        solve_mu_star(self.alpha)
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 && alpha <= 0.5 {
        Ok(())
    } else {
        Err(domain("alpha", format!("must lie in (0, 1/2], got {alpha}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum IntensityConstraint {
    Peak(PeakConstraint),
    #[serde(rename = "avg")]
    Average(AverageConstraint),
    Joint(JointConstraint),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintKind {
    Peak,
    #[serde(rename = "avg")]
    Average,
    Joint,
}

impl ConstraintKind {
    pub fn label(self) -> &'static str {
        match self {
            ConstraintKind::Peak => "peak",
            ConstraintKind::Average => "avg",
            ConstraintKind::Joint => "joint",
        }
    }
}

impl IntensityConstraint {
    pub fn peak(amplitude: f64) -> Result<Self> {
        PeakConstraint::new(amplitude).map(Self::Peak)
    }

    pub fn average(mean: f64) -> Result<Self> {
        AverageConstraint::new(mean).map(Self::Average)
    }

    pub fn joint(amplitude: f64, alpha: f64) -> Result<Self> {
        JointConstraint::new(amplitude, alpha).map(Self::Joint)
    }

    pub fn kind(&self) -> ConstraintKind {
        match self {
            Self::Peak(_) => ConstraintKind::Peak,
            Self::Average(_) => ConstraintKind::Average,
            Self::Joint(_) => ConstraintKind::Joint,
        }
    }

    /// The intensity scale the rate formulas multiply by `rho`.
    pub fn scale(&self) -> f64 {
        match self {
            Self::Peak(c) => c.amplitude,
            Self::Average(c) => c.mean,
            Self::Joint(c) => c.amplitude,
        }
    }
}

/// Noise levels of a degraded broadcast channel together with its constraint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    sigmas: Vec<f64>,
    constraint: IntensityConstraint,
}

impl ChannelConfig {
    /// Builds a configuration; noise levels must be positive and nondecreasing.
    pub fn new(sigmas: Vec<f64>, constraint: IntensityConstraint) -> Result<Self> {
        if sigmas.len() < 2 {
            return Err(domain("sigma", "at least two users are required"));
        }
        for &s in &sigmas {
            check_positive("sigma", s)?;
        }
        if sigmas.windows(2).any(|w| w[1] < w[0]) {
            return Err(domain("sigma", "noise levels must be sorted ascending"));
        }
        match constraint {
            IntensityConstraint::Peak(c) => check_nonnegative("amplitude", c.amplitude)?,
            IntensityConstraint::Average(c) => check_nonnegative("mean", c.mean)?,
            IntensityConstraint::Joint(c) => {
                check_nonnegative("amplitude", c.amplitude)?;
                check_alpha(c.alpha)?;
            }
        }
        Ok(Self { sigmas, constraint })
    }

    pub fn two_user(sigma1: f64, sigma2: f64, constraint: IntensityConstraint) -> Result<Self> {
        Self::new(vec![sigma1, sigma2], constraint)
    }

    pub fn users(&self) -> usize {
        self.sigmas.len()
    }

    pub fn sigmas(&self) -> &[f64] {
        &self.sigmas
    }

    pub fn sigma(&self, k: usize) -> f64 {
        self.sigmas[k]
    }

    /// Noise level of the weakest receiver.
    pub fn sigma_max(&self) -> f64 {
        *self.sigmas.last().unwrap()
    }

    pub fn constraint(&self) -> IntensityConstraint {
        self.constraint
    }
}
