//! Densities of an input law plus independent Gaussian noise.

use std::f64::consts::PI;
use std::sync::OnceLock;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_positive, domain, Result};
use crate::source::{AtomList, Decomposition, Sample, SecondFactor, SourceSpec};
use crate::special::{ln_mills, ln_q_span, log_add_exp};
use crate::verify::quadrature::gauss_legendre_rule;

/// Exponential tails are cut this many means past their offset.
pub const EXP_TAIL_MEANS: f64 = 40.0;

/// A nonnegative input law whose noisy density has a closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum InputLaw {
    Continuous(SourceSpec),
    Discrete(AtomList),
    /// Continuous law plus an independent atom list.
    Superposed {
        continuous: SourceSpec,
        atoms: AtomList,
    },
    /// Exponential part plus an atom at zero with an exponential tail.
    ExponentialPair {
        part_mean: f64,
        atom_mass: f64,
        tail_mean: f64,
    },
}

impl From<SourceSpec> for InputLaw {
    fn from(s: SourceSpec) -> Self {
        InputLaw::Continuous(s)
    }
}

impl From<&Decomposition> for InputLaw {
    fn from(d: &Decomposition) -> Self {
        match (&d.second, d.continuous) {
            (SecondFactor::Atoms(atoms), c) => InputLaw::Superposed {
                continuous: c,
                atoms: atoms.clone(),
            },
            (SecondFactor::AtomWithTail { atom_mass, tail_mean }, c) => InputLaw::ExponentialPair {
                part_mean: c.mean(),
                atom_mass: *atom_mass,
                tail_mean: *tail_mean,
            },
        }
    }
}

impl InputLaw {
    pub fn mean(&self) -> f64 {
        match self {
            InputLaw::Continuous(s) => s.mean(),
            InputLaw::Discrete(a) => a.mean(),
            InputLaw::Superposed { continuous, atoms } => continuous.mean() + atoms.mean(),
            InputLaw::ExponentialPair {
                part_mean,
                atom_mass,
                tail_mean,
            } => part_mean + (1.0 - atom_mass) * tail_mean,
        }
    }
}

impl Sample for InputLaw {
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            InputLaw::Continuous(s) => s.draw(rng),
            InputLaw::Discrete(a) => a.draw(rng),
            InputLaw::Superposed { continuous, atoms } => continuous.draw(rng) + atoms.draw(rng),
            InputLaw::ExponentialPair {
                part_mean,
                atom_mass,
                tail_mean,
            } => {
                let head = SourceSpec::Exponential { mean: *part_mean }.draw(rng);
                let tail = SecondFactor::AtomWithTail {
                    atom_mass: *atom_mass,
                    tail_mean: *tail_mean,
                };
                head + tail.draw(rng)
            }
        }
    }
}

/// Noise-smoothed building block, all located at `offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kernel", rename_all = "snake_case")]
pub enum Kernel {
    Point { offset: f64 },
    Uniform { offset: f64, width: f64 },
    TruncatedExponential { offset: f64, width: f64, mu: f64 },
    Exponential { offset: f64, mean: f64 },
}

impl Kernel {
    fn shifted(spec: SourceSpec, offset: f64) -> Self {
        match spec {
            SourceSpec::Uniform { amplitude } => Kernel::Uniform {
                offset,
                width: amplitude,
            },
            SourceSpec::TruncatedExponential { amplitude, mu } => Kernel::TruncatedExponential {
                offset,
                width: amplitude,
                mu,
            },
            SourceSpec::Exponential { mean } => Kernel::Exponential { offset, mean },
        }
    }

    fn span(&self) -> (f64, f64) {
        match *self {
            Kernel::Point { offset } => (offset, offset),
            Kernel::Uniform { offset, width } | Kernel::TruncatedExponential { offset, width, .. } => {
                (offset, offset + width)
            }
            Kernel::Exponential { offset, mean } => (offset, offset + EXP_TAIL_MEANS * mean),
        }
    }

    /// Log density of the kernel convolved with zero-mean Gaussian noise of deviation `sigma`.
    pub fn ln_density(&self, y: f64, sigma: f64) -> f64 {
        match *self {
            Kernel::Point { offset } => {
                let z = (y - offset) / sigma;
                -0.5 * z * z - (sigma * (2.0 * PI).sqrt()).ln()
            }
            Kernel::Uniform { offset, width } => {
                let u = y - offset;
                ln_q_span((u - width) / sigma, width / sigma) - width.ln()
            }
            Kernel::TruncatedExponential { offset, width, mu } => {
                let rate = mu / width;
                let u = y - offset;
                let (z0, z1) = (u / sigma, (u - width) / sigma);
                let ws = width / sigma;
                // tilted Gaussian peak relative to the support, in noise widths
                let x0 = rate * sigma - z0;
                let x1 = x0 + ws;
                if ws * (x0.abs() + ws) < NARROW_SPREAD {
                    return texp_direct(u, width, mu, sigma);
                }
                let scale = rate.ln() - (-(-mu).exp_m1()).ln();
                // Q(x0) - Q(x1) with Q = phi R, R the Mills ratio, larger term first
                let (a, b) = if x0 >= 0.0 {
                    (-0.5 * z0 * z0 + ln_mills(x0), -mu - 0.5 * z1 * z1 + ln_mills(x1))
                } else if x1 <= 0.0 {
                    (
                        -mu - 0.5 * z1 * z1 + ln_mills(-x1),
                        -0.5 * z0 * z0 + ln_mills(-x0),
                    )
                } else {
                    return scale - rate * u + 0.5 * (rate * sigma).powi(2) + ln_q_span(x0, ws);
                };
                scale - 0.5 * (2.0 * PI).ln() + a + (-(b - a).exp_m1()).ln()
            }
            Kernel::Exponential { offset, mean } => {
                let rate = 1.0 / mean;
                let z = (y - offset) / sigma;
                rate.ln() - 0.5 * z * z - 0.5 * (2.0 * PI).ln() + ln_mills(rate * sigma - z)
            }
        }
    }
}

/// Largest swing of the log integrand across a kernel's support that still counts as narrow.
const NARROW_SPREAD: f64 = 1.0;

/// Smoothed truncated exponential by Gauss–Legendre over the support.
fn texp_direct(u: f64, width: f64, mu: f64, sigma: f64) -> f64 {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    let (x, w) = RULE.get_or_init(|| gauss_legendre_rule(16));
    let rate = mu / width;
    let half = 0.5 * width;
    let mut acc = f64::NEG_INFINITY;
    for (xi, wi) in x.iter().zip(w) {
        let s = half * (1.0 + xi);
        let z = (u - s) / sigma;
        acc = log_add_exp(acc, (half * wi).ln() - rate * s - 0.5 * z * z);
    }
    acc + rate.ln() - (-(-mu).exp_m1()).ln() - (sigma * (2.0 * PI).sqrt()).ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Component {
    /// Mixture weight; may be negative when a law is written as a signed combination.
    pub weight: f64,
    pub kernel: Kernel,
}

/// Density of `X + Z` with `Z ~ N(0, sigma^2)` as a finite mixture of smoothed kernels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureDensity {
    sigma: f64,
    components: Vec<Component>,
}

impl MixtureDensity {
    pub fn new(law: &InputLaw, sigma: f64) -> Result<Self> {
        check_positive("sigma", sigma)?;
        let components = match law {
            InputLaw::Continuous(s) => vec![Component {
                weight: 1.0,
                kernel: Kernel::shifted(*s, 0.0),
            }],
            InputLaw::Discrete(atoms) => atoms
                .atoms()
                .iter()
                .map(|a| Component {
                    weight: a.mass,
                    kernel: Kernel::Point { offset: a.location },
                })
                .collect(),
            InputLaw::Superposed { continuous, atoms } => atoms
                .atoms()
                .iter()
                .filter(|a| a.mass > 0.0)
                .map(|a| Component {
                    weight: a.mass,
                    kernel: Kernel::shifted(*continuous, a.location),
                })
                .collect(),
            InputLaw::ExponentialPair {
                part_mean,
                atom_mass,
                tail_mean,
            } => exponential_pair(*part_mean, *atom_mass, *tail_mean)?,
        };
        Ok(Self { sigma, components })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// Smallest interval holding every kernel's (tail-cut) input support.
    pub fn support(&self) -> (f64, f64) {
        self.components
            .iter()
            .map(|c| c.kernel.span())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (a, b)| {
                (lo.min(a), hi.max(b))
            })
    }

    /// Support widened by `truncation_sigmas` noise deviations on both sides.
    pub fn domain(&self, truncation_sigmas: f64) -> (f64, f64) {
        let (lo, hi) = self.support();
        let pad = truncation_sigmas * self.sigma;
        (lo - pad, hi + pad)
    }

    pub fn pdf(&self, y: f64) -> f64 {
        let p: f64 = self
            .components
            .iter()
            .map(|c| c.weight * c.kernel.ln_density(y, self.sigma).exp())
            .sum();
        p.max(0.0)
    }
}

/// Density of `law + N(0, sigma^2)`.
pub fn density_of_sum(law: &InputLaw, sigma: f64) -> Result<MixtureDensity> {
    MixtureDensity::new(law, sigma)
}

/// `Exp(E1) + (a delta_0 + (1-a) Exp(E2))` written over the two smoothed exponentials.
fn exponential_pair(part_mean: f64, atom_mass: f64, tail_mean: f64) -> Result<Vec<Component>> {
    check_positive("part_mean", part_mean)?;
    check_positive("tail_mean", tail_mean)?;
    if !(0.0..=1.0).contains(&atom_mass) {
        return Err(domain("atom_mass", "must lie in [0, 1]"));
    }
    let head = Kernel::Exponential {
        offset: 0.0,
        mean: part_mean,
    };
    if atom_mass >= 1.0 {
        return Ok(vec![Component {
            weight: 1.0,
            kernel: head,
        }]);
    }
    let tail = Kernel::Exponential {
        offset: 0.0,
        mean: tail_mean,
    };
    let (r1, r2) = (1.0 / part_mean, 1.0 / tail_mean);
    if (r1 - r2).abs() <= 1e-12 * r1 {
        return Err(domain("tail_mean", "must differ from the part mean"));
    }
    let spread = 1.0 - atom_mass;
    let w_head = atom_mass - spread * r2 / (r1 - r2);
    let w_tail = spread * r1 / (r1 - r2);
    let mut out = vec![Component {
        weight: w_tail,
        kernel: tail,
    }];
    if w_head.abs() > 1e-15 {
        out.push(Component {
            weight: w_head,
            kernel: head,
        });
    }
    Ok(out)
}

/// Adds `N(0, sigma^2)` noise to a draw.
pub(crate) fn noisy_draw<R: Rng + ?Sized>(law: &InputLaw, sigma: f64, rng: &mut R) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    law.draw(rng) + sigma * z
}
