//! Maximum-entropy input laws and their two-factor decompositions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_positive, domain, Result};
use crate::scalar::mean_ratio;

/// Maximum-entropy input law under a peak, mean, or joint constraint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum SourceSpec {
    Uniform { amplitude: f64 },
    Exponential { mean: f64 },
    TruncatedExponential { amplitude: f64, mu: f64 },
}

/// The continuous factor of a decomposition.
pub type ContinuousPart = SourceSpec;

impl SourceSpec {
    pub fn uniform(amplitude: f64) -> Result<Self> {
        check_positive("amplitude", amplitude)?;
        Ok(Self::Uniform { amplitude })
    }

    pub fn exponential(mean: f64) -> Result<Self> {
        check_positive("mean", mean)?;
        Ok(Self::Exponential { mean })
    }

    pub fn truncated_exponential(amplitude: f64, mu: f64) -> Result<Self> {
        check_positive("amplitude", amplitude)?;
        check_positive("mu", mu)?;
        Ok(Self::TruncatedExponential { amplitude, mu })
    }

    /// Truncated exponential, or uniform for the `mu = 0` sentinel.
    pub fn joint_input(amplitude: f64, mu: f64) -> Result<Self> {
        if mu == 0.0 {
            Self::uniform(amplitude)
        } else {
            Self::truncated_exponential(amplitude, mu)
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::Uniform { amplitude } => 0.5 * amplitude,
            Self::Exponential { mean } => mean,
            Self::TruncatedExponential { amplitude, mu } => amplitude * mean_ratio(mu),
        }
    }

    /// Upper end of the support; infinite for the exponential law.
    pub fn upper(&self) -> f64 {
        match *self {
            Self::Uniform { amplitude } | Self::TruncatedExponential { amplitude, .. } => amplitude,
            Self::Exponential { .. } => f64::INFINITY,
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 || x > self.upper() {
            return 0.0;
        }
        match *self {
            Self::Uniform { amplitude } => 1.0 / amplitude,
            Self::Exponential { mean } => (-x / mean).exp() / mean,
            Self::TruncatedExponential { amplitude, mu } => {
                mu / amplitude * (-mu * x / amplitude).exp() / -(-mu).exp_m1()
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= self.upper() {
            return 1.0;
        }
        match *self {
            Self::Uniform { amplitude } => x / amplitude,
            Self::Exponential { mean } => -(-x / mean).exp_m1(),
            Self::TruncatedExponential { amplitude, mu } => (-mu * x / amplitude).exp_m1() / (-mu).exp_m1(),
        }
    }

    pub fn inverse_cdf(&self, u: f64) -> f64 {
        match *self {
            Self::Uniform { amplitude } => u * amplitude,
            Self::Exponential { mean } => -mean * (-u).ln_1p(),
            Self::TruncatedExponential { amplitude, mu } => -amplitude / mu * (u * (-mu).exp_m1()).ln_1p(),
        }
    }

    pub fn differential_entropy(&self) -> f64 {
        differential_entropy(self)
    }
}

/// Closed-form differential entropy in nats.
pub fn differential_entropy(spec: &SourceSpec) -> f64 {
    match *spec {
        SourceSpec::Uniform { amplitude } => amplitude.ln(),
        SourceSpec::Exponential { mean } => 1.0 + mean.ln(),
        SourceSpec::TruncatedExponential { amplitude, mu } => {
            (amplitude * -(-mu).exp_m1() / mu).ln() + mu * mean_ratio(mu)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub location: f64,
    pub mass: f64,
}

/// A discrete law with finitely many point masses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomList {
    atoms: Vec<Atom>,
}

impl AtomList {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(domain("atoms", "at least one atom is required"));
        }
        for a in &atoms {
            if !(a.location.is_finite() && a.location >= 0.0) {
                return Err(domain("atoms", format!("bad location {}", a.location)));
            }
            if !(a.mass.is_finite() && a.mass >= 0.0) {
                return Err(domain("atoms", format!("bad mass {}", a.mass)));
            }
        }
        if atoms.windows(2).any(|w| w[1].location <= w[0].location) {
            return Err(domain("atoms", "locations must be strictly increasing"));
        }
        let total: f64 = atoms.iter().map(|a| a.mass).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(domain("atoms", format!("masses sum to {total}")));
        }
        Ok(Self { atoms })
    }

    pub fn unit_at_zero() -> Self {
        Self {
            atoms: vec![Atom {
                location: 0.0,
                mass: 1.0,
            }],
        }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|a| a.location * a.mass).sum()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.atoms
            .iter()
            .take_while(|a| a.location <= x)
            .map(|a| a.mass)
            .sum()
    }
}

/// Second factor of a decomposition: atoms only, or an atom at zero plus an exponential tail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum SecondFactor {
    Atoms(AtomList),
    AtomWithTail { atom_mass: f64, tail_mean: f64 },
}

impl SecondFactor {
    pub fn mean(&self) -> f64 {
        match self {
            Self::Atoms(list) => list.mean(),
            Self::AtomWithTail { atom_mass, tail_mean } => (1.0 - atom_mass) * tail_mean,
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Self::Atoms(list) => list.cdf(x),
            Self::AtomWithTail { atom_mass, tail_mean } => {
                if x < 0.0 {
                    0.0
                } else {
                    atom_mass + (1.0 - atom_mass) * -(-x / tail_mean).exp_m1()
                }
            }
        }
    }
}

/// A parent law written as the independent sum `continuous + second`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub continuous: ContinuousPart,
    pub second: SecondFactor,
}

impl Decomposition {
    pub fn mean(&self) -> f64 {
        self.continuous.mean() + self.second.mean()
    }

    /// Draws `n` samples of the sum of both factors.
    pub fn sample_sum(&self, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| self.continuous.draw(&mut rng) + self.second.draw(&mut rng))
            .collect()
    }
}

fn check_split(n: u64) -> Result<()> {
    if n == 0 {
        Err(domain("N", "split count must be at least 1"))
    } else {
        Ok(())
    }
}

/// `U[0, A] = U[0, A/N] + uniform atoms on {0, A/N, ..., (N-1)A/N}`.
pub fn decompose_uniform(amplitude: f64, n: u64) -> Result<Decomposition> {
    check_positive("amplitude", amplitude)?;
    check_split(n)?;
    let step = amplitude / n as f64;
    let atoms = (0..n)
        .map(|i| Atom {
            location: i as f64 * step,
            mass: 1.0 / n as f64,
        })
        .collect();
    Ok(Decomposition {
        continuous: SourceSpec::Uniform { amplitude: step },
        second: SecondFactor::Atoms(AtomList::new(atoms)?),
    })
}

/// `Exp(E) = Exp(E1) + (atom at 0 with mass E1/E, else Exp(E))`.
pub fn decompose_exponential(mean: f64, part_mean: f64) -> Result<Decomposition> {
    check_positive("mean", mean)?;
    check_positive("part_mean", part_mean)?;
    if part_mean > mean {
        return Err(domain("part_mean", "must not exceed the parent mean"));
    }
    let second = if part_mean == mean {
        SecondFactor::Atoms(AtomList::unit_at_zero())
    } else {
        SecondFactor::AtomWithTail {
            atom_mass: part_mean / mean,
            tail_mean: mean,
        }
    };
    Ok(Decomposition {
        continuous: SourceSpec::Exponential { mean: part_mean },
        second,
    })
}

/// `TExp(A, mu) = TExp(A/N, mu/N) + geometric atoms on {0, A/N, ..., (N-1)A/N}`.
pub fn decompose_texp(amplitude: f64, mu: f64, n: u64) -> Result<Decomposition> {
    check_positive("amplitude", amplitude)?;
    check_positive("mu", mu)?;
    check_split(n)?;
    let nf = n as f64;
    let step = amplitude / nf;
    let head = (-mu / nf).exp_m1() / (-mu).exp_m1();
    let atoms = (0..n)
        .map(|i| Atom {
            location: i as f64 * step,
            mass: head * (-mu * i as f64 / nf).exp(),
        })
        .collect();
    Ok(Decomposition {
        continuous: SourceSpec::TruncatedExponential {
            amplitude: step,
            mu: mu / nf,
        },
        second: SecondFactor::Atoms(AtomList::new(atoms)?),
    })
}

/// Seeded inversion sampling.
pub trait Sample {
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64;

    fn sample(&self, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| self.draw(&mut rng)).collect()
    }
}

impl Sample for SourceSpec {
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.inverse_cdf(rng.random::<f64>())
    }
}

impl Sample for AtomList {
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for a in &self.atoms {
            acc += a.mass;
            if u < acc {
                return a.location;
            }
        }
        self.atoms.last().unwrap().location
    }
}

impl Sample for SecondFactor {
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Atoms(list) => list.draw(rng),
            Self::AtomWithTail { atom_mass, tail_mean } => {
                let u: f64 = rng.random();
                if u < *atom_mass {
                    0.0
                } else {
                    -tail_mean * (-rng.random::<f64>()).ln_1p()
                }
            }
        }
    }
}
