//! The invariant suite behind `verify`.

use serde::{Deserialize, Serialize};

use super::entropy::{epi_check, mi_split, monte_carlo_crosscheck, noisy_entropy};
use super::mixture::InputLaw;
use super::quadrature::{gauss_legendre, QuadratureSpec};
use crate::channel::{ChannelConfig, ConstraintKind, IntensityConstraint};
use crate::error::Result;
use crate::region::k_user::{
    hyperplane_last_rate, hyperplane_residual, inductive_power, k_asymptotic_peak, k_inner_avg,
    k_inner_joint, k_inner_peak, k_outer_avg, k_outer_joint, k_outer_peak, outer_slack, rho_vector_grid,
    split_grid, HyperplaneResidual, SplitVectorN, SplitVectorRho, DEFAULT_SPLITS, DEFAULT_SPLIT_PRODUCT_CAP,
};
use crate::region::two_user::{
    asymptotic_avg, asymptotic_joint, asymptotic_peak, boundary_gap, inner_avg, inner_joint, inner_peak,
    inner_split_points, outer_avg, outer_joint, outer_peak, outer_r2_at,
};
use crate::region::{rho_grid, BoundOptions, RegionBoundary};
use crate::scalar::{avg_ub, bpower, peak_ub, solve_mu_star};
use crate::source::{
    decompose_exponential, decompose_texp, decompose_uniform, Decomposition, SecondFactor, SourceSpec,
};
use crate::special::gaussian_entropy;

/// Critical value of the one-sample KS statistic at significance 0.001, times `sqrt(n)`.
pub const KS_CRITICAL_001: f64 = 1.9495;

const KS_SAMPLES: usize = 100_000;
const CONVOLUTION_GRID: usize = 10_000;
const TEXP_ALPHA: f64 = 0.4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Comparison {
    AtLeast,
    AtMost,
    Below,
}

impl Comparison {
    pub fn symbol(self) -> &'static str {
        match self {
            Comparison::AtLeast => ">=",
            Comparison::AtMost => "<=",
            Comparison::Below => "<",
        }
    }

    fn holds(self, measured: f64, threshold: f64) -> bool {
        match self {
            Comparison::AtLeast => measured >= threshold,
            Comparison::AtMost => measured <= threshold,
            Comparison::Below => measured < threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub comparison: Comparison,
    pub threshold: f64,
}

impl CheckResult {
    fn new(name: &str, measured: f64, comparison: Comparison, threshold: f64) -> Self {
        Self {
            name: name.to_owned(),
            passed: comparison.holds(measured, threshold),
            measured,
            comparison,
            threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub channel: ChannelConfig,
    pub n_max: u64,
    pub rho_points: usize,
    pub seed: u64,
    pub opts: BoundOptions,
    pub quadrature: QuadratureSpec,
    pub mc_samples: usize,
}

impl SuiteConfig {
    pub fn new(channel: ChannelConfig) -> Self {
        Self {
            channel,
            n_max: 64,
            rho_points: 128,
            seed: 0,
            opts: BoundOptions::default(),
            quadrature: QuadratureSpec::default(),
            mc_samples: 200_000,
        }
    }
}

fn db(x: f64) -> f64 {
    10f64.powf(x / 20.0)
}

/// The configured constraint rescaled so its amplitude or mean is `snr_db` above `sigma1`.
fn rescaled(c: IntensityConstraint, sigma1: f64, snr_db: f64) -> Result<IntensityConstraint> {
    let s = sigma1 * db(snr_db);
    match c {
        IntensityConstraint::Peak(_) => IntensityConstraint::peak(s),
        IntensityConstraint::Average(_) => IntensityConstraint::average(s),
        IntensityConstraint::Joint(j) => IntensityConstraint::joint(s, j.alpha),
    }
}

fn first_pair(cfg: &ChannelConfig, constraint: IntensityConstraint) -> Result<ChannelConfig> {
    ChannelConfig::two_user(cfg.sigma(0), cfg.sigma(1), constraint)
}

/// Runs every check; numerical failures abort, failed invariants are reported.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<CheckResult>> {
    let mut out = vec![
        mu_star_residual()?,
        single_user_monotone()?,
        convolution_identity()?,
        decomposition_ks(cfg.seed)?,
        boundary_validity(cfg)?,
        inner_within_outer(cfg)?,
    ];
    out.extend(entropy_checks(cfg)?);
    out.push(quadrature_rules_agree(cfg)?);
    out.extend(hyperplane_checks(cfg)?);
    out.push(two_user_reduction(cfg)?);
    out.push(pinch_monotone(cfg)?);
    Ok(out)
}

fn mu_star_residual() -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let alpha = 0.01 + 0.49 * i as f64 / 49.0;
        worst = worst.max(solve_mu_star(alpha)?.residual);
    }
    Ok(CheckResult::new(
        "mu-star-residual",
        worst,
        Comparison::AtMost,
        1e-12,
    ))
}

/// Finite-difference slope of the scaled joint bound in the input fraction.
fn single_user_monotone() -> Result<CheckResult> {
    let mut worst = f64::INFINITY;
    for alpha in [0.1, 0.25, TEXP_ALPHA] {
        let mu = solve_mu_star(alpha)?.value;
        for a in [1e2, 1e3] {
            let h = 0.01;
            let mut prev = bpower(h * a, 1.0, h * mu, false)?;
            for i in 2..=99 {
                let rho = i as f64 * h;
                let cur = bpower(rho * a, 1.0, rho * mu, false)?;
                worst = worst.min((cur - prev) / h);
                prev = cur;
            }
        }
    }
    Ok(CheckResult::new(
        "single-user-monotone",
        worst,
        Comparison::AtLeast,
        -1e-9,
    ))
}

fn tested_decompositions() -> Result<Vec<(SourceSpec, Decomposition)>> {
    let a = 4.0;
    let mut out = Vec::new();
    for n in [1, 2, 3, 4, 8] {
        out.push((SourceSpec::uniform(a)?, decompose_uniform(a, n)?));
    }
    let mu = solve_mu_star(TEXP_ALPHA)?.value;
    for n in [1, 2, 4, 8] {
        out.push((
            SourceSpec::truncated_exponential(a, mu)?,
            decompose_texp(a, mu, n)?,
        ));
    }
    for rho in [0.1, 0.5, 0.9] {
        out.push((SourceSpec::exponential(a)?, decompose_exponential(a, rho * a)?));
    }
    Ok(out)
}

/// Density of `continuous + second` at `x`, with the exponential tail integrated numerically.
fn convolved_density(d: &Decomposition, x: f64) -> f64 {
    match &d.second {
        SecondFactor::Atoms(list) => list
            .atoms()
            .iter()
            .map(|a| a.mass * d.continuous.pdf(x - a.location))
            .sum(),
        SecondFactor::AtomWithTail { atom_mass, tail_mean } => {
            let tail = SourceSpec::Exponential { mean: *tail_mean };
            let f = |s: f64| d.continuous.pdf(s) * tail.pdf(x - s);
            atom_mass * d.continuous.pdf(x) + (1.0 - atom_mass) * gauss_legendre(&f, 0.0, x, x, 64)
        }
    }
}

fn convolution_identity() -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    for (parent, d) in tested_decompositions()? {
        let hi = if parent.upper().is_finite() {
            parent.upper()
        } else {
            10.0 * parent.mean()
        };
        let h = hi / CONVOLUTION_GRID as f64;
        for i in 0..CONVOLUTION_GRID {
            let x = (i as f64 + 0.5) * h;
            worst = worst.max((convolved_density(&d, x) - parent.pdf(x)).abs());
        }
    }
    Ok(CheckResult::new(
        "convolution-identity",
        worst,
        Comparison::AtMost,
        1e-9,
    ))
}

/// Largest KS statistic over the tested decompositions, scaled by `sqrt(n)`.
fn decomposition_ks(seed: u64) -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    for (i, (parent, d)) in tested_decompositions()?.into_iter().enumerate() {
        let mut s = d.sample_sum(KS_SAMPLES, seed.wrapping_add(i as u64));
        s.sort_by(f64::total_cmp);
        let n = s.len() as f64;
        let mut dmax: f64 = 0.0;
        for (j, &x) in s.iter().enumerate() {
            let f = parent.cdf(x);
            dmax = dmax.max((j as f64 + 1.0) / n - f).max(f - j as f64 / n);
        }
        worst = worst.max(dmax * n.sqrt());
    }
    Ok(CheckResult::new(
        "decomposition-ks",
        worst,
        Comparison::AtMost,
        KS_CRITICAL_001,
    ))
}

fn two_user_boundaries(cfg: &ChannelConfig, s: &SuiteConfig) -> Result<Vec<RegionBoundary>> {
    let grid = rho_grid(s.rho_points);
    Ok(match cfg.constraint().kind() {
        ConstraintKind::Peak => vec![
            inner_peak(cfg, s.n_max)?,
            outer_peak(cfg, &grid)?,
            asymptotic_peak(cfg, &grid)?,
        ],
        ConstraintKind::Average => vec![
            inner_avg(cfg, &grid)?,
            outer_avg(cfg, &grid)?,
            asymptotic_avg(cfg, &grid)?,
        ],
        ConstraintKind::Joint => vec![
            inner_joint(cfg, s.n_max, s.opts)?,
            outer_joint(cfg, &grid, s.opts)?,
            asymptotic_joint(cfg, &grid)?,
        ],
    })
}

fn k_inner_cloud(cfg: &ChannelConfig, s: &SuiteConfig) -> Result<Vec<Vec<f64>>> {
    let k = cfg.users();
    Ok(match cfg.constraint().kind() {
        ConstraintKind::Average => {
            let grid = rho_vector_grid(k, per_axis(k, s.rho_points))?;
            k_inner_avg(cfg, &grid)?.into_iter().map(|e| e.1).collect()
        }
        kind => {
            let splits = split_grid(k, &DEFAULT_SPLITS, DEFAULT_SPLIT_PRODUCT_CAP)?;
            let inner = if kind == ConstraintKind::Peak {
                k_inner_peak(cfg, &splits)?
            } else {
                k_inner_joint(cfg, &splits, s.opts)?
            };
            inner.into_iter().map(|e| e.1).collect()
        }
    })
}

/// Grid points per interior axis for K-user power splits.
pub fn per_axis(users: usize, rho_points: usize) -> usize {
    if users <= 2 {
        rho_points
    } else {
        rho_points.clamp(2, 33)
    }
}

fn boundary_validity(s: &SuiteConfig) -> Result<CheckResult> {
    let cfg = &s.channel;
    let invalid = if cfg.users() == 2 {
        two_user_boundaries(cfg, s)?
            .iter()
            .filter(|b| b.validate().is_err())
            .count()
    } else {
        k_inner_cloud(cfg, s)?
            .iter()
            .filter(|r| r.iter().any(|v| !v.is_finite() || *v < 0.0))
            .count()
    };
    Ok(CheckResult::new(
        "boundary-validity",
        invalid as f64,
        Comparison::AtMost,
        0.0,
    ))
}

fn inner_within_outer(s: &SuiteConfig) -> Result<CheckResult> {
    let cfg = &s.channel;
    let mut worst = f64::INFINITY;
    if cfg.users() == 2 {
        let inner = &two_user_boundaries(cfg, s)?[0];
        for p in &inner.points {
            worst = worst.min(outer_r2_at(cfg, p.rates[0], s.opts)? - p.rates[1]);
        }
    } else {
        for rates in k_inner_cloud(cfg, s)? {
            worst = worst.min(outer_slack(cfg, &rates, s.opts)?);
        }
    }
    Ok(CheckResult::new(
        "inner-within-outer",
        worst,
        Comparison::AtLeast,
        -1e-9,
    ))
}

/// Parent law, its decomposition and the inner-bound rates at one split.
struct Certificate {
    parent: SourceSpec,
    split: Decomposition,
    rates: [f64; 2],
    cap_part: f64,
    cap_parent: f64,
}

fn certificates(cfg: &ChannelConfig, s: &SuiteConfig) -> Result<Vec<Certificate>> {
    let (s1, s2) = (cfg.sigma(0), cfg.sigma(1));
    let c = cfg.constraint();
    let scale = c.scale();
    let mut out = Vec::new();
    match c {
        IntensityConstraint::Average(_) => {
            let parent = SourceSpec::exponential(scale)?;
            let grid = [0.1, 0.5, 0.9];
            let inner = inner_avg(cfg, &grid)?;
            for p in &inner.points {
                let rho = p.params[0];
                out.push(Certificate {
                    parent,
                    split: decompose_exponential(scale, rho * scale)?,
                    rates: [p.rates[0], p.rates[1]],
                    cap_part: avg_ub(rho * scale, s1),
                    cap_parent: avg_ub(scale, s2),
                });
            }
        }
        _ => {
            let mu = match c {
                IntensityConstraint::Joint(j) => j.mu_star()?.value,
                _ => 0.0,
            };
            let parent = SourceSpec::joint_input(scale, mu)?;
            let pts = inner_split_points(cfg, 8, s.opts)?;
            for n in [1u64, 2, 4, 8] {
                let split = if mu == 0.0 {
                    decompose_uniform(scale, n)?
                } else {
                    decompose_texp(scale, mu, n)?
                };
                let part = scale / n as f64;
                let cap = |a: f64, sigma: f64, m: f64| -> Result<f64> {
                    if m == 0.0 {
                        Ok(peak_ub(a, sigma))
                    } else {
                        bpower(a, sigma, m, false)
                    }
                };
                out.push(Certificate {
                    parent,
                    split,
                    rates: pts[n as usize - 1].rates,
                    cap_part: cap(part, s1, mu / n as f64)?,
                    cap_parent: cap(scale, s2, mu)?,
                });
            }
        }
    }
    Ok(out)
}

/// Mutual-information certificates, EPI slacks, the output-entropy sandwich and Monte Carlo.
fn entropy_checks(s: &SuiteConfig) -> Result<Vec<CheckResult>> {
    let cfg = first_pair(&s.channel, s.channel.constraint())?;
    let (s1, s2) = (cfg.sigma(0), cfg.sigma(1));
    let q = &s.quadrature;
    let mut mi_margin = f64::INFINITY;
    let mut epi_margin = f64::INFINITY;
    let mut sandwich = f64::INFINITY;
    for c in certificates(&cfg, s)? {
        let [i1, i2] = mi_split(&c.split, s1, s2, q)?;
        mi_margin = mi_margin.min(i1 - c.rates[0]).min(i2 - c.rates[1]);

        let part = InputLaw::Continuous(c.split.continuous);
        let h_part = noisy_entropy(&part, s1, q)?;
        let h_parent = noisy_entropy(&InputLaw::Continuous(c.parent), s2, q)?;
        let e1 = epi_check(
            h_part,
            &[c.split.continuous.differential_entropy(), gaussian_entropy(s1)],
        )?;
        let e2 = epi_check(h_parent, &[c.parent.differential_entropy(), gaussian_entropy(s2)])?;
        epi_margin = epi_margin.min(e1.slack).min(e2.slack);

        let (g1, g2) = (gaussian_entropy(s1), gaussian_entropy(s2));
        sandwich = sandwich
            .min(h_part - g1)
            .min(g1 + c.cap_part - h_part)
            .min(h_parent - g2)
            .min(g2 + c.cap_parent - h_parent);
    }

    let parent = InputLaw::Continuous(match cfg.constraint() {
        IntensityConstraint::Average(e) => SourceSpec::exponential(e.mean)?,
        c => SourceSpec::joint_input(
            c.scale(),
            match c {
                IntensityConstraint::Joint(j) => j.mu_star()?.value,
                _ => 0.0,
            },
        )?,
    });
    let mc = monte_carlo_crosscheck(&parent, s1, s.mc_samples, s.seed, q)?;
    let mc_ratio = (mc.estimate - mc.quadrature).abs() / mc.half_width;

    Ok(vec![
        CheckResult::new("mi-certificate", mi_margin, Comparison::AtLeast, -1e-6),
        CheckResult::new("epi-slack", epi_margin, Comparison::AtLeast, -1e-9),
        CheckResult::new("output-entropy-sandwich", sandwich, Comparison::AtLeast, -1e-6),
        CheckResult::new("monte-carlo-agreement", mc_ratio, Comparison::AtMost, 1.0),
    ])
}

fn quadrature_rules_agree(s: &SuiteConfig) -> Result<CheckResult> {
    let law = InputLaw::Continuous(SourceSpec::uniform(s.channel.constraint().scale())?);
    let sigma = s.channel.sigma(0);
    let a = noisy_entropy(&law, sigma, &s.quadrature)?;
    let b = noisy_entropy(&law, sigma, &QuadratureSpec::gauss_legendre())?;
    Ok(CheckResult::new(
        "quadrature-rules-agree",
        (a - b).abs(),
        Comparison::AtMost,
        1e-8,
    ))
}

fn peak_three_user(s: &SuiteConfig, amplitude: f64) -> Result<ChannelConfig> {
    let sigmas = if s.channel.users() >= 3 {
        s.channel.sigmas().to_vec()
    } else {
        vec![1.0, 2.0, 4.0]
    };
    let a = sigmas[0] * amplitude;
    ChannelConfig::new(sigmas, IntensityConstraint::peak(a)?)
}

/// Recursion of the outer powers, hyperplane sum rate and its unit slopes.
fn hyperplane_checks(s: &SuiteConfig) -> Result<Vec<CheckResult>> {
    let cfg60 = peak_three_user(s, db(60.0))?;
    let k = cfg60.users();
    let sk = cfg60.sigma_max();
    let a60 = cfg60.constraint().scale();
    let grid = rho_vector_grid(k, 11)?;
    let mut rec_err: f64 = 0.0;
    for (r, rates) in k_outer_peak(&cfg60, &grid)? {
        for j in 1..k {
            let t = (2.0 * peak_ub(r.rhos()[j] * a60, sk)).exp_m1();
            if t > 0.0 {
                let ind = inductive_power(cfg60.sigmas(), &rates, j);
                rec_err = rec_err.max((ind - t).abs() / t);
            }
        }
    }

    let cfg80 = peak_three_user(s, db(80.0))?;
    let axis: Vec<f64> = (0..=18).map(|i| 0.1 + 0.05 * i as f64).collect();
    let mut interior = Vec::new();
    for (i, &x) in axis.iter().enumerate() {
        let mut v = vec![x];
        let mut tail = axis[i..].iter().copied();
        for _ in 2..k {
            v.push(tail.next().unwrap_or(1.0));
        }
        interior.push(SplitVectorRho::from_interior(&v)?);
    }
    let mut sum_err: f64 = 0.0;
    for r in &interior {
        if let HyperplaneResidual::Residual(v) = hyperplane_residual(&cfg80, r, 80.0)? {
            sum_err = sum_err.max(v);
        }
    }

    let mut slope_err: f64 = 0.0;
    let h = 1e-4;
    for (_, rates) in k_asymptotic_peak(&cfg80, &interior)? {
        let prefix = &rates[..k - 1];
        let base = hyperplane_last_rate(&cfg80, prefix)?;
        for j in 0..k - 1 {
            let mut bumped = prefix.to_vec();
            bumped[j] += h;
            let slope = (hyperplane_last_rate(&cfg80, &bumped)? - base) / h;
            slope_err = slope_err.max((slope + 1.0).abs());
        }
    }
    Ok(vec![
        CheckResult::new("outer-power-recursion", rec_err, Comparison::AtMost, 1e-6),
        CheckResult::new("hyperplane-sum-rate", sum_err, Comparison::AtMost, 0.02),
        CheckResult::new("hyperplane-slope", slope_err, Comparison::AtMost, 0.02),
    ])
}

/// K-user operations at two users against the two-user module.
fn two_user_reduction(s: &SuiteConfig) -> Result<CheckResult> {
    let cfg = first_pair(&s.channel, s.channel.constraint())?;
    let grid = rho_grid(s.rho_points.min(65));
    let rhos: Vec<SplitVectorRho> = grid
        .iter()
        .map(|&r| SplitVectorRho::from_interior(&[r]))
        .collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    let mut compare = |a: &[f64], b: &[f64]| {
        for (x, y) in a.iter().zip(b) {
            worst = worst.max((x - y).abs());
        }
    };
    let by_param = |b: &RegionBoundary, rho: f64| -> Vec<f64> {
        b.points
            .iter()
            .find(|p| p.params[0] == rho)
            .map_or_else(Vec::new, |p| p.rates.clone())
    };
    match cfg.constraint().kind() {
        ConstraintKind::Average => {
            let inner = inner_avg(&cfg, &grid)?;
            let outer = outer_avg(&cfg, &grid)?;
            for (r, rates) in k_inner_avg(&cfg, &rhos)? {
                compare(&rates, &by_param(&inner, r.rhos()[1]));
            }
            for (r, rates) in k_outer_avg(&cfg, &rhos)? {
                compare(&rates, &by_param(&outer, r.rhos()[1]));
            }
        }
        kind => {
            let pts = inner_split_points(&cfg, s.n_max, s.opts)?;
            let splits: Vec<SplitVectorN> = (1..=s.n_max)
                .map(|n| SplitVectorN::new(vec![n]))
                .collect::<Result<_>>()?;
            let (inner, outer) = if kind == ConstraintKind::Peak {
                (k_inner_peak(&cfg, &splits)?, k_outer_peak(&cfg, &rhos)?)
            } else {
                (
                    k_inner_joint(&cfg, &splits, s.opts)?,
                    k_outer_joint(&cfg, &rhos, s.opts)?,
                )
            };
            let outer_two = if kind == ConstraintKind::Peak {
                outer_peak(&cfg, &grid)?
            } else {
                outer_joint(&cfg, &grid, s.opts)?
            };
            for ((_, rates), p) in inner.iter().zip(&pts) {
                compare(rates, &p.rates);
            }
            for (r, rates) in outer {
                compare(&rates, &by_param(&outer_two, r.rhos()[1]));
            }
        }
    }
    Ok(CheckResult::new(
        "two-user-reduction",
        worst,
        Comparison::AtMost,
        1e-12,
    ))
}

/// Largest inner-to-outer gap at 60 dB minus the gap at 30 dB.
fn pinch_monotone(s: &SuiteConfig) -> Result<CheckResult> {
    let base = &s.channel;
    let gap = |snr: f64| -> Result<f64> {
        let cfg = first_pair(base, rescaled(base.constraint(), base.sigma(0), snr)?)?;
        let inner = &two_user_boundaries(&cfg, s)?[0];
        Ok(boundary_gap(&cfg, inner, s.opts)?.max_vertical)
    };
    Ok(CheckResult::new(
        "pinch-monotone",
        gap(60.0)? - gap(30.0)?,
        Comparison::Below,
        0.0,
    ))
}
