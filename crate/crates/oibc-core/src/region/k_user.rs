//! K-user inner, outer and high-SNR regions, plus the hyperplane boundary of the high-SNR region.

use std::f64::consts::{E, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_rho, rho_grid, BoundKind, BoundOptions, BoundaryPoint, Family, RateTuple, RegionBoundary};
use crate::channel::{ChannelConfig, ConstraintKind};
use crate::error::{domain, Result};

const TWO_PI_E: f64 = 2.0 * PI * E;

/// Split counts `N_1..N_{K-1}`; `N_0` is infinite and `N_K = 1` implicitly.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SplitVectorN {
    splits: Vec<u64>,
}

impl SplitVectorN {
    pub fn new(splits: Vec<u64>) -> Result<Self> {
        if splits.is_empty() {
            return Err(domain("splits", "need at least one split count"));
        }
        if splits.contains(&0) {
            return Err(domain("splits", "split counts must be positive"));
        }
        Ok(Self { splits })
    }

    pub fn users(&self) -> usize {
        self.splits.len() + 1
    }

    pub fn splits(&self) -> &[u64] {
        &self.splits
    }

    /// Tail products `P_k = N_k ... N_K` for `k = 0..=K`, with `P_0` infinite.
    pub fn products(&self) -> Vec<f64> {
        let k = self.users();
        let mut p = vec![1.0; k + 1];
        for i in (1..k).rev() {
            p[i] = p[i + 1] * self.splits[i - 1] as f64;
        }
        p[0] = f64::INFINITY;
        p
    }

    /// Power split `rho_k = 1 / P_k` matching this superposition.
    pub fn matched_rho(&self) -> SplitVectorRho {
        let rhos = self.products().iter().map(|p| 1.0 / p).collect();
        SplitVectorRho { rhos }
    }
}

/// Nested power fractions `0 = rho_0 <= rho_1 <= ... <= rho_K = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitVectorRho {
    rhos: Vec<f64>,
}

impl SplitVectorRho {
    pub fn new(rhos: Vec<f64>) -> Result<Self> {
        if rhos.len() < 3 {
            return Err(domain("rho", "need rho_0..rho_K with K >= 2"));
        }
        rhos.iter().try_for_each(|&r| check_rho(r))?;
        if rhos[0] != 0.0 || *rhos.last().unwrap() != 1.0 {
            return Err(domain("rho", "rho_0 must be 0 and rho_K must be 1"));
        }
        if rhos.windows(2).any(|w| w[1] < w[0]) {
            return Err(domain("rho", "fractions must be nondecreasing"));
        }
        Ok(Self { rhos })
    }

    /// Builds the vector from `rho_1..rho_{K-1}`.
    pub fn from_interior(interior: &[f64]) -> Result<Self> {
        let mut rhos = Vec::with_capacity(interior.len() + 2);
        rhos.push(0.0);
        rhos.extend_from_slice(interior);
        rhos.push(1.0);
        Self::new(rhos)
    }

    pub fn users(&self) -> usize {
        self.rhos.len() - 1
    }

    pub fn rhos(&self) -> &[f64] {
        &self.rhos
    }

    pub fn interior(&self) -> &[f64] {
        &self.rhos[1..self.rhos.len() - 1]
    }
}

fn require(cfg: &ChannelConfig, kind: ConstraintKind) -> Result<()> {
    if cfg.constraint().kind() != kind {
        return Err(domain(
            "constraint",
            format!(
                "expected {}, got {}",
                kind.label(),
                cfg.constraint().kind().label()
            ),
        ));
    }
    Ok(())
}

fn check_users(cfg: &ChannelConfig, users: usize) -> Result<()> {
    if users != cfg.users() {
        return Err(domain(
            "splits",
            format!("vector describes {users} users, channel has {}", cfg.users()),
        ));
    }
    Ok(())
}

fn inner_split(
    cfg: &ChannelConfig,
    splits: &[SplitVectorN],
    fam: Family,
) -> Result<Vec<(SplitVectorN, RateTuple)>> {
    splits.iter().try_for_each(|s| check_users(cfg, s.users()))?;
    splits
        .par_iter()
        .map(|s| {
            let p = s.products();
            let rates = (1..=cfg.users())
                .map(|k| {
                    let sigma = cfg.sigma(k - 1);
                    let lead = fam.asym_rate(1.0 / p[k], sigma);
                    let sub = if p[k - 1].is_infinite() {
                        0.0
                    } else {
                        fam.split_cap(1.0 / p[k - 1], sigma)?
                    };
                    Ok((lead - sub).max(0.0))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((s.clone(), rates))
        })
        .collect()
}

/// Superposition rates for uniform splits under a peak constraint.
pub fn k_inner_peak(cfg: &ChannelConfig, splits: &[SplitVectorN]) -> Result<Vec<(SplitVectorN, RateTuple)>> {
    require(cfg, ConstraintKind::Peak)?;
    inner_split(cfg, splits, Family::new(cfg, BoundOptions::default())?)
}

/// Superposition rates for truncated-exponential splits under a joint constraint.
pub fn k_inner_joint(
    cfg: &ChannelConfig,
    splits: &[SplitVectorN],
    opts: BoundOptions,
) -> Result<Vec<(SplitVectorN, RateTuple)>> {
    require(cfg, ConstraintKind::Joint)?;
    inner_split(cfg, splits, Family::new(cfg, opts)?)
}

fn check_rhos(cfg: &ChannelConfig, rhos: &[SplitVectorRho]) -> Result<()> {
    rhos.iter().try_for_each(|r| check_users(cfg, r.users()))
}

/// Superposition rates for exponential splits under a mean constraint.
pub fn k_inner_avg(cfg: &ChannelConfig, rhos: &[SplitVectorRho]) -> Result<Vec<(SplitVectorRho, RateTuple)>> {
    require(cfg, ConstraintKind::Average)?;
    check_rhos(cfg, rhos)?;
    let fam = Family::new(cfg, BoundOptions::default())?;
    rhos.par_iter()
        .map(|r| {
            let rho = r.rhos();
            let rates = (1..=cfg.users())
                .map(|k| {
                    let sigma = cfg.sigma(k - 1);
                    let sub = if k == 1 {
                        0.0
                    } else {
                        fam.split_cap(rho[k - 1], sigma)?
                    };
                    Ok((fam.asym_rate(rho[k], sigma) - sub).max(0.0))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((r.clone(), rates))
        })
        .collect()
}

/// `e^{2 C(rho_k)} - 1` at the weakest receiver, with the index-0 term fixed at zero.
fn outer_powers(fam: &Family, cfg: &ChannelConfig, rho: &[f64]) -> Result<Vec<f64>> {
    let sk = cfg.sigma_max();
    let mut t = Vec::with_capacity(rho.len());
    t.push(0.0);
    for &r in &rho[1..] {
        t.push((2.0 * fam.outer_cap(r, sk)?).exp_m1());
    }
    Ok(t)
}

fn outer_rates(
    cfg: &ChannelConfig,
    rhos: &[SplitVectorRho],
    fam: Family,
) -> Result<Vec<(SplitVectorRho, RateTuple)>> {
    check_rhos(cfg, rhos)?;
    let sk = cfg.sigma_max();
    rhos.par_iter()
        .map(|r| {
            let t = outer_powers(&fam, cfg, r.rhos())?;
            let rates = (1..=cfg.users())
                .map(|k| {
                    let w = (sk / cfg.sigma(k - 1)).powi(2);
                    (0.5 * ((w * t[k]).ln_1p() - (w * t[k - 1]).ln_1p())).max(0.0)
                })
                .collect();
            Ok((r.clone(), rates))
        })
        .collect()
}

/// Outer region from the conditional entropy-power inequality, peak constraint.
pub fn k_outer_peak(
    cfg: &ChannelConfig,
    rhos: &[SplitVectorRho],
) -> Result<Vec<(SplitVectorRho, RateTuple)>> {
    require(cfg, ConstraintKind::Peak)?;
    outer_rates(cfg, rhos, Family::new(cfg, BoundOptions::default())?)
}

/// Outer region from the conditional entropy-power inequality, mean constraint.
pub fn k_outer_avg(cfg: &ChannelConfig, rhos: &[SplitVectorRho]) -> Result<Vec<(SplitVectorRho, RateTuple)>> {
    require(cfg, ConstraintKind::Average)?;
    outer_rates(cfg, rhos, Family::new(cfg, BoundOptions::default())?)
}

/// Outer region from the conditional entropy-power inequality, joint constraint.
pub fn k_outer_joint(
    cfg: &ChannelConfig,
    rhos: &[SplitVectorRho],
    opts: BoundOptions,
) -> Result<Vec<(SplitVectorRho, RateTuple)>> {
    require(cfg, ConstraintKind::Joint)?;
    outer_rates(cfg, rhos, Family::new(cfg, opts)?)
}

fn asymptotic_rates(
    cfg: &ChannelConfig,
    rhos: &[SplitVectorRho],
) -> Result<Vec<(SplitVectorRho, RateTuple)>> {
    check_rhos(cfg, rhos)?;
    let fam = Family::new(cfg, BoundOptions::default())?;
    Ok(rhos
        .par_iter()
        .map(|r| {
            let rho = r.rhos();
            let rates = (1..=cfg.users())
                .map(|k| {
                    let sigma = cfg.sigma(k - 1);
                    let hi = fam.asym_snr(rho[k], sigma).ln_1p();
                    let lo = fam.asym_snr(rho[k - 1], sigma).ln_1p();
                    0.5 * (hi - lo)
                })
                .collect();
            (r.clone(), rates)
        })
        .collect())
}

/// High-SNR region under a peak constraint.
pub fn k_asymptotic_peak(
    cfg: &ChannelConfig,
    rhos: &[SplitVectorRho],
) -> Result<Vec<(SplitVectorRho, RateTuple)>> {
    require(cfg, ConstraintKind::Peak)?;
    asymptotic_rates(cfg, rhos)
}

/// High-SNR region under a mean constraint.
pub fn k_asymptotic_avg(
    cfg: &ChannelConfig,
    rhos: &[SplitVectorRho],
) -> Result<Vec<(SplitVectorRho, RateTuple)>> {
    require(cfg, ConstraintKind::Average)?;
    asymptotic_rates(cfg, rhos)
}

/// High-SNR region under a joint constraint.
pub fn k_asymptotic_joint(
    cfg: &ChannelConfig,
    rhos: &[SplitVectorRho],
) -> Result<Vec<(SplitVectorRho, RateTuple)>> {
    require(cfg, ConstraintKind::Joint)?;
    asymptotic_rates(cfg, rhos)
}

/// Margin by which `rates` sits inside the outer region.
///
/// Chooses the smallest admissible power at each layer and reports the room left for the last
/// user; a negative value means no power split contains the tuple.
pub fn outer_slack(cfg: &ChannelConfig, rates: &[f64], opts: BoundOptions) -> Result<f64> {
    check_users(cfg, rates.len())?;
    let fam = Family::new(cfg, opts)?;
    let k = cfg.users();
    let sk = cfg.sigma_max();
    let floor = (2.0 * fam.outer_cap(0.0, sk)?).exp_m1();
    let top = (2.0 * fam.outer_cap(1.0, sk)?).exp_m1();
    let mut t = 0.0;
    for (i, &r) in rates.iter().take(k - 1).enumerate() {
        let s2 = cfg.sigma(i).powi(2);
        let needed = ((2.0 * r).exp() * (s2 + sk * sk * t) - s2) / (sk * sk);
        t = needed.max(floor);
    }
    Ok(0.5 * (top.ln_1p() - t.ln_1p()) - rates[k - 1])
}

/// `sum_m (sigma_m^2/sigma_K^2)(e^{2R_m} - 1) prod_{n=m+1}^{k} e^{2R_n}` over users `1..=k`.
pub fn inductive_power(sigmas: &[f64], rates: &[f64], k: usize) -> f64 {
    let sk2 = sigmas.last().unwrap().powi(2);
    let mut acc = 0.0;
    for m in 0..k {
        acc = acc * (2.0 * rates[m]).exp() + sigmas[m].powi(2) / sk2 * (2.0 * rates[m]).exp_m1();
    }
    acc
}

/// Last user's rate on the high-SNR peak boundary given the other users' rates.
pub fn hyperplane_last_rate(cfg: &ChannelConfig, prefix: &[f64]) -> Result<f64> {
    require(cfg, ConstraintKind::Peak)?;
    if prefix.len() + 1 != cfg.users() {
        return Err(domain("rates", "expected the first K-1 rates"));
    }
    let a = cfg.constraint().scale();
    let sk = cfg.sigma_max();
    let full = 0.5 * (a * a / (TWO_PI_E * sk * sk)).ln_1p();
    Ok(full - 0.5 * inductive_power(cfg.sigmas(), prefix, prefix.len()).ln_1p())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "value", rename_all = "kebab-case")]
pub enum HyperplaneResidual {
    Residual(f64),
    OutOfRegime,
}

/// Smallest `rho_1` for which the hyperplane characterization is evaluated.
pub const HYPERPLANE_MIN_RHO: f64 = 0.05;

/// Distance of the high-SNR peak sum rate from the strongest user's single-user rate.
///
/// The amplitude is set from `asnr_db` relative to the strongest receiver's noise.
pub fn hyperplane_residual(
    cfg: &ChannelConfig,
    rho: &SplitVectorRho,
    asnr_db: f64,
) -> Result<HyperplaneResidual> {
    require(cfg, ConstraintKind::Peak)?;
    check_users(cfg, rho.users())?;
    if rho.rhos()[1] < HYPERPLANE_MIN_RHO {
        return Ok(HyperplaneResidual::OutOfRegime);
    }
    let a = cfg.sigma(0) * 10f64.powf(asnr_db / 20.0);
    let scaled = ChannelConfig::new(
        cfg.sigmas().to_vec(),
        crate::channel::IntensityConstraint::peak(a)?,
    )?;
    let rates = &asymptotic_rates(&scaled, std::slice::from_ref(rho))?[0].1;
    let sum: f64 = rates.iter().sum();
    let single = 0.5 * (a * a / (TWO_PI_E * cfg.sigma(0).powi(2))).ln_1p();
    Ok(HyperplaneResidual::Residual((sum - single).abs()))
}

/// Default per-user split counts.
pub const DEFAULT_SPLITS: [u64; 5] = [1, 2, 4, 8, 16];

/// Default cap on the product of split counts.
pub const DEFAULT_SPLIT_PRODUCT_CAP: u64 = 1 << 16;

/// Every split vector over `values` per user with product at most `cap`.
pub fn split_grid(users: usize, values: &[u64], cap: u64) -> Result<Vec<SplitVectorN>> {
    if users < 2 {
        return Err(domain("users", "at least two users are required"));
    }
    let mut out = Vec::new();
    let mut current = vec![0usize; users - 1];
    loop {
        let splits: Vec<u64> = current.iter().map(|&i| values[i]).collect();
        let product = splits.iter().try_fold(1u64, |acc, &n| acc.checked_mul(n));
        if product.is_some_and(|p| p <= cap) {
            out.push(SplitVectorN::new(splits)?);
        }
        let mut pos = 0;
        loop {
            if pos == current.len() {
                return Ok(out);
            }
            current[pos] += 1;
            if current[pos] < values.len() {
                break;
            }
            current[pos] = 0;
            pos += 1;
        }
    }
}

/// Every nondecreasing power split whose interior entries lie on a uniform `per_axis` grid.
pub fn rho_vector_grid(users: usize, per_axis: usize) -> Result<Vec<SplitVectorRho>> {
    if users < 2 {
        return Err(domain("users", "at least two users are required"));
    }
    let axis = rho_grid(per_axis);
    let mut out = Vec::new();
    let mut idx = vec![0usize; users - 1];
    loop {
        let interior: Vec<f64> = idx.iter().map(|&i| axis[i]).collect();
        out.push(SplitVectorRho::from_interior(&interior)?);
        // advance to the next nondecreasing index tuple, last coordinate fastest
        let mut pos = idx.len();
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            if idx[pos] + 1 < axis.len() {
                idx[pos] += 1;
                let v = idx[pos];
                for j in idx.iter_mut().skip(pos + 1) {
                    *j = v;
                }
                break;
            }
        }
    }
}

/// Packs K-user results into a serializable boundary; parameters are `1/N_k` for split vectors.
pub fn split_boundary(
    kind: BoundKind,
    constraint: ConstraintKind,
    entries: &[(SplitVectorN, RateTuple)],
) -> RegionBoundary {
    let k = entries.first().map_or(2, |e| e.0.users());
    RegionBoundary {
        kind,
        constraint,
        param_names: (1..k).map(|i| format!("inv_n_{i}")).collect(),
        points: entries
            .iter()
            .map(|(s, r)| BoundaryPoint {
                params: s.splits().iter().map(|&n| 1.0 / n as f64).collect(),
                rates: r.clone(),
            })
            .collect(),
    }
}

/// Packs K-user results into a serializable boundary; parameters are `rho_1..rho_{K-1}`.
pub fn rho_boundary(
    kind: BoundKind,
    constraint: ConstraintKind,
    entries: &[(SplitVectorRho, RateTuple)],
) -> RegionBoundary {
    let k = entries.first().map_or(2, |e| e.0.users());
    RegionBoundary {
        kind,
        constraint,
        param_names: (1..k).map(|i| format!("rho_{i}")).collect(),
        points: entries
            .iter()
            .map(|(r, t)| BoundaryPoint {
                params: r.interior().to_vec(),
                rates: t.clone(),
            })
            .collect(),
    }
}
