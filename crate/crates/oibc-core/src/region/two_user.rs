//! Two-user inner, outer and high-SNR regions.

use std::f64::consts::{E, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::hull::{sample_hull, upper_right_hull, TaggedPair, SEGMENT_SAMPLES};
use super::{check_rho, BoundKind, BoundOptions, BoundaryPoint, Family, RatePair, RegionBoundary};
use crate::channel::{ChannelConfig, ConstraintKind};
use crate::error::{domain, Result};
use crate::scalar::{peak_asym, scaled_power_gain};

const TWO_PI_E: f64 = 2.0 * PI * E;

fn require(cfg: &ChannelConfig, kind: ConstraintKind) -> Result<()> {
    if cfg.users() != 2 {
        return Err(domain("users", format!("expected 2 users, got {}", cfg.users())));
    }
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

fn check_grid(grid: &[f64]) -> Result<()> {
    grid.iter().try_for_each(|&r| check_rho(r))
}

fn rho_boundary(
    kind: BoundKind,
    constraint: ConstraintKind,
    grid: &[f64],
    f: impl Fn(f64) -> Result<RatePair> + Sync,
) -> Result<RegionBoundary> {
    check_grid(grid)?;
    let mut points = grid
        .par_iter()
        .map(|&rho| {
            f(rho).map(|r| BoundaryPoint {
                params: vec![rho],
                rates: r.to_vec(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    points.sort_by(|p, q| p.rates[0].total_cmp(&q.rates[0]));
    Ok(RegionBoundary {
        kind,
        constraint,
        param_names: vec!["rho".into()],
        points,
    })
}

/// Superposition point for split count `n`; `n = inf` gives the single-user corner of user 2.
fn split_pair(fam: &Family, cfg: &ChannelConfig, n: f64) -> Result<RatePair> {
    let (s1, s2) = (cfg.sigma(0), cfg.sigma(1));
    let a = fam.scale;
    if n.is_infinite() {
        return Ok([0.0, fam.asym_rate(1.0, s2)]);
    }
    let (r1, lead) = match fam.kind() {
        ConstraintKind::Peak => {
            let r = a / (n * s1);
            (0.5 * (r * r / TWO_PI_E).ln_1p(), peak_asym(a, s2))
        }
        ConstraintKind::Joint => {
            let r = a / s1;
            let gain = scaled_power_gain(1.0 / n, fam.mu);
            (0.5 * (gain * r * r / TWO_PI_E).ln_1p(), fam.asym_rate(1.0, s2))
        }
        ConstraintKind::Average => unreachable!("average inner bound is rho-parameterized"),
    };
    let r2 = (lead - fam.split_cap(1.0 / n, s2)?).max(0.0);
    Ok([r1, r2])
}

/// Raw superposition points for `N = 1..=n_max` tagged with `1/N`.
pub fn inner_split_points(cfg: &ChannelConfig, n_max: u64, opts: BoundOptions) -> Result<Vec<TaggedPair>> {
    if n_max == 0 {
        return Err(domain("n_max", "must be at least 1"));
    }
    let fam = Family::new(cfg, opts)?;
    if fam.kind() == ConstraintKind::Average {
        return Err(domain(
            "constraint",
            "split points need a peak or joint constraint",
        ));
    }
    (1..=n_max)
        .into_par_iter()
        .map(|n| {
            split_pair(&fam, cfg, n as f64).map(|rates| TaggedPair {
                tag: 1.0 / n as f64,
                rates,
            })
        })
        .collect()
}

fn inner_hull(cfg: &ChannelConfig, n_max: u64, opts: BoundOptions) -> Result<RegionBoundary> {
    let fam = Family::new(cfg, opts)?;
    let mut pts = inner_split_points(cfg, n_max, opts)?;
    pts.push(TaggedPair {
        tag: 0.0,
        rates: split_pair(&fam, cfg, f64::INFINITY)?,
    });
    let vertices = upper_right_hull(&pts);
    Ok(RegionBoundary {
        kind: BoundKind::Inner,
        constraint: fam.kind(),
        param_names: vec!["inv_n_left".into(), "inv_n_right".into(), "lambda".into()],
        points: sample_hull(&vertices, SEGMENT_SAMPLES),
    })
}

/// Convex hull of the uniform-split superposition points under a peak constraint.
pub fn inner_peak(cfg: &ChannelConfig, n_max: u64) -> Result<RegionBoundary> {
    require(cfg, ConstraintKind::Peak)?;
    inner_hull(cfg, n_max, BoundOptions::default())
}

/// Convex hull of the truncated-exponential superposition points under a joint constraint.
pub fn inner_joint(cfg: &ChannelConfig, n_max: u64, opts: BoundOptions) -> Result<RegionBoundary> {
    require(cfg, ConstraintKind::Joint)?;
    inner_hull(cfg, n_max, opts)
}

/// Superposition rates for the exponential input split at mean fraction `rho`.
pub fn inner_avg(cfg: &ChannelConfig, grid: &[f64]) -> Result<RegionBoundary> {
    require(cfg, ConstraintKind::Average)?;
    let fam = Family::new(cfg, BoundOptions::default())?;
    let (s1, s2) = (cfg.sigma(0), cfg.sigma(1));
    let e = fam.scale;
    rho_boundary(BoundKind::Inner, fam.kind(), grid, |rho| {
        let r1 = 0.5 * (E * (rho * e / s1).powi(2) / (2.0 * PI)).ln_1p();
        let lead = 0.5 * (E * (e / s2).powi(2) / (2.0 * PI)).ln_1p();
        Ok([r1, (lead - fam.split_cap(rho, s2)?).max(0.0)])
    })
}

fn outer(cfg: &ChannelConfig, grid: &[f64], opts: BoundOptions) -> Result<RegionBoundary> {
    let fam = Family::new(cfg, opts)?;
    let (s1, s2) = (cfg.sigma(0), cfg.sigma(1));
    let full = fam.outer_cap(1.0, s2)?;
    rho_boundary(BoundKind::Outer, fam.kind(), grid, |rho| {
        let c = fam.outer_cap(rho, s2)?;
        let r1 = 0.5 * ((s2 / s1).powi(2) * (2.0 * c).exp_m1()).ln_1p();
        Ok([r1, (full - c).max(0.0)])
    })
}

/// Outer region from the conditional entropy-power inequality, peak constraint.
pub fn outer_peak(cfg: &ChannelConfig, grid: &[f64]) -> Result<RegionBoundary> {
    require(cfg, ConstraintKind::Peak)?;
    outer(cfg, grid, BoundOptions::default())
}

/// Outer region from the conditional entropy-power inequality, mean constraint.
pub fn outer_avg(cfg: &ChannelConfig, grid: &[f64]) -> Result<RegionBoundary> {
    require(cfg, ConstraintKind::Average)?;
    outer(cfg, grid, BoundOptions::default())
}

/// Outer region from the conditional entropy-power inequality, joint constraint.
pub fn outer_joint(cfg: &ChannelConfig, grid: &[f64], opts: BoundOptions) -> Result<RegionBoundary> {
    require(cfg, ConstraintKind::Joint)?;
    outer(cfg, grid, opts)
}

/// High-SNR region under a peak constraint.
pub fn asymptotic_peak(cfg: &ChannelConfig, grid: &[f64]) -> Result<RegionBoundary> {
    require(cfg, ConstraintKind::Peak)?;
    let (s1, s2) = (cfg.sigma(0), cfg.sigma(1));
    let a = cfg.constraint().scale();
    rho_boundary(BoundKind::Asymptotic, ConstraintKind::Peak, grid, |rho| {
        let p = (rho * a).powi(2);
        let r1 = 0.5 * (p / (TWO_PI_E * s1 * s1)).ln_1p();
        let r2 = 0.5 * ((1.0 - rho * rho) * a * a / (p + TWO_PI_E * s2 * s2)).ln_1p();
        Ok([r1, r2])
    })
}

/// High-SNR region under a mean constraint.
pub fn asymptotic_avg(cfg: &ChannelConfig, grid: &[f64]) -> Result<RegionBoundary> {
    require(cfg, ConstraintKind::Average)?;
    let (s1, s2) = (cfg.sigma(0), cfg.sigma(1));
    let e = cfg.constraint().scale();
    rho_boundary(BoundKind::Asymptotic, ConstraintKind::Average, grid, |rho| {
        let p = E * (rho * e).powi(2);
        let r1 = 0.5 * (p / (2.0 * PI * s1 * s1)).ln_1p();
        let r2 = 0.5 * (E * (1.0 - rho * rho) * e * e / (p + 2.0 * PI * s2 * s2)).ln_1p();
        Ok([r1, r2])
    })
}

/// High-SNR region under a joint constraint.
pub fn asymptotic_joint(cfg: &ChannelConfig, grid: &[f64]) -> Result<RegionBoundary> {
    require(cfg, ConstraintKind::Joint)?;
    let fam = Family::new(cfg, BoundOptions::default())?;
    let (s1, s2) = (cfg.sigma(0), cfg.sigma(1));
    let a2 = fam.scale * fam.scale;
    let full = scaled_power_gain(1.0, fam.mu) * a2 + TWO_PI_E * s2 * s2;
    rho_boundary(BoundKind::Asymptotic, ConstraintKind::Joint, grid, |rho| {
        let g = scaled_power_gain(rho, fam.mu) * a2;
        let r1 = 0.5 * (g / (TWO_PI_E * s1 * s1)).ln_1p();
        let r2 = 0.5 * (full / (g + TWO_PI_E * s2 * s2)).ln();
        Ok([r1, r2])
    })
}

/// Largest R2 the outer region allows at `r1`; negative when `r1` lies beyond the region.
pub fn outer_r2_at(cfg: &ChannelConfig, r1: f64, opts: BoundOptions) -> Result<f64> {
    if cfg.users() != 2 {
        return Err(domain("users", "expected 2 users"));
    }
    let fam = Family::new(cfg, opts)?;
    let (s1, s2) = (cfg.sigma(0), cfg.sigma(1));
    let floor = (2.0 * fam.outer_cap(0.0, s2)?).exp_m1();
    let top = (2.0 * fam.outer_cap(1.0, s2)?).exp_m1();
    let needed = ((s1 / s2).powi(2) * (2.0 * r1).exp_m1()).max(floor);
    Ok(0.5 * (top.ln_1p() - needed.ln_1p()))
}

/// Distance between an inner boundary and the outer region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapMetrics {
    /// Largest outer-minus-inner R2 over the inner boundary points.
    pub max_vertical: f64,
    /// `1 - area(inner) / area(outer)`.
    pub relative_area: f64,
}

const AREA_PANELS: usize = 20_000;

/// Gap metrics between `inner` and the exact outer region of `cfg`.
pub fn boundary_gap(cfg: &ChannelConfig, inner: &RegionBoundary, opts: BoundOptions) -> Result<GapMetrics> {
    let fam = Family::new(cfg, opts)?;
    let (s1, s2) = (cfg.sigma(0), cfg.sigma(1));
    let mut max_vertical = f64::NEG_INFINITY;
    for p in &inner.points {
        let gap = outer_r2_at(cfg, p.rates[0], opts)? - p.rates[1];
        max_vertical = max_vertical.max(gap);
    }

    let mut area_in = 0.0;
    for w in inner.points.windows(2) {
        let (a, b) = (&w[0].rates, &w[1].rates);
        area_in += 0.5 * (b[0] - a[0]) * (a[1] + b[1]);
    }

    let top = (2.0 * fam.outer_cap(1.0, s2)?).exp_m1();
    let r1_max = 0.5 * ((s2 / s1).powi(2) * top).ln_1p();
    let h = r1_max / AREA_PANELS as f64;
    let mut area_out = 0.0;
    let mut prev = outer_r2_at(cfg, 0.0, opts)?.max(0.0);
    for i in 1..=AREA_PANELS {
        let cur = outer_r2_at(cfg, i as f64 * h, opts)?.max(0.0);
        area_out += 0.5 * h * (prev + cur);
        prev = cur;
    }
    Ok(GapMetrics {
        max_vertical,
        relative_area: 1.0 - area_in / area_out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::IntensityConstraint;
    use crate::region::rho_grid;
    use crate::scalar::{avg_ub, bpower, peak_ub, solve_mu_star};

    fn db(x: f64) -> f64 {
        10f64.powf(x / 20.0)
    }

    fn peak_cfg(snr_db: f64) -> ChannelConfig {
        ChannelConfig::two_user(1.0, 2.0, IntensityConstraint::peak(db(snr_db)).unwrap()).unwrap()
    }

    fn avg_cfg(snr_db: f64) -> ChannelConfig {
        ChannelConfig::two_user(1.0, 2.0, IntensityConstraint::average(db(snr_db)).unwrap()).unwrap()
    }

    fn joint_cfg(snr_db: f64, alpha: f64) -> ChannelConfig {
        ChannelConfig::two_user(1.0, 2.0, IntensityConstraint::joint(db(snr_db), alpha).unwrap()).unwrap()
    }

    #[test]
    fn inner_peak_single_split_corner() {
        let cfg = peak_cfg(20.0);
        let a = db(20.0);
        let pts = inner_split_points(&cfg, 1, BoundOptions::default()).unwrap();
        let r1 = 0.5 * (a * a / TWO_PI_E).ln_1p();
        let r2 = (0.5 * (a * a / (TWO_PI_E * 4.0)).ln_1p() - peak_ub(a, 2.0)).max(0.0);
        assert_eq!(pts[0].rates, [r1, r2]);
    }

    #[test]
    fn inner_peak_has_limit_point_and_is_monotone() {
        let cfg = peak_cfg(30.0);
        let b = inner_peak(&cfg, 64).unwrap();
        b.validate().unwrap();
        let first = &b.points[0];
        assert_eq!(first.params[0], 0.0);
        assert_eq!(first.rates, vec![0.0, peak_asym(db(30.0), 2.0)]);
    }

    #[test]
    fn inner_peak_high_snr_point_near_sum_line() {
        let a = db(60.0);
        let cfg = peak_cfg(60.0);
        let pts = inner_split_points(&cfg, 4, BoundOptions::default()).unwrap();
        let p = pts[3].rates;
        let line = 0.5 * (a * a / TWO_PI_E).ln();
        assert!((p[0] + p[1] - line).abs() <= 0.05);
    }

    #[test]
    fn outer_peak_corners() {
        let cfg = peak_cfg(20.0);
        let a = db(20.0);
        let b = outer_peak(&cfg, &[0.0, 1.0]).unwrap();
        assert_eq!(b.points[0].rates, vec![0.0, peak_ub(a, 2.0)]);
        let c = peak_ub(a, 2.0);
        let r1 = 0.5 * (1.0 + 4.0 * ((2.0 * c).exp() - 1.0)).ln();
        assert!((b.points[1].rates[0] - r1).abs() < 1e-14);
        assert_eq!(b.points[1].rates[1], 0.0);
        assert!(outer_peak(&cfg, &[1.2]).is_err());
    }

    #[test]
    fn outer_peak_mid_dominates_inner() {
        let cfg = peak_cfg(20.0);
        let mid = outer_peak(&cfg, &[0.5]).unwrap().points[0].rates.clone();
        let inner = inner_peak(&cfg, 64).unwrap();
        let r2_in = interpolate(&inner, mid[0]);
        assert!(mid[1] > r2_in);
    }

    fn interpolate(b: &RegionBoundary, r1: f64) -> f64 {
        for w in b.points.windows(2) {
            let (p, q) = (&w[0].rates, &w[1].rates);
            if r1 >= p[0] && r1 <= q[0] {
                let t = if q[0] > p[0] {
                    (r1 - p[0]) / (q[0] - p[0])
                } else {
                    0.0
                };
                return p[1] + t * (q[1] - p[1]);
            }
        }
        0.0
    }

    #[test]
    fn asymptotic_peak_corners_and_telescoping() {
        let cfg = peak_cfg(40.0);
        let a = db(40.0);
        let b = asymptotic_peak(&cfg, &[0.0, 1.0]).unwrap();
        assert_eq!(
            b.points[0].rates,
            vec![0.0, 0.5 * (a * a / (TWO_PI_E * 4.0)).ln_1p()]
        );
        assert_eq!(b.points[1].rates, vec![0.5 * (a * a / TWO_PI_E).ln_1p(), 0.0]);

        let equal = ChannelConfig::two_user(1.0, 1.0, IntensityConstraint::peak(a).unwrap()).unwrap();
        let sums: Vec<f64> = asymptotic_peak(&equal, &rho_grid(33))
            .unwrap()
            .points
            .iter()
            .map(|p| p.rates[0] + p.rates[1])
            .collect();
        assert!(sums.iter().all(|s| (s - sums[0]).abs() < 1e-12));
    }

    #[test]
    fn asymptotic_peak_sum_at_80_db() {
        let a = db(80.0);
        let cfg = peak_cfg(80.0);
        let p = asymptotic_peak(&cfg, &[0.3]).unwrap().points[0].rates.clone();
        let single = 0.5 * (a * a / TWO_PI_E).ln();
        assert!((p[0] + p[1] - single).abs() <= 0.02);
    }

    #[test]
    fn inner_avg_corners() {
        let cfg = avg_cfg(30.0);
        let e = db(30.0);
        let b = inner_avg(&cfg, &[0.0, 1.0]).unwrap();
        let lead = 0.5 * (E * e * e / (2.0 * PI * 4.0)).ln_1p();
        assert_eq!(b.points[0].rates, vec![0.0, (lead - avg_ub(0.0, 2.0)).max(0.0)]);
        assert_eq!(b.points[1].rates[0], 0.5 * (E * e * e / (2.0 * PI)).ln_1p());
        assert_eq!(b.points[1].rates[1], 0.0);
    }

    #[test]
    fn outer_avg_corners() {
        let cfg = avg_cfg(30.0);
        let e = db(30.0);
        let b = outer_avg(&cfg, &[0.0, 1.0]).unwrap();
        let c0 = avg_ub(0.0, 2.0);
        let c1 = avg_ub(e, 2.0);
        let r1_0 = 0.5 * (1.0 + 4.0 * ((2.0 * c0).exp() - 1.0)).ln();
        assert!((b.points[0].rates[0] - r1_0).abs() < 1e-14);
        assert!((b.points[0].rates[1] - (c1 - c0)).abs() < 1e-14);
        assert_eq!(b.points[1].rates[1], 0.0);
    }

    #[test]
    fn asymptotic_avg_corners() {
        let cfg = avg_cfg(30.0);
        let e = db(30.0);
        let b = asymptotic_avg(&cfg, &[0.0, 1.0]).unwrap();
        assert_eq!(b.points[0].rates[0], 0.0);
        assert!((b.points[0].rates[1] - 0.5 * (E * e * e / (8.0 * PI)).ln_1p()).abs() < 1e-14);
        assert_eq!(b.points[1].rates[1], 0.0);
    }

    #[test]
    fn inner_joint_single_split() {
        let cfg = joint_cfg(30.0, 0.4);
        let a = db(30.0);
        let m = solve_mu_star(0.4).unwrap();
        let pts = inner_split_points(&cfg, 1, BoundOptions::default()).unwrap();
        let gain = scaled_power_gain(1.0, m.value);
        let r1 = 0.5 * (gain * a * a / TWO_PI_E).ln_1p();
        let r2 = (0.5 * (gain * a * a / (TWO_PI_E * 4.0)).ln_1p() - bpower(a, 2.0, m.value, false).unwrap())
            .max(0.0);
        assert_eq!(pts[0].rates, [r1, r2]);
    }

    #[test]
    fn joint_uniform_limit_reproduces_peak() {
        let a = db(30.0);
        let joint = ChannelConfig::two_user(1.0, 2.0, IntensityConstraint::joint(a, 0.5).unwrap()).unwrap();
        let peak = peak_cfg(30.0);
        let bj = inner_joint(&joint, 64, BoundOptions::default()).unwrap();
        let bp = inner_peak(&peak, 64).unwrap();
        assert_eq!(bj.points.len(), bp.points.len());
        for (p, q) in bj.points.iter().zip(&bp.points) {
            assert!((p.rates[0] - q.rates[0]).abs() < 1e-6);
            assert!((p.rates[1] - q.rates[1]).abs() < 1e-6);
        }
    }

    #[test]
    fn asymptotic_joint_corners() {
        let cfg = joint_cfg(30.0, 0.4);
        let b = asymptotic_joint(&cfg, &[0.0, 1.0]).unwrap();
        assert_eq!(b.points[0].rates[0], 0.0);
        assert!(b.points[1].rates[1].abs() < 1e-15);
    }

    #[test]
    fn outer_joint_corners() {
        let cfg = joint_cfg(30.0, 0.4);
        let m = solve_mu_star(0.4).unwrap();
        let b = outer_joint(&cfg, &[0.0, 1.0], BoundOptions::default()).unwrap();
        let full = bpower(db(30.0), 2.0, m.value, false).unwrap();
        assert_eq!(b.points[0].rates, vec![0.0, full]);
        assert_eq!(b.points[1].rates[1], 0.0);
    }

    #[test]
    fn wrong_constraint_rejected() {
        let cfg = avg_cfg(10.0);
        assert!(inner_peak(&cfg, 8).is_err());
        assert!(outer_joint(&cfg, &[0.5], BoundOptions::default()).is_err());
        assert!(inner_peak(&peak_cfg(10.0), 0).is_err());
    }

    #[test]
    fn outer_r2_matches_parameterized_curve() {
        for cfg in [peak_cfg(30.0), avg_cfg(30.0), joint_cfg(30.0, 0.4)] {
            let opts = BoundOptions::default();
            let b = outer(&cfg, &rho_grid(17), opts).unwrap();
            for p in &b.points {
                let r2 = outer_r2_at(&cfg, p.rates[0], opts).unwrap();
                assert!((r2 - p.rates[1]).abs() < 1e-9, "{:?}", p.rates);
            }
        }
    }

    #[test]
    fn every_boundary_is_monotone() {
        let grid = rho_grid(512);
        let opts = BoundOptions::default();
        for snr in [15.0, 30.0, 60.0] {
            let p = peak_cfg(snr);
            let a = avg_cfg(snr);
            let j = joint_cfg(snr, 0.4);
            for b in [
                inner_peak(&p, 64).unwrap(),
                outer_peak(&p, &grid).unwrap(),
                asymptotic_peak(&p, &grid).unwrap(),
                inner_avg(&a, &grid).unwrap(),
                outer_avg(&a, &grid).unwrap(),
                asymptotic_avg(&a, &grid).unwrap(),
                inner_joint(&j, 64, opts).unwrap(),
                outer_joint(&j, &grid, opts).unwrap(),
                asymptotic_joint(&j, &grid).unwrap(),
            ] {
                b.validate().unwrap();
            }
        }
    }
}
