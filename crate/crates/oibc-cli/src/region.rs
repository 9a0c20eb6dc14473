//! `region`: boundary computation and serialization.

use std::f64::consts::LN_2;

use oibc_core::region::k_user::{
    k_asymptotic_avg, k_asymptotic_joint, k_asymptotic_peak, k_inner_avg, k_inner_joint, k_inner_peak,
    k_outer_avg, k_outer_joint, k_outer_peak, outer_slack, rho_boundary, rho_vector_grid, split_boundary,
    split_grid, DEFAULT_SPLIT_PRODUCT_CAP,
};
use oibc_core::region::two_user::{
    asymptotic_avg, asymptotic_joint, asymptotic_peak, boundary_gap, inner_avg, inner_joint, inner_peak,
    outer_avg, outer_joint, outer_peak, GapMetrics,
};
use oibc_core::region::{rho_grid, BoundKind, BoundaryPoint, RegionBoundary};
use oibc_core::verify::suite::per_axis;
use oibc_core::{ChannelConfig, ConstraintKind, IntensityConstraint};
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::output::{json, num, Table};
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmittedBoundary {
    pub snr_db: f64,
    /// One-based user pair for a two-dimensional frontier of a K-user cloud.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub projection: Option<[usize; 2]>,
    #[serde(flatten)]
    pub boundary: RegionBoundary,
}

impl EmittedBoundary {
    pub fn label(&self) -> String {
        let kind = self.boundary.kind.label();
        match self.projection {
            Some([i, j]) => format!("{kind}-proj-{i}-{j}@{}dB", num(self.snr_db)),
            None => format!("{kind}@{}dB", num(self.snr_db)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnrMetadata {
    pub snr_db: f64,
    /// Peak amplitude or mean intensity in units of the first noise deviation's scale.
    pub scale: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu_star: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<GapMetrics>,
    /// Smallest margin of the inner cloud inside the outer region.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nesting_slack: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub units: &'static str,
    pub snr: Vec<SnrMetadata>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionReport {
    pub config: RunConfig,
    pub boundaries: Vec<EmittedBoundary>,
    pub metadata: Metadata,
}

fn numerical(what: String) -> impl FnOnce(oibc_core::Error) -> CliError {
    move |e| CliError::Numerical(format!("{what}: {e}"))
}

fn two_user(cfg: &RunConfig, ch: &ChannelConfig) -> Result<Vec<RegionBoundary>, CliError> {
    let grid = rho_grid(cfg.rho_points);
    let opts = cfg.opts();
    Ok(match cfg.constraint {
        ConstraintKind::Peak => vec![
            inner_peak(ch, cfg.n_max)?,
            outer_peak(ch, &grid)?,
            asymptotic_peak(ch, &grid)?,
        ],
        ConstraintKind::Average => vec![
            inner_avg(ch, &grid)?,
            outer_avg(ch, &grid)?,
            asymptotic_avg(ch, &grid)?,
        ],
        ConstraintKind::Joint => vec![
            inner_joint(ch, cfg.n_max, opts)?,
            outer_joint(ch, &grid, opts)?,
            asymptotic_joint(ch, &grid)?,
        ],
    })
}

fn k_user(cfg: &RunConfig, ch: &ChannelConfig) -> Result<Vec<RegionBoundary>, CliError> {
    let k = cfg.users;
    let kind = cfg.constraint;
    let opts = cfg.opts();
    let rhos = rho_vector_grid(k, per_axis(k, cfg.rho_points))?;
    let inner = match kind {
        ConstraintKind::Average => rho_boundary(BoundKind::Inner, kind, &k_inner_avg(ch, &rhos)?),
        _ => {
            let splits = split_grid(k, &cfg.split_grid, DEFAULT_SPLIT_PRODUCT_CAP)?;
            let pts = if kind == ConstraintKind::Peak {
                k_inner_peak(ch, &splits)?
            } else {
                k_inner_joint(ch, &splits, opts)?
            };
            split_boundary(BoundKind::Inner, kind, &pts)
        }
    };
    let (outer, asym) = match kind {
        ConstraintKind::Peak => (k_outer_peak(ch, &rhos)?, k_asymptotic_peak(ch, &rhos)?),
        ConstraintKind::Average => (k_outer_avg(ch, &rhos)?, k_asymptotic_avg(ch, &rhos)?),
        ConstraintKind::Joint => (k_outer_joint(ch, &rhos, opts)?, k_asymptotic_joint(ch, &rhos)?),
    };
    Ok(vec![
        inner,
        rho_boundary(BoundKind::Outer, kind, &outer),
        rho_boundary(BoundKind::Asymptotic, kind, &asym),
    ])
}

/// Points of `b` not dominated in the `(R_i, R_j)` plane, ascending in `R_i`.
pub fn pareto_frontier(b: &RegionBoundary, i: usize, j: usize) -> RegionBoundary {
    let mut pts: Vec<&BoundaryPoint> = b.points.iter().collect();
    pts.sort_by(|p, q| {
        q.rates[i]
            .total_cmp(&p.rates[i])
            .then(q.rates[j].total_cmp(&p.rates[j]))
    });
    let mut best = f64::NEG_INFINITY;
    let mut keep = Vec::new();
    for p in pts {
        if p.rates[j] > best {
            best = p.rates[j];
            keep.push(p.clone());
        }
    }
    keep.reverse();
    RegionBoundary {
        points: keep,
        ..b.clone()
    }
}

fn scale_rates(b: &mut RegionBoundary, f: f64) {
    for p in &mut b.points {
        for r in &mut p.rates {
            *r *= f;
        }
    }
}

pub fn compute(cfg: &RunConfig) -> Result<RegionReport, CliError> {
    let mut boundaries = Vec::new();
    let mut snr = Vec::new();
    let unit = if cfg.bits { 1.0 / LN_2 } else { 1.0 };
    for &db in &cfg.snr_db {
        let ch = cfg.channel_at(db)?;
        let found = if cfg.users == 2 {
            two_user(cfg, &ch)?
        } else {
            k_user(cfg, &ch)?
        };
        for b in &found {
            b.validate().map_err(numerical(format!(
                "{} boundary at {} dB",
                b.kind.label(),
                num(db)
            )))?;
        }
        let mu_star = match ch.constraint() {
            IntensityConstraint::Joint(j) => Some(j.mu_star()?.value),
            _ => None,
        };
        let (gap, nesting_slack) = if cfg.users == 2 {
            let g = boundary_gap(&ch, &found[0], cfg.opts())?;
            let g = GapMetrics {
                max_vertical: g.max_vertical * unit,
                ..g
            };
            (Some(g), None)
        } else {
            let mut worst = f64::INFINITY;
            for p in &found[0].points {
                worst = worst.min(outer_slack(&ch, &p.rates, cfg.opts())?);
            }
            (None, Some(worst * unit))
        };
        snr.push(SnrMetadata {
            snr_db: db,
            scale: ch.constraint().scale(),
            mu_star,
            gap,
            nesting_slack,
        });

        let mut emitted: Vec<EmittedBoundary> = found
            .iter()
            .map(|b| EmittedBoundary {
                snr_db: db,
                projection: None,
                boundary: b.clone(),
            })
            .collect();
        if cfg.users > 2 {
            for i in 0..cfg.users {
                for j in i + 1..cfg.users {
                    for b in &found {
                        emitted.push(EmittedBoundary {
                            snr_db: db,
                            projection: Some([i + 1, j + 1]),
                            boundary: pareto_frontier(b, i, j),
                        });
                    }
                }
            }
        }
        for e in &mut emitted {
            scale_rates(&mut e.boundary, unit);
        }
        boundaries.extend(emitted);
    }
    Ok(RegionReport {
        config: cfg.clone(),
        boundaries,
        metadata: Metadata {
            units: if cfg.bits { "bits" } else { "nats" },
            snr,
        },
    })
}

pub fn render(cfg: &RunConfig, report: &RegionReport) -> Result<String, CliError> {
    match cfg.format {
        Format::Json => json(report),
        Format::Csv => {
            let m = report
                .boundaries
                .iter()
                .map(|b| b.boundary.param_names.len())
                .max()
                .unwrap_or(0);
            let header = std::iter::once("kind".to_string())
                .chain((1..=m).map(|i| format!("param_{i}")))
                .chain((1..=cfg.users).map(|k| format!("R_{k}")));
            let mut t = Table::new(header);
            for b in &report.boundaries {
                let label = b.label();
                for p in &b.boundary.points {
                    let mut row = vec![label.clone()];
                    row.extend((0..m).map(|i| p.params.get(i).map_or_else(String::new, |&v| num(v))));
                    row.extend(p.rates.iter().map(|&r| num(r)));
                    t.push(row);
                }
            }
            Ok(t.render())
        }
    }
}
