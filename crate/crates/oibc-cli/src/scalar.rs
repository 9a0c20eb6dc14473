//! `mu-star` and `single-user`.

use std::f64::consts::LN_2;

use oibc_core::scalar::{
    cap_ub_avg, cap_ub_avg_asymptotic, cap_ub_bpower, cap_ub_bpower_asymptotic, cap_ub_peak,
    cap_ub_peak_asymptotic, solve_mu_star,
};
use oibc_core::{CapacityValue, ConstraintKind};
use serde::Serialize;

use crate::config::{check_alpha, ConstraintArg, Format, MuStarArgs, SingleUserArgs};
use crate::output::{json, num, Table};
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MuStarReport {
    pub alpha: f64,
    pub mu_star: f64,
    pub residual: f64,
    pub uniform_limit: bool,
}

pub fn mu_star(args: &MuStarArgs) -> Result<String, CliError> {
    check_alpha(args.alpha)?;
    let m = solve_mu_star(args.alpha)?;
    if m.is_uniform_limit() {
        eprintln!("note: alpha = 0.5 is the uniform limit; the optimal input is uniform on [0, A]");
    }
    let r = MuStarReport {
        alpha: args.alpha,
        mu_star: m.value,
        residual: m.residual,
        uniform_limit: m.is_uniform_limit(),
    };
    match args.output.format.unwrap_or(Format::Csv) {
        Format::Json => json(&r),
        Format::Csv => {
            let mut t = Table::new(["alpha", "mu_star", "residual", "uniform_limit"]);
            t.push(vec![
                num(r.alpha),
                num(r.mu_star),
                num(r.residual),
                r.uniform_limit.to_string(),
            ]);
            Ok(t.render())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingleUserRow {
    pub constraint: ConstraintKind,
    pub snr_db: f64,
    pub upper_bound: f64,
    pub asymptotic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingleUserReport {
    pub units: &'static str,
    pub sigma: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub rows: Vec<SingleUserRow>,
}

fn bounds(
    args: &SingleUserArgs,
    db: f64,
    alpha: Option<f64>,
) -> Result<(CapacityValue, CapacityValue), CliError> {
    let s = args.sigma;
    let scale = s * 10f64.powf(db / 20.0);
    Ok(match args.constraint {
        ConstraintArg::Peak => (cap_ub_peak(scale, s)?, cap_ub_peak_asymptotic(scale, s)?),
        ConstraintArg::Avg => (cap_ub_avg(scale, s)?, cap_ub_avg_asymptotic(scale, s)?),
        ConstraintArg::Joint => {
            let m = solve_mu_star(alpha.unwrap_or(0.4))?;
            (
                cap_ub_bpower(scale, s, &m, args.refine)?,
                cap_ub_bpower_asymptotic(scale, s, &m)?,
            )
        }
    })
}

pub fn single_user(args: &SingleUserArgs) -> Result<String, CliError> {
    if !(args.sigma.is_finite() && args.sigma > 0.0) {
        return Err(CliError::Usage(format!(
            "sigma: {} is not a positive noise level",
            args.sigma
        )));
    }
    let snrs = match args.constraint {
        ConstraintArg::Avg => {
            if args.amplitude_db.is_some() {
                return Err(CliError::Usage(
                    "amplitude-db: the avg constraint takes --mean-db".into(),
                ));
            }
            args.mean_db.clone()
        }
        _ => {
            if args.mean_db.is_some() {
                return Err(CliError::Usage(
                    "mean-db: this constraint takes --amplitude-db".into(),
                ));
            }
            args.amplitude_db.clone()
        }
    }
    .unwrap_or_else(|| vec![30.0]);
    if let Some(x) = snrs.iter().find(|x| !x.is_finite() || x.abs() > 200.0) {
        return Err(CliError::Usage(format!("snr: {x} is outside [-200, 200] dB")));
    }
    let alpha = match (args.constraint, args.alpha) {
        (ConstraintArg::Joint, a) => {
            let a = a.unwrap_or(0.4);
            check_alpha(a)?;
            Some(a)
        }
        (_, Some(_)) => {
            return Err(CliError::Usage(
                "alpha: only the joint constraint takes alpha".into(),
            ))
        }
        (_, None) => None,
    };
    let unit = if args.output.bits { 1.0 / LN_2 } else { 1.0 };
    let mut rows = Vec::new();
    for &db in &snrs {
        let (ub, asym) = bounds(args, db, alpha)?;
        rows.push(SingleUserRow {
            constraint: args.constraint.into(),
            snr_db: db,
            upper_bound: ub.nats() * unit,
            asymptotic: asym.nats() * unit,
        });
    }
    let report = SingleUserReport {
        units: if args.output.bits { "bits" } else { "nats" },
        sigma: args.sigma,
        alpha,
        rows,
    };
    match args.output.format.unwrap_or(Format::Csv) {
        Format::Json => json(&report),
        Format::Csv => {
            let mut t = Table::new(["constraint", "snr_db", "upper_bound", "asymptotic"]);
            for r in &report.rows {
                t.push(vec![
                    r.constraint.label().into(),
                    num(r.snr_db),
                    num(r.upper_bound),
                    num(r.asymptotic),
                ]);
            }
            Ok(t.render())
        }
    }
}
