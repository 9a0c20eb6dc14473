//! Flag parsing, config files, and the validated run configuration.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use oibc_core::region::k_user::DEFAULT_SPLITS;
use oibc_core::region::{BoundOptions, OuterForm};
use oibc_core::{ChannelConfig, ConstraintKind, IntensityConstraint};
use serde::{Deserialize, Serialize};

use crate::CliError;

const DEFAULT_SNR_DB: f64 = 30.0;
const DEFAULT_ALPHA: f64 = 0.4;
const DEFAULT_RHO_POINTS: usize = 512;
const DEFAULT_N_MAX: u64 = 64;
const MAX_GRID: usize = 1_000_000;

#[derive(Debug, Parser)]
#[command(
    name = "oibc",
    version,
    about = "Capacity-region bounds for optical-intensity broadcast channels"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Inner, outer and high-SNR boundaries.
    Region(ChannelArgs),
    /// Run the invariant suite.
    Verify(ChannelArgs),
    /// Solve for the truncated-exponential parameter at a given alpha.
    MuStar(MuStarArgs),
    /// Single-user capacity upper bounds.
    SingleUser(SingleUserArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConstraintArg {
    Peak,
    Avg,
    Joint,
}

impl From<ConstraintArg> for ConstraintKind {
    fn from(c: ConstraintArg) -> Self {
        match c {
            ConstraintArg::Peak => ConstraintKind::Peak,
            ConstraintArg::Avg => ConstraintKind::Average,
            ConstraintArg::Joint => ConstraintKind::Joint,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OuterFormArg {
    Full,
    HighSnr,
}

#[derive(Debug, Clone, Default, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Report rates in bits instead of nats.
    #[arg(long)]
    pub bits: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ChannelArgs {
    #[arg(long)]
    pub users: Option<usize>,
    /// Noise deviations, strongest receiver first.
    #[arg(long, value_delimiter = ',')]
    pub sigma: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    pub constraint: Option<ConstraintArg>,
    /// Peak amplitude over the first noise deviation, in dB; a comma list sweeps.
    #[arg(long = "amplitude-db", value_delimiter = ',', allow_hyphen_values = true)]
    pub amplitude_db: Option<Vec<f64>>,
    /// Mean intensity over the first noise deviation, in dB; a comma list sweeps.
    #[arg(long = "mean-db", value_delimiter = ',', allow_hyphen_values = true)]
    pub mean_db: Option<Vec<f64>>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long = "rho-points")]
    pub rho_points: Option<usize>,
    #[arg(long = "n-max")]
    pub n_max: Option<u64>,
    /// Per-user split counts for three or more users.
    #[arg(long = "split-grid", value_delimiter = ',')]
    pub split_grid: Option<Vec<u64>>,
    #[arg(long = "outer-form", value_enum)]
    pub outer_form: Option<OuterFormArg>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Locally minimize the joint single-user bound over its free parameters.
    #[arg(long)]
    pub refine: bool,
    /// JSON file with any of the run settings; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct MuStarArgs {
    #[arg(long)]
    pub alpha: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SingleUserArgs {
    #[arg(long, value_enum, default_value = "peak")]
    pub constraint: ConstraintArg,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long = "amplitude-db", value_delimiter = ',', allow_hyphen_values = true)]
    pub amplitude_db: Option<Vec<f64>>,
    #[arg(long = "mean-db", value_delimiter = ',', allow_hyphen_values = true)]
    pub mean_db: Option<Vec<f64>>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub refine: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Settings read from `--config`; every field is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub users: Option<usize>,
    pub sigma: Option<Vec<f64>>,
    pub constraint: Option<ConstraintKind>,
    pub amplitude_db: Option<Vec<f64>>,
    pub mean_db: Option<Vec<f64>>,
    pub alpha: Option<f64>,
    pub rho_points: Option<usize>,
    pub n_max: Option<u64>,
    pub split_grid: Option<Vec<u64>>,
    pub outer_form: Option<OuterForm>,
    pub seed: Option<u64>,
    pub refine: Option<bool>,
    pub format: Option<Format>,
    pub bits: Option<bool>,
}

impl FileConfig {
    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("config: cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config: {e}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SnrDefinition {
    /// Peak amplitude over the first noise deviation.
    Asnr,
    /// Mean intensity over the first noise deviation.
    Esnr,
}

/// A fully resolved and validated run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub users: usize,
    pub sigma: Vec<f64>,
    pub constraint: ConstraintKind,
    pub snr_definition: SnrDefinition,
    pub snr_db: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub rho_points: usize,
    pub n_max: u64,
    pub split_grid: Vec<u64>,
    pub outer_form: OuterForm,
    pub seed: u64,
    pub refine: bool,
    pub format: Format,
    pub bits: bool,
}

fn usage(field: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("{field}: {reason}"))
}

fn check_snrs(field: &str, v: &[f64]) -> Result<(), CliError> {
    if v.is_empty() {
        return Err(usage(field, "at least one value is required"));
    }
    if let Some(x) = v.iter().find(|x| !x.is_finite() || x.abs() > 200.0) {
        return Err(usage(field, format!("{x} is outside [-200, 200] dB")));
    }
    Ok(())
}

pub(crate) fn check_alpha(alpha: f64) -> Result<(), CliError> {
    if alpha > 0.0 && alpha <= 0.5 {
        Ok(())
    } else {
        Err(usage("alpha", format!("must lie in (0, 0.5], got {alpha}")))
    }
}

/// Default noise deviations `1, 2, 4, ...`.
fn doubling_sigmas(users: usize) -> Vec<f64> {
    (0..users).map(|k| 2f64.powi(k as i32)).collect()
}

impl RunConfig {
    pub fn resolve(args: &ChannelArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let constraint = args
            .constraint
            .map(ConstraintKind::from)
            .or(file.constraint)
            .unwrap_or(ConstraintKind::Peak);

        let sigma = args.sigma.clone().or(file.sigma);
        let users_given = args.users.or(file.users);
        let (users, sigma) = match (users_given, sigma) {
            (Some(k), Some(s)) if k != s.len() => {
                return Err(usage("users", format!("{k} users but {} noise levels", s.len())))
            }
            (_, Some(s)) => (s.len(), s),
            (Some(k), None) => (k, doubling_sigmas(k)),
            (None, None) => (2, doubling_sigmas(2)),
        };
        if users < 2 {
            return Err(usage("users", "at least two users are required"));
        }
        if users > 8 {
            return Err(usage("users", "at most eight users are supported"));
        }
        if let Some(s) = sigma.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
            return Err(usage("sigma", format!("{s} is not a positive noise level")));
        }
        if sigma.windows(2).any(|w| w[1] < w[0]) {
            return Err(usage("sigma", "noise levels must be sorted ascending"));
        }

        let amplitude_db = args.amplitude_db.clone().or(file.amplitude_db);
        let mean_db = args.mean_db.clone().or(file.mean_db);
        let alpha = args.alpha.or(file.alpha);
        let (snr_definition, snr_db) = match constraint {
            ConstraintKind::Average => {
                if amplitude_db.is_some() {
                    return Err(usage("amplitude-db", "the avg constraint takes --mean-db"));
                }
                if alpha.is_some() {
                    return Err(usage("alpha", "only the joint constraint takes alpha"));
                }
                (
                    SnrDefinition::Esnr,
                    mean_db.unwrap_or_else(|| vec![DEFAULT_SNR_DB]),
                )
            }
            kind => {
                if mean_db.is_some() {
                    return Err(usage(
                        "mean-db",
                        format!("the {} constraint takes --amplitude-db", kind.label()),
                    ));
                }
                if kind == ConstraintKind::Peak && alpha.is_some() {
                    return Err(usage("alpha", "only the joint constraint takes alpha"));
                }
                (
                    SnrDefinition::Asnr,
                    amplitude_db.unwrap_or_else(|| vec![DEFAULT_SNR_DB]),
                )
            }
        };
        let field = if snr_definition == SnrDefinition::Esnr {
            "mean-db"
        } else {
            "amplitude-db"
        };
        check_snrs(field, &snr_db)?;
        let alpha = if constraint == ConstraintKind::Joint {
            let a = alpha.unwrap_or(DEFAULT_ALPHA);
            check_alpha(a)?;
            Some(a)
        } else {
            None
        };

        let rho_points = args.rho_points.or(file.rho_points).unwrap_or(DEFAULT_RHO_POINTS);
        if !(2..=MAX_GRID).contains(&rho_points) {
            return Err(usage("rho-points", format!("must lie in [2, {MAX_GRID}]")));
        }
        let n_max = args.n_max.or(file.n_max).unwrap_or(DEFAULT_N_MAX);
        if !(1..=MAX_GRID as u64).contains(&n_max) {
            return Err(usage("n-max", format!("must lie in [1, {MAX_GRID}]")));
        }
        let split_grid = args
            .split_grid
            .clone()
            .or(file.split_grid)
            .unwrap_or_else(|| DEFAULT_SPLITS.to_vec());
        if split_grid.is_empty() || split_grid.contains(&0) {
            return Err(usage("split-grid", "split counts must be positive"));
        }
        if split_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(usage("split-grid", "split counts must be strictly increasing"));
        }
        let outer_form = match args.outer_form {
            Some(OuterFormArg::Full) => OuterForm::Full,
            Some(OuterFormArg::HighSnr) => OuterForm::HighSnr,
            None => file.outer_form.unwrap_or_default(),
        };

        Ok(Self {
            users,
            sigma,
            constraint,
            snr_definition,
            snr_db,
            alpha,
            rho_points,
            n_max,
            split_grid,
            outer_form,
            seed: args.seed.or(file.seed).unwrap_or(0),
            refine: args.refine || file.refine.unwrap_or(false),
            format: args.output.format.or(file.format).unwrap_or(Format::Csv),
            bits: args.output.bits || file.bits.unwrap_or(false),
        })
    }

    pub fn opts(&self) -> BoundOptions {
        BoundOptions {
            refine: self.refine,
            outer_form: self.outer_form,
        }
    }

    /// Constraint whose amplitude (or mean) sits `snr_db` above the first noise deviation.
    pub fn constraint_at(&self, snr_db: f64) -> Result<IntensityConstraint, CliError> {
        let scale = self.sigma[0] * 10f64.powf(snr_db / 20.0);
        Ok(match self.constraint {
            ConstraintKind::Peak => IntensityConstraint::peak(scale)?,
            ConstraintKind::Average => IntensityConstraint::average(scale)?,
            ConstraintKind::Joint => IntensityConstraint::joint(scale, self.alpha.unwrap_or(DEFAULT_ALPHA))?,
        })
    }

    pub fn channel_at(&self, snr_db: f64) -> Result<ChannelConfig, CliError> {
        Ok(ChannelConfig::new(
            self.sigma.clone(),
            self.constraint_at(snr_db)?,
        )?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<RunConfig, CliError> {
        let mut full = vec!["oibc", "region"];
        full.extend_from_slice(args);
        match Cli::try_parse_from(full)
            .map_err(|e| CliError::Usage(e.to_string()))?
            .command
        {
            Command::Region(a) => RunConfig::resolve(&a),
            _ => unreachable!(),
        }
    }

    #[test]
    fn defaults() {
        let c = parse(&[]).unwrap();
        assert_eq!(c.users, 2);
        assert_eq!(c.sigma, vec![1.0, 2.0]);
        assert_eq!(c.constraint, ConstraintKind::Peak);
        assert_eq!(c.snr_db, vec![30.0]);
        assert_eq!(c.alpha, None);
        assert_eq!(c.format, Format::Csv);
    }

    #[test]
    fn users_expand_sigma() {
        let c = parse(&["--users", "3", "--constraint", "joint"]).unwrap();
        assert_eq!(c.sigma, vec![1.0, 2.0, 4.0]);
        assert_eq!(c.alpha, Some(0.4));
    }

    #[test]
    fn rejections_name_fields() {
        let cases: &[(&[&str], &str)] = &[
            (&["--sigma", "2,1"], "sigma"),
            (&["--constraint", "joint", "--alpha", "0.6"], "alpha"),
            (&["--alpha", "0.3"], "alpha"),
            (&["--constraint", "avg", "--amplitude-db", "10"], "amplitude-db"),
            (&["--mean-db", "10"], "mean-db"),
            (&["--users", "3", "--sigma", "1,2"], "users"),
            (&["--rho-points", "1"], "rho-points"),
            (&["--split-grid", "2,1"], "split-grid"),
        ];
        for (args, field) in cases {
            match parse(args) {
                Err(CliError::Usage(m)) => assert!(m.starts_with(field), "{m}"),
                other => panic!("{args:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn snr_sweep_and_negative_values() {
        let c = parse(&["--amplitude-db", "-5,15,30"]).unwrap();
        assert_eq!(c.snr_db, vec![-5.0, 15.0, 30.0]);
        let a = parse(&["--constraint", "avg", "--mean-db", "20"]).unwrap();
        assert_eq!(a.snr_definition, SnrDefinition::Esnr);
    }

    #[test]
    fn file_values_yield_to_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        std::fs::write(
            &path,
            r#"{"constraint": "joint", "alpha": 0.25, "amplitude_db": [15], "rho_points": 64}"#,
        )
        .unwrap();
        let p = path.to_str().unwrap();
        let c = parse(&["--config", p, "--rho-points", "32"]).unwrap();
        assert_eq!(c.constraint, ConstraintKind::Joint);
        assert_eq!(c.alpha, Some(0.25));
        assert_eq!(c.snr_db, vec![15.0]);
        assert_eq!(c.rho_points, 32);
        std::fs::write(&path, r#"{"colour": 1}"#).unwrap();
        assert!(matches!(parse(&["--config", p]), Err(CliError::Usage(_))));
    }
}
