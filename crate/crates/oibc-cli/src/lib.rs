//! Command-line front end: `region`, `verify`, `mu-star`, `single-user`.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::Parser;

pub mod config;
pub mod output;
pub mod region;
pub mod scalar;
pub mod verify;

pub use config::{Cli, Command, Format, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFICATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Usage(String),
    Verification(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Verification(_) => EXIT_VERIFICATION,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "invalid configuration: {m}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<oibc_core::Error> for CliError {
    fn from(e: oibc_core::Error) -> Self {
        match e {
            oibc_core::Error::Domain { field, reason } => CliError::Usage(format!("{field}: {reason}")),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

/// Rendered output of one command.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub text: String,
    pub out: Option<PathBuf>,
    /// Names of failed checks; nonempty turns into exit code 2 after writing.
    pub failed: Vec<String>,
}

pub fn execute(cli: Cli) -> Result<Output, CliError> {
    match cli.command {
        Command::Region(args) => {
            let cfg = RunConfig::resolve(&args)?;
            Ok(Output {
                text: region::render(&cfg, &region::compute(&cfg)?)?,
                out: args.output.out,
                failed: Vec::new(),
            })
        }
        Command::Verify(args) => {
            let cfg = RunConfig::resolve(&args)?;
            let report = verify::compute(&cfg)?;
            Ok(Output {
                text: verify::render(&cfg, &report)?,
                failed: report.failed(),
                out: args.output.out,
            })
        }
        Command::MuStar(args) => Ok(Output {
            text: scalar::mu_star(&args)?,
            out: args.output.out,
            failed: Vec::new(),
        }),
        Command::SingleUser(args) => Ok(Output {
            text: scalar::single_user(&args)?,
            out: args.output.out,
            failed: Vec::new(),
        }),
    }
}

fn write_output(o: &Output) -> Result<(), CliError> {
    match &o.out {
        Some(path) => std::fs::write(path, &o.text)
            .map_err(|e| CliError::Usage(format!("out: cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(o.text.as_bytes())
            .or_else(|e| match e.kind() {
                std::io::ErrorKind::BrokenPipe => Ok(()),
                _ => Err(CliError::Usage(format!("out: {e}"))),
            }),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = execute(cli).and_then(|o| {
        write_output(&o)?;
        if o.failed.is_empty() {
            Ok(())
        } else {
            Err(CliError::Verification(o.failed.join(", ")))
        }
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
