//! Python module `pyoibc`: single-user bounds, region boundaries and the verification suite.

use oibc_core::region::k_user::{
    k_asymptotic_avg, k_asymptotic_joint, k_asymptotic_peak, k_inner_avg, k_inner_joint, k_inner_peak,
    k_outer_avg, k_outer_joint, k_outer_peak, rho_boundary, rho_vector_grid, split_boundary, split_grid,
    DEFAULT_SPLITS, DEFAULT_SPLIT_PRODUCT_CAP,
};
use oibc_core::region::two_user::{
    asymptotic_avg, asymptotic_joint, asymptotic_peak, boundary_gap, inner_avg, inner_joint, inner_peak,
    outer_avg, outer_joint, outer_peak,
};
use oibc_core::region::{rho_grid, BoundKind, BoundOptions, RegionBoundary};
use oibc_core::scalar::{
    cap_ub_avg, cap_ub_avg_asymptotic, cap_ub_bpower, cap_ub_bpower_asymptotic, cap_ub_peak,
    cap_ub_peak_asymptotic, solve_mu_star,
};
use oibc_core::source::{decompose_exponential, decompose_texp, decompose_uniform};
use oibc_core::verify::suite::per_axis;
use oibc_core::verify::{run_suite, SuiteConfig};
use oibc_core::{ChannelConfig, ConstraintKind, Error, IntensityConstraint};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

/// `(name, passed, measured, comparison, threshold)`.
type CheckRow = (String, bool, f64, String, f64);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Domain { .. } => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn constraint(kind: &str, scale: f64, alpha: Option<f64>) -> PyResult<IntensityConstraint> {
    let c = match (kind, alpha) {
        ("peak", None) => IntensityConstraint::peak(scale),
        ("avg", None) => IntensityConstraint::average(scale),
        ("joint", a) => IntensityConstraint::joint(scale, a.unwrap_or(0.4)),
        ("peak" | "avg", Some(_)) => {
            return Err(PyValueError::new_err(
                "alpha: only the joint constraint takes alpha",
            ))
        }
        _ => {
            return Err(PyValueError::new_err(format!(
                "constraint: expected peak, avg or joint, got {kind:?}"
            )))
        }
    };
    c.map_err(to_py)
}

/// Root of the mean-ratio equation for `alpha`, as `(mu, residual)`.
#[pyfunction]
fn mu_star(alpha: f64) -> PyResult<(f64, f64)> {
    let m = solve_mu_star(alpha).map_err(to_py)?;
    Ok((m.value, m.residual))
}

/// Single-user capacity upper bound in nats.
#[pyfunction]
#[pyo3(signature = (kind, scale, sigma, alpha=None, refine=false))]
fn capacity_upper_bound(
    kind: &str,
    scale: f64,
    sigma: f64,
    alpha: Option<f64>,
    refine: bool,
) -> PyResult<f64> {
    let v = match constraint(kind, scale, alpha)? {
        IntensityConstraint::Peak(_) => cap_ub_peak(scale, sigma),
        IntensityConstraint::Average(_) => cap_ub_avg(scale, sigma),
        IntensityConstraint::Joint(j) => cap_ub_bpower(scale, sigma, &j.mu_star().map_err(to_py)?, refine),
    };
    Ok(v.map_err(to_py)?.nats())
}

/// High-SNR form of the single-user bound in nats.
#[pyfunction]
#[pyo3(signature = (kind, scale, sigma, alpha=None))]
fn capacity_asymptotic(kind: &str, scale: f64, sigma: f64, alpha: Option<f64>) -> PyResult<f64> {
    let v = match constraint(kind, scale, alpha)? {
        IntensityConstraint::Peak(_) => cap_ub_peak_asymptotic(scale, sigma),
        IntensityConstraint::Average(_) => cap_ub_avg_asymptotic(scale, sigma),
        IntensityConstraint::Joint(j) => cap_ub_bpower_asymptotic(scale, sigma, &j.mu_star().map_err(to_py)?),
    };
    Ok(v.map_err(to_py)?.nats())
}

/// Samples of the two-factor sum that reproduces a uniform, exponential or truncated-exponential input.
///
/// `split` is the atom count for `uniform` and `texp`, and the continuous part's mean for `exp`.
#[pyfunction]
#[pyo3(signature = (law, scale, split, count, seed=0, mu=None))]
fn decomposition_samples(
    law: &str,
    scale: f64,
    split: f64,
    count: usize,
    seed: u64,
    mu: Option<f64>,
) -> PyResult<Vec<f64>> {
    let n = || -> PyResult<u64> {
        if split >= 1.0 && split.fract() == 0.0 {
            Ok(split as u64)
        } else {
            Err(PyValueError::new_err(format!(
                "split: expected a positive integer count, got {split}"
            )))
        }
    };
    let d = match law {
        "uniform" => decompose_uniform(scale, n()?),
        "exp" => decompose_exponential(scale, split),
        "texp" => {
            let mu = mu.ok_or_else(|| PyValueError::new_err("mu: required for texp"))?;
            decompose_texp(scale, mu, n()?)
        }
        _ => {
            return Err(PyValueError::new_err(format!(
                "law: expected uniform, exp or texp, got {law:?}"
            )))
        }
    }
    .map_err(to_py)?;
    Ok(d.sample_sum(count, seed))
}

/// One bound as parallel lists of parameters and rate tuples.
#[pyclass(frozen)]
struct Boundary {
    #[pyo3(get)]
    kind: String,
    #[pyo3(get)]
    param_names: Vec<String>,
    #[pyo3(get)]
    params: Vec<Vec<f64>>,
    #[pyo3(get)]
    rates: Vec<Vec<f64>>,
    core: RegionBoundary,
}

impl Boundary {
    fn from_core(b: RegionBoundary) -> Self {
        Self {
            kind: b.kind.label().to_owned(),
            param_names: b.param_names.clone(),
            params: b.points.iter().map(|p| p.params.clone()).collect(),
            rates: b.points.iter().map(|p| p.rates.to_vec()).collect(),
            core: b,
        }
    }
}

#[pymethods]
impl Boundary {
    fn __len__(&self) -> usize {
        self.rates.len()
    }

    fn __repr__(&self) -> String {
        format!("Boundary(kind={:?}, points={})", self.kind, self.rates.len())
    }
}

/// A K-user channel with ordered noise levels and one intensity constraint.
#[pyclass(frozen)]
struct Channel {
    cfg: ChannelConfig,
    opts: BoundOptions,
}

#[pymethods]
impl Channel {
    #[new]
    #[pyo3(signature = (sigmas, kind, scale, alpha=None, refine=false))]
    fn new(sigmas: Vec<f64>, kind: &str, scale: f64, alpha: Option<f64>, refine: bool) -> PyResult<Self> {
        let cfg = ChannelConfig::new(sigmas, constraint(kind, scale, alpha)?).map_err(to_py)?;
        let opts = BoundOptions {
            refine,
            ..BoundOptions::default()
        };
        Ok(Self { cfg, opts })
    }

    #[getter]
    fn users(&self) -> usize {
        self.cfg.users()
    }

    #[getter]
    fn sigmas(&self) -> Vec<f64> {
        self.cfg.sigmas().to_vec()
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.cfg.constraint().kind().label()
    }

    /// Superposition-coding inner boundary.
    #[pyo3(signature = (n_max=64, rho_points=128))]
    fn inner(&self, py: Python<'_>, n_max: u64, rho_points: usize) -> PyResult<Boundary> {
        let (cfg, opts) = (&self.cfg, self.opts);
        let b = py.detach(|| -> oibc_core::Result<RegionBoundary> {
            let kind = cfg.constraint().kind();
            if cfg.users() == 2 {
                return match kind {
                    ConstraintKind::Peak => inner_peak(cfg, n_max),
                    ConstraintKind::Average => inner_avg(cfg, &rho_grid(rho_points)),
                    ConstraintKind::Joint => inner_joint(cfg, n_max, opts),
                };
            }
            let k = cfg.users();
            Ok(match kind {
                ConstraintKind::Average => {
                    let rhos = rho_vector_grid(k, per_axis(k, rho_points))?;
                    rho_boundary(BoundKind::Inner, kind, &k_inner_avg(cfg, &rhos)?)
                }
                _ => {
                    let splits = split_grid(k, &DEFAULT_SPLITS, DEFAULT_SPLIT_PRODUCT_CAP)?;
                    let pts = if kind == ConstraintKind::Peak {
                        k_inner_peak(cfg, &splits)?
                    } else {
                        k_inner_joint(cfg, &splits, opts)?
                    };
                    split_boundary(BoundKind::Inner, kind, &pts)
                }
            })
        });
        Ok(Boundary::from_core(b.map_err(to_py)?))
    }

    /// Outer boundary over a grid of `rho_points` power fractions per axis.
    #[pyo3(signature = (rho_points=128))]
    fn outer(&self, py: Python<'_>, rho_points: usize) -> PyResult<Boundary> {
        self.rho_family(py, BoundKind::Outer, rho_points)
    }

    /// High-SNR approximation of the boundary.
    #[pyo3(signature = (rho_points=128))]
    fn asymptotic(&self, py: Python<'_>, rho_points: usize) -> PyResult<Boundary> {
        self.rho_family(py, BoundKind::Asymptotic, rho_points)
    }

    /// `(max_vertical, relative_area)` between a two-user inner boundary and the outer region.
    fn gap(&self, inner: &Boundary) -> PyResult<(f64, f64)> {
        let g = boundary_gap(&self.cfg, &inner.core, self.opts).map_err(to_py)?;
        Ok((g.max_vertical, g.relative_area))
    }

    /// Runs the numerical checks; each row is `(name, passed, measured, comparison, threshold)`.
    #[pyo3(signature = (n_max=64, rho_points=128, seed=0))]
    fn verify(&self, py: Python<'_>, n_max: u64, rho_points: usize, seed: u64) -> PyResult<Vec<CheckRow>> {
        let suite = SuiteConfig {
            n_max,
            rho_points,
            seed,
            opts: self.opts,
            ..SuiteConfig::new(self.cfg.clone())
        };
        let rows = py.detach(|| run_suite(&suite)).map_err(to_py)?;
        Ok(rows
            .into_iter()
            .map(|c| {
                (
                    c.name,
                    c.passed,
                    c.measured,
                    c.comparison.symbol().to_owned(),
                    c.threshold,
                )
            })
            .collect())
    }

    fn __repr__(&self) -> String {
        format!("Channel(sigmas={:?}, kind={:?})", self.cfg.sigmas(), self.kind())
    }
}

impl Channel {
    fn rho_family(&self, py: Python<'_>, which: BoundKind, rho_points: usize) -> PyResult<Boundary> {
        let (cfg, opts) = (&self.cfg, self.opts);
        let b = py.detach(|| -> oibc_core::Result<RegionBoundary> {
            let kind = cfg.constraint().kind();
            if cfg.users() == 2 {
                let grid = rho_grid(rho_points);
                return match (which, kind) {
                    (BoundKind::Outer, ConstraintKind::Peak) => outer_peak(cfg, &grid),
                    (BoundKind::Outer, ConstraintKind::Average) => outer_avg(cfg, &grid),
                    (BoundKind::Outer, ConstraintKind::Joint) => outer_joint(cfg, &grid, opts),
                    (_, ConstraintKind::Peak) => asymptotic_peak(cfg, &grid),
                    (_, ConstraintKind::Average) => asymptotic_avg(cfg, &grid),
                    (_, ConstraintKind::Joint) => asymptotic_joint(cfg, &grid),
                };
            }
            let k = cfg.users();
            let rhos = rho_vector_grid(k, per_axis(k, rho_points))?;
            let pts = match (which, kind) {
                (BoundKind::Outer, ConstraintKind::Peak) => k_outer_peak(cfg, &rhos)?,
                (BoundKind::Outer, ConstraintKind::Average) => k_outer_avg(cfg, &rhos)?,
                (BoundKind::Outer, ConstraintKind::Joint) => k_outer_joint(cfg, &rhos, opts)?,
                (_, ConstraintKind::Peak) => k_asymptotic_peak(cfg, &rhos)?,
                (_, ConstraintKind::Average) => k_asymptotic_avg(cfg, &rhos)?,
                (_, ConstraintKind::Joint) => k_asymptotic_joint(cfg, &rhos)?,
            };
            Ok(rho_boundary(which, kind, &pts))
        });
        Ok(Boundary::from_core(b.map_err(to_py)?))
    }
}

#[pymodule]
fn pyoibc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(mu_star, m)?)?;
    m.add_function(wrap_pyfunction!(capacity_upper_bound, m)?)?;
    m.add_function(wrap_pyfunction!(capacity_asymptotic, m)?)?;
    m.add_function(wrap_pyfunction!(decomposition_samples, m)?)?;
    m.add_class::<Channel>()?;
    m.add_class::<Boundary>()?;
    Ok(())
}
