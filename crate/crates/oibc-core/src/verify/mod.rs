//! Numerical certificates for the bounds: entropies by quadrature, EPI slacks, Monte Carlo.

pub mod entropy;
pub mod mixture;
pub mod quadrature;
pub mod suite;

pub use entropy::{
    diff_entropy_quadrature, epi_check, mi_sc_user1, mi_sc_user2, mi_split, monte_carlo_crosscheck,
    noisy_entropy, EpiCheck, McCheck,
};
pub use mixture::{InputLaw, MixtureDensity};
pub use quadrature::{QuadratureSpec, Rule};
pub use suite::{run_suite, CheckResult, SuiteConfig};
