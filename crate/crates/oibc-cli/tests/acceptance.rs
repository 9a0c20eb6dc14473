//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Reference values are computed here from closed forms rather than taken from the library.

use std::f64::consts::{E, PI};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use oibc_core::region::k_user::{
    hyperplane_last_rate, k_asymptotic_avg, k_asymptotic_joint, k_asymptotic_peak, k_inner_avg,
    k_inner_joint, k_inner_peak, k_outer_avg, k_outer_joint, k_outer_peak, outer_slack, split_grid,
    SplitVectorN, SplitVectorRho, DEFAULT_SPLITS, DEFAULT_SPLIT_PRODUCT_CAP,
};
use oibc_core::region::two_user::{
    asymptotic_avg, asymptotic_joint, asymptotic_peak, boundary_gap, inner_avg, inner_joint, inner_peak,
    inner_split_points, outer_avg, outer_joint, outer_peak,
};
use oibc_core::region::{rho_grid, BoundOptions, RegionBoundary};
use oibc_core::scalar::{cap_ub_avg, cap_ub_bpower, cap_ub_peak, solve_mu_star};
use oibc_core::source::{
    decompose_exponential, decompose_texp, decompose_uniform, Decomposition, SecondFactor, SourceSpec,
};
use oibc_core::verify::mi_split;
use oibc_core::verify::QuadratureSpec;
use oibc_core::{ChannelConfig, ConstraintKind, IntensityConstraint, MuStar};
use serde_json::Value;

const ALPHA: f64 = 0.4;
const TWO_PI_E: f64 = 2.0 * PI * E;

const MU_TOL: f64 = 1e-12;
const CONVOLUTION_TOL: f64 = 1e-9;
const CONVOLUTION_GRID: usize = 10_000;
const KS_SAMPLES: usize = 100_000;
const KS_CRITICAL_001: f64 = 1.9495;
const MI_TOL: f64 = 1e-6;
const NESTING_TOL: f64 = 1e-9;
const PINCH_GAP: f64 = 0.05;
const MONOTONE_TOL: f64 = -1e-9;
const HYPERPLANE_TOL: f64 = 0.02;
const RECURSION_TOL: f64 = 1e-6;
const REDUCTION_TOL: f64 = 1e-12;
const CORNER_TOL: f64 = 1e-9;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn db(x: f64) -> f64 {
    10f64.powf(x / 20.0)
}

fn constraint(kind: ConstraintKind, scale: f64) -> IntensityConstraint {
    match kind {
        ConstraintKind::Peak => IntensityConstraint::peak(scale),
        ConstraintKind::Average => IntensityConstraint::average(scale),
        ConstraintKind::Joint => IntensityConstraint::joint(scale, ALPHA),
    }
    .unwrap()
}

fn pair(kind: ConstraintKind, snr_db: f64) -> ChannelConfig {
    ChannelConfig::two_user(1.0, 2.0, constraint(kind, db(snr_db))).unwrap()
}

const KINDS: [ConstraintKind; 3] = [
    ConstraintKind::Peak,
    ConstraintKind::Average,
    ConstraintKind::Joint,
];

fn within(start: Instant, limit: Duration, detail: String, ok: bool) -> Outcome {
    let took = start.elapsed();
    let detail = format!(
        "{detail}; {:.2}s (limit {}s)",
        took.as_secs_f64(),
        limit.as_secs()
    );
    if ok && took <= limit {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn mu_residual(mu: f64, alpha: f64) -> f64 {
    1.0 / mu - (-mu).exp() / (1.0 - (-mu).exp()) - alpha
}

fn mu_star_identity() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let alpha = 0.01 + 0.49 * (i as f64 + 1.0) / 51.0;
        let mu = solve_mu_star(alpha).map_err(|e| e.to_string())?.value;
        worst = worst.max(mu_residual(mu, alpha).abs());
    }
    within(
        start,
        Duration::from_secs(1),
        format!("max residual {worst:.3e}"),
        worst <= MU_TOL,
    )
}

// Supports are half-open so adjacent pieces of a split never overlap on a grid point.
fn uniform_pdf(a: f64, x: f64) -> f64 {
    if (0.0..a).contains(&x) {
        1.0 / a
    } else {
        0.0
    }
}

fn texp_pdf(a: f64, mu: f64, x: f64) -> f64 {
    if (0.0..a).contains(&x) {
        let l = mu / a;
        l * (-l * x).exp() / -(-mu).exp_m1()
    } else {
        0.0
    }
}

fn exp_pdf(m: f64, x: f64) -> f64 {
    if x >= 0.0 {
        (-x / m).exp() / m
    } else {
        0.0
    }
}

fn pdf(law: &SourceSpec, x: f64) -> f64 {
    match *law {
        SourceSpec::Uniform { amplitude } => uniform_pdf(amplitude, x),
        SourceSpec::TruncatedExponential { amplitude, mu } => texp_pdf(amplitude, mu, x),
        SourceSpec::Exponential { mean } => exp_pdf(mean, x),
    }
}

fn cdf(law: &SourceSpec, x: f64) -> f64 {
    match *law {
        SourceSpec::Uniform { amplitude } => (x / amplitude).clamp(0.0, 1.0),
        SourceSpec::TruncatedExponential { amplitude, mu } => {
            let x = x.clamp(0.0, amplitude);
            (-mu * x / amplitude).exp_m1() / (-mu).exp_m1()
        }
        SourceSpec::Exponential { mean } => {
            if x <= 0.0 {
                0.0
            } else {
                -(-x / mean).exp_m1()
            }
        }
    }
}

/// Density of the decomposition's sum on a point; the exponential pair convolves in closed form.
fn grid_convolution(d: &Decomposition, x: f64) -> f64 {
    match &d.second {
        SecondFactor::Atoms(list) => list
            .atoms()
            .iter()
            .map(|a| a.mass * pdf(&d.continuous, x - a.location))
            .sum(),
        SecondFactor::AtomWithTail { atom_mass, tail_mean } => {
            let SourceSpec::Exponential { mean: m1 } = d.continuous else {
                unreachable!("an exponential tail pairs with an exponential part")
            };
            let m2 = *tail_mean;
            let both = ((-x / m2).exp() - (-x / m1).exp()) / (m2 - m1);
            atom_mass * exp_pdf(m1, x) + (1.0 - atom_mass) * both.max(0.0) * (x >= 0.0) as u8 as f64
        }
    }
}

fn decompositions() -> Result<Vec<(SourceSpec, Decomposition)>, String> {
    let e = |x: oibc_core::Error| x.to_string();
    let mut out = Vec::new();
    for a in [4.0, db(30.0)] {
        for n in [1, 2, 3, 4, 8, 16, 64] {
            out.push((
                SourceSpec::uniform(a).map_err(e)?,
                decompose_uniform(a, n).map_err(e)?,
            ));
        }
        for alpha in [0.1, 0.25, ALPHA] {
            let mu = solve_mu_star(alpha).map_err(e)?.value;
            for n in [1, 2, 4, 8, 16] {
                out.push((
                    SourceSpec::truncated_exponential(a, mu).map_err(e)?,
                    decompose_texp(a, mu, n).map_err(e)?,
                ));
            }
        }
        for rho in [0.1, 0.5, 0.9, 1.0] {
            out.push((
                SourceSpec::exponential(a).map_err(e)?,
                decompose_exponential(a, rho * a).map_err(e)?,
            ));
        }
    }
    Ok(out)
}

fn decomposition_fidelity() -> Outcome {
    let start = Instant::now();
    let cases = decompositions()?;
    let mut conv: f64 = 0.0;
    let mut ks: f64 = 0.0;
    for (i, (parent, d)) in cases.iter().enumerate() {
        let hi = if parent.upper().is_finite() {
            parent.upper()
        } else {
            20.0 * parent.mean()
        };
        let h = hi / CONVOLUTION_GRID as f64;
        // golden-ratio offset keeps grid points off every split edge `i A / N`
        for j in 0..CONVOLUTION_GRID {
            let x = (j as f64 + 0.618_033_988_749_895) * h;
            conv = conv.max((grid_convolution(d, x) - pdf(parent, x)).abs());
        }
        let mut s = d.sample_sum(KS_SAMPLES, 1000 + i as u64);
        s.sort_by(f64::total_cmp);
        let n = s.len() as f64;
        for (j, &x) in s.iter().enumerate() {
            let f = cdf(parent, x);
            ks = ks.max((j as f64 + 1.0) / n - f).max(f - j as f64 / n);
        }
    }
    let critical = KS_CRITICAL_001 / (KS_SAMPLES as f64).sqrt();
    within(
        start,
        Duration::from_secs(30),
        format!(
            "{} decompositions; max convolution error {conv:.3e}, max KS {ks:.4e} (critical {critical:.4e})",
            cases.len()
        ),
        conv <= CONVOLUTION_TOL && ks <= critical,
    )
}

fn achievability_certificates() -> Outcome {
    let start = Instant::now();
    let q = QuadratureSpec::default();
    let e = |x: oibc_core::Error| x.to_string();
    let mut worst = f64::INFINITY;
    let mut count = 0;
    for kind in KINDS {
        for snr in [10.0, 20.0, 30.0] {
            let cfg = pair(kind, snr);
            let scale = db(snr);
            let mut cases: Vec<(Decomposition, [f64; 2])> = Vec::new();
            match kind {
                ConstraintKind::Average => {
                    let rhos = [0.1, 0.5, 0.9];
                    let inner = inner_avg(&cfg, &rhos).map_err(e)?;
                    for (p, rho) in inner.points.iter().zip(rhos) {
                        assert_eq!(p.params[0], rho);
                        cases.push((
                            decompose_exponential(scale, rho * scale).map_err(e)?,
                            [p.rates[0], p.rates[1]],
                        ));
                    }
                }
                _ => {
                    let pts = inner_split_points(&cfg, 8, BoundOptions::default()).map_err(e)?;
                    for n in [1u64, 2, 4, 8] {
                        let d = if kind == ConstraintKind::Peak {
                            decompose_uniform(scale, n)
                        } else {
                            decompose_texp(scale, solve_mu_star(ALPHA).map_err(e)?.value, n)
                        }
                        .map_err(e)?;
                        cases.push((d, pts[n as usize - 1].rates));
                    }
                }
            }
            for (d, rates) in cases {
                let mi = mi_split(&d, 1.0, 2.0, &q).map_err(e)?;
                worst = worst.min(mi[0] - rates[0]).min(mi[1] - rates[1]);
                count += 2;
            }
        }
    }
    within(
        start,
        Duration::from_secs(120),
        format!("{count} certificates; min MI minus rate {worst:.3e}"),
        worst >= -MI_TOL,
    )
}

/// Outer R2 at `r1` by linear interpolation along a finely sampled outer boundary.
fn outer_at(outer: &RegionBoundary, r1: f64) -> f64 {
    let pts = &outer.points;
    if r1 <= pts[0].rates[0] {
        return pts[0].rates[1];
    }
    for w in pts.windows(2) {
        let (a, b) = (&w[0].rates, &w[1].rates);
        if r1 <= b[0] {
            let t = if b[0] > a[0] {
                (r1 - a[0]) / (b[0] - a[0])
            } else {
                1.0
            };
            return a[1] + t * (b[1] - a[1]);
        }
    }
    f64::NEG_INFINITY
}

fn inner_outer(
    kind: ConstraintKind,
    cfg: &ChannelConfig,
    grid: &[f64],
) -> oibc_core::Result<(RegionBoundary, RegionBoundary)> {
    let o = BoundOptions::default();
    Ok(match kind {
        ConstraintKind::Peak => (inner_peak(cfg, 64)?, outer_peak(cfg, grid)?),
        ConstraintKind::Average => (inner_avg(cfg, grid)?, outer_avg(cfg, grid)?),
        ConstraintKind::Joint => (inner_joint(cfg, 64, o)?, outer_joint(cfg, grid, o)?),
    })
}

fn region_nesting() -> Outcome {
    let start = Instant::now();
    let e = |x: oibc_core::Error| x.to_string();
    let fine = rho_grid(20_001);
    let grid = rho_grid(512);
    let mut worst2 = f64::INFINITY;
    for kind in KINDS {
        for snr in [15.0, 30.0, 60.0] {
            let cfg = pair(kind, snr);
            let (inner, _) = inner_outer(kind, &cfg, &grid).map_err(e)?;
            let (_, outer) = inner_outer(kind, &cfg, &fine).map_err(e)?;
            for p in &inner.points {
                worst2 = worst2.min(outer_at(&outer, p.rates[0]) - p.rates[1]);
            }
        }
    }
    let mut worst3 = f64::INFINITY;
    let mut matched = f64::INFINITY;
    let splits = split_grid(3, &DEFAULT_SPLITS, DEFAULT_SPLIT_PRODUCT_CAP).map_err(e)?;
    for kind in [ConstraintKind::Peak, ConstraintKind::Joint] {
        for snr in [15.0, 30.0, 60.0] {
            let cfg = ChannelConfig::new(vec![1.0, 2.0, 4.0], constraint(kind, db(snr))).map_err(e)?;
            let o = BoundOptions::default();
            let inner = if kind == ConstraintKind::Peak {
                k_inner_peak(&cfg, &splits)
            } else {
                k_inner_joint(&cfg, &splits, o)
            }
            .map_err(e)?;
            let rhos: Vec<SplitVectorRho> = inner.iter().map(|(s, _)| s.matched_rho()).collect();
            let outer = if kind == ConstraintKind::Peak {
                k_outer_peak(&cfg, &rhos)
            } else {
                k_outer_joint(&cfg, &rhos, o)
            }
            .map_err(e)?;
            for ((_, r_in), (_, r_out)) in inner.iter().zip(&outer) {
                worst3 = worst3.min(outer_slack(&cfg, r_in, o).map_err(e)?);
                let gap = r_in
                    .iter()
                    .zip(r_out)
                    .map(|(i, o)| o - i)
                    .fold(f64::INFINITY, f64::min);
                matched = matched.min(gap);
            }
        }
    }
    within(
        start,
        Duration::from_secs(60),
        format!(
            "two-user min slack {worst2:.3e}; K=3 min outer membership slack {worst3:.3e} \
             (componentwise at matched rho {matched:.3e}, informational)"
        ),
        worst2 >= -NESTING_TOL && worst3 >= -NESTING_TOL,
    )
}

fn max_gap(kind: ConstraintKind, snr: f64) -> oibc_core::Result<f64> {
    let cfg = pair(kind, snr);
    let (inner, _) = inner_outer(kind, &cfg, &rho_grid(512))?;
    Ok(boundary_gap(&cfg, &inner, BoundOptions::default())?.max_vertical)
}

fn high_snr_pinch() -> Outcome {
    let start = Instant::now();
    let mut parts = Vec::new();
    let mut ok = true;
    for kind in KINDS {
        let g30 = max_gap(kind, 30.0).map_err(|e| e.to_string())?;
        let g60 = max_gap(kind, 60.0).map_err(|e| e.to_string())?;
        ok &= g60 <= PINCH_GAP && g60 < g30;
        parts.push(format!("{} gap 30dB {g30:.4} 60dB {g60:.4}", kind.label()));
    }
    within(
        start,
        Duration::from_secs(120),
        format!("{} (need 60dB <= {PINCH_GAP})", parts.join(", ")),
        ok,
    )
}

fn appendix_monotone() -> Outcome {
    let start = Instant::now();
    let mut worst = f64::INFINITY;
    for alpha in [0.1, 0.25, 0.4] {
        let mu = solve_mu_star(alpha).map_err(|e| e.to_string())?.value;
        for snr in [1e2, 1e3] {
            let c = |rho: f64| {
                let m = MuStar {
                    value: rho * mu,
                    residual: 0.0,
                };
                cap_ub_bpower(rho * snr, 1.0, &m, false).map(|v| v.nats())
            };
            let h = 0.01;
            let vals: Vec<f64> = (1..=99)
                .map(|i| c(i as f64 * h))
                .collect::<Result<_, _>>()
                .map_err(|e| e.to_string())?;
            for w in vals.windows(2) {
                worst = worst.min((w[1] - w[0]) / h);
            }
        }
    }
    within(
        start,
        Duration::from_secs(5),
        format!("min finite-difference slope {worst:.4e}"),
        worst >= MONOTONE_TOL,
    )
}

/// `sum_m (s_m^2/s_K^2)(e^{2R_m} - 1) prod_{n>m} e^{2R_n}`, summed term by term.
fn power_recursion(sigmas: &[f64], rates: &[f64], k: usize) -> f64 {
    let sk2 = sigmas.last().unwrap().powi(2);
    (0..k)
        .map(|m| {
            let tail: f64 = rates[m + 1..k].iter().map(|r| (2.0 * r).exp()).product();
            sigmas[m].powi(2) / sk2 * (2.0 * rates[m]).exp_m1() * tail
        })
        .sum()
}

fn hyperplane() -> Outcome {
    let start = Instant::now();
    let e = |x: oibc_core::Error| x.to_string();
    let sigmas = vec![1.0, 2.0, 4.0];

    let cfg60 =
        ChannelConfig::new(sigmas.clone(), IntensityConstraint::peak(db(60.0)).map_err(e)?).map_err(e)?;
    let a60 = db(60.0);
    let mut rec: f64 = 0.0;
    let grid: Vec<SplitVectorRho> = {
        let axis = rho_grid(21);
        let mut v = Vec::new();
        for (i, &x) in axis.iter().enumerate() {
            for &y in &axis[i..] {
                v.push(SplitVectorRho::from_interior(&[x, y]).map_err(e)?);
            }
        }
        v
    };
    for (r, rates) in k_outer_peak(&cfg60, &grid).map_err(e)? {
        for j in 1..3 {
            let t = (2.0 * cap_ub_peak(r.rhos()[j] * a60, 4.0).map_err(e)?.nats()).exp_m1();
            if t > 0.0 {
                rec = rec.max((power_recursion(&sigmas, &rates, j) - t).abs() / t);
            }
        }
    }

    let a80 = db(80.0);
    let cfg80 = ChannelConfig::new(sigmas.clone(), IntensityConstraint::peak(a80).map_err(e)?).map_err(e)?;
    let line = 0.5 * (a80 * a80 / TWO_PI_E).ln_1p();
    let full = 0.5 * (a80 * a80 / (TWO_PI_E * 16.0)).ln_1p();
    let axis: Vec<f64> = (0..=18).map(|i| 0.1 + 0.05 * i as f64).collect();
    let mut interior = Vec::new();
    for (i, &x) in axis.iter().enumerate() {
        for &y in &axis[i..] {
            interior.push(SplitVectorRho::from_interior(&[x, y]).map_err(e)?);
        }
    }
    let mut sum_err: f64 = 0.0;
    let mut slope_err: f64 = 0.0;
    let mut last_err: f64 = 0.0;
    let h = 1e-4;
    for (_, rates) in k_asymptotic_peak(&cfg80, &interior).map_err(e)? {
        sum_err = sum_err.max((rates.iter().sum::<f64>() - line).abs());
        let last = |prefix: &[f64]| full - 0.5 * power_recursion(&sigmas, prefix, 2).ln_1p();
        let base = last(&rates[..2]);
        last_err = last_err.max((base - hyperplane_last_rate(&cfg80, &rates[..2]).map_err(e)?).abs());
        for j in 0..2 {
            let mut bumped = rates[..2].to_vec();
            bumped[j] += h;
            slope_err = slope_err.max(((last(&bumped) - base) / h + 1.0).abs());
        }
    }
    within(
        start,
        Duration::from_secs(10),
        format!(
            "sum-rate error {sum_err:.3e}, slope error {slope_err:.3e}, recursion rel error {rec:.3e}, \
             library last-rate agreement {last_err:.1e}"
        ),
        sum_err <= HYPERPLANE_TOL && slope_err <= HYPERPLANE_TOL && rec <= RECURSION_TOL && last_err <= 1e-9,
    )
}

fn rates_at(b: &RegionBoundary, rho: f64) -> Option<&[f64]> {
    b.points
        .iter()
        .find(|p| p.params[0] == rho)
        .map(|p| p.rates.as_slice())
}

fn k_two_reduction() -> Outcome {
    let start = Instant::now();
    let e = |x: oibc_core::Error| x.to_string();
    let grid = rho_grid(129);
    let rhos: Vec<SplitVectorRho> = grid
        .iter()
        .map(|&r| SplitVectorRho::from_interior(&[r]))
        .collect::<Result<_, _>>()
        .map_err(e)?;
    let splits: Vec<SplitVectorN> = (1..=64)
        .map(|n| SplitVectorN::new(vec![n]))
        .collect::<Result<_, _>>()
        .map_err(e)?;
    let o = BoundOptions::default();
    let mut worst: f64 = 0.0;
    let mut compared = 0usize;
    let mut cmp = |a: &[f64], b: Option<&[f64]>| -> Result<(), String> {
        let b = b.ok_or("no matching two-user point")?;
        for (x, y) in a.iter().zip(b) {
            worst = worst.max((x - y).abs());
        }
        compared += 1;
        Ok(())
    };
    for kind in KINDS {
        for snr in [15.0, 30.0, 60.0] {
            let cfg = pair(kind, snr);
            let (k_outer, k_asym, outer, asym) = match kind {
                ConstraintKind::Peak => (
                    k_outer_peak(&cfg, &rhos),
                    k_asymptotic_peak(&cfg, &rhos),
                    outer_peak(&cfg, &grid),
                    asymptotic_peak(&cfg, &grid),
                ),
                ConstraintKind::Average => (
                    k_outer_avg(&cfg, &rhos),
                    k_asymptotic_avg(&cfg, &rhos),
                    outer_avg(&cfg, &grid),
                    asymptotic_avg(&cfg, &grid),
                ),
                ConstraintKind::Joint => (
                    k_outer_joint(&cfg, &rhos, o),
                    k_asymptotic_joint(&cfg, &rhos),
                    outer_joint(&cfg, &grid, o),
                    asymptotic_joint(&cfg, &grid),
                ),
            };
            let (outer, asym) = (outer.map_err(e)?, asym.map_err(e)?);
            for (r, rates) in k_outer.map_err(e)? {
                cmp(&rates, rates_at(&outer, r.rhos()[1]))?;
            }
            for (r, rates) in k_asym.map_err(e)? {
                cmp(&rates, rates_at(&asym, r.rhos()[1]))?;
            }
            match kind {
                ConstraintKind::Average => {
                    let inner = inner_avg(&cfg, &grid).map_err(e)?;
                    for (r, rates) in k_inner_avg(&cfg, &rhos).map_err(e)? {
                        cmp(&rates, rates_at(&inner, r.rhos()[1]))?;
                    }
                }
                _ => {
                    let pts = inner_split_points(&cfg, 64, o).map_err(e)?;
                    let k_in = if kind == ConstraintKind::Peak {
                        k_inner_peak(&cfg, &splits)
                    } else {
                        k_inner_joint(&cfg, &splits, o)
                    }
                    .map_err(e)?;
                    for ((_, rates), p) in k_in.iter().zip(&pts) {
                        cmp(rates, Some(&p.rates))?;
                    }
                }
            }
        }
    }
    within(
        start,
        Duration::from_secs(5),
        format!("{compared} tuples; max deviation {worst:.3e}"),
        worst <= REDUCTION_TOL,
    )
}

fn oibc(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_oibc"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "oibc {} exited {:?}: {}",
            args.join(" "),
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(out.stdout)
}

/// Expected first and last `(R1, R2)` points of each emitted boundary.
///
/// Outer corners map the weak receiver's single-user bound through the noise ratio; the mean
/// constraint's bound stays positive at zero power, which shifts the zero-power end.
fn corners(kind: ConstraintKind, scale: f64, bound: &str) -> ([f64; 2], [f64; 2]) {
    let mu = solve_mu_star(ALPHA).unwrap();
    let (s1, s2) = (1.0f64, 2.0f64);
    let high_snr = |sigma: f64| -> f64 {
        let p2 = match kind {
            ConstraintKind::Peak => scale * scale,
            ConstraintKind::Average => E * E * scale * scale,
            ConstraintKind::Joint => {
                let m = mu.value;
                let h = (scale * -(-m).exp_m1() / m).ln() + m * ALPHA;
                (2.0 * h).exp()
            }
        };
        0.5 * (p2 / (TWO_PI_E * sigma * sigma)).ln_1p()
    };
    let single = |x: f64, sigma: f64| -> f64 {
        match kind {
            ConstraintKind::Peak => cap_ub_peak(x, sigma),
            ConstraintKind::Average => cap_ub_avg(x, sigma),
            ConstraintKind::Joint => cap_ub_bpower(x, sigma, &mu, false),
        }
        .unwrap()
        .nats()
    };
    let floor = single(0.0, s2);
    let through = |c: f64| 0.5 * ((s2 / s1).powi(2) * (2.0 * c).exp_m1()).ln_1p();
    match bound {
        "outer" => (
            [through(floor), single(scale, s2) - floor],
            [through(single(scale, s2)), 0.0],
        ),
        "inner" => ([0.0, high_snr(s2) - floor], [high_snr(s1), 0.0]),
        _ => ([0.0, high_snr(s2)], [high_snr(s1), 0.0]),
    }
}

fn figure_shapes() -> Outcome {
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut ok = true;
    for (kind, flag) in [
        (ConstraintKind::Peak, "--amplitude-db"),
        (ConstraintKind::Average, "--mean-db"),
        (ConstraintKind::Joint, "--amplitude-db"),
    ] {
        let mut args = vec![
            "region",
            "--sigma",
            "1,2",
            "--constraint",
            kind.label(),
            flag,
            "15,30",
            "--format",
            "json",
        ];
        if kind == ConstraintKind::Joint {
            args.extend(["--alpha", "0.4"]);
        }
        let v: Value = serde_json::from_slice(&oibc(&args)?).map_err(|e| e.to_string())?;
        let mut corner_err: f64 = 0.0;
        for b in v["boundaries"].as_array().ok_or("no boundaries")? {
            let pts: Vec<[f64; 2]> = b["points"]
                .as_array()
                .unwrap()
                .iter()
                .map(|p| [p["rates"][0].as_f64().unwrap(), p["rates"][1].as_f64().unwrap()])
                .collect();
            let monotone = pts.windows(2).all(|w| w[1][0] >= w[0][0] && w[1][1] <= w[0][1]);
            ok &= monotone && pts.len() >= 2;
            let scale = db(b["snr_db"].as_f64().unwrap());
            let (first, last) = corners(kind, scale, b["kind"].as_str().unwrap());
            let got = [pts[0], pts[pts.len() - 1]];
            for (g, w) in got.iter().zip([first, last]) {
                corner_err = corner_err.max((g[0] - w[0]).abs()).max((g[1] - w[1]).abs());
            }
        }
        ok &= corner_err <= CORNER_TOL;
        let gaps: Vec<f64> = v["metadata"]["snr"]
            .as_array()
            .unwrap()
            .iter()
            .map(|s| s["gap"]["relative_area"].as_f64().unwrap())
            .collect();
        ok &= gaps.len() == 2 && gaps[1] < gaps[0];
        notes.push(format!(
            "{} corner error {corner_err:.1e}, area gap {:.4} -> {:.4}",
            kind.label(),
            gaps[0],
            gaps[1]
        ));
    }
    within(start, Duration::from_secs(60), notes.join("; "), ok)
}

fn determinism() -> Outcome {
    let start = Instant::now();
    let runs: [&[&str]; 4] = [
        &["verify"],
        &[
            "verify",
            "--constraint",
            "joint",
            "--users",
            "3",
            "--seed",
            "7",
            "--format",
            "json",
        ],
        &[
            "region",
            "--constraint",
            "avg",
            "--mean-db",
            "15,30",
            "--format",
            "json",
        ],
        &[
            "region",
            "--users",
            "3",
            "--constraint",
            "joint",
            "--alpha",
            "0.4",
        ],
    ];
    let mut same = true;
    for args in runs {
        same &= oibc(args)? == oibc(args)?;
    }
    within(
        start,
        Duration::from_secs(600),
        format!("{} commands run twice", runs.len()),
        same,
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("mu-star identity", mu_star_identity),
        ("decomposition fidelity", decomposition_fidelity),
        ("achievability certificates", achievability_certificates),
        ("region nesting", region_nesting),
        ("high-SNR pinch", high_snr_pinch),
        ("scaled-input monotonicity", appendix_monotone),
        ("K=3 hyperplane", hyperplane),
        ("K=2 reduction", k_two_reduction),
        ("figure shapes", figure_shapes),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(d) => println!("PASS {:>2} {name}: {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {d}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
