//! One named check per stability inequality. Each check builds (or
//! receives) instances, computes both sides with full provenance, and
//! emits [`CheckReport`] rows; `verify all` in the CLI walks the registry
//! returned by [`all_check_ids`].
//!
//! Checks with explicit constants assert `lhs ≤ rhs (1 + tolerance)` on
//! every instance. Checks whose constants are not explicit anywhere
//! (map-stability regimes) are exponent-consistency checks: they fit a
//! log–log slope over a sweep and compare against the predicted exponent
//! minus a slack, never asserting a constant.

use crate::convexfun::{
    gradient_lipschitz_bound, holder_modulus_1d, holder_modulus_2d, moreau_yosida,
    SampledFunction1D,
};
use crate::crofton::{
    crofton_boundary, fubini_area, gn_check_1d, gn_check_nd, sample_lines,
    sample_lines_orthogonal, GnNdReport, ScalarField,
};
use crate::geometry::ConvexDomain;
use crate::lot::{
    bracket, dual_difference, embed, lot_distance, lp_norm_grid, variance, variance_grid,
    EmbeddedMeasure,
};
use crate::measures::{
    chi2_divergence, w1_discrete, w2_discrete, wasserstein_1d, DiscreteMeasure, GridDensity,
    Measure1D,
};
use crate::num::{dot, ksum, norm, Point};
use crate::otsolve::{
    self, brenier_1d, dual_gradient, dual_objective, l2_rho_sq_distance, monotone_map_1d,
    solve_semidiscrete, DualPotential, SolveOptions,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("degenerate data for exponent fit: all samples must be positive")]
    DegenerateData,
    #[error("unknown check id `{0}`")]
    UnknownCheck(String),
    #[error("unsupported regime `{0}`")]
    RegimeUnsupported(String),
    #[error("potential is not strongly convex on the quadrature grid")]
    NotStronglyConvex,
    #[error(transparent)]
    Solve(#[from] otsolve::SolveError),
    #[error(transparent)]
    Lot(#[from] crate::lot::LotError),
    #[error(transparent)]
    Measure(#[from] crate::measures::MeasureError),
    #[error(transparent)]
    Crofton(#[from] crate::crofton::CroftonError),
}

/// Absolute floor replacing the ratio test when `rhs = 0`.
pub const DEGENERATE_FLOOR: f64 = 1e-9;

/// Outcome of one inequality evaluation on one instance.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub check: String,
    pub instance: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`; NaN flags a degenerate (rhs = 0) instance.
    pub ratio: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Named auxiliary quantities (constants, exponents, moduli).
    pub aux: Vec<(String, f64)>,
    /// Input digest: seeds, resolutions.
    pub inputs: String,
}

impl CheckReport {
    /// `pass ⇔ lhs ≤ rhs (1 + tolerance)`, with the absolute floor when
    /// `rhs = 0`.
    pub fn ratio_check(
        check: impl Into<String>,
        instance: impl Into<String>,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
        aux: Vec<(String, f64)>,
        inputs: impl Into<String>,
    ) -> Self {
        let (ratio, pass) = if rhs == 0.0 {
            (f64::NAN, lhs.abs() <= DEGENERATE_FLOOR)
        } else {
            (lhs / rhs, lhs <= rhs * (1.0 + tolerance))
        };
        Self {
            check: check.into(),
            instance: instance.into(),
            lhs,
            rhs,
            ratio,
            tolerance,
            pass,
            aux,
            inputs: inputs.into(),
        }
    }

    /// A bound check where `lhs` must not exceed `rhs` by more than an
    /// absolute `slack` (used for comparisons with additive tolerances).
    pub fn slack_check(
        check: impl Into<String>,
        instance: impl Into<String>,
        lhs: f64,
        rhs: f64,
        slack: f64,
        aux: Vec<(String, f64)>,
        inputs: impl Into<String>,
    ) -> Self {
        let pass = lhs <= rhs + slack;
        let ratio = if rhs != 0.0 { lhs / rhs } else { f64::NAN };
        Self {
            check: check.into(),
            instance: instance.into(),
            lhs,
            rhs,
            ratio,
            tolerance: slack,
            pass,
            aux,
            inputs: inputs.into(),
        }
    }
}

/// Log–log least-squares fit used as an empirical Hölder exponent.
#[derive(Debug, Clone)]
pub struct HolderFit {
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
    pub samples: usize,
}

/// OLS of `log y` against `log x`. Requires ≥ 4 strictly positive samples.
pub fn fit_holder_exponent(samples: &[(f64, f64)]) -> Result<HolderFit, VerifyError> {
    if samples.len() < 4 || samples.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
        return Err(VerifyError::DegenerateData);
    }
    let n = samples.len() as f64;
    let lx: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
    let ly: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let mx = ksum(lx.iter().copied()) / n;
    let my = ksum(ly.iter().copied()) / n;
    let sxx = ksum(lx.iter().map(|x| (x - mx) * (x - mx)));
    let sxy = ksum(lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)));
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - (intercept + slope * x)).abs())
        .fold(0.0, f64::max);
    Ok(HolderFit {
        slope,
        intercept,
        max_residual,
        samples: samples.len(),
    })
}

/// Constant `e (d+1) 2^d` of the variance–bracket inequality.
pub fn variance_bracket_constant(d: usize) -> f64 {
    std::f64::consts::E * (d as f64 + 1.0) * 2f64.powi(d as i32)
}

/// Hölder exponent of the map stability estimate in the compact regime.
pub fn map_exponent_compact() -> f64 {
    1.0 / 6.0
}

/// Exponent `1/(2(11 - 8α))` for α-Hölder potentials with bounded fourth
/// moments.
pub fn map_exponent_holder(alpha: f64) -> f64 {
    1.0 / (2.0 * (11.0 - 8.0 * alpha))
}

/// Exponent `p/(6p + 16d)` under a bounded p-th moment, `p ≥ 4`, `p > d`.
pub fn map_exponent_moments(p: f64, d: usize) -> f64 {
    p / (6.0 * p + 16.0 * d as f64)
}

/// Exponent `(q-1)/(2(q(7-4α)-3))` of the 2q-moment variant.
pub fn map_exponent_q_moment(q: f64, alpha: f64) -> f64 {
    (q - 1.0) / (2.0 * (q * (7.0 - 4.0 * alpha) - 3.0))
}

/// Hölder exponent `1 - d/p` granted to the potential by a p-th moment.
pub fn potential_holder_exponent(d: usize, p: f64) -> f64 {
    1.0 - d as f64 / p
}

/// Suite-wide configuration: seeds, sizes and resolutions of every check.
#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub seed: u64,
    pub grid_1d: usize,
    pub grid_2d: usize,
    pub stability_pairs_1d: usize,
    pub stability_pairs_2d: usize,
    pub chi2_pairs: usize,
    pub gn1d_pairs: usize,
    pub gn2d_pairs: usize,
    pub gn2d_lines: usize,
    pub crofton_lines: usize,
    pub moreau_functions: usize,
    pub gradient_instances: usize,
    pub oracle_instances: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            grid_1d: 512,
            grid_2d: 256,
            stability_pairs_1d: 500,
            stability_pairs_2d: 500,
            chi2_pairs: 100,
            gn1d_pairs: 1000,
            gn2d_pairs: 100,
            gn2d_lines: 40_000,
            crofton_lines: 1_000_000,
            moreau_functions: 200,
            gradient_instances: 50,
            oracle_instances: 20,
        }
    }
}

impl SuiteConfig {
    /// Shrinks every instance count by `factor` (for quick runs); grid
    /// resolutions are left alone except the 2D grid, which drops one
    /// notch to keep smoke runs fast.
    pub fn scaled_down(mut self, factor: usize) -> Self {
        let f = factor.max(1);
        self.stability_pairs_1d = (self.stability_pairs_1d / f).max(4);
        self.stability_pairs_2d = (self.stability_pairs_2d / f).max(4);
        self.chi2_pairs = (self.chi2_pairs / f).max(4);
        self.gn1d_pairs = (self.gn1d_pairs / f).max(10);
        self.gn2d_pairs = (self.gn2d_pairs / f).max(3);
        self.crofton_lines = (self.crofton_lines / f).max(50_000);
        self.moreau_functions = (self.moreau_functions / f).max(10);
        self.gradient_instances = (self.gradient_instances / f).max(3);
        self.oracle_instances = (self.oracle_instances / f).max(3);
        if f > 1 {
            self.grid_2d = self.grid_2d.min(128);
            // the 3% line-vs-grid agreement needs real Monte Carlo effort
            // even in quick runs
            self.gn2d_lines = (self.gn2d_lines / 2).max(20_000);
        }
        self
    }
}

fn digest(cfg: &SuiteConfig, extra: &str) -> String {
    format!("seed={};{}", cfg.seed, extra)
}

// ---------------------------------------------------------------------
// random instances
// ---------------------------------------------------------------------

/// Random target: 2–10 atoms uniform in `[0,1]^d`, weights uniform on the
/// simplex (normalized exponentials). Draws whose smallest weight falls
/// below `min_weight` are rejected: weights under the grid-cell mass
/// quantum are outside the fidelity of whole-cell Laguerre masses (the
/// quantized optimum then prefers an empty cell).
pub fn random_measure(
    rng: &mut ChaCha8Rng,
    dim: usize,
    max_atoms: usize,
    min_weight: f64,
) -> DiscreteMeasure {
    let k = rng.gen_range(2..=max_atoms.max(2));
    loop {
        let pts: Vec<Point> = (0..k)
            .map(|_| {
                [
                    rng.gen_range(0.0..1.0),
                    if dim == 2 { rng.gen_range(0.0..1.0) } else { 0.0 },
                ]
            })
            .collect();
        if !separated(&pts, 0.01) {
            continue;
        }
        let mut ws: Vec<f64> = (0..k).map(|_| -f64::ln(rng.gen_range(1e-12..1.0))).collect();
        let s: f64 = ws.iter().sum();
        ws.iter_mut().for_each(|w| *w /= s);
        let drift = 1.0 - ws.iter().sum::<f64>();
        ws[0] += drift;
        if ws.iter().any(|&w| w < min_weight) {
            continue;
        }
        if let Ok(m) = DiscreteMeasure::new(pts, ws, dim) {
            return m;
        }
    }
}

/// Atoms closer than the grid spacing put their Laguerre boundary inside
/// a single cell, which whole-cell masses cannot resolve; generators keep
/// supports separated above that scale.
fn separated(pts: &[Point], min_gap: f64) -> bool {
    for (i, &p) in pts.iter().enumerate() {
        for &q in &pts[i + 1..] {
            if crate::num::dist(p, q) < min_gap {
                return false;
            }
        }
    }
    true
}

/// Random target with equal weights and a caller-chosen minimum support
/// separation (used where the grid solver's mass quantization must stay
/// well below every weight and the supports must stay grid-resolvable).
pub fn random_uniform_measure(
    rng: &mut ChaCha8Rng,
    dim: usize,
    max_atoms: usize,
    min_gap: f64,
) -> DiscreteMeasure {
    let k = rng.gen_range(2..=max_atoms.max(2));
    loop {
        let pts: Vec<Point> = (0..k)
            .map(|_| {
                [
                    rng.gen_range(0.0..1.0),
                    if dim == 2 { rng.gen_range(0.0..1.0) } else { 0.0 },
                ]
            })
            .collect();
        if !separated(&pts, min_gap) {
            continue;
        }
        if let Ok(m) = DiscreteMeasure::uniform_on(pts, dim) {
            return m;
        }
    }
}

fn random_convex_pl(rng: &mut ChaCha8Rng, max_breaks: usize, slope_bound: f64) -> SampledFunction1D {
    loop {
        let k = rng.gen_range(2..=max_breaks);
        let mut xs: Vec<f64> = (0..=k).map(|_| rng.gen_range(0.0..1.0)).collect();
        xs[0] = 0.0;
        xs[1] = 1.0;
        xs.sort_by(f64::total_cmp);
        xs.dedup_by(|a, b| (*a - *b).abs() < 1e-4);
        if xs.len() < 2 {
            continue;
        }
        let mut slopes: Vec<f64> = (0..xs.len() - 1)
            .map(|_| rng.gen_range(-slope_bound..slope_bound))
            .collect();
        slopes.sort_by(f64::total_cmp);
        let mut vals = vec![rng.gen_range(-1.0..1.0)];
        for (i, s) in slopes.iter().enumerate() {
            let v = vals[i] + s * (xs[i + 1] - xs[i]);
            vals.push(v);
        }
        return SampledFunction1D::new(xs, vals);
    }
}

/// 200-atom equal-weight discretization of the uniform measure on `[a, b]`.
pub fn discretized_uniform(a: f64, b: f64, atoms: usize) -> DiscreteMeasure {
    let pts: Vec<Point> = (0..atoms)
        .map(|j| [a + (b - a) * (j as f64 + 0.5) / atoms as f64, 0.0])
        .collect();
    DiscreteMeasure::uniform_on(pts, 1).expect("uniform atoms are valid")
}

/// `k×k` equal-weight atom grid on `[0,1]²` translated by `tau`.
pub fn coarse_grid_measure(k: usize, tau: Point) -> DiscreteMeasure {
    let pts: Vec<Point> = (0..k * k)
        .map(|i| {
            [
                ((i % k) as f64 + 0.5) / k as f64 + tau[0],
                ((i / k) as f64 + 0.5) / k as f64 + tau[1],
            ]
        })
        .collect();
    DiscreteMeasure::uniform_on(pts, 2).expect("grid atoms are valid")
}

// ---------------------------------------------------------------------
// stability suite (strong convexity + primal–dual + potential stability)
// ---------------------------------------------------------------------

/// Everything the variance/bracket inequalities need for one solved pair.
struct PairData {
    instance: String,
    var_psi: f64,
    var_phi: f64,
    bracket: f64,
    oscillation: f64,
    w1: f64,
    /// Divergence between the realized pushforwards when the supports
    /// coincide.
    chi2: Option<f64>,
    lp: Vec<(f64, f64, f64)>, // (p, lhs, rhs)
    density_ratio_sq: f64,
    diam: f64,
    dim: usize,
}

fn pair_data(
    rho: &GridDensity,
    mu0: &DiscreteMeasure,
    mu1: &DiscreteMeasure,
    instance: String,
) -> Result<PairData, VerifyError> {
    let opts = SolveOptions::default();
    let e0 = embed(rho, mu0, &opts)?;
    let e1 = embed(rho, mu1, &opts)?;
    let dd = dual_difference(&e0, &e1, rho);
    let var_psi = variance(&dd.values, &dd.masses);
    let br = bracket(&e0, &e1, rho);
    let phi0 = e0.transport.potential.max_affine(rho);
    let phi1 = e1.transport.potential.max_affine(rho);
    let (lo0, hi0) = phi0.extrema_on_domain();
    let (lo1, hi1) = phi1.extrema_on_domain();
    let oscillation = hi0.max(hi1) - lo0.min(lo1);
    let phi_diff: Vec<f64> = e1
        .transport
        .brenier_values
        .iter()
        .zip(&e0.transport.brenier_values)
        .map(|(a, b)| a - b)
        .collect();
    let var_phi = variance_grid(&phi_diff, rho);
    // distances between the realized pushforward measures: what the
    // potentials transport to exactly
    let t0 = e0.effective_target();
    let t1 = e1.effective_target();
    let w1 = if rho.dim() == 1 {
        wasserstein_1d(&Measure1D::Discrete(&t0), &Measure1D::Discrete(&t1), 1)
    } else {
        w1_discrete(&t0, &t1)?
    };
    let chi2 = chi2_divergence(&t1, &t0).ok();
    let mut lp = Vec::new();
    for p in [1.0, 2.0, 4.0] {
        let lhs = lp_norm_grid(&phi_diff, rho, p);
        let rhs = ksum(
            dd.values
                .iter()
                .zip(&dd.masses)
                .map(|(v, m)| m * v.abs().powf(p)),
        )
        .powf(1.0 / p);
        lp.push((p, lhs, rhs));
    }
    let (m_rho, big_rho) = rho.density_bounds();
    Ok(PairData {
        instance,
        var_psi,
        var_phi,
        bracket: br,
        oscillation,
        w1,
        chi2,
        lp,
        density_ratio_sq: (big_rho / m_rho) * (big_rho / m_rho),
        diam: rho.domain().diam(),
        dim: rho.dim(),
    })
}

fn stability_pairs(cfg: &SuiteConfig) -> Result<Vec<PairData>, VerifyError> {
    let rho1 = GridDensity::uniform(ConvexDomain::interval(0.0, 1.0).unwrap(), cfg.grid_1d)?;
    let rho2 = GridDensity::uniform(
        ConvexDomain::box2([0.0, 0.0], [1.0, 1.0]).unwrap(),
        cfg.grid_2d,
    )?;
    // pre-draw the instances sequentially for determinism, solve in parallel
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut tasks: Vec<(usize, DiscreteMeasure, DiscreteMeasure)> = Vec::new();
    for i in 0..cfg.stability_pairs_1d {
        let mu0 = random_measure(&mut rng, 1, 10, 1e-3);
        let mu1 = random_measure(&mut rng, 1, 10, 1e-3);
        tasks.push((i, mu0, mu1));
    }
    for i in 0..cfg.stability_pairs_2d {
        let mu0 = random_measure(&mut rng, 2, 10, 1e-3);
        let mu1 = random_measure(&mut rng, 2, 10, 1e-3);
        tasks.push((cfg.stability_pairs_1d + i, mu0, mu1));
    }
    tasks
        .par_iter()
        .map(|(i, mu0, mu1)| {
            let one_d = *i < cfg.stability_pairs_1d;
            let rho = if one_d { &rho1 } else { &rho2 };
            pair_data(
                rho,
                mu0,
                mu1,
                format!("pair={i};d={};atoms={}/{}", rho.dim(), mu0.len(), mu1.len()),
            )
        })
        .collect()
}

/// Strong convexity of the transport dual on one solved pair:
/// `Var_{μ⁰+μ¹}(ψ¹-ψ⁰) ≤ e(d+1)2^d (M_ρ/m_ρ)² (M_φ-m_φ) ⟨ψ⁰-ψ¹, μ¹-μ⁰⟩`.
pub fn check_strong_convexity(
    rho: &GridDensity,
    mu0: &DiscreteMeasure,
    mu1: &DiscreteMeasure,
) -> Result<CheckReport, VerifyError> {
    let data = pair_data(rho, mu0, mu1, "single".into())?;
    Ok(strong_convexity_report(&data, "res=custom"))
}

fn strong_convexity_report(d: &PairData, inputs: &str) -> CheckReport {
    let c_d = variance_bracket_constant(d.dim);
    let rhs = c_d * d.density_ratio_sq * d.oscillation * d.bracket;
    CheckReport::ratio_check(
        "strong-convexity",
        d.instance.clone(),
        d.var_psi,
        rhs,
        1e-3,
        vec![
            ("constant".into(), c_d),
            ("oscillation".into(), d.oscillation),
            ("bracket".into(), d.bracket),
        ],
        inputs,
    )
}

/// Potential stability on one solved pair, in either distance mode.
pub fn check_potential_stability(
    rho: &GridDensity,
    mu0: &DiscreteMeasure,
    mu1: &DiscreteMeasure,
    chi2_mode: bool,
) -> Result<CheckReport, VerifyError> {
    let data = pair_data(rho, mu0, mu1, "single".into())?;
    let c_d = variance_bracket_constant(data.dim);
    let base = c_d * data.density_ratio_sq * data.oscillation;
    if chi2_mode {
        let div = data.chi2.ok_or(VerifyError::Measure(
            crate::measures::MeasureError::NotAbsolutelyContinuous,
        ))?;
        let rhs = base * base * div;
        Ok(CheckReport::ratio_check(
            "potential-stability-chi2",
            data.instance,
            data.var_psi.max(data.var_phi),
            rhs,
            1e-3,
            vec![("chi2".into(), div), ("var_phi".into(), data.var_phi)],
            "res=custom",
        ))
    } else {
        let rhs = base * data.diam * data.w1;
        Ok(CheckReport::ratio_check(
            "potential-stability-w1",
            data.instance,
            data.var_psi.max(data.var_phi),
            rhs,
            1e-3,
            vec![("w1".into(), data.w1), ("var_phi".into(), data.var_phi)],
            "res=custom",
        ))
    }
}

/// The three inequality families evaluated on one shared random suite of
/// solved pairs (the solves dominate the cost, so callers that need all
/// of them should run the battery once).
pub struct StabilityBattery {
    pub strong_convexity: Vec<CheckReport>,
    pub primal_dual: Vec<CheckReport>,
    pub potential_w1: Vec<CheckReport>,
    pub potential_chi2: Vec<CheckReport>,
}

pub fn run_stability_battery(cfg: &SuiteConfig) -> Result<StabilityBattery, VerifyError> {
    let inputs = digest(cfg, &format!("res={}x{}", cfg.grid_1d, cfg.grid_2d));
    let mut strong_convexity = Vec::new();
    let mut primal_dual = Vec::new();
    let mut potential_w1 = Vec::new();
    for d in stability_pairs(cfg)? {
        strong_convexity.push(strong_convexity_report(&d, &inputs));
        for &(p, lhs, rhs) in &d.lp {
            primal_dual.push(CheckReport::slack_check(
                "primal-dual-comparison",
                format!("{};p={p}", d.instance),
                lhs,
                rhs,
                1e-3,
                vec![],
                &inputs,
            ));
        }
        primal_dual.push(CheckReport::slack_check(
            "primal-dual-comparison",
            format!("{};variance-chain", d.instance),
            d.var_phi,
            d.var_psi,
            1e-3,
            vec![],
            &inputs,
        ));
        let c_d = variance_bracket_constant(d.dim);
        let rhs = c_d * d.density_ratio_sq * d.oscillation * d.diam * d.w1;
        potential_w1.push(CheckReport::ratio_check(
            "potential-stability-w1",
            d.instance.clone(),
            d.var_psi.max(d.var_phi),
            rhs,
            1e-3,
            vec![("w1".into(), d.w1), ("oscillation".into(), d.oscillation)],
            &inputs,
        ));
    }
    // χ²-mode: common support, different weights
    let rho2 = GridDensity::uniform(
        ConvexDomain::box2([0.0, 0.0], [1.0, 1.0]).unwrap(),
        cfg.grid_2d,
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(101));
    let mut tasks = Vec::new();
    for i in 0..cfg.chi2_pairs {
        let mu0 = random_measure(&mut rng, 2, 8, 1e-3);
        // same atoms, fresh simplex weights
        let k = mu0.len();
        let ws = loop {
            let mut ws: Vec<f64> =
                (0..k).map(|_| -f64::ln(rng.gen_range(1e-12..1.0))).collect();
            let s: f64 = ws.iter().sum();
            ws.iter_mut().for_each(|w| *w /= s);
            let drift = 1.0 - ws.iter().sum::<f64>();
            ws[0] += drift;
            if ws.iter().all(|&w| w >= 1e-3) {
                break ws;
            }
        };
        let mu1 = DiscreteMeasure::new(mu0.points().to_vec(), ws, 2)?;
        tasks.push((i, mu0, mu1));
    }
    let potential_chi2: Result<Vec<CheckReport>, VerifyError> = tasks
        .par_iter()
        .map(|(i, mu0, mu1)| {
            let d = pair_data(&rho2, mu0, mu1, format!("chi2-pair={i};atoms={}", mu0.len()))?;
            let c_d = variance_bracket_constant(2);
            let base = c_d * d.density_ratio_sq * d.oscillation;
            let div = d
                .chi2
                .expect("common-support pairs are absolutely continuous");
            Ok(CheckReport::ratio_check(
                "potential-stability-chi2",
                d.instance.clone(),
                d.var_psi.max(d.var_phi),
                base * base * div,
                1e-3,
                vec![("chi2".into(), div)],
                &inputs,
            ))
        })
        .collect();
    Ok(StabilityBattery {
        strong_convexity,
        primal_dual,
        potential_w1,
        potential_chi2: potential_chi2?,
    })
}

pub fn run_strong_convexity(cfg: &SuiteConfig) -> Result<Vec<CheckReport>, VerifyError> {
    let inputs = digest(cfg, &format!("res={}x{}", cfg.grid_1d, cfg.grid_2d));
    Ok(stability_pairs(cfg)?
        .iter()
        .map(|d| strong_convexity_report(d, &inputs))
        .collect())
}

pub fn run_primal_dual_comparison(cfg: &SuiteConfig) -> Result<Vec<CheckReport>, VerifyError> {
    Ok(run_stability_battery(cfg)?.primal_dual)
}

pub fn run_potential_stability(cfg: &SuiteConfig) -> Result<Vec<CheckReport>, VerifyError> {
    let battery = run_stability_battery(cfg)?;
    let mut out = battery.potential_w1;
    out.extend(battery.potential_chi2);
    Ok(out)
}

// ---------------------------------------------------------------------
// sharpness of the variance/bracket estimate (1D shift family)
// ---------------------------------------------------------------------

pub fn run_shift_sharpness(cfg: &SuiteConfig) -> Result<Vec<CheckReport>, VerifyError> {
    let rho = GridDensity::uniform(ConvexDomain::interval(0.0, 1.0).unwrap(), cfg.grid_1d)?;
    let opts = SolveOptions::default();
    let e0 = embed(&rho, &discretized_uniform(0.0, 1.0, 200), &opts)?;
    let inputs = digest(cfg, &format!("res={};atoms=200", cfg.grid_1d));
    let mut reports = Vec::new();
    let mut bracket_samples = Vec::new();
    let mut var_samples = Vec::new();
    for k in 1..=10 {
        let eps = 0.02 * k as f64;
        let ee = embed(&rho, &discretized_uniform(eps, 1.0 + eps, 200), &opts)?;
        let br = bracket(&e0, &ee, &rho);
        let dd = dual_difference(&e0, &ee, &rho);
        let var = variance(&dd.values, &dd.masses);
        bracket_samples.push((eps, br));
        var_samples.push((eps, var));
        // The exact continuum bracket of the shift family is ε²(1 - ε/3):
        // the dual difference is -εy only where neither potential's slope
        // saturates, and the two boundary layers of width ε contribute
        // -ε³/3 in total. The ε² leading term is the sharpness statement.
        let target = eps * eps * (1.0 - eps / 3.0);
        reports.push(CheckReport::ratio_check(
            "shift-sharpness-1d",
            format!("bracket;eps={eps:.2}"),
            (br - target).abs(),
            0.03 * target,
            0.0,
            vec![
                ("bracket".into(), br),
                ("target".into(), target),
                ("leading_term".into(), eps * eps),
            ],
            &inputs,
        ));
        reports.push(CheckReport::ratio_check(
            "shift-sharpness-1d",
            format!("variance;eps={eps:.2}"),
            (var - eps * eps / 6.0).abs(),
            0.10 * eps * eps / 6.0,
            0.0,
            vec![("variance".into(), var), ("target".into(), eps * eps / 6.0)],
            &inputs,
        ));
    }
    // informational: the tighter interpolated-variance functional
    // ∫₀¹ Var_{μ^t}(ψ¹-ψ⁰) dt, recorded alongside the endpoint variance.
    // The two potentials live on different supports, so the segment is
    // interpolated between their restrictions to the union support.
    {
        let ee = embed(&rho, &discretized_uniform(0.1, 1.1, 200), &opts)?;
        let dd = dual_difference(&e0, &ee, &rho);
        let union0 = DualPotential::new(dd.points.clone(), dd.psi0.clone());
        let union1 = DualPotential::new(dd.points.clone(), dd.psi1.clone());
        let mut acc = 0.0;
        let steps = 20;
        for k in 0..=steps {
            let t = k as f64 / steps as f64;
            let path = otsolve::dual_path(&union0, &union1, t, &rho)?;
            let interp = path.interpolated;
            let psi0 = e0.transport.potential.conjugate_at(&rho, interp.points());
            let psi1 = ee.transport.potential.conjugate_at(&rho, interp.points());
            let vals: Vec<f64> = psi1.iter().zip(&psi0).map(|(a, b)| a - b).collect();
            let var = variance(&vals, interp.weights());
            acc += var * if k == 0 || k == steps { 0.5 } else { 1.0 } / steps as f64;
        }
        let endpoint_var = variance(&dd.values, &dd.masses);
        reports.push(CheckReport {
            check: "shift-sharpness-1d".into(),
            instance: "path-variance-integral;eps=0.10".into(),
            lhs: acc,
            rhs: endpoint_var,
            ratio: acc / endpoint_var,
            tolerance: f64::NAN,
            pass: true, // informational only
            aux: vec![("endpoint_variance".into(), endpoint_var)],
            inputs: inputs.clone(),
        });
    }

    let fit_b = fit_holder_exponent(&bracket_samples)?;
    reports.push(CheckReport::slack_check(
        "shift-sharpness-1d",
        "bracket-slope",
        (fit_b.slope - 2.0).abs(),
        0.1,
        0.0,
        vec![("slope".into(), fit_b.slope)],
        &inputs,
    ));
    let fit_v = fit_holder_exponent(&var_samples)?;
    reports.push(CheckReport::slack_check(
        "shift-sharpness-1d",
        "variance-slope",
        (fit_v.slope - 2.0).abs(),
        0.15,
        0.0,
        vec![("slope".into(), fit_v.slope)],
        &inputs,
    ));
    Ok(reports)
}

// ---------------------------------------------------------------------
// map stability exponents
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityRegime {
    /// Compactly supported targets: exponent 1/6.
    Compact,
    /// α-Hölder potentials with bounded fourth moments.
    Holder,
    /// Bounded p-th moment, p ≥ 4, p > d.
    Moments,
}

/// Per-pair map-stability report: the constants of the estimate are not
/// explicit, so the report carries the implied constant
/// `lhs / W₁^exponent` and asserts only the W₂ lower bound.
pub fn check_map_stability(
    rho: &GridDensity,
    e0: &EmbeddedMeasure,
    e1: &EmbeddedMeasure,
    regime: StabilityRegime,
    alpha: Option<f64>,
    p: Option<f64>,
) -> Result<CheckReport, VerifyError> {
    let exponent = match regime {
        StabilityRegime::Compact => map_exponent_compact(),
        StabilityRegime::Holder => {
            let a = alpha.ok_or_else(|| VerifyError::RegimeUnsupported("holder requires alpha".into()))?;
            if !(0.0 < a && a < 1.0) {
                return Err(VerifyError::RegimeUnsupported(format!("alpha={a}")));
            }
            map_exponent_holder(a)
        }
        StabilityRegime::Moments => {
            let p = p.ok_or_else(|| VerifyError::RegimeUnsupported("moments requires p".into()))?;
            let d = rho.dim();
            if p < 4.0 || p <= d as f64 {
                return Err(VerifyError::RegimeUnsupported(format!("p={p}, d={d}")));
            }
            map_exponent_moments(p, d)
        }
    };
    let lhs = lot_distance(e0, e1, rho)?;
    let w1 = if rho.dim() == 1 {
        wasserstein_1d(
            &Measure1D::Discrete(&e0.target),
            &Measure1D::Discrete(&e1.target),
            1,
        )
    } else {
        w1_discrete(&e0.target, &e1.target)?
    };
    let w2 = w2_discrete(&e0.target, &e1.target)?;
    let implied = if w1 > 0.0 { lhs / w1.powf(exponent) } else { f64::NAN };
    // asserted here: the embedding is expanding, W₂ ≤ lot distance
    Ok(CheckReport::slack_check(
        "map-stability",
        format!("regime={regime:?}"),
        w2,
        lhs,
        2.0 * rho.spacing(),
        vec![
            ("exponent".into(), exponent),
            ("implied_constant".into(), implied),
            ("w1".into(), w1),
        ],
        "res=custom",
    ))
}

pub fn run_map_exponents(cfg: &SuiteConfig) -> Result<Vec<CheckReport>, VerifyError> {
    let opts = SolveOptions::default();
    let inputs = digest(cfg, &format!("res={}x{}", cfg.grid_1d, cfg.grid_2d));
    let mut reports = Vec::new();
    let eps_grid: Vec<f64> = (1..=10).map(|k| 0.02 * k as f64).collect();

    // sweep family: (name, dimension, per-ε targets)
    let rho1 = GridDensity::uniform(ConvexDomain::interval(0.0, 1.0).unwrap(), cfg.grid_1d)?;
    let rho2 = GridDensity::uniform(
        ConvexDomain::box2([0.0, 0.0], [1.0, 1.0]).unwrap(),
        cfg.grid_2d,
    )?;

    let sweep_1d = |targets: &dyn Fn(f64) -> DiscreteMeasure,
                    name: &str,
                    reports: &mut Vec<CheckReport>|
     -> Result<(), VerifyError> {
        let base = embed(&rho1, &targets(0.0), &opts)?;
        let mut samples = Vec::new();
        for &eps in &eps_grid {
            let e = embed(&rho1, &targets(eps), &opts)?;
            let lhs = lot_distance(&base, &e, &rho1)?;
            let w1 = wasserstein_1d(
                &Measure1D::Discrete(&base.target),
                &Measure1D::Discrete(&e.target),
                1,
            );
            let w2 = wasserstein_1d(
                &Measure1D::Discrete(&base.target),
                &Measure1D::Discrete(&e.target),
                2,
            );
            samples.push((w1, lhs));
            reports.push(CheckReport::slack_check(
                "map-exponents",
                format!("{name};eps={eps:.2};w2-lower-bound"),
                w2,
                lhs,
                2.0 * rho1.spacing(),
                vec![],
                &inputs,
            ));
        }
        let fit = fit_holder_exponent(&samples)?;
        for (regime, expo) in [
            ("compact", map_exponent_compact()),
            ("moments-p4", map_exponent_moments(4.0, 1)),
        ] {
            reports.push(CheckReport::slack_check(
                "map-exponents",
                format!("{name};slope-vs-{regime}"),
                expo - 0.05,
                fit.slope,
                0.0,
                vec![("slope".into(), fit.slope), ("exponent".into(), expo)],
                &inputs,
            ));
        }
        Ok(())
    };

    sweep_1d(
        &|eps| discretized_uniform(eps, 1.0 + eps, 200),
        "translation-1d",
        &mut reports,
    )?;
    sweep_1d(
        &|eps| discretized_uniform(0.0, 1.0 + eps, 200),
        "dilation-1d",
        &mut reports,
    )?;

    // 2D translation sweep along the diagonal; lattice targets need a
    // tolerance above the axis-aligned strip quantum but well below the
    // smallest sweep distance
    {
        let lattice_opts = SolveOptions {
            mass_tolerance: Some(1e-3),
            ..SolveOptions::default()
        };
        let base = embed(&rho2, &coarse_grid_measure(8, [0.0, 0.0]), &lattice_opts)?;
        let mut samples = Vec::new();
        for &eps in &eps_grid {
            let tau = [eps / 2f64.sqrt(), eps / 2f64.sqrt()];
            let e = embed(&rho2, &coarse_grid_measure(8, tau), &lattice_opts)?;
            let lhs = lot_distance(&base, &e, &rho2)?;
            let w1 = w1_discrete(&base.target, &e.target)?;
            let w2 = w2_discrete(&base.target, &e.target)?;
            samples.push((w1, lhs));
            reports.push(CheckReport::slack_check(
                "map-exponents",
                format!("translation-2d;eps={eps:.2};w2-lower-bound"),
                w2,
                lhs,
                2.0 * rho2.spacing(),
                vec![],
                &inputs,
            ));
        }
        let fit = fit_holder_exponent(&samples)?;
        for (regime, expo) in [
            ("compact", map_exponent_compact()),
            ("moments-p4", map_exponent_moments(4.0, 2)),
        ] {
            reports.push(CheckReport::slack_check(
                "map-exponents",
                format!("translation-2d;slope-vs-{regime}"),
                expo - 0.05,
                fit.slope,
                0.0,
                vec![("slope".into(), fit.slope), ("exponent".into(), expo)],
                &inputs,
            ));
        }
    }
    Ok(reports)
}

// ---------------------------------------------------------------------
// density-target stability in 1D
// ---------------------------------------------------------------------

/// Exact cumulative integral of a piecewise-linear function at sorted
/// query points.
fn cumulative_at(f: &SampledFunction1D, queries: &[f64]) -> Vec<f64> {
    let xs = f.breakpoints();
    let mut out = Vec::with_capacity(queries.len());
    let mut acc = 0.0;
    let mut k = 0usize;
    let mut prev_x = xs[0];
    let mut prev_v = f.values()[0];
    for &q in queries {
        let q = q.clamp(f.lo(), f.hi());
        while k + 1 < xs.len() && xs[k + 1] <= q {
            let (x1, v1) = (xs[k + 1], f.values()[k + 1]);
            acc += 0.5 * (prev_v + v1) * (x1 - prev_x);
            prev_x = x1;
            prev_v = v1;
            k += 1;
        }
        let vq = f.eval(q);
        out.push(acc + 0.5 * (prev_v + vq) * (q - prev_x));
    }
    out
}

pub fn check_density_stability_1d(
    rho: &GridDensity,
    family: &dyn Fn(f64) -> GridDensity,
    eps_grid: &[f64],
    inputs: &str,
) -> Result<Vec<CheckReport>, VerifyError> {
    let base = family(0.0);
    let t0 = monotone_map_1d(rho, &base);
    let centers: Vec<f64> = rho.cells().iter().map(|c| c.center[0]).collect();
    let phi0 = cumulative_at(&t0, &centers);
    let mut map_samples = Vec::new();
    let mut var_samples = Vec::new();
    let mut reports = Vec::new();
    for &eps in eps_grid {
        let nu = family(eps);
        let te = monotone_map_1d(rho, &nu);
        let lhs = l2_rho_sq_distance(&t0, &te, rho).sqrt();
        let w2 = wasserstein_1d(&Measure1D::Density(&base), &Measure1D::Density(&nu), 2);
        let phie = cumulative_at(&te, &centers);
        let diff: Vec<f64> = phie.iter().zip(&phi0).map(|(a, b)| a - b).collect();
        let var_phi = variance_grid(&diff, rho);
        map_samples.push((w2, lhs));
        var_samples.push((w2, var_phi));
        reports.push(CheckReport::slack_check(
            "density-stability-1d",
            format!("eps={eps:.3};w2-lower-bound"),
            w2,
            lhs,
            2.0 * rho.spacing(),
            vec![
                ("implied_map_constant".into(), lhs / w2.powf(0.2)),
                ("implied_var_constant".into(), var_phi / w2.powf(1.2)),
            ],
            inputs,
        ));
    }
    let map_fit = fit_holder_exponent(&map_samples)?;
    reports.push(CheckReport::slack_check(
        "density-stability-1d",
        "map-slope-vs-w2",
        0.2 - 0.05,
        map_fit.slope,
        0.0,
        vec![("slope".into(), map_fit.slope)],
        inputs,
    ));
    let var_fit = fit_holder_exponent(&var_samples)?;
    reports.push(CheckReport::slack_check(
        "density-stability-1d",
        "variance-slope-vs-w2",
        1.2 - 0.05,
        var_fit.slope,
        0.0,
        vec![("slope".into(), var_fit.slope)],
        inputs,
    ));
    Ok(reports)
}

pub fn run_density_stability(cfg: &SuiteConfig) -> Result<Vec<CheckReport>, VerifyError> {
    let n = cfg.grid_1d.max(512);
    let rho = GridDensity::uniform(ConvexDomain::interval(0.0, 1.0).unwrap(), n)?;
    let eps_grid: Vec<f64> = (1..=10).map(|k| 0.02 * k as f64).collect();
    let inputs = digest(cfg, &format!("res={n}"));
    let mut reports = check_density_stability_1d(
        &rho,
        &|eps| {
            GridDensity::uniform(ConvexDomain::interval(eps, 1.0 + eps).unwrap(), n)
                .expect("shifted interval density")
        },
        &eps_grid,
        &format!("{inputs};family=shift"),
    )?;
    reports.extend(check_density_stability_1d(
        &rho,
        &|eps| {
            GridDensity::uniform(ConvexDomain::interval(0.0, 1.0 + eps).unwrap(), n)
                .expect("dilated interval density")
        },
        &eps_grid,
        &format!("{inputs};family=dilation"),
    )?);
    Ok(reports)
}

// ---------------------------------------------------------------------
// 1D smooth-density inequality (variance vs W₂ with density bound)
// ---------------------------------------------------------------------

/// `∫ f d(μ¹-μ⁰) ≤ √C_μ ||f'||_{L²(Y)} W₂(μ⁰, μ¹)` for 1D densities
/// bounded by `C_μ` on a common compact interval `Y`.
pub fn check_w2_gradient_bound(
    mu0: &GridDensity,
    mu1: &GridDensity,
    f: &dyn Fn(f64) -> f64,
    df: &dyn Fn(f64) -> f64,
    y: (f64, f64),
) -> CheckReport {
    let (m0, big0) = mu0.density_bounds();
    let (m1, big1) = mu1.density_bounds();
    let c_mu = big0.max(big1);
    let _ = (m0, m1);
    let lhs = mu1.integrate(|p| f(p[0])) - mu0.integrate(|p| f(p[0]));
    let w2 = wasserstein_1d(&Measure1D::Density(mu0), &Measure1D::Density(mu1), 2);
    // ||f'||_{L²(Y)} by fine quadrature
    let n = 8192;
    let h = (y.1 - y.0) / n as f64;
    let grad_l2 = (0..n)
        .map(|i| {
            let x = y.0 + (i as f64 + 0.5) * h;
            df(x) * df(x) * h
        })
        .sum::<f64>()
        .sqrt();
    let rhs = c_mu.sqrt() * grad_l2 * w2;
    CheckReport::ratio_check(
        "w2-gradient-bound",
        "single",
        lhs,
        rhs,
        1e-3,
        vec![
            ("c_mu".into(), c_mu),
            ("w2".into(), w2),
            ("grad_l2".into(), grad_l2),
        ],
        "res=custom",
    )
}

// ---------------------------------------------------------------------
// log-concave variance bound (1D quadrature)
// ---------------------------------------------------------------------

/// For a strictly convex `φ` on `[a, b]` and smooth `s`, checks
/// `Var_ρ̃(s) ≤ E_ρ̃[ s'² / φ'' ]` with `ρ̃ ∝ e^{-φ}` by composite Simpson
/// quadrature on at least 4096 panels.
#[allow(clippy::too_many_arguments)]
pub fn check_brascamp_lieb_1d(
    phi: &dyn Fn(f64) -> f64,
    phi2: &dyn Fn(f64) -> f64,
    s: &dyn Fn(f64) -> f64,
    ds: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    panels: usize,
    instance: &str,
) -> Result<CheckReport, VerifyError> {
    let n = panels.max(4096);
    let h = (b - a) / n as f64;
    let mut z = 0.0;
    let mut mean_s = 0.0;
    let mut mean_s2 = 0.0;
    let mut mean_grad = 0.0;
    // composite Simpson over each panel
    for i in 0..n {
        let x0 = a + i as f64 * h;
        let xm = x0 + 0.5 * h;
        let x1 = x0 + h;
        for (x, w) in [(x0, 1.0 / 6.0), (xm, 4.0 / 6.0), (x1, 1.0 / 6.0)] {
            let curv = phi2(x);
            if curv < 0.0 {
                return Err(VerifyError::NotStronglyConvex);
            }
            let dens = (-phi(x)).exp() * w * h;
            z += dens;
            let sv = s(x);
            mean_s += sv * dens;
            mean_s2 += sv * sv * dens;
            let g = ds(x);
            if g != 0.0 {
                if curv == 0.0 {
                    return Err(VerifyError::NotStronglyConvex);
                }
                mean_grad += g * g / curv * dens;
            }
            // isolated zeros of the curvature where the test gradient
            // also vanishes contribute nothing (0/0 with finite limit)
        }
    }
    mean_s /= z;
    mean_s2 /= z;
    mean_grad /= z;
    let lhs = (mean_s2 - mean_s * mean_s).max(0.0);
    Ok(CheckReport::ratio_check(
        "brascamp-lieb",
        instance,
        lhs,
        mean_grad,
        1e-6,
        vec![("normalization".into(), z)],
        format!("panels={n}"),
    ))
}

pub fn run_brascamp_lieb(cfg: &SuiteConfig) -> Result<Vec<CheckReport>, VerifyError> {
    let mut out = Vec::new();
    // truncated Gaussian: equality case of the variance bound
    let gauss = check_brascamp_lieb_1d(
        &|x| 0.5 * x * x,
        &|_| 1.0,
        &|x| x,
        &|_| 1.0,
        -6.0,
        6.0,
        4096,
        "gaussian-linear",
    )?;
    let ratio_ok = gauss.ratio >= 0.99 && gauss.ratio <= 1.0 + 1e-9;
    out.push(CheckReport {
        pass: gauss.pass && ratio_ok,
        ..gauss
    });
    // constant test function: 0 ≤ 0
    out.push(check_brascamp_lieb_1d(
        &|x| 0.5 * x * x,
        &|_| 1.0,
        &|_| 1.0,
        &|_| 0.0,
        -6.0,
        6.0,
        4096,
        "gaussian-constant",
    )?);
    // quartic potential with s = x²
    out.push(check_brascamp_lieb_1d(
        &|x| x.powi(4),
        &|x| 12.0 * x * x,
        &|x| x * x,
        &|x| 2.0 * x,
        -2.0,
        2.0,
        4096,
        "quartic-square",
    )?);
    let _ = cfg;
    Ok(out)
}

// ---------------------------------------------------------------------
// Moreau–Yosida property suite
// ---------------------------------------------------------------------

pub fn run_moreau_suite(cfg: &SuiteConfig) -> Result<Vec<CheckReport>, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(202));
    let inputs = digest(cfg, &format!("functions={}", cfg.moreau_functions));
    let mut upper = 0.0f64; // f_λ ≤ f and monotone in λ
    let mut approach = 0.0f64; // f - f_λ ≤ λ L²/2
    let mut lipschitz = 0.0f64; // measured grad Lipschitz ≤ 1/λ
    let mut grad_bound = 0.0f64; // |∇f_λ| ≤ |f'| at midpoints
    let mut grad_limit = 0.0f64; // ∇f_λ → f' at midpoints
    for _ in 0..cfg.moreau_functions {
        let f = random_convex_pl(&mut rng, 20, 5.0);
        let lip = f.max_abs_slope();
        let envs: Vec<_> = [0.5, 0.1, 0.02]
            .iter()
            .map(|&l| (l, moreau_yosida(&f, l).expect("convex by construction")))
            .collect();
        let xs: Vec<f64> = (0..60).map(|i| f.lo() + (f.hi() - f.lo()) * i as f64 / 59.0).collect();
        for &x in &xs {
            let fx = f.eval(x);
            let mut prev = f64::NEG_INFINITY;
            for (lam, env) in &envs {
                let v = env.eval(x);
                upper = upper.max(v - fx);
                upper = upper.max(prev - v); // decreasing λ ⇒ increasing value
                approach = approach.max((fx - v) - lam * lip * lip / 2.0);
                prev = v;
            }
        }
        for (lam, env) in &envs {
            lipschitz = lipschitz.max(gradient_lipschitz_bound(env, &xs) - 1.0 / lam);
        }
        // differentiability points: segment midpoints
        let bps = f.breakpoints();
        let slopes = f.slopes();
        let tiny = moreau_yosida(&f, 1e-8).expect("convex");
        for k in 0..slopes.len() {
            let x = 0.5 * (bps[k] + bps[k + 1]);
            for (_, env) in &envs {
                grad_bound = grad_bound.max(env.grad(x).abs() - slopes[k].abs());
            }
            grad_limit = grad_limit.max((tiny.grad(x) - slopes[k]).abs());
        }
    }
    Ok(vec![
        CheckReport::slack_check("moreau-yosida", "upper-bound-and-monotone", upper, 0.0, 1e-12, vec![], &inputs),
        CheckReport::slack_check("moreau-yosida", "pointwise-approach", approach, 0.0, 1e-10, vec![], &inputs),
        CheckReport::slack_check("moreau-yosida", "gradient-lipschitz", lipschitz, 0.0, 1e-8, vec![], &inputs),
        CheckReport::slack_check("moreau-yosida", "gradient-dominated", grad_bound, 0.0, 1e-10, vec![], &inputs),
        CheckReport::slack_check("moreau-yosida", "gradient-limit", grad_limit, 0.0, 1e-6, vec![], &inputs),
    ])
}

// ---------------------------------------------------------------------
// 1D Gagliardo–Nirenberg suite
// ---------------------------------------------------------------------

pub fn run_gn_1d(cfg: &SuiteConfig) -> Result<Vec<CheckReport>, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(303));
    let inputs = digest(cfg, &format!("pairs={}", cfg.gn1d_pairs));
    let mut reports = Vec::new();
    let mut violations = 0usize;
    let mut worst_ratio = 0.0f64;
    for i in 0..cfg.gn1d_pairs {
        let u = random_convex_pl(&mut rng, 20, 5.0);
        let v = random_convex_pl(&mut rng, 20, 5.0);
        let (lhs, rhs) = gn_check_1d(&u, &v)?;
        if rhs > 0.0 {
            worst_ratio = worst_ratio.max(lhs / rhs);
        }
        if lhs > rhs * (1.0 + 1e-9) && lhs > DEGENERATE_FLOOR {
            violations += 1;
            reports.push(CheckReport::ratio_check(
                "gn-1d",
                format!("random-pair={i}"),
                lhs,
                rhs,
                1e-9,
                vec![],
                &inputs,
            ));
        }
    }
    reports.push(CheckReport::slack_check(
        "gn-1d",
        "random-suite-violations",
        violations as f64,
        0.0,
        0.0,
        vec![("worst_ratio".into(), worst_ratio)],
        &inputs,
    ));
    // sharpness family: u = L|x-½|, v = max(u, ε)
    for l in [0.5, 1.0, 2.0] {
        for eps in [0.05, 0.1] {
            let u = SampledFunction1D::new(vec![0.0, 0.5, 1.0], vec![0.5 * l, 0.0, 0.5 * l]);
            let v = SampledFunction1D::new(
                vec![0.0, 0.5 - eps / l, 0.5 + eps / l, 1.0],
                vec![0.5 * l, eps, eps, 0.5 * l],
            );
            let (lhs, rhs) = gn_check_1d(&u, &v)?;
            let l2 = u.l2_sq_diff(&v);
            let exact_lhs = 2.0 * l * eps;
            let exact_l2 = 2.0 / 3.0 * eps.powi(3) / l;
            let pass = (lhs - exact_lhs).abs() <= 1e-12
                && (l2 - exact_l2).abs() <= 1e-12
                && lhs <= rhs;
            reports.push(CheckReport {
                check: "gn-1d".into(),
                instance: format!("sharpness;L={l};eps={eps}"),
                lhs,
                rhs,
                ratio: lhs / rhs,
                tolerance: 1e-12,
                pass,
                aux: vec![
                    ("l2_sq".into(), l2),
                    ("l2_sq_closed_form".into(), exact_l2),
                    // stated elsewhere as ε³/L; the exact integral is
                    // recorded above and used for the assertion
                    ("l2_sq_stated".into(), eps.powi(3) / l),
                ],
                inputs: inputs.clone(),
            });
        }
    }
    Ok(reports)
}

// ---------------------------------------------------------------------
// 2D Gagliardo–Nirenberg on solved potentials
// ---------------------------------------------------------------------

pub fn run_gn_2d(cfg: &SuiteConfig) -> Result<Vec<CheckReport>, VerifyError> {
    let rho = GridDensity::uniform(
        ConvexDomain::box2([0.0, 0.0], [1.0, 1.0]).unwrap(),
        cfg.grid_2d,
    )?;
    let domain = rho.domain().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(404));
    let inputs = digest(
        cfg,
        &format!("res={};lines={}", cfg.grid_2d, cfg.gn2d_lines),
    );
    let opts = SolveOptions::default();
    let mut tasks = Vec::new();
    for i in 0..cfg.gn2d_pairs {
        let mu0 = random_measure(&mut rng, 2, 6, 1e-3);
        let mu1 = random_measure(&mut rng, 2, 6, 1e-3);
        tasks.push((i, mu0, mu1, rng.gen::<u64>()));
    }
    let reports: Result<Vec<Vec<CheckReport>>, VerifyError> = tasks
        .par_iter()
        .map(|(i, mu0, mu1, line_seed)| {
            let e0 = embed(&rho, mu0, &opts)?;
            let e1 = embed(&rho, mu1, &opts)?;
            let phi0 = e0.transport.potential.max_affine(&rho);
            let phi1 = e1.transport.potential.max_affine(&rho);
            let g0 = |p: Point| phi0.slopes()[phi0.argmax(p)];
            let g1 = |p: Point| phi1.slopes()[phi1.argmax(p)];
            let v0 = |p: Point| phi0.eval(p);
            let v1 = |p: Point| phi1.eval(p);
            let ens = sample_lines_orthogonal(cfg.gn2d_lines, 1.5, *line_seed);
            let rep: GnNdReport = gn_check_nd(
                &ScalarField {
                    value: &v0,
                    gradient: &g0,
                },
                &ScalarField {
                    value: &v1,
                    gradient: &g1,
                },
                &domain,
                &ens,
                512,
                0.5 / cfg.grid_2d as f64,
            )?;
            let mut out = vec![CheckReport::ratio_check(
                "gn-2d",
                format!("pair={i};inequality"),
                rep.lhs_grid,
                rep.rhs,
                1e-6,
                vec![
                    ("constant".into(), rep.constant),
                    ("chart_constant".into(), rep.chart_constant),
                    ("grad_sup_sum".into(), rep.grad_sup_sum),
                    ("boundary".into(), rep.boundary_measure),
                ],
                &inputs,
            )];
            let agree = if rep.lhs_grid > 1e-12 {
                (rep.lhs_lines - rep.lhs_grid).abs() / rep.lhs_grid
            } else {
                0.0
            };
            out.push(CheckReport::slack_check(
                "gn-2d",
                format!("pair={i};line-vs-grid"),
                agree,
                0.03,
                0.0,
                vec![
                    ("lhs_grid".into(), rep.lhs_grid),
                    ("lhs_lines".into(), rep.lhs_lines),
                ],
                &inputs,
            ));
            Ok(out)
        })
        .collect();
    Ok(reports?.into_iter().flatten().collect())
}

// ---------------------------------------------------------------------
// crofton estimators
// ---------------------------------------------------------------------

pub fn run_crofton(cfg: &SuiteConfig) -> Result<Vec<CheckReport>, VerifyError> {
    let inputs = digest(cfg, &format!("lines={}", cfg.crofton_lines));
    let mut out = Vec::new();
    let square = ConvexDomain::box2([0.0, 0.0], [1.0, 1.0]).unwrap();
    let disk = ConvexDomain::ball([0.0, 0.0], 1.0).unwrap();
    let ens1 = sample_lines(cfg.crofton_lines, 2.0, cfg.seed.wrapping_add(505));
    let sq = crofton_boundary(&square, &ens1)?;
    out.push(CheckReport::slack_check(
        "crofton",
        "square-perimeter",
        (sq.estimate - 4.0).abs(),
        0.02 * 4.0,
        0.0,
        vec![("estimate".into(), sq.estimate), ("stderr".into(), sq.stderr)],
        &inputs,
    ));
    let ens2 = sample_lines(cfg.crofton_lines, 1.5, cfg.seed.wrapping_add(506));
    let ci = crofton_boundary(&disk, &ens2)?;
    let circ = 2.0 * std::f64::consts::PI;
    out.push(CheckReport::slack_check(
        "crofton",
        "disk-circumference",
        (ci.estimate - circ).abs(),
        0.02 * circ,
        0.0,
        vec![("estimate".into(), ci.estimate), ("stderr".into(), ci.stderr)],
        &inputs,
    ));
    let fa = fubini_area(&square, 0.37, cfg.crofton_lines, 2.0, cfg.seed.wrapping_add(507))?;
    out.push(CheckReport::slack_check(
        "crofton",
        "fubini-area",
        (fa.estimate - 1.0).abs(),
        0.01,
        0.0,
        vec![("estimate".into(), fa.estimate), ("stderr".into(), fa.stderr)],
        &inputs,
    ));
    Ok(out)
}

// ---------------------------------------------------------------------
// geometry bounds
// ---------------------------------------------------------------------

pub fn run_erosion_bounds(cfg: &SuiteConfig) -> Result<Vec<CheckReport>, VerifyError> {
    let inputs = digest(cfg, "shapes=disk,square,hexagon");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(606));
    let hexagon = loop {
        let mut angles: Vec<f64> = (0..6)
            .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
            .collect();
        angles.sort_by(f64::total_cmp);
        let pts: Vec<Point> = angles
            .iter()
            .map(|&a| {
                let r = rng.gen_range(0.8..1.2);
                [r * a.cos(), r * a.sin()]
            })
            .collect();
        if let Ok(p) = ConvexDomain::polygon(pts) {
            break p;
        }
    };
    let shapes: Vec<(&str, ConvexDomain)> = vec![
        ("disk", ConvexDomain::ball([0.0, 0.0], 1.0).unwrap()),
        ("square", ConvexDomain::box2([0.0, 0.0], [1.0, 1.0]).unwrap()),
        ("hexagon", hexagon),
    ];
    let mut out = Vec::new();
    for (name, shape) in &shapes {
        let (r, _) = shape.radii();
        for k in 0..=20 {
            let eps = r * k as f64 / 20.0;
            let slice = shape.erosion_slice_volume(eps);
            let dilation = shape.dilation_slice_volume(eps);
            let bound = shape.erosion_volume_bound(eps);
            out.push(CheckReport::slack_check(
                "erosion-bounds",
                format!("{name};eps={eps:.4};vs-dilation"),
                slice,
                dilation,
                1e-10,
                vec![],
                &inputs,
            ));
            out.push(CheckReport::slack_check(
                "erosion-bounds",
                format!("{name};eps={eps:.4};vs-radial-bound"),
                slice,
                bound,
                1e-10,
                vec![("r".into(), r)],
                &inputs,
            ));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------
// solver correctness
// ---------------------------------------------------------------------

pub fn run_solver_correctness(cfg: &SuiteConfig) -> Result<Vec<CheckReport>, VerifyError> {
    let mut out = Vec::new();
    let inputs = digest(cfg, &format!("res={}", cfg.grid_1d.max(512)));

    // (a) dual gradient vs central finite differences at h = 1e-4
    {
        let rho = GridDensity::uniform(
            ConvexDomain::box2([0.0, 0.0], [1.0, 1.0]).unwrap(),
            512,
        )?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(707));
        let mut tasks = Vec::new();
        for i in 0..cfg.gradient_instances {
            let mu = random_measure(&mut rng, 2, 8, 1e-3);
            let perturb: Vec<f64> = (0..mu.len()).map(|_| rng.gen_range(-0.01..0.01)).collect();
            tasks.push((i, mu, perturb));
        }
        let reports: Vec<CheckReport> = tasks
            .par_iter()
            .map(|(i, mu, perturb)| {
                let vals: Vec<f64> = mu
                    .points()
                    .iter()
                    .zip(perturb)
                    .map(|(y, p)| 0.5 * dot(*y, *y) + p)
                    .collect();
                let psi = DualPotential::new(mu.points().to_vec(), vals.clone());
                let grad = dual_gradient(&psi, &rho, mu);
                let h = 1e-4;
                let mut worst = 0.0f64;
                for j in 0..mu.len() {
                    let mut vp = vals.clone();
                    vp[j] += h;
                    let mut vm = vals.clone();
                    vm[j] -= h;
                    let op =
                        dual_objective(&DualPotential::new(mu.points().to_vec(), vp), &rho, mu);
                    let om =
                        dual_objective(&DualPotential::new(mu.points().to_vec(), vm), &rho, mu);
                    worst = worst.max(((op - om) / (2.0 * h) - grad[j]).abs());
                }
                CheckReport::slack_check(
                    "solver-correctness",
                    format!("gradient-fd;instance={i}"),
                    worst,
                    1e-4,
                    0.0,
                    vec![],
                    &inputs,
                )
            })
            .collect();
        out.extend(reports);
    }

    // (b) 1D semi-discrete vs the exact monotone rearrangement: up to 50
    // atoms; equal weights keep every weight above the 1D cell quantum
    {
        let rho = GridDensity::uniform(ConvexDomain::interval(0.0, 1.0).unwrap(), cfg.grid_1d)?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(708));
        let mut tasks = Vec::new();
        for i in 0..cfg.oracle_instances {
            let mu = if i % 2 == 0 {
                // boundaries between atoms need a few cells of room
                random_uniform_measure(&mut rng, 1, 50, 6.0 / cfg.grid_1d as f64)
            } else {
                // the 1D quantum at 512 cells is ~2e-3; keep weights clear of it
                random_measure(&mut rng, 1, 8, 0.02)
            };
            tasks.push((i, mu));
        }
        let reports: Result<Vec<CheckReport>, VerifyError> = tasks
            .par_iter()
            .map(|(i, mu)| {
                let grid = solve_semidiscrete(&rho, mu, &SolveOptions::default())?;
                let oracle = brenier_1d(&rho, mu)?;
                let err2 = ksum(rho.cells().iter().zip(grid.map.iter().zip(&oracle.map)).map(
                    |(c, (a, b))| c.mass() * norm([a[0] - b[0], a[1] - b[1]]).powi(2),
                ));
                Ok(CheckReport::slack_check(
                    "solver-correctness",
                    format!("oracle-1d;instance={i};atoms={}", mu.len()),
                    err2,
                    2.0 * rho.spacing(),
                    0.0,
                    vec![("grad_inf".into(), grid.convergence.grad_inf_norm)],
                    &inputs,
                ))
            })
            .collect();
        out.extend(reports?);
    }

    // (c) symmetric two-atom target: closed-form squared map distance 5/48
    {
        let rho = GridDensity::uniform(
            ConvexDomain::box2([0.0, 0.0], [1.0, 1.0]).unwrap(),
            512,
        )?;
        let mu = DiscreteMeasure::uniform_on(vec![[0.25, 0.5], [0.75, 0.5]], 2).unwrap();
        let res = solve_semidiscrete(&rho, &mu, &SolveOptions::default())?;
        let d2 = res.map_id_sq_distance(&rho);
        out.push(CheckReport::slack_check(
            "solver-correctness",
            "symmetric-pair-5-48",
            (d2 - 5.0 / 48.0).abs(),
            1e-3,
            0.0,
            vec![("value".into(), d2)],
            &inputs,
        ));
    }
    Ok(out)
}

// ---------------------------------------------------------------------
// potential Hölder modulus under moment bounds
// ---------------------------------------------------------------------

/// Measures the empirical Hölder modulus of the solved potential at the
/// exponent `1 - d/p` and reports the implied constant; passes when the
/// modulus is finite and stable (×2) under grid refinement.
pub fn check_potential_holder(
    dim: usize,
    mu: &DiscreteMeasure,
    p: f64,
    base_resolution: usize,
    seed: u64,
) -> Result<CheckReport, VerifyError> {
    assert!(p > dim as f64, "needs p > d");
    let alpha = potential_holder_exponent(dim, p);
    let modulus_at = |n: usize| -> Result<f64, VerifyError> {
        let rho = if dim == 1 {
            GridDensity::uniform(ConvexDomain::interval(0.0, 1.0).unwrap(), n)?
        } else {
            GridDensity::uniform(ConvexDomain::box2([0.0, 0.0], [1.0, 1.0]).unwrap(), n)?
        };
        let e = embed(&rho, mu, &SolveOptions::default())?;
        let phi = e.transport.potential.max_affine(&rho);
        Ok(if dim == 1 {
            let xs: Vec<f64> = rho.cells().iter().map(|c| c.center[0]).collect();
            let vals: Vec<f64> = xs.iter().map(|&x| phi.eval([x, 0.0])).collect();
            // subsample pairs for the modulus
            let step = (xs.len() / 300).max(1);
            let sub_x: Vec<f64> = xs.iter().step_by(step).copied().collect();
            let sub_v: Vec<f64> = vals.iter().step_by(step).copied().collect();
            holder_modulus_1d(&SampledFunction1D::new(sub_x, sub_v), alpha)
        } else {
            holder_modulus_2d(|q| phi.eval(q), rho.domain(), alpha, 100_000, seed)
        })
    };
    let coarse = modulus_at(base_resolution)?;
    let fine = modulus_at(2 * base_resolution)?;
    let m_rho = 1.0; // uniform source on the unit domain
    let implied = fine / (mu.moment(p) / m_rho).powf(1.0 / p);
    let stable = fine.is_finite() && coarse.is_finite() && fine <= 2.0 * coarse && coarse <= 2.0 * fine;
    Ok(CheckReport {
        check: "potential-holder".into(),
        instance: format!("d={dim};p={p};atoms={}", mu.len()),
        lhs: fine,
        rhs: 2.0 * coarse,
        ratio: fine / (2.0 * coarse),
        tolerance: 0.0,
        pass: stable,
        aux: vec![
            ("alpha".into(), alpha),
            ("implied_constant".into(), implied),
            ("coarse_modulus".into(), coarse),
        ],
        inputs: format!("res={base_resolution}->{};seed={seed}", 2 * base_resolution),
    })
}

pub fn run_potential_holder(cfg: &SuiteConfig) -> Result<Vec<CheckReport>, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(808));
    let mut out = Vec::new();
    for i in 0..3 {
        let mu = random_measure(&mut rng, 1, 10, 1e-2);
        let mut r = check_potential_holder(1, &mu, 4.0, cfg.grid_1d / 2, cfg.seed)?;
        r.instance = format!("{};case={i}", r.instance);
        out.push(r);
    }
    for i in 0..3 {
        let mu = random_measure(&mut rng, 2, 8, 1e-3);
        let mut r = check_potential_holder(2, &mu, 4.0, cfg.grid_2d / 2, cfg.seed)?;
        r.instance = format!("{};case={i}", r.instance);
        out.push(r);
    }
    // a Dirac target has an affine potential: modulus bounded by
    // ||y|| · diam^{d/p} in the unit square
    let y = [0.6, 0.8];
    let mu = DiscreteMeasure::dirac(y, 2);
    let mut r = check_potential_holder(2, &mu, 4.0, cfg.grid_2d / 2, cfg.seed)?;
    let bound = norm(y) * 2f64.sqrt().powf(2.0 / 4.0);
    r.pass = r.pass && r.lhs <= bound * (1.0 + 1e-9);
    r.aux.push(("affine_bound".into(), bound));
    r.instance = "dirac-affine".into();
    out.push(r);
    Ok(out)
}

// ---------------------------------------------------------------------
// 1D density-to-density gradient bound
// ---------------------------------------------------------------------

pub fn run_w2_gradient_bound(cfg: &SuiteConfig) -> Result<Vec<CheckReport>, VerifyError> {
    let n = cfg.grid_1d.max(512);
    let mut out = Vec::new();
    let u01 = GridDensity::uniform(ConvexDomain::interval(0.0, 1.0).unwrap(), n)?;
    let shifted = GridDensity::uniform(ConvexDomain::interval(0.1, 1.1).unwrap(), n)?;
    // f(y) = y on Y = [0, 1.1]: lhs = 0.1, rhs = √1.1 · 0.1
    let mut r = check_w2_gradient_bound(&u01, &shifted, &|y| y, &|_| 1.0, (0.0, 1.1));
    r.instance = "uniform-shift-linear".into();
    out.push(r);
    let mut r = check_w2_gradient_bound(&u01, &u01, &|y| y, &|_| 1.0, (0.0, 1.0));
    r.instance = "identical".into();
    out.push(r);
    let mut r = check_w2_gradient_bound(&u01, &shifted, &|_| 3.0, &|_| 0.0, (0.0, 1.1));
    r.instance = "constant-test-function".into();
    out.push(r);
    // affine density against uniform
    let aff = GridDensity::with_density(ConvexDomain::interval(0.0, 1.0).unwrap(), n, |p| {
        0.5 + p[0]
    })?;
    let mut r = check_w2_gradient_bound(&u01, &aff, &|y| (2.0 * y).sin(), &|y| 2.0 * (2.0 * y).cos(), (0.0, 1.0));
    r.instance = "affine-density-sine".into();
    out.push(r);
    Ok(out)
}

// ---------------------------------------------------------------------
// registry
// ---------------------------------------------------------------------

pub const ALL_CHECKS: &[&str] = &[
    "shift-sharpness-1d",
    "strong-convexity",
    "primal-dual-comparison",
    "potential-stability",
    "gn-1d",
    "gn-2d",
    "crofton",
    "erosion-bounds",
    "map-exponents",
    "solver-correctness",
    "brascamp-lieb",
    "moreau-yosida",
    "density-stability-1d",
    "potential-holder",
    "w2-gradient-bound",
];

pub fn all_check_ids() -> &'static [&'static str] {
    ALL_CHECKS
}

pub fn run_check(id: &str, cfg: &SuiteConfig) -> Result<Vec<CheckReport>, VerifyError> {
    match id {
        "shift-sharpness-1d" => run_shift_sharpness(cfg),
        "strong-convexity" => run_strong_convexity(cfg),
        "primal-dual-comparison" => run_primal_dual_comparison(cfg),
        "potential-stability" => run_potential_stability(cfg),
        "gn-1d" => run_gn_1d(cfg),
        "gn-2d" => run_gn_2d(cfg),
        "crofton" => run_crofton(cfg),
        "erosion-bounds" => run_erosion_bounds(cfg),
        "map-exponents" => run_map_exponents(cfg),
        "solver-correctness" => run_solver_correctness(cfg),
        "brascamp-lieb" => run_brascamp_lieb(cfg),
        "moreau-yosida" => run_moreau_suite(cfg),
        "density-stability-1d" => run_density_stability(cfg),
        "potential-holder" => run_potential_holder(cfg),
        "w2-gradient-bound" => run_w2_gradient_bound(cfg),
        other => Err(VerifyError::UnknownCheck(other.into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_and_exponents() {
        assert!((variance_bracket_constant(1) - 4.0 * std::f64::consts::E).abs() < 1e-12);
        assert!((variance_bracket_constant(2) - 12.0 * std::f64::consts::E).abs() < 1e-12);
        assert!((map_exponent_moments(4.0, 1) - 0.1).abs() < 1e-15);
        assert!((map_exponent_holder(1.0) - 1.0 / 6.0).abs() < 1e-15);
        assert!((map_exponent_q_moment(2.0, 0.5) - 1.0 / 14.0).abs() < 1e-15);
        assert!((potential_holder_exponent(1, 4.0) - 0.75).abs() < 1e-15);
        assert!((potential_holder_exponent(2, 4.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn holder_fit_examples() {
        // y = x²: slope 2, zero residual
        let samples: Vec<(f64, f64)> = (1..=8).map(|k| {
            let x = k as f64 / 4.0;
            (x, x * x)
        }).collect();
        let fit = fit_holder_exponent(&samples).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!(fit.max_residual < 1e-12);

        // y = 3√x: slope ½, intercept ln 3
        let samples: Vec<(f64, f64)> = (1..=8).map(|k| {
            let x = k as f64 / 4.0;
            (x, 3.0 * x.sqrt())
        }).collect();
        let fit = fit_holder_exponent(&samples).unwrap();
        assert!((fit.slope - 0.5).abs() < 1e-12);
        assert!((fit.intercept - 3.0f64.ln()).abs() < 1e-12);

        assert!(matches!(
            fit_holder_exponent(&[(1.0, 1.0), (2.0, -1.0), (3.0, 1.0), (4.0, 1.0)]),
            Err(VerifyError::DegenerateData)
        ));
        assert!(fit_holder_exponent(&[(1.0, 1.0)]).is_err());
    }

    #[test]
    fn report_degenerate_rule() {
        let r = CheckReport::ratio_check("t", "i", 0.0, 0.0, 1e-6, vec![], "d");
        assert!(r.pass);
        assert!(r.ratio.is_nan());
        let r = CheckReport::ratio_check("t", "i", 1.0, 0.0, 1e-6, vec![], "d");
        assert!(!r.pass);
    }

    #[test]
    fn brascamp_lieb_cases() {
        let cfg = SuiteConfig::default();
        let reports = run_brascamp_lieb(&cfg).unwrap();
        for r in &reports {
            assert!(r.pass, "{}: ratio {}", r.instance, r.ratio);
        }
        // truncated Gaussian sits just below the equality case
        let g = &reports[0];
        assert!(g.ratio >= 0.99 && g.ratio <= 1.0);
        // non-convex potential rejected
        assert!(matches!(
            check_brascamp_lieb_1d(&|x| -x * x, &|_| -2.0, &|x| x, &|_| 1.0, -1.0, 1.0, 4096, "bad"),
            Err(VerifyError::NotStronglyConvex)
        ));
    }

    #[test]
    fn w2_gradient_bound_examples() {
        let cfg = SuiteConfig::default();
        let reports = run_w2_gradient_bound(&cfg).unwrap();
        for r in &reports {
            assert!(r.pass, "{}: {} vs {}", r.instance, r.lhs, r.rhs);
        }
        // closed form of the shifted-uniform case: lhs = 0.1,
        // rhs = √1.1 · 0.1
        let r = &reports[0];
        assert!((r.lhs - 0.1).abs() < 1e-6, "lhs {}", r.lhs);
        assert!((r.rhs - 1.1f64.sqrt() * 0.1).abs() < 1e-4, "rhs {}", r.rhs);
    }

    #[test]
    fn sharpness_suite_small() {
        let cfg = SuiteConfig {
            grid_1d: 512,
            ..SuiteConfig::default()
        };
        let reports = run_shift_sharpness(&cfg).unwrap();
        for r in &reports {
            assert!(r.pass, "{}: lhs {} rhs {}", r.instance, r.lhs, r.rhs);
        }
    }

    #[test]
    fn moreau_suite_small() {
        let cfg = SuiteConfig::default().scaled_down(10);
        for r in run_moreau_suite(&cfg).unwrap() {
            assert!(r.pass, "{}: {}", r.instance, r.lhs);
        }
    }

    #[test]
    fn gn_1d_suite_small() {
        let cfg = SuiteConfig::default().scaled_down(20);
        for r in run_gn_1d(&cfg).unwrap() {
            assert!(r.pass, "{}: lhs {} rhs {}", r.instance, r.lhs, r.rhs);
        }
    }

    #[test]
    fn erosion_bounds_suite() {
        let cfg = SuiteConfig::default();
        for r in run_erosion_bounds(&cfg).unwrap() {
            assert!(r.pass, "{}: {} vs {}", r.instance, r.lhs, r.rhs);
        }
    }

    #[test]
    fn stability_suite_smoke() {
        let cfg = SuiteConfig {
            stability_pairs_1d: 6,
            stability_pairs_2d: 3,
            chi2_pairs: 3,
            grid_2d: 128,
            ..SuiteConfig::default()
        };
        for r in run_strong_convexity(&cfg).unwrap() {
            assert!(r.pass, "{}: ratio {}", r.instance, r.ratio);
        }
        for r in run_primal_dual_comparison(&cfg).unwrap() {
            assert!(r.pass, "{}: lhs {} rhs {}", r.instance, r.lhs, r.rhs);
        }
        for r in run_potential_stability(&cfg).unwrap() {
            assert!(r.pass, "{}: ratio {}", r.instance, r.ratio);
        }
    }

    #[test]
    #[ignore = "full-size timing probe; run explicitly"]
    fn probe_full_battery() {
        let t0 = std::time::Instant::now();
        let battery = run_stability_battery(&SuiteConfig::default()).unwrap();
        let fails = |v: &[CheckReport]| v.iter().filter(|r| !r.pass).count();
        let worst = |v: &[CheckReport]| {
            v.iter()
                .filter(|r| r.ratio.is_finite())
                .map(|r| r.ratio)
                .fold(f64::NEG_INFINITY, f64::max)
        };
        eprintln!(
            "battery {:.1?}: strong {}/{} fail (worst ratio {:.3}), lp {} fail, w1 {} fail (worst {:.3}), chi2 {} fail (worst {:.3})",
            t0.elapsed(),
            fails(&battery.strong_convexity),
            battery.strong_convexity.len(),
            worst(&battery.strong_convexity),
            fails(&battery.primal_dual),
            fails(&battery.potential_w1),
            worst(&battery.potential_w1),
            fails(&battery.potential_chi2),
            worst(&battery.potential_chi2),
        );
    }

    #[test]
    #[ignore = "full-size timing probe; run explicitly"]
    fn probe_heavy_checks() {
        for id in ["gn-2d", "map-exponents", "solver-correctness", "crofton", "density-stability-1d", "potential-holder"] {
            let t0 = std::time::Instant::now();
            let reports = run_check(id, &SuiteConfig::default()).unwrap();
            let fails: Vec<&CheckReport> = reports.iter().filter(|r| !r.pass).collect();
            eprintln!("{id}: {:.1?}, {} reports, {} failures", t0.elapsed(), reports.len(), fails.len());
            for f in fails.iter().take(5) {
                eprintln!("  FAIL {} lhs {:.4e} rhs {:.4e}", f.instance, f.lhs, f.rhs);
            }
        }
    }

    #[test]
    fn map_stability_regimes() {
        let rho = GridDensity::uniform(
            ConvexDomain::box2([0.0, 0.0], [1.0, 1.0]).unwrap(),
            128,
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mu0 = random_measure(&mut rng, 2, 5, 1e-3);
        let mu1 = random_measure(&mut rng, 2, 5, 1e-3);
        let opts = SolveOptions::default();
        let e0 = embed(&rho, &mu0, &opts).unwrap();
        let e1 = embed(&rho, &mu1, &opts).unwrap();

        let compact =
            check_map_stability(&rho, &e0, &e1, StabilityRegime::Compact, None, None).unwrap();
        assert!(compact.pass, "W₂ lower bound must hold");
        let expo = compact
            .aux
            .iter()
            .find(|(k, _)| k == "exponent")
            .map(|(_, v)| *v)
            .unwrap();
        assert!((expo - 1.0 / 6.0).abs() < 1e-15);

        let holder =
            check_map_stability(&rho, &e0, &e1, StabilityRegime::Holder, Some(0.5), None).unwrap();
        let expo = holder
            .aux
            .iter()
            .find(|(k, _)| k == "exponent")
            .map(|(_, v)| *v)
            .unwrap();
        assert!((expo - 1.0 / 14.0).abs() < 1e-15);

        let moments =
            check_map_stability(&rho, &e0, &e1, StabilityRegime::Moments, None, Some(4.0))
                .unwrap();
        let expo = moments
            .aux
            .iter()
            .find(|(k, _)| k == "exponent")
            .map(|(_, v)| *v)
            .unwrap();
        assert!((expo - 4.0 / 56.0).abs() < 1e-15);

        // unsupported regimes are rejected
        assert!(matches!(
            check_map_stability(&rho, &e0, &e1, StabilityRegime::Holder, Some(1.0), None),
            Err(VerifyError::RegimeUnsupported(_))
        ));
        assert!(matches!(
            check_map_stability(&rho, &e0, &e1, StabilityRegime::Moments, None, Some(2.0)),
            Err(VerifyError::RegimeUnsupported(_))
        ));
        assert!(matches!(
            check_map_stability(&rho, &e0, &e1, StabilityRegime::Moments, None, None),
            Err(VerifyError::RegimeUnsupported(_))
        ));
    }

    #[test]
    fn scale_coherence_of_strong_convexity() {
        // rescaling all geometry by s changes lhs and rhs consistently:
        // the verdict is unchanged and the ratio drifts only mildly
        let pts = vec![[0.2, 0.3], [0.7, 0.6], [0.4, 0.9]];
        let ws = vec![0.4, 0.35, 0.25];
        let base_rho = GridDensity::uniform(
            ConvexDomain::box2([0.0, 0.0], [1.0, 1.0]).unwrap(),
            128,
        )
        .unwrap();
        let mu0 = DiscreteMeasure::new(pts.clone(), ws.clone(), 2).unwrap();
        let mu1 = DiscreteMeasure::new(
            vec![[0.3, 0.2], [0.6, 0.7], [0.8, 0.4]],
            ws.clone(),
            2,
        )
        .unwrap();
        let r_unit = check_strong_convexity(&base_rho, &mu0, &mu1).unwrap();

        let s = 2.5;
        let scaled_rho = GridDensity::uniform(
            ConvexDomain::box2([0.0, 0.0], [s, s]).unwrap(),
            128,
        )
        .unwrap();
        let r_scaled =
            check_strong_convexity(&scaled_rho, &mu0.scale_points(s), &mu1.scale_points(s))
                .unwrap();
        assert!(r_unit.pass && r_scaled.pass);
        // the dual difference scales like s², so its variance is
        // 4-homogeneous; the bracket and oscillation are each
        // 2-homogeneous, so the ratio is scale-free up to quantization
        let h4 = s.powi(4);
        assert!(
            (r_scaled.lhs / r_unit.lhs - h4).abs() < 0.05 * h4,
            "lhs scaling {} vs {h4}",
            r_scaled.lhs / r_unit.lhs
        );
        let drift = (r_scaled.ratio / r_unit.ratio - 1.0).abs();
        assert!(drift < 0.25, "ratio drift {drift}");
    }

    #[test]
    fn erosion_lipschitz_on_solved_potential() {
        // measured (α, M_α) of a solved potential, then the Lipschitz
        // constant on the eroded domain stays below the designed cap
        let rho = GridDensity::uniform(
            ConvexDomain::box2([0.0, 0.0], [1.0, 1.0]).unwrap(),
            128,
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let mu = random_measure(&mut rng, 2, 6, 1e-3);
        let e = embed(&rho, &mu, &SolveOptions::default()).unwrap();
        let phi = e.transport.potential.max_affine(&rho);
        let alpha = 0.5;
        let m_alpha = crate::convexfun::holder_modulus_2d(
            |p| phi.eval(p),
            rho.domain(),
            alpha,
            100_000,
            9,
        );
        let r_target = 2.0 * m_alpha;
        let eta = crate::convexfun::erosion_lipschitz_radius(m_alpha, alpha, r_target).unwrap();
        let eroded = rho.domain().erode(eta).unwrap();
        let mut measured = 0.0f64;
        for c in rho.cells() {
            if eroded.contains(c.center) {
                measured = measured.max(norm(phi.slopes()[phi.argmax(c.center)]));
            }
        }
        assert!(
            measured <= r_target * (1.0 + 1e-6),
            "Lipschitz {measured} vs cap {r_target}"
        );
    }

    #[test]
    fn unknown_check_rejected() {
        assert!(matches!(
            run_check("no-such-check", &SuiteConfig::default()),
            Err(VerifyError::UnknownCheck(_))
        ));
    }
}
