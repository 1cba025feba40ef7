//! Semi-discrete optimal transport from a grid density to a finitely
//! supported target.
//!
//! Sign convention, used consistently everywhere: with `K(ψ) = ∫ max_j
//! (⟨x, y_j⟩ - ψ_j) dρ`, the solver *maximizes* the concave functional
//! `F(ψ) = -K(ψ) - ⟨ψ, μ⟩` by damped L-BFGS ascent and reports `K`
//! separately. [`dual_gradient`] returns the gradient of the *minimized*
//! objective `K(ψ) + ⟨ψ, μ⟩`, whose component `j` is `w_j - mass_j(ψ)`.
//!
//! Laguerre masses assign whole grid cells to the argmax index at the cell
//! center (lowest index on ties); the grid resolution is the accuracy
//! knob, and the default mass tolerance adapts to the largest cell mass.

use crate::convexfun::MaxAffinePotential;
use crate::measures::{DiscreteMeasure, GridDensity};
use crate::num::{dot, ksum, norm, Kahan, Point};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("dual potential and target support differ in size or position")]
    SupportMismatch,
    #[error("solver did not converge in {iterations} iterations (grad ∞-norm {grad_inf_norm:.3e})")]
    NonConvergence {
        iterations: usize,
        grad_inf_norm: f64,
        best: Box<TransportResult>,
    },
    #[error("invalid solver input: {0}")]
    InvalidInput(String),
}

/// Dual variable: one value per target support point.
#[derive(Debug, Clone)]
pub struct DualPotential {
    points: Vec<Point>,
    values: Vec<f64>,
}

impl DualPotential {
    pub fn new(points: Vec<Point>, values: Vec<f64>) -> Self {
        assert_eq!(points.len(), values.len());
        assert!(!points.is_empty(), "dual potential needs at least one point");
        assert!(values.iter().all(|v| v.is_finite()));
        Self { points, values }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The induced Brenier potential `φ(x) = max_j ⟨x, y_j⟩ - ψ_j` as a
    /// max-affine function on the source domain.
    pub fn max_affine(&self, rho: &GridDensity) -> MaxAffinePotential {
        MaxAffinePotential::new(
            self.points.clone(),
            self.values.clone(),
            rho.domain().clone(),
        )
    }

    /// Exact dual value at arbitrary points via `ψ(y) = max_{x∈X} ⟨x,y⟩ -
    /// φ(x)`; coincides with the stored values at support points whose
    /// Laguerre cell is nonempty.
    pub fn conjugate_at(&self, rho: &GridDensity, queries: &[Point]) -> Vec<f64> {
        self.max_affine(rho).conjugate_at(queries)
    }
}

#[derive(Debug, Clone)]
pub struct Convergence {
    pub iterations: usize,
    pub grad_inf_norm: f64,
    /// Maximized dual value `F(ψ) = -K(ψ) - ⟨ψ, μ⟩`.
    pub objective: f64,
    /// `K(ψ)` at the returned potential.
    pub kantorovich: f64,
}

/// Brenier map and potential sampled on the source grid, with the dual
/// potential and per-atom Laguerre masses.
#[derive(Debug, Clone)]
pub struct TransportResult {
    pub potential: DualPotential,
    /// Laguerre index per grid cell.
    pub assignment: Vec<usize>,
    /// `T(x) = y_{j(x)}` per grid cell.
    pub map: Vec<Point>,
    /// Centered Brenier potential per grid cell (zero grid mean against ρ).
    pub brenier_values: Vec<f64>,
    /// ρ-mass of each Laguerre cell.
    pub cell_masses: Vec<f64>,
    pub convergence: Convergence,
}

impl TransportResult {
    /// `||T - id||²_{L²(ρ)}` over the grid.
    pub fn map_id_sq_distance(&self, rho: &GridDensity) -> f64 {
        ksum(
            rho.cells()
                .iter()
                .zip(&self.map)
                .map(|(c, t)| c.mass() * norm([t[0] - c.center[0], t[1] - c.center[1]]).powi(2)),
        )
    }
}

/// `K(ψ) = ∫ max_j (⟨x, y_j⟩ - ψ_j) dρ` by grid quadrature.
pub fn kantorovich(psi: &DualPotential, rho: &GridDensity) -> f64 {
    let (k, _) = laguerre_stats(psi.points(), psi.values(), rho);
    k
}

/// ρ-mass of every Laguerre cell.
pub fn laguerre_masses(psi: &DualPotential, rho: &GridDensity) -> Vec<f64> {
    let (_, masses) = laguerre_stats(psi.points(), psi.values(), rho);
    masses
}

/// Gradient of the minimized dual objective `K(ψ) + ⟨ψ, μ⟩`:
/// component `j` is `w_j - mass_j(ψ)`. Components sum to zero.
pub fn dual_gradient(psi: &DualPotential, rho: &GridDensity, mu: &DiscreteMeasure) -> Vec<f64> {
    assert_eq!(psi.len(), mu.len(), "support mismatch");
    let (_, masses) = laguerre_stats(psi.points(), psi.values(), rho);
    mu.weights()
        .iter()
        .zip(&masses)
        .map(|(w, m)| w - m)
        .collect()
}

/// Minimized dual objective `K(ψ) + ⟨ψ, μ⟩`.
pub fn dual_objective(psi: &DualPotential, rho: &GridDensity, mu: &DiscreteMeasure) -> f64 {
    kantorovich(psi, rho)
        + ksum(
            psi.values()
                .iter()
                .zip(mu.weights())
                .map(|(v, w)| v * w),
        )
}

/// One pass over the grid: Kantorovich value and Laguerre masses.
/// Parallel over fixed-size chunks merged in order, so results are
/// deterministic run to run.
fn laguerre_stats(points: &[Point], values: &[f64], rho: &GridDensity) -> (f64, Vec<f64>) {
    let m = points.len();
    let cells = rho.cells();
    let chunks: Vec<(Kahan, Vec<f64>)> = cells
        .par_chunks(8192)
        .map(|chunk| {
            let mut k = Kahan::new();
            let mut masses = vec![0.0f64; m];
            for c in chunk {
                let mut best = f64::NEG_INFINITY;
                let mut arg = 0usize;
                for (j, (y, v)) in points.iter().zip(values).enumerate() {
                    let s = dot(c.center, *y) - v;
                    if s > best {
                        best = s;
                        arg = j;
                    }
                }
                let w = c.mass();
                k.add(best * w);
                masses[arg] += w;
            }
            (k, masses)
        })
        .collect();
    let mut k = Kahan::new();
    let mut masses = vec![0.0f64; m];
    for (ck, cm) in chunks {
        k.add(ck.total());
        for (t, s) in masses.iter_mut().zip(cm) {
            *t += s;
        }
    }
    (k.total(), masses)
}

fn assignment_of(points: &[Point], values: &[f64], rho: &GridDensity) -> Vec<usize> {
    rho.cells()
        .par_chunks(8192)
        .flat_map_iter(|chunk| {
            chunk.iter().map(|c| {
                let mut best = f64::NEG_INFINITY;
                let mut arg = 0usize;
                for (j, (y, v)) in points.iter().zip(values).enumerate() {
                    let s = dot(c.center, *y) - v;
                    if s > best {
                        best = s;
                        arg = j;
                    }
                }
                arg
            })
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Termination threshold on `max_j |w_j - mass_j|`. `None` adapts to
    /// the grid quantization scale, see [`default_mass_tolerance`].
    pub mass_tolerance: Option<f64>,
    pub max_iterations: usize,
    /// L-BFGS history length.
    pub memory: usize,
    /// Warm start for the dual values; `None` uses `ψ_j = ½||y_j||²`
    /// (exact when the target is the source shifted). The reported result
    /// is canonical: shifting the start by a constant changes nothing.
    pub initial_potential: Option<Vec<f64>>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            mass_tolerance: None,
            max_iterations: 2000,
            memory: 10,
            initial_potential: None,
        }
    }
}

/// Whole-cell assignment moves mass in quanta: flipping the cells along a
/// Laguerre boundary of length ~diam changes a mass by up to
/// `M_ρ · spacing · diam^{d-1}`. That is the resolution floor of the
/// gradient norm, so the default tolerance sits right at it.
pub fn default_mass_tolerance(rho: &GridDensity) -> f64 {
    let (_, max_density) = rho.density_bounds();
    let d = rho.dim() as i32;
    (max_density * rho.spacing() * rho.domain().diam().powi(d - 1)).max(1e-7)
}

/// Solves the semi-discrete problem from `rho` to `mu`, returning the
/// Brenier map/potential on the grid. Quasi-Newton ascent on the concave
/// dual with a damping guard that rejects steps emptying a Laguerre cell.
pub fn solve_semidiscrete(
    rho: &GridDensity,
    mu: &DiscreteMeasure,
    opts: &SolveOptions,
) -> Result<TransportResult, SolveError> {
    if mu.is_empty() {
        return Err(SolveError::InvalidInput("empty target support".into()));
    }
    if rho.resolution() < 64 {
        return Err(SolveError::InvalidInput(format!(
            "grid resolution {} is below the supported minimum 64",
            rho.resolution()
        )));
    }
    let points = mu.points().to_vec();
    let weights = mu.weights().to_vec();
    let tol = opts.mass_tolerance.unwrap_or_else(|| default_mass_tolerance(rho));

    let mut psi: Vec<f64> = match &opts.initial_potential {
        Some(init) => {
            if init.len() != points.len() || init.iter().any(|v| !v.is_finite()) {
                return Err(SolveError::InvalidInput(
                    "initial potential must be finite with one value per atom".into(),
                ));
            }
            init.clone()
        }
        // Brenier-quadratic start: exact when μ is ρ shifted
        None => points.iter().map(|y| 0.5 * dot(*y, *y)).collect(),
    };
    let (mut k_val, mut masses) = laguerre_stats(&points, &psi, rho);
    let f_of = |k: f64, psi: &[f64]| -> f64 {
        -k - ksum(psi.iter().zip(&weights).map(|(p, w)| p * w))
    };
    let mut f_val = f_of(k_val, &psi);
    // ascent gradient of F = masses - weights
    let grad_of = |masses: &[f64]| -> Vec<f64> {
        masses.iter().zip(&weights).map(|(m, w)| m - w).collect()
    };
    let mut grad = grad_of(&masses);

    let min_weight = weights.iter().copied().fold(f64::INFINITY, f64::min);
    let init_min_mass = masses.iter().copied().fold(f64::INFINITY, f64::min);
    // Damping floor: keep every cell at least half as full as the worst
    // of (initial fill, target weight), so iterates stay in the region
    // where the dual gradient is well behaved.
    // If the start already has an empty cell, enforce only positivity
    // until the iterate enters the all-cells-occupied region.
    let mut floor = if init_min_mass > 0.0 {
        0.5 * init_min_mass.min(min_weight)
    } else {
        0.0
    };

    let mut s_hist: Vec<Vec<f64>> = Vec::new();
    let mut y_hist: Vec<Vec<f64>> = Vec::new();
    let mut rho_hist: Vec<f64> = Vec::new();
    let mut iterations = 0usize;
    let mut gnorm = grad.iter().fold(0.0f64, |a, g| a.max(g.abs()));
    // warm start for the steepest-ascent fallback step length
    let mut grad_step = 1.0f64;

    while iterations < opts.max_iterations {
        if gnorm <= tol && masses.iter().all(|&m| m > 0.0) {
            return Ok(finish(
                rho, &points, &psi, &weights, iterations, gnorm, f_val, k_val,
            ));
        }
        iterations += 1;

        // two-loop recursion on the ascent direction
        let mut dir = grad.clone();
        let h = s_hist.len();
        let mut alphas = vec![0.0f64; h];
        for i in (0..h).rev() {
            let a = rho_hist[i] * dotv(&s_hist[i], &dir);
            alphas[i] = a;
            axpy(&mut dir, -a, &y_hist[i]);
        }
        if h > 0 {
            let last = h - 1;
            let gamma = dotv(&s_hist[last], &y_hist[last]) / dotv(&y_hist[last], &y_hist[last]);
            if gamma.is_finite() && gamma > 0.0 {
                for d in dir.iter_mut() {
                    *d *= gamma;
                }
            }
        }
        for i in 0..h {
            let b = rho_hist[i] * dotv(&y_hist[i], &dir);
            axpy(&mut dir, alphas[i] - b, &s_hist[i]);
        }
        if dotv(&dir, &grad) <= 0.0 {
            // not an ascent direction: drop the memory
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            dir = grad.clone();
        }

        let mut accepted: Option<LineSearchPoint> = None;
        // attempts: quasi-Newton direction, steepest ascent, then steepest
        // ascent with a relaxed damping floor (the guard can otherwise
        // block every step when a cell mass sits at the floor)
        for attempt in 0..3 {
            let d = if attempt == 0 { dir.clone() } else { grad.clone() };
            let slope0 = dotv(&d, &grad);
            if slope0 <= 0.0 {
                continue;
            }
            let alpha0 = if attempt == 0 {
                1.0
            } else {
                (grad_step * 4.0).clamp(1e-6, 1.0)
            };
            let guard = if attempt < 2 { floor } else { 0.0 };
            if let Some(pt) = wolfe_search(
                &points, &weights, &psi, &d, slope0, f_val, guard, alpha0, rho,
            ) {
                if attempt >= 1 {
                    grad_step = pt.alpha;
                }
                if attempt == 2 {
                    // the guard was in the way: loosen it to what the
                    // accepted iterate supports
                    let min_mass = pt.masses.iter().copied().fold(f64::INFINITY, f64::min);
                    floor = floor.min(0.5 * min_mass);
                }
                accepted = Some(pt);
                break;
            }
            if attempt == 0 {
                s_hist.clear();
                y_hist.clear();
                rho_hist.clear();
            }
        }

        let Some(pt) = accepted else {
            // piecewise-linear plateau: no admissible ascent step remains
            break;
        };
        let (psi_new, k_new, m_new, f_new) = (pt.psi, pt.kantorovich, pt.masses, pt.value);
        let s: Vec<f64> = psi_new.iter().zip(&psi).map(|(a, b)| a - b).collect();
        let g_new = grad_of(&m_new);
        let yv: Vec<f64> = g_new.iter().zip(&grad).map(|(a, b)| b - a).collect();
        let sy = dotv(&s, &yv);
        if sy > 1e-14 * norm_v(&s) * norm_v(&yv) {
            if s_hist.len() == opts.memory {
                s_hist.remove(0);
                y_hist.remove(0);
                rho_hist.remove(0);
            }
            s_hist.push(s);
            y_hist.push(yv);
            rho_hist.push(1.0 / sy);
        }
        psi = psi_new;
        k_val = k_new;
        masses = m_new;
        f_val = f_new;
        grad = g_new;
        gnorm = grad.iter().fold(0.0f64, |a, g| a.max(g.abs()));
        if floor == 0.0 {
            let min_mass = masses.iter().copied().fold(f64::INFINITY, f64::min);
            if min_mass > 0.0 {
                floor = 0.5 * min_mass.min(min_weight);
            }
        }
    }

    if gnorm <= tol && masses.iter().all(|&m| m > 0.0) {
        return Ok(finish(
            rho, &points, &psi, &weights, iterations, gnorm, f_val, k_val,
        ));
    }
    Err(SolveError::NonConvergence {
        iterations,
        grad_inf_norm: gnorm,
        best: Box::new(finish(
            rho, &points, &psi, &weights, iterations, gnorm, f_val, k_val,
        )),
    })
}

struct LineSearchPoint {
    alpha: f64,
    psi: Vec<f64>,
    kantorovich: f64,
    masses: Vec<f64>,
    value: f64,
}

/// Bracketing line search on the concave section `g(α) = F(ψ + α d)`:
/// expand while the directional slope stays steep, bisect once the slope
/// decays or the step is inadmissible, and return the best admissible
/// point. Every mass evaluation yields the slope for free
/// (`⟨mass, d⟩ - ⟨w, d⟩`), which keeps curvature-aware steps affordable
/// and the quasi-Newton pairs well-formed on a piecewise-linear dual.
#[allow(clippy::too_many_arguments)]
fn wolfe_search(
    points: &[Point],
    weights: &[f64],
    psi: &[f64],
    d: &[f64],
    slope0: f64,
    f0: f64,
    floor: f64,
    alpha0: f64,
    rho: &GridDensity,
) -> Option<LineSearchPoint> {
    const C1: f64 = 1e-4;
    const C2: f64 = 0.5;
    let w_dot = dotv(weights, d);
    let mut lo_alpha = 0.0f64;
    let mut hi_alpha: Option<f64> = None;
    let mut best: Option<LineSearchPoint> = None;
    let mut best_value = f0;
    let mut alpha = alpha0;
    for _ in 0..16 {
        let cand: Vec<f64> = psi.iter().zip(d).map(|(p, di)| p + alpha * di).collect();
        let (k, masses) = laguerre_stats(points, &cand, rho);
        let value = -k - ksum(cand.iter().zip(weights).map(|(p, w)| p * w));
        let slope = dotv(&masses, d) - w_dot;
        let min_mass = masses.iter().copied().fold(f64::INFINITY, f64::min);
        let admissible =
            value >= f0 + C1 * alpha * slope0 && (floor == 0.0 || min_mass > floor);
        if admissible {
            if value >= best_value {
                best_value = value;
                best = Some(LineSearchPoint {
                    alpha,
                    psi: cand,
                    kantorovich: k,
                    masses,
                    value,
                });
            }
            if slope <= C2 * slope0 {
                break; // slope has decayed enough: curvature condition holds
            }
            lo_alpha = alpha;
            alpha = match hi_alpha {
                Some(hi) => 0.5 * (alpha + hi),
                None => alpha * 2.0,
            };
        } else {
            hi_alpha = Some(alpha);
            alpha = 0.5 * (lo_alpha + alpha);
        }
        if alpha <= 1e-18 {
            break;
        }
    }
    best.filter(|pt| pt.value > f0)
}

fn dotv(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(dst: &mut [f64], a: f64, x: &[f64]) {
    for (d, xi) in dst.iter_mut().zip(x) {
        *d += a * xi;
    }
}

fn norm_v(a: &[f64]) -> f64 {
    dotv(a, a).sqrt()
}

#[allow(clippy::too_many_arguments)]
fn finish(
    rho: &GridDensity,
    points: &[Point],
    psi: &[f64],
    weights: &[f64],
    iterations: usize,
    grad_inf_norm: f64,
    objective: f64,
    kantorovich: f64,
) -> TransportResult {
    // normalize ψ to zero μ-mean
    let mean = ksum(psi.iter().zip(weights).map(|(p, w)| p * w));
    let values: Vec<f64> = psi.iter().map(|p| p - mean).collect();
    build_result(
        rho,
        points.to_vec(),
        values,
        Convergence {
            iterations,
            grad_inf_norm,
            objective,
            kantorovich,
        },
        None,
    )
}

/// Assembles map, centered potential and cell masses for a dual potential.
/// `exact_masses` overrides the grid-quantized masses when the caller
/// knows them exactly (the 1D solver does).
fn build_result(
    rho: &GridDensity,
    points: Vec<Point>,
    values: Vec<f64>,
    convergence: Convergence,
    exact_masses: Option<Vec<f64>>,
) -> TransportResult {
    let assignment = assignment_of(&points, &values, rho);
    let map: Vec<Point> = assignment.iter().map(|&j| points[j]).collect();
    let raw: Vec<f64> = rho
        .cells()
        .iter()
        .zip(&assignment)
        .map(|(c, &j)| dot(c.center, points[j]) - values[j])
        .collect();
    let mean = ksum(rho.cells().iter().zip(&raw).map(|(c, v)| c.mass() * v));
    let brenier_values: Vec<f64> = raw.iter().map(|v| v - mean).collect();
    let cell_masses = exact_masses.unwrap_or_else(|| {
        let mut masses = vec![0.0f64; points.len()];
        for (c, &j) in rho.cells().iter().zip(&assignment) {
            masses[j] += c.mass();
        }
        masses
    });
    TransportResult {
        potential: DualPotential::new(points, values),
        assignment,
        map,
        brenier_values,
        cell_masses,
        convergence,
    }
}

/// Exact 1D solver: the Brenier map is the monotone rearrangement
/// `T = F_μ^{-1} ∘ F_ρ`, the dual values follow from the Laguerre-cell
/// boundaries at the exact ρ-quantiles of the cumulative target weights.
pub fn brenier_1d(rho: &GridDensity, mu: &DiscreteMeasure) -> Result<TransportResult, SolveError> {
    if rho.dim() != 1 || mu.dim() != 1 {
        return Err(SolveError::InvalidInput(
            "brenier_1d requires one-dimensional inputs".into(),
        ));
    }
    let m = mu.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| mu.points()[i][0].total_cmp(&mu.points()[j][0]));
    let quantile = rho.quantile_fn();

    // ψ along the sorted atoms: the boundary b_k between consecutive atoms
    // satisfies b_k (y_{k+1} - y_k) = ψ_{k+1} - ψ_k
    let mut psi_sorted = vec![0.0f64; m];
    let mut cum = 0.0;
    for k in 0..m.saturating_sub(1) {
        cum += mu.weights()[order[k]];
        let b = quantile.eval(cum);
        let dy = mu.points()[order[k + 1]][0] - mu.points()[order[k]][0];
        psi_sorted[k + 1] = psi_sorted[k] + b * dy;
    }
    let mut values = vec![0.0f64; m];
    for (k, &j) in order.iter().enumerate() {
        values[j] = psi_sorted[k];
    }
    // zero μ-mean normalization
    let mean = ksum(values.iter().zip(mu.weights()).map(|(v, w)| v * w));
    for v in values.iter_mut() {
        *v -= mean;
    }

    let points = mu.points().to_vec();
    let psi = DualPotential::new(points.clone(), values.clone());
    let k_val = kantorovich(&psi, rho);
    let objective = -k_val - ksum(values.iter().zip(mu.weights()).map(|(v, w)| v * w));
    Ok(build_result(
        rho,
        points,
        values,
        Convergence {
            iterations: 0,
            grad_inf_norm: 0.0,
            objective,
            kantorovich: k_val,
        },
        Some(mu.weights().to_vec()),
    ))
}

/// Monotone 1D transport map between two grid densities,
/// `T = F_ν^{-1} ∘ F_ρ`, as an exact piecewise-linear function.
pub fn monotone_map_1d(rho: &GridDensity, nu: &GridDensity) -> crate::convexfun::SampledFunction1D {
    assert!(rho.dim() == 1 && nu.dim() == 1);
    let q_nu = nu.quantile_fn();
    let q_rho = rho.quantile_fn();
    // breakpoints: ρ cell edges plus pullbacks of ν quantile knots
    let mut xs: Vec<f64> = q_rho.xs.clone();
    for &t in &q_nu.ts {
        xs.push(q_rho.eval(t));
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
    let rho_cdf = Cdf1D::from_density(rho);
    let values: Vec<f64> = xs.iter().map(|&x| q_nu.eval(rho_cdf.eval(x))).collect();
    crate::convexfun::SampledFunction1D::new(xs, values)
}

/// Piecewise-linear CDF of a 1D grid density.
pub struct Cdf1D {
    edges: Vec<f64>,
    cum: Vec<f64>,
}

impl Cdf1D {
    pub fn from_density(rho: &GridDensity) -> Self {
        assert_eq!(rho.dim(), 1);
        let cells = rho.cells();
        let mut edges = Vec::with_capacity(cells.len() + 1);
        let mut cum = Vec::with_capacity(cells.len() + 1);
        edges.push(cells[0].center[0] - 0.5 * cells[0].volume);
        cum.push(0.0);
        let mut acc = Kahan::new();
        for c in cells {
            acc.add(c.mass());
            edges.push(c.center[0] + 0.5 * c.volume);
            cum.push(acc.total());
        }
        let last = cum.len() - 1;
        cum[last] = 1.0;
        Self { edges, cum }
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.edges[0] {
            return 0.0;
        }
        if x >= *self.edges.last().unwrap() {
            return 1.0;
        }
        let k = match self.edges.binary_search_by(|p| p.total_cmp(&x)) {
            Ok(i) => i.max(1),
            Err(i) => i,
        };
        let (x0, x1) = (self.edges[k - 1], self.edges[k]);
        let (c0, c1) = (self.cum[k - 1], self.cum[k]);
        c0 + (c1 - c0) * (x - x0) / (x1 - x0)
    }
}

/// `∫ (f - g)² dρ` for piecewise-linear `f, g` against a 1D grid density,
/// exact per piece.
pub fn l2_rho_sq_distance(
    f: &crate::convexfun::SampledFunction1D,
    g: &crate::convexfun::SampledFunction1D,
    rho: &GridDensity,
) -> f64 {
    assert_eq!(rho.dim(), 1);
    let mut knots: Vec<f64> = f
        .breakpoints()
        .iter()
        .chain(g.breakpoints().iter())
        .copied()
        .collect();
    for c in rho.cells() {
        knots.push(c.center[0] - 0.5 * c.volume);
        knots.push(c.center[0] + 0.5 * c.volume);
    }
    knots.sort_by(f64::total_cmp);
    knots.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    let cells = rho.cells();
    let lo = cells[0].center[0] - 0.5 * cells[0].volume;
    let hi = cells[cells.len() - 1].center[0] + 0.5 * cells[cells.len() - 1].volume;
    let mut acc = Kahan::new();
    let mut ci = 0usize;
    for w in knots.windows(2) {
        let (x0, x1) = (w[0].max(lo), w[1].min(hi));
        if x1 <= x0 {
            continue;
        }
        let mid = 0.5 * (x0 + x1);
        while ci + 1 < cells.len() && cells[ci].center[0] + 0.5 * cells[ci].volume < mid {
            ci += 1;
        }
        let dens = cells[ci].density;
        let d0 = f.eval(x0) - g.eval(x0);
        let d1 = f.eval(x1) - g.eval(x1);
        acc.add(dens * (x1 - x0) * (d0 * d0 + d0 * d1 + d1 * d1) / 3.0);
    }
    acc.total()
}

/// Evaluation of the dual segment `ψ^t = (1-t)ψ⁰ + tψ¹`.
#[derive(Debug, Clone)]
pub struct PathEval {
    pub k_value: f64,
    /// `d/dt K(ψ^t) = -Σ_j v_j · mass_j(ψ^t)` with `v = ψ¹ - ψ⁰`.
    pub derivative: f64,
    /// Pushforward of ρ under the Laguerre assignment of `ψ^t`.
    pub interpolated: DiscreteMeasure,
}

/// Interpolates two dual potentials on a common support and returns the
/// Kantorovich value, the path derivative, and the interpolated measure.
pub fn dual_path(
    psi0: &DualPotential,
    psi1: &DualPotential,
    t: f64,
    rho: &GridDensity,
) -> Result<PathEval, SolveError> {
    if psi0.len() != psi1.len() {
        return Err(SolveError::SupportMismatch);
    }
    for (a, b) in psi0.points().iter().zip(psi1.points()) {
        if crate::num::dist(*a, *b) > 1e-12 {
            return Err(SolveError::SupportMismatch);
        }
    }
    assert!((0.0..=1.0).contains(&t), "path parameter must lie in [0, 1]");
    let values: Vec<f64> = psi0
        .values()
        .iter()
        .zip(psi1.values())
        .map(|(a, b)| (1.0 - t) * a + t * b)
        .collect();
    let points = psi0.points().to_vec();
    let (k_value, masses) = laguerre_stats(&points, &values, rho);
    let derivative = -ksum(
        psi1.values()
            .iter()
            .zip(psi0.values())
            .zip(&masses)
            .map(|((b, a), m)| (b - a) * m),
    );
    let assignment = assignment_of(&points, &values, rho);
    let map: Vec<Point> = assignment.iter().map(|&j| points[j]).collect();
    let interpolated = crate::measures::pushforward(rho, &map);
    Ok(PathEval {
        k_value,
        derivative,
        interpolated,
    })
}
