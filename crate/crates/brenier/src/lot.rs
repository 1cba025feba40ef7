//! The linearized optimal transport embedding `μ ↦ T_μ` and the scalar
//! functionals appearing in the stability inequalities: the L²(ρ)
//! distance between Brenier maps, variances over finite measures, and the
//! dual bracket.

use crate::measures::{DiscreteMeasure, GridDensity};
use crate::num::{dist, ksum, Point};
use crate::otsolve::{self, SolveError, SolveOptions, TransportResult};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LotError {
    #[error("embedded measures refer to different source densities")]
    ReferenceMismatch,
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// A target measure embedded through its Brenier map on the ρ-grid.
#[derive(Debug, Clone)]
pub struct EmbeddedMeasure {
    /// Fingerprint of the source density (dimension, resolution, cell count).
    reference: (usize, usize, usize),
    pub transport: TransportResult,
    pub target: DiscreteMeasure,
}

impl EmbeddedMeasure {
    /// Image of ρ under the realized map: the target atoms weighted by
    /// the Laguerre cell masses. This is the measure that the realized
    /// potential transports to exactly, and the one the comparison
    /// inequalities are stated for; it matches `target` within the solver
    /// mass tolerance.
    pub fn effective_target(&self) -> DiscreteMeasure {
        let total: f64 = ksum(self.transport.cell_masses.iter().copied());
        let weights: Vec<f64> = self
            .transport
            .cell_masses
            .iter()
            .map(|m| m / total)
            .collect();
        DiscreteMeasure::new(
            self.transport.potential.points().to_vec(),
            weights,
            self.target.dim(),
        )
        .expect("cell masses form a valid measure")
    }
}

fn fingerprint(rho: &GridDensity) -> (usize, usize, usize) {
    (rho.dim(), rho.resolution(), rho.cells().len())
}

/// Solves for the Brenier map of `mu` and wraps it as an embedded point of
/// `L²(ρ)`. Uses the exact monotone-rearrangement solver in 1D and the
/// semi-discrete solver in 2D.
pub fn embed(
    rho: &GridDensity,
    mu: &DiscreteMeasure,
    opts: &SolveOptions,
) -> Result<EmbeddedMeasure, LotError> {
    let transport = if rho.dim() == 1 {
        otsolve::brenier_1d(rho, mu)?
    } else {
        otsolve::solve_semidiscrete(rho, mu, opts)?
    };
    Ok(EmbeddedMeasure {
        reference: fingerprint(rho),
        transport,
        target: mu.clone(),
    })
}

/// `W_{2,ρ}(a, b) = ||T_a - T_b||_{L²(ρ)}`.
pub fn lot_distance(
    a: &EmbeddedMeasure,
    b: &EmbeddedMeasure,
    rho: &GridDensity,
) -> Result<f64, LotError> {
    if a.reference != b.reference || a.reference != fingerprint(rho) {
        return Err(LotError::ReferenceMismatch);
    }
    let sq = ksum(
        rho.cells()
            .iter()
            .zip(a.transport.map.iter().zip(&b.transport.map))
            .map(|(c, (ta, tb))| c.mass() * dist(*ta, *tb).powi(2)),
    );
    Ok(sq.max(0.0).sqrt())
}

/// `||f||_{L^p(ρ)}` of per-cell samples.
pub fn lp_norm_grid(samples: &[f64], rho: &GridDensity, p: f64) -> f64 {
    assert_eq!(samples.len(), rho.cells().len());
    ksum(
        rho.cells()
            .iter()
            .zip(samples)
            .map(|(c, v)| c.mass() * v.abs().powf(p)),
    )
    .powf(1.0 / p)
}

/// Variance against a finite measure of total mass possibly ≠ 1, in the
/// `min_c ∫ (f - c)² dm` sense: `∫ f² dm - (∫ f dm)² / m(total)`.
pub fn variance(values: &[f64], masses: &[f64]) -> f64 {
    assert_eq!(values.len(), masses.len());
    let total = ksum(masses.iter().copied());
    assert!(total > 0.0, "variance needs positive total mass");
    let first = ksum(values.iter().zip(masses).map(|(v, m)| v * m));
    let second = ksum(values.iter().zip(masses).map(|(v, m)| v * v * m));
    (second - first * first / total).max(0.0)
}

/// Variance of grid samples against ρ.
pub fn variance_grid(samples: &[f64], rho: &GridDensity) -> f64 {
    let masses: Vec<f64> = rho.cells().iter().map(|c| c.mass()).collect();
    variance(samples, &masses)
}

/// Evaluation of `ψ¹ - ψ⁰` on the union support of two embedded measures
/// together with the stacked masses of `μ⁰ + μ¹` (total mass 2), where
/// `μ^k` are the realized pushforwards (Laguerre cell masses). Dual
/// values at points outside a potential's own support use the globally
/// defined max-affine conjugate formula.
pub struct DualDifference {
    /// Union support points (μ⁰ atoms then μ¹ atoms).
    pub points: Vec<Point>,
    /// `ψ¹ - ψ⁰` at those points.
    pub values: Vec<f64>,
    /// Masses of μ⁰ + μ¹ at those points.
    pub masses: Vec<f64>,
    /// ψ⁰ at the union points.
    pub psi0: Vec<f64>,
    /// ψ¹ at the union points.
    pub psi1: Vec<f64>,
}

pub fn dual_difference(
    a: &EmbeddedMeasure,
    b: &EmbeddedMeasure,
    rho: &GridDensity,
) -> DualDifference {
    let ea = a.effective_target();
    let eb = b.effective_target();
    let mut points: Vec<Point> = Vec::new();
    let mut masses: Vec<f64> = Vec::new();
    for (p, w) in ea.points().iter().zip(ea.weights()) {
        points.push(*p);
        masses.push(*w);
    }
    for (p, w) in eb.points().iter().zip(eb.weights()) {
        points.push(*p);
        masses.push(*w);
    }
    let psi0 = a.transport.potential.conjugate_at(rho, &points);
    let psi1 = b.transport.potential.conjugate_at(rho, &points);
    let values: Vec<f64> = psi1.iter().zip(&psi0).map(|(x, y)| x - y).collect();
    DualDifference {
        points,
        values,
        masses,
        psi0,
        psi1,
    }
}

/// Dual bracket `⟨ψ⁰ - ψ¹, μ¹ - μ⁰⟩ = Σ (ψ⁰-ψ¹)(y) (dμ¹ - dμ⁰)(y)` over
/// the realized pushforward measures, invariant under adding constants to
/// either potential. Nonnegative by monotonicity of the dual gradient.
pub fn bracket(a: &EmbeddedMeasure, b: &EmbeddedMeasure, rho: &GridDensity) -> f64 {
    let d = dual_difference(a, b, rho);
    let na = a.target.len();
    // μ¹ - μ⁰ over the stacked points: -w⁰ on the first block, +w¹ after
    let mut acc = crate::num::Kahan::new();
    for (k, ((p0, p1), _)) in d.psi0.iter().zip(&d.psi1).zip(&d.points).enumerate() {
        let signed = if k < na { -d.masses[k] } else { d.masses[k] };
        acc.add((p0 - p1) * signed);
    }
    acc.total()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ConvexDomain;
    use crate::measures::{w2_discrete, GridDensity};
    use crate::num::dot;

    fn unit_square_density(n: usize) -> GridDensity {
        GridDensity::uniform(ConvexDomain::box2([0.0, 0.0], [1.0, 1.0]).unwrap(), n).unwrap()
    }

    fn coarse_grid_atoms(k: usize, tau: Point) -> DiscreteMeasure {
        let pts: Vec<Point> = (0..k * k)
            .map(|i| {
                let x = ((i % k) as f64 + 0.5) / k as f64;
                let y = ((i / k) as f64 + 0.5) / k as f64;
                [x + tau[0], y + tau[1]]
            })
            .collect();
        DiscreteMeasure::uniform_on(pts, 2).unwrap()
    }

    /// Lattice targets have axis-aligned Laguerre boundaries, so whole
    /// strips of grid cells flip at once; a tolerance just above the strip
    /// mass keeps the map sharp.
    fn tight_opts() -> SolveOptions {
        SolveOptions {
            mass_tolerance: Some(2e-3),
            ..SolveOptions::default()
        }
    }

    #[test]
    fn translation_embedding() {
        let rho = unit_square_density(128);
        let tau = [0.3, -0.2];
        let mu = coarse_grid_atoms(8, tau);
        let e = embed(&rho, &mu, &tight_opts()).unwrap();
        // ||T - id||²_{L²(ρ)} = ||τ||² + within-cell variance of the 8×8
        // atom lattice: each cell of side s = 1/8 contributes s²/6
        let d2 = e.transport.map_id_sq_distance(&rho);
        let tn = crate::num::norm(tau);
        let quant = (1.0 / 8.0f64).powi(2) / 6.0;
        assert!(
            (d2 - (tn * tn + quant)).abs() < 4e-3,
            "d² {d2} vs {}",
            tn * tn + quant
        );
    }

    #[test]
    fn identity_embedding_close_to_id() {
        let rho = unit_square_density(128);
        let mu = coarse_grid_atoms(8, [0.0, 0.0]);
        let e = embed(&rho, &mu, &tight_opts()).unwrap();
        let d2 = e.transport.map_id_sq_distance(&rho);
        // only the atom quantization remains: s²/6 with s = 1/8
        let quant = (1.0 / 8.0f64).powi(2) / 6.0;
        assert!((d2 - quant).abs() < 1e-3, "d² {d2} vs {quant}");
    }

    #[test]
    fn lot_distance_translations() {
        let rho = unit_square_density(128);
        let t1 = [0.15, 0.0];
        let t2 = [0.0, 0.25];
        let e1 = embed(&rho, &coarse_grid_atoms(8, t1), &tight_opts()).unwrap();
        let e2 = embed(&rho, &coarse_grid_atoms(8, t2), &tight_opts()).unwrap();
        let d = lot_distance(&e1, &e2, &rho).unwrap();
        // both maps are the same lattice assignment shifted, so the
        // distance is ||τ₁ - τ₂|| up to boundary-cell churn at the solver
        // mass tolerance
        let expected = crate::num::dist(t1, t2);
        assert!((d - expected).abs() < 0.02, "lot {d} vs {expected}");
        // injectivity witness: zero distance forces equal pushforwards
        assert_eq!(lot_distance(&e1, &e1, &rho).unwrap(), 0.0);
        let pa = e1.effective_target();
        let pb = e1.effective_target();
        for (x, y) in pa.weights().iter().zip(pb.weights()) {
            assert_eq!(x, y);
        }

        // W₂ lower bound via the squared-cost LP on the targets
        let w2 = w2_discrete(&e1.target, &e2.target).unwrap();
        assert!(w2 <= d + 2.0 * rho.spacing() * 2.0f64.sqrt());
    }

    #[test]
    fn reference_mismatch_is_an_error() {
        let rho_a = unit_square_density(128);
        let rho_b = unit_square_density(96);
        let mu = coarse_grid_atoms(4, [0.0, 0.0]);
        let ea = embed(&rho_a, &mu, &SolveOptions::default()).unwrap();
        let eb = embed(&rho_b, &mu, &SolveOptions::default()).unwrap();
        assert!(matches!(
            lot_distance(&ea, &eb, &rho_a),
            Err(LotError::ReferenceMismatch)
        ));
    }

    #[test]
    fn variance_examples() {
        // constant: zero
        assert_eq!(variance(&[3.0, 3.0, 3.0], &[0.2, 0.3, 0.5]), 0.0);

        // U[0,1]: Var = 1/12 by grid quadrature
        let rho =
            GridDensity::uniform(ConvexDomain::interval(0.0, 1.0).unwrap(), 4096).unwrap();
        let vals: Vec<f64> = rho.cells().iter().map(|c| c.center[0]).collect();
        assert!((variance_grid(&vals, &rho) - 1.0 / 12.0).abs() < 1e-7);

        // mixture of U[0,1] and U[ε,1+ε] with f(y) = -εy, total mass 2:
        // Var = 2ε²(1/12 + ε²/4)
        let eps = 0.15;
        let n = 3000;
        let mut values = Vec::with_capacity(2 * n);
        let mut masses = Vec::with_capacity(2 * n);
        for i in 0..n {
            let y = (i as f64 + 0.5) / n as f64;
            values.push(-eps * y);
            masses.push(1.0 / n as f64);
        }
        for i in 0..n {
            let y = eps + (i as f64 + 0.5) / n as f64;
            values.push(-eps * y);
            masses.push(1.0 / n as f64);
        }
        let v = variance(&values, &masses);
        let expected = 2.0 * eps * eps * (1.0 / 12.0 + eps * eps / 4.0);
        assert!((v - expected).abs() < 1e-6, "{v} vs {expected}");
    }

    #[test]
    fn bracket_shift_family() {
        // ρ = U[0,1], μ^ε = U[ε, 1+ε] discretized: bracket = ε² within 2%
        let rho = GridDensity::uniform(ConvexDomain::interval(0.0, 1.0).unwrap(), 1024).unwrap();
        let atoms = |eps: f64| {
            DiscreteMeasure::uniform_on(
                (0..200)
                    .map(|j| [eps + (j as f64 + 0.5) / 200.0, 0.0])
                    .collect(),
                1,
            )
            .unwrap()
        };
        let e0 = embed(&rho, &atoms(0.0), &SolveOptions::default()).unwrap();
        for eps in [0.05, 0.1, 0.2] {
            let ee = embed(&rho, &atoms(eps), &SolveOptions::default()).unwrap();
            let b = bracket(&e0, &ee, &rho);
            // exact continuum value ε²(1 - ε/3); ε² up to the boundary
            // saturation layers
            let exact = eps * eps * (1.0 - eps / 3.0);
            assert!(
                (b - exact).abs() <= 0.02 * exact,
                "eps {eps}: bracket {b} vs {exact}"
            );
        }
        // identical measures: zero
        assert!(bracket(&e0, &e0, &rho).abs() < 1e-12);
    }

    #[test]
    fn primal_dual_lp_comparison() {
        // ||φ¹-φ⁰||_{L^p(ρ)} ≤ ||ψ¹-ψ⁰||_{L^p(μ⁰+μ¹)} for p in {1,2,4}
        let rho = unit_square_density(128);
        let pts = vec![[0.2, 0.3], [0.7, 0.6], [0.4, 0.9], [0.8, 0.1]];
        let mu0 = DiscreteMeasure::new(pts.clone(), vec![0.3, 0.3, 0.2, 0.2], 2).unwrap();
        let mu1 = DiscreteMeasure::new(pts.clone(), vec![0.1, 0.4, 0.25, 0.25], 2).unwrap();
        let e0 = embed(&rho, &mu0, &SolveOptions::default()).unwrap();
        let e1 = embed(&rho, &mu1, &SolveOptions::default()).unwrap();
        let phi_diff: Vec<f64> = e1
            .transport
            .brenier_values
            .iter()
            .zip(&e0.transport.brenier_values)
            .map(|(a, b)| a - b)
            .collect();
        let dd = dual_difference(&e0, &e1, &rho);
        for p in [1.0, 2.0, 4.0] {
            let lhs = lp_norm_grid(&phi_diff, &rho, p);
            let rhs = ksum(
                dd.values
                    .iter()
                    .zip(&dd.masses)
                    .map(|(v, m)| m * v.abs().powf(p)),
            )
            .powf(1.0 / p);
            assert!(lhs <= rhs + 1e-3, "p={p}: {lhs} vs {rhs}");
        }
        // variance chain
        let var_phi = variance_grid(&phi_diff, &rho);
        let var_psi = variance(&dd.values, &dd.masses);
        assert!(var_phi <= var_psi + 1e-3);
    }

    #[test]
    fn dual_values_match_stored_on_own_support() {
        let rho = unit_square_density(128);
        let pts = vec![[0.25, 0.25], [0.75, 0.75], [0.2, 0.8]];
        let mu = DiscreteMeasure::new(pts.clone(), vec![0.4, 0.35, 0.25], 2).unwrap();
        let e = embed(&rho, &mu, &SolveOptions::default()).unwrap();
        let vals = e.transport.potential.conjugate_at(&rho, &pts);
        for (stored, conj) in e.transport.potential.values().iter().zip(&vals) {
            // all cells nonempty at the optimum, so Fenchel equality holds
            assert!((stored - conj).abs() < 1e-9, "{stored} vs {conj}");
        }
        // the bracket built from dot-products on the identical support
        let mut direct = 0.0;
        for j in 0..pts.len() {
            direct += (e.transport.potential.values()[j] - e.transport.potential.values()[j])
                * (mu.weights()[j] - mu.weights()[j]);
        }
        assert_eq!(direct, 0.0);
        let _ = dot([0.0, 0.0], [0.0, 0.0]);
    }
}
