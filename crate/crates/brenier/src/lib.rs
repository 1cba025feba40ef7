//! Numerical optimal transport from a fixed source density to arbitrary
//! target measures, with an emphasis on *quantitative stability*.
//!
//! The crate computes Brenier maps, Brenier potentials and dual potentials
//! for semi-discrete transport problems, implements the linearized optimal
//! transport embedding `μ ↦ T_μ`, and ships a battery of named checks that
//! verify stability inequalities (strong convexity of the Kantorovich
//! functional, primal–dual potential comparisons, Hölder exponents for the
//! map `μ ↦ T_μ`, Gagliardo–Nirenberg type bounds for differences of convex
//! functions, Crofton estimators, erosion/dilation volume bounds) on
//! desk-scale instances.
//!
//! Module layout:
//!
//! | module | contents |
//! |--------|----------|
//! | [`geometry`] | compact convex domains in d ∈ {1,2}: erosion, dilation, radii, radial function |
//! | [`measures`] | grid densities, discrete measures, moments, divergences, exact small-scale Wasserstein |
//! | [`convexfun`] | Legendre–Fenchel conjugation, Moreau–Yosida envelopes, Hölder moduli |
//! | [`otsolve`] | the semi-discrete solver (damped L-BFGS on the concave dual) and the exact 1D solver |
//! | [`lot`] | the embedding `μ ↦ T_μ` and the scalar functionals of the stability estimates |
//! | [`crofton`] | random line ensembles, Crofton estimators, line restrictions, GN checks |
//! | [`verify`] | one named check per inequality, emitting [`verify::CheckReport`]s |

pub mod convexfun;
pub mod crofton;
pub mod geometry;
pub mod lot;
pub mod measures;
pub mod num;
pub mod otsolve;
pub mod verify;

pub use geometry::ConvexDomain;
pub use measures::{DiscreteMeasure, GridDensity};
pub use otsolve::{DualPotential, TransportResult};
pub use verify::CheckReport;
