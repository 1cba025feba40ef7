//! Convex-function machinery: max-of-affine potentials with exact
//! Legendre–Fenchel conjugation on polytope domains, piecewise-linear 1D
//! functions, Moreau–Yosida envelopes, empirical Hölder moduli, and the
//! erosion radius that turns a Hölder bound into a Lipschitz bound.

use crate::geometry::ConvexDomain;
use crate::num::{add, cross, dot, norm, scale, sub, Point};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConvexError {
    #[error("function is not convex (second difference {0} below tolerance)")]
    NotConvex(f64),
    #[error("Hölder exponent must lie in (0, 1), got {0}")]
    AlphaOutOfRange(f64),
}

/// `φ(x) = max_j ⟨x, y_j⟩ - ψ_j` on a convex evaluation domain. This is the
/// shape of every semi-discrete Brenier potential: slopes are the target
/// support points, offsets the dual values.
#[derive(Debug, Clone)]
pub struct MaxAffinePotential {
    slopes: Vec<Point>,
    offsets: Vec<f64>,
    domain: ConvexDomain,
}

impl MaxAffinePotential {
    pub fn new(slopes: Vec<Point>, offsets: Vec<f64>, domain: ConvexDomain) -> Self {
        assert!(!slopes.is_empty(), "need at least one affine piece");
        assert_eq!(slopes.len(), offsets.len());
        Self {
            slopes,
            offsets,
            domain,
        }
    }

    pub fn slopes(&self) -> &[Point] {
        &self.slopes
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn domain(&self) -> &ConvexDomain {
        &self.domain
    }

    pub fn eval(&self, x: Point) -> f64 {
        let mut best = f64::NEG_INFINITY;
        for (y, c) in self.slopes.iter().zip(&self.offsets) {
            best = best.max(dot(x, *y) - c);
        }
        best
    }

    /// Index attaining the max at `x`; ties resolved by lowest index.
    pub fn argmax(&self, x: Point) -> usize {
        let mut best = f64::NEG_INFINITY;
        let mut arg = 0;
        for (j, (y, c)) in self.slopes.iter().zip(&self.offsets).enumerate() {
            let v = dot(x, *y) - c;
            if v > best {
                best = v;
                arg = j;
            }
        }
        arg
    }

    /// Candidate points where piecewise-affine extrema over the domain can
    /// occur: domain vertices, crossings of piece bisectors with domain
    /// edges, and triple-piece meeting points inside the domain.
    fn candidates(&self) -> Vec<Point> {
        let m = self.slopes.len();
        let verts = self.domain.vertex_points();
        let mut out = verts.clone();
        if self.domain.dim() == 1 {
            let (lo, hi) = self.domain.bounding_box();
            for i in 0..m {
                for j in (i + 1)..m {
                    let ds = self.slopes[i][0] - self.slopes[j][0];
                    if ds.abs() < 1e-15 {
                        continue;
                    }
                    let x = (self.offsets[i] - self.offsets[j]) / ds;
                    if x >= lo[0] && x <= hi[0] {
                        out.push([x, 0.0]);
                    }
                }
            }
            return out;
        }
        // bisector of pieces (i, j): ⟨x, y_i - y_j⟩ = ψ_i - ψ_j
        let bisector = |i: usize, j: usize| -> (Point, f64) {
            (
                sub(self.slopes[i], self.slopes[j]),
                self.offsets[i] - self.offsets[j],
            )
        };
        let nv = verts.len();
        for i in 0..m {
            for j in (i + 1)..m {
                let (n1, c1) = bisector(i, j);
                if norm(n1) < 1e-14 {
                    continue;
                }
                // against every domain edge
                for e in 0..nv {
                    let a = verts[e];
                    let b = verts[(e + 1) % nv];
                    let da = dot(a, n1) - c1;
                    let db = dot(b, n1) - c1;
                    if (da > 0.0 && db < 0.0) || (da < 0.0 && db > 0.0) {
                        let t = da / (da - db);
                        out.push(add(a, scale(sub(b, a), t)));
                    }
                }
                // against every other bisector
                for k in (j + 1)..m {
                    let (n2, c2) = bisector(i, k);
                    let det = cross(n1, n2);
                    if det.abs() < 1e-13 * (norm(n1) * norm(n2)).max(1e-300) {
                        continue;
                    }
                    let x = [
                        (c1 * n2[1] - c2 * n1[1]) / det,
                        (n1[0] * c2 - n2[0] * c1) / det,
                    ];
                    if self.domain.contains(x) {
                        out.push(x);
                    }
                }
            }
        }
        out
    }

    /// Exact conjugate `ψ(y) = max_{x ∈ X} ⟨x, y⟩ - φ(x)` evaluated at the
    /// query points: the max of a piecewise-affine function over a polytope
    /// is attained at a vertex of the induced subdivision, so enumerating
    /// those vertices once gives exact values everywhere.
    pub fn conjugate_at(&self, queries: &[Point]) -> Vec<f64> {
        let pieces = self.conjugate_pieces();
        queries
            .iter()
            .map(|&y| {
                pieces
                    .iter()
                    .map(|&(x, fx)| dot(x, y) - fx)
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect()
    }

    /// Candidate (point, value) pairs defining the conjugate as a
    /// max-affine function of `y`.
    pub fn conjugate_pieces(&self) -> Vec<(Point, f64)> {
        self.candidates()
            .into_iter()
            .filter(|&x| self.domain.contains(x))
            .map(|x| (x, self.eval(x)))
            .collect()
    }

    /// Exact extrema `(min, max)` of the potential over the domain. The max
    /// of a convex function sits at a domain vertex; the min at a vertex of
    /// the affine subdivision.
    pub fn extrema_on_domain(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for x in self.candidates() {
            if !self.domain.contains(x) {
                continue;
            }
            let v = self.eval(x);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }
}

/// Piecewise-linear function of one variable on strictly increasing
/// breakpoints.
#[derive(Debug, Clone)]
pub struct SampledFunction1D {
    xs: Vec<f64>,
    values: Vec<f64>,
}

impl SampledFunction1D {
    pub fn new(xs: Vec<f64>, values: Vec<f64>) -> Self {
        assert!(xs.len() >= 2, "need at least two breakpoints");
        assert_eq!(xs.len(), values.len());
        assert!(
            xs.windows(2).all(|w| w[0] < w[1]),
            "breakpoints must be strictly increasing"
        );
        assert!(values.iter().all(|v| v.is_finite()));
        Self { xs, values }
    }

    pub fn from_fn(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> Self {
        let xs: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
        let values = xs.iter().map(|&x| f(x)).collect();
        Self::new(xs, values)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn lo(&self) -> f64 {
        self.xs[0]
    }

    pub fn hi(&self) -> f64 {
        *self.xs.last().unwrap()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let x = x.clamp(self.lo(), self.hi());
        let k = match self.xs.binary_search_by(|p| p.total_cmp(&x)) {
            Ok(i) => i.max(1),
            Err(i) => i.clamp(1, self.xs.len() - 1),
        };
        let (x0, x1) = (self.xs[k - 1], self.xs[k]);
        let (v0, v1) = (self.values[k - 1], self.values[k]);
        v0 + (v1 - v0) * (x - x0) / (x1 - x0)
    }

    /// Per-segment slopes.
    pub fn slopes(&self) -> Vec<f64> {
        self.xs
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, v)| (v[1] - v[0]) / (x[1] - x[0]))
            .collect()
    }

    pub fn max_abs_slope(&self) -> f64 {
        self.slopes().iter().fold(0.0f64, |m, s| m.max(s.abs()))
    }

    /// Largest violation of slope monotonicity (0 for convex functions).
    pub fn convexity_defect(&self) -> f64 {
        let s = self.slopes();
        s.windows(2)
            .map(|w| (w[0] - w[1]).max(0.0))
            .fold(0.0, f64::max)
    }

    pub fn is_convex(&self, tol: f64) -> bool {
        self.convexity_defect() <= tol
    }

    /// Exact `∫ (f - g)²` over the common interval (piecewise quadratic
    /// integrand on merged breakpoints).
    pub fn l2_sq_diff(&self, other: &Self) -> f64 {
        let lo = self.lo().max(other.lo());
        let hi = self.hi().min(other.hi());
        let mut knots: Vec<f64> = self
            .xs
            .iter()
            .chain(other.xs.iter())
            .copied()
            .filter(|&x| x >= lo && x <= hi)
            .collect();
        knots.push(lo);
        knots.push(hi);
        knots.sort_by(f64::total_cmp);
        knots.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        let mut acc = 0.0;
        for w in knots.windows(2) {
            let (x0, x1) = (w[0], w[1]);
            if x1 <= x0 {
                continue;
            }
            let d0 = self.eval(x0) - other.eval(x0);
            let d1 = self.eval(x1) - other.eval(x1);
            acc += (x1 - x0) * (d0 * d0 + d0 * d1 + d1 * d1) / 3.0;
        }
        acc
    }

    /// Exact `∫ (f' - g')²` (piecewise-constant derivatives on merged
    /// breakpoints).
    pub fn l2_sq_diff_derivative(&self, other: &Self) -> f64 {
        let lo = self.lo().max(other.lo());
        let hi = self.hi().min(other.hi());
        let mut knots: Vec<f64> = self
            .xs
            .iter()
            .chain(other.xs.iter())
            .copied()
            .filter(|&x| x >= lo && x <= hi)
            .collect();
        knots.push(lo);
        knots.push(hi);
        knots.sort_by(f64::total_cmp);
        knots.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        let mut acc = 0.0;
        for w in knots.windows(2) {
            let (x0, x1) = (w[0], w[1]);
            if x1 <= x0 {
                continue;
            }
            let mid = 0.5 * (x0 + x1);
            let ds = self.slope_at(mid) - other.slope_at(mid);
            acc += ds * ds * (x1 - x0);
        }
        acc
    }

    fn slope_at(&self, x: f64) -> f64 {
        let k = match self.xs.binary_search_by(|p| p.total_cmp(&x)) {
            Ok(i) => i.max(1),
            Err(i) => i.clamp(1, self.xs.len() - 1),
        };
        (self.values[k] - self.values[k - 1]) / (self.xs[k] - self.xs[k - 1])
    }
}

const CONVEXITY_TOL: f64 = 1e-10;

/// Moreau–Yosida envelope of a convex piecewise-linear function, with
/// exact pointwise evaluation through the proximal map.
#[derive(Debug, Clone)]
pub struct MoreauEnvelope {
    f: SampledFunction1D,
    lambda: f64,
}

/// `f_λ(x) = min_u f(u) + ||u - x||²/(2λ)` for convex piecewise-linear `f`
/// (extended by +∞ outside its breakpoint range).
pub fn moreau_yosida(f: &SampledFunction1D, lambda: f64) -> Result<MoreauEnvelope, ConvexError> {
    assert!(lambda > 0.0, "Moreau parameter must be positive");
    let defect = f.convexity_defect();
    if defect > CONVEXITY_TOL {
        return Err(ConvexError::NotConvex(-defect));
    }
    Ok(MoreauEnvelope {
        f: f.clone(),
        lambda,
    })
}

impl MoreauEnvelope {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Proximal point `argmin_u f(u) + (u-x)²/(2λ)`.
    pub fn prox(&self, x: f64) -> f64 {
        let xs = self.f.breakpoints();
        let slopes = self.f.slopes();
        let n = xs.len();
        // left boundary: optimal iff (x - u0)/λ ≤ s_0
        if (x - xs[0]) / self.lambda <= slopes[0] {
            return xs[0];
        }
        // right boundary
        if (x - xs[n - 1]) / self.lambda >= slopes[n - 2] {
            return xs[n - 1];
        }
        for k in 0..n - 1 {
            // interior of segment k: u* = x - λ s_k
            let u = x - self.lambda * slopes[k];
            if u >= xs[k] && u <= xs[k + 1] {
                return u;
            }
            // breakpoint k+1 with subdifferential [s_k, s_{k+1}]
            if k + 2 < n {
                let g = (x - xs[k + 1]) / self.lambda;
                if g >= slopes[k] && g <= slopes[k + 1] {
                    return xs[k + 1];
                }
            }
        }
        // numerically between cases: nearest breakpoint
        xs[n - 1]
    }

    pub fn eval(&self, x: f64) -> f64 {
        let u = self.prox(x);
        self.f.eval(u) + (u - x) * (u - x) / (2.0 * self.lambda)
    }

    /// `∇f_λ(x) = (x - prox(x))/λ`.
    pub fn grad(&self, x: f64) -> f64 {
        (x - self.prox(x)) / self.lambda
    }

    pub fn to_sampled(&self, xs: &[f64]) -> SampledFunction1D {
        SampledFunction1D::new(xs.to_vec(), xs.iter().map(|&x| self.eval(x)).collect())
    }
}

/// Measured Lipschitz constant of the envelope gradient over a sample;
/// always ≤ 1/λ up to rounding.
pub fn gradient_lipschitz_bound(env: &MoreauEnvelope, xs: &[f64]) -> f64 {
    let mut m = 0.0f64;
    for w in xs.windows(2) {
        if w[1] > w[0] {
            m = m.max((env.grad(w[1]) - env.grad(w[0])).abs() / (w[1] - w[0]));
        }
    }
    m
}

/// `η_R = (M_α / R)^{1/(1-α)}`: erode by this radius and an α-Hölder convex
/// potential with constant `M_α` becomes R-Lipschitz.
pub fn erosion_lipschitz_radius(m_alpha: f64, alpha: f64, r: f64) -> Result<f64, ConvexError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(ConvexError::AlphaOutOfRange(alpha));
    }
    assert!(m_alpha > 0.0 && r > 0.0);
    Ok((m_alpha / r).powf(1.0 / (1.0 - alpha)))
}

/// Empirical α-Hölder modulus of a 1D piecewise-linear function over all
/// breakpoint pairs (a lower bound on the true modulus).
pub fn holder_modulus_1d(f: &SampledFunction1D, alpha: f64) -> f64 {
    assert!(alpha > 0.0 && alpha <= 1.0);
    let xs = f.breakpoints();
    let vs = f.values();
    let mut m = 0.0f64;
    for i in 0..xs.len() {
        for j in (i + 1)..xs.len() {
            let d = (xs[j] - xs[i]).abs();
            if d > 0.0 {
                m = m.max((vs[j] - vs[i]).abs() / d.powf(alpha));
            }
        }
    }
    m
}

/// Empirical α-Hölder modulus of a function on a 2D domain over `pairs`
/// seeded random point pairs.
pub fn holder_modulus_2d(
    f: impl Fn(Point) -> f64,
    domain: &ConvexDomain,
    alpha: f64,
    pairs: usize,
    seed: u64,
) -> f64 {
    assert!(alpha > 0.0 && alpha <= 1.0);
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = domain.bounding_box();
    let sample = |rng: &mut ChaCha8Rng| -> Point {
        loop {
            let p = [
                rng.gen_range(lo[0]..hi[0]),
                rng.gen_range(lo[1]..hi[1]),
            ];
            if domain.contains(p) {
                return p;
            }
        }
    };
    let mut m = 0.0f64;
    for _ in 0..pairs {
        let p = sample(&mut rng);
        let q = sample(&mut rng);
        let d = norm(sub(p, q));
        if d > 1e-12 {
            m = m.max((f(p) - f(q)).abs() / d.powf(alpha));
        }
    }
    m
}

/// Brute-force conjugate of grid-sampled values: `ψ(y_k) = max_i x_i·y_k -
/// f_i`, with the monotone-argmax sweep when both grids are sorted.
pub fn conjugate_samples_1d(xs: &[f64], fs: &[f64], ys: &[f64]) -> Vec<f64> {
    assert_eq!(xs.len(), fs.len());
    let sorted = xs.windows(2).all(|w| w[0] <= w[1]) && ys.windows(2).all(|w| w[0] <= w[1]);
    if sorted {
        // argmax_i (x_i y - f_i) is nondecreasing in y
        let mut out = Vec::with_capacity(ys.len());
        let mut i0 = 0usize;
        for &y in ys {
            let mut best = xs[i0] * y - fs[i0];
            let mut arg = i0;
            for (i, (&x, &f)) in xs.iter().zip(fs).enumerate().skip(i0 + 1) {
                let v = x * y - f;
                if v > best {
                    best = v;
                    arg = i;
                }
            }
            i0 = arg;
            out.push(best);
        }
        out
    } else {
        ys.iter()
            .map(|&y| {
                xs.iter()
                    .zip(fs)
                    .map(|(&x, &f)| x * y - f)
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ConvexDomain;

    #[test]
    fn conjugate_of_abs_on_interval() {
        // φ(x) = |x| on [-1, 1] as a 2-piece max-affine
        let dom = ConvexDomain::interval(-1.0, 1.0).unwrap();
        let phi = MaxAffinePotential::new(vec![[1.0, 0.0], [-1.0, 0.0]], vec![0.0, 0.0], dom);
        let ys: Vec<Point> = [-3.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0]
            .iter()
            .map(|&y| [y, 0.0])
            .collect();
        let psi = phi.conjugate_at(&ys);
        for (&[y, _], &v) in ys.iter().zip(&psi) {
            let expected = if y.abs() <= 1.0 { 0.0 } else { y.abs() - 1.0 };
            assert!((v - expected).abs() < 1e-12, "y={y}: {v} vs {expected}");
        }
    }

    #[test]
    fn conjugate_single_affine_piece() {
        let dom = ConvexDomain::box2([0.0, 0.0], [1.0, 1.0]).unwrap();
        let y0 = [0.4, -0.3];
        let c = 0.7;
        let phi = MaxAffinePotential::new(vec![y0], vec![c], dom);
        let psi = phi.conjugate_at(&[y0]);
        // Fenchel equality at the slope
        assert!((psi[0] - c).abs() < 1e-12);
    }

    #[test]
    fn conjugate_of_quadratic_tangents_is_quadratic() {
        // ½x² approximated by tangents at grid slopes: conjugate ≈ ½y²
        let dom = ConvexDomain::interval(-2.0, 2.0).unwrap();
        let n = 81;
        let slopes: Vec<Point> = (0..n)
            .map(|i| [-2.0 + 4.0 * i as f64 / (n - 1) as f64, 0.0])
            .collect();
        // tangent at a: x·a - a²/2
        let offsets: Vec<f64> = slopes.iter().map(|s| 0.5 * s[0] * s[0]).collect();
        let phi = MaxAffinePotential::new(slopes, offsets, dom);
        let ys: Vec<Point> = (-10..=10).map(|k| [k as f64 / 10.0, 0.0]).collect();
        let psi = phi.conjugate_at(&ys);
        for (&[y, _], &v) in ys.iter().zip(&psi) {
            assert!((v - 0.5 * y * y).abs() < 4.0 * (4.0 / (n - 1) as f64).powi(2));
        }
    }

    #[test]
    fn biconjugation_reproduces_max_affine() {
        let dom = ConvexDomain::box2([0.0, 0.0], [1.0, 1.0]).unwrap();
        let slopes = vec![[0.2, 0.8], [0.9, 0.1], [0.5, 0.4]];
        let offsets = vec![0.1, 0.3, 0.15];
        let phi = MaxAffinePotential::new(slopes.clone(), offsets.clone(), dom.clone());
        let psi = phi.conjugate_at(&slopes);
        // φ**(x) = max_j ⟨x,y_j⟩ - ψ(y_j) equals φ(x) wherever piece j is active
        for i in 0..24 {
            for j in 0..24 {
                let x = [i as f64 / 23.0, j as f64 / 23.0];
                let biconj = slopes
                    .iter()
                    .zip(&psi)
                    .map(|(&y, &p)| dot(x, y) - p)
                    .fold(f64::NEG_INFINITY, f64::max);
                let direct = phi.eval(x);
                assert!(biconj <= direct + 1e-9);
                assert!((biconj - direct).abs() < 1e-9, "at {x:?}");
            }
        }
    }

    #[test]
    fn conjugation_reverses_order() {
        let dom = ConvexDomain::interval(-1.0, 1.0).unwrap();
        // f ≤ g pointwise (offset dominance)
        let f = MaxAffinePotential::new(vec![[1.0, 0.0], [-0.5, 0.0]], vec![0.5, 0.3], dom.clone());
        let g = MaxAffinePotential::new(vec![[1.0, 0.0], [-0.5, 0.0]], vec![0.0, 0.0], dom);
        let ys: Vec<Point> = (-20..=20).map(|k| [k as f64 / 10.0, 0.0]).collect();
        let fs = f.conjugate_at(&ys);
        let gs = g.conjugate_at(&ys);
        for (a, b) in fs.iter().zip(&gs) {
            assert!(a >= &(b - 1e-12));
        }
    }

    #[test]
    fn extrema_on_square() {
        let dom = ConvexDomain::box2([0.0, 0.0], [1.0, 1.0]).unwrap();
        let phi = MaxAffinePotential::new(
            vec![[1.0, 0.0], [-1.0, 0.0]],
            vec![0.5, -0.5],
            dom,
        );
        // φ(x) = max(x₁ - ½, ½ - x₁): min ½·...  at x₁ = ½ → 0, max at x₁∈{0,1} → ½
        let (lo, hi) = phi.extrema_on_domain();
        assert!((lo - 0.0).abs() < 1e-12);
        assert!((hi - 0.5).abs() < 1e-12);
    }

    #[test]
    fn huber_envelope() {
        let f = SampledFunction1D::new(vec![-2.0, 0.0, 2.0], vec![2.0, 0.0, 2.0]); // |x|
        let env = moreau_yosida(&f, 0.5).unwrap();
        for &x in &[-1.7f64, -0.5, -0.3, 0.0, 0.2, 0.5, 1.3] {
            let expected = if x.abs() <= 0.5 { x * x } else { x.abs() - 0.25 };
            assert!((env.eval(x) - expected).abs() < 1e-12, "x={x}");
        }
        // measured gradient Lipschitz constant equals 1/λ = 2 on the
        // quadratic region
        let xs: Vec<f64> = (0..400).map(|i| -1.9 + 3.8 * i as f64 / 399.0).collect();
        let l = gradient_lipschitz_bound(&env, &xs);
        assert!(l <= 2.0 + 1e-8);
        assert!(l > 2.0 - 1e-6);
    }

    #[test]
    fn envelope_at_minimizer_and_affine() {
        let f = SampledFunction1D::new(vec![-1.0, 0.0, 1.0], vec![1.0, 0.0, 1.0]);
        let env = moreau_yosida(&f, 0.3).unwrap();
        assert!((env.eval(0.0) - 0.0).abs() < 1e-15);

        // affine f: envelope is f - λ·slope²/2
        let a = 1.7;
        let aff = SampledFunction1D::new(vec![-1.0, 1.0], vec![-a, a]);
        let env = moreau_yosida(&aff, 0.25).unwrap();
        for &x in &[-0.4, 0.0, 0.3] {
            assert!((env.eval(x) - (a * x - 0.25 * a * a / 2.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn relu_envelope_gradient_bounded() {
        let f = SampledFunction1D::new(vec![-2.0, 0.0, 2.0], vec![0.0, 0.0, 2.0]); // max(0, x)
        let env = moreau_yosida(&f, 1.0).unwrap();
        let xs: Vec<f64> = (0..200).map(|i| -1.9 + 3.8 * i as f64 / 199.0).collect();
        let l = gradient_lipschitz_bound(&env, &xs);
        assert!(l <= 1.0 + 1e-8, "measured {l}");
        for &x in &xs {
            let g = env.grad(x);
            assert!((0.0..=1.0 + 1e-12).contains(&g));
        }
    }

    #[test]
    fn envelope_rejects_nonconvex() {
        let f = SampledFunction1D::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 0.0]);
        assert!(matches!(
            moreau_yosida(&f, 0.5),
            Err(ConvexError::NotConvex(_))
        ));
    }

    #[test]
    fn envelope_properties_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..25 {
            // random convex PL: increasing slopes over random breakpoints
            let k = rng.gen_range(3..10);
            let mut xs: Vec<f64> = (0..k).map(|_| rng.gen_range(-2.0..2.0)).collect();
            xs.sort_by(f64::total_cmp);
            xs.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
            if xs.len() < 3 {
                continue;
            }
            let mut slopes: Vec<f64> = (0..xs.len() - 1)
                .map(|_| rng.gen_range(-5.0..5.0))
                .collect();
            slopes.sort_by(f64::total_cmp);
            let mut vals = vec![rng.gen_range(-1.0..1.0)];
            for (i, s) in slopes.iter().enumerate() {
                let v = vals[i] + s * (xs[i + 1] - xs[i]);
                vals.push(v);
            }
            let f = SampledFunction1D::new(xs.clone(), vals);
            let lam_big = moreau_yosida(&f, 0.5).unwrap();
            let lam_small = moreau_yosida(&f, 0.05).unwrap();
            for i in 0..40 {
                let x = f.lo() + (f.hi() - f.lo()) * i as f64 / 39.0;
                // f_λ ≤ f and monotone in λ
                assert!(lam_big.eval(x) <= f.eval(x) + 1e-12);
                assert!(lam_big.eval(x) <= lam_small.eval(x) + 1e-12);
                assert!(lam_small.eval(x) <= f.eval(x) + 1e-12);
            }
            // at segment midpoints (differentiability): |∇f_λ| ≤ |f'| and
            // ∇f_λ = f' once λ is small enough for a PL function
            for k in 0..xs.len() - 1 {
                let x = 0.5 * (xs[k] + xs[k + 1]);
                let s = (f.eval(xs[k + 1]) - f.eval(xs[k])) / (xs[k + 1] - xs[k]);
                assert!(lam_big.grad(x).abs() <= s.abs() + 1e-10);
                let tiny = moreau_yosida(&f, 1e-7).unwrap();
                assert!((tiny.grad(x) - s).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn erosion_radius_makes_sqrt_lipschitz() {
        // f(x) = √x on [0,1] is ½-Hölder with constant 1; eroding by
        // η_R = (1/R)² caps the slope at f'(η) = 1/(2√η) = R/2 ≤ R
        let f = SampledFunction1D::from_fn(0.0, 1.0, 4000, |x| x.sqrt());
        let m_alpha = holder_modulus_1d(&f, 0.5);
        let r_target = 4.0;
        let eta = erosion_lipschitz_radius(m_alpha, 0.5, r_target).unwrap();
        assert!((eta - 1.0 / 16.0).abs() < 1e-2, "eta {eta}");
        let mut max_slope = 0.0f64;
        for (xs, s) in f.breakpoints().windows(2).zip(f.slopes()) {
            if xs[0] >= eta && xs[1] <= 1.0 - 1e-12 {
                max_slope = max_slope.max(s.abs());
            }
        }
        assert!(
            max_slope <= r_target * (1.0 + 1e-6),
            "slope {max_slope} exceeds {r_target}"
        );
        // and the cap genuinely binds: the slope approaches R/2
        assert!(max_slope > 0.45 * r_target);
    }

    #[test]
    fn erosion_radius_formula() {
        assert!((erosion_lipschitz_radius(1.0, 0.5, 4.0).unwrap() - 1.0 / 16.0).abs() < 1e-15);
        assert!((erosion_lipschitz_radius(1.0, 0.5, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((erosion_lipschitz_radius(2.0, 0.5, 8.0).unwrap() - 1.0 / 16.0).abs() < 1e-15);
        assert!(matches!(
            erosion_lipschitz_radius(1.0, 1.0, 2.0),
            Err(ConvexError::AlphaOutOfRange(_))
        ));
        assert!(erosion_lipschitz_radius(1.0, 0.0, 2.0).is_err());
    }

    #[test]
    fn holder_moduli() {
        let flat = SampledFunction1D::new(vec![0.0, 1.0], vec![3.0, 3.0]);
        assert_eq!(holder_modulus_1d(&flat, 0.5), 0.0);

        // √x on [0,1]: the ½-modulus is attained against x' = 0
        let sq = SampledFunction1D::from_fn(0.0, 1.0, 4000, |x| x.sqrt());
        let m = holder_modulus_1d(&sq, 0.5);
        assert!((m - 1.0).abs() < 1e-3, "modulus {m}");

        let lin = SampledFunction1D::new(vec![0.0, 1.0], vec![0.0, 2.5]);
        assert!((holder_modulus_1d(&lin, 1.0) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn holder_modulus_2d_linear() {
        let dom = ConvexDomain::box2([0.0, 0.0], [1.0, 1.0]).unwrap();
        let m = holder_modulus_2d(|p| 2.0 * p[0], &dom, 1.0, 20_000, 3);
        assert!(m <= 2.0 + 1e-12);
        assert!(m > 1.9, "modulus {m}");
    }

    #[test]
    fn sampled_conjugate_monotone_path() {
        let xs: Vec<f64> = (0..200).map(|i| -1.0 + 2.0 * i as f64 / 199.0).collect();
        let fs: Vec<f64> = xs.iter().map(|&x| 0.5 * x * x).collect();
        let ys: Vec<f64> = (0..50).map(|i| -0.9 + 1.8 * i as f64 / 49.0).collect();
        let out = conjugate_samples_1d(&xs, &fs, &ys);
        for (&y, &v) in ys.iter().zip(&out) {
            assert!((v - 0.5 * y * y).abs() < 1e-3);
        }
    }
}
