//! Source densities discretized on grids, finitely supported target
//! measures, moments, divergences, and exact small-scale Wasserstein
//! distances (quantile coupling in 1D, successive-shortest-path
//! transportation LP for discrete pairs).

use crate::geometry::{ConvexDomain, Shape};
use crate::num::{dist, ksum, norm, Kahan, Point};
use std::collections::BinaryHeap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("target measure puts mass outside the reference support")]
    NotAbsolutelyContinuous,
    #[error("combined support size {size} exceeds limit {limit}")]
    SizeLimit { size: usize, limit: usize },
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("dimension mismatch between measures")]
    DimensionMismatch,
}

/// One grid cell of a discretized source density.
#[derive(Debug, Clone, Copy)]
pub struct GridCell {
    pub center: Point,
    pub volume: f64,
    pub density: f64,
}

impl GridCell {
    /// ρ-mass carried by the cell.
    pub fn mass(&self) -> f64 {
        self.density * self.volume
    }
}

/// A probability density on a compact convex domain, discretized on a
/// regular grid (cells clipped to the domain for polygonal domains).
#[derive(Debug, Clone)]
pub struct GridDensity {
    domain: ConvexDomain,
    resolution: usize,
    spacing: f64,
    cells: Vec<GridCell>,
    min_density: f64,
    max_density: f64,
}

impl GridDensity {
    /// Uniform density on the domain.
    pub fn uniform(domain: ConvexDomain, resolution: usize) -> Result<Self, MeasureError> {
        Self::with_density(domain, resolution, |_| 1.0)
    }

    /// Discretizes `density` (any positive function, up to normalization)
    /// by evaluating it at cell centers and renormalizing so the total
    /// mass is exactly 1.
    pub fn with_density(
        domain: ConvexDomain,
        resolution: usize,
        density: impl Fn(Point) -> f64,
    ) -> Result<Self, MeasureError> {
        if resolution < 2 {
            return Err(MeasureError::InvalidMeasure(
                "grid resolution must be at least 2 per axis".into(),
            ));
        }
        let n = resolution;
        let (lo, hi) = domain.bounding_box();
        let mut cells = Vec::new();
        let spacing;
        match domain.shape() {
            Shape::Interval { a, b } => {
                let h = (b - a) / n as f64;
                spacing = h;
                for i in 0..n {
                    let c = a + (i as f64 + 0.5) * h;
                    cells.push(GridCell {
                        center: [c, 0.0],
                        volume: h,
                        density: 0.0,
                    });
                }
            }
            Shape::Box2 { min, max } => {
                let hx = (max[0] - min[0]) / n as f64;
                let hy = (max[1] - min[1]) / n as f64;
                spacing = hx.max(hy);
                for j in 0..n {
                    for i in 0..n {
                        cells.push(GridCell {
                            center: [
                                min[0] + (i as f64 + 0.5) * hx,
                                min[1] + (j as f64 + 0.5) * hy,
                            ],
                            volume: hx * hy,
                            density: 0.0,
                        });
                    }
                }
            }
            Shape::Polygon { vertices } => {
                let hx = (hi[0] - lo[0]) / n as f64;
                let hy = (hi[1] - lo[1]) / n as f64;
                spacing = hx.max(hy);
                let full = hx * hy;
                for j in 0..n {
                    for i in 0..n {
                        let x0 = lo[0] + i as f64 * hx;
                        let y0 = lo[1] + j as f64 * hy;
                        let cell = vec![
                            [x0, y0],
                            [x0 + hx, y0],
                            [x0 + hx, y0 + hy],
                            [x0, y0 + hy],
                        ];
                        if let Some((area, centroid)) = clip_cell_to_polygon(&cell, vertices) {
                            // degenerate slivers are dropped and the mass renormalized
                            if area >= 1e-12 * full {
                                cells.push(GridCell {
                                    center: centroid,
                                    volume: area,
                                    density: 0.0,
                                });
                            }
                        }
                    }
                }
            }
            Shape::Ball { .. } | Shape::Rounded { .. } => {
                let hx = (hi[0] - lo[0]) / n as f64;
                let hy = (hi[1] - lo[1]) / n as f64;
                spacing = hx.max(hy);
                for j in 0..n {
                    for i in 0..n {
                        let c = [lo[0] + (i as f64 + 0.5) * hx, lo[1] + (j as f64 + 0.5) * hy];
                        if domain.contains(c) {
                            cells.push(GridCell {
                                center: c,
                                volume: hx * hy,
                                density: 0.0,
                            });
                        }
                    }
                }
            }
        }
        if cells.is_empty() {
            return Err(MeasureError::InvalidMeasure(
                "no grid cell intersects the domain".into(),
            ));
        }
        let mut total = Kahan::new();
        for c in cells.iter_mut() {
            let v = density(c.center);
            if v <= 0.0 || !v.is_finite() {
                return Err(MeasureError::InvalidMeasure(format!(
                    "density must be positive and finite, got {v} at {:?}",
                    c.center
                )));
            }
            c.density = v;
            total.add(v * c.volume);
        }
        let z = total.total();
        let mut min_density = f64::INFINITY;
        let mut max_density = 0.0f64;
        for c in cells.iter_mut() {
            c.density /= z;
            min_density = min_density.min(c.density);
            max_density = max_density.max(c.density);
        }
        Ok(Self {
            domain,
            resolution,
            spacing,
            cells,
            min_density,
            max_density,
        })
    }

    pub fn domain(&self) -> &ConvexDomain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Grid spacing (largest cell side).
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn cells(&self) -> &[GridCell] {
        &self.cells
    }

    /// Density bounds `(m_ρ, M_ρ)` over the grid.
    pub fn density_bounds(&self) -> (f64, f64) {
        (self.min_density, self.max_density)
    }

    pub fn total_mass(&self) -> f64 {
        ksum(self.cells.iter().map(|c| c.mass()))
    }

    /// Quadrature of `f` against the density.
    pub fn integrate(&self, f: impl Fn(Point) -> f64) -> f64 {
        ksum(self.cells.iter().map(|c| f(c.center) * c.mass()))
    }

    /// `∫ ||x||^p dρ`.
    pub fn moment(&self, p: f64) -> f64 {
        assert!(p > 0.0, "moment order must be positive");
        self.integrate(|x| norm(x).powf(p))
    }

    /// Exact quantile function of a 1D grid density (piecewise linear).
    pub fn quantile_fn(&self) -> QuantileFn {
        assert_eq!(self.dim(), 1, "quantile function requires a 1D density");
        let mut ts = Vec::with_capacity(self.cells.len() + 1);
        let mut xs = Vec::with_capacity(self.cells.len() + 1);
        let mut cum = Kahan::new();
        ts.push(0.0);
        xs.push(self.cells[0].center[0] - 0.5 * self.cells[0].volume);
        for c in &self.cells {
            cum.add(c.mass());
            ts.push(cum.total());
            xs.push(c.center[0] + 0.5 * c.volume);
        }
        let last = ts.len() - 1;
        ts[last] = 1.0; // absorb rounding in the final cumulative mass
        QuantileFn { ts, xs }
    }
}

/// Clips a convex cell polygon against a convex ccw polygon and returns
/// the clipped area and centroid. `None` when the intersection is empty.
fn clip_cell_to_polygon(cell: &[Point], poly: &[Point]) -> Option<(f64, Point)> {
    let mut cur: Vec<Point> = cell.to_vec();
    let n = poly.len();
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let e = [b[0] - a[0], b[1] - a[1]];
        let len = norm(e);
        let nrm = [-e[1] / len, e[0] / len];
        let c = a[0] * nrm[0] + a[1] * nrm[1];
        cur = clip_halfplane_pts(&cur, nrm, c);
        if cur.len() < 3 {
            return None;
        }
    }
    let mut area2 = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    let m = cur.len();
    for i in 0..m {
        let p = cur[i];
        let q = cur[(i + 1) % m];
        let w = p[0] * q[1] - q[0] * p[1];
        area2 += w;
        cx += (p[0] + q[0]) * w;
        cy += (p[1] + q[1]) * w;
    }
    if area2 <= 0.0 {
        return None;
    }
    Some((0.5 * area2, [cx / (3.0 * area2), cy / (3.0 * area2)]))
}

fn clip_halfplane_pts(vs: &[Point], n: Point, c: f64) -> Vec<Point> {
    let m = vs.len();
    let mut out = Vec::with_capacity(m + 1);
    for i in 0..m {
        let p = vs[i];
        let q = vs[(i + 1) % m];
        let dp = p[0] * n[0] + p[1] * n[1] - c;
        let dq = q[0] * n[0] + q[1] * n[1] - c;
        if dp >= 0.0 {
            out.push(p);
        }
        if (dp > 0.0 && dq < 0.0) || (dp < 0.0 && dq > 0.0) {
            let t = dp / (dp - dq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out
}

/// A finitely supported probability measure.
#[derive(Debug, Clone)]
pub struct DiscreteMeasure {
    points: Vec<Point>,
    weights: Vec<f64>,
    dim: usize,
}

impl DiscreteMeasure {
    pub fn new(points: Vec<Point>, weights: Vec<f64>, dim: usize) -> Result<Self, MeasureError> {
        if points.len() != weights.len() || points.is_empty() {
            return Err(MeasureError::InvalidMeasure(
                "points and weights must be nonempty and of equal length".into(),
            ));
        }
        if !(dim == 1 || dim == 2) {
            return Err(MeasureError::InvalidMeasure("dimension must be 1 or 2".into()));
        }
        if weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
            return Err(MeasureError::InvalidMeasure(
                "weights must be nonnegative and finite".into(),
            ));
        }
        let total = ksum(weights.iter().copied());
        if (total - 1.0).abs() > 1e-12 {
            return Err(MeasureError::InvalidMeasure(format!(
                "weights must sum to 1 (got {total})"
            )));
        }
        for (i, &p) in points.iter().enumerate() {
            if dim == 1 && p[1] != 0.0 {
                return Err(MeasureError::InvalidMeasure(
                    "1D support points must have zero second coordinate".into(),
                ));
            }
            for &q in &points[i + 1..] {
                if dist(p, q) <= 1e-12 {
                    return Err(MeasureError::InvalidMeasure(format!(
                        "support points must be pairwise distinct, {p:?} ~ {q:?}"
                    )));
                }
            }
        }
        Ok(Self {
            points,
            weights,
            dim,
        })
    }

    pub fn dirac(point: Point, dim: usize) -> Self {
        Self::new(vec![point], vec![1.0], dim).expect("a Dirac mass is always valid")
    }

    pub fn uniform_on(points: Vec<Point>, dim: usize) -> Result<Self, MeasureError> {
        let n = points.len();
        let w = vec![1.0 / n as f64; n];
        Self::new(points, w, dim)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn moment(&self, p: f64) -> f64 {
        assert!(p > 0.0, "moment order must be positive");
        ksum(
            self.points
                .iter()
                .zip(&self.weights)
                .map(|(&y, &w)| w * norm(y).powf(p)),
        )
    }

    pub fn mean(&self) -> Point {
        let mut m = [0.0, 0.0];
        for (&y, &w) in self.points.iter().zip(&self.weights) {
            m[0] += w * y[0];
            m[1] += w * y[1];
        }
        m
    }

    pub fn translate(&self, tau: Point) -> Self {
        Self {
            points: self
                .points
                .iter()
                .map(|p| [p[0] + tau[0], p[1] + tau[1]])
                .collect(),
            weights: self.weights.clone(),
            dim: self.dim,
        }
    }

    pub fn scale_points(&self, s: f64) -> Self {
        Self {
            points: self.points.iter().map(|p| [p[0] * s, p[1] * s]).collect(),
            weights: self.weights.clone(),
            dim: self.dim,
        }
    }

    /// Parses `x1[,x2],weight` rows (optional header, `#` comments).
    pub fn from_csv_str(text: &str, dim: usize) -> Result<Self, MeasureError> {
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if lineno == 0 && fields.iter().any(|f| f.parse::<f64>().is_err()) {
                continue; // header row
            }
            let expected = dim + 1;
            if fields.len() != expected {
                return Err(MeasureError::InvalidMeasure(format!(
                    "line {}: expected {expected} fields, got {}",
                    lineno + 1,
                    fields.len()
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|e| {
                    MeasureError::InvalidMeasure(format!("line {}: {e}", lineno + 1))
                })
            };
            let x = parse(fields[0])?;
            let y = if dim == 2 { parse(fields[1])? } else { 0.0 };
            let w = parse(fields[dim])?;
            points.push([x, y]);
            weights.push(w);
        }
        Self::new(points, weights, dim)
    }
}

/// `2 p! (σ/2)^p`, the moment bound satisfied by sub-exponential measures
/// with scale σ.
pub fn subexp_moment_bound(sigma: f64, p: u32) -> f64 {
    assert!(sigma > 0.0, "scale must be positive");
    assert!(p >= 1, "moment order must be at least 1");
    let factorial: f64 = (1..=p).map(|k| k as f64).product();
    2.0 * factorial * (sigma / 2.0).powi(p as i32)
}

/// χ² (Kagan) divergence `Σ (w¹_j - w⁰_j)² / w⁰_j` over the support of
/// `base`; requires `mu` to be absolutely continuous w.r.t. `base`.
pub fn chi2_divergence(mu: &DiscreteMeasure, base: &DiscreteMeasure) -> Result<f64, MeasureError> {
    if mu.dim != base.dim {
        return Err(MeasureError::DimensionMismatch);
    }
    let mut matched = vec![false; mu.len()];
    let mut acc = Kahan::new();
    for (&y0, &w0) in base.points.iter().zip(&base.weights) {
        let mut w1 = 0.0;
        for (k, (&y1, &wm)) in mu.points.iter().zip(&mu.weights).enumerate() {
            if dist(y0, y1) <= 1e-12 {
                w1 = wm;
                matched[k] = true;
                break;
            }
        }
        if w0 == 0.0 {
            if w1 > 0.0 {
                return Err(MeasureError::NotAbsolutelyContinuous);
            }
            continue;
        }
        acc.add((w1 - w0) * (w1 - w0) / w0);
    }
    for (k, &m) in matched.iter().enumerate() {
        if !m && mu.weights[k] > 1e-12 {
            return Err(MeasureError::NotAbsolutelyContinuous);
        }
    }
    Ok(acc.total())
}

/// Piecewise-linear quantile function on `[0, 1]`: segments between
/// `(ts[k], xs[k])` and `(ts[k+1], xs[k+1])`; discrete measures use flat
/// segments with jumps encoded by repeated `t` values.
#[derive(Debug, Clone)]
pub struct QuantileFn {
    pub ts: Vec<f64>,
    pub xs: Vec<f64>,
}

impl QuantileFn {
    pub fn from_discrete(mu: &DiscreteMeasure) -> Self {
        assert_eq!(mu.dim(), 1, "quantile function requires 1D support");
        let mut idx: Vec<usize> = (0..mu.len()).collect();
        idx.sort_by(|&i, &j| mu.points[i][0].total_cmp(&mu.points[j][0]));
        let mut ts = vec![0.0];
        let mut xs = vec![mu.points[idx[0]][0]];
        let mut cum = Kahan::new();
        for &i in &idx {
            let x = mu.points[i][0];
            // flat segment carrying weight w at position x
            ts.push(cum.total());
            xs.push(x);
            cum.add(mu.weights[i]);
            ts.push(cum.total());
            xs.push(x);
        }
        let last = ts.len() - 1;
        ts[last] = 1.0;
        Self { ts, xs }
    }

    /// Evaluates the quantile at `t ∈ [0, 1]`.
    pub fn eval(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, 1.0);
        // first segment whose upper t bounds t
        let mut k = match self
            .ts
            .binary_search_by(|probe| probe.total_cmp(&t))
        {
            Ok(i) => i,
            Err(i) => i.min(self.ts.len() - 1),
        };
        if k == 0 {
            k = 1;
        }
        let (t0, t1) = (self.ts[k - 1], self.ts[k]);
        let (x0, x1) = (self.xs[k - 1], self.xs[k]);
        if t1 <= t0 {
            return x1;
        }
        x0 + (x1 - x0) * (t - t0) / (t1 - t0)
    }
}

/// A 1D measure in either representation.
pub enum Measure1D<'a> {
    Discrete(&'a DiscreteMeasure),
    Density(&'a GridDensity),
}

impl Measure1D<'_> {
    fn quantile(&self) -> QuantileFn {
        match self {
            Measure1D::Discrete(m) => QuantileFn::from_discrete(m),
            Measure1D::Density(g) => g.quantile_fn(),
        }
    }
}

/// Exact 1D Wasserstein distance `W_p`, p ∈ {1, 2}, via
/// `(∫₀¹ |F_μ^{-1} - F_ν^{-1}|^p dt)^{1/p}` on the merged breakpoint
/// partition.
pub fn wasserstein_1d(mu: &Measure1D, nu: &Measure1D, p: u32) -> f64 {
    assert!(p == 1 || p == 2, "only W1 and W2 are supported");
    let qa = mu.quantile();
    let qb = nu.quantile();
    let mut knots: Vec<f64> = qa.ts.iter().chain(qb.ts.iter()).copied().collect();
    knots.sort_by(f64::total_cmp);
    knots.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    let mut acc = Kahan::new();
    for w in knots.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        if t1 <= t0 {
            continue;
        }
        // Both quantiles are affine strictly inside (t0, t1); the values
        // AT the knots are side-dependent (jumps live there), so recover
        // the one-sided limits from two interior samples instead.
        let ta = t0 + 0.25 * (t1 - t0);
        let tb = t0 + 0.75 * (t1 - t0);
        let da = qa.eval(ta) - qb.eval(ta);
        let db = qa.eval(tb) - qb.eval(tb);
        let d0 = 1.5 * da - 0.5 * db;
        let d1 = 1.5 * db - 0.5 * da;
        let len = t1 - t0;
        let piece = match p {
            1 => {
                if d0 * d1 >= 0.0 {
                    0.5 * (d0.abs() + d1.abs()) * len
                } else {
                    // split at the root
                    let s = d0 / (d0 - d1);
                    0.5 * (d0.abs() * s + d1.abs() * (1.0 - s)) * len
                }
            }
            _ => len * (d0 * d0 + d0 * d1 + d1 * d1) / 3.0,
        };
        acc.add(piece);
    }
    let total = acc.total().max(0.0);
    match p {
        1 => total,
        _ => total.sqrt(),
    }
}

/// Cost kinds for the discrete transportation LP.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransportCost {
    Euclidean,
    SquaredEuclidean,
}

const SUPPORT_LIMIT: usize = 2000;

/// Exact optimal transportation cost between two discrete measures by
/// successive shortest augmenting paths with potentials. Returns the
/// optimal LP value (not a plan; ties are resolved by lowest index and
/// only the value is contractual).
pub fn transport_cost(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    cost: TransportCost,
) -> Result<f64, MeasureError> {
    if mu.dim != nu.dim {
        return Err(MeasureError::DimensionMismatch);
    }
    let size = mu.len() + nu.len();
    if size > SUPPORT_LIMIT {
        return Err(MeasureError::SizeLimit {
            size,
            limit: SUPPORT_LIMIT,
        });
    }
    let m = mu.len();
    let n = nu.len();
    let c = |i: usize, j: usize| -> f64 {
        let d = dist(mu.points[i], nu.points[j]);
        match cost {
            TransportCost::Euclidean => d,
            TransportCost::SquaredEuclidean => d * d,
        }
    };

    let mut supply: Vec<f64> = mu.weights.clone();
    let mut demand: Vec<f64> = nu.weights.clone();
    let mut flow = vec![0.0f64; m * n];
    // node potentials: sources then sinks
    let mut pot = vec![0.0f64; m + n];

    #[derive(PartialEq)]
    struct Item(f64, usize);
    impl Eq for Item {}
    impl PartialOrd for Item {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for Item {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            other.0.total_cmp(&self.0) // min-heap
        }
    }

    let eps = 1e-14;
    let max_rounds = 8 * (m + n) + 64;
    for _ in 0..max_rounds {
        let remaining: f64 = demand.iter().sum();
        if remaining <= 1e-13 {
            break;
        }
        // multi-source Dijkstra over the residual graph with reduced costs
        let nn = m + n;
        let mut dmin = vec![f64::INFINITY; nn];
        let mut prev = vec![usize::MAX; nn];
        let mut done = vec![false; nn];
        let mut heap = BinaryHeap::new();
        for i in 0..m {
            if supply[i] > eps {
                dmin[i] = 0.0;
                heap.push(Item(0.0, i));
            }
        }
        let mut target = usize::MAX;
        while let Some(Item(du, u)) = heap.pop() {
            if done[u] || du > dmin[u] {
                continue;
            }
            done[u] = true;
            if u >= m && demand[u - m] > eps {
                target = u;
                break;
            }
            if u < m {
                // forward arcs source u -> every sink
                for j in 0..n {
                    let v = m + j;
                    if done[v] {
                        continue;
                    }
                    let rc = (c(u, j) + pot[u] - pot[v]).max(0.0);
                    let alt = du + rc;
                    if alt < dmin[v] {
                        dmin[v] = alt;
                        prev[v] = u;
                        heap.push(Item(alt, v));
                    }
                }
            } else {
                // backward arcs sink -> source where flow is positive
                let j = u - m;
                for i in 0..m {
                    if done[i] || flow[i * n + j] <= eps {
                        continue;
                    }
                    let rc = (-c(i, j) + pot[u] - pot[i]).max(0.0);
                    let alt = du + rc;
                    if alt < dmin[i] {
                        dmin[i] = alt;
                        prev[i] = u;
                        heap.push(Item(alt, i));
                    }
                }
            }
        }
        if target == usize::MAX {
            return Err(MeasureError::InvalidMeasure(
                "transportation network is infeasible".into(),
            ));
        }
        // bottleneck along the augmenting path
        let mut bottleneck = demand[target - m];
        let mut u = target;
        while prev[u] != usize::MAX {
            let v = prev[u];
            if u >= m {
                // arc v(source) -> u(sink): unlimited capacity
            } else {
                // backward arc v(sink) -> u(source)
                bottleneck = bottleneck.min(flow[u * n + (v - m)]);
            }
            u = v;
        }
        bottleneck = bottleneck.min(supply[u]);
        if bottleneck <= eps {
            // numerically exhausted; clear the residue
            break;
        }
        // apply
        let mut w = target;
        while prev[w] != usize::MAX {
            let v = prev[w];
            if w >= m {
                flow[v * n + (w - m)] += bottleneck;
            } else {
                flow[w * n + (v - m)] -= bottleneck;
            }
            w = v;
        }
        supply[w] -= bottleneck;
        demand[target - m] -= bottleneck;
        // potential update keeps reduced costs nonnegative
        for u in 0..nn {
            if dmin[u].is_finite() {
                pot[u] += dmin[u].min(dmin[target]);
            } else {
                pot[u] += dmin[target];
            }
        }
    }

    let mut total = Kahan::new();
    for i in 0..m {
        for j in 0..n {
            let f = flow[i * n + j];
            if f > 0.0 {
                total.add(f * c(i, j));
            }
        }
    }
    Ok(total.total())
}

/// Exact `W₁` between small discrete measures (transportation LP with
/// Euclidean cost).
pub fn w1_discrete(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<f64, MeasureError> {
    transport_cost(mu, nu, TransportCost::Euclidean)
}

/// Exact `W₂` between small discrete measures (LP with squared cost, then
/// square root).
pub fn w2_discrete(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<f64, MeasureError> {
    Ok(transport_cost(mu, nu, TransportCost::SquaredEuclidean)?.sqrt())
}

/// Image measure of a grid density under a map sampled on its cells:
/// atoms at the distinct image points (grouped within 1e-12) with the
/// aggregated cell masses.
pub fn pushforward(rho: &GridDensity, map: &[Point]) -> DiscreteMeasure {
    assert_eq!(
        map.len(),
        rho.cells().len(),
        "the map must be sampled on every grid cell"
    );
    let mut idx: Vec<usize> = (0..map.len()).collect();
    idx.sort_by(|&i, &j| {
        map[i][0]
            .total_cmp(&map[j][0])
            .then(map[i][1].total_cmp(&map[j][1]))
    });
    let mut points: Vec<Point> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    for &i in &idx {
        let p = map[i];
        let w = rho.cells()[i].mass();
        if let Some(last) = points.last() {
            if dist(*last, p) <= 1e-12 {
                *weights.last_mut().unwrap() += w;
                continue;
            }
        }
        points.push(p);
        weights.push(w);
    }
    let total: f64 = ksum(weights.iter().copied());
    for w in weights.iter_mut() {
        *w /= total;
    }
    DiscreteMeasure {
        points,
        weights,
        dim: rho.dim(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ConvexDomain;

    fn unit_interval_density(n: usize) -> GridDensity {
        GridDensity::uniform(ConvexDomain::interval(0.0, 1.0).unwrap(), n).unwrap()
    }

    #[test]
    fn moments() {
        let d = DiscreteMeasure::dirac([3.0, 4.0], 2);
        assert!((d.moment(2.0) - 25.0).abs() < 1e-12);

        let two = DiscreteMeasure::uniform_on(vec![[1.0, 0.0], [-1.0, 0.0]], 2).unwrap();
        assert!((two.moment(4.0) - 1.0).abs() < 1e-12);

        // ∫ x² dx = 1/3 with O(h²) quadrature error
        let rho = unit_interval_density(512);
        assert!((rho.moment(2.0) - 1.0 / 3.0).abs() < 1e-5);
    }

    #[test]
    fn moment_homogeneity() {
        let mu = DiscreteMeasure::new(
            vec![[0.3, 0.1], [-0.7, 0.4], [0.2, -0.9]],
            vec![0.5, 0.25, 0.25],
            2,
        )
        .unwrap();
        for p in [1.0, 2.0, 3.5] {
            let s = 2.75;
            let lhs = mu.scale_points(s).moment(p);
            let rhs = s.powf(p) * mu.moment(p);
            assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
        }
    }

    #[test]
    fn subexp_bound_values() {
        assert!((subexp_moment_bound(2.0, 3) - 12.0).abs() < 1e-12);
        assert!((subexp_moment_bound(1.0, 1) - 1.0).abs() < 1e-12);
        assert!((subexp_moment_bound(2.0, 1) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn chi2_examples() {
        let pts = vec![[0.25, 0.5], [0.75, 0.5]];
        let m0 = DiscreteMeasure::new(pts.clone(), vec![0.5, 0.5], 2).unwrap();
        let m1 = DiscreteMeasure::new(pts.clone(), vec![0.25, 0.75], 2).unwrap();
        assert_eq!(chi2_divergence(&m0, &m0).unwrap(), 0.0);
        assert!((chi2_divergence(&m1, &m0).unwrap() - 0.25).abs() < 1e-12);

        // direct sum: (1-½)²/½ + (0-½)²/½ = 1
        let m2 = DiscreteMeasure::new(pts.clone(), vec![1.0, 0.0], 2).unwrap();
        assert!((chi2_divergence(&m2, &m0).unwrap() - 1.0).abs() < 1e-12);

        // mass off the base support
        let far = DiscreteMeasure::new(vec![[0.25, 0.5], [0.1, 0.1]], vec![0.5, 0.5], 2).unwrap();
        assert!(matches!(
            chi2_divergence(&far, &m0),
            Err(MeasureError::NotAbsolutelyContinuous)
        ));
        assert!(chi2_divergence(&m0, &m2).is_err());
    }

    #[test]
    fn chi2_nonnegative_zero_iff_equal() {
        let pts = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let m0 = DiscreteMeasure::new(pts.clone(), vec![0.2, 0.3, 0.5], 2).unwrap();
        let m1 = DiscreteMeasure::new(pts.clone(), vec![0.25, 0.25, 0.5], 2).unwrap();
        let d = chi2_divergence(&m1, &m0).unwrap();
        assert!(d > 0.0);
        assert_eq!(chi2_divergence(&m0, &m0).unwrap(), 0.0);
    }

    #[test]
    fn wasserstein_1d_examples() {
        // U[0,1] vs U[ε, 1+ε]: quantile shift by ε
        let rho = unit_interval_density(256);
        let nu = GridDensity::uniform(ConvexDomain::interval(0.1, 1.1).unwrap(), 256).unwrap();
        let w2 = wasserstein_1d(&Measure1D::Density(&rho), &Measure1D::Density(&nu), 2);
        assert!((w2 - 0.1).abs() < 1e-10, "got {w2}");

        let z = wasserstein_1d(&Measure1D::Density(&rho), &Measure1D::Density(&rho), 2);
        assert!(z.abs() < 1e-12);

        let d0 = DiscreteMeasure::dirac([0.0, 0.0], 1);
        let d1 = DiscreteMeasure::dirac([1.0, 0.0], 1);
        let w1 = wasserstein_1d(&Measure1D::Discrete(&d0), &Measure1D::Discrete(&d1), 1);
        assert!((w1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn transport_lp_examples() {
        let a = DiscreteMeasure::dirac([0.0, 0.0], 2);
        assert_eq!(w1_discrete(&a, &a).unwrap(), 0.0);

        let b = DiscreteMeasure::dirac([3.0, 4.0], 2);
        assert!((w1_discrete(&a, &b).unwrap() - 5.0).abs() < 1e-12);

        // vertical matching beats the crossing by brute force over the
        // two permutations: cost(id) = 1+1, cost(swap) = √2+√2
        let mu = DiscreteMeasure::uniform_on(vec![[0.0, 0.0], [1.0, 0.0]], 2).unwrap();
        let nu = DiscreteMeasure::uniform_on(vec![[0.0, 1.0], [1.0, 1.0]], 2).unwrap();
        let brute = {
            let c_id = 0.5 * dist([0.0, 0.0], [0.0, 1.0]) + 0.5 * dist([1.0, 0.0], [1.0, 1.0]);
            let c_sw = 0.5 * dist([0.0, 0.0], [1.0, 1.0]) + 0.5 * dist([1.0, 0.0], [0.0, 1.0]);
            c_id.min(c_sw)
        };
        assert!((brute - 1.0).abs() < 1e-15);
        assert!((w1_discrete(&mu, &nu).unwrap() - brute).abs() < 1e-12);
    }

    #[test]
    fn transport_lp_matches_permutation_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for trial in 0..30 {
            let k = rng.gen_range(2..=6);
            let pts_a: Vec<Point> = (0..k)
                .map(|_| [rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)])
                .collect();
            let pts_b: Vec<Point> = (0..k)
                .map(|_| [rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)])
                .collect();
            let mu = DiscreteMeasure::uniform_on(pts_a.clone(), 2).unwrap();
            let nu = DiscreteMeasure::uniform_on(pts_b.clone(), 2).unwrap();
            // equal weights: the optimum is an assignment
            let mut perm: Vec<usize> = (0..k).collect();
            let mut best = f64::INFINITY;
            permute(&mut perm, 0, &mut |p: &[usize]| {
                let c: f64 = p
                    .iter()
                    .enumerate()
                    .map(|(i, &j)| dist(pts_a[i], pts_b[j]) / k as f64)
                    .sum();
                best = best.min(c);
            });
            let lp = w1_discrete(&mu, &nu).unwrap();
            assert!(
                (lp - best).abs() < 1e-10,
                "trial {trial}: lp {lp} vs brute {best}"
            );
        }

        fn permute(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
            if k == p.len() {
                f(p);
                return;
            }
            for i in k..p.len() {
                p.swap(k, i);
                permute(p, k + 1, f);
                p.swap(k, i);
            }
        }
    }

    #[test]
    fn quantile_w1_matches_cdf_area() {
        // independent oracle: W₁ = ∫ |F_μ - F_ν| dx on the merged support
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(19);
        for _ in 0..40 {
            let mk = |rng: &mut rand_chacha::ChaCha8Rng| {
                let k = rng.gen_range(2..=8);
                let mut pts = Vec::new();
                let mut ws = Vec::new();
                for _ in 0..k {
                    pts.push([rng.gen_range(-1.0..1.0), 0.0]);
                    ws.push(rng.gen_range(0.1..1.0));
                }
                let s: f64 = ws.iter().sum();
                let mut ws: Vec<f64> = ws.iter().map(|w| w / s).collect();
                let drift: f64 = 1.0 - ws.iter().sum::<f64>();
                ws[0] += drift;
                DiscreteMeasure::new(pts, ws, 1).unwrap()
            };
            let mu = mk(&mut rng);
            let nu = mk(&mut rng);
            let q1 = wasserstein_1d(&Measure1D::Discrete(&mu), &Measure1D::Discrete(&nu), 1);
            let mut events: Vec<(f64, f64, f64)> = Vec::new();
            for (p, w) in mu.points().iter().zip(mu.weights()) {
                events.push((p[0], *w, 0.0));
            }
            for (p, w) in nu.points().iter().zip(nu.weights()) {
                events.push((p[0], 0.0, *w));
            }
            events.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut cdf_area = 0.0;
            let mut fa = 0.0;
            let mut fb = 0.0;
            for w in events.windows(2) {
                fa += w[0].1;
                fb += w[0].2;
                cdf_area += (fa - fb).abs() * (w[1].0 - w[0].0);
            }
            assert!((q1 - cdf_area).abs() < 1e-10, "{q1} vs {cdf_area}");
        }
    }

    #[test]
    fn transport_lp_agrees_with_1d_quantile() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let k = rng.gen_range(2..=8);
            let l = rng.gen_range(2..=8);
            let mk = |rng: &mut rand_chacha::ChaCha8Rng, k: usize| {
                let mut pts = Vec::new();
                let mut ws = Vec::new();
                for _ in 0..k {
                    pts.push([rng.gen_range(-1.0..1.0), 0.0]);
                    ws.push(rng.gen_range(0.1..1.0));
                }
                let s: f64 = ws.iter().sum();
                // exact unit total despite rounding
                let mut ws: Vec<f64> = ws.iter().map(|w| w / s).collect();
                let drift: f64 = 1.0 - ws.iter().sum::<f64>();
                ws[0] += drift;
                DiscreteMeasure::new(pts, ws, 1).unwrap()
            };
            let mu = mk(&mut rng, k);
            let nu = mk(&mut rng, l);
            let lp1 = w1_discrete(&mu, &nu).unwrap();
            let q1 = wasserstein_1d(&Measure1D::Discrete(&mu), &Measure1D::Discrete(&nu), 1);
            assert!((lp1 - q1).abs() < 1e-9, "W1 lp {lp1} vs quantile {q1}");
            let lp2 = w2_discrete(&mu, &nu).unwrap();
            let q2 = wasserstein_1d(&Measure1D::Discrete(&mu), &Measure1D::Discrete(&nu), 2);
            assert!((lp2 - q2).abs() < 1e-9, "W2 lp {lp2} vs quantile {q2}");
        }
    }

    #[test]
    fn transport_lp_size_limit() {
        let big: Vec<Point> = (0..1500).map(|i| [i as f64, 0.0]).collect();
        let mu = DiscreteMeasure::uniform_on(big.clone(), 1).unwrap();
        let nu = DiscreteMeasure::uniform_on(big.iter().map(|p| [p[0] + 0.25, 0.0]).collect(), 1)
            .unwrap();
        assert!(matches!(
            w1_discrete(&mu, &nu),
            Err(MeasureError::SizeLimit { .. })
        ));
    }

    #[test]
    fn pushforward_examples() {
        let rho = unit_interval_density(2);
        // identity: atoms at the two cell centers with weights (1/2, 1/2)
        let map: Vec<Point> = rho.cells().iter().map(|c| c.center).collect();
        let nu = pushforward(&rho, &map);
        assert_eq!(nu.len(), 2);
        assert!((nu.weights()[0] - 0.5).abs() < 1e-12);
        assert!((nu.weights()[1] - 0.5).abs() < 1e-12);

        // constant map: a single Dirac
        let y0 = [0.3, 0.0];
        let constant: Vec<Point> = rho.cells().iter().map(|_| y0).collect();
        let nu = pushforward(&rho, &constant);
        assert_eq!(nu.len(), 1);
        assert!((nu.weights()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn polygon_grid_clips_cells() {
        let tri = ConvexDomain::polygon(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        let rho = GridDensity::uniform(tri.clone(), 64).unwrap();
        assert!((rho.total_mass() - 1.0).abs() < 1e-10);
        let vol: f64 = rho.cells().iter().map(|c| c.volume).sum();
        assert!((vol - 0.5).abs() < 1e-10, "clipped cell volumes {vol}");
        for c in rho.cells() {
            assert!(tri.contains(c.center), "{:?} outside triangle", c.center);
        }
    }

    #[test]
    fn csv_roundtrip() {
        let text = "x1,x2,weight\n0.25,0.5,0.5\n0.75,0.5,0.5\n";
        let m = DiscreteMeasure::from_csv_str(text, 2).unwrap();
        assert_eq!(m.len(), 2);
        assert!((m.weights()[0] - 0.5).abs() < 1e-15);
        let one_d = DiscreteMeasure::from_csv_str("0.1,1.0\n", 1).unwrap();
        assert_eq!(one_d.dim(), 1);
    }
}
