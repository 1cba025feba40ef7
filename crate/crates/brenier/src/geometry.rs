//! Compact convex domains of ℝ^d, d ∈ {1, 2}: intervals, axis-aligned
//! boxes, convex polygons and disks, together with the parallel-body
//! operations (erosion, dilation) and the radial quantities entering the
//! boundary-slice volume bounds.
//!
//! Dilating a polygon or a box produces the exact rounded body
//! (Minkowski sum with a disk), kept as its own shape variant so that
//! volumes follow Steiner's formula exactly and containment tests reduce
//! to an exact distance-to-polygon query. A circumscribed polygonal
//! over-approximation is available for callers that need a plain polygon.

use crate::num::{add, cross, dist, dot, norm, scale, sub, unit_sphere_area, Point};
use thiserror::Error;

/// Base tolerance for geometric predicates on coordinates in [-10, 10].
/// Larger inputs scale the tolerance proportionally.
const GEOM_EPS: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("erosion by {eps} empties the domain (inradius {inradius})")]
    EmptyErosion { eps: f64, inradius: f64 },
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// `[a, b]` with `a < b`.
    Interval { a: f64, b: f64 },
    /// Axis-aligned box `[min, max]` with strict order per axis.
    Box2 { min: Point, max: Point },
    /// Convex polygon, counterclockwise, positive area.
    Polygon { vertices: Vec<Point> },
    /// Disk of positive radius.
    Ball { center: Point, radius: f64 },
    /// Minkowski sum of a convex polygon with a disk of radius `radius`;
    /// the exact outer parallel body of a polygon or box.
    Rounded { vertices: Vec<Point>, radius: f64 },
}

/// A compact convex domain with a distinguished interior reference point
/// used by radial queries (`radii`, `radial_function`).
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexDomain {
    shape: Shape,
    reference: Point,
}

fn polygon_area(vs: &[Point]) -> f64 {
    let n = vs.len();
    let mut acc = 0.0;
    for i in 0..n {
        acc += cross(vs[i], vs[(i + 1) % n]);
    }
    0.5 * acc
}

fn polygon_centroid(vs: &[Point]) -> Point {
    let n = vs.len();
    let mut cx = 0.0;
    let mut cy = 0.0;
    let mut a = 0.0;
    for i in 0..n {
        let p = vs[i];
        let q = vs[(i + 1) % n];
        let w = cross(p, q);
        cx += (p[0] + q[0]) * w;
        cy += (p[1] + q[1]) * w;
        a += w;
    }
    [cx / (3.0 * a), cy / (3.0 * a)]
}

fn polygon_perimeter(vs: &[Point]) -> f64 {
    let n = vs.len();
    (0..n).map(|i| dist(vs[i], vs[(i + 1) % n])).sum()
}

/// Distance from `p` to the closed segment `[a, b]`.
fn dist_point_segment(p: Point, a: Point, b: Point) -> f64 {
    let ab = sub(b, a);
    let len2 = dot(ab, ab);
    if len2 == 0.0 {
        return dist(p, a);
    }
    let t = (dot(sub(p, a), ab) / len2).clamp(0.0, 1.0);
    dist(p, add(a, scale(ab, t)))
}

/// Signed distance of `p` to the boundary of a ccw convex polygon:
/// positive inside, negative outside (as min over edge half-planes,
/// which for exterior points under-estimates the true distance but has
/// the correct sign).
fn polygon_signed_dist(p: Point, vs: &[Point]) -> f64 {
    let n = vs.len();
    let mut m = f64::INFINITY;
    for i in 0..n {
        let a = vs[i];
        let b = vs[(i + 1) % n];
        let e = sub(b, a);
        let d = cross(e, sub(p, a)) / norm(e);
        m = m.min(d);
    }
    m
}

/// Euclidean distance from `p` to the polygon (0 when inside).
fn dist_to_polygon(p: Point, vs: &[Point]) -> f64 {
    if polygon_signed_dist(p, vs) >= 0.0 {
        return 0.0;
    }
    let n = vs.len();
    (0..n)
        .map(|i| dist_point_segment(p, vs[i], vs[(i + 1) % n]))
        .fold(f64::INFINITY, f64::min)
}

/// Clips a convex ccw polygon against the half-plane `⟨x, n⟩ >= c`.
fn clip_halfplane(vs: &[Point], n: Point, c: f64, tol: f64) -> Vec<Point> {
    let m = vs.len();
    let mut out = Vec::with_capacity(m + 1);
    for i in 0..m {
        let p = vs[i];
        let q = vs[(i + 1) % m];
        let dp = dot(p, n) - c;
        let dq = dot(q, n) - c;
        if dp >= -tol {
            out.push(p);
        }
        if (dp > tol && dq < -tol) || (dp < -tol && dq > tol) {
            let t = dp / (dp - dq);
            out.push(add(p, scale(sub(q, p), t)));
        }
    }
    // drop duplicate consecutive vertices introduced by clipping
    let mut dedup: Vec<Point> = Vec::with_capacity(out.len());
    for p in out {
        if dedup.last().is_none_or(|&q| dist(p, q) > tol) {
            dedup.push(p);
        }
    }
    if dedup.len() >= 2 && dist(dedup[0], *dedup.last().unwrap()) <= tol {
        dedup.pop();
    }
    dedup
}

/// Inward-offsets every edge of a ccw convex polygon by `eps` and
/// re-intersects the half-planes. Returns `None` when the result is empty
/// or degenerate.
fn erode_polygon(vs: &[Point], eps: f64, tol: f64) -> Option<Vec<Point>> {
    let n = vs.len();
    let mut cur = vs.to_vec();
    for i in 0..n {
        let a = vs[i];
        let b = vs[(i + 1) % n];
        let e = sub(b, a);
        let len = norm(e);
        // inward normal of a ccw edge
        let nrm = [-e[1] / len, e[0] / len];
        let c = dot(a, nrm) + eps;
        cur = clip_halfplane(&cur, nrm, c, tol);
        if cur.len() < 3 {
            return None;
        }
    }
    if polygon_area(&cur) <= tol {
        return None;
    }
    Some(cur)
}

fn box_corners(min: Point, max: Point) -> Vec<Point> {
    vec![min, [max[0], min[1]], max, [min[0], max[1]]]
}

impl ConvexDomain {
    pub fn interval(a: f64, b: f64) -> Result<Self, GeometryError> {
        if a >= b || !a.is_finite() || !b.is_finite() {
            return Err(GeometryError::InvalidDomain(format!(
                "interval endpoints must be finite and strictly ordered, got [{a}, {b}]"
            )));
        }
        Ok(Self {
            shape: Shape::Interval { a, b },
            reference: [0.5 * (a + b), 0.0],
        })
    }

    pub fn box2(min: Point, max: Point) -> Result<Self, GeometryError> {
        if !(min[0] < max[0] && min[1] < max[1]) {
            return Err(GeometryError::InvalidDomain(format!(
                "box corners must be strictly ordered per axis, got {min:?}..{max:?}"
            )));
        }
        Ok(Self {
            shape: Shape::Box2 { min, max },
            reference: [0.5 * (min[0] + max[0]), 0.5 * (min[1] + max[1])],
        })
    }

    /// Builds a convex polygon. Input vertices may be clockwise (they are
    /// reversed); non-convex or degenerate inputs are rejected.
    pub fn polygon(mut vertices: Vec<Point>) -> Result<Self, GeometryError> {
        if vertices.len() < 3 {
            return Err(GeometryError::InvalidDomain(
                "polygon needs at least 3 vertices".into(),
            ));
        }
        if polygon_area(&vertices) < 0.0 {
            vertices.reverse();
        }
        let area = polygon_area(&vertices);
        let scale_tol = Self::coord_tol(&vertices);
        if area <= scale_tol {
            return Err(GeometryError::InvalidDomain(
                "polygon is degenerate (area ~ 0)".into(),
            ));
        }
        let n = vertices.len();
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            if cross(sub(b, a), sub(c, b)) <= scale_tol {
                return Err(GeometryError::InvalidDomain(format!(
                    "vertices are not in strictly convex ccw position near index {i}"
                )));
            }
        }
        let reference = polygon_centroid(&vertices);
        Ok(Self {
            shape: Shape::Polygon { vertices },
            reference,
        })
    }

    pub fn ball(center: Point, radius: f64) -> Result<Self, GeometryError> {
        if radius <= 0.0 || radius.is_nan() {
            return Err(GeometryError::InvalidDomain(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        Ok(Self {
            shape: Shape::Ball { center, radius },
            reference: center,
        })
    }

    /// Replaces the reference point used by radial queries. Must be interior.
    pub fn with_reference(mut self, reference: Point) -> Result<Self, GeometryError> {
        let r = match self.shape {
            Shape::Interval { .. } => [reference[0], 0.0],
            _ => reference,
        };
        if self.dist_to_boundary(r) <= self.tol() {
            return Err(GeometryError::InvalidDomain(format!(
                "reference point {r:?} is not interior"
            )));
        }
        self.reference = r;
        Ok(self)
    }

    fn coord_tol(pts: &[Point]) -> f64 {
        let m = pts
            .iter()
            .flat_map(|p| [p[0].abs(), p[1].abs()])
            .fold(0.0, f64::max);
        GEOM_EPS * (m / 10.0).max(1.0)
    }

    /// Predicate tolerance, rescaled when coordinates exceed [-10, 10].
    pub fn tol(&self) -> f64 {
        let m = match &self.shape {
            Shape::Interval { a, b } => a.abs().max(b.abs()),
            Shape::Box2 { min, max } => min[0]
                .abs()
                .max(min[1].abs())
                .max(max[0].abs())
                .max(max[1].abs()),
            Shape::Polygon { vertices } | Shape::Rounded { vertices, .. } => vertices
                .iter()
                .flat_map(|p| [p[0].abs(), p[1].abs()])
                .fold(0.0, f64::max),
            Shape::Ball { center, radius } => center[0].abs().max(center[1].abs()) + radius,
        };
        GEOM_EPS * (m / 10.0).max(1.0)
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn reference(&self) -> Point {
        self.reference
    }

    pub fn dim(&self) -> usize {
        match self.shape {
            Shape::Interval { .. } => 1,
            _ => 2,
        }
    }

    pub fn volume(&self) -> f64 {
        match &self.shape {
            Shape::Interval { a, b } => b - a,
            Shape::Box2 { min, max } => (max[0] - min[0]) * (max[1] - min[1]),
            Shape::Polygon { vertices } => polygon_area(vertices),
            Shape::Ball { radius, .. } => std::f64::consts::PI * radius * radius,
            // Steiner: area + perimeter·r + π r²
            Shape::Rounded { vertices, radius } => {
                polygon_area(vertices)
                    + polygon_perimeter(vertices) * radius
                    + std::f64::consts::PI * radius * radius
            }
        }
    }

    /// (d-1)-dimensional boundary measure: point count 2 for intervals,
    /// perimeter in 2D.
    pub fn boundary_measure(&self) -> f64 {
        match &self.shape {
            Shape::Interval { .. } => 2.0,
            Shape::Box2 { min, max } => 2.0 * ((max[0] - min[0]) + (max[1] - min[1])),
            Shape::Polygon { vertices } => polygon_perimeter(vertices),
            Shape::Ball { radius, .. } => 2.0 * std::f64::consts::PI * radius,
            Shape::Rounded { vertices, radius } => {
                polygon_perimeter(vertices) + 2.0 * std::f64::consts::PI * radius
            }
        }
    }

    pub fn diam(&self) -> f64 {
        match &self.shape {
            Shape::Interval { a, b } => b - a,
            Shape::Box2 { min, max } => dist(*min, *max),
            Shape::Polygon { vertices } => {
                let mut m = 0.0f64;
                for (i, &p) in vertices.iter().enumerate() {
                    for &q in &vertices[i + 1..] {
                        m = m.max(dist(p, q));
                    }
                }
                m
            }
            Shape::Ball { radius, .. } => 2.0 * radius,
            Shape::Rounded { vertices, radius } => {
                let mut m = 0.0f64;
                for (i, &p) in vertices.iter().enumerate() {
                    for &q in &vertices[i + 1..] {
                        m = m.max(dist(p, q));
                    }
                }
                m + 2.0 * radius
            }
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        let tol = self.tol();
        match &self.shape {
            Shape::Interval { a, b } => p[0] >= a - tol && p[0] <= b + tol && p[1].abs() <= tol,
            Shape::Box2 { min, max } => {
                p[0] >= min[0] - tol && p[0] <= max[0] + tol && p[1] >= min[1] - tol
                    && p[1] <= max[1] + tol
            }
            Shape::Polygon { vertices } => polygon_signed_dist(p, vertices) >= -tol,
            Shape::Ball { center, radius } => dist(p, *center) <= radius + tol,
            Shape::Rounded { vertices, radius } => dist_to_polygon(p, vertices) <= radius + tol,
        }
    }

    /// Distance from an interior point to the boundary (clamped at 0 for
    /// exterior points).
    pub fn dist_to_boundary(&self, p: Point) -> f64 {
        match &self.shape {
            Shape::Interval { a, b } => (p[0] - a).min(b - p[0]).max(0.0),
            Shape::Box2 { min, max } => (p[0] - min[0])
                .min(max[0] - p[0])
                .min(p[1] - min[1])
                .min(max[1] - p[1])
                .max(0.0),
            Shape::Polygon { vertices } => polygon_signed_dist(p, vertices).max(0.0),
            Shape::Ball { center, radius } => (radius - dist(p, *center)).max(0.0),
            Shape::Rounded { vertices, radius } => {
                let sd = polygon_signed_dist(p, vertices);
                if sd >= 0.0 {
                    sd + radius
                } else {
                    (radius - dist_to_polygon(p, vertices)).max(0.0)
                }
            }
        }
    }

    /// Radius of the largest inscribed ball.
    pub fn inradius(&self) -> f64 {
        match &self.shape {
            Shape::Interval { a, b } => 0.5 * (b - a),
            Shape::Box2 { min, max } => 0.5 * (max[0] - min[0]).min(max[1] - min[1]),
            Shape::Ball { radius, .. } => *radius,
            Shape::Rounded { vertices, radius } =>

            {
                radius + Self::polygon_inradius(vertices, self.tol())
            }
            Shape::Polygon { vertices } => Self::polygon_inradius(vertices, self.tol()),
        }
    }

    fn polygon_inradius(vertices: &[Point], tol: f64) -> f64 {
        // Chebyshev radius by bisection on erosion emptiness.
        let mut lo = 0.0f64;
        let mut hi = {
            let mut m = 0.0f64;
            for (i, &p) in vertices.iter().enumerate() {
                for &q in &vertices[i + 1..] {
                    m = m.max(dist(p, q));
                }
            }
            0.5 * m
        };
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if erode_polygon(vertices, mid, tol).is_some() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Inner parallel body `X_{-eps}`. Fails when the erosion is empty.
    pub fn erode(&self, eps: f64) -> Result<ConvexDomain, GeometryError> {
        assert!(eps >= 0.0, "erosion distance must be nonnegative");
        let inr = self.inradius();
        if eps >= inr {
            return Err(GeometryError::EmptyErosion { eps, inradius: inr });
        }
        let shape = match &self.shape {
            Shape::Interval { a, b } => Shape::Interval {
                a: a + eps,
                b: b - eps,
            },
            Shape::Box2 { min, max } => Shape::Box2 {
                min: [min[0] + eps, min[1] + eps],
                max: [max[0] - eps, max[1] - eps],
            },
            Shape::Ball { center, radius } => Shape::Ball {
                center: *center,
                radius: radius - eps,
            },
            Shape::Polygon { vertices } => {
                let vs = erode_polygon(vertices, eps, self.tol()).ok_or(
                    GeometryError::EmptyErosion { eps, inradius: inr },
                )?;
                Shape::Polygon { vertices: vs }
            }
            Shape::Rounded { vertices, radius } => {
                if eps <= *radius {
                    Shape::Rounded {
                        vertices: vertices.clone(),
                        radius: radius - eps,
                    }
                } else {
                    let vs = erode_polygon(vertices, eps - radius, self.tol()).ok_or(
                        GeometryError::EmptyErosion { eps, inradius: inr },
                    )?;
                    Shape::Polygon { vertices: vs }
                }
            }
        };
        let mut out = ConvexDomain {
            shape,
            reference: self.reference,
        };
        // keep the reference interior; fall back to the shrunk body's center
        if out.dist_to_boundary(out.reference) <= out.tol() {
            out.reference = out.default_reference();
        }
        Ok(out)
    }

    fn default_reference(&self) -> Point {
        match &self.shape {
            Shape::Interval { a, b } => [0.5 * (a + b), 0.0],
            Shape::Box2 { min, max } => [0.5 * (min[0] + max[0]), 0.5 * (min[1] + max[1])],
            Shape::Polygon { vertices } | Shape::Rounded { vertices, .. } => {
                polygon_centroid(vertices)
            }
            Shape::Ball { center, .. } => *center,
        }
    }

    /// Outer parallel body `X_{+eps}`. Exact for every supported shape;
    /// polygons and boxes become rounded bodies.
    pub fn dilate(&self, eps: f64) -> ConvexDomain {
        assert!(eps >= 0.0, "dilation distance must be nonnegative");
        if eps == 0.0 {
            return self.clone();
        }
        let shape = match &self.shape {
            Shape::Interval { a, b } => Shape::Interval {
                a: a - eps,
                b: b + eps,
            },
            Shape::Box2 { min, max } => Shape::Rounded {
                vertices: box_corners(*min, *max),
                radius: eps,
            },
            Shape::Ball { center, radius } => Shape::Ball {
                center: *center,
                radius: radius + eps,
            },
            Shape::Polygon { vertices } => Shape::Rounded {
                vertices: vertices.clone(),
                radius: eps,
            },
            Shape::Rounded { vertices, radius } => Shape::Rounded {
                vertices: vertices.clone(),
                radius: radius + eps,
            },
        };
        ConvexDomain {
            shape,
            reference: self.reference,
        }
    }

    /// Largest and smallest radii `(r, R)` about the reference point with
    /// `B(ref, r) ⊆ X ⊆ B(ref, R)`.
    pub fn radii(&self) -> (f64, f64) {
        let r = self.dist_to_boundary(self.reference);
        let big = match &self.shape {
            Shape::Interval { a, b } => (self.reference[0] - a).max(b - self.reference[0]),
            Shape::Box2 { min, max } => box_corners(*min, *max)
                .into_iter()
                .map(|v| dist(v, self.reference))
                .fold(0.0, f64::max),
            Shape::Polygon { vertices } => vertices
                .iter()
                .map(|&v| dist(v, self.reference))
                .fold(0.0, f64::max),
            Shape::Ball { center, radius } => radius + dist(*center, self.reference),
            Shape::Rounded { vertices, radius } => {
                vertices
                    .iter()
                    .map(|&v| dist(v, self.reference))
                    .fold(0.0, f64::max)
                    + radius
            }
        };
        (r, big)
    }

    /// Distance along direction `u` (unit) from the reference point to the
    /// boundary.
    pub fn radial_function(&self, u: Point) -> f64 {
        debug_assert!((norm(u) - 1.0).abs() < 1e-9, "direction must be unit");
        let p = self.reference;
        match &self.shape {
            Shape::Interval { a, b } => {
                if u[0] > 0.0 {
                    (b - p[0]) / u[0]
                } else {
                    (a - p[0]) / u[0]
                }
            }
            Shape::Box2 { min, max } => {
                Self::ray_exit_convex(&box_corners(*min, *max), p, u)
            }
            Shape::Polygon { vertices } => Self::ray_exit_convex(vertices, p, u),
            Shape::Ball { center, radius } => {
                let d = sub(p, *center);
                let du = dot(d, u);
                (-du) + (du * du + radius * radius - dot(d, d)).sqrt()
            }
            Shape::Rounded { .. } => {
                // bisection against the exact containment test
                let (_, big) = self.radii();
                let mut lo = 0.0;
                let mut hi = big * 1.0001;
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if self.contains(add(p, scale(u, mid))) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
        }
    }

    fn ray_exit_convex(vertices: &[Point], p: Point, u: Point) -> f64 {
        let n = vertices.len();
        let mut t_exit = f64::INFINITY;
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let e = sub(b, a);
            let len = norm(e);
            let nrm = [-e[1] / len, e[0] / len]; // inward
            let un = dot(u, nrm);
            if un < 0.0 {
                let t = -(dot(sub(p, a), nrm)) / un;
                if t >= 0.0 {
                    t_exit = t_exit.min(t);
                }
            }
        }
        t_exit
    }

    /// Upper bound `S_{d-1} (R + r)^{d-1} (R/r) ε` for the volume of the
    /// boundary slice `X \ X_{-ε}` about the reference point.
    pub fn erosion_volume_bound(&self, eps: f64) -> f64 {
        let (r, big) = self.radii();
        let d = self.dim();
        unit_sphere_area(d) * (big + r).powi(d as i32 - 1) * (big / r) * eps
    }

    /// Exact volume of `X \ X_{-ε}`; when the erosion is empty the slice is
    /// the whole domain.
    pub fn erosion_slice_volume(&self, eps: f64) -> f64 {
        match self.erode(eps) {
            Ok(inner) => self.volume() - inner.volume(),
            Err(GeometryError::EmptyErosion { .. }) => self.volume(),
            Err(e) => unreachable!("erode cannot fail otherwise: {e}"),
        }
    }

    /// Exact volume of `X_{+ε} \ X`.
    pub fn dilation_slice_volume(&self, eps: f64) -> f64 {
        self.dilate(eps).volume() - self.volume()
    }

    /// Support function `h_X(y) = max_{x∈X} ⟨x, y⟩`.
    pub fn support(&self, y: Point) -> f64 {
        match &self.shape {
            Shape::Interval { a, b } => (a * y[0]).max(b * y[0]),
            Shape::Box2 { min, max } => box_corners(*min, *max)
                .into_iter()
                .map(|v| dot(v, y))
                .fold(f64::NEG_INFINITY, f64::max),
            Shape::Polygon { vertices } => vertices
                .iter()
                .map(|&v| dot(v, y))
                .fold(f64::NEG_INFINITY, f64::max),
            Shape::Ball { center, radius } => dot(*center, y) + radius * norm(y),
            Shape::Rounded { vertices, radius } => {
                vertices
                    .iter()
                    .map(|&v| dot(v, y))
                    .fold(f64::NEG_INFINITY, f64::max)
                    + radius * norm(y)
            }
        }
    }

    /// Extreme points useful for exact conjugation: interval endpoints, box
    /// corners, polygon vertices. Balls and rounded bodies have no finite
    /// vertex set and return a circumscribing sample.
    pub fn vertex_points(&self) -> Vec<Point> {
        match &self.shape {
            Shape::Interval { a, b } => vec![[*a, 0.0], [*b, 0.0]],
            Shape::Box2 { min, max } => box_corners(*min, *max),
            Shape::Polygon { vertices } => vertices.clone(),
            Shape::Ball { center, radius } => (0..64)
                .map(|k| {
                    let t = 2.0 * std::f64::consts::PI * k as f64 / 64.0;
                    add(*center, [radius * t.cos(), radius * t.sin()])
                })
                .collect(),
            Shape::Rounded { .. } => self.dilated_polygon_overapprox(8).vertex_points(),
        }
    }

    /// Axis-aligned bounding box.
    pub fn bounding_box(&self) -> (Point, Point) {
        match &self.shape {
            Shape::Interval { a, b } => ([*a, 0.0], [*b, 0.0]),
            Shape::Box2 { min, max } => (*min, *max),
            Shape::Polygon { vertices } => {
                let mut lo = [f64::INFINITY; 2];
                let mut hi = [f64::NEG_INFINITY; 2];
                for v in vertices {
                    for k in 0..2 {
                        lo[k] = lo[k].min(v[k]);
                        hi[k] = hi[k].max(v[k]);
                    }
                }
                (lo, hi)
            }
            Shape::Ball { center, radius } => (
                [center[0] - radius, center[1] - radius],
                [center[0] + radius, center[1] + radius],
            ),
            Shape::Rounded { vertices, radius } => {
                let mut lo = [f64::INFINITY; 2];
                let mut hi = [f64::NEG_INFINITY; 2];
                for v in vertices {
                    for k in 0..2 {
                        lo[k] = lo[k].min(v[k] - radius);
                        hi[k] = hi[k].max(v[k] + radius);
                    }
                }
                (lo, hi)
            }
        }
    }

    /// For rounded bodies, a circumscribed convex polygon with `k` tangent
    /// segments per vertex arc (so `k` extra vertices per source vertex).
    /// Contains the exact body; other shapes are returned unchanged (boxes
    /// become their corner polygons).
    pub fn dilated_polygon_overapprox(&self, k: usize) -> ConvexDomain {
        let (vertices, radius) = match &self.shape {
            Shape::Rounded { vertices, radius } => (vertices.clone(), *radius),
            Shape::Box2 { min, max } => {
                return ConvexDomain {
                    shape: Shape::Polygon {
                        vertices: box_corners(*min, *max),
                    },
                    reference: self.reference,
                }
            }
            _ => return self.clone(),
        };
        assert!(k >= 1);
        let n = vertices.len();
        let mut out = Vec::with_capacity(n * (k + 1));
        for i in 0..n {
            let prev = vertices[(i + n - 1) % n];
            let v = vertices[i];
            let next = vertices[(i + 1) % n];
            // outward normals of the incident edges
            let out_normal = |a: Point, b: Point| {
                let e = sub(b, a);
                let l = norm(e);
                [e[1] / l, -e[0] / l]
            };
            let n0 = out_normal(prev, v);
            let n1 = out_normal(v, next);
            let a0 = n0[1].atan2(n0[0]);
            let mut span = n1[1].atan2(n1[0]) - a0;
            while span < 0.0 {
                span += 2.0 * std::f64::consts::PI;
            }
            let half = span / (2.0 * k as f64);
            let rr = radius / half.cos();
            for j in 0..k {
                let ang = a0 + (2 * j + 1) as f64 * half;
                out.push(add(v, [rr * ang.cos(), rr * ang.sin()]));
            }
            // tangent point on the second edge keeps the offset edge exact
            out.push(add(v, scale(n1, radius)));
        }
        ConvexDomain {
            shape: Shape::Polygon { vertices: out },
            reference: self.reference,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit_square() -> ConvexDomain {
        ConvexDomain::box2([0.0, 0.0], [1.0, 1.0]).unwrap()
    }

    fn unit_disk() -> ConvexDomain {
        ConvexDomain::ball([0.0, 0.0], 1.0).unwrap()
    }

    #[test]
    fn erode_examples() {
        let i = ConvexDomain::interval(0.0, 1.0).unwrap().erode(0.1).unwrap();
        assert_eq!(i.shape(), &Shape::Interval { a: 0.1, b: 0.9 });

        let s = unit_square().erode(0.25).unwrap();
        assert_eq!(
            s.shape(),
            &Shape::Box2 {
                min: [0.25, 0.25],
                max: [0.75, 0.75]
            }
        );

        let d = unit_disk().erode(0.3).unwrap();
        match d.shape() {
            Shape::Ball { radius, .. } => assert!((radius - 0.7).abs() < 1e-15),
            other => panic!("expected ball, got {other:?}"),
        }
    }

    #[test]
    fn erode_rejects_too_deep() {
        let e = unit_square().erode(0.5);
        assert!(matches!(e, Err(GeometryError::EmptyErosion { .. })));
        let e = ConvexDomain::interval(0.0, 1.0).unwrap().erode(0.6);
        assert!(matches!(e, Err(GeometryError::EmptyErosion { .. })));
    }

    #[test]
    fn dilate_examples() {
        let i = ConvexDomain::interval(0.0, 1.0).unwrap().dilate(0.1);
        match i.shape() {
            Shape::Interval { a, b } => {
                assert!((a + 0.1).abs() < 1e-15 && (b - 1.1).abs() < 1e-15)
            }
            other => panic!("{other:?}"),
        }

        // Steiner oracle: 1 + 4·0.1 + π·0.01
        let v = unit_square().dilate(0.1).volume();
        assert!((v - (1.0 + 0.4 + PI * 0.01)).abs() < 1e-12, "got {v}");

        let d = unit_disk().dilate(0.5);
        match d.shape() {
            Shape::Ball { radius, .. } => assert!((radius - 1.5).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn radii_examples() {
        let (r, big) = unit_disk().radii();
        assert!((r - 1.0).abs() < 1e-15 && (big - 1.0).abs() < 1e-15);

        let (r, big) = unit_square().radii();
        assert!((r - 0.5).abs() < 1e-15);
        assert!((big - 0.5f64.sqrt()).abs() < 1e-15);

        let dom = ConvexDomain::interval(0.0, 1.0)
            .unwrap()
            .with_reference([0.25, 0.0])
            .unwrap();
        let (r, big) = dom.radii();
        assert!((r - 0.25).abs() < 1e-15 && (big - 0.75).abs() < 1e-15);
    }

    #[test]
    fn radial_function_examples() {
        let disk = unit_disk();
        for ang in [0.0, 0.7, 2.1, 4.4] {
            let u = [f64::cos(ang), f64::sin(ang)];
            assert!((disk.radial_function(u) - 1.0).abs() < 1e-12);
        }
        let sq = unit_square();
        assert!((sq.radial_function([1.0, 0.0]) - 0.5).abs() < 1e-12);
        let s = 0.5f64.sqrt();
        assert!((sq.radial_function([s, s]) - s).abs() < 1e-12);
    }

    #[test]
    fn radial_function_is_continuous_on_square() {
        let sq = unit_square();
        let mut prev = sq.radial_function([1.0, 0.0]);
        for k in 1..=720 {
            let ang = 2.0 * PI * k as f64 / 720.0;
            let cur = sq.radial_function([ang.cos(), ang.sin()]);
            assert!((cur - prev).abs() < 0.02, "jump at {ang}");
            prev = cur;
        }
    }

    #[test]
    fn erosion_volume_bound_examples() {
        // unit disk, ε = 0.1: bound 2π·2·1·0.1, exact slice π(0.2 - 0.01)
        let disk = unit_disk();
        let bound = disk.erosion_volume_bound(0.1);
        assert!((bound - 2.0 * PI * 2.0 * 0.1).abs() < 1e-12);
        let slice = disk.erosion_slice_volume(0.1);
        assert!((slice - PI * (0.2 - 0.01)).abs() < 1e-12);
        assert!(slice <= bound);

        assert_eq!(disk.erosion_volume_bound(0.0), 0.0);
        assert_eq!(disk.erosion_slice_volume(0.0), 0.0);

        // interval with central reference: S_0 = 2, slice = 0.4 at ε = 0.2
        let iv = ConvexDomain::interval(0.0, 1.0).unwrap();
        assert!((iv.erosion_volume_bound(0.2) - 0.4).abs() < 1e-15);
        assert!((iv.erosion_slice_volume(0.2) - 0.4).abs() < 1e-12);
    }

    #[test]
    fn polygon_erode_dilate_volumes() {
        // a convex pentagon
        let poly = ConvexDomain::polygon(vec![
            [0.0, 0.0],
            [2.0, 0.0],
            [2.6, 1.2],
            [1.0, 2.0],
            [-0.4, 1.0],
        ])
        .unwrap();
        let a = poly.volume();
        assert!(a > 0.0);
        // erosion slice ≤ dilation slice for ε ≤ inradius
        let inr = poly.inradius();
        for k in 1..=8 {
            let eps = inr * k as f64 / 9.0;
            let ero = poly.erosion_slice_volume(eps);
            let dil = poly.dilation_slice_volume(eps);
            assert!(
                ero <= dil + 1e-10,
                "erosion slice {ero} > dilation slice {dil} at eps={eps}"
            );
            assert!(ero <= poly.erosion_volume_bound(eps) + 1e-10);
        }
        // dilation volume matches Steiner explicitly
        let eps = 0.3;
        let steiner = a + poly.boundary_measure() * eps + PI * eps * eps;
        assert!((poly.dilate(eps).volume() - steiner).abs() < 1e-10);
    }

    #[test]
    fn erosion_dilation_monotone_containment() {
        let poly = ConvexDomain::polygon(vec![
            [0.0, 0.0],
            [2.0, 0.0],
            [2.6, 1.2],
            [1.0, 2.0],
            [-0.4, 1.0],
        ])
        .unwrap();
        let small = poly.erode(0.2).unwrap();
        let smaller = poly.erode(0.4).unwrap();
        let big = poly.dilate(0.2);
        let bigger = poly.dilate(0.4);
        // containment sampled on a lattice
        for i in 0..30 {
            for j in 0..30 {
                let p = [-1.0 + 4.0 * i as f64 / 29.0, -1.0 + 4.0 * j as f64 / 29.0];
                if smaller.contains(p) {
                    assert!(small.contains(p));
                }
                if small.contains(p) {
                    assert!(poly.contains(p));
                }
                if poly.contains(p) {
                    assert!(big.contains(p));
                }
                if big.contains(p) {
                    assert!(bigger.contains(p));
                }
            }
        }
    }

    #[test]
    fn rounded_overapprox_contains_exact_body() {
        let sq = unit_square().dilate(0.25);
        let approx = sq.dilated_polygon_overapprox(8);
        // every point of the exact body is inside the approximation
        for i in 0..40 {
            for j in 0..40 {
                let p = [-0.4 + 1.8 * i as f64 / 39.0, -0.4 + 1.8 * j as f64 / 39.0];
                if sq.contains(p) {
                    assert!(approx.contains(p), "{p:?} escaped the overapproximation");
                }
            }
        }
        // and its area exceeds the exact Steiner area (circumscribed)
        assert!(approx.volume() >= sq.volume() - 1e-12);
    }

    #[test]
    fn polygon_validation() {
        assert!(ConvexDomain::polygon(vec![[0.0, 0.0], [1.0, 0.0]]).is_err());
        // collinear points
        assert!(
            ConvexDomain::polygon(vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [0.0, 1.0]]).is_err()
        );
        // clockwise input is normalized
        let p = ConvexDomain::polygon(vec![[0.0, 1.0], [1.0, 0.0], [0.0, 0.0]]).unwrap();
        assert!(p.volume() > 0.0);
    }

    #[test]
    fn reference_must_be_interior() {
        assert!(unit_square().with_reference([2.0, 0.5]).is_err());
        assert!(unit_square().with_reference([0.5, 0.5]).is_ok());
    }
}
