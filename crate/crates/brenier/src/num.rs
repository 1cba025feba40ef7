//! Small numeric helpers shared across modules: 2-vectors, compensated
//! summation, unit sphere/ball constants.

/// A point of ℝ^d for d ∈ {1, 2}. One-dimensional data stores `y = 0`.
pub type Point = [f64; 2];

pub fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

pub fn add(a: Point, b: Point) -> Point {
    [a[0] + b[0], a[1] + b[1]]
}

pub fn scale(a: Point, s: f64) -> Point {
    [a[0] * s, a[1] * s]
}

pub fn norm(a: Point) -> f64 {
    a[0].hypot(a[1])
}

pub fn dist(a: Point, b: Point) -> f64 {
    norm(sub(a, b))
}

/// Cross product z-component of 2-vectors; twice the signed triangle area.
pub fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Kahan–Babuška compensated accumulator. Reductions that feed reports use
/// it so that per-run totals are stable to ~1e-12 regardless of magnitude
/// spread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of an iterator.
pub fn ksum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = Kahan::new();
    for v in values {
        acc.add(v);
    }
    acc.total()
}

/// Volume of the unit ball of ℝ^d (V_0 = 1, V_1 = 2, V_2 = π, ...),
/// via the recurrence V_d = 2π V_{d-2} / d.
pub fn unit_ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI * unit_ball_volume(d - 2) / d as f64,
    }
}

/// Surface area of the unit sphere S^{d-1} ⊂ ℝ^d (S_0 = 2, S_1 = 2π, ...).
/// `d` is the ambient dimension; S^{d-1} = ∂B^d, so S_{d-1} = d·V_d.
pub fn unit_sphere_area(d: usize) -> f64 {
    assert!(d >= 1, "sphere S^{{d-1}} needs ambient dimension d >= 1");
    d as f64 * unit_ball_volume(d)
}
