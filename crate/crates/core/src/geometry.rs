//! Domain Ω, its ε-strips, the boundary cut-off δ, the exponent field p(x)
//! with the derived probabilities α(x), β(x), and the boundary payoff F.

use std::fmt;
use std::sync::Arc;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type Point = Vector3<f64>;

pub fn point2(x: f64, y: f64) -> Point {
    Point::new(x, y, 0.0)
}

pub fn point3(x: f64, y: f64, z: f64) -> Point {
    Point::new(x, y, z)
}

/// Position of a point relative to Ω and the two ε-strips.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    /// Ω ∖ I_ε: at distance ≥ ε from ∂Ω.
    Interior,
    /// I_ε: inside Ω, closer than ε to ∂Ω.
    InnerStrip,
    /// Ō_ε: outside Ω (or on ∂Ω), within ε of ∂Ω.
    OuterStrip,
    /// Beyond Ω̄_ε.
    Outside,
}

impl Region {
    /// Classification from a signed distance (negative inside Ω).
    pub fn from_signed_distance(sd: f64, eps: f64) -> Region {
        if sd < 0.0 {
            if -sd >= eps {
                Region::Interior
            } else {
                Region::InnerStrip
            }
        } else if sd <= eps {
            Region::OuterStrip
        } else {
            Region::Outside
        }
    }

    /// Nodes where the operator is computed rather than pinned to F.
    pub fn is_computed(self) -> bool {
        matches!(self, Region::Interior | Region::InnerStrip)
    }

    pub fn tag(self) -> &'static str {
        match self {
            Region::Interior => "interior",
            Region::InnerStrip => "inner_strip",
            Region::OuterStrip => "outer_strip",
            Region::Outside => "outside",
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Ball { center: Point, radius: f64 },
    /// `inner < |x - center| < outer`
    Shell { center: Point, inner: f64, outer: f64 },
    Cuboid { min: Point, max: Point },
    /// Simple planar polygon, counter-clockwise or clockwise.
    Polygon { vertices: Vec<[f64; 2]> },
}

/// A bounded domain described by an exact signed distance.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    shape: Shape,
    dim: usize,
}

/// Exterior ball `B_{s r}(z) ⊂ B_r(y) ∖ Ω` at a boundary point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExteriorBall {
    pub z: Point,
    pub radius: f64,
    pub s: f64,
    pub r0: f64,
}

impl Domain {
    pub fn disk(center: [f64; 2], radius: f64) -> Result<Self> {
        positive("radius", radius)?;
        Ok(Self {
            shape: Shape::Ball {
                center: point2(center[0], center[1]),
                radius,
            },
            dim: 2,
        })
    }

    pub fn ball(center: [f64; 3], radius: f64) -> Result<Self> {
        positive("radius", radius)?;
        Ok(Self {
            shape: Shape::Ball {
                center: Point::from(center),
                radius,
            },
            dim: 3,
        })
    }

    pub fn annulus(center: [f64; 2], inner: f64, outer: f64) -> Result<Self> {
        positive("inner radius", inner)?;
        if !(outer > inner) {
            return Err(Error::Geometry(format!(
                "annulus needs outer > inner, got {outer} <= {inner}"
            )));
        }
        Ok(Self {
            shape: Shape::Shell {
                center: point2(center[0], center[1]),
                inner,
                outer,
            },
            dim: 2,
        })
    }

    pub fn rectangle(min: [f64; 2], max: [f64; 2]) -> Result<Self> {
        Self::cuboid_checked(point2(min[0], min[1]), point2(max[0], max[1]), 2)
    }

    pub fn cube(min: [f64; 3], max: [f64; 3]) -> Result<Self> {
        Self::cuboid_checked(Point::from(min), Point::from(max), 3)
    }

    fn cuboid_checked(min: Point, max: Point, dim: usize) -> Result<Self> {
        for a in 0..dim {
            if !(max[a] > min[a]) {
                return Err(Error::Geometry(format!("box has empty extent on axis {a}")));
            }
        }
        Ok(Self {
            shape: Shape::Cuboid { min, max },
            dim,
        })
    }

    pub fn polygon(vertices: Vec<[f64; 2]>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::Geometry("polygon needs at least 3 vertices".into()));
        }
        if shoelace(&vertices).abs() < 1e-14 {
            return Err(Error::Geometry("polygon has zero area".into()));
        }
        Ok(Self {
            shape: Shape::Polygon { vertices },
            dim: 2,
        })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Negative inside Ω, positive outside, zero on ∂Ω; 1-Lipschitz.
    pub fn signed_distance(&self, x: &Point) -> f64 {
        match &self.shape {
            Shape::Ball { center, radius } => (x - center).norm() - radius,
            Shape::Shell {
                center,
                inner,
                outer,
            } => {
                let d = (x - center).norm();
                (inner - d).max(d - outer)
            }
            Shape::Cuboid { min, max } => {
                let mut outside = 0.0;
                let mut inside = f64::NEG_INFINITY;
                for a in 0..self.dim {
                    let c = 0.5 * (min[a] + max[a]);
                    let half = 0.5 * (max[a] - min[a]);
                    let q = (x[a] - c).abs() - half;
                    outside += q.max(0.0).powi(2);
                    inside = inside.max(q);
                }
                outside.sqrt() + inside.min(0.0)
            }
            Shape::Polygon { vertices } => {
                let p = [x[0], x[1]];
                let mut d2 = f64::INFINITY;
                let mut inside = false;
                let n = vertices.len();
                for i in 0..n {
                    let a = vertices[i];
                    let b = vertices[(i + 1) % n];
                    d2 = d2.min(segment_distance_sq(p, a, b));
                    if (a[1] > p[1]) != (b[1] > p[1]) {
                        let t = (p[1] - a[1]) / (b[1] - a[1]);
                        if p[0] < a[0] + t * (b[0] - a[0]) {
                            inside = !inside;
                        }
                    }
                }
                if inside {
                    -d2.sqrt()
                } else {
                    d2.sqrt()
                }
            }
        }
    }

    /// Axis-aligned bounds of Ω itself.
    pub fn omega_bounds(&self) -> (Point, Point) {
        match &self.shape {
            Shape::Ball { center, radius } => (
                center - self.fill(*radius),
                center + self.fill(*radius),
            ),
            Shape::Shell { center, outer, .. } => {
                (center - self.fill(*outer), center + self.fill(*outer))
            }
            Shape::Cuboid { min, max } => (*min, *max),
            Shape::Polygon { vertices } => {
                let mut lo = point2(f64::INFINITY, f64::INFINITY);
                let mut hi = point2(f64::NEG_INFINITY, f64::NEG_INFINITY);
                for v in vertices {
                    for a in 0..2 {
                        lo[a] = lo[a].min(v[a]);
                        hi[a] = hi[a].max(v[a]);
                    }
                }
                (lo, hi)
            }
        }
    }

    /// Box containing Ω̄_1, the widest strip any admissible ε uses.
    pub fn bounding_box(&self) -> (Point, Point) {
        let (lo, hi) = self.omega_bounds();
        (lo - self.fill(1.0), hi + self.fill(1.0))
    }

    fn fill(&self, v: f64) -> Point {
        let mut p = Point::zeros();
        for a in 0..self.dim {
            p[a] = v;
        }
        p
    }

    pub fn in_bounding_box(&self, x: &Point) -> bool {
        let (lo, hi) = self.bounding_box();
        (0..3).all(|a| {
            if a < self.dim {
                x[a] >= lo[a] && x[a] <= hi[a]
            } else {
                x[a] == 0.0
            }
        })
    }

    pub fn diameter(&self) -> f64 {
        match &self.shape {
            Shape::Ball { radius, .. } => 2.0 * radius,
            Shape::Shell { outer, .. } => 2.0 * outer,
            Shape::Cuboid { min, max } => (max - min).norm(),
            Shape::Polygon { vertices } => {
                let mut d: f64 = 0.0;
                for a in vertices {
                    for b in vertices {
                        d = d.max(((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt());
                    }
                }
                d
            }
        }
    }

    pub fn classify(&self, x: &Point, eps: f64) -> Result<Region> {
        positive("eps", eps)?;
        if !self.in_bounding_box(x) {
            return Err(Error::Domain(format!(
                "point {:?} outside the bounding box",
                &x.as_slice()[..self.dim]
            )));
        }
        Ok(Region::from_signed_distance(self.signed_distance(x), eps))
    }

    /// The boundary cut-off δ on Ω̄_ε.
    pub fn cutoff(&self, x: &Point, eps: f64) -> Result<f64> {
        let sd = self.signed_distance(x);
        positive("eps", eps)?;
        cutoff_from_signed_distance(sd, eps).ok_or_else(|| {
            Error::Domain(format!(
                "δ is undefined outside Ω̄_ε (signed distance {sd} > ε = {eps})"
            ))
        })
    }

    /// Data for the exterior-ball boundary regularity condition at `y ∈ ∂Ω`.
    pub fn exterior_ball(&self, y: &Point, r: f64) -> Result<ExteriorBall> {
        positive("r", r)?;
        let sd = self.signed_distance(y);
        if sd.abs() > 1e-9 {
            return Err(Error::Geometry(format!(
                "point is not on ∂Ω (signed distance {sd})"
            )));
        }
        let r0 = self.exterior_r0();
        if r > r0 {
            return Err(Error::Parameter(format!("r = {r} exceeds r0 = {r0}")));
        }
        match &self.shape {
            Shape::Ball { center, .. } => {
                let n = (y - center).normalize();
                Ok(ExteriorBall {
                    z: y + 0.5 * r * n,
                    radius: 0.5 * r,
                    s: 0.5,
                    r0,
                })
            }
            Shape::Shell {
                center,
                inner,
                outer,
            } => {
                let d = (y - center).norm();
                let radial = (y - center) / d;
                // Outer circle: ball pushed outwards; inner circle: ball inside the hole.
                let n = if (d - outer).abs() < (d - inner).abs() {
                    radial
                } else {
                    -radial
                };
                Ok(ExteriorBall {
                    z: y + 0.5 * r * n,
                    radius: 0.5 * r,
                    s: 0.5,
                    r0,
                })
            }
            Shape::Cuboid { .. } | Shape::Polygon { .. } => {
                let normals = self.supporting_normals(y)?;
                let s = self.convex_s();
                let mut b: Point = normals.iter().sum();
                b /= b.norm();
                let c = normals
                    .iter()
                    .map(|n| n.dot(&b))
                    .fold(f64::INFINITY, f64::min);
                Ok(ExteriorBall {
                    z: y + (s * r / c) * b,
                    radius: s * r,
                    s,
                    r0,
                })
            }
        }
    }

    fn exterior_r0(&self) -> f64 {
        match &self.shape {
            Shape::Shell { inner, .. } => inner.min(0.5),
            _ => 0.5,
        }
    }

    // Worst corner: s = c/(1+c) with c the cosine between the corner bisector
    // and the face normals.
    fn convex_s(&self) -> f64 {
        match &self.shape {
            Shape::Cuboid { .. } => {
                let c = 1.0 / (self.dim as f64).sqrt();
                c / (1.0 + c)
            }
            Shape::Polygon { vertices } => {
                let n = vertices.len();
                let normals = polygon_normals(vertices);
                let mut cmin: f64 = 1.0;
                for i in 0..n {
                    let a = normals[(i + n - 1) % n];
                    let b = normals[i];
                    let bis = (a + b).normalize();
                    cmin = cmin.min(bis.dot(&a));
                }
                cmin / (1.0 + cmin)
            }
            _ => 0.5,
        }
    }

    fn supporting_normals(&self, y: &Point) -> Result<Vec<Point>> {
        const TOUCH: f64 = 1e-9;
        match &self.shape {
            Shape::Cuboid { min, max } => {
                let mut out = Vec::new();
                for a in 0..self.dim {
                    let mut e = Point::zeros();
                    if (y[a] - max[a]).abs() < TOUCH {
                        e[a] = 1.0;
                        out.push(e);
                    } else if (y[a] - min[a]).abs() < TOUCH {
                        e[a] = -1.0;
                        out.push(e);
                    }
                }
                Ok(out)
            }
            Shape::Polygon { vertices } => {
                if !is_convex(vertices) {
                    return Err(Error::Geometry(
                        "exterior-ball data is only available for convex polygons".into(),
                    ));
                }
                let normals = polygon_normals(vertices);
                let n = vertices.len();
                let p = [y[0], y[1]];
                let out: Vec<Point> = (0..n)
                    .filter(|&i| segment_distance_sq(p, vertices[i], vertices[(i + 1) % n]) < TOUCH * TOUCH)
                    .map(|i| normals[i])
                    .collect();
                if out.is_empty() {
                    return Err(Error::Geometry("no polygon edge touches the point".into()));
                }
                Ok(out)
            }
            _ => unreachable!("smooth shapes use their radial normal"),
        }
    }
}

/// δ from a signed distance; `None` beyond Ω̄_ε.
pub fn cutoff_from_signed_distance(sd: f64, eps: f64) -> Option<f64> {
    match Region::from_signed_distance(sd, eps) {
        Region::Interior => Some(0.0),
        Region::InnerStrip => Some(1.0 + sd / eps),
        Region::OuterStrip => Some(1.0),
        Region::Outside => None,
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} must be positive and finite, got {v}")))
    }
}

fn shoelace(v: &[[f64; 2]]) -> f64 {
    let n = v.len();
    (0..n)
        .map(|i| {
            let a = v[i];
            let b = v[(i + 1) % n];
            a[0] * b[1] - b[0] * a[1]
        })
        .sum::<f64>()
        * 0.5
}

fn polygon_normals(v: &[[f64; 2]]) -> Vec<Point> {
    let orient = shoelace(v).signum();
    let n = v.len();
    (0..n)
        .map(|i| {
            let a = v[i];
            let b = v[(i + 1) % n];
            let e = point2(b[0] - a[0], b[1] - a[1]);
            // Outward normal of a counter-clockwise edge is (dy, -dx).
            point2(e[1], -e[0]).normalize() * orient
        })
        .collect()
}

fn is_convex(v: &[[f64; 2]]) -> bool {
    let n = v.len();
    let mut sign = 0.0;
    for i in 0..n {
        let a = v[i];
        let b = v[(i + 1) % n];
        let c = v[(i + 2) % n];
        let cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
        if cross.abs() < 1e-14 {
            continue;
        }
        if sign == 0.0 {
            sign = cross.signum();
        } else if cross.signum() != sign {
            return false;
        }
    }
    true
}

fn segment_distance_sq(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 > 0.0 {
        ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let d = [ap[0] - t * ab[0], ap[1] - t * ab[1]];
    d[0] * d[0] + d[1] * d[1]
}

pub type ScalarFn = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum ExponentKind {
    Constant(f64),
    /// `base + ⟨gradient, x⟩`
    Linear { base: f64, gradient: Point },
    /// Interpolates `p_center` at `center` to `p_edge` at distance `radius`,
    /// constant beyond.
    Radial {
        center: Point,
        p_center: f64,
        p_edge: f64,
        radius: f64,
    },
    /// `base + coef · x[axis]²`
    AxisQuadratic { base: f64, coef: f64, axis: usize },
    Custom(ScalarFn),
}

impl fmt::Debug for ExponentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExponentKind::Constant(p) => write!(f, "Constant({p})"),
            ExponentKind::Linear { base, gradient } => {
                write!(f, "Linear {{ base: {base}, gradient: {:?} }}", gradient.as_slice())
            }
            ExponentKind::Radial {
                center,
                p_center,
                p_edge,
                radius,
            } => write!(
                f,
                "Radial {{ center: {:?}, p_center: {p_center}, p_edge: {p_edge}, radius: {radius} }}",
                center.as_slice()
            ),
            ExponentKind::AxisQuadratic { base, coef, axis } => {
                write!(f, "AxisQuadratic {{ base: {base}, coef: {coef}, axis: {axis} }}")
            }
            ExponentKind::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// The variable exponent p(x), clipped to `[p_min, p_max]` with `1 < p_min`.
#[derive(Debug, Clone)]
pub struct ExponentField {
    kind: ExponentKind,
    p_min: f64,
    p_max: f64,
}

impl ExponentField {
    pub fn new(kind: ExponentKind, p_min: f64, p_max: f64) -> Result<Self> {
        if !(p_min > 1.0) {
            return Err(Error::InvalidExponent(format!(
                "p_min must exceed 1, got {p_min}"
            )));
        }
        if !p_max.is_finite() {
            return Err(Error::InvalidExponent(format!("p_max must be finite, got {p_max}")));
        }
        if p_max < p_min {
            return Err(Error::InvalidExponent(format!(
                "p_max = {p_max} below p_min = {p_min}"
            )));
        }
        Ok(Self { kind, p_min, p_max })
    }

    pub fn constant(p: f64) -> Result<Self> {
        Self::new(ExponentKind::Constant(p), p, p)
    }

    pub fn radial(center: Point, p_center: f64, p_edge: f64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Parameter("radial exponent needs radius > 0".into()));
        }
        Self::new(
            ExponentKind::Radial {
                center,
                p_center,
                p_edge,
                radius,
            },
            p_center.min(p_edge),
            p_center.max(p_edge),
        )
    }

    pub fn kind(&self) -> &ExponentKind {
        &self.kind
    }

    pub fn p_min(&self) -> f64 {
        self.p_min
    }

    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    pub fn p(&self, x: &Point) -> f64 {
        let raw = match &self.kind {
            ExponentKind::Constant(p) => *p,
            ExponentKind::Linear { base, gradient } => base + gradient.dot(x),
            ExponentKind::Radial {
                center,
                p_center,
                p_edge,
                radius,
            } => {
                let t = ((x - center).norm() / radius).min(1.0);
                p_center + (p_edge - p_center) * t
            }
            ExponentKind::AxisQuadratic { base, coef, axis } => base + coef * x[*axis] * x[*axis],
            ExponentKind::Custom(f) => f(x),
        };
        raw.clamp(self.p_min, self.p_max)
    }

    /// `(α(x), β(x))` with α = (p−1)/(p+n) and β = 1 − α.
    pub fn alpha_beta(&self, x: &Point, n: usize) -> Result<(f64, f64)> {
        alpha_beta_of(self.p(x), n)
    }

    pub fn alpha_min(&self, n: usize) -> f64 {
        alpha_of(self.p_min, n)
    }

    pub fn alpha_max(&self, n: usize) -> f64 {
        alpha_of(self.p_max, n)
    }

    pub fn beta_min(&self, n: usize) -> f64 {
        1.0 - self.alpha_max(n)
    }

    /// Largest admissible Hölder exponent bound `α_min / α_max`.
    pub fn alpha_ratio(&self, n: usize) -> f64 {
        self.alpha_min(n) / self.alpha_max(n)
    }
}

fn alpha_of(p: f64, n: usize) -> f64 {
    (p - 1.0) / (p + n as f64)
}

/// α and β for a raw exponent value.
pub fn alpha_beta_of(p: f64, n: usize) -> Result<(f64, f64)> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::InvalidExponent(format!("p(x) = {p} must lie in (1, ∞)")));
    }
    let alpha = alpha_of(p, n);
    Ok((alpha, 1.0 - alpha))
}

#[derive(Clone)]
pub enum BoundaryKind {
    Constant(f64),
    /// `⟨gradient, x⟩ + offset`
    Affine { gradient: Point, offset: f64 },
    /// `scale · x₁ x₂`
    Product { scale: f64 },
    /// `scale · |x − center|^exponent + offset`
    RadialPower {
        center: Point,
        exponent: f64,
        scale: f64,
        offset: f64,
    },
    /// `Σ amplitude · cos(⟨frequency, x⟩ + phase)`
    Fourier(Vec<FourierMode>),
    Custom(ScalarFn),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierMode {
    pub frequency: Point,
    pub amplitude: f64,
    pub phase: f64,
}

impl fmt::Debug for BoundaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryKind::Constant(c) => write!(f, "Constant({c})"),
            BoundaryKind::Affine { gradient, offset } => {
                write!(f, "Affine {{ gradient: {:?}, offset: {offset} }}", gradient.as_slice())
            }
            BoundaryKind::Product { scale } => write!(f, "Product {{ scale: {scale} }}"),
            BoundaryKind::RadialPower {
                center,
                exponent,
                scale,
                offset,
            } => write!(
                f,
                "RadialPower {{ center: {:?}, exponent: {exponent}, scale: {scale}, offset: {offset} }}",
                center.as_slice()
            ),
            BoundaryKind::Fourier(m) => write!(f, "Fourier({} modes)", m.len()),
            BoundaryKind::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// Payoff F, given on all of ℝⁿ and used on the strip Γ_{ε,ε}.
#[derive(Debug, Clone)]
pub struct BoundaryData {
    kind: BoundaryKind,
    lipschitz: Option<f64>,
}

impl BoundaryData {
    pub fn new(kind: BoundaryKind) -> Self {
        Self {
            kind,
            lipschitz: None,
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(BoundaryKind::Constant(c))
    }

    pub fn affine(gradient: Point, offset: f64) -> Self {
        Self {
            lipschitz: Some(gradient.norm()),
            kind: BoundaryKind::Affine { gradient, offset },
        }
    }

    pub fn product(scale: f64) -> Self {
        Self::new(BoundaryKind::Product { scale })
    }

    pub fn radial_power(center: Point, exponent: f64) -> Self {
        Self::new(BoundaryKind::RadialPower {
            center,
            exponent,
            scale: 1.0,
            offset: 0.0,
        })
    }

    pub fn from_fn(f: impl Fn(&Point) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(BoundaryKind::Custom(Arc::new(f)))
    }

    /// A smooth pseudo-random trigonometric polynomial with `modes` terms,
    /// frequencies up to `max_frequency`, total amplitude at most 1.
    pub fn random_fourier(seed: u64, modes: usize, max_frequency: f64, dim: usize) -> Self {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut terms = Vec::with_capacity(modes);
        for _ in 0..modes {
            let mut frequency = Point::zeros();
            for a in 0..dim {
                frequency[a] = rng.gen_range(-max_frequency..=max_frequency);
            }
            terms.push(FourierMode {
                frequency,
                amplitude: rng.gen_range(-1.0..=1.0) / modes as f64,
                phase: rng.gen_range(0.0..std::f64::consts::TAU),
            });
        }
        Self::new(BoundaryKind::Fourier(terms))
    }

    pub fn with_lipschitz(mut self, l: f64) -> Self {
        self.lipschitz = Some(l);
        self
    }

    pub fn lipschitz(&self) -> Option<f64> {
        self.lipschitz
    }

    pub fn kind(&self) -> &BoundaryKind {
        &self.kind
    }

    pub fn eval(&self, x: &Point) -> f64 {
        match &self.kind {
            BoundaryKind::Constant(c) => *c,
            BoundaryKind::Affine { gradient, offset } => gradient.dot(x) + offset,
            BoundaryKind::Product { scale } => scale * x[0] * x[1],
            BoundaryKind::RadialPower {
                center,
                exponent,
                scale,
                offset,
            } => scale * (x - center).norm().powf(*exponent) + offset,
            BoundaryKind::Fourier(modes) => modes
                .iter()
                .map(|m| m.amplitude * (m.frequency.dot(x) + m.phase).cos())
                .sum(),
            BoundaryKind::Custom(f) => f(x),
        }
    }
}
