use nalgebra::{Matrix2, Vector2};

use crate::dpp::reference_frame;
use crate::{Error, Point, Result};

/// Symmetric quadrature for the normalized average over the unit
/// (n−1)-ball orthogonal to e₁.
///
/// Nodes come in exact ± pairs, so odd integrands average to zero, and the
/// weights carry a quadratic correction `a + b|y|²` that makes the second
/// moment equal `(n−1)/(n+1)`, the exact mean of `|y|²` over the ball.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskQuadrature {
    dim: usize,
    nodes: Vec<Point>,
    weights: Vec<f64>,
}

impl DiskQuadrature {
    /// n = 2: `size` midpoints on the segment [−1, 1] along e₂.
    /// n = 3: `size/4` equal-area rings times `size` angles in the (e₂, e₃) plane.
    pub fn new(dim: usize, size: usize) -> Result<Self> {
        let half: Vec<Point> = match dim {
            2 => {
                if size < 2 || size % 2 != 0 {
                    return Err(Error::Configuration(format!(
                        "planar disk rule needs an even size >= 2, got {size}"
                    )));
                }
                (0..size / 2)
                    .map(|i| Point::new(0.0, -1.0 + (2 * i + 1) as f64 / size as f64, 0.0))
                    .collect()
            }
            3 => {
                if size < 4 || size % 4 != 0 {
                    return Err(Error::Configuration(format!(
                        "ring rule needs a size divisible by 4, got {size}"
                    )));
                }
                let rings = size / 4;
                let angles = size;
                let mut v = Vec::with_capacity(rings * angles / 2);
                for j in 0..rings {
                    let r = ((j as f64 + 0.5) / rings as f64).sqrt();
                    let shift = if j % 2 == 1 { 0.5 } else { 0.0 };
                    for k in 0..angles / 2 {
                        let t = std::f64::consts::TAU * (k as f64 + shift) / angles as f64;
                        v.push(Point::new(0.0, r * t.cos(), r * t.sin()));
                    }
                }
                v
            }
            _ => return Err(Error::Configuration(format!("unsupported dimension {dim}"))),
        };
        let mut nodes = half.clone();
        nodes.extend(half.iter().map(|y| -y));
        let weights = calibrate(&nodes, dim)?;
        Ok(Self {
            dim,
            nodes,
            weights,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Target second moment `(n−1)/(n+1)`.
    pub fn second_moment_target(&self) -> f64 {
        (self.dim as f64 - 1.0) / (self.dim as f64 + 1.0)
    }

    pub fn second_moment(&self) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(y, w)| w * y.norm_squared())
            .sum()
    }

    /// World-frame offsets `ε R(ν) yᵢ` with their weights.
    pub fn offsets(&self, nu: &Point, eps: f64) -> Vec<(Point, f64)> {
        let frame = reference_frame(nu);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(y, &w)| (eps * (frame * y), w))
            .collect()
    }

    /// `⨍_{B_ε^ν} f(x + h) dh` by quadrature.
    pub fn average<F>(&self, mut f: F, x: &Point, nu: &Point, eps: f64) -> Result<f64>
    where
        F: FnMut(&Point) -> Result<f64>,
    {
        let frame = reference_frame(nu);
        let mut acc = 0.0;
        for (y, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(&(x + eps * (frame * y)))?;
        }
        Ok(acc)
    }
}

fn calibrate(nodes: &[Point], dim: usize) -> Result<Vec<f64>> {
    let target = (dim as f64 - 1.0) / (dim as f64 + 1.0);
    let n = nodes.len() as f64;
    let s2: f64 = nodes.iter().map(|y| y.norm_squared()).sum();
    let s4: f64 = nodes.iter().map(|y| y.norm_squared().powi(2)).sum();
    let m = Matrix2::new(n, s2, s2, s4);
    let coef = m
        .lu()
        .solve(&Vector2::new(1.0, target))
        .ok_or_else(|| Error::Configuration("singular quadrature calibration".into()))?;
    let weights: Vec<f64> = nodes
        .iter()
        .map(|y| coef[0] + coef[1] * y.norm_squared())
        .collect();
    if weights.iter().any(|&w| !(w > 0.0)) {
        return Err(Error::Configuration(
            "quadrature calibration produced a non-positive weight".into(),
        ));
    }
    Ok(weights)
}
