use nalgebra::Matrix3;

use crate::dpp::DiskQuadrature;
use crate::{Point, Result};

/// A smooth function with analytic first and second derivatives.
pub trait TestFunction: Send + Sync {
    fn value(&self, x: &Point) -> f64;
    fn gradient(&self, x: &Point) -> Point;
    fn hessian(&self, x: &Point) -> Matrix3<f64>;
}

/// `⟨a, y⟩ + b`.
#[derive(Debug, Clone, Copy)]
pub struct AffineFn {
    pub gradient: Point,
    pub offset: f64,
}

impl TestFunction for AffineFn {
    fn value(&self, x: &Point) -> f64 {
        self.gradient.dot(x) + self.offset
    }

    fn gradient(&self, _: &Point) -> Point {
        self.gradient
    }

    fn hessian(&self, _: &Point) -> Matrix3<f64> {
        Matrix3::zeros()
    }
}

/// `|y − c|²` restricted to the first `dim` coordinates.
#[derive(Debug, Clone, Copy)]
pub struct SquaredDistance {
    pub center: Point,
    pub dim: usize,
}

impl TestFunction for SquaredDistance {
    fn value(&self, x: &Point) -> f64 {
        (x - self.center).rows(0, self.dim).norm_squared()
    }

    fn gradient(&self, x: &Point) -> Point {
        let mut g = 2.0 * (x - self.center);
        for a in self.dim..3 {
            g[a] = 0.0;
        }
        g
    }

    fn hessian(&self, _: &Point) -> Matrix3<f64> {
        let mut h = Matrix3::zeros();
        for a in 0..self.dim {
            h[(a, a)] = 2.0;
        }
        h
    }
}

/// `exp(y₁)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExpFirst;

impl TestFunction for ExpFirst {
    fn value(&self, x: &Point) -> f64 {
        x[0].exp()
    }

    fn gradient(&self, x: &Point) -> Point {
        Point::new(x[0].exp(), 0.0, 0.0)
    }

    fn hessian(&self, x: &Point) -> Matrix3<f64> {
        let mut h = Matrix3::zeros();
        h[(0, 0)] = x[0].exp();
        h
    }
}

/// `|y − c|^k`, smooth away from `c`.
#[derive(Debug, Clone, Copy)]
pub struct RadialPowerFn {
    pub center: Point,
    pub exponent: f64,
}

impl RadialPowerFn {
    pub fn new(center: Point, exponent: f64) -> Self {
        Self { center, exponent }
    }
}

impl TestFunction for RadialPowerFn {
    fn value(&self, x: &Point) -> f64 {
        (x - self.center).norm().powf(self.exponent)
    }

    fn gradient(&self, x: &Point) -> Point {
        let d = x - self.center;
        let r = d.norm();
        self.exponent * r.powf(self.exponent - 2.0) * d
    }

    fn hessian(&self, x: &Point) -> Matrix3<f64> {
        let d = x - self.center;
        let r = d.norm();
        let k = self.exponent;
        k * r.powf(k - 2.0) * (Matrix3::identity() + (k - 2.0) / (r * r) * d * d.transpose())
    }
}

/// `(r₁, r₂)`: the gaps between the symmetric jump average and the disk average
/// and their second-order expansions with analytic derivatives.
pub fn taylor_residual(
    phi: &dyn TestFunction,
    x: &Point,
    eps: f64,
    nu: &Point,
    quad: &DiskQuadrature,
) -> Result<(f64, f64)> {
    let n = quad.dim();
    let h = phi.hessian(x);
    let fx = phi.value(x);
    let along = (h * nu).dot(nu);
    let jump = 0.5 * phi.value(&(x + eps * nu)) + 0.5 * phi.value(&(x - eps * nu));
    let r1 = (jump - fx - 0.5 * eps * eps * along).abs();
    let trace: f64 = (0..n).map(|a| h[(a, a)]).sum();
    let transverse = trace - along;
    let avg = quad.average(|p| Ok(phi.value(p)), x, nu, eps)?;
    let r2 = (avg - fx - eps * eps / (2.0 * (n as f64 + 1.0)) * transverse).abs();
    Ok((r1, r2))
}
