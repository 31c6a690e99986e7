use nalgebra::{DMatrix, Matrix3};
use serde::{Deserialize, Serialize};

use crate::{Error, Point, Result};

/// Gradients at or below this norm count as critical points.
pub const CRITICAL_GRADIENT: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Gradient,
    CriticalMin,
    CriticalMax,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViscosityResidual {
    pub value: f64,
    pub branch: Branch,
}

/// The normalized p(x)-Laplacian of a test function at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PxLaplacian {
    /// `tr D²φ + (p − 2)⟨D²φ ĝ, ĝ⟩`.
    Gradient(ViscosityResidual),
    /// `λ_min((p − 2)D²φ) + tr D²φ` and the λ_max counterpart.
    Critical {
        min: ViscosityResidual,
        max: ViscosityResidual,
    },
}

impl PxLaplacian {
    pub fn residuals(&self) -> Vec<ViscosityResidual> {
        match *self {
            PxLaplacian::Gradient(r) => vec![r],
            PxLaplacian::Critical { min, max } => vec![min, max],
        }
    }

    /// The gradient value, or the requested critical branch.
    pub fn value(&self, branch: Branch) -> f64 {
        match (*self, branch) {
            (PxLaplacian::Gradient(r), _) => r.value,
            (PxLaplacian::Critical { max, .. }, Branch::CriticalMax) => max.value,
            (PxLaplacian::Critical { min, .. }, _) => min.value,
        }
    }
}

pub fn px_laplacian(grad: &Point, hess: &Matrix3<f64>, p: f64, dim: usize) -> Result<PxLaplacian> {
    if !(2..=3).contains(&dim) {
        return Err(Error::Configuration(format!("unsupported dimension {dim}")));
    }
    let h = DMatrix::from_fn(dim, dim, |i, j| hess[(i, j)]);
    if (&h - h.transpose()).amax() > 1e-12 {
        return Err(Error::Parameter("Hessian is not symmetric".into()));
    }
    let trace = h.trace();
    let g = grad.rows(0, dim).into_owned();
    let gn = g.norm();
    if gn > CRITICAL_GRADIENT {
        let u = g / gn;
        let inf = (u.transpose() * &h * &u)[(0, 0)];
        return Ok(PxLaplacian::Gradient(ViscosityResidual {
            value: trace + (p - 2.0) * inf,
            branch: Branch::Gradient,
        }));
    }
    let eig = (h * (p - 2.0)).symmetric_eigenvalues();
    Ok(PxLaplacian::Critical {
        min: ViscosityResidual {
            value: eig.min() + trace,
            branch: Branch::CriticalMin,
        },
        max: ViscosityResidual {
            value: eig.max() + trace,
            branch: Branch::CriticalMax,
        },
    })
}
