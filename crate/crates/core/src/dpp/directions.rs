use nalgebra::Matrix3;

use crate::{Error, Point, Result};

/// Finite, antipodally closed set of unit directions: index `i` and
/// `i + len/2` are exact negatives of each other.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionSet {
    dim: usize,
    directions: Vec<Point>,
}

impl DirectionSet {
    /// `m` equally spaced angles in the plane (`m` even, ≥ 2).
    pub fn planar(m: usize) -> Result<Self> {
        check_even(m)?;
        let half: Vec<Point> = (0..m / 2)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / m as f64;
                Point::new(t.cos(), t.sin(), 0.0)
            })
            .collect();
        Ok(Self::close(2, half))
    }

    /// `m/2` Fibonacci points on the upper hemisphere plus their antipodes.
    pub fn spherical(m: usize) -> Result<Self> {
        check_even(m)?;
        let h = m / 2;
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        let half: Vec<Point> = (0..h)
            .map(|k| {
                let z = (k as f64 + 0.5) / h as f64;
                let rho = (1.0 - z * z).sqrt();
                let phi = golden * k as f64;
                Point::new(rho * phi.cos(), rho * phi.sin(), z).normalize()
            })
            .collect();
        Ok(Self::close(3, half))
    }

    pub fn for_dim(dim: usize, m: usize) -> Result<Self> {
        match dim {
            2 => Self::planar(m),
            3 => Self::spherical(m),
            _ => Err(Error::Configuration(format!("unsupported dimension {dim}"))),
        }
    }

    fn close(dim: usize, half: Vec<Point>) -> Self {
        let mut directions = half.clone();
        directions.extend(half.iter().map(|v| -v));
        Self { dim, directions }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn directions(&self) -> &[Point] {
        &self.directions
    }

    pub fn get(&self, i: usize) -> Point {
        self.directions[i]
    }

    pub fn antipode(&self, i: usize) -> usize {
        let h = self.directions.len() / 2;
        (i + h) % self.directions.len()
    }

    pub fn antipodal_closure(&self) -> bool {
        let h = self.directions.len() / 2;
        self.directions.len() % 2 == 0
            && (0..h).all(|i| self.directions[i + h] == -self.directions[i])
    }
}

fn check_even(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::Configuration("direction set is empty".into()));
    }
    if m % 2 != 0 {
        return Err(Error::Configuration(format!(
            "direction count must be even for antipodal closure, got {m}"
        )));
    }
    Ok(())
}

/// Orthogonal map sending e₁ to `nu`: the negated Householder reflection
/// across (e₁ + ν)⊥, with a fixed half-turn about e₂ when ν = −e₁.
pub fn reference_frame(nu: &Point) -> Matrix3<f64> {
    // 1 + ν₁ suffers cancellation near −e₁; use (ν₂² + ν₃²)/(1 − ν₁) there.
    let lead = if nu[0] < 0.0 {
        (nu[1] * nu[1] + nu[2] * nu[2]) / (1.0 - nu[0])
    } else {
        1.0 + nu[0]
    };
    let w = Point::new(lead, nu[1], nu[2]);
    let w2 = w.norm_squared();
    if w2 < 1e-24 {
        return Matrix3::new(-1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -1.0);
    }
    -(Matrix3::identity() - (2.0 / w2) * w * w.transpose())
}
