use serde::{Deserialize, Serialize};

use crate::{Domain, Error, Point, Result};

/// Uniform lattice `origin + h·(i, j, k)`; planar lattices have one layer in z.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    dim: usize,
    origin: [f64; 3],
    spacing: f64,
    extents: [usize; 3],
}

impl Lattice {
    pub fn new(dim: usize, origin: Point, spacing: f64, extents: [usize; 3]) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(Error::Configuration(format!("unsupported dimension {dim}")));
        }
        if !(spacing > 0.0) {
            return Err(Error::Parameter(format!("lattice spacing must be positive, got {spacing}")));
        }
        for a in 0..dim {
            if extents[a] < 2 {
                return Err(Error::Parameter("lattice needs at least 2 nodes per axis".into()));
            }
        }
        let mut extents = extents;
        let mut origin = [origin[0], origin[1], origin[2]];
        if dim == 2 {
            extents[2] = 1;
            origin[2] = 0.0;
        }
        Ok(Self {
            dim,
            origin,
            spacing,
            extents,
        })
    }

    /// Lattice over the bounding box of Ω̄_ε plus one ring of padding cells.
    pub fn covering(domain: &Domain, eps: f64, spacing: f64) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::Parameter(format!("eps must be positive, got {eps}")));
        }
        let dim = domain.dim();
        let (lo, hi) = domain.omega_bounds();
        let mut origin = Point::zeros();
        let mut extents = [1usize; 3];
        for a in 0..dim {
            origin[a] = lo[a] - eps - spacing;
            let span = hi[a] + eps + spacing - origin[a];
            extents[a] = (span / spacing - 1e-9).ceil() as usize + 1;
        }
        Self::new(dim, origin, spacing, extents)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn origin(&self) -> Point {
        Point::from(self.origin)
    }

    pub fn extents(&self) -> [usize; 3] {
        self.extents
    }

    pub fn len(&self) -> usize {
        self.extents.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Linear strides per axis.
    pub fn strides(&self) -> [usize; 3] {
        [1, self.extents[0], self.extents[0] * self.extents[1]]
    }

    pub fn index(&self, m: [usize; 3]) -> usize {
        m[0] + self.extents[0] * (m[1] + self.extents[1] * m[2])
    }

    pub fn multi_index(&self, idx: usize) -> [usize; 3] {
        let nx = self.extents[0];
        let ny = self.extents[1];
        [idx % nx, (idx / nx) % ny, idx / (nx * ny)]
    }

    pub fn node(&self, idx: usize) -> Point {
        let m = self.multi_index(idx);
        let mut p = Point::zeros();
        for a in 0..self.dim {
            p[a] = self.origin[a] + self.spacing * m[a] as f64;
        }
        p
    }

    /// Lower cell corner and fractional offsets of `x`, or a range error.
    pub fn locate(&self, x: &Point) -> Result<([usize; 3], [f64; 3])> {
        let mut cell = [0usize; 3];
        let mut frac = [0.0; 3];
        for a in 0..self.dim {
            let t = (x[a] - self.origin[a]) / self.spacing;
            let top = (self.extents[a] - 1) as f64;
            if !(t >= -1e-9 && t <= top + 1e-9) {
                return Err(Error::Range(format!(
                    "coordinate {} on axis {a} outside lattice [{}, {}]",
                    x[a],
                    self.origin[a],
                    self.origin[a] + top * self.spacing
                )));
            }
            let t = t.clamp(0.0, top);
            let i = (t.floor() as usize).min(self.extents[a] - 2);
            cell[a] = i;
            frac[a] = t - i as f64;
        }
        Ok((cell, frac))
    }
}

/// Node values of a candidate value function on a lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    lattice: Lattice,
    eps: f64,
    values: Vec<f64>,
}

impl GridField {
    pub fn new(lattice: Lattice, eps: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() != lattice.len() {
            return Err(Error::Parameter(format!(
                "field has {} values for {} nodes",
                values.len(),
                lattice.len()
            )));
        }
        Ok(Self {
            lattice,
            eps,
            values,
        })
    }

    pub fn from_fn(lattice: Lattice, eps: f64, f: impl Fn(&Point) -> f64) -> Self {
        let values = (0..lattice.len()).map(|i| f(&lattice.node(i))).collect();
        Self {
            lattice,
            eps,
            values,
        }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Multilinear interpolation from the 2ⁿ surrounding nodes.
    pub fn interpolate(&self, x: &Point) -> Result<f64> {
        let (cell, frac) = self.lattice.locate(x)?;
        let strides = self.lattice.strides();
        let base = self.lattice.index(cell);
        let corners = 1usize << self.lattice.dim;
        let mut acc = 0.0;
        for c in 0..corners {
            let mut w = 1.0;
            let mut off = 0;
            for a in 0..self.lattice.dim {
                if c >> a & 1 == 1 {
                    w *= frac[a];
                    off += strides[a];
                } else {
                    w *= 1.0 - frac[a];
                }
            }
            acc += w * self.values[base + off];
        }
        Ok(acc)
    }

    /// `max |a − b|` over nodes.
    pub fn sup_distance(&self, other: &GridField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point2;
    use proptest::prelude::*;

    fn unit_lattice() -> Lattice {
        Lattice::new(2, Point::zeros(), 1.0, [2, 2, 1]).unwrap()
    }

    #[test]
    fn bilinear_cell_center() {
        let f = GridField::new(unit_lattice(), 0.1, vec![0.0, 1.0, 1.0, 2.0]).unwrap();
        assert!((f.interpolate(&point2(0.5, 0.5)).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn node_query_returns_node_value() {
        let lat = Lattice::new(2, point2(-1.0, -1.0), 0.25, [9, 9, 1]).unwrap();
        let f = GridField::from_fn(lat, 0.1, |p| (3.0 * p[0]).sin() + p[1] * p[1]);
        for i in 0..lat.len() {
            assert_eq!(f.interpolate(&lat.node(i)).unwrap(), f.values()[i]);
        }
    }

    #[test]
    fn outside_lattice_is_range_error() {
        let f = GridField::new(unit_lattice(), 0.1, vec![0.0; 4]).unwrap();
        assert!(matches!(f.interpolate(&point2(1.5, 0.5)), Err(Error::Range(_))));
        assert!(matches!(f.interpolate(&point2(-0.1, 0.5)), Err(Error::Range(_))));
    }

    #[test]
    fn covering_lattice_contains_strip_box() {
        let d = Domain::disk([0.0, 0.0], 1.0).unwrap();
        let lat = Lattice::covering(&d, 0.1, 0.025).unwrap();
        let o = lat.origin();
        let far = lat.node(lat.len() - 1);
        assert!(o[0] <= -1.1 - 0.025 + 1e-12 && far[0] >= 1.1 + 0.025 - 1e-12);
        assert_eq!(lat.extents()[2], 1);
    }

    proptest! {
        #[test]
        fn affine_data_is_reproduced(
            a0 in -5.0f64..5.0, a1 in -5.0f64..5.0, a2 in -5.0f64..5.0, b in -5.0f64..5.0,
            x in 0.0f64..1.0, y in 0.0f64..1.0, z in 0.0f64..1.0,
        ) {
            let lat2 = Lattice::new(2, point2(-0.3, 0.2), 0.07, [15, 15, 1]).unwrap();
            let f2 = GridField::from_fn(lat2, 0.1, |p| a0 * p[0] + a1 * p[1] + b);
            let q = point2(-0.3 + 0.98 * x, 0.2 + 0.98 * y);
            prop_assert!((f2.interpolate(&q).unwrap() - (a0 * q[0] + a1 * q[1] + b)).abs() < 1e-12);

            let lat3 = Lattice::new(3, Point::new(0.0, -0.5, 0.1), 0.1, [6, 6, 6]).unwrap();
            let f3 = GridField::from_fn(lat3, 0.1, |p| a0 * p[0] + a1 * p[1] + a2 * p[2] + b);
            let q = Point::new(0.5 * x, -0.5 + 0.5 * y, 0.1 + 0.5 * z);
            let exact = a0 * q[0] + a1 * q[1] + a2 * q[2] + b;
            prop_assert!((f3.interpolate(&q).unwrap() - exact).abs() < 1e-12);
        }
    }
}
