use serde::{Deserialize, Serialize};

use crate::dpp::{DirectionSet, DiskQuadrature, GridField, Scheme};
use crate::geometry::Region;
use crate::{Error, ExponentField, Point, Result};

/// `σ = 2(α_min − 1)/α_min`.
pub fn barrier_sigma(alpha_min: f64) -> f64 {
    2.0 * (alpha_min - 1.0) / alpha_min
}

/// `θ = (s^σ − 2^σ)/(s^σ − 4^σ)`.
pub fn barrier_theta(s: f64, sigma: f64) -> f64 {
    (s.powf(sigma) - 2f64.powf(sigma)) / (s.powf(sigma) - 4f64.powf(sigma))
}

/// `β + α(σ − 1)` with `β = 1 − α`.
pub fn barrier_drift(alpha: f64, sigma: f64) -> f64 {
    1.0 - alpha + alpha * (sigma - 1.0)
}

/// Radial barrier `v(x) = a|x − z|^σ + b` outside `B̄_r(z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarrierSpec {
    pub z: Point,
    pub r: f64,
    pub sigma: f64,
    pub a: f64,
    pub b: f64,
    pub k: usize,
    pub theta: f64,
}

impl BarrierSpec {
    pub fn new(z: Point, r: f64, sigma: f64, a: f64, b: f64) -> Result<Self> {
        if !(sigma < 0.0) || !(a <= 0.0) || !(b >= 0.0) || !(r > 0.0) {
            return Err(Error::Parameter(format!(
                "barrier needs σ < 0, a ≤ 0, b ≥ 0, r > 0 (got σ = {sigma}, a = {a}, b = {b}, r = {r})"
            )));
        }
        Ok(Self {
            z,
            r,
            sigma,
            a,
            b,
            k: 1,
            theta: barrier_theta(0.5, sigma),
        })
    }

    /// The level-k barrier equal to `b_4r + θ^{k−1}(b_U − b_4r)` on `∂B_{4^{2−k}r}(z)`
    /// and to `b_4r` on `∂B_{4^{1−k}sr}(z)`. `b` follows the data and may be negative.
    pub fn level(z: Point, r: f64, s: f64, sigma: f64, k: usize, b_u: f64, b_4r: f64) -> Self {
        let theta = barrier_theta(s, sigma);
        let outer = 4f64.powi(2 - k as i32) * r;
        let inner = 4f64.powi(1 - k as i32) * s * r;
        let top = b_4r + theta.powi(k as i32 - 1) * (b_u - b_4r);
        let a = (top - b_4r) / (outer.powf(sigma) - inner.powf(sigma));
        Self {
            z,
            r: inner,
            sigma,
            a,
            b: b_4r - a * inner.powf(sigma),
            k,
            theta,
        }
    }

    pub fn value(&self, x: &Point) -> f64 {
        self.a * (x - self.z).norm().powf(self.sigma) + self.b
    }
}

fn w_of(v: &BarrierSpec, x: &Point, nu: &Point, eps: f64, alpha: f64, quad: &DiskQuadrature) -> Result<f64> {
    let avg = quad.average(|p| Ok(v.value(p)), x, nu, eps)?;
    Ok(alpha * v.value(&(x + eps * nu)) + (1.0 - alpha) * avg)
}

/// Signed slacks of the two one-step barrier inequalities at `x`, evaluated on
/// the analytic `v`:
///
/// 1. `sup_ν W(v; x, εν) − W(v; x, ε ν̂)` with the sup over the direction set
///    and `ν̂ = (x − z)/|x − z|`;
/// 2. `W(v; x, ε ν̂) + W(v; x, −ε ν̂) − 2v(x) − ε² aσ|x − z|^{σ−2}(β + α(σ − 1))`.
pub fn barrier_check(
    spec: &BarrierSpec,
    pfield: &ExponentField,
    x: &Point,
    eps: f64,
    dirs: &DirectionSet,
    quad: &DiskQuadrature,
) -> Result<(f64, f64)> {
    let d = x - spec.z;
    let dist = d.norm();
    if dist <= spec.r {
        return Err(Error::Domain(format!(
            "x is inside B̄_r(z) (|x − z| = {dist}, r = {})",
            spec.r
        )));
    }
    let n = quad.dim();
    let (alpha, beta) = pfield.alpha_beta(x, n)?;
    let out = d / dist;
    let w_out = w_of(spec, x, &out, eps, alpha, quad)?;
    let w_in = w_of(spec, x, &(-out), eps, alpha, quad)?;
    let mut sup = f64::NEG_INFINITY;
    for nu in dirs.directions() {
        sup = sup.max(w_of(spec, x, nu, eps, alpha, quad)?);
    }
    let slack1 = sup - w_out;
    let rhs = 2.0 * spec.value(x)
        + eps * eps * spec.a * spec.sigma * dist.powf(spec.sigma - 2.0) * (beta + alpha * (spec.sigma - 1.0));
    let slack2 = w_out + w_in - rhs;
    Ok((slack1, slack2))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryEstimate {
    pub y: Point,
    pub z: Point,
    pub r: f64,
    pub s: f64,
    pub eta: f64,
    pub sigma: f64,
    pub theta: f64,
    pub k: usize,
    pub b_u: f64,
    pub b_4r: f64,
    pub probes: usize,
    /// `max (u(x₀) − b_4r)` over the probes.
    pub max_upper_gap: f64,
    /// `min (u(x₀) − F(y))` over the probes.
    pub min_lower_gap: f64,
    /// Largest `u(x₀) − v_k(x₀)`; nonpositive when the barrier dominates.
    pub max_barrier_excess: f64,
    pub upper_holds: bool,
    pub lower_holds: bool,
}

impl BoundaryEstimate {
    pub fn holds(&self) -> bool {
        self.upper_holds && self.lower_holds
    }
}

/// Checks `u(x₀) − sup_{B_4r(z) ∩ Γ} F < η` and `u(x₀) − F(y) > −η` at the probes
/// `x₀ ∈ B_{4^{1−k}r}(y) ∩ Ω̄_ε` (lattice nodes plus `y`), with `z`, `s` from the
/// domain's exterior-ball data and `k` the first level with `θ^k(b_U − b_4r) < η`.
pub fn boundary_estimate_check(
    scheme: &Scheme,
    field: &GridField,
    y: &Point,
    r: f64,
    eta: f64,
) -> Result<BoundaryEstimate> {
    if !(eta > 0.0) {
        return Err(Error::Parameter(format!("η must be positive, got {eta}")));
    }
    if field.lattice() != scheme.lattice() {
        return Err(Error::Parameter("field lives on a different lattice".into()));
    }
    let domain = scheme.domain();
    let ball = domain.exterior_ball(y, r)?;
    let n = domain.dim();
    let sigma = barrier_sigma(scheme.exponent().alpha_min(n));
    let theta = barrier_theta(ball.s, sigma);

    let lattice = scheme.lattice();
    let f = scheme.boundary_values();
    let mut b_u = f64::NEG_INFINITY;
    let mut b_4r = f64::NEG_INFINITY;
    for (i, reg) in scheme.regions().iter().enumerate() {
        if matches!(reg, Region::InnerStrip | Region::OuterStrip) {
            b_u = b_u.max(f[i]);
            if (lattice.node(i) - ball.z).norm() < 4.0 * r {
                b_4r = b_4r.max(f[i]);
            }
        }
    }
    if !b_4r.is_finite() {
        return Err(Error::Geometry("no strip node lies in B_4r(z)".into()));
    }
    let spread = b_u - b_4r;
    let mut k = 1;
    while theta.powi(k as i32) * spread >= eta {
        k += 1;
    }
    let barrier = BarrierSpec::level(ball.z, r, ball.s, sigma, k, b_u, b_4r);

    let reach = 4f64.powi(1 - k as i32) * r;
    let mut probes = vec![(*y, field.interpolate(y)?)];
    for (i, reg) in scheme.regions().iter().enumerate() {
        let x = lattice.node(i);
        if *reg != Region::Outside && (x - y).norm() < reach {
            probes.push((x, field.values()[i]));
        }
    }
    let fy = scheme.boundary().eval(y);
    let mut max_upper_gap = f64::NEG_INFINITY;
    let mut min_lower_gap = f64::INFINITY;
    let mut max_barrier_excess = f64::NEG_INFINITY;
    for (x, u) in &probes {
        max_upper_gap = max_upper_gap.max(u - b_4r);
        min_lower_gap = min_lower_gap.min(u - fy);
        max_barrier_excess = max_barrier_excess.max(u - barrier.value(x));
    }
    Ok(BoundaryEstimate {
        y: *y,
        z: ball.z,
        r,
        s: ball.s,
        eta,
        sigma,
        theta,
        k,
        b_u,
        b_4r,
        probes: probes.len(),
        max_upper_gap,
        min_lower_gap,
        max_barrier_excess,
        upper_holds: max_upper_gap < eta,
        lower_holds: min_lower_gap > -eta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dpp::{solve_bracket, SchemeParams, SolveOptions};
    use crate::{point2, BoundaryData, Domain};

    #[test]
    fn sigma_and_drift_examples() {
        let sigma = barrier_sigma(0.25);
        assert!((sigma + 6.0).abs() < 1e-14);
        assert!((barrier_drift(0.25, sigma) + 1.0).abs() < 1e-14);
        let theta = barrier_theta(0.5, sigma);
        assert!(theta > 0.0 && theta < 1.0);
        assert!(BarrierSpec::new(Point::zeros(), 0.25, 1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn level_barrier_hits_its_boundary_values() {
        let z = point2(1.1, 0.0);
        let v = BarrierSpec::level(z, 0.2, 0.5, -6.0, 2, 3.0, 1.0);
        let theta = barrier_theta(0.5, -6.0);
        let outer = z + point2(0.2, 0.0);
        let inner = z + point2(0.025, 0.0);
        assert!((v.value(&outer) - (1.0 + theta * 2.0)).abs() < 1e-10);
        assert!((v.value(&inner) - 1.0).abs() < 1e-10);
        assert!(v.a <= 0.0);
    }

    #[test]
    fn slacks_are_finite_and_inside_error() {
        let spec = BarrierSpec::new(Point::zeros(), 0.25, -6.0, -1.0, 1.0).unwrap();
        let p = ExponentField::constant(2.0).unwrap();
        let dirs = DirectionSet::planar(32).unwrap();
        let quad = DiskQuadrature::new(2, 16).unwrap();
        let (s1, s2) = barrier_check(&spec, &p, &point2(1.2, 0.3), 0.05, &dirs, &quad).unwrap();
        assert!(s1.is_finite() && s2.is_finite());
        assert!(matches!(
            barrier_check(&spec, &p, &point2(0.1, 0.0), 0.05, &dirs, &quad),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn constant_data_satisfies_the_estimate() {
        let s = Scheme::new(
            Domain::disk([0.0, 0.0], 1.0).unwrap(),
            ExponentField::constant(3.0).unwrap(),
            BoundaryData::constant(2.0),
            SchemeParams::new(0.2),
        )
        .unwrap();
        let b = solve_bracket(&s, &SolveOptions::default()).unwrap();
        let y = point2(0.0, -1.0);
        let e = boundary_estimate_check(&s, &b.upper, &y, 0.1, 0.05).unwrap();
        assert!(e.holds());
        assert_eq!(e.k, 1);
        assert!(matches!(
            boundary_estimate_check(&s, &b.upper, &y, 0.1, 0.0),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            boundary_estimate_check(&s, &b.upper, &y, 0.9, 0.1),
            Err(Error::Parameter(_))
        ));
    }
}
