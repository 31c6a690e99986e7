use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dpp::GridField;
use crate::{Domain, Error, ExponentField, Point, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderOptions {
    pub gamma: f64,
    pub kappa: f64,
    pub sample_pairs: usize,
    /// Lattice-node pairs inside the ball are added when there are at most this many nodes.
    pub max_node_count: usize,
    pub seed: u64,
}

impl HolderOptions {
    pub fn new(gamma: f64, kappa: f64) -> Self {
        Self {
            gamma,
            kappa,
            sample_pairs: 100_000,
            max_node_count: 2000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderReport {
    pub gamma: f64,
    pub kappa: f64,
    pub radius: f64,
    pub eps: f64,
    /// `max |u(x) − u(z)| / ((|x − z|^γ + ε^γ) / R^γ)` over the sampled pairs.
    pub c_measured: f64,
    pub pair_count: usize,
}

/// Empirical constant of the asymptotic Hölder estimate on `B_R(center)`.
pub fn holder_modulus(
    field: &GridField,
    domain: &Domain,
    pfield: &ExponentField,
    center: &Point,
    radius: f64,
    opts: &HolderOptions,
) -> Result<HolderReport> {
    if !(radius > 0.0) {
        return Err(Error::Parameter(format!("R must be positive, got {radius}")));
    }
    if domain.signed_distance(center) > -2.0 * radius {
        return Err(Error::Geometry(format!(
            "B_2R(center) with R = {radius} is not inside Ω"
        )));
    }
    let n = domain.dim();
    let bound = pfield.alpha_ratio(n) - opts.kappa;
    if !(opts.kappa > 0.0) || !(opts.gamma > 0.0) || opts.gamma >= bound {
        return Err(Error::Parameter(format!(
            "γ = {} must lie in (0, {bound}) with κ = {} > 0",
            opts.gamma, opts.kappa
        )));
    }
    let eps = field.eps();
    let g = opts.gamma;
    let scale = radius.powf(g);
    let eps_g = eps.powf(g);
    let ratio = |a: &Point, b: &Point, ua: f64, ub: f64| -> f64 {
        (ua - ub).abs() * scale / ((a - b).norm().powf(g) + eps_g)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut sample = || loop {
        let mut p = Point::zeros();
        for a in 0..n {
            p[a] = rng.gen_range(-1.0..1.0);
        }
        if p.norm_squared() < 1.0 {
            return center + radius * p;
        }
    };
    let mut best = 0.0f64;
    let mut count = 0;
    for _ in 0..opts.sample_pairs {
        let (a, b) = (sample(), sample());
        best = best.max(ratio(&a, &b, field.interpolate(&a)?, field.interpolate(&b)?));
        count += 1;
    }

    let lattice = field.lattice();
    let nodes: Vec<(Point, f64)> = (0..lattice.len())
        .map(|i| (lattice.node(i), field.values()[i]))
        .filter(|(x, _)| (x - center).norm() < radius)
        .collect();
    if nodes.len() <= opts.max_node_count {
        for i in 0..nodes.len() {
            for j in i + 1..nodes.len() {
                best = best.max(ratio(&nodes[i].0, &nodes[j].0, nodes[i].1, nodes[j].1));
                count += 1;
            }
        }
    }
    Ok(HolderReport {
        gamma: g,
        kappa: opts.kappa,
        radius,
        eps,
        c_measured: best,
        pair_count: count,
    })
}
