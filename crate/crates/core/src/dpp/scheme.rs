use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dpp::{DirectionSet, DiskQuadrature, GridField, Lattice};
use crate::geometry::{cutoff_from_signed_distance, Region};
use crate::{BoundaryData, Domain, Error, ExponentField, Point, Result};

/// Discretization knobs of T_ε.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeParams {
    pub eps: f64,
    /// Lattice spacing is `eps / grid_ratio`.
    pub grid_ratio: f64,
    /// Number of directions M (even).
    pub directions: usize,
    /// Disk quadrature size K.
    pub quadrature: usize,
}

impl SchemeParams {
    pub fn new(eps: f64) -> Self {
        Self {
            eps,
            grid_ratio: 4.0,
            directions: 32,
            quadrature: 16,
        }
    }

    /// Defaults with M = 64 directions in 3D.
    pub fn for_dim(eps: f64, dim: usize) -> Self {
        let mut p = Self::new(eps);
        if dim == 3 {
            p.directions = 64;
        }
        p
    }

    pub fn spacing(&self) -> f64 {
        self.eps / self.grid_ratio
    }
}

/// `⨍_{B_ε^ν} u(x + h) dh` with u read from the lattice by interpolation.
pub fn disk_average(
    field: &GridField,
    x: &Point,
    nu: &Point,
    eps: f64,
    quad: &DiskQuadrature,
) -> Result<f64> {
    quad.average(|p| field.interpolate(p), x, nu, eps)
}

/// `W(u; x, εν) = α(x) u(x + εν) + β(x) ⨍_{B_ε^ν} u(x + h) dh`.
pub fn eval_w(
    field: &GridField,
    x: &Point,
    nu: &Point,
    eps: f64,
    pfield: &ExponentField,
    quad: &DiskQuadrature,
) -> Result<f64> {
    let (alpha, beta) = pfield.alpha_beta(x, field.lattice().dim())?;
    let jump = field.interpolate(&(x + eps * nu))?;
    let avg = disk_average(field, x, nu, eps, quad)?;
    Ok(alpha * jump + beta * avg)
}

type Stencil = Vec<(isize, f64)>;

/// The operator T_ε on a fixed lattice.
///
/// Because every evaluation point `node + offset` sits at the same fractional
/// position inside its cell for all nodes, each jump and each disk average is
/// a fixed linear stencil; `apply` runs them as strided sweeps over the
/// lattice. `apply_pointwise` evaluates the same operator node by node through
/// [`eval_w`] and serves as the cross-check.
#[derive(Debug, Clone)]
pub struct Scheme {
    domain: Domain,
    pfield: ExponentField,
    boundary: BoundaryData,
    params: SchemeParams,
    dirs: DirectionSet,
    quad: DiskQuadrature,
    lattice: Lattice,
    regions: Vec<Region>,
    delta: Vec<f64>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    f: Vec<f64>,
    computed: Vec<bool>,
    span: (usize, usize),
    disks: Vec<Stencil>,
    jumps: Vec<Stencil>,
    // (disk stencil, directions sharing it)
    groups: Vec<(usize, Vec<usize>)>,
    f_range: (f64, f64),
}

const BLOCK: usize = 2048;

impl Scheme {
    pub fn new(
        domain: Domain,
        pfield: ExponentField,
        boundary: BoundaryData,
        params: SchemeParams,
    ) -> Result<Self> {
        let dim = domain.dim();
        let dirs = DirectionSet::for_dim(dim, params.directions)?;
        let quad = DiskQuadrature::new(dim, params.quadrature)?;
        Self::with_parts(domain, pfield, boundary, params, dirs, quad)
    }

    pub fn with_parts(
        domain: Domain,
        pfield: ExponentField,
        boundary: BoundaryData,
        params: SchemeParams,
        dirs: DirectionSet,
        quad: DiskQuadrature,
    ) -> Result<Self> {
        let eps = params.eps;
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::Parameter(format!("eps must be positive, got {eps}")));
        }
        if !(params.grid_ratio > 0.0) {
            return Err(Error::Parameter("grid_ratio must be positive".into()));
        }
        if dirs.is_empty() {
            return Err(Error::Configuration("empty direction set".into()));
        }
        if !dirs.antipodal_closure() {
            return Err(Error::Configuration("direction set is not antipodally closed".into()));
        }
        let dim = domain.dim();
        if dirs.dim() != dim || quad.dim() != dim {
            return Err(Error::Configuration(
                "direction set, quadrature and domain disagree on dimension".into(),
            ));
        }
        let lattice = Lattice::covering(&domain, eps, params.spacing())?;
        let n = lattice.len();
        let mut regions = Vec::with_capacity(n);
        let mut delta = Vec::with_capacity(n);
        let mut alpha = vec![0.0; n];
        let mut beta = vec![0.0; n];
        let mut f = Vec::with_capacity(n);
        let mut computed = Vec::with_capacity(n);
        for i in 0..n {
            let x = lattice.node(i);
            let sd = domain.signed_distance(&x);
            let region = Region::from_signed_distance(sd, eps);
            regions.push(region);
            delta.push(cutoff_from_signed_distance(sd, eps).unwrap_or(1.0));
            f.push(boundary.eval(&x));
            computed.push(region.is_computed());
            if region.is_computed() {
                let (a, b) = pfield.alpha_beta(&x, dim)?;
                alpha[i] = a;
                beta[i] = b;
            }
        }
        let first = computed
            .iter()
            .position(|&c| c)
            .ok_or_else(|| Error::Geometry("no lattice node lies in Ω".into()))?;
        let last = computed.iter().rposition(|&c| c).unwrap_or(first);

        let mut multi_stencils = Vec::new();
        let mut jumps_multi = Vec::new();
        for nu in dirs.directions() {
            jumps_multi.push(multi_stencil(&lattice, &[(eps * nu, 1.0)]));
        }
        // Planar disks of ν and −ν coincide node for node up to sign, so each
        // antipodal pair shares one stencil; in 3D each direction keeps its own frame.
        let shared = dim == 2;
        let mut groups = Vec::new();
        let half = dirs.len() / 2;
        let disk_dirs: Vec<usize> = if shared { (0..half).collect() } else { (0..dirs.len()).collect() };
        for &d in &disk_dirs {
            multi_stencils.push(multi_stencil(&lattice, &quad.offsets(&dirs.get(d), eps)));
            let members = if shared { vec![d, dirs.antipode(d)] } else { vec![d] };
            groups.push((multi_stencils.len() - 1, members));
        }

        // Every computed node must reach only in-lattice nodes.
        let mut reach_lo = [0i64; 3];
        let mut reach_hi = [0i64; 3];
        for st in multi_stencils.iter().chain(&jumps_multi) {
            for (m, _) in st {
                for a in 0..3 {
                    reach_lo[a] = reach_lo[a].min(m[a]);
                    reach_hi[a] = reach_hi[a].max(m[a]);
                }
            }
        }
        let ext = lattice.extents();
        for (i, &c) in computed.iter().enumerate() {
            if !c {
                continue;
            }
            let m = lattice.multi_index(i);
            for a in 0..dim {
                let lo = m[a] as i64 + reach_lo[a];
                let hi = m[a] as i64 + reach_hi[a];
                if lo < 0 || hi >= ext[a] as i64 {
                    return Err(Error::Range(format!(
                        "stencil of node {i} leaves the lattice on axis {a}"
                    )));
                }
            }
        }

        let strides = lattice.strides();
        let linear = |st: &Vec<([i64; 3], f64)>| -> Stencil {
            st.iter()
                .map(|(m, w)| {
                    let off = (0..3).map(|a| m[a] * strides[a] as i64).sum::<i64>();
                    (off as isize, *w)
                })
                .collect()
        };
        let disks = multi_stencils.iter().map(linear).collect();
        let jumps = jumps_multi.iter().map(linear).collect();

        let mut f_min = f64::INFINITY;
        let mut f_max = f64::NEG_INFINITY;
        for i in 0..n {
            if regions[i] != Region::Interior {
                f_min = f_min.min(f[i]);
                f_max = f_max.max(f[i]);
            }
        }
        if !f_min.is_finite() || !f_max.is_finite() {
            return Err(Error::Parameter("boundary data is unbounded on the strip".into()));
        }

        Ok(Self {
            domain,
            pfield,
            boundary,
            params,
            dirs,
            quad,
            lattice,
            regions,
            delta,
            alpha,
            beta,
            f,
            computed,
            span: (first, last + 1),
            disks,
            jumps,
            groups,
            f_range: (f_min, f_max),
        })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn exponent(&self) -> &ExponentField {
        &self.pfield
    }

    pub fn boundary(&self) -> &BoundaryData {
        &self.boundary
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    pub fn eps(&self) -> f64 {
        self.params.eps
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn directions(&self) -> &DirectionSet {
        &self.dirs
    }

    pub fn quadrature(&self) -> &DiskQuadrature {
        &self.quad
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn cutoffs(&self) -> &[f64] {
        &self.delta
    }

    /// F at every node.
    pub fn boundary_values(&self) -> &[f64] {
        &self.f
    }

    /// `(inf F, sup F)` over the non-interior nodes.
    pub fn boundary_range(&self) -> (f64, f64) {
        self.f_range
    }

    /// Interior and inner-strip nodes hold `c`, all others hold F.
    pub fn constant_start(&self, c: f64) -> GridField {
        let values = (0..self.lattice.len())
            .map(|i| if self.computed[i] { c } else { self.f[i] })
            .collect();
        GridField::new(self.lattice, self.params.eps, values).expect("sizes match")
    }

    /// The field holding F at every node.
    pub fn boundary_field(&self) -> GridField {
        GridField::new(self.lattice, self.params.eps, self.f.clone()).expect("sizes match")
    }

    fn check_field(&self, field: &GridField) -> Result<()> {
        if field.lattice() != &self.lattice {
            return Err(Error::Parameter("field lives on a different lattice".into()));
        }
        Ok(())
    }

    /// One application of T_ε; the input is left untouched.
    pub fn apply(&self, field: &GridField) -> Result<GridField> {
        self.check_field(field)?;
        let mut out = vec![0.0; self.lattice.len()];
        self.apply_into(field.values(), &mut out);
        GridField::new(self.lattice, self.params.eps, out)
    }

    pub(crate) fn apply_into(&self, u: &[f64], out: &mut [f64]) {
        let (lo, hi) = self.span;
        out[..lo].copy_from_slice(&self.f[..lo]);
        out[hi..].copy_from_slice(&self.f[hi..]);
        let body = &mut out[lo..hi];
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            body.par_chunks_mut(BLOCK)
                .enumerate()
                .for_each(|(b, chunk)| self.sweep_block(u, chunk, lo + b * BLOCK));
        }
        #[cfg(not(feature = "parallel"))]
        {
            body.chunks_mut(BLOCK)
                .enumerate()
                .for_each(|(b, chunk)| self.sweep_block(u, chunk, lo + b * BLOCK));
        }
    }

    fn sweep_block(&self, u: &[f64], out: &mut [f64], start: usize) {
        let len = out.len();
        let mut avg = vec![0.0; len];
        let mut jump = vec![0.0; len];
        let mut w_max = vec![f64::NEG_INFINITY; len];
        let mut w_min = vec![f64::INFINITY; len];
        let alpha = &self.alpha[start..start + len];
        let beta = &self.beta[start..start + len];
        for (disk, members) in &self.groups {
            avg.fill(0.0);
            for &(off, w) in &self.disks[*disk] {
                let src = &u[(start as isize + off) as usize..][..len];
                for (a, s) in avg.iter_mut().zip(src) {
                    *a += w * s;
                }
            }
            for &d in members {
                jump.fill(0.0);
                for &(off, w) in &self.jumps[d] {
                    let src = &u[(start as isize + off) as usize..][..len];
                    for (j, s) in jump.iter_mut().zip(src) {
                        *j += w * s;
                    }
                }
                for i in 0..len {
                    let v = alpha[i] * jump[i] + beta[i] * avg[i];
                    if v > w_max[i] {
                        w_max[i] = v;
                    }
                    if v < w_min[i] {
                        w_min[i] = v;
                    }
                }
            }
        }
        for (i, o) in out.iter_mut().enumerate() {
            let node = start + i;
            *o = if self.computed[node] {
                combine(self.delta[node], w_max[i], w_min[i], self.f[node])
            } else {
                self.f[node]
            };
        }
    }

    /// T_ε evaluated node by node through [`eval_w`] and lattice interpolation.
    pub fn apply_pointwise(&self, field: &GridField) -> Result<GridField> {
        self.check_field(field)?;
        let mut out = self.f.clone();
        for i in 0..self.lattice.len() {
            if !self.computed[i] {
                continue;
            }
            let x = self.lattice.node(i);
            let mut s = f64::NEG_INFINITY;
            let mut m = f64::INFINITY;
            for nu in self.dirs.directions() {
                let w = eval_w(field, &x, nu, self.params.eps, &self.pfield, &self.quad)?;
                s = s.max(w);
                m = m.min(w);
            }
            out[i] = combine(self.delta[i], s, m, self.f[i]);
        }
        GridField::new(self.lattice, self.params.eps, out)
    }

    /// `W(u; x, εν_d)` for every direction at an arbitrary point of Ω̄.
    pub fn w_values(&self, field: &GridField, x: &Point) -> Result<Vec<f64>> {
        let (alpha, beta) = self.pfield.alpha_beta(x, self.dim())?;
        let eps = self.params.eps;
        let mut out = vec![0.0; self.dirs.len()];
        for (_, members) in &self.groups {
            let avg = disk_average(field, x, &self.dirs.get(members[0]), eps, &self.quad)?;
            for &d in members {
                let jump = field.interpolate(&(x + eps * self.dirs.get(d)))?;
                out[d] = alpha * jump + beta * avg;
            }
        }
        Ok(out)
    }
}

fn combine(delta: f64, sup: f64, inf: f64, f: f64) -> f64 {
    if delta == 0.0 {
        0.5 * (sup + inf)
    } else {
        0.5 * (1.0 - delta) * (sup + inf) + delta * f
    }
}

/// Multilinear interpolation weights of `node + offset` for each weighted offset,
/// merged by integer lattice offset.
fn multi_stencil(lattice: &Lattice, offsets: &[(Point, f64)]) -> Vec<([i64; 3], f64)> {
    let dim = lattice.dim();
    let h = lattice.spacing();
    let mut acc: BTreeMap<[i64; 3], f64> = BTreeMap::new();
    for (o, w) in offsets {
        let mut base = [0i64; 3];
        let mut frac = [0.0; 3];
        for a in 0..dim {
            let t = o[a] / h;
            let fl = t.floor();
            base[a] = fl as i64;
            frac[a] = t - fl;
        }
        for c in 0..(1usize << dim) {
            let mut key = base;
            let mut weight = *w;
            for a in 0..dim {
                if c >> a & 1 == 1 {
                    key[a] += 1;
                    weight *= frac[a];
                } else {
                    weight *= 1.0 - frac[a];
                }
            }
            if weight != 0.0 {
                *acc.entry(key).or_insert(0.0) += weight;
            }
        }
    }
    acc.into_iter().collect()
}
