//! Browser front end: solve on the unit disk, play greedy games on the result,
//! and plot barrier slacks along a ray.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wasm_bindgen::prelude::*;

use tugwar::analysis::{barrier_check, barrier_sigma, BarrierSpec};
use tugwar::dpp::{solve_bracket, GridField, Scheme, SchemeParams, SolveOptions};
use tugwar::game::{run_game, Game, Greedy, Sense};
use tugwar::{point2, BoundaryData, Domain, ExponentField, Point};

const MAX_STEPS: usize = 100_000;

fn js(e: tugwar::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub struct Demo {
    scheme: Arc<Scheme>,
    field: Arc<GridField>,
    sweeps: usize,
    gap: f64,
}

#[wasm_bindgen]
impl Demo {
    /// Solves with p running radially from `p_center` to `p_edge` and random
    /// trigonometric boundary data drawn from `data_seed`.
    #[wasm_bindgen(constructor)]
    pub fn new(eps: f64, p_center: f64, p_edge: f64, data_seed: u64) -> Result<Demo, JsError> {
        let domain = Domain::disk([0.0, 0.0], 1.0).map_err(js)?;
        let pfield = ExponentField::radial(Point::zeros(), p_center, p_edge, 1.0).map_err(js)?;
        let boundary = BoundaryData::random_fourier(data_seed, 6, 3.0, 2);
        let scheme = Scheme::new(domain, pfield, boundary, SchemeParams::new(eps)).map_err(js)?;
        let opts = SolveOptions {
            tol: 1e-6,
            max_iters: 20_000,
            snapshot_every: 0,
        };
        let b = solve_bracket(&scheme, &opts).map_err(js)?;
        Ok(Demo {
            field: Arc::new(b.midpoint()),
            sweeps: b.report.iterations,
            gap: b.report.bracket_gap,
            scheme: Arc::new(scheme),
        })
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    pub fn bracket_gap(&self) -> f64 {
        self.gap
    }

    /// Row-major `size × size` samples of the solution over [-1, 1]², NaN outside the disk.
    pub fn heatmap(&self, size: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(size * size);
        let step = 2.0 / (size.max(2) - 1) as f64;
        for row in 0..size {
            for col in 0..size {
                let x = point2(-1.0 + col as f64 * step, 1.0 - row as f64 * step);
                let v = if x.norm() <= 1.0 {
                    self.field.interpolate(&x).unwrap_or(f64::NAN)
                } else {
                    f64::NAN
                };
                out.push(v);
            }
        }
        out
    }

    pub fn value_at(&self, x: f64, y: f64) -> f64 {
        self.field.interpolate(&point2(x, y)).unwrap_or(f64::NAN)
    }

    /// One greedy-vs-greedy game from (x, y): flattened `[x0, y0, x1, y1, ...]`,
    /// followed by the payoff.
    pub fn play(&self, x: f64, y: f64, seed: u64) -> Result<Vec<f64>, JsError> {
        let max = Greedy::new(self.scheme.clone(), self.field.clone(), Sense::Max).map_err(js)?;
        let min = Greedy::new(self.scheme.clone(), self.field.clone(), Sense::Min).map_err(js)?;
        let game = Game::from_scheme(&self.scheme);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = run_game(point2(x, y), &max, &min, &game, &mut rng, MAX_STEPS).map_err(js)?;
        let mut out: Vec<f64> = t.states.iter().flat_map(|s| [s.x[0], s.x[1]]).collect();
        out.push(t.payoff.unwrap_or(f64::NAN));
        Ok(out)
    }
}

/// Slacks of the one-step barrier inequalities along the ray through (cos t, sin t)
/// for `|x|` in [r_min, r_max]: flattened `[|x|, jump slack, drift slack, ...]`.
/// σ follows from the exponent range of the demo.
#[wasm_bindgen]
pub fn barrier_profile(
    eps: f64,
    p_center: f64,
    p_edge: f64,
    angle: f64,
    r_min: f64,
    r_max: f64,
    samples: usize,
) -> Result<Vec<f64>, JsError> {
    let pfield = ExponentField::radial(Point::zeros(), p_center, p_edge, 1.0).map_err(js)?;
    let sigma = barrier_sigma(pfield.alpha_min(2));
    let spec = BarrierSpec::new(Point::zeros(), 0.25, sigma, -1.0, 1.0).map_err(js)?;
    let dirs = tugwar::dpp::DirectionSet::planar(32).map_err(js)?;
    let quad = tugwar::dpp::DiskQuadrature::new(2, 16).map_err(js)?;
    let mut out = Vec::with_capacity(3 * samples);
    for i in 0..samples {
        let r = r_min + (r_max - r_min) * i as f64 / (samples.max(2) - 1) as f64;
        let x = point2(r * angle.cos(), r * angle.sin());
        let (s1, s2) = barrier_check(&spec, &pfield, &x, eps, &dirs, &quad).map_err(js)?;
        out.extend([r, s1, s2]);
    }
    Ok(out)
}
