//! The tug-of-war with noise: coin toss, α-jump or β-disk move, δ-absorption.
//!
//! Every step consumes its randomness in a fixed order: the absorption draw,
//! the coin, the α/β split, then the disk point. Each trajectory owns a
//! `ChaCha8Rng` stream selected by its run index, so estimates are
//! reproducible regardless of thread count.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dpp::{reference_frame, GridField, Scheme};
use crate::{BoundaryData, Domain, Error, ExponentField, Point, Result};

pub const DEFAULT_MAX_STEPS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameState {
    /// Absorbed indicator.
    pub c: bool,
    pub x: Point,
    pub step: usize,
}

impl GameState {
    pub fn start(x: Point) -> Self {
        Self { c: false, x, step: 0 }
    }
}

/// A player's rule: maps the history so far to a unit move direction.
pub trait Strategy: Send + Sync {
    fn decide(&self, history: &[GameState]) -> Point;
}

impl<S: Strategy + ?Sized> Strategy for Arc<S> {
    fn decide(&self, history: &[GameState]) -> Point {
        (**self).decide(history)
    }
}

impl<S: Strategy + ?Sized> Strategy for &S {
    fn decide(&self, history: &[GameState]) -> Point {
        (**self).decide(history)
    }
}

fn current(history: &[GameState]) -> Point {
    history.last().map(|s| s.x).unwrap_or_else(Point::zeros)
}

/// Pull toward `z`; at `x = z` the direction is e₁.
#[derive(Debug, Clone, Copy)]
pub struct Pull {
    pub z: Point,
}

impl Pull {
    pub fn new(z: Point) -> Self {
        Self { z }
    }

    pub fn direction(&self, x: &Point) -> Point {
        let d = self.z - x;
        let n = d.norm();
        if n == 0.0 {
            Point::new(1.0, 0.0, 0.0)
        } else {
            d / n
        }
    }
}

impl Strategy for Pull {
    fn decide(&self, history: &[GameState]) -> Point {
        self.direction(&current(history))
    }
}

/// The same direction at every step.
#[derive(Debug, Clone, Copy)]
pub struct Fixed(pub Point);

impl Strategy for Fixed {
    fn decide(&self, _: &[GameState]) -> Point {
        self.0
    }
}

/// Pseudo-random direction determined by the current state and a salt.
#[derive(Debug, Clone, Copy)]
pub struct RandomDirection {
    pub dim: usize,
    pub salt: u64,
}

impl Strategy for RandomDirection {
    fn decide(&self, history: &[GameState]) -> Point {
        let s = history.last().copied().unwrap_or(GameState::start(Point::zeros()));
        let mut key = self.salt ^ (s.step as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        for a in 0..3 {
            key = key.rotate_left(21) ^ s.x[a].to_bits();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(key);
        if self.dim == 2 {
            let t = rng.gen_range(0.0..std::f64::consts::TAU);
            return Point::new(t.cos(), t.sin(), 0.0);
        }
        loop {
            let v = Point::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            let n = v.norm();
            if n > 1e-3 && n <= 1.0 {
                return v / n;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Max,
    Min,
}

/// Picks the direction of the set optimizing `W(u; x, εν)` for a converged field;
/// ties go to the lowest index.
#[derive(Debug, Clone)]
pub struct Greedy {
    scheme: Arc<Scheme>,
    field: Arc<GridField>,
    sense: Sense,
}

impl Greedy {
    pub fn new(scheme: Arc<Scheme>, field: Arc<GridField>, sense: Sense) -> Result<Self> {
        if field.lattice() != scheme.lattice() {
            return Err(Error::Parameter("field lives on a different lattice".into()));
        }
        Ok(Self { scheme, field, sense })
    }

    /// Index of the chosen direction at `x`.
    pub fn choose(&self, x: &Point) -> Result<usize> {
        let ws = self.scheme.w_values(&self.field, x)?;
        let mut best = 0;
        for (d, w) in ws.iter().enumerate().skip(1) {
            let better = match self.sense {
                Sense::Max => *w > ws[best],
                Sense::Min => *w < ws[best],
            };
            if better {
                best = d;
            }
        }
        Ok(best)
    }
}

impl Strategy for Greedy {
    fn decide(&self, history: &[GameState]) -> Point {
        let x = current(history);
        // Off-lattice queries cannot occur for states inside Ω̄_ε; fall back to index 0.
        let d = self.choose(&x).unwrap_or(0);
        self.scheme.directions().get(d)
    }
}

/// Rules of one game: domain, exponent, payoff and step size.
#[derive(Debug, Clone)]
pub struct Game {
    pub domain: Domain,
    pub pfield: ExponentField,
    pub boundary: BoundaryData,
    pub eps: f64,
}

impl Game {
    pub fn new(domain: Domain, pfield: ExponentField, boundary: BoundaryData, eps: f64) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::Parameter(format!("eps must be positive, got {eps}")));
        }
        Ok(Self {
            domain,
            pfield,
            boundary,
            eps,
        })
    }

    pub fn from_scheme(scheme: &Scheme) -> Self {
        Self {
            domain: scheme.domain().clone(),
            pfield: scheme.exponent().clone(),
            boundary: scheme.boundary().clone(),
            eps: scheme.eps(),
        }
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }
}

/// Uniform point of the unit (n−1)-ball in e₁⊥, by rejection from its bounding cube.
fn disk_point<R: Rng>(dim: usize, rng: &mut R) -> Point {
    if dim == 2 {
        return Point::new(0.0, rng.gen_range(-1.0..=1.0), 0.0);
    }
    loop {
        let y = Point::new(0.0, rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
        if y.norm_squared() <= 1.0 {
            return y;
        }
    }
}

/// One round from a live state; `history` ends with `state`.
pub fn step<R: Rng>(
    history: &[GameState],
    s1: &dyn Strategy,
    s2: &dyn Strategy,
    game: &Game,
    rng: &mut R,
) -> Result<GameState> {
    let state = *history
        .last()
        .ok_or_else(|| Error::Logic("empty history".into()))?;
    if state.c {
        return Err(Error::Logic("step called on an absorbed state".into()));
    }
    let delta = game.domain.cutoff(&state.x, game.eps)?;
    let absorb: f64 = rng.gen();
    if absorb < delta {
        return Ok(GameState {
            c: true,
            x: state.x,
            step: state.step + 1,
        });
    }
    let first: bool = rng.gen();
    let nu = if first { s1.decide(history) } else { s2.decide(history) };
    if !((nu.norm() - 1.0).abs() <= 1e-9) {
        return Err(Error::Logic(format!("strategy returned a non-unit direction, |ν| = {}", nu.norm())));
    }
    let dim = game.dim();
    let (alpha, _) = game.pfield.alpha_beta(&state.x, dim)?;
    let split: f64 = rng.gen();
    let x = if split < alpha {
        state.x + game.eps * nu
    } else {
        state.x + game.eps * (reference_frame(&nu) * disk_point(dim, rng))
    };
    Ok(GameState {
        c: false,
        x,
        step: state.step + 1,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub states: Vec<GameState>,
    /// Stopping step: the last index before absorption.
    pub tau: Option<usize>,
    pub payoff: Option<f64>,
    pub truncated: bool,
}

pub fn run_game<R: Rng>(
    x0: Point,
    s1: &dyn Strategy,
    s2: &dyn Strategy,
    game: &Game,
    rng: &mut R,
    max_steps: usize,
) -> Result<Trajectory> {
    let mut states = vec![GameState::start(x0)];
    let outcome = play(&mut states, s1, s2, game, rng, max_steps)?;
    Ok(Trajectory {
        states,
        tau: outcome.tau,
        payoff: outcome.payoff,
        truncated: outcome.truncated,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub payoff: Option<f64>,
    pub tau: Option<usize>,
    pub truncated: bool,
}

fn play<R: Rng>(
    states: &mut Vec<GameState>,
    s1: &dyn Strategy,
    s2: &dyn Strategy,
    game: &Game,
    rng: &mut R,
    max_steps: usize,
) -> Result<RunOutcome> {
    let x0 = states[0].x;
    if game.domain.signed_distance(&x0) >= 0.0 {
        return Err(Error::Domain(format!("start point {x0:?} is not in Ω")));
    }
    while states.len() <= max_steps {
        let next = step(states, s1, s2, game, rng)?;
        states.push(next);
        if next.c {
            let tau = states.len() - 2;
            return Ok(RunOutcome {
                payoff: Some(game.boundary.eval(&next.x)),
                tau: Some(tau),
                truncated: false,
            });
        }
    }
    Ok(RunOutcome {
        payoff: None,
        tau: None,
        truncated: true,
    })
}

/// Independent runs from `x0`; run `i` uses stream `i` of a generator seeded by `seed`.
pub fn simulate_runs(
    x0: Point,
    s1: &dyn Strategy,
    s2: &dyn Strategy,
    game: &Game,
    n_runs: usize,
    seed: u64,
    max_steps: usize,
) -> Result<Vec<RunOutcome>> {
    let one = |i: usize| -> Result<RunOutcome> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let mut states = vec![GameState::start(x0)];
        play(&mut states, s1, s2, game, &mut rng, max_steps)
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n_runs).into_par_iter().map(one).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n_runs).map(one).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValueEstimate {
    pub mean: f64,
    /// Sample standard deviation over the square root of the completed runs.
    pub std_error: f64,
    /// Completed (non-truncated) runs.
    pub n_runs: usize,
    pub seed: u64,
    pub truncated: usize,
    pub mean_tau: f64,
}

impl ValueEstimate {
    pub fn from_runs(runs: &[RunOutcome], seed: u64) -> Result<Self> {
        let done: Vec<(f64, usize)> = runs
            .iter()
            .filter_map(|r| Some((r.payoff?, r.tau?)))
            .collect();
        if done.is_empty() {
            return Err(Error::Estimation("every run was truncated".into()));
        }
        let n = done.len() as f64;
        let mean = done.iter().map(|d| d.0).sum::<f64>() / n;
        let var = if done.len() > 1 {
            done.iter().map(|d| (d.0 - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Ok(Self {
            mean,
            std_error: (var / n).sqrt(),
            n_runs: done.len(),
            seed,
            truncated: runs.len() - done.len(),
            mean_tau: done.iter().map(|d| d.1 as f64).sum::<f64>() / n,
        })
    }
}

pub fn estimate_value(
    x0: Point,
    s1: &dyn Strategy,
    s2: &dyn Strategy,
    game: &Game,
    n_runs: usize,
    seed: u64,
    max_steps: usize,
) -> Result<ValueEstimate> {
    if n_runs < 2 {
        return Err(Error::Parameter("n_runs must be at least 2".into()));
    }
    let runs = simulate_runs(x0, s1, s2, game, n_runs, seed, max_steps)?;
    ValueEstimate::from_runs(&runs, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dpp::{solve_bracket, SchemeParams, SolveOptions};
    use crate::point2;

    fn disk_game(f: BoundaryData, p: f64, eps: f64) -> Game {
        Game::new(
            Domain::disk([0.0, 0.0], 1.0).unwrap(),
            ExponentField::constant(p).unwrap(),
            f,
            eps,
        )
        .unwrap()
    }

    #[test]
    fn pull_examples() {
        let pull = Pull::new(Point::zeros());
        assert_eq!(pull.direction(&point2(2.0, 0.0)), point2(-1.0, 0.0));
        assert_eq!(pull.direction(&point2(0.0, 3.0)), point2(0.0, -1.0));
        assert_eq!(pull.direction(&Point::zeros()), point2(1.0, 0.0));
    }

    #[test]
    fn absorption_and_interior_steps() {
        let g = disk_game(BoundaryData::constant(0.0), 2.0, 0.1);
        let pull = Pull::new(Point::zeros());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        // δ = 1 on the boundary circle.
        let h = [GameState::start(point2(1.0, 0.0))];
        let s = step(&h, &pull, &pull, &g, &mut rng).unwrap();
        assert!(s.c);
        assert_eq!(s.x, h[0].x);
        assert!(matches!(step(&[s], &pull, &pull, &g, &mut rng), Err(Error::Logic(_))));
        for _ in 0..1000 {
            let h = [GameState::start(point2(0.2, 0.1))];
            assert!(!step(&h, &pull, &pull, &g, &mut rng).unwrap().c);
        }
    }

    #[test]
    fn jump_frequency_matches_alpha() {
        let g = disk_game(BoundaryData::constant(0.0), 2.0, 0.1);
        let nu = point2(0.6, 0.8);
        let fixed = Fixed(nu);
        let x = point2(0.1, -0.2);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 100_000;
        let mut jumps = 0;
        for _ in 0..n {
            let s = step(&[GameState::start(x)], &fixed, &fixed, &g, &mut rng).unwrap();
            if (s.x - (x + 0.1 * nu)).norm() < 1e-14 {
                jumps += 1;
            }
        }
        let freq = jumps as f64 / n as f64;
        let se = (0.25f64 * 0.75 / n as f64).sqrt();
        assert!((freq - 0.25).abs() < 3.0 * se, "{freq}");
    }

    #[test]
    fn trajectory_invariants_and_reproducibility() {
        let g = disk_game(BoundaryData::affine(point2(1.0, 0.0), 0.0), 3.0, 0.2);
        let r = RandomDirection { dim: 2, salt: 5 };
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            run_game(point2(0.3, 0.3), &r, &r, &g, &mut rng, DEFAULT_MAX_STEPS).unwrap()
        };
        let t = run(4);
        assert_eq!(t, run(4));
        let tau = t.tau.unwrap();
        assert!(t.states[tau + 1].c && !t.states[tau].c);
        assert_eq!(t.states.len(), tau + 2);
        assert_eq!(t.payoff, Some(t.states[tau].x[0]));
        for w in t.states.windows(2) {
            assert!(w[1].c >= w[0].c);
        }
    }

    #[test]
    fn constant_payoff_estimate() {
        let g = disk_game(BoundaryData::constant(5.0), 2.5, 0.2);
        let pull = Pull::new(point2(0.5, 0.0));
        let e = estimate_value(Point::zeros(), &pull, &pull, &g, 200, 1, DEFAULT_MAX_STEPS).unwrap();
        assert_eq!(e.mean, 5.0);
        assert_eq!(e.std_error, 0.0);
        assert_eq!(e.n_runs, 200);
        assert!(estimate_value(Point::zeros(), &pull, &pull, &g, 1, 1, 10).is_err());
        let cut = estimate_value(Point::zeros(), &pull, &pull, &g, 10, 1, 1);
        assert!(matches!(cut, Err(Error::Estimation(_))));
    }

    #[test]
    fn truncation_is_rare_within_the_lemma_budget() {
        // j₀ = 4⌈diam·ε⁻²⌉ with diam = 2, ε = 0.2; q = 0.01.
        let g = disk_game(BoundaryData::constant(0.0), 2.0, 0.2);
        let j0 = 4.0 * (2.0f64 / 0.04).ceil();
        let max_steps = (50.0 * j0 * (100.0f64).ln()) as usize;
        let r = RandomDirection { dim: 2, salt: 1 };
        let e = estimate_value(Point::zeros(), &r, &r, &g, 1000, 2, max_steps).unwrap();
        assert!(e.truncated as f64 <= 0.01 * 1000.0);
    }

    #[test]
    fn swapping_opposite_pulls_is_symmetric() {
        let g = disk_game(BoundaryData::product(1.0), 2.0, 0.2);
        let a = Pull::new(point2(0.7, 0.7));
        let b = Pull::new(point2(-0.7, -0.7));
        let x = point2(0.1, -0.1);
        let e1 = estimate_value(x, &a, &b, &g, 4000, 8, DEFAULT_MAX_STEPS).unwrap();
        let e2 = estimate_value(x, &b, &a, &g, 4000, 9, DEFAULT_MAX_STEPS).unwrap();
        let se = (e1.std_error.powi(2) + e2.std_error.powi(2)).sqrt();
        assert!((e1.mean - e2.mean).abs() < 3.0 * se);
    }

    #[test]
    fn greedy_examples() {
        let s = Arc::new(
            Scheme::new(
                Domain::disk([0.0, 0.0], 1.0).unwrap(),
                ExponentField::constant(3.0).unwrap(),
                BoundaryData::affine(point2(0.3, -1.0), 0.0),
                SchemeParams::new(0.2),
            )
            .unwrap(),
        );
        let aff = Arc::new(s.boundary_field());
        let g = Greedy::new(s.clone(), aff.clone(), Sense::Max).unwrap();
        let x = point2(0.1, 0.2);
        let chosen = g.choose(&x).unwrap();
        let a = point2(0.3, -1.0);
        let best = (0..s.directions().len())
            .max_by(|&i, &j| a.dot(&s.directions().get(i)).total_cmp(&a.dot(&s.directions().get(j))))
            .unwrap();
        assert_eq!(chosen, best);

        let flat = Arc::new(GridField::from_fn(*s.lattice(), 0.2, |_| 1.0));
        assert_eq!(Greedy::new(s.clone(), flat, Sense::Max).unwrap().choose(&x).unwrap(), 0);

        let neg = Arc::new(GridField::from_fn(*s.lattice(), 0.2, |p| -a.dot(p)));
        let gmin = Greedy::new(s.clone(), neg, Sense::Min).unwrap();
        assert_eq!(gmin.choose(&x).unwrap(), chosen);
    }

    #[test]
    fn greedy_play_matches_the_fixed_point() {
        let s = Arc::new(
            Scheme::new(
                Domain::disk([0.0, 0.0], 1.0).unwrap(),
                ExponentField::constant(2.5).unwrap(),
                BoundaryData::random_fourier(4, 3, 2.0, 2),
                SchemeParams::new(0.25),
            )
            .unwrap(),
        );
        let b = solve_bracket(&s, &SolveOptions { tol: 1e-8, ..Default::default() }).unwrap();
        let u = Arc::new(b.midpoint());
        let up = Greedy::new(s.clone(), u.clone(), Sense::Max).unwrap();
        let down = Greedy::new(s.clone(), u.clone(), Sense::Min).unwrap();
        let game = Game::from_scheme(&s);
        let x = point2(0.2, -0.1);
        let e = estimate_value(x, &up, &down, &game, 4000, 12, DEFAULT_MAX_STEPS).unwrap();
        let target = u.interpolate(&x).unwrap();
        assert!((e.mean - target).abs() < 4.0 * e.std_error, "{} vs {target} ± {}", e.mean, e.std_error);
    }
}
