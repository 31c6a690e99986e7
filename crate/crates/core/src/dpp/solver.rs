use serde::{Deserialize, Serialize};

use crate::dpp::{GridField, Scheme};
use crate::timing::Stopwatch;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iters: usize,
    /// Record a snapshot every this many sweeps (0 disables snapshots).
    pub snapshot_every: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iters: 100_000,
            snapshot_every: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub iteration: usize,
    pub bracket_gap: f64,
    pub last_update: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub iterations: usize,
    /// `‖upper − lower‖_∞`.
    pub bracket_gap: f64,
    /// Largest node change of the final sweep over both brackets.
    pub last_update: f64,
    pub wall_time: f64,
    pub converged: bool,
    pub snapshots: Vec<Snapshot>,
    /// Worst node-wise decrease of the lower iterates across a sweep (0 when monotone).
    pub max_lower_decrease: f64,
    /// Worst node-wise increase of the upper iterates across a sweep (0 when monotone).
    pub max_upper_increase: f64,
}

#[derive(Debug, Clone)]
pub struct Bracket {
    pub lower: GridField,
    pub upper: GridField,
    pub report: SolverReport,
}

impl Bracket {
    /// Node-wise midpoint of the two brackets.
    pub fn midpoint(&self) -> GridField {
        let values = self
            .lower
            .values()
            .iter()
            .zip(self.upper.values())
            .map(|(a, b)| 0.5 * (a + b))
            .collect();
        GridField::new(*self.lower.lattice(), self.lower.eps(), values).expect("same lattice")
    }
}

/// Iterates T_ε from the constants inf F and sup F until the bracket gap is at
/// most `tol` or `max_iters` sweeps have run.
pub fn solve_bracket(scheme: &Scheme, opts: &SolveOptions) -> Result<Bracket> {
    if !(opts.tol > 0.0) {
        return Err(Error::Parameter(format!("tol must be positive, got {}", opts.tol)));
    }
    let clock = Stopwatch::start();
    let (f_min, f_max) = scheme.boundary_range();
    let mut lower = scheme.constant_start(f_min).into_values();
    let mut upper = scheme.constant_start(f_max).into_values();
    let mut next_lower = lower.clone();
    let mut next_upper = upper.clone();

    let gap_of = |l: &[f64], u: &[f64]| {
        l.iter().zip(u).map(|(a, b)| (b - a).abs()).fold(0.0, f64::max)
    };
    let mut gap = gap_of(&lower, &upper);
    let mut last_update = 0.0;
    let mut iterations = 0;
    let mut max_lower_decrease = 0.0f64;
    let mut max_upper_increase = 0.0f64;
    let mut snapshots = Vec::new();

    while gap > opts.tol && iterations < opts.max_iters {
        sweep_pair(scheme, &lower, &upper, &mut next_lower, &mut next_upper);
        let mut update = 0.0f64;
        for (a, b) in lower.iter().zip(&next_lower) {
            max_lower_decrease = max_lower_decrease.max(a - b);
            update = update.max((a - b).abs());
        }
        for (a, b) in upper.iter().zip(&next_upper) {
            max_upper_increase = max_upper_increase.max(b - a);
            update = update.max((a - b).abs());
        }
        std::mem::swap(&mut lower, &mut next_lower);
        std::mem::swap(&mut upper, &mut next_upper);
        iterations += 1;
        last_update = update;
        gap = gap_of(&lower, &upper);
        if opts.snapshot_every > 0 && iterations % opts.snapshot_every == 0 {
            snapshots.push(Snapshot {
                iteration: iterations,
                bracket_gap: gap,
                last_update,
            });
        }
    }
    if snapshots.last().map(|s| s.iteration) != Some(iterations) {
        snapshots.push(Snapshot {
            iteration: iterations,
            bracket_gap: gap,
            last_update,
        });
    }

    let lattice = *scheme.lattice();
    let eps = scheme.eps();
    Ok(Bracket {
        lower: GridField::new(lattice, eps, lower)?,
        upper: GridField::new(lattice, eps, upper)?,
        report: SolverReport {
            iterations,
            bracket_gap: gap,
            last_update,
            wall_time: clock.seconds(),
            converged: gap <= opts.tol,
            snapshots,
            max_lower_decrease,
            max_upper_increase,
        },
    })
}

fn sweep_pair(scheme: &Scheme, lower: &[f64], upper: &[f64], nl: &mut [f64], nu: &mut [f64]) {
    #[cfg(feature = "parallel")]
    rayon::join(|| scheme.apply_into(lower, nl), || scheme.apply_into(upper, nu));
    #[cfg(not(feature = "parallel"))]
    {
        scheme.apply_into(lower, nl);
        scheme.apply_into(upper, nu);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dpp::SchemeParams;
    use crate::geometry::Region;
    use crate::{point2, BoundaryData, Domain, ExponentField, Point};

    fn disk(p: ExponentField, f: BoundaryData, eps: f64) -> Scheme {
        Scheme::new(Domain::disk([0.0, 0.0], 1.0).unwrap(), p, f, SchemeParams::new(eps)).unwrap()
    }

    #[test]
    fn constant_data_converges_in_one_sweep() {
        let s = disk(ExponentField::constant(3.0).unwrap(), BoundaryData::constant(-2.0), 0.2);
        let b = solve_bracket(&s, &SolveOptions::default()).unwrap();
        assert!(b.report.iterations <= 1);
        assert!(b.lower.values().iter().all(|v| *v == -2.0));
        assert!(b.upper.values().iter().all(|v| *v == -2.0));
    }

    #[test]
    fn affine_data_is_recovered() {
        let g = point2(1.0, 2.0);
        let p = ExponentField::radial(Point::zeros(), 4.0, 2.0, 1.0).unwrap();
        let s = disk(p, BoundaryData::affine(g, -0.5), 0.25);
        let opts = SolveOptions {
            tol: 1e-7,
            ..Default::default()
        };
        let b = solve_bracket(&s, &opts).unwrap();
        assert!(b.report.converged);
        for (i, x) in (0..s.lattice().len()).map(|i| (i, s.lattice().node(i))) {
            let exact = g.dot(&x) - 0.5;
            assert!((b.lower.values()[i] - exact).abs() <= 1e-7 + 1e-10);
            assert!((b.upper.values()[i] - exact).abs() <= 1e-7 + 1e-10);
        }
    }

    #[test]
    fn brackets_are_monotone_and_ordered() {
        let s = disk(
            ExponentField::radial(Point::zeros(), 2.0, 4.0, 1.0).unwrap(),
            BoundaryData::random_fourier(11, 6, 4.0, 2),
            0.25,
        );
        let opts = SolveOptions {
            tol: 1e-6,
            snapshot_every: 5,
            ..Default::default()
        };
        let b = solve_bracket(&s, &opts).unwrap();
        assert!(b.report.converged);
        assert!(b.report.max_lower_decrease <= 1e-12);
        assert!(b.report.max_upper_increase <= 1e-12);
        for w in b.report.snapshots.windows(2) {
            assert!(w[1].bracket_gap <= w[0].bracket_gap + 1e-12);
        }
        let (lo, hi) = s.boundary_range();
        for (i, r) in s.regions().iter().enumerate() {
            let (l, u) = (b.lower.values()[i], b.upper.values()[i]);
            assert!(l <= u + 1e-12);
            assert!(l >= lo - 1e-12 && u <= hi + 1e-12);
            if *r == Region::OuterStrip {
                assert_eq!(l, s.boundary_values()[i]);
            }
        }
    }

    #[test]
    fn non_convergence_is_reported() {
        let s = disk(ExponentField::constant(2.0).unwrap(), BoundaryData::product(1.0), 0.2);
        let opts = SolveOptions {
            tol: 1e-12,
            max_iters: 3,
            snapshot_every: 0,
        };
        let b = solve_bracket(&s, &opts).unwrap();
        assert!(!b.report.converged);
        assert_eq!(b.report.iterations, 3);
        assert!(matches!(
            solve_bracket(&s, &SolveOptions { tol: 0.0, ..opts }),
            Err(Error::Parameter(_))
        ));
    }
}
