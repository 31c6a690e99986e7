use serde::{Deserialize, Serialize};

use crate::dpp::{solve_bracket, Scheme, SchemeParams, SolveOptions};
use crate::geometry::{Region, ScalarFn};
use crate::timing::Stopwatch;
use crate::{BoundaryData, Domain, Error, ExponentField, Point, Result};

/// Where the error against the reference is measured.
#[derive(Debug, Clone, PartialEq)]
pub enum Probes {
    /// Every Interior lattice node of the run.
    InteriorNodes,
    /// Fixed points, read by interpolation.
    Points(Vec<Point>),
}

#[derive(Clone)]
pub struct ConvergenceProblem {
    pub domain: Domain,
    pub pfield: ExponentField,
    pub boundary: BoundaryData,
    pub reference: ScalarFn,
    /// Template for every run; `eps` is replaced per row.
    pub params: SchemeParams,
    pub probes: Probes,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub eps: f64,
    pub sup_error: f64,
    pub bracket_gap: f64,
    pub wall_time: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ConvergenceTable {
    /// Sorted by decreasing ε.
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.sup_error).collect()
    }

    pub fn strictly_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].sup_error < w[0].sup_error)
    }

    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(|r| r.converged)
    }
}

/// Solves the problem for each ε and records the sup error of the bracket
/// midpoint against the reference.
pub fn convergence_study(
    problem: &ConvergenceProblem,
    eps_list: &[f64],
    opts: &SolveOptions,
) -> Result<ConvergenceTable> {
    if eps_list.is_empty() {
        return Err(Error::Parameter("empty ε list".into()));
    }
    let mut eps_sorted = eps_list.to_vec();
    eps_sorted.sort_by(|a, b| b.total_cmp(a));
    let mut rows = Vec::with_capacity(eps_sorted.len());
    for eps in eps_sorted {
        let clock = Stopwatch::start();
        let scheme = Scheme::new(
            problem.domain.clone(),
            problem.pfield.clone(),
            problem.boundary.clone(),
            SchemeParams {
                eps,
                ..problem.params
            },
        )?;
        let bracket = solve_bracket(&scheme, opts)?;
        let u = bracket.midpoint();
        let mut sup_error = 0.0f64;
        match &problem.probes {
            Probes::InteriorNodes => {
                for (i, reg) in scheme.regions().iter().enumerate() {
                    if *reg == Region::Interior {
                        let x = scheme.lattice().node(i);
                        sup_error = sup_error.max((u.values()[i] - (problem.reference)(&x)).abs());
                    }
                }
            }
            Probes::Points(points) => {
                for x in points {
                    sup_error = sup_error.max((u.interpolate(x)? - (problem.reference)(x)).abs());
                }
            }
        }
        rows.push(ConvergenceRow {
            eps,
            sup_error,
            bracket_gap: bracket.report.bracket_gap,
            wall_time: clock.seconds(),
            iterations: bracket.report.iterations,
            converged: bracket.report.converged,
        });
    }
    Ok(ConvergenceTable { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point2;
    use std::sync::Arc;

    #[test]
    fn affine_reference_is_reproduced() {
        let g = point2(0.5, -1.5);
        let problem = ConvergenceProblem {
            domain: Domain::disk([0.0, 0.0], 1.0).unwrap(),
            pfield: ExponentField::radial(Point::zeros(), 2.0, 4.0, 1.0).unwrap(),
            boundary: BoundaryData::affine(g, 0.2),
            reference: Arc::new(move |x: &Point| g.dot(x) + 0.2),
            params: SchemeParams::new(0.25),
            probes: Probes::InteriorNodes,
        };
        let opts = SolveOptions {
            tol: 1e-8,
            ..Default::default()
        };
        let t = convergence_study(&problem, &[0.25, 0.4], &opts).unwrap();
        assert_eq!(t.rows[0].eps, 0.4);
        assert!(t.all_converged());
        assert!(t.errors().iter().all(|e| *e <= 1e-8 + 1e-10));
    }
}
