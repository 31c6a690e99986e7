use serde::{Deserialize, Serialize};

use crate::dpp::{SchemeParams, SolveOptions};
use crate::game::DEFAULT_MAX_STEPS;
use crate::geometry::ExponentKind;
use crate::{BoundaryData, Domain, Error, ExponentField, Point, Result};

/// One experiment, read from a TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    pub domain: DomainConfig,
    pub exponent: ExponentConfig,
    pub boundary: BoundaryConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    pub simulate: Option<SimulateConfig>,
    pub analyze: Option<AnalyzeConfig>,
    pub converge: Option<ConvergeConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainConfig {
    Disk { center: [f64; 2], radius: f64 },
    Ball { center: [f64; 3], radius: f64 },
    Annulus { center: [f64; 2], inner: f64, outer: f64 },
    Rectangle { min: [f64; 2], max: [f64; 2] },
    Cube { min: [f64; 3], max: [f64; 3] },
    Polygon { vertices: Vec<[f64; 2]> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExponentConfig {
    Constant {
        p: f64,
    },
    Linear {
        base: f64,
        gradient: Vec<f64>,
        p_min: f64,
        p_max: f64,
    },
    Radial {
        center: Vec<f64>,
        p_center: f64,
        p_edge: f64,
        radius: f64,
    },
    AxisQuadratic {
        base: f64,
        coef: f64,
        #[serde(default)]
        axis: usize,
        p_min: f64,
        p_max: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundaryConfig {
    Constant {
        value: f64,
    },
    Affine {
        gradient: Vec<f64>,
        #[serde(default)]
        offset: f64,
    },
    Product {
        #[serde(default = "one")]
        scale: f64,
    },
    RadialPower {
        #[serde(default)]
        center: Vec<f64>,
        exponent: f64,
        #[serde(default = "one")]
        scale: f64,
        #[serde(default)]
        offset: f64,
    },
    Fourier {
        #[serde(default)]
        seed: u64,
        #[serde(default = "default_modes")]
        modes: usize,
        #[serde(default = "default_frequency")]
        max_frequency: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub eps: f64,
    pub tol: f64,
    pub max_iters: usize,
    pub grid_ratio: f64,
    /// Defaults to 32 in 2D and 64 in 3D.
    pub directions: Option<usize>,
    pub quadrature: usize,
    pub snapshot_every: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            eps: 0.1,
            tol: 1e-8,
            max_iters: 100_000,
            grid_ratio: 4.0,
            directions: None,
            quadrature: 16,
            snapshot_every: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StrategyConfig {
    /// Optimizes W of the converged field (max for player one, min for player two).
    Greedy,
    Pull { target: Vec<f64> },
    Random {
        #[serde(default)]
        salt: u64,
    },
    Fixed { direction: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub starts: Vec<Vec<f64>>,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    pub player_one: StrategyConfig,
    pub player_two: StrategyConfig,
    /// Number of full trajectories dumped per start point.
    #[serde(default)]
    pub trajectories: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeConfig {
    pub holder: Option<HolderConfig>,
    pub boundary_estimate: Option<BoundaryEstimateConfig>,
    pub barrier: Option<BarrierConfig>,
    pub taylor: Option<TaylorConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HolderConfig {
    pub center: Vec<f64>,
    pub radius: f64,
    pub gamma: f64,
    pub kappa: f64,
    #[serde(default = "default_pairs")]
    pub sample_pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryEstimateConfig {
    pub point: Vec<f64>,
    pub r: f64,
    pub eta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BarrierConfig {
    pub z: Vec<f64>,
    pub r: f64,
    pub sigma: f64,
    pub a: f64,
    pub b: f64,
    pub points: Vec<Vec<f64>>,
    pub eps_list: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaylorFunction {
    Exp,
    SquaredDistance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaylorConfig {
    pub function: TaylorFunction,
    pub point: Vec<f64>,
    pub direction: Vec<f64>,
    pub eps_list: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ReferenceConfig {
    /// F itself, for data that already solve the equation.
    Boundary,
    Affine {
        gradient: Vec<f64>,
        #[serde(default)]
        offset: f64,
    },
    Product {
        #[serde(default = "one")]
        scale: f64,
    },
    RadialPower {
        #[serde(default)]
        center: Vec<f64>,
        exponent: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergeConfig {
    pub eps_list: Vec<f64>,
    pub reference: ReferenceConfig,
    /// Fixed probe points; Interior lattice nodes when absent.
    pub probes: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: "out".into() }
    }
}

fn one() -> f64 {
    1.0
}

fn default_modes() -> usize {
    6
}

fn default_frequency() -> f64 {
    3.0
}

fn default_runs() -> usize {
    10_000
}

fn default_max_steps() -> usize {
    DEFAULT_MAX_STEPS
}

fn default_pairs() -> usize {
    100_000
}

/// A validation failure pointing at a `[section] key` of the config.
#[derive(Debug, Clone, PartialEq)]
pub struct Invalid {
    pub section: &'static str,
    pub key: &'static str,
    pub error: Error,
}

fn invalid(section: &'static str, key: &'static str) -> impl Fn(Error) -> Invalid {
    move |error| Invalid { section, key, error }
}

pub fn point_from(v: &[f64], dim: usize) -> Result<Point> {
    if v.len() != dim {
        return Err(Error::Configuration(format!(
            "expected {dim} coordinates, got {}",
            v.len()
        )));
    }
    let mut p = Point::zeros();
    for (a, c) in v.iter().enumerate() {
        p[a] = *c;
    }
    Ok(p)
}

fn center_or_origin(v: &[f64], dim: usize) -> Result<Point> {
    if v.is_empty() {
        Ok(Point::zeros())
    } else {
        point_from(v, dim)
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> std::result::Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn build_domain(&self) -> std::result::Result<Domain, Invalid> {
        let d = match &self.domain {
            DomainConfig::Disk { center, radius } => Domain::disk(*center, *radius),
            DomainConfig::Ball { center, radius } => Domain::ball(*center, *radius),
            DomainConfig::Annulus {
                center,
                inner,
                outer,
            } => Domain::annulus(*center, *inner, *outer),
            DomainConfig::Rectangle { min, max } => Domain::rectangle(*min, *max),
            DomainConfig::Cube { min, max } => Domain::cube(*min, *max),
            DomainConfig::Polygon { vertices } => Domain::polygon(vertices.clone()),
        };
        d.map_err(invalid("domain", "kind"))
    }

    pub fn build_exponent(&self, dim: usize) -> std::result::Result<ExponentField, Invalid> {
        match &self.exponent {
            ExponentConfig::Constant { p } => ExponentField::constant(*p).map_err(invalid("exponent", "p")),
            ExponentConfig::Linear {
                base,
                gradient,
                p_min,
                p_max,
            } => {
                let gradient = point_from(gradient, dim).map_err(invalid("exponent", "gradient"))?;
                ExponentField::new(ExponentKind::Linear { base: *base, gradient }, *p_min, *p_max)
                    .map_err(invalid("exponent", "p_min"))
            }
            ExponentConfig::Radial {
                center,
                p_center,
                p_edge,
                radius,
            } => {
                let center = center_or_origin(center, dim).map_err(invalid("exponent", "center"))?;
                ExponentField::radial(center, *p_center, *p_edge, *radius)
                    .map_err(invalid("exponent", "p_center"))
            }
            ExponentConfig::AxisQuadratic {
                base,
                coef,
                axis,
                p_min,
                p_max,
            } => {
                if *axis >= dim {
                    return Err(Invalid {
                        section: "exponent",
                        key: "axis",
                        error: Error::Configuration(format!("axis {axis} out of range")),
                    });
                }
                ExponentField::new(
                    ExponentKind::AxisQuadratic {
                        base: *base,
                        coef: *coef,
                        axis: *axis,
                    },
                    *p_min,
                    *p_max,
                )
                .map_err(invalid("exponent", "p_min"))
            }
        }
    }

    pub fn build_boundary(&self, dim: usize) -> std::result::Result<BoundaryData, Invalid> {
        Ok(match &self.boundary {
            BoundaryConfig::Constant { value } => BoundaryData::constant(*value),
            BoundaryConfig::Affine { gradient, offset } => BoundaryData::affine(
                point_from(gradient, dim).map_err(invalid("boundary", "gradient"))?,
                *offset,
            ),
            BoundaryConfig::Product { scale } => BoundaryData::product(*scale),
            BoundaryConfig::RadialPower {
                center,
                exponent,
                scale,
                offset,
            } => BoundaryData::new(crate::geometry::BoundaryKind::RadialPower {
                center: center_or_origin(center, dim).map_err(invalid("boundary", "center"))?,
                exponent: *exponent,
                scale: *scale,
                offset: *offset,
            }),
            BoundaryConfig::Fourier {
                seed,
                modes,
                max_frequency,
            } => BoundaryData::random_fourier(*seed, *modes, *max_frequency, dim),
        })
    }

    pub fn scheme_params(&self, dim: usize) -> std::result::Result<SchemeParams, Invalid> {
        let s = &self.solver;
        let check = |ok: bool, key: &'static str, msg: String| {
            if ok {
                Ok(())
            } else {
                Err(Invalid {
                    section: "solver",
                    key,
                    error: Error::Configuration(msg),
                })
            }
        };
        check(s.eps > 0.0 && s.eps < 1.0, "eps", format!("eps must lie in (0, 1), got {}", s.eps))?;
        check(s.grid_ratio >= 1.0, "grid_ratio", format!("grid_ratio must be at least 1, got {}", s.grid_ratio))?;
        let mut params = SchemeParams::for_dim(s.eps, dim);
        params.grid_ratio = s.grid_ratio;
        params.quadrature = s.quadrature;
        if let Some(m) = s.directions {
            params.directions = m;
        }
        Ok(params)
    }

    pub fn solve_options(&self) -> std::result::Result<SolveOptions, Invalid> {
        let s = &self.solver;
        if !(s.tol > 0.0) {
            return Err(Invalid {
                section: "solver",
                key: "tol",
                error: Error::Configuration(format!("tol must be positive, got {}", s.tol)),
            });
        }
        Ok(SolveOptions {
            tol: s.tol,
            max_iters: s.max_iters,
            snapshot_every: s.snapshot_every,
        })
    }
}

/// 1-based line of `key` inside `[section]` (or of the section header itself).
pub fn locate(text: &str, section: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    let mut header = None;
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if let Some(name) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            current = name.trim().to_string();
            if current == section {
                header = Some(i + 1);
            }
            continue;
        }
        let head = t.split('=').next().unwrap_or("").trim();
        if head == key && current == section {
            return Some(i + 1);
        }
    }
    header
}
