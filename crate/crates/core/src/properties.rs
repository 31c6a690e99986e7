//! Cross-module invariants checked on random inputs.

use std::sync::OnceLock;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::analysis::barrier_theta;
use crate::dpp::{solve_bracket, DirectionSet, DiskQuadrature, GridField, Scheme, SchemeParams, SolveOptions};
use crate::game::{run_game, Game, Pull, RandomDirection, RunOutcome, Strategy, ValueEstimate};
use crate::geometry::{ExponentKind, Region};
use crate::{point2, point3, BoundaryData, Domain, ExponentField, Point};

fn presets() -> Vec<Domain> {
    vec![
        Domain::disk([0.1, -0.2], 0.8).unwrap(),
        Domain::annulus([0.0, 0.0], 0.25, 1.0).unwrap(),
        Domain::rectangle([-1.0, -0.5], [1.0, 0.5]).unwrap(),
        Domain::polygon(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.5, 0.4], [0.0, 1.0]]).unwrap(),
        Domain::ball([0.0, 0.0, 0.0], 1.0).unwrap(),
        Domain::cube([-1.0, -1.0, -1.0], [1.0, 0.5, 1.0]).unwrap(),
    ]
}

fn point_in_box(d: &Domain, t: [f64; 3]) -> Point {
    let (lo, hi) = d.bounding_box();
    let mut x = Point::zeros();
    for a in 0..d.dim() {
        x[a] = lo[a] + t[a] * (hi[a] - lo[a]);
    }
    x
}

/// Small variable-exponent problem shared by the operator properties.
fn scheme() -> &'static Scheme {
    static S: OnceLock<Scheme> = OnceLock::new();
    S.get_or_init(|| {
        Scheme::new(
            Domain::disk([0.0, 0.0], 1.0).unwrap(),
            ExponentField::radial(Point::zeros(), 2.0, 4.0, 1.0).unwrap(),
            BoundaryData::random_fourier(21, 6, 3.0, 2),
            SchemeParams::new(0.25),
        )
        .unwrap()
    })
}

fn random_field(s: &Scheme, seed: u64, lo: f64, hi: f64) -> GridField {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lat = *s.lattice();
    let values = (0..lat.len()).map(|_| rng.gen_range(lo..hi)).collect();
    GridField::new(lat, s.eps(), values).unwrap()
}

proptest! {
    #[test]
    fn signed_distance_is_one_lipschitz(
        k in 0usize..6,
        a in prop::array::uniform3(0.0f64..1.0),
        b in prop::array::uniform3(0.0f64..1.0),
    ) {
        let d = &presets()[k];
        let (x, y) = (point_in_box(d, a), point_in_box(d, b));
        let gap = (d.signed_distance(&x) - d.signed_distance(&y)).abs();
        prop_assert!(gap <= (x - y).norm() + 1e-12);
    }

    #[test]
    fn diameter_bounds_pair_distances(
        k in 0usize..6,
        a in prop::array::uniform3(0.0f64..1.0),
        b in prop::array::uniform3(0.0f64..1.0),
    ) {
        let d = &presets()[k];
        let (x, y) = (point_in_box(d, a), point_in_box(d, b));
        if d.signed_distance(&x) < 0.0 && d.signed_distance(&y) < 0.0 {
            prop_assert!((x - y).norm() <= d.diameter() + 1e-12);
        }
    }

    #[test]
    fn regions_partition_by_signed_distance(
        k in 0usize..6,
        a in prop::array::uniform3(0.0f64..1.0),
        eps in 0.01f64..0.3,
    ) {
        let d = &presets()[k];
        let x = point_in_box(d, a);
        let sd = d.signed_distance(&x);
        let r = d.classify(&x, eps).unwrap();
        let expected = if sd <= -eps {
            Region::Interior
        } else if sd < 0.0 {
            Region::InnerStrip
        } else if sd <= eps {
            Region::OuterStrip
        } else {
            Region::Outside
        };
        prop_assert_eq!(r, expected);
    }

    #[test]
    fn exponent_and_alpha_stay_in_range(
        base in 1.5f64..3.0, coef in -4.0f64..4.0, g0 in -2.0f64..2.0, g1 in -2.0f64..2.0,
        x0 in -1.0f64..1.0, x1 in -1.0f64..1.0, n in 2usize..4,
    ) {
        let x = point2(x0, x1);
        let fields = [
            ExponentField::new(ExponentKind::AxisQuadratic { base, coef, axis: 1 }, 1.5, 5.0).unwrap(),
            ExponentField::new(ExponentKind::Linear { base, gradient: point2(g0, g1) }, 1.2, 4.0).unwrap(),
            ExponentField::radial(point2(0.2, 0.0), base, base + coef.abs(), 0.9).unwrap(),
        ];
        for f in &fields {
            let p = f.p(&x);
            prop_assert!(f.p_min() <= p && p <= f.p_max());
            let (alpha, beta) = f.alpha_beta(&x, n).unwrap();
            prop_assert!(0.0 < f.alpha_min(n) && f.alpha_min(n) <= alpha + 1e-15);
            prop_assert!(alpha <= f.alpha_max(n) + 1e-15 && f.alpha_max(n) < 1.0);
            prop_assert!((alpha + beta - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn fourier_data_is_bounded(seed in 0u64..1000, a in prop::array::uniform3(-2.0f64..2.0)) {
        let f = BoundaryData::random_fourier(seed, 6, 3.0, 3);
        let v = f.eval(&point3(a[0], a[1], a[2]));
        prop_assert!(v.is_finite() && v.abs() <= 10.0);
    }

    #[test]
    fn directions_and_quadrature_invariants(m in 1usize..40, k in 2usize..12, dim in 2usize..4) {
        let set = DirectionSet::for_dim(dim, 2 * m).unwrap();
        prop_assert!(set.antipodal_closure());
        for (i, nu) in set.directions().iter().enumerate() {
            prop_assert!((nu.norm() - 1.0).abs() < 1e-12);
            prop_assert!((set.get(set.antipode(i)) + nu).norm() < 1e-12);
        }
        let q = DiskQuadrature::new(dim, 4 * k).unwrap();
        prop_assert!((q.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(q.weights().iter().all(|w| *w > 0.0));
        prop_assert!((q.second_moment() - q.second_moment_target()).abs() < 1e-10);
    }

    #[test]
    fn barrier_ratio_is_a_proper_fraction(s in 0.2f64..0.9, sigma in -8.0f64..-0.05) {
        let t = barrier_theta(s, sigma);
        prop_assert!(t > 0.0 && t < 1.0);
    }

    #[test]
    fn strategies_return_unit_vectors(x0 in -1.0f64..1.0, x1 in -1.0f64..1.0, x2 in -1.0f64..1.0, salt: u64) {
        let h = [crate::game::GameState::start(point3(x0, x1, x2))];
        for dim in [2, 3] {
            let nu = RandomDirection { dim, salt }.decide(&h);
            prop_assert!((nu.norm() - 1.0).abs() < 1e-12);
        }
        let nu = Pull::new(point3(0.3, -0.2, 0.1)).decide(&h);
        prop_assert!((nu.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn std_error_is_sample_sd_over_root_n(payoffs in prop::collection::vec(-5.0f64..5.0, 2..50)) {
        let runs: Vec<RunOutcome> = payoffs
            .iter()
            .map(|p| RunOutcome { payoff: Some(*p), tau: Some(3), truncated: false })
            .collect();
        let est = ValueEstimate::from_runs(&runs, 0).unwrap();
        let n = payoffs.len() as f64;
        let mean = payoffs.iter().sum::<f64>() / n;
        let sd = (payoffs.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        prop_assert!((est.std_error - sd / n.sqrt()).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn operator_is_monotone(seed: u64, lift in 0.0f64..1.0) {
        let s = scheme();
        let u = random_field(s, seed, -2.0, 2.0);
        let mut v = u.clone();
        let bump = random_field(s, seed ^ 0xABCD, 0.0, lift);
        for (a, b) in v.values_mut().iter_mut().zip(bump.values()) {
            *a += b;
        }
        let (tu, tv) = (s.apply(&u).unwrap(), s.apply(&v).unwrap());
        for (a, b) in tu.values().iter().zip(tv.values()) {
            prop_assert!(a <= b);
        }
    }

    #[test]
    fn operator_preserves_the_data_range(seed: u64) {
        let s = scheme();
        let (lo, hi) = s.boundary_range();
        let u = random_field(s, seed, lo, hi);
        let tu = s.apply(&u).unwrap();
        for (i, v) in tu.values().iter().enumerate() {
            prop_assert!(v.is_finite() && *v >= lo - 1e-12 && *v <= hi + 1e-12);
            if s.regions()[i] == Region::OuterStrip {
                prop_assert_eq!(*v, s.boundary_values()[i]);
            }
        }
    }

    #[test]
    fn stopping_step_and_absorbed_states(seed: u64, x0 in -0.6f64..0.6, x1 in -0.6f64..0.6) {
        let s = scheme();
        let game = Game::from_scheme(s);
        let p1 = RandomDirection { dim: 2, salt: seed };
        let p2 = Pull::new(point2(1.0, 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = run_game(point2(x0, x1), &p1, &p2, &game, &mut rng, 100_000).unwrap();
        let first = t.states.iter().position(|st| st.c).unwrap();
        prop_assert_eq!(first, t.states.len() - 1);
        prop_assert_eq!(t.tau, Some(first - 1));
        prop_assert_eq!(t.states[first].x, t.states[first - 1].x);
        prop_assert_eq!(t.payoff, Some(s.boundary().eval(&t.states[first].x)));
        let next = crate::game::step(&t.states, &p1, &p2, &game, &mut rng);
        prop_assert!(next.is_err());
    }
}

#[test]
fn refining_directions_settles_the_solution() {
    let domain = Domain::disk([0.0, 0.0], 1.0).unwrap();
    let pfield = ExponentField::constant(4.0).unwrap();
    let f = BoundaryData::random_fourier(8, 6, 3.0, 2);
    let opts = SolveOptions {
        tol: 1e-9,
        ..Default::default()
    };
    let fields: Vec<GridField> = [8, 16, 32, 64]
        .iter()
        .map(|&m| {
            let params = SchemeParams {
                directions: m,
                ..SchemeParams::new(0.25)
            };
            let s = Scheme::new(domain.clone(), pfield.clone(), f.clone(), params).unwrap();
            solve_bracket(&s, &opts).unwrap().midpoint()
        })
        .collect();
    let diffs: Vec<f64> = fields.windows(2).map(|w| w[0].sup_distance(&w[1])).collect();
    assert!(diffs[2] < diffs[0], "{diffs:?}");
    assert!(diffs[2] < 1e-2, "{diffs:?}");
}
