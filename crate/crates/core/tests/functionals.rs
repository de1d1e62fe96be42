use std::f64::consts::PI;
use std::sync::OnceLock;

use capacitary_core::bem::{solve_equilibrium, EquilibriumSolution};
use capacitary_core::functionals::*;
use capacitary_core::geometry::{make_ellipsoid_mesh, make_sphere_mesh, BoundaryFields, TriMesh};
use capacitary_core::oracles::{unit_sphere_area, RadialSolution};
use proptest::prelude::*;

fn sphere3() -> &'static EquilibriumSolution<'static> {
    static MESH: OnceLock<TriMesh> = OnceLock::new();
    static SOL: OnceLock<EquilibriumSolution<'static>> = OnceLock::new();
    SOL.get_or_init(|| {
        let m = MESH.get_or_init(|| make_sphere_mesh(1.0, 3).unwrap());
        solve_equilibrium(m, 6).unwrap()
    })
}

fn spheroid3() -> &'static EquilibriumSolution<'static> {
    static MESH: OnceLock<TriMesh> = OnceLock::new();
    static SOL: OnceLock<EquilibriumSolution<'static>> = OnceLock::new();
    SOL.get_or_init(|| {
        let m = MESH.get_or_init(|| make_ellipsoid_mesh(2.0, 1.0, 1.0, 3).unwrap());
        solve_equilibrium(m, 6).unwrap()
    })
}

#[test]
fn balls_attain_equality_in_every_dimension() {
    for n in 3..=6 {
        let omega = unit_sphere_area(n).unwrap();
        for r in [0.5, 1.0, 2.0] {
            let rep = TheoremReport::for_ball(n, r, 64, DEFAULT_SEED).unwrap();
            let nf = n as f64;
            let expected = (nf - 2.0).powi(3) / 2.0 * omega * r.powi(n as i32 - 4);
            assert!(
                rep.f1_relative().abs() <= 1e-11,
                "n={n} r={r} f1 {}",
                rep.f1
            );
            assert!((rep.f2_lhs - expected).abs() <= 1e-11 * expected);
            assert!((rep.f2_rhs - expected).abs() <= 1e-11 * expected);
            assert!(rep.newton_sup_deficit <= 1e-11);
            assert!(rep.pbv_max_residual <= 1e-11);
            assert!(rep.verdict.ball, "{:?}", rep.verdict.reasons);
        }
    }
}

#[test]
fn oracle_lower_bound_is_eight_pi_squared() {
    for r in [0.5, 1.0, 2.0] {
        let rep = TheoremReport::for_ball(3, r, 8, 1).unwrap();
        let lb = rep.lower_bound.unwrap();
        assert!((lb.product - 8.0 * PI * PI).abs() <= 1e-11 * lb.product);
        assert!((lb.quoted_rhs - 2.0 * PI).abs() < 1e-15);
    }
}

#[test]
fn f1_scales_inversely_with_size() {
    let m = make_ellipsoid_mesh(2.0, 1.0, 1.0, 2).unwrap();
    let s1 = solve_equilibrium(&m, 6).unwrap();
    let f1_1 = f1(&boundary_fields(&s1).unwrap(), 3).unwrap();
    for t in [0.5, 3.0] {
        let mt = m.scaled(t).unwrap();
        let st = solve_equilibrium(&mt, 6).unwrap();
        let f1_t = f1(&boundary_fields(&st).unwrap(), 3).unwrap();
        assert!((f1_t * t - f1_1).abs() <= 1e-9 * f1_1.abs(), "t={t}");
    }
}

#[test]
fn discrete_sphere_is_near_equality() {
    let sol = sphere3();
    let floor = NoiseFloor::of_sphere_solution(sol, DEFAULT_SEED).unwrap();
    assert!(
        floor.f1 < 5e-3 && floor.f2 < 2e-2 && floor.newton < 1e-6,
        "{floor:?}"
    );
    let rep =
        TheoremReport::from_solution(sol, Thresholds::from_noise_floor(&floor), 64, DEFAULT_SEED)
            .unwrap();
    assert!(rep.verdict.ball, "{:?}", rep.verdict.reasons);
    assert!(rep.pbv_max_residual < 1e-10);
    assert_eq!(rep.panels, Some(1280));
    assert_eq!(rep.level, Some(3));
}

#[test]
fn spheroid_is_not_a_ball() {
    let floor = NoiseFloor::of_sphere_solution(sphere3(), DEFAULT_SEED).unwrap();
    let th = Thresholds::from_noise_floor(&floor);
    let rep = TheoremReport::from_solution(spheroid3(), th, 64, DEFAULT_SEED).unwrap();
    assert!(!rep.verdict.ball);
    assert!(rep.f1_relative() > 10.0 * floor.f1);
    assert!(rep.f2_relative_gap() > 0.0);
    assert!(rep.lower_bound.unwrap().product > 8.0 * PI * PI);
    assert!(rep.newton_sup_deficit > 1e3 * floor.newton);
    assert_eq!(rep.verdict.reasons.len(), 3);
    assert!(rep.verdict.reasons[0].starts_with("F1 positive"));
}

#[test]
fn thresholds_below_the_floor_flip_the_verdict() {
    let sol = sphere3();
    let floor = NoiseFloor::of_sphere_solution(sol, DEFAULT_SEED).unwrap();
    let mut th = Thresholds::from_noise_floor(&floor);
    th.newton = 1e-12;
    let rep = TheoremReport::from_solution(sol, th, 64, DEFAULT_SEED).unwrap();
    assert!(!rep.verdict.ball);
    assert_eq!(rep.verdict.reasons.len(), 1);
    assert!(rep.verdict.reasons[0].starts_with("Newton deficit"));
}

#[test]
fn newton_scan_refuses_points_near_the_surface() {
    let sol = sphere3();
    let near = [capacitary_core::Vec3::new(1.001, 0.0, 0.0)];
    assert!(newton_scan(sol, &near).is_err());
}

#[test]
fn empty_fields_are_rejected() {
    let f = BoundaryFields::new(vec![], vec![], vec![]).unwrap();
    assert!(f1(&f, 3).is_err());
    assert!(f2_rhs(12.0, 2).is_err());
}

#[test]
fn sample_points_are_reproducible() {
    let a = sample_points_nd(4, 1.0, 10, 5);
    assert_eq!(a, sample_points_nd(4, 1.0, 10, 5));
    assert_ne!(a, sample_points_nd(4, 1.0, 10, 6));
}

proptest! {
    #[test]
    fn v_transform_of_radial_field_solves_pbv(n in 3usize..7, r in 0.3f64..3.0, s in 1.05f64..8.0) {
        let ball = RadialSolution::new(n, r).unwrap();
        let mut x = vec![0.0; n];
        x[0] = 0.6 * r * s;
        x[n - 1] = 0.8 * r * s;
        let v = v_transform_jet(&ball.potential(&x).unwrap(), n).unwrap();
        prop_assert!(pbv_relative_residual(&v, n).unwrap().abs() <= 1e-11);
        prop_assert!(normalized_newton_deficit(&v).abs() <= 1e-11);
        let direct = ball.v_fields(&x).unwrap();
        prop_assert!((direct.value - v.value).abs() <= 1e-12 * v.value);
    }
}
