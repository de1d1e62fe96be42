use std::f64::consts::PI;
use std::sync::OnceLock;

use capacitary_core::bem::{
    assemble_single_layer, coplanar_inverse_distance_integral, solve_equilibrium,
    solve_equilibrium_with, BemOptions, EquilibriumSolution, SolveMethod,
};
use capacitary_core::geometry::{
    make_bumpy_sphere_mesh, make_ellipsoid_mesh, make_sphere_mesh, TriMesh,
};
use capacitary_core::oracles::ellipsoid_capacity;
use capacitary_core::{Error, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sphere4() -> &'static EquilibriumSolution<'static> {
    static MESH: OnceLock<TriMesh> = OnceLock::new();
    static SOL: OnceLock<EquilibriumSolution<'static>> = OnceLock::new();
    SOL.get_or_init(|| {
        let mesh = MESH.get_or_init(|| make_sphere_mesh(1.0, 4).unwrap());
        solve_equilibrium(mesh, 6).unwrap()
    })
}

fn spheroid3() -> &'static EquilibriumSolution<'static> {
    static MESH: OnceLock<TriMesh> = OnceLock::new();
    static SOL: OnceLock<EquilibriumSolution<'static>> = OnceLock::new();
    SOL.get_or_init(|| {
        let mesh = MESH.get_or_init(|| make_ellipsoid_mesh(2.0, 1.0, 1.0, 3).unwrap());
        solve_equilibrium(mesh, 6).unwrap()
    })
}

/// Adaptive Simpson on `[a, b]`.
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    rec(
        f,
        a,
        b,
        fa,
        fm,
        fb,
        (b - a) / 6.0 * (fa + 4.0 * fm + fb),
        tol,
        50,
    )
}

/// `∫_T 1/|c − y| dA = ∫ ρ(θ) dθ` in polar coordinates about the in-plane
/// point `c`, where `ρ(θ)` is the distance to the boundary along direction θ.
fn polar_self_integral(c: [f64; 2], tri: [[f64; 2]; 3]) -> f64 {
    let mut total = 0.0;
    for k in 0..3 {
        let (a, b) = (tri[k], tri[(k + 1) % 3]);
        let ta = (a[1] - c[1]).atan2(a[0] - c[0]);
        let mut tb = (b[1] - c[1]).atan2(b[0] - c[0]);
        while tb < ta {
            tb += 2.0 * PI;
        }
        let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
        let rho = move |t: f64| {
            let (dx, dy) = (t.cos(), t.sin());
            // c + ρ d = a + s e
            let det = dx * (-ey) - dy * (-ex);
            ((a[0] - c[0]) * (-ey) - (a[1] - c[1]) * (-ex)) / det
        };
        total += simpson(&rho, ta, tb, 1e-13);
    }
    total
}

#[test]
fn self_integral_matches_polar_quadrature() {
    let side = (4.0 / 3.0_f64.sqrt()).sqrt();
    let tri2 = [
        [0.0, 0.0],
        [side, 0.0],
        [0.5 * side, 0.5 * 3.0_f64.sqrt() * side],
    ];
    let c2 = [0.5 * side, 3.0_f64.sqrt() / 6.0 * side];
    let tri = tri2.map(|p| Vec3::new(p[0], p[1], 0.0));
    let exact = coplanar_inverse_distance_integral(Vec3::new(c2[0], c2[1], 0.0), tri);
    let oracle = polar_self_integral(c2, tri2);
    assert!(
        (exact - oracle).abs() <= 1e-8 * oracle,
        "{exact} vs {oracle}"
    );

    let skew = [[0.0, 0.0], [3.0, 0.2], [0.4, 1.1]];
    let c = [1.0, 0.4];
    let got = coplanar_inverse_distance_integral(
        Vec3::new(c[0], c[1], 0.0),
        skew.map(|p| Vec3::new(p[0], p[1], 0.0)),
    );
    let oracle = polar_self_integral(c, skew);
    assert!((got - oracle).abs() <= 1e-8 * oracle);
}

#[test]
fn distant_panels_act_as_point_charges() {
    let h = 0.01;
    let vs = vec![
        Vec3::new(0.0, 0.0, 0.0),
        Vec3::new(h, 0.0, 0.0),
        Vec3::new(0.0, h, 0.0),
        Vec3::new(50.0, 0.0, 0.0),
        Vec3::new(50.0 + h, 0.0, 0.0),
        Vec3::new(50.0, 0.0, h),
    ];
    let mesh = TriMesh::new(vs, vec![[0, 1, 2], [3, 4, 5]]).unwrap();
    let m = assemble_single_layer(&mesh, 6).unwrap();
    let dist = (mesh.centroids()[0] - mesh.centroids()[1]).norm();
    let point = mesh.areas()[1] / (4.0 * PI * dist);
    assert!((m.get(0, 1) - point).abs() <= 1e-3 * point);
}

#[test]
fn collocation_matrix_is_nearly_symmetric() {
    // congruent panels: a planar grid of right triangles
    let k = 8;
    let mut vs = Vec::new();
    for j in 0..=k {
        for i in 0..=k {
            vs.push(Vec3::new(i as f64, j as f64, 0.0));
        }
    }
    let mut ts = Vec::new();
    for j in 0..k {
        for i in 0..k {
            let a = j * (k + 1) + i;
            ts.push([a, a + 1, a + k + 2]);
            ts.push([a, a + k + 2, a + k + 1]);
        }
    }
    let grid = TriMesh::new(vs, ts).unwrap();
    let m = assemble_single_layer(&grid, 6).unwrap();
    assert!(m.asymmetry() / m.max_abs() <= 5e-3);

    let icosahedron = make_sphere_mesh(1.0, 0).unwrap();
    let m = assemble_single_layer(&icosahedron, 6).unwrap();
    assert!(m.asymmetry() / m.max_abs() <= 1e-14);
}

#[test]
fn unknown_quadrature_order_is_rejected() {
    let mesh = make_sphere_mesh(1.0, 1).unwrap();
    assert!(assemble_single_layer(&mesh, 5).is_err());
}

#[test]
fn unit_sphere_capacity_and_density() {
    let sol = sphere4();
    let cap = sol.capacity();
    assert!((cap - 4.0 * PI).abs() <= 0.015 * 4.0 * PI, "cap = {cap}");
    assert!(sol.sigma().iter().all(|s| (s - 1.0).abs() <= 0.03));
    assert!(sol.info().positive);
    assert_eq!(sol.info().method, SolveMethod::DirectLu);
    assert!(sol.info().residual_inf <= 1e-10);
    assert!(sol.info().condition_estimate < 1e12);
    let sum: f64 = sol
        .sigma()
        .iter()
        .zip(sol.mesh().areas())
        .map(|(s, a)| s * a)
        .sum();
    assert!((sum - cap).abs() <= 1e-14 * cap);
    assert_eq!(sol.boundary_gradient(), sol.sigma());
}

#[test]
fn sphere_radius_two() {
    let mesh = make_sphere_mesh(2.0, 3).unwrap();
    let sol = solve_equilibrium(&mesh, 6).unwrap();
    assert!((sol.capacity() - 8.0 * PI).abs() <= 0.015 * 8.0 * PI);
    assert!(sol
        .boundary_gradient()
        .iter()
        .all(|g| (g - 0.5).abs() <= 0.015));
}

#[test]
fn spheroid_capacity_and_density() {
    let sol = spheroid3();
    let oracle = ellipsoid_capacity(2.0, 1.0, 1.0).unwrap();
    assert!((sol.capacity() - oracle).abs() <= 0.02 * oracle);
    assert!(sol.info().positive);
    // the density peaks at the poles x = ±2
    let mesh = sol.mesh();
    let (imax, _) =
        sol.sigma().iter().enumerate().fold(
            (0, f64::MIN),
            |acc, (i, s)| if *s > acc.1 { (i, *s) } else { acc },
        );
    assert!(mesh.centroids()[imax].x.abs() > 1.9);
    let (imin, _) =
        sol.sigma().iter().enumerate().fold(
            (0, f64::MAX),
            |acc, (i, s)| if *s < acc.1 { (i, *s) } else { acc },
        );
    assert!(mesh.centroids()[imin].x.abs() < 0.2);
}

#[test]
fn bumpy_sphere_density_is_positive() {
    let mesh = make_bumpy_sphere_mesh(1.0, 0.05, 3).unwrap();
    let sol = solve_equilibrium(&mesh, 6).unwrap();
    assert!(sol.info().positive);
    assert!(!sol.info().creased);
}

#[test]
fn potential_gradient_and_hessian_far_field() {
    let sol = sphere4();
    let cap = sol.capacity();
    let u = sol.eval_potential(Vec3::new(0.0, 3.0, 4.0)).unwrap();
    assert!((u - 0.2).abs() <= 0.01 * 0.2);

    let x = Vec3::new(600.0, -480.0, 640.0);
    let r = x.norm();
    let u = sol.eval_potential(x).unwrap();
    assert!((u * r * 4.0 * PI - cap).abs() <= 0.01 * cap);

    let g = sol.eval_gradient(x).unwrap();
    let expected = x * (-cap / (4.0 * PI * r.powi(3)));
    assert!((g - expected).norm() <= 0.02 * expected.norm());

    let hess = sol.eval_hessian(x).unwrap();
    let xs = x.to_array();
    let mut worst: f64 = 0.0;
    let scale = cap / (4.0 * PI) * r.powi(-3) * 2.0;
    for i in 0..3 {
        for j in 0..3 {
            let delta = if i == j { 1.0 } else { 0.0 };
            let e = cap / (4.0 * PI) * r.powi(-3) * (3.0 * xs[i] * xs[j] / (r * r) - delta);
            worst = worst.max((hess.get(i, j) - e).abs());
        }
    }
    assert!(worst <= 0.02 * scale, "{worst} vs {scale}");
}

#[test]
fn hessian_is_trace_free() {
    let sol = spheroid3();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let dir = Vec3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        if dir.norm() < 0.1 {
            continue;
        }
        let x = dir.normalized() * rng.gen_range(2.5..8.0);
        let h = sol.eval_hessian(x).unwrap();
        assert!(h.trace().abs() <= 1e-8 * h.frobenius_norm());
    }
}

#[test]
fn evaluation_inside_or_on_surface_is_refused() {
    let sol = spheroid3();
    for x in [
        Vec3::ZERO,
        Vec3::new(1.5, 0.0, 0.0),
        sol.mesh().vertices()[0],
    ] {
        assert!(matches!(
            sol.eval_potential(x),
            Err(Error::OutsideDomain(_))
        ));
    }
    assert!(sol.near_surface_ratio(Vec3::new(2.05, 0.0, 0.0)) < 1.0);
    assert!(sol.near_surface_ratio(Vec3::new(5.0, 0.0, 0.0)) > 1.0);
}

#[test]
fn capacity_three_ways() {
    let sol = sphere4();
    let c = sol.capacity_three_ways(100.0).unwrap();
    for v in [c.charge, c.asymptotic, c.energy] {
        assert!((v - 4.0 * PI).abs() <= 0.015 * 4.0 * PI);
    }
    assert_eq!(c.charge, c.energy);
    assert!(c.spread() <= 5e-3);

    let sol = spheroid3();
    let c = sol.capacity_three_ways(100.0).unwrap();
    assert!(c.spread() <= 0.01);
    assert!(matches!(
        sol.capacity_three_ways(5.0),
        Err(Error::Domain(_))
    ));
}

#[test]
fn capacity_scales_linearly() {
    let mesh = make_ellipsoid_mesh(1.5, 1.0, 0.8, 2).unwrap();
    let base = solve_equilibrium(&mesh, 6).unwrap().capacity();
    for t in [0.5, 2.0, 10.0] {
        let scaled = mesh.scaled(t).unwrap();
        let cap = solve_equilibrium(&scaled, 6).unwrap().capacity();
        assert!((cap - t * base).abs() <= 1e-3 * t * base);
    }
}

#[test]
fn capacity_is_invariant_under_rigid_motions() {
    let mesh = make_ellipsoid_mesh(1.5, 1.0, 0.8, 2).unwrap();
    let base = solve_equilibrium(&mesh, 6).unwrap().capacity();
    let (s, c) = (0.6_f64, 0.8_f64);
    let rotation = [
        [c, -s, 0.0],
        [s * 0.6, c * 0.6, 0.8],
        [-s * 0.8, -c * 0.8, 0.6],
    ];
    let moved = mesh
        .rigidly_moved(rotation, Vec3::new(3.0, -7.0, 2.5))
        .unwrap();
    let cap = solve_equilibrium(&moved, 6).unwrap().capacity();
    assert!((cap - base).abs() <= 1e-10 * base, "{cap} vs {base}");
}

#[test]
fn refinement_reduces_capacity_error() {
    let errors: Vec<f64> = (1..=4)
        .map(|level| {
            let mesh = make_sphere_mesh(1.0, level).unwrap();
            let cap = if level == 4 {
                sphere4().capacity()
            } else {
                solve_equilibrium(&mesh, 6).unwrap().capacity()
            };
            (cap - 4.0 * PI).abs()
        })
        .collect();
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
}

#[test]
fn iterative_and_direct_solves_agree() {
    let mesh = make_bumpy_sphere_mesh(1.0, 0.05, 3).unwrap();
    let direct = solve_equilibrium(&mesh, 6).unwrap();
    let opts = BemOptions {
        direct_max_panels: 0,
        ..BemOptions::default()
    };
    let iterative = solve_equilibrium_with(&mesh, &opts).unwrap();
    assert!(matches!(iterative.info().method, SolveMethod::Gmres { .. }));
    for (a, b) in direct.sigma().iter().zip(iterative.sigma()) {
        assert!((a - b).abs() <= 1e-8);
    }
}

#[test]
fn ill_conditioning_is_refused() {
    let mesh = make_sphere_mesh(1.0, 2).unwrap();
    let opts = BemOptions {
        max_condition: 10.0,
        ..BemOptions::default()
    };
    assert!(matches!(
        solve_equilibrium_with(&mesh, &opts),
        Err(Error::IllConditioned { .. })
    ));
}
