mod common;

use std::f64::consts::PI;

use camel_lab_core::camel::{
    find_camel_points, mode_witness_cloud, reduce_points, reverify_points, swap_counterexample, BaseShape, CamelSearch,
    CoisotropicCylinder, ModeBase, ModeSearch,
};
use camel_lab_core::galerkin::{epsilon_curve, BallSampler};
use camel_lab_core::integrators::{
    flow, flow_generic, interaction_flow, picard_mild, FlowConfig, GaussCollocation, GenericHamiltonianSystem,
};
use camel_lab_core::linear::{apply_exp_tja, lambda};
use camel_lab_core::nonlinearity::h_value;
use camel_lab_core::phase_space::{min_grid_size, to_grid};
use camel_lab_core::{NonlinearitySpec, PhaseVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn coupled_system() -> GenericHamiltonianSystem {
    // H = (q1^2 + p1^2)/2 + p2^2/2 + 0.3 sin(q1) q2.
    GenericHamiltonianSystem::new(4, |_, z| {
        vec![z[0] + 0.3 * z[0].cos() * z[2], z[1], 0.3 * z[0].sin(), z[3]]
    })
    .unwrap()
}

/// Scalar fiber residual on a fixed base; bracketed and bisected.
#[test]
fn camel_points_agree_with_bisection() {
    let sys = coupled_system();
    let t = 0.5;
    let flow_map = |z: &[f64]| flow_generic(z, 0.0, t, 1e-2, &sys);
    let cyl = CoisotropicCylinder::new(2, 1, BaseShape::Ball { r: 1.0 }, 3.0).unwrap();
    let set = find_camel_points(
        flow_map,
        &cyl,
        t,
        &CamelSearch {
            starts: 12,
            seed: 1,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(set.len(), 12);
    assert!(reverify_points(flow_map, &set).unwrap() <= 1e-8);
    for z in &set.points {
        let residual = |q: f64| flow_map(&[z[0], z[1], q, 0.0]).unwrap()[2];
        let (mut lo, mut hi) = (z[2] - 0.5, z[2] + 0.5);
        assert!(residual(lo) * residual(hi) < 0.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if residual(lo) * residual(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        assert!((0.5 * (lo + hi) - z[2]).abs() < 1e-7);
    }
    let reduced = reduce_points(&set, 1);
    assert!(reduced.iter().zip(&set.images).all(|(r, w)| r[..] == w[..2]));
}

#[test]
fn collocation_matches_exact_linear_blocks() {
    for j in [0i64, 1, 3] {
        let l = lambda(j);
        // Per-mode Hamiltonian ((lambda - 1/lambda) a^2 + lambda b^2) / 2.
        let sys = GenericHamiltonianSystem::new(2, move |_, z| vec![(l - 1.0 / l) * z[0], l * z[1]]).unwrap();
        let z = GaussCollocation::new(4)
            .flow(&[0.4, -0.7], 0.0, 1.3, 1e-2, &sys)
            .unwrap();
        let idx = (j + 3) as usize;
        let u = PhaseVector::new(
            3,
            (0..7).map(|i| if i == idx { 0.4 } else { 0.0 }).collect(),
            (0..7).map(|i| if i == idx { -0.7 } else { 0.0 }).collect(),
        )
        .unwrap();
        let w = apply_exp_tja(&u, 1.3);
        assert!(
            (w.a(j) - z[0]).abs() < 1e-12 && (w.b(j) - z[1]).abs() < 1e-12,
            "mode {j}"
        );
    }
}

#[test]
fn picard_and_fine_strang_agree() {
    let spec = NonlinearitySpec::sine_gordon();
    let n = 6;
    let m = min_grid_size(n);
    let u0 = BallSampler::new(n, 1.5).sample(&mut ChaCha8Rng::seed_from_u64(11));
    let mild = picard_mild(&u0, 0.8, &spec, n, m, 1e-12).unwrap().state;
    let fine = flow(&u0, &FlowConfig::strang(n, 2e-4, 0.8), &spec).unwrap();
    assert!((fine.last() - &mild).e_norm() < 1e-7);
}

#[test]
fn interaction_flow_is_identity_without_nonlinearity() {
    let u0 = BallSampler::new(5, 2.0).sample(&mut ChaCha8Rng::seed_from_u64(12));
    let v = interaction_flow(&u0, 2.5, &FlowConfig::strang(5, 1e-2, 2.5), &NonlinearitySpec::zero()).unwrap();
    assert!((&v - &u0).e_norm() < 1e-12);
}

#[test]
fn potential_matches_grid_quadrature() {
    let spec = NonlinearitySpec::sine_gordon();
    let constant = PhaseVector::new(2, vec![0.0, 0.0, PI, 0.0, 0.0], vec![0.0; 5]).unwrap();
    assert!((h_value(&spec, 0.0, &constant, 16).unwrap() - 2.0).abs() < 1e-14);
    let u = BallSampler::new(4, 2.0).sample(&mut ChaCha8Rng::seed_from_u64(13));
    let m = 256;
    let grid = to_grid(&u, m).unwrap();
    let mean = grid.u.iter().map(|x| 1.0 - x.cos()).sum::<f64>() / m as f64;
    assert!((h_value(&spec, 0.0, &u, min_grid_size(4)).unwrap() - mean).abs() < 1e-10);
}

#[test]
fn swap_squeezes_every_base() {
    for (n, k) in [(2, 1), (3, 1), (3, 2), (5, 3)] {
        let cyl = CoisotropicCylinder::new(n, k, BaseShape::Ball { r: 0.7 }, 1.0).unwrap();
        let rep = swap_counterexample(&cyl, 64, 3).unwrap();
        assert!(rep.squeezes, "n = {n}, k = {k}");
        assert_eq!(rep.container_gamma, 0.0);
        assert!((rep.base_capacity.unwrap() - PI * 0.49).abs() < 1e-15);
    }
}

#[test]
fn witness_values_grow_with_budget() {
    let spec = NonlinearitySpec::sine_gordon();
    let cfg = FlowConfig::strang(4, 0.05, 1.0);
    let base = ModeBase::Disk { l: 1, r: 1.0 };
    let mut last: Option<Vec<f64>> = None;
    for starts in [1, 2, 4] {
        let search = ModeSearch {
            starts,
            evals_per_start: 40,
            plus_box: 1.0,
            seed: 2,
        };
        let cloud = mode_witness_cloud(&spec, 1, 1, &base, &cfg, 5, &search).unwrap();
        assert!(cloud.radius >= 0.9, "radius {} with {starts} starts", cloud.radius);
        let values: Vec<f64> = cloud.witnesses.iter().map(|w| w.value).collect();
        if let Some(prev) = &last {
            assert!(values.iter().zip(prev).all(|(v, p)| v >= p));
        }
        last = Some(values);
    }
}

#[test]
fn epsilon_curve_is_reproducible() {
    let spec = NonlinearitySpec::sine_gordon();
    let run = || epsilon_curve(&spec, 1.0, 0.5, &[2, 4, 8], 20, 77, 16, min_grid_size(16)).unwrap();
    let (a, b) = (run(), run());
    assert_eq!(a.raw_errors, b.raw_errors);
    assert_eq!(a.to_csv(&[]), b.to_csv(&[]));
}
