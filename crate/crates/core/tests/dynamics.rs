mod common;

use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;
use steerctl_core::dense::Mat;
use steerctl_core::lindblad::{propagate, propagate_with_jacobian};
use steerctl_core::*;

fn random_drift(rng: &mut rand_chacha::ChaCha8Rng) -> DriftGenerator<f64> {
    let gamma = rng.gen_range(0.0..0.5);
    if rng.gen_bool(0.5) {
        DriftGenerator::amplitude_damping(gamma).unwrap()
    } else {
        DriftGenerator::dephasing(gamma).unwrap()
    }
}

fn random_pulse(rng: &mut rand_chacha::ChaCha8Rng, m: usize) -> PulseSequence<f64> {
    let dt = rng.gen_range(0.01..0.4);
    PulseSequence::new(dt, (0..m).map(|_| rng.gen_range(-15.0..15.0)).collect()).unwrap()
}

fn to_na<const N: usize>(m: &Mat<f64, N>) -> DMatrix<f64> {
    DMatrix::from_fn(N, N, |i, j| m[(i, j)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn expm_matches_nalgebra(entries in prop::collection::vec(-4.0f64..4.0, 16), scale in 0.01f64..8.0) {
        let mut a = Mat::<f64, 4>::zeros();
        for (k, v) in entries.iter().enumerate() {
            a[(k / 4, k % 4)] = v * scale;
        }
        let ours = to_na(&a.expm());
        let theirs = to_na(&a).exp();
        let err = (&ours - &theirs).abs().max() / theirs.abs().max().max(1.0);
        prop_assert!(err < 1e-10, "relative error {err:e}");
    }

    #[test]
    fn frechet_matches_central_differences(
        a in prop::collection::vec(-2.0f64..2.0, 16),
        e in prop::collection::vec(-1.0f64..1.0, 16),
    ) {
        let mut am = TransferMatrix::zeros();
        let mut em = TransferMatrix::zeros();
        for k in 0..16 {
            am.0[(k / 4, k % 4)] = a[k];
            em.0[(k / 4, k % 4)] = e[k];
        }
        let (_, d) = expm_frechet(&am, &em);
        let h = 1e-6;
        let fd = am.add(&em.scale(h)).expm().sub(&am.sub(&em.scale(h)).expm()).scale(0.5 / h);
        let err = d.max_abs_diff(&fd) / fd.0.max_abs().max(1e-3);
        prop_assert!(err < 1e-6, "relative error {err:e}");
    }
}

#[test]
fn jacobian_matches_finite_differences() {
    let mut rng = rng(21);
    for _ in 0..100 {
        let drift = random_drift(&mut rng);
        let h = ControlHamiltonian::new(unit_vector(&mut rng)).unwrap();
        let m = rng.gen_range(1..=8);
        let p = random_pulse(&mut rng, m);
        let jac = propagator_jacobian(&drift, &h, &p);
        for k in 0..m {
            let shifted = |d: f64| {
                let mut c = p.amplitudes().to_vec();
                c[k] += d;
                propagate(&drift, &h, &p.with_amplitudes(c).unwrap())
            };
            let fd = shifted(1e-6).sub(&shifted(-1e-6)).scale(0.5e6);
            let err = jac[k].max_abs_diff(&fd) / fd.0.max_abs().max(1e-3);
            assert!(err < 1e-6, "slot {k}: relative error {err:e}");
        }
    }
}

#[test]
fn jacobian_comes_with_the_propagator() {
    let mut rng = rng(22);
    let drift = random_drift(&mut rng);
    let h = ControlHamiltonian::sigma_y_plus_z();
    let p = random_pulse(&mut rng, 5);
    let (m, _) = propagate_with_jacobian(&drift, &h, &p);
    assert!(m.max_abs_diff(&propagate(&drift, &h, &p)) < 1e-13);
}

#[test]
fn propagation_preserves_valid_effects() {
    let mut rng = rng(23);
    for _ in 0..10_000 {
        let drift = random_drift(&mut rng);
        let h = ControlHamiltonian::new(unit_vector(&mut rng)).unwrap();
        let m = rng.gen_range(1..=4);
        let p = random_pulse(&mut rng, m);
        let x = random_effect(&mut rng, 1e-9);
        let y = propagate(&drift, &h, &p).apply(x);
        assert!(validate_effect(y), "{x:?} -> {y:?}");
    }
}

#[test]
fn propagator_is_unital_and_composes() {
    let mut rng = rng(24);
    for _ in 0..200 {
        let drift = random_drift(&mut rng);
        let h = ControlHamiltonian::sigma_y_plus_z();
        let p = random_pulse(&mut rng, 6);
        let m = propagate(&drift, &h, &p);
        assert!(m.is_unital());
        let (a, b) = p.amplitudes().split_at(3);
        let first = propagate(&drift, &h, &PulseSequence::new(p.dt(), a.to_vec()).unwrap());
        let second = propagate(&drift, &h, &PulseSequence::new(p.dt(), b.to_vec()).unwrap());
        assert!(first.compose(&second).max_abs_diff(&m) < 1e-12);
    }
}

#[test]
fn heisenberg_and_schrodinger_pictures_agree() {
    let mut rng = rng(25);
    for _ in 0..300 {
        let drift = random_drift(&mut rng);
        let hv = unit_vector(&mut rng);
        let m = rng.gen_range(1..=5);
        let p = random_pulse(&mut rng, m);
        let n = unit_vector(&mut rng);
        let r = rng.gen_range(0.0..1.0);
        let state = FourVector::from_bloch(1.0, [r * n[0], r * n[1], r * n[2]]);
        let evolved = pauli_vector(&schrodinger_evolve(&drift, hv, p.dt(), p.amplitudes(), &density(state)));
        let heis = propagate(&drift, &ControlHamiltonian::new(hv).unwrap(), &p);
        assert!(heis.schrodinger().apply(state).max_abs_diff(evolved) < 1e-10);

        // <A, Φ(ρ)> = <Φ*(A), ρ>
        let a = random_effect(&mut rng, 0.0);
        let lhs = a.dot(evolved);
        let rhs = heis.apply(a).dot(state);
        assert!((lhs - rhs).abs() < 1e-10);
    }
}

#[test]
fn single_precision_instantiation() {
    let d = DriftGenerator::<f32>::dephasing(0.1).unwrap();
    let p = PulseSequence::<f32>::zeros(1.0, 4).unwrap();
    let m = propagate(&d, &ControlHamiltonian::sigma_y_plus_z(), &p);
    let want = (-0.2f32).exp();
    assert!((m.get(1, 1) - want).abs() < 1e-5);
    assert!((m.get(3, 3) - want).abs() < 1e-5);
}
