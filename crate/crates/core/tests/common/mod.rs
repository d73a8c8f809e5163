//! Random generators and independent oracles shared by the integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use nalgebra::DMatrix;
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use steerctl_core::{BipartiteState, DriftGenerator, DriftKind, FourVector, HermitianMatrix2, TransferMatrix};

pub type V = FourVector<f64>;
pub type M2 = [[C; 2]; 2];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn unit_vector(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-3 && n <= 1.0 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

/// Effect whose distance to the boundary of the effect set is at least
/// `margin` in both cone conditions.
pub fn random_effect(rng: &mut ChaCha8Rng, margin: f64) -> V {
    let n = unit_vector(rng);
    let r = rng.gen_range(0.0..(1.0 - margin));
    let x0 = rng.gen_range((r + margin)..=(2.0 - r - margin));
    FourVector::from_bloch(x0, [r * n[0], r * n[1], r * n[2]])
}

/// Effect on the boundary of the effect set (a projector when `x0 = 1`).
pub fn random_sharp(rng: &mut ChaCha8Rng) -> V {
    FourVector::from_bloch(1.0, unit_vector(rng))
}

pub fn random_gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Full-rank two-qubit state: a random mixed state `GG†/tr`, mixed with the
/// maximally entangled state with weight `w`.
pub fn random_state(rng: &mut ChaCha8Rng, w: f64) -> BipartiteState<f64> {
    let mut g = [[c(0.0, 0.0); 4]; 4];
    for row in g.iter_mut() {
        for e in row.iter_mut() {
            *e = c(random_gaussian(rng), random_gaussian(rng));
        }
    }
    let mut rho = [[c(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            rho[i][j] = (0..4).map(|k| g[i][k] * g[j][k].conj()).sum();
        }
    }
    let tr: f64 = (0..4).map(|i| rho[i][i].re).sum();
    let phi = BipartiteState::<f64>::max_entangled();
    for i in 0..4 {
        for j in 0..4 {
            rho[i][j] = rho[i][j] * ((1.0 - w) / tr) + phi.matrix()[i][j] * w;
        }
    }
    // exact Hermiticity
    for i in 0..4 {
        rho[i][i].im = 0.0;
        for j in 0..i {
            rho[i][j] = rho[j][i].conj();
        }
    }
    BipartiteState::new(rho).expect("random state is valid")
}

pub fn mul(a: &M2, b: &M2) -> M2 {
    let mut o = [[c(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            o[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    o
}

pub fn adjoint(a: &M2) -> M2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

pub fn hermitian(a: &M2) -> HermitianMatrix2<f64> {
    let d = adjoint(a);
    let mut h = [[c(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            h[i][j] = (a[i][j] + d[i][j]) * 0.5;
        }
    }
    HermitianMatrix2::new(h).expect("symmetrized")
}

/// Kraus operators of a random channel with `k` outputs, read off a Haar-like
/// isometry `V = G (G†G)^{-1/2}` from `C^2` into `C^2 ⊗ C^k`.
pub fn random_kraus(rng: &mut ChaCha8Rng, k: usize) -> Vec<M2> {
    let g: Vec<[C; 2]> = (0..2 * k)
        .map(|_| [c(random_gaussian(rng), random_gaussian(rng)), c(random_gaussian(rng), random_gaussian(rng))])
        .collect();
    let mut gg = [[c(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            gg[i][j] = g.iter().map(|row| row[i].conj() * row[j]).sum();
        }
    }
    let s = hermitian(&gg).map_spectrum(|l| 1.0 / l.sqrt());
    let v: Vec<[C; 2]> = g
        .iter()
        .map(|row| {
            let e = s.entries();
            [row[0] * e[0][0] + row[1] * e[1][0], row[0] * e[0][1] + row[1] * e[1][1]]
        })
        .collect();
    (0..k).map(|i| [v[2 * i], v[2 * i + 1]]).collect()
}

/// Heisenberg picture `A -> Σ K† A K` applied to an effect.
pub fn heisenberg_apply(kraus: &[M2], x: V) -> V {
    let a = *steerctl_core::effect_to_matrix(x).entries();
    let mut out = [[c(0.0, 0.0); 2]; 2];
    for k in kraus {
        let t = mul(&mul(&adjoint(k), &a), k);
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] += t[i][j];
            }
        }
    }
    steerctl_core::effect_from_matrix(&hermitian(&out))
}

/// Pauli transfer matrix of the Heisenberg-picture channel.
pub fn heisenberg_ptm(kraus: &[M2]) -> TransferMatrix<f64> {
    let mut m = TransferMatrix::zeros();
    for j in 0..4 {
        let mut e = [0.0; 4];
        e[j] = 1.0;
        let img = heisenberg_apply(kraus, FourVector::from_array(e));
        for (k, v) in img.to_array().iter().enumerate() {
            m.0[(k, j)] = *v;
        }
    }
    m
}

/// Schrödinger-picture Lindbladian on row-major `vec(ρ)` for the drift
/// `g` plus control Hamiltonian `c (h·σ)`, built from jump operators.
pub fn lindbladian(g: &DriftGenerator<f64>, h: [f64; 3], amp: f64) -> DMatrix<C> {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    let sx = DMatrix::from_row_slice(2, 2, &[z, one, one, z]);
    let sy = DMatrix::from_row_slice(2, 2, &[z, -i, i, z]);
    let sz = DMatrix::from_row_slice(2, 2, &[one, z, z, -one]);
    let ham = (&sx * c(h[0], 0.0) + &sy * c(h[1], 0.0) + &sz * c(h[2], 0.0)) * c(amp, 0.0);
    let gamma = g.gamma();
    let jumps: Vec<DMatrix<C>> = match g.kind() {
        // |1><0| at rate 2γ
        DriftKind::AmplitudeDamping => {
            vec![DMatrix::from_row_slice(2, 2, &[z, z, one, z]) * c((2.0 * gamma).sqrt(), 0.0)]
        }
        // dephasing in the σy basis
        DriftKind::Dephasing => vec![sy.clone() * c(gamma.sqrt(), 0.0)],
        DriftKind::Custom => panic!("no jump operators for a custom generator"),
    };
    let id = DMatrix::<C>::identity(2, 2);
    // row-major vec: vec(AXB) = (A ⊗ Bᵀ) vec(X)
    let left = |a: &DMatrix<C>| a.kronecker(&id);
    let right = |b: &DMatrix<C>| id.kronecker(&b.transpose());
    let mut l = (left(&ham) - right(&ham)) * (-i);
    for jmp in &jumps {
        let jd = jmp.adjoint();
        let jdj = &jd * jmp;
        l += jmp.kronecker(&jd.transpose());
        l -= (left(&jdj) + right(&jdj)) * c(0.5, 0.0);
    }
    l
}

pub fn density(r: V) -> DMatrix<C> {
    let h = steerctl_core::effect_to_matrix(r);
    let e = h.entries();
    DMatrix::from_row_slice(2, 2, &[e[0][0], e[0][1], e[1][0], e[1][1]])
}

/// Pauli vector `(tr ρ, tr ρσx, tr ρσy, tr ρσz)` of a 2x2 matrix.
pub fn pauli_vector(m: &DMatrix<C>) -> V {
    let e = [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]];
    let h = HermitianMatrix2::new(e).expect("Hermitian output");
    steerctl_core::effect_from_matrix(&h)
}

/// Evolves a 2x2 density matrix through the segments with dense complex
/// exponentials of the vectorized Lindbladian.
pub fn schrodinger_evolve(g: &DriftGenerator<f64>, h: [f64; 3], dt: f64, amps: &[f64], rho: &DMatrix<C>) -> DMatrix<C> {
    let mut v = DMatrix::from_row_slice(4, 1, &[rho[(0, 0)], rho[(0, 1)], rho[(1, 0)], rho[(1, 1)]]);
    for &a in amps {
        let prop = (lindbladian(g, h, a) * c(dt, 0.0)).exp();
        v = prop * v;
    }
    DMatrix::from_row_slice(2, 2, &[v[0], v[1], v[2], v[3]])
}

/// Central finite difference of `f` at `x` along each coordinate.
pub fn central_fd(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    (0..x.len())
        .map(|k| {
            let mut p = x.to_vec();
            let mut m = x.to_vec();
            p[k] += h;
            m[k] -= h;
            (f(&p) - f(&m)) / (2.0 * h)
        })
        .collect()
}

/// `‖a - b‖∞ / max(‖b‖∞, floor)`.
pub fn rel_err(a: &[f64], b: &[f64], floor: f64) -> f64 {
    let diff = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    let scale = b.iter().fold(0.0f64, |m, y| m.max(y.abs())).max(floor);
    diff / scale
}
