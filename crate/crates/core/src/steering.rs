//! EPR-steering resource of Alice's measurement pair on a shared two-qubit
//! state, after Markovian noise on Alice's side.
//!
//! Bob can simulate Alice's measurement `A` with the POVM `S_ρ(Aᵀ)`, where
//! `S_ρ(A) = ρ_B^{-1/2} tr_A[ρ (A ⊗ Id)] ρ_B^{-1/2}`. The setting is
//! steerable iff those simulated measurements are incompatible, so the
//! steering robustness of a pulse sequence is
//! `I_b(R_ρ M x1, R_ρ M x2)` with `R_ρ: A -> S_ρ(Aᵀ)` and `M` the Heisenberg
//! propagator.

use num_complex::Complex;

use crate::compat::{robustness, robustness_gradient_at};
use crate::lindblad::{
    propagate, propagate_segments, propagate_with_jacobian, ControlHamiltonian, DriftGenerator, PulseSequence, Segment,
    TransferMatrix,
};
use crate::qubit::{
    effect_to_matrix, mul2, require_effect, validate_effect, BipartiteState, FourVector, HermitianMatrix2,
};
use crate::{Error, Result, Scalar};

/// Bob's marginal is treated as rank deficient below this eigenvalue.
pub const MARGINAL_RANK_TOL: f64 = 1e-12;

/// Everything that defines the steering cost function apart from the pulses.
#[derive(Clone, Debug, PartialEq)]
pub struct SteeringScenario<T> {
    rho: BipartiteState<T>,
    x1: FourVector<T>,
    x2: FourVector<T>,
    drift: DriftGenerator<T>,
    control: ControlHamiltonian<T>,
    b: T,
    resource: TransferMatrix<T>,
}

impl<T: Scalar> SteeringScenario<T> {
    pub fn new(
        rho: BipartiteState<T>,
        x1: FourVector<T>,
        x2: FourVector<T>,
        drift: DriftGenerator<T>,
        control: ControlHamiltonian<T>,
        b: T,
    ) -> Result<Self> {
        require_effect(x1)?;
        require_effect(x2)?;
        if !(b > -T::one() && b < T::one()) {
            return Err(Error::InvalidParameter(format!("bias b = {b} not in (-1, 1)")));
        }
        let resource = resource_map(&rho)?;
        Ok(Self { rho, x1, x2, drift, control, b, resource })
    }

    /// Maximally entangled state, sharp `(σx, σz)`, `H = σy + σz`, `b = 0`.
    pub fn standard(drift: DriftGenerator<T>) -> Self {
        Self::new(
            BipartiteState::max_entangled(),
            FourVector::sharp_x(),
            FourVector::sharp_z(),
            drift,
            ControlHamiltonian::sigma_y_plus_z(),
            T::zero(),
        )
        .expect("standard scenario is valid")
    }

    pub fn rho(&self) -> &BipartiteState<T> {
        &self.rho
    }

    pub fn measurements(&self) -> (FourVector<T>, FourVector<T>) {
        (self.x1, self.x2)
    }

    pub fn drift(&self) -> &DriftGenerator<T> {
        &self.drift
    }

    pub fn control(&self) -> &ControlHamiltonian<T> {
        &self.control
    }

    pub fn bias(&self) -> T {
        self.b
    }

    /// The cached matrix of `R_ρ`.
    pub fn resource(&self) -> &TransferMatrix<T> {
        &self.resource
    }

    /// Bob's simulating effects `(R_ρ M x1, R_ρ M x2)` for a Heisenberg
    /// propagator `M`.
    pub fn bob_effects(&self, m: &TransferMatrix<T>) -> (FourVector<T>, FourVector<T>) {
        let total = self.resource.compose(m);
        (total.apply(self.x1), total.apply(self.x2))
    }

    /// Robustness of Bob's effects after Heisenberg propagator `m`.
    pub fn robustness_after(&self, m: &TransferMatrix<T>) -> Result<T> {
        let (y1, y2) = self.bob_effects(m);
        if !validate_effect(y1) || !validate_effect(y2) {
            return Err(Error::Internal("propagated effects left the effect cone".into()));
        }
        robustness(y1, y2, self.b)
    }
}

/// Conditional states `σ_{a|i}`: `[[σ_{+|1}, σ_{-|1}], [σ_{+|2}, σ_{-|2}]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Assemblage<T> {
    pub members: [[HermitianMatrix2<T>; 2]; 2],
}

impl<T: Scalar> Assemblage<T> {
    pub fn get(&self, measurement: usize, outcome: usize) -> &HermitianMatrix2<T> {
        &self.members[measurement][outcome]
    }
}

/// `tr_A[ρ (A ⊗ Id)]` for a 2x2 matrix `A`.
fn conditional<T: Scalar>(rho: &BipartiteState<T>, a: &[[Complex<T>; 2]; 2]) -> HermitianMatrix2<T> {
    let r = rho.matrix();
    let mut out = [[Complex::new(T::zero(), T::zero()); 2]; 2];
    for (b, row) in out.iter_mut().enumerate() {
        for (b2, o) in row.iter_mut().enumerate() {
            let mut acc = Complex::new(T::zero(), T::zero());
            for i in 0..2 {
                for k in 0..2 {
                    acc += r[2 * i + b][2 * k + b2] * a[k][i];
                }
            }
            *o = acc;
        }
    }
    hermitize(out)
}

/// Symmetrizes away rounding-level anti-Hermitian parts.
fn hermitize<T: Scalar>(m: [[Complex<T>; 2]; 2]) -> HermitianMatrix2<T> {
    let h = T::half();
    let off = (m[0][1] + m[1][0].conj()) * h;
    HermitianMatrix2::new([
        [Complex::new(m[0][0].re, T::zero()), off],
        [off.conj(), Complex::new(m[1][1].re, T::zero())],
    ])
    .expect("symmetrized matrix is Hermitian")
}

/// Bob's reduced state `ρ_B = tr_A ρ`.
pub fn bob_marginal<T: Scalar>(rho: &BipartiteState<T>) -> HermitianMatrix2<T> {
    let id = effect_to_matrix(FourVector::<T>::identity());
    conditional(rho, id.entries())
}

/// The assemblage produced by Alice's binary measurements `x1`, `x2`; the
/// outcomes are the effect and its complement.
pub fn assemblage<T: Scalar>(rho: &BipartiteState<T>, x1: FourVector<T>, x2: FourVector<T>) -> Result<Assemblage<T>> {
    require_effect(x1)?;
    require_effect(x2)?;
    let member = |x: FourVector<T>| conditional(rho, effect_to_matrix(x).entries());
    let comp = crate::qubit::complement;
    Ok(Assemblage { members: [[member(x1), member(comp(x1))], [member(x2), member(comp(x2))]] })
}

/// `ρ_B^{-1/2}`; fails if `ρ_B` is rank deficient.
pub fn marginal_inverse_sqrt<T: Scalar>(rho: &BipartiteState<T>) -> Result<HermitianMatrix2<T>> {
    let rb = bob_marginal(rho);
    let min_eig = rb.eigenvalues()[0];
    if !(min_eig > T::lit(MARGINAL_RANK_TOL)) {
        return Err(Error::RankDeficientMarginal(min_eig.to_f64_lossy()));
    }
    Ok(rb.map_spectrum(|l| T::one() / l.sqrt()))
}

/// Pauli-basis matrix of `R_ρ: A -> S_ρ(Aᵀ)`. Unital; the identity for the
/// maximally entangled state.
pub fn resource_map<T: Scalar>(rho: &BipartiteState<T>) -> Result<TransferMatrix<T>> {
    let s = marginal_inverse_sqrt(rho)?;
    let mut m = TransferMatrix::zeros();
    for j in 0..4 {
        let mut basis = [T::zero(); 4];
        basis[j] = T::one();
        // transpose of σ_j: only σy changes sign
        let mut transposed = basis;
        transposed[2] = -transposed[2];
        let a = HermitianMatrix2::from_pauli(transposed);
        let cond = conditional(rho, a.entries());
        let image = hermitize(mul2(&mul2(s.entries(), cond.entries()), s.entries()));
        // M[k][j] = tr(R(σ_j) σ_k) / 2
        let coeffs = image.pauli_coefficients();
        for (k, c) in coeffs.iter().enumerate() {
            m.0[(k, j)] = *c;
        }
    }
    Ok(m)
}

/// The steering cost `f(c) = I_b(R_ρ M_c x1, R_ρ M_c x2)`; nonzero iff the
/// noisy setting is steerable.
pub fn steering_robustness<T: Scalar>(s: &SteeringScenario<T>, p: &PulseSequence<T>) -> Result<T> {
    let m = propagate(&s.drift, &s.control, p);
    s.robustness_after(&m)
}

/// Steering robustness for an explicit list of segments.
pub fn steering_robustness_segments<T: Scalar>(s: &SteeringScenario<T>, segments: &[Segment<T>]) -> Result<T> {
    let m = propagate_segments(&s.drift, &s.control, segments);
    s.robustness_after(&m)
}

/// Gradient of the steering cost with respect to the pulse amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct SteeringGradient<T> {
    pub value: T,
    pub gradient: Vec<T>,
    /// The point is non-steerable and the gradient is the zero vector.
    pub flat: bool,
}

/// `∂f/∂c_k = Σ_i <∂I/∂y_i, R_ρ (∂M/∂c_k) x_i>` with `y_i = R_ρ M x_i`.
///
/// At non-steerable points the zero vector is returned with `flat` set. At
/// steerable points where the monotone is not differentiable (sharp Bob
/// effects) the error from [`robustness_gradient_at`] is propagated.
pub fn steering_gradient<T: Scalar>(s: &SteeringScenario<T>, p: &PulseSequence<T>) -> Result<SteeringGradient<T>> {
    let (m, jac) = propagate_with_jacobian(&s.drift, &s.control, p);
    let value = s.robustness_after(&m)?;
    if value == T::zero() {
        return Ok(SteeringGradient { value, gradient: vec![T::zero(); p.len()], flat: true });
    }
    let (y1, y2) = s.bob_effects(&m);
    let (g1, g2) = robustness_gradient_at(y1, y2, s.b, value)?;
    let gradient = jac
        .iter()
        .map(|dm| {
            let dr = s.resource.compose(dm);
            g1.dot(dr.apply(s.x1)) + g2.dot(dr.apply(s.x2))
        })
        .collect();
    Ok(SteeringGradient { value, gradient, flat: false })
}
