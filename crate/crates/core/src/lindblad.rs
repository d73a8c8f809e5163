//! Markovian qubit dynamics in the Heisenberg picture.
//!
//! Maps are 4x4 real transfer matrices acting on effect 4-vectors in the
//! (Id, σx, σy, σz) basis. A piecewise-constant pulse sequence
//! `c_1, ..., c_m` of slot length `dt` evolves states by
//! `exp(dt L_{c_m}) ... exp(dt L_{c_1})`; its Heisenberg adjoint, which is
//! what acts on effects, is the reversed product
//! `exp(dt L*_{c_1}) ... exp(dt L*_{c_m})` with `L*_c = L*_0 + c K`.

use crate::dense::Mat;
use crate::qubit::FourVector;
use crate::{Error, Result, Scalar};

/// Unitality tolerance for transfer matrices and custom generators.
pub const UNITAL_TOL: f64 = 1e-10;

/// 4x4 real matrix in the (Id, σx, σy, σz) basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransferMatrix<T>(pub Mat<T, 4>);

impl<T: Scalar> Default for TransferMatrix<T> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<T: Scalar> TransferMatrix<T> {
    pub fn identity() -> Self {
        Self(Mat::identity())
    }

    pub fn zeros() -> Self {
        Self(Mat::zeros())
    }

    pub fn from_rows(rows: [[T; 4]; 4]) -> Self {
        Self(Mat::from_rows(rows))
    }

    pub fn from_diagonal(d: [T; 4]) -> Self {
        Self(Mat::from_diagonal(d))
    }

    pub fn rows(&self) -> &[[T; 4]; 4] {
        &self.0.rows
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.0.rows[i][j]
    }

    pub fn apply(&self, x: FourVector<T>) -> FourVector<T> {
        x.transform(&self.0)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self(self.0 * other.0)
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn scale(&self, s: T) -> Self {
        Self(self.0.scale(s))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0 + other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(self.0 - other.0)
    }

    pub fn expm(&self) -> Self {
        Self(self.0.expm())
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        (self.0 - other.0).max_abs()
    }

    /// Deviation of `M (2,0,0,0)^T` from `(2,0,0,0)^T`.
    pub fn unitality_defect(&self) -> T {
        let id = FourVector::identity();
        self.apply(id).max_abs_diff(id)
    }

    pub fn is_unital(&self) -> bool {
        self.unitality_defect() <= T::lit(UNITAL_TOL)
    }

    /// Schrödinger-picture transfer matrix of the map whose Heisenberg
    /// matrix is `self`. The Pauli basis is orthogonal with uniform norm, so
    /// this is the transpose.
    pub fn schrodinger(&self) -> Self {
        self.transpose()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DriftKind {
    AmplitudeDamping,
    Dephasing,
    Custom,
}

/// Drift Lindbladian `L_0`.
///
/// Amplitude damping is `γ(2σ- ρ σ+ - {σ+σ-, ρ})` with `σ- = |g><e|` and
/// `σz|e> = |e>`, so populations relax toward `<σz> = -1`. Dephasing is
/// `γ(σy ρ σy - ρ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriftGenerator<T> {
    kind: DriftKind,
    gamma: T,
    custom: Option<TransferMatrix<T>>,
}

impl<T: Scalar> DriftGenerator<T> {
    pub fn amplitude_damping(gamma: T) -> Result<Self> {
        Self::check_gamma(gamma)?;
        Ok(Self { kind: DriftKind::AmplitudeDamping, gamma, custom: None })
    }

    pub fn dephasing(gamma: T) -> Result<Self> {
        Self::check_gamma(gamma)?;
        Ok(Self { kind: DriftKind::Dephasing, gamma, custom: None })
    }

    /// A generator given directly as its Heisenberg Pauli-basis matrix. It
    /// must annihilate the identity (first column zero).
    pub fn custom(heisenberg: TransferMatrix<T>) -> Result<Self> {
        let tol = T::lit(UNITAL_TOL);
        let defect = (0..4).map(|i| heisenberg.get(i, 0).abs()).fold(T::zero(), T::max);
        if !(defect <= tol) || !heisenberg.0.is_finite() {
            return Err(Error::InvalidGenerator(format!(
                "custom generator does not annihilate the identity (defect {defect:e})"
            )));
        }
        Ok(Self { kind: DriftKind::Custom, gamma: T::zero(), custom: Some(heisenberg) })
    }

    fn check_gamma(gamma: T) -> Result<()> {
        if gamma >= T::zero() && gamma.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidGenerator(format!("rate gamma = {gamma} must be >= 0")))
        }
    }

    pub fn kind(&self) -> DriftKind {
        self.kind
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }
}

/// Control Hamiltonian `H = h1 σx + h2 σy + h3 σz`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ControlHamiltonian<T> {
    pub h: [T; 3],
}

impl<T: Scalar> ControlHamiltonian<T> {
    pub fn new(h: [T; 3]) -> Result<Self> {
        if h.iter().all(|v| v.is_finite()) {
            Ok(Self { h })
        } else {
            Err(Error::InvalidParameter("control Hamiltonian entries must be finite".into()))
        }
    }

    /// `σy + σz`.
    pub fn sigma_y_plus_z() -> Self {
        Self { h: [T::zero(), T::one(), T::one()] }
    }
}

/// Piecewise-constant amplitudes `c_1, ..., c_m`, each held for `dt`.
#[derive(Clone, Debug, PartialEq)]
pub struct PulseSequence<T> {
    dt: T,
    amplitudes: Vec<T>,
}

impl<T: Scalar> PulseSequence<T> {
    pub fn new(dt: T, amplitudes: Vec<T>) -> Result<Self> {
        if !(dt > T::zero() && dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("slot duration dt = {dt} must be > 0")));
        }
        if amplitudes.is_empty() {
            return Err(Error::InvalidParameter("pulse sequence needs at least one slot".into()));
        }
        if amplitudes.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("pulse amplitudes must be finite".into()));
        }
        Ok(Self { dt, amplitudes })
    }

    /// `m` zero-amplitude slots spanning total time `total`.
    pub fn zeros(total: T, m: usize) -> Result<Self> {
        let dt = total / T::lit(m.max(1) as f64);
        Self::new(dt, vec![T::zero(); m])
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn amplitudes(&self) -> &[T] {
        &self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn total_time(&self) -> T {
        self.dt * T::lit(self.amplitudes.len() as f64)
    }

    /// Same slot duration with new amplitudes.
    pub fn with_amplitudes(&self, amplitudes: Vec<T>) -> Result<Self> {
        Self::new(self.dt, amplitudes)
    }
}

/// One constant-amplitude segment of arbitrary duration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment<T> {
    pub duration: T,
    pub amplitude: T,
}

/// Heisenberg Pauli-basis matrix of the drift generator `L*_0`.
pub fn drift_matrix<T: Scalar>(g: &DriftGenerator<T>) -> TransferMatrix<T> {
    let z = T::zero();
    let gamma = g.gamma;
    let two_gamma = T::two() * gamma;
    match g.kind {
        // L*(σx) = -γσx, L*(σy) = -γσy, L*(σz) = -2γ(Id + σz)
        DriftKind::AmplitudeDamping => TransferMatrix::from_rows([
            [z, z, z, -two_gamma],
            [z, -gamma, z, z],
            [z, z, -gamma, z],
            [z, z, z, -two_gamma],
        ]),
        DriftKind::Dephasing => TransferMatrix::from_diagonal([z, -two_gamma, z, -two_gamma]),
        DriftKind::Custom => g.custom.unwrap_or_default(),
    }
}

/// Pauli-basis matrix `K` of `A -> i[H, A]`, the Heisenberg adjoint of
/// `-i[H, .]`. On Bloch parts it acts as `a -> -2 h × a`.
pub fn control_matrix<T: Scalar>(h: &ControlHamiltonian<T>) -> TransferMatrix<T> {
    let z = T::zero();
    let two = T::two();
    let [h1, h2, h3] = h.h;
    TransferMatrix::from_rows([
        [z, z, z, z],
        [z, z, two * h3, -two * h2],
        [z, -two * h3, z, two * h1],
        [z, two * h2, -two * h1, z],
    ])
}

/// Heisenberg generator `L*_c = L*_0 + c K` for one amplitude.
pub fn generator<T: Scalar>(drift: &TransferMatrix<T>, control: &TransferMatrix<T>, c: T) -> TransferMatrix<T> {
    drift.add(&control.scale(c))
}

/// Heisenberg adjoint of the pulse-sequence channel,
/// `exp(dt L*_{c_1}) ... exp(dt L*_{c_m})`.
pub fn propagate<T: Scalar>(
    g: &DriftGenerator<T>,
    h: &ControlHamiltonian<T>,
    p: &PulseSequence<T>,
) -> TransferMatrix<T> {
    let drift = drift_matrix(g);
    let control = control_matrix(h);
    p.amplitudes
        .iter()
        .fold(TransferMatrix::identity(), |acc, &c| acc.compose(&generator(&drift, &control, c).scale(p.dt).expm()))
}

/// Heisenberg adjoint for segments listed in chronological order.
pub fn propagate_segments<T: Scalar>(
    g: &DriftGenerator<T>,
    h: &ControlHamiltonian<T>,
    segments: &[Segment<T>],
) -> TransferMatrix<T> {
    let drift = drift_matrix(g);
    let control = control_matrix(h);
    segments.iter().fold(TransferMatrix::identity(), |acc, s| {
        acc.compose(&generator(&drift, &control, s.amplitude).scale(s.duration).expm())
    })
}

/// `(exp(A), D)` where `D` is the Fréchet derivative of the exponential at
/// `A` in direction `E`, read off the upper-right block of
/// `exp([[A, E], [0, A]])`.
pub fn expm_frechet<T: Scalar>(a: &TransferMatrix<T>, e: &TransferMatrix<T>) -> (TransferMatrix<T>, TransferMatrix<T>) {
    let mut block = Mat::<T, 8>::zeros();
    for i in 0..4 {
        for j in 0..4 {
            block[(i, j)] = a.get(i, j);
            block[(i + 4, j + 4)] = a.get(i, j);
            block[(i, j + 4)] = e.get(i, j);
        }
    }
    let big = block.expm();
    let mut exp_a = TransferMatrix::zeros();
    let mut d = TransferMatrix::zeros();
    for i in 0..4 {
        for j in 0..4 {
            exp_a.0[(i, j)] = big[(i, j)];
            d.0[(i, j)] = big[(i, j + 4)];
        }
    }
    (exp_a, d)
}

/// The propagator together with its derivatives `∂M/∂c_k`, `k = 1..m`.
pub fn propagate_with_jacobian<T: Scalar>(
    g: &DriftGenerator<T>,
    h: &ControlHamiltonian<T>,
    p: &PulseSequence<T>,
) -> (TransferMatrix<T>, Vec<TransferMatrix<T>>) {
    let drift = drift_matrix(g);
    let control = control_matrix(h);
    let direction = control.scale(p.dt);
    let (factors, derivs): (Vec<_>, Vec<_>) =
        p.amplitudes.iter().map(|&c| expm_frechet(&generator(&drift, &control, c).scale(p.dt), &direction)).unzip();

    let m = factors.len();
    // prefix[k] = E_1 ... E_k, suffix[k] = E_{k+1} ... E_m
    let mut prefix = Vec::with_capacity(m + 1);
    prefix.push(TransferMatrix::identity());
    for f in &factors {
        let next = prefix.last().unwrap().compose(f);
        prefix.push(next);
    }
    let mut suffix = vec![TransferMatrix::identity(); m + 1];
    for k in (0..m).rev() {
        suffix[k] = factors[k].compose(&suffix[k + 1]);
    }
    let jac = (0..m).map(|k| prefix[k].compose(&derivs[k]).compose(&suffix[k + 1])).collect();
    (prefix[m], jac)
}

/// `∂M/∂c_k` for every slot.
pub fn propagator_jacobian<T: Scalar>(
    g: &DriftGenerator<T>,
    h: &ControlHamiltonian<T>,
    p: &PulseSequence<T>,
) -> Vec<TransferMatrix<T>> {
    propagate_with_jacobian(g, h, p).1
}
