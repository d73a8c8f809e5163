//! Qubit effects in the Minkowski 4-vector picture and the matrix types they
//! convert to.
//!
//! An effect `A = (x0 Id + x1 σx + x2 σy + x3 σz) / 2` is stored as the
//! 4-vector `(x0, x1, x2, x3)`; its complement `Id - A` is
//! `(2 - x0, -x1, -x2, -x3)`. The basis order (Id, σx, σy, σz) is used for
//! every 4-vector and transfer matrix in the crate.

use num_complex::Complex;

use crate::dense::Mat;
use crate::{Error, Result, Scalar};

/// Tolerance on Minkowski norms and `x0` bounds when deciding effect validity.
pub const EFFECT_TOL: f64 = 1e-10;
/// Hermiticity tolerance for 2x2 matrices.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Tolerance for bipartite states (Hermiticity, trace, positivity).
pub const STATE_TOL: f64 = 1e-10;

/// A binary-POVM effect as a Minkowski 4-vector.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct FourVector<T> {
    pub x0: T,
    pub x1: T,
    pub x2: T,
    pub x3: T,
}

impl<T: Scalar> FourVector<T> {
    pub const fn new(x0: T, x1: T, x2: T, x3: T) -> Self {
        Self { x0, x1, x2, x3 }
    }

    pub fn from_array(a: [T; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [T; 4] {
        [self.x0, self.x1, self.x2, self.x3]
    }

    /// `(x0, n)` for a Bloch-type vector `n`; a unit `n` with `x0 = 1` is the
    /// sharp effect onto the `+1` eigenspace of `n·σ`.
    pub fn from_bloch(x0: T, n: [T; 3]) -> Self {
        Self::new(x0, n[0], n[1], n[2])
    }

    /// The identity effect `Id`.
    pub fn identity() -> Self {
        Self::new(T::two(), T::zero(), T::zero(), T::zero())
    }

    /// Projector onto `σx = +1`.
    pub fn sharp_x() -> Self {
        Self::new(T::one(), T::one(), T::zero(), T::zero())
    }

    /// Projector onto `σy = +1`.
    pub fn sharp_y() -> Self {
        Self::new(T::one(), T::zero(), T::one(), T::zero())
    }

    /// Projector onto `σz = +1`.
    pub fn sharp_z() -> Self {
        Self::new(T::one(), T::zero(), T::zero(), T::one())
    }

    pub fn bloch(&self) -> [T; 3] {
        [self.x1, self.x2, self.x3]
    }

    pub fn bloch_norm(&self) -> T {
        (self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3).sqrt()
    }

    pub fn scale(self, s: T) -> Self {
        Self::new(self.x0 * s, self.x1 * s, self.x2 * s, self.x3 * s)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(self, o: Self) -> Self {
        Self::new(self.x0 + o.x0, self.x1 + o.x1, self.x2 + o.x2, self.x3 + o.x3)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(self, o: Self) -> Self {
        Self::new(self.x0 - o.x0, self.x1 - o.x1, self.x2 - o.x2, self.x3 - o.x3)
    }

    /// Euclidean inner product of the coordinates (not the Minkowski form).
    pub fn dot(self, o: Self) -> T {
        self.x0 * o.x0 + self.x1 * o.x1 + self.x2 * o.x2 + self.x3 * o.x3
    }

    /// Applies the Minkowski metric `diag(1,-1,-1,-1)`.
    pub fn lower(self) -> Self {
        Self::new(self.x0, -self.x1, -self.x2, -self.x3)
    }

    pub fn max_abs_diff(self, o: Self) -> T {
        self.to_array().iter().zip(o.to_array().iter()).fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    /// Image under a 4x4 matrix acting on coordinate columns.
    pub fn transform(self, m: &Mat<T, 4>) -> Self {
        Self::from_array(m.mul_vec(&self.to_array()))
    }
}

/// Minkowski form `x0 y0 - x1 y1 - x2 y2 - x3 y3`.
#[inline]
pub fn minkowski<T: Scalar>(x: FourVector<T>, y: FourVector<T>) -> T {
    x.x0 * y.x0 - x.x1 * y.x1 - x.x2 * y.x2 - x.x3 * y.x3
}

/// The 4-vector of `Id - A`.
#[inline]
pub fn complement<T: Scalar>(x: FourVector<T>) -> FourVector<T> {
    FourVector::new(T::two() - x.x0, -x.x1, -x.x2, -x.x3)
}

/// `x` lies in the forward cone `F+` (within [`EFFECT_TOL`]).
pub fn in_forward_cone<T: Scalar>(x: FourVector<T>) -> bool {
    let tol = T::lit(EFFECT_TOL);
    x.x0 >= -tol && minkowski(x, x) >= -tol
}

/// `0 <= A <= Id`, i.e. both `x` and its complement lie in `F+`.
pub fn validate_effect<T: Scalar>(x: FourVector<T>) -> bool {
    x.is_finite() && in_forward_cone(x) && in_forward_cone(complement(x))
}

pub(crate) fn require_effect<T: Scalar>(x: FourVector<T>) -> Result<()> {
    if validate_effect(x) {
        Ok(())
    } else {
        Err(Error::InvalidEffect(format!("({}, {}, {}, {})", x.x0, x.x1, x.x2, x.x3)))
    }
}

/// 2x2 Hermitian matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermitianMatrix2<T> {
    entries: [[Complex<T>; 2]; 2],
}

impl<T: Scalar> HermitianMatrix2<T> {
    /// Rejects matrices deviating from their adjoint by more than
    /// [`HERMITIAN_TOL`].
    pub fn new(entries: [[Complex<T>; 2]; 2]) -> Result<Self> {
        let dev =
            (entries[0][0].im.abs()).max(entries[1][1].im.abs()).max((entries[0][1] - entries[1][0].conj()).norm());
        if !(dev <= T::lit(HERMITIAN_TOL)) {
            return Err(Error::NonHermitian(dev.to_f64_lossy()));
        }
        Ok(Self { entries })
    }

    /// Builds `(a0 Id + a1 σx + a2 σy + a3 σz)`; Hermitian by construction.
    pub fn from_pauli(a: [T; 4]) -> Self {
        let z = T::zero();
        Self {
            entries: [
                [Complex::new(a[0] + a[3], z), Complex::new(a[1], -a[2])],
                [Complex::new(a[1], a[2]), Complex::new(a[0] - a[3], z)],
            ],
        }
    }

    /// Coefficients `(tr A, tr Aσx, tr Aσy, tr Aσz) / 2` in the Pauli basis.
    pub fn pauli_coefficients(&self) -> [T; 4] {
        let e = &self.entries;
        let h = T::half();
        [
            h * (e[0][0].re + e[1][1].re),
            h * (e[0][1].re + e[1][0].re),
            h * (e[1][0].im - e[0][1].im),
            h * (e[0][0].re - e[1][1].re),
        ]
    }

    pub fn entries(&self) -> &[[Complex<T>; 2]; 2] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.entries[i][j]
    }

    pub fn trace(&self) -> T {
        self.entries[0][0].re + self.entries[1][1].re
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [T; 2] {
        let a = self.pauli_coefficients();
        let r = (a[1] * a[1] + a[2] * a[2] + a[3] * a[3]).sqrt();
        [a[0] - r, a[0] + r]
    }

    /// Applies `f` to the spectrum: `f(A) = α Id + β n·σ` with
    /// `α = (f(λ+) + f(λ-))/2`, `β = (f(λ+) - f(λ-))/2`.
    pub fn map_spectrum(&self, f: impl Fn(T) -> T) -> Self {
        let a = self.pauli_coefficients();
        let r = (a[1] * a[1] + a[2] * a[2] + a[3] * a[3]).sqrt();
        let fp = f(a[0] + r);
        let fm = f(a[0] - r);
        let alpha = T::half() * (fp + fm);
        if r == T::zero() {
            return Self::from_pauli([alpha, T::zero(), T::zero(), T::zero()]);
        }
        let beta = T::half() * (fp - fm) / r;
        Self::from_pauli([alpha, beta * a[1], beta * a[2], beta * a[3]])
    }

    pub fn matmul(&self, o: &Self) -> [[Complex<T>; 2]; 2] {
        mul2(&self.entries, &o.entries)
    }

    pub fn transpose(&self) -> Self {
        let e = &self.entries;
        Self { entries: [[e[0][0], e[1][0]], [e[0][1], e[1][1]]] }
    }

    pub fn max_abs_diff(&self, o: &Self) -> T {
        let mut m = T::zero();
        for i in 0..2 {
            for j in 0..2 {
                m = m.max((self.entries[i][j] - o.entries[i][j]).norm());
            }
        }
        m
    }
}

pub(crate) fn mul2<T: Scalar>(a: &[[Complex<T>; 2]; 2], b: &[[Complex<T>; 2]; 2]) -> [[Complex<T>; 2]; 2] {
    let mut out = [[Complex::new(T::zero(), T::zero()); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// `A = (x0 Id + x·σ) / 2`.
pub fn effect_to_matrix<T: Scalar>(x: FourVector<T>) -> HermitianMatrix2<T> {
    HermitianMatrix2::from_pauli(x.scale(T::half()).to_array())
}

/// Inverse of [`effect_to_matrix`]: `x0 = tr A`, `xk = tr(A σk)`.
pub fn effect_from_matrix<T: Scalar>(a: &HermitianMatrix2<T>) -> FourVector<T> {
    FourVector::from_array(a.pauli_coefficients()).scale(T::two())
}

/// Two-qubit density matrix in the basis |00>, |01>, |10>, |11>, with
/// Alice's qubit first.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BipartiteState<T> {
    rho: [[Complex<T>; 4]; 4],
}

impl<T: Scalar> BipartiteState<T> {
    /// Validates Hermiticity, unit trace and positivity within [`STATE_TOL`].
    pub fn new(rho: [[Complex<T>; 4]; 4]) -> Result<Self> {
        let tol = T::lit(STATE_TOL);
        let mut herm = T::zero();
        for i in 0..4 {
            for j in 0..4 {
                herm = herm.max((rho[i][j] - rho[j][i].conj()).norm());
            }
        }
        if !(herm <= tol) {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr: T = (0..4).map(|i| rho[i][i].re).sum();
        if !((tr - T::one()).abs() <= tol) {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let min_eig = real_embedding(&rho).symmetric_eigenvalues()[0];
        if !(min_eig >= -tol) {
            return Err(Error::InvalidState(format!("not positive semidefinite (min eigenvalue {min_eig:e})")));
        }
        Ok(Self { rho })
    }

    /// `(|00> + |11>)/√2`.
    pub fn max_entangled() -> Self {
        let mut rho = [[Complex::new(T::zero(), T::zero()); 4]; 4];
        let h = Complex::new(T::half(), T::zero());
        for &i in &[0usize, 3] {
            for &j in &[0usize, 3] {
                rho[i][j] = h;
            }
        }
        Self { rho }
    }

    /// `v |Φ+><Φ+| + (1 - v) Id/4`, valid for `-1/3 <= v <= 1`.
    pub fn werner(v: T) -> Result<Self> {
        let phi = Self::max_entangled().rho;
        let quarter = T::lit(0.25);
        let mut rho = [[Complex::new(T::zero(), T::zero()); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                rho[i][j] = phi[i][j] * v;
            }
            rho[i][i] += Complex::new((T::one() - v) * quarter, T::zero());
        }
        Self::new(rho)
    }

    /// `ρA ⊗ ρB` from two single-qubit density matrices.
    pub fn product(rho_a: &HermitianMatrix2<T>, rho_b: &HermitianMatrix2<T>) -> Result<Self> {
        let mut rho = [[Complex::new(T::zero(), T::zero()); 4]; 4];
        for a in 0..2 {
            for b in 0..2 {
                for a2 in 0..2 {
                    for b2 in 0..2 {
                        rho[2 * a + b][2 * a2 + b2] = rho_a.get(a, a2) * rho_b.get(b, b2);
                    }
                }
            }
        }
        Self::new(rho)
    }

    pub fn matrix(&self) -> &[[Complex<T>; 4]; 4] {
        &self.rho
    }

    pub fn min_eigenvalue(&self) -> T {
        real_embedding(&self.rho).symmetric_eigenvalues()[0]
    }
}

/// Real symmetric embedding `[[Re, -Im], [Im, Re]]` of a Hermitian matrix;
/// each eigenvalue appears twice.
fn real_embedding<T: Scalar>(m: &[[Complex<T>; 4]; 4]) -> Mat<T, 8> {
    let mut r = Mat::<T, 8>::zeros();
    for i in 0..4 {
        for j in 0..4 {
            r[(i, j)] = m[i][j].re;
            r[(i + 4, j + 4)] = m[i][j].re;
            r[(i, j + 4)] = -m[i][j].im;
            r[(i + 4, j)] = m[i][j].im;
        }
    }
    r
}
