//! Small fixed-size dense matrices: products, LU solves, the matrix
//! exponential and symmetric eigenvalues.
//!
//! Sizes here never exceed 8x8, so everything lives on the stack and the
//! algorithms are the textbook ones without blocking.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::Scalar;

/// Row-major `N x N` matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat<T, const N: usize> {
    pub rows: [[T; N]; N],
}

impl<T: Scalar, const N: usize> Default for Mat<T, N> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<T: Scalar, const N: usize> Mat<T, N> {
    pub fn zeros() -> Self {
        Self { rows: [[T::zero(); N]; N] }
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.rows[i][i] = T::one();
        }
        m
    }

    pub fn from_rows(rows: [[T; N]; N]) -> Self {
        Self { rows }
    }

    pub fn from_diagonal(d: [T; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.rows[i][i] = d[i];
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                t.rows[j][i] = self.rows[i][j];
            }
        }
        t
    }

    pub fn scale(&self, s: T) -> Self {
        let mut out = *self;
        for row in out.rows.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T; N]) -> [T; N] {
        let mut out = [T::zero(); N];
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = T::zero();
            for j in 0..N {
                acc += self.rows[i][j] * v[j];
            }
            *o = acc;
        }
        out
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> T {
        (0..N).map(|j| (0..N).map(|i| self.rows[i][j].abs()).sum::<T>()).fold(T::zero(), T::max)
    }

    pub fn norm_frobenius(&self) -> T {
        self.rows.iter().flat_map(|r| r.iter()).map(|&v| v * v).sum::<T>().sqrt()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> T {
        self.rows.iter().flat_map(|r| r.iter()).fold(T::zero(), |acc, &v| acc.max(v.abs()))
    }

    /// Sum of elementwise products, `tr(self^T other)`.
    pub fn frobenius_dot(&self, other: &Self) -> T {
        let mut acc = T::zero();
        for i in 0..N {
            for j in 0..N {
                acc += self.rows[i][j] * other.rows[i][j];
            }
        }
        acc
    }

    pub fn is_finite(&self) -> bool {
        self.rows.iter().flat_map(|r| r.iter()).all(|v| v.is_finite())
    }

    /// Solves `self * X = rhs` by Gaussian elimination with partial pivoting.
    /// Returns `None` if a pivot vanishes.
    pub fn solve(&self, rhs: &Self) -> Option<Self> {
        let mut a = self.rows;
        let mut b = rhs.rows;
        for col in 0..N {
            let mut piv = col;
            for r in (col + 1)..N {
                if a[r][col].abs() > a[piv][col].abs() {
                    piv = r;
                }
            }
            if a[piv][col] == T::zero() {
                return None;
            }
            a.swap(col, piv);
            b.swap(col, piv);
            let inv = T::one() / a[col][col];
            for r in (col + 1)..N {
                let f = a[r][col] * inv;
                if f == T::zero() {
                    continue;
                }
                for c in col..N {
                    let t = a[col][c];
                    a[r][c] -= f * t;
                }
                for c in 0..N {
                    let t = b[col][c];
                    b[r][c] -= f * t;
                }
            }
        }
        for col in (0..N).rev() {
            let inv = T::one() / a[col][col];
            for c in 0..N {
                b[col][c] *= inv;
            }
            for r in 0..col {
                let f = a[r][col];
                if f == T::zero() {
                    continue;
                }
                for c in 0..N {
                    let t = b[col][c];
                    b[r][c] -= f * t;
                }
            }
        }
        Some(Self { rows: b })
    }

    /// Matrix exponential by scaling and squaring with a diagonal Padé
    /// approximant of degree 3, 5, 7, 9 or 13 chosen from the 1-norm
    /// (Higham 2005).
    pub fn expm(&self) -> Self {
        let norm = self.norm1();
        if norm == T::zero() {
            return Self::identity();
        }
        let a2 = *self * *self;
        for (theta, coeffs) in PADE_LOW.iter() {
            if norm <= T::lit(*theta) {
                return pade_low(self, &a2, coeffs);
            }
        }

        let theta13 = T::lit(THETA_13);
        let mut s = 0i32;
        if norm > theta13 {
            s = (norm / theta13).log2().ceil().to_i32().unwrap_or(0).max(0);
        }
        let scale = T::lit(2f64.powi(-s));
        let a = self.scale(scale);
        let a2 = a * a;
        let a4 = a2 * a2;
        let a6 = a4 * a2;
        let b: [T; 14] = PADE_13.map(T::lit);
        let id = Self::identity();

        let u_inner = a6.scale(b[13]) + a4.scale(b[11]) + a2.scale(b[9]);
        let u = a * (a6 * u_inner + a6.scale(b[7]) + a4.scale(b[5]) + a2.scale(b[3]) + id.scale(b[1]));
        let v_inner = a6.scale(b[12]) + a4.scale(b[10]) + a2.scale(b[8]);
        let v = a6 * v_inner + a6.scale(b[6]) + a4.scale(b[4]) + a2.scale(b[2]) + id.scale(b[0]);

        let mut r = (v - u).solve(&(v + u)).expect("Pade denominator is nonsingular after scaling");
        for _ in 0..s {
            r = r * r;
        }
        r
    }

    /// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations,
    /// sorted ascending. The input is symmetrized first.
    pub fn symmetric_eigenvalues(&self) -> [T; N] {
        let mut a = self.rows;
        for i in 0..N {
            for j in (i + 1)..N {
                let s = T::half() * (a[i][j] + a[j][i]);
                a[i][j] = s;
                a[j][i] = s;
            }
        }
        let eps = T::epsilon();
        for _sweep in 0..64 {
            let mut off = T::zero();
            let mut diag = T::zero();
            for i in 0..N {
                diag += a[i][i] * a[i][i];
                for j in (i + 1)..N {
                    off += a[i][j] * a[i][j];
                }
            }
            if off <= eps * eps * diag.max(T::min_positive_value()) || off == T::zero() {
                break;
            }
            for p in 0..N {
                for q in (p + 1)..N {
                    let apq = a[p][q];
                    if apq == T::zero() {
                        continue;
                    }
                    let theta = (a[q][q] - a[p][p]) / (T::two() * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    let c = T::one() / (t * t + T::one()).sqrt();
                    let s = t * c;
                    for k in 0..N {
                        let akp = a[k][p];
                        let akq = a[k][q];
                        a[k][p] = c * akp - s * akq;
                        a[k][q] = s * akp + c * akq;
                    }
                    for k in 0..N {
                        let apk = a[p][k];
                        let aqk = a[q][k];
                        a[p][k] = c * apk - s * aqk;
                        a[q][k] = s * apk + c * aqk;
                    }
                }
            }
        }
        let mut ev = [T::zero(); N];
        for i in 0..N {
            ev[i] = a[i][i];
        }
        ev.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
        ev
    }
}

fn pade_low<T: Scalar, const N: usize>(a: &Mat<T, N>, a2: &Mat<T, N>, coeffs: &[f64]) -> Mat<T, N> {
    // coeffs has odd length m+1 with m odd; split into even/odd powers.
    let id = Mat::<T, N>::identity();
    let mut u_even = Mat::<T, N>::zeros();
    let mut v = Mat::<T, N>::zeros();
    let mut power = id;
    for k in 0..coeffs.len() / 2 {
        v = v + power.scale(T::lit(coeffs[2 * k]));
        u_even = u_even + power.scale(T::lit(coeffs[2 * k + 1]));
        power = power * *a2;
    }
    let u = *a * u_even;
    (v - u).solve(&(v + u)).expect("Pade denominator is nonsingular for small norms")
}

const THETA_13: f64 = 5.371920351148152;

const PADE_13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

const PADE_LOW: [(f64, &[f64]); 4] = [
    (1.495585217958292e-2, &[120.0, 60.0, 12.0, 1.0]),
    (2.53939833006323e-1, &[30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0]),
    (9.504178996162932e-1, &[17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0]),
    (
        2.097847961257068e0,
        &[17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0, 2162160.0, 110880.0, 3960.0, 90.0, 1.0],
    ),
];

impl<T: Scalar, const N: usize> Index<(usize, usize)> for Mat<T, N> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.rows[i][j]
    }
}

impl<T: Scalar, const N: usize> IndexMut<(usize, usize)> for Mat<T, N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.rows[i][j]
    }
}

impl<T: Scalar, const N: usize> Add for Mat<T, N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for i in 0..N {
            for j in 0..N {
                self.rows[i][j] += rhs.rows[i][j];
            }
        }
        self
    }
}

impl<T: Scalar, const N: usize> Sub for Mat<T, N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..N {
            for j in 0..N {
                self.rows[i][j] -= rhs.rows[i][j];
            }
        }
        self
    }
}

impl<T: Scalar, const N: usize> Neg for Mat<T, N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-T::one())
    }
}

impl<T: Scalar, const N: usize> Mul for Mat<T, N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let a = self.rows[i][k];
                if a == T::zero() {
                    continue;
                }
                for j in 0..N {
                    out.rows[i][j] += a * rhs.rows[k][j];
                }
            }
        }
        out
    }
}
