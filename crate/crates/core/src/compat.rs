//! Joint measurability of two binary qubit measurements and the
//! noise-robustness monotone built on it.
//!
//! Two effects `x1`, `x2` are jointly measurable iff `C(x1, x2) >= 0`, with
//!
//! ```text
//! C = sqrt(<x1|x1><x1'|x1'><x2|x2><x2'|x2'>)
//!     - <x1|x1'><x2|x2'> + <x1|x2'><x1'|x2> + <x1|x2><x1'|x2'>
//! ```
//!
//! where `'` is the complement and `<.|.>` the Minkowski form. The monotone
//! `I_b(x1, x2)` is the smallest mixing weight `λ` of biased classical noise
//! that makes the pair compatible.

use crate::qubit::{complement, minkowski, require_effect, FourVector};
use crate::{Error, Result, Scalar};

/// `C` values in `[-COMPAT_TOL, 0)` count as compatible.
pub const COMPAT_TOL: f64 = 1e-12;
/// Radicands in `[-RADICAND_TOL, 0)` are clamped to zero.
pub const RADICAND_TOL: f64 = 1e-12;
/// Number of equispaced intervals on `[0, 1/2]` scanned to bracket the root.
pub const ROOT_SCAN_INTERVALS: usize = 64;
/// Minimal Minkowski norm of every noisy effect (and complement) at the root
/// for the gradient to be defined.
pub const SHARPNESS_TOL: f64 = 1e-9;
/// Minimal `|dC/dλ|` at the root.
pub const DEGENERATE_ROOT_TOL: f64 = 1e-10;

/// Classical-noise mixing parameters: weight `lambda` and bias `b`, with
/// outcome probability `p = (1 + b)/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseParams<T> {
    lambda: T,
    b: T,
}

impl<T: Scalar> NoiseParams<T> {
    pub fn new(lambda: T, b: T) -> Result<Self> {
        if !(lambda >= T::zero() && lambda <= T::one()) {
            return Err(Error::InvalidParameter(format!("lambda = {lambda} not in [0, 1]")));
        }
        check_bias(b)?;
        Ok(Self { lambda, b })
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn bias(&self) -> T {
        self.b
    }

    /// `p = (1 + b)/2`.
    pub fn probability(&self) -> T {
        T::half() * (T::one() + self.b)
    }
}

fn check_bias<T: Scalar>(b: T) -> Result<()> {
    if b > -T::one() && b < T::one() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("bias b = {b} not in (-1, 1)")))
    }
}

/// `N_{λ,b}(x) = ((1-λ) x0 + 2λp, (1-λ) x)`.
pub fn apply_noise<T: Scalar>(x: FourVector<T>, n: NoiseParams<T>) -> FourVector<T> {
    noisy(x, n.lambda, n.b)
}

#[inline]
fn noisy<T: Scalar>(x: FourVector<T>, lambda: T, b: T) -> FourVector<T> {
    let keep = T::one() - lambda;
    // 2p = 1 + b
    FourVector::new(keep * x.x0 + lambda * (T::one() + b), keep * x.x1, keep * x.x2, keep * x.x3)
}

/// Unchecked evaluation of `C`; the radicand is clamped at zero from below.
fn c_raw<T: Scalar>(x1: FourVector<T>, x2: FourVector<T>) -> (T, T) {
    let p1 = complement(x1);
    let p2 = complement(x2);
    // grouped so that swapping x1 and x2 gives bit-identical results
    let radicand = (minkowski(x1, x1) * minkowski(p1, p1)) * (minkowski(x2, x2) * minkowski(p2, p2));
    let root = radicand.max(T::zero()).sqrt();
    let c = root - minkowski(x1, p1) * minkowski(x2, p2)
        + minkowski(x1, p2) * minkowski(p1, x2)
        + minkowski(x1, x2) * minkowski(p1, p2);
    (c, radicand)
}

/// The joint-measurability functional `C(x1, x2)`.
pub fn c_functional<T: Scalar>(x1: FourVector<T>, x2: FourVector<T>) -> Result<T> {
    require_effect(x1)?;
    require_effect(x2)?;
    let (c, radicand) = c_raw(x1, x2);
    if radicand < -T::lit(RADICAND_TOL) {
        return Err(Error::InvalidEffect(format!("negative radicand {radicand:e} in C")));
    }
    Ok(c)
}

pub fn is_jointly_measurable<T: Scalar>(x1: FourVector<T>, x2: FourVector<T>) -> Result<bool> {
    Ok(c_functional(x1, x2)? >= -T::lit(COMPAT_TOL))
}

/// The robustness monotone `I_b(x1, x2)`: zero for compatible pairs,
/// otherwise the smallest `λ` in `(0, 1/2]` solving
/// `C(N_{λ,b}(x1), N_{λ,b}(x2)) = 0`.
///
/// The root is bracketed by scanning [`ROOT_SCAN_INTERVALS`] intervals and
/// then bisected until the bracket cannot shrink further in floating point.
pub fn robustness<T: Scalar>(x1: FourVector<T>, x2: FourVector<T>, b: T) -> Result<T> {
    check_bias(b)?;
    if is_jointly_measurable(x1, x2)? {
        return Ok(T::zero());
    }
    let c_at = |lambda: T| c_raw(noisy(x1, lambda, b), noisy(x2, lambda, b)).0;

    let half = T::half();
    let n = T::lit(ROOT_SCAN_INTERVALS as f64);
    let mut lo = T::zero();
    let mut hi = None;
    for k in 1..=ROOT_SCAN_INTERVALS {
        let lambda = half * T::lit(k as f64) / n;
        if c_at(lambda) >= T::zero() {
            hi = Some(lambda);
            break;
        }
        lo = lambda;
    }
    let Some(mut hi) = hi else {
        return Err(Error::NoiseInsufficient(c_at(half).to_f64_lossy()));
    };

    // invariant: C(lo) < 0 <= C(hi)
    loop {
        let mid = T::half() * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if c_at(mid) < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Partial derivatives of `C(u1, u2)` with respect to the coordinates of
/// `u1` and `u2`, including the dependence through each complement.
/// Requires all four Minkowski norms to be positive.
fn c_gradient<T: Scalar>(u1: FourVector<T>, u2: FourVector<T>) -> (FourVector<T>, FourVector<T>) {
    let p1 = complement(u1);
    let p2 = complement(u2);
    let n1 = minkowski(u1, u1);
    let n1p = minkowski(p1, p1);
    let n2 = minkowski(u2, u2);
    let n2p = minkowski(p2, p2);
    let s = ((n1 * n1p) * (n2 * n2p)).sqrt();

    let m1 = minkowski(u1, p1);
    let m2 = minkowski(u2, p2);
    let a = minkowski(u1, p2);
    let bb = minkowski(p1, u2);
    let c = minkowski(u1, u2);
    let d = minkowski(p1, p2);

    // η-lowered vectors: ∂<u|v>/∂u = η v
    let (l1, l1p, l2, l2p) = (u1.lower(), p1.lower(), u2.lower(), p2.lower());

    // treating u1, p1, u2, p2 as independent
    let d_u1 = l1.scale(s / n1).sub(l1p.scale(m2)).add(l2p.scale(bb)).add(l2.scale(d));
    let d_p1 = l1p.scale(s / n1p).sub(l1.scale(m2)).add(l2.scale(a)).add(l2p.scale(c));
    let d_u2 = l2.scale(s / n2).sub(l2p.scale(m1)).add(l1p.scale(a)).add(l1.scale(d));
    let d_p2 = l2p.scale(s / n2p).sub(l2.scale(m1)).add(l1.scale(bb)).add(l1p.scale(c));

    // p = (2,0,0,0) - u, so dp/du = -Id
    (d_u1.sub(d_p1), d_u2.sub(d_p2))
}

/// Gradient `(∂I/∂x1, ∂I/∂x2)` of the robustness monotone by implicit
/// differentiation of `C(N_λ(x1), N_λ(x2)) = 0` at the solving `λ`.
///
/// Fails with [`Error::NotDifferentiable`] unless `0 < I < 1/2` and every
/// noisy effect at the root is strictly unsharp; callers treat the
/// compatible region as having zero gradient.
pub fn robustness_gradient<T: Scalar>(
    x1: FourVector<T>,
    x2: FourVector<T>,
    b: T,
) -> Result<(FourVector<T>, FourVector<T>)> {
    let lambda = robustness(x1, x2, b)?;
    robustness_gradient_at(x1, x2, b, lambda)
}

/// As [`robustness_gradient`] with the root `lambda = I_b(x1, x2)` already
/// known.
pub fn robustness_gradient_at<T: Scalar>(
    x1: FourVector<T>,
    x2: FourVector<T>,
    b: T,
    lambda: T,
) -> Result<(FourVector<T>, FourVector<T>)> {
    if !(lambda > T::zero() && lambda < T::half()) {
        return Err(Error::NotDifferentiable(format!("robustness {lambda} outside (0, 1/2)")));
    }
    let u1 = noisy(x1, lambda, b);
    let u2 = noisy(x2, lambda, b);
    let sharp = T::lit(SHARPNESS_TOL);
    let norms = [
        minkowski(u1, u1),
        minkowski(complement(u1), complement(u1)),
        minkowski(u2, u2),
        minkowski(complement(u2), complement(u2)),
    ];
    if norms.iter().any(|&n| !(n > sharp)) {
        return Err(Error::NotDifferentiable("noisy effect at the root is (nearly) sharp".into()));
    }

    let (g1, g2) = c_gradient(u1, u2);
    // ∂u/∂λ = (1 + b, 0, 0, 0) - x
    let trivial = FourVector::new(T::one() + b, T::zero(), T::zero(), T::zero());
    let dc_dlambda = g1.dot(trivial.sub(x1)) + g2.dot(trivial.sub(x2));
    if !(dc_dlambda.abs() >= T::lit(DEGENERATE_ROOT_TOL)) {
        return Err(Error::DegenerateRoot(dc_dlambda.to_f64_lossy()));
    }
    // ∂u/∂x = (1 - λ) Id
    let factor = -(T::one() - lambda) / dc_dlambda;
    Ok((g1.scale(factor), g2.scale(factor)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    type V = FourVector<f64>;

    fn shrunk(s: f64) -> (V, V) {
        (V::new(1., s, 0., 0.), V::new(1., 0., 0., s))
    }

    #[test]
    fn c_functional_examples() {
        assert_abs_diff_eq!(c_functional(V::sharp_x(), V::sharp_z()).unwrap(), -2.0, epsilon = 1e-15);
        let t = V::new(1., 0., 0., 0.);
        assert_abs_diff_eq!(c_functional(t, t).unwrap(), 2.0, epsilon = 1e-15);
        let (a, b) = shrunk(std::f64::consts::FRAC_1_SQRT_2);
        assert_abs_diff_eq!(c_functional(a, b).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn c_functional_rejects_invalid_effects() {
        assert!(matches!(c_functional(V::new(1., 1.5, 0., 0.), V::sharp_z()), Err(Error::InvalidEffect(_))));
    }

    #[test]
    fn joint_measurability_examples() {
        assert!(!is_jointly_measurable(V::sharp_x(), V::sharp_z()).unwrap());
        assert!(is_jointly_measurable(V::sharp_x(), V::sharp_x()).unwrap());
        let (a, b) = shrunk(0.5);
        assert_abs_diff_eq!(c_functional(a, b).unwrap(), 1.0, epsilon = 1e-15);
        assert!(is_jointly_measurable(a, b).unwrap());
    }

    #[test]
    fn noise_examples() {
        let x = V::new(0.7, 0.2, -0.1, 0.3);
        assert_eq!(apply_noise(x, NoiseParams::new(0.0, 0.4).unwrap()), x);
        assert_eq!(apply_noise(V::sharp_x(), NoiseParams::new(1.0, 0.0).unwrap()), V::new(1., 0., 0., 0.));
        assert_eq!(apply_noise(V::sharp_x(), NoiseParams::new(0.5, 0.0).unwrap()), V::new(1., 0.5, 0., 0.));
        assert!(NoiseParams::new(1.5, 0.0).is_err());
        assert!(NoiseParams::new(0.5, 1.0).is_err());
    }

    #[test]
    fn robustness_examples() {
        let r = robustness(V::sharp_x(), V::sharp_z(), 0.0).unwrap();
        assert_abs_diff_eq!(r, 1.0 - std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-12);
        let (a, b) = shrunk(0.5);
        assert_eq!(robustness(a, b, 0.3).unwrap(), 0.0);
        let (a, b) = shrunk(0.9);
        assert_abs_diff_eq!(robustness(a, b, 0.0).unwrap(), 1.0 - 1.0 / (0.9 * 2f64.sqrt()), epsilon = 1e-12);
    }

    #[test]
    fn robustness_rejects_bad_bias() {
        assert!(robustness(V::sharp_x(), V::sharp_z(), 1.0).is_err());
    }

    #[test]
    fn robustness_is_single_precision_capable() {
        let r = robustness(FourVector::<f32>::sharp_x(), FourVector::sharp_z(), 0.0).unwrap();
        assert!((r - (1.0 - std::f32::consts::FRAC_1_SQRT_2)).abs() < 1e-6);
    }

    #[test]
    fn gradient_along_common_shrink() {
        // d/ds [1 - 1/(s√2)] = 1/(s²√2)
        let s = 0.9;
        let (a, b) = shrunk(s);
        let (g1, g2) = robustness_gradient(a, b, 0.0).unwrap();
        let dir = g1.x1 + g2.x3;
        assert_abs_diff_eq!(dir, 1.0 / (s * s * 2f64.sqrt()), epsilon = 1e-9);
    }

    #[test]
    fn gradient_at_sharp_inputs_uses_unsharp_root() {
        // noise at the root unsharpens sharp inputs, so C is smooth there
        let (g1, g2) = robustness_gradient(V::sharp_x(), V::sharp_z(), 0.0).unwrap();
        assert_abs_diff_eq!(g1.x1 + g2.x3, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-9);
    }

    #[test]
    fn gradient_refused_for_compatible() {
        let (a, b) = shrunk(0.5);
        assert!(matches!(robustness_gradient(a, b, 0.0), Err(Error::NotDifferentiable(_))));
    }

    #[test]
    fn gradient_matches_central_differences() {
        let x1 = V::new(1.1, 0.6, 0.2, -0.1);
        let x2 = V::new(0.9, -0.1, 0.3, 0.7);
        for b in [0.0, 0.3, -0.4] {
            let (g1, g2) = robustness_gradient(x1, x2, b).unwrap();
            let analytic: Vec<f64> = g1.to_array().into_iter().chain(g2.to_array()).collect();
            let h = 1e-6;
            for k in 0..8 {
                let bump = |sgn: f64| {
                    let mut a = x1.to_array();
                    let mut c = x2.to_array();
                    if k < 4 {
                        a[k] += sgn * h
                    } else {
                        c[k - 4] += sgn * h
                    }
                    robustness(V::from_array(a), V::from_array(c), b).unwrap()
                };
                let fd = (bump(1.0) - bump(-1.0)) / (2.0 * h);
                assert!((fd - analytic[k]).abs() < 1e-7, "b={b} k={k}: {fd} vs {}", analytic[k]);
            }
        }
    }

    fn arb_effect() -> impl Strategy<Value = V> {
        (0.0..2.0f64, 0.0..1.0f64, -1.0..1.0f64, 0.0..std::f64::consts::TAU).prop_map(|(x0, u, cz, phi)| {
            let r = x0.min(2.0 - x0) * u.cbrt();
            let s = (1.0 - cz * cz).sqrt();
            V::new(x0, r * s * phi.cos(), r * s * phi.sin(), r * cz)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn root_brackets_and_solves(x1 in arb_effect(), x2 in arb_effect()) {
            let r = robustness(x1, x2, 0.0).unwrap();
            if r > 0.0 {
                let c0 = c_raw(x1, x2).0;
                prop_assert!(c0 < 0.0);
                let c_half = c_raw(noisy(x1, 0.5, 0.0), noisy(x2, 0.5, 0.0)).0;
                prop_assert!(c_half >= 0.0);
                let c_root = c_raw(noisy(x1, r, 0.0), noisy(x2, r, 0.0)).0;
                prop_assert!(c_root.abs() < 1e-9);
            }
        }

        #[test]
        fn robustness_symmetric(x1 in arb_effect(), x2 in arb_effect(), b in -0.9..0.9f64) {
            let r12 = robustness(x1, x2, b);
            let r21 = robustness(x2, x1, b);
            prop_assert_eq!(r12, r21);
        }

        #[test]
        fn complement_covariance(x1 in arb_effect(), x2 in arb_effect()) {
            // strict margins avoid flipping on the boundary
            let c = c_raw(x1, x2).0;
            prop_assume!(c.abs() > 1e-9);
            prop_assert_eq!(
                is_jointly_measurable(x1, x2).unwrap(),
                is_jointly_measurable(complement(x1), x2).unwrap()
            );
        }

        #[test]
        fn noise_preserves_validity(x in arb_effect(), l in 0.0..1.0f64, b in -0.99..0.99f64) {
            let y = apply_noise(x, NoiseParams::new(l, b).unwrap());
            prop_assert!(crate::qubit::validate_effect(y));
        }
    }
}
