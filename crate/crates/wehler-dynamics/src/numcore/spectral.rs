//! Certified spectral radius of an integer matrix.
//!
//! No floating point eigensolver is consulted. The radius is located
//! through two exact facts:
//!
//! 1. If the characteristic polynomial (after stripping zero roots)
//!    factors entirely into cyclotomics, every eigenvalue lies on the
//!    unit circle and the radius is exactly 1. By Kronecker's theorem
//!    this is the only way an integer spectrum avoids modulus > 1.
//! 2. Otherwise, the eigenvalues of M kron M are all products of pairs
//!    of eigenvalues of M. The dominant eigenvalue paired with its
//!    complex conjugate gives the real positive value rho^2, and no
//!    eigenvalue of the Kronecker square has larger modulus, so rho^2
//!    is exactly the largest real root of charpoly(M kron M). That
//!    root is isolated by Sturm bisection over Q.

use super::poly::cyclotomic_profile;
use super::{IntMatrix, NumError, Rational};

/// Spectral radius with a certified error bound: returns (value, err)
/// with |value - rho(m)| <= err and err <= tol.
pub fn spectral_radius(m: &IntMatrix, tol: f64) -> Result<(f64, f64), NumError> {
    assert!(tol > 0.0 && tol.is_finite(), "tolerance must be positive");
    let p = m.charpoly();
    let zeros = p.order_at_zero();
    let p = p.shift_down(zeros);
    if p.degree() == Some(0) {
        // Nilpotent: every eigenvalue is zero.
        return Ok((0.0, 0.0));
    }
    if cyclotomic_profile(&p).is_some() {
        return Ok((1.0, 0.0));
    }
    // Non-cyclotomic integer spectrum forces rho > 1, so rho^2 > 1 and
    // bisecting the squared value to width tol leaves at most tol/2 on
    // the radius itself.
    let kk = m.kron(m);
    let pk = kk.charpoly();
    let pk = pk.shift_down(pk.order_at_zero());
    let tol_sq = Rational::from_f64(tol).expect("finite tolerance");
    let (lo, hi) = pk
        .max_real_root_interval(&tol_sq)
        .ok_or(NumError::NonConvergence)?;
    let lo = if lo.cmp0() == std::cmp::Ordering::Less {
        Rational::new()
    } else {
        lo
    };
    let r_lo = lo.to_f64().sqrt();
    let r_hi = hi.to_f64().sqrt();
    let mid = 0.5 * (r_lo + r_hi);
    let err = 0.5 * (r_hi - r_lo) + 1e-15 * mid.abs();
    Ok((mid, err))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn radius(rows: &[&[i64]]) -> (f64, f64) {
        spectral_radius(&IntMatrix::from_rows(rows), 1e-12).unwrap()
    }

    #[test]
    fn unit_circle_spectra_are_exact() {
        let (v, e) = radius(&[&[0, 1], &[1, 0]]);
        assert_eq!((v, e), (1.0, 0.0));
        let (v, e) = radius(&[&[0, -1], &[1, 0]]);
        assert_eq!((v, e), (1.0, 0.0));
        let (v, e) = radius(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!((v, e), (1.0, 0.0));
        // Shear: eigenvalue 1 twice, still radius exactly 1.
        let (v, e) = radius(&[&[1, 5], &[0, 1]]);
        assert_eq!((v, e), (1.0, 0.0));
    }

    #[test]
    fn nilpotent_matrices_have_radius_zero() {
        let (v, e) = radius(&[&[0, 1], &[0, 0]]);
        assert_eq!((v, e), (0.0, 0.0));
        let (v, e) = radius(&[&[0, 0], &[0, 0]]);
        assert_eq!((v, e), (0.0, 0.0));
    }

    #[test]
    fn golden_mean_shift_radius() {
        // Frozen: largest root of t^2 - 3 t + 1 is (3 + sqrt 5)/2
        // = 2.6180339887498949.
        let (v, e) = radius(&[&[2, 1], &[1, 1]]);
        assert!(e <= 1e-12);
        assert!((v - 2.6180339887498949).abs() <= e + 1e-12);
    }

    #[test]
    fn integer_diagonal_radius() {
        let (v, e) = radius(&[&[2, 0], &[0, -3]]);
        assert!((v - 3.0).abs() <= e + 1e-12);
        // Eigenvalue of mixed sign and size; radius from the negative one.
        let (v, e) = radius(&[&[-5, 0], &[0, 2]]);
        assert!((v - 5.0).abs() <= e + 1e-12);
    }

    #[test]
    fn three_by_three_salem_like_radius() {
        // Frozen: charpoly (t + 1)(t^2 - 18 t + 1), largest root
        // 9 + 4 sqrt 5 = 17.944271909999158786.
        let m = IntMatrix::from_rows(&[&[-1, -2, -6], &[2, 3, 10], &[2, 6, 15]]);
        assert_eq!(
            m.charpoly(),
            crate::numcore::IntPolynomial::from_i64(&[1, -17, -17, 1])
        );
        let (v, e) = spectral_radius(&m, 1e-12).unwrap();
        assert!(e <= 1e-12);
        assert!((v - 17.944271909999158786).abs() <= e + 1e-12);
    }

    #[test]
    fn error_bound_scales_with_tolerance() {
        let m = IntMatrix::from_rows(&[&[2, 1], &[1, 1]]);
        for tol in [1e-3, 1e-6, 1e-9] {
            let (v, e) = spectral_radius(&m, tol).unwrap();
            assert!(e <= tol);
            assert!((v - 2.6180339887498949).abs() <= e + 1e-15);
        }
    }
}
