//! Reduction of a rank-two lattice `ℤα + ℤβ ⊂ ℂ` to the standard fundamental
//! domain of the modular group.
//!
//! Only points of imaginary quadratic fields are handled: such a point is
//! `x + i·√y` with `x, y` rational, which keeps the reduction exact.

use std::fmt;

use crate::cyclotomic::CycloNum;
use crate::error::{Error, Result};
use crate::rational::Rational;
use num_traits::Zero;

/// The point `re + i·√im_sq` of the upper half plane.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModularPoint {
    pub re: Rational,
    pub im_sq: Rational,
}

impl ModularPoint {
    pub fn norm_sq(&self) -> Rational {
        &(&self.re * &self.re) + &self.im_sq
    }

    pub fn to_complex_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im_sq.to_f64().sqrt())
    }

    /// Membership in the half-open fundamental domain.
    pub fn in_fundamental_domain(&self) -> bool {
        let half = Rational::new(1, 2);
        let n = self.norm_sq();
        let one = Rational::one();
        self.im_sq.signum() > 0
            && self.re >= -half.clone()
            && self.re < half
            && if self.re.signum() <= 0 { n >= one } else { n > one }
    }

    fn translate(&self, k: &Rational) -> Self {
        ModularPoint { re: &self.re + k, im_sq: self.im_sq.clone() }
    }

    /// `z ↦ −1/z`.
    fn invert(&self) -> Self {
        let n = self.norm_sq();
        ModularPoint { re: -(&self.re / &n), im_sq: &self.im_sq / &(&n * &n) }
    }
}

impl fmt::Display for ModularPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + i*sqrt({})", self.re, self.im_sq)
    }
}

/// Splits `τ` into exact real part and squared imaginary part, with the sign
/// of the imaginary part.
fn quadratic_parts(tau: &CycloNum) -> Result<(Rational, Rational, i32)> {
    let not_quadratic = || Error::NotQuadratic(tau.to_string());
    let re = tau.twice_re().as_rational().ok_or_else(not_quadratic)?;
    let re = &re / &Rational::from_int(2);
    let n = tau.norm_sq_rational().ok_or_else(not_quadratic)?;
    let im_sq = &n - &(&re * &re);
    if im_sq.signum() <= 0 {
        return Err(Error::DegenerateLattice);
    }
    // |Im τ| = √im_sq is exact; the float only has to decide the sign, and
    // its error is far below that magnitude.
    let (_, im) = tau.to_complex_f64();
    let mag = im_sq.to_f64().sqrt();
    let tol = 1e-9 * (1.0 + tau.coeff_l1());
    if (im.abs() - mag).abs() > tol + 1e-6 * mag {
        return Err(Error::Precondition(format!("imaginary part of {tau} failed certification")));
    }
    Ok((re, im_sq, if im > 0.0 { 1 } else { -1 }))
}

/// Reduces `β/α` (conjugated into the upper half plane) into the fundamental
/// domain.
pub fn modular_reduce(alpha: &CycloNum, beta: &CycloNum) -> Result<ModularPoint> {
    if alpha.is_zero() || beta.is_zero() {
        return Err(Error::DegenerateLattice);
    }
    let tau = beta.checked_div(alpha)?;
    let (re, im_sq, _sign) = quadratic_parts(&tau)?;
    // conjugating only flips the imaginary sign, which the representation drops
    Ok(reduce_point(ModularPoint { re, im_sq }))
}

/// Moves `τ` (conjugated into the upper half plane if needed) into the
/// fundamental domain by exact translations and inversions in its own field.
pub fn reduce_tau(tau: &CycloNum) -> Result<CycloNum> {
    let (_, _, sign) = quadratic_parts(tau)?;
    let mut z = if sign < 0 { tau.conj() } else { tau.clone() };
    let half = Rational::new(1, 2);
    let one = Rational::one();
    loop {
        let (re, im_sq, _) = quadratic_parts(&z)?;
        let shift = (&re + &half).floor();
        if !shift.is_zero() {
            z = &z - &CycloNum::from_rational(Rational::from(shift), z.order());
            continue;
        }
        let n = &(&re * &re) + &im_sq;
        if n < one || (n == one && re.signum() > 0) {
            z = (-&z).inv()?;
            continue;
        }
        return Ok(z);
    }
}

pub fn reduce_point(mut z: ModularPoint) -> ModularPoint {
    let half = Rational::new(1, 2);
    loop {
        let shift = (&z.re + &half).floor();
        if !shift.is_zero() {
            z = z.translate(&-Rational::from(shift));
        }
        let n = z.norm_sq();
        let one = Rational::one();
        if n < one || (n == one && z.re.signum() > 0) {
            z = z.invert();
            continue;
        }
        return z;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(order: u32, s: &str) -> CycloNum {
        crate::cyclotomic::parse_scalar(order, s).unwrap()
    }

    #[test]
    fn gaussian_lattices_reduce_to_i() {
        let i = ModularPoint { re: Rational::zero(), im_sq: Rational::one() };
        assert_eq!(modular_reduce(&c(4, "1"), &c(4, "i")).unwrap(), i);
        assert_eq!(modular_reduce(&c(4, "2"), &c(4, "2i")).unwrap(), i);
        assert_eq!(modular_reduce(&c(4, "1+i"), &c(4, "1-i")).unwrap(), i);
        assert_eq!(modular_reduce(&c(4, "1"), &c(4, "3+i")).unwrap(), i);
    }

    #[test]
    fn eisenstein_lattice_reduces_to_cube_root() {
        let p = modular_reduce(&c(3, "1"), &c(6, "1").checked_mul(&CycloNum::zeta_pow(6, 1)).unwrap())
            .unwrap();
        assert_eq!(p.re, Rational::new(-1, 2));
        assert_eq!(p.im_sq, Rational::new(3, 4));
        let q = modular_reduce(&c(3, "1"), &c(3, "w")).unwrap();
        assert_eq!(q, p);
    }

    #[test]
    fn non_quadratic_ratio_rejected() {
        let z = CycloNum::zeta_pow(5, 1);
        assert!(matches!(modular_reduce(&c(5, "1"), &z), Err(Error::NotQuadratic(_))));
        assert!(matches!(modular_reduce(&c(4, "1"), &c(4, "2")), Err(Error::DegenerateLattice)));
    }

    #[test]
    fn field_reduction_matches_point_reduction() {
        for t in ["1+2i", "3+i", "(1+7i)/5", "-4+3i"] {
            let tau = c(4, t);
            let r = reduce_tau(&tau).unwrap();
            let (re, im_sq, _) = quadratic_parts(&r).unwrap();
            let p = ModularPoint { re, im_sq };
            assert!(p.in_fundamental_domain(), "{t}");
            assert_eq!(p, modular_reduce(&c(4, "1"), &tau).unwrap());
        }
    }

    #[test]
    fn reduction_is_idempotent() {
        for (x, y) in [(7, 3), (-5, 11), (1, 1), (13, 2)] {
            let z = reduce_point(ModularPoint { re: Rational::new(x, 3), im_sq: Rational::new(y, 5) });
            assert!(z.in_fundamental_domain(), "{z}");
            assert_eq!(reduce_point(z.clone()), z);
        }
    }
}
