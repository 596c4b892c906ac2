//! Precision abstraction shared by every numerical kernel.
//!
//! All matrix-element, root-finding and eigenvalue code is generic over
//! [`Real`], so the same pipeline runs in IEEE binary64 or in the
//! quad-double type from [`crate::quad_double`].

use std::fmt;
use std::ops::{AddAssign, DivAssign, MulAssign, Neg, SubAssign};

use num_complex::Complex;
use num_traits::Num;

/// Real scalar type used by the generic kernels.
pub trait Real:
    Copy
    + PartialOrd
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Num
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
{
    /// Significant decimal digits carried by the type.
    const DIGITS: usize;
    const NAME: &'static str;

    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    /// Parses a decimal literal without passing through binary64.
    fn parse_decimal(s: &str) -> Option<Self>;
    fn epsilon() -> Self;
    fn pi() -> Self;
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn floor(self) -> Self;
    fn is_finite(self) -> bool;
    /// Decimal rendering with `digits` significant digits.
    fn to_decimal_string(self, digits: usize) -> String;

    fn from_usize(n: usize) -> Self {
        Self::from_f64(n as f64)
    }

    fn from_i64(n: i64) -> Self {
        Self::from_f64(n as f64)
    }

    fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn hypot(self, other: Self) -> Self {
        let a = self.abs();
        let b = other.abs();
        let (big, small) = if a > b { (a, b) } else { (b, a) };
        if big == Self::zero() {
            return big;
        }
        let r = small / big;
        big * (Self::one() + r * r).sqrt()
    }

    fn signum(self) -> Self {
        if self < Self::zero() {
            -Self::one()
        } else {
            Self::one()
        }
    }
}

impl Real for f64 {
    const DIGITS: usize = 17;
    const NAME: &'static str = "double";

    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn parse_decimal(s: &str) -> Option<Self> {
        s.trim().parse().ok()
    }
    fn epsilon() -> Self {
        f64::EPSILON
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn floor(self) -> Self {
        f64::floor(self)
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn hypot(self, other: Self) -> Self {
        f64::hypot(self, other)
    }
    fn to_decimal_string(self, digits: usize) -> String {
        if digits >= 17 {
            format!("{self}")
        } else {
            format!("{:.*e}", digits.saturating_sub(1), self)
        }
    }
}

/// Complex functions over a generic [`Real`].
///
/// `num_complex` only provides these for `Float` types; the quad-double
/// type is not `Float`, so the kernels go through this trait instead.
pub trait ComplexExt<T: Real>: Sized {
    fn cabs(&self) -> T;
    fn csqrt(&self) -> Self;
    fn cexp(&self) -> Self;
    fn ccos(&self) -> Self;
    fn csin(&self) -> Self;
    fn cpowi(&self, n: i32) -> Self;
    fn is_finite_c(&self) -> bool;
    fn to_c64(&self) -> Complex<f64>;
    fn from_c64(z: Complex<f64>) -> Self;
}

impl<T: Real> ComplexExt<T> for Complex<T> {
    fn cabs(&self) -> T {
        self.re.hypot(self.im)
    }

    fn csqrt(&self) -> Self {
        let zero = T::zero();
        if self.re == zero && self.im == zero {
            return Complex::new(zero, zero);
        }
        let two = T::from_f64(2.0);
        let r = self.cabs();
        if self.re >= zero {
            let t = ((r + self.re) / two).sqrt();
            Complex::new(t, self.im / (two * t))
        } else {
            let t = ((r - self.re) / two).sqrt();
            let im = if self.im < zero { -t } else { t };
            Complex::new(self.im.abs() / (two * t), im)
        }
    }

    fn cexp(&self) -> Self {
        let m = self.re.exp();
        Complex::new(m * self.im.cos(), m * self.im.sin())
    }

    fn ccos(&self) -> Self {
        // cos(a+ib) = cos a cosh b - i sin a sinh b
        let half = T::from_f64(0.5);
        let eb = self.im.exp();
        let emb = T::one() / eb;
        let cosh = half * (eb + emb);
        let sinh = half * (eb - emb);
        Complex::new(self.re.cos() * cosh, -(self.re.sin() * sinh))
    }

    fn csin(&self) -> Self {
        let half = T::from_f64(0.5);
        let eb = self.im.exp();
        let emb = T::one() / eb;
        let cosh = half * (eb + emb);
        let sinh = half * (eb - emb);
        Complex::new(self.re.sin() * cosh, self.re.cos() * sinh)
    }

    fn cpowi(&self, n: i32) -> Self {
        let mut base = if n < 0 {
            Complex::new(T::one(), T::zero()) / *self
        } else {
            *self
        };
        let mut e = n.unsigned_abs();
        let mut acc = Complex::new(T::one(), T::zero());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    fn is_finite_c(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    fn to_c64(&self) -> Complex<f64> {
        Complex::new(self.re.to_f64(), self.im.to_f64())
    }

    fn from_c64(z: Complex<f64>) -> Self {
        Complex::new(T::from_f64(z.re), T::from_f64(z.im))
    }
}

/// Shorthand for a complex number over `T`.
pub type Cx<T> = Complex<T>;

pub(crate) fn cx<T: Real>(re: T, im: T) -> Cx<T> {
    Complex::new(re, im)
}

pub(crate) fn creal<T: Real>(re: T) -> Cx<T> {
    Complex::new(re, T::zero())
}

pub(crate) fn czero<T: Real>() -> Cx<T> {
    Complex::new(T::zero(), T::zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn complex_sqrt_matches_std() {
        for &(re, im) in &[(3.0, 4.0), (-3.0, 4.0), (-3.0, -4.0), (0.5, -2.0), (-1.0, 0.0)] {
            let z = Complex64::new(re, im);
            let ours = ComplexExt::csqrt(&z);
            let std = z.sqrt();
            assert!((ours - std).norm() < 1e-15, "{z}: {ours} vs {std}");
        }
    }

    #[test]
    fn complex_trig_and_exp_match_std() {
        let z = Complex64::new(0.7, -1.3);
        assert!((ComplexExt::cexp(&z) - z.exp()).norm() < 1e-15);
        assert!((ComplexExt::ccos(&z) - z.cos()).norm() < 1e-14);
        assert!((ComplexExt::csin(&z) - z.sin()).norm() < 1e-14);
        assert!((z.cpowi(-3) - z.powi(-3)).norm() < 1e-14);
    }
}
