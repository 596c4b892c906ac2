//! Quad-double arithmetic: an unevaluated sum of four binary64 limbs,
//! roughly 62 significant decimal digits.
//!
//! Every operation gathers the exact partial products / sums produced by
//! error-free transformations and renormalizes them into four
//! non-overlapping limbs.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, Sub, SubAssign};

use num_traits::{Num, One, Zero};

use crate::real::Real;

#[derive(Clone, Copy, Default, PartialEq)]
pub struct QuadDouble([f64; 4]);

const PI: QuadDouble = QuadDouble([
    std::f64::consts::PI,
    1.2246467991473532e-16,
    -2.9947698097183397e-33,
    1.1124542208633653e-49,
]);
const LN2: QuadDouble = QuadDouble([
    std::f64::consts::LN_2,
    2.3190468138462996e-17,
    5.707708438416212e-34,
    -3.5824322106018114e-50,
]);
const EPS: f64 = 1.2154326714572542e-63; // 2^-209

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn three_sum(a: f64, b: f64, c: f64) -> (f64, f64, f64) {
    let (t1, t2) = two_sum(a, b);
    let (a, t3) = two_sum(c, t1);
    let (b, c) = two_sum(t2, t3);
    (a, b, c)
}

/// Five overlapping limbs of decreasing magnitude into four.
fn renorm5(c0: f64, c1: f64, c2: f64, c3: f64, c4: f64) -> QuadDouble {
    if !c0.is_finite() {
        return QuadDouble([c0, 0.0, 0.0, 0.0]);
    }
    let (s, c4) = quick_two_sum(c3, c4);
    let (s, c3) = quick_two_sum(c2, s);
    let (s, c2) = quick_two_sum(c1, s);
    let (c0, c1) = quick_two_sum(c0, s);
    let (mut s0, mut s1) = quick_two_sum(c0, c1);
    let (mut s2, mut s3) = (0.0, 0.0);
    if s1 != 0.0 {
        (s1, s2) = quick_two_sum(s1, c2);
        if s2 != 0.0 {
            (s2, s3) = quick_two_sum(s2, c3);
            if s3 != 0.0 {
                s3 += c4;
            } else {
                (s2, s3) = quick_two_sum(s2, c4);
            }
        } else {
            (s1, s2) = quick_two_sum(s1, c3);
            if s2 != 0.0 {
                (s2, s3) = quick_two_sum(s2, c4);
            } else {
                (s1, s2) = quick_two_sum(s1, c4);
            }
        }
    } else {
        (s0, s1) = quick_two_sum(s0, c2);
        if s1 != 0.0 {
            (s1, s2) = quick_two_sum(s1, c3);
            if s2 != 0.0 {
                (s2, s3) = quick_two_sum(s2, c4);
            } else {
                (s1, s2) = quick_two_sum(s1, c4);
            }
        } else {
            (s0, s1) = quick_two_sum(s0, c3);
            if s1 != 0.0 {
                (s1, s2) = quick_two_sum(s1, c4);
            } else {
                (s0, s1) = quick_two_sum(s0, c4);
            }
        }
    }
    QuadDouble([s0, s1, s2, s3])
}

/// Collapses an arbitrary list of limbs into four non-overlapping ones.
fn renormalize(terms: &mut [f64]) -> QuadDouble {
    terms.sort_unstable_by(|a, b| b.abs().partial_cmp(&a.abs()).unwrap_or(Ordering::Equal));
    renormalize_sorted(terms)
}

/// As [`renormalize`] for limbs already ordered by decreasing magnitude.
fn renormalize_sorted(terms: &mut [f64]) -> QuadDouble {
    let n = terms.len();
    let mut s = terms[n - 1];
    for i in (0..n - 1).rev() {
        let (hi, lo) = two_sum(terms[i], s);
        terms[i + 1] = lo;
        s = hi;
    }
    terms[0] = s;
    if !s.is_finite() {
        return QuadDouble([s, 0.0, 0.0, 0.0]);
    }

    let mut out = [0.0; 4];
    let mut k = 0;
    let mut s = terms[0];
    let mut i = 1;
    while i < n {
        let (hi, lo) = two_sum(s, terms[i]);
        i += 1;
        if lo != 0.0 {
            out[k] = hi;
            k += 1;
            s = lo;
            if k == 3 {
                for &t in &terms[i..] {
                    s += t;
                }
                break;
            }
        } else {
            s = hi;
        }
    }
    out[k] = s;
    QuadDouble(out)
}

impl QuadDouble {
    pub const ZERO: QuadDouble = QuadDouble([0.0; 4]);
    pub const ONE: QuadDouble = QuadDouble([1.0, 0.0, 0.0, 0.0]);

    pub const fn from_f64(x: f64) -> Self {
        QuadDouble([x, 0.0, 0.0, 0.0])
    }

    pub fn limbs(&self) -> [f64; 4] {
        self.0
    }

    pub fn hi(&self) -> f64 {
        self.0[0]
    }

    fn mul_f64(self, b: f64) -> Self {
        let mut t = [0.0; 8];
        for i in 0..4 {
            let (p, e) = two_prod(self.0[i], b);
            t[2 * i] = p;
            t[2 * i + 1] = e;
        }
        renormalize(&mut t)
    }

    /// Multiplication by an exact power of two.
    fn ldexp(self, k: i32) -> Self {
        let f = 2f64.powi(k);
        QuadDouble([self.0[0] * f, self.0[1] * f, self.0[2] * f, self.0[3] * f])
    }

    fn round(self) -> Self {
        (self + QuadDouble::from_f64(0.5)).floor_qd()
    }

    fn floor_qd(self) -> Self {
        let mut out = [0.0; 4];
        out[0] = self.0[0].floor();
        if out[0] == self.0[0] {
            out[1] = self.0[1].floor();
            if out[1] == self.0[1] {
                out[2] = self.0[2].floor();
                if out[2] == self.0[2] {
                    out[3] = self.0[3].floor();
                }
            }
        }
        renormalize(&mut out)
    }

    fn pow10(e: i32) -> Self {
        let mut base = QuadDouble::from_f64(10.0);
        let mut n = e.unsigned_abs();
        let mut acc = QuadDouble::ONE;
        while n > 0 {
            if n & 1 == 1 {
                acc *= base;
            }
            base = base * base;
            n >>= 1;
        }
        if e < 0 {
            QuadDouble::ONE / acc
        } else {
            acc
        }
    }

    fn expm1_small(r: Self) -> Self {
        // Taylor series, |r| < 1e-3
        let mut term = r;
        let mut sum = r;
        let mut k = 2.0;
        while term.0[0].abs() > EPS * sum.0[0].abs().max(f64::MIN_POSITIVE) {
            term = term * r / QuadDouble::from_f64(k);
            sum += term;
            k += 1.0;
        }
        sum
    }

    fn exp_qd(self) -> Self {
        let x = self.0[0];
        if x > 709.0 {
            return QuadDouble::from_f64(f64::INFINITY);
        }
        if x < -745.0 {
            return QuadDouble::ZERO;
        }
        if self == QuadDouble::ZERO {
            return QuadDouble::ONE;
        }
        let k = (x / LN2.0[0]).round();
        let r = self - LN2.mul_f64(k);
        const HALVINGS: i32 = 12;
        let r = r.ldexp(-HALVINGS);
        let mut s = Self::expm1_small(r);
        let two = QuadDouble::from_f64(2.0);
        for _ in 0..HALVINGS {
            // (1+s)^2 - 1 = s (2 + s)
            s = s * (two + s);
        }
        (s + QuadDouble::ONE).ldexp(k as i32)
    }

    fn ln_qd(self) -> Self {
        if self.0[0] <= 0.0 {
            return QuadDouble::from_f64(f64::NAN);
        }
        let mut y = QuadDouble::from_f64(self.0[0].ln());
        for _ in 0..3 {
            y = y + self * (-y).exp_qd() - QuadDouble::ONE;
        }
        y
    }

    /// sin and cos of an argument already reduced to |r| <= pi/4.
    fn sin_cos_reduced(r: Self) -> (Self, Self) {
        let r2 = r * r;
        let mut s = r;
        let mut term = r;
        let mut k = 1.0;
        loop {
            term = -(term * r2) / QuadDouble::from_f64((k + 1.0) * (k + 2.0));
            k += 2.0;
            s += term;
            if term.0[0].abs() <= EPS * s.0[0].abs() || term.0[0] == 0.0 {
                break;
            }
        }
        let mut c = QuadDouble::ONE;
        let mut term = QuadDouble::ONE;
        let mut k = 0.0;
        loop {
            term = -(term * r2) / QuadDouble::from_f64((k + 1.0) * (k + 2.0));
            k += 2.0;
            c += term;
            if term.0[0].abs() <= EPS || term.0[0] == 0.0 {
                break;
            }
        }
        (s, c)
    }

    fn sin_cos(self) -> (Self, Self) {
        let half_pi = PI.ldexp(-1);
        let q = (self / half_pi).round();
        let r = self - half_pi * q;
        let (s, c) = Self::sin_cos_reduced(r);
        match (q.0[0] as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }

    fn sqrt_qd(self) -> Self {
        if self.0[0] <= 0.0 {
            return if self.0[0] == 0.0 {
                QuadDouble::ZERO
            } else {
                QuadDouble::from_f64(f64::NAN)
            };
        }
        let mut x = QuadDouble::from_f64(self.0[0].sqrt());
        let half = QuadDouble::from_f64(0.5);
        for _ in 0..3 {
            x = x + (self - x * x) / x * half;
        }
        x
    }

    fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        let (neg, body) = match s.as_bytes().first()? {
            b'-' => (true, &s[1..]),
            b'+' => (false, &s[1..]),
            _ => (false, s),
        };
        let (mant, exp) = match body.find(['e', 'E']) {
            Some(i) => (&body[..i], body[i + 1..].parse::<i32>().ok()?),
            None => (body, 0),
        };
        let mut acc = QuadDouble::ZERO;
        let mut frac_digits = 0i32;
        let mut seen_point = false;
        let mut seen_digit = false;
        let ten = QuadDouble::from_f64(10.0);
        for ch in mant.chars() {
            match ch {
                '0'..='9' => {
                    seen_digit = true;
                    acc = acc * ten + QuadDouble::from_f64(f64::from(ch as u8 - b'0'));
                    if seen_point {
                        frac_digits += 1;
                    }
                }
                '.' if !seen_point => seen_point = true,
                '_' => {}
                _ => return None,
            }
        }
        if !seen_digit {
            return None;
        }
        let e = exp - frac_digits;
        let v = match e.cmp(&0) {
            Ordering::Equal => acc,
            Ordering::Greater => acc * Self::pow10(e),
            Ordering::Less => acc / Self::pow10(-e),
        };
        Some(if neg { -v } else { v })
    }

    fn format_digits(self, digits: usize) -> String {
        let digits = digits.clamp(1, 64);
        if self.0[0] == 0.0 {
            return "0".to_string();
        }
        if !self.0[0].is_finite() {
            return format!("{}", self.0[0]);
        }
        let neg = self.0[0] < 0.0;
        let a = if neg { -self } else { self };
        let mut e = a.0[0].abs().log10().floor() as i32;
        let mut r = a * Self::pow10(-e);
        if r.0[0] >= 10.0 {
            r /= QuadDouble::from_f64(10.0);
            e += 1;
        } else if r.0[0] < 1.0 {
            r *= QuadDouble::from_f64(10.0);
            e -= 1;
        }
        let ten = QuadDouble::from_f64(10.0);
        let mut ds: Vec<u8> = Vec::with_capacity(digits + 1);
        for _ in 0..=digits {
            let d = r.floor_qd().0[0].clamp(0.0, 9.0);
            ds.push(d as u8);
            r = (r - QuadDouble::from_f64(d)) * ten;
        }
        // round half up on the guard digit
        let guard = ds.pop().unwrap_or(0);
        if guard >= 5 {
            let mut i = ds.len();
            loop {
                if i == 0 {
                    ds.insert(0, 1);
                    ds.pop();
                    e += 1;
                    break;
                }
                i -= 1;
                if ds[i] == 9 {
                    ds[i] = 0;
                } else {
                    ds[i] += 1;
                    break;
                }
            }
        }
        while ds.len() > 1 && *ds.last().unwrap() == 0 {
            ds.pop();
        }
        let digit_str: String = ds.iter().map(|d| char::from(b'0' + d)).collect();
        let sign = if neg { "-" } else { "" };
        if (-5..21).contains(&e) {
            if e >= 0 {
                let e = e as usize;
                if digit_str.len() > e + 1 {
                    format!("{sign}{}.{}", &digit_str[..=e], &digit_str[e + 1..])
                } else {
                    format!("{sign}{}{}", digit_str, "0".repeat(e + 1 - digit_str.len()))
                }
            } else {
                format!("{sign}0.{}{}", "0".repeat((-e - 1) as usize), digit_str)
            }
        } else if digit_str.len() > 1 {
            format!("{sign}{}.{}e{e}", &digit_str[..1], &digit_str[1..])
        } else {
            format!("{sign}{digit_str}e{e}")
        }
    }
}

impl From<f64> for QuadDouble {
    fn from(x: f64) -> Self {
        QuadDouble::from_f64(x)
    }
}

impl PartialOrd for QuadDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        for i in 0..4 {
            match self.0[i].partial_cmp(&other.0[i])? {
                Ordering::Equal => continue,
                o => return Some(o),
            }
        }
        Some(Ordering::Equal)
    }
}

impl Neg for QuadDouble {
    type Output = Self;
    fn neg(self) -> Self {
        QuadDouble([-self.0[0], -self.0[1], -self.0[2], -self.0[3]])
    }
}

impl Add for QuadDouble {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        // merge the two magnitude-ordered limb lists
        let (a, b) = (&self.0, &rhs.0);
        let mut t = [0.0; 8];
        let (mut i, mut j) = (0, 0);
        for slot in t.iter_mut() {
            *slot = if j == 4 || (i < 4 && a[i].abs() >= b[j].abs()) {
                i += 1;
                a[i - 1]
            } else {
                j += 1;
                b[j - 1]
            };
        }
        renormalize_sorted(&mut t)
    }
}

impl Sub for QuadDouble {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for QuadDouble {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let a = &self.0;
        let b = &rhs.0;
        let (p0, q0) = two_prod(a[0], b[0]);
        let (p1, q1) = two_prod(a[0], b[1]);
        let (p2, q2) = two_prod(a[1], b[0]);
        let (p3, q3) = two_prod(a[0], b[2]);
        let (p4, q4) = two_prod(a[1], b[1]);
        let (p5, q5) = two_prod(a[2], b[0]);
        let (p1, p2, q0) = three_sum(p1, p2, q0);
        // six-three sum of (p2, q1, q2) and (p3, p4, p5)
        let (p2, q1, q2) = three_sum(p2, q1, q2);
        let (p3, p4, p5) = three_sum(p3, p4, p5);
        let (s0, t0) = two_sum(p2, p3);
        let (s1, t1) = two_sum(q1, p4);
        let mut s2 = q2 + p5;
        let (mut s1, t0) = two_sum(s1, t0);
        s2 += t0 + t1;
        s1 += a[0] * b[3] + a[1] * b[2] + a[2] * b[1] + a[3] * b[0] + q0 + q3 + q4 + q5;
        renorm5(p0, p1, s0, s1, s2)
    }
}

impl Div for QuadDouble {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let b0 = rhs.0[0];
        let mut q = [0.0; 5];
        let mut r = self;
        for qi in q.iter_mut() {
            *qi = r.0[0] / b0;
            r -= rhs.mul_f64(*qi);
        }
        if !q[0].is_finite() {
            return QuadDouble::from_f64(q[0]);
        }
        renormalize(&mut q)
    }
}

impl Rem for QuadDouble {
    type Output = Self;
    fn rem(self, rhs: Self) -> Self {
        let q = self / rhs;
        let t = if q.0[0] < 0.0 {
            -(-q).floor_qd()
        } else {
            q.floor_qd()
        };
        self - t * rhs
    }
}

impl AddAssign for QuadDouble {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}
impl SubAssign for QuadDouble {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}
impl MulAssign for QuadDouble {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}
impl DivAssign for QuadDouble {
    fn div_assign(&mut self, rhs: Self) {
        *self = *self / rhs;
    }
}

impl Zero for QuadDouble {
    fn zero() -> Self {
        QuadDouble::ZERO
    }
    fn is_zero(&self) -> bool {
        self.0[0] == 0.0
    }
}

impl One for QuadDouble {
    fn one() -> Self {
        QuadDouble::ONE
    }
}

impl Num for QuadDouble {
    type FromStrRadixErr = String;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        if radix != 10 {
            return Err(format!("unsupported radix {radix}"));
        }
        QuadDouble::parse(s).ok_or_else(|| format!("invalid decimal literal {s:?}"))
    }
}

impl fmt::Debug for QuadDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuadDouble({})", self.format_digits(64))
    }
}

impl fmt::Display for QuadDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(62);
        f.write_str(&self.format_digits(digits))
    }
}

impl Real for QuadDouble {
    const DIGITS: usize = 62;
    const NAME: &'static str = "quad-double";

    fn from_f64(x: f64) -> Self {
        QuadDouble::from_f64(x)
    }
    fn to_f64(self) -> f64 {
        self.0[0] + (self.0[1] + (self.0[2] + self.0[3]))
    }
    fn parse_decimal(s: &str) -> Option<Self> {
        QuadDouble::parse(s)
    }
    fn epsilon() -> Self {
        QuadDouble::from_f64(EPS)
    }
    fn pi() -> Self {
        PI
    }
    fn sqrt(self) -> Self {
        self.sqrt_qd()
    }
    fn abs(self) -> Self {
        if self.0[0] < 0.0 {
            -self
        } else {
            self
        }
    }
    fn exp(self) -> Self {
        self.exp_qd()
    }
    fn ln(self) -> Self {
        self.ln_qd()
    }
    fn sin(self) -> Self {
        self.sin_cos().0
    }
    fn cos(self) -> Self {
        self.sin_cos().1
    }
    fn floor(self) -> Self {
        self.floor_qd()
    }
    fn is_finite(self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
    fn from_usize(n: usize) -> Self {
        QuadDouble::from_f64(n as f64)
    }
    fn to_decimal_string(self, digits: usize) -> String {
        self.format_digits(digits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qd(s: &str) -> QuadDouble {
        QuadDouble::parse(s).unwrap()
    }

    fn close(a: QuadDouble, b: QuadDouble, tol: f64) -> bool {
        let d = (a - b).abs().to_f64();
        d <= tol * b.abs().to_f64().max(1e-300)
    }

    #[test]
    fn sqrt_two_squares_back() {
        let two = QuadDouble::from_f64(2.0);
        let r = two.sqrt();
        assert!(close(r * r, two, 1e-62));
        assert_eq!(
            r.to_decimal_string(50),
            "1.4142135623730950488016887242096980785696718753769"
        );
    }

    #[test]
    fn pi_and_exp_digits() {
        assert_eq!(
            QuadDouble::pi().to_decimal_string(40),
            "3.141592653589793238462643383279502884197"
        );
        let e = QuadDouble::ONE.exp();
        assert_eq!(
            e.to_decimal_string(50),
            "2.7182818284590452353602874713526624977572470937"
        );
    }

    #[test]
    fn ln_inverts_exp() {
        let x = qd("3.7");
        assert!(close(x.ln().exp(), x, 1e-60));
        let ln10 = QuadDouble::from_f64(10.0).ln();
        assert_eq!(
            ln10.to_decimal_string(45),
            "2.30258509299404568401799145468436420760110149"
        );
    }

    #[test]
    fn trig_identities() {
        for s in ["0.3", "1.2", "-2.5", "7.25", "40.0"] {
            let x = qd(s);
            let (sn, cs) = x.sin_cos();
            assert!(close(sn * sn + cs * cs, QuadDouble::ONE, 1e-60), "{s}");
        }
        let sixth = QuadDouble::pi() / QuadDouble::from_f64(6.0);
        assert!(close(sixth.sin(), QuadDouble::from_f64(0.5), 1e-60));
    }

    #[test]
    fn decimal_parse_is_exact_past_binary64() {
        let a = qd("0.02");
        let fifty = QuadDouble::from_f64(50.0);
        assert!(close(a * fifty, QuadDouble::ONE, 1e-62));
        assert_eq!(a.to_decimal_string(40), "0.02");
        assert_eq!(qd("-1.25e-3").to_decimal_string(10), "-0.00125");
        assert_eq!(qd("5.109394888e-14").to_decimal_string(10), "5.109394888e-14");
    }

    #[test]
    fn cancellation_keeps_low_limbs() {
        let tiny = qd("1e-40");
        let one = QuadDouble::ONE;
        let d = (one + tiny) - one;
        assert!(close(d, tiny, 1e-20));
    }

    #[test]
    fn division_round_trip() {
        let a = qd("1.2345678901234567890123456789012345678901234567890");
        let b = qd("-9.87654321");
        assert!(close(a / b * b, a, 1e-61));
        assert!(close(QuadDouble::ONE / QuadDouble::from_f64(3.0) * QuadDouble::from_f64(3.0), QuadDouble::ONE, 1e-62));
    }
}
