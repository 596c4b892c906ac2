//! Basis families with complex nonlinear parameters.
//!
//! Every family is orthonormal for real parameters and is continued
//! analytically into the complex parameter plane; integrals are c-products,
//! so no function is ever conjugated.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::{creal, cx, czero, ComplexExt, Cx, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    Ho,
    ShiftedHo,
    TrigEven,
    TrigOdd,
    RadialHo,
    RadialTrig,
}

impl BasisKind {
    pub fn name(self) -> &'static str {
        match self {
            BasisKind::Ho => "ho",
            BasisKind::ShiftedHo => "shifted_ho",
            BasisKind::TrigEven => "trig_even",
            BasisKind::TrigOdd => "trig_odd",
            BasisKind::RadialHo => "radial_ho",
            BasisKind::RadialTrig => "radial_trig",
        }
    }

    pub fn is_oscillator(self) -> bool {
        matches!(self, BasisKind::Ho | BasisKind::ShiftedHo | BasisKind::RadialHo)
    }

    pub fn is_radial(self) -> bool {
        matches!(self, BasisKind::RadialHo | BasisKind::RadialTrig)
    }
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sector {
    Even,
    Odd,
    All,
    Radial,
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sector::Even => "even",
            Sector::Odd => "odd",
            Sector::All => "all",
            Sector::Radial => "radial",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BasisFamily<T> {
    pub kind: BasisKind,
    pub sector: Sector,
    /// Centrifugal index Λ; only meaningful for `radial_ho`.
    pub lambda: T,
}

impl<T: Real> BasisFamily<T> {
    pub fn new(kind: BasisKind, sector: Sector) -> Self {
        BasisFamily {
            kind,
            sector,
            lambda: T::zero(),
        }
    }

    pub fn radial_ho(lambda: T) -> Self {
        BasisFamily {
            kind: BasisKind::RadialHo,
            sector: Sector::Radial,
            lambda,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ParamName {
    #[serde(rename = "omega")]
    Omega,
    #[serde(rename = "t")]
    T,
    #[serde(rename = "L")]
    L,
}

impl ParamName {
    pub fn label(self) -> &'static str {
        match self {
            ParamName::Omega => "omega",
            ParamName::T => "t",
            ParamName::L => "L",
        }
    }
}

/// Values of the nonlinear parameters; absent entries are `None`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamPoint<T> {
    pub omega: Option<Cx<T>>,
    pub t: Option<Cx<T>>,
    pub l: Option<Cx<T>>,
}

impl<T> Default for ParamPoint<T> {
    fn default() -> Self {
        ParamPoint {
            omega: None,
            t: None,
            l: None,
        }
    }
}

impl<T: Real> ParamPoint<T> {
    pub fn omega(omega: Cx<T>) -> Self {
        ParamPoint {
            omega: Some(omega),
            t: None,
            l: None,
        }
    }

    pub fn shifted(omega: Cx<T>, t: Cx<T>) -> Self {
        ParamPoint {
            omega: Some(omega),
            t: Some(t),
            l: None,
        }
    }

    pub fn box_width(l: Cx<T>) -> Self {
        ParamPoint {
            omega: None,
            t: None,
            l: Some(l),
        }
    }

    pub fn get(&self, name: ParamName) -> Option<Cx<T>> {
        match name {
            ParamName::Omega => self.omega,
            ParamName::T => self.t,
            ParamName::L => self.l,
        }
    }

    pub fn set(&mut self, name: ParamName, value: Cx<T>) {
        match name {
            ParamName::Omega => self.omega = Some(value),
            ParamName::T => self.t = Some(value),
            ParamName::L => self.l = Some(value),
        }
    }

    pub fn to_c64(&self) -> ParamPoint<f64> {
        ParamPoint {
            omega: self.omega.map(|z| z.to_c64()),
            t: self.t.map(|z| z.to_c64()),
            l: self.l.map(|z| z.to_c64()),
        }
    }

    pub fn from_c64(p: &ParamPoint<f64>) -> Self {
        ParamPoint {
            omega: p.omega.map(Cx::from_c64),
            t: p.t.map(Cx::from_c64),
            l: p.l.map(Cx::from_c64),
        }
    }

    /// Euclidean distance over the parameters present in both points.
    pub fn distance(&self, other: &Self) -> T {
        let mut d2 = T::zero();
        for name in [ParamName::Omega, ParamName::T, ParamName::L] {
            if let (Some(a), Some(b)) = (self.get(name), other.get(name)) {
                let d = (a - b).cabs();
                d2 += d * d;
            }
        }
        d2.sqrt()
    }
}

/// A family restricted to one sector, with its index map and parameter layout.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BasisSpec<T> {
    pub family: BasisFamily<T>,
}

/// Checks sector compatibility and fixes the index mapping.
pub fn make_basis<T: Real>(family: BasisFamily<T>) -> Result<BasisSpec<T>> {
    use BasisKind::*;
    let ok = match family.kind {
        Ho => matches!(family.sector, Sector::Even | Sector::Odd | Sector::All),
        ShiftedHo => family.sector == Sector::All,
        TrigEven => family.sector == Sector::Even,
        TrigOdd => family.sector == Sector::Odd,
        RadialHo | RadialTrig => family.sector == Sector::Radial,
    };
    if !ok {
        return Err(Error::IncompatibleSector {
            family: family.kind.name().into(),
            sector: family.sector.to_string(),
        });
    }
    if family.kind == RadialHo {
        let twice = family.lambda + family.lambda;
        if !(family.lambda >= T::from_f64(-1.0)) || twice != twice.floor() {
            return Err(Error::InvalidArgument(format!(
                "radial oscillator needs Λ ≥ −1 in steps of ½, got {}",
                family.lambda
            )));
        }
    }
    Ok(BasisSpec { family })
}

impl<T: Real> BasisSpec<T> {
    pub fn kind(&self) -> BasisKind {
        self.family.kind
    }

    pub fn sector(&self) -> Sector {
        self.family.sector
    }

    /// Underlying polynomial or mode index of the `n`-th sector function.
    pub fn index(&self, n: usize) -> usize {
        match (self.family.kind, self.family.sector) {
            (BasisKind::Ho, Sector::Even) => 2 * n,
            (BasisKind::Ho, Sector::Odd) => 2 * n + 1,
            _ => n,
        }
    }

    pub fn indices(&self, m: usize) -> Vec<usize> {
        (0..m).map(|n| self.index(n)).collect()
    }

    pub fn params(&self) -> &'static [ParamName] {
        match self.family.kind {
            BasisKind::Ho | BasisKind::RadialHo => &[ParamName::Omega],
            BasisKind::ShiftedHo => &[ParamName::Omega, ParamName::T],
            _ => &[ParamName::L],
        }
    }

    /// Wave number `k` of trig mode `n`, in units of `π/L`.
    pub fn trig_wavenumber(&self, n: usize) -> T {
        match self.family.kind {
            BasisKind::TrigEven => T::from_usize(n) + T::from_f64(0.5),
            _ => T::from_usize(n + 1),
        }
    }

    pub fn check_params(&self, p: &ParamPoint<T>) -> Result<()> {
        for name in [ParamName::Omega, ParamName::T, ParamName::L] {
            let wanted = self.params().contains(&name);
            if wanted != p.get(name).is_some() {
                let what = if wanted { "missing" } else { "unexpected" };
                return Err(Error::InvalidParams(format!(
                    "{what} parameter {} for {} basis",
                    name.label(),
                    self.family.kind
                )));
            }
        }
        if !validity_region(&self.family, p) {
            return Err(Error::InvalidParams(format!(
                "parameters outside the validity region of {}: {:?}",
                self.family.kind,
                p.to_c64()
            )));
        }
        Ok(())
    }

    /// `(φ_n(z), φ_n''(z))` at a complex point.
    pub fn eval_with_second(&self, n: usize, p: &ParamPoint<T>, z: Cx<T>) -> (Cx<T>, Cx<T>) {
        let j = self.index(n);
        match self.family.kind {
            BasisKind::Ho | BasisKind::ShiftedHo => {
                let omega = p.omega.expect("checked");
                let y = z - p.t.unwrap_or_else(czero);
                let phi = hermite_function(j, omega, y);
                let k = T::from_usize(2 * j + 1);
                (phi, phi * (omega * omega * y * y - omega.scale(k)))
            }
            BasisKind::RadialHo => {
                let omega = p.omega.expect("checked");
                let lam = self.family.lambda;
                let phi = radial_ho_function(j, lam, omega, z);
                let centr = creal::<T>(lam * (lam + T::one())) / (z * z);
                let level = T::from_usize(2 * j) + lam + T::from_f64(1.5);
                (phi, phi * (centr + omega * omega * z * z - omega.scale(level + level)))
            }
            BasisKind::TrigEven | BasisKind::TrigOdd | BasisKind::RadialTrig => {
                let l = p.l.expect("checked");
                let k = creal::<T>(self.trig_wavenumber(n) * T::pi()) / l;
                let arg = k * z;
                let norm = match self.family.kind {
                    BasisKind::RadialTrig => (creal::<T>(T::from_f64(2.0)) / l).csqrt(),
                    _ => l.csqrt().inv(),
                };
                let phi = norm
                    * match self.family.kind {
                        BasisKind::TrigEven => arg.ccos(),
                        _ => arg.csin(),
                    };
                (phi, -(k * k) * phi)
            }
        }
    }
}

/// Parameter validity predicate of a family.
///
/// Oscillator families need `Re Ω > 0` and `Im Ω ≤ 0`; trig families need
/// `Im L ≥ 0` and `L ≠ 0`. Negative `Re L` is admitted.
pub fn validity_region<T: Real>(family: &BasisFamily<T>, p: &ParamPoint<T>) -> bool {
    if family.kind.is_oscillator() {
        match p.omega {
            Some(w) => w.re > T::zero() && w.im <= T::zero() && w.is_finite_c(),
            None => false,
        }
    } else {
        match p.l {
            Some(l) => l.im >= T::zero() && l.cabs() > T::zero() && l.is_finite_c(),
            None => false,
        }
    }
}

/// `φ_n(x)` at a real point.
pub fn eval_fn<T: Real>(basis: &BasisSpec<T>, n: usize, params: &ParamPoint<T>, x: T) -> Result<Cx<T>> {
    if basis.kind().is_radial() && !(x > T::zero()) {
        return Err(Error::DomainViolation(x.to_f64()));
    }
    basis.check_params(params)?;
    Ok(basis.eval_with_second(n, params, creal(x)).0)
}

/// `Ω^{1/4} ψ_j(√Ω y)` with ψ_j the normalized Hermite function.
fn hermite_function<T: Real>(j: usize, omega: Cx<T>, y: Cx<T>) -> Cx<T> {
    let s = omega.csqrt();
    let u = s * y;
    let mut prev = czero();
    let mut cur = s.csqrt() * (-(u * u).scale(T::from_f64(0.5))).cexp() / T::pi().sqrt().sqrt();
    let two = T::from_f64(2.0);
    for n in 0..j {
        let nf = T::from_usize(n);
        let n1 = T::from_usize(n + 1);
        let next = u * cur.scale((two / n1).sqrt()) - prev.scale((nf / n1).sqrt());
        prev = cur;
        cur = next;
    }
    cur
}

/// `√2 Ω^{(α+1)/2} r^{Λ+1} e^{−Ωr²/2} ℓ_j(Ωr²)` with `α = Λ + ½` and
/// `ℓ_j = √(j!/Γ(j+α+1)) L_j^α` the normalized Laguerre polynomial.
fn radial_ho_function<T: Real>(j: usize, lam: T, omega: Cx<T>, r: Cx<T>) -> Cx<T> {
    let half = T::from_f64(0.5);
    let alpha = lam + half;
    let z = omega * r * r;
    let mut prev = czero();
    let mut cur = creal((-half * ln_gamma_half_integer(alpha + T::one())).exp());
    for n in 0..j {
        let nf = T::from_usize(n);
        let a = T::from_usize(2 * n + 1) + alpha;
        let b = (nf * (nf + alpha)).sqrt();
        let c = ((nf + T::one()) * (nf + alpha + T::one())).sqrt();
        let next = (cur * (creal::<T>(a) - z) - prev.scale(b)) / c;
        prev = cur;
        cur = next;
    }
    let prefactor = cpow_real(omega, (alpha + T::one()) * half) * cpow_real(r, lam + T::one());
    prefactor.scale(T::from_f64(2.0).sqrt()) * (-(z.scale(half))).cexp() * cur
}

/// Principal branch of `z^a` for real `a`.
fn cpow_real<T: Real>(z: Cx<T>, a: T) -> Cx<T> {
    let r = z.cabs();
    if r == T::zero() {
        return czero();
    }
    let theta = atan2(z.im, z.re);
    let mag = (a * r.ln()).exp();
    let phase = a * theta;
    cx(mag * phase.cos(), mag * phase.sin())
}

/// Four-quadrant arctangent, refined by Newton in the working precision.
pub(crate) fn atan2<T: Real>(y: T, x: T) -> T {
    let mut t = T::from_f64(y.to_f64().atan2(x.to_f64()));
    if T::DIGITS > 17 {
        let r = x.hypot(y);
        for _ in 0..3 {
            let (s, c) = (t.sin(), t.cos());
            // minimize |r e^{it} − (x+iy)|: step along the tangent
            t += (y * c - x * s) / r;
        }
    }
    t
}

/// `ln Γ(x)` for `x` a positive multiple of ½.
fn ln_gamma_half_integer<T: Real>(x: T) -> T {
    let half = T::from_f64(0.5);
    let (mut acc, mut base) = if (x + x).to_f64() as i64 % 2 == 0 {
        (T::zero(), T::one())
    } else {
        (T::pi().sqrt().ln(), half)
    };
    while base < x {
        acc += base.ln();
        base += T::one();
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GaussLegendre;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn spec(kind: BasisKind, sector: Sector) -> BasisSpec<f64> {
        make_basis(BasisFamily::new(kind, sector)).unwrap()
    }

    #[test]
    fn layouts() {
        let b = spec(BasisKind::Ho, Sector::Even);
        assert_eq!(b.indices(4), vec![0, 2, 4, 6]);
        assert_eq!(b.params(), &[ParamName::Omega]);
        let b = spec(BasisKind::ShiftedHo, Sector::All);
        assert_eq!(b.indices(3), vec![0, 1, 2]);
        assert_eq!(b.params(), &[ParamName::Omega, ParamName::T]);
        let b = spec(BasisKind::RadialTrig, Sector::Radial);
        assert_eq!(b.indices(3), vec![0, 1, 2]);
        assert_eq!(b.params(), &[ParamName::L]);
        assert!(make_basis(BasisFamily::<f64>::new(BasisKind::TrigEven, Sector::Odd)).is_err());
        assert!(make_basis(BasisFamily::<f64>::new(BasisKind::ShiftedHo, Sector::Even)).is_err());
        assert!(make_basis(BasisFamily::<f64>::new(BasisKind::RadialHo, Sector::All)).is_err());
    }

    #[test]
    fn point_values() {
        let ho = spec(BasisKind::Ho, Sector::All);
        let v = eval_fn(&ho, 0, &ParamPoint::omega(c(1.0, 0.0)), 0.0).unwrap();
        assert!((v.re - 0.751_125_544_464_942_5).abs() < 1e-15);
        let te = spec(BasisKind::TrigEven, Sector::Even);
        let v = eval_fn(&te, 0, &ParamPoint::box_width(c(2.0, 0.0)), 0.0).unwrap();
        assert!((v.re - 0.5f64.sqrt()).abs() < 1e-15);
        let rt = spec(BasisKind::RadialTrig, Sector::Radial);
        let v = eval_fn(&rt, 0, &ParamPoint::box_width(c(3.0, 0.0)), 1.5).unwrap();
        assert!((v.re - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(
            eval_fn(&rt, 0, &ParamPoint::box_width(c(3.0, 0.0)), 0.0),
            Err(Error::DomainViolation(0.0))
        );
    }

    #[test]
    fn validity() {
        let ho = BasisFamily::<f64>::new(BasisKind::Ho, Sector::Even);
        assert!(validity_region(&ho, &ParamPoint::omega(c(0.5163, -3.1840))));
        assert!(!validity_region(&ho, &ParamPoint::omega(c(-1.0, 0.0))));
        let tr = BasisFamily::<f64>::new(BasisKind::TrigEven, Sector::Even);
        assert!(validity_region(&tr, &ParamPoint::box_width(c(5.114, 2.888))));
        assert!(validity_region(&tr, &ParamPoint::box_width(c(-1.680, 7.102))));
        assert!(!validity_region(&tr, &ParamPoint::box_width(c(0.0, 0.0))));
        assert!(!validity_region(&tr, &ParamPoint::box_width(c(3.0, -0.1))));
    }

    fn gram(basis: &BasisSpec<f64>, p: &ParamPoint<f64>, a: f64, b: f64) -> f64 {
        let gl = GaussLegendre::<f64>::new(60);
        let mut worst: f64 = 0.0;
        for j in 0..=8 {
            for m in 0..=8 {
                let s: f64 = gl.integrate_composite(a, b, 40, |x| {
                    (basis.eval_with_second(j, p, c(x, 0.0)).0 * basis.eval_with_second(m, p, c(x, 0.0)).0).re
                });
                let want = if j == m { 1.0 } else { 0.0 };
                worst = worst.max((s - want).abs());
            }
        }
        worst
    }

    #[test]
    fn orthonormal_at_real_parameters() {
        let w = ParamPoint::omega(c(1.3, 0.0));
        for sector in [Sector::Even, Sector::Odd, Sector::All] {
            assert!(gram(&spec(BasisKind::Ho, sector), &w, -12.0, 12.0) < 1e-12);
        }
        let shifted = ParamPoint::shifted(c(0.8, 0.0), c(0.7, 0.0));
        assert!(gram(&spec(BasisKind::ShiftedHo, Sector::All), &shifted, -14.0, 15.0) < 1e-12);
        for lam in [-0.5, 0.0, 0.5, 1.0, 2.0] {
            let b = make_basis(BasisFamily::radial_ho(lam)).unwrap();
            assert!(gram(&b, &w, 0.0, 12.0) < 1e-12, "Λ={lam}");
        }
        let l = ParamPoint::box_width(c(3.0, 0.0));
        assert!(gram(&spec(BasisKind::TrigEven, Sector::Even), &l, -3.0, 3.0) < 1e-12);
        assert!(gram(&spec(BasisKind::TrigOdd, Sector::Odd), &l, -3.0, 3.0) < 1e-12);
        assert!(gram(&spec(BasisKind::RadialTrig, Sector::Radial), &l, 0.0, 3.0) < 1e-12);
    }

    #[test]
    fn second_derivative_matches_finite_difference() {
        let h = 1e-3;
        let cases: Vec<(BasisSpec<f64>, ParamPoint<f64>)> = vec![
            (spec(BasisKind::Ho, Sector::All), ParamPoint::omega(c(0.9, -0.4))),
            (spec(BasisKind::ShiftedHo, Sector::All), ParamPoint::shifted(c(1.1, -0.6), c(-0.4, -0.9))),
            (make_basis(BasisFamily::radial_ho(-0.5)).unwrap(), ParamPoint::omega(c(0.9, -1.2))),
            (make_basis(BasisFamily::radial_ho(1.0)).unwrap(), ParamPoint::omega(c(0.9, -1.2))),
            (spec(BasisKind::TrigEven, Sector::Even), ParamPoint::box_width(c(5.0, 2.0))),
            (spec(BasisKind::RadialTrig, Sector::Radial), ParamPoint::box_width(c(-0.8, 6.6))),
        ];
        for (b, p) in &cases {
            for n in [0, 1, 5] {
                let x = c(0.83, 0.0);
                let f = |z: Complex64| b.eval_with_second(n, p, z).0;
                let fd = (f(x + h) - f(x) * 2.0 + f(x - h)) / (h * h);
                let exact = b.eval_with_second(n, p, x).1;
                assert!((fd - exact).norm() < 1e-5 * exact.norm().max(1.0), "{:?} n={n}", b.kind());
            }
        }
    }

    #[test]
    fn recurrences_survive_large_index() {
        let b = make_basis(BasisFamily::radial_ho(0.0)).unwrap();
        let v = b.eval_with_second(180, &ParamPoint::omega(c(1.0, 0.0)), c(3.0, 0.0)).0;
        assert!(v.is_finite() && v.norm() < 2.0);
        let b = spec(BasisKind::Ho, Sector::Even);
        let v = b.eval_with_second(180, &ParamPoint::omega(c(1.0, 0.0)), c(3.0, 0.0)).0;
        assert!(v.is_finite() && v.norm() < 2.0);
    }

    #[test]
    fn extended_precision_hermite_matches_double() {
        use crate::quad_double::QuadDouble;
        let b = make_basis(BasisFamily::<QuadDouble>::new(BasisKind::Ho, Sector::All)).unwrap();
        let w = Cx::new(QuadDouble::from_f64(0.8), QuadDouble::from_f64(-0.5));
        let p = ParamPoint::omega(w);
        let v = b.eval_with_second(7, &p, Cx::new(QuadDouble::from_f64(1.25), QuadDouble::from_f64(0.0))).0;
        let d = spec(BasisKind::Ho, Sector::All).eval_with_second(7, &ParamPoint::omega(c(0.8, -0.5)), c(1.25, 0.0)).0;
        assert!((v.to_c64() - d).norm() < 1e-14);
    }

    proptest! {
        #[test]
        fn even_sector_is_reflection_symmetric(x in -5.0f64..5.0, n in 0usize..10, wr in 0.3f64..2.0, wi in -2.0f64..0.0) {
            let b = spec(BasisKind::Ho, Sector::Even);
            let p = ParamPoint::omega(c(wr, wi));
            let a = eval_fn(&b, n, &p, x).unwrap();
            let m = eval_fn(&b, n, &p, -x).unwrap();
            prop_assert!((a - m).norm() <= 1e-12 * a.norm().max(1e-3));
        }

        #[test]
        fn holomorphic_in_parameters(x in 0.2f64..3.0, n in 0usize..6, re in 0.6f64..2.0, im in 0.1f64..1.0) {
            let h = 1e-5;
            let kinds: [(BasisSpec<f64>, ParamName); 4] = [
                (spec(BasisKind::Ho, Sector::All), ParamName::Omega),
                (make_basis(BasisFamily::radial_ho(-0.5)).unwrap(), ParamName::Omega),
                (spec(BasisKind::TrigOdd, Sector::Odd), ParamName::L),
                (spec(BasisKind::RadialTrig, Sector::Radial), ParamName::L),
            ];
            for (b, name) in kinds {
                let base = match name {
                    ParamName::L => c(re + 3.0, im),
                    _ => c(re, -im),
                };
                let at = |v: Complex64| {
                    let mut p = ParamPoint::default();
                    p.set(name, v);
                    b.eval_with_second(n, &p, c(x, 0.0)).0
                };
                let step_re = (at(base + h) - at(base - h)) / (2.0 * h);
                let step_im = (at(base + c(0.0, h)) - at(base - c(0.0, h))) / c(0.0, 2.0 * h);
                prop_assert!((step_re - step_im).norm() <= 1e-8 * step_re.norm().max(1.0));
            }
        }
    }
}
