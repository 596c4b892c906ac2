//! Rayleigh-Ritz matrices `H_jm = (φ_j | Ĥ φ_m)` under the c-product and
//! the trace of the truncated matrix as an analytic function of the
//! nonlinear parameters.
//!
//! Oscillator bases (`ho`, `shifted_ho`, `radial_ho`) work in units where
//! the parameter dependence factors out: with `K̃`, `Q̃` and `R̃` the
//! kinetic, position and `r²` matrices at `Ω = 1`,
//!
//! ```text
//! H = Ω K̃ + Σ_p c_p (Ω^{-1/2} Q̃ + t)^p       (1D)
//! H = Ω K̃ + Σ_k c_{2k} Ω^{-k} R̃^k             (radial)
//! ```
//!
//! Powers are formed in an enlarged dimension so the retained block is exact.
//!
//! Trig bases substitute `x = L u`; every potential element then reduces
//! to cosine moments `m(n) = ∫ cos(nπu) V(Lu) du` over `[-1, 1]` (full
//! line) or `[0, 1]` (radial), which are elementary for monomials and
//! exponentials and spectrally convergent Gauss-Legendre sums for Gaussians.

use crate::basis::{BasisKind, BasisSpec, ParamName, ParamPoint, Sector};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::potentials::{Domain, PotentialSpec, PotentialTerm, Symmetry, TermKind};
use crate::quadrature::GaussLegendre;
use crate::real::{creal, cx, czero, ComplexExt, Cx, Real};

/// Rayleigh-Ritz matrix at a parameter point.
#[derive(Clone, Debug)]
pub struct RRMatrix<T> {
    pub entries: Matrix<Cx<T>>,
    pub params: ParamPoint<T>,
    pub sector: Sector,
}

impl<T: Real> RRMatrix<T> {
    pub fn dim(&self) -> usize {
        self.entries.dim()
    }
}

/// Trace of the `M × M` matrix as a function of the parameters.
#[derive(Clone, Debug)]
pub enum TraceFunction<T> {
    /// `Σ c · Ω^a · t^b`.
    Polynomial(PolyTrace<T>),
    /// Evaluator in the box width `L`.
    Box(BoxTrace<T>),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceTerm<T> {
    pub coefficient: Cx<T>,
    pub omega_power: i32,
    pub t_power: u32,
}

#[derive(Clone, Debug)]
pub struct PolyTrace<T> {
    pub terms: Vec<TraceTerm<T>>,
    pub shifted: bool,
    pub dim: usize,
    pub sector: Sector,
}

#[derive(Clone, Debug)]
pub struct BoxTrace<T> {
    basis: BasisSpec<T>,
    terms: Vec<PotentialTerm<T>>,
    rule: GaussLegendre<T>,
    dim: usize,
    scale: f64,
}

impl<T: Real> BoxTrace<T> {
    /// Natural length of the potential, used to seed root searches.
    pub fn scale(&self) -> f64 {
        self.scale
    }
}

impl<T: Real> TraceFunction<T> {
    pub fn dim(&self) -> usize {
        match self {
            TraceFunction::Polynomial(p) => p.dim,
            TraceFunction::Box(b) => b.dim,
        }
    }

    pub fn params(&self) -> &'static [ParamName] {
        match self {
            TraceFunction::Polynomial(p) if p.shifted => &[ParamName::Omega, ParamName::T],
            TraceFunction::Polynomial(_) => &[ParamName::Omega],
            TraceFunction::Box(_) => &[ParamName::L],
        }
    }

    pub fn eval(&self, p: &ParamPoint<T>) -> Cx<T> {
        self.derivatives(p, 0).0
    }

    /// Value, gradient and Hessian over the active parameters, up to `order`.
    pub fn derivatives(&self, p: &ParamPoint<T>, order: u8) -> (Cx<T>, Vec<Cx<T>>, Vec<Vec<Cx<T>>>) {
        match self {
            TraceFunction::Polynomial(poly) => poly.derivatives(p),
            TraceFunction::Box(b) => {
                let l = p.l.expect("box trace needs L");
                let (v, d1, d2) = b.eval_l(l, order);
                (v, vec![d1], vec![vec![d2]])
            }
        }
    }
}

impl<T: Real> PolyTrace<T> {
    fn derivatives(&self, p: &ParamPoint<T>) -> (Cx<T>, Vec<Cx<T>>, Vec<Vec<Cx<T>>>) {
        let w = p.omega.expect("oscillator trace needs Ω");
        let t = if self.shifted { p.t.expect("shifted trace needs t") } else { czero() };
        let n = if self.shifted { 2 } else { 1 };
        let mut val = czero();
        let mut grad = vec![czero(); n];
        let mut hess = vec![vec![czero(); n]; n];
        for term in &self.terms {
            let a = term.omega_power;
            let b = term.t_power as i32;
            let c = term.coefficient;
            let wp = |k: i32| w.cpowi(k);
            let tp = |k: i32| if k < 0 { czero() } else { t.cpowi(k) };
            let af = T::from_i64(i64::from(a));
            let bf = T::from_i64(i64::from(b));
            val = val + c * wp(a) * tp(b);
            grad[0] = grad[0] + c.scale(af) * wp(a - 1) * tp(b);
            hess[0][0] = hess[0][0] + c.scale(af * (af - T::one())) * wp(a - 2) * tp(b);
            if self.shifted {
                grad[1] = grad[1] + c.scale(bf) * wp(a) * tp(b - 1);
                let cross = c.scale(af * bf) * wp(a - 1) * tp(b - 1);
                hess[0][1] = hess[0][1] + cross;
                hess[1][0] = hess[1][0] + cross;
                hess[1][1] = hess[1][1] + c.scale(bf * (bf - T::one())) * wp(a) * tp(b - 2);
            }
        }
        (val, grad, hess)
    }

    /// Coefficients (low to high) of `Ω^s · dT/dΩ`, with `s` chosen so that
    /// every power is non-negative. Only valid without shift.
    pub fn stationarity_polynomial(&self) -> Vec<Cx<T>> {
        assert!(!self.shifted, "shifted traces are two-dimensional");
        let lowest = self.terms.iter().map(|t| t.omega_power - 1).min().unwrap_or(0).min(0);
        let highest = self.terms.iter().map(|t| t.omega_power - 1).max().unwrap_or(0);
        let mut coeffs = vec![czero(); (highest - lowest + 1).max(1) as usize];
        for term in &self.terms {
            if term.omega_power != 0 {
                let k = (term.omega_power - 1 - lowest) as usize;
                coeffs[k] = coeffs[k] + term.coefficient.scale(T::from_i64(i64::from(term.omega_power)));
            }
        }
        coeffs
    }
}

impl<T: Real> BoxTrace<T> {
    /// `(T, dT/dL, d²T/dL²)`.
    fn eval_l(&self, l: Cx<T>, order: u8) -> (Cx<T>, Cx<T>, Cx<T>) {
        let m = self.dim;
        let radial = self.basis.kind() == BasisKind::RadialTrig;
        let ks: T = (0..m).fold(T::zero(), |acc, n| {
            let k = self.basis.trig_wavenumber(n);
            acc + k * k
        });
        let kin = creal::<T>(ks * T::pi() * T::pi() * T::from_f64(0.5));
        let l2 = l * l;
        let mut val = kin / l2;
        let mut d1 = -(kin.scale(T::from_f64(2.0))) / (l2 * l);
        let mut d2 = kin.scale(T::from_f64(6.0)) / (l2 * l2);
        let mut add = |n: usize, sign: T| {
            for term in &self.terms {
                let (a, b, c) = moment(term, n, l, radial, &self.rule, order);
                val = val + a.scale(sign);
                d1 = d1 + b.scale(sign);
                d2 = d2 + c.scale(sign);
            }
        };
        let half = T::from_f64(0.5);
        match self.basis.kind() {
            BasisKind::TrigEven => {
                add(0, T::from_usize(m) * half);
                for n in 0..m {
                    add(2 * n + 1, half);
                }
            }
            BasisKind::TrigOdd => {
                add(0, T::from_usize(m) * half);
                for n in 0..m {
                    add(2 * n + 2, -half);
                }
            }
            _ => {
                add(0, T::from_usize(m));
                for n in 0..m {
                    add(2 * n + 2, -T::one());
                }
            }
        }
        (val, d1, d2)
    }
}

/// Builds the `M × M` matrix at `params`.
pub fn build_matrix<T: Real>(
    basis: &BasisSpec<T>,
    potential: &PotentialSpec<T>,
    params: &ParamPoint<T>,
    m: usize,
) -> Result<RRMatrix<T>> {
    if m == 0 {
        return Err(Error::InvalidArgument("matrix dimension must be positive".into()));
    }
    basis.check_params(params)?;
    check_pair(basis, potential)?;
    let entries = match basis.kind() {
        BasisKind::Ho | BasisKind::ShiftedHo => oscillator_matrix(basis, potential, params, m),
        BasisKind::RadialHo => radial_oscillator_matrix(basis, potential, params, m),
        _ => box_matrix(basis, potential, params.l.expect("checked"), m),
    };
    Ok(RRMatrix {
        entries,
        params: *params,
        sector: basis.sector(),
    })
}

/// Trace of the `M × M` matrix as an analytic function of the parameters.
pub fn trace_fn<T: Real>(basis: &BasisSpec<T>, potential: &PotentialSpec<T>, m: usize) -> Result<TraceFunction<T>> {
    if m == 0 {
        return Err(Error::InvalidArgument("matrix dimension must be positive".into()));
    }
    check_pair(basis, potential)?;
    let mut terms = Vec::new();
    let mut push = |coefficient: Cx<T>, omega_power: i32, t_power: u32| {
        if coefficient != czero() {
            terms.push(TraceTerm {
                coefficient,
                omega_power,
                t_power,
            });
        }
    };
    match basis.kind() {
        BasisKind::Ho | BasisKind::ShiftedHo => {
            let ops = Oscillator1D::new(basis, potential, m);
            push(creal(sum_diag(&ops.kinetic)), 1, 0);
            for (p, c) in monomials(potential) {
                for k in (0..=p).step_by(2) {
                    if basis.kind() == BasisKind::Ho && k != p {
                        continue;
                    }
                    let tr = sum_diag(&ops.powers[k as usize]);
                    push(c.scale(binomial::<T>(p, k) * tr), -(k as i32) / 2, p - k);
                }
            }
            Ok(TraceFunction::Polynomial(PolyTrace {
                terms,
                shifted: basis.kind() == BasisKind::ShiftedHo,
                dim: m,
                sector: basis.sector(),
            }))
        }
        BasisKind::RadialHo => {
            let ops = OscillatorRadial::new(basis, potential, m);
            push(creal(sum_diag(&ops.kinetic)), 1, 0);
            for (p, c) in monomials(potential) {
                let k = p / 2;
                push(c.scale(sum_diag(&ops.powers[k as usize])), -(k as i32), 0);
            }
            Ok(TraceFunction::Polynomial(PolyTrace {
                terms,
                shifted: false,
                dim: m,
                sector: Sector::Radial,
            }))
        }
        _ => Ok(TraceFunction::Box(BoxTrace {
            basis: *basis,
            terms: box_terms(potential),
            rule: gaussian_rule(potential, m),
            dim: m,
            scale: potential.characteristic_length(),
        })),
    }
}

/// Gradient of the trace over the active parameters.
pub fn trace_gradient<T: Real>(tf: &TraceFunction<T>, params: &ParamPoint<T>) -> Vec<Cx<T>> {
    tf.derivatives(params, 1).1
}

/// Hessian of the trace over the active parameters.
pub fn trace_hessian<T: Real>(tf: &TraceFunction<T>, params: &ParamPoint<T>) -> Vec<Vec<Cx<T>>> {
    tf.derivatives(params, 2).2
}

fn unsupported<T: Real>(basis: &BasisSpec<T>, term: &PotentialTerm<T>) -> Error {
    Error::UnsupportedPair {
        basis: basis.kind().name().into(),
        term: term.to_string(),
    }
}

fn check_pair<T: Real>(basis: &BasisSpec<T>, potential: &PotentialSpec<T>) -> Result<()> {
    let kind = basis.kind();
    let want = if kind.is_radial() { Domain::HalfLine } else { Domain::FullLine };
    if potential.domain() != want {
        return Err(Error::IncompatibleSector {
            family: kind.name().into(),
            sector: format!("{:?} potential", potential.domain()),
        });
    }
    if matches!(basis.sector(), Sector::Even | Sector::Odd) && potential.symmetry() != Symmetry::Even {
        return Err(Error::IncompatibleSector {
            family: kind.name().into(),
            sector: format!("{} sector of a potential without reflection symmetry", basis.sector()),
        });
    }
    let lam = basis.family.lambda;
    let barrier = lam * (lam + T::one()) * T::from_f64(0.5);
    let mut centrifugal = T::zero();
    for term in potential.terms() {
        let ok = match (term.kind, kind) {
            (TermKind::Monomial { .. }, BasisKind::Ho | BasisKind::ShiftedHo) => true,
            (TermKind::Monomial { power }, BasisKind::RadialHo) => power % 2 == 0,
            (TermKind::Centrifugal, BasisKind::RadialHo) => {
                centrifugal += term.coefficient.re;
                term.coefficient.im == T::zero()
            }
            (TermKind::Monomial { .. } | TermKind::Gaussian { .. }, _) if !kind.is_oscillator() => true,
            (TermKind::ExpPoly { .. }, BasisKind::RadialTrig) => true,
            _ => false,
        };
        if !ok {
            return Err(unsupported(basis, term));
        }
    }
    if kind == BasisKind::RadialHo && (centrifugal - barrier).abs() > T::epsilon() * T::from_f64(16.0) {
        return Err(Error::UnsupportedPair {
            basis: format!("radial_ho with Λ = {}", lam),
            term: format!("centrifugal strength {} (basis carries Λ(Λ+1)/2 = {})", centrifugal, barrier),
        });
    }
    Ok(())
}

/// `(power, coefficient)` of each monomial term, merged by power.
fn monomials<T: Real>(potential: &PotentialSpec<T>) -> Vec<(u32, Cx<T>)> {
    let mut out: Vec<(u32, Cx<T>)> = Vec::new();
    for term in potential.terms() {
        if let TermKind::Monomial { power } = term.kind {
            match out.iter_mut().find(|(p, _)| *p == power) {
                Some(entry) => entry.1 = entry.1 + term.coefficient,
                None => out.push((power, term.coefficient)),
            }
        }
    }
    out.sort_by_key(|(p, _)| *p);
    out
}

fn binomial<T: Real>(n: u32, k: u32) -> T {
    let mut acc = T::one();
    for i in 0..k {
        acc = acc * T::from_usize((n - i) as usize) / T::from_usize((i + 1) as usize);
    }
    acc
}

fn sum_diag<T: Real>(m: &Matrix<T>) -> T {
    (0..m.dim()).fold(T::zero(), |acc, i| acc + m[(i, i)])
}

/// Real operator matrices of a one-dimensional oscillator basis at `Ω = 1`.
struct Oscillator1D<T> {
    kinetic: Matrix<T>,
    /// `powers[k]` is `Q̃^k` restricted to the sector.
    powers: Vec<Matrix<T>>,
}

impl<T: Real> Oscillator1D<T> {
    fn new(basis: &BasisSpec<T>, potential: &PotentialSpec<T>, m: usize) -> Self {
        let idx = basis.indices(m);
        let pmax = potential.max_monomial_power() as usize;
        let big = idx[m - 1] + 1 + pmax;
        let off: Vec<T> = (0..big).map(|j| T::from_usize(j + 1).sqrt() * T::from_f64(0.5).sqrt()).collect();
        let mut cur = Matrix::<T>::identity(big);
        let mut powers = vec![cur.select(&idx)];
        for _ in 0..pmax {
            cur = cur.mul_offdiag_band(&off);
            powers.push(cur.select(&idx).symmetrized());
        }
        let quarter = T::from_f64(0.25);
        let kinetic = Matrix::from_fn(m, |a, b| {
            let (i, j) = (idx[a], idx[b]);
            if i == j {
                T::from_usize(2 * i + 1) * quarter
            } else if i + 2 == j || j + 2 == i {
                let lo = i.min(j);
                -(T::from_usize((lo + 1) * (lo + 2))).sqrt() * quarter
            } else {
                T::zero()
            }
        });
        Oscillator1D { kinetic, powers }
    }
}

/// Real operator matrices of the radial oscillator basis at `Ω = 1`.
struct OscillatorRadial<T> {
    kinetic: Matrix<T>,
    /// `powers[k]` is `R̃^k`, the matrix of `r^{2k}`.
    powers: Vec<Matrix<T>>,
}

impl<T: Real> OscillatorRadial<T> {
    fn new(basis: &BasisSpec<T>, potential: &PotentialSpec<T>, m: usize) -> Self {
        let lam = basis.family.lambda;
        let kmax = (potential.max_monomial_power() / 2) as usize;
        let big = m + kmax;
        let diag: Vec<T> = (0..big).map(|j| T::from_usize(2 * j) + lam + T::from_f64(1.5)).collect();
        // off[j] couples j and j+1
        let off: Vec<T> = (0..big)
            .map(|j| -(T::from_usize(j + 1) * (T::from_usize(j + 1) + lam + T::from_f64(0.5))).sqrt())
            .collect();
        let idx: Vec<usize> = (0..m).collect();
        let mut cur = Matrix::<T>::identity(big);
        let mut powers = vec![cur.select(&idx)];
        for _ in 0..kmax {
            cur = cur.mul_tridiag(&diag, &off);
            powers.push(cur.select(&idx).symmetrized());
        }
        let half = T::from_f64(0.5);
        let kinetic = Matrix::from_fn(m, |i, j| {
            if i == j {
                diag[i] * half
            } else if i + 1 == j || j + 1 == i {
                -off[i.min(j)] * half
            } else {
                T::zero()
            }
        });
        OscillatorRadial { kinetic, powers }
    }
}

fn oscillator_matrix<T: Real>(
    basis: &BasisSpec<T>,
    potential: &PotentialSpec<T>,
    params: &ParamPoint<T>,
    m: usize,
) -> Matrix<Cx<T>> {
    let ops = Oscillator1D::new(basis, potential, m);
    let w = params.omega.expect("checked");
    let t = params.t.unwrap_or_else(czero);
    let s = w.csqrt().inv();
    let mut h = Matrix::zeros(m);
    h.add_scaled_real(w, &ops.kinetic);
    for (p, c) in monomials(potential) {
        for k in 0..=p {
            if t == czero() && k != p {
                continue;
            }
            let scale = c.scale(binomial::<T>(p, k)) * t.cpowi((p - k) as i32) * s.cpowi(k as i32);
            h.add_scaled_real(scale, &ops.powers[k as usize]);
        }
    }
    h
}

fn radial_oscillator_matrix<T: Real>(
    basis: &BasisSpec<T>,
    potential: &PotentialSpec<T>,
    params: &ParamPoint<T>,
    m: usize,
) -> Matrix<Cx<T>> {
    let ops = OscillatorRadial::new(basis, potential, m);
    let w = params.omega.expect("checked");
    let mut h = Matrix::zeros(m);
    h.add_scaled_real(w, &ops.kinetic);
    for (p, c) in monomials(potential) {
        let k = (p / 2) as i32;
        h.add_scaled_real(c * w.cpowi(-k), &ops.powers[k as usize]);
    }
    h
}

fn box_terms<T: Real>(potential: &PotentialSpec<T>) -> Vec<PotentialTerm<T>> {
    potential.terms().to_vec()
}

fn gaussian_rule<T: Real>(potential: &PotentialSpec<T>, m: usize) -> GaussLegendre<T> {
    let needs = potential.terms().iter().any(|t| matches!(t.kind, TermKind::Gaussian { .. }));
    GaussLegendre::new(if needs { 4 * (m + 8) } else { 1 })
}

fn box_matrix<T: Real>(basis: &BasisSpec<T>, potential: &PotentialSpec<T>, l: Cx<T>, m: usize) -> Matrix<Cx<T>> {
    let radial = basis.kind() == BasisKind::RadialTrig;
    let rule = gaussian_rule(potential, m);
    let moments: Vec<Cx<T>> = (0..=2 * m + 2)
        .map(|n| {
            potential
                .terms()
                .iter()
                .fold(czero(), |acc, term| acc + moment(term, n, l, radial, &rule, 0).0)
        })
        .collect();
    let half = T::from_f64(0.5);
    let pi2 = T::pi() * T::pi();
    Matrix::from_fn(m, |j, k| {
        let diff = moments[j.abs_diff(k)];
        let v = match basis.kind() {
            BasisKind::TrigEven => (diff + moments[j + k + 1]).scale(half),
            BasisKind::TrigOdd => (diff - moments[j + k + 2]).scale(half),
            _ => diff - moments[j + k + 2],
        };
        if j == k {
            let kj = basis.trig_wavenumber(j);
            v + creal::<T>(kj * kj * pi2 * half) / (l * l)
        } else {
            v
        }
    })
}

/// Cosine moment of one term and its first two `L` derivatives.
///
/// Full line: `∫_{-1}^{1} cos(nπu) V(Lu) du`; radial: `∫_0^1`.
fn moment<T: Real>(
    term: &PotentialTerm<T>,
    n: usize,
    l: Cx<T>,
    radial: bool,
    rule: &GaussLegendre<T>,
    order: u8,
) -> (Cx<T>, Cx<T>, Cx<T>) {
    let c = term.coefficient;
    match term.kind {
        TermKind::Monomial { power } => {
            let p = power as i32;
            let base = if radial {
                monomial_cosine_moment::<T>(power, n)
            } else if power % 2 == 0 {
                monomial_cosine_moment::<T>(power, n) * T::from_f64(2.0)
            } else {
                return (czero(), czero(), czero());
            };
            let cb = c.scale(base);
            let pf = T::from_i64(i64::from(p));
            let d1 = if order >= 1 && p >= 1 { cb.scale(pf) * l.cpowi(p - 1) } else { czero() };
            let d2 = if order >= 2 && p >= 2 {
                cb.scale(pf * (pf - T::one())) * l.cpowi(p - 2)
            } else {
                czero()
            };
            (cb * l.cpowi(p), d1, d2)
        }
        TermKind::Gaussian { decay } => {
            let beta = creal::<T>(decay);
            let bl2 = beta * l * l;
            let omega = T::from_usize(n) * T::pi();
            let (mut v, mut d1, mut d2) = (czero(), czero(), czero());
            for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
                let u2 = u * u;
                let g = (-bl2.scale(u2)).cexp().scale(w * (omega * u).cos());
                v = v + g;
                if order >= 1 {
                    d1 = d1 - (beta * l).scale(T::from_f64(2.0) * u2) * g;
                }
                if order >= 2 {
                    let two_b_u2 = beta.scale(T::from_f64(2.0) * u2);
                    d2 = d2 + (two_b_u2 * two_b_u2 * l * l - two_b_u2) * g;
                }
            }
            let f = if radial { c.scale(T::from_f64(0.5)) } else { c };
            (f * v, f * d1, f * d2)
        }
        TermKind::ExpPoly { power, decay } => {
            debug_assert!(radial, "exp_poly terms are half-line only");
            let a = creal::<T>(decay);
            let w = cx(T::zero(), T::from_usize(n) * T::pi());
            let s_minus = a * l - w;
            let s_plus = a * l + w;
            let half = T::from_f64(0.5);
            let e = |q: u32| (exp_moment(q, s_minus) + exp_moment(q, s_plus)).scale(half);
            let p = power as i32;
            let pf = T::from_i64(i64::from(p));
            let g0 = e(power);
            let lp = |k: i32| if k < 0 { czero() } else { l.cpowi(k) };
            let val = c * lp(p) * g0;
            if order == 0 {
                return (val, czero(), czero());
            }
            let g1 = -(a * e(power + 1));
            let d1 = c * (lp(p - 1).scale(pf) * g0 + lp(p) * g1);
            if order == 1 {
                return (val, d1, czero());
            }
            let g2 = a * a * e(power + 2);
            let d2 = c
                * (lp(p - 2).scale(pf * (pf - T::one())) * g0
                    + lp(p - 1).scale(pf + pf) * g1
                    + lp(p) * g2);
            (val, d1, d2)
        }
        TermKind::Centrifugal => unreachable!("rejected by check_pair"),
    }
}

/// `∫_0^1 u^p cos(nπu) du`, using `sin(nπ) = 0` and `cos(nπ) = (−1)^n` exactly.
pub(crate) fn monomial_cosine_moment<T: Real>(p: u32, n: usize) -> T {
    if n == 0 {
        return T::one() / T::from_usize(p as usize + 1);
    }
    let omega = T::from_usize(n) * T::pi();
    let sign = if n.is_multiple_of(2) { T::one() } else { -T::one() };
    // i = ∫ u^k cos, j = ∫ u^k sin
    let mut i = T::zero();
    let mut j = (T::one() - sign) / omega;
    for k in 1..=p {
        let kf = T::from_usize(k as usize);
        let i_next = -(kf / omega) * j;
        let j_next = -sign / omega + (kf / omega) * i;
        i = i_next;
        j = j_next;
    }
    i
}

/// `E_p(s) = ∫_0^1 u^p e^{−su} du`.
pub(crate) fn exp_moment<T: Real>(p: u32, s: Cx<T>) -> Cx<T> {
    let r = s.cabs();
    if r <= T::from_f64(2.0) {
        // Σ (−s)^n / (n! (n+p+1))
        let mut term = creal::<T>(T::one());
        let mut acc = czero();
        let tol = T::epsilon() * T::from_f64(0.25);
        for n in 0..200 {
            let contrib = term / T::from_usize(n + p as usize + 1);
            acc = acc + contrib;
            if contrib.cabs() <= tol * acc.cabs() {
                break;
            }
            term = -(term * s) / T::from_usize(n + 1);
        }
        acc
    } else {
        let e = (-s).cexp();
        let mut acc = (creal::<T>(T::one()) - e) / s;
        for k in 1..=p {
            acc = (acc.scale(T::from_usize(k as usize)) - e) / s;
        }
        acc
    }
}
