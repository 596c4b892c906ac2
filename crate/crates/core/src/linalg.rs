//! Dense square matrices and the general complex eigenvalue solver.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::real::{cx, czero, Cx, Real};

/// Square matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Copy + Zero> Matrix<S> {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![S::zero(); n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Matrix { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn diagonal(&self) -> Vec<S> {
        (0..self.n).map(|i| self[(i, i)]).collect()
    }

    /// Leading `m × m` block.
    pub fn truncate(&self, m: usize) -> Self {
        Matrix::from_fn(m, |i, j| self[(i, j)])
    }

    /// Sub-matrix picking the given rows/columns.
    pub fn select(&self, idx: &[usize]) -> Self {
        Matrix::from_fn(idx.len(), |i, j| self[(idx[i], idx[j])])
    }

    pub fn map<U: Copy + Zero>(&self, f: impl Fn(S) -> U) -> Matrix<U> {
        Matrix {
            n: self.n,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.n + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.n + j]
    }
}

impl<T: Real> Matrix<T> {
    /// Product `self · band` where `band` is symmetric tridiagonal with
    /// zero diagonal and off-diagonal `off[k] = band[k][k+1]`.
    pub fn mul_offdiag_band(&self, off: &[T]) -> Matrix<T> {
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = T::zero();
                if j > 0 {
                    acc += self[(i, j - 1)] * off[j - 1];
                }
                if j + 1 < n {
                    acc += self[(i, j + 1)] * off[j];
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    /// Product `self · band` for a symmetric tridiagonal band with diagonal
    /// `diag` and off-diagonal `off`.
    pub fn mul_tridiag(&self, diag: &[T], off: &[T]) -> Matrix<T> {
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = self[(i, j)] * diag[j];
                if j > 0 {
                    acc += self[(i, j - 1)] * off[j - 1];
                }
                if j + 1 < n {
                    acc += self[(i, j + 1)] * off[j];
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    /// `(A + Aᵀ)/2`, exactly symmetric in floating point.
    pub fn symmetrized(&self) -> Matrix<T> {
        let half = T::from_f64(0.5);
        Matrix::from_fn(self.n, |i, j| (self[(i, j)] + self[(j, i)]) * half)
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, |i, j| if i == j { T::one() } else { T::zero() })
    }
}

impl<T: Real> Matrix<Cx<T>> {
    /// `self += scale · m` for a real matrix `m` of the same size.
    pub fn add_scaled_real(&mut self, scale: Cx<T>, m: &Matrix<T>) {
        assert_eq!(self.n, m.n);
        for (a, &b) in self.data.iter_mut().zip(&m.data) {
            *a = *a + scale * b;
        }
    }

    pub fn trace(&self) -> Cx<T> {
        (0..self.n).fold(czero(), |acc, i| acc + self[(i, i)])
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }
}

fn cabs1<T: Real>(z: Cx<T>) -> T {
    z.re.abs() + z.im.abs()
}

fn cnorm<T: Real>(z: Cx<T>) -> T {
    z.re.hypot(z.im)
}

/// Unitary reduction to upper Hessenberg form by Householder reflections.
fn hessenberg<T: Real>(a: &mut Matrix<Cx<T>>) {
    let n = a.dim();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let mut scale = T::zero();
        for i in k + 1..n {
            scale += cabs1(a[(i, k)]);
        }
        if scale == T::zero() {
            continue;
        }
        let mut v: Vec<Cx<T>> = (k + 1..n).map(|i| a[(i, k)].unscale(scale)).collect();
        let mut norm2 = T::zero();
        for z in &v {
            norm2 += z.norm_sqr();
        }
        let norm = norm2.sqrt();
        let x0 = v[0];
        let x0abs = cnorm(x0);
        let phase = if x0abs == T::zero() {
            cx(T::one(), T::zero())
        } else {
            x0.unscale(x0abs)
        };
        // v = x + phase·‖x‖·e1, reflector I − 2vv*/(v*v)
        v[0] = x0 + phase.scale(norm);
        let mut vnorm2 = T::zero();
        for z in &v {
            vnorm2 += z.norm_sqr();
        }
        if vnorm2 == T::zero() {
            continue;
        }
        let two_over = T::from_f64(2.0) / vnorm2;
        // left: A[k+1.., :] -= (2/v*v) v (v* A)
        for j in 0..n {
            let mut dot = czero::<T>();
            for (idx, i) in (k + 1..n).enumerate() {
                dot = dot + v[idx].conj() * a[(i, j)];
            }
            let f = dot.scale(two_over);
            for (idx, i) in (k + 1..n).enumerate() {
                a[(i, j)] = a[(i, j)] - v[idx] * f;
            }
        }
        // right: A[:, k+1..] -= (2/v*v) (A v) v*
        for i in 0..n {
            let mut dot = czero::<T>();
            for (idx, j) in (k + 1..n).enumerate() {
                dot = dot + a[(i, j)] * v[idx];
            }
            let f = dot.scale(two_over);
            for (idx, j) in (k + 1..n).enumerate() {
                a[(i, j)] = a[(i, j)] - f * v[idx].conj();
            }
        }
        for i in k + 2..n {
            a[(i, k)] = czero();
        }
    }
}

/// Complex Givens rotation `[[c, s], [-s̄, c]]` zeroing `b` in `(a, b)`.
fn givens<T: Real>(a: Cx<T>, b: Cx<T>) -> (T, Cx<T>) {
    let aa = cnorm(a);
    let bb = cnorm(b);
    if bb == T::zero() {
        return (T::one(), czero());
    }
    if aa == T::zero() {
        return (T::zero(), cx(T::one(), T::zero()));
    }
    let norm = aa.hypot(bb);
    let alpha = a.unscale(aa);
    (aa / norm, (alpha * b.conj()).unscale(norm))
}

/// Eigenvalues of an upper Hessenberg matrix by shifted QR with deflation.
fn hessenberg_qr<T: Real>(h: &mut Matrix<Cx<T>>) -> Result<Vec<Cx<T>>> {
    let n = h.dim();
    let mut eig = vec![czero::<T>(); n];
    if n == 0 {
        return Ok(eig);
    }
    let eps = T::epsilon();
    let mut norm = T::zero();
    for i in 0..n {
        for j in 0..n {
            norm = norm.max(cabs1(h[(i, j)]));
        }
    }
    let small = eps * norm.max(T::from_f64(f64::MIN_POSITIVE));

    let mut hi = n - 1;
    let mut iter = 0usize;
    let max_iter = 60;
    loop {
        if hi == 0 {
            eig[0] = h[(0, 0)];
            break;
        }
        let mut l = hi;
        while l > 0 {
            let s = cabs1(h[(l - 1, l - 1)]) + cabs1(h[(l, l)]);
            let sub = cabs1(h[(l, l - 1)]);
            if sub <= eps * s || sub <= small {
                h[(l, l - 1)] = czero();
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig[hi] = h[(hi, hi)];
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > max_iter {
            return Err(Error::QrNonConvergence { index: hi });
        }

        let a = h[(hi - 1, hi - 1)];
        let b = h[(hi - 1, hi)];
        let c = h[(hi, hi - 1)];
        let d = h[(hi, hi)];
        let mu = if iter.is_multiple_of(10) {
            // exceptional shift
            let extra = if hi >= 2 {
                cabs1(h[(hi - 1, hi - 2)])
            } else {
                T::zero()
            };
            d + cx(T::from_f64(0.75) * (cabs1(c) + extra), T::zero())
        } else {
            let half = T::from_f64(0.5);
            let p = (a - d).scale(half);
            let bc = b * c;
            let disc = use_csqrt(p * p + bc);
            let den1 = p + disc;
            let den2 = p - disc;
            let den = if cabs1(den1) >= cabs1(den2) { den1 } else { den2 };
            if cabs1(den) == T::zero() {
                d
            } else {
                d - bc / den
            }
        };

        for i in l..=hi {
            h[(i, i)] = h[(i, i)] - mu;
        }
        let mut rots = Vec::with_capacity(hi - l);
        for k in l..hi {
            let (cs, sn) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..=hi {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = x.scale(cs) + sn * y;
                h[(k + 1, j)] = y.scale(cs) - sn.conj() * x;
            }
            h[(k + 1, k)] = czero();
            rots.push((cs, sn));
        }
        for (off, &(cs, sn)) in rots.iter().enumerate() {
            let k = l + off;
            let top = (k + 2).min(hi);
            for i in l..=top {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x.scale(cs) + y * sn.conj();
                h[(i, k + 1)] = y.scale(cs) - x * sn;
            }
        }
        for i in l..=hi {
            h[(i, i)] = h[(i, i)] + mu;
        }
    }
    Ok(eig)
}

fn use_csqrt<T: Real>(z: Cx<T>) -> Cx<T> {
    crate::real::ComplexExt::csqrt(&z)
}

/// All eigenvalues of a general complex matrix, in no particular order.
pub fn eigenvalues_general<T: Real>(a: &Matrix<Cx<T>>) -> Result<Vec<Cx<T>>> {
    let mut h = a.clone();
    hessenberg(&mut h);
    hessenberg_qr(&mut h)
}

/// Eigenvector of `a` for the approximate eigenvalue `shift` by two steps of
/// inverse iteration, normalized to unit 2-norm. `None` if the shifted
/// matrix has an exactly zero column.
pub fn inverse_iteration(a: &Matrix<Complex64>, shift: Complex64) -> Option<Vec<Complex64>> {
    let n = a.dim();
    let mut lu = a.clone();
    let mut scale = 0.0f64;
    for i in 0..n {
        lu[(i, i)] -= shift;
        for j in 0..n {
            scale = scale.max(lu[(i, j)].l1_norm());
        }
    }
    // Exact singularity is the expected case; a tiny pivot stands in.
    let tiny = Complex64::new(scale * f64::EPSILON, 0.0);
    if tiny.re == 0.0 {
        return None;
    }
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let p = (k..n).max_by(|&x, &y| lu[(x, k)].l1_norm().total_cmp(&lu[(y, k)].l1_norm()))?;
        if p != k {
            perm.swap(p, k);
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(p, j)];
                lu[(p, j)] = t;
            }
        }
        if lu[(k, k)].l1_norm() == 0.0 {
            lu[(k, k)] = tiny;
        }
        let piv = lu[(k, k)];
        for i in k + 1..n {
            let f = lu[(i, k)] / piv;
            lu[(i, k)] = f;
            if f != Complex64::new(0.0, 0.0) {
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
    }
    // Fixed irregular start so no eigenvector is orthogonal to it by symmetry.
    let mut x: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(1.0, ((i * 7 + 3) % 11) as f64 / 11.0))
        .collect();
    for _ in 0..2 {
        let mut y: Vec<Complex64> = perm.iter().map(|&p| x[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = lu[(i, j)];
                let v = y[j];
                y[i] -= l * v;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let u = lu[(i, j)];
                let v = y[j];
                y[i] -= u * v;
            }
            y[i] /= lu[(i, i)];
        }
        let norm = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return None;
        }
        x = y.into_iter().map(|z| z / norm).collect();
    }
    Some(x)
}

/// Reduction of a complex symmetric matrix to symmetric tridiagonal form by
/// complex orthogonal reflectors `I − 2vvᵀ/(vᵀv)`.
///
/// The reflectors are not unitary, so rounding errors can be amplified;
/// `None` signals a near-isotropic `v` (`|vᵀv| ≪ ‖v‖²`) where that growth
/// would be unbounded.
pub fn tridiagonalize_symmetric<T: Real>(a: &Matrix<Cx<T>>) -> Option<(Vec<Cx<T>>, Vec<Cx<T>>)> {
    let n = a.dim();
    let mut a = a.clone();
    let guard = T::epsilon().sqrt();
    for k in 0..n.saturating_sub(2) {
        let mut v: Vec<Cx<T>> = (k + 1..n).map(|i| a[(i, k)]).collect();
        let mut tail = T::zero();
        for z in &v[1..] {
            tail += z.norm_sqr();
        }
        if tail == T::zero() {
            continue;
        }
        let xtx = v.iter().fold(czero::<T>(), |acc, &z| acc + z * z);
        let mut alpha = use_csqrt(xtx);
        if cabs1(v[0] + alpha) > cabs1(v[0] - alpha) {
            alpha = -alpha;
        }
        v[0] = v[0] - alpha;
        let vtv = v.iter().fold(czero::<T>(), |acc, &z| acc + z * z);
        let vnorm2 = v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr());
        if cnorm(vtv) <= guard * vnorm2 {
            return None;
        }
        let beta = cx(T::from_f64(2.0), T::zero()) / vtv;
        let m = n - k - 1;
        // p = β A v, w = p − (β vᵀp / 2) v, A ← A − v wᵀ − w vᵀ
        let mut p = vec![czero::<T>(); m];
        for (r, pr) in p.iter_mut().enumerate() {
            let row = &a.data[(k + 1 + r) * n + k + 1..(k + 1 + r) * n + n];
            let mut acc = czero::<T>();
            for (x, y) in row.iter().zip(&v) {
                acc = acc + *x * *y;
            }
            *pr = beta * acc;
        }
        let vtp = v.iter().zip(&p).fold(czero::<T>(), |acc, (x, y)| acc + *x * *y);
        let kk = beta * vtp.scale(T::from_f64(0.5));
        let w: Vec<Cx<T>> = p.iter().zip(&v).map(|(&pi, &vi)| pi - kk * vi).collect();
        for r in 0..m {
            let (vr, wr) = (v[r], w[r]);
            let row = &mut a.data[(k + 1 + r) * n + k + 1..(k + 1 + r) * n + n];
            for (c, x) in row.iter_mut().enumerate() {
                *x = *x - vr * w[c] - wr * v[c];
            }
        }
        a[(k + 1, k)] = alpha;
        a[(k, k + 1)] = alpha;
        for i in k + 2..n {
            a[(i, k)] = czero();
            a[(k, i)] = czero();
        }
    }
    let d = (0..n).map(|i| a[(i, i)]).collect();
    let e = (0..n.saturating_sub(1)).map(|i| a[(i + 1, i)]).collect();
    Some((d, e))
}

/// All eigenvalues of a complex symmetric matrix through
/// [`tridiagonalize_symmetric`] and implicit QL, falling back to
/// [`eigenvalues_general`] on breakdown.
pub fn eigenvalues_complex_symmetric<T: Real>(a: &Matrix<Cx<T>>) -> Result<Vec<Cx<T>>> {
    if let Some((d, e)) = tridiagonalize_symmetric(a) {
        if let Ok(ev) = tridiagonal_symmetric_eigenvalues(&d, &e) {
            return Ok(ev);
        }
    }
    eigenvalues_general(a)
}

/// Roots of `Σ coeffs[k] z^k` via the eigenvalues of the companion matrix.
///
/// Trailing (highest-order) zero coefficients are dropped; leading zero
/// roots are reported explicitly.
pub fn poly_roots<T: Real>(coeffs: &[Cx<T>]) -> Result<Vec<Cx<T>>> {
    let mut deg = coeffs.len();
    while deg > 0 && coeffs[deg - 1] == czero() {
        deg -= 1;
    }
    if deg <= 1 {
        return Ok(Vec::new());
    }
    let n = deg - 1;
    let lead = coeffs[n];
    let mut zeros = 0;
    while zeros < n && coeffs[zeros] == czero() {
        zeros += 1;
    }
    let m = n - zeros;
    let mut roots = vec![czero::<T>(); zeros];
    if m == 0 {
        return Ok(roots);
    }
    // companion in upper Hessenberg form for the deflated polynomial
    let c = &coeffs[zeros..=n];
    let mut comp = Matrix::zeros(m);
    for j in 0..m {
        comp[(0, j)] = -(c[m - 1 - j] / lead);
    }
    for i in 1..m {
        comp[(i, i - 1)] = cx(T::one(), T::zero());
    }
    roots.extend(hessenberg_qr(&mut comp)?);
    Ok(roots)
}

/// Eigenvalues of the complex symmetric tridiagonal matrix with diagonal
/// `d` and off-diagonal `e` (`e[k]` couples `k` and `k+1`).
///
/// Implicit QL with Wilkinson shifts and complex orthogonal rotations
/// (`c² + s² = 1`, no conjugation), so the work is `O(n²)`. Such rotations
/// can break down when `f² + g² = 0`; this is reported as non-convergence.
pub fn tridiagonal_symmetric_eigenvalues<T: Real>(d: &[Cx<T>], e: &[Cx<T>]) -> Result<Vec<Cx<T>>> {
    let n = d.len();
    let mut d = d.to_vec();
    let mut e: Vec<Cx<T>> = e.iter().copied().chain(std::iter::repeat(czero())).take(n).collect();
    let eps = T::epsilon();
    let one = cx(T::one(), T::zero());
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = cabs1(d[m]) + cabs1(d[m + 1]);
                if cabs1(e[m]) <= eps * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::QrNonConvergence { index: l });
            }
            let mut g = (d[l + 1] - d[l]) / (e[l].scale(T::from_f64(2.0)));
            let mut r = use_csqrt(g * g + one);
            // pick the root maximizing |g ± r|
            let denom = if cabs1(g + r) >= cabs1(g - r) { g + r } else { g - r };
            g = d[m] - d[l] + e[l] / denom;
            let (mut s, mut c) = (one, one);
            let mut p = czero::<T>();
            let mut broke = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = use_csqrt(f * f + g * g);
                e[i + 1] = r;
                if cabs1(r) == T::zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[m] = czero();
                    broke = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + c * b.scale(T::from_f64(2.0));
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if broke {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = czero();
        }
    }
    Ok(d)
}
