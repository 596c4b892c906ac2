//! Eigenvalues of the Rayleigh-Ritz matrix and their stabilization across
//! a ladder of dimensions.

use crate::basis::ParamPoint;
use crate::error::Result;
use num_complex::Complex64;

use crate::linalg::{eigenvalues_complex_symmetric, eigenvalues_general, inverse_iteration, Matrix};
use crate::matelem::RRMatrix;
use crate::quad_double::QuadDouble;
use crate::real::{ComplexExt, Cx, Real};

/// Default drift below which an eigenvalue counts as converged.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Default pairing window of [`match_ladder`].
pub const DEFAULT_WINDOW: f64 = 0.5;

/// All eigenvalues at one rung, sorted by real part.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenSet<T> {
    pub m: usize,
    pub params: ParamPoint<T>,
    pub eigenvalues: Vec<Cx<T>>,
}

/// Double precision takes the unitary Hessenberg QR path and then
/// [`refine_eigenvalues`]. Extended types use the cheaper complex orthogonal
/// tridiagonal reduction: their surplus digits absorb its rounding growth.
pub fn eigenvalues<T: Real>(matrix: &RRMatrix<T>) -> Result<EigenSet<T>> {
    let extended = T::epsilon().to_f64() < 1e-30;
    let mut ev = if extended {
        eigenvalues_complex_symmetric(&matrix.entries)?
    } else {
        let a = matrix.entries.map(|z| z.to_c64());
        let mut ev: Vec<Complex64> = eigenvalues_general(&matrix.entries)?.iter().map(|z| z.to_c64()).collect();
        refine_eigenvalues(&a, &mut ev);
        ev.into_iter().map(Cx::<T>::from_c64).collect()
    };
    ev.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(b.im.partial_cmp(&a.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    Ok(EigenSet {
        m: matrix.dim(),
        params: matrix.params,
        eigenvalues: ev,
    })
}

/// Replaces each eigenvalue by the complex symmetric Rayleigh quotient
/// `xᵀAx / xᵀx` of its inverse-iteration eigenvector, summed in quad-double.
///
/// QR leaves an absolute error of order `ε‖A‖`, which swamps widths far
/// below the energy scale. The quotient is stationary in `x`, so with exact
/// accumulation only the rounding of `A`'s entries remains. A step is
/// rejected if it exceeds a quarter of the distance to the nearest other
/// eigenvalue (the vector may belong to a neighbour) or `√ε‖A‖_F`, or is
/// below one ulp of `|λ|`; quasi-null vectors with `|xᵀx| < 1e-6` are
/// skipped.
pub fn refine_eigenvalues(a: &Matrix<Complex64>, ev: &mut [Complex64]) {
    let n = a.dim();
    let frob = (0..n).flat_map(|i| a.row(i).iter()).map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let cap = f64::EPSILON.sqrt() * frob;
    let q = |z: Complex64| Cx::<QuadDouble>::from_c64(z);
    let aq: Matrix<Cx<QuadDouble>> = a.map(q);
    let qr = ev.to_vec();
    for (k, lambda) in ev.iter_mut().enumerate() {
        let gap = qr
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != k)
            .map(|(_, z)| (z - qr[k]).norm())
            .fold(f64::INFINITY, f64::min);
        let bound = cap.min(0.25 * gap);
        let Some(x) = inverse_iteration(a, *lambda) else {
            continue;
        };
        let xq: Vec<Cx<QuadDouble>> = x.iter().map(|z| q(*z)).collect();
        let mut num = Cx::<QuadDouble>::from_c64(Complex64::new(0.0, 0.0));
        let mut den = num;
        for i in 0..n {
            let row = aq.row(i);
            let mut s = Cx::<QuadDouble>::from_c64(Complex64::new(0.0, 0.0));
            for j in 0..n {
                s = s + row[j] * xq[j];
            }
            num = num + xq[i] * s;
            den = den + xq[i] * xq[i];
        }
        if den.cabs().to_f64() < 1e-6 {
            continue;
        }
        let r = (num / den).to_c64();
        let step = (r - *lambda).norm();
        if r.is_finite() && step <= bound && step > f64::EPSILON * lambda.norm() {
            *lambda = r;
        }
    }
}

/// Pairing between two rungs: `(prev index, curr index)` pairs plus the
/// current eigenvalues left unpaired.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Pairing {
    pub pairs: Vec<(usize, usize)>,
    pub unpaired: Vec<usize>,
}

/// Greedy nearest-neighbour pairing: globally closest pairs first, each
/// eigenvalue used once, distances of `window` or more never paired.
pub fn match_ladder<T: Real>(prev: &EigenSet<T>, curr: &EigenSet<T>, window: f64) -> Pairing {
    let mut cand: Vec<(f64, usize, usize)> = Vec::new();
    for (i, a) in prev.eigenvalues.iter().enumerate() {
        for (j, b) in curr.eigenvalues.iter().enumerate() {
            let d = (*a - *b).cabs().to_f64();
            if d < window {
                cand.push((d, i, j));
            }
        }
    }
    cand.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut used_prev = vec![false; prev.eigenvalues.len()];
    let mut used_curr = vec![false; curr.eigenvalues.len()];
    let mut pairs = Vec::new();
    for (_, i, j) in cand {
        if !used_prev[i] && !used_curr[j] {
            used_prev[i] = true;
            used_curr[j] = true;
            pairs.push((i, j));
        }
    }
    pairs.sort_by_key(|p| p.1);
    let unpaired = (0..curr.eigenvalues.len()).filter(|&j| !used_curr[j]).collect();
    Pairing { pairs, unpaired }
}

/// One rung in the history of a resonance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RungValue<T> {
    pub m: usize,
    pub eps: Cx<T>,
    pub params: ParamPoint<T>,
}

/// A stabilized eigenvalue `ε = E − iΓ/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct ResonanceResult<T> {
    /// Position by ascending `E` among the stabilized eigenvalues.
    pub index: usize,
    pub eps: Cx<T>,
    pub e: T,
    pub gamma: T,
    /// `−log₁₀ |ε_M − ε_{M_prev}|`, capped at the working precision.
    pub converged_digits: f64,
    /// Values along the ladder, oldest first.
    pub history: Vec<RungValue<T>>,
}

/// Eigenvalues of the last rung whose drift from the previous rung is
/// below `tol` and whose imaginary part is not positive.
pub fn resonances<T: Real>(ladder: &[EigenSet<T>], tol: f64) -> Vec<ResonanceResult<T>> {
    resonances_with_window(ladder, tol, DEFAULT_WINDOW)
}

pub fn resonances_with_window<T: Real>(ladder: &[EigenSet<T>], tol: f64, window: f64) -> Vec<ResonanceResult<T>> {
    if ladder.len() < 2 {
        return Vec::new();
    }
    let pairings: Vec<Pairing> = ladder.windows(2).map(|w| match_ladder(&w[0], &w[1], window)).collect();
    let last = ladder.len() - 1;
    let cap = -T::epsilon().to_f64().log10();
    let mut out = Vec::new();
    for (j, &eps) in ladder[last].eigenvalues.iter().enumerate() {
        let mut history = vec![RungValue {
            m: ladder[last].m,
            eps,
            params: ladder[last].params,
        }];
        let mut idx = j;
        for r in (0..last).rev() {
            match pairings[r].pairs.iter().find(|p| p.1 == idx) {
                Some(&(i, _)) => {
                    idx = i;
                    history.push(RungValue {
                        m: ladder[r].m,
                        eps: ladder[r].eigenvalues[i],
                        params: ladder[r].params,
                    });
                }
                None => break,
            }
        }
        history.reverse();
        if history.len() < 2 {
            continue;
        }
        let drift = (history[history.len() - 1].eps - history[history.len() - 2].eps).cabs().to_f64();
        if drift >= tol || eps.im > T::zero() {
            continue;
        }
        let digits = if drift == 0.0 { cap } else { (-drift.log10()).min(cap) };
        out.push(ResonanceResult {
            index: 0,
            eps,
            e: eps.re,
            gamma: T::zero() - (eps.im + eps.im),
            converged_digits: digits,
            history,
        });
    }
    out.sort_by(|a, b| a.e.partial_cmp(&b.e).unwrap_or(std::cmp::Ordering::Equal));
    for (k, r) in out.iter_mut().enumerate() {
        r.index = k;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::Sector;
    use crate::linalg::Matrix;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn set(m: usize, ev: &[Complex64]) -> EigenSet<f64> {
        EigenSet {
            m,
            params: ParamPoint::default(),
            eigenvalues: ev.to_vec(),
        }
    }

    fn rr(n: usize, f: impl FnMut(usize, usize) -> Complex64) -> RRMatrix<f64> {
        RRMatrix {
            entries: Matrix::from_fn(n, f),
            params: ParamPoint::default(),
            sector: Sector::All,
        }
    }

    #[test]
    fn small_closed_forms() {
        let d = eigenvalues(&rr(2, |i, j| if i != j { c(0.0, 0.0) } else if i == 0 { c(0.5, 0.0) } else { c(2.5, 0.0) })).unwrap();
        assert_eq!(d.eigenvalues, vec![c(0.5, 0.0), c(2.5, 0.0)]);
        let (a, b, cc) = (c(2.0, 0.0), c(1.0, 1.0), c(0.0, 0.0));
        let ev = eigenvalues(&rr(2, |i, j| match (i, j) {
            (0, 0) => a,
            (1, 1) => cc,
            _ => b,
        }))
        .unwrap();
        let mid = (a + cc) / 2.0;
        let rad = (((a - cc) / 2.0).powi(2) + b * b).sqrt();
        let mut want = [mid - rad, mid + rad];
        want.sort_by(|x, y| x.re.total_cmp(&y.re));
        for (x, y) in ev.eigenvalues.iter().zip(&want) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn ladder_matching() {
        let prev = set(10, &[c(0.4078039, -0.0147)]);
        let curr = set(20, &[c(0.40780397907, -0.0147), c(2.6094307, -2.398)]);
        let p = match_ladder(&prev, &curr, DEFAULT_WINDOW);
        assert_eq!(p.pairs, vec![(0, 0)]);
        assert_eq!(p.unpaired, vec![1]);
        let same = match_ladder(&curr, &curr, DEFAULT_WINDOW);
        assert_eq!(same.pairs, vec![(0, 0), (1, 1)]);
        let far = match_ladder(&prev, &set(20, &[c(10.0, 0.0)]), DEFAULT_WINDOW);
        assert!(far.pairs.is_empty());
    }

    #[test]
    fn resonance_extraction() {
        let e0 = c(0.40780397907366957, -0.014700108446076743);
        let ladder = vec![
            set(20, &[e0 + c(3e-12, 0.0), c(1.0, -0.5), c(3.0, 0.0)]),
            set(30, &[e0, c(1.2, -0.6), c(3.0, 1e-3)]),
        ];
        let res = resonances(&ladder, DEFAULT_TOL);
        assert_eq!(res.len(), 1);
        assert_eq!(res[0].e, 0.40780397907366957);
        assert!((res[0].gamma - 0.029400216892153486).abs() < 1e-17);
        assert_eq!(Complex64::new(res[0].e, -res[0].gamma / 2.0), res[0].eps);
        assert!(res[0].converged_digits > 11.0);
        let bound = vec![set(5, &[c(0.5, 0.0)]), set(6, &[c(0.5, 0.0)])];
        let res = resonances(&bound, DEFAULT_TOL);
        assert_eq!(res[0].gamma, 0.0);
    }

    #[test]
    fn refinement_recovers_narrow_width() {
        // Weakly coupled low state next to a block of large entries: QR error
        // scales with the big block, the state itself only sees O(1) entries.
        let n = 24;
        let a = Matrix::from_fn(n, |i, j| {
            let (lo, hi) = (i.min(j), i.max(j));
            if i == j && i == 0 {
                c(0.5, -1e-14)
            } else if i == j {
                c(900.0 * i as f64, -350.0 * i as f64)
            } else if lo == 0 {
                c(1e-3 / hi as f64, 2e-4)
            } else {
                c(((lo * 31 + hi * 17) % 13) as f64 * 40.0, ((lo + hi) % 5) as f64 * 10.0)
            }
        });
        let exact = {
            let aq = a.map(Cx::<QuadDouble>::from_c64);
            let ev = eigenvalues_complex_symmetric(&aq).unwrap();
            ev.iter().map(|z| z.to_c64()).min_by(|x, y| (x - 0.5).norm().total_cmp(&(y - 0.5).norm())).unwrap()
        };
        let near = |v: &[Complex64]| *v.iter().min_by(|x, y| (*x - 0.5).norm().total_cmp(&(*y - 0.5).norm())).unwrap();
        let mut ev = eigenvalues_general(&a).unwrap();
        let raw = near(&ev);
        refine_eigenvalues(&a, &mut ev);
        let fine = near(&ev);
        assert!((fine - exact).norm() < 1e-16, "{fine} vs {exact}");
        assert!((fine - exact).norm() < 0.1 * (raw - exact).norm(), "raw {raw} already exact");
    }
}
