//! Structural properties of the matrices, traces, spectra and roots.

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use resonax_core::basis::{make_basis, BasisFamily, BasisKind, BasisSpec, ParamPoint, Sector};
use resonax_core::linalg::Matrix;
use resonax_core::matelem::{build_matrix, trace_fn, trace_gradient, RRMatrix};
use resonax_core::optimizer::{optimize, stationary_points, SearchOptions};
use resonax_core::potentials::{reduce_radial, PotentialSpec};
use resonax_core::spectrum::eigenvalues;

fn fam(kind: BasisKind, sector: Sector) -> BasisSpec<f64> {
    make_basis(BasisFamily::new(kind, sector)).unwrap()
}

/// One representative (basis, potential) pair per supported combination,
/// with the parameter point built from a modulus and an angle.
fn pair(which: usize) -> (BasisSpec<f64>, PotentialSpec<f64>) {
    match which {
        0 => (fam(BasisKind::Ho, Sector::Even), PotentialSpec::quartic(0.02)),
        1 => (fam(BasisKind::Ho, Sector::Odd), PotentialSpec::sextic(0.3)),
        2 => (fam(BasisKind::ShiftedHo, Sector::All), PotentialSpec::cubic(0.1)),
        3 => {
            let s = reduce_radial(1, 2).unwrap();
            (make_basis(BasisFamily::radial_ho(s.lambda)).unwrap(), PotentialSpec::mexican_hat(0.1, &s))
        }
        4 => (fam(BasisKind::TrigEven, Sector::Even), PotentialSpec::gaussian_quartic(0.08, 5.0, 0.1).unwrap()),
        5 => (fam(BasisKind::TrigOdd, Sector::Odd), PotentialSpec::gaussian_quartic(0.01, 5.0, 0.1).unwrap()),
        _ => (fam(BasisKind::RadialTrig, Sector::Radial), PotentialSpec::bardsley(7.5)),
    }
}

fn point(basis: &BasisSpec<f64>, r: f64, phi: f64, t: (f64, f64)) -> ParamPoint<f64> {
    match basis.kind() {
        BasisKind::ShiftedHo => ParamPoint::shifted(Complex64::from_polar(r, -phi), Complex64::new(t.0, t.1)),
        k if k.is_oscillator() => ParamPoint::omega(Complex64::from_polar(r, -phi)),
        // box widths of a few characteristic lengths, rotated up to past 90°
        _ => ParamPoint::box_width(Complex64::from_polar(4.0 + 3.0 * r, 1.7 * phi)),
    }
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn trace_equals_diagonal_sum(which in 0usize..7, r in 0.5f64..2.0, phi in 0.0f64..1.0, tr in -2.0f64..2.0, ti in -2.0f64..0.5, m in 1usize..25) {
        let (basis, pot) = pair(which);
        let p = point(&basis, r, phi, (tr, ti));
        let h = build_matrix(&basis, &pot, &p, m).unwrap();
        let tf = trace_fn(&basis, &pot, m).unwrap();
        prop_assert!(rel(tf.eval(&p), h.entries.trace()) < 1e-12, "{} vs {}", tf.eval(&p), h.entries.trace());
    }

    #[test]
    fn matrices_are_exactly_symmetric(which in 0usize..7, r in 0.5f64..2.0, phi in 0.0f64..1.0, m in 1usize..25) {
        let (basis, pot) = pair(which);
        let h = build_matrix(&basis, &pot, &point(&basis, r, phi, (0.3, -0.7)), m).unwrap();
        prop_assert!(h.entries.is_symmetric());
    }

    #[test]
    fn gradient_matches_complex_difference(which in 0usize..7, r in 0.5f64..2.0, phi in 0.0f64..1.0, tr in -2.0f64..2.0, ti in -2.0f64..0.5) {
        let (basis, pot) = pair(which);
        let p = point(&basis, r, phi, (tr, ti));
        let tf = trace_fn(&basis, &pot, 12).unwrap();
        let grad = trace_gradient(&tf, &p);
        for (k, name) in tf.params().iter().enumerate() {
            let z = p.get(*name).unwrap();
            // holomorphic: the derivative along the imaginary direction equals d/dz
            let h = Complex64::new(0.0, 3e-4 * z.norm().max(1.0));
            let at = |k: f64| {
                let mut q = p;
                q.set(*name, z + k * h);
                tf.eval(&q)
            };
            let fd = (at(-2.0) - 8.0 * at(-1.0) + 8.0 * at(1.0) - at(2.0)) / (12.0 * h);
            let scale = grad[k].norm().max(tf.eval(&p).norm() / z.norm().max(1.0));
            prop_assert!((fd - grad[k]).norm() / scale < 1e-9, "{name:?}: {} vs {}", fd, grad[k]);
        }
    }

    #[test]
    fn eigenvalues_sum_to_trace(which in 0usize..7, r in 0.5f64..2.0, phi in 0.0f64..1.0, m in 2usize..40) {
        let (basis, pot) = pair(which);
        let h = build_matrix(&basis, &pot, &point(&basis, r, phi, (0.3, -0.7)), m).unwrap();
        let sum: Complex64 = eigenvalues(&h).unwrap().eigenvalues.iter().sum();
        let trace = h.entries.trace();
        let scale = (0..m).map(|i| h.entries[(i, i)].norm()).sum::<f64>();
        prop_assert!((sum - trace).norm() <= 1e-11 * scale, "{} vs {}", sum, trace);
    }

    #[test]
    fn real_symmetric_matrices_match_a_symmetric_solver(n in 2usize..30, seed in any::<u64>()) {
        let mut state = seed | 1;
        let mut next = || { state ^= state << 13; state ^= state >> 7; state ^= state << 17; (state % 20001) as f64 / 10000.0 - 1.0 };
        let vals: Vec<f64> = (0..n * n).map(|_| next()).collect();
        let sym = |i: usize, j: usize| vals[i.min(j) * n + i.max(j)];
        let rr = RRMatrix {
            entries: Matrix::from_fn(n, |i, j| Complex64::new(sym(i, j), 0.0)),
            params: ParamPoint::default(),
            sector: Sector::All,
        };
        let ours = eigenvalues(&rr).unwrap().eigenvalues;
        let mut theirs: Vec<f64> = DMatrix::from_fn(n, n, sym).symmetric_eigenvalues().iter().copied().collect();
        theirs.sort_by(f64::total_cmp);
        for (a, b) in ours.iter().zip(&theirs) {
            prop_assert!(a.im.abs() < 1e-12, "{a}");
            prop_assert!((a.re - b).abs() < 1e-12 * n as f64, "{a} vs {b}");
        }
    }

    #[test]
    fn harmonic_candidates_are_exactly_one(m in 1usize..40, sector in prop_oneof![Just(Sector::Even), Just(Sector::Odd), Just(Sector::All)]) {
        let tf = trace_fn(&fam(BasisKind::Ho, sector), &PotentialSpec::harmonic(), m).unwrap();
        let valid: Vec<_> = stationary_points(&tf, &SearchOptions::default()).unwrap().into_iter().filter(|c| c.valid).collect();
        prop_assert_eq!(valid.len(), 1);
        prop_assert!((valid[0].params.omega.unwrap() - 1.0).norm() < 1e-13);
    }
}

#[test]
fn diagonal_spectra_are_the_diagonal() {
    let d = [3.0, -1.5, 0.25, 7.0, 0.5];
    let rr = RRMatrix {
        entries: Matrix::from_fn(5, |i, j| if i == j { Complex64::new(d[i], -0.1 * i as f64) } else { Complex64::new(0.0, 0.0) }),
        params: ParamPoint::default(),
        sector: Sector::All,
    };
    let ev = eigenvalues(&rr).unwrap().eigenvalues;
    for (i, &x) in d.iter().enumerate() {
        let want = Complex64::new(x, -0.1 * i as f64);
        assert!(ev.iter().any(|e| (e - want).norm() < 1e-14));
    }
}

#[test]
fn returned_roots_are_stationary() {
    let opts = SearchOptions::default();
    for which in 0..7 {
        let (basis, pot) = pair(which);
        for m in [6, 14, 20] {
            let tf = trace_fn(&basis, &pot, m).unwrap();
            for c in stationary_points(&tf, &opts).unwrap().iter().filter(|c| c.valid) {
                assert!(c.residual < 1e-10 * c.trace.max(1.0), "{which} M={m}: {c:?}");
            }
        }
    }
}

#[test]
fn quartic_branch_moves_smoothly() {
    let basis = fam(BasisKind::Ho, Sector::Even);
    let pot = PotentialSpec::quartic(0.02);
    let opts = SearchOptions::default();
    let mut prev: Option<ParamPoint<f64>> = None;
    for m in [20, 25, 30, 35] {
        let p = optimize(&trace_fn(&basis, &pot, m).unwrap(), prev.as_ref(), &opts).unwrap();
        if let Some(q) = prev {
            assert!(p.distance(&q) < 0.5, "M={m}: {p:?} after {q:?}");
        }
        prev = Some(p);
    }
}
