//! Stationary points of the trace, root selection and continuation along
//! a ladder of matrix dimensions.

use crate::basis::{BasisFamily, BasisKind, BasisSpec, ParamName, ParamPoint, Sector};
use crate::basis::validity_region;
use crate::error::{Error, Result};
use crate::linalg::poly_roots;
use crate::matelem::{trace_fn, TraceFunction};
use crate::potentials::PotentialSpec;
use crate::real::{cx, czero, ComplexExt, Cx, Real};

/// Box roots farther than this many grid extents are discarded: the
/// gradient of a box trace decays as `|L| → ∞`, so Newton can "converge"
/// out there on a vanishing residual.
const FAR: f64 = 10.0;

/// Dimension where box-basis branches are first picked, see [`first_rung`].
pub const WARMUP_START: usize = 4;
/// Dimension increment while following a branch up to the first rung.
pub const WARMUP_STEP: usize = 2;

/// A stationary point of the trace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootCandidate<T> {
    pub params: ParamPoint<T>,
    /// `|∇T|` at `params`.
    pub residual: T,
    /// `|T|` at `params`, the scale for `residual`.
    pub trace: T,
    pub valid: bool,
}

/// Knobs of the root search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchOptions {
    /// Newton starts per axis of the multi-start grid.
    pub grid: usize,
    /// Grid span over `Re`, in units of the scale guess.
    pub re_span: (f64, f64),
    /// Grid span over `Im`, in units of the scale guess.
    pub im_span: (f64, f64),
    /// Overrides the scale guess derived from the potential.
    pub scale: Option<f64>,
    /// Newton stops once the update is below this, relative to the point.
    pub newton_tol: f64,
    pub max_iter: usize,
    /// Roots closer than this are merged.
    pub dedup: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            grid: 8,
            re_span: (0.2, 5.0),
            im_span: (0.05, 5.0),
            scale: None,
            newton_tol: 1e-13,
            max_iter: 60,
            dedup: 1e-8,
        }
    }
}

/// Accepted residual for a converged root.
fn accept<T: Real>(residual: T, trace: T) -> bool {
    residual.to_f64() <= 1e-10 * trace.to_f64().max(1.0)
}

fn family_of<T: Real>(tf: &TraceFunction<T>) -> BasisFamily<T> {
    match tf {
        TraceFunction::Polynomial(p) if p.shifted => BasisFamily::new(BasisKind::ShiftedHo, Sector::All),
        TraceFunction::Polynomial(_) => BasisFamily::new(BasisKind::Ho, Sector::All),
        TraceFunction::Box(_) => BasisFamily::new(BasisKind::TrigEven, Sector::Even),
    }
}

fn candidate<T: Real>(tf: &TraceFunction<T>, params: ParamPoint<T>) -> RootCandidate<T> {
    // Real stationary points otherwise carry ±1e-39 noise whose sign
    // decides validity and rotation.
    let params = ParamPoint {
        omega: params.omega.map(snap),
        l: params.l.map(|l| snap_axis(snap(l))),
        ..params
    };
    let (val, grad, _) = tf.derivatives(&params, 1);
    let residual = grad.iter().fold(T::zero(), |acc, g| acc.hypot(g.cabs()));
    RootCandidate {
        params,
        residual,
        trace: val.cabs(),
        valid: validity_region(&family_of(tf), &params),
    }
}

/// Newton on `∇T = 0` from `start`; `None` if it diverges or stalls.
fn newton<T: Real>(tf: &TraceFunction<T>, start: ParamPoint<T>, opts: &SearchOptions) -> Option<ParamPoint<T>> {
    let names = tf.params();
    let mut p = start;
    let tol = T::from_f64(opts.newton_tol);
    for _ in 0..opts.max_iter {
        let (_, g, h) = tf.derivatives(&p, 2);
        let step = solve_small(&h, &g)?;
        let mut size = T::zero();
        let mut norm = T::one();
        for (name, d) in names.iter().zip(&step) {
            let v = p.get(*name).expect("active parameter");
            size = size.hypot(d.cabs());
            norm = norm.max(v.cabs());
            p.set(*name, v - *d);
        }
        if !names.iter().all(|n| p.get(*n).is_some_and(|v| v.is_finite_c())) {
            return None;
        }
        if size <= tol * norm {
            return Some(p);
        }
    }
    // accept a point that stalled at rounding level
    let c = candidate(tf, p);
    accept(c.residual, c.trace).then_some(p)
}

/// Solves `H x = g` for one or two unknowns.
fn solve_small<T: Real>(h: &[Vec<Cx<T>>], g: &[Cx<T>]) -> Option<Vec<Cx<T>>> {
    match g.len() {
        1 => {
            if h[0][0] == czero() {
                None
            } else {
                Some(vec![g[0] / h[0][0]])
            }
        }
        2 => {
            let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
            if det == czero() {
                return None;
            }
            Some(vec![
                (g[0] * h[1][1] - h[0][1] * g[1]) / det,
                (h[0][0] * g[1] - h[1][0] * g[0]) / det,
            ])
        }
        _ => unreachable!("at most two active parameters"),
    }
}

/// Zeroes an imaginary part that is rounding noise.
fn snap<T: Real>(z: Cx<T>) -> Cx<T> {
    if z.im.abs() <= T::from_f64(1e-12) * z.cabs() {
        cx(z.re, T::zero())
    } else {
        z
    }
}

/// Zeroes a real part that is rounding noise.
fn snap_axis<T: Real>(z: Cx<T>) -> Cx<T> {
    if z.re.abs() <= T::from_f64(1e-12) * z.cabs() {
        cx(T::zero(), z.im)
    } else {
        z
    }
}

fn push_unique<T: Real>(out: &mut Vec<RootCandidate<T>>, c: RootCandidate<T>, dedup: f64) {
    let d = T::from_f64(dedup);
    if !out.iter().any(|o| o.params.distance(&c.params) < d * c.params.distance(&ParamPoint::default()).max(T::one())) {
        out.push(c);
    }
}

/// All stationary points the search finds, valid or not.
///
/// Laurent-polynomial traces are solved exhaustively through the companion
/// matrix of `Ω^s dT/dΩ` followed by a Newton polish; box traces by Newton
/// from a grid of starts in the upper half plane; shifted traces by
/// two-dimensional Newton (see [`optimize_shifted`]).
pub fn stationary_points<T: Real>(tf: &TraceFunction<T>, opts: &SearchOptions) -> Result<Vec<RootCandidate<T>>> {
    let mut out: Vec<RootCandidate<T>> = Vec::new();
    match tf {
        TraceFunction::Polynomial(poly) if !poly.shifted => {
            for root in poly_roots(&poly.stationarity_polynomial())? {
                if root == czero() {
                    continue;
                }
                let start = ParamPoint::omega(snap(root));
                let polished = newton(tf, start, opts).unwrap_or(start);
                let polished = ParamPoint::omega(snap(polished.omega.expect("Ω")));
                push_unique(&mut out, candidate(tf, polished), opts.dedup);
            }
        }
        TraceFunction::Polynomial(_) => {
            for start in shifted_starts::<T>() {
                if let Some(p) = newton(tf, start, opts) {
                    let c = candidate(tf, p);
                    if accept(c.residual, c.trace) {
                        push_unique(&mut out, c, opts.dedup);
                    }
                }
            }
        }
        TraceFunction::Box(b) => {
            let scale = opts.scale.unwrap_or_else(|| b.scale());
            let extent = scale * [opts.re_span.0, opts.re_span.1, opts.im_span.0, opts.im_span.1]
                .iter()
                .fold(0.0f64, |m, x| m.max(x.abs()));
            for start in grid_starts::<T>(opts, scale) {
                if let Some(p) = newton(tf, start, opts) {
                    let l = p.l.expect("box parameter");
                    if l.cabs().to_f64() > FAR * extent {
                        continue;
                    }
                    let c = candidate(tf, ParamPoint::box_width(snap_axis(l)));
                    if accept(c.residual, c.trace) {
                        push_unique(&mut out, c, opts.dedup);
                    }
                }
            }
        }
    }
    Ok(out)
}

fn grid_starts<T: Real>(opts: &SearchOptions, scale: f64) -> Vec<ParamPoint<T>> {
    let n = opts.grid.max(1);
    let lerp = |(a, b): (f64, f64), k: usize| {
        if n == 1 {
            a
        } else {
            a + (b - a) * k as f64 / (n - 1) as f64
        }
    };
    let mut starts = Vec::with_capacity(n * n);
    for i in 0..n {
        for k in 0..n {
            let re = lerp(opts.re_span, i) * scale;
            let im = lerp(opts.im_span, k) * scale;
            starts.push(ParamPoint::box_width(cx(T::from_f64(re), T::from_f64(im))));
        }
    }
    starts
}

fn shifted_starts<T: Real>() -> Vec<ParamPoint<T>> {
    let omegas = [(1.0, 0.0), (1.0, -0.5), (0.7, -1.0), (1.5, -1.0)];
    let ts = [-3.0, -1.0, 0.0, 1.0, 3.0];
    let mut starts = Vec::new();
    for &(wr, wi) in &omegas {
        for &tr in &ts {
            for &ti in &ts {
                starts.push(ParamPoint::shifted(
                    cx(T::from_f64(wr), T::from_f64(wi)),
                    cx(T::from_f64(tr), T::from_f64(ti)),
                ));
            }
        }
    }
    starts
}

/// Effective rotation angle exposed by a parameter point: `−arg(Ω)/2` for
/// oscillator bases and `arg L` for box bases.
pub fn rotation_angle<T: Real>(p: &ParamPoint<T>) -> f64 {
    if let Some(l) = p.l {
        let l = l.to_c64();
        l.im.atan2(l.re)
    } else if let Some(w) = p.omega {
        let w = w.to_c64();
        -0.5 * w.im.atan2(w.re)
    } else {
        0.0
    }
}

/// Picks one candidate.
///
/// With `history`, the valid candidate nearest the previous rung's point.
/// Without, among valid candidates that rotate (`Im Ω < 0`, `Im L > 0`,
/// purely imaginary `L` excluded) and whose residual is within rounding of
/// the best, the one with the smallest [`rotation_angle`]; exact ties go to
/// the largest `|Im|` of the scale parameter.
pub fn select_root<T: Real>(candidates: &[RootCandidate<T>], history: Option<&ParamPoint<T>>) -> Result<ParamPoint<T>> {
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    if candidates.len() == 1 && history.is_none() {
        return Ok(candidates[0].params);
    }
    let valid: Vec<&RootCandidate<T>> = candidates.iter().filter(|c| c.valid).collect();
    if let Some(prev) = history {
        return valid
            .iter()
            .min_by(|a, b| {
                a.params
                    .distance(prev)
                    .partial_cmp(&b.params.distance(prev))
                    .expect("finite distances")
            })
            .map(|c| c.params)
            .ok_or(Error::NoValidRoot);
    }
    let rotating: Vec<&RootCandidate<T>> = valid.iter().copied().filter(|c| rotates(&c.params)).collect();
    if rotating.is_empty() {
        // Bound-state problems (pure oscillator) have only unrotated
        // stationary points. A box turned by 90° or 180° is also stationary
        // but maps V(x) to V(ix) or mirrors it, so the least-turned wins.
        let turn = |c: &RootCandidate<T>| rotation_angle(&c.params).abs();
        return valid
            .iter()
            .min_by(|a, b| {
                turn(a)
                    .total_cmp(&turn(b))
                    .then(relative_residual(a).total_cmp(&relative_residual(b)))
            })
            .map(|c| c.params)
            .ok_or(Error::NoValidRoot);
    }
    let best = rotating
        .iter()
        .map(|c| relative_residual(c))
        .fold(f64::INFINITY, f64::min);
    let floor = best.max(1e-12);
    rotating
        .iter()
        .filter(|c| relative_residual(c) <= 10.0 * floor)
        .min_by(|a, b| {
            rotation_angle(&a.params)
                .total_cmp(&rotation_angle(&b.params))
                .then(scale_imag(&b.params).total_cmp(&scale_imag(&a.params)))
        })
        .map(|c| c.params)
        .ok_or(Error::NoValidRoot)
}

fn relative_residual<T: Real>(c: &RootCandidate<T>) -> f64 {
    c.residual.to_f64() / c.trace.to_f64().max(1.0)
}

fn rotates<T: Real>(p: &ParamPoint<T>) -> bool {
    match (p.l, p.omega) {
        (Some(l), _) => l.im > T::zero() && l.re != T::zero(),
        (None, Some(w)) => w.im < T::zero(),
        _ => false,
    }
}

fn scale_imag<T: Real>(p: &ParamPoint<T>) -> f64 {
    p.l.or(p.omega).map_or(0.0, |z| z.im.to_f64().abs())
}

/// Stationary point `(Ω, t)` of a shifted-basis trace, from the
/// two-dimensional Newton multi-start and [`select_root`].
pub fn optimize_shifted<T: Real>(
    tf: &TraceFunction<T>,
    history: Option<&ParamPoint<T>>,
    opts: &SearchOptions,
) -> Result<ParamPoint<T>> {
    if !tf.params().contains(&ParamName::T) {
        return Err(Error::InvalidArgument("trace is not a shifted-basis trace".into()));
    }
    let mut roots = stationary_points(tf, opts)?;
    if let Some(prev) = history {
        if let Some(p) = newton(tf, *prev, opts) {
            let c = candidate(tf, p);
            if accept(c.residual, c.trace) {
                push_unique(&mut roots, c, opts.dedup);
            }
        }
    }
    if roots.is_empty() {
        return Err(Error::NewtonFailed);
    }
    select_root(&roots, history)
}

/// Strictly increasing ladder of matrix dimensions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LadderPlan {
    ms: Vec<usize>,
}

impl LadderPlan {
    pub fn new(ms: Vec<usize>) -> Result<Self> {
        if ms.is_empty() || ms[0] == 0 || ms.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!(
                "ladder must be non-empty, positive and strictly increasing: {ms:?}"
            )));
        }
        Ok(LadderPlan { ms })
    }

    pub fn dims(&self) -> &[usize] {
        &self.ms
    }
}

/// Optimal parameters for one rung, continuing from `history` if given.
///
/// With history, the previous point also seeds a Newton run so the branch
/// is followed even where the multi-start grid misses it.
pub fn optimize<T: Real>(
    tf: &TraceFunction<T>,
    history: Option<&ParamPoint<T>>,
    opts: &SearchOptions,
) -> Result<ParamPoint<T>> {
    match tf {
        TraceFunction::Polynomial(p) if p.shifted => optimize_shifted(tf, history, opts),
        TraceFunction::Box(_) => {
            if let Some(prev) = history {
                if let Ok(c) = polish(tf, prev, opts) {
                    if c.valid {
                        return Ok(c.params);
                    }
                }
            }
            let roots = stationary_points(tf, opts)?;
            if roots.is_empty() {
                return Err(Error::NoValidRoot);
            }
            select_root(&roots, history)
        }
        _ => {
            let roots = stationary_points(tf, opts)?;
            if roots.is_empty() {
                return Err(Error::NoValidRoot);
            }
            select_root(&roots, history)
        }
    }
}

/// Newton refinement of an approximate stationary point, e.g. one found in
/// double precision, in the working type of `tf`.
pub fn polish<T: Real>(tf: &TraceFunction<T>, start: &ParamPoint<T>, opts: &SearchOptions) -> Result<RootCandidate<T>> {
    let p = newton(tf, *start, opts).ok_or(Error::NewtonFailed)?;
    let c = candidate(tf, p);
    if accept(c.residual, c.trace) {
        Ok(c)
    } else {
        Err(Error::NewtonFailed)
    }
}

/// Parameters for the first rung of a ladder at dimension `m`.
///
/// Oscillator traces go straight to [`optimize`]. Box traces have many
/// stationary branches whose ordering by rotation angle changes with `M`,
/// so the branch is picked by [`select_root`] at [`WARMUP_START`], where
/// the smallest-angle branch is the one continuously connected to the
/// lowest order, and followed upward in steps of [`WARMUP_STEP`].
pub fn first_rung<T: Real>(
    basis: &BasisSpec<T>,
    potential: &PotentialSpec<T>,
    m: usize,
    opts: &SearchOptions,
) -> Result<ParamPoint<T>> {
    if basis.kind().is_oscillator() || m <= WARMUP_START {
        return optimize(&trace_fn(basis, potential, m)?, None, opts);
    }
    let mut dim = WARMUP_START;
    let mut p = optimize(&trace_fn(basis, potential, dim)?, None, opts)?;
    while dim < m {
        dim = (dim + WARMUP_STEP).min(m);
        p = optimize(&trace_fn(basis, potential, dim)?, Some(&p), opts)?;
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{make_basis, BasisFamily};
    use crate::matelem::trace_fn;
    use crate::potentials::PotentialSpec;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cand(w: Complex64, residual: f64) -> RootCandidate<f64> {
        RootCandidate {
            params: ParamPoint::omega(w),
            residual,
            trace: 1.0,
            valid: w.re > 0.0 && w.im <= 0.0,
        }
    }

    #[test]
    fn real_only_candidates_fall_back_to_smallest_residual() {
        let set = [cand(c(-1.0, 0.0), 0.0), cand(c(1.0, 0.0), 1e-15), cand(c(2.0, 0.0), 1e-3)];
        let p = select_root(&set, None).unwrap();
        assert_eq!(p.omega, Some(c(1.0, 0.0)));
        let boxes = [
            RootCandidate { params: ParamPoint::box_width(c(0.0, 9.7)), residual: 0.0, trace: 1.0, valid: true },
            RootCandidate { params: ParamPoint::box_width(c(9.8, 0.0)), residual: 1e-14, trace: 1.0, valid: true },
        ];
        assert_eq!(select_root(&boxes, None).unwrap().l, Some(c(9.8, 0.0)));
        let none_valid = [cand(c(-1.0, 0.0), 0.0), cand(c(-2.0, 0.0), 0.0)];
        assert!(matches!(select_root(&none_valid, None), Err(Error::NoValidRoot)));
    }

    #[test]
    fn harmonic_has_the_single_root_one() {
        for sector in [Sector::Even, Sector::Odd, Sector::All] {
            let b = make_basis(BasisFamily::new(BasisKind::Ho, sector)).unwrap();
            for m in [1, 5, 20] {
                let tf = trace_fn(&b, &PotentialSpec::harmonic(), m).unwrap();
                let roots = stationary_points(&tf, &SearchOptions::default()).unwrap();
                let valid: Vec<_> = roots.iter().filter(|r| r.valid).collect();
                assert_eq!(valid.len(), 1);
                let w = valid[0].params.omega.unwrap();
                assert!((w - 1.0).norm() < 1e-14 && w.im == 0.0, "{w}");
            }
        }
    }

    #[test]
    fn selection_prefers_rotation_then_continuity() {
        let first = select_root(&[cand(c(1.0, 0.0), 0.0), cand(c(0.72, -0.75), 1e-15)], None).unwrap();
        assert_eq!(first.omega, Some(c(0.72, -0.75)));
        let prev = ParamPoint::omega(c(0.759, -0.853));
        let next = select_root(&[cand(c(0.79, -0.94), 0.0), cand(c(0.80, -2.1), 0.0)], Some(&prev)).unwrap();
        assert_eq!(next.omega, Some(c(0.79, -0.94)));
        let single = select_root(&[cand(c(2.0, -1.0), 0.0)], None).unwrap();
        assert_eq!(single.omega, Some(c(2.0, -1.0)));
        assert_eq!(select_root::<f64>(&[], None), Err(Error::EmptyCandidates));
    }

    #[test]
    fn smallest_rotation_wins_on_first_rung() {
        let box_cand = |re: f64, im: f64| RootCandidate {
            params: ParamPoint::box_width(c(re, im)),
            residual: 1e-14,
            trace: 500.0,
            valid: true,
        };
        let cands = [box_cand(0.0, 4.9), box_cand(3.74, 6.96), box_cand(5.114, 2.888), box_cand(-5.114, 2.888)];
        assert_eq!(select_root(&cands, None).unwrap().l, Some(c(5.114, 2.888)));
    }

    #[test]
    fn box_branch_is_followed_from_low_order() {
        let basis = make_basis(BasisFamily::new(BasisKind::TrigEven, Sector::Even)).unwrap();
        let gq = PotentialSpec::gaussian_quartic(0.08, 5.0, 0.1).unwrap();
        let l = first_rung(&basis, &gq, 20, &SearchOptions::default()).unwrap().l.unwrap();
        assert!((l - c(5.114382, 2.887974)).norm() < 1e-5, "{l}");
    }

    #[test]
    fn ladder_plan_validation() {
        assert!(LadderPlan::new(vec![20, 25, 30]).is_ok());
        assert!(LadderPlan::new(vec![]).is_err());
        assert!(LadderPlan::new(vec![20, 20]).is_err());
        assert!(LadderPlan::new(vec![30, 20]).is_err());
    }
}
