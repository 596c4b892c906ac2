//! Potential terms, their evaluation at complex points, reflection symmetry
//! and the D-dimensional radial reduction.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::{creal, czero, ComplexExt, Cx, Real};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TermKind<T> {
    /// `c · x^power`
    Monomial { power: u32 },
    /// `c · e^{-decay · x²}`
    Gaussian { decay: T },
    /// `c · x^power · e^{-decay · x}`
    ExpPoly { power: u32, decay: T },
    /// `c / x²`
    Centrifugal,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PotentialTerm<T> {
    pub kind: TermKind<T>,
    pub coefficient: Cx<T>,
}

impl<T: Real> PotentialTerm<T> {
    pub fn monomial(coefficient: T, power: u32) -> Self {
        PotentialTerm {
            kind: TermKind::Monomial { power },
            coefficient: creal(coefficient),
        }
    }

    pub fn gaussian(coefficient: T, decay: T) -> Self {
        PotentialTerm {
            kind: TermKind::Gaussian { decay },
            coefficient: creal(coefficient),
        }
    }

    pub fn exp_poly(coefficient: T, power: u32, decay: T) -> Self {
        PotentialTerm {
            kind: TermKind::ExpPoly { power, decay },
            coefficient: creal(coefficient),
        }
    }

    pub fn centrifugal(strength: T) -> Self {
        PotentialTerm {
            kind: TermKind::Centrifugal,
            coefficient: creal(strength),
        }
    }

    /// Whether `V(x) = V(-x)` holds for this term alone.
    pub fn is_reflection_symmetric(&self) -> bool {
        match self.kind {
            TermKind::Monomial { power } => power % 2 == 0,
            TermKind::Gaussian { .. } | TermKind::Centrifugal => true,
            TermKind::ExpPoly { .. } => false,
        }
    }

    pub fn eval(&self, z: Cx<T>) -> Result<Cx<T>> {
        let c = self.coefficient;
        Ok(match self.kind {
            TermKind::Monomial { power } => c * z.cpowi(power as i32),
            TermKind::Gaussian { decay } => c * (-(z * z).scale(decay)).cexp(),
            TermKind::ExpPoly { power, decay } => c * z.cpowi(power as i32) * (-z.scale(decay)).cexp(),
            TermKind::Centrifugal => {
                if z == czero() {
                    return Err(Error::SingularPoint);
                }
                c / (z * z)
            }
        })
    }
}

impl<T: Real> fmt::Display for PotentialTerm<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.coefficient.to_c64();
        match self.kind {
            TermKind::Monomial { power } => write!(f, "({c})·x^{power}"),
            TermKind::Gaussian { decay } => write!(f, "({c})·exp(-{}·x²)", decay.to_f64()),
            TermKind::ExpPoly { power, decay } => {
                write!(f, "({c})·x^{power}·exp(-{}·x)", decay.to_f64())
            }
            TermKind::Centrifugal => write!(f, "({c})/x²"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    FullLine,
    HalfLine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Symmetry {
    Even,
    None,
    Radial,
}

/// A potential as a finite sum of [`PotentialTerm`]s on a domain.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialSpec<T> {
    terms: Vec<PotentialTerm<T>>,
    domain: Domain,
    symmetry: Symmetry,
}

impl<T: Real> PotentialSpec<T> {
    pub fn new(terms: Vec<PotentialTerm<T>>, domain: Domain) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidPotential("no terms".into()));
        }
        for term in &terms {
            match term.kind {
                TermKind::Gaussian { decay } | TermKind::ExpPoly { decay, .. } => {
                    if !(decay > T::zero()) {
                        return Err(Error::InvalidPotential(format!(
                            "decay must be strictly positive in {term}"
                        )));
                    }
                }
                TermKind::Centrifugal if domain == Domain::FullLine => {
                    return Err(Error::InvalidPotential(
                        "centrifugal terms require the half-line domain".into(),
                    ));
                }
                _ => {}
            }
        }
        let symmetry = classify(&terms, domain);
        Ok(PotentialSpec {
            terms,
            domain,
            symmetry,
        })
    }

    pub fn terms(&self) -> &[PotentialTerm<T>] {
        &self.terms
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    /// Highest monomial power, or 0 without monomials.
    pub fn max_monomial_power(&self) -> u32 {
        self.terms
            .iter()
            .filter_map(|t| match t.kind {
                TermKind::Monomial { power } => Some(power),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// Natural length scale, used to seed parameter searches.
    pub fn characteristic_length(&self) -> f64 {
        let mut len: f64 = 1.0;
        for t in &self.terms {
            let c = t.coefficient.to_c64().norm();
            let l = match t.kind {
                TermKind::Gaussian { decay } => 1.0 / decay.to_f64().sqrt(),
                TermKind::ExpPoly { power, decay } => f64::from(power.max(1)) / decay.to_f64(),
                TermKind::Monomial { power } if power >= 3 && c > 0.0 => {
                    c.powf(-1.0 / f64::from(power + 2))
                }
                _ => 1.0,
            };
            len = len.max(l);
        }
        len
    }

    /// Harmonic oscillator `½x²`.
    pub fn harmonic() -> Self {
        Self::full_line(vec![PotentialTerm::monomial(half(), 2)])
    }

    /// Inverted quartic oscillator `½x² − (λ/2)x⁴`.
    pub fn quartic(lambda: T) -> Self {
        Self::full_line(vec![
            PotentialTerm::monomial(half(), 2),
            PotentialTerm::monomial(-(lambda * half()), 4),
        ])
    }

    /// Triple-well oscillator `½x² − g²x⁴ + (g⁴/2)x⁶`.
    pub fn sextic(g: T) -> Self {
        let g2 = g * g;
        Self::full_line(vec![
            PotentialTerm::monomial(half(), 2),
            PotentialTerm::monomial(-g2, 4),
            PotentialTerm::monomial(g2 * g2 * half(), 6),
        ])
    }

    /// Cubic oscillator `½x² + γx³`.
    pub fn cubic(gamma: T) -> Self {
        Self::full_line(vec![
            PotentialTerm::monomial(half(), 2),
            PotentialTerm::monomial(gamma, 3),
        ])
    }

    /// Inverted Gaussian well with a quartic perturbation,
    /// `−depth·e^{−decay·x²} − (λ/2)x⁴`.
    pub fn gaussian_quartic(lambda: T, depth: T, decay: T) -> Result<Self> {
        Self::new(
            vec![
                PotentialTerm::gaussian(-depth, decay),
                PotentialTerm::monomial(-(lambda * half()), 4),
            ],
            Domain::FullLine,
        )
    }

    /// Radial inverted Mexican hat `Λ(Λ+1)/2r² + ½r² − (g/2)r⁴`.
    pub fn mexican_hat(g: T, sector: &AngularSector<T>) -> Self {
        let mut terms = vec![
            PotentialTerm::monomial(half(), 2),
            PotentialTerm::monomial(-(g * half()), 4),
        ];
        let c = sector.centrifugal_strength();
        if c != T::zero() {
            terms.insert(0, PotentialTerm::centrifugal(c));
        }
        PotentialSpec::new(terms, Domain::HalfLine).expect("mexican hat terms are valid")
    }

    /// Bardsley potential `V₀ r² e^{−r}` on the half-line.
    pub fn bardsley(v0: T) -> Self {
        PotentialSpec::new(vec![PotentialTerm::exp_poly(v0, 2, T::one())], Domain::HalfLine)
            .expect("bardsley terms are valid")
    }

    fn full_line(terms: Vec<PotentialTerm<T>>) -> Self {
        PotentialSpec::new(terms, Domain::FullLine).expect("polynomial terms are valid")
    }
}

fn half<T: Real>() -> T {
    T::from_f64(0.5)
}

fn classify<T: Real>(terms: &[PotentialTerm<T>], domain: Domain) -> Symmetry {
    if domain == Domain::HalfLine {
        Symmetry::Radial
    } else if terms.iter().all(PotentialTerm::is_reflection_symmetric) {
        Symmetry::Even
    } else {
        Symmetry::None
    }
}

/// `V(z)` summed over all terms.
pub fn eval<T: Real>(potential: &PotentialSpec<T>, z: Cx<T>) -> Result<Cx<T>> {
    potential
        .terms
        .iter()
        .try_fold(czero(), |acc, t| Ok(acc + t.eval(z)?))
}

pub fn detect_symmetry<T: Real>(potential: &PotentialSpec<T>) -> Symmetry {
    classify(&potential.terms, potential.domain)
}

/// Angular-momentum sector of a radial problem in `dim` dimensions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AngularSector<T> {
    pub l: u32,
    pub dim: u32,
    /// `Λ = l + D/2 − 3/2`
    pub lambda: T,
}

impl<T: Real> AngularSector<T> {
    /// Strength `Λ(Λ+1)/2` of the effective centrifugal barrier.
    pub fn centrifugal_strength(&self) -> T {
        self.lambda * (self.lambda + T::one()) * half()
    }
}

/// Reduces the D-dimensional radial equation to one-dimensional form via
/// `R(r) = r^{(1−D)/2} u(r)`.
pub fn reduce_radial<T: Real>(l: u32, dim: u32) -> Result<AngularSector<T>> {
    if dim < 2 {
        return Err(Error::InvalidArgument(format!(
            "space dimension must be at least 2, got {dim}"
        )));
    }
    let twice = T::from_i64(2 * i64::from(l) + i64::from(dim) - 3);
    Ok(AngularSector {
        l,
        dim,
        lambda: twice * half(),
    })
}
