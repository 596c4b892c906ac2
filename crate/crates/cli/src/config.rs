//! Run configuration, read from TOML with dotted keys.
//!
//! ```toml
//! precision = "double"
//! problem.potential = "quartic"
//! problem.lambda = 0.02
//! basis.family = "ho"
//! basis.sector = "even"
//! ladder.M = [20, 25, 30, 35]
//! ```

use std::path::{Path, PathBuf};

use resonax_core::basis::{make_basis, BasisFamily, BasisKind, BasisSpec, Sector};
use resonax_core::optimizer::{LadderPlan, SearchOptions};
use resonax_core::potentials::{reduce_radial, AngularSector, Domain, PotentialSpec, PotentialTerm};
use resonax_core::spectrum::{DEFAULT_TOL, DEFAULT_WINDOW};
use resonax_core::Real;
use serde::Deserialize;

use crate::error::{CliError, Result};

/// Digits carried by the extended tier's working type.
pub const MAX_DIGITS: u32 = 62;

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub precision: Precision,
    pub problem: ProblemConfig,
    pub basis: BasisConfig,
    pub ladder: LadderConfig,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum Precision {
    #[default]
    Double,
    Extended { digits: u32 },
}

impl Precision {
    pub fn label(&self) -> String {
        match self {
            Precision::Double => "double".into(),
            Precision::Extended { digits } => format!("extended({digits})"),
        }
    }
}

// `precision = "double"`, `precision = "extended"` or
// `precision = { tier = "extended", digits = 40 }`.
#[derive(Deserialize)]
#[serde(untagged)]
enum PrecisionRepr {
    Name(String),
    Table { tier: String, digits: Option<u32> },
}

impl<'de> Deserialize<'de> for Precision {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let (tier, digits) = match PrecisionRepr::deserialize(d)? {
            PrecisionRepr::Name(s) => (s, None),
            PrecisionRepr::Table { tier, digits } => (tier, digits),
        };
        match (tier.as_str(), digits) {
            ("double", None) => Ok(Precision::Double),
            ("double", Some(_)) => Err(D::Error::custom("double precision takes no digits")),
            ("extended", d) => Ok(Precision::Extended { digits: d.unwrap_or(40) }),
            (other, _) => Err(D::Error::custom(format!("unknown precision tier {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub potential: String,
    pub lambda: Option<f64>,
    pub g: Option<f64>,
    pub gamma: Option<f64>,
    pub depth: Option<f64>,
    pub decay: Option<f64>,
    pub v0: Option<f64>,
    /// Space dimension of radial problems.
    pub dim: Option<u32>,
    /// Terms of a `custom` potential.
    #[serde(default)]
    pub terms: Vec<TermConfig>,
    /// Domain of a `custom` potential.
    pub domain: Option<String>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub kind: String,
    pub coefficient: f64,
    pub power: Option<u32>,
    pub decay: Option<f64>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum OneOrMany {
    One(String),
    Many(Vec<String>),
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BasisConfig {
    pub family: String,
    pub sector: Option<OneOrMany>,
    /// Angular momenta of radial runs.
    pub l: Option<Vec<u32>>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct LadderConfig {
    #[serde(rename = "M")]
    pub m: Vec<usize>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_window")]
    pub window: f64,
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

fn default_window() -> f64 {
    DEFAULT_WINDOW
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfig {
    pub grid: Option<usize>,
    pub re_span: Option<[f64; 2]>,
    pub im_span: Option<[f64; 2]>,
    pub scale: Option<f64>,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub format: Format,
    pub path: Option<PathBuf>,
    /// Where `emit_figure_data` writes, if anywhere.
    pub figure: Option<PathBuf>,
    /// Half-width (full line) or outer radius (half line) of the figure grid.
    pub figure_range: Option<f64>,
}

/// One independently diagonalized block: a basis sector with its potential.
#[derive(Clone, Debug)]
pub struct Problem<T> {
    pub label: String,
    pub basis: BasisSpec<T>,
    pub potential: PotentialSpec<T>,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        LadderPlan::new(self.ladder.m.clone()).map_err(|e| CliError::Config(e.to_string()))?;
        if let Precision::Extended { digits } = self.precision {
            if !(16..=MAX_DIGITS).contains(&digits) {
                return Err(CliError::Config(format!(
                    "extended precision needs 16 to {MAX_DIGITS} digits, got {digits}"
                )));
            }
        }
        if !(self.ladder.tol > 0.0 && self.ladder.window > 0.0) {
            return Err(CliError::Config("ladder.tol and ladder.window must be positive".into()));
        }
        self.problems::<f64>().map(|_| ())
    }

    pub fn search_options(&self) -> SearchOptions {
        let mut o = SearchOptions::default();
        if let Some(g) = self.optimizer.grid {
            o.grid = g;
        }
        if let Some([a, b]) = self.optimizer.re_span {
            o.re_span = (a, b);
        }
        if let Some([a, b]) = self.optimizer.im_span {
            o.im_span = (a, b);
        }
        o.scale = self.optimizer.scale;
        o
    }

    /// The blocks of this run, in the working type `T`.
    pub fn problems<T: Real>(&self) -> Result<Vec<Problem<T>>> {
        let family = self.basis.family.as_str();
        let kind = |name: &str| -> Result<BasisKind> {
            Ok(match name {
                "ho" => BasisKind::Ho,
                "shifted_ho" => BasisKind::ShiftedHo,
                "trig_even" => BasisKind::TrigEven,
                "trig_odd" => BasisKind::TrigOdd,
                "radial_ho" => BasisKind::RadialHo,
                "radial_trig" => BasisKind::RadialTrig,
                other => return Err(CliError::Config(format!("unknown basis family {other:?}"))),
            })
        };
        let radial = matches!(family, "radial_ho" | "radial_trig");
        let mut out = Vec::new();
        if radial {
            if self.basis.sector.as_ref().is_some_and(|s| sectors(s) != ["radial"]) {
                return Err(CliError::Config("radial families take basis.l, not a parity sector".into()));
            }
            let dim = self.problem.dim.unwrap_or(3);
            for &l in self.basis.l.as_deref().unwrap_or(&[0]) {
                let sector = reduce_radial::<T>(l, dim)?;
                let potential = self.radial_potential(&sector)?;
                let fam = if family == "radial_ho" {
                    BasisFamily::radial_ho(sector.lambda)
                } else {
                    BasisFamily::new(BasisKind::RadialTrig, Sector::Radial)
                };
                out.push(Problem {
                    label: format!("l={l}"),
                    basis: make_basis(fam)?,
                    potential,
                });
            }
            return Ok(out);
        }
        if self.basis.l.is_some() {
            return Err(CliError::Config("basis.l only applies to radial families".into()));
        }
        let potential = self.line_potential::<T>()?;
        let names = match &self.basis.sector {
            Some(s) => sectors(s),
            None if family == "trig" => vec!["even".into(), "odd".into()],
            None if family == "trig_even" => vec!["even".into()],
            None if family == "trig_odd" => vec!["odd".into()],
            None => vec!["all".into()],
        };
        for name in names {
            let sector = match name.as_str() {
                "even" => Sector::Even,
                "odd" => Sector::Odd,
                "all" => Sector::All,
                other => return Err(CliError::Config(format!("unknown sector {other:?}"))),
            };
            let k = match (family, sector) {
                ("trig", Sector::Even) => BasisKind::TrigEven,
                ("trig", Sector::Odd) => BasisKind::TrigOdd,
                ("trig", _) => return Err(CliError::Config("trig family needs sector even or odd".into())),
                (f, _) => kind(f)?,
            };
            out.push(Problem {
                label: name,
                basis: make_basis(BasisFamily::new(k, sector))?,
                potential: potential.clone(),
            });
        }
        Ok(out)
    }

    fn line_potential<T: Real>(&self) -> Result<PotentialSpec<T>> {
        let p = &self.problem;
        Ok(match p.potential.as_str() {
            "harmonic" => PotentialSpec::harmonic(),
            "quartic" => PotentialSpec::quartic(self.coef("lambda", p.lambda)?),
            "sextic" => PotentialSpec::sextic(self.coef("g", p.g)?),
            "cubic" => PotentialSpec::cubic(self.coef("gamma", p.gamma)?),
            "gaussian_quartic" => PotentialSpec::gaussian_quartic(
                self.coef("lambda", p.lambda)?,
                exact(p.depth.unwrap_or(5.0)),
                exact(p.decay.unwrap_or(0.1)),
            )?,
            "custom" => {
                let domain = match p.domain.as_deref() {
                    None | Some("full_line") => Domain::FullLine,
                    Some("half_line") => {
                        return Err(CliError::Config(
                            "half-line custom potentials need a radial basis family".into(),
                        ))
                    }
                    Some(other) => return Err(CliError::Config(format!("unknown domain {other:?}"))),
                };
                PotentialSpec::new(self.custom_terms()?, domain)?
            }
            "mexican_hat" | "bardsley" => {
                return Err(CliError::Config(format!("{} is radial; use a radial basis family", p.potential)))
            }
            other => return Err(CliError::Config(format!("unknown potential {other:?}"))),
        })
    }

    fn radial_potential<T: Real>(&self, sector: &AngularSector<T>) -> Result<PotentialSpec<T>> {
        let p = &self.problem;
        let mut terms = match p.potential.as_str() {
            "mexican_hat" => return Ok(PotentialSpec::mexican_hat(self.coef("g", p.g)?, sector)),
            "bardsley" => PotentialSpec::bardsley(self.coef("v0", p.v0)?).terms().to_vec(),
            "custom" => {
                if p.domain.as_deref().is_some_and(|d| d != "half_line") {
                    return Err(CliError::Config("radial families need domain = \"half_line\"".into()));
                }
                self.custom_terms()?
            }
            other => return Err(CliError::Config(format!("potential {other:?} is not radial"))),
        };
        let centrifugal = sector.centrifugal_strength();
        if centrifugal != T::zero() {
            terms.insert(0, PotentialTerm::centrifugal(centrifugal));
        }
        Ok(PotentialSpec::new(terms, Domain::HalfLine)?)
    }

    fn custom_terms<T: Real>(&self) -> Result<Vec<PotentialTerm<T>>> {
        if self.problem.terms.is_empty() {
            return Err(CliError::Config("custom potential needs problem.terms".into()));
        }
        self.problem
            .terms
            .iter()
            .map(|t| {
                let c = exact::<T>(t.coefficient);
                let need = |v: Option<f64>, what: &str| {
                    v.ok_or_else(|| CliError::Config(format!("{} term needs {what}", t.kind)))
                };
                Ok(match t.kind.as_str() {
                    "monomial" => PotentialTerm::monomial(c, t.power.ok_or_else(|| {
                        CliError::Config("monomial term needs power".into())
                    })?),
                    "gaussian" => PotentialTerm::gaussian(c, exact(need(t.decay, "decay")?)),
                    "exp_poly" => PotentialTerm::exp_poly(c, t.power.unwrap_or(0), exact(need(t.decay, "decay")?)),
                    "centrifugal" => PotentialTerm::centrifugal(c),
                    other => return Err(CliError::Config(format!("unknown term kind {other:?}"))),
                })
            })
            .collect()
    }

    fn coef<T: Real>(&self, key: &str, v: Option<f64>) -> Result<T> {
        v.map(exact).ok_or_else(|| {
            CliError::Config(format!("potential {} needs problem.{key}", self.problem.potential))
        })
    }
}

fn sectors(s: &OneOrMany) -> Vec<String> {
    match s {
        OneOrMany::One(x) => vec![x.clone()],
        OneOrMany::Many(v) => v.clone(),
    }
}

/// The decimal the user wrote, read in the working type. `0.1` becomes the
/// quad-double nearest one tenth instead of the widened binary64 value.
fn exact<T: Real>(x: f64) -> T {
    T::parse_decimal(&format!("{x:e}")).unwrap_or_else(|| T::from_f64(x))
}
