//! Options shared by the subcommands, merged from flags, a TOML config file
//! and the built-in example pins, in that order of precedence.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;
use serde::Deserialize;

use cobdetect::criteria::{Competitor, CriterionSpec, PartitionSpec, TripartiteCoefficients};
use cobdetect::oracle::default_bases;
use cobdetect::scan::{example_pins, ExamplePin, Grid};
use cobdetect::states::{NamedState, Orientation};
use cobdetect::{BuiltinBasis, COBasis, DensityMatrix, NoisyFamily};

pub const DEFAULT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Settings {
    /// Named state (ghz3, ghz4, w4, example2_phi) or a JSON state file.
    #[arg(long, global = true)]
    pub state: Option<String>,

    /// Noise parameter in [0, 1].
    #[arg(long, global = true)]
    pub x: Option<f64>,

    /// noise-weight or pure-weight; defaults to the named state's convention,
    /// pure-weight for files.
    #[arg(long, global = true)]
    pub orientation: Option<String>,

    /// Builtin basis name or JSON basis file, one per party; a single value
    /// is used for every party.
    #[arg(long, global = true)]
    #[serde(default)]
    pub basis: Vec<String>,

    /// thm1, thm2, cor1, thm3, thm4i or thm4ii.
    #[arg(long, global = true)]
    pub criterion: Option<String>,

    /// Party f of B^{f|gh} (thm1).
    #[arg(long, global = true)]
    pub party: Option<usize>,

    /// Party split off in the separability hypothesis (thm1).
    #[arg(long, global = true)]
    pub separable: Option<usize>,

    /// Party split off by the mode unfolding (thm4i).
    #[arg(long, global = true)]
    pub l1: Option<usize>,

    /// Partition such as "12|34" or "1,2|3,4" (thm4ii, verify).
    #[arg(long, global = true)]
    pub partition: Option<String>,

    /// c11,c12,c21,c22,c31,c32 (thm1, thm2), or c11,c12 (cor1).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub coeffs: Option<String>,

    /// Scan grid a:b:step.
    #[arg(long, global = true)]
    pub grid: Option<String>,

    /// Bisection tolerance, or the residual tolerance for `basis validate`.
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// csv or json.
    #[arg(long, global = true)]
    pub format: Option<String>,

    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Start from the pinned configuration of a worked example (1 to 4).
    #[arg(long, global = true)]
    pub example: Option<u8>,

    /// Competitor curve to add to a scan (g1, g3, g4, g5); repeatable.
    #[arg(long, global = true)]
    #[serde(default)]
    pub competitor: Vec<String>,
}

impl Settings {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Fills every option unset here from `fallback`.
    pub fn or(self, fallback: Settings) -> Settings {
        Settings {
            state: self.state.or(fallback.state),
            x: self.x.or(fallback.x),
            orientation: self.orientation.or(fallback.orientation),
            basis: if self.basis.is_empty() {
                fallback.basis
            } else {
                self.basis
            },
            criterion: self.criterion.or(fallback.criterion),
            party: self.party.or(fallback.party),
            separable: self.separable.or(fallback.separable),
            l1: self.l1.or(fallback.l1),
            partition: self.partition.or(fallback.partition),
            coeffs: self.coeffs.or(fallback.coeffs),
            grid: self.grid.or(fallback.grid),
            tol: self.tol.or(fallback.tol),
            format: self.format.or(fallback.format),
            seed: self.seed.or(fallback.seed),
            example: self.example.or(fallback.example),
            competitor: if self.competitor.is_empty() {
                fallback.competitor
            } else {
                self.competitor
            },
        }
    }

    /// The example pin to start from: the one whose criterion matches
    /// `--criterion` if any, else the first.
    pub fn pin(&self) -> Result<Option<ExamplePin>> {
        let Some(example) = self.example else {
            return Ok(None);
        };
        let pins = example_pins(example)?;
        let chosen = self
            .criterion
            .as_deref()
            .and_then(|id| pins.iter().find(|p| p.criterion.id() == id))
            .unwrap_or(&pins[0]);
        Ok(Some(chosen.clone()))
    }

    pub fn format(&self, default: Format) -> Result<Format> {
        match self.format.as_deref() {
            None => Ok(default),
            Some("csv") => Ok(Format::Csv),
            Some("json") => Ok(Format::Json),
            Some("text") => Ok(Format::Text),
            Some(other) => bail!("unknown format `{other}`; use csv, json or text"),
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        Ok(match &self.grid {
            Some(g) => Grid::parse(g)?,
            None => Grid::default(),
        })
    }

    pub fn tol(&self) -> f64 {
        self.tol.unwrap_or(DEFAULT_TOL)
    }

    pub fn partition(&self) -> Result<Option<PartitionSpec>> {
        self.partition
            .as_deref()
            .map(PartitionSpec::parse)
            .transpose()
            .map_err(Into::into)
    }

    pub fn competitors(&self, pin: Option<&ExamplePin>) -> Result<Vec<Competitor>> {
        if self.competitor.is_empty() {
            return Ok(pin.map(|p| p.competitors.clone()).unwrap_or_default());
        }
        self.competitor
            .iter()
            .map(|name| {
                Competitor::ALL
                    .into_iter()
                    .find(|c| c.name() == name)
                    .ok_or_else(|| anyhow!("unknown competitor `{name}`"))
            })
            .collect()
    }

    pub fn source(&self, pin: Option<&ExamplePin>) -> Result<StateSource> {
        if let Some(s) = &self.state {
            return StateSource::parse(s);
        }
        pin.map(|p| StateSource::Named(p.state))
            .ok_or_else(|| anyhow!("no state given; pass --state or --example"))
    }

    pub fn family(&self, source: &StateSource) -> Result<NoisyFamily> {
        let orientation = match &self.orientation {
            Some(o) => o.parse::<Orientation>()?,
            None => match source {
                StateSource::Named(n) => n.orientation(),
                StateSource::File(_) => Orientation::PureWeight,
            },
        };
        Ok(match source {
            StateSource::Named(n) => NoisyFamily::new(n.state(), orientation),
            StateSource::File(rho) => NoisyFamily::new(rho.clone(), orientation),
        })
    }

    /// A single state: a named state needs `--x`, a file is taken as-is
    /// unless `--x` mixes it with white noise.
    pub fn density(&self, source: &StateSource) -> Result<DensityMatrix> {
        match (source, self.x) {
            (_, Some(x)) => Ok(self.family(source)?.evaluate(x)?),
            (StateSource::File(rho), None) => Ok(rho.clone()),
            (StateSource::Named(n), None) => bail!("named state `{n}` needs --x"),
        }
    }

    pub fn bases(&self, dims: &[usize], pin: Option<&ExamplePin>) -> Result<Vec<COBasis>> {
        let bases = if !self.basis.is_empty() {
            self.basis
                .iter()
                .map(|b| load_basis(b))
                .collect::<Result<Vec<_>>>()?
        } else if let Some(pin) = pin.filter(|p| p.state.dims() == dims) {
            pin.bases
                .iter()
                .map(|b| COBasis::builtin(*b))
                .collect::<cobdetect::Result<_>>()?
        } else {
            default_bases(dims)?
        };
        let bases = match bases.len() {
            1 if dims.len() > 1 => vec![bases[0].clone(); dims.len()],
            _ => bases,
        };
        if bases.len() != dims.len() {
            return Err(cobdetect::Error::Dimension(format!(
                "{} bases for {} parties",
                bases.len(),
                dims.len()
            ))
            .into());
        }
        Ok(bases)
    }

    pub fn criterion(&self, pin: Option<&ExamplePin>) -> Result<CriterionSpec> {
        let base = pin.map(|p| &p.criterion);
        let Some(id) = self.criterion.as_deref() else {
            return match base {
                Some(spec) if self.has_criterion_params() => self.build(spec.id(), Some(spec)),
                Some(spec) => Ok(spec.clone()),
                None => bail!("no criterion given; pass --criterion or --example"),
            };
        };
        self.build(id, base.filter(|b| b.id() == id))
    }

    fn has_criterion_params(&self) -> bool {
        self.party.is_some()
            || self.separable.is_some()
            || self.l1.is_some()
            || self.partition.is_some()
            || self.coeffs.is_some()
    }

    fn coefficient_list(&self) -> Result<Option<Vec<f64>>> {
        self.coeffs
            .as_deref()
            .map(|s| {
                s.split(',')
                    .map(|v| {
                        v.trim()
                            .parse::<f64>()
                            .map_err(|_| anyhow!("bad coefficient `{v}`"))
                    })
                    .collect()
            })
            .transpose()
    }

    fn build(&self, id: &str, base: Option<&CriterionSpec>) -> Result<CriterionSpec> {
        let coeffs = self.coefficient_list()?;
        Ok(match id {
            "thm1" => {
                let (bp, bc, bs) = match base {
                    Some(&CriterionSpec::Theorem1 {
                        party,
                        c1,
                        c2,
                        separable,
                    }) => (party, Some((c1, c2)), separable),
                    _ => (1, None, 1),
                };
                let party = self.party.unwrap_or(bp);
                if !(1..=3).contains(&party) {
                    bail!("--party must be 1, 2 or 3");
                }
                let (c1, c2) = match coeffs {
                    Some(c) => TripartiteCoefficients::from_slice(&c)?.for_party(party),
                    None => bc.unwrap_or((1.0, 0.0)),
                };
                let separable =
                    self.separable
                        .unwrap_or(if self.party.is_some() { party } else { bs });
                CriterionSpec::Theorem1 {
                    party,
                    c1,
                    c2,
                    separable,
                }
            }
            "thm2" => CriterionSpec::Theorem2 {
                coefficients: match (coeffs, base) {
                    (Some(c), _) => TripartiteCoefficients::from_slice(&c)?,
                    (None, Some(CriterionSpec::Theorem2 { coefficients })) => *coefficients,
                    (None, _) => TripartiteCoefficients::default(),
                },
            },
            "cor1" => {
                let (c11, c12) = match (coeffs.as_deref(), base) {
                    (Some([a, b]), _) => (*a, *b),
                    (Some(c), _) => TripartiteCoefficients::from_slice(c)?.for_party(1),
                    (None, Some(&CriterionSpec::Corollary1 { c11, c12 })) => (c11, c12),
                    (None, _) => (1.0, 0.0),
                };
                CriterionSpec::Corollary1 { c11, c12 }
            }
            "thm3" => CriterionSpec::Theorem3,
            "thm4i" => CriterionSpec::Theorem4i {
                l1: match (self.l1, base) {
                    (Some(l1), _) => l1,
                    (None, Some(&CriterionSpec::Theorem4i { l1 })) => l1,
                    (None, _) => 1,
                },
            },
            "thm4ii" => CriterionSpec::Theorem4ii {
                partition: match (self.partition()?, base) {
                    (Some(p), _) => p,
                    (None, Some(CriterionSpec::Theorem4ii { partition })) => partition.clone(),
                    (None, _) => bail!("thm4ii needs --partition"),
                },
            },
            other => {
                bail!("unknown criterion `{other}`; use thm1, thm2, cor1, thm3, thm4i or thm4ii")
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Text,
}

pub enum StateSource {
    Named(NamedState),
    File(DensityMatrix),
}

impl StateSource {
    pub fn parse(s: &str) -> Result<Self> {
        if let Ok(named) = s.parse::<NamedState>() {
            return Ok(StateSource::Named(named));
        }
        let path = Path::new(s);
        if !path.exists() {
            bail!("`{s}` is neither a named state nor a file");
        }
        Ok(StateSource::File(
            DensityMatrix::load(path).with_context(|| format!("loading state {s}"))?,
        ))
    }

    pub fn dims(&self) -> Vec<usize> {
        match self {
            StateSource::Named(n) => n.dims(),
            StateSource::File(rho) => rho.dims().to_vec(),
        }
    }
}

pub fn load_basis(s: &str) -> Result<COBasis> {
    if let Ok(builtin) = s.parse::<BuiltinBasis>() {
        return Ok(COBasis::builtin(builtin)?);
    }
    let path = Path::new(s);
    if !path.exists() {
        bail!("`{s}` is neither a builtin basis nor a file");
    }
    COBasis::load(path).with_context(|| format!("loading basis {s}"))
}
