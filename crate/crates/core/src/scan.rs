//! Parameter scans over white-noise families and the pinned example setups.

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cob::{BuiltinBasis, CoBasis};
use crate::correlations::correlation_tensor;
use crate::criteria::{
    evaluate_tensor, Competitor, CriterionReport, CriterionSpec, PartitionSpec,
    TripartiteCoefficients,
};
use crate::states::{NamedState, NoisyFamily};
use crate::{Error, Result};

/// Agreement required between a computed and a published threshold.
pub const THRESHOLD_MATCH: f64 = 5e-4;

/// Smallest bisection tolerance accepted.
pub const MIN_BISECTION_TOL: f64 = 1e-8;

/// Inclusive grid `start, start + step, …, stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            start: 0.0,
            stop: 1.0,
            step: 0.01,
        }
    }
}

impl Grid {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&start) || !(0.0..=1.0).contains(&stop) {
            return Err(Error::Input(format!(
                "grid {start}:{stop} must lie in [0, 1]"
            )));
        }
        if stop.partial_cmp(&start) != Some(Ordering::Greater)
            || step.partial_cmp(&0.0) != Some(Ordering::Greater)
        {
            return Err(Error::Input(format!(
                "grid needs start < stop and step > 0, got {start}:{stop}:{step}"
            )));
        }
        Ok(Self { start, stop, step })
    }

    /// `"a:b:step"`
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, step] = parts[..] else {
            return Err(Error::Input(format!(
                "grid must look like a:b:step, got `{s}`"
            )));
        };
        let num = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::Input(format!("bad grid value `{v}`")))
        };
        Self::new(num(a)?, num(b)?, num(step)?)
    }

    pub fn values(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        let mut out: Vec<f64> = (0..=n).map(|k| self.start + k as f64 * self.step).collect();
        if let Some(last) = out.last_mut() {
            if (*last - self.stop).abs() < 1e-9 * self.step.max(1.0) {
                *last = self.stop;
            } else if *last < self.stop {
                out.push(self.stop);
            }
        }
        out
    }
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

/// A family, the bases to expand it in and the criterion to apply.
#[derive(Debug, Clone)]
pub struct ScanSetup {
    pub family: NoisyFamily<f64>,
    pub bases: Vec<CoBasis<f64>>,
    pub criterion: CriterionSpec,
}

impl ScanSetup {
    pub fn evaluate(&self, x: f64) -> Result<CriterionReport> {
        let rho = self.family.evaluate(x)?;
        evaluate_tensor(&correlation_tensor(&rho, &self.bases)?, &self.criterion)
    }

    pub fn margin(&self, x: f64) -> Result<f64> {
        Ok(self.evaluate(x)?.margin)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Crossing {
    /// Detected above the threshold.
    Rising,
    /// Detected below the threshold.
    Falling,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub x: f64,
    /// Half-width of the final bisection bracket.
    pub tolerance: f64,
    pub crossing: Crossing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub x: f64,
    pub statistic: f64,
    pub bound: f64,
    pub margin: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub competitors: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub parameter: String,
    pub criterion: String,
    pub basis_labels: Vec<String>,
    pub competitors: Vec<Competitor>,
    pub points: Vec<ScanPoint>,
    /// First sign change of the margin on the grid, refined by bisection.
    pub threshold: Option<Threshold>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ScanResult {
    pub fn grid(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.x).collect()
    }

    /// Columns x, statistic, bound, margin, then one per competitor; values
    /// with 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = format!("{},statistic,bound,margin", self.parameter);
        for c in &self.competitors {
            let _ = write!(out, ",{}", c.name());
        }
        out.push('\n');
        for p in &self.points {
            let _ = write!(
                out,
                "{},{},{},{}",
                sig12(p.x),
                sig12(p.statistic),
                sig12(p.bound),
                sig12(p.margin)
            );
            for v in &p.competitors {
                let _ = write!(out, ",{}", sig12(*v));
            }
            out.push('\n');
        }
        out
    }
}

/// Fixed 12-significant-digit scientific formatting.
pub fn sig12(v: f64) -> String {
    format!("{v:.11e}")
}

/// Evaluates the margin over `grid` and bisects the first sign change down to `tol`.
pub fn scan(
    setup: &ScanSetup,
    grid: &Grid,
    tol: f64,
    competitors: &[Competitor],
) -> Result<ScanResult> {
    if tol
        .partial_cmp(&MIN_BISECTION_TOL)
        .is_none_or(Ordering::is_lt)
    {
        return Err(Error::Input(format!(
            "bisection tolerance must be at least {MIN_BISECTION_TOL:e}, got {tol:e}"
        )));
    }
    let mut points = Vec::new();
    for x in grid.values() {
        let r = setup.evaluate(x)?;
        points.push(ScanPoint {
            x,
            statistic: r.statistic,
            bound: r.bound,
            margin: r.margin,
            competitors: competitors.iter().map(|c| c.evaluate(x)).collect(),
        });
    }
    let detected = |m: f64| m > 0.0;
    let mut threshold = None;
    for w in points.windows(2) {
        if detected(w[0].margin) != detected(w[1].margin) {
            let crossing = if detected(w[1].margin) {
                Crossing::Rising
            } else {
                Crossing::Falling
            };
            let (mut lo, mut hi) = (w[0].x, w[1].x);
            let lo_detected = detected(w[0].margin);
            while (hi - lo) / 2.0 > tol {
                let mid = 0.5 * (lo + hi);
                if detected(setup.margin(mid)?) == lo_detected {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            threshold = Some(Threshold {
                x: 0.5 * (lo + hi),
                tolerance: (hi - lo) / 2.0,
                crossing,
            });
            break;
        }
    }
    let note = threshold
        .is_none()
        .then(|| "margin does not change sign on the grid; no threshold".to_string());
    Ok(ScanResult {
        parameter: NoisyFamily::<f64>::PARAMETER.to_string(),
        criterion: setup.criterion.id().to_string(),
        basis_labels: setup.bases.iter().map(|b| b.label().to_string()).collect(),
        competitors: competitors.to_vec(),
        points,
        threshold,
        note,
    })
}

/// One pinned configuration from the worked examples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExamplePin {
    pub example: u8,
    pub label: String,
    pub state: NamedState,
    pub bases: Vec<BuiltinBasis>,
    pub criterion: CriterionSpec,
    pub published_threshold: f64,
    pub crossing: Crossing,
    pub competitors: Vec<Competitor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ExamplePin {
    pub fn setup(&self) -> Result<ScanSetup> {
        Ok(ScanSetup {
            family: NoisyFamily::named(self.state),
            bases: self
                .bases
                .iter()
                .map(|b| CoBasis::builtin(*b))
                .collect::<Result<_>>()?,
            criterion: self.criterion.clone(),
        })
    }
}

/// The configurations behind examples 1 to 4.
pub fn example_pins(example: u8) -> Result<Vec<ExamplePin>> {
    use BuiltinBasis::*;
    let qubits = |n| vec![Construction1D2; n];
    let pins = match example {
        1 => vec![ExamplePin {
            example,
            label: "GHZ3 + noise, symmetric GME bound".into(),
            state: NamedState::Ghz3,
            bases: qubits(3),
            criterion: CriterionSpec::Corollary1 { c11: 1.0, c12: 0.0 },
            published_threshold: 0.1919,
            crossing: Crossing::Falling,
            competitors: vec![Competitor::G1],
            note: None,
        }],
        2 => vec![
            ExamplePin {
                example,
                label: "3x3x2 state, B^{3|12} with c3 = (0, 1)".into(),
                state: NamedState::Example2Phi,
                bases: vec![Construction2D3, Construction2D3, Construction2D2],
                criterion: CriterionSpec::theorem1(3, 0.0, 1.0),
                published_threshold: 0.496,
                crossing: Crossing::Rising,
                competitors: vec![],
                note: None,
            },
            ExamplePin {
                example,
                label: "3x3x2 state, GME with only c32 = 1".into(),
                state: NamedState::Example2Phi,
                bases: vec![Construction2D3, Construction2D3, Construction2D2],
                criterion: CriterionSpec::Theorem2 {
                    coefficients: TripartiteCoefficients::from_slice(&[
                        0.0, 0.0, 0.0, 0.0, 0.0, 1.0,
                    ])?,
                },
                published_threshold: 0.7152,
                crossing: Crossing::Rising,
                competitors: vec![],
                note: Some(
                    "with a single active partition the averaged test is ‖B^{3|12}‖_tr > √(2/9)"
                        .into(),
                ),
            },
        ],
        3 => vec![
            ExamplePin {
                example,
                label: "GHZ4 + noise, 1|234".into(),
                state: NamedState::Ghz4,
                bases: qubits(4),
                criterion: CriterionSpec::Theorem4i { l1: 1 },
                published_threshold: 0.4545,
                crossing: Crossing::Rising,
                competitors: vec![Competitor::G3],
                note: None,
            },
            ExamplePin {
                example,
                label: "GHZ4 + noise, 12|34".into(),
                state: NamedState::Ghz4,
                bases: qubits(4),
                criterion: CriterionSpec::Theorem4ii {
                    partition: PartitionSpec::parse("12|34")?,
                },
                published_threshold: 0.4602,
                crossing: Crossing::Rising,
                competitors: vec![Competitor::G4],
                note: None,
            },
        ],
        4 => vec![ExamplePin {
            example,
            label: "W4 + noise, 1|234".into(),
            state: NamedState::W4,
            bases: qubits(4),
            criterion: CriterionSpec::Theorem4i { l1: 1 },
            published_threshold: 0.4891,
            crossing: Crossing::Rising,
            competitors: vec![Competitor::G5],
            note: None,
        }],
        _ => return Err(Error::Input(format!("no example {example}; choose 1 to 4"))),
    };
    Ok(pins)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReproductionRow {
    pub example: u8,
    pub label: String,
    pub criterion: String,
    pub published: f64,
    pub computed: Option<f64>,
    pub difference: Option<f64>,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Scans every pin of `example` on `grid` and compares thresholds at
/// [`THRESHOLD_MATCH`].
pub fn reproduce(example: u8, grid: &Grid, tol: f64) -> Result<Vec<ReproductionRow>> {
    example_pins(example)?
        .into_iter()
        .map(|pin| {
            let result = scan(&pin.setup()?, grid, tol, &[])?;
            let computed = result.threshold.map(|t| t.x);
            let difference = computed.map(|x| x - pin.published_threshold);
            let crossing_ok = result.threshold.is_some_and(|t| t.crossing == pin.crossing);
            Ok(ReproductionRow {
                example,
                label: pin.label,
                criterion: pin.criterion.id().to_string(),
                published: pin.published_threshold,
                computed,
                difference,
                passed: crossing_ok && difference.is_some_and(|d| d.abs() <= THRESHOLD_MATCH),
                note: pin.note.or(result.note),
            })
        })
        .collect()
}
