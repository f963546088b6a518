//! Criterion matrices, separability bounds and verdicts.
//!
//! Party labels are 1-based throughout this module, matching the way
//! partitions are written (`"12|34"`); basis indices α stay zero-based.

mod bounds;
mod evaluate;
mod matrices;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use bounds::{corollary1_bound, gme_bound, theorem1_bounds, theorem3_bound, theorem4ii_bound};
pub use evaluate::{
    evaluate_criterion, evaluate_tensor, gme_norms, gme_statistic, BoundTerm, CriterionReport,
    CriterionSpec, PartitionNorm, Verdict, BORDERLINE_MARGIN,
};
pub use matrices::{b_matrix_mode1, b_matrix_partition, b_matrix_tripartite, unfold};

/// Disjoint groups of party labels covering `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PartitionSpec {
    n: usize,
    groups: Vec<Vec<usize>>,
}

impl PartitionSpec {
    pub fn new(groups: Vec<Vec<usize>>) -> Result<Self> {
        let n: usize = groups.iter().map(Vec::len).sum();
        let mut seen = vec![false; n + 1];
        for g in &groups {
            if g.is_empty() {
                return Err(Error::Input("partition has an empty group".into()));
            }
            for &l in g {
                if l == 0 || l > n || std::mem::replace(&mut seen[l], true) {
                    return Err(Error::Input(format!(
                        "partition groups {groups:?} do not cover 1..={n} exactly once"
                    )));
                }
            }
        }
        Ok(Self { n, groups })
    }

    /// `"12|34"` (one digit per label) or `"1,2|3,4"`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let groups = s
            .split('|')
            .map(|g| {
                let g = g.trim();
                let labels: std::result::Result<Vec<usize>, _> = if g.contains(',') {
                    g.split(',').map(|l| l.trim().parse::<usize>()).collect()
                } else {
                    g.chars().map(|c| c.to_string().parse::<usize>()).collect()
                };
                labels.map_err(|_| Error::Input(format!("bad partition string `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(groups)
    }

    /// `{l}` against everything else, in ascending order.
    pub fn single(l: usize, n: usize) -> Result<Self> {
        if l == 0 || l > n {
            return Err(Error::Input(format!("party {l} outside 1..={n}")));
        }
        Self::new(vec![vec![l], (1..=n).filter(|&k| k != l).collect()])
    }

    pub fn party_count(&self) -> usize {
        self.n
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    /// The final label of the final group.
    pub fn last_label(&self) -> usize {
        *self
            .groups
            .last()
            .and_then(|g| g.last())
            .expect("groups are nonempty")
    }

    /// Which group each label belongs to, indexed by label − 1.
    pub fn group_of(&self) -> Vec<usize> {
        let mut out = vec![0; self.n];
        for (gi, g) in self.groups.iter().enumerate() {
            for &l in g {
                out[l - 1] = gi;
            }
        }
        out
    }
}

impl fmt::Display for PartitionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let comma = self.n > 9;
        let parts: Vec<String> = self
            .groups
            .iter()
            .map(|g| {
                let labels: Vec<String> = g.iter().map(usize::to_string).collect();
                labels.join(if comma { "," } else { "" })
            })
            .collect();
        f.write_str(&parts.join("|"))
    }
}

impl FromStr for PartitionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl TryFrom<String> for PartitionSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        Self::parse(&s)
    }
}

impl From<PartitionSpec> for String {
    fn from(p: PartitionSpec) -> String {
        p.to_string()
    }
}

/// (c_f1, c_f2) for each of the three parties of a tripartite criterion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripartiteCoefficients {
    pub c11: f64,
    pub c12: f64,
    pub c21: f64,
    pub c22: f64,
    pub c31: f64,
    pub c32: f64,
}

impl Default for TripartiteCoefficients {
    fn default() -> Self {
        Self::uniform(1.0, 0.0)
    }
}

impl TripartiteCoefficients {
    pub fn uniform(c1: f64, c2: f64) -> Self {
        Self {
            c11: c1,
            c12: c2,
            c21: c1,
            c22: c2,
            c31: c1,
            c32: c2,
        }
    }

    pub fn from_slice(c: &[f64]) -> Result<Self> {
        let [c11, c12, c21, c22, c31, c32] = c else {
            return Err(Error::Input(format!(
                "need 6 coefficients, got {}",
                c.len()
            )));
        };
        let out = Self {
            c11: *c11,
            c12: *c12,
            c21: *c21,
            c22: *c22,
            c31: *c31,
            c32: *c32,
        };
        if !out.to_array().iter().all(|c| c.is_finite()) {
            return Err(Error::Input("coefficients must be finite".into()));
        }
        Ok(out)
    }

    /// `"c11,c12,c21,c22,c31,c32"`
    pub fn parse(s: &str) -> Result<Self> {
        let values = s
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Input(format!("bad coefficient `{v}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_slice(&values)
    }

    pub fn to_array(&self) -> [f64; 6] {
        [self.c11, self.c12, self.c21, self.c22, self.c31, self.c32]
    }

    /// (c_f1, c_f2) for party `f` ∈ {1, 2, 3}.
    pub fn for_party(&self, f: usize) -> (f64, f64) {
        match f {
            1 => (self.c11, self.c12),
            2 => (self.c21, self.c22),
            3 => (self.c31, self.c32),
            _ => panic!("party label {f} outside 1..=3"),
        }
    }
}

/// Earlier criteria from the literature, kept for side-by-side comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Competitor {
    /// 2 − 2x − √3, GHZ₃ family
    G1,
    /// 9x² − 4, GHZ₄ family
    G3,
    /// √(1+x²) + 2√2x + (x−x²)/(1+x²) − 4, GHZ₄ family
    G4,
    /// (4+2x²)/(2√(4+x²)) + x − 2, W₄ family
    G5,
}

impl Competitor {
    pub const ALL: [Competitor; 4] = [
        Competitor::G1,
        Competitor::G3,
        Competitor::G4,
        Competitor::G5,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Competitor::G1 => "g1",
            Competitor::G3 => "g3",
            Competitor::G4 => "g4",
            Competitor::G5 => "g5",
        }
    }

    pub fn evaluate(self, x: f64) -> f64 {
        match self {
            Competitor::G1 => 2.0 - 2.0 * x - 3f64.sqrt(),
            Competitor::G3 => 9.0 * x * x - 4.0,
            Competitor::G4 => {
                let s = 1.0 + x * x;
                s.sqrt() + 2.0 * 2f64.sqrt() * x + (x - x * x) / s - 4.0
            }
            Competitor::G5 => (4.0 + 2.0 * x * x) / (2.0 * (4.0 + x * x).sqrt()) + x - 2.0,
        }
    }
}

impl FromStr for Competitor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Competitor::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::UnknownName(s.to_string()))
    }
}

pub fn competitor_curve(name: Competitor, x: f64) -> f64 {
    name.evaluate(x)
}
