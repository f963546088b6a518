use std::borrow::Borrow;

use serde::{Deserialize, Serialize};

use crate::cob::CoBasis;
use crate::correlations::{correlation_tensor, CorrelationTensor};
use crate::numerics::trace_norm;
use crate::states::DensityMatrix;
use crate::{Error, Result, Scalar};

use super::bounds::{gme_q_values, others};
use super::{
    b_matrix_mode1, b_matrix_partition, b_matrix_tripartite, corollary1_bound, theorem1_bounds,
    theorem3_bound, theorem4ii_bound, PartitionSpec, TripartiteCoefficients,
};

/// Margins this close to zero are reported as borderline and never as a detection.
pub const BORDERLINE_MARGIN: f64 = 1e-9;

/// Which separability test to run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "criterion", rename_all = "snake_case")]
pub enum CriterionSpec {
    /// ‖B^{f|gh}‖_tr against the bound for pure states separable with
    /// `separable` split from the other two parties.
    Theorem1 {
        party: usize,
        c1: f64,
        c2: f64,
        separable: usize,
    },
    /// Mean of the three tripartite norms against (Q₁ + Q₂ + Q₃)/3.
    Theorem2 {
        coefficients: TripartiteCoefficients,
    },
    /// The [`CriterionSpec::Theorem2`] statistic with equal coefficients and equal local
    /// dimensions, against the tighter symmetric bound.
    Corollary1 { c11: f64, c12: f64 },
    /// ‖B^{1|2|⋯|n}‖_tr against √(1/Π dᵢ).
    Theorem3,
    /// ‖B^{l₁|rest}‖_tr against √(1/Π dᵢ).
    Theorem4i { l1: usize },
    /// Partition matrix against √(1/Π_{i≠l_n} dᵢ).
    Theorem4ii { partition: PartitionSpec },
}

impl CriterionSpec {
    pub fn id(&self) -> &'static str {
        match self {
            CriterionSpec::Theorem1 { .. } => "thm1",
            CriterionSpec::Theorem2 { .. } => "thm2",
            CriterionSpec::Corollary1 { .. } => "cor1",
            CriterionSpec::Theorem3 => "thm3",
            CriterionSpec::Theorem4i { .. } => "thm4i",
            CriterionSpec::Theorem4ii { .. } => "thm4ii",
        }
    }

    /// [`CriterionSpec::Theorem1`] in its plain form: separable under f|gh.
    pub fn theorem1(party: usize, c1: f64, c2: f64) -> Self {
        CriterionSpec::Theorem1 {
            party,
            c1,
            c2,
            separable: party,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    EntanglementDetected,
    Inconclusive,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::EntanglementDetected => "entanglement_detected",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionNorm {
    pub partition: String,
    pub trace_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundTerm {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub criterion: String,
    /// What a detection establishes.
    pub claim: String,
    pub dims: Vec<usize>,
    pub basis_labels: Vec<String>,
    pub coefficients: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<String>,
    pub norms: Vec<PartitionNorm>,
    pub bounds: Vec<BoundTerm>,
    pub statistic: f64,
    pub bound: f64,
    pub margin: f64,
    pub verdict: Verdict,
    pub borderline: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CriterionReport {
    pub fn detected(&self) -> bool {
        self.verdict == Verdict::EntanglementDetected
    }
}

fn tripartite_name(f: usize) -> String {
    let (g, h) = others(f);
    format!("{f}|{g}{h}")
}

fn tripartite_dims(dims: &[usize]) -> Result<[usize; 3]> {
    dims.try_into().map_err(|_| {
        Error::Dimension(format!(
            "tripartite criterion needs 3 parties, got {}",
            dims.len()
        ))
    })
}

/// The three norms ‖B^{1|23}‖, ‖B^{2|13}‖, ‖B^{3|12}‖.
pub fn gme_norms<T: Scalar>(
    t: &CorrelationTensor<T>,
    c: &TripartiteCoefficients,
) -> Result<[T; 3]> {
    tripartite_dims(t.dims())?;
    let mut out = [T::zero(); 3];
    for (f, slot) in (1..=3).zip(out.iter_mut()) {
        let (c1, c2) = c.for_party(f);
        if c1 == 0.0 && c2 == 0.0 {
            continue;
        }
        *slot = trace_norm(&b_matrix_tripartite(t, f, T::of(c1), T::of(c2))?);
    }
    Ok(out)
}

/// B(ρ), the mean of the three tripartite norms.
pub fn gme_statistic<T: Scalar>(t: &CorrelationTensor<T>, c: &TripartiteCoefficients) -> Result<T> {
    let [a, b, d] = gme_norms(t, c)?;
    Ok((a + b + d) / T::of(3.0))
}

/// Computes the tensor of `rho` and evaluates `spec` on it.
pub fn evaluate_criterion<T: Scalar, B: Borrow<CoBasis<T>>>(
    rho: &DensityMatrix<T>,
    bases: &[B],
    spec: &CriterionSpec,
) -> Result<CriterionReport> {
    evaluate_tensor(&correlation_tensor(rho, bases)?, spec)
}

pub fn evaluate_tensor<T: Scalar>(
    t: &CorrelationTensor<T>,
    spec: &CriterionSpec,
) -> Result<CriterionReport> {
    let dims = t.dims().to_vec();
    let mut partition = None;
    let mut note = None;
    let mut coefficients = vec![];
    let (claim, norms, bounds, statistic, bound) = match spec {
        CriterionSpec::Theorem1 {
            party,
            c1,
            c2,
            separable,
        } => {
            let d3 = tripartite_dims(&dims)?;
            let all = theorem1_bounds(d3, *party, *c1, *c2)?;
            let (g, h) = others(*party);
            let case = if separable == party {
                0
            } else if *separable == g {
                1
            } else if *separable == h {
                2
            } else {
                return Err(Error::Input(format!(
                    "separable party {separable} outside 1..=3"
                )));
            };
            coefficients = vec![*c1, *c2];
            let name = tripartite_name(*party);
            let split = tripartite_name(*separable);
            partition = Some(split.clone());
            let norm =
                trace_norm(&b_matrix_tripartite(t, *party, T::of(*c1), T::of(*c2))?).as_f64();
            let bounds = ["(i)", "(ii)", "(iii)"]
                .iter()
                .zip(all)
                .map(|(n, v)| BoundTerm {
                    name: n.to_string(),
                    value: v,
                })
                .collect();
            (
                format!("not separable under {split}"),
                vec![PartitionNorm {
                    partition: name,
                    trace_norm: norm,
                }],
                bounds,
                norm,
                all[case],
            )
        }
        CriterionSpec::Theorem2 { coefficients: c } => {
            let d3 = tripartite_dims(&dims)?;
            coefficients = c.to_array().to_vec();
            let norms = gme_norms(t, c)?.map(|v| v.as_f64());
            let q = gme_q_values(d3, c)?;
            let active: Vec<usize> = (1..=3)
                .filter(|&f| {
                    let (a, b) = c.for_party(f);
                    a != 0.0 || b != 0.0
                })
                .collect();
            if let [f] = active[..] {
                note = Some(format!(
                    "only B^{{{}}} is active, so the averaged test is the same as ‖B^{{{}}}‖_tr > Q{f} = {:.6}",
                    tripartite_name(f),
                    tripartite_name(f),
                    q[f - 1]
                ));
            }
            (
                "genuinely tripartite entangled".to_string(),
                tripartite_norms(norms),
                (1..=3)
                    .map(|f| BoundTerm {
                        name: format!("Q{f}"),
                        value: q[f - 1],
                    })
                    .collect(),
                norms.iter().sum::<f64>() / 3.0,
                q.iter().sum::<f64>() / 3.0,
            )
        }
        CriterionSpec::Corollary1 { c11, c12 } => {
            let d3 = tripartite_dims(&dims)?;
            if d3[0] != d3[1] || d3[1] != d3[2] {
                return Err(Error::Dimension(format!(
                    "the symmetric bound needs equal local dimensions, got {d3:?}"
                )));
            }
            let c = TripartiteCoefficients::uniform(*c11, *c12);
            coefficients = c.to_array().to_vec();
            let bound = corollary1_bound(d3[0], *c11, *c12)?;
            let norms = gme_norms(t, &c)?.map(|v| v.as_f64());
            (
                "genuinely tripartite entangled".to_string(),
                tripartite_norms(norms),
                vec![BoundTerm {
                    name: "symmetric".into(),
                    value: bound,
                }],
                norms.iter().sum::<f64>() / 3.0,
                bound,
            )
        }
        CriterionSpec::Theorem3 => {
            let name = (1..=dims.len())
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
                .join("|");
            single_matrix(
                "not fully separable".to_string(),
                name,
                trace_norm(&b_matrix_mode1(t, 1)?).as_f64(),
                theorem3_bound(&dims),
            )
        }
        CriterionSpec::Theorem4i { l1 } => {
            let p = PartitionSpec::single(*l1, dims.len())?;
            partition = Some(p.to_string());
            single_matrix(
                format!("not separable under {p}"),
                p.to_string(),
                trace_norm(&b_matrix_mode1(t, *l1)?).as_f64(),
                theorem3_bound(&dims),
            )
        }
        CriterionSpec::Theorem4ii { partition: p } => {
            partition = Some(p.to_string());
            single_matrix(
                format!("not separable under {p}"),
                p.to_string(),
                trace_norm(&b_matrix_partition(t, p)?).as_f64(),
                theorem4ii_bound(&dims, p)?,
            )
        }
    };
    let margin = statistic - bound;
    let borderline = margin.abs() <= BORDERLINE_MARGIN;
    let verdict = if margin > 0.0 && !borderline {
        Verdict::EntanglementDetected
    } else {
        Verdict::Inconclusive
    };
    Ok(CriterionReport {
        criterion: spec.id().to_string(),
        claim,
        dims,
        basis_labels: t.basis_labels().to_vec(),
        coefficients,
        partition,
        norms,
        bounds,
        statistic,
        bound,
        margin,
        verdict,
        borderline,
        note,
    })
}

fn tripartite_norms(norms: [f64; 3]) -> Vec<PartitionNorm> {
    (1..=3)
        .map(|f| PartitionNorm {
            partition: tripartite_name(f),
            trace_norm: norms[f - 1],
        })
        .collect()
}

fn single_matrix(
    claim: String,
    name: String,
    norm: f64,
    bound: f64,
) -> (String, Vec<PartitionNorm>, Vec<BoundTerm>, f64, f64) {
    (
        claim,
        vec![PartitionNorm {
            partition: name.clone(),
            trace_norm: norm,
        }],
        vec![BoundTerm { name, value: bound }],
        norm,
        bound,
    )
}
