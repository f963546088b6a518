//! Entanglement detection for multipartite states from correlation tensors in
//! complete orthogonal bases (COBs).
//!
//! The numerical core is generic over the real scalar (`f32` or `f64`); the
//! aliases below fix it to `f64`, which is what the samplers, scans and CLI use.
//!
//! ```
//! use cobdetect::{evaluate_criterion, BuiltinBasis, COBasis, CriterionSpec, NamedState, NoisyFamily};
//!
//! let qubit = COBasis::builtin(BuiltinBasis::Construction1D2).unwrap();
//! let rho = NoisyFamily::named(NamedState::W4).evaluate(0.6).unwrap();
//! let report = evaluate_criterion(&rho, &[&qubit, &qubit, &qubit, &qubit], &CriterionSpec::Theorem4i { l1: 1 }).unwrap();
//! assert!(report.detected());
//! ```

pub mod cob;
pub mod correlations;
pub mod criteria;
pub mod error;
pub mod numerics;
pub mod oracle;
pub mod scalar;
pub mod scan;
pub mod states;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use cob::{validate_cob, BuiltinBasis, ValidationReport};
pub use criteria::{
    evaluate_criterion, evaluate_tensor, Competitor, CriterionReport, CriterionSpec, PartitionSpec,
    TripartiteCoefficients, Verdict,
};
pub use oracle::{SampleFamily, SamplerConfig, ViolationReport};
pub use scan::{Grid, ScanResult};
pub use states::{NamedState, Orientation};

pub type ComplexMatrix = numerics::CMatrix<f64>;
pub type RealMatrix = numerics::RMatrix<f64>;
pub type COBasis = cob::CoBasis<f64>;
pub type Gsicm = cob::Gsicm<f64>;
pub type DensityMatrix = states::DensityMatrix<f64>;
pub type NoisyFamily = states::NoisyFamily<f64>;
pub type CorrelationTensor = correlations::CorrelationTensor<f64>;
