//! Seeded samplers for separable state classes and brute-force checks.
//!
//! Every sample is drawn from its own ChaCha8 stream (`seed`, stream =
//! sample index), so sample `k` does not depend on how many came before it.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Complex, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::cob::CoBasis;
use crate::correlations::{correlation_tensor, CorrelationTensor};
use crate::criteria::{evaluate_tensor, CriterionSpec, PartitionSpec};
use crate::numerics::{kron, trace_of_product, CMatrix};
use crate::states::DensityMatrix;
use crate::{Error, Result};

/// Margin above which a sample counts as a bound violation.
pub const SOUNDNESS_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleFamily {
    /// Haar-random pure state on the whole system.
    HaarPure,
    /// Convex mixture of Haar-random pure states.
    MixedConvex,
    /// Pure product of Haar-random factors, one per group (per party if no
    /// partition is given).
    ProductPure,
    /// Mixture of pure products across a bipartition. Without a partition
    /// each term picks a bipartition at random.
    BiseparableMixture,
    /// Mixture of pure products over the groups of the given partition.
    KSeparableMixture,
}

impl SampleFamily {
    pub const ALL: [SampleFamily; 5] = [
        SampleFamily::HaarPure,
        SampleFamily::MixedConvex,
        SampleFamily::ProductPure,
        SampleFamily::BiseparableMixture,
        SampleFamily::KSeparableMixture,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SampleFamily::HaarPure => "haar_pure",
            SampleFamily::MixedConvex => "mixed_convex",
            SampleFamily::ProductPure => "product_pure",
            SampleFamily::BiseparableMixture => "biseparable_mixture",
            SampleFamily::KSeparableMixture => "k_separable_mixture",
        }
    }
}

impl fmt::Display for SampleFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SampleFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SampleFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::UnknownName(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub seed: u64,
    pub count: usize,
    pub dims: Vec<usize>,
    pub family: SampleFamily,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<PartitionSpec>,
    /// Upper limit on mixture terms; the actual count is uniform in 1..=max_terms.
    #[serde(default = "default_max_terms")]
    pub max_terms: usize,
    /// Average each sample over all permutations of the parties.
    #[serde(default)]
    pub symmetrize: bool,
}

fn default_max_terms() -> usize {
    8
}

impl SamplerConfig {
    pub fn new(seed: u64, count: usize, dims: Vec<usize>, family: SampleFamily) -> Self {
        Self {
            seed,
            count,
            dims,
            family,
            partition: None,
            max_terms: default_max_terms(),
            symmetrize: false,
        }
    }

    pub fn with_partition(mut self, partition: PartitionSpec) -> Self {
        self.partition = Some(partition);
        self
    }

    pub fn symmetrized(mut self) -> Self {
        self.symmetrize = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.count == 0 || self.max_terms == 0 {
            return Err(Error::Input(
                "count and max_terms must be at least 1".into(),
            ));
        }
        if self.dims.is_empty() || self.dims.iter().any(|&d| d < 2) {
            return Err(Error::Input(format!("bad dims {:?}", self.dims)));
        }
        if let Some(p) = &self.partition {
            if p.party_count() != self.dims.len() {
                return Err(Error::Input(format!(
                    "partition `{p}` does not match {} parties",
                    self.dims.len()
                )));
            }
        }
        match (self.family, &self.partition) {
            (SampleFamily::KSeparableMixture, None) => {
                Err(Error::Input("k_separable_mixture needs a partition".into()))
            }
            (SampleFamily::BiseparableMixture, Some(p)) if p.groups().len() != 2 => {
                Err(Error::Input(format!(
                    "biseparable_mixture needs a bipartition, got `{p}`"
                )))
            }
            (SampleFamily::BiseparableMixture, None) if self.dims.len() < 2 => Err(Error::Input(
                "biseparable_mixture needs at least two parties".into(),
            )),
            (SampleFamily::HaarPure | SampleFamily::MixedConvex, Some(_)) => {
                Err(Error::Input(format!("{} takes no partition", self.family)))
            }
            _ => Ok(()),
        }?;
        if self.symmetrize && self.dims.iter().any(|&d| d != self.dims[0]) {
            return Err(Error::Input(
                "symmetrizing needs equal local dimensions".into(),
            ));
        }
        Ok(())
    }
}

fn rng_for(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Normalised complex Gaussian vector of length `n`.
pub fn haar_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DVector<Complex<f64>> {
    let v = DVector::from_fn(n, |_, _| {
        Complex::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    let norm = v.norm();
    v.unscale(norm)
}

fn pure_from_vector(v: &DVector<Complex<f64>>, dims: Vec<usize>) -> Result<DensityMatrix<f64>> {
    DensityMatrix::pure(v.as_slice(), dims)
}

/// Pure product over `groups`, returned in the original party order.
fn product_over<R: Rng + ?Sized>(
    dims: &[usize],
    groups: &[Vec<usize>],
    rng: &mut R,
) -> Result<DensityMatrix<f64>> {
    let mut order = Vec::with_capacity(dims.len());
    let mut state: Option<DensityMatrix<f64>> = None;
    for g in groups {
        let gdims: Vec<usize> = g.iter().map(|&l| dims[l - 1]).collect();
        let n = gdims.iter().product();
        let factor = pure_from_vector(&haar_vector(n, rng), gdims)?;
        state = Some(match state {
            None => factor,
            Some(s) => s.tensor(&factor),
        });
        order.extend(g.iter().map(|l| l - 1));
    }
    let state = state.expect("at least one group");
    // `order[i]` is the original party now sitting at position i; invert it.
    let mut inverse = vec![0; order.len()];
    for (pos, &party) in order.iter().enumerate() {
        inverse[party] = pos;
    }
    state.permute_parties(&inverse)
}

/// All bipartitions S|S̄ of `1..=n` with party 1 in S.
fn bipartitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    (0..(1usize << (n - 1)) - 1)
        .map(|mask| {
            let mut left = vec![1];
            let mut right = vec![];
            for l in 2..=n {
                if mask >> (l - 2) & 1 == 1 {
                    left.push(l);
                } else {
                    right.push(l);
                }
            }
            vec![left, right]
        })
        .collect()
}

fn convex_weights<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

/// Σ_π P_π ρ P_π† / n! over all party permutations.
pub fn symmetrize(rho: &DensityMatrix<f64>) -> Result<DensityMatrix<f64>> {
    let n = rho.party_count();
    let mut perms = vec![(0..n).collect::<Vec<_>>()];
    // Heap's algorithm, iterative.
    let mut c = vec![0; n];
    let mut current: Vec<usize> = (0..n).collect();
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                current.swap(0, i);
            } else {
                current.swap(c[i], i);
            }
            perms.push(current.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    let weight = 1.0 / perms.len() as f64;
    let permuted: Vec<DensityMatrix<f64>> = perms
        .iter()
        .map(|p| rho.permute_parties(p))
        .collect::<Result<_>>()?;
    let terms: Vec<(f64, &DensityMatrix<f64>)> = permuted.iter().map(|r| (weight, r)).collect();
    DensityMatrix::mixture(&terms)
}

/// Sample `index` of the configured family.
pub fn sample_state(cfg: &SamplerConfig, index: usize) -> Result<DensityMatrix<f64>> {
    cfg.validate()?;
    let mut rng = rng_for(cfg.seed, index);
    let dims = &cfg.dims;
    let total: usize = dims.iter().product();
    let singletons: Vec<Vec<usize>> = (1..=dims.len()).map(|l| vec![l]).collect();
    let terms = |rng: &mut ChaCha8Rng| {
        if cfg.max_terms == 1 {
            1
        } else {
            rng.random_range(1..=cfg.max_terms)
        }
    };
    let state = match cfg.family {
        SampleFamily::HaarPure => pure_from_vector(&haar_vector(total, &mut rng), dims.clone())?,
        SampleFamily::ProductPure => {
            let groups = cfg
                .partition
                .as_ref()
                .map_or(&singletons[..], |p| p.groups());
            product_over(dims, groups, &mut rng)?
        }
        SampleFamily::MixedConvex => {
            let k = terms(&mut rng);
            let states = (0..k)
                .map(|_| pure_from_vector(&haar_vector(total, &mut rng), dims.clone()))
                .collect::<Result<Vec<_>>>()?;
            mix(&states, &mut rng)?
        }
        SampleFamily::BiseparableMixture | SampleFamily::KSeparableMixture => {
            let k = terms(&mut rng);
            let all = bipartitions(dims.len());
            let states = (0..k)
                .map(|_| match &cfg.partition {
                    Some(p) => product_over(dims, p.groups(), &mut rng),
                    None => {
                        let pick = rng.random_range(0..all.len());
                        product_over(dims, &all[pick], &mut rng)
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            mix(&states, &mut rng)?
        }
    };
    if cfg.symmetrize {
        symmetrize(&state)
    } else {
        Ok(state)
    }
}

fn mix(states: &[DensityMatrix<f64>], rng: &mut ChaCha8Rng) -> Result<DensityMatrix<f64>> {
    let weights = convex_weights(states.len(), rng);
    let terms: Vec<(f64, &DensityMatrix<f64>)> = weights.into_iter().zip(states).collect();
    DensityMatrix::mixture(&terms)
}

/// All `cfg.count` samples in index order.
pub fn sample_states(cfg: &SamplerConfig) -> Result<Vec<DensityMatrix<f64>>> {
    (0..cfg.count).map(|k| sample_state(cfg, k)).collect()
}

/// Outcome of running one criterion over a sampled separable class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub seed: u64,
    pub config: SamplerConfig,
    pub criterion: CriterionSpec,
    pub basis_labels: Vec<String>,
    pub samples: usize,
    pub max_margin: f64,
    pub max_margin_index: usize,
    pub positive_margins: usize,
    pub tolerance: f64,
    pub violating_indices: Vec<usize>,
    pub passed: bool,
}

/// Evaluates `spec` on every sample; any margin above
/// [`SOUNDNESS_TOLERANCE`] is a violation.
pub fn verify_bound_suite(
    cfg: &SamplerConfig,
    bases: &[CoBasis<f64>],
    spec: &CriterionSpec,
) -> Result<ViolationReport> {
    cfg.validate()?;
    let mut max_margin = f64::NEG_INFINITY;
    let mut max_margin_index = 0;
    let mut positive_margins = 0;
    let mut violating_indices = vec![];
    for k in 0..cfg.count {
        let rho = sample_state(cfg, k)?;
        let report = evaluate_tensor(&correlation_tensor(&rho, bases)?, spec)?;
        if report.margin > max_margin {
            max_margin = report.margin;
            max_margin_index = k;
        }
        if report.margin > 0.0 {
            positive_margins += 1;
        }
        if report.margin > SOUNDNESS_TOLERANCE {
            violating_indices.push(k);
        }
    }
    Ok(ViolationReport {
        seed: cfg.seed,
        config: cfg.clone(),
        criterion: spec.clone(),
        basis_labels: bases.iter().map(|b| b.label().to_string()).collect(),
        samples: cfg.count,
        max_margin,
        max_margin_index,
        positive_margins,
        tolerance: SOUNDNESS_TOLERANCE,
        passed: violating_indices.is_empty(),
        violating_indices,
    })
}

/// Default bases for `dims`, see [`CoBasis::default_for`].
pub fn default_bases(dims: &[usize]) -> Result<Vec<CoBasis<f64>>> {
    dims.iter().map(|&d| CoBasis::default_for(d)).collect()
}

/// μ by forming every A⊗⋯⊗A explicitly and tracing against ρ.
pub fn correlation_tensor_bruteforce(
    rho: &DensityMatrix<f64>,
    bases: &[CoBasis<f64>],
) -> Result<CorrelationTensor<f64>> {
    if bases.len() != rho.party_count() {
        return Err(Error::Dimension("one basis per party".into()));
    }
    fn rec(rho: &CMatrix<f64>, bases: &[CoBasis<f64>], acc: CMatrix<f64>, out: &mut Vec<f64>) {
        match bases.split_first() {
            None => out.push(trace_of_product(rho, &acc).re),
            Some((b, rest)) => {
                for a in b.operators() {
                    rec(rho, rest, kron(&acc, a), out);
                }
            }
        }
    }
    let mut values = vec![];
    rec(rho.matrix(), bases, CMatrix::identity(1, 1), &mut values);
    CorrelationTensor::from_values(
        rho.dims().to_vec(),
        bases.iter().map(|b| b.label().to_string()).collect(),
        values,
    )
}

/// Partial trace keeping only `party` (zero-based), by direct summation.
pub fn reduced_state(rho: &DensityMatrix<f64>, party: usize) -> CMatrix<f64> {
    let dims = rho.dims();
    let d = dims[party];
    let inner: usize = dims[party + 1..].iter().product();
    let outer: usize = dims[..party].iter().product();
    let mut out = CMatrix::zeros(d, d);
    for a in 0..d {
        for b in 0..d {
            let mut acc = Complex::new(0.0, 0.0);
            for o in 0..outer {
                for i in 0..inner {
                    let r = (o * d + a) * inner + i;
                    let c = (o * d + b) * inner + i;
                    acc += rho.matrix()[(r, c)];
                }
            }
            out[(a, b)] = acc;
        }
    }
    out
}
