//! Complete orthogonal bases (COBs): `d²` Hermitian operators with
//! `Tr(A_α A_β) = δ_αβ / d` and `Σ_α A_α = 𝕀`, plus the bridge to general
//! symmetric informationally complete measurements (GSICMs).

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use nalgebra::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::numerics::{
    complex_identity, hermitian_eigenvalues, hermitian_residual, real_part, trace,
    trace_of_product, CMatrix, IMAGINARY_TOLERANCE,
};
use crate::{Error, Result, Scalar};

/// Tolerance every basis must meet on construction or load.
pub const BASIS_TOLERANCE: f64 = 1e-10;

/// The bases shipped with the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BuiltinBasis {
    /// Qubit basis of the first construction.
    #[serde(rename = "construction1-d2")]
    Construction1D2,
    /// Qubit basis of the second construction.
    #[serde(rename = "construction2-d2")]
    Construction2D2,
    /// Qutrit basis of the second construction.
    #[serde(rename = "construction2-d3")]
    Construction2D3,
}

impl BuiltinBasis {
    pub const ALL: [BuiltinBasis; 3] = [
        BuiltinBasis::Construction1D2,
        BuiltinBasis::Construction2D2,
        BuiltinBasis::Construction2D3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BuiltinBasis::Construction1D2 => "construction1-d2",
            BuiltinBasis::Construction2D2 => "construction2-d2",
            BuiltinBasis::Construction2D3 => "construction2-d3",
        }
    }

    pub fn dim(self) -> usize {
        match self {
            BuiltinBasis::Construction1D2 | BuiltinBasis::Construction2D2 => 2,
            BuiltinBasis::Construction2D3 => 3,
        }
    }

    /// The operators exactly as tabulated, evaluated in double precision.
    pub fn operators<T: Scalar>(self) -> Vec<CMatrix<T>> {
        let raw = match self {
            BuiltinBasis::Construction1D2 => construction1_d2(),
            BuiltinBasis::Construction2D2 => construction2_d2(),
            BuiltinBasis::Construction2D3 => construction2_d3(),
        };
        let d = self.dim();
        raw.into_iter()
            .map(|entries| {
                CMatrix::from_row_iterator(
                    d,
                    d,
                    entries
                        .into_iter()
                        .map(|(re, im)| Complex::new(T::of(re), T::of(im))),
                )
            })
            .collect()
    }
}

impl fmt::Display for BuiltinBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BuiltinBasis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BuiltinBasis::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::UnknownName(s.to_string()))
    }
}

type Entry = (f64, f64);

fn construction1_d2() -> Vec<Vec<Entry>> {
    let q = 0.25;
    vec![
        vec![(0.5, 0.0), (q, -q), (q, q), (0.0, 0.0)],
        vec![(0.0, 0.0), (-q, -q), (-q, q), (0.5, 0.0)],
        vec![(0.0, 0.0), (q, q), (q, -q), (0.5, 0.0)],
        vec![(0.5, 0.0), (-q, q), (-q, -q), (0.0, 0.0)],
    ]
}

fn construction2_d2() -> Vec<Vec<Entry>> {
    let s2 = 2f64.sqrt();
    let s3 = 3f64.sqrt();
    let s6 = 6f64.sqrt();
    let lo = 0.25 - 1.0 / (2.0 * s2);
    let hi = 0.25 + 1.0 / (2.0 * s2);
    let re = -1.0 / (4.0 * s3);
    vec![
        vec![
            (lo, 0.0),
            (re, 1.0 / (2.0 * s6)),
            (re, -1.0 / (2.0 * s6)),
            (hi, 0.0),
        ],
        vec![(0.25, 0.0), (s3 / 4.0, 0.0), (s3 / 4.0, 0.0), (0.25, 0.0)],
        vec![(0.25, 0.0), (re, -1.0 / s6), (re, 1.0 / s6), (0.25, 0.0)],
        vec![
            (hi, 0.0),
            (re, 1.0 / (2.0 * s6)),
            (re, -1.0 / (2.0 * s6)),
            (lo, 0.0),
        ],
    ]
}

#[rustfmt::skip]
fn construction2_d3() -> Vec<Vec<Entry>> {
    let s2 = 2f64.sqrt();
    let s3 = 3f64.sqrt();
    let s5 = 5f64.sqrt();
    let s7 = 7f64.sqrt();
    let s15 = 15f64.sqrt();
    let ninth = 1.0 / 9.0;
    let z = (0.0, 0.0);

    // Entries shared by most operators.
    let o12 = (-7.0 / (84.0 * s3), 3.0 * s7 / (84.0 * s3));
    let o21 = (o12.0, -o12.1);
    let o13 = (-1.0 / (6.0 * s7), 1.0 / (6.0 * s5));
    let o31 = (o13.0, -o13.1);
    let o23 = (-s15 / (30.0 * s2), 5.0 / (30.0 * s2));
    let o32 = (-s15 / (30.0 * s2), -5.0 / (30.0 * s2));
    let d = |x: f64| (x, 0.0);

    vec![
        vec![d(-2.0 / 9.0), o12, o13, o21, d(ninth), o23, o31, o32, d(4.0 / 9.0)],
        vec![
            d(ninth), d(2.0 / (3.0 * s3)), z,
            d(2.0 / (3.0 * s3)), d(ninth), z,
            z, z, d(ninth),
        ],
        vec![
            d(ninth), (-1.0 / (12.0 * s3), -3.0 * s7 / (12.0 * s3)), z,
            (-1.0 / (12.0 * s3), 3.0 * s7 / (12.0 * s3)), d(ninth), z,
            z, z, d(ninth),
        ],
        vec![d(ninth), o12, d(1.0 / s7), o21, d(ninth), z, d(1.0 / s7), z, d(ninth)],
        vec![
            d(ninth), o12, (-1.0 / (6.0 * s7), -s5 / 6.0),
            o21, d(ninth), z,
            (-1.0 / (6.0 * s7), s5 / 6.0), z, d(ninth),
        ],
        vec![
            d(ninth), o12, o13,
            o21, d(ninth), d((2.0f64 / 15.0).sqrt()),
            o31, d((2.0f64 / 15.0).sqrt()), d(ninth),
        ],
        // Printed with 15i where the siblings carry 5i; it validates as printed.
        vec![
            d(ninth), o12, o13,
            o21, d(ninth), (-s15 / (30.0 * s2), -15.0 / (30.0 * s2)),
            o31, (-s15 / (30.0 * s2), 15.0 / (30.0 * s2)), d(ninth),
        ],
        vec![d(4.0 / 9.0), o12, o13, o21, d(-2.0 / 9.0), o23, o31, o32, d(ninth)],
        vec![d(ninth), o12, o13, o21, d(4.0 / 9.0), o23, o31, o32, d(-2.0 / 9.0)],
    ]
}

/// Residuals of a candidate operator set against the COB conditions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub dim: usize,
    pub count: usize,
    /// max over α, β of |Tr(A_α A_β) − δ_αβ / d|
    pub orthogonality_residual: f64,
    /// 1-based pair attaining `orthogonality_residual`.
    pub worst_pair: (usize, usize),
    /// |Tr(A_α A_β) − δ_αβ / d| for every pair, row α, column β.
    pub pair_residuals: Vec<Vec<f64>>,
    /// Frobenius norm of Σ_α A_α − 𝕀.
    pub completeness_residual: f64,
    pub hermiticity_residual: f64,
    /// max over α of |Tr(A_α) − 1/d|
    pub trace_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

pub fn validate_cob<T: Scalar>(ops: &[CMatrix<T>], tol: f64) -> Result<ValidationReport> {
    let first = ops
        .first()
        .ok_or_else(|| Error::Input("empty operator set".into()))?;
    let d = first.nrows();
    if ops.iter().any(|m| m.nrows() != d || m.ncols() != d) {
        return Err(Error::Input(
            "operators must all be square with a common dimension".into(),
        ));
    }
    if ops.len() != d * d {
        return Err(Error::Input(format!(
            "a basis for d = {d} needs {} operators, got {}",
            d * d,
            ops.len()
        )));
    }

    let inv_d = 1.0 / d as f64;
    let mut pair_residuals = vec![vec![0.0; ops.len()]; ops.len()];
    let mut orthogonality_residual = 0.0f64;
    let mut worst_pair = (1, 1);
    for (a, pa) in ops.iter().enumerate() {
        for (b, pb) in ops.iter().enumerate() {
            let target = if a == b { inv_d } else { 0.0 };
            let t = trace_of_product(pa, pb);
            let r = Complex::new(t.re.as_f64() - target, t.im.as_f64()).norm();
            pair_residuals[a][b] = r;
            if r > orthogonality_residual {
                orthogonality_residual = r;
                worst_pair = (a + 1, b + 1);
            }
        }
    }

    let sum = ops.iter().fold(CMatrix::<T>::zeros(d, d), |acc, m| acc + m);
    let completeness_residual = (sum - complex_identity::<T>(d)).norm().as_f64();
    let hermiticity_residual = ops
        .iter()
        .map(|m| hermitian_residual(m).as_f64())
        .fold(0.0, f64::max);
    let trace_residual = ops
        .iter()
        .map(|m| {
            let t = trace(m);
            Complex::new(t.re.as_f64() - inv_d, t.im.as_f64()).norm()
        })
        .fold(0.0, f64::max);

    let passed = orthogonality_residual <= tol
        && completeness_residual <= tol
        && hermiticity_residual <= tol
        && trace_residual <= tol;
    Ok(ValidationReport {
        dim: d,
        count: ops.len(),
        orthogonality_residual,
        worst_pair,
        pair_residuals,
        completeness_residual,
        hermiticity_residual,
        trace_residual,
        tolerance: tol,
        passed,
    })
}

/// A validated complete orthogonal basis for one subsystem.
#[derive(Debug, Clone, PartialEq)]
pub struct CoBasis<T: Scalar> {
    dim: usize,
    label: String,
    operators: Vec<CMatrix<T>>,
}

impl<T: Scalar> CoBasis<T> {
    /// Validates `operators` at [`BASIS_TOLERANCE`] (loosened to the scalar's
    /// precision) and wraps them.
    pub fn new(label: impl Into<String>, operators: Vec<CMatrix<T>>) -> Result<Self> {
        let label = label.into();
        let tol = T::tol(BASIS_TOLERANCE).as_f64();
        let report = validate_cob(&operators, tol)?;
        if !report.passed {
            return Err(Error::Validation {
                label,
                alpha: report.worst_pair.0,
                beta: report.worst_pair.1,
                residual: report.orthogonality_residual,
                completeness: report.completeness_residual,
            });
        }
        Ok(Self {
            dim: report.dim,
            label,
            operators,
        })
    }

    pub fn builtin(which: BuiltinBasis) -> Result<Self> {
        Self::new(which.name(), which.operators())
    }

    /// construction1-d2 for qubits, construction2-d3 for qutrits, otherwise a
    /// generated basis with seed 0.
    pub fn default_for(d: usize) -> Result<Self> {
        match d {
            2 => Self::builtin(BuiltinBasis::Construction1D2),
            3 => Self::builtin(BuiltinBasis::Construction2D3),
            _ => Self::generate(d, 0),
        }
    }

    /// A basis for any `d ≥ 2`, reproducible from `seed`.
    ///
    /// Starts from the orthonormal Hermitian basis `{𝕀/√d, generalized
    /// Gell-Mann}` and rotates it with a real orthogonal `d² × d²` matrix `R`
    /// whose first column is constant `1/d`; the remaining columns come from
    /// Gram-Schmidt on seeded Gaussian vectors. Then
    /// `A_α = Σ_j R_αj B_j / √d`.
    pub fn generate(d: usize, seed: u64) -> Result<Self> {
        if d < 2 {
            return Err(Error::Input(format!(
                "generated bases need d >= 2, got {d}"
            )));
        }
        let n = d * d;
        let hermitian = orthonormal_hermitian_basis::<T>(d);
        let rotation = seeded_rotation::<T>(n, seed);
        let scale = Complex::new(T::one() / T::of(d as f64).sqrt(), T::zero());
        let operators = (0..n)
            .map(|alpha| {
                let mut acc = CMatrix::<T>::zeros(d, d);
                for (j, b) in hermitian.iter().enumerate() {
                    acc += b * Complex::new(rotation[alpha][j], T::zero());
                }
                acc * scale
            })
            .collect();
        Self::new(format!("generated-d{d}-seed{seed}"), operators)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn operators(&self) -> &[CMatrix<T>] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn validate(&self, tol: f64) -> ValidationReport {
        validate_cob(&self.operators, tol).expect("basis shape checked on construction")
    }

    /// μ_α = Tr(ρ A_α) for a single-subsystem operator.
    pub fn coefficients(&self, rho: &CMatrix<T>) -> Result<Vec<T>> {
        if rho.nrows() != self.dim || rho.ncols() != self.dim {
            return Err(Error::Dimension(format!(
                "basis dimension {} vs operator {}x{}",
                self.dim,
                rho.nrows(),
                rho.ncols()
            )));
        }
        let tol = T::tol(IMAGINARY_TOLERANCE);
        self.operators
            .iter()
            .map(|a| real_part(trace_of_product(rho, a), tol, "basis coefficient"))
            .collect()
    }

    /// d · Σ_α μ_α A_α
    pub fn expand(&self, mu: &[T]) -> Result<CMatrix<T>> {
        if mu.len() != self.len() {
            return Err(Error::Dimension(format!(
                "expected {} coefficients, got {}",
                self.len(),
                mu.len()
            )));
        }
        let d = T::of(self.dim as f64);
        Ok(self
            .operators
            .iter()
            .zip(mu)
            .fold(CMatrix::<T>::zeros(self.dim, self.dim), |acc, (a, m)| {
                acc + a * Complex::new(*m * d, T::zero())
            }))
    }

    pub fn to_file(&self) -> BasisFile {
        BasisFile {
            dim: self.dim,
            label: self.label.clone(),
            operators: self
                .operators
                .iter()
                .map(|m| {
                    (0..self.dim)
                        .map(|i| {
                            (0..self.dim)
                                .map(|j| [m[(i, j)].re.as_f64(), m[(i, j)].im.as_f64()])
                                .collect()
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_file(file: &BasisFile) -> Result<Self> {
        Self::new(file.label.clone(), file.matrices()?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Self::from_file(&serde_json::from_str(json)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

/// On-disk basis format: complex entries as `[re, im]`, operators row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisFile {
    pub dim: usize,
    pub label: String,
    pub operators: Vec<Vec<Vec<[f64; 2]>>>,
}

impl BasisFile {
    /// The operators as matrices, checked for shape only.
    pub fn matrices<T: Scalar>(&self) -> Result<Vec<CMatrix<T>>> {
        let d = self.dim;
        self.operators
            .iter()
            .enumerate()
            .map(|(k, op)| {
                if op.len() != d || op.iter().any(|row| row.len() != d) {
                    return Err(Error::Input(format!("operator {} is not {d}x{d}", k + 1)));
                }
                Ok(CMatrix::from_row_iterator(
                    d,
                    d,
                    op.iter()
                        .flatten()
                        .map(|[re, im]| Complex::new(T::of(*re), T::of(*im))),
                ))
            })
            .collect()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

/// `{𝕀/√d}` followed by the `d² − 1` traceless generalized Gell-Mann
/// matrices, normalised to `Tr(B_j B_k) = δ_jk`.
fn orthonormal_hermitian_basis<T: Scalar>(d: usize) -> Vec<CMatrix<T>> {
    let zero = T::zero();
    let inv_sqrt2 = T::one() / T::of(2.0).sqrt();
    let mut out = Vec::with_capacity(d * d);
    out.push(complex_identity::<T>(d) * Complex::new(T::one() / T::of(d as f64).sqrt(), zero));
    for j in 0..d {
        for k in (j + 1)..d {
            let mut sym = CMatrix::<T>::zeros(d, d);
            sym[(j, k)] = Complex::new(inv_sqrt2, zero);
            sym[(k, j)] = Complex::new(inv_sqrt2, zero);
            out.push(sym);

            let mut anti = CMatrix::<T>::zeros(d, d);
            anti[(j, k)] = Complex::new(zero, -inv_sqrt2);
            anti[(k, j)] = Complex::new(zero, inv_sqrt2);
            out.push(anti);
        }
    }
    for l in 1..d {
        let norm = T::one() / T::of((l * (l + 1)) as f64).sqrt();
        let mut diag = CMatrix::<T>::zeros(d, d);
        for m in 0..l {
            diag[(m, m)] = Complex::new(norm, zero);
        }
        diag[(l, l)] = Complex::new(-T::of(l as f64) * norm, zero);
        out.push(diag);
    }
    out
}

/// Rows of a real orthogonal `n × n` matrix whose first column is `1/√n`.
fn seeded_rotation<T: Scalar>(n: usize, seed: u64) -> Vec<Vec<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut columns: Vec<Vec<T>> = Vec::with_capacity(n);
    columns.push(vec![T::one() / T::of(n as f64).sqrt(); n]);
    while columns.len() < n {
        let mut v: Vec<T> = (0..n)
            .map(|_| T::of(StandardNormal.sample(&mut rng)))
            .collect();
        // Two Gram-Schmidt passes keep the columns orthogonal to working precision.
        for _ in 0..2 {
            for c in &columns {
                let dot = c
                    .iter()
                    .zip(&v)
                    .fold(T::zero(), |acc, (a, b)| acc + *a * *b);
                for (x, y) in v.iter_mut().zip(c) {
                    *x -= dot * *y;
                }
            }
        }
        let norm = v.iter().fold(T::zero(), |acc, x| acc + *x * *x).sqrt();
        if norm > T::of(1e-3) {
            columns.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    (0..n)
        .map(|row| columns.iter().map(|c| c[row]).collect())
        .collect()
}

/// General symmetric informationally complete measurement built from a COB.
#[derive(Debug, Clone, PartialEq)]
pub struct Gsicm<T: Scalar> {
    dim: usize,
    operators: Vec<CMatrix<T>>,
    purity_parameter: T,
    mixing_parameter: T,
}

/// Residuals of the three defining GSICM conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GsicmResiduals {
    pub completeness: f64,
    pub purity: f64,
    pub overlap: f64,
}

impl<T: Scalar> Gsicm<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn operators(&self) -> &[CMatrix<T>] {
        &self.operators
    }

    /// a = Tr(P_α²)
    pub fn purity_parameter(&self) -> T {
        self.purity_parameter
    }

    /// λ
    pub fn mixing_parameter(&self) -> T {
        self.mixing_parameter
    }

    /// Outcome probabilities p_α = Tr(ρ P_α).
    pub fn probabilities(&self, rho: &CMatrix<T>) -> Result<Vec<T>> {
        let tol = T::tol(IMAGINARY_TOLERANCE);
        self.operators
            .iter()
            .map(|p| real_part(trace_of_product(rho, p), tol, "probability"))
            .collect()
    }

    pub fn residuals(&self) -> GsicmResiduals {
        let d = self.dim;
        let a = self.purity_parameter.as_f64();
        let overlap_target = (1.0 - d as f64 * a) / (d as f64 * ((d * d) as f64 - 1.0));
        let sum = self
            .operators
            .iter()
            .fold(CMatrix::<T>::zeros(d, d), |acc, m| acc + m);
        let completeness = (sum - complex_identity::<T>(d)).norm().as_f64();
        let mut purity = 0.0f64;
        let mut overlap = 0.0f64;
        for (i, p) in self.operators.iter().enumerate() {
            for (j, q) in self.operators.iter().enumerate() {
                let t = trace_of_product(p, q).re.as_f64();
                if i == j {
                    purity = purity.max((t - a).abs());
                } else {
                    overlap = overlap.max((t - overlap_target).abs());
                }
            }
        }
        GsicmResiduals {
            completeness,
            purity,
            overlap,
        }
    }
}

/// P_α = λ A_α + (1 − λ) 𝕀 / d², for 0 < λ ≤ 1/√(d+1) with every P_α
/// positive semidefinite.
pub fn gsicm_from_cob<T: Scalar>(basis: &CoBasis<T>, lambda: T) -> Result<Gsicm<T>> {
    let d = basis.dim();
    let lambda_max = T::one() / T::of((d + 1) as f64).sqrt();
    if !(lambda > T::zero() && lambda <= lambda_max) {
        return Err(Error::Parameter(format!(
            "lambda = {} outside (0, {}]",
            lambda.as_f64(),
            lambda_max.as_f64()
        )));
    }
    let shift = Complex::new((T::one() - lambda) / T::of((d * d) as f64), T::zero());
    let id = complex_identity::<T>(d);
    let operators: Vec<CMatrix<T>> = basis
        .operators()
        .iter()
        .map(|a| a * Complex::new(lambda, T::zero()) + &id * shift)
        .collect();

    let floor = -T::tol(1e-10);
    for (k, p) in operators.iter().enumerate() {
        let min = hermitian_eigenvalues(p)[0];
        if min < floor {
            return Err(Error::Parameter(format!(
                "lambda = {} leaves P_{} with eigenvalue {:e}",
                lambda.as_f64(),
                k + 1,
                min.as_f64()
            )));
        }
    }

    let purity_parameter = trace_of_product(&operators[0], &operators[0]).re;
    let tol = T::tol(1e-10);
    for p in &operators[1..] {
        if (trace_of_product(p, p).re - purity_parameter).abs() > tol {
            return Err(Error::NumericalIntegrity(
                "Tr(P_α²) is not constant over α".into(),
            ));
        }
    }
    Ok(Gsicm {
        dim: d,
        operators,
        purity_parameter,
        mixing_parameter: lambda,
    })
}

/// Converts GSICM outcome probabilities to COB coefficients:
/// μ_α = λ(d²−1)/(ad³−1) · p_α + 1/d² − λ(d²−1)/(d²(ad³−1)).
pub fn probabilities_bridge<T: Scalar>(p: &[T], a: T, lambda: T, d: usize) -> Result<Vec<T>> {
    if p.len() != d * d {
        return Err(Error::Dimension(format!(
            "expected {} probabilities, got {}",
            d * d,
            p.len()
        )));
    }
    let total = p.iter().fold(T::zero(), |acc, x| acc + *x);
    if (total - T::one()).abs() > T::tol(1e-10) {
        return Err(Error::Input(format!(
            "probabilities sum to {}, not 1",
            total.as_f64()
        )));
    }
    let df = T::of(d as f64);
    let d2 = df * df;
    let denom = a * d2 * df - T::one();
    if denom.abs() <= T::default_epsilon() {
        return Err(Error::Parameter(
            "a·d³ = 1 makes the bridge singular".into(),
        ));
    }
    let slope = lambda * (d2 - T::one()) / denom;
    let offset = T::one() / d2 - slope / d2;
    Ok(p.iter().map(|x| slope * *x + offset).collect())
}
