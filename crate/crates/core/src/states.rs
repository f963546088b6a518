//! Multipartite density matrices and the noisy state families used in the
//! worked examples.
//!
//! Computational basis indices are big-endian over subsystems: the leftmost
//! ket factor is the most significant digit, so for dims `(3, 3, 2)` the flat
//! index of `|a b c⟩` is `6a + 2b + c`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use nalgebra::{Complex, ComplexField};
use serde::{Deserialize, Serialize};

use crate::numerics::{hermitian_eigenvalues, hermitian_residual, trace, CMatrix, PSD_TOLERANCE};
use crate::{Error, Result, Scalar};

/// Tolerance on Hermiticity and unit trace of a constructed state.
pub const STATE_TOLERANCE: f64 = 1e-10;

/// A state of `dims.len()` subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Scalar> {
    dims: Vec<usize>,
    matrix: CMatrix<T>,
}

impl<T: Scalar> DensityMatrix<T> {
    pub fn new(dims: Vec<usize>, matrix: CMatrix<T>) -> Result<Self> {
        let total = check_dims(&dims)?;
        if matrix.nrows() != total || matrix.ncols() != total {
            return Err(Error::Dimension(format!(
                "dims {dims:?} need a {total}x{total} matrix, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let tol = T::tol(STATE_TOLERANCE);
        let herm = hermitian_residual(&matrix);
        if herm > tol {
            return Err(Error::Input(format!(
                "state is not Hermitian (residual {:e})",
                herm.as_f64()
            )));
        }
        let tr = trace(&matrix);
        if (tr.re - T::one()).abs() > tol || tr.im.abs() > tol {
            return Err(Error::Input(format!(
                "state trace is {} + {}i",
                tr.re.as_f64(),
                tr.im.as_f64()
            )));
        }
        let min = hermitian_eigenvalues(&matrix)[0];
        if min < -T::tol(PSD_TOLERANCE) {
            return Err(Error::Input(format!(
                "state has negative eigenvalue {:e}",
                min.as_f64()
            )));
        }
        Ok(Self { dims, matrix })
    }

    /// |ψ⟩⟨ψ|. Amplitudes within 1e−6 of unit norm are renormalised; anything
    /// further off is rejected.
    pub fn pure(amplitudes: &[Complex<T>], dims: Vec<usize>) -> Result<Self> {
        let total = check_dims(&dims)?;
        if amplitudes.len() != total {
            return Err(Error::Dimension(format!(
                "dims {dims:?} need {total} amplitudes, got {}",
                amplitudes.len()
            )));
        }
        let norm = amplitudes
            .iter()
            .fold(T::zero(), |acc, a| acc + a.modulus_squared())
            .sqrt();
        if norm == T::zero() {
            return Err(Error::Input("zero state vector".into()));
        }
        if (norm - T::one()).abs() > T::tol(1e-6) {
            return Err(Error::Input(format!(
                "state vector has norm {}, expected 1",
                norm.as_f64()
            )));
        }
        let psi =
            nalgebra::DVector::from_iterator(total, amplitudes.iter().map(|a| a.unscale(norm)));
        let matrix = &psi * psi.adjoint();
        Ok(Self { dims, matrix })
    }

    /// 𝕀 / D
    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        let total = check_dims(&dims)?;
        let matrix = CMatrix::identity(total, total)
            * Complex::new(T::one() / T::of(total as f64), T::zero());
        Ok(Self { dims, matrix })
    }

    /// Σ w_k ρ_k for nonnegative weights summing to 1.
    pub fn mixture(terms: &[(T, &DensityMatrix<T>)]) -> Result<Self> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::Input("empty mixture".into()))?;
        let dims = first.dims.clone();
        let total = first.dimension();
        let mut weight_sum = T::zero();
        let mut matrix = CMatrix::<T>::zeros(total, total);
        for (w, rho) in terms {
            if rho.dims != dims {
                return Err(Error::Dimension("mixture terms have different dims".into()));
            }
            if *w < T::zero() {
                return Err(Error::Input("negative mixture weight".into()));
            }
            weight_sum += *w;
            matrix += &rho.matrix * Complex::new(*w, T::zero());
        }
        if (weight_sum - T::one()).abs() > T::tol(1e-10) {
            return Err(Error::Input(format!(
                "mixture weights sum to {}",
                weight_sum.as_f64()
            )));
        }
        Ok(Self { dims, matrix })
    }

    /// ρ_a ⊗ ρ_b with the parties of `a` first.
    pub fn tensor(&self, other: &DensityMatrix<T>) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self {
            dims,
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }

    /// Reorders subsystems: party `k` of the result is party `order[k]` of `self`.
    pub fn permute_parties(&self, order: &[usize]) -> Result<Self> {
        let n = self.dims.len();
        let mut seen = vec![false; n];
        if order.len() != n
            || order
                .iter()
                .any(|&p| p >= n || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::Input(format!(
                "{order:?} is not a permutation of {n} parties"
            )));
        }
        let new_dims: Vec<usize> = order.iter().map(|&p| self.dims[p]).collect();
        let map = permutation_map(&self.dims, order);
        let total = self.dimension();
        let mut matrix = CMatrix::<T>::zeros(total, total);
        for i in 0..total {
            for j in 0..total {
                matrix[(i, j)] = self.matrix[(map[i], map[j])];
            }
        }
        Ok(Self {
            dims: new_dims,
            matrix,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn party_count(&self) -> usize {
        self.dims.len()
    }

    /// D = Π dᵢ
    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    /// Tr(ρ²)
    pub fn purity(&self) -> T {
        self.matrix
            .iter()
            .fold(T::zero(), |acc, z| acc + z.modulus_squared())
    }

    pub fn to_file(&self) -> StateFile {
        let d = self.dimension();
        StateFile {
            dims: self.dims.clone(),
            amplitudes: None,
            matrix: Some(
                (0..d)
                    .map(|i| {
                        (0..d)
                            .map(|j| {
                                [
                                    self.matrix[(i, j)].re.as_f64(),
                                    self.matrix[(i, j)].im.as_f64(),
                                ]
                            })
                            .collect()
                    })
                    .collect(),
            ),
        }
    }

    pub fn from_file(file: &StateFile) -> Result<Self> {
        let to_c = |[re, im]: [f64; 2]| Complex::new(T::of(re), T::of(im));
        match (&file.amplitudes, &file.matrix) {
            (Some(amps), None) => {
                let amps: Vec<Complex<T>> = amps.iter().copied().map(to_c).collect();
                Self::pure(&amps, file.dims.clone())
            }
            (None, Some(rows)) => {
                let d = rows.len();
                if rows.iter().any(|r| r.len() != d) {
                    return Err(Error::Input("state matrix is not square".into()));
                }
                let matrix =
                    CMatrix::from_row_iterator(d, d, rows.iter().flatten().copied().map(to_c));
                Self::new(file.dims.clone(), matrix)
            }
            _ => Err(Error::Input(
                "state file needs exactly one of `amplitudes` or `matrix`".into(),
            )),
        }
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
}

fn check_dims(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() || dims.iter().any(|&d| d < 2) {
        return Err(Error::Input(format!(
            "subsystem dimensions must all be >= 2, got {dims:?}"
        )));
    }
    Ok(dims.iter().product())
}

/// For each flat index of the permuted system, the flat index it came from.
fn permutation_map(dims: &[usize], order: &[usize]) -> Vec<usize> {
    let n = dims.len();
    let total: usize = dims.iter().product();
    let mut old_strides = vec![1usize; n];
    for k in (0..n.saturating_sub(1)).rev() {
        old_strides[k] = old_strides[k + 1] * dims[k + 1];
    }
    let new_dims: Vec<usize> = order.iter().map(|&p| dims[p]).collect();
    (0..total)
        .map(|flat| {
            let mut rest = flat;
            let mut old = 0;
            for k in (0..n).rev() {
                let digit = rest % new_dims[k];
                rest /= new_dims[k];
                old += digit * old_strides[order[k]];
            }
            old
        })
        .collect()
}

/// On-disk state format: `dims` plus either `amplitudes` (pure) or `matrix`
/// (mixed), complex numbers as `[re, im]`, big-endian party order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
}

/// The pure states of the worked examples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedState {
    /// (|000⟩ + |111⟩)/√2
    Ghz3,
    /// (|0000⟩ + |1111⟩)/√2
    Ghz4,
    /// (|0001⟩ + |0010⟩ + |0100⟩ + |1000⟩)/2
    W4,
    /// [(|10⟩ + |21⟩)|0⟩ + (|00⟩ + |11⟩ + |22⟩)|1⟩]/√5 on a 3×3×2 system.
    Example2Phi,
}

impl NamedState {
    pub const ALL: [NamedState; 4] = [
        NamedState::Ghz3,
        NamedState::Ghz4,
        NamedState::W4,
        NamedState::Example2Phi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NamedState::Ghz3 => "ghz3",
            NamedState::Ghz4 => "ghz4",
            NamedState::W4 => "w4",
            NamedState::Example2Phi => "example2_phi",
        }
    }

    pub fn dims(self) -> Vec<usize> {
        match self {
            NamedState::Ghz3 => vec![2, 2, 2],
            NamedState::Ghz4 | NamedState::W4 => vec![2, 2, 2, 2],
            NamedState::Example2Phi => vec![3, 3, 2],
        }
    }

    /// Nonzero kets as digit strings with their (common) amplitude.
    fn support(self) -> (&'static [&'static [usize]], f64) {
        match self {
            NamedState::Ghz3 => (&[&[0, 0, 0], &[1, 1, 1]], std::f64::consts::FRAC_1_SQRT_2),
            NamedState::Ghz4 => (
                &[&[0, 0, 0, 0], &[1, 1, 1, 1]],
                std::f64::consts::FRAC_1_SQRT_2,
            ),
            NamedState::W4 => (
                &[&[0, 0, 0, 1], &[0, 0, 1, 0], &[0, 1, 0, 0], &[1, 0, 0, 0]],
                0.5,
            ),
            NamedState::Example2Phi => (
                &[&[1, 0, 0], &[2, 1, 0], &[0, 0, 1], &[1, 1, 1], &[2, 2, 1]],
                1.0 / 5f64.sqrt(),
            ),
        }
    }

    pub fn amplitudes<T: Scalar>(self) -> Vec<Complex<T>> {
        let dims = self.dims();
        let total: usize = dims.iter().product();
        let (kets, amp) = self.support();
        let mut out = vec![Complex::new(T::zero(), T::zero()); total];
        for ket in kets {
            let flat = ket
                .iter()
                .zip(&dims)
                .fold(0, |acc, (digit, d)| acc * d + digit);
            out[flat] = Complex::new(T::of(amp), T::zero());
        }
        out
    }

    pub fn state<T: Scalar>(self) -> DensityMatrix<T> {
        DensityMatrix::pure(&self.amplitudes(), self.dims()).expect("named states are normalised")
    }

    /// Mixing convention used with this state in the examples.
    pub fn orientation(self) -> Orientation {
        match self {
            NamedState::Ghz3 => Orientation::NoiseWeight,
            _ => Orientation::PureWeight,
        }
    }
}

impl fmt::Display for NamedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NamedState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NamedState::ALL
            .into_iter()
            .find(|n| n.name() == s)
            .ok_or_else(|| Error::UnknownName(s.to_string()))
    }
}

/// Which term of a white-noise mixture carries the parameter `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    /// ρ(x) = x·𝕀/D + (1 − x)·|ψ⟩⟨ψ|
    NoiseWeight,
    /// ρ(x) = (1 − x)·𝕀/D + x·|ψ⟩⟨ψ|
    PureWeight,
}

impl Orientation {
    pub fn name(self) -> &'static str {
        match self {
            Orientation::NoiseWeight => "noise-weight",
            Orientation::PureWeight => "pure-weight",
        }
    }

    /// Weight of the base state at parameter `x`.
    pub fn pure_weight<T: Scalar>(self, x: T) -> T {
        match self {
            Orientation::NoiseWeight => T::one() - x,
            Orientation::PureWeight => x,
        }
    }
}

impl FromStr for Orientation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "noise-weight" => Ok(Orientation::NoiseWeight),
            "pure-weight" => Ok(Orientation::PureWeight),
            _ => Err(Error::UnknownName(s.to_string())),
        }
    }
}

/// One-parameter white-noise family around a base state.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisyFamily<T: Scalar> {
    base: DensityMatrix<T>,
    noise: DensityMatrix<T>,
    orientation: Orientation,
}

impl<T: Scalar> NoisyFamily<T> {
    pub const PARAMETER: &'static str = "x";

    pub fn new(base: DensityMatrix<T>, orientation: Orientation) -> Self {
        let noise = DensityMatrix::maximally_mixed(base.dims.clone())
            .expect("dims already validated by the base state");
        Self {
            base,
            noise,
            orientation,
        }
    }

    /// The family of a named state, with the orientation of its example.
    pub fn named(state: NamedState) -> Self {
        Self::new(state.state(), state.orientation())
    }

    pub fn base(&self) -> &DensityMatrix<T> {
        &self.base
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn dims(&self) -> &[usize] {
        self.base.dims()
    }

    pub fn evaluate(&self, x: T) -> Result<DensityMatrix<T>> {
        if !(x >= T::zero() && x <= T::one()) {
            return Err(Error::Parameter(format!(
                "x = {} outside [0, 1]",
                x.as_f64()
            )));
        }
        let w = self.orientation.pure_weight(x);
        DensityMatrix::mixture(&[(w, &self.base), (T::one() - w, &self.noise)])
    }
}
