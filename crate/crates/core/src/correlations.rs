//! Correlation tensors μ_{α₁⋯αₙ} = Tr(ρ A⁽¹⁾_{α₁} ⊗ ⋯ ⊗ A⁽ⁿ⁾_{αₙ}).
//!
//! Multi-indices are zero-based in code and stored with αₙ varying fastest.

use std::borrow::Borrow;
use std::fmt::Write as _;

use nalgebra::{Complex, DMatrix};

use crate::cob::CoBasis;
use crate::numerics::{CMatrix, IMAGINARY_TOLERANCE};
use crate::states::DensityMatrix;
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationTensor<T: Scalar> {
    dims: Vec<usize>,
    basis_labels: Vec<String>,
    values: Vec<T>,
}

impl<T: Scalar> CorrelationTensor<T> {
    /// Wraps raw values; `values.len()` must equal Π dᵢ².
    pub fn from_values(
        dims: Vec<usize>,
        basis_labels: Vec<String>,
        values: Vec<T>,
    ) -> Result<Self> {
        let expected: usize = dims.iter().map(|d| d * d).product();
        if values.len() != expected || basis_labels.len() != dims.len() {
            return Err(Error::Dimension(format!(
                "dims {dims:?} need {expected} values and {} labels, got {} and {}",
                dims.len(),
                values.len(),
                basis_labels.len()
            )));
        }
        Ok(Self {
            dims,
            basis_labels,
            values,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn party_count(&self) -> usize {
        self.dims.len()
    }

    pub fn basis_labels(&self) -> &[String] {
        &self.basis_labels
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Number of labels per party, dᵢ².
    pub fn shape(&self) -> Vec<usize> {
        self.dims.iter().map(|d| d * d).collect()
    }

    /// Flat offset of a zero-based multi-index.
    pub fn offset(&self, alpha: &[usize]) -> usize {
        debug_assert_eq!(alpha.len(), self.dims.len());
        alpha
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (a, d)| acc * d * d + a)
    }

    /// μ at a zero-based multi-index.
    pub fn get(&self, alpha: &[usize]) -> T {
        self.values[self.offset(alpha)]
    }

    /// Zero-based multi-index of a flat offset.
    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut alpha = vec![0; self.dims.len()];
        for k in (0..self.dims.len()).rev() {
            let n = self.dims[k] * self.dims[k];
            alpha[k] = flat % n;
            flat /= n;
        }
        alpha
    }

    /// Σ μ²
    pub fn vector_norm_squared(&self) -> T {
        self.values.iter().fold(T::zero(), |acc, v| acc + *v * *v)
    }

    /// p·self + (1 − p)·other
    pub fn combine(&self, p: T, other: &Self) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::Dimension("tensors have different dims".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| p * *a + (T::one() - p) * *b)
            .collect();
        Ok(Self {
            dims: self.dims.clone(),
            basis_labels: self.basis_labels.clone(),
            values,
        })
    }

    /// One row per multi-index: 1-based α₁,…,αₙ then μ with 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for k in 1..=self.dims.len() {
            let _ = write!(out, "alpha{k},");
        }
        out.push_str("mu\n");
        for (flat, v) in self.values.iter().enumerate() {
            for a in self.multi_index(flat) {
                let _ = write!(out, "{},", a + 1);
            }
            let _ = writeln!(out, "{:.11e}", v.as_f64());
        }
        out
    }
}

fn check_bases<T: Scalar, B: Borrow<CoBasis<T>>>(dims: &[usize], bases: &[B]) -> Result<()> {
    if bases.len() != dims.len() {
        return Err(Error::Dimension(format!(
            "{} parties but {} bases",
            dims.len(),
            bases.len()
        )));
    }
    for (k, (b, d)) in bases.iter().zip(dims).enumerate() {
        if b.borrow().dim() != *d {
            return Err(Error::Dimension(format!(
                "party {} has dimension {d} but basis `{}` has dimension {}",
                k + 1,
                b.borrow().label(),
                b.borrow().dim()
            )));
        }
    }
    Ok(())
}

/// The correlation tensor of `rho` in one basis per party.
pub fn correlation_tensor<T: Scalar, B: Borrow<CoBasis<T>>>(
    rho: &DensityMatrix<T>,
    bases: &[B],
) -> Result<CorrelationTensor<T>> {
    correlation_tensor_of_matrix(rho.matrix(), rho.dims(), bases)
}

/// As [`correlation_tensor`] for an arbitrary operator on the given dims.
pub fn correlation_tensor_of_matrix<T: Scalar, B: Borrow<CoBasis<T>>>(
    rho: &CMatrix<T>,
    dims: &[usize],
    bases: &[B],
) -> Result<CorrelationTensor<T>> {
    check_bases(dims, bases)?;
    let total: usize = dims.iter().product();
    if rho.nrows() != total || rho.ncols() != total {
        return Err(Error::Dimension(format!(
            "dims {dims:?} need a {total}x{total} operator"
        )));
    }
    let n = dims.len();

    // Interleave to (i₁ j₁)(i₂ j₂)⋯ so each party is one contiguous axis.
    let mut data = vec![Complex::new(T::zero(), T::zero()); total * total];
    let mut rows = vec![0; n];
    let mut cols = vec![0; n];
    for r in 0..total {
        split(r, dims, &mut rows);
        for c in 0..total {
            split(c, dims, &mut cols);
            let flat = (0..n).fold(0, |acc, k| (acc * dims[k] + rows[k]) * dims[k] + cols[k]);
            data[flat] = rho[(r, c)];
        }
    }

    // Contract party k: (i, j) → α with weight A_α[j, i].
    let mut prefix = 1;
    for (k, basis) in bases.iter().enumerate() {
        let d = dims[k];
        let m = d * d;
        let suffix: usize = dims[k + 1..].iter().map(|d| d * d).product();
        let ops = basis.borrow().operators();
        let mut next = vec![Complex::new(T::zero(), T::zero()); prefix * m * suffix];
        for p in 0..prefix {
            for (alpha, a) in ops.iter().enumerate() {
                for i in 0..d {
                    for j in 0..d {
                        let w = a[(j, i)];
                        if w.re == T::zero() && w.im == T::zero() {
                            continue;
                        }
                        let src = (p * m + i * d + j) * suffix;
                        let dst = (p * m + alpha) * suffix;
                        for s in 0..suffix {
                            next[dst + s] += data[src + s] * w;
                        }
                    }
                }
            }
        }
        data = next;
        prefix *= m;
    }

    let tol = T::tol(IMAGINARY_TOLERANCE);
    let mut values = Vec::with_capacity(data.len());
    for (flat, z) in data.into_iter().enumerate() {
        if z.im.abs() > tol {
            return Err(Error::NumericalIntegrity(format!(
                "correlation entry {flat} has imaginary residue {:e}",
                z.im.as_f64()
            )));
        }
        values.push(z.re);
    }
    Ok(CorrelationTensor {
        dims: dims.to_vec(),
        basis_labels: bases
            .iter()
            .map(|b| b.borrow().label().to_string())
            .collect(),
        values,
    })
}

fn split(mut flat: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = flat % dims[k];
        flat /= dims[k];
    }
}

/// Π dᵢ · Σ μ A⊗⋯⊗A, without any state validation.
pub fn reconstruct_matrix<T: Scalar, B: Borrow<CoBasis<T>>>(
    t: &CorrelationTensor<T>,
    bases: &[B],
) -> Result<CMatrix<T>> {
    check_bases(&t.dims, bases)?;
    let dims = &t.dims;
    let n = dims.len();
    let total: usize = dims.iter().product();

    // Expand party k in place: α → (i, j) with weight A_α[i, j].
    let mut data: Vec<Complex<T>> = t
        .values
        .iter()
        .map(|v| Complex::new(*v, T::zero()))
        .collect();
    let mut prefix = 1;
    for (k, basis) in bases.iter().enumerate() {
        let d = dims[k];
        let m = d * d;
        let suffix: usize = dims[k + 1..].iter().map(|d| d * d).product();
        let ops = basis.borrow().operators();
        let scale = Complex::new(T::of(d as f64), T::zero());
        let mut next = vec![Complex::new(T::zero(), T::zero()); data.len()];
        for p in 0..prefix {
            for (alpha, a) in ops.iter().enumerate() {
                let src = (p * m + alpha) * suffix;
                for i in 0..d {
                    for j in 0..d {
                        let w = a[(i, j)] * scale;
                        let dst = (p * m + i * d + j) * suffix;
                        for s in 0..suffix {
                            next[dst + s] += data[src + s] * w;
                        }
                    }
                }
            }
        }
        data = next;
        prefix *= m;
    }

    let mut rows = vec![0; n];
    let mut cols = vec![0; n];
    let mut out = DMatrix::zeros(total, total);
    for r in 0..total {
        split(r, dims, &mut rows);
        for c in 0..total {
            split(c, dims, &mut cols);
            let flat = (0..n).fold(0, |acc, k| (acc * dims[k] + rows[k]) * dims[k] + cols[k]);
            out[(r, c)] = data[flat];
        }
    }
    Ok(out)
}

/// Rebuilds the state from its tensor.
pub fn reconstruct<T: Scalar, B: Borrow<CoBasis<T>>>(
    t: &CorrelationTensor<T>,
    bases: &[B],
) -> Result<DensityMatrix<T>> {
    DensityMatrix::new(t.dims.clone(), reconstruct_matrix(t, bases)?)
}

/// Σ μ² of a tensor.
pub fn vector_norm_squared<T: Scalar>(t: &CorrelationTensor<T>) -> T {
    t.vector_norm_squared()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cob::BuiltinBasis;
    use crate::numerics::{kron, trace_of_product};
    use crate::states::{NamedState, NoisyFamily};
    use approx::assert_relative_eq;

    fn qubit() -> CoBasis<f64> {
        CoBasis::builtin(BuiltinBasis::Construction1D2).unwrap()
    }

    fn brute_force(rho: &CMatrix<f64>, bases: &[CoBasis<f64>]) -> Vec<f64> {
        let mut out = vec![];
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
        rec(rho, bases, CMatrix::identity(1, 1), &mut out);
        out
    }

    #[test]
    fn maximally_mixed_is_uniform() {
        let dims = vec![3, 3, 2];
        let rho = DensityMatrix::<f64>::maximally_mixed(dims).unwrap();
        let bases = [
            CoBasis::builtin(BuiltinBasis::Construction2D3).unwrap(),
            CoBasis::builtin(BuiltinBasis::Construction2D3).unwrap(),
            CoBasis::builtin(BuiltinBasis::Construction2D2).unwrap(),
        ];
        let t = correlation_tensor(&rho, &bases).unwrap();
        assert_eq!(t.values().len(), 9 * 9 * 4);
        for v in t.values() {
            assert_relative_eq!(*v, 1.0 / 324.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn single_qubit_ground_state() {
        let mut m = CMatrix::<f64>::zeros(2, 2);
        m[(0, 0)] = Complex::new(1.0, 0.0);
        let rho = DensityMatrix::new(vec![2], m).unwrap();
        let b = qubit();
        let t = correlation_tensor(&rho, &[&b]).unwrap();
        assert_relative_eq!(t.get(&[0]), b.operators()[0][(0, 0)].re, epsilon = 1e-15);
        assert_relative_eq!(t.get(&[0]), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn matches_kronecker_traces() {
        let rho = NoisyFamily::<f64>::named(NamedState::Example2Phi)
            .evaluate(0.3)
            .unwrap();
        let bases = vec![
            CoBasis::builtin(BuiltinBasis::Construction2D3).unwrap(),
            CoBasis::generate(3, 7).unwrap(),
            qubit(),
        ];
        let fast = correlation_tensor(&rho, &bases).unwrap();
        let slow = brute_force(rho.matrix(), &bases);
        for (a, b) in fast.values().iter().zip(&slow) {
            assert_relative_eq!(*a, *b, epsilon = 1e-14);
        }
    }

    #[test]
    fn index_order_last_fastest() {
        let t = CorrelationTensor::from_values(
            vec![2, 3],
            vec!["a".into(), "b".into()],
            (0..36).map(f64::from).collect(),
        )
        .unwrap();
        assert_eq!(t.get(&[1, 2]), 11.0);
        assert_eq!(t.multi_index(11), vec![1, 2]);
        assert_eq!(t.offset(&[3, 8]), 35);
    }

    #[test]
    fn round_trips() {
        let ghz = NamedState::Ghz3.state::<f64>();
        let b = qubit();
        let bases = [&b, &b, &b];
        let back = reconstruct(&correlation_tensor(&ghz, &bases).unwrap(), &bases).unwrap();
        assert!((back.matrix() - ghz.matrix()).camax() < 1e-12);

        let mixed = DensityMatrix::<f64>::maximally_mixed(vec![2, 2, 2]).unwrap();
        let back = reconstruct(&correlation_tensor(&mixed, &bases).unwrap(), &bases).unwrap();
        assert!((back.matrix() - mixed.matrix()).camax() < 1e-15);

        let phi = NoisyFamily::<f64>::named(NamedState::Example2Phi)
            .evaluate(0.3)
            .unwrap();
        let b3 = CoBasis::builtin(BuiltinBasis::Construction2D3).unwrap();
        let b2 = CoBasis::builtin(BuiltinBasis::Construction2D2).unwrap();
        let bases = [&b3, &b3, &b2];
        let back = reconstruct(&correlation_tensor(&phi, &bases).unwrap(), &bases).unwrap();
        assert!((back.matrix() - phi.matrix()).camax() < 1e-12);
    }

    #[test]
    fn norm_matches_purity() {
        let b = qubit();
        let bases = [&b, &b, &b];
        let ghz = NamedState::Ghz3.state::<f64>();
        assert_relative_eq!(
            correlation_tensor(&ghz, &bases)
                .unwrap()
                .vector_norm_squared(),
            0.125,
            epsilon = 1e-14
        );

        let rho = NoisyFamily::<f64>::named(NamedState::Ghz3)
            .evaluate(0.5)
            .unwrap();
        let t = correlation_tensor(&rho, &bases).unwrap();
        assert_relative_eq!(vector_norm_squared(&t), rho.purity() / 8.0, epsilon = 1e-14);

        let two = DensityMatrix::<f64>::maximally_mixed(vec![2, 2]).unwrap();
        let t = correlation_tensor(&two, &[&b, &b]).unwrap();
        assert_relative_eq!(t.vector_norm_squared(), 1.0 / 16.0, epsilon = 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        let rho = NamedState::Ghz3.state::<f64>();
        let b = qubit();
        let b3 = CoBasis::builtin(BuiltinBasis::Construction2D3).unwrap();
        assert!(matches!(
            correlation_tensor(&rho, &[&b, &b]),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            correlation_tensor(&rho, &[&b, &b, &b3]),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn imaginary_residue_is_reported() {
        // A non-Hermitian operator gives complex traces.
        let mut m = CMatrix::<f64>::zeros(2, 2);
        m[(0, 1)] = Complex::new(0.0, 1.0);
        let b = qubit();
        let res = correlation_tensor_of_matrix(&m, &[2], &[&b]);
        assert!(matches!(res, Err(Error::NumericalIntegrity(_))));
    }

    #[test]
    fn csv_layout() {
        let b = qubit();
        let rho = DensityMatrix::<f64>::maximally_mixed(vec![2, 2]).unwrap();
        let csv = correlation_tensor(&rho, &[&b, &b]).unwrap().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "alpha1,alpha2,mu");
        assert_eq!(lines.len(), 17);
        assert!(lines[2].starts_with("1,2,6.25000000000e-2"));
    }
}
