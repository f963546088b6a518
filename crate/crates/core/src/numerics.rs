//! Dense complex/real matrix primitives and the norms the criteria are built on.

use nalgebra::{Complex, ComplexField, DMatrix};
use serde::Serialize;

use crate::{Error, Result, Scalar};

pub type CMatrix<T> = DMatrix<Complex<T>>;
pub type RMatrix<T> = DMatrix<T>;

/// Singular values below this fraction of the largest one are dropped.
pub const SINGULAR_CUTOFF: f64 = 1e-13;
/// Largest imaginary part tolerated on a quantity that must be real.
pub const IMAGINARY_TOLERANCE: f64 = 1e-10;
/// Default tolerance on the minimum eigenvalue of a density matrix.
pub const PSD_TOLERANCE: f64 = 1e-9;

pub fn kron<T: Scalar>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    a.kronecker(b)
}

pub fn kron_real<T: Scalar>(a: &RMatrix<T>, b: &RMatrix<T>) -> RMatrix<T> {
    a.kronecker(b)
}

pub fn complex_identity<T: Scalar>(d: usize) -> CMatrix<T> {
    CMatrix::identity(d, d)
}

/// Sum of singular values, from an SVD.
pub fn trace_norm<T: Scalar>(m: &RMatrix<T>) -> T {
    if m.is_empty() {
        return T::zero();
    }
    let sv = m.clone().singular_values();
    let largest = sv.max();
    if largest <= T::zero() {
        return T::zero();
    }
    let cutoff = largest * T::of(SINGULAR_CUTOFF);
    sv.iter()
        .copied()
        .filter(|s| *s > cutoff)
        .fold(T::zero(), |acc, s| acc + s)
}

pub fn frobenius_norm<T: Scalar>(m: &RMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, x| acc + *x * *x).sqrt()
}

/// Trace norm through an independent route: one-sided Jacobi rotations
/// orthogonalise the shorter set of lines of `m`, which diagonalises the
/// smaller Gram matrix (`M Mᵀ` or `Mᵀ M`). The result is the sum of the square
/// roots of its eigenvalues, i.e. the sum of the final line norms.
///
/// Used by tests as a cross-check of [`trace_norm`].
pub fn trace_norm_oracle<T: Scalar>(m: &RMatrix<T>) -> T {
    let mut lines: Vec<Vec<T>> = if m.nrows() <= m.ncols() {
        m.row_iter().map(|r| r.iter().copied().collect()).collect()
    } else {
        m.column_iter()
            .map(|c| c.iter().copied().collect())
            .collect()
    };
    let k = lines.len();
    let eps = T::default_epsilon();
    let two = T::of(2.0);

    for _sweep in 0..128 {
        let mut rotated = false;
        for p in 0..k {
            for q in (p + 1)..k {
                let (head, tail) = lines.split_at_mut(q);
                let (vp, vq) = (&mut head[p], &mut tail[0]);
                let (mut alpha, mut beta, mut gamma) = (T::zero(), T::zero(), T::zero());
                for (x, y) in vp.iter().zip(vq.iter()) {
                    alpha += *x * *x;
                    beta += *y * *y;
                    gamma += *x * *y;
                }
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (two * gamma);
                let sign = if zeta >= T::zero() {
                    T::one()
                } else {
                    -T::one()
                };
                let t = sign / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for (x, y) in vp.iter_mut().zip(vq.iter_mut()) {
                    let (a, b) = (*x, *y);
                    *x = c * a - s * b;
                    *y = s * a + c * b;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    lines
        .iter()
        .map(|v| v.iter().fold(T::zero(), |acc, x| acc + *x * *x).sqrt())
        .fold(T::zero(), |acc, n| acc + n)
}

/// max |M[i][j] − conj(M[j][i])|
pub fn hermitian_residual<T: Scalar>(m: &CMatrix<T>) -> T {
    let mut worst = T::zero();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).modulus());
        }
    }
    worst
}

/// Eigenvalues of the Hermitian part of a square matrix, ascending.
pub fn hermitian_eigenvalues<T: Scalar>(m: &CMatrix<T>) -> Vec<T> {
    let half = Complex::new(T::of(0.5), T::zero());
    let h = (m + m.adjoint()) * half;
    let mut ev: Vec<T> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    ev
}

pub fn trace<T: Scalar>(m: &CMatrix<T>) -> Complex<T> {
    m.diagonal()
        .iter()
        .fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + z)
}

/// Tr(A·B) without forming the product.
pub fn trace_of_product<T: Scalar>(a: &CMatrix<T>, b: &CMatrix<T>) -> Complex<T> {
    let mut acc = Complex::new(T::zero(), T::zero());
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Real part of `z`, or an integrity error if the imaginary part exceeds `tol`.
pub fn real_part<T: Scalar>(z: Complex<T>, tol: T, what: &str) -> Result<T> {
    if z.im.abs() > tol {
        return Err(Error::NumericalIntegrity(format!(
            "{what} has imaginary residue {:e}",
            z.im.as_f64()
        )));
    }
    Ok(z.re)
}

/// Diagnostics from [`is_density_matrix`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityCheck<T> {
    pub hermitian_residual: T,
    pub trace_deviation: T,
    pub min_eigenvalue: T,
    pub valid: bool,
}

pub fn is_density_matrix<T: Scalar>(m: &CMatrix<T>, tol: T) -> Result<DensityCheck<T>> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "density matrix must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let hermitian_residual = hermitian_residual(m);
    let tr = trace(m);
    let trace_deviation = (tr - Complex::new(T::one(), T::zero())).modulus();
    let min_eigenvalue = hermitian_eigenvalues(m)
        .first()
        .copied()
        .unwrap_or_else(T::zero);
    let valid = hermitian_residual <= tol && trace_deviation <= tol && min_eigenvalue >= -tol;
    Ok(DensityCheck {
        hermitian_residual,
        trace_deviation,
        min_eigenvalue,
        valid,
    })
}
