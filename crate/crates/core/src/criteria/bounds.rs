use crate::{Error, Result};

use super::{PartitionSpec, TripartiteCoefficients};

/// The other two labels of a tripartite system, ascending.
pub(super) fn others(f: usize) -> (usize, usize) {
    match f {
        1 => (2, 3),
        2 => (1, 3),
        3 => (1, 2),
        _ => panic!("party label {f} outside 1..=3"),
    }
}

/// Bounds on ‖B^{f|gh}‖_tr for pure states separable under f|gh, g|fh and
/// h|fg respectively.
pub fn theorem1_bounds(dims: [usize; 3], f: usize, c1: f64, c2: f64) -> Result<[f64; 3]> {
    if !(1..=3).contains(&f) {
        return Err(Error::Input(format!("party label {f} outside 1..=3")));
    }
    if dims.iter().any(|&d| d < 2) {
        return Err(Error::Input(format!(
            "dimensions must be >= 2, got {dims:?}"
        )));
    }
    let (g, h) = others(f);
    let [df, dg, dh] = [dims[f - 1], dims[g - 1], dims[h - 1]].map(|d| d as f64);
    let (a1, a2) = (c1.abs(), c2.abs());
    let base = (1.0 / (df * dg * dh)).sqrt();
    let cross = a2 * (df / (dg * dh)).sqrt();
    Ok([
        a1 * base + a2 * (1.0 / (dg * dh)).sqrt(),
        a1 * df.min(dh) * base + cross,
        a1 * df.min(dg) * base + cross,
    ])
}

/// (Q₁ + Q₂ + Q₃)/3, each Q_f the largest of that party's three bounds.
pub fn gme_bound(dims: [usize; 3], c: &TripartiteCoefficients) -> Result<f64> {
    let q = gme_q_values(dims, c)?;
    Ok(q.iter().sum::<f64>() / 3.0)
}

pub(super) fn gme_q_values(dims: [usize; 3], c: &TripartiteCoefficients) -> Result<[f64; 3]> {
    let mut q = [0.0; 3];
    for (f, slot) in (1..=3).zip(q.iter_mut()) {
        let (c1, c2) = c.for_party(f);
        *slot = theorem1_bounds(dims, f, c1, c2)?
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
    }
    Ok(q)
}

/// Bound for biseparable states of three d-level parties with
/// c_f1 = c11 and c_f2 = c12 for every f. Defined for c ≥ 0 only.
pub fn corollary1_bound(d: usize, c11: f64, c12: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::Input(format!("dimension must be >= 2, got {d}")));
    }
    if c11 < 0.0 || c12 < 0.0 {
        return Err(Error::Input(format!(
            "coefficients must be nonnegative, got ({c11}, {c12})"
        )));
    }
    let d = d as f64;
    let inv_sqrt = (1.0 / d).sqrt();
    Ok(
        (c11 * (1.0 / (d * d * d)).sqrt() + c12 / d + 2.0 * c11 * inv_sqrt + 2.0 * c12 * inv_sqrt)
            / 3.0,
    )
}

/// √(1/Π dᵢ), the bound for fully separable states and for any single party
/// split from the rest.
pub fn theorem3_bound(dims: &[usize]) -> f64 {
    (1.0 / dims.iter().product::<usize>() as f64).sqrt()
}

/// √(1/Π_{i≠l_n} dᵢ) for the partition matrix.
pub fn theorem4ii_bound(dims: &[usize], p: &PartitionSpec) -> Result<f64> {
    if p.party_count() != dims.len() {
        return Err(Error::Input(format!(
            "partition `{p}` has {} parties, state has {}",
            p.party_count(),
            dims.len()
        )));
    }
    let ln = p.last_label();
    let prod: usize = dims
        .iter()
        .enumerate()
        .filter(|(k, _)| k + 1 != ln)
        .map(|(_, d)| d)
        .product();
    Ok((1.0 / prod as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn theorem1_qubits() {
        let b = theorem1_bounds([2, 2, 2], 1, 1.0, 0.0).unwrap();
        assert_relative_eq!(b[0], (1.0f64 / 8.0).sqrt(), epsilon = 1e-15);
        assert_relative_eq!(b[1], 0.5f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(b[2], 0.5f64.sqrt(), epsilon = 1e-15);
        assert_eq!(theorem1_bounds([3, 4, 2], 2, 0.0, 0.0).unwrap(), [0.0; 3]);
        assert!(theorem1_bounds([2, 2, 2], 0, 1.0, 0.0).is_err());
    }

    #[test]
    fn theorem1_qutrit_pair() {
        let b = theorem1_bounds([3, 3, 2], 3, 0.0, 1.0).unwrap();
        assert_relative_eq!(b[0], (1.0f64 / 9.0).sqrt(), epsilon = 1e-15);
        assert_relative_eq!(b[1], (2.0f64 / 9.0).sqrt(), epsilon = 1e-15);
        // Coefficient signs do not matter.
        assert_eq!(b, theorem1_bounds([3, 3, 2], 3, 0.0, -1.0).unwrap());
    }

    #[test]
    fn theorem1_uses_the_right_minimum() {
        // f = 1 with (d₁, d₂, d₃) = (3, 2, 4): (ii) pairs d_f with d_h = 4, (iii) with d_g = 2.
        let b = theorem1_bounds([3, 2, 4], 1, 1.0, 0.0).unwrap();
        let base = (1.0f64 / 24.0).sqrt();
        assert_relative_eq!(b[1], 3.0 * base, epsilon = 1e-15);
        assert_relative_eq!(b[2], 2.0 * base, epsilon = 1e-15);
    }

    #[test]
    fn gme_bound_takes_maxima() {
        let c = TripartiteCoefficients::default();
        assert_relative_eq!(
            gme_bound([2, 2, 2], &c).unwrap(),
            0.5f64.sqrt(),
            epsilon = 1e-15
        );
        let only = TripartiteCoefficients::parse("0,0,0,0,0,1").unwrap();
        assert_relative_eq!(
            gme_bound([3, 3, 2], &only).unwrap(),
            (2.0f64 / 9.0).sqrt() / 3.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn corollary1_values() {
        let expected = (2.0 * 0.5f64.sqrt() + (1.0f64 / 8.0).sqrt()) / 3.0;
        assert_relative_eq!(
            corollary1_bound(2, 1.0, 0.0).unwrap(),
            expected,
            epsilon = 1e-15
        );
        assert_relative_eq!(expected, 0.58926, epsilon = 1e-5);
        assert_eq!(corollary1_bound(2, 0.0, 0.0).unwrap(), 0.0);
        let d3 = ((1.0f64 / 27.0).sqrt() + 2.0 * (1.0f64 / 3.0).sqrt()) / 3.0;
        assert_relative_eq!(corollary1_bound(3, 1.0, 0.0).unwrap(), d3, epsilon = 1e-15);
        assert!(corollary1_bound(1, 1.0, 0.0).is_err());
        assert!(corollary1_bound(2, -1.0, 0.0).is_err());
    }

    #[test]
    fn n_partite_bounds() {
        assert_relative_eq!(theorem3_bound(&[2, 2, 2, 2]), 0.25);
        let p = PartitionSpec::parse("12|34").unwrap();
        assert_relative_eq!(
            theorem4ii_bound(&[2, 2, 2, 2], &p).unwrap(),
            (1.0f64 / 8.0).sqrt()
        );
        let p = PartitionSpec::parse("4|123").unwrap();
        assert_relative_eq!(
            theorem4ii_bound(&[2, 2, 3, 5], &p).unwrap(),
            (1.0f64 / 20.0).sqrt()
        );
    }
}
