use crate::correlations::CorrelationTensor;
use crate::numerics::RMatrix;
use crate::{Error, Result, Scalar};

use super::PartitionSpec;

fn check_label(l: usize, n: usize) -> Result<()> {
    if l == 0 || l > n {
        return Err(Error::Input(format!("party label {l} outside 1..={n}")));
    }
    Ok(())
}

/// Matricization with rows over `row_labels` and columns over `col_labels`,
/// each flattened with its last label fastest. Together the two lists must
/// name every party exactly once.
pub fn unfold<T: Scalar>(
    t: &CorrelationTensor<T>,
    row_labels: &[usize],
    col_labels: &[usize],
) -> Result<RMatrix<T>> {
    let n = t.party_count();
    let mut seen = vec![false; n];
    for &l in row_labels.iter().chain(col_labels) {
        check_label(l, n)?;
        if std::mem::replace(&mut seen[l - 1], true) {
            return Err(Error::Input(format!("party {l} listed twice")));
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Input("unfolding must use every party".into()));
    }
    let shape = t.shape();
    let rows: usize = row_labels.iter().map(|&l| shape[l - 1]).product();
    let cols: usize = col_labels.iter().map(|&l| shape[l - 1]).product();
    let flatten = |alpha: &[usize], labels: &[usize]| {
        labels
            .iter()
            .fold(0, |acc, &l| acc * shape[l - 1] + alpha[l - 1])
    };
    let mut out = RMatrix::zeros(rows, cols);
    for (flat, v) in t.values().iter().enumerate() {
        let alpha = t.multi_index(flat);
        out[(flatten(&alpha, row_labels), flatten(&alpha, col_labels))] = *v;
    }
    Ok(out)
}

/// B^{f|gh} = c_f1·B₁ + c_f2·B₂ for a tripartite tensor, size
/// d_f² × d_f·d_g²·d_h².
///
/// B₁ holds the f-unfolding in its first d_g²d_h² columns. B₂ splits its rows
/// into d_f groups of d_f; row r sits in column block ⌊r/d_f⌋ and carries the
/// unfolding row d_f² − 1 − r.
pub fn b_matrix_tripartite<T: Scalar>(
    t: &CorrelationTensor<T>,
    f: usize,
    c1: T,
    c2: T,
) -> Result<RMatrix<T>> {
    if t.party_count() != 3 {
        return Err(Error::Dimension(format!(
            "B^{{f|gh}} needs a tripartite tensor, got {} parties",
            t.party_count()
        )));
    }
    check_label(f, 3)?;
    let rest: Vec<usize> = (1..=3).filter(|&l| l != f).collect();
    let unfolded = unfold(t, &[f], &rest)?;
    let df = t.dims()[f - 1];
    let rows = df * df;
    let width = unfolded.ncols();
    let mut out = RMatrix::zeros(rows, df * width);
    for r in 0..rows {
        let block = (r / df) * width;
        let mirrored = rows - 1 - r;
        for c in 0..width {
            out[(r, c)] += c1 * unfolded[(r, c)];
            out[(r, block + c)] += c2 * unfolded[(mirrored, c)];
        }
    }
    Ok(out)
}

/// Rows α_{l₁}; columns the remaining labels in ascending order.
pub fn b_matrix_mode1<T: Scalar>(t: &CorrelationTensor<T>, l1: usize) -> Result<RMatrix<T>> {
    let n = t.party_count();
    check_label(l1, n)?;
    let rest: Vec<usize> = (1..=n).filter(|&l| l != l1).collect();
    unfold(t, &[l1], &rest)
}

/// Partition matrix for the last group against the rest.
///
/// With l_n the final label of the final group and d = d_{l_n}, rows are
/// (a, α over the final group without l_n) and columns are (α over all other
/// labels, j), where α_{l_n} = j·d + a (zero-based). Size
/// d·Π_{last group∖l_n} d² × d·Π_{others} d².
pub fn b_matrix_partition<T: Scalar>(
    t: &CorrelationTensor<T>,
    p: &PartitionSpec,
) -> Result<RMatrix<T>> {
    let n = t.party_count();
    if p.party_count() != n {
        return Err(Error::Input(format!(
            "partition `{p}` has {} parties, tensor has {n}",
            p.party_count()
        )));
    }
    if p.groups().len() < 2 {
        return Err(Error::Input(format!(
            "partition `{p}` needs at least two groups"
        )));
    }
    let shape = t.shape();
    let ln = p.last_label();
    let d = t.dims()[ln - 1];
    let last_group = p.groups().last().expect("at least two groups");
    let mut row_labels: Vec<usize> = last_group.iter().copied().filter(|&l| l != ln).collect();
    row_labels.sort_unstable();
    let col_labels: Vec<usize> = (1..=n).filter(|l| !last_group.contains(l)).collect();

    let inner_rows: usize = row_labels.iter().map(|&l| shape[l - 1]).product();
    let outer_cols: usize = col_labels.iter().map(|&l| shape[l - 1]).product();
    let flatten = |alpha: &[usize], labels: &[usize]| {
        labels
            .iter()
            .fold(0, |acc, &l| acc * shape[l - 1] + alpha[l - 1])
    };
    let mut out = RMatrix::zeros(d * inner_rows, outer_cols * d);
    for (flat, v) in t.values().iter().enumerate() {
        let alpha = t.multi_index(flat);
        let (j, a) = (alpha[ln - 1] / d, alpha[ln - 1] % d);
        let row = a * inner_rows + flatten(&alpha, &row_labels);
        let col = flatten(&alpha, &col_labels) * d + j;
        out[(row, col)] = *v;
    }
    Ok(out)
}
