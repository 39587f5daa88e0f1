//! Truncated SVD with a deterministic sign convention.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Leading singular triplets: `u` is `m x k`, `v` is `n x k`, `s` descending.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    pub u: DenseMatrix,
    pub s: Vec<f64>,
    pub v: DenseMatrix,
}

impl SvdFactors {
    pub fn rank(&self) -> usize {
        self.s.len()
    }

    /// `sum_i s_i u_i v_i^T`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.u.rows(), self.v.rows());
        for (i, &s) in self.s.iter().enumerate() {
            out.add_outer(s, self.u.col(i), self.v.col(i));
        }
        out
    }
}

/// The `k` leading singular triplets of `m`.
///
/// Each pair `(u_i, v_i)` is sign-flipped so that the entry of `u_i` with the
/// largest magnitude (first one on ties) is positive.
pub fn top_svd(m: &DenseMatrix, k: usize) -> Result<SvdFactors> {
    m.check_finite()?;
    let (rows, cols) = m.shape();
    let full = rows.min(cols);
    if k == 0 || k > full {
        return Err(Error::InvalidArgument(format!(
            "k = {k} out of range 1..={full} for a {rows}x{cols} matrix"
        )));
    }

    let svd = m.to_nalgebra().svd(true, true);
    let u_all = svd.u.expect("left singular vectors requested");
    let vt_all = svd.v_t.expect("right singular vectors requested");
    let sv = svd.singular_values;

    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]).then(a.cmp(&b)));

    let mut u = DenseMatrix::zeros(rows, k);
    let mut v = DenseMatrix::zeros(cols, k);
    let mut s = Vec::with_capacity(k);
    for (dst, &src) in order.iter().take(k).enumerate() {
        s.push(sv[src].max(0.0));
        for i in 0..rows {
            u.set(i, dst, u_all[(i, src)]);
        }
        for j in 0..cols {
            v.set(j, dst, vt_all[(src, j)]);
        }
        canonicalize_sign(&mut u, &mut v, dst);
    }
    Ok(SvdFactors { u, s, v })
}

/// All singular values, descending.
pub fn singular_values(m: &DenseMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = m
        .to_nalgebra()
        .singular_values()
        .iter()
        .map(|v| v.max(0.0))
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

fn canonicalize_sign(u: &mut DenseMatrix, v: &mut DenseMatrix, col: usize) {
    let uc = u.col(col);
    let mut best = 0;
    for (i, x) in uc.iter().enumerate() {
        if x.abs() > uc[best].abs() {
            best = i;
        }
    }
    if uc[best] < 0.0 {
        u.col_mut(col).iter_mut().for_each(|x| *x = -*x);
        v.col_mut(col).iter_mut().for_each(|x| *x = -*x);
    }
}
