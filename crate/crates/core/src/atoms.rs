//! Atomic sets and the synthesis/analysis operators.
//!
//! A low-rank atom is a unit-Frobenius rank-1 matrix `u v^T` with
//! `||u|| = ||v|| = 1`; it is stored as the factor pair, never densely.
//! A sparse atom is a single coordinate `(i, j)`.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::svd::top_svd;

const UNIT_TOL: f64 = 1e-10;

/// Ordered rank-1 atoms `(u_i, v_i)` with nonnegative, descending coefficients.
#[derive(Debug, Clone)]
pub struct AtomBasis {
    rows: usize,
    cols: usize,
    // u_i occupies u[i*rows..(i+1)*rows], likewise v.
    u: Vec<f64>,
    v: Vec<f64>,
    coeffs: Vec<f64>,
}

impl AtomBasis {
    pub fn empty(rows: usize, cols: usize) -> Self {
        AtomBasis {
            rows,
            cols,
            u: Vec::new(),
            v: Vec::new(),
            coeffs: Vec::new(),
        }
    }

    /// Builds a basis from explicit factor pairs, checking unit norms and
    /// coefficient ordering.
    pub fn new(
        rows: usize,
        cols: usize,
        atoms: Vec<(Vec<f64>, Vec<f64>)>,
        coeffs: Vec<f64>,
    ) -> Result<Self> {
        if atoms.len() != coeffs.len() {
            return Err(Error::LengthMismatch {
                expected: atoms.len(),
                found: coeffs.len(),
            });
        }
        let mut basis = AtomBasis::empty(rows, cols);
        for (idx, (u, v)) in atoms.into_iter().enumerate() {
            if u.len() != rows || v.len() != cols {
                return Err(Error::ShapeMismatch {
                    expected: (rows, cols),
                    found: (u.len(), v.len()),
                });
            }
            for (name, vec) in [("u", &u), ("v", &v)] {
                let norm = vec.iter().map(|x| x * x).sum::<f64>().sqrt();
                if (norm - 1.0).abs() > UNIT_TOL {
                    return Err(Error::InvalidArgument(format!(
                        "atom {idx}: ||{name}|| = {norm}, expected 1"
                    )));
                }
            }
            basis.u.extend(u);
            basis.v.extend(v);
        }
        if coeffs.iter().any(|a| !(*a >= 0.0) || !a.is_finite()) {
            return Err(Error::InvalidArgument("coefficients must be finite and >= 0".into()));
        }
        if coeffs.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument("coefficients must be descending".into()));
        }
        basis.coeffs = coeffs;
        Ok(basis)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn u(&self, i: usize) -> &[f64] {
        &self.u[i * self.rows..(i + 1) * self.rows]
    }

    pub fn v(&self, i: usize) -> &[f64] {
        &self.v[i * self.cols..(i + 1) * self.cols]
    }

    /// Atomic-norm upper bound `sum_i alpha_i`.
    pub fn coefficient_sum(&self) -> f64 {
        self.coeffs.iter().sum()
    }
}

/// `F_Psi alpha = sum_i alpha_i u_i v_i^T`.
pub fn synthesize(basis: &AtomBasis) -> DenseMatrix {
    synthesize_selected(basis, &vec![true; basis.len()])
}

/// Synthesis restricted to atoms whose mask entry is set.
pub fn synthesize_selected(basis: &AtomBasis, mask: &[bool]) -> DenseMatrix {
    assert_eq!(mask.len(), basis.len());
    let mut out = DenseMatrix::zeros(basis.rows, basis.cols);
    for (i, &keep) in mask.iter().enumerate() {
        if keep && basis.coeffs[i] != 0.0 {
            out.add_outer(basis.coeffs[i], basis.u(i), basis.v(i));
        }
    }
    out
}

/// Adjoint `F_Psi^* M = [<M, psi_1>, ..., <M, psi_r>]`, with
/// `<M, u v^T> = u^T M v`.
pub fn analyze(basis: &AtomBasis, m: &DenseMatrix) -> Result<Vec<f64>> {
    if m.shape() != basis.shape() {
        return Err(Error::ShapeMismatch {
            expected: basis.shape(),
            found: m.shape(),
        });
    }
    Ok((0..basis.len())
        .map(|i| {
            let u = basis.u(i);
            basis
                .v(i)
                .iter()
                .enumerate()
                .map(|(j, &vj)| vj * m.col(j).iter().zip(u).map(|(a, b)| a * b).sum::<f64>())
                .sum()
        })
        .collect())
}

/// Candidate low-rank atoms of `g`: the `r_hat` leading singular pairs,
/// with the singular values as coefficients. These maximize `<g, psi>`
/// over unit rank-1 atoms.
pub fn candidate_lowrank_atoms(g: &DenseMatrix, r_hat: usize) -> Result<AtomBasis> {
    let f = top_svd(g, r_hat)?;
    let (rows, cols) = g.shape();
    let mut basis = AtomBasis::empty(rows, cols);
    for i in 0..r_hat {
        basis.u.extend_from_slice(f.u.col(i));
        basis.v.extend_from_slice(f.v.col(i));
    }
    basis.coeffs = f.s;
    Ok(basis)
}

/// One-sparse atoms `(i, j, beta)` with unique coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseAtomSet {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl SparseAtomSet {
    pub fn new(rows: usize, cols: usize, entries: Vec<(usize, usize, f64)>) -> Result<Self> {
        let mut seen = std::collections::HashSet::with_capacity(entries.len());
        for &(i, j, _) in &entries {
            if i >= rows || j >= cols {
                return Err(Error::InvalidArgument(format!(
                    "coordinate ({i}, {j}) outside {rows}x{cols}"
                )));
            }
            if !seen.insert((i, j)) {
                return Err(Error::InvalidArgument(format!("duplicate coordinate ({i}, {j})")));
            }
        }
        Ok(SparseAtomSet { rows, cols, entries })
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.rows, self.cols);
        for &(i, j, b) in &self.entries {
            out.set(i, j, b);
        }
        out
    }
}

/// The nonzero coordinates of `e`, column-major order.
pub fn sparse_from_matrix(e: &DenseMatrix) -> SparseAtomSet {
    let mut entries = Vec::new();
    for j in 0..e.cols() {
        for (i, &x) in e.col(j).iter().enumerate() {
            if x != 0.0 {
                entries.push((i, j, x));
            }
        }
    }
    SparseAtomSet {
        rows: e.rows(),
        cols: e.cols(),
        entries,
    }
}
