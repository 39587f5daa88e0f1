//! Convex RPCA, `min ||X||_* + gamma ||E||_1 s.t. Y = X + E`, by inexact
//! augmented Lagrangian. Uses the same `mu` schedule as [`crate::solver`].

use serde::{Deserialize, Serialize};

use crate::codelength::sparse_codelength;
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::solver::{default_mu1, soft_threshold, update_sparse, DecompositionResult, IterationRecord, Status};
use crate::svd::top_svd;
use crate::atoms::sparse_from_matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RpcaConfig {
    /// Sparsity weight. `None` means `1 / sqrt(max(m, n))`.
    pub gamma: Option<f64>,
    pub tol: f64,
    pub max_iter: usize,
    pub mu1: Option<f64>,
    pub rho: f64,
}

impl Default for RpcaConfig {
    fn default() -> Self {
        RpcaConfig {
            gamma: None,
            tol: 1e-7,
            max_iter: 500,
            mu1: None,
            rho: 1.5,
        }
    }
}

impl RpcaConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(g) = self.gamma {
            if !(g > 0.0) {
                return Err(Error::InvalidArgument(format!("gamma must be positive, got {g}")));
            }
        }
        if !(self.rho > 1.0) || !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(Error::InvalidArgument("need rho > 1, tol > 0, max_iter > 0".into()));
        }
        if let Some(mu) = self.mu1 {
            if !(mu > 0.0) {
                return Err(Error::InvalidArgument(format!("mu1 must be positive, got {mu}")));
            }
        }
        Ok(())
    }
}

/// Proximal map of `tau ||.||_*`: shrink every singular value by `tau`.
/// Returns the thresholded matrix and its rank.
pub fn singular_value_threshold(m: &DenseMatrix, tau: f64) -> Result<(DenseMatrix, usize)> {
    let k = m.rows().min(m.cols());
    let f = top_svd(m, k)?;
    let mut out = DenseMatrix::zeros(m.rows(), m.cols());
    let mut rank = 0;
    for (i, &s) in f.s.iter().enumerate() {
        let shrunk = soft_threshold(s, tau);
        if shrunk > 0.0 {
            out.add_outer(shrunk, f.u.col(i), f.v.col(i));
            rank += 1;
        }
    }
    Ok((out, rank))
}

pub fn rpca_ialm(y: &DenseMatrix, config: &RpcaConfig) -> Result<DecompositionResult> {
    config.validate()?;
    y.check_finite()?;
    let (m, n) = y.shape();
    let y_norm = y.frobenius_norm();
    if y_norm == 0.0 {
        return Ok(DecompositionResult::trivial(m, n));
    }
    let gamma = config.gamma.unwrap_or(1.0 / (m.max(n) as f64).sqrt());
    let mut mu = config.mu1.unwrap_or_else(|| default_mu1(y));
    let mut x = DenseMatrix::zeros(m, n);
    let mut e = DenseMatrix::zeros(m, n);
    let mut u = DenseMatrix::zeros(m, n);
    let mut history = Vec::new();
    let mut rank_est = 0;

    for iter in 1..=config.max_iter {
        let mut g = y - &e;
        g.axpy(1.0 / mu, &u);
        let (xn, rank) = singular_value_threshold(&g, 1.0 / mu)?;
        x = xn;
        rank_est = rank;

        let mut z = y - &x;
        z.axpy(1.0 / mu, &u);
        e = update_sparse(&z, gamma / mu);

        let mut resid = y - &x;
        resid.axpy(-1.0, &e);
        u.axpy(mu, &resid);
        let feasibility = resid.frobenius_norm() / y_norm;
        history.push(IterationRecord {
            iter,
            feasibility,
            rank_est,
            nnz_est: e.nnz(),
            theta: gamma,
            mu,
            // Objective value `||X||_* + gamma ||E||_1` in the bits column,
            // with the sparse index cost, so traces share one schema.
            codelength_bits: sparse_codelength(&sparse_from_matrix(&e), gamma, m, n)?,
        });
        mu *= config.rho;
        if feasibility <= config.tol {
            let nnz_est = e.nnz();
            return Ok(DecompositionResult {
                x,
                e,
                rank_est,
                nnz_est,
                iters: iter,
                status: Status::Converged,
                history,
            });
        }
    }
    let nnz_est = e.nnz();
    Ok(DecompositionResult {
        x,
        e,
        rank_est,
        nnz_est,
        iters: config.max_iter,
        status: Status::MaxIter,
        history,
    })
}
