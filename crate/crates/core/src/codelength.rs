//! Codelength assignments for the MDL cost.
//!
//! Low-rank atoms are encoded column by column: each column is reshaped to
//! an `h x w` image, run through the causal bilinear predictor
//! (`north + west - northwest`, zero padded), quantized with step 1 and
//! charged `-log2 p(q)` under a Laplace or Laplace-plus-Gaussian (LG) model.
//! Sparse entries cost a Laplace coefficient term plus a `log2(mn)` index.

use std::collections::BTreeMap;
use std::f64::consts::{LN_2, PI, SQRT_2};

use statrs::function::erf::erfc;

use crate::atoms::{AtomBasis, SparseAtomSet};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Quantization step.
pub const DELTA: f64 = 1.0;

/// Smallest admissible `sigma_floor`. At or above it the LG density never
/// exceeds `1 / (sqrt(2 pi) sigma) <= 1`, so every per-entry cost is >= 0.
pub const MIN_SIGMA_FLOOR: f64 = 0.398_942_280_401_432_7;

/// Causal bilinear predictor for an `h x w` raster-order image.
///
/// The residual operator `W` is unit lower triangular; it is applied as a
/// stencil and never materialized outside of tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PredictorMap {
    h: usize,
    w: usize,
}

impl PredictorMap {
    pub fn new(h: usize, w: usize) -> Result<Self> {
        if h == 0 || w == 0 {
            return Err(Error::InvalidArgument(format!("predictor shape {h}x{w} is empty")));
        }
        Ok(PredictorMap { h, w })
    }

    /// A column of length `m` treated as an `m x 1` image, which reduces the
    /// stencil to a first difference.
    pub fn for_column(m: usize) -> Result<Self> {
        Self::new(m, 1)
    }

    pub fn height(&self) -> usize {
        self.h
    }

    pub fn width(&self) -> usize {
        self.w
    }

    pub fn len(&self) -> usize {
        self.h * self.w
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if n != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                found: n,
            });
        }
        Ok(())
    }

    /// `W a`: `a[r,c] - (a[r-1,c] + a[r,c-1] - a[r-1,c-1])`.
    pub fn residual(&self, column: &[f64]) -> Result<Vec<f64>> {
        self.check_len(column.len())?;
        let w = self.w;
        let mut out = vec![0.0; column.len()];
        for r in 0..self.h {
            for c in 0..w {
                let idx = r * w + c;
                let north = if r > 0 { column[idx - w] } else { 0.0 };
                let west = if c > 0 { column[idx - 1] } else { 0.0 };
                let nw = if r > 0 && c > 0 { column[idx - w - 1] } else { 0.0 };
                out[idx] = column[idx] - (north + west - nw);
            }
        }
        Ok(out)
    }

    /// Solves `W a = residual` by forward substitution in raster order.
    pub fn reconstruct(&self, residual: &[f64]) -> Result<Vec<f64>> {
        self.check_len(residual.len())?;
        let w = self.w;
        let mut a = vec![0.0; residual.len()];
        for r in 0..self.h {
            for c in 0..w {
                let idx = r * w + c;
                let north = if r > 0 { a[idx - w] } else { 0.0 };
                let west = if c > 0 { a[idx - 1] } else { 0.0 };
                let nw = if r > 0 && c > 0 { a[idx - w - 1] } else { 0.0 };
                a[idx] = residual[idx] + north + west - nw;
            }
        }
        Ok(a)
    }

    /// Dense `W`, for inspection.
    pub fn to_dense(&self) -> DenseMatrix {
        let n = self.len();
        let mut out = DenseMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            let col = self.residual(&e).expect("length matches");
            out.col_mut(j).copy_from_slice(&col);
            e[j] = 0.0;
        }
        out
    }
}

/// `build_predictor`.
pub fn build_predictor(h: usize, w: usize) -> Result<PredictorMap> {
    PredictorMap::new(h, w)
}

/// `W column` for a predictor map.
pub fn prediction_residual(map: &PredictorMap, column: &[f64]) -> Result<Vec<f64>> {
    map.residual(column)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodelengthKind {
    Laplace,
    #[default]
    Lg,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CodelengthModel {
    pub kind: CodelengthKind,
    pub sigma_floor: f64,
}

impl Default for CodelengthModel {
    fn default() -> Self {
        CodelengthModel {
            kind: CodelengthKind::Lg,
            sigma_floor: 0.5,
        }
    }
}

impl CodelengthModel {
    pub fn new(kind: CodelengthKind, sigma_floor: f64) -> Result<Self> {
        let m = CodelengthModel { kind, sigma_floor };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_floor >= MIN_SIGMA_FLOOR) || !self.sigma_floor.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "sigma_floor must be finite and >= {MIN_SIGMA_FLOOR}, got {}",
                self.sigma_floor
            )));
        }
        Ok(())
    }
}

/// `ln erfc(z)` without underflow for large `z`.
fn ln_erfc(z: f64) -> f64 {
    if z < 1.0 {
        erfc(z).ln()
    } else if z < 26.0 {
        // erfc(z) e^{z^2} stays representable on this range
        (erfc(z) * (z * z).exp()).ln() - z * z
    } else {
        let z2 = z * z;
        let series = 1.0 - 1.0 / (2.0 * z2) + 3.0 / (4.0 * z2 * z2) - 15.0 / (8.0 * z2 * z2 * z2);
        (series / (z * PI.sqrt())).ln() - z2
    }
}

fn ln_add_exp(a: f64, b: f64) -> f64 {
    let hi = a.max(b);
    let lo = a.min(b);
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// Natural log of the Laplace(0, theta) * Gaussian(0, sigma^2) convolution.
pub fn lg_ln_density(x: f64, sigma: f64, theta: f64) -> f64 {
    let shift = sigma / (SQRT_2 * theta);
    let scaled = x / (SQRT_2 * sigma);
    let plus = x / theta + ln_erfc(scaled + shift);
    let minus = -x / theta + ln_erfc(-scaled + shift);
    -(4.0 * theta).ln() + sigma * sigma / (2.0 * theta * theta) + ln_add_exp(plus, minus)
}

/// `-log2 p_LG(x | sigma^2, theta)`.
pub fn lg_neglog2(x: f64, sigma: f64, theta: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::InvalidArgument(format!("non-finite sample {x}")));
    }
    if !(sigma > 0.0) || !(theta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "sigma and theta must be positive, got {sigma}, {theta}"
        )));
    }
    Ok(-lg_ln_density(x, sigma, theta) / LN_2)
}

/// `-log2 p_Laplace(x | theta)`.
pub fn laplace_neglog2(x: f64, theta: f64) -> f64 {
    ((2.0 * theta).ln() + x.abs() / theta) / LN_2
}

/// Histogram and moments of the quantized residual of one scaled atom.
struct QuantizedResidual {
    counts: BTreeMap<i64, u64>,
    total: u64,
    sum: f64,
    sum_sq: f64,
    sum_abs: f64,
    min_col_var: f64,
}

fn quantize(x: f64) -> i64 {
    (x / DELTA).round_ties_even() as i64
}

fn quantized_residual(pred: &[f64], alpha: f64, v: &[f64]) -> QuantizedResidual {
    let mut counts = BTreeMap::new();
    let (mut sum, mut sum_sq, mut sum_abs) = (0.0, 0.0, 0.0);
    let mut min_col_var = f64::INFINITY;
    let m = pred.len() as f64;
    let mut col_counts: Vec<(i64, u64)> = Vec::new();
    for &vj in v {
        let c = alpha * vj;
        let (mut cs, mut css) = (0.0, 0.0);
        col_counts.clear();
        if c == 0.0 {
            col_counts.push((0, pred.len() as u64));
        } else {
            // A column is c * pred; runs of equal quantized values are common
            // (smooth images), so accumulate them before touching the map.
            let mut run: Option<(i64, u64)> = None;
            for &p in pred {
                let q = quantize(c * p);
                let qf = q as f64;
                cs += qf;
                css += qf * qf;
                run = match run {
                    Some((rq, n)) if rq == q => Some((rq, n + 1)),
                    Some(prev) => {
                        col_counts.push(prev);
                        Some((q, 1))
                    }
                    None => Some((q, 1)),
                };
            }
            col_counts.extend(run);
        }
        for &(q, n) in &col_counts {
            *counts.entry(q).or_insert(0) += n;
            sum_abs += (q.unsigned_abs() as f64) * n as f64;
        }
        let mean = cs / m;
        min_col_var = min_col_var.min((css / m - mean * mean).max(0.0));
        sum += cs;
        sum_sq += css;
    }
    QuantizedResidual {
        counts,
        total: (pred.len() * v.len()) as u64,
        sum,
        sum_sq,
        sum_abs,
        min_col_var,
    }
}

/// Fitted LG parameters `(sigma, theta)` for a quantized residual.
fn fit_lg(q: &QuantizedResidual, floor: f64) -> (f64, f64) {
    let n = q.total as f64;
    let var = if q.total > 1 {
        ((q.sum_sq - q.sum * q.sum / n) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    let sigma2 = (floor * floor).max(q.min_col_var);
    let theta = 0.5 * (var - sigma2).max(floor * floor).sqrt();
    (sigma2.sqrt(), theta)
}

fn histogram_bits(q: &QuantizedResidual, model: &CodelengthModel) -> f64 {
    match model.kind {
        CodelengthKind::Lg => {
            let (sigma, theta) = fit_lg(q, model.sigma_floor);
            q.counts
                .iter()
                .map(|(&v, &n)| n as f64 * (-lg_ln_density(v as f64, sigma, theta) - DELTA.ln()))
                .sum::<f64>()
                / LN_2
        }
        CodelengthKind::Laplace => {
            let theta = (q.sum_abs / q.total as f64).max(model.sigma_floor);
            q.counts
                .iter()
                .map(|(&v, &n)| n as f64 * (laplace_neglog2(v as f64, theta) - DELTA.log2()))
                .sum()
        }
    }
}

/// Codelength in bits of the scaled atom `alpha u v^T`.
///
/// Column `j` of the residual is `(alpha v_j) W u`, so the prediction is
/// computed once per atom.
pub fn lowrank_atom_codelength(
    u: &[f64],
    v: &[f64],
    alpha: f64,
    map: &PredictorMap,
    model: &CodelengthModel,
) -> Result<f64> {
    model.validate()?;
    if v.is_empty() {
        return Err(Error::InvalidArgument("atom has no columns".into()));
    }
    if !alpha.is_finite() {
        return Err(Error::InvalidArgument(format!("non-finite coefficient {alpha}")));
    }
    let pred = map.residual(u)?;
    let q = quantized_residual(&pred, alpha, v);
    Ok(histogram_bits(&q, model))
}

/// Codelengths of every atom in a basis.
pub fn basis_codelengths(
    basis: &AtomBasis,
    map: &PredictorMap,
    model: &CodelengthModel,
) -> Result<Vec<f64>> {
    (0..basis.len())
        .map(|i| lowrank_atom_codelength(basis.u(i), basis.v(i), basis.coeffs()[i], map, model))
        .collect()
}

/// `theta * sum |beta_i| + k log2(mn)`.
pub fn sparse_codelength(entries: &SparseAtomSet, theta: f64, m: usize, n: usize) -> Result<f64> {
    if !(theta > 0.0) {
        return Err(Error::InvalidArgument(format!("theta must be positive, got {theta}")));
    }
    let l1: f64 = entries.entries().iter().map(|e| e.2.abs()).sum();
    Ok(theta * l1 + entries.len() as f64 * ((m * n) as f64).log2())
}

/// How the Laplace scale is re-estimated from the sparse component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThetaMode {
    /// Mean of `|E_ij|` over the nonzero support (Laplace MLE over `beta`).
    #[default]
    Support,
    /// Mean of `|E_ij|` over all `mn` entries.
    All,
}

/// Mean absolute value over the nonzero support; 1 for an all-zero matrix.
pub fn estimate_theta(e: &DenseMatrix) -> f64 {
    estimate_theta_with(e, ThetaMode::Support)
}

pub fn estimate_theta_with(e: &DenseMatrix, mode: ThetaMode) -> f64 {
    let (sum, nnz) = e
        .data()
        .iter()
        .filter(|v| **v != 0.0)
        .fold((0.0, 0usize), |(s, k), v| (s + v.abs(), k + 1));
    if nnz == 0 {
        return 1.0;
    }
    match mode {
        ThetaMode::Support => sum / nnz as f64,
        ThetaMode::All => sum / e.data().len() as f64,
    }
}
