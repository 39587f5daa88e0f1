//! ADMM for low-rank plus sparse recovery with MDL atom selection.
//!
//! Each iteration forms `G = Y - E + U / mu`, takes the SVD atoms of `G` as
//! candidates, keeps those whose energy pays for their codelength, shrinks
//! the remainder into `E`, then updates the multiplier and `mu`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::atoms::{candidate_lowrank_atoms, sparse_from_matrix, synthesize_selected, AtomBasis};
use crate::codelength::{
    basis_codelengths, estimate_theta_with, sparse_codelength, CodelengthModel, PredictorMap,
    ThetaMode,
};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Initial penalty; overrides `mu1_rule` when set.
    pub mu1: Option<f64>,
    pub mu1_rule: Mu1Rule,
    pub rho: f64,
    pub theta1: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// Number of candidate atoms per iteration; `None` means `min(m, n)`.
    pub r_hat_cap: Option<usize>,
    pub model: CodelengthModel,
    /// `(h, w)` of the images stacked as columns.
    pub image_shape: Option<(usize, usize)>,
    pub theta_mode: ThetaMode,
    /// Median `|Y|` that `Y` is rescaled to before coding; `None` codes `Y`
    /// as given. Results are mapped back to the input units.
    pub working_scale: Option<f64>,
    /// Keep the previous `theta` when the sparse update comes back empty.
    pub hold_theta: bool,
}

/// How the initial penalty is chosen when `mu1` is unset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mu1Rule {
    /// `c / ||Y||_2`.
    Spectral(f64),
    /// `c * 2 s_1 / alpha_1^2` for the leading atom of `Y`: `c` times the
    /// penalty at which that atom first pays for itself.
    FirstAtom(f64),
}

impl Default for Mu1Rule {
    fn default() -> Self {
        Mu1Rule::Spectral(1.25)
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            mu1: None,
            mu1_rule: Mu1Rule::default(),
            rho: 1.5,
            theta1: 1.0,
            tol: 1e-7,
            max_iter: 500,
            r_hat_cap: None,
            model: CodelengthModel::default(),
            image_shape: None,
            theta_mode: ThetaMode::Support,
            working_scale: Some(WORKING_SCALE),
            hold_theta: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 1.0) {
            return Err(Error::InvalidArgument(format!("rho must exceed 1, got {}", self.rho)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tol must be positive, got {}", self.tol)));
        }
        if !(self.theta1 > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "theta1 must be positive, got {}",
                self.theta1
            )));
        }
        if let Some(mu) = self.mu1 {
            if !(mu > 0.0) || !mu.is_finite() {
                return Err(Error::InvalidArgument(format!("mu1 must be positive, got {mu}")));
            }
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidArgument("max_iter must be positive".into()));
        }
        if self.r_hat_cap == Some(0) {
            return Err(Error::InvalidArgument("r_hat_cap must be positive".into()));
        }
        if let Some(c) = self.working_scale {
            if !(c > 0.0) || !c.is_finite() {
                return Err(Error::InvalidArgument(format!("working_scale must be positive, got {c}")));
            }
        }
        let (Mu1Rule::Spectral(c) | Mu1Rule::FirstAtom(c)) = self.mu1_rule;
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidArgument(format!("mu1 rule factor must be positive, got {c}")));
        }
        self.model.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Converged,
    MaxIter,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::MaxIter => "max-iter",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iter: usize,
    /// `||Y - X - E||_F / ||Y||_F`.
    pub feasibility: f64,
    pub rank_est: usize,
    pub nnz_est: usize,
    pub theta: f64,
    pub mu: f64,
    pub codelength_bits: f64,
}

#[derive(Debug, Clone)]
pub struct DecompositionResult {
    pub x: DenseMatrix,
    pub e: DenseMatrix,
    pub rank_est: usize,
    pub nnz_est: usize,
    pub iters: usize,
    pub status: Status,
    pub history: Vec<IterationRecord>,
}

impl DecompositionResult {
    pub fn converged(&self) -> bool {
        self.status == Status::Converged
    }

    pub fn final_feasibility(&self) -> f64 {
        self.history.last().map_or(0.0, |r| r.feasibility)
    }

    pub(crate) fn trivial(rows: usize, cols: usize) -> Self {
        DecompositionResult {
            x: DenseMatrix::zeros(rows, cols),
            e: DenseMatrix::zeros(rows, cols),
            rank_est: 0,
            nnz_est: 0,
            iters: 1,
            status: Status::Converged,
            history: vec![IterationRecord {
                iter: 1,
                feasibility: 0.0,
                rank_est: 0,
                nnz_est: 0,
                theta: 1.0,
                mu: 0.0,
                codelength_bits: 0.0,
            }],
        }
    }
}

/// Writes the per-iteration trace as CSV.
pub fn write_trace<W: Write>(history: &[IterationRecord], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for rec in history {
        wr.serialize(rec)?;
    }
    wr.flush()?;
    Ok(())
}

/// `sign(x) max(|x| - tau, 0)`.
#[inline]
pub fn soft_threshold(x: f64, tau: f64) -> f64 {
    if x > tau {
        x - tau
    } else if x < -tau {
        x + tau
    } else {
        0.0
    }
}

/// `I_tau(x)`: 1 when `x - tau >= 0`.
#[inline]
pub fn shrink_indicator(x: f64, tau: f64) -> u8 {
    u8::from(x - tau >= 0.0)
}

/// Entrywise soft-thresholding, the proximal map of `tau ||.||_1`.
pub fn update_sparse(z: &DenseMatrix, tau: f64) -> DenseMatrix {
    z.map(|v| soft_threshold(v, tau))
}

/// Minimizes `(1/mu) sum v_i s_i + 1/2 ||sum v_i alpha_i psi_i - G||_F^2`
/// over binary `v` for an orthogonal basis. The objective separates per
/// atom, giving `v_i = 1` iff `alpha_i^2 / 2 >= s_i / mu` (and `alpha_i > 0`).
pub fn select_atoms(basis: &AtomBasis, s: &[f64], mu: f64) -> Result<Vec<bool>> {
    if s.len() != basis.len() {
        return Err(Error::LengthMismatch {
            expected: basis.len(),
            found: s.len(),
        });
    }
    if !(mu > 0.0) {
        return Err(Error::InvalidArgument(format!("mu must be positive, got {mu}")));
    }
    Ok(basis
        .coeffs()
        .iter()
        .zip(s)
        .map(|(&a, &si)| a > 0.0 && 0.5 * a * a >= si / mu)
        .collect())
}

fn predictor_for(y: &DenseMatrix, config: &SolverConfig) -> Result<PredictorMap> {
    match config.image_shape {
        Some((h, w)) => {
            if h * w != y.rows() {
                return Err(Error::InvalidArgument(format!(
                    "image shape {h}x{w} does not match {} rows",
                    y.rows()
                )));
            }
            PredictorMap::new(h, w)
        }
        None => PredictorMap::for_column(y.rows()),
    }
}

pub const WORKING_SCALE: f64 = 9.0;

/// Median of `|Y|`, or the mean of `|Y|` when more than half the entries
/// are zero. Positive for any nonzero `Y`.
pub fn typical_magnitude(y: &DenseMatrix) -> f64 {
    let mut a: Vec<f64> = y.data().iter().map(|v| v.abs()).collect();
    let mid = a.len() / 2;
    let (_, med, _) = a.select_nth_unstable_by(mid, f64::total_cmp);
    let med = *med;
    if med > 0.0 {
        med
    } else {
        a.iter().sum::<f64>() / a.len() as f64
    }
}

/// `1.25 / ||Y||_2`.
pub fn default_mu1(y: &DenseMatrix) -> f64 {
    1.25 / y.spectral_norm()
}

/// Initial penalty for `y` under `rule`.
pub fn initial_mu(y: &DenseMatrix, rule: Mu1Rule, map: &PredictorMap, model: &CodelengthModel) -> Result<f64> {
    let spectral = |c: f64| c / y.spectral_norm();
    match rule {
        Mu1Rule::Spectral(c) => Ok(spectral(c)),
        Mu1Rule::FirstAtom(c) => {
            let b = candidate_lowrank_atoms(y, 1)?;
            let s = basis_codelengths(&b, map, model)?;
            let a = b.coeffs()[0];
            if s[0] > 0.0 && a > 0.0 {
                Ok(c * 2.0 * s[0] / (a * a))
            } else {
                Ok(default_mu1(y))
            }
        }
    }
}

/// Splits `y` into a low-rank `X` and a sparse `E`.
pub fn decompose(y: &DenseMatrix, config: &SolverConfig) -> Result<DecompositionResult> {
    config.validate()?;
    y.check_finite()?;
    let map = predictor_for(y, config)?;
    let (m, n) = y.shape();
    let y_norm = y.frobenius_norm();
    if y_norm == 0.0 {
        return Ok(DecompositionResult::trivial(m, n));
    }

    let gain = config.working_scale.map_or(1.0, |c| c / typical_magnitude(y));
    if gain != 1.0 {
        let mut r = run(&y.scale(gain), config, &map)?;
        let inv = 1.0 / gain;
        r.x = r.x.scale(inv);
        r.e = r.e.scale(inv);
        for h in &mut r.history {
            h.theta *= inv;
        }
        return Ok(r);
    }
    run(y, config, &map)
}

fn run(y: &DenseMatrix, config: &SolverConfig, map: &PredictorMap) -> Result<DecompositionResult> {
    let (m, n) = y.shape();
    let y_norm = y.frobenius_norm();
    let r_hat = config.r_hat_cap.unwrap_or(m.min(n)).min(m.min(n));
    let mut mu = match config.mu1 {
        Some(mu) => mu,
        None => initial_mu(y, config.mu1_rule, map, &config.model)?,
    };
    let mut theta = config.theta1;
    let mut x = DenseMatrix::zeros(m, n);
    let mut e = DenseMatrix::zeros(m, n);
    let mut u = DenseMatrix::zeros(m, n);
    let mut history = Vec::new();
    let mut rank_est = 0;

    for iter in 1..=config.max_iter {
        // G = Y - E + U / mu
        let mut g = y - &e;
        g.axpy(1.0 / mu, &u);

        let basis = candidate_lowrank_atoms(&g, r_hat)?;
        let s = basis_codelengths(&basis, map, &config.model)?;
        let mask = select_atoms(&basis, &s, mu)?;
        x = synthesize_selected(&basis, &mask);
        rank_est = mask.iter().filter(|k| **k).count();
        let lowrank_bits: f64 = s.iter().zip(&mask).filter(|(_, k)| **k).map(|(b, _)| b).sum();

        // E = S_{theta/mu}[Y - X + U / mu]
        let mut z = y - &x;
        z.axpy(1.0 / mu, &u);
        e = update_sparse(&z, theta / mu);

        let mut resid = y - &x;
        resid.axpy(-1.0, &e);
        u.axpy(mu, &resid);
        let feasibility = resid.frobenius_norm() / y_norm;

        let sparse_bits = sparse_codelength(&sparse_from_matrix(&e), theta, m, n)?;
        history.push(IterationRecord {
            iter,
            feasibility,
            rank_est,
            nnz_est: e.nnz(),
            theta,
            mu,
            codelength_bits: lowrank_bits + sparse_bits,
        });

        mu *= config.rho;
        if !(config.hold_theta && e.nnz() == 0) {
            theta = estimate_theta_with(&e, config.theta_mode);
        }

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
