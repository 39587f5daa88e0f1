//! Synthetic benchmarks: planted low-rank plus sparse data, single trials,
//! success-ratio grids, F-measure, and procedurally generated image stacks.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::baselines::{rpca_ialm, RpcaConfig};
use crate::error::{Error, Result};
use crate::mask::BinaryMask;
use crate::matrix::{nrmse, DenseMatrix};
use crate::rng::{derive_seed, SeededRng};
use crate::solver::{decompose, DecompositionResult, SolverConfig};

/// Recovery counts as a success when the low-rank NRMSE is below this.
pub const SUCCESS_EPS: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SyntheticSpec {
    pub m: usize,
    pub n: usize,
    pub r: usize,
    pub p: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 || self.r == 0 || self.r > self.m.min(self.n) {
            return Err(Error::InvalidArgument(format!(
                "need 1 <= r <= min(m, n), got m={} n={} r={}",
                self.m, self.n, self.r
            )));
        }
        if !(0.0..1.0).contains(&self.p) {
            return Err(Error::InvalidArgument(format!("p must be in [0, 1), got {}", self.p)));
        }
        Ok(())
    }

    /// Number of corrupted entries, `round(p m n)`.
    pub fn planted_k(&self) -> usize {
        (self.p * (self.m * self.n) as f64).round() as usize
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticData {
    pub x0: DenseMatrix,
    pub e0: DenseMatrix,
    pub y: DenseMatrix,
}

/// `X0 = B C` with `B` an orthonormal `m x r` basis (QR of Gaussians) and
/// `C ~ U(0, 5)`; `E0` corrupts exactly `round(p m n)` uniformly chosen
/// entries with `N(0, 1)` noise; `Y = X0 + E0`.
pub fn gen_synthetic(spec: &SyntheticSpec) -> Result<SyntheticData> {
    spec.validate()?;
    let SyntheticSpec { m, n, r, .. } = *spec;
    let mut rng = SeededRng::new(spec.seed);

    let gauss = DenseMatrix::from_fn(m, r, |_, _| rng.gaussian());
    let q = gauss.to_nalgebra().qr().q();
    let basis = DenseMatrix::from_nalgebra(&q);
    let weights = DenseMatrix::from_fn(r, n, |_, _| rng.uniform_range(0.0, 5.0));
    let x0 = basis.matmul(&weights)?;

    let mut e0 = DenseMatrix::zeros(m, n);
    for idx in rng.sample_indices(m * n, spec.planted_k()) {
        e0.data_mut()[idx] = rng.gaussian();
    }
    let y = &x0 + &e0;
    Ok(SyntheticData { x0, e0, y })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Mdlan,
    Rpca,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Mdlan => "mdlan",
            Method::Rpca => "rpca",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mdlan" => Ok(Method::Mdlan),
            "rpca" => Ok(Method::Rpca),
            other => Err(Error::InvalidArgument(format!("unknown method {other:?}"))),
        }
    }
}

/// Solver settings for both methods.
#[derive(Debug, Clone, Default)]
pub struct MethodConfigs {
    pub mdlan: SolverConfig,
    pub rpca: RpcaConfig,
}

impl MethodConfigs {
    pub fn run(&self, method: Method, y: &DenseMatrix) -> Result<DecompositionResult> {
        match method {
            Method::Mdlan => decompose(y, &self.mdlan),
            Method::Rpca => rpca_ialm(y, &self.rpca),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub method: Method,
    pub m: usize,
    pub n: usize,
    pub r: usize,
    pub p: f64,
    pub seed: u64,
    pub lr_nrmse: f64,
    /// Undefined when nothing was corrupted.
    pub sp_nrmse: Option<f64>,
    pub rank_est: usize,
    pub nnz_est: usize,
    pub planted_k: usize,
    pub success: bool,
    pub iters: usize,
    pub converged: bool,
    #[serde(skip)]
    pub wall_seconds: f64,
}

pub fn run_trial(spec: &SyntheticSpec, method: Method) -> Result<BenchRecord> {
    run_trial_with(spec, method, &MethodConfigs::default())
}

pub fn run_trial_with(
    spec: &SyntheticSpec,
    method: Method,
    configs: &MethodConfigs,
) -> Result<BenchRecord> {
    let data = gen_synthetic(spec)?;
    let start = Instant::now();
    let res = configs.run(method, &data.y)?;
    let wall_seconds = start.elapsed().as_secs_f64();
    let lr_nrmse = nrmse(&data.x0, &res.x)?;
    let sp_nrmse = if spec.planted_k() > 0 {
        Some(nrmse(&data.e0, &res.e)?)
    } else {
        None
    };
    Ok(BenchRecord {
        method,
        m: spec.m,
        n: spec.n,
        r: spec.r,
        p: spec.p,
        seed: spec.seed,
        lr_nrmse,
        sp_nrmse,
        rank_est: res.rank_est,
        nnz_est: res.nnz_est,
        planted_k: spec.planted_k(),
        success: lr_nrmse < SUCCESS_EPS,
        iters: res.iters,
        converged: res.converged(),
        wall_seconds,
    })
}

/// Trial CSV, one record per row. Wall time is appended only on request
/// so that default output is reproducible byte for byte.
pub fn write_trials<W: Write>(records: &[BenchRecord], w: W, with_timing: bool) -> Result<()> {
    let mut wr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    let mut header = vec![
        "method", "m", "n", "r", "p", "seed", "lr_nrmse", "sp_nrmse", "rank_est", "nnz_est",
        "planted_k", "success", "iters", "converged",
    ];
    if with_timing {
        header.push("wall_seconds");
    }
    wr.write_record(&header)?;
    for rec in records {
        let mut row = vec![
            rec.method.to_string(),
            rec.m.to_string(),
            rec.n.to_string(),
            rec.r.to_string(),
            rec.p.to_string(),
            rec.seed.to_string(),
            rec.lr_nrmse.to_string(),
            rec.sp_nrmse.map(|v| v.to_string()).unwrap_or_default(),
            rec.rank_est.to_string(),
            rec.nnz_est.to_string(),
            rec.planted_k.to_string(),
            rec.success.to_string(),
            rec.iters.to_string(),
            rec.converged.to_string(),
        ];
        if with_timing {
            row.push(rec.wall_seconds.to_string());
        }
        wr.write_record(&row)?;
    }
    wr.flush()?;
    Ok(())
}

/// Aggregate over the trials of one `(method, n, p)` cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridCell {
    pub method: Method,
    pub n: usize,
    pub p: f64,
    pub trials: usize,
    pub success_ratio: f64,
    pub mean_lr_nrmse: f64,
    pub mean_sp_nrmse: Option<f64>,
    pub mean_rank_est: f64,
    pub mean_nnz_est: f64,
}

impl GridCell {
    fn from_records(method: Method, n: usize, p: f64, recs: &[BenchRecord]) -> Self {
        let t = recs.len() as f64;
        let sp: Vec<f64> = recs.iter().filter_map(|r| r.sp_nrmse).collect();
        GridCell {
            method,
            n,
            p,
            trials: recs.len(),
            success_ratio: recs.iter().filter(|r| r.success).count() as f64 / t,
            mean_lr_nrmse: recs.iter().map(|r| r.lr_nrmse).sum::<f64>() / t,
            mean_sp_nrmse: (!sp.is_empty()).then(|| sp.iter().sum::<f64>() / sp.len() as f64),
            mean_rank_est: recs.iter().map(|r| r.rank_est as f64).sum::<f64>() / t,
            mean_nnz_est: recs.iter().map(|r| r.nnz_est as f64).sum::<f64>() / t,
        }
    }
}

/// Seed of trial `trial` in cell `(n, p)`. Both methods see the same data.
pub fn cell_seed(seed: u64, n: usize, p: f64, trial: usize) -> u64 {
    derive_seed(seed, &[n as u64, p.to_bits(), trial as u64])
}

/// Runs every `(method, n, p, trial)` combination in parallel and
/// aggregates per cell. Output order is `methods x n_values x p_values`
/// and does not depend on scheduling.
pub fn run_grid(
    m: usize,
    r: usize,
    n_values: &[usize],
    p_values: &[f64],
    trials: usize,
    methods: &[Method],
    seed: u64,
    configs: &MethodConfigs,
) -> Result<(Vec<GridCell>, Vec<BenchRecord>)> {
    if n_values.is_empty() || p_values.is_empty() || methods.is_empty() || trials == 0 {
        return Err(Error::InvalidArgument("grid axes, methods and trials must be nonempty".into()));
    }
    let mut jobs = Vec::new();
    for &method in methods {
        for &n in n_values {
            for &p in p_values {
                for t in 0..trials {
                    jobs.push((method, n, p, t));
                }
            }
        }
    }
    let records = jobs
        .par_iter()
        .map(|&(method, n, p, t)| {
            let spec = SyntheticSpec {
                m,
                n,
                r,
                p,
                seed: cell_seed(seed, n, p, t),
            };
            run_trial_with(&spec, method, configs)
        })
        .collect::<Result<Vec<_>>>()?;
    let cells = records
        .chunks(trials)
        .zip(jobs.chunks(trials))
        .map(|(recs, job)| GridCell::from_records(job[0].0, job[0].1, job[0].2, recs))
        .collect();
    Ok((cells, records))
}

/// Success-ratio grid over `(n, p)` at fixed `m` and rank.
pub fn phase_grid(
    m: usize,
    r: usize,
    n_values: &[usize],
    p_values: &[f64],
    trials: usize,
    methods: &[Method],
    seed: u64,
) -> Result<Vec<GridCell>> {
    run_grid(m, r, n_values, p_values, trials, methods, seed, &MethodConfigs::default())
        .map(|(cells, _)| cells)
}

pub fn write_grid<W: Write>(cells: &[GridCell], w: W) -> Result<()> {
    let mut wr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    wr.write_record([
        "method",
        "n",
        "p",
        "trials",
        "success_ratio",
        "mean_lr_nrmse",
        "mean_sp_nrmse",
        "mean_rank_est",
        "mean_nnz_est",
    ])?;
    for c in cells {
        wr.write_record([
            c.method.to_string(),
            c.n.to_string(),
            c.p.to_string(),
            c.trials.to_string(),
            c.success_ratio.to_string(),
            c.mean_lr_nrmse.to_string(),
            c.mean_sp_nrmse.map(|v| v.to_string()).unwrap_or_default(),
            c.mean_rank_est.to_string(),
            c.mean_nnz_est.to_string(),
        ])?;
    }
    wr.flush()?;
    Ok(())
}

/// `2 P R / (P + R)`; 0 when there are no true positives.
pub fn f_measure(mask: &BinaryMask, truth: &BinaryMask) -> Result<f64> {
    if mask.shape() != truth.shape() {
        return Err(Error::ShapeMismatch {
            expected: truth.shape(),
            found: mask.shape(),
        });
    }
    if truth.count() == 0 {
        return Err(Error::InvalidArgument("truth mask has no positives".into()));
    }
    let (mut tp, mut fp, mut fneg) = (0usize, 0usize, 0usize);
    for (&a, &b) in mask.data().iter().zip(truth.data()) {
        match (a, b) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fneg += 1,
            _ => {}
        }
    }
    if tp == 0 {
        return Ok(0.0);
    }
    let precision = tp as f64 / (tp + fp) as f64;
    let recall = tp as f64 / (tp + fneg) as f64;
    Ok(2.0 * precision * recall / (precision + recall))
}

/// Frames stacked as columns plus the per-pixel foreground truth.
#[derive(Debug, Clone)]
pub struct SyntheticVideo {
    pub h: usize,
    pub w: usize,
    pub frames: DenseMatrix,
    pub background: DenseMatrix,
    pub truth: BinaryMask,
}

/// Moving bright square over a static textured gradient.
///
/// `illum_drift` scales the background of frame `t` by
/// `1 + illum_drift * sin(2 pi t / frames)`, a rank-1 change. Pixel values
/// are integers in `[0, 255]`.
pub fn gen_synthetic_video(
    h: usize,
    w: usize,
    frames: usize,
    square_size: usize,
    illum_drift: f64,
    seed: u64,
) -> Result<SyntheticVideo> {
    if h == 0 || w == 0 || frames == 0 {
        return Err(Error::InvalidArgument("video dimensions must be positive".into()));
    }
    if square_size > 0 && (square_size + 2 > h || square_size + 2 > w) {
        return Err(Error::InvalidArgument(format!(
            "square of side {square_size} does not fit in {h}x{w} with a 1-pixel margin"
        )));
    }
    let mut rng = SeededRng::new(seed);
    let texture: Vec<f64> = (0..h * w).map(|_| rng.uniform_range(-12.0, 12.0)).collect();
    let base: Vec<f64> = (0..h * w)
        .map(|k| {
            let (r, c) = ((k / w) as f64, (k % w) as f64);
            (50.0 + 80.0 * r / h as f64 + 50.0 * c / w as f64 + texture[k]).round()
        })
        .collect();

    let mut frames_m = DenseMatrix::zeros(h * w, frames);
    let mut background = DenseMatrix::zeros(h * w, frames);
    let mut truth = BinaryMask::falses(h * w, frames);
    let (row_phase, col_phase) = (rng.below(h.max(1)), rng.below(w.max(1)));
    for t in 0..frames {
        let gain = 1.0 + illum_drift * (2.0 * std::f64::consts::PI * t as f64 / frames as f64).sin();
        for k in 0..h * w {
            let v = (base[k] * gain).round().clamp(0.0, 255.0);
            background.set(k, t, v);
            frames_m.set(k, t, v);
        }
        if square_size > 0 {
            let r0 = 1 + bounce(row_phase + t, h - square_size - 2);
            let c0 = 1 + bounce(col_phase + 2 * t, w - square_size - 2);
            for r in r0..r0 + square_size {
                for c in c0..c0 + square_size {
                    frames_m.set(r * w + c, t, 250.0);
                    truth.set(r * w + c, t, true);
                }
            }
        }
    }
    Ok(SyntheticVideo {
        h,
        w,
        frames: frames_m,
        background,
        truth,
    })
}

/// Triangle wave over `0..=span`.
fn bounce(step: usize, span: usize) -> usize {
    if span == 0 {
        return 0;
    }
    let period = 2 * span;
    let s = step % period;
    if s <= span {
        s
    } else {
        period - s
    }
}

/// Stack of face-like images: a rank-1 base (smooth face times a per-frame
/// illumination gain) with one darkened rectangle per frame.
#[derive(Debug, Clone)]
pub struct ShadowedFaces {
    pub h: usize,
    pub w: usize,
    pub clean: DenseMatrix,
    pub observed: DenseMatrix,
    pub shadow: BinaryMask,
}

impl ShadowedFaces {
    /// Planted perturbation `observed - clean`.
    pub fn planted(&self) -> DenseMatrix {
        &self.observed - &self.clean
    }
}

pub fn gen_shadowed_faces(h: usize, w: usize, frames: usize, seed: u64) -> Result<ShadowedFaces> {
    if h < 8 || w < 8 || frames == 0 {
        return Err(Error::InvalidArgument("faces need at least 8x8 pixels and one frame".into()));
    }
    let mut rng = SeededRng::new(seed);
    let face: Vec<f64> = (0..h * w)
        .map(|k| {
            let r = (k / w) as f64 / h as f64 - 0.5;
            let c = (k % w) as f64 / w as f64 - 0.5;
            let oval = (-(r * r) / 0.09 - (c * c) / 0.06).exp();
            let eyes = (-((r + 0.1).powi(2) + (c.abs() - 0.17).powi(2)) / 0.004).exp();
            40.0 + 160.0 * oval - 50.0 * eyes
        })
        .collect();
    let mut clean = DenseMatrix::zeros(h * w, frames);
    let mut shadow = BinaryMask::falses(h * w, frames);
    for t in 0..frames {
        let gain = rng.uniform_range(0.6, 1.0);
        for k in 0..h * w {
            clean.set(k, t, face[k] * gain);
        }
    }
    let mut observed = clean.clone();
    for t in 0..frames {
        let sh = h / 5 + rng.below(h / 6 + 1);
        let sw = w / 5 + rng.below(w / 6 + 1);
        let r0 = rng.below(h - sh + 1);
        let c0 = rng.below(w - sw + 1);
        for r in r0..r0 + sh {
            for c in c0..c0 + sw {
                let k = r * w + c;
                observed.set(k, t, clean.get(k, t) * 0.3);
                shadow.set(k, t, true);
            }
        }
    }
    Ok(ShadowedFaces {
        h,
        w,
        clean,
        observed,
        shadow,
    })
}

/// Fraction of the planted mass inside `region` that `e` recovers:
/// `sum min(|e|, |d|)` over same-sign entries, divided by `sum |d|`.
pub fn captured_fraction(e: &DenseMatrix, planted: &DenseMatrix, region: &BinaryMask) -> f64 {
    let (mut got, mut total) = (0.0, 0.0);
    for ((&ev, &dv), &inside) in e.data().iter().zip(planted.data()).zip(region.data()) {
        if !inside {
            continue;
        }
        total += dv.abs();
        if ev * dv > 0.0 {
            got += ev.abs().min(dv.abs());
        }
    }
    if total == 0.0 {
        1.0
    } else {
        got / total
    }
}
