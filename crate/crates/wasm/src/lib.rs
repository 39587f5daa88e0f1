//! Browser bindings for the demo page in `www/`.

use wasm_bindgen::prelude::*;

use mdlan::bench::{f_measure, gen_synthetic_video, run_trial, Method, SyntheticSpec};
use mdlan::codelength::{laplace_neglog2, lg_neglog2};
use mdlan::imaging::foreground_mask;
use mdlan::{decompose, SolverConfig};

fn js_err(e: mdlan::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// A decomposed synthetic video, kept in memory so frames can be browsed.
#[wasm_bindgen]
pub struct VideoDemo {
    h: usize,
    w: usize,
    frames: usize,
    observed: Vec<f64>,
    low: Vec<f64>,
    sparse: Vec<f64>,
    rank: usize,
    iters: usize,
    f_measure: f64,
}

#[wasm_bindgen]
impl VideoDemo {
    #[wasm_bindgen(constructor)]
    pub fn new(
        h: usize,
        w: usize,
        frames: usize,
        square: usize,
        drift: f64,
        seed: u64,
    ) -> Result<VideoDemo, JsError> {
        let video = gen_synthetic_video(h, w, frames, square, drift, seed).map_err(js_err)?;
        let config = SolverConfig {
            image_shape: Some((h, w)),
            ..SolverConfig::default()
        };
        let r = decompose(&video.frames, &config).map_err(js_err)?;
        let mask = foreground_mask(&r.e, 0.0).map_err(js_err)?;
        let f = f_measure(&mask, &video.truth).map_err(js_err)?;
        Ok(VideoDemo {
            h,
            w,
            frames,
            observed: video.frames.into_data(),
            low: r.x.into_data(),
            sparse: r.e.into_data(),
            rank: r.rank_est,
            iters: r.iters,
            f_measure: f,
        })
    }

    #[wasm_bindgen(getter)]
    pub fn height(&self) -> usize {
        self.h
    }

    #[wasm_bindgen(getter)]
    pub fn width(&self) -> usize {
        self.w
    }

    #[wasm_bindgen(getter)]
    pub fn frames(&self) -> usize {
        self.frames
    }

    #[wasm_bindgen(getter)]
    pub fn rank(&self) -> usize {
        self.rank
    }

    #[wasm_bindgen(getter)]
    pub fn iters(&self) -> usize {
        self.iters
    }

    #[wasm_bindgen(getter, js_name = fMeasure)]
    pub fn f_measure(&self) -> f64 {
        self.f_measure
    }

    /// RGBA pixels of frame `j` for `layer` 0 (input), 1 (low-rank) or
    /// 2 (|sparse|, stretched to full range).
    pub fn rgba(&self, layer: u8, j: usize) -> Result<Vec<u8>, JsError> {
        if j >= self.frames {
            return Err(JsError::new(&format!("frame {j} out of range")));
        }
        let hw = self.h * self.w;
        let src = match layer {
            0 => &self.observed,
            1 => &self.low,
            2 => &self.sparse,
            _ => return Err(JsError::new("layer must be 0, 1 or 2")),
        };
        let col = &src[j * hw..(j + 1) * hw];
        let gain = if layer == 2 {
            let m = col.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            if m > 0.0 {
                255.0 / m
            } else {
                0.0
            }
        } else {
            1.0
        };
        Ok(col
            .iter()
            .flat_map(|&v| {
                let g = (v.abs() * gain).round().clamp(0.0, 255.0) as u8;
                let g = if layer == 2 { g } else { v.round().clamp(0.0, 255.0) as u8 };
                [g, g, g, 255]
            })
            .collect())
    }
}

/// One synthetic trial. Returns `[lr_nrmse, sp_nrmse, rank_est, nnz_est,
/// planted_k, iters]`; `sp_nrmse` is NaN when `p = 0`.
#[wasm_bindgen(js_name = syntheticTrial)]
pub fn synthetic_trial(m: usize, n: usize, r: usize, p: f64, seed: u64, method: &str) -> Result<Vec<f64>, JsError> {
    let method: Method = method.parse().map_err(js_err)?;
    let rec = run_trial(&SyntheticSpec { m, n, r, p, seed }, method).map_err(js_err)?;
    Ok(vec![
        rec.lr_nrmse,
        rec.sp_nrmse.unwrap_or(f64::NAN),
        rec.rank_est as f64,
        rec.nnz_est as f64,
        rec.planted_k as f64,
        rec.iters as f64,
    ])
}

/// Bits per quantized residual at `steps` evenly spaced points over
/// `[lo, hi]`, for the Laplace-Gaussian model and, interleaved, pure
/// Laplace with the same `theta`: `[lg_0, laplace_0, lg_1, ...]`.
#[wasm_bindgen(js_name = codelengthCurve)]
pub fn codelength_curve(sigma: f64, theta: f64, lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>, JsError> {
    if steps < 2 || !(hi > lo) {
        return Err(JsError::new("need steps >= 2 and hi > lo"));
    }
    if !(sigma > 0.0 && theta > 0.0) {
        return Err(JsError::new("sigma and theta must be positive"));
    }
    let mut out = Vec::with_capacity(2 * steps);
    for k in 0..steps {
        let x = lo + (hi - lo) * k as f64 / (steps - 1) as f64;
        out.push(lg_neglog2(x, sigma, theta).map_err(js_err)?);
        out.push(laplace_neglog2(x, theta));
    }
    Ok(out)
}
