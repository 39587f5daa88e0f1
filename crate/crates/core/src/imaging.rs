//! Image stacks as matrices: each frame is vectorized in raster order and
//! becomes one column, one matrix per color channel.

use std::fs::File;
use std::io::{BufWriter, Read};
use std::path::{Path, PathBuf};

use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{DynamicImage, ExtendedColorType, ImageFormat};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::io::save_mdm1;
use crate::mask::BinaryMask;
use crate::matrix::DenseMatrix;
use crate::rng::SeededRng;
use crate::solver::{decompose, DecompositionResult, SolverConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct ImageStack {
    pub h: usize,
    pub w: usize,
    /// One `(h*w) x frames` matrix per channel.
    pub channels: Vec<DenseMatrix>,
}

impl ImageStack {
    pub fn new(h: usize, w: usize, channels: Vec<DenseMatrix>) -> Result<Self> {
        if channels.len() != 1 && channels.len() != 3 {
            return Err(Error::InvalidArgument(format!(
                "stack needs 1 or 3 channels, got {}",
                channels.len()
            )));
        }
        let shape = channels[0].shape();
        if shape.0 != h * w {
            return Err(Error::InvalidArgument(format!(
                "{} rows do not match a {h}x{w} frame",
                shape.0
            )));
        }
        for c in &channels[1..] {
            if c.shape() != shape {
                return Err(Error::ShapeMismatch {
                    expected: shape,
                    found: c.shape(),
                });
            }
        }
        Ok(ImageStack { h, w, channels })
    }

    pub fn gray(h: usize, w: usize, frames: DenseMatrix) -> Result<Self> {
        Self::new(h, w, vec![frames])
    }

    pub fn frames(&self) -> usize {
        self.channels[0].cols()
    }

    pub fn channel_count(&self) -> usize {
        self.channels.len()
    }
}

/// Row-major `h x w` frame to a column.
pub fn vectorize(frame: &[Vec<f64>]) -> Vec<f64> {
    frame.iter().flatten().copied().collect()
}

pub fn unvectorize(col: &[f64], h: usize, w: usize) -> Result<Vec<Vec<f64>>> {
    if col.len() != h * w {
        return Err(Error::LengthMismatch {
            expected: h * w,
            found: col.len(),
        });
    }
    Ok(col.chunks(w).map(<[f64]>::to_vec).collect())
}

fn image_err(path: &Path, message: impl Into<String>) -> Error {
    Error::Image {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

/// Decodes one binary 8-bit PGM or PPM. Returns `(w, h, channels)`.
fn read_pnm(path: &Path) -> Result<(usize, usize, Vec<Vec<u8>>)> {
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| image_err(path, e.to_string()))?;
    let magic = bytes.get(..2).unwrap_or_default();
    if magic != b"P5" && magic != b"P6" {
        return Err(image_err(path, "unsupported format; expected binary PGM (P5) or PPM (P6)"));
    }
    let img = image::load_from_memory_with_format(&bytes, ImageFormat::Pnm)
        .map_err(|e| image_err(path, e.to_string()))?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let planes = match img {
        DynamicImage::ImageLuma8(g) => vec![g.into_raw()],
        DynamicImage::ImageRgb8(rgb) => {
            let raw = rgb.into_raw();
            (0..3).map(|c| raw.iter().skip(c).step_by(3).copied().collect()).collect()
        }
        _ => return Err(image_err(path, "only 8-bit samples (maxval 255) are supported")),
    };
    Ok((w, h, planes))
}

/// Frames in `dir` whose names match `pattern`, in lexicographic order.
pub fn list_frames(dir: &Path, pattern: &str) -> Result<Vec<PathBuf>> {
    let full = dir.join(pattern);
    let full = full
        .to_str()
        .ok_or_else(|| Error::InvalidArgument(format!("non-UTF-8 path {}", full.display())))?;
    let mut paths: Vec<PathBuf> = glob::glob(full)
        .map_err(|e| Error::InvalidArgument(format!("bad pattern {pattern:?}: {e}")))?
        .filter_map(|p| p.ok())
        .filter(|p| p.is_file())
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "no files match {pattern:?} in {}",
            dir.display()
        )));
    }
    Ok(paths)
}

pub fn load_stack(dir: &Path, pattern: &str) -> Result<ImageStack> {
    let paths = list_frames(dir, pattern)?;
    let (w, h, first) = read_pnm(&paths[0])?;
    let n = paths.len();
    let mut channels = vec![DenseMatrix::zeros(h * w, n); first.len()];
    let mut put = |j: usize, planes: &[Vec<u8>]| {
        for (c, plane) in planes.iter().enumerate() {
            for (dst, &v) in channels[c].col_mut(j).iter_mut().zip(plane) {
                *dst = f64::from(v);
            }
        }
    };
    put(0, &first);
    for (j, path) in paths.iter().enumerate().skip(1) {
        let (wj, hj, planes) = read_pnm(path)?;
        if (wj, hj) != (w, h) || planes.len() != first.len() {
            return Err(image_err(
                path,
                format!(
                    "frame is {wj}x{hj} with {} channel(s); expected {w}x{h} with {}",
                    planes.len(),
                    first.len()
                ),
            ));
        }
        put(j, &planes);
    }
    ImageStack::new(h, w, channels)
}

fn to_u8(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

pub fn write_pgm(path: &Path, pixels: &[u8], h: usize, w: usize) -> Result<()> {
    let file = File::create(path).map_err(|e| image_err(path, e.to_string()))?;
    PnmEncoder::new(BufWriter::new(file))
        .with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary))
        .encode(pixels, w as u32, h as u32, ExtendedColorType::L8)
        .map_err(|e| image_err(path, e.to_string()))
}

pub fn write_ppm(path: &Path, rgb: &[u8], h: usize, w: usize) -> Result<()> {
    let file = File::create(path).map_err(|e| image_err(path, e.to_string()))?;
    PnmEncoder::new(BufWriter::new(file))
        .with_subtype(PnmSubtype::Pixmap(SampleEncoding::Binary))
        .encode(rgb, w as u32, h as u32, ExtendedColorType::Rgb8)
        .map_err(|e| image_err(path, e.to_string()))
}

/// Writes each frame as `{prefix}_####.pgm` (or `.ppm` for three channels),
/// clamping and rounding to 8 bits.
pub fn save_stack(stack: &ImageStack, dir: &Path, prefix: &str) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let hw = stack.h * stack.w;
    for j in 0..stack.frames() {
        if stack.channel_count() == 1 {
            let px: Vec<u8> = stack.channels[0].col(j).iter().map(|&v| to_u8(v)).collect();
            write_pgm(&dir.join(format!("{prefix}_{j:04}.pgm")), &px, stack.h, stack.w)?;
        } else {
            let mut px = Vec::with_capacity(3 * hw);
            for k in 0..hw {
                px.extend(stack.channels.iter().map(|c| to_u8(c.get(k, j))));
            }
            write_ppm(&dir.join(format!("{prefix}_{j:04}.ppm")), &px, stack.h, stack.w)?;
        }
    }
    Ok(())
}

/// Decomposes every channel with the predictor set to the frame geometry.
pub fn decompose_stack(stack: &ImageStack, config: &SolverConfig) -> Result<Vec<DecompositionResult>> {
    let config = SolverConfig {
        image_shape: Some((stack.h, stack.w)),
        ..config.clone()
    };
    stack.channels.par_iter().map(|y| decompose(y, &config)).collect()
}

/// `|E_ij| > kappa`.
pub fn foreground_mask(e: &DenseMatrix, kappa: f64) -> Result<BinaryMask> {
    if !(kappa >= 0.0) {
        return Err(Error::InvalidArgument(format!("kappa must be nonnegative, got {kappa}")));
    }
    BinaryMask::new(e.rows(), e.cols(), e.data().iter().map(|v| v.abs() > kappa).collect())
}

/// Writes `low_####.pgm`, `sparse_####.pgm`, `X.mdm1` and `E.mdm1`.
/// Sparse frames show `|E|` scaled so the largest magnitude maps to 255.
pub fn save_components(result: &DecompositionResult, shape: (usize, usize), dir: &Path) -> Result<()> {
    save_components_named(result, shape, dir, "")
}

/// As [`save_components`], with `suffix` appended to each file stem.
pub fn save_components_named(
    result: &DecompositionResult,
    (h, w): (usize, usize),
    dir: &Path,
    suffix: &str,
) -> Result<()> {
    if h * w != result.x.rows() {
        return Err(Error::InvalidArgument(format!(
            "{h}x{w} frames do not match {} rows",
            result.x.rows()
        )));
    }
    std::fs::create_dir_all(dir)?;
    let emax = result.e.max_abs();
    let gain = if emax > 0.0 { 255.0 / emax } else { 0.0 };
    for j in 0..result.x.cols() {
        let low: Vec<u8> = result.x.col(j).iter().map(|&v| to_u8(v)).collect();
        write_pgm(&dir.join(format!("low{suffix}_{j:04}.pgm")), &low, h, w)?;
        let sparse: Vec<u8> = result.e.col(j).iter().map(|&v| to_u8(v.abs() * gain)).collect();
        write_pgm(&dir.join(format!("sparse{suffix}_{j:04}.pgm")), &sparse, h, w)?;
    }
    save_mdm1(&result.x, &dir.join(format!("X{suffix}.mdm1")))?;
    save_mdm1(&result.e, &dir.join(format!("E{suffix}.mdm1")))?;
    Ok(())
}

/// Sets each pixel to 0 or 255 with probability `density`, black and white
/// equally likely.
pub fn add_salt_pepper(m: &DenseMatrix, density: f64, seed: u64) -> Result<DenseMatrix> {
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::InvalidArgument(format!("density must lie in [0, 1], got {density}")));
    }
    let mut rng = SeededRng::new(seed);
    let mut out = m.clone();
    for v in out.data_mut() {
        let hit = rng.uniform() < density;
        let white = rng.uniform() < 0.5;
        if hit {
            *v = if white { 255.0 } else { 0.0 };
        }
    }
    Ok(out)
}

/// Binary masks stored as frames: any nonzero pixel is foreground.
pub fn load_mask_stack(dir: &Path, pattern: &str) -> Result<BinaryMask> {
    let stack = load_stack(dir, pattern)?;
    let c = &stack.channels[0];
    BinaryMask::new(c.rows(), c.cols(), c.data().iter().map(|v| *v > 0.0).collect())
}

pub fn save_mask_stack(mask: &BinaryMask, (h, w): (usize, usize), dir: &Path, prefix: &str) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let (rows, cols) = mask.shape();
    if rows != h * w {
        return Err(Error::InvalidArgument(format!("{h}x{w} frames do not match {rows} rows")));
    }
    for j in 0..cols {
        let px: Vec<u8> = mask.col(j).iter().map(|&b| if b { 255 } else { 0 }).collect();
        write_pgm(&dir.join(format!("{prefix}_{j:04}.pgm")), &px, h, w)?;
    }
    Ok(())
}
