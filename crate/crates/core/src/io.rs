//! Matrix serialization: headerless CSV and the raw `MDM1` binary format.
//!
//! `MDM1` layout: the 4-byte magic `MDM1`, `u64` rows, `u64` cols, then
//! `rows * cols` little-endian `f64` values in column-major order.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

pub const MDM1_MAGIC: &[u8; 4] = b"MDM1";

pub fn write_mdm1<W: Write>(m: &DenseMatrix, mut w: W) -> Result<()> {
    w.write_all(MDM1_MAGIC)?;
    w.write_all(&(m.rows() as u64).to_le_bytes())?;
    w.write_all(&(m.cols() as u64).to_le_bytes())?;
    let mut buf = Vec::with_capacity(m.data().len() * 8);
    for v in m.data() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_mdm1<R: Read>(mut r: R) -> Result<DenseMatrix> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MDM1_MAGIC {
        return Err(Error::Format("missing MDM1 magic".into()));
    }
    let mut word = [0u8; 8];
    r.read_exact(&mut word)?;
    let rows = u64::from_le_bytes(word) as usize;
    r.read_exact(&mut word)?;
    let cols = u64::from_le_bytes(word) as usize;
    let len = rows
        .checked_mul(cols)
        .ok_or_else(|| Error::Format("MDM1 dimensions overflow".into()))?;
    let mut payload = Vec::new();
    r.read_to_end(&mut payload)?;
    if payload.len() != len * 8 {
        return Err(Error::Format(format!(
            "MDM1 payload has {} bytes, expected {}",
            payload.len(),
            len * 8
        )));
    }
    let data = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    DenseMatrix::new(rows, cols, data)
}

/// One line per matrix row, comma separated, no header.
pub fn write_csv<W: Write>(m: &DenseMatrix, w: W) -> Result<()> {
    let mut wr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    for i in 0..m.rows() {
        wr.write_record((0..m.cols()).map(|j| m.get(i, j).to_string()))?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(r: R) -> Result<DenseMatrix> {
    let mut rd = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(r);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, rec) in rd.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| Error::Format(format!("line {}: bad number {f:?}", line + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
    DenseMatrix::from_rows(&refs)
}

/// Loads a matrix, choosing the format from the `MDM1` magic.
pub fn load_matrix(path: &Path) -> Result<DenseMatrix> {
    let bytes = fs::read(path)?;
    if bytes.starts_with(MDM1_MAGIC) {
        read_mdm1(bytes.as_slice())
    } else {
        read_csv(bytes.as_slice())
    }
}

pub fn save_mdm1(m: &DenseMatrix, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_mdm1(m, &mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

pub fn save_csv(m: &DenseMatrix, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_csv(m, &mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}
