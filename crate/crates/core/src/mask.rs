use crate::error::{Error, Result};

/// Binary matrix, column-major like [`crate::DenseMatrix`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    rows: usize,
    cols: usize,
    data: Vec<bool>,
}

impl BinaryMask {
    pub fn new(rows: usize, cols: usize, data: Vec<bool>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(BinaryMask { rows, cols, data })
    }

    pub fn falses(rows: usize, cols: usize) -> Self {
        BinaryMask {
            rows,
            cols,
            data: vec![false; rows * cols],
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [bool] {
        &mut self.data
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[j * self.rows + i]
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.data[j * self.rows + i] = value;
    }

    pub fn col(&self, j: usize) -> &[bool] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|b| **b).count()
    }
}
