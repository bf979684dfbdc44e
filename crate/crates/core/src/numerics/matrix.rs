use std::io::{BufRead, Write};

use super::NumericsError;

/// Tolerance on `max |U^T U - I|` for every orbital matrix in the crate.
pub const ORTHONORMALITY_TOL: f64 = 1e-10;

/// Dense real matrix, row-major storage.
///
/// Houses the orbital matrix `U`, Hamiltonians, and DPP kernels. Construction
/// through [`Matrix::new`] validates shape and finiteness; the cheap
/// constructors ([`Matrix::zeros`], [`Matrix::identity`]) are trusted.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, NumericsError> {
        if rows == 0 || cols == 0 {
            return Err(NumericsError::InvalidShape(format!(
                "matrix must have at least one row and one column, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(NumericsError::InvalidShape(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(NumericsError::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Build from a closure over (row, col). Entries must come out finite.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.at(i, j)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.at(j, i))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest |A_ij - A_ji|.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols.min(self.rows) {
                worst = worst.max((self.at(i, j) - self.at(j, i)).abs());
            }
        }
        worst
    }

    /// Write in the crate's CSV format: header "rows,cols", then one matrix
    /// row per line, 17 significant digits so values round-trip bit-exact.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<(), NumericsError> {
        writeln!(w, "{},{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: &mut R) -> Result<Self, NumericsError> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| NumericsError::Format("empty file".into()))??;
        let mut parts = header.split(',');
        let rows: usize = parse_dim(parts.next(), "rows")?;
        let cols: usize = parse_dim(parts.next(), "cols")?;
        if parts.next().is_some() {
            return Err(NumericsError::Format("header must be exactly 'rows,cols'".into()));
        }
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            let line = lines
                .next()
                .ok_or_else(|| NumericsError::Format(format!("missing row {}", i + 1)))??;
            for field in line.split(',') {
                let v: f64 = field.trim().parse().map_err(|_| {
                    NumericsError::Format(format!("row {}: bad number {field:?}", i + 1))
                })?;
                data.push(v);
            }
            if data.len() != (i + 1) * cols {
                return Err(NumericsError::Format(format!(
                    "row {} has {} fields, expected {cols}",
                    i + 1,
                    data.len() - i * cols
                )));
            }
        }
        Matrix::new(rows, cols, data)
    }
}

fn parse_dim(field: Option<&str>, name: &str) -> Result<usize, NumericsError> {
    field
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| NumericsError::Format(format!("bad {name} in header")))
}

/// L x N matrix of single-particle wavefunctions stored as columns, with the
/// orthonormality `U^T U = 1` enforced at construction.
///
/// Immutable after construction; shareable across threads.
#[derive(Debug, Clone)]
pub struct OrbitalMatrix {
    matrix: Matrix,
}

impl OrbitalMatrix {
    pub fn new(matrix: Matrix) -> Result<Self, NumericsError> {
        let (l, n) = (matrix.rows(), matrix.cols());
        if n > l {
            return Err(NumericsError::InvalidShape(format!(
                "fermion number {n} exceeds system size {l}"
            )));
        }
        let deviation = gram_deviation(&matrix);
        if deviation > ORTHONORMALITY_TOL {
            return Err(NumericsError::NotOrthonormal { deviation });
        }
        Ok(Self { matrix })
    }

    /// System size L.
    pub fn system_size(&self) -> usize {
        self.matrix.rows()
    }

    /// Fermion number N.
    pub fn fermion_count(&self) -> usize {
        self.matrix.cols()
    }

    /// Orbital amplitudes at site `x`: the length-N row `U_{x,*}`.
    #[inline]
    pub fn site_row(&self, x: usize) -> &[f64] {
        self.matrix.row(x)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// Diagonal of the projection kernel `K = U U^T`: single-site occupation
    /// densities of the N-fermion state.
    pub fn kernel_diagonal(&self) -> Vec<f64> {
        (0..self.system_size())
            .map(|x| self.site_row(x).iter().map(|u| u * u).sum())
            .collect()
    }
}

/// max |U^T U - I| over all entries.
fn gram_deviation(u: &Matrix) -> f64 {
    let n = u.cols();
    let mut worst = 0.0f64;
    for a in 0..n {
        for b in a..n {
            let dot: f64 = (0..u.rows()).map(|x| u.at(x, a) * u.at(x, b)).sum();
            let target = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((dot - target).abs());
        }
    }
    worst
}
