//! Dense complex matrix with row-major storage.

use num_complex::Complex64;

use super::NumericsError;

/// Dense complex matrix, row-major.
///
/// Constructors reject non-finite entries; all downstream code can assume
/// finite data.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    /// Builds a matrix from row-major data.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self, NumericsError> {
        if data.len() != rows * cols {
            return Err(NumericsError::DimensionMismatch {
                expected: format!("{} entries", rows * cols),
                got: format!("{}", data.len()),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(NumericsError::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Diagonal matrix from real entries.
    pub fn from_diag(diag: &[f64]) -> Self {
        assert!(diag.iter().all(|d| d.is_finite()), "non-finite diagonal entry");
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = Complex64::new(d, 0.0);
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<Complex64>]) -> Self {
        if cols.is_empty() {
            return Self::zeros(0, 0);
        }
        let rows = cols[0].len();
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length mismatch");
            for i in 0..rows {
                m.data[i * cols.len() + j] = c[i];
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.get(i, j).conj();
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, NumericsError> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, NumericsError> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    fn check_same_shape(&self, other: &Self) -> Result<(), NumericsError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(NumericsError::DimensionMismatch {
                expected: format!("{}x{}", self.rows, self.cols),
                got: format!("{}x{}", other.rows, other.cols),
            });
        }
        Ok(())
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &Self) -> Result<Self, NumericsError> {
        if self.cols != other.rows {
            return Err(NumericsError::DimensionMismatch {
                expected: format!("{} rows", self.cols),
                got: format!("{}", other.rows),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let orow = other.row(k);
                let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, b) in out_row.iter_mut().zip(orow) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product `self * x`.
    pub fn mul_vec(&self, x: &[Complex64]) -> Result<Vec<Complex64>, NumericsError> {
        if x.len() != self.cols {
            return Err(NumericsError::DimensionMismatch {
                expected: format!("vector of length {}", self.cols),
                got: format!("{}", x.len()),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(Complex64::new(0.0, 0.0), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    /// Gram matrix `selfᴴ · self` (cols x cols, Hermitian PSD).
    pub fn gram(&self) -> Self {
        let n = self.cols;
        let mut out = Self::zeros(n, n);
        for a in 0..n {
            for b in a..n {
                let mut s = Complex64::new(0.0, 0.0);
                for i in 0..self.rows {
                    s += self.get(i, a).conj() * self.get(i, b);
                }
                out.data[a * n + b] = s;
                out.data[b * n + a] = s.conj();
            }
        }
        // Exactly real diagonal.
        for a in 0..n {
            out.data[a * n + a].im = 0.0;
        }
        out
    }

    /// Gram matrix `self · selfᴴ` (rows x rows, Hermitian PSD).
    pub fn gram_right(&self) -> Self {
        let n = self.rows;
        let mut out = Self::zeros(n, n);
        for a in 0..n {
            for b in a..n {
                let ra = self.row(a);
                let rb = self.row(b);
                let mut s = Complex64::new(0.0, 0.0);
                for (x, y) in ra.iter().zip(rb) {
                    s += x * y.conj();
                }
                out.data[a * n + b] = s;
                out.data[b * n + a] = s.conj();
            }
        }
        for a in 0..n {
            out.data[a * n + a].im = 0.0;
        }
        out
    }

    /// Vertically stacks `√weight_k · blocks_k`; all blocks must share the
    /// column count. Weights must be nonnegative.
    pub fn vstack_scaled(blocks: &[(&CMatrix, f64)]) -> Result<Self, NumericsError> {
        assert!(!blocks.is_empty(), "vstack of zero blocks");
        let cols = blocks[0].0.cols;
        let rows: usize = blocks.iter().map(|(b, _)| b.rows).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for (b, w) in blocks {
            if b.cols != cols {
                return Err(NumericsError::DimensionMismatch {
                    expected: format!("{cols} columns"),
                    got: format!("{}", b.cols),
                });
            }
            debug_assert!(*w >= 0.0);
            let s = w.sqrt();
            data.extend(b.data.iter().map(|z| z * s));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> Complex64 {
        assert_eq!(self.rows, self.cols, "trace of non-square matrix");
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    /// Frobenius distance from the nearest Hermitian matrix scale,
    /// `‖A − Aᴴ‖_F`.
    pub fn hermitian_deviation(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let mut s = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let d = self.get(i, j) - self.get(j, i).conj();
                s += d.norm_sqr();
            }
        }
        s.sqrt()
    }

    /// `xᴴ · self · x` for Hermitian `self`; the imaginary part is roundoff
    /// and is discarded.
    pub fn hermitian_quadratic_form(&self, x: &[Complex64]) -> Result<f64, NumericsError> {
        let ax = self.mul_vec(x)?;
        Ok(x.iter().zip(&ax).map(|(a, b)| (a.conj() * b).re).sum())
    }
}

/// Euclidean norm of a complex vector.
pub(crate) fn vnorm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
