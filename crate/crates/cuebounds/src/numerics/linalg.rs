use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use super::LogReal;
use crate::error::{domain, Result};

/// Dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return domain(format!("{} entries for a {rows}x{cols} matrix", data.len()));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn matmul(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in matmul");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let brow = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// max_{ij} |(A*A − I)_{ij}|
    pub fn unitarity_residual(&self) -> f64 {
        let g = self.adjoint().matmul(self);
        let mut worst = 0.0f64;
        for i in 0..g.rows {
            for j in 0..g.cols {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - target).norm());
            }
        }
        worst
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Determinant as `e^{ln_abs} · phase`; `ln_abs = −∞` for a singular matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexLogDet {
    pub ln_abs: f64,
    pub phase: Complex64,
}

impl ComplexLogDet {
    pub fn is_zero(&self) -> bool {
        self.ln_abs == f64::NEG_INFINITY
    }

    pub fn value(&self) -> Complex64 {
        if self.is_zero() {
            Complex64::new(0.0, 0.0)
        } else {
            self.phase * self.ln_abs.exp()
        }
    }

    pub fn magnitude(&self) -> LogReal {
        LogReal::from_ln(self.ln_abs)
    }
}

/// Determinant by Gaussian elimination with partial row pivoting.
pub fn lu_det(matrix: &ComplexMatrix) -> Result<ComplexLogDet> {
    let n = matrix.rows;
    if n != matrix.cols {
        return domain(format!("determinant of a non-square {}x{} matrix", n, matrix.cols));
    }
    let mut a = matrix.data.clone();
    let mut ln_abs = 0.0;
    let mut phase = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let (piv, pmag) = (col..n)
            .map(|r| (r, a[r * n + col].norm()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pmag == 0.0 || !pmag.is_finite() {
            if pmag.is_finite() {
                return Ok(ComplexLogDet { ln_abs: f64::NEG_INFINITY, phase: Complex64::new(0.0, 0.0) });
            }
            return Err(crate::Error::Numerical("non-finite matrix entry".into()));
        }
        if piv != col {
            for j in 0..n {
                a.swap(col * n + j, piv * n + j);
            }
            phase = -phase;
        }
        let p = a[col * n + col];
        ln_abs += pmag.ln();
        phase *= p / pmag;
        let inv = 1.0 / p;
        for r in col + 1..n {
            let f = a[r * n + col] * inv;
            if f.re == 0.0 && f.im == 0.0 {
                continue;
            }
            for j in col + 1..n {
                let t = a[col * n + j];
                a[r * n + j] -= f * t;
            }
        }
    }
    Ok(ComplexLogDet { ln_abs, phase })
}
