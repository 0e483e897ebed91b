//! Minimal dense matrix arithmetic: just what the trace estimators and the
//! symmetric eigensolver need, tuned enough that 500x500 word products stay
//! cheap.

use crate::error::{Error, Result};

/// Dense row-major f64 matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::domain(format!(
                "matrix data length {} does not fit {rows}x{cols}",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    /// self * other.
    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::domain(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let (m, n, p) = (self.rows, self.cols, other.cols);
        let mut out = Matrix::zeros(m, p);
        for i in 0..m {
            let arow = self.row(i);
            let orow = &mut out.data[i * p..(i + 1) * p];
            for (k, &aik) in arow.iter().enumerate().take(n) {
                if aik == 0.0 {
                    continue;
                }
                let brow = &other.data[k * p..(k + 1) * p];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += aik * b;
                }
            }
        }
        Ok(out)
    }

    /// self * other^T, as dot products of rows.
    pub fn matmul_transb(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.cols {
            return Err(Error::domain(format!(
                "cannot multiply {}x{} by transpose of {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let (m, p) = (self.rows, other.rows);
        let mut out = Matrix::zeros(m, p);
        for i in 0..m {
            let arow = self.row(i);
            for j in 0..p {
                let brow = other.row(j);
                let dot: f64 = arow.iter().zip(brow).map(|(a, b)| a * b).sum();
                out.data[i * p + j] = dot;
            }
        }
        Ok(out)
    }

    /// Tr(self * other) without forming the product.
    pub fn trace_product(&self, other: &Matrix) -> Result<f64> {
        if self.cols != other.rows || self.rows != other.cols {
            return Err(Error::domain(format!(
                "trace of product needs {}x{} times {}x{} to be square",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut t = 0.0;
        for i in 0..self.rows {
            for (k, &a) in self.row(i).iter().enumerate() {
                t += a * other.data[k * other.cols + i];
            }
        }
        Ok(t)
    }

    /// Tr(self * other^T) = entrywise dot product.
    pub fn trace_product_transb(&self, other: &Matrix) -> Result<f64> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::domain(
                "trace of A B^T needs matching shapes".to_string(),
            ));
        }
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum())
    }

    pub fn trace(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::domain("trace of a non-square matrix"));
        }
        Ok((0..self.rows).map(|i| self.get(i, i)).sum())
    }

    /// (scale * self * self^T), symmetrized exactly by construction: only the
    /// upper triangle is computed and mirrored.
    pub fn gram_scaled(&self, scale: f64) -> Matrix {
        let m = self.rows;
        let mut out = Matrix::zeros(m, m);
        for i in 0..m {
            let ri = self.row(i);
            for j in i..m {
                let rj = self.row(j);
                let dot: f64 = ri.iter().zip(rj).map(|(a, b)| a * b).sum();
                let v = scale * dot;
                out.data[i * m + j] = v;
                out.data[j * m + i] = v;
            }
        }
        out
    }

    pub fn scale_in_place(&mut self, s: f64) {
        for v in &mut self.data {
            *v *= s;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Largest |a_ij - a_ji|.
    pub fn max_asymmetry(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::domain("asymmetry of a non-square matrix"));
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i + 1..self.cols {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: usize, cols: usize, v: &[f64]) -> Matrix {
        Matrix::from_vec(rows, cols, v.to_vec()).unwrap()
    }

    #[test]
    fn small_product() {
        let a = m(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let b = m(3, 2, &[7.0, 8.0, 9.0, 10.0, 11.0, 12.0]);
        let c = a.matmul(&b).unwrap();
        assert_eq!(c.data(), &[58.0, 64.0, 139.0, 154.0]);
        assert!(a.matmul(&a).is_err());
    }

    #[test]
    fn transb_matches_explicit_transpose() {
        let a = m(2, 3, &[1.0, -2.0, 0.5, 3.0, 4.0, -1.0]);
        let b = m(4, 3, &[2.0, 1.0, 0.0, -1.0, 0.5, 2.0, 3.0, 3.0, 1.0, 0.0, -2.0, 4.0]);
        assert_eq!(
            a.matmul_transb(&b).unwrap(),
            a.matmul(&b.transpose()).unwrap()
        );
    }

    #[test]
    fn trace_products_match_full_products() {
        let a = m(2, 3, &[1.0, 2.0, 3.0, -1.0, 0.0, 2.0]);
        let b = m(3, 2, &[0.5, 1.0, 2.0, -1.0, 1.5, 0.0]);
        let direct = a.matmul(&b).unwrap().trace().unwrap();
        assert!((a.trace_product(&b).unwrap() - direct).abs() < 1e-14);
        let c = m(2, 3, &[2.0, 0.0, -1.0, 1.0, 1.0, 1.0]);
        let direct = a.matmul(&c.transpose()).unwrap().trace().unwrap();
        assert!((a.trace_product_transb(&c).unwrap() - direct).abs() < 1e-14);
    }

    #[test]
    fn gram_is_exactly_symmetric() {
        let a = m(3, 2, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let g = a.gram_scaled(0.5);
        assert_eq!(g.max_asymmetry().unwrap(), 0.0);
        let dense = a.matmul(&a.transpose()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((g.get(i, j) - 0.5 * dense.get(i, j)).abs() < 1e-14);
            }
        }
    }

    proptest! {
        #[test]
        fn trace_is_cyclic(seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = 4usize;
            let mut a = Matrix::zeros(n, n);
            let mut b = Matrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    a.set(i, j, rng.random::<f64>() - 0.5);
                    b.set(i, j, rng.random::<f64>() - 0.5);
                }
            }
            let ab = a.matmul(&b).unwrap().trace().unwrap();
            let ba = b.matmul(&a).unwrap().trace().unwrap();
            prop_assert!((ab - ba).abs() < 1e-12);
        }

        #[test]
        fn transpose_reverses_products(seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut a = Matrix::zeros(3, 4);
            let mut b = Matrix::zeros(4, 2);
            for v in 0..12 { a.data[v] = rng.random::<f64>() - 0.5; }
            for v in 0..8 { b.data[v] = rng.random::<f64>() - 0.5; }
            let lhs = a.matmul(&b).unwrap().transpose();
            let rhs = b.transpose().matmul(&a.transpose()).unwrap();
            for (x, y) in lhs.data().iter().zip(rhs.data()) {
                prop_assert!((x - y).abs() < 1e-13);
            }
        }
    }
}
