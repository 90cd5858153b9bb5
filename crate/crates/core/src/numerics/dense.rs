//! Row-major dense matrices and the elementwise/matmul kernels the model is
//! built from. Every kernel has a fixed summation order so repeated runs are
//! bit-identical on one platform.

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum DenseError {
    #[error("shape mismatch in {context}: left is {left_rows}x{left_cols}, right is {right_rows}x{right_cols}")]
    ShapeMismatch {
        context: &'static str,
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("data length {len} does not match {rows}x{cols}")]
    LengthMismatch { rows: usize, cols: usize, len: usize },
    #[error("non-finite value at row {row}, col {col}")]
    NonFinite { row: usize, col: usize },
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Dense<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Dense { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    /// Builds from row-major data, rejecting NaN/Inf entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self, DenseError> {
        if data.len() != rows * cols {
            return Err(DenseError::LengthMismatch { rows, cols, len: data.len() });
        }
        for (i, v) in data.iter().enumerate() {
            if !v.is_finite() {
                return Err(DenseError::NonFinite { row: i / cols.max(1), col: i % cols.max(1) });
            }
        }
        Ok(Dense { rows, cols, data })
    }

    pub fn from_rows(rows_in: &[Vec<T>]) -> Result<Self, DenseError> {
        let rows = rows_in.len();
        let cols = rows_in.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows * cols);
        for r in rows_in {
            if r.len() != cols {
                return Err(DenseError::LengthMismatch { rows, cols, len: r.len() });
            }
            data.extend_from_slice(r);
        }
        Self::from_vec(rows, cols, data)
    }

    /// Identity matrix of size n.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    fn same_shape(&self, other: &Self, context: &'static str) -> Result<(), DenseError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(DenseError::ShapeMismatch {
                context,
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        Ok(())
    }

    /// `self * other`, accumulated over the inner index in ascending order.
    pub fn matmul(&self, other: &Self) -> Result<Self, DenseError> {
        if self.cols != other.rows {
            return Err(DenseError::ShapeMismatch {
                context: "matmul",
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let a_row = self.row(i);
            let out_row = out.row_mut(i);
            for (k, &a) in a_row.iter().enumerate() {
                let b_row = other.row(k);
                for (o, &b) in out_row.iter_mut().zip(b_row.iter()) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self^T * other` without materializing the transpose.
    pub fn matmul_tn(&self, other: &Self) -> Result<Self, DenseError> {
        if self.rows != other.rows {
            return Err(DenseError::ShapeMismatch {
                context: "matmul_tn",
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        let mut out = Self::zeros(self.cols, other.cols);
        for k in 0..self.rows {
            let a_row = self.row(k);
            let b_row = other.row(k);
            for (i, &a) in a_row.iter().enumerate() {
                let out_row = out.row_mut(i);
                for (o, &b) in out_row.iter_mut().zip(b_row.iter()) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self * other^T`.
    pub fn matmul_nt(&self, other: &Self) -> Result<Self, DenseError> {
        if self.cols != other.cols {
            return Err(DenseError::ShapeMismatch {
                context: "matmul_nt",
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        let mut out = Self::zeros(self.rows, other.rows);
        for i in 0..self.rows {
            let a_row = self.row(i);
            for j in 0..other.rows {
                let b_row = other.row(j);
                let mut acc = T::zero();
                for (&a, &b) in a_row.iter().zip(b_row.iter()) {
                    acc += a * b;
                }
                out.data[i * other.rows + j] = acc;
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    /// Entrywise max(0, x).
    pub fn relu(&self) -> Self {
        let data = self.data.iter().map(|&v| if v > T::zero() { v } else { T::zero() }).collect();
        Dense { rows: self.rows, cols: self.cols, data }
    }

    /// ReLU gradient: passes `grad` where the preactivation is > 0, zero
    /// elsewhere (subgradient at 0 taken as 0).
    pub fn relu_backward(pre: &Self, grad: &Self) -> Result<Self, DenseError> {
        pre.same_shape(grad, "relu_backward")?;
        let data = pre
            .data
            .iter()
            .zip(grad.data.iter())
            .map(|(&p, &g)| if p > T::zero() { g } else { T::zero() })
            .collect();
        Ok(Dense { rows: pre.rows, cols: pre.cols, data })
    }

    /// Numerically stable row-wise softmax (per-row max subtraction).
    pub fn row_softmax(&self) -> Self {
        let mut out = self.clone();
        for i in 0..self.rows {
            let row = out.row_mut(i);
            if row.is_empty() {
                continue;
            }
            let max = row.iter().cloned().fold(T::neg_infinity(), T::max);
            let mut sum = T::zero();
            for v in row.iter_mut() {
                *v = (*v - max).exp();
                sum += *v;
            }
            for v in row.iter_mut() {
                *v /= sum;
            }
        }
        out
    }

    /// Backward through row_softmax: given s = softmax(x) and upstream g,
    /// dx_ij = s_ij * (g_ij - sum_k g_ik s_ik).
    pub fn row_softmax_backward(softmax: &Self, grad: &Self) -> Result<Self, DenseError> {
        softmax.same_shape(grad, "row_softmax_backward")?;
        let mut out = Self::zeros(softmax.rows, softmax.cols);
        for i in 0..softmax.rows {
            let s = softmax.row(i);
            let g = grad.row(i);
            let mut dot = T::zero();
            for (&sv, &gv) in s.iter().zip(g.iter()) {
                dot += sv * gv;
            }
            for (j, o) in out.row_mut(i).iter_mut().enumerate() {
                *o = s[j] * (g[j] - dot);
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self, DenseError> {
        self.same_shape(other, "add")?;
        let data = self.data.iter().zip(other.data.iter()).map(|(&a, &b)| a + b).collect();
        Ok(Dense { rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, DenseError> {
        self.same_shape(other, "sub")?;
        let data = self.data.iter().zip(other.data.iter()).map(|(&a, &b)| a - b).collect();
        Ok(Dense { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, s: T) -> Self {
        let data = self.data.iter().map(|&v| v * s).collect();
        Dense { rows: self.rows, cols: self.cols, data }
    }

    /// self += other * s
    pub fn add_scaled_assign(&mut self, other: &Self, s: T) -> Result<(), DenseError> {
        self.same_shape(other, "add_scaled_assign")?;
        for (a, &b) in self.data.iter_mut().zip(other.data.iter()) {
            *a += b * s;
        }
        Ok(())
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &v| acc.max(v.abs()))
    }

    /// Max absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T, DenseError> {
        self.same_shape(other, "max_abs_diff")?;
        let mut m = T::zero();
        for (&a, &b) in self.data.iter().zip(other.data.iter()) {
            m = m.max((a - b).abs());
        }
        Ok(m)
    }

    pub fn is_all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = Dense<f64>;

    #[test]
    fn matmul_identity() {
        let a = M::identity(2);
        let b = M::from_rows(&[vec![3.0, -1.0], vec![0.5, 2.0]]).unwrap();
        assert_eq!(a.matmul(&b).unwrap(), b);
    }

    #[test]
    fn matmul_hand_sum() {
        let a = M::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let b = M::from_rows(&[vec![1.0], vec![1.0]]).unwrap();
        let c = a.matmul(&b).unwrap();
        assert_eq!(c.data(), &[3.0, 7.0]);
    }

    #[test]
    fn matmul_matches_naive_triple_loop() {
        let mut rng = crate::rng::stream(42, 0);
        let a = crate::rng::uniform_matrix::<f64>(&mut rng, 7, 5, 1.0);
        let b = crate::rng::uniform_matrix::<f64>(&mut rng, 5, 3, 1.0);
        let fast = a.matmul(&b).unwrap();
        // independent oracle: naive i,j,k triple loop
        let mut oracle = M::zeros(7, 3);
        for i in 0..7 {
            for j in 0..3 {
                let mut acc = 0.0;
                for k in 0..5 {
                    acc += a.get(i, k) * b.get(k, j);
                }
                oracle.set(i, j, acc);
            }
        }
        assert!(fast.max_abs_diff(&oracle).unwrap() <= 1e-12);
    }

    #[test]
    fn matmul_shape_mismatch_rejected() {
        let a = M::zeros(2, 3);
        let b = M::zeros(2, 3);
        assert!(matches!(a.matmul(&b), Err(DenseError::ShapeMismatch { .. })));
    }

    #[test]
    fn matmul_associative_within_tolerance() {
        let mut rng = crate::rng::stream(7, 1);
        let a = crate::rng::uniform_matrix::<f64>(&mut rng, 4, 6, 1.0);
        let b = crate::rng::uniform_matrix::<f64>(&mut rng, 6, 5, 1.0);
        let c = crate::rng::uniform_matrix::<f64>(&mut rng, 5, 3, 1.0);
        let left = a.matmul(&b).unwrap().matmul(&c).unwrap();
        let right = a.matmul(&b.matmul(&c).unwrap()).unwrap();
        assert!(left.max_abs_diff(&right).unwrap() <= 1e-10);
    }

    #[test]
    fn transposed_matmuls_match_explicit_transpose() {
        let mut rng = crate::rng::stream(3, 2);
        let a = crate::rng::uniform_matrix::<f64>(&mut rng, 4, 3, 1.0);
        let b = crate::rng::uniform_matrix::<f64>(&mut rng, 4, 2, 1.0);
        let tn = a.matmul_tn(&b).unwrap();
        let explicit = a.transpose().matmul(&b).unwrap();
        assert!(tn.max_abs_diff(&explicit).unwrap() <= 1e-12);

        let c = crate::rng::uniform_matrix::<f64>(&mut rng, 5, 3, 1.0);
        let nt = a.matmul_nt(&c).unwrap();
        let explicit = a.matmul(&c.transpose()).unwrap();
        assert!(nt.max_abs_diff(&explicit).unwrap() <= 1e-12);
    }

    #[test]
    fn relu_basics() {
        let m = M::from_rows(&[vec![-1.0, 2.0]]).unwrap();
        assert_eq!(m.relu().data(), &[0.0, 2.0]);
        let neg = M::from_rows(&[vec![-3.0, -0.1], vec![-2.0, -5.0]]).unwrap();
        assert!(neg.relu().data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn relu_gradient_convention() {
        let pre = M::from_rows(&[vec![-0.5, 0.5, 0.0]]).unwrap();
        let g = M::from_rows(&[vec![1.0, 1.0, 1.0]]).unwrap();
        let back = M::relu_backward(&pre, &g).unwrap();
        // zero at x = -0.5, pass at x = 0.5, zero at the kink itself
        assert_eq!(back.data(), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn softmax_uniform_and_stability() {
        let m = M::from_rows(&[vec![0.0, 0.0]]).unwrap().row_softmax();
        assert!((m.get(0, 0) - 0.5).abs() < 1e-15);

        let big = M::from_rows(&[vec![1000.0, 0.0]]).unwrap().row_softmax();
        assert!(big.is_all_finite());
        assert!(big.get(0, 0) > 0.999999);
        assert!(big.get(0, 1) < 1e-6);
    }

    #[test]
    fn softmax_closed_form() {
        let m = M::from_rows(&[vec![2.0f64.ln(), 0.0]]).unwrap().row_softmax();
        assert!((m.get(0, 0) - 2.0 / 3.0).abs() <= 1e-12);
        assert!((m.get(0, 1) - 1.0 / 3.0).abs() <= 1e-12);
    }

    #[test]
    fn nonfinite_rejected_at_construction() {
        let err = M::from_vec(1, 2, vec![1.0, f64::NAN]);
        assert!(matches!(err, Err(DenseError::NonFinite { row: 0, col: 1 })));
    }
}
