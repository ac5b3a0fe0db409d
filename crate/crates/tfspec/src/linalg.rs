//! Minimal dense matrix support: storage, LU with partial pivoting, and a
//! 1-norm condition estimate. Systems here are small (N <= 512), so a direct
//! dense factorization is the right tool.

use crate::error::{Error, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
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
    pub fn add_assign(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] += v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// `self * x`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    /// `self + scale * other`, elementwise.
    pub fn add_scaled(&self, other: &DenseMatrix, scale: f64) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| a + scale * b)
            .collect();
        DenseMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn norm_1(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// LU factorization with partial pivoting of a square matrix.
pub struct LuFactors {
    lu: DenseMatrix,
    perm: Vec<usize>,
}

impl LuFactors {
    pub fn new(a: &DenseMatrix, context: &'static str) -> Result<Self> {
        assert_eq!(a.rows, a.cols, "LU needs a square matrix");
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = lu.data.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        for k in 0..n {
            let mut pivot_row = k;
            let mut pivot = lu.get(k, k).abs();
            for i in k + 1..n {
                let v = lu.get(i, k).abs();
                if v > pivot {
                    pivot = v;
                    pivot_row = i;
                }
            }
            if pivot <= f64::EPSILON * scale * n as f64 {
                let condition = condition_from_pivots(&lu, k);
                return Err(Error::SingularMatrix { context, condition });
            }
            if pivot_row != k {
                perm.swap(k, pivot_row);
                for j in 0..n {
                    let tmp = lu.get(k, j);
                    lu.set(k, j, lu.get(pivot_row, j));
                    lu.set(pivot_row, j, tmp);
                }
            }
            let d = lu.get(k, k);
            for i in k + 1..n {
                let m = lu.get(i, k) / d;
                lu.set(i, k, m);
                for j in k + 1..n {
                    let v = lu.get(i, j) - m * lu.get(k, j);
                    lu.set(i, j, v);
                }
            }
        }
        Ok(LuFactors { lu, perm })
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.lu.rows;
        assert_eq!(rhs.len(), n);
        let mut x: Vec<f64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 1..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu.get(i, j) * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu.get(i, j) * x[j];
            }
            x[i] = s / self.lu.get(i, i);
        }
        x
    }

    /// Hager-style estimate of ||A^{-1}||_1 from the factorization.
    pub fn inverse_norm_1_estimate(&self) -> f64 {
        let n = self.lu.rows;
        let mut v = vec![1.0 / n as f64; n];
        let mut best = 0.0f64;
        for _ in 0..5 {
            let y = self.solve(&v);
            let norm: f64 = y.iter().map(|t| t.abs()).sum();
            best = best.max(norm);
            let xi: Vec<f64> = y.iter().map(|&t| if t >= 0.0 { 1.0 } else { -1.0 }).collect();
            let z = self.solve_transposed(&xi);
            let (jmax, zmax) = z
                .iter()
                .enumerate()
                .map(|(j, &t)| (j, t.abs()))
                .fold((0, 0.0), |acc, it| if it.1 > acc.1 { it } else { acc });
            let vz: f64 = v.iter().zip(&z).map(|(&a, &b)| a * b).sum();
            if zmax <= vz.abs() {
                break;
            }
            v = vec![0.0; n];
            v[jmax] = 1.0;
        }
        best
    }

    fn solve_transposed(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.lu.rows;
        // A^T = P^T L^T U^T ... solve U^T w = rhs, L^T y = w, x = P^T y
        let mut w = rhs.to_vec();
        for i in 0..n {
            let mut s = w[i];
            for j in 0..i {
                s -= self.lu.get(j, i) * w[j];
            }
            w[i] = s / self.lu.get(i, i);
        }
        for i in (0..n).rev() {
            let mut s = w[i];
            for j in i + 1..n {
                s -= self.lu.get(j, i) * w[j];
            }
            w[i] = s;
        }
        let mut x = vec![0.0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = w[i];
        }
        x
    }
}

fn condition_from_pivots(lu: &DenseMatrix, upto: usize) -> f64 {
    let mut largest = 0.0f64;
    let mut smallest = f64::INFINITY;
    for k in 0..=upto.min(lu.rows - 1) {
        let p = lu.get(k, k).abs();
        largest = largest.max(p);
        if p > 0.0 {
            smallest = smallest.min(p);
        }
    }
    if smallest.is_finite() && smallest > 0.0 {
        largest / smallest
    } else {
        f64::INFINITY
    }
}

/// Solve `a x = rhs` by LU with partial pivoting and one step of iterative
/// refinement. Fails with a condition estimate when the matrix is singular
/// to working precision.
pub fn lu_solve(a: &DenseMatrix, rhs: &[f64], context: &'static str) -> Result<Vec<f64>> {
    let factors = LuFactors::new(a, context)?;
    let mut x = factors.solve(rhs);
    // one refinement pass tightens the residual at negligible cost
    let res: Vec<f64> = a
        .matvec(&x)
        .iter()
        .zip(rhs)
        .map(|(&ax, &b)| b - ax)
        .collect();
    let dx = factors.solve(&res);
    for (xi, di) in x.iter_mut().zip(&dx) {
        *xi += di;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn from_rows(rows: &[&[f64]]) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(rows.len(), rows[0].len());
        for (i, r) in rows.iter().enumerate() {
            m.row_mut(i).copy_from_slice(r);
        }
        m
    }

    #[test]
    fn solves_small_system() {
        let a = from_rows(&[&[2.0, 1.0, -1.0], &[-3.0, -1.0, 2.0], &[-2.0, 1.0, 2.0]]);
        let x = lu_solve(&a, &[8.0, -11.0, -3.0], "test").unwrap();
        assert_relative_eq!(x[0], 2.0, max_relative = 1e-12);
        assert_relative_eq!(x[1], 3.0, max_relative = 1e-12);
        assert_relative_eq!(x[2], -1.0, max_relative = 1e-12);
    }

    #[test]
    fn residual_small_for_random_system() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 60;
        let mut a = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                a.set(i, j, rng.gen_range(-1.0..1.0));
            }
            a.add_assign(i, i, 4.0);
        }
        let rhs: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x = lu_solve(&a, &rhs, "test").unwrap();
        let res = a
            .matvec(&x)
            .iter()
            .zip(&rhs)
            .map(|(&ax, &b)| (ax - b).abs())
            .fold(0.0f64, f64::max);
        let bnorm = rhs.iter().map(|t| t.abs()).fold(0.0f64, f64::max);
        assert!(res <= 1e-12 * bnorm, "residual {res}");
    }

    #[test]
    fn detects_singular_matrix() {
        let a = from_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        match lu_solve(&a, &[1.0, 2.0], "test") {
            Err(Error::SingularMatrix { condition, .. }) => assert!(condition >= 1.0),
            other => panic!("expected singular-matrix error, got {other:?}"),
        }
    }

    #[test]
    fn condition_estimate_tracks_scaled_identity() {
        let a = from_rows(&[&[1.0, 0.0], &[0.0, 1e-6]]);
        let f = LuFactors::new(&a, "test").unwrap();
        let cond = a.norm_1() * f.inverse_norm_1_estimate();
        assert!((1e5..=1e7).contains(&cond), "cond {cond}");
    }
}
