//! Minimal dense linear algebra used by the benchmark problems and the
//! reference solves: matrix/vector products, an LU solve with partial
//! pivoting and spectral-norm estimation by power iteration.
//!
//! Dimensions stay at desk scale (tens), so nothing here is tuned.

use crate::{Error, Result};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
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

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// `A x`
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `Aᵀ x`
    pub fn matvec_t(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            let xi = x[i];
            for (j, o) in out.iter_mut().enumerate() {
                *o += self.get(i, j) * xi;
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += aik * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn scale(&self, c: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| c * x).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.add(&other.scale(-1.0))
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }

    /// Spectral norm via power iteration on `AᵀA`, run until the Rayleigh
    /// estimate is stable to `tol` (relative).
    pub fn spectral_norm(&self, tol: f64) -> f64 {
        if self.data.iter().all(|&x| x == 0.0) {
            return 0.0;
        }
        // Deterministic start with energy in every direction.
        let mut v: Vec<f64> = (0..self.cols)
            .map(|j| 1.0 + (j as f64 + 1.0).sin() * 0.5)
            .collect();
        let mut est = 0.0f64;
        for _ in 0..100_000 {
            let av = self.matvec(&v);
            let atav = self.matvec_t(&av);
            let norm = atav.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                return 0.0;
            }
            let new_est = av.iter().map(|x| x * x).sum::<f64>().sqrt()
                / v.iter().map(|x| x * x).sum::<f64>().sqrt();
            for (vi, yi) in v.iter_mut().zip(&atav) {
                *vi = yi / norm;
            }
            if (new_est - est).abs() <= tol * new_est.max(1.0) {
                return new_est;
            }
            est = new_est;
        }
        est
    }
}

/// Solves `A x = b` by LU decomposition with partial pivoting.
pub fn lu_solve(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.rows();
    if a.cols() != n || b.len() != n {
        return Err(Error::config("lu_solve requires a square system"));
    }
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let (mut pivot_row, mut pivot_val) = (k, lu.get(k, k).abs());
        for i in k + 1..n {
            let v = lu.get(i, k).abs();
            if v > pivot_val {
                pivot_row = i;
                pivot_val = v;
            }
        }
        if pivot_val == 0.0 {
            return Err(Error::numerical("singular matrix in lu_solve", 0.0));
        }
        if pivot_row != k {
            perm.swap(k, pivot_row);
            for j in 0..n {
                let tmp = lu.get(k, j);
                lu.set(k, j, lu.get(pivot_row, j));
                lu.set(pivot_row, j, tmp);
            }
        }
        for i in k + 1..n {
            let factor = lu.get(i, k) / lu.get(k, k);
            lu.set(i, k, factor);
            for j in k + 1..n {
                lu.set(i, j, lu.get(i, j) - factor * lu.get(k, j));
            }
        }
    }
    // Forward then backward substitution.
    let mut x: Vec<f64> = perm.iter().map(|&p| b[p]).collect();
    for i in 1..n {
        for j in 0..i {
            x[i] -= lu.get(i, j) * x[j];
        }
    }
    for i in (0..n).rev() {
        for j in i + 1..n {
            x[i] -= lu.get(i, j) * x[j];
        }
        x[i] /= lu.get(i, i);
    }
    Ok(x)
}

/// Random orthogonal matrix from the QR factorization of a Gaussian matrix
/// (modified Gram–Schmidt), used to build benchmark matrices with prescribed
/// spectra.
pub fn random_orthogonal(n: usize, rng: &mut dyn rand::RngCore) -> Matrix {
    use rand_distr::{Distribution, StandardNormal};
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    for _ in 0..n {
        let mut col: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        for prev in &cols {
            let proj: f64 = col.iter().zip(prev).map(|(a, b)| a * b).sum();
            for (c, p) in col.iter_mut().zip(prev) {
                *c -= proj * p;
            }
        }
        let norm = col.iter().map(|x| x * x).sum::<f64>().sqrt();
        for c in col.iter_mut() {
            *c /= norm;
        }
        cols.push(col);
    }
    let mut q = Matrix::zeros(n, n);
    for (j, col) in cols.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            q.set(i, j, *v);
        }
    }
    q
}

/// `Q diag(eigs) Qᵀ` — symmetric matrix with prescribed eigenvalues.
pub fn symmetric_with_eigenvalues(eigs: &[f64], rng: &mut dyn rand::RngCore) -> Matrix {
    let n = eigs.len();
    let q = random_orthogonal(n, rng);
    let mut d = Matrix::zeros(n, n);
    for (i, &e) in eigs.iter().enumerate() {
        d.set(i, i, e);
    }
    q.matmul(&d).matmul(&q.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn lu_solves_small_system() {
        let a = Matrix::from_rows(vec![vec![2.0, 1.0], vec![1.0, 3.0]]);
        let x = lu_solve(&a, &[5.0, 10.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert!((x[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn lu_rejects_singular() {
        let a = Matrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(lu_solve(&a, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let a = Matrix::from_rows(vec![vec![0.5, 0.0], vec![0.0, -0.25]]);
        assert!((a.spectral_norm(1e-12) - 0.5).abs() < 1e-10);
    }

    #[test]
    fn prescribed_spectrum_is_recovered() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let a = symmetric_with_eigenvalues(&[0.7, 0.35, 0.1, -0.2], &mut rng);
        assert!((a.spectral_norm(1e-13) - 0.7).abs() < 1e-9);
        // orthogonality of the conjugation: A is symmetric
        for i in 0..4 {
            for j in 0..4 {
                assert!((a.get(i, j) - a.get(j, i)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn matvec_transpose_consistency() {
        let a = Matrix::from_rows(vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]);
        let x = vec![1.0, -1.0, 2.0];
        let y = vec![0.5, 0.25];
        // ⟨Ax, y⟩ = ⟨x, Aᵀy⟩
        let ax = a.matvec(&x);
        let aty = a.matvec_t(&y);
        let lhs: f64 = ax.iter().zip(&y).map(|(p, q)| p * q).sum();
        let rhs: f64 = x.iter().zip(&aty).map(|(p, q)| p * q).sum();
        assert!((lhs - rhs).abs() < 1e-12);
    }
}
