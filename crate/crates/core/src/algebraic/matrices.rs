use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{poly, NumberField};
use crate::error::{Error, Result};

/// Vandermonde `V` (column `k` is `(1, alpha_k, ..., alpha_k^{d-1})`), its
/// inverse, the integer companion matrix `C` and the diagonal `D` of roots,
/// related by `CV = VD`.
#[derive(Debug, Clone)]
pub struct FieldMatrices {
    v: DMatrix<Complex64>,
    v_inv: DMatrix<Complex64>,
    companion: Vec<Vec<i64>>,
    diag: Vec<Complex64>,
}

impl FieldMatrices {
    pub fn new(field: &NumberField) -> Result<Self> {
        let d = field.degree();
        let roots = field.roots();
        let v = DMatrix::from_fn(d, d, |i, k| roots[k].powu(i as u32));
        let p: Vec<f64> = field
            .coeffs()
            .iter()
            .map(|&c| c as f64)
            .chain(std::iter::once(1.0))
            .collect();
        // row k of V^{-1} holds the coefficients of P(X) / ((X - alpha_k) P'(alpha_k))
        let mut v_inv = DMatrix::zeros(d, d);
        for (k, &z) in roots.iter().enumerate() {
            let q = poly::deflate_complex(&p, z);
            let dp: Complex64 = roots
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, &w)| z - w)
                .product();
            for i in 0..d {
                v_inv[(k, i)] = q[i] / dp;
            }
        }
        let mut companion = vec![vec![0i64; d]; d];
        for i in 0..d.saturating_sub(1) {
            companion[i][i + 1] = 1;
        }
        for j in 0..d {
            companion[d - 1][j] = -field.coeffs()[j];
        }
        let m = FieldMatrices { v, v_inv, companion, diag: roots.to_vec() };
        let scale = field.alpha().abs().max(1.0).powi(d as i32);
        let res = m.intertwining_residual();
        if res > 1e-8 * scale {
            return Err(Error::Precision(format!("|CV - VD| = {res:e} exceeds 1e-8")));
        }
        Ok(m)
    }

    pub fn v(&self) -> &DMatrix<Complex64> {
        &self.v
    }

    pub fn v_inv(&self) -> &DMatrix<Complex64> {
        &self.v_inv
    }

    pub fn companion(&self) -> &[Vec<i64>] {
        &self.companion
    }

    pub fn companion_complex(&self) -> DMatrix<Complex64> {
        let d = self.diag.len();
        DMatrix::from_fn(d, d, |i, j| Complex64::new(self.companion[i][j] as f64, 0.0))
    }

    /// Diagonal entries of `D`, i.e. the roots.
    pub fn diag(&self) -> &[Complex64] {
        &self.diag
    }

    pub fn d_matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.diag))
    }

    /// `det V = prod_{i<j} (alpha_j - alpha_i)`.
    pub fn det_v(&self) -> Complex64 {
        let r = &self.diag;
        let mut det = Complex64::new(1.0, 0.0);
        for i in 0..r.len() {
            for j in i + 1..r.len() {
                det *= r[j] - r[i];
            }
        }
        det
    }

    /// `max |CV - VD|`.
    pub fn intertwining_residual(&self) -> f64 {
        let lhs = self.companion_complex() * &self.v;
        let rhs = &self.v * self.d_matrix();
        max_abs(&(lhs - rhs))
    }

    /// `max |V^{-1} C - D V^{-1}|`.
    pub fn dual_residual(&self) -> f64 {
        let lhs = &self.v_inv * self.companion_complex();
        let rhs = self.d_matrix() * &self.v_inv;
        max_abs(&(lhs - rhs))
    }
}

pub(crate) fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

impl NumberField {
    pub fn matrices(&self) -> Result<FieldMatrices> {
        FieldMatrices::new(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_vandermonde() {
        let f = NumberField::new(&[-1, -1]).unwrap();
        let m = f.matrices().unwrap();
        assert!((m.det_v().norm() - 5f64.sqrt()).abs() < 1e-14);
        assert_eq!(m.companion(), &[vec![0, 1], vec![1, 1]]);
        let id = m.v() * m.v_inv();
        for i in 0..2 {
            for j in 0..2 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((id[(i, j)] - e).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn residuals_and_discriminant() {
        for c in [vec![-1, -1], vec![-1, -1, 0], vec![-8, -2, -1], vec![-1, 0, 0, -1]] {
            let f = NumberField::new(&c).unwrap();
            let m = f.matrices().unwrap();
            assert!(m.intertwining_residual() < 1e-10, "{c:?}");
            assert!(m.dual_residual() < 1e-10, "{c:?}");
            let disc = f.discriminant().to_string().parse::<f64>().unwrap().abs();
            let det2 = m.det_v().norm_sqr();
            assert!((det2 - disc).abs() < 1e-9 * disc, "{c:?}: {det2} vs {disc}");
        }
    }

    #[test]
    fn lagrange_rows() {
        let f = NumberField::new(&[-1, -1, 0]).unwrap();
        let m = f.matrices().unwrap();
        for k in 0..3 {
            for (l, &z) in f.roots().iter().enumerate() {
                let q: Complex64 = (0..3).map(|i| m.v_inv()[(k, i)] * z.powu(i as u32)).sum();
                let e = if k == l { 1.0 } else { 0.0 };
                assert!((q - e).norm() < 1e-12);
            }
        }
    }
}
