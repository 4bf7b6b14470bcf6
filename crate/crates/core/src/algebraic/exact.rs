//! Small dense linear algebra over `BigRational`.

use num_rational::BigRational;
use num_traits::{One, Zero};

pub(crate) type RatMatrix = Vec<Vec<BigRational>>;

pub(crate) fn det(mut m: RatMatrix) -> BigRational {
    let n = m.len();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &p;
            for c in col..n {
                let t = &f * &m[col][c];
                m[r][c] -= t;
            }
        }
    }
    det
}

/// Solves `m x = b`; `None` when `m` is singular.
pub(crate) fn solve(mut m: RatMatrix, mut b: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = m.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(pivot, col);
        b.swap(pivot, col);
        let p = m[col][col].clone();
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &p;
            for c in col..n {
                let t = &f * &m[col][c];
                m[r][c] -= t;
            }
            let t = &f * &b[col];
            b[r] -= t;
        }
    }
    Some((0..n).map(|i| &b[i] / &m[i][i]).collect())
}

pub(crate) fn trace(m: &RatMatrix) -> BigRational {
    (0..m.len()).fold(BigRational::zero(), |acc, i| acc + &m[i][i])
}
