use std::fmt;
use std::ops::Mul;


use super::field::Field;
use crate::error::{Error, Result};

/// A dense square matrix over a field.
#[derive(Clone, PartialEq)]
pub struct SquareMatrix<F> {
    rows: Vec<Vec<F>>,
}

impl<F: Field> SquareMatrix<F> {
    pub fn new(rows: Vec<Vec<F>>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        SquareMatrix { rows }
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Self::new(rows.iter().map(|r| r.iter().map(|&x| F::from_int(x)).collect()).collect())
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal((0..n).map(|_| F::one()).collect())
    }

    pub fn diagonal(d: Vec<F>) -> Self {
        let n = d.len();
        let mut rows = vec![vec![F::zero(); n]; n];
        for (i, x) in d.into_iter().enumerate() {
            rows[i][i] = x;
        }
        SquareMatrix { rows }
    }

    /// Permutation matrix sending basis vector `j` to `perm[j]`.
    pub fn permutation(perm: &[usize]) -> Self {
        let n = perm.len();
        let mut rows = vec![vec![F::zero(); n]; n];
        for (j, &i) in perm.iter().enumerate() {
            rows[i][j] = F::one();
        }
        SquareMatrix { rows }
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<F>] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.rows[i][j]
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> SquareMatrix<G> {
        SquareMatrix { rows: self.rows.iter().map(|r| r.iter().map(&f).collect()).collect() }
    }

    pub fn scale(&self, s: &F) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn transpose(&self) -> Self {
        let n = self.size();
        SquareMatrix {
            rows: (0..n).map(|i| (0..n).map(|j| self.rows[j][i].clone()).collect()).collect(),
        }
    }

    pub fn apply(&self, v: &[F]) -> Vec<F> {
        self.rows
            .iter()
            .map(|r| r.iter().zip(v).fold(F::zero(), |acc, (a, b)| acc + a.clone() * b.clone()))
            .collect()
    }

    pub fn det(&self) -> F {
        let n = self.size();
        let mut m = self.rows.clone();
        let mut det = F::one();
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
                return F::zero();
            };
            if piv != col {
                m.swap(piv, col);
                det = -det;
            }
            let p = m[col][col].clone();
            det = det * p.clone();
            let inv = p.try_inv().unwrap();
            for r in col + 1..n {
                if m[r][col].is_zero() {
                    continue;
                }
                let f = m[r][col].clone() * inv.clone();
                for c in col..n {
                    m[r][c] = m[r][c].clone() - f.clone() * m[col][c].clone();
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Result<Self> {
        let n = self.size();
        let mut m = self.rows.clone();
        let mut inv = Self::identity(n).rows;
        for col in 0..n {
            let piv = (col..n).find(|&r| !m[r][col].is_zero()).ok_or(Error::SingularMatrix)?;
            m.swap(piv, col);
            inv.swap(piv, col);
            let p = m[col][col].try_inv().ok_or(Error::SingularMatrix)?;
            for c in 0..n {
                m[col][c] = m[col][c].clone() * p.clone();
                inv[col][c] = inv[col][c].clone() * p.clone();
            }
            for r in 0..n {
                if r == col || m[r][col].is_zero() {
                    continue;
                }
                let f = m[r][col].clone();
                for c in 0..n {
                    m[r][c] = m[r][c].clone() - f.clone() * m[col][c].clone();
                    inv[r][c] = inv[r][c].clone() - f.clone() * inv[col][c].clone();
                }
            }
        }
        Ok(SquareMatrix { rows: inv })
    }

    /// Equality up to a nonzero scalar.
    pub fn projectively_eq(&self, other: &Self) -> bool {
        let a = self.rows.iter().flatten().cloned().collect::<Vec<_>>();
        let b = other.rows.iter().flatten().cloned().collect::<Vec<_>>();
        match (F::canonical_scale(&a), F::canonical_scale(&b)) {
            (Some(sa), Some(sb)) => a
                .into_iter()
                .zip(b)
                .all(|(x, y)| x * sa.clone() == y * sb.clone()),
            _ => false,
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.size())
    }
}

impl<F: Field> Mul for &SquareMatrix<F> {
    type Output = SquareMatrix<F>;
    fn mul(self, rhs: &SquareMatrix<F>) -> SquareMatrix<F> {
        let n = self.size();
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..n).fold(F::zero(), |acc, k| {
                            acc + self.rows[i][k].clone() * rhs.rows[k][j].clone()
                        })
                    })
                    .collect()
            })
            .collect();
        SquareMatrix { rows }
    }
}

impl<F: Field> fmt::Debug for SquareMatrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows.iter()).finish()
    }
}
