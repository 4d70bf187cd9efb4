//! Small exact matrices over a field: just enough linear algebra for the
//! 3x3 SL3 bookkeeping and the 8x8 automorphism matrices.

use crate::field::{Field, FieldElement};

/// Dense square matrix, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    pub n: usize,
    field: Field,
    data: Vec<FieldElement>,
}

impl Matrix {
    pub fn zero(field: &Field, n: usize) -> Matrix {
        Matrix {
            n,
            field: field.clone(),
            data: vec![field.zero(); n * n],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Matrix {
        let mut m = Matrix::zero(field, n);
        for i in 0..n {
            *m.at_mut(i, i) = field.one();
        }
        m
    }

    pub fn from_rows(field: &Field, rows: Vec<Vec<FieldElement>>) -> Matrix {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.len(), n, "not square");
            data.extend(row);
        }
        Matrix {
            n,
            field: field.clone(),
            data,
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn at(&self, i: usize, j: usize) -> &FieldElement {
        &self.data[i * self.n + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut FieldElement {
        &mut self.data[i * self.n + j]
    }

    pub fn is_identity(&self) -> bool {
        self == &Matrix::identity(&self.field, self.n)
    }

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = Matrix::zero(&self.field, n);
        for i in 0..n {
            for k in 0..n {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = rhs.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.at(i, j).clone();
                    *out.at_mut(i, j) = &cur + &(a * b);
                }
            }
        }
        out
    }

    /// Matrix times column vector.
    pub fn apply(&self, x: &[FieldElement]) -> Vec<FieldElement> {
        assert_eq!(x.len(), self.n);
        let mut out = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let mut acc = self.field.zero();
            for (j, xj) in x.iter().enumerate() {
                if !xj.is_zero() {
                    acc = &acc + &(self.at(i, j) * xj);
                }
            }
            out.push(acc);
        }
        out
    }

    /// Gauss-Jordan inverse; None when singular.
    pub fn inverse(&self) -> Option<Matrix> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Matrix::identity(&self.field, n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a.at(r, col).is_zero())?;
            if pivot != col {
                for j in 0..n {
                    a.data.swap(col * n + j, pivot * n + j);
                    inv.data.swap(col * n + j, pivot * n + j);
                }
            }
            let scale = a.at(col, col).inv();
            for j in 0..n {
                *a.at_mut(col, j) = &scale * a.at(col, j);
                *inv.at_mut(col, j) = &scale * inv.at(col, j);
            }
            for r in 0..n {
                if r == col || a.at(r, col).is_zero() {
                    continue;
                }
                let factor = a.at(r, col).clone();
                for j in 0..n {
                    let v = &a.at(r, j).clone() - &(&factor * a.at(col, j));
                    *a.at_mut(r, j) = v;
                    let v = &inv.at(r, j).clone() - &(&factor * inv.at(col, j));
                    *inv.at_mut(r, j) = v;
                }
            }
        }
        Some(inv)
    }

    /// Determinant of a 3x3 matrix by the cofactor formula.
    pub fn det3(&self) -> FieldElement {
        assert_eq!(self.n, 3);
        let m = |i: usize, j: usize| self.at(i, j);
        let t1 = m(0, 0) * &(&(m(1, 1) * m(2, 2)) - &(m(1, 2) * m(2, 1)));
        let t2 = m(0, 1) * &(&(m(1, 0) * m(2, 2)) - &(m(1, 2) * m(2, 0)));
        let t3 = m(0, 2) * &(&(m(1, 0) * m(2, 1)) - &(m(1, 1) * m(2, 0)));
        &(&t1 - &t2) + &t3
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zero(&self.field, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                *out.at_mut(j, i) = self.at(i, j).clone();
            }
        }
        out
    }

    pub fn rows(&self) -> Vec<Vec<FieldElement>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.at(i, j).clone()).collect())
            .collect()
    }
}

impl std::fmt::Debug for Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Matrix {}x{} over {}", self.n, self.n, self.field)?;
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.at(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn inverse_round_trip() {
        let f = Field::prime(7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut found = 0;
        while found < 20 {
            let mut m = Matrix::zero(&f, 4);
            for i in 0..4 {
                for j in 0..4 {
                    *m.at_mut(i, j) = f.random(&mut rng);
                }
            }
            if let Some(inv) = m.inverse() {
                assert!(m.mul(&inv).is_identity());
                assert!(inv.mul(&m).is_identity());
                found += 1;
            }
        }
    }

    #[test]
    fn det3_matches_singularity() {
        let f = Field::prime(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..200 {
            let mut m = Matrix::zero(&f, 3);
            for i in 0..3 {
                for j in 0..3 {
                    *m.at_mut(i, j) = f.random(&mut rng);
                }
            }
            assert_eq!(m.det3().is_zero(), m.inverse().is_none());
        }
    }
}
