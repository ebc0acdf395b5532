//! Dense square and rectangular matrices over a [`Field`].

use crate::field::Field;
use crate::poly::{self, Poly};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Clone> Matrix<E> {
    pub fn from_rows(rows: Vec<Vec<E>>) -> Option<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return None;
        }
        Some(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
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

    pub fn get(&self, i: usize, j: usize) -> &E {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: E) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[E] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<E>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<F>(&self, f: impl FnMut(&E) -> F) -> Matrix<F> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn same_shape<F>(&self, other: &Matrix<F>) -> bool {
        self.rows == other.rows && self.cols == other.cols
    }
}

impl<E: Clone> Matrix<E> {
    pub fn identity<K: Field<Elem = E>>(k: &K, n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { k.one() } else { k.zero() })
    }

    pub fn zeros<K: Field<Elem = E>>(k: &K, rows: usize, cols: usize) -> Self {
        Matrix::from_fn(rows, cols, |_, _| k.zero())
    }

    pub fn diagonal<K: Field<Elem = E>>(k: &K, diag: &[E]) -> Self {
        let n = diag.len();
        Matrix::from_fn(n, n, |i, j| if i == j { diag[i].clone() } else { k.zero() })
    }
}

/// Matrix operations routed through a field context.
pub trait MatrixOps: Field + Sized {
    fn mat_mul(&self, a: &Matrix<Self::Elem>, b: &Matrix<Self::Elem>) -> Matrix<Self::Elem> {
        assert_eq!(a.cols, b.rows, "shape mismatch in product");
        Matrix::from_fn(a.rows, b.cols, |i, j| {
            (0..a.cols).fold(self.zero(), |acc, t| {
                self.add(&acc, &self.mul(a.get(i, t), b.get(t, j)))
            })
        })
    }

    fn mat_add(&self, a: &Matrix<Self::Elem>, b: &Matrix<Self::Elem>) -> Matrix<Self::Elem> {
        assert!(a.same_shape(b));
        Matrix::from_fn(a.rows, a.cols, |i, j| self.add(a.get(i, j), b.get(i, j)))
    }

    fn mat_sub(&self, a: &Matrix<Self::Elem>, b: &Matrix<Self::Elem>) -> Matrix<Self::Elem> {
        assert!(a.same_shape(b));
        Matrix::from_fn(a.rows, a.cols, |i, j| self.sub(a.get(i, j), b.get(i, j)))
    }

    fn mat_scale(&self, a: &Matrix<Self::Elem>, c: &Self::Elem) -> Matrix<Self::Elem> {
        a.map(|x| self.mul(x, c))
    }

    fn mat_vec(&self, a: &Matrix<Self::Elem>, v: &[Self::Elem]) -> Vec<Self::Elem> {
        assert_eq!(a.cols, v.len());
        (0..a.rows)
            .map(|i| {
                (0..a.cols).fold(self.zero(), |acc, t| {
                    self.add(&acc, &self.mul(a.get(i, t), &v[t]))
                })
            })
            .collect()
    }

    fn mat_eq(&self, a: &Matrix<Self::Elem>, b: &Matrix<Self::Elem>) -> bool {
        a.same_shape(b)
            && a.data
                .iter()
                .zip(&b.data)
                .all(|(x, y)| self.is_zero(&self.sub(x, y)))
    }

    fn is_identity(&self, a: &Matrix<Self::Elem>) -> bool {
        a.is_square() && self.mat_eq(a, &Matrix::identity(self, a.rows))
    }

    fn mat_pow(&self, a: &Matrix<Self::Elem>, e: u64) -> Matrix<Self::Elem> {
        let mut acc = Matrix::identity(self, a.rows);
        let mut base = a.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mat_mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mat_mul(&base, &base);
            }
        }
        acc
    }

    /// Reduced row echelon form; returns the pivot columns.
    fn rref(&self, a: &mut Matrix<Self::Elem>) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..a.cols {
            if r == a.rows {
                break;
            }
            let Some(p) = (r..a.rows).find(|&i| !self.is_zero(a.get(i, c))) else {
                continue;
            };
            if p != r {
                for j in 0..a.cols {
                    a.data.swap(p * a.cols + j, r * a.cols + j);
                }
            }
            let inv = self.inv(a.get(r, c)).expect("pivot is nonzero");
            for j in 0..a.cols {
                let v = self.mul(a.get(r, j), &inv);
                a.set(r, j, v);
            }
            for i in 0..a.rows {
                if i == r || self.is_zero(a.get(i, c)) {
                    continue;
                }
                let factor = a.get(i, c).clone();
                for j in 0..a.cols {
                    let v = self.sub(a.get(i, j), &self.mul(&factor, a.get(r, j)));
                    a.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn rank(&self, a: &Matrix<Self::Elem>) -> usize {
        let mut m = a.clone();
        self.rref(&mut m).len()
    }

    /// Basis of the right null space `{x : A x = 0}`.
    fn nullspace(&self, a: &Matrix<Self::Elem>) -> Vec<Vec<Self::Elem>> {
        let mut m = a.clone();
        let pivots = self.rref(&mut m);
        let free: Vec<usize> = (0..a.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![self.zero(); a.cols];
                v[f] = self.one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = self.neg(m.get(r, f));
                }
                v
            })
            .collect()
    }

    fn det(&self, a: &Matrix<Self::Elem>) -> Self::Elem {
        assert!(a.is_square(), "determinant of a non-square matrix");
        let n = a.rows;
        let mut m = a.clone();
        let mut det = self.one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !self.is_zero(m.get(i, c))) else {
                return self.zero();
            };
            if p != c {
                for j in 0..n {
                    m.data.swap(p * n + j, c * n + j);
                }
                det = self.neg(&det);
            }
            let pivot = m.get(c, c).clone();
            det = self.mul(&det, &pivot);
            let inv = self.inv(&pivot).expect("nonzero pivot");
            for i in c + 1..n {
                if self.is_zero(m.get(i, c)) {
                    continue;
                }
                let factor = self.mul(m.get(i, c), &inv);
                for j in c..n {
                    let v = self.sub(m.get(i, j), &self.mul(&factor, m.get(c, j)));
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    /// Inverse, or `None` when singular.
    fn inverse(&self, a: &Matrix<Self::Elem>) -> Option<Matrix<Self::Elem>> {
        assert!(a.is_square());
        let n = a.rows;
        let mut aug = Matrix::from_fn(n, 2 * n, |i, j| {
            if j < n {
                a.get(i, j).clone()
            } else if j - n == i {
                self.one()
            } else {
                self.zero()
            }
        });
        let pivots = self.rref(&mut aug);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(Matrix::from_fn(n, n, |i, j| aug.get(i, n + j).clone()))
    }

    /// Characteristic polynomial `det(x I - A)` by Berkowitz' algorithm
    /// (division free).
    fn charpoly(&self, a: &Matrix<Self::Elem>) -> Poly<Self::Elem> {
        assert!(a.is_square());
        let n = a.rows;
        // vect holds coefficients high to low of the char poly of the
        // leading principal r x r submatrix.
        let mut vect: Vec<Self::Elem> = vec![self.one()];
        for r in 0..n {
            // Submatrix A[0..=r, 0..=r] split as [[M, C], [R, a_rr]].
            let a_rr = a.get(r, r).clone();
            let col: Vec<Self::Elem> = (0..r).map(|i| a.get(i, r).clone()).collect();
            let row: Vec<Self::Elem> = (0..r).map(|j| a.get(r, j).clone()).collect();
            // Toeplitz first column: 1, -a_rr, -R C, -R M C, -R M^2 C, ...
            let mut tcol = vec![self.one(), self.neg(&a_rr)];
            let mut v = col.clone();
            for _ in 0..r {
                let dot = row
                    .iter()
                    .zip(&v)
                    .fold(self.zero(), |acc, (x, y)| self.add(&acc, &self.mul(x, y)));
                tcol.push(self.neg(&dot));
                // v <- M v
                v = (0..r)
                    .map(|i| {
                        (0..r).fold(self.zero(), |acc, t| {
                            self.add(&acc, &self.mul(a.get(i, t), &v[t]))
                        })
                    })
                    .collect();
            }
            // new = T * vect, T lower-triangular Toeplitz of size (r+2) x (r+1)
            let next: Vec<Self::Elem> = (0..r + 2)
                .map(|i| {
                    (0..=r.min(i)).fold(self.zero(), |acc, j| {
                        if i - j < tcol.len() && j < vect.len() {
                            self.add(&acc, &self.mul(&tcol[i - j], &vect[j]))
                        } else {
                            acc
                        }
                    })
                })
                .collect();
            vect = next;
        }
        vect.reverse();
        poly::trimmed(self, vect)
    }
}

impl<K: Field> MatrixOps for K {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rationals;
    use crate::rational::{int, Rational};

    fn qm(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect())
            .unwrap()
    }

    #[test]
    fn det_inverse_charpoly() {
        let k = Rationals;
        let a = qm(&[&[1, 0, 0], &[0, 2, 1], &[0, 3, 2]]);
        assert_eq!(k.det(&a), int(1));
        let ai = k.inverse(&a).unwrap();
        assert!(k.is_identity(&k.mat_mul(&a, &ai)));
        // (x - 1)(x^2 - 4x + 1) = x^3 - 5x^2 + 5x - 1
        assert_eq!(k.charpoly(&a), vec![int(-1), int(5), int(-5), int(1)]);
        let s = qm(&[&[1, 2], &[2, 4]]);
        assert!(k.inverse(&s).is_none());
        assert_eq!(k.rank(&s), 1);
        assert_eq!(k.nullspace(&s), vec![vec![int(-2), int(1)]]);
    }

    #[test]
    fn charpoly_matches_cayley_hamilton() {
        let k = Rationals;
        let a = qm(&[&[2, 1, 2, 0], &[1, 2, 2, 1], &[2, 2, 3, -1], &[0, 5, 1, 1]]);
        let p = k.charpoly(&a);
        let mut acc = Matrix::zeros(&k, 4, 4);
        for (i, c) in p.iter().enumerate() {
            acc = k.mat_add(&acc, &k.mat_scale(&k.mat_pow(&a, i as u64), c));
        }
        assert!(acc.entries().iter().all(|x| *x == int(0)));
        assert_eq!(p[0], k.det(&a));
    }
}
