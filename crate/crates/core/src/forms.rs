//! Diagonal forms `J = diag(alpha_1, ..., alpha_n, -1)`, membership in the
//! orthogonal and unitary groups they define, and the bending matrix.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::{Matrix, MatrixOps};
use crate::numfield::{AlgebraicNumber, ExtElement, NumberField, QuadExtension};

/// Square matrix over `L`.
pub type FieldMatrix = Matrix<ExtElement>;

/// Square matrix over `F`.
pub type BaseMatrix = Matrix<AlgebraicNumber>;

#[derive(Clone, Debug, PartialEq)]
pub struct Form {
    alphas: Vec<AlgebraicNumber>,
}

impl Form {
    /// Each `alpha_i` must be positive at the identity place and negative at
    /// every other place.
    pub fn new(field: &NumberField, alphas: Vec<AlgebraicNumber>) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::InvalidForm("need at least one alpha".into()));
        }
        for (i, a) in alphas.iter().enumerate() {
            if field.sign_at(a, 0) != Ordering::Greater {
                return Err(Error::InvalidForm(format!(
                    "alpha_{} is not positive at the identity place",
                    i + 1
                )));
            }
            for p in 1..field.degree() {
                if field.sign_at(a, p) != Ordering::Less {
                    return Err(Error::InvalidForm(format!(
                        "alpha_{} is not negative at place {p}",
                        i + 1
                    )));
                }
            }
        }
        Ok(Form { alphas })
    }

    /// Matrices are `(n+1) x (n+1)`.
    pub fn n(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[AlgebraicNumber] {
        &self.alphas
    }

    pub fn diagonal(&self, field: &NumberField) -> Vec<AlgebraicNumber> {
        let mut d = self.alphas.clone();
        d.push(field.from_int(-1));
        d
    }

    pub fn base_matrix(&self, field: &NumberField) -> BaseMatrix {
        Matrix::diagonal(field, &self.diagonal(field))
    }

    pub fn matrix(&self, ext: &QuadExtension) -> FieldMatrix {
        let diag: Vec<ExtElement> = self
            .diagonal(ext.base())
            .iter()
            .map(|a| ext.from_base(a))
            .collect();
        Matrix::diagonal(ext, &diag)
    }
}

fn check_size<E: Clone>(a: &Matrix<E>, size: usize) -> Result<()> {
    if a.rows() == size && a.cols() == size {
        Ok(())
    } else {
        Err(Error::SizeMismatch(format!(
            "expected {size}x{size}, got {}x{}",
            a.rows(),
            a.cols()
        )))
    }
}

/// Entrywise `tau`, then transpose.
pub fn conj_transpose(ext: &QuadExtension, a: &FieldMatrix) -> FieldMatrix {
    a.map(|x| ext.tau(x)).transpose()
}

/// The `F`-part of a matrix whose entries all lie in `F`.
pub fn to_base(ext: &QuadExtension, a: &FieldMatrix) -> Result<BaseMatrix> {
    if a.entries().iter().any(|x| !ext.in_base(x)) {
        return Err(Error::EntriesOutsideBaseField);
    }
    Ok(a.map(|x| x.a.clone()))
}

pub fn from_base(ext: &QuadExtension, a: &BaseMatrix) -> FieldMatrix {
    a.map(|x| ext.from_base(x))
}

/// `A^t J A = J` and `det A = 1`, over `F`.
pub fn so_membership_base(field: &NumberField, a: &BaseMatrix, j: &Form) -> Result<bool> {
    check_size(a, j.n() + 1)?;
    let jm = j.base_matrix(field);
    let lhs = field.mat_mul(&field.mat_mul(&a.transpose(), &jm), a);
    Ok(field.mat_eq(&lhs, &jm) && field.is_one(&field.det(a)))
}

pub fn so_membership(ext: &QuadExtension, a: &FieldMatrix, j: &Form) -> Result<bool> {
    let base = to_base(ext, a)?;
    so_membership_base(ext.base(), &base, j)
}

/// `A^* J A = J` and `det A = 1`, where `A^*` is the `tau`-conjugate
/// transpose.
pub fn su_membership(ext: &QuadExtension, a: &FieldMatrix, j: &Form) -> Result<bool> {
    check_size(a, j.n() + 1)?;
    let jm = j.matrix(ext);
    let lhs = ext.mat_mul(&ext.mat_mul(&conj_transpose(ext, a), &jm), a);
    Ok(ext.mat_eq(&lhs, &jm) && ext.is_one(&ext.det(a)))
}

/// `diag(u^-n, u, ..., u)` for a unitary `u`.
pub fn bending_matrix(ext: &QuadExtension, u: &ExtElement, n: usize) -> Result<FieldMatrix> {
    if !ext.is_unitary(u)? {
        return Err(Error::NotUnitary);
    }
    let first = ext.powi(u, -(n as i64)).expect("unitary elements are nonzero");
    let mut diag = vec![first];
    diag.extend(std::iter::repeat_n(u.clone(), n));
    Ok(Matrix::diagonal(ext, &diag))
}

/// `B A = A B`.
pub fn centralizes_block(ext: &QuadExtension, b: &FieldMatrix, a: &FieldMatrix) -> Result<bool> {
    check_size(a, b.rows())?;
    check_size(b, a.rows())?;
    Ok(ext.mat_eq(&ext.mat_mul(b, a), &ext.mat_mul(a, b)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> QuadExtension {
        let q = NumberField::rationals();
        let u = q.from_int(3);
        QuadExtension::new(q, u).unwrap()
    }

    fn int_matrix(ext: &QuadExtension, rows: &[&[i64]]) -> FieldMatrix {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| ext.from_int(x)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn so_examples() {
        let l = golden();
        let q = l.base();
        let j = Form::new(q, vec![q.from_int(1), q.from_int(3)]).unwrap();
        let a = int_matrix(&l, &[&[1, 0, 0], &[0, 2, 1], &[0, 3, 2]]);
        assert!(so_membership(&l, &a, &j).unwrap());
        assert!(su_membership(&l, &a, &j).unwrap());
        let k = Form::new(q, vec![q.from_int(1), q.from_int(1)]).unwrap();
        let b = int_matrix(&l, &[&[2, 1, 2], &[1, 2, 2], &[2, 2, 3]]);
        assert!(so_membership(&l, &b, &k).unwrap());
        assert!(!so_membership(&l, &a, &k).unwrap());
        let bent = bending_matrix(&l, &l.s(), 2).unwrap();
        assert_eq!(so_membership(&l, &bent, &j), Err(Error::EntriesOutsideBaseField));
    }

    #[test]
    fn bending_matrix_is_unitary_and_centralizes() {
        let l = golden();
        let q = l.base();
        let j = Form::new(q, vec![q.from_int(1), q.from_int(3)]).unwrap();
        let b = bending_matrix(&l, &l.s(), 2).unwrap();
        let tau_s = l.tau(&l.s());
        assert_eq!(b.get(0, 0), &l.mul(&tau_s, &tau_s));
        assert!(su_membership(&l, &b, &j).unwrap());
        let a = int_matrix(&l, &[&[1, 0, 0], &[0, 2, 1], &[0, 3, 2]]);
        assert!(centralizes_block(&l, &b, &a).unwrap());
        let c = int_matrix(&l, &[&[1, 0, 0], &[1, 1, 0], &[0, 0, 1]]);
        assert!(!centralizes_block(&l, &b, &c).unwrap());
        let one = bending_matrix(&l, &l.one(), 3).unwrap();
        assert!(l.is_identity(&one));
        let not_unitary = l.add(&l.one(), &l.s());
        assert_eq!(bending_matrix(&l, &not_unitary, 2), Err(Error::NotUnitary));
    }

    #[test]
    fn form_signs_are_checked() {
        let f = NumberField::from_i64(&[-2, 0, 1], 1).unwrap();
        // 1 + sqrt2 is negative at the other place; 1 is not
        assert!(Form::new(&f, vec![f.from_ints(&[1, 1])]).is_ok());
        assert!(Form::new(&f, vec![f.from_int(1)]).is_err());
        let q = NumberField::rationals();
        assert!(Form::new(&q, vec![q.from_int(1), q.from_int(-3)]).is_err());
    }
}
