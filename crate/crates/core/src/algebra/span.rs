//! Linear subspaces of `F_p^d` kept in reduced row echelon form.

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::matrix::Mat;

/// A subspace of `F_p^ambient`, stored as an RREF basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSubspace {
    field: PrimeField,
    ambient: usize,
    basis: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl LinearSubspace {
    pub fn zero(field: PrimeField, ambient: usize) -> Self {
        Self {
            field,
            ambient,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(field: PrimeField, ambient: usize) -> Self {
        let vectors = (0..ambient).map(|k| unit_vec(ambient, k)).collect::<Vec<_>>();
        Self::span(field, ambient, vectors)
    }

    /// Row-reduces the given spanning vectors.
    pub fn span(field: PrimeField, ambient: usize, vectors: impl IntoIterator<Item = Vec<u32>>) -> Self {
        let mut out = Self::zero(field, ambient);
        for v in vectors {
            out.insert(v);
        }
        out
    }

    /// Span of matrices, flattened row-major into `F_p^{m²}`.
    pub fn span_matrices<'a>(field: PrimeField, m: usize, mats: impl IntoIterator<Item = &'a Mat>) -> Self {
        Self::span(
            field,
            m * m,
            mats.into_iter().map(|x| x.as_bytes().iter().map(|&v| v as u32).collect()),
        )
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }

    /// Basis vectors reshaped into `m×m` matrices.
    pub fn basis_matrices(&self, m: usize) -> Vec<Mat> {
        assert_eq!(self.ambient, m * m);
        self.basis.iter().map(|v| vec_to_mat(self.field, m, v)).collect()
    }

    /// Eliminates `v` against the basis.
    pub fn reduce(&self, v: &[u32]) -> Vec<u32> {
        let f = self.field;
        let mut v = v.to_vec();
        for (row, &piv) in self.basis.iter().zip(&self.pivots) {
            let c = v[piv];
            if c != 0 {
                for (x, &r) in v.iter_mut().zip(row) {
                    *x = f.sub(*x, f.mul(c, r));
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        debug_assert_eq!(v.len(), self.ambient);
        self.reduce(v).iter().all(|&x| x == 0)
    }

    pub fn contains_matrix(&self, x: &Mat) -> bool {
        let v: Vec<u32> = x.as_bytes().iter().map(|&b| b as u32).collect();
        self.contains(&v)
    }

    /// Adds a vector to the span; returns whether the dimension grew.
    pub fn insert(&mut self, v: Vec<u32>) -> bool {
        let f = self.field;
        let mut r = self.reduce(&v);
        let Some(piv) = r.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = f.inv(r[piv]).expect("pivot is nonzero");
        for x in r.iter_mut() {
            *x = f.mul(*x, inv);
        }
        // clear the new pivot column from the existing rows
        for row in self.basis.iter_mut() {
            let c = row[piv];
            if c != 0 {
                for (x, &y) in row.iter_mut().zip(&r) {
                    *x = f.sub(*x, f.mul(c, y));
                }
            }
        }
        let at = self.pivots.partition_point(|&p| p < piv);
        self.pivots.insert(at, piv);
        self.basis.insert(at, r);
        true
    }

    pub fn sum(&self, other: &LinearSubspace) -> LinearSubspace {
        let mut out = self.clone();
        for v in &other.basis {
            out.insert(v.clone());
        }
        out
    }

    /// Basis of `{w : w·v = 0 for all v in self}`.
    pub fn annihilator(&self) -> Vec<Vec<u32>> {
        let f = self.field;
        let mut out = Vec::new();
        for free in (0..self.ambient).filter(|c| !self.pivots.contains(c)) {
            let mut w = vec![0u32; self.ambient];
            w[free] = 1;
            for (row, &piv) in self.basis.iter().zip(&self.pivots) {
                w[piv] = f.neg(row[free]);
            }
            out.push(w);
        }
        out
    }

    pub fn intersect(&self, other: &LinearSubspace) -> LinearSubspace {
        let mut constraints = self.annihilator();
        constraints.extend(other.annihilator());
        kernel(self.field, &constraints, self.ambient)
    }

    pub fn is_subspace_of(&self, other: &LinearSubspace) -> bool {
        self.basis.iter().all(|v| other.contains(v))
    }

    /// Closure of the span of `m×m` matrices under multiplication.
    pub fn is_closed_under_product(&self, m: usize) -> bool {
        let mats = self.basis_matrices(m);
        mats.iter()
            .all(|a| mats.iter().all(|b| self.contains_matrix(&a.mul(b))))
    }

    /// Every vector of the subspace, in odometer order over basis coefficients.
    pub fn enumerate(&self, budget: u128) -> Result<Vec<Vec<u32>>> {
        let p = self.field.p() as u128;
        let size = p.checked_pow(self.dim() as u32).unwrap_or(u128::MAX);
        if size > budget {
            return Err(Error::Budget {
                what: "subspace enumeration".into(),
                required: size,
                budget,
            });
        }
        let f = self.field;
        let mut out = Vec::with_capacity(size as usize);
        for code in 0..size as u64 {
            let mut v = vec![0u32; self.ambient];
            let mut rest = code;
            for row in &self.basis {
                let c = (rest % p as u64) as u32;
                rest /= p as u64;
                if c != 0 {
                    for (x, &r) in v.iter_mut().zip(row) {
                        *x = f.add(*x, f.mul(c, r));
                    }
                }
            }
            out.push(v);
        }
        Ok(out)
    }
}

/// Null space of the matrix whose rows are `rows` (each of width `width`).
pub fn kernel(field: PrimeField, rows: &[Vec<u32>], width: usize) -> LinearSubspace {
    let reduced = LinearSubspace::span(field, width, rows.iter().cloned());
    LinearSubspace::span(field, width, reduced.annihilator())
}

pub fn unit_vec(len: usize, k: usize) -> Vec<u32> {
    let mut v = vec![0; len];
    v[k] = 1;
    v
}

pub fn vec_to_mat(field: PrimeField, m: usize, v: &[u32]) -> Mat {
    let mut x = Mat::zero(field, m);
    for i in 0..m {
        for j in 0..m {
            x.set(i, j, v[i * m + j]);
        }
    }
    x
}

pub fn mat_to_vec(x: &Mat) -> Vec<u32> {
    x.as_bytes().iter().map(|&b| b as u32).collect()
}
