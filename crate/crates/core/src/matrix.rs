//! Dense square matrices over `F_p`, the antidiagonal transpose `τ`, and the
//! form-dependent antiautomorphism `†`.

use std::fmt;
use std::str::FromStr;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{domain, Result};
use crate::field::{FieldScalar, PrimeField};

/// Cartan type of the ambient orthogonal or symplectic group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum FormType {
    B,
    C,
    D,
}

impl FromStr for FormType {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "B" | "b" => Ok(FormType::B),
            "C" | "c" => Ok(FormType::C),
            "D" | "d" => Ok(FormType::D),
            other => Err(format!("unknown type {other:?}, expected B, C or D")),
        }
    }
}

impl fmt::Display for FormType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FormType::B => "B",
            FormType::C => "C",
            FormType::D => "D",
        };
        f.write_str(s)
    }
}

/// Type and rank; `m` is the size of the standard representation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FormTag {
    pub kind: FormType,
    pub n: usize,
}

impl FormTag {
    pub fn new(kind: FormType, n: usize) -> Result<Self> {
        if n == 0 {
            return domain("rank n must be positive");
        }
        Ok(Self { kind, n })
    }

    pub fn m(self) -> usize {
        match self.kind {
            FormType::B => 2 * self.n + 1,
            FormType::C | FormType::D => 2 * self.n,
        }
    }

    /// Row sign used by `†`: `(x†)_{ab} = s(a)s(b)·x_{m-1-b, m-1-a}`.
    ///
    /// For `C` this is `J⁻¹XᵗJ` written out entrywise, for `B`/`D` it is `I XᵗI`.
    #[inline]
    fn dagger_sign(self, a: usize) -> bool {
        matches!(self.kind, FormType::C) && a >= self.n
    }
}

impl fmt::Display for FormTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind, self.n)
    }
}

/// An `m×m` matrix over `F_p`, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    m: usize,
    field: PrimeField,
    data: Vec<u8>,
}

impl Mat {
    pub fn zero(field: PrimeField, m: usize) -> Self {
        Self {
            m,
            field,
            data: vec![0; m * m],
        }
    }

    pub fn identity(field: PrimeField, m: usize) -> Self {
        let mut x = Self::zero(field, m);
        for i in 0..m {
            x.set(i, i, 1);
        }
        x
    }

    /// Matrix unit `E_{ij}` (0-based).
    pub fn unit(field: PrimeField, m: usize, i: usize, j: usize) -> Self {
        let mut x = Self::zero(field, m);
        x.set(i, j, 1);
        x
    }

    pub fn from_rows(field: PrimeField, rows: &[Vec<i64>]) -> Result<Self> {
        let m = rows.len();
        if rows.iter().any(|r| r.len() != m) {
            return domain("matrix rows must form a square");
        }
        let mut x = Self::zero(field, m);
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                x.set(i, j, field.reduce(v));
            }
        }
        Ok(x)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.m + j] as u32
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.m + j] = v as u8;
    }

    pub fn entry(&self, i: usize, j: usize) -> FieldScalar {
        self.field.scalar(self.get(i, j) as i64)
    }

    /// Raw residues in row-major order; doubles as a hash key.
    pub fn as_bytes(&self) -> &[u8] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        (0..self.m)
            .map(|i| (0..self.m).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn is_identity(&self) -> bool {
        (0..self.m).all(|i| (0..self.m).all(|j| self.get(i, j) == u32::from(i == j)))
    }

    pub fn add(&self, other: &Mat) -> Mat {
        debug_assert_eq!(self.m, other.m);
        let f = self.field;
        Mat {
            m: self.m,
            field: f,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f.add(a as u32, b as u32) as u8)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        debug_assert_eq!(self.m, other.m);
        let f = self.field;
        Mat {
            m: self.m,
            field: f,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f.sub(a as u32, b as u32) as u8)
                .collect(),
        }
    }

    pub fn scale(&self, k: u32) -> Mat {
        let f = self.field;
        Mat {
            m: self.m,
            field: f,
            data: self
                .data
                .iter()
                .map(|&a| f.mul(a as u32, k) as u8)
                .collect(),
        }
    }

    pub fn neg(&self) -> Mat {
        self.scale(self.field.p() - 1)
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        debug_assert_eq!(self.m, other.m);
        let m = self.m;
        let p = self.field.p() as u64;
        let mut data = vec![0u8; m * m];
        for i in 0..m {
            let row = &self.data[i * m..(i + 1) * m];
            for j in 0..m {
                let mut acc = 0u64;
                for k in 0..m {
                    acc += row[k] as u64 * other.data[k * m + j] as u64;
                }
                data[i * m + j] = (acc % p) as u8;
            }
        }
        Mat {
            m,
            field: self.field,
            data,
        }
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zero(self.field, self.m);
        for i in 0..self.m {
            for j in 0..self.m {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// Transpose with respect to the antidiagonal: `(x^τ)_{ij} = x_{m-1-j, m-1-i}`.
    pub fn tau(&self) -> Mat {
        let m = self.m;
        let mut out = Mat::zero(self.field, m);
        for i in 0..m {
            for j in 0..m {
                out.set(i, j, self.get(m - 1 - j, m - 1 - i));
            }
        }
        out
    }

    /// The involutive antiautomorphism defining the group: `I XᵗI` for `B`, `D` and
    /// `J⁻¹XᵗJ` for `C`.
    pub fn dagger(&self, tag: FormTag) -> Mat {
        let m = self.m;
        debug_assert_eq!(m, tag.m());
        let f = self.field;
        let mut out = Mat::zero(f, m);
        for a in 0..m {
            for b in 0..m {
                let v = self.get(m - 1 - b, m - 1 - a);
                let v = if tag.dagger_sign(a) != tag.dagger_sign(b) {
                    f.neg(v)
                } else {
                    v
                };
                out.set(a, b, v);
            }
        }
        out
    }

    pub fn is_upper_unitriangular(&self) -> bool {
        (0..self.m).all(|i| {
            self.get(i, i) == 1 && (0..i).all(|j| self.get(i, j) == 0)
        })
    }

    pub fn is_strictly_upper(&self) -> bool {
        (0..self.m).all(|i| (0..=i).all(|j| self.get(i, j) == 0))
    }

    /// Inverse of an upper unitriangular matrix by back substitution.
    pub fn inverse_unitriangular(&self) -> Result<Mat> {
        if !self.is_upper_unitriangular() {
            return domain("inverse requested for a matrix that is not upper unitriangular");
        }
        let m = self.m;
        let f = self.field;
        let p = f.p() as u64;
        let mut inv = Mat::identity(f, m);
        // Column j of the inverse: solve upper triangular system from the bottom up.
        for j in 0..m {
            for i in (0..j).rev() {
                let acc: u64 = (i + 1..=j)
                    .map(|k| self.data[i * m + k] as u64 * inv.data[k * m + j] as u64)
                    .sum();
                inv.data[i * m + j] = ((p - acc % p) % p) as u8;
            }
        }
        Ok(inv)
    }

    /// Inverse of `c·1 + y` with `y` strictly upper triangular and `c ≠ 0`.
    pub fn inverse_scalar_plus_nilpotent(&self) -> Result<Mat> {
        let c = self.get(0, 0);
        if c == 0 || (0..self.m).any(|i| self.get(i, i) != c) {
            return domain("matrix is not a nonzero scalar plus a nilpotent part");
        }
        let f = self.field;
        let cinv = f.inv(c)?;
        // (c + y)⁻¹ = c⁻¹ (1 + c⁻¹y)⁻¹ and 1 + c⁻¹y is unitriangular.
        Ok(self.scale(cinv).inverse_unitriangular()?.scale(cinv))
    }

    /// Rank by Gaussian elimination with first-nonzero pivoting.
    pub fn rank(&self) -> usize {
        let rows: Vec<Vec<u32>> = self.rows();
        rank_of_rows(self.field, rows, self.m)
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Vec<Vec<u32>> {
        rows.iter()
            .map(|&r| cols.iter().map(|&c| self.get(r, c)).collect())
            .collect()
    }

    /// Determinant of the square submatrix on the given 0-based rows and columns, in
    /// the order given.
    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> Result<FieldScalar> {
        if rows.len() != cols.len() {
            return domain(format!(
                "minor needs equally many rows and columns, got {} and {}",
                rows.len(),
                cols.len()
            ));
        }
        if rows.iter().chain(cols).any(|&i| i >= self.m) {
            return domain("minor index out of range");
        }
        let d = determinant(self.field, self.submatrix(rows, cols));
        Ok(self.field.scalar(d as i64))
    }
}

/// Rank of a list of rows of width `width`.
pub fn rank_of_rows(f: PrimeField, mut rows: Vec<Vec<u32>>, width: usize) -> usize {
    let mut rank = 0;
    for col in 0..width {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, piv);
        let inv = f.inv(rows[rank][col]).expect("pivot is nonzero");
        for r in 0..rows.len() {
            if r != rank && rows[r][col] != 0 {
                let factor = f.mul(rows[r][col], inv);
                for c in col..width {
                    let v = f.mul(factor, rows[rank][c]);
                    rows[r][c] = f.sub(rows[r][c], v);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Determinant of a square array over `F_p`.
pub fn determinant(f: PrimeField, mut a: Vec<Vec<u32>>) -> u32 {
    let k = a.len();
    let mut det = 1u32;
    for col in 0..k {
        let Some(piv) = (col..k).find(|&r| a[r][col] != 0) else {
            return 0;
        };
        if piv != col {
            a.swap(piv, col);
            det = f.neg(det);
        }
        det = f.mul(det, a[col][col]);
        let inv = f.inv(a[col][col]).expect("pivot is nonzero");
        for r in col + 1..k {
            if a[r][col] != 0 {
                let factor = f.mul(a[r][col], inv);
                for c in col..k {
                    let v = f.mul(factor, a[col][c]);
                    a[r][c] = f.sub(a[r][c], v);
                }
            }
        }
    }
    det
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat(p={}, m={})", self.field.p(), self.m)?;
        for i in 0..self.m {
            let row: Vec<String> = (0..self.m)
                .map(|j| format!("{:>3}", self.field.signed(self.get(i, j))))
                .collect();
            writeln!(f, "  [{}]", row.join(""))?;
        }
        Ok(())
    }
}

impl Serialize for Mat {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Mat", 3)?;
        st.serialize_field("p", &self.field.p())?;
        st.serialize_field("m", &self.m)?;
        st.serialize_field("rows", &self.rows())?;
        st.end()
    }
}
