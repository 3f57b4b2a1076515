//! Prime-field scalars and exact cyclotomic integers.
//!
//! Matrices and functionals store raw residues (`u32` in `[0, p)`) and do their arithmetic
//! through a [`PrimeField`]. [`FieldScalar`] is the self-describing scalar used at API
//! boundaries. Character values live in `Z[ζ_p]` as [`CycValue`].

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{domain, Result};

/// Trial-division primality test; moduli here are tiny.
pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// The field `F_p` for an odd prime `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return domain(format!("modulus {p} is not an odd prime"));
        }
        // Residues are stored in u8-sized matrices elsewhere; keep the modulus bounded.
        if p > 251 {
            return domain(format!("modulus {p} is larger than the supported maximum 251"));
        }
        Ok(Self { p })
    }

    #[inline]
    pub fn p(self) -> u32 {
        self.p
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(self, a: u32, mut e: u64) -> u32 {
        let mut base = a % self.p;
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(self, a: u32) -> Result<u32> {
        if a.is_multiple_of(self.p) {
            return domain("inversion of zero in F_p");
        }
        Ok(self.pow(a, (self.p - 2) as u64))
    }

    /// `1/2`, which exists because `p` is odd.
    #[inline]
    pub fn half(self) -> u32 {
        self.p.div_ceil(2)
    }

    /// Reduces a signed integer into `[0, p)`.
    #[inline]
    pub fn reduce(self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }

    /// Representative in `(-p/2, p/2]`, used for human-readable output.
    pub fn signed(self, a: u32) -> i64 {
        if a > self.p / 2 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }

    pub fn scalar(self, v: i64) -> FieldScalar {
        FieldScalar {
            value: self.reduce(v),
            p: self.p,
        }
    }

    pub fn elements(self) -> impl Iterator<Item = u32> {
        0..self.p
    }

    pub fn nonzero(self) -> impl Iterator<Item = u32> {
        1..self.p
    }
}

/// An element of `F_p` carrying its modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldScalar {
    value: u32,
    p: u32,
}

impl FieldScalar {
    pub fn new(field: PrimeField, v: i64) -> Self {
        field.scalar(v)
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.p
    }

    fn field(self) -> PrimeField {
        PrimeField { p: self.p }
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn inv(self) -> Result<Self> {
        Ok(Self {
            value: self.field().inv(self.value)?,
            p: self.p,
        })
    }

    pub fn pow(self, e: u64) -> Self {
        Self {
            value: self.field().pow(self.value, e),
            p: self.p,
        }
    }

    /// Multiplicative order of a nonzero element.
    pub fn multiplicative_order(self) -> Result<u32> {
        if self.value == 0 {
            return domain("zero has no multiplicative order");
        }
        let f = self.field();
        let mut acc = self.value;
        let mut k = 1;
        while acc != 1 {
            acc = f.mul(acc, self.value);
            k += 1;
        }
        Ok(k)
    }
}

impl Add for FieldScalar {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        debug_assert_eq!(self.p, rhs.p);
        Self {
            value: self.field().add(self.value, rhs.value),
            p: self.p,
        }
    }
}

impl Sub for FieldScalar {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        debug_assert_eq!(self.p, rhs.p);
        Self {
            value: self.field().sub(self.value, rhs.value),
            p: self.p,
        }
    }
}

impl Mul for FieldScalar {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        debug_assert_eq!(self.p, rhs.p);
        Self {
            value: self.field().mul(self.value, rhs.value),
            p: self.p,
        }
    }
}

impl Neg for FieldScalar {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            value: self.field().neg(self.value),
            p: self.p,
        }
    }
}

impl fmt::Display for FieldScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// An element `Σ c_t ζ^t` of `Z[ζ_p]`, `ζ` a fixed primitive `p`-th root of unity.
///
/// Stored with `p` coefficients and kept canonical (`c_{p-1} = 0`), so equality is
/// coefficient equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CycValue {
    coeffs: Vec<i64>,
}

impl CycValue {
    pub fn zero(p: u32) -> Self {
        Self {
            coeffs: vec![0; p as usize],
        }
    }

    pub fn one(p: u32) -> Self {
        Self::integer(p, 1)
    }

    pub fn integer(p: u32, v: i64) -> Self {
        let mut c = Self::zero(p);
        c.coeffs[0] = v;
        c
    }

    /// Builds `Σ counts[t] ζ^t` from an exponent histogram of length `p`.
    pub fn from_exponent_counts(counts: Vec<i64>) -> Self {
        let mut v = Self { coeffs: counts };
        v.canonicalize();
        v
    }

    /// Canonical coefficients `(c_0, …, c_{p-2})`.
    pub fn canonical_coeffs(&self) -> &[i64] {
        &self.coeffs[..self.coeffs.len() - 1]
    }

    pub fn zeta_order(&self) -> u32 {
        self.coeffs.len() as u32
    }

    fn canonicalize(&mut self) {
        let top = *self.coeffs.last().expect("p >= 3");
        if top != 0 {
            for c in self.coeffs.iter_mut() {
                *c -= top;
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn conj(&self) -> Self {
        let p = self.coeffs.len();
        let mut out = vec![0; p];
        for (t, &c) in self.coeffs.iter().enumerate() {
            out[(p - t) % p] = c;
        }
        Self::from_exponent_counts(out)
    }

    /// The value as a rational integer, if it is one.
    pub fn as_rational_integer(&self) -> Result<i64> {
        if self.coeffs[1..].iter().all(|&c| c == 0) {
            Ok(self.coeffs[0])
        } else {
            domain(format!("{self} is not a rational integer"))
        }
    }

    pub fn scale(&self, k: i64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    /// Exact division by a nonzero integer; `None` when the quotient leaves `Z[ζ_p]`.
    ///
    /// `1, ζ, …, ζ^{p-2}` is a Z-basis, so divisibility is coordinate-wise.
    pub fn div_exact(&self, k: i64) -> Option<Self> {
        if k == 0 || self.coeffs.iter().any(|c| c % k != 0) {
            return None;
        }
        Some(Self {
            coeffs: self.coeffs.iter().map(|c| c / k).collect(),
        })
    }

    /// Adds `k·ζ^t` in place.
    pub fn add_eps(&mut self, t: u32, k: i64) {
        let p = self.coeffs.len();
        let t = t as usize % p;
        if t == p - 1 {
            for c in self.coeffs[..p - 1].iter_mut() {
                *c -= k;
            }
        } else {
            self.coeffs[t] += k;
        }
    }
}

/// `ζ^t`, the additive character `t ↦ ε^t` of `F_p`.
pub fn eps(field: PrimeField, t: u32) -> CycValue {
    let mut v = CycValue::zero(field.p());
    v.add_eps(t, 1);
    v
}

impl Add for &CycValue {
    type Output = CycValue;
    fn add(self, rhs: &CycValue) -> CycValue {
        debug_assert_eq!(self.coeffs.len(), rhs.coeffs.len());
        CycValue {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &CycValue {
    type Output = CycValue;
    fn sub(self, rhs: &CycValue) -> CycValue {
        CycValue {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl AddAssign<&CycValue> for CycValue {
    fn add_assign(&mut self, rhs: &CycValue) {
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl Mul for &CycValue {
    type Output = CycValue;
    fn mul(self, rhs: &CycValue) -> CycValue {
        let p = self.coeffs.len();
        let mut out = vec![0i64; p];
        for (s, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (t, &b) in rhs.coeffs.iter().enumerate() {
                out[(s + t) % p] += a * b;
            }
        }
        CycValue::from_exponent_counts(out)
    }
}

impl Neg for &CycValue {
    type Output = CycValue;
    fn neg(self) -> CycValue {
        self.scale(-1)
    }
}

impl fmt::Display for CycValue {
    /// `c0+c1*z+c2*z^2…` with zero terms dropped; `0` for the zero value.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (t, &c) in self.canonical_coeffs().iter().enumerate() {
            if c == 0 {
                continue;
            }
            let term = match t {
                0 => format!("{c}"),
                1 => format!("{c}*z"),
                _ => format!("{c}*z^{t}"),
            };
            if !first && c > 0 {
                write!(f, "+")?;
            }
            write!(f, "{term}")?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Serialize for CycValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("CycValue", 2)?;
        st.serialize_field("zeta_order", &self.zeta_order())?;
        st.serialize_field("coeffs", self.canonical_coeffs())?;
        st.end()
    }
}
