//! The Lie algebra `𝔲`, the Sylow subgroup `U`, their actions, the dual space, and the
//! Springer map.
//!
//! Elements of `𝔲` and `𝔲*` are addressed by coordinates on `Δ⁺`: `x = Σ t_α 𝓔_α` and
//! `λ = Σ c_α (E*_α + ε(α)E*_{α'})`. Coordinates double as base-`p` integers
//! ("indices", root 0 least significant), which is how orbit code enumerates spaces.

pub mod span;
pub mod subgroups;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::field::{FieldScalar, PrimeField};
use crate::matrix::{FormTag, FormType, Mat};
use crate::roots::{Pairing, RootSystem};

pub use span::LinearSubspace;
pub use subgroups::{MatrixSubgroup, SubgroupKind};

/// Default enumeration budget (number of elements).
pub const DEFAULT_BUDGET: u128 = 5_000_000;

/// Choice of Ad-equivariant bijection `U → 𝔲`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub enum SpringerMap {
    /// `f(u) = 2(u-1)(u+1)⁻¹`.
    #[default]
    Cayley,
    /// Truncated logarithm; needs `p > m`.
    Log,
}

impl std::str::FromStr for SpringerMap {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "cayley" => Ok(SpringerMap::Cayley),
            "log" => Ok(SpringerMap::Log),
            other => Err(format!("unknown springer map {other:?}, expected cayley or log")),
        }
    }
}

/// Everything attached to one `(type, n, p)`: the root system, the basis of `𝔲`, the
/// antiautomorphism and the chosen Springer map.
#[derive(Clone, Debug)]
pub struct Sylow {
    tag: FormTag,
    field: PrimeField,
    roots: RootSystem,
    basis: Vec<Mat>,
    springer: SpringerMap,
}

/// An element of `𝔲`: strictly upper triangular with `x† = -x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LieElement {
    tag: FormTag,
    mat: Mat,
}

/// An element of `U`: unitriangular with `g† = g⁻¹`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupElement {
    tag: FormTag,
    mat: Mat,
}

/// A functional on `𝔲` stored by its coefficients on the dual basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct DualElement {
    #[serde(skip)]
    tag: FormTag,
    coeffs: Vec<u32>,
}

impl LieElement {
    pub fn mat(&self) -> &Mat {
        &self.mat
    }

    pub fn tag(&self) -> FormTag {
        self.tag
    }
}

impl GroupElement {
    pub fn mat(&self) -> &Mat {
        &self.mat
    }

    pub fn tag(&self) -> FormTag {
        self.tag
    }
}

impl DualElement {
    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn tag(&self) -> FormTag {
        self.tag
    }
}

impl Sylow {
    pub fn new(tag: FormTag, field: PrimeField) -> Self {
        Self::with_springer(tag, field, SpringerMap::Cayley).expect("Cayley map needs only p odd")
    }

    pub fn with_springer(tag: FormTag, field: PrimeField, springer: SpringerMap) -> Result<Self> {
        if springer == SpringerMap::Log && field.p() as usize <= tag.m() {
            return domain(format!(
                "logarithm Springer map needs p > m, got p = {} and m = {}",
                field.p(),
                tag.m()
            ));
        }
        let roots = RootSystem::new(tag);
        let m = tag.m();
        let basis = (0..roots.len())
            .map(|k| {
                let (r, c) = roots.cell(k);
                let mut e = Mat::unit(field, m, r, c);
                if let Pairing::Signed(s) = roots.pairing(k) {
                    let (mr, mc) = roots.mirror_cell(k);
                    e.set(mr, mc, field.reduce(s as i64));
                }
                e
            })
            .collect();
        Ok(Self {
            tag,
            field,
            roots,
            basis,
            springer,
        })
    }

    pub fn tag(&self) -> FormTag {
        self.tag
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn p(&self) -> u32 {
        self.field.p()
    }

    pub fn m(&self) -> usize {
        self.tag.m()
    }

    pub fn roots(&self) -> &RootSystem {
        &self.roots
    }

    pub fn springer_kind(&self) -> SpringerMap {
        self.springer
    }

    /// `dim 𝔲 = |Δ⁺|`.
    pub fn dim(&self) -> usize {
        self.roots.len()
    }

    /// `p^{|Δ⁺|}`, the common size of `𝔲`, `𝔲*` and `U`.
    pub fn space_size(&self) -> u128 {
        (self.p() as u128).checked_pow(self.dim() as u32).unwrap_or(u128::MAX)
    }

    /// Errors unless `p^{|Δ⁺|}` fits in the budget.
    pub fn check_budget(&self, budget: u128) -> Result<usize> {
        let size = self.space_size();
        if size > budget {
            return Err(Error::Budget {
                what: format!("U for {} over F_{}", self.tag, self.p()),
                required: size,
                budget,
            });
        }
        Ok(size as usize)
    }

    /// `𝓔_α = E_α + ε(α)E_{α'}`, one per root in root order.
    pub fn lie_basis(&self) -> Vec<LieElement> {
        self.basis
            .iter()
            .map(|b| LieElement {
                tag: self.tag,
                mat: b.clone(),
            })
            .collect()
    }

    pub fn basis_matrix(&self, k: usize) -> &Mat {
        &self.basis[k]
    }

    pub fn dagger(&self, x: &Mat) -> Mat {
        x.dagger(self.tag)
    }

    // ---- coordinates ----

    pub fn coords_from_index(&self, mut idx: usize) -> Vec<u32> {
        let p = self.p() as usize;
        let mut out = vec![0u32; self.dim()];
        for c in out.iter_mut() {
            *c = (idx % p) as u32;
            idx /= p;
        }
        out
    }

    pub fn index_of_coords(&self, coords: &[u32]) -> usize {
        let p = self.p() as usize;
        coords.iter().rev().fold(0usize, |acc, &c| acc * p + c as usize)
    }

    pub fn lie_matrix(&self, coords: &[u32]) -> Mat {
        let f = self.field;
        let mut x = Mat::zero(f, self.m());
        for (k, &t) in coords.iter().enumerate() {
            if t == 0 {
                continue;
            }
            let (r, c) = self.roots.cell(k);
            x.set(r, c, t);
            if let Pairing::Signed(s) = self.roots.pairing(k) {
                let (mr, mc) = self.roots.mirror_cell(k);
                x.set(mr, mc, f.reduce(s as i64 * t as i64));
            }
        }
        x
    }

    /// Reads the root-cell entries of a matrix assumed to lie in `𝔲`.
    pub fn lie_coords(&self, x: &Mat) -> Vec<u32> {
        (0..self.dim())
            .map(|k| {
                let (r, c) = self.roots.cell(k);
                x.get(r, c)
            })
            .collect()
    }

    pub fn is_lie(&self, x: &Mat) -> bool {
        x.dim() == self.m() && x.is_strictly_upper() && self.dagger(x) == x.neg()
    }

    pub fn is_group(&self, g: &Mat) -> bool {
        g.dim() == self.m()
            && g.is_upper_unitriangular()
            && self.dagger(g).mul(g).is_identity()
    }

    pub fn lie(&self, x: Mat) -> Result<LieElement> {
        if !self.is_lie(&x) {
            return domain("matrix is not in the Lie algebra u");
        }
        Ok(LieElement { tag: self.tag, mat: x })
    }

    pub fn lie_from_coords(&self, coords: &[u32]) -> LieElement {
        LieElement {
            tag: self.tag,
            mat: self.lie_matrix(coords),
        }
    }

    pub fn group(&self, g: Mat) -> Result<GroupElement> {
        if !self.is_group(&g) {
            return domain("matrix is not in the Sylow subgroup U");
        }
        Ok(GroupElement { tag: self.tag, mat: g })
    }

    pub fn dual(&self, coeffs: Vec<u32>) -> Result<DualElement> {
        if coeffs.len() != self.dim() || coeffs.iter().any(|&c| c >= self.p()) {
            return domain("dual coefficients must be residues, one per positive root");
        }
        Ok(DualElement {
            tag: self.tag,
            coeffs,
        })
    }

    pub fn dual_zero(&self) -> DualElement {
        DualElement {
            tag: self.tag,
            coeffs: vec![0; self.dim()],
        }
    }

    // ---- the decomposition u = u_0 + u_1 ----

    /// Whether cell `(r, c)` lies in a diagonal block (`𝔲_0`) rather than the ideal `𝔲_1`.
    fn in_diagonal_block(&self, r: usize, c: usize) -> bool {
        let n = self.tag.n;
        let hi = self.m() - n;
        (r < n && c < n) || (r >= hi && c >= hi)
    }

    /// `x = x_0 + x_1` with `x_0 ∈ 𝔲_0` and `x_1 ∈ 𝔲_1`.
    pub fn split(&self, x: &LieElement) -> (LieElement, LieElement) {
        let m = self.m();
        let mut x0 = Mat::zero(self.field, m);
        let mut x1 = Mat::zero(self.field, m);
        for r in 0..m {
            for c in 0..m {
                let v = x.mat.get(r, c);
                if self.in_diagonal_block(r, c) {
                    x0.set(r, c, v);
                } else {
                    x1.set(r, c, v);
                }
            }
        }
        (
            LieElement { tag: self.tag, mat: x0 },
            LieElement { tag: self.tag, mat: x1 },
        )
    }

    /// Membership in `U_0 = {diag(A, 1?, (A^τ)⁻¹)}`.
    pub fn is_u0(&self, a: &Mat) -> bool {
        let m = self.m();
        self.is_group(a)
            && (0..m).all(|r| (0..m).all(|c| r == c || self.in_diagonal_block(r, c) || a.get(r, c) == 0))
    }

    /// `diag(A, (A^τ)⁻¹)` (with a middle `1` for `B`) for upper unitriangular `A`.
    pub fn u0_element(&self, a: &Mat) -> Result<GroupElement> {
        if a.dim() != self.tag.n {
            return domain("U_0 block must be n×n");
        }
        let lower = a.tau().inverse_unitriangular()?;
        let g = self.embed_upper(a).mul(&self.embed_lower(&lower));
        self.group(g)
    }

    /// The upper-left block `A` of `a ∈ U_0`.
    fn u0_block(&self, a: &Mat) -> Result<Mat> {
        if !self.is_u0(a) {
            return domain("element is not in U_0");
        }
        let n = self.tag.n;
        let mut out = Mat::zero(self.field, n);
        for r in 0..n {
            for c in 0..n {
                out.set(r, c, a.get(r, c));
            }
        }
        Ok(out)
    }

    /// `diag(A, E)` or `diag(A, 1, E)`.
    fn embed_upper(&self, a: &Mat) -> Mat {
        let mut out = Mat::identity(self.field, self.m());
        for r in 0..a.dim() {
            for c in 0..a.dim() {
                out.set(r, c, a.get(r, c));
            }
        }
        out
    }

    /// `diag(E, A)` or `diag(E, 1, A)`.
    fn embed_lower(&self, a: &Mat) -> Mat {
        let off = self.m() - a.dim();
        let mut out = Mat::identity(self.field, self.m());
        for r in 0..a.dim() {
            for c in 0..a.dim() {
                out.set(off + r, off + c, a.get(r, c));
            }
        }
        out
    }

    /// `ℓ_a(x) = ℓ_a(x_0) + Ad_a(x_1)`, realised as `a_1 x a_1†` with `a_1 = diag(A, E)`.
    pub fn left_action(&self, a: &GroupElement, x: &LieElement) -> Result<LieElement> {
        let a1 = self.embed_upper(&self.u0_block(&a.mat)?);
        Ok(LieElement {
            tag: self.tag,
            mat: a1.mul(&x.mat).mul(&self.dagger(&a1)),
        })
    }

    /// `r_a(x) = r_a(x_0) + x_1`, realised as `a_2 x a_2†` with `a_2 = diag(E, A^τ)`.
    pub fn right_action(&self, a: &GroupElement, x: &LieElement) -> Result<LieElement> {
        let a2 = self.embed_lower(&self.u0_block(&a.mat)?.tau());
        Ok(LieElement {
            tag: self.tag,
            mat: a2.mul(&x.mat).mul(&self.dagger(&a2)),
        })
    }

    /// `Ad_u(x) = u x u⁻¹`.
    pub fn adjoint(&self, u: &GroupElement, x: &LieElement) -> LieElement {
        let inv = u.mat.inverse_unitriangular().expect("group elements are unitriangular");
        LieElement {
            tag: self.tag,
            mat: u.mat.mul(&x.mat).mul(&inv),
        }
    }

    // ---- dual space ----

    /// Weight of coordinate `t_α` in `λ(x)`: `2` for paired roots, `1` for self-paired.
    #[inline]
    pub fn pairing_weight(&self, k: usize) -> u32 {
        match self.roots.pairing(k) {
            Pairing::Signed(_) => 2,
            Pairing::SelfPaired => 1,
        }
    }

    /// `λ(x) = Σ c_α (x_α + ε(α)x_{α'})`; `c_α x_α` for self-paired roots.
    pub fn pair(&self, lambda: &DualElement, x: &LieElement) -> FieldScalar {
        let f = self.field;
        let mut acc = 0u32;
        for (k, &c) in lambda.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let (r, col) = self.roots.cell(k);
            let mut v = x.mat.get(r, col);
            if let Pairing::Signed(s) = self.roots.pairing(k) {
                let (mr, mc) = self.roots.mirror_cell(k);
                v = f.add(v, f.mul(f.reduce(s as i64), x.mat.get(mr, mc)));
            }
            acc = f.add(acc, f.mul(c, v));
        }
        f.scalar(acc as i64)
    }

    /// `λ(x)` from coordinates of both sides.
    #[inline]
    pub fn pair_coords(&self, coeffs: &[u32], coords: &[u32]) -> u32 {
        let f = self.field;
        let mut acc = 0u64;
        for k in 0..coeffs.len() {
            acc += coeffs[k] as u64 * coords[k] as u64 * self.pairing_weight(k) as u64;
        }
        (acc % f.p() as u64) as u32
    }

    /// The matrix `Λ` with `λ(x) = Σ Λ_{ij} x_{ij}` on all of `Mat(m)`: `c_α` at `α`,
    /// `ε(α)c_α` at `α'`.
    pub fn functional_matrix(&self, coeffs: &[u32]) -> Mat {
        self.lie_matrix(coeffs)
    }

    /// Restricts a matrix functional `Λ` to `𝔲` and reads off dual coefficients.
    pub fn fold_functional(&self, big: &Mat) -> Vec<u32> {
        let f = self.field;
        (0..self.dim())
            .map(|k| {
                let (r, c) = self.roots.cell(k);
                match self.roots.pairing(k) {
                    Pairing::SelfPaired => big.get(r, c),
                    Pairing::Signed(s) => {
                        let (mr, mc) = self.roots.mirror_cell(k);
                        let v = f.add(big.get(r, c), f.mul(f.reduce(s as i64), big.get(mr, mc)));
                        f.mul(v, f.half())
                    }
                }
            })
            .collect()
    }

    /// `(g★λ)(x) = λ(g x g†)`; `g` is any upper unitriangular matrix.
    pub fn dual_action_matrix(&self, g: &Mat, lambda: &DualElement) -> DualElement {
        let big = self.functional_matrix(&lambda.coeffs);
        let moved = g.transpose().mul(&big).mul(&self.dagger(g).transpose());
        DualElement {
            tag: self.tag,
            coeffs: self.fold_functional(&moved),
        }
    }

    /// `(g★λ)(x) = λ(g x g†)` for `g ∈ 𝒢`.
    pub fn dual_action(&self, g: &Mat, lambda: &DualElement) -> Result<DualElement> {
        if !MatrixSubgroup::g_script(self).contains(g) {
            return domain("dual action requires an element of the group G_script");
        }
        Ok(self.dual_action_matrix(g, lambda))
    }

    // ---- Springer maps ----

    /// Cayley map `f(u) = 2(u-1)(u+1)⁻¹`.
    pub fn cayley(&self, u: &Mat) -> Mat {
        let one = Mat::identity(self.field, self.m());
        let y = u.sub(&one);
        let denom = u.add(&one).inverse_scalar_plus_nilpotent().expect("u + 1 = 2 + nilpotent");
        y.scale(2).mul(&denom)
    }

    /// `f⁻¹(y) = (2+y)(2-y)⁻¹`.
    pub fn cayley_inv(&self, y: &Mat) -> Mat {
        let two = Mat::identity(self.field, self.m()).scale(2);
        let denom = two.sub(y).inverse_scalar_plus_nilpotent().expect("2 - y = 2 + nilpotent");
        two.add(y).mul(&denom)
    }

    /// `ln(1+y) = Σ_{k<m} (-1)^{k+1} y^k / k`.
    pub fn log(&self, u: &Mat) -> Mat {
        let f = self.field;
        let y = u.sub(&Mat::identity(f, self.m()));
        let mut acc = Mat::zero(f, self.m());
        let mut power = y.clone();
        for k in 1..self.m() {
            let coef = f.inv(k as u32 % f.p()).expect("p > m");
            let coef = if k % 2 == 1 { coef } else { f.neg(coef) };
            acc = acc.add(&power.scale(coef));
            power = power.mul(&y);
        }
        acc
    }

    /// `exp(x) = Σ_{k<m} x^k / k!`.
    pub fn exp(&self, x: &Mat) -> Mat {
        let f = self.field;
        let mut acc = Mat::identity(f, self.m());
        let mut power = Mat::identity(f, self.m());
        let mut fact = 1u32;
        for k in 1..self.m() {
            power = power.mul(x);
            fact = f.mul(fact, k as u32 % f.p());
            acc = acc.add(&power.scale(f.inv(fact).expect("p > m")));
        }
        acc
    }

    /// The configured Springer map `f: U → 𝔲`.
    pub fn springer(&self, u: &Mat) -> Mat {
        match self.springer {
            SpringerMap::Cayley => self.cayley(u),
            SpringerMap::Log => self.log(u),
        }
    }

    /// `f⁻¹: 𝔲 → U`.
    pub fn springer_inv(&self, x: &Mat) -> Mat {
        match self.springer {
            SpringerMap::Cayley => self.cayley_inv(x),
            SpringerMap::Log => self.exp(x),
        }
    }

    /// `f(u)` as an element of `𝔲`.
    pub fn to_lie(&self, u: &GroupElement) -> LieElement {
        LieElement {
            tag: self.tag,
            mat: self.springer(&u.mat),
        }
    }

    /// `f⁻¹(x)` as an element of `U`.
    pub fn to_group(&self, x: &LieElement) -> GroupElement {
        GroupElement {
            tag: self.tag,
            mat: self.springer_inv(&x.mat),
        }
    }

    /// Group element with Lie coordinates `coords` under the Springer bijection.
    pub fn group_from_coords(&self, coords: &[u32]) -> Mat {
        self.springer_inv(&self.lie_matrix(coords))
    }

    /// Index of `u ∈ U` in the enumeration order `f⁻¹(x_0), f⁻¹(x_1), …`.
    pub fn group_index(&self, u: &Mat) -> usize {
        self.index_of_coords(&self.lie_coords(&self.springer(u)))
    }

    /// `U` enumerated as `f⁻¹(𝔲)`, in the index order of `𝔲`.
    pub fn enumerate_group(&self, budget: u128) -> Result<Vec<Mat>> {
        let size = self.check_budget(budget)?;
        Ok(crate::par::map_range(size, |i| {
            self.group_from_coords(&self.coords_from_index(i))
        }))
    }

    /// `diag(E, A_3(c), E)` for type `B`: the subgroup `S`.
    pub fn s_element(&self, c: u32) -> Result<Mat> {
        if self.tag.kind != FormType::B {
            return domain("the subgroup S exists only in type B");
        }
        Ok(subgroups::s_matrix(self.field, self.tag.n, c))
    }

    /// For type `B`, writes `u = s(c)·u'` with `u' ∈ U ∩ 𝒢^◊`; returns `(c, u')`.
    pub fn split_s(&self, u: &Mat) -> (u32, Mat) {
        if self.tag.kind != FormType::B {
            return (0, u.clone());
        }
        let n = self.tag.n;
        let c = u.get(n - 1, n);
        if c == 0 {
            return (0, u.clone());
        }
        let s_inv = subgroups::s_matrix(self.field, n, self.field.neg(c));
        (c, s_inv.mul(u))
    }

    /// Linear map on `𝔲`-coordinates induced by `x ↦ g x g†`, as an `N×N` column-major table.
    pub fn lie_action_table(&self, g: &Mat) -> LinearMap {
        let gd = self.dagger(g);
        let cols = self
            .basis
            .iter()
            .map(|b| self.lie_coords(&g.mul(b).mul(&gd)))
            .collect();
        LinearMap::from_columns(self.field, cols)
    }

    /// Linear map on dual coefficients induced by `λ ↦ g★λ`.
    pub fn dual_action_table(&self, g: &Mat) -> LinearMap {
        let cols = (0..self.dim())
            .map(|k| {
                let e = DualElement {
                    tag: self.tag,
                    coeffs: span::unit_vec(self.dim(), k),
                };
                self.dual_action_matrix(g, &e).coeffs
            })
            .collect();
        LinearMap::from_columns(self.field, cols)
    }

    /// Linear map `x ↦ Ad_g(x)` on `𝔲`-coordinates.
    pub fn adjoint_table(&self, g: &Mat) -> LinearMap {
        let inv = g.inverse_unitriangular().expect("unitriangular");
        let cols = self
            .basis
            .iter()
            .map(|b| self.lie_coords(&g.mul(b).mul(&inv)))
            .collect();
        LinearMap::from_columns(self.field, cols)
    }
}

/// A square matrix acting on coordinate vectors, stored column-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearMap {
    field: PrimeField,
    n: usize,
    cols: Vec<Vec<u32>>,
}

impl LinearMap {
    pub fn from_columns(field: PrimeField, cols: Vec<Vec<u32>>) -> Self {
        let n = cols.len();
        Self { field, n, cols }
    }

    pub fn apply(&self, v: &[u32]) -> Vec<u32> {
        let p = self.field.p() as u64;
        let mut acc = vec![0u64; self.n];
        for (k, &t) in v.iter().enumerate() {
            if t == 0 {
                continue;
            }
            for (a, &c) in acc.iter_mut().zip(&self.cols[k]) {
                *a += t as u64 * c as u64;
            }
        }
        acc.into_iter().map(|a| (a % p) as u32).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.cols
            .iter()
            .enumerate()
            .all(|(k, c)| c.iter().enumerate().all(|(j, &v)| v == u32::from(j == k)))
    }
}

#[cfg(test)]
mod tests;
