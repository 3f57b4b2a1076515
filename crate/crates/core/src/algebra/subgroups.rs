//! The matrix groups `U`, `𝒢`, `ℋ`, `S`, `𝒢^◊`, `ℋ^◊`: shape predicates, generators and
//! closure.

use std::collections::HashSet;

use serde::Serialize;

use super::span::{mat_to_vec, vec_to_mat, LinearSubspace};
use super::Sylow;
use crate::error::{domain, Error, Result};
use crate::field::PrimeField;
use crate::matrix::{FormTag, FormType, Mat};

/// Which named subgroup a [`MatrixSubgroup`] describes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum SubgroupKind {
    U,
    GScript,
    HScript,
    S,
    GDiamond,
    HDiamond,
    /// `1 + A` for an associative algebra `A` of strictly upper triangular matrices.
    Algebra,
}

/// A subgroup of `UT(m, F_p)` given by a membership predicate and a generating set.
#[derive(Clone, Debug)]
pub struct MatrixSubgroup {
    tag: FormTag,
    field: PrimeField,
    kind: SubgroupKind,
    generators: Vec<Mat>,
    algebra: Option<LinearSubspace>,
}

/// `A_3(c) = [[1, c, -c²/2], [0, 1, -c], [0, 0, 1]]` placed on positions `n-1, n, n+1`.
pub fn s_matrix(field: PrimeField, n: usize, c: u32) -> Mat {
    let mut s = Mat::identity(field, 2 * n + 1);
    s.set(n - 1, n, c);
    s.set(n, n + 1, field.neg(c));
    s.set(n - 1, n + 1, field.neg(field.mul(field.mul(c, c), field.half())));
    s
}

/// `M(v_1, v_2)` for type `B_n`: blocks `(n, 1, n)` with `v_1` in the middle column,
/// `-v_2^τ` in the middle row and `-½ v_1 v_2^τ` in the corner.
pub fn m_matrix(field: PrimeField, v1: &[u32], v2: &[u32]) -> Mat {
    let n = v1.len();
    assert_eq!(n, v2.len());
    let m = 2 * n + 1;
    let mut g = Mat::identity(field, m);
    // v^τ for a column of length n is the row (v_n, …, v_1)
    let tau = |v: &[u32], k: usize| v[n - 1 - k];
    for r in 0..n {
        g.set(r, n, v1[r]);
        for k in 0..n {
            let prod = field.mul(v1[r], tau(v2, k));
            g.set(r, n + 1 + k, field.neg(field.mul(prod, field.half())));
        }
    }
    for k in 0..n {
        g.set(n, n + 1 + k, field.neg(tau(v2, k)));
    }
    g
}

/// `F(B) = [[E, 0, B], [0, 1, 0], [0, 0, E]]` for an `n×n` block `B`.
pub fn f_matrix(field: PrimeField, b: &Mat) -> Mat {
    let n = b.dim();
    let mut g = Mat::identity(field, 2 * n + 1);
    for r in 0..n {
        for c in 0..n {
            g.set(r, n + 1 + c, b.get(r, c));
        }
    }
    g
}

fn strict_cells(m: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..m).flat_map(move |r| (r + 1..m).map(move |c| (r, c)))
}

/// Cells of the two diagonal `n×n` blocks (the Lie algebra of `diag(A_1, A_2)`).
fn diagonal_block_cells(tag: FormTag) -> Vec<(usize, usize)> {
    let n = tag.n;
    let hi = tag.m() - n;
    strict_cells(tag.m())
        .filter(|&(r, c)| (c < n) || (r >= hi))
        .collect()
}

/// Lie algebra of `𝒢^◊`, in `F_p^{m²}`.
pub fn g_diamond_algebra(tag: FormTag, field: PrimeField) -> LinearSubspace {
    diamond_algebra(tag, field, false)
}

/// Lie algebra of `ℋ^◊`, in `F_p^{m²}`.
pub fn h_diamond_algebra(tag: FormTag, field: PrimeField) -> LinearSubspace {
    diamond_algebra(tag, field, true)
}

fn diamond_algebra(tag: FormTag, field: PrimeField, upper_rows_only: bool) -> LinearSubspace {
    let m = tag.m();
    let n = tag.n;
    let row_limit = match tag.kind {
        FormType::B => n + 1,
        FormType::C | FormType::D => n,
    };
    let mut vectors = Vec::new();
    for (r, c) in strict_cells(m) {
        if upper_rows_only && r >= row_limit {
            continue;
        }
        let skip = match tag.kind {
            FormType::B => [(n - 1, n), (n - 1, n + 1), (n, n + 1)].contains(&(r, c)),
            FormType::C => false,
            FormType::D => (r, c) == (n - 1, n) || (n >= 2 && ((r, c) == (n - 2, n) || (r, c) == (n - 1, n + 1))),
        };
        if !skip {
            vectors.push(mat_to_vec(&Mat::unit(field, m, r, c)));
        }
    }
    if tag.kind == FormType::D && n >= 2 {
        let mut x = Mat::unit(field, m, n - 2, n);
        x.set(n - 1, n + 1, field.neg(1));
        vectors.push(mat_to_vec(&x));
    }
    LinearSubspace::span(field, m * m, vectors)
}

/// Generators `1 + t·b` over a basis adapted to the filtration `A ⊃ A² ⊃ …`.
pub fn algebra_group_generators(field: PrimeField, m: usize, algebra: &LinearSubspace) -> Vec<Mat> {
    let mut powers = vec![algebra.clone()];
    loop {
        let last = powers.last().unwrap();
        if last.dim() == 0 {
            break;
        }
        let a_mats = algebra.basis_matrices(m);
        let l_mats = last.basis_matrices(m);
        let next = LinearSubspace::span(
            field,
            m * m,
            a_mats
                .iter()
                .flat_map(|a| l_mats.iter().map(move |b| mat_to_vec(&a.mul(b)))),
        );
        if next.dim() == last.dim() {
            break;
        }
        powers.push(next);
    }
    // walk from the deepest power outwards, extending a basis each step
    let mut chosen = LinearSubspace::zero(field, m * m);
    let mut basis = Vec::new();
    for layer in powers.iter().rev() {
        for v in layer.basis() {
            if chosen.insert(v.clone()) {
                basis.push(vec_to_mat(field, m, v));
            }
        }
    }
    let one = Mat::identity(field, m);
    basis
        .iter()
        .flat_map(|b| field.nonzero().map(move |t| (b, t)))
        .map(|(b, t)| one.add(&b.scale(t)))
        .collect()
}

impl MatrixSubgroup {
    /// The Sylow subgroup `U`, generated by its root subgroups.
    pub fn u(sylow: &Sylow) -> Self {
        Self::named(sylow, SubgroupKind::U, root_generators(sylow, |_| true))
    }

    /// `U_1`, the normal factor of `U = U_1U_0`.
    pub fn u1_generators(sylow: &Sylow) -> Vec<Mat> {
        let n = sylow.tag().n;
        root_generators(sylow, |(r, c)| r < n && c >= n)
    }

    /// `𝒢`, generated by `U` and the block-diagonal unitriangular matrices.
    pub fn g_script(sylow: &Sylow) -> Self {
        let mut gens = root_generators(sylow, |_| true);
        gens.extend(elementary(sylow.field(), sylow.m(), &diagonal_block_cells(sylow.tag())));
        Self::named(sylow, SubgroupKind::GScript, gens)
    }

    /// `ℋ`, generated by `U_1` and `diag(A, E)` (`diag(A, 1, E)` for `B`).
    pub fn h_script(sylow: &Sylow) -> Self {
        let n = sylow.tag().n;
        let mut gens = Self::u1_generators(sylow);
        let upper: Vec<_> = diagonal_block_cells(sylow.tag())
            .into_iter()
            .filter(|&(_, c)| c < n)
            .collect();
        gens.extend(elementary(sylow.field(), sylow.m(), &upper));
        Self::named(sylow, SubgroupKind::HScript, gens)
    }

    /// `S = {diag(E, A_3(c), E)}`, type `B` only.
    pub fn s(sylow: &Sylow) -> Result<Self> {
        let gens = sylow
            .field()
            .nonzero()
            .map(|c| sylow.s_element(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::named(sylow, SubgroupKind::S, gens))
    }

    /// `𝒢^◊ = 1 + 𝔤^◊` (equal to `𝒢` outside type `B`).
    pub fn g_diamond(sylow: &Sylow) -> Self {
        let alg = g_diamond_algebra(sylow.tag(), sylow.field());
        let gens = algebra_group_generators(sylow.field(), sylow.m(), &alg);
        Self::named(sylow, SubgroupKind::GDiamond, gens)
    }

    /// `ℋ^◊ = 1 + 𝔥^◊` (equal to `ℋ` outside type `B`).
    pub fn h_diamond(sylow: &Sylow) -> Self {
        let alg = h_diamond_algebra(sylow.tag(), sylow.field());
        let gens = algebra_group_generators(sylow.field(), sylow.m(), &alg);
        Self::named(sylow, SubgroupKind::HDiamond, gens)
    }

    /// `1 + A` for an associative algebra `A` of strictly upper triangular matrices.
    pub fn algebra_group(tag: FormTag, field: PrimeField, algebra: LinearSubspace) -> Result<Self> {
        let m = tag.m();
        if algebra.ambient() != m * m {
            return domain("algebra lives in the wrong matrix space");
        }
        if !algebra.basis_matrices(m).iter().all(Mat::is_strictly_upper) {
            return domain("algebra group needs strictly upper triangular matrices");
        }
        if !algebra.is_closed_under_product(m) {
            return Err(Error::TheoremViolation(
                "subspace is not closed under the matrix product".into(),
            ));
        }
        let generators = algebra_group_generators(field, m, &algebra);
        Ok(Self {
            tag,
            field,
            kind: SubgroupKind::Algebra,
            generators,
            algebra: Some(algebra),
        })
    }

    fn named(sylow: &Sylow, kind: SubgroupKind, generators: Vec<Mat>) -> Self {
        Self {
            tag: sylow.tag(),
            field: sylow.field(),
            kind,
            generators,
            algebra: None,
        }
    }

    pub fn kind(&self) -> &SubgroupKind {
        &self.kind
    }

    pub fn tag(&self) -> FormTag {
        self.tag
    }

    pub fn generators(&self) -> &[Mat] {
        &self.generators
    }

    /// Number of free entries in the shape description; the group has `p^dimension`
    /// elements.
    pub fn dimension(&self) -> usize {
        let m = self.tag.m();
        let n = self.tag.n;
        let cells_in_rows = |rows: usize| (0..rows).map(|r| m - 1 - r).sum::<usize>();
        let all = m * (m - 1) / 2;
        let d_loss = 1 + usize::from(n >= 2);
        match (&self.kind, self.tag.kind) {
            (SubgroupKind::U, FormType::D) => n * n - n,
            (SubgroupKind::U, _) => n * n,
            (SubgroupKind::GScript, FormType::B) => all - 2,
            (SubgroupKind::GScript, FormType::C) | (SubgroupKind::GDiamond, FormType::C) => all,
            (SubgroupKind::GScript, FormType::D) | (SubgroupKind::GDiamond, FormType::D) => all - d_loss,
            (SubgroupKind::HScript, FormType::B) => cells_in_rows(n + 1) - 2,
            (SubgroupKind::HScript, FormType::C) | (SubgroupKind::HDiamond, FormType::C) => cells_in_rows(n),
            (SubgroupKind::HScript, FormType::D) | (SubgroupKind::HDiamond, FormType::D) => {
                cells_in_rows(n) - d_loss
            }
            (SubgroupKind::S, _) => 1,
            (SubgroupKind::GDiamond, FormType::B) => all - 3,
            (SubgroupKind::HDiamond, FormType::B) => cells_in_rows(n + 1) - 3,
            (SubgroupKind::Algebra, _) => self.algebra.as_ref().map_or(0, LinearSubspace::dim),
        }
    }

    /// `p^dimension`.
    pub fn order(&self) -> u128 {
        (self.field.p() as u128)
            .checked_pow(self.dimension() as u32)
            .unwrap_or(u128::MAX)
    }

    /// Shape-based membership.
    pub fn contains(&self, g: &Mat) -> bool {
        let m = self.tag.m();
        let n = self.tag.n;
        if g.dim() != m || !g.is_upper_unitriangular() {
            return false;
        }
        let f = self.field;
        let identity_rows_from = |start: usize| {
            (start..m).all(|r| (r + 1..m).all(|c| g.get(r, c) == 0))
        };
        // middle block of type B in exponential form with parameter c
        let b_exp = |zero_c: bool| {
            let c = g.get(n - 1, n);
            (!zero_c || c == 0)
                && g.get(n, n + 1) == f.neg(c)
                && g.get(n - 1, n + 1) == f.neg(f.mul(f.mul(c, c), f.half()))
        };
        let d_wd = || {
            g.get(n - 1, n) == 0 && (n < 2 || g.get(n - 1, n + 1) == f.neg(g.get(n - 2, n)))
        };
        match (&self.kind, self.tag.kind) {
            (SubgroupKind::U, _) => g.dagger(self.tag).mul(g).is_identity(),
            (SubgroupKind::GScript, FormType::B) => b_exp(false),
            (SubgroupKind::GDiamond, FormType::B) => b_exp(true),
            (SubgroupKind::HScript, FormType::B) => b_exp(false) && identity_rows_from(n + 1),
            (SubgroupKind::HDiamond, FormType::B) => b_exp(true) && identity_rows_from(n + 1),
            (SubgroupKind::GScript | SubgroupKind::GDiamond, FormType::C) => true,
            (SubgroupKind::HScript | SubgroupKind::HDiamond, FormType::C) => identity_rows_from(n),
            (SubgroupKind::GScript | SubgroupKind::GDiamond, FormType::D) => d_wd(),
            (SubgroupKind::HScript | SubgroupKind::HDiamond, FormType::D) => d_wd() && identity_rows_from(n),
            (SubgroupKind::S, FormType::B) => {
                let s = s_matrix(f, n, g.get(n - 1, n));
                s == *g
            }
            (SubgroupKind::S, _) => g.is_identity(),
            (SubgroupKind::Algebra, _) => {
                let alg = self.algebra.as_ref().expect("algebra groups carry their algebra");
                alg.contains_matrix(&g.sub(&Mat::identity(f, m)))
            }
        }
    }

    /// Breadth-first closure of the generators under right multiplication.
    pub fn closure(&self, budget: u128) -> Result<Vec<Mat>> {
        let one = Mat::identity(self.field, self.tag.m());
        let mut seen: HashSet<Mat> = HashSet::new();
        seen.insert(one.clone());
        let mut frontier = vec![one];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for g in &frontier {
                for h in &self.generators {
                    let gh = g.mul(h);
                    if !seen.contains(&gh) {
                        if seen.len() as u128 >= budget {
                            return Err(Error::Budget {
                                what: format!("closure of {:?} for {}", self.kind, self.tag),
                                required: self.order(),
                                budget,
                            });
                        }
                        seen.insert(gh.clone());
                        next.push(gh);
                    }
                }
            }
            frontier = next;
        }
        let mut out: Vec<Mat> = seen.into_iter().collect();
        out.sort_by(|a, b| a.as_bytes().cmp(b.as_bytes()));
        Ok(out)
    }

    /// Every element, by closure when enumerable; sorted by matrix bytes.
    pub fn elements(&self, budget: u128) -> Result<Vec<Mat>> {
        if self.order() > budget {
            return Err(Error::Budget {
                what: format!("elements of {:?} for {}", self.kind, self.tag),
                required: self.order(),
                budget,
            });
        }
        self.closure(budget)
    }
}

/// Root-subgroup generators `f⁻¹(t𝓔_α)` for roots whose cell passes `keep`.
fn root_generators(sylow: &Sylow, keep: impl Fn((usize, usize)) -> bool) -> Vec<Mat> {
    let roots = sylow.roots();
    let mut out = Vec::new();
    for k in 0..roots.len() {
        if !keep(roots.cell(k)) {
            continue;
        }
        for t in sylow.field().nonzero() {
            let mut coords = vec![0; roots.len()];
            coords[k] = t;
            out.push(sylow.cayley_inv(&sylow.lie_matrix(&coords)));
        }
    }
    out
}

fn elementary(field: PrimeField, m: usize, cells: &[(usize, usize)]) -> Vec<Mat> {
    let one = Mat::identity(field, m);
    cells
        .iter()
        .flat_map(|&(r, c)| field.nonzero().map(move |t| (r, c, t)))
        .map(|(r, c, t)| {
            let mut g = one.clone();
            g.set(r, c, t);
            g
        })
        .collect()
}
