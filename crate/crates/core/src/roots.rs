//! The ordered index set `1 ≺ … ≺ n ≺ 0 ≺ -n ≺ … ≺ -1`, positive roots, mirror cells
//! and signs, and (quasi)basic rook placements.

use std::fmt;

use serde::ser::{SerializeSeq, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::error::{domain, Result};
use crate::field::PrimeField;
use crate::matrix::{FormTag, FormType, Mat};

/// 1-based matrix position of an index label under the order `1 ≺ … ≺ n ≺ 0 ≺ -n ≺ … ≺ -1`.
///
/// Label `0` only exists for type `B`.
pub fn position(tag: FormTag, label: i32) -> Result<usize> {
    let n = tag.n as i32;
    if label.abs() > n || (label == 0 && tag.kind != FormType::B) {
        return domain(format!("label {label} is not an index of {tag}"));
    }
    let m = tag.m() as i32;
    Ok(match label {
        k if k > 0 => k as usize,
        0 => (n + 1) as usize,
        k => (m + 1 + k) as usize,
    })
}

/// Inverse of [`position`].
pub fn label_at(tag: FormTag, pos: usize) -> i32 {
    let n = tag.n;
    let m = tag.m();
    debug_assert!((1..=m).contains(&pos));
    if pos <= n {
        pos as i32
    } else if tag.kind == FormType::B && pos == n + 1 {
        0
    } else {
        pos as i32 - m as i32 - 1
    }
}

/// A pair of index labels `(i, j)`; positive roots have `1 ≤ i ≤ n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Root {
    pub row: i32,
    pub col: i32,
}

impl Root {
    pub const fn new(row: i32, col: i32) -> Self {
        Self { row, col }
    }

    /// `α' = (-j, -i)`.
    pub fn mirror(self) -> Root {
        Root::new(-self.col, -self.row)
    }

    /// 0-based matrix cell.
    pub fn cell(self, tag: FormTag) -> Result<(usize, usize)> {
        Ok((position(tag, self.row)? - 1, position(tag, self.col)? - 1))
    }

    pub fn is_positive(self, tag: FormTag) -> bool {
        let n = tag.n as i32;
        if self.row < 1 || self.row > n {
            return false;
        }
        let (Ok(pi), Ok(pj), Ok(pneg)) = (
            position(tag, self.row),
            position(tag, self.col),
            position(tag, -self.row),
        ) else {
            return false;
        };
        match tag.kind {
            FormType::B => pi < pj && pj < pneg,
            FormType::C => pi < pj && pj <= pneg && self.col != 0,
            FormType::D => pi < pj && pj < pneg && self.col != 0,
        }
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

impl Serialize for Root {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(2))?;
        seq.serialize_element(&self.row)?;
        seq.serialize_element(&self.col)?;
        seq.end()
    }
}

/// How the coordinate at `α` is tied to the coordinate at `α'` inside `𝔲`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pairing {
    /// `x_{α'} = ε·x_α` with `ε = ±1`.
    Signed(i8),
    /// `α' = α` (type `C`, roots `(i, -i)`).
    SelfPaired,
}

/// Positive roots of one form with their cells and signs.
#[derive(Clone, Debug)]
pub struct RootSystem {
    tag: FormTag,
    roots: Vec<Root>,
    cells: Vec<(usize, usize)>,
    mirror_cells: Vec<(usize, usize)>,
    pairings: Vec<Pairing>,
}

impl RootSystem {
    pub fn new(tag: FormTag) -> Self {
        let roots = positive_roots(tag);
        let cells: Vec<_> = roots.iter().map(|r| r.cell(tag).unwrap()).collect();
        let m = tag.m();
        let mirror_cells: Vec<_> = cells.iter().map(|&(r, c)| (m - 1 - c, m - 1 - r)).collect();
        let pairings = roots.iter().map(|&r| sign_eps(tag, r).unwrap()).collect();
        Self {
            tag,
            roots,
            cells,
            mirror_cells,
            pairings,
        }
    }

    pub fn tag(&self) -> FormTag {
        self.tag
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    pub fn root(&self, k: usize) -> Root {
        self.roots[k]
    }

    pub fn index_of(&self, root: Root) -> Option<usize> {
        self.roots.iter().position(|&r| r == root)
    }

    pub fn cell(&self, k: usize) -> (usize, usize) {
        self.cells[k]
    }

    pub fn mirror_cell(&self, k: usize) -> (usize, usize) {
        self.mirror_cells[k]
    }

    pub fn pairing(&self, k: usize) -> Pairing {
        self.pairings[k]
    }

    /// Rook condition on the matrix `x_{D,φ}`: the cells of the roots of `D` together with
    /// their mirror cells occupy distinct rows and columns. In types `B` and `D` a pair
    /// `(i,n), (i,-n)` may share row `i`, and then its two mirrors share column `-i`.
    pub fn is_quasibasic(&self, mask: u64) -> bool {
        self.rook_check(mask, self.tag.kind != FormType::C)
    }

    /// The rook condition without the `(i,n), (i,-n)` exception.
    pub fn is_basic(&self, mask: u64) -> bool {
        self.rook_check(mask, false)
    }

    fn rook_check(&self, mask: u64, allow_pair: bool) -> bool {
        let n = self.tag.n as i32;
        let m = self.tag.m();
        let mut rows = vec![0u8; m];
        let mut cols = vec![0u8; m];
        let mut shared_rows = Vec::new();
        let mut shared_cols = Vec::new();
        for k in 0..self.roots.len() {
            if mask >> k & 1 == 0 {
                continue;
            }
            let r = self.roots[k];
            if allow_pair && r.col == n && n > 0 {
                if let Some(j) = self.index_of(Root::new(r.row, -n)) {
                    if mask >> j & 1 == 1 {
                        shared_rows.push(self.cells[k].0);
                        shared_cols.push(self.mirror_cells[k].1);
                    }
                }
            }
            let (a, b) = self.cells[k];
            rows[a] += 1;
            cols[b] += 1;
            if self.pairings[k] != Pairing::SelfPaired {
                let (c, d) = self.mirror_cells[k];
                rows[c] += 1;
                cols[d] += 1;
            }
        }
        let ok = |counts: &[u8], shared: &[usize]| {
            counts
                .iter()
                .enumerate()
                .all(|(i, &c)| c <= 1 || (c == 2 && shared.contains(&i)))
        };
        ok(&rows, &shared_rows) && ok(&cols, &shared_cols)
    }

    pub fn mask_of(&self, roots: &[Root]) -> Result<u64> {
        let mut mask = 0u64;
        for &r in roots {
            let Some(k) = self.index_of(r) else {
                return domain(format!("{r} is not a positive root of {}", self.tag));
            };
            mask |= 1 << k;
        }
        Ok(mask)
    }

    pub fn roots_of(&self, mask: u64) -> Vec<Root> {
        (0..self.roots.len())
            .filter(|&k| mask >> k & 1 == 1)
            .map(|k| self.roots[k])
            .collect()
    }

    /// Every quasibasic subset as a bitmask, ordered by size and then lexicographically
    /// by root index.
    pub fn quasibasic_masks(&self) -> Vec<u64> {
        assert!(self.roots.len() <= 64, "root system too large for bitmask enumeration");
        let mut out = Vec::new();
        self.extend_quasibasic(0, 0, &mut out);
        out.sort_by(|&a, &b| {
            a.count_ones().cmp(&b.count_ones()).then_with(|| {
                let ia: Vec<u32> = bits(a).collect();
                let ib: Vec<u32> = bits(b).collect();
                ia.cmp(&ib)
            })
        });
        out
    }

    fn extend_quasibasic(&self, start: usize, mask: u64, out: &mut Vec<u64>) {
        out.push(mask);
        for k in start..self.roots.len() {
            let next = mask | 1 << k;
            if self.is_quasibasic(next) {
                self.extend_quasibasic(k + 1, next, out);
            }
        }
    }
}

fn bits(mask: u64) -> impl Iterator<Item = u32> {
    (0..64).filter(move |k| mask >> k & 1 == 1)
}

/// `Δ⁺` in lexicographic (row, column-position) order.
pub fn positive_roots(tag: FormTag) -> Vec<Root> {
    let n = tag.n as i32;
    let m = tag.m();
    let mut out = Vec::new();
    for i in 1..=n {
        for pos in 1..=m {
            let r = Root::new(i, label_at(tag, pos));
            if r.is_positive(tag) {
                out.push(r);
            }
        }
    }
    out
}

/// The sign tying `x_{α'}` to `x_α` in `𝔲`, read off from `E_α†`.
///
/// `(E_α + ε E_{α'})† = -(E_α + ε E_{α'})` forces `ε = -s` where `E_α† = s E_{α'}`.
pub fn sign_eps(tag: FormTag, alpha: Root) -> Result<Pairing> {
    if !alpha.is_positive(tag) {
        return domain(format!("{alpha} is not a positive root of {tag}"));
    }
    if alpha.mirror() == alpha {
        return Ok(Pairing::SelfPaired);
    }
    // Any odd prime separates +1 from -1.
    let f = PrimeField::new(3).unwrap();
    let (r, c) = alpha.cell(tag)?;
    let (mr, mc) = alpha.mirror().cell(tag)?;
    let d = Mat::unit(f, tag.m(), r, c).dagger(tag);
    let s = d.get(mr, mc);
    Ok(match s {
        1 => Pairing::Signed(-1),
        2 => Pairing::Signed(1),
        _ => return domain("dagger does not map E_α onto the mirror cell"),
    })
}

/// A quasibasic root set `D` with nonzero values `φ: D → F_p*`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RookPlacement {
    pub roots: Vec<Root>,
    pub phi: Vec<u32>,
}

impl RookPlacement {
    pub fn empty() -> Self {
        Self {
            roots: Vec::new(),
            phi: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn value_at(&self, root: Root) -> Option<u32> {
        self.roots
            .iter()
            .position(|&r| r == root)
            .map(|k| self.phi[k])
    }

    /// Checks the invariants against a root system: roots positive and quasibasic, values
    /// nonzero in `F_p`.
    pub fn validate(&self, system: &RootSystem, field: PrimeField) -> Result<()> {
        if self.roots.len() != self.phi.len() {
            return domain("placement has mismatched root and value lists");
        }
        let mask = system.mask_of(&self.roots)?;
        if mask.count_ones() as usize != self.roots.len() {
            return domain("placement lists a root twice");
        }
        if !system.is_quasibasic(mask) {
            return domain("placement support is not quasibasic");
        }
        if self.phi.iter().any(|&v| v == 0 || v >= field.p()) {
            return domain("placement values must be nonzero residues");
        }
        Ok(())
    }
}

impl fmt::Display for RookPlacement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.roots.is_empty() {
            return write!(f, "∅");
        }
        let parts: Vec<String> = self
            .roots
            .iter()
            .zip(&self.phi)
            .map(|(r, v)| format!("{r}:{v}"))
            .collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl Serialize for RookPlacement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("RookPlacement", 2)?;
        st.serialize_field("D", &self.roots)?;
        st.serialize_field("phi", &self.phi)?;
        st.end()
    }
}

/// All quasibasic subsets of `Δ⁺`, in the order of [`RootSystem::quasibasic_masks`].
pub fn enumerate_quasibasic(tag: FormTag) -> Vec<Vec<Root>> {
    let sys = RootSystem::new(tag);
    sys.quasibasic_masks()
        .into_iter()
        .map(|m| sys.roots_of(m))
        .collect()
}

/// Every rook placement: each quasibasic set extended by all `φ`, `φ` lexicographic.
pub fn enumerate_placements(tag: FormTag, field: PrimeField) -> Vec<RookPlacement> {
    let base = field.p() as usize - 1;
    let mut out = Vec::new();
    for d in enumerate_quasibasic(tag) {
        let k = d.len();
        let total = base.pow(k as u32);
        for code in 0..total {
            // digits of `code` in base p-1, most significant first
            let mut phi = vec![0u32; k];
            let mut rest = code;
            for slot in phi.iter_mut().rev() {
                *slot = (rest % base) as u32 + 1;
                rest /= base;
            }
            out.push(RookPlacement {
                roots: d.clone(),
                phi,
            });
        }
    }
    out
}

/// `Σ_D (p-1)^{|D|}` over quasibasic `D`.
pub fn count_superclasses(tag: FormTag, p: u32) -> u128 {
    let sys = RootSystem::new(tag);
    sys.quasibasic_masks()
        .into_iter()
        .map(|mask| ((p - 1) as u128).pow(mask.count_ones()))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tag(kind: FormType, n: usize) -> FormTag {
        FormTag::new(kind, n).unwrap()
    }

    fn r(i: i32, j: i32) -> Root {
        Root::new(i, j)
    }

    #[test]
    fn positions_are_an_order_isomorphism() {
        for kind in [FormType::B, FormType::C, FormType::D] {
            for n in 1..=4 {
                let t = tag(kind, n);
                let mut labels: Vec<i32> = (-(n as i32)..=n as i32).collect();
                if kind != FormType::B {
                    labels.retain(|&l| l != 0);
                }
                let mut pos: Vec<usize> = labels.iter().map(|&l| position(t, l).unwrap()).collect();
                pos.sort();
                assert_eq!(pos, (1..=t.m()).collect::<Vec<_>>());
                for p in 1..=t.m() {
                    assert_eq!(position(t, label_at(t, p)).unwrap(), p);
                }
            }
        }
        assert_eq!(position(tag(FormType::B, 2), 0).unwrap(), 3);
        assert_eq!(position(tag(FormType::B, 2), -2).unwrap(), 4);
        assert!(position(tag(FormType::C, 2), 0).is_err());
    }

    #[test]
    fn positive_root_examples() {
        assert_eq!(positive_roots(tag(FormType::D, 2)), vec![r(1, 2), r(1, -2)]);
        assert_eq!(
            positive_roots(tag(FormType::C, 2)),
            vec![r(1, 2), r(1, -2), r(1, -1), r(2, -2)]
        );
        assert_eq!(
            positive_roots(tag(FormType::B, 2)),
            vec![r(1, 2), r(1, 0), r(1, -2), r(2, 0)]
        );
    }

    #[test]
    fn root_counts() {
        for n in 1..=5 {
            assert_eq!(positive_roots(tag(FormType::B, n)).len(), n * n);
            assert_eq!(positive_roots(tag(FormType::C, n)).len(), n * n);
            assert_eq!(positive_roots(tag(FormType::D, n)).len(), n * n - n);
        }
    }

    #[test]
    fn mirror_examples() {
        assert_eq!(r(1, -1).mirror(), r(1, -1));
        assert_eq!(sign_eps(tag(FormType::C, 1), r(1, -1)).unwrap(), Pairing::SelfPaired);
        assert_eq!(r(1, 2).mirror(), r(-2, -1));
        assert!(sign_eps(tag(FormType::D, 2), r(2, 1)).is_err());
        for kind in [FormType::B, FormType::D] {
            for a in positive_roots(tag(kind, 3)) {
                assert_eq!(sign_eps(tag(kind, 3), a).unwrap(), Pairing::Signed(-1));
            }
        }
    }

    #[test]
    fn basis_vectors_are_skew_under_dagger() {
        let f = PrimeField::new(5).unwrap();
        for kind in [FormType::B, FormType::C, FormType::D] {
            for n in 1..=4 {
                let t = tag(kind, n);
                let sys = RootSystem::new(t);
                for k in 0..sys.len() {
                    let (r0, c0) = sys.cell(k);
                    let mut e = Mat::unit(f, t.m(), r0, c0);
                    if let Pairing::Signed(s) = sys.pairing(k) {
                        let (r1, c1) = sys.mirror_cell(k);
                        e.set(r1, c1, f.reduce(s as i64));
                    }
                    assert_eq!(e.dagger(t), e.neg(), "{t} {}", sys.root(k));
                }
            }
        }
    }

    #[test]
    fn mirror_cells_lie_outside_root_cells_and_are_injective() {
        for kind in [FormType::B, FormType::C, FormType::D] {
            for n in 1..=4 {
                let sys = RootSystem::new(tag(kind, n));
                let root_cells: Vec<_> = (0..sys.len()).map(|k| sys.cell(k)).collect();
                let mut mirrors = Vec::new();
                for k in 0..sys.len() {
                    if sys.pairing(k) == Pairing::SelfPaired {
                        continue;
                    }
                    let mc = sys.mirror_cell(k);
                    assert!(!root_cells.contains(&mc));
                    assert!(mc.0 < mc.1, "mirror cell stays strictly upper");
                    assert!(!mirrors.contains(&mc));
                    mirrors.push(mc);
                }
            }
        }
    }

    #[test]
    fn quasibasic_examples() {
        assert_eq!(
            enumerate_quasibasic(tag(FormType::D, 2)),
            vec![vec![], vec![r(1, 2)], vec![r(1, -2)], vec![r(1, 2), r(1, -2)]]
        );
        assert_eq!(
            enumerate_quasibasic(tag(FormType::C, 1)),
            vec![vec![], vec![r(1, -1)]]
        );
        let f3 = PrimeField::new(3).unwrap();
        assert_eq!(enumerate_placements(tag(FormType::D, 2), f3).len(), 9);
        assert_eq!(count_superclasses(tag(FormType::D, 2), 3), 9);
        assert_eq!(count_superclasses(tag(FormType::C, 1), 5), 5);
    }

    #[test]
    fn b_row_exception_only_for_the_n_pair() {
        let sys = RootSystem::new(tag(FormType::B, 3));
        assert!(sys.is_quasibasic(sys.mask_of(&[r(1, 3), r(1, -3)]).unwrap()));
        assert!(!sys.is_quasibasic(sys.mask_of(&[r(1, 3), r(1, 0)]).unwrap()));
        assert!(!sys.is_quasibasic(sys.mask_of(&[r(1, 0), r(1, -3)]).unwrap()));
        assert!(!sys.is_quasibasic(sys.mask_of(&[r(1, 2), r(1, -2)]).unwrap()));
        assert!(!sys.is_quasibasic(sys.mask_of(&[r(1, 0), r(2, 0)]).unwrap()));
        assert!(!sys.is_basic(sys.mask_of(&[r(1, 3), r(1, -3)]).unwrap()));
    }

    #[test]
    fn mirror_cells_take_part_in_the_rook_condition() {
        // rows 1, 2 and columns -2, 0 are distinct, but the mirror (2,-1) of (1,-2)
        // shares row 2 with (2,0)
        let sys = RootSystem::new(tag(FormType::B, 2));
        assert!(!sys.is_quasibasic(sys.mask_of(&[r(1, -2), r(2, 0)]).unwrap()));
        assert!(sys.is_quasibasic(sys.mask_of(&[r(1, 2), r(2, 0)]).unwrap()));
        assert_eq!(count_superclasses(tag(FormType::B, 2), 3), 17);
        assert_eq!(count_superclasses(tag(FormType::C, 3), 3), 123);
    }

    #[test]
    fn quasibasic_contains_basic_and_equals_it_for_c() {
        for kind in [FormType::B, FormType::C, FormType::D] {
            for n in 1..=3 {
                let sys = RootSystem::new(tag(kind, n));
                let all = 1u64 << sys.len();
                for mask in 0..all {
                    if sys.is_basic(mask) {
                        assert!(sys.is_quasibasic(mask));
                    }
                    if kind == FormType::C {
                        assert_eq!(sys.is_basic(mask), sys.is_quasibasic(mask));
                    }
                }
                let brute = (0..all).filter(|&m| sys.is_quasibasic(m)).count();
                assert_eq!(brute, sys.quasibasic_masks().len());
            }
        }
    }

    #[test]
    fn placement_count_matches_closed_form() {
        for p in [3, 5] {
            let f = PrimeField::new(p).unwrap();
            for kind in [FormType::B, FormType::C, FormType::D] {
                for n in 1..=3 {
                    let t = tag(kind, n);
                    let placements = enumerate_placements(t, f);
                    assert_eq!(placements.len() as u128, count_superclasses(t, p));
                    let sys = RootSystem::new(t);
                    for pl in &placements {
                        pl.validate(&sys, f).unwrap();
                    }
                }
            }
        }
    }

    #[test]
    fn placement_json() {
        let pl = RookPlacement {
            roots: vec![r(1, 2), r(1, -2)],
            phi: vec![1, 2],
        };
        assert_eq!(
            serde_json::to_string(&pl).unwrap(),
            r#"{"D":[[1,2],[1,-2]],"phi":[1,2]}"#
        );
    }
}
