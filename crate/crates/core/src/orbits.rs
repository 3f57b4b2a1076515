//! Orbits of `𝒢` on `𝔲`, `𝔲*` and (through the Springer map) on `U`; canonical rook
//! forms; rank and minor invariants.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::Serialize;

use crate::algebra::{DualElement, GroupElement, LieElement, LinearMap, MatrixSubgroup, Sylow};
use crate::error::{domain, Error, Result};
use crate::field::FieldScalar;
use crate::matrix::{FormType, Mat};
use crate::par;
use crate::roots::{enumerate_placements, position, Root, RookPlacement};

/// Which space an orbit lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Side {
    Lie,
    Dual,
    Group,
}

/// One orbit with all its members. `canonical` is the rook form when the orbit holds
/// exactly one rook-form member, and `representative` is then that member; otherwise it
/// is the first rook-form member, or the smallest index if there is none.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitRecord {
    pub canonical: Option<RookPlacement>,
    pub size: usize,
    pub rook_members: usize,
    #[serde(skip)]
    pub representative: usize,
    #[serde(skip)]
    pub members: Vec<usize>,
}

/// A partition of one of the spaces into `𝒢`-orbits, ordered by canonical placement.
#[derive(Clone, Debug)]
pub struct OrbitPartition {
    pub side: Side,
    /// `labels[i]` is the position in `orbits` of the orbit of element `i`.
    pub labels: Vec<u32>,
    pub orbits: Vec<OrbitRecord>,
}

impl OrbitPartition {
    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }

    pub fn orbit_of(&self, index: usize) -> &OrbitRecord {
        &self.orbits[self.labels[index] as usize]
    }

    /// Orbits without exactly one rook-form member.
    pub fn violations(&self) -> impl Iterator<Item = &OrbitRecord> {
        self.orbits.iter().filter(|o| o.canonical.is_none())
    }

    pub fn is_canonical(&self) -> bool {
        self.violations().next().is_none()
    }
}

impl OrbitRecord {
    fn build(members: Vec<usize>, rooks: Vec<(usize, RookPlacement)>) -> Self {
        let rook_members = rooks.len();
        let (representative, canonical) = match rooks.into_iter().next() {
            Some((i, pl)) if rook_members == 1 => (i, Some(pl)),
            Some((i, _)) => (i, None),
            None => (*members.iter().min().expect("orbits are non-empty"), None),
        };
        Self {
            canonical,
            size: members.len(),
            rook_members,
            representative,
            members,
        }
    }

    /// The rook form, or a theorem-violation error naming the orbit.
    pub fn require_canonical(&self, sylow: &Sylow) -> Result<&RookPlacement> {
        self.canonical.as_ref().ok_or_else(|| {
            Error::TheoremViolation(format!(
                "orbit of size {} for {} over F_{} has {} rook-form members",
                self.size,
                sylow.tag(),
                sylow.p(),
                self.rook_members
            ))
        })
    }
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let up = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = up;
            x = up;
        }
        x
    }

    /// Keeps the smaller index as root so the result is independent of union order.
    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
        }
    }
}

const CHUNK: usize = 1 << 14;

/// Connected components of the graph `i → next(i)[k]`.
pub(crate) fn components<F>(size: usize, next: F) -> Vec<u32>
where
    F: Fn(usize) -> Vec<u32> + Sync + Send,
{
    let mut uf = UnionFind::new(size);
    let mut start = 0;
    while start < size {
        let len = CHUNK.min(size - start);
        let images = par::map_range(len, |j| next(start + j));
        for (j, targets) in images.into_iter().enumerate() {
            for t in targets {
                uf.union((start + j) as u32, t);
            }
        }
        start += len;
    }
    (0..size as u32).map(|i| uf.find(i)).collect()
}

/// Index → canonical placement position lookup, and the set of quasibasic masks.
struct RookIndex {
    quasibasic: HashSet<u64>,
    order: HashMap<RookPlacement, usize>,
}

impl RookIndex {
    fn new(sylow: &Sylow) -> Self {
        let quasibasic = sylow.roots().quasibasic_masks().into_iter().collect();
        let order = enumerate_placements(sylow.tag(), sylow.field())
            .into_iter()
            .enumerate()
            .map(|(k, pl)| (pl, k))
            .collect();
        Self { quasibasic, order }
    }

    fn rook_form(&self, sylow: &Sylow, coords: &[u32]) -> Option<RookPlacement> {
        let mask = coords
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .fold(0u64, |m, (k, _)| m | 1 << k);
        if !self.quasibasic.contains(&mask) {
            return None;
        }
        Some(placement_from_coords(sylow, coords))
    }
}

/// The placement read off a coordinate vector (support and values).
pub fn placement_from_coords(sylow: &Sylow, coords: &[u32]) -> RookPlacement {
    let mut roots = Vec::new();
    let mut phi = Vec::new();
    for (k, &c) in coords.iter().enumerate() {
        if c != 0 {
            roots.push(sylow.roots().root(k));
            phi.push(c);
        }
    }
    RookPlacement { roots, phi }
}

/// Coordinates of `x_{D,φ}` (equivalently of `λ_{D,φ}`).
pub fn placement_coords(sylow: &Sylow, placement: &RookPlacement) -> Result<Vec<u32>> {
    placement.validate(sylow.roots(), sylow.field())?;
    let mut coords = vec![0; sylow.dim()];
    for (r, &v) in placement.roots.iter().zip(&placement.phi) {
        let k = sylow.roots().index_of(*r).expect("validated");
        coords[k] = v;
    }
    Ok(coords)
}

/// `x_{D,φ} = Σ φ(α)𝓔_α`.
pub fn rook_lie(sylow: &Sylow, placement: &RookPlacement) -> Result<LieElement> {
    Ok(sylow.lie_from_coords(&placement_coords(sylow, placement)?))
}

/// `λ_{D,φ} = Σ φ(α)(E*_α + ε(α)E*_{α'})`.
pub fn rook_dual(sylow: &Sylow, placement: &RookPlacement) -> Result<DualElement> {
    sylow.dual(placement_coords(sylow, placement)?)
}

/// Coordinate tables of the `𝒢`-generators on one side.
pub fn generator_tables(sylow: &Sylow, side: Side) -> Vec<LinearMap> {
    let g = MatrixSubgroup::g_script(sylow);
    let tables: Vec<LinearMap> = par::map_slice(g.generators(), |m| match side {
        Side::Lie | Side::Group => sylow.lie_action_table(m),
        Side::Dual => sylow.dual_action_table(m),
    });
    tables.into_iter().filter(|t| !t.is_identity()).collect()
}

fn assemble(sylow: &Sylow, side: Side, roots: Vec<u32>, coords_of: impl Fn(usize) -> Vec<u32>) -> OrbitPartition {
    let index = RookIndex::new(sylow);
    let mut by_root: HashMap<u32, Vec<usize>> = HashMap::new();
    for (i, &r) in roots.iter().enumerate() {
        by_root.entry(r).or_default().push(i);
    }
    let mut orbits: Vec<OrbitRecord> = by_root
        .into_values()
        .map(|members| {
            let rooks = members
                .iter()
                .filter_map(|&i| index.rook_form(sylow, &coords_of(i)).map(|pl| (i, pl)))
                .collect();
            OrbitRecord::build(members, rooks)
        })
        .collect();
    // canonical orbits first in placement order, the rest by smallest member
    orbits.sort_by_key(|o| match &o.canonical {
        Some(pl) => (0, index.order[pl]),
        None => (1, o.representative),
    });
    let mut labels = vec![0u32; roots.len()];
    for (k, o) in orbits.iter().enumerate() {
        for &i in &o.members {
            labels[i] = k as u32;
        }
    }
    OrbitPartition { side, labels, orbits }
}

/// Partition of `𝔲` (`Side::Lie`) or `𝔲*` (`Side::Dual`) into `𝒢`-orbits. Orbits
/// without a unique rook-form member are kept and reported by
/// [`OrbitPartition::violations`].
pub fn partition(sylow: &Sylow, side: Side, budget: u128) -> Result<OrbitPartition> {
    if side == Side::Group {
        return group_partition(sylow, budget);
    }
    let size = sylow.check_budget(budget)?;
    let tables = generator_tables(sylow, side);
    let roots = components(size, |i| {
        let c = sylow.coords_from_index(i);
        tables
            .iter()
            .map(|t| sylow.index_of_coords(&t.apply(&c)) as u32)
            .collect()
    });
    Ok(assemble(sylow, side, roots, |i| sylow.coords_from_index(i)))
}

/// Superclasses of `U`: orbits of `u ↦ f⁻¹(g·f(u)·g†)`, computed with matrices on the
/// group side. Element `i` is `f⁻¹` of the `i`-th element of `𝔲`.
pub fn group_partition(sylow: &Sylow, budget: u128) -> Result<OrbitPartition> {
    let size = sylow.check_budget(budget)?;
    let gens: Vec<(Mat, Mat)> = MatrixSubgroup::g_script(sylow)
        .generators()
        .iter()
        .map(|g| (g.clone(), sylow.dagger(g)))
        .collect();
    let elements = sylow.enumerate_group(budget)?;
    let roots = components(size, |i| {
        let y = sylow.springer(&elements[i]);
        gens.iter()
            .map(|(g, gd)| {
                let moved = sylow.springer_inv(&g.mul(&y).mul(gd));
                sylow.group_index(&moved) as u32
            })
            .collect()
    });
    Ok(assemble(sylow, Side::Group, roots, |i| {
        sylow.lie_coords(&sylow.springer(&elements[i]))
    }))
}

/// Breadth-first orbit of a single coordinate vector under the generator tables.
pub fn orbit_bfs(tables: &[LinearMap], start: &[u32]) -> Vec<Vec<u32>> {
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.to_vec());
    queue.push_back(start.to_vec());
    let mut out = vec![start.to_vec()];
    while let Some(v) = queue.pop_front() {
        for t in tables {
            let w = t.apply(&v);
            if seen.insert(w.clone()) {
                out.push(w.clone());
                queue.push_back(w);
            }
        }
    }
    out.sort_by_key(|c| c.iter().rev().copied().collect::<Vec<_>>());
    out
}

fn record_from_bfs(sylow: &Sylow, members: Vec<Vec<u32>>) -> OrbitRecord {
    let index = RookIndex::new(sylow);
    let rooks = members
        .iter()
        .filter_map(|c| index.rook_form(sylow, c).map(|pl| (sylow.index_of_coords(c), pl)))
        .collect();
    OrbitRecord::build(members.iter().map(|c| sylow.index_of_coords(c)).collect(), rooks)
}

/// Orbit of `x` under `x ↦ g x g†`, `g ∈ 𝒢`.
pub fn orbit_lie(sylow: &Sylow, x: &LieElement) -> OrbitRecord {
    let tables = generator_tables(sylow, Side::Lie);
    record_from_bfs(sylow, orbit_bfs(&tables, &sylow.lie_coords(x.mat())))
}

/// Orbit of `λ` under `λ ↦ g★λ`, `g ∈ 𝒢`.
pub fn orbit_dual(sylow: &Sylow, lambda: &DualElement) -> OrbitRecord {
    let tables = generator_tables(sylow, Side::Dual);
    record_from_bfs(sylow, orbit_bfs(&tables, lambda.coeffs()))
}

/// The unique `(D, φ)` with `x_{D,φ}` in the orbit of `x`.
pub fn canonical_lie(sylow: &Sylow, x: &LieElement) -> Result<RookPlacement> {
    orbit_lie(sylow, x).require_canonical(sylow).cloned()
}

/// The unique `(D, φ)` with `λ_{D,φ}` in the orbit of `λ`.
pub fn canonical_dual(sylow: &Sylow, lambda: &DualElement) -> Result<RookPlacement> {
    orbit_dual(sylow, lambda).require_canonical(sylow).cloned()
}

/// `K(u) = f⁻¹(orbit of f(u))`.
pub fn superclass(sylow: &Sylow, u: &GroupElement) -> Vec<GroupElement> {
    let record = orbit_lie(sylow, &sylow.to_lie(u));
    record
        .members
        .iter()
        .map(|&i| sylow.to_group(&sylow.lie_from_coords(&sylow.coords_from_index(i))))
        .collect()
}

// ---- invariants ----

/// 0-based matrix position of an index label.
fn pos(sylow: &Sylow, label: i32) -> usize {
    position(sylow.tag(), label).expect("label in range") - 1
}

/// For every positive root `(i, j)`, the rank of the window of rows and columns
/// `{k : i ≼ k ≼ j}`.
pub fn rank_profile(sylow: &Sylow, x: &LieElement) -> Vec<usize> {
    sylow
        .roots()
        .roots()
        .iter()
        .map(|r| {
            let window: Vec<usize> = (pos(sylow, r.row)..=pos(sylow, r.col)).collect();
            let rows = x.mat().submatrix(&window, &window);
            crate::matrix::rank_of_rows(sylow.field(), rows, window.len())
        })
        .collect()
}

/// Roots `(k, m)` of `d` with `k ≽ i` and `m ≼ j`.
pub fn nested_roots(sylow: &Sylow, d: &[Root], alpha: Root) -> Vec<Root> {
    d.iter()
        .copied()
        .filter(|r| pos(sylow, r.row) >= pos(sylow, alpha.row) && pos(sylow, r.col) <= pos(sylow, alpha.col))
        .collect()
}

/// Minor of `x` on the rows and columns occupied by `roots` (positions sorted).
pub fn minor_on(sylow: &Sylow, x: &LieElement, roots: &[Root]) -> Result<FieldScalar> {
    let mut rows: Vec<usize> = roots.iter().map(|r| pos(sylow, r.row)).collect();
    let mut cols: Vec<usize> = roots.iter().map(|r| pos(sylow, r.col)).collect();
    rows.sort_unstable();
    rows.dedup();
    cols.sort_unstable();
    cols.dedup();
    if rows.len() != cols.len() {
        return domain("root selection does not give a square minor");
    }
    x.mat().minor(&rows, &cols)
}

/// `D` with `(i,-n)` removed wherever `(i,n), (i,-n)` are both present.
pub fn without_pair_partners(sylow: &Sylow, d: &[Root]) -> Vec<Root> {
    let n = sylow.tag().n as i32;
    d.iter()
        .copied()
        .filter(|r| !(sylow.tag().kind != FormType::C && r.col == -n && d.contains(&Root::new(r.row, n))))
        .collect()
}

/// `M_α(x)` for `α = (i, j)`: the minor of `x` on the rows and columns occupied by the
/// matrix `x_{D,φ}` inside the region `rows ≽ i`, `columns ≼ j`. Both the root cells and
/// their mirror cells count, and a pair partner `(i,-n)` is left out.
pub fn nested_minor(sylow: &Sylow, x: &LieElement, alpha: Root, d: &[Root]) -> Result<FieldScalar> {
    let d = without_pair_partners(sylow, d);
    if !d.contains(&alpha) {
        return domain(format!("{alpha} is not in the chosen root set"));
    }
    let (lo, hi) = (pos(sylow, alpha.row), pos(sylow, alpha.col));
    let roots = sylow.roots();
    let mut rows = Vec::new();
    let mut cols = Vec::new();
    for r in &d {
        let k = roots.index_of(*r).ok_or_else(|| Error::Domain(format!("{r} is not a positive root")))?;
        for (a, b) in [roots.cell(k), roots.mirror_cell(k)] {
            if a >= lo && b <= hi {
                rows.push(a);
                cols.push(b);
            }
        }
    }
    rows.sort_unstable();
    rows.dedup();
    cols.sort_unstable();
    cols.dedup();
    if rows.len() != cols.len() {
        return domain("root selection does not give a square minor");
    }
    x.mat().minor(&rows, &cols)
}

/// The three root systems `D̃_{β₁}, D̃_{β₀}, D̃_{β₂}` for `β₁ = (i, n)` in type `B`.
pub fn bn_minor_systems(sylow: &Sylow, d: &[Root], i: i32) -> Result<[Vec<Root>; 3]> {
    let n = sylow.tag().n as i32;
    if sylow.tag().kind != FormType::B {
        return domain("the quadratic minor invariant is defined for type B only");
    }
    if !(1..n).contains(&i) {
        return domain(format!("row {i} has no root (i, n) in B{n}"));
    }
    let beta1 = Root::new(i, n);
    let beta0 = Root::new(i, 0);
    let beta2 = Root::new(i, -n);
    let without_b2: Vec<Root> = d.iter().copied().filter(|&r| r != beta2).collect();
    let d_b1 = nested_roots(sylow, &without_b2, beta1);
    let k0 = d.iter().find(|r| r.col == 0 && r.row > i).map(|r| r.row);
    let tilde_b1 = match k0 {
        None => d_b1.clone(),
        Some(k) => [d_b1.clone(), vec![Root::new(k, 0)]].concat(),
    };
    let tilde_b0 = match k0 {
        None => {
            let mut v: Vec<Root> = d_b1.iter().copied().filter(|&r| r != beta1).collect();
            v.push(beta0);
            v
        }
        Some(k) => [d_b1.clone(), vec![Root::new(k, -n)]].concat(),
    };
    let tilde_b2: Vec<Root> = nested_roots(sylow, d, beta2)
        .into_iter()
        .filter(|&r| r != beta1)
        .collect();
    Ok([tilde_b1, tilde_b0, tilde_b2])
}

/// `I = M̃_{β₁}M̃_{β₂} + ½M̃_{β₀}²` for `β₁ = (i, n)`, built from the root set `d`.
pub fn bn_invariant(sylow: &Sylow, x: &LieElement, d: &[Root], i: i32) -> Result<FieldScalar> {
    let [b1, b0, b2] = bn_minor_systems(sylow, d, i)?;
    let m1 = minor_on(sylow, x, &b1)?;
    let m0 = minor_on(sylow, x, &b0)?;
    let m2 = minor_on(sylow, x, &b2)?;
    let half = sylow.field().scalar(sylow.field().half() as i64);
    Ok(m1 * m2 + half * m0 * m0)
}
