//! Supercharacters: the extension `η` of a rook functional, its kernel subalgebras, the
//! subgroups `U_λ` and `H_λ`, the linear character `ξ_λ`, induced characters, the
//! orbit-sum formula and a full verification of the resulting theory.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::time::Instant;

use serde::Serialize;

use crate::algebra::span::{kernel, vec_to_mat};
use crate::algebra::subgroups::{algebra_group_generators, g_diamond_algebra, h_diamond_algebra};
use crate::algebra::{DualElement, LinearMap, LinearSubspace, MatrixSubgroup, Sylow};
use crate::error::{domain, Error, Result};
use crate::field::{eps, CycValue};
use crate::matrix::{FormType, Mat};
use crate::orbits::{self, placement_coords, OrbitPartition, Side};
use crate::par;
use crate::roots::{enumerate_placements, Root, RookPlacement};

/// A linear form `η(x) = Σ w_{ab} x_{ab}` on `m×m` matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaFunctional {
    weights: Mat,
}

impl EtaFunctional {
    pub fn weights(&self) -> &Mat {
        &self.weights
    }

    pub fn eval(&self, x: &Mat) -> u32 {
        let f = self.weights.field();
        let p = f.p() as u64;
        let acc: u64 = self
            .weights
            .as_bytes()
            .iter()
            .zip(x.as_bytes())
            .map(|(&w, &v)| w as u64 * v as u64)
            .sum();
        (acc % p) as u32
    }
}

/// The extension of `λ_{D,φ}` with `η† = -η`: weight `φ(α)` at `α` and `ε(α)φ(α)` at `α'`.
pub fn build_eta(sylow: &Sylow, lambda: &DualElement) -> Result<EtaFunctional> {
    let placement = orbits::placement_from_coords(sylow, lambda.coeffs());
    placement.validate(sylow.roots(), sylow.field())?;
    Ok(EtaFunctional {
        weights: sylow.functional_matrix(lambda.coeffs()),
    })
}

/// `r^◊_η`, `ℓ^◊_η` and `𝔤^◊_η = r^◊_η ∩ ℓ^◊_η`, all inside `𝔤^◊ ⊂ F_p^{m²}`.
#[derive(Clone, Debug)]
pub struct KernelSubalgebras {
    pub right: LinearSubspace,
    pub left: LinearSubspace,
    pub both: LinearSubspace,
}

pub fn kernel_subalgebras(sylow: &Sylow, eta: &EtaFunctional) -> KernelSubalgebras {
    let f = sylow.field();
    let m = sylow.m();
    let g = g_diamond_algebra(sylow.tag(), f);
    let g_mats = g.basis_matrices(m);
    let h_mats = h_diamond_algebra(sylow.tag(), f).basis_matrices(m);
    let solve = |value: &dyn Fn(&Mat, &Mat) -> u32| {
        let rows: Vec<Vec<u32>> = h_mats
            .iter()
            .map(|h| g_mats.iter().map(|b| value(b, h)).collect())
            .collect();
        let coeffs = kernel(f, &rows, g_mats.len());
        LinearSubspace::span(
            f,
            m * m,
            coeffs.basis().iter().map(|c| combine(f, m, &g_mats, c)),
        )
    };
    let right = solve(&|x, y| eta.eval(&x.mul(y)));
    let left = solve(&|x, y| eta.eval(&sylow.dagger(y).mul(x)));
    let both = right.intersect(&left);
    KernelSubalgebras { right, left, both }
}

fn combine(f: crate::field::PrimeField, m: usize, mats: &[Mat], coeffs: &[u32]) -> Vec<u32> {
    let mut out = vec![0u32; m * m];
    for (x, &c) in mats.iter().zip(coeffs) {
        if c != 0 {
            for (o, &v) in out.iter_mut().zip(x.as_bytes()) {
                *o = f.add(*o, f.mul(c, v as u32));
            }
        }
    }
    out
}

/// How an element `h` moves a functional when computing `H_λ·λ`.
///
/// `Transposed` is the one whose orbits are the fibres of the restriction to `𝔲_λ`;
/// `Twisted` is kept for comparison.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum HAction {
    /// `(h·λ)(x) = λ(h† x h)`.
    #[default]
    Transposed,
    /// `(h·λ)(x) = λ(h x h†)`, the action used for `𝒢`.
    Twisted,
}

/// Everything attached to one rook functional `λ = λ_{D,φ}`.
#[derive(Clone, Debug)]
pub struct LambdaContext {
    pub placement: RookPlacement,
    pub lambda: DualElement,
    pub eta: EtaFunctional,
    pub kernels: KernelSubalgebras,
    /// Whether the factor `S` joins `U_λ` and `H_λ` (see [`splits_off_s`]).
    pub with_s: bool,
    /// `𝔲_λ` in root coordinates.
    pub u_lambda: LinearSubspace,
    /// `𝔤^◊_η + 𝔥^◊`; `H_λ = S^{with_s}·(1 + h_lambda)`.
    pub h_lambda: LinearSubspace,
}

/// Type `B` and `D` holds no root `(i,0)` with `i < n` and no root `(i,-n)`. These are
/// exactly the placements whose `η` vanishes on `𝔰𝔤` and `𝔤𝔰`.
pub fn splits_off_s(sylow: &Sylow, placement: &RookPlacement) -> bool {
    let n = sylow.tag().n as i32;
    sylow.tag().kind == FormType::B
        && placement
            .roots
            .iter()
            .all(|r| !(r.col == 0 && r.row < n) && r.col != -n)
}

/// The matrix `𝓔_{(n,0)}` spanning `𝔰` (type `B`).
fn s_direction(sylow: &Sylow) -> Option<Mat> {
    if sylow.tag().kind != FormType::B {
        return None;
    }
    let n = sylow.tag().n as i32;
    let k = sylow.roots().index_of(Root::new(n, 0))?;
    Some(sylow.basis_matrix(k).clone())
}

pub fn build_context(sylow: &Sylow, placement: &RookPlacement) -> Result<LambdaContext> {
    let ctx = assemble_context(sylow, placement)?;
    let problems = ctx.audit(sylow);
    if problems.is_empty() {
        Ok(ctx)
    } else {
        Err(Error::TheoremViolation(format!(
            "context of {placement}: {}",
            problems.join("; ")
        )))
    }
}

pub fn assemble_context(sylow: &Sylow, placement: &RookPlacement) -> Result<LambdaContext> {
    let f = sylow.field();
    let m = sylow.m();
    let lambda = sylow.dual(placement_coords(sylow, placement)?)?;
    let eta = build_eta(sylow, &lambda)?;
    let kernels = kernel_subalgebras(sylow, &eta);
    let with_s = splits_off_s(sylow, placement);
    let u_space = LinearSubspace::span_matrices(f, m, sylow.lie_basis().iter().map(|x| x.mat()));
    let mut u_lambda = LinearSubspace::span(
        f,
        sylow.dim(),
        kernels
            .both
            .intersect(&u_space)
            .basis_matrices(m)
            .iter()
            .map(|x| sylow.lie_coords(x)),
    );
    if with_s {
        let s = s_direction(sylow).expect("type B");
        u_lambda.insert(sylow.lie_coords(&s));
    }
    let h_lambda = kernels.both.sum(&h_diamond_algebra(sylow.tag(), f));
    Ok(LambdaContext {
        placement: placement.clone(),
        lambda,
        eta,
        kernels,
        with_s,
        u_lambda,
        h_lambda,
    })
}

impl LambdaContext {
    /// Checks the structural statements the construction rests on; returns the failures.
    pub fn audit(&self, sylow: &Sylow) -> Vec<String> {
        let f = sylow.field();
        let m = sylow.m();
        let mut bad = Vec::new();
        let mut expect = |ok: bool, what: &str| {
            if !ok {
                bad.push(what.to_string());
            }
        };
        let g = g_diamond_algebra(sylow.tag(), f);
        let g_mats = g.basis_matrices(m);
        expect(
            g_mats
                .iter()
                .all(|x| self.eta.eval(&sylow.dagger(x)) == f.neg(self.eta.eval(x))),
            "eta is not antisymmetric under dagger",
        );
        expect(
            sylow
                .lie_basis()
                .iter()
                .all(|x| sylow.pair(&self.lambda, x).value() == self.eta.eval(x.mat())),
            "eta does not restrict to lambda",
        );
        let dagger_space = |s: &LinearSubspace| {
            LinearSubspace::span_matrices(f, m, s.basis_matrices(m).iter().map(|x| sylow.dagger(x)).collect::<Vec<_>>().iter())
        };
        let k = &self.kernels;
        expect(dagger_space(&k.right) == k.left, "dagger does not swap r and l");
        expect(dagger_space(&k.both) == k.both, "g_eta is not dagger-stable");
        expect(k.right.is_closed_under_product(m), "r is not closed under the product");
        expect(k.left.is_closed_under_product(m), "l is not closed under the product");
        expect(k.both.is_closed_under_product(m), "g_eta is not closed under the product");
        let both = k.both.basis_matrices(m);
        expect(
            both.iter().all(|x| both.iter().all(|y| self.eta.eval(&x.mul(y)) == 0)),
            "eta(xy) is nonzero on g_eta",
        );
        let u_space = LinearSubspace::span_matrices(f, m, sylow.lie_basis().iter().map(|x| x.mat()));
        let ur = k.right.intersect(&u_space);
        let ul = k.left.intersect(&u_space);
        expect(ur == ul && ul == k.both.intersect(&u_space), "u ∩ r, u ∩ l and u ∩ g_eta differ");
        if let Some(s) = s_direction(sylow) {
            if self.with_s {
                expect(
                    both.iter()
                        .all(|x| k.both.contains_matrix(&s.mul(x)) && k.both.contains_matrix(&x.mul(&s))),
                    "s does not normalise g_eta",
                );
                let all_cells = LinearSubspace::full(f, m * m).basis_matrices(m);
                expect(
                    all_cells
                        .iter()
                        .filter(|x| x.is_strictly_upper())
                        .all(|x| self.eta.eval(&s.mul(x)) == 0 && self.eta.eval(&x.mul(&s)) == 0),
                    "eta does not vanish on s·g and g·s",
                );
            }
        }
        expect(self.h_lambda.is_closed_under_product(m), "h_lambda is not an algebra");
        bad
    }

    /// `log_p |U_λ|`.
    pub fn u_lambda_dim(&self) -> usize {
        self.u_lambda.dim()
    }

    /// Membership of a group matrix in `U_λ = S^{with_s}·U^◊_λ`, tested on matrices.
    pub fn contains_group_element(&self, sylow: &Sylow, u: &Mat) -> bool {
        if !sylow.is_group(u) {
            return false;
        }
        let (c, rest) = sylow.split_s(u);
        if c != 0 && !self.with_s {
            return false;
        }
        let one = Mat::identity(sylow.field(), sylow.m());
        self.kernels.both.contains_matrix(&rest.sub(&one))
    }

    /// Generators of `H_λ`.
    pub fn h_generators(&self, sylow: &Sylow) -> Vec<Mat> {
        let mut gens = algebra_group_generators(sylow.field(), sylow.m(), &self.h_lambda);
        if self.with_s {
            gens.push(sylow.s_element(1).expect("type B"));
        }
        gens
    }

    /// Every element of `H_λ`, built as `S^{with_s}·(1 + 𝔥)` from the vector space.
    pub fn h_elements(&self, sylow: &Sylow, budget: u128) -> Result<Vec<Mat>> {
        let f = sylow.field();
        let m = sylow.m();
        let one = Mat::identity(f, m);
        let core: Vec<Mat> = self
            .h_lambda
            .enumerate(budget)?
            .iter()
            .map(|v| one.add(&vec_to_mat(f, m, v)))
            .collect();
        if !self.with_s {
            return Ok(core);
        }
        let size = core.len() as u128 * f.p() as u128;
        if size > budget {
            return Err(Error::Budget {
                what: "elements of H_lambda".into(),
                required: size,
                budget,
            });
        }
        let mut out = Vec::with_capacity(size as usize);
        for c in f.elements() {
            let s = sylow.s_element(c)?;
            out.extend(core.iter().map(|h| s.mul(h)));
        }
        Ok(out)
    }

    /// `H_λ·λ`, by breadth-first search over the generator tables.
    pub fn h_orbit(&self, sylow: &Sylow, action: HAction) -> Vec<Vec<u32>> {
        let tables: Vec<LinearMap> = self
            .h_generators(sylow)
            .iter()
            .map(|h| match action {
                HAction::Twisted => sylow.dual_action_table(h),
                HAction::Transposed => sylow.dual_action_table(&sylow.dagger(h)),
            })
            .collect();
        orbits::orbit_bfs(&tables, self.lambda.coeffs())
    }

    /// `{μ ∈ 𝔲* : μ = λ on 𝔲_λ}`, by scanning all of `𝔲*`.
    pub fn fiber(&self, sylow: &Sylow, budget: u128) -> Result<Vec<Vec<u32>>> {
        let size = sylow.check_budget(budget)?;
        let basis = self.u_lambda.basis();
        let target: Vec<u32> = basis
            .iter()
            .map(|b| sylow.pair_coords(self.lambda.coeffs(), b))
            .collect();
        let hits = par::map_range(size, |i| {
            let mu = sylow.coords_from_index(i);
            basis
                .iter()
                .zip(&target)
                .all(|(b, &t)| sylow.pair_coords(&mu, b) == t)
                .then_some(mu)
        });
        Ok(hits.into_iter().flatten().collect())
    }
}

// ---- characters ----

/// Conjugacy classes of `U`, computed as `Ad(U)`-orbits on `𝔲` through the Springer map.
#[derive(Clone, Debug)]
pub struct ConjugacyClasses {
    /// `labels[i]` is the class of element `i`.
    pub labels: Vec<u32>,
    /// Members of each class, classes ordered by smallest member.
    pub members: Vec<Vec<usize>>,
}

impl ConjugacyClasses {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

pub fn conjugacy_classes(sylow: &Sylow, budget: u128) -> Result<ConjugacyClasses> {
    let size = sylow.check_budget(budget)?;
    let tables: Vec<LinearMap> = MatrixSubgroup::u(sylow)
        .generators()
        .iter()
        .map(|g| sylow.adjoint_table(g))
        .filter(|t| !t.is_identity())
        .collect();
    let roots = orbits::components(size, |i| {
        let c = sylow.coords_from_index(i);
        tables
            .iter()
            .map(|t| sylow.index_of_coords(&t.apply(&c)) as u32)
            .collect()
    });
    // roots are minimal members, so sorting by root orders classes by smallest member
    let mut by_root: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, &r) in roots.iter().enumerate() {
        by_root.entry(r).or_default().push(i);
    }
    let members: Vec<Vec<usize>> = by_root.into_values().collect();
    let mut labels = vec![0u32; size];
    for (k, class) in members.iter().enumerate() {
        for &i in class {
            labels[i] = k as u32;
        }
    }
    Ok(ConjugacyClasses { labels, members })
}

impl LambdaContext {
    /// Indices of the elements of `U_λ = f⁻¹(𝔲_λ)`.
    pub fn u_lambda_indices(&self, sylow: &Sylow, budget: u128) -> Result<Vec<usize>> {
        Ok(self
            .u_lambda
            .enumerate(budget)?
            .iter()
            .map(|c| sylow.index_of_coords(c))
            .collect())
    }

    /// `λ(f(u))` for the element with coordinates `coords`, when it lies in `U_λ`.
    fn xi_exponent(&self, sylow: &Sylow, coords: &[u32]) -> Option<u32> {
        self.u_lambda
            .contains(coords)
            .then(|| sylow.pair_coords(self.lambda.coeffs(), coords))
    }

    /// Checks that `ξ_λ` is a homomorphism `U_λ → ⟨ζ⟩`: every `f⁻¹(t·b)`, `b` in a basis of
    /// `𝔲_λ`, must lie in `U_λ`; then from `1`, every reached element is multiplied by the
    /// `f⁻¹(b)` and exponents are compared. Returns `|U_λ|` on success.
    pub fn check_xi(&self, sylow: &Sylow) -> std::result::Result<usize, String> {
        let f = sylow.field();
        let mut gens = Vec::new();
        for b in self.u_lambda.basis() {
            for t in f.nonzero() {
                let coords: Vec<u32> = b.iter().map(|&v| f.mul(v, t)).collect();
                let g = sylow.group_from_coords(&coords);
                if !self.contains_group_element(sylow, &g) {
                    return Err(format!("f^-1 of {coords:?} is not in U_lambda"));
                }
                if t == 1 {
                    gens.push((g, sylow.pair_coords(self.lambda.coeffs(), &coords)));
                }
            }
        }
        let one = Mat::identity(f, sylow.m());
        let mut seen = HashSet::from([0usize]);
        let mut queue = vec![(one, 0u32)];
        while let Some((u, e)) = queue.pop() {
            for (g, eg) in &gens {
                let w = u.mul(g);
                let coords = sylow.lie_coords(&sylow.springer(&w));
                let Some(ew) = self.xi_exponent(sylow, &coords) else {
                    return Err(format!("a product leaves U_lambda at {coords:?}"));
                };
                if ew != f.add(e, *eg) {
                    return Err(format!("xi is not multiplicative at {coords:?}"));
                }
                if seen.insert(sylow.index_of_coords(&coords)) {
                    queue.push((w, ew));
                }
            }
        }
        let expected = (f.p() as usize).pow(self.u_lambda.dim() as u32);
        if seen.len() != expected {
            return Err(format!("generators reach {} of {expected} elements", seen.len()));
        }
        Ok(expected)
    }
}

/// `ξ_λ(u) = ε^{λ(f(u))}` for `u ∈ U_λ`.
pub fn xi(sylow: &Sylow, ctx: &LambdaContext, u: &crate::algebra::GroupElement) -> Result<CycValue> {
    if !ctx.contains_group_element(sylow, u.mat()) {
        return domain("element is not in U_lambda");
    }
    let coords = sylow.lie_coords(&sylow.springer(u.mat()));
    Ok(eps(sylow.field(), sylow.pair_coords(ctx.lambda.coeffs(), &coords)))
}

/// `χ_λ = Ind(ξ_λ)` on every conjugacy class: `χ(u) = |U|/(|U_λ||K|) Σ_{w ∈ K ∩ U_λ} ξ(w)`.
pub fn induce(sylow: &Sylow, ctx: &LambdaContext, classes: &ConjugacyClasses) -> Result<Vec<CycValue>> {
    let p = sylow.p();
    let order = sylow.space_size() as i64;
    let sub_order = (p as i64).pow(ctx.u_lambda.dim() as u32);
    let mut exponent = vec![None; classes.labels.len()];
    for i in ctx.u_lambda_indices(sylow, u128::MAX)? {
        exponent[i] = Some(sylow.pair_coords(ctx.lambda.coeffs(), &sylow.coords_from_index(i)));
    }
    classes
        .members
        .iter()
        .map(|class| {
            let mut hist = vec![0i64; p as usize];
            for &i in class {
                if let Some(e) = exponent[i] {
                    hist[e as usize] += 1;
                }
            }
            let raw = CycValue::from_exponent_counts(hist).scale(order / class.len() as i64);
            raw.div_exact(sub_order).ok_or_else(|| {
                Error::TheoremViolation(format!(
                    "induced value of {} at class of {} is not integral",
                    ctx.placement, class[0]
                ))
            })
        })
        .collect()
}

/// `(|H_λ·λ| / |𝒢·λ|) Σ_{μ ∈ 𝒢·λ} ε^{μ(x)}` at `x = f(u)` given by its coordinates.
pub fn orbit_formula(sylow: &Sylow, g_orbit: &[Vec<u32>], h_orbit_size: usize, x: &[u32]) -> Result<CycValue> {
    let mut hist = vec![0i64; sylow.p() as usize];
    for mu in g_orbit {
        hist[sylow.pair_coords(mu, x) as usize] += 1;
    }
    CycValue::from_exponent_counts(hist)
        .scale(h_orbit_size as i64)
        .div_exact(g_orbit.len() as i64)
        .ok_or_else(|| Error::TheoremViolation("orbit formula value is not integral".into()))
}

/// One supercharacter with everything computed along the way.
#[derive(Clone, Debug)]
pub struct Supercharacter {
    pub context: LambdaContext,
    pub audit: Vec<String>,
    pub xi_check: std::result::Result<usize, String>,
    /// Values on conjugacy classes, or the reason induction failed.
    pub class_values: std::result::Result<Vec<CycValue>, String>,
    pub h_orbit: Vec<Vec<u32>>,
    /// Index of `λ` in the dual partition.
    pub dual_orbit: usize,
}

impl Supercharacter {
    pub fn degree(&self) -> Option<i64> {
        let values = self.class_values.as_ref().ok()?;
        values.first()?.as_rational_integer().ok()
    }
}

/// All data of one configuration: the three orbit partitions, conjugacy classes and the
/// supercharacters of every rook functional.
#[derive(Clone, Debug)]
pub struct Theory {
    pub lie: OrbitPartition,
    pub dual: OrbitPartition,
    pub group: OrbitPartition,
    pub classes: ConjugacyClasses,
    pub characters: Vec<Supercharacter>,
    pub h_action: HAction,
    pub timings_ms: BTreeMap<String, u64>,
}

fn timed<T>(timings: &mut BTreeMap<String, u64>, name: &str, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    timings.insert(name.to_string(), start.elapsed().as_millis() as u64);
    log::debug!("{name}: {} ms", timings[name]);
    out
}

impl Theory {
    pub fn build(sylow: &Sylow, budget: u128, h_action: HAction) -> Result<Self> {
        sylow.check_budget(budget)?;
        let mut timings = BTreeMap::new();
        let lie = timed(&mut timings, "lie_orbits", || orbits::partition(sylow, Side::Lie, budget))?;
        let dual = timed(&mut timings, "dual_orbits", || orbits::partition(sylow, Side::Dual, budget))?;
        let group = timed(&mut timings, "group_orbits", || orbits::group_partition(sylow, budget))?;
        let classes = timed(&mut timings, "conjugacy_classes", || conjugacy_classes(sylow, budget))?;
        let placements = enumerate_placements(sylow.tag(), sylow.field());
        let characters = timed(&mut timings, "supercharacters", || {
            par::map_slice(&placements, |pl| build_character(sylow, pl, &dual, &classes, h_action))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            lie,
            dual,
            group,
            classes,
            characters,
            h_action,
            timings_ms: timings,
        })
    }

    /// Value of character `k` on superclass `j`, read at the superclass representative.
    pub fn value(&self, k: usize, j: usize) -> Option<&CycValue> {
        let rep = self.lie.orbits[j].representative;
        let values = self.characters[k].class_values.as_ref().ok()?;
        values.get(self.classes.labels[rep] as usize)
    }

    pub fn table(&self) -> SupercharacterTable {
        let superclasses = self
            .lie
            .orbits
            .iter()
            .map(|o| SuperclassEntry {
                placement: o.canonical.clone(),
                size: o.size,
            })
            .collect();
        let supercharacters = self
            .characters
            .iter()
            .map(|c| SupercharacterEntry {
                placement: c.context.placement.clone(),
                degree: c.degree(),
            })
            .collect();
        let values = (0..self.characters.len())
            .map(|k| (0..self.lie.len()).map(|j| self.value(k, j).cloned()).collect())
            .collect();
        SupercharacterTable {
            superclasses,
            supercharacters,
            values,
        }
    }
}

fn build_character(
    sylow: &Sylow,
    placement: &RookPlacement,
    dual: &OrbitPartition,
    classes: &ConjugacyClasses,
    h_action: HAction,
) -> Result<Supercharacter> {
    let context = assemble_context(sylow, placement)?;
    let audit = context.audit(sylow);
    let xi_check = context.check_xi(sylow);
    let class_values = induce(sylow, &context, classes).map_err(|e| e.to_string());
    let h_orbit = context.h_orbit(sylow, h_action);
    let dual_orbit = dual.labels[sylow.index_of_coords(context.lambda.coeffs())] as usize;
    Ok(Supercharacter {
        context,
        audit,
        xi_check,
        class_values,
        h_orbit,
        dual_orbit,
    })
}

// ---- serialised forms ----

#[derive(Clone, Debug, Serialize)]
pub struct SuperclassEntry {
    #[serde(flatten)]
    pub placement: Option<RookPlacement>,
    pub size: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SupercharacterEntry {
    #[serde(flatten)]
    pub placement: RookPlacement,
    pub degree: Option<i64>,
}

/// Rows are supercharacters, columns superclasses, both in placement order.
#[derive(Clone, Debug, Serialize)]
pub struct SupercharacterTable {
    pub superclasses: Vec<SuperclassEntry>,
    pub supercharacters: Vec<SupercharacterEntry>,
    pub values: Vec<Vec<Option<CycValue>>>,
}

/// Outcome of one named check.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub checked: usize,
    pub failures: usize,
    /// The first few failure messages.
    pub detail: Vec<String>,
}

const DETAIL_LIMIT: usize = 8;

struct CheckBuilder {
    check: Check,
}

impl CheckBuilder {
    fn new(name: &str) -> Self {
        Self {
            check: Check {
                name: name.to_string(),
                passed: true,
                checked: 0,
                failures: 0,
                detail: Vec::new(),
            },
        }
    }

    fn record(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.check.checked += 1;
        if !ok {
            self.check.passed = false;
            self.check.failures += 1;
            if self.check.detail.len() < DETAIL_LIMIT {
                self.check.detail.push(msg());
            }
        }
    }

    fn finish(self) -> Check {
        self.check
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Counts {
    /// `Σ_D (p-1)^{|D|}` over quasibasic `D`.
    pub formula: u128,
    pub supercharacters: usize,
    pub superclasses: usize,
    pub dual_orbits: usize,
    pub group_orbits: usize,
    pub conjugacy_classes: usize,
    pub lie_orbits_without_rook_form: usize,
    pub dual_orbits_without_rook_form: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    #[serde(rename = "type")]
    pub kind: FormType,
    pub n: usize,
    pub p: u32,
    pub springer: crate::algebra::SpringerMap,
    pub h_action: HAction,
    pub group_order: u128,
    pub counts: Counts,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, u64>>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failed_checks(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect()
    }
}

/// Options for [`verify_theory`].
#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub budget: u128,
    pub h_action: HAction,
    /// Scan all of `𝔲*` for the fibre of every `λ`.
    pub fiber: bool,
    pub timings: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            budget: crate::algebra::DEFAULT_BUDGET,
            h_action: HAction::default(),
            fiber: true,
            timings: false,
        }
    }
}

/// Builds the theory for `sylow` and checks every statement about it. Only budget and
/// input errors are returned as `Err`; mathematical failures become failed checks.
pub fn verify_theory(sylow: &Sylow, options: VerifyOptions) -> Result<VerificationReport> {
    let theory = Theory::build(sylow, options.budget, options.h_action)?;
    let mut timings = theory.timings_ms.clone();
    let checks = timed(&mut timings, "checks", || run_checks(sylow, &theory, options))?;
    let counts = Counts {
        formula: crate::roots::count_superclasses(sylow.tag(), sylow.p()),
        supercharacters: theory.characters.len(),
        superclasses: theory.lie.len(),
        dual_orbits: theory.dual.len(),
        group_orbits: theory.group.len(),
        conjugacy_classes: theory.classes.len(),
        lie_orbits_without_rook_form: theory.lie.violations().count(),
        dual_orbits_without_rook_form: theory.dual.violations().count(),
    };
    let report = VerificationReport {
        kind: sylow.tag().kind,
        n: sylow.tag().n,
        p: sylow.p(),
        springer: sylow.springer_kind(),
        h_action: options.h_action,
        group_order: sylow.space_size(),
        counts,
        checks,
        timings_ms: options.timings.then_some(timings),
    };
    for c in &report.checks {
        log::info!("{}: {} ({} checked, {} failed)", c.name, if c.passed { "ok" } else { "FAILED" }, c.checked, c.failures);
    }
    Ok(report)
}

fn run_checks(sylow: &Sylow, theory: &Theory, options: VerifyOptions) -> Result<Vec<Check>> {
    let order = sylow.space_size();
    let p = sylow.p();
    let chars = &theory.characters;
    let mut checks = Vec::new();

    // orbit classifications
    let mut canon = CheckBuilder::new("canonical_forms");
    for (name, part) in [("lie", &theory.lie), ("dual", &theory.dual), ("group", &theory.group)] {
        for o in &part.orbits {
            canon.record(o.canonical.is_some(), || {
                format!("{name} orbit of size {} (element {}) has {} rook-form members", o.size, o.representative, o.rook_members)
            });
        }
    }
    canon.record(theory.lie.labels == theory.group.labels, || "Lie and group partitions differ".into());
    canon.record(theory.lie.len() == theory.dual.len(), || {
        format!("{} Lie orbits but {} dual orbits", theory.lie.len(), theory.dual.len())
    });
    checks.push(canon.finish());

    let mut counts = CheckBuilder::new("count_equality");
    let formula = crate::roots::count_superclasses(sylow.tag(), p);
    for (name, value) in [
        ("supercharacters", chars.len()),
        ("superclasses", theory.lie.len()),
        ("dual orbits", theory.dual.len()),
        ("group orbits", theory.group.len()),
    ] {
        counts.record(value as u128 == formula, || format!("{value} {name}, formula gives {formula}"));
    }
    checks.push(counts.finish());

    let mut identity = CheckBuilder::new("s3_identity_class");
    let zero = theory.lie.orbit_of(0);
    identity.record(zero.size == 1, || format!("the class of 1 has {} elements", zero.size));
    checks.push(identity.finish());

    // per-character structure
    let mut ctx_check = CheckBuilder::new("context_invariants");
    let mut xi_check = CheckBuilder::new("xi_multiplicative");
    let mut induce_check = CheckBuilder::new("induced_integrality");
    for c in chars {
        let pl = &c.context.placement;
        ctx_check.record(c.audit.is_empty(), || format!("{pl}: {}", c.audit.join("; ")));
        xi_check.record(c.xi_check.is_ok(), || format!("{pl}: {}", c.xi_check.as_ref().unwrap_err()));
        induce_check.record(c.class_values.is_ok(), || format!("{pl}: {}", c.class_values.as_ref().unwrap_err()));
    }
    checks.extend([ctx_check.finish(), xi_check.finish(), induce_check.finish()]);

    // degree law
    let mut degree = CheckBuilder::new("degree_law");
    for c in chars {
        let index = order / (p as u128).pow(c.context.u_lambda.dim() as u32);
        let deg = c.degree();
        let h = c.h_orbit.len() as u128;
        degree.record(deg.map(|d| d as u128) == Some(index) && h == index, || {
            format!("{}: chi(1) = {deg:?}, |U|/|U_lambda| = {index}, |H.lambda| = {h}", c.context.placement)
        });
    }
    checks.push(degree.finish());

    // fibre of the restriction to u_lambda
    if options.fiber {
        let mut fiber = CheckBuilder::new("fiber");
        let results = par::map_slice(chars, |c| {
            let fib: Result<HashSet<Vec<u32>>> = c.context.fiber(sylow, options.budget).map(|v| v.into_iter().collect());
            fib.map(|fib| fib == c.h_orbit.iter().cloned().collect::<HashSet<_>>())
        });
        for (c, r) in chars.iter().zip(results) {
            let ok = r?;
            fiber.record(ok, || format!("{}: fibre differs from H_lambda-orbit", c.context.placement));
        }
        checks.push(fiber.finish());
    }

    // Kirillov-type formula at every superclass representative
    let mut kirillov = CheckBuilder::new("orbit_formula");
    let formula_rows = par::map_slice(chars, |c| {
        let g_orbit: Vec<Vec<u32>> = theory.dual.orbits[c.dual_orbit]
            .members
            .iter()
            .map(|&i| sylow.coords_from_index(i))
            .collect();
        theory
            .lie
            .orbits
            .iter()
            .map(|o| orbit_formula(sylow, &g_orbit, c.h_orbit.len(), &sylow.coords_from_index(o.representative)).ok())
            .collect::<Vec<_>>()
    });
    for (k, (c, row)) in chars.iter().zip(&formula_rows).enumerate() {
        for (j, v) in row.iter().enumerate() {
            let induced = theory.value(k, j);
            kirillov.record(v.is_some() && induced == v.as_ref(), || {
                format!("{} at superclass {j}: induced {induced:?}, formula {v:?}", c.context.placement)
            });
        }
    }
    checks.push(kirillov.finish());

    // S2: constancy on superclasses, for every element via its conjugacy class
    let mut constancy = CheckBuilder::new("s2_constancy");
    let class_superclass: Vec<u32> = theory
        .classes
        .members
        .iter()
        .map(|m| theory.lie.labels[m[0]])
        .collect();
    for (k, members) in theory.classes.members.iter().enumerate() {
        constancy.record(members.iter().all(|&i| theory.lie.labels[i] == class_superclass[k]), || {
            format!("conjugacy class {k} meets several superclasses")
        });
    }
    for c in chars {
        let Ok(values) = &c.class_values else { continue };
        let mut first: HashMap<u32, &CycValue> = HashMap::new();
        let mut ok = true;
        for (k, v) in values.iter().enumerate() {
            let s = class_superclass[k];
            ok &= *first.entry(s).or_insert(v) == v;
        }
        constancy.record(ok, || format!("{} is not constant on superclasses", c.context.placement));
    }
    checks.push(constancy.finish());

    // S1: orthogonality, and norms, via class sums
    let sizes: Vec<i64> = theory.classes.members.iter().map(|m| m.len() as i64).collect();
    let values: Vec<Option<&Vec<CycValue>>> = chars.iter().map(|c| c.class_values.as_ref().ok()).collect();
    let inner = |a: &[CycValue], b: &[CycValue]| {
        let mut acc = CycValue::zero(p);
        for ((x, y), &s) in a.iter().zip(b).zip(&sizes) {
            acc += &(x * &y.conj()).scale(s);
        }
        acc
    };
    let pairs: Vec<(usize, usize)> = (0..chars.len()).flat_map(|a| (a..chars.len()).map(move |b| (a, b))).collect();
    let products = par::map_slice(&pairs, |&(a, b)| match (values[a], values[b]) {
        (Some(x), Some(y)) => Some(inner(x, y)),
        _ => None,
    });
    let mut orth = CheckBuilder::new("s1_orthogonality");
    let mut norms = CheckBuilder::new("norms");
    let mut norm_of = vec![None; chars.len()];
    for (&(a, b), prod) in pairs.iter().zip(&products) {
        let Some(prod) = prod else { continue };
        if a == b {
            let ok = prod.as_rational_integer().ok().filter(|&v| v > 0 && v % order as i64 == 0);
            norm_of[a] = ok.map(|v| v / order as i64);
            norms.record(ok.is_some(), || format!("{}: |U|<chi,chi> = {prod}", chars[a].context.placement));
        } else {
            orth.record(prod.is_zero(), || {
                format!("<{}, {}> = {prod}/|U|", chars[a].context.placement, chars[b].context.placement)
            });
        }
    }
    checks.extend([orth.finish(), norms.finish()]);

    // the supercharacters, rescaled by chi(1)/<chi,chi>, add up to the regular character
    let mut regular = CheckBuilder::new("regular_decomposition");
    let mut total = vec![CycValue::zero(p); theory.classes.len()];
    let mut complete = true;
    for (k, c) in chars.iter().enumerate() {
        let (Some(vals), Some(deg), Some(norm)) = (values[k], c.degree(), norm_of[k]) else {
            complete = false;
            continue;
        };
        for (t, v) in total.iter_mut().zip(vals) {
            match v.scale(deg).div_exact(norm) {
                Some(x) => *t += &x,
                None => complete = false,
            }
        }
    }
    regular.record(complete, || "some rescaled supercharacter is not integral".into());
    for (k, t) in total.iter().enumerate() {
        let expect = if theory.classes.members[k].contains(&0) { order as i64 } else { 0 };
        regular.record(*t == CycValue::integer(p, expect), || format!("class {k}: sum is {t}, expected {expect}"));
    }
    checks.push(regular.finish());

    // orbit sums over distinct dual orbits are orthogonal on U
    let mut orbit_orth = CheckBuilder::new("orbit_sum_orthogonality");
    let sums: Vec<Vec<CycValue>> = formula_rows
        .iter()
        .zip(chars)
        .map(|(row, c)| {
            let g = theory.dual.orbits[c.dual_orbit].size as i64;
            let h = c.h_orbit.len() as i64;
            // the formula row is (h/g)·σ; recover σ = g·row/h where integral
            row.iter()
                .map(|v| v.as_ref().and_then(|v| v.scale(g).div_exact(h)).unwrap_or_else(|| CycValue::zero(p)))
                .collect()
        })
        .collect();
    let sc_sizes: Vec<i64> = theory.lie.orbits.iter().map(|o| o.size as i64).collect();
    for a in 0..chars.len() {
        for b in a + 1..chars.len() {
            let mut acc = CycValue::zero(p);
            for ((x, y), &s) in sums[a].iter().zip(&sums[b]).zip(&sc_sizes) {
                acc += &(x * &y.conj()).scale(s);
            }
            orbit_orth.record(acc.is_zero(), || {
                format!("orbit sums of {} and {} are not orthogonal", chars[a].context.placement, chars[b].context.placement)
            });
        }
    }
    checks.push(orbit_orth.finish());
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::DEFAULT_BUDGET;
    use crate::field::PrimeField;
    use crate::matrix::FormTag;

    fn sylow(kind: FormType, n: usize, p: u32) -> Sylow {
        Sylow::new(FormTag::new(kind, n).unwrap(), PrimeField::new(p).unwrap())
    }

    fn placement(roots: &[(i32, i32)], phi: &[u32]) -> RookPlacement {
        RookPlacement {
            roots: roots.iter().map(|&(i, j)| Root::new(i, j)).collect(),
            phi: phi.to_vec(),
        }
    }

    fn small() -> Vec<Sylow> {
        [FormType::B, FormType::C, FormType::D]
            .into_iter()
            .flat_map(|k| [sylow(k, 1, 3), sylow(k, 2, 3)])
            .collect()
    }

    #[test]
    fn contexts_are_consistent_for_small_groups() {
        for s in small() {
            for pl in enumerate_placements(s.tag(), s.field()) {
                let ctx = build_context(&s, &pl).unwrap_or_else(|e| panic!("{} {pl}: {e}", s.tag()));
                let order = ctx.check_xi(&s).unwrap();
                assert_eq!(order, 3usize.pow(ctx.u_lambda_dim() as u32));
            }
        }
    }

    #[test]
    fn s_splits_off_only_without_column_zero_or_minus_n() {
        let b2 = sylow(FormType::B, 2, 3);
        assert!(!splits_off_s(&b2, &placement(&[(1, 0)], &[1])));
        assert!(splits_off_s(&b2, &placement(&[(2, 0)], &[1])));
        assert!(!splits_off_s(&b2, &placement(&[(1, -2)], &[2])));
        assert!(splits_off_s(&b2, &placement(&[(1, 2)], &[1])));
        assert!(splits_off_s(&b2, &RookPlacement::empty()));
        assert!(!splits_off_s(&sylow(FormType::C, 2, 3), &RookPlacement::empty()));
    }

    #[test]
    fn zero_functional_gives_the_trivial_character() {
        let s = sylow(FormType::C, 2, 3);
        let ctx = build_context(&s, &RookPlacement::empty()).unwrap();
        assert_eq!(ctx.u_lambda_dim(), s.dim());
        let classes = conjugacy_classes(&s, DEFAULT_BUDGET).unwrap();
        let values = induce(&s, &ctx, &classes).unwrap();
        assert!(values.iter().all(|v| *v == CycValue::one(3)));
        assert_eq!(ctx.h_orbit(&s, HAction::default()), vec![vec![0; s.dim()]]);
    }

    #[test]
    fn xi_rejects_elements_outside_the_subgroup() {
        let s = sylow(FormType::C, 2, 3);
        let pl = placement(&[(1, -1)], &[1]);
        let ctx = build_context(&s, &pl).unwrap();
        assert!(ctx.u_lambda_dim() < s.dim());
        let outside = (0..s.space_size() as usize)
            .map(|i| s.coords_from_index(i))
            .find(|c| !ctx.u_lambda.contains(c))
            .unwrap();
        let g = s.group(s.group_from_coords(&outside)).unwrap();
        assert!(matches!(xi(&s, &ctx, &g), Err(Error::Domain(_))));
        let one = s.group(Mat::identity(s.field(), s.m())).unwrap();
        assert_eq!(xi(&s, &ctx, &one).unwrap(), CycValue::one(3));
    }

    #[test]
    fn orbit_search_agrees_with_full_enumeration() {
        for s in small() {
            for pl in enumerate_placements(s.tag(), s.field()) {
                let ctx = build_context(&s, &pl).unwrap();
                let bfs: HashSet<Vec<u32>> = ctx.h_orbit(&s, HAction::Transposed).into_iter().collect();
                let full: HashSet<Vec<u32>> = ctx
                    .h_elements(&s, DEFAULT_BUDGET)
                    .unwrap()
                    .iter()
                    .map(|h| s.dual_action_matrix(&s.dagger(h), &ctx.lambda).coeffs().to_vec())
                    .collect();
                assert_eq!(bfs, full, "{} {pl}", s.tag());
            }
        }
    }

    #[test]
    fn twisted_action_misses_the_fibre_somewhere() {
        let s = sylow(FormType::C, 2, 3);
        let mismatches = enumerate_placements(s.tag(), s.field())
            .iter()
            .filter(|pl| {
                let ctx = build_context(&s, pl).unwrap();
                let fiber: HashSet<Vec<u32>> = ctx.fiber(&s, DEFAULT_BUDGET).unwrap().into_iter().collect();
                let twisted: HashSet<Vec<u32>> = ctx.h_orbit(&s, HAction::Twisted).into_iter().collect();
                fiber != twisted
            })
            .count();
        assert!(mismatches > 0);
    }

    #[test]
    fn d2_characters_are_linear() {
        for p in [3, 5] {
            let s = sylow(FormType::D, 2, p);
            let theory = Theory::build(&s, DEFAULT_BUDGET, HAction::default()).unwrap();
            assert_eq!(theory.classes.len(), (p * p) as usize);
            assert!(theory.characters.iter().all(|c| c.degree() == Some(1)));
        }
    }

    #[test]
    fn small_theories_verify() {
        for s in small() {
            let report = verify_theory(&s, VerifyOptions::default()).unwrap();
            assert!(report.passed(), "{}: {:?}", s.tag(), report.failed_checks());
            assert_eq!(report.counts.formula as usize, report.counts.supercharacters);
            assert!(report.timings_ms.is_none());
        }
    }

    #[test]
    fn c2_supercharacters_are_the_irreducibles() {
        let s = sylow(FormType::C, 2, 3);
        let theory = Theory::build(&s, DEFAULT_BUDGET, HAction::default()).unwrap();
        assert_eq!(theory.classes.len(), 17);
        let mut degrees: Vec<i64> = theory.characters.iter().map(|c| c.degree().unwrap()).collect();
        degrees.sort_unstable();
        assert_eq!(degrees, [vec![1; 9], vec![3; 8]].concat());
        // 9·1² + 8·3² = 81 = |U|, so all 17 are irreducible
        assert_eq!(degrees.iter().map(|d| d * d).sum::<i64>(), 81);
    }

    #[test]
    fn table_serialises() {
        let s = sylow(FormType::D, 2, 3);
        let table = Theory::build(&s, DEFAULT_BUDGET, HAction::default()).unwrap().table();
        let json = serde_json::to_value(&table).unwrap();
        assert_eq!(json["superclasses"].as_array().unwrap().len(), 9);
        assert_eq!(json["supercharacters"][0]["D"], serde_json::json!([]));
        assert_eq!(json["values"][0][0]["coeffs"], serde_json::json!([1, 0]));
    }

    #[test]
    fn budget_errors_propagate() {
        let s = sylow(FormType::C, 2, 3);
        let opts = VerifyOptions {
            budget: 10,
            ..VerifyOptions::default()
        };
        assert!(matches!(verify_theory(&s, opts), Err(Error::Budget { .. })));
    }
}
