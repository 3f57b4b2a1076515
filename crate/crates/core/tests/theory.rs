//! Cross-module checks of the supercharacter construction against literal definitions.

use std::collections::{BTreeSet, HashSet};

use superchar_core::algebra::span::vec_to_mat;
use superchar_core::algebra::subgroups::g_diamond_algebra;
use superchar_core::algebra::DEFAULT_BUDGET;
use superchar_core::orbits::{self, Side};
use superchar_core::roots::{count_superclasses, enumerate_placements};
use superchar_core::superchar::{build_context, orbit_formula, HAction, Theory};
use superchar_core::*;

fn sylow(kind: FormType, n: usize, p: u32) -> Sylow {
    Sylow::new(FormTag::new(kind, n).unwrap(), PrimeField::new(p).unwrap())
}

fn rank_two() -> Vec<Sylow> {
    [FormType::B, FormType::C, FormType::D].into_iter().map(|k| sylow(k, 2, 3)).collect()
}

#[test]
fn xi_is_multiplicative_on_all_pairs() {
    for s in rank_two() {
        for pl in enumerate_placements(s.tag(), s.field()) {
            let ctx = build_context(&s, &pl).unwrap();
            let lam = ctx.lambda.coeffs();
            let elems: Vec<(Mat, u32)> = ctx
                .u_lambda
                .enumerate(DEFAULT_BUDGET)
                .unwrap()
                .into_iter()
                .map(|c| (s.group_from_coords(&c), s.pair_coords(lam, &c)))
                .collect();
            for (u, eu) in &elems {
                assert!(ctx.contains_group_element(&s, u));
                for (v, ev) in &elems {
                    let c = s.lie_coords(&s.springer(&u.mul(v)));
                    assert!(ctx.u_lambda.contains(&c), "{} {pl}: U_lambda is not closed", s.tag());
                    assert_eq!(s.pair_coords(lam, &c), s.field().add(*eu, *ev), "{} {pl}", s.tag());
                }
            }
        }
    }
}

#[test]
fn induction_matches_the_literal_formula() {
    for s in rank_two() {
        let theory = Theory::build(&s, DEFAULT_BUDGET, HAction::default()).unwrap();
        let group = s.enumerate_group(DEFAULT_BUDGET).unwrap();
        let inverses: Vec<Mat> = group.iter().map(|v| v.inverse_unitriangular().unwrap()).collect();
        for (k, ch) in theory.characters.iter().enumerate() {
            let ctx = &ch.context;
            let sub_order = 3i64.pow(ctx.u_lambda_dim() as u32);
            for (j, orbit) in theory.lie.orbits.iter().enumerate() {
                let u = s.group_from_coords(&s.coords_from_index(orbit.representative));
                // (1/|U_λ|) Σ_v [v u v⁻¹ ∈ U_λ] ξ(v u v⁻¹)
                let mut hist = vec![0i64; 3];
                for (v, vi) in group.iter().zip(&inverses) {
                    let c = s.lie_coords(&s.springer(&v.mul(&u).mul(vi)));
                    if ctx.u_lambda.contains(&c) {
                        hist[s.pair_coords(ctx.lambda.coeffs(), &c) as usize] += 1;
                    }
                }
                let literal = CycValue::from_exponent_counts(hist).div_exact(sub_order).expect("integral");
                assert_eq!(theory.value(k, j), Some(&literal), "{} {}", s.tag(), ctx.placement);
            }
        }
    }
}

#[test]
fn orbit_formula_edge_values() {
    for s in rank_two() {
        let theory = Theory::build(&s, DEFAULT_BUDGET, HAction::default()).unwrap();
        let zero = vec![0; s.dim()];
        for ch in &theory.characters {
            let g_orbit: Vec<Vec<u32>> = theory.dual.orbits[ch.dual_orbit]
                .members
                .iter()
                .map(|&i| s.coords_from_index(i))
                .collect();
            let h = ch.h_orbit.len();
            // the constant |H_λ★λ| / |𝒢★λ| is positive and the value at 1 is |H_λ★λ|
            assert!(h > 0 && g_orbit.len().is_multiple_of(h));
            let at_one = orbit_formula(&s, &g_orbit, h, &zero).unwrap();
            assert_eq!(at_one, CycValue::integer(3, h as i64));
            if ch.context.placement.is_empty() {
                for i in 0..s.space_size() as usize {
                    let v = orbit_formula(&s, &g_orbit, h, &s.coords_from_index(i)).unwrap();
                    assert_eq!(v, CycValue::one(3));
                }
            }
        }
    }
}

#[test]
fn partitions_have_p_power_orbits() {
    let mut configs: Vec<Sylow> = Vec::new();
    for kind in [FormType::B, FormType::C, FormType::D] {
        configs.extend([sylow(kind, 1, 3), sylow(kind, 2, 3), sylow(kind, 2, 5), sylow(kind, 3, 3)]);
    }
    for s in configs {
        let p = s.p() as usize;
        for side in [Side::Lie, Side::Dual] {
            let part = orbits::partition(&s, side, DEFAULT_BUDGET).unwrap();
            let mut seen = vec![false; s.space_size() as usize];
            for (k, o) in part.orbits.iter().enumerate() {
                let mut size = o.size;
                while size % p == 0 {
                    size /= p;
                }
                assert_eq!(size, 1, "{} {side:?}: orbit size {}", s.tag(), o.size);
                assert_eq!(o.members.len(), o.size);
                for &i in &o.members {
                    assert!(!seen[i]);
                    seen[i] = true;
                    assert_eq!(part.labels[i] as usize, k);
                }
            }
            assert!(seen.iter().all(|&x| x));
        }
    }
}

#[test]
fn orbit_counts_match_the_formula_where_rook_forms_exist() {
    for (kind, n, p, orbits_found) in [
        (FormType::B, 2, 3, 17),
        (FormType::B, 2, 5, 49),
        (FormType::C, 2, 3, 17),
        (FormType::C, 2, 5, 49),
        (FormType::D, 2, 3, 9),
        (FormType::D, 2, 5, 25),
        (FormType::C, 3, 3, 123),
    ] {
        let s = sylow(kind, n, p);
        let part = orbits::partition(&s, Side::Lie, DEFAULT_BUDGET).unwrap();
        assert_eq!(part.len(), orbits_found);
        assert_eq!(count_superclasses(s.tag(), p), orbits_found as u128);
        assert!(part.is_canonical());
    }
    // B3 and D3 have orbits without any rook-form member
    for (kind, orbits_found, formula) in [(FormType::B, 143, 111), (FormType::D, 53, 45)] {
        let s = sylow(kind, 3, 3);
        let part = orbits::partition(&s, Side::Lie, DEFAULT_BUDGET).unwrap();
        assert_eq!(part.len(), orbits_found);
        assert_eq!(count_superclasses(s.tag(), 3), formula);
        assert_eq!(part.orbits.iter().filter(|o| o.canonical.is_some()).count() as u128, formula);
        assert!(part.violations().all(|o| o.rook_members == 0));
    }
}

#[test]
fn superclasses_are_pulled_back_orbits() {
    let s = sylow(FormType::C, 2, 3);
    let one = s.group(Mat::identity(s.field(), s.m())).unwrap();
    let k1 = orbits::superclass(&s, &one);
    assert_eq!(k1.len(), 1);
    assert!(k1[0].mat().is_identity());
    let part = orbits::group_partition(&s, DEFAULT_BUDGET).unwrap();
    assert_eq!(part.orbits.iter().map(|o| o.size).sum::<usize>(), 81);
    for i in [1usize, 7, 40, 80] {
        let u = s.group(s.group_from_coords(&s.coords_from_index(i))).unwrap();
        let x = s.to_lie(&u);
        assert_eq!(orbits::superclass(&s, &u).len(), orbits::orbit_lie(&s, &x).size);
    }
}

#[test]
fn algebra_group_route_agrees_for_c_and_d() {
    for s in [sylow(FormType::C, 2, 3), sylow(FormType::D, 2, 3), sylow(FormType::D, 2, 5)] {
        let f = s.field();
        let m = s.m();
        let alg = g_diamond_algebra(s.tag(), f);
        let as_algebra = MatrixSubgroup::algebra_group(s.tag(), f, alg.clone()).unwrap();
        let shape = MatrixSubgroup::g_script(&s);
        assert_eq!(as_algebra.order(), shape.order());
        let one = Mat::identity(f, m);
        let elements: Vec<Mat> = alg.enumerate(DEFAULT_BUDGET).unwrap().iter().map(|v| one.add(&vec_to_mat(f, m, v))).collect();
        assert!(elements.iter().all(|g| shape.contains(g)));
        // dual orbits from the full algebra group against generator search
        let part = orbits::partition(&s, Side::Dual, DEFAULT_BUDGET).unwrap();
        for o in &part.orbits {
            let lam = s.dual(s.coords_from_index(o.representative)).unwrap();
            let direct: BTreeSet<usize> = elements
                .iter()
                .map(|g| s.index_of_coords(s.dual_action(g, &lam).unwrap().coeffs()))
                .collect();
            let searched: BTreeSet<usize> = o.members.iter().copied().collect();
            assert_eq!(direct, searched, "{}", s.tag());
        }
    }
}

#[test]
fn group_and_lie_classifications_agree() {
    for s in [sylow(FormType::B, 2, 3), sylow(FormType::C, 2, 5), sylow(FormType::D, 3, 3)] {
        let lie = orbits::partition(&s, Side::Lie, DEFAULT_BUDGET).unwrap();
        let group = orbits::group_partition(&s, DEFAULT_BUDGET).unwrap();
        assert_eq!(lie.labels, group.labels);
        let lie_canon: HashSet<_> = lie.orbits.iter().map(|o| o.canonical.clone()).collect();
        let group_canon: HashSet<_> = group.orbits.iter().map(|o| o.canonical.clone()).collect();
        assert_eq!(lie_canon, group_canon);
    }
}
