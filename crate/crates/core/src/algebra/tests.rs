use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::roots::Root;

fn sylow(kind: FormType, n: usize, p: u32) -> Sylow {
    Sylow::new(FormTag::new(kind, n).unwrap(), PrimeField::new(p).unwrap())
}

fn all_configs(max_n: usize) -> Vec<Sylow> {
    let mut out = Vec::new();
    for kind in [FormType::B, FormType::C, FormType::D] {
        for n in 1..=max_n {
            out.push(sylow(kind, n, 3));
        }
    }
    out
}

fn random_coords(rng: &mut ChaCha8Rng, s: &Sylow) -> Vec<u32> {
    (0..s.dim()).map(|_| rng.random_range(0..s.p())).collect()
}

fn random_unitriangular(rng: &mut ChaCha8Rng, f: PrimeField, n: usize) -> Mat {
    let mut a = Mat::identity(f, n);
    for r in 0..n {
        for c in r + 1..n {
            a.set(r, c, rng.random_range(0..f.p()));
        }
    }
    a
}

#[test]
fn lie_basis_shapes() {
    let c1 = sylow(FormType::C, 1, 3);
    let basis = c1.lie_basis();
    assert_eq!(basis.len(), 1);
    assert_eq!(*basis[0].mat(), Mat::unit(c1.field(), 2, 0, 1));
    assert_eq!(sylow(FormType::D, 2, 3).lie_basis().len(), 2);
    for s in all_configs(4) {
        for b in s.lie_basis() {
            assert!(s.is_lie(b.mat()), "{}", s.tag());
        }
        let span = LinearSubspace::span_matrices(s.field(), s.m(), s.lie_basis().iter().map(|b| b.mat()));
        assert_eq!(span.dim(), s.dim());
    }
}

#[test]
fn split_into_block_parts() {
    let s = sylow(FormType::C, 2, 3);
    let roots = s.roots();
    let a = roots.index_of(Root::new(1, 2)).unwrap();
    let b = roots.index_of(Root::new(1, -1)).unwrap();
    let x = s.lie(s.basis_matrix(a).add(s.basis_matrix(b))).unwrap();
    let (x0, x1) = s.split(&x);
    assert_eq!(x0.mat(), s.basis_matrix(a));
    assert_eq!(x1.mat(), s.basis_matrix(b));
    let (y0, y1) = s.split(&x0);
    assert_eq!(y0, x0);
    assert!(y1.mat().is_zero());
}

#[test]
fn left_and_right_actions() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for s in all_configs(3) {
        let f = s.field();
        let one = s.u0_element(&Mat::identity(f, s.tag().n)).unwrap();
        for _ in 0..100 {
            let x = s.lie_from_coords(&random_coords(&mut rng, &s));
            assert_eq!(s.left_action(&one, &x).unwrap(), x);
            assert_eq!(s.right_action(&one, &x).unwrap(), x);
            let a_blk = random_unitriangular(&mut rng, f, s.tag().n);
            let b_blk = random_unitriangular(&mut rng, f, s.tag().n);
            let a = s.u0_element(&a_blk).unwrap();
            let b = s.u0_element(&b_blk).unwrap();
            let a_inv = s.u0_element(&a_blk.inverse_unitriangular().unwrap()).unwrap();
            // ℓ_a ∘ r_a⁻¹ = Ad_a
            let lr = s.left_action(&a, &s.right_action(&a_inv, &x).unwrap()).unwrap();
            assert_eq!(lr, s.adjoint(&a, &x));
            // the two actions commute
            let ab = s.left_action(&a, &s.right_action(&b, &x).unwrap()).unwrap();
            let ba = s.right_action(&b, &s.left_action(&a, &x).unwrap()).unwrap();
            assert_eq!(ab, ba);
            assert!(s.is_lie(ab.mat()));
        }
    }
}

#[test]
fn left_action_on_blocks_for_c2() {
    let s = sylow(FormType::C, 2, 5);
    let f = s.field();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let x = s.lie_from_coords(&random_coords(&mut rng, &s));
        let a_blk = random_unitriangular(&mut rng, f, 2);
        let a = s.u0_element(&a_blk).unwrap();
        let y = s.left_action(&a, &x).unwrap();
        let block = |m: &Mat, r0: usize, c0: usize| {
            let mut b = Mat::zero(f, 2);
            for r in 0..2 {
                for c in 0..2 {
                    b.set(r, c, m.get(r0 + r, c0 + c));
                }
            }
            b
        };
        let x0 = block(x.mat(), 0, 0);
        let x1 = block(x.mat(), 0, 2);
        assert_eq!(block(y.mat(), 0, 0), a_blk.mul(&x0));
        assert_eq!(block(y.mat(), 0, 2), a_blk.mul(&x1).mul(&a_blk.tau()));
        assert_eq!(block(y.mat(), 2, 2), a_blk.mul(&x0).tau().neg());
    }
}

#[test]
fn adjoint_is_functorial() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for s in all_configs(3) {
        for _ in 0..30 {
            let u = s.group(s.group_from_coords(&random_coords(&mut rng, &s))).unwrap();
            let v = s.group(s.group_from_coords(&random_coords(&mut rng, &s))).unwrap();
            let x = s.lie_from_coords(&random_coords(&mut rng, &s));
            let uv = s.group(u.mat().mul(v.mat())).unwrap();
            assert_eq!(s.adjoint(&uv, &x), s.adjoint(&u, &s.adjoint(&v, &x)));
            assert!(s.is_lie(s.adjoint(&u, &x).mat()));
        }
    }
}

/// Smallest `c - r` over nonzero cells.
fn height(x: &Mat) -> Option<usize> {
    let m = x.dim();
    (0..m)
        .flat_map(|r| (r + 1..m).map(move |c| (r, c)))
        .filter(|&(r, c)| x.get(r, c) != 0)
        .map(|(r, c)| c - r)
        .min()
}

#[test]
fn elementary_adjoint_raises_height() {
    for s in all_configs(3) {
        for k in 0..s.dim() {
            for t in s.field().nonzero() {
                let mut coords = vec![0; s.dim()];
                coords[k] = t;
                let u = s.group(s.group_from_coords(&coords)).unwrap();
                for x in s.lie_basis() {
                    let diff = s.adjoint(&u, &x).mat().sub(x.mat());
                    if let Some(h) = height(&diff) {
                        assert!(h > height(x.mat()).unwrap());
                    }
                }
            }
        }
    }
}

#[test]
fn pairing_examples() {
    for s in all_configs(3) {
        let f = s.field();
        let zero = s.dual_zero();
        for b in s.lie_basis() {
            assert!(s.pair(&zero, &b).is_zero());
        }
        for a in 0..s.dim() {
            let mut c = vec![0; s.dim()];
            c[a] = 1;
            let lam = s.dual(c).unwrap();
            for (b, x) in s.lie_basis().iter().enumerate() {
                let v = s.pair(&lam, x).value();
                if a == b {
                    let expect = match s.roots().pairing(a) {
                        Pairing::SelfPaired => 1,
                        Pairing::Signed(_) => f.reduce(2),
                    };
                    assert_eq!(v, expect);
                } else {
                    assert_eq!(v, 0);
                }
            }
        }
    }
}

#[test]
fn dual_action_matches_pointwise_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for s in all_configs(2) {
        let g_script = MatrixSubgroup::g_script(&s);
        let elems = g_script.closure(1 << 20).unwrap();
        let space: Vec<LieElement> = (0..s.space_size() as usize)
            .map(|i| s.lie_from_coords(&s.coords_from_index(i)))
            .collect();
        for _ in 0..20 {
            let g = &elems[rng.random_range(0..elems.len())];
            let h = &elems[rng.random_range(0..elems.len())];
            let lam = s.dual(random_coords(&mut rng, &s)).unwrap();
            let moved = s.dual_action(g, &lam).unwrap();
            for x in &space {
                let gx = s.lie(g.mul(x.mat()).mul(&s.dagger(g))).unwrap();
                assert_eq!(s.pair(&moved, x), s.pair(&lam, &gx));
            }
            let one = Mat::identity(s.field(), s.m());
            assert_eq!(s.dual_action(&one, &lam).unwrap(), lam);
            let gh = s.dual_action(&g.mul(h), &lam).unwrap();
            let h_then_g = s.dual_action(h, &s.dual_action(g, &lam).unwrap()).unwrap();
            assert_eq!(gh, h_then_g);
        }
    }
}

#[test]
fn dual_action_rejects_foreign_matrices() {
    let s = sylow(FormType::B, 2, 3);
    let mut bad = Mat::identity(s.field(), 5);
    bad.set(1, 2, 1);
    assert!(s.dual_action(&bad, &s.dual_zero()).is_err());
}

#[test]
fn group_sizes() {
    assert_eq!(sylow(FormType::D, 2, 3).enumerate_group(DEFAULT_BUDGET).unwrap().len(), 9);
    assert_eq!(sylow(FormType::C, 2, 3).enumerate_group(DEFAULT_BUDGET).unwrap().len(), 81);
    let b3 = sylow(FormType::B, 3, 3);
    let all = b3.enumerate_group(DEFAULT_BUDGET).unwrap();
    assert_eq!(all.len(), 19683);
    assert!(all.iter().all(|g| b3.is_group(g)));
    assert!(matches!(b3.enumerate_group(1000), Err(Error::Budget { required: 19683, .. })));
}

#[test]
fn cayley_basics() {
    for s in all_configs(3) {
        let one = Mat::identity(s.field(), s.m());
        assert!(s.cayley(&one).is_zero());
        assert!(s.cayley_inv(&Mat::zero(s.field(), s.m())).is_identity());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for s in all_configs(3) {
        for _ in 0..40 {
            let x = s.lie_matrix(&random_coords(&mut rng, &s));
            let u = s.cayley_inv(&x);
            assert!(s.is_group(&u));
            assert_eq!(s.cayley(&u), x);
            let g = s.group_from_coords(&random_coords(&mut rng, &s));
            let g_inv = g.inverse_unitriangular().unwrap();
            let conj = g.mul(&u).mul(&g_inv);
            assert_eq!(s.cayley(&conj), g.mul(&x).mul(&g_inv));
        }
    }
}

#[test]
fn log_and_exp_are_inverse() {
    let tag = FormTag::new(FormType::B, 2).unwrap();
    let f = PrimeField::new(7).unwrap();
    let s = Sylow::with_springer(tag, f, SpringerMap::Log).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let x = s.lie_matrix(&random_coords(&mut rng, &s));
        let u = s.springer_inv(&x);
        assert!(s.is_group(&u));
        assert_eq!(s.springer(&u), x);
    }
    assert!(Sylow::with_springer(tag, PrimeField::new(5).unwrap(), SpringerMap::Log).is_err());
}

#[test]
fn semidirect_decomposition_of_u() {
    for s in all_configs(2) {
        let n = s.tag().n;
        let hi = s.m() - n;
        let mut seen = std::collections::HashSet::new();
        for u in s.enumerate_group(DEFAULT_BUDGET).unwrap() {
            // the U_0 factor is the block-diagonal part
            let mut u0 = Mat::identity(s.field(), s.m());
            for r in 0..s.m() {
                for c in r + 1..s.m() {
                    if (c < n) || (r >= hi) {
                        u0.set(r, c, u.get(r, c));
                    }
                }
            }
            assert!(s.is_u0(&u0));
            let u1 = u.mul(&u0.inverse_unitriangular().unwrap());
            assert!(s.is_group(&u1));
            for r in 0..s.m() {
                for c in r + 1..s.m() {
                    if (c < n) || (r >= hi) {
                        assert_eq!(u1.get(r, c), 0);
                    }
                }
            }
            assert!(seen.insert((u1.clone(), u0.clone())));
        }
    }
}

#[test]
fn g_script_factorisations() {
    for kind in [FormType::B, FormType::C, FormType::D] {
        let s = sylow(kind, 2, 3);
        let g = MatrixSubgroup::g_script(&s);
        let h_d = MatrixSubgroup::h_diamond(&s);
        let u = s.enumerate_group(DEFAULT_BUDGET).unwrap();
        let meet = u.iter().filter(|x| h_d.contains(x)).count() as u128;
        assert_eq!(u.len() as u128 * h_d.order() / meet, g.order(), "{kind}");
        if kind == FormType::B {
            let g_d = MatrixSubgroup::g_diamond(&s);
            assert_eq!(g.order(), g_d.order() * 3);
            for x in g.closure(1 << 20).unwrap() {
                let (_, rest) = s.split_s(&x);
                assert!(g_d.contains(&rest));
            }
        }
    }
}

#[test]
fn linear_tables_agree_with_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for s in all_configs(3) {
        let gens = MatrixSubgroup::g_script(&s).generators().to_vec();
        if gens.is_empty() {
            continue;
        }
        for _ in 0..10 {
            let g = &gens[rng.random_range(0..gens.len())];
            let t = s.lie_action_table(g);
            let d = s.dual_action_table(g);
            let coords = random_coords(&mut rng, &s);
            let x = s.lie_matrix(&coords);
            assert_eq!(t.apply(&coords), s.lie_coords(&g.mul(&x).mul(&s.dagger(g))));
            let lam = s.dual(coords.clone()).unwrap();
            assert_eq!(d.apply(&coords), s.dual_action(g, &lam).unwrap().coeffs());
        }
    }
}
