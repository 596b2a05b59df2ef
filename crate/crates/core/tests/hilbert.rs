mod common;

use dynsync::hilbert::{commutator, embed_local, kron, partial_transpose, trace_norm, Operator, SpaceDescriptor};
use dynsync::models::spin1::local;
use dynsync::C64;
use proptest::prelude::*;

fn int_op(space: &SpaceDescriptor, vals: &[i32]) -> Operator {
    let d = space.total_dim();
    let e: Vec<_> = (0..d * d).map(|k| (k / d, k % d, C64::new(vals[k % vals.len()] as f64, 0.0))).collect();
    Operator::from_triplets(space, &e).unwrap()
}

#[test]
fn kron_of_identities_and_spin_z_spectrum() {
    let s2 = SpaceDescriptor::uniform(1, 2).unwrap();
    let s3 = SpaceDescriptor::uniform(1, 3).unwrap();
    let k = kron(&Operator::identity(&s2), &Operator::identity(&s3));
    assert_eq!(k.dim(), 6);
    assert!(common::residual(&k, &Operator::identity(k.space())) == 0.0);

    // kron(S^z, I₃) is diagonal: read the spectrum off the diagonal
    let k = kron(&local::sz(), &Operator::identity(&s3));
    let rows = common::to_rows(&k);
    let mut diag: Vec<i32> = (0..9).map(|i| rows[i][i].re.round() as i32).collect();
    for r in 0..9 {
        for c in 0..9 {
            if r != c {
                assert_eq!(rows[r][c], C64::default());
            }
        }
    }
    diag.sort();
    assert_eq!(diag, vec![-1, -1, -1, 0, 0, 0, 1, 1, 1]);
}

#[test]
fn embedding() {
    let space = SpaceDescriptor::uniform(3, 3).unwrap();
    let id = embed_local(&Operator::identity(&SpaceDescriptor::uniform(1, 3).unwrap()), 1, &space).unwrap();
    assert_eq!(common::residual(&id, &Operator::identity(&space)), 0.0);
    let x1 = embed_local(&local::sx(), 1, &space).unwrap();
    let z2 = embed_local(&local::sz(), 2, &space).unwrap();
    assert!(commutator(&x1, &z2).frobenius_norm() < 1e-15);
    // |↑00⟩ has index 0·9 + 1·3 + 1
    let z0 = embed_local(&local::sz(), 0, &space).unwrap();
    let mut v = vec![C64::default(); 27];
    v[4] = C64::new(1.0, 0.0);
    let out = z0.apply(&v);
    assert_eq!(out, v);
    assert!(embed_local(&local::sz(), 3, &space).is_err());
}

#[test]
fn bell_state_partial_transpose() {
    let space = SpaceDescriptor::uniform(2, 2).unwrap();
    let h = 0.5;
    let rho = Operator::from_triplets(
        &space,
        &[(0, 0, C64::new(h, 0.0)), (0, 3, C64::new(h, 0.0)), (3, 0, C64::new(h, 0.0)), (3, 3, C64::new(h, 0.0))],
    )
    .unwrap();
    let pt = partial_transpose(&rho, 1).unwrap();
    // the 4×4 PT has the swap block [[0, ½], [½, 0]] on indices 1, 2
    assert_eq!(pt.get(1, 2), C64::new(h, 0.0));
    assert_eq!(pt.get(0, 3), C64::default());
    assert!((trace_norm(&pt).unwrap() - 2.0).abs() < 1e-12);
    assert_eq!(common::residual(&partial_transpose(&pt, 1).unwrap(), &rho), 0.0);
}

#[test]
fn trace_norm_cases() {
    let s = SpaceDescriptor::uniform(1, 2).unwrap();
    let z = Operator::from_triplets(&s, &[(0, 0, C64::new(1.0, 0.0)), (1, 1, C64::new(-1.0, 0.0))]).unwrap();
    assert!((trace_norm(&z).unwrap() - 2.0).abs() < 1e-12);
    let space = SpaceDescriptor::uniform(3, 3).unwrap();
    let dyad = Operator::dyad(&space, 0, 26).unwrap();
    assert!((trace_norm(&dyad).unwrap() - 1.0).abs() < 1e-12);
    let rho = common::random_density(&space, 3);
    assert!((trace_norm(&rho).unwrap() - 1.0).abs() < 1e-10);
}

fn unitary(space: &SpaceDescriptor, seed: u64) -> Operator {
    // U = exp(iK) for a random Hermitian K
    let g = common::random_op(space, seed);
    let k = &(&g + &g.adjoint()) * 0.5;
    let m = k.to_dense_mat();
    let scaled = faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * C64::new(0.0, 1.0));
    Operator::from_dense(space, dynsync::linalg::expm(&scaled)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn kron_is_associative(a in prop::collection::vec(-3i32..4, 4), b in prop::collection::vec(-3i32..4, 9), c in prop::collection::vec(-3i32..4, 4)) {
        let s2 = SpaceDescriptor::uniform(1, 2).unwrap();
        let s3 = SpaceDescriptor::uniform(1, 3).unwrap();
        let (a, b, c) = (int_op(&s2, &a), int_op(&s3, &b), int_op(&s2, &c));
        let left = kron(&kron(&a, &b), &c);
        let right = kron(&a, &kron(&b, &c));
        prop_assert_eq!(common::to_rows(&left), common::to_rows(&right));
    }

    #[test]
    fn disjoint_embeddings_commute(seed in 0u64..1000, j in 0usize..3, l in 0usize..3) {
        prop_assume!(j != l);
        let space = SpaceDescriptor::uniform(3, 2).unwrap();
        let s = SpaceDescriptor::uniform(1, 2).unwrap();
        let a = embed_local(&common::random_op(&s, seed), j, &space).unwrap();
        let b = embed_local(&common::random_op(&s, seed + 1), l, &space).unwrap();
        prop_assert!(commutator(&a, &b).frobenius_norm() < 1e-13);
    }

    #[test]
    fn partial_transpose_keeps_trace(seed in 0u64..1000, site in 0usize..2) {
        let space = SpaceDescriptor::new(vec![2, 3]).unwrap();
        let rho = common::random_op(&space, seed);
        let pt = partial_transpose(&rho, site).unwrap();
        prop_assert!((pt.trace() - rho.trace()).norm() < 1e-13);
    }

    #[test]
    fn trace_norm_is_unitarily_invariant(seed in 0u64..1000) {
        let space = SpaceDescriptor::uniform(2, 2).unwrap();
        let rho = common::random_op(&space, seed);
        let u = unitary(&space, seed + 7);
        let rotated = &(&u * &rho) * &u.adjoint();
        prop_assert!((trace_norm(&rotated).unwrap() - trace_norm(&rho).unwrap()).abs() < 1e-10);
    }
}
