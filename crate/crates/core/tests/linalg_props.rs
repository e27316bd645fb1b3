mod common;

use proptest::prelude::*;
use stroblim_core::linalg::{
    expm, hermitian_eig, kron, lift_probe, partial_trace, superop, ComplexMatrix, Subsystem,
    TensorDims, C64,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kron_is_associative_and_mixed_product(seed in any::<u64>(), da in 2usize..4, db in 2usize..4) {
        let mut r = common::rng(seed);
        let a = common::matrix(&mut r, da, 1.0);
        let b = common::matrix(&mut r, db, 1.0);
        let c = common::matrix(&mut r, da, 1.0);
        let d = common::matrix(&mut r, db, 1.0);
        let e = common::matrix(&mut r, 2, 1.0);
        prop_assert!(kron(&kron(&a, &b), &e).approx_eq(&kron(&a, &kron(&b, &e)), 1e-12));
        let lhs = kron(&a, &b).matmul(&kron(&c, &d));
        prop_assert!(lhs.approx_eq(&kron(&a.matmul(&c), &b.matmul(&d)), 1e-12));
    }

    #[test]
    fn expm_inverse(seed in any::<u64>(), d in 2usize..6, norm in 0.1f64..5.0) {
        let mut r = common::rng(seed);
        let m = common::matrix(&mut r, d, 1.0);
        let a = m.scale_real(norm / m.op_norm());
        let prod = expm(&a).unwrap().matmul(&expm(&-&a).unwrap());
        prop_assert!(prod.approx_eq(&ComplexMatrix::identity(d), 1e-10), "{:e}", (prod - ComplexMatrix::identity(d)).max_abs());
    }

    #[test]
    fn hermitian_propagator_is_unitary(seed in any::<u64>(), d in 2usize..9, t in 0.0f64..10.0) {
        let mut r = common::rng(seed);
        let h = common::hermitian(&mut r, d);
        let u = expm(&h.scale(C64::new(0.0, -t))).unwrap();
        prop_assert!(u.is_unitary(1e-10));
    }

    #[test]
    fn pade_agrees_with_eigen_path(seed in any::<u64>(), d in 2usize..6, t in 0.0f64..3.0) {
        let mut r = common::rng(seed);
        let h = common::hermitian(&mut r, d);
        let a = h.scale(C64::new(0.0, -t));
        let fast = expm(&a).unwrap();
        let pade = stroblim_core::linalg::expm_pade(&a).unwrap();
        prop_assert!(fast.approx_eq(&pade, 1e-10));
    }

    #[test]
    fn partial_trace_is_linear_and_trace_preserving(seed in any::<u64>(), ds in 1usize..4, dp in 1usize..4, s in -2.0f64..2.0) {
        let mut r = common::rng(seed);
        let dims = TensorDims::new(ds, dp);
        let x = common::matrix(&mut r, ds * dp, 1.0);
        let y = common::matrix(&mut r, ds * dp, 1.0);
        for keep in [Subsystem::System, Subsystem::Probe] {
            let px = partial_trace(&x, dims, keep).unwrap();
            let py = partial_trace(&y, dims, keep).unwrap();
            let combo = partial_trace(&(&x + &y.scale_real(s)), dims, keep).unwrap();
            prop_assert!(combo.approx_eq(&(&px + &py.scale_real(s)), 1e-12));
            prop_assert!((px.trace() - x.trace()).norm() < 1e-12);
        }
    }

    #[test]
    fn partial_trace_cyclic_in_traced_factor(seed in any::<u64>(), ds in 1usize..4, dp in 1usize..4) {
        let mut r = common::rng(seed);
        let dims = TensorDims::new(ds, dp);
        let x = common::matrix(&mut r, ds * dp, 1.0);
        let y = lift_probe(&common::matrix(&mut r, dp, 1.0), ds);
        let left = partial_trace(&x.matmul(&y), dims, Subsystem::System).unwrap();
        let right = partial_trace(&y.matmul(&x), dims, Subsystem::System).unwrap();
        prop_assert!(left.approx_eq(&right, 1e-12));
    }

    #[test]
    fn hermitian_eig_reconstructs(seed in any::<u64>(), d in 1usize..17) {
        let mut r = common::rng(seed);
        let h = common::hermitian(&mut r, d);
        let e = hermitian_eig(&h).unwrap();
        prop_assert!(e.reconstruct().approx_eq(&h, 1e-10));
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(e.vectors.is_unitary(1e-10));
    }

    #[test]
    fn superoperator_of_sandwich(seed in any::<u64>(), d in 2usize..5) {
        let mut r = common::rng(seed);
        let a = common::matrix(&mut r, d, 1.0);
        let b = common::matrix(&mut r, d, 1.0);
        let x = common::matrix(&mut r, d, 1.0);
        let s = superop::sandwich(&a, &b);
        prop_assert!(superop::apply(&s, &x).approx_eq(&a.matmul(&x).matmul(&b), 1e-12));
        prop_assert_eq!(superop::unvectorize(&superop::vectorize(&x)), x);
    }
}
