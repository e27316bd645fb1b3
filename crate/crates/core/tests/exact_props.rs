mod common;

use proptest::prelude::*;
use stroblim_core::exact::{
    nonselective_channel, run_nonselective, run_selective, unitary_step, EvolutionPlan,
};
use stroblim_core::linalg::{partial_trace, ComplexMatrix, Ket, Subsystem, TensorDims};
use stroblim_core::model::{
    qubit_from_population, swap_hamiltonian, InitialState, MeasurementSpec, Projector,
};

fn off_block(rho: &ComplexMatrix, lifted: &[ComplexMatrix]) -> f64 {
    let mut worst = 0.0f64;
    for (i, a) in lifted.iter().enumerate() {
        for (j, b) in lifted.iter().enumerate() {
            if i != j {
                worst = worst.max(a.matmul(rho).matmul(b).max_abs());
            }
        }
    }
    worst
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn unitary_step_preserves_trace_hermiticity_purity(seed in any::<u64>(), t in 0.0f64..5.0) {
        let mut r = common::rng(seed);
        let h = common::hermitian(&mut r, 6);
        let rho = common::density(&mut r, 6).scale_real(0.7);
        let out = unitary_step(&rho, &h, t).unwrap();
        prop_assert!((out.trace() - rho.trace()).norm() < 1e-10);
        prop_assert!(out.is_hermitian(1e-10));
        prop_assert!((out.purity() - rho.purity()).abs() < 1e-10);
    }

    #[test]
    fn channel_is_idempotent_and_trace_preserving(seed in any::<u64>(), dp in 2usize..5, ds in 1usize..4) {
        let mut r = common::rng(seed);
        let m = rand::Rng::gen_range(&mut r, 1..=dp);
        let spec = MeasurementSpec::nonselective(common::projector_family(&mut r, dp, m)).unwrap();
        let rho = common::density(&mut r, ds * dp);
        let once = nonselective_channel(&rho, &spec).unwrap();
        let twice = nonselective_channel(&once, &spec).unwrap();
        prop_assert!(twice.approx_eq(&once, 1e-12));
        prop_assert!((once.trace() - rho.trace()).norm() < 1e-12);
        prop_assert!(once.is_psd(1e-10));
    }

    #[test]
    fn selective_trace_is_monotone(seed in any::<u64>(), dp in 2usize..4, rank in 1usize..3) {
        let mut r = common::rng(seed);
        let rank = rank.min(dp - 1).max(1);
        let ham = common::hamiltonian(&mut r, 2, dp, 3, 4.0);
        let p = common::projector(&mut r, dp, rank);
        let phi = p.basis()[0].clone();
        let spec = MeasurementSpec::selective(p);
        let init = InitialState::pure(&common::ket(&mut r, 2), &phi).unwrap();
        let plan = EvolutionPlan::new(ham, spec, 0.05, 3.0).unwrap().with_probability_floor(0.0);
        let traj = run_selective(&plan, &init).unwrap();
        prop_assert!(traj.samples.windows(2).all(|w| w[1].trace <= w[0].trace + 1e-12));
    }

    #[test]
    fn nonselective_runs_conserve_trace_and_blocks(seed in any::<u64>(), dp in 2usize..4) {
        let mut r = common::rng(seed);
        let ham = common::hamiltonian(&mut r, 2, dp, 3, 4.0);
        let family = common::projector_family(&mut r, dp, dp.min(2));
        let spec = MeasurementSpec::nonselective(family).unwrap();
        let lifted = spec.lifted(2);
        let init = InitialState::new(common::density(&mut r, 2), common::density(&mut r, dp)).unwrap();
        let plan = EvolutionPlan::new(ham, spec, 0.05, 2.0).unwrap();
        let traj = run_nonselective(&plan, &init).unwrap();
        for s in &traj.samples {
            prop_assert!((s.trace - 1.0).abs() < 1e-10);
            prop_assert!(off_block(&s.state, &lifted) < 1e-12);
        }
    }
}

#[test]
fn outcome_sequences_sum_to_one() {
    let mut r = common::rng(7);
    let ham = common::hamiltonian(&mut r, 2, 2, 3, 3.0);
    let family = common::rank_one_family(&mut r, 2);
    let init = InitialState::new(common::density(&mut r, 2), family[0].matrix().clone()).unwrap();
    for n in 1..=3usize {
        let mut total = 0.0;
        for code in 0..(1usize << n) {
            let seq: Vec<usize> = (0..n).map(|k| (code >> k) & 1).collect();
            let spec = MeasurementSpec::new(family.clone(), Some(0)).unwrap();
            let plan = EvolutionPlan::new(ham.clone(), spec, 0.3, 0.3 * n as f64)
                .unwrap()
                .with_outcomes(seq)
                .unwrap()
                .with_probability_floor(-1.0);
            total += run_selective(&plan, &init).unwrap().last().unwrap().trace;
        }
        assert!((total - 1.0).abs() < 1e-10, "N = {n}: {total}");
    }
}

#[test]
fn zeno_probe_infidelity_shrinks_with_tau() {
    // probe state just before the next measurement, at T = 2 + τ/2
    let omega = 1.0;
    let up = Ket::basis(2, 0);
    let mut last = f64::INFINITY;
    for tau in [0.04f64, 0.01, 0.0025] {
        let gamma = (omega / tau).sqrt();
        let spec =
            MeasurementSpec::selective(Projector::from_kets(std::slice::from_ref(&up)).unwrap());
        let plan = EvolutionPlan::new(swap_hamiltonian(gamma), spec, tau, 2.0 + tau / 2.0).unwrap();
        let init = InitialState::pure(&qubit_from_population(0.3), &up).unwrap();
        let s = run_selective(&plan, &init).unwrap().last().unwrap().clone();
        let probe = partial_trace(&s.state, TensorDims::new(2, 2), Subsystem::Probe).unwrap();
        let infidelity = 1.0 - probe[(0, 0)].re / probe.trace().re;
        assert!(infidelity < last, "tau {tau}: {infidelity} vs {last}");
        last = infidelity;
    }
    assert!(last < 1e-3);
}
