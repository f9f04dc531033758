mod common;

use proptest::prelude::*;
use rand::Rng;

use common::*;
use qsdistill::classify::{
    canonical_decomposition, classify_family, reweight, same_components, separable_witness, verdict, FamilyClass,
    Verdict, DEFAULT_TOL,
};
use qsdistill::linalg::{hermitian_eigen, CMatrix};
use qsdistill::protocol::{
    bilateral_cnot, measure_ancilla, predicted_rank2, run_protocol, sz_rotation, unilateral_not, Outcome, Policy,
    ProtocolConfig,
};
use qsdistill::states::{
    concurrence, from_mixture, nondiagonal_state, ppt_is_separable, rank2_mixture, rank2_state, BellState,
    DensityMatrix, NonDiagonalParams, PureStateMixture,
};

fn grid() -> impl Iterator<Item = f64> {
    (1..100).map(|k| k as f64 / 100.0)
}

fn catalogue() -> Vec<DensityMatrix> {
    let bell = |w: [f64; 4]| {
        let parts = BellState::ALL.iter().zip(w).filter(|(_, p)| *p > 0.0).map(|(b, p)| (p, b.ket()));
        from_mixture(&PureStateMixture::new(parts.collect()).unwrap()).unwrap()
    };
    let nd = |a, b, c, d| nondiagonal_state(NonDiagonalParams::new(a, b, c, d)).unwrap();
    vec![
        bell([0.4, 0.3, 0.2, 0.1]),
        bell([0.7, 0.1, 0.1, 0.1]),
        bell([0.5, 0.5, 0.0, 0.0]),
        nd(1.0, 0.5, 0.5, 0.0),
        nd(1.0, 0.5, 0.5, 0.2),
        nd(1.0, 0.5, 0.5, -0.35),
        nd(1.0, 0.3, 0.3, 0.1),
        nd(1.0, 1.0, 0.0, 0.0),
        nd(1.0, 0.0, 1.0, 0.0),
        nd(1.0, 1.0, 1.0, 0.0),
    ]
}

#[test]
fn witnesses_are_separable_new_states() {
    for rho in catalogue() {
        let fc = classify_family(&rho, DEFAULT_TOL);
        let decomp = canonical_decomposition(&fc).expect("catalogue states are recognized");
        let witness = separable_witness(&rho, &fc).unwrap().unwrap_or_else(|| panic!("{fc} has a witness"));
        assert!(ppt_is_separable(&from_mixture(&witness).unwrap()), "{fc}");
        assert!(same_components(&witness, &decomp, 1e-9), "{fc}");
        assert!(witness.probabilities().iter().all(|p| *p > 0.0));
    }
}

#[test]
fn rank2_family_is_never_quasi_separable() {
    for p1 in grid() {
        let rho = rank2_state(p1).unwrap();
        let fc = classify_family(&rho, DEFAULT_TOL);
        assert!(matches!(fc, FamilyClass::Case1Rank2(_)), "p1 = {p1}: {fc}");
        assert_eq!(verdict(&fc).unwrap(), Verdict::NonQuasiSeparable);
        assert!(separable_witness(&rho, &fc).unwrap().is_none());
    }
}

#[test]
fn rank2_reweightings_stay_entangled() {
    let mut r = rng(20);
    let mix = rank2_mixture(0.5).unwrap();
    for _ in 0..10_000 {
        let q: f64 = r.gen_range(f64::EPSILON..1.0);
        let moved = reweight(&mix, &[1.0 - q, q]).unwrap();
        let c = concurrence(&from_mixture(&moved).unwrap());
        assert!(c > 0.0, "q = {q}");
        assert!((c - q).abs() < 1e-9);
    }
}

#[test]
fn classification_survives_sub_tolerance_noise() {
    let mut r = rng(21);
    let mut states = catalogue();
    states.extend(grid().step_by(7).map(|p| rank2_state(p).unwrap()));
    for rho in states {
        let class = classify_family(&rho, DEFAULT_TOL);
        for _ in 0..20 {
            let mut noise = random_hermitian(&mut r, 4);
            let scale = noise.as_slice().iter().map(|z| z.norm()).fold(0.0, f64::max);
            noise = noise.scale_real(0.99 * DEFAULT_TOL / 10.0 / scale);
            // keep the trace fixed so only the entries move
            let shift = noise.trace().re / 4.0;
            let noise = &noise - &CMatrix::identity(4).scale_real(shift);
            let perturbed = DensityMatrix::new(rho.matrix() + &noise);
            let Ok(perturbed) = perturbed else { continue };
            let got = classify_family(&perturbed, DEFAULT_TOL);
            assert_eq!(got.name(), class.name());
        }
    }
}

#[test]
fn gates_preserve_spectrum() {
    let mut r = rng(22);
    for _ in 0..50 {
        let rho = random_density(&mut r);
        let spectrum = rho.eigenvalues();
        for moved in [unilateral_not(&rho), sz_rotation(&rho)] {
            let s = moved.eigenvalues();
            assert!(spectrum.iter().zip(&s).all(|(a, b)| (a - b).abs() < 1e-10));
            assert!((moved.matrix().trace().re - 1.0).abs() < 1e-10);
        }
        let joint = rho.matrix().tensor(random_density(&mut r).matrix()).unwrap();
        let after = bilateral_cnot(&joint).unwrap();
        let (e0, e1) = (hermitian_eigen(&joint).unwrap().values, hermitian_eigen(&after).unwrap().values);
        assert!(e0.iter().zip(&e1).all(|(a, b)| (a - b).abs() < 1e-10));
        assert!(after.max_asymmetry().0 < 1e-10);
    }
}

#[test]
fn outcome_probabilities_sum_to_one() {
    let mut r = rng(23);
    for _ in 0..100 {
        let joint = random_density(&mut r).matrix().tensor(random_density(&mut r).matrix()).unwrap();
        let branches = measure_ancilla(&bilateral_cnot(&joint).unwrap()).unwrap();
        let total: f64 = branches.iter().map(|b| b.prob).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}

#[test]
fn rank2_simulation_matches_prediction() {
    for p1 in grid() {
        let rho = rank2_state(p1).unwrap();
        for policy in [Policy::StrictPM, Policy::BothPMMP] {
            let sim = run_protocol(&rho, &rho, &ProtocolConfig::source_not(policy)).unwrap();
            let (prob, c) = predicted_rank2(p1, policy);
            assert!((sim.accepted_prob - prob).abs() <= 1e-10, "{policy:?} p1 = {p1}");
            assert!((sim.distilled_concurrence - c).abs() <= 1e-10, "{policy:?} p1 = {p1}");
        }
    }
}

#[test]
fn both_policy_gains_exactly_above_one_half() {
    for p1 in grid().filter(|p| (p - 0.5).abs() > 1e-10) {
        let rho = rank2_state(p1).unwrap();
        let sim = run_protocol(&rho, &rho, &ProtocolConfig::source_not(Policy::BothPMMP)).unwrap();
        assert_eq!(sim.distilled_concurrence > p1, p1 > 0.5, "p1 = {p1}");
    }
}

#[test]
fn strict_outcome_is_psi_plus() {
    let rho = rank2_state(0.37).unwrap();
    let sim = run_protocol(&rho, &rho, &ProtocolConfig::source_not(Policy::StrictPM)).unwrap();
    let kept = &sim.conditional_sources[&Outcome::PM];
    assert!(kept.max_abs_diff(&BellState::PsiPlus.projector()) < 1e-12);
}

proptest! {
    #[test]
    fn rank2_reweighting_concurrence_is_the_new_weight(p1 in 0.01f64..0.99, q in 0.001f64..0.999) {
        let moved = reweight(&rank2_mixture(p1).unwrap(), &[1.0 - q, q]).unwrap();
        prop_assert!((concurrence(&from_mixture(&moved).unwrap()) - q).abs() < 1e-9);
    }

    #[test]
    fn case1_rank3_always_has_a_witness(d in -0.49f64..0.49) {
        let rho = nondiagonal_state(NonDiagonalParams::new(1.0, 0.5, 0.5, d)).unwrap();
        let fc = classify_family(&rho, DEFAULT_TOL);
        prop_assert_eq!(fc.name(), "Case1Rank3");
        prop_assert_eq!(verdict(&fc).unwrap(), Verdict::QuasiSeparable);
        let w = separable_witness(&rho, &fc).unwrap().unwrap();
        prop_assert!(ppt_is_separable(&from_mixture(&w).unwrap()));
    }
}
