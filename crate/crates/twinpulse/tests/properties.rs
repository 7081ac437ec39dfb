//! Invariant and property tests: algebraic identities of the propagator
//! layer and structural guarantees of the sequence builders.

use proptest::prelude::*;

use twinpulse::analysis::{
    analytic_bandwidth, numeric_bandwidth, sequence_propagator, EpsGrid,
};
use twinpulse::sequence::{
    build_twin, phases_type1, phases_type23, CompositeSequence, Family,
};
use twinpulse::su2::{resonant_propagator, PulseArea, Su2Matrix};

fn entry_distance(u: &Su2Matrix, v: &Su2Matrix) -> f64 {
    ((u.a - v.a).norm().powi(2) + (u.b - v.b).norm().powi(2)).sqrt()
}

fn any_area() -> impl Strategy<Value = PulseArea> {
    prop_oneof![
        Just(PulseArea::D),
        Just(PulseArea::A),
        Just(PulseArea::B),
        Just(PulseArea::C),
    ]
}

proptest! {
    #[test]
    fn unitarity_survives_long_products(
        pulses in prop::collection::vec((any_area(), -1.0..1.0f64, 0.0..std::f64::consts::TAU), 1..100)
    ) {
        let mut u = Su2Matrix::identity();
        for (area, eps, phi) in pulses {
            u = resonant_propagator(area, eps).phase_shifted(phi).compose(&u);
        }
        prop_assert!(u.unitarity_defect() <= 1e-12);
    }

    #[test]
    fn phase_shifts_add(
        eps in -1.0..1.0f64,
        phi1 in -10.0..10.0f64,
        phi2 in -10.0..10.0f64,
    ) {
        let u = resonant_propagator(PulseArea::B, eps);
        let lhs = u.phase_shifted(phi1).phase_shifted(phi2);
        let rhs = u.phase_shifted(phi1 + phi2);
        prop_assert!(entry_distance(&lhs, &rhs) < 1e-13);
    }

    #[test]
    fn probability_ignores_phase(
        area in any_area(),
        eps in -1.0..1.0f64,
        phi in 0.0..std::f64::consts::TAU,
    ) {
        let u = resonant_propagator(area, eps);
        let p0 = u.transition_probability();
        let p1 = u.phase_shifted(phi).transition_probability();
        prop_assert!((p0 - p1).abs() < 1e-15);
    }

    #[test]
    fn global_phase_test_accepts_sign_flips(
        eps in -1.0..1.0f64,
        phi in 0.0..std::f64::consts::TAU,
    ) {
        let u = resonant_propagator(PulseArea::A, eps).phase_shifted(phi);
        let flipped = Su2Matrix::new(-u.a, -u.b);
        prop_assert!(u.equivalent_up_to_global_phase(&flipped, 1e-12));
    }
}

/// Merging rule behind the twin seams: two equal-phase pulses compose to
/// the double-area pulse, checked on a 64-point phase grid crossed with a
/// 101-point ε grid.
#[test]
fn adjacent_equal_pulses_merge() {
    for (half, full) in [(PulseArea::A, PulseArea::B), (PulseArea::B, PulseArea::C)] {
        for i in 0..64 {
            let phi = std::f64::consts::TAU * i as f64 / 64.0;
            for j in 0..=100 {
                let eps = -1.0 + 0.02 * j as f64;
                let x = resonant_propagator(half, eps).phase_shifted(phi);
                let merged = resonant_propagator(full, eps).phase_shifted(phi);
                assert!(
                    entry_distance(&x.compose(&x), &merged) < 1e-13,
                    "{half} at φ={phi}, ε={eps}"
                );
            }
        }
    }
}

/// The half-sequence phases reappear unchanged in the built twins.
#[test]
fn built_twins_carry_the_formula_phases() {
    for n in 2..=20u32 {
        let t1 = build_twin(Family::Type1, n).unwrap();
        for (k, phase) in phases_type1(n).unwrap().into_iter().enumerate() {
            assert_eq!(t1.pulses()[k].phase, phase);
        }
        let t2 = build_twin(Family::Type2, n).unwrap();
        let ph = phases_type23(n).unwrap();
        for (k, &phase) in ph.iter().enumerate() {
            assert_eq!(t2.pulses()[k].phase, phase);
        }
        // type 3 is the twin of the reversed type-2 half: same phases,
        // traversed from the other end, all areas B
        let t3 = build_twin(Family::Type3, n).unwrap();
        for (k, pulse) in t3.pulses().iter().enumerate().take(n as usize) {
            assert_eq!(pulse.phase, ph[n as usize - 1 - k]);
            assert_eq!(pulse.area, PulseArea::B);
        }
    }
}

/// Types 2 and 3 share one excitation profile.
#[test]
fn type2_and_type3_profiles_coincide() {
    let grid = EpsGrid::uniform(-1.0, 1.0, 201).unwrap();
    for n in [2u32, 3, 7, 14, 20] {
        let t2 = build_twin(Family::Type2, n).unwrap();
        let t3 = build_twin(Family::Type3, n).unwrap();
        for e in grid.points() {
            let p2 = sequence_propagator(&t2, e).transition_probability();
            let p3 = sequence_propagator(&t3, e).transition_probability();
            assert!((p2 - p3).abs() < 1e-12, "N={n}, ε={e}: {p2} vs {p3}");
        }
    }
}

/// Closed-form bandwidth inversion agrees with blind bisection.
#[test]
fn bandwidth_routes_agree() {
    for (family, n, threshold) in [
        (Family::Type1, 3, 1e-4),
        (Family::Type1, 10, 1e-4),
        (Family::Type2, 4, 1e-6),
        (Family::Type3, 5, 1e-3),
    ] {
        let closed = analytic_bandwidth(family, n, threshold).unwrap();
        let numeric =
            numeric_bandwidth(&build_twin(family, n).unwrap(), threshold).unwrap();
        assert!(
            (closed - numeric).abs() < 1e-9,
            "{family} N={n} thr={threshold}: closed {closed} vs numeric {numeric}"
        );
    }
}

/// Empty custom sequences act as the identity under the propagator map.
#[test]
fn empty_sequence_propagates_to_identity() {
    let seq = CompositeSequence::custom("empty", vec![]);
    let u = sequence_propagator(&seq, 0.37);
    assert!(entry_distance(&u, &Su2Matrix::identity()) == 0.0);
}
