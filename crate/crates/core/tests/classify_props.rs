mod common;

use balancelab::balance::{BalanceClass, PartKind};
use balancelab::classify::{self, Registry};
use balancelab::invariants;
use balancelab::statekit::{self, parse_state, BasisString, LocalOperator};
use balancelab::verify::{self, Group};
use common::{arb_generic_state, arb_state};
use proptest::prelude::*;

proptest! {
    #[test]
    fn classify3_bits_match_values(s in arb_state(3..=3, 8)) {
        let t = classify::classify3(&s).unwrap();
        let unit = statekit::normalize(&s).unwrap();
        let tau3 = invariants::tau3(&unit).unwrap().value;
        let tau31 = invariants::tau31(&unit).unwrap().value;
        prop_assert_eq!(t.bits[0], tau3.norm() > invariants::DETECTION_EPS);
        prop_assert_eq!(t.bits[1], tau31.norm() > invariants::DETECTION_EPS);
        prop_assert!(t.label.is_some());
        prop_assert_eq!(t.registry, ["tau3", "tau31"]);
    }

    #[test]
    fn classify3_is_su_invariant_on_generic_states(s in arb_generic_state(3), seed in any::<u64>()) {
        let base = classify::classify3(&s).unwrap();
        let ops = verify::random_local(3, Group::SpecialUnitary, seed);
        let moved = statekit::apply_all(&s, &ops).unwrap();
        prop_assert_eq!(classify::classify3(&moved).unwrap().bits, base.bits);
    }

    #[test]
    fn structure_invariant_under_permutation_and_sigma_x(s in arb_state(2..=4, 8), k in 0usize..4, shift in 0usize..4) {
        let q = s.qubits();
        let base = classify::classify_structure(&s).unwrap();
        let mut perm: Vec<usize> = (0..q).collect();
        perm.rotate_left(shift % q);
        let moved = s.permute_qubits(&perm).unwrap();
        let moved = statekit::apply_local(&moved, &LocalOperator::pauli_x(k % q)).unwrap();
        let r = classify::classify_structure(&moved).unwrap();
        prop_assert_eq!(r.class, base.class);
        prop_assert_eq!(r.irreducible, base.irreducible);
        prop_assert_eq!(r.length, base.length);
        prop_assert_eq!(r.z_sum, base.z_sum);
        prop_assert_eq!(r.forced_zeros.len(), base.forced_zeros.len());
        prop_assert_eq!(r.phase, base.phase);
        prop_assert_eq!(r.minimal_parts, base.minimal_parts);
        let sorted = |z: Option<balancelab::balance::ZVector>| z.map(|z| { let mut w = z.weights().to_vec(); w.sort(); w });
        prop_assert_eq!(sorted(r.z), sorted(base.z));
    }
}

#[test]
fn hadamard_w_prime_structure() {
    let wp = parse_state("|000> + |100> + |010> + |001>").unwrap();
    let s = statekit::apply_local(&wp, &LocalOperator::hadamard(0)).unwrap();
    let r = classify::classify_structure(&s).unwrap();
    assert_eq!(r.class, BalanceClass::PartlyBalanced);
    assert!(!r.irreducible);
    assert_eq!(r.length, 5);
    assert_eq!(r.forced_zeros, vec!["000".parse::<BasisString>().unwrap()]);
    assert_eq!(r.parts_kind, PartKind::A);
    assert_eq!(r.minimal_parts, Some(2));
    assert!(r.phase.is_none());
}

#[test]
fn full_support_is_reducibly_c_balanced() {
    let s = parse_state("0.3|000> + 0.1|001> - 0.2|010> + 0.5i|011> + 0.7|100> + |101> - 0.4|110> + 0.6|111>").unwrap();
    let r = classify::classify_structure(&s).unwrap();
    assert_eq!(r.class, BalanceClass::CBalanced);
    assert!(!r.irreducible);
    assert_eq!(r.length, 8);
    assert!(r.z.is_none());
}

#[test]
fn four_qubit_scheme_accepts_external_evaluators() {
    let r = Registry::new(Some(4))
        .register("det01", |s| Ok(invariants::matricization_det(s, &[0, 1])?.value))
        .register("det02", |s| Ok(invariants::matricization_det(s, &[0, 2])?.value))
        .label(&[true, true], "both");
    let cluster = parse_state("|1111> + |1100> + |0010> + |0001>").unwrap();
    let t = r.classify(&cluster).unwrap();
    assert_eq!(t.bits.len(), 2);
    assert_eq!(t.registry, ["det01", "det02"]);
    assert!(r.classify(&parse_state("|000>").unwrap()).is_err());
}
