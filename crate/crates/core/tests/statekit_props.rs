mod common;

use balancelab::statekit::{self, format_state, parse_state, LocalOperator, State};
use balancelab::verify;
use common::{arb_perm, arb_state};
use num_complex::Complex64;
use proptest::prelude::*;

proptest! {
    #[test]
    fn format_parse_round_trip(s in arb_state(1..=5, 10)) {
        let text = format_state(&s);
        let back = parse_state(&text).unwrap();
        prop_assert_eq!(back.basis(), s.basis());
        prop_assert!(back.max_abs_diff(&s) < 1e-12, "{} vs {}", text, format_state(&back));
    }

    #[test]
    fn json_round_trip(s in arb_state(1..=5, 10)) {
        let back = State::from_json_str(&s.to_json_string()).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn normalize_is_idempotent(s in arb_state(1..=5, 10)) {
        let once = statekit::normalize(&s).unwrap();
        prop_assert!((once.norm() - 1.0).abs() < 1e-12);
        prop_assert!(statekit::normalize(&once).unwrap().max_abs_diff(&once) < 1e-14);
    }

    #[test]
    fn local_operators_on_distinct_qubits_commute(s in arb_state(2..=4, 8), seed in any::<u64>()) {
        let q = s.qubits();
        let ops = verify::random_local(q, verify::Group::SpecialLinear, seed);
        let (a, b) = (&ops[0], &ops[q - 1]);
        let ab = statekit::apply_local(&statekit::apply_local(&s, a).unwrap(), b).unwrap();
        let ba = statekit::apply_local(&statekit::apply_local(&s, b).unwrap(), a).unwrap();
        prop_assert!(ab.max_abs_diff(&ba) < 1e-10);
    }

    #[test]
    fn unitary_orbit_preserves_norm(s in arb_state(1..=5, 10), seed in any::<u64>()) {
        let ops = verify::random_local(s.qubits(), verify::Group::SpecialUnitary, seed);
        let moved = statekit::apply_all(&s, &ops).unwrap();
        prop_assert!((moved.norm() - s.norm()).abs() < 1e-12 * s.norm().max(1.0));
    }

    #[test]
    fn permuting_qubits_inverts(s in arb_state(2..=5, 8), perm in (2usize..=5).prop_flat_map(arb_perm)) {
        prop_assume!(perm.len() == s.qubits());
        let mut inv = vec![0; perm.len()];
        for (i, &p) in perm.iter().enumerate() {
            inv[p] = i;
        }
        let back = s.permute_qubits(&perm).unwrap().permute_qubits(&inv).unwrap();
        prop_assert_eq!(back, s);
    }
}

#[test]
fn hadamard_squares_to_identity() {
    let s = parse_state("|010> + 2i|111>").unwrap();
    let h = LocalOperator::hadamard(1);
    let back = statekit::apply_local(&statekit::apply_local(&s, &h).unwrap(), &h).unwrap();
    assert!(back.max_abs_diff(&s) < 1e-15);
}

#[test]
fn product_of_bell_and_qubit() {
    let bell = parse_state("|00> + |11>").unwrap();
    let one = parse_state("i|1>").unwrap();
    let p = statekit::product_state(&[bell, one]).unwrap();
    assert_eq!(p.amp("001"), Complex64::new(0.0, 1.0));
    assert_eq!(p.amp("111"), Complex64::new(0.0, 1.0));
    assert_eq!(p.len(), 2);
}

#[test]
fn parse_errors_carry_positions() {
    for (text, pos) in [("|0> + |12>", 8), ("3*", 2), ("|01> + |1>", 7)] {
        let e = parse_state(text).unwrap_err();
        assert_eq!(e.position, pos, "{text}: {e}");
    }
}
