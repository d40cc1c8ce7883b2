#![allow(dead_code)]

use balancelab::statekit::{BasisString, State};
use num_complex::Complex64;
use proptest::prelude::*;

/// Nonzero states on `qubits` qubits with up to `max_terms` terms.
pub fn arb_state(qubits: std::ops::RangeInclusive<usize>, max_terms: usize) -> impl Strategy<Value = State> {
    qubits.prop_flat_map(move |q| {
        let n = 1usize << q;
        proptest::collection::btree_map(0..n as u64, (-4i32..=4, -4i32..=4), 1..=max_terms.min(n)).prop_filter_map(
            "zero amplitudes only",
            move |m| {
                let terms: Vec<(BasisString, Complex64)> = m
                    .into_iter()
                    .filter(|(_, (re, im))| *re != 0 || *im != 0)
                    .map(|(mask, (re, im))| {
                        (
                            BasisString::from_mask(mask, q),
                            Complex64::new(re as f64 / 2.0, im as f64 / 4.0),
                        )
                    })
                    .collect();
                if terms.is_empty() {
                    None
                } else {
                    Some(State::from_terms(q, terms).expect("valid terms"))
                }
            },
        )
    })
}

/// Generic states with generic float amplitudes.
pub fn arb_generic_state(q: usize) -> impl Strategy<Value = State> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << q).prop_map(move |amps| {
        let terms = amps
            .into_iter()
            .enumerate()
            .map(|(i, (re, im))| (BasisString::from_mask(i as u64, q), Complex64::new(re + 0.01, im)));
        State::from_terms(q, terms).expect("valid terms")
    })
}

pub fn arb_perm(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<usize>>()).prop_shuffle()
}
