//! Detection-tuple classification and structural balance records.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::balance::{self, BalanceClass, PartKind, ZVector, PARTS_MAX_LEN};
use crate::invariants::{self, DETECTION_EPS};
use crate::statekit::{self, BasisString, State};
use crate::topo::{self, PhaseSet};
use crate::{Error, Result};

pub type Evaluator = Arc<dyn Fn(&State) -> Result<Complex64> + Send + Sync>;

/// An ordered list of named invariants with optional labels for bit patterns.
///
/// Inputs are normalized before evaluation, so the detection threshold is
/// applied on unit-norm states.
#[derive(Clone)]
pub struct Registry {
    qubits: Option<usize>,
    threshold: f64,
    invariants: Vec<(String, Evaluator)>,
    labels: BTreeMap<Vec<bool>, String>,
}

impl fmt::Debug for Registry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Registry")
            .field("qubits", &self.qubits)
            .field("threshold", &self.threshold)
            .field("invariants", &self.names())
            .field("labels", &self.labels)
            .finish()
    }
}

impl Registry {
    pub fn new(qubits: Option<usize>) -> Self {
        Self {
            qubits,
            threshold: DETECTION_EPS,
            invariants: Vec::new(),
            labels: BTreeMap::new(),
        }
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn register<F>(mut self, name: impl Into<String>, f: F) -> Self
    where
        F: Fn(&State) -> Result<Complex64> + Send + Sync + 'static,
    {
        self.invariants.push((name.into(), Arc::new(f)));
        self
    }

    pub fn label(mut self, bits: &[bool], name: impl Into<String>) -> Self {
        self.labels.insert(bits.to_vec(), name.into());
        self
    }

    pub fn names(&self) -> Vec<String> {
        self.invariants.iter().map(|(n, _)| n.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.invariants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.invariants.is_empty()
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn classify(&self, s: &State) -> Result<ClassTuple> {
        if let Some(q) = self.qubits {
            if s.qubits() != q {
                return Err(Error::QubitCount {
                    expected: q,
                    found: s.qubits(),
                });
            }
        }
        let unit = statekit::normalize(s)?;
        let values = self
            .invariants
            .iter()
            .map(|(_, f)| f(&unit))
            .collect::<Result<Vec<_>>>()?;
        let bits: Vec<bool> = values.iter().map(|v| v.norm() > self.threshold).collect();
        Ok(ClassTuple {
            label: self.labels.get(&bits).cloned(),
            bits,
            registry: self.names(),
            values,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassTuple {
    pub bits: Vec<bool>,
    pub registry: Vec<String>,
    pub label: Option<String>,
    /// Invariant values on the normalized input, in registry order.
    pub values: Vec<Complex64>,
}

impl ClassTuple {
    pub fn bit_string(&self) -> String {
        self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

pub const LABEL_X: &str = "X-class";
pub const LABEL_W_PRIME: &str = "W′-class";
pub const LABEL_GENERIC_GHZ: &str = "generic-GHZ-class";
pub const LABEL_NULL: &str = "null-cone/unbalanced-or-U-only";

/// The three-qubit registry `(τ3, τ31)`.
pub fn three_qubit_registry() -> Registry {
    Registry::new(Some(3))
        .register("tau3", |s| Ok(invariants::tau3(s)?.value))
        .register("tau31", |s| Ok(invariants::tau31(s)?.value))
        .label(&[true, false], LABEL_X)
        .label(&[false, true], LABEL_W_PRIME)
        .label(&[true, true], LABEL_GENERIC_GHZ)
        .label(&[false, false], LABEL_NULL)
}

pub fn classify3(s: &State) -> Result<ClassTuple> {
    three_qubit_registry().classify(s)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureRecord {
    pub class: BalanceClass,
    pub irreducible: bool,
    pub length: usize,
    pub z: Option<ZVector>,
    pub forced_zeros: Vec<BasisString>,
    pub z_sum: Option<i64>,
    /// Present only for irreducible supports with nonzero Σz.
    pub phase: Option<PhaseSet>,
    /// Minimal c-parts for c-balanced supports, minimal a-parts otherwise.
    pub parts_kind: PartKind,
    /// `None` when the support is longer than the part search allows.
    pub minimal_parts: Option<usize>,
}

pub fn classify_structure(s: &State) -> Result<StructureRecord> {
    if s.is_zero() {
        return Err(Error::ZeroState);
    }
    let a = balance::a_matrix_of(s)?;
    let r = balance::balance_report_of(&a)?;
    let parts_kind = if r.class == BalanceClass::CBalanced {
        PartKind::C
    } else {
        PartKind::A
    };
    let minimal_parts = if a.len() <= PARTS_MAX_LEN {
        Some(balance::balanced_parts(&a, parts_kind)?.len())
    } else {
        None
    };
    let phase = match (&r.z, r.irreducible) {
        (Some(z), true) if z.sum() != 0 => Some(topo::predicted_phase_set(z)),
        _ => None,
    };
    Ok(StructureRecord {
        class: r.class,
        irreducible: r.irreducible,
        length: r.length,
        z: r.z,
        forced_zeros: r.forced_zeros,
        z_sum: r.z_sum,
        phase,
        parts_kind,
        minimal_parts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(pairs: &[(&str, f64)]) -> State {
        let v: Vec<(&str, Complex64)> = pairs.iter().map(|&(b, a)| (b, Complex64::new(a, 0.0))).collect();
        State::from_pairs(&v)
    }

    #[test]
    fn three_qubit_labels() {
        let ghz = st(&[("000", 1.0), ("111", 1.0)]);
        let c = classify3(&ghz).unwrap();
        assert_eq!(c.bits, [true, false]);
        assert_eq!(c.label.as_deref(), Some(LABEL_X));
        let w = st(&[("100", 1.0), ("010", 1.0), ("001", 1.0)]);
        assert_eq!(classify3(&w).unwrap().bit_string(), "00");
        let mixed = st(&[("000", (1.0f64 / 3.0).sqrt()), ("111", (2.0f64 / 3.0).sqrt())]);
        assert_eq!(classify3(&mixed).unwrap().label.as_deref(), Some(LABEL_GENERIC_GHZ));
    }

    #[test]
    fn scale_does_not_matter() {
        let ghz = st(&[("000", 1e-4), ("111", 1e-4)]);
        assert_eq!(classify3(&ghz).unwrap().bits, [true, false]);
    }

    #[test]
    fn wrong_qubit_count() {
        let bell = st(&[("00", 1.0), ("11", 1.0)]);
        assert!(matches!(
            classify3(&bell),
            Err(Error::QubitCount { expected: 3, found: 2 })
        ));
    }

    #[test]
    fn custom_registry() {
        let r = Registry::new(None)
            .register("norm", |s| Ok(invariants::norm_invariant(s).value))
            .label(&[true], "nonzero");
        let t = r.classify(&st(&[("0101", 1.0)])).unwrap();
        assert_eq!(t.label.as_deref(), Some("nonzero"));
        assert_eq!(t.registry, ["norm"]);
    }

    #[test]
    fn cluster_structure() {
        let c = st(&[("1111", 1.0), ("1100", 1.0), ("0010", 1.0), ("0001", 1.0)]);
        let r = classify_structure(&c).unwrap();
        assert_eq!(r.class, BalanceClass::CBalanced);
        assert!(r.irreducible);
        assert_eq!(r.z.unwrap().weights(), &[1, 1, 1, 1]);
        assert_eq!(r.phase.unwrap().to_string(), "π/2");
        assert_eq!(r.minimal_parts, Some(1));
    }

    #[test]
    fn zero_state_rejected() {
        assert!(matches!(classify_structure(&State::zero(3)), Err(Error::ZeroState)));
    }
}
