use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{BasisString, State};
use crate::{Error, Result};

/// Wire form of a [`State`]: `{"qubits": q, "terms": [{"basis", "re", "im"}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateJson {
    pub qubits: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub basis: String,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl From<&State> for StateJson {
    fn from(s: &State) -> Self {
        Self {
            qubits: s.qubits(),
            terms: s
                .terms()
                .map(|(b, a)| TermJson {
                    basis: b.to_string(),
                    re: a.re,
                    im: a.im,
                })
                .collect(),
        }
    }
}

impl TryFrom<StateJson> for State {
    type Error = Error;

    fn try_from(j: StateJson) -> Result<State> {
        let mut terms = Vec::with_capacity(j.terms.len());
        for t in j.terms {
            let b: BasisString = t
                .basis
                .parse()
                .map_err(|e| Error::Json(format!("basis {:?}: {e}", t.basis)))?;
            if b.len() != j.qubits {
                return Err(Error::Json(format!(
                    "basis {:?} has {} bits but qubits = {}",
                    t.basis,
                    b.len(),
                    j.qubits
                )));
            }
            if !t.re.is_finite() || !t.im.is_finite() {
                return Err(Error::Json(format!("non-finite amplitude on {:?}", t.basis)));
            }
            terms.push((b, Complex64::new(t.re, t.im)));
        }
        State::from_terms(j.qubits, terms)
    }
}

impl State {
    pub fn to_json(&self) -> StateJson {
        StateJson::from(self)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("state JSON is always serializable")
    }

    pub fn from_json_str(text: &str) -> Result<State> {
        let j: StateJson = serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
        State::try_from(j)
    }
}

impl Serialize for State {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for State {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let j = StateJson::deserialize(deserializer)?;
        State::try_from(j).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statekit::parse_state;

    #[test]
    fn json_round_trip() {
        let s = parse_state("1/2*|000> - i|111> + (0.25+0.5i)|011>").unwrap();
        let text = s.to_json_string();
        assert_eq!(State::from_json_str(&text).unwrap(), s);
    }

    #[test]
    fn json_rejects_bad_basis() {
        let err = State::from_json_str(r#"{"qubits": 2, "terms": [{"basis": "010", "re": 1.0, "im": 0.0}]}"#);
        assert!(matches!(err, Err(Error::Json(_))));
        let err = State::from_json_str(r#"{"qubits": 2, "terms": [{"basis": "0a", "re": 1.0}]}"#);
        assert!(matches!(err, Err(Error::Json(_))));
    }
}
