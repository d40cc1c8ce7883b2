//! Sparse pure states over the computational basis.
//!
//! A [`State`] maps length-`q` bit strings to complex amplitudes. Terms are
//! kept in lexicographic order of their [`BasisString`], and that order is
//! the column order of every A-matrix built from the state. Amplitudes with
//! modulus below the support threshold are dropped on construction so the
//! combinatorial analyses only ever see the pruned support.

mod exact;
mod json;
mod parse;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use exact::{ExactState, GaussianRational};
pub use json::{StateJson, TermJson};
pub use parse::{format_state, parse_state, parse_state_exact, ParseError, ParseErrorKind};

/// Default support threshold ε_support.
pub const SUPPORT_EPS: f64 = 1e-12;

/// Tolerance used when validating the declared kind of a [`LocalOperator`].
pub const OPERATOR_TOL: f64 = 1e-12;

/// A computational basis label `b₁b₂…b_q`. Bit `k` is qubit `k`, counted from
/// the left.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisString {
    bits: Vec<u8>,
}

impl BasisString {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::Precondition("basis string must have at least one qubit".into()));
        }
        if let Some(bad) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::Precondition(format!("basis digit {bad} is not binary")));
        }
        Ok(Self { bits })
    }

    /// Builds a basis string from the low `qubits` bits of `mask`, most
    /// significant bit first.
    pub fn from_mask(mask: u64, qubits: usize) -> Self {
        let bits = (0..qubits).map(|k| ((mask >> (qubits - 1 - k)) & 1) as u8).collect();
        Self { bits }
    }

    /// Inverse of [`BasisString::from_mask`]; only meaningful for `q ≤ 64`.
    pub fn to_mask(&self) -> u64 {
        self.bits.iter().fold(0, |acc, &b| (acc << 1) | b as u64)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn bit(&self, k: usize) -> u8 {
        self.bits[k]
    }

    /// The A-matrix entry for qubit `k`: `+1` for a `1` bit, `-1` for a `0` bit.
    pub fn sign(&self, k: usize) -> i64 {
        if self.bits[k] == 1 {
            1
        } else {
            -1
        }
    }

    /// Sum of the ±1 entries, i.e. `#ones − #zeros`.
    pub fn spin_sum(&self) -> i64 {
        (0..self.len()).map(|k| self.sign(k)).sum()
    }

    pub fn complement(&self) -> Self {
        Self {
            bits: self.bits.iter().map(|b| 1 - b).collect(),
        }
    }

    pub fn with_bit_flipped(&self, k: usize) -> Self {
        let mut bits = self.bits.clone();
        bits[k] ^= 1;
        Self { bits }
    }

    pub fn with_bit(&self, k: usize, value: u8) -> Self {
        let mut bits = self.bits.clone();
        bits[k] = value;
        Self { bits }
    }

    /// Reorders qubits so that new qubit `i` is old qubit `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            bits: perm.iter().map(|&p| self.bits[p]).collect(),
        }
    }

    fn concat(&self, other: &Self) -> Self {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        Self { bits }
    }
}

impl fmt::Display for BasisString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for BasisString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{self}>")
    }
}

impl FromStr for BasisString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::Precondition(format!("basis digit {other:?} is not binary"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::new(bits)
    }
}

impl Serialize for BasisString {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BasisString {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A pure `q`-qubit state stored sparsely over its support.
///
/// The zero state (no stored terms) is representable so that operations can
/// report it, but every analysis that needs a support rejects it.
#[derive(Clone, PartialEq)]
pub struct State {
    qubits: usize,
    terms: BTreeMap<BasisString, Complex64>,
    support_eps: f64,
}

impl State {
    pub fn zero(qubits: usize) -> Self {
        Self {
            qubits,
            terms: BTreeMap::new(),
            support_eps: SUPPORT_EPS,
        }
    }

    pub fn from_terms<I>(qubits: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BasisString, Complex64)>,
    {
        Self::from_terms_with_threshold(qubits, terms, SUPPORT_EPS)
    }

    /// Accumulates amplitudes per basis string and prunes those below `eps`.
    pub fn from_terms_with_threshold<I>(qubits: usize, terms: I, eps: f64) -> Result<Self>
    where
        I: IntoIterator<Item = (BasisString, Complex64)>,
    {
        if qubits == 0 {
            return Err(Error::Precondition("a state needs at least one qubit".into()));
        }
        let mut acc: BTreeMap<BasisString, Complex64> = BTreeMap::new();
        for (basis, amp) in terms {
            if basis.len() != qubits {
                return Err(Error::QubitCount {
                    expected: qubits,
                    found: basis.len(),
                });
            }
            *acc.entry(basis).or_default() += amp;
        }
        acc.retain(|_, a| a.norm() >= eps);
        Ok(Self {
            qubits,
            terms: acc,
            support_eps: eps,
        })
    }

    /// Convenience constructor from `(bits, amplitude)` pairs; panics on
    /// malformed bit strings, so it is meant for fixtures and tests.
    pub fn from_pairs(pairs: &[(&str, Complex64)]) -> Self {
        let qubits = pairs.first().map(|(b, _)| b.len()).expect("at least one term");
        let terms = pairs
            .iter()
            .map(|(b, a)| (b.parse::<BasisString>().expect("binary basis string"), *a));
        Self::from_terms(qubits, terms).expect("consistent basis strings")
    }

    /// Same state with a different support threshold, re-pruned.
    pub fn with_support_eps(&self, eps: f64) -> Self {
        let mut terms = self.terms.clone();
        terms.retain(|_, a| a.norm() >= eps);
        Self {
            qubits: self.qubits,
            terms,
            support_eps: eps,
        }
    }

    /// Builds a state with this state's threshold from raw terms.
    fn rebuild(&self, terms: impl IntoIterator<Item = (BasisString, Complex64)>) -> Self {
        Self::from_terms_with_threshold(self.qubits, terms, self.support_eps).expect("terms derived from a valid state")
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    /// Number of stored terms, the state's length `L`.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn support_eps(&self) -> f64 {
        self.support_eps
    }

    pub fn amplitude(&self, basis: &BasisString) -> Complex64 {
        self.terms.get(basis).copied().unwrap_or_default()
    }

    /// Amplitude by bit string; zero if absent or malformed.
    pub fn amp(&self, bits: &str) -> Complex64 {
        bits.parse::<BasisString>()
            .map(|b| self.amplitude(&b))
            .unwrap_or_default()
    }

    pub fn contains(&self, basis: &BasisString) -> bool {
        self.terms.contains_key(basis)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisString, &Complex64)> + '_ {
        self.terms.iter()
    }

    /// Support in canonical (lexicographic) order.
    pub fn basis(&self) -> Vec<BasisString> {
        self.terms.keys().cloned().collect()
    }

    pub fn amplitudes(&self) -> Vec<Complex64> {
        self.terms.values().copied().collect()
    }

    pub fn index_of(&self, basis: &BasisString) -> Option<usize> {
        self.terms.keys().position(|b| b == basis)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        self.rebuild(self.terms.iter().map(|(b, a)| (b.clone(), a * factor)))
    }

    /// The sub-state on the given term indices (canonical order).
    pub fn restrict(&self, indices: &[usize]) -> Result<Self> {
        let mut out = Vec::with_capacity(indices.len());
        for &i in indices {
            let (b, a) =
                self.terms.iter().nth(i).ok_or_else(|| {
                    Error::InvalidFlip(format!("term index {i} out of range for length {}", self.len()))
                })?;
            out.push((b.clone(), *a));
        }
        Ok(self.rebuild(out))
    }

    pub fn add(&self, other: &State) -> Result<Self> {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &State) -> Result<Self> {
        self.combine(other, -1.0)
    }

    fn combine(&self, other: &State, sign: f64) -> Result<Self> {
        if other.qubits != self.qubits {
            return Err(Error::QubitCount {
                expected: self.qubits,
                found: other.qubits,
            });
        }
        let terms = self
            .terms
            .iter()
            .map(|(b, a)| (b.clone(), *a))
            .chain(other.terms.iter().map(|(b, a)| (b.clone(), a * sign)));
        Ok(self.rebuild(terms))
    }

    /// Relabels qubits so that new qubit `i` is old qubit `perm[i]`.
    pub fn permute_qubits(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.qubits];
        if perm.len() != self.qubits
            || perm
                .iter()
                .any(|&p| p >= self.qubits || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::Precondition(format!(
                "{perm:?} is not a permutation of {} qubits",
                self.qubits
            )));
        }
        Ok(self.rebuild(self.terms.iter().map(|(b, a)| (b.permuted(perm), *a))))
    }

    /// Largest amplitude difference over the union of both supports.
    pub fn max_abs_diff(&self, other: &State) -> f64 {
        let left = self.terms.iter().map(|(b, a)| (a - other.amplitude(b)).norm());
        let right = other
            .terms
            .iter()
            .filter(|(b, _)| !self.terms.contains_key(*b))
            .map(|(_, a)| a.norm());
        left.chain(right).fold(0.0, f64::max)
    }

    /// Inner product ⟨self|other⟩.
    pub fn inner(&self, other: &State) -> Complex64 {
        self.terms.iter().map(|(b, a)| a.conj() * other.amplitude(b)).sum()
    }
}

impl fmt::Debug for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "State[{}]({})", self.qubits, format_state(self))
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_state(self))
    }
}

/// Scales `s` to unit 2-norm by a positive real factor.
pub fn normalize(s: &State) -> Result<State> {
    let norm = s.norm();
    if s.is_zero() || norm == 0.0 {
        return Err(Error::ZeroState);
    }
    Ok(s.scale(Complex64::new(1.0 / norm, 0.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    Unitary,
    SpecialLinear,
    General,
}

pub type Matrix2 = [[Complex64; 2]; 2];

/// A 2×2 operator acting on one tensor factor.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalOperator {
    qubit: usize,
    matrix: Matrix2,
    kind: OperatorKind,
}

const fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl LocalOperator {
    /// Validates the declared kind against the matrix within [`OPERATOR_TOL`].
    pub fn new(qubit: usize, matrix: Matrix2, kind: OperatorKind) -> Result<Self> {
        let op = Self { qubit, matrix, kind };
        match kind {
            OperatorKind::Unitary if op.unitarity_defect() > OPERATOR_TOL => Err(Error::InvalidOperator(format!(
                "‖U†U − 1‖ = {:e} exceeds {OPERATOR_TOL:e}",
                op.unitarity_defect()
            ))),
            OperatorKind::SpecialLinear if (op.determinant() - 1.0).norm() > OPERATOR_TOL => Err(
                Error::InvalidOperator(format!("determinant {} is not 1", op.determinant())),
            ),
            _ => Ok(op),
        }
    }

    pub fn general(qubit: usize, matrix: Matrix2) -> Self {
        Self {
            qubit,
            matrix,
            kind: OperatorKind::General,
        }
    }

    pub fn identity(qubit: usize) -> Self {
        Self {
            qubit,
            matrix: [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]],
            kind: OperatorKind::Unitary,
        }
    }

    /// The Hadamard gate scaled to be unitary (determinant −1).
    pub fn hadamard(qubit: usize) -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            qubit,
            matrix: [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]],
            kind: OperatorKind::Unitary,
        }
    }

    /// σ_x, which negates row `qubit` of the A-matrix.
    pub fn pauli_x(qubit: usize) -> Self {
        Self {
            qubit,
            matrix: [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
            kind: OperatorKind::Unitary,
        }
    }

    /// The local filter `diag(t⁻¹, t)`.
    pub fn filter(qubit: usize, t: Complex64) -> Self {
        Self {
            qubit,
            matrix: [[t.inv(), c(0.0, 0.0)], [c(0.0, 0.0), t]],
            kind: OperatorKind::SpecialLinear,
        }
    }

    pub fn qubit(&self) -> usize {
        self.qubit
    }

    pub fn matrix(&self) -> &Matrix2 {
        &self.matrix
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn on_qubit(&self, qubit: usize) -> Self {
        Self { qubit, ..self.clone() }
    }

    pub fn determinant(&self) -> Complex64 {
        let m = &self.matrix;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    /// Max-entry norm of `U†U − 1`.
    pub fn unitarity_defect(&self) -> f64 {
        let m = &self.matrix;
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = Complex64::default();
                for row in m {
                    acc += row[i].conj() * row[j];
                }
                if i == j {
                    acc -= 1.0;
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }

    /// The diagonal part `diag(u₀₀, u₁₁)`.
    pub fn diagonal_part(&self) -> Self {
        let m = &self.matrix;
        Self::general(self.qubit, [[m[0][0], c(0.0, 0.0)], [c(0.0, 0.0), m[1][1]]])
    }

    /// The off-diagonal part.
    pub fn off_diagonal_part(&self) -> Self {
        let m = &self.matrix;
        Self::general(self.qubit, [[c(0.0, 0.0), m[0][1]], [m[1][0], c(0.0, 0.0)]])
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().flatten().all(|z| z.norm() == 0.0)
    }
}

/// Applies `op` to its tensor factor of `s`, pruning at the state's threshold.
pub fn apply_local(s: &State, op: &LocalOperator) -> Result<State> {
    let k = op.qubit;
    if k >= s.qubits {
        return Err(Error::QubitIndex {
            index: k,
            qubits: s.qubits,
        });
    }
    let m = &op.matrix;
    let mut out = Vec::with_capacity(2 * s.len());
    for (b, a) in s.terms() {
        let col = b.bit(k) as usize;
        for (bit, row) in m.iter().enumerate() {
            let entry = row[col];
            if entry.norm() != 0.0 {
                out.push((b.with_bit(k, bit as u8), entry * a));
            }
        }
    }
    Ok(s.rebuild(out))
}

/// Applies each operator in turn.
pub fn apply_all(s: &State, ops: &[LocalOperator]) -> Result<State> {
    ops.iter().try_fold(s.clone(), |acc, op| apply_local(&acc, op))
}

/// Tensor product of factors, leftmost factor on the lowest qubit indices.
pub fn product_state(factors: &[State]) -> Result<State> {
    let (first, rest) = factors.split_first().ok_or(Error::EmptyFactors)?;
    if factors.iter().any(State::is_zero) {
        return Err(Error::ZeroState);
    }
    let mut acc = first.clone();
    for f in rest {
        let terms: Vec<_> = acc
            .terms()
            .flat_map(|(b1, a1)| f.terms().map(move |(b2, a2)| (b1.concat(b2), a1 * a2)))
            .collect();
        acc = State::from_terms_with_threshold(acc.qubits + f.qubits, terms, acc.support_eps)?;
    }
    Ok(acc)
}
