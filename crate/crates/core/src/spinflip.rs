//! The partial spin flip.
//!
//! Writing `|ψ⟩ = |φ⟩ + |θ⟩`, the flip keeps `φ` and applies the universal
//! spin flip to `θ`: each term `b` (bits read as ±1) goes to the complemented
//! string with amplitude `(−i)^{b₁+…+b_q} · conj(θ_b)`. Applying it twice to
//! the same part multiplies that part by `(−1)^q`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::balance::{self, AMatrix, ZVector};
use crate::statekit::{BasisString, State};
use crate::topo::{self, PhaseSet};
use crate::{Error, Result};

/// Which part of a state is flipped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlipSpec {
    /// Column indices into the state's canonical term order.
    Terms(Vec<usize>),
    /// An explicit sub-state `θ` whose support lies inside the state's.
    Theta(State),
}

impl FlipSpec {
    pub fn terms(indices: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = indices.into_iter().collect();
        v.sort_unstable();
        FlipSpec::Terms(v)
    }

    pub fn empty() -> Self {
        FlipSpec::Terms(Vec::new())
    }

    /// The part `θ` of `s` selected by this spec.
    pub fn theta(&self, s: &State) -> Result<State> {
        match self {
            FlipSpec::Terms(idx) => {
                let mut sorted = idx.clone();
                sorted.sort_unstable();
                if sorted.windows(2).any(|w| w[0] == w[1]) {
                    return Err(Error::InvalidFlip(format!("repeated term index in {idx:?}")));
                }
                s.restrict(&sorted)
            }
            FlipSpec::Theta(theta) => {
                if theta.qubits() != s.qubits() {
                    return Err(Error::InvalidFlip(format!(
                        "theta has {} qubits, state has {}",
                        theta.qubits(),
                        s.qubits()
                    )));
                }
                if let Some((b, _)) = theta.terms().find(|(b, _)| !s.contains(b)) {
                    return Err(Error::InvalidFlip(format!("theta term |{b}> is not in the support")));
                }
                Ok(theta.clone())
            }
        }
    }

    /// Column indices of `s` touched by this spec.
    pub fn columns(&self, s: &State) -> Result<Vec<usize>> {
        let theta = self.theta(s)?;
        Ok(theta.terms().filter_map(|(b, _)| s.index_of(b)).collect())
    }
}

/// `(−i)^n` exactly.
pub fn minus_i_pow(n: i64) -> Complex64 {
    match n.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// The universal spin flip applied to every term of `theta`.
pub fn universal_flip(theta: &State) -> State {
    let terms = theta
        .terms()
        .map(|(b, a)| (b.complement(), minus_i_pow(b.spin_sum()) * a.conj()));
    State::from_terms_with_threshold(theta.qubits(), terms.collect::<Vec<_>>(), theta.support_eps())
        .expect("same qubit count")
}

/// Splits `s` into `(φ, θ)`.
pub fn split(s: &State, f: &FlipSpec) -> Result<(State, State)> {
    let theta = f.theta(s)?;
    let phi = s.sub(&theta)?;
    Ok((phi, theta))
}

pub fn flip(s: &State, f: &FlipSpec) -> Result<State> {
    let (phi, theta) = split(s, f)?;
    phi.add(&universal_flip(&theta))
}

/// Undoes a flip: `theta_tilde` is the flipped part as it appears in
/// `flipped`. Returns `φ + (−1)^q·F(θ̃)`, the original state.
pub fn unflip(flipped: &State, theta_tilde: &State) -> Result<State> {
    let spec = FlipSpec::Theta(theta_tilde.clone());
    let (phi, tt) = split(flipped, &spec)?;
    let back = universal_flip(&tt);
    let sign = if flipped.qubits().is_multiple_of(2) { 1.0 } else { -1.0 };
    phi.add(&back.scale(Complex64::new(sign, 0.0)))
}

/// Homogeneity degrees `(d₁, d₂)` of an invariant, with `d₁ ≥ d₂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Bidegree {
    pub d1: u64,
    pub d2: u64,
    /// Set when the raw pair had `d₁ < d₂` and was swapped.
    pub conjugated: bool,
}

impl Bidegree {
    pub fn new(d1: u64, d2: u64) -> Self {
        if d1 >= d2 {
            Self {
                d1,
                d2,
                conjugated: false,
            }
        } else {
            Self {
                d1: d2,
                d2: d1,
                conjugated: true,
            }
        }
    }

    pub fn pair(&self) -> (u64, u64) {
        (self.d1, self.d2)
    }
}

impl std::fmt::Display for Bidegree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.d1, self.d2)
    }
}

/// Effective exponents after flipping `s`: `z_j` off `s`, `−z_j` on it.
pub fn effective_exponents(z: &ZVector, s: &[usize]) -> Vec<i64> {
    z.weights()
        .iter()
        .enumerate()
        .map(|(j, &w)| if s.contains(&j) { -w } else { w })
        .collect()
}

/// Bidegree of the detecting invariant after flipping `s`. Positive
/// effective exponents count towards the holomorphic degree, negative ones
/// towards the antiholomorphic degree; for positive `z` this is
/// `(h·Σ_{j∉s} z_j, h·Σ_{j∈s} z_j)`.
pub fn bidegree(z: &ZVector, s: &[usize], h: u64) -> Result<Bidegree> {
    if h == 0 {
        return Err(Error::Precondition("h must be positive".into()));
    }
    if let Some(&bad) = s.iter().find(|&&j| j >= z.len()) {
        return Err(Error::InvalidFlip(format!(
            "column {bad} out of range for length {}",
            z.len()
        )));
    }
    let e = effective_exponents(z, s);
    let pos: u64 = e.iter().filter(|&&x| x > 0).map(|&x| x as u64).sum();
    let neg: u64 = e.iter().filter(|&&x| x < 0).map(|&x| x.unsigned_abs()).sum();
    Ok(Bidegree::new(h * pos, h * neg))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum FlipOutcome {
    /// Unequal partition: the flipped support is again irreducibly balanced.
    IrreducibleABalanced {
        bidegree: Bidegree,
        phase: PhaseSet,
        /// Flipped columns, in the original column order.
        flipped: AMatrix,
        flipped_z: ZVector,
        canonical: AMatrix,
    },
    /// The flip indicator equals a row of the A-matrix up to sign: those
    /// qubits factor out.
    ProductFactor { qubits: Vec<usize>, bidegree: Bidegree },
    /// Equal partition without a row match: only `(d,d)` invariants detect.
    UOnlyEntangled { bidegree: Bidegree },
}

impl FlipOutcome {
    pub fn bidegree(&self) -> Bidegree {
        match self {
            Self::IrreducibleABalanced { bidegree, .. }
            | Self::ProductFactor { bidegree, .. }
            | Self::UOnlyEntangled { bidegree } => *bidegree,
        }
    }

    pub fn phase(&self) -> PhaseSet {
        match self {
            Self::IrreducibleABalanced { phase, .. } => phase.clone(),
            _ => PhaseSet::None,
        }
    }
}

pub fn flip_outcome(a: &AMatrix, z: &ZVector, s: &[usize]) -> Result<FlipOutcome> {
    let ev = balance::is_irreducible(a)?;
    if !ev.irreducible || !z.annihilated_by(a) || !z.has_full_support() {
        return Err(Error::Precondition(
            "flip_outcome needs an irreducible (A, z) pair".into(),
        ));
    }
    let bd = bidegree(z, s, 1)?;
    let indicator: Vec<i64> = (0..a.len()).map(|j| if s.contains(&j) { 1 } else { -1 }).collect();
    let matches: Vec<usize> = (0..a.qubits())
        .filter(|&k| {
            let row = a.row(k);
            row == indicator || row.iter().zip(&indicator).all(|(r, i)| *r == -i)
        })
        .collect();
    if !matches.is_empty() {
        return Ok(FlipOutcome::ProductFactor {
            qubits: matches,
            bidegree: bd,
        });
    }
    if bd.d1 == bd.d2 {
        return Ok(FlipOutcome::UOnlyEntangled { bidegree: bd });
    }
    let columns: Vec<BasisString> = a
        .columns()
        .iter()
        .enumerate()
        .map(|(j, c)| if s.contains(&j) { c.complement() } else { c.clone() })
        .collect();
    let flipped = AMatrix::new(a.qubits(), columns)?;
    let flipped_z = ZVector::from_weights(effective_exponents(z, s))?;
    let canonical = balance::canonical_form(&flipped)?.0;
    Ok(FlipOutcome::IrreducibleABalanced {
        bidegree: bd,
        phase: topo::phase_set_from_bidegree(&bd),
        flipped,
        flipped_z,
        canonical,
    })
}

/// Flips the negative-weight columns of an irreducible a-balanced state,
/// giving a c-balanced parent.
pub fn c_parent(s: &State) -> Result<(State, FlipSpec)> {
    let report = balance::balance_report(s)?;
    if !report.is_a_irreducible() {
        return Err(Error::Precondition(format!(
            "c_parent needs an irreducible a_balanced_only state, got {}{}",
            report.class,
            if report.irreducible { "" } else { " (reducible)" }
        )));
    }
    let z = report.z.expect("irreducible report has z");
    let spec = FlipSpec::terms(z.negative_columns());
    let parent = flip(s, &spec)?;
    Ok((parent, spec))
}
