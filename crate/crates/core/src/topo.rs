//! Topological phase predictions.
//!
//! All phases are exact rational multiples of π. A prediction is the discrete
//! group generated by `2π/n`; [`z_rotation_loops`] computes which common
//! phases are reachable by closed loops of commuting local `σ_z` rotations.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::balance::{self, ZVector};
use crate::exactlin;
use crate::spinflip::Bidegree;
use crate::statekit::{apply_all, LocalOperator, State};
use crate::{Error, Result};

/// Largest support accepted by [`z_rotation_loops`].
pub const LOOPS_MAX_LEN: usize = 16;

/// A reduced fraction with positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rational {
    pub num: i64,
    pub den: i64,
}

impl Rational {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        let g = num.gcd(&den).max(1);
        let s = if den < 0 { -1 } else { 1 };
        Self {
            num: s * num / g,
            den: s * den / g,
        }
    }

    pub fn zero() -> Self {
        Self { num: 0, den: 1 }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    fn to_big(self) -> BigRational {
        BigRational::new(self.num.into(), self.den.into())
    }

    fn from_big(r: &BigRational) -> Result<Self> {
        let num = r.numer().to_i64().ok_or_else(|| Error::Overflow(r.to_string()))?;
        let den = r.denom().to_i64().ok_or_else(|| Error::Overflow(r.to_string()))?;
        Ok(Self::new(num, den))
    }

    /// Reduced into `[0, m)`.
    fn modulo(self, m: i64) -> Self {
        Self::new(self.num.rem_euclid(m * self.den), self.den)
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.num as i128 * other.den as i128).cmp(&(other.num as i128 * self.den as i128))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Predicted phases: multiples of a generator, or no discrete phase.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhaseSet {
    MultiplesOf { generator_over_pi: Rational },
    None,
}

impl PhaseSet {
    /// Multiples of `2π/n`.
    pub fn two_pi_over(n: u64) -> Self {
        if n == 0 {
            return PhaseSet::None;
        }
        PhaseSet::MultiplesOf {
            generator_over_pi: Rational::new(2, n as i64),
        }
    }

    pub fn generator_over_pi(&self) -> Option<Rational> {
        match self {
            PhaseSet::MultiplesOf { generator_over_pi } => Some(*generator_over_pi),
            PhaseSet::None => None,
        }
    }

    /// Whether `phase_over_pi·π` lies in the set. Zero is always contained.
    pub fn contains(&self, phase_over_pi: Rational) -> bool {
        match self {
            PhaseSet::None => phase_over_pi.num == 0,
            PhaseSet::MultiplesOf { generator_over_pi: g } => {
                let num = phase_over_pi.num as i128 * g.den as i128;
                let den = phase_over_pi.den as i128 * g.num as i128;
                num % den == 0
            }
        }
    }
}

impl fmt::Display for PhaseSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhaseSet::None => f.write_str("none"),
            PhaseSet::MultiplesOf { generator_over_pi: g } => match (g.num, g.den) {
                (1, 1) => f.write_str("π"),
                (1, d) => write!(f, "π/{d}"),
                (n, 1) => write!(f, "{n}π"),
                (n, d) => write!(f, "{n}π/{d}"),
            },
        }
    }
}

/// Multiples of `2π/Σz` for a positive z-vector.
pub fn phase_set_c(z: &ZVector) -> Result<PhaseSet> {
    if z.weights().iter().any(|&w| w <= 0) {
        return Err(Error::Precondition(
            "phase_set_c needs a strictly positive z-vector".into(),
        ));
    }
    let sum = z.sum();
    if sum == 0 {
        return Err(Error::Precondition("z-vector sums to zero".into()));
    }
    Ok(PhaseSet::two_pi_over(sum as u64))
}

/// Multiples of `2π/(|Σ_{j∉s} z_j| − |Σ_{j∈s} z_j|)`, or none if that vanishes.
pub fn phase_set_flip(z: &ZVector, s: &[usize]) -> PhaseSet {
    let inside: i64 = s.iter().filter_map(|&j| z.weights().get(j)).sum();
    let outside = z.sum() - inside;
    PhaseSet::two_pi_over(outside.abs().abs_diff(inside.abs()))
}

pub fn phase_set_from_bidegree(b: &Bidegree) -> PhaseSet {
    PhaseSet::two_pi_over(b.d1.abs_diff(b.d2))
}

/// Prediction for an irreducible state with z-vector `z` (no flip): the
/// detecting monomial has bidegree `(Σ z⁺, Σ |z⁻|)`, so the generator is
/// `2π/|Σz|`.
pub fn predicted_phase_set(z: &ZVector) -> PhaseSet {
    PhaseSet::two_pi_over(z.sum().unsigned_abs())
}

/// Common phase (over π, in `[0, 2)`) of the diagonal rotation with angles
/// `angles_over_pi·π`, or `None` when term phases disagree modulo 2π.
///
/// Qubit `k` is rotated by `diag(e^{−iφ_k/2}, e^{iφ_k/2})`, so term `j`
/// picks up `½ Σ_k φ_k A_kj`.
pub fn loop_phase(a: &balance::AMatrix, angles_over_pi: &[Rational]) -> Option<Rational> {
    if angles_over_pi.len() != a.qubits() {
        return None;
    }
    let two = BigRational::from_integer(2.into());
    let phases: Vec<BigRational> = (0..a.len())
        .map(|j| {
            let total: BigRational = (0..a.qubits())
                .map(|k| angles_over_pi[k].to_big() * BigRational::from_integer(a.entry(k, j).into()))
                .sum();
            total / &two
        })
        .collect();
    let first = phases.first()?;
    for p in &phases[1..] {
        let diff = (p - first) / &two;
        if !diff.is_integer() {
            return None;
        }
    }
    Rational::from_big(first).ok().map(|r| r.modulo(2))
}

/// The product of the diagonal rotations, for numerical cross-checks.
pub fn rotation_operators(angles_over_pi: &[Rational]) -> Vec<LocalOperator> {
    use num_complex::Complex64;
    angles_over_pi
        .iter()
        .enumerate()
        .map(|(k, r)| {
            let half = r.to_f64() * std::f64::consts::PI / 2.0;
            let zero = Complex64::new(0.0, 0.0);
            LocalOperator::general(
                k,
                [
                    [Complex64::from_polar(1.0, -half), zero],
                    [zero, Complex64::from_polar(1.0, half)],
                ],
            )
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoopWitness {
    pub phase_over_pi: Rational,
    pub angles_over_pi: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoopReport {
    /// Achieved common phases over π, in `[0, 2)`, sorted.
    pub achieved: Vec<Rational>,
    /// Generator over π of the achieved group; `None` when phases vary
    /// continuously (only the trivial topological phase then).
    pub generator_over_pi: Option<Rational>,
    pub continuous: bool,
    pub witnesses: Vec<LoopWitness>,
    pub max_denominator: u64,
    /// Only commuting diagonal loops are explored.
    pub under_approximation: bool,
}

/// Common phases reachable by closed loops of local `σ_z` rotations.
///
/// With `Z` the kernel basis (as rows) and `s = Z·1`, a common phase `2πt`
/// is reachable iff `t·s` lies in the lattice spanned by the columns of `Z`.
/// When the kernel is trivial or `s = 0` the common phase varies
/// continuously, so the only topological phase is 0. Otherwise the reachable
/// `t` form `(1/N)ℤ`; fractions `k/n` with `n ≤ max_denominator` are listed,
/// each with explicit angles checked by [`loop_phase`].
pub fn z_rotation_loops(s: &State, max_denominator: u64) -> Result<LoopReport> {
    let a = balance::a_matrix_of(s)?;
    if a.len() > LOOPS_MAX_LEN {
        return Err(Error::SizeGuard {
            what: "support length",
            value: a.len(),
            limit: LOOPS_MAX_LEN,
        });
    }
    if max_denominator == 0 {
        return Err(Error::Precondition("max_denominator must be positive".into()));
    }
    let kernel = a.kernel();
    let zrows = kernel.vectors();
    let sums: Vec<BigInt> = zrows.iter().map(|v| v.iter().sum()).collect();
    let continuous = zrows.is_empty() || sums.iter().all(Zero::is_zero);
    let trivial = LoopWitness {
        phase_over_pi: Rational::zero(),
        angles_over_pi: vec![Rational::zero(); a.qubits()],
    };
    if continuous {
        return Ok(LoopReport {
            achieved: vec![Rational::zero()],
            generator_over_pi: None,
            continuous: true,
            witnesses: vec![trivial],
            max_denominator,
            under_approximation: true,
        });
    }
    // Lattice generators: the columns of Z.
    let gens: Vec<Vec<BigInt>> = (0..a.len())
        .map(|j| zrows.iter().map(|v| v[j].clone()).collect())
        .collect();
    let at = transpose(&a);
    let mut achieved = BTreeSet::new();
    let mut witnesses = Vec::new();
    let mut smallest: Option<Rational> = None;
    for n in 1..=max_denominator as i64 {
        for k in 0..n {
            if k.gcd(&n) != 1 {
                continue;
            }
            // t·s must be integral to lie in the integer lattice.
            let scaled: Vec<BigInt> = sums.iter().map(|x| x * k).collect();
            if scaled.iter().any(|x| !(x % n).is_zero()) {
                continue;
            }
            let target: Vec<BigInt> = scaled.iter().map(|x| -(x / n)).collect();
            let Some(x) = exactlin::lattice_solve(&gens, &target) else {
                continue;
            };
            let t = Rational::new(k, n);
            let angles = witness_angles(&at, t, &x)?;
            let phase = loop_phase(&a, &angles)
                .ok_or_else(|| Error::Precondition("internal: constructed rotation is not a loop".into()))?;
            debug_assert_eq!(phase, Rational::new(2 * k, n).modulo(2));
            if t.num != 0 && smallest.is_none_or(|m| t < m) {
                smallest = Some(t);
            }
            if achieved.insert(phase) {
                witnesses.push(LoopWitness {
                    phase_over_pi: phase,
                    angles_over_pi: angles,
                });
            }
        }
    }
    witnesses.sort_by_key(|w| w.phase_over_pi);
    Ok(LoopReport {
        achieved: achieved.into_iter().collect(),
        generator_over_pi: smallest.map(|t| Rational::new(2 * t.num, t.den)),
        continuous: false,
        witnesses,
        max_denominator,
        under_approximation: true,
    })
}

fn transpose(a: &balance::AMatrix) -> exactlin::IntMatrix {
    let rows: Vec<Vec<i64>> = (0..a.len()).map(|j| a.column(j)).collect();
    exactlin::IntMatrix::from_rows(&rows)
}

/// Angles (over π) with `½ Σ_k f_k A_kj = 2(t + x_j)` for every column `j`.
fn witness_angles(at: &exactlin::IntMatrix, t: Rational, x: &[BigInt]) -> Result<Vec<Rational>> {
    let four = BigRational::from_integer(4.into());
    let rhs: Vec<BigRational> = x
        .iter()
        .map(|xj| (t.to_big() + BigRational::from_integer(xj.clone())) * &four)
        .collect();
    let f = exactlin::solve_rational(at, &rhs)
        .ok_or_else(|| Error::Precondition("internal: loop condition has no real solution".into()))?;
    f.iter().map(Rational::from_big).collect()
}

/// Applies the witness rotation to `s` and returns the largest deviation
/// from `e^{iχ}·s`.
pub fn loop_defect(s: &State, w: &LoopWitness) -> Result<f64> {
    let rotated = apply_all(s, &rotation_operators(&w.angles_over_pi))?;
    let chi = w.phase_over_pi.to_f64() * std::f64::consts::PI;
    let expected = s.scale(num_complex::Complex64::from_polar(1.0, chi));
    Ok(rotated.max_abs_diff(&expected))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statekit::parse_state;

    fn gen(set: &PhaseSet) -> (i64, i64) {
        let g = set.generator_over_pi().unwrap();
        (g.num, g.den)
    }

    #[test]
    fn c_predictions() {
        assert_eq!(gen(&phase_set_c(&ZVector::raw(vec![1, 1])).unwrap()), (1, 1));
        assert_eq!(gen(&phase_set_c(&ZVector::raw(vec![1, 1, 1, 1])).unwrap()), (1, 2));
        assert_eq!(gen(&phase_set_c(&ZVector::raw(vec![2, 1, 1, 1, 1])).unwrap()), (1, 3));
        assert!(phase_set_c(&ZVector::raw(vec![-1, 1, 1, 1])).is_err());
    }

    #[test]
    fn flip_predictions() {
        assert_eq!(gen(&phase_set_flip(&ZVector::raw(vec![1; 4]), &[0])), (1, 1));
        assert_eq!(phase_set_flip(&ZVector::raw(vec![1; 6]), &[0, 1, 2]), PhaseSet::None);
        assert_eq!(gen(&phase_set_flip(&ZVector::raw(vec![2, 1, 1, 1, 1]), &[1])), (1, 2));
    }

    #[test]
    fn bidegree_predictions() {
        assert_eq!(gen(&phase_set_from_bidegree(&Bidegree::new(4, 0))), (1, 2));
        assert_eq!(gen(&phase_set_from_bidegree(&Bidegree::new(3, 1))), (1, 1));
        assert_eq!(phase_set_from_bidegree(&Bidegree::new(3, 3)), PhaseSet::None);
    }

    #[test]
    fn membership() {
        let half = PhaseSet::two_pi_over(4);
        assert!(half.contains(Rational::new(3, 2)));
        assert!(!half.contains(Rational::new(1, 3)));
        assert!(PhaseSet::None.contains(Rational::zero()));
        assert!(!PhaseSet::None.contains(Rational::new(1, 1)));
    }

    #[test]
    fn ghz_full_turn_on_one_qubit() {
        let a = balance::AMatrix::from_bit_strings(&["000", "111"]).unwrap();
        let r = loop_phase(&a, &[Rational::new(2, 1), Rational::zero(), Rational::zero()]);
        assert_eq!(r, Some(Rational::new(1, 1)));
        let ghz = parse_state("|000> + |111>").unwrap();
        let rep = z_rotation_loops(&ghz, 12).unwrap();
        assert_eq!(rep.achieved, vec![Rational::zero(), Rational::new(1, 1)]);
        assert_eq!(rep.generator_over_pi, Some(Rational::new(1, 1)));
        for w in &rep.witnesses {
            assert!(loop_defect(&ghz, w).unwrap() < 1e-12);
        }
    }

    #[test]
    fn w_has_only_trivial_phase() {
        let w = parse_state("|100> + |010> + |001>").unwrap();
        let rep = z_rotation_loops(&w, 12).unwrap();
        assert!(rep.continuous);
        assert_eq!(rep.achieved, vec![Rational::zero()]);
    }

    #[test]
    fn x_loops_in_quarter_turns() {
        let x = parse_state("|111> + |100> + |010> + |001>").unwrap();
        let rep = z_rotation_loops(&x, 12).unwrap();
        assert_eq!(rep.generator_over_pi, Some(Rational::new(1, 2)));
        assert_eq!(rep.achieved.len(), 4);
        let predicted = PhaseSet::two_pi_over(4);
        assert!(rep.achieved.iter().all(|&p| predicted.contains(p)));
        for w in &rep.witnesses {
            assert!(loop_defect(&x, w).unwrap() < 1e-12);
        }
    }
}
