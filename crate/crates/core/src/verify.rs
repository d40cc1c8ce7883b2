//! Seeded numerical harnesses.
//!
//! Every random quantity is drawn from a ChaCha8 stream seeded by the user
//! seed, with the stream number set to the sample index, so results do not
//! depend on evaluation order or thread count.

use std::collections::BTreeSet;

use num_complex::Complex64;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::balance::{self, AMatrix};
use crate::spinflip::{self, FlipSpec};
use crate::statekit::{
    apply_all, apply_local, product_state, BasisString, LocalOperator, Matrix2, OperatorKind, State, OPERATOR_TOL,
};
use crate::{Error, Result};

/// Largest condition number accepted for special-linear samples.
pub const SL_MAX_CONDITION: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    SpecialUnitary,
    SpecialLinear,
}

impl std::fmt::Display for Group {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Group::SpecialUnitary => "special_unitary",
            Group::SpecialLinear => "special_linear",
        })
    }
}

/// The RNG for sample `index` under `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// A Haar-random element of SU(2).
pub fn haar_su2(rng: &mut impl Rng) -> Matrix2 {
    loop {
        let (a, b, c, d) = (gaussian(rng), gaussian(rng), gaussian(rng), gaussian(rng));
        // Gram-Schmidt on the columns (a, c), (b, d); R gets a positive diagonal.
        let n1 = (a.norm_sqr() + c.norm_sqr()).sqrt();
        if n1 < 1e-8 {
            continue;
        }
        let (q00, q10) = (a / n1, c / n1);
        let proj = q00.conj() * b + q10.conj() * d;
        let (r0, r1) = (b - proj * q00, d - proj * q10);
        let n2 = (r0.norm_sqr() + r1.norm_sqr()).sqrt();
        if n2 < 1e-8 {
            continue;
        }
        let (q01, q11) = (r0 / n2, r1 / n2);
        let det = q00 * q11 - q01 * q10;
        let root = det.sqrt();
        let m = [[q00 / root, q01 / root], [q10 / root, q11 / root]];
        return m;
    }
}

/// `exp(M)` for a random traceless `M`, rejected above the condition bound.
pub fn random_sl2(rng: &mut impl Rng) -> Matrix2 {
    let one = Complex64::new(1.0, 0.0);
    loop {
        let scale = 0.5;
        let (a, b, c) = (gaussian(rng) * scale, gaussian(rng) * scale, gaussian(rng) * scale);
        let mu = (a * a + b * c).sqrt();
        let (ch, sh) = if mu.norm() < 1e-6 {
            let mu2 = mu * mu;
            (one + mu2 / 2.0, one + mu2 / 6.0)
        } else {
            (mu.cosh(), mu.sinh() / mu)
        };
        let m = [[ch + sh * a, sh * b], [sh * c, ch - sh * a]];
        let frob: f64 = m.iter().flatten().map(|x| x.norm_sqr()).sum();
        // With det 1 the squared singular values are s and 1/s, s + 1/s = ‖M‖_F².
        let s = (frob + (frob * frob - 4.0).max(0.0).sqrt()) / 2.0;
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if s <= SL_MAX_CONDITION && (det - one).norm() <= OPERATOR_TOL {
            return m;
        }
    }
}

/// One random operator per qubit for sample `index`.
pub fn sample_local(q: usize, group: Group, seed: u64, index: u64) -> Vec<LocalOperator> {
    let mut rng = sample_rng(seed, index);
    (0..q)
        .map(|k| {
            let (m, kind) = match group {
                Group::SpecialUnitary => (haar_su2(&mut rng), OperatorKind::Unitary),
                Group::SpecialLinear => (random_sl2(&mut rng), OperatorKind::SpecialLinear),
            };
            LocalOperator::new(k, m, kind).expect("sampler output satisfies its kind")
        })
        .collect()
}

pub fn random_local(q: usize, group: Group, seed: u64) -> Vec<LocalOperator> {
    sample_local(q, group, seed, 0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitCheckReport {
    pub invariant: String,
    pub group: Group,
    pub samples: usize,
    pub seed: u64,
    pub max_deviation: f64,
    pub tolerance: f64,
    /// `max_deviation ≤ tolerance`.
    pub pass: bool,
}

/// Largest change of `inv` over random local orbits of `s`.
pub fn orbit_invariance<F>(
    s: &State,
    name: &str,
    inv: F,
    group: Group,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<OrbitCheckReport>
where
    F: Fn(&State) -> Result<Complex64> + Sync,
{
    let base = inv(s)?;
    let devs = (0..samples)
        .into_par_iter()
        .map(|i| {
            let ops = sample_local(s.qubits(), group, seed, i as u64);
            let moved = apply_all(s, &ops)?;
            Ok((inv(&moved)? - base).norm())
        })
        .collect::<Result<Vec<f64>>>()?;
    let max_deviation = devs.into_iter().fold(0.0, f64::max);
    Ok(OrbitCheckReport {
        invariant: name.to_string(),
        group,
        samples,
        seed,
        max_deviation,
        tolerance: tol,
        pass: max_deviation <= tol,
    })
}

/// Largest change of `p` evaluated through [`crate::invariants::induced_value`]
/// over random special-unitary orbits of a flipped state, the flipped part
/// `theta_tilde` being carried along by the same operators.
pub fn induced_orbit_invariance<F>(
    flipped: &State,
    theta_tilde: &State,
    name: &str,
    p: F,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<OrbitCheckReport>
where
    F: Fn(&State) -> Result<Complex64> + Sync,
{
    let base = crate::invariants::induced_value(flipped, &FlipSpec::Theta(theta_tilde.clone()), &p)?;
    let devs = (0..samples)
        .into_par_iter()
        .map(|i| {
            let ops = sample_local(flipped.qubits(), Group::SpecialUnitary, seed, i as u64);
            // Apply to φ and θ̃ separately so θ̃ is transported, not re-cut.
            let phi = flipped.sub(theta_tilde)?;
            let phi_u = apply_all(&phi, &ops)?;
            let theta_u = apply_all(theta_tilde, &ops)?;
            let original_u = phi_u.add(&unflip_part(&theta_u))?;
            Ok((p(&original_u)? - base).norm())
        })
        .collect::<Result<Vec<f64>>>()?;
    let max_deviation = devs.into_iter().fold(0.0, f64::max);
    Ok(OrbitCheckReport {
        invariant: format!("induced {name}"),
        group: Group::SpecialUnitary,
        samples,
        seed,
        max_deviation,
        tolerance: tol,
        pass: max_deviation <= tol,
    })
}

/// `(−1)^q·F(θ̃)`: the inverse flip of a flipped part.
fn unflip_part(theta_tilde: &State) -> State {
    let back = spinflip::universal_flip(theta_tilde);
    if theta_tilde.qubits().is_multiple_of(2) {
        back
    } else {
        back.scale(Complex64::new(-1.0, 0.0))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitReport {
    pub qubit: usize,
    /// Support reached through the diagonal part, absent if that part is zero.
    pub a1: Option<AMatrix>,
    /// Support reached through the off-diagonal part (row `qubit` negated).
    pub a2: Option<AMatrix>,
    pub cancelled_terms: Vec<BasisString>,
    /// Support of the transformed state, in canonical order.
    pub terms: Vec<BasisString>,
    /// `m₁·z` carried over by the diagonal part plus `m₂·z` by the
    /// off-diagonal part, on `terms`.
    pub merged_labels: Vec<i64>,
    pub m1: i64,
    pub m2: i64,
    pub labels_in_kernel: bool,
    pub still_balanced: bool,
    /// Not a product state (some single qubit is entangled with the rest).
    pub entangled: bool,
}

/// Tracks how the balanced structure of an irreducible state survives a
/// single-qubit unitary.
pub fn su_split_check(s: &State, k: usize, u: &LocalOperator) -> Result<SplitReport> {
    let report = balance::balance_report(s)?;
    let Some(z) = report.z.clone().filter(|_| report.irreducible) else {
        return Err(Error::Precondition("su_split_check needs an irreducible state".into()));
    };
    if z.sum() == 0 {
        return Err(Error::Precondition("su_split_check needs a nonzero z sum".into()));
    }
    if k >= s.qubits() {
        return Err(Error::QubitIndex {
            index: k,
            qubits: s.qubits(),
        });
    }
    if u.unitarity_defect() > OPERATOR_TOL {
        return Err(Error::Precondition("su_split_check needs a unitary operator".into()));
    }
    let u = u.on_qubit(k);
    let a = balance::a_matrix_of(s)?;
    let transformed = apply_local(s, &u)?;
    let a1 = (!u.diagonal_part().is_zero()).then(|| a.clone());
    let a2 = (!u.off_diagonal_part().is_zero()).then(|| a.negate_row(k));

    let mut union: BTreeSet<BasisString> = BTreeSet::new();
    for m in [&a1, &a2].into_iter().flatten() {
        union.extend(m.columns().iter().cloned());
    }
    let cancelled: Vec<BasisString> = union.into_iter().filter(|b| !transformed.contains(b)).collect();

    let z_at = |b: &BasisString| s.index_of(b).map_or(0, |j| z.weights()[j]);
    let (m1, m2) = match cancelled.first() {
        Some(t) => {
            let (zl, zl2) = (z_at(t), z_at(&t.with_bit_flipped(k)));
            let g = zl.gcd(&zl2).max(1);
            let (mut m1, mut m2) = (zl2 / g, -zl / g);
            if m1 < 0 {
                m1 = -m1;
                m2 = -m2;
            }
            (m1, m2)
        }
        None => (1, 1),
    };

    let terms = transformed.basis();
    let merged_labels: Vec<i64> = terms
        .iter()
        .map(|t| {
            let diag = if a1.is_some() { m1 * z_at(t) } else { 0 };
            let off = if a2.is_some() {
                m2 * z_at(&t.with_bit_flipped(k))
            } else {
                0
            };
            diag + off
        })
        .collect();
    let labels_in_kernel = if terms.is_empty() {
        false
    } else {
        let at = AMatrix::new(s.qubits(), terms.clone())?;
        balance::ZVector::raw(merged_labels.clone()).annihilated_by(&at)
    };
    let still_balanced = !transformed.is_zero() && balance::balance_report(&transformed)?.kernel_dim > 0;
    Ok(SplitReport {
        qubit: k,
        a1,
        a2,
        cancelled_terms: cancelled,
        terms,
        merged_labels,
        m1,
        m2,
        labels_in_kernel,
        still_balanced,
        entangled: !is_fully_product(&transformed, 1e-10),
    })
}

/// Whether every qubit factors out: each single-qubit reduced state is pure.
pub fn is_fully_product(s: &State, tol: f64) -> bool {
    let norm = s.norm_sqr();
    if norm == 0.0 {
        return true;
    }
    (0..s.qubits()).all(|k| {
        // Reduced density matrix of qubit k; purity ⇔ det ρ = 0.
        let mut rho = [[Complex64::default(); 2]; 2];
        for (b, a) in s.terms() {
            if b.bit(k) == 0 {
                let partner = s.amplitude(&b.with_bit_flipped(k));
                rho[0][0] += a.norm_sqr();
                rho[0][1] += a * partner.conj();
            } else {
                rho[1][1] += a.norm_sqr();
            }
        }
        rho[1][0] = rho[0][1].conj();
        let det = rho[0][0] * rho[1][1] - rho[0][1] * rho[1][0];
        det.norm() / (norm * norm) < tol
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckCount {
    pub name: String,
    pub trials: usize,
    pub violations: usize,
    pub max_deviation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub seed: u64,
    pub q_max: usize,
    pub trials: usize,
    pub checks: Vec<CheckCount>,
}

impl TheoremReport {
    pub fn pass(&self, tol: f64) -> bool {
        self.checks
            .iter()
            .all(|c| c.violations == 0 && c.max_deviation.is_none_or(|d| d <= tol))
    }
}

/// A product of `q` random single-qubit states with both amplitudes nonzero.
pub fn random_product_state(q: usize, rng: &mut impl Rng) -> State {
    let factors: Vec<State> = (0..q)
        .map(|_| {
            let terms = [
                ("0".parse().expect("bit"), gaussian(rng)),
                ("1".parse().expect("bit"), gaussian(rng)),
            ];
            State::from_terms(1, terms).expect("one qubit")
        })
        .collect();
    product_state(&factors).expect("nonzero factors")
}

/// A product state whose factors are `|0⟩`, `|1⟩` or a superposition, each
/// with probability 1/3.
pub fn random_sparse_product_state(q: usize, rng: &mut impl Rng) -> State {
    let factors: Vec<State> = (0..q)
        .map(|_| {
            let kind = rng.random_range(0..3);
            let mut terms = Vec::new();
            if kind != 1 {
                terms.push(("0".parse().expect("bit"), gaussian(rng)));
            }
            if kind != 0 {
                terms.push(("1".parse().expect("bit"), gaussian(rng)));
            }
            State::from_terms(1, terms).expect("one qubit")
        })
        .collect();
    product_state(&factors).expect("nonzero factors")
}

/// `count` distinct random basis strings on `q` qubits.
pub fn random_support(q: usize, count: usize, rng: &mut impl Rng) -> Vec<BasisString> {
    let mut masks = BTreeSet::new();
    while masks.len() < count {
        masks.insert(rng.random_range(0..(1u64 << q)));
    }
    masks.into_iter().map(|m| BasisString::from_mask(m, q)).collect()
}

/// Randomized checks: product states are never irreducible, supports longer
/// than `q+1` are never irreducible, and a double flip gives `(−1)^q` on the
/// flipped part. Stream indices are offset per check so the three draw
/// independent samples.
pub fn theorem_suite(q_max: usize, trials: usize, seed: u64) -> Result<TheoremReport> {
    if q_max < 2 {
        return Err(Error::Precondition("q_max must be at least 2".into()));
    }
    let t = trials as u64;
    let product = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i as u64);
            let q = rng.random_range(2..=q_max);
            let s = random_product_state(q, &mut rng);
            Ok(balance::is_irreducible(&balance::a_matrix_of(&s)?)?.irreducible as usize)
        })
        .collect::<Result<Vec<usize>>>()?
        .into_iter()
        .sum();

    // Sparse products can be irreducible only through a constant row, which
    // forces Σz = 0; a verdict with Σz ≠ 0 or a positive generator is a violation.
    let sparse = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, 3 * t + i as u64);
            let q = rng.random_range(2..=q_max);
            let s = random_sparse_product_state(q, &mut rng);
            let r = balance::balance_report(&s)?;
            Ok((r.irreducible && (r.z_sum != Some(0) || r.class == balance::BalanceClass::CBalanced)) as usize)
        })
        .collect::<Result<Vec<usize>>>()?
        .into_iter()
        .sum();

    let long = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, t + i as u64);
            let q = rng.random_range(2..=q_max);
            let max_len = (1usize << q).min(2 * q + 4);
            let len = rng.random_range(q + 2..=max_len);
            let a = AMatrix::new(q, random_support(q, len, &mut rng))?;
            Ok(balance::is_irreducible(&a)?.irreducible as usize)
        })
        .collect::<Result<Vec<usize>>>()?
        .into_iter()
        .sum();

    let flips = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, 2 * t + i as u64);
            let q = rng.random_range(1..=q_max.min(6));
            let len = rng.random_range(1..=(1usize << q).min(12));
            let terms: Vec<_> = random_support(q, len, &mut rng)
                .into_iter()
                .map(|b| (b, gaussian(&mut rng)))
                .collect();
            let s = State::from_terms(q, terms)?;
            let subset: Vec<usize> = (0..s.len()).filter(|_| rng.random_bool(0.5)).collect();
            double_flip_deviation(&s, &FlipSpec::terms(subset))
        })
        .collect::<Result<Vec<f64>>>()?;
    let flip_dev = flips.into_iter().fold(0.0, f64::max);

    Ok(TheoremReport {
        seed,
        q_max,
        trials,
        checks: vec![
            CheckCount {
                name: "product_states_reducible".into(),
                trials,
                violations: product,
                max_deviation: None,
            },
            CheckCount {
                name: "sparse_product_states_sum_zero".into(),
                trials,
                violations: sparse,
                max_deviation: None,
            },
            CheckCount {
                name: "long_supports_reducible".into(),
                trials,
                violations: long,
                max_deviation: None,
            },
            CheckCount {
                name: "double_flip_sign".into(),
                trials,
                violations: 0,
                max_deviation: Some(flip_dev),
            },
        ],
    })
}

/// `‖flip(flip(ψ, f), f̃) − (φ + (−1)^q θ)‖_∞`.
pub fn double_flip_deviation(s: &State, f: &FlipSpec) -> Result<f64> {
    let (phi, theta) = spinflip::split(s, f)?;
    let once = spinflip::flip(s, f)?;
    let twice = spinflip::flip(&once, &FlipSpec::Theta(spinflip::universal_flip(&theta)))?;
    let sign = if s.qubits().is_multiple_of(2) { 1.0 } else { -1.0 };
    let expected = phi.add(&theta.scale(Complex64::new(sign, 0.0)))?;
    Ok(twice.max_abs_diff(&expected))
}
