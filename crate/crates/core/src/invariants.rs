//! Polynomial invariants of pure states.
//!
//! The three-qubit generators here are the three-tangle `τ₃` (the Cayley
//! hyperdeterminant, bidegree (4,0)), the bidegree-(3,1) unitary invariant
//! `τ₃,₁`, and the norm (1,1). For an even number of qubits the determinant
//! of a balanced matricization is a special-linear invariant of bidegree
//! `(2^{q/2}, 0)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::balance::{AMatrix, ZVector};
use crate::spinflip::{self, Bidegree, FlipSpec};
use crate::statekit::{BasisString, ExactState, GaussianRational, State};
use crate::{Error, Result};

/// Detection threshold on unit-norm states.
pub const DETECTION_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantValue {
    pub name: String,
    pub value: Complex64,
    pub bidegree: Bidegree,
}

impl InvariantValue {
    fn new(name: &str, value: Complex64, d1: u64, d2: u64) -> Self {
        Self {
            name: name.to_string(),
            value,
            bidegree: Bidegree::new(d1, d2),
        }
    }

    pub fn detects(&self) -> bool {
        self.value.norm() > DETECTION_EPS
    }
}

fn require_qubits(s: &State, q: usize) -> Result<()> {
    if s.qubits() != q {
        return Err(Error::QubitCount {
            expected: q,
            found: s.qubits(),
        });
    }
    Ok(())
}

/// Dense amplitude array indexed by the basis mask (qubit 0 most significant).
fn dense(s: &State) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); 1 << s.qubits()];
    for (b, a) in s.terms() {
        out[b.to_mask() as usize] = *a;
    }
    out
}

pub fn tau3(s: &State) -> Result<InvariantValue> {
    require_qubits(s, 3)?;
    let p = dense(s);
    let (a000, a001, a010, a011) = (p[0b000], p[0b001], p[0b010], p[0b011]);
    let (a100, a101, a110, a111) = (p[0b100], p[0b101], p[0b110], p[0b111]);
    let squares =
        a000 * a000 * a111 * a111 + a001 * a001 * a110 * a110 + a010 * a010 * a101 * a101 + a100 * a100 * a011 * a011;
    let pairs = a000 * a111 * a011 * a100
        + a000 * a111 * a101 * a010
        + a000 * a111 * a110 * a001
        + a011 * a100 * a101 * a010
        + a011 * a100 * a110 * a001
        + a101 * a010 * a110 * a001;
    let quads = a000 * a110 * a101 * a011 + a111 * a001 * a010 * a100;
    Ok(InvariantValue::new("tau3", squares - 2.0 * pairs + 4.0 * quads, 4, 0))
}

/// The bidegree-(3,1) invariant, with both summands inside the sum over the
/// last two indices.
pub fn tau31(s: &State) -> Result<InvariantValue> {
    require_qubits(s, 3)?;
    let p = dense(s);
    let at = |i0: usize, i1: usize, i2: usize| p[(i0 << 2) | (i1 << 1) | i2];
    let bracket =
        at(0, 0, 0) * at(1, 1, 1) + at(1, 0, 0) * at(0, 1, 1) - at(0, 1, 0) * at(1, 0, 1) - at(0, 0, 1) * at(1, 1, 0);
    let c1 = at(1, 0, 0) * at(1, 1, 1) - at(1, 1, 0) * at(1, 0, 1);
    let c0 = at(0, 0, 0) * at(0, 1, 1) - at(0, 1, 0) * at(0, 0, 1);
    let mut total = Complex64::default();
    for i1 in 0..2 {
        for i2 in 0..2 {
            let (x0, x1) = (at(0, i1, i2), at(1, i1, i2));
            let weight = x0.norm_sqr() - x1.norm_sqr();
            total += weight * bracket + 2.0 * (x0 * c1 * x1.conj() - x1 * c0 * x0.conj());
        }
    }
    Ok(InvariantValue::new("tau31", total, 3, 1))
}

pub fn norm_invariant(s: &State) -> InvariantValue {
    InvariantValue::new("norm", Complex64::new(s.norm_sqr(), 0.0), 1, 1)
}

/// Determinant of the `2^{q/2} × 2^{q/2}` matricization with `row_qubits` as
/// the row index. Invariant under local determinant-one operators.
pub fn matricization_det(s: &State, row_qubits: &[usize]) -> Result<InvariantValue> {
    let q = s.qubits();
    if !q.is_multiple_of(2) || row_qubits.len() * 2 != q {
        return Err(Error::Precondition(format!(
            "matricization needs an even qubit count split in half, got {q} qubits and rows {row_qubits:?}"
        )));
    }
    let mut seen = vec![false; q];
    for &k in row_qubits {
        if k >= q {
            return Err(Error::QubitIndex { index: k, qubits: q });
        }
        if std::mem::replace(&mut seen[k], true) {
            return Err(Error::Precondition(format!("repeated qubit {k}")));
        }
    }
    let col_qubits: Vec<usize> = (0..q).filter(|k| !seen[*k]).collect();
    let n = 1usize << (q / 2);
    let mut m = vec![vec![Complex64::default(); n]; n];
    for (b, a) in s.terms() {
        let idx = |qs: &[usize]| qs.iter().fold(0usize, |acc, &k| (acc << 1) | b.bit(k) as usize);
        m[idx(row_qubits)][idx(&col_qubits)] = *a;
    }
    let name = format!("det{row_qubits:?}");
    Ok(InvariantValue::new(&name, determinant(m), n as u64, 0))
}

/// Complex determinant by LU with partial pivoting.
fn determinant(mut m: Vec<Vec<Complex64>>) -> Complex64 {
    let n = m.len();
    let mut det = Complex64::new(1.0, 0.0);
    for c in 0..n {
        let p = (c..n)
            .max_by(|&x, &y| m[x][c].norm().total_cmp(&m[y][c].norm()))
            .expect("nonempty");
        if m[p][c].norm() == 0.0 {
            return Complex64::default();
        }
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= m[c][c];
        let pivot = m[c].clone();
        for row in m.iter_mut().skip(c + 1) {
            let f = row[c] / pivot[c];
            for (x, v) in row.iter_mut().zip(&pivot).skip(c) {
                *x -= f * v;
            }
        }
    }
    det
}

/// A named invariant usable by the harnesses and the CLI.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Invariant {
    Tau3,
    Tau31,
    Norm,
    MatricizationDet(Vec<usize>),
}

impl Invariant {
    pub fn name(&self) -> String {
        match self {
            Invariant::Tau3 => "tau3".into(),
            Invariant::Tau31 => "tau31".into(),
            Invariant::Norm => "norm".into(),
            Invariant::MatricizationDet(rows) => format!("det{rows:?}"),
        }
    }

    pub fn evaluate(&self, s: &State) -> Result<Complex64> {
        Ok(match self {
            Invariant::Tau3 => tau3(s)?.value,
            Invariant::Tau31 => tau31(s)?.value,
            Invariant::Norm => norm_invariant(s).value,
            Invariant::MatricizationDet(rows) => matricization_det(s, rows)?.value,
        })
    }
}

/// The monomial that every invariant detecting an A-class must contain,
/// evaluated after flipping the columns `s` of the parent matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialSpec {
    /// Parent support, in column order.
    pub columns: Vec<BasisString>,
    pub z: ZVector,
    pub s: Vec<usize>,
    pub h: u64,
    /// The phase is `i^phase_exponent`, with exponent `Σ_{j∈s} Σ_k A_kj`.
    pub phase_exponent: i64,
}

impl MonomialSpec {
    pub fn new(a: &AMatrix, z: &ZVector, s: &[usize], h: u64) -> Result<Self> {
        if h == 0 {
            return Err(Error::Precondition("h must be positive".into()));
        }
        if z.len() != a.len() {
            return Err(Error::Precondition(format!(
                "z has {} entries for {} columns",
                z.len(),
                a.len()
            )));
        }
        if let Some(&bad) = s.iter().find(|&&j| j >= a.len()) {
            return Err(Error::InvalidFlip(format!("column {bad} out of range")));
        }
        let mut s = s.to_vec();
        s.sort_unstable();
        s.dedup();
        let phase_exponent = s.iter().map(|&j| a.columns()[j].spin_sum()).sum();
        Ok(Self {
            columns: a.columns().to_vec(),
            z: z.clone(),
            s,
            h,
            phase_exponent,
        })
    }

    /// Where each factor's amplitude is read: column `j`, or its complement
    /// for flipped columns.
    pub fn evaluation_support(&self) -> Vec<BasisString> {
        self.columns
            .iter()
            .enumerate()
            .map(|(j, c)| if self.s.contains(&j) { c.complement() } else { c.clone() })
            .collect()
    }

    pub fn phase(&self) -> Complex64 {
        spinflip::minus_i_pow(-self.phase_exponent)
    }

    pub fn bidegree(&self) -> Result<Bidegree> {
        spinflip::bidegree(&self.z, &self.s, self.h)
    }

    fn check_support<'a>(&self, support: impl Iterator<Item = &'a BasisString>) -> Result<()> {
        let mut expected = self.evaluation_support();
        expected.sort();
        let mut got: Vec<&BasisString> = support.collect();
        got.sort();
        if got.len() != expected.len() || got.iter().zip(&expected).any(|(g, e)| *g != e) {
            return Err(Error::SupportMismatch);
        }
        Ok(())
    }
}

/// `phase · Π_{j∉s} ψ_j^{h·z_j} · Π_{j∈s} conj(ψ_j)^{h·z_j}`, reading flipped
/// factors at the complemented basis string.
pub fn detecting_monomial(s: &State, m: &MonomialSpec) -> Result<Complex64> {
    m.check_support(s.terms().map(|(b, _)| b))?;
    let mut value = m.phase();
    for (j, b) in m.evaluation_support().iter().enumerate() {
        let mut amp = s.amplitude(b);
        if m.s.contains(&j) {
            amp = amp.conj();
        }
        let e = m.h as i64 * m.z.weights()[j];
        if e < 0 && amp.norm() == 0.0 {
            return Err(Error::ZeroAtNegativeExponent(j));
        }
        value *= amp.powi(e as i32);
    }
    Ok(value)
}

/// Exact counterpart of [`detecting_monomial`].
pub fn detecting_monomial_exact(s: &ExactState, m: &MonomialSpec) -> Result<GaussianRational> {
    m.check_support(s.terms().map(|(b, _)| b))?;
    let mut value = GaussianRational::i_pow(m.phase_exponent);
    for (j, b) in m.evaluation_support().iter().enumerate() {
        let mut amp = s.amplitude(b);
        if m.s.contains(&j) {
            amp = amp.conj();
        }
        let e = m.h as i64 * m.z.weights()[j];
        if e < 0 && amp.is_zero() {
            return Err(Error::ZeroAtNegativeExponent(j));
        }
        value = &value * &amp.pow(e)?;
    }
    Ok(value)
}

/// Evaluates `p` on the state obtained by undoing the flip `f` on `flipped`.
/// `f` names the flipped part as it appears in `flipped`.
pub fn induced_value<F>(flipped: &State, f: &FlipSpec, p: F) -> Result<Complex64>
where
    F: Fn(&State) -> Result<Complex64>,
{
    let theta_tilde = f.theta(flipped)?;
    let original = spinflip::unflip(flipped, &theta_tilde)?;
    p(&original)
}
