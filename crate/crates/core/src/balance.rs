//! A-matrices and balancedness.
//!
//! Column `j` of the A-matrix is basis term `j` of the state (canonical order)
//! written as a ±1 vector, `0 ↦ −1`. Classification reads only the kernel of
//! that matrix:
//!
//! * `c_balanced`: a strictly positive kernel vector exists;
//! * `a_balanced_only`: not c, but a kernel vector without zeros exists;
//! * `partly_balanced`: a nonzero kernel exists but some coordinates are forced
//!   to zero;
//! * `unbalanced`: the kernel is trivial.
//!
//! Irreducibility is decided by the kernel dimension (exactly one, with a
//! fully supported generator), which is equivalent to no proper subset of the
//! columns carrying a kernel vector of its own.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::exactlin::{self, IntMatrix, KernelBasis};
use crate::statekit::{BasisString, State};
use crate::{Error, Result};

/// Largest support for which [`balanced_parts`] enumerates subsets.
pub const PARTS_MAX_LEN: usize = 20;

/// Largest qubit count for which [`canonical_form`] is exhaustive.
pub const CANONICAL_MAX_QUBITS: usize = 8;

/// A `q × L` matrix over `{+1, −1}` with pairwise distinct columns.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AMatrix {
    qubits: usize,
    columns: Vec<BasisString>,
}

impl AMatrix {
    pub fn new(qubits: usize, columns: Vec<BasisString>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::ZeroState);
        }
        if let Some(bad) = columns.iter().find(|c| c.len() != qubits) {
            return Err(Error::QubitCount {
                expected: qubits,
                found: bad.len(),
            });
        }
        let distinct: BTreeSet<_> = columns.iter().collect();
        if distinct.len() != columns.len() {
            return Err(Error::Precondition("A-matrix columns must be distinct".into()));
        }
        Ok(Self { qubits, columns })
    }

    /// Columns given as bit masks, row 0 in the most significant position.
    pub fn from_masks(qubits: usize, masks: &[u64]) -> Result<Self> {
        Self::new(
            qubits,
            masks.iter().map(|&m| BasisString::from_mask(m, qubits)).collect(),
        )
    }

    /// Columns given as bit strings such as `"0110"`.
    pub fn from_bit_strings(cols: &[&str]) -> Result<Self> {
        let columns = cols.iter().map(|c| c.parse()).collect::<Result<Vec<BasisString>>>()?;
        let q = columns.first().map_or(0, BasisString::len);
        Self::new(q, columns)
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn columns(&self) -> &[BasisString] {
        &self.columns
    }

    pub fn masks(&self) -> Vec<u64> {
        self.columns.iter().map(BasisString::to_mask).collect()
    }

    pub fn entry(&self, row: usize, col: usize) -> i64 {
        self.columns[col].sign(row)
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.qubits).map(|k| self.entry(k, j)).collect()
    }

    pub fn row(&self, k: usize) -> Vec<i64> {
        (0..self.len()).map(|j| self.entry(k, j)).collect()
    }

    pub fn to_int_matrix(&self) -> IntMatrix {
        let rows: Vec<Vec<i64>> = (0..self.qubits).map(|k| self.row(k)).collect();
        IntMatrix::from_rows(&rows)
    }

    pub fn kernel(&self) -> KernelBasis {
        exactlin::kernel_basis(&self.to_int_matrix())
    }

    /// Sub-matrix on the given columns, in the given order.
    pub fn select(&self, cols: &[usize]) -> Result<Self> {
        let columns =
            cols.iter()
                .map(|&j| {
                    self.columns.get(j).cloned().ok_or_else(|| {
                        Error::Precondition(format!("column {j} out of range for length {}", self.len()))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
        Self::new(self.qubits, columns)
    }

    /// Negates row `k` (a σ_x on qubit `k`).
    pub fn negate_row(&self, k: usize) -> Self {
        Self {
            qubits: self.qubits,
            columns: self.columns.iter().map(|c| c.with_bit_flipped(k)).collect(),
        }
    }

    /// Applies a symmetry element: negate the rows in `negate`, then reorder
    /// rows (new row `i` is old row `row_perm[i]`), then reorder columns (new
    /// column `j` is old column `col_perm[j]`).
    pub fn transformed(&self, negate: &[bool], row_perm: &[usize], col_perm: &[usize]) -> Result<Self> {
        check_perm(row_perm, self.qubits)?;
        check_perm(col_perm, self.len())?;
        if negate.len() != self.qubits {
            return Err(Error::QubitCount {
                expected: self.qubits,
                found: negate.len(),
            });
        }
        let columns = col_perm
            .iter()
            .map(|&j| {
                let mut c = self.columns[j].clone();
                for (k, &n) in negate.iter().enumerate() {
                    if n {
                        c = c.with_bit_flipped(k);
                    }
                }
                c.permuted(row_perm)
            })
            .collect();
        Self::new(self.qubits, columns)
    }

    /// Column indices repeated `|z_j|` times: the view in which a weight-`n`
    /// column counts as `n` unit columns.
    pub fn split_view(&self, z: &ZVector) -> Vec<usize> {
        z.weights()
            .iter()
            .enumerate()
            .flat_map(|(j, w)| std::iter::repeat_n(j, w.unsigned_abs() as usize))
            .collect()
    }
}

fn check_perm(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::Precondition(format!("{perm:?} is not a permutation of 0..{n}")));
        }
    }
    if perm.len() != n {
        return Err(Error::Precondition(format!("{perm:?} is not a permutation of 0..{n}")));
    }
    Ok(())
}

impl fmt::Debug for AMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cols: Vec<String> = self.columns.iter().map(|c| c.to_string()).collect();
        write!(f, "AMatrix[{}]({})", self.qubits, cols.join(","))
    }
}

impl fmt::Display for AMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 0..self.qubits {
            let row: Vec<String> = self.row(k).iter().map(|v| format!("{v:>2}")).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// A-matrix of the state's support, columns in canonical term order.
pub fn a_matrix_of(s: &State) -> Result<AMatrix> {
    if s.is_zero() {
        return Err(Error::ZeroState);
    }
    AMatrix::new(s.qubits(), s.basis())
}

/// Primitive integer weights on the columns of an A-matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ZVector {
    weights: Vec<i64>,
}

impl ZVector {
    /// Divides out the content and applies the sign convention: positive sum,
    /// or first nonzero entry positive when the sum vanishes.
    pub fn from_weights(weights: Vec<i64>) -> Result<Self> {
        let big = exactlin::from_i64_vec(&weights);
        Self::from_big(&big)
    }

    /// Same as [`ZVector::from_weights`], failing if an entry exceeds `i64`.
    pub fn from_big(v: &[BigInt]) -> Result<Self> {
        if v.iter().all(Zero::is_zero) {
            return Err(Error::Precondition("z-vector must be nonzero".into()));
        }
        let p = exactlin::primitive_z_convention(v);
        Ok(Self {
            weights: exactlin::to_i64_vec(&p)?,
        })
    }

    /// Wraps weights as given, without normalization.
    pub fn raw(weights: Vec<i64>) -> Self {
        Self { weights }
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn sum(&self) -> i64 {
        self.weights.iter().sum()
    }

    pub fn abs(&self) -> Self {
        Self {
            weights: self.weights.iter().map(|w| w.abs()).collect(),
        }
    }

    pub fn is_uniform_sign(&self) -> bool {
        self.weights.iter().all(|&w| w > 0) || self.weights.iter().all(|&w| w < 0)
    }

    pub fn has_full_support(&self) -> bool {
        self.weights.iter().all(|&w| w != 0)
    }

    pub fn negative_columns(&self) -> Vec<usize> {
        (0..self.len()).filter(|&j| self.weights[j] < 0).collect()
    }

    /// Whether `a · z = 0`.
    pub fn annihilated_by(&self, a: &AMatrix) -> bool {
        self.len() == a.len()
            && (0..a.qubits()).all(|k| (0..a.len()).map(|j| a.entry(k, j) * self.weights[j]).sum::<i64>() == 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BalanceClass {
    CBalanced,
    ABalancedOnly,
    PartlyBalanced,
    Unbalanced,
}

impl BalanceClass {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::CBalanced => "c_balanced",
            Self::ABalancedOnly => "a_balanced_only",
            Self::PartlyBalanced => "partly_balanced",
            Self::Unbalanced => "unbalanced",
        }
    }
}

impl fmt::Display for BalanceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalanceReport {
    pub class: BalanceClass,
    pub irreducible: bool,
    pub kernel_dim: usize,
    /// Present iff irreducible.
    pub z: Option<ZVector>,
    pub z_sum: Option<i64>,
    pub forced_zeros: Vec<BasisString>,
    pub length: usize,
    /// The support in column order.
    pub terms: Vec<BasisString>,
}

impl BalanceReport {
    /// Irreducible with a uniform-sign generator.
    pub fn is_c_irreducible(&self) -> bool {
        self.irreducible && self.class == BalanceClass::CBalanced
    }

    pub fn is_a_irreducible(&self) -> bool {
        self.irreducible && self.class == BalanceClass::ABalancedOnly
    }
}

pub fn balance_report(s: &State) -> Result<BalanceReport> {
    balance_report_of(&a_matrix_of(s)?)
}

/// Balance report computed from the A-matrix alone.
pub fn balance_report_of(a: &AMatrix) -> Result<BalanceReport> {
    let m = a.to_int_matrix();
    let k = exactlin::kernel_basis(&m);
    let forced = exactlin::forced_zeros(&k);
    let class = if exactlin::positive_witness(&m).is_some() {
        BalanceClass::CBalanced
    } else if exactlin::nonzero_witness_from_basis(&k).is_some() {
        BalanceClass::ABalancedOnly
    } else if k.dim() > 0 {
        BalanceClass::PartlyBalanced
    } else {
        BalanceClass::Unbalanced
    };
    let irreducible = k.dim() == 1 && forced.is_empty();
    let z = if irreducible {
        Some(ZVector::from_big(&k.vectors()[0])?)
    } else {
        None
    };
    Ok(BalanceReport {
        class,
        irreducible,
        kernel_dim: k.dim(),
        z_sum: z.as_ref().map(ZVector::sum),
        z,
        forced_zeros: forced.iter().map(|&j| a.columns[j].clone()).collect(),
        length: a.len(),
        terms: a.columns.clone(),
    })
}

/// Outcome of the irreducibility test with the data that decided it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Irreducibility {
    pub irreducible: bool,
    pub kernel_dim: usize,
    /// Column indices that vanish on the whole kernel.
    pub forced_zeros: Vec<usize>,
    /// The generator when the kernel is one-dimensional.
    pub generator: Option<Vec<i64>>,
}

pub fn is_irreducible(a: &AMatrix) -> Result<Irreducibility> {
    let k = a.kernel();
    let forced = exactlin::forced_zeros(&k);
    let generator = if k.dim() == 1 {
        Some(exactlin::to_i64_vec(&exactlin::primitive_z_convention(
            &k.vectors()[0],
        ))?)
    } else {
        None
    };
    Ok(Irreducibility {
        irreducible: k.dim() == 1 && forced.is_empty(),
        kernel_dim: k.dim(),
        forced_zeros: forced,
        generator,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartKind {
    /// Positive witness.
    C,
    /// Witness without zeros, signs unrestricted.
    A,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalancedPart {
    pub columns: Vec<usize>,
    pub terms: Vec<BasisString>,
    /// Primitive witness on `columns`, in the same order.
    pub witness: Vec<i64>,
}

/// All support-minimal balanced column subsets.
///
/// A minimal a-part is exactly a circuit of the column matroid (a minimal
/// dependent set): its kernel is one-dimensional and fully supported. A
/// minimal c-part is a circuit whose generator has uniform sign, because any
/// positive kernel vector is a conformal sum of circuit vectors. Circuits are
/// found by extending independent sets in increasing index order.
pub fn balanced_parts(a: &AMatrix, kind: PartKind) -> Result<Vec<BalancedPart>> {
    if a.len() > PARTS_MAX_LEN {
        return Err(Error::SizeGuard {
            what: "support length",
            value: a.len(),
            limit: PARTS_MAX_LEN,
        });
    }
    let m = a.to_int_matrix();
    let mut out = Vec::new();
    let mut stack: Vec<Vec<usize>> = vec![Vec::new()];
    while let Some(set) = stack.pop() {
        let start = set.last().map_or(0, |&l| l + 1);
        for j in start..a.len() {
            let mut next = set.clone();
            next.push(j);
            let k = exactlin::kernel_basis(&m.select_columns(&next)?);
            match k.dim() {
                0 => stack.push(next),
                _ => {
                    let v = &k.vectors()[0];
                    if v.iter().any(Zero::is_zero) {
                        continue;
                    }
                    let uniform = v.iter().all(Signed::is_positive) || v.iter().all(Signed::is_negative);
                    if kind == PartKind::A || uniform {
                        let w = exactlin::to_i64_vec(&exactlin::primitive_z_convention(v))?;
                        out.push(BalancedPart {
                            terms: next.iter().map(|&c| a.columns[c].clone()).collect(),
                            columns: next,
                            witness: w,
                        });
                    }
                }
            }
        }
    }
    out.sort_by(|x, y| (x.columns.len(), &x.columns).cmp(&(y.columns.len(), &y.columns)));
    Ok(out)
}

/// The symmetry element taking an A-matrix to its canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transform {
    /// Rows negated before permuting.
    pub negate: Vec<bool>,
    /// New row `i` is old row `row_perm[i]`.
    pub row_perm: Vec<usize>,
    /// Canonical column `j` is original column `col_perm[j]`.
    pub col_perm: Vec<usize>,
}

impl Transform {
    pub fn apply(&self, a: &AMatrix) -> Result<AMatrix> {
        a.transformed(&self.negate, &self.row_perm, &self.col_perm)
    }

    /// Reconstructs the original matrix from its image.
    pub fn invert(&self, image: &AMatrix) -> Result<AMatrix> {
        let q = image.qubits();
        let l = image.len();
        check_perm(&self.row_perm, q)?;
        check_perm(&self.col_perm, l)?;
        let mut inv_rows = vec![0; q];
        for (i, &p) in self.row_perm.iter().enumerate() {
            inv_rows[p] = i;
        }
        let mut columns = vec![image.columns[0].clone(); l];
        for (j, &orig) in self.col_perm.iter().enumerate() {
            let mut c = image.columns[j].permuted(&inv_rows);
            for (k, &n) in self.negate.iter().enumerate() {
                if n {
                    c = c.with_bit_flipped(k);
                }
            }
            columns[orig] = c;
        }
        AMatrix::new(q, columns)
    }
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut p: Vec<usize> = (0..n).collect();
    let mut out = vec![p.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
        p.swap(i - 1, j);
        p[i..].reverse();
        out.push(p.clone());
    }
}

/// Row `k` sits at bit `q − 1 − k`.
fn permute_mask(mask: u64, perm: &[usize], q: usize) -> u64 {
    perm.iter()
        .enumerate()
        .fold(0, |acc, (i, &p)| acc | (((mask >> (q - 1 - p)) & 1) << (q - 1 - i)))
}

/// Canonical representative of the A-class: the lexicographically smallest
/// sorted column-mask tuple over all row negations and row permutations.
///
/// The smallest tuple always contains the all-(−1) column, and a negation
/// pattern produces that column only if it equals one of the columns, so
/// only `L` negation patterns need to be tried for each row permutation.
pub fn canonical_form(a: &AMatrix) -> Result<(AMatrix, Transform)> {
    let q = a.qubits();
    if q > CANONICAL_MAX_QUBITS {
        return Err(Error::SizeGuard {
            what: "qubit count",
            value: q,
            limit: CANONICAL_MAX_QUBITS,
        });
    }
    let masks = a.masks();
    let perms = permutations(q);
    let mut best: Option<(Vec<u64>, u64, usize)> = None;
    let mut buf = vec![0u64; masks.len()];
    for &neg in &masks {
        for (pi, perm) in perms.iter().enumerate() {
            for (b, &m) in buf.iter_mut().zip(&masks) {
                *b = permute_mask(m ^ neg, perm, q);
            }
            buf.sort_unstable();
            if best.as_ref().is_none_or(|(k, _, _)| buf < *k) {
                best = Some((buf.clone(), neg, pi));
            }
        }
    }
    let (key, neg, pi) = best.expect("at least one column");
    let perm = &perms[pi];
    let mut col_perm: Vec<usize> = (0..masks.len()).collect();
    col_perm.sort_by_key(|&j| permute_mask(masks[j] ^ neg, perm, q));
    let negate: Vec<bool> = (0..q).map(|k| (neg >> (q - 1 - k)) & 1 == 1).collect();
    let canon = AMatrix::from_masks(q, &key)?;
    Ok((
        canon,
        Transform {
            negate,
            row_perm: perm.clone(),
            col_perm,
        },
    ))
}

/// The sorted column masks of the canonical form.
pub fn canonical_key(a: &AMatrix) -> Result<Vec<u64>> {
    Ok(canonical_form(a)?.0.masks())
}
