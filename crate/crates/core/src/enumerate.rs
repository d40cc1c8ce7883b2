//! Census of irreducible A-classes.
//!
//! A support is irreducible exactly when its columns form a circuit (a
//! minimal linearly dependent set) of `{±1}^q`, so classes are found by
//! growing independent column sets one column at a time and recording the
//! circuits that appear. The search runs level by level over canonical
//! orbit representatives under row permutations and row negations, starting
//! from the single all-(−1) column; every independent set of size `m + 1`
//! contains one of size `m`, so every orbit is reached.
//!
//! Per representative, one elimination gives matrices `P`, `N` with
//! `P·M = diag(d)` and `N·M = 0`. A candidate column `c` is independent iff
//! `N·c ≠ 0`; otherwise `c = Σ (P_j·c / d_j) M_j` and the extended set is a
//! circuit iff every coefficient is nonzero.
//!
//! Circuits whose generator sums to zero (for instance any support with a
//! constant qubit) have no positive-degree detecting monomial and no phase
//! set; they are counted in [`ClassCensus::zero_sum_excluded`] but not listed.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::balance::{self, AMatrix, ZVector};
use crate::spinflip::{self, Bidegree, FlipOutcome};
use crate::topo::{self, PhaseSet};
use crate::{Error, Result};

pub const MIN_QUBITS: usize = 2;
pub const MAX_QUBITS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassKind {
    C,
    AOnly,
}

impl ClassKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassKind::C => "c",
            ClassKind::AOnly => "a_only",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusEntry {
    /// Canonical representative, columns in canonical order.
    pub matrix: AMatrix,
    pub z: ZVector,
    pub kind: ClassKind,
    pub length: usize,
    pub z_sum: i64,
    /// `(Σ_{j∉s} z_j, Σ_{j∈s} z_j)` over flip subsets `s`, one per distinct
    /// pair; for `a_only` classes, the class's own bidegree.
    pub bidegrees: Vec<Bidegree>,
    pub phase: PhaseSet,
    /// The kernel generator in first-positive orientation had negative sum,
    /// so the reported z is its complex-conjugate partner.
    pub conjugate: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCensus {
    pub qubits: usize,
    pub entries: Vec<CensusEntry>,
    pub zero_sum_excluded: usize,
}

impl ClassCensus {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sorted z-vector multisets of the entries.
    pub fn z_multisets(&self) -> Vec<Vec<i64>> {
        self.entries
            .iter()
            .map(|e| {
                let mut z = e.z.weights().to_vec();
                z.sort_unstable();
                z
            })
            .collect()
    }

    pub fn find(&self, matrix: &AMatrix) -> Option<&CensusEntry> {
        let key = balance::canonical_form(matrix).ok()?.0;
        self.entries.iter().find(|e| e.matrix == key)
    }
}

/// Row-permutation images of every column mask, for all `q!` permutations.
struct PermTable {
    q: usize,
    images: Vec<Vec<u8>>,
}

impl PermTable {
    fn new(q: usize) -> Self {
        let images = balance::permutations(q)
            .iter()
            .map(|perm| {
                (0..1u32 << q)
                    .map(|m| {
                        perm.iter()
                            .enumerate()
                            .fold(0u32, |acc, (i, &p)| acc | (((m >> (q - 1 - p)) & 1) << (q - 1 - i)))
                            as u8
                    })
                    .collect()
            })
            .collect();
        Self { q, images }
    }

    /// Packed canonical key of a column set (sorted masks, 7 bits each).
    fn canonical(&self, cols: &[u8]) -> u64 {
        let mut best = u64::MAX;
        let mut buf = [0u8; 8];
        let n = cols.len();
        for &neg in cols {
            for img in &self.images {
                for (b, &c) in buf.iter_mut().zip(cols) {
                    *b = img[(c ^ neg) as usize];
                }
                let slice = &mut buf[..n];
                slice.sort_unstable();
                let key = pack(slice);
                if key < best {
                    best = key;
                }
            }
        }
        best
    }

    fn all_columns(&self) -> impl Iterator<Item = u8> {
        0..(1u16 << self.q) as u8
    }
}

fn pack(masks: &[u8]) -> u64 {
    // A leading 1 bit keeps keys of different lengths distinct.
    masks.iter().fold(1u64, |acc, &m| (acc << 7) | m as u64)
}

fn unpack(mut key: u64) -> Vec<u8> {
    let mut out = Vec::new();
    while key > 1 {
        out.push((key & 0x7f) as u8);
        key >>= 7;
    }
    out.reverse();
    out
}

fn sign(mask: u8, k: usize, q: usize) -> i64 {
    if (mask >> (q - 1 - k)) & 1 == 1 {
        1
    } else {
        -1
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Elimination data for an independent column set.
struct Frame {
    /// Rows of `P` with their pivot value `d_j`, in column order.
    p: Vec<(Vec<i64>, i64)>,
    /// Rows of `N`.
    n: Vec<Vec<i64>>,
}

impl Frame {
    fn new(cols: &[u8], q: usize) -> Self {
        let m = cols.len();
        // Augmented rows [M | I] with one row per qubit.
        let mut rows: Vec<Vec<i64>> = (0..q)
            .map(|k| {
                let mut r: Vec<i64> = cols.iter().map(|&c| sign(c, k, q)).collect();
                r.extend((0..q).map(|i| (i == k) as i64));
                r
            })
            .collect();
        let mut piv_rows = Vec::with_capacity(m);
        let mut cur = 0;
        for c in 0..m {
            let p = (cur..q).find(|&r| rows[r][c] != 0).expect("columns are independent");
            rows.swap(cur, p);
            let pivot = rows[cur].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r == cur || row[c] == 0 {
                    continue;
                }
                let (a, b) = (pivot[c], row[c]);
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x = *x * a - b * y;
                }
                let g = row.iter().fold(0, |g, &x| gcd(g, x));
                if g > 1 {
                    row.iter_mut().for_each(|x| *x /= g);
                }
            }
            piv_rows.push(cur);
            cur += 1;
        }
        let p = piv_rows
            .iter()
            .enumerate()
            .map(|(j, &r)| (rows[r][m..].to_vec(), rows[r][j]))
            .collect();
        let n = rows[cur..].iter().map(|r| r[m..].to_vec()).collect();
        Self { p, n }
    }
}

fn dot(row: &[i64], mask: u8, q: usize) -> i64 {
    row.iter().enumerate().map(|(k, &v)| v * sign(mask, k, q)).sum()
}

enum Extension {
    Independent(u64),
    Circuit(u64),
    Neither,
}

fn extend(table: &PermTable, set: &[u8]) -> Vec<Extension> {
    let q = table.q;
    let frame = Frame::new(set, q);
    let mut out = Vec::new();
    for c in table.all_columns() {
        if set.contains(&c) {
            continue;
        }
        let mut next = set.to_vec();
        next.push(c);
        if frame.n.iter().any(|row| dot(row, c, q) != 0) {
            if next.len() <= q {
                out.push(Extension::Independent(table.canonical(&next)));
            }
        } else if frame.p.iter().all(|(row, _)| dot(row, c, q) != 0) {
            out.push(Extension::Circuit(table.canonical(&next)));
        } else {
            out.push(Extension::Neither);
        }
    }
    out
}

/// All irreducible A-classes on `q` qubits, `2 ≤ q ≤ 6`.
pub fn enumerate_irreducible(q: usize) -> Result<ClassCensus> {
    if !(MIN_QUBITS..=MAX_QUBITS).contains(&q) {
        return Err(Error::SizeGuard {
            what: "qubit count",
            value: q,
            limit: MAX_QUBITS,
        });
    }
    let table = PermTable::new(q);
    let mut level: Vec<u64> = vec![pack(&[0])];
    let mut circuits: BTreeSet<u64> = BTreeSet::new();
    while !level.is_empty() {
        let results: Vec<Vec<Extension>> = level.par_iter().map(|&key| extend(&table, &unpack(key))).collect();
        let mut next = BTreeSet::new();
        for ext in results.into_iter().flatten() {
            match ext {
                Extension::Independent(k) => {
                    next.insert(k);
                }
                Extension::Circuit(k) => {
                    circuits.insert(k);
                }
                Extension::Neither => {}
            }
        }
        level = next.into_iter().collect();
    }
    let keys: Vec<u64> = circuits.into_iter().collect();
    let all = keys
        .par_iter()
        .map(|&key| entry_for(q, &unpack(key)))
        .collect::<Result<Vec<_>>>()?;
    let total = all.len();
    let mut entries: Vec<CensusEntry> = all.into_iter().flatten().collect();
    let zero_sum_excluded = total - entries.len();
    entries.sort_by(|a, b| {
        (a.length, -a.z_sum, a.kind, a.matrix.masks()).cmp(&(b.length, -b.z_sum, b.kind, b.matrix.masks()))
    });
    Ok(ClassCensus {
        qubits: q,
        entries,
        zero_sum_excluded,
    })
}

fn entry_for(q: usize, masks: &[u8]) -> Result<Option<CensusEntry>> {
    let wide: Vec<u64> = masks.iter().map(|&m| m as u64).collect();
    let matrix = AMatrix::from_masks(q, &wide)?;
    let k = matrix.kernel();
    let ev = balance::is_irreducible(&matrix)?;
    if !ev.irreducible {
        return Err(Error::Precondition(format!("internal: {matrix:?} is not irreducible")));
    }
    let raw = &k.vectors()[0];
    let z = ZVector::from_big(raw)?;
    if z.sum() == 0 {
        return Ok(None);
    }
    let raw_sum: num_bigint::BigInt = raw.iter().sum();
    let conjugate = raw_sum < num_bigint::BigInt::from(0);
    let kind = if z.is_uniform_sign() {
        ClassKind::C
    } else {
        ClassKind::AOnly
    };
    let z_sum = z.sum();
    let bidegrees = match kind {
        ClassKind::C => c_bidegree_family(&z),
        ClassKind::AOnly => vec![spinflip::bidegree(&z, &[], 1)?],
    };
    Ok(Some(CensusEntry {
        length: matrix.len(),
        phase: topo::predicted_phase_set(&z),
        matrix,
        z,
        kind,
        z_sum,
        bidegrees,
        conjugate,
    }))
}

/// Distinct `(S − t, t)` over subset sums `t ≤ S/2` of a positive z.
fn c_bidegree_family(z: &ZVector) -> Vec<Bidegree> {
    let total = z.sum();
    let mut sums = BTreeSet::from([0i64]);
    for &w in z.weights() {
        let shifted: Vec<i64> = sums.iter().map(|s| s + w).collect();
        sums.extend(shifted);
    }
    sums.into_iter()
        .filter(|&t| 2 * t <= total)
        .map(|t| Bidegree::new((total - t) as u64, t as u64))
        .collect()
}

/// Canonical forms of the a-classes reached from each c-class by flipping a
/// single column, paired with whether the census lists them.
pub fn single_flip_closure(c: &ClassCensus) -> Result<Vec<(AMatrix, bool)>> {
    let mut out = Vec::new();
    for e in c.entries.iter().filter(|e| e.kind == ClassKind::C) {
        for j in 0..e.length {
            if let FlipOutcome::IrreducibleABalanced { canonical, .. } = spinflip::flip_outcome(&e.matrix, &e.z, &[j])?
            {
                let present = c
                    .entries
                    .iter()
                    .any(|x| x.kind == ClassKind::AOnly && x.matrix == canonical);
                out.push((canonical, present));
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CensusFormat {
    Json,
    Table,
}

pub fn census_report(c: &ClassCensus, format: CensusFormat) -> String {
    match format {
        CensusFormat::Json => serde_json::to_string_pretty(c).expect("census is serializable"),
        CensusFormat::Table => {
            let header = ["#", "L", "Σz", "kind", "z", "phase", "bidegrees", "columns"].map(String::from);
            let mut rows = vec![header.to_vec()];
            for (i, e) in c.entries.iter().enumerate() {
                let z: Vec<String> = e.z.weights().iter().map(|w| w.to_string()).collect();
                let bd: Vec<String> = e.bidegrees.iter().map(|b| b.to_string()).collect();
                let cols: Vec<String> = e.matrix.columns().iter().map(|b| b.to_string()).collect();
                rows.push(vec![
                    (i + 1).to_string(),
                    e.length.to_string(),
                    e.z_sum.to_string(),
                    e.kind.as_str().to_string(),
                    format!("({})", z.join(",")),
                    e.phase.to_string(),
                    bd.join(" "),
                    cols.join(" "),
                ]);
            }
            let widths: Vec<usize> = (0..8)
                .map(|k| rows.iter().map(|r| r[k].chars().count()).max().unwrap_or(0))
                .collect();
            let mut out = format!(
                "irreducible A-classes for q = {}: {} ({} zero-sum circuits not listed)\n",
                c.qubits,
                c.len(),
                c.zero_sum_excluded
            );
            for r in &rows {
                let cells: Vec<String> = r
                    .iter()
                    .zip(&widths)
                    .enumerate()
                    .map(|(k, (cell, &w))| {
                        let pad = w - cell.chars().count();
                        if k < 3 {
                            format!("{}{cell}", " ".repeat(pad))
                        } else {
                            format!("{cell}{}", " ".repeat(pad))
                        }
                    })
                    .collect();
                out.push_str(cells.join("  ").trim_end());
                out.push('\n');
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_qubits_single_class() {
        let c = enumerate_irreducible(2).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.entries[0].z.weights(), &[1, 1]);
    }

    #[test]
    fn three_qubit_classes() {
        let c = enumerate_irreducible(3).unwrap();
        assert_eq!(c.z_multisets(), vec![vec![1, 1], vec![1, 1, 1, 1], vec![-1, 1, 1, 1]]);
        let phases: Vec<String> = c.entries.iter().map(|e| e.phase.to_string()).collect();
        assert_eq!(phases, ["π", "π/2", "π"]);
        assert!(single_flip_closure(&c).unwrap().iter().all(|(_, p)| *p));
    }

    #[test]
    fn guard() {
        assert!(enumerate_irreducible(1).is_err());
        assert!(enumerate_irreducible(7).is_err());
    }

    #[test]
    fn pack_round_trip() {
        assert_eq!(unpack(pack(&[0, 5, 63])), vec![0, 5, 63]);
        assert_ne!(pack(&[0]), pack(&[0, 0]));
    }

    #[test]
    fn table_view() {
        let c = enumerate_irreducible(3).unwrap();
        let t = census_report(&c, CensusFormat::Table);
        assert_eq!(t.lines().count(), 5);
        let empty = ClassCensus {
            qubits: 3,
            entries: vec![],
            zero_sum_excluded: 0,
        };
        assert_eq!(census_report(&empty, CensusFormat::Table).lines().count(), 2);
    }
}
