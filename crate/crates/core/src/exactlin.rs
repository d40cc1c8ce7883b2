//! Exact linear algebra over the integers.
//!
//! Everything here uses arbitrary-precision integers or rationals. Kernel
//! bases come from a content-reduced fraction-free Gauss–Jordan elimination;
//! strict positivity is decided by an exact phase-one simplex with Bland's
//! rule.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// Dense integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Precondition("matrix needs at least one row and column".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::Precondition(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Self { rows, cols, entries })
    }

    /// Builds from `i64` rows; panics on ragged or empty input.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        let entries = rows.iter().flatten().map(|&x| BigInt::from(x)).collect();
        Self::new(rows.len(), cols, entries).expect("nonempty matrix")
    }

    /// Builds from columns given as `i64` vectors.
    pub fn from_columns(columns: &[Vec<i64>]) -> Self {
        let rows = columns.first().map_or(0, Vec::len);
        let t: Vec<Vec<i64>> = (0..rows).map(|r| columns.iter().map(|c| c[r]).collect()).collect();
        Self::from_rows(&t)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.entries[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Sub-matrix on the given columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Self> {
        let mut entries = Vec::with_capacity(self.rows * cols.len());
        for r in 0..self.rows {
            for &c in cols {
                entries.push(self.get(r, c).clone());
            }
        }
        Self::new(self.rows, cols.len(), entries)
    }
}

/// A basis of the rational kernel, cleared to primitive integer vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelBasis {
    cols: usize,
    vectors: Vec<Vec<BigInt>>,
}

impl KernelBasis {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn vectors(&self) -> &[Vec<BigInt>] {
        &self.vectors
    }
}

/// Divides out the content; the zero vector is returned unchanged.
pub fn primitive(v: &[BigInt]) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

/// Primitive form with the first nonzero entry positive.
pub fn primitive_first_positive(v: &[BigInt]) -> Vec<BigInt> {
    let p = primitive(v);
    match p.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => p.iter().map(|x| -x).collect(),
        _ => p,
    }
}

/// Primitive form with the z-vector sign convention: positive sum, or first
/// nonzero entry positive when the sum vanishes.
pub fn primitive_z_convention(v: &[BigInt]) -> Vec<BigInt> {
    let p = primitive(v);
    let sum: BigInt = p.iter().sum();
    match sum.sign() {
        num_bigint::Sign::Minus => p.iter().map(|x| -x).collect(),
        num_bigint::Sign::Plus => p,
        num_bigint::Sign::NoSign => primitive_first_positive(&p),
    }
}

fn reduce_content(row: &mut [BigInt]) {
    let g = row.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in row.iter_mut() {
            *x /= &g;
        }
    }
}

/// Reduced row echelon form up to row scaling: returns the rows (pivot rows
/// only) and the pivot column of each.
fn echelon(m: &IntMatrix) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let mut rows = m.to_rows();
    let mut pivots = Vec::new();
    let mut cur = 0;
    for c in 0..m.cols {
        if cur == rows.len() {
            break;
        }
        let Some(p) = (cur..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(cur, p);
        let pivot_row = rows[cur].clone();
        let pv = pivot_row[c].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == cur || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x = &*x * &pv - &f * y;
            }
            reduce_content(row);
        }
        reduce_content(&mut rows[cur]);
        pivots.push(c);
        cur += 1;
    }
    rows.truncate(cur);
    (rows, pivots)
}

pub fn rank(m: &IntMatrix) -> usize {
    echelon(m).1.len()
}

/// Exact kernel basis; `dim = cols − rank`. Each vector is primitive with its
/// first nonzero entry positive.
pub fn kernel_basis(m: &IntMatrix) -> KernelBasis {
    let (rows, pivots) = echelon(m);
    let mut vectors = Vec::new();
    for free in (0..m.cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![BigRational::zero(); m.cols];
        v[free] = BigRational::one();
        for (row, &pc) in rows.iter().zip(&pivots) {
            v[pc] = -BigRational::new(row[free].clone(), row[pc].clone());
        }
        vectors.push(primitive_first_positive(&clear_denominators(&v)));
    }
    KernelBasis { cols: m.cols, vectors }
}

/// Scales a rational vector by the lcm of its denominators.
pub fn clear_denominators(v: &[BigRational]) -> Vec<BigInt> {
    let l = v.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    v.iter()
        .map(|x| (x * BigRational::from_integer(l.clone())).to_integer())
        .collect()
}

/// Coordinates that vanish on the whole kernel. A trivial kernel forces every
/// coordinate.
pub fn forced_zeros(k: &KernelBasis) -> Vec<usize> {
    (0..k.cols)
        .filter(|&j| k.vectors.iter().all(|v| v[j].is_zero()))
        .collect()
}

/// A strictly positive integer kernel vector, if one exists.
///
/// Feasibility of `M z = 0, z ≥ 1` is decided exactly: with `z = 1 + y` this
/// is `M y = −M·1, y ≥ 0`, solved by phase-one simplex.
pub fn positive_witness(m: &IntMatrix) -> Option<Vec<BigInt>> {
    let ones = vec![BigInt::one(); m.cols];
    let b: Vec<BigInt> = m.mul_vec(&ones).into_iter().map(|x| -x).collect();
    let y = feasible_nonnegative(m, &b)?;
    let z: Vec<BigRational> = y.into_iter().map(|v| v + BigRational::one()).collect();
    Some(primitive(&clear_denominators(&z)))
}

/// Finds `y ≥ 0` with `M y = b`, or `None`. Dense exact tableau, Bland's rule.
fn feasible_nonnegative(m: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigRational>> {
    let (rows, n) = (m.rows, m.cols);
    let width = n + rows + 1;
    let rhs = width - 1;
    let mut t: Vec<Vec<BigRational>> = (0..rows)
        .map(|r| {
            let flip = b[r].is_negative();
            let mut line = vec![BigRational::zero(); width];
            for (c, slot) in line.iter_mut().take(n).enumerate() {
                let v = BigRational::from_integer(m.get(r, c).clone());
                *slot = if flip { -v } else { v };
            }
            line[n + r] = BigRational::one();
            line[rhs] = BigRational::from_integer(b[r].abs());
            line
        })
        .collect();
    let mut basis: Vec<usize> = (n..n + rows).collect();
    // Reduced costs for minimizing the sum of artificials.
    let mut obj = vec![BigRational::zero(); width];
    for line in &t {
        for c in 0..n {
            obj[c] -= &line[c];
        }
        obj[rhs] -= &line[rhs];
    }
    while let Some(enter) = (0..n + rows).find(|&c| obj[c].is_negative()) {
        let mut leave: Option<usize> = None;
        for r in 0..rows {
            if !t[r][enter].is_positive() {
                continue;
            }
            let ratio = &t[r][rhs] / &t[r][enter];
            leave = match leave {
                None => Some(r),
                Some(l) => {
                    let best = &t[l][rhs] / &t[l][enter];
                    match ratio.cmp(&best) {
                        Ordering::Less => Some(r),
                        Ordering::Equal if basis[r] < basis[l] => Some(r),
                        _ => Some(l),
                    }
                }
            };
        }
        // The phase-one objective is bounded below by zero, so a ratio row exists.
        let l = leave.expect("phase-one simplex is bounded");
        let pv = t[l][enter].clone();
        for x in t[l].iter_mut() {
            *x /= &pv;
        }
        let pivot_row = t[l].clone();
        for (r, line) in t.iter_mut().enumerate() {
            if r == l || line[enter].is_zero() {
                continue;
            }
            let f = line[enter].clone();
            for (x, y) in line.iter_mut().zip(&pivot_row) {
                *x -= &f * y;
            }
        }
        let f = obj[enter].clone();
        for (x, y) in obj.iter_mut().zip(&pivot_row) {
            *x -= &f * y;
        }
        basis[l] = enter;
    }
    if !obj[rhs].is_zero() {
        return None;
    }
    let mut y = vec![BigRational::zero(); n];
    for (r, &v) in basis.iter().enumerate() {
        if v < n {
            y[v] = t[r][rhs].clone();
        }
    }
    Some(y)
}

/// An integer kernel vector with no zero coordinate, if one exists.
///
/// Starts from the first basis vector and, for each zero coordinate, adds the
/// smallest positive multiple of a basis vector that is nonzero there without
/// creating new zeros. The result is primitive and follows the z-vector sign
/// convention.
pub fn nonzero_witness(m: &IntMatrix) -> Option<Vec<BigInt>> {
    let k = kernel_basis(m);
    nonzero_witness_from_basis(&k)
}

pub fn nonzero_witness_from_basis(k: &KernelBasis) -> Option<Vec<BigInt>> {
    if k.dim() == 0 || !forced_zeros(k).is_empty() {
        return None;
    }
    let mut v = k.vectors[0].clone();
    for j in 0..k.cols {
        if !v[j].is_zero() {
            continue;
        }
        let b = k
            .vectors
            .iter()
            .find(|b| !b[j].is_zero())
            .expect("coordinate not forced");
        let mut t = BigInt::one();
        loop {
            let w: Vec<BigInt> = v.iter().zip(b).map(|(x, y)| x + &t * y).collect();
            let keeps = v.iter().zip(&w).all(|(old, new)| old.is_zero() || !new.is_zero());
            if keeps {
                v = w;
                break;
            }
            t += 1;
        }
    }
    Some(primitive_z_convention(&v))
}

/// Unimodular row reduction: returns `(H, U)` with `H = U·G` in row echelon
/// form (zero rows dropped from `H`, and the matching rows of `U` kept first).
pub fn integer_echelon(gens: &[Vec<BigInt>]) -> (Vec<Vec<BigInt>>, Vec<Vec<BigInt>>) {
    let k = gens.len();
    let n = gens.first().map_or(0, Vec::len);
    let mut h: Vec<Vec<BigInt>> = gens.to_vec();
    let mut u: Vec<Vec<BigInt>> = (0..k)
        .map(|i| (0..k).map(|j| BigInt::from((i == j) as i64)).collect())
        .collect();
    let mut cur = 0;
    for c in 0..n {
        if cur == k {
            break;
        }
        loop {
            let nonzero: Vec<usize> = (cur..k).filter(|&r| !h[r][c].is_zero()).collect();
            if nonzero.is_empty() {
                break;
            }
            let p = *nonzero.iter().min_by_key(|&&r| h[r][c].abs()).expect("nonempty");
            h.swap(cur, p);
            u.swap(cur, p);
            if nonzero.len() == 1 {
                break;
            }
            for r in cur + 1..k {
                if h[r][c].is_zero() {
                    continue;
                }
                let q = h[r][c].div_floor(&h[cur][c]);
                let (hp, up) = (h[cur].clone(), u[cur].clone());
                for (x, y) in h[r].iter_mut().zip(&hp) {
                    *x -= &q * y;
                }
                for (x, y) in u[r].iter_mut().zip(&up) {
                    *x -= &q * y;
                }
            }
        }
        if (cur..k).any(|r| !h[r][c].is_zero()) {
            cur += 1;
        }
    }
    h.truncate(cur);
    (h, u)
}

/// Integer coefficients `c` with `Σ cᵢ·gensᵢ = target`, if the target lies in
/// the lattice spanned by the generator rows.
pub fn lattice_solve(gens: &[Vec<BigInt>], target: &[BigInt]) -> Option<Vec<BigInt>> {
    if gens.is_empty() {
        return target.iter().all(Zero::is_zero).then(Vec::new);
    }
    let (h, u) = integer_echelon(gens);
    let mut residual = target.to_vec();
    let mut x = vec![BigInt::zero(); gens.len()];
    for (r, row) in h.iter().enumerate() {
        let p = row.iter().position(|v| !v.is_zero()).expect("echelon rows are nonzero");
        let (q, rem) = residual[p].div_rem(&row[p]);
        if !rem.is_zero() {
            return None;
        }
        for (res, y) in residual.iter_mut().zip(row) {
            *res -= &q * y;
        }
        x[r] = q;
    }
    if !residual.iter().all(Zero::is_zero) {
        return None;
    }
    let coeffs = (0..gens.len())
        .map(|j| x.iter().zip(&u).map(|(xi, ui)| xi * &ui[j]).sum())
        .collect();
    Some(coeffs)
}

/// A rational solution of `M x = b` with free variables set to zero, or
/// `None` when the system is inconsistent.
pub fn solve_rational(m: &IntMatrix, b: &[BigRational]) -> Option<Vec<BigRational>> {
    assert_eq!(b.len(), m.rows);
    let mut aug: Vec<Vec<BigRational>> = (0..m.rows)
        .map(|r| {
            let mut line: Vec<BigRational> = m.row(r).iter().map(|x| BigRational::from_integer(x.clone())).collect();
            line.push(b[r].clone());
            line
        })
        .collect();
    let mut pivots = Vec::new();
    let mut cur = 0;
    for c in 0..m.cols {
        let Some(p) = (cur..m.rows).find(|&r| !aug[r][c].is_zero()) else {
            continue;
        };
        aug.swap(cur, p);
        let pv = aug[cur][c].clone();
        for x in aug[cur].iter_mut() {
            *x /= &pv;
        }
        let pivot_row = aug[cur].clone();
        for (r, line) in aug.iter_mut().enumerate() {
            if r != cur && !line[c].is_zero() {
                let f = line[c].clone();
                for (x, y) in line.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        cur += 1;
        if cur == m.rows {
            break;
        }
    }
    if aug[cur..].iter().any(|line| !line[m.cols].is_zero()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); m.cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][m.cols].clone();
    }
    Some(x)
}

pub fn to_i64_vec(v: &[BigInt]) -> Result<Vec<i64>> {
    v.iter()
        .map(|x| i64::try_from(x).map_err(|_| Error::Overflow(x.to_string())))
        .collect()
}

pub fn from_i64_vec(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        from_i64_vec(v)
    }

    fn ghz3() -> IntMatrix {
        IntMatrix::from_columns(&[vec![-1, -1, -1], vec![1, 1, 1]])
    }

    fn w() -> IntMatrix {
        IntMatrix::from_columns(&[vec![1, -1, -1], vec![-1, 1, -1], vec![-1, -1, 1]])
    }

    /// Columns for 000, 100, 010, 001.
    fn w_prime() -> IntMatrix {
        IntMatrix::from_columns(&[vec![-1, -1, -1], vec![1, -1, -1], vec![-1, 1, -1], vec![-1, -1, 1]])
    }

    fn x3() -> IntMatrix {
        IntMatrix::from_columns(&[vec![1, 1, 1], vec![1, -1, -1], vec![-1, 1, -1], vec![-1, -1, 1]])
    }

    /// Columns for 000, 001, 010, 101, 110.
    fn h1_w_prime() -> IntMatrix {
        IntMatrix::from_columns(&[
            vec![-1, -1, -1],
            vec![-1, -1, 1],
            vec![-1, 1, -1],
            vec![1, -1, 1],
            vec![1, 1, -1],
        ])
    }

    #[test]
    fn kernels_of_three_qubit_fixtures() {
        let k = kernel_basis(&ghz3());
        assert_eq!(k.vectors(), &[big(&[1, 1])]);
        assert_eq!(kernel_basis(&w()).dim(), 0);
        let k = kernel_basis(&w_prime());
        assert_eq!(k.dim(), 1);
        assert_eq!(primitive_z_convention(&k.vectors()[0]), big(&[-1, 1, 1, 1]));
    }

    #[test]
    fn positive_witnesses() {
        assert_eq!(positive_witness(&ghz3()), Some(big(&[1, 1])));
        assert_eq!(positive_witness(&w_prime()), None);
        assert_eq!(positive_witness(&x3()), Some(big(&[1, 1, 1, 1])));
        assert_eq!(positive_witness(&w()), None);
        let x4 = IntMatrix::from_columns(&[
            vec![1, 1, 1, 1],
            vec![1, -1, -1, -1],
            vec![-1, 1, -1, -1],
            vec![-1, -1, 1, -1],
            vec![-1, -1, -1, 1],
        ]);
        assert_eq!(positive_witness(&x4), Some(big(&[2, 1, 1, 1, 1])));
    }

    #[test]
    fn nonzero_witnesses() {
        assert_eq!(nonzero_witness(&w_prime()), Some(big(&[-1, 1, 1, 1])));
        assert_eq!(nonzero_witness(&w()), None);
        assert_eq!(nonzero_witness(&h1_w_prime()), None);
        // Two disjoint antipodal pairs: the constructive combination fills both.
        let m = IntMatrix::from_columns(&[vec![1, 1], vec![-1, -1], vec![1, -1], vec![-1, 1]]);
        let v = nonzero_witness(&m).unwrap();
        assert!(v.iter().all(|x| !x.is_zero()));
        assert!(m.mul_vec(&v).iter().all(Zero::is_zero));
    }

    #[test]
    fn forced_zero_sets() {
        let k = kernel_basis(&h1_w_prime());
        assert_eq!(k.dim(), 2);
        assert_eq!(forced_zeros(&k), vec![0]);
        assert_eq!(forced_zeros(&kernel_basis(&w())), vec![0, 1, 2]);
        assert!(forced_zeros(&kernel_basis(&ghz3())).is_empty());
    }

    #[test]
    fn rational_solve() {
        let m = IntMatrix::from_rows(&[vec![1, 1], vec![1, -1]]);
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(solve_rational(&m, &[q(1, 1), q(0, 1)]), Some(vec![q(1, 2), q(1, 2)]));
        let singular = IntMatrix::from_rows(&[vec![1, 1], vec![2, 2]]);
        assert_eq!(solve_rational(&singular, &[q(1, 1), q(3, 1)]), None);
        assert_eq!(
            solve_rational(&singular, &[q(1, 1), q(2, 1)]),
            Some(vec![q(1, 1), q(0, 1)])
        );
    }

    #[test]
    fn lattice_membership() {
        let gens = vec![big(&[2, 0]), big(&[1, 3])];
        let c = lattice_solve(&gens, &big(&[3, 3])).unwrap();
        assert_eq!(c, big(&[1, 1]));
        assert!(lattice_solve(&gens, &big(&[1, 0])).is_none());
        let c = lattice_solve(&gens, &big(&[0, 6])).unwrap();
        let back: Vec<BigInt> = (0..2).map(|j| &c[0] * &gens[0][j] + &c[1] * &gens[1][j]).collect();
        assert_eq!(back, big(&[0, 6]));
    }
}
