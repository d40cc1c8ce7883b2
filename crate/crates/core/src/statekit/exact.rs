use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{BasisString, State};
use crate::{Error, Result};

/// A complex number with rational real and imaginary parts.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn from_real(re: BigRational) -> Self {
        Self {
            re,
            im: BigRational::zero(),
        }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        Self::new(
            BigRational::from_integer(re.into()),
            BigRational::from_integer(im.into()),
        )
    }

    pub fn zero() -> Self {
        Self::from_ints(0, 0)
    }

    pub fn one() -> Self {
        Self::from_ints(1, 0)
    }

    pub fn i() -> Self {
        Self::from_ints(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Precondition("division by an exact zero".into()));
        }
        let n = self.norm_sqr();
        Ok(Self::new(&self.re / &n, -&self.im / &n))
    }

    /// Integer power; negative exponents invert, which fails on zero.
    pub fn pow(&self, exp: i64) -> Result<Self> {
        let base = if exp < 0 { self.inv()? } else { self.clone() };
        let mut e = exp.unsigned_abs();
        let mut acc = Self::one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            sq = &sq * &sq;
            e >>= 1;
        }
        Ok(acc)
    }

    /// `i^k` for any integer `k`.
    pub fn i_pow(k: i64) -> Self {
        match k.rem_euclid(4) {
            0 => Self::from_ints(1, 0),
            1 => Self::from_ints(0, 1),
            2 => Self::from_ints(-1, 0),
            _ => Self::from_ints(0, -1),
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else {
            let sign = if self.im.is_negative() { '-' } else { '+' };
            write!(f, "({}{sign}{}i)", self.re, self.im.abs())
        }
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: Self) -> GaussianRational {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: Self) -> GaussianRational {
        GaussianRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: Self) -> GaussianRational {
        GaussianRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-&self.re, -&self.im)
    }
}

impl From<BigInt> for GaussianRational {
    fn from(n: BigInt) -> Self {
        Self::from_real(BigRational::from_integer(n))
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        GaussianRational::one()
    }
}

impl Mul for GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: Self) -> GaussianRational {
        &self * &rhs
    }
}

/// A state with exact Gaussian-rational amplitudes. Only exact zeros are
/// dropped, so the support is unambiguous.
#[derive(Clone, PartialEq, Debug)]
pub struct ExactState {
    qubits: usize,
    terms: BTreeMap<BasisString, GaussianRational>,
}

impl ExactState {
    pub fn from_terms<I>(qubits: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BasisString, GaussianRational)>,
    {
        if qubits == 0 {
            return Err(Error::Precondition("a state needs at least one qubit".into()));
        }
        let mut acc: BTreeMap<BasisString, GaussianRational> = BTreeMap::new();
        for (b, a) in terms {
            if b.len() != qubits {
                return Err(Error::QubitCount {
                    expected: qubits,
                    found: b.len(),
                });
            }
            let slot = acc.entry(b).or_insert_with(GaussianRational::zero);
            *slot = &*slot + &a;
        }
        acc.retain(|_, a| !a.is_zero());
        Ok(Self { qubits, terms: acc })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn amplitude(&self, b: &BasisString) -> GaussianRational {
        self.terms.get(b).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisString, &GaussianRational)> + '_ {
        self.terms.iter()
    }

    pub fn basis(&self) -> Vec<BasisString> {
        self.terms.keys().cloned().collect()
    }

    pub fn amplitudes(&self) -> Vec<GaussianRational> {
        self.terms.values().cloned().collect()
    }

    /// Rounds to doubles and prunes at the default support threshold.
    pub fn to_state(&self) -> State {
        State::from_terms(self.qubits, self.terms.iter().map(|(b, a)| (b.clone(), a.to_complex())))
            .expect("exact state has consistent qubit count")
    }

    /// A subset of the terms, by canonical index.
    pub fn restrict(&self, indices: &[usize]) -> Result<Self> {
        let all: Vec<_> = self.terms.iter().collect();
        let mut out = Vec::with_capacity(indices.len());
        for &i in indices {
            let (b, a) = all
                .get(i)
                .ok_or_else(|| Error::InvalidFlip(format!("term index {i} out of range for length {}", all.len())))?;
            out.push(((*b).clone(), (*a).clone()));
        }
        Self::from_terms(self.qubits, out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn field_arithmetic() {
        let a = GaussianRational::new(q(1, 2), q(1, 3));
        let inv = a.inv().unwrap();
        assert_eq!(&a * &inv, GaussianRational::one());
        assert_eq!(a.pow(-2).unwrap(), inv.pow(2).unwrap());
        assert_eq!(GaussianRational::i().pow(3).unwrap(), GaussianRational::i_pow(-1));
        assert!(GaussianRational::zero().pow(-1).is_err());
        assert_eq!(GaussianRational::zero().pow(0).unwrap(), GaussianRational::one());
    }

    #[test]
    fn exact_zero_pruning() {
        let b: BasisString = "01".parse().unwrap();
        let s = ExactState::from_terms(
            2,
            [(b.clone(), GaussianRational::one()), (b, -&GaussianRational::one())],
        )
        .unwrap();
        assert!(s.is_empty());
    }
}
