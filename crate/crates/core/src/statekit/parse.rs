//! Ket-expression reader and printer.
//!
//! ```text
//! state   := [sign] term (sign term)*
//! term    := [coeff ['*']] '|' [01]+ '>'
//! coeff   := '(' [sign] scalar (sign scalar)* ')' | scalar
//! scalar  := 'i' | real [['*'] 'i']
//! real    := number ['/' number]
//! number  := digits ['.' digits] [('e'|'E') [sign] digits]
//! ```
//!
//! Whitespace is allowed between tokens. Every literal is read exactly as a
//! Gaussian rational; the floating-point [`State`] is rounded from that.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::{BasisString, ExactState, GaussianRational, State};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{kind} at position {position}")]
pub struct ParseError {
    /// Character offset into the input.
    pub position: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("empty expression")]
    Empty,
    #[error("expected {expected}, found {found}")]
    Unexpected { expected: &'static str, found: String },
    #[error("inconsistent ket lengths: expected {expected} qubits, found {found}")]
    InconsistentLength { expected: usize, found: usize },
    #[error("invalid number literal")]
    BadNumber,
    #[error("division by zero")]
    DivisionByZero,
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn new(text: &str) -> Self {
        Self {
            chars: text.chars().collect(),
            pos: 0,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eof(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            position: self.pos,
            kind,
        }
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        let found = match self.peek() {
            Some(c) => format!("{c:?}"),
            None => "end of input".to_string(),
        };
        self.err(ParseErrorKind::Unexpected { expected, found })
    }

    fn expect(&mut self, c: char, expected: &'static str) -> PResult<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn sign(&mut self) -> Option<bool> {
        match self.peek() {
            Some('+') => {
                self.pos += 1;
                Some(false)
            }
            Some('-') => {
                self.pos += 1;
                Some(true)
            }
            _ => None,
        }
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn number(&mut self) -> PResult<BigRational> {
        let start = self.pos;
        let int_part = self.digits();
        let mut frac_part = String::new();
        if self.peek() == Some('.') {
            self.pos += 1;
            frac_part = self.digits();
        }
        if int_part.is_empty() && frac_part.is_empty() {
            self.pos = start;
            return Err(self.unexpected("a number, 'i', '(' or '|'"));
        }
        let mut exp: i64 = 0;
        if matches!(self.peek(), Some('e' | 'E')) {
            self.pos += 1;
            let neg = self.sign() == Some(true);
            let e = self.digits();
            if e.is_empty() {
                return Err(ParseError {
                    position: start,
                    kind: ParseErrorKind::BadNumber,
                });
            }
            exp = e.parse::<i64>().map_err(|_| ParseError {
                position: start,
                kind: ParseErrorKind::BadNumber,
            })?;
            if exp > 4096 {
                return Err(ParseError {
                    position: start,
                    kind: ParseErrorKind::BadNumber,
                });
            }
            if neg {
                exp = -exp;
            }
        }
        let mantissa: BigInt = format!("{int_part}{frac_part}")
            .parse()
            .unwrap_or_else(|_| BigInt::zero());
        let ten = BigInt::from(10);
        let shift = exp - frac_part.len() as i64;
        let scale = num_traits::pow(ten, shift.unsigned_abs() as usize);
        Ok(if shift >= 0 {
            BigRational::from_integer(mantissa * scale)
        } else {
            BigRational::new(mantissa, scale)
        })
    }

    fn real(&mut self) -> PResult<BigRational> {
        let num = self.number()?;
        let save = self.pos;
        self.ws();
        if self.peek() == Some('/') {
            self.pos += 1;
            self.ws();
            let at = self.pos;
            let den = self.number()?;
            if den.is_zero() {
                return Err(ParseError {
                    position: at,
                    kind: ParseErrorKind::DivisionByZero,
                });
            }
            return Ok(num / den);
        }
        self.pos = save;
        Ok(num)
    }

    fn scalar(&mut self) -> PResult<GaussianRational> {
        if self.peek() == Some('i') {
            self.pos += 1;
            return Ok(GaussianRational::i());
        }
        let r = self.real()?;
        let save = self.pos;
        self.ws();
        if self.peek() == Some('*') {
            self.pos += 1;
            self.ws();
        }
        if self.peek() == Some('i') {
            self.pos += 1;
            return Ok(GaussianRational::new(BigRational::zero(), r));
        }
        self.pos = save;
        Ok(GaussianRational::from_real(r))
    }

    fn coeff(&mut self) -> PResult<GaussianRational> {
        if self.peek() != Some('(') {
            return self.scalar();
        }
        self.pos += 1;
        self.ws();
        let neg = self.sign() == Some(true);
        self.ws();
        let mut acc = self.scalar()?;
        if neg {
            acc = -&acc;
        }
        loop {
            self.ws();
            match self.sign() {
                Some(neg) => {
                    self.ws();
                    let t = self.scalar()?;
                    acc = if neg { &acc - &t } else { &acc + &t };
                }
                None => break,
            }
        }
        self.expect(')', "')'")?;
        Ok(acc)
    }

    fn ket(&mut self) -> PResult<(usize, Vec<u8>)> {
        let start = self.pos;
        self.expect('|', "'|'")?;
        let mut bits = Vec::new();
        while let Some(c @ ('0' | '1')) = self.peek() {
            bits.push(if c == '1' { 1 } else { 0 });
            self.pos += 1;
        }
        if bits.is_empty() {
            return Err(self.unexpected("a binary digit"));
        }
        self.expect('>', "'>' or a binary digit")?;
        Ok((start, bits))
    }

    fn term(&mut self) -> PResult<(GaussianRational, usize, Vec<u8>)> {
        let coeff = if self.peek() == Some('|') {
            GaussianRational::one()
        } else {
            let c = self.coeff()?;
            self.ws();
            if self.peek() == Some('*') {
                self.pos += 1;
                self.ws();
            }
            c
        };
        let (at, bits) = self.ket()?;
        Ok((coeff, at, bits))
    }
}

/// Parses a ket expression exactly.
pub fn parse_state_exact(text: &str) -> Result<ExactState, ParseError> {
    let mut p = Parser::new(text);
    p.ws();
    if p.eof() {
        return Err(p.err(ParseErrorKind::Empty));
    }
    let mut neg = p.sign() == Some(true);
    let mut qubits: Option<usize> = None;
    let mut terms = Vec::new();
    loop {
        p.ws();
        let (coeff, at, bits) = p.term()?;
        match qubits {
            None => qubits = Some(bits.len()),
            Some(q) if q != bits.len() => {
                return Err(ParseError {
                    position: at,
                    kind: ParseErrorKind::InconsistentLength {
                        expected: q,
                        found: bits.len(),
                    },
                })
            }
            _ => {}
        }
        let basis = BasisString::new(bits).expect("parser only emits binary digits");
        terms.push((basis, if neg { -&coeff } else { coeff }));
        p.ws();
        if p.eof() {
            break;
        }
        neg = match p.sign() {
            Some(n) => n,
            None => return Err(p.unexpected("'+', '-' or end of input")),
        };
    }
    let q = qubits.expect("at least one term parsed");
    Ok(ExactState::from_terms(q, terms).expect("lengths checked above"))
}

/// Parses a ket expression into a floating-point state pruned at the default
/// support threshold.
pub fn parse_state(text: &str) -> Result<State, ParseError> {
    parse_state_exact(text).map(|s| s.to_state())
}

struct Coeff(f64, f64);

impl Coeff {
    /// Splits into a leading sign and a magnitude-style body.
    fn render(&self) -> (bool, String) {
        let Coeff(re, im) = *self;
        if im == 0.0 {
            (re < 0.0, format!("{}", re.abs()))
        } else if re == 0.0 {
            (im < 0.0, format!("{}i", im.abs()))
        } else {
            (false, format!("{self}"))
        }
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.1 < 0.0 { '-' } else { '+' };
        write!(f, "({}{sign}{}i)", self.0, self.1.abs())
    }
}

/// Prints a state in the grammar accepted by [`parse_state`]. The zero state
/// prints as `0*|0…0>` so the qubit count survives a round trip.
pub fn format_state(s: &State) -> String {
    if s.is_zero() {
        return format!("0*|{}>", "0".repeat(s.qubits()));
    }
    let mut out = String::new();
    for (i, (b, a)) in s.terms().enumerate() {
        let (neg, body) = Coeff(a.re, a.im).render();
        match (i, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(&body);
        out.push_str("*|");
        out.push_str(&b.to_string());
        out.push('>');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn reads_unit_coefficients() {
        let s = parse_state("|000> + |100> + |010> + |001>").unwrap();
        assert_eq!(s.qubits(), 3);
        assert_eq!(s.len(), 4);
        assert!(s.terms().all(|(_, a)| close(*a, Complex64::new(1.0, 0.0))));
    }

    #[test]
    fn reads_fractions_and_imaginary_unit() {
        let s = parse_state("1/2*|000> - i|111>").unwrap();
        assert!(close(s.amp("000"), Complex64::new(0.5, 0.0)));
        assert!(close(s.amp("111"), Complex64::new(0.0, -1.0)));
    }

    #[test]
    fn literal_forms() {
        let s = parse_state("-0.25|01> + (1/2 - 3i)*|10> + 2i|11> + 1.5e1 * |00>").unwrap();
        assert!(close(s.amp("01"), Complex64::new(-0.25, 0.0)));
        assert!(close(s.amp("10"), Complex64::new(0.5, -3.0)));
        assert!(close(s.amp("11"), Complex64::new(0.0, 2.0)));
        assert!(close(s.amp("00"), Complex64::new(15.0, 0.0)));

        let e = parse_state_exact("1/3|0> + 1/3|0> + 1/3 i |1>").unwrap();
        let third = BigRational::new(1.into(), 3.into());
        assert_eq!(e.amplitude(&"0".parse().unwrap()).re, &third + &third);
        assert_eq!(e.amplitude(&"1".parse().unwrap()).im, third);
    }

    #[test]
    fn accumulates_and_cancels() {
        let s = parse_state("|01> + |10> - |01>").unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.qubits(), 2);
    }

    #[test]
    fn inconsistent_lengths() {
        let err = parse_state("|00> + |000>").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::InconsistentLength { expected: 2, found: 3 });
        assert_eq!(err.position, 7);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        assert_eq!(parse_state("").unwrap_err().kind, ParseErrorKind::Empty);
        assert_eq!(parse_state("   ").unwrap_err().kind, ParseErrorKind::Empty);
        assert_eq!(parse_state("|02>").unwrap_err().position, 2);
        assert_eq!(parse_state("|0> |1>").unwrap_err().position, 4);
        assert_eq!(parse_state("|0> +").unwrap_err().position, 5);
        assert_eq!(parse_state("1/0|1>").unwrap_err().kind, ParseErrorKind::DivisionByZero);
        assert!(parse_state("(1+2i|0>").is_err());
        assert!(parse_state("|>").is_err());
        assert!(parse_state("x|0>").is_err());
    }

    #[test]
    fn format_round_trip() {
        for text in [
            "1/2*|000> - i|111>",
            "(0.1+0.2i)|01> - (0.3-0.4i)|10>",
            "-1/3|1>",
            "0*|000>",
        ] {
            let s = parse_state(text).unwrap();
            let back = parse_state(&format_state(&s)).unwrap();
            assert_eq!(back.qubits(), s.qubits());
            assert!(back.max_abs_diff(&s) < 1e-12, "{text} -> {}", format_state(&s));
        }
    }
}
