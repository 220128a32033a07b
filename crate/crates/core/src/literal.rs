//! Element literals: the plain-text syntax used by the CLI and fixtures.
//!
//! A term is `coeff*word.word*`, where the first word is `mu` of
//! `s_mu s_nu*` and the starred word is `nu`; either may be empty. Rendered
//! terms carry an `s` marker (`s11.21*`, `s2`, `1`), and the parser accepts
//! both the marked and the bare `1*11.21*` forms. Coefficients are
//! rationals optionally times a root of unity: `1/2 z12^7` means
//! `(1/2)*zeta_12^7`; a bare `z^k` uses the caller-supplied ambient order.
//! Sums join terms with `+` and `-`.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;

use crate::cyclotomic::RootScalar;
use crate::element::{CKElement, Generator};
use crate::matrix::{Word, ZeroOneMatrix};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub message: String,
    pub position: usize,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at byte {}: {}", self.position, self.message)
    }
}

pub fn render_word(w: &[u8]) -> String {
    if w.iter().all(|&l| l <= 9) {
        w.iter().map(|l| l.to_string()).collect()
    } else {
        let parts: Vec<String> = w.iter().map(|l| l.to_string()).collect();
        parts.join("-")
    }
}

fn render_term(mu: &[u8], nu: &[u8], coeff: &RootScalar) -> (bool, String) {
    // Pull a leading minus out of plain rational coefficients so sums read
    // naturally; cyclotomic coefficients keep their own sign rendering.
    let (neg, coeff) = match coeff.as_rational() {
        Some(q) if q.is_negative() => (true, RootScalar::from_rational(-q)),
        _ => (false, coeff.clone()),
    };
    let body = match (mu.is_empty(), nu.is_empty()) {
        (true, true) => "1".to_string(),
        (false, true) => alloc::format!("s{}", render_word(mu)),
        (true, false) => alloc::format!("s.{}*", render_word(nu)),
        (false, false) => alloc::format!("s{}.{}*", render_word(mu), render_word(nu)),
    };
    let s = if coeff.is_one() {
        body
    } else if body == "1" {
        alloc::format!("{coeff}")
    } else {
        alloc::format!("{coeff}*{body}")
    };
    (neg, s)
}

/// Deterministic rendering of an element in literal syntax; terms appear in
/// the canonical order of the term map.
pub fn render_element(x: &CKElement) -> String {
    if x.terms().is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, ((mu, nu), coeff)) in x.terms().iter().enumerate() {
        let (neg, body) = render_term(mu, nu, coeff);
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    out
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(s: &'a str) -> Self {
        Cursor { bytes: s.as_bytes(), pos: 0 }
    }

    fn err<T>(&self, message: &str) -> Result<T, ParseError> {
        Err(ParseError { message: message.to_string(), position: self.pos })
    }

    fn skip_ws(&mut self) {
        while self.peek() == Some(b' ') {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Option<&'a str> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if self.pos == start {
            None
        } else {
            Some(core::str::from_utf8(&self.bytes[start..self.pos]).unwrap())
        }
    }

    fn integer(&mut self) -> Result<i64, ParseError> {
        let neg = self.eat(b'-');
        match self.digits() {
            Some(d) => {
                let v: i64 = d.parse().map_err(|_| ParseError {
                    message: "integer out of range".to_string(),
                    position: self.pos,
                })?;
                Ok(if neg { -v } else { v })
            }
            None => self.err("expected an integer"),
        }
    }

    /// `a` or `a/b`.
    fn rational(&mut self) -> Result<BigRational, ParseError> {
        let num = self.integer()?;
        if self.eat(b'/') {
            let den = self.integer()?;
            if den == 0 {
                return self.err("zero denominator");
            }
            Ok(BigRational::new(BigInt::from(num), BigInt::from(den)))
        } else {
            Ok(BigRational::from_integer(BigInt::from(num)))
        }
    }

    /// `zN^k` or `z^k` with the ambient order.
    fn root(&mut self, ambient: u32) -> Result<RootScalar, ParseError> {
        if !self.eat(b'z') {
            return self.err("expected z");
        }
        let order = match self.digits() {
            Some(d) => d.parse().map_err(|_| ParseError {
                message: "root order out of range".to_string(),
                position: self.pos,
            })?,
            None => ambient,
        };
        if order == 0 {
            return self.err("root order must be positive");
        }
        if !self.eat(b'^') {
            return self.err("expected ^ after root");
        }
        let exp = self.integer()?;
        Ok(RootScalar::root_of_unity(order, exp))
    }

    fn monomial(&mut self, ambient: u32) -> Result<RootScalar, ParseError> {
        self.skip_ws();
        if self.peek() == Some(b'z') {
            return self.root(ambient);
        }
        if self.peek() == Some(b'-') && self.bytes.get(self.pos + 1) == Some(&b'z') {
            self.pos += 1;
            return Ok(self.root(ambient)?.neg());
        }
        let q = self.rational()?;
        self.skip_ws();
        if self.peek() == Some(b'z') {
            Ok(self.root(ambient)?.scale(&q))
        } else {
            Ok(RootScalar::from_rational(q))
        }
    }

    /// A coefficient: a monomial or a parenthesized signed sum of monomials.
    fn coefficient(&mut self, ambient: u32) -> Result<RootScalar, ParseError> {
        if self.eat(b'(') {
            let mut acc = self.monomial(ambient)?;
            loop {
                self.skip_ws();
                match self.peek() {
                    Some(b')') => {
                        self.pos += 1;
                        return Ok(acc);
                    }
                    Some(b'+') => {
                        self.pos += 1;
                        acc = acc.add(&self.monomial(ambient)?);
                    }
                    Some(b'-') => {
                        self.pos += 1;
                        acc = acc.sub(&self.monomial(ambient)?);
                    }
                    _ => return self.err("expected +, - or ) in coefficient"),
                }
            }
        } else {
            self.monomial(ambient)
        }
    }

    fn word(&mut self, n: usize) -> Result<Word, ParseError> {
        let mut out: Word = Vec::new();
        if n > 9 {
            loop {
                match self.digits() {
                    Some(d) => {
                        let l: u32 = d.parse().map_err(|_| ParseError {
                            message: "letter out of range".to_string(),
                            position: self.pos,
                        })?;
                        if l == 0 || l as usize > n {
                            return self.err("letter outside the alphabet");
                        }
                        out.push(l as u8);
                    }
                    None => break,
                }
                if !self.eat(b'-') {
                    break;
                }
            }
        } else {
            while let Some(b @ b'1'..=b'9') = self.peek() {
                let l = b - b'0';
                if l as usize > n {
                    return self.err("letter outside the alphabet");
                }
                out.push(l);
                self.pos += 1;
            }
        }
        Ok(out)
    }

    /// `word` or `word.word*` or `.word*`, with an optional leading `s`.
    fn word_pair(&mut self, n: usize) -> Result<(Word, Word), ParseError> {
        self.eat(b's');
        let mu = self.word(n)?;
        if self.eat(b'.') {
            let nu = self.word(n)?;
            if !self.eat(b'*') {
                return self.err("expected * after adjoint word");
            }
            Ok((mu, nu))
        } else {
            Ok((mu, Vec::new()))
        }
    }
}

/// Parses one element in literal syntax over the given matrix. `ambient`
/// is the cyclotomic order used by bare `z^k` coefficients.
pub fn parse_element(
    matrix: &Arc<ZeroOneMatrix>,
    input: &str,
    ambient: u32,
) -> Result<CKElement, ParseError> {
    let n = matrix.n();
    let mut cur = Cursor::new(input);
    let mut acc = CKElement::zero(matrix);
    let mut first = true;
    loop {
        cur.skip_ws();
        let negate = if first {
            first = false;
            cur.eat(b'-')
        } else {
            match cur.peek() {
                None => break,
                Some(b'+') => {
                    cur.pos += 1;
                    false
                }
                Some(b'-') => {
                    cur.pos += 1;
                    true
                }
                _ => return cur.err("expected + or - between terms"),
            }
        };
        cur.skip_ws();
        let term = match cur.peek() {
            Some(b's') => {
                let (mu, nu) = cur.word_pair(n)?;
                CKElement::pair(matrix, &mu, &nu).map_err(|e| ParseError {
                    message: alloc::format!("{e}"),
                    position: cur.pos,
                })?
            }
            Some(b'p') | Some(b'q') => {
                let kind = cur.peek().unwrap();
                cur.pos += 1;
                let i = cur.integer()?;
                if i < 1 || i as usize > n {
                    return cur.err("projection index outside the alphabet");
                }
                let g = if kind == b'p' {
                    Generator::P(i as u8)
                } else {
                    Generator::Q(i as u8)
                };
                CKElement::generator(matrix, g).map_err(|e| ParseError {
                    message: alloc::format!("{e}"),
                    position: cur.pos,
                })?
            }
            Some(_) => {
                let coeff = cur.coefficient(ambient)?;
                cur.skip_ws();
                if cur.eat(b'*') {
                    cur.skip_ws();
                    let (mu, nu) = cur.word_pair(n)?;
                    CKElement::pair(matrix, &mu, &nu)
                        .map_err(|e| ParseError {
                            message: alloc::format!("{e}"),
                            position: cur.pos,
                        })?
                        .scale(&coeff)
                } else {
                    CKElement::unit(matrix).scale(&coeff)
                }
            }
            None => return cur.err("expected a term"),
        };
        acc = acc
            .add(&if negate { term.neg() } else { term })
            .expect("same matrix by construction");
        cur.skip_ws();
        if cur.peek().is_none() {
            break;
        }
    }
    Ok(acc)
}
