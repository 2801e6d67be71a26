//! Polynomial expressions in spec files, e.g. `"z1^2 - (1/2) z2*zbar1 + 3i"`.
//!
//! Variables are `z1..zn` and `zbar1..zbarn`; `i` is the imaginary unit.
//! Numbers may be integers or exact decimals (`0.25`, `1e-3`); division is
//! allowed by nonzero constants only. Juxtaposition multiplies.

use foliation_core::forms::restrict_holomorphic;
use foliation_core::polycore::PolyError;
use foliation_core::scalar::{parse_rational, qc};
use foliation_core::{Poly, QComplex};
use num_complex::Complex;
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("at column {col}: {msg}")]
    Syntax { col: usize, msg: String },
    #[error("variable {0} out of range")]
    VarRange(String),
    #[error("expression depends on zbar where a holomorphic polynomial is required")]
    NotHolomorphic,
    #[error("expected a constant, got a polynomial")]
    NotConstant,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(QComplex),
    Var(usize),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn syntax(col: usize, msg: impl Into<String>) -> ExprError {
    ExprError::Syntax { col, msg: msg.into() }
}

fn tokenize(s: &str, n: usize) -> Result<Vec<(usize, Tok)>, ExprError> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        let col = k + 1;
        if c.is_whitespace() {
            k += 1;
            continue;
        }
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = single {
            out.push((col, t));
            k += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let start = k;
            while k < chars.len() && (chars[k].is_ascii_digit() || chars[k] == '.') {
                k += 1;
            }
            if k < chars.len() && (chars[k] == 'e' || chars[k] == 'E') {
                let mut j = k + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    k = j;
                }
            }
            let text: String = chars[start..k].iter().collect();
            let r = parse_rational(&text).ok_or_else(|| syntax(col, format!("bad number {text:?}")))?;
            out.push((col, Tok::Num(Complex::new(r, Zero::zero()))));
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = k;
            while k < chars.len() && chars[k].is_ascii_alphabetic() {
                k += 1;
            }
            let word: String = chars[start..k].iter().collect();
            let dstart = k;
            while k < chars.len() && chars[k].is_ascii_digit() {
                k += 1;
            }
            let digits: String = chars[dstart..k].iter().collect();
            let tok = match (word.as_str(), digits.is_empty()) {
                ("i", true) => Tok::Num(qc(0, 1)),
                ("z" | "zbar", false) => {
                    let idx: usize = digits.parse().map_err(|_| syntax(col, "bad index"))?;
                    if idx == 0 || idx > n {
                        return Err(ExprError::VarRange(format!("{word}{digits}")));
                    }
                    Tok::Var(if word == "z" { idx - 1 } else { n + idx - 1 })
                }
                _ => return Err(syntax(col, format!("unknown identifier {word}{digits:?}"))),
            };
            out.push((col, tok));
            continue;
        }
        return Err(syntax(col, format!("unexpected character {c:?}")));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    nvars: usize,
    end_col: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |t| t.0)
    }

    fn expr(&mut self) -> Result<Poly, ExprError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = acc.checked_add(&self.term()?)?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = acc.checked_sub(&self.term()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly, ExprError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = acc.checked_mul(&self.unary()?)?;
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let col = self.col();
                    let d = constant_of(&self.unary()?).ok_or_else(|| syntax(col, "can only divide by a constant"))?;
                    if d.is_zero() {
                        return Err(syntax(col, "division by zero"));
                    }
                    acc = acc.scale(&(qc(1, 0) / d));
                }
                Some(Tok::Num(_) | Tok::Var(_) | Tok::LParen) => {
                    acc = acc.checked_mul(&self.power()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Poly, ExprError> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(self.unary()?.scale(&qc(-1, 0)))
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Poly, ExprError> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let col = self.col();
            let e = match self.peek() {
                Some(Tok::Num(q)) if q.im.is_zero() && q.re.is_integer() && q.re >= Zero::zero() => {
                    q.re.to_integer()
                }
                _ => return Err(syntax(col, "exponent must be a non-negative integer")),
            };
            self.pos += 1;
            let e: u32 = e.try_into().map_err(|_| syntax(col, "exponent too large"))?;
            return Ok(base.checked_pow(e)?);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly, ExprError> {
        let col = self.col();
        let tok = self.peek().cloned();
        self.pos += 1;
        match tok {
            Some(Tok::Num(q)) => Ok(Poly::constant(self.nvars, q)),
            Some(Tok::Var(v)) => Ok(Poly::var(self.nvars, v)),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(syntax(self.col(), "expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(t) => Err(syntax(col, format!("unexpected {t:?}"))),
            None => Err(syntax(col, "unexpected end of expression")),
        }
    }
}

fn constant_of(p: &Poly) -> Option<QComplex> {
    if p.total_degree().unwrap_or(0) == 0 {
        Some(p.coeff(&vec![0; p.n_vars()]))
    } else {
        None
    }
}

/// Parses into the `2n` formal variables `(z, z̄)`.
pub fn parse_formal(s: &str, n: usize) -> Result<Poly, ExprError> {
    let toks = tokenize(s, n)?;
    let mut p = Parser {
        toks,
        pos: 0,
        nvars: 2 * n,
        end_col: s.chars().count() + 1,
    };
    let out = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(syntax(p.col(), "trailing input"));
    }
    Ok(out)
}

/// Parses a holomorphic polynomial in `n` variables.
pub fn parse_holomorphic(s: &str, n: usize) -> Result<Poly, ExprError> {
    restrict_holomorphic(&parse_formal(s, n)?).ok_or(ExprError::NotHolomorphic)
}

/// Parses a constant such as `"1/2 - 3i"` or `"0.6"`.
pub fn parse_constant(s: &str) -> Result<QComplex, ExprError> {
    constant_of(&parse_formal(s, 0)?).ok_or(ExprError::NotConstant)
}
