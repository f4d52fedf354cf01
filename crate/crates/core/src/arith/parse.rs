//! Reader for the canonical value grammar.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := unary (("*" | "/") unary)*
//! unary  := "-" unary | power
//! power  := atom ("^" "-"? integer)?
//! atom   := integer | identifier | "(" expr ")"
//! ```
//!
//! Identifiers name the variable of a rational-function level of the field,
//! or `x` for the generator of a finite field. Expressions are evaluated in
//! the field as they are parsed, so `a/b` with `b = 0` is an error.

use num_bigint::BigInt;
use thiserror::Error;

use super::{ArithError, Elem, FieldSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unexpected character {0:?} at offset {1}")]
    UnexpectedChar(char, usize),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unexpected token {0:?}")]
    UnexpectedToken(String),
    #[error("unknown identifier {0:?} for field {1}")]
    UnknownIdentifier(String, String),
    #[error("exponent {0:?} is not a machine integer")]
    BadExponent(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Int(String),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            out.push(Token::Int(chars[start..i].iter().collect()));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else {
            return Err(ParseError::UnexpectedChar(c, i));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    spec: &'a FieldSpec,
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Token::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Elem, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = self.spec.add(&acc, &self.term()?);
            } else if self.eat('-') {
                acc = self.spec.sub(&acc, &self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Elem, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = self.spec.mul(&acc, &self.unary()?);
            } else if self.eat('/') {
                acc = self.spec.div(&acc, &self.unary()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Elem, ParseError> {
        if self.eat('-') {
            let v = self.unary()?;
            return Ok(self.spec.neg(&v));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Elem, ParseError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let negative = self.eat('-');
        match self.next() {
            Some(Token::Int(digits)) => {
                let k: i64 = digits
                    .parse()
                    .map_err(|_| ParseError::BadExponent(digits.clone()))?;
                Ok(self.spec.pow(&base, if negative { -k } else { k })?)
            }
            Some(t) => Err(ParseError::UnexpectedToken(format!("{t:?}"))),
            None => Err(ParseError::UnexpectedEnd),
        }
    }

    fn atom(&mut self) -> Result<Elem, ParseError> {
        match self.next() {
            Some(Token::Int(digits)) => {
                let n: BigInt = digits.parse().expect("digits form an integer");
                Ok(self.spec.from_bigint(&n))
            }
            Some(Token::Ident(name)) => self.spec.generator(&name).ok_or_else(|| {
                ParseError::UnknownIdentifier(name.clone(), self.spec.to_string())
            }),
            Some(Token::Op('(')) => {
                let v = self.expr()?;
                if !self.eat(')') {
                    return match self.next() {
                        Some(t) => Err(ParseError::UnexpectedToken(format!("{t:?}"))),
                        None => Err(ParseError::UnexpectedEnd),
                    };
                }
                Ok(v)
            }
            Some(t) => Err(ParseError::UnexpectedToken(format!("{t:?}"))),
            None => Err(ParseError::UnexpectedEnd),
        }
    }
}

/// Parses and evaluates `s` as an element of `spec`.
pub fn parse_elem(spec: &FieldSpec, s: &str) -> Result<Elem, ParseError> {
    let mut p = Parser {
        spec,
        tokens: tokenize(s)?,
        pos: 0,
    };
    let v = p.expr()?;
    match p.next() {
        None => Ok(v),
        Some(t) => Err(ParseError::UnexpectedToken(format!("{t:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let q = FieldSpec::Rationals;
        let v = parse_elem(&q, "1 + 2*3^2 - -4/2").unwrap();
        assert_eq!(v, q.from_int(21));
        let w = parse_elem(&q, "-2^2").unwrap();
        assert_eq!(w, q.from_int(-4));
        let r = parse_elem(&q, "2^-2").unwrap();
        assert_eq!(q.format(&r), "1/4");
    }

    #[test]
    fn nested_tower() {
        let qt = FieldSpec::rational_functions();
        let qtt = FieldSpec::ratfunc(qt, "T").unwrap();
        let v = parse_elem(&qtt, "1/(T - theta)").unwrap();
        let shown = qtt.format(&v);
        assert_eq!(shown, "1/(T - theta)");
        assert_eq!(parse_elem(&qtt, &shown).unwrap(), v);
    }

    #[test]
    fn errors() {
        let q = FieldSpec::Rationals;
        assert!(matches!(
            parse_elem(&q, "1/0"),
            Err(ParseError::Arith(ArithError::DivisionByZero))
        ));
        assert!(matches!(
            parse_elem(&q, "theta"),
            Err(ParseError::UnknownIdentifier(..))
        ));
        assert!(matches!(parse_elem(&q, "(1"), Err(ParseError::UnexpectedEnd)));
        assert!(matches!(parse_elem(&q, "1 2"), Err(ParseError::UnexpectedToken(_))));
        assert!(matches!(parse_elem(&q, "1 $"), Err(ParseError::UnexpectedChar('$', 2))));
    }
}
