//! Polynomial expressions in `x` and `y`.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr    := ['+' | '-'] term (('+' | '-') term)*
//! term    := power (['*' | '/'] power)*     juxtaposition multiplies
//! power   := atom ['^' integer]
//! atom    := integer | 'x' | 'y' | 'i' | '(' expr ')'
//! ```
//!
//! `/` only divides by nonzero constants and `i` is accepted only when the
//! field has an imaginary unit.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bipoly::BiPoly;
use crate::engine::MappingInput;
use crate::scalar::Scalar;
use crate::tower::Tower;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    #[default]
    Rational,
    Gaussian,
}

impl std::str::FromStr for Field {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "rational" => Ok(Field::Rational),
            "gaussian" => Ok(Field::Gaussian),
            other => Err(format!("unknown field `{other}` (expected rational or gaussian)")),
        }
    }
}

/// Components as expression strings.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    pub components: Vec<String>,
    #[serde(default)]
    pub field: Field,
}

#[derive(Debug, Error)]
pub enum InputError {
    #[error("component {index}: {source}")]
    Syntax { index: usize, source: ParseError },
    #[error("invalid input document: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Engine(#[from] crate::error::Error),
}

impl InputDocument {
    pub fn from_json(text: &str) -> Result<Self, InputError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_mapping<K: Scalar>(&self, tower: &Tower<K>) -> Result<MappingInput<K>, InputError> {
        let components = self
            .components
            .iter()
            .enumerate()
            .map(|(index, text)| parse_polynomial(text, tower).map_err(|source| InputError::Syntax { index, source }))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(MappingInput::new(components)?)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Int(num_bigint::BigInt),
    X,
    Y,
    I,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Open,
    Close,
}

struct Lexed {
    token: Token,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<(Vec<Lexed>, (usize, usize)), ParseError> {
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        let at = (line, column);
        column += 1;
        let token = match c {
            '\n' => {
                line += 1;
                column = 1;
                continue;
            }
            c if c.is_whitespace() => continue,
            '0'..='9' => {
                let mut digits = c.to_string();
                while let Some(&d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                    digits.push(d);
                    chars.next();
                    column += 1;
                }
                Token::Int(digits.parse().expect("ascii digits"))
            }
            'x' => Token::X,
            'y' => Token::Y,
            'i' => Token::I,
            '+' => Token::Plus,
            '-' | '−' => Token::Minus,
            '*' => Token::Star,
            '/' => Token::Slash,
            '^' => Token::Caret,
            '(' => Token::Open,
            ')' => Token::Close,
            other => {
                return Err(ParseError { line: at.0, column: at.1, message: format!("unexpected character `{other}`") })
            }
        };
        out.push(Lexed { token, line: at.0, column: at.1 });
    }
    Ok((out, (line, column)))
}

struct Parser<'a, K: Scalar> {
    tokens: Vec<Lexed>,
    pos: usize,
    end: (usize, usize),
    tower: &'a Tower<K>,
}

impl<K: Scalar> Parser<'_, K> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|l| &l.token)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let (line, column) = self.tokens.get(self.pos).map_or(self.end, |l| (l.line, l.column));
        Err(ParseError { line, column, message: message.into() })
    }

    fn expr(&mut self) -> Result<BiPoly<K>, ParseError> {
        let mut acc = match self.peek() {
            Some(Token::Minus) => {
                self.pos += 1;
                -&self.term()?
            }
            Some(Token::Plus) => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<BiPoly<K>, ParseError> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.pos += 1;
                    acc = &acc * &self.power()?;
                }
                Some(Token::Slash) => {
                    self.pos += 1;
                    let divisor_at = self.pos;
                    let d = self.power()?;
                    let value = match d.support().as_slice() {
                        [(0, 0)] => d.coefficient(0, 0).as_scalar(),
                        _ => None,
                    };
                    let Some(value) = value else {
                        self.pos = divisor_at;
                        return self.error("division is only allowed by nonzero constants");
                    };
                    acc = &acc * &BiPoly::constant(self.tower, K::one() / value);
                }
                Some(Token::Int(_) | Token::X | Token::Y | Token::I | Token::Open) => {
                    acc = &acc * &self.power()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<BiPoly<K>, ParseError> {
        let base = self.atom()?;
        if self.peek() != Some(&Token::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        match self.peek().cloned() {
            Some(Token::Int(n)) => {
                let Ok(exp) = u32::try_from(&n) else {
                    return self.error("exponent too large");
                };
                self.pos += 1;
                Ok(base.pow(exp))
            }
            Some(Token::Minus) => self.error("negative exponents are not polynomial"),
            _ => self.error("expected a nonnegative integer exponent"),
        }
    }

    fn atom(&mut self) -> Result<BiPoly<K>, ParseError> {
        let Some(token) = self.peek().cloned() else {
            return self.error("unexpected end of input");
        };
        let value = match token {
            Token::Int(n) => BiPoly::constant(self.tower, K::from_rational(n.into())),
            Token::X => BiPoly::x(self.tower),
            Token::Y => BiPoly::y(self.tower),
            Token::I => match K::imaginary_unit() {
                Some(i) => BiPoly::constant(self.tower, i),
                None => return self.error("`i` requires the gaussian field"),
            },
            Token::Open => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(&Token::Close) {
                    return self.error("expected `)`");
                }
                inner
            }
            _ => return self.error("expected a number, variable or `(`"),
        };
        self.pos += 1;
        Ok(value)
    }
}

/// Parses one polynomial over the base field of `tower`.
pub fn parse_polynomial<K: Scalar>(text: &str, tower: &Tower<K>) -> Result<BiPoly<K>, ParseError> {
    let (tokens, end) = lex(text)?;
    let mut parser = Parser { tokens, pos: 0, end, tower };
    let p = parser.expr()?;
    if parser.pos < parser.tokens.len() {
        return parser.error("unexpected token");
    }
    Ok(p)
}

/// Parses a constant such as `-3/2` or `(1/2)i`.
pub fn parse_scalar<K: Scalar>(text: &str) -> Result<K, ParseError> {
    let tower = Tower::default();
    let p = parse_polynomial(text, &tower)?;
    match p.support().as_slice() {
        [] => Ok(K::zero()),
        [(0, 0)] => Ok(p.coefficient(0, 0).as_scalar().expect("base field")),
        _ => Err(ParseError { line: 1, column: 1, message: "expected a constant".into() }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;
    use num_rational::BigRational;

    type Q = BigRational;
    type G = Complex<BigRational>;

    fn parse(text: &str) -> Result<BiPoly<Q>, ParseError> {
        parse_polynomial(text, &Tower::default())
    }

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    #[test]
    fn supports() {
        assert_eq!(parse("y^2 - x^3").unwrap().support(), vec![(0, 2), (3, 0)]);
        assert_eq!(parse("x^2*y").unwrap().support(), vec![(2, 1)]);
        assert_eq!(parse(" x ^ 2 y ").unwrap(), parse("x^2*y").unwrap());
    }

    #[test]
    fn precedence() {
        assert_eq!(parse("2*x^2").unwrap().coefficient(2, 0).as_scalar(), Some(q(2, 1)));
        assert_eq!(parse("-x^2").unwrap().coefficient(2, 0).as_scalar(), Some(q(-1, 1)));
        assert_eq!(parse("(x+y)^2").unwrap(), parse("x^2 + 2x y + y^2").unwrap());
        assert_eq!(parse("-3/2 x").unwrap().coefficient(1, 0).as_scalar(), Some(q(-3, 2)));
        assert_eq!(parse("x - y - x").unwrap(), parse("-y").unwrap());
    }

    #[test]
    fn gaussian_literals() {
        let t = Tower::<G>::default();
        let p = parse_polynomial("(2+3i) x + (1/2)i y", &t).unwrap();
        assert_eq!(p.coefficient(1, 0).as_scalar(), Some(G::new(q(2, 1), q(3, 1))));
        assert_eq!(p.coefficient(0, 1).as_scalar(), Some(G::new(q(0, 1), q(1, 2))));
        assert_eq!(parse_scalar::<G>("i^2").unwrap(), G::new(q(-1, 1), q(0, 1)));
    }

    #[test]
    fn errors_have_positions() {
        let e = parse("x +").unwrap_err();
        assert_eq!((e.line, e.column), (1, 4));
        let e = parse("x\n  + $").unwrap_err();
        assert_eq!((e.line, e.column), (2, 5));
        assert!(parse("i*x").unwrap_err().message.contains("gaussian"));
        assert!(parse("x/y").unwrap_err().message.contains("constants"));
        assert!(parse("x/0").is_err());
        assert!(parse("x^-1").is_err());
        assert!(parse("(x + y").unwrap_err().message.contains(")"));
        assert!(parse("x y)").is_err());
    }

    #[test]
    fn documents() {
        let doc = InputDocument::from_json(r#"{"components": ["y^2-x^3", "x^2*y"]}"#).unwrap();
        assert_eq!(doc.field, Field::Rational);
        let m = doc.to_mapping::<Q>(&Tower::default()).unwrap();
        assert_eq!(m.components().len(), 2);
        let bad = InputDocument { components: vec!["x +* y".into()], field: Field::Rational };
        assert!(matches!(bad.to_mapping::<Q>(&Tower::default()), Err(InputError::Syntax { index: 0, .. })));
        assert!(InputDocument::from_json(r#"{"components": [], "field": "real"}"#).is_err());
    }

    #[test]
    fn scalars() {
        assert_eq!(parse_scalar::<Q>("-1/3").unwrap(), q(-1, 3));
        assert!(parse_scalar::<Q>("x").is_err());
    }
}
