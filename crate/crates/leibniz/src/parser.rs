//! Expression parser for field elements.
//!
//! Grammar:
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor (("*" | "/") factor)*
//! factor := base ("^" signed-integer)?
//! base   := integer | identifier | "(" expr ")" | "-" factor
//! ```
//! Rational constants are written `p/q`; the division in them is the
//! ordinary `/` operator, and `^` binds tighter, so `2/3^2` means `2/(3^2)`.
//! Evaluation happens during parsing, every result is canonical.

use num_bigint::BigInt;
use thiserror::Error;

use crate::field::FieldElement;
use crate::poly::Generators;
use crate::rational::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("unexpected character `{ch}` at byte {pos}")]
    UnexpectedChar { pos: usize, ch: char },
    #[error("unexpected `{found}` at byte {pos}, expected {expected}")]
    UnexpectedToken {
        pos: usize,
        found: String,
        expected: &'static str,
    },
    #[error("unexpected end of input, expected {expected}")]
    UnexpectedEnd { expected: &'static str },
    #[error("unknown identifier `{name}` at byte {pos}")]
    UnknownIdentifier { pos: usize, name: String },
    #[error("division by the zero element at byte {pos}")]
    DivisionByZero { pos: usize },
    #[error("exponent at byte {pos} does not fit in 64 bits")]
    ExponentOverflow { pos: usize },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(n) => n.to_string(),
            Tok::Ident(s) => s.clone(),
            Tok::Plus => "+".into(),
            Tok::Minus => "-".into(),
            Tok::Star => "*".into(),
            Tok::Slash => "/".into(),
            Tok::Caret => "^".into(),
            Tok::LParen => "(".into(),
            Tok::RParen => ")".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, ch)) = chars.peek() {
        match ch {
            c if c.is_whitespace() => {
                chars.next();
            }
            '0'..='9' => {
                let mut digits = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_ascii_digit() {
                        digits.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push((pos, Tok::Int(digits.parse().expect("digit run"))));
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut name = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_alphanumeric() || c == '_' {
                        name.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push((pos, Tok::Ident(name)));
            }
            '+' => {
                chars.next();
                out.push((pos, Tok::Plus));
            }
            '-' => {
                chars.next();
                out.push((pos, Tok::Minus));
            }
            '*' => {
                chars.next();
                out.push((pos, Tok::Star));
            }
            '/' => {
                chars.next();
                out.push((pos, Tok::Slash));
            }
            '^' => {
                chars.next();
                out.push((pos, Tok::Caret));
            }
            '(' => {
                chars.next();
                out.push((pos, Tok::LParen));
            }
            ')' => {
                chars.next();
                out.push((pos, Tok::RParen));
            }
            other => return Err(ParseError::UnexpectedChar { pos, ch: other }),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    gens: &'a Generators,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&(usize, Tok)> {
        self.toks.get(self.idx)
    }

    fn next(&mut self) -> Option<(usize, Tok)> {
        let t = self.toks.get(self.idx).cloned();
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    fn expect_more(&self, expected: &'static str) -> Result<&(usize, Tok), ParseError> {
        self.peek().ok_or(ParseError::UnexpectedEnd { expected })
    }

    fn expr(&mut self) -> Result<FieldElement, ParseError> {
        let mut acc = self.term()?;
        while let Some((_, tok)) = self.peek() {
            match tok {
                Tok::Plus => {
                    self.next();
                    acc = acc.add(&self.term()?);
                }
                Tok::Minus => {
                    self.next();
                    acc = acc.sub(&self.term()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<FieldElement, ParseError> {
        let mut acc = self.factor()?;
        while let Some(&(pos, ref tok)) = self.peek() {
            match tok {
                Tok::Star => {
                    self.next();
                    acc = acc.mul(&self.factor()?);
                }
                Tok::Slash => {
                    self.next();
                    let rhs = self.factor()?;
                    acc = acc
                        .div(&rhs)
                        .map_err(|_| ParseError::DivisionByZero { pos })?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<FieldElement, ParseError> {
        let base = self.base()?;
        if let Some((_, Tok::Caret)) = self.peek() {
            let (caret_pos, _) = self.next().unwrap();
            let exp = self.signed_integer()?;
            return base
                .pow(exp)
                .map_err(|_| ParseError::DivisionByZero { pos: caret_pos });
        }
        Ok(base)
    }

    fn signed_integer(&mut self) -> Result<i64, ParseError> {
        let mut negative = false;
        loop {
            match self.expect_more("an integer exponent")? {
                (_, Tok::Minus) => {
                    negative = !negative;
                    self.next();
                }
                (_, Tok::Plus) => {
                    self.next();
                }
                &(pos, Tok::Int(ref n)) => {
                    let mag: i64 = n
                        .try_into()
                        .map_err(|_| ParseError::ExponentOverflow { pos })?;
                    self.next();
                    return Ok(if negative { -mag } else { mag });
                }
                &(pos, ref tok) => {
                    return Err(ParseError::UnexpectedToken {
                        pos,
                        found: tok.describe(),
                        expected: "an integer exponent",
                    })
                }
            }
        }
    }

    fn base(&mut self) -> Result<FieldElement, ParseError> {
        let (pos, tok) = self
            .next()
            .ok_or(ParseError::UnexpectedEnd { expected: "a value" })?;
        match tok {
            Tok::Int(n) => Ok(FieldElement::constant(
                self.gens,
                Rational::from_integer(n),
            )),
            Tok::Ident(name) => match self.gens.index_of(&name) {
                Some(i) => Ok(FieldElement::generator(self.gens, i)),
                None => Err(ParseError::UnknownIdentifier { pos, name }),
            },
            Tok::LParen => {
                let inner = self.expr()?;
                match self.next() {
                    Some((_, Tok::RParen)) => Ok(inner),
                    Some((pos, tok)) => Err(ParseError::UnexpectedToken {
                        pos,
                        found: tok.describe(),
                        expected: "`)`",
                    }),
                    None => Err(ParseError::UnexpectedEnd { expected: "`)`" }),
                }
            }
            Tok::Minus => Ok(self.factor()?.neg()),
            other => Err(ParseError::UnexpectedToken {
                pos,
                found: other.describe(),
                expected: "a value",
            }),
        }
    }
}

/// Parses an expression over the given generators into canonical form.
pub fn parse_element(text: &str, gens: &Generators) -> Result<FieldElement, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        idx: 0,
        gens,
    };
    let value = p.expr()?;
    match p.peek() {
        None => Ok(value),
        Some(&(pos, ref tok)) => Err(ParseError::UnexpectedToken {
            pos,
            found: tok.describe(),
            expected: "end of input",
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn gens() -> Generators {
        Generators::new(vec!["t"]).unwrap()
    }

    fn parse(s: &str) -> FieldElement {
        parse_element(s, &gens()).unwrap()
    }

    #[test]
    fn quotient_with_cancellation() {
        assert_eq!(parse("t/t").to_string(), "1");
        assert_eq!(parse("(t^2-1)/(t-1)").to_string(), "t + 1");
    }

    #[test]
    fn rational_constants() {
        assert_eq!(parse("2/3").as_rational(), Some(rat(2, 3)));
        assert_eq!(parse("-7").as_rational(), Some(rat(-7, 1)));
    }

    #[test]
    fn precedence_and_unary_minus() {
        assert_eq!(parse("2/3^2").as_rational(), Some(rat(2, 9)));
        assert_eq!(parse("-t^2"), parse("0 - t^2"));
        assert_eq!(parse("1+2*t"), parse("2*t+1"));
        assert_eq!(parse("t^-2"), parse("1/t^2"));
    }

    #[test]
    fn division_by_zero_reports_position() {
        match parse_element("1/(t-t)", &gens()) {
            Err(ParseError::DivisionByZero { pos }) => assert_eq!(pos, 1),
            other => panic!("expected division error, got {:?}", other),
        }
    }

    #[test]
    fn unknown_identifier_reported() {
        match parse_element("t + u", &gens()) {
            Err(ParseError::UnknownIdentifier { pos, name }) => {
                assert_eq!(pos, 4);
                assert_eq!(name, "u");
            }
            other => panic!("expected unknown identifier, got {:?}", other),
        }
    }

    #[test]
    fn syntax_errors_report_position() {
        assert!(matches!(
            parse_element("t + ", &gens()),
            Err(ParseError::UnexpectedEnd { .. })
        ));
        assert!(matches!(
            parse_element("t @ 1", &gens()),
            Err(ParseError::UnexpectedChar { pos: 2, ch: '@' })
        ));
        assert!(matches!(
            parse_element("(t+1", &gens()),
            Err(ParseError::UnexpectedEnd { .. })
        ));
        assert!(matches!(
            parse_element("t 1", &gens()),
            Err(ParseError::UnexpectedToken { pos: 2, .. })
        ));
    }

    #[test]
    fn display_round_trip() {
        let samples = [
            "0",
            "1",
            "-2/3",
            "t",
            "1/t",
            "-t^3 + 1/2*t - 5",
            "(t^2 + 1)/(t - 1)",
            "(2*t + 1)/(t^2 + t)",
            "1/t^4",
            "(t^3 - 2*t + 1)/(3*t^2 + 4)",
        ];
        for s in samples {
            let x = parse(s);
            let rendered = x.to_string();
            assert_eq!(parse(&rendered), x, "round trip through `{}`", rendered);
        }
    }

    #[test]
    fn multivariate_parse() {
        let g2 = Generators::new(vec!["s", "t"]).unwrap();
        let x = parse_element("(s+t)^2/(s*t)", &g2).unwrap();
        assert_eq!(x.to_string(), "(s^2 + 2*s*t + t^2)/(s*t)");
    }
}
