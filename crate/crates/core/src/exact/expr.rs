//! ASCII expression grammar shared by the catalog format and the CLI.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary | unary)*      juxtaposition multiplies
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' '-'? integer)?
//! atom   := integer | symbol | '(' expr ')'
//! symbol := 'n' | 'k' | 'a' | 'b' | 'j'
//! ```
//!
//! Juxtaposition lets CAS output such as `2 n^2 (1 + 2 n)` parse directly.

use num_bigint::BigInt;

use super::poly::{MultiPoly, Var};
use super::ratfunc::RatFunc;
use super::rational::ExactRational;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Sym(Var),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
}

fn lex(src: &str) -> Result<Lexer> {
    let chars: Vec<char> = src.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            toks.push((Tok::Int(s.parse().unwrap()), col));
            continue;
        }
        let t = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ => match Var::from_char(c) {
                Some(v) => Tok::Sym(v),
                None => {
                    return Err(Error::ParseError {
                        line: 1,
                        column: col,
                        message: format!("unexpected character `{c}`"),
                    })
                }
            },
        };
        toks.push((t, col));
        i += 1;
    }
    Ok(Lexer { toks })
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end_col: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|(_, c)| *c).unwrap_or(self.end_col)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::ParseError {
            line: 1,
            column: self.col(),
            message: msg.into(),
        })
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<RatFunc> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RatFunc> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let col = self.col();
                    let d = self.unary()?;
                    if d.is_zero() {
                        return Err(Error::ParseError {
                            line: 1,
                            column: col,
                            message: "division by zero".into(),
                        });
                    }
                    acc = &acc / &d;
                }
                Some(Tok::Int(_)) | Some(Tok::Sym(_)) | Some(Tok::LParen) => {
                    acc = &acc * &self.unary()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<RatFunc> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                Ok(-self.unary()?)
            }
            Some(Tok::Plus) => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RatFunc> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.bump();
        let neg = if self.peek() == Some(&Tok::Minus) {
            self.bump();
            true
        } else {
            false
        };
        let e = match self.bump() {
            Some(Tok::Int(e)) => e,
            _ => {
                self.pos -= 1;
                return self.err("expected integer exponent");
            }
        };
        let e: i32 = match i32::try_from(e) {
            Ok(e) if e <= 256 => e,
            _ => return self.err("exponent too large"),
        };
        let e = if neg { -e } else { e };
        if e < 0 && base.is_zero() {
            return self.err("division by zero");
        }
        base.pow(e)
    }

    fn atom(&mut self) -> Result<RatFunc> {
        match self.bump() {
            Some(Tok::Int(v)) => Ok(RatFunc::constant(ExactRational::from_integer(v))),
            Some(Tok::Sym(v)) => Ok(RatFunc::var(v)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                if self.bump() != Some(Tok::RParen) {
                    self.pos -= 1;
                    return self.err("expected `)`");
                }
                Ok(e)
            }
            Some(_) => {
                self.pos -= 1;
                self.err("expected number, symbol or `(`")
            }
            None => self.err("unexpected end of expression"),
        }
    }
}

/// Parses an expression into a normalized rational function.
pub fn parse_ratfunc(src: &str) -> Result<RatFunc> {
    let lx = lex(src)?;
    let mut p = Parser {
        toks: lx.toks,
        pos: 0,
        end_col: src.chars().count() + 1,
    };
    if p.peek().is_none() {
        return p.err("empty expression");
    }
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(e)
}

/// Parses an expression that must denote a polynomial.
pub fn parse_poly(src: &str) -> Result<MultiPoly> {
    let f = parse_ratfunc(src)?;
    f.as_polynomial().ok_or_else(|| Error::ParseError {
        line: 1,
        column: 1,
        message: format!("expected a polynomial, found `{f}`"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_juxtaposition() {
        assert_eq!(parse_poly("2 n^2 (1 + 2 n)").unwrap().to_string(), "4*n^3 + 2*n^2");
        assert_eq!(parse_poly("-n^2").unwrap().to_string(), "-n^2");
        assert_eq!(parse_poly("2/3*k").unwrap().to_string(), "2/3*k");
        assert_eq!(parse_poly("a - b + -3").unwrap().to_string(), "a - b - 3");
        assert_eq!(parse_poly("(a - n)^2").unwrap().to_string(), "n^2 - 2*n*a + a^2");
    }

    #[test]
    fn rational_function_forms() {
        let f = parse_ratfunc("(1/(k + 2 n))2 n").unwrap();
        assert_eq!(f.to_string(), "2*n/(2*n + k)");
        let g = parse_ratfunc("n^-1").unwrap();
        assert_eq!(g.to_string(), "1/n");
    }

    #[test]
    fn printed_forms_reparse() {
        for s in ["(n^2 - 1)/(3*k + a)", "-2/(n - 1)", "5/7", "a*b*j^3 - 1/2*n"] {
            let f = parse_ratfunc(s).unwrap();
            let g = parse_ratfunc(&f.to_string()).unwrap();
            assert_eq!(f, g, "{s}");
        }
    }

    #[test]
    fn errors_carry_columns() {
        match parse_ratfunc("n + x") {
            Err(Error::ParseError { column, .. }) => assert_eq!(column, 5),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_ratfunc("(n + 1"), Err(Error::ParseError { .. })));
        assert!(matches!(parse_ratfunc("n/0"), Err(Error::ParseError { .. })));
        assert!(matches!(parse_ratfunc(""), Err(Error::ParseError { .. })));
        assert!(matches!(parse_poly("1/n"), Err(Error::ParseError { .. })));
    }
}
