//! Parser for the scalar-field grammar.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | '+' unary | power
//! power := atom ('^' exponent)?
//! exponent := integer | '-' integer | '(' '-'? integer ')'
//! atom  := number | 'h0' | 'h1' | 'h2' | 'h3' | func '(' expr ')' | '(' expr ')'
//! func  := 'sqrt' | 'exp' | 'log' | 'sin' | 'cos'
//! ```
//!
//! Numbers are integers or decimals and are read as exact rationals.
//! Whitespace, including newlines, is ignored; errors carry 1-based line and
//! column positions.

use crate::error::{Error, Result};
use crate::forms::field::{Func, ScalarField};
use crate::scalar::parse_rational;

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error_at(&self, pos: usize, message: impl Into<String>) -> Error {
        let before = &self.src[..pos];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek_raw() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek_raw(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.peek_raw()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            let found = self
                .peek()
                .map_or("end of input".to_string(), |f| format!("{f:?}"));
            Err(self.error_at(self.pos, format!("expected {c:?}, found {found}")))
        }
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> &'a str {
        let start = self.pos;
        while let Some(c) = self.peek_raw() {
            if f(c) {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        &self.src[start..self.pos]
    }

    fn expr(&mut self) -> Result<ScalarField> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc + self.term()?;
            } else if self.eat('-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<ScalarField> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc * self.unary()?;
            } else if self.eat('/') {
                acc = acc / self.unary()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<ScalarField> {
        if self.eat('-') {
            Ok(-self.unary()?)
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<ScalarField> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let paren = self.eat('(');
        let neg = self.eat('-');
        self.skip_ws();
        let start = self.pos;
        let digits = self.take_while(|c| c.is_ascii_digit());
        let k: i32 = digits
            .parse()
            .map_err(|_| self.error_at(start, "exponent must be an integer"))?;
        if paren {
            self.expect(')')?;
        }
        Ok(base.powi(if neg { -k } else { k }))
    }

    fn atom(&mut self) -> Result<ScalarField> {
        let start = match self.peek() {
            None => return Err(self.error_at(self.pos, "unexpected end of input")),
            Some(_) => self.pos,
        };
        let c = self.peek_raw().unwrap_or_default();
        if c == '(' {
            self.pos += 1;
            let e = self.expr()?;
            self.expect(')')?;
            return Ok(e);
        }
        if c.is_ascii_digit() || c == '.' {
            let text = self.take_while(|c| c.is_ascii_digit() || c == '.');
            let value = parse_rational(text)
                .ok_or_else(|| self.error_at(start, format!("invalid number {text:?}")))?;
            return Ok(ScalarField::constant(value));
        }
        if c.is_alphabetic() || c == '_' {
            let name = self.take_while(|c| c.is_alphanumeric() || c == '_');
            if let Some(f) = Func::from_name(name) {
                self.expect('(')?;
                let arg = self.expr()?;
                self.expect(')')?;
                return Ok(ScalarField::apply(f, &arg));
            }
            return match name {
                "h0" => Ok(ScalarField::var(0)),
                "h1" => Ok(ScalarField::var(1)),
                "h2" => Ok(ScalarField::var(2)),
                "h3" => Ok(ScalarField::var(3)),
                _ => Err(Error::UnknownVariable(name.to_string())),
            };
        }
        Err(self.error_at(start, format!("unexpected character {c:?}")))
    }
}

/// Parse a scalar field from text.
pub fn parse(src: &str) -> Result<ScalarField> {
    let mut p = Parser { src, pos: 0 };
    let e = p.expr()?;
    if let Some(c) = p.peek() {
        return Err(p.error_at(p.pos, format!("unexpected trailing {c:?}")));
    }
    Ok(e)
}
