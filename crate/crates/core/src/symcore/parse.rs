//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' exponent)?
//! exponent:= '-'? INT | '(' '-'? INT ')'
//! primary := NUMBER | IDENT | FUNC '(' expr ')' | '(' expr ')'
//! ```
//!
//! Identifiers are `x t u lambda eta zeta beta a i`, jet coordinates
//! `u_[xt]+` (letter order irrelevant) and the functions `sin cos exp`.

use alloc::string::{String, ToString};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::expr::{Expr, Func, JetCoord, Param};
use super::gauss::GaussRational;
use super::SymError;

/// Parameter names accepted by the grammar.
pub const PARAM_NAMES: [&str; 5] = ["lambda", "eta", "zeta", "beta", "a"];

pub fn parse(text: &str) -> Result<Expr, SymError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn syntax(&self, msg: &str) -> SymError {
        SymError::Syntax { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), SymError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.syntax(&alloc::format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr, SymError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = acc + self.term()?;
            } else if self.eat(b'-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, SymError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = acc * self.unary()?;
            } else if self.peek() == Some(b'/') {
                let at = self.pos;
                self.pos += 1;
                let rhs = self.unary()?;
                acc = acc.checked_div(rhs).ok_or(SymError::Syntax {
                    pos: at,
                    msg: "division by the literal zero".to_string(),
                })?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, SymError> {
        if self.eat(b'-') {
            Ok(-self.unary()?)
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, SymError> {
        let base = self.primary()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let at = self.pos;
        let n = if self.eat(b'(') {
            let n = self.integer_exponent()?;
            self.expect(b')')?;
            n
        } else {
            self.integer_exponent()?
        };
        base.checked_pow(n).ok_or(SymError::Syntax {
            pos: at,
            msg: "negative power of the literal zero".to_string(),
        })
    }

    fn integer_exponent(&mut self) -> Result<i32, SymError> {
        let neg = self.eat(b'-');
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.syntax("expected an integer exponent"));
        }
        let digits = core::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let n: i32 = digits
            .parse()
            .map_err(|_| SymError::Syntax { pos: start, msg: "exponent out of range".to_string() })?;
        Ok(if neg { -n } else { n })
    }

    fn primary(&mut self) -> Result<Expr, SymError> {
        match self.peek() {
            None => Err(self.syntax("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.identifier(),
            Some(_) => Err(self.syntax("unexpected character")),
        }
    }

    fn number(&mut self) -> Result<Expr, SymError> {
        let start = self.pos;
        let mut int_part = String::new();
        let mut frac_part = String::new();
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            int_part.push(self.src[self.pos] as char);
            self.pos += 1;
        }
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                frac_part.push(self.src[self.pos] as char);
                self.pos += 1;
            }
        }
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(SymError::Syntax { pos: start, msg: "malformed number".to_string() });
        }
        let mut digits = int_part;
        digits.push_str(&frac_part);
        let numer: BigInt = digits.parse().unwrap_or_else(|_| BigInt::zero());
        let mut denom = BigInt::one();
        for _ in 0..frac_part.len() {
            denom *= 10;
        }
        Ok(Expr::Const(GaussRational::from_real(BigRational::new(numer, denom))))
    }

    fn identifier(&mut self) -> Result<Expr, SymError> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let word = core::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let func = match word {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "exp" => Some(Func::Exp),
            _ => None,
        };
        if let Some(f) = func {
            self.expect(b'(')?;
            let arg = self.expr()?;
            self.expect(b')')?;
            return Ok(Expr::func(f, arg));
        }
        match word {
            "x" => return Ok(Expr::x()),
            "t" => return Ok(Expr::t()),
            "u" => return Ok(Expr::u()),
            "i" => return Ok(Expr::i()),
            _ => {}
        }
        if PARAM_NAMES.contains(&word) {
            return Ok(Expr::Param(Param::new(word)));
        }
        if let Some(rest) = word.strip_prefix("u_") {
            if !rest.is_empty() && rest.bytes().all(|b| b == b'x' || b == b't') {
                let nx = rest.bytes().filter(|&b| b == b'x').count() as u32;
                let nt = rest.len() as u32 - nx;
                return Ok(Expr::Jet(JetCoord::new(nx, nt)));
            }
        }
        Err(SymError::UnknownIdentifier { pos: start, name: word.to_string() })
    }
}
