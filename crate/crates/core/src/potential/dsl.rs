//! Reader for the potential DSL.
//!
//! ```text
//! expr   := term (("+"|"-") term)*
//! term   := unary (("*"|"/") unary)*
//! unary  := "-" unary | factor
//! factor := atom ("^" uint)?
//! atom   := uint | "i" | "eps" | "y" | "y'" | "E(" int ")"
//!         | "cos(" int "t)" | "sin(" int "t)" | ident | "(" expr ")"
//! ```
//!
//! The result is a polynomial in `y`, `y'`, `eps`, declared parameters and
//! the Laurent variable `E = e^{it}`. Division is by nonzero constants only,
//! which is how rationals like `1/3` are written.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::PotentialError;
use crate::algebra::{trig, GaussianRational, Poly, Var};

/// Functions we recognise but which fall outside the polynomial class.
const TRANSCENDENTAL: &[&str] = &["exp", "log", "ln", "sqrt", "tan", "cosh", "sinh", "tanh", "abs"];

pub(super) fn read(text: &str, params: &[String]) -> Result<Poly, PotentialError> {
    let mut r = Reader { src: text.as_bytes(), pos: 0, params };
    let p = r.expr()?;
    r.skip_ws();
    if r.pos != r.src.len() {
        return Err(r.parse_error("unexpected trailing input"));
    }
    Ok(p)
}

struct Reader<'a> {
    src: &'a [u8],
    pos: usize,
    params: &'a [String],
}

impl Reader<'_> {
    fn parse_error(&self, msg: &str) -> PotentialError {
        PotentialError::Parse { pos: self.pos, msg: msg.into() }
    }

    fn not_in_class(&self, pos: usize, msg: impl Into<String>) -> PotentialError {
        PotentialError::NotInClass { pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        let hit = self.peek() == Some(c);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn expect(&mut self, c: u8) -> Result<(), PotentialError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.parse_error(&format!("expected `{}`", c as char)))
        }
    }

    fn uint(&mut self) -> Option<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        (start < self.pos).then(|| std::str::from_utf8(&self.src[start..self.pos]).unwrap().parse().unwrap())
    }

    fn small_int(&mut self) -> Result<i32, PotentialError> {
        let neg = self.eat(b'-');
        if !neg {
            self.eat(b'+');
        }
        let n = self.uint().ok_or_else(|| self.parse_error("expected an integer"))?;
        let n = i32::try_from(n).map_err(|_| self.parse_error("integer too large"))?;
        Ok(if neg { -n } else { n })
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        if !self.src.get(self.pos).is_some_and(|c| c.is_ascii_alphabetic() || *c == b'_') {
            return None;
        }
        while self.src.get(self.pos).is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_') {
            self.pos += 1;
        }
        Some(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn expr(&mut self) -> Result<Poly, PotentialError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = &acc + &self.term()?;
            } else if self.eat(b'-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly, PotentialError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = &acc * &self.unary()?;
            } else if self.eat(b'/') {
                let at = self.pos;
                let d = self.unary()?;
                match d.as_constant() {
                    Some(c) if !c.is_zero() => acc = acc.scale(&c.inv().expect("nonzero")),
                    Some(_) => return Err(PotentialError::Parse { pos: at, msg: "division by zero".into() }),
                    None => return Err(self.not_in_class(at, "division by a non-constant is not polynomial")),
                }
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Poly, PotentialError> {
        if self.eat(b'-') {
            return Ok(-&self.unary()?);
        }
        self.factor()
    }

    fn factor(&mut self) -> Result<Poly, PotentialError> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let at = self.pos;
        if self.peek() == Some(b'-') {
            return Err(self.not_in_class(at, "negative powers are not polynomial"));
        }
        let e = self.uint().ok_or_else(|| self.parse_error("expected an exponent"))?;
        let e = u32::try_from(e).map_err(|_| self.parse_error("exponent too large"))?;
        Ok(base.pow(e))
    }

    fn atom(&mut self) -> Result<Poly, PotentialError> {
        if self.eat(b'(') {
            let inner = self.expr()?;
            self.expect(b')')?;
            return Ok(inner);
        }
        if let Some(n) = self.uint() {
            return Ok(Poly::constant(GaussianRational::real(BigRational::from_integer(n))));
        }
        let start = self.pos;
        let Some(name) = self.ident() else {
            return Err(self.parse_error("expected a number, name or `(`"));
        };
        match name.as_str() {
            "i" => Ok(Poly::constant(GaussianRational::i())),
            "eps" => Ok(Poly::var(Var::Eps)),
            "y" => {
                if self.src.get(self.pos) == Some(&b'\'') {
                    self.pos += 1;
                    Ok(Poly::var(Var::Yp))
                } else {
                    Ok(Poly::var(Var::Y))
                }
            }
            "t" => Err(self.not_in_class(start, "explicit t is only allowed inside cos(kt), sin(kt), E(k)")),
            "E" => {
                self.expect(b'(')?;
                let k = self.small_int()?;
                self.expect(b')')?;
                Ok(Poly::term(GaussianRational::one(), crate::algebra::Monomial::var(Var::E, k)))
            }
            "cos" | "sin" => {
                self.expect(b'(')?;
                let k = self.harmonic_angle()?;
                self.expect(b')')?;
                Ok(trig(name == "cos", 0, k))
            }
            f if TRANSCENDENTAL.contains(&f) => Err(self.not_in_class(start, format!("`{f}` is not polynomial"))),
            _ if self.params.contains(&name) => Ok(Poly::var(Var::param(&name))),
            _ => Err(PotentialError::Parse { pos: start, msg: format!("undeclared identifier `{name}`") }),
        }
    }

    /// `[int] ["*"] "t"` with an optional sign; anything else is outside
    /// the commensurate class.
    fn harmonic_angle(&mut self) -> Result<i32, PotentialError> {
        let at = self.pos;
        let neg = self.eat(b'-');
        let k = match self.uint() {
            Some(k) => i32::try_from(k).map_err(|_| self.parse_error("integer too large"))?,
            None => 1,
        };
        self.eat(b'*');
        match self.ident().as_deref() {
            Some("t") => Ok(if neg { -k } else { k }),
            _ => Err(self.not_in_class(at, "trigonometric arguments must be integer multiples of t")),
        }
    }
}
