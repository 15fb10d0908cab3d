//! Reader for the canonical text form, extended with trigonometric sugar.
//!
//! Accepts `+ - * / ^`, parentheses, rational literals, `i`, `eps`, the
//! reserved variable names of [`Var`], parameters (any other identifier),
//! `O(eps^n)` as a truncation marker, and `cos(..)`/`sin(..)` whose argument
//! is an integer combination of `theta`, `t` and `tau = t + theta`. A
//! trigonometric factor expands into the Laurent variables `ph = e^{i theta}`
//! and `E = e^{it}`. Division is only allowed by nonzero constants.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{AlgebraError, EpsilonSeries, GaussianRational, Monomial, Poly, Var};

/// Parse an expression; also returns the cap implied by an `O(eps^n)` marker.
pub fn parse_expr(text: &str) -> Result<(Poly, Option<usize>), AlgebraError> {
    let mut p = Reader { src: text.as_bytes(), pos: 0, cap: None };
    let value = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok((value, p.cap))
}

/// Parse into a series. The cap comes from an `O(eps^n)` marker when
/// present, otherwise from `default_cap`.
pub fn parse_series(text: &str, default_cap: usize) -> Result<EpsilonSeries, AlgebraError> {
    let (p, cap) = parse_expr(text)?;
    EpsilonSeries::from_poly_in_eps(&p, cap.unwrap_or(default_cap))
}

struct Reader<'a> {
    src: &'a [u8],
    pos: usize,
    cap: Option<usize>,
}

impl Reader<'_> {
    fn error(&self, msg: &str) -> AlgebraError {
        AlgebraError::Parse { pos: self.pos, msg: msg.to_string() }
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

    fn expect(&mut self, c: u8) -> Result<(), AlgebraError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", c as char)))
        }
    }

    fn integer(&mut self) -> Option<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        std::str::from_utf8(&self.src[start..self.pos]).ok()?.parse().ok()
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            if self.pos == start && self.src[self.pos].is_ascii_digit() {
                return None;
            }
            self.pos += 1;
        }
        (start != self.pos).then(|| String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn expr(&mut self) -> Result<Poly, AlgebraError> {
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

    fn term(&mut self) -> Result<Poly, AlgebraError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = &acc * &self.unary()?;
            } else if self.eat(b'/') {
                let at = self.pos;
                let d = self.unary()?;
                let c = d.as_constant().filter(|c| !c.is_zero()).ok_or(AlgebraError::Parse {
                    pos: at,
                    msg: "division is only allowed by nonzero constants".into(),
                })?;
                acc = acc.scale(&c.inv()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Poly, AlgebraError> {
        if self.eat(b'-') {
            return Ok(-&self.unary()?);
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Poly, AlgebraError> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let negative = self.eat(b'-');
        let e: i32 = self
            .integer()
            .and_then(|n| i32::try_from(n).ok())
            .ok_or_else(|| self.error("expected an integer exponent"))?;
        if !negative {
            return Ok(base.pow(e as u32));
        }
        // Negative powers only for single terms (Laurent monomials).
        let mut terms = base.terms();
        match (terms.next(), terms.next()) {
            (Some((m, c)), None) => {
                let inv_m = Monomial::from_pairs(m.iter().map(|(v, x)| (v, -x)));
                Ok(Poly::term(c.inv()?, inv_m).pow(e as u32))
            }
            _ => Err(self.error("negative exponent of a non-monomial")),
        }
    }

    fn atom(&mut self) -> Result<Poly, AlgebraError> {
        if self.eat(b'(') {
            let inner = self.expr()?;
            self.expect(b')')?;
            return Ok(inner);
        }
        if let Some(n) = self.integer() {
            return Ok(Poly::constant(GaussianRational::real(BigRational::from_integer(n))));
        }
        let start = self.pos;
        let name = self.ident().ok_or_else(|| self.error("expected a number, name or `(`"))?;
        match name.as_str() {
            "i" => Ok(Poly::constant(GaussianRational::i())),
            "cos" | "sin" => {
                self.expect(b'(')?;
                let (p, n) = self.angle()?;
                self.expect(b')')?;
                Ok(trig(name == "cos", p, n))
            }
            "O" => {
                self.expect(b'(')?;
                let at = self.pos;
                let inner = self.expr()?;
                self.expect(b')')?;
                let mut terms = inner.terms();
                let order = match (terms.next(), terms.next()) {
                    (Some((m, c)), None) if c.is_one() && m.iter().all(|(v, _)| v == Var::Eps) => m.exp(Var::Eps),
                    _ => return Err(AlgebraError::Parse { pos: at, msg: "expected O(eps^n)".into() }),
                };
                if order < 1 {
                    return Err(AlgebraError::Parse { pos: at, msg: "O(eps^n) needs n >= 1".into() });
                }
                self.cap = Some(order as usize - 1);
                Ok(Poly::zero())
            }
            "theta" | "tau" => Err(AlgebraError::Parse { pos: start, msg: format!("`{name}` may only appear inside cos/sin") }),
            _ => {
                // `y'` is a single name.
                if name == "y" && self.src.get(self.pos) == Some(&b'\'') {
                    self.pos += 1;
                    return Ok(Poly::var(Var::Yp));
                }
                Ok(Poly::var(Var::from_name(&name)))
            }
        }
    }

    /// `[+-] [int] [*] name ([+-] ...)*` with names theta, t, tau.
    fn angle(&mut self) -> Result<(i32, i32), AlgebraError> {
        let (mut p, mut n) = (0i32, 0i32);
        let mut first = true;
        loop {
            let sign = if self.eat(b'-') {
                -1
            } else if self.eat(b'+') || first {
                1
            } else {
                break;
            };
            first = false;
            let k: i32 = match self.integer() {
                Some(k) => i32::try_from(k).map_err(|_| self.error("angle multiple too large"))?,
                None => 1,
            };
            self.eat(b'*');
            let name = self.ident().ok_or_else(|| self.error("expected theta, t or tau"))?;
            match name.as_str() {
                "theta" => p += sign * k,
                "t" => n += sign * k,
                "tau" => {
                    p += sign * k;
                    n += sign * k;
                }
                _ => return Err(self.error("angles are combinations of theta, t, tau")),
            }
        }
        Ok((p, n))
    }
}

/// `cos(p*theta + n*t)` or `sin(...)` as a Laurent polynomial in `ph`, `E`.
pub fn trig(cosine: bool, p: i32, n: i32) -> Poly {
    let plus = Poly::term(GaussianRational::one(), Monomial::from_pairs([(Var::Phase, p), (Var::E, n)]));
    let minus = Poly::term(GaussianRational::one(), Monomial::from_pairs([(Var::Phase, -p), (Var::E, -n)]));
    if cosine {
        (&plus + &minus).scale(&GaussianRational::ratio(1, 2))
    } else {
        // (x - 1/x) / (2i) = -i/2 (x - 1/x)
        (&plus - &minus).scale(&(GaussianRational::i() * GaussianRational::ratio(-1, 2)))
    }
}
