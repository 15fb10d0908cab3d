//! Potentials `V = sum C_{klmn} eps^n e^{kit} y^l (y')^m` as a quartet table.

mod dsl;
mod harmonic;

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

use crate::algebra::{parse_expr, AlgebraError, GaussianRational, Monomial, Poly, Var};

pub use harmonic::{convolve, eval_potential, HarmonicSeries, Harmonics};
pub(crate) use harmonic::PowerCache;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PotentialError {
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("not in the potential class (at {pos}): {msg}")]
    NotInClass { pos: usize, msg: String },
    #[error("trivial linear potential: need a term with l+m >= 1 and |k| >= max(2-l-m, 0)")]
    TrivialLinear,
    #[error("unknown parameter `{0}`")]
    UnknownParam(String),
    #[error("bad quartet table: {0}")]
    Table(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Index `(k, l, m, n)` of `eps^n e^{kit} y^l (y')^m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Quartet {
    pub k: i64,
    pub l: u32,
    pub m: u32,
    pub n: u32,
}

impl Quartet {
    pub const fn new(k: i64, l: u32, m: u32, n: u32) -> Self {
        Self { k, l, m, n }
    }

    /// The nontriviality test of a single entry.
    pub fn is_nonlinear_or_driven(&self) -> bool {
        let lm = (self.l + self.m) as i64;
        lm >= 1 && self.k.abs() >= (2 - lm).max(0)
    }
}

impl fmt::Display for Quartet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.k, self.l, self.m, self.n)
    }
}

/// A validated potential. Coefficients are polynomials in the declared
/// parameters only.
#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    table: BTreeMap<Quartet, Poly>,
    params: Vec<String>,
}

impl Potential {
    /// Parse the DSL and run validation.
    pub fn parse(text: &str, params: &[&str]) -> Result<Self, PotentialError> {
        let params: Vec<String> = params.iter().map(|s| s.to_string()).collect();
        let p = dsl::read(text, &params)?;
        let v = Self::from_poly(&p, params)?;
        v.validate()?;
        Ok(v)
    }

    /// Split a polynomial in `y, y', eps, E` and parameters into quartets.
    fn from_poly(p: &Poly, params: Vec<String>) -> Result<Self, PotentialError> {
        let mut table: BTreeMap<Quartet, Poly> = BTreeMap::new();
        for (mono, c) in p.terms() {
            let (structural, rest) = mono.split(|v| matches!(v, Var::Y | Var::Yp | Var::Eps | Var::E));
            if let Some((v, _)) = rest.iter().find(|(v, _)| !v.is_param()) {
                return Err(PotentialError::NotInClass { pos: 0, msg: format!("variable `{v}` is not allowed") });
            }
            let (l, m, n) = (structural.exp(Var::Y), structural.exp(Var::Yp), structural.exp(Var::Eps));
            if l < 0 || m < 0 || n < 0 {
                return Err(PotentialError::NotInClass { pos: 0, msg: "negative power".into() });
            }
            let q = Quartet::new(structural.exp(Var::E) as i64, l as u32, m as u32, n as u32);
            table.entry(q).or_default().add_term(rest, c);
        }
        table.retain(|_, c| !c.is_zero());
        Ok(Self { table, params })
    }

    /// Build from a table without the nontriviality check.
    pub fn from_table_unchecked(table: BTreeMap<Quartet, Poly>, params: Vec<String>) -> Self {
        let table = table.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Self { table, params }
    }

    pub fn from_table(table: BTreeMap<Quartet, Poly>, params: Vec<String>) -> Result<Self, PotentialError> {
        let v = Self::from_table_unchecked(table, params);
        for c in v.table.values() {
            if let Some(x) = c.variables().into_iter().find(|x| !x.is_param() || !v.params.iter().any(|p| p == x.name())) {
                return Err(PotentialError::UnknownParam(x.name().to_string()));
            }
        }
        v.validate()?;
        Ok(v)
    }

    pub fn validate(&self) -> Result<(), PotentialError> {
        if self.table.keys().any(Quartet::is_nonlinear_or_driven) {
            Ok(())
        } else {
            Err(PotentialError::TrivialLinear)
        }
    }

    pub fn table(&self) -> &BTreeMap<Quartet, Poly> {
        &self.table
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn coeff(&self, q: Quartet) -> Poly {
        self.table.get(&q).cloned().unwrap_or_default()
    }

    /// `M = max(|k| + l + m - 1, 1)` over the support: each eps-order can
    /// widen the harmonic support by at most `M`.
    pub fn support_rate(&self) -> i64 {
        self.table
            .keys()
            .map(|q| q.k.abs() + (q.l + q.m) as i64 - 1)
            .max()
            .unwrap_or(1)
            .max(1)
    }

    /// Largest power of `y` and `y'` combined.
    pub fn max_degree(&self) -> u32 {
        self.table.keys().map(|q| q.l + q.m).max().unwrap_or(0)
    }

    /// The whole potential as one polynomial in `y, y', eps, E` and parameters.
    pub fn to_poly(&self) -> Poly {
        let mut out = Poly::zero();
        for (q, c) in &self.table {
            let m = Monomial::from_pairs([
                (Var::E, q.k as i32),
                (Var::Y, q.l as i32),
                (Var::Yp, q.m as i32),
                (Var::Eps, q.n as i32),
            ]);
            out.add_assign_ref(&c.mul_monomial(&m));
        }
        out
    }

    /// Replace parameter `name` by `value`, a polynomial in `eps` and
    /// parameters. `new_params` lists the parameters that remain declared.
    pub fn substitute_param(&self, name: &str, value: &Poly, new_params: &[&str]) -> Result<Self, PotentialError> {
        if !self.params.iter().any(|p| p == name) {
            return Err(PotentialError::UnknownParam(name.to_string()));
        }
        let p = self.to_poly().substitute_var(Var::param(name), value)?;
        let params: Vec<String> = new_params.iter().map(|s| s.to_string()).collect();
        for v in p.variables() {
            if v.is_param() && !params.iter().any(|x| x == v.name()) {
                return Err(PotentialError::UnknownParam(v.name().to_string()));
            }
        }
        Self::from_poly(&p, params)
    }

    /// Bind a parameter to a constant.
    pub fn bind(&self, name: &str, value: &GaussianRational) -> Result<Self, PotentialError> {
        let rest: Vec<&str> = self.params.iter().map(String::as_str).filter(|p| *p != name).collect();
        self.substitute_param(name, &Poly::constant(value.clone()), &rest)
    }

    /// Whether `C_{klmn} = conj(C_{-klmn})` (parameters treated as real).
    pub fn is_real(&self) -> bool {
        self.table.iter().all(|(q, c)| {
            let mirror = Quartet { k: -q.k, ..*q };
            self.coeff(mirror) == c.conj()
        })
    }

    /// JSON form: `{"params": [...], "quartets": [{"k","l","m","n","c"}]}`
    /// with `c` in canonical text.
    pub fn to_json(&self) -> Value {
        json!({
            "params": self.params,
            "quartets": self.table.iter().map(|(q, c)| json!({
                "k": q.k, "l": q.l, "m": q.m, "n": q.n, "c": c.to_string(),
            })).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, PotentialError> {
        let bad = |m: &str| PotentialError::Table(m.to_string());
        let params: Vec<String> = v["params"]
            .as_array()
            .ok_or_else(|| bad("missing `params`"))?
            .iter()
            .map(|p| p.as_str().map(str::to_string).ok_or_else(|| bad("parameter names must be strings")))
            .collect::<Result<_, _>>()?;
        let mut table = BTreeMap::new();
        for e in v["quartets"].as_array().ok_or_else(|| bad("missing `quartets`"))? {
            let int = |key: &str| e[key].as_i64().ok_or_else(|| bad(&format!("quartet field `{key}`")));
            let nonneg = |key: &str| -> Result<u32, PotentialError> {
                u32::try_from(int(key)?).map_err(|_| bad(&format!("quartet field `{key}` must be >= 0")))
            };
            let q = Quartet::new(int("k")?, nonneg("l")?, nonneg("m")?, nonneg("n")?);
            let (c, _) = parse_expr(e["c"].as_str().ok_or_else(|| bad("coefficient must be a string"))?)?;
            table.insert(q, c);
        }
        Self::from_table(table, params)
    }
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.table.iter().map(|(q, c)| format!("{q}: {c}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: i64) -> Poly {
        Poly::constant(GaussianRational::from_int(n))
    }

    #[test]
    fn van_der_pol_table() {
        let v = Potential::parse("(1 - y^2)*y'", &[]).unwrap();
        let expect: BTreeMap<_, _> = [(Quartet::new(0, 0, 1, 0), c(1)), (Quartet::new(0, 2, 1, 0), c(-1))].into();
        assert_eq!(v.table(), &expect);
        assert!(v.is_real());
        assert_eq!(v.support_rate(), 2);
    }

    #[test]
    fn mathieu_table() {
        let v = Potential::parse("(g + 2*cos(1t))*(-y)", &["g"]).unwrap();
        let g = Poly::var(Var::param("g"));
        let expect: BTreeMap<_, _> = [
            (Quartet::new(-1, 1, 0, 0), c(-1)),
            (Quartet::new(0, 1, 0, 0), -g),
            (Quartet::new(1, 1, 0, 0), c(-1)),
        ]
        .into();
        assert_eq!(v.table(), &expect);
    }

    #[test]
    fn class_violations() {
        assert!(matches!(Potential::parse("t*y", &[]), Err(PotentialError::NotInClass { pos: 0, .. })));
        assert!(matches!(Potential::parse("y/(1+y)", &[]), Err(PotentialError::NotInClass { .. })));
        assert!(matches!(Potential::parse("exp(y)", &[]), Err(PotentialError::NotInClass { .. })));
        assert!(matches!(Potential::parse("cos(y)", &[]), Err(PotentialError::NotInClass { .. })));
        assert!(matches!(Potential::parse("h*y^2", &[]), Err(PotentialError::Parse { pos: 0, .. })));
        assert_eq!(Potential::parse("3*y + 2*y' + E(5)", &[]), Err(PotentialError::TrivialLinear));
        // e^{2it} y passes: |k| = 2 >= 1.
        assert!(Potential::parse("E(2)*y", &[]).is_ok());
    }

    #[test]
    fn sugar_agrees() {
        let a = Potential::parse("2*cos(3t)*y^2", &[]).unwrap();
        let b = Potential::parse("(E(3) + E(-3))*y^2", &[]).unwrap();
        assert_eq!(a, b);
        let s = Potential::parse("2*i*sin(t)*y^2", &[]).unwrap();
        let d = Potential::parse("(E(1) - E(-1))*y^2", &[]).unwrap();
        assert_eq!(s, d);
    }

    #[test]
    fn json_round_trip() {
        let v = Potential::parse("(g + 2*cos(1t))*(-y) + eps*i/2*y^3", &["g"]).unwrap();
        let back = Potential::from_json(&v.to_json()).unwrap();
        assert_eq!(v, back);
    }

    #[test]
    fn detuning_substitution() {
        let v = Potential::parse("(g + 2*cos(1t))*(-y)", &["g"]).unwrap();
        let (g, _) = parse_expr("g1 + g2*eps").unwrap();
        let w = v.substitute_param("g", &g, &["g1", "g2"]).unwrap();
        assert_eq!(w.coeff(Quartet::new(0, 1, 0, 1)), -Poly::var(Var::param("g2")));
        assert_eq!(w.coeff(Quartet::new(0, 1, 0, 0)), -Poly::var(Var::param("g1")));
        let d = Potential::parse("-(y' + g*y^3)", &["g"]).unwrap().bind("g", &GaussianRational::one()).unwrap();
        assert_eq!(d, Potential::parse("-y' - y^3", &[]).unwrap());
    }
}
