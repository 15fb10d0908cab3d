//! Canonical text and JSON renderings.
//!
//! The text form uses `i` for the imaginary unit and `eps` for the expansion
//! parameter, lists terms in ascending graded order, and is accepted back by
//! [`super::parse_expr`].

use std::collections::BTreeSet;
use std::fmt;

use serde_json::{json, Value};

use super::gaussian::fmt_rational;
use super::{EpsilonSeries, GaussianRational, Monomial, Poly, Var};

/// Printer switches.
#[derive(Clone, Copy, Debug, Default)]
pub struct RenderOptions {
    /// Display `A*B` as `C` (display-only alias).
    pub alias_c: bool,
}

fn render_monomial(m: &Monomial, opts: RenderOptions) -> String {
    let mut parts: Vec<(String, i32)> = Vec::new();
    let (a, b) = (m.exp(Var::A), m.exp(Var::B));
    let c = if opts.alias_c && a > 0 && b > 0 { a.min(b) } else { 0 };
    for (v, e) in m.iter() {
        let e = match v {
            Var::A | Var::B => e - c,
            _ => e,
        };
        if e != 0 {
            parts.push((v.name().to_string(), e));
        }
        if v == Var::B && c > 0 {
            parts.push(("C".to_string(), c));
        }
    }
    parts
        .into_iter()
        .map(|(n, e)| if e == 1 { n } else { format!("{n}^{e}") })
        .collect::<Vec<_>>()
        .join("*")
}

fn render_term(c: &GaussianRational, m: &Monomial, opts: RenderOptions) -> (bool, String) {
    let negative = c.is_negative_like();
    let mag = if negative { -c } else { c.clone() };
    let mono = render_monomial(m, opts);
    let body = if mono.is_empty() {
        mag.to_string()
    } else if mag.is_one() {
        mono
    } else {
        format!("{mag}*{mono}")
    };
    (negative, body)
}

/// Canonical rendering of a polynomial.
pub fn render_poly(p: &Poly, opts: RenderOptions) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (idx, (m, c)) in p.terms().enumerate() {
        let (neg, body) = render_term(c, m, opts);
        match (idx, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(&body);
    }
    out
}

/// Canonical rendering of a series, ending in `O(eps^{cap+1})`.
pub fn render_series(s: &EpsilonSeries, opts: RenderOptions) -> String {
    let mut parts = Vec::new();
    for (k, c) in s.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let body = render_poly(c, opts);
        parts.push(match k {
            0 => body,
            1 => format!("eps*({body})"),
            _ => format!("eps^{k}*({body})"),
        });
    }
    parts.push(format!("O(eps^{})", s.cap() + 1));
    parts.join(" + ")
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_poly(self, RenderOptions::default()))
    }
}

impl fmt::Display for EpsilonSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_series(self, RenderOptions::default()))
    }
}

fn rational_pair(c: &GaussianRational) -> (String, String) {
    (fmt_rational(c.re()), fmt_rational(c.im()))
}

fn terms_json(p: &Poly, vars: &[Var]) -> Value {
    Value::Array(
        p.terms()
            .map(|(m, c)| {
                let degs: Vec<i32> = vars.iter().map(|v| m.exp(*v)).collect();
                let (re, im) = rational_pair(c);
                json!([degs, re, im])
            })
            .collect(),
    )
}

/// `{"vars": [...], "terms": [[degree-vector, "re", "im"], ...]}`.
pub fn poly_to_json(p: &Poly) -> Value {
    let vars: Vec<Var> = p.variables().into_iter().collect();
    json!({
        "vars": vars.iter().map(|v| v.name()).collect::<Vec<_>>(),
        "terms": terms_json(p, &vars),
    })
}

/// `{"cap": K, "vars": [...], "coeffs": [terms of eps^0, ..., terms of eps^K]}`.
pub fn series_to_json(s: &EpsilonSeries) -> Value {
    let vars: Vec<Var> = s
        .coeffs()
        .iter()
        .flat_map(|c| c.variables())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    json!({
        "cap": s.cap(),
        "vars": vars.iter().map(|v| v.name()).collect::<Vec<_>>(),
        "coeffs": s.coeffs().iter().map(|c| terms_json(c, &vars)).collect::<Vec<_>>(),
    })
}
