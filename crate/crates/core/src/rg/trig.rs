//! Real trigonometric display of Laurent polynomials in `ph = e^{i theta}`
//! and `E = e^{it}`.
//!
//! A pair `c x + conj(c)/x` with `x = ph^p E^n` prints as
//! `2 Re(c) cos(phi) - 2 Im(c) sin(phi)`, `phi = p theta + n t`, and as a
//! multiple of `tau = t + theta` when `p = n`. Storage stays exponential.

use std::collections::BTreeMap;

use crate::algebra::{render_poly, render_series, EpsilonSeries, GaussianRational, Monomial, Poly, RenderOptions, Var};

fn angle(p: i32, n: i32) -> String {
    let scaled = |k: i32, name: &str| match k {
        1 => name.to_string(),
        -1 => format!("-{name}"),
        _ => format!("{k}*{name}"),
    };
    if p == n {
        return scaled(n, "tau");
    }
    match (p, n) {
        (0, n) => scaled(n, "t"),
        (p, 0) => scaled(p, "theta"),
        (p, n) if n < 0 => format!("{} - {}", scaled(p, "theta"), scaled(-n, "t")),
        (p, n) => format!("{} + {}", scaled(p, "theta"), scaled(n, "t")),
    }
}

/// Real form of one polynomial, or `None` when it is not conjugation
/// symmetric in `(ph, E)`.
pub fn render_trig_poly(p: &Poly) -> Option<String> {
    // (p, n) -> rest-polynomial coefficient
    let mut by_phase: BTreeMap<(i32, i32), Poly> = BTreeMap::new();
    for (m, c) in p.terms() {
        let (phase, rest) = m.split(|v| matches!(v, Var::Phase | Var::E));
        by_phase
            .entry((phase.exp(Var::Phase), phase.exp(Var::E)))
            .or_default()
            .add_term(rest, c);
    }
    let two = GaussianRational::from_int(2);
    // Collected as (rest monomial, angle key) -> (cos coeff, sin coeff).
    let mut parts: Vec<(Monomial, (i32, i32), Poly)> = Vec::new();
    for (&(ph, n), c) in &by_phase {
        let canonical = n > 0 || (n == 0 && ph > 0);
        if (ph, n) == (0, 0) {
            if !c.is_real() {
                return None;
            }
            for (m, x) in c.terms() {
                parts.push((m.clone(), (0, 0), Poly::constant(x.clone())));
            }
            continue;
        }
        let mirror = by_phase.get(&(-ph, -n)).cloned().unwrap_or_default();
        if mirror != c.conj() {
            return None;
        }
        if !canonical {
            continue;
        }
        for (m, x) in c.terms() {
            // cos and sin amplitudes packed as cos + i*sin so one Poly holds both.
            let cos = x.re().clone() * two.re();
            let sin = -(x.im().clone() * two.re());
            parts.push((m.clone(), (ph, n), Poly::constant(GaussianRational::new(cos, sin))));
        }
    }
    if parts.is_empty() {
        return Some("0".into());
    }
    parts.sort_by(|a, b| (a.1 .1, a.1 .0, &a.0).cmp(&(b.1 .1, b.1 .0, &b.0)));
    let mut out = String::new();
    for (m, key, amp) in parts {
        let c = amp.as_constant().expect("constant amplitude");
        let mono = render_poly(&Poly::term(GaussianRational::one(), m), RenderOptions::default());
        let pieces: Vec<(GaussianRational, Option<String>)> = if key == (0, 0) {
            vec![(GaussianRational::real(c.re().clone()), None)]
        } else {
            vec![
                (GaussianRational::real(c.re().clone()), Some(format!("cos({})", angle(key.0, key.1)))),
                (GaussianRational::real(c.im().clone()), Some(format!("sin({})", angle(key.0, key.1)))),
            ]
        };
        for (x, f) in pieces {
            if x.is_zero() {
                continue;
            }
            let mut factors: Vec<String> = Vec::new();
            if mono != "1" {
                factors.push(mono.clone());
            }
            if let Some(f) = f {
                factors.push(f);
            }
            let neg = x.re() < &num_traits::Zero::zero();
            let mag = if neg { -x } else { x };
            let body = match (mag.is_one(), factors.is_empty()) {
                (true, false) => factors.join("*"),
                (_, true) => mag.to_string(),
                (false, false) => format!("{mag}*{}", factors.join("*")),
            };
            match (out.is_empty(), neg) {
                (true, true) => out.push('-'),
                (true, false) => {}
                (false, true) => out.push_str(" - "),
                (false, false) => out.push_str(" + "),
            }
            out.push_str(&body);
        }
    }
    Some(if out.is_empty() { "0".into() } else { out })
}

/// Real form of a series; falls back to the exponential form when any
/// coefficient is not conjugation symmetric.
pub fn render_trig_series(s: &EpsilonSeries) -> String {
    let mut parts = Vec::new();
    for (k, c) in s.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let Some(body) = render_trig_poly(c) else {
            return render_series(s, RenderOptions::default());
        };
        parts.push(match k {
            0 => body,
            1 => format!("eps*({body})"),
            _ => format!("eps^{k}*({body})"),
        });
    }
    parts.push(format!("O(eps^{})", s.cap() + 1));
    parts.join(" + ")
}
