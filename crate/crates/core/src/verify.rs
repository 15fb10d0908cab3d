//! Exact finite-order checks of the functional relation, the inversion
//! formula, the harmonic-wise equations and secular freedom.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::algebra::{
    render_poly, substitute, Bindings, EpsilonSeries, GaussianRational, Poly, RenderOptions, Var,
};
use crate::perturbation::NaiveSeries;
use crate::potential::{Potential, Quartet};
use crate::rg::{derive_rg, reflect_time, RGSystem};

/// Where an identity first fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub harmonic: i64,
    pub order: usize,
    pub monomial: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityReport {
    pub name: String,
    pub cap: usize,
    pub counterexample: Option<Counterexample>,
}

impl IdentityReport {
    fn new(name: &str, cap: usize, counterexample: Option<Counterexample>) -> Self {
        IdentityReport { name: name.into(), cap, counterexample }
    }

    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "identity": self.name,
            "cap": self.cap,
            "pass": self.passed(),
            "counterexample": self.counterexample.as_ref().map(|c| json!({
                "harmonic": c.harmonic, "order": c.order, "monomial": c.monomial,
            })),
        })
    }
}

impl fmt::Display for IdentityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.counterexample {
            None => write!(f, "{:<22} K={} PASS", self.name, self.cap),
            Some(c) => write!(
                f,
                "{:<22} K={} FAIL (n={}, eps^{}, {})",
                self.name, self.cap, c.harmonic, c.order, c.monomial
            ),
        }
    }
}

/// First nonzero term of `diff`, tagged with harmonic `n`.
fn first_failure(n: i64, diff: &EpsilonSeries) -> Option<Counterexample> {
    let k = diff.valuation()?;
    let (m, c) = diff.coeff(k).terms().next().expect("nonzero coefficient");
    Some(Counterexample {
        harmonic: n,
        order: k,
        monomial: render_poly(&Poly::term(c.clone(), m.clone()), RenderOptions::default()),
    })
}

/// Like [`first_failure`], reading the harmonic off the power of `E`.
fn first_failure_in_e(diff: &EpsilonSeries) -> Option<Counterexample> {
    let k = diff.valuation()?;
    let (m, c) = diff.coeff(k).terms().next().expect("nonzero coefficient");
    Some(Counterexample {
        harmonic: m.exp(Var::E) as i64,
        order: k,
        monomial: render_poly(&Poly::term(c.clone(), m.without(Var::E)), RenderOptions::default()),
    })
}

fn constant_series(p: Poly, cap: usize) -> EpsilonSeries {
    EpsilonSeries::constant(p, cap)
}

/// `P_n(eps, t, A, B) = P_n(eps, t - s, P_1(eps, s, A, B), P_-1(eps, s, A, B))`
/// for every harmonic, with `s` symbolic, or fixed to `at` when given.
fn functional_relation(y: &NaiveSeries, at: Option<&Poly>) -> Option<Counterexample> {
    let cap = y.cap();
    let s = at.cloned().unwrap_or_else(|| Poly::var(Var::S));
    let at_s = |n: i64| -> EpsilonSeries {
        y.secular_coefficient(n).map(|c| c.substitute_var(Var::T, &s).expect("t occurs with nonnegative powers"))
    };
    let mut b = Bindings::new();
    b.insert(Var::T, constant_series(&Poly::var(Var::T) - &s, cap));
    b.insert(Var::A, at_s(1));
    b.insert(Var::B, at_s(-1));
    let support: Vec<i64> = y.support().into_iter().collect();
    support.par_iter().find_map_first(|&n| {
        let p = y.secular_coefficient(n);
        let shifted = substitute(&p, &b).expect("nonnegative exponents");
        first_failure(n, &(&shifted - &p))
    })
}

pub fn check_functional_relation(y: &NaiveSeries) -> IdentityReport {
    IdentityReport::new("functional_relation", y.cap(), functional_relation(y, None))
}

/// The same relation with `s = 1`.
pub fn check_functional_relation_at_one(y: &NaiveSeries) -> IdentityReport {
    IdentityReport::new("functional_relation@1", y.cap(), functional_relation(y, Some(&Poly::one())))
}

/// `P_{+-1}(eps, t, P_1(eps, -t, A, B), P_-1(eps, -t, A, B)) = (A, B)`.
pub fn check_inversion(y: &NaiveSeries) -> IdentityReport {
    let cap = y.cap();
    let mut b = Bindings::new();
    b.insert(Var::A, y.secular_coefficient(1).map(reflect_time));
    b.insert(Var::B, y.secular_coefficient(-1).map(reflect_time));
    let fail = [(1, Var::A), (-1, Var::B)].into_iter().find_map(|(n, amp)| {
        let back = substitute(&y.secular_coefficient(n), &b).expect("nonnegative exponents");
        first_failure(n, &(&back - &constant_series(Poly::var(amp), cap)))
    });
    IdentityReport::new("inversion", cap, fail)
}

/// `D = d/dt + i E d/dE`, the time derivative of `p(t) E^n`.
fn d_time(p: &Poly) -> Poly {
    let mut out = p.derivative(Var::T);
    for (m, c) in p.terms() {
        let n = m.exp(Var::E);
        if n != 0 {
            out.add_term(m.clone(), &(&GaussianRational::i() * &(c * &GaussianRational::from_int(n as i64))));
        }
    }
    out
}

/// `D^2 Y + Y - eps V(eps, E, Y, D Y) = 0`, recomputed through plain series
/// arithmetic with `E = e^{it}` as a ring variable.
pub fn check_residual(y: &NaiveSeries) -> IdentityReport {
    let cap = y.cap();
    let full = y.series().to_series();
    let dy = full.map(d_time);
    let ddy = dy.map(d_time);
    let v = EpsilonSeries::from_poly_in_eps(&y.potential().to_poly(), cap).expect("potential has no negative eps powers");
    let mut b = Bindings::new();
    b.insert(Var::Y, full.clone());
    b.insert(Var::Yp, dy);
    let source = substitute(&v, &b).expect("y, y' occur with nonnegative powers").shift_up(1);
    let residual = &(&ddy + &full) - &source;
    IdentityReport::new("residual", cap, first_failure_in_e(&residual))
}

/// Every stored `P_n(eps, 0, Ar, Br)` and both right-hand sides are free of `t`.
pub fn check_secular_free(rg: &RGSystem) -> IdentityReport {
    let mut fail = rg.expansion().iter().find_map(|(&n, s)| {
        (0..=s.cap()).find_map(|k| {
            s.coeff(k).terms().find(|(m, _)| m.exp(Var::T) != 0).map(|(m, c)| Counterexample {
                harmonic: n,
                order: k,
                monomial: render_poly(&Poly::term(c.clone(), m.clone()), RenderOptions::default()),
            })
        })
    });
    for (n, rhs) in [(1, rg.rhs_a()), (-1, rg.rhs_b())] {
        if fail.is_none() && rhs.contains_var(Var::T) {
            fail = Some(Counterexample { harmonic: n, order: 0, monomial: "t in RG rhs".into() });
        }
    }
    IdentityReport::new("secular_free", rg.cap(), fail)
}

/// `f_{-n,k} = conj(f_{n,k})` with `A <-> B`, for real potentials.
pub fn check_conjugation(y: &NaiveSeries) -> IdentityReport {
    let fail = y.support().into_iter().find_map(|n| {
        let p = y.secular_coefficient(n);
        let mirror = y.secular_coefficient(-n).map(|c| c.conj().swap(Var::A, Var::B));
        first_failure(n, &(&p - &mirror))
    });
    IdentityReport::new("conjugation", y.cap(), fail)
}

/// Leading order `d_n >= (|n| - 1)/M` for every harmonic present.
pub fn check_support_growth(y: &NaiveSeries) -> IdentityReport {
    let m = y.potential().support_rate();
    let fail = y.support().into_iter().find_map(|n| {
        let d = y.leading_order(n)? as i64;
        (d * m < n.abs() - 1).then(|| Counterexample { harmonic: n, order: d as usize, monomial: format!("M={m}") })
    });
    IdentityReport::new("support_growth", y.cap(), fail)
}

/// `sum_n P_n(eps, 0, Ar, Br) E^n` with `Ar, Br -> P_{+-1}(eps, t, A, B)`
/// reproduces `Y` (with `t` outside the harmonics carried by `E`).
pub fn check_round_trip(y: &NaiveSeries, rg: &RGSystem) -> IdentityReport {
    let mut b = Bindings::new();
    b.insert(Var::Ar, y.secular_coefficient(1));
    b.insert(Var::Br, y.secular_coefficient(-1));
    let back = substitute(&rg.expansion_series(), &b).expect("nonnegative exponents");
    let fail = first_failure_in_e(&(&back - &y.series().to_series()));
    IdentityReport::new("round_trip", y.cap(), fail)
}

/// The four core identities (functional relation in both forms) and, for
/// real potentials, conjugation symmetry; support growth and the
/// renormalized round-trip run always.
pub fn run_suite(y: &NaiveSeries) -> Vec<IdentityReport> {
    let rg = derive_rg(y);
    let checks: Vec<Box<dyn Fn() -> Option<IdentityReport> + Sync>> = vec![
        Box::new(|| Some(check_functional_relation(y))),
        Box::new(|| Some(check_functional_relation_at_one(y))),
        Box::new(|| Some(check_inversion(y))),
        Box::new(|| Some(check_residual(y))),
        Box::new(|| Some(check_secular_free(&rg))),
        Box::new(|| y.potential().is_real().then(|| check_conjugation(y))),
        Box::new(|| Some(check_support_growth(y))),
        Box::new(|| Some(check_round_trip(y, &rg))),
    ];
    checks.par_iter().filter_map(|c| c()).collect()
}

/// A random in-class potential: at most three quartets with `|k| <= 2`,
/// `l + m <= 2`, `n <= 1`, coefficients in `{+-1, +-i, +-1/2}`.
pub fn random_potential(seed: u64) -> Potential {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = [
        GaussianRational::one(),
        -&GaussianRational::one(),
        GaussianRational::i(),
        -&GaussianRational::i(),
        GaussianRational::ratio(1, 2),
        GaussianRational::ratio(-1, 2),
    ];
    loop {
        let count = rng.gen_range(1..=3);
        let mut table = std::collections::BTreeMap::new();
        for _ in 0..count {
            let l = rng.gen_range(0..=2u32);
            let m = rng.gen_range(0..=2 - l);
            let q = Quartet::new(rng.gen_range(-2..=2), l, m, rng.gen_range(0..=1));
            table.insert(q, Poly::constant(coeffs.choose(&mut rng).expect("nonempty").clone()));
        }
        if let Ok(v) = Potential::from_table(table, vec![]) {
            return v;
        }
    }
}

/// Seeds `base, base + 1, ...` and their potentials.
pub fn random_potentials(base: u64, count: usize) -> Vec<(u64, Potential)> {
    (0..count as u64).map(|i| (base + i, random_potential(base + i))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perturbation::expand;

    fn vdp(k: usize) -> NaiveSeries {
        expand(&Potential::parse("(1 - y^2)*y'", &[]).unwrap(), k).unwrap()
    }

    #[test]
    fn van_der_pol_identities() {
        let reports = run_suite(&vdp(3));
        assert_eq!(reports.len(), 8);
        for r in reports {
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn trivial_cap() {
        let y = vdp(0);
        for r in run_suite(&y) {
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn mathieu_inversion_symbolic() {
        let y = expand(&crate::mathieu::mathieu_potential(3).unwrap(), 3).unwrap();
        assert!(check_inversion(&y).passed());
    }

    #[test]
    fn broken_series_is_caught() {
        use crate::potential::HarmonicSeries;
        let y = vdp(2);
        let mut orders = y.series().orders().to_vec();
        let bump = &orders[1][&3] + &Poly::var(Var::A);
        orders[1].insert(3, bump);
        let broken = crate::perturbation::NaiveSeries::from_parts(y.potential().clone(), HarmonicSeries::from_orders(orders));
        let r = check_residual(&broken);
        let c = r.counterexample.expect("must fail");
        assert_eq!((c.harmonic, c.order), (3, 1));
        assert!(!check_functional_relation(&broken).passed());
    }

    #[test]
    fn random_potentials_are_reproducible() {
        let a = random_potentials(7, 5);
        let b = random_potentials(7, 5);
        assert_eq!(a, b);
        for (_, v) in a {
            assert!(v.table().len() <= 3);
        }
    }
}
