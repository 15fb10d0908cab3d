//! Renormalized expansion, amplitude (RG) equation, polar form and limit
//! cycles.

mod polar;
mod trig;

use std::collections::BTreeMap;

use serde_json::{json, Value};
use thiserror::Error;

use crate::algebra::{series_to_json, AlgebraError, EpsilonSeries, Monomial, Poly, Var};
use crate::perturbation::NaiveSeries;

pub use polar::{limit_cycle, to_polar, LimitCycle, PolarRG};
pub use trig::{render_trig_poly, render_trig_series};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RgError {
    #[error("Q_{n} is not divisible by its amplitude; Z is not polynomial")]
    NotDivisible { n: i64 },
    #[error("polar form leaves a negative power of R")]
    NotPolarizable,
    #[error("d log R/dt depends on theta; no theta-free limit cycle equation")]
    ThetaDependent,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// `A -> Ar`, `B -> Br`.
pub(crate) fn renormalize(p: &Poly) -> Poly {
    p.rename(Var::A, Var::Ar).rename(Var::B, Var::Br)
}

/// `t -> -t`.
pub(crate) fn reflect_time(p: &Poly) -> Poly {
    let mut out = Poly::zero();
    for (m, c) in p.terms() {
        if m.exp(Var::T) % 2 == 0 {
            out.add_term(m.clone(), c);
        } else {
            out.add_term(m.clone(), &-c);
        }
    }
    out
}

/// Right-hand sides of `d(Ar, Br)/dt` plus the secular-free expansion
/// coefficients `P_n(eps, 0, Ar, Br)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RGSystem {
    rhs_a: EpsilonSeries,
    rhs_b: EpsilonSeries,
    expansion: BTreeMap<i64, EpsilonSeries>,
}

/// `d/dt (Ar, Br) = eps dQ_{+-1}/dt (eps, 0, Ar, Br)`: the `t^1` coefficients
/// of `f_{+-1,k}`.
pub fn derive_rg(y: &NaiveSeries) -> RGSystem {
    let cap = y.cap();
    let rhs = |n: i64| {
        let mut coeffs = vec![Poly::zero()];
        for k in 1..=cap {
            let linear = y.f(n, k).coefficients_in(Var::T).remove(&1).unwrap_or_default();
            coeffs.push(renormalize(&linear));
        }
        EpsilonSeries::from_coeffs(coeffs)
    };
    let expansion = y
        .support()
        .into_iter()
        .map(|n| (n, y.secular_coefficient(n).map(|c| renormalize(&c.at_zero(Var::T)))))
        .collect();
    RGSystem { rhs_a: rhs(1), rhs_b: rhs(-1), expansion }
}

impl RGSystem {
    pub fn cap(&self) -> usize {
        self.rhs_a.cap()
    }

    pub fn rhs_a(&self) -> &EpsilonSeries {
        &self.rhs_a
    }

    pub fn rhs_b(&self) -> &EpsilonSeries {
        &self.rhs_b
    }

    pub fn expansion(&self) -> &BTreeMap<i64, EpsilonSeries> {
        &self.expansion
    }

    /// `P_n(eps, 0, Ar, Br)`, zero when `n` is outside the support.
    pub fn expansion_coefficient(&self, n: i64) -> EpsilonSeries {
        self.expansion.get(&n).cloned().unwrap_or_else(|| EpsilonSeries::zero(self.cap()))
    }

    /// Both right-hand sides truncated at `eps^j`.
    pub fn truncated(&self, j: usize) -> RGSystem {
        let j = j.min(self.cap());
        RGSystem {
            rhs_a: self.rhs_a.truncate(j),
            rhs_b: self.rhs_b.truncate(j),
            expansion: self.expansion.iter().map(|(n, s)| (*n, s.truncate(j))).collect(),
        }
    }

    /// The whole expansion `sum_n P_n(eps,0,Ar,Br) E^n` as one series.
    pub fn expansion_series(&self) -> EpsilonSeries {
        let mut out = EpsilonSeries::zero(self.cap());
        for (&n, s) in &self.expansion {
            let e = Monomial::var(Var::E, n as i32);
            out = &out + &s.map(|c| c.mul_monomial(&e));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "cap": self.cap(),
            "rhs_Ar": series_to_json(&self.rhs_a),
            "rhs_Br": series_to_json(&self.rhs_b),
            "expansion": self.expansion.iter().map(|(n, s)| (n.to_string(), series_to_json(s))).collect::<serde_json::Map<_, _>>(),
        })
    }
}

/// `Z_a = 1 + eps Q_1(eps, -t, Ar, Br)/Ar` and `Z_b` likewise, cap `K`.
pub fn renormalization_constants(y: &NaiveSeries) -> Result<(EpsilonSeries, EpsilonSeries), RgError> {
    let z = |n: i64, amp: Var| -> Result<EpsilonSeries, RgError> {
        let mut coeffs = vec![Poly::one()];
        for k in 1..=y.cap() {
            let f = renormalize(&reflect_time(&y.f(n, k)));
            if f.terms().any(|(m, _)| m.exp(amp) < 1) {
                return Err(RgError::NotDivisible { n });
            }
            coeffs.push(f.mul_monomial(&Monomial::var(amp, -1)));
        }
        Ok(EpsilonSeries::from_coeffs(coeffs))
    };
    Ok((z(1, Var::Ar)?, z(-1, Var::Br)?))
}
