//! Polar variables `Ar = R e^{i theta}`, `Br = R e^{-i theta}` and the limit
//! cycle of `d log R/dt = 0`.

use serde_json::{json, Value};

use super::{RGSystem, RgError};
use crate::algebra::{
    rational_sqrt, roots_of, series_solve_root, series_to_json, substitute, AlgebraError, Bindings, EpsilonSeries,
    GaussianRational, Monomial, Poly, Var,
};

/// `Ar^a Br^b -> R^{a+b} ph^{a-b}` with `ph = e^{i theta}`.
fn polar_poly(p: &Poly) -> Poly {
    p.map_monomials(|m| {
        let (a, b) = (m.exp(Var::Ar), m.exp(Var::Br));
        Some(
            m.without(Var::Ar)
                .without(Var::Br)
                .mul(&Monomial::from_pairs([(Var::R, a + b), (Var::Phase, a - b)])),
        )
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolarRG {
    dlog_r: EpsilonSeries,
    dtheta: EpsilonSeries,
    expansion: EpsilonSeries,
}

impl PolarRG {
    pub fn cap(&self) -> usize {
        self.dlog_r.cap()
    }

    /// `d log R/dt`, a series in `R` and `ph`.
    pub fn dlog_r(&self) -> &EpsilonSeries {
        &self.dlog_r
    }

    pub fn dtheta(&self) -> &EpsilonSeries {
        &self.dtheta
    }

    /// `sum_n P_n(eps, 0, R ph, R/ph) E^n`.
    pub fn expansion(&self) -> &EpsilonSeries {
        &self.expansion
    }

    /// Whether both right-hand sides are free of the phase.
    pub fn is_theta_free(&self) -> bool {
        !self.dlog_r.contains_var(Var::Phase) && !self.dtheta.contains_var(Var::Phase)
    }

    /// Whether every coefficient of both right-hand sides is real.
    pub fn has_real_coefficients(&self) -> bool {
        [&self.dlog_r, &self.dtheta].iter().all(|s| s.coeffs().iter().all(Poly::is_real))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "cap": self.cap(),
            "dlogR_dt": series_to_json(&self.dlog_r),
            "dtheta_dt": series_to_json(&self.dtheta),
            "expansion": series_to_json(&self.expansion),
        })
    }
}

/// `d log R/dt = (rhs_A/ph + rhs_B ph)/(2R)`,
/// `d theta/dt = (rhs_A/ph - rhs_B ph)/(2iR)`.
pub fn to_polar(rg: &RGSystem) -> Result<PolarRG, RgError> {
    let a = rg.rhs_a().map(|c| polar_poly(c).mul_monomial(&Monomial::from_pairs([(Var::Phase, -1), (Var::R, -1)])));
    let b = rg.rhs_b().map(|c| polar_poly(c).mul_monomial(&Monomial::from_pairs([(Var::Phase, 1), (Var::R, -1)])));
    let half = Poly::constant(GaussianRational::ratio(1, 2));
    let minus_half_i = Poly::constant(&GaussianRational::i() * &GaussianRational::ratio(-1, 2));
    let dlog_r = (&a + &b).scale(&half);
    let dtheta = (&a - &b).scale(&minus_half_i);
    for s in [&dlog_r, &dtheta] {
        if s.coeffs().iter().any(|c| c.min_degree_in(Var::R) < 0) {
            return Err(RgError::NotPolarizable);
        }
    }
    let expansion = rg.expansion_series().map(polar_poly);
    Ok(PolarRG { dlog_r, dtheta, expansion })
}

/// Radius and angular drift on the limit cycle.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitCycle {
    /// `R_c(eps)`.
    pub radius: EpsilonSeries,
    /// `(d theta/dt)` evaluated at `R = R_c`.
    pub phase_rate: EpsilonSeries,
}

/// Solve `d log R/dt = 0` for the smallest positive simple root, working in
/// `u = R^2` when the series is even in `R`.
pub fn limit_cycle(p: &PolarRG) -> Result<LimitCycle, RgError> {
    if !p.is_theta_free() {
        return Err(RgError::ThetaDependent);
    }
    let g = p.dlog_r();
    let even = g.coeffs().iter().all(|c| c.terms().all(|(m, _)| m.exp(Var::R) % 2 == 0));
    let step = if even { 2 } else { 1 };
    let in_u = g.map(|c| {
        c.map_monomials(|m| Some(m.without(Var::R).mul(&Monomial::var(Var::U, m.exp(Var::R) / step))))
    });
    let Some(m) = in_u.valuation() else {
        return Err(AlgebraError::DegenerateRoot("d log R/dt vanishes identically".into()).into());
    };
    let lead = in_u.coeff(m);
    if !lead.contains_var(Var::U) {
        return Err(AlgebraError::DegenerateRoot(format!(
            "leading coefficient {lead} of d log R/dt does not depend on R"
        ))
        .into());
    }
    let roots = roots_of(lead, Var::U)?;
    let Some((u0, mult)) = roots.into_iter().find(|(r, _)| r > &num_traits::Zero::zero()) else {
        return Err(AlgebraError::NonRationalRoot(format!("{lead} has no positive rational root")).into());
    };
    if mult > 1 {
        return Err(AlgebraError::DegenerateRoot(format!("{lead} has a multiple root at {u0}")).into());
    }
    let u = series_solve_root(&in_u, Var::U, &GaussianRational::real(u0.clone()))?;
    let radius = if even {
        let r0 = rational_sqrt(&u0).ok_or_else(|| AlgebraError::NonRationalRoot(format!("sqrt({u0})")))?;
        let mut coeffs: Vec<Poly> = u.coeffs().iter().map(|c| -c).collect();
        coeffs[0] = &coeffs[0] + &Poly::var(Var::R).pow(2);
        series_solve_root(&EpsilonSeries::from_coeffs(coeffs), Var::R, &GaussianRational::real(r0))?
    } else {
        u.rename(Var::U, Var::R)
    };
    let mut b = Bindings::new();
    b.insert(Var::R, radius.clone());
    let phase_rate = substitute(p.dtheta(), &b)?;
    Ok(LimitCycle { radius, phase_rate })
}
