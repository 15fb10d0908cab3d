//! Naive perturbation series `Y(eps, t, A, B)` built order by order.

use std::collections::BTreeSet;

use serde_json::{json, Value};
use thiserror::Error;

use crate::algebra::{render_poly, series_to_json, EpsilonSeries, GaussianRational, Poly, RenderOptions, Var};
use crate::potential::{HarmonicSeries, Harmonics, Potential, PowerCache};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PerturbationError {
    #[error("harmonic {harmonic} at order eps^{order} exceeds the support bound {bound}")]
    SupportExceeded { order: usize, harmonic: i64, bound: i64 },
}

/// Polynomial `p(t)` with `p'' + 2 i n p' + (1 - n^2) p = q`.
///
/// Off resonance `p` has the degree of `q`. For `n = +-1` the degree goes up
/// by one and the constant term (the homogeneous freedom) is zero.
/// Coefficients of `q` may involve any variables other than `t`.
pub fn particular_solution(n: i64, q: &Poly) -> Poly {
    let qc = q.coefficients_in(Var::T);
    let Some(&d) = qc.keys().next_back() else {
        return Poly::zero();
    };
    assert!(*qc.keys().next().unwrap() >= 0, "source has negative powers of t");
    let d = d as usize;
    let qj = |j: usize| qc.get(&(j as i32)).cloned().unwrap_or_default();
    let int = |x: i64| GaussianRational::from_int(x);
    let two_in = &GaussianRational::i() * &int(2 * n);
    let mut p = vec![Poly::zero(); d + 3];
    if n.abs() != 1 {
        let inv = int(1 - n * n).inv().expect("1 - n^2 != 0 off resonance");
        for j in (0..=d).rev() {
            let jj = j as i64;
            let rhs = &(&qj(j) - &p[j + 2].scale(&int((jj + 2) * (jj + 1)))) - &p[j + 1].scale(&(&two_in * &int(jj + 1)));
            p[j] = rhs.scale(&inv);
        }
    } else {
        for j in (0..=d).rev() {
            let jj = j as i64;
            let rhs = &qj(j) - &p[j + 2].scale(&int((jj + 2) * (jj + 1)));
            let div = (&two_in * &int(jj + 1)).inv().expect("nonzero");
            p[j + 1] = rhs.scale(&div);
        }
    }
    let coeffs = p.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(j, c)| (j as i32, c)).collect();
    Poly::from_coefficients_in(Var::T, &coeffs)
}

/// How the homogeneous constants of `f_{+-1,k}` are fixed.
#[derive(Clone, Debug, Default)]
pub enum Normalization {
    /// `f_{+-1,k}(0) = 0` for `k >= 1`.
    #[default]
    AtZero,
    /// `f_{+-1,k}(at) = values[k]` (`[f_1, f_{-1}]`); `at` must be free of `t`.
    Match { at: Poly, values: Vec<[Poly; 2]> },
}

#[derive(Clone, Debug, Default)]
pub struct ExpandOptions {
    /// Largest allowed `|n|`; defaults to `1 + K M`.
    pub support_bound: Option<i64>,
    pub normalization: Normalization,
}

/// The table `f_{n,k}(t)` of the naive solution together with its potential.
#[derive(Clone, Debug, PartialEq)]
pub struct NaiveSeries {
    potential: Potential,
    series: HarmonicSeries,
}

pub fn expand(v: &Potential, cap: usize) -> Result<NaiveSeries, PerturbationError> {
    expand_with(v, cap, &ExpandOptions::default())
}

pub fn expand_with(v: &Potential, cap: usize, opts: &ExpandOptions) -> Result<NaiveSeries, PerturbationError> {
    let bound = opts.support_bound.unwrap_or(1 + cap as i64 * v.support_rate());
    let y0 = Harmonics::from([(1, Poly::var(Var::A)), (-1, Poly::var(Var::B))]);
    let mut orders = vec![y0.clone()];
    let mut cache = PowerCache::new(v);
    cache.push(y0);
    for k in 1..=cap {
        let source = cache.coefficient(k - 1);
        let harmonics: BTreeSet<i64> = source.keys().copied().chain([-1, 1]).collect();
        let mut yk = Harmonics::new();
        for n in harmonics {
            if n.abs() > bound {
                return Err(PerturbationError::SupportExceeded { order: k, harmonic: n, bound });
            }
            let mut p = source.get(&n).map(|q| particular_solution(n, q)).unwrap_or_default();
            if let (Normalization::Match { at, values }, 1) = (&opts.normalization, n.abs()) {
                let target = &values[k][if n == 1 { 0 } else { 1 }];
                let here = p.substitute_var(Var::T, at).expect("t occurs with nonnegative powers");
                p = &p + &(target - &here);
            }
            if !p.is_zero() {
                yk.insert(n, p);
            }
        }
        if k < cap {
            cache.push(yk.clone());
        }
        orders.push(yk);
    }
    Ok(NaiveSeries { potential: v.clone(), series: HarmonicSeries::from_orders(orders) })
}

impl NaiveSeries {
    /// Reassemble from a harmonic table; no consistency check.
    pub fn from_parts(potential: Potential, series: HarmonicSeries) -> Self {
        NaiveSeries { potential, series }
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn cap(&self) -> usize {
        self.series.cap()
    }

    pub fn series(&self) -> &HarmonicSeries {
        &self.series
    }

    /// `f_{n,k}(t)`.
    pub fn f(&self, n: i64, k: usize) -> Poly {
        self.series.get(n, k)
    }

    pub fn support(&self) -> BTreeSet<i64> {
        self.series.support()
    }

    /// `P_n(eps, t, A, B)` through `eps^K`.
    pub fn secular_coefficient(&self, n: i64) -> EpsilonSeries {
        self.series.coefficient(n)
    }

    /// `(Q_1, Q_{-1})` with `P_{+-1} = (A, B) + eps Q_{+-1}`; cap `K - 1`
    /// (a zero series at cap 0 when `K = 0`).
    pub fn q_split(&self) -> (EpsilonSeries, EpsilonSeries) {
        let cap = self.cap();
        let q = |n: i64| {
            if cap == 0 {
                EpsilonSeries::zero(0)
            } else {
                EpsilonSeries::from_coeffs((1..=cap).map(|k| self.f(n, k)).collect())
            }
        };
        (q(1), q(-1))
    }

    /// Least `k` with `f_{n,k} != 0`.
    pub fn leading_order(&self, n: i64) -> Option<usize> {
        (0..=self.cap()).find(|&k| !self.f(n, k).is_zero())
    }

    /// Default table columns: `n >= 1` for conjugation-symmetric potentials
    /// (the rest follows by symmetry), otherwise every harmonic present.
    pub fn table_columns(&self) -> Vec<i64> {
        let all = self.support();
        if self.potential.is_real() {
            all.into_iter().filter(|&n| n >= 1).collect()
        } else {
            all.into_iter().collect()
        }
    }

    /// Rows are eps-orders, columns harmonics; `C = AB` alias applied.
    pub fn to_table(&self, columns: &[i64]) -> String {
        let opts = RenderOptions { alias_c: true };
        let mut rows = vec![std::iter::once("".to_string())
            .chain(columns.iter().map(|n| format!("e^({n}it)")))
            .collect::<Vec<_>>()];
        for k in 0..=self.cap() {
            let mut row = vec![format!("y{k}")];
            row.extend(columns.iter().map(|&n| render_poly(&self.f(n, k), opts)));
            rows.push(row);
        }
        rows.iter().map(|r| r.join(" | ")).collect::<Vec<_>>().join("\n") + "\n"
    }

    /// `{"cap", "harmonics": {n: series-json of P_n}}`.
    pub fn to_json(&self) -> Value {
        let harmonics: serde_json::Map<String, Value> =
            self.support().into_iter().map(|n| (n.to_string(), series_to_json(&self.secular_coefficient(n)))).collect();
        json!({ "cap": self.cap(), "potential": self.potential.to_json(), "harmonics": harmonics })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_expr;

    fn p(s: &str) -> Poly {
        parse_expr(s).unwrap().0
    }

    #[test]
    fn off_resonance_constant() {
        assert_eq!(particular_solution(3, &p("1")), p("-1/8"));
    }

    #[test]
    fn resonant_constant() {
        assert_eq!(particular_solution(1, &p("c")), p("-i/2*c*t"));
    }

    #[test]
    fn van_der_pol_first_resonant_order() {
        assert_eq!(particular_solution(1, &p("i*A - i*A^2*B")), p("A*t/2*(1 - A*B)"));
    }

    #[test]
    fn solves_the_ode_for_polynomial_sources() {
        for n in [-3, -1, 0, 1, 2] {
            let q = p("A + 3*t*B - i*t^3");
            let s = particular_solution(n, &q);
            let nn = GaussianRational::from_int(n);
            let lhs = &(&s.derivative(Var::T).derivative(Var::T)
                + &s.derivative(Var::T).scale(&(&(&GaussianRational::i() * &nn) * &GaussianRational::from_int(2))))
                + &s.scale(&(&GaussianRational::one() - &(&nn * &nn)));
            assert_eq!(lhs, q, "n = {n}");
            if n.abs() == 1 {
                assert!(s.at_zero(Var::T).is_zero());
            }
        }
    }

    #[test]
    fn van_der_pol_table_entries() {
        let v = Potential::parse("(1 - y^2)*y'", &[]).unwrap();
        let y = expand(&v, 3).unwrap();
        assert_eq!(y.f(1, 1), p("A*t/2*(1 - A*B)"));
        assert_eq!(y.f(3, 1), p("i*A^3/8"));
        assert_eq!(y.f(5, 2), p("-5*A^5/192"));
        assert_eq!(y.f(7, 3), p("-7*i*A^7/1152"));
        for k in 1..=3 {
            assert!(y.f(1, k).at_zero(Var::T).is_zero());
            assert!(y.f(-1, k).at_zero(Var::T).is_zero());
        }
    }

    #[test]
    fn pure_driving_is_linear_superposition() {
        let v = Potential::from_table_unchecked(
            [(crate::potential::Quartet::new(2, 0, 0, 0), p("1"))].into(),
            vec![],
        );
        let y = expand(&v, 2).unwrap();
        // y'' + y = eps e^{2it}: f_{2,1} = -1/3, nothing else.
        assert_eq!(y.f(2, 1), p("-1/3"));
        assert_eq!(y.support(), BTreeSet::from([-1, 1, 2]));
        let (q1, qm1) = y.q_split();
        assert!(q1.is_zero() && qm1.is_zero());
    }

    #[test]
    fn support_guard() {
        let v = Potential::parse("y^3*E(2)", &[]).unwrap();
        let opts = ExpandOptions { support_bound: Some(3), ..Default::default() };
        assert!(matches!(expand_with(&v, 2, &opts), Err(PerturbationError::SupportExceeded { .. })));
    }
}
