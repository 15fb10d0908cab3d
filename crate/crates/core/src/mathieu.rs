//! Mathieu equation `y'' + y + eps (g + 2 cos t) y = 0` near `a = 1`:
//! the linear RG matrix, `omega^2`, the boundary branches `a^{+-}` and the
//! Hill-determinant cross-check.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::{roots_of, AlgebraError, EpsilonSeries, GaussianRational, Poly, Var};
use crate::perturbation::{expand, NaiveSeries, PerturbationError};
use crate::potential::{Potential, PotentialError};
use crate::rg::derive_rg;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MathieuError {
    #[error("RG right-hand side is not linear in Ar, Br")]
    NotLinear,
    #[error("M^2 is not a scalar matrix")]
    NotScalar,
    #[error("no rational root: {0}")]
    NonRationalRoot(String),
    #[error("underdetermined: {0}")]
    Underdetermined(String),
    #[error("no sign change of the {branch} determinant on [{lo}, {hi}] at eps = {eps}")]
    RootNotBracketed { eps: f64, branch: Sign, lo: f64, hi: f64 },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Perturbation(#[from] PerturbationError),
}

/// Which boundary / determinant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Minus,
    Plus,
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Minus => "-",
            Sign::Plus => "+",
        })
    }
}

/// Names `g1..gJ`.
pub fn detuning_params(j: usize) -> Vec<String> {
    (1..=j).map(|i| format!("g{i}")).collect()
}

/// The Mathieu potential with `g = g1 + g2 eps + ... + gJ eps^{J-1}`.
pub fn mathieu_potential(j: usize) -> Result<Potential, MathieuError> {
    let base = Potential::parse("(g + 2*cos(1t))*(-y)", &["g"])?;
    let names = detuning_params(j);
    let mut g = Poly::zero();
    for (i, name) in names.iter().enumerate() {
        g = &g + &(&Poly::var(Var::param(name)) * &Poly::var(Var::Eps).pow(i as u32));
    }
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    Ok(base.substitute_param("g", &g, &refs)?)
}

/// `M` with `d/dt (Ar, Br) = M (Ar, Br)`, read off a linear RG system.
pub fn linear_matrix(y: &NaiveSeries) -> Result<[[EpsilonSeries; 2]; 2], MathieuError> {
    let rg = derive_rg(y);
    let cap = rg.cap();
    let mut m: [[Vec<Poly>; 2]; 2] = Default::default();
    for (row, rhs) in [rg.rhs_a(), rg.rhs_b()].into_iter().enumerate() {
        m[row] = [vec![Poly::zero(); cap + 1], vec![Poly::zero(); cap + 1]];
        for (k, c) in rhs.coeffs().iter().enumerate() {
            for (mono, x) in c.terms() {
                let (a, b) = (mono.exp(Var::Ar), mono.exp(Var::Br));
                let col = match (a, b) {
                    (1, 0) => 0,
                    (0, 1) => 1,
                    _ => return Err(MathieuError::NotLinear),
                };
                let amp = if col == 0 { Var::Ar } else { Var::Br };
                m[row][col][k].add_term(mono.without(amp), x);
            }
        }
    }
    Ok(m.map(|r| r.map(EpsilonSeries::from_coeffs)))
}

/// `omega^2 = -(M^2)_{11}` after checking that `M^2` is scalar.
pub fn omega_squared(y: &NaiveSeries) -> Result<EpsilonSeries, MathieuError> {
    let m = linear_matrix(y)?;
    let sq = |i: usize, j: usize| &(&m[i][0] * &m[0][j]) + &(&m[i][1] * &m[1][j]);
    let (m11, m12, m21, m22) = (sq(0, 0), sq(0, 1), sq(1, 0), sq(1, 1));
    if !m12.is_zero() || !m21.is_zero() || m11 != m22 {
        return Err(MathieuError::NotScalar);
    }
    Ok(-&m11)
}

/// One boundary curve `a = 1 + eps g`.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub label: String,
    /// Solved `g1, g2, ...` (contiguous from `g1`).
    pub g_values: Vec<BigRational>,
    /// `a(eps)` through `eps^{g_values.len()}`.
    pub a: EpsilonSeries,
}

impl Branch {
    pub fn eval(&self, eps: f64) -> f64 {
        self.a
            .coeffs()
            .iter()
            .enumerate()
            .map(|(k, c)| c.as_constant().expect("numeric series").re().to_f64().unwrap() * eps.powi(k as i32))
            .sum()
    }
}

/// Solve `omega^2 = 0` order by order for `unknowns` (in order `g1, g2,
/// ...`). Each nonzero order must be a univariate polynomial in the lowest
/// undetermined unknown; distinct rational roots fork branches.
pub fn stability_boundaries(omega2: &EpsilonSeries, unknowns: &[Var]) -> Result<Vec<Branch>, MathieuError> {
    let index: BTreeMap<Var, usize> = unknowns.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let mut partials: Vec<Vec<Option<BigRational>>> = vec![vec![None; unknowns.len()]];
    for k in 0..=omega2.cap() {
        let mut next = Vec::new();
        for values in partials {
            let mut c = omega2.coeff(k).clone();
            for (i, v) in values.iter().enumerate() {
                if let Some(r) = v {
                    c = c.eval_var(unknowns[i], &GaussianRational::real(r.clone()));
                }
            }
            if c.is_zero() {
                next.push(values);
                continue;
            }
            let free: Vec<usize> = c.variables().iter().filter_map(|v| index.get(v).copied()).collect();
            let Some(&j) = free.iter().min() else {
                return Err(MathieuError::Underdetermined(format!(
                    "order eps^{k} reduces to the nonzero {c} with no unknown left"
                )));
            };
            if free.len() > 1 || c.variables().len() > 1 {
                return Err(MathieuError::Underdetermined(format!("order eps^{k}: {c} involves several unknowns")));
            }
            let roots = roots_of(&c, unknowns[j])?;
            if roots.is_empty() {
                return Err(MathieuError::NonRationalRoot(format!("order eps^{k}: {c} = 0")));
            }
            for (r, _) in roots {
                let mut v = values.clone();
                v[j] = Some(r);
                next.push(v);
            }
        }
        partials = next;
    }
    let mut branches: Vec<Branch> = partials
        .into_iter()
        .map(|values| {
            let g_values: Vec<BigRational> = values.into_iter().map_while(|v| v).collect();
            let mut coeffs = vec![Poly::one()];
            coeffs.extend(g_values.iter().map(|g| Poly::constant(GaussianRational::real(g.clone()))));
            Branch { label: String::new(), g_values, a: EpsilonSeries::from_coeffs(coeffs) }
        })
        .collect();
    branches.sort_by(|x, y| x.g_values.cmp(&y.g_values));
    if branches.len() == 2 {
        branches[0].label = "-".into();
        branches[1].label = "+".into();
    } else {
        for (i, b) in branches.iter_mut().enumerate() {
            b.label = (i + 1).to_string();
        }
    }
    Ok(branches)
}

/// Result of the symbolic Mathieu analysis at cap `K`.
#[derive(Clone, Debug, PartialEq)]
pub struct MathieuAnalysis {
    pub cap: usize,
    pub params: Vec<String>,
    pub matrix: [[EpsilonSeries; 2]; 2],
    pub omega2: EpsilonSeries,
    pub branches: Vec<Branch>,
}

impl MathieuAnalysis {
    pub fn branch(&self, label: &str) -> Option<&Branch> {
        self.branches.iter().find(|b| b.label == label)
    }
}

/// Expand with `J = max(K - 1, 1)` detuning unknowns and solve for the
/// boundaries.
pub fn analyze(cap: usize) -> Result<MathieuAnalysis, MathieuError> {
    let j = cap.saturating_sub(1).max(1);
    let v = mathieu_potential(j)?;
    let y = expand(&v, cap)?;
    let matrix = linear_matrix(&y)?;
    let omega2 = omega_squared(&y)?;
    let params = detuning_params(j);
    let unknowns: Vec<Var> = params.iter().map(|p| Var::param(p)).collect();
    let branches = stability_boundaries(&omega2, &unknowns)?;
    Ok(MathieuAnalysis { cap, params, matrix, omega2, branches })
}

/// `N x N` truncation of the Hill determinant, by the three-term recurrence.
///
/// `Minus`: diagonal `a - j^2`, `j = 1..N`. `Plus`: `a/2`, then `a - j^2`,
/// `j = 1..N-1`. Off-diagonals are `eps`.
pub fn hill_determinant(eps: f64, a: f64, n: usize, branch: Sign) -> f64 {
    let diag = |j: usize| -> f64 {
        match branch {
            Sign::Minus => a - (j * j) as f64,
            Sign::Plus if j == 1 => a / 2.0,
            Sign::Plus => a - ((j - 1) * (j - 1)) as f64,
        }
    };
    let (mut prev, mut cur) = (1.0, diag(1));
    for j in 2..=n {
        (prev, cur) = (cur, diag(j) * cur - eps * eps * prev);
    }
    cur
}

/// Root of the truncated determinant on `[lo, hi]` by bisection.
pub fn find_boundary(eps: f64, n: usize, branch: Sign, lo: f64, hi: f64) -> Result<f64, MathieuError> {
    let f = |a: f64| hill_determinant(eps, a, n, branch);
    let (mut lo, mut hi) = (lo, hi);
    let (mut flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(MathieuError::RootNotBracketed { eps, branch, lo, hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CrossCheckRow {
    pub eps: f64,
    pub branch: Sign,
    pub a_series: f64,
    pub a_determinant: f64,
    pub deviation: f64,
}

/// Compare each labelled branch with the determinant root near `a = 1`.
pub fn boundary_crosscheck(branches: &[Branch], eps_list: &[f64], n: usize) -> Result<Vec<CrossCheckRow>, MathieuError> {
    let labelled: Vec<(Sign, &Branch)> = branches
        .iter()
        .filter_map(|b| match b.label.as_str() {
            "-" => Some((Sign::Minus, b)),
            "+" => Some((Sign::Plus, b)),
            _ => None,
        })
        .collect();
    let jobs: Vec<(f64, Sign, &Branch)> =
        eps_list.iter().flat_map(|&e| labelled.iter().map(move |&(s, b)| (e, s, b))).collect();
    jobs.par_iter()
        .map(|&(eps, branch, b)| {
            let a_determinant = find_boundary(eps, n, branch, 0.5, 1.5)?;
            let a_series = b.eval(eps);
            Ok(CrossCheckRow { eps, branch, a_series, a_determinant, deviation: (a_series - a_determinant).abs() })
        })
        .collect()
}

pub fn max_deviation(rows: &[CrossCheckRow]) -> f64 {
    rows.iter().map(|r| r.deviation).fold(0.0, f64::max)
}

/// CSV with header `eps,branch,a_series,a_determinant,deviation`.
pub fn crosscheck_csv(rows: &[CrossCheckRow]) -> String {
    let mut out = String::from("eps,branch,a_series,a_determinant,deviation\n");
    for r in rows {
        out.push_str(&format!("{},{},{:.15},{:.15},{:.3e}\n", r.eps, r.branch, r.a_series, r.a_determinant, r.deviation));
    }
    out
}

/// Is every odd coefficient zero?
pub fn is_even_in_eps(s: &EpsilonSeries) -> bool {
    s.coeffs().iter().enumerate().all(|(k, c)| k % 2 == 0 || c.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_series;

    #[test]
    fn low_order_omega() {
        let y = expand(&mathieu_potential(2).unwrap(), 3).unwrap();
        let w = omega_squared(&y).unwrap();
        assert_eq!(w, parse_series("eps^2*g1^2/4 - eps^3/24*g1*(8 + 3*g1^2 - 12*g2)", 3).unwrap());
        let y1 = expand(&mathieu_potential(1).unwrap(), 1).unwrap();
        assert!(omega_squared(&y1).unwrap().is_zero());
    }

    #[test]
    fn nonlinear_rhs_is_rejected() {
        let y = expand(&Potential::parse("(1 - y^2)*y'", &[]).unwrap(), 2).unwrap();
        assert_eq!(linear_matrix(&y), Err(MathieuError::NotLinear));
    }

    #[test]
    fn branches_through_eps4() {
        let an = analyze(6).unwrap();
        assert_eq!(an.branch("-").unwrap().a, parse_series("1 - eps^2/3 + 5*eps^4/216", 4).unwrap());
        assert_eq!(an.branch("+").unwrap().a, parse_series("1 + 5*eps^2/3 - 763*eps^4/216", 4).unwrap());
    }

    #[test]
    fn branches_annihilate_omega() {
        let an = analyze(5).unwrap();
        assert_eq!(an.branches.len(), 2);
        for b in &an.branches {
            assert!(is_even_in_eps(&b.a));
            let mut w = an.omega2.clone();
            for (i, g) in b.g_values.iter().enumerate() {
                w = w.eval_var(Var::param(&an.params[i]), &GaussianRational::real(g.clone()));
            }
            assert!(w.is_zero(), "{}", b.label);
        }
    }

    #[test]
    fn driving_only_omega() {
        let an = analyze(4).unwrap();
        let mut w = an.omega2.clone();
        for p in &an.params {
            w = w.eval_var(Var::param(p), &GaussianRational::zero());
        }
        assert_eq!(w, parse_series("-80*eps^4/576", 4).unwrap());
    }

    #[test]
    fn crosscheck_converges_in_n() {
        let an = analyze(6).unwrap();
        let at_zero = boundary_crosscheck(&an.branches, &[0.0], 12).unwrap();
        assert!(max_deviation(&at_zero) < 1e-14);
        let coarse = max_deviation(&boundary_crosscheck(&an.branches, &[0.1], 3).unwrap());
        let fine = max_deviation(&boundary_crosscheck(&an.branches, &[0.1], 12).unwrap());
        assert!(fine <= coarse);
        let rows = boundary_crosscheck(&an.branches, &[0.05, 0.1, 0.2], 12).unwrap();
        for r in rows {
            assert!(r.deviation < 20.0 * r.eps.powi(6), "{r:?}");
        }
    }

    #[test]
    fn determinant_basics() {
        assert_eq!(hill_determinant(0.0, 1.0, 8, Sign::Minus), 0.0);
        let a = find_boundary(0.0, 8, Sign::Plus, 0.5, 1.5).unwrap();
        assert!((a - 1.0).abs() < 1e-14);
        assert!(matches!(find_boundary(0.1, 8, Sign::Minus, 1.5, 2.0), Err(MathieuError::RootNotBracketed { .. })));
    }
}
