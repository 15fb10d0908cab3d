//! Exact root finding: rational roots of univariate polynomials and formal
//! Newton iteration for roots of eps-series.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{substitute, AlgebraError, Bindings, EpsilonSeries, GaussianRational, Poly, Var};

/// Largest |integer| whose divisors we are willing to enumerate.
const DIVISOR_LIMIT: u128 = 1 << 60;

/// Real rational coefficients `c[e]` of `v^e` in a polynomial that must be
/// univariate in `v` with real constant coefficients and no negative powers.
pub fn univariate_coefficients(p: &Poly, v: Var) -> Result<Vec<BigRational>, AlgebraError> {
    let mut out: Vec<BigRational> = Vec::new();
    for (e, c) in p.coefficients_in(v) {
        if e < 0 {
            return Err(AlgebraError::NegativePower(v));
        }
        let c = c.as_constant().ok_or(AlgebraError::NotUnivariate(v))?;
        if !c.is_real() {
            return Err(AlgebraError::NotUnivariate(v));
        }
        let e = e as usize;
        if out.len() <= e {
            out.resize(e + 1, BigRational::zero());
        }
        out[e] = c.re().clone();
    }
    while out.last().is_some_and(Zero::is_zero) {
        out.pop();
    }
    Ok(out)
}

fn eval_rational(coeffs: &[BigRational], x: &BigRational) -> BigRational {
    coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
}

/// Divide by `(x - r)`; `r` must be a root.
fn deflate(coeffs: &[BigRational], r: &BigRational) -> Vec<BigRational> {
    let n = coeffs.len() - 1;
    let mut q = vec![BigRational::zero(); n];
    let mut carry = BigRational::zero();
    for i in (1..=n).rev() {
        carry = &carry * r + &coeffs[i];
        q[i - 1] = carry.clone();
    }
    q
}

fn divisors(n: &BigInt) -> Result<Vec<BigInt>, AlgebraError> {
    let n = n.abs().to_u128().filter(|&n| n <= DIVISOR_LIMIT).ok_or(AlgebraError::CoefficientTooLarge)?;
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d: u128 = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(BigInt::from(d));
            if d * d != n {
                large.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    Ok(small)
}

/// All rational roots with multiplicities, ascending. The polynomial must
/// be nonzero. Irrational or complex roots are simply not reported.
pub fn rational_roots(coeffs: &[BigRational]) -> Result<Vec<(BigRational, u32)>, AlgebraError> {
    let mut coeffs: Vec<BigRational> = coeffs.to_vec();
    while coeffs.last().is_some_and(Zero::is_zero) {
        coeffs.pop();
    }
    if coeffs.is_empty() {
        return Err(AlgebraError::ZeroPolynomial);
    }
    let mut roots = Vec::new();
    let zeros = coeffs.iter().take_while(|c| c.is_zero()).count();
    if zeros > 0 {
        roots.push((BigRational::zero(), zeros as u32));
        coeffs.drain(..zeros);
    }
    if coeffs.len() == 1 {
        return Ok(roots);
    }
    let lcm = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = coeffs.iter().map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    let ps = divisors(&ints[0])?;
    let qs = divisors(ints.last().unwrap())?;
    let mut candidates: Vec<BigRational> = Vec::new();
    for p in &ps {
        for q in &qs {
            for sign in [1, -1] {
                let r = BigRational::new(p * BigInt::from(sign), q.clone());
                if !candidates.contains(&r) {
                    candidates.push(r);
                }
            }
        }
    }
    candidates.sort();
    for r in candidates {
        let mut mult = 0;
        while coeffs.len() > 1 && eval_rational(&coeffs, &r).is_zero() {
            coeffs = deflate(&coeffs, &r);
            mult += 1;
        }
        if mult > 0 {
            roots.push((r, mult));
        }
    }
    roots.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(roots)
}

/// Exact square root of a nonnegative rational, if it is a perfect square.
pub fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| BigRational::new(n, d))
}

/// Formal series root `u(eps)` of `g(u, eps) = 0` starting from `u0`.
///
/// A common factor `eps^m` of `g` is removed first; the remaining leading
/// coefficient must vanish at `u0` with a nonzero constant derivative there.
/// The result is accurate through `eps^{cap - m}` and is computed by Newton
/// steps that double the number of correct orders each time.
pub fn series_solve_root(g: &EpsilonSeries, v: Var, u0: &GaussianRational) -> Result<EpsilonSeries, AlgebraError> {
    let Some(m) = g.valuation() else {
        return Ok(EpsilonSeries::constant(Poly::constant(u0.clone()), g.cap()));
    };
    let h = g.shift_down(m)?;
    let lead = h.coeff(0);
    let at_root = lead.eval_var(v, u0).as_constant();
    if at_root.as_ref().is_none_or(|c| !c.is_zero()) {
        return Err(AlgebraError::NonRationalRoot(format!("{u0} is not a root of {lead}")));
    }
    let slope = lead
        .derivative(v)
        .eval_var(v, u0)
        .as_constant()
        .ok_or_else(|| AlgebraError::NonRationalRoot(format!("derivative of {lead} is not constant at {u0}")))?;
    if slope.is_zero() {
        return Err(AlgebraError::DegenerateRoot(format!("{lead} has a multiple root at {u0}")));
    }

    let cap = h.cap();
    let dh = h.derivative(v);
    let mut u = EpsilonSeries::constant(Poly::constant(u0.clone()), cap);
    let mut correct = 1usize;
    while correct <= cap {
        let mut b = Bindings::new();
        b.insert(v, u.clone());
        let value = substitute(&h, &b)?;
        let inv = substitute(&dh, &b)?.inverse()?;
        u = &u - &(&value * &inv);
        correct *= 2;
    }
    let mut b = Bindings::new();
    b.insert(v, u.clone());
    debug_assert!(substitute(&h, &b)?.is_zero());
    Ok(u)
}

/// Rational roots of `p` viewed as a univariate polynomial in `v`.
pub fn roots_of(p: &Poly, v: Var) -> Result<Vec<(BigRational, u32)>, AlgebraError> {
    rational_roots(&univariate_coefficients(p, v)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_rational;

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    fn u() -> Poly {
        Poly::var(Var::U)
    }

    #[test]
    fn quadratic_with_rational_roots() {
        // 9g^2 - 12g - 5
        let roots = rational_roots(&[q("-5"), q("-12"), q("9")]).unwrap();
        assert_eq!(roots, vec![(q("-1/3"), 1), (q("5/3"), 1)]);
    }

    #[test]
    fn double_root_at_zero() {
        let roots = rational_roots(&[q("0"), q("0"), q("1/4")]).unwrap();
        assert_eq!(roots, vec![(q("0"), 2)]);
    }

    #[test]
    fn irrational_roots_are_not_reported() {
        assert!(rational_roots(&[q("-2"), q("0"), q("1")]).unwrap().is_empty());
    }

    #[test]
    fn toy_root_is_exact() {
        // eps (1 - u)/2
        let half = GaussianRational::ratio(1, 2);
        let g = EpsilonSeries::from_coeffs(vec![
            Poly::zero(),
            (&Poly::one() - &u()).scale(&half),
            Poly::zero(),
            Poly::zero(),
        ]);
        let sol = series_solve_root(&g, Var::U, &GaussianRational::one()).unwrap();
        assert_eq!(sol, EpsilonSeries::one(2));
    }

    #[test]
    fn constant_root_of_eps_times_quadratic() {
        let g = EpsilonSeries::from_coeffs(vec![
            Poly::zero(),
            &u().pow(2) - &Poly::constant(GaussianRational::from_int(4)),
            Poly::zero(),
        ]);
        let sol = series_solve_root(&g, Var::U, &GaussianRational::from_int(2)).unwrap();
        assert_eq!(sol, EpsilonSeries::constant(Poly::constant(GaussianRational::from_int(2)), 1));
    }

    #[test]
    fn newton_matches_sqrt_of_one_plus_eps() {
        // u^2 - (1 + eps) = 0, u0 = 1: u = 1 + eps/2 - eps^2/8 + eps^3/16 - 5 eps^4/128
        let g = EpsilonSeries::from_coeffs(vec![
            &u().pow(2) - &Poly::one(),
            -&Poly::one(),
            Poly::zero(),
            Poly::zero(),
            Poly::zero(),
        ]);
        let sol = series_solve_root(&g, Var::U, &GaussianRational::one()).unwrap();
        let expect: Vec<Poly> = ["1", "1/2", "-1/8", "1/16", "-5/128"]
            .iter()
            .map(|s| Poly::constant(GaussianRational::real(q(s))))
            .collect();
        assert_eq!(sol.coeffs(), &expect[..]);
    }

    #[test]
    fn degenerate_and_non_roots() {
        let g = EpsilonSeries::from_coeffs(vec![&u().pow(2) - &Poly::one(), Poly::zero()]);
        assert!(matches!(
            series_solve_root(&g, Var::U, &GaussianRational::from_int(2)),
            Err(AlgebraError::NonRationalRoot(_))
        ));
        let g = EpsilonSeries::from_coeffs(vec![u().pow(2), Poly::one()]);
        assert!(matches!(
            series_solve_root(&g, Var::U, &GaussianRational::zero()),
            Err(AlgebraError::DegenerateRoot(_))
        ));
    }

    #[test]
    fn perfect_square_roots() {
        assert_eq!(rational_sqrt(&q("9/4")), Some(q("3/2")));
        assert_eq!(rational_sqrt(&q("2")), None);
    }
}
