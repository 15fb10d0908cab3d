//! Power series in `eps` truncated at a fixed order, with polynomial coefficients.

use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Mul, Neg, Sub};

use super::{AlgebraError, GaussianRational, Monomial, Poly, Var};

/// `sum_{k=0}^{cap} c_k eps^k + O(eps^{cap+1})`.
///
/// Arithmetic between series with different caps is refused; use
/// [`EpsilonSeries::truncate`] to equalize explicitly.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct EpsilonSeries {
    coeffs: Vec<Poly>,
}

/// Variable bindings for [`substitute`].
pub type Bindings = BTreeMap<Var, EpsilonSeries>;

impl EpsilonSeries {
    pub fn zero(cap: usize) -> Self {
        Self { coeffs: vec![Poly::zero(); cap + 1] }
    }

    pub fn one(cap: usize) -> Self {
        Self::constant(Poly::one(), cap)
    }

    pub fn constant(p: Poly, cap: usize) -> Self {
        let mut s = Self::zero(cap);
        s.coeffs[0] = p;
        s
    }

    /// `eps^k` (zero if `k > cap`).
    pub fn eps_pow(k: usize, cap: usize) -> Self {
        let mut s = Self::zero(cap);
        if k <= cap {
            s.coeffs[k] = Poly::one();
        }
        s
    }

    /// From explicit coefficients `c_0, ..., c_cap`. Panics on an empty vector.
    pub fn from_coeffs(coeffs: Vec<Poly>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least the eps^0 coefficient");
        Self { coeffs }
    }

    /// Interpret occurrences of [`Var::Eps`] in `p` as powers of eps.
    /// Negative powers are rejected; powers beyond `cap` are dropped.
    pub fn from_poly_in_eps(p: &Poly, cap: usize) -> Result<Self, AlgebraError> {
        let mut s = Self::zero(cap);
        for (e, c) in p.coefficients_in(Var::Eps) {
            if e < 0 {
                return Err(AlgebraError::NegativePower(Var::Eps));
            }
            if (e as usize) <= cap {
                s.coeffs[e as usize] = c;
            }
        }
        Ok(s)
    }

    /// The series as a polynomial in [`Var::Eps`].
    pub fn to_poly_in_eps(&self) -> Poly {
        let map = self.coeffs.iter().enumerate().map(|(k, c)| (k as i32, c.clone())).collect();
        Poly::from_coefficients_in(Var::Eps, &map)
    }

    pub fn cap(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &Poly {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    pub fn coeff_mut(&mut self, k: usize) -> &mut Poly {
        &mut self.coeffs[k]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Poly::is_zero)
    }

    /// Lowest order with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Drop orders above `cap`. Panics if `cap` exceeds the current cap.
    pub fn truncate(&self, cap: usize) -> Self {
        assert!(cap <= self.cap(), "cannot raise a series cap from {} to {cap}", self.cap());
        Self { coeffs: self.coeffs[..=cap].to_vec() }
    }

    /// Multiply by `eps^m`, keeping the cap.
    pub fn shift_up(&self, m: usize) -> Self {
        let cap = self.cap();
        let mut s = Self::zero(cap);
        for k in 0..=cap {
            if k + m <= cap {
                s.coeffs[k + m] = self.coeffs[k].clone();
            }
        }
        s
    }

    /// Divide by `eps^m`; the cap drops by `m`.
    pub fn shift_down(&self, m: usize) -> Result<Self, AlgebraError> {
        if m > self.cap() {
            return Err(AlgebraError::CapTooSmall { needed: m, cap: self.cap() });
        }
        if self.coeffs[..m].iter().any(|c| !c.is_zero()) {
            return Err(AlgebraError::NotDivisibleByEps(m));
        }
        Ok(Self { coeffs: self.coeffs[m..].to_vec() })
    }

    pub fn map(&self, f: impl Fn(&Poly) -> Poly) -> Self {
        Self { coeffs: self.coeffs.iter().map(f).collect() }
    }

    pub fn scale(&self, p: &Poly) -> Self {
        self.map(|c| c * p)
    }

    pub fn derivative(&self, v: Var) -> Self {
        self.map(|c| c.derivative(v))
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.coeffs.iter().any(|c| c.contains_var(v))
    }

    fn check_caps(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.cap() != other.cap() {
            return Err(AlgebraError::CapMismatch { left: self.cap(), right: other.cap() });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_caps(other)?;
        Ok(Self { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_caps(other)?;
        Ok(Self { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect() })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_caps(other)?;
        Ok(self.mul_truncated(other, self.cap()))
    }

    fn mul_truncated(&self, other: &Self, cap: usize) -> Self {
        let mut out = Self::zero(cap);
        for (i, a) in self.coeffs.iter().enumerate().take(cap + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(cap + 1 - i) {
                if !b.is_zero() {
                    out.coeffs[i + j].add_product(a, b);
                }
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.cap());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Multiplicative inverse; the eps^0 coefficient must be a nonzero constant.
    pub fn inverse(&self) -> Result<Self, AlgebraError> {
        let c0 = self.coeffs[0].as_constant().ok_or(AlgebraError::NotInvertible)?;
        let inv0 = c0.inv().map_err(|_| AlgebraError::NotInvertible)?;
        let cap = self.cap();
        let mut out = Self::zero(cap);
        out.coeffs[0] = Poly::constant(inv0.clone());
        for k in 1..=cap {
            let mut acc = Poly::zero();
            for j in 1..=k {
                acc.add_product(&self.coeffs[j], &out.coeffs[k - j]);
            }
            out.coeffs[k] = acc.scale(&-&inv0);
        }
        Ok(out)
    }

    /// Evaluate a variable at a constant in every coefficient.
    pub fn eval_var(&self, v: Var, value: &GaussianRational) -> Self {
        self.map(|c| c.eval_var(v, value))
    }

    pub fn rename(&self, from: Var, to: Var) -> Self {
        self.map(|c| c.rename(from, to))
    }
}

impl<'a> Add<&'a EpsilonSeries> for &'a EpsilonSeries {
    type Output = EpsilonSeries;
    /// Panics on a cap mismatch; see [`EpsilonSeries::try_add`].
    fn add(self, rhs: &EpsilonSeries) -> EpsilonSeries {
        self.try_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<'a> Sub<&'a EpsilonSeries> for &'a EpsilonSeries {
    type Output = EpsilonSeries;
    fn sub(self, rhs: &EpsilonSeries) -> EpsilonSeries {
        self.try_sub(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<'a> Mul<&'a EpsilonSeries> for &'a EpsilonSeries {
    type Output = EpsilonSeries;
    fn mul(self, rhs: &EpsilonSeries) -> EpsilonSeries {
        self.try_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Neg for &EpsilonSeries {
    type Output = EpsilonSeries;
    fn neg(self) -> EpsilonSeries {
        self.map(|c| -c)
    }
}

/// Simultaneous substitution `v -> bindings[v]` with truncation.
///
/// Unbound variables pass through. The result cap is the minimum of the
/// input cap and every binding cap. Bound variables must occur with
/// nonnegative exponents.
pub fn substitute(p: &EpsilonSeries, bindings: &Bindings) -> Result<EpsilonSeries, AlgebraError> {
    let cap = bindings.values().map(EpsilonSeries::cap).fold(p.cap(), usize::min);

    // Group terms by their bound part so each power product is formed once.
    let mut groups: BTreeMap<Monomial, EpsilonSeries> = BTreeMap::new();
    for (k, poly) in p.coeffs.iter().enumerate().take(cap + 1) {
        for (m, c) in poly.terms() {
            let (bound, free) = m.split(|v| bindings.contains_key(&v));
            if let Some((v, _)) = bound.iter().find(|&(_, e)| e < 0) {
                return Err(AlgebraError::NegativePower(v));
            }
            groups
                .entry(bound)
                .or_insert_with(|| EpsilonSeries::zero(cap))
                .coeffs[k]
                .add_term(free, c);
        }
    }

    let mut powers: HashMap<(Var, i32), EpsilonSeries> = HashMap::new();
    let mut out = EpsilonSeries::zero(cap);
    for (bound, coeff) in groups {
        let mut acc = coeff;
        for (v, e) in bound.iter() {
            let factor = power_of(&mut powers, bindings, v, e, cap);
            acc = acc.mul_truncated(&factor, cap);
        }
        for (k, c) in acc.coeffs.into_iter().enumerate() {
            out.coeffs[k].add_assign_ref(&c);
        }
    }
    Ok(out)
}

fn power_of(
    cache: &mut HashMap<(Var, i32), EpsilonSeries>,
    bindings: &Bindings,
    v: Var,
    e: i32,
    cap: usize,
) -> EpsilonSeries {
    if let Some(s) = cache.get(&(v, e)) {
        return s.clone();
    }
    let base = bindings[&v].truncate(cap);
    let value = if e == 1 {
        base
    } else {
        let prev = power_of(cache, bindings, v, e - 1, cap);
        prev.mul_truncated(&base, cap)
    };
    cache.insert((v, e), value.clone());
    value
}
