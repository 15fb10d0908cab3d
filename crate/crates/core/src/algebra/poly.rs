//! Sparse multivariate (Laurent) polynomials with Gaussian-rational coefficients.

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use smallvec::SmallVec;

use super::{AlgebraError, GaussianRational, Var};

/// A power product `v1^e1 * v2^e2 * ...` with variables sorted ascending
/// and no zero exponents. Exponents may be negative for Laurent variables.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial {
    degree: i32,
    exps: SmallVec<[(Var, i32); 4]>,
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(v: Var, e: i32) -> Self {
        let mut m = Self::one();
        if e != 0 {
            m.exps.push((v, e));
            m.degree = e;
        }
        m
    }

    /// Build from arbitrary (var, exponent) pairs; repeated variables add up.
    pub fn from_pairs<I: IntoIterator<Item = (Var, i32)>>(pairs: I) -> Self {
        pairs.into_iter().fold(Self::one(), |acc, (v, e)| acc.mul(&Self::var(v, e)))
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    /// Sum of exponents.
    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn exp(&self, v: Var) -> i32 {
        self.exps
            .binary_search_by(|(w, _)| w.cmp(&v))
            .map(|i| self.exps[i].1)
            .unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, i32)> + '_ {
        self.exps.iter().copied()
    }

    pub fn mul(&self, other: &Self) -> Self {
        if other.is_one() {
            return self.clone();
        }
        if self.is_one() {
            return other.clone();
        }
        let mut exps = SmallVec::with_capacity(self.exps.len() + other.exps.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.exps, &other.exps);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    exps.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    exps.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    let e = a[i].1 + b[j].1;
                    if e != 0 {
                        exps.push((a[i].0, e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        exps.extend_from_slice(&a[i..]);
        exps.extend_from_slice(&b[j..]);
        Self { degree: self.degree + other.degree, exps }
    }

    /// The monomial with `v` removed.
    pub fn without(&self, v: Var) -> Self {
        let e = self.exp(v);
        if e == 0 {
            return self.clone();
        }
        Self {
            degree: self.degree - e,
            exps: self.exps.iter().copied().filter(|(w, _)| *w != v).collect(),
        }
    }

    /// Split into (exponents of variables selected by `pick`, the rest).
    pub fn split(&self, pick: impl Fn(Var) -> bool) -> (Self, Self) {
        let mut inside = Self::one();
        let mut outside = Self::one();
        for &(v, e) in &self.exps {
            let target = if pick(v) { &mut inside } else { &mut outside };
            target.exps.push((v, e));
            target.degree += e;
        }
        (inside, outside)
    }
}

/// Graded lexicographic: total degree first, then exponents compared in
/// variable precedence order.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree.cmp(&other.degree).then_with(|| {
            let (a, b) = (&self.exps, &other.exps);
            let (mut i, mut j) = (0, 0);
            loop {
                match (a.get(i), b.get(j)) {
                    (None, None) => return Ordering::Equal,
                    (Some(&(_, e)), None) => return e.cmp(&0),
                    (None, Some(&(_, e))) => return 0.cmp(&e),
                    (Some(&(va, ea)), Some(&(vb, eb))) => match va.cmp(&vb) {
                        Ordering::Less => return ea.cmp(&0),
                        Ordering::Greater => return 0.cmp(&eb),
                        Ordering::Equal => {
                            if ea != eb {
                                return ea.cmp(&eb);
                            }
                            i += 1;
                            j += 1;
                        }
                    },
                }
            }
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial: finitely many nonzero terms in canonical order.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, GaussianRational>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(GaussianRational::one())
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::term(c, Monomial::one())
    }

    pub fn var(v: Var) -> Self {
        Self::term(GaussianRational::one(), Monomial::var(v, 1))
    }

    pub fn term(c: GaussianRational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Self { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, GaussianRational)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (m, c) in it {
            p.add_term(m, &c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &GaussianRational)> {
        self.terms.iter()
    }

    /// The value if this polynomial is a constant (zero included).
    pub fn as_constant(&self) -> Option<GaussianRational> {
        match self.terms.len() {
            0 => Some(GaussianRational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn coeff(&self, m: &Monomial) -> GaussianRational {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, m: Monomial, c: &GaussianRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign_ref(&mut self, other: &Poly) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c);
        }
    }

    /// `self += a * b` without materializing the product.
    pub fn add_product(&mut self, a: &Poly, b: &Poly) {
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                self.add_term(ma.mul(mb), &(ca * cb));
            }
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Poly {
        Poly { terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect() }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn variables(&self) -> BTreeSet<Var> {
        self.terms.keys().flat_map(|m| m.iter().map(|(v, _)| v)).collect()
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.terms.keys().any(|m| m.exp(v) != 0)
    }

    /// Largest exponent of `v` (0 for the zero polynomial).
    pub fn degree_in(&self, v: Var) -> i32 {
        self.terms.keys().map(|m| m.exp(v)).max().unwrap_or(0)
    }

    pub fn min_degree_in(&self, v: Var) -> i32 {
        self.terms.keys().map(|m| m.exp(v)).min().unwrap_or(0)
    }

    /// Coefficients of the powers of `v`: `self = sum_e c_e * v^e`.
    pub fn coefficients_in(&self, v: Var) -> BTreeMap<i32, Poly> {
        let mut out: BTreeMap<i32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.exp(v)).or_default().add_term(m.without(v), c);
        }
        out
    }

    pub fn from_coefficients_in(v: Var, coeffs: &BTreeMap<i32, Poly>) -> Poly {
        let mut out = Poly::zero();
        for (&e, p) in coeffs {
            let vm = Monomial::var(v, e);
            for (m, c) in &p.terms {
                out.add_term(m.mul(&vm), c);
            }
        }
        out
    }

    pub fn derivative(&self, v: Var) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exp(v);
            if e != 0 {
                let lowered = m.without(v).mul(&Monomial::var(v, e - 1));
                out.add_term(lowered, &(c * &GaussianRational::from_int(e as i64)));
            }
        }
        out
    }

    /// Terms free of `v`, i.e. the value at `v = 0` for polynomial `v`.
    pub fn at_zero(&self, v: Var) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.exp(v) == 0)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Evaluate `v` at a constant. Panics on a negative power of zero.
    pub fn eval_var(&self, v: Var, value: &GaussianRational) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exp(v);
            let factor = value.powi(e).expect("negative power of zero");
            out.add_term(m.without(v), &(c * &factor));
        }
        out
    }

    /// Replace `v` by a polynomial. `v` must occur with nonnegative powers.
    pub fn substitute_var(&self, v: Var, value: &Poly) -> Result<Poly, AlgebraError> {
        let mut out = Poly::zero();
        let mut power = Poly::one();
        let mut done = 0;
        for (e, c) in self.coefficients_in(v) {
            if e < 0 {
                return Err(AlgebraError::NegativePower(v));
            }
            while done < e {
                power = &power * value;
                done += 1;
            }
            out.add_product(&c, &power);
        }
        Ok(out)
    }

    /// Replace each monomial via `f`; terms mapped to `None` are dropped.
    pub fn map_monomials(&self, f: impl Fn(&Monomial) -> Option<Monomial>) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            if let Some(n) = f(m) {
                out.add_term(n, c);
            }
        }
        out
    }

    pub fn map_coeffs(&self, f: impl Fn(&GaussianRational) -> GaussianRational) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), &f(c));
        }
        out
    }

    pub fn rename(&self, from: Var, to: Var) -> Poly {
        self.map_monomials(|m| {
            let e = m.exp(from);
            Some(m.without(from).mul(&Monomial::var(to, e)))
        })
    }

    /// Exchange two variables.
    pub fn swap(&self, a: Var, b: Var) -> Poly {
        self.map_monomials(|m| {
            let (ea, eb) = (m.exp(a), m.exp(b));
            Some(
                m.without(a)
                    .without(b)
                    .mul(&Monomial::var(a, eb))
                    .mul(&Monomial::var(b, ea)),
            )
        })
    }

    /// Complex conjugate of the coefficients (`i -> -i`).
    pub fn conj(&self) -> Poly {
        self.map_coeffs(|c| c.conj())
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(|c| c.is_real())
    }

    /// Numeric evaluation; `value` supplies every variable that occurs.
    pub fn eval(&self, value: &impl Fn(Var) -> Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = c.to_complex64();
            for (v, e) in m.iter() {
                t *= value(v).powi(e);
            }
            acc += t;
        }
        acc
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), &-c);
        }
        out
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        out.add_product(self, rhs);
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.map_coeffs(|c| -c)
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl From<GaussianRational> for Poly {
    fn from(c: GaussianRational) -> Self {
        Poly::constant(c)
    }
}

impl From<Var> for Poly {
    fn from(v: Var) -> Self {
        Poly::var(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: Var) -> Poly {
        Poly::var(x)
    }

    #[test]
    fn monomial_product() {
        let at = &v(Var::A) * &v(Var::T);
        let bt = &v(Var::B) * &v(Var::T);
        let expected = Poly::term(
            GaussianRational::one(),
            Monomial::from_pairs([(Var::A, 1), (Var::B, 1), (Var::T, 2)]),
        );
        assert_eq!(&at * &bt, expected);
    }

    #[test]
    fn laurent_exponents_cancel() {
        let ph = v(Var::Phase);
        let inv = Poly::term(GaussianRational::one(), Monomial::var(Var::Phase, -1));
        assert_eq!(&ph * &inv, Poly::one());
    }

    #[test]
    fn graded_order_puts_constants_first() {
        let p = &Poly::one() - &v(Var::R).pow(2);
        let firsts: Vec<_> = p.terms().map(|(m, _)| m.degree()).collect();
        assert_eq!(firsts, vec![0, 2]);
    }

    #[test]
    fn derivative_and_split() {
        let p = &v(Var::T).pow(3) * &v(Var::A);
        assert_eq!(
            p.derivative(Var::T),
            (&v(Var::T).pow(2) * &v(Var::A)).scale(&GaussianRational::from_int(3))
        );
        let c = p.coefficients_in(Var::T);
        assert_eq!(c.len(), 1);
        assert_eq!(c[&3], v(Var::A));
        assert_eq!(Poly::from_coefficients_in(Var::T, &c), p);
    }

    #[test]
    fn swap_and_conj() {
        let p = (&v(Var::A) * &v(Var::A)).scale(&GaussianRational::i()) + v(Var::B);
        let q = p.swap(Var::A, Var::B).conj();
        let expected = (&v(Var::B) * &v(Var::B)).scale(&-GaussianRational::i()) + v(Var::A);
        assert_eq!(q, expected);
    }
}
