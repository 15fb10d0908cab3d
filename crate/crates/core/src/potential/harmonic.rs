//! Double expansions `sum_k eps^k sum_n f_{n,k}(t) e^{nit}` and evaluation
//! of a potential on them.

use std::collections::{BTreeMap, BTreeSet};

use super::{Potential, Quartet};
use crate::algebra::{EpsilonSeries, GaussianRational, Poly, Var};

/// Harmonic `n` -> polynomial coefficient of `e^{nit}`. Zero entries are
/// never stored.
pub type Harmonics = BTreeMap<i64, Poly>;

pub(crate) fn add_into(out: &mut Harmonics, n: i64, p: &Poly) {
    if p.is_zero() {
        return;
    }
    let slot = out.entry(n).or_default();
    slot.add_assign_ref(p);
    if slot.is_zero() {
        out.remove(&n);
    }
}

/// Product of two harmonic expansions.
pub fn convolve(a: &Harmonics, b: &Harmonics) -> Harmonics {
    let mut out: Harmonics = BTreeMap::new();
    for (na, fa) in a {
        for (nb, fb) in b {
            out.entry(na + nb).or_default().add_product(fa, fb);
        }
    }
    out.retain(|_, p| !p.is_zero());
    out
}

/// `d/dt` of `sum_n f_n(t) e^{nit}`, harmonic-wise `f_n' + i n f_n`.
pub fn harmonic_derivative(h: &Harmonics) -> Harmonics {
    let mut out = Harmonics::new();
    for (&n, f) in h {
        let d = &f.derivative(Var::T) + &f.scale(&(&GaussianRational::i() * &GaussianRational::from_int(n)));
        add_into(&mut out, n, &d);
    }
    out
}

/// The table `f_{n,k}(t)`, `k = 0..=cap`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct HarmonicSeries {
    orders: Vec<Harmonics>,
}

impl HarmonicSeries {
    pub fn zero(cap: usize) -> Self {
        Self { orders: vec![Harmonics::new(); cap + 1] }
    }

    /// Panics if `orders` is empty.
    pub fn from_orders(orders: Vec<Harmonics>) -> Self {
        assert!(!orders.is_empty(), "a harmonic series needs at least the eps^0 order");
        let orders = orders
            .into_iter()
            .map(|mut h| {
                h.retain(|_, p| !p.is_zero());
                h
            })
            .collect();
        Self { orders }
    }

    pub fn cap(&self) -> usize {
        self.orders.len() - 1
    }

    pub fn order(&self, k: usize) -> &Harmonics {
        &self.orders[k]
    }

    pub fn orders(&self) -> &[Harmonics] {
        &self.orders
    }

    /// `f_{n,k}`; zero when absent or beyond the cap.
    pub fn get(&self, n: i64, k: usize) -> Poly {
        self.orders.get(k).and_then(|h| h.get(&n)).cloned().unwrap_or_default()
    }

    /// All harmonics occurring at some order.
    pub fn support(&self) -> BTreeSet<i64> {
        self.orders.iter().flat_map(|h| h.keys().copied()).collect()
    }

    /// Largest `|n|` present at orders `<= k`.
    pub fn max_abs_harmonic(&self, k: usize) -> i64 {
        self.orders.iter().take(k + 1).flat_map(|h| h.keys().map(|n| n.abs())).max().unwrap_or(0)
    }

    /// `sum_k eps^k f_{n,k}(t)`.
    pub fn coefficient(&self, n: i64) -> EpsilonSeries {
        EpsilonSeries::from_coeffs((0..=self.cap()).map(|k| self.get(n, k)).collect())
    }

    pub fn derivative(&self) -> Self {
        Self { orders: self.orders.iter().map(harmonic_derivative).collect() }
    }

    pub fn truncate(&self, cap: usize) -> Self {
        assert!(cap <= self.cap(), "cannot raise the cap of a harmonic series");
        Self { orders: self.orders[..=cap].to_vec() }
    }

    /// Flatten into one series with `E = e^{it}` as a Laurent variable.
    pub fn to_series(&self) -> EpsilonSeries {
        EpsilonSeries::from_coeffs(
            self.orders
                .iter()
                .map(|h| {
                    let mut p = Poly::zero();
                    for (&n, f) in h {
                        p.add_assign_ref(&f.mul_monomial(&crate::algebra::Monomial::var(Var::E, n as i32)));
                    }
                    p
                })
                .collect(),
        )
    }
}

/// Incrementally maintained products `Y^l (Y')^m` for the `(l, m)` pairs a
/// potential needs. Orders of `Y` are pushed one at a time; after `j + 1`
/// pushes every `[V]_{eps^i}` with `i <= j` is available.
pub(crate) struct PowerCache<'a> {
    v: &'a Potential,
    ys: Vec<Harmonics>,
    dys: Vec<Harmonics>,
    powers: BTreeMap<(u32, u32), Vec<Harmonics>>,
}

impl<'a> PowerCache<'a> {
    pub(crate) fn new(v: &'a Potential) -> Self {
        let mut powers = BTreeMap::new();
        for q in v.table().keys() {
            let (mut l, mut m) = (q.l, q.m);
            loop {
                powers.insert((l, m), Vec::new());
                if l > 0 {
                    l -= 1;
                } else if m > 0 {
                    m -= 1;
                } else {
                    break;
                }
            }
        }
        Self { v, ys: Vec::new(), dys: Vec::new(), powers }
    }

    pub(crate) fn pushed(&self) -> usize {
        self.ys.len()
    }

    pub(crate) fn push(&mut self, y: Harmonics) {
        let j = self.ys.len();
        self.dys.push(harmonic_derivative(&y));
        self.ys.push(y);
        let keys: Vec<(u32, u32)> = self.powers.keys().copied().collect();
        for (l, m) in keys {
            let value = if (l, m) == (0, 0) {
                if j == 0 {
                    Harmonics::from([(0, Poly::one())])
                } else {
                    Harmonics::new()
                }
            } else {
                let (prev, factor) = if l > 0 { ((l - 1, m), &self.ys) } else { ((0, m - 1), &self.dys) };
                let prev = &self.powers[&prev];
                let mut acc = Harmonics::new();
                for a in 0..=j {
                    let (x, y) = (&prev[a], &factor[j - a]);
                    if x.is_empty() || y.is_empty() {
                        continue;
                    }
                    for (n, p) in convolve(x, y) {
                        add_into(&mut acc, n, &p);
                    }
                }
                acc
            };
            self.powers.get_mut(&(l, m)).unwrap().push(value);
        }
    }

    /// `[V(eps, e^{it}, Y, Y')]_{eps^j}`; needs `j + 1` pushed orders.
    pub(crate) fn coefficient(&self, j: usize) -> Harmonics {
        assert!(j < self.pushed(), "order {j} of V needs {} pushed orders of y", j + 1);
        let mut out = Harmonics::new();
        for (&Quartet { k, l, m, n }, c) in self.v.table() {
            let n = n as usize;
            if n > j {
                continue;
            }
            for (h, f) in &self.powers[&(l, m)][j - n] {
                add_into(&mut out, h + k, &(f * c));
            }
        }
        out
    }
}

/// `V(eps, e^{it}, e^{-it}, y, dy/dt)` expanded into harmonics through
/// `eps^cap`. Panics if `y` has a smaller cap.
pub fn eval_potential(v: &Potential, y: &HarmonicSeries, cap: usize) -> HarmonicSeries {
    assert!(y.cap() >= cap, "y has cap {} < {cap}", y.cap());
    let mut cache = PowerCache::new(v);
    for k in 0..=cap {
        cache.push(y.order(k).clone());
    }
    let out = HarmonicSeries::from_orders((0..=cap).map(|j| cache.coefficient(j)).collect());
    let ny = y.max_abs_harmonic(cap);
    let bound = v.table().keys().map(|q| q.k.abs() + (q.l + q.m) as i64 * ny).max().unwrap_or(0);
    assert!(out.max_abs_harmonic(cap) <= bound, "harmonic support exceeds |k| + (l+m) N_y");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_expr;

    fn p(s: &str) -> Poly {
        parse_expr(s).unwrap().0
    }

    fn y0() -> HarmonicSeries {
        HarmonicSeries::from_orders(vec![Harmonics::from([(1, p("A")), (-1, p("B"))])])
    }

    #[test]
    fn van_der_pol_first_order_source() {
        let v = Potential::parse("(1 - y^2)*y'", &[]).unwrap();
        let s = eval_potential(&v, &y0(), 0);
        // (1 - y^2) y' with y = A e + B/e: resonant part i A - i A^2 B.
        assert_eq!(s.get(1, 0), p("i*A - i*A^2*B"));
        assert_eq!(s.get(3, 0), p("-i*A^3"));
        assert_eq!(s.support(), BTreeSet::from([-3, -1, 1, 3]));
    }

    #[test]
    fn zero_y_keeps_only_driving() {
        let v = Potential::parse("y^2*E(2) + 7*E(-3) + eps*E(1)", &[]).unwrap();
        let s = eval_potential(&v, &HarmonicSeries::zero(1), 1);
        assert_eq!(s.order(0), &Harmonics::from([(-3, p("7"))]));
        assert_eq!(s.order(1), &Harmonics::from([(1, p("1"))]));
    }

    #[test]
    fn single_monomial_shift() {
        let v = Potential::parse("y*E(2)", &[]).unwrap();
        let y = HarmonicSeries::from_orders(vec![Harmonics::from([(1, p("A"))])]);
        let s = eval_potential(&v, &y, 0);
        assert_eq!(s.order(0), &Harmonics::from([(3, p("A"))]));
    }

    #[test]
    fn derivative_is_harmonic_wise() {
        let h = Harmonics::from([(2, p("t^2*A"))]);
        assert_eq!(harmonic_derivative(&h), Harmonics::from([(2, p("2*t*A + 2*i*t^2*A"))]));
    }
}
