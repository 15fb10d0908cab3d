//! Fixed-step RK4 for the oscillator and for the truncated RG system, the
//! renormalized expansion along an amplitude trajectory, and comparisons.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::algebra::{EpsilonSeries, Poly, Var};
use crate::potential::Potential;
use crate::rg::RGSystem;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericError {
    #[error("potential is not real at t = {t}: imaginary residue {residue:e}")]
    ComplexPotential { t: f64, residue: f64 },
    #[error("expansion is not real at t = {t}: imaginary residue {residue:e}")]
    NotReal { t: f64, residue: f64 },
    #[error("trajectories are sampled on different grids")]
    GridMismatch,
    #[error("parameter {0} has no numeric value")]
    UnboundParam(String),
    #[error("step must be positive and finite, got {0}")]
    BadStep(f64),
}

/// Default step `2 pi / 200`.
pub const DEFAULT_STEP: f64 = 2.0 * PI / 200.0;
/// Default run length `25 * 2 pi`.
pub const DEFAULT_T_MAX: f64 = 25.0 * 2.0 * PI;

const DIVERGED: f64 = 1e12;

/// Numeric values for symbolic parameters.
pub type ParamValues = BTreeMap<String, f64>;

/// A polynomial with float coefficients over the variables left free.
#[derive(Clone, Debug, Default)]
pub struct NumPoly {
    terms: Vec<(Complex64, Vec<(Var, i32)>)>,
}

impl NumPoly {
    /// Fix `eps` and every parameter; the remaining variables stay free.
    pub fn compile(p: &Poly, eps: f64, params: &ParamValues) -> Result<Self, NumericError> {
        let mut terms = Vec::with_capacity(p.len());
        for (m, c) in p.terms() {
            let mut coeff = c.to_complex64();
            let mut free = Vec::new();
            for (v, e) in m.iter() {
                match v {
                    Var::Eps => coeff *= eps.powi(e),
                    Var::Param(name) => {
                        let x = params
                            .get(name.as_str())
                            .ok_or_else(|| NumericError::UnboundParam(name.as_str().to_string()))?;
                        coeff *= x.powi(e);
                    }
                    _ => free.push((v, e)),
                }
            }
            terms.push((coeff, free));
        }
        Ok(NumPoly { terms })
    }

    /// `sum_k eps^k c_k` through `eps^order`.
    pub fn compile_series(s: &EpsilonSeries, order: usize, eps: f64, params: &ParamValues) -> Result<Self, NumericError> {
        let mut terms = Vec::new();
        for k in 0..=order.min(s.cap()) {
            let mut p = NumPoly::compile(s.coeff(k), eps, params)?;
            for t in &mut p.terms {
                t.0 *= eps.powi(k as i32);
            }
            terms.extend(p.terms);
        }
        Ok(NumPoly { terms })
    }

    pub fn eval(&self, value: impl Fn(Var) -> Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, m) in &self.terms {
            let mut t = *c;
            for &(v, e) in m {
                t *= value(v).powi(e);
            }
            acc += t;
        }
        acc
    }
}

/// Grid times, states, and whether the run stopped early.
pub type Rk4Run<const N: usize> = (Vec<f64>, Vec<[f64; N]>, bool);

/// Classical RK4 on a uniform grid `t_i = i h`, `i = 0..round(t_max/h)`.
/// Stops early (flag set) when the state leaves the finite range.
pub fn rk4<const N: usize, E>(
    mut f: impl FnMut(f64, &[f64; N]) -> Result<[f64; N], E>,
    x0: [f64; N],
    t_max: f64,
    h: f64,
) -> Result<Rk4Run<N>, E> {
    let steps = (t_max / h).round().max(0.0) as usize;
    let mut ts = Vec::with_capacity(steps + 1);
    let mut xs = Vec::with_capacity(steps + 1);
    let mut x = x0;
    ts.push(0.0);
    xs.push(x);
    let axpy = |x: &[f64; N], a: f64, k: &[f64; N]| -> [f64; N] { std::array::from_fn(|i| x[i] + a * k[i]) };
    for i in 0..steps {
        let t = i as f64 * h;
        let k1 = f(t, &x)?;
        let k2 = f(t + h / 2.0, &axpy(&x, h / 2.0, &k1))?;
        let k3 = f(t + h / 2.0, &axpy(&x, h / 2.0, &k2))?;
        let k4 = f(t + h, &axpy(&x, h, &k3))?;
        let next: [f64; N] = std::array::from_fn(|j| x[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]));
        if next.iter().any(|v| !v.is_finite() || v.abs() > DIVERGED) {
            return Ok((ts, xs, true));
        }
        x = next;
        ts.push((i + 1) as f64 * h);
        xs.push(x);
    }
    Ok((ts, xs, false))
}

/// Uniformly sampled real signal.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub h: f64,
    pub t: Vec<f64>,
    pub values: Vec<f64>,
    /// `dy/dt` where available (empty otherwise).
    pub velocity: Vec<f64>,
    pub diverged: bool,
    pub meta: BTreeMap<String, String>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

/// `V(eps, e^{it}, e^{-it}, y, y')` with everything but `t, y, y'` fixed.
#[derive(Clone, Debug)]
pub struct NumericPotential {
    poly: NumPoly,
}

impl NumericPotential {
    pub fn new(v: &Potential, eps: f64, params: &ParamValues) -> Result<Self, NumericError> {
        Ok(NumericPotential { poly: NumPoly::compile(&v.to_poly(), eps, params)? })
    }

    pub fn eval(&self, t: f64, y: f64, yp: f64) -> Result<f64, NumericError> {
        let e = Complex64::new(t.cos(), t.sin());
        let z = self.poly.eval(|v| match v {
            Var::E => e,
            Var::Y => Complex64::new(y, 0.0),
            Var::Yp => Complex64::new(yp, 0.0),
            other => unreachable!("{other} left free in a potential"),
        });
        if z.im.abs() > 1e-12 * (1.0 + z.re.abs()) {
            return Err(NumericError::ComplexPotential { t, residue: z.im.abs() });
        }
        Ok(z.re)
    }
}

fn check_step(h: f64) -> Result<(), NumericError> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(NumericError::BadStep(h))
    }
}

fn fmt_params(params: &ParamValues) -> String {
    params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(",")
}

/// RK4 on `y'' + y = eps V`.
pub fn integrate_ode(
    v: &Potential,
    params: &ParamValues,
    y0: f64,
    dy0: f64,
    eps: f64,
    t_max: f64,
    h: f64,
) -> Result<Trajectory, NumericError> {
    check_step(h)?;
    let pot = NumericPotential::new(v, eps, params)?;
    let (t, xs, diverged) = rk4(|t, x: &[f64; 2]| Ok([x[1], -x[0] + eps * pot.eval(t, x[0], x[1])?]), [y0, dy0], t_max, h)?;
    let meta = BTreeMap::from([
        ("source".into(), "ode".into()),
        ("eps".into(), eps.to_string()),
        ("params".into(), fmt_params(params)),
        ("t_max".into(), t_max.to_string()),
        ("h".into(), h.to_string()),
    ]);
    Ok(Trajectory {
        h,
        t,
        values: xs.iter().map(|x| x[0]).collect(),
        velocity: xs.iter().map(|x| x[1]).collect(),
        diverged,
        meta,
    })
}

/// `Ar = R e^{i theta}`, `Br = R e^{-i theta}`.
pub fn polar_initial(r0: f64, theta0: f64) -> (Complex64, Complex64) {
    (Complex64::from_polar(r0, theta0), Complex64::from_polar(r0, -theta0))
}

/// Renormalized amplitudes on a uniform grid.
#[derive(Clone, Debug, PartialEq)]
pub struct AmplitudeTrajectory {
    pub h: f64,
    pub t: Vec<f64>,
    pub ar: Vec<Complex64>,
    pub br: Vec<Complex64>,
    pub diverged: bool,
    pub meta: BTreeMap<String, String>,
}

impl AmplitudeTrajectory {
    /// `R = sqrt(Ar Br)` (real for conjugate data).
    pub fn radius(&self) -> Vec<f64> {
        self.ar.iter().zip(&self.br).map(|(a, b)| (a * b).sqrt().re).collect()
    }

    pub fn theta(&self) -> Vec<f64> {
        self.ar.iter().map(|a| a.arg()).collect()
    }
}

/// Right-hand sides of the RG system truncated at `eps^order`, compiled.
fn rg_field(rg: &RGSystem, order: usize, eps: f64, params: &ParamValues) -> Result<[NumPoly; 2], NumericError> {
    Ok([
        NumPoly::compile_series(rg.rhs_a(), order, eps, params)?,
        NumPoly::compile_series(rg.rhs_b(), order, eps, params)?,
    ])
}

fn amp_lookup(ar: Complex64, br: Complex64) -> impl Fn(Var) -> Complex64 {
    move |v| match v {
        Var::Ar => ar,
        Var::Br => br,
        other => unreachable!("{other} left free in an RG coefficient"),
    }
}

/// RK4 on `d(Ar, Br)/dt` truncated at `eps^order`.
pub fn integrate_rg(
    rg: &RGSystem,
    params: &ParamValues,
    eps: f64,
    order: usize,
    init: (Complex64, Complex64),
    t_max: f64,
    h: f64,
) -> Result<AmplitudeTrajectory, NumericError> {
    check_step(h)?;
    let [fa, fb] = rg_field(rg, order, eps, params)?;
    let x0 = [init.0.re, init.0.im, init.1.re, init.1.im];
    let (t, xs, diverged) = rk4(
        |_, x: &[f64; 4]| -> Result<[f64; 4], NumericError> {
            let look = amp_lookup(Complex64::new(x[0], x[1]), Complex64::new(x[2], x[3]));
            let (da, db) = (fa.eval(&look), fb.eval(&look));
            Ok([da.re, da.im, db.re, db.im])
        },
        x0,
        t_max,
        h,
    )?;
    let meta = BTreeMap::from([
        ("source".into(), "rg".into()),
        ("eps".into(), eps.to_string()),
        ("params".into(), fmt_params(params)),
        ("rg_order".into(), order.to_string()),
        ("t_max".into(), t_max.to_string()),
        ("h".into(), h.to_string()),
    ]);
    Ok(AmplitudeTrajectory {
        h,
        t,
        ar: xs.iter().map(|x| Complex64::new(x[0], x[1])).collect(),
        br: xs.iter().map(|x| Complex64::new(x[2], x[3])).collect(),
        diverged,
        meta,
    })
}

/// The expansion `sum_n P_n(eps, 0, Ar, Br) e^{int}` through `eps^order`.
#[derive(Clone, Debug)]
pub struct NumericExpansion {
    harmonics: Vec<(i64, NumPoly, NumPoly, NumPoly)>,
}

impl NumericExpansion {
    pub fn new(rg: &RGSystem, order: usize, eps: f64, params: &ParamValues) -> Result<Self, NumericError> {
        let mut harmonics = Vec::new();
        for (&n, s) in rg.expansion() {
            let d = |v: Var| s.map(|c| c.derivative(v));
            harmonics.push((
                n,
                NumPoly::compile_series(s, order, eps, params)?,
                NumPoly::compile_series(&d(Var::Ar), order, eps, params)?,
                NumPoly::compile_series(&d(Var::Br), order, eps, params)?,
            ));
        }
        Ok(NumericExpansion { harmonics })
    }

    /// `y(t)` for amplitudes `(ar, br)`.
    pub fn value(&self, t: f64, ar: Complex64, br: Complex64) -> Complex64 {
        let look = amp_lookup(ar, br);
        self.harmonics
            .iter()
            .map(|(n, p, _, _)| p.eval(&look) * Complex64::from_polar(1.0, *n as f64 * t))
            .sum()
    }

    /// `dy/dt` given the amplitude velocities.
    pub fn velocity(&self, t: f64, ar: Complex64, br: Complex64, dar: Complex64, dbr: Complex64) -> Complex64 {
        let look = amp_lookup(ar, br);
        self.harmonics
            .iter()
            .map(|(n, p, pa, pb)| {
                let e = Complex64::from_polar(1.0, *n as f64 * t);
                (pa.eval(&look) * dar + pb.eval(&look) * dbr + Complex64::new(0.0, *n as f64) * p.eval(&look)) * e
            })
            .sum()
    }
}

fn real_part(z: Complex64, t: f64) -> Result<f64, NumericError> {
    if z.im.abs() > 1e-10 * (1.0 + z.re.abs()) {
        return Err(NumericError::NotReal { t, residue: z.im.abs() });
    }
    Ok(z.re)
}

/// `y_RG(t)` along an amplitude trajectory, expansion kept through
/// `eps^order`.
pub fn evaluate_expansion(
    rg: &RGSystem,
    params: &ParamValues,
    eps: f64,
    amps: &AmplitudeTrajectory,
    order: usize,
) -> Result<Trajectory, NumericError> {
    let ex = NumericExpansion::new(rg, order, eps, params)?;
    let values = amps
        .t
        .iter()
        .zip(amps.ar.iter().zip(&amps.br))
        .map(|(&t, (&a, &b))| real_part(ex.value(t, a, b), t))
        .collect::<Result<Vec<_>, _>>()?;
    let mut meta = amps.meta.clone();
    meta.insert("expansion_order".into(), order.to_string());
    Ok(Trajectory { h: amps.h, t: amps.t.clone(), values, velocity: Vec::new(), diverged: amps.diverged, meta })
}

/// `(y(0), y'(0))` of the renormalized solution, using the RG flow at
/// `rg_order` for the amplitude velocities.
pub fn initial_state(
    rg: &RGSystem,
    params: &ParamValues,
    eps: f64,
    rg_order: usize,
    expansion_order: usize,
    init: (Complex64, Complex64),
) -> Result<(f64, f64), NumericError> {
    let [fa, fb] = rg_field(rg, rg_order, eps, params)?;
    let ex = NumericExpansion::new(rg, expansion_order, eps, params)?;
    let (a, b) = init;
    let look = amp_lookup(a, b);
    let y = real_part(ex.value(0.0, a, b), 0.0)?;
    let dy = real_part(ex.velocity(0.0, a, b, fa.eval(&look), fb.eval(&look)), 0.0)?;
    Ok((y, dy))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub max_diff: f64,
    pub rms: f64,
    pub csv: String,
}

/// Pointwise comparison on a shared grid; CSV `t,y_numeric,y_rg,diff`.
pub fn compare(numeric: &Trajectory, rg: &Trajectory) -> Result<Comparison, NumericError> {
    let n = numeric.len().min(rg.len());
    if numeric.h != rg.h || numeric.t[..n] != rg.t[..n] {
        return Err(NumericError::GridMismatch);
    }
    let mut csv = String::from("t,y_numeric,y_rg,diff\n");
    let (mut max_diff, mut sq) = (0.0f64, 0.0);
    for i in 0..n {
        let d = numeric.values[i] - rg.values[i];
        max_diff = max_diff.max(d.abs());
        sq += d * d;
        csv.push_str(&format!("{:.6},{:.12},{:.12},{:.12}\n", numeric.t[i], numeric.values[i], rg.values[i], d));
    }
    let rms = if n == 0 { 0.0 } else { (sq / n as f64).sqrt() };
    Ok(Comparison { max_diff, rms, csv })
}

/// gnuplot script plotting a comparison CSV.
pub fn gnuplot_script(csv_path: &str) -> String {
    format!(
        "set datafile separator ','\n\
         set key autotitle columnhead\n\
         set xlabel 't'\n\
         set ylabel 'y(t)'\n\
         plot '{csv_path}' using 1:2 with lines lc rgb 'blue', \\\n     '{csv_path}' using 1:3 with lines lc rgb 'red'\n"
    )
}

/// Indices of interior local maxima (`v[i-1] < v[i] >= v[i+1]`).
pub fn local_maxima(v: &[f64]) -> Vec<usize> {
    (1..v.len().saturating_sub(1)).filter(|&i| v[i - 1] < v[i] && v[i] >= v[i + 1]).collect()
}

/// Vertex of the parabola through three equally spaced samples.
pub fn refine_peak(left: f64, mid: f64, right: f64) -> f64 {
    let denom = left - 2.0 * mid + right;
    if denom == 0.0 {
        return mid;
    }
    let x = 0.5 * (left - right) / denom;
    mid - 0.25 * (left - right) * x
}

/// Mean of the parabola-refined maxima of `y` with `t >= after`.
pub fn peak_amplitude(traj: &Trajectory, after: f64) -> Option<f64> {
    let v = &traj.values;
    let peaks: Vec<f64> = local_maxima(v)
        .into_iter()
        .filter(|&i| traj.t[i] >= after)
        .map(|i| refine_peak(v[i - 1], v[i], v[i + 1]))
        .collect();
    (!peaks.is_empty()).then(|| peaks.iter().sum::<f64>() / peaks.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perturbation::expand;
    use crate::rg::derive_rg;

    fn harmonic() -> Potential {
        Potential::from_table_unchecked(BTreeMap::new(), vec![])
    }

    #[test]
    fn free_oscillator() {
        let tr = integrate_ode(&harmonic(), &ParamValues::new(), 0.3, -0.7, 0.0, 10.0, 1e-3).unwrap();
        let err = tr
            .t
            .iter()
            .zip(&tr.values)
            .map(|(t, y)| (y - (0.3 * t.cos() - 0.7 * t.sin())).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
        assert!(!tr.diverged);
    }

    #[test]
    fn fourth_order_convergence() {
        let err = |h: f64| {
            let tr = integrate_ode(&harmonic(), &ParamValues::new(), 1.0, 0.0, 0.0, 10.0, h).unwrap();
            (tr.values.last().unwrap() - tr.t.last().unwrap().cos()).abs()
        };
        let ratio = err(0.02) / err(0.01);
        assert!((ratio - 16.0).abs() < 1.0, "{ratio}");
    }

    #[test]
    fn energy_is_conserved_at_zero_eps() {
        let h = 0.05;
        let tr = integrate_ode(&harmonic(), &ParamValues::new(), 1.0, 0.5, 0.0, 50.0, h).unwrap();
        let e0 = 1.25;
        let drift = tr.values.iter().zip(&tr.velocity).map(|(y, v)| (y * y + v * v - e0).abs()).fold(0.0, f64::max);
        assert!(drift < h.powi(4) * 50.0, "{drift}");
    }

    #[test]
    fn complex_potential_is_rejected() {
        let v = Potential::parse("i*y^2", &[]).unwrap();
        assert!(matches!(
            integrate_ode(&v, &ParamValues::new(), 1.0, 0.0, 0.1, 1.0, 0.1),
            Err(NumericError::ComplexPotential { .. })
        ));
        let g = Potential::parse("g*y^2", &["g"]).unwrap();
        assert_eq!(
            integrate_ode(&g, &ParamValues::new(), 1.0, 0.0, 0.1, 1.0, 0.1),
            Err(NumericError::UnboundParam("g".into()))
        );
    }

    #[test]
    fn rg_fixed_point_and_leading_expansion() {
        let rg = derive_rg(&expand(&Potential::parse("(1 - y^2)*y'", &[]).unwrap(), 3).unwrap());
        let amps = integrate_rg(&rg, &ParamValues::new(), 0.1, 1, polar_initial(1.0, 0.3), 20.0, 0.01).unwrap();
        assert!(amps.radius().iter().all(|r| (r - 1.0).abs() < 1e-12));
        let y = evaluate_expansion(&rg, &ParamValues::new(), 0.1, &amps, 0).unwrap();
        for (i, t) in y.t.iter().enumerate() {
            let expect = 2.0 * amps.radius()[i] * (t + amps.theta()[i]).cos();
            assert!((y.values[i] - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn comparison_metrics() {
        let tr = integrate_ode(&harmonic(), &ParamValues::new(), 1.0, 0.0, 0.0, 1.0, 0.1).unwrap();
        let c = compare(&tr, &tr).unwrap();
        assert_eq!(c.max_diff, 0.0);
        assert!(c.csv.starts_with("t,y_numeric,y_rg,diff\n"));
        let other = integrate_ode(&harmonic(), &ParamValues::new(), 1.0, 0.0, 0.0, 1.0, 0.05).unwrap();
        assert_eq!(compare(&tr, &other), Err(NumericError::GridMismatch));
    }

    #[test]
    fn peaks() {
        assert_eq!(local_maxima(&[0.0, 1.0, 0.0, 2.0, 2.0, 1.0]), vec![1, 3]);
        let p = refine_peak(1.4f64.sin(), 1.5f64.sin(), 1.6f64.sin());
        assert!((p - 1.0).abs() < 1e-4, "{p}");
        assert!((refine_peak(-0.01, 0.0, -0.01) - 0.0).abs() < 1e-15);
    }
}
