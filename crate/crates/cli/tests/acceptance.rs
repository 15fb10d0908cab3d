//! Acceptance criteria 1-11, one PASS/FAIL line each.

use std::time::{Duration, Instant};

use rgseries::algebra::{
    fmt_rational, parse_expr, parse_series, render_series, roots_of, substitute, Bindings, EpsilonSeries, GaussianRational,
    Poly, RenderOptions, Var,
};
use rgseries::mathieu::{analyze, boundary_crosscheck, Branch};
use rgseries::numeric::{integrate_ode, peak_amplitude, ParamValues, DEFAULT_STEP};
use rgseries::verify::{random_potentials, run_suite};
use rgseries::{derive_rg, example, expand, limit_cycle, to_polar, Potential, EXAMPLES};
use serde_json::Value;

fn cli(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("rgseries").chain(args.iter().copied());
    let code = rgseries_cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap() + &String::from_utf8(err).unwrap())
}

/// Polynomial with the rendering alias `C = A B` expanded.
fn cell(text: &str) -> Poly {
    let (p, _) = parse_expr(text).unwrap_or_else(|e| panic!("{text}: {e:?}"));
    p.substitute_var(Var::param("C"), &(&Poly::var(Var::A) * &Poly::var(Var::B))).unwrap()
}

fn series(text: &str, cap: usize) -> EpsilonSeries {
    parse_series(text, cap).unwrap_or_else(|e| panic!("{text}: {e:?}"))
}

/// `None` when equal through `cap`, else the difference.
fn differs(ours: &EpsilonSeries, reference: &str, cap: usize) -> Option<String> {
    let d = &ours.truncate(cap) - &series(reference, cap);
    (!d.is_zero()).then(|| render_series(&d, RenderOptions::default()))
}

struct Report {
    failed: usize,
}

impl Report {
    fn line(&mut self, n: u32, title: &str, pass: bool, detail: impl AsRef<str>) {
        if !pass {
            self.failed += 1;
        }
        println!("{} {n:>2}. {title}: {}", if pass { "PASS" } else { "FAIL" }, detail.as_ref());
    }
}

fn ms(d: Duration) -> String {
    format!("{:.0} ms", d.as_secs_f64() * 1e3)
}

// Cells of the Van der Pol table, rows eps^0..eps^3, columns e^{it}..e^{7it}.
const TABLE: [[&str; 4]; 4] = [
    ["A", "0", "0", "0"],
    ["A*t/2*(1 - C)", "i*A^3/8", "0", "0"],
    [
        "A*t/16*(-2*i + 8*i*C - 7*i*C^2 + 2*t - 8*C*t + 6*C^2*t)",
        "-i*A^3/64*(-2*i - i*C - 12*t + 12*C*t)",
        "-5*A^5/192",
        "0",
    ],
    [
        "-A*t/384*(96*C - 210*C^2 + 111*C^3 + 24*i*t - 216*i*C*t + 444*i*C^2*t - 252*i*C^3*t - 8*t^2 + 104*C*t^2 - 216*C^2*t^2 + 120*C^3*t^2)",
        "A^3/512*(4*i - 42*i*C + 29*i*C^2 - 92*C*t + 104*C^2*t + 72*i*t^2 - 192*i*C*t^2 + 120*i*C^2*t^2)",
        "5*A^5/4608*(-14*i - 3*i*C - 60*t + 60*C*t)",
        "-7*i*A^7/1152",
    ],
];

fn criterion_1(r: &mut Report) {
    let start = Instant::now();
    let (code, text) = cli(&["expand", "--example", "vdp", "--order", "3", "--format", "table"]);
    let elapsed = start.elapsed();
    let rows: Vec<Vec<&str>> = text.lines().map(|l| l.split(" | ").collect()).collect();
    let mut bad = Vec::new();
    if code != 0 || rows.len() != 5 || rows[0][1..] != ["e^(1it)", "e^(3it)", "e^(5it)", "e^(7it)"] {
        bad.push(format!("unexpected layout (exit {code})"));
    } else {
        for (k, ref_row) in TABLE.iter().enumerate() {
            for (j, reference) in ref_row.iter().enumerate() {
                if cell(rows[k + 1][j + 1]) != cell(reference) {
                    bad.push(format!("y{k} e^({}it)", 2 * j + 1));
                }
            }
        }
    }
    let pass = bad.is_empty() && elapsed < Duration::from_secs(1);
    r.line(1, "Van der Pol naive table", pass, format!("16 cells exact, mismatches {bad:?}, {}", ms(elapsed)));
}

fn vdp() -> Potential {
    example("vdp").unwrap().potential()
}

fn criterion_2(r: &mut Report) {
    let y = expand(&vdp(), 3).unwrap();
    let reference = "-5*A^5*eps^2/192 + 5*A^5*eps^3/4608*(-14*i - 3*i*C - 60*t + 60*C*t)";
    let ab = &Poly::var(Var::A) * &Poly::var(Var::B);
    let reference = series(reference, 3).map(|p| p.substitute_var(Var::param("C"), &ab).unwrap());
    let ours = y.secular_coefficient(5);
    r.line(2, "P_5 series", ours == reference, format!("P_5 = {}", render_series(&ours, RenderOptions::default())));
}

const VDP_DLOGR: &str = "eps*(1-R^2)/2 - eps^3*R^2*(32-70*R^2+37*R^4)/128 + eps^5*R^4*(-1980+8154*R^2-10757*R^4+4589*R^6)/36864 - eps^7*R^4/21233664*(2950992 - 16173432*R^2 + 28047688*R^4 - 14916436*R^6 - 4396557*R^8 + 4493323*R^10)";
/// The reference series with the `eps^6 R^6` coefficient left as the unknown `X`.
const VDP_DTHETA_X: &str = "eps^2*(-2+8*R^2-7*R^4)/16 + eps^4*(-24-192*R^2+1020*R^4-1266*R^6+497*R^8)/3072 + eps^6/1769472*(-1728-6912*R^2+181872*R^4-X*R^6+121432*R^8+417540*R^10-266949*R^12)";
const VDP_2RC: &str = "2 + eps^2/64 - 23*eps^4/49152 - 51619*eps^6/169869312";
const VDP_RATE_C: &str = "-eps^2/16 + 17*eps^4/3072 + 35*eps^6/884736";

/// The `eps^6 R^6` coefficient of d theta/dt implied by the reference
/// `(d theta/dt)_c` and `2R_c`, using nothing but reference values.
fn forced_dtheta_coefficient() -> String {
    let x = Var::param("X");
    let disp = series(VDP_DTHETA_X, 6);
    let rc = series(VDP_2RC, 6).scale(&Poly::constant(GaussianRational::ratio(1, 2)));
    let mut b = Bindings::new();
    b.insert(Var::R, rc);
    let at_cycle = substitute(&disp, &b).unwrap();
    let eq = at_cycle.coeff(6) - series(VDP_RATE_C, 6).coeff(6);
    let roots = roots_of(&eq, x).unwrap();
    assert_eq!(roots.len(), 1);
    fmt_rational(&roots[0].0)
}

fn criterion_3(r: &mut Report) {
    let start = Instant::now();
    let p = to_polar(&derive_rg(&expand(&vdp(), 8).unwrap())).unwrap();
    let elapsed = start.elapsed();
    let dl = differs(p.dlog_r(), VDP_DLOGR, 7);
    let as_listed = series(&VDP_DTHETA_X.replace('X', "455608"), 6);
    let forced = forced_dtheta_coefficient();
    let corrected = series(&VDP_DTHETA_X.replace('X', &forced), 6);
    let ours = p.dtheta().truncate(6);
    let vs_reference = &ours - &as_listed;
    let only_typo = vs_reference.coeff(6).len() == 1
        && vs_reference.coeffs()[..6].iter().all(Poly::is_zero)
        && vs_reference.coeff(6).terms().all(|(m, _)| m.exp(Var::R) == 6);
    let pass = dl.is_none() && ours == corrected && only_typo && elapsed < Duration::from_secs(60);
    r.line(
        3,
        "Van der Pol RG series",
        pass,
        format!(
            "dlogR/dt exact through eps^7; dtheta/dt exact through eps^6 except the reference eps^6*R^6 coefficient \
             -455608/1769472, which the reference (dtheta/dt)_c forces to -{forced}/1769472 (ours); K=8 in {}",
            ms(elapsed)
        ),
    );
}

fn criterion_4(r: &mut Report) {
    let (code, text) = cli(&["limit-cycle", "--example", "vdp", "--order", "7"]);
    let get = |key: &str| {
        text.lines().find_map(|l| l.strip_prefix(key)).map(|rest| series(rest, 0)).unwrap_or_else(|| EpsilonSeries::zero(0))
    };
    let (rc, rate) = (get("2R_c = "), get("(dtheta/dt)_c = "));
    let ok = code == 0 && rc.cap() >= 6 && rate.cap() >= 6;
    let d1 = differs(&rc, VDP_2RC, 6);
    let d2 = differs(&rate, VDP_RATE_C, 6);
    let direct = limit_cycle(&to_polar(&derive_rg(&expand(&vdp(), 8).unwrap())).unwrap()).unwrap();
    let same = direct.radius.scale(&Poly::constant(GaussianRational::from_int(2))).truncate(6) == rc.truncate(6);
    r.line(4, "Limit cycle", ok && d1.is_none() && d2.is_none() && same, format!("2R_c and (dtheta/dt)_c exact through eps^6 (diffs {d1:?} {d2:?})"));
}

const OMEGA2: &str = "eps^2*g1^2/4 - eps^3/24*g1*(8 + 3*g1^2 - 12*g2) - eps^4/576*(80 - 400*g1^2 - 45*g1^4 + 192*g2 + 216*g1^2*g2 - 144*g2^2 - 288*g1*g3) - eps^5/3456*(-840*g1 + 3920*g1^3 + 189*g1^5 - 4800*g1*g2 - 1080*g1^3*g2 + 1296*g1*g2^2 + 1152*g3 + 1296*g1^2*g3 - 1728*g2*g3 - 1728*g1*g4)";

fn scalar_square(m: &[[EpsilonSeries; 2]; 2]) -> bool {
    let sq = |i: usize, j: usize| &(&m[i][0] * &m[0][j]) + &(&m[i][1] * &m[1][j]);
    sq(0, 1).is_zero() && sq(1, 0).is_zero() && sq(0, 0) == sq(1, 1)
}

fn criterion_5(r: &mut Report) {
    let at5 = analyze(5).unwrap();
    let w = differs(&at5.omega2, OMEGA2, 5);
    let at6 = analyze(6).unwrap();
    let minus = at6.branch("-").map(|b| differs(&b.a, "1 - eps^2/3 + 5*eps^4/216", 4));
    let plus = at6.branch("+").map(|b| differs(&b.a, "1 + 5*eps^2/3 - 763*eps^4/216", 4));
    let scalar = scalar_square(&at5.matrix) && scalar_square(&at6.matrix);
    let pass = w.is_none() && minus == Some(None) && plus == Some(None) && scalar && at5.params.len() == 4;
    r.line(5, "Mathieu omega^2 and a+-", pass, format!("omega^2 exact through eps^5 in g1..g4, a+- exact through eps^4, M^2 scalar: {scalar}"));
}

fn criterion_6(r: &mut Report) {
    let an = analyze(8).unwrap();
    let rows = boundary_crosscheck(&an.branches, &[0.1], 12).unwrap();
    let worst = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
    // For reference: the same check with the series cut at eps^4.
    let cut = |b: &Branch| Branch { a: b.a.truncate(4), ..b.clone() };
    let short: Vec<Branch> = an.branches.iter().map(cut).collect();
    let short_rows = boundary_crosscheck(&short, &[0.1], 12).unwrap();
    let detail = rows
        .iter()
        .zip(&short_rows)
        .map(|(x, s)| format!("a{}: det {:.10}, series {:.10}, dev {:.2e} (eps^4 cut: {:.2e})", x.branch, x.a_determinant, x.a_series, x.deviation, s.deviation))
        .collect::<Vec<_>>()
        .join("; ");
    r.line(6, "Hill-determinant cross-check (eps=0.1, N=12, series through eps^6)", worst < 1e-5 && rows.len() == 2, detail);
}

const DUFF_DLOGR: &str = "-eps/2 + 3*eps^2*R^2/4 - 195*eps^3*R^4/64 + 5931*eps^4*R^6/512 + eps^5*R^4*(16092-172027*R^4)/4096";
const DUFF_DTHETA: &str = "3*eps*R^2/2 - eps^2*(2+15*R^4)/16 - 3*eps^3*R^2*(8-41*R^4)/128 + eps^4*(-8+4116*R^4-921*R^8)/1024 - 3*eps^5*R^2*(8+21305*R^4-193*R^8)/2048";
const DUFF_Y: &str = "2*R*cos(tau) + eps*R^3/4*cos(3tau) + eps^2*R^3/32*(6*sin(3tau) + R^2*(cos(5tau) - 21*cos(3tau))) + eps^3*R^3/768*(-36*cos(3tau) - 2*R^2*(567*sin(3tau) - 19*sin(5tau)) + 3*R^4*(417*cos(3tau) - 43*cos(5tau) + cos(7tau)))";
const RAY_DLOGR: &str = "eps*(1-R^2)/2 + eps^3*R^4*(22-13*R^2)/128 - eps^5*R^4*(2268-1026*R^2-2683*R^4+1603*R^6)/36864";
const RAY_DTHETA: &str = "eps^2*(R^4-2)/16 + eps^4*(-24+156*R^4-234*R^6+65*R^8)/3072 + eps^6*(-1728-98064*R^4+305208*R^6-210728*R^8-71388*R^10+84627*R^12)/1769472";
const RAY_Y: &str = "2*R*cos(tau) + eps*R^3/12*sin(3tau) + eps^2*R^3/96*(-6*cos(3tau) + R^2*(9*cos(3tau) - cos(5tau))) + eps^3*R^3/2304*(-36*sin(3tau) - 2*R^2*(63*sin(3tau) + 17*sin(5tau)) + R^4*(111*sin(3tau) + 51*sin(5tau) - 4*sin(7tau)))";
const VDP_Y: &str = "2*R*cos(tau) - eps*R^3/4*sin(3tau) - eps^2*R^3/96*(6*cos(3tau) + R^2*(3*cos(3tau) + 5*cos(5tau))) - eps^3*R^3/2304*(36*sin(3tau) - 14*R^2*(27*sin(3tau) + 5*sin(5tau)) + R^4*(261*sin(3tau) - 15*sin(5tau) - 28*sin(7tau)))";

fn criterion_7(r: &mut Report) {
    let duff = example("duffing").unwrap().potential().bind("g", &GaussianRational::one()).unwrap();
    let pd = to_polar(&derive_rg(&expand(&duff, 5).unwrap())).unwrap();
    let ray = example("rayleigh").unwrap().potential();
    let pr = to_polar(&derive_rg(&expand(&ray, 6).unwrap())).unwrap();
    let pv = to_polar(&derive_rg(&expand(&vdp(), 3).unwrap())).unwrap();
    let checks = [
        ("duffing dlogR/dt (eps^5)", differs(pd.dlog_r(), DUFF_DLOGR, 5)),
        ("duffing dtheta/dt (eps^5)", differs(pd.dtheta(), DUFF_DTHETA, 5)),
        ("duffing y (eps^3)", differs(pd.expansion(), DUFF_Y, 3)),
        ("rayleigh dlogR/dt (eps^6)", differs(pr.dlog_r(), RAY_DLOGR, 6)),
        ("rayleigh dtheta/dt (eps^6)", differs(pr.dtheta(), RAY_DTHETA, 6)),
        ("rayleigh y (eps^3)", differs(pr.expansion(), RAY_Y, 3)),
        ("van der pol y (eps^3)", differs(pv.expansion(), VDP_Y, 3)),
    ];
    let bad: Vec<_> = checks.iter().filter(|c| c.1.is_some()).map(|c| c.0).collect();
    let names: Vec<_> = checks.iter().map(|c| c.0).collect();
    r.line(7, "Duffing (g=1) and Rayleigh series", bad.is_empty(), format!("exact: {}; mismatches {bad:?}", names.join(", ")));
}

const GS: &str = "2*R*cos(theta+t) + 1/4*eps*R^2*sin(2theta+3t) - eps^2*R^3/24*(3*cos(theta)*cos(2theta+3t) + cos(3theta+5t)) + eps^3*R^4/4608*(-24*sin(2theta+3t) - 33*sin(4theta+7t) + 14*sin(theta)*cos(3theta+5t) + 72*sin(2theta)*cos(2theta+3t) + 288*cos(2theta)*sin(2theta+3t) - 146*cos(theta)*sin(3theta+5t))";
const RAG1: &str = "1/2*eps*R*cos(theta) - 1/4*eps^2*R^2*sin(2theta) + 5/16*eps^3*R^3*cos(theta) - eps^4*R^4*(21/64*sin(2theta) + 1/32*sin(4theta))";
const RAG2: &str = "1/2*eps*R*sin(theta) - eps^2*R^2*(1/4*cos(2theta) + 3/8) + 1/8*eps^3*R^3*sin(theta) + 1/128*eps^4*R^4*(9*cos(2theta) - 4*cos(4theta) - 3)";

fn criterion_8(r: &mut Report) {
    let p = to_polar(&derive_rg(&expand(&example("nonauto").unwrap().potential(), 4).unwrap())).unwrap();
    let d = [differs(p.expansion(), GS, 3), differs(p.dlog_r(), RAG1, 4), differs(p.dtheta(), RAG2, 4)];
    r.line(8, "Nonautonomous example", d.iter().all(Option::is_none), format!("renormalized y through eps^3, dlogR/dt and dtheta/dt through eps^4 (diffs {d:?})"));
}

fn criterion_9(r: &mut Report) {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut count = 0;
    for e in &EXAMPLES {
        for rep in run_suite(&expand(&e.potential(), 4).unwrap()) {
            count += 1;
            if !rep.passed() {
                failures.push(format!("{}: {rep}", e.name));
            }
        }
    }
    let seeds = random_potentials(20240101, 20);
    for (seed, v) in &seeds {
        for rep in run_suite(&expand(v, 3).unwrap()) {
            count += 1;
            if !rep.passed() {
                failures.push(format!("seed {seed}: {rep}"));
            }
        }
    }
    let elapsed = start.elapsed();
    r.line(
        9,
        "Identity suite",
        failures.is_empty() && elapsed < Duration::from_secs(120),
        format!("{count} checks (5 examples at K=4, seeds 20240101..20240120 at K=3), failures {failures:?}, {}", ms(elapsed)),
    );
}

fn criterion_10(r: &mut Report) {
    let start = Instant::now();
    let run = |j: &str| {
        let args = ["compare", "--example", "nonauto", "--eps", "0.25", "--R0", "0.2", "--theta0", "-0.1"];
        let (code, text) = cli(&[&args[..], &["--rg-order", j, "--expansion-order", "1", "--format", "json"]].concat());
        assert_eq!(code, 0, "{text}");
        let v: Value = serde_json::from_str(&text).unwrap();
        (v["max_diff"].as_f64().unwrap(), v["envelope_maxima"].as_u64().unwrap(), v["diverged"].as_bool().unwrap())
    };
    let (d1, peaks1, div1) = run("1");
    let (d2, peaks2, div2) = run("2");
    let elapsed = start.elapsed();
    let pass = d1 > 0.0 && d2 < d1 / 2.0 && peaks1 == 1 && peaks2 == 1 && !div1 && !div2 && elapsed < Duration::from_secs(5);
    r.line(
        10,
        "Nonautonomous RG vs RK4",
        pass,
        format!("D1 = {d1:.4}, D2 = {d2:.4} (ratio {:.3}), envelope maxima {peaks1}/{peaks2}, t_max = 25*2pi, {}", d2 / d1, ms(elapsed)),
    );
}

fn criterion_11(r: &mut Report) {
    let eps = 0.1f64;
    let tr = integrate_ode(&vdp(), &ParamValues::new(), 2.0, 0.0, eps, 2000.0, DEFAULT_STEP).unwrap();
    let peak = peak_amplitude(&tr, 1500.0).unwrap_or(f64::NAN);
    let two_rc: f64 = series(VDP_2RC, 6)
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| c.as_constant().unwrap().to_complex64().re * eps.powi(k as i32))
        .sum();
    let err = |h: f64| {
        let t = integrate_ode(&vdp(), &ParamValues::new(), 1.0, 0.0, 0.0, 10.0, h).unwrap();
        (t.values.last().unwrap() - t.t.last().unwrap().cos()).abs()
    };
    let ratio = err(0.02) / err(0.01);
    let pass = (peak - two_rc).abs() < 1e-3 && (ratio - 16.0).abs() < 1.0;
    r.line(
        11,
        "Numeric sanity",
        pass,
        format!("VdP peak {peak:.6} vs 2R_c {two_rc:.6} (|diff| {:.1e}); RK4 ratio {ratio:.3}", (peak - two_rc).abs()),
    );
}

fn main() {
    let mut r = Report { failed: 0 };
    criterion_1(&mut r);
    criterion_2(&mut r);
    criterion_3(&mut r);
    criterion_4(&mut r);
    criterion_5(&mut r);
    criterion_6(&mut r);
    criterion_7(&mut r);
    criterion_8(&mut r);
    criterion_9(&mut r);
    criterion_10(&mut r);
    criterion_11(&mut r);
    if r.failed > 0 {
        eprintln!("{} criteria failed", r.failed);
        std::process::exit(1);
    }
}
