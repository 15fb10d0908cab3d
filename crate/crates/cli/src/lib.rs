//! The `rgseries` command line.

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use rgseries::algebra::{parse_rational, render_poly, render_series, series_to_json, EpsilonSeries, GaussianRational, RenderOptions};
use rgseries::mathieu::{analyze, boundary_crosscheck, crosscheck_csv, max_deviation};
use rgseries::numeric::{
    compare, evaluate_expansion, gnuplot_script, initial_state, integrate_ode, integrate_rg, local_maxima, polar_initial,
    ParamValues, DEFAULT_STEP, DEFAULT_T_MAX,
};
use rgseries::rg::{render_trig_series, renormalization_constants};
use rgseries::verify::{random_potentials, run_suite, IdentityReport};
use rgseries::{derive_rg, example, expand, limit_cycle, to_polar, Potential, EXAMPLES};

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "rgseries", version, about = "Exact RG perturbation series for weakly perturbed oscillators")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Truncation order K (series kept through eps^K).
    #[arg(long, global = true)]
    order: Option<usize>,
    /// Potential V in the DSL, e.g. "(1 - y^2)*y'".
    #[arg(long, global = true, allow_hyphen_values = true)]
    potential: Option<String>,
    /// Comma-separated parameter names used by --potential.
    #[arg(long, global = true, value_delimiter = ',')]
    params: Vec<String>,
    /// Bind a parameter to a rational or decimal value, e.g. g=1.
    #[arg(long, global = true)]
    bind: Vec<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Built-in example (see `examples`).
    #[arg(long, global = true)]
    example: Option<String>,
    /// Report on stderr whether C_{k,l,m,n} = conj(C_{-k,l,m,n}) holds.
    #[arg(long, global = true)]
    check_real: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Json,
    Csv,
    Table,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Naive series: the harmonic coefficients P_n.
    Expand,
    /// RG equation and renormalized expansion.
    Rg {
        /// Also print the renormalization constants Z_a, Z_b.
        #[arg(long)]
        constants: bool,
    },
    /// Polar form d log R/dt, d theta/dt and the expansion in R, theta, t.
    Polar,
    /// Limit-cycle radius and phase drift.
    LimitCycle,
    /// Mathieu boundaries a+- and the determinant cross-check.
    Mathieu {
        /// Only this branch (+ or -).
        #[arg(long, allow_hyphen_values = true)]
        branch: Option<String>,
        /// e.g. eps=0.05,0.1,0.2,N=12
        #[arg(long)]
        crosscheck: Option<String>,
    },
    /// Identity checks; exit code 1 on any failure.
    Verify {
        /// Random in-class potentials to add when no potential is selected.
        #[arg(long, default_value_t = 20)]
        random: usize,
        #[arg(long, default_value_t = 20240101)]
        seed: u64,
        /// Order for the random potentials.
        #[arg(long, default_value_t = 3)]
        random_order: usize,
    },
    /// RK4 solution of the oscillator.
    Simulate(NumArgs),
    /// RK4 solution against the renormalized expansion.
    Compare(NumArgs),
    /// List built-in examples.
    Examples,
}

#[derive(Args, Debug, Clone)]
struct NumArgs {
    #[arg(long, allow_hyphen_values = true)]
    eps: f64,
    #[arg(long)]
    tmax: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long, default_value_t = 1)]
    rg_order: usize,
    #[arg(long, default_value_t = 1)]
    expansion_order: usize,
    #[arg(long = "R0")]
    r0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    theta0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    y0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    dy0: Option<f64>,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    out: Option<String>,
    /// Write a gnuplot script for the CSV.
    #[arg(long)]
    gnuplot: Option<String>,
}

enum Failure {
    Usage(String),
    Failed(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Failed(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    if cli.global.check_real {
        if let Ok(Some(sel)) = select(&cli.global) {
            let verdict = if sel.potential.is_real() { "holds" } else { "fails" };
            let _ = writeln!(err, "reality condition for {}: {verdict}", sel.label);
        }
    }
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Failed(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_FAILED
        }
    }
}

/// Exact value of `3`, `-1/2` or `0.25`.
fn parse_value(s: &str) -> Option<GaussianRational> {
    let s = s.trim();
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let scale = 10i64.checked_pow(frac.len() as u32)?;
        let digits = format!("{int}{frac}");
        let num = parse_rational(&digits).ok()?;
        return Some(GaussianRational::real(num / parse_rational(&scale.to_string()).ok()?));
    }
    parse_rational(s).ok().map(GaussianRational::real)
}

struct Selected {
    label: String,
    potential: Potential,
    default_order: usize,
}

fn select(g: &Global) -> Result<Option<Selected>, Failure> {
    let (label, mut v, default_order) = match (&g.example, &g.potential) {
        (Some(_), Some(_)) => return Err(usage("--example and --potential are exclusive")),
        (Some(name), None) => {
            let e = example(name).ok_or_else(|| {
                usage(format!(
                    "unknown example `{name}` (have {})",
                    EXAMPLES.iter().map(|e| e.name).collect::<Vec<_>>().join(", ")
                ))
            })?;
            (e.name.to_string(), e.potential(), e.cap)
        }
        (None, Some(text)) => {
            let params: Vec<&str> = g.params.iter().map(String::as_str).collect();
            let v = Potential::parse(text, &params).map_err(|e| usage(format!("potential: {e}")))?;
            (text.clone(), v, 3)
        }
        (None, None) => return Ok(None),
    };
    for b in &g.bind {
        let (name, value) = b.split_once('=').ok_or_else(|| usage(format!("--bind expects name=value, got `{b}`")))?;
        let value = parse_value(value).ok_or_else(|| usage(format!("--bind: bad value `{value}`")))?;
        if !v.params().iter().any(|p| p == name.trim()) {
            return Err(usage(format!("--bind: unknown parameter `{}`", name.trim())));
        }
        v = v.bind(name.trim(), &value).map_err(|e| usage(e.to_string()))?;
    }
    Ok(Some(Selected { label, potential: v, default_order }))
}

fn require(g: &Global) -> Result<Selected, Failure> {
    select(g)?.ok_or_else(|| usage("select a potential with --example or --potential"))
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize") + "\n"
}

fn series_text(s: &EpsilonSeries) -> String {
    render_series(s, RenderOptions::default())
}

/// `name,order,coefficient` rows.
fn series_csv(rows: &mut String, name: &str, s: &EpsilonSeries) {
    for (k, c) in s.coeffs().iter().enumerate() {
        if !c.is_zero() {
            rows.push_str(&format!("{name},{k},{}\n", render_poly(c, RenderOptions::default())));
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    let g = &cli.global;
    let text = match &cli.command {
        Command::Examples => match g.format {
            Format::Json => pretty(&Value::Array(
                EXAMPLES
                    .iter()
                    .map(|e| json!({"name": e.name, "potential": e.dsl, "params": e.params, "order": e.cap, "summary": e.summary}))
                    .collect(),
            )),
            _ => EXAMPLES
                .iter()
                .map(|e| {
                    let params = if e.params.is_empty() { String::new() } else { format!(" [{}]", e.params.join(",")) };
                    format!("{:<9} V = {}{}  ({})\n", e.name, e.dsl, params, e.summary)
                })
                .collect(),
        },
        Command::Expand => {
            let sel = require(g)?;
            let y = expand(&sel.potential, g.order.unwrap_or(sel.default_order))?;
            match g.format {
                Format::Table => y.to_table(&y.table_columns()),
                Format::Json => pretty(&y.to_json()),
                Format::Csv => {
                    let mut s = String::from("n,k,f\n");
                    for n in y.support() {
                        for k in 0..=y.cap() {
                            let f = y.f(n, k);
                            if !f.is_zero() {
                                s.push_str(&format!("{n},{k},{}\n", render_poly(&f, RenderOptions::default())));
                            }
                        }
                    }
                    s
                }
                Format::Text => y
                    .support()
                    .into_iter()
                    .map(|n| format!("P_{n} = {}\n", series_text(&y.secular_coefficient(n))))
                    .collect(),
            }
        }
        Command::Rg { constants } => {
            let sel = require(g)?;
            let y = expand(&sel.potential, g.order.unwrap_or(sel.default_order))?;
            let rg = derive_rg(&y);
            let z = if *constants { Some(renormalization_constants(&y)?) } else { None };
            match g.format {
                Format::Json => {
                    let mut v = rg.to_json();
                    if let Some((za, zb)) = &z {
                        v["Z_a"] = series_to_json(za);
                        v["Z_b"] = series_to_json(zb);
                    }
                    pretty(&v)
                }
                Format::Csv => {
                    let mut s = String::from("series,order,coefficient\n");
                    series_csv(&mut s, "dAr/dt", rg.rhs_a());
                    series_csv(&mut s, "dBr/dt", rg.rhs_b());
                    for (n, p) in rg.expansion() {
                        series_csv(&mut s, &format!("P_{n}"), p);
                    }
                    s
                }
                _ => {
                    let mut s = format!("dAr/dt = {}\ndBr/dt = {}\n", series_text(rg.rhs_a()), series_text(rg.rhs_b()));
                    for (n, p) in rg.expansion() {
                        s.push_str(&format!("P_{n}(eps,0,Ar,Br) = {}\n", series_text(p)));
                    }
                    if let Some((za, zb)) = &z {
                        s.push_str(&format!("Z_a = {}\nZ_b = {}\n", series_text(za), series_text(zb)));
                    }
                    s
                }
            }
        }
        Command::Polar => {
            let sel = require(g)?;
            let p = to_polar(&derive_rg(&expand(&sel.potential, g.order.unwrap_or(sel.default_order))?))?;
            match g.format {
                Format::Json => pretty(&p.to_json()),
                Format::Csv => {
                    let mut s = String::from("series,order,coefficient\n");
                    series_csv(&mut s, "dlogR/dt", p.dlog_r());
                    series_csv(&mut s, "dtheta/dt", p.dtheta());
                    series_csv(&mut s, "y", p.expansion());
                    s
                }
                _ => format!(
                    "dlogR/dt = {}\ndtheta/dt = {}\ny = {}\n",
                    render_trig_series(p.dlog_r()),
                    render_trig_series(p.dtheta()),
                    render_trig_series(p.expansion())
                ),
            }
        }
        Command::LimitCycle => {
            let sel = require(g)?;
            let p = to_polar(&derive_rg(&expand(&sel.potential, g.order.unwrap_or(7))?))?;
            let c = limit_cycle(&p)?;
            let two_r = c.radius.scale(&rgseries::Poly::constant(GaussianRational::from_int(2)));
            match g.format {
                Format::Json => pretty(&json!({
                    "R_c": series_to_json(&c.radius),
                    "2R_c": series_to_json(&two_r),
                    "dtheta_dt_c": series_to_json(&c.phase_rate),
                })),
                Format::Csv => {
                    let mut s = String::from("series,order,coefficient\n");
                    series_csv(&mut s, "2R_c", &two_r);
                    series_csv(&mut s, "(dtheta/dt)_c", &c.phase_rate);
                    s
                }
                _ => format!("2R_c = {}\n(dtheta/dt)_c = {}\n", series_text(&two_r), series_text(&c.phase_rate)),
            }
        }
        Command::Mathieu { branch, crosscheck } => {
            if g.example.as_deref().is_some_and(|e| e != "mathieu") || g.potential.is_some() {
                return Err(usage("mathieu uses its own potential; drop --example/--potential"));
            }
            if let Some(b) = branch {
                if b != "+" && b != "-" {
                    return Err(usage("--branch is + or -"));
                }
            }
            let an = analyze(g.order.unwrap_or(6))?;
            let branches: Vec<_> =
                an.branches.iter().filter(|b| branch.as_ref().is_none_or(|want| &b.label == want)).cloned().collect();
            if let Some(spec) = crosscheck {
                let (eps, n) = parse_crosscheck(spec)?;
                let rows = boundary_crosscheck(&branches, &eps, n)?;
                match g.format {
                    Format::Json => pretty(&json!({
                        "N": n,
                        "max_deviation": max_deviation(&rows),
                        "rows": rows.iter().map(|r| json!({
                            "eps": r.eps, "branch": r.branch.to_string(), "a_series": r.a_series,
                            "a_determinant": r.a_determinant, "deviation": r.deviation,
                        })).collect::<Vec<_>>(),
                    })),
                    _ => crosscheck_csv(&rows),
                }
            } else {
                match g.format {
                    Format::Json => pretty(&json!({
                        "cap": an.cap,
                        "params": an.params,
                        "M": an.matrix.iter().map(|r| r.iter().map(series_to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
                        "omega2": series_to_json(&an.omega2),
                        "branches": branches.iter().map(|b| json!({
                            "label": b.label,
                            "g": b.g_values.iter().map(rgseries::algebra::fmt_rational).collect::<Vec<_>>(),
                            "a": series_to_json(&b.a),
                        })).collect::<Vec<_>>(),
                    })),
                    Format::Csv => {
                        let mut s = String::from("series,order,coefficient\n");
                        series_csv(&mut s, "omega^2", &an.omega2);
                        for b in &branches {
                            series_csv(&mut s, &format!("a{}", b.label), &b.a);
                        }
                        s
                    }
                    _ => {
                        let mut s = String::new();
                        for (i, row) in an.matrix.iter().enumerate() {
                            for (j, m) in row.iter().enumerate() {
                                s.push_str(&format!("M{}{} = {}\n", i + 1, j + 1, series_text(m)));
                            }
                        }
                        s.push_str(&format!("omega^2 = {}\n", series_text(&an.omega2)));
                        for b in &branches {
                            s.push_str(&format!("a{} = {}\n", b.label, series_text(&b.a)));
                        }
                        s
                    }
                }
            }
        }
        Command::Verify { random, seed, random_order } => {
            let mut jobs: Vec<(String, Potential, usize)> = Vec::new();
            match select(g)? {
                Some(sel) => jobs.push((sel.label, sel.potential, g.order.unwrap_or(4))),
                None => {
                    for e in &EXAMPLES {
                        jobs.push((e.name.to_string(), e.potential(), g.order.unwrap_or(4)));
                    }
                    for (s, v) in random_potentials(*seed, *random) {
                        jobs.push((format!("random#{s}"), v, *random_order));
                    }
                }
            }
            let mut results: Vec<(String, Vec<IdentityReport>)> = Vec::new();
            for (label, v, k) in jobs {
                results.push((label, run_suite(&expand(&v, k)?)));
            }
            let ok = results.iter().all(|(_, r)| r.iter().all(IdentityReport::passed));
            let text = match g.format {
                Format::Json => pretty(&json!({
                    "pass": ok,
                    "results": results.iter().map(|(l, r)| json!({
                        "potential": l, "reports": r.iter().map(IdentityReport::to_json).collect::<Vec<_>>(),
                    })).collect::<Vec<_>>(),
                })),
                _ => {
                    let mut s = String::new();
                    for (label, reports) in &results {
                        for r in reports {
                            s.push_str(&format!("{label:<20} {r}\n"));
                        }
                    }
                    s.push_str(if ok { "all identities hold\n" } else { "IDENTITY FAILURE\n" });
                    s
                }
            };
            out.write_all(text.as_bytes())?;
            return Ok(if ok { EXIT_OK } else { EXIT_FAILED });
        }
        Command::Simulate(a) => simulate(g, a, false)?,
        Command::Compare(a) => simulate(g, a, true)?,
    };
    out.write_all(text.as_bytes())?;
    Ok(EXIT_OK)
}

fn parse_crosscheck(spec: &str) -> Result<(Vec<f64>, usize), Failure> {
    let mut eps = Vec::new();
    let mut n = 12;
    for tok in spec.split(',').map(str::trim) {
        let bad = || usage(format!("--crosscheck: cannot read `{tok}`"));
        if let Some(v) = tok.strip_prefix("eps=") {
            eps.push(v.parse().map_err(|_| bad())?);
        } else if let Some(v) = tok.strip_prefix("N=") {
            n = v.parse().map_err(|_| bad())?;
        } else {
            eps.push(tok.parse().map_err(|_| bad())?);
        }
    }
    if eps.is_empty() {
        return Err(usage("--crosscheck needs at least one eps value"));
    }
    if n < 3 {
        return Err(usage("--crosscheck needs N >= 3"));
    }
    Ok((eps, n))
}

fn simulate(g: &Global, a: &NumArgs, with_rg: bool) -> Result<String, Failure> {
    let sel = require(g)?;
    if let Some(p) = sel.potential.params().first() {
        return Err(usage(format!("parameter `{p}` must be bound with --bind for numerics")));
    }
    let params = ParamValues::new();
    let (t_max, h) = (a.tmax.unwrap_or(DEFAULT_T_MAX), a.dt.unwrap_or(DEFAULT_STEP));
    let cap = g.order.unwrap_or(a.rg_order.max(a.expansion_order));
    if cap < a.rg_order.max(a.expansion_order) {
        return Err(usage("--order must cover --rg-order and --expansion-order"));
    }
    let polar = match (a.r0, a.theta0) {
        (Some(r), th) => Some((r, th.unwrap_or(0.0))),
        (None, Some(_)) => return Err(usage("--theta0 needs --R0")),
        (None, None) => None,
    };
    if polar.is_some() && (a.y0.is_some() || a.dy0.is_some()) {
        return Err(usage("give either --R0/--theta0 or --y0/--dy0"));
    }
    let needs_rg = with_rg || polar.is_some();
    let rg = if needs_rg { Some(derive_rg(&expand(&sel.potential, cap)?)) } else { None };
    // Amplitudes at t = 0: from (R0, theta0), or the leading-order inversion
    // of (y0, dy0) = (A + B, i(A - B)).
    let (init, y0, dy0) = match polar {
        Some((r, th)) => {
            let init = polar_initial(r, th);
            let (y0, dy0) =
                initial_state(rg.as_ref().expect("built"), &params, a.eps, a.rg_order, a.expansion_order, init)?;
            (init, y0, dy0)
        }
        None => {
            let (y0, dy0) = (a.y0.unwrap_or(1.0), a.dy0.unwrap_or(0.0));
            let ar = Complex64::new(y0 / 2.0, -dy0 / 2.0);
            ((ar, ar.conj()), y0, dy0)
        }
    };
    let num = integrate_ode(&sel.potential, &params, y0, dy0, a.eps, t_max, h)?;
    let mut summary = format!(
        "potential: {}\neps = {}, t_max = {t_max}, h = {h}, y0 = {y0}, dy0 = {dy0}\nnumeric: {} samples{}\n",
        sel.label,
        a.eps,
        num.len(),
        if num.diverged { " (diverged, truncated)" } else { "" }
    );
    let (csv, json_v) = if with_rg {
        let rg = rg.as_ref().expect("built");
        let amps = integrate_rg(rg, &params, a.eps, a.rg_order, init, t_max, h)?;
        let y_rg = evaluate_expansion(rg, &params, a.eps, &amps, a.expansion_order)?;
        let c = compare(&num, &y_rg)?;
        let envelope_peaks = local_maxima(&amps.radius()).len();
        summary.push_str(&format!(
            "rg order {}, expansion order {}{}\nmax |diff| = {:.6e}\nrms diff = {:.6e}\nenvelope maxima = {envelope_peaks}\n",
            a.rg_order,
            a.expansion_order,
            if amps.diverged { " (amplitudes diverged, truncated)" } else { "" },
            c.max_diff,
            c.rms
        ));
        let j = json!({
            "eps": a.eps, "t_max": t_max, "h": h, "y0": y0, "dy0": dy0,
            "rg_order": a.rg_order, "expansion_order": a.expansion_order,
            "max_diff": c.max_diff, "rms": c.rms, "envelope_maxima": envelope_peaks,
            "diverged": num.diverged || amps.diverged,
        });
        (c.csv, j)
    } else {
        let mut csv = String::from("t,y,dy\n");
        for i in 0..num.len() {
            csv.push_str(&format!("{:.6},{:.12},{:.12}\n", num.t[i], num.values[i], num.velocity[i]));
        }
        let j = json!({"eps": a.eps, "t_max": t_max, "h": h, "y0": y0, "dy0": dy0, "samples": num.len(), "diverged": num.diverged});
        (csv, j)
    };
    if let Some(path) = &a.gnuplot {
        let target = a.out.as_deref().ok_or_else(|| usage("--gnuplot needs --out"))?;
        std::fs::write(path, gnuplot_script(target))?;
    }
    match &a.out {
        Some(path) => {
            std::fs::write(path, &csv)?;
            Ok(match g.format {
                Format::Json => pretty(&json_v),
                _ => summary + &format!("csv written to {path}\n"),
            })
        }
        None => Ok(match g.format {
            Format::Json => pretty(&json_v),
            _ => csv,
        }),
    }
}
