//! Command-line front end. Every subcommand writes one report (CSV for
//! sequences, JSON otherwise) and maps failed checks to exit code 2.

use std::f64::consts::TAU;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::asymptotics::{
    compute_ijk, jn_asymptotic_report, jn_exact, AsymptoticsReport, DEFAULT_SUB_ORDER,
};
use crate::bargmann::{
    bargmann_eval, bargmann_phi_closed, contour_radius, default_fock_radius, fock_norm_auto,
    taylor_coeff_contour, taylor_coeff_converged, ContourSpec,
};
use crate::correlation::{
    contour_coeffs, pair_report, Check, MethodSelect, PairOptions, PairReport,
};
use crate::envelopes::{verify_envelope, EnvelopeReport};
use crate::error::{Error, Result};
use crate::family::{
    exact_coeffs, extremal_z, gaussian_coeff_recurrence, Family, GaussianParam, HardyParams,
    Sampleable, TestFunction,
};
use crate::hermite::{hermite_coeffs_quadrature, mehler_kernel, phi_eval};
use crate::numerics::{cached_gauss_hermite_rule, default_rule_order, ScaledComplex, ScaledSum};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "hermite-decay",
    version,
    about = "Hermite-coefficient decay checks for Hardy-class Gaussians"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Hermite coefficients of a family member by one or more routes.
    Coeffs(RunArgs),
    /// Coefficients, pair sums and normalized decay sequences.
    Pair(RunArgs),
    /// I/J/K integrals and the normalized J_n sequence.
    Laplace(RunArgs),
    /// Envelope bounds on |Bf| over a polar grid.
    Envelope(RunArgs),
    /// Bargmann closed forms, Fock isometry and contour certificates.
    BargmannCheck(RunArgs),
    /// Oracle-agreement suites.
    Selftest(RunArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
struct RunArgs {
    #[arg(long, conflicts_with = "a")]
    t: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long, default_value = "chirped", value_parser = parse_family)]
    family: Family,
    #[arg(long)]
    n_min: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long, value_enum, default_value = "recurrence")]
    method: MethodSelect,
    #[arg(long)]
    rule_order: Option<usize>,
    #[arg(long)]
    contour_samples: Option<usize>,
    /// Polar grid as `NrxNtheta`.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<(usize, usize)>,
    #[arg(long)]
    r_max: Option<f64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: available cores).
    #[arg(long)]
    jobs: Option<usize>,
}

fn parse_family(s: &str) -> std::result::Result<Family, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_grid(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or("grid must look like 100x100")?;
    let nr = a
        .trim()
        .parse()
        .map_err(|_| format!("bad radial count '{a}'"))?;
    let nt = b
        .trim()
        .parse()
        .map_err(|_| format!("bad angular count '{b}'"))?;
    if nr == 0 || nt == 0 {
        return Err("grid counts must be positive".into());
    }
    Ok((nr, nt))
}

impl RunArgs {
    /// Hardy parameters from whichever of `--t` / `--a` was given, falling
    /// back to `t = 0.25` when `default_t` allows it.
    fn hardy(&self, default_t: bool) -> Result<HardyParams> {
        match (self.t, self.a) {
            (Some(t), None) => HardyParams::from_t(t),
            (None, Some(a)) => {
                let mut hp = HardyParams::from_a(a)?;
                hp.t = Some(0.5 * a.atanh());
                Ok(hp)
            }
            (None, None) if default_t => HardyParams::from_t(0.25),
            _ => Err(Error::InvalidParameter(
                "give exactly one of --t or --a".into(),
            )),
        }
    }

    fn range(&self, lo: usize, hi: usize) -> Result<(usize, usize)> {
        let n_min = self.n_min.unwrap_or(lo);
        let n_max = self.n_max.unwrap_or(hi);
        if n_min == 0 {
            return Err(Error::InvalidParameter("--n-min must be at least 1".into()));
        }
        if n_min > n_max {
            return Err(Error::InvalidParameter(format!(
                "--n-min {n_min} exceeds --n-max {n_max}"
            )));
        }
        Ok((n_min, n_max))
    }

    fn format(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    fn json_only(&self) -> Result<()> {
        match self.format {
            Some(Format::Csv) => Err(Error::InvalidParameter("this report is JSON only".into())),
            _ => Ok(()),
        }
    }
}

/// A finished report: the bytes to write and whether its checks passed.
struct Output {
    body: String,
    passed: bool,
}

/// Shortest round-trip decimal; empty for values that cannot be written.
fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:?}")
    } else {
        String::new()
    }
}

fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn scaled_cells(v: &ScaledComplex) -> [String; 3] {
    let e = v.export();
    [opt_num(e.re), opt_num(e.im), opt_num(e.log10_abs)]
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

#[derive(Serialize)]
struct CoeffsOutput {
    family: Family,
    t: Option<f64>,
    a: f64,
    n_min: usize,
    n_max: usize,
    routes: Vec<CoeffRoute>,
    checks: Vec<Check>,
}

#[derive(Serialize)]
struct CoeffRoute {
    method: &'static str,
    values: Vec<ScaledComplex>,
}

fn run_coeffs(args: &RunArgs) -> Result<Output> {
    let hp = args.hardy(false)?;
    let t = hp.t.unwrap_or(0.5 * hp.a.atanh());
    let (n_min, n_max) = args.range(1, 60)?;
    let f = args.family.test_function(t)?;
    let ns: Vec<usize> = (n_min..=n_max).collect();
    let pick = |m: MethodSelect| args.method == m || args.method == MethodSelect::All;
    let mut routes = Vec::new();
    if pick(MethodSelect::Recurrence) {
        let e = exact_coeffs(&f, n_max)?;
        routes.push(CoeffRoute {
            method: "recurrence",
            values: e.values[n_min..].to_vec(),
        });
    }
    if pick(MethodSelect::Quadrature) {
        let rule = cached_gauss_hermite_rule(args.rule_order.unwrap_or(default_rule_order(n_max)))?;
        let q = hermite_coeffs_quadrature(&f, n_max, &rule)?;
        routes.push(CoeffRoute {
            method: "quadrature",
            values: q.values[n_min..].to_vec(),
        });
    }
    if pick(MethodSelect::Contour) {
        let rule = cached_gauss_hermite_rule(args.rule_order.unwrap_or(default_rule_order(n_max)))?;
        routes.push(CoeffRoute {
            method: "contour",
            values: contour_coeffs(&f, &hp, &ns, &rule, args.contour_samples)?,
        });
    }
    let mut checks = Vec::new();
    if routes.len() > 1 {
        let reference = &routes[0].values;
        let top = reference.iter().map(|v| v.abs()).fold(0.0, f64::max);
        for other in &routes[1..] {
            let (tol, floor) = if other.method == "quadrature" {
                (1e-8, 1e-12)
            } else {
                (1e-6, 1e-12)
            };
            let worst = reference
                .iter()
                .zip(&other.values)
                .map(|(r, o)| (*o - *r).abs() / (r.abs() + floor / tol * top))
                .fold(0.0, f64::max);
            checks.push(Check::new(
                &format!("{}_vs_{}", routes[0].method, other.method),
                worst,
                tol,
            ));
        }
    }
    let passed = checks.iter().all(|c| c.passed);
    let body = match args.format(Format::Csv) {
        Format::Json => to_json(&CoeffsOutput {
            family: args.family,
            t: hp.t,
            a: hp.a,
            n_min,
            n_max,
            routes,
            checks,
        })?,
        Format::Csv => {
            let mut s = String::from("n");
            for r in &routes {
                write!(s, ",re_{0},im_{0},log10_abs_{0}", r.method).unwrap();
            }
            s.push('\n');
            for (i, n) in ns.iter().enumerate() {
                write!(s, "{n}").unwrap();
                for r in &routes {
                    for cell in scaled_cells(&r.values[i]) {
                        write!(s, ",{cell}").unwrap();
                    }
                }
                s.push('\n');
            }
            s
        }
    };
    Ok(Output { body, passed })
}

fn pair_csv(report: &PairReport) -> String {
    let mut s = String::from("n,re_a,im_a,log10_abs_a,re_S,im_S,log10_abs_S,norm_a,norm_S\n");
    for e in &report.entries {
        let [ra, ia, la] = scaled_cells(&e.a);
        let [rs, is, ls] = scaled_cells(&e.s);
        writeln!(
            s,
            "{},{ra},{ia},{la},{rs},{is},{ls},{},{}",
            e.n,
            num(e.norm_a),
            num(e.norm_s)
        )
        .unwrap();
    }
    s
}

fn run_pair(args: &RunArgs) -> Result<Output> {
    let hp = args.hardy(false)?;
    let t = hp.t.unwrap_or(0.5 * hp.a.atanh());
    let (n_min, n_max) = args.range(10, 400)?;
    let opts = PairOptions {
        rule_order: args.rule_order,
        contour_samples: args.contour_samples,
        ..PairOptions::default()
    };
    let mut report = pair_report(args.family, t, n_min..=n_max, args.method, &opts)?;
    if matches!(args.family, Family::Chirped | Family::RealGaussian) {
        if let Some(b) = report.bounded_s {
            let ratio = b.last_quarter_max / b.first_quarter_max;
            report
                .checks
                .push(Check::new("norm_s_late_le_early", ratio, 1.0));
            let late_peak = if b.peak_in_first_quarter { 0.0 } else { 1.0 };
            report
                .checks
                .push(Check::new("norm_s_peak_in_first_quarter", late_peak, 0.0));
        }
    }
    let passed = report.all_checks_pass();
    let body = match args.format(Format::Csv) {
        Format::Csv => pair_csv(&report),
        Format::Json => to_json(&report)?,
    };
    Ok(Output { body, passed })
}

#[derive(Serialize)]
struct LaplaceOutput {
    #[serde(flatten)]
    report: AsymptoticsReport,
    checks: Vec<Check>,
}

fn laplace_checks(r: &AsymptoticsReport) -> Vec<Check> {
    let mut checks = Vec::new();
    let worst = |g: &dyn Fn(&crate::asymptotics::AsymptoticsEntry) -> f64| {
        r.entries.iter().map(g).fold(0.0, f64::max)
    };
    checks.push(Check::new("k_equals_i", worst(&|e| e.k_vs_i_rel), 1e-12));
    checks.push(Check::new(
        "j_quadrature_vs_exact",
        worst(&|e| if e.n <= 200 { e.j_vs_exact_rel } else { 0.0 }),
        1e-10,
    ));
    let late: Vec<_> = r.entries.iter().filter(|e| e.n >= 10).collect();
    if !late.is_empty() {
        checks.push(Check::new(
            "i_over_j_at_most_one",
            late.iter().map(|e| e.i_over_j).fold(0.0, f64::max),
            1.0,
        ));
        let rises = late
            .windows(2)
            .filter(|w| w[1].i_over_j > w[0].i_over_j)
            .count();
        checks.push(Check::new("i_over_j_decreasing", rises as f64, 0.0));
    }
    let window: Vec<f64> = r
        .entries
        .iter()
        .filter(|e| (50..=400).contains(&e.n))
        .map(|e| e.ratio)
        .collect();
    if !window.is_empty() {
        let outside = window
            .iter()
            .filter(|&&v| !(0.1..=10.0).contains(&v))
            .count();
        checks.push(Check::new("normalized_j_in_window", outside as f64, 0.0));
    }
    if let (Some(a), Some(b)) = (r.ratio_at(200), r.ratio_at(400)) {
        checks.push(Check::new("normalized_j_settles", (b - a).abs() / b, 0.02));
    }
    checks
}

fn run_laplace(args: &RunArgs) -> Result<Output> {
    let hp = args.hardy(false)?;
    let (n_min, n_max) = args.range(10, 400)?;
    let sub = args.rule_order.unwrap_or(DEFAULT_SUB_ORDER);
    let report = jn_asymptotic_report(n_min..=n_max, &hp, sub)?;
    let checks = laplace_checks(&report);
    let passed = checks.iter().all(|c| c.passed);
    let body = match args.format(Format::Json) {
        Format::Json => to_json(&LaplaceOutput { report, checks })?,
        Format::Csv => {
            let mut s = String::from(
                "n,log10_I,log10_J,log10_K,log10_J_exact,log10_laplace_prediction,ratio,i_over_j\n",
            );
            for e in &report.entries {
                writeln!(
                    s,
                    "{},{},{},{},{},{},{},{}",
                    e.n,
                    opt_num(e.i.log10_abs),
                    opt_num(e.j.log10_abs),
                    opt_num(e.k.log10_abs),
                    opt_num(e.j_exact.log10_abs),
                    opt_num(e.laplace_prediction.log10_abs),
                    num(e.ratio),
                    num(e.i_over_j)
                )
                .unwrap();
            }
            s
        }
    };
    Ok(Output { body, passed })
}

/// Contour radii at which the envelope is additionally checked.
pub const ENVELOPE_EXTRA_N: [usize; 4] = [50, 100, 200, 400];

#[derive(Serialize)]
struct EnvelopeOutput {
    family: Family,
    #[serde(flatten)]
    report: EnvelopeReport,
    checks: Vec<Check>,
}

fn run_envelope(args: &RunArgs) -> Result<Output> {
    args.json_only()?;
    let hp = args.hardy(false)?;
    let t = hp.t.unwrap_or(0.5 * hp.a.atanh());
    let f = args.family.test_function(t)?;
    let rule = cached_gauss_hermite_rule(args.rule_order.unwrap_or(200))?;
    let extra: Vec<f64> = ENVELOPE_EXTRA_N
        .iter()
        .map(|&n| contour_radius(n, hp.mu))
        .collect::<Result<_>>()?;
    let report = verify_envelope(
        &f,
        &hp,
        args.grid.unwrap_or((100, 100)),
        args.r_max.unwrap_or(12.0),
        &extra,
        &rule,
    )?;
    let checks = vec![Check::new("violations", report.violations as f64, 0.0)];
    let passed = checks.iter().all(|c| c.passed);
    Ok(Output {
        body: to_json(&EnvelopeOutput {
            family: args.family,
            report,
            checks,
        })?,
        passed,
    })
}

/// Twenty points with `3.5 ≤ |w| ≤ 4` spread over all angles.
pub fn closed_form_sample_points() -> Vec<Complex64> {
    (0..20)
        .map(|k| Complex64::from_polar(3.5 + 0.5 * k as f64 / 19.0, TAU * (k as f64 + 0.5) / 20.0))
        .collect()
}

#[derive(Serialize)]
struct CheckSuite {
    suite: &'static str,
    checks: Vec<Check>,
}

fn bargmann_checks(args: &RunArgs) -> Result<Vec<Check>> {
    let hp = args.hardy(true)?;
    let t = hp.t.unwrap_or(0.5 * hp.a.atanh());
    let rule = cached_gauss_hermite_rule(args.rule_order.unwrap_or(200))?;
    // polynomial degree ≤ 30 times e^{-y²}: 64 nodes are exact
    let grid_rule = cached_gauss_hermite_rule(args.rule_order.unwrap_or(64))?;
    let mut checks = Vec::new();

    let mut worst: f64 = 0.0;
    for n in 0..=30 {
        let f = TestFunction::basis(n);
        for w in closed_form_sample_points() {
            let q = bargmann_eval(&f, w, &rule)?;
            worst = worst.max(q.rel_diff(&bargmann_phi_closed(n, w)));
        }
    }
    checks.push(Check::new("bargmann_phi_closed_form", worst, 1e-9));

    let grid = args.grid.unwrap_or((128, 128));
    let family = args.family.test_function(t)?;
    for (name, f) in [
        ("fock_norm_phi0", TestFunction::basis(0)),
        ("fock_norm_phi5", TestFunction::basis(5)),
        ("fock_norm_family", family.clone()),
    ] {
        let start = args
            .r_max
            .unwrap_or(default_fock_radius(f.polynomial_degree().unwrap_or(0)));
        let norm = fock_norm_auto(&|w| bargmann_eval(&f, w, &grid_rule), start, grid)?;
        checks.push(Check::new(name, (norm - f.l2_norm()).abs(), 1e-6));
    }

    let bf = |w| bargmann_eval(&family, w, &grid_rule);
    let mut radius_worst: f64 = 0.0;
    let mut doubling_worst: f64 = 0.0;
    for n in [2usize, 10, 30] {
        let mut spec = ContourSpec::from_hardy(n, &hp)?;
        if let Some(m) = args.contour_samples {
            spec = spec.with_samples(m)?;
        }
        let a = taylor_coeff_contour(&bf, &spec)?;
        let b = taylor_coeff_contour(&bf, &spec.with_radius(1.3 * spec.radius)?)?;
        if !(a.is_zero() && b.is_zero()) {
            radius_worst = radius_worst.max(a.abs().max(b.abs()).recip() * (a - b).abs());
        }
        doubling_worst = doubling_worst.max(taylor_coeff_converged(&bf, &spec)?.doubling_change);
    }
    checks.push(Check::new(
        "contour_radius_independence",
        radius_worst,
        1e-8,
    ));
    checks.push(Check::new("contour_doubling", doubling_worst, 1e-12));
    Ok(checks)
}

fn run_bargmann_check(args: &RunArgs) -> Result<Output> {
    args.json_only()?;
    let checks = bargmann_checks(args)?;
    let passed = checks.iter().all(|c| c.passed);
    Ok(Output {
        body: to_json(&CheckSuite {
            suite: "bargmann-check",
            checks,
        })?,
        passed,
    })
}

/// `max |x − y| / (|y| + (floor/tol) max|y|)`.
fn mixed_error(lhs: &[ScaledComplex], rhs: &[ScaledComplex], tol: f64, floor: f64) -> f64 {
    let top = rhs.iter().map(|v| v.abs()).fold(0.0, f64::max);
    lhs.iter()
        .zip(rhs)
        .map(|(x, y)| (*x - *y).abs() / (y.abs() + floor / tol * top))
        .fold(0.0, f64::max)
}

fn selftest_checks(args: &RunArgs) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let rule = cached_gauss_hermite_rule(200)?;

    let tables: Vec<Vec<f64>> = rule
        .nodes
        .iter()
        .map(|&x| phi_eval(60, x).iter().map(|p| p.to_complex().re).collect())
        .collect();
    let mut ortho: f64 = 0.0;
    for i in 0..=60 {
        for j in 0..=60 {
            let s: f64 = (0..rule.order())
                .map(|k| rule.scaled_weight(k) * tables[k][i] * tables[k][j])
                .sum();
            ortho = ortho.max((s - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    checks.push(Check::new("orthonormality", ortho, 1e-10));

    let (x, y, r) = (0.3, -0.7, 0.5);
    let (px, py) = (phi_eval(40, x), phi_eval(40, y));
    let series: ScaledSum = (0..=40)
        .map(|n| px[n] * py[n] * ScaledComplex::from_real(r).powi(n as i32))
        .collect();
    let closed = mehler_kernel(Complex64::new(r, 0.0), x, y)?;
    checks.push(Check::new(
        "mehler_series",
        series.total().rel_diff(&closed),
        1e-10,
    ));

    let zs = [
        GaussianParam::real(1.0)?,
        GaussianParam::real(2.0)?,
        GaussianParam::real(0.7)?,
        extremal_z(0.25)?,
        extremal_z(0.5)?,
    ];
    let mut oracle: f64 = 0.0;
    for p in &zs {
        let rec = gaussian_coeff_recurrence(p, 60)?;
        let quad = hermite_coeffs_quadrature(p, 60, &rule)?;
        oracle = oracle.max(mixed_error(&quad.values, &rec.values, 1e-8, 1e-12));
    }
    checks.push(Check::new("recurrence_vs_quadrature", oracle, 1e-8));

    let hp = HardyParams::from_t(0.25)?;
    let chirp = extremal_z(0.25)?;
    let bargmann_rule = cached_gauss_hermite_rule(40)?;
    let ns: Vec<usize> = (1..=40).collect();
    let contour = contour_coeffs(&chirp, &hp, &ns, &bargmann_rule, args.contour_samples)?;
    let rec = gaussian_coeff_recurrence(&chirp, 40)?;
    checks.push(Check::new(
        "recurrence_vs_contour",
        mixed_error(&contour, &rec.values[1..], 1e-6, 1e-12),
        1e-6,
    ));

    let mut jk: f64 = 0.0;
    let mut ki: f64 = 0.0;
    for n in [2usize, 5, 10, 50, 100, 200] {
        let v = compute_ijk(n, &hp, DEFAULT_SUB_ORDER)?;
        jk = jk.max(v.j.rel_diff(&jn_exact(n, &hp)?));
        ki = ki.max(v.k.rel_diff(&v.i));
    }
    checks.push(Check::new("j_quadrature_vs_exact", jk, 1e-10));
    checks.push(Check::new("k_equals_i", ki, 1e-12));
    Ok(checks)
}

fn run_selftest(args: &RunArgs) -> Result<Output> {
    args.json_only()?;
    let checks = selftest_checks(args)?;
    let passed = checks.iter().all(|c| c.passed);
    Ok(Output {
        body: to_json(&CheckSuite {
            suite: "selftest",
            checks,
        })?,
        passed,
    })
}

fn dispatch(command: &Command) -> Result<Output> {
    match command {
        Command::Coeffs(a) => run_coeffs(a),
        Command::Pair(a) => run_pair(a),
        Command::Laplace(a) => run_laplace(a),
        Command::Envelope(a) => run_envelope(a),
        Command::BargmannCheck(a) => run_bargmann_check(a),
        Command::Selftest(a) => run_selftest(a),
    }
}

fn args_of(command: &Command) -> &RunArgs {
    match command {
        Command::Coeffs(a)
        | Command::Pair(a)
        | Command::Laplace(a)
        | Command::Envelope(a)
        | Command::BargmannCheck(a)
        | Command::Selftest(a) => a,
    }
}

fn execute(command: &Command) -> Result<i32> {
    let args = args_of(command);
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = args.jobs {
        if j == 0 {
            return Err(Error::InvalidParameter("--jobs must be at least 1".into()));
        }
        pool = pool.num_threads(j);
    }
    let pool = pool
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot start worker pool: {e}")))?;
    let out = pool.install(|| dispatch(command))?;
    match &args.out {
        Some(path) => std::fs::write(path, out.body.as_bytes())?,
        None => std::io::stdout().lock().write_all(out.body.as_bytes())?,
    }
    Ok(if out.passed {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}

/// Parses `args` (including the program name) and runs the command;
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
