//! Pair sums `S_n = a_n + κ_n a_{n+4}`, their contour counterpart, decay
//! exponent fits, and the assembled pair report.

use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::Serialize;

use crate::bargmann::{
    bargmann_eval, contour_radius, default_samples, ln_pairing_factor, taylor_coeffs_on_circle,
};
use crate::error::{Error, Result};
use crate::family::{exact_coeffs, Family, HardyParams, Sampleable, TestFunction};
use crate::hermite::{hermite_coeffs_quadrature, CoeffSeq};
use crate::numerics::{
    cached_gauss_hermite_rule, default_rule_order, QuadratureRule, ScaledComplex,
};

/// `n(n+2)/√((n+1)(n+2)(n+3)(n+4))`.
pub fn pair_weight(n: usize) -> f64 {
    let nf = n as f64;
    nf * (nf + 2.0) / ((nf + 1.0) * (nf + 2.0) * (nf + 3.0) * (nf + 4.0)).sqrt()
}

/// `a_n + (1/μ) · n(n+2)/√(Π_{j=1}^4 (n+j)) · a_{n+4}`.
pub fn pair_sum_mu(seq: &CoeffSeq, n: usize, mu: f64) -> Result<ScaledComplex> {
    let a = seq.get(n)?;
    let b = seq.get(n + 4)?;
    Ok(a + b.scale(pair_weight(n)).scale_ln(-mu.ln()))
}

/// `S_n` with `1/μ = e^{4t}`.
pub fn pair_sum(seq: &CoeffSeq, n: usize, t: f64) -> Result<ScaledComplex> {
    if n == 0 {
        return Err(Error::InvalidParameter("pair sums start at n = 1".into()));
    }
    pair_sum_mu(seq, n, (-4.0 * t).exp())
}

/// One row of the Taylor-coefficient check on the circle `γ_n`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PairedCombination {
    pub n: usize,
    /// `|c_n + (4n(n+2)/μ) c_{n+4}| · n · (2n/(√μ e))^{n/2}`.
    pub normalized: f64,
    /// `√(2^n n! √π) (c_n + (4n(n+2)/μ) c_{n+4})`, the same combination
    /// in Hermite-coefficient units.
    pub paired: ScaledComplex,
}

/// `c_n` and `c_{n+4}` of `Bf` from a single circle of radius
/// `(4n(n+2)/μ)^{1/4}`, combined and normalized. `samples` defaults to
/// the floor-respecting choice for index `n + 4`.
pub fn paired_combination<F: Sampleable + ?Sized>(
    f: &F,
    hp: &HardyParams,
    n: usize,
    rule: &QuadratureRule,
    samples: Option<usize>,
) -> Result<PairedCombination> {
    let radius = contour_radius(n, hp.mu)?;
    let bf = |w| bargmann_eval(f, w, rule);
    let m = samples.unwrap_or(default_samples(n + 4));
    let c = taylor_coeffs_on_circle(&bf, radius, m, &[n, n + 4])?;
    let nf = n as f64;
    let combo = c[0] + c[1].scale(4.0 * nf * (nf + 2.0) / hp.mu);
    let ln_norm = nf.ln() + 0.5 * nf * (2.0 * nf / (hp.sqrt_mu() * std::f64::consts::E)).ln();
    Ok(PairedCombination {
        n,
        normalized: combo.modulus().scale_ln(ln_norm).abs(),
        paired: combo.scale_ln(ln_pairing_factor(n)),
    })
}

pub fn paired_combination_scan<F: Sampleable + ?Sized>(
    f: &F,
    hp: &HardyParams,
    n_range: RangeInclusive<usize>,
    rule: &QuadratureRule,
    samples: Option<usize>,
) -> Result<Vec<PairedCombination>> {
    let ns: Vec<usize> = n_range.collect();
    ns.par_iter()
        .map(|&n| paired_combination(f, hp, n, rule, samples))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PowerFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square deviation of `log value` from the fitted line.
    pub residual: f64,
}

/// Least-squares line through `(log n, log value)`.
pub fn decay_exponent_fit(values: &[(usize, f64)]) -> Result<PowerFit> {
    if values.len() < 8 {
        return Err(Error::BadFitData(format!("got {} points", values.len())));
    }
    if let Some(&(n, v)) = values
        .iter()
        .find(|(n, v)| !(*v > 0.0 && v.is_finite()) || *n == 0)
    {
        return Err(Error::BadFitData(format!(
            "non-positive entry at n = {n}: {v}"
        )));
    }
    let pts: Vec<(f64, f64)> = values
        .iter()
        .map(|&(n, v)| ((n as f64).ln(), v.ln()))
        .collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum::<f64>()
        / m)
        .sqrt();
    Ok(PowerFit {
        slope,
        intercept,
        residual,
    })
}

/// Finite-`n` stand-in for an `O(·)` claim: the sequence peaks in the first
/// quarter of its window and its last quarter stays below its first.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Boundedness {
    pub argmax_n: usize,
    pub first_quarter_max: f64,
    pub last_quarter_max: f64,
    pub peak_in_first_quarter: bool,
    pub late_le_early: bool,
}

impl Boundedness {
    pub fn holds(&self) -> bool {
        self.peak_in_first_quarter && self.late_le_early
    }
}

pub fn boundedness(values: &[(usize, f64)]) -> Option<Boundedness> {
    if values.len() < 4 {
        return None;
    }
    let q = values.len().div_ceil(4);
    let max_of = |s: &[(usize, f64)]| s.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let (argmax_idx, _) = values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, p)| {
            if p.1 > best.1 {
                (i, p.1)
            } else {
                best
            }
        });
    let first = max_of(&values[..q]);
    let last = max_of(&values[values.len() - q..]);
    Some(Boundedness {
        argmax_n: values[argmax_idx].0,
        first_quarter_max: first,
        last_quarter_max: last,
        peak_in_first_quarter: argmax_idx < q,
        late_le_early: last <= first,
    })
}

/// Which coefficient routes a pair report computes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum MethodSelect {
    Recurrence,
    Quadrature,
    Contour,
    All,
}

/// Work limits for the routes that are only well conditioned on part of
/// the range.
#[derive(Clone, Copy, Debug)]
pub struct PairOptions {
    /// Largest `n` compared between the exact and contour routes.
    pub contour_check_max: usize,
    /// Largest `n` compared between the exact and quadrature routes.
    pub quadrature_check_max: usize,
    /// Gauss–Hermite order for the quadrature route; `None` picks the
    /// default for the range.
    pub rule_order: Option<usize>,
    /// Gauss–Hermite order for Bargmann evaluations on contours.
    pub bargmann_rule_order: usize,
    /// Samples per contour; `None` uses the default for each index.
    pub contour_samples: Option<usize>,
}

impl Default for PairOptions {
    fn default() -> Self {
        Self {
            contour_check_max: 40,
            quadrature_check_max: 60,
            rule_order: None,
            bargmann_rule_order: 200,
            contour_samples: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PairEntry {
    pub n: usize,
    pub a: ScaledComplex,
    pub s: ScaledComplex,
    /// `n^{1/4} e^{nt} |a_n|`.
    pub norm_a: f64,
    /// `n^{3/4} e^{nt} |S_n|`.
    pub norm_s: f64,
}

/// A named pass/fail comparison carried inside a report.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(name: &str, worst: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            worst,
            tolerance,
            passed: worst <= tolerance,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PairReport {
    pub family: Family,
    pub t: f64,
    pub a: f64,
    pub mu: f64,
    pub method: MethodSelect,
    /// Route the tabulated `a_n` come from.
    pub source: &'static str,
    pub entries: Vec<PairEntry>,
    pub fit_window: (usize, usize),
    pub fitted_slope_a: Option<PowerFit>,
    pub fitted_slope_s: Option<PowerFit>,
    pub bounded_a: Option<Boundedness>,
    pub bounded_s: Option<Boundedness>,
    pub checks: Vec<Check>,
}

impl PairReport {
    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Worst `|x − y| / (|y| + (floor/tol) · max|y|)` over `ns`: at most `tol`
/// exactly when `|x − y| ≤ tol |y| + floor · max|y|` everywhere, so exact
/// zeros of one parity are judged against the largest entry.
fn worst_mixed(
    lhs: &[ScaledComplex],
    rhs: &[ScaledComplex],
    ns: impl Iterator<Item = usize>,
    tol: f64,
    floor: f64,
) -> f64 {
    let top = rhs.iter().map(|v| v.abs()).fold(0.0, f64::max);
    ns.map(|n| {
        let d = (lhs[n] - rhs[n]).abs();
        let scale = rhs[n].abs() + floor / tol * top;
        if d == 0.0 {
            0.0
        } else {
            d / scale
        }
    })
    .fold(0.0, f64::max)
}

/// Hermite coefficients for the indices `ns` by the contour route, each on
/// its own circle (index 0 uses the `n = 1` circle).
pub fn contour_coeffs<F: Sampleable + ?Sized>(
    f: &F,
    hp: &HardyParams,
    ns: &[usize],
    rule: &QuadratureRule,
    samples: Option<usize>,
) -> Result<Vec<ScaledComplex>> {
    ns.par_iter()
        .map(|&n| {
            let radius = contour_radius(n.max(1), hp.mu)?;
            let bf = |w| bargmann_eval(f, w, rule);
            let m = samples.unwrap_or(default_samples(n.max(1)));
            let c = taylor_coeffs_on_circle(&bf, radius, m, &[n])?[0];
            Ok(c.scale_ln(ln_pairing_factor(n)))
        })
        .collect()
}

fn parity_filter(f: &TestFunction, n: usize) -> bool {
    f.parity().is_none_or(|p| n % 2 == p)
}

/// Coefficients, pair sums, normalized sequences and fits for one family
/// member over `n_range`, with the cross-route checks the method selects.
pub fn pair_report(
    family: Family,
    t: f64,
    n_range: RangeInclusive<usize>,
    method: MethodSelect,
    opts: &PairOptions,
) -> Result<PairReport> {
    let (n_lo, n_hi) = (*n_range.start(), *n_range.end());
    if n_lo == 0 || n_lo > n_hi {
        return Err(Error::InvalidParameter(format!(
            "bad n range {n_lo}..={n_hi}"
        )));
    }
    let hp = HardyParams::from_t(t)?;
    let f = family.test_function(t)?;
    let top = n_hi + 4;
    let mut checks = Vec::new();

    let exact = exact_coeffs(&f, top)?;
    let bargmann_rule = cached_gauss_hermite_rule(opts.bargmann_rule_order)?;

    let (values, source) = match method {
        MethodSelect::Recurrence | MethodSelect::All => (exact.values.clone(), "recurrence"),
        MethodSelect::Quadrature => {
            let rule =
                cached_gauss_hermite_rule(opts.rule_order.unwrap_or(default_rule_order(top)))?;
            (
                hermite_coeffs_quadrature(&f, top, &rule)?.values,
                "quadrature",
            )
        }
        MethodSelect::Contour => {
            let ns: Vec<usize> = (0..=top).collect();
            (
                contour_coeffs(&f, &hp, &ns, &bargmann_rule, opts.contour_samples)?,
                "contour",
            )
        }
    };
    let seq = CoeffSeq::new(values, exact.method, exact.params);

    if method == MethodSelect::All {
        let q_top = top.min(opts.quadrature_check_max);
        let rule = cached_gauss_hermite_rule(opts.rule_order.unwrap_or(default_rule_order(q_top)))?;
        let quad = hermite_coeffs_quadrature(&f, q_top, &rule)?;
        checks.push(Check::new(
            "recurrence_vs_quadrature",
            worst_mixed(
                &quad.values,
                &exact.values[..=q_top],
                0..=q_top,
                1e-8,
                1e-12,
            ),
            1e-8,
        ));
        let c_top = top.min(opts.contour_check_max);
        let ns: Vec<usize> = (1..=c_top).collect();
        let contour = contour_coeffs(&f, &hp, &ns, &bargmann_rule, opts.contour_samples)?;
        let mut padded = vec![ScaledComplex::ZERO; c_top + 1];
        for (n, v) in ns.iter().zip(contour) {
            padded[*n] = v;
        }
        checks.push(Check::new(
            "recurrence_vs_contour",
            worst_mixed(&padded, &exact.values[..=c_top], 1..=c_top, 1e-6, 1e-12),
            1e-6,
        ));
        let s_top = n_hi.min(opts.contour_check_max);
        if s_top >= n_lo {
            let via_contour: Vec<ScaledComplex> = (n_lo..=s_top)
                .into_par_iter()
                .map(|n| {
                    paired_combination(&f, &hp, n, &bargmann_rule, opts.contour_samples)
                        .map(|e| e.paired)
                })
                .collect::<Result<_>>()?;
            let via_coeffs: Vec<ScaledComplex> = (n_lo..=s_top)
                .map(|n| pair_sum_mu(&exact, n, hp.mu))
                .collect::<Result<_>>()?;
            checks.push(Check::new(
                "pair_sum_routes",
                worst_mixed(&via_contour, &via_coeffs, 0..via_coeffs.len(), 1e-6, 1e-12),
                1e-6,
            ));
        }
    }

    let mut entries = Vec::with_capacity(n_hi - n_lo + 1);
    for n in n_lo..=n_hi {
        let a = seq.get(n)?;
        let s = pair_sum_mu(&seq, n, hp.mu)?;
        let nf = n as f64;
        entries.push(PairEntry {
            n,
            a,
            s,
            norm_a: a.modulus().scale_ln(0.25 * nf.ln() + nf * t).abs(),
            norm_s: s.modulus().scale_ln(0.75 * nf.ln() + nf * t).abs(),
        });
    }

    if family == Family::Chirped && method != MethodSelect::Contour {
        let worst = entries
            .iter()
            .filter(|e| e.n % 2 == 0 && e.n <= 100)
            .map(|e| e.s.rel_diff(&e.a.scale(4.0 / (e.n as f64 + 4.0))))
            .fold(0.0, f64::max);
        checks.push(Check::new("chirped_pair_identity", worst, 1e-10));
    }

    let fit_window = ((n_hi / 8).max(n_lo), n_hi);
    let windowed = |g: &dyn Fn(&PairEntry) -> f64| -> Vec<(usize, f64)> {
        entries
            .iter()
            .filter(|e| e.n >= fit_window.0 && parity_filter(&f, e.n))
            .map(|e| (e.n, g(e)))
            .collect()
    };
    let fit_a = windowed(&|e| e.a.modulus().scale_ln(e.n as f64 * t).abs());
    let fit_s = windowed(&|e| e.s.modulus().scale_ln(e.n as f64 * t).abs());
    let series = |g: &dyn Fn(&PairEntry) -> f64| -> Vec<(usize, f64)> {
        entries
            .iter()
            .filter(|e| parity_filter(&f, e.n))
            .map(|e| (e.n, g(e)))
            .collect()
    };

    Ok(PairReport {
        family,
        t,
        a: hp.a,
        mu: hp.mu,
        method,
        source,
        fit_window,
        fitted_slope_a: decay_exponent_fit(&fit_a).ok(),
        fitted_slope_s: decay_exponent_fit(&fit_s).ok(),
        bounded_a: boundedness(&series(&|e| e.norm_a)),
        bounded_s: boundedness(&series(&|e| e.norm_s)),
        entries,
        checks,
    })
}
