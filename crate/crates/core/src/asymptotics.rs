//! Laplace's method at an endpoint maximum and the three angular integrals
//! `I_n`, `J_n`, `K_n` that bound the contour integral of `|Bf|`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::HardyParams;
use crate::numerics::{LegendreRule, ScaledComplex, ScaledExport};

/// Default Gauss–Legendre order for each angular sub-interval.
pub const DEFAULT_SUB_ORDER: usize = 400;

fn sqrt_nn2(n: usize) -> f64 {
    let nf = n as f64;
    (nf * (nf + 2.0)).sqrt()
}

/// `h_n(t) = sin 2t + (2/√(n(n+2))) log|cos 2t|`.
///
/// Defined on `(0, π/2)` away from the logarithmic singularity at `π/4`;
/// `h_n(t) = h_n(π/2 − t)`.
pub fn h_n(n: usize, t: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("h_n needs n >= 1".into()));
    }
    if !(t > 0.0 && t < FRAC_PI_2) || (t - FRAC_PI_4).abs() <= 4.0 * f64::EPSILON {
        return Err(Error::InvalidParameter(format!(
            "h_n is defined on (0, pi/2) minus pi/4, got t = {t}"
        )));
    }
    Ok((2.0 * t).sin() + 2.0 / sqrt_nn2(n) * (2.0 * t).cos().abs().ln())
}

/// Interior maximum of `h_n`: `sin 2t_0 = √(n/(n+2))` with `t_0 ∈ (0, π/4)`,
/// and `h_n''(t_0) = −8(n+1)/√(n(n+2))`.
pub fn stationary_point(n: usize) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "stationary point needs n >= 1".into(),
        ));
    }
    let nf = n as f64;
    let t0 = 0.5 * (nf / (nf + 2.0)).sqrt().asin();
    Ok((t0, -8.0 * (nf + 1.0) / sqrt_nn2(n)))
}

/// Smallest `n` with `θ_0 ≤ t_0(n)`; `t_0` increases with `n`, so the
/// inequality then holds for every larger `n`. Solves
/// `n/(n+2) ≥ sin² 2θ_0`.
pub fn n_min_for(hp: &HardyParams) -> usize {
    let s2 = hp.sin_2theta0().powi(2);
    let bound = 2.0 * s2 / (1.0 - s2);
    let mut n = (bound.floor() as usize).max(1);
    while n > 1
        && stationary_point(n - 1)
            .map(|p| p.0 >= hp.theta0)
            .unwrap_or(false)
    {
        n -= 1;
    }
    while stationary_point(n).map(|p| p.0 < hp.theta0).unwrap_or(true) {
        n += 1;
    }
    n
}

/// `G(α) e^{xH(α)} [−π/(2xH''(α))]^{1/2}` from known values at `α`.
pub fn laplace_from_derivatives(
    g_alpha: f64,
    h_alpha: f64,
    h2_alpha: f64,
    x: f64,
) -> Result<ScaledComplex> {
    if !(h2_alpha < 0.0) {
        return Err(Error::Precondition(format!(
            "H''(alpha) must be negative, got {h2_alpha}"
        )));
    }
    if !(x > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "x must be positive, got {x}"
        )));
    }
    let prefactor = (-PI / (2.0 * x * h2_alpha)).sqrt();
    Ok(ScaledComplex::from_real(g_alpha * prefactor).scale_ln(x * h_alpha))
}

const STATIONARY_TOL: f64 = 1e-8;
const FIRST_STEP: f64 = 1e-4;
const SECOND_STEP: f64 = 1e-3;

/// Leading-order Laplace estimate of `∫_α^β G(t) e^{xH(t)} dt` for a
/// maximum of `H` at the endpoint `α`. `H'(α)` and `H''(α)` come from
/// one-sided differences taken into the interval.
pub fn laplace_endpoint_estimate<G, H>(
    g: G,
    h: H,
    alpha: f64,
    beta: f64,
    x: f64,
) -> Result<ScaledComplex>
where
    G: Fn(f64) -> f64,
    H: Fn(f64) -> f64,
{
    if alpha == beta {
        return Err(Error::InvalidParameter("empty interval".into()));
    }
    let dir = (beta - alpha).signum();
    let at = |k: f64, step: f64| h(alpha + dir * k * step);
    let d1 = dir * (-3.0 * at(0.0, FIRST_STEP) + 4.0 * at(1.0, FIRST_STEP) - at(2.0, FIRST_STEP))
        / (2.0 * FIRST_STEP);
    if !(d1.abs() <= STATIONARY_TOL) {
        return Err(Error::Precondition(format!(
            "H'(alpha) = {d1:e} is not zero"
        )));
    }
    let d2 = (2.0 * at(0.0, SECOND_STEP) - 5.0 * at(1.0, SECOND_STEP) + 4.0 * at(2.0, SECOND_STEP)
        - at(3.0, SECOND_STEP))
        / (SECOND_STEP * SECOND_STEP);
    laplace_from_derivatives(g(alpha), h(alpha), d2, x)
}

/// `I_n`, `J_n`, `K_n` as positive scaled reals.
#[derive(Clone, Copy, Debug)]
pub struct Ijk {
    pub i: ScaledComplex,
    pub j: ScaledComplex,
    pub k: ScaledComplex,
}

/// The three integrals by Gauss–Legendre of order `sub_order` per piece,
/// with the exponent kept in log form. `J_n` is split at `π/4`, where
/// `|cos 2t|` has its kink.
pub fn compute_ijk(n: usize, hp: &HardyParams, sub_order: usize) -> Result<Ijk> {
    if n == 0 {
        return Err(Error::InvalidParameter("I/J/K need n >= 1".into()));
    }
    let rule = LegendreRule::new(sub_order)?;
    let root = sqrt_nn2(n);
    let (mu, th) = (hp.mu, hp.theta0);
    let scale = root / (2.0 * mu.sqrt());
    let ln_cos = |t: f64| (2.0 * t).cos().abs().ln();
    let i = rule.integrate_ln(0.0, th, |t| {
        ln_cos(t) + scale * (mu + (1.0 - mu) * t.sin().powi(2))
    });
    let j_int = |t: f64| ln_cos(t) + 0.5 * root * (2.0 * t).sin();
    let j = rule.integrate_ln(th, FRAC_PI_4, j_int)
        + rule.integrate_ln(FRAC_PI_4, FRAC_PI_2 - th, j_int);
    let k = rule.integrate_ln(FRAC_PI_2 - th, FRAC_PI_2, |t| {
        ln_cos(t) + scale * (mu + (1.0 - mu) * t.cos().powi(2))
    });
    Ok(Ijk { i, j, k })
}

/// `J_n = (e^x − e^{x sin 2θ_0})/x` with `x = √(n(n+2))/2`, from the
/// antiderivative `e^{x sin 2t}/(2x)` on each half of the interval.
pub fn jn_exact(n: usize, hp: &HardyParams) -> Result<ScaledComplex> {
    if n == 0 {
        return Err(Error::InvalidParameter("J_n needs n >= 1".into()));
    }
    let x = 0.5 * sqrt_nn2(n);
    let s = hp.sin_2theta0();
    // ln(e^x − e^{xs}) = x + ln(1 − e^{−x(1−s)})
    let ln = x + (-(x * (s - 1.0)).exp_m1()).ln() - x.ln();
    Ok(ScaledComplex::from_polar_ln(ln, 0.0))
}

/// `I_n ≤ sin 2θ_0 · exp(√(n(n+2))(μ + (1−μ) sin²θ_0)/(2√μ))`, in log form.
pub fn ln_i_upper_bound(n: usize, hp: &HardyParams) -> f64 {
    let mu = hp.mu;
    hp.sin_2theta0().ln()
        + sqrt_nn2(n) * (mu + (1.0 - mu) * hp.theta0.sin().powi(2)) / (2.0 * mu.sqrt())
}

/// `2 ∫_{t_0}^{π/4} e^{x h_n}` estimated at `t_0` with the endpoint
/// constant: `√(π/((n+1)(n+2))) e^{n/2}`.
pub fn laplace_prediction(n: usize) -> Result<ScaledComplex> {
    let (t0, h2) = stationary_point(n)?;
    let x = 0.5 * sqrt_nn2(n);
    let half = laplace_from_derivatives(1.0, h_n(n, t0)?, h2, x)?;
    Ok(half.scale(2.0))
}

/// `J_n · n · e^{−n/2}`.
pub fn normalized_j(j: ScaledComplex, n: usize) -> f64 {
    j.scale_ln((n as f64).ln() - 0.5 * n as f64).abs()
}

/// Index at which [`jn_exact`] is sampled to read off its limiting
/// normalized constant.
const LIMIT_PROBE: usize = 1_000_000;

#[derive(Clone, Debug, Serialize)]
pub struct AsymptoticsEntry {
    pub n: usize,
    #[serde(rename = "I")]
    pub i: ScaledExport,
    #[serde(rename = "J")]
    pub j: ScaledExport,
    #[serde(rename = "K")]
    pub k: ScaledExport,
    #[serde(rename = "J_exact")]
    pub j_exact: ScaledExport,
    pub laplace_prediction: ScaledExport,
    /// `J_n · n · e^{−n/2}`.
    pub ratio: f64,
    pub i_over_j: f64,
    pub k_vs_i_rel: f64,
    pub j_vs_exact_rel: f64,
    pub i_below_bound: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AsymptoticsReport {
    pub t: f64,
    pub a: f64,
    pub mu: f64,
    pub theta0: f64,
    /// Smallest `n` with `θ_0 ≤ t_0(n)`.
    pub n_min: usize,
    pub sub_order: usize,
    pub entries: Vec<AsymptoticsEntry>,
    /// Limit of `J_n n e^{−n/2}` fitted as `L + b/n` over the upper half
    /// of the range.
    pub fitted_limit: f64,
    /// `J_n n e^{−n/2}` of the exact formula far out.
    pub exact_formula_limit: f64,
    pub sqrt_pi: f64,
}

impl AsymptoticsReport {
    pub fn ratio_at(&self, n: usize) -> Option<f64> {
        self.entries.iter().find(|e| e.n == n).map(|e| e.ratio)
    }
}

/// Least-squares fit `r_n ≈ L + b/n`; returns `L`.
fn fit_limit(points: &[(usize, f64)]) -> f64 {
    let m = points.len() as f64;
    if points.len() < 2 {
        return points.first().map(|p| p.1).unwrap_or(f64::NAN);
    }
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(n, r) in points {
        let u = 1.0 / n as f64;
        sx += u;
        sy += r;
        sxx += u * u;
        sxy += u * r;
    }
    let b = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    (sy - b * sx) / m
}

/// Tabulates `I_n`, `J_n`, `K_n`, the exact `J_n`, the Laplace prediction
/// and `J_n n e^{−n/2}` over `n_range`.
pub fn jn_asymptotic_report(
    n_range: RangeInclusive<usize>,
    hp: &HardyParams,
    sub_order: usize,
) -> Result<AsymptoticsReport> {
    let t = hp.t.ok_or_else(|| {
        Error::Precondition("the asymptotic report needs parameters built from t".into())
    })?;
    if *n_range.start() == 0 || n_range.is_empty() {
        return Err(Error::InvalidParameter(
            "n range must be non-empty and start at 1 or above".into(),
        ));
    }
    let ns: Vec<usize> = n_range.collect();
    let entries: Vec<AsymptoticsEntry> = ns
        .par_iter()
        .map(|&n| {
            let v = compute_ijk(n, hp, sub_order)?;
            let exact = jn_exact(n, hp)?;
            Ok(AsymptoticsEntry {
                n,
                i: v.i.export(),
                j: v.j.export(),
                k: v.k.export(),
                j_exact: exact.export(),
                laplace_prediction: laplace_prediction(n)?.export(),
                ratio: normalized_j(v.j, n),
                i_over_j: (v.i / v.j).abs(),
                k_vs_i_rel: v.k.rel_diff(&v.i),
                j_vs_exact_rel: v.j.rel_diff(&exact),
                i_below_bound: v.i.ln_mag() <= ln_i_upper_bound(n, hp),
            })
        })
        .collect::<Result<_>>()?;
    let half = entries.len() / 2;
    let tail: Vec<(usize, f64)> = entries[half..].iter().map(|e| (e.n, e.ratio)).collect();
    Ok(AsymptoticsReport {
        t,
        a: hp.a,
        mu: hp.mu,
        theta0: hp.theta0,
        n_min: n_min_for(hp),
        sub_order,
        entries,
        fitted_limit: fit_limit(&tail),
        exact_formula_limit: normalized_j(jn_exact(LIMIT_PROBE, hp)?, LIMIT_PROBE),
        sqrt_pi: PI.sqrt(),
    })
}
