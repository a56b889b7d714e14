//! Pointwise Gaussian-type upper bounds on `|Bf|` for `f` in a Hardy class,
//! and their check on a polar grid.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::bargmann::bargmann_eval;
use crate::error::{Error, Result};
use crate::family::{HardyParams, TestFunction};
use crate::numerics::QuadratureRule;

/// Slack allowed when counting violations of the fitted bound.
pub const VIOLATION_SLACK: f64 = 1e-12;

/// Logs of the three bounds at `(r, θ)` without the common prefactor:
/// the two quadratic-form bounds, and the sector bound when `θ` lies in
/// one of the sectors `θ_0 ≤ θ − kπ/2 ≤ π/2 − θ_0` (otherwise `None`).
pub fn ln_bound_terms(hp: &HardyParams, r: f64, theta: f64) -> (f64, f64, Option<f64>) {
    let theta = theta.rem_euclid(TAU);
    let mu = hp.mu;
    let r2 = 0.25 * r * r;
    let b3 = (mu + (1.0 - mu) * theta.sin().powi(2)) * r2;
    let b4 = (mu + (1.0 - mu) * theta.cos().powi(2)) * r2;
    let reduced = theta.rem_euclid(FRAC_PI_2);
    let in_sector = reduced >= hp.theta0 && reduced <= FRAC_PI_2 - hp.theta0;
    let b5 = in_sector.then(|| hp.sqrt_mu() * (2.0 * theta).sin().abs() * r2);
    (b3, b4, b5)
}

/// `ln √(2/(1+a))`.
fn ln_prefactor(hp: &HardyParams) -> f64 {
    0.5 * (2.0 / (1.0 + hp.a)).ln()
}

/// Log of the envelope: `ln √(2/(1+a))` plus the smallest applicable bound.
pub fn ln_envelope_bound(hp: &HardyParams, r: f64, theta: f64) -> f64 {
    let (b3, b4, b5) = ln_bound_terms(hp, r, theta);
    ln_prefactor(hp) + b5.map_or(b3.min(b4), |b| b.min(b3).min(b4))
}

/// `√(2/(1+a))` times the pointwise minimum of the applicable bounds.
pub fn envelope_bound(hp: &HardyParams, r: f64, theta: f64) -> f64 {
    ln_envelope_bound(hp, r, theta).exp()
}

/// `n` geometric points from `lo` to `hi`.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let step = (hi / lo).ln() / (n - 1) as f64;
    (0..n).map(|i| lo * (step * i as f64).exp()).collect()
}

/// `n` uniform angles in `[0, 2π)`.
pub fn angle_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| TAU * k as f64 / n as f64).collect()
}

/// Innermost radius of the verification grid.
pub const GRID_R_MIN: f64 = 0.1;

#[derive(Clone, Debug, Serialize)]
pub struct EnvelopeReport {
    pub a: f64,
    pub mu: f64,
    pub theta0: f64,
    /// Largest `|Bf| / envelope` on the fitting sub-grid (every 4th point
    /// in each direction).
    pub fitted_c: f64,
    pub r_grid: Vec<f64>,
    pub theta_grid: Vec<f64>,
    pub extra_radii: Vec<f64>,
    pub points_checked: usize,
    /// Points with `|Bf| > C · envelope · (1 + 1e-12)`.
    pub violations: usize,
    /// `sup |Bf| / (C · envelope)` over every checked point.
    pub max_ratio: f64,
}

/// `ln |Bf| − ln envelope` on the rows `radii × thetas`.
fn ln_ratios(
    f: &TestFunction,
    hp: &HardyParams,
    radii: &[f64],
    thetas: &[f64],
    rule: &QuadratureRule,
) -> Result<Vec<Vec<f64>>> {
    radii
        .par_iter()
        .map(|&r| {
            thetas
                .iter()
                .map(|&th| {
                    let v = bargmann_eval(f, Complex64::from_polar(r, th), rule)?;
                    Ok(v.ln_mag() - ln_envelope_bound(hp, r, th))
                })
                .collect()
        })
        .collect()
}

/// Fits `C` on every 4th grid point, then counts points of the full grid
/// and of the `extra_radii` circles (same angles) where `|Bf|` exceeds
/// `C` times the envelope.
pub fn verify_envelope(
    f: &TestFunction,
    hp: &HardyParams,
    grid: (usize, usize),
    r_max: f64,
    extra_radii: &[f64],
    rule: &QuadratureRule,
) -> Result<EnvelopeReport> {
    if !f.in_hardy_class(hp.a) {
        return Err(Error::Precondition(format!(
            "function is not in the Hardy class with a = {}",
            hp.a
        )));
    }
    let (n_r, n_theta) = grid;
    if n_r == 0 || n_theta == 0 || !(r_max > GRID_R_MIN) {
        return Err(Error::InvalidParameter(format!(
            "envelope grid needs N_r, N_theta >= 1 and r_max > {GRID_R_MIN}"
        )));
    }
    let r_grid = geometric_grid(GRID_R_MIN, r_max, n_r);
    let theta_grid = angle_grid(n_theta);
    let mut table = ln_ratios(f, hp, &r_grid, &theta_grid, rule)?;
    let fit_max = table
        .iter()
        .step_by(4)
        .flat_map(|row| row.iter().step_by(4))
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let fitted_c = fit_max.exp();
    table.extend(ln_ratios(f, hp, extra_radii, &theta_grid, rule)?);

    let limit = (1.0 + VIOLATION_SLACK).ln();
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    for v in table.iter().flatten() {
        let excess = v - fit_max;
        if excess > limit {
            violations += 1;
        }
        worst = worst.max(excess);
    }
    Ok(EnvelopeReport {
        a: hp.a,
        mu: hp.mu,
        theta0: hp.theta0,
        fitted_c,
        r_grid,
        theta_grid,
        extra_radii: extra_radii.to_vec(),
        points_checked: table.iter().map(Vec::len).sum(),
        violations,
        max_ratio: worst.exp(),
    })
}
