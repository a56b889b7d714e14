//! Bargmann transform, Fock-space norm, and Taylor coefficients of `Bf`
//! extracted on circles.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{HardyParams, Quadratic, Sampleable};
use crate::numerics::{ln_factorial, LegendreRule, QuadratureRule, ScaledComplex, ScaledSum};

/// Largest `|w|` accepted by [`bargmann_eval`].
pub const MAX_BARGMANN_ARG: f64 = 50.0;

/// `Bf(w) = (e^{-w²/4}/√π) ∫ e^{xw} e^{-x²/2} f(x) dx`.
///
/// The real line is moved onto `x = c + λy` with `λ = √(2/(1+ζ))`, where
/// `ζ` is the envelope width of `f`, so that the Gaussian part becomes
/// exactly `e^{-y²}`. With the saddle `c = w/(1+ζ)` the rest is the
/// polynomial part of `f` alone and no large exponentials are formed. A
/// polynomial factor evaluated far off the real axis cancels badly, so for
/// real `ζ` the line through `Re w/(1+ζ)` is also tried and the sum with
/// less cancellation is kept.
pub fn bargmann_eval<F: Sampleable + ?Sized>(
    f: &F,
    w: Complex64,
    rule: &QuadratureRule,
) -> Result<ScaledComplex> {
    if !(w.norm() <= MAX_BARGMANN_ARG) {
        return Err(Error::InvalidParameter(format!(
            "Bargmann argument |w| = {} exceeds {MAX_BARGMANN_ARG}",
            w.norm()
        )));
    }
    let zeta = f.envelope_width();
    let saddle = w / (1.0 + zeta);
    let (value, cancel) = bargmann_on_line(f, w, saddle, rule)?;
    if f.polynomial_degree() == Some(0) || zeta.im != 0.0 || w.im == 0.0 {
        return Ok(value);
    }
    let real_centre = Complex64::new(w.re / (1.0 + zeta.re), 0.0);
    let (alt, alt_cancel) = bargmann_on_line(f, w, real_centre, rule)?;
    Ok(if alt_cancel < cancel { alt } else { value })
}

/// Gauss–Hermite sum on `x = c + λy`, with its cancellation ratio
/// `Σ|tᵢ| / |Σtᵢ|`.
fn bargmann_on_line<F: Sampleable + ?Sized>(
    f: &F,
    w: Complex64,
    c: Complex64,
    rule: &QuadratureRule,
) -> Result<(ScaledComplex, f64)> {
    let zeta = f.envelope_width();
    let one_zeta = 1.0 + zeta;
    let lambda = (2.0 / one_zeta).sqrt();
    // −x²/2 + xw − w²/4 + y² with y = (x − c)/λ
    let q = Quadratic {
        quad: 0.5 * zeta,
        lin: w - one_zeta * c,
        konst: 0.5 * one_zeta * c * c - 0.25 * w * w,
    };
    let mut acc = ScaledSum::new();
    let mut mag = ScaledSum::new();
    for (i, &y) in rule.nodes.iter().enumerate() {
        let v = f.eval_weighted(c + lambda * y, &q);
        if !v.is_finite() {
            return Err(Error::NonFiniteSample(y));
        }
        let term = v.scale_ln(rule.ln_weights[i]);
        mag.add(term.modulus());
        acc.add(term);
    }
    let total = acc.total();
    let cancel = if total.is_zero() {
        f64::INFINITY
    } else {
        (mag.total().ln_mag() - total.ln_mag()).exp()
    };
    Ok((
        total * ScaledComplex::from_complex(lambda / PI.sqrt()),
        cancel,
    ))
}

/// `ln √(2^n n! √π)`.
pub fn ln_pairing_factor(n: usize) -> f64 {
    0.5 * (n as f64 * LN_2 + ln_factorial(n) + 0.5 * PI.ln())
}

/// `Bφ_n(w) = w^n / √(2^n n! √π)`.
pub fn bargmann_phi_closed(n: usize, w: Complex64) -> ScaledComplex {
    ScaledComplex::from_complex(w)
        .powi(n as i32)
        .scale_ln(-ln_pairing_factor(n))
}

/// Radial truncation heuristic `2√(2(n_eff + 10))` for a function whose
/// Taylor series is concentrated below index `n_eff`.
pub fn default_fock_radius(n_eff: usize) -> f64 {
    2.0 * (2.0 * (n_eff as f64 + 10.0)).sqrt()
}

const FOCK_SETTLE: f64 = 1e-10;
const FOCK_RADIUS_CAP: f64 = 48.0;

/// Integral of `|F|² e^{-r²/2}/√(4π)` over the annulus `r_lo ≤ |w| ≤ r_hi`,
/// Gauss–Legendre in `s = r²` and trapezoid in `θ`.
fn fock_annulus<F>(
    f: &F,
    r_lo: f64,
    r_hi: f64,
    legendre: &LegendreRule,
    n_theta: usize,
) -> Result<f64>
where
    F: Fn(Complex64) -> Result<ScaledComplex> + Sync,
{
    let nodes: Vec<(f64, f64)> = legendre.mapped(r_lo * r_lo, r_hi * r_hi).collect();
    let rows: Vec<f64> = nodes
        .par_iter()
        .map(|&(s, ws)| {
            let r = s.sqrt();
            let mut row = 0.0;
            for k in 0..n_theta {
                let theta = 2.0 * PI * k as f64 / n_theta as f64;
                let v = f(Complex64::from_polar(r, theta))?;
                if !v.is_zero() {
                    row += (2.0 * v.ln_mag() - 0.5 * s).exp();
                }
            }
            Ok(ws * row * 2.0 * PI / n_theta as f64)
        })
        .collect::<Result<_>>()?;
    // dudv = r dr dθ = ds dθ / 2
    Ok(rows.iter().sum::<f64>() * 0.5 / (4.0 * PI).sqrt())
}

/// Fock-space norm `(∫|F(w)|² e^{-|w|²/2} du dv/√(4π))^{1/2}` truncated at
/// `|w| ≤ r_max` on an `(N_r, N_θ)` grid. Fails when the shell
/// `r_max ≤ |w| ≤ r_max + 2` still moves the norm by `1e-10` or more.
pub fn fock_norm<F>(f: &F, r_max: f64, grid: (usize, usize)) -> Result<f64>
where
    F: Fn(Complex64) -> Result<ScaledComplex> + Sync,
{
    let (n_r, n_theta) = grid;
    if !(r_max > 0.0) || n_r == 0 || n_theta == 0 {
        return Err(Error::InvalidParameter(format!(
            "Fock grid needs r_max > 0 and a non-empty grid, got r_max = {r_max}, grid = {n_r}x{n_theta}"
        )));
    }
    let legendre = LegendreRule::new(n_r)?;
    let inner = fock_annulus(f, 0.0, r_max, &legendre, n_theta)?;
    let shell = fock_annulus(
        f,
        r_max,
        r_max + 2.0,
        &LegendreRule::new(n_r.min(64))?,
        n_theta,
    )?;
    let norm = inner.sqrt();
    let change = (inner + shell).sqrt() - norm;
    if !(change < FOCK_SETTLE) {
        return Err(Error::FockTruncation(change));
    }
    Ok(norm)
}

/// [`fock_norm`] starting at `r_start` and widening by 2 until the
/// truncation test passes.
pub fn fock_norm_auto<F>(f: &F, r_start: f64, grid: (usize, usize)) -> Result<f64>
where
    F: Fn(Complex64) -> Result<ScaledComplex> + Sync,
{
    let mut r = r_start;
    loop {
        match fock_norm(f, r, grid) {
            Err(Error::FockTruncation(_)) if r + 2.0 <= FOCK_RADIUS_CAP => r += 2.0,
            other => return other,
        }
    }
}

/// Circle `|w| = radius` sampled at `samples` equispaced angles, used to
/// read off the Taylor coefficient of index `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ContourSpec {
    pub n: usize,
    pub radius: f64,
    pub samples: usize,
}

/// `M ≥ 8(n+5)` resolves mode `n + 4` comfortably.
pub fn sample_floor(n: usize) -> usize {
    8 * (n + 5)
}

/// `max(256, 8(n+5))` rounded up to a power of two.
pub fn default_samples(n: usize) -> usize {
    sample_floor(n).max(256).next_power_of_two()
}

/// `(4n(n+2)/μ)^{1/4}`.
pub fn contour_radius(n: usize, mu: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::DegenerateContour);
    }
    if !(mu > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "mu must be positive, got {mu}"
        )));
    }
    let nf = n as f64;
    Ok((4.0 * nf * (nf + 2.0) / mu).powf(0.25))
}

impl ContourSpec {
    pub fn new(n: usize, radius: f64, samples: usize) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::BadRadius(radius));
        }
        let floor = sample_floor(n);
        if samples < floor {
            return Err(Error::TooFewSamples { samples, floor, n });
        }
        Ok(Self { n, radius, samples })
    }

    pub fn from_hardy(n: usize, hp: &HardyParams) -> Result<Self> {
        Self::new(n, contour_radius(n, hp.mu)?, default_samples(n))
    }

    pub fn with_samples(self, samples: usize) -> Result<Self> {
        Self::new(self.n, self.radius, samples)
    }

    pub fn with_radius(self, radius: f64) -> Result<Self> {
        Self::new(self.n, radius, self.samples)
    }
}

/// `F(r e^{2πik/M})` for `k < M`, evaluated in parallel, returned in order.
fn circle_samples<F>(f: &F, radius: f64, samples: usize) -> Result<Vec<ScaledComplex>>
where
    F: Fn(Complex64) -> Result<ScaledComplex> + Sync,
{
    (0..samples)
        .into_par_iter()
        .map(|k| {
            f(Complex64::from_polar(
                radius,
                2.0 * PI * k as f64 / samples as f64,
            ))
        })
        .collect()
}

/// `(1/M) Σ_k F_k e^{-inθ_k} / r^n` with every `stride`-th sample.
fn trapezoid_coeff(
    values: &[ScaledComplex],
    stride: usize,
    n: usize,
    radius: f64,
) -> ScaledComplex {
    let m = values.len() / stride;
    let acc: ScaledSum = (0..m)
        .map(|k| {
            let phase = -2.0 * PI * ((n * k) % m) as f64 / m as f64;
            values[k * stride] * ScaledComplex::from_polar_ln(0.0, phase)
        })
        .collect();
    acc.total()
        .scale_ln(-(n as f64) * radius.ln() - (m as f64).ln())
}

/// Taylor coefficient `c_n = (1/2πi) ∮ F(w) w^{-n-1} dw` by the trapezoid
/// rule on the circle described by `spec`.
pub fn taylor_coeff_contour<F>(f: &F, spec: &ContourSpec) -> Result<ScaledComplex>
where
    F: Fn(Complex64) -> Result<ScaledComplex> + Sync,
{
    let spec = ContourSpec::new(spec.n, spec.radius, spec.samples)?;
    let values = circle_samples(f, spec.radius, spec.samples)?;
    Ok(trapezoid_coeff(&values, 1, spec.n, spec.radius))
}

/// Several Taylor coefficients from one set of samples on `|w| = radius`.
pub fn taylor_coeffs_on_circle<F>(
    f: &F,
    radius: f64,
    samples: usize,
    indices: &[usize],
) -> Result<Vec<ScaledComplex>>
where
    F: Fn(Complex64) -> Result<ScaledComplex> + Sync,
{
    let top = indices.iter().copied().max().unwrap_or(0);
    let spec = ContourSpec::new(top, radius, samples)?;
    let values = circle_samples(f, spec.radius, spec.samples)?;
    Ok(indices
        .iter()
        .map(|&n| trapezoid_coeff(&values, 1, n, radius))
        .collect())
}

/// A contour coefficient together with its doubling certificate.
#[derive(Clone, Copy, Debug)]
pub struct ConvergedCoeff {
    pub value: ScaledComplex,
    /// Relative change between `M` and `2M` samples.
    pub doubling_change: f64,
}

/// [`taylor_coeff_contour`] at `2M` samples, with the relative change from
/// the `M`-sample value (the even-indexed subset of the same samples).
pub fn taylor_coeff_converged<F>(f: &F, spec: &ContourSpec) -> Result<ConvergedCoeff>
where
    F: Fn(Complex64) -> Result<ScaledComplex> + Sync,
{
    let spec = ContourSpec::new(spec.n, spec.radius, spec.samples)?;
    let values = circle_samples(f, spec.radius, 2 * spec.samples)?;
    let coarse = trapezoid_coeff(&values, 2, spec.n, spec.radius);
    let fine = trapezoid_coeff(&values, 1, spec.n, spec.radius);
    let doubling_change = if fine.is_zero() && coarse.is_zero() {
        0.0
    } else {
        coarse.rel_diff(&fine)
    };
    Ok(ConvergedCoeff {
        value: fine,
        doubling_change,
    })
}

/// `⟨f, φ_n⟩ = √(2^n n! √π) c_n` with `c_n` read off `Bf` on the circle of
/// radius `(4n(n+2)/μ)^{1/4}`.
pub fn coeff_from_contour<F: Sampleable + ?Sized>(
    f: &F,
    n: usize,
    hp: &HardyParams,
    rule: &QuadratureRule,
) -> Result<ScaledComplex> {
    let spec = ContourSpec::from_hardy(n, hp)?;
    let c = taylor_coeff_contour(&|w| bargmann_eval(f, w, rule), &spec)?;
    Ok(c.scale_ln(ln_pairing_factor(n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{extremal_z, GaussianParam, HardyParams, SampledFn, TestFunction};
    use crate::numerics::gauss_hermite_rule;

    const PI_M14: f64 = 0.751_125_544_464_942_5;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn transform_of_phi0_is_constant() {
        let rule = gauss_hermite_rule(60).unwrap();
        for w in [c(0.0, 0.0), c(2.0, -1.0), c(-7.0, 3.0), c(0.0, 20.0)] {
            let v = bargmann_eval(&TestFunction::basis(0), w, &rule).unwrap();
            assert!((v.to_complex() - PI_M14).norm() < 1e-14, "w={w}: {v}");
        }
    }

    #[test]
    fn transform_of_phi1_at_two() {
        let rule = gauss_hermite_rule(60).unwrap();
        let v = bargmann_eval(&TestFunction::basis(1), c(2.0, 0.0), &rule).unwrap();
        assert!((v.to_complex().re - 1.062_251_932_027_197).abs() < 1e-13);
    }

    #[test]
    fn phi10_matches_closed_form() {
        let rule = gauss_hermite_rule(200).unwrap();
        let q = bargmann_eval(&TestFunction::basis(10), c(2.0, 0.0), &rule).unwrap();
        let exact = bargmann_phi_closed(10, c(2.0, 0.0));
        assert!(q.rel_diff(&exact) < 1e-9, "{}", q.rel_diff(&exact));
    }

    #[test]
    fn closed_form_values() {
        assert!((bargmann_phi_closed(0, c(3.0, 1.0)).to_complex().re - PI_M14).abs() < 1e-15);
        assert!(bargmann_phi_closed(3, c(0.0, 0.0)).is_zero());
    }

    #[test]
    fn gaussian_transform_closed_form() {
        // B f_z (w) = √(2/(1+z)) e^{(1−z) w² / (4(1+z))}
        let rule = gauss_hermite_rule(40).unwrap();
        let p = extremal_z(0.25).unwrap();
        let one = c(1.0, 0.0);
        for w in [c(0.5, 0.2), c(-9.0, 4.0), c(0.0, 30.0)] {
            let v = bargmann_eval(&p, w, &rule).unwrap();
            let exact = ScaledComplex::from_complex((2.0 / (one + p.z)).sqrt())
                * ScaledComplex::exp((one - p.z) * w * w / (4.0 * (one + p.z)));
            assert!(v.rel_diff(&exact) < 1e-13, "w={w}");
        }
    }

    #[test]
    fn linearity() {
        let rule = gauss_hermite_rule(100).unwrap();
        let (al, be) = (c(0.3, -1.2), c(2.0, 0.5));
        let f = TestFunction::basis(4);
        let g = TestFunction::basis(7);
        let sum = TestFunction::combination(vec![(4, al), (7, be)]);
        for w in [c(1.0, 1.0), c(3.5, -2.0)] {
            let lhs = bargmann_eval(&sum, w, &rule).unwrap();
            let rhs = bargmann_eval(&f, w, &rule).unwrap() * ScaledComplex::from_complex(al)
                + bargmann_eval(&g, w, &rule).unwrap() * ScaledComplex::from_complex(be);
            assert!(lhs.rel_diff(&rhs) < 1e-12);
        }
    }

    #[test]
    fn generic_closure_uses_the_same_path() {
        let rule = gauss_hermite_rule(120).unwrap();
        let f = SampledFn::new(|x: Complex64| (-0.5 * x * x).exp(), c(1.0, 0.0));
        let v = bargmann_eval(&f, c(1.5, 0.5), &rule).unwrap();
        // e^{-x²/2} = π^{1/4} φ_0, so its transform is identically 1
        assert!((v.to_complex() - 1.0).norm() < 1e-14);
        let direct = bargmann_eval(&GaussianParam::real(1.0).unwrap(), c(1.5, 0.5), &rule).unwrap();
        assert!(v.rel_diff(&direct) < 1e-13);
    }

    #[test]
    fn contour_radius_values() {
        assert!((contour_radius(1, 1.0).unwrap() - 1.861_209_718_204_198).abs() < 1e-14);
        let e = (-1f64).exp();
        assert!((contour_radius(2, e).unwrap() - (32.0 * 1f64.exp()).powf(0.25)).abs() < 1e-14);
        assert!((contour_radius(2, e).unwrap() - 3.053_944_322_738_791_7).abs() < 1e-14);
        assert!(matches!(
            contour_radius(0, 0.5),
            Err(Error::DegenerateContour)
        ));
    }

    #[test]
    fn contour_on_monomials() {
        let cube = |w: Complex64| Ok(ScaledComplex::from_complex(w * w * w));
        let fifth = |w: Complex64| Ok(ScaledComplex::from_complex(w.powi(5)));
        for r in [0.5, 2.0, 9.0] {
            let spec = ContourSpec::new(3, r, 256).unwrap();
            let v = taylor_coeff_contour(&cube, &spec).unwrap();
            assert!((v.to_complex() - 1.0).norm() < 1e-13);
            let z = taylor_coeff_contour(&fifth, &spec).unwrap();
            assert!(z.abs() <= 1e-13 * r * r);
        }
        assert!(matches!(
            ContourSpec::new(3, 0.0, 256),
            Err(Error::BadRadius(_))
        ));
        assert!(matches!(
            ContourSpec::new(30, 1.0, 256),
            Err(Error::TooFewSamples { floor: 280, .. })
        ));
    }

    #[test]
    fn contour_on_phi_transform() {
        let hp = HardyParams::from_t(0.25).unwrap();
        for n in [1usize, 6, 25] {
            let spec = ContourSpec::from_hardy(n, &hp).unwrap();
            let f = |w: Complex64| Ok(bargmann_phi_closed(n, w));
            let v = taylor_coeff_contour(&f, &spec).unwrap();
            let exact = ScaledComplex::from_polar_ln(-ln_pairing_factor(n), 0.0);
            assert!(v.rel_diff(&exact) < 1e-12);
        }
    }

    #[test]
    fn pairing_identity_on_basis_and_gaussian() {
        let rule = gauss_hermite_rule(200).unwrap();
        let hp = HardyParams::from_t(0.25).unwrap();
        let v = coeff_from_contour(&TestFunction::basis(2), 2, &hp, &rule).unwrap();
        assert!((v.to_complex() - 1.0).norm() < 1e-8);
        let g = GaussianParam::real(1.0).unwrap();
        let v = coeff_from_contour(&g, 2, &hp, &rule).unwrap();
        assert!(v.abs() < 1e-10);
    }

    #[test]
    fn radius_independence_and_doubling() {
        let rule = gauss_hermite_rule(60).unwrap();
        let hp = HardyParams::from_t(0.25).unwrap();
        let f = extremal_z(0.25).unwrap();
        let bf = |w| bargmann_eval(&f, w, &rule);
        for n in [4usize, 20] {
            let spec = ContourSpec::from_hardy(n, &hp).unwrap();
            let a = taylor_coeff_contour(&bf, &spec).unwrap();
            let b =
                taylor_coeff_contour(&bf, &spec.with_radius(1.3 * spec.radius).unwrap()).unwrap();
            assert!(a.rel_diff(&b) < 1e-8, "n={n}: {}", a.rel_diff(&b));
            let conv = taylor_coeff_converged(&bf, &spec).unwrap();
            assert!(
                conv.doubling_change <= 1e-12,
                "n={n}: {}",
                conv.doubling_change
            );
        }
    }

    #[test]
    fn fock_norm_isometry_on_basis() {
        let rule = gauss_hermite_rule(60).unwrap();
        for k in [0usize, 5] {
            let f = TestFunction::basis(k);
            let norm = fock_norm_auto(
                &|w| bargmann_eval(&f, w, &rule),
                default_fock_radius(k),
                (128, 64),
            )
            .unwrap();
            assert!((norm - 1.0).abs() < 1e-8, "k={k}: {norm}");
        }
    }

    #[test]
    fn fock_truncation_is_reported() {
        let f = |w: Complex64| Ok(bargmann_phi_closed(30, w));
        assert!(matches!(
            fock_norm(&f, 4.0, (64, 64)),
            Err(Error::FockTruncation(_))
        ));
    }
}
