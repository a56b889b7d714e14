//! Normalized Hermite functions, Hermite coefficients by quadrature, and
//! Mehler's kernel.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::Sampleable;
use crate::numerics::{QuadratureRule, ScaledComplex, ScaledSum};

const RESCALE_LIMIT: f64 = 1e150;
const RESCALE_EXP: i64 = 500;

/// How a coefficient sequence was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CoeffMethod {
    Quadrature,
    Recurrence,
    Contour,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct CoeffParams {
    pub t: Option<f64>,
    pub a: Option<f64>,
    pub n_max: usize,
}

/// Hermite coefficients `⟨f, φ_n⟩` for `n = 0..=n_max`.
#[derive(Clone, Debug, Serialize)]
pub struct CoeffSeq {
    pub values: Vec<ScaledComplex>,
    pub method: CoeffMethod,
    pub params: CoeffParams,
}

impl CoeffSeq {
    pub fn new(values: Vec<ScaledComplex>, method: CoeffMethod, params: CoeffParams) -> Self {
        debug_assert_eq!(values.len(), params.n_max + 1);
        Self {
            values,
            method,
            params,
        }
    }

    pub fn n_max(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub fn get(&self, n: usize) -> Result<ScaledComplex> {
        self.values.get(n).copied().ok_or(Error::IndexOutOfRange {
            index: n,
            n_max: self.n_max(),
        })
    }

    pub fn max_modulus(&self) -> ScaledComplex {
        self.values
            .iter()
            .map(|v| v.modulus())
            .max_by(|a, b| a.ln_mag().total_cmp(&b.ln_mag()))
            .unwrap_or(ScaledComplex::ZERO)
    }

    /// Largest `|value| / max |value|` over entries of the given parity
    /// (0 = even indices, 1 = odd indices).
    pub fn parity_leak(&self, parity: usize) -> f64 {
        let top = self.max_modulus();
        if top.is_zero() {
            return 0.0;
        }
        self.values
            .iter()
            .enumerate()
            .filter(|(n, _)| n % 2 == parity)
            .map(|(_, v)| {
                if v.is_zero() {
                    0.0
                } else {
                    (v.ln_mag() - top.ln_mag()).exp()
                }
            })
            .fold(0.0, f64::max)
    }
}

/// `base · p_k(x)` for `k = 0..=n_max`, where `p_k` are the orthonormal
/// Hermite polynomials for the weight `e^{-x²}` (`p_0 = π^{-1/4}`).
///
/// Runs the three-term recurrence on ordinary complex mantissas with a
/// shared power-of-two rescale, so the output never overflows.
pub(crate) fn scaled_hermite_sequence(
    n_max: usize,
    x: Complex64,
    base: ScaledComplex,
) -> Vec<ScaledComplex> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut prev = Complex64::new(0.0, 0.0);
    let mut cur = Complex64::new(PI.powf(-0.25), 0.0);
    let mut shift = 0i64;
    out.push(base * ScaledComplex::from_complex(cur));
    for k in 0..n_max {
        let kf = k as f64;
        let next = x * (2.0 / (kf + 1.0)).sqrt() * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.norm() > RESCALE_LIMIT {
            let f = 2f64.powi(-RESCALE_EXP as i32);
            cur *= f;
            prev *= f;
            shift += RESCALE_EXP;
        }
        out.push((base * ScaledComplex::from_complex(cur)).mul_pow2(shift));
    }
    out
}

/// `φ_0(x) … φ_{n_max}(x)` by the upward recurrence
/// `φ_{n+1} = x√(2/(n+1)) φ_n − √(n/(n+1)) φ_{n−1}`, seeded with
/// `φ_0 = π^{-1/4} e^{-x²/2}`.
pub fn phi_eval(n_max: usize, x: f64) -> Vec<ScaledComplex> {
    let base = ScaledComplex::from_polar_ln(-0.5 * x * x, 0.0);
    scaled_hermite_sequence(n_max, Complex64::new(x, 0.0), base)
}

/// `⟨f, φ_n⟩ = ∫ f(x) φ_n(x) dx` for `n = 0..=n_max`.
///
/// Written against the rule's weight as
/// `Σ_i (w_i e^{x_i²}) f(x_i) φ_n(x_i)`: every factor stays of moderate
/// size, so no Gaussian is ever formed explicitly at the outer nodes.
pub fn hermite_coeffs_quadrature<F: Sampleable + ?Sized>(
    f: &F,
    n_max: usize,
    rule: &QuadratureRule,
) -> Result<CoeffSeq> {
    let needed = 2 * n_max;
    if rule.order() < needed {
        return Err(Error::RuleTooSmall {
            order: rule.order(),
            n_max,
            needed,
        });
    }
    let mut sums = vec![ScaledSum::new(); n_max + 1];
    for (i, &x) in rule.nodes.iter().enumerate() {
        let fx = f.eval(Complex64::new(x, 0.0));
        if !fx.is_finite() {
            return Err(Error::NonFiniteSample(x));
        }
        let weighted = fx.scale_ln(rule.ln_scaled_weights[i]);
        for (acc, phi) in sums.iter_mut().zip(phi_eval(n_max, x)) {
            acc.add(weighted * phi);
        }
    }
    Ok(CoeffSeq::new(
        sums.iter().map(ScaledSum::total).collect(),
        CoeffMethod::Quadrature,
        CoeffParams {
            n_max,
            ..Default::default()
        },
    ))
}

/// Mehler's kernel `Σ_n r^n φ_n(x) φ_n(y)` in closed form:
/// `π^{-1/2}(1−r²)^{-1/2} exp(−(1+r²)(x²+y²)/(2(1−r²)) + 2rxy/(1−r²))`.
pub fn mehler_kernel(r: Complex64, x: f64, y: f64) -> Result<ScaledComplex> {
    if r.norm() > 0.95 {
        return Err(Error::MehlerRadius(r.norm()));
    }
    let one = Complex64::new(1.0, 0.0);
    let d = one - r * r;
    let exponent = -(one + r * r) * (x * x + y * y) / (2.0 * d) + 2.0 * r * x * y / d;
    let prefactor = ScaledComplex::from_complex(d.sqrt().inv() / PI.sqrt());
    Ok(prefactor * ScaledComplex::exp(exponent))
}
