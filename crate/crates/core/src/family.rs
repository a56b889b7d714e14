//! The exactly solvable test family: complex-width Gaussians
//! `f_z(x) = e^{-zx²/2}` and finite combinations of Hermite functions.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hermite::{scaled_hermite_sequence, CoeffMethod, CoeffParams, CoeffSeq};
use crate::numerics::ScaledComplex;

/// Exponent `quad·x² + lin·x + konst`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadratic {
    pub quad: Complex64,
    pub lin: Complex64,
    pub konst: Complex64,
}

impl Quadratic {
    pub const ZERO: Quadratic = Quadratic {
        quad: Complex64 { re: 0.0, im: 0.0 },
        lin: Complex64 { re: 0.0, im: 0.0 },
        konst: Complex64 { re: 0.0, im: 0.0 },
    };

    pub fn at(&self, x: Complex64) -> Complex64 {
        (self.quad * x + self.lin) * x + self.konst
    }
}

/// An entire function that can be sampled anywhere in the complex plane.
pub trait Sampleable: Sync {
    /// `f(x) · e^{q(x)}`. Implementations combine the exponent with their
    /// own Gaussian factor before exponentiating.
    fn eval_weighted(&self, x: Complex64, q: &Quadratic) -> ScaledComplex;

    fn eval(&self, x: Complex64) -> ScaledComplex {
        self.eval_weighted(x, &Quadratic::ZERO)
    }

    /// Width `ζ` of the Gaussian `e^{-ζx²/2}` that carries the decay of `f`
    /// (the remaining factor is polynomial or constant).
    fn envelope_width(&self) -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    /// Degree of the polynomial factor, when known.
    fn polynomial_degree(&self) -> Option<usize> {
        None
    }
}

/// Wraps a closure as a [`Sampleable`].
pub struct SampledFn<F> {
    f: F,
    width: Complex64,
}

impl<F> SampledFn<F>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    pub fn new(f: F, envelope_width: Complex64) -> Self {
        Self {
            f,
            width: envelope_width,
        }
    }
}

impl<F> Sampleable for SampledFn<F>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    fn eval_weighted(&self, x: Complex64, q: &Quadratic) -> ScaledComplex {
        ScaledComplex::from_complex((self.f)(x)) * ScaledComplex::exp(q.at(x))
    }

    fn envelope_width(&self) -> Complex64 {
        self.width
    }
}

/// Complex width `z` of `f_z(x) = e^{-zx²/2}`, `Re z > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GaussianParam {
    pub z: Complex64,
}

impl GaussianParam {
    pub fn new(z: Complex64) -> Result<Self> {
        if !(z.re > 0.0) || !z.im.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Gaussian width needs Re z > 0, got {z}"
            )));
        }
        Ok(Self { z })
    }

    pub fn real(z: f64) -> Result<Self> {
        Self::new(Complex64::new(z, 0.0))
    }

    /// `‖f_z‖₂ = (π / Re z)^{1/4}`.
    pub fn l2_norm(&self) -> f64 {
        (PI / self.z.re).powf(0.25)
    }
}

impl Sampleable for GaussianParam {
    fn eval_weighted(&self, x: Complex64, q: &Quadratic) -> ScaledComplex {
        let shifted = Quadratic {
            quad: q.quad - 0.5 * self.z,
            ..*q
        };
        ScaledComplex::exp(shifted.at(x))
    }

    fn envelope_width(&self) -> Complex64 {
        self.z
    }

    fn polynomial_degree(&self) -> Option<usize> {
        Some(0)
    }
}

/// Hardy-class parameter `a` with `μ = (1−a)/(1+a)` and `θ_0 = arctan √μ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HardyParams {
    pub a: f64,
    pub t: Option<f64>,
    pub mu: f64,
    pub theta0: f64,
}

impl HardyParams {
    pub fn from_a(a: f64) -> Result<Self> {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "Hardy parameter a must lie in (0,1), got {a}"
            )));
        }
        let mu = (1.0 - a) / (1.0 + a);
        Ok(Self {
            a,
            t: None,
            mu,
            theta0: mu.sqrt().atan(),
        })
    }

    /// `a = tanh 2t`, so `μ = e^{-4t}` (computed directly).
    pub fn from_t(t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "t must be positive, got {t}"
            )));
        }
        let mu = (-4.0 * t).exp();
        Ok(Self {
            a: (2.0 * t).tanh(),
            t: Some(t),
            mu,
            theta0: mu.sqrt().atan(),
        })
    }

    pub fn sqrt_mu(&self) -> f64 {
        self.mu.sqrt()
    }

    /// `sin 2θ_0 = 2√μ/(1+μ)`.
    pub fn sin_2theta0(&self) -> f64 {
        (2.0 * self.theta0).sin()
    }
}

/// `e^{-zx²/2}` at real `x`.
pub fn gaussian_eval(p: &GaussianParam, x: f64) -> Complex64 {
    (-0.5 * p.z * x * x).exp()
}

/// Fourier transform `f̂_z(ξ) = z^{-1/2} e^{-ξ²/(2z)}` under
/// `f̂(ξ) = (2π)^{-1/2} ∫ f(x) e^{-iξx} dx`; returns the prefactor and the
/// transformed width `1/z`.
pub fn gaussian_fourier(p: &GaussianParam) -> (Complex64, GaussianParam) {
    let prefactor = p.z.sqrt().inv();
    (prefactor, GaussianParam { z: p.z.inv() })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Membership {
    pub member: bool,
    /// Constant `C` with `|f| ≤ C g_a` and `|f̂| ≤ C g_a`.
    pub constant: f64,
}

/// Relative slack for the boundary case `Re z = a` (the extremal family
/// sits exactly on it).
const MEMBERSHIP_SLACK: f64 = 1e-12;

/// `f_z ∈ H(a)` iff `Re z ≥ a` and `Re(1/z) ≥ a`.
pub fn hardy_membership(p: &GaussianParam, a: f64) -> Membership {
    let floor = a * (1.0 - MEMBERSHIP_SLACK);
    Membership {
        member: p.z.re >= floor && p.z.inv().re >= floor,
        constant: p.z.norm().powf(-0.5).max(1.0),
    }
}

/// Grid diagnostic for membership: `sup_{|x| ≤ x_max} |f(x)| e^{ax²/2}` and
/// the same for `f̂`, on `samples` equispaced points.
pub fn hardy_membership_grid(p: &GaussianParam, a: f64, x_max: f64, samples: usize) -> (f64, f64) {
    let (pre, dual) = gaussian_fourier(p);
    let mut sup_f: f64 = 0.0;
    let mut sup_hat: f64 = 0.0;
    for i in 0..samples {
        let x = -x_max + 2.0 * x_max * i as f64 / (samples - 1) as f64;
        let g = 0.5 * a * x * x;
        sup_f = sup_f.max((-0.5 * p.z.re * x * x + g).exp());
        sup_hat = sup_hat.max(pre.norm() * (-0.5 * dual.z.re * x * x + g).exp());
    }
    (sup_f, sup_hat)
}

/// `z = tanh 2t + i sech 2t`: `|z| = 1`, `f_z ∈ H(tanh 2t)` on the boundary.
pub fn extremal_z(t: f64) -> Result<GaussianParam> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "t must be positive, got {t}"
        )));
    }
    let s = 2.0 * t;
    GaussianParam::new(Complex64::new(s.tanh(), 1.0 / s.cosh()))
}

/// Exact Hermite coefficients of `f_z`:
/// `a_0 = √2 π^{1/4} (1+z)^{-1/2}`, odd entries vanish, and
/// `a_{n+2} = √((n+1)/(n+2)) · (1−z)/(1+z) · a_n`.
pub fn gaussian_coeff_recurrence(p: &GaussianParam, n_max: usize) -> Result<CoeffSeq> {
    let one = Complex64::new(1.0, 0.0);
    let denom = one + p.z;
    if denom.norm() == 0.0 {
        return Err(Error::InvalidParameter(
            "z = -1 is a pole of the recurrence".into(),
        ));
    }
    let ratio = ScaledComplex::from_complex((one - p.z) / denom);
    let mut values = vec![ScaledComplex::ZERO; n_max + 1];
    values[0] = ScaledComplex::from_complex(SQRT_2 * PI.powf(0.25) / denom.sqrt());
    let mut n = 0;
    while n + 2 <= n_max {
        let step = ((n as f64 + 1.0) / (n as f64 + 2.0)).sqrt();
        values[n + 2] = values[n] * ratio.scale(step);
        n += 2;
    }
    Ok(CoeffSeq::new(
        values,
        CoeffMethod::Recurrence,
        CoeffParams {
            n_max,
            ..Default::default()
        },
    ))
}

/// A member of the supported test family.
#[derive(Clone, Debug, PartialEq)]
pub enum TestFunction {
    Gaussian(GaussianParam),
    /// `Σ α_k φ_k`.
    HermiteCombination(Vec<(usize, Complex64)>),
}

impl TestFunction {
    pub fn basis(k: usize) -> Self {
        Self::HermiteCombination(vec![(k, Complex64::new(1.0, 0.0))])
    }

    pub fn combination(terms: Vec<(usize, Complex64)>) -> Self {
        Self::HermiteCombination(terms)
    }

    pub fn l2_norm(&self) -> f64 {
        match self {
            Self::Gaussian(p) => p.l2_norm(),
            Self::HermiteCombination(terms) => {
                let mut by_index = std::collections::BTreeMap::new();
                for &(k, c) in terms {
                    *by_index.entry(k).or_insert(Complex64::new(0.0, 0.0)) += c;
                }
                by_index.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
            }
        }
    }

    /// Analytic membership in `H(a)`. Finite Hermite combinations are
    /// polynomial × `e^{-x²/2}` on both sides of the Fourier transform, so
    /// they belong to every `H(a)` with `a < 1`.
    pub fn in_hardy_class(&self, a: f64) -> bool {
        match self {
            Self::Gaussian(p) => hardy_membership(p, a).member,
            Self::HermiteCombination(_) => a > 0.0 && a < 1.0,
        }
    }

    /// True when `f(-x) = ±f(x)`, i.e. all coefficients of one parity vanish.
    pub fn parity(&self) -> Option<usize> {
        match self {
            Self::Gaussian(_) => Some(0),
            Self::HermiteCombination(terms) => {
                let first = terms.first()?.0 % 2;
                terms.iter().all(|(k, _)| k % 2 == first).then_some(first)
            }
        }
    }
}

impl Sampleable for TestFunction {
    fn eval_weighted(&self, x: Complex64, q: &Quadratic) -> ScaledComplex {
        match self {
            Self::Gaussian(p) => p.eval_weighted(x, q),
            Self::HermiteCombination(terms) => {
                let top = terms.iter().map(|t| t.0).max().unwrap_or(0);
                let gauss = Quadratic {
                    quad: q.quad - 0.5,
                    ..*q
                };
                let phis = scaled_hermite_sequence(top, x, ScaledComplex::exp(gauss.at(x)));
                terms.iter().fold(ScaledComplex::ZERO, |acc, &(k, c)| {
                    acc + phis[k] * ScaledComplex::from_complex(c)
                })
            }
        }
    }

    fn envelope_width(&self) -> Complex64 {
        match self {
            Self::Gaussian(p) => p.z,
            Self::HermiteCombination(_) => Complex64::new(1.0, 0.0),
        }
    }

    fn polynomial_degree(&self) -> Option<usize> {
        match self {
            Self::Gaussian(_) => Some(0),
            Self::HermiteCombination(terms) => terms.iter().map(|t| t.0).max(),
        }
    }
}

/// Exact coefficients: the recurrence for Gaussians, the stored weights
/// for finite Hermite combinations.
pub fn exact_coeffs(f: &TestFunction, n_max: usize) -> Result<CoeffSeq> {
    match f {
        TestFunction::Gaussian(p) => gaussian_coeff_recurrence(p, n_max),
        TestFunction::HermiteCombination(terms) => {
            let mut values = vec![Complex64::new(0.0, 0.0); n_max + 1];
            for &(k, c) in terms {
                if k <= n_max {
                    values[k] += c;
                }
            }
            Ok(CoeffSeq::new(
                values
                    .into_iter()
                    .map(ScaledComplex::from_complex)
                    .collect(),
                CoeffMethod::Recurrence,
                CoeffParams {
                    n_max,
                    ..Default::default()
                },
            ))
        }
    }
}

/// Named members of the test family, parametrised by `t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// `z = tanh 2t + i sech 2t`.
    Chirped,
    /// `z = tanh 2t`.
    RealGaussian,
    Basis(usize),
}

impl Family {
    pub fn test_function(&self, t: f64) -> Result<TestFunction> {
        Ok(match *self {
            Family::Chirped => TestFunction::Gaussian(extremal_z(t)?),
            Family::RealGaussian => {
                if !(t > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "t must be positive, got {t}"
                    )));
                }
                TestFunction::Gaussian(GaussianParam::real((2.0 * t).tanh())?)
            }
            Family::Basis(k) => TestFunction::basis(k),
        })
    }

    pub fn label(&self) -> String {
        match self {
            Family::Chirped => "chirped".into(),
            Family::RealGaussian => "real-gaussian".into(),
            Family::Basis(k) => format!("basis:{k}"),
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chirped" => Ok(Family::Chirped),
            "real-gaussian" => Ok(Family::RealGaussian),
            _ => s
                .strip_prefix("basis:")
                .and_then(|k| k.parse().ok())
                .map(Family::Basis)
                .ok_or_else(|| {
                    Error::InvalidParameter(format!(
                        "unknown family '{s}' (expected chirped, real-gaussian or basis:K)"
                    ))
                }),
        }
    }
}

impl Serialize for Family {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.label())
    }
}
