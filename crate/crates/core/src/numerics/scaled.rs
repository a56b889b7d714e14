//! Complex numbers with an unbounded exponent range.
//!
//! Everything that grows or decays like `e^{±n}` in this crate (Gaussian
//! factors on large contours, `2^n n!`, `r^n`, coefficient tails) lives in
//! this representation so that no intermediate overflows or underflows.

use std::f64::consts::{LN_2, PI, TAU};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::Serialize;

/// Residual modulus below which a sum collapses to the zero element.
const CANCEL_FLOOR: f64 = 1e-300;

// Cody-Waite split of ln 2; `k * LN2_HI` is exact for |k| < 2^20.
const LN2_HI: f64 = 6.931_471_803_691_238e-1;
const LN2_LO: f64 = 1.908_214_929_270_587_7e-10;

/// Reduces an angle into `(-π, π]`.
pub fn normalize_phase(phase: f64) -> f64 {
    if phase > -PI && phase <= PI {
        return phase;
    }
    let mut p = phase.rem_euclid(TAU);
    if p > PI {
        p -= TAU;
    }
    p
}

/// Binary exponent `e` with `x = f · 2^e`, `|f| ∈ [0.5, 1)`; `x` finite, nonzero.
fn frexp(x: f64) -> i64 {
    let bits = x.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i64;
    if biased == 0 {
        // subnormal
        return frexp(x * 2f64.powi(64)) - 64;
    }
    biased - 1022
}

/// `x · 2^k` without intermediate overflow for any `k`.
fn ldexp(mut x: f64, mut k: i64) -> f64 {
    while k > 1000 {
        x *= 2f64.powi(1000);
        k -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while k < -1000 {
        x *= 2f64.powi(-1000);
        k += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(k as i32)
}

fn ldexp_c(z: Complex64, k: i64) -> Complex64 {
    Complex64::new(ldexp(z.re, k), ldexp(z.im, k))
}

/// `e^{iφ}`, exact on the axes so that real values stay real.
fn unit(phase: f64) -> Complex64 {
    if phase == 0.0 {
        Complex64::new(1.0, 0.0)
    } else if phase == PI || phase == -PI {
        Complex64::new(-1.0, 0.0)
    } else if phase == 0.5 * PI {
        Complex64::new(0.0, 1.0)
    } else if phase == -0.5 * PI {
        Complex64::new(0.0, -1.0)
    } else {
        let (s, c) = phase.sin_cos();
        Complex64::new(c, s)
    }
}

/// A complex value `e^{ln_mag} · e^{i·phase}`, or exactly zero.
///
/// Stored as a complex mantissa with `max(|re|, |im|) ∈ [0.5, 1)` and a
/// binary exponent, so that scaling by powers of two is exact and the
/// relative precision does not degrade with the size of `ln_mag`.
/// `ln_mag()` and `phase()` are derived on demand.
#[derive(Clone, Copy, Debug)]
pub struct ScaledComplex {
    mantissa: Complex64,
    exponent: i64,
    is_zero: bool,
}

impl ScaledComplex {
    pub const ZERO: ScaledComplex = ScaledComplex {
        mantissa: Complex64 { re: 0.0, im: 0.0 },
        exponent: 0,
        is_zero: true,
    };

    pub const ONE: ScaledComplex = ScaledComplex {
        mantissa: Complex64 { re: 0.5, im: 0.0 },
        exponent: 1,
        is_zero: false,
    };

    fn normalized(mantissa: Complex64, exponent: i64) -> Self {
        let big = mantissa.re.abs().max(mantissa.im.abs());
        if big == 0.0 {
            return Self::ZERO;
        }
        let shift = frexp(big);
        let mut m = ldexp_c(mantissa, -shift);
        // keep phases off the -π branch
        if m.im == 0.0 {
            m.im = 0.0;
        }
        Self {
            mantissa: m,
            exponent: exponent + shift,
            is_zero: false,
        }
    }

    /// Builds a value from its log-modulus and phase. `ln_mag = -∞` yields
    /// the zero element.
    pub fn from_polar_ln(ln_mag: f64, phase: f64) -> Self {
        if ln_mag == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        if !ln_mag.is_finite() || !phase.is_finite() {
            return Self {
                mantissa: Complex64::new(f64::NAN, f64::NAN),
                exponent: 0,
                is_zero: false,
            };
        }
        let k = (ln_mag / LN_2).round();
        let frac = (ln_mag - k * LN2_HI) - k * LN2_LO;
        Self::normalized(unit(phase) * frac.exp(), k as i64)
    }

    pub fn from_complex(z: Complex64) -> Self {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Self {
                mantissa: z,
                exponent: 0,
                is_zero: false,
            };
        }
        Self::normalized(z, 0)
    }

    pub fn from_real(x: f64) -> Self {
        Self::from_complex(Complex64::new(x, 0.0))
    }

    /// `e^{exponent}` for a complex exponent; never overflows.
    pub fn exp(exponent: Complex64) -> Self {
        Self::from_polar_ln(exponent.re, exponent.im)
    }

    /// `mantissa · e^{ln_scale}`.
    pub fn from_mantissa(mantissa: Complex64, ln_scale: f64) -> Self {
        Self::from_complex(mantissa) * Self::from_polar_ln(ln_scale, 0.0)
    }

    pub fn ln_mag(&self) -> f64 {
        if self.is_zero {
            return f64::NEG_INFINITY;
        }
        self.mantissa.norm().ln() + self.exponent as f64 * LN_2
    }

    /// Argument in `(-π, π]`; 0 for the zero element.
    pub fn phase(&self) -> f64 {
        if self.is_zero {
            return 0.0;
        }
        normalize_phase(self.mantissa.im.atan2(self.mantissa.re))
    }

    pub fn is_zero(&self) -> bool {
        self.is_zero
    }

    /// `log10 |z|`, `-∞` for zero.
    pub fn log10_abs(&self) -> f64 {
        self.ln_mag() / std::f64::consts::LN_10
    }

    /// Converts to an ordinary complex number; overflows to infinity or
    /// underflows to zero outside the `f64` range.
    pub fn to_complex(&self) -> Complex64 {
        if self.is_zero {
            return Complex64::new(0.0, 0.0);
        }
        ldexp_c(self.mantissa, self.exponent)
    }

    /// `|z|` as a plain float (may overflow/underflow).
    pub fn abs(&self) -> f64 {
        if self.is_zero {
            return 0.0;
        }
        ldexp(self.mantissa.norm(), self.exponent)
    }

    /// `|z|` as a scaled value with zero phase.
    pub fn modulus(&self) -> Self {
        if self.is_zero {
            return Self::ZERO;
        }
        Self::normalized(Complex64::new(self.mantissa.norm(), 0.0), self.exponent)
    }

    pub fn conj(&self) -> Self {
        Self {
            mantissa: self.mantissa.conj(),
            ..*self
        }
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero, "reciprocal of the zero element");
        Self::normalized(self.mantissa.inv(), -self.exponent)
    }

    pub fn powi(&self, k: i32) -> Self {
        if k < 0 {
            return self.recip().powi(-k);
        }
        let mut base = *self;
        let mut out = Self::ONE;
        let mut k = k as u32;
        while k > 0 {
            if k & 1 == 1 {
                out = out * base;
            }
            base = base * base;
            k >>= 1;
        }
        out
    }

    /// Multiplies by `2^k` exactly.
    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero {
            return *self;
        }
        Self {
            exponent: self.exponent + k,
            ..*self
        }
    }

    /// Multiplies by `e^{ln_factor}` for a real `ln_factor`.
    pub fn scale_ln(&self, ln_factor: f64) -> Self {
        *self * Self::from_polar_ln(ln_factor, 0.0)
    }

    pub fn scale(&self, factor: f64) -> Self {
        *self * Self::from_real(factor)
    }

    /// Relative distance `|self − other| / |other|`; infinite when `other`
    /// is zero and `self` is not.
    pub fn rel_diff(&self, other: &Self) -> f64 {
        let d = *self - *other;
        if d.is_zero {
            return 0.0;
        }
        if other.is_zero {
            return f64::INFINITY;
        }
        let r = Self::normalized(d.mantissa / other.mantissa, d.exponent - other.exponent);
        r.abs()
    }

    pub fn is_finite(&self) -> bool {
        self.is_zero || (self.mantissa.re.is_finite() && self.mantissa.im.is_finite())
    }
}

impl Default for ScaledComplex {
    fn default() -> Self {
        Self::ZERO
    }
}

impl PartialEq for ScaledComplex {
    fn eq(&self, other: &Self) -> bool {
        match (self.is_zero, other.is_zero) {
            (true, true) => true,
            (false, false) => self.mantissa == other.mantissa && self.exponent == other.exponent,
            _ => false,
        }
    }
}

impl Mul for ScaledComplex {
    type Output = ScaledComplex;

    fn mul(self, rhs: Self) -> Self {
        if self.is_zero || rhs.is_zero {
            return Self::ZERO;
        }
        Self::normalized(self.mantissa * rhs.mantissa, self.exponent + rhs.exponent)
    }
}

impl Div for ScaledComplex {
    type Output = ScaledComplex;

    fn div(self, rhs: Self) -> Self {
        assert!(!rhs.is_zero, "division by the zero element");
        if self.is_zero {
            return Self::ZERO;
        }
        Self::normalized(self.mantissa / rhs.mantissa, self.exponent - rhs.exponent)
    }
}

impl Neg for ScaledComplex {
    type Output = ScaledComplex;

    fn neg(self) -> Self {
        if self.is_zero {
            return self;
        }
        Self::normalized(-self.mantissa, self.exponent)
    }
}

impl Add for ScaledComplex {
    type Output = ScaledComplex;

    fn add(self, rhs: Self) -> Self {
        if self.is_zero {
            return rhs;
        }
        if rhs.is_zero {
            return self;
        }
        let top = self.exponent.max(rhs.exponent);
        let residual =
            ldexp_c(self.mantissa, self.exponent - top) + ldexp_c(rhs.mantissa, rhs.exponent - top);
        if residual.norm() < CANCEL_FLOOR {
            return Self::ZERO;
        }
        Self::normalized(residual, top)
    }
}

impl Sub for ScaledComplex {
    type Output = ScaledComplex;

    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl From<Complex64> for ScaledComplex {
    fn from(z: Complex64) -> Self {
        Self::from_complex(z)
    }
}

impl From<f64> for ScaledComplex {
    fn from(x: f64) -> Self {
        Self::from_real(x)
    }
}

impl fmt::Display for ScaledComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero {
            write!(f, "0")
        } else {
            write!(f, "exp({})·e^(i·{})", self.ln_mag(), self.phase())
        }
    }
}

/// Export form of a scaled value: `log10 |z|` and phase always, plus the
/// plain components when they fit comfortably in an `f64`. Zero exports
/// with `log10_abs = None` and plain components `0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScaledExport {
    pub log10_abs: Option<f64>,
    pub phase: f64,
    pub re: Option<f64>,
    pub im: Option<f64>,
}

impl ScaledComplex {
    pub fn export(&self) -> ScaledExport {
        if self.is_zero {
            return ScaledExport {
                log10_abs: None,
                phase: 0.0,
                re: Some(0.0),
                im: Some(0.0),
            };
        }
        let log10 = self.log10_abs();
        let plain = (-300.0..=300.0).contains(&log10).then(|| self.to_complex());
        ScaledExport {
            log10_abs: Some(log10),
            phase: self.phase(),
            re: plain.map(|z| z.re),
            im: plain.map(|z| z.im),
        }
    }
}

impl Serialize for ScaledComplex {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        self.export().serialize(serializer)
    }
}

/// Running sum of scaled terms sharing one binary exponent; the exponent
/// only moves when a larger term arrives.
#[derive(Clone, Copy, Debug)]
pub struct ScaledSum {
    exponent: i64,
    mantissa: Complex64,
    empty: bool,
}

impl Default for ScaledSum {
    fn default() -> Self {
        Self::new()
    }
}

impl ScaledSum {
    pub fn new() -> Self {
        Self {
            exponent: 0,
            mantissa: Complex64::new(0.0, 0.0),
            empty: true,
        }
    }

    pub fn add(&mut self, term: ScaledComplex) {
        if term.is_zero {
            return;
        }
        if self.empty {
            self.exponent = term.exponent;
            self.mantissa = term.mantissa;
            self.empty = false;
            return;
        }
        if term.exponent > self.exponent {
            self.mantissa = ldexp_c(self.mantissa, self.exponent - term.exponent);
            self.exponent = term.exponent;
        }
        self.mantissa += ldexp_c(term.mantissa, term.exponent - self.exponent);
    }

    pub fn total(&self) -> ScaledComplex {
        if self.empty || self.mantissa.norm() < CANCEL_FLOOR {
            return ScaledComplex::ZERO;
        }
        ScaledComplex::normalized(self.mantissa, self.exponent)
    }
}

impl FromIterator<ScaledComplex> for ScaledSum {
    fn from_iter<I: IntoIterator<Item = ScaledComplex>>(iter: I) -> Self {
        let mut acc = ScaledSum::new();
        for t in iter {
            acc.add(t);
        }
        acc
    }
}

/// `ln n!` by summed logarithms.
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sc(ln: f64, ph: f64) -> ScaledComplex {
        ScaledComplex::from_polar_ln(ln, ph)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn unit_times_minus_one() {
        let p = sc(0.0, 0.0) * sc(0.0, PI);
        assert_eq!(p.ln_mag(), 0.0);
        assert!((p.phase() - PI).abs() < 1e-15);
    }

    #[test]
    fn exponents_add() {
        let p = sc(100.0, 0.0) * sc(200.0, 0.0);
        assert!((p.ln_mag() - 300.0).abs() < 1e-13);
        assert_eq!(p.phase(), 0.0);
    }

    #[test]
    fn zero_absorbs_and_is_identity() {
        let x = sc(3.0, 1.0);
        assert!((x * ScaledComplex::ZERO).is_zero());
        assert_eq!(x + ScaledComplex::ZERO, x);
        assert_eq!(ScaledComplex::ZERO + x, x);
    }

    #[test]
    fn doubling() {
        let s = sc(100.0, 0.0) + sc(100.0, 0.0);
        assert!((s.ln_mag() - (100.0 + 2f64.ln())).abs() < 1e-13);
        assert!(s.phase().abs() < 1e-15);
    }

    #[test]
    fn exact_cancellation_gives_zero() {
        assert!((sc(0.0, 0.0) + sc(0.0, PI)).is_zero());
    }

    #[test]
    fn zero_compares_equal_regardless_of_parts() {
        let z = ScaledComplex::from_complex(Complex64::new(0.0, 0.0));
        assert_eq!(z, ScaledComplex::ZERO);
        assert_eq!(
            ScaledComplex::from_polar_ln(f64::NEG_INFINITY, 2.0),
            ScaledComplex::ZERO
        );
    }

    #[test]
    fn phase_normalization_range() {
        for p in [-10.0, -PI, -PI + 1e-9, 0.0, PI, 3.5, 100.0] {
            let n = normalize_phase(p);
            assert!(n > -PI && n <= PI, "{p} -> {n}");
            assert!(((n - p) / TAU - ((n - p) / TAU).round()).abs() < 1e-12);
        }
        assert_eq!(normalize_phase(-PI), PI);
    }

    #[test]
    fn ln_factorial_small() {
        assert_eq!(ln_factorial(0), 0.0);
        assert!((ln_factorial(5) - 120f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn scaled_sum_matches_pairwise_add() {
        let terms: Vec<_> = (0..50)
            .map(|k| sc(k as f64 * 0.7 - 20.0, k as f64 * 0.31))
            .collect();
        let acc: ScaledSum = terms.iter().copied().collect();
        let pairwise = terms.iter().fold(ScaledComplex::ZERO, |a, &b| a + b);
        assert!(acc.total().rel_diff(&pairwise) < 1e-13);
    }

    fn representable() -> impl Strategy<Value = Complex64> {
        (-300.0f64..300.0, -PI..PI)
            .prop_map(|(e, ph)| Complex64::from_polar(10f64.powf(e / 2.0), ph))
    }

    proptest! {
        #[test]
        fn round_trip_is_exact(z in representable()) {
            let back = ScaledComplex::from_complex(z).to_complex();
            prop_assert!(rel(back, z) < 1e-15 * 4.0);
        }

        #[test]
        fn mul_matches_complex_product(
            a in (-1e3f64..1e3, -1e3f64..1e3),
            b in (-1e3f64..1e3, -1e3f64..1e3),
        ) {
            let (x, y) = (Complex64::new(a.0, a.1), Complex64::new(b.0, b.1));
            prop_assume!(x.norm() > 1e-3 && y.norm() > 1e-3);
            let p = (ScaledComplex::from(x) * ScaledComplex::from(y)).to_complex();
            prop_assert!(rel(p, x * y) < 1e-15 * 4.0);
        }

        #[test]
        fn mul_associative_commutative(
            l in prop::array::uniform3(-200.0f64..200.0),
            p in prop::array::uniform3(-PI..PI),
        ) {
            let [x, y, z] = [sc(l[0], p[0]), sc(l[1], p[1]), sc(l[2], p[2])];
            prop_assert!(((x * y) * z).rel_diff(&(x * (y * z))) < 1e-14);
            prop_assert!((x * y).rel_diff(&(y * x)) < 1e-14);
        }

        #[test]
        fn add_associative_without_cancellation(
            l in prop::array::uniform3(-5.0f64..5.0),
            p in prop::array::uniform3(-PI..PI),
        ) {
            let [x, y, z] = [sc(l[0], p[0]), sc(l[1], p[1]), sc(l[2], p[2])];
            let left = (x + y) + z;
            let max_in = l.iter().cloned().fold(f64::MIN, f64::max);
            prop_assume!(left.ln_mag() >= max_in + 1e-6f64.ln());
            prop_assert!(left.rel_diff(&(x + (y + z))) < 1e-13);
        }
    }
}
