//! Gauss–Hermite and Gauss–Legendre rules.
//!
//! Both are built by Newton iteration on the three-term recurrence of the
//! orthonormal polynomials. The Hermite recurrence is rescaled by powers of
//! two as it runs so that orders up to 2000 (largest node ≈ 63, where the
//! polynomial is of size `e^{2000}`) stay finite; weights are therefore
//! kept as logarithms.

use std::collections::HashMap;
use std::f64::consts::{LN_2, PI};
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;

use super::scaled::{ScaledComplex, ScaledSum};
use crate::error::{Error, Result};

pub const MAX_HERMITE_ORDER: usize = 2000;

const RESCALE_LIMIT: f64 = 1e150;
const RESCALE_EXP: i32 = 500;

/// An `m`-point rule for `∫ g(x) e^{-x²} dx` over the real line.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    /// Ascending nodes, symmetric about 0.
    pub nodes: Vec<f64>,
    /// `w_i`; entries can underflow to 0.0 for m ≳ 360. `ln_weights` is
    /// the authoritative copy.
    pub weights: Vec<f64>,
    pub ln_weights: Vec<f64>,
    /// `ln(w_i e^{x_i²})`, the weight with the Gaussian factored out.
    pub ln_scaled_weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// `w_i e^{x_i²}`, always of moderate size.
    pub fn scaled_weight(&self, i: usize) -> f64 {
        self.ln_scaled_weights[i].exp()
    }
}

/// Orthonormal Hermite polynomial `p_m(x)` and `p_{m-1}(x)` (weight
/// `e^{-x²}`, `p_0 = π^{-1/4}`), returned as mantissas with a shared log
/// scale: `p_k = mantissa_k · e^{ln_scale}`.
fn hermite_pair(m: usize, x: f64) -> (f64, f64, f64) {
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25);
    let mut ln_scale = 0.0;
    for j in 1..=m {
        let jf = j as f64;
        let next = x * (2.0 / jf).sqrt() * cur - ((jf - 1.0) / jf).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_LIMIT {
            let f = 2f64.powi(-RESCALE_EXP);
            cur *= f;
            prev *= f;
            ln_scale += RESCALE_EXP as f64 * LN_2;
        }
    }
    (cur, prev, ln_scale)
}

/// Number of zeros of `p_m` above `x`: the sign changes of
/// `p_0(x), …, p_m(x)` (Sturm property of the three-term recurrence).
fn zeros_above(m: usize, x: f64) -> usize {
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25);
    let mut changes = 0;
    for j in 1..=m {
        let jf = j as f64;
        let next = x * (2.0 / jf).sqrt() * cur - ((jf - 1.0) / jf).sqrt() * prev;
        if next != 0.0 && (next < 0.0) != (cur < 0.0) && cur != 0.0 {
            changes += 1;
        }
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_LIMIT {
            let f = 2f64.powi(-RESCALE_EXP);
            cur *= f;
            prev *= f;
        }
    }
    changes
}

/// Builds the `m`-point Gauss–Hermite rule.
///
/// Positive nodes are found from the largest down. Each is isolated in a
/// bracket `(lo, hi)` holding exactly one zero (checked with
/// [`zeros_above`]), starting from the usual asymptotic guesses for the
/// extreme zeros and linear extrapolation for the rest, then polished by
/// Newton steps that fall back to bisection whenever they leave the bracket.
pub fn gauss_hermite_rule(m: usize) -> Result<QuadratureRule> {
    if m == 0 || m > MAX_HERMITE_ORDER {
        return Err(Error::RuleOrderOutOfRange(m));
    }
    let half = m.div_ceil(2);
    let positive = m / 2;
    let mf = m as f64;
    let mut desc: Vec<f64> = Vec::with_capacity(half);
    let mut ln_w = Vec::with_capacity(half);

    for k in 0..half {
        let z = if k == positive {
            // odd m: middle node is exactly zero
            0.0
        } else {
            let hi = match k {
                0 => (2.0 * mf + 1.0).sqrt() + 1.0,
                _ => desc[k - 1],
            };
            let guess = match k {
                0 => (2.0 * mf + 1.0).sqrt() - 1.85575 * (2.0 * mf + 1.0).powf(-0.16667),
                1 => desc[0] - 1.14 * mf.powf(0.426) / desc[0],
                _ => 2.0 * desc[k - 1] - desc[k - 2],
            };
            bracketed_root(m, k, guess, hi)?
        };
        let (_, pm1, ln_scale) = hermite_pair(m, z);
        let deriv = (2.0 * mf).sqrt() * pm1;
        desc.push(z);
        ln_w.push(LN_2 - 2.0 * (deriv.abs().ln() + ln_scale));
    }

    for pair in desc.windows(2) {
        if pair[1] >= pair[0] {
            return Err(Error::Precondition(format!(
                "Gauss-Hermite nodes not separated for m = {m}"
            )));
        }
    }

    let mut nodes = vec![0.0; m];
    let mut ln_weights = vec![0.0; m];
    for (i, (&x, &lw)) in desc.iter().zip(&ln_w).enumerate() {
        nodes[m - 1 - i] = x;
        nodes[i] = -x;
        ln_weights[m - 1 - i] = lw;
        ln_weights[i] = lw;
    }
    let weights = ln_weights.iter().map(|lw| lw.exp()).collect();
    let ln_scaled_weights = ln_weights
        .iter()
        .zip(&nodes)
        .map(|(lw, x)| lw + x * x)
        .collect();
    Ok(QuadratureRule {
        nodes,
        weights,
        ln_weights,
        ln_scaled_weights,
    })
}

/// The `k`-th largest zero of `p_m`, known to lie below `hi`.
fn bracketed_root(m: usize, k: usize, guess: f64, hi: f64) -> Result<f64> {
    let fail = || {
        Error::Precondition(format!(
            "Gauss-Hermite root {k} of m = {m} could not be isolated"
        ))
    };
    // lower end: exactly k + 1 zeros above it
    let mut lo = if guess < hi {
        guess
    } else {
        hi - 1e-3 * hi.abs().max(1.0)
    };
    let mut step = (hi - lo).max(1e-3);
    let mut count = zeros_above(m, lo);
    let mut tries = 0;
    while count < k + 1 {
        lo -= step;
        step *= 2.0;
        count = zeros_above(m, lo);
        tries += 1;
        if tries > 200 {
            return Err(fail());
        }
    }
    let mut upper = hi;
    while count > k + 1 {
        // too many zeros above lo: raise it toward `upper`
        let mid = 0.5 * (lo + upper);
        let c = zeros_above(m, mid);
        if c > k {
            lo = mid;
            count = c;
        } else {
            upper = mid;
        }
        tries += 1;
        if tries > 400 {
            return Err(fail());
        }
    }
    let mut hi = upper;

    // p_m has sign (-1)^k just above the k-th largest zero
    let above_sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mf = m as f64;
    let mut z = if guess > lo && guess < hi {
        guess
    } else {
        0.5 * (lo + hi)
    };
    for _ in 0..300 {
        let (pm, pm1, _) = hermite_pair(m, z);
        if pm == 0.0 {
            return Ok(z);
        }
        if pm * above_sign > 0.0 {
            hi = z;
        } else {
            lo = z;
        }
        let newton = z - pm / ((2.0 * mf).sqrt() * pm1);
        let next = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let moved = (next - z).abs();
        z = next;
        if moved <= 1e-15 * z.abs().max(1.0) || hi - lo <= 4.0 * f64::EPSILON * z.abs().max(1.0) {
            return Ok(z);
        }
    }
    Err(fail())
}

type RuleCache = RwLock<HashMap<usize, Arc<QuadratureRule>>>;

/// Memoized [`gauss_hermite_rule`].
pub fn cached_gauss_hermite_rule(m: usize) -> Result<Arc<QuadratureRule>> {
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(rule) = cache.read().expect("rule cache poisoned").get(&m) {
        return Ok(Arc::clone(rule));
    }
    let rule = Arc::new(gauss_hermite_rule(m)?);
    let mut w = cache.write().expect("rule cache poisoned");
    Ok(Arc::clone(w.entry(m).or_insert(rule)))
}

/// Default rule order for inner products against `φ_0 … φ_{n_max}`.
pub fn default_rule_order(n_max: usize) -> usize {
    (4 * n_max).clamp(200, MAX_HERMITE_ORDER)
}

/// `Σ w_i g(x_i)` accumulated in scaled arithmetic.
pub fn integrate_weighted<G>(g: G, rule: &QuadratureRule) -> Result<ScaledComplex>
where
    G: Fn(f64) -> ScaledComplex,
{
    let mut acc = ScaledSum::new();
    for (&x, &lw) in rule.nodes.iter().zip(&rule.ln_weights) {
        let v = g(x);
        if !v.is_finite() {
            return Err(Error::NonFiniteSample(x));
        }
        acc.add(v.scale_ln(lw));
    }
    Ok(acc.total())
}

/// [`integrate_weighted`] for an integrand returning ordinary complex values.
pub fn integrate_weighted_complex<G>(g: G, rule: &QuadratureRule) -> Result<ScaledComplex>
where
    G: Fn(f64) -> Complex64,
{
    let mut acc = ScaledSum::new();
    for (&x, &lw) in rule.nodes.iter().zip(&rule.ln_weights) {
        let v = g(x);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFiniteSample(x));
        }
        acc.add(ScaledComplex::from_complex(v).scale_ln(lw));
    }
    Ok(acc.total())
}

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct LegendreRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl LegendreRule {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter(
                "Gauss-Legendre order must be positive".into(),
            ));
        }
        let mf = m as f64;
        let half = m.div_ceil(2);
        let mut nodes = vec![0.0; m];
        let mut weights = vec![0.0; m];
        for i in 0..half {
            let mut z = (PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
            let mut pp = 0.0;
            for _ in 0..100 {
                let (mut p1, mut p2) = (1.0, 0.0);
                for j in 1..=m {
                    let jf = j as f64;
                    let p3 = p2;
                    p2 = p1;
                    p1 = ((2.0 * jf - 1.0) * z * p2 - (jf - 1.0) * p3) / jf;
                }
                pp = mf * (z * p1 - p2) / (z * z - 1.0);
                let step = p1 / pp;
                z -= step;
                if step.abs() <= 1e-16 {
                    break;
                }
            }
            nodes[i] = -z;
            nodes[m - 1 - i] = z;
            let w = 2.0 / ((1.0 - z * z) * pp * pp);
            weights[i] = w;
            weights[m - 1 - i] = w;
        }
        Ok(Self { nodes, weights })
    }

    /// Maps the rule onto `[a, b]` and yields `(t_i, weight_i)`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        self.mapped(a, b).map(|(t, w)| w * f(t)).sum()
    }

    /// `∫_a^b e^{ln_f(t)} dt` accumulated in scaled arithmetic; `ln_f` may
    /// return `-∞` for vanishing integrand values.
    pub fn integrate_ln<F: Fn(f64) -> f64>(&self, a: f64, b: f64, ln_f: F) -> ScaledComplex {
        self.mapped(a, b)
            .map(|(t, w)| ScaledComplex::from_polar_ln(ln_f(t) + w.ln(), 0.0))
            .collect::<ScaledSum>()
            .total()
    }
}
