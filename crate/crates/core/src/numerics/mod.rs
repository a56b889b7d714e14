//! Scaled complex arithmetic and quadrature rules.

pub mod quadrature;
pub mod scaled;

pub use quadrature::{
    cached_gauss_hermite_rule, default_rule_order, gauss_hermite_rule, integrate_weighted,
    integrate_weighted_complex, LegendreRule, QuadratureRule,
};
pub use scaled::{ln_factorial, normalize_phase, ScaledComplex, ScaledExport, ScaledSum};
