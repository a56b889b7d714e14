#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod bargmann;
pub mod cli;
pub mod correlation;
pub mod envelopes;
pub mod error;
pub mod family;
pub mod hermite;
pub mod numerics;

pub use error::{Error, Result};
