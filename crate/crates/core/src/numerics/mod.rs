//! Scalars, elementary functions, quadrature and random streams.

mod complex;
mod exponent;
mod power;
mod precision;
pub mod quadrature;
mod rng;

pub use complex::{Complex, ScalarJson};
pub use exponent::Exponent;
pub use power::{real_power, real_power_with, ZeroPowZero};
pub use precision::{real_to_string, scale_of, PrecisionConfig, Real, DEFAULT_DIGITS, DEFAULT_TOL_EXPONENT};
pub use quadrature::{gauss_legendre, GaussLegendre, Integrator};
pub use rng::RngStream;
