//! Exact-solution oracles and the special functions behind them.

pub mod closed;
pub mod coeffs;
pub mod quadrature;
pub mod series;
pub mod special;

pub use closed::{closed_form, ClosedValue};
pub use coeffs::{b_1d, b_2d, b_3d, coeffs_1d, coeffs_2d, coeffs_3d, CoeffTable};
pub use series::{series_solution, FourierOracle, OracleKind};
pub use special::{bessel_i, bessel_i_scaled, hyper_3f4, hyper_pfq};
