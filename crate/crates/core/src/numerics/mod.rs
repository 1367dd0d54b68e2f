//! Root finding, quadrature, finite differences and special functions shared
//! by the physics modules.

pub mod diff;
pub mod quadrature;
pub mod roots;
pub mod special;

pub use diff::{central_derivative, Derivative};
pub use quadrature::{adaptive_simpson, composite_gauss, gauss_legendre, integrate, Integral};
pub use roots::{brent, brent_with_values, sign_changes, SignChange};
pub use special::{gamma_ratio, ln_gamma_signed, unit_sphere_area};
mod format;
pub use format::format_f64;
