//! Radial confining potentials `U` and statistics `f`, the model bundle, and
//! the model validity checks.

mod jet;
mod model;
mod radial;
mod validate;

pub use jet::{RadialJet, MAX_JET_ORDER};
pub use model::{GasModel, DEFAULT_RADIUS_CAP};
pub use radial::{Radial, RadialFunction};
pub use validate::{all_passed, validate_model, Check, Diagnostic};
