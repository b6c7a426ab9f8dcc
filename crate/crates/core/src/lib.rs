//! Hyperplane sections of l_p balls through the Fourier transform of
//! exp(-|r|^p): the special function gamma_p, the Ball-type integral
//! h_p(u), its critical constants, and a distribution-function checker for
//! the inequality h_p(u) <= max(h_p(2), h_p(inf)).

pub mod ball_inequality;
pub mod constants;
pub mod error;
pub mod gamma_p;
pub mod quad;
pub mod sections;
pub mod special_fn;

pub use error::{Error, Result};
pub use gamma_p::{PExponent, QuadratureSpec};
