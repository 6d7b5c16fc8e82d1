//! Dense linear algebra used by the learning rules and their test oracles.

pub mod eig;
pub mod fd;
pub mod gen;
pub mod lu;
pub mod geneig;
pub mod mat;
pub mod rng;
pub mod svd;
pub mod vector;

pub use eig::{sym_eig, Spectrum};
pub use fd::{default_step, fd_gradient, fd_jacobian};
pub use gen::{make_cross, make_spd};
pub use geneig::gen_eig;
pub use mat::{fmt_f64, Mat};
pub use svd::{svd_factor, Svd};
