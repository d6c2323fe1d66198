//! Dense linear algebra, root finding, quadrature and bounded minimization.

mod eigen;
mod matrix;
mod optimize;
mod quad;
mod roots;

pub use eigen::{eig_hermitian, EigenDecomposition};
pub(crate) use eigen::fix_phases;
pub use matrix::{inner, norm, ComplexMatrix, HermitianOperator, I, ONE, ZERO};
pub use optimize::{minimize_bounded, Minimum, OptimizerSettings};
pub use quad::integrate_adaptive;
pub use roots::real_roots_cubic;
