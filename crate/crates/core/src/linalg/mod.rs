//! Dense and sparse linear algebra kernels used by assembly and the eigensolver.

pub mod dense;
pub mod envelope;
pub mod sparse;
pub mod tridiag;

pub use dense::{axpy, dot, norm2, Matrix};
pub use sparse::{CooBuilder, CsrMatrix};
