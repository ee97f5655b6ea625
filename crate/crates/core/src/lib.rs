//! Zero-energy states of the (2+1)-dimensional Dirac equation on the
//! conformally flat spacetime `ds^2 = Omega^2(x) (dt^2 - dx^2) - dy^2` with a
//! scalar potential `V(x) = k_v Omega(x)`.
//!
//! * [`geometry`]: frames, connections and gamma matrices, with
//!   finite-difference oracles.
//! * [`conformal`]: the admissible conformal factors and their integrals.
//! * [`zeromode`]: analytic zero modes, admissibility, degeneracy and
//!   normalization.
//! * [`discrete`]: central-difference discretization used to certify the
//!   analytic modes and to look for near-zero eigenvalues.
//! * [`verify`]: the verification checks shared by the CLI and the tests.
//! * [`cli`]: the `curved-dirac` command line front end.

pub mod cli;
pub mod conformal;
pub mod discrete;
pub mod error;
pub mod geometry;
pub mod quadrature;
pub mod verify;
pub mod zeromode;

pub use conformal::{ConformalFactor, Family};
pub use error::{Error, Result};
pub use zeromode::{Branch, PhysicalParams, ZeroMode};
