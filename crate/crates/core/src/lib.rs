//! z-measures on Young diagrams, the determinantal point process they induce on
//! the half-integer lattice, and its hypergeometric correlation kernel.
//!
//! The crate is organised bottom-up:
//!
//! - [`partition`]: Young diagrams, Frobenius coordinates, dimensions, enumeration
//!   and the embedding of diagrams into lattice configurations.
//! - [`specfun`]: log-gamma, Pochhammer symbols, the Gauss function at
//!   `w = xi/(xi-1)`, Whittaker functions and Meixner polynomials.
//! - [`measure`]: the z-measures, the negative-binomial mixture and the
//!   Plancherel limit.
//! - [`kernel`]: the L-operator, the hypergeometric kernel, the Meixner kernel and
//!   the Whittaker kernel.
//! - [`verify`]: brute-force oracles and identity suites producing
//!   [`verify::VerificationReport`]s.
//! - [`sample`]: exact seeded sampling from the mixed measure.
//! - [`cli`]: the command-line front end.

pub mod cli;
pub mod error;
pub mod kernel;
pub mod linalg;
pub mod measure;
pub mod partition;
pub mod sample;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
pub use kernel::{Block, HyperKernel, KernelBlock, Sign, WhittakerKernel};
pub use measure::{GrandParams, ZParams};
pub use partition::{Configuration, HalfInt, YoungDiagram};
pub use verify::VerificationReport;
