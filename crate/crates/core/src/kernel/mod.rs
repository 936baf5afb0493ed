//! Kernel-level objects: `psi`, `R`, `S`, `P`, `Q`, the L-operator, the
//! hypergeometric kernel, the Meixner kernel and the Whittaker kernel.

pub mod functions;
pub mod hyper;
pub mod meixner;
pub mod whittaker;

pub use crate::partition::Sign;
pub use functions::{
    decay_index, hyper_factors, ln_psi, psi, psi_at, rs_at, DecayCertificate, FunctionTable, FunctionValues,
};
pub use hyper::{l_entry, Block, HyperKernel, KernelBlock};
pub use meixner::{meixner_kernel, meixner_kernel_cd, meixner_kernel_sum};
pub use whittaker::WhittakerKernel;
