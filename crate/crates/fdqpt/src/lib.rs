//! Micromotion dynamics of an extended XY spin chain under a two-segment
//! periodic flux quench, in the per-mode 2x2 Bogoliubov-de Gennes picture.
//!
//! The crate computes Loschmidt echoes and their zeros, rate functions,
//! Floquet quench fidelities with the critical-time window filter,
//! Pancharatnam geometric phases with the dynamical topological order
//! parameter, and Bloch-sphere micromotion trajectories. Every closed-form
//! expression has a brute-force numerical counterpart in [`oracle`].

pub mod bloch;
pub mod cli;
pub mod criticality;
pub mod dynamics;
pub mod error;
pub mod floquet;
pub mod mat2;
pub mod model;
pub mod oracle;
pub mod topology;
pub mod validate;
pub mod vec3;

pub use error::{Error, Result};
pub use mat2::ComplexMat2;
pub use model::{ChainParams, ModeGeometry, MomentumGrid, Segment};
pub use vec3::Vec3;

pub type C64 = num_complex::Complex64;
