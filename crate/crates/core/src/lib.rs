//! Robust multi-objective resource allocation for a secure MISO downlink
//! with wireless power transfer.
//!
//! The library builds S-procedure LMI relaxations of worst-case QoS
//! constraints under ball-bounded channel uncertainty, solves the
//! weighted-Tchebycheff scalarization as one conic program, certifies and
//! recovers rank-one beamformers from the dual solution, and drives
//! Monte-Carlo trade-off campaigns over the weight simplex.

pub mod channel;
pub mod hermitian;
pub mod metrics;
pub mod pareto;
pub mod policy;
pub mod sdp;
pub mod solvers;

pub use hermitian::{C64, CMatrix, CVector, HermitianMatrix, Sense};
pub use policy::NumericPolicy;
