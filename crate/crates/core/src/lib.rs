//! Ground states of the focusing nonlinear Schrödinger energy on noncompact
//! metric graphs.
//!
//! The crate is `no_std` and only needs `alloc`. It provides
//!
//! - [`graph`]: metric multigraphs with finite edges and halflines, truncation
//!   to a finite computational domain;
//! - [`topology`]: terminal edges, the three formulations of the "every edge sits
//!   between two halflines" condition, bubble towers and the four-way case split
//!   used for the critical power;
//! - [`closed_forms`]: sech-power solitons, their energies and the critical masses;
//! - [`function_space`]: piecewise-linear functions on truncated graphs, energy,
//!   gradient, Lagrange multiplier and Kirchhoff residuals;
//! - [`rearrange`]: distribution functions, monotone and symmetric rearrangements;
//! - [`minimize`]: the mass-constrained gradient flow, multi-start ground state
//!   search, parameter sweeps and the phase-transition bisection;
//! - [`surgery`]: explicit competitors built by cutting and rearranging solitons;
//! - [`critical`]: the `p = 6` machinery (Gagliardo–Nirenberg quotient, critical
//!   mass, case predictions, energy profiles).

#![cfg_attr(not(test), no_std)]
#![warn(missing_debug_implementations)]

extern crate alloc;

pub mod closed_forms;
pub mod critical;
mod error;
pub mod function_space;
pub mod graph;
mod linsolve;
pub mod math;
pub mod minimize;
pub mod rearrange;
pub mod shapes;
pub mod surgery;
pub mod topology;

pub use error::{Error, Result};
pub use function_space::{Covector, EnergyBreakdown, GraphFunction, Mesh};
pub use graph::{Edge, EdgeLength, GraphBuilder, MetricGraph, TruncatedGraph, Vertex};
pub use minimize::{GroundStateResult, InitStrategy, RunStatus, SolverConfig};
pub use topology::{CaseLabel, TopologyReport};
