//! Round-accurate simulation of synchronous message-passing networks with a
//! quantum distributed triangle-detection pipeline on top.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`], [`generators`], [`sampling`], [`io`]: graphs, random
//!   families, the brute-force oracle and file formats.
//! * [`engine`]: the lockstep engine, BFS trees, broadcast/convergecast and
//!   the [`engine::RoundLedger`].
//! * [`spectral`], [`decomposition`]: lazy-walk spectral gaps and the
//!   expander decomposition.
//! * [`ids`], [`routing`], [`search`]: degree-ordered ids, load-checked
//!   routing and the amplitude-level search simulation.
//! * [`pipeline`]: heavy stage, star transform, low-degree stage and the
//!   recursion over residual edge sets.
//! * [`experiment`]: sweeps, CSV reports and replay.

pub mod config;
pub mod decomposition;
pub mod engine;
pub mod error;
pub mod experiment;
pub mod generators;
pub mod graph;
pub mod ids;
pub mod io;
pub mod pipeline;
pub mod routing;
pub mod sampling;
pub mod search;
pub mod spectral;
pub mod util;

pub use config::Constants;
pub use engine::RoundLedger;
pub use graph::{brute_force_find_triangle, EdgeSubset, Graph, TriangleWitness};
