//! End-to-end secure connection probability (SCP) of multihop
//! decode-and-forward paths under a Poisson field of eavesdroppers, and
//! highest-SCP route selection.
//!
//! The crate provides three independent ways to evaluate the SCP of a path —
//! a seeded Monte-Carlo oracle ([`mc`]), exact quadrature engines ([`exact`])
//! and closed-form approximations ([`approx`]) — plus a routing layer
//! ([`routing`]) whose hop-bounded metric scan provably recovers the
//! approximation-optimal path in polynomial time. Eavesdroppers either pool
//! their received SNR (colluding) or act alone (non-colluding); in both
//! cases they combine all hops of a transmission by maximal-ratio combining.

pub mod approx;
pub mod error;
pub mod exact;
pub mod hypoexp;
pub mod mc;
pub mod model;
pub mod quad;
pub mod routing;

pub use error::{Error, Result};
pub use model::{EavesdropperMode, Method, NetworkModel, Path, Point, ScpEstimate};
pub use quad::QuadratureConfig;
