//! Obstacle-avoidance trajectory optimization for ground vehicles.
//!
//! The crate bundles three obstacle-avoidance constraint families around a
//! self-contained solve kernel:
//!
//! - **RCOA** — rectangular big-M conditional logic with the binaries relaxed
//!   to `[0,1]` plus an L1 penalty, which keeps the avoidance rows convex.
//! - **MIOA** — the classic four-row mixed-integer exclusion of a rectangle.
//! - **EOA** — a nonconvex quadratic row keeping the position outside an
//!   ellipse.
//!
//! Supporting machinery: a 3-DOF bicycle model with a brush tire model
//! ([`vehicle`]), Frenet path-error kinematics ([`frenet`]), obstacle
//! geometry and penetration metrics ([`obstacle`]), multiple-shooting
//! transcription ([`transcribe`]), a dense primal-dual interior-point LP,
//! branch-and-bound MILP and successive-convexification loops ([`solver`]),
//! and a scenario harness for open-loop benchmarks and closed-loop MPC
//! simulations ([`harness`]).
//!
//! The crate is `no_std`-compatible (`default-features = false`); all
//! computation is pure and deterministic. File I/O, timing and the CLI live
//! in the companion `rcoa-cli` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod frenet;
pub mod harness;
pub(crate) mod math;
pub mod nlp;
pub mod oa;
pub mod obstacle;
pub mod program;
pub mod scenario;
pub mod solver;
pub mod transcribe;
pub mod vehicle;
