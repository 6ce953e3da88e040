//! Deterministic Monte-Carlo harness behind the `ssd-lab` command.
//!
//! Every run is a pure function of its [`SimConfig`]: frames draw from
//! per-frame random substreams and are accumulated in index order, so the
//! worker count never changes a result.

mod ber;
mod compare;
mod config;
mod link;
pub mod stats;
mod tables;

pub use ber::{run_ber, BerPoint, SimReport, StopReason};
pub use compare::{run_llr_compare, LlrReport, LlrStats};
pub use config::{parse_grid, AngleMode, SimConfig, KEYS};
pub use tables::{dump_constellation, run_count_ops, CostRow, CostSource, OpsReport};
