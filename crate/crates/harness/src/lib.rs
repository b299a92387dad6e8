//! Configuration parsing, parameter sweeps, the reproduction suite and table
//! output behind the `wma` command.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod emit;
pub mod error;
pub mod sweep;
pub mod verify;

pub use config::{parse_config, Config, Coupling, Param, ScenarioParams};
pub use emit::{emit, format_number, Cell, Format, Table};
pub use error::{Error, Result};
pub use sweep::{run_sweep, Output, SweepRow, SweepSpec, SweepTable};
pub use verify::{verify_paper, Check, Relation, VerifyReport};
