//! Instance files, result documents and the commands behind the `cefai`
//! binary.

pub mod commands;
pub mod document;
pub mod error;
pub mod instance;
pub mod repro;
pub mod sweep;

pub use commands::{cmd_exists, cmd_export, cmd_solve, cmd_verify, load_instance, read_input};
pub use error::{exit, CliError, CliResult};
pub use instance::{Instance, InstanceFile};
pub use repro::{run_repro, ReproConfig, ReproReport};
pub use sweep::{cmd_sweep, Source, SweepDocument};
