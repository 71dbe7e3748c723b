pub mod commands;
pub mod config;

pub use commands::{cmd_audit, cmd_demo, cmd_simulate, SUPPORTED_PRIMES};
pub use config::RunConfig;
