//! Configuration, pipelines and figure recipes on top of `oamlab-core`.

// Range checks are written as `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod artifacts;
pub mod config;
pub mod pipelines;
pub mod recipes;
pub mod units;

pub use artifacts::{Artifacts, Report};
pub use config::{parse_config, parse_config_str, ConfigError, RunConfig};
pub use pipelines::run_pipeline;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Module(#[from] oamlab_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    /// 2 for configuration problems, 3 for anything raised while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Module(_) | RunError::Io(_) => 3,
        }
    }
}
