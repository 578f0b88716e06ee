use nabfs_core::learners::LearnerError;
use nabfs_core::model::ConfigError;
use nabfs_core::noise::AugmentError;
use nabfs_core::simbench::SimError;
use nabfs_core::PipelineError;
use thiserror::Error;

/// Failure classes with their process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flag values or combinations.
    #[error("{0}")]
    Usage(String),
    /// Unreadable or invalid input data.
    #[error("{0}")]
    Data(String),
    /// Fitting, inference or output failures.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Runtime(_) => 4,
        }
    }
}

/// Restates a configuration error in terms of the flag that set the value.
pub fn config_error(e: ConfigError) -> CliError {
    let msg = match e {
        ConfigError::NoiseCount => "--noise-count must be at least 1".to_string(),
        ConfigError::BootstrapCount(b) => format!("--bootstraps must be at least 2, got {b}"),
        ConfigError::Alpha(a) => format!("--alpha must lie in (0, 1), got {a}"),
        ConfigError::NoiseSd(s) => format!("--noise-sd must be positive and finite, got {s}"),
        ConfigError::Learner(m) => format!("invalid learner flags: {m}"),
        other => other.to_string(),
    };
    CliError::Usage(msg)
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        let msg = e.to_string();
        match e {
            PipelineError::Config(c) => config_error(c),
            PipelineError::Learner(LearnerError::UnsupportedTask { .. } | LearnerError::InvalidParameter(_)) => {
                CliError::Usage(msg)
            }
            PipelineError::Augment(AugmentError::NameCollision(_)) => CliError::Data(msg),
            PipelineError::Augment(_) => CliError::Usage(msg),
            PipelineError::Learner(_) | PipelineError::Resample(_) | PipelineError::Inference(_) => CliError::Runtime(msg),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Pipeline(p) => p.into(),
            SimError::Config(_) | SimError::EmptyGrid => CliError::Usage(e.to_string()),
            SimError::Data(_) => CliError::Data(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}
