use std::path::PathBuf;

use fullgroup_core::Backend;

use crate::error::HarnessError;

/// Environment variable that overrides the configured seed.
pub const SEED_VAR: &str = "FULLGROUP_SEED";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub backend: Backend,
    pub seed: u64,
    pub max_depth: usize,
    pub trial_count: usize,
    pub output_path: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(backend: Backend, seed: u64, max_depth: usize, trial_count: usize) -> Result<Self, HarnessError> {
        let config = RunConfig { backend, seed, max_depth, trial_count, output_path: None };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.max_depth < 1 {
            return Err(HarnessError::Config("max_depth must be at least 1".into()));
        }
        if self.trial_count < 1 {
            return Err(HarnessError::Config("trial_count must be at least 1".into()));
        }
        Ok(())
    }

    /// Replaces the seed by the value of `FULLGROUP_SEED` when it is set.
    pub fn with_env_seed(mut self) -> Result<Self, HarnessError> {
        if let Ok(text) = std::env::var(SEED_VAR) {
            self.seed = text
                .trim()
                .parse()
                .map_err(|_| HarnessError::Config(format!("{SEED_VAR}={text:?} is not a 64-bit integer")))?;
        }
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_runs() {
        let b = Backend::odometer(2);
        assert!(RunConfig::new(b, 1, 3, 0).is_err());
        assert!(RunConfig::new(b, 1, 0, 5).is_err());
        assert!(RunConfig::new(b, 1, 1, 1).is_ok());
    }
}
