use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corrugation::{Quadrature, DEFAULT_N0};
use crate::error::{Error, Result};
use crate::scenario::Scenario;
use crate::scheduler::ScheduleMode;

/// Default corrugation-number cap of a run. Later stages on a 257² grid need
/// `N` around 2^23, above the single-step default.
pub const RUN_N_CAP: u64 = 1 << 24;

/// Settings of a full run. Missing keys take the defaults below; the
/// resolved value is written next to the run's outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Nodes per axis.
    pub grid: usize,
    pub stages: usize,
    pub mode: ScheduleMode,
    /// Total C⁰ budget.
    pub epsilon: f64,
    /// Dictionary size.
    pub k: usize,
    pub scenario: String,
    pub quadrature: Quadrature,
    pub n0: u64,
    pub n_cap: u64,
    /// Worker threads; machine parallelism when absent.
    pub threads: Option<usize>,
    pub outdir: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            grid: 257,
            stages: 6,
            mode: ScheduleMode::Practical,
            epsilon: 0.05,
            k: 5,
            scenario: "flat-shrink".into(),
            quadrature: Quadrature::Series,
            n0: DEFAULT_N0,
            n_cap: RUN_N_CAP,
            threads: None,
            outdir: None,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        RunConfig::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn scenario(&self) -> Result<Scenario> {
        self.scenario.parse()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.grid < 3 {
            return bad(format!("grid must be at least 3, got {}", self.grid));
        }
        if self.stages == 0 {
            return bad("stages must be at least 1".into());
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if self.k < 3 {
            return bad(format!("k must be at least 3, got {}", self.k));
        }
        if self.n0 == 0 || self.n0 > self.n_cap {
            return bad(format!("need 1 <= n0 <= n_cap, got n0={} n_cap={}", self.n0, self.n_cap));
        }
        if self.threads == Some(0) {
            return bad("threads must be positive".into());
        }
        self.quadrature.validate()?;
        self.scenario()?;
        Ok(())
    }
}
