//! Run configuration: JSON schema, validation, and initial-data synthesis.
//!
//! Unknown keys are rejected everywhere so a typo cannot silently fall
//! back to a default.

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use wavecrit_core::propagator::evolve_linear;
use wavecrit_core::solver::SolverConfig;
use wavecrit_core::spectral::{gaussian_bump, io, GridSpec, RealField, StatePair};

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dim: usize,
    pub n: usize,
    #[serde(rename = "box")]
    pub box_len: f64,
    pub dt: f64,
    pub quad_nodes: usize,
    pub picard_tol: f64,
    pub picard_max: usize,
    pub horizon: f64,
    pub dealias: bool,
    pub sign: f64,
    pub initial: InitialSpec,
    pub outputs: OutputSpec,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum InitialSpec {
    /// Gaussian bump of peak `amplitude` and width `width`; `mean_zero`
    /// applies the Laplacian profile, `time_advance` replaces the data by
    /// its free evolution at time `-time_advance` (an ingoing pulse).
    Gaussian {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        center: Option<Vec<f64>>,
        #[serde(default)]
        mean_zero: Option<bool>,
        #[serde(default)]
        time_advance: Option<f64>,
    },
    /// Plane lattice mode `amplitude · cos(ξ_k·x + phase)` with zero
    /// velocity.
    Mode {
        k: Vec<i64>,
        amplitude: f64,
        #[serde(default)]
        phase: Option<f64>,
    },
    /// Binary field snapshots for both components.
    File { u: PathBuf, ut: PathBuf },
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub series_csv: PathBuf,
    pub snapshots_every: usize,
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .with_context(|| format!("parsing {}", path.display()))?;
        Ok(cfg)
    }

    pub fn grid(&self) -> anyhow::Result<GridSpec> {
        Ok(GridSpec::new(self.dim, self.n, self.box_len)?)
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            dt: self.dt,
            quad_nodes: self.quad_nodes,
            picard_tol: self.picard_tol,
            picard_max: self.picard_max,
            horizon: self.horizon,
            dealias: self.dealias,
            sign: self.sign,
            snapshots_every: self.outputs.snapshots_every,
        }
    }

    pub fn initial_state(&self, grid: GridSpec) -> anyhow::Result<StatePair> {
        match &self.initial {
            InitialSpec::Gaussian { amplitude, width, center, mean_zero, time_advance } => {
                if !(*width > 0.0) {
                    bail!("gaussian width must be positive");
                }
                let mid = vec![self.box_len / 2.0; self.dim];
                let c = center.as_ref().unwrap_or(&mid);
                if c.len() != self.dim {
                    bail!("center has {} entries for dimension {}", c.len(), self.dim);
                }
                let u = gaussian_bump(grid, *amplitude, *width, c, mean_zero.unwrap_or(true));
                let state = StatePair::new(u, RealField::zeros(grid))?;
                match time_advance {
                    Some(t0) => Ok(evolve_linear(&state, -t0)),
                    None => Ok(state),
                }
            }
            InitialSpec::Mode { k, amplitude, phase } => {
                if k.len() != self.dim {
                    bail!("mode index has {} entries for dimension {}", k.len(), self.dim);
                }
                let base = grid.fundamental_frequency();
                let kv: Vec<f64> = k.iter().map(|&ki| ki as f64 * base).collect();
                let ph = phase.unwrap_or(0.0);
                let amp = *amplitude;
                let u = RealField::from_fn(grid, move |x| {
                    let dot: f64 = x.iter().zip(kv.iter()).map(|(a, b)| a * b).sum();
                    amp * (dot + ph).cos()
                });
                Ok(StatePair::new(u, RealField::zeros(grid))?)
            }
            InitialSpec::File { u, ut } => {
                let fu = io::read_binary(u)?;
                let fut = io::read_binary(ut)?;
                if fu.grid() != &grid {
                    bail!("{}: grid does not match the config", u.display());
                }
                Ok(StatePair::new(fu, fut)?)
            }
        }
    }

    /// Canonical content hash of the configuration.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let canonical = serde_json::to_string(self).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        let out = hasher.finalize();
        out.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "dim": 2, "n": 16, "box": 6.283185307179586,
        "dt": 0.05, "quad_nodes": 2, "picard_tol": 1e-10, "picard_max": 20,
        "horizon": 0.1, "dealias": true, "sign": 1.0,
        "initial": {"kind": "gaussian", "amplitude": 0.1, "width": 0.8},
        "outputs": {"series_csv": "out/series.csv", "snapshots_every": 0}
    }"#;

    #[test]
    fn minimal_config_parses_and_hashes() {
        let cfg: RunConfig = serde_json::from_str(MINIMAL).unwrap();
        assert_eq!(cfg.dim, 2);
        assert_eq!(cfg.hash().len(), 64);
        let grid = cfg.grid().unwrap();
        let state = cfg.initial_state(grid).unwrap();
        assert_eq!(state.grid().n(), 16);
    }

    #[test]
    fn unknown_keys_rejected() {
        let bad = MINIMAL.replace("\"dealias\": true", "\"dealias\": true, \"bogus\": 1");
        assert!(serde_json::from_str::<RunConfig>(&bad).is_err());
        let bad_initial = MINIMAL.replace(
            "\"kind\": \"gaussian\", \"amplitude\": 0.1, \"width\": 0.8",
            "\"kind\": \"gaussian\", \"amplitude\": 0.1, \"width\": 0.8, \"oops\": 2",
        );
        assert!(serde_json::from_str::<RunConfig>(&bad_initial).is_err());
    }
}
