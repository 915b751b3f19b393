//! Run configuration: every tolerance and grid parameter in one serializable
//! struct. The effective config is embedded in every output artifact so runs
//! can be reproduced from their outputs alone.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Log,
    Linear,
}

/// Evaluation grid for t in the Laplace round-trip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl TGrid {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.t_min];
        }
        let n = self.count;
        (0..n)
            .map(|i| {
                let frac = i as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Linear => self.t_min + frac * (self.t_max - self.t_min),
                    Spacing::Log => {
                        (self.t_min.ln() + frac * (self.t_max.ln() - self.t_min.ln())).exp()
                    }
                }
            })
            .collect()
    }
}

impl Default for TGrid {
    fn default() -> Self {
        TGrid {
            t_min: 0.1,
            t_max: 10.0,
            count: 25,
            spacing: Spacing::Log,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    /// eigenvalue splitting scale; None = 1e-6 times B's spectral diameter
    pub eps_split: Option<f64>,
    /// starting contour node count (power of two, >= 64)
    pub n_nodes_initial: usize,
    /// node-doubling ceiling
    pub n_nodes_max: usize,
    /// contour radius override; None = automatic search
    pub radius: Option<f64>,
    /// density convergence: max sample change below tau_quad * max(1, max w)
    pub tau_quad: f64,
    /// monodromy closure tolerance, relative to max |lambda|
    pub tau_closure: f64,
    /// allowed normalized imaginary residual of density samples
    pub tau_im: f64,
    /// Laplace round-trip tolerance on relative error
    pub tau_laplace: f64,
    /// density samples per open interval (b_k, b_{k+1})
    pub points_per_interval: usize,
    pub t_grid: TGrid,
    /// seed for --random instances
    pub seed: u64,
    /// directory for CSV/JSON artifacts
    pub out_dir: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            eps_split: None,
            n_nodes_initial: 256,
            n_nodes_max: 1 << 14,
            radius: None,
            tau_quad: 1e-9,
            tau_closure: 1e-10,
            tau_im: 1e-8,
            tau_laplace: 1e-6,
            points_per_interval: 32,
            t_grid: TGrid::default(),
            seed: 0,
            out_dir: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let positive: [(&'static str, f64); 4] = [
            ("tau_quad", self.tau_quad),
            ("tau_closure", self.tau_closure),
            ("tau_im", self.tau_im),
            ("tau_laplace", self.tau_laplace),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(Error::Parameter {
                    name,
                    reason: format!("tolerance must be positive, got {v}"),
                });
            }
        }
        if self.n_nodes_initial < 64 || !self.n_nodes_initial.is_power_of_two() {
            return Err(Error::Parameter {
                name: "n_nodes_initial",
                reason: format!(
                    "must be a power of two >= 64, got {}",
                    self.n_nodes_initial
                ),
            });
        }
        if self.n_nodes_max < self.n_nodes_initial {
            return Err(Error::Parameter {
                name: "n_nodes_max",
                reason: "must be at least n_nodes_initial".into(),
            });
        }
        if self.points_per_interval < 2 {
            return Err(Error::Parameter {
                name: "points_per_interval",
                reason: "must be at least 2".into(),
            });
        }
        if let Some(e) = self.eps_split {
            if !(e > 0.0) {
                return Err(Error::Parameter {
                    name: "eps_split",
                    reason: format!("must be positive, got {e}"),
                });
            }
        }
        if let Some(r) = self.radius {
            if !(r > 0.0) {
                return Err(Error::Parameter {
                    name: "radius",
                    reason: format!("must be positive, got {r}"),
                });
            }
        }
        let g = &self.t_grid;
        if g.count == 0 || !(g.t_min > 0.0) || g.t_max < g.t_min {
            return Err(Error::Parameter {
                name: "t_grid",
                reason: "need count >= 1 and 0 < t_min <= t_max".into(),
            });
        }
        Ok(())
    }

    /// Load from a JSON file (the BMV_CONFIG mechanism).
    pub fn from_json_file(path: &str) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: RunConfig = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }
}
