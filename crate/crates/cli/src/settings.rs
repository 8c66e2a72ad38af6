//! Command line flags and the JSON config file that mirrors them.

use std::path::{Path, PathBuf};

use clap::Args;
use focalsphere_core::layout::default_steps;
use focalsphere_core::{LayoutConfig, OverlayMode};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};

/// Every option of every command. Commands read the fields they need.
///
/// A config file (`--config`) holds the same options with the flag names
/// as keys, e.g. `{"generate": "grid:10,10", "theta-max": 0.2}`. Flags
/// given on the command line override the file.
#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct Settings {
    /// Edge list: TSV `src<TAB>dst[<TAB>time]`, or Matrix Market (.mtx).
    #[arg(long, value_name = "FILE")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,

    /// Synthetic graph instead of --input: `ws:n,k,p[,seed]` or `grid:w,h`.
    #[arg(long, value_name = "SPEC", conflicts_with = "input")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generate: Option<String>,

    /// Embedding TSV written by `layout`.
    #[arg(long, value_name = "FILE")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub embedding: Option<PathBuf>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,

    /// Initial maximum step angle in radians.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_max: Option<f64>,

    /// Tree acceptance factor.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub opening: Option<f64>,

    /// Grow the simulated graph from a prefix of the node order.
    #[arg(long, num_args = 0..=1, default_missing_value = "true", value_name = "BOOL")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub multilevel: Option<bool>,

    /// Fraction of the run after which all nodes are simulated.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub growth_end: Option<f64>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,

    /// Focal correction strength in [0, 1].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,

    /// Label of the focal node.
    #[arg(long, value_name = "LABEL")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub focal: Option<String>,

    /// Image width (and height) in pixels.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width: Option<u32>,

    /// Stamp radius in pixels.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stamp: Option<u32>,

    /// none, distance-bands, category or event-time.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub overlay: Option<OverlayMode>,

    /// `label<TAB>time` rows for the event-time overlay.
    #[arg(long, value_name = "FILE")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub events: Option<PathBuf>,

    /// `label<TAB>category` rows for the category overlay.
    #[arg(long, value_name = "FILE")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub categories: Option<PathBuf>,

    /// Start of the event window, in normalized time.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t0: Option<f64>,

    /// End of the event window, in normalized time.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t1: Option<f64>,

    /// Use this d_max instead of fitting it.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_max: Option<f64>,

    /// Fit d_max from the focal node's own distances.
    #[arg(long, num_args = 0..=1, default_missing_value = "true", value_name = "BOOL")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refit: Option<bool>,

    /// Draw edges as great-circle arcs (small graphs only).
    #[arg(long, num_args = 0..=1, default_missing_value = "true", value_name = "BOOL")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edges: Option<bool>,

    /// Thread counts for `bench`, comma separated.
    #[arg(long, value_delimiter = ',', value_name = "N,N,..")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thread_counts: Option<Vec<usize>>,

    /// Listen address for `serve` (default $FOCALSPHERE_ADDR or 127.0.0.1:8080).
    #[arg(long, value_name = "ADDR")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bind: Option<String>,

    #[arg(long, value_name = "FILE")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,

    /// JSON file with defaults for any of these options.
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl Settings {
    /// Merges the config file (if any) under the flags.
    pub fn resolve(self) -> CliResult<Settings> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        let mut base: Value = serde_json::from_str(&text)
            .map_err(|e| CliError::arg(format!("{}: {e}", path.display())))?;
        let flags = serde_json::to_value(&self)?;
        if let (Some(base), Value::Object(flags)) = (base.as_object_mut(), flags) {
            base.extend(flags);
        } else {
            return Err(CliError::arg(format!(
                "{}: config must be a JSON object",
                path.display()
            )));
        }
        let merged: Settings = serde_json::from_value(base)
            .map_err(|e| CliError::arg(format!("{}: {e}", path.display())))?;
        Ok(merged)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn threads(&self) -> usize {
        self.threads.unwrap_or(1)
    }

    pub fn layout_config(&self, node_count: usize) -> LayoutConfig {
        let mut c = LayoutConfig::for_graph(node_count);
        c.steps = self.steps.unwrap_or_else(|| default_steps(node_count));
        if let Some(v) = self.theta_max {
            c.theta_max0 = v;
        }
        if let Some(v) = self.opening {
            c.opening = v;
        }
        if let Some(v) = self.multilevel {
            c.multilevel = v;
        }
        if let Some(v) = self.growth_end {
            c.growth_end = v;
        }
        c.seed = self.seed();
        c.threads = self.threads();
        c
    }

    pub fn required_out(&self) -> CliResult<&Path> {
        self.out
            .as_deref()
            .ok_or_else(|| CliError::arg("--out is required"))
    }

    pub fn window(&self) -> [f64; 2] {
        [self.t0.unwrap_or(0.0), self.t1.unwrap_or(1.0)]
    }
}
