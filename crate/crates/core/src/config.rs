//! JSON run configuration for the command-line tool.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{FamilySpec, GeneratedSurface};
use crate::immersion::Rect;
use crate::verify::{Grid2D, Tolerances};

/// Smallest accepted grid in either direction.
pub const MIN_RESOLUTION: usize = 4;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub family: FamilySpec,
    pub domain: Rect,
    #[serde(default = "default_grid")]
    pub grid: Grid2D,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub outputs: Outputs,
}

fn default_grid() -> Grid2D {
    Grid2D { ns: 20, nt: 20 }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        Rect::new(self.domain.s, self.domain.t).map_err(|e| Error::Config(e.to_string()))?;
        if self.grid.ns < MIN_RESOLUTION || self.grid.nt < MIN_RESOLUTION {
            return Err(Error::Config(format!(
                "grid {} is below the minimum {MIN_RESOLUTION}x{MIN_RESOLUTION}",
                self.grid
            )));
        }
        self.tolerances.validate()?;
        self.family.validate()
    }

    pub fn with_grid(mut self, grid: Grid2D) -> Result<Self> {
        self.grid = grid;
        self.validate()?;
        Ok(self)
    }

    pub fn build(&self) -> Result<GeneratedSurface> {
        self.family.build(self.domain)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const E42: &str = r#"{
        "family": {"tag": "E42-i", "F": 1, "b0": -1, "db0": 0},
        "domain": {"s": [0.5, 2.0], "t": [-1.0, 1.0]},
        "grid": [10, 10]
    }"#;

    #[test]
    fn parses_with_defaults() {
        let c = RunConfig::from_json(E42).unwrap();
        assert_eq!(c.grid, Grid2D { ns: 10, nt: 10 });
        assert_eq!(c.tolerances, Tolerances::default());
        assert!(c.outputs.csv.is_none());
        let bare = r#"{"family": {"tag": "control-graph"}, "domain": {"s": [0, 1], "t": [0, 1]}}"#;
        assert_eq!(RunConfig::from_json(bare).unwrap().grid, default_grid());
    }

    #[test]
    fn rejects_small_grids_and_bad_tolerances() {
        let small = E42.replace("[10, 10]", "[3, 10]");
        assert!(matches!(RunConfig::from_json(&small), Err(Error::Config(_))));
        let tol = E42.replace(
            r#""grid": [10, 10]"#,
            r#""grid": [10, 10], "tolerances": {"residual": 0}"#,
        );
        assert!(matches!(RunConfig::from_json(&tol), Err(Error::Config(_))));
        let typo = E42.replace(r#""grid""#, r#""gird""#);
        assert!(RunConfig::from_json(&typo).is_err());
        let flipped = E42.replace("[0.5, 2.0]", "[2.0, 0.5]");
        assert!(RunConfig::from_json(&flipped).is_err());
    }

    #[test]
    fn partial_tolerance_override() {
        let tol = E42.replace(
            r#""grid": [10, 10]"#,
            r#""grid": [10, 10], "tolerances": {"residual": 1e-3}"#,
        );
        let c = RunConfig::from_json(&tol).unwrap();
        assert_eq!(c.tolerances.residual, 1e-3);
        assert_eq!(c.tolerances.frame, Tolerances::default().frame);
    }
}
