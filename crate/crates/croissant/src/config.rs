//! On-disk configuration: one optional TOML file overriding the compiled-in
//! layout, style, reader, and strategy-mixture defaults. Every key is
//! optional; an empty file (or none at all) reproduces the defaults exactly.
//!
//! ```toml
//! [layout]
//! panel_width_px = 480.0
//! target_peak_px = 120.0
//!
//! [style]
//! background = "#ffffff"
//!
//! [oracle]
//! epsilon = 0.01
//! inter_edge_mode = "geometric"
//!
//! [mixture.pdf]
//! height-at-mean = 0.5
//! area-left = 0.5
//! ```
//!
//! A `[mixture]` table replaces the built-in mixture wholesale, so it must
//! cover all four chart conditions.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::OracleConfig;
use crate::scene::LayoutConfig;
use crate::sim::StrategyMixture;
use crate::svg::StyleConfig;

/// Union of every tunable the command-line tool accepts from a file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToolConfig {
    pub layout: LayoutConfig,
    pub style: StyleConfig,
    pub oracle: OracleConfig,
    #[serde(default = "StrategyMixture::default_observed")]
    pub mixture: StrategyMixture,
}

impl Default for ToolConfig {
    fn default() -> ToolConfig {
        ToolConfig {
            layout: LayoutConfig::default(),
            style: StyleConfig::default(),
            oracle: OracleConfig::default(),
            mixture: StrategyMixture::default_observed(),
        }
    }
}

impl ToolConfig {
    pub fn validate(&self) -> Result<()> {
        self.layout.validate()?;
        self.oracle.validate()?;
        self.mixture.validate()
    }

    /// Parses and validates a TOML config file.
    pub fn load(path: &Path) -> Result<ToolConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io("reading config", path, e))?;
        let config: ToolConfig = toml::from_str(&text)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    /// [`load`]s the given file, or falls back to the defaults.
    ///
    /// [`load`]: ToolConfig::load
    pub fn load_or_default(path: Option<&Path>) -> Result<ToolConfig> {
        match path {
            Some(p) => ToolConfig::load(p),
            None => Ok(ToolConfig::default()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{InterEdgeMode, Strategy};
    use crate::stimuli::VisCondition;
    use std::io::Write;

    #[test]
    fn an_empty_file_gives_the_defaults() {
        let parsed: ToolConfig = toml::from_str("").unwrap();
        assert_eq!(parsed, ToolConfig::default());
        assert!(parsed.validate().is_ok());
    }

    #[test]
    fn sections_override_independently() {
        let parsed: ToolConfig = toml::from_str(
            r#"
            [layout]
            panel_width_px = 240.0

            [oracle]
            epsilon = 0.05
            inter_edge_mode = "exact-mass"

            [mixture.pdf]
            height-at-mean = 0.5
            area-left = 0.5

            [mixture.qdp-20]
            counting = 1.0

            [mixture.croissant-10]
            counting = 1.0

            [mixture.croissant-20]
            inter-edge = 1.0
            "#,
        )
        .unwrap();
        assert_eq!(parsed.layout.panel_width_px, 240.0);
        assert_eq!(parsed.layout.panel_height_px, LayoutConfig::default().panel_height_px);
        assert_eq!(parsed.oracle.epsilon, 0.05);
        assert_eq!(parsed.oracle.inter_edge_mode, InterEdgeMode::ExactMass);
        assert_eq!(parsed.style, StyleConfig::default());
        assert_eq!(
            parsed.mixture.weights[&VisCondition::Pdf][&Strategy::HeightAtMean],
            0.5
        );
        assert!(parsed.validate().is_ok());
    }

    #[test]
    fn load_reports_unknown_keys_and_bad_values() {
        let dir = tempfile::tempdir().unwrap();
        let write = |name: &str, body: &str| {
            let path = dir.path().join(name);
            let mut f = std::fs::File::create(&path).unwrap();
            f.write_all(body.as_bytes()).unwrap();
            path
        };

        let typo = write("typo.toml", "[layout]\npanel_witdh_px = 480.0\n");
        assert!(matches!(
            ToolConfig::load(&typo),
            Err(Error::InvalidConfig(_))
        ));

        // Parses, but fails semantic validation: the mixture must cover all
        // four conditions once it is specified at all.
        let partial = write("partial.toml", "[mixture.pdf]\nheight-at-mean = 1.0\n");
        assert!(ToolConfig::load(&partial).is_err());

        let missing = dir.path().join("nowhere.toml");
        assert!(matches!(ToolConfig::load(&missing), Err(Error::Io { .. })));

        assert_eq!(
            ToolConfig::load_or_default(None).unwrap(),
            ToolConfig::default()
        );
    }
}
