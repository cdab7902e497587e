//! The factorial stimulus batch: 4 chart conditions × 2 scalings × 4
//! sigma pairs × 2 positions = 64 stimuli, rendered to SVG files with a
//! machine-readable manifest recording every design factor and the analytic
//! answer to each chart's comparison question.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dist::{ground_truth, Answer};
use crate::error::{Error, Result};
use crate::scene::{build_scene, LayoutConfig, Position, Scaling, StimulusSpec, VisKind};
use crate::svg::{render, write_svg, StyleConfig};

/// Shared mean of every factorial stimulus.
pub const DEFAULT_MU: f64 = 50.0;
/// Comparison threshold of every factorial stimulus (mean + 4).
pub const DEFAULT_THRESHOLD: f64 = 54.0;

/// The four chart conditions under study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VisCondition {
    #[serde(rename = "pdf")]
    Pdf,
    #[serde(rename = "qdp-20")]
    Qdp20,
    #[serde(rename = "croissant-10")]
    Croissant10,
    #[serde(rename = "croissant-20")]
    Croissant20,
}

impl VisCondition {
    pub const ALL: [VisCondition; 4] = [
        VisCondition::Pdf,
        VisCondition::Qdp20,
        VisCondition::Croissant10,
        VisCondition::Croissant20,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            VisCondition::Pdf => "pdf",
            VisCondition::Qdp20 => "qdp-20",
            VisCondition::Croissant10 => "croissant-10",
            VisCondition::Croissant20 => "croissant-20",
        }
    }

    pub fn parse(label: &str) -> Result<VisCondition> {
        VisCondition::ALL
            .into_iter()
            .find(|c| c.label() == label)
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "unknown chart condition {label:?}; expected one of: {}",
                    VisCondition::ALL.map(|c| c.label()).join(", ")
                ))
            })
    }

    pub fn vis_kind(&self) -> VisKind {
        match self {
            VisCondition::Pdf => VisKind::Pdf,
            VisCondition::Qdp20 => VisKind::Qdp,
            VisCondition::Croissant10 | VisCondition::Croissant20 => VisKind::Croissant,
        }
    }

    pub fn quantiles(&self) -> Option<u32> {
        match self {
            VisCondition::Pdf => None,
            VisCondition::Qdp20 | VisCondition::Croissant20 => Some(20),
            VisCondition::Croissant10 => Some(10),
        }
    }
}

/// One studied sigma pairing; the wide side is 5 throughout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SdPair {
    pub narrow: f64,
    pub wide: f64,
}

impl SdPair {
    pub const ALL: [SdPair; 4] = [
        SdPair { narrow: 2.0, wide: 5.0 },
        SdPair { narrow: 3.0, wide: 5.0 },
        SdPair { narrow: 4.0, wide: 5.0 },
        SdPair { narrow: 4.5, wide: 5.0 },
    ];

    pub fn label(&self) -> String {
        format!("{}v{}", self.narrow, self.wide)
    }

    pub fn parse(label: &str) -> Result<SdPair> {
        SdPair::ALL
            .into_iter()
            .find(|p| p.label() == label)
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "unknown sigma pair {label:?}; expected one of: {}",
                    SdPair::ALL.map(|p| p.label()).join(", ")
                ))
            })
    }
}

/// One cell of the stimulus factorial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FactorialCell {
    pub vis: VisCondition,
    pub scaling: Scaling,
    pub sd_pair: SdPair,
    pub position: Position,
}

impl FactorialCell {
    /// Every cell, in a fixed nesting order: condition, scaling, sigma
    /// pair, position.
    pub fn all() -> Vec<FactorialCell> {
        let mut cells = Vec::with_capacity(64);
        for vis in VisCondition::ALL {
            for scaling in [Scaling::EqualArea, Scaling::EqualHeight] {
                for sd_pair in SdPair::ALL {
                    for position in [Position::NarrowOnTop, Position::NarrowOnBottom] {
                        cells.push(FactorialCell {
                            vis,
                            scaling,
                            sd_pair,
                            position,
                        });
                    }
                }
            }
        }
        cells
    }

    /// The stimulus this cell describes, at the standard mean/threshold.
    pub fn spec(&self) -> StimulusSpec {
        self.spec_at(DEFAULT_MU, DEFAULT_THRESHOLD)
    }

    pub fn spec_at(&self, mu: f64, threshold: f64) -> StimulusSpec {
        StimulusSpec {
            vis: self.vis.vis_kind(),
            quantiles: self.vis.quantiles(),
            scaling: self.scaling,
            sigma_narrow: self.sd_pair.narrow,
            sigma_wide: self.sd_pair.wide,
            position: self.position,
            mu,
            threshold,
        }
    }

    /// Output file name, e.g. `croissant-10-equal-height-4.5v5-narrow-top.svg`.
    pub fn file_name(&self) -> String {
        format!(
            "{}-{}-{}-{}.svg",
            self.vis.label(),
            self.scaling.label(),
            self.sd_pair.label(),
            self.position.label()
        )
    }
}

/// One generated stimulus: file name, full design point, and the analytic
/// answer with both tail probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    #[serde(flatten)]
    pub spec: StimulusSpec,
    pub answer: Answer,
    pub p_top: f64,
    pub p_bottom: f64,
}

/// Batch description written alongside the SVG files as `manifest.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    /// Crate version that produced the batch.
    pub generator_version: String,
    /// Short hash of the layout configuration, so a batch can be matched to
    /// the geometry that produced it.
    pub layout_hash: String,
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn to_json(&self) -> String {
        let mut json = serde_json::to_string_pretty(self).expect("manifest serializes");
        json.push('\n');
        json
    }

    pub fn from_json(json: &str) -> Result<Manifest> {
        serde_json::from_str(json)
            .map_err(|e| Error::InvalidConfig(format!("unreadable manifest: {e}")))
    }
}

/// Sixteen hex characters identifying a layout configuration.
pub fn layout_hash(layout: &LayoutConfig) -> String {
    let canonical = serde_json::to_string(layout).expect("layout serializes");
    let digest = Sha256::digest(canonical.as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// Renders the factorial batch (optionally restricted to one chart
/// condition) into `out_dir` and writes `manifest.json` last. Existing
/// files from a previous run of the same batch are overwritten. If any
/// write fails, files already written by this run are removed so no
/// half-batch is left behind.
pub fn generate_factorial(
    out_dir: &Path,
    layout: &LayoutConfig,
    style: &StyleConfig,
    only: Option<VisCondition>,
) -> Result<Manifest> {
    layout.validate()?;
    let cells: Vec<FactorialCell> = FactorialCell::all()
        .into_iter()
        .filter(|c| only.is_none_or(|v| c.vis == v))
        .collect();

    // Render everything up front, in parallel; nothing touches disk yet.
    let rendered: Vec<(String, String, ManifestEntry)> = cells
        .par_iter()
        .map(|cell| -> Result<(String, String, ManifestEntry)> {
            let spec = cell.spec();
            let scene = build_scene(&spec, layout)?;
            let xml = render(&scene, style).to_xml();
            let task = spec.task()?;
            let truth = ground_truth(&task);
            let entry = ManifestEntry {
                file: cell.file_name(),
                spec,
                answer: truth.answer,
                p_top: truth.p_top,
                p_bottom: truth.p_bottom,
            };
            Ok((cell.file_name(), xml, entry))
        })
        .collect::<Result<_>>()?;

    // Serial writes with cleanup on failure.
    let mut written: Vec<PathBuf> = Vec::with_capacity(rendered.len() + 1);
    let mut entries = Vec::with_capacity(rendered.len());
    let result = (|| -> Result<()> {
        for (name, xml, entry) in &rendered {
            let path = out_dir.join(name);
            std::fs::write(&path, xml).map_err(|e| Error::io("writing stimulus", &path, e))?;
            written.push(path);
            entries.push(entry.clone());
        }
        Ok(())
    })();
    if let Err(e) = result {
        for path in &written {
            let _ = std::fs::remove_file(path);
        }
        return Err(e);
    }

    let manifest = Manifest {
        generator_version: env!("CARGO_PKG_VERSION").to_string(),
        layout_hash: layout_hash(layout),
        entries,
    };
    let manifest_path = out_dir.join("manifest.json");
    if let Err(e) = std::fs::write(&manifest_path, manifest.to_json()) {
        for path in &written {
            let _ = std::fs::remove_file(path);
        }
        return Err(Error::io("writing manifest", &manifest_path, e));
    }
    Ok(manifest)
}

/// Renders a single stimulus to `out`, refusing to clobber an existing file
/// unless asked.
pub fn generate_single(
    spec: &StimulusSpec,
    layout: &LayoutConfig,
    style: &StyleConfig,
    out: &Path,
    overwrite: bool,
) -> Result<()> {
    let scene = build_scene(spec, layout)?;
    write_svg(&render(&scene, style), out, overwrite)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn the_factorial_has_64_distinct_cells() {
        let cells = FactorialCell::all();
        assert_eq!(cells.len(), 64);
        let mut names: Vec<String> = cells.iter().map(|c| c.file_name()).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), 64, "file names must be unique");
    }

    #[test]
    fn file_names_spell_out_every_factor() {
        let cells = FactorialCell::all();
        assert_eq!(cells[0].file_name(), "pdf-equal-area-2v5-narrow-top.svg");
        assert_eq!(
            cells
                .iter()
                .find(|c| c.vis == VisCondition::Croissant10
                    && c.scaling == Scaling::EqualHeight
                    && c.sd_pair.narrow == 4.5
                    && c.position == Position::NarrowOnBottom)
                .unwrap()
                .file_name(),
            "croissant-10-equal-height-4.5v5-narrow-bottom.svg"
        );
    }

    #[test]
    fn cell_specs_validate_and_quantile_counts_follow_the_condition() {
        for cell in FactorialCell::all() {
            let spec = cell.spec();
            spec.validate().unwrap();
            assert_eq!(spec.quantiles, cell.vis.quantiles());
            assert_eq!(spec.threshold, 54.0);
        }
    }

    #[test]
    fn layout_hash_is_stable_and_sensitive() {
        let a = layout_hash(&LayoutConfig::default());
        assert_eq!(a.len(), 16);
        assert_eq!(a, layout_hash(&LayoutConfig::default()));
        let mut tweaked = LayoutConfig::default();
        tweaked.panel_width_px = 481.0;
        assert_ne!(a, layout_hash(&tweaked));
    }

    #[test]
    fn condition_labels_round_trip() {
        for c in VisCondition::ALL {
            assert_eq!(VisCondition::parse(c.label()).unwrap(), c);
        }
        assert!(VisCondition::parse("sparkline").is_err());
    }

    #[test]
    fn manifest_json_round_trips() {
        let cell = FactorialCell::all()[5];
        let spec = cell.spec();
        let truth = ground_truth(&spec.task().unwrap());
        let manifest = Manifest {
            generator_version: "0.0.0".into(),
            layout_hash: "abcdef0123456789".into(),
            entries: vec![ManifestEntry {
                file: cell.file_name(),
                spec,
                answer: truth.answer,
                p_top: truth.p_top,
                p_bottom: truth.p_bottom,
            }],
        };
        let parsed = Manifest::from_json(&manifest.to_json()).unwrap();
        assert_eq!(parsed, manifest);
    }
}
