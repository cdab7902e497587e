//! Chart geometry: turns a stimulus description into resolution-independent
//! pixel-space scenes.
//!
//! A scene holds two stacked panels over a shared x-axis. Panel heights are
//! expressed upward from each panel's baseline; the renderer flips them into
//! document coordinates. All mark positions are fixed here — the renderer
//! adds nothing but paint, so readers (oracle strategies) and the SVG backend
//! see exactly the same geometry.

use serde::{Deserialize, Serialize};

use crate::dist::{ComparisonTask, Normal};
use crate::error::{Error, Result};

/// Chart family of a stimulus panel pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VisKind {
    /// Filled probability density curve.
    Pdf,
    /// Quantile dot plot: equal-mass dots binned and stacked on the axis.
    Qdp,
    /// Density curve cut into equal-probability slices, one dot per slice.
    Croissant,
}

impl VisKind {
    pub fn label(&self) -> &'static str {
        match self {
            VisKind::Pdf => "pdf",
            VisKind::Qdp => "qdp",
            VisKind::Croissant => "croissant",
        }
    }

    pub fn parse(label: &str) -> Result<VisKind> {
        match label {
            "pdf" => Ok(VisKind::Pdf),
            "qdp" => Ok(VisKind::Qdp),
            "croissant" => Ok(VisKind::Croissant),
            other => Err(Error::InvalidConfig(format!(
                "unknown chart kind {other:?}; expected pdf, qdp, or croissant"
            ))),
        }
    }
}

/// How the two panels' vertical extents are reconciled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scaling {
    /// Both panels enclose the same pixel area (same dot size for dot plots).
    EqualArea,
    /// Both panels rise to the same peak height (same tallest stack for dot
    /// plots, shrinking dot size where stacks are tall).
    EqualHeight,
}

impl Scaling {
    pub const ALL: [Scaling; 2] = [Scaling::EqualArea, Scaling::EqualHeight];

    pub fn label(&self) -> &'static str {
        match self {
            Scaling::EqualArea => "equal-area",
            Scaling::EqualHeight => "equal-height",
        }
    }

    pub fn parse(label: &str) -> Result<Scaling> {
        Scaling::ALL
            .into_iter()
            .find(|s| s.label() == label)
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "unknown scaling {label:?}; expected equal-area or equal-height"
                ))
            })
    }
}

/// Which panel carries the narrower (smaller sigma) distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Position {
    #[serde(rename = "narrow-top")]
    NarrowOnTop,
    #[serde(rename = "narrow-bottom")]
    NarrowOnBottom,
}

impl Position {
    pub const ALL: [Position; 2] = [Position::NarrowOnTop, Position::NarrowOnBottom];

    pub fn label(&self) -> &'static str {
        match self {
            Position::NarrowOnTop => "narrow-top",
            Position::NarrowOnBottom => "narrow-bottom",
        }
    }

    pub fn parse(label: &str) -> Result<Position> {
        Position::ALL
            .into_iter()
            .find(|p| p.label() == label)
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "unknown position {label:?}; expected narrow-top or narrow-bottom"
                ))
            })
    }
}

/// Everything needed to build one stimulus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StimulusSpec {
    pub vis: VisKind,
    /// Number of equal-probability quantiles; required for Qdp and Croissant,
    /// forbidden for Pdf.
    pub quantiles: Option<u32>,
    pub scaling: Scaling,
    pub sigma_narrow: f64,
    pub sigma_wide: f64,
    pub position: Position,
    pub mu: f64,
    pub threshold: f64,
}

impl StimulusSpec {
    /// Checks internal consistency; every builder entry point calls this.
    pub fn validate(&self) -> Result<()> {
        if !self.mu.is_finite() {
            return Err(Error::InvalidMu(self.mu));
        }
        for sigma in [self.sigma_narrow, self.sigma_wide] {
            if !(sigma.is_finite() && sigma > 0.0) {
                return Err(Error::InvalidSigma(sigma));
            }
        }
        if self.sigma_narrow >= self.sigma_wide {
            return Err(Error::InvalidStimulus(format!(
                "sigma_narrow ({}) must be strictly smaller than sigma_wide ({})",
                self.sigma_narrow, self.sigma_wide
            )));
        }
        if !(self.threshold.is_finite() && self.threshold > self.mu) {
            return Err(Error::ThresholdNotAboveMean {
                threshold: self.threshold,
                mu: self.mu,
            });
        }
        match (self.vis, self.quantiles) {
            (VisKind::Pdf, Some(q)) => Err(Error::InvalidStimulus(format!(
                "pdf charts take no quantile count, got {q}"
            ))),
            (VisKind::Pdf, None) => Ok(()),
            (VisKind::Qdp | VisKind::Croissant, None) => Err(Error::InvalidStimulus(format!(
                "{} charts need a quantile count",
                self.vis.label()
            ))),
            (VisKind::Qdp, Some(q)) if q < 1 => {
                Err(Error::TooFewQuantiles { min: 1, got: q })
            }
            (VisKind::Croissant, Some(q)) if q < 2 => {
                Err(Error::TooFewQuantiles { min: 2, got: q })
            }
            _ => Ok(()),
        }
    }

    /// Standard deviation drawn in the top panel.
    pub fn sigma_top(&self) -> f64 {
        match self.position {
            Position::NarrowOnTop => self.sigma_narrow,
            Position::NarrowOnBottom => self.sigma_wide,
        }
    }

    /// Standard deviation drawn in the bottom panel.
    pub fn sigma_bottom(&self) -> f64 {
        match self.position {
            Position::NarrowOnTop => self.sigma_wide,
            Position::NarrowOnBottom => self.sigma_narrow,
        }
    }

    /// Chart-family label including the quantile count where one applies:
    /// "pdf", "qdp-20", "croissant-10", ...
    pub fn condition_label(&self) -> String {
        match (self.vis, self.quantiles) {
            (VisKind::Pdf, _) => "pdf".to_string(),
            (kind, Some(q)) => format!("{}-{q}", kind.label()),
            (kind, None) => kind.label().to_string(),
        }
    }

    /// Sigma-pair label, e.g. "2v5" or "4.5v5".
    pub fn sd_label(&self) -> String {
        format!("{}v{}", self.sigma_narrow, self.sigma_wide)
    }

    /// The comparison question this stimulus poses.
    pub fn task(&self) -> Result<ComparisonTask> {
        self.validate()?;
        let top = Normal::new(self.mu, self.sigma_top())?;
        let bottom = Normal::new(self.mu, self.sigma_bottom())?;
        ComparisonTask::new(top, bottom, self.threshold)
    }
}

/// Pixel-geometry knobs with compiled-in defaults; every field can be
/// overridden from the `[layout]` section of a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LayoutConfig {
    /// Drawable width of each panel in pixels.
    pub panel_width_px: f64,
    /// Vertical room reserved for each panel.
    pub panel_height_px: f64,
    /// Gap between the two panels.
    pub panel_gap_px: f64,
    pub margin_left_px: f64,
    pub margin_right_px: f64,
    pub margin_top_px: f64,
    pub margin_bottom_px: f64,
    /// Equal-height scaling raises every curve peak (or tallest stack) to this.
    pub target_peak_px: f64,
    /// Equal-area scaling gives every curve this many square pixels of ink.
    pub target_area_px2: f64,
    /// Half-width of the shared x-domain, in wide-panel standard deviations.
    pub domain_halfwidth_sigmas: f64,
    /// Sample count for curve polylines (at least 256).
    pub curve_samples: usize,
    /// Fraction of each slice's width shaved off both sides as a visual gap.
    pub slice_pad_frac: f64,
    /// Croissant dots sit at this fraction of the local curve height.
    pub dot_height_frac: f64,
    pub croissant_dot_radius_px: f64,
    /// Dot radius for quantile dot plots under equal-area scaling.
    pub qdp_dot_radius_px: f64,
    /// Dot-plot bin width in data units; derived as domain span / 24 when unset.
    pub qdp_bin_width_data: Option<f64>,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        LayoutConfig {
            panel_width_px: 480.0,
            panel_height_px: 200.0,
            panel_gap_px: 48.0,
            margin_left_px: 56.0,
            margin_right_px: 24.0,
            margin_top_px: 24.0,
            margin_bottom_px: 64.0,
            target_peak_px: 120.0,
            target_area_px2: 12000.0,
            domain_halfwidth_sigmas: 3.5,
            curve_samples: 257,
            slice_pad_frac: 0.04,
            dot_height_frac: 0.4,
            croissant_dot_radius_px: 4.0,
            qdp_dot_radius_px: 7.0,
            qdp_bin_width_data: None,
        }
    }
}

impl LayoutConfig {
    /// Rejects configurations the builders cannot honor.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("panel_width_px", self.panel_width_px),
            ("panel_height_px", self.panel_height_px),
            ("target_peak_px", self.target_peak_px),
            ("target_area_px2", self.target_area_px2),
            ("domain_halfwidth_sigmas", self.domain_halfwidth_sigmas),
            ("dot_height_frac", self.dot_height_frac),
            ("croissant_dot_radius_px", self.croissant_dot_radius_px),
            ("qdp_dot_radius_px", self.qdp_dot_radius_px),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be positive and finite, got {value}"
                )));
            }
        }
        let non_negative = [
            ("panel_gap_px", self.panel_gap_px),
            ("margin_left_px", self.margin_left_px),
            ("margin_right_px", self.margin_right_px),
            ("margin_top_px", self.margin_top_px),
            ("margin_bottom_px", self.margin_bottom_px),
        ];
        for (name, value) in non_negative {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be non-negative and finite, got {value}"
                )));
            }
        }
        if self.curve_samples < 256 {
            return Err(Error::InvalidConfig(format!(
                "curve_samples must be at least 256, got {}",
                self.curve_samples
            )));
        }
        if !(self.slice_pad_frac.is_finite()
            && (0.0..0.5).contains(&self.slice_pad_frac))
        {
            return Err(Error::InvalidConfig(format!(
                "slice_pad_frac must lie in [0, 0.5) so slices keep positive width, got {}",
                self.slice_pad_frac
            )));
        }
        if let Some(w) = self.qdp_bin_width_data {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "qdp_bin_width_data must be positive and finite, got {w}"
                )));
            }
        }
        Ok(())
    }

    /// Dot-plot bin width for a given domain span: configured value, or the
    /// span split into 24 bins.
    pub fn qdp_bin_width(&self, span: f64) -> f64 {
        self.qdp_bin_width_data.unwrap_or(span / 24.0)
    }
}

/// Affine map from data units to pixel x-coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XToPx {
    pub px_per_unit: f64,
    pub offset_px: f64,
}

impl XToPx {
    pub fn to_px(&self, x: f64) -> f64 {
        self.offset_px + x * self.px_per_unit
    }

    pub fn to_data(&self, px: f64) -> f64 {
        (px - self.offset_px) / self.px_per_unit
    }
}

/// One equal-probability slice of a croissant panel.
#[derive(Debug, Clone, PartialEq)]
pub struct Slice {
    /// Visible (padded) pixel extent.
    pub left_px: f64,
    pub right_px: f64,
    /// Unpadded slice boundaries in data units (outer slices clip to the
    /// domain); padding removes pixels, never probability.
    pub data_left: f64,
    pub data_right: f64,
    /// Top run of the slice outline, as (x px, height px above baseline),
    /// left to right; the renderer closes it down to the baseline.
    pub outline_top: Vec<(f64, f64)>,
    /// Probability mass the slice stands for (1/n).
    pub mass_share: f64,
    pub index_from_left: usize,
    pub darkened_border: bool,
}

/// A plotted dot (croissant slice marker or dot-plot datum).
#[derive(Debug, Clone, PartialEq)]
pub struct Dot {
    pub center_x_px: f64,
    /// Height of the dot center above the panel baseline.
    pub center_y_px: f64,
    pub radius_px: f64,
    /// The underlying datum in data units (pre-snapping for dot plots).
    pub data_x: f64,
    pub darkened_border: bool,
}

/// The marks one panel carries — exactly one family per chart kind.
#[derive(Debug, Clone, PartialEq)]
pub enum PanelMarks {
    /// Filled density curve: (x px, height px) samples plus the vertical
    /// multiplier in px per density unit.
    Curve {
        points: Vec<(f64, f64)>,
        scale_px: f64,
    },
    /// Croissant: slices cut from a curve with that multiplier, one dot each.
    Slices {
        slices: Vec<Slice>,
        dots: Vec<Dot>,
        scale_px: f64,
    },
    /// Dot plot: binned, stacked dots and the bin width that placed them.
    Dots {
        dots: Vec<Dot>,
        bin_width_data: f64,
    },
}

/// One panel: a distribution drawn as marks above a baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub dist: Normal,
    /// Document y-coordinate of this panel's baseline (downward axis).
    pub baseline_y_px: f64,
    pub marks: PanelMarks,
}

impl Panel {
    /// Vertical curve multiplier, for mark families cut from a curve.
    pub fn curve_scale_px(&self) -> Option<f64> {
        match &self.marks {
            PanelMarks::Curve { scale_px, .. } | PanelMarks::Slices { scale_px, .. } => {
                Some(*scale_px)
            }
            PanelMarks::Dots { .. } => None,
        }
    }

    /// All dots the panel shows, if any.
    pub fn dots(&self) -> Option<&[Dot]> {
        match &self.marks {
            PanelMarks::Curve { .. } => None,
            PanelMarks::Slices { dots, .. } | PanelMarks::Dots { dots, .. } => Some(dots),
        }
    }

    pub fn slices(&self) -> Option<&[Slice]> {
        match &self.marks {
            PanelMarks::Slices { slices, .. } => Some(slices),
            _ => None,
        }
    }
}

/// A complete two-panel stimulus in pixel space.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub width_px: f64,
    pub height_px: f64,
    pub panel_width_px: f64,
    pub panel_height_px: f64,
    /// Shared data-unit x-domain, mu ± domain_halfwidth_sigmas · sigma_wide.
    pub x_domain: (f64, f64),
    pub x_to_px: XToPx,
    /// Comparison threshold in data units and as a pixel x-coordinate.
    pub threshold: f64,
    pub threshold_px: f64,
    /// Top panel first, bottom panel second.
    pub panels: [Panel; 2],
    /// Sample count used for curve polylines (kept for resampling needs).
    pub curve_samples: usize,
}

impl Scene {
    /// The chart family actually drawn, recovered from the marks.
    pub fn vis_kind(&self) -> VisKind {
        match self.panels[0].marks {
            PanelMarks::Curve { .. } => VisKind::Pdf,
            PanelMarks::Slices { .. } => VisKind::Croissant,
            PanelMarks::Dots { .. } => VisKind::Qdp,
        }
    }

    pub fn top(&self) -> &Panel {
        &self.panels[0]
    }

    pub fn bottom(&self) -> &Panel {
        &self.panels[1]
    }

    /// The panel's underlying scaled curve as (x px, height px) samples —
    /// stored points for curve panels, resampled for sliced panels, absent
    /// for dot plots.
    pub fn panel_curve_points(&self, idx: usize) -> Option<Vec<(f64, f64)>> {
        let panel = &self.panels[idx];
        match &panel.marks {
            PanelMarks::Curve { points, .. } => Some(points.clone()),
            PanelMarks::Slices { scale_px, .. } => Some(sample_scaled_curve(
                &panel.dist,
                *scale_px,
                self.x_domain,
                &self.x_to_px,
                self.curve_samples,
            )),
            PanelMarks::Dots { .. } => None,
        }
    }

    /// Pixel ink area of a panel: the area under the scaled curve for
    /// curve-based panels (trapezoid rule), total dot area for dot plots.
    pub fn panel_pixel_area(&self, idx: usize) -> f64 {
        match &self.panels[idx].marks {
            PanelMarks::Dots { dots, .. } => dots
                .iter()
                .map(|d| std::f64::consts::PI * d.radius_px * d.radius_px)
                .sum(),
            _ => {
                let points = self
                    .panel_curve_points(idx)
                    .expect("curve-based panel has curve points");
                trapezoid_area(&points)
            }
        }
    }

    /// Peak pixel height of a panel: the scaled density's maximum for
    /// curve-based panels, the top of the tallest dot stack for dot plots.
    pub fn panel_peak_px(&self, idx: usize) -> f64 {
        let panel = &self.panels[idx];
        match &panel.marks {
            PanelMarks::Dots { dots, .. } => dots
                .iter()
                .map(|d| d.center_y_px + d.radius_px)
                .fold(0.0, f64::max),
            _ => {
                let scale = panel.curve_scale_px().expect("curve-based panel");
                scale * panel.dist.pdf(panel.dist.mu())
            }
        }
    }
}

/// Area under a (x, height) polyline by the trapezoid rule.
pub fn trapezoid_area(points: &[(f64, f64)]) -> f64 {
    points
        .windows(2)
        .map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0))
        .sum()
}

/// Evenly samples the scaled density over the domain.
fn sample_scaled_curve(
    dist: &Normal,
    scale_px: f64,
    domain: (f64, f64),
    map: &XToPx,
    samples: usize,
) -> Vec<(f64, f64)> {
    let (lo, hi) = domain;
    let last = (samples - 1) as f64;
    (0..samples)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / last;
            (map.to_px(x), scale_px * dist.pdf(x))
        })
        .collect()
}

/// Vertical multiplier (px per density unit) that realizes the requested
/// scaling for this distribution over the plotted domain.
pub fn scale_curve(
    dist: &Normal,
    scaling: Scaling,
    layout: &LayoutConfig,
    domain: (f64, f64),
) -> f64 {
    match scaling {
        Scaling::EqualHeight => layout.target_peak_px / dist.pdf(dist.mu()),
        Scaling::EqualArea => {
            let px_per_unit = layout.panel_width_px / (domain.1 - domain.0);
            let mass_in_domain = dist.cdf(domain.1) - dist.cdf(domain.0);
            layout.target_area_px2 / (px_per_unit * mass_in_domain)
        }
    }
}

/// Shared per-panel geometry handed to the panel builders.
#[derive(Debug, Clone, Copy)]
pub struct PanelFrame {
    pub x_domain: (f64, f64),
    pub x_to_px: XToPx,
    pub baseline_y_px: f64,
}

/// Builds a filled-density panel: the curve sampled at `curve_samples`
/// evenly spaced x positions across the domain.
pub fn build_pdf_panel(
    dist: Normal,
    scaling: Scaling,
    layout: &LayoutConfig,
    frame: &PanelFrame,
) -> Result<Panel> {
    layout.validate()?;
    let scale_px = scale_curve(&dist, scaling, layout, frame.x_domain);
    let points = sample_scaled_curve(
        &dist,
        scale_px,
        frame.x_domain,
        &frame.x_to_px,
        layout.curve_samples,
    );
    Ok(Panel {
        dist,
        baseline_y_px: frame.baseline_y_px,
        marks: PanelMarks::Curve { points, scale_px },
    })
}

/// Builds a quantile dot plot panel: n equal-mass dots, snapped to bin
/// centers and stacked upward in ascending value order.
pub fn build_qdp_panel(
    dist: Normal,
    quantiles: u32,
    scaling: Scaling,
    layout: &LayoutConfig,
    frame: &PanelFrame,
) -> Result<Panel> {
    layout.validate()?;
    let (lo, hi) = frame.x_domain;
    let span = hi - lo;
    let bin_width = layout.qdp_bin_width(span);
    if bin_width >= span {
        return Err(Error::InvalidConfig(format!(
            "qdp bin width {bin_width} must be smaller than the domain span {span}"
        )));
    }
    let bin_count = (span / bin_width).ceil() as i64;

    let values = dist.quantile_dots(quantiles)?;
    let mut per_bin = vec![0_u32; bin_count as usize];
    let mut placed = Vec::with_capacity(values.len());
    for x in &values {
        let idx = (((x - lo) / bin_width).floor() as i64).clamp(0, bin_count - 1) as usize;
        placed.push((*x, idx));
        per_bin[idx] += 1;
    }

    let radius = match scaling {
        Scaling::EqualArea => layout.qdp_dot_radius_px,
        Scaling::EqualHeight => {
            let tallest = per_bin.iter().copied().max().unwrap_or(1).max(1);
            let r = layout.target_peak_px / (2.0 * f64::from(tallest));
            if r < 1.0 {
                log::warn!(
                    "equal-height dot radius {r:.3}px for sigma {} collapses below 1px; clamping",
                    dist.sigma()
                );
                1.0
            } else {
                r
            }
        }
    };

    let mut stacked_so_far = vec![0_u32; bin_count as usize];
    let dots = placed
        .into_iter()
        .map(|(x, idx)| {
            let level = stacked_so_far[idx];
            stacked_so_far[idx] += 1;
            Dot {
                center_x_px: frame.x_to_px.to_px(lo + (idx as f64 + 0.5) * bin_width),
                center_y_px: radius * (2.0 * f64::from(level) + 1.0),
                radius_px: radius,
                data_x: x,
                darkened_border: false,
            }
        })
        .collect();

    Ok(Panel {
        dist,
        baseline_y_px: frame.baseline_y_px,
        marks: PanelMarks::Dots {
            dots,
            bin_width_data: bin_width,
        },
    })
}

/// Builds a croissant panel: the scaled curve cut at quantile boundaries
/// into n slices (outer slices clipped to the domain), each slice shaved by
/// the padding fraction and marked with a dot at its mass midpoint.
pub fn build_croissant_panel(
    dist: Normal,
    quantiles: u32,
    scaling: Scaling,
    layout: &LayoutConfig,
    frame: &PanelFrame,
) -> Result<Panel> {
    layout.validate()?;
    if quantiles != 10 && quantiles != 20 {
        log::warn!("croissant charts are typically drawn with 10 or 20 slices, got {quantiles}");
    }
    let scale_px = scale_curve(&dist, scaling, layout, frame.x_domain);
    let (lo, hi) = frame.x_domain;

    let mut edges = Vec::with_capacity(quantiles as usize + 1);
    edges.push(lo);
    edges.extend(dist.quantile_boundaries(quantiles)?);
    edges.push(hi);

    let mass_share = 1.0 / f64::from(quantiles);
    let mut slices = Vec::with_capacity(quantiles as usize);
    for (k, pair) in edges.windows(2).enumerate() {
        let (data_left, data_right) = (pair[0], pair[1]);
        let full_left_px = frame.x_to_px.to_px(data_left);
        let full_right_px = frame.x_to_px.to_px(data_right);
        let pad = layout.slice_pad_frac * (full_right_px - full_left_px);
        let left_px = full_left_px + pad;
        let right_px = full_right_px - pad;
        if right_px <= left_px {
            return Err(Error::InvalidConfig(format!(
                "slice_pad_frac {} leaves slice {} of width {:.3}px with nothing to draw",
                layout.slice_pad_frac,
                k + 1,
                full_right_px - full_left_px
            )));
        }
        let outline_top = sample_slice_top(&dist, scale_px, left_px, right_px, &frame.x_to_px);
        slices.push(Slice {
            left_px,
            right_px,
            data_left,
            data_right,
            outline_top,
            mass_share,
            index_from_left: k,
            darkened_border: true,
        });
    }

    let dots = dist
        .quantile_dots(quantiles)?
        .into_iter()
        .map(|x| Dot {
            center_x_px: frame.x_to_px.to_px(x),
            center_y_px: layout.dot_height_frac * scale_px * dist.pdf(x),
            radius_px: layout.croissant_dot_radius_px,
            data_x: x,
            darkened_border: true,
        })
        .collect();

    Ok(Panel {
        dist,
        baseline_y_px: frame.baseline_y_px,
        marks: PanelMarks::Slices {
            slices,
            dots,
            scale_px,
        },
    })
}

/// Samples a slice's top edge at roughly 2px resolution.
fn sample_slice_top(
    dist: &Normal,
    scale_px: f64,
    left_px: f64,
    right_px: f64,
    map: &XToPx,
) -> Vec<(f64, f64)> {
    let width = right_px - left_px;
    let segments = ((width / 2.0).ceil() as usize).max(8);
    (0..=segments)
        .map(|i| {
            let x_px = left_px + width * i as f64 / segments as f64;
            (x_px, scale_px * dist.pdf(map.to_data(x_px)))
        })
        .collect()
}

/// Assembles the full two-panel scene for a stimulus.
pub fn build_scene(spec: &StimulusSpec, layout: &LayoutConfig) -> Result<Scene> {
    spec.validate()?;
    layout.validate()?;

    let half = layout.domain_halfwidth_sigmas * spec.sigma_wide;
    let (lo, hi) = (spec.mu - half, spec.mu + half);
    if spec.threshold >= hi {
        return Err(Error::InvalidStimulus(format!(
            "threshold {} falls outside the plotted domain ending at {hi}",
            spec.threshold
        )));
    }

    let px_per_unit = layout.panel_width_px / (hi - lo);
    let x_to_px = XToPx {
        px_per_unit,
        offset_px: layout.margin_left_px - lo * px_per_unit,
    };

    let top_baseline = layout.margin_top_px + layout.panel_height_px;
    let bottom_baseline = top_baseline + layout.panel_gap_px + layout.panel_height_px;

    let mut panels = Vec::with_capacity(2);
    for (sigma, baseline_y_px) in [
        (spec.sigma_top(), top_baseline),
        (spec.sigma_bottom(), bottom_baseline),
    ] {
        let dist = Normal::new(spec.mu, sigma)?;
        let frame = PanelFrame {
            x_domain: (lo, hi),
            x_to_px,
            baseline_y_px,
        };
        let panel = match spec.vis {
            VisKind::Pdf => build_pdf_panel(dist, spec.scaling, layout, &frame)?,
            VisKind::Qdp => {
                build_qdp_panel(dist, spec.quantiles.unwrap(), spec.scaling, layout, &frame)?
            }
            VisKind::Croissant => {
                build_croissant_panel(dist, spec.quantiles.unwrap(), spec.scaling, layout, &frame)?
            }
        };
        panels.push(panel);
    }
    let panels: [Panel; 2] = panels.try_into().expect("exactly two panels");

    Ok(Scene {
        width_px: layout.margin_left_px + layout.panel_width_px + layout.margin_right_px,
        height_px: bottom_baseline + layout.margin_bottom_px,
        panel_width_px: layout.panel_width_px,
        panel_height_px: layout.panel_height_px,
        x_domain: (lo, hi),
        x_to_px,
        threshold: spec.threshold,
        threshold_px: x_to_px.to_px(spec.threshold),
        panels,
        curve_samples: layout.curve_samples,
    })
}
