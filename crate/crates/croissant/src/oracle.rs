//! Deterministic reader strategies: each one reduces a panel to a single
//! evidence scalar (a height, area, width, slope, or count read off the
//! rendered geometry) and answers the comparison task by comparing the two
//! panels' scalars under a perceptual tie rule.
//!
//! The strategies formalize shortcuts people take when asked "which
//! distribution puts more probability below the threshold?": comparing curve
//! heights, eyeballing partial areas, judging spread or steepness, counting
//! dots, or interpolating across slice edges. Some are only meaningful for
//! certain chart families; asking for an impossible pairing (counting dots
//! on a plain density curve) is an error, not a neutral answer.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::{ground_truth, Answer, ComparisonTask};
use crate::error::{Error, Result};
use crate::scene::{Panel, PanelMarks, Scene, StimulusSpec, VisKind};

/// The eight coded reader strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Strategy {
    /// Compare curve (or dot-stack) heights at the shared mean.
    #[serde(rename = "height-at-mean")]
    HeightAtMean,
    /// Compare the visible ink height in the column at the threshold.
    #[serde(rename = "height-at-threshold")]
    HeightAtThreshold,
    /// Compare pixel areas of ink left of the threshold.
    #[serde(rename = "area-left")]
    AreaLeftOfThreshold,
    /// Compare how wide the distributions look; the wider panel wins.
    #[serde(rename = "spread")]
    SpreadComparison,
    /// Compare maximum steepness; the less steep panel wins.
    #[serde(rename = "slope")]
    SlopeComparison,
    /// Count dots at or below the threshold.
    #[serde(rename = "counting")]
    DotCounting,
    /// Whole slices left of the threshold plus the bisected slice's fraction.
    #[serde(rename = "inter-edge")]
    InterEdgeInterpolation,
    /// Compare only the mark column directly over the threshold tick.
    #[serde(rename = "over-tick")]
    DirectlyOverTick,
}

impl Strategy {
    pub const ALL: [Strategy; 8] = [
        Strategy::HeightAtMean,
        Strategy::HeightAtThreshold,
        Strategy::AreaLeftOfThreshold,
        Strategy::SpreadComparison,
        Strategy::SlopeComparison,
        Strategy::DotCounting,
        Strategy::InterEdgeInterpolation,
        Strategy::DirectlyOverTick,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Strategy::HeightAtMean => "height-at-mean",
            Strategy::HeightAtThreshold => "height-at-threshold",
            Strategy::AreaLeftOfThreshold => "area-left",
            Strategy::SpreadComparison => "spread",
            Strategy::SlopeComparison => "slope",
            Strategy::DotCounting => "counting",
            Strategy::InterEdgeInterpolation => "inter-edge",
            Strategy::DirectlyOverTick => "over-tick",
        }
    }

    pub fn parse(label: &str) -> Result<Strategy> {
        Strategy::ALL
            .into_iter()
            .find(|s| s.label() == label)
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "unknown strategy {label:?}; expected one of: {}",
                    Strategy::ALL.map(|s| s.label()).join(", ")
                ))
            })
    }

    /// Whether the strategy can be executed on a chart family at all:
    /// counting needs dots, inter-edge needs slices, slope needs a curve.
    pub fn affords(&self, vis: VisKind) -> bool {
        match self {
            Strategy::DotCounting => vis != VisKind::Pdf,
            Strategy::InterEdgeInterpolation => vis == VisKind::Croissant,
            Strategy::SlopeComparison => vis != VisKind::Qdp,
            _ => true,
        }
    }
}

/// How the inter-edge reader turns the bisected slice into a fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum InterEdgeMode {
    /// What a viewer sees: the fraction of the slice's width left of the
    /// threshold.
    #[default]
    Geometric,
    /// Idealized contrast case: the fraction of the slice's probability
    /// mass left of the threshold.
    ExactMass,
}

impl InterEdgeMode {
    pub fn label(&self) -> &'static str {
        match self {
            InterEdgeMode::Geometric => "geometric",
            InterEdgeMode::ExactMass => "exact-mass",
        }
    }

    pub fn parse(label: &str) -> Result<InterEdgeMode> {
        match label {
            "geometric" => Ok(InterEdgeMode::Geometric),
            "exact-mass" => Ok(InterEdgeMode::ExactMass),
            other => Err(Error::InvalidConfig(format!(
                "unknown inter-edge mode {other:?}; expected geometric or exact-mass"
            ))),
        }
    }
}

/// Evaluation knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    /// Perceptual tie fraction: evidence values within this relative
    /// difference of each other read as "neither".
    pub epsilon: f64,
    pub inter_edge_mode: InterEdgeMode,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            epsilon: 0.01,
            inter_edge_mode: InterEdgeMode::Geometric,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && (0.0..1.0).contains(&self.epsilon)) {
            return Err(Error::InvalidConfig(format!(
                "epsilon must lie in [0, 1), got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// One strategy's answer, with the per-panel scalars that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleVerdict {
    pub choice: Answer,
    pub evidence_top: f64,
    pub evidence_bottom: f64,
    /// Whether `choice` matches the analytic ground truth.
    pub correct: bool,
}

/// Applies the tie rule: the larger evidence wins unless the two values sit
/// within `epsilon` relative difference of each other.
fn choose(evidence_top: f64, evidence_bottom: f64, epsilon: f64) -> Answer {
    let magnitude = evidence_top.abs().max(evidence_bottom.abs());
    if magnitude == 0.0 {
        return Answer::Neither;
    }
    let relative = (evidence_top - evidence_bottom) / magnitude;
    if relative > epsilon {
        Answer::TopDistribution
    } else if relative < -epsilon {
        Answer::BottomDistribution
    } else {
        Answer::Neither
    }
}

/// Runs one strategy against a scene and scores it against the analytic
/// ground truth of the task.
pub fn evaluate(
    strategy: Strategy,
    scene: &Scene,
    task: &ComparisonTask,
    config: &OracleConfig,
) -> Result<OracleVerdict> {
    config.validate()?;
    let vis = scene.vis_kind();
    if !strategy.affords(vis) {
        return Err(Error::NotAfforded {
            strategy: strategy.label(),
            vis: vis.label(),
        });
    }
    if (scene.threshold - task.threshold).abs() > 1e-9
        || scene.panels[0].dist != task.top
        || scene.panels[1].dist != task.bottom
    {
        return Err(Error::InvalidStimulus(
            "scene and task describe different stimuli".to_string(),
        ));
    }

    let evidence_top = panel_evidence(strategy, scene, 0, config);
    let evidence_bottom = panel_evidence(strategy, scene, 1, config);
    let choice = choose(evidence_top, evidence_bottom, config.epsilon);
    let truth = ground_truth(task);
    Ok(OracleVerdict {
        choice,
        evidence_top,
        evidence_bottom,
        correct: choice == truth.answer,
    })
}

/// Reduces one panel to the strategy's evidence scalar. Units differ by
/// strategy (px, px², dot counts, slice counts, negated px/px slope); only
/// the comparison between panels is meaningful.
fn panel_evidence(strategy: Strategy, scene: &Scene, idx: usize, config: &OracleConfig) -> f64 {
    let panel = &scene.panels[idx];
    match strategy {
        Strategy::HeightAtMean => height_at(panel, scene, panel.dist.mu()),
        Strategy::HeightAtThreshold | Strategy::DirectlyOverTick => {
            ink_height_at_threshold(panel, scene)
        }
        Strategy::AreaLeftOfThreshold => area_left_of_threshold(panel, scene),
        Strategy::SpreadComparison => visible_spread_px(panel, scene),
        Strategy::SlopeComparison => -max_drawn_slope(panel),
        Strategy::DotCounting => {
            let dots = panel.dots().expect("affordance already checked");
            dots.iter().filter(|d| d.data_x <= scene.threshold).count() as f64
        }
        Strategy::InterEdgeInterpolation => inter_edge_evidence(panel, scene, config),
    }
}

/// Curve or stack height at a data-unit x position. For curve-backed panels
/// this is the drawn curve's height at that abscissa (slice padding hides
/// pixels, not the silhouette a reader lines up against); for dot plots it
/// is the height of the dot stack in the bin containing x.
fn height_at(panel: &Panel, scene: &Scene, x: f64) -> f64 {
    match &panel.marks {
        PanelMarks::Curve { scale_px, .. } | PanelMarks::Slices { scale_px, .. } => {
            scale_px * panel.dist.pdf(x)
        }
        PanelMarks::Dots {
            dots,
            bin_width_data,
        } => stack_height_in_bin(dots, scene, *bin_width_data, x),
    }
}

/// Height of visible ink in the column at the threshold: zero when the
/// threshold falls in a slice gap or an empty dot-plot bin.
fn ink_height_at_threshold(panel: &Panel, scene: &Scene) -> f64 {
    let t = scene.threshold;
    match &panel.marks {
        PanelMarks::Curve { scale_px, .. } => scale_px * panel.dist.pdf(t),
        PanelMarks::Slices {
            slices, scale_px, ..
        } => {
            let t_px = scene.threshold_px;
            if slices.iter().any(|s| s.left_px <= t_px && t_px <= s.right_px) {
                scale_px * panel.dist.pdf(t)
            } else {
                0.0
            }
        }
        PanelMarks::Dots {
            dots,
            bin_width_data,
        } => stack_height_in_bin(dots, scene, *bin_width_data, t),
    }
}

/// Total stacked-dot height in the bin containing x (dots share a bin iff
/// they share a snapped center).
fn stack_height_in_bin(
    dots: &[crate::scene::Dot],
    scene: &Scene,
    bin_width_data: f64,
    x: f64,
) -> f64 {
    let lo = scene.x_domain.0;
    let idx = ((x - lo) / bin_width_data).floor();
    let center_px = scene.x_to_px.to_px(lo + (idx + 0.5) * bin_width_data);
    dots.iter()
        .filter(|d| (d.center_x_px - center_px).abs() < 1e-6)
        .map(|d| 2.0 * d.radius_px)
        .sum()
}

/// Trapezoid area under a height polyline, clipped at a pixel cut; the
/// straddling segment contributes its interpolated left part.
fn area_left_of(points: &[(f64, f64)], cut_px: f64) -> f64 {
    let mut area = 0.0;
    for pair in points.windows(2) {
        let ((x0, h0), (x1, h1)) = (pair[0], pair[1]);
        if x1 <= cut_px {
            area += 0.5 * (h0 + h1) * (x1 - x0);
        } else if x0 < cut_px {
            let t = (cut_px - x0) / (x1 - x0);
            let h_cut = h0 + t * (h1 - h0);
            area += 0.5 * (h0 + h_cut) * (cut_px - x0);
        }
    }
    area
}

/// Pixel area of visible ink left of the threshold: curve area for density
/// panels, per-slice outline areas for croissants (gaps contribute nothing),
/// summed dot areas for dot plots.
fn area_left_of_threshold(panel: &Panel, scene: &Scene) -> f64 {
    let t_px = scene.threshold_px;
    match &panel.marks {
        PanelMarks::Curve { points, .. } => area_left_of(points, t_px),
        PanelMarks::Slices { slices, .. } => slices
            .iter()
            .map(|s| area_left_of(&s.outline_top, t_px))
            .sum(),
        PanelMarks::Dots { dots, .. } => dots
            .iter()
            .filter(|d| d.center_x_px <= t_px)
            .map(|d| std::f64::consts::PI * d.radius_px * d.radius_px)
            .sum(),
    }
}

/// Pixel width over which the panel looks "occupied": where the scaled curve
/// exceeds 2% of its peak (solved exactly on the underlying density and
/// clipped to the domain), or the horizontal extent of the dots.
fn visible_spread_px(panel: &Panel, scene: &Scene) -> f64 {
    match &panel.marks {
        PanelMarks::Dots { dots, .. } => {
            let left = dots
                .iter()
                .map(|d| d.center_x_px - d.radius_px)
                .fold(f64::INFINITY, f64::min);
            let right = dots
                .iter()
                .map(|d| d.center_x_px + d.radius_px)
                .fold(f64::NEG_INFINITY, f64::max);
            (right - left).max(0.0)
        }
        _ => {
            // pdf(x)/pdf(mu) = 0.02 at |x - mu| = sigma * sqrt(2 ln 50).
            let reach = panel.dist.sigma() * (2.0 * 50.0_f64.ln()).sqrt();
            let mu = panel.dist.mu();
            let (lo, hi) = scene.x_domain;
            let left = (mu - reach).max(lo);
            let right = (mu + reach).min(hi);
            (right - left).max(0.0) * scene.x_to_px.px_per_unit
        }
    }
}

/// Steepest |dy/dx| over the drawn polylines (per slice for croissants, so
/// gaps never register as cliffs).
fn max_drawn_slope(panel: &Panel) -> f64 {
    fn steepest(points: &[(f64, f64)]) -> f64 {
        points
            .windows(2)
            .map(|p| ((p[1].1 - p[0].1) / (p[1].0 - p[0].0)).abs())
            .fold(0.0, f64::max)
    }
    match &panel.marks {
        PanelMarks::Curve { points, .. } => steepest(points),
        PanelMarks::Slices { slices, .. } => slices
            .iter()
            .map(|s| steepest(&s.outline_top))
            .fold(0.0, f64::max),
        PanelMarks::Dots { .. } => unreachable!("slope is not afforded on dot plots"),
    }
}

/// Whole slices entirely left of the threshold plus the bisected slice's
/// fraction — geometric width share by default, probability-mass share in
/// the exact-mass mode. Unpadded slice extents are used: a reader
/// interpolates across the gap, not inside it.
fn inter_edge_evidence(panel: &Panel, scene: &Scene, config: &OracleConfig) -> f64 {
    let t = scene.threshold;
    let slices = panel.slices().expect("affordance already checked");
    let mut evidence = 0.0;
    for slice in slices {
        if slice.data_right <= t {
            evidence += 1.0;
        } else if slice.data_left < t {
            evidence += match config.inter_edge_mode {
                InterEdgeMode::Geometric => {
                    (t - slice.data_left) / (slice.data_right - slice.data_left)
                }
                InterEdgeMode::ExactMass => {
                    let d = &panel.dist;
                    (d.cdf(t) - d.cdf(slice.data_left))
                        / (d.cdf(slice.data_right) - d.cdf(slice.data_left))
                }
            };
        }
    }
    evidence
}

/// One evaluated (strategy, stimulus) cell; `verdict` is absent when the
/// strategy is not afforded on that chart family.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixRow {
    pub strategy: Strategy,
    pub spec: StimulusSpec,
    pub verdict: Option<OracleVerdict>,
}

impl MatrixRow {
    pub fn verdict_label(&self) -> &'static str {
        match &self.verdict {
            None => "not-afforded",
            Some(v) => v.choice.label(),
        }
    }
}

/// Evaluates the full strategies × stimuli cross product. Inapplicable
/// pairings are recorded as rows, not raised; any other failure aborts.
pub fn correctness_matrix(
    strategies: &[Strategy],
    specs: &[StimulusSpec],
    layout: &crate::scene::LayoutConfig,
    config: &OracleConfig,
) -> Result<Vec<MatrixRow>> {
    config.validate()?;
    // Scenes are the expensive part; build each once, in parallel, then
    // read all strategies off it.
    let per_spec: Vec<Vec<MatrixRow>> = specs
        .par_iter()
        .map(|spec| -> Result<Vec<MatrixRow>> {
            let scene = crate::scene::build_scene(spec, layout)?;
            let task = spec.task()?;
            strategies
                .iter()
                .map(|&strategy| {
                    let verdict = match evaluate(strategy, &scene, &task, config) {
                        Ok(v) => Some(v),
                        Err(Error::NotAfforded { .. }) => None,
                        Err(e) => return Err(e),
                    };
                    Ok(MatrixRow {
                        strategy,
                        spec: *spec,
                        verdict,
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    // Emit strategy-major: all stimuli for one strategy, then the next.
    let mut rows = Vec::with_capacity(strategies.len() * specs.len());
    for (s_idx, _) in strategies.iter().enumerate() {
        for spec_rows in &per_spec {
            rows.push(spec_rows[s_idx].clone());
        }
    }
    Ok(rows)
}

/// Serializes matrix rows as CSV. All fields come from closed label
/// vocabularies or numbers, so no quoting is needed; evidence cells are
/// empty for not-afforded rows.
pub fn matrix_to_csv(rows: &[MatrixRow]) -> String {
    let mut out =
        String::from("strategy,vis,scaling,sdPair,position,verdict,correct,evidenceTop,evidenceBottom\n");
    for row in rows {
        let (correct, ev_top, ev_bottom) = match &row.verdict {
            None => (String::new(), String::new(), String::new()),
            Some(v) => (
                v.correct.to_string(),
                v.evidence_top.to_string(),
                v.evidence_bottom.to_string(),
            ),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            row.strategy.label(),
            row.spec.condition_label(),
            row.spec.scaling.label(),
            row.spec.sd_label(),
            row.spec.position.label(),
            row.verdict_label(),
            correct,
            ev_top,
            ev_bottom,
        ));
    }
    out
}
