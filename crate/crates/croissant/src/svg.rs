//! Deterministic SVG 1.1 serialization of scenes.
//!
//! Rendering is a pure function of (scene, style): elements appear in a
//! fixed order and every coordinate is written with exactly three decimal
//! places, so identical inputs produce byte-identical files. No scripts, no
//! external fonts — the files stand alone in any SVG 1.1 viewer.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scene::{Panel, PanelMarks, Scene};

/// Colors, stroke widths, and typography; every field can be overridden from
/// the `[style]` section of a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StyleConfig {
    pub background: String,
    /// Warm fill/stroke pair for the top panel.
    pub top_fill: String,
    pub top_stroke: String,
    /// Cool fill/stroke pair for the bottom panel.
    pub bottom_fill: String,
    pub bottom_stroke: String,
    pub axis_color: String,
    pub axis_width: f64,
    pub curve_stroke_width: f64,
    /// Croissant slices draw their darkened border at this width.
    pub slice_stroke_width: f64,
    pub dot_stroke_width: f64,
    pub threshold_color: String,
    pub threshold_width: f64,
    pub font_family: String,
    pub tick_font_size: f64,
    pub caption_font_size: f64,
    pub text_color: String,
}

impl Default for StyleConfig {
    fn default() -> Self {
        StyleConfig {
            background: "#ffffff".into(),
            top_fill: "#f2c14e".into(),
            top_stroke: "#a67c00".into(),
            bottom_fill: "#6d9dc5".into(),
            bottom_stroke: "#2e5c8a".into(),
            axis_color: "#333333".into(),
            axis_width: 1.0,
            curve_stroke_width: 2.0,
            slice_stroke_width: 1.5,
            dot_stroke_width: 1.0,
            threshold_color: "#c0392b".into(),
            threshold_width: 1.5,
            font_family: "sans-serif".into(),
            tick_font_size: 12.0,
            caption_font_size: 12.0,
            text_color: "#333333".into(),
        }
    }
}

/// One drawable element; coordinates live in document space (y downward).
#[derive(Debug, Clone, PartialEq)]
pub enum SvgElement {
    Rect {
        x: f64,
        y: f64,
        width: f64,
        height: f64,
        class: &'static str,
        fill: String,
    },
    Line {
        x1: f64,
        y1: f64,
        x2: f64,
        y2: f64,
        class: &'static str,
        stroke: String,
        stroke_width: f64,
    },
    Path {
        points: Vec<(f64, f64)>,
        close: bool,
        class: &'static str,
        fill: String,
        stroke: String,
        stroke_width: f64,
    },
    Circle {
        cx: f64,
        cy: f64,
        r: f64,
        class: &'static str,
        fill: String,
        stroke: String,
        stroke_width: f64,
    },
    Text {
        x: f64,
        y: f64,
        content: String,
        class: &'static str,
        fill: String,
        font_family: String,
        font_size: f64,
        anchor: &'static str,
    },
}

/// A renderable document: size plus elements in paint order.
#[derive(Debug, Clone, PartialEq)]
pub struct SvgDocument {
    pub width: f64,
    pub height: f64,
    pub elements: Vec<SvgElement>,
}

/// Formats a coordinate with the fixed three-decimal contract.
fn px(value: f64) -> String {
    format!("{value:.3}")
}

/// Escapes text for use inside XML attribute values and text nodes.
fn xml_escape(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    for c in raw.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

impl SvgDocument {
    /// Serializes to a standalone UTF-8 SVG 1.1 string.
    pub fn to_xml(&self) -> String {
        let mut out = String::with_capacity(1024 + self.elements.len() * 128);
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
             width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">",
            w = px(self.width),
            h = px(self.height),
        );
        for element in &self.elements {
            out.push_str("  ");
            write_element(&mut out, element);
            out.push('\n');
        }
        out.push_str("</svg>\n");
        out
    }
}

fn write_element(out: &mut String, element: &SvgElement) {
    match element {
        SvgElement::Rect {
            x,
            y,
            width,
            height,
            class,
            fill,
        } => {
            let _ = write!(
                out,
                "<rect class=\"{class}\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>",
                px(*x),
                px(*y),
                px(*width),
                px(*height),
                xml_escape(fill),
            );
        }
        SvgElement::Line {
            x1,
            y1,
            x2,
            y2,
            class,
            stroke,
            stroke_width,
        } => {
            let _ = write!(
                out,
                "<line class=\"{class}\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" \
                 stroke=\"{}\" stroke-width=\"{}\"/>",
                px(*x1),
                px(*y1),
                px(*x2),
                px(*y2),
                xml_escape(stroke),
                px(*stroke_width),
            );
        }
        SvgElement::Path {
            points,
            close,
            class,
            fill,
            stroke,
            stroke_width,
        } => {
            let mut d = String::with_capacity(points.len() * 16);
            for (i, (x, y)) in points.iter().enumerate() {
                let _ = write!(d, "{}{},{}", if i == 0 { "M" } else { " L" }, px(*x), px(*y));
            }
            if *close {
                d.push_str(" Z");
            }
            let _ = write!(
                out,
                "<path class=\"{class}\" d=\"{d}\" fill=\"{}\" stroke=\"{}\" stroke-width=\"{}\"/>",
                xml_escape(fill),
                xml_escape(stroke),
                px(*stroke_width),
            );
        }
        SvgElement::Circle {
            cx,
            cy,
            r,
            class,
            fill,
            stroke,
            stroke_width,
        } => {
            let _ = write!(
                out,
                "<circle class=\"{class}\" cx=\"{}\" cy=\"{}\" r=\"{}\" \
                 fill=\"{}\" stroke=\"{}\" stroke-width=\"{}\"/>",
                px(*cx),
                px(*cy),
                px(*r),
                xml_escape(fill),
                xml_escape(stroke),
                px(*stroke_width),
            );
        }
        SvgElement::Text {
            x,
            y,
            content,
            class,
            fill,
            font_family,
            font_size,
            anchor,
        } => {
            let _ = write!(
                out,
                "<text class=\"{class}\" x=\"{}\" y=\"{}\" fill=\"{}\" \
                 font-family=\"{}\" font-size=\"{}\" text-anchor=\"{anchor}\">{}</text>",
                px(*x),
                px(*y),
                xml_escape(fill),
                xml_escape(font_family),
                px(*font_size),
                xml_escape(content),
            );
        }
    }
}

/// Per-panel palette selection.
fn panel_colors<'a>(style: &'a StyleConfig, idx: usize) -> (&'a str, &'a str) {
    if idx == 0 {
        (&style.top_fill, &style.top_stroke)
    } else {
        (&style.bottom_fill, &style.bottom_stroke)
    }
}

/// Lays down one panel's marks, painted above its baseline.
fn render_panel(elements: &mut Vec<SvgElement>, panel: &Panel, idx: usize, style: &StyleConfig) {
    let (fill, stroke) = panel_colors(style, idx);
    let baseline = panel.baseline_y_px;
    match &panel.marks {
        PanelMarks::Curve { points, .. } => {
            if points.len() >= 2 {
                let mut ring = Vec::with_capacity(points.len() + 2);
                ring.push((points[0].0, baseline));
                ring.extend(points.iter().map(|&(x, h)| (x, baseline - h)));
                ring.push((points[points.len() - 1].0, baseline));
                elements.push(SvgElement::Path {
                    points: ring,
                    close: true,
                    class: "curve",
                    fill: fill.into(),
                    stroke: stroke.into(),
                    stroke_width: style.curve_stroke_width,
                });
            }
        }
        PanelMarks::Slices { slices, dots, .. } => {
            for slice in slices {
                let mut ring = Vec::with_capacity(slice.outline_top.len() + 2);
                ring.push((slice.left_px, baseline));
                ring.extend(slice.outline_top.iter().map(|&(x, h)| (x, baseline - h)));
                ring.push((slice.right_px, baseline));
                elements.push(SvgElement::Path {
                    points: ring,
                    close: true,
                    class: "slice",
                    fill: fill.into(),
                    stroke: stroke.into(),
                    stroke_width: style.slice_stroke_width,
                });
            }
            push_dots(elements, dots, baseline, fill, stroke, style);
        }
        PanelMarks::Dots { dots, .. } => {
            push_dots(elements, dots, baseline, fill, stroke, style);
        }
    }
}

fn push_dots(
    elements: &mut Vec<SvgElement>,
    dots: &[crate::scene::Dot],
    baseline: f64,
    fill: &str,
    stroke: &str,
    style: &StyleConfig,
) {
    for dot in dots {
        // Darkened borders make croissant dots stand out on same-color
        // slices; plain dot plots separate stacked dots with a light seam.
        let border = if dot.darkened_border {
            stroke
        } else {
            &style.background
        };
        elements.push(SvgElement::Circle {
            cx: dot.center_x_px,
            cy: baseline - dot.center_y_px,
            r: dot.radius_px,
            class: "dot",
            fill: fill.into(),
            stroke: border.into(),
            stroke_width: style.dot_stroke_width,
        });
    }
}

/// Serializes a scene with a fixed paint order: background, then for each
/// panel (top first) its axis line and marks, then the threshold rule, its
/// tick label, and — when the chart shows dots — a one-line caption stating
/// the probability each dot stands for.
pub fn render(scene: &Scene, style: &StyleConfig) -> SvgDocument {
    let mut elements = Vec::new();
    elements.push(SvgElement::Rect {
        x: 0.0,
        y: 0.0,
        width: scene.width_px,
        height: scene.height_px,
        class: "background",
        fill: style.background.clone(),
    });

    let axis_left = scene.x_to_px.to_px(scene.x_domain.0);
    let axis_right = scene.x_to_px.to_px(scene.x_domain.1);
    for (idx, panel) in scene.panels.iter().enumerate() {
        elements.push(SvgElement::Line {
            x1: axis_left,
            y1: panel.baseline_y_px,
            x2: axis_right,
            y2: panel.baseline_y_px,
            class: "axis",
            stroke: style.axis_color.clone(),
            stroke_width: style.axis_width,
        });
        render_panel(&mut elements, panel, idx, style);
    }

    let chart_top = scene.panels[0].baseline_y_px - scene.panel_height_px;
    let chart_bottom = scene.panels[1].baseline_y_px;
    elements.push(SvgElement::Line {
        x1: scene.threshold_px,
        y1: chart_top,
        x2: scene.threshold_px,
        y2: chart_bottom,
        class: "threshold",
        stroke: style.threshold_color.clone(),
        stroke_width: style.threshold_width,
    });
    elements.push(SvgElement::Text {
        x: scene.threshold_px,
        y: chart_bottom + 16.0,
        content: format!("{}", scene.threshold),
        class: "tick-label",
        fill: style.text_color.clone(),
        font_family: style.font_family.clone(),
        font_size: style.tick_font_size,
        anchor: "middle",
    });

    if let Some(dots) = scene.panels[0].dots() {
        if !dots.is_empty() {
            elements.push(SvgElement::Text {
                x: scene.width_px / 2.0,
                y: chart_bottom + 40.0,
                content: format!("each • marks 1/{} of the probability", dots.len()),
                class: "caption",
                fill: style.text_color.clone(),
                font_family: style.font_family.clone(),
                font_size: style.caption_font_size,
                anchor: "middle",
            });
        }
    }

    SvgDocument {
        width: scene.width_px,
        height: scene.height_px,
        elements,
    }
}

/// Writes a document to disk. With `overwrite` unset an existing file is
/// left untouched and reported as an error.
pub fn write_svg(doc: &SvgDocument, path: &Path, overwrite: bool) -> Result<()> {
    if !overwrite && path.exists() {
        return Err(Error::WouldOverwrite(path.to_path_buf()));
    }
    std::fs::write(path, doc.to_xml()).map_err(|e| Error::io("writing svg", path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{build_scene, LayoutConfig, Position, Scaling, StimulusSpec, VisKind};

    fn demo_scene(vis: VisKind, quantiles: Option<u32>) -> Scene {
        build_scene(
            &StimulusSpec {
                vis,
                quantiles,
                scaling: Scaling::EqualArea,
                sigma_narrow: 2.0,
                sigma_wide: 5.0,
                position: Position::NarrowOnTop,
                mu: 50.0,
                threshold: 54.0,
            },
            &LayoutConfig::default(),
        )
        .unwrap()
    }

    fn count(xml: &str, needle: &str) -> usize {
        xml.matches(needle).count()
    }

    #[test]
    fn croissant_scene_has_the_expected_element_census() {
        let doc = render(&demo_scene(VisKind::Croissant, Some(10)), &StyleConfig::default());
        let xml = doc.to_xml();
        assert_eq!(count(&xml, "class=\"slice\""), 20);
        assert_eq!(count(&xml, "<circle"), 20);
        assert_eq!(count(&xml, "class=\"threshold\""), 1);
        assert_eq!(count(&xml, "class=\"axis\""), 2);
        assert_eq!(count(&xml, "class=\"background\""), 1);
        assert_eq!(count(&xml, "class=\"tick-label\""), 1);
        assert_eq!(count(&xml, "class=\"caption\""), 1);
        assert!(xml.contains("each • marks 1/10 of the probability"));
    }

    #[test]
    fn pdf_scene_paints_two_curves_and_no_dots() {
        let doc = render(&demo_scene(VisKind::Pdf, None), &StyleConfig::default());
        let xml = doc.to_xml();
        assert_eq!(count(&xml, "class=\"curve\""), 2);
        assert_eq!(count(&xml, "<circle"), 0);
        assert_eq!(count(&xml, "class=\"caption\""), 0);
    }

    #[test]
    fn rendering_twice_gives_identical_bytes() {
        let scene = demo_scene(VisKind::Qdp, Some(20));
        let style = StyleConfig::default();
        assert_eq!(render(&scene, &style).to_xml(), render(&scene, &style).to_xml());
    }

    #[test]
    fn every_coordinate_uses_exactly_three_decimals() {
        let doc = render(&demo_scene(VisKind::Croissant, Some(20)), &StyleConfig::default());
        let xml = doc.to_xml();
        // Skip the prolog and root tag: "1.0"/"1.1" version strings are not
        // coordinates.
        let first = xml.find('>').unwrap();
        let body_start = first + 1 + xml[first + 1..].find('>').unwrap() + 1;
        let xml = &xml[body_start..];
        let bytes = xml.as_bytes();
        for (i, &b) in bytes.iter().enumerate() {
            if b != b'.' || i == 0 || !bytes[i - 1].is_ascii_digit() {
                continue;
            }
            let decimals = bytes[i + 1..].iter().take_while(|c| c.is_ascii_digit()).count();
            assert_eq!(decimals, 3, "bad float near byte {i}: {}", &xml[i.saturating_sub(12)..i + 6]);
        }
    }

    #[test]
    fn text_content_is_escaped() {
        let doc = SvgDocument {
            width: 10.0,
            height: 10.0,
            elements: vec![SvgElement::Text {
                x: 1.0,
                y: 1.0,
                content: "a < b & \"c\"".into(),
                class: "caption",
                fill: "#000".into(),
                font_family: "sans-serif".into(),
                font_size: 10.0,
                anchor: "start",
            }],
        };
        let xml = doc.to_xml();
        assert!(xml.contains("a &lt; b &amp; &quot;c&quot;"));
        assert!(!xml.contains("a < b"));
    }
}
