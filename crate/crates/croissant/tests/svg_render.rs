//! Rendering contracts: structural XML validity, element censuses per chart
//! kind, determinism, and file-writing behavior.

use croissant::scene::{
    build_scene, LayoutConfig, Panel, PanelMarks, Position, Scaling, Scene, StimulusSpec, VisKind,
    XToPx,
};
use croissant::svg::{render, write_svg, StyleConfig};
use croissant::Error;

mod common;
use common::assert_well_formed_xml;

fn spec(vis: VisKind, quantiles: Option<u32>, scaling: Scaling) -> StimulusSpec {
    StimulusSpec {
        vis,
        quantiles,
        scaling,
        sigma_narrow: 2.0,
        sigma_wide: 5.0,
        position: Position::NarrowOnTop,
        mu: 50.0,
        threshold: 54.0,
    }
}

#[test]
fn every_chart_kind_serializes_to_well_formed_xml() {
    for (vis, q) in [
        (VisKind::Pdf, None),
        (VisKind::Qdp, Some(20)),
        (VisKind::Croissant, Some(10)),
        (VisKind::Croissant, Some(20)),
    ] {
        for scaling in [Scaling::EqualArea, Scaling::EqualHeight] {
            let scene = build_scene(&spec(vis, q, scaling), &LayoutConfig::default()).unwrap();
            let xml = render(&scene, &StyleConfig::default()).to_xml();
            assert_well_formed_xml(&xml);
            assert!(xml.starts_with("<?xml version=\"1.0\" encoding=\"UTF-8\"?>"));
            assert!(xml.contains("xmlns=\"http://www.w3.org/2000/svg\""));
        }
    }
}

#[test]
fn a_scene_with_no_marks_still_renders_axes() {
    // Two flat panels: curve marks with no sample points.
    let map = XToPx {
        px_per_unit: 480.0 / 35.0,
        offset_px: 56.0 - 32.5 * (480.0 / 35.0),
    };
    let flat = |baseline_y_px: f64| Panel {
        dist: croissant::dist::Normal::new(50.0, 5.0).unwrap(),
        baseline_y_px,
        marks: PanelMarks::Curve {
            points: Vec::new(),
            scale_px: 0.0,
        },
    };
    let scene = Scene {
        width_px: 560.0,
        height_px: 536.0,
        panel_width_px: 480.0,
        panel_height_px: 200.0,
        x_domain: (32.5, 67.5),
        x_to_px: map,
        threshold: 54.0,
        threshold_px: map.to_px(54.0),
        panels: [flat(224.0), flat(472.0)],
        curve_samples: 257,
    };
    let xml = render(&scene, &StyleConfig::default()).to_xml();
    assert_well_formed_xml(&xml);
    assert_eq!(xml.matches("class=\"axis\"").count(), 2);
    assert_eq!(xml.matches("<path").count(), 0);
    assert_eq!(xml.matches("<circle").count(), 0);
}

#[test]
fn qdp_censuses_follow_the_quantile_count() {
    for (q, dots_expected) in [(10_u32, 20_usize), (20, 40)] {
        let scene = build_scene(
            &spec(VisKind::Qdp, Some(q), Scaling::EqualArea),
            &LayoutConfig::default(),
        )
        .unwrap();
        let xml = render(&scene, &StyleConfig::default()).to_xml();
        assert_eq!(xml.matches("<circle").count(), dots_expected);
        assert_eq!(xml.matches("class=\"slice\"").count(), 0);
    }
}

#[test]
fn written_file_round_trips_and_respects_overwrite() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("stimulus.svg");
    let scene = build_scene(
        &spec(VisKind::Croissant, Some(10), Scaling::EqualHeight),
        &LayoutConfig::default(),
    )
    .unwrap();
    let doc = render(&scene, &StyleConfig::default());

    write_svg(&doc, &path, false).unwrap();
    let on_disk = std::fs::read_to_string(&path).unwrap();
    assert_eq!(on_disk, doc.to_xml());
    assert_well_formed_xml(&on_disk);

    // A second write without overwrite refuses and leaves the file alone.
    let err = write_svg(&doc, &path, false).unwrap_err();
    assert!(matches!(err, Error::WouldOverwrite(_)), "got {err:?}");
    // With overwrite it succeeds.
    write_svg(&doc, &path, true).unwrap();
}

#[test]
fn style_overrides_show_up_in_the_output() {
    let mut style = StyleConfig::default();
    style.top_fill = "#123456".into();
    style.threshold_color = "#abcdef".into();
    let scene = build_scene(
        &spec(VisKind::Pdf, None, Scaling::EqualArea),
        &LayoutConfig::default(),
    )
    .unwrap();
    let xml = render(&scene, &style).to_xml();
    assert!(xml.contains("#123456"));
    assert!(xml.contains("#abcdef"));
}
