//! Frozen geometry values for the default layout, computed by hand from the
//! scaling definitions (peak = multiplier * density at the mean; equal-area
//! multiplier = target area / (px-per-unit * mass inside the domain)).

use croissant::scene::{build_scene, LayoutConfig, Position, Scaling, StimulusSpec, VisKind};

fn spec(vis: VisKind, quantiles: Option<u32>, scaling: Scaling, sigmas: (f64, f64)) -> StimulusSpec {
    StimulusSpec {
        vis,
        quantiles,
        scaling,
        sigma_narrow: sigmas.0,
        sigma_wide: sigmas.1,
        position: Position::NarrowOnTop,
        mu: 50.0,
        threshold: 54.0,
    }
}

#[test]
fn equal_area_peaks_match_hand_computed_values() {
    // px per data unit = 480 / 35; multiplier = 12000 / (ppu * mass);
    // peak = multiplier * pdf(mu).
    let scene = build_scene(
        &spec(VisKind::Pdf, None, Scaling::EqualArea, (2.0, 5.0)),
        &LayoutConfig::default(),
    )
    .unwrap();
    let top = scene.panel_peak_px(0);
    let bottom = scene.panel_peak_px(1);
    assert!((top - 174.5372476756268).abs() < 1e-9, "top peak {top}");
    assert!((bottom - 69.8473961411254).abs() < 1e-9, "bottom peak {bottom}");
    // Peaks stay inside the 200px panel.
    assert!(top < scene.panel_height_px);
}

#[test]
fn equal_height_dot_radii_follow_the_tallest_stack() {
    // With the default 24-bin domain the tallest stack for n = 20 is
    // 5, 4, 3, 3, 2 dots for sigma 2, 3, 4, 4.5, 5 -> radii 12, 15, 20, 20, 30.
    let expect = [(2.0, 12.0), (3.0, 15.0), (4.0, 20.0), (4.5, 20.0)];
    for (sigma_narrow, radius) in expect {
        let scene = build_scene(
            &spec(VisKind::Qdp, Some(20), Scaling::EqualHeight, (sigma_narrow, 5.0)),
            &LayoutConfig::default(),
        )
        .unwrap();
        assert_eq!(scene.top().dots().unwrap()[0].radius_px, radius);
        assert_eq!(scene.bottom().dots().unwrap()[0].radius_px, 30.0);
    }
}

#[test]
fn scaling_never_moves_a_dot_horizontally() {
    for (vis, q) in [(VisKind::Qdp, Some(20)), (VisKind::Croissant, Some(10))] {
        for sigmas in [(2.0, 5.0), (3.0, 5.0), (4.0, 5.0), (4.5, 5.0)] {
            let area = build_scene(
                &spec(vis, q, Scaling::EqualArea, sigmas),
                &LayoutConfig::default(),
            )
            .unwrap();
            let height = build_scene(
                &spec(vis, q, Scaling::EqualHeight, sigmas),
                &LayoutConfig::default(),
            )
            .unwrap();
            for idx in 0..2 {
                let a = area.panels[idx].dots().unwrap();
                let h = height.panels[idx].dots().unwrap();
                assert_eq!(a.len(), h.len());
                for (da, dh) in a.iter().zip(h) {
                    assert_eq!(da.center_x_px, dh.center_x_px);
                    assert_eq!(da.data_x, dh.data_x);
                }
            }
        }
    }
}

#[test]
fn custom_layouts_reshape_the_scene() {
    let mut layout = LayoutConfig::default();
    layout.panel_width_px = 240.0;
    layout.target_peak_px = 60.0;
    layout.qdp_bin_width_data = Some(2.0);
    let scene = build_scene(
        &spec(VisKind::Qdp, Some(20), Scaling::EqualHeight, (2.0, 5.0)),
        &layout,
    )
    .unwrap();
    assert_eq!(scene.panel_width_px, 240.0);
    assert!((scene.panel_peak_px(0) - 60.0).abs() < 1e-9);
    // 2-unit bins over a 35-unit domain leave 18 bins; sigma-2 dots pile
    // up more steeply than in the 24-bin default.
    let dots = scene.top().dots().unwrap();
    let spacing = scene.x_to_px.px_per_unit * 2.0;
    for pair in dots.windows(2) {
        let dx = (pair[1].center_x_px - pair[0].center_x_px).abs();
        let steps = dx / spacing;
        assert!((steps - steps.round()).abs() < 1e-9, "off-grid dx {dx}");
    }
}
