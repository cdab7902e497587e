//! Cross-checks the distribution numerics against slow reference oracles
//! (Simpson integration and bisection in tests/common) and pins down the
//! round-trip, symmetry, and equal-mass guarantees the chart geometry
//! depends on.

mod common;

use common::{cdf_oracle, quantile_oracle};
use croissant::dist::{ground_truth, Answer, ComparisonTask, Normal};
use proptest::prelude::*;

const SIGMAS: [f64; 5] = [2.0, 3.0, 4.0, 4.5, 5.0];

fn n(mu: f64, sigma: f64) -> Normal {
    Normal::new(mu, sigma).unwrap()
}

#[test]
fn cdf_agrees_with_integration_oracle() {
    let d = n(0.0, 1.0);
    let mut worst = 0.0_f64;
    for i in -800..=800 {
        let z = i as f64 * 0.01;
        worst = worst.max((d.cdf(z) - cdf_oracle(z)).abs());
    }
    assert!(worst < 1e-13, "worst absolute cdf error {worst:e}");
}

#[test]
fn inverse_cdf_agrees_with_bisection_oracle() {
    let d = n(0.0, 1.0);
    for i in 1..200 {
        let p = i as f64 / 200.0;
        let got = d.inverse_cdf(p).unwrap();
        let want = quantile_oracle(p);
        assert!((got - want).abs() < 1e-11, "p = {p}: {got} vs {want}");
    }
}

#[test]
fn frozen_reference_values_match_both_oracle_and_implementation() {
    // Expected values computed twice: with 40-digit arithmetic offline, and
    // with the integration/bisection oracle here at test time.
    let cases = [
        (0.8, 0.7881446014166034),
        (2.0, 0.9772498680518208),
        (4.0 / 4.5, 0.8129686012545587),
        (4.0 / 3.0, 0.9087887802741321),
        (1.0, 0.8413447460685429),
        (-3.5, 0.00023262907903552504),
    ];
    let d = n(0.0, 1.0);
    for (z, frozen) in cases {
        assert!((cdf_oracle(z) - frozen).abs() < 5e-14, "oracle at {z}");
        assert!((d.cdf(z) - frozen).abs() < 1e-13, "impl at {z}");
    }

    let quantiles = [
        (0.9, 1.2815515655446004),
        (0.025, -1.9599639845400543),
        (0.975, 1.9599639845400543),
        (0.475, -0.06270677794321379),
        (0.7, 0.5244005127080408),
        (0.8, 0.8416212335729142),
        (0.95, 1.6448536269514726),
    ];
    for (p, frozen) in quantiles {
        assert!(
            (quantile_oracle(p) - frozen).abs() < 1e-12,
            "quantile oracle at {p}"
        );
        assert!(
            (d.inverse_cdf(p).unwrap() - frozen).abs() < 1e-12,
            "impl quantile at {p}"
        );
    }
}

#[test]
fn round_trip_holds_across_the_working_probability_range() {
    // 1000 evenly spaced p in (0.001, 0.999) for each sigma in play.
    for sigma in SIGMAS {
        let d = n(50.0, sigma);
        for i in 0..1000 {
            let p = 0.001 + 0.998 * (i as f64 + 0.5) / 1000.0;
            let x = d.inverse_cdf(p).unwrap();
            let back = d.cdf(x);
            assert!(
                (back - p).abs() <= 1e-9,
                "sigma {sigma}, p {p}: came back as {back}"
            );
        }
    }
}

#[test]
fn quantile_slices_hold_equal_mass() {
    for sigma in SIGMAS {
        let d = n(50.0, sigma);
        for count in [5_u32, 10, 20] {
            let b = d.quantile_boundaries(count).unwrap();
            let share = 1.0 / f64::from(count);
            // Open tails.
            assert!((d.cdf(b[0]) - share).abs() <= 1e-9);
            assert!((1.0 - d.cdf(b[b.len() - 1]) - share).abs() <= 1e-9);
            // Interior slices.
            for w in b.windows(2) {
                let mass = d.cdf(w[1]) - d.cdf(w[0]);
                assert!(
                    (mass - share).abs() <= 1e-9,
                    "sigma {sigma}, n {count}: slice mass {mass}"
                );
            }
        }
    }
}

#[test]
fn dots_sit_inside_their_slices() {
    for sigma in SIGMAS {
        let d = n(50.0, sigma);
        let b = d.quantile_boundaries(20).unwrap();
        let q = d.quantile_dots(20).unwrap();
        for (k, dot) in q.iter().enumerate() {
            if k > 0 {
                assert!(b[k - 1] < *dot);
            }
            if k < b.len() {
                assert!(*dot < b[k]);
            }
        }
    }
}

proptest! {
    /// With a shared mean and a threshold above it, the tighter distribution
    /// always holds more mass at or below the threshold.
    #[test]
    fn tighter_distribution_always_wins_above_the_mean(
        mu in -100.0..100.0_f64,
        sigma_a in 0.1..20.0_f64,
        ratio in 1.01..10.0_f64,
        offset in 0.01..30.0_f64,
    ) {
        let tight = n(mu, sigma_a);
        let wide = n(mu, sigma_a * ratio);
        let threshold = mu + offset;

        let task = ComparisonTask::new(tight, wide, threshold).unwrap();
        let truth = ground_truth(&task);
        // A genuine tie can only appear far in the tails where both
        // probabilities saturate; otherwise the top (tighter) panel wins.
        if truth.answer != Answer::Neither {
            prop_assert_eq!(truth.answer, Answer::TopDistribution);
        }
        prop_assert!(truth.p_top >= truth.p_bottom);

        let flipped = ComparisonTask::new(wide, tight, threshold).unwrap();
        let flipped_truth = ground_truth(&flipped);
        if flipped_truth.answer != Answer::Neither {
            prop_assert_eq!(flipped_truth.answer, Answer::BottomDistribution);
        }
    }

    /// cdf is monotone non-decreasing and stays inside [0, 1].
    #[test]
    fn cdf_is_monotone_and_bounded(
        mu in -50.0..50.0_f64,
        sigma in 0.1..10.0_f64,
        x in -500.0..500.0_f64,
        dx in 0.0..100.0_f64,
    ) {
        let d = n(mu, sigma);
        let lo = d.cdf(x);
        let hi = d.cdf(x + dx);
        prop_assert!((0.0..=1.0).contains(&lo));
        prop_assert!((0.0..=1.0).contains(&hi));
        prop_assert!(lo <= hi);
    }

    /// cdf(mu − t) + cdf(mu + t) = 1 to near machine precision.
    #[test]
    fn cdf_mirror_symmetry(
        mu in -50.0..50.0_f64,
        sigma in 0.1..10.0_f64,
        t in 0.0..40.0_f64,
    ) {
        let d = n(mu, sigma);
        let total = d.cdf(mu - t * sigma) + d.cdf(mu + t * sigma);
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    /// inverse_cdf is monotone in p.
    #[test]
    fn inverse_cdf_is_monotone(
        sigma in 0.1..10.0_f64,
        p in 0.0001..0.9998_f64,
        dp in 1e-6..0.0001_f64,
    ) {
        let d = n(0.0, sigma);
        let a = d.inverse_cdf(p).unwrap();
        let b = d.inverse_cdf(p + dp).unwrap();
        prop_assert!(a < b, "{a} !< {b}");
    }
}
