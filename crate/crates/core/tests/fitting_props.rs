mod common;

use common::{brute_force_breakpoint, params_with_singularity, reciprocal_sse, rel_err, year_grid};
use hypertrend::{
    fit_hyperbolic, fit_piecewise, generate_synthetic, Error, FitWindow, HyperbolicParams,
    SyntheticModel, TimeSeries,
};
use proptest::prelude::*;

fn window_of(ts: &TimeSeries) -> FitWindow {
    FitWindow::new(ts.first_year(), ts.last_year()).unwrap()
}

/// Noiseless hyperbola sampled on a grid that stays clear of its singularity.
fn clean_hyperbola() -> impl Strategy<Value = (HyperbolicParams, TimeSeries)> {
    params_with_singularity(1000.0, 3000.0).prop_flat_map(|p| {
        let last = p.singularity().floor() as i32 - 1;
        year_grid(1, last, 3, 25).prop_map(move |years| {
            let ts = generate_synthetic(&SyntheticModel::Hyperbolic { params: p }, &years, 0.0, 0)
                .unwrap();
            (p, ts)
        })
    })
}

fn noisy_hyperbola() -> impl Strategy<Value = TimeSeries> {
    (
        params_with_singularity(1950.0, 2500.0),
        year_grid(1, 1900, 4, 25),
        0.0f64..0.2,
        any::<u64>(),
    )
        .prop_map(|(p, years, noise, seed)| {
            generate_synthetic(
                &SyntheticModel::Hyperbolic { params: p },
                &years,
                noise,
                seed,
            )
            .unwrap()
        })
}

fn scaled(ts: &TimeSeries, c: f64) -> TimeSeries {
    TimeSeries::from_pairs(ts.points().iter().map(|p| (p.year, p.value * c))).unwrap()
}

proptest! {
    #[test]
    fn noiseless_round_trip((p, ts) in clean_hyperbola()) {
        let fit = fit_hyperbolic(&ts, window_of(&ts)).unwrap();
        prop_assert!(rel_err(fit.params.a(), p.a()) < 1e-10, "a {} vs {}", fit.params.a(), p.a());
        prop_assert!(rel_err(fit.params.k(), p.k()) < 1e-10, "k {} vs {}", fit.params.k(), p.k());
    }

    #[test]
    fn scale_covariance(ts in noisy_hyperbola(), c in 1e-3f64..1e3) {
        let w = window_of(&ts);
        let (Ok(base), Ok(fit)) = (fit_hyperbolic(&ts, w), fit_hyperbolic(&scaled(&ts, c), w)) else {
            return Ok(());
        };
        prop_assert!(rel_err(fit.params.a(), base.params.a() / c) < 1e-9);
        prop_assert!(rel_err(fit.params.k(), base.params.k() / c) < 1e-9);
        prop_assert!((fit.params.singularity() - base.params.singularity()).abs() < 1e-6);
    }

    #[test]
    fn time_shift_moves_singularity(ts in noisy_hyperbola(), shift in 0i32..500) {
        let moved = TimeSeries::from_pairs(ts.points().iter().map(|p| (p.year + shift, p.value))).unwrap();
        let (Ok(base), Ok(fit)) = (fit_hyperbolic(&ts, window_of(&ts)), fit_hyperbolic(&moved, window_of(&moved))) else {
            return Ok(());
        };
        let expected = base.params.singularity() + f64::from(shift);
        prop_assert!((fit.params.singularity() - expected).abs() < 1e-6 * expected.abs().max(1.0));
    }

    #[test]
    fn piecewise_never_worse_than_single(ts in noisy_hyperbola()) {
        prop_assume!(ts.len() >= 6);
        let single = reciprocal_sse(&ts);
        match fit_piecewise(&ts, 3) {
            Ok(seg) => {
                prop_assert!(seg.total_sse <= single * (1.0 + 1e-9) + 1e-300);
                prop_assert!((seg.total_sse - seg.first.sse_reciprocal - seg.second.sse_reciprocal).abs() <= 1e-15 * seg.total_sse.max(1e-300));
                prop_assert!(seg.first.window.end < seg.breakpoint && seg.breakpoint == seg.second.window.start);
            }
            Err(e) => prop_assert!(matches!(e, Error::NotHyperbolic { .. }), "{e}"),
        }
    }

    #[test]
    fn breakpoint_matches_brute_force(
        years in year_grid(1, 1900, 6, 12),
        split in 0.2f64..0.8,
        noise in 0.0f64..0.1,
        seed in any::<u64>(),
    ) {
        let bp = years[((years.len() as f64 * split) as usize).clamp(1, years.len() - 1)];
        let model = SyntheticModel::PiecewiseHyperbolic {
            first: HyperbolicParams::new(0.5, 2e-4).unwrap(),
            second: HyperbolicParams::new(1.57, 8.224e-4).unwrap(),
            breakpoint: bp,
        };
        let ts = generate_synthetic(&model, &years, noise, seed).unwrap();
        let (oracle_bp, oracle_sse) = brute_force_breakpoint(&ts, 3);
        match fit_piecewise(&ts, 3) {
            Ok(seg) => {
                prop_assert_eq!(seg.breakpoint, oracle_bp);
                prop_assert!((seg.total_sse - oracle_sse).abs() <= 1e-9 * oracle_sse + 1e-30);
            }
            Err(e) => prop_assert!(matches!(e, Error::NotHyperbolic { .. }), "{e}"),
        }
    }
}

#[test]
fn spliced_series_recovers_both_laws() {
    let first = HyperbolicParams::new(0.5, 2e-4).unwrap();
    let second = HyperbolicParams::new(1.57, 8.224e-4).unwrap();
    let model = SyntheticModel::PiecewiseHyperbolic {
        first,
        second,
        breakpoint: 1820,
    };
    let years = [1, 500, 1000, 1500, 1600, 1700, 1820, 1840, 1860, 1870];
    let ts = generate_synthetic(&model, &years, 0.0, 0).unwrap();
    let seg = fit_piecewise(&ts, 3).unwrap();
    assert_eq!(seg.breakpoint, 1820);
    for (got, want) in [(seg.first.params, first), (seg.second.params, second)] {
        assert!(rel_err(got.a(), want.a()) < 1e-10);
        assert!(rel_err(got.k(), want.k()) < 1e-10);
    }
}
