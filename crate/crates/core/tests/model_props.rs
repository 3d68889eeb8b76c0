mod common;

use common::{params_with_singularity, rel_err, year_grid};
use hypertrend::{eval_hyperbolic, reciprocal_series, singularity, TimeSeries};
use proptest::prelude::*;

proptest! {
    #[test]
    fn reciprocal_of_eval_is_the_line(p in params_with_singularity(100.0, 3000.0), frac in 0.0f64..0.999) {
        let t = frac * p.singularity();
        let s = eval_hyperbolic(&p, t).unwrap();
        let line = p.a() - p.k() * t;
        prop_assert!(rel_err(1.0 / s, line) < 1e-12);
    }

    #[test]
    fn eval_is_increasing(p in params_with_singularity(100.0, 3000.0), f1 in 0.0f64..0.99, f2 in 0.0f64..0.99) {
        prop_assume!(f1 != f2);
        let (lo, hi) = if f1 < f2 { (f1, f2) } else { (f2, f1) };
        let ts = p.singularity();
        let (s_lo, s_hi) = (eval_hyperbolic(&p, lo * ts).unwrap(), eval_hyperbolic(&p, hi * ts).unwrap());
        prop_assert!(s_lo < s_hi, "{s_lo} !< {s_hi}");
    }

    #[test]
    fn accepted_times_precede_singularity(p in params_with_singularity(100.0, 3000.0), t in -1000.0f64..5000.0) {
        if eval_hyperbolic(&p, t).is_ok() {
            prop_assert!(singularity(&p) > t);
        }
    }

    #[test]
    fn reciprocal_series_keeps_years(years in year_grid(1, 2008, 1, 20), seed in 1.0f64..1e6) {
        let ts = TimeSeries::from_pairs(years.iter().map(|&y| (y, seed + f64::from(y)))).unwrap();
        let r = reciprocal_series(&ts);
        prop_assert_eq!(r.years().collect::<Vec<_>>(), years);
        for (a, b) in ts.values().zip(r.values()) {
            prop_assert_eq!(b, 1.0 / a);
        }
    }
}
