use kaclab::spectral::{check_gap_bounds, galerkin_gap};
use kaclab::ModelParams;

#[test]
fn gaps_respect_bounds_for_small_systems() {
    for n in 3..=6 {
        for m in 1..n {
            let p = ModelParams::unit(n, m, 1.0, 1.0).unwrap();
            let g = galerkin_gap(&p, 10).unwrap();
            let r = check_gap_bounds(&p, g.gap).unwrap();
            println!("N={n} m={m} gap={:.12} lower={:.12} upper={:.12} deg={}", g.gap, r.lower, r.upper, g.minimizer_degree);
            assert!(r.pass, "N={n} m={m}: {r:?}");
            assert!(r.upper_ok, "N={n} m={m}: {r:?}");
        }
    }
}

#[test]
fn gap_non_decreasing_in_thermostat_count() {
    for n in 3..=5 {
        let gaps: Vec<f64> = (1..n).map(|m| galerkin_gap(&ModelParams::unit(n, m, 1.0, 1.0).unwrap(), 8).unwrap().gap).collect();
        println!("N={n}: {gaps:?}");
        assert!(gaps.windows(2).all(|w| w[1] >= w[0] - 1e-10), "N={n}: {gaps:?}");
    }
}

#[test]
fn positive_for_skewed_rates() {
    for (l, mu) in [(0.1, 5.0), (5.0, 0.1)] {
        let p = ModelParams::unit(4, 1, l, mu).unwrap();
        assert!(galerkin_gap(&p, 6).unwrap().gap > 0.0);
    }
}
