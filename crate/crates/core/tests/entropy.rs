use kaclab::entropy::{lemma_checks, random_mixture_h, verify_entropy_decay, LemmaConfig};
use kaclab::grid::{Axis, Grid2D, Interpolation, QuadratureConfig, TensorGrid};
use kaclab::model::maxwellian_density;
use kaclab::sim::trajectory_rng;
use kaclab::ModelParams;
use rayon::prelude::*;

fn worst_margin<const D: usize>(axis: Axis, seed: u64, trials: u64) -> f64 {
    let cfg = LemmaConfig::default();
    (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = trajectory_rng(seed, k);
            let h: TensorGrid<D> = random_mixture_h(axis, 1.0, &mut rng).unwrap();
            let r = lemma_checks(&h, &cfg).unwrap();
            assert!(r.pass, "trial {k}: {r:?}");
            r.entries.iter().map(|e| e.lhs - e.rhs).fold(f64::NEG_INFINITY, f64::max)
        })
        .reduce(|| f64::NEG_INFINITY, f64::max)
}

#[test]
fn lemma_inequalities_on_random_mixtures() {
    let m2 = worst_margin::<2>(Axis::new(8.0, 257).unwrap(), 7, 100);
    let m3 = worst_margin::<3>(Axis::new(6.0, 49).unwrap(), 8, 100);
    println!("worst lhs - rhs: N=2 {m2:e}, N=3 {m3:e}");
}

#[test]
fn decay_bound_holds_on_grid() {
    let p = ModelParams::unit(2, 1, 1.0, 1.0).unwrap();
    let axis = Axis::new(8.0, 257).unwrap();
    let times = [0.5, 1.0, 2.0, 4.0];
    let dt = 0.1 / 3.0;
    let uniform = Grid2D::from_fn(axis, |v| if v[0].abs() <= 2.0 && v[1].abs() <= 2.0 { 1.0 } else { 0.0 }).normalized().unwrap();
    let q = QuadratureConfig::default().with_interp(Interpolation::Bilinear);
    let r = verify_entropy_decay(&uniform, &p, &times, dt, &q, 1e-4).unwrap();
    println!("{r:?}");
    assert!(r.pass);
    let hot = Grid2D::from_fn(axis, |v| maxwellian_density(1.0 / 1.5, v[0]) * maxwellian_density(1.0 / 1.5, v[1])).normalized().unwrap();
    let r = verify_entropy_decay(&hot, &p, &times, dt, &QuadratureConfig::default(), 1e-4).unwrap();
    println!("{r:?}");
    assert!(r.pass);
    assert!(r.rows.iter().all(|row| row.bound - row.entropy > 1e-3));
}
