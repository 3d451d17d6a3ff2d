use kaclab::grid::{evolve_master, evolve_master_observed, read_grid, relative_entropy, write_grid, Axis, Grid2D, QuadratureConfig};
use kaclab::model::maxwellian_density as g;
use kaclab::ModelParams;

fn shifted(axis: Axis) -> Grid2D {
    Grid2D::from_fn(axis, |v| g(1.0, v[0] + 0.7) * g(0.5, v[1] - 0.3)).normalized().unwrap()
}

#[test]
fn master_evolution_relaxes_towards_equilibrium() {
    let axis = Axis::new(8.0, 129).unwrap();
    let p = ModelParams::unit(2, 1, 1.0, 1.0).unwrap();
    let f0 = shifted(axis);
    let mut masses = Vec::new();
    let mut entropies = Vec::new();
    let f = evolve_master_observed(&f0, &p, 3.0, 0.03, &QuadratureConfig::default(), |_, f| {
        masses.push(f.mass());
        entropies.push(relative_entropy(&f.normalized().unwrap(), 1.0).unwrap());
    })
    .unwrap();
    assert!(masses.iter().all(|m| (m - 1.0).abs() < 1e-4));
    assert!(entropies.windows(2).all(|w| w[1] <= w[0] + 1e-9));
    let gamma = Grid2D::maxwellian(axis, 1.0);
    assert!(f.l1_distance(&gamma) < f0.l1_distance(&gamma) / 3.0);
}

#[test]
fn evolution_is_a_semigroup() {
    let axis = Axis::new(8.0, 65).unwrap();
    let p = ModelParams::unit(2, 1, 1.0, 0.5).unwrap();
    let q = QuadratureConfig::default();
    let f0 = shifted(axis);
    let once = evolve_master(&f0, &p, 1.0, 0.02, &q).unwrap();
    let half = evolve_master(&f0, &p, 0.5, 0.02, &q).unwrap();
    let twice = evolve_master(&half, &p, 0.5, 0.02, &q).unwrap();
    assert!(once.max_abs_diff(&twice) < 1e-12);
}

#[test]
fn snapshot_round_trip_preserves_an_evolved_state() {
    let axis = Axis::new(6.0, 33).unwrap();
    let p = ModelParams::unit(2, 1, 1.0, 1.0).unwrap();
    let f = evolve_master(&shifted(axis), &p, 0.2, 0.02, &QuadratureConfig::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("state.bin");
    let header = write_grid(&f, &path).unwrap();
    assert_eq!(header.points_per_axis, 33);
    assert_eq!(read_grid::<2>(&path).unwrap(), f);
    assert!(path.with_extension("json").exists());
}
