mod support;

use avalanche_core::iotable::{leontief_inverse, max_abs, spectral_radius};
use nalgebra::DMatrix;
use support::iotables::{neumann, random_table};

#[test]
fn inverse_matches_neumann_series_at_half_radius() {
    for seed in 0..5 {
        let table = random_table(100, 0.5, seed);
        let a = table.coefficients();
        assert!((spectral_radius(a) - 0.5).abs() < 1e-6);
        let l = leontief_inverse(&table).unwrap();
        let i = DMatrix::<f64>::identity(100, 100);
        let residual = max_abs(&((&i - a) * &l - &i));
        assert!(residual < 1e-8, "residual {residual}");
        let gap = max_abs(&(&l - neumann(a, 40)));
        assert!(gap < 1e-10, "Neumann gap {gap}");
    }
}

#[test]
fn inverse_is_nonnegative_with_unit_diagonal_floor() {
    for seed in 10..15 {
        let table = random_table(30, 0.9, seed);
        let l = leontief_inverse(&table).unwrap();
        assert!(l.iter().all(|&v| v >= 0.0));
        assert!((0..30).all(|i| l[(i, i)] >= 1.0));
    }
}
