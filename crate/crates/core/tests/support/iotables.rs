use avalanche_core::IoTable;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random nonnegative matrix rescaled so that its spectral radius, taken from
/// a full eigendecomposition, equals `rho`.
pub fn random_table(k: usize, rho: f64, seed: u64) -> IoTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = DMatrix::from_fn(k, k, |_, _| rng.random::<f64>());
    let radius = a
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let sectors = (0..k).map(|i| format!("S{i:03}")).collect();
    IoTable::new(sectors, a * (rho / radius)).unwrap()
}

/// Partial sum `I + A + ... + A^terms`.
pub fn neumann(a: &DMatrix<f64>, terms: usize) -> DMatrix<f64> {
    let k = a.nrows();
    let mut sum = DMatrix::identity(k, k);
    let mut power = DMatrix::identity(k, k);
    for _ in 0..terms {
        power = &power * a;
        sum += &power;
    }
    sum
}
