//! Deterministic seeded test banks.
//!
//! Bank elements are reproducible functions of `(seed, element index)` and of
//! absolute frequencies only, so regenerating a bank on a refined grid (same
//! `T`, larger `N`) yields the same functions sampled more finely.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::{self, Grid, GridFunction, SpectralFunction};

fn unit_direction(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Complex64> {
    if dim == 1 {
        return vec![Complex64::new(1.0, 0.0)];
    }
    let mut v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1e-9);
    for z in v.iter_mut() {
        *z /= norm;
    }
    v
}

/// Gaussian bump `exp(-t^2 / (2 sigma^2)) v`.
pub fn gaussian_bump(grid: Grid, sigma: f64, center: f64, direction: &[Complex64]) -> GridFunction {
    GridFunction::from_fn(grid, direction.len().max(1), |t, c| {
        let envelope = (-(t - center) * (t - center) / (2.0 * sigma * sigma)).exp();
        direction.get(c).copied().unwrap_or(Complex64::new(1.0, 0.0)) * envelope
    })
}

/// Noise with spectrum supported on `|tau| <= band`; coefficients are drawn
/// per absolute node index, independent of the grid size.
pub fn band_limited_noise(grid: Grid, dim: usize, seed: u64, band: f64) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k_max = ((band * grid.half_length() / std::f64::consts::PI).floor() as i64)
        .min(grid.len() as i64 / 2 - 1)
        .max(0);
    let mut spec = SpectralFunction::zeros(grid, dim);
    let half = grid.len() as i64 / 2;
    for k in -k_max..=k_max {
        let row = (k + half) as usize;
        for c in 0..dim {
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            spec.coefficients_mut()[(row, c)] = z;
        }
    }
    grid::ifft(&spec)
}

/// The standard solver bank: one pure mode per dyadic band, Gaussian bumps at
/// five widths, and random band-limited noise (spectrum in the inner half of
/// the frequency range) up to `size` elements.
pub fn standard_bank(grid: Grid, dim: usize, seed: u64, size: usize) -> Vec<GridFunction> {
    standard_bank_banded(grid, dim, seed, size, grid.nyquist() / 2.0)
}

/// [`standard_bank`] with an explicit spectral band. Fixing the band makes
/// the bank independent of the grid resolution, which refinement sweeps rely
/// on.
pub fn standard_bank_banded(
    grid: Grid,
    dim: usize,
    seed: u64,
    size: usize,
    band: f64,
) -> Vec<GridFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bank = Vec::with_capacity(size);
    let mut j = 0i32;
    loop {
        let center = if j == 0 { 0.5 } else { 1.5 * 2f64.powi(j) };
        if center > band || bank.len() >= size {
            break;
        }
        let k = ((center * grid.half_length() / std::f64::consts::PI).round() as i64)
            .clamp(1, grid.len() as i64 / 2 - 1);
        let dir = unit_direction(&mut rng, dim);
        bank.push(GridFunction::mode(grid, k, &dir));
        j += 1;
    }
    for sigma in [0.5f64, 1.0, 2.0, 4.0, 8.0] {
        if bank.len() >= size {
            break;
        }
        let sigma = sigma.min(grid.half_length() / 8.0);
        let dir = unit_direction(&mut rng, dim);
        bank.push(gaussian_bump(grid, sigma, 0.0, &dir));
    }
    let mut idx = 0u64;
    while bank.len() < size {
        bank.push(band_limited_noise(grid, dim, seed.wrapping_add(1000 + idx), band));
        idx += 1;
    }
    bank
}

/// Nonnegative scalar pairs `(g, h)` for the weight factory: indicators,
/// Gaussian bumps, and rectified band noise in rotation.
pub fn weight_pair_bank(grid: Grid, count: usize, seed: u64) -> Vec<(GridFunction, GridFunction)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let quarter = grid.half_length() / 4.0;
    let mut draw = |kind: usize, noise_seed: u64| -> GridFunction {
        match kind {
            0 => {
                let from = rng.gen_range(-quarter..quarter);
                let width = rng.gen_range(0.5..4.0);
                GridFunction::from_scalar_fn(grid, move |t| {
                    if t >= from && t <= from + width {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::default()
                    }
                })
            }
            1 => {
                let sigma = rng.gen_range(0.5..4.0);
                let center = rng.gen_range(-quarter..quarter);
                let amp = rng.gen_range(0.5..2.0);
                GridFunction::from_scalar_fn(grid, move |t| {
                    Complex64::new(
                        amp * (-(t - center) * (t - center) / (2.0 * sigma * sigma)).exp(),
                        0.0,
                    )
                })
            }
            _ => {
                let noise = band_limited_noise(grid, 1, noise_seed, grid.nyquist() / 4.0);
                let mags = noise.magnitudes();
                let mut out = GridFunction::zeros(grid, 1);
                for (j, m) in mags.into_iter().enumerate() {
                    out.samples_mut()[(j, 0)] = Complex64::new(m, 0.0);
                }
                out
            }
        }
    };
    (0..count)
        .map(|i| {
            let g = draw(i % 3, seed.wrapping_add(2000 + 2 * i as u64));
            let h = draw((i + 1) % 3, seed.wrapping_add(2001 + 2 * i as u64));
            (g, h)
        })
        .collect()
}
