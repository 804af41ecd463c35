//! Discretization substrate: uniform periodic grid on `[-T, T)`, forward and
//! inverse discrete Fourier transforms, multiplier application,
//! differentiation, and time-domain convolution.
//!
//! Conventions (fixed once for the whole toolkit):
//!
//! * forward transform `F f(tau) = Int f(t) exp(-i tau t) dt`,
//! * inverse transform `F^-1 g(t) = (1/2pi) Int g(tau) exp(i tau t) dtau`.
//!
//! On the grid `t_j = -T + j h` with `h = 2T/N` the forward transform is the
//! Riemann sum `h * sum_j f(t_j) exp(-i tau_k t_j)` at the frequency nodes
//! `tau_k = pi k / T`, `k = -N/2 .. N/2 - 1`. With these scalings
//! `fft . ifft` and `ifft . fft` are identities to machine precision, and the
//! discrete convolution theorem holds exactly at the nodes.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::symbols::FrequencySymbol;

/// Uniform periodic grid on `[-T, T)` with `N` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    half_length: f64,
    num_points: usize,
}

impl Grid {
    /// `half_length` is `T`, `num_points` is `N`; requires `N` even, `N >= 16`.
    pub fn new(half_length: f64, num_points: usize) -> Result<Self> {
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "grid half-length must be positive and finite, got {half_length}"
            )));
        }
        if num_points < 16 || !num_points.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "grid size must be an even integer >= 16, got {num_points}"
            )));
        }
        Ok(Self { half_length, num_points })
    }

    /// Default desk-scale grid: `T = 64`, `N = 4096`.
    pub fn default_grid() -> Self {
        Self { half_length: 64.0, num_points: 4096 }
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn len(&self) -> usize {
        self.num_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Sample spacing `h = 2T/N`.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_length / self.num_points as f64
    }

    /// Time node `t_j = -T + j h`.
    pub fn time(&self, j: usize) -> f64 {
        -self.half_length + j as f64 * self.spacing()
    }

    /// Frequency node at storage row `r`, i.e. `tau = pi (r - N/2) / T`.
    /// Rows run in ascending frequency order.
    pub fn freq(&self, row: usize) -> f64 {
        let k = row as i64 - (self.num_points / 2) as i64;
        std::f64::consts::PI * k as f64 / self.half_length
    }

    /// Smallest positive frequency node `pi / T`.
    pub fn first_positive_freq(&self) -> f64 {
        std::f64::consts::PI / self.half_length
    }

    /// Largest resolvable frequency magnitude `pi / h`.
    pub fn nyquist(&self) -> f64 {
        std::f64::consts::PI / self.spacing()
    }

    /// Storage row of the zero frequency node.
    pub fn zero_row(&self) -> usize {
        self.num_points / 2
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.num_points).map(move |j| self.time(j))
    }

    pub fn freqs(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.num_points).map(move |r| self.freq(r))
    }
}

fn check_same_grid(a: Grid, b: Grid, what: &str) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::GridMismatch(format!(
            "{what}: (T = {}, N = {}) vs (T = {}, N = {})",
            a.half_length, a.num_points, b.half_length, b.num_points
        )))
    }
}

/// Vector-valued sampled function on a grid; samples are `N x n`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    samples: Array2<Complex64>,
}

impl GridFunction {
    pub fn new(grid: Grid, samples: Array2<Complex64>) -> Result<Self> {
        if samples.nrows() != grid.len() || samples.ncols() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "samples must be N x n with N = {} and n >= 1, got {} x {}",
                grid.len(),
                samples.nrows(),
                samples.ncols()
            )));
        }
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("samples contain non-finite entries".into()));
        }
        Ok(Self { grid, samples })
    }

    pub fn zeros(grid: Grid, dim: usize) -> Self {
        Self { grid, samples: Array2::zeros((grid.len(), dim.max(1))) }
    }

    pub fn from_scalar_fn(grid: Grid, mut f: impl FnMut(f64) -> Complex64) -> Self {
        let mut samples = Array2::zeros((grid.len(), 1));
        for j in 0..grid.len() {
            samples[(j, 0)] = f(grid.time(j));
        }
        Self { grid, samples }
    }

    pub fn from_fn(grid: Grid, dim: usize, mut f: impl FnMut(f64, usize) -> Complex64) -> Self {
        let mut samples = Array2::zeros((grid.len(), dim));
        for j in 0..grid.len() {
            let t = grid.time(j);
            for c in 0..dim {
                samples[(j, c)] = f(t, c);
            }
        }
        Self { grid, samples }
    }

    /// Pure mode `exp(i omega t) v` with `omega = pi k / T` for the signed
    /// node index `k`; exactly representable on the grid.
    pub fn mode(grid: Grid, node_index: i64, direction: &[Complex64]) -> Self {
        let omega = std::f64::consts::PI * node_index as f64 / grid.half_length();
        let dim = direction.len().max(1);
        let mut samples = Array2::zeros((grid.len(), dim));
        for j in 0..grid.len() {
            let phase = Complex64::from_polar(1.0, omega * grid.time(j));
            for (c, v) in direction.iter().enumerate() {
                samples[(j, c)] = phase * v;
            }
        }
        Self { grid, samples }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn dim(&self) -> usize {
        self.samples.ncols()
    }

    pub fn samples(&self) -> &Array2<Complex64> {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut Array2<Complex64> {
        &mut self.samples
    }

    /// Euclidean magnitude `|f(t_j)|_X` per node.
    pub fn magnitudes(&self) -> Vec<f64> {
        (0..self.grid.len())
            .map(|j| self.samples.row(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.magnitudes().into_iter().fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.samples.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self { grid: self.grid, samples: self.samples.mapv(|z| z * c) }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_same_grid(self.grid, other.grid, "add")?;
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "add: dim {} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(Self { grid: self.grid, samples: &self.samples + &other.samples })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scaled(Complex64::new(-1.0, 0.0)))
    }

    /// Applies a constant matrix to every sample: `g(t) = m f(t)`.
    pub fn matrix_map(&self, m: &CMat) -> Result<Self> {
        if m.ncols() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "matrix_map: matrix is {}x{}, samples have dim {}",
                m.nrows(),
                m.ncols(),
                self.dim()
            )));
        }
        let mut samples = Array2::zeros((self.grid.len(), m.nrows()));
        for j in 0..self.grid.len() {
            for r in 0..m.nrows() {
                let mut acc = Complex64::default();
                for c in 0..m.ncols() {
                    acc += m[(r, c)] * self.samples[(j, c)];
                }
                samples[(j, r)] = acc;
            }
        }
        Ok(Self { grid: self.grid, samples })
    }
}

/// Fourier coefficients of a grid function, stored in ascending frequency
/// order (row `r` holds the node `tau = pi (r - N/2)/T`).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFunction {
    grid: Grid,
    coefficients: Array2<Complex64>,
}

impl SpectralFunction {
    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn dim(&self) -> usize {
        self.coefficients.ncols()
    }

    pub fn coefficients(&self) -> &Array2<Complex64> {
        &self.coefficients
    }

    pub fn coefficients_mut(&mut self) -> &mut Array2<Complex64> {
        &mut self.coefficients
    }

    pub fn zeros(grid: Grid, dim: usize) -> Self {
        Self { grid, coefficients: Array2::zeros((grid.len(), dim.max(1))) }
    }
}

type PlanCache = HashMap<(usize, bool), Arc<dyn Fft<f64>>>;

thread_local! {
    static PLANS: RefCell<PlanCache> = RefCell::new(HashMap::new());
}

fn with_plan(len: usize, forward: bool, buf: &mut [Complex64]) {
    let plan = PLANS.with(|cache| {
        cache
            .borrow_mut()
            .entry((len, forward))
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                if forward {
                    planner.plan_fft_forward(len)
                } else {
                    planner.plan_fft_inverse(len)
                }
            })
            .clone()
    });
    plan.process(buf);
}

/// Forward transform of one time series sampled on `grid`; returns node
/// coefficients in ascending frequency order.
pub(crate) fn fft_series(grid: Grid, series: &[Complex64]) -> Vec<Complex64> {
    let n = grid.len();
    debug_assert_eq!(series.len(), n);
    let mut buf = series.to_vec();
    with_plan(n, true, &mut buf);
    let h = grid.spacing();
    let half = n / 2;
    let mut out = vec![Complex64::default(); n];
    for (r, slot) in out.iter_mut().enumerate() {
        let k = r as i64 - half as i64;
        let m = (r + half) % n;
        let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        *slot = buf[m] * (h * sign);
    }
    out
}

/// Inverse of [`fft_series`]: node coefficients in ascending order back to
/// time samples.
pub(crate) fn ifft_series(grid: Grid, coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = grid.len();
    debug_assert_eq!(coeffs.len(), n);
    let h = grid.spacing();
    let half = n / 2;
    let mut buf = vec![Complex64::default(); n];
    for (r, &c) in coeffs.iter().enumerate() {
        let k = r as i64 - half as i64;
        let m = (r + half) % n;
        let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        buf[m] = c * (sign / h);
    }
    with_plan(n, false, &mut buf);
    let scale = 1.0 / n as f64;
    for z in buf.iter_mut() {
        *z *= scale;
    }
    buf
}

/// Forward transform approximating `F f(tau_k) = Int f exp(-i tau_k t) dt`.
pub fn fft(f: &GridFunction) -> SpectralFunction {
    let grid = f.grid();
    let mut coefficients = Array2::zeros((grid.len(), f.dim()));
    for c in 0..f.dim() {
        let series: Vec<Complex64> = f.samples().column(c).to_vec();
        let transformed = fft_series(grid, &series);
        for (r, z) in transformed.into_iter().enumerate() {
            coefficients[(r, c)] = z;
        }
    }
    SpectralFunction { grid, coefficients }
}

/// Inverse transform; `ifft(fft(f)) = f` to machine precision.
pub fn ifft(g: &SpectralFunction) -> GridFunction {
    let grid = g.grid();
    let mut samples = Array2::zeros((grid.len(), g.dim()));
    for c in 0..g.dim() {
        let series: Vec<Complex64> = g.coefficients().column(c).to_vec();
        let transformed = ifft_series(grid, &series);
        for (j, z) in transformed.into_iter().enumerate() {
            samples[(j, c)] = z;
        }
    }
    GridFunction { grid, samples }
}

/// Applies the Fourier multiplier with symbol `a`: `F^-1 (a(.) F f)`.
///
/// The value at the zero node follows the symbol's domain tag: whole-line
/// symbols are evaluated at 0, punctured-line symbols take the symmetric
/// average of the one-sided values at `+-tau_1/2`.
pub fn apply_multiplier(a: &FrequencySymbol, f: &GridFunction) -> Result<GridFunction> {
    let broadcast = a.rows() == 1 && a.cols() == 1;
    if !broadcast && a.cols() != f.dim() {
        return Err(Error::DimensionMismatch(format!(
            "apply_multiplier: symbol is {}x{}, function has dim {}",
            a.rows(),
            a.cols(),
            f.dim()
        )));
    }
    let grid = f.grid();
    let spectrum = fft(f);
    let out_dim = if broadcast { f.dim() } else { a.rows() };
    let mut coefficients = Array2::zeros((grid.len(), out_dim));
    let half_node = grid.first_positive_freq() / 2.0;
    for r in 0..grid.len() {
        let tau = grid.freq(r);
        let value = a.value_with_zero_convention(tau, half_node)?;
        if broadcast {
            let scale = value[(0, 0)];
            for c in 0..out_dim {
                coefficients[(r, c)] = scale * spectrum.coefficients()[(r, c)];
            }
        } else {
            for row in 0..out_dim {
                let mut acc = Complex64::default();
                for c in 0..a.cols() {
                    acc += value[(row, c)] * spectrum.coefficients()[(r, c)];
                }
                coefficients[(r, row)] = acc;
            }
        }
    }
    Ok(ifft(&SpectralFunction { grid, coefficients }))
}

/// Spectral derivative, the multiplier `i tau`.
pub fn derivative(f: &GridFunction) -> GridFunction {
    let grid = f.grid();
    let mut spectrum = fft(f);
    for r in 0..grid.len() {
        let factor = Complex64::new(0.0, grid.freq(r));
        for c in 0..f.dim() {
            spectrum.coefficients_mut()[(r, c)] *= factor;
        }
    }
    ifft(&spectrum)
}

/// Spectral antiderivative `(i tau)^-1` off the zero node; the zero-node
/// coefficient is dropped, so on mean-zero inputs
/// `derivative(antiderivative(f)) = f`.
pub fn antiderivative(f: &GridFunction) -> GridFunction {
    let grid = f.grid();
    let mut spectrum = fft(f);
    for r in 0..grid.len() {
        let tau = grid.freq(r);
        for c in 0..f.dim() {
            if r == grid.zero_row() {
                spectrum.coefficients_mut()[(r, c)] = Complex64::default();
            } else {
                spectrum.coefficients_mut()[(r, c)] /= Complex64::new(0.0, tau);
            }
        }
    }
    ifft(&spectrum)
}

/// Matrix-valued sampled function (used for convolution kernels).
#[derive(Debug, Clone)]
pub struct MatrixGridFunction {
    grid: Grid,
    rows: usize,
    cols: usize,
    /// One `rows x cols` matrix per time node.
    samples: Vec<CMat>,
}

impl MatrixGridFunction {
    pub fn new(grid: Grid, samples: Vec<CMat>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::DimensionMismatch(format!(
                "kernel must carry one matrix per node: {} vs {}",
                samples.len(),
                grid.len()
            )));
        }
        let rows = samples[0].nrows();
        let cols = samples[0].ncols();
        if samples.iter().any(|m| m.nrows() != rows || m.ncols() != cols) {
            return Err(Error::DimensionMismatch("kernel samples have mixed shapes".into()));
        }
        Ok(Self { grid, rows, cols, samples })
    }

    pub fn from_scalar(f: &GridFunction) -> Result<Self> {
        if f.dim() != 1 {
            return Err(Error::DimensionMismatch(
                "scalar kernel requires a scalar grid function".into(),
            ));
        }
        let samples = (0..f.grid().len())
            .map(|j| {
                let mut m = Array2::zeros((1, 1));
                m[(0, 0)] = f.samples()[(j, 0)];
                m
            })
            .collect();
        Ok(Self { grid: f.grid(), rows: 1, cols: 1, samples })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn sample(&self, j: usize) -> &CMat {
        &self.samples[j]
    }

    /// Largest operator norm over the nodes (Frobenius upper bound).
    pub fn max_norm(&self) -> f64 {
        self.samples.iter().map(crate::linalg::fro_norm).fold(0.0, f64::max)
    }
}

/// Discrete Riemann-sum convolution `h * sum_r k(t_r) f(t - t_r)`, circularly
/// wrapped so that it matches the spectral multiplier path exactly at the
/// nodes (`convolve_kernel(F^-1 a, f) = apply_multiplier(a, f)`).
pub fn convolve_kernel(k: &MatrixGridFunction, f: &GridFunction) -> Result<GridFunction> {
    check_same_grid(k.grid(), f.grid(), "convolve_kernel")?;
    let broadcast = k.rows() == 1 && k.cols() == 1;
    if !broadcast && k.cols() != f.dim() {
        return Err(Error::DimensionMismatch(format!(
            "convolve_kernel: kernel is {}x{}, function has dim {}",
            k.rows(),
            k.cols(),
            f.dim()
        )));
    }
    let grid = f.grid();
    let n = grid.len();
    let spectrum = fft(f);
    // Transform each kernel entry along time.
    let mut kernel_hat: Vec<Vec<Complex64>> = Vec::with_capacity(k.rows() * k.cols());
    for i in 0..k.rows() {
        for j in 0..k.cols() {
            let series: Vec<Complex64> = (0..n).map(|t| k.sample(t)[(i, j)]).collect();
            kernel_hat.push(fft_series(grid, &series));
        }
    }
    let out_dim = if broadcast { f.dim() } else { k.rows() };
    let mut coefficients = Array2::zeros((n, out_dim));
    for r in 0..n {
        if broadcast {
            let scale = kernel_hat[0][r];
            for c in 0..out_dim {
                coefficients[(r, c)] = scale * spectrum.coefficients()[(r, c)];
            }
        } else {
            for row in 0..out_dim {
                let mut acc = Complex64::default();
                for c in 0..k.cols() {
                    acc += kernel_hat[row * k.cols() + c][r] * spectrum.coefficients()[(r, c)];
                }
                coefficients[(r, row)] = acc;
            }
        }
    }
    Ok(ifft(&SpectralFunction { grid, coefficients }))
}

/// Discrete `L^2` norm `(h sum_j |f(t_j)|_X^2)^(1/2)`.
pub fn l2_norm(f: &GridFunction) -> f64 {
    let h = f.grid().spacing();
    (h * f.samples().iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
}
