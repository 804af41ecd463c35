//! Dyadic resolution of the identity, Besov and Triebel-Lizorkin norms over
//! any space descriptor, the lifting multiplier, and reconstruction and
//! equivalent-norm diagnostics.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{self, Grid, GridFunction, SpectralFunction};
use crate::spaces::{self, MaximalConfig, SpaceDescriptor};
use crate::symbols::FrequencySymbol;

/// Smooth even plateau bump: identically 1 on `[-plateau, plateau]`,
/// supported in `[-support, support]`, glued with `exp(-1/x)`.
///
/// The concrete profile is `psi(tau) = theta((support - |tau|)/(support -
/// plateau))` with `theta(x) = e(x)/(e(x) + e(1-x))`, `e(x) = exp(-1/x)` for
/// `x > 0` and `0` otherwise; explicit and reproducible bit for bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpFunction {
    plateau: f64,
    support: f64,
}

impl Default for BumpFunction {
    fn default() -> Self {
        Self { plateau: 1.0, support: 2.0 }
    }
}

fn glue(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// `theta, theta', theta''` of the smoothstep.
fn theta_jet(x: f64) -> [f64; 3] {
    if x <= 0.0 {
        return [0.0, 0.0, 0.0];
    }
    if x >= 1.0 {
        return [1.0, 0.0, 0.0];
    }
    let u = glue(x);
    let v = glue(1.0 - x);
    let du = u / (x * x);
    let dv = -v / ((1.0 - x) * (1.0 - x));
    let ddu = u * (1.0 - 2.0 * x) / x.powi(4);
    let ddv = v * (2.0 * x - 1.0) / (1.0 - x).powi(4);
    let s = u + v;
    let t0 = u / s;
    let t1 = (du * v - u * dv) / (s * s);
    let t2 = ((ddu * v - u * ddv) * s - 2.0 * (du * v - u * dv) * (du + dv)) / (s * s * s);
    [t0, t1, t2]
}

impl BumpFunction {
    /// Requires `1 <= plateau < support <= 2` so the bank invariants hold.
    pub fn new(plateau: f64, support: f64) -> Result<Self> {
        if !(1.0..support).contains(&plateau) || support > 2.0 {
            return Err(Error::InvalidArgument(format!(
                "bump needs 1 <= plateau < support <= 2, got ({plateau}, {support})"
            )));
        }
        Ok(Self { plateau, support })
    }

    pub fn value(&self, tau: f64) -> f64 {
        self.jet(tau)[0]
    }

    /// `[psi, psi', psi'']` at `tau`.
    pub fn jet(&self, tau: f64) -> [f64; 3] {
        let width = self.support - self.plateau;
        let x = (self.support - tau.abs()) / width;
        let [t0, t1, t2] = theta_jet(x);
        let sign = if tau >= 0.0 { -1.0 } else { 1.0 };
        [t0, t1 * sign / width, t2 / (width * width)]
    }

    /// Level-`j` filter value `psi_j(tau)`.
    pub fn filter_value(&self, j: usize, tau: f64) -> f64 {
        if j == 0 {
            self.value(tau)
        } else {
            self.value(tau / 2f64.powi(j as i32)) - self.value(tau / 2f64.powi(j as i32 - 1))
        }
    }
}

/// Largest admissible level: `2^(J+1) <= pi/h`.
pub fn max_level(grid: Grid) -> Result<usize> {
    let nyquist = grid.nyquist();
    if nyquist < 2.0 {
        return Err(Error::InvalidArgument(format!(
            "grid resolves no dyadic band (pi/h = {nyquist})"
        )));
    }
    Ok((nyquist.log2().floor() as usize).saturating_sub(1))
}

/// The filters `psi_0, ..., psi_J` sampled at the frequency nodes.
#[derive(Debug, Clone)]
pub struct DyadicFilterBank {
    grid: Grid,
    bump: BumpFunction,
    /// `filters[j][r]` is `psi_j` at node row `r`.
    filters: Vec<Vec<f64>>,
}

/// Builds the filter bank; the filters are differences of reused plateau
/// evaluations, so the telescoping identity holds to rounding at every node.
pub fn make_filter_bank(grid: Grid, j_max: usize, bump: &BumpFunction) -> Result<DyadicFilterBank> {
    let allowed = max_level(grid)?;
    if j_max > allowed {
        return Err(Error::BandOverflow { requested: j_max, max: allowed });
    }
    let n = grid.len();
    // plateau evaluations v_j(tau) = psi(2^-j tau)
    let mut scaled: Vec<Vec<f64>> = Vec::with_capacity(j_max + 1);
    for j in 0..=j_max {
        let scale = 2f64.powi(j as i32);
        scaled.push((0..n).map(|r| bump.value(grid.freq(r) / scale)).collect());
    }
    let mut filters = Vec::with_capacity(j_max + 1);
    filters.push(scaled[0].clone());
    for j in 1..=j_max {
        filters.push(
            (0..n)
                .map(|r| scaled[j][r] - scaled[j - 1][r])
                .collect(),
        );
    }
    Ok(DyadicFilterBank { grid, bump: *bump, filters })
}

impl DyadicFilterBank {
    /// Bank with the default bump at the largest level the grid resolves.
    pub fn for_grid(grid: Grid) -> Result<Self> {
        make_filter_bank(grid, max_level(grid)?, &BumpFunction::default())
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn bump(&self) -> &BumpFunction {
        &self.bump
    }

    pub fn max_level(&self) -> usize {
        self.filters.len() - 1
    }

    pub fn filter(&self, j: usize) -> Result<&[f64]> {
        self.filters
            .get(j)
            .map(|v| v.as_slice())
            .ok_or(Error::IndexOutOfRange { index: j, max: self.max_level() })
    }
}

/// The dyadic block `psi_j(D) f`.
pub fn dyadic_block(bank: &DyadicFilterBank, j: usize, f: &GridFunction) -> Result<GridFunction> {
    if f.grid() != bank.grid() {
        return Err(Error::GridMismatch("dyadic_block: bank built on another grid".into()));
    }
    let filter = bank.filter(j)?;
    let mut spectrum = grid::fft(f);
    for r in 0..bank.grid().len() {
        let scale = filter[r];
        for c in 0..f.dim() {
            spectrum.coefficients_mut()[(r, c)] *= scale;
        }
    }
    Ok(grid::ifft(&spectrum))
}

/// Smoothness scale parameters: order `s`, summability `q` in `[1, inf]`
/// (`f64::INFINITY` for the sup modification), and the base space.
#[derive(Debug, Clone)]
pub struct SmoothnessParams {
    pub s: f64,
    pub q: f64,
    pub space: SpaceDescriptor,
}

impl SmoothnessParams {
    pub fn new(s: f64, q: f64, space: SpaceDescriptor) -> Result<Self> {
        if !s.is_finite() {
            return Err(Error::InvalidArgument(format!("smoothness order must be finite: {s}")));
        }
        if q.is_nan() || q < 1.0 {
            return Err(Error::InvalidArgument(format!("summability q must satisfy q >= 1: {q}")));
        }
        Ok(Self { s, q, space })
    }
}

/// Besov norm: `l^q` aggregation over `j` of `2^(sj) ||psi_j(D) f||_Phi`,
/// maximum when `q = inf`.
pub fn besov_norm(bank: &DyadicFilterBank, params: &SmoothnessParams, f: &GridFunction) -> Result<f64> {
    let mut terms = Vec::with_capacity(bank.max_level() + 1);
    for j in 0..=bank.max_level() {
        let block = dyadic_block(bank, j, f)?;
        let weight = 2f64.powf(params.s * j as f64);
        terms.push(weight * spaces::norm(&params.space, &block)?);
    }
    Ok(if params.q.is_infinite() {
        terms.into_iter().fold(0.0, f64::max)
    } else {
        terms
            .into_iter()
            .map(|t| t.powf(params.q))
            .sum::<f64>()
            .powf(1.0 / params.q)
    })
}

/// Triebel-Lizorkin norm: pointwise `l^q` aggregation over `j`, then the
/// space norm. Requires `q` strictly between 1 and infinity.
pub fn triebel_lizorkin_norm(
    bank: &DyadicFilterBank,
    params: &SmoothnessParams,
    f: &GridFunction,
) -> Result<f64> {
    if !(params.q > 1.0 && params.q.is_finite()) {
        return Err(Error::InvalidQ(params.q));
    }
    let n = bank.grid().len();
    let mut acc = vec![0.0f64; n];
    for j in 0..=bank.max_level() {
        let block = dyadic_block(bank, j, f)?;
        let weight = 2f64.powf(params.s * j as f64);
        for (a, m) in acc.iter_mut().zip(block.magnitudes()) {
            *a += (weight * m).powf(params.q);
        }
    }
    let mut pointwise = GridFunction::zeros(bank.grid(), 1);
    for (j, a) in acc.into_iter().enumerate() {
        pointwise.samples_mut()[(j, 0)] = Complex64::new(a.powf(1.0 / params.q), 0.0);
    }
    spaces::norm(&params.space, &pointwise)
}

/// The lifting multiplier `(1 + tau^2)^(sigma/2)`; `sigma = 1` lowers the
/// Besov smoothness index by one, `sigma = -1` is its inverse.
pub fn lift(f: &GridFunction, sigma: f64) -> GridFunction {
    let g = f.grid();
    let mut spectrum = grid::fft(f);
    for r in 0..g.len() {
        let tau = g.freq(r);
        let factor = (1.0 + tau * tau).powf(sigma / 2.0);
        for c in 0..f.dim() {
            spectrum.coefficients_mut()[(r, c)] *= factor;
        }
    }
    grid::ifft(&spectrum)
}

/// Two routes to the same smoothness: `lhs = ||f||_{B^{s,q}}` against
/// `rhs = ||f||_{B^{s-1,q}} + ||f'||_{B^{s-1,q}}`.
#[derive(Debug, Clone, Copy)]
pub struct EquivNormReport {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// Set when `lhs = 0` but `rhs != 0`.
    pub degenerate: bool,
}

pub fn equiv_norm_report(
    bank: &DyadicFilterBank,
    params: &SmoothnessParams,
    f: &GridFunction,
) -> Result<EquivNormReport> {
    let lhs = besov_norm(bank, params, f)?;
    let lowered = SmoothnessParams::new(params.s - 1.0, params.q, params.space.clone())?;
    let rhs = besov_norm(bank, &lowered, f)? + besov_norm(bank, &lowered, &grid::derivative(f))?;
    let (ratio, degenerate) = if lhs == 0.0 {
        if rhs == 0.0 {
            (1.0, false)
        } else {
            (f64::INFINITY, true)
        }
    } else {
        (rhs / lhs, false)
    };
    Ok(EquivNormReport { lhs, rhs, ratio, degenerate })
}

/// Smallest constant dominating the block sweep by the maximal function:
/// `max_j |(psi_j a)(D) f(t)| <= c M(|f|_X)(t)` over the grid.
#[derive(Debug, Clone, Copy)]
pub struct DominationReport {
    pub best_constant: f64,
}

pub fn maximal_domination_check(
    a: &FrequencySymbol,
    bank: &DyadicFilterBank,
    f: &GridFunction,
    cfg: &MaximalConfig,
) -> Result<DominationReport> {
    if f.is_zero() {
        return Ok(DominationReport { best_constant: 0.0 });
    }
    let grid_ = bank.grid();
    let nodes = a.node_values(grid_)?;
    let spectrum = grid::fft(f);
    let n = grid_.len();
    let out_dim = if a.rows() == 1 && a.cols() == 1 { f.dim() } else { a.rows() };
    if !(a.rows() == 1 && a.cols() == 1) && a.cols() != f.dim() {
        return Err(Error::DimensionMismatch(
            "maximal_domination_check: symbol and function dims differ".into(),
        ));
    }
    let mut sup_blocks = vec![0.0f64; n];
    for j in 0..=bank.max_level() {
        let filter = bank.filter(j)?;
        let mut coeffs = SpectralFunction::zeros(grid_, out_dim);
        for r in 0..n {
            if a.rows() == 1 && a.cols() == 1 {
                let scale = nodes.values[r][(0, 0)] * filter[r];
                for c in 0..out_dim {
                    coeffs.coefficients_mut()[(r, c)] = scale * spectrum.coefficients()[(r, c)];
                }
            } else {
                for row in 0..out_dim {
                    let mut acc = Complex64::default();
                    for c in 0..a.cols() {
                        acc += nodes.values[r][(row, c)] * spectrum.coefficients()[(r, c)];
                    }
                    coeffs.coefficients_mut()[(r, row)] = acc * filter[r];
                }
            }
        }
        let block = grid::ifft(&coeffs);
        for (s, m) in sup_blocks.iter_mut().zip(block.magnitudes()) {
            *s = s.max(m);
        }
    }
    let mf = spaces::maximal(f, cfg)?;
    let mut best = 0.0f64;
    for (g, m) in sup_blocks.iter().zip(mf.magnitudes()) {
        if m > 0.0 {
            best = best.max(g / m);
        } else if *g > 0.0 {
            best = f64::INFINITY;
        }
    }
    Ok(DominationReport { best_constant: best })
}
