//! Banach function space norms, the Hardy-Littlewood maximal operator,
//! Muckenhoupt constants, and the iteration algorithm that manufactures
//! weights from majorants.
//!
//! The maximal operator and the Muckenhoupt constant use the same family of
//! intervals: grid-aligned windows of dyadic sample counts at every offset,
//! wrapped periodically. Sharing one family keeps the factorization bound
//! `[w]_{A_p} <= 2^p kappa^(p-1) kappa'` valid interval by interval, and the
//! wrap makes the maximal operator exactly translation covariant on the grid.
//!
//! Window sums are assembled pairwise (a dyadic pyramid), so their relative
//! rounding error stays near machine precision; the pointwise A1 check runs
//! at a 2^(1-K) tolerance and would drown in naive prefix-sum noise.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};

/// Weights are clamped below at this value to avoid division blowups in
/// `w^(-1/(p-1))`; clamping is recorded in the weight tag.
pub const WEIGHT_FLOOR: f64 = 1e-300;

/// Default truncation depth of the iteration algorithm (tail `<= 2^-40`).
pub const DEFAULT_RUBIO_DEPTH: usize = 40;

/// A positive scalar weight sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Weight {
    grid: Grid,
    values: Vec<f64>,
    tag: String,
}

impl Weight {
    pub fn new(grid: Grid, values: Vec<f64>, tag: impl Into<String>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch(format!(
                "weight carries {} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        let mut tag = tag.into();
        let mut clamped = false;
        let values = values
            .into_iter()
            .map(|v| {
                if !v.is_finite() || v < WEIGHT_FLOOR {
                    clamped = true;
                    WEIGHT_FLOOR
                } else {
                    v
                }
            })
            .collect();
        if clamped {
            tag.push_str(" [clamped]");
        }
        Ok(Self { grid, values, tag })
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        Self::new(grid, vec![value; grid.len()], "constant").unwrap()
    }

    pub fn from_fn(grid: Grid, tag: impl Into<String>, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.times().map(f).collect(), tag)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    /// Pointwise power, re-tagged.
    pub fn powf(&self, e: f64) -> Weight {
        Weight::new(
            self.grid,
            self.values.iter().map(|v| v.powf(e)).collect(),
            format!("({})^{}", self.tag, e),
        )
        .unwrap()
    }

    pub fn as_grid_function(&self) -> GridFunction {
        let mut f = GridFunction::zeros(self.grid, 1);
        for (j, v) in self.values.iter().enumerate() {
            f.samples_mut()[(j, 0)] = Complex64::new(*v, 0.0);
        }
        f
    }
}

/// A Banach function space norm with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum SpaceDescriptor {
    /// `L^p`, `p` strictly between 1 and infinity.
    Lp { p: f64 },
    /// Weighted `L^p_w`.
    WeightedLp { p: f64, weight: Weight },
    /// Weak Lorentz `L^{p,inf}` (quasi-norm, norm-only support).
    LorentzWeak { p: f64 },
}

fn check_p(p: f64) -> Result<()> {
    if p.is_finite() && p > 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "integrability exponent must lie strictly between 1 and infinity, got {p}"
        )))
    }
}

impl SpaceDescriptor {
    pub fn lp(p: f64) -> Result<Self> {
        check_p(p)?;
        Ok(SpaceDescriptor::Lp { p })
    }

    pub fn weighted_lp(p: f64, weight: Weight) -> Result<Self> {
        check_p(p)?;
        Ok(SpaceDescriptor::WeightedLp { p, weight })
    }

    pub fn lorentz_weak(p: f64) -> Result<Self> {
        check_p(p)?;
        Ok(SpaceDescriptor::LorentzWeak { p })
    }

    pub fn exponent(&self) -> f64 {
        match self {
            SpaceDescriptor::Lp { p }
            | SpaceDescriptor::WeightedLp { p, .. }
            | SpaceDescriptor::LorentzWeak { p } => *p,
        }
    }

    pub fn label(&self) -> String {
        match self {
            SpaceDescriptor::Lp { p } => format!("L^{p}"),
            SpaceDescriptor::WeightedLp { p, weight } => {
                format!("L^{p}_w[{}]", weight.tag())
            }
            SpaceDescriptor::LorentzWeak { p } => format!("L^({p},inf)"),
        }
    }

    /// Koethe dual descriptor: `L^p -> L^p'`,
    /// `L^p_w -> L^p'_{w^(-p'/p)}` (Hoelder-compatible pairing).
    pub fn dual(&self) -> Result<SpaceDescriptor> {
        match self {
            SpaceDescriptor::Lp { p } => SpaceDescriptor::lp(p / (p - 1.0)),
            SpaceDescriptor::WeightedLp { p, weight } => {
                let p_dual = p / (p - 1.0);
                SpaceDescriptor::weighted_lp(p_dual, weight.powf(-p_dual / p))
            }
            SpaceDescriptor::LorentzWeak { .. } => Err(Error::NotSupported(
                "Lorentz duals are not constructed".into(),
            )),
        }
    }
}

/// Evaluates the space norm of a grid function.
pub fn norm(space: &SpaceDescriptor, f: &GridFunction) -> Result<f64> {
    let h = f.grid().spacing();
    let mags = f.magnitudes();
    match space {
        SpaceDescriptor::Lp { p } => {
            Ok((h * mags.iter().map(|m| m.powf(*p)).sum::<f64>()).powf(1.0 / p))
        }
        SpaceDescriptor::WeightedLp { p, weight } => {
            if weight.grid() != f.grid() {
                return Err(Error::GridMismatch(
                    "weighted norm: weight and function on different grids".into(),
                ));
            }
            Ok((h * mags
                .iter()
                .zip(weight.values())
                .map(|(m, w)| m.powf(*p) * w)
                .sum::<f64>())
            .powf(1.0 / p))
        }
        SpaceDescriptor::LorentzWeak { p } => {
            // decreasing rearrangement with mass h per sample:
            // sup_s s^(1/p) f*(s) = max_i ((i+1) h)^(1/p) v_i
            let mut sorted = mags;
            sorted.sort_by(|a, b| b.total_cmp(a));
            Ok(sorted
                .iter()
                .enumerate()
                .map(|(i, v)| (((i + 1) as f64) * h).powf(1.0 / p) * v)
                .fold(0.0, f64::max))
        }
    }
}

/// Window placement for the maximal operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaximalFlavor {
    /// All windows of admissible length containing the node.
    Uncentered,
    /// One window per length, centered at the node.
    Centered,
}

/// Configuration of the discrete Hardy-Littlewood operator.
#[derive(Debug, Clone)]
pub struct MaximalConfig {
    pub flavor: MaximalFlavor,
    /// Window lengths in samples; dyadic (powers of two), sorted, `<= N`.
    pub window_lengths: Vec<usize>,
}

impl MaximalConfig {
    /// All dyadic window lengths `2^m <= N` (i.e. physical lengths `h 2^m`).
    pub fn dyadic(grid: Grid) -> Self {
        let mut window_lengths = Vec::new();
        let mut len = 1usize;
        while len <= grid.len() {
            window_lengths.push(len);
            len *= 2;
        }
        Self { flavor: MaximalFlavor::Uncentered, window_lengths }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.window_lengths.is_empty() {
            return Err(Error::InvalidArgument("empty window set".into()));
        }
        let mut prev = 0usize;
        for &len in &self.window_lengths {
            if len == 0 || len > n || !len.is_power_of_two() || len <= prev {
                return Err(Error::InvalidArgument(format!(
                    "window lengths must be sorted dyadic values <= N, got {:?}",
                    self.window_lengths
                )));
            }
            prev = len;
        }
        Ok(())
    }
}

/// Wrapped window sums of every dyadic length up to `max_len`, built as a
/// pairwise pyramid: `sums[m][s]` is the sum of `x[s], ..., x[s + 2^m - 1]`
/// with periodic indices.
struct WindowPyramid {
    sums: Vec<Vec<f64>>,
}

impl WindowPyramid {
    fn build(x: &[f64], max_len: usize) -> Self {
        let n = x.len();
        let mut sums = vec![x.to_vec()];
        let mut len = 1usize;
        while len * 2 <= max_len {
            let prev = sums.last().unwrap();
            let mut cur = vec![0.0; n];
            for s in 0..n {
                cur[s] = prev[s] + prev[(s + len) % n];
            }
            sums.push(cur);
            len *= 2;
        }
        Self { sums }
    }

    fn level(&self, len: usize) -> &[f64] {
        &self.sums[len.trailing_zeros() as usize]
    }
}

/// Sliding maximum of the wrapped array `w` over windows `[j-l+1, j]`.
fn wrapped_sliding_max(w: &[f64], l: usize, out: &mut [f64]) {
    let n = w.len();
    debug_assert_eq!(out.len(), n);
    if l == 1 {
        for (o, v) in out.iter_mut().zip(w) {
            *o = o.max(*v);
        }
        return;
    }
    // classic monotone deque over the doubled index range
    let mut deque: std::collections::VecDeque<usize> = std::collections::VecDeque::new();
    for s in 0..(2 * n) {
        let v = w[s % n];
        while let Some(&back) = deque.back() {
            if w[back % n] <= v {
                deque.pop_back();
            } else {
                break;
            }
        }
        deque.push_back(s);
        if s >= n {
            let j = s - n;
            // keep starts in [s - l + 1, s]
            while let Some(&front) = deque.front() {
                if front + l <= s {
                    deque.pop_front();
                } else {
                    break;
                }
            }
            let best = w[deque.front().unwrap() % n];
            if best > out[j] {
                out[j] = best;
            }
        }
    }
}

fn maximal_values(mags: &[f64], cfg: &MaximalConfig) -> Result<Vec<f64>> {
    let n = mags.len();
    cfg.validate(n)?;
    let max_len = *cfg.window_lengths.last().unwrap();
    let pyramid = WindowPyramid::build(mags, max_len);
    let mut out = vec![0.0f64; n];
    match cfg.flavor {
        MaximalFlavor::Uncentered => {
            let mut averages = vec![0.0f64; n];
            for &l in &cfg.window_lengths {
                let sums = pyramid.level(l);
                let inv = 1.0 / l as f64;
                for (a, s) in averages.iter_mut().zip(sums) {
                    *a = s * inv;
                }
                wrapped_sliding_max(&averages, l, &mut out);
            }
        }
        MaximalFlavor::Centered => {
            for &l in &cfg.window_lengths {
                let sums = pyramid.level(l);
                let inv = 1.0 / l as f64;
                for j in 0..n {
                    let start = (j + n - l / 2) % n;
                    let avg = sums[start] * inv;
                    if avg > out[j] {
                        out[j] = avg;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Discrete Hardy-Littlewood maximal function `Mf(t_j)`: the largest average
/// of `|f|_X` over admissible windows containing `t_j`.
pub fn maximal(f: &GridFunction, cfg: &MaximalConfig) -> Result<GridFunction> {
    let values = maximal_values(&f.magnitudes(), cfg)?;
    let mut out = GridFunction::zeros(f.grid(), 1);
    for (j, v) in values.into_iter().enumerate() {
        out.samples_mut()[(j, 0)] = Complex64::new(v, 0.0);
    }
    Ok(out)
}

/// Safe upper bound `kappa >= ||M||_Phi`.
///
/// `L^p` uses the explicit bound `2p/(p-1)`; weighted spaces use
/// `4 [w]_{A_p}^(1/(p-1)) 2p/(p-1)`. A constant weight (`[w]_{A_p} = 1`,
/// the Jensen equality case) rescales the space, so it keeps the plain
/// `L^p` bound. The operator norm itself is never computed; the algorithm
/// only needs an upper bound, and callers may override it.
pub fn maximal_norm_bound(space: &SpaceDescriptor) -> Result<f64> {
    match space {
        SpaceDescriptor::Lp { p } => Ok(2.0 * p / (p - 1.0)),
        SpaceDescriptor::WeightedLp { p, weight } => {
            let ap = ap_constant(weight, *p);
            if !ap.is_finite() {
                return Err(Error::InvalidArgument(
                    "weighted maximal bound needs a Muckenhoupt weight (A_p constant diverged)"
                        .into(),
                ));
            }
            if ap <= 1.0 + 1e-12 {
                return Ok(2.0 * p / (p - 1.0));
            }
            Ok(4.0 * ap.powf(1.0 / (p - 1.0)) * 2.0 * p / (p - 1.0))
        }
        SpaceDescriptor::LorentzWeak { .. } => Err(Error::NotSupported(
            "no maximal bound for Lorentz descriptors".into(),
        )),
    }
}

/// Truncated iteration `sum_{k=0}^K M^k |g| / (2 kappa)^k`.
///
/// The caller certifies `kappa >= ||M||_Phi`; the truncation tail is then at
/// most `2^-K ||g||_Phi` in the space norm.
pub fn rubio_iterate(
    g: &GridFunction,
    kappa: f64,
    depth: usize,
    cfg: &MaximalConfig,
) -> Result<GridFunction> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "iteration needs kappa > 0, got {kappa}"
        )));
    }
    if depth < 1 {
        return Err(Error::InvalidArgument("iteration depth must be >= 1".into()));
    }
    let mut current = g.magnitudes();
    let mut acc = current.clone();
    let mut factor = 1.0f64;
    for _ in 1..=depth {
        current = maximal_values(&current, cfg)?;
        factor /= 2.0 * kappa;
        for (a, m) in acc.iter_mut().zip(&current) {
            *a += factor * m;
        }
    }
    let mut out = GridFunction::zeros(g.grid(), 1);
    for (j, v) in acc.into_iter().enumerate() {
        out.samples_mut()[(j, 0)] = Complex64::new(v, 0.0);
    }
    Ok(out)
}

/// Result of the weight factory, with the maximal bounds that went in.
#[derive(Debug, Clone)]
pub struct WeightBuild {
    pub weight: Weight,
    pub kappa: f64,
    pub kappa_dual: f64,
    pub depth: usize,
}

/// Builds the Muckenhoupt weight `w = (R g)^(1-p) R' h` with bounds taken
/// from [`maximal_norm_bound`] on the space and its dual.
pub fn build_weight(
    g: &GridFunction,
    h: &GridFunction,
    p: f64,
    space: &SpaceDescriptor,
    depth: usize,
    cfg: &MaximalConfig,
) -> Result<WeightBuild> {
    let kappa = maximal_norm_bound(space)?;
    let kappa_dual = maximal_norm_bound(&space.dual()?)?;
    build_weight_with_bounds(g, h, p, kappa, kappa_dual, depth, cfg)
}

/// Same as [`build_weight`] but with caller-supplied bounds.
pub fn build_weight_with_bounds(
    g: &GridFunction,
    h: &GridFunction,
    p: f64,
    kappa: f64,
    kappa_dual: f64,
    depth: usize,
    cfg: &MaximalConfig,
) -> Result<WeightBuild> {
    check_p(p)?;
    if g.grid() != h.grid() {
        return Err(Error::GridMismatch("weight inputs on different grids".into()));
    }
    if g.is_zero() {
        return Err(Error::ZeroInput("g vanishes identically".into()));
    }
    if h.is_zero() {
        return Err(Error::ZeroInput("h vanishes identically".into()));
    }
    let rg = rubio_iterate(g, kappa, depth, cfg)?;
    let rh = rubio_iterate(h, kappa_dual, depth, cfg)?;
    let values: Vec<f64> = rg
        .magnitudes()
        .iter()
        .zip(rh.magnitudes())
        .map(|(u, v)| u.powf(1.0 - p) * v)
        .collect();
    let weight = Weight::new(g.grid(), values, format!("rubio(p={p})"))?;
    Ok(WeightBuild { weight, kappa, kappa_dual, depth })
}

/// Muckenhoupt constant
/// `sup_I (avg_I w) (avg_I w^(-1/(p-1)))^(p-1)` over the dyadic window
/// family (all offsets, wrapped).
pub fn ap_constant(w: &Weight, p: f64) -> f64 {
    let n = w.grid().len();
    let recip: Vec<f64> = w.values().iter().map(|v| v.powf(-1.0 / (p - 1.0))).collect();
    let pyr_w = WindowPyramid::build(w.values(), n);
    let pyr_r = WindowPyramid::build(&recip, n);
    let mut best = 0.0f64;
    let mut len = 1usize;
    while len <= n {
        let sw = pyr_w.level(len);
        let sr = pyr_r.level(len);
        let inv = 1.0 / len as f64;
        for s in 0..n {
            let value = (sw[s] * inv) * (sr[s] * inv).powf(p - 1.0);
            if value > best {
                best = value;
            }
        }
        len *= 2;
    }
    best
}

/// Outcome of the pointwise A1 inequality check.
#[derive(Debug, Clone, Copy)]
pub struct A1Check {
    pub passes: bool,
    /// Largest `Mv / (2 kappa v)` over the nodes.
    pub max_ratio: f64,
    /// `1 + 2^(1-depth)`, the admissible ratio after truncation.
    pub tolerance: f64,
}

/// Verifies `M v <= 2 kappa v (1 + 2^(1-depth))` node by node for an
/// iteration output `v`.
pub fn pointwise_a1_check(
    v: &GridFunction,
    kappa: f64,
    depth: usize,
    cfg: &MaximalConfig,
) -> Result<A1Check> {
    let mv = maximal(v, cfg)?;
    let vm = v.magnitudes();
    let mvm = mv.magnitudes();
    let mut max_ratio = 0.0f64;
    for (m, v) in mvm.iter().zip(&vm) {
        let ratio = if *v > 0.0 {
            m / (2.0 * kappa * v)
        } else if *m > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        if ratio > max_ratio {
            max_ratio = ratio;
        }
    }
    let tolerance = 1.0 + 2f64.powi(1 - depth as i32);
    Ok(A1Check { passes: max_ratio <= tolerance, max_ratio, tolerance })
}

/// `h * sum_j <f(t_j), g(t_j)>` (the discrete duality pairing).
pub fn pairing(f: &GridFunction, g: &GridFunction) -> Result<Complex64> {
    if f.grid() != g.grid() || f.dim() != g.dim() {
        return Err(Error::GridMismatch("pairing requires matching layouts".into()));
    }
    let h = f.grid().spacing();
    let mut acc = Complex64::default();
    for j in 0..f.grid().len() {
        for c in 0..f.dim() {
            acc += f.samples()[(j, c)] * g.samples()[(j, c)];
        }
    }
    Ok(acc * h)
}
