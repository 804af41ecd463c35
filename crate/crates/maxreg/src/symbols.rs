//! Operator pencils, the solution symbol and its companions, exact derivative
//! recursions, Mihlin-condition certificates, kernel extraction, and
//! Calderon-Zygmund constants.
//!
//! A [`FrequencySymbol`] is a matrix-valued function of the frequency
//! variable carrying derivatives up to order 3 as a jet. Inverting a jet uses
//! the closed recursions obtained from differentiating `b(t) a(t) = I`:
//!
//! ```text
//! -a'   = a b' a
//! -a''  = a' b' a + a b'' a + a b' a'
//! -a''' = a'' b' a + 2 a' b'' a + 2 a' b' a' + a b''' a + 2 a b'' a' + a b' a''
//! ```
//!
//! so no numerical differentiation enters the certified constants.

use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Grid, MatrixGridFunction};
use crate::linalg::{self, CMat};

/// Value and derivatives up to order 3 at one frequency.
#[derive(Debug, Clone)]
pub struct Jet {
    pub d: [CMat; 4],
}

impl Jet {
    pub fn constant(m: CMat) -> Self {
        let zero = Array2::zeros((m.nrows(), m.ncols()));
        Jet { d: [m, zero.clone(), zero.clone(), zero] }
    }

    pub fn rows(&self) -> usize {
        self.d[0].nrows()
    }

    pub fn cols(&self) -> usize {
        self.d[0].ncols()
    }

    pub fn add(&self, other: &Jet) -> Jet {
        Jet {
            d: [
                &self.d[0] + &other.d[0],
                &self.d[1] + &other.d[1],
                &self.d[2] + &other.d[2],
                &self.d[3] + &other.d[3],
            ],
        }
    }

    pub fn scale(&self, c: Complex64) -> Jet {
        Jet { d: self.d.clone().map(|m| m.mapv(|z| z * c)) }
    }

    /// Matrix product with the Leibniz rule up to order 3.
    pub fn mul(&self, other: &Jet) -> Jet {
        let f = &self.d;
        let g = &other.d;
        let d0 = f[0].dot(&g[0]);
        let d1 = f[1].dot(&g[0]) + f[0].dot(&g[1]);
        let d2 = f[2].dot(&g[0]) + f[1].dot(&g[1]).mapv(|z| z * 2.0) + f[0].dot(&g[2]);
        let d3 = f[3].dot(&g[0])
            + f[2].dot(&g[1]).mapv(|z| z * 3.0)
            + f[1].dot(&g[2]).mapv(|z| z * 3.0)
            + f[0].dot(&g[3]);
        Jet { d: [d0, d1, d2, d3] }
    }

    /// Multiplies by a scalar jet `s` (value and derivatives of a scalar
    /// factor), again by Leibniz.
    pub fn scale_by_scalar_jet(&self, s: [Complex64; 4]) -> Jet {
        let f = &self.d;
        let d0 = f[0].mapv(|z| z * s[0]);
        let d1 = f[1].mapv(|z| z * s[0]) + f[0].mapv(|z| z * s[1]);
        let d2 = f[2].mapv(|z| z * s[0])
            + f[1].mapv(|z| z * (s[1] * 2.0))
            + f[0].mapv(|z| z * s[2]);
        let d3 = f[3].mapv(|z| z * s[0])
            + f[2].mapv(|z| z * (s[1] * 3.0))
            + f[1].mapv(|z| z * (s[2] * 3.0))
            + f[0].mapv(|z| z * s[3]);
        Jet { d: [d0, d1, d2, d3] }
    }

    /// Node-wise inverse with exact derivative recursions. Returns the
    /// inverse jet and a condition estimate of the value matrix.
    pub fn inverse(&self) -> Option<(Jet, f64)> {
        let b = &self.d;
        let a0 = linalg::inverse(&b[0])?;
        let cond = linalg::condition_estimate(&b[0], &a0);
        let a1 = -(a0.dot(&b[1]).dot(&a0));
        let a2 = -(a1.dot(&b[1]).dot(&a0) + a0.dot(&b[2]).dot(&a0) + a0.dot(&b[1]).dot(&a1));
        let a3 = -(a2.dot(&b[1]).dot(&a0)
            + a1.dot(&b[2]).dot(&a0).mapv(|z| z * 2.0)
            + a1.dot(&b[1]).dot(&a1).mapv(|z| z * 2.0)
            + a0.dot(&b[3]).dot(&a0)
            + a0.dot(&b[2]).dot(&a1).mapv(|z| z * 2.0)
            + a0.dot(&b[1]).dot(&a2));
        Some((Jet { d: [a0, a1, a2, a3] }, cond))
    }
}

/// Scalar jets of the monomials `t` and `t^2`.
fn jet_t(tau: f64) -> [Complex64; 4] {
    [
        Complex64::new(tau, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::default(),
        Complex64::default(),
    ]
}

fn jet_t2(tau: f64) -> [Complex64; 4] {
    [
        Complex64::new(tau * tau, 0.0),
        Complex64::new(2.0 * tau, 0.0),
        Complex64::new(2.0, 0.0),
        Complex64::default(),
    ]
}

/// Whether a symbol is defined on all of the line or only off the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolDomain {
    WholeLine,
    PuncturedLine,
}

/// Matrix-valued symbol with derivative evaluators up to order 3.
#[derive(Clone)]
pub struct FrequencySymbol {
    rows: usize,
    cols: usize,
    domain: SymbolDomain,
    /// Derivatives are exact up to this order; beyond it they come from
    /// central finite differences.
    exact_order: usize,
    eval: Arc<dyn Fn(f64) -> Result<Jet> + Send + Sync>,
}

impl std::fmt::Debug for FrequencySymbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FrequencySymbol")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .field("domain", &self.domain)
            .field("exact_order", &self.exact_order)
            .finish()
    }
}

/// Central finite-difference steps per derivative order, scaled by
/// `max(1, |tau|)`; chosen to balance truncation against roundoff. Orders 2
/// and 3 are Richardson-extrapolated from these base steps.
pub(crate) const FD_STEPS: [f64; 4] = [0.0, 1e-5, 6e-4, 2e-3];

impl FrequencySymbol {
    pub fn from_jet_fn(
        rows: usize,
        cols: usize,
        domain: SymbolDomain,
        exact_order: usize,
        eval: impl Fn(f64) -> Result<Jet> + Send + Sync + 'static,
    ) -> Self {
        Self { rows, cols, domain, exact_order, eval: Arc::new(eval) }
    }

    pub fn constant(m: CMat, domain: SymbolDomain) -> Self {
        let rows = m.nrows();
        let cols = m.ncols();
        Self::from_jet_fn(rows, cols, domain, 3, move |_| Ok(Jet::constant(m.clone())))
    }

    pub fn identity(n: usize) -> Self {
        Self::constant(linalg::identity(n), SymbolDomain::WholeLine)
    }

    /// Scalar symbol from a jet of values `[a, a', a'', a''']`.
    pub fn scalar_jet_fn(
        domain: SymbolDomain,
        f: impl Fn(f64) -> [Complex64; 4] + Send + Sync + 'static,
    ) -> Self {
        Self::from_jet_fn(1, 1, domain, 3, move |tau| {
            let vals = f(tau);
            Ok(Jet {
                d: vals.map(|v| {
                    let mut m = Array2::zeros((1, 1));
                    m[(0, 0)] = v;
                    m
                }),
            })
        })
    }

    /// Symbol given by values only; derivatives fall back to central finite
    /// differences (flagged in certificates through `exact_order = 0`).
    pub fn from_value_fn(
        rows: usize,
        cols: usize,
        domain: SymbolDomain,
        f: impl Fn(f64) -> Result<CMat> + Send + Sync + 'static,
    ) -> Self {
        let f = Arc::new(f);
        Self::from_jet_fn(rows, cols, domain, 0, move |tau| {
            let value = f(tau)?;
            let d1 = finite_difference(f.as_ref(), tau, 1)?;
            let d2 = finite_difference(f.as_ref(), tau, 2)?;
            let d3 = finite_difference(f.as_ref(), tau, 3)?;
            Ok(Jet { d: [value, d1, d2, d3] })
        })
    }

    /// The jump symbol `sign(tau) C`; a member of the homogeneous Mihlin
    /// class with no continuous extension at 0.
    pub fn sign_jump(matrix: CMat) -> Self {
        let rows = matrix.nrows();
        let cols = matrix.ncols();
        Self::from_jet_fn(rows, cols, SymbolDomain::PuncturedLine, 3, move |tau| {
            Ok(Jet::constant(matrix.mapv(|z| z * tau.signum())))
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn domain(&self) -> SymbolDomain {
        self.domain
    }

    pub fn exact_order(&self) -> usize {
        self.exact_order
    }

    pub fn jet(&self, tau: f64) -> Result<Jet> {
        (self.eval)(tau)
    }

    /// Value or derivative of the given order (`order <= 3`).
    pub fn eval(&self, tau: f64, order: usize) -> Result<CMat> {
        if order > 3 {
            return Err(Error::InvalidArgument(format!(
                "derivatives are available up to order 3, got {order}"
            )));
        }
        Ok(self.jet(tau)?.d[order].clone())
    }

    /// Value with the zero-node convention: punctured-line symbols take the
    /// symmetric average of the one-sided values at `+-half_node`.
    pub fn value_with_zero_convention(&self, tau: f64, half_node: f64) -> Result<CMat> {
        if tau == 0.0 && self.domain == SymbolDomain::PuncturedLine {
            let plus = self.jet(half_node)?.d[0].clone();
            let minus = self.jet(-half_node)?.d[0].clone();
            Ok((&plus + &minus).mapv(|z| z * 0.5))
        } else {
            Ok(self.jet(tau)?.d[0].clone())
        }
    }

    /// Samples the value at every node of `grid` (ascending frequency order),
    /// applying the zero-node convention.
    pub fn node_values(&self, grid: Grid) -> Result<NodeValues> {
        let half_node = grid.first_positive_freq() / 2.0;
        let mut values = Vec::with_capacity(grid.len());
        let mut averaged = false;
        for r in 0..grid.len() {
            let tau = grid.freq(r);
            if tau == 0.0 && self.domain == SymbolDomain::PuncturedLine {
                averaged = true;
            }
            values.push(self.value_with_zero_convention(tau, half_node)?);
        }
        Ok(NodeValues { values, zero_node_averaged: averaged })
    }

    /// Largest operator 2-norm over the grid nodes.
    pub fn sup_norm_on_nodes(&self, grid: Grid) -> Result<f64> {
        let nodes = self.node_values(grid)?;
        Ok(nodes.values.iter().map(linalg::op_norm_2).fold(0.0, f64::max))
    }

    /// Pointwise matrix product `self(tau) * rhs(tau)` with Leibniz jets.
    pub fn product(&self, rhs: &FrequencySymbol) -> Result<FrequencySymbol> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "symbol product: {}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let lhs_eval = self.eval.clone();
        let rhs_eval = rhs.eval.clone();
        let domain = if self.domain == SymbolDomain::PuncturedLine
            || rhs.domain == SymbolDomain::PuncturedLine
        {
            SymbolDomain::PuncturedLine
        } else {
            SymbolDomain::WholeLine
        };
        Ok(FrequencySymbol::from_jet_fn(
            self.rows,
            rhs.cols,
            domain,
            self.exact_order.min(rhs.exact_order),
            move |tau| Ok(lhs_eval(tau)?.mul(&rhs_eval(tau)?)),
        ))
    }
}

/// Node samples of a symbol, with the zero-node convention flag for reports.
#[derive(Debug, Clone)]
pub struct NodeValues {
    pub values: Vec<CMat>,
    pub zero_node_averaged: bool,
}

/// Node-wise inverse `a(tau) = b(tau)^-1` with exact derivative recursions.
///
/// Evaluation is lazy: `SingularAtNode` surfaces when the inverse is actually
/// requested at a frequency where `b` is singular or has condition estimate
/// above `1e12`, so punctured-domain evaluation still succeeds for symbols
/// that are only singular at the origin.
pub fn invert_symbol(b: &FrequencySymbol, domain: SymbolDomain) -> FrequencySymbol {
    let eval = b.eval.clone();
    let rows = b.rows();
    let cols = b.cols();
    FrequencySymbol::from_jet_fn(cols, rows, domain, b.exact_order(), move |tau| {
        let jet = eval(tau)?;
        match jet.inverse() {
            Some((inv, cond)) if cond <= 1e12 => Ok(inv),
            Some((_, cond)) => Err(Error::SingularAtNode { tau, cond }),
            None => Err(Error::SingularAtNode { tau, cond: f64::INFINITY }),
        }
    })
}

/// Convolution term specification; every kind provides value and derivatives
/// up to order 3.
#[derive(Clone, Debug)]
pub enum ConvolutionSymbol {
    /// No convolution term.
    Zero { dim: usize },
    /// Memory kernel `c(t) = exp(-lambda |t|) C`, so
    /// `c_hat(tau) = 2 lambda / (lambda^2 + tau^2) C`.
    Memory { lambda: f64, matrix: CMat },
    /// `c_hat(tau) = i tau c0(tau) + c1(tau)`.
    Decomposed { c0: FrequencySymbol, c1: FrequencySymbol },
    /// User-supplied symbol (finite-difference fallback applies when the
    /// inner symbol carries no exact derivatives).
    Custom(FrequencySymbol),
}

impl ConvolutionSymbol {
    pub fn zero(dim: usize) -> Self {
        ConvolutionSymbol::Zero { dim }
    }

    pub fn memory(lambda: f64, matrix: CMat) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "memory kind needs lambda > 0, got {lambda}"
            )));
        }
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch("memory matrix must be square".into()));
        }
        Ok(ConvolutionSymbol::Memory { lambda, matrix })
    }

    pub fn decomposed(c0: FrequencySymbol, c1: FrequencySymbol) -> Result<Self> {
        if c0.rows() != c1.rows() || c0.cols() != c1.cols() {
            return Err(Error::DimensionMismatch(
                "decomposed parts must share dimensions".into(),
            ));
        }
        Ok(ConvolutionSymbol::Decomposed { c0, c1 })
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvolutionSymbol::Zero { dim } => *dim,
            ConvolutionSymbol::Memory { matrix, .. } => matrix.nrows(),
            ConvolutionSymbol::Decomposed { c1, .. } => c1.rows(),
            ConvolutionSymbol::Custom(s) => s.rows(),
        }
    }

    /// The symbol `c_hat` as a [`FrequencySymbol`].
    pub fn symbol(&self) -> FrequencySymbol {
        match self {
            ConvolutionSymbol::Zero { dim } => FrequencySymbol::constant(
                Array2::zeros((*dim, *dim)),
                SymbolDomain::WholeLine,
            ),
            ConvolutionSymbol::Memory { lambda, matrix } => {
                let lambda = *lambda;
                let matrix = matrix.clone();
                let n = matrix.nrows();
                FrequencySymbol::from_jet_fn(n, n, SymbolDomain::WholeLine, 3, move |tau| {
                    let den = lambda * lambda + tau * tau;
                    let g0 = 2.0 * lambda / den;
                    let g1 = -4.0 * lambda * tau / den.powi(2);
                    let g2 = -4.0 * lambda * (lambda * lambda - 3.0 * tau * tau) / den.powi(3);
                    let g3 =
                        48.0 * lambda * tau * (lambda * lambda - tau * tau) / den.powi(4);
                    Ok(Jet {
                        d: [g0, g1, g2, g3].map(|g| matrix.mapv(|z| z * g)),
                    })
                })
            }
            ConvolutionSymbol::Decomposed { c0, c1 } => {
                let c0_eval = c0.eval.clone();
                let c1_eval = c1.eval.clone();
                let rows = c1.rows();
                let cols = c1.cols();
                let domain = if c0.domain() == SymbolDomain::PuncturedLine
                    || c1.domain() == SymbolDomain::PuncturedLine
                {
                    SymbolDomain::PuncturedLine
                } else {
                    SymbolDomain::WholeLine
                };
                let exact = c0.exact_order().min(c1.exact_order());
                FrequencySymbol::from_jet_fn(rows, cols, domain, exact, move |tau| {
                    let i = Complex64::new(0.0, 1.0);
                    let it = jet_t(tau).map(|z| z * i);
                    let part0 = c0_eval(tau)?.scale_by_scalar_jet(it);
                    Ok(part0.add(&c1_eval(tau)?))
                })
            }
            ConvolutionSymbol::Custom(s) => s.clone(),
        }
    }

    /// Whether the symbol extends continuously to the origin.
    pub fn continuous_at_zero(&self) -> bool {
        self.symbol().domain() == SymbolDomain::WholeLine
    }
}

/// The quadruple `(A, B, P, c_hat)` defining
/// `b(t) = -t^2 P + i t B + A + c_hat(t)`.
#[derive(Clone, Debug)]
pub struct OperatorPencil {
    dim: usize,
    zero_order: CMat,
    first_order: CMat,
    second_order: CMat,
    convolution: ConvolutionSymbol,
}

impl OperatorPencil {
    /// `zero_order = A`, `first_order = B`, `second_order = P`.
    pub fn new(
        zero_order: CMat,
        first_order: CMat,
        second_order: CMat,
        convolution: ConvolutionSymbol,
    ) -> Result<Self> {
        let dim = zero_order.nrows();
        for (name, m) in [
            ("A", &zero_order),
            ("B", &first_order),
            ("P", &second_order),
        ] {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "{name} must be {dim}x{dim}, got {}x{}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} has non-finite entries")));
            }
        }
        if convolution.dim() != dim {
            return Err(Error::DimensionMismatch(format!(
                "convolution symbol has dim {}, pencil has dim {dim}",
                convolution.dim()
            )));
        }
        Ok(Self { dim, zero_order, first_order, second_order, convolution })
    }

    pub fn scalar(a: Complex64, b: Complex64, p: Complex64) -> Self {
        let m = |z: Complex64| {
            let mut m = Array2::zeros((1, 1));
            m[(0, 0)] = z;
            m
        };
        Self::new(m(a), m(b), m(p), ConvolutionSymbol::zero(1)).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn zero_order(&self) -> &CMat {
        &self.zero_order
    }

    pub fn first_order(&self) -> &CMat {
        &self.first_order
    }

    pub fn second_order(&self) -> &CMat {
        &self.second_order
    }

    pub fn convolution(&self) -> &ConvolutionSymbol {
        &self.convolution
    }
}

/// The pencil symbol `b(t) = -t^2 P + i t B + A + c_hat(t)` with exact
/// derivatives `b' = -2tP + iB + c_hat'`, `b'' = -2P + c_hat''`,
/// `b''' = c_hat'''`.
pub fn pencil_symbol(pencil: &OperatorPencil) -> FrequencySymbol {
    let a = pencil.zero_order.clone();
    let b = pencil.first_order.clone();
    let p = pencil.second_order.clone();
    let chat = pencil.convolution.symbol();
    let chat_eval = chat.eval.clone();
    let n = pencil.dim;
    let domain = chat.domain();
    let exact = chat.exact_order();
    FrequencySymbol::from_jet_fn(n, n, domain, exact, move |tau| {
        let c = chat_eval(tau)?;
        let i = Complex64::new(0.0, 1.0);
        let t = Complex64::new(tau, 0.0);
        let d0 = &(&c.d[0] + &a) + &(&b.mapv(|z| z * (i * t)) - &p.mapv(|z| z * (t * t)));
        let d1 = &(&c.d[1] + &b.mapv(|z| z * i)) - &p.mapv(|z| z * (2.0 * t));
        let d2 = &c.d[2] - &p.mapv(|z| z * 2.0);
        let d3 = c.d[3].clone();
        Ok(Jet { d: [d0, d1, d2, d3] })
    })
}

/// The companion symbols of a solution symbol `a = b^-1`.
#[derive(Clone, Debug)]
pub struct CompanionSymbols {
    /// `a0(t) = t B a(t)`.
    pub a0: FrequencySymbol,
    /// `a1(t) = t^2 P a(t)`.
    pub a1: FrequencySymbol,
    /// `d(t) = t a(t)`.
    pub d: FrequencySymbol,
    /// `c_hat(t) a(t)`.
    pub chat_a: FrequencySymbol,
}

/// Builds `a0, a1, d, c_hat a` from the pencil and its solution symbol, with
/// exact derivatives via the product rule.
pub fn companion_symbols(pencil: &OperatorPencil, a: &FrequencySymbol) -> CompanionSymbols {
    let n = pencil.dim;
    let b = pencil.first_order.clone();
    let p = pencil.second_order.clone();
    let a_eval = a.eval.clone();
    let domain = a.domain();
    let exact = a.exact_order();

    let make = move |kind: u8, m: Option<CMat>, extra: Option<FrequencySymbol>| {
        let a_eval = a_eval.clone();
        FrequencySymbol::from_jet_fn(n, n, domain, exact, move |tau| {
            let a_jet = a_eval(tau)?;
            Ok(match kind {
                0 => {
                    // t B a
                    let ba = Jet::constant(m.clone().unwrap()).mul(&a_jet);
                    ba.scale_by_scalar_jet(jet_t(tau))
                }
                1 => {
                    // t^2 P a
                    let pa = Jet::constant(m.clone().unwrap()).mul(&a_jet);
                    pa.scale_by_scalar_jet(jet_t2(tau))
                }
                2 => a_jet.scale_by_scalar_jet(jet_t(tau)),
                _ => extra.as_ref().unwrap().jet(tau)?.mul(&a_jet),
            })
        })
    };

    let chat = pencil.convolution.symbol();
    CompanionSymbols {
        a0: make.clone()(0, Some(b), None),
        a1: make.clone()(1, Some(p), None),
        d: make.clone()(2, None, None),
        chat_a: make(3, None, Some(chat)),
    }
}

/// Weight family of the Mihlin-type condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MihlinFlavor {
    /// Weights `|t|^l`; singularities at the origin are allowed.
    Homogeneous,
    /// Weights `(1 + |t|)^l` together with a continuous extension at 0.
    Inhomogeneous,
}

/// Sweep configuration for [`mihlin_constant`].
#[derive(Debug, Clone)]
pub struct MihlinOptions {
    /// Sample `|tau|` in `[10^decade_min, 10^decade_max]`.
    pub decade_min: i32,
    pub decade_max: i32,
    pub points_per_decade: usize,
    /// Extra sample frequencies (e.g. the grid nodes); zeros are skipped.
    pub extra_points: Vec<f64>,
    /// Tolerance for the one-sided limit comparison at the origin.
    pub continuity_tol: f64,
}

impl Default for MihlinOptions {
    fn default() -> Self {
        Self {
            decade_min: -6,
            decade_max: 6,
            points_per_decade: 2000,
            extra_points: Vec::new(),
            continuity_tol: 1e-8,
        }
    }
}

impl MihlinOptions {
    /// Coarser sweep for quick sanity checks and examples.
    pub fn coarse() -> Self {
        Self { points_per_decade: 200, ..Self::default() }
    }

    pub fn with_grid_nodes(mut self, grid: Grid) -> Self {
        self.extra_points.extend(grid.freqs().filter(|t| *t != 0.0));
        self
    }
}

/// Certificate for a weighted-derivative (Mihlin) condition.
#[derive(Debug, Clone)]
pub struct MihlinCertificate {
    pub order: usize,
    pub flavor: MihlinFlavor,
    /// `max_{l <= order} sup ||w_l(t) a^(l)(t)||` over the sample grid.
    pub constant: f64,
    /// Supremum per derivative order.
    pub per_order: Vec<f64>,
    /// Inhomogeneous flavor only: whether `a(0+) = a(0-)` within tolerance.
    pub continuity_at_zero: Option<bool>,
    /// Operator-norm gap between the extrapolated one-sided limits at 0.
    pub zero_gap: f64,
    /// True when derivatives beyond the symbol's exact order came from
    /// finite differences.
    pub fd_fallback: bool,
    pub samples: usize,
}

/// Approximates `[a]` for the Mihlin condition of the given order and flavor
/// on a log-spaced sample grid. Declares divergence when the per-decade
/// maxima grow across the outermost two decade steps at either end of the
/// sweep (growth by more than 1% per decade).
pub fn mihlin_constant(
    a: &FrequencySymbol,
    order: usize,
    flavor: MihlinFlavor,
    opts: &MihlinOptions,
) -> Result<MihlinCertificate> {
    if order > 3 {
        return Err(Error::InvalidArgument(format!(
            "Mihlin certificates are available up to order 3, got {order}"
        )));
    }
    let n_decades = (opts.decade_max - opts.decade_min).max(1) as usize;
    let mut per_order = vec![0.0f64; order + 1];
    let mut decade_max = vec![vec![0.0f64; n_decades]; order + 1];
    let mut samples = 0usize;

    let visit = |tau: f64,
                     per_order: &mut [f64],
                     decade_max: &mut [Vec<f64>],
                     samples: &mut usize|
     -> Result<()> {
        let jet = a.jet(tau)?;
        *samples += 1;
        let decade = ((tau.abs().log10() - opts.decade_min as f64).floor() as i64)
            .clamp(0, n_decades as i64 - 1) as usize;
        for l in 0..=order {
            let weight = match flavor {
                MihlinFlavor::Homogeneous => tau.abs().powi(l as i32),
                MihlinFlavor::Inhomogeneous => (1.0 + tau.abs()).powi(l as i32),
            };
            let v = weight * linalg::op_norm_2(&jet.d[l]);
            if v > per_order[l] {
                per_order[l] = v;
            }
            if v > decade_max[l][decade] {
                decade_max[l][decade] = v;
            }
        }
        Ok(())
    };

    let ppd = opts.points_per_decade.max(1);
    for sign in [1.0f64, -1.0] {
        for d in opts.decade_min..opts.decade_max {
            for i in 0..ppd {
                let tau = sign * 10f64.powf(d as f64 + i as f64 / ppd as f64);
                visit(tau, &mut per_order, &mut decade_max, &mut samples)?;
            }
        }
        // close the sweep at the outer endpoint
        let tau = sign * 10f64.powi(opts.decade_max);
        visit(tau, &mut per_order, &mut decade_max, &mut samples)?;
    }
    for &tau in &opts.extra_points {
        if tau != 0.0 && tau.is_finite() {
            visit(tau, &mut per_order, &mut decade_max, &mut samples)?;
        }
    }

    // Divergence: strict growth (>1% per decade) over the two outermost
    // decade steps, toward infinity or toward the origin.
    for (l, maxima) in decade_max.iter().enumerate() {
        let m = maxima.len();
        if m >= 3 {
            let grow = |a: f64, b: f64| b > a * 1.01 && b > 0.0;
            let outward = grow(maxima[m - 3], maxima[m - 2]) && grow(maxima[m - 2], maxima[m - 1]);
            let inward = grow(maxima[2], maxima[1]) && grow(maxima[1], maxima[0]);
            if outward || inward {
                return Err(Error::DivergentWeightedDerivative {
                    order: l,
                    decade_maxima: maxima.clone(),
                });
            }
        }
    }

    // One-sided limits at 0 by linear extrapolation from +-eps, +-2eps.
    let eps = 10f64.powi(opts.decade_min);
    let limit = |sign: f64| -> Result<CMat> {
        let near = a.jet(sign * eps)?.d[0].clone();
        let far = a.jet(sign * 2.0 * eps)?.d[0].clone();
        Ok(&near.mapv(|z| z * 2.0) - &far)
    };
    let plus = limit(1.0)?;
    let minus = limit(-1.0)?;
    let zero_gap = linalg::op_norm_2(&(&plus - &minus));
    let continuity_at_zero = match flavor {
        MihlinFlavor::Inhomogeneous => {
            let scale = linalg::op_norm_2(&plus).max(1.0);
            Some(zero_gap <= opts.continuity_tol * scale)
        }
        MihlinFlavor::Homogeneous => None,
    };

    Ok(MihlinCertificate {
        order,
        flavor,
        constant: per_order.iter().copied().fold(0.0, f64::max),
        per_order,
        continuity_at_zero,
        zero_gap,
        fd_fallback: a.exact_order() < order,
        samples,
    })
}

/// Kernel pair `(k, k')` extracted from a symbol by the inverse transform on
/// the grid nodes; `k' = F^-1(i tau a(tau))`.
pub fn kernel_from_symbol(
    a: &FrequencySymbol,
    grid: Grid,
) -> Result<(MatrixGridFunction, MatrixGridFunction)> {
    kernel_from_symbol_refined(a, grid, 1)
}

/// Kernel extraction with frequency oversampling: the symbol is sampled on a
/// grid with the same spacing but `oversample` times the Nyquist range, which
/// suppresses the spectral-truncation error of slowly decaying symbols while
/// returning samples on the original time nodes.
pub fn kernel_from_symbol_refined(
    a: &FrequencySymbol,
    grid: Grid,
    oversample: usize,
) -> Result<(MatrixGridFunction, MatrixGridFunction)> {
    let oversample = oversample.max(1);
    let fine = Grid::new(grid.half_length(), grid.len() * oversample)?;
    let half_node = grid.first_positive_freq() / 2.0;
    let n_fine = fine.len();
    let rows = a.rows();
    let cols = a.cols();
    // Sample the symbol once per fine node.
    let mut values = Vec::with_capacity(n_fine);
    for r in 0..n_fine {
        let tau = fine.freq(r);
        values.push(a.value_with_zero_convention(tau, half_node)?);
    }
    let mut k_samples = vec![Array2::zeros((rows, cols)); grid.len()];
    let mut kp_samples = vec![Array2::zeros((rows, cols)); grid.len()];
    let mut series = vec![Complex64::default(); n_fine];
    let mut series_d = vec![Complex64::default(); n_fine];
    for i in 0..rows {
        for j in 0..cols {
            for r in 0..n_fine {
                let tau = fine.freq(r);
                let v = values[r][(i, j)];
                series[r] = v;
                series_d[r] = Complex64::new(0.0, tau) * v;
            }
            let k_fine = crate::grid::ifft_series(fine, &series);
            let kp_fine = crate::grid::ifft_series(fine, &series_d);
            for t in 0..grid.len() {
                k_samples[t][(i, j)] = k_fine[t * oversample];
                kp_samples[t][(i, j)] = kp_fine[t * oversample];
            }
        }
    }
    Ok((
        MatrixGridFunction::new(grid, k_samples)?,
        MatrixGridFunction::new(grid, kp_samples)?,
    ))
}

/// Calderon-Zygmund constant report.
#[derive(Debug, Clone)]
pub struct CzReport {
    /// `max(||t k(t)||, ||t^2 k'(t)||)` over nodes with `4h <= |t| <= T/2`.
    pub constant: f64,
    /// Same quantity over the excluded near-origin nodes `0 < |t| < 4h`.
    pub near_zero_sup: f64,
    /// Radius of the excluded region (`4h`).
    pub excluded_radius: f64,
}

/// Evaluates the kernel decay condition on the extracted kernel pair.
pub fn cz_constant(k: &MatrixGridFunction, k_prime: &MatrixGridFunction) -> Result<CzReport> {
    if k.grid() != k_prime.grid() {
        return Err(Error::GridMismatch("cz_constant: kernels on different grids".into()));
    }
    let grid = k.grid();
    let h = grid.spacing();
    let cutoff = 4.0 * h;
    let mut constant = 0.0f64;
    let mut near = 0.0f64;
    for j in 0..grid.len() {
        let t = grid.time(j);
        if t == 0.0 || t.abs() > grid.half_length() / 2.0 {
            continue;
        }
        let v0 = t.abs() * linalg::op_norm_2(k.sample(j));
        let v1 = t * t * linalg::op_norm_2(k_prime.sample(j));
        let v = v0.max(v1);
        if t.abs() < cutoff {
            near = near.max(v);
        } else {
            constant = constant.max(v);
        }
    }
    Ok(CzReport { constant, near_zero_sup: near, excluded_radius: cutoff })
}

/// Per-level dyadic envelope fit: the smallest `c_j` with
/// `||F^-1(psi_j a)(t)|| <= c_j 2^j / (1 + 2^(2j) t^2)` on the grid.
#[derive(Debug, Clone)]
pub struct EnvelopeReport {
    pub per_level: Vec<f64>,
    pub constant: f64,
}

/// Checks the band-kernel envelope bound level by level.
pub fn dyadic_envelope_check(
    a: &FrequencySymbol,
    bank: &crate::dyadic::DyadicFilterBank,
) -> Result<EnvelopeReport> {
    let grid = bank.grid();
    let nodes = a.node_values(grid)?;
    let rows = a.rows();
    let cols = a.cols();
    let n = grid.len();
    let mut per_level = Vec::with_capacity(bank.max_level() + 1);
    let mut series = vec![Complex64::default(); n];
    for j in 0..=bank.max_level() {
        let filter = bank.filter(j)?;
        let mut samples = vec![Array2::zeros((rows, cols)); n];
        for row in 0..rows {
            for col in 0..cols {
                for r in 0..n {
                    series[r] = nodes.values[r][(row, col)] * filter[r];
                }
                let kernel = crate::grid::ifft_series(grid, &series);
                for (t, z) in kernel.into_iter().enumerate() {
                    samples[t][(row, col)] = z;
                }
            }
        }
        let scale = 2f64.powi(j as i32);
        let mut c_j = 0.0f64;
        for (t_idx, m) in samples.iter().enumerate() {
            let t = grid.time(t_idx);
            let envelope = scale / (1.0 + scale * scale * t * t);
            c_j = c_j.max(linalg::op_norm_2(m) / envelope);
        }
        per_level.push(c_j);
    }
    let constant = per_level.iter().copied().fold(0.0, f64::max);
    Ok(EnvelopeReport { per_level, constant })
}

/// Central finite difference of the given order, matching [`FD_STEPS`].
/// Orders 2 and 3 use Richardson extrapolation `(4 D(h/2) - D(h)) / 3` of the
/// basic central stencils, which keeps the error a couple of orders below
/// the documented `1e-5` comparison tolerance.
pub fn finite_difference<F>(f: &F, tau: f64, order: usize) -> Result<CMat>
where
    F: Fn(f64) -> Result<CMat> + ?Sized,
{
    let scale = tau.abs().max(1.0);
    let second = |h: f64| -> Result<CMat> {
        Ok(
            (&(&f(tau + h)? + &f(tau - h)?) - &f(tau)?.mapv(|z| z * 2.0))
                .mapv(|z| z / (h * h)),
        )
    };
    let third = |h: f64| -> Result<CMat> {
        Ok((&(&f(tau + 2.0 * h)? - &f(tau + h)?.mapv(|z| z * 2.0))
            + &(&f(tau - h)?.mapv(|z| z * 2.0) - &f(tau - 2.0 * h)?))
            .mapv(|z| z / (2.0 * h * h * h)))
    };
    let richardson = |coarse: CMat, fine: CMat| -> CMat {
        (&fine.mapv(|z| z * 4.0) - &coarse).mapv(|z| z / 3.0)
    };
    match order {
        0 => f(tau),
        1 => {
            let h = FD_STEPS[1] * scale;
            Ok((&f(tau + h)? - &f(tau - h)?).mapv(|z| z / (2.0 * h)))
        }
        2 => {
            let h = FD_STEPS[2] * scale;
            Ok(richardson(second(h)?, second(h / 2.0)?))
        }
        3 => {
            let h = FD_STEPS[3] * scale;
            Ok(richardson(third(h)?, third(h / 2.0)?))
        }
        _ => Err(Error::InvalidArgument(format!(
            "finite differences implemented up to order 3, got {order}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn scalar_mat(z: Complex64) -> CMat {
        let mut m = Array2::zeros((1, 1));
        m[(0, 0)] = z;
        m
    }

    fn rel_err(actual: &CMat, expected: &CMat) -> f64 {
        let diff = actual - expected;
        let scale = linalg::fro_norm(expected).max(1e-300);
        linalg::fro_norm(&diff) / scale
    }

    #[test]
    fn scalar_pencil_symbol_and_inverse() {
        // b(t) = 1 + it, a(t) = 1/(1+it), a'(t) = -i/(1+it)^2.
        let pencil = OperatorPencil::scalar(c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
        let b = pencil_symbol(&pencil);
        let jet = b.jet(2.0).unwrap();
        assert_abs_diff_eq!((jet.d[0][(0, 0)] - c(1.0, 2.0)).norm(), 0.0, epsilon = 1e-14);
        let a = invert_symbol(&b, SymbolDomain::WholeLine);
        for tau in [0.5f64, -3.0, 17.0] {
            let z = c(1.0, tau);
            let expected = z.inv();
            let expected_d1 = -c(0.0, 1.0) / (z * z);
            let jet = a.jet(tau).unwrap();
            assert!((jet.d[0][(0, 0)] - expected).norm() < 1e-13);
            assert!((jet.d[1][(0, 0)] - expected_d1).norm() < 1e-13);
        }
    }

    #[test]
    fn pencil_value_at_zero_is_a_plus_chat() {
        let matrix = ndarray::arr2(&[[c(0.5, 0.0), c(0.1, 0.0)], [c(0.0, 0.2), c(0.7, 0.0)]]);
        let chat = ConvolutionSymbol::memory(1.5, matrix.clone()).unwrap();
        let a_mat = ndarray::arr2(&[[c(2.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(3.0, 0.0)]]);
        let pencil = OperatorPencil::new(
            a_mat.clone(),
            linalg::identity(2),
            linalg::identity(2),
            chat.clone(),
        )
        .unwrap();
        let b = pencil_symbol(&pencil);
        let at0 = b.jet(0.0).unwrap().d[0].clone();
        let chat0 = chat.symbol().jet(0.0).unwrap().d[0].clone();
        let expected = &a_mat + &chat0;
        assert!(rel_err(&at0, &expected) < 1e-14);
    }

    #[test]
    fn pencil_first_derivative_matches_finite_differences() {
        let matrix = ndarray::arr2(&[[c(0.4, 0.1), c(0.0, 0.0)], [c(0.2, 0.0), c(0.3, 0.0)]]);
        let pencil = OperatorPencil::new(
            ndarray::arr2(&[[c(3.0, 0.0), c(0.5, 0.0)], [c(0.0, 0.0), c(2.0, 0.0)]]),
            ndarray::arr2(&[[c(1.0, 0.0), c(0.0, 0.0)], [c(1.0, 0.0), c(1.0, 0.0)]]),
            ndarray::arr2(&[[c(1.0, 0.0), c(0.2, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]),
            ConvolutionSymbol::memory(2.0, matrix).unwrap(),
        )
        .unwrap();
        let b = pencil_symbol(&pencil);
        let value_fn = move |tau: f64| b.eval(tau, 0);
        let b2 = pencil_symbol(&pencil);
        for tau in [0.5f64, -0.5, 3.0, -3.0, 17.0, -17.0] {
            let exact = b2.eval(tau, 1).unwrap();
            let fd = finite_difference(&value_fn, tau, 1).unwrap();
            assert!(rel_err(&fd, &exact) < 1e-6, "tau = {tau}");
        }
    }

    #[test]
    fn inverse_recursions_match_finite_differences_to_order_three() {
        let matrix = ndarray::arr2(&[[c(0.3, 0.0), c(0.1, -0.1)], [c(0.0, 0.1), c(0.5, 0.0)]]);
        let pencil = OperatorPencil::new(
            ndarray::arr2(&[[c(4.0, 0.0), c(0.3, 0.2)], [c(-0.1, 0.0), c(3.0, 0.5)]]),
            ndarray::arr2(&[[c(0.5, 0.3), c(0.2, 0.0)], [c(0.0, 0.0), c(1.0, -0.2)]]),
            ndarray::arr2(&[[c(1.5, 0.0), c(0.0, 0.1)], [c(0.2, 0.0), c(2.0, 0.0)]]),
            ConvolutionSymbol::memory(1.0, matrix).unwrap(),
        )
        .unwrap();
        let a = invert_symbol(&pencil_symbol(&pencil), SymbolDomain::WholeLine);
        let value_a = {
            let a = a.clone();
            move |tau: f64| a.eval(tau, 0)
        };
        for tau in [0.07f64, 0.9, 4.0, 41.0, -0.3, -12.0] {
            for order in 1..=3 {
                let exact = a.eval(tau, order).unwrap();
                let fd = finite_difference(&value_a, tau, order).unwrap();
                assert!(
                    rel_err(&fd, &exact) < 1e-5,
                    "order {order} at tau = {tau}: rel err {}",
                    rel_err(&fd, &exact)
                );
            }
        }
    }

    #[test]
    fn diagonal_pencil_inverts_entrywise() {
        let a_mat = ndarray::arr2(&[[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(2.0, 0.0)]]);
        let pencil = OperatorPencil::new(
            a_mat,
            linalg::identity(2),
            linalg::identity(2),
            ConvolutionSymbol::zero(2),
        )
        .unwrap();
        let a = invert_symbol(&pencil_symbol(&pencil), SymbolDomain::WholeLine);
        for tau in [0.0f64, 0.7, -2.2, 10.0] {
            let v = a.eval(tau, 0).unwrap();
            for (idx, lambda) in [1.0f64, 2.0].into_iter().enumerate() {
                let expected = (c(lambda - tau * tau, tau)).inv();
                assert!((v[(idx, idx)] - expected).norm() < 1e-12);
                let off = v[(idx, 1 - idx)];
                assert!(off.norm() < 1e-14);
            }
        }
    }

    #[test]
    fn punctured_symbol_fails_only_at_origin() {
        // A = 0, B = I, P = 0: b(0) = 0.
        let pencil = OperatorPencil::scalar(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
        let a = invert_symbol(&pencil_symbol(&pencil), SymbolDomain::PuncturedLine);
        assert!(matches!(a.jet(0.0), Err(Error::SingularAtNode { .. })));
        assert!(a.jet(0.5).is_ok());
        // zero-node convention still yields a finite symmetric average
        let v = a.value_with_zero_convention(0.0, 0.25).unwrap();
        // (1/(0.25 i) + 1/(-0.25 i))/2 = 0
        assert!(v[(0, 0)].norm() < 1e-14);
    }

    #[test]
    fn companion_identity_reconstructs_unit() {
        let matrix = ndarray::arr2(&[[c(0.2, 0.0), c(0.0, 0.1)], [c(0.1, 0.0), c(0.4, 0.0)]]);
        let pencil = OperatorPencil::new(
            ndarray::arr2(&[[c(3.0, 0.0), c(0.1, 0.0)], [c(0.0, 0.2), c(4.0, 0.0)]]),
            ndarray::arr2(&[[c(1.0, 0.0), c(0.5, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]),
            linalg::identity(2),
            ConvolutionSymbol::memory(1.0, matrix).unwrap(),
        )
        .unwrap();
        let b = pencil_symbol(&pencil);
        let a = invert_symbol(&b, SymbolDomain::WholeLine);
        let comps = companion_symbols(&pencil, &a);
        let chat = pencil.convolution.symbol();
        for tau in [0.0f64, 0.3, -1.7, 8.0, -30.0] {
            // -a1 + i a0 + A a + chat a = (b a) = I node-wise
            let a_v = a.eval(tau, 0).unwrap();
            let a0_v = comps.a0.eval(tau, 0).unwrap();
            let a1_v = comps.a1.eval(tau, 0).unwrap();
            let chat_a_v = comps.chat_a.eval(tau, 0).unwrap();
            let chat_v = chat.eval(tau, 0).unwrap();
            assert!(rel_err(&chat_v.dot(&a_v), &chat_a_v) < 1e-12);
            let recon = &(&a1_v.mapv(|z| z * c(-1.0, 0.0))
                + &a0_v.mapv(|z| z * c(0.0, 1.0)))
                + &(&pencil.zero_order().dot(&a_v) + &chat_a_v);
            assert!(rel_err(&recon, &linalg::identity(2)) < 1e-10, "tau = {tau}");
        }
    }

    #[test]
    fn scalar_companions_have_expected_sups() {
        let pencil = OperatorPencil::scalar(c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
        let a = invert_symbol(&pencil_symbol(&pencil), SymbolDomain::WholeLine);
        let comps = companion_symbols(&pencil, &a);
        // a0(t) = t/(1+it): |a0| = |t|/sqrt(1+t^2) -> sup 1
        let mut sup = 0.0f64;
        for i in 0..4000 {
            let tau = -200.0 + i as f64 * 0.1;
            sup = sup.max(comps.a0.eval(tau, 0).unwrap()[(0, 0)].norm());
        }
        assert!(sup <= 1.0 + 1e-12);
        assert!(sup > 0.999);
        // P = 0 forces a1 = 0
        assert_eq!(comps.a1.eval(3.0, 0).unwrap()[(0, 0)], c(0.0, 0.0));
    }

    #[test]
    fn mihlin_oracle_for_scalar_resolvent() {
        let pencil = OperatorPencil::scalar(c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
        let a = invert_symbol(&pencil_symbol(&pencil), SymbolDomain::WholeLine);
        let cert =
            mihlin_constant(&a, 1, MihlinFlavor::Inhomogeneous, &MihlinOptions::default())
                .unwrap();
        let expected = (1.0 + 2f64.sqrt()) / 2.0;
        assert!(
            (cert.constant - expected).abs() < 1e-4,
            "constant {} vs {}",
            cert.constant,
            expected
        );
        assert!((cert.per_order[0] - 1.0).abs() < 1e-6);
        assert_eq!(cert.continuity_at_zero, Some(true));
        assert!(!cert.fd_fallback);
    }

    #[test]
    fn identity_symbol_has_unit_constant() {
        let a = FrequencySymbol::identity(3);
        for flavor in [MihlinFlavor::Homogeneous, MihlinFlavor::Inhomogeneous] {
            let cert = mihlin_constant(&a, 3, flavor, &MihlinOptions::coarse()).unwrap();
            assert_abs_diff_eq!(cert.constant, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn sign_jump_fails_continuity() {
        let a = FrequencySymbol::sign_jump(linalg::identity(1));
        let cert =
            mihlin_constant(&a, 2, MihlinFlavor::Inhomogeneous, &MihlinOptions::coarse())
                .unwrap();
        assert_eq!(cert.continuity_at_zero, Some(false));
        assert!(cert.zero_gap > 1.9);
        // Homogeneous flavor accepts it with constant 1.
        let hom =
            mihlin_constant(&a, 2, MihlinFlavor::Homogeneous, &MihlinOptions::coarse()).unwrap();
        assert_abs_diff_eq!(hom.constant, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn linear_growth_is_flagged_divergent() {
        let a = FrequencySymbol::scalar_jet_fn(SymbolDomain::WholeLine, |tau| {
            [c(tau, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]
        });
        let err = mihlin_constant(&a, 1, MihlinFlavor::Homogeneous, &MihlinOptions::coarse());
        assert!(matches!(err, Err(Error::DivergentWeightedDerivative { .. })));
    }

    #[test]
    fn inverse_power_blowup_at_origin_is_flagged() {
        // a(t) = 1/(it): diverges toward the origin.
        let pencil = OperatorPencil::scalar(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
        let a = invert_symbol(&pencil_symbol(&pencil), SymbolDomain::PuncturedLine);
        let err = mihlin_constant(&a, 0, MihlinFlavor::Homogeneous, &MihlinOptions::coarse());
        assert!(matches!(err, Err(Error::DivergentWeightedDerivative { .. })));
    }

    #[test]
    fn memory_kernel_recovers_exponential() {
        let grid = Grid::new(64.0, 4096).unwrap();
        let chat = ConvolutionSymbol::memory(1.0, linalg::identity(1)).unwrap();
        let (k, _) = kernel_from_symbol_refined(&chat.symbol(), grid, 32).unwrap();
        let mut worst = 0.0f64;
        for j in 0..grid.len() {
            let t = grid.time(j);
            if t.abs() > 32.0 {
                continue;
            }
            let err = (k.sample(j)[(0, 0)] - c((-t.abs()).exp(), 0.0)).norm();
            worst = worst.max(err);
        }
        assert!(worst <= 1e-3, "sup error {worst}");
    }

    #[test]
    fn constant_symbol_kernel_is_discrete_dirac() {
        let grid = Grid::new(8.0, 128).unwrap();
        let a = FrequencySymbol::identity(1);
        let (k, _) = kernel_from_symbol(&a, grid).unwrap();
        let h = grid.spacing();
        for j in 0..grid.len() {
            let v = k.sample(j)[(0, 0)];
            if j == grid.len() / 2 {
                assert!((v - c(1.0 / h, 0.0)).norm() < 1e-9 / h);
            } else {
                assert!(v.norm() < 1e-9 / h);
            }
        }
    }

    #[test]
    fn causal_resolvent_kernel_decays_one_sided() {
        let grid = Grid::new(64.0, 4096).unwrap();
        let pencil = OperatorPencil::scalar(c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
        let a = invert_symbol(&pencil_symbol(&pencil), SymbolDomain::WholeLine);
        let (k, _) = kernel_from_symbol_refined(&a, grid, 8).unwrap();
        let mut worst = 0.0f64;
        for j in 0..grid.len() {
            let t = grid.time(j);
            if t.abs() < 0.5 || t.abs() > 30.0 {
                continue;
            }
            let expected = if t > 0.0 { (-t).exp() } else { 0.0 };
            worst = worst.max((k.sample(j)[(0, 0)] - c(expected, 0.0)).norm());
        }
        assert!(worst <= 1e-2, "error away from the origin {worst}");
    }

    #[test]
    fn cz_constant_oracle_for_two_sided_exponential() {
        // k(t) = exp(-|t|): sup |t k| = 1/e, sup |t^2 k'| = 4/e^2.
        let grid = Grid::new(64.0, 4096).unwrap();
        let k_samples: Vec<CMat> = grid
            .times()
            .map(|t| scalar_mat(c((-t.abs()).exp(), 0.0)))
            .collect();
        let kp_samples: Vec<CMat> = grid
            .times()
            .map(|t| scalar_mat(c(-t.signum() * (-t.abs()).exp(), 0.0)))
            .collect();
        let k = MatrixGridFunction::new(grid, k_samples).unwrap();
        let kp = MatrixGridFunction::new(grid, kp_samples).unwrap();
        let report = cz_constant(&k, &kp).unwrap();
        assert!((report.constant - 4.0 / std::f64::consts::E.powi(2)).abs() < 1e-3);
        assert!(report.near_zero_sup <= report.constant);
    }

    #[test]
    fn cz_constant_of_causal_kernel_is_stable_under_refinement() {
        let pencil = OperatorPencil::scalar(c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
        let a = invert_symbol(&pencil_symbol(&pencil), SymbolDomain::WholeLine);
        let mut constants = Vec::new();
        for n in [2048usize, 4096] {
            let grid = Grid::new(64.0, n).unwrap();
            let (k, kp) = kernel_from_symbol_refined(&a, grid, 8).unwrap();
            constants.push(cz_constant(&k, &kp).unwrap().constant);
        }
        assert!(constants[0].is_finite() && constants[0] > 0.0);
        let drift = (constants[1] / constants[0] - 1.0).abs();
        assert!(drift <= 0.1, "constants {constants:?}");
    }

    #[test]
    fn envelope_vanishes_on_zero_and_scales_linearly() {
        let grid = Grid::new(32.0, 512).unwrap();
        let bank = crate::dyadic::DyadicFilterBank::for_grid(grid).unwrap();
        let zero = FrequencySymbol::constant(Array2::zeros((1, 1)), SymbolDomain::WholeLine);
        let report = dyadic_envelope_check(&zero, &bank).unwrap();
        assert!(report.per_level.iter().all(|c| *c == 0.0));

        let a = FrequencySymbol::identity(1);
        let base = dyadic_envelope_check(&a, &bank).unwrap();
        assert!(base.constant.is_finite() && base.constant > 0.0);
        let scaled_symbol =
            FrequencySymbol::constant(scalar_mat(c(5.0, 0.0)), SymbolDomain::WholeLine);
        let scaled = dyadic_envelope_check(&scaled_symbol, &bank).unwrap();
        assert!((scaled.constant - 5.0 * base.constant).abs() <= 1e-9 * base.constant);
    }

    #[test]
    fn cz_constant_of_zero_kernel_is_zero() {
        let grid = Grid::new(8.0, 64).unwrap();
        let zeros: Vec<CMat> = (0..grid.len()).map(|_| Array2::zeros((1, 1))).collect();
        let k = MatrixGridFunction::new(grid, zeros.clone()).unwrap();
        let kp = MatrixGridFunction::new(grid, zeros).unwrap();
        let report = cz_constant(&k, &kp).unwrap();
        assert_eq!(report.constant, 0.0);
    }

    #[test]
    fn conjugate_symmetry_for_real_pencils() {
        let matrix = ndarray::arr2(&[[c(0.3, 0.0), c(0.1, 0.0)], [c(0.1, 0.0), c(0.2, 0.0)]]);
        let pencil = OperatorPencil::new(
            ndarray::arr2(&[[c(2.0, 0.0), c(0.4, 0.0)], [c(0.1, 0.0), c(3.0, 0.0)]]),
            ndarray::arr2(&[[c(1.0, 0.0), c(0.0, 0.0)], [c(0.3, 0.0), c(1.0, 0.0)]]),
            ndarray::arr2(&[[c(1.0, 0.0), c(0.1, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]),
            ConvolutionSymbol::memory(1.3, matrix).unwrap(),
        )
        .unwrap();
        let a = invert_symbol(&pencil_symbol(&pencil), SymbolDomain::WholeLine);
        for tau in [0.4f64, 2.9, 17.0] {
            let plus = a.eval(tau, 0).unwrap();
            let minus = a.eval(-tau, 0).unwrap();
            let conj = minus.mapv(|z| z.conj());
            assert!(rel_err(&conj, &plus) < 1e-10);
        }
    }

    #[test]
    fn finite_difference_fallback_agrees_with_exact_jets() {
        // A value-only wrapper around a smooth symbol must reproduce the
        // exact derivatives within the documented tolerance.
        let matrix = ndarray::arr2(&[[c(0.2, 0.0), c(0.0, 0.05)], [c(0.05, 0.0), c(0.3, 0.0)]]);
        let chat = ConvolutionSymbol::memory(1.0, matrix).unwrap();
        let exact = chat.symbol();
        let exact_for_wrap = chat.symbol();
        let wrapped = FrequencySymbol::from_value_fn(2, 2, SymbolDomain::WholeLine, move |tau| {
            exact_for_wrap.eval(tau, 0)
        });
        assert_eq!(wrapped.exact_order(), 0);
        for tau in [0.3f64, -1.2, 5.0] {
            let e = exact.eval(tau, 1).unwrap();
            let w = wrapped.eval(tau, 1).unwrap();
            assert!(rel_err(&w, &e) < 1e-6);
        }
    }
}
