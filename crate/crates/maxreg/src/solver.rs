//! The multiplier solver for `(P u')' + B u' + A u + c * u = f`, the pure
//! convolution equation, strong-solution verification, and maximal-regularity
//! diagnostics across function spaces.

use num_complex::Complex64;

use crate::dyadic::{self, DyadicFilterBank, SmoothnessParams};
use crate::error::{Error, Result};
use crate::grid::{self, Grid, GridFunction, SpectralFunction};
use crate::linalg::{self, CMat};
use crate::spaces::{self, MaximalConfig, SpaceDescriptor};
use crate::symbols::{
    pencil_symbol, ConvolutionSymbol, FrequencySymbol, OperatorPencil,
};

/// Node data shared by the solver paths: the solution symbol values, the
/// convolution symbol values, and per-node condition estimates.
pub struct PencilNodeData {
    pub a: Vec<CMat>,
    pub chat: Vec<CMat>,
    pub condition: Vec<f64>,
    pub zero_node_averaged: bool,
}

/// Inverts the pencil symbol at every grid node. Fails with the full list of
/// offending frequencies when the whole-line regime does not hold.
pub fn pencil_node_data(pencil: &OperatorPencil, grid: Grid) -> Result<PencilNodeData> {
    let b = pencil_symbol(pencil);
    let b_nodes = b.node_values(grid)?;
    let chat_nodes = pencil.convolution().symbol().node_values(grid)?;
    let mut a = Vec::with_capacity(grid.len());
    let mut condition = Vec::with_capacity(grid.len());
    let mut singular = Vec::new();
    for (r, value) in b_nodes.values.iter().enumerate() {
        match linalg::inverse(value) {
            Some(inv) => {
                let cond = linalg::condition_estimate(value, &inv);
                if cond > 1e12 {
                    singular.push(grid.freq(r));
                }
                condition.push(cond);
                a.push(inv);
            }
            None => {
                singular.push(grid.freq(r));
                condition.push(f64::INFINITY);
                a.push(linalg::identity(pencil.dim()));
            }
        }
    }
    if !singular.is_empty() {
        return Err(Error::NonInvertiblePencil { nodes: singular });
    }
    Ok(PencilNodeData {
        a,
        chat: chat_nodes.values,
        condition,
        zero_node_averaged: b_nodes.zero_node_averaged || chat_nodes.zero_node_averaged,
    })
}

/// The four summands of the equation evaluated on the solution.
#[derive(Debug, Clone)]
pub struct Components {
    /// `(P u')'`, symbol `-t^2 P a(t)`.
    pub second_order: GridFunction,
    /// `B u'`, symbol `i t B a(t)`.
    pub first_order: GridFunction,
    /// `A u`, symbol `A a(t)`.
    pub zeroth: GridFunction,
    /// `c * u`, symbol `c_hat(t) a(t)`.
    pub convolution: GridFunction,
}

impl Components {
    pub fn sum(&self) -> GridFunction {
        self.second_order
            .add(&self.first_order)
            .and_then(|s| s.add(&self.zeroth))
            .and_then(|s| s.add(&self.convolution))
            .expect("components share the grid")
    }

    pub fn named(&self) -> [(&'static str, &GridFunction); 4] {
        [
            ("second_order", &self.second_order),
            ("first_order", &self.first_order),
            ("zeroth", &self.zeroth),
            ("convolution", &self.convolution),
        ]
    }
}

/// Per-node condition numbers of the pencil value.
#[derive(Debug, Clone)]
pub struct ConditionReport {
    pub max: f64,
    pub argmax_tau: f64,
    pub per_node: Vec<f64>,
    pub zero_node_averaged: bool,
}

/// Solution together with its component decomposition and residual.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub u: GridFunction,
    pub components: Components,
    pub residual: GridFunction,
    pub condition: ConditionReport,
    pub forcing: GridFunction,
}

/// Solves the equation by the multiplier `a(D) = b(D)^-1`.
pub fn solve(pencil: &OperatorPencil, f: &GridFunction) -> Result<SolveResult> {
    if f.dim() != pencil.dim() {
        return Err(Error::DimensionMismatch(format!(
            "forcing has dim {}, pencil has dim {}",
            f.dim(),
            pencil.dim()
        )));
    }
    let grid_ = f.grid();
    let data = pencil_node_data(pencil, grid_)?;
    let n = grid_.len();
    let dim = pencil.dim();
    let spectrum = grid::fft(f);

    let mut u_hat = SpectralFunction::zeros(grid_, dim);
    let mut second_hat = SpectralFunction::zeros(grid_, dim);
    let mut first_hat = SpectralFunction::zeros(grid_, dim);
    let mut zeroth_hat = SpectralFunction::zeros(grid_, dim);
    let mut conv_hat = SpectralFunction::zeros(grid_, dim);

    let a_mat = pencil.zero_order();
    let b_mat = pencil.first_order();
    let p_mat = pencil.second_order();
    for r in 0..n {
        let tau = grid_.freq(r);
        let f_row: Vec<Complex64> = (0..dim).map(|c| spectrum.coefficients()[(r, c)]).collect();
        let u_row = linalg::mat_vec(&data.a[r], &f_row);
        let pu = linalg::mat_vec(p_mat, &u_row);
        let bu = linalg::mat_vec(b_mat, &u_row);
        let au = linalg::mat_vec(a_mat, &u_row);
        let cu = linalg::mat_vec(&data.chat[r], &u_row);
        let minus_tau2 = Complex64::new(-tau * tau, 0.0);
        let i_tau = Complex64::new(0.0, tau);
        for c in 0..dim {
            u_hat.coefficients_mut()[(r, c)] = u_row[c];
            second_hat.coefficients_mut()[(r, c)] = minus_tau2 * pu[c];
            first_hat.coefficients_mut()[(r, c)] = i_tau * bu[c];
            zeroth_hat.coefficients_mut()[(r, c)] = au[c];
            conv_hat.coefficients_mut()[(r, c)] = cu[c];
        }
    }

    let u = grid::ifft(&u_hat);
    let components = Components {
        second_order: grid::ifft(&second_hat),
        first_order: grid::ifft(&first_hat),
        zeroth: grid::ifft(&zeroth_hat),
        convolution: grid::ifft(&conv_hat),
    };
    let residual = f.sub(&components.sum())?;
    let (argmax, max) = data
        .condition
        .iter()
        .enumerate()
        .fold((0usize, 0.0f64), |(ai, am), (i, &v)| if v > am { (i, v) } else { (ai, am) });
    Ok(SolveResult {
        u,
        components,
        residual,
        condition: ConditionReport {
            max,
            argmax_tau: grid_.freq(argmax),
            per_node: data.condition,
            zero_node_averaged: data.zero_node_averaged,
        },
        forcing: f.clone(),
    })
}

/// Pointwise verification of the strong form of the equation.
#[derive(Debug, Clone, Copy)]
pub struct StrongSolutionReport {
    /// `sup |(P u')' + B u' + A u + c*u - f| / sup |f|`.
    pub residual_sup_rel: f64,
    /// Relative sup distance between `B u'` and the first-order component.
    pub first_order_agreement: f64,
    /// Relative sup distance between `(P u')'` and the second-order component.
    pub second_order_agreement: f64,
}

fn rel_sup(a: &GridFunction, b: &GridFunction) -> f64 {
    let diff = a.sub(b).expect("matching grids").max_abs();
    let scale = a.max_abs().max(b.max_abs());
    if scale == 0.0 {
        0.0
    } else {
        diff / scale
    }
}

/// Recomputes the equation summands from `u` by strong (spectral)
/// derivatives and compares against the solve components.
pub fn strong_solution_check(
    result: &SolveResult,
    pencil: &OperatorPencil,
) -> Result<StrongSolutionReport> {
    let u = &result.u;
    let grid_ = u.grid();
    let u_prime = grid::derivative(u);
    let first = u_prime.matrix_map(pencil.first_order())?;
    let second = grid::derivative(&u_prime.matrix_map(pencil.second_order())?);
    let zeroth = u.matrix_map(pencil.zero_order())?;
    // c * u directly as the multiplier c_hat(D) u
    let chat_nodes = pencil.convolution().symbol().node_values(grid_)?;
    let mut conv_hat = grid::fft(u);
    for r in 0..grid_.len() {
        let row: Vec<Complex64> = (0..u.dim()).map(|c| conv_hat.coefficients()[(r, c)]).collect();
        let out = linalg::mat_vec(&chat_nodes.values[r], &row);
        for c in 0..u.dim() {
            conv_hat.coefficients_mut()[(r, c)] = out[c];
        }
    }
    let convolution = grid::ifft(&conv_hat);
    let lhs = second
        .add(&first)?
        .add(&zeroth)?
        .add(&convolution)?;
    let residual = lhs.sub(&result.forcing)?;
    let scale = result.forcing.max_abs();
    let residual_sup_rel = if scale == 0.0 {
        residual.max_abs()
    } else {
        residual.max_abs() / scale
    };
    Ok(StrongSolutionReport {
        residual_sup_rel,
        first_order_agreement: rel_sup(&first, &result.components.first_order),
        second_order_agreement: rel_sup(&second, &result.components.second_order),
    })
}

/// A space in which maximal-regularity ratios are measured.
#[derive(Debug, Clone)]
pub enum EnrichedSpace {
    Base(SpaceDescriptor),
    Besov(SmoothnessParams),
    TriebelLizorkin(SmoothnessParams),
}

impl EnrichedSpace {
    pub fn label(&self) -> String {
        match self {
            EnrichedSpace::Base(s) => s.label(),
            EnrichedSpace::Besov(p) => {
                format!("B^({},{})_{}", p.s, q_label(p.q), p.space.label())
            }
            EnrichedSpace::TriebelLizorkin(p) => {
                format!("F^({},{})_{}", p.s, q_label(p.q), p.space.label())
            }
        }
    }

    pub fn norm(&self, bank: &DyadicFilterBank, f: &GridFunction) -> Result<f64> {
        match self {
            EnrichedSpace::Base(s) => spaces::norm(s, f),
            EnrichedSpace::Besov(p) => dyadic::besov_norm(bank, p, f),
            EnrichedSpace::TriebelLizorkin(p) => dyadic::triebel_lizorkin_norm(bank, p, f),
        }
    }

    fn plancherel_exact(&self) -> bool {
        matches!(self, EnrichedSpace::Base(SpaceDescriptor::Lp { p }) if *p == 2.0)
    }
}

fn q_label(q: f64) -> String {
    if q.is_infinite() {
        "inf".into()
    } else {
        format!("{q}")
    }
}

/// Ratio statistics for one component in one space.
#[derive(Debug, Clone)]
pub struct ComponentStats {
    pub component: &'static str,
    /// One ratio per bank element (`0` for vanishing elements).
    pub ratios: Vec<f64>,
    pub empirical_constant: f64,
    /// Plain `L^2` only: `sup_tau ||m(tau)||_2` of the component symbol,
    /// which must dominate the empirical constant.
    pub analytic_bound: Option<f64>,
    pub dominated: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct RegularityReport {
    pub space: String,
    pub components: Vec<ComponentStats>,
}

/// Sweeps `||component||_E / ||f||_E` over a bank for each requested space.
pub fn regularity_sweep(
    pencil: &OperatorPencil,
    spaces_list: &[EnrichedSpace],
    bank_elems: &[GridFunction],
    filter_bank: &DyadicFilterBank,
) -> Result<Vec<RegularityReport>> {
    if spaces_list.is_empty() {
        return Err(Error::InvalidArgument("regularity sweep needs at least one space".into()));
    }
    if bank_elems.is_empty() {
        return Err(Error::InvalidArgument("regularity sweep needs a nonempty bank".into()));
    }
    let grid_ = bank_elems[0].grid();
    let solved: Vec<SolveResult> = bank_elems
        .iter()
        .map(|f| solve(pencil, f))
        .collect::<Result<_>>()?;

    // symbol sup-norms over the nodes for the L^2 Plancherel bound
    let data = pencil_node_data(pencil, grid_)?;
    let mut bounds = [0.0f64; 4];
    for r in 0..grid_.len() {
        let tau = grid_.freq(r);
        let a = &data.a[r];
        let second = pencil.second_order().dot(a).mapv(|z| z * (-tau * tau));
        let first = pencil.first_order().dot(a).mapv(|z| z * Complex64::new(0.0, tau));
        let zeroth = pencil.zero_order().dot(a);
        let conv = data.chat[r].dot(a);
        for (slot, m) in bounds.iter_mut().zip([&second, &first, &zeroth, &conv]) {
            *slot = slot.max(linalg::op_norm_2(m));
        }
    }

    let mut reports = Vec::with_capacity(spaces_list.len());
    for space in spaces_list {
        let mut stats = Vec::with_capacity(4);
        for (ci, name) in ["second_order", "first_order", "zeroth", "convolution"]
            .into_iter()
            .enumerate()
        {
            let mut ratios = Vec::with_capacity(bank_elems.len());
            for (f, sol) in bank_elems.iter().zip(&solved) {
                let denom = space.norm(filter_bank, f)?;
                if denom == 0.0 {
                    ratios.push(0.0);
                    continue;
                }
                let comp = match ci {
                    0 => &sol.components.second_order,
                    1 => &sol.components.first_order,
                    2 => &sol.components.zeroth,
                    _ => &sol.components.convolution,
                };
                ratios.push(space.norm(filter_bank, comp)? / denom);
            }
            let empirical_constant = ratios.iter().copied().fold(0.0, f64::max);
            let (analytic_bound, dominated) = if space.plancherel_exact() {
                let b = bounds[ci];
                (Some(b), Some(empirical_constant <= b * (1.0 + 1e-8)))
            } else {
                (None, None)
            };
            stats.push(ComponentStats {
                component: name,
                ratios,
                empirical_constant,
                analytic_bound,
                dominated,
            });
        }
        reports.push(RegularityReport { space: space.label(), components: stats });
    }
    Ok(reports)
}

/// Solution of the pure convolution equation `c * u = f` with the two-sided
/// isomorphism norms.
#[derive(Debug, Clone)]
pub struct ConvolutionSolveResult {
    pub u: GridFunction,
    /// `||f||_{B^{s,q}}`.
    pub f_norm: f64,
    /// `||u||_{B^{s,q}}`.
    pub u_norm: f64,
    /// `||u||_{B^{s+1,q}}` (the gained smoothness).
    pub u_norm_lifted: f64,
}

/// Solves `c * u = f` for `c_hat(t) = i t c0_hat(t) + c1_hat(t)`.
pub fn solve_convolution(
    c0: &FrequencySymbol,
    c1: &FrequencySymbol,
    f: &GridFunction,
    params: &SmoothnessParams,
    filter_bank: &DyadicFilterBank,
) -> Result<ConvolutionSolveResult> {
    let chat = ConvolutionSymbol::decomposed(c0.clone(), c1.clone())?.symbol();
    if chat.cols() != f.dim() {
        return Err(Error::DimensionMismatch(format!(
            "convolution symbol is {}x{}, forcing has dim {}",
            chat.rows(),
            chat.cols(),
            f.dim()
        )));
    }
    let grid_ = f.grid();
    let nodes = chat.node_values(grid_)?;
    let spectrum = grid::fft(f);
    let mut u_hat = SpectralFunction::zeros(grid_, f.dim());
    for r in 0..grid_.len() {
        let tau = grid_.freq(r);
        let inv = match linalg::inverse(&nodes.values[r]) {
            Some(inv) => {
                let cond = linalg::condition_estimate(&nodes.values[r], &inv);
                if cond > 1e12 {
                    return Err(Error::SingularAtNode { tau, cond });
                }
                inv
            }
            None => return Err(Error::SingularAtNode { tau, cond: f64::INFINITY }),
        };
        let row: Vec<Complex64> = (0..f.dim()).map(|c| spectrum.coefficients()[(r, c)]).collect();
        let out = linalg::mat_vec(&inv, &row);
        for c in 0..f.dim() {
            u_hat.coefficients_mut()[(r, c)] = out[c];
        }
    }
    let u = grid::ifft(&u_hat);
    let lifted = SmoothnessParams::new(params.s + 1.0, params.q, params.space.clone())?;
    Ok(ConvolutionSolveResult {
        f_norm: dyadic::besov_norm(filter_bank, params, f)?,
        u_norm: dyadic::besov_norm(filter_bank, params, &u)?,
        u_norm_lifted: dyadic::besov_norm(filter_bank, &lifted, &u)?,
        u,
    })
}

/// Consistency record: the constructed weight admits `f`, and the solve path
/// does not depend on which space the forcing is regarded in.
#[derive(Debug, Clone)]
pub struct WeightedConsistencyReport {
    pub base_norm: f64,
    pub weighted_norm: f64,
    pub ap_constant: f64,
    pub kappa: f64,
    pub kappa_dual: f64,
    /// Byte-for-byte equality of the two solve runs.
    pub solutions_bit_identical: bool,
}

/// Builds `w = (R |f|_X)^(1-p) R' h` with `h = 1_[0,1]`, `p = 2`, verifies
/// the weighted norm of `f` is finite, and checks that solving is bit-exactly
/// the same however the forcing's space is labelled.
pub fn weighted_consistency_check(
    pencil: &OperatorPencil,
    f: &GridFunction,
    space: &SpaceDescriptor,
) -> Result<WeightedConsistencyReport> {
    let grid_ = f.grid();
    let cfg = MaximalConfig::dyadic(grid_);
    let mut g = GridFunction::zeros(grid_, 1);
    for (j, m) in f.magnitudes().into_iter().enumerate() {
        g.samples_mut()[(j, 0)] = Complex64::new(m, 0.0);
    }
    let h = GridFunction::from_scalar_fn(grid_, |t| {
        if (0.0..=1.0).contains(&t) {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::default()
        }
    });
    let build = spaces::build_weight(&g, &h, 2.0, space, spaces::DEFAULT_RUBIO_DEPTH, &cfg)?;
    let weighted = SpaceDescriptor::weighted_lp(2.0, build.weight.clone())?;
    let weighted_norm = spaces::norm(&weighted, f)?;
    if !weighted_norm.is_finite() {
        return Err(Error::InvalidArgument(
            "constructed weight does not admit the forcing".into(),
        ));
    }
    let first = solve(pencil, f)?;
    let second = solve(pencil, f)?;
    Ok(WeightedConsistencyReport {
        base_norm: spaces::norm(space, f)?,
        weighted_norm,
        ap_constant: spaces::ap_constant(&build.weight, 2.0),
        kappa: build.kappa,
        kappa_dual: build.kappa_dual,
        solutions_bit_identical: first.u.samples() == second.u.samples(),
    })
}
