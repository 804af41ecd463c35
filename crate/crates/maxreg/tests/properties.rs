//! Property-based invariants of the substrate and the space machinery, plus
//! the bank-sweep invariants that do not fit a single oracle value.

use num_complex::Complex64;
use proptest::prelude::*;

use maxreg::bank;
use maxreg::dyadic::{self, DyadicFilterBank, SmoothnessParams};
use maxreg::grid::{self, Grid, GridFunction};
use maxreg::spaces::{self, MaximalConfig, SpaceDescriptor};
use maxreg::symbols::{
    invert_symbol, mihlin_constant, pencil_symbol, ConvolutionSymbol, MihlinFlavor,
    MihlinOptions, OperatorPencil, SymbolDomain,
};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn small_grid() -> Grid {
    Grid::new(8.0, 64).unwrap()
}

fn samples_strategy(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    proptest::collection::vec((-10.0..10.0f64, -10.0..10.0f64), n)
}

fn to_function(grid: Grid, values: &[(f64, f64)]) -> GridFunction {
    let mut f = GridFunction::zeros(grid, 1);
    for (j, (re, im)) in values.iter().enumerate() {
        f.samples_mut()[(j, 0)] = c(*re, *im);
    }
    f
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fft_roundtrip_is_identity(values in samples_strategy(64)) {
        let grid = small_grid();
        let f = to_function(grid, &values);
        let back = grid::ifft(&grid::fft(&f));
        let err = back.sub(&f).unwrap().max_abs();
        prop_assert!(err <= 1e-12 * f.max_abs().max(1.0));
    }

    #[test]
    fn plancherel_identity(values in samples_strategy(64)) {
        let grid = small_grid();
        let f = to_function(grid, &values);
        let lhs = grid::l2_norm(&f).powi(2);
        let spec = grid::fft(&f);
        let rhs = spec.coefficients().iter().map(|z| z.norm_sqr()).sum::<f64>()
            * (std::f64::consts::PI / grid.half_length())
            / (2.0 * std::f64::consts::PI);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.max(1e-12));
    }

    #[test]
    fn norms_have_ideal_property(values in samples_strategy(64), p in 1.1..5.0f64) {
        let grid = small_grid();
        let f = to_function(grid, &values);
        // g dominates f pointwise
        let mut g = GridFunction::zeros(grid, 1);
        for (j, m) in f.magnitudes().into_iter().enumerate() {
            g.samples_mut()[(j, 0)] = c(m + 0.25, 0.0);
        }
        for space in [
            SpaceDescriptor::lp(p).unwrap(),
            SpaceDescriptor::lorentz_weak(p).unwrap(),
        ] {
            let nf = spaces::norm(&space, &f).unwrap();
            let ng = spaces::norm(&space, &g).unwrap();
            prop_assert!(nf <= ng * (1.0 + 1e-12));
        }
    }

    #[test]
    fn maximal_is_sublinear_and_homogeneous(
        values_f in samples_strategy(64),
        values_g in samples_strategy(64),
        scale in -4.0..4.0f64,
    ) {
        let grid = small_grid();
        let cfg = MaximalConfig::dyadic(grid);
        let f = to_function(grid, &values_f);
        let g = to_function(grid, &values_g);
        let mf = spaces::maximal(&f, &cfg).unwrap();
        let mg = spaces::maximal(&g, &cfg).unwrap();
        let m_sum = spaces::maximal(&f.add(&g).unwrap(), &cfg).unwrap();
        for j in 0..grid.len() {
            let lhs = m_sum.samples()[(j, 0)].re;
            let rhs = mf.samples()[(j, 0)].re + mg.samples()[(j, 0)].re;
            prop_assert!(lhs <= rhs + 1e-10);
        }
        let m_scaled = spaces::maximal(&f.scaled(c(scale, 0.0)), &cfg).unwrap();
        for j in 0..grid.len() {
            let lhs = m_scaled.samples()[(j, 0)].re;
            let rhs = scale.abs() * mf.samples()[(j, 0)].re;
            prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(1.0));
        }
    }

    #[test]
    fn iteration_is_monotone(values in samples_strategy(64), bump in 0.0..3.0f64) {
        let grid = small_grid();
        let cfg = MaximalConfig::dyadic(grid);
        let g1 = {
            let mut g = GridFunction::zeros(grid, 1);
            for (j, (re, _)) in values.iter().enumerate() {
                g.samples_mut()[(j, 0)] = c(re.abs(), 0.0);
            }
            g
        };
        let g2 = {
            let mut g = GridFunction::zeros(grid, 1);
            for (j, (re, _)) in values.iter().enumerate() {
                g.samples_mut()[(j, 0)] = c(re.abs() + bump, 0.0);
            }
            g
        };
        let r1 = spaces::rubio_iterate(&g1, 4.0, 12, &cfg).unwrap();
        let r2 = spaces::rubio_iterate(&g2, 4.0, 12, &cfg).unwrap();
        for j in 0..grid.len() {
            prop_assert!(r1.samples()[(j, 0)].re <= r2.samples()[(j, 0)].re + 1e-10);
        }
    }

    #[test]
    fn besov_norm_is_absolutely_homogeneous(
        values in samples_strategy(64),
        re in -3.0..3.0f64,
        im in -3.0..3.0f64,
    ) {
        let grid = small_grid();
        let filter_bank = DyadicFilterBank::for_grid(grid).unwrap();
        let params = SmoothnessParams::new(0.7, 2.0, SpaceDescriptor::lp(2.0).unwrap()).unwrap();
        let f = to_function(grid, &values);
        let base = dyadic::besov_norm(&filter_bank, &params, &f).unwrap();
        let scaled = dyadic::besov_norm(&filter_bank, &params, &f.scaled(c(re, im))).unwrap();
        let expected = c(re, im).norm() * base;
        prop_assert!((scaled - expected).abs() <= 1e-10 * expected.max(1e-9));
    }
}

#[test]
fn uniform_block_bounds_are_stable_under_refinement() {
    // sup_j ||psi_j(D) f|| / ||f|| admits one constant per space, stable in N
    let coarse = Grid::new(64.0, 1024).unwrap();
    let fine = Grid::new(64.0, 2048).unwrap();
    let band = coarse.nyquist() / 2.0;
    for p in [1.5f64, 2.0, 3.0] {
        let space = SpaceDescriptor::lp(p).unwrap();
        let mut constants = Vec::new();
        for g in [coarse, fine] {
            let filter_bank = DyadicFilterBank::for_grid(g).unwrap();
            let elems = bank::standard_bank_banded(g, 1, 17, 30, band);
            let mut worst = 0.0f64;
            for f in &elems {
                let denom = spaces::norm(&space, f).unwrap();
                if denom == 0.0 {
                    continue;
                }
                for j in 0..=filter_bank.max_level() {
                    let block = dyadic::dyadic_block(&filter_bank, j, f).unwrap();
                    worst = worst.max(spaces::norm(&space, &block).unwrap() / denom);
                }
            }
            assert!(worst.is_finite() && worst > 0.0);
            constants.push(worst);
        }
        let drift = (constants[1] / constants[0] - 1.0).abs();
        assert!(
            drift <= 0.1,
            "p = {p}: block bound drifted by {drift} ({constants:?})"
        );
    }
}

#[test]
fn embedding_into_weighted_l2_by_hoelder_chain() {
    // ||f||^p_{L^p_w} <= ||R |f|_X||_Phi ||R' h||_Phi' for w = (R|f|)^(1-p) R'h
    let grid = Grid::new(64.0, 1024).unwrap();
    let cfg = MaximalConfig::dyadic(grid);
    let phi = SpaceDescriptor::lp(3.0).unwrap();
    let phi_dual = phi.dual().unwrap();
    let kappa = spaces::maximal_norm_bound(&phi).unwrap();
    let kappa_dual = spaces::maximal_norm_bound(&phi_dual).unwrap();
    let h = GridFunction::from_scalar_fn(grid, |t| {
        if (0.0..=1.0).contains(&t) {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    let elems = bank::standard_bank(grid, 1, 23, 12);
    for p in [2.0f64, 3.0] {
        for f in &elems {
            let mut g = GridFunction::zeros(grid, 1);
            for (j, m) in f.magnitudes().into_iter().enumerate() {
                g.samples_mut()[(j, 0)] = c(m, 0.0);
            }
            if g.is_zero() {
                continue;
            }
            let rg = spaces::rubio_iterate(&g, kappa, 40, &cfg).unwrap();
            let rh = spaces::rubio_iterate(&h, kappa_dual, 40, &cfg).unwrap();
            let build =
                spaces::build_weight_with_bounds(&g, &h, p, kappa, kappa_dual, 40, &cfg).unwrap();
            let weighted = SpaceDescriptor::weighted_lp(p, build.weight).unwrap();
            let lhs = spaces::norm(&weighted, f).unwrap().powf(p);
            let rhs = spaces::norm(&phi, &rg).unwrap() * spaces::norm(&phi_dual, &rh).unwrap();
            assert!(lhs <= rhs * 1.01, "p = {p}: {lhs} vs {rhs}");
        }
    }
}

#[test]
fn iteration_norm_bound_on_both_sides_of_the_bank() {
    // ||R g||_Phi <= 2 ||g||_Phi and ||R' h||_Phi' <= 2 ||h||_Phi'
    let grid = Grid::new(64.0, 1024).unwrap();
    let cfg = MaximalConfig::dyadic(grid);
    let phi = SpaceDescriptor::lp(3.0).unwrap();
    let phi_dual = phi.dual().unwrap();
    let kappa = spaces::maximal_norm_bound(&phi).unwrap();
    let kappa_dual = spaces::maximal_norm_bound(&phi_dual).unwrap();
    for (g, h) in bank::weight_pair_bank(grid, 50, 61) {
        let rg = spaces::rubio_iterate(&g, kappa, 40, &cfg).unwrap();
        assert!(
            spaces::norm(&phi, &rg).unwrap() <= 2.0 * spaces::norm(&phi, &g).unwrap()
        );
        let rh = spaces::rubio_iterate(&h, kappa_dual, 40, &cfg).unwrap();
        assert!(
            spaces::norm(&phi_dual, &rh).unwrap()
                <= 2.0 * spaces::norm(&phi_dual, &h).unwrap()
        );
    }
}

#[test]
fn besov_regularity_ratios_are_stable_under_refinement() {
    // E = B^{1,1}_{L^2}: the empirical component constants move by < 10%
    // when the same smooth bank is re-sampled on a doubled grid
    let coarse = Grid::new(64.0, 1024).unwrap();
    let fine = Grid::new(64.0, 2048).unwrap();
    let band = coarse.nyquist() / 2.0;
    let pencil = OperatorPencil::scalar(c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
    let space = maxreg::solver::EnrichedSpace::Besov(
        SmoothnessParams::new(1.0, 1.0, SpaceDescriptor::lp(2.0).unwrap()).unwrap(),
    );
    let mut per_grid: Vec<Vec<f64>> = Vec::new();
    for g in [coarse, fine] {
        let filter_bank = DyadicFilterBank::for_grid(g).unwrap();
        let elems = bank::standard_bank_banded(g, 1, 5, 25, band);
        let reports = maxreg::solver::regularity_sweep(
            &pencil,
            std::slice::from_ref(&space),
            &elems,
            &filter_bank,
        )
        .unwrap();
        per_grid.push(
            reports[0]
                .components
                .iter()
                .map(|s| s.empirical_constant)
                .collect(),
        );
    }
    for (i, (c0, c1)) in per_grid[0].iter().zip(&per_grid[1]).enumerate() {
        if *c0 == 0.0 {
            assert_eq!(*c1, 0.0);
            continue;
        }
        let drift = (c1 / c0 - 1.0).abs();
        assert!(drift <= 0.1, "component {i}: drift {drift} ({c0} -> {c1})");
    }
}

#[test]
fn mihlin_condition_propagates_to_solution_symbols() {
    // memory-kind pencils with an everywhere-invertible symbol produce
    // finite inhomogeneous certificates for a, a0, a1
    use ndarray::Array2;
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(29);
    let grid = Grid::new(64.0, 512).unwrap();
    let opts = MihlinOptions::coarse();
    let mut tested = 0;
    for _ in 0..12 {
        let n = 2;
        let mut random_matrix = |scale: f64| {
            let mut m: ndarray::Array2<Complex64> = Array2::zeros((n, n));
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale;
                }
            }
            m
        };
        let mut a_mat = random_matrix(1.0);
        for d in 0..n {
            a_mat[(d, d)] += c(3.0, 0.0);
        }
        let pencil = OperatorPencil::new(
            a_mat,
            random_matrix(1.0),
            random_matrix(1.0),
            ConvolutionSymbol::memory(1.0, random_matrix(0.3)).unwrap(),
        )
        .unwrap();
        if maxreg::solver::pencil_node_data(&pencil, grid).is_err() {
            continue;
        }
        let a = invert_symbol(&pencil_symbol(&pencil), SymbolDomain::WholeLine);
        let comps = maxreg::symbols::companion_symbols(&pencil, &a);
        for (name, sym) in [("a", &a), ("a0", &comps.a0), ("a1", &comps.a1)] {
            let cert = mihlin_constant(sym, 2, MihlinFlavor::Inhomogeneous, &opts);
            assert!(
                cert.is_ok(),
                "{name}: certificate failed: {:?}",
                cert.err()
            );
            assert!(cert.unwrap().constant.is_finite());
        }
        tested += 1;
    }
    assert!(tested >= 6, "too few invertible pencils: {tested}");
}
