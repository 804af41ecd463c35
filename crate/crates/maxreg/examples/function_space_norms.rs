//! Space descriptors in action: Lebesgue, weighted, and weak-Lorentz norms,
//! the discrete maximal function, and the Hoelder pairing with the dual.

use maxreg::grid::{Grid, GridFunction};
use maxreg::spaces::{maximal, norm, pairing, MaximalConfig, SpaceDescriptor, Weight};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn main() -> maxreg::Result<()> {
    let grid = Grid::new(64.0, 2048)?;

    // |t|^(-1/2) near the origin: weak-L2 sees sqrt(2), L2 diverges slowly
    let f = GridFunction::from_scalar_fn(grid, |t| {
        if t != 0.0 && t.abs() <= 1.0 {
            c(t.abs().powf(-0.5), 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    println!("f(t) = |t|^(-1/2) on 0 < |t| <= 1:");
    for space in [
        SpaceDescriptor::lp(1.5)?,
        SpaceDescriptor::lp(2.0)?,
        SpaceDescriptor::lorentz_weak(2.0)?,
    ] {
        println!("  ||f||_{:<12} = {:.6}", space.label(), norm(&space, &f)?);
    }
    println!("  (weak-L2 oracle: sqrt(2) = {:.6})", 2f64.sqrt());

    // weighted norms against a Muckenhoupt-type weight
    let w = Weight::from_fn(grid, "max(|t|,h)^(1/2)", |t| {
        t.abs().max(grid.spacing()).sqrt()
    })?;
    let weighted = SpaceDescriptor::weighted_lp(2.0, w)?;
    println!("  ||f||_{:<12} = {:.6}", weighted.label(), norm(&weighted, &f)?);

    // maximal function of an indicator decays like 1/t
    let g = GridFunction::from_scalar_fn(grid, |t| {
        if (0.0..=1.0).contains(&t) {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    let m = maximal(&g, &MaximalConfig::dyadic(grid))?;
    println!("\nM(indicator of [0,1]) at selected nodes:");
    for t in [0.5f64, 2.0, 4.0, 8.0, 16.0] {
        let j = ((t + grid.half_length()) / grid.spacing()).round() as usize;
        println!("  M f({t:>5.1}) = {:.4}  (1/t = {:.4})", m.samples()[(j, 0)].re, 1.0 / t);
    }

    // Hoelder: |<f, g>| <= ||f||_Phi ||g||_Phi'
    let phi = SpaceDescriptor::lp(3.0)?;
    let dual = phi.dual()?;
    let lhs = pairing(&g, &f)?.norm();
    let rhs = norm(&phi, &g)? * norm(&dual, &f)?;
    println!("\nHoelder check on {} and its dual {}:", phi.label(), dual.label());
    println!("  |<g, f>| = {lhs:.6} <= {rhs:.6} = ||g|| ||f||");
    Ok(())
}
