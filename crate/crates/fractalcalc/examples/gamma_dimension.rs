//! Estimate the gamma-dimension of a few self-similar sets by bisecting on
//! the order alpha: the coarse-grained mass blows up below the dimension and
//! dies above it.
//!
//!     cargo run --release --example gamma_dimension

use fractalcalc::CantorSpec;

fn main() -> fractalcalc::Result<()> {
    println!("{:>14} {:>14} {:>14} {:>10}", "set", "estimate", "ln m/ln(1/r)", "error");
    for (label, m, r) in [
        ("m=2, r=1/3", 2, 1.0 / 3.0),
        ("m=2, r=1/4", 2, 0.25),
        ("m=2, r=1/5", 2, 0.2),
        ("m=3, r=1/5", 3, 0.2),
    ] {
        let spec = CantorSpec::new(0.0, 1.0, m, r)?;
        let est = spec.gamma_dimension(0.0, 1.0)?;
        let exact = (m as f64).ln() / (1.0 / r).ln();
        println!("{label:>14} {est:>14.10} {exact:>14.10} {:>10.1e}", (est - exact).abs());
    }

    // degenerate check: an interval is 1-dimensional
    let full = CantorSpec::full_interval(0.0, 1.0)?;
    println!("{:>14} {:>14.10}", "full [0,1]", full.gamma_dimension(0.0, 1.0)?);

    // the dichotomy behind the estimate, shown on the triadic set
    let c = CantorSpec::triadic();
    let alpha = c.alpha();
    println!("\nmass iterates at fixed delta = 3^-10:");
    let delta = 3f64.powi(-10);
    for a in [alpha - 0.1, alpha, alpha + 0.1] {
        let g = c.coarse_mass(0.0, 1.0, a, delta)?;
        println!("  alpha = {a:.4}: gamma_delta = {g:.6e}");
    }
    Ok(())
}
