//! The coarse-grained mass of the triadic set at shrinking resolution, and
//! the limiting mass function it converges to.
//!
//!     cargo run --example coarse_mass

use fractalcalc::CantorSpec;

fn main() -> fractalcalc::Result<()> {
    let c = CantorSpec::triadic();
    let alpha = c.alpha();

    // at alpha = dim F the infimum covers align with the construction and
    // gamma_delta settles to Gamma(alpha+1)
    println!("gamma_delta^alpha(F, 0, 1) at alpha = ln2/ln3:");
    for k in [2, 4, 6, 8, 10, 12] {
        let delta = 3f64.powi(-k);
        println!("  delta = 3^-{k:<2}  {:.12}", c.coarse_mass(0.0, 1.0, alpha, delta)?);
    }

    let m = c.mass(0.0, 1.0, alpha, 1e-9)?;
    println!(
        "mass function limit: {:.12} (converged: {}, {} levels)",
        m.value, m.converged, m.levels
    );

    // off the critical order the limit is degenerate
    let lo = c.mass(0.0, 1.0, alpha - 0.05, 1e-9)?;
    let hi = c.mass(0.0, 1.0, alpha + 0.05, 1e-9)?;
    println!("alpha - 0.05: value {:.3e}, converged {}", lo.value, lo.converged);
    println!("alpha + 0.05: value {:.3e}, converged {}", hi.value, hi.converged);

    // sub-interval masses add up across a construction cut
    let cut = 1.0 / 3.0;
    let left = c.mass(0.0, cut, alpha, 1e-9)?.value;
    let right = c.mass(cut, 1.0, alpha, 1e-9)?.value;
    let whole = c.mass(0.0, 1.0, alpha, 1e-9)?.value;
    println!("\nadditivity: {left:.10} + {right:.10} = {:.10} vs {whole:.10}", left + right);
    Ok(())
}
