//! F-alpha derivatives through the staircase conjugacy: lift a classical
//! g(t) to f(x) = g(S(x)) and differentiate with respect to the set.
//!
//!     cargo run --release --example fractal_derivative

use fractalcalc::{
    conjugate_lift, f_alpha_derivative, CantorSpec, DerivativeConfig, FractalFn, Staircase,
};

fn main() -> fractalcalc::Result<()> {
    let s = Staircase::new(CantorSpec::triadic());
    let cfg = DerivativeConfig::default();

    // the staircase itself is the fractal identity: D S = 1 on F
    let ident = FractalFn::raw(s, move |x| s.eval(x).unwrap());
    println!("D^alpha S at construction points (want 1):");
    for &x in &[1.0 / 3.0, 2.0 / 9.0, 2.0 / 3.0, 1.0] {
        println!("  x = {x:.6}: {:.12}", f_alpha_derivative(&ident, x, &cfg)?);
    }

    // conjugate functions differentiate by the chain rule with dS/dS = 1,
    // so D^alpha g(S) = g'(S)
    let f = conjugate_lift(|t: f64| t.exp(), s);
    println!("\nD^alpha e^S vs e^S:");
    for &x in &[1.0 / 9.0, 1.0 / 3.0, 2.0 / 3.0, 8.0 / 9.0] {
        let d = f_alpha_derivative(&f, x, &cfg)?;
        let want = s.eval(x)?.exp();
        println!("  x = {x:.6}: {d:.12} (err {:.1e})", (d - want).abs());
    }

    // off the set the derivative is zero by convention: nothing changes there
    let off = 0.5;
    println!("\nD^alpha e^S at x = {off} (in a gap): {}", f_alpha_derivative(&f, off, &cfg)?);

    // second derivative by iterating, stopping the probe ladder early so the
    // inner call's noise is not amplified away
    let inner_cfg = DerivativeConfig { k_max: Some(12), ..DerivativeConfig::default() };
    let d1 = FractalFn::raw(s, move |x| {
        f_alpha_derivative(&conjugate_lift(|t: f64| t.exp(), s), x, &inner_cfg).unwrap()
    });
    let x = 2.0 / 3.0;
    let d2 = f_alpha_derivative(&d1, x, &inner_cfg)?;
    println!("\nD^2alpha e^S at x = {x:.4}: {d2:.10} vs {:.10}", s.eval(x)?.exp());
    Ok(())
}
