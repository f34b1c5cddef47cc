//! F-alpha integration: Riemann-Stieltjes sums against the staircase,
//! bracketing bounds for monotone integrands, and the fundamental theorem.
//!
//!     cargo run --release --example fractal_integral

use fractalcalc::{
    conjugate_lift, f_alpha_derivative, f_alpha_integral, f_alpha_integral_bounds, CantorSpec,
    DerivativeConfig, FractalFn, Staircase,
};

fn main() -> fractalcalc::Result<()> {
    let s = Staircase::new(CantorSpec::triadic());

    // the characteristic function of F integrates to the total mass
    let one = FractalFn::raw(s, |_| 1.0);
    println!("integral of 1 dS over [0,1] = {:.15}", f_alpha_integral(&one, 0.0, 1.0, 1 << 12)?);
    println!("S(1)                       = {:.15}", s.total());

    // substitution u = S(x) turns conjugates into classical integrals:
    // integral of S dS = S(1)^2 / 2
    let f = conjugate_lift(|t: f64| t, s);
    let got = f_alpha_integral(&f, 0.0, 1.0, 1 << 12)?;
    let want = s.total() * s.total() / 2.0;
    println!("\nintegral of S dS = {got:.15} vs {want:.15}");

    // midpoint cells converge at second order
    println!("\nconvergence of integral of e^S dS:");
    let g = conjugate_lift(|t: f64| t.exp(), s);
    let exact = s.total().exp() - 1.0;
    let mut prev_err = None;
    for k in [4, 6, 8, 10, 12] {
        let err = (f_alpha_integral(&g, 0.0, 1.0, 1 << k)? - exact).abs();
        match prev_err {
            Some(p) => println!("  n = 2^{k:<2}  err = {err:.3e}  ratio {:.1}", p / err),
            None => println!("  n = 2^{k:<2}  err = {err:.3e}"),
        }
        prev_err = Some(err);
    }

    // monotone integrands come with rigorous lower/upper sums
    let (lo, hi) = f_alpha_integral_bounds(&g, 0.0, 1.0, 1 << 10)?;
    println!("\nbracket: [{lo:.10}, {hi:.10}], width {:.2e}", hi - lo);
    assert!(lo <= exact && exact <= hi);

    // fundamental theorem: differentiate the cumulative integral back
    let cum = FractalFn::raw(s, move |x| {
        f_alpha_integral(&conjugate_lift(|t: f64| t.exp(), s), 0.0, x, 1 << 10).unwrap()
    });
    let cfg = DerivativeConfig { k_max: Some(12), ..DerivativeConfig::default() };
    let x = 1.0 / 3.0;
    let d = f_alpha_derivative(&cum, x, &cfg)?;
    println!("\nD^alpha of the cumulative integral at {x:.4}: {d:.8} vs e^S = {:.8}", s.eval(x)?.exp());
    Ok(())
}
