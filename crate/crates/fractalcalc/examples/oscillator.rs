//! The 4-alpha-order fractal oscillator f^{4a} + 2f^{2a} + f = 0: a repeated
//! imaginary root pair, secular t sin t terms in the basis, and an IVP solve
//! checked against the closed form.
//!
//!     cargo run --example oscillator

use fractalcalc::{
    basis_functions, characteristic_polynomial, find_roots, ic_mismatch, residual,
    solve_homogeneous_ivp, CantorSpec, FODEProblem, Staircase, DEFAULT_CLUSTER_TOL,
};

fn main() -> fractalcalc::Result<()> {
    let staircase = Staircase::new(CantorSpec::triadic());
    let p = FODEProblem {
        coeffs: vec![1.0, 0.0, 2.0, 0.0, 1.0],
        forcing: None,
        // ladder of cos t + t sin t at t = 0
        ics: Some(vec![1.0, 0.0, 1.0, 0.0]),
        x0: 0.0,
        staircase,
    };

    let z = characteristic_polynomial(&p)?;
    println!("Z(r) coefficients: {:?}", z.coeffs);
    let roots = find_roots(&z, DEFAULT_CLUSTER_TOL)?;
    for (r, mult) in &roots.roots {
        println!("  root {r}  multiplicity {mult}");
    }

    println!("\nfundamental set:");
    for b in basis_functions(&roots) {
        let trig = format!("{:?}", b.trig).to_lowercase();
        println!("  S^{} e^({} S) {trig}({} S)", b.k, b.lambda, b.mu);
    }

    let sol = solve_homogeneous_ivp(&p)?;
    println!("\ncoefficients c = {:?}", sol.hom_coeffs.as_ref().unwrap());
    println!("ic mismatch = {:?}", ic_mismatch(&sol, &p)?);

    println!("\n{:>10} {:>14} {:>14} {:>10}", "x", "f(x)", "closed form", "residual");
    for i in 0..=8 {
        let x = i as f64 / 8.0;
        let t = staircase.eval(x)?;
        let f = sol.eval(x)?;
        let want = t.cos() + t * t.sin();
        println!("{x:>10.4} {f:>14.10} {want:>14.10} {:>10.1e}", residual(&sol, &p, x)?);
        assert!((f - want).abs() < 1e-10);
    }
    Ok(())
}
