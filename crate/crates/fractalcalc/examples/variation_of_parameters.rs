//! Variation of parameters for a forcing with no closed atom form:
//! f^{3a} - f^{2a} - f^{a} + f = e^S / S^2. The rates u_m' come from the
//! Cramer system on the Wronskian and are integrated in the staircase
//! coordinate; the particular term is quadrature-backed.
//!
//!     cargo run --release --example variation_of_parameters

use fractalcalc::{residual, solve, CantorSpec, FODEProblem, ForcingTerm, Staircase};

fn main() -> fractalcalc::Result<()> {
    let staircase = Staircase::new(CantorSpec::triadic());

    // the forcing is singular at S = 0, so anchor the problem at the first
    // level-6 construction point whose staircase value clears it
    let x0 = staircase
        .spec
        .level_points(6)
        .into_iter()
        .find(|&x| staircase.eval(x).is_ok_and(|t| t > 0.01))
        .unwrap();
    println!("anchor x0 = {x0:.12}, S(x0) = {:.12}", staircase.eval(x0)?);

    let p = FODEProblem {
        coeffs: vec![1.0, -1.0, -1.0, 1.0],
        forcing: Some(ForcingTerm::custom(|t: f64| t.exp() / (t * t), 1e-6)),
        ics: Some(vec![0.0, 0.0, 0.0]),
        x0,
        staircase,
    };
    let sol = solve(&p)?;

    println!("basis: {:?}", sol.basis);
    println!("homogeneous coefficients: {:?}\n", sol.hom_coeffs.as_ref().unwrap());

    println!("{:>10} {:>12} {:>16} {:>10}", "x", "S(x)", "f(x)", "residual");
    for i in 1..=8 {
        let x = i as f64 / 9.0;
        if !staircase.spec.contains(x, 8) {
            continue;
        }
        let t = staircase.eval(x)?;
        println!("{x:>10.4} {t:>12.8} {:>16.10} {:>10.1e}", sol.eval(x)?, residual(&sol, &p, x)?);
    }

    // evaluating below the singularity guard is refused rather than wrong
    let before = staircase.pseudoinverse(1e-7)?;
    println!("\neval at S = 1e-7: {:?}", sol.eval(before).unwrap_err());
    Ok(())
}
