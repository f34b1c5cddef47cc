//! Two coupled unit masses in fractal time. Eliminating the second mass
//! turns the pair of 2-alpha-order equations into one 4-alpha-order equation
//! u1^{4a} + 7 u1^{2a} + 6 u1 = 0 whose characteristic quartic factors into
//! (r^2 + 1)(r^2 + 6): normal modes at frequencies 1 and sqrt 6.
//!
//!     cargo run --example spring_mass

use fractalcalc::{
    run_demo, solve_homogeneous_ivp, CantorSpec, DemoName, FODEProblem, Staircase,
};

fn main() -> fractalcalc::Result<()> {
    let spec = CantorSpec::triadic();
    let staircase = Staircase::new(spec);
    let (k1, k2) = (3.0, 2.0);

    // slow mode: both masses swing together, the outer one twice as far
    let p = FODEProblem {
        coeffs: vec![1.0, 0.0, k1 + 2.0 * k2, 0.0, k1 * k2],
        forcing: None,
        ics: Some(vec![1.0, 0.0, -1.0, 0.0]),
        x0: 0.0,
        staircase,
    };
    let sol = solve_homogeneous_ivp(&p)?;
    let u1 = sol.homogeneous_sum();
    let u2 = u1.apply_operator(&[1.0, 0.0, k1 + k2]).scaled(1.0 / k2);

    println!("{:>8} {:>12} {:>12} {:>12}", "x", "S", "u1", "u2");
    for i in 0..=9 {
        let x = i as f64 / 9.0;
        let t = staircase.eval(x)?;
        println!("{x:>8.3} {t:>12.8} {:>12.8} {:>12.8}", u1.eval(t), u2.eval(t));
    }

    // the eliminated second equation u2^{2a} + k2 u2 = k2 u1 must hold too
    let coupling = u2.apply_operator(&[1.0, 0.0, k2]).add(&u1.scaled(-k2));
    let worst = (0..=20)
        .map(|i| coupling.eval(staircase.eval(i as f64 / 20.0).unwrap()).abs())
        .fold(0.0, f64::max);
    println!("\ncoupling residual across the grid: {worst:.2e}");

    // the demo wrapper runs both normal modes and reports the deviations
    let rep = run_demo(DemoName::SpringMass, spec, 32)?;
    println!("demo: max deviation {:.2e}, max residual {:.2e}", rep.max_deviation, rep.max_residual);
    Ok(())
}
