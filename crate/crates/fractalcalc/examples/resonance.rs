//! Undetermined coefficients under full resonance: the forcing 4e^S of
//! (D - 1)^3 f = 4e^S sits on a triple characteristic root, so the ansatz
//! climbs to A S^3 e^S and the match gives 6A = 4.
//!
//!     cargo run --example resonance

use fractalcalc::{
    find_roots, solve, undetermined_coefficients, CantorSpec, CharPolynomial, FODEProblem,
    ForcingAtom, ForcingTerm, Staircase, Trig, DEFAULT_CLUSTER_TOL,
};

fn main() -> fractalcalc::Result<()> {
    let staircase = Staircase::new(CantorSpec::triadic());
    let p = FODEProblem {
        coeffs: vec![1.0, -3.0, 3.0, -1.0],
        forcing: Some(ForcingTerm::atoms(vec![ForcingAtom {
            poly: vec![4.0],
            lambda: 1.0,
            mu: 0.0,
            trig: Trig::None,
        }])),
        ics: Some(vec![0.0, 0.0, 0.0]),
        x0: 0.0,
        staircase,
    };

    let roots = find_roots(&CharPolynomial { coeffs: p.coeffs.clone() }, DEFAULT_CLUSTER_TOL)?;
    println!("characteristic roots: {:?}", roots.roots);

    let particular = undetermined_coefficients(&p)?;
    println!("particular term sum: {:?}", particular.terms);
    let a = particular.terms[0].coeff;
    println!("resonant amplitude A = {a}  (want 2/3, err {:.1e})", (a - 2.0 / 3.0).abs());

    // with zero initial data the particular term is the whole solution
    let sol = solve(&p)?;
    println!("\nhomogeneous coefficients: {:?}", sol.hom_coeffs.as_ref().unwrap());
    for i in [2, 5, 8] {
        let x = i as f64 / 9.0;
        let t = staircase.eval(x)?;
        let want = 2.0 / 3.0 * t.powi(3) * t.exp();
        println!("f({x:.4}) = {:.12} vs (2/3) S^3 e^S = {want:.12}", sol.eval(x)?);
    }
    Ok(())
}
