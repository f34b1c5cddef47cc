//! Tabulate the integral staircase of the middle-thirds Cantor set and poke
//! at its structure: exact values at construction points, flat plateaus
//! across gaps, and the self-similar scaling S(x/3) = S(1)/2 · S-shape.
//!
//!     cargo run --example staircase_table

use fractalcalc::{CantorSpec, Staircase};

fn main() -> fractalcalc::Result<()> {
    let spec = CantorSpec::triadic();
    let s = Staircase::new(spec);

    println!("triadic Cantor set on [0,1], alpha = {:.12}", s.alpha);
    println!("normalization S(1) - S(0) = {:.12}\n", s.total());

    println!("{:>10}  {:>18}", "x", "S(x)");
    for i in 0..=16 {
        let x = i as f64 / 16.0;
        println!("{x:>10.4}  {:>18.12}", s.eval(x)?);
    }

    // plateaus: S is constant across every removed gap
    let inside_gap = [0.4, 0.45, 0.5, 0.55, 0.6];
    let plateau: Vec<f64> = inside_gap
        .iter()
        .map(|&x| s.eval(x))
        .collect::<fractalcalc::Result<_>>()?;
    println!("\ncentral gap (1/3, 2/3): S = {:?}", plateau);
    assert!(plateau.windows(2).all(|w| w[0] == w[1]));

    // construction points carry exact dyadic fractions of the total mass
    for (x, num, den) in [(1.0 / 3.0, 1, 2), (1.0 / 9.0, 1, 4), (2.0 / 3.0, 1, 2), (7.0 / 9.0, 3, 4)] {
        let got = s.eval(x)?;
        let want = s.total() * num as f64 / den as f64;
        println!("S({x:.6}) = {got:.15}  (= {num}/{den} of the total, err {:.1e})", (got - want).abs());
    }

    // scaling: the first level-1 copy is the whole set shrunk by 3, carrying
    // half the mass
    for &x in &[1.0 / 9.0, 2.0 / 9.0, 1.0 / 3.0] {
        let lhs = s.eval(x / 3.0)?;
        let rhs = s.eval(x)? / 2.0;
        assert_eq!(lhs, rhs);
    }
    println!("\nscaling S(x/3) = S(x)/2 holds bitwise at construction points");

    // the pseudoinverse walks back from mass to position
    let u = s.total() * 0.25;
    let x = s.pseudoinverse(u)?;
    println!("pseudoinverse({u:.6}) = {x:.15}, S back = {:.15}", s.eval(x)?);
    Ok(())
}
