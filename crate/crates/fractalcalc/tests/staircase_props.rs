//! Structural properties of the set machinery: staircase monotonicity and
//! gap behavior under random probing, pseudoinverse round trips, exact
//! self-similar scaling, and an independent minimal-partition check of the
//! coarse-grained mass.

use fractalcalc::{CantorSpec, Staircase};
use proptest::prelude::*;
use statrs::function::gamma::gamma;

const ALPHA3: f64 = 0.6309297535714574;

fn triadic() -> Staircase {
    Staircase::new(CantorSpec::triadic())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2500))]

    // with 4 sampled pairs per case this probes 10^4 pairs
    #[test]
    fn monotone(pairs in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 4)) {
        let s = triadic();
        for (u, v) in pairs {
            let (lo, hi) = if u <= v { (u, v) } else { (v, u) };
            prop_assert!(s.eval(lo).unwrap() <= s.eval(hi).unwrap());
        }
    }

    #[test]
    fn gap_constancy(digits in prop::collection::vec(prop::bool::ANY, 0..8), f1 in 0.001f64..0.999, f2 in 0.001f64..0.999) {
        // walk down to a random construction interval, then sample its
        // middle-third gap twice
        let s = triadic();
        let mut a = 0.0f64;
        let mut len = 1.0f64;
        for right in digits {
            if right {
                a += 2.0 * len / 3.0;
            }
            len /= 3.0;
        }
        let (g1, g2) = (a + len / 3.0, a + 2.0 * len / 3.0);
        let u1 = g1 + (g2 - g1) * f1;
        let u2 = g1 + (g2 - g1) * f2;
        prop_assert_eq!(s.eval(u1).unwrap(), s.eval(u2).unwrap());
    }

    #[test]
    fn scaling_onto_first_copy(digits in prop::collection::vec(prop::bool::ANY, 1..13)) {
        // x built from construction digits, so x and x/3 are both walkable;
        // depth stops at 12 because x/3 itself rounds, and past that the
        // round-off outgrows the walk's snapping tolerance
        let s = triadic();
        let mut x = 0.0f64;
        let mut len = 1.0f64;
        for right in digits {
            if right {
                x += 2.0 * len / 3.0;
            }
            len /= 3.0;
        }
        prop_assert_eq!(s.eval(x / 3.0).unwrap(), s.eval(x).unwrap() / 2.0);
    }

    #[test]
    fn pseudoinverse_left_inverse(frac in 0.0f64..1.0) {
        let s = triadic();
        let u = frac * s.total();
        let x = s.pseudoinverse(u).unwrap();
        let back = s.eval(x).unwrap();
        // away from endpoint orbits the mass resolution bottoms out near
        // 2^-28 of the total (positions at depth 40 differ by 3^-40, far
        // below f64 spacing); but eval snaps x onto a level-1 endpoint when
        // within 1e-9 of it in local coordinates, and by Holder continuity
        // of S the snap can swallow up to total/2 * (3e-9)^alpha of mass
        let alpha = 2f64.ln() / 3f64.ln();
        let res = s.total() * 0.5 * 3e-9f64.powf(alpha);
        prop_assert!((back - u).abs() <= res, "S(pinv({u})) = {back}");
    }

    #[test]
    fn pseudoinverse_under_eval(digits in prop::collection::vec(prop::bool::ANY, 1..12)) {
        let s = triadic();
        let mut x = 0.0f64;
        let mut len = 1.0f64;
        for right in digits {
            if right {
                x += 2.0 * len / 3.0;
            }
            len /= 3.0;
        }
        let y = s.pseudoinverse(s.eval(x).unwrap()).unwrap();
        prop_assert!(y <= x + 1e-12, "pinv(S({x})) = {y} should not exceed x");
    }
}

#[test]
fn half_mass_at_one_third_is_bitwise() {
    let s = triadic();
    assert_eq!(s.eval(1.0 / 3.0).unwrap(), s.eval(1.0).unwrap() / 2.0);
    assert_eq!(s.eval(1.0 / 9.0).unwrap(), s.eval(1.0).unwrap() / 4.0);
}

/// Independent minimal-partition value: dynamic program over candidate cut
/// points (construction points, near-misses p +- eps, gap midpoints), cells
/// longer than delta allowed only when they miss the set entirely.
fn dp_partition_value(alpha: f64, delta: f64, level: u32, eps: f64) -> f64 {
    let spec = CantorSpec::triadic();
    let coarse = spec.level_points(level);
    let fine = spec.level_points(level + 10);

    let mut cuts = vec![0.0, 1.0];
    for w in coarse.windows(2) {
        for p in [w[0], w[1]] {
            cuts.push(p);
            if p - eps > 0.0 {
                cuts.push(p - eps);
            }
            if p + eps < 1.0 {
                cuts.push(p + eps);
            }
        }
        let mid = 0.5 * (w[0] + w[1]);
        if !spec.contains(mid, level + 2) {
            cuts.push(mid);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    // a closed cell meets the set iff it contains a fine construction point
    let touches = |lo: f64, hi: f64| -> bool {
        let i = fine.partition_point(|&p| p < lo - 1e-15);
        i < fine.len() && fine[i] <= hi + 1e-15
    };

    let v = cuts.len();
    let mut best = vec![f64::INFINITY; v];
    best[0] = 0.0;
    for j in 1..v {
        for i in 0..j {
            let len = cuts[j] - cuts[i];
            let hit = touches(cuts[i], cuts[j]);
            if len > delta && hit {
                continue;
            }
            let cost = if hit { gamma(alpha + 1.0) * len.powf(alpha) } else { 0.0 };
            if best[i] + cost < best[j] {
                best[j] = best[i] + cost;
            }
        }
    }
    best[v - 1]
}

#[test]
fn coarse_mass_matches_partition_oracle() {
    let spec = CantorSpec::triadic();
    for (alpha, k) in [(ALPHA3, 2u32), (ALPHA3, 3), (0.4, 2), (0.9, 3)] {
        let delta = 3f64.powi(-(k as i32));
        let impl_value = spec.coarse_mass(0.0, 1.0, alpha, delta).unwrap();
        // closed form of the infimum on the self-similar family
        let analytic = gamma(alpha + 1.0) * (2.0 * 3f64.powf(-alpha)).powi(k as i32);
        assert!(
            (impl_value - analytic).abs() <= 1e-9,
            "alpha {alpha} delta 3^-{k}: {impl_value} vs analytic {analytic}"
        );
        // any concrete partition bounds the infimum from above, and with
        // eps-cuts hugging the construction points it approaches it
        let dp = dp_partition_value(alpha, delta, k, 3f64.powi(-(k as i32 + 18)));
        assert!(impl_value <= dp + 1e-12, "infimum above a concrete partition: {impl_value} > {dp}");
        assert!(dp - impl_value <= 1e-2, "partition bound too far off: {dp} vs {impl_value}");
    }
}

#[test]
fn dimension_dichotomy_on_the_family() {
    // below the dimension the iterates grow as delta shrinks, above they die
    for (m, r) in [(2u32, 1.0 / 3.0), (2, 0.25), (2, 0.2)] {
        let spec = CantorSpec::new(0.0, 1.0, m, r).unwrap();
        let dim = (m as f64).ln() / (1.0 / r).ln();
        for (alpha, growing) in [(dim - 0.08, true), (dim + 0.08, false)] {
            let coarse = spec.coarse_mass(0.0, 1.0, alpha, r.powi(5)).unwrap();
            let fine = spec.coarse_mass(0.0, 1.0, alpha, r.powi(10)).unwrap();
            if growing {
                assert!(fine > coarse * 1.3, "m={m} r={r} alpha={alpha}: {coarse} -> {fine}");
            } else {
                assert!(fine < coarse * 0.77, "m={m} r={r} alpha={alpha}: {coarse} -> {fine}");
            }
        }
    }
}

#[test]
fn staircase_depth_controls_resolution() {
    let spec = CantorSpec::triadic();
    let coarse = Staircase::new(spec).with_depth(6);
    let fine = Staircase::new(spec);
    // at depth 6 the value is exact only to 2^-6 of the total
    let x = 0.123456;
    let err = (coarse.eval(x).unwrap() - fine.eval(x).unwrap()).abs();
    assert!(err <= coarse.total() * 0.5f64.powi(6));
    assert!(fine.eval(1.0 / 3.0).unwrap() == coarse.eval(1.0 / 3.0).unwrap());
}
