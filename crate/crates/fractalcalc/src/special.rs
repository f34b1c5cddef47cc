//! Small special-function helpers not covered by statrs.

pub const EULER_GAMMA: f64 = 0.5772156649015329;

/// Exponential integral Ei(x) for x > 0 by its power series
/// Ei(x) = γ + ln x + Σ_{k≥1} x^k / (k·k!).
///
/// The series converges for all x > 0; useful here for x up to ~5 where it
/// needs few terms and no cancellation occurs.
pub fn ei(x: f64) -> f64 {
    assert!(x > 0.0, "ei requires x > 0, got {x}");
    let mut sum = 0.0;
    let mut pow = 1.0;
    for k in 1..200 {
        pow *= x / k as f64;
        let add = pow / k as f64;
        sum += add;
        if add < 1e-17 * sum.abs() + f64::MIN_POSITIVE {
            break;
        }
    }
    EULER_GAMMA + x.ln() + sum
}
