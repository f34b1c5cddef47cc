//! F^α-derivative and F^α-integral of scalar functions against a staircase,
//! plus the conjugacy lift that turns a classical g(t) into the fractal
//! function x ↦ g(S(x)).
//!
//! The conjugacy is the workhorse: in the staircase coordinate t = S(x) the
//! fractal derivative of g∘S is g′∘S and the fractal integral is an ordinary
//! integral in t, which is how the solver stays classical inside.

use crate::error::{Error, Result};
use crate::fractal_set::Staircase;
use std::sync::Arc;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Agreement required between left and right derivative extrapolates.
const TWO_SIDED_TOL: f64 = 1e-4;

/// Default quadrature cell count.
pub const DEFAULT_CELLS: usize = 1 << 14;

#[derive(Clone)]
pub enum FnForm {
    /// f(x) = g(S(x)), a classical function of the staircase coordinate.
    Conjugate(ScalarFn),
    /// f(x) = h(x), arbitrary pointwise values; the calculus restricts it
    /// to the set.
    Raw(ScalarFn),
}

#[derive(Clone)]
pub struct FractalFn {
    pub form: FnForm,
    pub staircase: Staircase,
}

impl FractalFn {
    pub fn conjugate(
        staircase: Staircase,
        g: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        FractalFn { form: FnForm::Conjugate(Arc::new(g)), staircase }
    }

    pub fn raw(staircase: Staircase, h: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        FractalFn { form: FnForm::Raw(Arc::new(h)), staircase }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        match &self.form {
            FnForm::Conjugate(g) => Ok(g(self.staircase.eval(x)?)),
            FnForm::Raw(h) => Ok(h(x)),
        }
    }

    /// Value at staircase coordinate u; raw functions go through the
    /// pseudo-inverse.
    fn eval_at_u(&self, u: f64) -> Result<f64> {
        match &self.form {
            FnForm::Conjugate(g) => Ok(g(u)),
            FnForm::Raw(h) => Ok(h(self.staircase.pseudoinverse(u)?)),
        }
    }
}

/// x ↦ g(S(x)).
pub fn conjugate_lift(g: impl Fn(f64) -> f64 + Send + Sync + 'static, s: Staircase) -> FractalFn {
    FractalFn::conjugate(s, g)
}

/// Level range and extrapolation controls for the derivative quotient.
/// Quotients are taken at the construction pieces containing x, levels
/// k_min..=k_max, so the implied steps shrink like (b-a)·r^k.
#[derive(Debug, Clone, Copy)]
pub struct DerivativeConfig {
    pub k_min: u32,
    /// Default: depth - 2, further capped where the mass increment m^{-k}
    /// sinks below 10^{-8} and the quotients drown in round-off.
    pub k_max: Option<u32>,
    pub richardson: bool,
    pub tol: f64,
}

impl Default for DerivativeConfig {
    fn default() -> Self {
        DerivativeConfig { k_min: 4, k_max: None, richardson: true, tol: 1e-6 }
    }
}

/// F^α-derivative at x: the limit of (f(y) - f(x))/(S(y) - S(x)) over
/// construction points y shrinking onto x, extrapolated per side and checked
/// for two-sided agreement. Returns 0 off the set.
pub fn f_alpha_derivative(f: &FractalFn, x: f64, cfg: &DerivativeConfig) -> Result<f64> {
    let s = &f.staircase;
    let spec = &s.spec;
    let s_x = s.eval(x)?;
    let path = spec.piece_path(x, s.depth);
    if (path.len() as u32) < s.depth.min(spec.walk_limit()) {
        return Ok(0.0);
    }
    let k_noise = ((1e8f64).ln() / (spec.m_eff() as f64).ln()).floor() as u32;
    // raw probes re-walk the piece endpoints, which stops resolving them
    // past probe_limit; conjugate probes take exact cdf values instead
    let k_eval = match &f.form {
        FnForm::Raw(_) => spec.probe_limit(),
        FnForm::Conjugate(_) => u32::MAX,
    };
    let k_max = cfg
        .k_max
        .unwrap_or_else(|| s.depth.saturating_sub(2).min(k_noise))
        .min(path.len() as u32)
        .min(k_eval);
    if cfg.k_min == 0 || cfg.k_min > k_max {
        return Err(Error::Spec(format!("bad derivative level range {}..={k_max}", cfg.k_min)));
    }
    let f_x = f.eval(x)?;
    let h_floor = 1e-13 * s.normalization.abs().max(f64::MIN_POSITIVE);
    // (h, quotient) samples per side, |h| strictly shrinking
    let mut right: Vec<(f64, f64)> = Vec::new();
    let mut left: Vec<(f64, f64)> = Vec::new();
    for piece in path.iter().skip(cfg.k_min as usize - 1).take((k_max - cfg.k_min + 1) as usize) {
        let s_hi = s.value_at_cdf(piece.cdf_hi);
        let h = s_hi - s_x;
        if h > h_floor && right.last().is_none_or(|&(hp, _)| h < 0.75 * hp) {
            let v = match &f.form {
                FnForm::Conjugate(g) => g(s_hi),
                FnForm::Raw(hf) => hf(piece.x_hi),
            };
            right.push((h, (v - f_x) / h));
        }
        let s_lo = s.value_at_cdf(piece.cdf_lo);
        let h = s_lo - s_x;
        if h < -h_floor && left.last().is_none_or(|&(hp, _)| h > 0.75 * hp) {
            let v = match &f.form {
                FnForm::Conjugate(g) => g(s_lo),
                FnForm::Raw(hf) => hf(piece.x_lo),
            };
            left.push((h, (v - f_x) / h));
        }
    }
    let estimate = |side: &[(f64, f64)]| -> Option<(f64, f64)> {
        if side.len() < 2 {
            return None;
        }
        if cfg.richardson {
            Some(extrapolate_to_zero(side))
        } else {
            let last = side[side.len() - 1].1;
            Some((last, (last - side[side.len() - 2].1).abs()))
        }
    };
    match (estimate(&left), estimate(&right)) {
        (Some((l, el)), Some((r, er))) => {
            let scale = 1.0f64.max(l.abs()).max(r.abs());
            // widen the gate when the extrapolates are themselves noisy, so
            // numerically-backed integrands (iterated derivatives) are not
            // misread as kinks
            let gate = (TWO_SIDED_TOL * scale).max(8.0 * (el + er));
            if (l - r).abs() > gate {
                return Err(Error::NonDifferentiable { prev: l, last: r });
            }
            // the sides can be unevenly sampled (endpoint orbits lock one
            // side early), so trust the cleaner extrapolation
            Ok(if el <= er { l } else { r })
        }
        (Some((l, _)), None) => Ok(l),
        (None, Some((r, _))) => Ok(r),
        (None, None) => Err(Error::NonDifferentiable { prev: f64::NAN, last: f64::NAN }),
    }
}

/// Neville extrapolation of (h, q) samples to h = 0; returns the tableau
/// entry with the smallest successive difference and that difference.
fn extrapolate_to_zero(samples: &[(f64, f64)]) -> (f64, f64) {
    let n = samples.len();
    let h: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let mut col: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let mut best = col[n - 1];
    let mut err = (col[n - 1] - col[n - 2]).abs();
    let mut worse = 0u32;
    for j in 1..n {
        let mut next = col.clone();
        for i in j..n {
            next[i] = (h[i] * col[i - 1] - h[i - j] * next[i]) / (h[i] - h[i - j]);
        }
        let e = (next[n - 1] - col[n - 1]).abs();
        if e <= err {
            best = next[n - 1];
            err = e;
            worse = 0;
        } else {
            worse += 1;
            if worse >= 2 {
                break;
            }
        }
        col = next;
    }
    (best, err)
}

/// F^α-integral over [a, b] by the substitution u = S(x): a uniform n-cell
/// midpoint rule on [S(a), S(b)]. Exact in the limit for F-continuous
/// integrands; reversed bounds flip the sign.
pub fn f_alpha_integral(f: &FractalFn, a: f64, b: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Spec("quadrature needs at least one cell".into()));
    }
    let sa = f.staircase.eval(a)?;
    let sb = f.staircase.eval(b)?;
    let du = (sb - sa) / n as f64;
    if du == 0.0 {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    for i in 0..n {
        let u = sa + (i as f64 + 0.5) * du;
        let v = f.eval_at_u(u)?;
        if !v.is_finite() {
            return Err(Error::Integrand { at: u });
        }
        sum += v;
    }
    Ok(du * sum)
}

/// Endpoint-rule bracket for the same integral: (lower, upper) Darboux sums
/// on the u-grid, a true bracket when f is monotone in the staircase
/// coordinate. Cell endpoints are sampled, so singularities at u = S(a) are
/// refused here even when the midpoint rule would step over them.
pub fn f_alpha_integral_bounds(f: &FractalFn, a: f64, b: f64, n: usize) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::Spec("quadrature needs at least one cell".into()));
    }
    let sa = f.staircase.eval(a)?;
    let sb = f.staircase.eval(b)?;
    let du = (sb - sa) / n as f64;
    if du == 0.0 {
        return Ok((0.0, 0.0));
    }
    let mut lo_sum = 0.0;
    let mut hi_sum = 0.0;
    let mut prev = f.eval_at_u(sa)?;
    for i in 0..n {
        let u1 = sa + (i as f64 + 1.0) * du;
        let v1 = f.eval_at_u(u1)?;
        if !prev.is_finite() || !v1.is_finite() {
            return Err(Error::Integrand { at: if prev.is_finite() { u1 } else { u1 - du } });
        }
        lo_sum += prev.min(v1);
        hi_sum += prev.max(v1);
        prev = v1;
    }
    let (lo, hi) = (du * lo_sum, du * hi_sum);
    Ok(if lo <= hi { (lo, hi) } else { (hi, lo) })
}
