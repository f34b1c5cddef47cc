//! Self-similar Cantor-like subsets of a closed interval.
//!
//! A set keeps `m` scaled copies (ratio `r`) of its parent interval, laid out
//! with equal gaps, at every level. `m = 2, r = 1/3` is the middle-third
//! Cantor set. The module computes the flag function, coarse-grained mass,
//! mass function, a γ-dimension estimate, and the integral staircase S(x),
//! which plays the role of the identity function in the calculus on the set.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

pub const DEFAULT_DEPTH: u32 = 40;

/// Slack for membership walks, relative to the current level's unit length.
/// Absorbs the round-off of repeatedly rescaling x by 1/r.
const WALK_TOL: f64 = 1e-9;

fn default_depth() -> u32 {
    DEFAULT_DEPTH
}

/// Description of a self-similar Cantor-like set on [a, b].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CantorSpec {
    pub a: f64,
    pub b: f64,
    /// Retained sub-intervals per level. `m = 1` with `r = 1` is the
    /// degenerate full-interval fixture used for classical regression.
    pub m: u32,
    /// Contraction ratio, 0 < r ≤ 1/m.
    pub r: f64,
    #[serde(default = "default_depth")]
    pub depth_max: u32,
}

impl CantorSpec {
    pub fn new(a: f64, b: f64, m: u32, r: f64) -> Result<Self> {
        let spec = CantorSpec { a, b, m, r, depth_max: DEFAULT_DEPTH };
        spec.validate()?;
        Ok(spec)
    }

    /// The middle-third Cantor set on [0, 1].
    pub fn triadic() -> Self {
        CantorSpec { a: 0.0, b: 1.0, m: 2, r: 1.0 / 3.0, depth_max: DEFAULT_DEPTH }
    }

    /// The degenerate full-interval fixture (α = 1, S(x) = x - a).
    pub fn full_interval(a: f64, b: f64) -> Result<Self> {
        CantorSpec::new(a, b, 1, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.b > self.a) || !self.a.is_finite() || !self.b.is_finite() {
            return Err(Error::Spec(format!("need a < b, got [{}, {}]", self.a, self.b)));
        }
        let ok = if self.m == 1 {
            self.r == 1.0
        } else {
            self.m >= 2 && self.r > 0.0 && self.m as f64 * self.r <= 1.0 + 1e-12
        };
        if !ok {
            return Err(Error::Spec(format!(
                "need m >= 2 with 0 < r <= 1/m (or m = 1, r = 1), got m={}, r={}",
                self.m, self.r
            )));
        }
        if self.depth_max == 0 {
            return Err(Error::Spec("depth_max must be positive".into()));
        }
        Ok(())
    }

    /// m = 1, r = 1 is served by the equivalent gap-free dyadic construction
    /// (two half-copies), so every query runs through one code path.
    pub(crate) fn m_eff(&self) -> u32 {
        if self.m == 1 { 2 } else { self.m }
    }

    fn r_eff(&self) -> f64 {
        if self.m == 1 { 0.5 } else { self.r }
    }

    /// Gap between consecutive copies, in parent units.
    fn gap(&self) -> f64 {
        let m = self.m_eff() as f64;
        (1.0 - m * self.r_eff()) / (m - 1.0)
    }

    /// Copy-to-copy stride r + gap, in parent units.
    fn period(&self) -> f64 {
        self.r_eff() + self.gap()
    }

    pub fn len(&self) -> f64 {
        self.b - self.a
    }

    /// Similarity dimension ln m / ln(1/r).
    pub fn alpha(&self) -> f64 {
        (self.m_eff() as f64).ln() / (1.0 / self.r_eff()).ln()
    }

    fn to_unit(self, x: f64) -> f64 {
        (x - self.a) / self.len()
    }

    /// Fraction of the set's mass lying left of `u` (unit coordinates),
    /// resolved to `depth` levels. This is the unnormalized staircase.
    pub(crate) fn cdf(&self, u: f64, depth: u32) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        if u >= 1.0 {
            return 1.0;
        }
        if depth == 0 {
            // resolution exhausted: linear closure within the piece
            return u;
        }
        let m = self.m_eff() as f64;
        let p = self.period();
        let r = self.r_eff();
        let i = (u / p).floor().min(m - 1.0).max(0.0);
        let u_loc = u - i * p;
        // snap points within WALK_TOL of a copy boundary onto it, mirroring
        // the piece walk; the recursion is expansive, so without this the
        // deep digits of near-endpoint points are round-off noise
        if (u_loc - r).abs() <= WALK_TOL || u_loc >= r {
            (i + 1.0) / m
        } else if u_loc <= WALK_TOL {
            i / m
        } else {
            (i + self.cdf(u_loc / r, depth - 1)) / m
        }
    }

    /// Smallest unit coordinate whose cdf reaches `v`.
    pub(crate) fn icdf(&self, v: f64, depth: u32) -> f64 {
        if v <= 0.0 {
            return 0.0;
        }
        if v >= 1.0 {
            return 1.0;
        }
        if depth == 0 {
            return v;
        }
        let m = self.m_eff() as f64;
        let mv = v * m;
        let i = mv.floor().min(m - 1.0);
        let frac = mv - i;
        if frac == 0.0 {
            // v sits exactly on a copy boundary: the smallest preimage is the
            // right endpoint of copy i-1
            (i - 1.0) * self.period() + self.r_eff()
        } else {
            i * self.period() + self.r_eff() * self.icdf(frac, depth - 1)
        }
    }

    /// Indicator of F ∩ [lo, hi] ≠ ∅ against the depth-level construction.
    /// Exact for intervals whose endpoints are construction points of level
    /// ≤ depth.
    pub fn flag(&self, lo: f64, hi: f64, depth: u32) -> Result<bool> {
        if !(lo <= hi) {
            return Err(Error::MalformedInterval { lo, hi });
        }
        if depth > self.depth_max {
            return Err(Error::DepthExceeded { depth, max: self.depth_max });
        }
        Ok(self.intersects_unit(self.to_unit(lo), self.to_unit(hi), depth))
    }

    fn intersects_unit(&self, lo: f64, hi: f64, depth: u32) -> bool {
        if hi < 0.0 || lo > 1.0 {
            return false;
        }
        if depth == 0 || (lo <= 0.0 && hi >= 1.0) {
            return true;
        }
        let p = self.period();
        let r = self.r_eff();
        for i in 0..self.m_eff() {
            let s = i as f64 * p;
            if s > hi {
                break;
            }
            if lo <= s + r && self.intersects_unit((lo - s) / r, (hi - s) / r, depth - 1) {
                return true;
            }
        }
        false
    }

    /// Σ (clipped piece length)^α over level-`level` pieces meeting [lo, hi],
    /// in unit coordinates. Cells strictly inside gaps carry no mass and
    /// boundary-touching cells can be made arbitrarily small, so this sum is
    /// the infimum of flagged partition sums over gap-aligned refinements.
    fn piece_sum_unit(&self, lo: f64, hi: f64, level: u32, alpha: f64) -> f64 {
        if hi <= 0.0 || lo >= 1.0 {
            return 0.0;
        }
        if lo <= 0.0 && hi >= 1.0 {
            // every piece survives: m^k (r^k)^alpha
            return (self.m_eff() as f64 * self.r_eff().powf(alpha)).powi(level as i32);
        }
        if level == 0 {
            return (hi.min(1.0) - lo.max(0.0)).max(0.0).powf(alpha);
        }
        let p = self.period();
        let r = self.r_eff();
        let ra = r.powf(alpha);
        let mut sum = 0.0;
        for i in 0..self.m_eff() {
            let s = i as f64 * p;
            if s > hi {
                break;
            }
            if lo <= s + r {
                sum += ra * self.piece_sum_unit((lo - s) / r, (hi - s) / r, level - 1, alpha);
            }
        }
        sum
    }

    fn level_mass(&self, lo_u: f64, hi_u: f64, level: u32, alpha: f64) -> f64 {
        gamma(alpha + 1.0) * self.len().powf(alpha) * self.piece_sum_unit(lo_u, hi_u, level, alpha)
    }

    /// Coarse-grained mass of F ∩ [a, b] at mesh delta: the infimum of
    /// Γ(α+1)·Σ (Δt)^α over flagged cells, taken over gap-aligned partitions
    /// refined to mesh ≤ delta.
    pub fn coarse_mass(&self, a: f64, b: f64, alpha: f64, delta: f64) -> Result<f64> {
        if !(a < b) {
            return Err(Error::MalformedInterval { lo: a, hi: b });
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::AlphaRange(alpha));
        }
        if !(delta > 0.0) {
            return Err(Error::Spec(format!("delta must be positive, got {delta}")));
        }
        let level = if delta >= self.len() {
            0
        } else {
            ((self.len() / delta).ln() / (1.0 / self.r_eff()).ln()).ceil() as u32
        };
        if level > self.depth_max {
            return Err(Error::Resolution {
                delta,
                resolution: self.len() * self.r_eff().powi(self.depth_max as i32),
                depth: self.depth_max,
            });
        }
        Ok(self.level_mass(self.to_unit(a), self.to_unit(b), level, alpha))
    }

    /// Mass function: the delta → 0 limit of the coarse-grained mass,
    /// accelerated by geometric extrapolation of the level sequence.
    pub fn mass(&self, a: f64, b: f64, alpha: f64, tol: f64) -> Result<MassEstimate> {
        if !(tol > 0.0) {
            return Err(Error::Spec(format!("tol must be positive, got {tol}")));
        }
        let (lo_u, hi_u) = (self.to_unit(a), self.to_unit(b));
        if !(a < b) {
            return Err(Error::MalformedInterval { lo: a, hi: b });
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::AlphaRange(alpha));
        }
        let mut prev = self.level_mass(lo_u, hi_u, 0, alpha);
        let mut d_prev = f64::NAN;
        for level in 1..=self.depth_max {
            let value = self.level_mass(lo_u, hi_u, level, alpha);
            let d = value - prev;
            if d.abs() < tol {
                return Ok(MassEstimate { value, converged: true, levels: level });
            }
            if d_prev.is_finite() && d_prev != 0.0 {
                let q = d / d_prev;
                if q > 0.0 && q < 0.95 {
                    // geometric tail: limit = value + d q/(1-q)
                    let ext = value + d * q / (1.0 - q);
                    if (d * q / (1.0 - q)).abs() < tol {
                        return Ok(MassEstimate { value: ext, converged: true, levels: level });
                    }
                }
            }
            d_prev = d;
            prev = value;
        }
        Ok(MassEstimate { value: prev, converged: false, levels: self.depth_max })
    }

    /// γ-dimension of F ∩ [a, b]: the α where the mass trend flips from
    /// divergent to vanishing, located by bisection to ±1e-3.
    pub fn gamma_dimension(&self, a: f64, b: f64) -> Result<f64> {
        if !(a < b) {
            return Err(Error::MalformedInterval { lo: a, hi: b });
        }
        let (lo_u, hi_u) = (self.to_unit(a), self.to_unit(b));
        let k0 = 6.min(self.depth_max - 1);
        let k1 = (k0 + 8).min(self.depth_max);
        // per-level log growth of the mass sequence; root in alpha is the dimension
        let trend = |alpha: f64| -> f64 {
            let v0 = self.level_mass(lo_u, hi_u, k0, alpha);
            let v1 = self.level_mass(lo_u, hi_u, k1, alpha);
            if v0 <= 0.0 || v1 <= 0.0 {
                return f64::NEG_INFINITY; // no surviving pieces: treat as vanishing
            }
            (v1.ln() - v0.ln()) / (k1 - k0) as f64
        };
        let t1 = trend(1.0);
        if t1.is_nan() {
            return Err(Error::DimensionAmbiguous { lo: 0.0, hi: 1.0 });
        }
        if t1 >= -1e-12 {
            return Ok(1.0);
        }
        let (mut lo, mut hi) = (1e-4, 1.0);
        if trend(lo) <= 0.0 {
            return Ok(0.0); // empty tail at every order
        }
        while hi - lo > 5e-4 {
            let mid = 0.5 * (lo + hi);
            let t = trend(mid);
            if t.is_nan() {
                return Err(Error::DimensionAmbiguous { lo, hi });
            }
            if t > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Containing construction piece of `x` at each level, with exact mass
    /// bounds, until `depth` levels or until `x` exits into a gap.
    pub fn piece_path(&self, x: f64, depth: u32) -> Vec<Piece> {
        let mut out = Vec::with_capacity(depth as usize);
        let m = self.m_eff() as f64;
        let p = self.period();
        let r = self.r_eff();
        let mut u = self.to_unit(x);
        if !(-WALK_TOL..=1.0 + WALK_TOL).contains(&u) {
            return out;
        }
        u = u.clamp(0.0, 1.0);
        let mut lo_u = 0.0f64; // piece origin in global unit coords
        let mut len_u = 1.0f64;
        let mut cdf_lo = 0.0f64;
        let mut measure = 1.0f64;
        for level in 1..=depth {
            let mut i = (u / p).floor().min(m - 1.0).max(0.0);
            let mut u_loc = u - i * p;
            if u_loc > r + WALK_TOL {
                // just left of the next copy counts as its left endpoint
                if i + 1.0 <= m - 1.0 && (i + 1.0) * p - u <= WALK_TOL {
                    i += 1.0;
                    u_loc = 0.0;
                } else {
                    break; // gap
                }
            }
            // lock onto endpoint orbits: the division by r below amplifies
            // round-off threefold per level, so without the snap even exact
            // construction points drift out of the walk around level 30
            if (u_loc - r).abs() <= WALK_TOL {
                u_loc = r;
            } else if u_loc.abs() <= WALK_TOL {
                u_loc = 0.0;
            }
            u_loc = u_loc.clamp(0.0, r);
            lo_u += i * p * len_u;
            len_u *= r;
            measure /= m;
            cdf_lo += i * measure;
            out.push(Piece {
                x_lo: self.a + self.len() * lo_u,
                x_hi: self.a + self.len() * (lo_u + len_u),
                cdf_lo,
                cdf_hi: cdf_lo + measure,
                level,
            });
            u = u_loc / r;
        }
        out
    }

    /// Deepest level the digit walk stays trustworthy for points that are
    /// not locked onto an endpoint orbit; beyond it, accumulated round-off
    /// rivals the piece size.
    pub(crate) fn walk_limit(&self) -> u32 {
        ((0.02 / f64::EPSILON).ln() / (1.0 / self.r_eff()).ln()).floor() as u32
    }

    /// Deepest level at which a fresh walk still tells a level-k endpoint
    /// apart from the point it brackets: past it the snap window swallows
    /// the separation r^k and eval returns the neighbor's value.
    pub(crate) fn probe_limit(&self) -> u32 {
        ((1.0 / WALK_TOL).ln() / (1.0 / self.r_eff()).ln()).floor().max(2.0) as u32 - 1
    }

    /// Membership in the depth-level construction (resolution (b-a)·r^depth).
    pub fn contains(&self, x: f64, depth: u32) -> bool {
        if x < self.a || x > self.b {
            return false;
        }
        let need = depth.min(self.walk_limit()) as usize;
        self.piece_path(x, depth).len() >= need
    }

    /// Sorted endpoints of all level-`level` construction pieces.
    pub fn level_points(&self, level: u32) -> Vec<f64> {
        let mut unit = Vec::new();
        self.collect_endpoints(0.0, 1.0, level, &mut unit);
        unit.sort_by(f64::total_cmp);
        unit.dedup();
        unit.into_iter().map(|u| self.a + self.len() * u).collect()
    }

    fn collect_endpoints(&self, lo: f64, len: f64, level: u32, out: &mut Vec<f64>) {
        if level == 0 {
            out.push(lo);
            out.push(lo + len);
            return;
        }
        let p = self.period();
        for i in 0..self.m_eff() {
            self.collect_endpoints(lo + i as f64 * p * len, len * self.r_eff(), level - 1, out);
        }
    }
}

impl std::str::FromStr for CantorSpec {
    type Err = Error;

    /// Parses `cantor:m=2,r=0.3333333333[,a=0,b=1]`.
    fn from_str(s: &str) -> Result<Self> {
        let body = s
            .strip_prefix("cantor:")
            .ok_or_else(|| Error::Spec(format!("expected cantor:..., got '{s}'")))?;
        let (mut m, mut r, mut a, mut b) = (None, None, 0.0, 1.0);
        for part in body.split(',') {
            let (key, val) = part
                .split_once('=')
                .ok_or_else(|| Error::Spec(format!("expected key=value, got '{part}'")))?;
            let bad = || Error::Spec(format!("bad value in '{part}'"));
            match key.trim() {
                "m" => m = Some(val.trim().parse::<u32>().map_err(|_| bad())?),
                "r" => r = Some(val.trim().parse::<f64>().map_err(|_| bad())?),
                "a" => a = val.trim().parse().map_err(|_| bad())?,
                "b" => b = val.trim().parse().map_err(|_| bad())?,
                other => return Err(Error::Spec(format!("unknown key '{other}'"))),
            }
        }
        let m = m.ok_or_else(|| Error::Spec("missing m".into()))?;
        let r = r.ok_or_else(|| Error::Spec("missing r".into()))?;
        CantorSpec::new(a, b, m, r)
    }
}

/// Mass-function estimate with a convergence flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassEstimate {
    pub value: f64,
    pub converged: bool,
    pub levels: u32,
}

/// One construction piece on the walk toward a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub x_lo: f64,
    pub x_hi: f64,
    /// Exact fraction of total mass left of the piece.
    pub cdf_lo: f64,
    pub cdf_hi: f64,
    pub level: u32,
}

/// A strictly increasing subdivision of an interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub points: Vec<f64>,
}

impl Partition {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 || points.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Spec("partition points must be strictly increasing".into()));
        }
        Ok(Partition { points })
    }

    /// Endpoints of all level-`level` pieces: the natural coarse-mass
    /// minimizer for this set family.
    pub fn gap_aligned(spec: &CantorSpec, level: u32) -> Self {
        Partition { points: spec.level_points(level) }
    }

    pub fn mesh(&self) -> f64 {
        self.points.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }
}

/// The integral staircase S(x): cumulative mass from the anchor a0, rising
/// exactly on the set and flat across gaps. S(a0) = 0 and S is negative left
/// of the anchor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Staircase {
    pub spec: CantorSpec,
    pub alpha: f64,
    pub a0: f64,
    /// Total rise S(b) - S(a); defaults to Γ(α+1)·(b-a)^α, the value of the
    /// mass function over the whole interval.
    pub normalization: f64,
    pub depth: u32,
}

impl Staircase {
    pub fn new(spec: CantorSpec) -> Self {
        let alpha = spec.alpha();
        Staircase {
            spec,
            alpha,
            a0: spec.a,
            normalization: gamma(alpha + 1.0) * spec.len().powf(alpha),
            depth: spec.depth_max,
        }
    }

    pub fn with_anchor(mut self, a0: f64) -> Self {
        self.a0 = a0;
        self
    }

    pub fn with_normalization(mut self, normalization: f64) -> Self {
        self.normalization = normalization;
        self
    }

    pub fn with_depth(mut self, depth: u32) -> Self {
        self.depth = depth.min(self.spec.depth_max).max(1);
        self
    }

    /// Rebases the order used for the default normalization.
    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self.normalization = gamma(alpha + 1.0) * self.spec.len().powf(alpha);
        self
    }

    fn cdf0(&self) -> f64 {
        self.spec.cdf(self.spec.to_unit(self.a0), self.depth)
    }

    /// Staircase value for a point whose mass fraction is already known
    /// exactly (piece endpoints along a walk). Avoids re-walking.
    pub(crate) fn value_at_cdf(&self, c: f64) -> f64 {
        self.normalization * (c - self.cdf0())
    }

    /// S(x), exact at construction points of level ≤ depth, off by at most
    /// normalization·m^{-depth} elsewhere.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let tol = WALK_TOL * self.spec.len();
        if x < self.spec.a - tol || x > self.spec.b + tol {
            return Err(Error::OutOfDomain { x, a: self.spec.a, b: self.spec.b });
        }
        let u = self.spec.to_unit(x.clamp(self.spec.a, self.spec.b));
        Ok(self.normalization * (self.spec.cdf(u, self.depth) - self.cdf0()))
    }

    /// S(b), the top of the staircase.
    pub fn total(&self) -> f64 {
        self.normalization * (1.0 - self.cdf0())
    }

    /// Smallest x in F (to depth resolution) with S(x) ≥ u.
    pub fn pseudoinverse(&self, u: f64) -> Result<f64> {
        let v = u / self.normalization + self.cdf0();
        if !(-1e-12..=1.0 + 1e-12).contains(&v) {
            return Err(Error::OutOfDomain { x: u, a: 0.0, b: self.total() });
        }
        Ok(self.spec.a + self.spec.len() * self.spec.icdf(v.clamp(0.0, 1.0), self.depth))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ALPHA3: f64 = 0.6309297535714574; // ln 2 / ln 3
    const GAMMA_A1: f64 = 0.8973709406726663; // Γ(ln2/ln3 + 1)

    #[test]
    fn flag_examples() {
        let c = CantorSpec::triadic();
        assert!(!c.flag(0.40, 0.50, 12).unwrap()); // inside the (1/3, 2/3) gap
        assert!(c.flag(0.0, 0.1, 12).unwrap());
        assert!(c.flag(1.0 / 3.0, 2.0 / 3.0, 12).unwrap()); // endpoints in F
        assert!(matches!(c.flag(0.5, 0.2, 4), Err(Error::MalformedInterval { .. })));
        assert!(matches!(c.flag(0.0, 1.0, 99), Err(Error::DepthExceeded { .. })));
    }

    #[test]
    fn coarse_mass_full_interval() {
        let f = CantorSpec::full_interval(0.0, 1.0).unwrap();
        for delta in [1.0, 0.1, 1e-3] {
            let v = f.coarse_mass(0.0, 1.0, 1.0, delta).unwrap();
            assert!((v - 1.0).abs() < 1e-12, "delta={delta} gave {v}");
        }
    }

    #[test]
    fn coarse_mass_triadic_at_dimension() {
        let c = CantorSpec::triadic();
        let v = c.coarse_mass(0.0, 1.0, ALPHA3, 3f64.powi(-8)).unwrap();
        assert!((v - GAMMA_A1).abs() < 1e-12, "got {v}");
    }

    #[test]
    fn coarse_mass_decays_above_dimension() {
        let c = CantorSpec::triadic();
        let vs: Vec<f64> = [4, 7, 10]
            .map(|n| c.coarse_mass(0.0, 1.0, 0.9, 3f64.powi(-n)).unwrap())
            .to_vec();
        assert!(vs[0] > vs[1] && vs[1] > vs[2]);
        // per-level factor 2·3^{-0.9} ≈ 0.744, six levels ≈ 0.17
        assert!(vs[2] < 0.2 * vs[0]);
    }

    #[test]
    fn mass_examples() {
        let c = CantorSpec::triadic();
        let at_dim = c.mass(0.0, 1.0, ALPHA3, 1e-6).unwrap();
        assert!(at_dim.converged);
        assert!((at_dim.value - GAMMA_A1).abs() < 1e-6);

        let above = c.mass(0.0, 1.0, 1.0, 1e-6).unwrap();
        assert!(above.converged);
        assert!(above.value.abs() < 1e-5);

        let f = CantorSpec::full_interval(0.0, 1.0).unwrap();
        let whole = f.mass(0.0, 1.0, 1.0, 1e-6).unwrap();
        assert!(whole.converged);
        assert!((whole.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn gamma_dimension_family() {
        let c = CantorSpec::triadic();
        assert!((c.gamma_dimension(0.0, 1.0).unwrap() - ALPHA3).abs() < 1e-3);
        let quarter = CantorSpec::new(0.0, 1.0, 2, 0.25).unwrap();
        assert!((quarter.gamma_dimension(0.0, 1.0).unwrap() - 0.5).abs() < 1e-3);
        let f = CantorSpec::full_interval(0.0, 1.0).unwrap();
        assert_eq!(f.gamma_dimension(0.0, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn gamma_dimension_of_gap_is_zero() {
        let c = CantorSpec::triadic();
        assert_eq!(c.gamma_dimension(0.40, 0.60).unwrap(), 0.0);
    }

    #[test]
    fn staircase_anchor_and_symmetry() {
        let s = Staircase::new(CantorSpec::triadic());
        assert_eq!(s.eval(0.0).unwrap(), 0.0);
        // self-similarity: half the mass sits left of 1/3, bit-exact
        let third = s.eval(1.0 / 3.0).unwrap();
        assert_eq!(third, s.eval(1.0).unwrap() / 2.0);
        // gap constancy
        assert_eq!(s.eval(0.4).unwrap(), s.eval(0.5).unwrap());
        // normalization
        assert!((s.eval(1.0).unwrap() - GAMMA_A1).abs() < 1e-12);
        // negative branch left of a shifted anchor
        let shifted = Staircase::new(CantorSpec::triadic()).with_anchor(1.0 / 3.0);
        assert_eq!(shifted.eval(1.0 / 3.0).unwrap(), 0.0);
        assert!(shifted.eval(0.1).unwrap() < 0.0);
    }

    #[test]
    fn staircase_matches_mass_function() {
        let c = CantorSpec::triadic();
        let s = Staircase::new(c);
        let m = c.mass(0.0, 1.0, ALPHA3, 1e-6).unwrap();
        assert!((s.eval(1.0).unwrap() - m.value).abs() < 1e-6);
    }

    #[test]
    fn pseudoinverse_examples() {
        let s = Staircase::new(CantorSpec::triadic());
        assert_eq!(s.pseudoinverse(0.0).unwrap(), 0.0);
        let third = s.pseudoinverse(s.total() / 2.0).unwrap();
        assert!((third - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.pseudoinverse(s.total()).unwrap(), 1.0);
        assert!(s.pseudoinverse(2.0 * s.total()).is_err());
    }

    #[test]
    fn pseudoinverse_brute_force_scan() {
        // the pseudo-inverse of S(1)/2 must be the smallest level-10
        // construction point whose staircase value reaches S(1)/2
        let c = CantorSpec::triadic();
        let s = Staircase::new(c);
        let target = s.total() / 2.0;
        let best = c
            .level_points(10)
            .into_iter()
            .find(|&x| s.eval(x).unwrap() >= target)
            .unwrap();
        assert!((s.pseudoinverse(target).unwrap() - best).abs() < 1e-12);
    }

    #[test]
    fn pseudoinverse_left_inverse_on_grid() {
        let s = Staircase::new(CantorSpec::triadic());
        for j in 0..=64 {
            let u = s.total() * j as f64 / 64.0;
            let x = s.pseudoinverse(u).unwrap();
            assert!((s.eval(x).unwrap() - u).abs() < 1e-9, "u={u}");
        }
    }

    #[test]
    fn mass_additivity_at_construction_cut() {
        let c = CantorSpec::triadic();
        let d = 3f64.powi(-7);
        let whole = c.coarse_mass(0.0, 1.0, ALPHA3, d).unwrap();
        let left = c.coarse_mass(0.0, 1.0 / 3.0, ALPHA3, d).unwrap();
        let right = c.coarse_mass(1.0 / 3.0, 1.0, ALPHA3, d).unwrap();
        assert!((left + right - whole).abs() < 1e-10);
        // a cut inside a gap also splits exactly (the gap carries no mass)
        let l2 = c.coarse_mass(0.0, 0.5, ALPHA3, d).unwrap();
        let r2 = c.coarse_mass(0.5, 1.0, ALPHA3, d).unwrap();
        assert!((l2 + r2 - whole).abs() < 1e-10);
    }

    #[test]
    fn full_interval_staircase_is_identity() {
        let s = Staircase::new(CantorSpec::full_interval(2.0, 5.0).unwrap());
        assert!((s.alpha - 1.0).abs() < 1e-15);
        for x in [2.0, 2.7, 3.9, 5.0] {
            assert!((s.eval(x).unwrap() - (x - 2.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn spec_string_parse() {
        let c: CantorSpec = "cantor:m=2,r=0.3333333333".parse().unwrap();
        assert_eq!(c.m, 2);
        assert!((c.r - 1.0 / 3.0).abs() < 1e-9);
        let c2: CantorSpec = "cantor:m=3,r=0.2,a=-1,b=2".parse().unwrap();
        assert_eq!((c2.a, c2.b, c2.m), (-1.0, 2.0, 3));
        assert!("cantor:m=2".parse::<CantorSpec>().is_err());
        assert!("m=2,r=0.3".parse::<CantorSpec>().is_err());
        assert!("cantor:m=2,r=0.9".parse::<CantorSpec>().is_err());
    }

    #[test]
    fn piece_path_tracks_membership() {
        let c = CantorSpec::triadic();
        assert_eq!(c.piece_path(0.5, 20).len(), 0); // level-1 gap
        assert_eq!(c.piece_path(1.0 / 3.0, 20).len(), 20);
        assert_eq!(c.piece_path(1.0, 20).len(), 20);
        assert!(c.contains(2.0 / 3.0, 30));
        assert!(!c.contains(0.45, 30));
        // exact mass bounds along the walk
        let path = c.piece_path(1.0, 8);
        let last = path.last().unwrap();
        assert_eq!(last.cdf_hi, 1.0);
        assert!((last.x_hi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn level_points_count() {
        let c = CantorSpec::triadic();
        let lvl1 = c.level_points(1);
        for (got, want) in lvl1.iter().zip([0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        assert_eq!(lvl1.len(), 4);
        assert_eq!(c.level_points(8).len(), 512);
        let f = CantorSpec::full_interval(0.0, 1.0).unwrap();
        // gapless construction: endpoints collapse
        assert_eq!(f.level_points(3).len(), 9);
    }

    #[test]
    fn partition_basics() {
        let p = Partition::new(vec![0.0, 0.25, 1.0]).unwrap();
        assert!((p.mesh() - 0.75).abs() < 1e-15);
        assert!(Partition::new(vec![0.0, 0.0, 1.0]).is_err());
        let ga = Partition::gap_aligned(&CantorSpec::triadic(), 2);
        assert_eq!(ga.points.len(), 8);
        assert!((ga.mesh() - 1.0 / 3.0).abs() < 1e-12);
    }
}
