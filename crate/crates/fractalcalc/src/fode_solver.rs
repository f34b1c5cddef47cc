//! Constant-coefficient linear fractal ODEs of order n in the α-derivative:
//! a_0 D^{nα}f + a_1 D^{(n-1)α}f + … + a_n f = g(S(x)).
//!
//! In the staircase coordinate t = S(x) the problem is a classical constant-
//! coefficient ODE, so the solver works symbolically on t^k·e^{λt}·trig(μt)
//! terms: characteristic polynomial, clustered root multiplicities,
//! fundamental basis, Wronskians, collocation for initial values,
//! undetermined coefficients, and quadrature-backed variation of parameters.

use crate::error::{Error, Result};
use crate::fractal_calculus::{ScalarFn, DEFAULT_CELLS};
use crate::fractal_set::Staircase;
use crate::symbolic::{Term, TermSum, Trig};
use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

pub const MAX_ORDER: usize = 10;
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-7;
/// How close a forcing exponent must sit to a characteristic root to count
/// as resonant.
const RES_TOL: f64 = 1e-8;

/// One fundamental solution t^k·e^{λt}·{1|cos(μt)|sin(μt)} in the staircase
/// coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisFn {
    pub k: u32,
    pub lambda: f64,
    pub mu: f64,
    pub trig: Trig,
}

impl BasisFn {
    pub fn term(&self) -> Term {
        Term::new(1.0, self.k, self.lambda, self.mu, self.trig)
    }

    pub fn term_sum(&self) -> TermSum {
        TermSum::single(1.0, self.k, self.lambda, self.mu, self.trig)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.term().eval(t)
    }
}

/// One forcing atom p(t)·e^{λt}·trig(μt) with polynomial coefficients in
/// ascending degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForcingAtom {
    pub poly: Vec<f64>,
    pub lambda: f64,
    #[serde(default)]
    pub mu: f64,
    #[serde(default = "default_trig")]
    pub trig: Trig,
}

fn default_trig() -> Trig {
    Trig::None
}

impl ForcingAtom {
    /// Canonical terms: μ ≥ 0, trig None ⟺ μ = 0, zero coefficients dropped.
    fn canonical_terms(&self) -> Result<Vec<Term>> {
        let mut mu = self.mu;
        let mut trig = self.trig;
        let mut sign = 1.0;
        if trig == Trig::None && mu != 0.0 {
            return Err(Error::Problem("forcing atom with trig \"none\" must have mu = 0".into()));
        }
        if mu < 0.0 {
            mu = -mu;
            if trig == Trig::Sin {
                sign = -1.0;
            }
        }
        if mu == 0.0 && trig != Trig::None {
            if trig == Trig::Sin {
                return Ok(Vec::new());
            }
            trig = Trig::None;
        }
        Ok(self
            .poly
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0.0)
            .map(|(k, &c)| Term::new(sign * c, k as u32, self.lambda, mu, trig))
            .collect())
    }
}

/// Right-hand side g, expressed in the staircase coordinate.
#[derive(Clone)]
pub enum ForcingTerm {
    /// Finite sum handled by undetermined coefficients.
    Atoms(Vec<ForcingAtom>),
    /// Arbitrary g for variation of parameters; t_min guards a singular
    /// lower end (evaluation and integration refuse t < t_min).
    Custom { g: ScalarFn, t_min: f64 },
}

impl ForcingTerm {
    pub fn atoms(atoms: Vec<ForcingAtom>) -> Self {
        ForcingTerm::Atoms(atoms)
    }

    pub fn custom(g: impl Fn(f64) -> f64 + Send + Sync + 'static, t_min: f64) -> Self {
        ForcingTerm::Custom { g: Arc::new(g), t_min }
    }

    pub fn term_sum(&self) -> Result<TermSum> {
        match self {
            ForcingTerm::Atoms(atoms) => {
                let mut terms = Vec::new();
                for a in atoms {
                    terms.extend(a.canonical_terms()?);
                }
                Ok(TermSum::from_terms(terms))
            }
            ForcingTerm::Custom { .. } => {
                Err(Error::Problem("arbitrary forcing has no closed atom form".into()))
            }
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        match self {
            ForcingTerm::Atoms(_) => Ok(self.term_sum()?.eval(t)),
            ForcingTerm::Custom { g, t_min } => {
                if t < *t_min {
                    return Err(Error::Integrand { at: t });
                }
                Ok(g(t))
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ForcingTerm::Atoms(atoms) => {
                atoms.iter().all(|a| a.poly.iter().all(|&c| c == 0.0))
            }
            ForcingTerm::Custom { .. } => false,
        }
    }

    fn t_min(&self) -> f64 {
        match self {
            ForcingTerm::Atoms(_) => f64::NEG_INFINITY,
            ForcingTerm::Custom { t_min, .. } => *t_min,
        }
    }
}

/// a_0 D^{nα}f + … + a_n f = g(S(x)), with optional initial values
/// (f, D^αf, …, D^{(n-1)α}f) at x_0 ∈ F.
#[derive(Clone)]
pub struct FODEProblem {
    /// a_0..a_n, highest derivative first.
    pub coeffs: Vec<f64>,
    pub forcing: Option<ForcingTerm>,
    pub ics: Option<Vec<f64>>,
    pub x0: f64,
    pub staircase: Staircase,
}

impl FODEProblem {
    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.order();
        if n < 1 {
            return Err(Error::Spec("equation order must be at least 1".into()));
        }
        if n > MAX_ORDER {
            return Err(Error::Spec(format!("order {n} exceeds the supported maximum {MAX_ORDER}")));
        }
        if self.coeffs[0] == 0.0 || !self.coeffs.iter().all(|c| c.is_finite()) {
            return Err(Error::DegenerateOrder);
        }
        if let Some(ics) = &self.ics {
            if ics.len() != n {
                return Err(Error::Spec(format!(
                    "expected {n} initial values, got {}",
                    ics.len()
                )));
            }
        }
        self.staircase.spec.validate()?;
        if !self.staircase.spec.contains(self.x0, self.staircase.depth) {
            return Err(Error::Spec(format!(
                "x0 = {} does not lie in the set at depth resolution",
                self.x0
            )));
        }
        Ok(())
    }
}

/// Z(r) = a_0 r^n + a_1 r^{n-1} + … + a_n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharPolynomial {
    pub coeffs: Vec<f64>,
}

pub fn characteristic_polynomial(p: &FODEProblem) -> Result<CharPolynomial> {
    p.validate()?;
    Ok(CharPolynomial { coeffs: p.coeffs.clone() })
}

/// Roots with multiplicities; conjugate pairs carry equal multiplicity and
/// the list is sorted by (Re, Im).
#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    pub roots: Vec<(Complex64, usize)>,
}

impl RootSet {
    pub fn total_multiplicity(&self) -> usize {
        self.roots.iter().map(|(_, m)| m).sum()
    }

    /// Multiplicity of z as a root, 0 if absent (within RES_TOL).
    fn multiplicity_at(&self, z: Complex64) -> usize {
        self.roots
            .iter()
            .find(|(r, _)| (r - z).norm() <= RES_TOL * r.norm().max(1.0))
            .map(|(_, m)| *m)
            .unwrap_or(0)
    }
}

fn poly_derivative(coeffs: &[f64]) -> Vec<f64> {
    let d = coeffs.len() - 1;
    (0..d).map(|i| coeffs[i] * (d - i) as f64).collect()
}

fn poly_eval(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs.iter().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Newton refinement on Z^{(mult-1)}, where a mult-fold root is simple.
/// Keeps the seed if the iteration wanders.
fn newton_polish(coeffs: &[f64], seed: Complex64, mult: usize) -> Complex64 {
    let mut p = coeffs.to_vec();
    for _ in 1..mult {
        p = poly_derivative(&p);
    }
    if p.len() < 2 {
        return seed;
    }
    let dp = poly_derivative(&p);
    let mut z = seed;
    for _ in 0..60 {
        let f = poly_eval(&p, z);
        let df = poly_eval(&dp, z);
        if df.norm() == 0.0 {
            break;
        }
        let step = f / df;
        let zn = z - step;
        if (zn - seed).norm() > 0.1 * seed.norm().max(1.0) {
            return seed;
        }
        z = zn;
        if step.norm() <= 1e-16 * z.norm().max(1.0) {
            break;
        }
    }
    z
}

/// Eigenvalues of the companion matrix of the monic form of `reduced`
/// (highest-first, nonzero ends). nalgebra's real Schur iteration can stall
/// on raw companion matrices whose spectrum is several purely imaginary
/// pairs, so on failure the matrix is retried under deterministic random
/// orthogonal similarities, which leave the spectrum untouched.
fn companion_eigenvalues(reduced: &[f64]) -> Result<Vec<Complex64>> {
    let d = reduced.len() - 1;
    if d == 0 {
        return Ok(Vec::new());
    }
    let mut comp = DMatrix::<f64>::zeros(d, d);
    for j in 0..d {
        comp[(0, j)] = -reduced[j + 1] / reduced[0];
    }
    for i in 1..d {
        comp[(i, i - 1)] = 1.0;
    }
    let mut m = comp.clone();
    let mut seed = 0x9e37_79b9_7f4a_7c15u64;
    for _attempt in 0..6 {
        if let Some(schur) = Schur::try_new(m, 1e-13, 20_000) {
            return Ok(schur.complex_eigenvalues().iter().copied().collect());
        }
        let mut q_src = DMatrix::<f64>::zeros(d, d);
        for v in q_src.iter_mut() {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            *v = ((seed >> 11) as f64) / ((1u64 << 53) as f64) - 0.5;
        }
        let q = q_src.qr().q();
        m = q.transpose() * &comp * &q;
    }
    Err(Error::RootFinding)
}

fn cluster_eigenvalues(eigs: &[Complex64], radius: f64) -> Vec<(Complex64, usize)> {
    let mut sorted = eigs.to_vec();
    sorted.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    for z in sorted {
        let mut best: Option<(usize, f64)> = None;
        for (idx, (c, _)) in clusters.iter().enumerate() {
            let d = (z - c).norm();
            if d <= radius * c.norm().max(1.0) && best.is_none_or(|(_, bd)| d < bd) {
                best = Some((idx, d));
            }
        }
        match best {
            Some((idx, _)) => {
                let (c, k) = clusters[idx];
                clusters[idx] = ((c * k as f64 + z) / (k as f64 + 1.0), k + 1);
            }
            None => clusters.push((z, 1)),
        }
    }
    clusters
}

/// Snap near-real clusters onto the axis and force exact conjugate pairs;
/// None when the cluster pattern cannot be paired at this radius.
fn symmetrize(
    clusters: Vec<(Complex64, usize)>,
    radius: f64,
) -> Option<Vec<(Complex64, usize)>> {
    let mut out: Vec<(Complex64, usize)> = Vec::new();
    let mut pos: Vec<(Complex64, usize)> = Vec::new();
    let mut neg: Vec<(Complex64, usize)> = Vec::new();
    for (z, m) in clusters {
        if z.im.abs() <= radius * z.norm().max(1.0) {
            out.push((Complex64::new(z.re, 0.0), m));
        } else if z.im > 0.0 {
            pos.push((z, m));
        } else {
            neg.push((z, m));
        }
    }
    if pos.len() != neg.len() {
        return None;
    }
    let mut used = vec![false; neg.len()];
    for (zp, mp) in pos {
        let mut best: Option<(usize, f64)> = None;
        for (i, (zn, mn)) in neg.iter().enumerate() {
            if used[i] || *mn != mp {
                continue;
            }
            let d = (zn.conj() - zp).norm();
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        let (i, d) = best?;
        if d > 2.0 * radius * zp.norm().max(1.0) {
            return None;
        }
        used[i] = true;
        let avg = (zp + neg[i].0.conj()) / 2.0;
        out.push((avg, mp));
        out.push((avg.conj(), mp));
    }
    Some(out)
}

/// Max relative coefficient error of a_0·Π(r - r_i)^{m_i} against the input,
/// imaginary residue included.
fn roundtrip_score(coeffs: &[f64], roots: &[(Complex64, usize)]) -> f64 {
    let mut poly = vec![Complex64::new(coeffs[0], 0.0)];
    for (z, m) in roots {
        for _ in 0..*m {
            let mut next = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
            for (i, slot) in next.iter_mut().enumerate() {
                if i < poly.len() {
                    *slot += poly[i];
                }
                if i > 0 {
                    *slot -= z * poly[i - 1];
                }
            }
            poly = next;
        }
    }
    let scale = coeffs.iter().fold(0.0f64, |a, &c| a.max(c.abs())).max(f64::MIN_POSITIVE);
    let mut worst = 0.0f64;
    for (i, &c) in coeffs.iter().enumerate() {
        worst = worst.max((poly[i].re - c).abs().max(poly[i].im.abs()));
    }
    worst / scale
}

/// All n roots of Z via companion-matrix eigenvalues, then multiplicity
/// recovery: candidate clusterings at a small ladder of radii (starting at
/// cluster_tol) are Newton-polished and scored by the root→coefficient
/// round-trip; among candidates that reproduce the coefficients, the fewest
/// distinct roots win. Exact multiple roots split by ~eps^{1/m} in floating
/// point, which a single fixed radius cannot recover for m ≥ 3.
pub fn find_roots(z: &CharPolynomial, cluster_tol: f64) -> Result<RootSet> {
    let coeffs = &z.coeffs;
    if coeffs.len() < 2 {
        return Err(Error::DegenerateOrder);
    }
    if coeffs[0] == 0.0 {
        return Err(Error::DegenerateOrder);
    }
    let n = coeffs.len() - 1;
    // strip exact zero roots first: trailing zero coefficients
    let tz = coeffs.iter().rev().take_while(|&&c| c == 0.0).count();
    let reduced = &coeffs[..coeffs.len() - tz];
    let d = reduced.len() - 1;
    let eigs = companion_eigenvalues(reduced)?;
    if !eigs.iter().all(|e| e.re.is_finite() && e.im.is_finite()) {
        return Err(Error::RootFinding);
    }

    // rungs up to eps^{1/m} for multiplicities through MAX_ORDER; the
    // roundtrip gate discards any rung that merges genuinely distinct roots
    let mut radii = vec![cluster_tol, 30.0 * cluster_tol, 1e-5, 3e-4, 1.5e-3, 6e-3, 2.5e-2];
    radii.retain(|&r| r >= cluster_tol);
    radii.sort_by(f64::total_cmp);
    radii.dedup();

    let mut candidates: Vec<(f64, Vec<(Complex64, usize)>)> = Vec::new();
    for &radius in &radii {
        let Some(sym) = symmetrize(cluster_eigenvalues(&eigs, radius), radius) else {
            continue;
        };
        if sym.iter().map(|(_, m)| m).sum::<usize>() != d {
            continue;
        }
        let mut polished: Vec<(Complex64, usize)> = Vec::new();
        for &(root, mult) in &sym {
            if root.im < 0.0 {
                continue; // filled in from the conjugate partner
            }
            let mut zp = newton_polish(reduced, root, mult);
            if zp.re.abs() <= 1e-13 * zp.norm() {
                zp.re = 0.0;
            }
            if root.im == 0.0 {
                polished.push((Complex64::new(zp.re, 0.0), mult));
            } else {
                polished.push((zp, mult));
                polished.push((zp.conj(), mult));
            }
        }
        if tz > 0 {
            polished.push((Complex64::new(0.0, 0.0), tz));
        }
        polished.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
        candidates.push((roundtrip_score(coeffs, &polished), polished));
    }
    if candidates.is_empty() {
        return Err(Error::RootFinding);
    }
    let best_score = candidates.iter().map(|(s, _)| *s).fold(f64::INFINITY, f64::min);
    let gate = (10.0 * best_score).max(1e-11);
    let chosen = candidates
        .iter()
        .filter(|(s, _)| *s <= gate)
        .min_by(|a, b| a.1.len().cmp(&b.1.len()).then(a.0.total_cmp(&b.0)))
        .ok_or(Error::RootFinding)?;
    let set = RootSet { roots: chosen.1.clone() };
    debug_assert_eq!(set.total_multiplicity(), n);
    Ok(set)
}

/// Fundamental set generated by the roots: per real root {t^k e^{λt}},
/// per conjugate pair the cos/sin pair, k below the multiplicity; sorted by
/// root, k-major, cos before sin.
pub fn basis_functions(roots: &RootSet) -> Vec<BasisFn> {
    let mut sorted = roots.roots.clone();
    sorted.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    let mut out = Vec::new();
    for (z, mult) in sorted {
        if z.im < 0.0 {
            continue;
        }
        for k in 0..mult {
            if z.im == 0.0 {
                out.push(BasisFn { k: k as u32, lambda: z.re, mu: 0.0, trig: Trig::None });
            } else {
                out.push(BasisFn { k: k as u32, lambda: z.re, mu: z.im, trig: Trig::Cos });
                out.push(BasisFn { k: k as u32, lambda: z.re, mu: z.im, trig: Trig::Sin });
            }
        }
    }
    out
}

/// Collocation matrix: entry (j, i) is the j-th derivative of basis i at t.
pub(crate) fn wronskian_matrix(basis: &[BasisFn], t: f64) -> DMatrix<f64> {
    let n = basis.len();
    let mut m = DMatrix::zeros(n, n);
    for (i, b) in basis.iter().enumerate() {
        let ladder = b.term_sum().derivatives(n.saturating_sub(1));
        for j in 0..n {
            m[(j, i)] = ladder[j].eval(t);
        }
    }
    m
}

pub fn wronskian(basis: &[BasisFn], t: f64) -> f64 {
    wronskian_matrix(basis, t).determinant()
}

/// Solves M c = rhs with a pivot-ratio singularity guard.
fn solve_collocation(m: DMatrix<f64>, rhs: &[f64], t: f64) -> Result<Vec<f64>> {
    let lu = m.lu();
    let det = lu.determinant();
    let diag = lu.u().diagonal();
    let dmax = diag.iter().fold(0.0f64, |a, d| a.max(d.abs()));
    let dmin = diag.iter().fold(f64::INFINITY, |a, d| a.min(d.abs()));
    if !det.is_finite() || dmax == 0.0 || dmin <= 1e-12 * dmax {
        return Err(Error::DependentBasis { t, det });
    }
    let sol = lu
        .solve(&DVector::from_column_slice(rhs))
        .ok_or(Error::DependentBasis { t, det })?;
    Ok(sol.iter().copied().collect())
}

/// Particular solution F(x) = Σ_m f_m(S(x))·∫_{t0}^{S(x)} u'_m du with the
/// Cramer rates u'_m solved from the Wronskian system per sample. By
/// construction F and its first n-1 derivatives vanish at the anchor.
#[derive(Clone)]
pub struct VopParticular {
    core: Arc<VopCore>,
}

enum GEval {
    Sum(TermSum),
    Fn(ScalarFn),
}

impl GEval {
    fn eval(&self, t: f64) -> f64 {
        match self {
            GEval::Sum(s) => s.eval(t),
            GEval::Fn(f) => f(t),
        }
    }
}

struct VopCore {
    /// ladders[i][j]: j-th derivative of basis i, j ≤ n-1.
    ladders: Vec<Vec<TermSum>>,
    /// L[f_i]; symbolically zero, kept so residuals stay assembly-exact.
    op_applied: Vec<TermSum>,
    a0: f64,
    g: GEval,
    t0: f64,
    t_min: f64,
    cells: usize,
    cache: Mutex<HashMap<u64, Vec<f64>>>,
}

impl VopParticular {
    pub fn new(p: &FODEProblem) -> Result<Self> {
        let roots = find_roots(&characteristic_polynomial(p)?, DEFAULT_CLUSTER_TOL)?;
        Self::from_parts(basis_functions(&roots), p, DEFAULT_CELLS)
    }

    pub(crate) fn from_parts(basis: Vec<BasisFn>, p: &FODEProblem, cells: usize) -> Result<Self> {
        let n = p.order();
        let forcing = p
            .forcing
            .as_ref()
            .ok_or_else(|| Error::Problem("variation of parameters needs a forcing term".into()))?;
        let g = match forcing {
            ForcingTerm::Custom { g, .. } => GEval::Fn(g.clone()),
            ForcingTerm::Atoms(_) => GEval::Sum(forcing.term_sum()?),
        };
        let t0 = p.staircase.eval(p.x0)?;
        let t_min = forcing.t_min();
        if t0 < t_min {
            return Err(Error::Integrand { at: t0 });
        }
        let ladders: Vec<Vec<TermSum>> =
            basis.iter().map(|b| b.term_sum().derivatives(n - 1)).collect();
        let op_applied = basis.iter().map(|b| b.term_sum().apply_operator(&p.coeffs)).collect();
        Ok(VopParticular {
            core: Arc::new(VopCore {
                ladders,
                op_applied,
                a0: p.coeffs[0],
                g,
                t0,
                t_min,
                cells: cells.max(2),
                cache: Mutex::new(HashMap::new()),
            }),
        })
    }

    pub fn anchor(&self) -> f64 {
        self.core.t0
    }

    /// Lower bound below which the forcing (and so the particular term)
    /// refuses to evaluate.
    pub fn t_min(&self) -> f64 {
        self.core.t_min
    }

    pub fn value_t(&self, t: f64) -> Result<f64> {
        let ims = self.core.integrals(t)?;
        Ok(self
            .core
            .ladders
            .iter()
            .zip(&ims)
            .map(|(l, im)| l[0].eval(t) * im)
            .sum())
    }

    /// j-th derivative at t for j ≤ n-1; the Cramer construction kills the
    /// u'-cross-terms below order n, so the ladder is Σ f_m^{(j)}·I_m.
    pub fn derivative_t(&self, t: f64, j: usize) -> Result<f64> {
        let ims = self.core.integrals(t)?;
        Ok(self
            .core
            .ladders
            .iter()
            .zip(&ims)
            .map(|(l, im)| l[j].eval(t) * im)
            .sum())
    }
}

impl VopCore {
    fn rates(&self, u: f64) -> Result<Vec<f64>> {
        let n = self.ladders.len();
        let gv = self.g.eval(u);
        if !gv.is_finite() {
            return Err(Error::Integrand { at: u });
        }
        let mut m = DMatrix::zeros(n, n);
        for (i, ladder) in self.ladders.iter().enumerate() {
            for j in 0..n {
                m[(j, i)] = ladder[j].eval(u);
            }
        }
        let mut rhs = vec![0.0; n];
        rhs[n - 1] = gv / self.a0;
        solve_collocation(m, &rhs, u)
    }

    fn midpoint(&self, t: f64, cells: usize) -> Result<Vec<f64>> {
        let n = self.ladders.len();
        let du = (t - self.t0) / cells as f64;
        let mut sums = vec![0.0; n];
        if du == 0.0 {
            return Ok(sums);
        }
        for i in 0..cells {
            let u = self.t0 + (i as f64 + 0.5) * du;
            let r = self.rates(u)?;
            for (s, v) in sums.iter_mut().zip(&r) {
                *s += v;
            }
        }
        for s in &mut sums {
            *s *= du;
        }
        Ok(sums)
    }

    /// I_m(t) by two midpoint passes combined to O(n^{-4}).
    fn integrals(&self, t: f64) -> Result<Vec<f64>> {
        if t < self.t_min {
            return Err(Error::Integrand { at: t });
        }
        let key = t.to_bits();
        if let Some(hit) = self.cache.lock().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let fine = self.midpoint(t, self.cells)?;
        let coarse = self.midpoint(t, self.cells / 2)?;
        let combined: Vec<f64> =
            fine.iter().zip(&coarse).map(|(f, c)| (4.0 * f - c) / 3.0).collect();
        self.cache.lock().unwrap().insert(key, combined.clone());
        Ok(combined)
    }
}

/// Closed-form or quadrature-backed particular term.
#[derive(Clone)]
pub enum Particular {
    ClosedForm(TermSum),
    Quadrature(VopParticular),
}

impl Particular {
    pub fn value_t(&self, t: f64) -> Result<f64> {
        match self {
            Particular::ClosedForm(ts) => Ok(ts.eval(t)),
            Particular::Quadrature(vp) => vp.value_t(t),
        }
    }
}

/// General solution f = Σ c_i f_i + F in the staircase coordinate.
#[derive(Clone)]
pub struct FODESolution {
    pub basis: Vec<BasisFn>,
    /// None when the problem came without initial values (free constants).
    pub hom_coeffs: Option<Vec<f64>>,
    pub particular: Option<Particular>,
    pub roots: RootSet,
    pub staircase: Staircase,
    pub x0: f64,
}

impl FODESolution {
    /// Homogeneous part as one closed-form sum (zero if no coefficients).
    pub fn homogeneous_sum(&self) -> TermSum {
        let mut out = TermSum::zero();
        if let Some(c) = &self.hom_coeffs {
            for (ci, b) in c.iter().zip(&self.basis) {
                out = out.add(&b.term_sum().scaled(*ci));
            }
        }
        out
    }

    /// All closed-form content (homogeneous plus closed particular).
    fn closed_sum(&self) -> TermSum {
        let mut out = self.homogeneous_sum();
        if let Some(Particular::ClosedForm(ts)) = &self.particular {
            out = out.add(ts);
        }
        out
    }

    pub fn eval_t(&self, t: f64) -> Result<f64> {
        let mut v = self.closed_sum().eval(t);
        if let Some(Particular::Quadrature(vp)) = &self.particular {
            v += vp.value_t(t)?;
        }
        Ok(v)
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let t = self.staircase.eval(x)?;
        self.eval_t(t)
    }

    /// Derivative ladder value D^{jα}f at staircase coordinate t, j ≤ n-1.
    pub fn derivative_t(&self, t: f64, j: usize) -> Result<f64> {
        let mut v = self.closed_sum().derivatives(j)[j].eval(t);
        if let Some(Particular::Quadrature(vp)) = &self.particular {
            v += vp.derivative_t(t, j)?;
        }
        Ok(v)
    }
}

fn hom_coefficients(basis: &[BasisFn], t0: f64, rhs: &[f64]) -> Result<Vec<f64>> {
    solve_collocation(wronskian_matrix(basis, t0), rhs, t0)
}

/// Solves the initial-value problem for a forcing-free equation.
pub fn solve_homogeneous_ivp(p: &FODEProblem) -> Result<FODESolution> {
    if p.forcing.as_ref().is_some_and(|f| !f.is_zero()) {
        return Err(Error::Problem("homogeneous solver got a nonzero forcing; use solve".into()));
    }
    let mut hp = p.clone();
    hp.forcing = None;
    if hp.ics.is_none() {
        return Err(Error::Problem("initial values are required".into()));
    }
    solve(&hp)
}

/// Closed-form particular solution by undetermined coefficients. Forcing
/// must be in atom form; each (λ, μ) group gets the ansatz
/// t^s·(polynomial)·e^{λt}·{cos, sin} with s the resonance multiplicity,
/// and unknowns are matched coefficient-by-coefficient.
pub fn undetermined_coefficients(p: &FODEProblem) -> Result<TermSum> {
    p.validate()?;
    let forcing = match &p.forcing {
        None => return Ok(TermSum::zero()),
        Some(ForcingTerm::Custom { .. }) => {
            return Err(Error::Problem(
                "arbitrary forcing is out of reach for undetermined coefficients; \
                 use variation_of_parameters"
                    .into(),
            ))
        }
        Some(f @ ForcingTerm::Atoms(_)) => f,
    };
    let g_sum = forcing.term_sum()?;
    if g_sum.is_zero() {
        return Ok(TermSum::zero());
    }
    let roots = find_roots(&characteristic_polynomial(p)?, DEFAULT_CLUSTER_TOL)?;

    // group forcing terms by exponent (λ, μ)
    let mut groups: Vec<((u64, u64), Vec<Term>)> = Vec::new();
    for term in &g_sum.terms {
        let key = (term.lambda.to_bits(), term.mu.to_bits());
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(*term),
            None => groups.push((key, vec![*term])),
        }
    }

    let mut total = TermSum::zero();
    for (_, terms) in groups {
        let lambda = terms[0].lambda;
        let mu = terms[0].mu;
        let deg = terms.iter().map(|t| t.k).max().unwrap() as usize;
        let s = roots.multiplicity_at(Complex64::new(lambda, mu)) as u32;
        let mut unknowns: Vec<Term> = Vec::new();
        for j in 0..=deg as u32 {
            if mu == 0.0 {
                unknowns.push(Term::new(1.0, s + j, lambda, 0.0, Trig::None));
            } else {
                unknowns.push(Term::new(1.0, s + j, lambda, mu, Trig::Cos));
                unknowns.push(Term::new(1.0, s + j, lambda, mu, Trig::Sin));
            }
        }
        let images: Vec<TermSum> = unknowns
            .iter()
            .map(|u| TermSum::from_terms(vec![*u]).apply_operator(&p.coeffs))
            .collect();

        // coefficient-matching system over the union of term keys
        let mut keys: Vec<(u64, u64, Trig, u32)> = Vec::new();
        let key_of = |t: &Term, keys: &mut Vec<(u64, u64, Trig, u32)>| {
            let k = (t.lambda.to_bits(), t.mu.to_bits(), t.trig, t.k);
            if let Some(pos) = keys.iter().position(|e| *e == k) {
                pos
            } else {
                keys.push(k);
                keys.len() - 1
            }
        };
        let mut entries: Vec<(usize, usize, f64)> = Vec::new();
        for (col, img) in images.iter().enumerate() {
            for t in &img.terms {
                entries.push((key_of(t, &mut keys), col, t.coeff));
            }
        }
        let mut rhs_entries: Vec<(usize, f64)> = Vec::new();
        for t in &terms {
            rhs_entries.push((key_of(t, &mut keys), t.coeff));
        }
        let mut a = DMatrix::<f64>::zeros(keys.len(), unknowns.len());
        for (row, col, v) in entries {
            a[(row, col)] += v;
        }
        let mut b = DVector::<f64>::zeros(keys.len());
        for (row, v) in rhs_entries {
            b[row] += v;
        }
        let svd = a.svd(true, true);
        let sol = svd
            .solve(&b, 1e-13)
            .map_err(|_| Error::Problem("coefficient matching failed".into()))?;

        let mut part_terms: Vec<Term> = Vec::new();
        for (u, c) in unknowns.iter().zip(sol.iter()) {
            part_terms.push(Term { coeff: *c, ..*u });
        }
        let part = TermSum::from_terms(part_terms);
        // the match must actually reproduce the forcing group
        let check = part.apply_operator(&p.coeffs).add(&TermSum::from_terms(terms).scaled(-1.0));
        let scale = g_sum.max_abs_coeff().max(1.0);
        if check.max_abs_coeff() > 1e-9 * scale {
            return Err(Error::Problem(
                "undetermined coefficients could not reproduce the forcing".into(),
            ));
        }
        total = total.add(&part);
    }
    Ok(total)
}

/// Particular-solution value F(x) by variation of parameters.
pub fn variation_of_parameters(p: &FODEProblem, x: f64) -> Result<f64> {
    p.validate()?;
    let vp = VopParticular::new(p)?;
    vp.value_t(p.staircase.eval(x)?)
}

/// Full pipeline: roots, basis, particular term (undetermined coefficients
/// for atom forcing, variation of parameters otherwise), then collocation
/// for the initial values if present.
pub fn solve(p: &FODEProblem) -> Result<FODESolution> {
    p.validate()?;
    let roots = find_roots(&characteristic_polynomial(p)?, DEFAULT_CLUSTER_TOL)?;
    let basis = basis_functions(&roots);
    let n = p.order();
    let particular = match &p.forcing {
        None => None,
        Some(f) if f.is_zero() => None,
        Some(ForcingTerm::Atoms(_)) => Some(Particular::ClosedForm(undetermined_coefficients(p)?)),
        Some(ForcingTerm::Custom { .. }) => {
            Some(Particular::Quadrature(VopParticular::from_parts(
                basis.clone(),
                p,
                DEFAULT_CELLS,
            )?))
        }
    };
    let hom_coeffs = match &p.ics {
        None => None,
        Some(ics) => {
            let t0 = p.staircase.eval(p.x0)?;
            let mut rhs = ics.clone();
            if let Some(Particular::ClosedForm(ts)) = &particular {
                let ladder = ts.derivatives(n - 1);
                for (j, r) in rhs.iter_mut().enumerate() {
                    *r -= ladder[j].eval(t0);
                }
            }
            // a quadrature particular is anchored at t0 with a zero ladder,
            // so it leaves the right-hand side untouched
            Some(hom_coefficients(&basis, t0, &rhs)?)
        }
    };
    Ok(FODESolution { basis, hom_coeffs, particular, roots, staircase: p.staircase, x0: p.x0 })
}

/// |L[f](t) - g(t)| at t = S(x). Closed-form parts differentiate exactly;
/// the quadrature part uses L[f_m] and the Cramer identity
/// a_0·Σ f_m^{(n-1)}·u'_m = g, so no numeric differentiation enters.
pub fn residual(sol: &FODESolution, p: &FODEProblem, x: f64) -> Result<f64> {
    let t = sol.staircase.eval(x)?;
    let mut val = sol.closed_sum().apply_operator(&p.coeffs).eval(t);
    if let Some(Particular::Quadrature(vp)) = &sol.particular {
        let n = p.order();
        let ims = vp.core.integrals(t)?;
        let rates = vp.core.rates(t)?;
        for m in 0..n {
            val += vp.core.op_applied[m].eval(t) * ims[m];
            val += p.coeffs[0] * vp.core.ladders[m][n - 1].eval(t) * rates[m];
        }
    }
    let g = match &p.forcing {
        None => 0.0,
        Some(f) => f.eval(t)?,
    };
    Ok((val - g).abs())
}

/// Per-order absolute mismatch between the solution's derivative ladder at
/// x0 and the problem's initial values; empty when the problem has none.
pub fn ic_mismatch(sol: &FODESolution, p: &FODEProblem) -> Result<Vec<f64>> {
    let Some(ics) = &p.ics else {
        return Ok(Vec::new());
    };
    let t0 = sol.staircase.eval(p.x0)?;
    let mut out = Vec::with_capacity(ics.len());
    for (j, &want) in ics.iter().enumerate() {
        out.push((sol.derivative_t(t0, j)? - want).abs());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fractal_set::CantorSpec;
    use approx::assert_abs_diff_eq;

    fn triadic() -> Staircase {
        Staircase::new(CantorSpec::triadic())
    }

    fn problem(coeffs: Vec<f64>, forcing: Option<ForcingTerm>, ics: Option<Vec<f64>>) -> FODEProblem {
        FODEProblem { coeffs, forcing, ics, x0: 0.0, staircase: triadic() }
    }

    fn root_at(set: &RootSet, re: f64, im: f64) -> (Complex64, usize) {
        *set.roots
            .iter()
            .find(|(z, _)| (z - Complex64::new(re, im)).norm() < 1e-6)
            .unwrap_or_else(|| panic!("no root near {re}+{im}i in {:?}", set.roots))
    }

    #[test]
    fn characteristic_polynomial_copies_coefficients() {
        let p = problem(vec![1.0, 0.0, 2.0, 0.0, 1.0], None, None);
        assert_eq!(characteristic_polynomial(&p).unwrap().coeffs, p.coeffs);
        let q = problem(vec![1.0, -3.0, 3.0, -1.0], None, None);
        assert_eq!(characteristic_polynomial(&q).unwrap().coeffs, q.coeffs);
        let lin = problem(vec![1.0, 0.0], None, None);
        assert_eq!(characteristic_polynomial(&lin).unwrap().coeffs, vec![1.0, 0.0]);
        let degenerate = problem(vec![0.0, 1.0], None, None);
        assert!(matches!(characteristic_polynomial(&degenerate), Err(Error::DegenerateOrder)));
    }

    #[test]
    fn problem_validation() {
        assert!(problem(vec![1.0], None, None).validate().is_err());
        assert!(problem(vec![1.0, 1.0], None, Some(vec![1.0, 2.0])).validate().is_err());
        assert!(problem(vec![1.0; 12], None, None).validate().is_err());
        let mut off_set = problem(vec![1.0, 1.0], None, None);
        off_set.x0 = 0.5;
        assert!(off_set.validate().is_err());
    }

    #[test]
    fn roots_two_imaginary_pairs() {
        // nalgebra's raw Schur stalls on this companion matrix; the rotated
        // retry has to kick in
        let set =
            find_roots(&CharPolynomial { coeffs: vec![1.0, 0.0, 7.0, 0.0, 6.0] }, 1e-7).unwrap();
        assert_eq!(set.roots.len(), 4);
        for (re, im) in [(0.0, 1.0), (0.0, -1.0), (0.0, 6.0f64.sqrt()), (0.0, -(6.0f64.sqrt()))] {
            let (z, m) = root_at(&set, re, im);
            assert_eq!(m, 1);
            assert!((z - Complex64::new(re, im)).norm() < 1e-10);
        }
    }

    #[test]
    fn roots_double_imaginary_pair() {
        let z = CharPolynomial { coeffs: vec![1.0, 0.0, 2.0, 0.0, 1.0] };
        let set = find_roots(&z, DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(set.roots.len(), 2);
        let (zi, mi) = root_at(&set, 0.0, 1.0);
        assert_eq!(mi, 2);
        assert!((zi - Complex64::new(0.0, 1.0)).norm() < 1e-10);
        let (zc, mc) = root_at(&set, 0.0, -1.0);
        assert_eq!(mc, 2);
        assert_eq!(zc, zi.conj());
    }

    #[test]
    fn roots_triple_real() {
        let z = CharPolynomial { coeffs: vec![1.0, -3.0, 3.0, -1.0] };
        let set = find_roots(&z, DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(set.roots.len(), 1);
        let (z1, m1) = set.roots[0];
        assert_eq!(m1, 3);
        assert!(z1.im == 0.0 && (z1.re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn roots_mixed_multiplicities() {
        let z = CharPolynomial { coeffs: vec![1.0, -1.0, -1.0, 1.0] };
        let set = find_roots(&z, DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(root_at(&set, 1.0, 0.0).1, 2);
        assert_eq!(root_at(&set, -1.0, 0.0).1, 1);
        assert!((root_at(&set, 1.0, 0.0).0.re - 1.0).abs() < 1e-10);
        assert!((root_at(&set, -1.0, 0.0).0.re + 1.0).abs() < 1e-10);
    }

    #[test]
    fn roots_zero_and_quadruple() {
        let set = find_roots(&CharPolynomial { coeffs: vec![1.0, 0.0] }, 1e-7).unwrap();
        assert_eq!(set.roots, vec![(Complex64::new(0.0, 0.0), 1)]);
        // (r-1)^4 splits ~eps^{1/4} in floating point
        let set4 = find_roots(&CharPolynomial { coeffs: vec![1.0, -4.0, 6.0, -4.0, 1.0] }, 1e-7)
            .unwrap();
        assert_eq!(set4.roots.len(), 1);
        assert_eq!(set4.roots[0].1, 4);
        assert!((set4.roots[0].0.re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn roots_distinct_stay_distinct() {
        // close but genuinely separate roots must not merge
        let z = CharPolynomial { coeffs: vec![1.0, -(2.0 + 1e-3), 1.0 + 1e-3] };
        let set = find_roots(&z, DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(set.roots.len(), 2, "{:?}", set.roots);
        assert!((root_at(&set, 1.0, 0.0).0.re - 1.0).abs() < 1e-9);
        assert!((root_at(&set, 1.001, 0.0).0.re - 1.001).abs() < 1e-9);
    }

    #[test]
    fn basis_ordering() {
        let pair = RootSet {
            roots: vec![
                (Complex64::new(0.0, 1.0), 2),
                (Complex64::new(0.0, -1.0), 2),
            ],
        };
        let b = basis_functions(&pair);
        let shape: Vec<(u32, Trig)> = b.iter().map(|f| (f.k, f.trig)).collect();
        assert_eq!(shape, vec![(0, Trig::Cos), (0, Trig::Sin), (1, Trig::Cos), (1, Trig::Sin)]);

        let triple = RootSet { roots: vec![(Complex64::new(1.0, 0.0), 3)] };
        let b3 = basis_functions(&triple);
        assert_eq!(b3.len(), 3);
        assert!(b3.iter().enumerate().all(|(k, f)| f.k == k as u32 && f.lambda == 1.0));

        let unit = RootSet { roots: vec![(Complex64::new(0.0, 0.0), 1)] };
        let b1 = basis_functions(&unit);
        assert_eq!(b1, vec![BasisFn { k: 0, lambda: 0.0, mu: 0.0, trig: Trig::None }]);
        assert_eq!(b1[0].eval(3.7), 1.0);
    }

    #[test]
    fn wronskian_examples() {
        let spec_order = [
            BasisFn { k: 0, lambda: 1.0, mu: 0.0, trig: Trig::None },
            BasisFn { k: 1, lambda: 1.0, mu: 0.0, trig: Trig::None },
            BasisFn { k: 0, lambda: -1.0, mu: 0.0, trig: Trig::None },
        ];
        assert_abs_diff_eq!(wronskian(&spec_order, 0.0), 4.0, epsilon = 1e-12);

        let one = [BasisFn { k: 0, lambda: 0.0, mu: 0.0, trig: Trig::None }];
        assert_eq!(wronskian(&one, 1.23), 1.0);

        let osc = [
            BasisFn { k: 0, lambda: 0.0, mu: 1.0, trig: Trig::Cos },
            BasisFn { k: 0, lambda: 0.0, mu: 1.0, trig: Trig::Sin },
            BasisFn { k: 1, lambda: 0.0, mu: 1.0, trig: Trig::Cos },
            BasisFn { k: 1, lambda: 0.0, mu: 1.0, trig: Trig::Sin },
        ];
        assert_abs_diff_eq!(wronskian(&osc, 0.0), 4.0, epsilon = 1e-12);
    }

    #[test]
    fn homogeneous_ivp_spring_families() {
        let a = problem(vec![1.0, 0.0, 7.0, 0.0, 6.0], None, Some(vec![1.0, 0.0, -1.0, 0.0]));
        let sol = solve_homogeneous_ivp(&a).unwrap();
        let c = sol.hom_coeffs.as_ref().unwrap();
        let want = [1.0, 0.0, 0.0, 0.0];
        for (got, want) in c.iter().zip(want) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-10);
        }
        let t = 0.7;
        assert_abs_diff_eq!(sol.eval_t(t).unwrap(), t.cos(), epsilon = 1e-10);

        let b = problem(vec![1.0, 0.0, 7.0, 0.0, 6.0], None, Some(vec![-2.0, 0.0, 12.0, 0.0]));
        let sol_b = solve_homogeneous_ivp(&b).unwrap();
        let t = 0.31;
        assert_abs_diff_eq!(
            sol_b.eval_t(t).unwrap(),
            -2.0 * (6.0f64.sqrt() * t).cos(),
            epsilon = 1e-10
        );
    }

    #[test]
    fn homogeneous_ivp_constant() {
        let p = problem(vec![1.0, 0.0], None, Some(vec![5.0]));
        let sol = solve_homogeneous_ivp(&p).unwrap();
        assert_abs_diff_eq!(sol.eval_t(4.2).unwrap(), 5.0, epsilon = 1e-12);
    }

    #[test]
    fn uc_resonant_cubic() {
        let forcing = ForcingTerm::atoms(vec![ForcingAtom {
            poly: vec![4.0],
            lambda: 1.0,
            mu: 0.0,
            trig: Trig::None,
        }]);
        let p = problem(vec![1.0, -3.0, 3.0, -1.0], Some(forcing), None);
        let part = undetermined_coefficients(&p).unwrap();
        assert_eq!(part.terms.len(), 1);
        let t = part.terms[0];
        assert_eq!((t.k, t.lambda, t.trig), (3, 1.0, Trig::None));
        assert!((t.coeff - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn uc_zero_forcing_and_nonresonant_cos() {
        let p0 = problem(vec![1.0, 0.0, 1.0], None, None);
        assert!(undetermined_coefficients(&p0).unwrap().is_zero());

        let forcing = ForcingTerm::atoms(vec![ForcingAtom {
            poly: vec![1.0],
            lambda: 0.0,
            mu: 2.0,
            trig: Trig::Cos,
        }]);
        let p = problem(vec![1.0, 0.0, 1.0], Some(forcing), None);
        let part = undetermined_coefficients(&p).unwrap();
        assert_eq!(part.terms.len(), 1);
        let t = part.terms[0];
        assert_eq!((t.k, t.mu, t.trig), (0, 2.0, Trig::Cos));
        assert!((t.coeff + 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn vop_zero_forcing_vanishes() {
        let p = problem(
            vec![1.0, -1.0, -1.0, 1.0],
            Some(ForcingTerm::custom(|_| 0.0, f64::NEG_INFINITY)),
            None,
        );
        assert_abs_diff_eq!(variation_of_parameters(&p, 1.0).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn vop_matches_known_particular() {
        // f' - f = e^{2t}: particular e^{2t}, vop form is anchored to a zero
        // value at t0 = 0, i.e. e^{2t} - e^t
        let p = problem(
            vec![1.0, -1.0],
            Some(ForcingTerm::custom(|t: f64| (2.0 * t).exp(), f64::NEG_INFINITY)),
            None,
        );
        for x in [1.0 / 3.0, 1.0] {
            let t = p.staircase.eval(x).unwrap();
            let got = variation_of_parameters(&p, x).unwrap();
            let want = (2.0 * t).exp() - t.exp();
            assert_abs_diff_eq!(got, want, epsilon = 1e-9);
        }
    }

    #[test]
    fn solve_attaches_quadrature_particular_with_ics() {
        let p = problem(
            vec![1.0, -1.0],
            Some(ForcingTerm::custom(|t: f64| (2.0 * t).exp(), f64::NEG_INFINITY)),
            Some(vec![3.0]),
        );
        let sol = solve(&p).unwrap();
        let mm = ic_mismatch(&sol, &p).unwrap();
        assert!(mm[0] < 1e-12);
        // closed form: f = e^{2t} + 2 e^t
        let t = p.staircase.eval(1.0).unwrap();
        assert_abs_diff_eq!(sol.eval_t(t).unwrap(), (2.0 * t).exp() + 2.0 * t.exp(), epsilon = 1e-8);
        assert!(residual(&sol, &p, 2.0 / 3.0).unwrap() < 1e-10);
    }

    #[test]
    fn residual_and_ic_checker_disentangle() {
        let p = problem(vec![1.0, 0.0, 7.0, 0.0, 6.0], None, Some(vec![1.0, 0.0, -1.0, 0.0]));
        let mut sol = solve_homogeneous_ivp(&p).unwrap();
        for x in [0.0, 1.0 / 3.0, 1.0] {
            assert!(residual(&sol, &p, x).unwrap() < 1e-12);
        }
        assert!(ic_mismatch(&sol, &p).unwrap().iter().all(|&m| m < 1e-10));
        // perturbing a homogeneous coefficient keeps the residual at zero
        // but the IC checker sees it
        sol.hom_coeffs.as_mut().unwrap()[0] += 0.1;
        assert!(residual(&sol, &p, 1.0).unwrap() < 1e-12);
        let mm = ic_mismatch(&sol, &p).unwrap();
        assert_abs_diff_eq!(mm[0], 0.1, epsilon = 1e-12);
    }

    #[test]
    fn singular_anchor_is_refused() {
        let p = problem(
            vec![1.0, -1.0, -1.0, 1.0],
            Some(ForcingTerm::custom(|t: f64| t.powi(-2) * t.exp(), 1e-6)),
            Some(vec![0.0, 0.0, 0.0]),
        );
        // x0 = 0 puts the anchor exactly on the ln-singularity
        assert!(matches!(solve(&p), Err(Error::Integrand { .. })));
    }

    #[test]
    fn dependent_basis_detected() {
        let dup = [
            BasisFn { k: 0, lambda: 1.0, mu: 0.0, trig: Trig::None },
            BasisFn { k: 0, lambda: 1.0, mu: 0.0, trig: Trig::None },
        ];
        assert!(matches!(
            hom_coefficients(&dup, 0.0, &[1.0, 0.0]),
            Err(Error::DependentBasis { .. })
        ));
    }

    #[test]
    fn forcing_atom_canonicalization() {
        let neg_mu = ForcingAtom { poly: vec![2.0], lambda: 0.0, mu: -3.0, trig: Trig::Sin };
        let terms = neg_mu.canonical_terms().unwrap();
        assert_eq!(terms.len(), 1);
        assert_eq!((terms[0].coeff, terms[0].mu, terms[0].trig), (-2.0, 3.0, Trig::Sin));

        let cos0 = ForcingAtom { poly: vec![1.0, 1.0], lambda: 0.5, mu: 0.0, trig: Trig::Cos };
        assert!(cos0.canonical_terms().unwrap().iter().all(|t| t.trig == Trig::None));

        let bad = ForcingAtom { poly: vec![1.0], lambda: 0.0, mu: 1.0, trig: Trig::None };
        assert!(bad.canonical_terms().is_err());
    }
}
