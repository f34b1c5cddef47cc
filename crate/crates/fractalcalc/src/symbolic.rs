//! Closed-form terms c·t^k·e^{λt}·{1, cos(μt), sin(μt)} and sums thereof.
//!
//! The family is closed under differentiation, which keeps Wronskians,
//! collocation rows and residuals exact up to round-off; no numeric
//! differentiation happens anywhere in the solver.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Trig {
    None,
    Cos,
    Sin,
}

impl Trig {
    fn eval(self, y: f64) -> f64 {
        match self {
            Trig::None => 1.0,
            Trig::Cos => y.cos(),
            Trig::Sin => y.sin(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coeff: f64,
    pub k: u32,
    pub lambda: f64,
    pub mu: f64,
    pub trig: Trig,
}

impl Term {
    pub fn new(coeff: f64, k: u32, lambda: f64, mu: f64, trig: Trig) -> Self {
        debug_assert!(mu >= 0.0);
        debug_assert!((trig == Trig::None) == (mu == 0.0));
        // normalize -0.0 so merge keys compare bitwise
        let lambda = if lambda == 0.0 { 0.0 } else { lambda };
        let mu = if mu == 0.0 { 0.0 } else { mu };
        Term { coeff, k, lambda, mu, trig }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeff * t.powi(self.k as i32) * (self.lambda * t).exp() * self.trig.eval(self.mu * t)
    }

    fn key(&self) -> (u64, u64, Trig, u32) {
        (self.lambda.to_bits(), self.mu.to_bits(), self.trig, self.k)
    }

    /// Product-rule derivative; up to three terms.
    fn derivative(&self) -> Vec<Term> {
        let mut out = Vec::with_capacity(3);
        if self.k > 0 {
            out.push(Term::new(
                self.coeff * self.k as f64,
                self.k - 1,
                self.lambda,
                self.mu,
                self.trig,
            ));
        }
        if self.lambda != 0.0 {
            out.push(Term::new(self.coeff * self.lambda, self.k, self.lambda, self.mu, self.trig));
        }
        match self.trig {
            Trig::None => {}
            Trig::Cos => {
                out.push(Term::new(-self.coeff * self.mu, self.k, self.lambda, self.mu, Trig::Sin))
            }
            Trig::Sin => {
                out.push(Term::new(self.coeff * self.mu, self.k, self.lambda, self.mu, Trig::Cos))
            }
        }
        out
    }
}

/// A finite sum of [`Term`]s, kept merged and deterministically ordered.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TermSum {
    pub terms: Vec<Term>,
}

impl TermSum {
    pub fn zero() -> Self {
        TermSum::default()
    }

    pub fn from_terms(terms: Vec<Term>) -> Self {
        let mut s = TermSum { terms };
        s.normalize();
        s
    }

    pub fn single(coeff: f64, k: u32, lambda: f64, mu: f64, trig: Trig) -> Self {
        TermSum::from_terms(vec![Term::new(coeff, k, lambda, mu, trig)])
    }

    fn normalize(&mut self) {
        self.terms.sort_by_key(Term::key);
        let mut merged: Vec<Term> = Vec::with_capacity(self.terms.len());
        for t in self.terms.drain(..) {
            match merged.last_mut() {
                Some(last) if last.key() == t.key() => last.coeff += t.coeff,
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coeff != 0.0);
        self.terms = merged;
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.terms.iter().map(|term| term.eval(t)).sum()
    }

    pub fn derivative(&self) -> TermSum {
        TermSum::from_terms(self.terms.iter().flat_map(|t| t.derivative()).collect())
    }

    /// `[self, self', ..., self^(n)]`.
    pub fn derivatives(&self, n: usize) -> Vec<TermSum> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(self.clone());
        for j in 0..n {
            let next = out[j].derivative();
            out.push(next);
        }
        out
    }

    pub fn scaled(&self, c: f64) -> TermSum {
        TermSum::from_terms(
            self.terms.iter().map(|t| Term { coeff: t.coeff * c, ..*t }).collect(),
        )
    }

    pub fn add(&self, other: &TermSum) -> TermSum {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        TermSum::from_terms(terms)
    }

    /// Applies Σ_j a_j D^{n-j} for coefficients ordered from the highest
    /// derivative down to the identity.
    pub fn apply_operator(&self, coeffs: &[f64]) -> TermSum {
        let n = coeffs.len() - 1;
        let ds = self.derivatives(n);
        let mut out = TermSum::zero();
        for (j, &a) in coeffs.iter().enumerate() {
            if a != 0.0 {
                out = out.add(&ds[n - j].scaled(a));
            }
        }
        out
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.abs()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}
