//! Packaged worked examples: each demo assembles a known problem on the
//! triadic-style set, solves it, and reports how far the computed solution
//! sits from the closed-form reference alongside the equation residual.

use crate::error::{Error, Result};
use crate::fode_solver::{
    basis_functions, characteristic_polynomial, find_roots, residual, solve,
    solve_homogeneous_ivp, wronskian_matrix, FODEProblem, FODESolution, ForcingAtom, ForcingTerm,
    DEFAULT_CLUSTER_TOL,
};
use crate::fractal_set::{CantorSpec, Staircase};
use crate::special::ei;
use crate::symbolic::{Term, TermSum, Trig};
use nalgebra::DVector;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DemoName {
    Oscillator4,
    Resonant3,
    Vop3,
    SpringMass,
}

impl DemoName {
    pub const ALL: [DemoName; 4] =
        [DemoName::Oscillator4, DemoName::Resonant3, DemoName::Vop3, DemoName::SpringMass];

    pub fn as_str(&self) -> &'static str {
        match self {
            DemoName::Oscillator4 => "oscillator4",
            DemoName::Resonant3 => "resonant3",
            DemoName::Vop3 => "vop3",
            DemoName::SpringMass => "spring_mass",
        }
    }
}

impl fmt::Display for DemoName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DemoName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oscillator4" => Ok(DemoName::Oscillator4),
            "resonant3" => Ok(DemoName::Resonant3),
            "vop3" => Ok(DemoName::Vop3),
            "spring_mass" => Ok(DemoName::SpringMass),
            other => Err(Error::UnknownDemo(other.into())),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DemoRow {
    pub x: f64,
    pub s: f64,
    pub f: f64,
    pub u2: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DemoReport {
    pub name: String,
    pub alpha: f64,
    pub grid_size: usize,
    pub max_residual: f64,
    pub max_deviation: f64,
    #[serde(skip)]
    pub rows: Vec<DemoRow>,
}

pub(crate) fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

impl DemoReport {
    pub fn summary_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn to_csv(&self) -> String {
        let with_u2 = self.rows.iter().any(|r| r.u2.is_some());
        let mut out = String::from(if with_u2 { "x,S,f,u2\n" } else { "x,S,f\n" });
        for r in &self.rows {
            out.push_str(&fmt17(r.x));
            out.push(',');
            out.push_str(&fmt17(r.s));
            out.push(',');
            out.push_str(&fmt17(r.f));
            if with_u2 {
                out.push(',');
                out.push_str(&fmt17(r.u2.unwrap_or(f64::NAN)));
            }
            out.push('\n');
        }
        out
    }
}

/// Level-8 construction points thinned to roughly `samples`, plus a probe in
/// the middle of each coarse gap so the table shows the staircase plateaus.
fn demo_grid(spec: &CantorSpec, samples: usize) -> Vec<f64> {
    let pts = spec.level_points(8);
    let n = samples.clamp(8, pts.len());
    let stride = (pts.len() - 1) as f64 / (n - 1) as f64;
    let mut grid: Vec<f64> =
        (0..n).map(|i| pts[(i as f64 * stride).round() as usize]).collect();
    for w in spec.level_points(2).windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        if !spec.contains(mid, 8) {
            grid.push(mid);
        }
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

/// Homogeneous-coefficient match of `ladder` values at t0 against the basis
/// of `p`, returning the matched combination as one closed sum.
fn collocate_reference(p: &FODEProblem, t0: f64, ladder: &[f64]) -> Result<TermSum> {
    let roots = find_roots(&characteristic_polynomial(p)?, DEFAULT_CLUSTER_TOL)?;
    let basis = basis_functions(&roots);
    let w = wronskian_matrix(&basis, t0);
    let c = w
        .lu()
        .solve(&DVector::from_column_slice(ladder))
        .ok_or(Error::DependentBasis { t: t0, det: 0.0 })?;
    let mut out = TermSum::zero();
    for (ci, b) in c.iter().zip(&basis) {
        out = out.add(&b.term_sum().scaled(*ci));
    }
    Ok(out)
}

pub fn run_demo(name: DemoName, spec: CantorSpec, samples: usize) -> Result<DemoReport> {
    spec.validate()?;
    let staircase = Staircase::new(spec);
    match name {
        DemoName::Oscillator4 => {
            // f'''' + 2f'' + f = 0 in the staircase coordinate; the double
            // root at ±i makes cos t + t sin t an exact solution
            let expected = TermSum::from_terms(vec![
                Term::new(1.0, 0, 0.0, 1.0, Trig::Cos),
                Term::new(1.0, 1, 0.0, 1.0, Trig::Sin),
            ]);
            let t0 = staircase.eval(spec.a)?;
            let ladder = expected.derivatives(3);
            let ics: Vec<f64> = ladder.iter().map(|d| d.eval(t0)).collect();
            let p = FODEProblem {
                coeffs: vec![1.0, 0.0, 2.0, 0.0, 1.0],
                forcing: None,
                ics: Some(ics),
                x0: spec.a,
                staircase,
            };
            let sol = solve_homogeneous_ivp(&p)?;
            report(name, &p, &[(&sol, &expected)], samples, None)
        }
        DemoName::Resonant3 => {
            // (D-1)^3 f = 4e^t forces the fully resonant (2/3)t^3 e^t
            let expected = TermSum::single(2.0 / 3.0, 3, 1.0, 0.0, Trig::None);
            let t0 = staircase.eval(spec.a)?;
            let ladder = expected.derivatives(2);
            let ics: Vec<f64> = ladder.iter().map(|d| d.eval(t0)).collect();
            let p = FODEProblem {
                coeffs: vec![1.0, -3.0, 3.0, -1.0],
                forcing: Some(ForcingTerm::atoms(vec![ForcingAtom {
                    poly: vec![4.0],
                    lambda: 1.0,
                    mu: 0.0,
                    trig: Trig::None,
                }])),
                ics: Some(ics),
                x0: spec.a,
                staircase,
            };
            let sol = solve(&p)?;
            report(name, &p, &[(&sol, &expected)], samples, None)
        }
        DemoName::Vop3 => run_vop3(staircase, samples),
        DemoName::SpringMass => run_spring(staircase, samples),
    }
}

/// Shared reporting for demos whose reference is a closed sum in t.
fn report(
    name: DemoName,
    p: &FODEProblem,
    pairs: &[(&FODESolution, &TermSum)],
    samples: usize,
    u2: Option<&TermSum>,
) -> Result<DemoReport> {
    let spec = p.staircase.spec;
    let grid = demo_grid(&spec, samples);
    let mut max_residual = 0.0f64;
    let mut max_deviation = 0.0f64;
    let mut rows = Vec::with_capacity(grid.len());
    for &x in &grid {
        let t = p.staircase.eval(x)?;
        for (sol, expected) in pairs {
            let got = sol.eval_t(t)?;
            max_deviation = max_deviation.max((got - expected.eval(t)).abs());
            max_residual = max_residual.max(residual(sol, p, x)?);
        }
        let (sol, _) = pairs[0];
        rows.push(DemoRow {
            x,
            s: t,
            f: sol.eval_t(t)?,
            u2: u2.map(|u| u.eval(t)),
        });
    }
    Ok(DemoReport {
        name: name.to_string(),
        alpha: spec.alpha(),
        grid_size: rows.len(),
        max_residual,
        max_deviation,
        rows,
    })
}

fn run_vop3(staircase: Staircase, samples: usize) -> Result<DemoReport> {
    let spec = staircase.spec;
    // anchor on the first level-6 construction point whose staircase value
    // clears the singularity of g(t) = e^t/t^2 at t = 0
    let x0 = spec
        .level_points(6)
        .into_iter()
        .find(|&x| staircase.eval(x).is_ok_and(|s| s > 0.01))
        .ok_or_else(|| Error::Spec("no level-6 point clears the forcing singularity".into()))?;
    let t0 = staircase.eval(x0)?;
    let p = FODEProblem {
        coeffs: vec![1.0, -1.0, -1.0, 1.0],
        forcing: Some(ForcingTerm::custom(|t: f64| t.exp() / (t * t), 1e-6)),
        ics: Some(vec![0.0, 0.0, 0.0]),
        x0,
        staircase,
    };
    let sol = solve(&p)?;

    // reference: F(t) = -e^t ln t / 2 + e^{-t} Ei(2t) / 2 solves the
    // equation exactly; subtract its basis shadow so it shares the zero
    // ladder at the anchor
    let f_true = |t: f64| -0.5 * t.exp() * t.ln() + 0.5 * (-t).exp() * ei(2.0 * t);
    let f_true_d1 = |t: f64| -0.5 * t.exp() * t.ln() - 0.5 * (-t).exp() * ei(2.0 * t);
    let f_true_d2 =
        |t: f64| -0.5 * t.exp() * t.ln() - t.exp() / t + 0.5 * (-t).exp() * ei(2.0 * t);
    let shadow = collocate_reference(&p, t0, &[f_true(t0), f_true_d1(t0), f_true_d2(t0)])?;
    let expected = move |t: f64| f_true(t) - shadow.eval(t);

    let lo = staircase.pseudoinverse(0.05)?;
    let hi = staircase.pseudoinverse(0.9 * staircase.total())?;
    let pts: Vec<f64> = spec
        .level_points(8)
        .into_iter()
        .filter(|&x| x >= lo && x <= hi)
        .collect();
    let n = samples.clamp(8, pts.len());
    let stride = (pts.len() - 1) as f64 / (n - 1) as f64;
    let grid: Vec<f64> = (0..n).map(|i| pts[(i as f64 * stride).round() as usize]).collect();

    let mut max_residual = 0.0f64;
    let mut max_deviation = 0.0f64;
    let mut rows = Vec::with_capacity(grid.len());
    for &x in &grid {
        let t = staircase.eval(x)?;
        let got = sol.eval_t(t)?;
        max_deviation = max_deviation.max((got - expected(t)).abs());
        max_residual = max_residual.max(residual(&sol, &p, x)?);
        rows.push(DemoRow { x, s: t, f: got, u2: None });
    }
    Ok(DemoReport {
        name: DemoName::Vop3.to_string(),
        alpha: spec.alpha(),
        grid_size: rows.len(),
        max_residual,
        max_deviation,
        rows,
    })
}

fn run_spring(staircase: Staircase, samples: usize) -> Result<DemoReport> {
    let spec = staircase.spec;
    // two unit masses, k1 = 3 anchoring the first and k2 = 2 coupling them:
    // u1'' = -(k1+k2)u1 + k2 u2, u2'' = -k2 u2 + k2 u1; eliminating u2
    // leaves D^4 + 7D^2 + 6 acting on u1
    let (k1, k2) = (3.0, 2.0);
    let coeffs = vec![1.0, 0.0, 7.0, 0.0, 6.0];
    let families = [
        // in-phase at the slow frequency: u1 = cos t, u2 = 2 cos t
        (vec![1.0, 0.0, -1.0, 0.0], TermSum::single(1.0, 0, 0.0, 1.0, Trig::Cos)),
        // counter-phase at the fast one: u1 = -2 cos sqrt(6) t
        (
            vec![-2.0, 0.0, 12.0, 0.0],
            TermSum::single(-2.0, 0, 0.0, 6.0f64.sqrt(), Trig::Cos),
        ),
    ];

    let grid = demo_grid(&spec, samples);
    let mut max_residual = 0.0f64;
    let mut max_deviation = 0.0f64;
    let mut rows: Vec<DemoRow> = Vec::new();
    for (idx, (ics, expected_u1)) in families.iter().enumerate() {
        let p = FODEProblem {
            coeffs: coeffs.clone(),
            forcing: None,
            ics: Some(ics.clone()),
            x0: spec.a,
            staircase,
        };
        let sol = solve_homogeneous_ivp(&p)?;
        let u1 = sol.homogeneous_sum();
        // reconstruct the second mass from the first: u2 = (u1'' + (k1+k2) u1)/k2
        let u2 = u1.apply_operator(&[1.0, 0.0, k1 + k2]).scaled(1.0 / k2);
        let expected_u2 = expected_u1.apply_operator(&[1.0, 0.0, k1 + k2]).scaled(1.0 / k2);
        // the eliminated equation must hold as well: u2'' + k2 u2 = k2 u1
        let coupling = u2.apply_operator(&[1.0, 0.0, k2]).add(&u1.scaled(-k2));
        for &x in &grid {
            let t = staircase.eval(x)?;
            max_residual = max_residual.max(residual(&sol, &p, x)?);
            max_residual = max_residual.max(coupling.eval(t).abs());
            max_deviation = max_deviation.max((u1.eval(t) - expected_u1.eval(t)).abs());
            max_deviation = max_deviation.max((u2.eval(t) - expected_u2.eval(t)).abs());
            if idx == 0 {
                rows.push(DemoRow { x, s: t, f: u1.eval(t), u2: Some(u2.eval(t)) });
            }
        }
    }
    Ok(DemoReport {
        name: DemoName::SpringMass.to_string(),
        alpha: spec.alpha(),
        grid_size: rows.len(),
        max_residual,
        max_deviation,
        rows,
    })
}
