//! Best approximation `E_n(f)` by trigonometric polynomials of order `n − 1`.
//!
//! The minimization runs over the `2n − 1` coefficients of the polynomial,
//! starting at the Fourier partial sum. Each sweep does a golden-section line
//! search along every coordinate and then along the sweep's net displacement.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::PeriodicFunction;
use crate::orlicz::OrliczSpace;
use crate::psi::{psi_derivative, PsiPair};

const GOLDEN: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxResult {
    pub n: usize,
    pub value: f64,
    pub minimizer: PeriodicFunction,
    pub iterations: usize,
    pub converged: bool,
    pub l2_init_value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            max_iter: 10_000,
        }
    }
}

/// Coefficient layout: `[a0/2, a_1, b_1, …, a_{n−1}, b_{n−1}]`.
fn to_coeffs(t: &PeriodicFunction, n: usize) -> Vec<f64> {
    let mut x = vec![t.a0_half];
    for k in 1..n {
        let (a, b) = t.harmonic(k);
        x.push(a);
        x.push(b);
    }
    x
}

fn from_coeffs(x: &[f64]) -> PeriodicFunction {
    let coeffs = x[1..].chunks(2).map(|c| (c[0], c[1])).collect();
    PeriodicFunction::new(x[0], coeffs)
}

struct Problem<'a> {
    sp: &'a OrliczSpace,
    basis: Vec<Vec<f64>>,
    scratch: Vec<f64>,
    evals: usize,
}

impl Problem<'_> {
    /// `‖r − α·dir‖`.
    fn along(&mut self, r: &[f64], dir: &[f64], alpha: f64) -> Result<f64> {
        self.evals += 1;
        for ((s, a), d) in self.scratch.iter_mut().zip(r).zip(dir) {
            *s = a - alpha * d;
        }
        self.sp.norm_samples(&self.scratch)
    }

    /// Minimizes `α ↦ ‖r − α·dir‖` from `α = 0`; returns the accepted step and
    /// value, or `(0, phi0)` when nothing beats the start.
    fn line_search(&mut self, r: &[f64], dir: &[f64], phi0: f64, step: f64) -> Result<(f64, f64)> {
        let fp = self.along(r, dir, step)?;
        let fm = self.along(r, dir, -step)?;
        let (mut a, mut b);
        if fp >= phi0 && fm >= phi0 {
            (a, b) = (-step, step);
        } else {
            let sign = if fp < fm { 1.0 } else { -1.0 };
            let mut prev = 0.0;
            let mut cur = sign * step;
            let mut fcur = fp.min(fm);
            loop {
                let next = 2.0 * cur;
                let fnext = self.along(r, dir, next)?;
                if fnext >= fcur || next.abs() > 1e12 * step {
                    (a, b) = if sign > 0.0 { (prev, next) } else { (next, prev) };
                    break;
                }
                prev = cur;
                cur = next;
                fcur = fnext;
            }
        }
        let tol = 1e-4 * step;
        let mut x1 = b - GOLDEN * (b - a);
        let mut x2 = a + GOLDEN * (b - a);
        let mut f1 = self.along(r, dir, x1)?;
        let mut f2 = self.along(r, dir, x2)?;
        while b - a > tol {
            if f1 <= f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - GOLDEN * (b - a);
                f1 = self.along(r, dir, x1)?;
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + GOLDEN * (b - a);
                f2 = self.along(r, dir, x2)?;
            }
        }
        let (alpha, val) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
        if val < phi0 {
            Ok((alpha, val))
        } else {
            Ok((0.0, phi0))
        }
    }
}

/// `E_n(f)` from the Fourier partial sum `S_{n−1}(f)`.
pub fn best_approx(sp: &OrliczSpace, f: &PeriodicFunction, n: usize) -> Result<ApproxResult> {
    if n == 0 {
        return Err(Error::InvalidArgument("best approximation order must be >= 1".into()));
    }
    best_approx_from(sp, f, n, &f.partial_sum(n - 1), &SolverOptions::default())
}

/// `E_n(f)` starting from an arbitrary polynomial of order `n − 1`.
pub fn best_approx_from(
    sp: &OrliczSpace,
    f: &PeriodicFunction,
    n: usize,
    start: &PeriodicFunction,
    opts: &SolverOptions,
) -> Result<ApproxResult> {
    if n == 0 {
        return Err(Error::InvalidArgument("best approximation order must be >= 1".into()));
    }
    let grid = sp.grid();
    if f.effective_degree() < n {
        return Ok(ApproxResult {
            n,
            value: 0.0,
            minimizer: f.partial_sum(n - 1),
            iterations: 0,
            converged: true,
            l2_init_value: 0.0,
        });
    }
    let start = start.partial_sum(n - 1);
    let l2_init_value = sp.norm(&(f - &f.partial_sum(n - 1)))?;
    let mut x = to_coeffs(&start, n);
    let mut r = (f - &start).samples(grid);
    let mut value = sp.norm_samples(&r)?;
    if value == 0.0 {
        return Ok(ApproxResult {
            n,
            value,
            minimizer: start,
            iterations: 0,
            converged: true,
            l2_init_value,
        });
    }

    let mut basis = vec![vec![1.0; grid.n_points]];
    for k in 1..n {
        basis.push(PeriodicFunction::cos(k, 1.0).samples(grid));
        basis.push(PeriodicFunction::sin(k, 1.0).samples(grid));
    }
    let mut prob = Problem {
        sp,
        basis,
        scratch: vec![0.0; grid.n_points],
        evals: 0,
    };
    let typical = f.coeffs.iter().map(|(a, b)| a.abs().max(b.abs())).fold(f.a0_half.abs(), f64::max);
    let mut steps = vec![0.1 * typical.max(1e-3); x.len()];
    let mut pattern_step = steps[0];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        iterations += 1;
        let before = value;
        let x_before = x.clone();
        for i in 0..x.len() {
            let dir = std::mem::take(&mut prob.basis[i]);
            let res = prob.line_search(&r, &dir, value, steps[i]);
            let (alpha, v) = match res {
                Ok(ok) => ok,
                Err(e) => {
                    prob.basis[i] = dir;
                    return Err(e);
                }
            };
            if alpha != 0.0 {
                for (ri, d) in r.iter_mut().zip(&dir) {
                    *ri -= alpha * d;
                }
                x[i] += alpha;
                value = v;
                steps[i] = (2.0 * alpha.abs()).max(0.25 * steps[i]);
            } else {
                steps[i] = (0.25 * steps[i]).max(1e-14 * typical.max(1e-300));
            }
            prob.basis[i] = dir;
        }
        let delta: Vec<f64> = x.iter().zip(&x_before).map(|(a, b)| a - b).collect();
        if delta.iter().any(|d| *d != 0.0) {
            let mut dir = vec![0.0; grid.n_points];
            for (d, b) in delta.iter().zip(&prob.basis) {
                if *d != 0.0 {
                    for (o, v) in dir.iter_mut().zip(b) {
                        *o += d * v;
                    }
                }
            }
            let (alpha, v) = prob.line_search(&r, &dir, value, pattern_step.min(1.0))?;
            if alpha != 0.0 {
                for (ri, d) in r.iter_mut().zip(&dir) {
                    *ri -= alpha * d;
                }
                for (xi, d) in x.iter_mut().zip(&delta) {
                    *xi += alpha * d;
                }
                value = v;
                pattern_step = (2.0 * alpha.abs()).max(0.25);
            }
        }
        if value == 0.0 || (before - value) / before < opts.rel_tol {
            converged = true;
            break;
        }
    }
    log::debug!("E_{n}: {value} after {iterations} sweeps, {} norm evaluations", prob.evals);
    Ok(ApproxResult {
        n,
        value,
        minimizer: from_coeffs(&x),
        iterations,
        converged,
        l2_init_value,
    })
}

/// A raw solver value that exceeded the previous `E_{n−1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityViolation {
    pub n: usize,
    pub raw: f64,
    pub previous: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnSequence {
    pub results: Vec<ApproxResult>,
    pub violations: Vec<MonotonicityViolation>,
}

impl EnSequence {
    /// `E_n`, with `E_n = 0` beyond the computed range when the last value is 0.
    pub fn value(&self, n: usize) -> Option<f64> {
        match self.results.get(n.checked_sub(1)?) {
            Some(r) => Some(r.value),
            None if self.results.last().is_some_and(|r| r.value == 0.0) => Some(0.0),
            None => None,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        self.results.iter().map(|r| r.value).collect()
    }
}

/// `E_1, …, E_{n_max}`, warm-started and made nonincreasing.
pub fn en_sequence(sp: &OrliczSpace, f: &PeriodicFunction, n_max: usize) -> Result<EnSequence> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be >= 1".into()));
    }
    let opts = SolverOptions::default();
    let mut results: Vec<ApproxResult> = Vec::with_capacity(n_max);
    let mut violations = Vec::new();
    for n in 1..=n_max {
        let start = match results.last() {
            None => PeriodicFunction::constant(f.a0_half),
            Some(prev) => {
                let (a, b) = f.harmonic(n - 1);
                let mut s = prev.minimizer.clone();
                s.coeffs.resize(n - 1, (0.0, 0.0));
                s.coeffs[n - 2] = (a, b);
                s
            }
        };
        let mut res = best_approx_from(sp, f, n, &start, &opts)?;
        if let Some(prev) = results.last() {
            if res.value > prev.value {
                if res.value > prev.value * (1.0 + 1e-12) {
                    log::warn!("E_{n} raw {} exceeds E_{} = {}", res.value, n - 1, prev.value);
                }
                violations.push(MonotonicityViolation {
                    n,
                    raw: res.value,
                    previous: prev.value,
                });
                res.value = prev.value;
                res.minimizer = prev.minimizer.clone();
            }
        }
        results.push(res);
    }
    Ok(EnSequence { results, violations })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectRow {
    pub n: usize,
    pub e_f: f64,
    pub psi_n: f64,
    pub e_fpsi: f64,
    pub ratio: f64,
    pub degenerate: bool,
}

/// Threshold below which `E_n(f^ψ)` marks a row degenerate.
pub const DEGENERATE_EN: f64 = 1e-10;

/// Rows `(n, E_n(f), ψ(n), E_n(f^ψ), E_n(f)/(ψ(n)E_n(f^ψ)))`.
pub fn jackson_direct_check(
    sp: &OrliczSpace,
    f: &PeriodicFunction,
    psi: &PsiPair,
    ns: &[usize],
) -> Result<Vec<DirectRow>> {
    let n_max = ns.iter().copied().max().unwrap_or(0);
    if n_max == 0 {
        return Ok(Vec::new());
    }
    let fpsi = psi_derivative(f, psi)?;
    let ef = en_sequence(sp, f, n_max)?;
    let eg = en_sequence(sp, &fpsi, n_max)?;
    Ok(ns
        .iter()
        .map(|&n| {
            let e_f = ef.results[n - 1].value;
            let e_fpsi = eg.results[n - 1].value;
            let psi_n = psi.psi(n);
            let degenerate = e_fpsi < DEGENERATE_EN;
            DirectRow {
                n,
                e_f,
                psi_n,
                e_fpsi,
                ratio: if degenerate { f64::NAN } else { e_f / (psi_n * e_fpsi) },
                degenerate,
            }
        })
        .collect())
}
