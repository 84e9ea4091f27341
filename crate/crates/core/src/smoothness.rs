//! Steklov means and moduli of smoothness `Ω_r(f; δ)`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::PeriodicFunction;
use crate::orlicz::OrliczSpace;
use crate::psi::{psi_beta, psi_derivative, PsiSequence};

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `σ_h f`: harmonic `k` scaled by `sin(kh)/(kh)`.
pub fn steklov(f: &PeriodicFunction, h: f64) -> Result<PeriodicFunction> {
    if !(h > 0.0 && h < PI) {
        return Err(Error::InvalidStep(h));
    }
    let mut out = f.multiplier(|k| sinc(k as f64 * h), |_| 0.0);
    out.a0_half = f.a0_half;
    Ok(out)
}

/// `∏ (I − σ_{h_i}) f`, exact in coefficient space.
pub fn difference_product(f: &PeriodicFunction, hs: &[f64]) -> PeriodicFunction {
    f.multiplier(
        |k| hs.iter().map(|&h| 1.0 - sinc(k as f64 * h)).product(),
        |_| 0.0,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulusQuery {
    pub r: usize,
    pub delta: f64,
    pub h_grid_size: usize,
    pub refinement_rounds: usize,
}

impl ModulusQuery {
    pub fn new(r: usize, delta: f64) -> Result<Self> {
        let q = Self {
            r,
            delta,
            h_grid_size: if r >= 3 { 16 } else { 64 },
            refinement_rounds: 2,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if self.r > 3 {
            return Err(Error::InvalidModulus(format!("order {} above 3", self.r)));
        }
        if !(self.delta > 0.0 && self.delta < PI) {
            return Err(Error::InvalidModulus(format!("delta {} outside (0, pi)", self.delta)));
        }
        if self.h_grid_size < 2 {
            return Err(Error::InvalidModulus("h grid needs two points".into()));
        }
        Ok(())
    }
}

const H_RANGE: f64 = 1e-3;

fn log_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// Nondecreasing index tuples over `0..n` of length `r`.
fn sorted_tuples(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..r {
        out = out
            .into_iter()
            .flat_map(|t| {
                let start = t.last().copied().unwrap_or(0);
                (start..n).map(move |i| {
                    let mut u = t.clone();
                    u.push(i);
                    u
                })
            })
            .collect();
    }
    out
}

fn best_of(sp: &OrliczSpace, f: &PeriodicFunction, cands: Vec<Vec<f64>>) -> Result<(f64, Vec<f64>)> {
    let vals: Vec<Result<(f64, Vec<f64>)>> = cands
        .into_par_iter()
        .map(|hs| Ok((sp.norm(&difference_product(f, &hs))?, hs)))
        .collect();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for v in vals {
        let (val, hs) = v?;
        let better = match &best {
            None => true,
            Some((bv, bh)) => val > *bv || (val == *bv && hs < *bh),
        };
        if better {
            best = Some((val, hs));
        }
    }
    Ok(best.expect("nonempty candidate set"))
}

/// `Ω_r(f; δ) = sup_{0<h_i<δ} ‖∏(I − σ_{h_i}) f‖`; `Ω_0 = ‖f‖`.
pub fn modulus(sp: &OrliczSpace, f: &PeriodicFunction, q: &ModulusQuery) -> Result<f64> {
    q.validate()?;
    if q.r == 0 {
        return sp.norm(f);
    }
    if f.tail(0).is_zero() {
        return Ok(0.0);
    }
    let grid = log_points(q.delta * H_RANGE, q.delta, q.h_grid_size);
    let cands = sorted_tuples(grid.len(), q.r)
        .into_iter()
        .map(|t| t.into_iter().map(|i| grid[i]).collect())
        .collect();
    let (mut best, mut hs) = best_of(sp, f, cands)?;
    let mut ratio = (grid[1] / grid[0]).ln();
    for _ in 0..q.refinement_rounds {
        let local: Vec<Vec<f64>> = hs
            .iter()
            .map(|&h| {
                let lo = (h * (-ratio).exp()).max(q.delta * H_RANGE);
                let hi = (h * ratio.exp()).min(q.delta);
                log_points(lo, hi, 9)
            })
            .collect();
        let cands = sorted_tuples(9, q.r)
            .into_iter()
            .map(|t| t.iter().enumerate().map(|(c, &i)| local[c][i]).collect::<Vec<f64>>())
            .collect();
        let (v, h) = best_of(sp, f, cands)?;
        if v > best {
            best = v;
            hs = h;
        }
        ratio /= 4.0;
    }
    Ok(best)
}

/// Classical derivative of order `m` on each harmonic.
pub fn classical_derivative(f: &PeriodicFunction, m: usize) -> PeriodicFunction {
    if m == 0 {
        return f.clone();
    }
    let pair = psi_beta(PsiSequence::Power { r: m as f64 }, m as f64);
    psi_derivative(f, &pair).expect("power sequences never vanish")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusRatioRow {
    pub delta: f64,
    pub modulus: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// `Ω_k(f; δ) / (δ^{2k} ‖f^{(2k)}‖)` over the given steps.
pub fn modulus_derivative_ratios(
    sp: &OrliczSpace,
    f: &PeriodicFunction,
    k: usize,
    deltas: &[f64],
) -> Result<Vec<ModulusRatioRow>> {
    let d = sp.norm(&classical_derivative(f, 2 * k))?;
    deltas
        .iter()
        .map(|&delta| {
            let m = modulus(sp, f, &ModulusQuery::new(k, delta)?)?;
            let rhs = delta.powi(2 * k as i32) * d;
            Ok(ModulusRatioRow {
                delta,
                modulus: m,
                rhs,
                ratio: if rhs > 0.0 { m / rhs } else { 0.0 },
            })
        })
        .collect()
}
