//! Band-limited 2π-periodic functions in Fourier form.
//!
//! A [`PeriodicFunction`] stores `a0/2` and the pairs `(a_k, b_k)` for
//! `k = 1..=K`. Every linear operator the crate needs (partial sums,
//! conjugation, Steklov means, ψ-integrals and ψ-derivatives) acts
//! diagonally on harmonics, so they are all routed through
//! [`PeriodicFunction::multiplier`] and are exact on this representation.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weights::Weight;

/// Default truncation degree for non-polynomial test functions.
pub const DEFAULT_K_MAX: usize = 256;
/// Default number of quadrature nodes.
pub const DEFAULT_GRID_POINTS: usize = 4096;

const TRIM_EPS: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodicFunction {
    pub a0_half: f64,
    pub coeffs: Vec<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl PeriodicFunction {
    pub fn new(a0_half: f64, coeffs: Vec<(f64, f64)>) -> Self {
        Self {
            a0_half,
            coeffs,
            label: None,
        }
    }

    pub fn zero() -> Self {
        Self::new(0.0, Vec::new())
    }

    pub fn constant(c: f64) -> Self {
        Self::new(c, Vec::new())
    }

    /// `amp · cos(kx)`; `k = 0` gives the constant `amp`.
    pub fn cos(k: usize, amp: f64) -> Self {
        if k == 0 {
            return Self::constant(amp);
        }
        let mut coeffs = vec![(0.0, 0.0); k];
        coeffs[k - 1].0 = amp;
        Self::new(0.0, coeffs)
    }

    /// `amp · sin(kx)`.
    pub fn sin(k: usize, amp: f64) -> Self {
        if k == 0 {
            return Self::zero();
        }
        let mut coeffs = vec![(0.0, 0.0); k];
        coeffs[k - 1].1 = amp;
        Self::new(0.0, coeffs)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// Stored degree, including any trailing zero harmonics.
    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// Degree of the highest harmonic that is not exactly zero.
    pub fn effective_degree(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|&(a, b)| a != 0.0 || b != 0.0)
            .map_or(0, |i| i + 1)
    }

    /// `(a_k, b_k)` for `k ≥ 1`, zero beyond the stored degree.
    pub fn harmonic(&self, k: usize) -> (f64, f64) {
        if k == 0 {
            return (2.0 * self.a0_half, 0.0);
        }
        self.coeffs.get(k - 1).copied().unwrap_or((0.0, 0.0))
    }

    pub fn is_zero(&self) -> bool {
        self.a0_half == 0.0 && self.coeffs.iter().all(|&(a, b)| a == 0.0 && b == 0.0)
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .fold(self.a0_half, |acc, (i, &(a, b))| {
                let kx = (i + 1) as f64 * x;
                acc + a * kx.cos() + b * kx.sin()
            })
    }

    /// S_n(f): harmonics above `n` dropped.
    pub fn partial_sum(&self, n: usize) -> Self {
        let mut out = self.clone();
        out.coeffs.truncate(n);
        out
    }

    /// `f − S_n(f)`, keeping the stored degree.
    pub fn tail(&self, n: usize) -> Self {
        let mut out = self.clone();
        out.a0_half = 0.0;
        for c in out.coeffs.iter_mut().take(n) {
            *c = (0.0, 0.0);
        }
        out
    }

    /// Trigonometric conjugate: `(a_k, b_k) → (−b_k, a_k)` and no constant term.
    pub fn conjugate(&self) -> Self {
        self.multiplier(|_| 0.0, |_| 1.0)
    }

    /// Harmonic `k` of the output is `m(k)·A_k(f) + m̃(k)·Ã_k(f)` where
    /// `Ã_k = a_k sin kx − b_k cos kx`. The constant term is set to zero.
    pub fn multiplier(&self, m: impl Fn(usize) -> f64, m_tilde: impl Fn(usize) -> f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| {
                let k = i + 1;
                let (mk, mt) = (m(k), m_tilde(k));
                (mk * a - mt * b, mk * b + mt * a)
            })
            .collect();
        Self::new(0.0, coeffs)
    }

    /// Drops trailing harmonics with `|a_k| + |b_k| < 1e-15`.
    pub fn trimmed(&self) -> Self {
        let mut out = self.clone();
        while matches!(out.coeffs.last(), Some(&(a, b)) if a.abs() + b.abs() < TRIM_EPS) {
            out.coeffs.pop();
        }
        out
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            a0_half: self.a0_half * s,
            coeffs: self.coeffs.iter().map(|&(a, b)| (a * s, b * s)).collect(),
            label: self.label.clone(),
        }
    }

    fn zip_with(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Self {
        let n = self.degree().max(other.degree());
        let coeffs = (1..=n)
            .map(|k| {
                let (a1, b1) = self.harmonic(k);
                let (a2, b2) = other.harmonic(k);
                (op(a1, a2), op(b1, b2))
            })
            .collect();
        Self::new(op(self.a0_half, other.a0_half), coeffs)
    }

    /// Values at every node of `grid`.
    pub fn samples(&self, grid: &UniformGrid) -> Vec<f64> {
        let table = grid.phase_table();
        let n = grid.n_points;
        let mut out = vec![self.a0_half; n];
        for (i, &(a, b)) in self.coeffs.iter().enumerate() {
            if a == 0.0 && b == 0.0 {
                continue;
            }
            let k = i + 1;
            let (c0, s0) = {
                let t = k as f64 * grid.offset;
                (t.cos(), t.sin())
            };
            // x_j = offset + jΔ, so kx_j = k·offset + ((kj) mod n)Δ
            let step = k % n;
            let mut idx = 0usize;
            for v in out.iter_mut() {
                let (cm, sm) = table[idx];
                let c = c0 * cm - s0 * sm;
                let s = s0 * cm + c0 * sm;
                *v += a * c + b * s;
                idx += step;
                if idx >= n {
                    idx -= n;
                }
            }
        }
        out
    }
}

impl Add for &PeriodicFunction {
    type Output = PeriodicFunction;
    fn add(self, rhs: Self) -> PeriodicFunction {
        self.zip_with(rhs, |x, y| x + y)
    }
}

impl Sub for &PeriodicFunction {
    type Output = PeriodicFunction;
    fn sub(self, rhs: Self) -> PeriodicFunction {
        self.zip_with(rhs, |x, y| x - y)
    }
}

impl Add for PeriodicFunction {
    type Output = PeriodicFunction;
    fn add(self, rhs: Self) -> PeriodicFunction {
        &self + &rhs
    }
}

impl Sub for PeriodicFunction {
    type Output = PeriodicFunction;
    fn sub(self, rhs: Self) -> PeriodicFunction {
        &self - &rhs
    }
}

impl Mul<&PeriodicFunction> for f64 {
    type Output = PeriodicFunction;
    fn mul(self, rhs: &PeriodicFunction) -> PeriodicFunction {
        rhs.scaled(self)
    }
}

impl Neg for &PeriodicFunction {
    type Output = PeriodicFunction;
    fn neg(self) -> PeriodicFunction {
        self.scaled(-1.0)
    }
}

/// Named test-function families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FunctionFamily {
    /// `cos(kx)`
    Harmonic { k: usize },
    /// `Σ_{k≤K} k^{−s} cos kx`
    PolyDecay { s: f64, k_max: usize },
    /// `Σ_{k≤K} (−1)^{k+1} k^{−s} cos kx`
    Alternating { s: f64, k_max: usize },
}

impl FunctionFamily {
    pub fn build(&self) -> PeriodicFunction {
        let (f, label) = match *self {
            FunctionFamily::Harmonic { k } => (PeriodicFunction::cos(k, 1.0), format!("harmonic {k}")),
            FunctionFamily::PolyDecay { s, k_max } => (
                PeriodicFunction::new(
                    0.0,
                    (1..=k_max).map(|k| ((k as f64).powf(-s), 0.0)).collect(),
                ),
                format!("poly-decay {s} {k_max}"),
            ),
            FunctionFamily::Alternating { s, k_max } => (
                PeriodicFunction::new(
                    0.0,
                    (1..=k_max)
                        .map(|k| {
                            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                            (sign * (k as f64).powf(-s), 0.0)
                        })
                        .collect(),
                ),
                format!("alternating {s} {k_max}"),
            ),
        };
        f.with_label(label)
    }
}

impl fmt::Display for FunctionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionFamily::Harmonic { k } => write!(f, "harmonic {k}"),
            FunctionFamily::PolyDecay { s, k_max } => write!(f, "poly-decay {s} {k_max}"),
            FunctionFamily::Alternating { s, k_max } => write!(f, "alternating {s} {k_max}"),
        }
    }
}

impl FromStr for FunctionFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let words: Vec<&str> = s.split_whitespace().collect();
        let bad = || Error::InvalidArgument(format!("unknown function family '{s}'"));
        let num = |i: usize| -> Result<f64> {
            words.get(i).and_then(|w| w.parse().ok()).ok_or_else(bad)
        };
        let int = |i: usize| -> Result<usize> {
            words.get(i).and_then(|w| w.parse().ok()).ok_or_else(bad)
        };
        match words.first().copied() {
            Some("harmonic") if words.len() == 2 => Ok(FunctionFamily::Harmonic { k: int(1)? }),
            Some("poly-decay") if words.len() == 3 => Ok(FunctionFamily::PolyDecay {
                s: num(1)?,
                k_max: int(2)?,
            }),
            Some("alternating") if words.len() == 3 => Ok(FunctionFamily::Alternating {
                s: num(1)?,
                k_max: int(2)?,
            }),
            _ => Err(bad()),
        }
    }
}

/// Uniform grid `x_j = offset + 2πj/n` on `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid {
    pub n_points: usize,
    pub offset: f64,
}

impl UniformGrid {
    /// Half-step offset grid, so that `x = 0` is never a node.
    pub fn new(n_points: usize) -> Self {
        assert!(n_points > 0, "grid needs at least one node");
        Self {
            n_points,
            offset: PI / n_points as f64,
        }
    }

    pub fn with_offset(n_points: usize, offset: f64) -> Result<Self> {
        let step = 2.0 * PI / n_points as f64;
        if n_points == 0 || !(0.0..step).contains(&offset) {
            return Err(Error::InvalidArgument(format!(
                "grid offset {offset} outside [0, {step})"
            )));
        }
        Ok(Self { n_points, offset })
    }

    pub fn step(&self) -> f64 {
        2.0 * PI / self.n_points as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        self.offset + self.step() * j as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(|j| self.node(j))
    }

    pub fn refined(&self) -> Self {
        Self::new(self.n_points * 2)
    }

    fn phase_table(&self) -> Vec<(f64, f64)> {
        let h = self.step();
        (0..self.n_points)
            .map(|m| {
                let t = h * m as f64;
                (t.cos(), t.sin())
            })
            .collect()
    }
}

impl Default for UniformGrid {
    fn default() -> Self {
        Self::new(DEFAULT_GRID_POINTS)
    }
}

/// Trapezoidal value of `∫₀^{2π} g(x) w(x) dx` on `grid`.
///
/// Nodes within `1e-12` of a singular point of `w` are skipped.
pub fn integrate_weighted(
    g: impl Fn(f64) -> f64,
    w: &Weight,
    grid: &UniformGrid,
) -> Result<f64> {
    let h = grid.step();
    let mut sum = 0.0;
    for (j, x) in grid.nodes().enumerate() {
        if w.near_singularity(x) {
            continue;
        }
        let v = g(x) * w.eval(x);
        if !v.is_finite() {
            return Err(Error::NonFiniteSample { index: j, x, value: v });
        }
        sum += v;
    }
    Ok(sum * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(PeriodicFunction::cos(1, 1.0).evaluate(0.0), 1.0);
        let f = PeriodicFunction::new(1.0, vec![(1.0, 0.0)]);
        assert!(close(f.evaluate(PI), 0.0, 1e-15));
        let g = PeriodicFunction::new(0.0, vec![(0.0, 0.0), (1.0, 1.0)]);
        assert!(close(g.evaluate(PI / 4.0), 1.0, 1e-15));
    }

    #[test]
    fn evaluate_is_periodic() {
        let f = FunctionFamily::PolyDecay { s: 1.0, k_max: 9 }.build();
        for &x in &[0.3, 1.7, 5.9] {
            assert!(close(f.evaluate(x), f.evaluate(x + 2.0 * PI), 1e-12));
        }
    }

    #[test]
    fn partial_sum_examples() {
        let f = PeriodicFunction::new(0.0, vec![(1.0, 0.0), (1.0, 0.0)]);
        assert_eq!(f.partial_sum(1), PeriodicFunction::cos(1, 1.0));
        let g = PeriodicFunction::cos(3, 1.0);
        assert_eq!(g.partial_sum(5), g);
        let h = &PeriodicFunction::constant(1.0) + &PeriodicFunction::sin(4, 1.0);
        assert_eq!(h.partial_sum(0), PeriodicFunction::constant(1.0));
    }

    #[test]
    fn conjugate_examples() {
        for k in 1..5 {
            assert_eq!(PeriodicFunction::cos(k, 1.0).conjugate(), PeriodicFunction::sin(k, 1.0));
            assert_eq!(PeriodicFunction::sin(k, 1.0).conjugate(), PeriodicFunction::cos(k, -1.0));
        }
        let f = PeriodicFunction::new(2.0, vec![(1.0, 0.0)]);
        assert_eq!(f.conjugate().conjugate(), PeriodicFunction::cos(1, -1.0));
    }

    #[test]
    fn multiplier_examples() {
        let f = FunctionFamily::Alternating { s: 0.5, k_max: 6 }.build();
        let id = f.multiplier(|_| 1.0, |_| 0.0);
        assert_eq!(id.coeffs, f.coeffs);
        assert_eq!(
            PeriodicFunction::cos(1, 1.0).multiplier(|_| 0.0, |_| 1.0),
            PeriodicFunction::sin(1, 1.0)
        );
        let sq = PeriodicFunction::cos(2, 1.0).multiplier(|k| (k * k) as f64, |_| 0.0);
        assert_eq!(sq, PeriodicFunction::cos(2, 4.0));
    }

    #[test]
    fn samples_match_evaluate() {
        let f = PeriodicFunction::new(0.25, vec![(1.0, -0.5), (0.0, 2.0), (0.3, 0.1)]);
        let grid = UniformGrid::new(64);
        let s = f.samples(&grid);
        for (j, x) in grid.nodes().enumerate() {
            assert!(close(s[j], f.evaluate(x), 1e-13));
        }
    }

    #[test]
    fn integrate_examples() {
        let one = Weight::constant(1.0);
        let grid = UniformGrid::new(4096);
        let v = integrate_weighted(|x| x.cos().powi(2), &one, &grid).unwrap();
        assert!(close(v, PI, 1e-10));
        let v = integrate_weighted(|_| 1.0, &one, &grid).unwrap();
        assert!(close(v, 2.0 * PI, 1e-12));
        let v = integrate_weighted(|x| x.cos(), &one, &grid).unwrap();
        assert!(close(v, 0.0, 1e-12));
    }

    #[test]
    fn integrate_reports_bad_node() {
        let one = Weight::constant(1.0);
        let grid = UniformGrid::new(8);
        let err = integrate_weighted(|x| if x > 3.0 { f64::NAN } else { 1.0 }, &one, &grid)
            .unwrap_err();
        assert!(matches!(err, Error::NonFiniteSample { index: 4, .. }));
    }

    #[test]
    fn trimming_is_explicit() {
        let f = PeriodicFunction::new(0.0, vec![(1.0, 0.0), (0.0, 0.0), (1e-17, 0.0)]);
        assert_eq!(f.degree(), 3);
        assert_eq!(f.trimmed().degree(), 1);
        assert_eq!(f.effective_degree(), 3);
    }

    #[test]
    fn json_shape() {
        let f = PeriodicFunction::new(0.5, vec![(1.0, 2.0)]);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"a0_half":0.5,"coeffs":[[1.0,2.0]]}"#);
        let back: PeriodicFunction = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn family_names_parse() {
        assert_eq!("harmonic 3".parse::<FunctionFamily>().unwrap(), FunctionFamily::Harmonic { k: 3 });
        assert_eq!(
            "poly-decay 2 8".parse::<FunctionFamily>().unwrap(),
            FunctionFamily::PolyDecay { s: 2.0, k_max: 8 }
        );
        assert!("sawtooth 3".parse::<FunctionFamily>().is_err());
        let alt = FunctionFamily::Alternating { s: 1.0, k_max: 3 }.build();
        assert_eq!(alt.coeffs[1].0, -0.5);
    }
}
