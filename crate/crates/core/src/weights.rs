//! Periodic weights and Muckenhoupt `A_p` diagnostics.

use std::f64::consts::PI;
use std::fmt;
use std::num::NonZeroUsize;
use std::str::FromStr;
use std::sync::Arc;

use gauss_quad::legendre::GaussLegendre;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::UniformGrid;
use crate::young::YoungMeta;

const TWO_PI: f64 = 2.0 * PI;
/// Nodes closer than this to a singular point are never sampled.
pub const SINGULAR_EXCLUSION: f64 = 1e-12;
/// Relative growth per refinement level below which the `A_p` estimate counts as stable.
pub const AP_STABILITY_THRESHOLD: f64 = 0.05;
/// Exponent of the power substitution used next to singular points.
const SINGULAR_SUBSTITUTION_POWER: i32 = 8;

type WeightFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum WeightKind {
    Constant,
    AbsPower { alpha: f64, x0: f64 },
    Step { a: f64, b: f64, h: f64 },
    Custom {
        name: String,
        f: WeightFn,
        singular: Vec<f64>,
        breaks: Vec<f64>,
    },
}

/// A 2π-periodic, almost-everywhere positive weight.
#[derive(Clone)]
pub struct Weight {
    kind: WeightKind,
    scale: f64,
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Weight({self})")
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            WeightKind::Constant => write!(f, "const")?,
            WeightKind::AbsPower { alpha, x0 } => write!(f, "abs-power {alpha} {x0}")?,
            WeightKind::Step { a, b, h } => write!(f, "step {a} {b} {h}")?,
            WeightKind::Custom { name, .. } => write!(f, "{name}")?,
        }
        if self.scale != 1.0 {
            write!(f, " x{}", self.scale)?;
        }
        Ok(())
    }
}

fn wrap(x: f64) -> f64 {
    let r = x.rem_euclid(TWO_PI);
    if r >= TWO_PI {
        0.0
    } else {
        r
    }
}

fn periodic_distance(x: f64, y: f64) -> f64 {
    let d = (wrap(x) - wrap(y)).abs();
    d.min(TWO_PI - d)
}

impl Weight {
    /// `w ≡ c`.
    pub fn constant(c: f64) -> Self {
        Self {
            kind: WeightKind::Constant,
            scale: c,
        }
    }

    /// `|x − x0|^α` in periodic distance.
    pub fn abs_power(alpha: f64, x0: f64) -> Self {
        Self {
            kind: WeightKind::AbsPower { alpha, x0: wrap(x0) },
            scale: 1.0,
        }
    }

    /// `h` on `[a, b)`, `1` elsewhere on the period.
    pub fn step(a: f64, b: f64, h: f64) -> Result<Self> {
        if !(0.0..=TWO_PI).contains(&a) || !(a..=TWO_PI).contains(&b) || h <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "step weight needs 0 <= a <= b <= 2pi and h > 0, got ({a}, {b}, {h})"
            )));
        }
        Ok(Self {
            kind: WeightKind::Step { a, b, h },
            scale: 1.0,
        })
    }

    /// Arbitrary weight given on `[0, 2π)`; `singular` lists points where it
    /// may vanish or blow up, `breaks` lists jump points.
    pub fn custom(
        name: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        singular: Vec<f64>,
        breaks: Vec<f64>,
    ) -> Self {
        Self {
            kind: WeightKind::Custom {
                name: name.into(),
                f: Arc::new(f),
                singular: singular.into_iter().map(wrap).collect(),
                breaks: breaks.into_iter().map(wrap).collect(),
            },
            scale: 1.0,
        }
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            kind: self.kind.clone(),
            scale: self.scale * lambda,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.kind, WeightKind::Constant)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let x = wrap(x);
        let v = match &self.kind {
            WeightKind::Constant => 1.0,
            WeightKind::AbsPower { alpha, x0 } => periodic_distance(x, *x0).powf(*alpha),
            WeightKind::Step { a, b, h } => {
                if (*a..*b).contains(&x) {
                    *h
                } else {
                    1.0
                }
            }
            WeightKind::Custom { f, .. } => f(x),
        };
        self.scale * v
    }

    /// `w(base + offset)` without cancellation when `base` is the power
    /// singularity.
    fn eval_offset(&self, base: f64, offset: f64) -> f64 {
        match &self.kind {
            WeightKind::AbsPower { alpha, x0 }
                if periodic_distance(base, *x0) < SINGULAR_EXCLUSION && offset.abs() <= PI =>
            {
                self.scale * offset.abs().powf(*alpha)
            }
            _ => self.eval(base + offset),
        }
    }

    pub fn singular_points(&self) -> Vec<f64> {
        match &self.kind {
            WeightKind::AbsPower { x0, .. } => vec![*x0],
            WeightKind::Custom { singular, .. } => singular.clone(),
            _ => Vec::new(),
        }
    }

    fn break_points(&self) -> Vec<f64> {
        match &self.kind {
            WeightKind::AbsPower { x0, .. } => vec![wrap(x0 + PI)],
            WeightKind::Step { a, b, .. } => vec![*a, *b],
            WeightKind::Custom { breaks, .. } => breaks.clone(),
            WeightKind::Constant => Vec::new(),
        }
    }

    pub fn near_singularity(&self, x: f64) -> bool {
        self.singular_points()
            .iter()
            .any(|&s| periodic_distance(x, s) < SINGULAR_EXCLUSION)
    }

    /// Per-node trapezoidal weights `Δ·w(x_j)` on `grid`, zero at excluded
    /// nodes, together with the number of excluded nodes.
    pub fn quadrature_weights(&self, grid: &UniformGrid) -> Result<(Vec<f64>, usize)> {
        let h = grid.step();
        let mut excluded = 0;
        let mut out = Vec::with_capacity(grid.n_points);
        for (j, x) in grid.nodes().enumerate() {
            if self.near_singularity(x) {
                excluded += 1;
                out.push(0.0);
                continue;
            }
            let v = self.eval(x);
            if !v.is_finite() || v < 0.0 {
                return Err(Error::NonFiniteSample { index: j, x, value: v });
            }
            out.push(v * h);
        }
        if excluded > 0 {
            log::debug!("{self}: excluded {excluded} node(s) next to singular points");
        }
        Ok((out, excluded))
    }

    /// Split points of `[a, b]`, flagged as singular or not.
    fn split_points(&self, a: f64, b: f64) -> Vec<(f64, bool)> {
        let mut pts: Vec<(f64, bool)> = Vec::new();
        let mut push = |p: f64, singular: bool| {
            for shift in [-TWO_PI, 0.0, TWO_PI] {
                let q = p + shift;
                if q >= a - SINGULAR_EXCLUSION && q <= b + SINGULAR_EXCLUSION {
                    pts.push((q.clamp(a, b), singular));
                }
            }
        };
        for s in self.singular_points() {
            push(s, true);
        }
        for s in self.break_points() {
            push(s, false);
        }
        pts.push((a, false));
        pts.push((b, false));
        pts.sort_by(|x, y| x.0.total_cmp(&y.0).then(y.1.cmp(&x.1)));
        let mut merged: Vec<(f64, bool)> = Vec::new();
        for (p, s) in pts {
            match merged.last_mut() {
                Some(last) if (p - last.0).abs() <= SINGULAR_EXCLUSION => last.1 |= s,
                _ => merged.push((p, s)),
            }
        }
        merged
    }

    /// `∫_a^b g(w(t)) dt` with Gauss–Legendre pieces split at singular and
    /// break points; pieces touching a singular point use the substitution
    /// `t = c + ℓ v^q` to flatten algebraic endpoint behaviour.
    fn integrate_composed(
        &self,
        a: f64,
        b: f64,
        rule: &GaussLegendre,
        g: impl Fn(f64) -> f64,
    ) -> f64 {
        let pts = self.split_points(a, b);
        let q = SINGULAR_SUBSTITUTION_POWER;
        let mut total = 0.0;
        for win in pts.windows(2) {
            let ((c, sc), (d, sd)) = (win[0], win[1]);
            let len = d - c;
            if len <= 0.0 {
                continue;
            }
            let value = |base: f64, off: f64| g(self.eval_offset(base, off));
            let piece = match (sc, sd) {
                (false, false) => rule.integrate(c, d, |t| g(self.eval(t))),
                (true, false) => rule.integrate(0.0, 1.0, |v| {
                    value(c, len * v.powi(q)) * len * f64::from(q) * v.powi(q - 1)
                }),
                (false, true) => rule.integrate(0.0, 1.0, |v| {
                    value(d, -len * v.powi(q)) * len * f64::from(q) * v.powi(q - 1)
                }),
                (true, true) => {
                    let half = 0.5 * len;
                    rule.integrate(0.0, 1.0, |v| {
                        let jac = half * f64::from(q) * v.powi(q - 1);
                        (value(c, half * v.powi(q)) + value(d, -half * v.powi(q))) * jac
                    })
                }
            };
            total += piece;
        }
        total
    }
}

impl FromStr for Weight {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let words: Vec<&str> = s.split_whitespace().collect();
        let bad = || Error::InvalidArgument(format!("unknown weight family '{s}'"));
        let num = |i: usize| -> Result<f64> {
            words.get(i).and_then(|w| w.parse().ok()).ok_or_else(bad)
        };
        match words.first().copied() {
            Some("const") if words.len() == 1 => Ok(Weight::constant(1.0)),
            Some("const") if words.len() == 2 => Ok(Weight::constant(num(1)?)),
            Some("abs-power") if words.len() == 3 => Ok(Weight::abs_power(num(1)?, num(2)?)),
            Some("step") if words.len() == 4 => Weight::step(num(1)?, num(2)?, num(3)?),
            _ => Err(bad()),
        }
    }
}

/// Verdict of the finite `A_p` test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApVerdict {
    InAp,
    LikelyNotInAp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApReport {
    pub p: f64,
    pub constant_estimate: f64,
    pub interval_count: usize,
    pub verdict: ApVerdict,
    /// Running maximum after each refinement level.
    pub level_constants: Vec<f64>,
}

/// Intervals over which the `A_p` expression is maximized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalFamily {
    /// Dyadic subintervals down to length `2π / 2^dyadic_levels`.
    pub dyadic_levels: u32,
    pub random_count: usize,
    pub seed: u64,
}

impl Default for IntervalFamily {
    fn default() -> Self {
        Self {
            dyadic_levels: 10,
            random_count: 200,
            seed: 0x5eed,
        }
    }
}

impl IntervalFamily {
    fn dyadic(level: u32) -> impl Iterator<Item = (f64, f64)> {
        let count = 1u64 << level;
        let len = TWO_PI / count as f64;
        (0..count).map(move |i| (i as f64 * len, (i + 1) as f64 * len))
    }

    fn random(&self) -> Vec<(f64, f64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let max_exp = f64::from(self.dyadic_levels.max(1));
        (0..self.random_count)
            .map(|_| {
                let center = rng.gen_range(0.0..TWO_PI);
                let len = TWO_PI * 2f64.powf(-rng.gen_range(0.0..max_exp));
                let a = (center - 0.5 * len).max(0.0);
                let b = (center + 0.5 * len).min(TWO_PI);
                (a, b)
            })
            .collect()
    }
}

fn gauss_order(level: u32) -> usize {
    16 + 8 * level as usize
}

/// The `A_p` expression on `[a, b]`, with a Gauss order of `order` per piece.
pub fn ap_expression(w: &Weight, p: f64, a: f64, b: f64, order: usize) -> Result<f64> {
    if p <= 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    if b.partial_cmp(&a) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::InvalidArgument(format!("empty interval [{a}, {b}]")));
    }
    let rule = GaussLegendre::new(NonZeroUsize::new(order.max(1)).unwrap());
    ap_expression_with(w, p, a, b, &rule)
}

fn ap_expression_with(w: &Weight, p: f64, a: f64, b: f64, rule: &GaussLegendre) -> Result<f64> {
    let len = b - a;
    let dual = -1.0 / (p - 1.0);
    let avg_w = w.integrate_composed(a, b, rule, |v| v) / len;
    let avg_dual = w.integrate_composed(a, b, rule, |v| v.powf(dual)) / len;
    let value = avg_w * avg_dual.powf(p - 1.0);
    if !avg_w.is_finite() || !avg_dual.is_finite() || avg_w <= 0.0 || !value.is_finite() {
        return Err(Error::NonIntegrableWeight { a, b });
    }
    Ok(value)
}

/// Maximum of the `A_p` expression over `family`, refined level by level.
///
/// Level `L` adds the dyadic intervals of length `2π/2^L` and raises the
/// Gauss order; the weight counts as `A_p` when the running maximum grows by
/// less than 5% over the last level.
pub fn ap_constant(w: &Weight, p: f64, family: &IntervalFamily) -> Result<ApReport> {
    if p <= 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    let random = family.random();
    let mut intervals: Vec<(f64, f64)> = Vec::new();
    let mut level_constants = Vec::new();
    for level in 0..=family.dyadic_levels {
        intervals.extend(IntervalFamily::dyadic(level));
        let rule = GaussLegendre::new(NonZeroUsize::new(gauss_order(level)).unwrap());
        let values: Vec<Result<f64>> = intervals
            .par_iter()
            .chain(random.par_iter())
            .map(|&(a, b)| ap_expression_with(w, p, a, b, &rule))
            .collect();
        let mut best = 0.0f64;
        for v in values {
            best = best.max(v?);
        }
        level_constants.push(best);
    }
    let n = level_constants.len();
    let last = level_constants[n - 1];
    let growth = if n >= 2 {
        let prev = level_constants[n - 2];
        (last - prev) / prev
    } else {
        0.0
    };
    let verdict = if last.is_finite() && growth < AP_STABILITY_THRESHOLD {
        ApVerdict::InAp
    } else {
        ApVerdict::LikelyNotInAp
    };
    Ok(ApReport {
        p,
        constant_estimate: last,
        interval_count: intervals.len() + random.len(),
        verdict,
        level_constants,
    })
}

/// Whether `w ∈ A_{p(M)}` by the finite test.
pub fn pair_check(meta: &YoungMeta, w: &Weight) -> Result<bool> {
    pair_report(meta, w).map(|r| r.verdict == ApVerdict::InAp)
}

pub(crate) fn pair_report(meta: &YoungMeta, w: &Weight) -> Result<ApReport> {
    if w.is_constant() {
        let rule = GaussLegendre::new(NonZeroUsize::new(1).unwrap());
        let c = ap_expression_with(w, meta.p_m.max(1.0 + 1e-9), 0.0, TWO_PI, &rule)?;
        return Ok(ApReport {
            p: meta.p_m,
            constant_estimate: c,
            interval_count: 1,
            verdict: ApVerdict::InAp,
            level_constants: vec![c],
        });
    }
    ap_constant(w, meta.p_m, &IntervalFamily::default())
}
