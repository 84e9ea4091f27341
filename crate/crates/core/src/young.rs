//! Young functions, quasi-convexity and the exponent `p(M)`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Candidate dilation constants for the quasi-convexity test.
pub const QUASICONVEX_CANDIDATES: [f64; 7] = [1.01, 1.1, 1.5, 2.0, 4.0, 8.0, 16.0];
/// Sampled θ values for the `𝒬₂^θ` membership check.
pub const THETA_SAMPLES: [f64; 5] = [0.1, 0.25, 0.5, 0.75, 0.9];
const LIMIT_TOL: f64 = 1e-4;
const DELTA2_UNBOUNDED: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum YoungKind {
    ConvexYoung,
    Quasiconvex,
}

#[derive(Clone)]
enum Family {
    /// `scale · t^p`
    Power { p: f64, scale: f64 },
    /// `t^p (ln(e + t))^a`
    PowerLog { p: f64, a: f64 },
    /// `e^t − t − 1`
    Exp,
    /// closed-form complement of `scale · t^p`
    PowerComplement { p: f64, scale: f64 },
    Custom {
        name: String,
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

/// A (quasi-)convex Young function on `[0, ∞)`.
#[derive(Clone)]
pub struct YoungFunction {
    family: Family,
    kind: YoungKind,
}

impl fmt::Debug for YoungFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "YoungFunction({self}, {:?})", self.kind)
    }
}

impl fmt::Display for YoungFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.family {
            Family::Power { p, scale } if *scale == 1.0 => write!(f, "power {p}"),
            Family::Power { p, scale } => write!(f, "{scale}*power {p}"),
            Family::PowerLog { p, a } => write!(f, "power-log {p} {a}"),
            Family::Exp => write!(f, "exp"),
            Family::PowerComplement { p, scale } => write!(f, "complement({scale}*power {p})"),
            Family::Custom { name, .. } => write!(f, "{name}"),
        }
    }
}

impl YoungFunction {
    /// `t^p`.
    pub fn power(p: f64) -> Self {
        Self::scaled_power(p, 1.0)
    }

    /// `scale · t^p`.
    pub fn scaled_power(p: f64, scale: f64) -> Self {
        Self {
            family: Family::Power { p, scale },
            kind: YoungKind::ConvexYoung,
        }
    }

    /// `t^p (ln(e + t))^a`.
    pub fn power_log(p: f64, a: f64) -> Self {
        Self {
            family: Family::PowerLog { p, a },
            kind: YoungKind::ConvexYoung,
        }
    }

    /// `e^t − t − 1`.
    pub fn exp() -> Self {
        Self {
            family: Family::Exp,
            kind: YoungKind::ConvexYoung,
        }
    }

    pub fn custom(
        name: impl Into<String>,
        kind: YoungKind,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            family: Family::Custom {
                name: name.into(),
                f: Arc::new(f),
            },
            kind,
        }
    }

    pub fn kind(&self) -> YoungKind {
        self.kind
    }

    /// Exponent of a pure power family, used for fast paths.
    pub fn power_exponent(&self) -> Option<(f64, f64)> {
        match self.family {
            Family::Power { p, scale } => Some((p, scale)),
            _ => None,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let t = t.abs();
        match &self.family {
            Family::Power { p, scale } => {
                if *p == 2.0 {
                    scale * t * t
                } else {
                    scale * t.powf(*p)
                }
            }
            Family::PowerLog { p, a } => t.powf(*p) * (std::f64::consts::E + t).ln().powf(*a),
            Family::Exp => {
                if t < 1e-5 {
                    // series avoids cancellation in e^t − 1 − t
                    t * t * (0.5 + t / 6.0)
                } else {
                    t.exp_m1() - t
                }
            }
            Family::PowerComplement { p, scale } => {
                let q = p / (p - 1.0);
                (p - 1.0) * scale * (t / (scale * p)).powf(q)
            }
            Family::Custom { f, .. } => f(t),
        }
    }

    /// Young complement `M̃(y) = sup_{x≥0}(xy − M(x))`.
    pub fn complement(&self, grid: &LogGrid) -> Result<YoungFunction> {
        if let Family::Power { p, scale } = self.family {
            if p > 1.0 {
                return Ok(YoungFunction {
                    family: Family::PowerComplement { p, scale },
                    kind: YoungKind::ConvexYoung,
                });
            }
        }
        let xs = grid.points_with_zero();
        let ms: Vec<f64> = xs.iter().map(|&x| self.eval(x)).collect();
        let name = format!("complement({self})");
        // probe divergence at a moderate y: the sup must be attained inside the grid
        for &y in &[1.0, 10.0] {
            let (idx, _) = legendre_sup(&xs, &ms, y);
            if idx + 1 == xs.len() {
                return Err(Error::ComplementDiverged);
            }
        }
        let base = self.clone();
        Ok(YoungFunction::custom(name, YoungKind::ConvexYoung, move |y| {
            let (i, v) = legendre_sup(&xs, &ms, y);
            if i == 0 || i + 1 == xs.len() {
                return v;
            }
            // xy − M(x) is concave: polish the grid argmax between its neighbours
            let h = |x: f64| x * y - base.eval(x);
            let (mut a, mut b) = (xs[i - 1], xs[i + 1]);
            for _ in 0..80 {
                let m1 = a + (b - a) / 3.0;
                let m2 = b - (b - a) / 3.0;
                if h(m1) < h(m2) {
                    a = m1;
                } else {
                    b = m2;
                }
            }
            v.max(h(0.5 * (a + b)))
        }))
    }

    /// Checks the Young-function limits at the extremes of `grid`:
    /// `M(ε)/ε < 1e-4` and `M(X)/X > 1e4`.
    pub fn satisfies_young_limits(&self, grid: &LogGrid) -> bool {
        let (lo, hi) = (grid.lo, self.finite_top(grid));
        self.eval(lo) / lo < LIMIT_TOL && self.eval(hi) / hi > 1.0 / LIMIT_TOL
    }

    /// Midpoint convexity on a sampled grid.
    pub fn is_midpoint_convex(&self, grid: &LogGrid) -> bool {
        let xs = grid.points_with_zero();
        xs.windows(2).all(|w| {
            let (x, y) = (w[0], w[1]);
            let mid = self.eval(0.5 * (x + y));
            let avg = 0.5 * (self.eval(x) + self.eval(y));
            !avg.is_finite() || mid <= avg * (1.0 + 1e-12)
        }) && xs.iter().zip(xs.iter().skip(2)).all(|(&x, &y)| {
            let mid = self.eval(0.5 * (x + y));
            let avg = 0.5 * (self.eval(x) + self.eval(y));
            !avg.is_finite() || mid <= avg * (1.0 + 1e-12)
        })
    }

    fn finite_top(&self, grid: &LogGrid) -> f64 {
        grid.points()
            .into_iter()
            .rev()
            .find(|&x| self.eval(2.0 * x).is_finite())
            .unwrap_or(grid.lo)
    }

    fn powered(&self, e: f64) -> YoungFunction {
        let base = self.clone();
        YoungFunction::custom(format!("({self})^{e}"), YoungKind::Quasiconvex, move |t| {
            base.eval(t).powf(e)
        })
    }
}

/// `(argmax, max)` of `xy − M(x)` over sampled `xs`.
fn legendre_sup(xs: &[f64], ms: &[f64], y: f64) -> (usize, f64) {
    let mut best = (0usize, 0.0f64);
    for (i, (&x, &m)) in xs.iter().zip(ms).enumerate() {
        if !m.is_finite() {
            break;
        }
        let v = x * y - m;
        if v > best.1 {
            best = (i, v);
        }
    }
    best
}

impl FromStr for YoungFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let words: Vec<&str> = s.split_whitespace().collect();
        let bad = || Error::InvalidArgument(format!("unknown young family '{s}'"));
        let num = |i: usize| -> Result<f64> {
            words.get(i).and_then(|w| w.parse().ok()).ok_or_else(bad)
        };
        match words.first().copied() {
            Some("power") if words.len() == 2 => Ok(YoungFunction::power(num(1)?)),
            Some("power-log") if words.len() == 3 => {
                Ok(YoungFunction::power_log(num(1)?, num(2)?))
            }
            Some("exp") if words.len() == 1 => Ok(YoungFunction::exp()),
            _ => Err(bad()),
        }
    }
}

/// Log-spaced sample points on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogGrid {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Default for LogGrid {
    fn default() -> Self {
        Self {
            lo: 1e-8,
            hi: 1e8,
            n: 10_000,
        }
    }
}

impl LogGrid {
    pub fn new(lo: f64, hi: f64, n: usize) -> Self {
        Self { lo, hi, n }
    }

    pub fn points(&self) -> Vec<f64> {
        let (a, b) = (self.lo.ln(), self.hi.ln());
        let n = self.n.max(2);
        (0..n)
            .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
            .collect()
    }

    fn points_with_zero(&self) -> Vec<f64> {
        let mut v = vec![0.0];
        v.extend(self.points());
        v
    }
}

/// Growth constant of the `Δ₂` condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Delta2 {
    Bounded(f64),
    Unbounded,
}

impl Delta2 {
    pub fn is_bounded(&self) -> bool {
        matches!(self, Delta2::Bounded(_))
    }
}

/// `sup_x M(2x)/M(x)` over the grid, or `Unbounded` when the ratio passes
/// `1e8` while still increasing at the top of the grid.
pub fn delta2_constant(m: &YoungFunction, grid: &LogGrid) -> Delta2 {
    let ratios: Vec<f64> = grid
        .points()
        .into_iter()
        .filter_map(|x| {
            let mx = m.eval(x);
            (mx > 0.0 && mx.is_finite()).then(|| m.eval(2.0 * x) / mx)
        })
        .collect();
    let sup = ratios.iter().copied().fold(0.0, f64::max);
    if sup.is_finite() && sup <= DELTA2_UNBOUNDED {
        return Delta2::Bounded(sup);
    }
    let tail = &ratios[ratios.len().saturating_sub(10)..];
    let increasing = tail
        .windows(2)
        .all(|w| w[1] >= w[0] || !w[1].is_finite());
    if increasing {
        Delta2::Unbounded
    } else {
        Delta2::Bounded(sup)
    }
}

/// Greatest convex minorant of sampled points `(x_i, y_i)` with increasing `x`.
pub struct ConvexMinorant {
    hull: Vec<(f64, f64)>,
}

impl ConvexMinorant {
    pub fn new(xs: &[f64], ys: &[f64]) -> Self {
        let mut hull: Vec<(f64, f64)> = Vec::with_capacity(xs.len());
        for (&x, &y) in xs.iter().zip(ys) {
            while hull.len() >= 2 {
                let (x1, y1) = hull[hull.len() - 2];
                let (x2, y2) = hull[hull.len() - 1];
                // drop the middle point if it lies on or above the chord
                if (y2 - y1) * (x - x1) >= (y - y1) * (x2 - x1) {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push((x, y));
        }
        Self { hull }
    }

    /// Smallest `x` with `Φ*(x) ≥ y`; `None` above the sampled range.
    pub fn inverse(&self, y: f64) -> Option<f64> {
        let first = self.hull.first()?;
        if y <= first.1 {
            return Some(first.0);
        }
        let i = self.hull.partition_point(|p| p.1 < y);
        let (x2, y2) = *self.hull.get(i)?;
        let (x1, y1) = self.hull[i - 1];
        Some(x1 + (x2 - x1) * (y - y1) / (y2 - y1))
    }

    /// Piecewise-linear value; `None` outside the sampled range.
    pub fn eval(&self, x: f64) -> Option<f64> {
        let first = self.hull.first()?;
        let last = self.hull.last()?;
        if x < first.0 || x > last.0 {
            return None;
        }
        let i = self.hull.partition_point(|p| p.0 < x);
        if i == 0 {
            return Some(first.1);
        }
        let (x1, y1) = self.hull[i - 1];
        let (x2, y2) = self.hull[i];
        Some(y1 + (y2 - y1) * (x - x1) / (x2 - x1))
    }
}

/// Constructive quasi-convexity test: `M(x) ≤ Φ*(c·x)` on the grid for the
/// greatest convex minorant `Φ*` of `M`. Returns the smallest working
/// candidate `c`.
pub fn is_quasiconvex(
    m: impl Fn(f64) -> f64,
    grid: &LogGrid,
    candidates: &[f64],
) -> (bool, Option<f64>) {
    let xs: Vec<f64> = grid.points_with_zero();
    let mut pts: Vec<(f64, f64)> = xs
        .iter()
        .map(|&x| (x, m(x)))
        .take_while(|(_, y)| y.is_finite())
        .collect();
    if pts.len() < 3 {
        return (false, None);
    }
    pts[0].1 = pts[0].1.max(0.0);
    let (px, py): (Vec<f64>, Vec<f64>) = pts.iter().copied().unzip();
    let hull = ConvexMinorant::new(&px, &py);
    let top = *px.last().unwrap();
    let mut sorted = candidates.to_vec();
    sorted.sort_by(f64::total_cmp);
    for c in sorted.into_iter().filter(|&c| c > 1.0) {
        let ok = pts.iter().filter(|(x, _)| c * x <= top).all(|&(x, y)| {
            let phi = hull.eval(c * x).unwrap_or(f64::INFINITY);
            y <= phi * (1.0 + 1e-12) + 1e-300
        });
        if ok {
            return (true, Some(c));
        }
    }
    (false, None)
}

/// `sup_x Φ*⁻¹(M(x))/x`: the least dilation `c` with `M(x) ≤ Φ*(cx)` on
/// the grid, where `Φ*` is the greatest convex minorant of `M`.
pub fn required_dilation(m: impl Fn(f64) -> f64, grid: &LogGrid) -> Option<f64> {
    let xs = grid.points_with_zero();
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .map(|&x| (x, m(x)))
        .take_while(|(_, y)| y.is_finite())
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let (px, py): (Vec<f64>, Vec<f64>) = pts.iter().copied().unzip();
    let hull = ConvexMinorant::new(&px, &py);
    let mut c: f64 = 1.0;
    for &(x, y) in pts.iter().skip(1) {
        if y > 0.0 {
            c = c.max(hull.inverse(y)? / x);
        }
    }
    Some(c)
}

/// Relative growth of the required dilation, from the inner half of the
/// log-span to the full grid, above which `M` is not quasi-convex.
const DILATION_GROWTH_TOL: f64 = 1e-3;

fn dilation_is_stable(m: impl Fn(f64) -> f64 + Copy, grid: &LogGrid) -> bool {
    let (a, b) = (grid.lo.ln(), grid.hi.ln());
    let inner = LogGrid::new(
        (a + 0.25 * (b - a)).exp(),
        (a + 0.75 * (b - a)).exp(),
        grid.n / 2,
    );
    match (required_dilation(m, grid), required_dilation(m, &inner)) {
        (Some(full), Some(half)) => full <= half * (1.0 + DILATION_GROWTH_TOL),
        _ => false,
    }
}

/// Derived data of a Young function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YoungMeta {
    pub delta2_constant: Delta2,
    /// `p(M)`
    pub p_m: f64,
    /// `p′(M) = p(M)/(p(M) − 1)`
    pub p_m_dual: f64,
    /// `𝒬₂^θ` membership at the sampled θ values.
    pub theta_class: bool,
    /// Smallest sampled θ with `M^θ` quasi-convex.
    pub theta_witness: Option<f64>,
    /// Whether the Young limits hold at the grid extremes.
    pub young_limits: bool,
}

/// Estimates `p(M)` by bisection on the exponent `p ∈ (0, 1]` with
/// tolerance `1e-3`, where `1/p(M) = inf{p : M^p quasi-convex}`.
///
/// On a finite grid the hull test alone accepts `t^q` for `q` slightly below
/// 1, so an exponent also needs a dilation constant that does not grow when
/// the grid span widens.
pub fn estimate_pm(m: &YoungFunction) -> Result<YoungMeta> {
    estimate_pm_on(m, &LogGrid::new(1e-8, 1e8, 2000))
}

pub fn estimate_pm_on(m: &YoungFunction, grid: &LogGrid) -> Result<YoungMeta> {
    let qc = |e: f64| {
        let me = |t: f64| m.eval(t).powf(e);
        is_quasiconvex(me, grid, &QUASICONVEX_CANDIDATES).0 && dilation_is_stable(me, grid)
    };
    if !qc(1.0) {
        return Err(Error::NoQuasiConvexExponent);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > 1e-3 {
        let mid = 0.5 * (lo + hi);
        if qc(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let p_m = if hi == 1.0 { 1.0 } else { 2.0 / (lo + hi) };
    let p_m_dual = if p_m > 1.0 {
        p_m / (p_m - 1.0)
    } else {
        f64::INFINITY
    };
    let young_limits = m.satisfies_young_limits(grid);
    if !young_limits {
        log::warn!("{m}: not a Young function (limits fail at grid extremes)");
    }
    let delta2 = delta2_constant(m, grid);
    let theta_witness = THETA_SAMPLES.iter().copied().find(|&th| qc(th));
    Ok(YoungMeta {
        delta2_constant: delta2,
        p_m,
        p_m_dual,
        theta_class: delta2.is_bounded() && theta_witness.is_some(),
        theta_witness,
        young_limits,
    })
}

impl YoungFunction {
    /// `M^e` as a quasi-convex candidate.
    pub fn pow(&self, e: f64) -> YoungFunction {
        self.powered(e)
    }
}
