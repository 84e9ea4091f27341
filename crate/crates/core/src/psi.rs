//! ψ-calculus: sequence classes, ψ-integrals and ψ-derivatives, the
//! `(ψ, β)` specialization and the halving function `η(ψ; t)`.

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::PeriodicFunction;

/// A positive sequence `k ↦ ψ(k)`, optionally with a continuous extension
/// to real `t ≥ 1`.
#[derive(Clone)]
pub enum PsiSequence {
    /// `k^{−r}`
    Power { r: f64 },
    /// `e^{−ak}`
    Exp { a: f64 },
    /// `k^{−r} ln(k + shift)^{−a}`
    LogPower { r: f64, a: f64, shift: f64 },
    /// `c` for every `k`
    Constant(f64),
    /// `values[k − 1]`; no continuous extension
    Table(Vec<f64>),
    Custom {
        name: String,
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
    Scaled(Box<PsiSequence>, f64),
}

impl fmt::Debug for PsiSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PsiSequence({self})")
    }
}

impl fmt::Display for PsiSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PsiSequence::Power { r } => write!(f, "power {r}"),
            PsiSequence::Exp { a } => write!(f, "exp {a}"),
            PsiSequence::LogPower { r, a, shift } if *shift == 1.0 => {
                write!(f, "log-power {r} {a}")
            }
            PsiSequence::LogPower { r, a, shift } => write!(f, "log-power {r} {a} {shift}"),
            PsiSequence::Constant(c) => write!(f, "const {c}"),
            PsiSequence::Table(v) => write!(f, "table[{}]", v.len()),
            PsiSequence::Custom { name, .. } => f.write_str(name),
            PsiSequence::Scaled(s, c) => write!(f, "{c}*({s})"),
        }
    }
}

impl FromStr for PsiSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let words: Vec<&str> = s.split_whitespace().collect();
        let bad = || Error::InvalidArgument(format!("unknown psi family '{s}'"));
        let num = |i: usize| -> Result<f64> {
            words.get(i).and_then(|w| w.parse().ok()).ok_or_else(bad)
        };
        match (words.first().copied(), words.len()) {
            (Some("power"), 2) => Ok(PsiSequence::Power { r: num(1)? }),
            (Some("exp"), 2) => Ok(PsiSequence::Exp { a: num(1)? }),
            (Some("log-power"), 3) => Ok(PsiSequence::LogPower {
                r: num(1)?,
                a: num(2)?,
                shift: 1.0,
            }),
            (Some("log-power"), 4) => Ok(PsiSequence::LogPower {
                r: num(1)?,
                a: num(2)?,
                shift: num(3)?,
            }),
            (Some("const"), 2) => Ok(PsiSequence::Constant(num(1)?)),
            _ => Err(bad()),
        }
    }
}

impl PsiSequence {
    pub fn custom(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        PsiSequence::Custom {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn at(&self, k: usize) -> f64 {
        match self {
            PsiSequence::Table(v) => v.get(k.wrapping_sub(1)).copied().unwrap_or(0.0),
            PsiSequence::Scaled(s, c) => c * s.at(k),
            _ => self.eval_unchecked(k as f64),
        }
    }

    fn eval_unchecked(&self, t: f64) -> f64 {
        match self {
            PsiSequence::Power { r } => t.powf(-r),
            PsiSequence::Exp { a } => (-a * t).exp(),
            PsiSequence::LogPower { r, a, shift } => t.powf(-r) * (t + shift).ln().powf(-a),
            PsiSequence::Constant(c) => *c,
            PsiSequence::Table(_) => f64::NAN,
            PsiSequence::Custom { f, .. } => f(t),
            PsiSequence::Scaled(s, c) => c * s.eval_unchecked(t),
        }
    }

    pub fn has_extension(&self) -> bool {
        match self {
            PsiSequence::Table(_) => false,
            PsiSequence::Scaled(s, _) => s.has_extension(),
            _ => true,
        }
    }

    /// Continuous extension `ψ(t)`, `t ≥ 1`.
    pub fn extension(&self, t: f64) -> Result<f64> {
        if !self.has_extension() {
            return Err(Error::MissingExtension);
        }
        Ok(self.eval_unchecked(t))
    }

    /// `ln |ψ(t)|` on the continuous extension, computed without underflow
    /// for the built-in families.
    pub fn ln_extension(&self, t: f64) -> Result<f64> {
        match self {
            PsiSequence::Power { r } => Ok(-r * t.ln()),
            PsiSequence::Exp { a } => Ok(-a * t),
            PsiSequence::LogPower { r, a, shift } => Ok(-r * t.ln() - a * (t + shift).ln().ln()),
            PsiSequence::Scaled(s, c) => Ok(s.ln_extension(t)? + c.abs().ln()),
            _ => Ok(self.extension(t)?.abs().ln()),
        }
    }

    pub fn is_identically_zero(&self) -> bool {
        match self {
            PsiSequence::Constant(c) => *c == 0.0,
            PsiSequence::Scaled(s, c) => *c == 0.0 || s.is_identically_zero(),
            PsiSequence::Table(v) => v.iter().all(|&x| x == 0.0),
            _ => false,
        }
    }

    /// `|ψ|`, dropping any constant sign factor.
    pub fn magnitude(&self) -> PsiSequence {
        match self {
            PsiSequence::Scaled(s, c) => {
                if c.abs() == 1.0 {
                    s.magnitude()
                } else {
                    PsiSequence::Scaled(Box::new(s.magnitude()), c.abs())
                }
            }
            PsiSequence::Constant(c) => PsiSequence::Constant(c.abs()),
            PsiSequence::Table(v) => PsiSequence::Table(v.iter().map(|x| x.abs()).collect()),
            other => other.clone(),
        }
    }

    /// Integral-test certificate for `Σ ψ(k)/k` beyond `n` terms:
    /// `Some(Some(tail))` converges, `Some(None)` diverges, `None` unknown.
    fn mprime_tail(&self, n: f64) -> Option<Option<f64>> {
        match self {
            PsiSequence::Power { r } if *r > 0.0 => Some(Some(n.powf(-r) / r)),
            PsiSequence::Power { .. } => Some(None),
            PsiSequence::Exp { a } if *a > 0.0 => {
                Some(Some((-a * n).exp() / (n * (1.0 - (-a).exp()))))
            }
            PsiSequence::Exp { .. } => Some(None),
            PsiSequence::LogPower { r, a, shift } => {
                if *r > 0.0 {
                    Some(Some(n.powf(-r) * (n + shift).ln().powf(-a) / r))
                } else if *r == 0.0 && *a > 1.0 {
                    Some(Some((n + shift - 1.0).ln().powf(1.0 - a) / (a - 1.0)))
                } else {
                    Some(None)
                }
            }
            PsiSequence::Constant(c) if *c == 0.0 => Some(Some(0.0)),
            PsiSequence::Constant(_) => Some(None),
            PsiSequence::Scaled(s, c) => s
                .mprime_tail(n)
                .map(|t| t.map(|v| v * c.abs())),
            PsiSequence::Table(_) | PsiSequence::Custom { .. } => None,
        }
    }
}

/// The pair `(ψ₁, ψ₂)` with `ψ(k) = √(ψ₁² + ψ₂²)`.
#[derive(Debug, Clone)]
pub struct PsiPair {
    pub psi1: PsiSequence,
    pub psi2: PsiSequence,
    /// Scalar ψ when known in closed form, as for `(ψ, β)` pairs.
    scalar: Option<PsiSequence>,
    pub beta: Option<f64>,
}

impl PsiPair {
    pub fn new(psi1: PsiSequence, psi2: PsiSequence) -> Self {
        Self {
            psi1,
            psi2,
            scalar: None,
            beta: None,
        }
    }

    /// `ψ(k)`.
    pub fn psi(&self, k: usize) -> f64 {
        match &self.scalar {
            Some(s) => s.at(k),
            None => self.psi1.at(k).hypot(self.psi2.at(k)),
        }
    }

    /// `ψ²(k) = ψ₁²(k) + ψ₂²(k)`.
    pub fn psi_sq(&self, k: usize) -> f64 {
        let (a, b) = (self.psi1.at(k), self.psi2.at(k));
        a * a + b * b
    }

    /// Scalar ψ as a sequence (its continuous extension drives `η`).
    pub fn scalar(&self) -> PsiSequence {
        match &self.scalar {
            Some(s) => s.clone(),
            None => {
                let (p1, p2) = (self.psi1.clone(), self.psi2.clone());
                if p1.has_extension() && p2.has_extension() {
                    PsiSequence::custom(format!("|({p1}, {p2})|"), move |t| {
                        p1.eval_unchecked(t).hypot(p2.eval_unchecked(t))
                    })
                } else {
                    let n = 4096;
                    PsiSequence::Table((1..=n).map(|k| self.psi(k)).collect())
                }
            }
        }
    }

    pub fn label(&self) -> String {
        match (&self.scalar, self.beta) {
            (Some(s), Some(b)) => format!("({s}; beta={b})"),
            _ => format!("({}, {})", self.psi1, self.psi2),
        }
    }
}

/// `cos(βπ/2)` and `sin(βπ/2)`, exact when `β` is an integer.
fn beta_phase(beta: f64) -> (f64, f64) {
    if beta.fract() == 0.0 && beta.abs() < 1e15 {
        match (beta as i64).rem_euclid(4) {
            0 => (1.0, 0.0),
            1 => (0.0, 1.0),
            2 => (-1.0, 0.0),
            _ => (0.0, -1.0),
        }
    } else {
        let t = beta * PI / 2.0;
        (t.cos(), t.sin())
    }
}

/// `ψ₁ = ψ cos(βπ/2)`, `ψ₂ = ψ sin(βπ/2)`.
pub fn psi_beta(psi: PsiSequence, beta: f64) -> PsiPair {
    let (c, s) = beta_phase(beta);
    PsiPair {
        psi1: PsiSequence::Scaled(Box::new(psi.clone()), c),
        psi2: PsiSequence::Scaled(Box::new(psi.clone()), s),
        scalar: Some(psi),
        beta: Some(beta),
    }
}

/// `f^ψ`: harmonic `k` multiplied by `ψ₁/ψ²` on `A_k` and `−ψ₂/ψ²` on `Ã_k`.
pub fn psi_derivative(f: &PeriodicFunction, psi: &PsiPair) -> Result<PeriodicFunction> {
    for (i, &(a, b)) in f.coeffs.iter().enumerate() {
        let k = i + 1;
        if (a != 0.0 || b != 0.0) && psi.psi_sq(k) == 0.0 {
            return Err(Error::ZeroPsi(k));
        }
    }
    let m = |k: usize| {
        let q = psi.psi_sq(k);
        if q == 0.0 {
            0.0
        } else {
            psi.psi1.at(k) / q
        }
    };
    let mt = |k: usize| {
        let q = psi.psi_sq(k);
        if q == 0.0 {
            0.0
        } else {
            -psi.psi2.at(k) / q
        }
    };
    Ok(f.multiplier(m, mt))
}

/// `𝒥^ψ(f)` with constant term `a0`.
pub fn psi_integral(f: &PeriodicFunction, psi: &PsiPair, a0: f64) -> PeriodicFunction {
    let mut out = f.multiplier(|k| psi.psi1.at(k), |k| psi.psi2.at(k));
    out.a0_half = a0;
    out
}

/// Rebuilds `f` from the coefficients of `f^ψ`:
/// `a_k(f) = ψ₁a_k(f^ψ) − ψ₂b_k(f^ψ)`, `b_k(f) = ψ₂a_k(f^ψ) + ψ₁b_k(f^ψ)`.
pub fn coefficient_relations(fpsi: &PeriodicFunction, psi: &PsiPair) -> PeriodicFunction {
    let mut coeffs = Vec::with_capacity(fpsi.degree());
    for k in 1..=fpsi.degree() {
        let (a, b) = fpsi.harmonic(k);
        let (p1, p2) = (psi.psi1.at(k), psi.psi2.at(k));
        coeffs.push((p1 * a - p2 * b, p2 * a + p1 * b));
    }
    PeriodicFunction::new(0.0, coeffs)
}

const ETA_BRACKET_LIMIT: f64 = 1e15;
const ETA_TOL: f64 = 1e-10;

/// Unique `η ≥ t` with `ψ(η) = ψ(t)/2` on the continuous extension.
pub fn eta_of(psi: &PsiSequence, t: f64) -> Result<f64> {
    let target = psi.ln_extension(t)? - LN_2;
    let below = |x: f64| -> Result<bool> { Ok(psi.ln_extension(x)? <= target) };
    let mut lo = t;
    let mut hi = t.max(1.0) * 2.0;
    while !below(hi)? {
        lo = hi;
        hi *= 2.0;
        if hi > ETA_BRACKET_LIMIT * t.max(1.0) {
            return Err(Error::EtaBracket { t });
        }
    }
    while hi - lo > ETA_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if below(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `η(ψ; t)` for the scalar ψ of a pair.
pub fn eta(psi: &PsiPair, t: f64) -> Result<f64> {
    eta_of(&psi.scalar(), t)
}

/// Index chain `n₀ = n`, `n_i = ⌊η(n_{i−1})⌋ + 1`, ending with the first
/// index above `k_max`.
pub fn eta_chain(psi: &PsiSequence, n: usize, k_max: usize) -> Result<Vec<usize>> {
    let mut chain = vec![n];
    while *chain.last().unwrap() <= k_max {
        let prev = *chain.last().unwrap();
        let next = eta_of(psi, prev as f64)?.floor() as usize + 1;
        chain.push(next.max(prev + 1));
    }
    Ok(chain)
}

/// Tri-state verdict for conditions that finitely many terms cannot settle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Membership {
    Yes,
    No,
    UndeterminedTail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MPrimeReport {
    pub verdict: Membership,
    pub partial_sum: f64,
    pub tail_estimate: Option<f64>,
}

/// Sup scan of a defining quantity over `t ∈ [1, T_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub member: bool,
    pub sup: f64,
    /// Log-log slope over the last decade of the scan.
    pub tail_slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiClassReport {
    pub in_mstar: bool,
    pub in_m: bool,
    pub in_mprime: MPrimeReport,
    pub in_m0: Option<ScanReport>,
    pub in_f: Option<ScanReport>,
    pub k_checked: usize,
}

impl PsiClassReport {
    pub fn in_m0(&self) -> bool {
        self.in_m0.as_ref().is_some_and(|s| s.member)
    }

    pub fn in_f(&self) -> bool {
        self.in_f.as_ref().is_some_and(|s| s.member)
    }

    pub fn in_mprime(&self) -> bool {
        self.in_m && self.in_mprime.verdict == Membership::Yes
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifyOptions {
    pub k_max: usize,
    /// `ψ(K_max) < eps_decay · ψ(1)` stands in for `ψ(k) → 0`.
    pub eps_decay: f64,
    pub mprime_terms: usize,
    pub t_max: f64,
    pub t_points: usize,
    /// Run the `𝔐₀` and `F` scans (requires a continuous extension).
    pub scans: bool,
    /// Largest tail slope that still counts as bounded.
    pub slope_tol: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            k_max: 1024,
            eps_decay: 0.25,
            mprime_terms: 100_000,
            t_max: 1e4,
            t_points: 2000,
            scans: true,
            slope_tol: 0.05,
        }
    }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1).max(1) as f64).exp())
        .collect()
}

fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return 0.0;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

fn scan(ts: &[f64], values: &[f64], slope_tol: f64) -> ScanReport {
    let sup = values.iter().copied().fold(0.0, f64::max);
    let finite = values.iter().all(|v| v.is_finite() && *v > 0.0);
    let t_end = *ts.last().unwrap();
    let (lx, ly): (Vec<f64>, Vec<f64>) = ts
        .iter()
        .zip(values)
        .filter(|(t, v)| **t >= t_end / 10.0 && **v > 0.0)
        .map(|(t, v)| (t.ln(), v.ln()))
        .unzip();
    let tail_slope = ls_slope(&lx, &ly);
    ScanReport {
        member: finite && tail_slope <= slope_tol,
        sup,
        tail_slope,
    }
}

/// Class memberships of a positive sequence, checked up to `K_max`.
pub fn classify(psi: &PsiSequence, opts: &ClassifyOptions) -> Result<PsiClassReport> {
    if opts.scans && !psi.has_extension() {
        return Err(Error::MissingExtension);
    }
    let mut values = Vec::with_capacity(opts.k_max + 2);
    for k in 1..=opts.k_max + 2 {
        let v = psi.at(k);
        if v.is_nan() || v < 0.0 || (v == 0.0 && k <= 3) {
            return Err(Error::NonPositivePsi { k, value: v });
        }
        if v == 0.0 || v < f64::MIN_POSITIVE {
            break;
        }
        values.push(v);
    }
    // k_checked = last k with ψ(k+2) still representable
    let k_checked = values.len().saturating_sub(2).min(opts.k_max);
    let mono = values.windows(2).take(k_checked).all(|w| w[0] - w[1] >= 0.0);
    let decays = values.len() <= opts.k_max + 1 || values[k_checked - 1] < opts.eps_decay * values[0];
    let in_mstar = mono && decays;
    let convex = values
        .windows(3)
        .take(k_checked)
        .all(|w| w[2] - 2.0 * w[1] + w[0] > 0.0);
    let in_m = in_mstar && convex;

    let partial_sum = match psi {
        PsiSequence::Table(v) => v.iter().enumerate().map(|(i, x)| x / (i + 1) as f64).sum(),
        _ => (1..=opts.mprime_terms)
            .map(|k| psi.at(k) / k as f64)
            .sum::<f64>(),
    };
    let in_mprime = match psi.mprime_tail(opts.mprime_terms as f64) {
        Some(Some(tail)) => MPrimeReport {
            verdict: Membership::Yes,
            partial_sum,
            tail_estimate: Some(tail),
        },
        Some(None) => MPrimeReport {
            verdict: Membership::No,
            partial_sum,
            tail_estimate: Some(f64::INFINITY),
        },
        None => MPrimeReport {
            verdict: Membership::UndeterminedTail,
            partial_sum,
            tail_estimate: None,
        },
    };

    let (in_m0, in_f) = if opts.scans {
        let ts = log_grid(1.0, opts.t_max, opts.t_points);
        let mut ratio = Vec::with_capacity(ts.len());
        let mut deriv = Vec::with_capacity(ts.len());
        let central = |t: f64, h: f64| -> Result<f64> {
            let lo = (t - h).max(1.0);
            Ok((eta_of(psi, t + h)? - eta_of(psi, lo)?) / (t + h - lo))
        };
        for &t in &ts {
            // a sequence with no halving point is outside both classes
            let point = eta_of(psi, t).and_then(|e| {
                let h = 1e-3 * t;
                let d = (4.0 * central(t, 0.5 * h)? - central(t, h)?) / 3.0;
                Ok((t / (e - t), d))
            });
            match point {
                Ok((q, d)) => {
                    ratio.push(q);
                    deriv.push(d);
                }
                Err(Error::EtaBracket { .. }) => {
                    ratio.push(f64::INFINITY);
                    deriv.push(f64::INFINITY);
                }
                Err(e) => return Err(e),
            }
        }
        let mut m0 = scan(&ts, &ratio, opts.slope_tol);
        m0.member &= in_m;
        let mut f = scan(&ts, &deriv, opts.slope_tol);
        f.member &= in_m;
        (Some(m0), Some(f))
    } else {
        (None, None)
    };

    Ok(PsiClassReport {
        in_mstar,
        in_m,
        in_mprime,
        in_m0,
        in_f,
        k_checked,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power(r: f64) -> PsiSequence {
        PsiSequence::Power { r }
    }

    #[test]
    fn derivative_examples() {
        let p = PsiPair::new(power(2.0), PsiSequence::Constant(0.0));
        let d = psi_derivative(&PeriodicFunction::cos(2, 1.0), &p).unwrap();
        assert_eq!(d, PeriodicFunction::cos(2, 4.0));
        let q = PsiPair::new(PsiSequence::Constant(0.0), power(1.0));
        let d = psi_derivative(&PeriodicFunction::cos(1, 1.0), &q).unwrap();
        assert_eq!(d, PeriodicFunction::sin(1, -1.0));
        let d = psi_derivative(&PeriodicFunction::constant(5.0), &p).unwrap();
        assert!(d.is_zero());
    }

    #[test]
    fn derivative_rejects_vanishing_psi() {
        let z = PsiPair::new(PsiSequence::Table(vec![1.0, 0.0]), PsiSequence::Constant(0.0));
        let f = PeriodicFunction::cos(2, 1.0);
        assert!(matches!(psi_derivative(&f, &z), Err(Error::ZeroPsi(2))));
    }

    #[test]
    fn integral_examples() {
        let p = PsiPair::new(power(2.0), PsiSequence::Constant(0.0));
        assert_eq!(
            psi_integral(&PeriodicFunction::cos(2, 1.0), &p, 0.0),
            PeriodicFunction::cos(2, 0.25)
        );
        let q = PsiPair::new(PsiSequence::Constant(0.0), power(1.0));
        assert_eq!(
            psi_integral(&PeriodicFunction::sin(1, 1.0), &q, 0.0),
            PeriodicFunction::cos(1, -1.0)
        );
        let id = PsiPair::new(PsiSequence::Constant(1.0), PsiSequence::Constant(0.0));
        let f = PeriodicFunction::new(1.5, vec![(0.3, -0.2), (1.0, 0.5)]);
        assert_eq!(psi_integral(&f, &id, f.a0_half), f);
    }

    #[test]
    fn beta_pairs_reduce_to_classical_derivatives() {
        let d1 = psi_derivative(&PeriodicFunction::cos(4, 1.0), &psi_beta(power(1.0), 1.0)).unwrap();
        assert_eq!(d1, PeriodicFunction::sin(4, -4.0));
        let d2 = psi_derivative(&PeriodicFunction::cos(3, 1.0), &psi_beta(power(2.0), 2.0)).unwrap();
        assert_eq!(d2, PeriodicFunction::cos(3, -9.0));
        let p0 = psi_beta(power(1.0), 0.0);
        assert!(p0.psi2.is_identically_zero());
    }

    #[test]
    fn coefficient_relation_examples() {
        let p = PsiPair::new(power(2.0), PsiSequence::Constant(0.0));
        assert_eq!(
            coefficient_relations(&PeriodicFunction::cos(2, 4.0), &p),
            PeriodicFunction::cos(2, 1.0)
        );
        let f = PeriodicFunction::new(0.0, vec![(0.0, 0.0), (0.0, 0.0), (2.0, 3.0)]);
        let r = coefficient_relations(&f, &p);
        assert_eq!(r.coeffs[2], (2.0 / 9.0, 3.0 / 9.0));
        let q = PsiPair::new(PsiSequence::Table(vec![0.0]), PsiSequence::Table(vec![1.0]));
        assert_eq!(
            coefficient_relations(&PeriodicFunction::cos(1, 1.0), &q),
            PeriodicFunction::sin(1, 1.0)
        );
    }

    #[test]
    fn eta_examples() {
        assert!((eta_of(&power(2.0), 3.0).unwrap() - 3.0 * 2f64.sqrt()).abs() < 1e-8);
        assert!((eta_of(&PsiSequence::Exp { a: 1.0 }, 1.0).unwrap() - (1.0 + LN_2)).abs() < 1e-8);
        assert!((eta_of(&power(1.0), 10.0).unwrap() - 20.0).abs() < 1e-8);
    }

    #[test]
    fn eta_fails_for_flat_psi() {
        assert!(matches!(
            eta_of(&PsiSequence::Constant(1.0), 2.0),
            Err(Error::EtaBracket { .. })
        ));
        let table = PsiSequence::Table(vec![1.0, 0.5]);
        assert!(matches!(eta_of(&table, 1.0), Err(Error::MissingExtension)));
    }

    #[test]
    fn eta_chain_for_inverse_square() {
        let chain = eta_chain(&power(2.0), 2, 16).unwrap();
        assert_eq!(chain, vec![2, 3, 5, 8, 12, 17]);
    }

    #[test]
    fn classify_inverse_square() {
        let r = classify(&power(2.0), &ClassifyOptions::default()).unwrap();
        assert!(r.in_mstar && r.in_m && r.in_mprime() && r.in_m0() && r.in_f());
        let m0 = r.in_m0.unwrap();
        assert!((m0.sup - 1.0 / (2f64.sqrt() - 1.0)).abs() < 1e-6);
        assert!((r.in_mprime.partial_sum - 1.2020569).abs() < 1e-6);
    }

    #[test]
    fn classify_slow_log_decay() {
        let psi = PsiSequence::LogPower { r: 0.0, a: 1.0, shift: 2.0 };
        let r = classify(&psi, &ClassifyOptions::default()).unwrap();
        assert!(r.in_mstar);
        assert_eq!(r.in_mprime.verdict, Membership::No);
        assert!(!r.in_mprime());
    }

    #[test]
    fn classify_increasing_sequence() {
        let r = classify(&power(-1.0), &ClassifyOptions::default()).unwrap();
        assert!(!r.in_mstar && !r.in_m);
    }

    #[test]
    fn classify_exponential_is_f_not_m0() {
        let r = classify(&PsiSequence::Exp { a: 1.0 }, &ClassifyOptions::default()).unwrap();
        assert!(r.in_m && r.in_f() && !r.in_m0());
        assert!(r.k_checked < 1024);
    }

    #[test]
    fn classify_table_needs_no_extension_without_scans() {
        let t = PsiSequence::Table((1..=50).map(|k| 1.0 / (k * k) as f64).collect());
        assert!(matches!(
            classify(&t, &ClassifyOptions { k_max: 40, ..Default::default() }),
            Err(Error::MissingExtension)
        ));
        let r = classify(&t, &ClassifyOptions { k_max: 40, scans: false, ..Default::default() })
            .unwrap();
        assert!(r.in_m);
        assert_eq!(r.in_mprime.verdict, Membership::UndeterminedTail);
    }

    #[test]
    fn psi_family_names() {
        let p: PsiSequence = "log-power 1 2".parse().unwrap();
        assert!((p.at(1) - 2f64.ln().powi(-2)).abs() < 1e-15);
        assert!("gamma 1".parse::<PsiSequence>().is_err());
    }
}
