//! Bounded-ratio experiments for the direct and inverse approximation
//! inequalities, and their CSV/JSON reports.
//!
//! Every run produces rows `(n, lhs, rhs, ratio)`. The inequality is judged
//! bounded when the least-squares slope of `ln ratio` against `ln n` stays
//! below the configured tolerance and every ratio is finite.

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bestapprox::{en_sequence, jackson_direct_check, EnSequence};
use crate::config::{Experiment, FunctionSource, HypothesisPolicy, TheoremId};
use crate::error::{Error, Hypothesis, Result};
use crate::fourier::PeriodicFunction;
use crate::orlicz::OrliczSpace;
use crate::psi::{
    classify, eta_chain, eta_of, psi_derivative, psi_integral, ClassifyOptions, PsiClassReport,
    PsiPair, PsiSequence,
};
use crate::smoothness::{modulus_derivative_ratios, modulus, ModulusQuery};

pub const REPORT_SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Bounded,
    Growing,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub n: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub degenerate: bool,
}

impl Row {
    fn new(n: usize, lhs: f64, rhs: f64, degenerate: bool) -> Self {
        Self {
            n,
            lhs,
            rhs,
            ratio: if degenerate { f64::NAN } else { lhs / rhs },
            degenerate,
        }
    }
}

/// Rows of one inequality with their ratio statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub rows: Vec<Row>,
    pub ratio_max: f64,
    pub ratio_trend: f64,
    pub verdict: Verdict,
}

impl Series {
    pub fn new(name: impl Into<String>, rows: Vec<Row>, slope_tol: f64) -> Self {
        let live: Vec<&Row> = rows.iter().filter(|r| !r.degenerate).collect();
        let ratio_max = live.iter().map(|r| r.ratio).fold(0.0, |m: f64, r| {
            if r.is_nan() {
                f64::INFINITY
            } else {
                m.max(r)
            }
        });
        let (xs, ys): (Vec<f64>, Vec<f64>) = live
            .iter()
            .filter(|r| r.ratio > 0.0 && r.ratio.is_finite())
            .map(|r| ((r.n as f64).ln(), r.ratio.ln()))
            .unzip();
        let ratio_trend = ls_slope(&xs, &ys);
        let verdict = if xs.len() < 2 {
            Verdict::Inconclusive
        } else if ratio_trend <= slope_tol && ratio_max.is_finite() {
            Verdict::Bounded
        } else {
            Verdict::Growing
        };
        Self {
            name: name.into(),
            rows,
            ratio_max,
            ratio_trend,
            verdict,
        }
    }
}

fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    if xs.len() < 2 {
        return f64::NAN;
    }
    let n = xs.len() as f64;
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

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub hypothesis: Hypothesis,
    pub subject: String,
    pub holds: bool,
}

/// One link of the `n_i` chain: `E_{n_i+1}/ψ(n_i)` against its partial sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainLink {
    pub n_prev: usize,
    pub n_i: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TelescopingReport {
    pub links: Vec<ChainLink>,
    pub min_slack: f64,
    /// Smallest constant `C` with `lhs ≤ C·rhs` on every link.
    pub required_constant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub experiment: Experiment,
    pub tool_version: String,
    /// How the infinite sums on the right were terminated, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub theorem_id: TheoremId,
    pub rows: Vec<Row>,
    pub ratio_max: f64,
    pub ratio_trend: f64,
    pub verdict: Verdict,
    /// Companion inequalities checked in the same run.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub extra: Vec<Series>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub hypotheses: Vec<HypothesisCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub telescoping: Option<TelescopingReport>,
    pub provenance: Provenance,
}

impl VerificationReport {
    fn new(exp: &Experiment, main: Series, ctx: Context) -> Self {
        let verdict = ctx
            .extra
            .iter()
            .map(|s| s.verdict)
            .fold(main.verdict, worse);
        Self {
            schema: REPORT_SCHEMA,
            theorem_id: exp.run.theorem_id,
            rows: main.rows,
            ratio_max: main.ratio_max,
            ratio_trend: main.ratio_trend,
            verdict,
            extra: ctx.extra,
            hypotheses: ctx.hypotheses,
            telescoping: ctx.telescoping,
            provenance: Provenance {
                experiment: exp.clone(),
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                tail: ctx.tail,
            },
        }
    }
}

fn worse(a: Verdict, b: Verdict) -> Verdict {
    use Verdict::*;
    match (a, b) {
        (Growing, _) | (_, Growing) => Growing,
        (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
        _ => Bounded,
    }
}

#[derive(Default)]
struct Context {
    extra: Vec<Series>,
    hypotheses: Vec<HypothesisCheck>,
    telescoping: Option<TelescopingReport>,
    tail: Option<String>,
}

impl Context {
    /// Records a hypothesis and aborts under [`HypothesisPolicy::Enforce`].
    fn require(
        &mut self,
        policy: HypothesisPolicy,
        hypothesis: Hypothesis,
        subject: &str,
        holds: bool,
    ) -> Result<()> {
        self.hypotheses.push(HypothesisCheck {
            hypothesis,
            subject: subject.into(),
            holds,
        });
        if !holds {
            log::warn!("{subject} not in {hypothesis}");
            if policy == HypothesisPolicy::Enforce {
                return Err(Error::PsiHypothesis(hypothesis));
            }
        }
        Ok(())
    }
}

fn class_of(psi: &PsiSequence, scans: bool) -> Result<Option<PsiClassReport>> {
    if psi.is_identically_zero() {
        return Ok(None);
    }
    let opts = ClassifyOptions {
        scans,
        ..ClassifyOptions::default()
    };
    classify(&psi.magnitude(), &opts).map(Some)
}

fn scalar_psi(pair: &PsiPair) -> PsiSequence {
    pair.scalar().magnitude()
}

/// Dispatches on the experiment's theorem id.
pub fn run(exp: &Experiment) -> Result<VerificationReport> {
    exp.validate()?;
    match exp.run.theorem_id {
        TheoremId::Bernstein15 => verify_bernstein(exp),
        TheoremId::LemmaA8 => verify_lemma_a(exp),
        TheoremId::TheoremA567 => verify_theorem_a(exp),
        TheoremId::Direct16 => verify_direct(exp),
        TheoremId::Corollary16s => verify_corollary(exp),
        TheoremId::Inverse21 => verify_inverse_21(exp),
        TheoremId::Inverse413 => verify_inverse_41_3(exp),
    }
}

fn random_polynomial(n: usize, seed: u64) -> PeriodicFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ n as u64);
    let a0 = rng.gen_range(-1.0..1.0);
    let coeffs = (0..n)
        .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    PeriodicFunction::new(a0, coeffs)
}

/// `‖D^ψ_β T_n‖ ≤ K ‖T_n‖ / ψ(n)`.
pub fn verify_bernstein(exp: &Experiment) -> Result<VerificationReport> {
    let sp = exp.space.build()?;
    let pair = exp.psi.pair()?;
    let psi = scalar_psi(&pair);
    let mut ctx = Context::default();
    let mstar = class_of(&psi, false)?.is_some_and(|c| c.in_mstar);
    ctx.require(exp.run.policy, Hypothesis::MStar, "psi", mstar)?;
    let source = exp.function.source()?;
    let tol = &exp.run.tolerances;
    let mut rows = Vec::new();
    for n in exp.run.ns() {
        let t = match &source {
            FunctionSource::Harmonics if n == 0 => PeriodicFunction::constant(1.0),
            FunctionSource::Harmonics => PeriodicFunction::cos(n, 1.0),
            FunctionSource::Random => random_polynomial(n, exp.run.seed),
            FunctionSource::Fixed(f) => f.partial_sum(n),
        };
        let lhs = sp.norm(&psi_derivative(&t, &pair)?)?;
        // 1/ψ(0) := 0
        let rhs = if n == 0 { 0.0 } else { sp.norm(&t)? / pair.psi(n) };
        rows.push(Row::new(n, lhs, rhs, rhs < tol.degenerate_rhs));
    }
    let main = Series::new(exp.run.theorem_id.as_str(), rows, tol.trend_slope);
    Ok(VerificationReport::new(exp, main, ctx))
}

fn require_direct_hypotheses(exp: &Experiment, pair: &PsiPair, ctx: &mut Context) -> Result<()> {
    let in_m = class_of(&pair.psi1, false)?.map_or(true, |c| c.in_m);
    ctx.require(exp.run.policy, Hypothesis::M, "psi1", in_m)?;
    let in_mp = class_of(&pair.psi2, false)?.map_or(true, |c| c.in_mprime());
    ctx.require(exp.run.policy, Hypothesis::MPrime, "psi2", in_mp)
}

/// `E_n(f) ≤ K ψ(n) E_n(f^ψ)` for `f = 𝒥^ψ(g)`.
pub fn verify_direct(exp: &Experiment) -> Result<VerificationReport> {
    let sp = exp.space.build()?;
    let pair = exp.psi.pair()?;
    let mut ctx = Context::default();
    require_direct_hypotheses(exp, &pair, &mut ctx)?;
    let g = exp.function.fixed()?;
    let f = psi_integral(&g, &pair, exp.psi.a0);
    let ns: Vec<usize> = exp.run.ns().filter(|&n| n >= 1).collect();
    let tol = &exp.run.tolerances;
    let rows = jackson_direct_check(&sp, &f, &pair, &ns)?
        .into_iter()
        .map(|r| {
            let degenerate = r.e_fpsi < tol.degenerate_en;
            Row::new(r.n, r.e_f, r.psi_n * r.e_fpsi, degenerate)
        })
        .collect();
    let main = Series::new(exp.run.theorem_id.as_str(), rows, tol.trend_slope);
    Ok(VerificationReport::new(exp, main, ctx))
}

/// `E_n(f) ≤ K ψ(n)` for `f = 𝒥^ψ(g)` with `‖g‖ = 1`.
pub fn verify_corollary(exp: &Experiment) -> Result<VerificationReport> {
    let sp = exp.space.build()?;
    let pair = exp.psi.pair()?;
    let mut ctx = Context::default();
    require_direct_hypotheses(exp, &pair, &mut ctx)?;
    let g = exp.function.fixed()?;
    let gn = sp.norm(&g)?;
    if gn == 0.0 {
        return Err(Error::InvalidArgument("g must be nonzero".into()));
    }
    let f = psi_integral(&g.scaled(1.0 / gn), &pair, exp.psi.a0);
    let n_max = exp.run.n_range[1].max(1);
    let e = en_sequence(&sp, &f, n_max)?;
    let tol = &exp.run.tolerances;
    let rows = exp
        .run
        .ns()
        .filter(|&n| n >= 1)
        .map(|n| {
            let rhs = pair.psi(n);
            Row::new(n, e.results[n - 1].value, rhs, rhs < tol.degenerate_rhs)
        })
        .collect();
    let main = Series::new(exp.run.theorem_id.as_str(), rows, tol.trend_slope);
    Ok(VerificationReport::new(exp, main, ctx))
}

/// `‖S_n f‖ ≤ C‖f‖`, `‖f̃‖ ≤ C‖f‖` and `‖f − S_{n−1}f‖ ≤ C E_n(f)`.
pub fn verify_theorem_a(exp: &Experiment) -> Result<VerificationReport> {
    let sp = exp.space.build()?;
    let f = exp.function.fixed()?;
    let tol = &exp.run.tolerances;
    let norm_f = sp.norm(&f)?;
    let degenerate = norm_f < tol.degenerate_rhs;
    let conj = sp.norm(&f.conjugate())?;
    let n_max = exp.run.n_range[1].max(1);
    let e = en_sequence(&sp, &f, n_max)?;
    let (mut partial, mut conjugate, mut remainder) = (Vec::new(), Vec::new(), Vec::new());
    for n in exp.run.ns() {
        partial.push(Row::new(n, sp.norm(&f.partial_sum(n))?, norm_f, degenerate));
        conjugate.push(Row::new(n, conj, norm_f, degenerate));
        if n >= 1 {
            let en = e.results[n - 1].value;
            let rem = sp.norm(&(&f - &f.partial_sum(n - 1)))?;
            remainder.push(Row::new(n, rem, en, en < tol.degenerate_en));
        }
    }
    let id = exp.run.theorem_id.as_str();
    let mut ctx = Context::default();
    ctx.extra.push(Series::new(format!("{id}:conjugate"), conjugate, tol.trend_slope));
    ctx.extra.push(Series::new(format!("{id}:remainder"), remainder, tol.trend_slope));
    let main = Series::new(id, partial, tol.trend_slope);
    Ok(VerificationReport::new(exp, main, ctx))
}

/// `Ω_k(f; δ) ≤ C δ^{2k} ‖f^{(2k)}‖` at `δ = 2^{−j}`; row `n` is `1/δ`.
pub fn verify_lemma_a(exp: &Experiment) -> Result<VerificationReport> {
    let sp = exp.space.build()?;
    let f = exp.function.fixed()?;
    let k = exp.run.r;
    if k == 0 {
        return Err(Error::config("/run/r", "r must be >= 1"));
    }
    let js: Vec<usize> = exp.run.ns().filter(|&j| (1..=52).contains(&j)).collect();
    let deltas: Vec<f64> = js.iter().map(|&j| 0.5f64.powi(j as i32)).collect();
    let tol = &exp.run.tolerances;
    let rows = modulus_derivative_ratios(&sp, &f, k, &deltas)?
        .into_iter()
        .zip(&js)
        .map(|(r, &j)| Row::new(1usize << j, r.modulus, r.rhs, r.rhs < tol.degenerate_rhs))
        .collect();
    let main = Series::new(exp.run.theorem_id.as_str(), rows, tol.trend_slope);
    Ok(VerificationReport::new(exp, main, ctx_with_tail(None)))
}

fn ctx_with_tail(tail: Option<&str>) -> Context {
    Context {
        tail: tail.map(str::to_string),
        ..Context::default()
    }
}

/// `E_ν(f)` for `ν ≥ 1`, exactly zero beyond the degree of `f`.
struct Errors {
    seq: EnSequence,
    degree: usize,
}

impl Errors {
    fn new(sp: &OrliczSpace, f: &PeriodicFunction) -> Result<Self> {
        let degree = f.effective_degree();
        Ok(Self {
            seq: en_sequence(sp, f, degree.max(1))?,
            degree,
        })
    }

    fn at(&self, nu: usize) -> f64 {
        if nu > self.degree {
            0.0
        } else {
            self.seq.results[nu - 1].value
        }
    }
}

/// Left side of both inverse inequalities: `Ω_r(f^ψ_β; 1/n)`.
fn inverse_lhs(sp: &OrliczSpace, fpsi: &PeriodicFunction, r: usize, n: usize) -> Result<f64> {
    if r == 0 {
        return sp.norm(fpsi);
    }
    modulus(sp, fpsi, &ModulusQuery::new(r, 1.0 / n as f64)?)
}

/// First sum shared by both inverse inequalities, `ν = 0` dropped since
/// `1/ψ(0) := 0`.
fn head_sum(psi: &PsiSequence, e: &Errors, r: usize, n: usize) -> f64 {
    let s: f64 = (1..=n.min(e.degree))
        .map(|nu| (nu as f64).powi(2 * r as i32) / psi.at(nu) * e.at(nu))
        .sum();
    s / (n as f64).powi(2 * r as i32)
}

/// `Ω_r(f^ψ_β; 1/n) ≤ C n^{−2r} Σ_{ν≤n} ν^{2r}E_ν/ψ(ν) + C Σ_{ν>n} E_ν/(νψ(ν))`.
pub fn verify_inverse_21(exp: &Experiment) -> Result<VerificationReport> {
    let sp = exp.space.build()?;
    let pair = exp.psi.pair()?;
    let psi = scalar_psi(&pair);
    let mut ctx = ctx_with_tail(Some("exact-zero"));
    let in_m0 = class_of(&psi, true)?.is_some_and(|c| c.in_m0());
    ctx.require(exp.run.policy, Hypothesis::M0, "psi", in_m0)?;
    let f = exp.function.fixed()?;
    let fpsi = psi_derivative(&f, &pair)?;
    let e = Errors::new(&sp, &f)?;
    let tol = &exp.run.tolerances;
    let mut rows = Vec::new();
    for n in exp.run.ns().filter(|&n| n >= 1) {
        let lhs = inverse_lhs(&sp, &fpsi, exp.run.r, n)?;
        let tail: f64 = (n + 1..=e.degree)
            .map(|nu| e.at(nu) / (nu as f64 * psi.at(nu)))
            .sum();
        let rhs = head_sum(&psi, &e, exp.run.r, n) + tail;
        rows.push(Row::new(n, lhs, rhs, rhs < tol.degenerate_rhs));
    }
    if in_m0 {
        ctx.telescoping = Some(telescoping_m0(&psi, &e, exp.run.ns().filter(|&n| n >= 1))?);
    }
    let main = Series::new(exp.run.theorem_id.as_str(), rows, tol.trend_slope);
    Ok(VerificationReport::new(exp, main, ctx))
}

/// As [`verify_inverse_21`] with tail terms `E_ν/(ψ(ν)(η(ν) − ν))`.
pub fn verify_inverse_41_3(exp: &Experiment) -> Result<VerificationReport> {
    let sp = exp.space.build()?;
    let pair = exp.psi.pair()?;
    let psi = scalar_psi(&pair);
    let mut ctx = ctx_with_tail(Some("exact-zero"));
    let class = class_of(&psi, true)?;
    let in_f = class.as_ref().is_some_and(|c| c.in_f());
    ctx.require(exp.run.policy, Hypothesis::F, "psi", in_f)?;
    let f = exp.function.fixed()?;
    let fpsi = psi_derivative(&f, &pair)?;
    let e = Errors::new(&sp, &f)?;
    let nu_max = e.degree.max(exp.run.n_range[1]);
    let gaps: Vec<f64> = (1..=nu_max)
        .map(|nu| eta_of(&psi, nu as f64).map(|eta| eta - nu as f64))
        .collect::<Result<_>>()?;
    let min_gap = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    ctx.require(exp.run.policy, Hypothesis::EtaGap, "psi", min_gap > 0.0)?;
    let tol = &exp.run.tolerances;
    let mut rows = Vec::new();
    for n in exp.run.ns().filter(|&n| n >= 1) {
        let lhs = inverse_lhs(&sp, &fpsi, exp.run.r, n)?;
        let tail: f64 = (n + 1..=e.degree)
            .map(|nu| e.at(nu) / (psi.at(nu) * gaps[nu - 1]))
            .sum();
        let rhs = head_sum(&psi, &e, exp.run.r, n) + tail;
        rows.push(Row::new(n, lhs, rhs, rhs < tol.degenerate_rhs));
    }
    if in_f {
        ctx.telescoping = Some(telescoping_f(&psi, &e, exp.run.ns().filter(|&n| n >= 1))?);
    }
    let main = Series::new(exp.run.theorem_id.as_str(), rows, tol.trend_slope);
    Ok(VerificationReport::new(exp, main, ctx))
}

fn telescoping_m0(
    psi: &PsiSequence,
    e: &Errors,
    starts: impl Iterator<Item = usize>,
) -> Result<TelescopingReport> {
    chain_links(psi, e.degree, |nu| if nu == 0 { 0.0 } else { e.at(nu) }, starts, m0_sum)
}

fn telescoping_f(
    psi: &PsiSequence,
    e: &Errors,
    starts: impl Iterator<Item = usize>,
) -> Result<TelescopingReport> {
    chain_links(psi, e.degree, |nu| if nu == 0 { 0.0 } else { e.at(nu) }, starts, f_sum)
}

/// `E_{n_i+1}/ψ(n_i) ≤ Σ_{ν=n_{i−1}}^{n_i−1} E_{ν+1}/(νψ(ν))` along every chain
/// started in `starts`, at constant 1. `errors[ν − 1] = E_ν`, zero beyond.
pub fn telescoping_check(
    psi: &PsiSequence,
    errors: &[f64],
    starts: &[usize],
) -> Result<TelescopingReport> {
    let degree = errors.iter().rposition(|&v| v != 0.0).map_or(0, |i| i + 1);
    let at = |nu: usize| if nu == 0 || nu > degree { 0.0 } else { errors[nu - 1] };
    chain_links(psi, degree, at, starts.iter().copied(), m0_sum)
}

/// As [`telescoping_check`] with the right side
/// `Σ_{ν=n_{i−1}}^{η(n_{i−1})} E_{ν+1}/((η(ν) − ν)ψ(ν))`.
pub fn telescoping_check_f(
    psi: &PsiSequence,
    errors: &[f64],
    starts: &[usize],
) -> Result<TelescopingReport> {
    let degree = errors.iter().rposition(|&v| v != 0.0).map_or(0, |i| i + 1);
    let at = |nu: usize| if nu == 0 || nu > degree { 0.0 } else { errors[nu - 1] };
    chain_links(psi, degree, at, starts.iter().copied(), f_sum)
}

fn m0_sum(psi: &PsiSequence, at: &dyn Fn(usize) -> f64, prev: usize, cur: usize) -> Result<f64> {
    Ok((prev..cur).map(|nu| at(nu + 1) / (nu as f64 * psi.at(nu))).sum())
}

fn f_sum(psi: &PsiSequence, at: &dyn Fn(usize) -> f64, prev: usize, _cur: usize) -> Result<f64> {
    let last = eta_of(psi, prev as f64)?.floor() as usize;
    (prev..=last)
        .map(|nu| {
            let gap = eta_of(psi, nu as f64)? - nu as f64;
            Ok(at(nu + 1) / (gap * psi.at(nu)))
        })
        .sum()
}

type LinkSum = fn(&PsiSequence, &dyn Fn(usize) -> f64, usize, usize) -> Result<f64>;

fn chain_links(
    psi: &PsiSequence,
    degree: usize,
    at: impl Fn(usize) -> f64,
    starts: impl Iterator<Item = usize>,
    sum: LinkSum,
) -> Result<TelescopingReport> {
    let mut links = Vec::new();
    for n in starts {
        let chain = eta_chain(psi, n, degree)?;
        for w in chain.windows(2) {
            let (prev, cur) = (w[0], w[1]);
            let lhs = at(cur + 1) / psi.at(cur);
            let rhs = sum(psi, &at, prev, cur)?;
            links.push(ChainLink {
                n_prev: prev,
                n_i: cur,
                lhs,
                rhs,
                slack: rhs - lhs,
            });
        }
    }
    Ok(telescoping_summary(links))
}

fn telescoping_summary(links: Vec<ChainLink>) -> TelescopingReport {
    let min_slack = links.iter().map(|l| l.slack).fold(f64::INFINITY, f64::min);
    let required_constant = links
        .iter()
        .filter(|l| l.lhs > 0.0)
        .map(|l| l.lhs / l.rhs)
        .fold(0.0, f64::max);
    TelescopingReport {
        links,
        min_slack,
        required_constant,
    }
}

/// Output selection for [`emit_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    Both,
}

/// CSV record: `theorem_id, n, lhs, rhs, ratio, degenerate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub theorem_id: String,
    pub n: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub degenerate: bool,
}

/// Twelve significant digits.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.11e}")
}

impl VerificationReport {
    pub fn csv_rows(&self) -> Vec<CsvRow> {
        let main = std::iter::once((self.theorem_id.as_str().to_string(), &self.rows));
        let extra = self.extra.iter().map(|s| (s.name.clone(), &s.rows));
        main.chain(extra)
            .flat_map(|(id, rows)| {
                rows.iter().map(move |r| CsvRow {
                    theorem_id: id.clone(),
                    n: r.n,
                    lhs: r.lhs,
                    rhs: r.rhs,
                    ratio: r.ratio,
                    degenerate: r.degenerate,
                })
            })
            .collect()
    }
}

pub fn write_csv(rows: &[CsvRow], out: impl std::io::Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["theorem_id", "n", "lhs", "rhs", "ratio", "degenerate"])?;
    for r in rows {
        w.write_record([
            r.theorem_id.clone(),
            r.n.to_string(),
            fmt_num(r.lhs),
            fmt_num(r.rhs),
            fmt_num(r.ratio),
            r.degenerate.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

pub fn read_csv(input: impl std::io::Read) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

pub fn read_csv_file(path: &Path) -> Result<Vec<CsvRow>> {
    let file = fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv(file)
}

pub fn to_json(rep: &VerificationReport) -> Result<String> {
    let mut s = serde_json::to_string_pretty(rep)?;
    s.push('\n');
    Ok(s)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `<theorem_id>.csv` and/or `<theorem_id>.json` into `dir`.
pub fn emit_report(rep: &VerificationReport, dir: &Path, format: ReportFormat) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    if matches!(format, ReportFormat::Csv | ReportFormat::Both) {
        let path = dir.join(format!("{}.csv", rep.theorem_id));
        let mut buf = Vec::new();
        write_csv(&rep.csv_rows(), &mut buf)?;
        write_file(&path, &buf)?;
        written.push(path);
    }
    if matches!(format, ReportFormat::Json | ReportFormat::Both) {
        let path = dir.join(format!("{}.json", rep.theorem_id));
        write_file(&path, to_json(rep)?.as_bytes())?;
        written.push(path);
    }
    Ok(written)
}
