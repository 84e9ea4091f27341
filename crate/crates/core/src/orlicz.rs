//! Weighted Orlicz spaces: modular, Luxemburg norm, Amemiya norm and the
//! dual-form lower bound.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{PeriodicFunction, UniformGrid};
use crate::weights::{pair_report, ApReport, ApVerdict, Weight};
use crate::young::{estimate_pm, LogGrid, YoungFunction, YoungMeta};

/// Relative tolerance on λ for the Luxemburg bisection.
pub const LUXEMBURG_TOL: f64 = 1e-8;
/// Lower edge of the accepted modular value at the returned λ.
pub const LUXEMBURG_BOUNDARY: f64 = 1e-6;
/// Tolerance on `ln k` for the Amemiya minimization.
pub const AMEMIYA_TOL: f64 = 1e-8;

const LOG_LAMBDA_BOUND: f64 = 27.631_021_115_928_547; // ln 1e12
const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Which norm the space reports through [`OrliczSpace::norm`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    #[default]
    Luxemburg,
    Amemiya,
}

/// `L_{M,ω}` discretized on a uniform grid.
#[derive(Clone)]
pub struct OrliczSpace {
    young: YoungFunction,
    complement: Option<YoungFunction>,
    weight: Weight,
    grid: UniformGrid,
    meta: YoungMeta,
    ap: ApReport,
    quad: Vec<f64>,
    norm_kind: NormKind,
}

impl fmt::Debug for OrliczSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OrliczSpace")
            .field("young", &self.young)
            .field("weight", &self.weight)
            .field("grid", &self.grid.n_points)
            .field("p_m", &self.meta.p_m)
            .finish()
    }
}

impl OrliczSpace {
    /// Builds the space; fails unless `ω ∈ A_{p(M)}` by the finite test.
    pub fn new(young: YoungFunction, weight: Weight, grid: UniformGrid) -> Result<Self> {
        let meta = estimate_pm(&young)?;
        Self::with_meta(young, meta, weight, grid)
    }

    pub fn with_meta(
        young: YoungFunction,
        meta: YoungMeta,
        weight: Weight,
        grid: UniformGrid,
    ) -> Result<Self> {
        if meta.p_m <= 1.0 {
            return Err(Error::InvalidExponent(meta.p_m));
        }
        let ap = pair_report(&meta, &weight)?;
        if ap.verdict != ApVerdict::InAp {
            return Err(Error::WeightHypothesis {
                p: ap.p,
                constant: ap.constant_estimate,
            });
        }
        if !meta.theta_class {
            log::warn!("{young}: not in the sampled Q2^theta class");
        }
        let complement = young.complement(&LogGrid::default()).ok();
        let (quad, _) = weight.quadrature_weights(&grid)?;
        Ok(Self {
            young,
            complement,
            weight,
            grid,
            meta,
            ap,
            quad,
            norm_kind: NormKind::Luxemburg,
        })
    }

    pub fn with_norm_kind(mut self, kind: NormKind) -> Self {
        self.norm_kind = kind;
        self
    }

    pub fn with_grid(&self, grid: UniformGrid) -> Result<Self> {
        let (quad, _) = self.weight.quadrature_weights(&grid)?;
        Ok(Self {
            grid,
            quad,
            ..self.clone()
        })
    }

    pub fn young(&self) -> &YoungFunction {
        &self.young
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn meta(&self) -> &YoungMeta {
        &self.meta
    }

    pub fn ap_report(&self) -> &ApReport {
        &self.ap
    }

    pub fn norm_kind(&self) -> NormKind {
        self.norm_kind
    }

    pub fn samples(&self, f: &PeriodicFunction) -> Vec<f64> {
        f.samples(&self.grid)
    }

    /// `∫ M(|f|) ω dx`.
    pub fn modular(&self, f: &PeriodicFunction) -> Result<f64> {
        self.modular_samples(&self.samples(f))
    }

    pub fn modular_samples(&self, s: &[f64]) -> Result<f64> {
        modular_with(&self.young, &self.quad, s, 1.0)
    }

    pub fn luxemburg_norm(&self, f: &PeriodicFunction) -> Result<f64> {
        match self.luxemburg_samples(&self.samples(f)) {
            Err(Error::LuxemburgBoundary { modular }) => {
                log::warn!("luxemburg boundary check failed ({modular}); doubling grid");
                let fine = self.with_grid(self.grid.refined())?;
                fine.luxemburg_samples(&fine.samples(f))
            }
            other => other,
        }
    }

    /// `inf{λ > 0 : ∫ M(|f|/λ) ω ≤ 1}` for sampled `f`.
    pub fn luxemburg_samples(&self, s: &[f64]) -> Result<f64> {
        luxemburg_with(&self.young, &self.quad, s)
    }

    /// Amemiya form `inf_{k>0} (1 + ∫ M(k|f|) ω)/k`.
    pub fn orlicz_norm(&self, f: &PeriodicFunction) -> Result<f64> {
        self.amemiya_samples(&self.samples(f))
    }

    pub fn amemiya_samples(&self, s: &[f64]) -> Result<f64> {
        let scale = max_abs(s);
        if scale == 0.0 {
            return Ok(0.0);
        }
        let lux = luxemburg_with(&self.young, &self.quad, s)? / scale;
        let h = |t: f64| -> Result<f64> {
            let k = t.exp();
            Ok((1.0 + modular_with(&self.young, &self.quad, s, k / scale)?) / k)
        };
        let t0 = -lux.ln();
        let (mut a, mut b) = (t0 - 3.0, t0 + 3.0);
        let mut tries = 0;
        loop {
            let (ha, hm, hb) = (h(a)?, h(0.5 * (a + b))?, h(b)?);
            if hm <= ha && hm <= hb {
                break;
            }
            tries += 1;
            if tries > 20 || !hm.is_finite() {
                return Err(Error::AmemiyaBracket);
            }
            if ha < hm {
                a -= b - a;
            } else {
                b += b - a;
            }
        }
        let mut x1 = b - GOLDEN * (b - a);
        let mut x2 = a + GOLDEN * (b - a);
        let (mut f1, mut f2) = (h(x1)?, h(x2)?);
        while b - a > AMEMIYA_TOL {
            if f1 <= f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - GOLDEN * (b - a);
                f1 = h(x1)?;
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + GOLDEN * (b - a);
                f2 = h(x2)?;
            }
        }
        Ok(scale * f1.min(f2))
    }

    /// Norm selected by [`NormKind`].
    pub fn norm(&self, f: &PeriodicFunction) -> Result<f64> {
        match self.norm_kind {
            NormKind::Luxemburg => self.luxemburg_norm(f),
            NormKind::Amemiya => self.orlicz_norm(f),
        }
    }

    pub fn norm_samples(&self, s: &[f64]) -> Result<f64> {
        match self.norm_kind {
            NormKind::Luxemburg => self.luxemburg_samples(s),
            NormKind::Amemiya => self.amemiya_samples(s),
        }
    }

    /// Certified lower bound `∫|f g| ω` for the dual-form norm, after
    /// rescaling `g` onto `∫ M̃(|g|) ω = 1` when it lies outside the unit ball.
    pub fn dual_witness(&self, f: &PeriodicFunction, g: &PeriodicFunction) -> Result<f64> {
        let comp = self.complement.as_ref().ok_or(Error::ComplementDiverged)?;
        let gs = self.samples(g);
        if max_abs(&gs) == 0.0 {
            return Ok(0.0);
        }
        let fs = self.samples(f);
        let dual_modular = modular_with(comp, &self.quad, &gs, 1.0)?;
        let scale = if dual_modular > 1.0 {
            1.0 / luxemburg_with(comp, &self.quad, &gs)?
        } else {
            1.0
        };
        Ok(fs
            .iter()
            .zip(&gs)
            .zip(&self.quad)
            .map(|((a, b), w)| (a * b * scale).abs() * w)
            .sum())
    }
}

fn max_abs(s: &[f64]) -> f64 {
    s.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

fn modular_with(m: &YoungFunction, quad: &[f64], s: &[f64], factor: f64) -> Result<f64> {
    let total: f64 = match m.power_exponent() {
        Some((2.0, c)) => {
            c * factor * factor * s.iter().zip(quad).map(|(v, w)| v * v * w).sum::<f64>()
        }
        _ => s
            .iter()
            .zip(quad)
            .filter(|(_, &w)| w != 0.0)
            .map(|(v, w)| m.eval(v * factor) * w)
            .sum(),
    };
    if total.is_finite() {
        Ok(total)
    } else {
        Err(Error::ModularDiverged)
    }
}

/// Solves `ρ(s/λ) = 1` by safeguarded regula falsi on `ln λ`, after scaling
/// `s` to unit maximum.
fn luxemburg_with(m: &YoungFunction, quad: &[f64], s: &[f64]) -> Result<f64> {
    let scale = max_abs(s);
    if scale == 0.0 {
        return Ok(0.0);
    }
    if let Some((p, _)) = m.power_exponent() {
        // homogeneity: ρ(s/λ) = λ^{-p} ρ(s)
        let rho = modular_with(m, quad, s, 1.0 / scale)?;
        return Ok(scale * rho.powf(1.0 / p));
    }
    // g(t) = ln ρ(s e^{-t} / scale), decreasing in t
    let g = |t: f64| -> Result<f64> {
        match modular_with(m, quad, s, (-t).exp() / scale) {
            Ok(v) => Ok(v.ln()),
            Err(Error::ModularDiverged) => Ok(f64::INFINITY),
            Err(e) => Err(e),
        }
    };
    let mut t = 0.0;
    let mut gt = g(t)?;
    let (mut a, mut ga, mut b, mut gb);
    if gt > 0.0 {
        (a, ga) = (t, gt);
        loop {
            t += 2.0;
            if t > LOG_LAMBDA_BOUND {
                return Err(Error::LuxemburgBracket);
            }
            gt = g(t)?;
            if gt <= 0.0 {
                break;
            }
            (a, ga) = (t, gt);
        }
        (b, gb) = (t, gt);
    } else {
        (b, gb) = (t, gt);
        loop {
            t -= 2.0;
            if t < -LOG_LAMBDA_BOUND {
                return Err(Error::LuxemburgBracket);
            }
            gt = g(t)?;
            if gt > 0.0 {
                break;
            }
            (b, gb) = (t, gt);
        }
        (a, ga) = (t, gt);
    }
    if gb > -1e-12 {
        return finish(m, quad, s, scale, b);
    }
    // Illinois variant: halve the stale endpoint value to keep both sides moving
    let mut side = 0i8;
    for _ in 0..200 {
        if b - a <= LUXEMBURG_TOL * 0.01 {
            break;
        }
        let c = if ga.is_finite() && gb.is_finite() && ga != gb {
            let c = b - gb * (b - a) / (gb - ga);
            if c > a && c < b {
                c
            } else {
                0.5 * (a + b)
            }
        } else {
            0.5 * (a + b)
        };
        let gc = g(c)?;
        if gc > 0.0 {
            a = c;
            ga = gc;
            if side == -1 {
                gb *= 0.5;
            }
            side = -1;
        } else {
            b = c;
            gb = gc;
            if gc > -1e-12 {
                break;
            }
            if side == 1 {
                ga *= 0.5;
            }
            side = 1;
        }
    }
    finish(m, quad, s, scale, b)
}

fn finish(m: &YoungFunction, quad: &[f64], s: &[f64], scale: f64, t: f64) -> Result<f64> {
    let modular = modular_with(m, quad, s, (-t).exp() / scale)?;
    if !(1.0 - LUXEMBURG_BOUNDARY..=1.0 + 1e-12).contains(&modular) {
        return Err(Error::LuxemburgBoundary { modular });
    }
    Ok(scale * t.exp())
}
