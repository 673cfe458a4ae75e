//! Piecewise micromotion within one period: Loschmidt amplitude and echo per
//! mode, the total echo in log form, echo-zero detection, and the
//! thermodynamic-limit rate function.

use crate::error::{Error, Result};
use crate::floquet::{effective_modes, overlaps, EffectiveMode, Overlaps};
use crate::model::{mode_geometry, ChainParams, ModeGeometry, MomentumGrid};
use crate::C64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Ordered micromotion sample times in [0, T), with the segment boundary T1
/// always included as an exact sample.
#[derive(Clone, Debug)]
pub struct TimeGrid {
    samples: Vec<f64>,
    boundary: f64,
}

impl TimeGrid {
    /// `nt` uniform samples over [0, T) plus exact samples at T1 and at any
    /// `extra` times (deduplicated); all samples must lie in [0, T).
    pub fn uniform(params: &ChainParams, nt: usize, extra: &[f64]) -> Result<Self> {
        if nt < 2 {
            return Err(Error::InvalidParameter("time grid needs nt >= 2".into()));
        }
        let period = params.period();
        let mut samples: Vec<f64> = (0..nt).map(|i| i as f64 * period / nt as f64).collect();
        samples.push(params.t1);
        for &t in extra {
            if !(0.0..period).contains(&t) {
                return Err(Error::Domain(format!(
                    "extra sample t = {t} outside [0, {period})"
                )));
            }
            samples.push(t);
        }
        samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
        samples.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        samples.retain(|&t| t < period);
        Ok(Self {
            samples,
            boundary: params.t1,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn boundary(&self) -> f64 {
        self.boundary
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Per-mode amplitude and echo at one (k, t) lattice point.
#[derive(Clone, Copy, Debug)]
pub struct EchoRecord {
    pub k: f64,
    pub t: f64,
    pub amplitude: C64,
    pub echo: f64,
}

/// Echo over the full (k, t) lattice, k-major; `log_total[j]` is
/// log L(t_j) = sum_k log L_k(t_j) (the product form underflows at L = 1000).
#[derive(Clone, Debug)]
pub struct EchoMap {
    pub ks: Vec<f64>,
    pub ts: Vec<f64>,
    pub records: Vec<EchoRecord>,
    pub log_total: Vec<f64>,
}

impl EchoMap {
    pub fn echo(&self, ik: usize, it: usize) -> f64 {
        self.records[ik * self.ts.len() + it].echo
    }
}

/// A refined local minimum of the per-mode echo below the zero threshold.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct EchoZero {
    pub k: f64,
    pub t: f64,
    pub echo: f64,
}

/// Rate function samples g(t) >= 0.
#[derive(Clone, Debug)]
pub struct RateSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

pub(crate) struct ModeData {
    pub geom: ModeGeometry,
    pub eff: EffectiveMode,
    pub ov: Overlaps,
}

/// Geometry, effective data and overlaps for every k of a grid, with the
/// continuity fallback applied at degenerate modes.
pub(crate) fn mode_table(params: &ChainParams, ks: &[f64]) -> Result<Vec<ModeData>> {
    let geoms: Vec<ModeGeometry> = ks
        .iter()
        .map(|&k| mode_geometry(params, k))
        .collect::<Result<_>>()?;
    let effs = effective_modes(params, &geoms);
    Ok(geoms
        .into_iter()
        .zip(effs)
        .map(|(geom, eff)| {
            let ov = overlaps(params, &geom, &eff);
            ModeData { geom, eff, ov }
        })
        .collect())
}

/// Closed-form per-mode Loschmidt amplitude G_{alpha,k}(t) for t in [0, T):
///   segment 1: [1 + (e^{-2 i xi t} - 1) |u1|^2] e^{i xi t},
///   segment 2: [1 + (e^{-2 i xi (t-T)} - 1) |u2|^2] e^{i xi (t-T)} e^{i xi_eff T}.
pub fn loschmidt_amplitude(
    params: &ChainParams,
    geom: &ModeGeometry,
    eff: &EffectiveMode,
    ov: &Overlaps,
    t: f64,
) -> Result<C64> {
    let period = params.period();
    if !(0.0..period).contains(&t) {
        return Err(Error::Domain(format!(
            "t = {t} outside the micromotion window [0, {period})"
        )));
    }
    Ok(amplitude_unchecked(params, geom, eff, ov, t))
}

pub(crate) fn amplitude_unchecked(
    params: &ChainParams,
    geom: &ModeGeometry,
    eff: &EffectiveMode,
    ov: &Overlaps,
    t: f64,
) -> C64 {
    let xi = geom.xi;
    if t < params.t1 {
        let u2 = ov.u1.norm_sqr();
        (1.0 + ((-C64::i() * 2.0 * xi * t).exp() - 1.0) * u2) * (C64::i() * xi * t).exp()
    } else {
        let period = params.period();
        let u2 = ov.u2.norm_sqr();
        let tau = t - period;
        (1.0 + ((-C64::i() * 2.0 * xi * tau).exp() - 1.0) * u2)
            * (C64::i() * xi * tau).exp()
            * (C64::i() * eff.xi_eff * period).exp()
    }
}

/// Per-mode echo L_{alpha,k}(t) = |G_{alpha,k}(t)|^2 without allocating the
/// complex amplitude (phases drop out of the magnitude).
pub(crate) fn echo_value(params: &ChainParams, xi: f64, ov: &Overlaps, t: f64) -> f64 {
    let (u2, tau) = if t < params.t1 {
        (ov.u1.norm_sqr(), t)
    } else {
        (ov.u2.norm_sqr(), t - params.period())
    };
    let phase = (-C64::i() * 2.0 * xi * tau).exp();
    (1.0 + (phase - 1.0) * u2).norm_sqr()
}

/// Echo over the (k, t) lattice, plus the total echo in log form.
pub fn echo_map(params: &ChainParams, kgrid: &MomentumGrid, tgrid: &TimeGrid) -> Result<EchoMap> {
    params.validate()?;
    let table = mode_table(params, kgrid.ks())?;
    let ts = tgrid.samples().to_vec();
    let records: Vec<EchoRecord> = table
        .par_iter()
        .flat_map_iter(|md| {
            let params = *params;
            ts.iter().map(move |&t| {
                let amplitude = amplitude_unchecked(&params, &md.geom, &md.eff, &md.ov, t);
                EchoRecord {
                    k: md.geom.k,
                    t,
                    amplitude,
                    echo: amplitude.norm_sqr(),
                }
            })
        })
        .collect();
    let nk = kgrid.len();
    let nt = ts.len();
    let log_total = (0..nt)
        .map(|j| {
            (0..nk)
                .map(|i| records[i * nt + j].echo.max(f64::MIN_POSITIVE).ln())
                .sum()
        })
        .collect();
    Ok(EchoMap {
        ks: kgrid.ks().to_vec(),
        ts,
        records,
        log_total,
    })
}

/// Refined minima below this count as echo zeros.
pub const ZERO_THRESHOLD: f64 = 1e-6;

/// Sampled lattice minima above this are not even considered for refinement.
const RAW_GATE: f64 = 1e-3;

/// In-window echo minimum of one mode over a segment window: evaluated at the
/// exact interior minima t = (2n+1) pi/(2 xi) (+T for segment 2) and at both
/// window edges. Returns (t_min, echo_min).
fn windowed_minimum(params: &ChainParams, md: &ModeData, lo: f64, hi: f64) -> (f64, f64) {
    let xi = md.geom.xi;
    let mid = 0.5 * (lo + hi);
    let offset = if mid < params.t1 { 0.0 } else { params.period() };
    let step = PI / xi;
    let first = ((lo - offset) / step - 0.5).ceil() as i64;
    let mut best = (lo, echo_value(params, xi, &md.ov, lo));
    let edge = hi - (hi - lo) * 1e-12;
    let e_hi = echo_value(params, xi, &md.ov, edge);
    if e_hi < best.1 {
        best = (edge, e_hi);
    }
    for n in first.. {
        let t = (2 * n + 1) as f64 * PI / (2.0 * xi) + offset;
        if t >= hi {
            break;
        }
        if t >= lo {
            let e = echo_value(params, xi, &md.ov, t);
            if e < best.1 {
                best = (t, e);
            }
        }
    }
    best
}

/// Scan the echo lattice for local minima below a coarse gate, then refine
/// each candidate: golden-section minimization over k of the exact in-window
/// echo minimum. A refined minimum below [`ZERO_THRESHOLD`] is a zero.
pub fn detect_echo_zeros(params: &ChainParams, map: &EchoMap) -> Result<Vec<EchoZero>> {
    let nk = map.ks.len();
    let nt = map.ts.len();
    let mut raw: Vec<(usize, usize)> = Vec::new();
    for i in 0..nk {
        for j in 0..nt {
            let e = map.echo(i, j);
            if e >= RAW_GATE {
                continue;
            }
            let lower_k = i == 0 || map.echo(i - 1, j) >= e;
            let upper_k = i + 1 == nk || map.echo(i + 1, j) > e;
            let lower_t = j == 0 || map.echo(i, j - 1) >= e;
            let upper_t = j + 1 == nt || map.echo(i, j + 1) > e;
            if lower_k && upper_k && lower_t && upper_t {
                raw.push((i, j));
            }
        }
    }
    let mut zeros: Vec<EchoZero> = Vec::new();
    for (i, j) in raw {
        let (lo, hi) = if map.ts[j] < params.t1 {
            (0.0, params.t1)
        } else {
            (params.t1, params.period())
        };
        let objective = |k: f64| -> Result<(f64, f64)> {
            let md = mode_table(params, &[k])?.remove(0);
            Ok(windowed_minimum(params, &md, lo, hi))
        };
        let mut a = if i > 0 { map.ks[i - 1] } else { map.ks[i] };
        let mut b = if i + 1 < nk { map.ks[i + 1] } else { map.ks[i] };
        let phi = 0.5 * (5.0_f64.sqrt() - 1.0);
        let (mut x1, mut x2) = (b - phi * (b - a), a + phi * (b - a));
        let (mut f1, mut f2) = (objective(x1)?.1, objective(x2)?.1);
        for _ in 0..90 {
            if f1 < f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - phi * (b - a);
                f1 = objective(x1)?.1;
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + phi * (b - a);
                f2 = objective(x2)?.1;
            }
            if b - a < 1e-13 {
                break;
            }
        }
        let k = 0.5 * (a + b);
        let (t, echo) = objective(k)?;
        if echo < ZERO_THRESHOLD
            && !zeros
                .iter()
                .any(|z| (z.k - k).abs() < 1e-4 && (z.t - t).abs() < 1e-3)
        {
            zeros.push(EchoZero { k, t, echo });
        }
    }
    zeros.sort_by(|a, b| (a.k, a.t).partial_cmp(&(b.k, b.t)).unwrap());
    Ok(zeros)
}

/// Rate function g(t) = -(1/2 pi) \int_0^pi ln |G_{alpha,k}(t)|^2 dk on a
/// dense uniform k-grid by trapezoid. The integrand vanishes at both
/// endpoints (sin k -> 0 forces |u| into {0, 1}), so the open grid is closed
/// with zero endpoint samples. At critical times the log singularity is
/// integrable; the trapezoid converges from below.
pub fn rate_function(params: &ChainParams, tgrid: &TimeGrid, nk: usize) -> Result<RateSeries> {
    if nk < 64 {
        return Err(Error::InvalidParameter("rate function needs nk >= 64".into()));
    }
    params.validate()?;
    let kgrid = MomentumGrid::dense(nk)?;
    let table = mode_table(params, kgrid.ks())?;
    let h = std::f64::consts::PI / (nk + 1) as f64;
    let values: Vec<f64> = tgrid
        .samples()
        .par_iter()
        .map(|&t| {
            let mut acc = 0.0;
            for md in &table {
                let l = echo_value(params, md.geom.xi, &md.ov, t).max(f64::MIN_POSITIVE);
                acc += l.ln();
            }
            // trapezoid with implicit zero samples at k = 0 and k = pi
            -(acc * h) / (2.0 * std::f64::consts::PI)
        })
        .collect();
    Ok(RateSeries {
        times: tgrid.samples().to_vec(),
        values,
    })
}

/// Echo of a single mode evaluated over a time grid (convenience for the CLI
/// and for cross-module tests).
pub fn single_mode_series(
    params: &ChainParams,
    k: f64,
    tgrid: &TimeGrid,
) -> Result<Vec<EchoRecord>> {
    let md = mode_table(params, &[k])?.remove(0);
    tgrid
        .samples()
        .iter()
        .map(|&t| {
            let amplitude = loschmidt_amplitude(params, &md.geom, &md.eff, &md.ov, t)?;
            Ok(EchoRecord {
                k,
                t,
                amplitude,
                echo: amplitude.norm_sqr(),
            })
        })
        .collect()
}
