//! Total, dynamical and Pancharatnam geometric phases per mode, and the
//! dynamical topological order parameter
//! nu(t) = (1/2 pi) \int_0^pi d(phi^G)/dk dk.

use crate::dynamics::{amplitude_unchecked, mode_table, TimeGrid};
use crate::error::{Error, Result};
use crate::floquet::{EffectiveMode, Overlaps};
use crate::model::{ChainParams, ModeGeometry, MomentumGrid, Segment};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Below this amplitude magnitude the total phase is ill-conditioned; such
/// k-samples are skipped and the geometric phase is interpolated across them.
pub const AMPLITUDE_FLOOR: f64 = 1e-6;

/// Plateaus further than this from an integer trigger a quantization warning.
pub const QUANTIZATION_TOLERANCE: f64 = 0.05;

/// Phases of a single mode along a time grid, unwrapped in t.
#[derive(Clone, Debug)]
pub struct PhaseSeries {
    pub k: f64,
    pub times: Vec<f64>,
    pub total: Vec<f64>,
    pub dynamical: Vec<f64>,
    pub geometric: Vec<f64>,
}

/// DTOP samples, raw and rounded, with per-sample quantization error.
#[derive(Clone, Debug)]
pub struct DtopSeries {
    pub times: Vec<f64>,
    pub nu: Vec<f64>,
    pub nu_rounded: Vec<i64>,
    pub quantization_error: Vec<f64>,
    /// Indices of samples whose plateau value is not integer-quantized
    /// within [`QUANTIZATION_TOLERANCE`]; nonempty output is a diagnostic,
    /// not an error (samples can legitimately sit on a jump).
    pub warnings: Vec<usize>,
}

fn wrap_to_pi(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// Principal-branch total phase Phi_{alpha,k}(t) = arg G_{alpha,k}(t),
/// evaluated with the two-argument arctangent on the closed-form amplitude.
pub fn total_phase(
    params: &ChainParams,
    geom: &ModeGeometry,
    eff: &EffectiveMode,
    ov: &Overlaps,
    t: f64,
) -> Result<f64> {
    let period = params.period();
    if !(0.0..period).contains(&t) {
        return Err(Error::Domain(format!(
            "t = {t} outside the micromotion window [0, {period})"
        )));
    }
    Ok(amplitude_unchecked(params, geom, eff, ov, t).arg())
}

/// Dynamical phase Phi^D_{alpha,k}(t) = xi_k (1 - 2 |u_alpha|^2) t, linear in
/// t with the slope of whichever segment is active at t.
pub fn dynamical_phase(geom: &ModeGeometry, ov: &Overlaps, segment: Segment, t: f64) -> f64 {
    geom.xi * (1.0 - 2.0 * ov.u(segment).norm_sqr()) * t
}

/// Phases of mode `k` along `tgrid`: total phase unwrapped in t, dynamical
/// phase, and geometric phase Phi^G = Phi - Phi^D.
pub fn phase_series(params: &ChainParams, k: f64, tgrid: &TimeGrid) -> Result<PhaseSeries> {
    let md = mode_table(params, &[k])?.remove(0);
    let times = tgrid.samples().to_vec();
    let mut total: Vec<f64> = Vec::with_capacity(times.len());
    let mut dynamical = Vec::with_capacity(times.len());
    for &t in &times {
        let principal = total_phase(params, &md.geom, &md.eff, &md.ov, t)?;
        let unwrapped = match total.last() {
            Some(&prev) => principal + 2.0 * PI * ((prev - principal) / (2.0 * PI)).round(),
            None => principal,
        };
        total.push(unwrapped);
        let segment = if t < params.t1 {
            Segment::First
        } else {
            Segment::Second
        };
        dynamical.push(dynamical_phase(&md.geom, &md.ov, segment, t));
    }
    let geometric = total
        .iter()
        .zip(&dynamical)
        .map(|(&t, &d)| t - d)
        .collect();
    Ok(PhaseSeries {
        k,
        times,
        total,
        dynamical,
        geometric,
    })
}

/// Geometric phase slice over k at fixed t: principal-wrapped, bad samples
/// (|G| below the floor) skipped and interpolated, then unwrapped along k
/// starting from the pinned phi^G(0) = 0 boundary.
fn geometric_slice(
    params: &ChainParams,
    table: &[crate::dynamics::ModeData],
    t: f64,
) -> Vec<f64> {
    let n = table.len();
    let mut phi = vec![0.0; n];
    let mut bad = vec![false; n];
    for (i, md) in table.iter().enumerate() {
        let g = amplitude_unchecked(params, &md.geom, &md.eff, &md.ov, t);
        if g.norm() < AMPLITUDE_FLOOR {
            bad[i] = true;
            continue;
        }
        let segment = if t < params.t1 {
            Segment::First
        } else {
            Segment::Second
        };
        phi[i] = wrap_to_pi(g.arg() - dynamical_phase(&md.geom, &md.ov, segment, t));
    }
    // unwrap along k across the good samples; phi^G -> 0 as k -> 0
    let mut prev = 0.0;
    for i in 0..n {
        if bad[i] {
            continue;
        }
        phi[i] += 2.0 * PI * ((prev - phi[i]) / (2.0 * PI)).round();
        prev = phi[i];
    }
    // linear interpolation across skipped samples
    let mut i = 0;
    while i < n {
        if !bad[i] {
            i += 1;
            continue;
        }
        let lo = i;
        let mut hi = i;
        while hi < n && bad[hi] {
            hi += 1;
        }
        let (kl, pl) = if lo == 0 {
            (0.0, 0.0)
        } else {
            (table[lo - 1].geom.k, phi[lo - 1])
        };
        let (kr, pr) = if hi == n {
            (PI, phi[lo.saturating_sub(1)])
        } else {
            (table[hi].geom.k, phi[hi])
        };
        for j in lo..hi {
            let k = table[j].geom.k;
            phi[j] = pl + (pr - pl) * (k - kl) / (kr - kl);
        }
        i = hi;
    }
    phi
}

/// DTOP over a time grid on an `nk`-point dense momentum grid: phi^G is
/// unwrapped along k, differentiated by central differences and integrated by
/// trapezoid over [0, pi] with the pinned phi^G(0) = 0 boundary.
pub fn dtop(params: &ChainParams, tgrid: &TimeGrid, nk: usize) -> Result<DtopSeries> {
    if nk < 256 {
        return Err(Error::InvalidParameter("dtop needs nk >= 256".into()));
    }
    params.validate()?;
    let kgrid = MomentumGrid::dense(nk)?;
    let table = mode_table(params, kgrid.ks())?;
    let nu: Vec<f64> = tgrid
        .samples()
        .par_iter()
        .map(|&t| {
            let phi = geometric_slice(params, &table, t);
            // extend with the pinned boundary at k = 0 and a flat continuation
            // at k = pi (phi^G is constant modulo 2 pi at both ends)
            let mut ks = Vec::with_capacity(nk + 2);
            let mut ps = Vec::with_capacity(nk + 2);
            ks.push(0.0);
            ps.push(0.0);
            ks.extend(kgrid.ks());
            ps.extend(&phi);
            ks.push(PI);
            ps.push(phi[nk - 1]);
            let m = ks.len();
            let mut deriv = vec![0.0; m];
            for i in 0..m {
                let (a, b) = (i.saturating_sub(1), (i + 1).min(m - 1));
                deriv[i] = (ps[b] - ps[a]) / (ks[b] - ks[a]);
            }
            let mut integral = 0.0;
            for i in 1..m {
                integral += 0.5 * (deriv[i] + deriv[i - 1]) * (ks[i] - ks[i - 1]);
            }
            integral / (2.0 * PI)
        })
        .collect();
    let nu_rounded: Vec<i64> = nu.iter().map(|&v| v.round() as i64).collect();
    let quantization_error: Vec<f64> = nu
        .iter()
        .zip(&nu_rounded)
        .map(|(&v, &r)| (v - r as f64).abs())
        .collect();
    let warnings = quantization_error
        .iter()
        .enumerate()
        .filter(|(_, &e)| e >= QUANTIZATION_TOLERANCE)
        .map(|(i, _)| i)
        .collect();
    Ok(DtopSeries {
        times: tgrid.samples().to_vec(),
        nu,
        nu_rounded,
        quantization_error,
        warnings,
    })
}

/// The DTOP value on the plateau containing time `t`, or None if `t` sits in
/// a non-quantized (jump) sample.
pub fn plateau_value(series: &DtopSeries, t: f64) -> Option<i64> {
    let i = series
        .times
        .iter()
        .position(|&s| s >= t)
        .unwrap_or(series.times.len() - 1);
    (series.quantization_error[i] < QUANTIZATION_TOLERANCE).then(|| series.nu_rounded[i])
}
