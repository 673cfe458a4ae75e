//! Floquet quench fidelity criterion: critical momenta where
//! F_{alpha,k} = sqrt(2)/2, critical-time enumeration with the segment-window
//! filter, and the anticommutator diagnostic.

use crate::error::Result;
use crate::floquet::{effective_mode, overlaps, Overlaps};
use crate::mat2::ComplexMat2;
use crate::model::{mode_geometry, ChainParams, ModeGeometry, MomentumGrid, Segment};
use rayon::prelude::*;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Bisection is accepted only if the fidelity lands this close to sqrt(2)/2;
/// brackets that straddle a quasienergy degeneracy (where F jumps without a
/// root) fail this check and are discarded.
pub const ROOT_TOLERANCE: f64 = 1e-10;

/// A momentum where the Floquet quench fidelity of one segment equals
/// sqrt(2)/2, with its critical times and the window verdict.
#[derive(Clone, Debug, serde::Serialize)]
pub struct CriticalMode {
    pub k_c: f64,
    pub segment: Segment,
    /// |F_{alpha,k_c} - sqrt(2)/2| after refinement.
    pub fidelity_residual: f64,
    /// All critical times inside [0, T) for this (k_c, segment).
    pub critical_times: Vec<f64>,
    /// True iff at least one critical time falls inside the segment's own
    /// window, i.e. the echo zero is actually reached during the drive.
    pub realized: bool,
    /// Echo minimum L* = (1 - 2 F^2)^2 at k_c (0 at an exact root).
    pub echo_min: f64,
    /// True for roots found as tangencies (|F - sqrt(2)/2| dips below 1e-8
    /// without a sign change).
    pub tangent: bool,
}

/// Fidelities of both segments on a momentum grid.
#[derive(Clone, Debug)]
pub struct FidelityProfile {
    pub ks: Vec<f64>,
    pub f1: Vec<f64>,
    pub f2: Vec<f64>,
}

/// F_{1,k} and F_{2,k} for every k of `grid`.
pub fn fidelity_profile(params: &ChainParams, grid: &MomentumGrid) -> Result<FidelityProfile> {
    params.validate()?;
    let rows: Vec<(f64, f64)> = grid
        .ks()
        .par_iter()
        .map(|&k| {
            let ov = overlaps_at(params, k)?;
            Ok((ov.fidelity(Segment::First), ov.fidelity(Segment::Second)))
        })
        .collect::<Result<_>>()?;
    Ok(FidelityProfile {
        ks: grid.ks().to_vec(),
        f1: rows.iter().map(|r| r.0).collect(),
        f2: rows.iter().map(|r| r.1).collect(),
    })
}

/// Minimum of the per-mode echo over unconstrained time,
/// L* = (1 - 2 F^2)^2 = (1 - 2 |u|^2)^2.
pub fn echo_minimum(ov: &Overlaps, segment: Segment) -> f64 {
    let f2 = ov.fidelity(segment).powi(2);
    (1.0 - 2.0 * f2).powi(2)
}

/// A candidate time missing the window by a phase xi*|t - edge| up to this
/// bound still counts: the in-window echo then dips below sin^2(1e-4) ~ 1e-8,
/// matching the echo-minimum definition of a realized transition. (The
/// symmetric lambda = 0.6 protocol has a zero sitting on the T1 boundary.)
pub const WINDOW_EDGE_PHASE: f64 = 1e-4;

/// Critical times of one segment inside [0, T): t = (2n+1) pi / (2 xi) for
/// segment 1, the same shifted by +T for segment 2, enumerated over all
/// integers n and filtered into the segment's half-open window. Candidates
/// within [`WINDOW_EDGE_PHASE`] of a window edge are clamped onto it.
pub fn critical_times(geom: &ModeGeometry, segment: Segment, params: &ChainParams) -> Vec<f64> {
    let xi = geom.xi;
    let period = params.period();
    let (offset, lo, hi) = match segment {
        Segment::First => (0.0, 0.0, params.t1),
        Segment::Second => (period, params.t1, period),
    };
    let slack = WINDOW_EDGE_PHASE / xi;
    // t(n) = (2n+1) pi/(2 xi) + offset increases with n; solve for the first
    // n with t(n) >= lo - slack and walk until t(n) >= hi + slack.
    let step = PI / xi;
    let first = ((lo - slack - offset) / step - 0.5).ceil() as i64;
    let mut times: Vec<f64> = Vec::new();
    for n in first.. {
        let t = (2 * n + 1) as f64 * PI / (2.0 * xi) + offset;
        if t >= hi + slack {
            break;
        }
        let clamped = if t < lo {
            lo
        } else if t >= hi {
            // stay strictly inside the half-open window
            hi - (hi - lo) * 1e-12
        } else {
            t
        };
        if times.last().map_or(true, |&prev| clamped > prev + 1e-12) {
            times.push(clamped);
        }
    }
    times
}

/// Locate all fidelity roots F_alpha(k) = sqrt(2)/2 by sign-change bracketing
/// on a `grid_resolution`-point grid in (0, pi) followed by bisection, plus
/// tangency detection; attach critical times and the realized verdict.
pub fn find_fdqpts(params: &ChainParams, grid_resolution: usize) -> Result<Vec<CriticalMode>> {
    params.validate()?;
    let grid = MomentumGrid::dense(grid_resolution.max(16))?;
    let profile = fidelity_profile(params, &grid)?;
    let mut modes: Vec<CriticalMode> = Vec::new();
    for segment in [Segment::First, Segment::Second] {
        let fs = match segment {
            Segment::First => &profile.f1,
            Segment::Second => &profile.f2,
        };
        let brackets: Vec<(f64, f64)> = fs
            .windows(2)
            .enumerate()
            .filter(|(_, w)| (w[0] - FRAC_1_SQRT_2) * (w[1] - FRAC_1_SQRT_2) < 0.0)
            .map(|(i, _)| (grid.ks()[i], grid.ks()[i + 1]))
            .collect();
        let roots: Vec<CriticalMode> = brackets
            .par_iter()
            .filter_map(|&(a, b)| bisect_root(params, segment, a, b).transpose())
            .collect::<Result<_>>()?;
        modes.extend(roots);
        // tangencies: local minima of |F - sqrt(2)/2| that dip below 1e-8
        // without crossing
        for i in 1..fs.len() - 1 {
            let g = |j: usize| (fs[j] - FRAC_1_SQRT_2).abs();
            if g(i) < 1e-8
                && g(i) <= g(i - 1)
                && g(i) <= g(i + 1)
                && (fs[i - 1] - FRAC_1_SQRT_2) * (fs[i + 1] - FRAC_1_SQRT_2) > 0.0
            {
                let k = grid.ks()[i];
                if modes
                    .iter()
                    .all(|m| m.segment != segment || (m.k_c - k).abs() > 1e-6)
                {
                    modes.push(make_mode(params, segment, k, g(i), true)?);
                }
            }
        }
    }
    modes.sort_by(|a, b| {
        (a.k_c, a.segment.index())
            .partial_cmp(&(b.k_c, b.segment.index()))
            .unwrap()
    });
    Ok(modes)
}

fn overlaps_at(params: &ChainParams, k: f64) -> Result<Overlaps> {
    let geom = mode_geometry(params, k)?;
    let eff = effective_mode(params, &geom);
    Ok(overlaps(params, &geom, &eff))
}

fn bisect_root(
    params: &ChainParams,
    segment: Segment,
    mut a: f64,
    mut b: f64,
) -> Result<Option<CriticalMode>> {
    let f = |k: f64| -> Result<f64> { Ok(overlaps_at(params, k)?.fidelity(segment) - FRAC_1_SQRT_2) };
    let mut fa = f(a)?;
    for _ in 0..80 {
        let mid = 0.5 * (a + b);
        let fm = f(mid)?;
        if fa * fm <= 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
        if b - a < 1e-14 {
            break;
        }
    }
    let k = 0.5 * (a + b);
    let residual = f(k)?.abs();
    if residual > ROOT_TOLERANCE {
        // the "sign change" was a jump discontinuity at a quasienergy
        // degeneracy, not a root
        return Ok(None);
    }
    Ok(Some(make_mode(params, segment, k, residual, false)?))
}

fn make_mode(
    params: &ChainParams,
    segment: Segment,
    k: f64,
    residual: f64,
    tangent: bool,
) -> Result<CriticalMode> {
    let geom = mode_geometry(params, k)?;
    let ov = overlaps_at(params, k)?;
    let times = critical_times(&geom, segment, params);
    Ok(CriticalMode {
        k_c: k,
        segment,
        fidelity_residual: residual,
        realized: !times.is_empty(),
        critical_times: times,
        echo_min: echo_minimum(&ov, segment),
        tangent,
    })
}

/// Spectral norm of the anticommutator {h_eff,k, h_{alpha,k}}. Since
/// {n.sigma, d.sigma} = 2 (n.d) I, this equals 2 xi_eff xi_k |n_eff . d_alpha|
/// and vanishes exactly at critical momenta.
pub fn anticommutator_norm(params: &ChainParams, k: f64, segment: Segment) -> Result<f64> {
    let geom = mode_geometry(params, k)?;
    let eff = effective_mode(params, &geom);
    let h_eff = ComplexMat2::from_bloch(0.0, eff.n_eff * eff.xi_eff);
    let h_seg = ComplexMat2::from_bloch(0.0, geom.d_hat(segment) * geom.xi);
    let anti = h_eff * h_seg + h_seg * h_eff;
    Ok(anti.spectral_norm_hermitian())
}
