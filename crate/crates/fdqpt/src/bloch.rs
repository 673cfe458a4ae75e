//! Bloch-sphere micromotion of d_hat_k(t), the vector of
//! rho_k(t) = 1/2 [1 - d_hat_k(t).sigma], and geometric detection of
//! antiparallel (FDQPT) events.

use crate::dynamics::TimeGrid;
use crate::error::{Error, Result};
use crate::floquet::{effective_mode, EffectiveMode};
use crate::model::{mode_geometry, ChainParams, ModeGeometry};
use crate::vec3::Vec3;

/// A d_hat vector is "antiparallel" to n_eff when their dot product is below
/// -1 + this tolerance.
pub const ANTIPARALLEL_TOLERANCE: f64 = 1e-6;

/// Unit Bloch vectors d_hat_k(t) sampled along a time grid, with the times
/// where d_hat is antiparallel to the initial vector n_eff.
#[derive(Clone, Debug)]
pub struct BlochTrajectory {
    pub k: f64,
    pub times: Vec<f64>,
    pub vectors: Vec<Vec3>,
    pub events: Vec<f64>,
}

/// d_hat_k(t) at a single time: n_eff rotated about d1_hat by 2 xi t during
/// the first segment, then the T1 vector rotated about d2_hat by
/// 2 xi (t - T1) during the second.
pub fn bloch_vector(
    params: &ChainParams,
    geom: &ModeGeometry,
    eff: &EffectiveMode,
    t: f64,
) -> Result<Vec3> {
    let period = params.period();
    if !(0.0..period).contains(&t) {
        return Err(Error::Domain(format!(
            "t = {t} outside the micromotion window [0, {period})"
        )));
    }
    let xi = geom.xi;
    if t < params.t1 {
        Ok(eff.n_eff.rotated_about(geom.d1_hat, 2.0 * xi * t))
    } else {
        let at_boundary = eff.n_eff.rotated_about(geom.d1_hat, 2.0 * xi * params.t1);
        Ok(at_boundary.rotated_about(geom.d2_hat, 2.0 * xi * (t - params.t1)))
    }
}

/// Full trajectory of mode `k` on `tgrid`, with antiparallel events already
/// detected and refined.
pub fn trajectory(params: &ChainParams, k: f64, tgrid: &TimeGrid) -> Result<BlochTrajectory> {
    params.validate()?;
    let geom = mode_geometry(params, k)?;
    let eff = effective_mode(params, &geom);
    let times = tgrid.samples().to_vec();
    let vectors = times
        .iter()
        .map(|&t| bloch_vector(params, &geom, &eff, t))
        .collect::<Result<Vec<_>>>()?;
    let mut traj = BlochTrajectory {
        k,
        times,
        vectors,
        events: Vec::new(),
    };
    traj.events = antiparallel_events(params, &geom, &eff, &traj)?;
    Ok(traj)
}

/// Times where d_hat(t) . n_eff reaches -1: local minima of the sampled
/// alignment are refined by golden-section search, then accepted if the
/// refined minimum is within [`ANTIPARALLEL_TOLERANCE`] of -1.
pub fn antiparallel_events(
    params: &ChainParams,
    geom: &ModeGeometry,
    eff: &EffectiveMode,
    traj: &BlochTrajectory,
) -> Result<Vec<f64>> {
    let align = |t: f64| -> Result<f64> {
        Ok(bloch_vector(params, geom, eff, t)?.dot(eff.n_eff))
    };
    let sampled: Vec<f64> = traj
        .vectors
        .iter()
        .map(|v| v.dot(eff.n_eff))
        .collect();
    let mut events = Vec::new();
    for i in 0..sampled.len() {
        let is_min = (i == 0 || sampled[i] <= sampled[i - 1])
            && (i + 1 == sampled.len() || sampled[i] < sampled[i + 1]);
        // cheap pre-filter: a true antipode can only hide near an already
        // deep sampled minimum
        if !is_min || sampled[i] > -0.9 {
            continue;
        }
        let mut a = if i > 0 { traj.times[i - 1] } else { traj.times[i] };
        let mut b = if i + 1 < traj.times.len() {
            traj.times[i + 1]
        } else {
            traj.times[i]
        };
        // the alignment never crosses through a stage boundary minimum that
        // the samples miss: keep the bracket inside one segment
        if a < params.t1 && b > params.t1 {
            if traj.times[i] < params.t1 {
                b = params.t1 - 1e-12;
            } else {
                a = params.t1;
            }
        }
        let phi = 0.5 * (5.0_f64.sqrt() - 1.0);
        let (mut x1, mut x2) = (b - phi * (b - a), a + phi * (b - a));
        let (mut f1, mut f2) = (align(x1)?, align(x2)?);
        for _ in 0..120 {
            if f1 < f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - phi * (b - a);
                f1 = align(x1)?;
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + phi * (b - a);
                f2 = align(x2)?;
            }
            if b - a < 1e-13 {
                break;
            }
        }
        let t = 0.5 * (a + b);
        if align(t)? < -1.0 + ANTIPARALLEL_TOLERANCE
            && !events.iter().any(|&e: &f64| (e - t).abs() < 1e-9)
        {
            events.push(t);
        }
    }
    events.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(events)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use std::f64::consts::PI;

    fn fig3a() -> ChainParams {
        ChainParams::baseline(0.8, PI, 0.0, 0.8 * PI, 1.2 * PI)
    }

    #[test]
    fn trajectory_starts_at_effective_axis_and_stays_unit() {
        let p = fig3a();
        let tgrid = TimeGrid::uniform(&p, 1500, &[]).unwrap();
        let traj = trajectory(&p, 0.37 * PI, &tgrid).unwrap();
        let geom = mode_geometry(&p, 0.37 * PI).unwrap();
        let eff = effective_mode(&p, &geom);
        assert!((traj.vectors[0] - eff.n_eff).norm() < 1e-12);
        for v in &traj.vectors {
            assert!((v.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn aligned_mode_is_stationary_in_stage_one() {
        // phi1 = phi2 makes n_eff parallel to d1: rotation about its own axis
        let p = ChainParams::baseline(0.7, 1.3, 1.3, 1.1, 0.8);
        let geom = mode_geometry(&p, 0.6 * PI).unwrap();
        let eff = effective_mode(&p, &geom);
        assert!((eff.n_eff - geom.d1_hat).norm() < 1e-10);
        for t in [0.0, 0.3, 1.0, 1.5] {
            let v = bloch_vector(&p, &geom, &eff, t).unwrap();
            assert!((v - eff.n_eff).norm() < 1e-10);
        }
    }

    #[test]
    fn stage_boundary_is_continuous() {
        let p = fig3a();
        let geom = mode_geometry(&p, 0.52 * PI).unwrap();
        let eff = effective_mode(&p, &geom);
        let left = bloch_vector(&p, &geom, &eff, p.t1 - 1e-12).unwrap();
        let right = bloch_vector(&p, &geom, &eff, p.t1).unwrap();
        assert!((left - right).norm() < 1e-10);
    }

    #[test]
    fn matches_oracle_density_matrix_vector() {
        // rho = |psi><psi| with psi = U(t)|G_eff> has Bloch vector -<sigma>
        let p = fig3a();
        for k in [0.21 * PI, 0.47 * PI, 0.83 * PI] {
            let geom = mode_geometry(&p, k).unwrap();
            let eff = effective_mode(&p, &geom);
            let u = crate::floquet::floquet_operator(&p, &geom);
            let geff = oracle::floquet_ground_state(&u, p.period()).unwrap();
            for t in [0.0, 0.9, p.t1, p.t1 + 1.4, p.period() - 0.01] {
                let closed = bloch_vector(&p, &geom, &eff, t).unwrap();
                let psi = oracle::propagate(&p, k, t, &geff).unwrap();
                assert!(
                    (closed - psi.bloch_vector()).norm() < 1e-9,
                    "k = {k}, t = {t}"
                );
            }
        }
    }

    #[test]
    fn rejects_out_of_window_times() {
        let p = fig3a();
        let geom = mode_geometry(&p, 0.3 * PI).unwrap();
        let eff = effective_mode(&p, &geom);
        assert!(bloch_vector(&p, &geom, &eff, -0.1).is_err());
        assert!(bloch_vector(&p, &geom, &eff, p.period()).is_err());
    }

    #[test]
    fn noncritical_mode_has_no_events() {
        let p = fig3a();
        let tgrid = TimeGrid::uniform(&p, 2000, &[]).unwrap();
        let traj = trajectory(&p, 0.6 * PI, &tgrid).unwrap();
        assert!(traj.events.is_empty());
    }

    #[test]
    fn realized_mode_events_match_critical_times() {
        let p = fig3a();
        let modes = crate::criticality::find_fdqpts(&p, 4001).unwrap();
        let m = modes.iter().find(|m| m.realized).unwrap();
        let tgrid = TimeGrid::uniform(&p, 3000, &[]).unwrap();
        let traj = trajectory(&p, m.k_c, &tgrid).unwrap();
        assert_eq!(traj.events.len(), m.critical_times.len(), "{:?}", traj.events);
        for (e, c) in traj.events.iter().zip(&m.critical_times) {
            assert!((e - c).abs() < 1e-6, "event {e} vs critical time {c}");
        }
    }

    #[test]
    fn unrealized_mode_trajectory_is_truncated_before_antipode() {
        // the 0.916 pi fidelity root of the asymmetric protocol: orthogonal
        // geometry but the first segment ends before the antipode is reached
        let p = fig3a();
        let modes = crate::criticality::find_fdqpts(&p, 4001).unwrap();
        let m = modes
            .iter()
            .find(|m| (m.k_c / PI - 0.916).abs() < 1e-3)
            .unwrap();
        assert!(!m.realized);
        let tgrid = TimeGrid::uniform(&p, 3000, &[]).unwrap();
        let traj = trajectory(&p, m.k_c, &tgrid).unwrap();
        let geom = mode_geometry(&p, m.k_c).unwrap();
        let eff = effective_mode(&p, &geom);
        // in segment 1 the alignment never reaches -1 ...
        for (t, v) in traj.times.iter().zip(&traj.vectors) {
            if *t < p.t1 {
                assert!(v.dot(eff.n_eff) > -1.0 + 1e-4);
            }
        }
        // ... and no event is detected anywhere in the period
        assert!(traj.events.is_empty(), "{:?}", traj.events);
    }
}
