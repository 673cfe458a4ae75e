//! One-period Floquet operator and the effective Hamiltonian data per mode:
//! quasienergy, effective Bloch direction, spherical angles, and the
//! segment/effective quasiparticle overlaps.

use crate::mat2::ComplexMat2;
use crate::model::{ChainParams, ModeGeometry, Segment};
use crate::vec3::Vec3;
use crate::C64;

/// Modes with |sin(xi_eff T)| below this are treated as quasienergy
/// degeneracies (U = +-I), where the effective axis is undefined.
pub const DEGENERACY_EPS: f64 = 1e-9;

/// Per-mode effective Floquet data.
#[derive(Clone, Copy, Debug)]
pub struct EffectiveMode {
    pub k: f64,
    /// Quasienergy xi_eff in [0, pi/T] (principal arccos branch).
    pub xi_eff: f64,
    /// Effective Bloch direction n_eff (unit unless degenerate).
    pub n_eff: Vec3,
    /// Polar angle of n_eff.
    pub theta_eff: f64,
    /// Azimuth of n_eff.
    pub phi_eff: f64,
    /// True when |sin(xi_eff T)| < DEGENERACY_EPS; n_eff is then a fallback
    /// direction (continuity in k when filled over a grid).
    pub degenerate: bool,
}

/// Overlap parameters u_{alpha,k} and per-mode Floquet quench fidelities.
#[derive(Clone, Copy, Debug)]
pub struct Overlaps {
    pub u1: C64,
    pub u2: C64,
    pub f1: f64,
    pub f2: f64,
}

impl Overlaps {
    pub fn u(&self, segment: Segment) -> C64 {
        match segment {
            Segment::First => self.u1,
            Segment::Second => self.u2,
        }
    }

    pub fn fidelity(&self, segment: Segment) -> f64 {
        match segment {
            Segment::First => self.f1,
            Segment::Second => self.f2,
        }
    }
}

/// Axis-angle closed form of e^{-i h_alpha tau}:
/// cos(xi tau) I - i sin(xi tau) d_hat.sigma.
pub fn segment_propagator(geom: &ModeGeometry, segment: Segment, tau: f64) -> ComplexMat2 {
    let angle = geom.xi * tau;
    ComplexMat2::bloch_with_factor(
        C64::new(angle.cos(), 0.0),
        -C64::i() * angle.sin(),
        geom.d_hat(segment),
    )
}

/// One-period Floquet operator U_k(T) = e^{-i h2 T2} e^{-i h1 T1}.
pub fn floquet_operator(params: &ChainParams, geom: &ModeGeometry) -> ComplexMat2 {
    segment_propagator(geom, Segment::Second, params.t2)
        * segment_propagator(geom, Segment::First, params.t1)
}

/// cos(xi_eff T) from the closed form, clamped into [-1, 1].
fn cos_quasienergy(params: &ChainParams, geom: &ModeGeometry) -> f64 {
    let (x1, x2) = (geom.xi * params.t1, geom.xi * params.t2);
    let (st, ct) = geom.theta.sin_cos();
    let dphi = params.phi1 - params.phi2;
    let c = x1.cos() * x2.cos() - (st * st * dphi.cos() + ct * ct) * x1.sin() * x2.sin();
    c.clamp(-1.0, 1.0)
}

/// Effective mode from the closed forms for n_eff and xi_eff. At a
/// quasienergy degeneracy the direction is physically arbitrary; this
/// function flags the mode and falls back to d1_hat. Use [`effective_modes`]
/// over a grid to get the continuity-in-k fallback instead.
pub fn effective_mode(params: &ChainParams, geom: &ModeGeometry) -> EffectiveMode {
    let period = params.period();
    let angle = cos_quasienergy(params, geom).acos(); // xi_eff T in [0, pi]
    let xi_eff = angle / period;
    let s = angle.sin();
    if s.abs() < DEGENERACY_EPS {
        let n = geom.d1_hat;
        return EffectiveMode {
            k: geom.k,
            xi_eff,
            n_eff: n,
            theta_eff: n.polar_angle(),
            phi_eff: n.azimuth(),
            degenerate: true,
        };
    }
    let (x1, x2) = (geom.xi * params.t1, geom.xi * params.t2);
    let (s1, c1) = x1.sin_cos();
    let (s2, c2) = x2.sin_cos();
    let (st, ct) = geom.theta.sin_cos();
    let (p1, p2) = (params.phi1, params.phi2);
    let nx = st / s
        * (p1.sin() * s1 * c2 + p2.sin() * s2 * c1 + ct * (p1.cos() - p2.cos()) * s1 * s2);
    let ny = st / s
        * (-p1.cos() * s1 * c2 - p2.cos() * s2 * c1 + ct * (p1.sin() - p2.sin()) * s1 * s2);
    let nz = (ct * (x1 + x2).sin() + st * st * (p1 - p2).sin() * s1 * s2) / s;
    let n = Vec3::new(nx, ny, nz);
    EffectiveMode {
        k: geom.k,
        xi_eff,
        n_eff: n,
        theta_eff: n.polar_angle(),
        phi_eff: n.azimuth(),
        degenerate: false,
    }
}

/// Effective modes over a momentum grid, with degenerate modes inheriting the
/// effective direction of the nearest non-degenerate neighbour so downstream
/// integrals stay well-behaved.
pub fn effective_modes(params: &ChainParams, geoms: &[ModeGeometry]) -> Vec<EffectiveMode> {
    let mut modes: Vec<EffectiveMode> =
        geoms.iter().map(|g| effective_mode(params, g)).collect();
    let good: Vec<usize> = modes
        .iter()
        .enumerate()
        .filter(|(_, m)| !m.degenerate)
        .map(|(i, _)| i)
        .collect();
    if good.is_empty() {
        return modes;
    }
    for i in 0..modes.len() {
        if modes[i].degenerate {
            let j = *good
                .iter()
                .min_by_key(|&&j| (j as isize - i as isize).unsigned_abs())
                .unwrap();
            let n = modes[j].n_eff;
            modes[i].n_eff = n;
            modes[i].theta_eff = n.polar_angle();
            modes[i].phi_eff = n.azimuth();
        }
    }
    modes
}

/// Overlap parameters u_{alpha,k} and fidelities F_{alpha,k} from the angle
/// closed forms:
///   u_alpha = cos(th_k/2) sin(th_eff/2) e^{-i phi_eff}
///           - i sin(th_k/2) cos(th_eff/2) e^{-i phi_alpha},
///   F_alpha = |cos(th_eff/2) cos(th_k/2)
///           + i sin(th_eff/2) sin(th_k/2) e^{i(phi_eff - phi_alpha)}|.
pub fn overlaps(params: &ChainParams, geom: &ModeGeometry, eff: &EffectiveMode) -> Overlaps {
    let (hk_s, hk_c) = (geom.theta / 2.0).sin_cos();
    let (he_s, he_c) = (eff.theta_eff / 2.0).sin_cos();
    let u_of = |phi: f64| {
        hk_c * he_s * (-C64::i() * eff.phi_eff).exp()
            - C64::i() * hk_s * he_c * (-C64::i() * phi).exp()
    };
    let f_of = |phi: f64| {
        (he_c * hk_c
            + C64::i() * he_s * hk_s * (C64::i() * (eff.phi_eff - phi)).exp())
        .norm()
    };
    Overlaps {
        u1: u_of(params.phi1),
        u2: u_of(params.phi2),
        f1: f_of(params.phi1),
        f2: f_of(params.phi2),
    }
}
