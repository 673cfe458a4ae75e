//! Protocol parameters and static per-mode geometry of the two segment
//! Hamiltonians h_k(phi_alpha) = d_{alpha,k} . sigma.

use crate::error::{Error, Result};
use crate::mat2::ComplexMat2;
use crate::vec3::Vec3;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Physical and protocol parameters of the flux-quenched chain.
///
/// Units: hbar = 1; when `j != 0` all times are naturally in units of 1/J.
/// `gamma >= 0` is assumed; negative values are supported numerically but
/// untested against reference data. Phases are taken mod 2*pi.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainParams {
    /// Exchange strength J.
    pub j: f64,
    /// Anisotropy gamma.
    pub gamma: f64,
    /// Transverse field lambda.
    pub lambda: f64,
    /// Flux phase of the first segment (radians).
    pub phi1: f64,
    /// Flux phase of the second segment (radians).
    pub phi2: f64,
    /// First segment duration, > 0.
    pub t1: f64,
    /// Second segment duration, > 0.
    pub t2: f64,
    /// Number of sites, even (APBC / even-parity sector).
    pub sites: usize,
}

impl ChainParams {
    /// Reference drive: J = 1, gamma = 1, N = 1000.
    pub fn baseline(lambda: f64, phi1: f64, phi2: f64, t1: f64, t2: f64) -> Self {
        Self {
            j: 1.0,
            gamma: 1.0,
            lambda,
            phi1,
            phi2,
            t1,
            t2,
            sites: 1000,
        }
    }

    /// Full driving period T = T1 + T2.
    pub fn period(&self) -> f64 {
        self.t1 + self.t2
    }

    pub fn flux(&self, segment: Segment) -> f64 {
        match segment {
            Segment::First => self.phi1,
            Segment::Second => self.phi2,
        }
    }

    pub fn duration(&self, segment: Segment) -> f64 {
        match segment {
            Segment::First => self.t1,
            Segment::Second => self.t2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t1 > 0.0 && self.t2 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "segment durations must be positive (T1 = {}, T2 = {})",
                self.t1, self.t2
            )));
        }
        if self.sites == 0 || self.sites % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "L must be a positive even integer, got {}",
                self.sites
            )));
        }
        for v in [self.j, self.gamma, self.lambda, self.phi1, self.phi2] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter("non-finite parameter".into()));
            }
        }
        Ok(())
    }

    /// Same protocol with both fluxes shifted by `c` (global flux shift).
    pub fn with_flux_shift(&self, c: f64) -> Self {
        Self {
            phi1: self.phi1 + c,
            phi2: self.phi2 + c,
            ..*self
        }
    }
}

/// Driving segment label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Segment {
    First,
    Second,
}

impl Segment {
    pub fn index(self) -> u8 {
        match self {
            Segment::First => 1,
            Segment::Second => 2,
        }
    }
}

/// Ordered set of momenta strictly inside (0, pi).
#[derive(Clone, Debug)]
pub struct MomentumGrid {
    ks: Vec<f64>,
}

impl MomentumGrid {
    /// APBC even-sector momenta k = (2n - 1) pi / L, n = 1 .. L/2.
    pub fn k_plus(sites: usize) -> Result<Self> {
        if sites == 0 || sites % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "L must be a positive even integer, got {sites}"
            )));
        }
        let ks = (1..=sites / 2)
            .map(|n| (2 * n - 1) as f64 * PI / sites as f64)
            .collect();
        Ok(Self { ks })
    }

    /// `n` uniform points strictly inside (0, pi), for continuum integrals.
    pub fn dense(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("dense grid needs n >= 1".into()));
        }
        let h = PI / (n + 1) as f64;
        let ks = (1..=n).map(|i| i as f64 * h).collect();
        Ok(Self { ks })
    }

    pub fn ks(&self) -> &[f64] {
        &self.ks
    }

    pub fn len(&self) -> usize {
        self.ks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ks.is_empty()
    }
}

/// Static per-mode geometry shared by both segments.
#[derive(Clone, Copy, Debug)]
pub struct ModeGeometry {
    pub k: f64,
    /// Quasiparticle energy xi_k = |d_{alpha,k}|, the same in both segments.
    pub xi: f64,
    /// Bogoliubov angle theta_k = atan2(gamma sin k, J cos k + lambda).
    pub theta: f64,
    pub d1_hat: Vec3,
    pub d2_hat: Vec3,
}

/// Effective field d_{alpha,k} for one segment.
pub fn field_vector(params: &ChainParams, k: f64, segment: Segment) -> Vec3 {
    let phi = params.flux(segment);
    let gs = params.gamma * k.sin();
    Vec3::new(
        gs * phi.sin(),
        -gs * phi.cos(),
        params.j * k.cos() + params.lambda,
    )
}

/// Momentum grid K+ for the chain (length L/2, all momenta in (0, pi)).
pub fn momentum_grid(params: &ChainParams) -> Result<MomentumGrid> {
    MomentumGrid::k_plus(params.sites)
}

/// Dispersion, Bogoliubov angle and unit field directions at momentum `k`.
///
/// The branch of theta_k follows atan2(gamma sin k, J cos k + lambda), which
/// keeps the ground state continuous across J cos k + lambda = 0.
pub fn mode_geometry(params: &ChainParams, k: f64) -> Result<ModeGeometry> {
    let d1 = field_vector(params, k, Segment::First);
    let d2 = field_vector(params, k, Segment::Second);
    let xi = d1.norm();
    if xi < 1e-12 {
        return Err(Error::DegenerateMode {
            k,
            reason: "gapless mode: xi_k ~ 0".into(),
        });
    }
    let theta = (params.gamma * k.sin()).atan2(params.j * k.cos() + params.lambda);
    Ok(ModeGeometry {
        k,
        xi,
        theta,
        d1_hat: d1 * (1.0 / xi),
        d2_hat: d2 * (1.0 / xi),
    })
}

impl ModeGeometry {
    pub fn d_hat(&self, segment: Segment) -> Vec3 {
        match segment {
            Segment::First => self.d1_hat,
            Segment::Second => self.d2_hat,
        }
    }
}

/// BdG kernel h_k(phi_alpha) = d_{alpha,k} . sigma in the basis
/// {a+_k a+_{-k} |0>, |0>}.
pub fn kernel_hamiltonian(geom: &ModeGeometry, segment: Segment) -> ComplexMat2 {
    ComplexMat2::from_bloch(0.0, geom.d_hat(segment) * geom.xi)
}
