//! Brute-force numerical references: matrix exponential by eigendecomposition,
//! principal SU(2) logarithm, ground states by eigensolve, and piecewise state
//! propagation. No closed-form shortcuts; these validate the analytic modules.

use crate::error::{Error, Result};
use crate::mat2::ComplexMat2;
use crate::model::{kernel_hamiltonian, mode_geometry, ChainParams, Segment};
use crate::vec3::Vec3;
use crate::C64;

/// Degeneracy margin shared with the floquet module.
pub const DEGENERACY_EPS: f64 = 1e-9;

/// Two-component state in the basis {a+_k a+_{-k} |0>, |0_k, 0_{-k}>}.
#[derive(Clone, Copy, Debug)]
pub struct Spinor {
    pub c: [C64; 2],
}

impl Spinor {
    pub fn new(pair: C64, vacuum: C64) -> Self {
        Self { c: [pair, vacuum] }
    }

    pub fn norm(&self) -> f64 {
        (self.c[0].norm_sqr() + self.c[1].norm_sqr()).sqrt()
    }

    /// <self|other>.
    pub fn overlap(&self, other: &Spinor) -> C64 {
        self.c[0].conj() * other.c[0] + self.c[1].conj() * other.c[1]
    }

    /// Bloch vector of the pure state in the 1/2 (1 - d.sigma) convention,
    /// i.e. -<psi|sigma|psi>.
    pub fn bloch_vector(&self) -> Vec3 {
        let (a, b) = (self.c[0], self.c[1]);
        let cross = a.conj() * b;
        -Vec3::new(2.0 * cross.re, 2.0 * cross.im, a.norm_sqr() - b.norm_sqr())
    }

    pub fn expectation(&self, h: &ComplexMat2) -> f64 {
        let hv = h.apply(self.c);
        (self.c[0].conj() * hv[0] + self.c[1].conj() * hv[1]).re
    }
}

/// Eigenvalues (lo, hi) of a Hermitian 2x2 matrix.
pub fn hermitian_eigenvalues(h: &ComplexMat2) -> Result<(f64, f64)> {
    let defect = h.hermiticity_defect();
    if defect > 1e-10 {
        return Err(Error::NonHermitian { defect });
    }
    let a = 0.5 * (h.m[0][0].re + h.m[1][1].re);
    let bz = 0.5 * (h.m[0][0].re - h.m[1][1].re);
    let r = (bz * bz + h.m[0][1].norm_sqr()).sqrt();
    Ok((a - r, a + r))
}

/// Normalized eigenvector of a Hermitian 2x2 matrix for eigenvalue `lambda`.
/// Picks the better-conditioned of the two cofactor constructions.
fn hermitian_eigenvector(h: &ComplexMat2, lambda: f64) -> [C64; 2] {
    let l = C64::new(lambda, 0.0);
    // (h - l) v = 0; rows give two candidate null vectors.
    let v1 = [h.m[0][1], l - h.m[0][0]];
    let v2 = [l - h.m[1][1], h.m[1][0]];
    let n1 = v1[0].norm_sqr() + v1[1].norm_sqr();
    let n2 = v2[0].norm_sqr() + v2[1].norm_sqr();
    let v = if n1 >= n2 { v1 } else { v2 };
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    [v[0] / n, v[1] / n]
}

/// Reference exponential U = e^{-i h t} via eigendecomposition.
pub fn mat_exp(h: &ComplexMat2, t: f64) -> Result<ComplexMat2> {
    let (lo, hi) = hermitian_eigenvalues(h)?;
    if (hi - lo).abs() < 1e-300 {
        // h is a multiple of the identity
        let ph = (-C64::i() * lo * t).exp();
        return Ok(ComplexMat2::identity().scale(ph));
    }
    let vlo = hermitian_eigenvector(h, lo);
    let vhi = hermitian_eigenvector(h, hi);
    let elo = (-C64::i() * lo * t).exp();
    let ehi = (-C64::i() * hi * t).exp();
    let mut u = ComplexMat2::zero();
    for i in 0..2 {
        for j in 0..2 {
            u.m[i][j] = elo * vlo[i] * vlo[j].conj() + ehi * vhi[i] * vhi[j].conj();
        }
    }
    Ok(u)
}

/// Principal logarithm of an SU(2)-like unitary: U = e^{-i xi_eff T n.sigma}
/// with xi_eff T in [0, pi]. Fails with a degeneracy error at U = +-I.
pub fn mat_log_su2(u: &ComplexMat2, period: f64) -> Result<(f64, Vec3)> {
    let c = (u.trace() * 0.5).re.clamp(-1.0, 1.0);
    let angle = c.acos(); // xi_eff * T, principal branch
    let s = angle.sin();
    if s.abs() < DEGENERACY_EPS {
        return Err(Error::DegenerateMode {
            k: f64::NAN,
            reason: "U = +-I: effective axis undefined".into(),
        });
    }
    // traceless part: U - c*I = -i sin(angle) n.sigma
    let (_, bx, by, bz) = u.pauli_decompose();
    let f = C64::i() / s;
    let n = Vec3::new((f * bx).re, (f * by).re, (f * bz).re);
    Ok((angle / period, n.normalized()))
}

/// Ground state of a Hermitian kernel: the -xi eigenvector, with the vacuum
/// component phase-fixed to be real non-negative.
pub fn ground_state(h: &ComplexMat2) -> Result<Spinor> {
    let (lo, hi) = hermitian_eigenvalues(h)?;
    if (hi - lo).abs() < DEGENERACY_EPS {
        return Err(Error::DegenerateMode {
            k: f64::NAN,
            reason: "degenerate spectrum: ground state undefined".into(),
        });
    }
    let v = hermitian_eigenvector(h, lo);
    Ok(fix_phase(Spinor::new(v[0], v[1])))
}

/// Ground state of the effective Floquet Hamiltonian read off a one-period
/// unitary: the eigenvector of U with eigenvalue e^{+i xi_eff T}
/// (quasienergy -xi_eff).
pub fn floquet_ground_state(u: &ComplexMat2, period: f64) -> Result<Spinor> {
    let (xi_eff, n) = mat_log_su2(u, period)?;
    let heff = ComplexMat2::from_bloch(0.0, n * xi_eff);
    ground_state(&heff)
}

fn fix_phase(mut s: Spinor) -> Spinor {
    let v = s.c[1];
    if v.norm() > 1e-14 {
        let ph = v.conj() / v.norm();
        s.c[0] *= ph;
        s.c[1] *= ph;
    } else {
        let ph = s.c[0].conj() / s.c[0].norm();
        s.c[0] *= ph;
        s.c[1] *= ph;
    }
    s
}

/// Piecewise one-period propagator built only from `mat_exp`.
pub fn propagator(params: &ChainParams, k: f64, t: f64) -> Result<ComplexMat2> {
    if !(0.0..params.period()).contains(&t) {
        return Err(Error::Domain(format!(
            "t = {t} outside the micromotion window [0, {})",
            params.period()
        )));
    }
    let geom = mode_geometry(params, k)?;
    let h1 = kernel_hamiltonian(&geom, Segment::First);
    if t < params.t1 {
        mat_exp(&h1, t)
    } else {
        let h2 = kernel_hamiltonian(&geom, Segment::Second);
        Ok(mat_exp(&h2, t - params.t1)? * mat_exp(&h1, params.t1)?)
    }
}

/// U_k(t) |psi0> within one period.
pub fn propagate(params: &ChainParams, k: f64, t: f64, psi0: &Spinor) -> Result<Spinor> {
    let u = propagator(params, k, t)?;
    let v = u.apply(psi0.c);
    Ok(Spinor::new(v[0], v[1]))
}
