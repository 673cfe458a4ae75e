use crate::vec3::Vec3;
use crate::C64;
use std::ops::{Add, Mul, Sub};

/// Complex 2x2 matrix, row-major. Carrier for BdG kernels (Hermitian) and
/// propagators (unitary); the relevant structure is checked by the consumer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexMat2 {
    pub m: [[C64; 2]; 2],
}

impl ComplexMat2 {
    pub fn new(m00: C64, m01: C64, m10: C64, m11: C64) -> Self {
        Self {
            m: [[m00, m01], [m10, m11]],
        }
    }

    pub fn zero() -> Self {
        let z = C64::new(0.0, 0.0);
        Self::new(z, z, z, z)
    }

    pub fn identity() -> Self {
        let z = C64::new(0.0, 0.0);
        let o = C64::new(1.0, 0.0);
        Self::new(o, z, z, o)
    }

    /// a*I + b.sigma with real coefficients (Hermitian by construction).
    pub fn from_bloch(a: f64, b: Vec3) -> Self {
        Self::new(
            C64::new(a + b.z, 0.0),
            C64::new(b.x, -b.y),
            C64::new(b.x, b.y),
            C64::new(a - b.z, 0.0),
        )
    }

    /// c*I + d.sigma with complex scalar part and real vector part scaled by
    /// a complex factor: c*I + f*(b.sigma). Used for axis-angle propagators.
    pub fn bloch_with_factor(c: C64, f: C64, b: Vec3) -> Self {
        Self::new(
            c + f * b.z,
            f * C64::new(b.x, -b.y),
            f * C64::new(b.x, b.y),
            c - f * b.z,
        )
    }

    pub fn adjoint(&self) -> Self {
        Self::new(
            self.m[0][0].conj(),
            self.m[1][0].conj(),
            self.m[0][1].conj(),
            self.m[1][1].conj(),
        )
    }

    pub fn trace(&self) -> C64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> C64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(
            self.m[0][0] * s,
            self.m[0][1] * s,
            self.m[1][0] * s,
            self.m[1][1] * s,
        )
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest singular value magnitude for Hermitian input: max |eigenvalue|.
    pub fn spectral_norm_hermitian(&self) -> f64 {
        let a = 0.5 * (self.m[0][0].re + self.m[1][1].re);
        let bz = 0.5 * (self.m[0][0].re - self.m[1][1].re);
        let r = (bz * bz + self.m[0][1].norm_sqr()).sqrt();
        (a + r).abs().max((a - r).abs())
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (*self - self.adjoint()).frobenius_norm()
    }

    pub fn unitarity_defect(&self) -> f64 {
        (self.adjoint() * *self - Self::identity()).frobenius_norm()
    }

    /// Decomposition M = a*I + b.sigma with complex a and complex-valued b.
    /// Returns (a, bx, by, bz).
    pub fn pauli_decompose(&self) -> (C64, C64, C64, C64) {
        let a = (self.m[0][0] + self.m[1][1]) * 0.5;
        let bz = (self.m[0][0] - self.m[1][1]) * 0.5;
        let bx = (self.m[0][1] + self.m[1][0]) * 0.5;
        let by = (self.m[1][0] - self.m[0][1]) * 0.5 * C64::new(0.0, -1.0);
        (a, bx, by, bz)
    }

    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }
}

impl Add for ComplexMat2 {
    type Output = ComplexMat2;
    fn add(self, o: Self) -> Self {
        Self::new(
            self.m[0][0] + o.m[0][0],
            self.m[0][1] + o.m[0][1],
            self.m[1][0] + o.m[1][0],
            self.m[1][1] + o.m[1][1],
        )
    }
}

impl Sub for ComplexMat2 {
    type Output = ComplexMat2;
    fn sub(self, o: Self) -> Self {
        Self::new(
            self.m[0][0] - o.m[0][0],
            self.m[0][1] - o.m[0][1],
            self.m[1][0] - o.m[1][0],
            self.m[1][1] - o.m[1][1],
        )
    }
}

impl Mul for ComplexMat2 {
    type Output = ComplexMat2;
    fn mul(self, o: Self) -> Self {
        let mut r = Self::zero();
        for i in 0..2 {
            for j in 0..2 {
                r.m[i][j] = self.m[i][0] * o.m[0][j] + self.m[i][1] * o.m[1][j];
            }
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_roundtrip() {
        let b = Vec3::new(0.4, -1.1, 2.0);
        let m = ComplexMat2::from_bloch(0.7, b);
        let (a, bx, by, bz) = m.pauli_decompose();
        assert!((a.re - 0.7).abs() < 1e-15 && a.im.abs() < 1e-15);
        assert!((bx.re - b.x).abs() < 1e-15);
        assert!((by.re - b.y).abs() < 1e-15);
        assert!((bz.re - b.z).abs() < 1e-15);
        assert!(m.hermiticity_defect() < 1e-15);
    }

    #[test]
    fn spectral_norm_of_scaled_identity() {
        let m = ComplexMat2::identity().scale(C64::new(-3.5, 0.0));
        assert!((m.spectral_norm_hermitian() - 3.5).abs() < 1e-14);
    }
}
