//! Dense spin operators and the literal site tensors `A^σ`.

use nalgebra::{DMatrix, Matrix2, Matrix4};
use num_complex::Complex64;

use crate::spin_coherent::{coherent_coefficients, coherent_derivatives};

type C = Complex64;

/// A site tensor: one 2×2 bond matrix per local level `n = 0..=2J`.
pub type SiteTensor = Vec<Matrix2<C>>;

/// Normalized operators `s^x = S^x/J`, `s^z = S^z/J` and the projector onto
/// the unexcited level, in the basis `|J, −J + n⟩`.
#[derive(Debug, Clone)]
pub struct SpinOps {
    pub sx: DMatrix<C>,
    pub sz: DMatrix<C>,
    pub proj: DMatrix<C>,
    pub id: DMatrix<C>,
}

pub fn spin_ops(two_j: u32) -> SpinOps {
    let d = two_j as usize + 1;
    let j = two_j as f64 / 2.0;
    let mut sx = DMatrix::zeros(d, d);
    let mut sz = DMatrix::zeros(d, d);
    for n in 0..d {
        let m = -j + n as f64;
        sz[(n, n)] = C::new(m / j, 0.0);
        if n + 1 < d {
            let a = (j * (j + 1.0) - m * (m + 1.0)).sqrt() / (2.0 * j);
            sx[(n + 1, n)] = C::new(a, 0.0);
            sx[(n, n + 1)] = C::new(a, 0.0);
        }
    }
    let mut proj = DMatrix::zeros(d, d);
    proj[(0, 0)] = C::new(1.0, 0.0);
    SpinOps { sx, sz, proj, id: DMatrix::identity(d, d) }
}

/// `A^0 = [[c_0, 0], [1, 0]]`, `A^n = [[0, c_n], [0, 0]]`.
pub fn site_tensor(coefs: &[C]) -> SiteTensor {
    let z = C::default();
    let mut a = vec![Matrix2::new(coefs[0], z, C::new(1.0, 0.0), z)];
    a.extend(coefs[1..].iter().map(|&c| Matrix2::new(z, c, z, z)));
    a
}

/// Derivative tensor; the constant bond entry drops out.
pub fn derivative_tensor(dcoefs: &[C]) -> SiteTensor {
    let z = C::default();
    let mut a = vec![Matrix2::new(dcoefs[0], z, z, z)];
    a.extend(dcoefs[1..].iter().map(|&c| Matrix2::new(z, c, z, z)));
    a
}

/// Site tensor and its `θ`, `φ` derivatives.
pub fn coherent_tensors(theta: f64, phi: f64, two_j: u32) -> (SiteTensor, SiteTensor, SiteTensor) {
    let c = coherent_coefficients(theta, phi, two_j);
    let (dt, dp) = coherent_derivatives(theta, phi, two_j);
    (site_tensor(&c), derivative_tensor(&dt), derivative_tensor(&dp))
}

/// `T(X, O, Y) = Σ_{nm} O_{nm} conj(X^n) ⊗ Y^m`.
pub fn transfer(x: &SiteTensor, o: &DMatrix<C>, y: &SiteTensor) -> Matrix4<C> {
    let mut out = Matrix4::zeros();
    for n in 0..x.len() {
        for m in 0..y.len() {
            let w = o[(n, m)];
            if w == C::default() {
                continue;
            }
            let xc = x[n].map(|v| v.conj());
            out += xc.kronecker(&y[m]) * w;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_transfer_matches_closed_form() {
        let (a, _, _) = coherent_tensors(1.1, 0.4, 3);
        let t = transfer(&a, &spin_ops(3).id, &a);
        let x = (0.55f64).cos().powi(3);
        let cf = crate::transfer::site_transfer(x).mat;
        assert!((t.map(|v| v.re) - cf).amax() < 1e-14);
        assert!(t.map(|v| v.im).amax() < 1e-14);
    }
}
