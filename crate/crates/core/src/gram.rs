//! Connected Gram matrix of the tangent vectors `∂_{θ_i}Ψ`, `∂_{φ_i}Ψ` and the
//! closed-form inverse of its `Im G_θφ` block.
//!
//! All blocks are densities per unit cell (the `L/K` prefactor is dropped).
//! `G_θθ` is real diagonal, `G_φφ` real symmetric, and `G_θφ = −G_φθ^†`.
//! Longer-range entries carry the geometric factor
//! `β_[·,·]/(1 − β_[1,K])` from summing over all copies of the cell.
//!
//! The inverse of `Im G_θφ` decays with the products `∏ c̃_m` along the arc
//! joining two sites; at `J = 1/2`, `c̃ = 0` and only the diagonal and the
//! `(i, i+1)` band survive.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::Result;
use crate::model::{ModelParams, UnitCell, VariationalState};

type C = Complex64;

#[derive(Debug, Clone)]
pub struct GramBundle {
    pub g_tt: DMatrix<C>,
    pub g_tp: DMatrix<C>,
    pub g_pt: DMatrix<C>,
    pub g_pp: DMatrix<C>,
    /// `(Im G_θφ)⁻¹` density, when the state is away from the poles.
    pub inv_im_g_tp: Option<DMatrix<f64>>,
}

impl GramBundle {
    pub fn im_g_tp(&self) -> DMatrix<f64> {
        self.g_tp.map(|v| v.im)
    }

    /// The `2K × 2K` Hermitian matrix `[[G_θθ, G_θφ], [G_φθ, G_φφ]]`.
    pub fn full(&self) -> DMatrix<C> {
        let k = self.g_tt.nrows();
        let mut m = DMatrix::zeros(2 * k, 2 * k);
        m.view_mut((0, 0), (k, k)).copy_from(&self.g_tt);
        m.view_mut((0, k), (k, k)).copy_from(&self.g_tp);
        m.view_mut((k, 0), (k, k)).copy_from(&self.g_pt);
        m.view_mut((k, k), (k, k)).copy_from(&self.g_pp);
        m
    }
}

/// The four connected blocks.
pub fn gram_blocks(cell: &UnitCell) -> GramBundle {
    let k = cell.k;
    let j = cell.j;
    let d = cell.gap;
    let ci = C::new(0.0, 1.0);
    let mut g_tt = DMatrix::zeros(k, k);
    let mut g_tp = DMatrix::zeros(k, k);
    let mut g_pt = DMatrix::zeros(k, k);
    let mut g_pp = DMatrix::zeros(k, k);
    let kk = k as isize;
    for i in 0..k {
        let ii = i as isize;
        let eta = cell.eta[i];
        let eta1 = cell.eta[cell.idx(ii + 1)];
        let (w, t, cd, s) = (cell.w[i], cell.t[i], cell.cd[i], cell.sin[i]);
        g_tt[(i, i)] = C::new(eta * j / 2.0, 0.0);
        for kd in 0..kk {
            let jj = cell.idx(ii + kd);
            if kd == 0 {
                g_tp[(i, i)] = ci
                    * (-eta * j * s / 2.0 + j * j * eta * w * t * cell.beta(ii + 1, ii + kk - 1) / d * cd);
                g_pt[(i, i)] = ci
                    * (eta * j * s / 2.0 - j * j * eta * w * t * cell.beta(ii - kk + 1, ii - 1) / d * cd);
                g_pp[(i, i)] = C::new(
                    eta * cell.eta_c[i] * j * j * cd * cd + eta * j * s * s / 2.0
                        - 2.0 * j * j * eta * eta1 * cd * cd * cell.beta(ii + 1, ii + kk - 1) / d,
                    0.0,
                );
            } else {
                let (wj, tj, cdj) = (cell.w[jj], cell.t[jj], cell.cd[jj]);
                let etaj = cell.eta[jj];
                let etaj1 = cell.eta[cell.idx(ii + kd + 1)];
                let fwd = cell.beta(ii + 1, ii + kd - 1) / d;
                let bwd = cell.beta(ii + kd - kk + 1, ii - 1) / d;
                g_tp[(i, jj)] = ci * (j * j * eta * w * t * fwd * cdj);
                g_pt[(i, jj)] = ci * (-j * j * etaj * wj * tj * bwd * cd);
                g_pp[(i, jj)] = C::new(
                    -j * j * eta * eta1 * cd * fwd * cdj - j * j * etaj * etaj1 * cdj * bwd * cd,
                    0.0,
                );
            }
        }
    }
    GramBundle { g_tt, g_tp, g_pt, g_pp, inv_im_g_tp: None }
}

/// `(Im G_θφ)⁻¹ = diag(D) + diag(x²) · M`.
///
/// `D_i = −2/(J η_i sin θ_i)`; every entry of the remainder carries an
/// explicit `x_i²`, which the leakage evaluation cancels analytically.
#[derive(Debug, Clone)]
pub struct InverseParts {
    pub diag: Vec<f64>,
    pub m: DMatrix<f64>,
}

impl InverseParts {
    pub fn assemble(&self, cell: &UnitCell) -> DMatrix<f64> {
        let k = self.diag.len();
        DMatrix::from_fn(k, k, |i, j| {
            let d = if i == j { self.diag[i] } else { 0.0 };
            d + cell.w[i] * self.m[(i, j)]
        })
    }
}

pub fn inverse_parts(cell: &UnitCell) -> Result<InverseParts> {
    cell.check_poles()?;
    cell.check_resonance()?;
    let k = cell.k;
    let kk = k as isize;
    let j = cell.j;
    let gap = cell.ct_gap;
    let mut diag = vec![0.0; k];
    let mut m = DMatrix::zeros(k, k);
    for i in 0..k {
        let ii = i as isize;
        let (s, t, eta) = (cell.sin[i], cell.t[i], cell.eta[i]);
        diag[i] = -2.0 / (j * eta * s);
        for c in 0..k {
            if c == i {
                m[(i, i)] = -4.0 * t * t / (s * eta) * cell.ct_prod(ii + 1, ii + kk - 1) / gap;
            } else {
                let cc = if c > i { c as isize } else { c as isize + kk };
                m[(i, c)] = -4.0 * t * cell.t[c] / (s * cell.eta[c]) * cell.ct_prod(ii + 1, cc - 1) / gap;
            }
        }
    }
    Ok(InverseParts { diag, m })
}

/// Closed-form `(Im G_θφ)⁻¹`.
pub fn inverse_im_g_thetaphi(cell: &UnitCell) -> Result<DMatrix<f64>> {
    Ok(inverse_parts(cell)?.assemble(cell))
}

/// Gram blocks together with the inverse.
pub fn gram_bundle(params: &ModelParams, state: &VariationalState) -> Result<GramBundle> {
    let cell = UnitCell::new(params, state)?;
    let mut g = gram_blocks(&cell);
    g.inv_im_g_tp = Some(inverse_im_g_thetaphi(&cell)?);
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spin_half_inverse_is_banded() {
        let p = ModelParams::uniform(4, 0.5, 1.0, 0.0).unwrap();
        let s = VariationalState::new(vec![0.7, 1.9, 2.4, 1.2], vec![0.1; 4]);
        let cell = UnitCell::new(&p, &s).unwrap();
        let inv = inverse_im_g_thetaphi(&cell).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                if j != i && j != (i + 1) % 4 {
                    assert_eq!(inv[(i, j)], 0.0);
                }
            }
        }
        let prod = &inv * gram_blocks(&cell).im_g_tp();
        assert!((prod - DMatrix::<f64>::identity(4, 4)).amax() < 1e-12);
    }
}
