//! Energy variance and the quantum leakage rate
//! `Γ² = (1/L)‖(d/dt + iH)|ψ⟩‖²` along the TDVP flow.
//!
//! The variance splits into `ZZ`, `ZX + XZ` and `XX` parts. The nearest
//! neighbour `XX` correlations use the dressed operator `P_{i−1} s^x_i P_{i+1}`
//! because the blockade projector cannot be dropped there.
//!
//! `Γ²` is evaluated twice:
//!
//! * from the seven-term closed form, which only needs `(Im G)⁻¹R_θ` and
//!   `(Im G)⁻¹R_φ`, and is independent of the detunings;
//! * from the raw definition `Var − 2Σμ̇ Im⟨∂H⟩_c + Σ μ̇ Re G μ̇`.
//!
//! Terms five and six of the closed form are each of order `1/x²` and
//! cancel to leading order; the total combines them algebraically first so
//! the result stays accurate at large `J`.

use nalgebra::DVector;

use crate::dynamics::{eom_from_cell, hamiltonian_derivative, precession, residuals, Residuals, Velocity};
use crate::error::{Error, Result};
use crate::gram::{gram_blocks, inverse_parts, GramBundle};
use crate::model::{ModelParams, UnitCell, VariationalState, POLE_SIN_TOL};

/// Per-site variance pieces and leakage.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceReport {
    pub var_zz: f64,
    pub var_zxxz: f64,
    pub var_xx: f64,
    /// `⟨H²⟩_c` per site.
    pub total: f64,
    /// `Γ²` from the closed form.
    pub gamma2: f64,
    /// `Γ²` from the raw definition.
    pub gamma2_raw: f64,
    /// The seven summands of the closed form, each divided by K.
    /// At large `J` entries 5 and 6 are huge and cancel; `gamma2` does not
    /// rely on their sum.
    pub gamma2_breakdown: [f64; 7],
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn quad(m: &nalgebra::DMatrix<f64>, a: &[f64], b: &[f64]) -> f64 {
    let va = DVector::from_column_slice(a);
    let vb = DVector::from_column_slice(b);
    va.dot(&(m * vb))
}

/// Variance pieces per unit cell: (ZZ, ZX + XZ, XX).
pub(crate) fn variance_parts(cell: &UnitCell, gram: &GramBundle, res: &Residuals) -> (f64, f64, f64) {
    let k = cell.k;
    let j = cell.j;
    let re_pp = gram.g_pp.map(|v| v.re);
    let d: Vec<f64> = cell.delta.iter().map(|v| v / j).collect();
    let h: Vec<f64> = (0..k)
        .map(|i| cell.omega[i] * cell.h_x(i as isize) / (j * cell.cd[i]))
        .collect();
    let zz = quad(&re_pp, &d, &d);
    let zx = 2.0 * quad(&re_pp, &d, &h) + 2.0 * dot(&d, &res.i_phi);
    let mut xx = quad(&re_pp, &h, &h);
    xx += nn_term(cell) + self_term(cell);
    (zz, zx, xx)
}

/// Nearest-neighbour `XX` correction from the dressed operator.
fn nn_term(cell: &UnitCell) -> f64 {
    (0..cell.k)
        .map(|i| {
            let ii = i as isize;
            let (n, nn) = (cell.idx(ii + 1), cell.idx(ii + 2));
            2.0 * cell.omega[i]
                * cell.omega[n]
                * cell.eta[i]
                * cell.w[i]
                * cell.x[n]
                * cell.x[nn]
                * cell.t[i]
                * cell.t[n]
                * (cell.phi[n] - cell.phi[i]).cos()
        })
        .sum()
}

/// On-site `XX` term, `Σ η_i Ω_i² B_i / 2J`.
fn self_term(cell: &UnitCell) -> f64 {
    let j = cell.j;
    (0..cell.k)
        .map(|i| {
            let n = cell.idx(i as isize + 1);
            let (s, c, cp) = (cell.sin[i], cell.cos[i], cell.phi[i].cos());
            let h = cell.h_x(i as isize);
            let xn = cell.x[n];
            let b = 1.0
                + (2.0 * j - 1.0) * cp * cp * s * s
                + (-1.0 - 2.0 * j + (2.0 * j - 1.0) * c) * h * h / cell.cd[i]
                + cell.w[i]
                    * (xn - 1.0)
                    * (1.0 + xn + 2.0 * (2.0 * j - 1.0) * (2.0 * cell.phi[i]).cos() * cell.t[i] * cell.t[i]);
            cell.eta[i] * cell.omega[i] * cell.omega[i] / (2.0 * j) * b
        })
        .sum()
}

fn raw_gamma2(cell: &UnitCell, gram: &GramBundle, res: &Residuals, vel: &Velocity, var_cell: f64) -> f64 {
    let dh = hamiltonian_derivative(cell, gram, res);
    let u = &vel.theta_dot;
    let p = &vel.phi_dot;
    let re = |m: &nalgebra::DMatrix<num_complex::Complex64>| m.map(|v| v.re);
    let val = var_cell - 2.0 * (dot(u, &dh.im_theta) + dot(p, &dh.im_phi))
        + quad(&re(&gram.g_tt), u, u)
        + quad(&re(&gram.g_pp), p, p)
        + quad(&re(&gram.g_tp), u, p)
        + quad(&re(&gram.g_pt), p, u);
    val / cell.k as f64
}

/// Seven-term closed form; returns (stable total, raw summands), both
/// already divided by K.
fn closed_gamma2(cell: &UnitCell, res: &Residuals) -> Result<(f64, [f64; 7])> {
    let k = cell.k;
    let j = cell.j;
    let parts = inverse_parts(cell)?;
    let inv = parts.assemble(cell);
    let u = inv.transpose() * DVector::from_column_slice(&res.r_phi);
    let m = &parts.m * DVector::from_column_slice(&res.r_theta);
    let v: Vec<f64> = (0..k).map(|i| parts.diag[i] * res.r_theta[i] + cell.w[i] * m[i]).collect();

    let mut t = [0.0; 7];
    let mut t56 = 0.0;
    t[0] = nn_term(cell);
    t[1] = self_term(cell);
    for i in 0..k {
        let n = cell.idx(i as isize + 1);
        let (eta, eta1, s) = (cell.eta[i], cell.eta[n], cell.sin[i]);
        t[2] += -2.0 * u[i] * res.i_theta[i];
        t[3] += -2.0 * (cell.omega[i] * cell.h_x(i as isize) / (j * cell.cd[i]) * res.i_phi[i] - v[i] * res.i_phi[i]);
        t[4] += eta * j / 2.0 * u[i] * u[i];
        let g = cell.eta_c[i] * cell.ct[i] - eta1;
        let t5 = 2.0 * v[i] * (-eta1 * s / cell.w[i]) * res.r_theta[i];
        let t6 = eta * j * s * s / (2.0 * cell.w[i]) * g * v[i] * v[i];
        t[5] += t5;
        t[6] += t6;
        if cell.retain_beta {
            // −η_{i+1} − (1 − η_i)c̃_i = −x_i² κ_i, so the 1/x_i² cancels.
            let kappa = eta + cell.eta_c[i] * (1.0 + 2.0 * j * cell.t[i] * cell.t[i]);
            let a = eta * j * s / 2.0;
            t56 += s * v[i] * (-kappa * res.r_theta[i] + a * g * m[i]);
        } else {
            t56 += t5 + t6;
        }
    }
    let kf = k as f64;
    let total = (t[0] + t[1] + t[2] + t[3] + t[4] + t56) / kf;
    for e in t.iter_mut() {
        *e /= kf;
    }
    Ok((total, t))
}

/// Variance pieces and leakage from precomputed cell data.
pub fn report_from_cell(cell: &UnitCell) -> Result<VarianceReport> {
    let gram = gram_blocks(cell);
    let res = residuals(cell);
    let vel = eom_from_cell(cell)?;
    let (zz, zx, xx) = variance_parts(cell, &gram, &res);
    let var_cell = zz + zx + xx;
    let kf = cell.k as f64;
    let (gamma2, breakdown) = closed_gamma2(cell, &res)?;
    let gamma2_raw = raw_gamma2(cell, &gram, &res, &vel, var_cell);
    let r = VarianceReport {
        var_zz: zz / kf,
        var_zxxz: zx / kf,
        var_xx: xx / kf,
        total: var_cell / kf,
        gamma2,
        gamma2_raw,
        gamma2_breakdown: breakdown,
    };
    if !r.gamma2.is_finite() || !r.total.is_finite() {
        return Err(Error::NonFinite("leakage"));
    }
    Ok(r)
}

/// Variance only; `gamma2` fields are left at zero.
pub fn energy_variance(params: &ModelParams, state: &VariationalState) -> Result<VarianceReport> {
    let cell = UnitCell::new(params, state)?;
    cell.check_poles()?;
    let gram = gram_blocks(&cell);
    let res = residuals(&cell);
    let (zz, zx, xx) = variance_parts(&cell, &gram, &res);
    let kf = cell.k as f64;
    Ok(VarianceReport {
        var_zz: zz / kf,
        var_zxxz: zx / kf,
        var_xx: xx / kf,
        total: (zz + zx + xx) / kf,
        gamma2: 0.0,
        gamma2_raw: 0.0,
        gamma2_breakdown: [0.0; 7],
    })
}

/// Full variance report including `Γ²`.
pub fn leakage_rate(params: &ModelParams, state: &VariationalState) -> Result<VarianceReport> {
    report_from_cell(&UnitCell::new(params, state)?)
}

/// Compact spin-1/2 leakage,
/// `Γ² = (1/K) Σ Ω_i² sin²(θ_i/2) sin²(θ_{i+1}/2) η_i(1 − η_i)/η_{i+1}`.
pub fn leakage_spin_half(params: &ModelParams, state: &VariationalState) -> Result<f64> {
    if params.two_j() != 1 {
        return Err(Error::WrongSpin { expected: 0.5, got: params.spin });
    }
    let cell = UnitCell::new(params, state)?;
    let k = cell.k;
    let sum: f64 = (0..k)
        .map(|i| {
            let n = cell.idx(i as isize + 1);
            let a = (0.5 * cell.theta[i]).sin();
            let b = (0.5 * cell.theta[n]).sin();
            cell.omega[i] * cell.omega[i] * a * a * b * b * cell.eta[i] * cell.eta_c[i] / cell.eta[n]
        })
        .sum();
    Ok(sum / k as f64)
}

/// Large-`J` limit, `Γ² → (1/K) Σ Ω_i² η_i(2η_i − 1) cos²φ_i / 2J`.
pub fn leakage_large_j(params: &ModelParams, state: &VariationalState) -> Result<f64> {
    let cell = UnitCell::new(params, state)?;
    for i in 0..cell.k {
        if cell.sin[i].abs() < POLE_SIN_TOL {
            return Err(Error::Pole { site: i, theta: cell.theta[i], sin: cell.sin[i] });
        }
    }
    let sum: f64 = (0..cell.k)
        .map(|i| {
            let c = cell.phi[i].cos();
            cell.omega[i] * cell.omega[i] * cell.eta[i] * (2.0 * cell.eta[i] - 1.0) * c * c / (2.0 * cell.j)
        })
        .sum();
    Ok(sum / cell.k as f64)
}

/// `S_i` exposed for the variance identities in tests.
pub fn precession_vector(params: &ModelParams, state: &VariationalState) -> Result<Vec<f64>> {
    Ok(precession(&UnitCell::new(params, state)?))
}
