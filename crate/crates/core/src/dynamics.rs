//! Variational energy and the TDVP equations of motion
//! `Σ_j μ̇_j Im G^c_ij = −Re⟨∂_{μ_i}Ψ|H|Ψ⟩_c`.
//!
//! The right-hand side splits into a part proportional to `Im G_θφ` (which
//! the inverse turns into the bare precession `S_i`) and residuals
//! `R_θ`, `R_φ`. Solving gives
//!
//! ```text
//! θ̇ = (Im G_θφ)⁻ᵀ R_φ
//! φ̇ = S − (Im G_θφ)⁻¹ R_θ,   S_i = (Ω_i h̃_i + Δ_i(1 − cos θ_i)) / (J(1 − cos θ_i))
//! ```
//!
//! where `h̃_i` is the shorthand of the `s^x` expectation value.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::gram::{gram_blocks, inverse_im_g_thetaphi, GramBundle};
use crate::model::{ModelParams, UnitCell, VariationalState, POLE_SIN_TOL};

/// `θ̇` and `φ̇` of one unit cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Velocity {
    pub theta_dot: Vec<f64>,
    pub phi_dot: Vec<f64>,
}

impl Velocity {
    pub fn zeros(k: usize) -> Self {
        Self { theta_dot: vec![0.0; k], phi_dot: vec![0.0; k] }
    }

    pub fn max_abs_diff(&self, other: &Velocity) -> f64 {
        self.theta_dot
            .iter()
            .zip(&other.theta_dot)
            .chain(self.phi_dot.iter().zip(&other.phi_dot))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.theta_dot.iter().chain(&self.phi_dot).all(|v| v.is_finite())
    }
}

/// Residual terms per unit cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Residuals {
    pub r_theta: Vec<f64>,
    pub r_phi: Vec<f64>,
    pub i_theta: Vec<f64>,
    pub i_phi: Vec<f64>,
}

/// `sin θ_i + 2x_i²(−1 + x_{i+1}) tan(θ_i/2)`, so `h̃_i = cos φ_i` times this.
pub(crate) fn h_core(cell: &UnitCell, i: usize) -> f64 {
    let n = cell.idx(i as isize + 1);
    cell.sin[i] + 2.0 * cell.w[i] * (cell.x[n] - 1.0) * cell.t[i]
}

/// Cross-site pieces shared by `R_θ` and `I_θ` (the site `j − 1` terms).
pub(crate) fn cross_terms(cell: &UnitCell, j: usize) -> (f64, f64) {
    let m = cell.idx(j as isize - 1);
    let base = cell.j * cell.omega[m] * cell.t[j] * cell.w[m] * cell.t[m] * cell.x[j] * cell.eta[m];
    (-base * cell.phi[m].cos(), base * cell.phi[m].sin())
}

pub fn residuals(cell: &UnitCell) -> Residuals {
    let k = cell.k;
    let j2 = cell.j;
    let mut r = Residuals {
        r_theta: vec![0.0; k],
        r_phi: vec![0.0; k],
        i_theta: vec![0.0; k],
        i_phi: vec![0.0; k],
    };
    for j in 0..k {
        let n = cell.idx(j as isize + 1);
        let (eta, om) = (cell.eta[j], cell.omega[j]);
        let (sp, cp) = cell.phi[j].sin_cos();
        let hc = h_core(cell, j);
        let (cross_r, cross_i) = cross_terms(cell, j);
        r.r_phi[j] = -eta * om * sp * hc / 2.0;
        // x²/(2cos²(θ/2)) = cos^{4J−2}(θ/2)/2
        let bracket = 0.5
            + (cell.x[n] - 1.0)
                * (cell.w[j] * (1.0 - 2.0 * j2) + (4.0 * j2 - 1.0) * cell.y[j] / 2.0);
        r.r_theta[j] = cross_r - eta * om * cp * bracket;
        r.i_theta[j] = cross_i + eta * sp * om * hc / (2.0 * cell.sin[j]);
        r.i_phi[j] = -eta / 2.0
            * om
            * cp
            * (cell.sin[j]
                + (cell.cos[j] + 2.0 * j2 * cell.cd[j]) * 2.0 * cell.w[j] * (cell.x[n] - 1.0) * cell.t[j]);
    }
    r
}

/// Bare precession `S_i = (Ω_i h̃_i + Δ_i(1 − cos θ_i)) / (J(1 − cos θ_i))`.
pub fn precession(cell: &UnitCell) -> Vec<f64> {
    (0..cell.k)
        .map(|i| (cell.omega[i] * cell.h_x(i as isize) + cell.delta[i] * cell.cd[i]) / (cell.j * cell.cd[i]))
        .collect()
}

/// Energy per unit cell, `Σ_i [−Δ_i + η_i(Δ_i(1 − cos θ_i) + Ω_i h̃_i)]`.
pub fn energy_of_cell(cell: &UnitCell) -> f64 {
    (0..cell.k)
        .map(|i| -cell.delta[i] + cell.eta[i] * (cell.delta[i] * cell.cd[i] + cell.omega[i] * cell.h_x(i as isize)))
        .sum()
}

/// Energy per unit cell; divide by `K` for the per-site value.
pub fn variational_energy(params: &ModelParams, state: &VariationalState) -> Result<f64> {
    Ok(energy_of_cell(&UnitCell::new(params, state)?))
}

/// `⟨∂_μΨ|H|Ψ⟩_c` split into real and imaginary parts, per unit cell.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianDerivative {
    pub re_theta: Vec<f64>,
    pub im_theta: Vec<f64>,
    pub re_phi: Vec<f64>,
    pub im_phi: Vec<f64>,
}

pub fn hamiltonian_derivative(cell: &UnitCell, gram: &GramBundle, res: &Residuals) -> HamiltonianDerivative {
    let k = cell.k;
    let s = DVector::from_vec(precession(cell));
    let im_tp = gram.g_tp.map(|v| v.im);
    let re_pp = gram.g_pp.map(|v| v.re);
    let a = &im_tp * &s;
    let b = &re_pp * &s;
    HamiltonianDerivative {
        re_theta: (0..k).map(|i| res.r_theta[i] - a[i]).collect(),
        im_theta: res.i_theta.clone(),
        re_phi: res.r_phi.clone(),
        im_phi: (0..k).map(|i| b[i] + res.i_phi[i]).collect(),
    }
}

pub(crate) fn eom_from_cell(cell: &UnitCell) -> Result<Velocity> {
    let inv = inverse_im_g_thetaphi(cell)?;
    let res = residuals(cell);
    let rp = DVector::from_vec(res.r_phi);
    let rt = DVector::from_vec(res.r_theta);
    let thd = inv.transpose() * rp;
    let pd = &inv * rt;
    let s = precession(cell);
    let v = Velocity {
        theta_dot: thd.iter().copied().collect(),
        phi_dot: (0..cell.k).map(|i| s[i] - pd[i]).collect(),
    };
    if !v.is_finite() {
        return Err(Error::NonFinite("equations of motion"));
    }
    Ok(v)
}

/// Exact finite-`K` equations of motion from the closed-form Gram inverse.
pub fn eom_exact(params: &ModelParams, state: &VariationalState) -> Result<Velocity> {
    eom_from_cell(&UnitCell::new(params, state)?)
}

/// The residual `R̃_θ` in its compact form (equal to `−R_θ`).
pub fn r_theta_tilde(cell: &UnitCell, i: usize) -> f64 {
    let m = cell.idx(i as isize - 1);
    let n = cell.idx(i as isize + 1);
    let j = cell.j;
    cell.j * cell.omega[m] * cell.eta[m] * cell.x[i] * cell.t[i] * cell.w[m] * cell.t[m] * cell.phi[m].cos()
        + cell.eta[i] * cell.omega[i] / (2.0 * cell.sin[i])
            * (cell.h_x(i as isize)
                + 2.0 * cell.phi[i].cos() * (2.0 * j - 1.0) * cell.cd[i] * cell.w[i] * (cell.x[n] - 1.0) * cell.t[i])
}

/// Equations of motion as unrolled sums over sites with `∏ c̃` weights.
///
/// A sum stops once the running product drops below `trunc_eps`. If it
/// survives a whole period, the remaining periods are resummed with
/// `1/(1 − ∏_{cell} c̃)`.
pub fn eom_series(params: &ModelParams, state: &VariationalState, trunc_eps: f64) -> Result<Velocity> {
    let cell = UnitCell::new(params, state)?;
    cell.check_poles()?;
    let k = cell.k as isize;
    let cell_prod = if cell.retain_beta { cell.ct_prod(0, k - 1) } else { 0.0 };
    if cell.retain_beta && cell_prod.abs() >= 1.0 {
        return Err(Error::SeriesDivergence(cell_prod.abs()));
    }
    cell.check_resonance()?;
    let j = cell.j;
    let s = precession(&cell);
    let rt: Vec<f64> = (0..cell.k).map(|i| r_theta_tilde(&cell, i)).collect();
    // tan φ_j h̃_j = sin φ_j (sin θ_j + 2x_j²(−1 + x_{j+1}) tan(θ_j/2))
    let th: Vec<f64> = (0..cell.k).map(|i| cell.phi[i].sin() * h_core(&cell, i)).collect();

    let resum = |partial: f64, completed: bool| {
        if completed {
            partial / cell.ct_gap
        } else {
            partial
        }
    };

    let mut v = Velocity::zeros(cell.k);
    for i in 0..cell.k {
        let ii = i as isize;

        let mut acc = 0.0;
        let mut p = 1.0;
        let mut completed = true;
        for n in 1..=k {
            if n > 1 {
                p *= cell.ct[cell.idx(ii - n + 1)];
            }
            if p.abs() < trunc_eps {
                completed = false;
                break;
            }
            let jj = cell.idx(ii - n);
            acc += cell.eta[jj] * cell.omega[jj] * cell.y[jj] * th[jj] * cell.t[i] / cell.eta[i] * p;
        }
        v.theta_dot[i] = cell.omega[i] * th[i] / (j * cell.sin[i]) + resum(acc, completed);

        let mut acc = 0.0;
        let mut p = 1.0;
        let mut completed = true;
        for n in 1..=k {
            if n > 1 {
                p *= cell.ct[cell.idx(ii + n - 1)];
            }
            if p.abs() < trunc_eps {
                completed = false;
                break;
            }
            let jj = cell.idx(ii + n);
            acc += 2.0 * cell.y[i] * cell.t[jj] / cell.eta[jj] * rt[jj] * p;
        }
        v.phi_dot[i] = s[i] - 2.0 / (j * cell.eta[i] * cell.sin[i]) * rt[i] - resum(acc, completed);
    }
    if !v.is_finite() {
        return Err(Error::NonFinite("series equations of motion"));
    }
    Ok(v)
}

/// Compact spin-1/2 equations of motion.
pub fn eom_spin_half(params: &ModelParams, state: &VariationalState) -> Result<Velocity> {
    if params.two_j() != 1 {
        return Err(Error::WrongSpin { expected: 0.5, got: params.spin });
    }
    let cell = UnitCell::new(params, state)?;
    cell.check_poles()?;
    let mut v = Velocity::zeros(cell.k);
    let half = |i: usize| 0.5 * cell.theta[i];
    for i in 0..cell.k {
        let ii = i as isize;
        let (m, n, nn) = (cell.idx(ii - 1), cell.idx(ii + 1), cell.idx(ii + 2));
        let (om, omm, omn) = (cell.omega[i], cell.omega[m], cell.omega[n]);
        let (eta, etam, etan) = (cell.eta[i], cell.eta[m], cell.eta[n]);
        let (sp, cp) = cell.phi[i].sin_cos();
        v.theta_dot[i] = 2.0 * om * sp * half(n).cos()
            + omm * etam * half(i).sin() * cell.phi[m].sin() * cell.sin[m] / eta;
        v.phi_dot[i] = 2.0 * om * half(n).cos() * cp * cell.cos[i] / cell.sin[i] + 2.0 * cell.delta[i]
            - omm * cell.phi[m].cos() / half(i).cos() * cell.sin[m] * etam / (2.0 * eta)
            - om * cp * cell.sin[i] * half(n).sin() * eta * half(n).tan() / (2.0 * etan)
            - omn * half(nn).cos() * cell.phi[n].cos() * half(n).tan();
    }
    if !v.is_finite() {
        return Err(Error::NonFinite("spin-1/2 equations of motion"));
    }
    Ok(v)
}

/// Large-`J` limit: `Jθ̇ = Ω sin φ`, `Jφ̇ = Δ + Ω cos φ cot θ`.
pub fn eom_large_j(params: &ModelParams, state: &VariationalState) -> Result<Velocity> {
    params.validate()?;
    state.check(params)?;
    let j = params.spin;
    let mut v = Velocity::zeros(params.k);
    for i in 0..params.k {
        let (s, c) = state.theta[i].sin_cos();
        if s.abs() < POLE_SIN_TOL {
            return Err(Error::Pole { site: i, theta: state.theta[i], sin: s });
        }
        let (sp, cp) = state.phi[i].sin_cos();
        v.theta_dot[i] = params.omega[i] * sp / j;
        v.phi_dot[i] = (params.delta[i] + params.omega[i] * cp * c / s) / j;
    }
    Ok(v)
}

/// Gram blocks, residuals and velocity at one point, for callers that need
/// all of them.
pub struct Snapshot {
    pub cell: UnitCell,
    pub gram: GramBundle,
    pub residuals: Residuals,
    pub velocity: Velocity,
}

pub fn snapshot(params: &ModelParams, state: &VariationalState) -> Result<Snapshot> {
    let cell = UnitCell::new(params, state)?;
    let velocity = eom_from_cell(&cell)?;
    let gram = gram_blocks(&cell);
    let residuals = residuals(&cell);
    Ok(Snapshot { cell, gram, residuals, velocity })
}
