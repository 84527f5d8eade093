//! Parameter and state records, plus the per-site quantities every other
//! module is built from.
//!
//! The ansatz is a bond-dimension-2 MPS whose site tensors are spin coherent
//! states `|θ_i, φ_i⟩` with a blockade channel, repeated with period `K`.
//! Everything downstream is expressed through
//!
//! * `x_i = cos^{2J}(θ_i/2)`, the overlap of the coherent state with `|J,−J⟩`,
//! * `η_i`, the first entry of the dominant left eigenvector of the cell
//!   transfer matrix,
//! * `c̃_i = −1 + (2J tan²(θ_i/2) + 1) x_i²`, the decay factor of the Gram
//!   inverse.
//!
//! Sums that nearly cancel at large `J` (the cell gap `1 − β_[1,K]` for even
//! `K`, and `1 + α`) are accumulated as sums of non-negative terms, so `η`
//! stays accurate even when `x_i²` is far below machine epsilon.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `|sin θ|` below this is treated as a pole of the equations of motion.
pub const POLE_SIN_TOL: f64 = 1e-9;
/// `1 − cos θ` below this is treated as a pole of the equations of motion.
pub const POLE_CD_TOL: f64 = 1e-12;
/// `|1 − ∏ c̃|` below this makes the Gram inverse resonant.
pub const RESONANCE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    /// Unit-cell length.
    pub k: usize,
    /// Spin; `2J` must be a positive integer.
    pub spin: f64,
    pub omega: Vec<f64>,
    pub delta: Vec<f64>,
    /// Keep the `1/(1 − β_[1,K])` factors (exact thermodynamic limit).
    /// `false` drops them, as if the cell were long.
    pub retain_beta: bool,
}

impl ModelParams {
    pub fn new(spin: f64, omega: Vec<f64>, delta: Vec<f64>) -> Result<Self> {
        let p = Self {
            k: omega.len(),
            spin,
            omega,
            delta,
            retain_beta: true,
        };
        p.validate()?;
        Ok(p)
    }

    /// Same Ω and Δ on every site.
    pub fn uniform(k: usize, spin: f64, omega: f64, delta: f64) -> Result<Self> {
        Self::new(spin, vec![omega; k], vec![delta; k])
    }

    pub fn with_retain_beta(mut self, retain: bool) -> Self {
        self.retain_beta = retain;
        self
    }

    /// `2J` as an integer. Only meaningful after [`validate`](Self::validate).
    pub fn two_j(&self) -> u32 {
        (2.0 * self.spin).round() as u32
    }

    pub fn is_half_integer(&self) -> bool {
        self.two_j() % 2 == 1
    }

    /// Angle period of the dynamics: 2π for integer J, 4π for half-integer J.
    pub fn theta_period(&self) -> f64 {
        if self.is_half_integer() {
            4.0 * PI
        } else {
            2.0 * PI
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidParams("K must be at least 1".into()));
        }
        if !self.spin.is_finite() || self.spin <= 0.0 {
            return Err(Error::InvalidParams(format!("J = {} must be positive", self.spin)));
        }
        let tj = 2.0 * self.spin;
        if (tj - tj.round()).abs() > 1e-12 {
            return Err(Error::InvalidParams(format!(
                "J = {} is not a half-integer (2J must be an integer)",
                self.spin
            )));
        }
        if self.omega.len() != self.k {
            return Err(Error::InvalidParams(format!(
                "Omega has {} entries, expected K = {}",
                self.omega.len(),
                self.k
            )));
        }
        if self.delta.len() != self.k {
            return Err(Error::InvalidParams(format!(
                "Delta has {} entries, expected K = {}",
                self.delta.len(),
                self.k
            )));
        }
        if let Some(i) = self.omega.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParams(format!("Omega[{i}] is not finite")));
        }
        if let Some(i) = self.delta.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParams(format!("Delta[{i}] is not finite")));
        }
        Ok(())
    }
}

/// Free function form of [`ModelParams::validate`].
pub fn validate(params: &ModelParams) -> Result<()> {
    params.validate()
}

/// One point of the variational phase space: angles for a single unit cell.
#[derive(Debug, Clone, PartialEq)]
pub struct VariationalState {
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
}

impl VariationalState {
    pub fn new(theta: Vec<f64>, phi: Vec<f64>) -> Self {
        Self { theta, phi }
    }

    pub fn k(&self) -> usize {
        self.theta.len()
    }

    pub fn check(&self, params: &ModelParams) -> Result<()> {
        if self.theta.len() != params.k {
            return Err(Error::StateLength { expected: params.k, got: self.theta.len() });
        }
        if self.phi.len() != params.k {
            return Err(Error::StateLength { expected: params.k, got: self.phi.len() });
        }
        for i in 0..params.k {
            if !self.theta[i].is_finite() || !self.phi[i].is_finite() {
                return Err(Error::NonFiniteAngle { site: i });
            }
        }
        Ok(())
    }

    /// Shift every site index by `s` (site `i` of the result is site `i + s`).
    pub fn rotated(&self, s: usize) -> Self {
        let mut theta = self.theta.clone();
        let mut phi = self.phi.clone();
        theta.rotate_left(s % self.k().max(1));
        phi.rotate_left(s % self.k().max(1));
        Self { theta, phi }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedSite {
    pub x: f64,
    /// `tan(θ/2) e^{−iφ}`.
    pub tau: Complex64,
    pub eta: f64,
    pub ctilde: f64,
}

/// Per-site quantities for every module.
pub fn derive_sites(params: &ModelParams, state: &VariationalState) -> Result<Vec<DerivedSite>> {
    let c = UnitCell::new(params, state)?;
    Ok((0..c.k)
        .map(|i| DerivedSite {
            x: c.x[i],
            tau: Complex64::from_polar(c.t[i], -c.phi[i]),
            eta: c.eta[i],
            ctilde: c.ct[i],
        })
        .collect())
}

/// Cached trigonometry and transfer-matrix data of one unit cell.
///
/// All index arguments are taken modulo `K`.
#[derive(Debug, Clone)]
pub struct UnitCell {
    pub k: usize,
    pub two_j: u32,
    pub j: f64,
    pub retain_beta: bool,
    /// θ reduced to `[0, period)`.
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    pub omega: Vec<f64>,
    pub delta: Vec<f64>,
    pub sin: Vec<f64>,
    pub cos: Vec<f64>,
    /// `1 − cos θ`.
    pub cd: Vec<f64>,
    /// `tan(θ/2)`.
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    /// `x²`.
    pub w: Vec<f64>,
    /// `cos^{4J−2}(θ/2)`.
    pub y: Vec<f64>,
    pub eta: Vec<f64>,
    /// `1 − η`, computed without cancellation.
    pub eta_c: Vec<f64>,
    /// `c̃ = −1 + ω`.
    pub ct: Vec<f64>,
    /// `ω = (2J tan²(θ/2) + 1) x²`.
    pub om: Vec<f64>,
    /// `1 − β_[1,K]`, or 1 when β is dropped.
    pub gap: f64,
    /// `1 − ∏ c̃` over the cell, or 1 when β is dropped.
    pub ct_gap: f64,
}

/// `1 − ∏_k (−1 + a_k)` accumulated as a sum of terms that are non-negative
/// whenever every `a_k ∈ [0, 1]`.
fn one_minus_signed_product(a: impl Iterator<Item = f64>) -> f64 {
    let mut p = 1.0; // ∏ (1 − a)
    let mut q = 0.0; // 1 − p
    let mut n = 0usize;
    for ak in a {
        q += ak * p;
        p *= 1.0 - ak;
        n += 1;
    }
    if n % 2 == 0 {
        q
    } else {
        1.0 + p
    }
}

impl UnitCell {
    pub fn new(params: &ModelParams, state: &VariationalState) -> Result<Self> {
        params.validate()?;
        state.check(params)?;
        let k = params.k;
        let two_j = params.two_j();
        let j = 0.5 * two_j as f64;
        let period = params.theta_period();

        let mut cell = Self {
            k,
            two_j,
            j,
            retain_beta: params.retain_beta,
            theta: vec![0.0; k],
            phi: state.phi.clone(),
            omega: params.omega.clone(),
            delta: params.delta.clone(),
            sin: vec![0.0; k],
            cos: vec![0.0; k],
            cd: vec![0.0; k],
            t: vec![0.0; k],
            x: vec![0.0; k],
            w: vec![0.0; k],
            y: vec![0.0; k],
            eta: vec![0.0; k],
            eta_c: vec![0.0; k],
            ct: vec![0.0; k],
            om: vec![0.0; k],
            gap: 1.0,
            ct_gap: 1.0,
        };

        for i in 0..k {
            let th = state.theta[i].rem_euclid(period);
            let (sh, ch) = (0.5 * th).sin_cos();
            cell.theta[i] = th;
            cell.sin[i] = th.sin();
            cell.cos[i] = th.cos();
            cell.cd[i] = 2.0 * sh * sh;
            cell.t[i] = sh / ch;
            cell.x[i] = ch.powi(two_j as i32);
            cell.w[i] = cell.x[i] * cell.x[i];
            cell.y[i] = ch.powi(2 * two_j as i32 - 2);
            if two_j == 1 {
                // (tan² + 1) cos² = 1 identically
                cell.om[i] = 1.0;
                cell.ct[i] = 0.0;
            } else {
                cell.om[i] = cell.w[i] + 2.0 * j * sh * sh * cell.y[i];
                cell.ct[i] = cell.om[i] - 1.0;
            }
        }

        let all_at_pi = cell.theta.iter().all(|&th| {
            let r = th.rem_euclid(2.0 * PI);
            (r - PI).abs() < 1e-12
        });

        if params.retain_beta {
            cell.gap = one_minus_signed_product(cell.w.iter().copied());
            cell.ct_gap = one_minus_signed_product(cell.om.iter().copied());
        }
        if all_at_pi || !(cell.gap > 0.0) || !cell.gap.is_finite() {
            return Err(Error::Degenerate { gap: cell.gap });
        }

        // 1 + α_[i,i+K−1] by u ← 1 + z u with z = −1 + w, tracked together
        // with its complement so no step subtracts nearly equal numbers.
        for i in 0..k {
            let (mut u, mut v) = (1.0, 0.0);
            for m in 1..k {
                let wk = cell.w[(i + m) % k];
                let nu = v + wk * u;
                v = (1.0 - wk) * u;
                u = nu;
            }
            cell.eta[i] = u / cell.gap;
            if !params.retain_beta {
                cell.eta_c[i] = v;
            }
        }
        if params.retain_beta {
            for i in 0..k {
                let im = (i + k - 1) % k;
                cell.eta_c[i] = (1.0 - cell.w[im]) * cell.eta[im];
            }
        }
        if cell.eta.iter().any(|e| !e.is_finite()) {
            return Err(Error::Degenerate { gap: cell.gap });
        }
        Ok(cell)
    }

    #[inline]
    pub fn idx(&self, i: isize) -> usize {
        i.rem_euclid(self.k as isize) as usize
    }

    #[inline]
    pub fn z(&self, i: isize) -> f64 {
        self.w[self.idx(i)] - 1.0
    }

    /// `β_[a,b] = ∏_{m=a}^{b} (−1 + x_m²)`; the empty product (b < a) is 1.
    pub fn beta(&self, a: isize, b: isize) -> f64 {
        let mut p = 1.0;
        let mut m = a;
        while m <= b {
            p *= self.z(m);
            m += 1;
        }
        p
    }

    /// `∏_{m=a}^{b} c̃_m`; the empty product is 1.
    pub fn ct_prod(&self, a: isize, b: isize) -> f64 {
        let mut p = 1.0;
        let mut m = a;
        while m <= b {
            p *= self.ct[self.idx(m)];
            m += 1;
        }
        p
    }

    /// `β_[1,K]` in the convention of the current mode (0 when dropped).
    pub fn beta_cell(&self) -> f64 {
        if self.retain_beta {
            self.beta(0, self.k as isize - 1)
        } else {
            0.0
        }
    }

    /// `h̃` of `s^x` at site `i`.
    pub fn h_x(&self, i: isize) -> f64 {
        let a = self.idx(i);
        let b = self.idx(i + 1);
        self.phi[a].cos() * (self.sin[a] + 2.0 * self.w[a] * (self.x[b] - 1.0) * self.t[a])
    }

    pub fn check_poles(&self) -> Result<()> {
        for i in 0..self.k {
            if self.sin[i].abs() < POLE_SIN_TOL || self.cd[i] < POLE_CD_TOL {
                return Err(Error::Pole { site: i, theta: self.theta[i], sin: self.sin[i] });
            }
        }
        Ok(())
    }

    pub fn check_resonance(&self) -> Result<()> {
        if self.ct_gap.abs() < RESONANCE_TOL || !self.ct_gap.is_finite() {
            return Err(Error::Resonance { gap: self.ct_gap });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_state_has_unit_eta() {
        let p = ModelParams::uniform(3, 1.5, 1.0, 0.2).unwrap();
        let s = VariationalState::new(vec![0.0; 3], vec![0.3; 3]);
        for d in derive_sites(&p, &s).unwrap() {
            assert!((d.x - 1.0).abs() < 1e-15);
            assert!((d.eta - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn single_site_spin_half_equator() {
        let p = ModelParams::uniform(1, 0.5, 1.0, 0.0).unwrap();
        let s = VariationalState::new(vec![PI / 2.0], vec![0.0]);
        let d = derive_sites(&p, &s).unwrap()[0];
        assert!((d.x - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((d.eta - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn validation_messages() {
        assert!(ModelParams::uniform(2, 0.5, 1.0, 1.0).is_ok());
        let e = ModelParams::uniform(2, 0.3, 1.0, 1.0).unwrap_err();
        assert!(e.to_string().contains("half-integer"));
        let e = ModelParams::new(0.5, vec![1.0; 3], vec![0.0; 2]).unwrap_err();
        assert!(e.to_string().contains("Delta has 2 entries, expected K = 3"));
    }

    #[test]
    fn all_pi_is_degenerate() {
        let p = ModelParams::uniform(2, 0.5, 1.0, 0.0).unwrap();
        let s = VariationalState::new(vec![PI; 2], vec![0.0; 2]);
        assert!(matches!(UnitCell::new(&p, &s), Err(Error::Degenerate { .. })));
    }

    #[test]
    fn eta_survives_tiny_overlaps() {
        // x² ~ 1e-46 at J = 200; the naive 1 − β would be exactly 0.
        let p = ModelParams::uniform(2, 200.0, 1.0, 0.0).unwrap();
        let s = VariationalState::new(vec![1.0, 1.3], vec![0.0; 2]);
        let c = UnitCell::new(&p, &s).unwrap();
        let expect = c.w[1] / (c.w[0] + c.w[1] - c.w[0] * c.w[1]);
        assert!((c.eta[0] / expect - 1.0).abs() < 1e-12);
        assert!((c.eta[0] + c.eta_c[0] - 1.0).abs() < 1e-15);
    }
}
