//! Spin coherent states `|θ,φ⟩ = e^{ξS⁺ − ξ*S⁻}|J,−J⟩` with `ξ = (θ/2)e^{−iφ}`,
//! and the closed-form matrix elements the transfer matrices need.
//!
//! Spin operators are normalized, `s^α = S^α/J`. Every operator `O` is
//! described by four numbers, `⟨Ω|O|Ω⟩`, `⟨0|O|Ω⟩`, `⟨Ω|O|0⟩` and `⟨0|O|0⟩`,
//! where `|0⟩ = |J,−J⟩` is the blockaded (unexcited) level.
//!
//! The derivative of a coherent state along a direction `μ` is generated by
//! an operator diagonal in the `s^z` basis:
//! `∂_μ|Ω⟩ = B_μ|Ω⟩` with `B_μ = J(cot θ ∂θ − i∂φ) + J(∂θ/sin θ − i∂φ) s^z`.

use num_complex::Complex64;

type C = Complex64;

const I: C = C::new(0.0, 1.0);

/// `sqrt(binom(n, k))`, built multiplicatively so it never overflows for the
/// spins used here.
pub fn sqrt_binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    let mut b = 1.0f64;
    for i in 0..k {
        b = b * (n - i) as f64 / (i + 1) as f64;
    }
    b.sqrt()
}

/// Coefficients `c_n` of `|θ,φ⟩` on the Dicke states `|J, −J+n⟩`, `n = 0..=2J`.
///
/// `c_n = sqrt(binom(2J,n)) sin^n(θ/2) cos^{2J−n}(θ/2) e^{−inφ}`.
pub fn coherent_coefficients(theta: f64, phi: f64, two_j: u32) -> Vec<C> {
    let (s, c) = (0.5 * theta).sin_cos();
    (0..=two_j)
        .map(|n| {
            let mag = sqrt_binomial(two_j, n) * s.powi(n as i32) * c.powi((two_j - n) as i32);
            C::from_polar(1.0, -(n as f64) * phi) * mag
        })
        .collect()
}

/// `(∂θ c_n, ∂φ c_n)`.
pub fn coherent_derivatives(theta: f64, phi: f64, two_j: u32) -> (Vec<C>, Vec<C>) {
    let (s, c) = (0.5 * theta).sin_cos();
    let n_tot = two_j as i32;
    let mut dt = Vec::with_capacity(two_j as usize + 1);
    let mut dp = Vec::with_capacity(two_j as usize + 1);
    for n in 0..=n_tot {
        let ph = C::from_polar(1.0, -(n as f64) * phi);
        let sb = sqrt_binomial(two_j, n as u32);
        let mut v = 0.0;
        if n > 0 {
            v += 0.5 * n as f64 * s.powi(n - 1) * c.powi(n_tot - n + 1);
        }
        if n < n_tot {
            v -= 0.5 * (n_tot - n) as f64 * s.powi(n + 1) * c.powi(n_tot - n - 1);
        }
        dt.push(ph * (sb * v));
        let cn = ph * (sb * s.powi(n) * c.powi(n_tot - n));
        dp.push(-I * n as f64 * cn);
    }
    (dt, dp)
}

/// A tangent direction `(∂θ, ∂φ)` in the angles of one site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    pub dtheta: f64,
    pub dphi: f64,
}

impl Direction {
    pub const THETA: Direction = Direction { dtheta: 1.0, dphi: 0.0 };
    pub const PHI: Direction = Direction { dtheta: 0.0, dphi: 1.0 };

    pub fn new(dtheta: f64, dphi: f64) -> Self {
        Self { dtheta, dphi }
    }
}

/// `B_μ = scalar + zcoef · s^z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BmuCoefficients {
    pub scalar: C,
    pub zcoef: C,
}

impl BmuCoefficients {
    pub fn new(theta: f64, j: f64, dir: Direction) -> Self {
        let (s, c) = theta.sin_cos();
        Self {
            scalar: C::new(j * c / s * dir.dtheta, -j * dir.dphi),
            zcoef: C::new(j * dir.dtheta / s, -j * dir.dphi),
        }
    }

    /// `⟨0|B_μ|0⟩`, its eigenvalue on the unexcited level.
    pub fn ground(&self) -> C {
        self.scalar - self.zcoef
    }
}

/// The four matrix elements of one operator between `|Ω⟩` and `|0⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Triple {
    /// `⟨Ω|O|Ω⟩`
    pub omega: C,
    /// `⟨0|O|Ω⟩`
    pub zero_omega: C,
    /// `⟨Ω|O|0⟩`
    pub omega_zero: C,
    /// `⟨0|O|0⟩`
    pub zero: C,
}

impl Triple {
    fn new(omega: C, zero_omega: C, omega_zero: C, zero: C) -> Self {
        Self { omega, zero_omega, omega_zero, zero }
    }

    fn hermitian(omega: C, zero_omega: C, zero: C) -> Self {
        Self::new(omega, zero_omega, zero_omega.conj(), zero)
    }

    /// Elements of `O†`.
    pub fn adjoint(&self) -> Self {
        Self::new(self.omega.conj(), self.omega_zero.conj(), self.zero_omega.conj(), self.zero.conj())
    }
}

/// Operator names of the expectation tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Observable {
    Identity,
    P,
    Sz,
    SPlus,
    SMinus,
    Sx,
    Bmu,
    SxSx,
    SxSz,
    SzSx,
    SzSz,
    SxBmu,
    SzBmu,
    BdagB,
}

impl Observable {
    pub const ALL: [Observable; 14] = [
        Observable::Identity,
        Observable::P,
        Observable::Sz,
        Observable::SPlus,
        Observable::SMinus,
        Observable::Sx,
        Observable::Bmu,
        Observable::SxSx,
        Observable::SxSz,
        Observable::SzSx,
        Observable::SzSz,
        Observable::SxBmu,
        Observable::SzBmu,
        Observable::BdagB,
    ];
}

/// All table entries at one site for one derivative direction.
#[derive(Debug, Clone)]
pub struct ExpectationBundle {
    entries: [Triple; 14],
    pub x: f64,
    pub bmu: BmuCoefficients,
}

impl ExpectationBundle {
    pub fn get(&self, op: Observable) -> Triple {
        let i = Observable::ALL.iter().position(|&o| o == op).unwrap();
        self.entries[i]
    }
}

/// `⟨Ω|B_μ†B_ν|Ω⟩` and friends for two independent directions.
pub fn bdag_b(theta: f64, phi: f64, two_j: u32, mu: Direction, nu: Direction) -> Triple {
    let j = 0.5 * two_j as f64;
    let (s, c) = theta.sin_cos();
    let t = (0.5 * theta).tan();
    let x = (0.5 * theta).cos().powi(two_j as i32);
    let _ = phi;
    let omega = C::new(j / 2.0 * mu.dtheta * nu.dtheta, 0.0)
        - I * (j * s / 2.0) * mu.dtheta * nu.dphi
        + I * (j * s / 2.0) * mu.dphi * nu.dtheta
        + C::new(
            j * (1.0 + 6.0 * j - 8.0 * j * c + (2.0 * j - 1.0) * (2.0 * theta).cos()) / 4.0
                * mu.dphi
                * nu.dphi,
            0.0,
        );
    let zz = C::new(j * j * t * t * mu.dtheta * nu.dtheta, 0.0);
    Triple::new(omega, zz * x, zz * x, zz)
}

/// Tables of one- and two-operator expectation values in closed form.
pub fn expectations(theta: f64, phi: f64, two_j: u32, dir: Direction) -> ExpectationBundle {
    let j = 0.5 * two_j as f64;
    let (s, c) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let t = (0.5 * theta).tan();
    let x = (0.5 * theta).cos().powi(two_j as i32);
    let tau = C::from_polar(t, -phi);
    let eip = C::from_polar(1.0, phi);
    let one = C::new(1.0, 0.0);
    let re = |v: f64| C::new(v, 0.0);
    let b = BmuCoefficients::new(theta, j, dir);
    let b0 = b.ground();
    let (dt, dp) = (dir.dtheta, dir.dphi);

    let id = Triple::hermitian(one, re(x), one);
    let p = Triple::hermitian(re(x * x), re(x), one);
    let sz = Triple::hermitian(re(-c), re(-x), re(-1.0));
    let splus = Triple::new(eip * s, C::default(), (tau * 2.0 * x).conj(), C::default());
    let sminus = Triple::new(eip.conj() * s, tau * 2.0 * x, C::default(), C::default());
    let sx = Triple::hermitian(re(s * cp), tau * x, C::default());
    let bmu = Triple::new(I * j * (c - 1.0) * dp, re(-j * x * t * dt), b0 * x, re(-j * t * dt));
    let sxsx = Triple::hermitian(
        re((1.0 + (2.0 * j - 1.0) * cp * cp * s * s) / (2.0 * j)),
        tau * tau * ((2.0 * j - 1.0) / (2.0 * j) * x) + x / (2.0 * j),
        re(1.0 / (2.0 * j)),
    );
    let sxsz_omega = C::new((1.0 - 2.0 * j) * c * cp, -sp) * (s / (2.0 * j));
    let szsx_omega = C::new((1.0 - 2.0 * j) * c * cp, sp) * (s / (2.0 * j));
    let sxsz_zo = tau * ((1.0 - j) / j * x);
    let szsx_zo = -tau * x;
    let sxsz = Triple::new(sxsz_omega, sxsz_zo, szsx_zo.conj(), C::default());
    let szsx = Triple::new(szsx_omega, szsx_zo, sxsz_zo.conj(), C::default());
    let szsz = Triple::hermitian(re(((2.0 * j - 1.0) * c * c + 1.0) / (2.0 * j)), re(x), one);
    let sxb = Triple::new(
        C::new(c * cp, -sp) * (dt / 2.0)
            + C::new(-sp, cp * (-2.0 * j + (2.0 * j - 1.0) * c)) * (s * dp / 2.0),
        -I * tau * x * dp + tau * x * ((1.0 - j + j * c) / s * dt),
        b0 * x * tau.conj(),
        C::default(),
    );
    let szb = Triple::new(
        I * ((-1.0 + (2.0 * j - 1.0) * c) * (0.5 * theta).sin().powi(2) * dp) + s / 2.0 * dt,
        re(j * x * t * dt),
        -b0 * x,
        re(j * t * dt),
    );
    let bb = bdag_b(theta, phi, two_j, dir, dir);

    ExpectationBundle {
        entries: [id, p, sz, splus, sminus, sx, bmu, sxsx, sxsz, szsx, szsz, sxb, szb, bb],
        x,
        bmu: b,
    }
}

/// `h̃_q = x_i(−1 + x_{i+1})(⟨0|qQ|Ω⟩ + ⟨Ω|Qq|0⟩) + ⟨Ω|q|Ω⟩ − ⟨0|q|0⟩`
/// with `Q = 1 − |0⟩⟨0|`.
///
/// The single-site expectation in the uniform state is `⟨0|q|0⟩ + η_i h̃_q`.
pub fn h_tilde(bundle: &ExpectationBundle, op: Observable, x_i: f64, x_next: f64) -> C {
    let e = bundle.get(op);
    let x = bundle.x;
    let qq_zo = e.zero_omega - e.zero * x;
    let qq_oz = e.omega_zero - e.zero * x;
    (qq_zo + qq_oz) * (x_i * (x_next - 1.0)) + e.omega - e.zero
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spin_half_coefficients() {
        let c = coherent_coefficients(1.1, 0.4, 1);
        assert!((c[0] - C::new((0.55f64).cos(), 0.0)).norm() < 1e-15);
        assert!((c[1] - C::from_polar((0.55f64).sin(), -0.4)).norm() < 1e-15);
    }

    #[test]
    fn spin_one_equator() {
        let c = coherent_coefficients(std::f64::consts::FRAC_PI_2, 0.0, 2);
        assert!((c[0].re - 0.5).abs() < 1e-15);
        assert!((c[1].re - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((c[2].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn h_tilde_of_sz_is_one_minus_cos() {
        let b = expectations(0.9, 0.3, 3, Direction::THETA);
        let h = h_tilde(&b, Observable::Sz, b.x, 0.4);
        assert!((h - C::new(1.0 - 0.9f64.cos(), 0.0)).norm() < 1e-15);
    }
}
