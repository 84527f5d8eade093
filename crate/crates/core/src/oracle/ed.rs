//! Exact diagonalization in the blockade-constrained space at finite `L`
//! with periodic boundaries.
//!
//! Local levels are `n = 0..=2J` for `σ = −J + n`; `n = 0` is unexcited.
//! Words are encoded base `2J + 1`, most significant site first, so numeric
//! order is lexicographic order.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;

use super::dense::{coherent_tensors, SiteTensor};
use crate::dynamics::Velocity;
use crate::error::{Error, Result};
use crate::model::{ModelParams, VariationalState};

type C = Complex64;

pub const DEFAULT_DIM_CAP: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ConstrainedBasis {
    pub l: usize,
    pub two_j: u32,
    pub states: Vec<Vec<u8>>,
    codes: Vec<u128>,
}

impl ConstrainedBasis {
    pub fn dim(&self) -> usize {
        self.states.len()
    }

    fn encode(&self, w: &[u8]) -> u128 {
        let d = self.two_j as u128 + 1;
        w.iter().fold(0u128, |acc, &n| acc * d + n as u128)
    }

    /// Position of a word, if it satisfies the constraint.
    pub fn index_of(&self, w: &[u8]) -> Option<usize> {
        self.codes.binary_search(&self.encode(w)).ok()
    }
}

/// `tr(M^L)` with `M = [[1, 2J], [1, 0]]`.
pub fn constrained_dimension(l: usize, two_j: u32) -> u128 {
    let mut p = [[1u128, 0], [0, 1]];
    let m = [[1u128, two_j as u128], [1, 0]];
    for _ in 0..l {
        p = [
            [p[0][0] * m[0][0] + p[0][1] * m[1][0], p[0][0] * m[0][1] + p[0][1] * m[1][1]],
            [p[1][0] * m[0][0] + p[1][1] * m[1][0], p[1][0] * m[0][1] + p[1][1] * m[1][1]],
        ];
    }
    p[0][0] + p[1][1]
}

pub fn build_basis(l: usize, two_j: u32) -> Result<ConstrainedBasis> {
    build_basis_capped(l, two_j, DEFAULT_DIM_CAP)
}

pub fn build_basis_capped(l: usize, two_j: u32, cap: usize) -> Result<ConstrainedBasis> {
    if l < 3 {
        return Err(Error::SystemSize { l, k: 1 });
    }
    let dim = constrained_dimension(l, two_j);
    if dim > cap as u128 {
        return Err(Error::DimensionCap { dim: dim.min(usize::MAX as u128) as usize, cap });
    }
    let d = two_j as u8 + 1;
    if (l as f64) * (d as f64).log2() >= 127.0 {
        return Err(Error::DimensionCap { dim: dim as usize, cap });
    }
    let mut states = Vec::with_capacity(dim as usize);
    let mut word = vec![0u8; l];
    fn rec(pos: usize, d: u8, word: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        let l = word.len();
        if pos == l {
            if !(word[l - 1] > 0 && word[0] > 0) {
                out.push(word.clone());
            }
            return;
        }
        for n in 0..d {
            if n > 0 && pos > 0 && word[pos - 1] > 0 {
                break;
            }
            word[pos] = n;
            rec(pos + 1, d, word, out);
        }
        word[pos] = 0;
    }
    rec(0, d, &mut word, &mut states);
    let mut b = ConstrainedBasis { l, two_j, states, codes: vec![] };
    b.codes = b.states.iter().map(|w| b.encode(w)).collect();
    Ok(b)
}

/// Compressed sparse rows, real entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseHamiltonian {
    pub dim: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl SparseHamiltonian {
    pub fn apply(&self, v: &[C]) -> Vec<C> {
        (0..self.dim)
            .map(|r| {
                (self.row_ptr[r]..self.row_ptr[r + 1])
                    .map(|p| v[self.cols[p]] * self.vals[p])
                    .sum()
            })
            .collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for p in self.row_ptr[r]..self.row_ptr[r + 1] {
                m[(r, self.cols[p])] += self.vals[p];
            }
        }
        m
    }
}

fn check_size(basis: &ConstrainedBasis, params: &ModelParams) -> Result<()> {
    if basis.l % params.k != 0 {
        return Err(Error::SystemSize { l: basis.l, k: params.k });
    }
    if basis.two_j != params.two_j() {
        return Err(Error::WrongSpin { expected: params.spin, got: basis.two_j as f64 / 2.0 });
    }
    Ok(())
}

/// `H = Σ_i Ω_i P_{i−1} s^x_i P_{i+1} + Δ_i s^z_i`, parameters tiled with
/// period `K`.
pub fn build_hamiltonian(basis: &ConstrainedBasis, params: &ModelParams) -> Result<SparseHamiltonian> {
    check_size(basis, params)?;
    let l = basis.l;
    let k = params.k;
    let j = params.spin;
    let mut row_ptr = vec![0];
    let mut cols = vec![];
    let mut vals = vec![];
    let mut w2 = vec![0u8; l];
    for (r, w) in basis.states.iter().enumerate() {
        let mut diag = 0.0;
        let mut entries: Vec<(usize, f64)> = vec![];
        for i in 0..l {
            let n = w[i] as f64;
            let m = -j + n;
            diag += params.delta[i % k] * m / j;
            let (left, right) = (w[(i + l - 1) % l], w[(i + 1) % l]);
            if left != 0 || right != 0 {
                continue;
            }
            let om = params.omega[i % k];
            // s^x = (S⁺ + S⁻)/2J
            for (dn, amp) in [(1i32, (j * (j + 1.0) - m * (m + 1.0)).sqrt()), (-1, (j * (j + 1.0) - m * (m - 1.0)).sqrt())] {
                let nn = w[i] as i32 + dn;
                if nn < 0 || nn > basis.two_j as i32 || amp == 0.0 {
                    continue;
                }
                w2.copy_from_slice(w);
                w2[i] = nn as u8;
                let c = basis.index_of(&w2).expect("PXP term leaves the constrained space");
                entries.push((c, om * amp / (2.0 * j)));
            }
        }
        if diag != 0.0 {
            entries.push((r, diag));
        }
        entries.sort_by_key(|e| e.0);
        for (c, v) in entries {
            cols.push(c);
            vals.push(v);
        }
        row_ptr.push(cols.len());
    }
    Ok(SparseHamiltonian { dim: basis.dim(), row_ptr, cols, vals })
}

/// Amplitudes `tr(A^{σ_1} ⋯ A^{σ_L})` over the constrained basis (not
/// normalized).
pub fn mps_to_statevector(basis: &ConstrainedBasis, params: &ModelParams, state: &VariationalState) -> Result<Vec<C>> {
    check_size(basis, params)?;
    state.check(params)?;
    let tensors: Vec<SiteTensor> = (0..params.k)
        .map(|i| coherent_tensors(state.theta[i], state.phi[i], params.two_j()).0)
        .collect();
    Ok(basis.states.iter().map(|w| word_amplitude(w, &tensors)).collect())
}

/// Amplitude of an arbitrary word, constrained or not.
pub fn word_amplitude(word: &[u8], tensors: &[SiteTensor]) -> C {
    let k = tensors.len();
    word.iter()
        .enumerate()
        .fold(Matrix2::identity(), |acc, (i, &n)| acc * tensors[i % k][n as usize])
        .trace()
}

/// `d/dt` of the amplitudes along `velocity`, by the product rule.
fn tangent_vector(basis: &ConstrainedBasis, params: &ModelParams, state: &VariationalState, vel: &Velocity) -> Vec<C> {
    let k = params.k;
    let t: Vec<(SiteTensor, SiteTensor)> = (0..k)
        .map(|i| {
            let (a, dt, dp) = coherent_tensors(state.theta[i], state.phi[i], params.two_j());
            let (u, v) = (C::new(vel.theta_dot[i], 0.0), C::new(vel.phi_dot[i], 0.0));
            let d = dt.iter().zip(&dp).map(|(x, y)| x * u + y * v).collect();
            (a, d)
        })
        .collect();
    basis
        .states
        .iter()
        .map(|w| {
            let mut m = Matrix2::<C>::identity();
            let mut dm = Matrix2::<C>::zeros();
            for (i, &n) in w.iter().enumerate() {
                let (a, d) = (&t[i % k].0[n as usize], &t[i % k].1[n as usize]);
                dm = dm * a + m * d;
                m *= a;
            }
            dm.trace()
        })
        .collect()
}

fn inner(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Energy, variance and `Γ²` densities from exact contraction at finite `L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactReport {
    pub energy_density: f64,
    pub variance_density: f64,
    pub gamma2: f64,
    pub norm: f64,
}

/// `Γ² = (1/L)‖Q(Φ̇ + iHΦ)‖²` with `Φ = Ψ/‖Ψ‖` and `Q = 1 − |Φ⟩⟨Φ|`.
///
/// Projecting with `Q` fixes both the norm and the global phase, which is
/// the gauge choice where `⟨Φ|(∂_t + iH)|Φ⟩ = 0`.
pub fn exact_report(params: &ModelParams, state: &VariationalState, l: usize, velocity: &Velocity) -> Result<ExactReport> {
    let basis = build_basis(l, params.two_j())?;
    let h = build_hamiltonian(&basis, params)?;
    let psi = mps_to_statevector(&basis, params, state)?;
    let dpsi = tangent_vector(&basis, params, state, velocity);
    report_from_vectors(&h, &psi, &dpsi, l)
}

fn report_from_vectors(h: &SparseHamiltonian, psi: &[C], dpsi: &[C], l: usize) -> Result<ExactReport> {
    let n2 = inner(psi, psi).re;
    if !(n2 > 0.0) {
        return Err(Error::Degenerate { gap: 0.0 });
    }
    let s = 1.0 / n2.sqrt();
    let phi: Vec<C> = psi.iter().map(|v| v * s).collect();
    let hphi = h.apply(&phi);
    let e = inner(&phi, &hphi).re;
    let h2 = inner(&hphi, &hphi).re;
    let y: Vec<C> = dpsi.iter().zip(&hphi).map(|(d, hp)| d * s + C::new(0.0, 1.0) * hp).collect();
    let ov = inner(&phi, &y);
    let g: f64 = y.iter().zip(&phi).map(|(a, p)| (a - p * ov).norm_sqr()).sum();
    let lf = l as f64;
    Ok(ExactReport { energy_density: e / lf, variance_density: (h2 - e * e) / lf, gamma2: g / lf, norm: n2 })
}

/// Same as [`exact_report`] with the tangent from central differences of
/// step `h`; a cross-check on the analytic tangent.
pub fn exact_report_fd(
    params: &ModelParams,
    state: &VariationalState,
    l: usize,
    velocity: &Velocity,
    step: f64,
) -> Result<ExactReport> {
    let basis = build_basis(l, params.two_j())?;
    let h = build_hamiltonian(&basis, params)?;
    let psi = mps_to_statevector(&basis, params, state)?;
    let shift = |sgn: f64| {
        VariationalState::new(
            state.theta.iter().zip(&velocity.theta_dot).map(|(a, b)| a + sgn * step * b).collect(),
            state.phi.iter().zip(&velocity.phi_dot).map(|(a, b)| a + sgn * step * b).collect(),
        )
    };
    let p = mps_to_statevector(&basis, params, &shift(1.0))?;
    let m = mps_to_statevector(&basis, params, &shift(-1.0))?;
    let dpsi: Vec<C> = p.iter().zip(&m).map(|(a, b)| (a - b) / (2.0 * step)).collect();
    report_from_vectors(&h, &psi, &dpsi, l)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_dimensions() {
        for (l, tj, d) in [(4, 1, 7), (6, 1, 18), (8, 1, 47), (4, 2, 17)] {
            let b = build_basis(l, tj).unwrap();
            assert_eq!(b.dim(), d);
            assert_eq!(constrained_dimension(l, tj), d as u128);
            assert!(b.states.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn hamiltonian_is_symmetric() {
        let b = build_basis(6, 2).unwrap();
        let p = ModelParams::new(1.0, vec![1.0, 0.7], vec![0.3, -0.2]).unwrap();
        let h = build_hamiltonian(&b, &p).unwrap().to_dense();
        assert_eq!((&h - h.transpose()).amax(), 0.0);
    }
}
