//! Transfer matrices of the uniform MPS.
//!
//! Site tensors are 2×2 in the bond index: `A^σ[0][0] = c_0`,
//! `A^σ[0][1] = c_σ` for excited levels and `A^σ[1][0] = δ_{σ,0}`, so an
//! excitation always forces the next site into the blockaded level.
//! With the convention `T = Σ_σ conj(A^σ) ⊗ A^σ` the site matrix is
//!
//! ```text
//!     [ x²  0  0  1−x² ]
//!     [ x   0  0  0    ]
//!     [ x   0  0  0    ]
//!     [ 1   0  0  0    ]
//! ```
//!
//! and any ordered product over a span keeps the same sparsity, fixed by two
//! scalars `α` and `β`.

use nalgebra::{Matrix4, RowVector4, Vector4};
use num_complex::Complex64;

use crate::model::UnitCell;
use crate::spin_coherent::Triple;

type C = Complex64;

pub type Mat4 = Matrix4<f64>;
pub type Mat4c = Matrix4<C>;

#[derive(Debug, Clone, PartialEq)]
pub struct TransferBlock {
    pub mat: Mat4,
    pub alpha: f64,
    pub beta: f64,
    /// First and last site of the span (inclusive).
    pub span: (isize, isize),
}

fn block_matrix(x_first: f64, alpha: f64, beta: f64) -> Mat4 {
    let a1 = 1.0 + alpha;
    Mat4::new(
        a1 + beta, 0.0, 0.0, -alpha - beta,
        x_first * a1, 0.0, 0.0, -x_first * alpha,
        x_first * a1, 0.0, 0.0, -x_first * alpha,
        a1, 0.0, 0.0, -alpha,
    )
}

pub fn site_transfer(x: f64) -> TransferBlock {
    block_transfer(&[x])
}

/// Closed-form `T_[1,n]` for overlaps `xs = (x_1, …, x_n)`.
///
/// `α` and `β` are built from running products of `(−1 + x²)` left to right:
/// `β ← β z_m` and `1 + α ← 1 + z_m (1 + α)`.
pub fn block_transfer(xs: &[f64]) -> TransferBlock {
    assert!(!xs.is_empty(), "empty span");
    let mut alpha = 0.0;
    let mut beta = xs[0] * xs[0] - 1.0;
    for &x in &xs[1..] {
        let z = x * x - 1.0;
        alpha = z * (1.0 + alpha);
        beta *= z;
    }
    TransferBlock {
        mat: block_matrix(xs[0], alpha, beta),
        alpha,
        beta,
        span: (0, xs.len() as isize - 1),
    }
}

/// `T_[i,j]` inside a periodic cell.
pub fn block_in_cell(cell: &UnitCell, i: isize, j: isize) -> TransferBlock {
    let xs: Vec<f64> = (i..=j).map(|m| cell.x[cell.idx(m)]).collect();
    let mut b = block_transfer(&xs);
    b.span = (i, j);
    b
}

/// The literal product `T_1 T_2 ⋯ T_n` of site matrices.
pub fn ordered_product(xs: &[f64]) -> Mat4 {
    xs.iter().fold(Mat4::identity(), |acc, &x| {
        let w = x * x;
        let t = Mat4::new(
            w, 0.0, 0.0, 1.0 - w,
            x, 0.0, 0.0, 0.0,
            x, 0.0, 0.0, 0.0,
            1.0, 0.0, 0.0, 0.0,
        );
        acc * t
    })
}

/// Dominant right and left eigenvectors of `T_[i,i+K−1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DominantPair {
    pub r: Vector4<f64>,
    pub l: RowVector4<f64>,
}

pub fn dominant_pair(cell: &UnitCell, i: isize) -> DominantPair {
    let a = cell.idx(i);
    let x = cell.x[a];
    DominantPair {
        r: Vector4::new(1.0, x, x, 1.0),
        l: RowVector4::new(cell.eta[a], 0.0, 0.0, cell.eta_c[a]),
    }
}

/// `(l_i T_[i,j], T_[i,j] r_{j+1})`; these should equal `l_{j+1}` and `r_i`.
pub fn reduction_check(
    l: &RowVector4<f64>,
    block: &TransferBlock,
    r_next: &Vector4<f64>,
) -> (RowVector4<f64>, Vector4<f64>) {
    (l * block.mat, block.mat * r_next)
}

/// Which side of the transfer matrix carries a derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeKind {
    /// `∂T = Σ conj(A) ⊗ ∂A` (use the elements of `B_μ`).
    Ket,
    /// `∂̄T = Σ conj(∂A) ⊗ A` (use the elements of `B_μ†`).
    Bra,
    /// `∂̄∂T = Σ conj(∂_μ A) ⊗ ∂_ν A` (use the elements of `B_μ†B_ν`).
    BraKet,
    /// `∂T_q = Σ conj(A) ⊗ q ∂A` (use the elements of `q B_μ`).
    KetOp,
}

fn sandwich(e: &Triple, x: f64) -> Mat4c {
    let z = C::default();
    let xx = C::new(x, 0.0);
    let zz = e.zero;
    let r0 = [
        zz * x * x,
        (e.zero_omega - zz * x) * x,
        (e.omega_zero - zz * x) * x,
        e.omega - e.zero_omega * x - e.omega_zero * x + zz * x * x,
    ];
    Mat4c::new(
        r0[0], r0[1], r0[2], r0[3],
        xx * zz, z, e.omega_zero - zz * x, z,
        zz * x, e.zero_omega - zz * x, z, z,
        zz, z, z, z,
    )
}

/// `T_q`, the site transfer matrix with `q` inserted between bra and ket.
pub fn operator_transfer(elements: &Triple, x: f64) -> Mat4c {
    sandwich(elements, x)
}

/// Decorated transfer matrices with a derivative on the bra, the ket or both.
///
/// `elements` are those of the operator acting on the ket:
/// `B_μ`, `B_μ†`, `B_μ†B_ν` or `q B_μ` for the four kinds.
pub fn derivative_transfer(kind: DerivativeKind, elements: &Triple, x: f64) -> Mat4c {
    let mut m = sandwich(elements, x);
    let keep: &[usize] = match kind {
        DerivativeKind::Ket | DerivativeKind::KetOp => &[0, 2],
        DerivativeKind::Bra => &[0, 1],
        DerivativeKind::BraKet => &[0],
    };
    for r in 0..4 {
        if !keep.contains(&r) {
            m.row_mut(r).fill(C::default());
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn site_matrix_at_half() {
        let b = site_transfer(0.5);
        assert_eq!(b.mat.row(0).iter().copied().collect::<Vec<_>>(), vec![0.25, 0.0, 0.0, 0.75]);
        assert_eq!(b.alpha, 0.0);
        assert_eq!(b.beta, -0.75);
    }

    #[test]
    fn closed_form_matches_product() {
        let xs = [0.3, 0.9, -0.2, 0.7, 0.55];
        let d = block_transfer(&xs).mat - ordered_product(&xs);
        assert!(d.amax() < 1e-15);
    }
}
