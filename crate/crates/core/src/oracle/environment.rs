//! Numeric thermodynamic-limit contractions of the literal tensors.
//!
//! Nothing here uses the closed-form transfer algebra: the cell transfer
//! matrix is the literal product of `Σ conj(A) ⊗ A`, its fixed points come
//! from power iteration, and every connected sum over unit-cell copies is
//! accumulated term by term with the dominant part deflated each period.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, Matrix4, RowVector4, Vector4};
use num_complex::Complex64;

use super::dense::{coherent_tensors, spin_ops, transfer, SiteTensor, SpinOps};
use crate::dynamics::Velocity;
use crate::error::{Error, Result};
use crate::model::{ModelParams, VariationalState};

type C = Complex64;
type Row = RowVector4<C>;
type Col = Vector4<C>;

const POWER_TOL: f64 = 1e-13;
/// Extra sweeps after the tolerance is met, to push the fixed point to the
/// rounding floor before it is used in long geometric sums.
const POLISH_SWEEPS: usize = 400;
const SERIES_TOL: f64 = 1e-14;
const LAMBDA2_LIMIT: f64 = 1.0 - 1e-9;

/// References for the Gram blocks, `⟨∂Ψ|H|Ψ⟩_c`, the energy, the variance
/// and `Γ²`. Blocks, `dh_*`, `energy_cell` and `variance_cell` are densities
/// per unit cell; `gamma2` is per site.
#[derive(Debug, Clone)]
pub struct EnvironmentReport {
    pub g_tt: DMatrix<C>,
    pub g_tp: DMatrix<C>,
    pub g_pt: DMatrix<C>,
    pub g_pp: DMatrix<C>,
    pub dh_theta: Vec<C>,
    pub dh_phi: Vec<C>,
    pub energy_cell: f64,
    pub variance_cell: f64,
    /// Velocity from a dense solve of `Im G μ̇ = −Re⟨∂Ψ|H|Ψ⟩_c`.
    pub velocity: Velocity,
    pub gamma2: f64,
    /// Estimated `|λ₂/λ₁|` of the cell transfer matrix.
    pub lambda2: f64,
}

/// A decorated site: `None` means the plain tensor or the identity.
#[derive(Clone, Default)]
struct Deco {
    bra: Option<SiteTensor>,
    op: Option<DMatrix<C>>,
    ket: Option<SiteTensor>,
}

type Decos = BTreeMap<isize, Deco>;

fn single(site: isize, d: Deco) -> Decos {
    BTreeMap::from([(site, d)])
}

struct Env {
    k: usize,
    ops: SpinOps,
    a: Vec<SiteTensor>,
    da: Vec<[SiteTensor; 2]>,
    e: Vec<Matrix4<C>>,
    l: Vec<Row>,
    r: Vec<Col>,
    omega: Vec<f64>,
    delta: Vec<f64>,
    cap: usize,
    lambda2: f64,
}

fn power_right(m: &Matrix4<C>, cap: usize) -> Result<(Col, C)> {
    let mut v = Col::from_element(C::new(1.0, 0.0));
    let mut lam = C::default();
    for _ in 0..cap {
        let w = m * v;
        let nrm = w.norm();
        if nrm == 0.0 {
            break;
        }
        let next = w / C::new(nrm, 0.0);
        // fix the sign so successive iterates are comparable
        let piv = next.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap();
        let next = next * (piv.norm() / piv);
        lam = v.dotc(&w) / v.dotc(&v);
        if (next - v).norm() < POWER_TOL {
            let mut v = next;
            for _ in 0..POLISH_SWEEPS {
                let w = m * v;
                let w = w / C::new(w.norm(), 0.0);
                let piv = w.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap();
                v = w * (piv.norm() / piv);
            }
            lam = v.dotc(&(m * v)) / v.dotc(&v);
            return Ok((v, lam));
        }
        v = next;
    }
    Err(Error::PowerIteration((lam.norm() - 1.0).abs()))
}

/// `|λ₂/λ₁|` from the growth of `M − λ₁ r l` under repeated application.
fn subdominant(m: &Matrix4<C>, r: &Col, l: &Row, lam1: C) -> f64 {
    let defl = m - (r * l) * lam1;
    let mut v = Col::new(C::new(0.3, 0.1), C::new(-0.7, 0.2), C::new(0.5, -0.4), C::new(0.9, 0.0));
    let n = 400;
    let mut log_sum = 0.0;
    for it in 0..n {
        let w = defl * v;
        let g = w.norm() / v.norm();
        if g == 0.0 {
            return 0.0;
        }
        if it >= n / 2 {
            log_sum += g.ln();
        }
        v = w / C::new(w.norm(), 0.0);
    }
    (log_sum / (n - n / 2) as f64).exp() / lam1.norm()
}

impl Env {
    fn new(params: &ModelParams, state: &VariationalState) -> Result<Self> {
        params.validate()?;
        state.check(params)?;
        let k = params.k;
        let two_j = params.two_j();
        let ops = spin_ops(two_j);
        let mut a = Vec::with_capacity(k);
        let mut da = Vec::with_capacity(k);
        for i in 0..k {
            let (t, dt, dp) = coherent_tensors(state.theta[i], state.phi[i], two_j);
            a.push(t);
            da.push([dt, dp]);
        }
        let e: Vec<Matrix4<C>> = a.iter().map(|t| transfer(t, &ops.id, t)).collect();
        let cell = e.iter().fold(Matrix4::identity(), |acc, m| acc * m);

        let (r0, lam_r) = power_right(&cell, 1_000_000)?;
        let (lt, lam_l) = power_right(&cell.transpose(), 1_000_000)?;
        let l0 = lt.transpose();
        let norm = (l0 * r0)[(0, 0)];
        if norm.norm() < 1e-300 {
            return Err(Error::Degenerate { gap: 0.0 });
        }
        let l0 = l0 / norm;
        let lam1 = 0.5 * (lam_r + lam_l);
        let lambda2 = subdominant(&cell, &r0, &l0, lam1);
        if lambda2 > LAMBDA2_LIMIT || (lam1 - C::new(1.0, 0.0)).norm() > 1e-8 {
            return Err(Error::PowerIteration(lambda2));
        }
        let cap = if lambda2 < 1e-300 {
            8
        } else {
            (SERIES_TOL.ln() / lambda2.ln()).ceil().max(8.0) as usize + 64
        };

        let mut l = vec![l0; k];
        let mut r = vec![r0; k];
        for s in 1..k {
            l[s] = l[s - 1] * e[s - 1];
        }
        for s in (1..k).rev() {
            r[s] = e[s] * r[(s + 1) % k];
        }
        Ok(Env {
            k,
            ops,
            a,
            da,
            e,
            l,
            r,
            omega: params.omega.clone(),
            delta: params.delta.clone(),
            cap,
            lambda2,
        })
    }

    fn m(&self, s: isize) -> usize {
        s.rem_euclid(self.k as isize) as usize
    }

    fn lv(&self, s: isize) -> Row {
        self.l[self.m(s)]
    }

    fn rv(&self, s: isize) -> Col {
        self.r[self.m(s)]
    }

    fn site_matrix(&self, s: isize, d: &Deco) -> Matrix4<C> {
        let m = self.m(s);
        let bra = d.bra.as_ref().unwrap_or(&self.a[m]);
        let ket = d.ket.as_ref().unwrap_or(&self.a[m]);
        let op = d.op.as_ref().unwrap_or(&self.ops.id);
        transfer(bra, op, ket)
    }

    /// Transfer matrix of the whole decorated span and its first/last site.
    fn block(&self, deco: &Decos) -> (isize, isize, Matrix4<C>) {
        let st = *deco.keys().next().unwrap();
        let en = *deco.keys().next_back().unwrap();
        let mut t = Matrix4::identity();
        for s in st..=en {
            t *= match deco.get(&s) {
                Some(d) => self.site_matrix(s, d),
                None => self.e[self.m(s)],
            };
        }
        (st, en, t)
    }

    fn value(&self, deco: &Decos) -> C {
        let (st, en, t) = self.block(deco);
        (self.lv(st) * t * self.rv(en + 1))[(0, 0)]
    }

    /// `Σ_{m ≥ 0}` of the connected correlator between `d1` and `d2` shifted
    /// by `m` cells; `d2` must start after `d1` ends.
    fn forward(&self, d1: &Decos, d2: &Decos) -> Result<C> {
        let (st1, en1, t1) = self.block(d1);
        let (st2, en2, t2) = self.block(d2);
        debug_assert!(st2 > en1);
        let v = self.lv(st1) * t1;
        let c1 = (v * self.rv(en1 + 1))[(0, 0)];
        let mut w = v - self.lv(en1 + 1) * c1;
        for s in en1 + 1..st2 {
            w *= self.e[self.m(s)];
        }
        let cell: Matrix4<C> = (st2..st2 + self.k as isize).fold(Matrix4::identity(), |acc, s| acc * self.e[self.m(s)]);
        let rend = t2 * self.rv(en2 + 1);
        let (lst, rst) = (self.lv(st2), self.rv(st2));
        let mut total = C::default();
        for _ in 0..self.cap {
            total += (w * rend)[(0, 0)];
            w *= cell;
            w -= lst * (w * rst)[(0, 0)];
            if w.norm() < SERIES_TOL * 1e-2 {
                return Ok(total);
            }
        }
        if w.norm() < SERIES_TOL {
            Ok(total)
        } else {
            Err(Error::PowerIteration(self.lambda2))
        }
    }

    fn hterms(&self, b: isize) -> [(f64, Decos); 2] {
        let m = self.m(b);
        let op = |o: &DMatrix<C>| Deco { op: Some(o.clone()), ..Default::default() };
        [
            (
                self.omega[m],
                BTreeMap::from([(b - 1, op(&self.ops.proj)), (b, op(&self.ops.sx)), (b + 1, op(&self.ops.proj))]),
            ),
            (self.delta[m], single(b, op(&self.ops.sz))),
        ]
    }

    fn bra(&self, i: usize, mu: usize) -> Deco {
        Deco { bra: Some(self.da[i][mu].clone()), ..Default::default() }
    }

    fn ket(&self, i: usize, mu: usize) -> Deco {
        Deco { ket: Some(self.da[i][mu].clone()), ..Default::default() }
    }
}

/// Operator product `d1 · d2` site by site; bra from `d1`, ket from `d2`.
fn mul_deco(d1: &Decos, d2: &Decos) -> Decos {
    let mut out = Decos::new();
    for s in d1.keys().chain(d2.keys()) {
        let (a, b) = (d1.get(s), d2.get(s));
        let op = match (a.and_then(|d| d.op.clone()), b.and_then(|d| d.op.clone())) {
            (Some(x), Some(y)) => Some(x * y),
            (x, y) => x.or(y),
        };
        let bra = a.and_then(|d| d.bra.clone()).or_else(|| b.and_then(|d| d.bra.clone()));
        let ket = b.and_then(|d| d.ket.clone()).or_else(|| a.and_then(|d| d.ket.clone()));
        out.insert(*s, Deco { bra, op, ket });
    }
    out
}

fn gram(env: &Env) -> Result<[DMatrix<C>; 4]> {
    let k = env.k;
    let kk = k as isize;
    let mut out: [DMatrix<C>; 4] = std::array::from_fn(|_| DMatrix::zeros(k, k));
    for mu in 0..2 {
        for nu in 0..2 {
            let g = &mut out[2 * mu + nu];
            for i in 0..k {
                let ii = i as isize;
                let bra = single(ii, env.bra(i, mu));
                for j in 0..k {
                    let jj = j as isize;
                    let mut tot = C::default();
                    if i == j {
                        let both = Deco { bra: Some(env.da[i][mu].clone()), ket: Some(env.da[j][nu].clone()), op: None };
                        tot += env.value(&single(ii, both))
                            - env.value(&bra) * env.value(&single(ii, env.ket(j, nu)));
                    }
                    let jp = if jj > ii { jj } else { jj + kk };
                    tot += env.forward(&bra, &single(jp, env.ket(j, nu)))?;
                    let ip = if ii > jj { ii } else { ii + kk };
                    tot += env.forward(&single(jj, env.ket(j, nu)), &single(ip, env.bra(i, mu)))?;
                    g[(i, j)] = tot;
                }
            }
        }
    }
    Ok(out)
}

fn dh(env: &Env, mu: usize) -> Result<Vec<C>> {
    let k = env.k;
    let kk = k as isize;
    let mut v = vec![C::default(); k];
    for (i, vi) in v.iter_mut().enumerate() {
        let ii = i as isize;
        let bra = single(ii, env.bra(i, mu));
        let c_bra = env.value(&bra);
        let mut tot = C::default();
        for b in ii - 1..=ii + 1 {
            for (coef, ops) in env.hterms(b) {
                let mut dd = ops.clone();
                let e = dd.entry(ii).or_default();
                e.bra = Some(env.da[i][mu].clone());
                tot += (env.value(&dd) - c_bra * env.value(&ops)) * coef;
            }
        }
        for b0 in ii + 2..ii + 2 + kk {
            for (coef, ops) in env.hterms(b0) {
                tot += env.forward(&bra, &ops)? * coef;
            }
        }
        for b0 in 0..kk {
            let mut ip = ii;
            while ip <= b0 + 1 {
                ip += kk;
            }
            for (coef, ops) in env.hterms(b0) {
                tot += env.forward(&ops, &single(ip, env.bra(i, mu)))? * coef;
            }
        }
        *vi = tot;
    }
    Ok(v)
}

fn variance(env: &Env) -> Result<f64> {
    let kk = env.k as isize;
    let mut var = C::default();
    for a in 0..kk {
        let ha = env.hterms(a);
        for b in a - 2..=a + 2 {
            for (ca, oa) in &ha {
                for (cb, ob) in env.hterms(b) {
                    let prod = mul_deco(oa, &ob);
                    var += (env.value(&prod) - env.value(oa) * env.value(&ob)) * (ca * cb);
                }
            }
        }
        for b0 in a + 3..a + 3 + kk {
            for (ca, oa) in &ha {
                for (cb, ob) in env.hterms(b0) {
                    var += env.forward(oa, &ob)? * (2.0 * ca * cb);
                }
            }
        }
    }
    Ok(var.re)
}

fn energy(env: &Env) -> f64 {
    (0..env.k as isize)
        .flat_map(|a| env.hterms(a))
        .map(|(c, o)| (env.value(&o) * c).re)
        .sum()
}

/// Thermodynamic-limit references at one phase point.
pub fn numeric_environment(params: &ModelParams, state: &VariationalState) -> Result<EnvironmentReport> {
    let env = Env::new(params, state)?;
    let k = env.k;
    let [g_tt, g_tp, g_pt, g_pp] = gram(&env)?;
    let dh_theta = dh(&env, 0)?;
    let dh_phi = dh(&env, 1)?;
    let variance_cell = variance(&env)?;
    let energy_cell = energy(&env);

    let mut full = DMatrix::<C>::zeros(2 * k, 2 * k);
    full.view_mut((0, 0), (k, k)).copy_from(&g_tt);
    full.view_mut((0, k), (k, k)).copy_from(&g_tp);
    full.view_mut((k, 0), (k, k)).copy_from(&g_pt);
    full.view_mut((k, k), (k, k)).copy_from(&g_pp);
    let im = full.map(|v| v.im);
    let re = full.map(|v| v.re);
    let dh_all: Vec<C> = dh_theta.iter().chain(&dh_phi).copied().collect();
    let rhs = DVector::from_iterator(2 * k, dh_all.iter().map(|v| -v.re));
    let mu = im.lu().solve(&rhs).ok_or(Error::Resonance { gap: 0.0 })?;
    let im_dh = DVector::from_iterator(2 * k, dh_all.iter().map(|v| v.im));
    let g2 = (variance_cell - 2.0 * mu.dot(&im_dh) + mu.dot(&(&re * &mu))) / k as f64;

    Ok(EnvironmentReport {
        g_tt,
        g_tp,
        g_pt,
        g_pp,
        dh_theta,
        dh_phi,
        energy_cell,
        variance_cell,
        velocity: Velocity {
            theta_dot: mu.rows(0, k).iter().copied().collect(),
            phi_dot: mu.rows(k, k).iter().copied().collect(),
        },
        gamma2: g2,
        lambda2: env.lambda2,
    })
}
