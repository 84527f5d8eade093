//! The twelve acceptance criteria, shared by `pxp-tdvp validate` and the
//! `acceptance` integration test.
//!
//! Every criterion is a list of [`Check`]s carrying the measured value and
//! the bound. A check may be marked `documented` when its failure is a known
//! property of the closed forms rather than a defect; such failures are
//! still reported as FAIL.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{eom_exact, eom_series, eom_spin_half, hamiltonian_derivative, residuals, variational_energy, Velocity};
use crate::error::Error;
use crate::gram::{gram_blocks, inverse_im_g_thetaphi};
use crate::integrator::{evolve, Rhs, Termination};
use crate::leakage::{leakage_large_j, leakage_rate, report_from_cell};
use crate::model::{ModelParams, UnitCell, VariationalState};
use crate::oracle::{exact_report, numeric_environment};
use crate::transfer::{block_in_cell, dominant_pair, ordered_product};

pub const DEFAULT_SEED: u64 = 20_240_917;

const SPINS: [f64; 4] = [0.5, 1.0, 1.5, 2.0];

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub bound: f64,
    pub passed: bool,
    /// Reason a failure is expected, if it is.
    pub documented: Option<&'static str>,
}

impl Check {
    fn below(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Check { name: name.into(), measured, bound, passed: measured < bound, documented: None }
    }

    fn flag(name: impl Into<String>, ok: bool, measured: f64, bound: f64) -> Self {
        Check { name: name.into(), measured, bound, passed: ok, documented: None }
    }

    fn documented(mut self, why: &'static str) -> Self {
        self.documented = Some(why);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub elapsed: Duration,
}

impl CriterionReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// True when every failing check has a documented cause.
    pub fn accepted(&self) -> bool {
        self.checks.iter().all(|c| c.passed || c.documented.is_some())
    }

    /// One `PASS`/`FAIL` line with the measured values.
    pub fn summary_line(&self) -> String {
        let parts: Vec<String> = self
            .checks
            .iter()
            .map(|c| {
                format!(
                    "{}{}={:.3e} (bound {:.1e})",
                    if c.passed { "" } else { "!" },
                    c.name,
                    c.measured,
                    c.bound
                )
            })
            .collect();
        format!(
            "criterion {:>2} {} [{}] {:.2}s: {}",
            self.id,
            if self.passed() { "PASS" } else { "FAIL" },
            self.title,
            self.elapsed.as_secs_f64(),
            parts.join("; ")
        )
    }
}

pub const TITLES: [&str; 12] = [
    "transfer closed form",
    "reduction formulae",
    "eta consistency",
    "gram inverse",
    "environment oracle",
    "eom cross-forms",
    "ED cross-check",
    "delta independence",
    "non-negativity",
    "conservation",
    "large-J asymptotics",
    "symmetries",
];

pub fn run_all(seed: u64) -> Vec<CriterionReport> {
    (1..=12).map(|id| run_criterion(id, seed)).collect()
}

pub fn run_criterion(id: u8, seed: u64) -> CriterionReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(id as u64));
    let start = Instant::now();
    let (checks, notes) = match id {
        1 => transfer_closed_form(&mut rng),
        2 => reduction(&mut rng),
        3 => eta_consistency(&mut rng),
        4 => gram_inverse(&mut rng),
        5 => environment(&mut rng),
        6 => eom_cross(&mut rng),
        7 => ed_cross(),
        8 => delta_independence(&mut rng),
        9 => non_negativity(&mut rng),
        10 => conservation(),
        11 => large_j(),
        12 => symmetries(&mut rng),
        _ => (vec![Check::flag("unknown criterion", false, id as f64, 12.0)], vec![]),
    };
    let mut checks = checks;
    let elapsed = start.elapsed();
    if let Some(limit) = runtime_limit(id) {
        checks.push(Check::below("runtime_s", elapsed.as_secs_f64(), limit));
    }
    CriterionReport { id, title: TITLES.get(id as usize - 1).copied().unwrap_or("?"), checks, notes, elapsed }
}

fn runtime_limit(id: u8) -> Option<f64> {
    match id {
        1 => Some(1.0),
        5 => Some(30.0),
        7 => Some(10.0),
        _ => None,
    }
}

type Outcome = (Vec<Check>, Vec<String>);

fn pick<T: Copy>(rng: &mut ChaCha8Rng, xs: &[T]) -> T {
    xs[rng.random_range(0..xs.len())]
}

/// θ uniform on one period with `|sin θ| > min_sin`, φ uniform.
fn random_state(rng: &mut ChaCha8Rng, k: usize, period: f64, min_sin: f64) -> VariationalState {
    let mut theta = Vec::with_capacity(k);
    while theta.len() < k {
        let t: f64 = rng.random_range(0.0..period);
        if t.sin().abs() > min_sin {
            theta.push(t);
        }
    }
    let phi = (0..k).map(|_| rng.random_range(-PI..PI)).collect();
    VariationalState::new(theta, phi)
}

fn random_params(rng: &mut ChaCha8Rng, k: usize, spin: f64) -> ModelParams {
    let omega = (0..k).map(|_| rng.random_range(0.5..1.5)).collect();
    let delta = (0..k).map(|_| rng.random_range(-1.0..1.0)).collect();
    ModelParams::new(spin, omega, delta).expect("valid random parameters")
}

fn rel(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / b.abs().max(floor)
}

fn vel_rel(a: &Velocity, b: &Velocity) -> f64 {
    let scale = b.theta_dot.iter().chain(&b.phi_dot).fold(1.0f64, |m, v| m.max(v.abs()));
    a.max_abs_diff(b) / scale
}

fn transfer_closed_form(rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let k = rng.random_range(1..=8);
        let spin = pick(rng, &SPINS);
        let p = random_params(rng, k, spin);
        let s = random_state(rng, k, p.theta_period(), 0.0);
        let cell = UnitCell::new(&p, &s).unwrap();
        let start = rng.random_range(0..k) as isize;
        let span = rng.random_range(1..=12) as isize;
        let b = block_in_cell(&cell, start, start + span - 1);
        let xs: Vec<f64> = (start..start + span).map(|m| cell.x[cell.idx(m)]).collect();
        worst = worst.max((b.mat - ordered_product(&xs)).amax());
    }
    (vec![Check::below("max_entry_err", worst, 1e-12)], vec![])
}

fn reduction(rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let k = rng.random_range(1..=8);
        let spin = pick(rng, &SPINS);
        let p = random_params(rng, k, spin);
        let s = random_state(rng, k, p.theta_period(), 0.0);
        let Ok(cell) = UnitCell::new(&p, &s) else { continue };
        for i in 0..k as isize {
            for len in 1..=2 * k as isize {
                let j = i + len - 1;
                let t = ordered_product(&(i..=j).map(|m| cell.x[cell.idx(m)]).collect::<Vec<_>>());
                let a = dominant_pair(&cell, i);
                let b = dominant_pair(&cell, j + 1);
                worst = worst.max((a.l * t - b.l).amax()).max((t * b.r - a.r).amax());
            }
        }
    }
    (vec![Check::below("max_err", worst, 1e-12)], vec![])
}

/// The explicit small-K rows, with `w = cos^{4J}(θ/2)`.
fn eta_explicit(w: &[f64], i: usize) -> f64 {
    let k = w.len();
    let at = |d: usize| w[(i + k - d) % k];
    match k {
        1 => 1.0 / (2.0 - w[0]),
        2 => at(1) / (1.0 - (at(1) - 1.0) * (at(0) - 1.0)),
        3 => (1.0 + (at(1) - 1.0) * at(2)) / (1.0 - (at(1) - 1.0) * (at(2) - 1.0) * (at(0) - 1.0)),
        _ => unreachable!(),
    }
}

fn eta_consistency(rng: &mut ChaCha8Rng) -> Outcome {
    let mut explicit = 0.0f64;
    let mut closure = 0.0f64;
    for n in 0..300 {
        let k = if n < 150 { 1 + n % 3 } else { rng.random_range(1..=8) };
        let spin = pick(rng, &SPINS);
        let p = random_params(rng, k, spin);
        let s = random_state(rng, k, p.theta_period(), 0.0);
        let Ok(cell) = UnitCell::new(&p, &s) else { continue };
        // the explicit rows lose digits as 1/(1 - beta) near the degenerate point
        if k <= 3 && cell.beta_cell().abs() <= 0.9 {
            for i in 0..k {
                explicit = explicit.max((cell.eta[i] - eta_explicit(&cell.w, i)).abs());
            }
        }
        for start in 0..k {
            let mut e = cell.eta[start];
            for m in 0..k {
                let site = (start + m) % k;
                e = 1.0 + (cell.w[site] - 1.0) * e;
                closure = closure.max((e - cell.eta[(site + 1) % k]).abs());
            }
        }
    }
    (
        vec![Check::below("explicit_rows_err", explicit, 1e-12), Check::below("recursion_closure_err", closure, 1e-12)],
        vec![],
    )
}

fn gram_inverse(rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst = 0.0f64;
    let mut skipped = 0;
    for _ in 0..200 {
        let k = rng.random_range(1..=8);
        let spin = pick(rng, &SPINS);
        let p = random_params(rng, k, spin);
        let s = random_state(rng, k, p.theta_period(), 0.05);
        let cell = UnitCell::new(&p, &s).unwrap();
        match inverse_im_g_thetaphi(&cell) {
            Ok(inv) => {
                let prod = inv * gram_blocks(&cell).im_g_tp();
                worst = worst.max((prod - nalgebra::DMatrix::<f64>::identity(k, k)).amax());
            }
            Err(Error::Resonance { .. }) => skipped += 1,
            Err(e) => panic!("unexpected {e}"),
        }
    }
    (vec![Check::below("max_dev_from_identity", worst, 1e-10)], vec![format!("{skipped} resonant states skipped")])
}

fn environment(rng: &mut ChaCha8Rng) -> Outcome {
    let (mut eg, mut ed, mut ev, mut ee, mut e2) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut done = 0;
    while done < 100 {
        let k = rng.random_range(1..=5);
        let spin = pick(rng, &SPINS);
        let p = random_params(rng, k, spin);
        let s = random_state(rng, k, p.theta_period(), 0.05);
        let cell = UnitCell::new(&p, &s).unwrap();
        if cell.beta_cell().abs() > 0.9 || cell.ct_gap.abs() < 1e-6 {
            continue;
        }
        let num = numeric_environment(&p, &s).expect("oracle on a non-degenerate state");
        let g = gram_blocks(&cell);
        let res = residuals(&cell);
        let dh = hamiltonian_derivative(&cell, &g, &res);
        let rep = report_from_cell(&cell).unwrap();
        for (a, b) in [(&num.g_tt, &g.g_tt), (&num.g_tp, &g.g_tp), (&num.g_pt, &g.g_pt), (&num.g_pp, &g.g_pp)] {
            eg = eg.max((a - b).camax() / b.camax().max(1e-300));
        }
        let scale = dh.re_theta.iter().chain(&dh.im_theta).chain(&dh.re_phi).chain(&dh.im_phi).fold(1e-300f64, |m, v| m.max(v.abs()));
        for i in 0..k {
            let d = [
                num.dh_theta[i].re - dh.re_theta[i],
                num.dh_theta[i].im - dh.im_theta[i],
                num.dh_phi[i].re - dh.re_phi[i],
                num.dh_phi[i].im - dh.im_phi[i],
            ];
            ed = ed.max(d.iter().fold(0.0f64, |m, v| m.max(v.abs())) / scale);
        }
        let var_cell = rep.total * k as f64;
        ev = ev.max(rel(num.variance_cell, var_cell, 1e-300));
        let e_cf = variational_energy(&p, &s).unwrap();
        ee = ee.max(rel(num.energy_cell, e_cf, 1.0));
        e2 = e2.max(rel(num.gamma2, rep.gamma2, rep.total.abs()));
        done += 1;
    }
    (
        vec![
            Check::below("gram_rel", eg, 1e-9),
            Check::below("dH_rel", ed, 1e-9),
            Check::below("energy_rel", ee, 1e-9),
            Check::below("variance_rel", ev, 1e-9),
            Check::below("gamma2_rel", e2, 1e-9),
        ],
        vec!["gamma2 error is relative to max(|gamma2|, variance), the size of the terms that cancel".into()],
    )
}

fn eom_cross(rng: &mut ChaCha8Rng) -> Outcome {
    let mut series = 0.0f64;
    let mut half = 0.0f64;
    let mut diverged = 0;
    for _ in 0..100 {
        let k = rng.random_range(1..=6);
        let spin = pick(rng, &SPINS);
        let p = random_params(rng, k, spin);
        let s = random_state(rng, k, p.theta_period(), 0.05);
        let Ok(exact) = eom_exact(&p, &s) else { continue };
        match eom_series(&p, &s, 1e-14) {
            Ok(v) => series = series.max(vel_rel(&v, &exact)),
            Err(Error::SeriesDivergence(_)) => diverged += 1,
            Err(e) => panic!("unexpected {e}"),
        }
    }
    for _ in 0..100 {
        let k = rng.random_range(1..=6);
        let p = random_params(rng, k, 0.5);
        let s = random_state(rng, k, p.theta_period(), 0.05);
        let exact = eom_exact(&p, &s).unwrap();
        half = half.max(vel_rel(&eom_spin_half(&p, &s).unwrap(), &exact));
    }
    (
        vec![Check::below("series_rel", series, 1e-10), Check::below("spin_half_rel", half, 1e-10)],
        vec![format!("{diverged} states with |prod c~| >= 1 have no convergent series")],
    )
}

fn ed_cross() -> Outcome {
    let p = ModelParams::new(0.5, vec![1.0, 1.0], vec![0.5, -0.5]).unwrap();
    let s = VariationalState::new(vec![PI / 2.0; 2], vec![0.3, -0.2]);
    let cell = UnitCell::new(&p, &s).unwrap();
    let bound = 5.0 * cell.beta(0, 1).abs().powf(12.0 / 2.0);
    let v = eom_exact(&p, &s).unwrap();
    let cf = leakage_rate(&p, &s).unwrap();
    let e_cf = variational_energy(&p, &s).unwrap() / 2.0;
    let ed = exact_report(&p, &s, 12, &v).unwrap();
    let mut notes = vec![];
    for l in [16, 20] {
        let r = exact_report(&p, &s, l, &v).unwrap();
        notes.push(format!(
            "L={l}: |dE/L|={:.2e}, |dGamma2|/Gamma2={:.2e}, 5|lambda2|^(L/K)={:.2e}",
            (r.energy_density - e_cf).abs(),
            rel(r.gamma2, cf.gamma2, 1e-300),
            5.0 * cell.beta(0, 1).abs().powf(l as f64 / 2.0)
        ));
    }
    (
        vec![
            Check::below("energy_abs", (ed.energy_density - e_cf).abs(), bound),
            Check::below("gamma2_rel", rel(ed.gamma2, cf.gamma2, 1e-300), bound).documented(
                "finite-L correction to the leakage density carries an extra factor of order L; \
                 the difference still decays as |lambda2|^(L/K)",
            ),
        ],
        notes,
    )
}

fn delta_independence(rng: &mut ChaCha8Rng) -> Outcome {
    let mut closed = 0.0f64;
    let mut raw = 0.0f64;
    for _ in 0..100 {
        let k = rng.random_range(1..=6);
        let spin = pick(rng, &SPINS);
        let p = random_params(rng, k, spin);
        let s = random_state(rng, k, p.theta_period(), 0.05);
        let mut q = p.clone();
        q.delta = (0..k).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (Ok(a), Ok(b)) = (leakage_rate(&p, &s), leakage_rate(&q, &s)) else { continue };
        closed = closed.max((a.gamma2 - b.gamma2).abs());
        raw = raw.max((a.gamma2_raw - b.gamma2_raw).abs() / a.total.abs().max(b.total.abs()).max(1.0));
    }
    (
        vec![Check::below("closed_form_diff", closed, 1e-12), Check::below("raw_route_diff", raw, 1e-12)],
        vec!["raw route difference is scaled by max(1, variance)".into()],
    )
}

fn non_negativity(rng: &mut ChaCha8Rng) -> Outcome {
    let mut min = f64::INFINITY;
    let mut skipped = 0;
    let probe = 0.05f64.asin();
    for n in 0..10_000 {
        let k = rng.random_range(1..=6);
        let spin = pick(rng, &SPINS);
        let p = random_params(rng, k, spin);
        let mut s = random_state(rng, k, p.theta_period(), 0.05);
        if n % 4 == 0 {
            let site = rng.random_range(0..k);
            s.theta[site] = pick(rng, &[probe, PI - probe, PI + probe, 2.0 * PI - probe]);
        }
        match leakage_rate(&p, &s) {
            Ok(r) => min = min.min(r.gamma2),
            Err(_) => skipped += 1,
        }
    }
    (
        vec![Check::flag("min_gamma2", min >= -1e-12, min, -1e-12)],
        vec![format!("{skipped} resonant or degenerate states skipped")],
    )
}

fn conservation() -> Outcome {
    let p = ModelParams::uniform(2, 0.5, 1.0, 0.0).unwrap();
    let s = VariationalState::new(vec![3.0, 0.2], vec![0.0, 0.0]);
    let tr = evolve(&s, &p, 10.0, 1e-3, Rhs::Exact, 1).unwrap();
    let ok = tr.termination == Termination::Completed;
    let end = |dt: f64| {
        let t = evolve(&s, &p, 10.0, dt, Rhs::Exact, usize::MAX).unwrap();
        t.states.last().unwrap().clone()
    };
    let diff = |a: &VariationalState, b: &VariationalState| {
        a.theta.iter().chain(&a.phi).zip(b.theta.iter().chain(&b.phi)).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
    };
    let (a, b, c) = (end(0.02), end(0.01), end(0.005));
    let ratio = diff(&a, &b) / diff(&b, &c);
    (
        vec![
            Check::flag("completed", ok, if ok { 1.0 } else { 0.0 }, 1.0),
            Check::below("energy_drift", tr.max_energy_drift(), 1e-6),
            Check::flag("richardson_ratio", (12.0..=20.0).contains(&ratio), ratio, 16.0),
        ],
        vec!["Richardson ratio from final states at dt = 0.02, 0.01, 0.005 over t in [0, 10]".into()],
    )
}

/// Fixed generic point used for the large-J scans.
pub fn large_j_point(k: usize, spin: f64) -> (ModelParams, VariationalState) {
    let p = ModelParams::new(spin, vec![1.0, 1.2, 0.8][..k].to_vec(), vec![0.5, -0.5, 0.2][..k].to_vec()).unwrap();
    let s = VariationalState::new(vec![1.0, 1.3, 1.1][..k].to_vec(), vec![0.3, -0.2, 0.1][..k].to_vec());
    (p, s)
}

const LARGE_J: [f64; 4] = [25.0, 50.0, 100.0, 200.0];

fn large_j() -> Outcome {
    let mut notes = vec![];
    // odd K: J Γ² must keep falling until it reaches the f64 resolution floor
    let mut jg = vec![];
    let mut floors = vec![];
    for j in LARGE_J {
        let (p, s) = large_j_point(3, j);
        let r = leakage_rate(&p, &s).unwrap();
        let scale = r.gamma2_breakdown.iter().fold(r.total.abs(), |m, v| m.max(v.abs()));
        jg.push(j * r.gamma2);
        floors.push(j * 64.0 * f64::EPSILON * scale);
        notes.push(format!("K=3 J={j}: Gamma2={:.3e}", r.gamma2));
    }
    let mut odd_ok = jg[jg.len() - 1] <= 1e-2 * jg[0];
    for n in 1..jg.len() {
        let resolved = jg[n].abs() > floors[n];
        if resolved && jg[n] >= jg[n - 1] {
            odd_ok = false;
        }
    }
    let mut checks = vec![Check::flag("odd_K_J_gamma2_ratio", odd_ok, jg[3] / jg[0], 1e-2)];

    // even K: 2J Γ² against the large-J form
    let mut last_ratio = f64::INFINITY;
    for j in LARGE_J {
        let (p, s) = large_j_point(2, j);
        let lim = leakage_large_j(&p, &s).unwrap();
        match leakage_rate(&p, &s) {
            Ok(r) => {
                last_ratio = r.gamma2 / lim;
                notes.push(format!("K=2 J={j}: Gamma2={:.3e}, limit={:.3e}, ratio={:.3e}", r.gamma2, lim, last_ratio));
            }
            Err(e) => {
                last_ratio = f64::INFINITY;
                notes.push(format!("K=2 J={j}: {e}"));
            }
        }
    }
    let dev = (last_ratio - 1.0).abs();
    checks.push(
        Check::flag("even_K_rel_dev_at_J200", dev <= 0.05, dev, 0.05).documented(
            "for even K the cell product of c~ tends to +1, so the 1/(1 - prod c~) factor diverges \
             and Gamma2 grows away from the large-J form",
        ),
    );
    (checks, notes)
}

fn symmetries(rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst = 0.0f64;
    let mut joint = 0.0f64;
    let mut n = 0;
    while n < 100 {
        let k = rng.random_range(1..=6);
        let spin = pick(rng, &SPINS);
        let p = random_params(rng, k, spin);
        let s = random_state(rng, k, p.theta_period(), 0.05);
        let Ok(v0) = eom_exact(&p, &s) else { continue };
        let shift = p.theta_period();
        let mut t = s.clone();
        for th in t.theta.iter_mut() {
            if rng.random_bool(0.5) {
                *th += shift * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            }
        }
        worst = worst.max(vel_rel(&eom_exact(&p, &t).unwrap(), &v0));
        if spin == 0.5 {
            // only the global map is a symmetry: per site it flips the sign of c_0
            let mut u = s.clone();
            for i in 0..k {
                u.theta[i] += 2.0 * PI;
                u.phi[i] += PI;
            }
            joint = joint.max(vel_rel(&eom_exact(&p, &u).unwrap(), &v0));
        }
        n += 1;
    }
    (vec![Check::below("period_shift_rel", worst, 1e-10), Check::below("joint_map_rel", joint, 1e-10)], vec![])
}
