//! Fixed-step RK4 on the TDVP phase space and trajectory recording.
//!
//! Angles are kept unreduced so recorded curves are continuous. A failed
//! right-hand side ends the run; the partial trajectory is returned together
//! with the cause.

use std::fmt;

use crate::dynamics::{eom_exact, eom_large_j, eom_series, eom_spin_half, variational_energy, Velocity};
use crate::error::{Error, Result};
use crate::leakage::leakage_rate;
use crate::model::{ModelParams, VariationalState};

/// Right-hand side used for the velocity field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rhs {
    Exact,
    Series(f64),
    SpinHalf,
    LargeJ,
}

impl Rhs {
    pub fn velocity(&self, params: &ModelParams, state: &VariationalState) -> Result<Velocity> {
        match *self {
            Rhs::Exact => eom_exact(params, state),
            Rhs::Series(eps) => eom_series(params, state, eps),
            Rhs::SpinHalf => eom_spin_half(params, state),
            Rhs::LargeJ => eom_large_j(params, state),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Rhs::Exact => "exact",
            Rhs::Series(_) => "series",
            Rhs::SpinHalf => "spin_half",
            Rhs::LargeJ => "large_j",
        }
    }
}

/// An RHS failure inside an RK4 step; `substep` is 1..=4.
#[derive(Debug, Clone, PartialEq)]
pub struct StepError {
    pub substep: u8,
    pub source: Error,
}

impl fmt::Display for StepError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RK4 stage {}: {}", self.substep, self.source)
    }
}

impl std::error::Error for StepError {}

fn shifted(s: &VariationalState, v: &Velocity, h: f64) -> VariationalState {
    VariationalState::new(
        s.theta.iter().zip(&v.theta_dot).map(|(a, b)| a + h * b).collect(),
        s.phi.iter().zip(&v.phi_dot).map(|(a, b)| a + h * b).collect(),
    )
}

/// One classical RK4 step.
pub fn step(
    state: &VariationalState,
    params: &ModelParams,
    dt: f64,
    rhs: Rhs,
) -> std::result::Result<VariationalState, StepError> {
    let eval = |s: &VariationalState, n: u8| {
        let v = rhs.velocity(params, s).map_err(|e| StepError { substep: n, source: e })?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(StepError { substep: n, source: Error::NonFinite("velocity") })
        }
    };
    let k1 = eval(state, 1)?;
    let k2 = eval(&shifted(state, &k1, 0.5 * dt), 2)?;
    let k3 = eval(&shifted(state, &k2, 0.5 * dt), 3)?;
    let k4 = eval(&shifted(state, &k3, dt), 4)?;
    let comb = |a: &[f64], d: [&[f64]; 4]| -> Vec<f64> {
        (0..a.len())
            .map(|i| a[i] + dt / 6.0 * (d[0][i] + 2.0 * d[1][i] + 2.0 * d[2][i] + d[3][i]))
            .collect()
    };
    let next = VariationalState::new(
        comb(&state.theta, [&k1.theta_dot, &k2.theta_dot, &k3.theta_dot, &k4.theta_dot]),
        comb(&state.phi, [&k1.phi_dot, &k2.phi_dot, &k3.phi_dot, &k4.phi_dot]),
    );
    if next.theta.iter().chain(&next.phi).all(|v| v.is_finite()) {
        Ok(next)
    } else {
        Err(StepError { substep: 4, source: Error::NonFinite("state") })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Completed,
    PoleEvent,
    DegenerateEvent,
    NonfiniteEvent,
}

impl Termination {
    pub fn from_error(e: &Error) -> Self {
        match e {
            Error::Pole { .. } => Termination::PoleEvent,
            Error::Degenerate { .. } | Error::Resonance { .. } => Termination::DegenerateEvent,
            _ => Termination::NonfiniteEvent,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::Completed => "completed",
            Termination::PoleEvent => "pole_event",
            Termination::DegenerateEvent => "degenerate_event",
            Termination::NonfiniteEvent => "nonfinite_event",
        }
    }
}

/// Where and why a run stopped early.
#[derive(Debug, Clone, PartialEq)]
pub struct EventInfo {
    pub time: f64,
    /// RK4 stage, or 0 when the failure came from the diagnostics at a
    /// record point.
    pub substep: u8,
    pub error: Error,
    /// State at the start of the failing step.
    pub state: VariationalState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<VariationalState>,
    pub energy: Vec<f64>,
    pub gamma2: Vec<f64>,
    pub accumulated_leakage: Vec<f64>,
    pub termination: Termination,
    pub event: Option<EventInfo>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `max_t |E(t) − E(0)|` over the recorded samples.
    pub fn max_energy_drift(&self) -> f64 {
        let e0 = self.energy.first().copied().unwrap_or(0.0);
        self.energy.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max)
    }

    pub fn drift_exceeds(&self, bound: f64) -> bool {
        self.max_energy_drift() > bound
    }
}

fn diagnostics(params: &ModelParams, s: &VariationalState) -> Result<(f64, f64)> {
    let e = variational_energy(params, s)?;
    let g = leakage_rate(params, s)?.gamma2;
    Ok((e, g))
}

/// Integrate from `t = 0` to `t_end`.
///
/// `∫Γ dt` is accumulated with the trapezoid rule on every step, using
/// `Γ = √max(Γ², 0)`; the record points sample it every `record_every` steps
/// and at the final time. A shorter last step lands exactly on `t_end`.
pub fn evolve(
    state0: &VariationalState,
    params: &ModelParams,
    t_end: f64,
    dt: f64,
    rhs: Rhs,
    record_every: usize,
) -> Result<Trajectory> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidParams(format!("dt = {dt} must be positive")));
    }
    if !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidParams(format!("t_end = {t_end} must be non-negative")));
    }
    if record_every == 0 {
        return Err(Error::InvalidParams("record_every must be at least 1".into()));
    }
    params.validate()?;
    state0.check(params)?;

    let mut traj = Trajectory {
        times: vec![],
        states: vec![],
        energy: vec![],
        gamma2: vec![],
        accumulated_leakage: vec![],
        termination: Termination::Completed,
        event: None,
    };
    let stop = |traj: &mut Trajectory, t: f64, substep: u8, e: Error, s: &VariationalState| {
        traj.termination = Termination::from_error(&e);
        traj.event = Some(EventInfo { time: t, substep, error: e, state: s.clone() });
    };

    let (e0, g0) = match diagnostics(params, state0) {
        Ok(v) => v,
        Err(e) => {
            stop(&mut traj, 0.0, 0, e, state0);
            return Ok(traj);
        }
    };
    let push = |traj: &mut Trajectory, t: f64, s: &VariationalState, e: f64, g: f64, acc: f64| {
        traj.times.push(t);
        traj.states.push(s.clone());
        traj.energy.push(e);
        traj.gamma2.push(g);
        traj.accumulated_leakage.push(acc);
    };
    push(&mut traj, 0.0, state0, e0, g0, 0.0);

    let n_steps = if t_end == 0.0 { 0 } else { ((t_end / dt) - 1e-9).ceil().max(1.0) as usize };
    let mut state = state0.clone();
    let mut gamma_prev = g0.max(0.0).sqrt();
    let mut acc = 0.0;
    let mut t = 0.0;
    for n in 1..=n_steps {
        let t_next = if n == n_steps { t_end } else { n as f64 * dt };
        let h = t_next - t;
        let next = match step(&state, params, h, rhs) {
            Ok(s) => s,
            Err(se) => {
                stop(&mut traj, t, se.substep, se.source, &state);
                return Ok(traj);
            }
        };
        let (e, g) = match diagnostics(params, &next) {
            Ok(v) => v,
            Err(err) => {
                stop(&mut traj, t_next, 0, err, &next);
                return Ok(traj);
            }
        };
        let gamma = g.max(0.0).sqrt();
        acc += 0.5 * h * (gamma_prev + gamma);
        gamma_prev = gamma;
        state = next;
        t = t_next;
        if n % record_every == 0 || n == n_steps {
            push(&mut traj, t, &state, e, g, acc);
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_end_zero_gives_one_sample() {
        let p = ModelParams::uniform(2, 0.5, 1.0, 0.0).unwrap();
        let s = VariationalState::new(vec![1.0, 0.4], vec![0.0, 0.0]);
        let tr = evolve(&s, &p, 0.0, 0.01, Rhs::Exact, 1).unwrap();
        assert_eq!(tr.len(), 1);
        assert_eq!(tr.termination, Termination::Completed);
    }

    #[test]
    fn last_step_lands_on_t_end() {
        let p = ModelParams::uniform(2, 0.5, 1.0, 0.0).unwrap();
        let s = VariationalState::new(vec![1.0, 0.4], vec![0.0, 0.0]);
        let tr = evolve(&s, &p, 0.105, 0.01, Rhs::Exact, 5).unwrap();
        assert_eq!(*tr.times.last().unwrap(), 0.105);
        assert_eq!(tr.times, vec![0.0, 0.05, 0.1, 0.105]);
    }
}
