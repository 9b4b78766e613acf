//! Fixed-step RK4 time integration with CFL step selection, trajectory
//! recording and blow-up detection.

use crate::diagnostics;
use crate::error::{Error, Result};
use crate::models::{self, ModelSpec, ModelState};

/// Step-size rule: a fixed `dt` or a CFL number re-evaluated every step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepRule {
    Fixed(f64),
    Cfl(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepperConfig {
    pub rule: StepRule,
    pub t_final: f64,
    /// Record every this many steps (the initial and final states are
    /// always recorded).
    pub record_stride: usize,
}

impl StepperConfig {
    pub fn validate(&self) -> Result<()> {
        match self.rule {
            StepRule::Fixed(dt) if dt <= 0.0 => {
                return Err(Error::InvalidInput("dt must be positive".into()))
            }
            StepRule::Cfl(c) if c <= 0.0 || c > 1.0 => {
                return Err(Error::InvalidInput("cfl must lie in (0, 1]".into()))
            }
            _ => {}
        }
        if self.t_final < 0.0 {
            return Err(Error::InvalidInput("t_final must be nonnegative".into()));
        }
        if self.record_stride == 0 {
            return Err(Error::InvalidInput("record_stride must be positive".into()));
        }
        Ok(())
    }
}

/// Recorded snapshots with per-time diagnostics.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<ModelState>,
    pub energies: Vec<f64>,
    pub invariants: Vec<Vec<(String, f64)>>,
}

impl Trajectory {
    fn record(&mut self, spec: &ModelSpec, t: f64, s: &ModelState) {
        self.times.push(t);
        self.energies.push(diagnostics::energy(spec, s));
        self.invariants.push(diagnostics::invariants(spec, s));
        self.states.push(s.clone());
    }

    pub fn last_state(&self) -> &ModelState {
        self.states.last().expect("trajectory is never empty")
    }
}

#[derive(Debug, Clone)]
pub struct IntegrationOutcome {
    pub trajectory: Trajectory,
    /// Time at which the blow-up detector fired, if it did.
    pub diverged_at: Option<f64>,
}

/// One classical RK4 update; structural invariants of the state are
/// re-enforced afterwards.
pub fn rk4_step(spec: &ModelSpec, s: &ModelState, dt: f64) -> Result<ModelState> {
    let k1 = models::rhs(spec, s)?;
    let mut y = s.clone();
    y.axpy(0.5 * dt, &k1);
    let k2 = models::rhs(spec, &y)?;
    let mut y = s.clone();
    y.axpy(0.5 * dt, &k2);
    let k3 = models::rhs(spec, &y)?;
    let mut y = s.clone();
    y.axpy(dt, &k3);
    let k4 = models::rhs(spec, &y)?;
    let mut out = s.clone();
    out.axpy(dt / 6.0, &k1);
    out.axpy(dt / 3.0, &k2);
    out.axpy(dt / 3.0, &k3);
    out.axpy(dt / 6.0, &k4);
    out.renormalize(spec);
    Ok(out)
}

/// Fraction of spectral energy in the upper third of the band above which
/// a 1D run is declared to have left the smooth regime.
pub const BLOWUP_BAND_FRACTION: f64 = 0.01;

fn blown_up(s: &ModelState) -> bool {
    !s.is_finite() || s.upper_band_fraction() > BLOWUP_BAND_FRACTION
}

/// Advance to `t_final`, recording every `record_stride` steps. On blow-up
/// the partial trajectory is returned with `diverged_at` set.
pub fn integrate(spec: &ModelSpec, s0: &ModelState, cfg: &StepperConfig) -> Result<IntegrationOutcome> {
    cfg.validate()?;
    let mut traj = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
        energies: Vec::new(),
        invariants: Vec::new(),
    };
    let mut s = s0.clone();
    s.renormalize(spec);
    let mut t = 0.0;
    traj.record(spec, t, &s);
    if blown_up(&s) {
        return Ok(IntegrationOutcome {
            trajectory: traj,
            diverged_at: Some(t),
        });
    }
    let mut step = 0usize;
    while t < cfg.t_final - 1e-14 {
        let remaining = cfg.t_final - t;
        let dt = match cfg.rule {
            StepRule::Fixed(dt) => dt.min(remaining),
            StepRule::Cfl(c) => models::cfl_dt(spec, &s, c, remaining),
        };
        let next = match rk4_step(spec, &s, dt) {
            Ok(n) => n,
            Err(Error::Diverged { .. }) | Err(Error::InvalidInput(_)) => {
                return Ok(IntegrationOutcome {
                    trajectory: traj,
                    diverged_at: Some(t + dt),
                })
            }
            Err(e) => return Err(e),
        };
        t += dt;
        s = next;
        step += 1;
        if blown_up(&s) {
            traj.record(spec, t, &s);
            return Ok(IntegrationOutcome {
                trajectory: traj,
                diverged_at: Some(t),
            });
        }
        if step % cfg.record_stride == 0 || t >= cfg.t_final - 1e-14 {
            traj.record(spec, t, &s);
        }
    }
    if *traj.times.last().unwrap() < t {
        traj.record(spec, t, &s);
    }
    Ok(IntegrationOutcome {
        trajectory: traj,
        diverged_at: None,
    })
}
