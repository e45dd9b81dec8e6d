//! Explicit fourth-order Runge-Kutta stepping of the coupled interface system.

use serde::{Deserialize, Serialize};

use crate::error::{MuskatError, Result};
use crate::quadrature::InterfaceOperator;
use crate::state::{ContourPair, Densities, Grid2, SurfaceField};

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HaltReason {
    Completed,
    Collision,
    NumericalFailure,
    AmplitudeCap,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub cfl: f64,
    pub dt_max: f64,
    pub t_end: f64,
    /// Gap at or below which a run halts.
    pub hard_floor: f64,
    /// Gap below which results are flagged as under-resolved.
    pub trusted_floor: f64,
    /// Halt once any deviation from the far level exceeds this (unstable runs only).
    pub amplitude_cap: Option<f64>,
}

impl StepControl {
    pub fn for_grid(grid: &Grid2, t_end: f64) -> Self {
        StepControl {
            cfl: 0.5,
            dt_max: f64::INFINITY,
            t_end,
            hard_floor: 0.5 * grid.spacing(),
            trusted_floor: 4.0 * grid.spacing(),
            amplitude_cap: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(MuskatError::Parameter(format!(
                "CFL constant must lie in (0, 1], got {}",
                self.cfl
            )));
        }
        if !(self.dt_max > 0.0) {
            return Err(MuskatError::Parameter("dt_max must be positive".into()));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(MuskatError::Parameter(
                "t_end must be finite and nonnegative".into(),
            ));
        }
        if !(self.hard_floor > 0.0 && self.trusted_floor > 0.0) {
            return Err(MuskatError::Parameter(
                "collision floors must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// `c / (max|jump| / 2 * pi N / L)`, clipped to `dt_max`.
pub fn stable_dt(grid: &Grid2, densities: Densities, control: &StepControl) -> f64 {
    let rate = 0.5 * densities.max_jump() * grid.max_wavenumber();
    if rate == 0.0 {
        control.dt_max
    } else {
        (control.cfl / rate).min(control.dt_max)
    }
}

/// `y + dt/6 (k1 + 2 k2 + 2 k3 + k4)` with the classic stage weights.
pub fn rk4_step<E>(
    y: &[f64],
    dt: f64,
    mut rhs: impl FnMut(&[f64]) -> std::result::Result<Vec<f64>, E>,
) -> std::result::Result<Vec<f64>, E> {
    let stage =
        |k: &[f64], c: f64| -> Vec<f64> { y.iter().zip(k).map(|(a, b)| a + c * b).collect() };
    let k1 = rhs(y)?;
    let k2 = rhs(&stage(&k1, 0.5 * dt))?;
    let k3 = rhs(&stage(&k2, 0.5 * dt))?;
    let k4 = rhs(&stage(&k3, dt))?;
    Ok((0..y.len())
        .map(|i| y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeState {
    pub t: f64,
    pub pair: ContourPair,
    pub step_count: u64,
    pub dt_current: f64,
}

fn pair_from(template: &ContourPair, y: &[f64]) -> Result<ContourPair> {
    let n = template.grid().len();
    let f = template.f().with_values(y[..n].to_vec());
    let g = template.g().with_values(y[n..].to_vec());
    match (f, g) {
        (Ok(f), Ok(g)) => ContourPair::new(f, g, template.densities()),
        _ => {
            let idx = y.iter().position(|v| !v.is_finite()).unwrap_or(0) % n;
            let res = template.grid().resolution();
            Err(MuskatError::NumericalFailure {
                i: idx / res,
                j: idx % res,
                what: "non-finite height".into(),
            })
        }
    }
}

fn check_floor(pair: &ContourPair, floor: f64) -> Result<()> {
    let (gap, idx) = pair.min_gap_at();
    if gap <= floor {
        let n = pair.grid().resolution();
        return Err(MuskatError::ContourCollision {
            i: idx / n,
            j: idx % n,
            gap,
        });
    }
    Ok(())
}

/// One RK4 step of length `dt`; every stage is checked against the hard collision floor.
pub fn step_rk4(
    state: &TimeState,
    dt: f64,
    control: &StepControl,
    op: &InterfaceOperator,
) -> Result<TimeState> {
    check_floor(&state.pair, control.hard_floor)?;
    let mut y = state.pair.f().values().to_vec();
    y.extend_from_slice(state.pair.g().values());
    let next = rk4_step(&y, dt, |stage| {
        let pair = pair_from(&state.pair, stage)?;
        check_floor(&pair, control.hard_floor)?;
        let (ft, gt) = op.rhs(&pair)?;
        let mut k = ft;
        k.extend(gt);
        Ok::<_, MuskatError>(k)
    })?;
    let pair = pair_from(&state.pair, &next)?;
    check_floor(&pair, control.hard_floor)?;
    Ok(TimeState {
        t: state.t + dt,
        pair,
        step_count: state.step_count + 1,
        dt_current: dt,
    })
}

/// Result of [`Simulation::run`].
#[derive(Debug)]
pub struct RunOutcome {
    pub halt: HaltReason,
    /// The error that stopped the run, if any.
    pub error: Option<MuskatError>,
}

/// Owns the evolving state; a single writer advancing in fixed steps.
#[derive(Debug, Clone)]
pub struct Simulation {
    state: TimeState,
    control: StepControl,
    op: InterfaceOperator,
    dt: f64,
    t0: f64,
    base_steps: u64,
}

impl Simulation {
    pub fn new(pair: ContourPair, control: StepControl, op: InterfaceOperator) -> Result<Self> {
        control.validate()?;
        check_floor(&pair, control.hard_floor)?;
        let dt = stable_dt(pair.grid(), pair.densities(), &control);
        Ok(Simulation {
            state: TimeState {
                t: 0.0,
                pair,
                step_count: 0,
                dt_current: 0.0,
            },
            control,
            op,
            dt,
            t0: 0.0,
            base_steps: 0,
        })
    }

    /// Continues from a saved state at time `t` after `steps` steps.
    pub fn resume(mut self, t: f64, steps: u64) -> Self {
        self.state.t = t;
        self.state.step_count = steps;
        self.t0 = t;
        self.base_steps = steps;
        self
    }

    pub fn state(&self) -> &TimeState {
        &self.state
    }

    pub fn control(&self) -> &StepControl {
        &self.control
    }

    pub fn operator(&self) -> &InterfaceOperator {
        &self.op
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn finished(&self) -> bool {
        self.state.t >= self.control.t_end
    }

    /// Advances one step, shortened if needed to land on `t_end`.
    pub fn step(&mut self) -> Result<()> {
        let k = self.state.step_count + 1 - self.base_steps;
        let target = (self.t0 + k as f64 * self.dt).min(self.control.t_end);
        let dt = target - self.state.t;
        if dt <= 0.0 {
            return Ok(());
        }
        let mut next = step_rk4(&self.state, dt, &self.control, &self.op)?;
        next.t = target;
        self.state = next;
        Ok(())
    }

    fn over_cap(&self) -> bool {
        match self.control.amplitude_cap {
            Some(cap) => {
                let p = &self.state.pair;
                p.f().max_abs_deviation() > cap || p.g().max_abs_deviation() > cap
            }
            None => false,
        }
    }

    /// Steps to `t_end`, calling `observe` on the initial state, every `record_every`
    /// steps, and on the final state.
    pub fn run(
        &mut self,
        record_every: u64,
        mut observe: impl FnMut(&TimeState) -> Result<()>,
    ) -> Result<RunOutcome> {
        let every = record_every.max(1);
        observe(&self.state)?;
        let mut last_observed = self.state.step_count;
        while !self.finished() {
            if self.over_cap() {
                if last_observed != self.state.step_count {
                    observe(&self.state)?;
                }
                return Ok(RunOutcome {
                    halt: HaltReason::AmplitudeCap,
                    error: None,
                });
            }
            if let Err(e) = self.step() {
                if last_observed != self.state.step_count {
                    observe(&self.state)?;
                }
                let halt = match e {
                    MuskatError::ContourCollision { .. } => HaltReason::Collision,
                    MuskatError::NumericalFailure { .. } => HaltReason::NumericalFailure,
                    other => return Err(other),
                };
                return Ok(RunOutcome {
                    halt,
                    error: Some(e),
                });
            }
            if (self.state.step_count - self.base_steps).is_multiple_of(every) || self.finished() {
                observe(&self.state)?;
                last_observed = self.state.step_count;
            }
        }
        Ok(RunOutcome {
            halt: HaltReason::Completed,
            error: None,
        })
    }
}

/// One interface with nothing below it: the reference for the decoupled limit.
#[derive(Debug, Clone)]
pub struct SingleInterfaceRun {
    pub f: SurfaceField,
    pub t: f64,
    pub jump: f64,
    dt: f64,
    t_end: f64,
    steps: u64,
    op: InterfaceOperator,
}

impl SingleInterfaceRun {
    pub fn new(
        f: SurfaceField,
        jump: f64,
        control: &StepControl,
        op: InterfaceOperator,
    ) -> Result<Self> {
        control.validate()?;
        let dens = Densities::new(0.0, jump, jump);
        let dt = stable_dt(f.grid(), dens, control);
        Ok(SingleInterfaceRun {
            f,
            t: 0.0,
            jump,
            dt,
            t_end: control.t_end,
            steps: 0,
            op,
        })
    }

    pub fn step(&mut self) -> Result<()> {
        let target = ((self.steps + 1) as f64 * self.dt).min(self.t_end);
        let dt = target - self.t;
        if dt <= 0.0 {
            return Ok(());
        }
        let template = self.f.clone();
        let next = rk4_step(self.f.values(), dt, |stage| {
            let s = template.with_values(stage.to_vec())?;
            self.op.rhs_single(&s, self.jump)
        })?;
        self.f = self.f.with_values(next)?;
        self.t = target;
        self.steps += 1;
        Ok(())
    }

    pub fn run_to_end(&mut self) -> Result<()> {
        while self.t < self.t_end {
            self.step()?;
        }
        Ok(())
    }
}
