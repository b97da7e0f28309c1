//! Ten-stage fourth-order strong-stability-preserving Runge-Kutta step and
//! the CFL time-step bound.

use thiserror::Error;

use crate::grid::State;
use crate::Real;

/// Vector-space operations the integrator needs on a stage register.
pub trait Register: Clone {
    type Scalar: Real;
    /// `self += a * x`
    fn axpy(&mut self, a: Self::Scalar, x: &Self);
    /// `self = a * x + b * y`
    fn lincomb(&mut self, a: Self::Scalar, x: &Self, b: Self::Scalar, y: &Self);
}

impl<T: Real> Register for State<T> {
    type Scalar = T;

    fn axpy(&mut self, a: T, x: &Self) {
        self.add_scaled(a, x);
    }

    fn lincomb(&mut self, a: T, x: &Self, b: T, y: &Self) {
        self.assign_combination(a, x, b, y);
    }
}

impl<T: Real> Register for Vec<T> {
    type Scalar = T;

    fn axpy(&mut self, a: T, x: &Self) {
        for (u, v) in self.iter_mut().zip(x) {
            *u += a * *v;
        }
    }

    fn lincomb(&mut self, a: T, x: &Self, b: T, y: &Self) {
        for ((u, p), q) in self.iter_mut().zip(x).zip(y) {
            *u = a * *p + b * *q;
        }
    }
}

/// The three registers of the low-storage scheme: `k1`, `k2` and the
/// right-hand side buffer.
pub struct Registers<S> {
    pub k1: S,
    pub k2: S,
    pub f: S,
}

impl<S: Register> Registers<S> {
    pub fn new(template: &S) -> Self {
        Registers { k1: template.clone(), k2: template.clone(), f: template.clone() }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("stage {stage}: {source}")]
pub struct StageError<E: std::error::Error + 'static> {
    pub stage: usize,
    #[source]
    pub source: E,
}

/// Outcome of one step.
#[derive(Clone, Debug, PartialEq)]
pub struct StepReport<T, R> {
    pub dt: T,
    pub rhs_calls: usize,
    /// What the first right-hand-side evaluation returned.
    pub first: R,
}

pub const STAGES: usize = 10;

/// Advances `w` by one step. The step size is chosen by `pick_dt` from the
/// result of the first right-hand-side evaluation and frozen for the
/// remaining stages. `rhs(state, out)` writes the derivative into `out`.
pub fn ssprk4_step<S, R, E>(
    w: &mut S,
    regs: &mut Registers<S>,
    mut rhs: impl FnMut(&mut S, &mut S) -> Result<R, E>,
    pick_dt: impl FnOnce(&R) -> S::Scalar,
) -> Result<StepReport<S::Scalar, R>, StageError<E>>
where
    S: Register,
    E: std::error::Error + 'static,
{
    let t = |x: f64| S::Scalar::lit(x);
    let Registers { k1, k2, f } = regs;
    k1.clone_from(w);
    let first = rhs(k1, f).map_err(|source| StageError { stage: 1, source })?;
    let dt = pick_dt(&first);
    let sixth = dt / t(6.0);
    k1.axpy(sixth, f);
    let mut calls = 1;
    for stage in 2..=5 {
        rhs(k1, f).map_err(|source| StageError { stage, source })?;
        k1.axpy(sixth, f);
        calls += 1;
    }
    k2.lincomb(t(1.0 / 25.0), w, t(9.0 / 25.0), k1);
    let k1_old = k1.clone();
    k1.lincomb(t(15.0), k2, t(-5.0), &k1_old);
    for stage in 6..=9 {
        rhs(k1, f).map_err(|source| StageError { stage, source })?;
        k1.axpy(sixth, f);
        calls += 1;
    }
    rhs(k1, f).map_err(|source| StageError { stage: 10, source })?;
    calls += 1;
    w.lincomb(t(1.0), k2, t(3.0 / 5.0), k1);
    w.axpy(dt / t(10.0), f);
    Ok(StepReport { dt, rhs_calls: calls, first })
}

/// Default Courant number for a problem with `dims` active axes.
pub fn default_cfl(dims: usize) -> f64 {
    if dims >= 3 {
        1.55
    } else {
        1.95
    }
}

/// `C * min_n (dn / a^n)` over axes with a positive speed; infinite when
/// nothing propagates.
pub fn cfl_dt<T: Real>(max_speed: [T; 3], spacing: [T; 3], c_cfl: T) -> T {
    let mut m = T::infinity();
    for a in 0..3 {
        if max_speed[a] > T::zero() {
            m = m.min(spacing[a] / max_speed[a]);
        }
    }
    c_cfl * m
}

/// Simulation clock.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeControl<T> {
    pub c_cfl: T,
    pub t: T,
    pub dt: T,
    pub t_end: T,
    pub step: usize,
}

impl<T: Real> TimeControl<T> {
    pub fn new(c_cfl: T, t_end: T) -> Self {
        TimeControl { c_cfl, t: T::zero(), dt: T::zero(), t_end, step: 0 }
    }

    /// Step size from the CFL bound, clipped so the final step lands on `t_end`.
    pub fn step_size(&self, max_speed: [T; 3], spacing: [T; 3]) -> T {
        cfl_dt(max_speed, spacing, self.c_cfl).min(self.t_end - self.t)
    }

    pub fn advance(&mut self, dt: T) {
        self.dt = dt;
        self.step += 1;
        // land exactly on the end time despite rounding
        self.t = if self.t_end - self.t <= dt { self.t_end } else { self.t + dt };
    }

    pub fn finished(&self) -> bool {
        self.t >= self.t_end
    }
}
