//! Time loop: CFL step selection, SSPRK4(10) stepping and ledger sampling.

use thiserror::Error;

use crate::diagnostics::RunLedger;
use crate::grid::{Grid, GridError, State};
use crate::problems::{initialize, ProblemError, ProblemSpec};
use crate::rhs::{compute_rhs, RhsStats, SchemeConfig, SolverError, Workspace};
use crate::timestep::{default_cfl, ssprk4_step, Registers, StageError, StepReport, TimeControl};
use crate::Real;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error("step {step} at t = {t}: {source}")]
    Solver {
        step: usize,
        t: f64,
        #[source]
        source: StageError<SolverError>,
    },
    #[error("time step collapsed to {0} at t = {1}")]
    StepCollapse(f64, f64),
}

impl RunError {
    /// True for an unphysical state that the fallback ladder could not repair.
    pub fn is_unphysical(&self) -> bool {
        matches!(self, RunError::Solver { .. } | RunError::StepCollapse(..))
    }
}

/// A problem being advanced in time.
pub struct Simulation<T: Real> {
    pub grid: Grid<T>,
    pub state: State<T>,
    pub scheme: SchemeConfig<T>,
    pub clock: TimeControl<T>,
    pub ledger: RunLedger,
    /// Record a ledger row every this many steps (0 disables periodic rows).
    pub ledger_every: usize,
    pub last: RhsStats<T>,
    ws: Workspace<T>,
    regs: Registers<State<T>>,
}

impl<T: Real> Simulation<T> {
    pub fn new(problem: &ProblemSpec, n: [usize; 3], scheme: SchemeConfig<T>, t_end: f64) -> Result<Self, RunError> {
        let grid = Grid::new(problem.grid_spec(n))?;
        let state = initialize(problem, &grid, &scheme.eos)?;
        let cfl = default_cfl(grid.dimensions());
        Ok(Self::from_state(grid, state, scheme, T::lit(cfl), T::lit(t_end)))
    }

    pub fn from_state(grid: Grid<T>, state: State<T>, scheme: SchemeConfig<T>, c_cfl: T, t_end: T) -> Self {
        let ws = Workspace::new(&grid);
        let regs = Registers::new(&state);
        let mut sim = Simulation {
            clock: TimeControl::new(c_cfl, t_end),
            ledger: RunLedger::default(),
            ledger_every: 1,
            last: RhsStats::default(),
            grid,
            state,
            scheme,
            ws,
            regs,
        };
        sim.record();
        sim
    }

    pub fn t(&self) -> f64 {
        self.clock.t.to_f64_lossy()
    }

    fn record(&mut self) {
        let (t, dt, flat) = (self.clock.t.to_f64_lossy(), self.clock.dt.to_f64_lossy(), self.last.flattened_fraction());
        self.ledger.record(&self.grid, &self.state, &self.scheme.eos, self.clock.step, t, dt, flat);
    }

    /// Advances one SSPRK step; the state is left untouched on error.
    pub fn step(&mut self) -> Result<StepReport<T, RhsStats<T>>, RunError> {
        let Simulation { grid, state, scheme, clock, ws, regs, .. } = self;
        let spacing = grid.spec.spacing;
        let mut trial = state.clone();
        let report = ssprk4_step(
            &mut trial,
            regs,
            |s, out| compute_rhs(grid, s, scheme, ws, out),
            |stats: &RhsStats<T>| clock.step_size(stats.max_speed, spacing),
        )
        .map_err(|source| RunError::Solver { step: clock.step + 1, t: clock.t.to_f64_lossy(), source })?;
        if !(report.dt > T::zero()) || !report.dt.is_finite() {
            return Err(RunError::StepCollapse(report.dt.to_f64_lossy(), clock.t.to_f64_lossy()));
        }
        *state = trial;
        state.fill_ghosts(grid);
        clock.advance(report.dt);
        self.last = report.first;
        if self.ledger_every > 0 && self.clock.step.is_multiple_of(self.ledger_every) {
            self.record();
        }
        Ok(report)
    }

    /// Steps until the end time; the final state is always recorded.
    pub fn run(&mut self) -> Result<(), RunError> {
        self.run_with(|_| {})
    }

    /// As [`Simulation::run`], calling `after_step` once per completed step.
    pub fn run_with(&mut self, mut after_step: impl FnMut(&Simulation<T>)) -> Result<(), RunError> {
        while !self.clock.finished() {
            self.step()?;
            after_step(self);
        }
        if self.ledger.rows.last().is_none_or(|r| r.step != self.clock.step) {
            self.record();
        }
        Ok(())
    }
}
