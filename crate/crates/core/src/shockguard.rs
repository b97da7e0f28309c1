//! Pressure-jump flattening and the ladder of local fallbacks applied when a
//! reconstruction produces an unphysical state.

use rayon::prelude::*;
use thiserror::Error;

use crate::eos::{pressure_from_conserved, Conserved, Eos};
use crate::grid::{Axis, Grid, NCONS};
use crate::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlattenerParams<T> {
    pub enabled: bool,
    pub tau_ho: T,
    pub tau_lo: T,
}

impl<T: Real> Default for FlattenerParams<T> {
    fn default() -> Self {
        FlattenerParams { enabled: false, tau_ho: T::one(), tau_lo: T::lit(2.0) }
    }
}

impl<T: Real> FlattenerParams<T> {
    pub fn is_valid(&self) -> bool {
        self.tau_ho > T::zero() && self.tau_ho < self.tau_lo
    }
}

#[derive(Debug, Error, Clone, Copy, PartialEq)]
#[error("non-positive pressure estimate {value} in cell {cell:?}")]
pub struct NonPositivePressureEstimate {
    pub cell: [isize; 3],
    pub value: f64,
}

/// `|p_{i+1} - p_{i-1}| / p_i`.
#[inline]
pub fn shock_indicator<T: Real>(pm: T, p0: T, pp: T) -> Option<T> {
    (p0 > T::zero()).then(|| (pp - pm).abs() / p0)
}

#[inline]
pub fn flattener<T: Real>(s: T, params: &FlattenerParams<T>) -> T {
    if s < params.tau_ho {
        T::one()
    } else if s > params.tau_lo {
        T::zero()
    } else {
        T::one() - (s - params.tau_ho) / (params.tau_lo - params.tau_ho)
    }
}

/// Flattener of a face transform: the minimum of the inputs, which are the
/// transverse-direction flatteners of the two adjacent cells.
#[inline]
pub fn face_flattener<T: Real>(inputs: &[T]) -> T {
    inputs.iter().copied().fold(T::one(), T::min)
}

/// Rungs of the a-posteriori ladder, from the configured kernel down to
/// piecewise-constant states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum FallbackLevel {
    HighOrder,
    Tvd2,
    Godunov,
}

impl FallbackLevel {
    pub fn next(self) -> Option<FallbackLevel> {
        match self {
            FallbackLevel::HighOrder => Some(FallbackLevel::Tvd2),
            FallbackLevel::Tvd2 => Some(FallbackLevel::Godunov),
            FallbackLevel::Godunov => None,
        }
    }
}

/// Runs `attempt` on successive rungs until it succeeds; returns the result
/// with the rung that produced it, or the last error once the ladder is spent.
pub fn with_fallback<R, E>(
    start: FallbackLevel,
    enabled: bool,
    mut attempt: impl FnMut(FallbackLevel) -> Result<R, E>,
) -> Result<(R, FallbackLevel), E> {
    let mut level = start;
    loop {
        match attempt(level) {
            Ok(r) => return Ok((r, level)),
            Err(e) => match level.next() {
                Some(l) if enabled => level = l,
                _ => return Err(e),
            },
        }
    }
}

/// Pressure estimate of every cell, treating the cell averages (with the
/// cell-averaged field `bc`) as point values.
pub fn pressure_estimate<T: Real>(cells: &[[T; NCONS]], bc: &[[T; 3]], eos: &Eos<T>) -> Vec<T> {
    cells
        .par_iter()
        .zip(bc.par_iter())
        .map(|(u, b)| {
            let c = Conserved([u[0], u[1], u[2], u[3], u[4], b[0], b[1], b[2]]);
            match *eos {
                Eos::Isothermal { cs } => u[0] * cs * cs,
                _ => pressure_from_conserved(&c, eos).unwrap_or_else(|_| T::zero()),
            }
        })
        .collect()
}

/// Per-axis cell flatteners on the interior; ghosts are filled afterwards.
/// Inactive axes get 1.
pub fn cell_flatteners<T: Real>(
    grid: &Grid<T>,
    p: &[T],
    params: &FlattenerParams<T>,
) -> Result<Vec<[T; 3]>, NonPositivePressureEstimate> {
    let mut out = grid.alloc([T::one(); 3]);
    let strides = Axis::ALL.map(|a| grid.stride(a));
    let bad = std::sync::Mutex::new(None);
    grid.for_rows(&mut out, &grid.interior(), |j, k, row| {
        for i in 0..grid.n(Axis::X) as isize {
            let c = grid.idx(i, j, k);
            let mut w = [T::one(); 3];
            for a in Axis::ALL {
                let s = strides[a.index()];
                if s == 0 {
                    continue;
                }
                let (pm, p0, pp) = (p[(c as isize - s) as usize], p[c], p[(c as isize + s) as usize]);
                match shock_indicator(pm, p0, pp) {
                    Some(sv) => w[a.index()] = flattener(sv, params),
                    None => {
                        let mut b = bad.lock().unwrap();
                        // keep the lowest (k, j, i) so the report is independent of scheduling
                        let first = b.as_ref().is_none_or(|e: &NonPositivePressureEstimate| {
                            [k, j, i] < [e.cell[2], e.cell[1], e.cell[0]]
                        });
                        if first {
                            *b = Some(NonPositivePressureEstimate { cell: [i, j, k], value: p0.to_f64_lossy() });
                        }
                    }
                }
            }
            row[grid.row_index(i)] = w;
        }
    });
    if let Some(e) = bad.into_inner().unwrap() {
        return Err(e);
    }
    grid.fill_ghosts(&mut out);
    Ok(out)
}
