//! Error norms, convergence orders, conserved totals and spectra.

use rustfft::num_complex::Complex64;
use thiserror::Error;

use crate::eos::{Eos, EN, MX, RHO};
use crate::grid::{Axis, FaceField, Grid, State};
use crate::rhs::{cell_average_b, max_abs_divergence};
use crate::spectral::{fft3, wavenumber};
use crate::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticsError {
    #[error("grids differ: {0:?} vs {1:?}")]
    GridMismatch([usize; 3], [usize; 3]),
    #[error("resolution {fine:?} is not an integer multiple of {coarse:?}")]
    NotNested { fine: [usize; 3], coarse: [usize; 3] },
}

/// Deterministic pairwise sum.
pub fn pairwise_sum(x: &[f64]) -> f64 {
    if x.len() <= 32 {
        x.iter().sum()
    } else {
        let (a, b) = x.split_at(x.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

/// L1 errors of the eight (seven when isothermal) variables.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorReport {
    /// `rho, mx, my, mz, [e], bx, by, bz`
    pub per_variable: Vec<f64>,
    pub mean: f64,
    pub resolution: [usize; 3],
}

impl ErrorReport {
    pub fn density(&self) -> f64 {
        self.per_variable[0]
    }
}

/// Mean absolute difference per variable over interior cells; magnetic
/// components are compared on the lower face of every cell.
pub fn l1_error<T: Real>(grid: &Grid<T>, a: &State<T>, b: &State<T>, eos: &Eos<T>) -> ErrorReport {
    let slots: Vec<usize> = (0..5).filter(|&q| q != EN || !eos.is_isothermal()).collect();
    let mut columns: Vec<Vec<f64>> = vec![Vec::with_capacity(grid.cell_count()); slots.len() + 3];
    grid.for_each_interior(|_, _, _, c| {
        for (col, &q) in slots.iter().enumerate() {
            columns[col].push((a.cells[c][q] - b.cells[c][q]).abs().to_f64_lossy());
        }
        for d in 0..3 {
            columns[slots.len() + d].push((a.faces.comp[d][c] - b.faces.comp[d][c]).abs().to_f64_lossy());
        }
    });
    let n = grid.cell_count() as f64;
    let per_variable: Vec<f64> = columns.iter().map(|c| pairwise_sum(c) / n).collect();
    let mean = per_variable.iter().sum::<f64>() / per_variable.len() as f64;
    ErrorReport { per_variable, mean, resolution: grid.spec.n }
}

/// Experimental order of convergence between two runs.
pub fn eoc(e0: f64, r0: f64, e1: f64, r1: f64) -> f64 {
    (e1.ln() - e0.ln()).abs() / (r1.ln() - r0.ln()).abs()
}

/// Orders along a sequence of `(resolution, error)` pairs; the first entry has none.
pub fn eoc_column(rows: &[(usize, f64)]) -> Vec<Option<f64>> {
    let mut out = vec![None];
    for w in rows.windows(2) {
        out.push(Some(eoc(w[0].1, w[0].0 as f64, w[1].1, w[1].0 as f64)));
    }
    out.truncate(rows.len());
    out
}

/// Box totals and energy split.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Totals {
    pub mass: f64,
    pub momentum: [f64; 3],
    /// Total energy; kinetic plus magnetic when isothermal.
    pub energy: f64,
    pub kinetic: f64,
    pub magnetic: f64,
    pub internal: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    pub max_mach: f64,
}

/// Volume-integrated totals. Magnetic energy uses fourth-order cell averages
/// of the face field.
pub fn totals<T: Real>(grid: &Grid<T>, state: &State<T>, eos: &Eos<T>) -> Totals {
    let mut bc = grid.alloc([T::zero(); 3]);
    let mut st = state.clone();
    st.fill_ghosts(grid);
    cell_average_b(grid, &st.faces, &mut bc);
    let dv = grid.cell_volume().to_f64_lossy();
    let mut cols: [Vec<f64>; 8] = std::array::from_fn(|_| Vec::with_capacity(grid.cell_count()));
    let (mut rmin, mut rmax, mut mach) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
    grid.for_each_interior(|_, _, _, c| {
        let u = st.cells[c].map(|x| x.to_f64_lossy());
        let b = bc[c].map(|x| x.to_f64_lossy());
        let m2 = u[1] * u[1] + u[2] * u[2] + u[3] * u[3];
        let kin = 0.5 * m2 / u[RHO];
        let mag = 0.5 * (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]);
        let (energy, internal, cs2) = match *eos {
            Eos::Adiabatic { gamma } => {
                let g = gamma.to_f64_lossy();
                let eint = u[EN] - kin - mag;
                (u[EN], eint, g * (g - 1.0) * eint / u[RHO])
            }
            Eos::Isothermal { cs } => (kin + mag, 0.0, cs.to_f64_lossy().powi(2)),
        };
        for (col, v) in cols.iter_mut().zip([u[0], u[1], u[2], u[3], energy, kin, mag, internal]) {
            col.push(v);
        }
        rmin = rmin.min(u[RHO]);
        rmax = rmax.max(u[RHO]);
        mach = mach.max((m2.sqrt() / u[RHO]) / cs2.max(0.0).sqrt());
    });
    let s: [f64; 8] = std::array::from_fn(|q| pairwise_sum(&cols[q]) * dv);
    Totals {
        mass: s[0],
        momentum: [s[1], s[2], s[3]],
        energy: s[4],
        kinetic: s[5],
        magnetic: s[6],
        internal: s[7],
        rho_min: rmin,
        rho_max: rmax,
        max_mach: mach,
    }
}

/// Kinetic plus magnetic energy of the fluctuations: box-mean velocity and
/// box-mean field are removed first. The field enters through its face values.
pub fn fluctuation_energy<T: Real>(grid: &Grid<T>, state: &State<T>) -> f64 {
    let n = grid.cell_count() as f64;
    let mut v: [Vec<f64>; 3] = std::array::from_fn(|_| Vec::with_capacity(grid.cell_count()));
    let mut b: [Vec<f64>; 3] = std::array::from_fn(|_| Vec::with_capacity(grid.cell_count()));
    let mut rho = Vec::with_capacity(grid.cell_count());
    grid.for_each_interior(|_, _, _, c| {
        let u = state.cells[c].map(|x| x.to_f64_lossy());
        rho.push(u[RHO]);
        for d in 0..3 {
            v[d].push(u[MX + d] / u[RHO]);
            b[d].push(state.faces.comp[d][c].to_f64_lossy());
        }
    });
    let vm: [f64; 3] = std::array::from_fn(|d| pairwise_sum(&v[d]) / n);
    let bm: [f64; 3] = std::array::from_fn(|d| pairwise_sum(&b[d]) / n);
    let e: Vec<f64> = (0..rho.len())
        .map(|p| {
            (0..3).map(|d| 0.5 * rho[p] * (v[d][p] - vm[d]).powi(2) + 0.5 * (b[d][p] - bm[d]).powi(2)).sum::<f64>()
        })
        .collect();
    pairwise_sum(&e) * grid.cell_volume().to_f64_lossy()
}

/// Relative loss of fluctuation energy between two instants.
pub fn e_loss(e0: f64, e1: f64) -> f64 {
    (e0 - e1) / e0
}

/// One row of the run ledger.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LedgerRow {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    pub totals: Totals,
    pub fluctuation: f64,
    pub e_loss: f64,
    pub max_div_b: f64,
    pub flattened_fraction: f64,
}

/// Column names of [`LedgerRow::values`], stable within a schema version.
pub const LEDGER_COLUMNS: [&str; 19] = [
    "step",
    "t",
    "dt",
    "mass",
    "momentum_x",
    "momentum_y",
    "momentum_z",
    "energy",
    "kinetic",
    "magnetic",
    "internal",
    "fluctuation_energy",
    "e_loss",
    "max_div_b",
    "max_mach",
    "rho_max",
    "rho_min",
    "flattened_fraction",
    "schema",
];

pub const LEDGER_SCHEMA: u32 = 1;

impl LedgerRow {
    pub fn values(&self) -> [f64; 19] {
        let t = &self.totals;
        [
            self.step as f64,
            self.t,
            self.dt,
            t.mass,
            t.momentum[0],
            t.momentum[1],
            t.momentum[2],
            t.energy,
            t.kinetic,
            t.magnetic,
            t.internal,
            self.fluctuation,
            self.e_loss,
            self.max_div_b,
            t.max_mach,
            t.rho_max,
            t.rho_min,
            self.flattened_fraction,
            LEDGER_SCHEMA as f64,
        ]
    }
}

/// Time series of conserved totals and health indicators.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunLedger {
    pub rows: Vec<LedgerRow>,
}

impl RunLedger {
    /// Appends a row for `state`; `e_loss` is relative to the first row.
    pub fn record<T: Real>(&mut self, grid: &Grid<T>, state: &State<T>, eos: &Eos<T>, step: usize, t: f64, dt: f64, flat: f64) {
        let fluct = fluctuation_energy(grid, state);
        let e0 = self.rows.first().map_or(fluct, |r| r.fluctuation);
        self.rows.push(LedgerRow {
            step,
            t,
            dt,
            totals: totals(grid, state, eos),
            fluctuation: fluct,
            e_loss: if e0 > 0.0 { e_loss(e0, fluct) } else { 0.0 },
            max_div_b: max_abs_divergence(grid, &state.faces).to_f64_lossy(),
            flattened_fraction: flat,
        });
    }

    pub fn max_div_b(&self) -> f64 {
        self.rows.iter().map(|r| r.max_div_b).fold(0.0, f64::max)
    }

    /// Largest relative change of mass and energy and largest absolute change
    /// of any momentum component with respect to the first row.
    pub fn drift(&self) -> (f64, [f64; 3], f64) {
        let Some(first) = self.rows.first() else { return (0.0, [0.0; 3], 0.0) };
        let (mut dm, mut dp, mut de) = (0.0f64, [0.0f64; 3], 0.0f64);
        for r in &self.rows {
            dm = dm.max(((r.totals.mass - first.totals.mass) / first.totals.mass).abs());
            de = de.max(((r.totals.energy - first.totals.energy) / first.totals.energy).abs());
            for d in 0..3 {
                dp[d] = dp[d].max((r.totals.momentum[d] - first.totals.momentum[d]).abs());
            }
        }
        (dm, dp, de)
    }

    /// Time of largest dissipation rate `-dE_T/dt`, taken at interval midpoints.
    pub fn eddy_turnover_time(&self) -> Option<f64> {
        self.rows
            .windows(2)
            .filter(|w| w[1].t > w[0].t)
            .map(|w| (0.5 * (w[0].t + w[1].t), -(w[1].fluctuation - w[0].fluctuation) / (w[1].t - w[0].t)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|x| x.0)
    }

    /// Least-squares slope of `max |div B|` against time.
    pub fn divergence_trend(&self) -> f64 {
        let n = self.rows.len() as f64;
        if n < 2.0 {
            return 0.0;
        }
        let mt = self.rows.iter().map(|r| r.t).sum::<f64>() / n;
        let md = self.rows.iter().map(|r| r.max_div_b).sum::<f64>() / n;
        let sxy: f64 = self.rows.iter().map(|r| (r.t - mt) * (r.max_div_b - md)).sum();
        let sxx: f64 = self.rows.iter().map(|r| (r.t - mt).powi(2)).sum();
        if sxx > 0.0 {
            sxy / sxx
        } else {
            0.0
        }
    }
}

/// Shell-binned spectrum of `sqrt(rho) v` and `B` (cell-centred by a
/// two-point face average). `E(k)` sums `|f_hat|^2 dV / (2N)` over the modes
/// with `round(|k|) = k`, with `k` in units of the box wavenumber, so the
/// shells add up to the fluctuation energy of the two fields.
pub fn energy_spectrum<T: Real>(grid: &Grid<T>, state: &State<T>) -> Vec<f64> {
    let n = grid.spec.n;
    let len = n[0] * n[1] * n[2];
    let mut fields: Vec<Vec<Complex64>> = vec![Vec::with_capacity(len); 6];
    let mut st = state.clone();
    st.fill_ghosts(grid);
    grid.for_each_interior(|i, j, k, c| {
        let u = st.cells[c].map(|x| x.to_f64_lossy());
        let sq = u[RHO].sqrt();
        for d in 0..3 {
            fields[d].push(Complex64::new(u[MX + d] / u[RHO] * sq, 0.0));
            let ax = Axis::from_index(d);
            let up = [i, j, k];
            let mut nb = up;
            nb[d] += 1;
            let hi = if grid.active(ax) { st.faces.comp[d][grid.idx3(nb)] } else { st.faces.comp[d][c] };
            let b = 0.5 * (st.faces.comp[d][c] + hi).to_f64_lossy();
            fields[3 + d].push(Complex64::new(b, 0.0));
        }
    });
    let kmax = (0..3).map(|a| n[a] / 2).map(|x| x * x).sum::<usize>() as f64;
    let mut spec = vec![0.0; kmax.sqrt().ceil() as usize + 2];
    let scale = grid.cell_volume().to_f64_lossy() / (2.0 * len as f64);
    for f in fields.iter_mut() {
        fft3(f, n, false);
        for m2 in 0..n[2] {
            for m1 in 0..n[1] {
                for m0 in 0..n[0] {
                    let k = [wavenumber(m0, n[0]), wavenumber(m1, n[1]), wavenumber(m2, n[2])];
                    if k == [0; 3] {
                        continue;
                    }
                    let kk = ((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64).sqrt();
                    spec[kk.round() as usize] += f[m0 + n[0] * (m1 + n[1] * m2)].norm_sqr() * scale;
                }
            }
        }
    }
    spec
}

/// Integer refinement factor per axis between `coarse` and `fine`.
pub fn refinement_ratio(fine: [usize; 3], coarse: [usize; 3]) -> Result<[usize; 3], DiagnosticsError> {
    let mut r = [1; 3];
    for a in 0..3 {
        if coarse[a] == 0 || !fine[a].is_multiple_of(coarse[a]) {
            return Err(DiagnosticsError::NotNested { fine, coarse });
        }
        r[a] = fine[a] / coarse[a];
    }
    Ok(r)
}

/// Exact restriction of a fine solution to a nested coarse grid: coarse cell
/// averages are means of the covered fine cells, coarse face averages are
/// means of the fine faces tiling them.
pub fn restrict<T: Real>(fine_grid: &Grid<T>, fine: &State<T>, coarse_grid: &Grid<T>) -> Result<State<T>, DiagnosticsError> {
    let r = refinement_ratio(fine_grid.spec.n, coarse_grid.spec.n)?;
    let mut out = State::zeros(coarse_grid);
    let ri = r.map(|x| x as isize);
    let inv_cells = 1.0 / (r[0] * r[1] * r[2]) as f64;
    coarse_grid.for_each_interior(|i, j, k, c| {
        let base = [i * ri[0], j * ri[1], k * ri[2]];
        let mut acc = [0.0; 5];
        let mut faces = [0.0; 3];
        for dz in 0..ri[2] {
            for dy in 0..ri[1] {
                for dx in 0..ri[0] {
                    let off = [dx, dy, dz];
                    let p = [base[0] + dx, base[1] + dy, base[2] + dz];
                    let f = fine_grid.idx3(p);
                    for q in 0..5 {
                        acc[q] += fine.cells[f][q].to_f64_lossy();
                    }
                    for a in 0..3 {
                        if off[a] == 0 {
                            faces[a] += fine.faces.comp[a][f].to_f64_lossy();
                        }
                    }
                }
            }
        }
        out.cells[c] = acc.map(|x| T::lit(x * inv_cells));
        for a in 0..3 {
            out.faces.comp[a][c] = T::lit(faces[a] * inv_cells * r[a] as f64);
        }
    });
    out.fill_ghosts(coarse_grid);
    Ok(out)
}

/// Total variation of one cell variable along x, summed over all rows.
pub fn total_variation<T: Real>(grid: &Grid<T>, state: &State<T>, slot: usize) -> f64 {
    let nx = grid.n(Axis::X) as isize;
    let mut tv = 0.0;
    grid.for_each_interior(|i, j, k, c| {
        if i + 1 < nx {
            tv += (state.cells[grid.idx(i + 1, j, k)][slot] - state.cells[c][slot]).abs().to_f64_lossy();
        }
    });
    tv
}

/// Largest absolute face divergence, for use with fields not wrapped in a state.
pub fn max_div<T: Real>(grid: &Grid<T>, faces: &FaceField<T>) -> f64 {
    max_abs_divergence(grid, faces).to_f64_lossy()
}
