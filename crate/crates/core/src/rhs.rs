//! Right-hand side of the semi-discrete system: cell-average updates from
//! area-averaged fluxes and face-field updates by constrained transport.
//!
//! The pipeline per evaluation:
//! 1. cell-averaged B from the face values, flatteners (when enabled);
//! 2. per active axis: reconstruct face states, convert to point values,
//!    Rusanov fluxes and point electric fields, back to area averages,
//!    flux differences;
//! 3. per edge orientation: area-to-line reconstruction of E and B on the
//!    four adjacent faces, LLF edge field, then the induction update.
//!
//! Intermediate face/cell arrays are computed on the interior and their
//! ghosts refilled, which keeps the ghost width at five layers.

use std::sync::Mutex;

use rayon::prelude::*;
use thiserror::Error;

use crate::eos::{electric_field, pressure_from_conserved, primitive_from_conserved, Conserved, Eos, PhysicsError, Primitive};
use crate::grid::{Axis, EdgeField, FaceField, Grid, Range3, State, NCONS};
use crate::reconstruct::{
    blended_pair, reconstruct_cell, smoothness_indicators, weights_from_indicators, GsiMode, GsiVars, ReconOptions,
    Reconstruction,
};
use crate::riemann::{edge_electric, llf_flux_primitive, EdgeStates};
use crate::shockguard::{cell_flatteners, face_flattener, pressure_estimate, with_fallback, FallbackLevel, FlattenerParams, NonPositivePressureEstimate};
use crate::transforms::{area_to_point, face_b_to_cell_avg, point_to_area, TransverseStencil};
use crate::Real;

/// Named scheme variants.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    /// CWENO4 with point-value passage.
    Cweno4,
    /// CWENO4 feeding area averages straight into the Riemann solver.
    Cweno4A,
    /// CWENO4 with the a-priori flattener.
    Cweno4Fb,
    /// Second-order van Leer reconstruction everywhere, no transforms.
    Tvd2,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Cweno4 => "cweno4",
            Scheme::Cweno4A => "cweno4a",
            Scheme::Cweno4Fb => "cweno4fb",
            Scheme::Tvd2 => "tvd2",
        }
    }

    pub fn parse(s: &str) -> Option<Scheme> {
        [Scheme::Cweno4, Scheme::Cweno4A, Scheme::Cweno4Fb, Scheme::Tvd2].into_iter().find(|x| x.name() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchemeConfig<T> {
    pub scheme: Scheme,
    pub recon: ReconOptions<T>,
    /// Area/point conversions of face states, fluxes and electric fields.
    pub transforms: bool,
    pub flattener: FlattenerParams<T>,
    /// A-posteriori fallback ladder on unphysical reconstructions.
    pub fallback: bool,
    pub eos: Eos<T>,
}

impl<T: Real> SchemeConfig<T> {
    pub fn new(scheme: Scheme, eos: Eos<T>) -> Self {
        let mut recon = ReconOptions::default();
        let mut flattener = FlattenerParams::default();
        let transforms = matches!(scheme, Scheme::Cweno4 | Scheme::Cweno4Fb);
        match scheme {
            Scheme::Tvd2 => recon.method = Reconstruction::Tvd2,
            Scheme::Cweno4Fb => flattener.enabled = true,
            _ => {}
        }
        SchemeConfig { scheme, recon, transforms, flattener, fallback: true, eos }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("unphysical state in cell {location:?} during {stage}: {source}")]
    UnphysicalState { location: [isize; 3], stage: &'static str, source: PhysicsError },
    #[error(transparent)]
    PressureEstimate(#[from] NonPositivePressureEstimate),
}

/// Per-evaluation bookkeeping.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RhsStats<T> {
    /// Largest face signal speed along each axis (zero for inactive axes).
    pub max_speed: [T; 3],
    pub reconstructions: usize,
    /// Cell reconstructions with a flattener below one.
    pub flattened: usize,
    /// Cell reconstructions that dropped to a lower rung of the ladder.
    pub fallbacks: usize,
}

impl<T: Real> RhsStats<T> {
    pub fn flattened_fraction(&self) -> f64 {
        if self.reconstructions == 0 {
            0.0
        } else {
            self.flattened as f64 / self.reconstructions as f64
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct CellRec<T> {
    /// State at the upper face `i + 1/2`.
    w: [T; 8],
    /// State at the lower face `i - 1/2`.
    e: [T; 8],
    level: u8,
    flat: bool,
}

#[derive(Clone, Copy, Debug, Default)]
struct FacePoint<T> {
    flux: [T; NCONS],
    /// Point `(E_b^W, E_b^E, E_c^W, E_c^E)` for the transverse pair `(b, c)`.
    e: [T; 4],
    wf: T,
    speed: T,
}

#[derive(Clone, Copy, Debug, Default)]
struct LineRec<T> {
    up: [T; 3],
    lo: [T; 3],
}

/// Reusable buffers for [`compute_rhs`].
pub struct Workspace<T> {
    bc: Vec<[T; 3]>,
    wf: Vec<[T; 3]>,
    gsi: [Vec<[T; 3]>; 3],
    cellrec: Vec<CellRec<T>>,
    point: Vec<FacePoint<T>>,
    flux: Vec<[T; NCONS]>,
    /// Area-averaged two-sided transverse E and area-averaged two-sided
    /// transverse B on each face family: `(E_b^W, E_b^E, E_c^W, E_c^E, B_b^W, B_b^E, B_c^W, B_c^E)`.
    ein: [Vec<[T; 8]>; 3],
    speed: [Vec<T>; 3],
    line_a: Vec<LineRec<T>>,
    line_b: Vec<LineRec<T>>,
    pub edge: EdgeField<T>,
}

impl<T: Real> Workspace<T> {
    pub fn new(grid: &Grid<T>) -> Self {
        let z3 = [T::zero(); 3];
        let active: [bool; 3] = Axis::ALL.map(|a| grid.active(a));
        let per_axis = |fill: [T; 3]| -> [Vec<[T; 3]>; 3] {
            std::array::from_fn(|a| if active[a] { grid.alloc(fill) } else { Vec::new() })
        };
        Workspace {
            bc: grid.alloc(z3),
            wf: grid.alloc([T::one(); 3]),
            gsi: per_axis(z3),
            cellrec: grid.alloc(CellRec::default()),
            point: grid.alloc(FacePoint::default()),
            flux: grid.alloc([T::zero(); NCONS]),
            ein: std::array::from_fn(|a| if active[a] { grid.alloc([T::zero(); 8]) } else { Vec::new() }),
            speed: std::array::from_fn(|a| if active[a] { grid.alloc(T::zero()) } else { Vec::new() }),
            line_a: grid.alloc(LineRec::default()),
            line_b: grid.alloc(LineRec::default()),
            edge: EdgeField::zeros(grid),
        }
    }
}

/// Interior box widened by `(lo, hi)` along each active axis.
fn span<T: Real>(grid: &Grid<T>, m: [(isize, isize); 3]) -> Range3 {
    let mut r = grid.interior();
    for a in grid.active_axes() {
        let i = a.index();
        r.lo[i] -= m[i].0;
        r.hi[i] += m[i].1;
    }
    r
}

/// Writes `f(i, j, k, idx)` into `out[idx]` over `range`, in parallel by row.
fn par_fill<T, V, F>(grid: &Grid<T>, out: &mut [V], range: &Range3, f: F)
where
    T: Real,
    V: Send,
    F: Fn(isize, isize, isize, usize) -> V + Sync + Send,
{
    grid.for_rows(out, range, |j, k, row| {
        for i in range.lo[0]..range.hi[0] {
            row[grid.row_index(i)] = f(i, j, k, grid.idx(i, j, k));
        }
    });
}

/// Keeps the first error raised by any worker.
struct FirstError(Mutex<Option<SolverError>>);

impl FirstError {
    fn new() -> Self {
        FirstError(Mutex::new(None))
    }

    /// Keeps the error of the lowest `(k, j, i)` so the report does not
    /// depend on thread scheduling.
    fn set(&self, e: SolverError) {
        let key = |e: &SolverError| match e {
            SolverError::UnphysicalState { location: l, .. } => [l[2], l[1], l[0]],
            SolverError::PressureEstimate(p) => [p.cell[2], p.cell[1], p.cell[0]],
        };
        let mut g = self.0.lock().unwrap();
        if g.as_ref().is_none_or(|old| key(&e) < key(old)) {
            *g = Some(e);
        }
    }

    fn take(self) -> Result<(), SolverError> {
        match self.0.into_inner().unwrap() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

#[inline(always)]
fn off(idx: usize, d: isize) -> usize {
    (idx as isize + d) as usize
}

/// Cell-averaged field from the face values, on every cell with ghosts filled.
pub fn cell_average_b<T: Real>(grid: &Grid<T>, faces: &FaceField<T>, out: &mut [[T; 3]]) {
    let strides = Axis::ALL.map(|a| grid.stride(a));
    par_fill(grid, out, &grid.interior(), |_, _, _, c| {
        std::array::from_fn(|a| {
            let (f, s) = (&faces.comp[a], strides[a]);
            if s == 0 {
                f[c]
            } else {
                face_b_to_cell_avg([f[off(c, -s)], f[c], f[off(c, s)], f[off(c, 2 * s)]])
            }
        })
    });
    grid.fill_ghosts(out);
}

/// Discrete divergence of the face field on every interior cell.
pub fn divergence_b<T: Real>(grid: &Grid<T>, faces: &FaceField<T>) -> Vec<T> {
    let mut out = Vec::with_capacity(grid.cell_count());
    let strides = Axis::ALL.map(|a| grid.stride(a));
    let inv = Axis::ALL.map(|a| T::one() / grid.spacing(a));
    grid.for_each_interior(|_, _, _, c| {
        let mut d = T::zero();
        for a in 0..3 {
            if strides[a] != 0 {
                d += (faces.comp[a][off(c, strides[a])] - faces.comp[a][c]) * inv[a];
            }
        }
        out.push(d);
    });
    out
}

pub fn max_abs_divergence<T: Real>(grid: &Grid<T>, faces: &FaceField<T>) -> T {
    divergence_b(grid, faces).into_iter().fold(T::zero(), |m, v| m.max(v.abs()))
}

/// Face-field time derivative from line-averaged edge fields, written on the
/// interior faces: `dB_a = -D_b(E_c)/db + D_c(E_b)/dc` for cyclic `(a, b, c)`.
pub fn induction_rhs<T: Real>(grid: &Grid<T>, edge: &EdgeField<T>, out: &mut FaceField<T>) {
    for a in Axis::ALL {
        let (b, c) = a.transverse();
        let (sb, sc) = (grid.stride(b), grid.stride(c));
        let (ib, ic) = (T::one() / grid.spacing(b), T::one() / grid.spacing(c));
        let (ec, eb) = (&edge.comp[c.index()], &edge.comp[b.index()]);
        par_fill(grid, &mut out.comp[a.index()], &grid.interior(), |_, _, _, f| {
            let mut d = T::zero();
            if sb != 0 {
                d -= (ec[off(f, sb)] - ec[f]) * ib;
            }
            if sc != 0 {
                d += (eb[off(f, sc)] - eb[f]) * ic;
            }
            d
        });
    }
}

#[inline(always)]
fn physical<T: Real>(s: &[T; 8], eos: &Eos<T>) -> Result<(), PhysicsError> {
    pressure_from_conserved(&Conserved(*s), eos).map(|_| ())
}

/// Evaluates `dU/dt` and `dB/dt` for `state` into `out`. Ghosts of `state`
/// are refreshed first; ghost entries of `out` are zero.
pub fn compute_rhs<T: Real>(
    grid: &Grid<T>,
    state: &mut State<T>,
    cfg: &SchemeConfig<T>,
    ws: &mut Workspace<T>,
    out: &mut State<T>,
) -> Result<RhsStats<T>, SolverError> {
    let eos = cfg.eos;
    state.fill_ghosts(grid);
    out.cells.par_iter_mut().for_each(|u| *u = [T::zero(); NCONS]);
    for c in out.faces.comp.iter_mut() {
        c.par_iter_mut().for_each(|v| *v = T::zero());
    }
    let mut stats = RhsStats::default();

    cell_average_b(grid, &state.faces, &mut ws.bc);
    let flat_on = cfg.flattener.enabled && cfg.recon.method == Reconstruction::Cweno4;
    if flat_on {
        let p = pressure_estimate(&state.cells, &ws.bc, &eos);
        ws.wf = cell_flatteners(grid, &p, &cfg.flattener)?;
    }

    for a in Axis::ALL.into_iter().filter(|&a| grid.active(a)) {
        flux_pass(grid, state, cfg, ws, a, flat_on, &mut stats, out)?;
    }

    for c in Axis::ALL {
        edge_pass(grid, state, cfg, ws, c, flat_on);
    }
    induction_rhs(grid, &ws.edge, &mut out.faces);
    Ok(stats)
}

#[allow(clippy::too_many_arguments)]
fn flux_pass<T: Real>(
    grid: &Grid<T>,
    state: &State<T>,
    cfg: &SchemeConfig<T>,
    ws: &mut Workspace<T>,
    a: Axis,
    flat_on: bool,
    stats: &mut RhsStats<T>,
    out: &mut State<T>,
) -> Result<(), SolverError> {
    let eos = cfg.eos;
    let ai = a.index();
    let sa = grid.stride(a);
    let (b, c) = a.transverse();
    let (sb, sc) = (grid.stride(b), grid.stride(c));
    let trans_active: Vec<usize> = [b, c].into_iter().filter(|&d| grid.active(d)).map(|d| d.index()).collect();
    let iso = eos.is_isothermal();
    let mut recon = [true; 8];
    recon[5 + ai] = false;
    recon[4] = !iso;
    let vars = GsiVars { density: 0, field: Some([5, 6, 7]) };
    let tvd_opts = ReconOptions { method: Reconstruction::Tvd2, ..cfg.recon };

    // 2a: face states from every cell that borders a needed face
    let mut m = [(2isize, 2isize); 3];
    m[ai] = (1, 1);
    let cell_range = span(grid, m);
    let errs = FirstError::new();
    {
        let (cells, bc, wf, faces) = (&state.cells, &ws.bc, &ws.wf, &state.faces.comp[ai]);
        par_fill(grid, &mut ws.cellrec, &cell_range, |i, j, k, ci| {
            let st: [[T; 5]; 8] = std::array::from_fn(|q| {
                std::array::from_fn(|mm| {
                    let idx = off(ci, (mm as isize - 2) * sa);
                    if q < NCONS {
                        cells[idx][q]
                    } else {
                        bc[idx][q - NCONS]
                    }
                })
            });
            let w_flat = if flat_on { wf[ci][ai] } else { T::one() };
            let attempt = |level: FallbackLevel| -> Result<([T; 8], [T; 8]), PhysicsError> {
                let (mut w, mut e) = ([T::zero(); 8], [T::zero(); 8]);
                match level {
                    FallbackLevel::HighOrder => {
                        reconstruct_cell(&st, &recon, vars, &cfg.recon, w_flat, &mut w, &mut e);
                    }
                    FallbackLevel::Tvd2 => {
                        reconstruct_cell(&st, &recon, vars, &tvd_opts, T::zero(), &mut w, &mut e);
                    }
                    FallbackLevel::Godunov => {
                        for q in 0..8 {
                            w[q] = st[q][2];
                            e[q] = st[q][2];
                        }
                    }
                }
                if iso {
                    w[4] = st[4][2];
                    e[4] = st[4][2];
                }
                w[5 + ai] = faces[off(ci, sa)];
                e[5 + ai] = faces[ci];
                physical(&w, &eos)?;
                physical(&e, &eos)?;
                Ok((w, e))
            };
            match with_fallback(FallbackLevel::HighOrder, cfg.fallback, attempt) {
                Ok(((w, e), level)) => CellRec { w, e, level: level as u8, flat: w_flat < T::one() },
                Err(source) => {
                    errs.set(SolverError::UnphysicalState { location: [i, j, k], stage: "reconstruction", source });
                    CellRec::default()
                }
            }
        });
    }
    errs.take()?;

    // indicator triples for the area-to-line reconstructions of the edge pass
    {
        let (cells, bc) = (&state.cells, &ws.bc);
        let mode = cfg.recon.gsi;
        let eps = cfg.recon.weno.epsilon;
        par_fill(grid, &mut ws.gsi[ai], &cell_range, |_, _, _, ci| {
            let stencil = |get: &dyn Fn(usize) -> T| -> [T; 5] { std::array::from_fn(|mm| get(off(ci, (mm as isize - 2) * sa))) };
            let rho = smoothness_indicators(&stencil(&|x| cells[x][0]));
            match mode {
                GsiMode::Mhd => {
                    let bis: [[T; 3]; 3] = std::array::from_fn(|q| smoothness_indicators(&stencil(&|x| bc[x][q])));
                    crate::reconstruct::global_smoothness_mhd(&rho, &bis, eps)
                }
                _ => rho,
            }
        });
    }

    // statistics over the interior cells only
    {
        let rec = &ws.cellrec;
        let mut n = 0usize;
        let mut flat = 0usize;
        let mut fb = 0usize;
        grid.for_each_interior(|_, _, _, ci| {
            n += 1;
            flat += rec[ci].flat as usize;
            fb += (rec[ci].level > 0) as usize;
        });
        stats.reconstructions += n;
        stats.flattened += flat;
        stats.fallbacks += fb;
    }

    // 2b/2c: point states, Rusanov fluxes and point electric fields
    let mut m = [(1isize, 1isize); 3];
    m[ai] = (0, 1);
    let face_range = span(grid, m);
    let errs = FirstError::new();
    {
        let rec = &ws.cellrec;
        let wf = &ws.wf;
        let transforms = cfg.transforms;
        par_fill(grid, &mut ws.point, &face_range, |i, j, k, f| {
            let (l, r) = (off(f, -sa), f);
            let wface = if !transforms {
                T::zero()
            } else if flat_on {
                let mut ins = [T::one(); 4];
                for (n, &d) in trans_active.iter().enumerate() {
                    ins[2 * n] = wf[l][d];
                    ins[2 * n + 1] = wf[r][d];
                }
                face_flattener(&ins)
            } else {
                T::one()
            };
            let side = |cell: usize, pick: fn(&CellRec<T>) -> &[T; 8]| -> Result<(Conserved<T>, Primitive<T>), PhysicsError> {
                let area = *pick(&rec[cell]);
                if wface > T::zero() {
                    let pt: [T; 8] = std::array::from_fn(|q| {
                        let st = TransverseStencil {
                            center: area[q],
                            neighbors: [
                                pick(&rec[off(cell, -sb)])[q],
                                pick(&rec[off(cell, sb)])[q],
                                pick(&rec[off(cell, -sc)])[q],
                                pick(&rec[off(cell, sc)])[q],
                            ],
                        };
                        area_to_point(&st, wface)
                    });
                    let u = Conserved(pt);
                    if let Ok(p) = primitive_from_conserved(&u, &eos) {
                        return Ok((u, p));
                    }
                }
                let u = Conserved(area);
                primitive_from_conserved(&u, &eos).map(|p| (u, p))
            };
            let west = side(l, |c| &c.w);
            let east = side(r, |c| &c.e);
            match (west, east) {
                (Ok((uw, pw)), Ok((ue, pe))) => match llf_flux_primitive(&pw, &pe, &uw, &ue, a, &eos) {
                    Ok((flux, speed)) => {
                        let (ew, ee) = (electric_field(&pw), electric_field(&pe));
                        FacePoint { flux, e: [ew[b.index()], ee[b.index()], ew[c.index()], ee[c.index()]], wf: wface, speed }
                    }
                    Err(source) => {
                        errs.set(SolverError::UnphysicalState { location: [i, j, k], stage: "interface flux", source });
                        FacePoint::default()
                    }
                },
                (Err(source), _) | (_, Err(source)) => {
                    errs.set(SolverError::UnphysicalState { location: [i, j, k], stage: "point values", source });
                    FacePoint::default()
                }
            }
        });
    }
    errs.take()?;
    {
        let pt = &ws.point;
        par_fill(grid, &mut ws.speed[ai], &face_range, |_, _, _, f| pt[f].speed);
    }

    // 2d: area-averaged fluxes and two-sided electric fields
    let mut m = [(0isize, 0isize); 3];
    m[ai] = (0, 1);
    let inner_faces = span(grid, m);
    {
        let pt = &ws.point;
        par_fill(grid, &mut ws.flux, &inner_faces, |_, _, _, f| {
            let wfc = pt[f].wf;
            std::array::from_fn(|q| {
                let st = TransverseStencil {
                    center: pt[f].flux[q],
                    neighbors: [pt[off(f, -sb)].flux[q], pt[off(f, sb)].flux[q], pt[off(f, -sc)].flux[q], pt[off(f, sc)].flux[q]],
                };
                point_to_area(&st, wfc)
            })
        });
        let rec = &ws.cellrec;
        let (bi, ci) = (5 + b.index(), 5 + c.index());
        par_fill(grid, &mut ws.ein[ai], &inner_faces, |_, _, _, f| {
            let wfc = pt[f].wf;
            let e: [T; 4] = std::array::from_fn(|q| {
                let st = TransverseStencil {
                    center: pt[f].e[q],
                    neighbors: [pt[off(f, -sb)].e[q], pt[off(f, sb)].e[q], pt[off(f, -sc)].e[q], pt[off(f, sc)].e[q]],
                };
                point_to_area(&st, wfc)
            });
            let (l, r) = (&rec[off(f, -sa)], &rec[f]);
            [e[0], e[1], e[2], e[3], l.w[bi], r.e[bi], l.w[ci], r.e[ci]]
        });
        let mut along = [true; 3];
        along[ai] = false;
        grid.fill_ghosts_along(&mut ws.ein[ai], along);
        grid.fill_ghosts_along(&mut ws.speed[ai], along);
    }

    // maximum speed over the faces bounding interior cells
    {
        let spd = &ws.speed[ai];
        let mut mx = T::zero();
        let r = inner_faces;
        for kk in r.lo[2]..r.hi[2] {
            for jj in r.lo[1]..r.hi[1] {
                for ii in r.lo[0]..r.hi[0] {
                    mx = mx.max(spd[grid.idx(ii, jj, kk)]);
                }
            }
        }
        stats.max_speed[ai] = mx;
    }

    // 2e: flux differences
    let inv = T::one() / grid.spacing(a);
    let nh = eos.hydro_vars();
    let flux = &ws.flux;
    grid.for_rows(&mut out.cells, &grid.interior(), |j, k, row| {
        for i in 0..grid.n(Axis::X) as isize {
            let cix = grid.idx(i, j, k);
            let (lo, hi) = (&flux[cix], &flux[off(cix, sa)]);
            let du = &mut row[grid.row_index(i)];
            for q in 0..nh {
                du[q] -= (hi[q] - lo[q]) * inv;
            }
        }
    });
    Ok(())
}

/// Line reconstruction of three face quantities along a transverse axis.
#[inline(always)]
fn line_pair<T: Real>(st: &[[T; 5]; 3], gsi: Option<[T; 3]>, opts: &ReconOptions<T>, wl: T) -> LineRec<T> {
    let shared = gsi.map(|g| weights_from_indicators(&g, &opts.weno));
    let mut rec = LineRec::default();
    for q in 0..3 {
        let w = match shared {
            Some(w) => w,
            None if opts.method == Reconstruction::Cweno4 => weights_from_indicators(&smoothness_indicators(&st[q]), &opts.weno),
            None => opts.weno.optimal,
        };
        let (up, lo) = blended_pair(&st[q], &w, opts.method, wl);
        rec.up[q] = up;
        rec.lo[q] = lo;
    }
    rec
}

fn edge_pass<T: Real>(grid: &Grid<T>, state: &State<T>, cfg: &SchemeConfig<T>, ws: &mut Workspace<T>, c: Axis, flat_on: bool) {
    let (a, b) = c.transverse();
    let (ai, bi, ci) = (a.index(), b.index(), c.index());
    let (sa, sb) = (grid.stride(a), grid.stride(b));
    let mut m = [(0isize, 0isize); 3];
    m[ai] = (0, 1);
    m[bi] = (0, 1);
    let edges = span(grid, m);
    let half = T::lit(0.5);
    match (grid.active(a), grid.active(b)) {
        (false, false) => {
            ws.edge.comp[ci].par_iter_mut().for_each(|v| *v = T::zero());
        }
        (true, false) => {
            // faces along a only: one-dimensional LLF flux of the induction equation
            let (ein, spd) = (&ws.ein[ai], &ws.speed[ai]);
            par_fill(grid, &mut ws.edge.comp[ci], &edges, |_, _, _, p| {
                let v = &ein[p];
                half * (v[2] + v[3]) + half * spd[p] * (v[5] - v[4])
            });
        }
        (false, true) => {
            let (ein, spd) = (&ws.ein[bi], &ws.speed[bi]);
            par_fill(grid, &mut ws.edge.comp[ci], &edges, |_, _, _, p| {
                let v = &ein[p];
                half * (v[0] + v[1]) - half * spd[p] * (v[7] - v[6])
            });
        }
        (true, true) => {
            let opts = cfg.recon;
            let global = opts.gsi != GsiMode::Individual;
            let wf = &ws.wf;
            let blend = |x: usize, y: usize, d: usize| if flat_on { wf[x][d].min(wf[y][d]) } else { T::one() };
            // a-faces along b: (E_c^W, E_c^E, B_a)
            {
                let (ein, bf, gsi) = (&ws.ein[ai], &state.faces.comp[ai], &ws.gsi[bi]);
                let mut mm = [(0isize, 0isize); 3];
                mm[ai] = (0, 1);
                mm[bi] = (1, 1);
                par_fill(grid, &mut ws.line_a, &span(grid, mm), |_, _, _, f| {
                    let at = |mmv: usize| off(f, (mmv as isize - 2) * sb);
                    let st = [
                        std::array::from_fn(|x| ein[at(x)][2]),
                        std::array::from_fn(|x| ein[at(x)][3]),
                        std::array::from_fn(|x| bf[at(x)]),
                    ];
                    let l = off(f, -sa);
                    let g = global.then(|| std::array::from_fn(|q| half * (gsi[l][q] + gsi[f][q])));
                    line_pair(&st, g, &opts, blend(l, f, bi))
                });
            }
            // b-faces along a: (E_c^S, E_c^N, B_b)
            {
                let (ein, bf, gsi) = (&ws.ein[bi], &state.faces.comp[bi], &ws.gsi[ai]);
                let mut mm = [(0isize, 0isize); 3];
                mm[bi] = (0, 1);
                mm[ai] = (1, 1);
                par_fill(grid, &mut ws.line_b, &span(grid, mm), |_, _, _, f| {
                    let at = |mmv: usize| off(f, (mmv as isize - 2) * sa);
                    let st = [
                        std::array::from_fn(|x| ein[at(x)][0]),
                        std::array::from_fn(|x| ein[at(x)][1]),
                        std::array::from_fn(|x| bf[at(x)]),
                    ];
                    let l = off(f, -sb);
                    let g = global.then(|| std::array::from_fn(|q| half * (gsi[l][q] + gsi[f][q])));
                    line_pair(&st, g, &opts, blend(l, f, ai))
                });
            }
            let (la, lb) = (&ws.line_a, &ws.line_b);
            let (spa, spb) = (&ws.speed[ai], &ws.speed[bi]);
            par_fill(grid, &mut ws.edge.comp[ci], &edges, |_, _, _, p| {
                let (fa_lo, fa_hi) = (&la[off(p, -sb)], &la[p]);
                let (fb_lo, fb_hi) = (&lb[off(p, -sa)], &lb[p]);
                let mut e = [[T::zero(); 2]; 2];
                for s in 0..2 {
                    // first path: a-face data along b; second: b-face data along a
                    e[s][0] += fa_lo.up[s];
                    e[s][1] += fa_hi.lo[s];
                    e[0][s] += fb_lo.up[s];
                    e[1][s] += fb_hi.lo[s];
                }
                for row in e.iter_mut() {
                    for v in row.iter_mut() {
                        *v = half * *v;
                    }
                }
                let speed = spa[off(p, -sb)].max(spa[p]).max(spb[off(p, -sa)].max(spb[p]));
                edge_electric(&EdgeStates { e, b_b: [fb_lo.up[2], fb_hi.lo[2]], b_a: [fa_lo.up[2], fa_hi.lo[2]], speed })
            });
        }
    }
}
