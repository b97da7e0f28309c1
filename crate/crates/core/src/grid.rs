//! Staggered Cartesian grid, padded storage layout and ghost filling.
//!
//! Every field (cell, face or edge located) is stored in a dense array with
//! the same padded extent `n + 2 * ghost` per active axis, x fastest. The
//! location of an entry is a convention on the index:
//!
//! * cell `(i, j, k)` is the cell centred at `(x_i, y_j, z_k)`;
//! * x-face `(i, j, k)` is the face at `x_{i-1/2}` (the left face of cell `i`),
//!   and likewise for y- and z-faces;
//! * z-edge `(i, j, k)` sits at `(x_{i-1/2}, y_{j-1/2})`, spanning cell `k`
//!   along z; x- and y-edges follow by cyclic permutation.
//!
//! An axis with a single cell is *inactive*: it carries no ghost layers, no
//! reconstruction happens along it and derivatives along it vanish.

use rayon::prelude::*;
use thiserror::Error;

use crate::Real;

/// Ghost width required by the deepest stencil chain of the right-hand side.
pub const DEFAULT_GHOST: usize = 5;

/// Number of hydrodynamic conserved variables stored per cell
/// (`rho, rho vx, rho vy, rho vz, e`); the isothermal closure leaves `e` unused.
pub const NCONS: usize = 5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("cell count along {0:?} must be at least 1")]
    ZeroCells(Axis),
    #[error("grid spacing along {0:?} must be positive, got {1}")]
    NonPositiveSpacing(Axis, f64),
    #[error("ghost width {0} is below the minimum of {DEFAULT_GHOST}")]
    GhostTooSmall(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X = 0,
    Y = 1,
    Z = 2,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    #[inline(always)]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Axis {
        Self::ALL[i]
    }

    /// The other two axes in cyclic order: x -> (y, z), y -> (z, x), z -> (x, y).
    #[inline(always)]
    pub fn transverse(self) -> (Axis, Axis) {
        match self {
            Axis::X => (Axis::Y, Axis::Z),
            Axis::Y => (Axis::Z, Axis::X),
            Axis::Z => (Axis::X, Axis::Y),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    /// Zeroth-order extrapolation: ghosts copy the nearest interior value.
    Open,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec<T> {
    pub n: [usize; 3],
    pub spacing: [T; 3],
    pub origin: [T; 3],
    pub ghost: usize,
    pub boundary: [Boundary; 3],
}

impl<T: Real> GridSpec<T> {
    /// Uniform grid covering the box `[lower, upper]` with `n` cells per axis.
    pub fn from_box(n: [usize; 3], lower: [T; 3], upper: [T; 3], boundary: [Boundary; 3]) -> Self {
        let spacing = std::array::from_fn(|a| (upper[a] - lower[a]) / T::from_usize_lossy(n[a].max(1)));
        GridSpec { n, spacing, origin: lower, ghost: DEFAULT_GHOST, boundary }
    }

    pub fn with_ghost(mut self, ghost: usize) -> Self {
        self.ghost = ghost;
        self
    }

    pub fn validate(&self) -> Result<(), GridError> {
        for a in Axis::ALL {
            if self.n[a.index()] == 0 {
                return Err(GridError::ZeroCells(a));
            }
            let d = self.spacing[a.index()];
            if !(d > T::zero()) {
                return Err(GridError::NonPositiveSpacing(a, d.to_f64_lossy()));
            }
        }
        if self.ghost < DEFAULT_GHOST {
            return Err(GridError::GhostTooSmall(self.ghost));
        }
        Ok(())
    }
}

/// Half-open 3D index box `lo..hi` in interior-relative coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Range3 {
    pub lo: [isize; 3],
    pub hi: [isize; 3],
}

impl Range3 {
    pub fn count(&self) -> usize {
        (0..3).map(|a| (self.hi[a] - self.lo[a]).max(0) as usize).product()
    }
}

/// Grid handle: the [`GridSpec`] plus the derived storage layout.
#[derive(Clone, Debug)]
pub struct Grid<T> {
    pub spec: GridSpec<T>,
    ghost: [usize; 3],
    ext: [usize; 3],
    stride: [usize; 3],
    len: usize,
}

impl<T: Real> Grid<T> {
    pub fn new(spec: GridSpec<T>) -> Result<Self, GridError> {
        spec.validate()?;
        let ghost: [usize; 3] = std::array::from_fn(|a| if spec.n[a] > 1 { spec.ghost } else { 0 });
        let ext: [usize; 3] = std::array::from_fn(|a| spec.n[a] + 2 * ghost[a]);
        let stride = [1, ext[0], ext[0] * ext[1]];
        let len = ext[0] * ext[1] * ext[2];
        Ok(Grid { spec, ghost, ext, stride, len })
    }

    #[inline(always)]
    pub fn n(&self, axis: Axis) -> usize {
        self.spec.n[axis.index()]
    }

    #[inline(always)]
    pub fn active(&self, axis: Axis) -> bool {
        self.spec.n[axis.index()] > 1
    }

    pub fn active_axes(&self) -> impl Iterator<Item = Axis> + '_ {
        Axis::ALL.into_iter().filter(|&a| self.active(a))
    }

    pub fn dimensions(&self) -> usize {
        self.active_axes().count()
    }

    #[inline(always)]
    pub fn spacing(&self, axis: Axis) -> T {
        self.spec.spacing[axis.index()]
    }

    #[inline(always)]
    pub fn ghost(&self, axis: Axis) -> usize {
        self.ghost[axis.index()]
    }

    #[inline(always)]
    pub fn extent(&self) -> [usize; 3] {
        self.ext
    }

    #[inline(always)]
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Flat offset between neighbours along `axis`; zero for inactive axes so
    /// stencils along them collapse onto the centre value.
    #[inline(always)]
    pub fn stride(&self, axis: Axis) -> isize {
        if self.active(axis) {
            self.stride[axis.index()] as isize
        } else {
            0
        }
    }

    #[inline(always)]
    pub fn idx(&self, i: isize, j: isize, k: isize) -> usize {
        let g = self.ghost;
        debug_assert!(i + (g[0] as isize) >= 0 && ((i + g[0] as isize) as usize) < self.ext[0]);
        debug_assert!(j + (g[1] as isize) >= 0 && ((j + g[1] as isize) as usize) < self.ext[1]);
        debug_assert!(k + (g[2] as isize) >= 0 && ((k + g[2] as isize) as usize) < self.ext[2]);
        (i + g[0] as isize) as usize
            + (j + g[1] as isize) as usize * self.stride[1]
            + (k + g[2] as isize) as usize * self.stride[2]
    }

    #[inline(always)]
    pub fn idx3(&self, p: [isize; 3]) -> usize {
        self.idx(p[0], p[1], p[2])
    }

    pub fn cell_volume(&self) -> T {
        self.spec.spacing[0] * self.spec.spacing[1] * self.spec.spacing[2]
    }

    pub fn cell_count(&self) -> usize {
        self.spec.n.iter().product()
    }

    /// Centre coordinate of cell `i` along `axis`: `origin + (i + 1/2) * spacing`.
    pub fn cell_center(&self, axis: Axis, i: isize) -> T {
        let a = axis.index();
        self.spec.origin[a] + (T::lit(i as f64) + T::lit(0.5)) * self.spec.spacing[a]
    }

    /// Position of face `i` along `axis`, i.e. `x_{i-1/2}`.
    pub fn face_position(&self, axis: Axis, i: isize) -> T {
        let a = axis.index();
        self.spec.origin[a] + T::lit(i as f64) * self.spec.spacing[a]
    }

    pub fn interior(&self) -> Range3 {
        Range3 { lo: [0; 3], hi: self.spec.n.map(|n| n as isize) }
    }

    /// Interior box grown by `lo`/`hi` cells along every active axis.
    pub fn grown(&self, lo: isize, hi: isize) -> Range3 {
        let mut r = self.interior();
        for a in self.active_axes() {
            r.lo[a.index()] -= lo;
            r.hi[a.index()] += hi;
        }
        r
    }

    pub fn alloc<V: Clone>(&self, fill: V) -> Vec<V> {
        vec![fill; self.len]
    }

    /// Populates every ghost entry from interior values, one axis at a time
    /// (x, then y, then z) so corner ghosts come out consistent.
    pub fn fill_ghosts<V: Copy + Send + Sync>(&self, data: &mut [V]) {
        self.fill_ghosts_along(data, [true; 3]);
    }

    pub fn fill_ghosts_along<V: Copy + Send + Sync>(&self, data: &mut [V], axes: [bool; 3]) {
        debug_assert_eq!(data.len(), self.len);
        for a in Axis::ALL {
            if axes[a.index()] && self.active(a) {
                self.fill_axis(data, a);
            }
        }
    }

    fn source_index(&self, axis: Axis, i: isize) -> isize {
        let n = self.n(axis) as isize;
        match self.spec.boundary[axis.index()] {
            Boundary::Periodic => i.rem_euclid(n),
            Boundary::Open => i.clamp(0, n - 1),
        }
    }

    fn fill_axis<V: Copy + Send + Sync>(&self, data: &mut [V], axis: Axis) {
        let g = self.ghost(axis) as isize;
        let n = self.n(axis) as isize;
        let ext = self.ext;
        match axis {
            Axis::X => {
                let gx = self.ghost[0] as isize;
                data.par_chunks_mut(ext[0]).for_each(|row| {
                    for i in (-g..0).chain(n..n + g) {
                        let s = self.source_index(axis, i);
                        row[(i + gx) as usize] = row[(s + gx) as usize];
                    }
                });
            }
            Axis::Y => {
                let plane = ext[0] * ext[1];
                let gy = self.ghost[1] as isize;
                data.par_chunks_mut(plane).for_each(|pl| {
                    for j in (-g..0).chain(n..n + g) {
                        let s = self.source_index(axis, j);
                        let (dst, src) = ((j + gy) as usize * ext[0], (s + gy) as usize * ext[0]);
                        pl.copy_within(src..src + ext[0], dst);
                    }
                });
            }
            Axis::Z => {
                let plane = ext[0] * ext[1];
                let gz = self.ghost[2] as isize;
                for k in (-g..0).chain(n..n + g) {
                    let s = self.source_index(axis, k);
                    let (dst, src) = ((k + gz) as usize * plane, (s + gz) as usize * plane);
                    data.copy_within(src..src + plane, dst);
                }
            }
        }
    }

    /// Runs `f(j, k, row)` for every x-row whose `(j, k)` lies in `range`;
    /// `row` spans the full padded x extent and is indexed via [`Grid::row_index`].
    /// Rows are processed in parallel; each call owns its row exclusively.
    pub fn for_rows<V, F>(&self, data: &mut [V], range: &Range3, f: F)
    where
        V: Send,
        F: Fn(isize, isize, &mut [V]) + Sync + Send,
    {
        let (gy, gz) = (self.ghost[1] as isize, self.ghost[2] as isize);
        let ey = self.ext[1];
        data.par_chunks_mut(self.ext[0]).enumerate().for_each(|(r, row)| {
            let j = (r % ey) as isize - gy;
            let k = (r / ey) as isize - gz;
            if j >= range.lo[1] && j < range.hi[1] && k >= range.lo[2] && k < range.hi[2] {
                f(j, k, row);
            }
        });
    }

    #[inline(always)]
    pub fn row_index(&self, i: isize) -> usize {
        (i + self.ghost[0] as isize) as usize
    }

    /// Visits interior indices in storage order.
    pub fn for_each_interior(&self, mut f: impl FnMut(isize, isize, isize, usize)) {
        let n = self.spec.n.map(|n| n as isize);
        for k in 0..n[2] {
            for j in 0..n[1] {
                for i in 0..n[0] {
                    f(i, j, k, self.idx(i, j, k));
                }
            }
        }
    }
}

/// Per-cell averages of the hydrodynamic conserved variables.
pub type CellField<T> = Vec<[T; NCONS]>;

/// Area-averaged magnetic components, `comp[a]` living on the a-faces.
#[derive(Clone, Debug, PartialEq)]
pub struct FaceField<T> {
    pub comp: [Vec<T>; 3],
}

/// Line-averaged electric components, `comp[a]` living on the a-edges.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeField<T> {
    pub comp: [Vec<T>; 3],
}

impl<T: Real> FaceField<T> {
    pub fn zeros(grid: &Grid<T>) -> Self {
        FaceField { comp: std::array::from_fn(|_| grid.alloc(T::zero())) }
    }
}

impl<T: Real> EdgeField<T> {
    pub fn zeros(grid: &Grid<T>) -> Self {
        EdgeField { comp: std::array::from_fn(|_| grid.alloc(T::zero())) }
    }
}

/// Full evolved state: cell-averaged hydro variables and face-averaged B.
#[derive(Clone, Debug, PartialEq)]
pub struct State<T> {
    pub cells: CellField<T>,
    pub faces: FaceField<T>,
}

impl<T: Real> State<T> {
    pub fn zeros(grid: &Grid<T>) -> Self {
        State { cells: grid.alloc([T::zero(); NCONS]), faces: FaceField::zeros(grid) }
    }

    pub fn fill_ghosts(&mut self, grid: &Grid<T>) {
        grid.fill_ghosts(&mut self.cells);
        for c in self.faces.comp.iter_mut() {
            grid.fill_ghosts(c);
        }
    }

    /// `self += a * x` over the whole padded storage.
    pub fn add_scaled(&mut self, a: T, x: &Self) {
        self.cells.par_iter_mut().zip(x.cells.par_iter()).for_each(|(u, v)| {
            for q in 0..NCONS {
                u[q] += a * v[q];
            }
        });
        for (b, y) in self.faces.comp.iter_mut().zip(x.faces.comp.iter()) {
            b.par_iter_mut().zip(y.par_iter()).for_each(|(u, v)| *u += a * *v);
        }
    }

    /// `self = a * x + b * y`.
    pub fn assign_combination(&mut self, a: T, x: &Self, b: T, y: &Self) {
        self.cells
            .par_iter_mut()
            .zip(x.cells.par_iter().zip(y.cells.par_iter()))
            .for_each(|(u, (p, q))| {
                for v in 0..NCONS {
                    u[v] = a * p[v] + b * q[v];
                }
            });
        for c in 0..3 {
            self.faces.comp[c]
                .par_iter_mut()
                .zip(x.faces.comp[c].par_iter().zip(y.faces.comp[c].par_iter()))
                .for_each(|(u, (p, q))| *u = a * *p + b * *q);
        }
    }
}

/// Allocates a grid handle together with a zeroed state.
pub fn make_grid<T: Real>(spec: GridSpec<T>) -> Result<(Grid<T>, State<T>), GridError> {
    let grid = Grid::new(spec)?;
    let state = State::zeros(&grid);
    Ok((grid, state))
}
