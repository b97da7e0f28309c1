//! Fourth-order finite-volume solver for ideal MHD on a staggered Cartesian
//! mesh. Cell averages of the hydrodynamic variables are evolved with
//! CWENO reconstruction and local Lax-Friedrichs fluxes; face-averaged
//! magnetic fields are advanced by constrained transport, which keeps the
//! discrete divergence at round-off. Time integration is SSPRK4(10).
//!
//! The numerics are generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix the precision.

pub mod diagnostics;
pub mod driver;
pub mod eos;
pub mod grid;
pub mod io;
pub mod num;
pub mod problems;
pub mod reconstruct;
pub mod rhs;
pub mod riemann;
pub mod shockguard;
pub mod spectral;
pub mod timestep;
pub mod transforms;

pub use num::Real;

pub type Grid64 = grid::Grid<f64>;
pub type State64 = grid::State<f64>;
pub type Simulation64 = driver::Simulation<f64>;
pub type SchemeConfig64 = rhs::SchemeConfig<f64>;

pub type Grid32 = grid::Grid<f32>;
pub type State32 = grid::State<f32>;
pub type Simulation32 = driver::Simulation<f32>;
pub type SchemeConfig32 = rhs::SchemeConfig<f32>;
