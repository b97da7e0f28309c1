//! Closure relations, conserved/primitive conversion, wave speeds and the
//! ideal-MHD physical fluxes at point values.

use thiserror::Error;

use crate::grid::Axis;
use crate::Real;

pub const RHO: usize = 0;
pub const MX: usize = 1;
pub const EN: usize = 4;
pub const BX: usize = 5;
/// Velocity slot of a primitive state (`VX + axis`).
pub const VX: usize = 1;
/// Pressure slot of a primitive state.
pub const PR: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Eos<T> {
    Adiabatic { gamma: T },
    /// `p = rho * cs^2`; there is no energy equation.
    Isothermal { cs: T },
}

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum PhysicsError {
    #[error("non-positive density {0}")]
    NonPositiveDensity(f64),
    #[error("non-positive pressure {0}")]
    NonPositivePressure(f64),
    #[error("invalid equation of state: {0}")]
    InvalidEos(&'static str),
}

impl<T: Real> Eos<T> {
    pub fn validate(&self) -> Result<(), PhysicsError> {
        match *self {
            Eos::Adiabatic { gamma } if !(gamma > T::one()) => Err(PhysicsError::InvalidEos("gamma must exceed 1")),
            Eos::Isothermal { cs } if !(cs > T::zero()) => Err(PhysicsError::InvalidEos("sound speed must be positive")),
            _ => Ok(()),
        }
    }

    /// Number of hydrodynamic conserved variables actually evolved.
    pub fn hydro_vars(&self) -> usize {
        match self {
            Eos::Adiabatic { .. } => 5,
            Eos::Isothermal { .. } => 4,
        }
    }

    pub fn is_isothermal(&self) -> bool {
        matches!(self, Eos::Isothermal { .. })
    }
}

/// Point value of `(rho, mx, my, mz, e, bx, by, bz)`; `e` is ignored for
/// the isothermal closure.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Conserved<T>(pub [T; 8]);

/// Point value of `(rho, vx, vy, vz, p, bx, by, bz)`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Primitive<T>(pub [T; 8]);

impl<T: Real> Conserved<T> {
    pub fn rho(&self) -> T {
        self.0[RHO]
    }

    pub fn momentum(&self) -> [T; 3] {
        [self.0[1], self.0[2], self.0[3]]
    }

    pub fn energy(&self) -> T {
        self.0[EN]
    }

    pub fn b(&self) -> [T; 3] {
        [self.0[5], self.0[6], self.0[7]]
    }
}

impl<T: Real> Primitive<T> {
    pub fn rho(&self) -> T {
        self.0[RHO]
    }

    pub fn v(&self) -> [T; 3] {
        [self.0[1], self.0[2], self.0[3]]
    }

    pub fn p(&self) -> T {
        self.0[PR]
    }

    pub fn b(&self) -> [T; 3] {
        [self.0[5], self.0[6], self.0[7]]
    }
}

#[inline(always)]
fn dot<T: Real>(a: [T; 3], b: [T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn pressure_from_conserved<T: Real>(u: &Conserved<T>, eos: &Eos<T>) -> Result<T, PhysicsError> {
    let rho = u.rho();
    if !(rho > T::zero()) {
        return Err(PhysicsError::NonPositiveDensity(rho.to_f64_lossy()));
    }
    let p = match *eos {
        Eos::Adiabatic { gamma } => {
            let m = u.momentum();
            let b = u.b();
            let half = T::lit(0.5);
            (gamma - T::one()) * (u.energy() - half * dot(m, m) / rho - half * dot(b, b))
        }
        Eos::Isothermal { cs } => rho * cs * cs,
    };
    if !(p > T::zero()) {
        return Err(PhysicsError::NonPositivePressure(p.to_f64_lossy()));
    }
    Ok(p)
}

#[inline]
pub fn primitive_from_conserved<T: Real>(u: &Conserved<T>, eos: &Eos<T>) -> Result<Primitive<T>, PhysicsError> {
    let p = pressure_from_conserved(u, eos)?;
    let inv = T::one() / u.rho();
    let s = &u.0;
    Ok(Primitive([s[0], s[1] * inv, s[2] * inv, s[3] * inv, p, s[5], s[6], s[7]]))
}

#[inline]
pub fn conserved_from_primitive<T: Real>(w: &Primitive<T>, eos: &Eos<T>) -> Conserved<T> {
    let s = &w.0;
    let rho = s[RHO];
    let e = match *eos {
        Eos::Adiabatic { gamma } => {
            let v = w.v();
            let b = w.b();
            let half = T::lit(0.5);
            s[PR] / (gamma - T::one()) + half * rho * dot(v, v) + half * dot(b, b)
        }
        Eos::Isothermal { .. } => T::zero(),
    };
    Conserved([rho, rho * s[1], rho * s[2], rho * s[3], e, s[5], s[6], s[7]])
}

#[inline]
fn sound_speed_sq<T: Real>(w: &Primitive<T>, eos: &Eos<T>) -> T {
    match *eos {
        Eos::Adiabatic { gamma } => gamma * w.p() / w.rho(),
        Eos::Isothermal { cs } => cs * cs,
    }
}

/// Fast magnetosonic speed along `axis`.
#[inline]
pub fn fast_speed<T: Real>(w: &Primitive<T>, axis: Axis, eos: &Eos<T>) -> Result<T, PhysicsError> {
    let rho = w.rho();
    if !(rho > T::zero()) {
        return Err(PhysicsError::NonPositiveDensity(rho.to_f64_lossy()));
    }
    let cs2 = sound_speed_sq(w, eos);
    let b = w.b();
    let ca2 = dot(b, b) / rho;
    let bn = b[axis.index()];
    let sum = cs2 + ca2;
    let radicand = (sum * sum - T::lit(4.0) * cs2 * bn * bn / rho).max(T::zero());
    Ok((T::lit(0.5) * (sum + radicand.sqrt())).sqrt())
}

/// Largest `|v_n| + c_f` of the two states adjacent to an interface.
#[inline]
pub fn signal_speed<T: Real>(west: &Primitive<T>, east: &Primitive<T>, axis: Axis, eos: &Eos<T>) -> Result<T, PhysicsError> {
    let a = axis.index();
    let sw = west.0[VX + a].abs() + fast_speed(west, axis, eos)?;
    let se = east.0[VX + a].abs() + fast_speed(east, axis, eos)?;
    Ok(sw.max(se))
}

/// Physical flux of `(rho, mx, my, mz, e)` along `axis`; the energy entry is
/// zero for the isothermal closure.
#[inline]
pub fn physical_flux<T: Real>(w: &Primitive<T>, axis: Axis, eos: &Eos<T>) -> [T; 5] {
    let a = axis.index();
    let half = T::lit(0.5);
    let rho = w.rho();
    let v = w.v();
    let b = w.b();
    let vn = v[a];
    let bn = b[a];
    let b2 = dot(b, b);
    let ptot = w.p() + half * b2;
    let mut f = [T::zero(); 5];
    f[0] = rho * vn;
    for d in 0..3 {
        f[1 + d] = rho * v[d] * vn - b[d] * bn;
    }
    f[1 + a] += ptot;
    if let Eos::Adiabatic { gamma } = *eos {
        let e = w.p() / (gamma - T::one()) + half * rho * dot(v, v) + half * b2;
        f[4] = (e + ptot) * vn - bn * dot(v, b);
    }
    f
}

/// Ideal Ohm's law `E = -v x B`.
#[inline]
pub fn electric_field<T: Real>(w: &Primitive<T>) -> [T; 3] {
    let v = w.v();
    let b = w.b();
    [v[2] * b[1] - v[1] * b[2], v[0] * b[2] - v[2] * b[0], v[1] * b[0] - v[0] * b[1]]
}
