//! Rusanov (local Lax-Friedrichs) interface flux and the LLF form of the
//! two-dimensional Riemann solver for edge electric fields.

use crate::eos::{fast_speed, physical_flux, primitive_from_conserved, Conserved, Eos, PhysicsError, Primitive};
use crate::grid::{Axis, NCONS};
use crate::Real;

/// Interface flux together with the local speed and the decoded states,
/// which the caller reuses for the electric field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LlfFlux<T> {
    pub flux: [T; NCONS],
    pub speed: T,
    pub west: Primitive<T>,
    pub east: Primitive<T>,
}

/// Rusanov flux from primitive point states.
#[inline]
pub fn llf_flux_primitive<T: Real>(
    ww: &Primitive<T>,
    we: &Primitive<T>,
    uw: &Conserved<T>,
    ue: &Conserved<T>,
    axis: Axis,
    eos: &Eos<T>,
) -> Result<([T; NCONS], T), PhysicsError> {
    let vn = axis.index() + 1;
    let a = (ww.0[vn].abs() + fast_speed(ww, axis, eos)?).max(we.0[vn].abs() + fast_speed(we, axis, eos)?);
    let fw = physical_flux(ww, axis, eos);
    let fe = physical_flux(we, axis, eos);
    let half = T::lit(0.5);
    let mut f = [T::zero(); NCONS];
    for q in 0..eos.hydro_vars() {
        f[q] = half * (fw[q] + fe[q]) - half * a * (ue.0[q] - uw.0[q]);
    }
    Ok((f, a))
}

/// Rusanov flux between the west state `uw` and east state `ue` of a face.
pub fn llf_flux<T: Real>(uw: &Conserved<T>, ue: &Conserved<T>, axis: Axis, eos: &Eos<T>) -> Result<LlfFlux<T>, PhysicsError> {
    let west = primitive_from_conserved(uw, eos)?;
    let east = primitive_from_conserved(ue, eos)?;
    let (flux, speed) = llf_flux_primitive(&west, &east, uw, ue, axis, eos)?;
    Ok(LlfFlux { flux, speed, west, east })
}

/// The four states meeting at an edge oriented along `c`, with `(a, b)` the
/// cyclic transverse pair: `e` is indexed `[a-side][b-side]` (0 = low,
/// 1 = high), `b_b` holds the `b`-component of B on the low/high `a` side and
/// `b_a` the `a`-component on the low/high `b` side.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeStates<T> {
    pub e: [[T; 2]; 2],
    pub b_b: [T; 2],
    pub b_a: [T; 2],
    pub speed: T,
}

#[inline(always)]
pub fn edge_electric<T: Real>(s: &EdgeStates<T>) -> T {
    let q = T::lit(0.25);
    let h = T::lit(0.5) * s.speed;
    q * (s.e[0][0] + s.e[0][1] + s.e[1][0] + s.e[1][1]) + h * (s.b_b[1] - s.b_b[0]) - h * (s.b_a[1] - s.b_a[0])
}

#[inline(always)]
pub fn edge_signal_speed<T: Real>(a_faces: [T; 2], b_faces: [T; 2]) -> T {
    a_faces[0].max(a_faces[1]).max(b_faces[0].max(b_faces[1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eos::{conserved_from_primitive, electric_field};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const ADI: Eos<f64> = Eos::Adiabatic { gamma: 5.0 / 3.0 };

    fn cons(w: [f64; 8]) -> Conserved<f64> {
        conserved_from_primitive(&Primitive(w), &ADI)
    }

    #[test]
    fn identical_states_give_physical_flux() {
        let w = [1.3, 0.2, -0.4, 0.1, 0.9, 0.3, 0.5, -0.2];
        let u = cons(w);
        let r = llf_flux(&u, &u, Axis::Y, &ADI).unwrap();
        let f = physical_flux(&Primitive(w), Axis::Y, &ADI);
        for q in 0..5 {
            assert_relative_eq!(r.flux[q], f[q], epsilon = 1e-14);
        }
    }

    #[test]
    fn brio_wu_interface() {
        let l = cons([1.0, 0.0, 0.0, 0.0, 1.0, 0.75, 1.0, 0.0]);
        let r = cons([0.125, 0.0, 0.0, 0.0, 0.1, 0.75, -1.0, 0.0]);
        let out = llf_flux(&l, &r, Axis::X, &ADI).unwrap();
        assert!((out.speed - 3.658562).abs() < 1e-6);
        assert_relative_eq!(out.flux[0], 0.4375 * out.speed, max_relative = 1e-15);
        assert!((out.flux[0] - 1.600621).abs() < 1e-6);
    }

    #[test]
    fn dissipation_only() {
        // same flux on both sides: v = 0 and equal total pressure, different density
        let w1 = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0];
        let w2 = [2.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0];
        let (u1, u2) = (cons(w1), cons(w2));
        let out = llf_flux(&u1, &u2, Axis::X, &ADI).unwrap();
        let f = physical_flux(&Primitive(w1), Axis::X, &ADI);
        for q in 0..5 {
            assert_relative_eq!(out.flux[q], f[q] - 0.5 * out.speed * (u2.0[q] - u1.0[q]), epsilon = 1e-15);
        }
    }

    #[test]
    fn unphysical_state_propagates() {
        let bad = Conserved([-1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        let good = cons([1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(llf_flux(&bad, &good, Axis::X, &ADI), Err(PhysicsError::NonPositiveDensity(_))));
    }

    #[test]
    fn edge_examples() {
        let s = EdgeStates { e: [[0.7; 2]; 2], b_b: [0.3; 2], b_a: [-0.2; 2], speed: 5.0 };
        assert_eq!(edge_electric(&s), 0.7);
        let w = Primitive([1.0, 1.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0]);
        let ez = electric_field(&w)[2];
        assert_eq!(ez, -1.0);
        let s = EdgeStates { e: [[ez; 2]; 2], b_b: [1.0; 2], b_a: [0.0; 2], speed: 2.0 };
        assert_eq!(edge_electric(&s), -1.0);
        let d = 0.37;
        let s = EdgeStates { e: [[0.0; 2]; 2], b_b: [0.0, d], b_a: [0.0; 2], speed: 2.0 };
        assert_eq!(edge_electric(&s), d);
        assert_eq!(edge_signal_speed([1.0, 2.0], [3.0, 4.0]), 4.0);
        assert_eq!(edge_signal_speed([1.5; 2], [1.5; 2]), 1.5);
        let still = Primitive([1.0, 0.0, 0.0, 0.0, 0.6, 0.2, 0.1, 0.0]);
        let ax = fast_speed(&still, Axis::X, &ADI).unwrap();
        let ay = fast_speed(&still, Axis::Y, &ADI).unwrap();
        assert_eq!(edge_signal_speed([ax; 2], [ay; 2]), ax.max(ay));
    }

    fn state() -> impl Strategy<Value = [f64; 8]> {
        (0.1f64..5.0, prop::array::uniform3(-2.0f64..2.0), 0.1f64..5.0, prop::array::uniform3(-2.0f64..2.0))
            .prop_map(|(r, v, p, b)| [r, v[0], v[1], v[2], p, b[0], b[1], b[2]])
    }

    fn mirror(w: [f64; 8]) -> [f64; 8] {
        let mut m = w;
        m[1] = -m[1];
        m[5] = -m[5];
        m
    }

    proptest! {
        #[test]
        fn consistency(w in state()) {
            let u = cons(w);
            let r = llf_flux(&u, &u, Axis::Z, &ADI).unwrap();
            let f = physical_flux(&Primitive(w), Axis::Z, &ADI);
            for q in 0..5 {
                prop_assert!((r.flux[q] - f[q]).abs() <= 1e-13 * (1.0 + f[q].abs()));
            }
        }

        #[test]
        fn mirror_symmetry(wl in state(), wr in state()) {
            // reflecting x -> -x swaps the sides and flips v_x and B_x
            let f = llf_flux(&cons(wl), &cons(wr), Axis::X, &ADI).unwrap();
            let g = llf_flux(&cons(mirror(wr)), &cons(mirror(wl)), Axis::X, &ADI).unwrap();
            let sign = [-1.0, 1.0, -1.0, -1.0, -1.0];
            for q in 0..5 {
                prop_assert!((g.flux[q] - sign[q] * f.flux[q]).abs() <= 1e-12 * (1.0 + f.flux[q].abs()));
            }
            prop_assert!((g.speed - f.speed).abs() <= 1e-14 * f.speed);
        }

        #[test]
        fn continuous_field_gives_plain_average(e in prop::array::uniform4(-3.0f64..3.0), bb in -2.0f64..2.0,
                                                ba in -2.0f64..2.0, s in 0.0f64..10.0) {
            let st = EdgeStates { e: [[e[0], e[1]], [e[2], e[3]]], b_b: [bb; 2], b_a: [ba; 2], speed: s };
            prop_assert!((edge_electric(&st) - 0.25 * (e[0] + e[1] + e[2] + e[3])).abs() <= 1e-15);
        }
    }
}
