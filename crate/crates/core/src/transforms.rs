//! Fourth-order conversions between face averages and face-centre point
//! values, and the face-to-cell interpolation of the magnetic field.

use crate::Real;

/// A face value with its four transverse neighbours: `(t1-, t1+, t2-, t2+)`.
/// A missing transverse axis is represented by repeating the centre.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransverseStencil<T> {
    pub center: T,
    pub neighbors: [T; 4],
}

impl<T: Real> TransverseStencil<T> {
    /// Gathers a stencil from flat storage; zero strides collapse onto the centre.
    #[inline(always)]
    pub fn gather(data: &[T], idx: usize, s1: isize, s2: isize) -> Self {
        let at = |o: isize| data[(idx as isize + o) as usize];
        TransverseStencil { center: data[idx], neighbors: [at(-s1), at(s1), at(-s2), at(s2)] }
    }

    #[inline(always)]
    fn laplacian(&self) -> T {
        let two = T::lit(2.0);
        let [a, b, c, d] = self.neighbors;
        (a - two * self.center + b) + (c - two * self.center + d)
    }
}

/// Cell average of a face-centred component from four consecutive faces
/// `(B_{i-3/2}, B_{i-1/2}, B_{i+1/2}, B_{i+3/2})`.
#[inline(always)]
pub fn face_b_to_cell_avg<T: Real>(b: [T; 4]) -> T {
    (T::lit(13.0) * (b[1] + b[2]) - b[0] - b[3]) / T::lit(24.0)
}

#[inline(always)]
pub fn area_to_point<T: Real>(st: &TransverseStencil<T>, wf: T) -> T {
    st.center - wf * st.laplacian() / T::lit(24.0)
}

#[inline(always)]
pub fn point_to_area<T: Real>(st: &TransverseStencil<T>, wf: T) -> T {
    st.center + wf * st.laplacian() / T::lit(24.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn stencil(f: impl Fn(f64, f64) -> f64, y: f64, z: f64, h: f64) -> TransverseStencil<f64> {
        TransverseStencil { center: f(y, z), neighbors: [f(y - h, z), f(y + h, z), f(y, z - h), f(y, z + h)] }
    }

    /// Exact face average of `y^a z^b` over `[y-h/2,y+h/2] x [z-h/2,z+h/2]`.
    fn mono_avg(a: i32, b: i32, y: f64, z: f64, h: f64) -> f64 {
        let int = |p: i32, c: f64| ((c + h / 2.0).powi(p + 1) - (c - h / 2.0).powi(p + 1)) / ((p + 1) as f64 * h);
        int(a, y) * int(b, z)
    }

    #[test]
    fn face_to_cell_examples() {
        assert_eq!(face_b_to_cell_avg([2.5; 4]), 2.5);
        let (a, b) = (0.3, -1.7);
        let lin = |x: f64| a + b * x;
        let xi = 0.4;
        let got = face_b_to_cell_avg([lin(xi - 1.5), lin(xi - 0.5), lin(xi + 0.5), lin(xi + 1.5)]);
        assert_relative_eq!(got, lin(xi), epsilon = 1e-15);
        let cube = |x: f64| x * x * x;
        assert_eq!(face_b_to_cell_avg([cube(-1.5), cube(-0.5), cube(0.5), cube(1.5)]), 0.0);
        // x^2 on unit cells: average over [-1/2,1/2] is 1/12
        let sq = |x: f64| x * x;
        assert_relative_eq!(face_b_to_cell_avg([sq(-1.5), sq(-0.5), sq(0.5), sq(1.5)]), 1.0 / 12.0, epsilon = 1e-15);
    }

    #[test]
    fn transform_examples() {
        let c = TransverseStencil { center: 4.0, neighbors: [4.0; 4] };
        assert_eq!(area_to_point(&c, 0.3), 4.0);
        assert_eq!(point_to_area(&c, 1.0), 4.0);
        let avg = stencil(|y, _| y * y + 1.0 / 12.0, 2.0, 0.0, 1.0);
        assert_relative_eq!(area_to_point(&avg, 1.0), 4.0, epsilon = 1e-14);
        assert_eq!(area_to_point(&avg, 0.0), avg.center);
        let pts = stencil(|y, _| y * y, 2.0, 0.0, 1.0);
        assert_relative_eq!(point_to_area(&pts, 1.0), 4.0 + 1.0 / 12.0, epsilon = 1e-14);
        // a single transverse axis: the collapsed neighbours add nothing
        let one = TransverseStencil { center: 4.0 + 1.0 / 12.0, neighbors: [1.0 + 1.0 / 12.0, 9.0 + 1.0 / 12.0, 4.0 + 1.0 / 12.0, 4.0 + 1.0 / 12.0] };
        assert_relative_eq!(area_to_point(&one, 1.0), 4.0, epsilon = 1e-14);
    }

    #[test]
    fn round_trip_is_fourth_order() {
        let f = |y: f64, z: f64| (1.3 * y).sin() * (0.7 * z + 0.2).cos() + y.powi(4) * 0.1;
        let mut errs = vec![];
        for h in [0.2, 0.1, 0.05, 0.025] {
            let mut worst: f64 = 0.0;
            for s in 0..7 {
                let (y, z) = (0.1 * s as f64, -0.05 * s as f64);
                let at = |yy: f64, zz: f64| {
                    let pts = stencil(f, yy, zz, h);
                    point_to_area(&pts, 1.0)
                };
                let avg = TransverseStencil { center: at(y, z), neighbors: [at(y - h, z), at(y + h, z), at(y, z - h), at(y, z + h)] };
                worst = worst.max((area_to_point(&avg, 1.0) - f(y, z)).abs());
            }
            errs.push(worst);
        }
        for w in errs.windows(2) {
            let eoc = (w[0] / w[1]).log2();
            assert!((eoc - 4.0).abs() <= 0.2, "round-trip EOC {eoc}");
        }
    }

    proptest! {
        #[test]
        fn exact_on_biquadratics(c in prop::array::uniform6(-3.0f64..3.0), y in -2.0f64..2.0, z in -2.0f64..2.0, h in 0.1f64..1.0) {
            // c0 + c1 y + c2 z + c3 y^2 + c4 z^2 + c5 y^2 z^2 is degree <= 2 in each coordinate
            let terms = [(0, 0), (1, 0), (0, 1), (2, 0), (0, 2), (2, 2)];
            let point = |yy: f64, zz: f64| terms.iter().zip(c).map(|(&(a, b), ci)| ci * yy.powi(a) * zz.powi(b)).sum::<f64>();
            let avg = |yy: f64, zz: f64| terms.iter().zip(c).map(|(&(a, b), ci)| ci * mono_avg(a, b, yy, zz, h)).sum::<f64>();
            let sa = stencil(avg, y, z, h);
            let sp = stencil(point, y, z, h);
            // the mixed y^2 z^2 term leaves an h^4 cross remainder
            let tol = 1e-11 + c[5].abs() * h.powi(4) / 144.0 * 1.0001;
            prop_assert!((area_to_point(&sa, 1.0) - point(y, z)).abs() <= tol);
            prop_assert!((point_to_area(&sp, 1.0) - avg(y, z)).abs() <= tol);
        }

        #[test]
        fn transforms_are_linear(a in prop::array::uniform5(-5.0f64..5.0), b in prop::array::uniform5(-5.0f64..5.0),
                                 s in -3.0f64..3.0, wf in 0.0f64..1.0) {
            let mk = |v: [f64; 5]| TransverseStencil { center: v[0], neighbors: [v[1], v[2], v[3], v[4]] };
            let sum: [f64; 5] = std::array::from_fn(|i| a[i] + s * b[i]);
            let lhs = area_to_point(&mk(sum), wf);
            let rhs = area_to_point(&mk(a), wf) + s * area_to_point(&mk(b), wf);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
            let lhs = point_to_area(&mk(sum), wf);
            let rhs = point_to_area(&mk(a), wf) + s * point_to_area(&mk(b), wf);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        }
    }
}
