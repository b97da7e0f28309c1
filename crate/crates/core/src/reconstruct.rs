//! One-dimensional reconstruction of interface values from averages:
//! fourth-order CWENO on a five-point stencil and the second-order van Leer
//! TVD limiter used as the low-order partner.

use crate::Real;

/// Parameters of the nonlinear CWENO weights.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WenoParams<T> {
    pub epsilon: T,
    pub power: i32,
    /// Optimal (linear) weights of the left, central and right sub-stencils.
    pub optimal: [T; 3],
}

impl<T: Real> Default for WenoParams<T> {
    fn default() -> Self {
        WenoParams {
            epsilon: T::lit(1e-6),
            power: 2,
            optimal: [T::lit(1.0 / 6.0), T::lit(2.0 / 3.0), T::lit(1.0 / 6.0)],
        }
    }
}

impl<T: Real> WenoParams<T> {
    pub fn is_valid(&self) -> bool {
        let sum: T = self.optimal.iter().copied().sum();
        self.epsilon > T::zero() && self.optimal.iter().all(|&c| c > T::zero()) && (sum - T::one()).abs() < T::lit(1e-12)
    }
}

/// High-order reconstruction kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reconstruction {
    Cweno4,
    Tvd2,
}

/// Which smoothness indicators drive the CWENO weights.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GsiMode {
    /// Every variable uses its own indicators.
    Individual,
    /// Global indicators taken from the density alone (pure hydrodynamics).
    Density,
    /// Normalised average of the density and the three field components.
    Mhd,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReconOptions<T> {
    pub method: Reconstruction,
    pub gsi: GsiMode,
    pub weno: WenoParams<T>,
}

impl<T: Real> Default for ReconOptions<T> {
    fn default() -> Self {
        ReconOptions { method: Reconstruction::Cweno4, gsi: GsiMode::Mhd, weno: WenoParams::default() }
    }
}

/// Smoothness indicators `(IS_L, IS_C, IS_R)` of the three quadratic
/// sub-stencil polynomials of `s = (Q_{i-2}, ..., Q_{i+2})`.
#[inline(always)]
pub fn smoothness_indicators<T: Real>(s: &[T; 5]) -> [T; 3] {
    let c13 = T::lit(13.0 / 12.0);
    let q = T::lit(0.25);
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let four = T::lit(4.0);
    let l2 = s[0] - two * s[1] + s[2];
    let l1 = s[0] - four * s[1] + three * s[2];
    let c2 = s[1] - two * s[2] + s[3];
    let c1 = s[1] - s[3];
    let r2 = s[2] - two * s[3] + s[4];
    let r1 = three * s[2] - four * s[3] + s[4];
    [c13 * l2 * l2 + q * l1 * l1, c13 * c2 * c2 + q * c1 * c1, c13 * r2 * r2 + q * r1 * r1]
}

#[inline(always)]
pub fn weights_from_indicators<T: Real>(is: &[T; 3], params: &WenoParams<T>) -> [T; 3] {
    let alpha: [T; 3] = std::array::from_fn(|m| {
        let d = params.epsilon + is[m];
        let dp = if params.power == 2 { d * d } else { d.powi(params.power) };
        params.optimal[m] / dp
    });
    let inv = T::one() / (alpha[0] + alpha[1] + alpha[2]);
    [alpha[0] * inv, alpha[1] * inv, alpha[2] * inv]
}

/// Weighted sub-stencil values at the cell faces: `(Q^W_{i+1/2}, Q^E_{i-1/2})`.
#[inline(always)]
pub fn cweno_pair<T: Real>(s: &[T; 5], w: &[T; 3]) -> (T, T) {
    let n = |x: f64| T::lit(x);
    let sixth = n(1.0 / 6.0);
    let west = sixth
        * (w[0] * (n(2.0) * s[0] - n(7.0) * s[1] + n(11.0) * s[2])
            + w[1] * (-s[1] + n(5.0) * s[2] + n(2.0) * s[3])
            + w[2] * (n(2.0) * s[2] + n(5.0) * s[3] - s[4]));
    let east = sixth
        * (w[0] * (-s[0] + n(5.0) * s[1] + n(2.0) * s[2])
            + w[1] * (n(2.0) * s[1] + n(5.0) * s[2] - s[3])
            + w[2] * (n(11.0) * s[2] - n(7.0) * s[3] + n(2.0) * s[4]));
    (west, east)
}

/// Scales an indicator triple to unit sum (regularised by `eps`).
#[inline(always)]
pub fn normalized<T: Real>(is: &[T; 3], eps: T) -> [T; 3] {
    let inv = T::one() / (is[0] + is[1] + is[2] + eps);
    [is[0] * inv, is[1] * inv, is[2] * inv]
}

/// Global indicator for MHD: the equal-weight mean of the normalised
/// triples of the density and the three magnetic components.
#[inline(always)]
pub fn global_smoothness_mhd<T: Real>(rho: &[T; 3], b: &[[T; 3]; 3], eps: T) -> [T; 3] {
    let r = normalized(rho, eps);
    let bx = normalized(&b[0], eps);
    let by = normalized(&b[1], eps);
    let bz = normalized(&b[2], eps);
    let q = T::lit(0.25);
    std::array::from_fn(|m| q * (r[m] + bx[m] + by[m] + bz[m]))
}

/// Global indicator for the selected mode; `None` for [`GsiMode::Individual`].
pub fn global_smoothness<T: Real>(mode: GsiMode, rho: &[T; 3], b: &[[T; 3]; 3], eps: T) -> Option<[T; 3]> {
    match mode {
        GsiMode::Individual => None,
        GsiMode::Density => Some(*rho),
        GsiMode::Mhd => Some(global_smoothness_mhd(rho, b, eps)),
    }
}

/// Van Leer limited linear reconstruction `(Q^W_{i+1/2}, Q^E_{i-1/2})`.
#[inline(always)]
pub fn tvd2_pair<T: Real>(qm: T, q0: T, qp: T) -> (T, T) {
    let num = (qp - q0) * (q0 - qm);
    if num > T::zero() {
        let d = num / (qp - qm);
        (q0 + d, q0 - d)
    } else {
        (q0, q0)
    }
}

/// Interface pair of one variable, blending high order with TVD2 by the
/// flattener `wf` when it is below one.
#[inline(always)]
pub fn blended_pair<T: Real>(s: &[T; 5], weights: &[T; 3], method: Reconstruction, wf: T) -> (T, T) {
    match method {
        Reconstruction::Tvd2 => tvd2_pair(s[1], s[2], s[3]),
        Reconstruction::Cweno4 => {
            let (w, e) = cweno_pair(s, weights);
            if wf < T::one() {
                let (tw, te) = tvd2_pair(s[1], s[2], s[3]);
                let lo = T::one() - wf;
                (wf * w + lo * tw, wf * e + lo * te)
            } else {
                (w, e)
            }
        }
    }
}

/// Indices of the variables feeding the global indicators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GsiVars {
    pub density: usize,
    pub field: Option<[usize; 3]>,
}

/// Reconstructs every variable of one cell whose `recon` flag is set.
/// Variables only referenced by the global indicator may be left unflagged.
/// Returns the indicator triple used for the shared weights (the density
/// triple in individual mode).
#[inline]
pub fn reconstruct_cell<T: Real, const N: usize>(
    st: &[[T; 5]; N],
    recon: &[bool; N],
    vars: GsiVars,
    opts: &ReconOptions<T>,
    wf: T,
    west: &mut [T; N],
    east: &mut [T; N],
) -> [T; 3] {
    let rho_is = smoothness_indicators(&st[vars.density]);
    let gsi = match (opts.gsi, vars.field) {
        (GsiMode::Mhd, Some(f)) => {
            let b = [smoothness_indicators(&st[f[0]]), smoothness_indicators(&st[f[1]]), smoothness_indicators(&st[f[2]])];
            Some(global_smoothness_mhd(&rho_is, &b, opts.weno.epsilon))
        }
        (GsiMode::Individual, _) => None,
        _ => Some(rho_is),
    };
    let shared = gsi.map(|g| weights_from_indicators(&g, &opts.weno));
    for q in 0..N {
        if !recon[q] {
            continue;
        }
        let w = match shared {
            Some(w) => w,
            None if opts.method == Reconstruction::Cweno4 => weights_from_indicators(&smoothness_indicators(&st[q]), &opts.weno),
            None => opts.weno.optimal,
        };
        let (a, b) = blended_pair(&st[q], &w, opts.method, wf);
        west[q] = a;
        east[q] = b;
    }
    gsi.unwrap_or(rho_is)
}

/// West/east interface values of one variable along a line.
#[derive(Clone, Debug, PartialEq)]
pub struct LineValues<T> {
    /// `west[i]` is the value at `i + 1/2` seen from cell `i`.
    pub west: Vec<T>,
    /// `east[i]` is the value at `i - 1/2` seen from cell `i`.
    pub east: Vec<T>,
}

/// Reconstructs several variables along one line of averages.
///
/// Every slice in `variables` must have the same length; cells within two of
/// either end are not reconstructed and keep their average on both sides.
/// `flattener[i]` blends cell `i` between CWENO4 (1) and TVD2 (0).
pub fn reconstruct_line<T: Real>(
    variables: &[&[T]],
    vars: GsiVars,
    opts: &ReconOptions<T>,
    flattener: &[T],
) -> Vec<LineValues<T>> {
    let n = variables.first().map_or(0, |v| v.len());
    assert!(variables.iter().all(|v| v.len() == n) && flattener.len() == n);
    let mut out: Vec<LineValues<T>> =
        variables.iter().map(|v| LineValues { west: v.to_vec(), east: v.to_vec() }).collect();
    for i in 2..n.saturating_sub(2) {
        let st: Vec<[T; 5]> = variables.iter().map(|v| [v[i - 2], v[i - 1], v[i], v[i + 1], v[i + 2]]).collect();
        let rho_is = smoothness_indicators(&st[vars.density]);
        let gsi = match (opts.gsi, vars.field) {
            (GsiMode::Mhd, Some(f)) => {
                let b = f.map(|q| smoothness_indicators(&st[q]));
                Some(global_smoothness_mhd(&rho_is, &b, opts.weno.epsilon))
            }
            (GsiMode::Individual, _) => None,
            _ => Some(rho_is),
        };
        for (q, s) in st.iter().enumerate() {
            let w = match gsi {
                Some(g) => weights_from_indicators(&g, &opts.weno),
                None => weights_from_indicators(&smoothness_indicators(s), &opts.weno),
            };
            let (a, b) = blended_pair(s, &w, opts.method, flattener[i]);
            out[q].west[i] = a;
            out[q].east[i] = b;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn params() -> WenoParams<f64> {
        WenoParams::default()
    }

    /// Exact average of the polynomial `sum c_k x^k` over `[a, b]`.
    fn poly_average(c: &[f64], a: f64, b: f64) -> f64 {
        let prim = |x: f64| c.iter().enumerate().map(|(k, ck)| ck * x.powi(k as i32 + 1) / (k as f64 + 1.0)).sum::<f64>();
        (prim(b) - prim(a)) / (b - a)
    }

    fn poly_value(c: &[f64], x: f64) -> f64 {
        c.iter().enumerate().map(|(k, ck)| ck * x.powi(k as i32)).sum()
    }

    /// Degree-4 interpolant of five unit-cell averages (solved through the
    /// average conditions), evaluated at +-1/2; independent of the closed forms.
    fn p_opt_faces(q: &[f64; 5]) -> (f64, f64) {
        let mut m = [[0.0; 6]; 5];
        for (r, row) in m.iter_mut().enumerate() {
            let (a, b) = (r as f64 - 2.5, r as f64 - 1.5);
            for k in 0..5 {
                row[k] = (b.powi(k as i32 + 1) - a.powi(k as i32 + 1)) / (k as f64 + 1.0);
            }
            row[5] = q[r];
        }
        for col in 0..5 {
            let piv = (col..5).max_by(|&x, &y| m[x][col].abs().partial_cmp(&m[y][col].abs()).unwrap()).unwrap();
            m.swap(col, piv);
            for r in 0..5 {
                if r != col {
                    let f = m[r][col] / m[col][col];
                    for c in col..6 {
                        m[r][c] -= f * m[col][c];
                    }
                }
            }
        }
        let coef: Vec<f64> = (0..5).map(|k| m[k][5] / m[k][k]).collect();
        (poly_value(&coef, 0.5), poly_value(&coef, -0.5))
    }

    #[test]
    fn indicators_examples() {
        assert_eq!(smoothness_indicators(&[2.0; 5]), [0.0; 3]);
        let b = 0.3;
        let lin: [f64; 5] = std::array::from_fn(|m| b * m as f64);
        for v in smoothness_indicators(&lin) {
            assert_relative_eq!(v, b * b, max_relative = 1e-14);
        }
        let step = smoothness_indicators(&[0.0, 0.0, 0.0, 1.0, 1.0]);
        assert_eq!(step[0], 0.0);
        assert_relative_eq!(step[1], 13.0 / 12.0 + 0.25, max_relative = 1e-15);
        assert_relative_eq!(step[2], 13.0 / 12.0 + 9.0 / 4.0, max_relative = 1e-15);
    }

    #[test]
    fn weights_examples() {
        let p = params();
        for is in [[0.0; 3], [0.09; 3]] {
            let w = weights_from_indicators(&is, &p);
            assert_relative_eq!(w[0], 1.0 / 6.0, max_relative = 1e-14);
            assert_relative_eq!(w[1], 2.0 / 3.0, max_relative = 1e-14);
            assert_relative_eq!(w[2], 1.0 / 6.0, max_relative = 1e-14);
        }
        let w = weights_from_indicators(&smoothness_indicators(&[0.0, 0.0, 0.0, 1.0, 1.0]), &p);
        assert!(w[0] > 0.9999 && w[1] < 1e-4 && w[2] < 1e-4);
    }

    #[test]
    fn pair_examples() {
        let w = params().optimal;
        assert_eq!(cweno_pair(&[3.0; 5], &w), (3.0, 3.0));
        // averages of x^2 over unit cells centred on -2..2
        let q: [f64; 5] = std::array::from_fn(|m| (m as f64 - 2.0).powi(2) + 1.0 / 12.0);
        let (west, east) = cweno_pair(&q, &w);
        assert_relative_eq!(west, 0.25, epsilon = 1e-14);
        assert_relative_eq!(east, 0.25, epsilon = 1e-14);
        let step = [0.0, 0.0, 0.0, 1.0, 1.0];
        let ws = weights_from_indicators(&smoothness_indicators(&step), &params());
        let (a, b) = cweno_pair(&step, &ws);
        for v in [a, b] {
            assert!((-1e-3..=1.0 + 1e-3).contains(&v), "{v}");
        }
    }

    #[test]
    fn gsi_examples() {
        let z = [0.0; 3];
        assert_eq!(global_smoothness(GsiMode::Mhd, &z, &[z; 3], 1e-6), Some([0.0; 3]));
        let rho = [0.3, 0.1, 0.7];
        assert_eq!(global_smoothness(GsiMode::Density, &rho, &[z; 3], 1e-6), Some(rho));
        assert_eq!(global_smoothness(GsiMode::Individual, &rho, &[z; 3], 1e-6), None);
        let g = global_smoothness_mhd(&[1.0, 1.0, 1.0], &[z, [0.0, 0.3, 0.7], z], 1e-6);
        assert!(g[2] > g[0]);
        let w = weights_from_indicators(&g, &params());
        assert!(w[2] < 1.0 / 6.0);
    }

    #[test]
    fn tvd_examples() {
        assert_eq!(tvd2_pair(0.0, 1.0, 2.0), (1.5, 0.5));
        assert_eq!(tvd2_pair(0.0, 1.0, 0.0), (1.0, 1.0));
        assert_eq!(tvd2_pair(4.0, 4.0, 4.0), (4.0, 4.0));
    }

    #[test]
    fn line_blending() {
        let data: Vec<f64> = (0..12).map(|i| ((i as f64) * 0.7).sin()).collect();
        let rho = vec![1.0; 12];
        let vars = GsiVars { density: 0, field: None };
        let opts = ReconOptions { gsi: GsiMode::Density, ..Default::default() };
        let hi = reconstruct_line(&[&rho, &data], vars, &opts, &[1.0; 12]);
        let lo = reconstruct_line(&[&rho, &data], vars, &opts, &[0.0; 12]);
        let mid = reconstruct_line(&[&rho, &data], vars, &opts, &[0.5; 12]);
        for i in 2..10 {
            let (tw, te) = tvd2_pair(data[i - 1], data[i], data[i + 1]);
            assert_eq!(lo[1].west[i], tw);
            assert_eq!(lo[1].east[i], te);
            let st = [data[i - 2], data[i - 1], data[i], data[i + 1], data[i + 2]];
            let (cw, ce) = cweno_pair(&st, &params().optimal);
            assert_relative_eq!(hi[1].west[i], cw, epsilon = 1e-15);
            assert_relative_eq!(hi[1].east[i], ce, epsilon = 1e-15);
            assert_relative_eq!(mid[1].west[i], 0.5 * (cw + tw), epsilon = 1e-15);
            assert_relative_eq!(mid[1].east[i], 0.5 * (ce + te), epsilon = 1e-15);
        }
    }

    proptest! {
        #[test]
        fn weights_sum_to_one(is in prop::array::uniform3(0.0f64..1e3)) {
            let w = weights_from_indicators(&is, &params());
            prop_assert!(((w[0] + w[1] + w[2]) - 1.0).abs() <= 1e-15);
            prop_assert!(w.iter().all(|&x| (0.0..=1.0).contains(&x)));
        }

        #[test]
        fn quadratic_data_is_exact(c in prop::array::uniform3(-2.0f64..2.0), h in 0.05f64..1.0,
                                   is in prop::array::uniform3(0.0f64..10.0)) {
            // any weights reproduce a quadratic exactly
            let q: [f64; 5] = std::array::from_fn(|m| poly_average(&c, (m as f64 - 2.5) * h, (m as f64 - 1.5) * h));
            let w = weights_from_indicators(&is, &params());
            let (west, east) = cweno_pair(&q, &w);
            prop_assert!((west - poly_value(&c, 0.5 * h)).abs() <= 1e-13);
            prop_assert!((east - poly_value(&c, -0.5 * h)).abs() <= 1e-13);
        }

        #[test]
        fn optimal_weights_match_interpolant_on_cubics(c in prop::array::uniform4(-2.0f64..2.0)) {
            let q: [f64; 5] = std::array::from_fn(|m| poly_average(&c, m as f64 - 2.5, m as f64 - 1.5));
            let (west, east) = cweno_pair(&q, &params().optimal);
            let (pw, pe) = p_opt_faces(&q);
            prop_assert!((west - pw).abs() <= 1e-12);
            prop_assert!((east - pe).abs() <= 1e-12);
            prop_assert!((west - poly_value(&c, 0.5)).abs() <= 1e-12);
        }

        #[test]
        fn step_stays_within_data(lo in -5.0f64..5.0, jump in 0.5f64..5.0, pos in 1usize..4) {
            let q: [f64; 5] = std::array::from_fn(|m| if m >= pos { lo + jump } else { lo });
            let w = weights_from_indicators(&smoothness_indicators(&q), &params());
            let (a, b) = cweno_pair(&q, &w);
            for v in [a, b] {
                prop_assert!(v >= lo - 1e-3 * jump && v <= lo + jump + 1e-3 * jump);
            }
        }

        #[test]
        fn global_indicator_is_scale_free(seed in prop::array::uniform5(-1.0f64..1.0), lambda in 0.5f64..4.0) {
            // the normalised indicator only feels the scale through epsilon
            let rho: [f64; 5] = std::array::from_fn(|m| 2.0 + seed[m]);
            let by: [f64; 5] = std::array::from_fn(|m| seed[(m + 2) % 5]);
            let st = [rho, [0.0; 5], by, [0.0; 5]];
            let scaled = st.map(|s| s.map(|v| lambda * v));
            let vars = GsiVars { density: 0, field: Some([1, 2, 3]) };
            let o = ReconOptions::<f64>::default();
            let (mut w1, mut e1, mut w2, mut e2) = ([0.0; 4], [0.0; 4], [0.0; 4], [0.0; 4]);
            reconstruct_cell(&st, &[true; 4], vars, &o, 1.0, &mut w1, &mut e1);
            reconstruct_cell(&scaled, &[true; 4], vars, &o, 1.0, &mut w2, &mut e2);
            for q in 0..4 {
                prop_assert!((w2[q] - lambda * w1[q]).abs() <= 1e-4 * lambda);
                prop_assert!((e2[q] - lambda * e1[q]).abs() <= 1e-4 * lambda);
            }
        }
    }
}
