//! Three-dimensional discrete Fourier transforms on periodic boxes, built
//! from one-dimensional transforms along each axis.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

/// In-place unnormalised transform of an `n[0] x n[1] x n[2]` array stored x
/// fastest. `inverse` selects the `e^{+i...}` kernel.
pub fn fft3(data: &mut [Complex64], n: [usize; 3], inverse: bool) {
    assert_eq!(data.len(), n[0] * n[1] * n[2]);
    let mut planner = FftPlanner::<f64>::new();
    let stride = [1, n[0], n[0] * n[1]];
    for axis in 0..3 {
        let len = n[axis];
        if len == 1 {
            continue;
        }
        let fft = if inverse { planner.plan_fft_inverse(len) } else { planner.plan_fft_forward(len) };
        let mut line = vec![Complex64::new(0.0, 0.0); len];
        let (o1, o2) = match axis {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        for p in 0..n[o2] {
            for q in 0..n[o1] {
                let base = q * stride[o1] + p * stride[o2];
                for (m, v) in line.iter_mut().enumerate() {
                    *v = data[base + m * stride[axis]];
                }
                fft.process(&mut line);
                for (m, v) in line.iter().enumerate() {
                    data[base + m * stride[axis]] = *v;
                }
            }
        }
    }
}

/// Signed integer wavenumber of FFT bin `m` on `n` points.
#[inline]
pub fn wavenumber(m: usize, n: usize) -> i64 {
    if m <= n / 2 {
        m as i64
    } else {
        m as i64 - n as i64
    }
}
