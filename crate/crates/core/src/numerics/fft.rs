use core::f64::consts::PI;

use super::{cis, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FftDirection {
    /// out_k = sum_j x_j e^{-2 pi i jk/N}
    Forward,
    /// out_k = sum_j x_j e^{+2 pi i jk/N}
    Inverse,
}

/// Unnormalized in-place radix-2 FFT. `buf.len()` must be a power of two.
pub fn fft_in_place(buf: &mut [C64], dir: FftDirection) {
    let n = buf.len();
    assert!(super::is_power_of_two(n), "FFT length must be a power of two");
    if n == 1 {
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            buf.swap(i, j);
        }
    }
    let sign = match dir {
        FftDirection::Forward => -1.0,
        FftDirection::Inverse => 1.0,
    };
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let step = sign * 2.0 * PI / len as f64;
        // Twiddles are evaluated directly rather than by recurrence so the
        // error does not grow with the transform length.
        for k in 0..half {
            let w = cis(step * k as f64);
            let mut start = 0;
            while start < n {
                let a = buf[start + k];
                let b = buf[start + k + half] * w;
                buf[start + k] = a + b;
                buf[start + k + half] = a - b;
                start += len;
            }
        }
        len <<= 1;
    }
}
