//! Minimal iterative radix-2 FFT, enough to evaluate truncated power
//! series on uniform phase grids.

use num_complex::Complex64 as C64;

/// In-place FFT with e^{-2πi jk/n} twiddles (`inverse` flips the sign and
/// applies no normalization). Length must be a power of two.
pub fn fft_in_place(buf: &mut [C64], inverse: bool) {
    let n = buf.len();
    assert!(n.is_power_of_two(), "FFT length must be a power of two");
    if n <= 1 {
        return;
    }
    // bit-reversal permutation
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            buf.swap(i, j);
        }
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    let mut len = 2usize;
    while len <= n {
        let ang = sign * 2.0 * std::f64::consts::PI / len as f64;
        let wlen = C64::from_polar(1.0, ang);
        let mut i = 0;
        while i < n {
            let mut w = C64::new(1.0, 0.0);
            for k in 0..len / 2 {
                let u = buf[i + k];
                let v = buf[i + k + len / 2] * w;
                buf[i + k] = u + v;
                buf[i + k + len / 2] = u - v;
                w *= wlen;
            }
            i += len;
        }
        len <<= 1;
    }
}

/// Values `S(φ_j) = Σ_n c_n e^{i n φ_j}` on the uniform grid
/// `φ_j = 2π j / m`; `m` must be a power of two at least `c.len()`.
pub fn series_on_grid(c: &[f64], m: usize) -> Vec<C64> {
    assert!(m >= c.len());
    let mut buf = vec![C64::new(0.0, 0.0); m];
    for (n, &cn) in c.iter().enumerate() {
        buf[n] = C64::new(cn, 0.0);
    }
    fft_in_place(&mut buf, true);
    buf
}
