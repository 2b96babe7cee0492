//! Iterative radix-2 complex FFT.

use crate::math;
use alloc::vec::Vec;

/// FFT plan for a fixed power-of-two size; caches twiddle factors so
/// repeated transforms (one per STFT frame) avoid trig calls.
pub struct Fft {
    n: usize,
    // exp(-2*pi*i*k/n) for k in 0..n/2
    twiddle_re: Vec<f64>,
    twiddle_im: Vec<f64>,
}

impl Fft {
    pub fn new(n: usize) -> Self {
        assert!(n.is_power_of_two() && n >= 2, "FFT size must be a power of two, got {n}");
        let half = n / 2;
        let mut twiddle_re = Vec::with_capacity(half);
        let mut twiddle_im = Vec::with_capacity(half);
        for k in 0..half {
            let angle = -math::TWO_PI * k as f64 / n as f64;
            twiddle_re.push(math::cos(angle));
            twiddle_im.push(math::sin(angle));
        }
        Fft { n, twiddle_re, twiddle_im }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn forward(&self, re: &mut [f64], im: &mut [f64]) {
        self.transform(re, im, false);
    }

    /// Inverse transform including the 1/n normalization.
    pub fn inverse(&self, re: &mut [f64], im: &mut [f64]) {
        self.transform(re, im, true);
        let scale = 1.0 / self.n as f64;
        for v in re.iter_mut() {
            *v *= scale;
        }
        for v in im.iter_mut() {
            *v *= scale;
        }
    }

    fn transform(&self, re: &mut [f64], im: &mut [f64], inverse: bool) {
        let n = self.n;
        assert_eq!(re.len(), n);
        assert_eq!(im.len(), n);

        // bit-reversal permutation
        let bits = n.trailing_zeros();
        for i in 0..n {
            let j = i.reverse_bits() >> (usize::BITS - bits);
            if j > i {
                re.swap(i, j);
                im.swap(i, j);
            }
        }

        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let stride = n / len;
            for start in (0..n).step_by(len) {
                for k in 0..half {
                    let wr = self.twiddle_re[k * stride];
                    let wi = if inverse {
                        -self.twiddle_im[k * stride]
                    } else {
                        self.twiddle_im[k * stride]
                    };
                    let a = start + k;
                    let b = a + half;
                    let tr = re[b] * wr - im[b] * wi;
                    let ti = re[b] * wi + im[b] * wr;
                    re[b] = re[a] - tr;
                    im[b] = im[a] - ti;
                    re[a] += tr;
                    im[a] += ti;
                }
            }
            len *= 2;
        }
    }
}
