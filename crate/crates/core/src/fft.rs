//! Unnormalized forward DFT of arbitrary length.
//!
//! Power-of-two lengths use an iterative radix-2 transform; every other length
//! goes through Bluestein's chirp-z reformulation on a padded power-of-two
//! grid. Plans hold only read-only twiddle tables, so a plan may be shared
//! across threads while each caller owns its working buffer.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::{cis, PI};
use crate::Complex;

#[derive(Clone, Debug)]
pub struct Fft {
    len: usize,
    kind: Kind,
}

#[derive(Clone, Debug)]
enum Kind {
    Trivial,
    Radix2(Radix2),
    Bluestein(Bluestein),
}

impl Fft {
    pub fn new(len: usize) -> Self {
        let kind = if len <= 1 {
            Kind::Trivial
        } else if len.is_power_of_two() {
            Kind::Radix2(Radix2::new(len))
        } else {
            Kind::Bluestein(Bluestein::new(len))
        };
        Self { len, kind }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// In-place `X[k] = Σ x[n]·exp(−j2πkn/len)`.
    ///
    /// # Panics
    /// If `buf.len()` differs from the planned length.
    pub fn forward(&self, buf: &mut [Complex]) {
        assert_eq!(buf.len(), self.len, "buffer length does not match plan");
        match &self.kind {
            Kind::Trivial => {}
            Kind::Radix2(r) => r.forward(buf),
            Kind::Bluestein(b) => b.forward(buf),
        }
    }
}

#[derive(Clone, Debug)]
struct Radix2 {
    len: usize,
    // exp(−j2πk/len), k < len/2
    twiddles: Vec<Complex>,
}

impl Radix2 {
    fn new(len: usize) -> Self {
        let twiddles = (0..len / 2)
            .map(|k| cis(-2.0 * PI * k as f64 / len as f64))
            .collect();
        Self { len, twiddles }
    }

    fn forward(&self, buf: &mut [Complex]) {
        let n = self.len;
        let bits = n.trailing_zeros();
        for i in 0..n {
            let j = i.reverse_bits() >> (usize::BITS - bits);
            if j > i {
                buf.swap(i, j);
            }
        }
        let mut size = 2;
        while size <= n {
            let half = size / 2;
            let stride = n / size;
            for start in (0..n).step_by(size) {
                for k in 0..half {
                    let w = self.twiddles[k * stride];
                    let a = buf[start + k];
                    let b = buf[start + k + half] * w;
                    buf[start + k] = a + b;
                    buf[start + k + half] = a - b;
                }
            }
            size *= 2;
        }
    }

    /// Unnormalized inverse via conjugation.
    fn inverse(&self, buf: &mut [Complex]) {
        for v in buf.iter_mut() {
            *v = v.conj();
        }
        self.forward(buf);
        for v in buf.iter_mut() {
            *v = v.conj();
        }
    }
}

#[derive(Clone, Debug)]
struct Bluestein {
    len: usize,
    inner: Radix2,
    // exp(−jπn²/len)
    chirp: Vec<Complex>,
    // forward transform of the conjugate chirp, wrapped onto the padded grid
    kernel_spectrum: Vec<Complex>,
}

impl Bluestein {
    fn new(len: usize) -> Self {
        let padded = (2 * len - 1).next_power_of_two();
        let inner = Radix2::new(padded);
        // n² mod 2·len keeps the phase argument small and exact in integers
        let chirp: Vec<Complex> = (0..len)
            .map(|n| {
                let sq = (n as u128 * n as u128) % (2 * len as u128);
                cis(-PI * sq as f64 / len as f64)
            })
            .collect();
        let mut kernel = vec![Complex::new(0.0, 0.0); padded];
        kernel[0] = chirp[0].conj();
        for n in 1..len {
            kernel[n] = chirp[n].conj();
            kernel[padded - n] = chirp[n].conj();
        }
        inner.forward(&mut kernel);
        Self {
            len,
            inner,
            chirp,
            kernel_spectrum: kernel,
        }
    }

    fn forward(&self, buf: &mut [Complex]) {
        let padded = self.inner.len;
        let mut work = vec![Complex::new(0.0, 0.0); padded];
        for ((w, &x), &c) in work.iter_mut().zip(buf.iter()).zip(&self.chirp) {
            *w = x * c;
        }
        self.inner.forward(&mut work);
        for (w, &k) in work.iter_mut().zip(&self.kernel_spectrum) {
            *w *= k;
        }
        self.inner.inverse(&mut work);
        let scale = 1.0 / padded as f64;
        for (k, out) in buf.iter_mut().enumerate().take(self.len) {
            *out = work[k] * self.chirp[k] * scale;
        }
    }
}
