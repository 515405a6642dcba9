//! Thin wrappers over `rustfft` for flat row-major `[N; n]` buffers.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `Σ a_j e^{−2πi jk/N}`
    Forward,
    /// `Σ a_j e^{+2πi jk/N}`, unnormalized
    Inverse,
}

#[derive(Clone)]
pub struct Dft {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Dft {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { n, forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn process(&self, buf: &mut [C64], dir: Direction) {
        debug_assert_eq!(buf.len(), self.n);
        match dir {
            Direction::Forward => self.forward.process(buf),
            Direction::Inverse => self.inverse.process(buf),
        }
    }

    /// DFT with both input and output indexed by centered integers
    /// `−N/2 ..= N/2 − 1` stored at offsets `0 .. N`.
    ///
    /// Centering is done with `(−1)^i` ramps on both sides, so the arrays are
    /// never rolled.
    pub fn centered(&self, buf: &mut [C64], dir: Direction) {
        alternate(buf);
        self.process(buf, dir);
        alternate(buf);
        if (self.n / 2) % 2 == 1 {
            buf.iter_mut().for_each(|v| *v = -*v);
        }
    }

    /// Apply `op` to every 1-D lane of a flat `[N; dims]` array, one axis after
    /// another.
    pub fn along_axes(&self, buf: &mut [C64], dims: usize, mut op: impl FnMut(usize, &mut [C64])) {
        let n = self.n;
        debug_assert_eq!(buf.len(), n.pow(dims as u32));
        let mut lane = vec![C64::new(0.0, 0.0); n];
        for axis in 0..dims {
            let stride = n.pow((dims - 1 - axis) as u32);
            let block = stride * n;
            for outer in (0..buf.len()).step_by(block) {
                for inner in 0..stride {
                    let base = outer + inner;
                    for (i, v) in lane.iter_mut().enumerate() {
                        *v = buf[base + i * stride];
                    }
                    op(axis, &mut lane);
                    for (i, v) in lane.iter().enumerate() {
                        buf[base + i * stride] = *v;
                    }
                }
            }
        }
    }

    /// Centered transform over every axis of a flat `[N; dims]` array.
    pub fn centered_nd(&self, buf: &mut [C64], dims: usize, dir: Direction) {
        self.along_axes(buf, dims, |_, lane| self.centered(lane, dir));
    }
}

/// Multiply entry `i` by `(−1)^i`.
pub fn alternate(buf: &mut [C64]) {
    buf.iter_mut().skip(1).step_by(2).for_each(|v| *v = -*v);
}
