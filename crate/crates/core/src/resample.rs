//! Band-limited resampling of uniformly sampled data.
//!
//! Interpolation uses the periodic sinc (Dirichlet) kernel of an even-length
//! grid with the Nyquist bin split evenly between `±N/2`, so real data stays
//! real and integer targets reproduce samples exactly. Targets falling
//! outside the sampled window read as zero.

use num_complex::Complex64 as C64;

/// `D(τ) = sin(πτ) / (N tan(πτ/N))`, the interpolation weight of a sample
/// `τ` index steps away.
pub fn periodic_sinc(tau: f64, n: usize) -> f64 {
    let nearest = tau.round();
    if (tau - nearest).abs() < 1e-13 {
        let k = nearest as i64;
        return if k.rem_euclid(n as i64) == 0 { 1.0 } else { 0.0 };
    }
    let nf = n as f64;
    let pi = std::f64::consts::PI;
    (pi * tau).sin() / (nf * (pi * tau / nf).tan())
}

/// Dense interpolation weights from `n` source samples to a list of
/// fractional source positions.
#[derive(Debug, Clone)]
pub struct Resampler {
    n: usize,
    rows: usize,
    weights: Vec<f64>,
    /// Set when every target is an in-range integer; `apply` then copies.
    shifts: Option<Vec<Option<usize>>>,
}

impl Resampler {
    /// `targets` are in units of source index: `0.0` is the first sample,
    /// `n − 1` the last.
    pub fn new(n: usize, targets: &[f64]) -> Self {
        let upper = (n - 1) as f64;
        let inside = |t: f64| t >= -1e-9 && t <= upper + 1e-9;
        let integral = targets.iter().all(|&t| !inside(t) || (t - t.round()).abs() < 1e-9);
        let shifts = integral.then(|| {
            targets
                .iter()
                .map(|&t| inside(t).then(|| t.round() as usize))
                .collect::<Vec<_>>()
        });
        let mut weights = vec![0.0; targets.len() * n];
        if shifts.is_none() {
            for (row, &t) in weights.chunks_mut(n).zip(targets) {
                if inside(t) {
                    for (j, w) in row.iter_mut().enumerate() {
                        *w = periodic_sinc(t - j as f64, n);
                    }
                }
            }
        }
        Self { n, rows: targets.len(), weights, shifts }
    }

    /// Targets `offset + scale·i` for `i in 0..rows`.
    pub fn affine(n: usize, rows: usize, scale: f64, offset: f64) -> Self {
        let targets: Vec<f64> = (0..rows).map(|i| offset + scale * i as f64).collect();
        Self::new(n, &targets)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn is_exact_shift(&self) -> bool {
        self.shifts.is_some()
    }

    pub fn apply(&self, input: &[C64], out: &mut [C64]) {
        debug_assert_eq!(input.len(), self.n);
        debug_assert_eq!(out.len(), self.rows);
        if let Some(shifts) = &self.shifts {
            for (o, s) in out.iter_mut().zip(shifts) {
                *o = s.map_or(C64::new(0.0, 0.0), |j| input[j]);
            }
            return;
        }
        for (o, row) in out.iter_mut().zip(self.weights.chunks(self.n)) {
            *o = row.iter().zip(input).map(|(w, v)| v * *w).sum();
        }
    }

    pub fn apply_real(&self, input: &[f64], out: &mut [f64]) {
        debug_assert_eq!(input.len(), self.n);
        if let Some(shifts) = &self.shifts {
            for (o, s) in out.iter_mut().zip(shifts) {
                *o = s.map_or(0.0, |j| input[j]);
            }
            return;
        }
        for (o, row) in out.iter_mut().zip(self.weights.chunks(self.n)) {
            *o = row.iter().zip(input).map(|(w, v)| w * v).sum();
        }
    }
}

/// Replace axis `axis` of a flat row-major array of shape `shape` by the
/// output of `op`, which maps a lane of length `shape[axis]` to one of length
/// `out_len`. Returns the new buffer; `shape[axis]` is updated in place.
pub fn map_axis<T: Copy + Default>(
    buf: &[T],
    shape: &mut [usize],
    axis: usize,
    out_len: usize,
    mut op: impl FnMut(&[T], &mut [T]),
) -> Vec<T> {
    let len_in = shape[axis];
    let inner: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let mut out = vec![T::default(); outer * out_len * inner];
    let mut lane_in = vec![T::default(); len_in];
    let mut lane_out = vec![T::default(); out_len];
    for o in 0..outer {
        for i in 0..inner {
            let src = o * len_in * inner + i;
            for (k, v) in lane_in.iter_mut().enumerate() {
                *v = buf[src + k * inner];
            }
            op(&lane_in, &mut lane_out);
            let dst = o * out_len * inner + i;
            for (k, v) in lane_out.iter().enumerate() {
                out[dst + k * inner] = *v;
            }
        }
    }
    shape[axis] = out_len;
    out
}
