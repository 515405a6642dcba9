//! Weyl quantization through the integral kernel, and its inverse.
//!
//! Symbols are sampled on positions × Wigner momenta, the same product grid a
//! [`WignerGrid`] uses. The kernel
//!
//! ```text
//! K(x, x′) = (2πħ)^{−n} Σ_p f((x + x′)/2, p) e^{ip·(x − x′)/ħ} dp^n
//! ```
//!
//! is summed over that momentum axis. Its spacing `πħ/(N·dx)` makes the sum
//! `2N`-periodic in the index difference, so no wrapped image of the diagonal
//! lands inside the `N × N` matrix, and the `N`-point Wigner transform of the
//! kernel returns the symbol on interior points.
//!
//! Midpoints between grid points are filled by band-limited upsampling of `f`
//! along each position axis, done once per kernel.

use ndarray::{Array2, ArrayD, IxDyn};
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft::{Dft, Direction};
use crate::grid::{MomentumKind, PhaseGrid};
use crate::resample::{map_axis, Resampler};
use crate::states::WaveFunction;
use crate::wigner::{anti_diagonal_transform, offset_index, WignerGrid};

/// Imaginary parts below this are treated as rounding.
const REAL_TOL: f64 = 1e-12;

/// `f(x, p)` on positions × Wigner momenta, position axes first.
#[derive(Debug, Clone, PartialEq)]
pub struct Symbol {
    grid: PhaseGrid,
    samples: ArrayD<C64>,
    real_valued: bool,
}

impl Symbol {
    pub fn from_samples(grid: PhaseGrid, samples: Vec<C64>) -> Result<Self> {
        if samples.len() != grid.len() * grid.len() {
            return Err(Error::Config(format!(
                "expected {} symbol samples, got {}",
                grid.len() * grid.len(),
                samples.len()
            )));
        }
        if samples.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Numerical("non-finite symbol sample".into()));
        }
        let real_valued = samples.iter().all(|v| v.im.abs() < REAL_TOL);
        let samples = ArrayD::from_shape_vec(IxDyn(&grid.phase_shape()), samples).expect("shape");
        Ok(Self { grid, samples, real_valued })
    }

    /// Sample `f(x, p)` at every grid point and Wigner momentum.
    pub fn from_fn(grid: &PhaseGrid, f: impl Fn(&[f64], &[f64]) -> C64) -> Result<Self> {
        let dims = grid.n_dims();
        let half = grid.points() as isize / 2;
        let (mut j, mut k) = ([0usize; 2], [0usize; 2]);
        let (mut x, mut p) = ([0.0; 2], [0.0; 2]);
        let mut samples = Vec::with_capacity(grid.len() * grid.len());
        for jf in 0..grid.len() {
            grid.unravel(jf, &mut j[..dims]);
            for d in 0..dims {
                x[d] = grid.position(j[d]);
            }
            for kf in 0..grid.len() {
                grid.unravel(kf, &mut k[..dims]);
                for d in 0..dims {
                    p[d] = grid.momentum(k[d] as isize - half, MomentumKind::Wigner);
                }
                samples.push(f(&x[..dims], &p[..dims]));
            }
        }
        Self::from_samples(*grid, samples)
    }

    pub fn from_real_fn(grid: &PhaseGrid, f: impl Fn(&[f64], &[f64]) -> f64) -> Result<Self> {
        Self::from_fn(grid, |x, p| C64::new(f(x, p), 0.0))
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn samples(&self) -> &ArrayD<C64> {
        &self.samples
    }

    pub fn as_slice(&self) -> &[C64] {
        self.samples.as_slice().expect("standard layout")
    }

    pub fn is_real(&self) -> bool {
        self.real_valued
    }

    pub fn max_abs_diff(&self, other: &Symbol) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .samples
            .iter()
            .zip(other.samples.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

/// Operator kernel `K(x_a, x_b)` over flattened position multi-indices.
///
/// Acts on wavefunctions as `(Kψ)_a = Σ_b K(a, b) ψ_b dx^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    grid: PhaseGrid,
    entries: Array2<C64>,
}

impl KernelMatrix {
    pub fn from_entries(grid: PhaseGrid, entries: Array2<C64>) -> Result<Self> {
        if entries.dim() != (grid.len(), grid.len()) {
            return Err(Error::Config(format!(
                "kernel must be {0}x{0}, got {1:?}",
                grid.len(),
                entries.dim()
            )));
        }
        Ok(Self { grid, entries })
    }

    /// `⟨x|ψ⟩⟨ψ|x′⟩`, the kernel of the projector onto `ψ`.
    pub fn outer_product(wf: &WaveFunction) -> Self {
        let psi = wf.as_slice();
        let len = psi.len();
        let entries = Array2::from_shape_fn((len, len), |(a, b)| psi[a] * psi[b].conj());
        Self { grid: *wf.grid(), entries }
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn entries(&self) -> &Array2<C64> {
        &self.entries
    }

    pub fn get(&self, a: usize, b: usize) -> C64 {
        self.entries[[a, b]]
    }

    pub fn apply(&self, wf: &WaveFunction) -> Result<Vec<C64>> {
        if *wf.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        let cell = self.grid.cell_x();
        Ok(self
            .entries
            .rows()
            .into_iter()
            .map(|row| row.iter().zip(wf.as_slice()).map(|(k, v)| k * v).sum::<C64>() * cell)
            .collect())
    }

    /// `⟨ψ|K|ψ⟩`
    pub fn expectation(&self, wf: &WaveFunction) -> Result<C64> {
        let kpsi = self.apply(wf)?;
        Ok(wf.as_slice().iter().zip(&kpsi).map(|(a, b)| a.conj() * b).sum::<C64>() * self.grid.cell_x())
    }

    /// Largest `|K(a,b) − K(b,a)*|`.
    pub fn hermiticity_error(&self) -> f64 {
        let len = self.grid.len();
        let mut err = 0.0f64;
        for a in 0..len {
            for b in a..len {
                err = err.max((self.entries[[a, b]] - self.entries[[b, a]].conj()).norm());
            }
        }
        err
    }
}

/// Kernel of the Weyl-quantized symbol.
pub fn weyl_kernel(f: &Symbol) -> KernelMatrix {
    let grid = f.grid;
    let n = grid.points();
    let dims = grid.n_dims();
    let half_len = 2 * n - 1;

    // f on the half-spaced midpoint grid along every position axis
    let up = Resampler::affine(n, half_len, 0.5, 0.0);
    let mut shape = grid.phase_shape();
    let mut mid = f.as_slice().to_vec();
    for axis in 0..dims {
        mid = map_axis(&mid, &mut shape, axis, half_len, |lane, out| up.apply(lane, out));
    }

    // for each midpoint s: G_s(d) = Σ_l f(s, p_l) e^{iπ l·d/N} over d mod 2N
    let wide = 2 * n;
    let wide_len = wide.pow(dims as u32);
    let p_len = grid.len();
    let mid_count = half_len.pow(dims as u32);
    let dft = Dft::new(wide);
    let spectra: Vec<Vec<C64>> = (0..mid_count)
        .into_par_iter()
        .map(|s| {
            let row = &mid[s * p_len..(s + 1) * p_len];
            let mut buf = vec![C64::new(0.0, 0.0); wide_len];
            let mut k = [0usize; 2];
            for (kf, v) in row.iter().enumerate() {
                grid.unravel(kf, &mut k[..dims]);
                scatter_split(&mut buf, &k[..dims], n, *v);
            }
            dft.along_axes(&mut buf, dims, |_, lane| dft.process(lane, Direction::Inverse));
            buf
        })
        .collect();

    let pref = (grid.dp_wig() / (2.0 * std::f64::consts::PI * grid.hbar())).powi(dims as i32);
    let len = grid.len();
    let rows: Vec<Vec<C64>> = (0..len)
        .into_par_iter()
        .map(|af| {
            let mut a = [0usize; 2];
            let mut b = [0usize; 2];
            grid.unravel(af, &mut a[..dims]);
            (0..len)
                .map(|bf| {
                    grid.unravel(bf, &mut b[..dims]);
                    let (mut s, mut d) = (0usize, 0usize);
                    for ax in 0..dims {
                        s = s * half_len + a[ax] + b[ax];
                        let diff = a[ax] as isize - b[ax] as isize;
                        d = d * wide + diff.rem_euclid(wide as isize) as usize;
                    }
                    spectra[s][d] * pref
                })
                .collect()
        })
        .collect();
    let entries = Array2::from_shape_vec((len, len), rows.concat()).expect("kernel shape");
    KernelMatrix { grid, entries }
}

/// Place a centered Wigner-axis sample `k` into a `2N`-point spectrum, giving
/// the Nyquist sample `−N/2` half weight at `±N/2`.
fn scatter_split(buf: &mut [C64], k: &[usize], n: usize, v: C64) {
    let wide = 2 * n;
    let half = n as isize / 2;
    let mut targets: Vec<(usize, f64)> = vec![(0, 1.0)];
    for &ki in k {
        let l = ki as isize - half;
        let mut next = Vec::with_capacity(targets.len() * 2);
        for &(base, w) in &targets {
            if l == -half {
                next.push((base * wide + (l.rem_euclid(wide as isize)) as usize, 0.5 * w));
                next.push((base * wide + half as usize, 0.5 * w));
            } else {
                next.push((base * wide + l.rem_euclid(wide as isize) as usize, w));
            }
        }
        targets = next;
    }
    for (idx, w) in targets {
        buf[idx] += v * w;
    }
}

/// `A_W(x, p) = Σ_{x′} K(x − x′/2, x + x′/2) e^{ip·x′/ħ} dx′^n` on the grid,
/// with `x′ = 2m·dx`.
pub fn wigner_transform_operator(k: &KernelMatrix) -> Symbol {
    let grid = k.grid;
    let pref = (2.0 * grid.dx()).powi(grid.n_dims() as i32);
    let values = anti_diagonal_transform(&grid, pref, |j, m| {
        match (offset_index(&grid, j, m, -1), offset_index(&grid, j, m, 1)) {
            (Some(a), Some(b)) => k.entries[[a, b]],
            _ => C64::new(0.0, 0.0),
        }
    });
    let real_valued = values.iter().all(|v| v.im.abs() < REAL_TOL);
    Symbol {
        grid,
        samples: ArrayD::from_shape_vec(IxDyn(&grid.phase_shape()), values).expect("shape"),
        real_valued,
    }
}

/// Both sides of `∫∫|K_f|² dx dx′ = (2πħ)^{−n} ∫∫|f|² dx dp`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HsCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_err: f64,
}

pub fn hs_identity_check(f: &Symbol) -> Result<HsCheck> {
    let grid = f.grid;
    let rhs = f.samples.iter().map(|v| v.norm_sqr()).sum::<f64>()
        * grid.cell_x()
        * grid.cell_p(MomentumKind::Wigner)
        / grid.phase_volume();
    if rhs < 1e-300 {
        return Err(Error::DegenerateSymbol);
    }
    let k = weyl_kernel(f);
    let lhs = k.entries.iter().map(|v| v.norm_sqr()).sum::<f64>() * grid.cell_x().powi(2);
    Ok(HsCheck { lhs, rhs, rel_err: (lhs - rhs).abs() / rhs })
}

/// `⟨Â⟩ = ΣΣ W(x, p) A_W(x, p) dx^n dp^n`
pub fn expectation_via_phase_space(w: &WignerGrid, a: &Symbol) -> Result<f64> {
    if *w.grid() != a.grid {
        return Err(Error::GridMismatch);
    }
    if !a.real_valued {
        return Err(Error::Config("expectation needs a real-valued symbol".into()));
    }
    let cell = a.grid.cell_x() * a.grid.cell_p(MomentumKind::Wigner);
    Ok(w.as_slice().iter().zip(a.as_slice()).map(|(w, a)| w * a.re).sum::<f64>() * cell)
}
