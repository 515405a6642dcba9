//! Wigner function of a pure state and the quantities read off it.
//!
//! With `y = 2m·dx` the integrand `ψ*(x + y/2) ψ(x − y/2)` only touches grid
//! points, and the `m`-sum becomes a centered DFT onto the Wigner momentum
//! axis. Indices outside the window contribute zero.

use ndarray::{ArrayD, IxDyn};
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft::{Dft, Direction};
use crate::grid::{MomentumKind, PhaseGrid};
use crate::states::WaveFunction;

/// Largest imaginary residue tolerated before it is discarded.
pub const REALNESS_TOL: f64 = 1e-10;
/// Allowed deviation of `∫∫W` from one.
pub const NORM_TOL: f64 = 1e-6;
/// Slack on the `(πħ)^{−n}` bound.
pub const BOUND_SLACK: f64 = 1e-8;

/// Samples of `W(x, p)` on positions × Wigner momenta, row-major with the
/// position axes first.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    grid: PhaseGrid,
    samples: ArrayD<f64>,
    time_tag: f64,
}

impl WignerGrid {
    /// Wrap samples after checking normalization and the pointwise bound.
    pub fn new(grid: PhaseGrid, samples: Vec<f64>, time_tag: f64) -> Result<Self> {
        if samples.len() != grid.len() * grid.len() {
            return Err(Error::Config(format!(
                "expected {} Wigner samples, got {}",
                grid.len() * grid.len(),
                samples.len()
            )));
        }
        let w = Self::from_parts(grid, samples, time_tag);
        w.check()?;
        Ok(w)
    }

    pub(crate) fn from_parts(grid: PhaseGrid, samples: Vec<f64>, time_tag: f64) -> Self {
        let samples =
            ArrayD::from_shape_vec(IxDyn(&grid.phase_shape()), samples).expect("phase-space shape");
        Self { grid, samples, time_tag }
    }

    fn check(&self) -> Result<()> {
        if self.samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("non-finite Wigner sample".into()));
        }
        let total = self.total();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::Numerical(format!("Wigner function integrates to {total}")));
        }
        let bound = (std::f64::consts::PI * self.grid.hbar()).powi(-(self.grid.n_dims() as i32));
        let peak = self.samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if peak > bound + BOUND_SLACK {
            return Err(Error::Numerical(format!("|W| reaches {peak}, above the bound {bound}")));
        }
        Ok(())
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn samples(&self) -> &ArrayD<f64> {
        &self.samples
    }

    pub fn as_slice(&self) -> &[f64] {
        self.samples.as_slice().expect("standard layout")
    }

    pub fn time_tag(&self) -> f64 {
        self.time_tag
    }

    /// `W` at position multi-index `j` and centered momentum index `k`.
    pub fn at(&self, j: &[usize], k: &[isize]) -> f64 {
        let half = self.grid.points() as isize / 2;
        let mut idx: Vec<usize> = j.to_vec();
        idx.extend(k.iter().map(|&k| (k + half) as usize));
        self.samples[IxDyn(&idx)]
    }

    fn cell(&self) -> f64 {
        self.grid.cell_x() * self.grid.cell_p(MomentumKind::Wigner)
    }

    /// `ΣΣ W dx^n dp^n`
    pub fn total(&self) -> f64 {
        self.samples.sum() * self.cell()
    }

    pub fn min(&self) -> f64 {
        self.samples.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `(2πħ)^n ΣΣ W² dx^n dp^n`, one for pure states.
    pub fn purity(&self) -> f64 {
        self.grid.phase_volume() * self.samples.iter().map(|v| v * v).sum::<f64>() * self.cell()
    }

    pub fn max_abs_diff(&self, other: &WignerGrid) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .samples
            .iter()
            .zip(other.samples.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// For every position `j`, sum `pair(j, m) e^{ip_k·2m·dx/ħ}` over centered
/// `m` onto the Wigner momentum axis and scale by `prefactor`.
///
/// Output is row-major (position, momentum). Rows are independent, so the
/// result does not depend on how rayon schedules them.
pub(crate) fn anti_diagonal_transform<F>(grid: &PhaseGrid, prefactor: f64, pair: F) -> Vec<C64>
where
    F: Fn(&[usize], &[isize]) -> C64 + Sync,
{
    let n = grid.points();
    let dims = grid.n_dims();
    let half = n as isize / 2;
    let dft = Dft::new(n);
    let len = grid.len();
    let mut out = vec![C64::new(0.0, 0.0); len * len];
    out.par_chunks_mut(len).enumerate().for_each(|(flat, row)| {
        let mut j = [0usize; 2];
        grid.unravel(flat, &mut j[..dims]);
        let mut mp = [0usize; 2];
        let mut m = [0isize; 2];
        for (mflat, v) in row.iter_mut().enumerate() {
            grid.unravel(mflat, &mut mp[..dims]);
            for d in 0..dims {
                m[d] = mp[d] as isize - half;
            }
            *v = pair(&j[..dims], &m[..dims]);
        }
        dft.centered_nd(row, dims, Direction::Inverse);
        row.iter_mut().for_each(|v| *v *= prefactor);
    });
    out
}

/// Offset `j + s·m` on every axis, `None` when it leaves the window.
pub(crate) fn offset_index(grid: &PhaseGrid, j: &[usize], m: &[isize], sign: isize) -> Option<usize> {
    let n = grid.points() as isize;
    let mut flat = 0usize;
    for (&ji, &mi) in j.iter().zip(m) {
        let v = ji as isize + sign * mi;
        if v < 0 || v >= n {
            return None;
        }
        flat = flat * n as usize + v as usize;
    }
    Some(flat)
}

/// `(2dx)^n / (2πħ)^n`, the weight of one `m` term.
pub(crate) fn wigner_prefactor(grid: &PhaseGrid) -> f64 {
    (2.0 * grid.dx()).powi(grid.n_dims() as i32) / grid.phase_volume()
}

/// Realness, normalization and bound checks shared by every route.
pub(crate) fn finish(grid: &PhaseGrid, values: Vec<C64>, time_tag: f64) -> Result<WignerGrid> {
    let imag = values.iter().fold(0.0f64, |a, v| a.max(v.im.abs()));
    if imag >= REALNESS_TOL {
        return Err(Error::Numerical(format!(
            "Wigner transform has imaginary residue {imag:.3e}"
        )));
    }
    WignerGrid::new(*grid, values.iter().map(|v| v.re).collect(), time_tag)
}

pub fn wigner_from_state(wf: &WaveFunction) -> Result<WignerGrid> {
    let grid = wf.grid();
    let psi = wf.as_slice();
    let values = anti_diagonal_transform(grid, wigner_prefactor(grid), |j, m| {
        match (offset_index(grid, j, m, 1), offset_index(grid, j, m, -1)) {
            (Some(a), Some(b)) => psi[a].conj() * psi[b],
            _ => C64::new(0.0, 0.0),
        }
    });
    finish(grid, values, 0.0)
}

/// `M(x_j) = Σ_p W(x_j, p) dp^n`
pub fn marginal_position(w: &WignerGrid) -> Vec<f64> {
    let len = w.grid.len();
    let dp = w.grid.cell_p(MomentumKind::Wigner);
    w.as_slice().chunks(len).map(|row| row.iter().sum::<f64>() * dp).collect()
}

/// `M(p_k) = Σ_x W(x, p_k) dx^n`, indexed like the Wigner momentum axes.
pub fn marginal_momentum(w: &WignerGrid) -> Vec<f64> {
    let len = w.grid.len();
    let dx = w.grid.cell_x();
    let mut out = vec![0.0; len];
    for row in w.as_slice().chunks(len) {
        for (o, v) in out.iter_mut().zip(row) {
            *o += v;
        }
    }
    out.iter_mut().for_each(|v| *v *= dx);
    out
}

/// `ΣΣ max(0, −W) dx^n dp^n`
pub fn negativity_volume(w: &WignerGrid) -> f64 {
    w.samples.iter().map(|v| (-v).max(0.0)).sum::<f64>() * w.cell()
}
