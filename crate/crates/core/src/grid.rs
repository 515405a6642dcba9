//! Uniform position grids and their momentum axes.
//!
//! A [`PhaseGrid`] is isotropic: every spatial axis carries the same sample
//! count and window. Two momentum axes hang off each position axis:
//!
//! * the FFT-conjugate axis, spacing `2πħ/(N·dx)`, used for `ψ̃(p)`;
//! * the Wigner axis, spacing `πħ/(N·dx)`, produced when the Wigner integral
//!   is sampled with step `y = 2·dx` so that `ψ(x ± y/2)` stays on the grid.
//!
//! Both are centered: indices run over `−N/2 ..= N/2 − 1`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Largest supported number of spatial dimensions.
pub const MAX_DIMS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentumKind {
    Conjugate,
    Wigner,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseGrid {
    n_dims: usize,
    points: usize,
    x_min: f64,
    x_max: f64,
    hbar: f64,
}

impl PhaseGrid {
    pub fn new(n_dims: usize, points: usize, x_min: f64, x_max: f64, hbar: f64) -> Result<Self> {
        if n_dims == 0 || n_dims > MAX_DIMS {
            return Err(Error::UnsupportedDimension(n_dims));
        }
        if points < 8 || !points.is_power_of_two() {
            return Err(Error::Config(format!(
                "points must be a power of two and at least 8, got {points}"
            )));
        }
        if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min {
            return Err(Error::Config(format!(
                "position window must satisfy x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::Config(format!("hbar must be positive, got {hbar}")));
        }
        Ok(Self { n_dims, points, x_min, x_max, hbar })
    }

    pub fn n_dims(&self) -> usize {
        self.n_dims
    }

    /// Samples per axis.
    pub fn points(&self) -> usize {
        self.points
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.points as f64
    }

    pub fn dp_conj(&self) -> f64 {
        2.0 * PI * self.hbar / (self.points as f64 * self.dx())
    }

    pub fn dp_wig(&self) -> f64 {
        PI * self.hbar / (self.points as f64 * self.dx())
    }

    pub fn dp(&self, kind: MomentumKind) -> f64 {
        match kind {
            MomentumKind::Conjugate => self.dp_conj(),
            MomentumKind::Wigner => self.dp_wig(),
        }
    }

    /// Number of samples on the full position grid, `N^n`.
    pub fn len(&self) -> usize {
        self.points.pow(self.n_dims as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `[N; n]`, the shape of a position-space array.
    pub fn shape(&self) -> Vec<usize> {
        vec![self.points; self.n_dims]
    }

    /// Shape of a phase-space array: position axes first, then momentum axes.
    pub fn phase_shape(&self) -> Vec<usize> {
        vec![self.points; 2 * self.n_dims]
    }

    /// `dx^n`
    pub fn cell_x(&self) -> f64 {
        self.dx().powi(self.n_dims as i32)
    }

    /// `dp^n` for the given momentum axis.
    pub fn cell_p(&self, kind: MomentumKind) -> f64 {
        self.dp(kind).powi(self.n_dims as i32)
    }

    /// `(2πħ)^n`
    pub fn phase_volume(&self) -> f64 {
        (2.0 * PI * self.hbar).powi(self.n_dims as i32)
    }

    fn check_axis(&self, axis: usize) -> Result<()> {
        if axis >= self.n_dims {
            return Err(Error::Index { axis, n_dims: self.n_dims });
        }
        Ok(())
    }

    pub fn position(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx()
    }

    /// Inverse of [`position`](Self::position), `None` off the grid.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let t = (x - self.x_min) / self.dx();
        let j = t.round();
        if (t - j).abs() > 1e-9 || j < 0.0 || j >= self.points as f64 {
            return None;
        }
        Some(j as usize)
    }

    /// Momentum at centered index `k ∈ [−N/2, N/2)`.
    pub fn momentum(&self, k: isize, kind: MomentumKind) -> f64 {
        k as f64 * self.dp(kind)
    }

    /// Lowest momentum on the centered axis, `−N/2·dp`.
    pub fn p_min(&self, kind: MomentumKind) -> f64 {
        self.momentum(-(self.points as isize / 2), kind)
    }

    pub fn position_axis(&self, axis: usize) -> Result<Vec<f64>> {
        self.check_axis(axis)?;
        Ok((0..self.points).map(|j| self.position(j)).collect())
    }

    pub fn momentum_axis(&self, axis: usize, kind: MomentumKind) -> Result<Vec<f64>> {
        self.check_axis(axis)?;
        let half = self.points as isize / 2;
        Ok((-half..half).map(|k| self.momentum(k, kind)).collect())
    }

    /// Flat row-major offset of a multi-index.
    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.points + i)
    }

    /// Multi-index of a flat row-major offset over `n` axes of length `N`.
    pub fn unravel(&self, mut flat: usize, out: &mut [usize]) {
        for slot in out.iter_mut().rev() {
            *slot = flat % self.points;
            flat /= self.points;
        }
    }
}
