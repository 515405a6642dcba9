//! Separable affine changes of reference frame.
//!
//! A frame maps `X = c∘x − a`, `P = d∘p − b` componentwise with `c∘d = 1`.
//! Position and momentum eigenstates pick up the phases `α(x)` and `β(p)`,
//! fixed (up to a shared constant `ξ`) by requiring
//! `p·x = β(p) − α(x) + P(p)·X(x)` identically.
//!
//! Three independent ways to get the transformed Wigner function are offered:
//! from the mapped wavefunction, from the mapped momentum amplitudes, and by
//! substituting `W(X, P)` directly. They agree to interpolation accuracy.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft::{Dft, Direction};
use crate::grid::{MomentumKind, PhaseGrid, MAX_DIMS};
use crate::resample::{map_axis, Resampler};
use crate::states::{momentum_amplitudes, WaveFunction};
use crate::wigner::{anti_diagonal_transform, finish, offset_index, wigner_prefactor, WignerGrid};

/// `|c·d − 1|` allowed on each axis.
const CONSISTENCY_TOL: f64 = 1e-12;
/// Mass allowed within [`EDGE_LAYER`] samples of a window edge after mapping.
pub const EDGE_MASS_TOL: f64 = 1e-8;
/// Width, in samples, of the layer watched by the boundary check.
pub const EDGE_LAYER: usize = 4;
/// Allowed deviation of the renormalization factor from one.
const RENORM_TOL: f64 = 1e-8;

/// `v ↦ linear·v + constant`
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePolynomial {
    pub linear: Vec<f64>,
    pub constant: f64,
}

impl PhasePolynomial {
    pub fn eval(&self, v: &[f64]) -> f64 {
        self.linear.iter().zip(v).map(|(l, x)| l * x).sum::<f64>() + self.constant
    }
}

/// How the free constants of `α` and `β` are chosen.
///
/// Separation fixes only `β_const − α_const = −a·b`. `xi` is added to both;
/// `split` is the fraction of `a·b` moved into `α`:
/// `α_const = ξ + split·a·b`, `β_const = ξ − (1 − split)·a·b`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhaseConvention {
    pub xi: f64,
    pub split: f64,
}

/// `X = c∘x − a`, `P = d∘p − b` at frame time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineFrame {
    c: Vec<f64>,
    a: Vec<f64>,
    d: Vec<f64>,
    b: Vec<f64>,
    t: f64,
    mass: Option<f64>,
    convention: PhaseConvention,
}

impl AffineFrame {
    pub fn new(c: Vec<f64>, a: Vec<f64>, d: Vec<f64>, b: Vec<f64>, t: f64) -> Result<Self> {
        let dims = c.len();
        if dims == 0 || dims > MAX_DIMS {
            return Err(Error::UnsupportedDimension(dims));
        }
        if a.len() != dims || d.len() != dims || b.len() != dims {
            return Err(Error::Config(format!(
                "frame coefficient lengths differ: c={}, a={}, d={}, b={}",
                dims,
                a.len(),
                d.len(),
                b.len()
            )));
        }
        if c.iter().chain(&a).chain(&d).chain(&b).any(|v| !v.is_finite()) || !t.is_finite() {
            return Err(Error::Config("frame coefficients must be finite".into()));
        }
        for axis in 0..dims {
            let product = c[axis] * d[axis];
            if c[axis] == 0.0 || (product - 1.0).abs() > CONSISTENCY_TOL {
                return Err(Error::FrameInconsistent { axis, product });
            }
        }
        Ok(Self { c, a, d, b, t, mass: None, convention: PhaseConvention::default() })
    }

    pub fn identity(dims: usize) -> Result<Self> {
        Self::new(vec![1.0; dims], vec![0.0; dims], vec![1.0; dims], vec![0.0; dims], 0.0)
    }

    pub fn with_convention(mut self, convention: PhaseConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn n_dims(&self) -> usize {
        self.c.len()
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn d(&self) -> &[f64] {
        &self.d
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn mass(&self) -> Option<f64> {
        self.mass
    }

    pub fn convention(&self) -> PhaseConvention {
        self.convention
    }

    /// `X_i(x) = c_i x − a_i`
    pub fn x_map(&self, axis: usize, x: f64) -> f64 {
        self.c[axis] * x - self.a[axis]
    }

    /// `P_i(p) = d_i p − b_i`
    pub fn p_map(&self, axis: usize, p: f64) -> f64 {
        self.d[axis] * p - self.b[axis]
    }

    fn check_grid(&self, grid: &PhaseGrid) -> Result<()> {
        if self.n_dims() != grid.n_dims() {
            return Err(Error::Config(format!(
                "{}-dimensional frame applied on a {}-dimensional grid",
                self.n_dims(),
                grid.n_dims()
            )));
        }
        Ok(())
    }
}

fn vector(g: &PhaseGrid, name: &str, v: &[f64]) -> Result<Vec<f64>> {
    if v.len() != g.n_dims() {
        return Err(Error::Config(format!("{name} needs {} components, got {}", g.n_dims(), v.len())));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Config(format!("{name} must be finite")));
    }
    Ok(v.to_vec())
}

fn positive_mass(mass: f64) -> Result<f64> {
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::Config(format!("mass must be positive, got {mass}")));
    }
    Ok(mass)
}

/// Rigid shift `X = x − shift`.
pub fn translation_frame(g: &PhaseGrid, shift: &[f64]) -> Result<AffineFrame> {
    let dims = g.n_dims();
    AffineFrame::new(vec![1.0; dims], vector(g, "shift", shift)?, vec![1.0; dims], vec![0.0; dims], 0.0)
}

/// Frame moving with velocity `V`: `X = x − V t`, `P = p − mV`.
pub fn galilean_frame(g: &PhaseGrid, velocity: &[f64], mass: f64, t: f64) -> Result<AffineFrame> {
    let v = vector(g, "velocity", velocity)?;
    let m = positive_mass(mass)?;
    let dims = g.n_dims();
    let mut f = AffineFrame::new(
        vec![1.0; dims],
        v.iter().map(|v| v * t).collect(),
        vec![1.0; dims],
        v.iter().map(|v| m * v).collect(),
        t,
    )?;
    f.mass = Some(m);
    Ok(f)
}

/// Uniformly accelerated frame: `X = x − a t²/2`, `P = p − m a t`.
pub fn acceleration_frame(g: &PhaseGrid, accel: &[f64], mass: f64, t: f64) -> Result<AffineFrame> {
    let acc = vector(g, "accel", accel)?;
    let m = positive_mass(mass)?;
    let dims = g.n_dims();
    let mut f = AffineFrame::new(
        vec![1.0; dims],
        acc.iter().map(|a| 0.5 * a * t * t).collect(),
        vec![1.0; dims],
        acc.iter().map(|a| m * a * t).collect(),
        t,
    )?;
    f.mass = Some(m);
    Ok(f)
}

/// Affine `α(x)`, `β(p)` with `p·x = β(p) − α(x) + P(p)·X(x)`.
///
/// Per axis `α_linear = −c·b` and `β_linear = d·a`; the constants follow the
/// frame's [`PhaseConvention`]. The identity is re-checked at a few
/// pseudo-random points before returning.
pub fn solve_phases(frame: &AffineFrame) -> Result<(PhasePolynomial, PhasePolynomial)> {
    let dims = frame.n_dims();
    for axis in 0..dims {
        let product = frame.c[axis] * frame.d[axis];
        if (product - 1.0).abs() > CONSISTENCY_TOL {
            return Err(Error::FrameInconsistent { axis, product });
        }
    }
    let ab: f64 = frame.a.iter().zip(&frame.b).map(|(a, b)| a * b).sum();
    let PhaseConvention { xi, split } = frame.convention;
    let alpha = PhasePolynomial {
        linear: (0..dims).map(|i| -frame.c[i] * frame.b[i]).collect(),
        constant: xi + split * ab,
    };
    let beta = PhasePolynomial {
        linear: (0..dims).map(|i| frame.d[i] * frame.a[i]).collect(),
        constant: xi - (1.0 - split) * ab,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f4a3);
    let (mut x, mut p) = ([0.0; MAX_DIMS], [0.0; MAX_DIMS]);
    for _ in 0..5 {
        for i in 0..dims {
            x[i] = rng.gen_range(-10.0..10.0);
            p[i] = rng.gen_range(-10.0..10.0);
        }
        let (err, scale) = phase_identity_residual(frame, &alpha, &beta, &x[..dims], &p[..dims]);
        if err > 1e-10 * scale {
            return Err(Error::Internal(format!("phase identity violated by {err:e}")));
        }
    }
    Ok((alpha, beta))
}

/// `|p·x − (β − α + P·X)|` at one point and the magnitude it is measured against.
pub fn phase_identity_residual(
    frame: &AffineFrame,
    alpha: &PhasePolynomial,
    beta: &PhasePolynomial,
    x: &[f64],
    p: &[f64],
) -> (f64, f64) {
    let px: f64 = x.iter().zip(p).map(|(x, p)| x * p).sum();
    let big_px: f64 = (0..x.len()).map(|i| frame.p_map(i, p[i]) * frame.x_map(i, x[i])).sum();
    let (al, be) = (alpha.eval(x), beta.eval(p));
    let err = (px - (be - al + big_px)).abs();
    let scale = 1.0 + px.abs() + al.abs() + be.abs() + big_px.abs();
    (err, scale)
}

/// Resample `samples` (row-major, axes of length `shape`) along the listed
/// axes; `targets[i]` gives fractional source indices for `axes[i]`.
fn resample_axes(samples: &[C64], shape: &[usize], axes: &[usize], targets: &[Vec<f64>]) -> Vec<C64> {
    let mut shape = shape.to_vec();
    let mut buf = samples.to_vec();
    for (&axis, t) in axes.iter().zip(targets) {
        let r = Resampler::new(shape[axis], t);
        buf = map_axis(&buf, &mut shape, axis, t.len(), |lane, out| r.apply(lane, out));
    }
    buf
}

/// Mass (`Σ weight`) lying within [`EDGE_LAYER`] samples of any edge.
fn edge_mass(shape: &[usize], weights: impl Iterator<Item = f64>) -> f64 {
    let mut idx = vec![0usize; shape.len()];
    let mut acc = 0.0;
    for (flat, w) in weights.enumerate() {
        let mut rest = flat;
        for i in (0..shape.len()).rev() {
            idx[i] = rest % shape[i];
            rest /= shape[i];
        }
        if idx.iter().zip(shape).any(|(&i, &n)| i < EDGE_LAYER || i + EDGE_LAYER >= n) {
            acc += w;
        }
    }
    acc
}

fn check_edge(what: &str, mass: f64) -> Result<()> {
    if mass > EDGE_MASS_TOL {
        return Err(Error::Boundary(format!(
            "{what}: mass {mass:.3e} within {EDGE_LAYER} samples of the window edge"
        )));
    }
    Ok(())
}

/// `√|Πc| ψ(X(x_j))` on the grid, with the boundary and norm checks.
fn mapped_position_samples(wf: &WaveFunction, frame: &AffineFrame) -> Result<(Vec<C64>, f64)> {
    let g = wf.grid();
    frame.check_grid(g)?;
    let dims = g.n_dims();
    let n = g.points();
    let targets: Vec<Vec<f64>> = (0..dims)
        .map(|axis| (0..n).map(|j| (frame.x_map(axis, g.position(j)) - g.x_min()) / g.dx()).collect())
        .collect();
    let axes: Vec<usize> = (0..dims).collect();
    let jac = frame.c.iter().product::<f64>().abs().sqrt();
    let mut phi = resample_axes(wf.as_slice(), &g.shape(), &axes, &targets);
    phi.iter_mut().for_each(|v| *v *= jac);

    let cell = g.cell_x();
    check_edge("mapped state", edge_mass(&g.shape(), phi.iter().map(|v| v.norm_sqr() * cell)))?;
    let norm = phi.iter().map(|v| v.norm_sqr()).sum::<f64>() * cell;
    let factor = 1.0 / norm.sqrt();
    if !factor.is_finite() || (factor - 1.0).abs() > RENORM_TOL {
        return Err(Error::Boundary(format!("mapped state has norm {norm:.12}; support left the window")));
    }
    Ok((phi, factor))
}

fn positions(g: &PhaseGrid, j: &[usize], out: &mut [f64]) {
    for (o, &i) in out.iter_mut().zip(j) {
        *o = g.position(i);
    }
}

/// `ψ′(x) = √|Πc| e^{−iα(x)/ħ} ψ(X(x))`, renormalized.
///
/// `ψ(X)` is an exact copy when `X` lands on grid points and band-limited
/// interpolation otherwise. The `√|Πc|` keeps the norm when `c ≠ 1`.
pub fn transform_wavefunction(wf: &WaveFunction, frame: &AffineFrame) -> Result<WaveFunction> {
    let (alpha, _) = solve_phases(frame)?;
    let (mut phi, mut factor) = mapped_position_samples(wf, frame)?;
    if (factor - 1.0).abs() < 1e-13 {
        // round-off only; keeps exact copies exact
        factor = 1.0;
    }
    let g = *wf.grid();
    let dims = g.n_dims();
    let hbar = g.hbar();
    let (mut j, mut x) = ([0usize; MAX_DIMS], [0.0; MAX_DIMS]);
    for (flat, v) in phi.iter_mut().enumerate() {
        g.unravel(flat, &mut j[..dims]);
        positions(&g, &j[..dims], &mut x[..dims]);
        *v *= C64::from_polar(factor, -alpha.eval(&x[..dims]) / hbar);
    }
    Ok(WaveFunction::from_parts(g, phi))
}

/// `W′(x, p)` from the mapped wavefunction:
/// `Σ_y ψ*(X(x + y/2)) ψ(X(x − y/2)) e^{−(i/ħ)[α(x − y/2) − α(x + y/2) − p·y]}`.
pub fn transform_wigner_position_route(wf: &WaveFunction, frame: &AffineFrame) -> Result<WignerGrid> {
    let (alpha, _) = solve_phases(frame)?;
    let (phi, _) = mapped_position_samples(wf, frame)?;
    let g = *wf.grid();
    let dims = g.n_dims();
    let hbar = g.hbar();
    // α on every grid point, so the pair phase is a difference of two lookups
    let mut j = [0usize; MAX_DIMS];
    let mut x = [0.0; MAX_DIMS];
    let alpha_at: Vec<f64> = (0..g.len())
        .map(|flat| {
            g.unravel(flat, &mut j[..dims]);
            positions(&g, &j[..dims], &mut x[..dims]);
            alpha.eval(&x[..dims])
        })
        .collect();
    let values = anti_diagonal_transform(&g, wigner_prefactor(&g), |j, m| {
        match (offset_index(&g, j, m, 1), offset_index(&g, j, m, -1)) {
            (Some(plus), Some(minus)) => {
                let phase = -(alpha_at[minus] - alpha_at[plus]) / hbar;
                phi[plus].conj() * phi[minus] * C64::from_polar(1.0, phase)
            }
            _ => C64::new(0.0, 0.0),
        }
    });
    finish(&g, values, frame.t)
}

/// `W′(x, p)` from momentum amplitudes:
/// `Σ_u ψ̃*(P(p + u/2)) ψ̃(P(p − u/2)) e^{(i/ħ)[β(p + u/2) − β(p − u/2) − x·u]}`.
///
/// `p ± u/2` runs over a momentum grid twice as fine as the conjugate axis,
/// where `ψ̃` is evaluated exactly from the position samples.
pub fn transform_wigner_momentum_route(wf: &WaveFunction, frame: &AffineFrame) -> Result<WignerGrid> {
    let (_, beta) = solve_phases(frame)?;
    let g = *wf.grid();
    frame.check_grid(&g)?;
    let dims = g.n_dims();
    let n = g.points();
    let half = n as isize / 2;
    let hbar = g.hbar();
    let dp = g.dp_wig();
    let wide = 2 * n;
    let fine = |r: usize| (r as isize - n as isize) as f64 * dp;

    let targets: Vec<Vec<f64>> =
        (0..dims).map(|axis| (0..wide).map(|r| frame.p_map(axis, fine(r))).collect()).collect();
    let jac = frame.d.iter().product::<f64>().abs().sqrt();
    let mut chi = momentum_amplitudes(wf, &targets);
    chi.iter_mut().for_each(|v| *v *= jac);
    let fine_shape = vec![wide; dims];
    let fine_cell = dp.powi(dims as i32);
    check_edge(
        "mapped momentum amplitudes",
        edge_mass(&fine_shape, chi.iter().map(|v| v.norm_sqr() * fine_cell)),
    )?;

    let mut r = [0usize; MAX_DIMS];
    let mut q = [0.0; MAX_DIMS];
    let beta_at: Vec<f64> = (0..chi.len())
        .map(|flat| {
            let mut rest = flat;
            for i in (0..dims).rev() {
                r[i] = rest % wide;
                rest /= wide;
            }
            for i in 0..dims {
                q[i] = fine(r[i]);
            }
            beta.eval(&q[..dims])
        })
        .collect();
    let fine_index = |k: &[isize], m: &[isize], sign: isize| {
        k.iter().zip(m).fold(0usize, |acc, (&k, &m)| acc * wide + (k + sign * m + n as isize) as usize)
    };

    let pref = (2.0 * dp).powi(dims as i32) / g.phase_volume();
    let dft = Dft::new(n);
    let len = g.len();
    // one row per output momentum, holding every position
    let mut by_momentum = vec![C64::new(0.0, 0.0); len * len];
    by_momentum.par_chunks_mut(len).enumerate().for_each(|(kf, row)| {
        let (mut kk, mut mm) = ([0usize; MAX_DIMS], [0usize; MAX_DIMS]);
        let (mut k, mut m) = ([0isize; MAX_DIMS], [0isize; MAX_DIMS]);
        g.unravel(kf, &mut kk[..dims]);
        for i in 0..dims {
            k[i] = kk[i] as isize - half;
        }
        for (mf, v) in row.iter_mut().enumerate() {
            g.unravel(mf, &mut mm[..dims]);
            let mut shift = 0.0;
            for i in 0..dims {
                m[i] = mm[i] as isize - half;
                shift += g.x_min() * 2.0 * m[i] as f64 * dp;
            }
            let plus = fine_index(&k[..dims], &m[..dims], 1);
            let minus = fine_index(&k[..dims], &m[..dims], -1);
            let phase = (beta_at[plus] - beta_at[minus] - shift) / hbar;
            *v = chi[plus].conj() * chi[minus] * C64::from_polar(1.0, phase);
        }
        dft.along_axes(row, dims, |_, lane| {
            dft.process(lane, Direction::Forward);
            crate::fft::alternate(lane);
        });
        row.iter_mut().for_each(|v| *v *= pref);
    });

    // transpose in place of a second complex buffer: realness is checked here
    let imag = by_momentum.iter().fold(0.0f64, |acc, v| acc.max(v.im.abs()));
    if imag >= crate::wigner::REALNESS_TOL {
        return Err(Error::Numerical(format!("Wigner transform has imaginary residue {imag:.3e}")));
    }
    let mut values = vec![0.0; len * len];
    values.par_chunks_mut(len).enumerate().for_each(|(jf, row)| {
        for (kf, v) in row.iter_mut().enumerate() {
            *v = by_momentum[kf * len + jf].re;
        }
    });
    drop(by_momentum);
    WignerGrid::new(g, values, frame.t)
}

/// `W′(x, p) = W(X(x), P(p))` by separable resampling of `W`.
///
/// The substitution has unit Jacobian, so no density factor appears. Exact
/// copies are used when the map is a whole-sample shift.
pub fn transform_wigner_closed_form(w: &WignerGrid, frame: &AffineFrame) -> Result<WignerGrid> {
    let g = *w.grid();
    frame.check_grid(&g)?;
    solve_phases(frame)?;
    let dims = g.n_dims();
    let n = g.points();
    let half = n as isize / 2;
    let dp = g.dp_wig();
    let p_min = g.p_min(MomentumKind::Wigner);

    let mut shape = g.phase_shape();
    let mut buf = w.as_slice().to_vec();
    for axis in 0..2 * dims {
        let targets: Vec<f64> = if axis < dims {
            (0..n).map(|j| (frame.x_map(axis, g.position(j)) - g.x_min()) / g.dx()).collect()
        } else {
            let a = axis - dims;
            (0..n)
                .map(|k| (frame.p_map(a, g.momentum(k as isize - half, MomentumKind::Wigner)) - p_min) / dp)
                .collect()
        };
        let r = Resampler::new(n, &targets);
        buf = map_axis(&buf, &mut shape, axis, n, |lane, out| r.apply_real(lane, out));
    }

    let cell = g.cell_x() * g.cell_p(MomentumKind::Wigner);
    check_edge("mapped Wigner function", edge_mass(&shape, buf.iter().map(|v| v.abs() * cell)))?;
    let total = buf.iter().sum::<f64>() * cell;
    if (total - 1.0).abs() > crate::wigner::NORM_TOL {
        return Err(Error::Boundary(format!("mapped Wigner function integrates to {total}")));
    }
    WignerGrid::new(g, buf, frame.t)
}
