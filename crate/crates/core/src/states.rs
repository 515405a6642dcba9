//! Normalized test wavefunctions and their momentum representation.

use std::f64::consts::PI;

use ndarray::{ArrayD, IxDyn};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fft::{alternate, Dft, Direction};
use crate::grid::{MomentumKind, PhaseGrid};
use crate::resample::map_axis;

/// Highest oscillator level the Hermite recurrence is trusted for.
pub const MAX_HO_LEVEL: usize = 64;

/// Relative amplitude allowed on the outermost grid layer.
const EDGE_DECAY: f64 = 1e-8;

/// `ψ(x)` sampled on every point of a position grid, unit L² norm.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    grid: PhaseGrid,
    samples: ArrayD<C64>,
}

/// `ψ̃(p)` sampled on the FFT-conjugate momentum axes.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumWaveFunction {
    grid: PhaseGrid,
    samples: ArrayD<C64>,
}

impl WaveFunction {
    /// Normalize raw samples (row-major over `[N; n]`) and check that they
    /// decay at the window edges.
    pub fn from_samples(grid: PhaseGrid, samples: Vec<C64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::Config(format!(
                "expected {} samples, got {}",
                grid.len(),
                samples.len()
            )));
        }
        if samples.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Numerical("non-finite wavefunction sample".into()));
        }
        let mut wf = Self::from_parts(grid, samples);
        let norm = wf.norm_sq();
        if norm < 1e-24 {
            return Err(Error::DegenerateState);
        }
        wf.scale(1.0 / norm.sqrt());
        wf.check_edges()?;
        Ok(wf)
    }

    pub(crate) fn from_parts(grid: PhaseGrid, samples: Vec<C64>) -> Self {
        let samples = ArrayD::from_shape_vec(IxDyn(&grid.shape()), samples)
            .expect("sample count matches grid");
        Self { grid, samples }
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn samples(&self) -> &ArrayD<C64> {
        &self.samples
    }

    /// Flat row-major view of the samples.
    pub fn as_slice(&self) -> &[C64] {
        self.samples.as_slice().expect("standard layout")
    }

    /// `Σ|ψ_j|² dx^n`
    pub fn norm_sq(&self) -> f64 {
        self.samples.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.cell_x()
    }

    pub(crate) fn scale(&mut self, s: f64) {
        self.samples.mapv_inplace(|v| v * s);
    }

    /// `⟨self|other⟩ = Σ ψ*_j φ_j dx^n`
    pub fn inner(&self, other: &WaveFunction) -> Result<C64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let s: C64 = self.samples.iter().zip(other.samples.iter()).map(|(a, b)| a.conj() * b).sum();
        Ok(s * self.grid.cell_x())
    }

    /// Largest `|ψ|` on the outermost layer over largest `|ψ|` overall.
    pub fn edge_ratio(&self) -> f64 {
        let n = self.grid.points();
        let mut idx = [0usize; 2];
        let dims = self.grid.n_dims();
        let (mut edge, mut peak) = (0.0f64, 0.0f64);
        for (flat, v) in self.as_slice().iter().enumerate() {
            self.grid.unravel(flat, &mut idx[..dims]);
            let a = v.norm();
            peak = peak.max(a);
            if idx[..dims].iter().any(|&i| i == 0 || i == n - 1) {
                edge = edge.max(a);
            }
        }
        if peak == 0.0 {
            return 0.0;
        }
        edge / peak
    }

    fn check_edges(&self) -> Result<()> {
        let ratio = self.edge_ratio();
        if ratio >= EDGE_DECAY {
            return Err(Error::Boundary(format!(
                "edge amplitude is {ratio:.3e} of the peak (limit {EDGE_DECAY:e})"
            )));
        }
        Ok(())
    }
}

impl MomentumWaveFunction {
    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn samples(&self) -> &ArrayD<C64> {
        &self.samples
    }

    pub fn as_slice(&self) -> &[C64] {
        self.samples.as_slice().expect("standard layout")
    }

    /// `Σ|ψ̃_k|² dp_conj^n`
    pub fn norm_sq(&self) -> f64 {
        self.samples.iter().map(|v| v.norm_sqr()).sum::<f64>()
            * self.grid.cell_p(MomentumKind::Conjugate)
    }

    /// Inverse of [`to_momentum`]: `ψ(x_j) = (2πħ)^{−n/2} Σ_k ψ̃(p_k) e^{ip·x_j/ħ} dp^n`.
    pub fn to_position(&self) -> WaveFunction {
        let g = self.grid;
        let n = g.points();
        let dp = g.dp_conj();
        let pref = dp / (2.0 * PI * g.hbar()).sqrt();
        let ramp: Vec<C64> = (0..n)
            .map(|kp| {
                let p = g.momentum(kp as isize - n as isize / 2, MomentumKind::Conjugate);
                C64::from_polar(pref, p * g.x_min() / g.hbar())
            })
            .collect();
        let dft = Dft::new(n);
        let mut buf = self.as_slice().to_vec();
        dft.along_axes(&mut buf, g.n_dims(), |_, lane| {
            // ψ_j = pref Σ_k' ψ̃_k' e^{ip_k x_min/ħ} e^{2πi(k'−N/2)j/N}
            lane.iter_mut().zip(&ramp).for_each(|(v, r)| *v *= r);
            dft.process(lane, Direction::Inverse);
            alternate(lane);
        });
        WaveFunction::from_parts(g, buf)
    }
}

/// Gaussian packet `∝ exp(−(x−x0)²/(4σ²)) exp(i p0·x/ħ)`, one factor per axis.
pub fn gaussian_packet(grid: &PhaseGrid, x0: &[f64], p0: &[f64], sigma: &[f64]) -> Result<WaveFunction> {
    let dims = grid.n_dims();
    for (name, v) in [("x0", x0), ("p0", p0), ("sigma", sigma)] {
        if v.len() != dims {
            return Err(Error::Config(format!("{name} needs {dims} components, got {}", v.len())));
        }
    }
    for axis in 0..dims {
        let s = sigma[axis];
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::Config(format!("sigma must be positive, got {s}")));
        }
        let (lo, hi) = (x0[axis] - 6.0 * s, x0[axis] + 6.0 * s);
        if lo < grid.x_min() || hi > grid.x_max() {
            return Err(Error::Boundary(format!(
                "packet x0={} ± 6σ leaves [{}, {}] on axis {axis}",
                x0[axis],
                grid.x_min(),
                grid.x_max()
            )));
        }
    }
    let hbar = grid.hbar();
    let factors: Vec<Vec<C64>> = (0..dims)
        .map(|axis| {
            (0..grid.points())
                .map(|j| {
                    let x = grid.position(j);
                    let d = x - x0[axis];
                    C64::from_polar(
                        (-d * d / (4.0 * sigma[axis] * sigma[axis])).exp(),
                        p0[axis] * x / hbar,
                    )
                })
                .collect()
        })
        .collect();
    WaveFunction::from_samples(*grid, outer_product(grid, &factors))
}

/// Normalized Hermite functions `h_0(u) ..= h_level(u)` by the three-term
/// recurrence.
pub fn hermite_functions(u: f64, level: usize) -> Vec<f64> {
    let mut h = Vec::with_capacity(level + 1);
    h.push(PI.powf(-0.25) * (-0.5 * u * u).exp());
    if level >= 1 {
        h.push(2f64.sqrt() * u * h[0]);
    }
    for k in 1..level {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * u * h[k] - (kf / (kf + 1.0)).sqrt() * h[k - 1];
        h.push(next);
    }
    h
}

/// Harmonic-oscillator eigenstate with the same `level` on every axis.
pub fn ho_eigenstate(grid: &PhaseGrid, level: usize, mass: f64, omega: f64) -> Result<WaveFunction> {
    ho_product_state(grid, &vec![level; grid.n_dims()], mass, omega)
}

/// Product of oscillator eigenfunctions, `levels[i]` on axis `i`.
pub fn ho_product_state(grid: &PhaseGrid, levels: &[usize], mass: f64, omega: f64) -> Result<WaveFunction> {
    if levels.len() != grid.n_dims() {
        return Err(Error::Config(format!(
            "levels needs {} components, got {}",
            grid.n_dims(),
            levels.len()
        )));
    }
    if let Some(&bad) = levels.iter().find(|&&l| l > MAX_HO_LEVEL) {
        return Err(Error::UnsupportedLevel(bad));
    }
    if !(mass > 0.0 && omega > 0.0) {
        return Err(Error::Config(format!("mass and omega must be positive, got {mass}, {omega}")));
    }
    let k = (mass * omega / grid.hbar()).sqrt();
    let factors: Vec<Vec<C64>> = levels
        .iter()
        .map(|&level| {
            (0..grid.points())
                .map(|j| {
                    let u = grid.position(j) * k;
                    C64::new(k.sqrt() * hermite_functions(u, level)[level], 0.0)
                })
                .collect()
        })
        .collect();
    WaveFunction::from_samples(*grid, outer_product(grid, &factors))
}

/// Weighted sum of states on one grid, renormalized.
pub fn superpose(parts: &[(C64, &WaveFunction)]) -> Result<WaveFunction> {
    let Some((_, first)) = parts.first() else {
        return Err(Error::DegenerateState);
    };
    let grid = first.grid;
    if parts.iter().any(|(_, wf)| wf.grid != grid) {
        return Err(Error::GridMismatch);
    }
    let mut acc = vec![C64::new(0.0, 0.0); grid.len()];
    for (c, wf) in parts {
        for (a, v) in acc.iter_mut().zip(wf.as_slice()) {
            *a += c * v;
        }
    }
    let norm = acc.iter().map(|v| v.norm_sqr()).sum::<f64>() * grid.cell_x();
    if norm <= 1e-12 {
        return Err(Error::DegenerateState);
    }
    WaveFunction::from_samples(grid, acc)
}

/// `ψ̃(p) = (2πħ)^{−n/2} Σ_j ψ(x_j) e^{−ip·x_j/ħ} dx^n` on the conjugate axes.
pub fn to_momentum(wf: &WaveFunction) -> MomentumWaveFunction {
    let g = wf.grid;
    let n = g.points();
    let pref = g.dx() / (2.0 * PI * g.hbar()).sqrt();
    let ramp: Vec<C64> = (0..n)
        .map(|kp| {
            let p = g.momentum(kp as isize - n as isize / 2, MomentumKind::Conjugate);
            C64::from_polar(pref, -p * g.x_min() / g.hbar())
        })
        .collect();
    let dft = Dft::new(n);
    let mut buf = wf.as_slice().to_vec();
    dft.along_axes(&mut buf, g.n_dims(), |_, lane| {
        alternate(lane);
        dft.process(lane, Direction::Forward);
        lane.iter_mut().zip(&ramp).for_each(|(v, r)| *v *= r);
    });
    MomentumWaveFunction {
        grid: g,
        samples: ArrayD::from_shape_vec(IxDyn(&g.shape()), buf).expect("shape"),
    }
}

/// Exact evaluation of `ψ̃` at arbitrary momenta: `targets[i]` lists the
/// momenta on axis `i`, the result is row-major over their product.
///
/// `ψ̃` of a finite sample set is a trigonometric polynomial in `p`, so this is
/// the band-limited interpolant of the conjugate-axis samples.
pub fn momentum_amplitudes(wf: &WaveFunction, targets: &[Vec<f64>]) -> Vec<C64> {
    let g = wf.grid;
    let n = g.points();
    let pref = g.dx() / (2.0 * PI * g.hbar()).sqrt();
    let xs: Vec<f64> = (0..n).map(|j| g.position(j)).collect();
    let mut shape = g.shape();
    let mut buf = wf.as_slice().to_vec();
    for (axis, ps) in targets.iter().enumerate() {
        let matrix: Vec<C64> = ps
            .iter()
            .flat_map(|&p| xs.iter().map(move |&x| C64::from_polar(pref, -p * x / g.hbar())))
            .collect();
        buf = map_axis(&buf, &mut shape, axis, ps.len(), |lane, out| {
            for (o, row) in out.iter_mut().zip(matrix.chunks(n)) {
                *o = row.iter().zip(lane).map(|(e, v)| e * v).sum();
            }
        });
    }
    buf
}

fn outer_product(grid: &PhaseGrid, factors: &[Vec<C64>]) -> Vec<C64> {
    let dims = grid.n_dims();
    let mut idx = [0usize; 2];
    (0..grid.len())
        .map(|flat| {
            grid.unravel(flat, &mut idx[..dims]);
            idx[..dims].iter().zip(factors).map(|(&i, f)| f[i]).product()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> PhaseGrid {
        PhaseGrid::new(1, 256, -10.0, 10.0, 1.0).unwrap()
    }

    fn at(wf: &WaveFunction, x: f64) -> C64 {
        wf.as_slice()[wf.grid().index_of(x).unwrap()]
    }

    #[test]
    fn gaussian_peak_value() {
        let s = 0.5f64.sqrt();
        let wf = gaussian_packet(&grid(), &[0.0], &[0.0], &[s]).unwrap();
        let v = at(&wf, 0.0);
        assert!((v.re - PI.powf(-0.25)).abs() < 1e-10);
        assert_eq!(v.im, 0.0);
        assert!((wf.norm_sq() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_translation_is_index_shift() {
        let g = PhaseGrid::new(1, 256, -16.0, 16.0, 1.0).unwrap();
        let a = gaussian_packet(&g, &[0.0], &[0.0], &[1.0]).unwrap();
        let b = gaussian_packet(&g, &[2.0], &[0.0], &[1.0]).unwrap();
        let shift = (2.0 / g.dx()) as usize;
        for j in 0..256 - shift {
            assert!((b.as_slice()[j + shift] - a.as_slice()[j]).norm() < 1e-12);
        }
    }

    #[test]
    fn gaussian_leaking_window_is_rejected() {
        let r = gaussian_packet(&grid(), &[9.9], &[0.0], &[1.0]);
        assert!(matches!(r, Err(Error::Boundary(_))));
        let r = gaussian_packet(&grid(), &[0.0], &[0.0], &[-1.0]);
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn ground_state_is_gaussian() {
        let g = grid();
        let ho = ho_eigenstate(&g, 0, 1.0, 1.0).unwrap();
        let gs = gaussian_packet(&g, &[0.0], &[0.0], &[0.5f64.sqrt()]).unwrap();
        for (a, b) in ho.as_slice().iter().zip(gs.as_slice()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn first_excited_state_is_odd() {
        let g = grid();
        let wf = ho_eigenstate(&g, 1, 1.0, 1.0).unwrap();
        let s = wf.as_slice();
        // x_j = −x_{256−j} for j in 1..256
        for j in 1..256 {
            assert_eq!(s[j], -s[256 - j]);
        }
    }

    #[test]
    fn second_level_at_origin() {
        let wf = ho_eigenstate(&grid(), 2, 1.0, 1.0).unwrap();
        let expected = -(0.5f64.sqrt()) * PI.powf(-0.25);
        assert!((at(&wf, 0.0).re - expected).abs() < 1e-10);
        // independent check: closed form ψ₂ = π^{−1/4}(2x²−1)e^{−x²/2}/√2
        // normalized by trapezoid quadrature on a fine grid
        let f = |x: f64| (2.0 * x * x - 1.0) * (-0.5 * x * x).exp();
        let h = 1e-3;
        let norm: f64 = (-12000..=12000).map(|i| f(i as f64 * h).powi(2) * h).sum();
        assert!((f(0.0) / norm.sqrt() - expected).abs() < 1e-10);
    }

    #[test]
    fn levels_are_orthonormal() {
        let g = grid();
        let states: Vec<_> = (0..=10).map(|l| ho_eigenstate(&g, l, 1.0, 1.0).unwrap()).collect();
        for (i, a) in states.iter().enumerate() {
            for (j, b) in states.iter().enumerate() {
                let ip = a.inner(b).unwrap();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((ip - expect).norm() < 1e-8, "<{i}|{j}> = {ip}");
            }
        }
    }

    #[test]
    fn level_limits() {
        let g = grid();
        assert!(matches!(ho_eigenstate(&g, 65, 1.0, 1.0), Err(Error::UnsupportedLevel(65))));
        // level 60 reaches past x = 10 at m = ω = 1
        assert!(matches!(ho_eigenstate(&g, 60, 1.0, 1.0), Err(Error::Boundary(_))));
        assert!(matches!(ho_eigenstate(&g, 1, -1.0, 1.0), Err(Error::Config(_))));
    }

    #[test]
    fn superpose_cases() {
        let g = grid();
        let psi = gaussian_packet(&g, &[0.5], &[1.0], &[0.8]).unwrap();
        let one = C64::new(1.0, 0.0);
        let same = superpose(&[(one, &psi)]).unwrap();
        for (a, b) in same.as_slice().iter().zip(psi.as_slice()) {
            assert!((a - b).norm() < 1e-14);
        }
        let s = 0.5f64.sqrt();
        let left = gaussian_packet(&g, &[-3.0], &[0.0], &[s]).unwrap();
        let right = gaussian_packet(&g, &[3.0], &[0.0], &[s]).unwrap();
        let cat = superpose(&[(one, &left), (one, &right)]).unwrap();
        let c = cat.as_slice();
        for j in 1..256 {
            assert!((c[j] - c[256 - j]).norm() < 1e-14);
        }
        assert!(matches!(superpose(&[(one, &psi), (-one, &psi)]), Err(Error::DegenerateState)));
        let other = PhaseGrid::new(1, 128, -10.0, 10.0, 1.0).unwrap();
        let foreign = gaussian_packet(&other, &[0.0], &[0.0], &[1.0]).unwrap();
        assert!(matches!(superpose(&[(one, &psi), (one, &foreign)]), Err(Error::GridMismatch)));
    }

    #[test]
    fn gaussian_momentum_density() {
        let g = grid();
        let s = 0.8;
        let wf = gaussian_packet(&g, &[0.0], &[0.0], &[s]).unwrap();
        let m = to_momentum(&wf);
        let ps = g.momentum_axis(0, MomentumKind::Conjugate).unwrap();
        for (p, v) in ps.iter().zip(m.as_slice()) {
            let expect = (2.0 * s * s / PI).sqrt() * (-2.0 * s * s * p * p).exp();
            assert!((v.norm_sqr() - expect).abs() < 1e-10);
        }
        // the analytic density also matches direct quadrature of the transform
        let x = |i: i32| i as f64 * 1e-3;
        let p = 0.9;
        let amp: C64 = (-10000..=10000)
            .map(|i| {
                let xv = x(i);
                C64::from_polar((-xv * xv / (4.0 * s * s)).exp() * 1e-3, -p * xv)
            })
            .sum::<C64>()
            / (2.0 * PI).sqrt()
            / (2.0 * PI * s * s).powf(0.25);
        let expect = (2.0 * s * s / PI).sqrt() * (-2.0 * s * s * p * p).exp();
        assert!((amp.norm_sqr() - expect).abs() < 1e-10);
    }

    #[test]
    fn boosted_gaussian_momentum_shifts() {
        let g = grid();
        let s = 0.8;
        let a = to_momentum(&gaussian_packet(&g, &[0.0], &[0.0], &[s]).unwrap());
        let b = to_momentum(&gaussian_packet(&g, &[0.0], &[3.0 * g.dp_conj()], &[s]).unwrap());
        for k in 0..250 {
            assert!((a.as_slice()[k].norm_sqr() - b.as_slice()[k + 3].norm_sqr()).abs() < 1e-12);
        }
        // peak sits at p = 3 for p0 = 3
        let c = to_momentum(&gaussian_packet(&g, &[0.0], &[3.0], &[s]).unwrap());
        let ps = momentum_amplitudes(&gaussian_packet(&g, &[0.0], &[3.0], &[s]).unwrap(), &[vec![2.9, 3.0, 3.1]]);
        assert!(ps[1].norm() > ps[0].norm() && ps[1].norm() > ps[2].norm());
        assert!((c.norm_sq() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn odd_state_has_no_zero_momentum() {
        let g = grid();
        let m = to_momentum(&ho_eigenstate(&g, 1, 1.0, 1.0).unwrap());
        assert!(m.as_slice()[128].norm() < 1e-12);
    }

    #[test]
    fn momentum_round_trip_and_parseval() {
        let g = grid();
        let wf = superpose(&[
            (C64::new(1.0, 0.0), &gaussian_packet(&g, &[-2.0], &[1.5], &[0.7]).unwrap()),
            (C64::new(0.3, 0.8), &ho_eigenstate(&g, 3, 1.0, 1.0).unwrap()),
        ])
        .unwrap();
        let m = to_momentum(&wf);
        assert!((m.norm_sq() - wf.norm_sq()).abs() < 1e-10);
        let back = m.to_position();
        let err = back
            .as_slice()
            .iter()
            .zip(wf.as_slice())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12, "round trip error {err}");
    }

    #[test]
    fn amplitudes_agree_with_fft_on_conjugate_axis() {
        let g = PhaseGrid::new(2, 16, -8.0, 8.0, 1.0).unwrap();
        let wf = gaussian_packet(&g, &[0.5, -1.0], &[1.0, 0.5], &[0.6, 0.5]).unwrap();
        let fft = to_momentum(&wf);
        let axis = g.momentum_axis(0, MomentumKind::Conjugate).unwrap();
        let direct = momentum_amplitudes(&wf, &[axis.clone(), axis]);
        for (a, b) in fft.as_slice().iter().zip(&direct) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
