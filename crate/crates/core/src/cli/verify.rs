//! Built-in invariant suites run by `wigner-frames verify`.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::frames::{
    acceleration_frame, galilean_frame, phase_identity_residual, solve_phases,
    transform_wigner_closed_form, transform_wigner_momentum_route, transform_wigner_position_route,
    translation_frame, AffineFrame, PhaseConvention,
};
use crate::grid::{MomentumKind, PhaseGrid};
use crate::states::{gaussian_packet, ho_eigenstate, momentum_amplitudes, superpose, WaveFunction};
use crate::weyl::{hs_identity_check, weyl_kernel, wigner_transform_operator, Symbol};
use crate::wigner::{marginal_momentum, marginal_position, wigner_from_state};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Marginals,
    Hs,
    Routes,
    Phases,
    All,
}

/// One measured error against its tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub err: f64,
    pub tol: f64,
    /// Set when the computation itself failed.
    pub note: Option<String>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.note.is_none() && self.err <= self.tol
    }

    pub fn line(&self) -> String {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let mut s = format!("check={} err={:.3e} tol={:.1e} status={status}", self.name, self.err, self.tol);
        if let Some(n) = &self.note {
            s.push_str(&format!(" error=\"{n}\""));
        }
        s
    }
}

fn check(name: String, tol: f64, f: impl FnOnce() -> Result<f64>) -> Check {
    match f() {
        Ok(err) => Check { name, err, tol, note: None },
        Err(e) => Check { name, err: f64::INFINITY, tol, note: Some(e.to_string()) },
    }
}

/// 1-D, 256 points on `[−10, 10)`, `ħ = 1`.
pub fn reference_grid() -> PhaseGrid {
    PhaseGrid::new(1, 256, -10.0, 10.0, 1.0).expect("reference grid")
}

/// Even cat state `∝ |x0⟩ + |−x0⟩` of Gaussians with width `sigma`.
pub fn cat_state(g: &PhaseGrid, x0: f64, sigma: f64) -> Result<WaveFunction> {
    let right = gaussian_packet(g, &[x0], &[0.0], &[sigma])?;
    let left = gaussian_packet(g, &[-x0], &[0.0], &[sigma])?;
    superpose(&[(C64::new(1.0, 0.0), &right), (C64::new(1.0, 0.0), &left)])
}

/// Two Gaussians, oscillator levels 0–2 and a cat state.
pub fn state_corpus(g: &PhaseGrid) -> Result<Vec<(&'static str, WaveFunction)>> {
    Ok(vec![
        ("gaussian", gaussian_packet(g, &[0.0], &[0.0], &[FRAC_1_SQRT_2])?),
        ("boosted-gaussian", gaussian_packet(g, &[1.5], &[2.0], &[0.8])?),
        ("ho0", ho_eigenstate(g, 0, 1.0, 1.0)?),
        ("ho1", ho_eigenstate(g, 1, 1.0, 1.0)?),
        ("ho2", ho_eigenstate(g, 2, 1.0, 1.0)?),
        ("cat", cat_state(g, 3.0, FRAC_1_SQRT_2)?),
    ])
}

/// Translation by √2, a Galilean boost and a uniformly accelerated frame.
pub fn frame_corpus(g: &PhaseGrid) -> Result<Vec<(&'static str, AffineFrame)>> {
    Ok(vec![
        ("translation", translation_frame(g, &[SQRT_2])?),
        ("galilean", galilean_frame(g, &[1.5], 1.0, 0.8)?),
        ("acceleration", acceleration_frame(g, &[1.2], 1.0, 1.1)?),
    ])
}

/// Decaying symbols for the Hilbert–Schmidt and round-trip checks.
pub fn symbol_corpus(g: &PhaseGrid) -> Result<Vec<(&'static str, Symbol)>> {
    Ok(vec![
        ("gaussian", Symbol::from_real_fn(g, |x, p| (-x[0] * x[0] - p[0] * p[0]).exp())?),
        ("x-gaussian", Symbol::from_real_fn(g, |x, p| x[0] * (-x[0] * x[0] - p[0] * p[0]).exp())?),
        (
            "mixed",
            Symbol::from_real_fn(g, |x, p| {
                (x[0] * x[0] + p[0] + x[0] * p[0]) * (-(x[0] * x[0] + p[0] * p[0]) / 2.0).exp()
            })?,
        ),
        (
            "oscillating",
            Symbol::from_real_fn(g, |x, p| (2.0 * x[0]).cos() * (-x[0] * x[0] / 2.0 - p[0] * p[0] / 3.0).exp())?,
        ),
    ])
}

fn max_abs(a: impl Iterator<Item = f64>) -> f64 {
    a.fold(0.0, f64::max)
}

fn marginal_checks(out: &mut Vec<Check>) -> Result<()> {
    let g = reference_grid();
    let ps = g.momentum_axis(0, MomentumKind::Wigner)?;
    for (name, wf) in state_corpus(&g)? {
        let w = match wigner_from_state(&wf) {
            Ok(w) => w,
            Err(e) => {
                out.push(check(format!("marginals/{name}"), 1e-6, || Err(e)));
                continue;
            }
        };
        out.push(check(format!("marginals/{name}/norm"), 1e-6, || Ok((w.total() - 1.0).abs())));
        out.push(check(format!("marginals/{name}/position"), 1e-6, || {
            let m = marginal_position(&w);
            Ok(max_abs(m.iter().zip(wf.as_slice()).map(|(m, v)| (m - v.norm_sqr()).abs())))
        }));
        out.push(check(format!("marginals/{name}/momentum"), 1e-6, || {
            let m = marginal_momentum(&w);
            let amps = momentum_amplitudes(&wf, std::slice::from_ref(&ps));
            Ok(max_abs(m.iter().zip(&amps).map(|(m, a)| (m - a.norm_sqr()).abs())))
        }));
    }
    Ok(())
}

fn hs_checks(out: &mut Vec<Check>) -> Result<()> {
    let g = PhaseGrid::new(1, 128, -12.0, 12.0, 1.0)?;
    let n = g.points();
    for (name, f) in symbol_corpus(&g)? {
        out.push(check(format!("hs/{name}/identity"), 1e-6, || Ok(hs_identity_check(&f)?.rel_err)));
        out.push(check(format!("hs/{name}/round-trip"), 1e-6, || {
            let back = wigner_transform_operator(&weyl_kernel(&f));
            // interior: positions at least a quarter window from either edge
            let mut err = 0.0f64;
            for j in n / 4..3 * n / 4 {
                for k in 0..n {
                    err = err.max((back.as_slice()[j * n + k] - f.as_slice()[j * n + k]).norm());
                }
            }
            Ok(err)
        }));
    }
    Ok(())
}

fn route_checks(out: &mut Vec<Check>) -> Result<()> {
    let g = reference_grid();
    let states: Vec<_> = state_corpus(&g)?
        .into_iter()
        .filter(|(n, _)| matches!(*n, "gaussian" | "ho1" | "ho2" | "cat"))
        .collect();
    for (fname, frame) in frame_corpus(&g)? {
        for (sname, wf) in &states {
            let prefix = format!("routes/{sname}/{fname}");
            let routes = (|| {
                let pos = transform_wigner_position_route(wf, &frame)?;
                let mom = transform_wigner_momentum_route(wf, &frame)?;
                let closed = transform_wigner_closed_form(&wigner_from_state(wf)?, &frame)?;
                Ok((pos, mom, closed))
            })();
            match routes {
                Ok((pos, mom, closed)) => {
                    out.push(check(format!("{prefix}/pos-mom"), 1e-6, || pos.max_abs_diff(&mom)));
                    out.push(check(format!("{prefix}/pos-closed"), 1e-6, || pos.max_abs_diff(&closed)));
                    out.push(check(format!("{prefix}/mom-closed"), 1e-6, || mom.max_abs_diff(&closed)));
                }
                Err(e) => out.push(check(prefix, 1e-6, || Err(e))),
            }
        }
    }
    Ok(())
}

/// Largest scaled residual of `p·x = β − α + P·X` over `count` random points.
pub fn phase_identity_error(frame: &AffineFrame, count: usize, seed: u64) -> Result<f64> {
    let (alpha, beta) = solve_phases(frame)?;
    let dims = frame.n_dims();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..count {
        let x: Vec<f64> = (0..dims).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let p: Vec<f64> = (0..dims).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let (err, scale) = phase_identity_residual(frame, &alpha, &beta, &x, &p);
        worst = worst.max(err / scale);
    }
    Ok(worst)
}

/// Five affine frames with random scales and shifts.
pub fn random_affine_frames(seed: u64) -> Result<Vec<AffineFrame>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..5)
        .map(|_| {
            let c: f64 = rng.gen_range(0.5..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            AffineFrame::new(
                vec![c],
                vec![rng.gen_range(-3.0..3.0)],
                vec![1.0 / c],
                vec![rng.gen_range(-3.0..3.0)],
                rng.gen_range(0.0..2.0),
            )
        })
        .collect()
}

fn phase_checks(out: &mut Vec<Check>) -> Result<()> {
    let g = reference_grid();
    let mut frames = frame_corpus(&g)?;
    for (i, f) in random_affine_frames(7)?.into_iter().enumerate() {
        frames.push((["affine-0", "affine-1", "affine-2", "affine-3", "affine-4"][i], f));
    }
    for (name, f) in &frames {
        out.push(check(format!("phases/{name}/identity"), 1e-10, || phase_identity_error(f, 100, 11)));
    }

    // linear coefficients of the worked examples
    let exact = 1e-15;
    let (al, be) = solve_phases(&translation_frame(&g, &[2.5])?)?;
    out.push(check("phases/translation/alpha".into(), exact, || Ok(al.linear[0].abs() + al.constant.abs())));
    out.push(check("phases/translation/beta".into(), exact, || Ok((be.linear[0] - 2.5).abs())));
    let (v, m, t) = (1.5, 2.0, 0.8);
    let (al, be) = solve_phases(&galilean_frame(&g, &[v], m, t)?)?;
    out.push(check("phases/galilean/alpha".into(), exact, || Ok((al.linear[0] + m * v).abs())));
    out.push(check("phases/galilean/beta".into(), exact, || Ok((be.linear[0] - v * t).abs())));
    let (a, m, t) = (1.2, 1.0, 1.1);
    let frame = acceleration_frame(&g, &[a], m, t)?.with_convention(PhaseConvention { xi: 0.0, split: 1.0 / 3.0 });
    let (al, be) = solve_phases(&frame)?;
    let mat3 = m * a * a * t.powi(3);
    out.push(check("phases/acceleration/alpha".into(), exact, || Ok((al.linear[0] + m * a * t).abs())));
    out.push(check("phases/acceleration/beta".into(), exact, || Ok((be.linear[0] - a * t * t / 2.0).abs())));
    out.push(check("phases/acceleration/constants".into(), 1e-14, || {
        Ok((al.constant - mat3 / 6.0).abs().max((be.constant + mat3 / 3.0).abs()))
    }));
    Ok(())
}

pub fn run_suite(suite: Suite) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    if matches!(suite, Suite::Marginals | Suite::All) {
        marginal_checks(&mut out)?;
    }
    if matches!(suite, Suite::Hs | Suite::All) {
        hs_checks(&mut out)?;
    }
    if matches!(suite, Suite::Routes | Suite::All) {
        route_checks(&mut out)?;
    }
    if matches!(suite, Suite::Phases | Suite::All) {
        phase_checks(&mut out)?;
    }
    Ok(out)
}
