//! Acceptance run: one PASS/FAIL line per criterion on the reference
//! configuration (1-D, 256 points on [−10, 10), ħ = 1).
//!
//! Oracles are computed here from closed forms or brute-force quadrature,
//! never through the library path under test.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wigner_frames::cli::verify::{frame_corpus, random_affine_frames, reference_grid, state_corpus, symbol_corpus};
use wigner_frames::frames::{
    acceleration_frame, galilean_frame, solve_phases, transform_wigner_closed_form,
    transform_wigner_momentum_route, transform_wigner_position_route, translation_frame,
};
use wigner_frames::states::ho_eigenstate;
use wigner_frames::weyl::{hs_identity_check, weyl_kernel, wigner_transform_operator};
use wigner_frames::wigner::{marginal_momentum, marginal_position, wigner_from_state};
use wigner_frames::{AffineFrame, MomentumKind, PhaseConvention, WaveFunction, WignerGrid};

const TIME_BUDGET: Duration = Duration::from_secs(5);

/// One measured quantity against its tolerance.
struct Sub {
    label: String,
    err: f64,
    tol: f64,
}

impl Sub {
    fn new(label: impl Into<String>, err: f64, tol: f64) -> Self {
        Self { label: label.into(), err, tol }
    }

    fn ok(&self) -> bool {
        self.err.is_finite() && self.err <= self.tol
    }
}

type Outcome = Result<Vec<Sub>, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn max_abs(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, f64::max)
}

fn diff(a: &WignerGrid, b: &WignerGrid) -> Result<f64, String> {
    a.max_abs_diff(b).map_err(|e| e.to_string())
}

/// Trapezoid rule on `[lo, hi]` with `n` intervals.
fn trapezoid(lo: f64, hi: f64, n: usize, f: impl Fn(f64) -> C64) -> C64 {
    let h = (hi - lo) / n as f64;
    let inner: C64 = (1..n).map(|i| f(lo + i as f64 * h)).sum();
    (inner + (f(lo) + f(hi)) * 0.5) * h
}

/// Normalized continuum Gaussian `(2πσ²)^{−1/4} exp(−(x−x0)²/4σ² + i p0 x)`.
fn gaussian(x: f64, x0: f64, p0: f64, sigma: f64) -> C64 {
    let d = x - x0;
    C64::from_polar((2.0 * PI * sigma * sigma).powf(-0.25) * (-d * d / (4.0 * sigma * sigma)).exp(), p0 * x)
}

fn ho1(x: f64) -> C64 {
    C64::new(PI.powf(-0.25) * SQRT_2 * x * (-x * x / 2.0).exp(), 0.0)
}

/// `W(x,p) = (1/π) ∫ ψ*(x+y) ψ(x−y) e^{2ipy} dy` by quadrature (ħ = 1).
fn wigner_quadrature(psi: impl Fn(f64) -> C64, x: f64, p: f64) -> f64 {
    let v = trapezoid(-14.0, 14.0, 28_000, |y| psi(x + y).conj() * psi(x - y) * C64::from_polar(1.0, 2.0 * p * y));
    v.re / PI
}

/// `(1/πħ) exp(−(x−x0)²/2σ² − 2σ²(p−p0)²/ħ²)`
fn gaussian_wigner(x: f64, p: f64, x0: f64, p0: f64, sigma: f64) -> f64 {
    let (dx, dp) = (x - x0, p - p0);
    (-(dx * dx) / (2.0 * sigma * sigma) - 2.0 * sigma * sigma * dp * dp).exp() / PI
}

fn corpus() -> Result<Vec<(&'static str, WaveFunction)>, String> {
    state_corpus(&reference_grid()).map_err(|e| e.to_string())
}

fn normalization() -> Outcome {
    let mut subs = Vec::new();
    for (name, wf) in corpus()? {
        let w = wigner_from_state(&wf).map_err(|e| e.to_string())?;
        subs.push(Sub::new(name, (w.total() - 1.0).abs(), 1e-6));
    }
    Ok(subs)
}

fn marginals() -> Outcome {
    let g = reference_grid();
    let dx = g.dx();
    let xs = g.position_axis(0).map_err(|e| e.to_string())?;
    let ps = g.momentum_axis(0, MomentumKind::Wigner).map_err(|e| e.to_string())?;
    let mut subs = Vec::new();
    for (name, wf) in corpus()? {
        let w = wigner_from_state(&wf).map_err(|e| e.to_string())?;
        let psi = wf.as_slice();
        let mx = marginal_position(&w);
        subs.push(Sub::new(
            format!("{name}/x"),
            max_abs(mx.iter().zip(psi).map(|(m, v)| (m - v.norm_sqr()).abs())),
            1e-6,
        ));
        // direct Fourier sum ψ̃(p) = (2π)^{−1/2} Σ ψ(x) e^{−ipx} dx
        let mp = marginal_momentum(&w);
        let err = max_abs(ps.iter().zip(&mp).map(|(&p, m)| {
            let amp: C64 = xs.iter().zip(psi).map(|(&x, v)| v * C64::from_polar(1.0, -p * x)).sum::<C64>() * dx
                / (2.0 * PI).sqrt();
            (m - amp.norm_sqr()).abs()
        }));
        subs.push(Sub::new(format!("{name}/p"), err, 1e-6));
    }
    Ok(subs)
}

fn gaussian_analytic() -> Outcome {
    let g = reference_grid();
    let n = g.points() as isize;
    let mut subs = Vec::new();
    for (name, wf) in corpus()? {
        let (x0, p0, sigma) = match name {
            "gaussian" => (0.0, 0.0, FRAC_1_SQRT_2),
            "boosted-gaussian" => (1.5, 2.0, 0.8),
            _ => continue,
        };
        let w = wigner_from_state(&wf).map_err(|e| e.to_string())?;
        let mut err = 0.0f64;
        for j in 0..g.points() {
            for k in -n / 2..n / 2 {
                let exact = gaussian_wigner(g.position(j), g.momentum(k, MomentumKind::Wigner), x0, p0, sigma);
                err = err.max((w.at(&[j], &[k]) - exact).abs());
            }
        }
        subs.push(Sub::new(format!("{name}/grid"), err, 1e-6));

        // brute-force quadrature of the defining integral at 10 grid points
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut err_grid = 0.0f64;
        let mut err_formula = 0.0f64;
        for _ in 0..10 {
            let j = rng.gen_range(80..176usize);
            let k = rng.gen_range(-20..40isize);
            let (x, p) = (g.position(j), g.momentum(k, MomentumKind::Wigner));
            let q = wigner_quadrature(|y| gaussian(y, x0, p0, sigma), x, p);
            err_grid = err_grid.max((w.at(&[j], &[k]) - q).abs());
            err_formula = err_formula.max((gaussian_wigner(x, p, x0, p0, sigma) - q).abs());
        }
        subs.push(Sub::new(format!("{name}/quadrature"), err_grid, 1e-6));
        subs.push(Sub::new(format!("{name}/formula-vs-quadrature"), err_formula, 1e-6));
    }
    Ok(subs)
}

fn ho1_origin() -> Outcome {
    let g = reference_grid();
    let wf = ho_eigenstate(&g, 1, 1.0, 1.0).map_err(|e| e.to_string())?;
    let w = wigner_from_state(&wf).map_err(|e| e.to_string())?;
    let j = g.index_of(0.0).ok_or("x = 0 is not a grid point")?;
    let value = w.at(&[j], &[0]);
    let q = wigner_quadrature(ho1, 0.0, 0.0);
    Ok(vec![
        Sub::new("closed-form", (value + 1.0 / PI).abs(), 1e-6),
        Sub::new("quadrature", (value - q).abs(), 1e-6),
        Sub::new("grid-min", (w.min() + 1.0 / PI).abs(), 1e-6),
    ])
}

fn hilbert_schmidt() -> Outcome {
    let g = reference_grid();
    let mut subs = Vec::new();
    for (name, f) in symbol_corpus(&g).map_err(|e| e.to_string())? {
        let hs = hs_identity_check(&f).map_err(|e| e.to_string())?;
        subs.push(Sub::new(name, hs.rel_err, 1e-6));

        // continuum kernels: K(x, x′) = (1/2π) ∫ f((x+x′)/2, p) e^{ip(x−x′)} dp
        let (norm, kernel): (f64, fn(f64, f64) -> f64) = match name {
            "gaussian" => (0.25, |m, d| (-m * m - d * d / 4.0).exp() / (2.0 * PI.sqrt())),
            "x-gaussian" => (1.0 / 16.0, |m, d| m * (-m * m - d * d / 4.0).exp() / (2.0 * PI.sqrt())),
            _ => continue,
        };
        subs.push(Sub::new(format!("{name}/norm"), (hs.lhs - norm).abs() / norm, 1e-6));
        let k = weyl_kernel(&f);
        let n = g.points();
        let mut err = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                let (xa, xb) = (g.position(a), g.position(b));
                err = err.max((k.get(a, b) - kernel((xa + xb) / 2.0, xa - xb)).norm());
            }
        }
        subs.push(Sub::new(format!("{name}/kernel"), err, 1e-6));
    }
    Ok(subs)
}

fn weyl_round_trip() -> Outcome {
    let g = reference_grid();
    let n = g.points();
    let mut subs = Vec::new();
    for (name, f) in symbol_corpus(&g).map_err(|e| e.to_string())? {
        let back = wigner_transform_operator(&weyl_kernel(&f));
        let err = max_abs(
            (n / 4..3 * n / 4)
                .flat_map(|j| (0..n).map(move |k| j * n + k))
                .map(|i| (back.as_slice()[i] - f.as_slice()[i]).norm()),
        );
        subs.push(Sub::new(name, err, 1e-6));
    }
    Ok(subs)
}

fn phase_identity() -> Outcome {
    let g = reference_grid();
    let mut frames: Vec<(String, AffineFrame)> =
        frame_corpus(&g).map_err(|e| e.to_string())?.into_iter().map(|(n, f)| (n.to_string(), f)).collect();
    for (i, f) in random_affine_frames(2024).map_err(|e| e.to_string())?.into_iter().enumerate() {
        frames.push((format!("affine-{i}"), f));
    }
    let mut subs = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for (name, frame) in &frames {
        let (alpha, beta) = solve_phases(frame).map_err(|e| e.to_string())?;
        let (c, a, d, b) = (frame.c()[0], frame.a()[0], frame.d()[0], frame.b()[0]);
        let mut err = 0.0f64;
        for _ in 0..100 {
            let x: f64 = rng.gen_range(-10.0..10.0);
            let p: f64 = rng.gen_range(-10.0..10.0);
            let al = alpha.linear[0] * x + alpha.constant;
            let be = beta.linear[0] * p + beta.constant;
            err = err.max((p * x - (be - al + (d * p - b) * (c * x - a))).abs());
        }
        subs.push(Sub::new(format!("{name}/identity"), err, 1e-10));
    }

    // displayed coefficients: exact equality
    let exact = |label: &str, got: f64, want: f64| Sub::new(label, if got == want { 0.0 } else { f64::INFINITY }, 0.0);
    let (alpha, _) = solve_phases(&translation_frame(&g, &[SQRT_2]).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    subs.push(exact("translation/alpha-linear", alpha.linear[0], 0.0));
    let xi = 0.37;
    let conv = PhaseConvention { xi, split: 0.0 };
    let (m, v, t) = (2.0, 1.5, 0.8);
    let (alpha, _) = solve_phases(&galilean_frame(&g, &[v], m, t).map_err(|e| e.to_string())?.with_convention(conv))
        .map_err(|e| e.to_string())?;
    subs.push(exact("galilean/alpha-linear", alpha.linear[0], -m * v));
    subs.push(exact("galilean/alpha-constant", alpha.constant, xi));
    let (m, acc, t) = (1.0, 1.2, 1.1);
    let (alpha, _) = solve_phases(&acceleration_frame(&g, &[acc], m, t).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    subs.push(exact("acceleration/alpha-linear", alpha.linear[0], -m * acc * t));
    Ok(subs)
}

fn all_routes(wf: &WaveFunction, frame: &AffineFrame) -> Result<[WignerGrid; 3], String> {
    let e = |e: wigner_frames::Error| e.to_string();
    Ok([
        transform_wigner_position_route(wf, frame).map_err(e)?,
        transform_wigner_momentum_route(wf, frame).map_err(e)?,
        transform_wigner_closed_form(&wigner_from_state(wf).map_err(e)?, frame).map_err(e)?,
    ])
}

fn route_triangle() -> Outcome {
    let g = reference_grid();
    let n = g.points() as isize;
    let mut frames = frame_corpus(&g).map_err(|e| e.to_string())?;
    frames.push(("affine", AffineFrame::new(vec![1.25], vec![0.3], vec![0.8], vec![-0.4], 0.0).unwrap()));
    let mut subs = Vec::new();
    for (fname, frame) in &frames {
        for (sname, wf) in corpus()? {
            let [pos, mom, closed] = all_routes(&wf, frame)?;
            let label = format!("{sname}/{fname}");
            subs.push(Sub::new(format!("{label}/pos-mom"), diff(&pos, &mom)?, 1e-6));
            subs.push(Sub::new(format!("{label}/pos-closed"), diff(&pos, &closed)?, 1e-6));
            subs.push(Sub::new(format!("{label}/mom-closed"), diff(&mom, &closed)?, 1e-6));
            if sname == "gaussian" {
                // W′(x, p) = W(X(x), P(p)) in closed form
                let mut err = 0.0f64;
                for j in 0..g.points() {
                    for k in -n / 2..n / 2 {
                        let (x, p) = (g.position(j), g.momentum(k, MomentumKind::Wigner));
                        let exact = gaussian_wigner(frame.x_map(0, x), frame.p_map(0, p), 0.0, 0.0, FRAC_1_SQRT_2);
                        err = err.max((pos.at(&[j], &[k]) - exact).abs());
                    }
                }
                subs.push(Sub::new(format!("{label}/analytic"), err, 1e-6));
            }
        }
    }
    Ok(subs)
}

/// Routes that carry the phase constants; the closed form never sees them.
fn phased_routes(wf: &WaveFunction, frame: &AffineFrame) -> Result<[WignerGrid; 2], String> {
    let e = |e: wigner_frames::Error| e.to_string();
    Ok([
        transform_wigner_position_route(wf, frame).map_err(e)?,
        transform_wigner_momentum_route(wf, frame).map_err(e)?,
    ])
}

fn convention_invariance() -> Outcome {
    let g = reference_grid();
    let states: Vec<_> = corpus()?.into_iter().filter(|(n, _)| matches!(*n, "gaussian" | "ho1" | "cat")).collect();
    let mut subs = Vec::new();
    for (fname, frame) in frame_corpus(&g).map_err(|e| e.to_string())? {
        for (sname, wf) in &states {
            let base = phased_routes(wf, &frame.clone().with_convention(PhaseConvention::default()))?;
            for xi in [0.0, 1.7, -42.0] {
                for split in [0.0, 1.0 / 3.0, 1.0] {
                    let other = phased_routes(wf, &frame.clone().with_convention(PhaseConvention { xi, split }))?;
                    let err = base.iter().zip(&other).map(|(a, b)| diff(a, b)).collect::<Result<Vec<_>, _>>()?;
                    subs.push(Sub::new(
                        format!("{sname}/{fname}/xi={xi}/split={split:.3}"),
                        max_abs(err.into_iter()),
                        1e-12,
                    ));
                }
            }
        }
    }
    Ok(subs)
}

fn run_transform(dir: &Path, config: &Path, threads: &str, tag: &str) -> Result<Vec<Vec<u8>>, String> {
    let out = dir.join(format!("w{tag}.bin"));
    let status = Command::new(env!("CARGO_BIN_EXE_wigner-frames"))
        .args(["transform", "--route", "all", "--config"])
        .arg(config)
        .arg("--out")
        .arg(&out)
        .env("WIGNER_THREADS", threads)
        .output()
        .map_err(|e| e.to_string())?;
    if !status.status.success() {
        return Err(format!("transform exited with {}", status.status));
    }
    ["position", "momentum", "closed"]
        .iter()
        .map(|r| std::fs::read(dir.join(format!("w{tag}_{r}.bin"))).map_err(|e| e.to_string()))
        .collect()
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = dir.path().join("job.toml");
    std::fs::write(
        &config,
        "[grid]\npoints = 256\nx_min = -10.0\nx_max = 10.0\n\
         [state]\nkind = \"cat\"\nx0 = 3.0\nsigma = 0.7071067811865476\n\
         [frame]\nkind = \"acceleration\"\naccel = 1.2\nmass = 1.0\nt = 1.1\nxi = 1.7\n",
    )
    .map_err(|e| e.to_string())?;
    let reference = run_transform(dir.path(), &config, "1", "a")?;
    let mut subs = Vec::new();
    for (threads, tag) in [("4", "b"), ("1", "c"), ("4", "d")] {
        let again = run_transform(dir.path(), &config, threads, tag)?;
        let mismatched = reference.iter().zip(&again).filter(|(a, b)| a != b).count();
        subs.push(Sub::new(format!("threads={threads}/{tag}"), mismatched as f64, 0.0));
    }
    Ok(subs)
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("normalization", normalization),
        ("marginals", marginals),
        ("gaussian analytic Wigner", gaussian_analytic),
        ("ho1 negativity at the origin", ho1_origin),
        ("Hilbert-Schmidt identity", hilbert_schmidt),
        ("Weyl round trip", weyl_round_trip),
        ("phase identity and coefficients", phase_identity),
        ("route triangle", route_triangle),
        ("xi and split invariance", convention_invariance),
        ("thread-count determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (pass, detail) = match &outcome {
            Ok(subs) => {
                let worst = subs
                    .iter()
                    .max_by(|a, b| {
                        let r = |s: &Sub| if s.tol > 0.0 { s.err / s.tol } else if s.err == 0.0 { 0.0 } else { f64::INFINITY };
                        r(a).total_cmp(&r(b))
                    })
                    .map(|s| format!("worst {} err={:.3e} tol={:.0e}", s.label, s.err, s.tol))
                    .unwrap_or_default();
                for s in subs.iter().filter(|s| !s.ok()) {
                    eprintln!("  criterion {}: {} err={:.3e} tol={:.0e}", i + 1, s.label, s.err, s.tol);
                }
                let ok = !subs.is_empty() && subs.iter().all(Sub::ok);
                (ok && elapsed < TIME_BUDGET, format!("{} checks, {worst}", subs.len()))
            }
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "criterion {:>2} {:<34} {} ({detail}; {:.2}s)",
            i + 1,
            title,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    if failures > 0 {
        eprintln!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
