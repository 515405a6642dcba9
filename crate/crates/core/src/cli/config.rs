//! Job files: a sectioned TOML document with `[grid]`, `[state]`, `[frame]`
//! and `[output]` tables. Everything is validated before any computation.
//!
//! ```toml
//! [grid]
//! n_dims = 1
//! points = 256
//! x_min = -10.0
//! x_max = 10.0
//! hbar = 1.0
//!
//! [state]
//! kind = "gaussian"      # gaussian | ho | cat
//! x0 = 0.0              # gaussian: x0 and p0 default to 0
//! p0 = 0.0
//! sigma = 0.7071067811865476
//!
//! [frame]
//! kind = "translation"   # translation | galilean | acceleration | affine
//! shift = 2.0
//!
//! [output]
//! path = "gauss.bin"
//! format = "bin"         # bin | csv
//! what = "wigner"        # wigner | marginals | phases | report
//! ```
//!
//! Vector parameters accept a bare number, which is used on every axis.

use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::frames::{
    acceleration_frame, galilean_frame, translation_frame, AffineFrame, PhaseConvention,
};
use crate::grid::PhaseGrid;
use crate::states::{gaussian_packet, ho_eigenstate, ho_product_state, superpose, WaveFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Bin,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Bin => "bin",
            Format::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum What {
    Wigner,
    Marginals,
    Phases,
    Report,
}

/// A number or a per-axis list.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Vector {
    Scalar(f64),
    List(Vec<f64>),
}

impl Vector {
    fn resolve(&self, dims: usize, name: &str) -> Result<Vec<f64>> {
        match self {
            Vector::Scalar(v) => Ok(vec![*v; dims]),
            Vector::List(v) if v.len() == dims => Ok(v.clone()),
            Vector::List(v) => {
                Err(Error::Config(format!("{name} needs {dims} components, got {}", v.len())))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default = "one_dim")]
    pub n_dims: usize,
    pub points: usize,
    pub x_min: f64,
    pub x_max: f64,
    #[serde(default = "unit")]
    pub hbar: f64,
}

fn one_dim() -> usize {
    1
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub kind: String,
    pub x0: Option<Vector>,
    pub p0: Option<Vector>,
    pub sigma: Option<Vector>,
    pub level: Option<usize>,
    pub levels: Option<Vec<usize>>,
    pub mass: Option<f64>,
    pub omega: Option<f64>,
    /// Relative phase of the `−x0` component of a cat state.
    pub phase: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameSpec {
    pub kind: String,
    pub shift: Option<Vector>,
    pub velocity: Option<Vector>,
    pub accel: Option<Vector>,
    pub mass: Option<f64>,
    pub c: Option<Vector>,
    pub a: Option<Vector>,
    pub d: Option<Vector>,
    pub b: Option<Vector>,
    pub t: Option<f64>,
    pub xi: Option<f64>,
    pub split: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: PathBuf,
    #[serde(default = "default_format")]
    pub format: Format,
    #[serde(default = "default_what")]
    pub what: What,
}

fn default_format() -> Format {
    Format::Bin
}

fn default_what() -> What {
    What::Wigner
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub grid: Option<GridSpec>,
    pub state: Option<StateSpec>,
    pub frame: Option<FrameSpec>,
    pub output: Option<OutputSpec>,
}

fn missing(section: &str) -> Error {
    Error::Config(format!("missing [{section}] section"))
}

/// Reject parameters that the chosen kind does not take.
fn only(kind: &str, allowed: &[&str], given: &[(&str, bool)]) -> Result<()> {
    for (name, present) in given {
        if *present && !allowed.contains(name) {
            return Err(Error::Config(format!("parameter `{name}` does not apply to kind \"{kind}\"")));
        }
    }
    Ok(())
}

fn need<'a, T>(v: &'a Option<T>, kind: &str, name: &str) -> Result<&'a T> {
    v.as_ref().ok_or_else(|| Error::Config(format!("kind \"{kind}\" needs `{name}`")))
}

impl JobSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let spec: JobSpec = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Check every present section without running anything expensive.
    pub fn validate(&self) -> Result<()> {
        if let Some(grid) = &self.grid {
            let g = self.grid_from(grid)?;
            if let Some(s) = &self.state {
                s.check(&g)?;
            }
            if let Some(f) = &self.frame {
                f.build(&g)?;
            }
        }
        Ok(())
    }

    fn grid_from(&self, g: &GridSpec) -> Result<PhaseGrid> {
        PhaseGrid::new(g.n_dims, g.points, g.x_min, g.x_max, g.hbar)
    }

    pub fn grid(&self) -> Result<PhaseGrid> {
        self.grid_from(self.grid.as_ref().ok_or_else(|| missing("grid"))?)
    }

    pub fn state(&self, g: &PhaseGrid) -> Result<WaveFunction> {
        self.state.as_ref().ok_or_else(|| missing("state"))?.build(g)
    }

    pub fn frame(&self, g: &PhaseGrid) -> Result<AffineFrame> {
        self.frame.as_ref().ok_or_else(|| missing("frame"))?.build(g)
    }

    pub fn output(&self) -> Result<&OutputSpec> {
        self.output.as_ref().ok_or_else(|| missing("output"))
    }
}

impl StateSpec {
    fn check(&self, g: &PhaseGrid) -> Result<()> {
        let given = [
            ("x0", self.x0.is_some()),
            ("p0", self.p0.is_some()),
            ("sigma", self.sigma.is_some()),
            ("level", self.level.is_some()),
            ("levels", self.levels.is_some()),
            ("mass", self.mass.is_some()),
            ("omega", self.omega.is_some()),
            ("phase", self.phase.is_some()),
        ];
        let dims = g.n_dims();
        match self.kind.as_str() {
            "gaussian" | "cat" => {
                let allowed: &[&str] =
                    if self.kind == "cat" { &["x0", "p0", "sigma", "phase"] } else { &["x0", "p0", "sigma"] };
                only(&self.kind, allowed, &given)?;
                if self.kind == "cat" {
                    need(&self.x0, &self.kind, "x0")?;
                }
                if let Some(x0) = &self.x0 {
                    x0.resolve(dims, "x0")?;
                }
                need(&self.sigma, &self.kind, "sigma")?.resolve(dims, "sigma")?;
                if let Some(p0) = &self.p0 {
                    p0.resolve(dims, "p0")?;
                }
            }
            "ho" => {
                only("ho", &["level", "levels", "mass", "omega"], &given)?;
                match (&self.level, &self.levels) {
                    (Some(_), Some(_)) => {
                        return Err(Error::Config("give either `level` or `levels`, not both".into()))
                    }
                    (None, None) => return Err(Error::Config("kind \"ho\" needs `level`".into())),
                    (None, Some(l)) if l.len() != dims => {
                        return Err(Error::Config(format!("levels needs {dims} entries, got {}", l.len())))
                    }
                    _ => {}
                }
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown state kind \"{other}\" (expected gaussian, ho or cat)"
                )))
            }
        }
        Ok(())
    }

    pub fn build(&self, g: &PhaseGrid) -> Result<WaveFunction> {
        self.check(g)?;
        let dims = g.n_dims();
        let zero = Vector::Scalar(0.0);
        match self.kind.as_str() {
            "gaussian" => gaussian_packet(
                g,
                &self.x0.as_ref().unwrap_or(&zero).resolve(dims, "x0")?,
                &self.p0.as_ref().unwrap_or(&zero).resolve(dims, "p0")?,
                &self.sigma.as_ref().expect("checked").resolve(dims, "sigma")?,
            ),
            "cat" => {
                let x0 = self.x0.as_ref().expect("checked").resolve(dims, "x0")?;
                let p0 = self.p0.as_ref().unwrap_or(&zero).resolve(dims, "p0")?;
                let sigma = self.sigma.as_ref().expect("checked").resolve(dims, "sigma")?;
                let neg: Vec<f64> = x0.iter().map(|v| -v).collect();
                let right = gaussian_packet(g, &x0, &p0, &sigma)?;
                let left = gaussian_packet(g, &neg, &p0, &sigma)?;
                let phase = C64::from_polar(1.0, self.phase.unwrap_or(0.0));
                superpose(&[(C64::new(1.0, 0.0), &right), (phase, &left)])
            }
            _ => {
                let mass = self.mass.unwrap_or(1.0);
                let omega = self.omega.unwrap_or(1.0);
                match (&self.level, &self.levels) {
                    (Some(l), _) => ho_eigenstate(g, *l, mass, omega),
                    (None, Some(l)) => ho_product_state(g, l, mass, omega),
                    _ => unreachable!("checked"),
                }
            }
        }
    }
}

impl FrameSpec {
    pub fn build(&self, g: &PhaseGrid) -> Result<AffineFrame> {
        let given = [
            ("shift", self.shift.is_some()),
            ("velocity", self.velocity.is_some()),
            ("accel", self.accel.is_some()),
            ("mass", self.mass.is_some()),
            ("c", self.c.is_some()),
            ("a", self.a.is_some()),
            ("d", self.d.is_some()),
            ("b", self.b.is_some()),
        ];
        let dims = g.n_dims();
        let t = self.t.unwrap_or(0.0);
        let kind = self.kind.as_str();
        let frame = match kind {
            "translation" => {
                only(kind, &["shift"], &given)?;
                let mut f = translation_frame(g, &need(&self.shift, kind, "shift")?.resolve(dims, "shift")?)?;
                if t != 0.0 {
                    f = AffineFrame::new(f.c().to_vec(), f.a().to_vec(), f.d().to_vec(), f.b().to_vec(), t)?;
                }
                f
            }
            "galilean" => {
                only(kind, &["velocity", "mass"], &given)?;
                let v = need(&self.velocity, kind, "velocity")?.resolve(dims, "velocity")?;
                galilean_frame(g, &v, *need(&self.mass, kind, "mass")?, t)?
            }
            "acceleration" => {
                only(kind, &["accel", "mass"], &given)?;
                let acc = need(&self.accel, kind, "accel")?.resolve(dims, "accel")?;
                acceleration_frame(g, &acc, *need(&self.mass, kind, "mass")?, t)?
            }
            "affine" => {
                only(kind, &["c", "a", "d", "b"], &given)?;
                let ones = Vector::Scalar(1.0);
                let zero = Vector::Scalar(0.0);
                AffineFrame::new(
                    self.c.as_ref().unwrap_or(&ones).resolve(dims, "c")?,
                    self.a.as_ref().unwrap_or(&zero).resolve(dims, "a")?,
                    self.d.as_ref().unwrap_or(&ones).resolve(dims, "d")?,
                    self.b.as_ref().unwrap_or(&zero).resolve(dims, "b")?,
                    t,
                )?
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown frame kind \"{other}\" (expected translation, galilean, acceleration or affine)"
                )))
            }
        };
        Ok(frame.with_convention(PhaseConvention {
            xi: self.xi.unwrap_or(0.0),
            split: self.split.unwrap_or(0.0),
        }))
    }
}
