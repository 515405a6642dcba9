//! File formats for Wigner grids and marginals.
//!
//! `bin`, all little-endian:
//!
//! | field                      | type            |
//! |----------------------------|-----------------|
//! | magic `WIGR`               | 4 bytes         |
//! | version = 1                | u32             |
//! | n_dims                     | u32             |
//! | N per axis                 | u32 × n_dims    |
//! | ħ, time tag                | f64 × 2         |
//! | x_min, dx, p_min, dp       | f64 × 4, per axis |
//! | samples, row-major         | f64 × …         |
//!
//! A Wigner grid carries `N^{2n}` samples, a marginal `N^n`; the momentum
//! metadata always describes the Wigner momentum axis.
//!
//! `csv`: a `#` header naming the columns, then one point per line with every
//! value printed to 17 significant digits, so re-reading is exact.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{MomentumKind, PhaseGrid};
use crate::wigner::WignerGrid;

use super::config::Format;

pub const MAGIC: &[u8; 4] = b"WIGR";
pub const VERSION: u32 = 1;

/// Which axes a marginal lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarginalAxis {
    Position,
    Momentum,
}

/// Header fields of a `bin` file.
#[derive(Debug, Clone, PartialEq)]
pub struct BinHeader {
    pub n_dims: usize,
    pub points: Vec<usize>,
    pub hbar: f64,
    pub time_tag: f64,
    /// `(x_min, dx, p_min, dp)` per axis.
    pub axes: Vec<[f64; 4]>,
}

impl BinHeader {
    pub fn byte_len(&self) -> usize {
        12 + 4 * self.n_dims + 16 + 32 * self.n_dims
    }
}

fn header_of(g: &PhaseGrid, time_tag: f64) -> BinHeader {
    let dims = g.n_dims();
    let axis = [g.x_min(), g.dx(), g.p_min(MomentumKind::Wigner), g.dp_wig()];
    BinHeader {
        n_dims: dims,
        points: vec![g.points(); dims],
        hbar: g.hbar(),
        time_tag,
        axes: vec![axis; dims],
    }
}

fn write_bin(out: &mut impl Write, header: &BinHeader, samples: &[f64]) -> std::io::Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&(header.n_dims as u32).to_le_bytes())?;
    for &n in &header.points {
        out.write_all(&(n as u32).to_le_bytes())?;
    }
    out.write_all(&header.hbar.to_le_bytes())?;
    out.write_all(&header.time_tag.to_le_bytes())?;
    for axis in &header.axes {
        for v in axis {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    for v in samples {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

/// Parse a `bin` file back into its header and samples.
pub fn read_bin(path: &Path) -> Result<(BinHeader, Vec<f64>)> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    let bad = |what: &str| Error::Config(format!("{}: {what}", path.display()));
    let mut pos = 0usize;
    let mut take = |n: usize| -> Result<&[u8]> {
        let s = bytes.get(pos..pos + n).ok_or_else(|| bad("truncated file"))?;
        pos += n;
        Ok(s)
    };
    if take(4)? != MAGIC {
        return Err(bad("not a WIGR file"));
    }
    let u32_at = |b: &[u8]| u32::from_le_bytes(b.try_into().expect("4 bytes")) as usize;
    let f64_at = |b: &[u8]| f64::from_le_bytes(b.try_into().expect("8 bytes"));
    let version = u32_at(take(4)?);
    if version != VERSION as usize {
        return Err(bad(&format!("unsupported version {version}")));
    }
    let n_dims = u32_at(take(4)?);
    if n_dims == 0 || n_dims > 2 {
        return Err(bad(&format!("bad dimension count {n_dims}")));
    }
    let points = (0..n_dims).map(|_| take(4).map(u32_at)).collect::<Result<Vec<_>>>()?;
    let hbar = f64_at(take(8)?);
    let time_tag = f64_at(take(8)?);
    let mut axes = Vec::with_capacity(n_dims);
    for _ in 0..n_dims {
        let mut axis = [0.0; 4];
        for v in axis.iter_mut() {
            *v = f64_at(take(8)?);
        }
        axes.push(axis);
    }
    let rest = bytes.len() - pos;
    if !rest.is_multiple_of(8) {
        return Err(bad("sample block is not a whole number of f64"));
    }
    let samples = bytes[pos..].chunks_exact(8).map(f64_at).collect();
    Ok((BinHeader { n_dims, points, hbar, time_tag, axes }, samples))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn csv_header(names: &[String]) -> String {
    format!("# {}\n", names.join(" "))
}

fn axis_names(prefix: &str, dims: usize) -> Vec<String> {
    if dims == 1 {
        vec![prefix.to_string()]
    } else {
        (1..=dims).map(|i| format!("{prefix}{i}")).collect()
    }
}

/// Coordinates of flat index `flat` over `dims` axes of `n` points each.
fn coords(flat: usize, dims: usize, n: usize, start: f64, step: f64, out: &mut Vec<f64>) {
    let mut rest = flat;
    let first = out.len();
    out.resize(first + dims, 0.0);
    for i in (0..dims).rev() {
        out[first + i] = start + (rest % n) as f64 * step;
        rest /= n;
    }
}

fn write_row(out: &mut impl Write, values: &[f64]) -> std::io::Result<()> {
    let line: Vec<String> = values.iter().map(|v| format!("{v:.16e}")).collect();
    writeln!(out, "{}", line.join(" "))
}

pub fn write_wigner(w: &WignerGrid, path: &Path, format: Format) -> Result<()> {
    let g = w.grid();
    let mut out = create(path)?;
    match format {
        Format::Bin => write_bin(&mut out, &header_of(g, w.time_tag()), w.as_slice())?,
        Format::Csv => {
            let dims = g.n_dims();
            let n = g.points();
            let len = g.len();
            let mut names = axis_names("x", dims);
            names.extend(axis_names("p", dims));
            names.push("W".into());
            out.write_all(csv_header(&names).as_bytes())?;
            let p_min = g.p_min(MomentumKind::Wigner);
            let mut row = Vec::with_capacity(2 * dims + 1);
            for (flat, v) in w.as_slice().iter().enumerate() {
                row.clear();
                coords(flat / len, dims, n, g.x_min(), g.dx(), &mut row);
                coords(flat % len, dims, n, p_min, g.dp_wig(), &mut row);
                row.push(*v);
                write_row(&mut out, &row)?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_marginal(
    g: &PhaseGrid,
    time_tag: f64,
    axis: MarginalAxis,
    values: &[f64],
    path: &Path,
    format: Format,
) -> Result<()> {
    let mut out = create(path)?;
    match format {
        Format::Bin => write_bin(&mut out, &header_of(g, time_tag), values)?,
        Format::Csv => {
            let dims = g.n_dims();
            let (prefix, start, step) = match axis {
                MarginalAxis::Position => ("x", g.x_min(), g.dx()),
                MarginalAxis::Momentum => ("p", g.p_min(MomentumKind::Wigner), g.dp_wig()),
            };
            let mut names = axis_names(prefix, dims);
            names.push("M".into());
            out.write_all(csv_header(&names).as_bytes())?;
            let mut row = Vec::with_capacity(dims + 1);
            for (flat, v) in values.iter().enumerate() {
                row.clear();
                coords(flat, dims, g.points(), start, step, &mut row);
                row.push(*v);
                write_row(&mut out, &row)?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

/// Read a csv export: the header's column names and the numeric rows.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let reader = BufReader::new(File::open(path)?);
    let mut names = Vec::new();
    let mut rows = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if let Some(h) = line.strip_prefix('#') {
            names = h.split_whitespace().map(str::to_string).collect();
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|e| Error::Config(format!("bad csv value {t}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok((names, rows))
}
