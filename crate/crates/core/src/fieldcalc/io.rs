//! Text container and CSV export for fields.
//!
//! Container layout (UTF-8, one record per line):
//!
//! ```text
//! zbwfield 1
//! kind scalar|vector3|complex
//! dims <nx> <ny> <nz>
//! spacing <hx> <hy> <hz>
//! origin <x0> <y0> <z0>
//! values
//! <one node per line, components separated by a space>
//! ```
//!
//! Floats use the shortest exponent form that round-trips exactly.

use std::io::{BufRead, Write};

use nalgebra::Vector3;
use num_complex::Complex64;

use super::{ComplexScalarField, Grid, ScalarField, VectorField3};
use crate::{Error, Result};

const MAGIC: &str = "zbwfield 1";

#[derive(Debug, Clone, PartialEq)]
pub enum FieldData {
    Scalar(ScalarField),
    Vector(VectorField3),
    Complex(ComplexScalarField),
}

fn write_header(w: &mut impl Write, kind: &str, g: &Grid) -> Result<()> {
    let [nx, ny, nz] = g.dims();
    let [hx, hy, hz] = g.spacing();
    let [ox, oy, oz] = g.origin();
    writeln!(w, "{MAGIC}")?;
    writeln!(w, "kind {kind}")?;
    writeln!(w, "dims {nx} {ny} {nz}")?;
    writeln!(w, "spacing {hx:e} {hy:e} {hz:e}")?;
    writeln!(w, "origin {ox:e} {oy:e} {oz:e}")?;
    writeln!(w, "values")?;
    Ok(())
}

fn csv_coords(w: &mut impl Write, g: &Grid, idx: usize) -> Result<()> {
    let [x, y, z] = g.position(idx);
    write!(w, "{x:e},{y:e},{z:e}")?;
    Ok(())
}

impl ScalarField {
    pub fn write_container(&self, mut w: impl Write) -> Result<()> {
        write_header(&mut w, "scalar", self.grid())?;
        for v in self.values() {
            writeln!(w, "{v:e}")?;
        }
        Ok(())
    }

    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "x,y,z,value")?;
        for (i, v) in self.values().iter().enumerate() {
            csv_coords(&mut w, self.grid(), i)?;
            writeln!(w, ",{v:e}")?;
        }
        Ok(())
    }
}

impl VectorField3 {
    pub fn write_container(&self, mut w: impl Write) -> Result<()> {
        write_header(&mut w, "vector3", self.grid())?;
        for v in self.values() {
            writeln!(w, "{:e} {:e} {:e}", v.x, v.y, v.z)?;
        }
        Ok(())
    }

    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "x,y,z,vx,vy,vz")?;
        for (i, v) in self.values().iter().enumerate() {
            csv_coords(&mut w, self.grid(), i)?;
            writeln!(w, ",{:e},{:e},{:e}", v.x, v.y, v.z)?;
        }
        Ok(())
    }
}

impl ComplexScalarField {
    pub fn write_container(&self, mut w: impl Write) -> Result<()> {
        write_header(&mut w, "complex", self.grid())?;
        for z in self.values() {
            writeln!(w, "{:e} {:e}", z.re, z.im)?;
        }
        Ok(())
    }

    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "x,y,z,re,im")?;
        for (i, z) in self.values().iter().enumerate() {
            csv_coords(&mut w, self.grid(), i)?;
            writeln!(w, ",{:e},{:e}", z.re, z.im)?;
        }
        Ok(())
    }
}

fn parse_f64s<const N: usize>(line: &str, what: &str) -> Result<[f64; N]> {
    let parts: Vec<&str> = line.split_whitespace().collect();
    if parts.len() != N {
        return Err(Error::Parse(format!("{what}: expected {N} numbers, got {line:?}")));
    }
    let mut out = [0.0; N];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.parse().map_err(|e| Error::Parse(format!("{what}: {p:?}: {e}")))?;
    }
    Ok(out)
}

fn keyed<'a>(line: Option<&'a str>, key: &str) -> Result<&'a str> {
    let line = line.ok_or_else(|| Error::Parse(format!("missing `{key}` line")))?;
    line.strip_prefix(key)
        .map(str::trim)
        .ok_or_else(|| Error::Parse(format!("expected `{key}`, found {line:?}")))
}

pub fn read_container(r: impl BufRead) -> Result<FieldData> {
    let lines: Vec<String> = r.lines().collect::<std::io::Result<_>>()?;
    let mut it = lines.iter().map(String::as_str);
    if it.next().map(str::trim) != Some(MAGIC) {
        return Err(Error::Parse("not a zbwfield container".into()));
    }
    let kind = keyed(it.next(), "kind")?.to_string();
    let d = keyed(it.next(), "dims")?;
    let dims: Vec<usize> = d
        .split_whitespace()
        .map(|s| s.parse().map_err(|e| Error::Parse(format!("dims: {e}"))))
        .collect::<Result<_>>()?;
    let dims: [usize; 3] = dims
        .try_into()
        .map_err(|_| Error::Parse("dims needs three entries".into()))?;
    let spacing = parse_f64s::<3>(keyed(it.next(), "spacing")?, "spacing")?;
    let origin = parse_f64s::<3>(keyed(it.next(), "origin")?, "origin")?;
    if !keyed(it.next(), "values")?.is_empty() {
        return Err(Error::Parse("malformed `values` marker".into()));
    }
    let grid = Grid::new(dims, spacing, origin)?;
    let body: Vec<&str> = it.filter(|l| !l.trim().is_empty()).collect();
    match kind.as_str() {
        "scalar" => {
            let v = body
                .iter()
                .map(|l| parse_f64s::<1>(l, "value").map(|a| a[0]))
                .collect::<Result<_>>()?;
            Ok(FieldData::Scalar(ScalarField::new(grid, v)?))
        }
        "vector3" => {
            let v = body
                .iter()
                .map(|l| parse_f64s::<3>(l, "value").map(|a| Vector3::new(a[0], a[1], a[2])))
                .collect::<Result<_>>()?;
            Ok(FieldData::Vector(VectorField3::new(grid, v)?))
        }
        "complex" => {
            let v = body
                .iter()
                .map(|l| parse_f64s::<2>(l, "value").map(|a| Complex64::new(a[0], a[1])))
                .collect::<Result<_>>()?;
            Ok(FieldData::Complex(ComplexScalarField::new(grid, v)?))
        }
        other => Err(Error::Parse(format!("unknown field kind {other:?}"))),
    }
}
