//! Plain-text mesh format and legacy VTK output.
//!
//! Native format: a header line `nv nt nb`, then `nv` vertex lines `x y`,
//! `nt` triangle lines `a b c` and `nb` boundary lines `v0 v1 tag` with
//! tag one of `D`, `N`, `C`. Blank lines and `#` comments are skipped.

use std::io::{BufRead, Write};

use super::{BoundaryTag, Mesh};
use crate::error::{Error, Result};

pub fn write_native<W: Write>(mesh: &Mesh, mut w: W) -> Result<()> {
    let nb = mesh.boundary_edges().count();
    writeln!(w, "{} {} {}", mesh.num_vertices(), mesh.num_triangles(), nb)?;
    for p in mesh.vertices() {
        writeln!(w, "{} {}", p[0], p[1])?;
    }
    for t in mesh.triangles() {
        writeln!(w, "{} {} {}", t[0], t[1], t[2])?;
    }
    for (e, tag) in mesh.boundary_edges() {
        let [a, b] = mesh.edge(e);
        writeln!(w, "{a} {b} {tag}")?;
    }
    Ok(())
}

fn parse<T: std::str::FromStr>(tok: Option<&str>, line: usize) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::Parse(format!("line {line}: missing field")))?;
    tok.parse()
        .map_err(|_| Error::Parse(format!("line {line}: cannot parse '{tok}'")))
}

/// Reads a mesh in the native format. All triangles start at level 0.
pub fn read_native<R: BufRead>(r: R) -> Result<Mesh> {
    let mut lines = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        lines.push((i + 1, trimmed.to_string()));
    }
    let mut it = lines.iter();
    let (ln, header) = it
        .next()
        .ok_or_else(|| Error::Parse("empty mesh file".into()))?;
    let mut tok = header.split_whitespace();
    let nv: usize = parse(tok.next(), *ln)?;
    let nt: usize = parse(tok.next(), *ln)?;
    let nb: usize = parse(tok.next(), *ln)?;

    let mut next = |what: &str| {
        it.next()
            .ok_or_else(|| Error::Parse(format!("unexpected end of file while reading {what}")))
    };

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = next("vertices")?;
        let mut tok = l.split_whitespace();
        vertices.push([parse(tok.next(), *ln)?, parse(tok.next(), *ln)?]);
    }
    let mut triangles = Vec::with_capacity(nt);
    for _ in 0..nt {
        let (ln, l) = next("triangles")?;
        let mut tok = l.split_whitespace();
        triangles.push([
            parse(tok.next(), *ln)?,
            parse(tok.next(), *ln)?,
            parse(tok.next(), *ln)?,
        ]);
    }
    let mut boundary = Vec::with_capacity(nb);
    for _ in 0..nb {
        let (ln, l) = next("boundary edges")?;
        let mut tok = l.split_whitespace();
        let a: usize = parse(tok.next(), *ln)?;
        let b: usize = parse(tok.next(), *ln)?;
        let code = tok.next().unwrap_or("");
        let tag = BoundaryTag::from_code(code)
            .ok_or_else(|| Error::Parse(format!("line {ln}: unknown boundary tag '{code}'")))?;
        boundary.push(([a, b], tag));
    }
    let levels = vec![0; triangles.len()];
    Mesh::new(vertices, triangles, levels, &boundary)
}

/// A named data array attached to VTK points or cells.
#[derive(Debug, Clone)]
pub enum VtkField<'a> {
    Scalars(&'a str, &'a [f64]),
    Vectors(&'a str, &'a [[f64; 2]]),
}

impl VtkField<'_> {
    fn len(&self) -> usize {
        match self {
            VtkField::Scalars(_, v) => v.len(),
            VtkField::Vectors(_, v) => v.len(),
        }
    }

    fn write<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        match self {
            VtkField::Scalars(name, values) => {
                writeln!(w, "SCALARS {name} double 1")?;
                writeln!(w, "LOOKUP_TABLE default")?;
                for v in values.iter() {
                    writeln!(w, "{v}")?;
                }
            }
            VtkField::Vectors(name, values) => {
                writeln!(w, "VECTORS {name} double")?;
                for v in values.iter() {
                    writeln!(w, "{} {} 0", v[0], v[1])?;
                }
            }
        }
        Ok(())
    }
}

/// Legacy ASCII unstructured grid with linear triangle cells (type 5).
/// Point fields are indexed by mesh vertex.
pub fn write_vtk<W: Write>(
    mesh: &Mesh,
    mut w: W,
    title: &str,
    point_data: &[VtkField<'_>],
    cell_data: &[VtkField<'_>],
) -> Result<()> {
    let nv = mesh.num_vertices();
    let nt = mesh.num_triangles();
    for f in point_data {
        if f.len() != nv {
            return Err(Error::InvalidArgument(format!(
                "point field has {} values for {nv} vertices",
                f.len()
            )));
        }
    }
    for f in cell_data {
        if f.len() != nt {
            return Err(Error::InvalidArgument(format!(
                "cell field has {} values for {nt} triangles",
                f.len()
            )));
        }
    }

    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "{}", title.replace('\n', " "))?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(w, "POINTS {nv} double")?;
    for p in mesh.vertices() {
        writeln!(w, "{} {} 0", p[0], p[1])?;
    }
    writeln!(w, "CELLS {nt} {}", 4 * nt)?;
    for t in mesh.triangles() {
        writeln!(w, "3 {} {} {}", t[0], t[1], t[2])?;
    }
    writeln!(w, "CELL_TYPES {nt}")?;
    for _ in 0..nt {
        writeln!(w, "5")?;
    }
    if !point_data.is_empty() {
        writeln!(w, "POINT_DATA {nv}")?;
        for f in point_data {
            f.write(&mut w)?;
        }
    }
    if !cell_data.is_empty() {
        writeln!(w, "CELL_DATA {nt}")?;
        for f in cell_data {
            f.write(&mut w)?;
        }
    }
    Ok(())
}
