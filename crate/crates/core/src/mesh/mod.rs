//! Conforming triangle meshes with tagged boundaries.
//!
//! Triangles are stored counter-clockwise with the newest-vertex-bisection
//! convention: local vertex 0 is the newest vertex and the edge between
//! local vertices 1 and 2 is the refinement edge. Local edge `i` is the edge
//! opposite local vertex `i`.

mod io;
mod patches;
mod refine;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use io::{read_native, write_native, write_vtk, VtkField};
pub use patches::{build_patches, PatchTable};

pub type Point = [f64; 2];

/// Marker for a boundary-less slot in `edge_triangles`.
pub const NO_TRIANGLE: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BoundaryTag {
    #[serde(rename = "D")]
    Dirichlet,
    #[serde(rename = "N")]
    Neumann,
    #[serde(rename = "C")]
    Contact,
}

impl BoundaryTag {
    pub fn code(self) -> char {
        match self {
            BoundaryTag::Dirichlet => 'D',
            BoundaryTag::Neumann => 'N',
            BoundaryTag::Contact => 'C',
        }
    }

    pub fn from_code(c: &str) -> Option<Self> {
        match c {
            "D" => Some(BoundaryTag::Dirichlet),
            "N" => Some(BoundaryTag::Neumann),
            "C" => Some(BoundaryTag::Contact),
            _ => None,
        }
    }
}

impl fmt::Display for BoundaryTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code())
    }
}

/// Boundary tags for the four sides of the unit square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideTags {
    pub bottom: BoundaryTag,
    pub right: BoundaryTag,
    pub top: BoundaryTag,
    pub left: BoundaryTag,
}

impl SideTags {
    /// Contact at y = 0, clamped at y = 1, traction-loaded sides.
    pub fn bottom_contact() -> Self {
        SideTags {
            bottom: BoundaryTag::Contact,
            right: BoundaryTag::Neumann,
            top: BoundaryTag::Dirichlet,
            left: BoundaryTag::Neumann,
        }
    }

    /// Contact at x = 1, clamped at x = 0, traction-loaded top and bottom.
    pub fn right_contact() -> Self {
        SideTags {
            bottom: BoundaryTag::Neumann,
            right: BoundaryTag::Contact,
            top: BoundaryTag::Neumann,
            left: BoundaryTag::Dirichlet,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Mesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    levels: Vec<u32>,
    edges: Vec<[usize; 2]>,
    edge_triangles: Vec<[usize; 2]>,
    triangle_edges: Vec<[usize; 3]>,
    boundary_tags: Vec<Option<BoundaryTag>>,
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

pub fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

pub fn distance(a: Point, b: Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

pub fn midpoint(a: Point, b: Point) -> Point {
    [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
}

impl Mesh {
    /// Builds a mesh and its edge topology, checking orientation, manifoldness
    /// and that the tagged edges are exactly the boundary edges.
    pub fn new(
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        levels: Vec<u32>,
        boundary: &[([usize; 2], BoundaryTag)],
    ) -> Result<Mesh> {
        if levels.len() != triangles.len() {
            return Err(Error::InvalidMesh(format!(
                "{} levels for {} triangles",
                levels.len(),
                triangles.len()
            )));
        }
        let nv = vertices.len();
        let mut edge_index: HashMap<(usize, usize), usize> =
            HashMap::with_capacity(triangles.len() * 2);
        let mut edges = Vec::with_capacity(triangles.len() * 2);
        let mut edge_triangles: Vec<[usize; 2]> = Vec::with_capacity(triangles.len() * 2);
        let mut triangle_edges = Vec::with_capacity(triangles.len());

        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= nv) {
                return Err(Error::InvalidMesh(format!(
                    "triangle {t} references a missing vertex"
                )));
            }
            let area = signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
            if !(area > 0.0) {
                return Err(Error::InvalidMesh(format!(
                    "triangle {t} has non-positive signed area {area:e}"
                )));
            }
            let mut local = [0usize; 3];
            for i in 0..3 {
                let a = tri[(i + 1) % 3];
                let b = tri[(i + 2) % 3];
                let key = edge_key(a, b);
                let e = *edge_index.entry(key).or_insert_with(|| {
                    edges.push([key.0, key.1]);
                    edge_triangles.push([NO_TRIANGLE, NO_TRIANGLE]);
                    edges.len() - 1
                });
                let slot = &mut edge_triangles[e];
                if slot[0] == NO_TRIANGLE {
                    slot[0] = t;
                } else if slot[1] == NO_TRIANGLE {
                    slot[1] = t;
                } else {
                    return Err(Error::InvalidMesh(format!(
                        "edge ({}, {}) is shared by more than two triangles",
                        key.0, key.1
                    )));
                }
                local[i] = e;
            }
            triangle_edges.push(local);
        }

        let mut boundary_tags = vec![None; edges.len()];
        for &([a, b], tag) in boundary {
            let e = *edge_index.get(&edge_key(a, b)).ok_or_else(|| {
                Error::InvalidMesh(format!("tagged edge ({a}, {b}) is not a mesh edge"))
            })?;
            if edge_triangles[e][1] != NO_TRIANGLE {
                return Err(Error::InvalidMesh(format!(
                    "tagged edge ({a}, {b}) is interior"
                )));
            }
            boundary_tags[e] = Some(tag);
        }

        let mesh = Mesh {
            vertices,
            triangles,
            levels,
            edges,
            edge_triangles,
            triangle_edges,
            boundary_tags,
        };
        mesh.check_boundary()?;
        Ok(mesh)
    }

    fn check_boundary(&self) -> Result<()> {
        let mut degree = vec![0u8; self.vertices.len()];
        let mut touches_contact = vec![false; self.vertices.len()];
        let mut touches_dirichlet = vec![false; self.vertices.len()];
        for (e, &[a, b]) in self.edges.iter().enumerate() {
            if !self.is_boundary_edge(e) {
                continue;
            }
            let tag = self.boundary_tags[e].ok_or_else(|| {
                // An untagged one-sided edge is either a missing tag or a hanging node.
                Error::InvalidMesh(format!("boundary edge ({a}, {b}) has no tag"))
            })?;
            for v in [a, b] {
                degree[v] += 1;
                match tag {
                    BoundaryTag::Contact => touches_contact[v] = true,
                    BoundaryTag::Dirichlet => touches_dirichlet[v] = true,
                    BoundaryTag::Neumann => {}
                }
            }
        }
        for v in 0..self.vertices.len() {
            if degree[v] != 0 && degree[v] != 2 {
                return Err(Error::InvalidMesh(format!(
                    "boundary is not a union of closed loops at vertex {v}"
                )));
            }
            if touches_contact[v] && touches_dirichlet[v] {
                return Err(Error::InvalidMesh(format!(
                    "contact and Dirichlet boundaries meet at vertex {v}"
                )));
            }
        }
        Ok(())
    }

    /// Structured mesh of the unit square with `n` cells per side, each
    /// cell split along its rising diagonal.
    pub fn unit_square(n: usize, tags: SideTags) -> Result<Mesh> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "subdivision count must be at least 1".into(),
            ));
        }
        let h = 1.0 / n as f64;
        let idx = |i: usize, j: usize| j * (n + 1) + i;
        let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
        for j in 0..=n {
            for i in 0..=n {
                vertices.push([i as f64 * h, j as f64 * h]);
            }
        }
        let mut triangles = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                // The right-angle vertex goes first so the diagonal is the refinement edge.
                triangles.push([idx(i + 1, j), idx(i + 1, j + 1), idx(i, j)]);
                triangles.push([idx(i, j + 1), idx(i, j), idx(i + 1, j + 1)]);
            }
        }
        let mut boundary = Vec::with_capacity(4 * n);
        for i in 0..n {
            boundary.push(([idx(i, 0), idx(i + 1, 0)], tags.bottom));
            boundary.push(([idx(n, i), idx(n, i + 1)], tags.right));
            boundary.push(([idx(i, n), idx(i + 1, n)], tags.top));
            boundary.push(([idx(0, i), idx(0, i + 1)], tags.left));
        }
        let levels = vec![0; triangles.len()];
        Mesh::new(vertices, triangles, levels, &boundary)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> Point {
        self.vertices[v]
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn triangle(&self, t: usize) -> [usize; 3] {
        self.triangles[t]
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> [usize; 2] {
        self.edges[e]
    }

    /// Adjacent triangles of an edge; the second entry is [`NO_TRIANGLE`] on the boundary.
    pub fn edge_triangles(&self, e: usize) -> [usize; 2] {
        self.edge_triangles[e]
    }

    pub fn triangle_edges(&self, t: usize) -> [usize; 3] {
        self.triangle_edges[t]
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.edge_triangles[e][1] == NO_TRIANGLE
    }

    pub fn boundary_tag(&self, e: usize) -> Option<BoundaryTag> {
        self.boundary_tags[e]
    }

    /// Boundary edges as `(edge index, tag)`.
    pub fn boundary_edges(&self) -> impl Iterator<Item = (usize, BoundaryTag)> + '_ {
        self.boundary_tags
            .iter()
            .enumerate()
            .filter_map(|(e, tag)| tag.map(|t| (e, t)))
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_points(t);
        signed_area(a, b, c)
    }

    /// Longest edge of the triangle.
    pub fn diameter(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_points(t);
        distance(a, b).max(distance(b, c)).max(distance(c, a))
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let [a, b] = self.edges[e];
        distance(self.vertices[a], self.vertices[b])
    }

    pub fn edge_midpoint(&self, e: usize) -> Point {
        let [a, b] = self.edges[e];
        midpoint(self.vertices[a], self.vertices[b])
    }

    pub fn centroid(&self, t: usize) -> Point {
        let [a, b, c] = self.triangle_points(t);
        [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0]
    }

    /// Local index (0..3) of edge `e` in triangle `t`.
    pub fn local_edge(&self, t: usize, e: usize) -> Option<usize> {
        self.triangle_edges[t].iter().position(|&x| x == e)
    }

    /// Outward unit normal of edge `e` seen from triangle `t`.
    pub fn outward_normal(&self, t: usize, e: usize) -> Point {
        let i = self
            .local_edge(t, e)
            .expect("edge does not belong to triangle");
        let tri = self.triangles[t];
        // Counter-clockwise traversal a -> b; outward normal is (dy, -dx).
        let a = self.vertices[tri[(i + 1) % 3]];
        let b = self.vertices[tri[(i + 2) % 3]];
        let len = distance(a, b);
        [(b[1] - a[1]) / len, -(b[0] - a[0]) / len]
    }

    pub fn min_diameter(&self) -> f64 {
        (0..self.num_triangles())
            .map(|t| self.diameter(t))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_diameter(&self) -> f64 {
        (0..self.num_triangles())
            .map(|t| self.diameter(t))
            .fold(0.0, f64::max)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.num_triangles()).map(|t| self.area(t)).sum()
    }

    /// Smallest interior angle (radians) over all triangles.
    pub fn min_angle(&self) -> f64 {
        let mut min = f64::INFINITY;
        for t in 0..self.num_triangles() {
            let p = self.triangle_points(t);
            for i in 0..3 {
                let o = p[i];
                let a = p[(i + 1) % 3];
                let b = p[(i + 2) % 3];
                let u = [a[0] - o[0], a[1] - o[1]];
                let v = [b[0] - o[0], b[1] - o[1]];
                let cos = (u[0] * v[0] + u[1] * v[1])
                    / ((u[0] * u[0] + u[1] * u[1]).sqrt() * (v[0] * v[0] + v[1] * v[1]).sqrt());
                min = min.min(cos.clamp(-1.0, 1.0).acos());
            }
        }
        min
    }

    /// No hanging nodes: every one-sided edge is a tagged domain-boundary edge.
    pub fn is_conforming(&self) -> bool {
        (0..self.num_edges()).all(|e| !self.is_boundary_edge(e) || self.boundary_tags[e].is_some())
            && self.check_boundary().is_ok()
    }

    /// Triangles incident to each vertex.
    pub fn vertex_triangles(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_vertices()];
        for (t, tri) in self.triangles.iter().enumerate() {
            for &v in tri {
                out[v].push(t);
            }
        }
        out
    }

    pub fn refine(&self, marked: &[usize]) -> Mesh {
        refine::refine(self, marked)
    }
}
