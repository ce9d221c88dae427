//! Node patches: the triangles around a P2 node and the edges of their union.

use super::{distance, BoundaryTag, Mesh, NO_TRIANGLE};
use crate::fem::DofMap;

#[derive(Debug, Clone, PartialEq)]
pub struct Patch {
    /// Triangles containing the node.
    pub triangles: Vec<usize>,
    /// Largest distance between two vertices of the patch.
    pub diameter: f64,
    /// Mesh edges lying strictly inside the patch (both neighbours in the patch).
    pub interior_edges: Vec<usize>,
    pub neumann_edges: Vec<usize>,
    pub contact_edges: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct PatchTable {
    patches: Vec<Patch>,
}

impl PatchTable {
    pub fn get(&self, node: usize) -> &Patch {
        &self.patches[node]
    }

    pub fn len(&self) -> usize {
        self.patches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patches.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Patch> {
        self.patches.iter()
    }
}

pub fn build_patches(mesh: &Mesh, dofmap: &DofMap) -> PatchTable {
    assert_eq!(
        dofmap.num_nodes(),
        mesh.num_vertices() + mesh.num_edges(),
        "dof map was built on a different mesh"
    );
    let vertex_triangles = mesh.vertex_triangles();
    let mut patches = Vec::with_capacity(dofmap.num_nodes());
    let mut in_patch = vec![false; mesh.num_triangles()];

    for node in 0..dofmap.num_nodes() {
        let mut triangles: Vec<usize> = match dofmap.edge_of(node) {
            None => vertex_triangles[node].clone(),
            Some(e) => mesh
                .edge_triangles(e)
                .into_iter()
                .filter(|&t| t != NO_TRIANGLE)
                .collect(),
        };
        triangles.sort_unstable();
        for &t in &triangles {
            in_patch[t] = true;
        }

        let mut verts: Vec<usize> = triangles.iter().flat_map(|&t| mesh.triangle(t)).collect();
        verts.sort_unstable();
        verts.dedup();
        let mut diameter: f64 = 0.0;
        for (i, &a) in verts.iter().enumerate() {
            for &b in &verts[i + 1..] {
                diameter = diameter.max(distance(mesh.vertex(a), mesh.vertex(b)));
            }
        }

        let mut edges: Vec<usize> = triangles
            .iter()
            .flat_map(|&t| mesh.triangle_edges(t))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        let mut interior_edges = Vec::new();
        let mut neumann_edges = Vec::new();
        let mut contact_edges = Vec::new();
        for e in edges {
            match mesh.boundary_tag(e) {
                Some(BoundaryTag::Neumann) => neumann_edges.push(e),
                Some(BoundaryTag::Contact) => contact_edges.push(e),
                Some(BoundaryTag::Dirichlet) => {}
                None => {
                    let [t0, t1] = mesh.edge_triangles(e);
                    if in_patch[t0] && in_patch[t1] {
                        interior_edges.push(e);
                    }
                }
            }
        }

        for &t in &triangles {
            in_patch[t] = false;
        }
        patches.push(Patch {
            triangles,
            diameter,
            interior_edges,
            neumann_edges,
            contact_edges,
        });
    }
    PatchTable { patches }
}
