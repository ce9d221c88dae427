//! Newest-vertex bisection with recursive closure.

use std::collections::HashMap;

use super::{edge_key, midpoint, BoundaryTag, Mesh};

pub(super) fn refine(mesh: &Mesh, marked: &[usize]) -> Mesh {
    let nt = mesh.num_triangles();
    if marked.is_empty() {
        return mesh.clone();
    }

    // Mark refinement edges, then close: any triangle with a marked edge
    // must also have its refinement edge marked.
    let mut edge_marked = vec![false; mesh.num_edges()];
    let mut worklist = Vec::new();
    for &t in marked {
        assert!(t < nt, "marked triangle {t} out of range ({nt} triangles)");
        let e = mesh.triangle_edges[t][0];
        if !edge_marked[e] {
            edge_marked[e] = true;
            worklist.push(e);
        }
    }
    while let Some(e) = worklist.pop() {
        for t in mesh.edge_triangles[e] {
            if t == super::NO_TRIANGLE {
                continue;
            }
            let r = mesh.triangle_edges[t][0];
            if !edge_marked[r] {
                edge_marked[r] = true;
                worklist.push(r);
            }
        }
    }

    let mut vertices = mesh.vertices.clone();
    let mut mid_of: HashMap<(usize, usize), usize> = HashMap::new();
    for (e, &[a, b]) in mesh.edges.iter().enumerate() {
        if edge_marked[e] {
            vertices.push(midpoint(mesh.vertices[a], mesh.vertices[b]));
            mid_of.insert((a, b), vertices.len() - 1);
        }
    }

    let mut triangles = Vec::with_capacity(nt + 2 * mid_of.len());
    let mut levels = Vec::with_capacity(nt + 2 * mid_of.len());
    let mut stack = Vec::new();
    for t in 0..nt {
        stack.push((mesh.triangles[t], mesh.levels[t]));
        while let Some((tri, level)) = stack.pop() {
            let [p0, p1, p2] = tri;
            match mid_of.get(&edge_key(p1, p2)) {
                Some(&m) => {
                    stack.push(([m, p2, p0], level + 1));
                    stack.push(([m, p0, p1], level + 1));
                }
                None => {
                    debug_assert!(
                        !mid_of.contains_key(&edge_key(p0, p1))
                            && !mid_of.contains_key(&edge_key(p2, p0)),
                        "closure left a marked non-refinement edge"
                    );
                    triangles.push(tri);
                    levels.push(level);
                }
            }
        }
    }

    let mut boundary: Vec<([usize; 2], BoundaryTag)> = Vec::new();
    for (e, tag) in mesh.boundary_edges() {
        let [a, b] = mesh.edges[e];
        match mid_of.get(&(a, b)) {
            Some(&m) => {
                boundary.push(([a, m], tag));
                boundary.push(([m, b], tag));
            }
            None => boundary.push(([a, b], tag)),
        }
    }

    Mesh::new(vertices, triangles, levels, &boundary)
        .expect("bisection of a valid mesh produced an invalid mesh")
}
