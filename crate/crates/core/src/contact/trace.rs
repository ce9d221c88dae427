//! The contact boundary as a 1D mesh split at edge midpoints.

use crate::error::{Error, Result};
use crate::fem::{DofMap, NodeClass};
use crate::mesh::{BoundaryTag, Mesh};

#[derive(Debug, Clone, PartialEq)]
pub struct TraceNode {
    pub node: usize,
    /// Contact edges containing the node: one for midpoints and chain ends, two otherwise.
    pub edges: Vec<usize>,
    /// Integral of the piecewise-linear hat of the node over the split trace mesh.
    pub weight: f64,
    /// Outward unit normal, axis-aligned.
    pub normal: [f64; 2],
}

#[derive(Debug, Clone)]
pub struct ContactTraceMesh {
    nodes: Vec<TraceNode>,
    position: Vec<Option<usize>>,
    edges: Vec<usize>,
    chains: Vec<Vec<usize>>,
    edge_normals: Vec<[f64; 2]>,
}

fn axis_normal(n: [f64; 2], e: usize) -> Result<[f64; 2]> {
    let c = if n[0].abs() >= n[1].abs() { 0 } else { 1 };
    if (n[c].abs() - 1.0).abs() > 1e-12 || n[1 - c].abs() > 1e-12 {
        return Err(Error::Unsupported(format!(
            "contact edge {e} has oblique normal ({}, {})",
            n[0], n[1]
        )));
    }
    let mut out = [0.0; 2];
    out[c] = n[c].signum();
    Ok(out)
}

impl ContactTraceMesh {
    pub fn new(mesh: &Mesh, dofmap: &DofMap) -> Result<Self> {
        let mut edges: Vec<usize> = mesh
            .boundary_edges()
            .filter(|&(_, tag)| tag == BoundaryTag::Contact)
            .map(|(e, _)| e)
            .collect();
        if edges.is_empty() {
            return Err(Error::Contact("mesh has no contact edges".into()));
        }
        edges.sort_unstable();
        let mut edge_normals = Vec::with_capacity(edges.len());
        for &e in &edges {
            let t = mesh.edge_triangles(e)[0];
            edge_normals.push(axis_normal(mesh.outward_normal(t, e), e)?);
        }

        let nn = dofmap.num_nodes();
        let mut vertex_edges: Vec<Vec<usize>> = vec![Vec::new(); mesh.num_vertices()];
        for (k, &e) in edges.iter().enumerate() {
            for v in mesh.edge(e) {
                vertex_edges[v].push(k);
            }
        }

        let mut nodes = Vec::new();
        let mut position = vec![None; nn];
        for p in dofmap.nodes_of_class(NodeClass::Contact) {
            let local: Vec<usize> = match dofmap.edge_of(p) {
                Some(e) => vec![edges.binary_search(&e).map_err(|_| {
                    Error::Contact(format!("contact midpoint {p} is not on a contact edge"))
                })?],
                None => vertex_edges[p].clone(),
            };
            if local.is_empty() {
                return Err(Error::Contact(format!(
                    "contact node {p} has no contact edge"
                )));
            }
            let normal = edge_normals[local[0]];
            if local.iter().any(|&k| edge_normals[k] != normal) {
                return Err(Error::Contact(format!(
                    "contact vertex {p} joins edges with different normals"
                )));
            }
            let weight = match dofmap.edge_of(p) {
                Some(e) => 0.5 * mesh.edge_length(e),
                None => local
                    .iter()
                    .map(|&k| 0.25 * mesh.edge_length(edges[k]))
                    .sum(),
            };
            position[p] = Some(nodes.len());
            nodes.push(TraceNode {
                node: p,
                edges: local.iter().map(|&k| edges[k]).collect(),
                weight,
                normal,
            });
        }

        let chains = Self::order_chains(mesh, &edges, &vertex_edges);
        Ok(ContactTraceMesh {
            nodes,
            position,
            edges,
            chains,
            edge_normals,
        })
    }

    /// Orders the contact edges into connected chains, starting from chain ends.
    fn order_chains(mesh: &Mesh, edges: &[usize], vertex_edges: &[Vec<usize>]) -> Vec<Vec<usize>> {
        let mut used = vec![false; edges.len()];
        let mut chains = Vec::new();
        let mut starts: Vec<usize> = (0..vertex_edges.len())
            .filter(|&v| vertex_edges[v].len() == 1)
            .collect();
        // Closed contact loops have no ends; start them anywhere.
        starts.extend((0..vertex_edges.len()).filter(|&v| vertex_edges[v].len() == 2));
        for start in starts {
            let mut v = start;
            let mut chain = Vec::new();
            while let Some(&k) = vertex_edges[v].iter().find(|&&k| !used[k]) {
                used[k] = true;
                chain.push(edges[k]);
                let [a, b] = mesh.edge(edges[k]);
                v = if a == v { b } else { a };
            }
            if !chain.is_empty() {
                chains.push(chain);
            }
        }
        chains
    }

    pub fn nodes(&self) -> &[TraceNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Index into [`nodes`](Self::nodes) of a global node, if it is a contact node.
    pub fn position(&self, node: usize) -> Option<usize> {
        self.position[node]
    }

    /// Contact edges in ascending order.
    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    /// P2 nodes of a contact edge in trace order: start vertex, midpoint, end vertex.
    pub fn edge_nodes(mesh: &Mesh, dofmap: &DofMap, e: usize) -> [usize; 3] {
        let [a, b] = mesh.edge(e);
        [a, dofmap.edge_node(e), b]
    }

    pub fn edge_normal(&self, e: usize) -> [f64; 2] {
        let k = self.edges.binary_search(&e).expect("not a contact edge");
        self.edge_normals[k]
    }

    /// Connected components of the contact boundary as ordered edge lists.
    pub fn chains(&self) -> &[Vec<usize>] {
        &self.chains
    }

    pub fn total_length(&self, mesh: &Mesh) -> f64 {
        self.edges.iter().map(|&e| mesh.edge_length(e)).sum()
    }
}
