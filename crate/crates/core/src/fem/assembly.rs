//! Global stiffness matrix and load vector.

use std::path::Path;

use super::basis::P2Element;
use super::quadrature::{gauss3_unit, triangle_degree4};
use super::sparse::{write_vector_market, CsrMatrix};
use super::{DofMap, MaterialLaw, NodeClass};
use crate::error::{Error, Result};
use crate::linalg::ReducedSolver;
use crate::mesh::{BoundaryTag, Mesh};
use crate::problem::ProblemSpec;

#[derive(Debug, Clone)]
pub struct SparseSystem {
    /// Full stiffness matrix before any boundary condition is applied.
    pub stiffness: CsrMatrix,
    pub load: Vec<f64>,
    pub dirichlet: Vec<bool>,
    /// Prescribed values on Dirichlet dofs, zero elsewhere.
    pub dirichlet_values: Vec<f64>,
}

impl SparseSystem {
    pub fn num_dofs(&self) -> usize {
        self.load.len()
    }

    pub fn free_mask(&self) -> Vec<bool> {
        self.dirichlet.iter().map(|&d| !d).collect()
    }

    /// `F - K u` on free dofs, zero on Dirichlet dofs.
    pub fn residual(&self, u: &[f64]) -> Vec<f64> {
        let ku = self.stiffness.matvec(u);
        self.load
            .iter()
            .zip(&ku)
            .zip(&self.dirichlet)
            .map(|((f, k), &d)| if d { 0.0 } else { f - k })
            .collect()
    }

    /// `½ uᵀKu - Fᵀu` over all dofs.
    pub fn energy(&self, u: &[f64]) -> f64 {
        let ku = self.stiffness.matvec(u);
        let mut e = 0.0;
        for i in 0..u.len() {
            if !self.dirichlet[i] {
                e += 0.5 * u[i] * ku[i] - self.load[i] * u[i];
            } else {
                e += 0.5 * u[i] * ku[i];
            }
        }
        e
    }

    /// Max norm of the load after lifting the Dirichlet data, `F - K u_D`, on free dofs.
    pub fn effective_load_norm(&self) -> f64 {
        self.residual(&self.dirichlet_values)
            .iter()
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn pinned_dirichlet(&self) -> Vec<(usize, f64)> {
        (0..self.num_dofs())
            .filter(|&i| self.dirichlet[i])
            .map(|i| (i, self.dirichlet_values[i]))
            .collect()
    }

    /// Solves the linear problem ignoring contact constraints.
    pub fn solve_unconstrained(&self) -> Result<Vec<f64>> {
        let solver = ReducedSolver::new(&self.stiffness, &self.free_mask())?;
        solver.solve(&self.load, &self.pinned_dirichlet())
    }

    /// Writes `K.mtx` and `F.mtx` into `dir`.
    pub fn dump_matrix_market(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let k = std::io::BufWriter::new(std::fs::File::create(dir.join("K.mtx"))?);
        self.stiffness.write_matrix_market(k)?;
        let f = std::io::BufWriter::new(std::fs::File::create(dir.join("F.mtx"))?);
        write_vector_market(&self.load, f)
    }
}

fn stiffness_pattern(dofmap: &DofMap, num_triangles: usize) -> CsrMatrix {
    let nn = dofmap.num_nodes();
    let mut neighbours: Vec<Vec<usize>> = vec![Vec::new(); nn];
    for t in 0..num_triangles {
        let nodes = dofmap.triangle_nodes(t);
        for &a in &nodes {
            neighbours[a].extend_from_slice(&nodes);
        }
    }
    let mut rows = Vec::with_capacity(2 * nn);
    for mut nb in neighbours {
        nb.sort_unstable();
        nb.dedup();
        let cols: Vec<usize> = nb.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
        rows.push(cols.clone());
        rows.push(cols);
    }
    CsrMatrix::from_pattern(rows)
}

/// Element stiffness in local dof order `2a + c`.
pub fn element_stiffness(el: &P2Element, material: &MaterialLaw) -> [[f64; 12]; 12] {
    let (mu, zeta) = (material.mu, material.zeta);
    let mut k = [[0.0; 12]; 12];
    for q in triangle_degree4() {
        let g = el.gradients(q.bary);
        let w = q.weight * el.area;
        for a in 0..6 {
            for b in 0..6 {
                let dot = g[a][0] * g[b][0] + g[a][1] * g[b][1];
                for c in 0..2 {
                    for d in 0..2 {
                        let mut v = mu * g[a][d] * g[b][c] + zeta * g[a][c] * g[b][d];
                        if c == d {
                            v += mu * dot;
                        }
                        k[2 * a + c][2 * b + d] += w * v;
                    }
                }
            }
        }
    }
    k
}

pub fn assemble(mesh: &Mesh, dofmap: &DofMap, problem: &ProblemSpec) -> Result<SparseSystem> {
    let material = &problem.material;
    let n = dofmap.num_dofs();
    let mut stiffness = stiffness_pattern(dofmap, mesh.num_triangles());
    let mut load = vec![0.0; n];

    for t in 0..mesh.num_triangles() {
        let el = P2Element::new(mesh.triangle_points(t)).map_err(|e| Error::Assembly {
            triangle: t,
            reason: e.to_string(),
        })?;
        let nodes = dofmap.triangle_nodes(t);
        let ke = element_stiffness(&el, material);
        for a in 0..6 {
            for c in 0..2 {
                let row = 2 * nodes[a] + c;
                for b in 0..6 {
                    for d in 0..2 {
                        stiffness.add(row, 2 * nodes[b] + d, ke[2 * a + c][2 * b + d]);
                    }
                }
            }
        }
        for q in triangle_degree4() {
            let f = (problem.body_force)(el.point(q.bary));
            let phi = P2Element::values(q.bary);
            let w = q.weight * el.area;
            for a in 0..6 {
                load[2 * nodes[a]] += w * f[0] * phi[a];
                load[2 * nodes[a] + 1] += w * f[1] * phi[a];
            }
        }
    }

    for (e, tag) in mesh.boundary_edges() {
        if tag != BoundaryTag::Neumann {
            continue;
        }
        let t = mesh.edge_triangles(e)[0];
        let i = mesh.local_edge(t, e).expect("edge belongs to its triangle");
        let (j, k) = super::basis::opposite(i);
        let el = P2Element::new(mesh.triangle_points(t)).map_err(|err| Error::Assembly {
            triangle: t,
            reason: err.to_string(),
        })?;
        let normal = mesh.outward_normal(t, e);
        let len = mesh.edge_length(e);
        let nodes = dofmap.triangle_nodes(t);
        for &(s, w) in gauss3_unit() {
            let mut l = [0.0; 3];
            l[j] = 1.0 - s;
            l[k] = s;
            let g = (problem.traction)(el.point(l), normal);
            let phi = P2Element::values(l);
            for a in 0..6 {
                load[2 * nodes[a]] += w * len * g[0] * phi[a];
                load[2 * nodes[a] + 1] += w * len * g[1] * phi[a];
            }
        }
    }

    let mut dirichlet = vec![false; n];
    let mut dirichlet_values = vec![0.0; n];
    for p in dofmap.nodes_of_class(NodeClass::Dirichlet) {
        let v = (problem.dirichlet)(dofmap.coord(p));
        for c in 0..2 {
            dirichlet[2 * p + c] = true;
            dirichlet_values[2 * p + c] = v[c];
        }
    }

    Ok(SparseSystem {
        stiffness,
        load,
        dirichlet,
        dirichlet_values,
    })
}
