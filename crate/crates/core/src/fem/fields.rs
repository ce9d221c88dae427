//! Post-processed element fields of a P2 displacement: stress, tractions
//! and the interior residual `f + div σ`.

use super::basis::P2Element;
use super::{DofMap, MaterialLaw};
use crate::error::Result;
use crate::mesh::{Mesh, Point};

pub type Tensor = [[f64; 2]; 2];

/// Per-element stress of a P2 displacement. The stress is affine on each
/// triangle, so it is stored by its vertex values; its divergence is constant.
#[derive(Debug, Clone)]
pub struct StressField {
    elements: Vec<P2Element>,
    vertex_stress: Vec<[Tensor; 3]>,
    divergence: Vec<[f64; 2]>,
}

pub fn apply(s: &Tensor, n: [f64; 2]) -> [f64; 2] {
    [
        s[0][0] * n[0] + s[0][1] * n[1],
        s[1][0] * n[0] + s[1][1] * n[1],
    ]
}

impl StressField {
    pub fn new(mesh: &Mesh, dofmap: &DofMap, material: &MaterialLaw, u: &[f64]) -> Result<Self> {
        let nt = mesh.num_triangles();
        let mut elements = Vec::with_capacity(nt);
        let mut vertex_stress = Vec::with_capacity(nt);
        let mut divergence = Vec::with_capacity(nt);
        for t in 0..nt {
            let el = P2Element::new(mesh.triangle_points(t))?;
            let coeffs = dofmap.local_coeffs(t, u);
            let mut sv = [[[0.0; 2]; 2]; 3];
            for (i, s) in sv.iter_mut().enumerate() {
                let g = el.displacement_gradient(&coeffs, P2Element::node_bary(i));
                *s = material.stress(&g);
            }
            let hess = el.hessians();
            let mut h = [[[0.0; 2]; 2]; 2];
            for a in 0..6 {
                for c in 0..2 {
                    for d in 0..2 {
                        for e in 0..2 {
                            h[c][d][e] += coeffs[a][c] * hess[a][d][e];
                        }
                    }
                }
            }
            elements.push(el);
            vertex_stress.push(sv);
            divergence.push(material.stress_divergence(&h));
        }
        Ok(StressField {
            elements,
            vertex_stress,
            divergence,
        })
    }

    pub fn element(&self, t: usize) -> &P2Element {
        &self.elements[t]
    }

    pub fn stress(&self, t: usize, l: [f64; 3]) -> Tensor {
        let sv = &self.vertex_stress[t];
        let mut s = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                s[i][j] = l[0] * sv[0][i][j] + l[1] * sv[1][i][j] + l[2] * sv[2][i][j];
            }
        }
        s
    }

    pub fn stress_at(&self, t: usize, x: Point) -> Tensor {
        self.stress(t, self.elements[t].bary(x))
    }

    /// Constant `div σ(u_h)` on triangle `t`.
    pub fn divergence(&self, t: usize) -> [f64; 2] {
        self.divergence[t]
    }

    /// `σ(u_h)|_t n` at a point of edge `e`, with `n` the outward normal of `t`.
    pub fn traction(&self, mesh: &Mesh, t: usize, e: usize, x: Point) -> [f64; 2] {
        apply(&self.stress_at(t, x), mesh.outward_normal(t, e))
    }

    /// Interior residual `f + div σ(u_h)` at a point of triangle `t`.
    pub fn interior_residual(&self, t: usize, f: [f64; 2]) -> [f64; 2] {
        let d = self.divergence[t];
        [f[0] + d[0], f[1] + d[1]]
    }
}
