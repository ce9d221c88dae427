//! Quadratic Lagrange basis on an affine triangle.
//!
//! Local nodes 0..3 are the vertices; node `3 + i` is the midpoint of the
//! edge opposite vertex `i`.

use crate::error::{Error, Result};
use crate::mesh::{signed_area, Point};

#[derive(Debug, Clone, Copy)]
pub struct P2Element {
    pub points: [Point; 3],
    pub area: f64,
    /// Constant gradients of the barycentric coordinates.
    pub bary_grads: [[f64; 2]; 3],
}

/// Vertex pair spanning the edge opposite local vertex `i`.
#[inline]
pub fn opposite(i: usize) -> (usize, usize) {
    ((i + 1) % 3, (i + 2) % 3)
}

impl P2Element {
    pub fn new(points: [Point; 3]) -> Result<Self> {
        let area = signed_area(points[0], points[1], points[2]);
        if !(area > 0.0) {
            return Err(Error::InvalidMesh(format!(
                "degenerate triangle with area {area:e}"
            )));
        }
        let mut bary_grads = [[0.0; 2]; 3];
        for (i, g) in bary_grads.iter_mut().enumerate() {
            let (j, k) = opposite(i);
            let (pj, pk) = (points[j], points[k]);
            *g = [
                (pj[1] - pk[1]) / (2.0 * area),
                (pk[0] - pj[0]) / (2.0 * area),
            ];
        }
        Ok(P2Element {
            points,
            area,
            bary_grads,
        })
    }

    pub fn point(&self, l: [f64; 3]) -> Point {
        let p = &self.points;
        [
            l[0] * p[0][0] + l[1] * p[1][0] + l[2] * p[2][0],
            l[0] * p[0][1] + l[1] * p[1][1] + l[2] * p[2][1],
        ]
    }

    /// Barycentric coordinates of a physical point.
    pub fn bary(&self, x: Point) -> [f64; 3] {
        let p = &self.points;
        let l1 = signed_area(p[0], x, p[2]) / self.area;
        let l2 = signed_area(p[0], p[1], x) / self.area;
        [1.0 - l1 - l2, l1, l2]
    }

    pub fn values(l: [f64; 3]) -> [f64; 6] {
        let mut v = [0.0; 6];
        for i in 0..3 {
            let (j, k) = opposite(i);
            v[i] = l[i] * (2.0 * l[i] - 1.0);
            v[3 + i] = 4.0 * l[j] * l[k];
        }
        v
    }

    pub fn gradients(&self, l: [f64; 3]) -> [[f64; 2]; 6] {
        let g = &self.bary_grads;
        let mut out = [[0.0; 2]; 6];
        for i in 0..3 {
            let (j, k) = opposite(i);
            for d in 0..2 {
                out[i][d] = (4.0 * l[i] - 1.0) * g[i][d];
                out[3 + i][d] = 4.0 * (l[j] * g[k][d] + l[k] * g[j][d]);
            }
        }
        out
    }

    /// Constant second derivatives `h[a][d][e] = ∂_d ∂_e φ_a`.
    pub fn hessians(&self) -> [[[f64; 2]; 2]; 6] {
        let g = &self.bary_grads;
        let mut out = [[[0.0; 2]; 2]; 6];
        for i in 0..3 {
            let (j, k) = opposite(i);
            for d in 0..2 {
                for e in 0..2 {
                    out[i][d][e] = 4.0 * g[i][d] * g[i][e];
                    out[3 + i][d][e] = 4.0 * (g[j][d] * g[k][e] + g[k][d] * g[j][e]);
                }
            }
        }
        out
    }

    /// Barycentric coordinates of the six local nodes.
    pub fn node_bary(a: usize) -> [f64; 3] {
        let mut l = [0.0; 3];
        if a < 3 {
            l[a] = 1.0;
        } else {
            let (j, k) = opposite(a - 3);
            l[j] = 0.5;
            l[k] = 0.5;
        }
        l
    }

    /// Displacement gradient `g[c][d] = ∂_d u_c` from local coefficients
    /// `coeffs[a] = (u_1, u_2)` at local node `a`.
    pub fn displacement_gradient(&self, coeffs: &[[f64; 2]; 6], l: [f64; 3]) -> [[f64; 2]; 2] {
        let grads = self.gradients(l);
        let mut g = [[0.0; 2]; 2];
        for a in 0..6 {
            for c in 0..2 {
                for d in 0..2 {
                    g[c][d] += coeffs[a][c] * grads[a][d];
                }
            }
        }
        g
    }

    pub fn displacement(coeffs: &[[f64; 2]; 6], l: [f64; 3]) -> [f64; 2] {
        let v = Self::values(l);
        let mut u = [0.0; 2];
        for a in 0..6 {
            u[0] += coeffs[a][0] * v[a];
            u[1] += coeffs[a][1] * v[a];
        }
        u
    }
}
