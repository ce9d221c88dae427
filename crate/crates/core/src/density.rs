//! Discrete contact force density on the contact trace, node classification
//! and the quasi-discrete density obtained from weighted nodal averages.

use std::io::Write;

use serde::Serialize;

use crate::contact::{ContactConstraints, ContactTraceMesh};
use crate::error::{Error, Result};
use crate::fem::quadrature::{gauss3_unit, triangle_degree4};
use crate::fem::{DofMap, NodeClass, P2Element, SparseSystem};
use crate::mesh::{Mesh, PatchTable, Point};

/// Quadratic on `[0, 1]` through `v[0]`, `v[1]`, `v[2]` at `s = 0, ½, 1`.
pub(crate) fn quadratic(v: [f64; 3], s: f64) -> f64 {
    v[0] * (1.0 - s) * (1.0 - 2.0 * s) + 4.0 * v[1] * s * (1.0 - s) + v[2] * s * (2.0 * s - 1.0)
}

/// Interior critical point of the quadratic through `v`, if any.
pub(crate) fn quadratic_vertex(v: [f64; 3]) -> Option<f64> {
    let a = 2.0 * v[0] - 4.0 * v[1] + 2.0 * v[2];
    let b = -3.0 * v[0] + 4.0 * v[1] - v[2];
    if a == 0.0 {
        return None;
    }
    let s = -b / (2.0 * a);
    (s > 0.0 && s < 1.0).then_some(s)
}

fn quadratic_max_abs(v: [f64; 3]) -> f64 {
    let mut m = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(s) = quadratic_vertex(v) {
        m = m.max(quadratic(v, s).abs());
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ContactClass {
    /// `u_n = χ_h` on every contact edge touching the node.
    FullContact,
    /// `u_n = χ_h` at the node only.
    SemiContact,
    NoContact,
}

impl ContactClass {
    pub fn label(self) -> &'static str {
        match self {
            ContactClass::FullContact => "FC",
            ContactClass::SemiContact => "SC",
            ContactClass::NoContact => "NC",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityEntry {
    pub node: usize,
    pub position: Point,
    /// Outward unit normal at the node.
    pub direction: [f64; 2],
    /// Normal density `λ_n(p)`; the pressure on the obstacle.
    pub normal: f64,
    pub tangential: f64,
    /// `∫ ψ_p ds` over all contact edges at the node.
    pub weight: f64,
    pub class: ContactClass,
    /// Contact edge used for the boundary average of the normal component.
    pub averaging_edge: usize,
}

/// Density values in trace-node order.
#[derive(Debug, Clone)]
pub struct DensityField {
    entries: Vec<DensityEntry>,
    position: Vec<Option<usize>>,
}

impl DensityField {
    pub fn entries(&self) -> &[DensityEntry] {
        &self.entries
    }

    pub fn get(&self, node: usize) -> Option<&DensityEntry> {
        self.position
            .get(node)
            .copied()
            .flatten()
            .map(|i| &self.entries[i])
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_normal(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| m.max(e.normal.abs()))
    }

    pub fn max_tangential(&self) -> f64 {
        self.entries
            .iter()
            .fold(0.0, |m, e| m.max(e.tangential.abs()))
    }

    /// Nodal contact forces `λ_n(p) w_p`, equal to the solver multipliers.
    pub fn forces(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|e| e.normal * e.weight)
    }

    /// CSV with columns `node,x,y,class,lambda1,lambda2,weight`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "node,x,y,class,lambda1,lambda2,weight")?;
        for e in &self.entries {
            writeln!(
                w,
                "{},{:e},{:e},{},{:e},{:e},{:e}",
                e.node,
                e.position[0],
                e.position[1],
                e.class.label(),
                e.normal,
                e.tangential,
                e.weight
            )?;
        }
        Ok(())
    }
}

/// Classification tolerance for `u_n = χ_h`.
pub fn equality_tolerance(constraints: &ContactConstraints) -> f64 {
    1e-9 * (1.0 + constraints.max_abs_gap())
}

/// Nodal values of `u_n - χ_h` on the three nodes of a contact edge.
fn edge_defect(
    mesh: &Mesh,
    dofmap: &DofMap,
    trace: &ContactTraceMesh,
    constraints: &ContactConstraints,
    u: &[f64],
    e: usize,
) -> [f64; 3] {
    ContactTraceMesh::edge_nodes(mesh, dofmap, e).map(|p| {
        let c = constraints.get(trace.position(p).expect("edge node on the trace"));
        c.normal_displacement(u) - c.gap
    })
}

/// Classifies each trace node and picks its averaging edge: the adjacent
/// contact edge with the smallest max-norm of `u_n - χ_h`, lower index on ties.
pub fn classify_nodes(
    mesh: &Mesh,
    dofmap: &DofMap,
    trace: &ContactTraceMesh,
    constraints: &ContactConstraints,
    u: &[f64],
) -> Vec<(ContactClass, usize)> {
    let tol = equality_tolerance(constraints);
    trace
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, tn)| {
            let c = constraints.get(i);
            let at_node = (c.normal_displacement(u) - c.gap).abs() <= tol;
            let defects: Vec<(usize, [f64; 3])> = tn
                .edges
                .iter()
                .map(|&e| (e, edge_defect(mesh, dofmap, trace, constraints, u, e)))
                .collect();
            let class = if !at_node {
                ContactClass::NoContact
            } else if defects
                .iter()
                .all(|(_, d)| d.iter().all(|x| x.abs() <= tol))
            {
                ContactClass::FullContact
            } else {
                ContactClass::SemiContact
            };
            let edge = defects
                .iter()
                .map(|&(e, d)| (quadratic_max_abs(d), e))
                .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
                .map(|(_, e)| e)
                .expect("trace node has a contact edge");
            (class, edge)
        })
        .collect()
}

/// `λ(p) = (F - K u)(p) / w_p`, split into normal and tangential parts.
pub fn compute_density(
    mesh: &Mesh,
    dofmap: &DofMap,
    system: &SparseSystem,
    trace: &ContactTraceMesh,
    constraints: &ContactConstraints,
    u: &[f64],
) -> Result<DensityField> {
    let r = system.residual(u);
    let classes = classify_nodes(mesh, dofmap, trace, constraints, u);
    let mut position = vec![None; dofmap.num_nodes()];
    let mut entries = Vec::with_capacity(trace.len());
    for (i, (tn, (class, edge))) in trace.nodes().iter().zip(classes).enumerate() {
        if !(tn.weight > 0.0) {
            return Err(Error::Contact(format!(
                "contact node {} has zero weight",
                tn.node
            )));
        }
        let p = tn.node;
        let n = tn.normal;
        let rp = [r[2 * p], r[2 * p + 1]];
        position[p] = Some(i);
        entries.push(DensityEntry {
            node: p,
            position: dofmap.coord(p),
            direction: n,
            normal: (rp[0] * n[0] + rp[1] * n[1]) / tn.weight,
            tangential: (-rp[0] * n[1] + rp[1] * n[0]) / tn.weight,
            weight: tn.weight,
            class,
            averaging_edge: edge,
        });
    }
    Ok(DensityField { entries, position })
}

/// Nodal averages `e_p` and the quasi-discrete density built from them.
pub struct QuasiDensity<'a> {
    mesh: &'a Mesh,
    dofmap: &'a DofMap,
    patches: &'a PatchTable,
    density: &'a DensityField,
}

impl<'a> QuasiDensity<'a> {
    pub fn new(
        mesh: &'a Mesh,
        dofmap: &'a DofMap,
        patches: &'a PatchTable,
        density: &'a DensityField,
    ) -> Self {
        QuasiDensity {
            mesh,
            dofmap,
            patches,
            density,
        }
    }

    /// `e_p(v)` for the scalar field `v`. The normal component at contact
    /// nodes is averaged over the averaging edge with the trace hat `ψ_p`;
    /// everything else over the patch. Dirichlet nodes give zero.
    pub fn average(&self, node: usize, v: &dyn Fn(Point) -> f64, normal_component: bool) -> f64 {
        match self.dofmap.class(node) {
            NodeClass::Dirichlet => 0.0,
            NodeClass::Contact if normal_component => {
                let entry = self
                    .density
                    .get(node)
                    .expect("contact node has a density entry");
                self.boundary_average(node, entry.averaging_edge, v)
            }
            _ => self.volume_average(node, v),
        }
    }

    /// Average of `v` over the contact edge `e` weighted by the trace hat of `node`.
    pub fn boundary_average(&self, node: usize, e: usize, v: &dyn Fn(Point) -> f64) -> f64 {
        let [a, m, b] = ContactTraceMesh::edge_nodes(self.mesh, self.dofmap, e);
        let xs = [a, m, b].map(|p| self.dofmap.coord(p));
        // Hat values of `node` at the three trace nodes of the edge.
        let hat = [a, m, b].map(|p| if p == node { 1.0 } else { 0.0 });
        let half = 0.5 * self.mesh.edge_length(e);
        let (mut num, mut den) = (0.0, 0.0);
        for k in 0..2 {
            let (x0, x1) = (xs[k], xs[k + 1]);
            for &(s, w) in gauss3_unit() {
                let x = [x0[0] + s * (x1[0] - x0[0]), x0[1] + s * (x1[1] - x0[1])];
                let psi = (1.0 - s) * hat[k] + s * hat[k + 1];
                num += w * half * psi * v(x);
                den += w * half * psi;
            }
        }
        num / den
    }

    /// Patch average of `v` weighted by the P2 basis function of a midpoint
    /// node, or by the piecewise-linear hat of a vertex node. The quadratic
    /// vertex basis function has zero mean on every triangle, so it cannot
    /// serve as a weight.
    pub fn volume_average(&self, node: usize, v: &dyn Fn(Point) -> f64) -> f64 {
        let (mut num, mut den) = (0.0, 0.0);
        for &t in &self.patches.get(node).triangles {
            let el =
                P2Element::new(self.mesh.triangle_points(t)).expect("mesh triangles are valid");
            let nodes = self.dofmap.triangle_nodes(t);
            let a = nodes
                .iter()
                .position(|&q| q == node)
                .expect("node lies on its patch");
            for q in triangle_degree4() {
                let weight = if a < 3 {
                    q.bary[a]
                } else {
                    P2Element::values(q.bary)[a]
                };
                let w = q.weight * el.area * weight;
                num += w * v(el.point(q.bary));
                den += w;
            }
        }
        num / den
    }

    /// `⟨λ̄_h, v⟩ = Σ_p λ_n(p) e_p(v·n) w_p` over the contact nodes.
    pub fn apply(&self, v: &dyn Fn(Point) -> [f64; 2]) -> f64 {
        self.density
            .entries()
            .iter()
            .map(|e| {
                let n = e.direction;
                let vn = |x: Point| {
                    let y = v(x);
                    y[0] * n[0] + y[1] * n[1]
                };
                e.normal * self.average(e.node, &vn, true) * e.weight
            })
            .sum()
    }
}
