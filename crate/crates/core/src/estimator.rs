//! Pointwise a posteriori error estimator in the maximum norm.
//!
//! All norms are evaluated as maxima over finite sample sets: vertices,
//! midpoints and quadrature points on triangles; endpoints, midpoint, Gauss
//! points and a uniform lattice on edges. Stresses of a P2 field are affine,
//! so these samples capture the extrema of every residual except data terms.

use serde::Serialize;

use crate::contact::{ContactConstraints, ContactTraceMesh};
use crate::density::{quadratic, ContactClass, DensityField};
use crate::error::{Error, Result};
use crate::fem::quadrature::{gauss3_unit, triangle_degree4};
use crate::fem::{apply, DofMap, NodeClass, P2Element, StressField};
use crate::mesh::{BoundaryTag, Mesh, PatchTable, Point, NO_TRIANGLE};
use crate::problem::ProblemSpec;

/// Calibration constant applied to the whole estimator.
pub const DEFAULT_C0: f64 = 0.45;

fn norm_inf(v: [f64; 2]) -> f64 {
    v[0].abs().max(v[1].abs())
}

fn lerp(a: Point, b: Point, s: f64) -> Point {
    [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
}

/// Edge parameters: endpoints, midpoint, 3 Gauss points and 21 uniform points.
fn edge_samples() -> impl Iterator<Item = f64> {
    [0.0, 0.5, 1.0]
        .into_iter()
        .chain(gauss3_unit().iter().map(|&(s, _)| s))
        .chain((0..=20).map(|k| k as f64 / 20.0))
}

/// Barycentric sample points of a triangle: vertices, midpoints, quadrature points.
fn triangle_samples() -> impl Iterator<Item = [f64; 3]> {
    (0..6)
        .map(P2Element::node_bary)
        .chain(triangle_degree4().iter().map(|q| q.bary))
}

/// `l_h = 1 + (ln h_min)²`.
pub fn log_factor(h_min: f64) -> f64 {
    1.0 + h_min.ln().powi(2)
}

/// `η_h = C₀ (l_h Ψ + η₆ + η₇)`.
pub fn total(lh: f64, psi: f64, eta6: f64, eta7: f64, c0: f64) -> f64 {
    c0 * (lh * psi + eta6 + eta7)
}

#[derive(Debug, Clone, Serialize)]
pub struct EstimatorReport {
    /// `[η₁, …, η₅]` per node; zero where a term is not defined for the node's class.
    pub patch: Vec<[f64; 5]>,
    pub eta: [f64; 5],
    pub psi: f64,
    pub h_min: f64,
    pub lh: f64,
    /// Penetration `max (u_n - χ)⁺` over the contact boundary.
    pub eta6: f64,
    /// Gap `max (χ - u_n)⁺` over the active region.
    pub eta7: f64,
    pub c0: f64,
    pub eta_h: f64,
    /// Contact edges forming the active region, ascending.
    pub active_region: Vec<usize>,
    /// Per-triangle marking indicator.
    pub indicators: Vec<f64>,
    pub osc_f: Vec<f64>,
    pub osc_g: Vec<f64>,
}

impl EstimatorReport {
    pub fn osc_f_max(&self) -> f64 {
        self.osc_f.iter().fold(0.0, |m, &v| m.max(v))
    }

    pub fn osc_g_max(&self) -> f64 {
        self.osc_g.iter().fold(0.0, |m, &v| m.max(v))
    }
}

pub struct EstimatorInput<'a> {
    pub mesh: &'a Mesh,
    pub dofmap: &'a DofMap,
    pub patches: &'a PatchTable,
    pub trace: &'a ContactTraceMesh,
    pub constraints: &'a ContactConstraints,
    pub density: &'a DensityField,
    pub problem: &'a ProblemSpec,
    pub u: &'a [f64],
}

/// `max |f + div σ(u_h)|` on each triangle.
pub fn element_residuals(mesh: &Mesh, stress: &StressField, problem: &ProblemSpec) -> Vec<f64> {
    (0..mesh.num_triangles())
        .map(|t| {
            let el = stress.element(t);
            triangle_samples()
                .map(|l| norm_inf(stress.interior_residual(t, (problem.body_force)(el.point(l)))))
                .fold(0.0, f64::max)
        })
        .collect()
}

/// Max traction jump across each interior edge; zero on boundary edges.
pub fn interior_jumps(mesh: &Mesh, stress: &StressField) -> Vec<f64> {
    (0..mesh.num_edges())
        .map(|e| {
            let [t0, t1] = mesh.edge_triangles(e);
            if t1 == NO_TRIANGLE {
                return 0.0;
            }
            let [a, b] = mesh.edge(e);
            let (xa, xb) = (mesh.vertex(a), mesh.vertex(b));
            // The jump is affine along the edge.
            [0.0, 0.5, 1.0]
                .into_iter()
                .map(|s| {
                    let x = lerp(xa, xb, s);
                    let j0 = stress.traction(mesh, t0, e, x);
                    let j1 = stress.traction(mesh, t1, e, x);
                    norm_inf([j0[0] + j1[0], j0[1] + j1[1]])
                })
                .fold(0.0, f64::max)
        })
        .collect()
}

/// Max of `|g - σ(u_h) n|` on each Neumann edge; zero elsewhere.
pub fn neumann_residuals(mesh: &Mesh, stress: &StressField, problem: &ProblemSpec) -> Vec<f64> {
    boundary_edge_map(mesh, BoundaryTag::Neumann, |e, t, x, n| {
        let g = (problem.traction)(x, n);
        let s = stress.traction(mesh, t, e, x);
        norm_inf([g[0] - s[0], g[1] - s[1]])
    })
}

/// Max tangential and normal traction `(|σ̂_τ|, |σ̂_n|)` on each contact edge.
pub fn contact_tractions(mesh: &Mesh, stress: &StressField) -> (Vec<f64>, Vec<f64>) {
    let tangential = boundary_edge_map(mesh, BoundaryTag::Contact, |_, t, x, n| {
        let s = apply(&stress.stress_at(t, x), n);
        (-s[0] * n[1] + s[1] * n[0]).abs()
    });
    let normal = boundary_edge_map(mesh, BoundaryTag::Contact, |_, t, x, n| {
        let s = apply(&stress.stress_at(t, x), n);
        (s[0] * n[0] + s[1] * n[1]).abs()
    });
    (tangential, normal)
}

/// Max of `value(e, t, x, n)` over the edge samples of every boundary edge
/// carrying `tag`, with `t` the adjacent triangle and `n` its outward normal.
fn boundary_edge_map(
    mesh: &Mesh,
    tag: BoundaryTag,
    value: impl Fn(usize, usize, Point, [f64; 2]) -> f64,
) -> Vec<f64> {
    let mut out = vec![0.0; mesh.num_edges()];
    for (e, et) in mesh.boundary_edges() {
        if et != tag {
            continue;
        }
        let t = mesh.edge_triangles(e)[0];
        let n = mesh.outward_normal(t, e);
        let [a, b] = mesh.edge(e);
        let (xa, xb) = (mesh.vertex(a), mesh.vertex(b));
        out[e] = edge_samples()
            .map(|s| value(e, t, lerp(xa, xb, s), n))
            .fold(0.0, f64::max);
    }
    out
}

/// Per contact edge: `max (u_n - χ)⁺` and `max (χ - u_n)⁺`, indexed like
/// [`ContactTraceMesh::edges`]. Besides the edge samples, the critical point
/// of `u_n` minus the linear interpolant of `χ` is checked on both halves of
/// each edge, which makes the maxima exact for piecewise-linear obstacles.
pub fn obstacle_defects(input: &EstimatorInput) -> Vec<(f64, f64)> {
    let (mesh, dofmap, trace) = (input.mesh, input.dofmap, input.trace);
    let gap = &input.problem.gap;
    trace
        .edges()
        .iter()
        .map(|&e| {
            let nodes = ContactTraceMesh::edge_nodes(mesh, dofmap, e);
            let un = nodes.map(|p| {
                let c = input
                    .constraints
                    .get(trace.position(p).expect("edge node on the trace"));
                c.normal_displacement(input.u)
            });
            let [xa, xb] = [dofmap.coord(nodes[0]), dofmap.coord(nodes[2])];
            let mut params: Vec<f64> = edge_samples().collect();
            for (s0, s1) in [(0.0, 0.5), (0.5, 1.0)] {
                let (c0, c1) = (gap(lerp(xa, xb, s0)), gap(lerp(xa, xb, s1)));
                let slope = (c1 - c0) / (s1 - s0);
                // u_n(s) = A s² + B s + C
                let a = 2.0 * un[0] - 4.0 * un[1] + 2.0 * un[2];
                let b = -3.0 * un[0] + 4.0 * un[1] - un[2];
                if a != 0.0 {
                    let s = (slope - b) / (2.0 * a);
                    if s > s0 && s < s1 {
                        params.push(s);
                    }
                }
            }
            let mut pen: f64 = 0.0;
            let mut gapv: f64 = 0.0;
            for s in params {
                let d = quadratic(un, s) - gap(lerp(xa, xb, s));
                // Explicit comparisons keep the result at +0 when d is -0.
                if d > pen {
                    pen = d;
                }
                if -d > gapv {
                    gapv = -d;
                }
            }
            (pen, gapv)
        })
        .collect()
}

/// Element-average oscillation of `f` per triangle and of `g` per Neumann edge.
fn data_oscillations(mesh: &Mesh, problem: &ProblemSpec) -> (Vec<f64>, Vec<f64>) {
    let osc_f = (0..mesh.num_triangles())
        .map(|t| {
            let el = P2Element::new(mesh.triangle_points(t)).expect("mesh triangles are valid");
            let mut mean = [0.0; 2];
            for q in triangle_degree4() {
                let f = (problem.body_force)(el.point(q.bary));
                mean[0] += q.weight * f[0];
                mean[1] += q.weight * f[1];
            }
            triangle_samples()
                .map(|l| {
                    let f = (problem.body_force)(el.point(l));
                    norm_inf([f[0] - mean[0], f[1] - mean[1]])
                })
                .fold(0.0, f64::max)
        })
        .collect();
    let mut osc_g = vec![0.0; mesh.num_edges()];
    for (e, tag) in mesh.boundary_edges() {
        if tag != BoundaryTag::Neumann {
            continue;
        }
        let t = mesh.edge_triangles(e)[0];
        let n = mesh.outward_normal(t, e);
        let [a, b] = mesh.edge(e);
        let (xa, xb) = (mesh.vertex(a), mesh.vertex(b));
        let mut mean = [0.0; 2];
        for &(s, w) in gauss3_unit() {
            let g = (problem.traction)(lerp(xa, xb, s), n);
            mean[0] += w * g[0];
            mean[1] += w * g[1];
        }
        osc_g[e] = edge_samples()
            .map(|s| {
                let g = (problem.traction)(lerp(xa, xb, s), n);
                norm_inf([g[0] - mean[0], g[1] - mean[1]])
            })
            .fold(0.0, f64::max);
    }
    (osc_f, osc_g)
}

fn max_over(values: &[f64], items: &[usize]) -> f64 {
    items.iter().fold(0.0, |m, &i| m.max(values[i]))
}

pub fn estimate(input: &EstimatorInput, c0: f64) -> Result<EstimatorReport> {
    if !(c0 > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "C0 must be positive, got {c0}"
        )));
    }
    let (mesh, dofmap, patches) = (input.mesh, input.dofmap, input.patches);
    let stress = StressField::new(mesh, dofmap, &input.problem.material, input.u)?;
    let residual = element_residuals(mesh, &stress, input.problem);
    let jumps = interior_jumps(mesh, &stress);
    let neumann = neumann_residuals(mesh, &stress, input.problem);
    let (tangential, normal) = contact_tractions(mesh, &stress);
    let (osc_f_t, osc_g_e) = data_oscillations(mesh, input.problem);

    // Active region: contact edges of touching nodes carrying a positive
    // force. Without the touching test, rounding noise in an inactive
    // solution would pass the relative tolerance.
    let forces: Vec<f64> = input.density.forces().collect();
    let force_tol = 1e-10 * forces.iter().fold(0.0f64, |m, f| m.max(f.abs()));
    let mut in_region = vec![false; mesh.num_edges()];
    for (entry, &force) in input.density.entries().iter().zip(&forces) {
        if force > force_tol && entry.class != ContactClass::NoContact {
            for &e in &patches.get(entry.node).contact_edges {
                in_region[e] = true;
            }
        }
    }
    let active_region: Vec<usize> = (0..mesh.num_edges()).filter(|&e| in_region[e]).collect();

    let mut penetration = vec![0.0; mesh.num_edges()];
    let mut gap = vec![0.0; mesh.num_edges()];
    for (&e, (pen, g)) in input.trace.edges().iter().zip(obstacle_defects(input)) {
        penetration[e] = pen;
        if in_region[e] {
            gap[e] = g;
        }
    }
    let eta6 = input
        .trace
        .edges()
        .iter()
        .fold(0.0f64, |m, &e| m.max(penetration[e]));
    let eta7 = active_region.iter().fold(0.0f64, |m, &e| m.max(gap[e]));

    let nn = dofmap.num_nodes();
    let mut patch_eta = vec![[0.0; 5]; nn];
    let mut consistency = vec![0.0; nn];
    let mut osc_f = vec![0.0; nn];
    let mut osc_g = vec![0.0; nn];
    for p in 0..nn {
        let patch = patches.get(p);
        let h = patch.diameter;
        let class = dofmap.class(p);
        let eta = &mut patch_eta[p];
        eta[0] = h * h * max_over(&residual, &patch.triangles);
        eta[1] = h * max_over(&jumps, &patch.interior_edges);
        if class == NodeClass::Neumann {
            eta[2] = h * max_over(&neumann, &patch.neumann_edges);
        }
        if class == NodeClass::Contact {
            eta[3] = h * max_over(&tangential, &patch.contact_edges);
            eta[4] = h * max_over(&normal, &patch.contact_edges);
        }
        consistency[p] =
            max_over(&penetration, &patch.contact_edges) + max_over(&gap, &patch.contact_edges);
        osc_f[p] = h * h * max_over(&osc_f_t, &patch.triangles);
        osc_g[p] = h * max_over(&osc_g_e, &patch.neumann_edges);
    }

    let mut eta = [0.0f64; 5];
    for pe in &patch_eta {
        for i in 0..5 {
            eta[i] = eta[i].max(pe[i]);
        }
    }
    let psi: f64 = eta.iter().sum();
    let h_min = mesh.min_diameter();
    let lh = log_factor(h_min);
    let eta_h = total(lh, psi, eta6, eta7, c0);

    let node_total: Vec<f64> = (0..nn)
        .map(|p| c0 * (lh * patch_eta[p].iter().sum::<f64>() + consistency[p]))
        .collect();
    let indicators = (0..mesh.num_triangles())
        .map(|t| {
            dofmap
                .triangle_nodes(t)
                .iter()
                .fold(0.0f64, |m, &p| m.max(node_total[p]))
        })
        .collect();

    Ok(EstimatorReport {
        patch: patch_eta,
        eta,
        psi,
        h_min,
        lh,
        eta6,
        eta7,
        c0,
        eta_h,
        active_region,
        indicators,
        osc_f,
        osc_g,
    })
}
