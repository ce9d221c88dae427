//! Discrete contact constraints and the primal-dual active-set solver.

mod trace;

use std::io::Write;

use log::debug;
use serde::Serialize;

pub use trace::{ContactTraceMesh, TraceNode};

use crate::error::{Error, Result};
use crate::fem::{DofMap, MaterialLaw, SparseSystem};
use crate::linalg::ReducedSolver;
use crate::mesh::Point;

/// One scalar constraint `sign * u[dof] <= gap`, i.e. `u·n <= χ(p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constraint {
    pub node: usize,
    pub dof: usize,
    pub sign: f64,
    pub gap: f64,
    pub normal: [f64; 2],
}

impl Constraint {
    pub fn normal_displacement(&self, u: &[f64]) -> f64 {
        self.sign * u[self.dof]
    }

    /// Dof of the tangential component.
    pub fn tangential_dof(&self) -> usize {
        self.dof ^ 1
    }

    /// Tangent `(-n_y, n_x)`.
    pub fn tangent(&self) -> [f64; 2] {
        [-self.normal[1], self.normal[0]]
    }
}

/// Constraints in the order of the contact trace nodes.
#[derive(Debug, Clone)]
pub struct ContactConstraints {
    constraints: Vec<Constraint>,
}

impl ContactConstraints {
    /// Samples the gap at the contact nodes; the gap interpolant agrees with `gap` there.
    pub fn new(trace: &ContactTraceMesh, dofmap: &DofMap, gap: impl Fn(Point) -> f64) -> Self {
        let constraints = trace
            .nodes()
            .iter()
            .map(|tn| {
                let c = if tn.normal[0] != 0.0 { 0 } else { 1 };
                Constraint {
                    node: tn.node,
                    dof: 2 * tn.node + c,
                    sign: tn.normal[c],
                    gap: gap(dofmap.coord(tn.node)),
                    normal: tn.normal,
                }
            })
            .collect();
        ContactConstraints { constraints }
    }

    pub fn iter(&self) -> impl Iterator<Item = &Constraint> {
        self.constraints.iter()
    }

    pub fn get(&self, i: usize) -> &Constraint {
        &self.constraints[i]
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn max_abs_gap(&self) -> f64 {
        self.constraints
            .iter()
            .filter(|c| c.gap.is_finite())
            .fold(0.0, |m, c| m.max(c.gap.abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PdasParams {
    /// Complementarity parameter `c > 0` of the active-set update.
    pub c: f64,
    pub max_iter: usize,
}

impl PdasParams {
    /// `c = 2μ + ζ` and at most 100 iterations.
    pub fn for_material(material: &MaterialLaw) -> Self {
        PdasParams {
            c: material.stiffness_scale(),
            max_iter: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub active: usize,
    /// Max norm of the residual on free dofs that are not pinned by the active set.
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct VISolution {
    pub u: Vec<f64>,
    /// Active flags in constraint order.
    pub active: Vec<bool>,
    /// `m_p = (F - K u)·n` at each constrained node.
    pub multipliers: Vec<f64>,
    /// Inactive constraints that are nevertheless satisfied with equality.
    pub degenerate: Vec<usize>,
    pub iterations: usize,
    pub history: Vec<IterationRecord>,
}

impl VISolution {
    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }
}

/// Algebraic residual `F - K u` on free dofs (zero on Dirichlet dofs).
pub fn residual_functional(u: &[f64], system: &SparseSystem) -> Vec<f64> {
    system.residual(u)
}

fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Solves `min ½uᵀKu - Fᵀu` subject to the Dirichlet data and `u·n <= χ`
/// at the contact nodes by a primal-dual active-set iteration started from
/// an empty active set.
pub fn solve_vi(
    system: &SparseSystem,
    constraints: &ContactConstraints,
    params: &PdasParams,
) -> Result<VISolution> {
    if !(params.c > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "PDAS parameter c must be positive, got {}",
            params.c
        )));
    }
    let solver = ReducedSolver::new(&system.stiffness, &system.free_mask())?;
    let dirichlet = system.pinned_dirichlet();
    let m = constraints.len();
    for c in constraints.iter() {
        if system.dirichlet[c.dof] {
            return Err(Error::Contact(format!(
                "contact node {} carries Dirichlet data",
                c.node
            )));
        }
    }

    let mut active = vec![false; m];
    let mut history = Vec::new();
    for iteration in 1..=params.max_iter {
        let mut pinned = dirichlet.clone();
        for (i, c) in constraints.iter().enumerate() {
            if active[i] {
                pinned.push((c.dof, c.sign * c.gap));
            }
        }
        let u = solver.solve(&system.load, &pinned)?;
        let r = system.residual(&u);
        let multipliers: Vec<f64> = constraints.iter().map(|c| c.sign * r[c.dof]).collect();

        let mut is_pinned = system.dirichlet.clone();
        for (i, c) in constraints.iter().enumerate() {
            if active[i] {
                is_pinned[c.dof] = true;
            }
        }
        let residual = max_abs((0..r.len()).filter(|&i| !is_pinned[i]).map(|i| r[i]));
        let active_count = active.iter().filter(|&&a| a).count();
        history.push(IterationRecord {
            iteration,
            active: active_count,
            residual,
        });

        // Noise floor for the update: without it a node with zero multiplier
        // and zero gap can flip on rounding errors and the iteration cycles.
        let u_scale = max_abs(constraints.iter().map(|c| c.normal_displacement(&u)));
        let m_scale = max_abs((0..m).filter(|&i| active[i]).map(|i| multipliers[i]));
        let tol = 1e-12 * (m_scale + params.c * (u_scale + constraints.max_abs_gap()));

        let mut next = vec![false; m];
        for (i, c) in constraints.iter().enumerate() {
            let lambda = if active[i] { multipliers[i] } else { 0.0 };
            next[i] = lambda + params.c * (c.normal_displacement(&u) - c.gap) > tol;
        }
        debug!("PDAS iteration {iteration}: |A| = {active_count}, residual = {residual:e}");

        if next == active {
            let feas_tol = 1e-10 * (u_scale + constraints.max_abs_gap()).max(f64::MIN_POSITIVE);
            let degenerate = (0..m)
                .filter(|&i| {
                    let c = constraints.get(i);
                    !active[i] && (c.normal_displacement(&u) - c.gap).abs() <= feas_tol
                })
                .collect();
            return Ok(VISolution {
                u,
                active,
                multipliers,
                degenerate,
                iterations: iteration,
                history,
            });
        }
        active = next;
    }
    Err(Error::NotConverged {
        iterations: params.max_iter,
        history: history.iter().map(|h| h.active).collect(),
    })
}

/// Writes the iteration history as CSV: `iteration,active,residual`.
pub fn write_trace<W: Write>(history: &[IterationRecord], mut w: W) -> Result<()> {
    writeln!(w, "iteration,active,residual")?;
    for h in history {
        writeln!(w, "{},{},{:e}", h.iteration, h.active, h.residual)?;
    }
    Ok(())
}
