//! The SOLVE → ESTIMATE → MARK → REFINE loop, error measurement against
//! exact solutions and per-level file output.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::info;
use serde::{Deserialize, Serialize};

use crate::contact::{
    solve_vi, write_trace, ContactConstraints, ContactTraceMesh, PdasParams, VISolution,
};
use crate::density::{compute_density, DensityField};
use crate::error::{Error, Result};
use crate::estimator::{estimate, EstimatorInput, EstimatorReport, DEFAULT_C0};
use crate::fem::{assemble, DofMap, P2Element, SparseSystem};
use crate::mesh::{build_patches, write_vtk, Mesh, PatchTable, VtkField};
use crate::problem::{ExactSolution, ProblemSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptParams {
    /// Number of levels including the initial mesh.
    pub levels: usize,
    /// Maximum-marking fraction in `(0, 1]`.
    pub theta: f64,
    pub c0: f64,
    /// Active-set parameter; `None` uses `2μ + ζ`.
    pub pdas_c: Option<f64>,
    pub max_pdas_iter: usize,
    /// Cells per side of the initial mesh.
    pub n0: usize,
    /// Refine every triangle instead of marking.
    pub uniform: bool,
}

impl Default for AdaptParams {
    fn default() -> Self {
        AdaptParams {
            levels: 12,
            theta: 0.5,
            c0: DEFAULT_C0,
            pdas_c: None,
            max_pdas_iter: 100,
            n0: 4,
            uniform: false,
        }
    }
}

impl AdaptParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.levels == 0 {
            return bad("at least one level is required".into());
        }
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return bad(format!("theta must lie in (0, 1], got {}", self.theta));
        }
        if !(self.c0 > 0.0) {
            return bad(format!("C0 must be positive, got {}", self.c0));
        }
        if let Some(c) = self.pdas_c {
            if !(c > 0.0) {
                return bad(format!("PDAS parameter must be positive, got {c}"));
            }
        }
        if self.n0 == 0 {
            return bad("initial mesh needs at least one cell per side".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelRecord {
    pub level: usize,
    pub ndof: usize,
    pub h_min: f64,
    pub lh: f64,
    pub eta: [f64; 5],
    pub eta6: f64,
    pub eta7: f64,
    pub psi: f64,
    pub eta_h: f64,
    pub osc_f: f64,
    pub osc_g: f64,
    pub err_inf: Option<f64>,
    pub eff_index: Option<f64>,
    pub active_nodes: usize,
    pub pdas_iterations: usize,
    pub marked: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct AdaptiveTrace {
    pub levels: Vec<LevelRecord>,
}

/// Everything computed on one level, handed to the observer of [`adapt`].
pub struct Level<'a> {
    pub mesh: &'a Mesh,
    pub dofmap: &'a DofMap,
    pub patches: &'a PatchTable,
    pub system: &'a SparseSystem,
    pub trace: &'a ContactTraceMesh,
    pub constraints: &'a ContactConstraints,
    pub solution: &'a VISolution,
    pub density: &'a DensityField,
    pub report: &'a EstimatorReport,
    /// Triangles selected for refinement (also filled on the last level).
    pub marked: &'a [usize],
    pub record: &'a LevelRecord,
}

#[derive(Debug, thiserror::Error)]
#[error("adaptive loop failed on level {level}: {source}")]
pub struct AdaptFailure {
    pub level: usize,
    /// Rows of the levels completed before the failure.
    pub trace: AdaptiveTrace,
    #[source]
    pub source: Error,
}

/// Maximum marking: `{T : η_T ≥ θ max η}`. If every indicator vanishes the
/// largest triangle (lowest index on ties) is marked so refinement progresses.
pub fn mark(indicators: &[f64], theta: f64, areas: &[f64]) -> Result<Vec<usize>> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "theta must lie in (0, 1], got {theta}"
        )));
    }
    if indicators.is_empty() {
        return Ok(Vec::new());
    }
    let max = indicators.iter().fold(0.0f64, |m, &v| m.max(v));
    if max > 0.0 {
        let bound = theta * max;
        return Ok((0..indicators.len())
            .filter(|&t| indicators[t] >= bound)
            .collect());
    }
    let largest = (0..areas.len())
        .max_by(|&a, &b| areas[a].total_cmp(&areas[b]).then(b.cmp(&a)))
        .unwrap_or(0);
    Ok(vec![largest])
}

/// Barycentric sample points for the error: 6 nodes, 6 quadrature points and
/// the 15 interior points of the lattice with spacing 1/7.
fn error_samples() -> Vec<[f64; 3]> {
    let mut pts: Vec<[f64; 3]> = (0..6).map(P2Element::node_bary).collect();
    pts.extend(
        crate::fem::quadrature::triangle_degree4()
            .iter()
            .map(|q| q.bary),
    );
    for i in 1..7 {
        for j in 1..7 - i {
            let k = 7 - i - j;
            pts.push([i as f64 / 7.0, j as f64 / 7.0, k as f64 / 7.0]);
        }
    }
    pts
}

/// `max |u - u_h|` over both components and all sample points.
pub fn measure_error(
    mesh: &Mesh,
    dofmap: &DofMap,
    u: &[f64],
    exact: Option<&dyn ExactSolution>,
) -> Result<f64> {
    let exact = exact
        .ok_or_else(|| Error::Unsupported("error measurement needs an exact solution".into()))?;
    let samples = error_samples();
    let mut err: f64 = 0.0;
    for t in 0..mesh.num_triangles() {
        let el = P2Element::new(mesh.triangle_points(t))?;
        let coeffs = dofmap.local_coeffs(t, u);
        for &l in &samples {
            let uh = P2Element::displacement(&coeffs, l);
            let ue = exact.value(el.point(l));
            err = err.max((ue[0] - uh[0]).abs()).max((ue[1] - uh[1]).abs());
        }
    }
    Ok(err)
}

/// Runs the adaptive loop, calling `observer` once per level after marking.
pub fn adapt(
    problem: &ProblemSpec,
    params: &AdaptParams,
    mut observer: impl FnMut(&Level) -> Result<()>,
) -> std::result::Result<AdaptiveTrace, AdaptFailure> {
    let mut trace = AdaptiveTrace::default();
    let fail = |level, trace: &AdaptiveTrace, source| AdaptFailure {
        level,
        trace: trace.clone(),
        source,
    };
    params.validate().map_err(|e| fail(0, &trace, e))?;
    let mut mesh = Mesh::unit_square(params.n0, problem.tags).map_err(|e| fail(0, &trace, e))?;
    let pdas = PdasParams {
        c: params
            .pdas_c
            .unwrap_or_else(|| problem.material.stiffness_scale()),
        max_iter: params.max_pdas_iter,
    };

    for level in 0..params.levels {
        let start = Instant::now();
        let step = (|| -> Result<Mesh> {
            let dofmap = DofMap::new(&mesh);
            let system = assemble(&mesh, &dofmap, problem)?;
            let contact = ContactTraceMesh::new(&mesh, &dofmap)?;
            let constraints = ContactConstraints::new(&contact, &dofmap, |x| (problem.gap)(x));
            let solution = solve_vi(&system, &constraints, &pdas)?;
            let density =
                compute_density(&mesh, &dofmap, &system, &contact, &constraints, &solution.u)?;
            let patches = build_patches(&mesh, &dofmap);
            let input = EstimatorInput {
                mesh: &mesh,
                dofmap: &dofmap,
                patches: &patches,
                trace: &contact,
                constraints: &constraints,
                density: &density,
                problem,
                u: &solution.u,
            };
            let report = estimate(&input, params.c0)?;
            let err_inf = match &problem.exact {
                Some(exact) => Some(measure_error(
                    &mesh,
                    &dofmap,
                    &solution.u,
                    Some(exact.as_ref()),
                )?),
                None => None,
            };
            let marked = if params.uniform {
                (0..mesh.num_triangles()).collect()
            } else {
                let areas: Vec<f64> = (0..mesh.num_triangles()).map(|t| mesh.area(t)).collect();
                mark(&report.indicators, params.theta, &areas)?
            };
            let record = LevelRecord {
                level,
                ndof: dofmap.num_dofs(),
                h_min: report.h_min,
                lh: report.lh,
                eta: report.eta,
                eta6: report.eta6,
                eta7: report.eta7,
                psi: report.psi,
                eta_h: report.eta_h,
                osc_f: report.osc_f_max(),
                osc_g: report.osc_g_max(),
                err_inf,
                eff_index: err_inf.filter(|&e| e > 0.0).map(|e| report.eta_h / e),
                active_nodes: solution.active_count(),
                pdas_iterations: solution.iterations,
                marked: marked.len(),
                seconds: start.elapsed().as_secs_f64(),
            };
            info!(
                "level {level}: ndof = {}, eta_h = {:e}, err = {:?}, active = {}",
                record.ndof, record.eta_h, record.err_inf, record.active_nodes
            );
            observer(&Level {
                mesh: &mesh,
                dofmap: &dofmap,
                patches: &patches,
                system: &system,
                trace: &contact,
                constraints: &constraints,
                solution: &solution,
                density: &density,
                report: &report,
                marked: &marked,
                record: &record,
            })?;
            trace.levels.push(record);
            Ok(if level + 1 < params.levels {
                mesh.refine(&marked)
            } else {
                mesh.clone()
            })
        })();
        mesh = step.map_err(|e| fail(level, &trace, e))?;
    }
    Ok(trace)
}

pub const CONVERGENCE_HEADER: &str = "level,ndof,hmin,lh,eta1,eta2,eta3,eta4,eta5,eta6,eta7,psi,eta_h,err_inf,eff_index,active_nodes,seconds";
pub const ESTIMATOR_HEADER: &str =
    "level,ndof,hmin,lh,eta1,eta2,eta3,eta4,eta5,eta6,eta7,psi,eta_h,osc_f,osc_g";

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

fn common_columns(r: &LevelRecord) -> String {
    let mut s = format!("{},{},{:e},{:e}", r.level, r.ndof, r.h_min, r.lh);
    for v in r.eta.iter().chain([&r.eta6, &r.eta7, &r.psi, &r.eta_h]) {
        s.push_str(&format!(",{v:e}"));
    }
    s
}

pub fn convergence_row(r: &LevelRecord) -> String {
    format!(
        "{},{},{},{},{:.3}",
        common_columns(r),
        opt(r.err_inf),
        opt(r.eff_index),
        r.active_nodes,
        r.seconds
    )
}

pub fn estimator_row(r: &LevelRecord) -> String {
    format!("{},{:e},{:e}", common_columns(r), r.osc_f, r.osc_g)
}

/// Writes the per-level outputs into a directory as the loop progresses, so
/// that completed levels survive a failure on a later one.
pub struct OutputWriter {
    dir: PathBuf,
    convergence: BufWriter<File>,
    estimator: BufWriter<File>,
    pdas_trace: bool,
}

impl OutputWriter {
    /// Creates `dir`, writes `config.json` and the CSV headers.
    pub fn create(dir: &Path, config: &impl Serialize, pdas_trace: bool) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        serde_json::to_writer_pretty(
            BufWriter::new(File::create(dir.join("config.json"))?),
            config,
        )?;
        let mut convergence = BufWriter::new(File::create(dir.join("convergence.csv"))?);
        writeln!(convergence, "{CONVERGENCE_HEADER}")?;
        let mut estimator = BufWriter::new(File::create(dir.join("estimator.csv"))?);
        writeln!(estimator, "{ESTIMATOR_HEADER}")?;
        convergence.flush()?;
        estimator.flush()?;
        Ok(OutputWriter {
            dir: dir.to_path_buf(),
            convergence,
            estimator,
            pdas_trace,
        })
    }

    pub fn write_level(&mut self, level: &Level) -> Result<()> {
        let k = level.record.level;
        writeln!(self.convergence, "{}", convergence_row(level.record))?;
        writeln!(self.estimator, "{}", estimator_row(level.record))?;
        self.convergence.flush()?;
        self.estimator.flush()?;

        let mesh = level.mesh;
        let nv = mesh.num_vertices();
        let u = &level.solution.u;
        let displacement: Vec<[f64; 2]> = (0..nv).map(|p| [u[2 * p], u[2 * p + 1]]).collect();
        let mut multiplier = vec![0.0; nv];
        for (c, &m) in level.constraints.iter().zip(&level.solution.multipliers) {
            if c.node < nv {
                multiplier[c.node] = m;
            }
        }
        let levels: Vec<f64> = mesh.levels().iter().map(|&l| l as f64).collect();
        let vtk = BufWriter::new(File::create(self.dir.join(format!("level_{k}.vtk")))?);
        write_vtk(
            mesh,
            vtk,
            &format!("level {k}"),
            &[
                VtkField::Vectors("displacement", &displacement),
                VtkField::Scalars("multiplier", &multiplier),
            ],
            &[
                VtkField::Scalars("indicator", &level.report.indicators),
                VtkField::Scalars("refinement_level", &levels),
            ],
        )?;

        let density = BufWriter::new(File::create(self.dir.join(format!("density_{k}.csv")))?);
        level.density.write_csv(density)?;
        if self.pdas_trace {
            let f = BufWriter::new(File::create(self.dir.join(format!("pdas_{k}.csv")))?);
            write_trace(&level.solution.history, f)?;
        }
        Ok(())
    }
}
