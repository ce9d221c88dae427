//! Fixtures shared by the benchmarks: adaptively graded meshes of the
//! built-in problems, so that timings reflect the meshes the loop produces.

use signorini::contact::{solve_vi, ContactConstraints, ContactTraceMesh, PdasParams, VISolution};
use signorini::mesh::build_patches;
use signorini::{
    adapt, assemble, AdaptParams, DensityField, DofMap, Mesh, PatchTable, ProblemSpec, SparseSystem,
};

pub struct Fixture {
    pub problem: ProblemSpec,
    pub mesh: Mesh,
    pub dofmap: DofMap,
    pub patches: PatchTable,
    pub system: SparseSystem,
    pub trace: ContactTraceMesh,
    pub constraints: ContactConstraints,
    pub pdas: PdasParams,
    pub solution: VISolution,
    pub density: DensityField,
}

impl Fixture {
    /// The mesh reached after `levels` adaptive steps, with its solution.
    pub fn graded(problem: ProblemSpec, levels: usize) -> Fixture {
        let params = AdaptParams {
            levels,
            ..AdaptParams::default()
        };
        let mut last = None;
        adapt(&problem, &params, |level| {
            last = Some(level.mesh.refine(level.marked));
            Ok(())
        })
        .expect("adaptive run succeeds");
        Fixture::on_mesh(problem, last.expect("at least one level"))
    }

    pub fn on_mesh(problem: ProblemSpec, mesh: Mesh) -> Fixture {
        let dofmap = DofMap::new(&mesh);
        let system = assemble(&mesh, &dofmap, &problem).expect("assembly succeeds");
        let trace = ContactTraceMesh::new(&mesh, &dofmap).expect("contact boundary present");
        let constraints = ContactConstraints::new(&trace, &dofmap, |x| (problem.gap)(x));
        let pdas = PdasParams::for_material(&problem.material);
        let solution = solve_vi(&system, &constraints, &pdas).expect("active-set solver converges");
        let density =
            signorini::compute_density(&mesh, &dofmap, &system, &trace, &constraints, &solution.u)
                .expect("density defined");
        let patches = build_patches(&mesh, &dofmap);
        Fixture {
            problem,
            mesh,
            dofmap,
            patches,
            system,
            trace,
            constraints,
            pdas,
            solution,
            density,
        }
    }

    pub fn input(&self) -> signorini::EstimatorInput<'_> {
        signorini::EstimatorInput {
            mesh: &self.mesh,
            dofmap: &self.dofmap,
            patches: &self.patches,
            trace: &self.trace,
            constraints: &self.constraints,
            density: &self.density,
            problem: &self.problem,
            u: &self.solution.u,
        }
    }
}
