//! Shared fixtures and independent oracles for the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use signorini::contact::{solve_vi, ContactConstraints, ContactTraceMesh, PdasParams, VISolution};
use signorini::mesh::build_patches;
use signorini::problem::{AffineScalar, MaterialInput, ProblemFile};
use signorini::{assemble, DofMap, Mesh, PatchTable, ProblemSpec, SideTags, SparseSystem};

/// Everything needed for one discrete contact problem on a fixed mesh.
pub struct Discrete {
    pub mesh: Mesh,
    pub dofmap: DofMap,
    pub patches: PatchTable,
    pub system: SparseSystem,
    pub trace: ContactTraceMesh,
    pub constraints: ContactConstraints,
}

impl Discrete {
    pub fn new(mesh: Mesh, problem: &ProblemSpec) -> Discrete {
        let dofmap = DofMap::new(&mesh);
        let system = assemble(&mesh, &dofmap, problem).unwrap();
        let trace = ContactTraceMesh::new(&mesh, &dofmap).unwrap();
        let constraints = ContactConstraints::new(&trace, &dofmap, |x| (problem.gap)(x));
        let patches = build_patches(&mesh, &dofmap);
        Discrete {
            mesh,
            dofmap,
            patches,
            system,
            trace,
            constraints,
        }
    }

    pub fn solve(&self, problem: &ProblemSpec) -> VISolution {
        solve_vi(
            &self.system,
            &self.constraints,
            &PdasParams::for_material(&problem.material),
        )
        .unwrap()
    }
}

/// Constant loads pushing the body onto the obstacle, an affine gap and a
/// random isotropic material.
pub fn random_problem(rng: &mut ChaCha8Rng, tags: SideTags) -> ProblemSpec {
    let towards = if tags.bottom == signorini::BoundaryTag::Contact {
        [0.0, -1.0]
    } else {
        [1.0, 0.0]
    };
    let push = rng.gen_range(0.5..3.0);
    let shear = rng.gen_range(-0.5..0.5);
    let file = ProblemFile {
        name: "random".into(),
        material: MaterialInput::Lame {
            mu: rng.gen_range(0.5..5.0),
            zeta: rng.gen_range(0.0..5.0),
        },
        tags,
        body_force: [
            push * towards[0] - shear * towards[1],
            push * towards[1] + shear * towards[0],
        ],
        traction: [rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)],
        gap: AffineScalar {
            constant: rng.gen_range(-0.02..0.08),
            x: rng.gen_range(-0.1..0.1),
            y: rng.gen_range(-0.1..0.1),
        },
        dirichlet: [0.0, 0.0],
    };
    file.into_spec().unwrap()
}

pub struct OracleSolution {
    pub u: Vec<f64>,
    pub active: Vec<bool>,
    pub multipliers: Vec<f64>,
    /// Number of active sets that satisfied the KKT conditions.
    pub kkt_sets: usize,
}

/// Exhaustive active-set enumeration with dense linear algebra.
///
/// With `G = B K⁻¹ Bᵀ` and `u₀ = K⁻¹ F` on the free dofs, an active set `A`
/// gives `λ_A = G_AA⁻¹ (B_A u₀ − χ_A)` and `u = u₀ − K⁻¹ B_Aᵀ λ_A`; it is
/// the solution iff `λ_A ≥ 0` and `B u ≤ χ` off `A`.
pub fn brute_force_vi(system: &SparseSystem, constraints: &ContactConstraints) -> OracleSolution {
    let n = system.num_dofs();
    let free: Vec<usize> = (0..n).filter(|&i| !system.dirichlet[i]).collect();
    let mut index = vec![usize::MAX; n];
    for (k, &i) in free.iter().enumerate() {
        index[i] = k;
    }
    let nf = free.len();
    let mut k = DMatrix::<f64>::zeros(nf, nf);
    let mut rhs = DVector::<f64>::zeros(nf);
    for (a, &i) in free.iter().enumerate() {
        rhs[a] = system.load[i];
        for j in 0..n {
            let v = system.stiffness.get(i, j);
            if system.dirichlet[j] {
                rhs[a] -= v * system.dirichlet_values[j];
            } else {
                k[(a, index[j])] = v;
            }
        }
    }
    let chol = k.cholesky().expect("stiffness on free dofs is SPD");
    let u0 = chol.solve(&rhs);

    let m = constraints.len();
    assert!(m <= 16, "enumeration over {m} constraints is too large");
    let mut bt = DMatrix::<f64>::zeros(nf, m);
    for (c, con) in constraints.iter().enumerate() {
        bt[(index[con.dof], c)] = con.sign;
    }
    let kinv_bt = chol.solve(&bt);
    let g = bt.transpose() * &kinv_bt;
    let bu0 = bt.transpose() * &u0;
    let gap: Vec<f64> = constraints.iter().map(|c| c.gap).collect();

    let scale = 1.0 + bu0.amax() + gap.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    let tol = 1e-11 * scale;
    let mut best: Option<(f64, Vec<bool>, DVector<f64>)> = None;
    let mut kkt_sets = 0;
    for mask in 0u32..(1 << m) {
        let act: Vec<usize> = (0..m).filter(|&i| mask & (1 << i) != 0).collect();
        let mut lambda = DVector::<f64>::zeros(m);
        if !act.is_empty() {
            let gaa = DMatrix::from_fn(act.len(), act.len(), |r, c| g[(act[r], act[c])]);
            let b = DVector::from_fn(act.len(), |r, _| bu0[act[r]] - gap[act[r]]);
            let la = gaa.lu().solve(&b).expect("G_AA is nonsingular");
            for (r, &i) in act.iter().enumerate() {
                lambda[i] = la[r];
            }
        }
        let bu = &bu0 - &g * &lambda;
        let mut violation = 0.0f64;
        for i in 0..m {
            if mask & (1 << i) != 0 {
                violation = violation.max(-lambda[i]);
            } else {
                violation = violation.max(bu[i] - gap[i]);
            }
        }
        if violation <= tol {
            kkt_sets += 1;
        }
        if best.as_ref().is_none_or(|(v, _, _)| violation < *v) {
            best = Some((
                violation,
                (0..m).map(|i| mask & (1 << i) != 0).collect(),
                lambda,
            ));
        }
    }
    let (_, active, lambda) = best.expect("at least the empty set is tried");
    let uf = &u0 - &kinv_bt * &lambda;
    let mut u = system.dirichlet_values.clone();
    for (a, &i) in free.iter().enumerate() {
        u[i] = uf[a];
    }
    OracleSolution {
        u,
        active,
        multipliers: lambda.iter().copied().collect(),
        kkt_sets,
    }
}

pub fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

impl Discrete {
    pub fn density(&self, u: &[f64]) -> signorini::DensityField {
        signorini::compute_density(
            &self.mesh,
            &self.dofmap,
            &self.system,
            &self.trace,
            &self.constraints,
            u,
        )
        .unwrap()
    }

    pub fn estimate(&self, problem: &ProblemSpec, u: &[f64]) -> signorini::EstimatorReport {
        let density = self.density(u);
        let input = signorini::EstimatorInput {
            mesh: &self.mesh,
            dofmap: &self.dofmap,
            patches: &self.patches,
            trace: &self.trace,
            constraints: &self.constraints,
            density: &density,
            problem,
            u,
        };
        signorini::estimate(&input, signorini::estimator::DEFAULT_C0).unwrap()
    }
}
