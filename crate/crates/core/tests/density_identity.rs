//! The nodal density against an independent evaluation of
//! `L(φ_p e_i) − a(u_h, φ_p e_i)` with its own P2 basis and quadrature.

mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{max_abs, random_problem, Discrete};
use signorini::{BoundaryTag, Mesh, Point, ProblemSpec, QuasiDensity, SideTags};

/// Barycentric coordinates and their gradients on one triangle.
struct Bary {
    p: [Point; 3],
    area: f64,
    grad: [[f64; 2]; 3],
}

impl Bary {
    fn new(p: [Point; 3]) -> Bary {
        let det =
            (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
        let grad = std::array::from_fn(|i| {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            [(p[j][1] - p[k][1]) / det, (p[k][0] - p[j][0]) / det]
        });
        Bary {
            p,
            area: 0.5 * det,
            grad,
        }
    }

    fn point(&self, l: [f64; 3]) -> Point {
        std::array::from_fn(|c| (0..3).map(|i| l[i] * self.p[i][c]).sum())
    }
}

/// A P2 node of a triangle as a pair of local vertices: `(i, i)` for a vertex.
type Local = (usize, usize);

fn value(n: Local, l: [f64; 3]) -> f64 {
    let (a, b) = n;
    if a == b {
        l[a] * (2.0 * l[a] - 1.0)
    } else {
        4.0 * l[a] * l[b]
    }
}

fn gradient(n: Local, b: &Bary, l: [f64; 3]) -> [f64; 2] {
    let g = &b.grad;
    let (i, j) = n;
    std::array::from_fn(|c| {
        if i == j {
            (4.0 * l[i] - 1.0) * g[i][c]
        } else {
            4.0 * (l[i] * g[j][c] + l[j] * g[i][c])
        }
    })
}

/// Algebraic residual `L(φ_p e_i) − a(u_h, φ_p e_i)` for every vector dof.
fn residual_oracle(d: &Discrete, problem: &ProblemSpec, u: &[f64]) -> Vec<f64> {
    let mesh = &d.mesh;
    let mut r = vec![0.0; d.dofmap.num_dofs()];
    let (mu, zeta) = (problem.material.mu, problem.material.zeta);
    let mid_rule = [[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]];
    for t in 0..mesh.num_triangles() {
        let verts = mesh.triangle(t);
        let b = Bary::new(mesh.triangle_points(t));
        let mut nodes: Vec<(Local, usize)> = (0..3).map(|i| ((i, i), verts[i])).collect();
        for e in mesh.triangle_edges(t) {
            let [va, vb] = mesh.edge(e);
            let ia = verts.iter().position(|&v| v == va).unwrap();
            let ib = verts.iter().position(|&v| v == vb).unwrap();
            nodes.push(((ia, ib), d.dofmap.edge_node(e)));
        }
        for l in mid_rule {
            let w = b.area / 3.0;
            let mut du = [[0.0; 2]; 2];
            for &(n, p) in &nodes {
                let g = gradient(n, &b, l);
                for c in 0..2 {
                    for k in 0..2 {
                        du[c][k] += u[2 * p + c] * g[k];
                    }
                }
            }
            let div = du[0][0] + du[1][1];
            let sigma: [[f64; 2]; 2] = std::array::from_fn(|c| {
                std::array::from_fn(|k| {
                    mu * (du[c][k] + du[k][c]) + if c == k { zeta * div } else { 0.0 }
                })
            });
            let f = (problem.body_force)(b.point(l));
            for &(n, p) in &nodes {
                let g = gradient(n, &b, l);
                let phi = value(n, l);
                for c in 0..2 {
                    r[2 * p + c] += w * (f[c] * phi - sigma[c][0] * g[0] - sigma[c][1] * g[1]);
                }
            }
        }
    }
    // Simpson's rule on each Neumann edge.
    for (e, tag) in mesh.boundary_edges() {
        if tag != BoundaryTag::Neumann {
            continue;
        }
        let [va, vb] = mesh.edge(e);
        let t = mesh.edge_triangles(e)[0];
        let normal = mesh.outward_normal(t, e);
        let len = mesh.edge_length(e);
        let nodes = [
            (va, [1.0, 0.0, 0.0]),
            (d.dofmap.edge_node(e), [0.0, 1.0, 0.0]),
            (vb, [0.0, 0.0, 1.0]),
        ];
        let (pa, pb) = (mesh.vertex(va), mesh.vertex(vb));
        for (k, (p, _)) in nodes.iter().enumerate() {
            let s = k as f64 / 2.0;
            let x = [pa[0] + s * (pb[0] - pa[0]), pa[1] + s * (pb[1] - pa[1])];
            let g = (problem.traction)(x, normal);
            let w = len * [1.0, 4.0, 1.0][k] / 6.0;
            for c in 0..2 {
                r[2 * p + c] += w * g[c];
            }
        }
    }
    for (i, v) in r.iter_mut().enumerate() {
        if d.system.dirichlet[i] {
            *v = 0.0;
        }
    }
    r
}

fn meshes(tags: SideTags) -> Vec<Mesh> {
    let two = Mesh::unit_square(1, tags).unwrap();
    let coarse = Mesh::unit_square(2, tags).unwrap();
    let graded = coarse.refine(&[0, 1, 7]).refine(&[2, 3]);
    vec![two, coarse, graded]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn nodal_density_matches_residual_oracle(seed in any::<u64>(), right in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tags = if right { SideTags::right_contact() } else { SideTags::bottom_contact() };
        let problem = random_problem(&mut rng, tags);
        for mesh in meshes(tags) {
            let d = Discrete::new(mesh, &problem);
            let sol = d.solve(&problem);
            let oracle = residual_oracle(&d, &problem, &sol.u);
            let system = d.system.residual(&sol.u);
            let scale = 1.0 + max_abs(oracle.iter().copied());
            prop_assert!(max_abs(oracle.iter().zip(&system).map(|(a, b)| a - b)) <= 1e-10 * scale);

            let density = d.density(&sol.u);
            for e in density.entries() {
                let p = e.node;
                let (n, rp) = (e.direction, [oracle[2 * p], oracle[2 * p + 1]]);
                let rn = rp[0] * n[0] + rp[1] * n[1];
                let rt = -rp[0] * n[1] + rp[1] * n[0];
                prop_assert!((e.normal * e.weight - rn).abs() <= 1e-10 * scale);
                prop_assert!((e.tangential * e.weight - rt).abs() <= 1e-10 * scale);
            }
        }
    }

    /// `⟨λ̄_h, v⟩ ≥ 0` whenever `v·n ≥ 0` on the contact boundary.
    #[test]
    fn quasi_density_is_nonnegative(seed in any::<u64>(), right in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tags = if right { SideTags::right_contact() } else { SideTags::bottom_contact() };
        let problem = random_problem(&mut rng, tags);
        let d = Discrete::new(meshes(tags).pop().unwrap(), &problem);
        let sol = d.solve(&problem);
        let density = d.density(&sol.u);
        let qd = QuasiDensity::new(&d.mesh, &d.dofmap, &d.patches, &density);
        let n = density.entries()[0].direction;
        let total: f64 = density.forces().map(f64::abs).sum();
        for _ in 0..10 {
            let (a, b, c) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(0.0..1.0));
            let t = rng.gen_range(-5.0..5.0);
            let v = move |x: Point| {
                let s = (a * x[0] + b * x[1]).powi(2) + c;
                [s * n[0] - t * n[1], s * n[1] + t * n[0]]
            };
            prop_assert!(qd.apply(&v) >= -1e-10 * total * 10.0);
        }
    }
}

/// `w_p = ∫ ψ_p` on the split trace mesh: a quarter of each adjacent edge
/// for a vertex, half the edge for a midpoint.
#[test]
fn trace_weights_by_hand() {
    let tags = SideTags::bottom_contact();
    let problem = signorini::manufactured_contact();
    for mesh in meshes(tags) {
        let d = Discrete::new(mesh, &problem);
        let mut expected = vec![0.0; d.dofmap.num_nodes()];
        for (e, tag) in d.mesh.boundary_edges() {
            if tag != BoundaryTag::Contact {
                continue;
            }
            let h = d.mesh.edge_length(e);
            let [a, b] = d.mesh.edge(e);
            expected[a] += h / 4.0;
            expected[b] += h / 4.0;
            expected[d.dofmap.edge_node(e)] += h / 2.0;
        }
        for node in d.trace.nodes() {
            assert!((node.weight - expected[node.node]).abs() < 1e-15);
        }
    }
}
