//! Problem definitions: data fields, material, boundary tagging and
//! optional closed-form exact solutions.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::{lame_from_young_poisson, MaterialLaw};
use crate::mesh::{BoundaryTag, Point, SideTags};

pub type VectorFn = Arc<dyn Fn(Point) -> [f64; 2] + Send + Sync>;
/// Boundary traction as a function of position and outward unit normal.
pub type TractionFn = Arc<dyn Fn(Point, [f64; 2]) -> [f64; 2] + Send + Sync>;
pub type ScalarFn = Arc<dyn Fn(Point) -> f64 + Send + Sync>;

/// Closed-form displacement with its gradient `g[c][d] = ∂_d u_c`.
pub trait ExactSolution: Send + Sync {
    fn value(&self, x: Point) -> [f64; 2];
    fn gradient(&self, x: Point) -> [[f64; 2]; 2];
}

#[derive(Clone)]
pub struct ProblemSpec {
    pub name: String,
    pub tags: SideTags,
    pub material: MaterialLaw,
    pub body_force: VectorFn,
    pub traction: TractionFn,
    /// Gap χ: the constraint reads `u·n ≤ χ` on the contact boundary.
    pub gap: ScalarFn,
    pub dirichlet: VectorFn,
    pub exact: Option<Arc<dyn ExactSolution>>,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("tags", &self.tags)
            .field("material", &self.material)
            .field("exact", &self.exact.is_some())
            .finish()
    }
}

impl ProblemSpec {
    /// Same problem with `f`, `g`, `χ` and Dirichlet data multiplied by `alpha`.
    pub fn scaled(&self, alpha: f64) -> ProblemSpec {
        let (f, g, chi, ud) = (
            self.body_force.clone(),
            self.traction.clone(),
            self.gap.clone(),
            self.dirichlet.clone(),
        );
        ProblemSpec {
            name: format!("{} (scaled by {alpha})", self.name),
            tags: self.tags,
            material: self.material,
            body_force: Arc::new(move |x| {
                let v = f(x);
                [alpha * v[0], alpha * v[1]]
            }),
            traction: Arc::new(move |x, n| {
                let v = g(x, n);
                [alpha * v[0], alpha * v[1]]
            }),
            gap: Arc::new(move |x| alpha * chi(x)),
            dirichlet: Arc::new(move |x| {
                let v = ud(x);
                [alpha * v[0], alpha * v[1]]
            }),
            exact: None,
        }
    }

    /// Checks that the data are consistent with the exact solution, if any:
    /// `f = -div σ(u)` in the domain and `g = σ(u) n` on Neumann sides, at
    /// `samples` scattered points. Returns the largest relative deviation.
    pub fn self_check(&self, samples: usize) -> Result<f64> {
        let Some(exact) = &self.exact else {
            return Ok(0.0);
        };
        // Fourth-order central differences of the closed-form gradient
        // provide an independent divergence.
        let h = 1e-3;
        let stencil = |x: Point, d: usize| {
            let at = |s: f64| {
                let mut y = x;
                y[d] += s * h;
                self.material.stress(&exact.gradient(y))
            };
            let (p2, p1, m1, m2) = (at(2.0), at(1.0), at(-1.0), at(-2.0));
            let mut out = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    out[i][j] =
                        (-p2[i][j] + 8.0 * p1[i][j] - 8.0 * m1[i][j] + m2[i][j]) / (12.0 * h);
                }
            }
            out
        };

        let mut worst: f64 = 0.0;
        // Scattered points from an additive recurrence (R2 sequence).
        let (a1, a2) = (0.754_877_666_246_692_7, 0.569_840_290_998_053_3);
        for k in 0..samples {
            let kf = k as f64 + 0.5;
            let x = [
                0.05 + 0.9 * (kf * a1).fract(),
                0.05 + 0.9 * (kf * a2).fract(),
            ];
            let dx = stencil(x, 0);
            let dy = stencil(x, 1);
            let f = (self.body_force)(x);
            for i in 0..2 {
                let div = dx[i][0] + dy[i][1];
                worst = worst.max((f[i] + div).abs() / (1.0 + f[i].abs()));
            }

            let s = (kf * 0.618_033_988_749_894_8).fract();
            for (tag, x, n) in [
                (self.tags.bottom, [s, 0.0], [0.0, -1.0]),
                (self.tags.right, [1.0, s], [1.0, 0.0]),
                (self.tags.top, [s, 1.0], [0.0, 1.0]),
                (self.tags.left, [0.0, s], [-1.0, 0.0]),
            ] {
                if tag != BoundaryTag::Neumann {
                    continue;
                }
                let sigma = self.material.stress(&exact.gradient(x));
                let g = (self.traction)(x, n);
                for i in 0..2 {
                    let sn = sigma[i][0] * n[0] + sigma[i][1] * n[1];
                    worst = worst.max((g[i] - sn).abs() / (1.0 + g[i].abs()));
                }
            }
        }
        if worst > 1e-10 {
            return Err(Error::InvalidArgument(format!(
                "problem '{}' data inconsistent with its exact solution (deviation {worst:e})",
                self.name
            )));
        }
        Ok(worst)
    }
}

/// Exact solution of the bottom-contact benchmark:
/// `u = (y³ - y², (x - 2) e^y (y - y²))`.
#[derive(Debug, Clone, Copy)]
pub struct BottomContactSolution;

impl BottomContactSolution {
    fn w(y: f64) -> (f64, f64, f64) {
        let e = y.exp();
        (
            e * (y - y * y),
            e * (1.0 - y - y * y),
            e * (-3.0 * y - y * y),
        )
    }
}

impl ExactSolution for BottomContactSolution {
    fn value(&self, x: Point) -> [f64; 2] {
        let y = x[1];
        [y * y * y - y * y, (x[0] - 2.0) * Self::w(y).0]
    }

    fn gradient(&self, x: Point) -> [[f64; 2]; 2] {
        let y = x[1];
        let (w, dw, _) = Self::w(y);
        [[0.0, 3.0 * y * y - 2.0 * y], [w, (x[0] - 2.0) * dw]]
    }
}

/// Unit square, contact at `y = 0` against a flat obstacle, clamped at
/// `y = 1`, μ = ζ = 1, with data manufactured from [`BottomContactSolution`].
pub fn manufactured_contact() -> ProblemSpec {
    let material = MaterialLaw::new(1.0, 1.0).expect("valid constants");
    let exact = Arc::new(BottomContactSolution);
    let traction_exact = exact.clone();
    let dirichlet_exact = exact.clone();
    ProblemSpec {
        name: "ex71".into(),
        tags: SideTags::bottom_contact(),
        material,
        // f = -div σ(u), differentiated by hand for μ = ζ = 1.
        body_force: Arc::new(|x: Point| {
            let (_, dw, ddw) = BottomContactSolution::w(x[1]);
            [-(2.0 * dw + 6.0 * x[1] - 2.0), -3.0 * (x[0] - 2.0) * ddw]
        }),
        traction: Arc::new(move |x: Point, n: [f64; 2]| {
            let s = material.stress(&traction_exact.gradient(x));
            [
                s[0][0] * n[0] + s[0][1] * n[1],
                s[1][0] * n[0] + s[1][1] * n[1],
            ]
        }),
        gap: Arc::new(|_| 0.0),
        dirichlet: Arc::new(move |x| dirichlet_exact.value(x)),
        exact: Some(exact),
    }
}

/// Unit square pushed against a wedge-shaped obstacle on `x = 1`,
/// E = 500, ν = 0.3, clamped with `u = (0.1, 0)` on `x = 0`.
pub fn wedge_obstacle() -> ProblemSpec {
    ProblemSpec {
        name: "ex72".into(),
        tags: SideTags::right_contact(),
        material: lame_from_young_poisson(500.0, 0.3).expect("valid constants"),
        body_force: Arc::new(|_| [0.0, 0.0]),
        traction: Arc::new(|_, _| [0.0, 0.0]),
        gap: Arc::new(|x: Point| -0.2 + 0.5 * (x[1] - 0.5).abs()),
        dirichlet: Arc::new(|_| [0.1, 0.0]),
        exact: None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MaterialInput {
    Lame { mu: f64, zeta: f64 },
    Engineering { young: f64, poisson: f64 },
}

impl MaterialInput {
    pub fn resolve(self) -> Result<MaterialLaw> {
        match self {
            MaterialInput::Lame { mu, zeta } => MaterialLaw::new(mu, zeta),
            MaterialInput::Engineering { young, poisson } => {
                lame_from_young_poisson(young, poisson)
            }
        }
    }
}

/// Affine scalar `constant + x·X + y·Y`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AffineScalar {
    pub constant: f64,
    pub x: f64,
    pub y: f64,
}

/// Declarative problem description with constant loads and an affine gap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub name: String,
    pub material: MaterialInput,
    pub tags: SideTags,
    #[serde(default)]
    pub body_force: [f64; 2],
    #[serde(default)]
    pub traction: [f64; 2],
    #[serde(default)]
    pub gap: AffineScalar,
    #[serde(default)]
    pub dirichlet: [f64; 2],
}

impl ProblemFile {
    pub fn load(path: &Path) -> Result<ProblemFile> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn into_spec(self) -> Result<ProblemSpec> {
        let material = self.material.resolve()?;
        let (f, g, gap, ud) = (self.body_force, self.traction, self.gap, self.dirichlet);
        Ok(ProblemSpec {
            name: self.name,
            tags: self.tags,
            material,
            body_force: Arc::new(move |_| f),
            traction: Arc::new(move |_, _| g),
            gap: Arc::new(move |x: Point| gap.constant + gap.x * x[0] + gap.y * x[1]),
            dirichlet: Arc::new(move |_| ud),
            exact: None,
        })
    }
}

/// Resolves a built-in name (`ex71`, `ex72`) or a path to a JSON problem file.
pub fn lookup(name: &str) -> Result<ProblemSpec> {
    match name {
        "ex71" => Ok(manufactured_contact()),
        "ex72" => Ok(wedge_obstacle()),
        path => ProblemFile::load(Path::new(path))?.into_spec(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bottom_contact_exact_solution_on_boundaries() {
        let u = BottomContactSolution;
        for i in 0..=10 {
            let x = i as f64 / 10.0;
            assert_eq!(u.value([x, 0.0])[1], 0.0);
            let top = u.value([x, 1.0]);
            assert_eq!(top[0], 0.0);
            assert!(top[1].abs() < 1e-15);
        }
    }

    #[test]
    fn ex71_self_check() {
        let dev = manufactured_contact().self_check(100).unwrap();
        assert!(dev < 1e-10, "{dev}");
    }

    #[test]
    fn gradient_matches_values() {
        let u = BottomContactSolution;
        let h = 1e-3;
        for &x in &[[0.3, 0.7], [0.9, 0.1], [0.5, 0.5]] {
            let g = u.gradient(x);
            for d in 0..2 {
                let at = |s: f64| {
                    let mut y = x;
                    y[d] += s * h;
                    u.value(y)
                };
                for c in 0..2 {
                    let fd = (-at(2.0)[c] + 8.0 * at(1.0)[c] - 8.0 * at(-1.0)[c] + at(-2.0)[c])
                        / (12.0 * h);
                    assert!((fd - g[c][d]).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn broken_body_force_detected() {
        let mut p = manufactured_contact();
        p.body_force = Arc::new(|_| [0.0, 0.0]);
        assert!(p.self_check(10).is_err());
    }

    #[test]
    fn wedge_gap_values() {
        let p = wedge_obstacle();
        assert!(((p.gap)([1.0, 0.5]) + 0.2).abs() < 1e-15);
        assert!(((p.gap)([1.0, 0.0]) - 0.05).abs() < 1e-15);
        assert!(((p.gap)([1.0, 1.0]) - 0.05).abs() < 1e-15);
        let m = lame_from_young_poisson(500.0, 0.3).unwrap();
        assert_eq!(p.material, m);
    }

    #[test]
    fn problem_file_round_trip() {
        let json = r#"{
            "name": "block",
            "material": {"young": 10.0, "poisson": 0.25},
            "tags": {"bottom": "C", "right": "N", "top": "D", "left": "N"},
            "body_force": [0.0, -1.0],
            "gap": {"constant": 0.01, "x": 0.02}
        }"#;
        let file: ProblemFile = serde_json::from_str(json).unwrap();
        let spec = file.into_spec().unwrap();
        assert_eq!(spec.tags, SideTags::bottom_contact());
        assert_eq!((spec.body_force)([0.3, 0.3]), [0.0, -1.0]);
        assert!(((spec.gap)([0.5, 0.0]) - 0.02).abs() < 1e-15);
        assert!(spec.exact.is_none());
    }

    #[test]
    fn unknown_problem_path_errors() {
        assert!(lookup("/nonexistent/problem.json").is_err());
    }
}
