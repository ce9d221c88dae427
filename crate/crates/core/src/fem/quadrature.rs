//! Quadrature rules on the reference triangle and the unit interval.

use std::sync::LazyLock;

/// A point in barycentric coordinates with a weight relative to the triangle area.
#[derive(Debug, Clone, Copy)]
pub struct QuadPoint {
    pub bary: [f64; 3],
    pub weight: f64,
}

/// Six-point symmetric rule, exact for polynomials of degree 4.
/// Weights sum to 1, so multiply by the triangle area.
pub fn triangle_degree4() -> &'static [QuadPoint; 6] {
    static RULE: LazyLock<[QuadPoint; 6]> = LazyLock::new(|| {
        let s10 = 10f64.sqrt();
        let r = (38.0 - 44.0 * (0.4f64).sqrt()).sqrt();
        let a1 = (8.0 - s10 + r) / 18.0;
        let a2 = (8.0 - s10 - r) / 18.0;
        let q = (213125.0 - 53320.0 * s10).sqrt();
        let w1 = (620.0 + q) / 3720.0;
        let w2 = (620.0 - q) / 3720.0;
        let orbit = |a: f64, w: f64| {
            let b = 1.0 - 2.0 * a;
            [
                QuadPoint {
                    bary: [b, a, a],
                    weight: w,
                },
                QuadPoint {
                    bary: [a, b, a],
                    weight: w,
                },
                QuadPoint {
                    bary: [a, a, b],
                    weight: w,
                },
            ]
        };
        let [p0, p1, p2] = orbit(a1, w1);
        let [p3, p4, p5] = orbit(a2, w2);
        [p0, p1, p2, p3, p4, p5]
    });
    &RULE
}

/// Three-point Gauss-Legendre rule on [0, 1] as `(s, weight)`; weights sum to 1.
pub fn gauss3_unit() -> &'static [(f64, f64); 3] {
    static RULE: LazyLock<[(f64, f64); 3]> = LazyLock::new(|| {
        let d = 0.5 * (0.6f64).sqrt();
        [
            (0.5 - d, 5.0 / 18.0),
            (0.5, 8.0 / 18.0),
            (0.5 + d, 5.0 / 18.0),
        ]
    });
    &RULE
}
