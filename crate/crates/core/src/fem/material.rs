use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Isotropic linear elasticity, `σ = 2μ ε + ζ tr(ε) I`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialLaw {
    pub mu: f64,
    pub zeta: f64,
}

impl MaterialLaw {
    pub fn new(mu: f64, zeta: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) || !(zeta >= 0.0 && zeta.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "Lamé constants must satisfy mu > 0, zeta >= 0 (got mu={mu}, zeta={zeta})"
            )));
        }
        Ok(MaterialLaw { mu, zeta })
    }

    /// Stress from a displacement gradient `g[c][d] = ∂_d u_c`.
    pub fn stress(&self, g: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
        let div = g[0][0] + g[1][1];
        let shear = self.mu * (g[0][1] + g[1][0]);
        [
            [2.0 * self.mu * g[0][0] + self.zeta * div, shear],
            [shear, 2.0 * self.mu * g[1][1] + self.zeta * div],
        ]
    }

    /// Divergence of the stress from second derivatives `h[c][d][e] = ∂_d ∂_e u_c`.
    pub fn stress_divergence(&self, h: &[[[f64; 2]; 2]; 2]) -> [f64; 2] {
        let (mu, zeta) = (self.mu, self.zeta);
        let lap = [h[0][0][0] + h[0][1][1], h[1][0][0] + h[1][1][1]];
        // ∂_i (div u)
        let grad_div = [h[0][0][0] + h[1][1][0], h[0][0][1] + h[1][1][1]];
        [
            mu * lap[0] + (mu + zeta) * grad_div[0],
            mu * lap[1] + (mu + zeta) * grad_div[1],
        ]
    }

    /// Characteristic stiffness `2μ + ζ`.
    pub fn stiffness_scale(&self) -> f64 {
        2.0 * self.mu + self.zeta
    }
}

pub fn lame_from_young_poisson(young: f64, poisson: f64) -> Result<MaterialLaw> {
    if !(young > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "Young's modulus must be positive, got {young}"
        )));
    }
    if !(0.0..0.5).contains(&poisson) {
        return Err(Error::InvalidArgument(format!(
            "Poisson ratio must lie in [0, 0.5), got {poisson}"
        )));
    }
    let mu = young / (2.0 * (1.0 + poisson));
    let zeta = young * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
    MaterialLaw::new(mu, zeta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn steel_like_conversion() {
        let m = lame_from_young_poisson(500.0, 0.3).unwrap();
        assert!((m.mu - 500.0 / 2.6).abs() < 1e-12);
        assert!((m.zeta - 150.0 / 0.52).abs() < 1e-10);
    }

    #[test]
    fn zero_poisson() {
        let m = lame_from_young_poisson(2.0, 0.0).unwrap();
        assert_eq!(m.mu, 1.0);
        assert_eq!(m.zeta, 0.0);
    }

    #[test]
    fn incompressible_rejected() {
        assert!(lame_from_young_poisson(1.0, 0.5).is_err());
        assert!(lame_from_young_poisson(1.0, 0.7).is_err());
        assert!(MaterialLaw::new(0.0, 1.0).is_err());
    }

    #[test]
    fn uniaxial_stress() {
        let m = MaterialLaw::new(1.0, 1.0).unwrap();
        let s = m.stress(&[[1.0, 0.0], [0.0, 0.0]]);
        assert_eq!(s, [[3.0, 0.0], [0.0, 1.0]]);
    }
}
