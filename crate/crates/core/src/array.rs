//! Uniform linear array response: steering vectors, their angle derivative,
//! the orthogonal projector onto the complement of a steering vector, and the
//! ULA Fisher scalar `D†D`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, C64};

/// Slack allowed on the ±π/2 endpoints so that `90f64.to_radians()` is accepted.
const ANGLE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayGeometry {
    n_elements: usize,
    /// Element spacing in meters.
    spacing: f64,
    /// Carrier wavelength in meters.
    wavelength: f64,
}

impl ArrayGeometry {
    pub fn new(n_elements: usize, spacing: f64, wavelength: f64) -> Result<Self> {
        if n_elements == 0 {
            return Err(Error::InvalidParameter("array needs at least one element".into()));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::InvalidParameter(format!("spacing must be positive, got {spacing}")));
        }
        if !(wavelength > 0.0 && wavelength.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "wavelength must be positive, got {wavelength}"
            )));
        }
        Ok(Self { n_elements, spacing, wavelength })
    }

    /// `n` elements at half-wavelength spacing (unit wavelength).
    pub fn half_wavelength(n_elements: usize) -> Result<Self> {
        Self::new(n_elements, 0.5, 1.0)
    }

    /// The degenerate one-element array of a single-antenna terminal.
    pub fn single() -> Self {
        Self { n_elements: 1, spacing: 0.5, wavelength: 1.0 }
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    /// `2π d / λ`.
    fn wavenumber_spacing(&self) -> f64 {
        2.0 * PI * self.spacing / self.wavelength
    }
}

/// Clamps endpoint round-off and rejects angles outside `[-π/2, π/2]`.
pub fn check_angle(theta: f64) -> Result<f64> {
    if !theta.is_finite() || theta.abs() > FRAC_PI_2 + ANGLE_SLACK {
        return Err(Error::AngleOutOfRange(theta));
    }
    Ok(theta.clamp(-FRAC_PI_2, FRAC_PI_2))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector {
    entries: CVector,
    angle: f64,
}

impl SteeringVector {
    pub fn entries(&self) -> &CVector {
        &self.entries
    }

    pub fn into_entries(self) -> CVector {
        self.entries
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }
}

impl AsRef<CVector> for SteeringVector {
    fn as_ref(&self) -> &CVector {
        &self.entries
    }
}

/// `[1, z, z², …, z^{N-1}]` with `z = exp(-j 2π d sin θ / λ)`.
pub fn steering_vector(geom: &ArrayGeometry, theta: f64) -> Result<SteeringVector> {
    let theta = check_angle(theta)?;
    let psi = geom.wavenumber_spacing() * theta.sin();
    // Each power is evaluated directly rather than by repeated multiplication.
    let entries = CVector::from_fn(geom.n_elements, |m, _| C64::from_polar(1.0, -(m as f64) * psi));
    Ok(SteeringVector { entries, angle: theta })
}

/// `∂a/∂θ`: entry m is `-j 2π d m cos θ / λ · z^m`.
pub fn steering_derivative(geom: &ArrayGeometry, theta: f64) -> Result<CVector> {
    let theta = check_angle(theta)?;
    let k = geom.wavenumber_spacing();
    let psi = k * theta.sin();
    let slope = k * theta.cos();
    Ok(CVector::from_fn(geom.n_elements, |m, _| {
        let m = m as f64;
        C64::new(0.0, -slope * m) * C64::from_polar(1.0, -m * psi)
    }))
}

/// `I − a a†/(a†a)`, the projector onto the orthogonal complement of `a`.
///
/// Accepts any vector; a zero vector spans nothing, so the identity is
/// returned.
pub fn projector_g(a: &CVector) -> CMatrix {
    let n = a.len();
    let norm2 = a.norm_squared();
    let mut g = CMatrix::identity(n, n);
    if norm2 > 0.0 {
        g -= (a * a.adjoint()).unscale(norm2);
    }
    g
}

/// `Σ = D†D = (2π d cos θ / λ)² Σ_{i<N} i²`.
pub fn ula_sigma(geom: &ArrayGeometry, theta: f64) -> Result<f64> {
    let theta = check_angle(theta)?;
    let n = geom.n_elements as f64;
    let sum_sq = (n - 1.0) * n * (2.0 * n - 1.0) / 6.0;
    let slope = geom.wavenumber_spacing() * theta.cos();
    Ok(slope * slope * sum_sq)
}
