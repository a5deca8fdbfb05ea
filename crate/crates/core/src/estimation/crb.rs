use serde::{Deserialize, Serialize};

use crate::array::{projector_g, steering_derivative, steering_vector, ArrayGeometry};
use crate::error::{Error, Result};
use crate::estimation::InterferenceCovariance;

/// Fisher terms at or below this value are treated as zero.
pub const UNIDENTIFIABLE: f64 = 1e-15;

/// `D̂† Ĝ D̂` with `D̂ = R_z^{-1/2} ∂a/∂θ` and `Ĝ` the projector orthogonal to
/// the whitened steering vector `R_z^{-1/2} a(θ)`.
pub fn fisher_term(theta: f64, rz: &InterferenceCovariance, geom: &ArrayGeometry) -> Result<f64> {
    if rz.dim() != geom.n_elements() {
        return Err(Error::DimensionMismatch(format!(
            "R_z is {0}x{0} but the array has {1} elements",
            rz.dim(),
            geom.n_elements()
        )));
    }
    let w = rz.whitener();
    let a = w * steering_vector(geom, theta)?.entries();
    let d = w * steering_derivative(geom, theta)?;
    let g = projector_g(&a);
    Ok((d.adjoint() * g * d)[(0, 0)].re)
}

/// `(1+k_t) / (2 L k_t P · D̂†ĜD̂)`.
///
/// `k_t = ∞` drops the Rician factor; `k_t = 0` leaves no LOS path and the
/// angle is unidentifiable.
pub fn crb(
    theta: f64,
    rz: &InterferenceCovariance,
    geom: &ArrayGeometry,
    training_len: usize,
    k_t: f64,
    power: f64,
) -> Result<f64> {
    if training_len == 0 {
        return Err(Error::InvalidParameter("training length must be >= 1".into()));
    }
    if !(power > 0.0 && power.is_finite()) {
        return Err(Error::InvalidParameter(format!("transmit power must be finite and > 0, got {power}")));
    }
    let k = crate::channel::check_k_factor(k_t)?;
    let f = fisher_term(theta, rz, geom)?;
    if f <= UNIDENTIFIABLE || k == 0.0 {
        return Err(Error::Unidentifiable(theta));
    }
    let rician = if k.is_infinite() { 1.0 } else { (1.0 + k) / k };
    Ok(rician / (2.0 * training_len as f64 * power * f))
}

/// CRB values (radians²) over an angle grid (radians).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrbCurve {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl CrbCurve {
    pub fn log10(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.log10()).collect()
    }
}

pub fn crb_curve(
    grid: &[f64],
    rz: &InterferenceCovariance,
    geom: &ArrayGeometry,
    training_len: usize,
    k_t: f64,
    power: f64,
) -> Result<CrbCurve> {
    let values = grid
        .iter()
        .map(|&t| crb(t, rz, geom, training_len, k_t, power))
        .collect::<Result<Vec<_>>>()?;
    Ok(CrbCurve { grid: grid.to_vec(), values })
}
