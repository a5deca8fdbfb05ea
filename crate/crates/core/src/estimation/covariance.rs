use serde::{Deserialize, Serialize};

use crate::channel::{expected_sandwich, RicianChannelSpec};
use crate::error::{Error, Result};
use crate::estimation::TrainingSequence;
use crate::jammer::PowerBudget;
use crate::linalg::{hermitian_defect, hermitian_part, CMatrix, CVector, HermitianEigen, C64, EIGEN_FLOOR};

/// What the receiver knows when it forms `R_z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KnowledgeLevel {
    /// Channel realizations and jamming signal known.
    PerfectCsi,
    /// Expectation over the fading with a known jammer covariance.
    Statistical,
    /// Expectation over the fading with the jammer assumed to spread its
    /// budget uniformly.
    WorstCaseAware,
    /// Thermal noise only.
    NoiseOnly,
}

/// Interference-plus-noise covariance `R_z` with its inverse and inverse
/// square root cached.
#[derive(Debug, Clone)]
pub struct InterferenceCovariance {
    matrix: CMatrix,
    knowledge: KnowledgeLevel,
    inverse: CMatrix,
    whitener: CMatrix,
}

impl InterferenceCovariance {
    /// Checks Hermitian symmetry (1e-12 relative to the largest entry) and
    /// positive definiteness, then symmetrises.
    pub fn new(matrix: CMatrix, knowledge: KnowledgeLevel) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "R_z must be square and nonempty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let scale = matrix.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !scale.is_finite() {
            return Err(Error::InvalidParameter("R_z has non-finite entries".into()));
        }
        let defect = hermitian_defect(&matrix);
        if defect > 1e-12 * scale.max(1.0) {
            return Err(Error::NotHermitian(defect));
        }
        let matrix = hermitian_part(&matrix);
        let eig = HermitianEigen::new(&matrix);
        let max = eig.values[0];
        let min = *eig.values.last().unwrap();
        if min < -1e-9 * max.max(1.0) {
            return Err(Error::NotPositiveSemidefinite(min));
        }
        if !(max > 0.0) || min <= EIGEN_FLOOR * max {
            return Err(Error::InvalidParameter(format!(
                "R_z is not positive definite (eigenvalues {min:e}..{max:e})"
            )));
        }
        let inverse = eig.map(|l| 1.0 / l);
        let whitener = eig.map(|l| 1.0 / l.sqrt());
        Ok(Self { matrix, knowledge, inverse, whitener })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn knowledge(&self) -> KnowledgeLevel {
        self.knowledge
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn inverse(&self) -> &CMatrix {
        &self.inverse
    }

    /// `R_z^{-1/2}`.
    pub fn whitener(&self) -> &CMatrix {
        &self.whitener
    }
}

fn check_noise(sigma_n2: f64) -> Result<()> {
    if !(sigma_n2 > 0.0 && sigma_n2.is_finite()) {
        return Err(Error::InvalidParameter(format!("noise power must be finite and > 0, got {sigma_n2}")));
    }
    Ok(())
}

fn slot<T>(items: &[T], l: usize) -> &T {
    &items[if items.len() == 1 { 0 } else { l }]
}

/// Sample interference covariance with known realizations:
/// `(1/L) Σ_l (h x + H_j X_j)(h x + H_j X_j)† + σ_n² I`.
///
/// `h_t_nlos` and `h_j` hold one entry per slot or a single entry shared by
/// all slots.
pub fn rz_perfect_csi(
    h_t_nlos: &[CVector],
    h_j: &[CMatrix],
    x_t: &TrainingSequence,
    x_j: &[CVector],
    sigma_n2: f64,
) -> Result<InterferenceCovariance> {
    check_noise(sigma_n2)?;
    let slots = x_t.len();
    for (name, len) in [("h_t_nlos", h_t_nlos.len()), ("h_j", h_j.len())] {
        if len != 1 && len != slots {
            return Err(Error::DimensionMismatch(format!("{name}: need 1 or {slots} entries, got {len}")));
        }
    }
    if x_j.len() != slots {
        return Err(Error::DimensionMismatch(format!("need {slots} jammer signals, got {}", x_j.len())));
    }
    let n_r = h_t_nlos[0].len();
    let n_j = h_j[0].ncols();
    if h_t_nlos.iter().any(|h| h.len() != n_r)
        || h_j.iter().any(|h| h.nrows() != n_r || h.ncols() != n_j)
        || x_j.iter().any(|x| x.len() != n_j)
    {
        return Err(Error::DimensionMismatch("inconsistent slot dimensions".into()));
    }
    let mut r = CMatrix::zeros(n_r, n_r);
    for (l, &x) in x_t.symbols().iter().enumerate() {
        let v = slot(h_t_nlos, l) * x + slot(h_j, l) * &x_j[l];
        r += &v * v.adjoint();
    }
    r.unscale_mut(slots as f64);
    for i in 0..n_r {
        r[(i, i)] += C64::new(sigma_n2, 0.0);
    }
    InterferenceCovariance::new(r, KnowledgeLevel::PerfectCsi)
}

/// `(P_t/(1+k_t) + σ_n²) I + E[H_j Q_j H_j†]`.
pub fn rz_statistical(
    spec_t: &RicianChannelSpec,
    spec_j: &RicianChannelSpec,
    q_j: &CMatrix,
    power: f64,
    sigma_n2: f64,
) -> Result<InterferenceCovariance> {
    build_statistical(spec_t, spec_j, q_j, power, sigma_n2, KnowledgeLevel::Statistical)
}

/// Statistical covariance for a jammer assumed to use `(P_j/n_j) I`, which
/// gives `P_j ((k_j/(1+k_j)) a_r a_r† + I/(1+k_j))` for the jamming part.
pub fn rz_worst_case_aware(
    spec_t: &RicianChannelSpec,
    spec_j: &RicianChannelSpec,
    budget: PowerBudget,
    power: f64,
    sigma_n2: f64,
) -> Result<InterferenceCovariance> {
    let n_j = spec_j.n_tx();
    let q = CMatrix::identity(n_j, n_j).scale(budget.total() / n_j as f64);
    build_statistical(spec_t, spec_j, &q, power, sigma_n2, KnowledgeLevel::WorstCaseAware)
}

pub fn rz_noise_only(n_r: usize, sigma_n2: f64) -> Result<InterferenceCovariance> {
    check_noise(sigma_n2)?;
    InterferenceCovariance::new(CMatrix::identity(n_r, n_r).scale(sigma_n2), KnowledgeLevel::NoiseOnly)
}

fn build_statistical(
    spec_t: &RicianChannelSpec,
    spec_j: &RicianChannelSpec,
    q_j: &CMatrix,
    power: f64,
    sigma_n2: f64,
    knowledge: KnowledgeLevel,
) -> Result<InterferenceCovariance> {
    check_noise(sigma_n2)?;
    if !(power >= 0.0 && power.is_finite()) {
        return Err(Error::InvalidParameter(format!("transmit power must be finite and >= 0, got {power}")));
    }
    if spec_t.n_rx() != spec_j.n_rx() {
        return Err(Error::DimensionMismatch(format!(
            "transmitter and jammer channels reach {} and {} antennas",
            spec_t.n_rx(),
            spec_j.n_rx()
        )));
    }
    let mut r = expected_sandwich(spec_j, q_j)?;
    let diffuse = power * spec_t.nlos_power() + sigma_n2;
    for i in 0..r.nrows() {
        r[(i, i)] += C64::new(diffuse, 0.0);
    }
    InterferenceCovariance::new(r, knowledge)
}
