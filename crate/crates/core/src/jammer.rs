//! Jammer strategies.
//!
//! * Signal-unaware: Gaussian signalling with a covariance that favours the
//!   dominant eigenmode of the jammer channel's correlation `Υ`.
//! * Signal-aware: per slot, water-fill the budget over the eigenmodes of
//!   `H_j† H_j` and phase-align every mode with the training symbol.

use serde::{Deserialize, Serialize};

use crate::array::steering_vector;
use crate::channel::RicianChannelSpec;
use crate::error::{Error, Result};
use crate::estimation::TrainingSequence;
use crate::linalg::{check_psd, psd_factor, trace_re, CMatrix, CVector, HermitianEigen, C64};
use crate::par::{self, Execution};
use crate::seed::{complex_normal_vector, Seed};

/// Slack on power constraints.
pub const BUDGET_SLACK: f64 = 1e-9;

/// Total jammer power `P_j`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct PowerBudget(f64);

impl PowerBudget {
    pub fn new(total: f64) -> Result<Self> {
        if !(total >= 0.0 && total.is_finite()) {
            return Err(Error::InvalidParameter(format!("power budget must be finite and >= 0, got {total}")));
        }
        Ok(Self(total))
    }

    pub fn total(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum JammerStrategy {
    /// `X_j[l] ~ CN(0, Q_j)` independently per slot.
    Unaware { covariance: CMatrix },
    /// Explicit per-slot signals.
    Aware { signals: Vec<CVector> },
}

impl JammerStrategy {
    pub fn check_budget(&self, budget: PowerBudget) -> Result<()> {
        let cap = budget.total() + BUDGET_SLACK;
        match self {
            JammerStrategy::Unaware { covariance } => {
                let t = trace_re(covariance);
                if t > cap {
                    return Err(Error::InvalidParameter(format!("tr(Q_j) = {t} exceeds budget {}", budget.total())));
                }
            }
            JammerStrategy::Aware { signals } => {
                for (l, x) in signals.iter().enumerate() {
                    let p = x.norm_squared();
                    if p > cap {
                        return Err(Error::InvalidParameter(format!(
                            "slot {l} power {p} exceeds budget {}",
                            budget.total()
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaterFillingSolution {
    pub allocations: Vec<f64>,
    /// Water level; mode `i` receives `(level − 1/λ_i)^+`.
    pub level: f64,
}

impl WaterFillingSolution {
    pub fn total(&self) -> f64 {
        self.allocations.iter().sum()
    }
}

/// Distributes `budget` as `(level − 1/λ_i)^+` over the given eigenvalues.
///
/// The level is bracketed and bisected until the allocated power is within
/// `1e-12 · max(1, budget)` of the budget; the active set found this way is
/// then used to solve for the level exactly. Zero eigenvalues never receive
/// power.
pub fn water_fill(eigenvalues: &[f64], budget: f64) -> Result<WaterFillingSolution> {
    if !(budget >= 0.0 && budget.is_finite()) {
        return Err(Error::InvalidParameter(format!("budget must be finite and >= 0, got {budget}")));
    }
    if let Some(bad) = eigenvalues.iter().find(|l| l.is_nan() || **l < 0.0) {
        return Err(Error::InvalidParameter(format!("eigenvalues must be >= 0, got {bad}")));
    }
    let inv: Vec<f64> = eigenvalues
        .iter()
        .map(|&l| if l > 0.0 { 1.0 / l } else { f64::INFINITY })
        .collect();
    let floor = inv.iter().copied().fold(f64::INFINITY, f64::min);

    if budget == 0.0 {
        let level = if floor.is_finite() { floor } else { 0.0 };
        return Ok(WaterFillingSolution { allocations: vec![0.0; eigenvalues.len()], level });
    }
    if !floor.is_finite() {
        return Err(Error::NoUsableMode);
    }

    let filled = |level: f64| inv.iter().map(|&v| (level - v).max(0.0)).sum::<f64>();
    let tol = 1e-12 * budget.max(1.0);
    let (mut lo, mut hi) = (floor, floor + budget);
    let mut level = hi;
    for _ in 0..200 {
        level = 0.5 * (lo + hi);
        let f = filled(level);
        if (f - budget).abs() <= tol {
            break;
        }
        if f < budget {
            lo = level;
        } else {
            hi = level;
        }
    }

    // Snap to the exact level for the active set, if it is self-consistent.
    let active: Vec<f64> = inv.iter().copied().filter(|&v| v < level).collect();
    if !active.is_empty() {
        let exact = (budget + active.iter().sum::<f64>()) / active.len() as f64;
        let consistent = inv.iter().all(|&v| (v < level) == (v < exact));
        if consistent {
            level = exact;
        }
    }
    let allocations = inv.iter().map(|&v| (level - v).max(0.0)).collect();
    Ok(WaterFillingSolution { allocations, level })
}

/// Diagonal of the signal-unaware covariance in the eigenbasis of `Υ`,
/// dominant mode first.
pub fn unaware_diagonal(n_j: usize, n_r: usize, k_j: f64, budget: PowerBudget) -> Result<Vec<f64>> {
    if n_j == 0 || n_r == 0 {
        return Err(Error::InvalidParameter("array sizes must be >= 1".into()));
    }
    let k = crate::channel::check_k_factor(k_j)?;
    let per_antenna = budget.total() / n_j as f64;
    let threshold = if k.is_infinite() {
        f64::INFINITY
    } else {
        k * (1.0 + k) / (n_r as f64 * (1.0 + n_j as f64 * k))
    };
    let excess = (per_antenna - threshold).max(0.0);
    let first = per_antenna.min(threshold) * n_j as f64 + excess;
    let mut d = vec![excess; n_j];
    d[0] = first;
    Ok(d)
}

/// Signal-unaware covariance in antenna coordinates for a broadside
/// departure angle.
pub fn unaware_allocation(n_j: usize, n_r: usize, k_j: f64, budget: PowerBudget) -> Result<CMatrix> {
    let dominant = CVector::from_element(n_j, C64::new(1.0 / (n_j as f64).sqrt(), 0.0));
    rotate_allocation(&unaware_diagonal(n_j, n_r, k_j, budget)?, &dominant)
}

/// Signal-unaware covariance for the jammer channel `spec`, whose dominant
/// correlation eigenvector is `a_t(φ)/√n_j`.
pub fn unaware_allocation_for(spec: &RicianChannelSpec, budget: PowerBudget) -> Result<CMatrix> {
    let n_j = spec.n_tx();
    let at = steering_vector(spec.tx(), spec.aod())?.into_entries();
    let dominant = at.unscale((n_j as f64).sqrt());
    rotate_allocation(&unaware_diagonal(n_j, spec.n_rx(), spec.k_factor(), budget)?, &dominant)
}

/// `U diag(d) U†` where the first column of `U` is `dominant` and the other
/// eigenvalues of `Υ` are all equal, so `U diag(d) U† = d₂ I + (d₁ − d₂) u u†`
/// independent of the basis chosen for the degenerate subspace.
fn rotate_allocation(diag: &[f64], dominant: &CVector) -> Result<CMatrix> {
    let n = diag.len();
    let rest = if n > 1 { diag[1] } else { 0.0 };
    let mut q = (dominant * dominant.adjoint()).scale(diag[0] - rest);
    for i in 0..n {
        q[(i, i)] += C64::new(rest, 0.0);
    }
    Ok(q)
}

/// `L` i.i.d. draws from CN(0, Q_j).
pub fn sample_unaware_signal(q: &CMatrix, slots: usize, seed: Seed) -> Result<Vec<CVector>> {
    let scale = q.iter().map(|z| z.norm()).fold(1.0, f64::max);
    check_psd(q, 1e-12 * scale, 1e-9)?;
    let factor = psd_factor(q);
    let mut rng = seed.rng();
    Ok((0..slots)
        .map(|_| &factor * complex_normal_vector(&mut rng, q.nrows()))
        .collect())
}

/// Signal-aware jamming for one burst.
#[derive(Debug, Clone, PartialEq)]
pub struct AwareSignal {
    pub signals: Vec<CVector>,
    /// `‖X_j[l]‖²` before rescaling each slot to the full budget.
    pub pre_normalization_power: Vec<f64>,
    /// Water-filling result for every distinct channel matrix supplied.
    pub allocations: Vec<WaterFillingSolution>,
}

impl From<AwareSignal> for JammerStrategy {
    fn from(a: AwareSignal) -> Self {
        JammerStrategy::Aware { signals: a.signals }
    }
}

/// Builds the training-aligned jamming signal.
///
/// `h_j` holds one jammer channel per slot, or a single matrix shared by every
/// slot (block fading). For each slot the budget is water-filled over the
/// `min(n_r, n_j)` leading eigenvalues of `H_j† H_j`; mode `i` carries
/// `√p_i · x_t[l]/|x_t[l]|²`, the result is rotated back to antenna
/// coordinates and then rescaled so that `‖X_j[l]‖² = P_j`.
pub fn aware_signal(h_j: &[CMatrix], x_t: &TrainingSequence, budget: PowerBudget) -> Result<AwareSignal> {
    aware_signal_with(Execution::default(), h_j, x_t, budget)
}

pub fn aware_signal_with(
    exec: Execution,
    h_j: &[CMatrix],
    x_t: &TrainingSequence,
    budget: PowerBudget,
) -> Result<AwareSignal> {
    let slots = x_t.len();
    if h_j.len() != slots && h_j.len() != 1 {
        return Err(Error::DimensionMismatch(format!(
            "need 1 or {slots} jammer channels, got {}",
            h_j.len()
        )));
    }
    if let Some(l) = x_t.symbols().iter().position(|x| x.norm_sqr() == 0.0) {
        return Err(Error::ZeroTrainingSymbol(l));
    }
    let n_j = h_j[0].ncols();
    if h_j.iter().any(|h| h.ncols() != n_j || h.nrows() != h_j[0].nrows()) {
        return Err(Error::DimensionMismatch("jammer channels differ in shape".into()));
    }

    let modes = par::try_map_indexed(exec, h_j.len(), |i| {
        let h = &h_j[i];
        let eig = HermitianEigen::new(&(h.adjoint() * h));
        let n = h.nrows().min(n_j);
        let lambdas: Vec<f64> = eig.values[..n].iter().map(|l| l.max(0.0)).collect();
        let wf = water_fill(&lambdas, budget.total())?;
        let mut amplitudes = CVector::zeros(n_j);
        for (k, p) in wf.allocations.iter().enumerate() {
            amplitudes[k] = C64::new(p.sqrt(), 0.0);
        }
        // Direction in antenna coordinates; the slot symbol scales it.
        Ok::<_, Error>((&eig.vectors * amplitudes, wf))
    })
    .map_err(|(_, e)| e)?;

    let mut signals = Vec::with_capacity(slots);
    let mut pre = Vec::with_capacity(slots);
    for (l, &x) in x_t.symbols().iter().enumerate() {
        let (direction, _) = &modes[if modes.len() == 1 { 0 } else { l }];
        let mut s = direction.map(|z| z * x / x.norm_sqr());
        let p = s.norm_squared();
        pre.push(p);
        if p > 0.0 {
            s.scale_mut((budget.total() / p).sqrt());
        }
        signals.push(s);
    }
    Ok(AwareSignal {
        signals,
        pre_normalization_power: pre,
        allocations: modes.into_iter().map(|(_, wf)| wf).collect(),
    })
}

/// Jammer's per-slot objective for the aware case:
/// `Re tr(H_t^NLOS x_t X_j† H_j†) + tr(H_j† H_j X_j X_j†)`.
pub fn aware_objective(h_t_nlos: &CVector, x_t: C64, h_j: &CMatrix, x_j: &CVector) -> f64 {
    let received = h_j * x_j;
    let cross = received.dotc(h_t_nlos) * x_t;
    cross.re + received.norm_squared()
}
