//! Monte Carlo harness: one burst per trial, channel and noise randomness
//! drawn from per-trial seed streams, trials run through [`par`].

use serde::{Deserialize, Serialize};

use crate::array::ArrayGeometry;
use crate::channel::{sample_channel_with, ChannelRealization, RicianChannelSpec};
use crate::error::{Error, Result};
use crate::estimation::{
    crb, rz_noise_only, rz_perfect_csi, rz_statistical, rz_worst_case_aware, AngleGrid, CrbCurve,
    InterferenceCovariance, MlObjective, MlSpectrum, TrainingSequence,
};
use crate::jammer::{aware_signal_with, sample_unaware_signal, unaware_allocation_for, PowerBudget};
use crate::linalg::{CMatrix, CVector};
use crate::par::{self, Execution};
use crate::seed::{complex_normal_vector, stream, Seed};

/// Transmit power `P_t`; the noise power follows from the SNR relative to it.
pub const TRANSMIT_POWER: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JammerMode {
    Aware,
    Unaware,
    UniformUnaware,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReceiverKnowledge {
    PerfectCsi,
    Statistical,
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub rx: ArrayGeometry,
    pub jammer: ArrayGeometry,
    pub theta_t: f64,
    pub theta_j: f64,
    /// Jammer angle of departure.
    pub phi_j: f64,
    pub k_t: f64,
    pub k_j: f64,
    pub training_len: usize,
    pub snr_db: f64,
    /// `P_j / P_t`.
    pub power_ratio: f64,
    pub jammer_mode: JammerMode,
    pub receiver_knowledge: ReceiverKnowledge,
    pub trials: usize,
    pub seed: Seed,
    /// One channel draw per burst instead of one per slot.
    pub block_fading: bool,
    pub grid: AngleGrid,
    pub refine: bool,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be >= 1".into()));
        }
        if self.training_len == 0 {
            return Err(Error::InvalidParameter("training length must be >= 1".into()));
        }
        if !(self.power_ratio >= 0.0 && self.power_ratio.is_finite()) {
            return Err(Error::InvalidParameter(format!("power ratio must be >= 0, got {}", self.power_ratio)));
        }
        if !self.snr_db.is_finite() {
            return Err(Error::InvalidParameter(format!("SNR must be finite, got {}", self.snr_db)));
        }
        self.transmitter_channel()?;
        self.jammer_channel()?;
        Ok(())
    }

    /// `σ_n² = P_t / 10^(snr/10)`.
    pub fn noise_power(&self) -> f64 {
        TRANSMIT_POWER / 10f64.powf(self.snr_db / 10.0)
    }

    pub fn jammer_budget(&self) -> Result<PowerBudget> {
        PowerBudget::new(self.power_ratio * TRANSMIT_POWER)
    }

    pub fn transmitter_channel(&self) -> Result<RicianChannelSpec> {
        RicianChannelSpec::single_antenna(self.k_t, self.theta_t, self.rx)
    }

    pub fn jammer_channel(&self) -> Result<RicianChannelSpec> {
        RicianChannelSpec::new(self.k_j, self.theta_j, self.phi_j, self.rx, self.jammer)
    }

    pub fn training(&self) -> Result<TrainingSequence> {
        TrainingSequence::gaussian(self.training_len, self.seed.child(stream::TRAINING))
    }

    pub fn trial_seed(&self, index: usize) -> Seed {
        self.seed.path(&[stream::TRIALS, index as u64])
    }

    /// Jammer covariance the statistical receiver and the CRB attribute to
    /// the configured mode.
    pub fn jammer_covariance(&self) -> Result<CMatrix> {
        let n_j = self.jammer.n_elements();
        let budget = self.jammer_budget()?;
        Ok(match self.jammer_mode {
            JammerMode::None => CMatrix::zeros(n_j, n_j),
            JammerMode::Unaware => unaware_allocation_for(&self.jammer_channel()?, budget)?,
            JammerMode::Aware | JammerMode::UniformUnaware => {
                CMatrix::identity(n_j, n_j).scale(budget.total() / n_j as f64)
            }
        })
    }

    /// Angular tolerance for "within one grid cell".
    pub fn cell(&self) -> f64 {
        self.grid.max_step() + 1e-9
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub index: usize,
    pub theta_hat: f64,
    /// Present for the first trial only.
    pub spectrum: Option<MlSpectrum>,
    pub sjnr_db: f64,
    /// Local maxima within one grid cell of both `θ_t` and `θ_j`.
    pub dual_peak: bool,
    /// Labels leading from the master seed to this trial's seed.
    pub seed_path: [u64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSummary {
    pub trials: usize,
    pub mean_theta_hat: f64,
    pub var_theta_hat: f64,
    /// Fraction of estimates nearer `θ_j` than `θ_t`.
    pub capture_rate: f64,
    /// Fraction of estimates within one grid cell of `θ_t`.
    pub hit_rate: f64,
    pub dual_peak_rate: f64,
    /// `+∞` when the angle is unidentifiable.
    pub crb_at_theta_t: f64,
    pub mean_sjnr_db: f64,
}

impl ScenarioSummary {
    pub fn efficiency(&self) -> f64 {
        self.var_theta_hat / self.crb_at_theta_t
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRun {
    pub summary: ScenarioSummary,
    pub records: Vec<TrialRecord>,
}

impl ScenarioRun {
    pub fn first_spectrum(&self) -> Option<&MlSpectrum> {
        self.records.first().and_then(|r| r.spectrum.as_ref())
    }
}

pub fn run_scenario(s: &Scenario) -> Result<ScenarioRun> {
    run_scenario_with(Execution::default(), s)
}

pub fn run_scenario_with(exec: Execution, s: &Scenario) -> Result<ScenarioRun> {
    s.validate()?;
    let ctx = Context::new(s)?;
    let records = par::try_map_indexed(exec, s.trials, |i| ctx.trial(i))
        .map_err(|(index, e)| Error::Trial { index, source: Box::new(e) })?;
    let summary = summarise(s, &records)?;
    Ok(ScenarioRun { summary, records })
}

/// Scenario-wide quantities shared by every trial.
struct Context<'a> {
    s: &'a Scenario,
    training: TrainingSequence,
    spec_t: RicianChannelSpec,
    spec_j: RicianChannelSpec,
    budget: PowerBudget,
    sigma_n2: f64,
    /// Jammer covariance for the Gaussian modes.
    q_j: Option<CMatrix>,
    /// Receiver covariance when it does not depend on the realization.
    fixed_rz: Option<InterferenceCovariance>,
}

impl<'a> Context<'a> {
    fn new(s: &'a Scenario) -> Result<Self> {
        let spec_t = s.transmitter_channel()?;
        let spec_j = s.jammer_channel()?;
        let budget = s.jammer_budget()?;
        let sigma_n2 = s.noise_power();
        let q_j = match s.jammer_mode {
            JammerMode::Unaware | JammerMode::UniformUnaware => Some(s.jammer_covariance()?),
            JammerMode::Aware | JammerMode::None => None,
        };
        let fixed_rz = match s.receiver_knowledge {
            ReceiverKnowledge::PerfectCsi => None,
            ReceiverKnowledge::None => Some(rz_noise_only(s.rx.n_elements(), sigma_n2)?),
            ReceiverKnowledge::Statistical => Some(match s.jammer_mode {
                JammerMode::None => {
                    let n_j = s.jammer.n_elements();
                    rz_statistical(&spec_t, &spec_j, &CMatrix::zeros(n_j, n_j), TRANSMIT_POWER, sigma_n2)?
                }
                _ => rz_worst_case_aware(&spec_t, &spec_j, budget, TRANSMIT_POWER, sigma_n2)?,
            }),
        };
        Ok(Self {
            s,
            training: s.training()?,
            spec_t,
            spec_j,
            budget,
            sigma_n2,
            q_j,
            fixed_rz,
        })
    }

    fn trial(&self, index: usize) -> Result<TrialRecord> {
        let s = self.s;
        let seed = s.trial_seed(index);
        let slots = s.training_len;
        let draws = if s.block_fading { 1 } else { slots };
        let n_r = s.rx.n_elements();
        let n_j = s.jammer.n_elements();

        let h_t = draw_channels(&self.spec_t, seed.child(stream::TX_CHANNEL), draws);
        let h_j = draw_channels(&self.spec_j, seed.child(stream::JAM_CHANNEL), draws);
        let h_j_total: Vec<CMatrix> = h_j.iter().map(|h| h.total.clone()).collect();

        let x_j: Vec<CVector> = match s.jammer_mode {
            JammerMode::None => vec![CVector::zeros(n_j); slots],
            JammerMode::Aware => {
                aware_signal_with(Execution::Sequential, &h_j_total, &self.training, self.budget)?.signals
            }
            JammerMode::Unaware | JammerMode::UniformUnaware => {
                let q = self.q_j.as_ref().expect("Gaussian modes carry a covariance");
                sample_unaware_signal(q, slots, seed.child(stream::JAMMER))?
            }
        };

        let mut noise_rng = seed.child(stream::NOISE).rng();
        let noise_amp = self.sigma_n2.sqrt();
        let pick = |l: usize| if draws == 1 { 0 } else { l };
        let mut y = Vec::with_capacity(slots);
        let mut signal_energy = 0.0;
        let mut interference_energy = 0.0;
        for (l, &x) in self.training.symbols().iter().enumerate() {
            let wanted = h_t[pick(l)].total.column(0) * x;
            let jamming = &h_j_total[pick(l)] * &x_j[l];
            signal_energy += wanted.norm_squared();
            interference_energy += jamming.norm_squared() + self.sigma_n2;
            let noise = complex_normal_vector(&mut noise_rng, n_r).scale(noise_amp);
            y.push(wanted + jamming + noise);
        }
        let sjnr_db = 10.0 * (signal_energy / interference_energy).log10();

        let perfect;
        let rz = match &self.fixed_rz {
            Some(rz) => rz,
            None => {
                let h_nlos: Vec<CVector> = h_t.iter().map(|h| h.nlos.column(0).into_owned()).collect();
                perfect = rz_perfect_csi(&h_nlos, &h_j_total, &self.training, &x_j, self.sigma_n2)?;
                &perfect
            }
        };

        let objective = MlObjective::new(&y, &self.training, rz, &s.rx)?;
        let spectrum = objective.spectrum(&s.grid)?;
        let theta_hat = if s.refine { objective.refine(&spectrum, &s.grid)? } else { spectrum.argmax };
        let cell = s.cell();
        let dual_peak = spectrum.has_peak_near(s.theta_t, cell) && spectrum.has_peak_near(s.theta_j, cell);
        Ok(TrialRecord {
            index,
            theta_hat,
            spectrum: (index == 0).then_some(spectrum),
            sjnr_db,
            dual_peak,
            seed_path: [stream::TRIALS, index as u64],
        })
    }
}

fn draw_channels(spec: &RicianChannelSpec, seed: Seed, count: usize) -> Vec<ChannelRealization> {
    let mut rng = seed.rng();
    (0..count).map(|_| sample_channel_with(spec, &mut rng)).collect()
}

fn summarise(s: &Scenario, records: &[TrialRecord]) -> Result<ScenarioSummary> {
    let n = records.len() as f64;
    let mean = records.iter().map(|r| r.theta_hat).sum::<f64>() / n;
    let var = if records.len() > 1 {
        records.iter().map(|r| (r.theta_hat - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let rate = |f: &dyn Fn(&TrialRecord) -> bool| records.iter().filter(|r| f(r)).count() as f64 / n;
    let cell = s.cell();
    let crb_at_theta_t = match crb_for(s, &s.jammer_covariance()?, s.theta_t) {
        Ok(v) => v,
        Err(Error::Unidentifiable(_)) => f64::INFINITY,
        Err(e) => return Err(e),
    };
    Ok(ScenarioSummary {
        trials: records.len(),
        mean_theta_hat: mean,
        var_theta_hat: var,
        capture_rate: rate(&|r| (r.theta_hat - s.theta_j).abs() < (r.theta_hat - s.theta_t).abs()),
        hit_rate: rate(&|r| (r.theta_hat - s.theta_t).abs() <= cell),
        dual_peak_rate: rate(&|r| r.dual_peak),
        crb_at_theta_t,
        mean_sjnr_db: records.iter().map(|r| r.sjnr_db).sum::<f64>() / n,
    })
}

fn statistical_rz(s: &Scenario, q_j: &CMatrix) -> Result<InterferenceCovariance> {
    rz_statistical(&s.transmitter_channel()?, &s.jammer_channel()?, q_j, TRANSMIT_POWER, s.noise_power())
}

fn crb_for(s: &Scenario, q_j: &CMatrix, theta: f64) -> Result<f64> {
    crb(theta, &statistical_rz(s, q_j)?, &s.rx, s.training_len, s.k_t, TRANSMIT_POWER)
}

/// CRB curves for the three jammer covariances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrbSweep {
    pub free: CrbCurve,
    pub uniform: CrbCurve,
    pub optimal: CrbCurve,
}

/// CRB over `grid` with no jamming, uniform `(P_j/n_j) I` jamming and the
/// signal-unaware optimum, all evaluated with the statistical `R_z`.
/// Unidentifiable angles (endfire, or `k_t = 0`) map to `+∞`.
pub fn crb_sweep(s: &Scenario, grid: &[f64]) -> Result<CrbSweep> {
    let n_j = s.jammer.n_elements();
    let budget = s.jammer_budget()?;
    let uniform_q = CMatrix::identity(n_j, n_j).scale(budget.total() / n_j as f64);
    let optimal_q = unaware_allocation_for(&s.jammer_channel()?, budget)?;
    let curve = |q: &CMatrix| -> Result<CrbCurve> {
        let rz = statistical_rz(s, q)?;
        let values = grid
            .iter()
            .map(|&t| match crb(t, &rz, &s.rx, s.training_len, s.k_t, TRANSMIT_POWER) {
                Err(Error::Unidentifiable(_)) => Ok(f64::INFINITY),
                other => other,
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CrbCurve { grid: grid.to_vec(), values })
    };
    Ok(CrbSweep {
        free: curve(&CMatrix::zeros(n_j, n_j))?,
        uniform: curve(&uniform_q)?,
        optimal: curve(&optimal_q)?,
    })
}

/// `10 log10(‖H_t x_t‖² / (‖H_j X_j‖² + σ_n²))` for one slot.
pub fn sjnr(h_t: &CMatrix, x_t: &CVector, h_j: &CMatrix, x_j: &CVector, sigma_n2: f64) -> Result<f64> {
    if h_t.ncols() != x_t.len() || h_j.ncols() != x_j.len() || h_t.nrows() != h_j.nrows() {
        return Err(Error::DimensionMismatch("SJNR operands disagree in shape".into()));
    }
    let s = (h_t * x_t).norm_squared();
    let j = (h_j * x_j).norm_squared();
    Ok(10.0 * (s / (j + sigma_n2)).log10())
}
