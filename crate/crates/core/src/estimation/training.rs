use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::seed::{complex_normal, Seed};

/// Relative slack when checking the power caps.
const CAP_SLACK: f64 = 1e-12;

/// Known pilot symbols `x_t[1..L]` with their power caps.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSequence {
    symbols: Vec<C64>,
    p_max: f64,
    p_tot: f64,
}

impl TrainingSequence {
    pub fn new(symbols: Vec<C64>, p_max: f64, p_tot: f64) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::TrainingPower("training sequence is empty".into()));
        }
        if !(p_max >= 0.0 && p_tot >= 0.0 && p_max.is_finite() && p_tot.is_finite()) {
            return Err(Error::TrainingPower(format!("invalid caps p_max = {p_max}, p_tot = {p_tot}")));
        }
        if let Some((l, x)) = symbols.iter().enumerate().find(|(_, x)| !x.re.is_finite() || !x.im.is_finite()) {
            return Err(Error::TrainingPower(format!("symbol {l} is not finite: {x}")));
        }
        if let Some((l, x)) = symbols
            .iter()
            .enumerate()
            .find(|(_, x)| x.norm_sqr() > p_max * (1.0 + CAP_SLACK))
        {
            return Err(Error::TrainingPower(format!(
                "symbol {l} has power {} above p_max = {p_max}",
                x.norm_sqr()
            )));
        }
        let total: f64 = symbols.iter().map(|x| x.norm_sqr()).sum();
        if total > p_tot * (1.0 + CAP_SLACK) {
            return Err(Error::TrainingPower(format!("total power {total} above p_tot = {p_tot}")));
        }
        Ok(Self { symbols, p_max, p_tot })
    }

    /// `len` draws from CN(0, 1), rescaled to unit mean power. The caps are
    /// set to the realised peak and total power.
    pub fn gaussian(len: usize, seed: Seed) -> Result<Self> {
        if len == 0 {
            return Err(Error::TrainingPower("training sequence is empty".into()));
        }
        let mut rng = seed.rng();
        let mut symbols: Vec<C64> = (0..len).map(|_| complex_normal(&mut rng)).collect();
        let mean = symbols.iter().map(|x| x.norm_sqr()).sum::<f64>() / len as f64;
        let scale = 1.0 / mean.sqrt();
        for x in &mut symbols {
            *x *= scale;
        }
        let p_max = symbols.iter().map(|x| x.norm_sqr()).fold(0.0, f64::max);
        let p_tot = symbols.iter().map(|x| x.norm_sqr()).sum();
        Self::new(symbols, p_max, p_tot)
    }

    pub fn symbols(&self) -> &[C64] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    pub fn p_tot(&self) -> f64 {
        self.p_tot
    }

    /// `R_xx = (1/L) Σ |x_t[l]|²`.
    pub fn mean_power(&self) -> f64 {
        self.symbols.iter().map(|x| x.norm_sqr()).sum::<f64>() / self.len() as f64
    }
}
