use serde::{Deserialize, Serialize};

use crate::array::{check_angle, projector_g, steering_vector, ArrayGeometry};
use crate::error::{Error, Result};
use crate::estimation::{InterferenceCovariance, TrainingSequence};
use crate::linalg::{CMatrix, CVector};
use crate::par::{self, Execution};

/// Golden-section stopping width (radians).
pub const REFINE_TOLERANCE: f64 = 1e-6;

/// Ascending search angles (radians) within `[-π/2, π/2]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleGrid {
    angles: Vec<f64>,
    /// The same angles in degrees, kept exact for grids built from degrees.
    degrees: Vec<f64>,
}

impl AngleGrid {
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::EmptyGrid);
        }
        let angles = angles.into_iter().map(check_angle).collect::<Result<Vec<_>>>()?;
        if angles.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("grid angles must be strictly increasing".into()));
        }
        let degrees = angles.iter().map(|a| a.to_degrees()).collect();
        Ok(Self { angles, degrees })
    }

    /// `start, start + step, …` up to `stop` inclusive, in degrees. Points
    /// are rounded to 1e-9° so accumulated step error does not leak into the
    /// labels.
    pub fn degrees(start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite() && start.is_finite() && stop.is_finite()) || stop < start {
            return Err(Error::InvalidParameter(format!("bad grid {start}:{step}:{stop} (degrees)")));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        let degrees: Vec<f64> = (0..count)
            .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
            .collect();
        let mut grid = Self::new(degrees.iter().map(|d| d.to_radians()).collect())?;
        grid.degrees = degrees;
        Ok(grid)
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn degrees_values(&self) -> &[f64] {
        &self.degrees
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    /// Widest gap next to grid point `i`; zero for a single-point grid.
    pub fn cell(&self, i: usize) -> f64 {
        let left = if i > 0 { self.angles[i] - self.angles[i - 1] } else { 0.0 };
        let right = self.angles.get(i + 1).map_or(0.0, |r| r - self.angles[i]);
        left.max(right)
    }

    /// Largest spacing between neighbours.
    pub fn max_step(&self) -> f64 {
        self.angles.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }
}

impl Default for AngleGrid {
    /// −90°..90° in 0.1° steps.
    fn default() -> Self {
        Self::degrees(-90.0, 90.0, 0.1).expect("static grid")
    }
}

/// Likelihood surface normalised to a unit peak.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlSpectrum {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub argmax: f64,
    pub argmax_index: usize,
}

impl MlSpectrum {
    /// Indices whose value is no smaller than any neighbour's. Endpoints
    /// compare against their single neighbour.
    pub fn local_maxima(&self) -> Vec<usize> {
        let v = &self.values;
        (0..v.len())
            .filter(|&i| (i == 0 || v[i] >= v[i - 1]) && (i + 1 == v.len() || v[i] >= v[i + 1]))
            .collect()
    }

    /// Whether a local maximum lies within `tol` of `theta`.
    pub fn has_peak_near(&self, theta: f64, tol: f64) -> bool {
        self.local_maxima().iter().any(|&i| (self.grid[i] - theta).abs() <= tol)
    }
}

/// The two equivalent forms of the likelihood for one burst.
#[derive(Debug, Clone)]
pub struct MlObjective<'a> {
    geom: &'a ArrayGeometry,
    rz: &'a InterferenceCovariance,
    b: CVector,
    /// `R_z^{-1} B`.
    rb: CVector,
}

impl<'a> MlObjective<'a> {
    /// `B = R_xy†/R_xx` with `R_xy = (1/L) Σ x_t[l] Y†[l]`.
    pub fn new(
        y: &[CVector],
        x_t: &TrainingSequence,
        rz: &'a InterferenceCovariance,
        geom: &'a ArrayGeometry,
    ) -> Result<Self> {
        if y.is_empty() {
            return Err(Error::EmptyObservations);
        }
        if y.len() != x_t.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} observations for {} training symbols",
                y.len(),
                x_t.len()
            )));
        }
        let n = geom.n_elements();
        if rz.dim() != n || y.iter().any(|v| v.len() != n) {
            return Err(Error::DimensionMismatch(format!("array has {n} elements")));
        }
        let r_xx = x_t.mean_power();
        if !(r_xx > 0.0) {
            return Err(Error::DegenerateTraining);
        }
        let mut b = CVector::zeros(n);
        for (v, x) in y.iter().zip(x_t.symbols()) {
            b += v * x.conj();
        }
        b.unscale_mut(y.len() as f64 * r_xx);
        let rb = rz.inverse() * &b;
        Ok(Self { geom, rz, b, rb })
    }

    pub fn b(&self) -> &CVector {
        &self.b
    }

    /// `|a† R_z^{-1} B|² / (a† R_z^{-1} a)`.
    pub fn value(&self, theta: f64) -> Result<f64> {
        let a = steering_vector(self.geom, theta)?;
        Ok(ratio(a.entries(), &self.rb, self.rz.inverse()))
    }

    /// `B̂† Ĝ B̂` with `B̂ = R_z^{-1/2} B` and `Ĝ` orthogonal to
    /// `R_z^{-1/2} a(θ)`.
    pub fn projected_cost(&self, theta: f64) -> Result<f64> {
        let w = self.rz.whitener();
        let a = w * steering_vector(self.geom, theta)?.entries();
        let b = w * &self.b;
        Ok((b.adjoint() * projector_g(&a) * &b)[(0, 0)].re)
    }

    pub fn spectrum(&self, grid: &AngleGrid) -> Result<MlSpectrum> {
        self.spectrum_with(Execution::Sequential, grid)
    }

    pub fn spectrum_with(&self, exec: Execution, grid: &AngleGrid) -> Result<MlSpectrum> {
        let angles = grid.angles();
        let raw = par::try_map_indexed(exec, angles.len(), |i| self.value(angles[i])).map_err(|(_, e)| e)?;
        let (argmax_index, peak) = raw
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, v)| if v > best.1 { (i, v) } else { best });
        if !(peak > 0.0 && peak.is_finite()) {
            return Err(Error::DegenerateSpectrum);
        }
        Ok(MlSpectrum {
            grid: angles.to_vec(),
            values: raw.iter().map(|v| v / peak).collect(),
            argmax: angles[argmax_index],
            argmax_index,
        })
    }

    /// Golden-section search for the peak within one grid cell either side
    /// of the spectrum's argmax. Falls back to the grid point if the search
    /// does not improve on it.
    pub fn refine(&self, spectrum: &MlSpectrum, grid: &AngleGrid) -> Result<f64> {
        let i = spectrum.argmax_index;
        let cell = grid.cell(i);
        let centre = spectrum.argmax;
        if cell == 0.0 {
            return Ok(centre);
        }
        let half_pi = std::f64::consts::FRAC_PI_2;
        let (mut lo, mut hi) = ((centre - cell).max(-half_pi), (centre + cell).min(half_pi));
        let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
        let mut c = hi - inv_phi * (hi - lo);
        let mut d = lo + inv_phi * (hi - lo);
        let mut fc = self.value(c)?;
        let mut fd = self.value(d)?;
        while hi - lo > REFINE_TOLERANCE {
            if fc >= fd {
                hi = d;
                d = c;
                fd = fc;
                c = hi - inv_phi * (hi - lo);
                fc = self.value(c)?;
            } else {
                lo = c;
                c = d;
                fc = fd;
                d = lo + inv_phi * (hi - lo);
                fd = self.value(d)?;
            }
        }
        let best = 0.5 * (lo + hi);
        Ok(if self.value(best)? >= self.value(centre)? { best } else { centre })
    }
}

fn ratio(a: &CVector, rb: &CVector, r_inv: &CMatrix) -> f64 {
    let num = a.dotc(rb).norm_sqr();
    let den = a.dotc(&(r_inv * a)).re;
    num / den
}

pub fn ml_spectrum(
    y: &[CVector],
    x_t: &TrainingSequence,
    rz: &InterferenceCovariance,
    geom: &ArrayGeometry,
    grid: &AngleGrid,
) -> Result<MlSpectrum> {
    ml_spectrum_with(Execution::Sequential, y, x_t, rz, geom, grid)
}

pub fn ml_spectrum_with(
    exec: Execution,
    y: &[CVector],
    x_t: &TrainingSequence,
    rz: &InterferenceCovariance,
    geom: &ArrayGeometry,
    grid: &AngleGrid,
) -> Result<MlSpectrum> {
    MlObjective::new(y, x_t, rz, geom)?.spectrum_with(exec, grid)
}

/// Grid argmax of the spectrum, optionally refined.
pub fn estimate_aoa(
    y: &[CVector],
    x_t: &TrainingSequence,
    rz: &InterferenceCovariance,
    geom: &ArrayGeometry,
    grid: &AngleGrid,
    refine: bool,
) -> Result<f64> {
    let objective = MlObjective::new(y, x_t, rz, geom)?;
    let spectrum = objective.spectrum(grid)?;
    if refine {
        objective.refine(&spectrum, grid)
    } else {
        Ok(spectrum.argmax)
    }
}
