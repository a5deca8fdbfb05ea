//! Rician flat-fading channels: realizations split into their LOS and NLOS
//! parts, and the closed-form second-order statistics used for jammer design
//! and for the receiver's statistical interference model.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::array::{check_angle, steering_vector, ArrayGeometry};
use crate::error::{Error, Result};
use crate::linalg::{check_psd, trace_re, CMatrix, C64};
use crate::seed::{complex_normal_matrix, Seed};

/// Fixed LOS phase `(1 + j)/√2`.
pub const LOS_PHASE: C64 = C64::new(std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2);

/// LOS scale `μ = √(k/(1+k))`; `k = ∞` is the pure-LOS limit.
pub fn los_scale(k: f64) -> f64 {
    if k.is_infinite() {
        1.0
    } else {
        (k / (1.0 + k)).sqrt()
    }
}

/// NLOS scale `σ = √(1/(2(1+k)))`.
pub fn nlos_scale(k: f64) -> f64 {
    if k.is_infinite() {
        0.0
    } else {
        (0.5 / (1.0 + k)).sqrt()
    }
}

/// Rician factor as a linear ratio, validated non-negative (infinity allowed).
pub fn check_k_factor(k: f64) -> Result<f64> {
    if k.is_nan() || k < 0.0 {
        return Err(Error::InvalidParameter(format!("Rician factor must be >= 0, got {k}")));
    }
    Ok(k)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RicianChannelSpec {
    k_factor: f64,
    /// Angle of arrival at the receiving array (radians).
    aoa: f64,
    /// Angle of departure at the transmitting array (radians).
    aod: f64,
    rx: ArrayGeometry,
    tx: ArrayGeometry,
}

impl RicianChannelSpec {
    pub fn new(k_factor: f64, aoa: f64, aod: f64, rx: ArrayGeometry, tx: ArrayGeometry) -> Result<Self> {
        Ok(Self {
            k_factor: check_k_factor(k_factor)?,
            aoa: check_angle(aoa)?,
            aod: check_angle(aod)?,
            rx,
            tx,
        })
    }

    /// Channel from a single-antenna terminal.
    pub fn single_antenna(k_factor: f64, aoa: f64, rx: ArrayGeometry) -> Result<Self> {
        Self::new(k_factor, aoa, 0.0, rx, ArrayGeometry::single())
    }

    pub fn k_factor(&self) -> f64 {
        self.k_factor
    }

    pub fn mu(&self) -> f64 {
        los_scale(self.k_factor)
    }

    pub fn sigma(&self) -> f64 {
        nlos_scale(self.k_factor)
    }

    /// Per-entry NLOS power `2σ² = 1/(1+k)`.
    pub fn nlos_power(&self) -> f64 {
        let s = self.sigma();
        2.0 * s * s
    }

    pub fn aoa(&self) -> f64 {
        self.aoa
    }

    pub fn aod(&self) -> f64 {
        self.aod
    }

    pub fn rx(&self) -> &ArrayGeometry {
        &self.rx
    }

    pub fn tx(&self) -> &ArrayGeometry {
        &self.tx
    }

    pub fn n_rx(&self) -> usize {
        self.rx.n_elements()
    }

    pub fn n_tx(&self) -> usize {
        self.tx.n_elements()
    }

    /// `Ψ = ((1+j)/√2) a_r(θ) a_t†(φ)`. A single-element transmitter has
    /// `a_t = 1`.
    pub fn psi(&self) -> CMatrix {
        let ar = steering_vector(&self.rx, self.aoa).expect("validated angle").into_entries();
        let at = steering_vector(&self.tx, self.aod).expect("validated angle").into_entries();
        (ar * at.adjoint()).map(|z| z * LOS_PHASE)
    }

    /// Deterministic component `μ Ψ`.
    pub fn los(&self) -> CMatrix {
        self.psi().scale(self.mu())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub los: CMatrix,
    pub nlos: CMatrix,
    pub total: CMatrix,
}

pub fn sample_channel(spec: &RicianChannelSpec, seed: Seed) -> ChannelRealization {
    sample_channel_with(spec, &mut seed.rng())
}

/// Draws `H = μΨ + H_nlos` with `H_nlos` entries i.i.d. CN(0, 1/(1+k)).
pub fn sample_channel_with<R: Rng + ?Sized>(spec: &RicianChannelSpec, rng: &mut R) -> ChannelRealization {
    let los = spec.los();
    let scale = spec.nlos_power().sqrt();
    let nlos = complex_normal_matrix(rng, spec.n_rx(), spec.n_tx()).scale(scale);
    let total = &los + &nlos;
    ChannelRealization { los, nlos, total }
}

/// Correlation matrix `Υ`: ones on the diagonal, `k/(1+k)` elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationUpsilon {
    matrix: DMatrix<f64>,
    k_factor: f64,
}

impl CorrelationUpsilon {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Closed-form spectrum in descending order: `(1 + n k)/(1 + k)` once,
    /// then `1/(1 + k)` with multiplicity `n − 1`.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let n = self.dim();
        let k = self.k_factor;
        let (top, rest) = if k.is_infinite() {
            (n as f64, 0.0)
        } else {
            ((1.0 + n as f64 * k) / (1.0 + k), 1.0 / (1.0 + k))
        };
        std::iter::once(top).chain(std::iter::repeat_n(rest, n - 1)).collect()
    }
}

pub fn upsilon(n_j: usize, k_j: f64) -> Result<CorrelationUpsilon> {
    if n_j == 0 {
        return Err(Error::InvalidParameter("upsilon needs n_j >= 1".into()));
    }
    let k = check_k_factor(k_j)?;
    let off = if k.is_infinite() { 1.0 } else { k / (1.0 + k) };
    let matrix = DMatrix::from_fn(n_j, n_j, |i, j| if i == j { 1.0 } else { off });
    Ok(CorrelationUpsilon { matrix, k_factor: k })
}

/// `E[H†H] = n_r (μ² a_t a_t† + 2σ² I)`.
///
/// For a broadside departure angle `a_t` is all ones and this is `n_r Υ`; at
/// other departure angles it is `n_r Υ` conjugated by `diag(a_t)`, which has
/// the same eigenvalues.
pub fn expected_gram(spec: &RicianChannelSpec) -> CMatrix {
    let at = steering_vector(spec.tx(), spec.aod()).expect("validated angle").into_entries();
    let mu2 = spec.mu().powi(2);
    let n_t = spec.n_tx();
    let mut m = (&at * at.adjoint()).scale(mu2);
    for i in 0..n_t {
        m[(i, i)] += C64::new(spec.nlos_power(), 0.0);
    }
    m.scale(spec.n_rx() as f64)
}

/// `E[H Q H†] = μ² Ψ Q Ψ† + 2σ² tr(Q) I`.
pub fn expected_sandwich(spec: &RicianChannelSpec, q: &CMatrix) -> Result<CMatrix> {
    let n_t = spec.n_tx();
    if q.nrows() != n_t || q.ncols() != n_t {
        return Err(Error::DimensionMismatch(format!(
            "Q must be {n_t}x{n_t}, got {}x{}",
            q.nrows(),
            q.ncols()
        )));
    }
    let scale = q.iter().map(|z| z.norm()).fold(1.0, f64::max);
    check_psd(q, 1e-12 * scale, 1e-9)?;
    let psi = spec.psi();
    let mut out = (&psi * q * psi.adjoint()).scale(spec.mu().powi(2));
    let diffuse = spec.nlos_power() * trace_re(q);
    for i in 0..spec.n_rx() {
        out[(i, i)] += C64::new(diffuse, 0.0);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius, real_to_complex, HermitianEigen};

    fn jammer_spec(k: f64) -> RicianChannelSpec {
        RicianChannelSpec::new(
            k,
            50f64.to_radians(),
            0.0,
            ArrayGeometry::half_wavelength(4).unwrap(),
            ArrayGeometry::half_wavelength(4).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn scales_are_normalised() {
        for k in [0.0, 0.1, 1.0, 10.0, 1e6, f64::INFINITY] {
            let (m, s) = (los_scale(k), nlos_scale(k));
            assert!((m * m + 2.0 * s * s - 1.0).abs() <= 1e-12, "k = {k}");
        }
    }

    #[test]
    fn rejects_negative_k() {
        assert!(check_k_factor(-0.1).is_err());
        assert!(check_k_factor(f64::NAN).is_err());
    }

    #[test]
    fn rayleigh_has_no_los() {
        let r = sample_channel(&jammer_spec(0.0), Seed(1));
        assert!(r.los.iter().all(|z| *z == C64::new(0.0, 0.0)));
        assert_eq!(r.total, &r.los + &r.nlos);
    }

    #[test]
    fn los_matches_closed_form() {
        let spec = jammer_spec(10.0);
        let r = sample_channel(&spec, Seed(2));
        let ar = steering_vector(spec.rx(), spec.aoa()).unwrap().into_entries();
        let at = steering_vector(spec.tx(), spec.aod()).unwrap().into_entries();
        let expected = (ar * at.adjoint()).map(|z| z * LOS_PHASE * spec.mu());
        assert!(frobenius(&(&r.los - expected)) < 1e-14);
        assert_eq!(r.total, &r.los + &r.nlos);
    }

    #[test]
    fn huge_k_is_los_dominated() {
        let spec = jammer_spec(1e12);
        let mut rng = Seed(9).rng();
        for _ in 0..100 {
            let r = sample_channel_with(&spec, &mut rng);
            assert!(frobenius(&r.nlos) / frobenius(&r.los) < 1e-5);
        }
    }

    #[test]
    fn upsilon_examples() {
        let u = upsilon(4, 0.0).unwrap();
        assert_eq!(u.matrix(), &DMatrix::identity(4, 4));
        let u = upsilon(2, 1.0).unwrap();
        assert_eq!(u.matrix(), &DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0]));
        let e = upsilon(4, 10.0).unwrap().eigenvalues();
        let expected = [41.0 / 11.0, 1.0 / 11.0, 1.0 / 11.0, 1.0 / 11.0];
        for (a, b) in e.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(upsilon(0, 1.0).is_err());
    }

    #[test]
    fn upsilon_eigenvalue_law_against_solver() {
        for k in [0.0, 0.1, 1.0, 10.0, 100.0] {
            for n in [1, 2, 4, 8] {
                let u = upsilon(n, k).unwrap();
                let numeric = HermitianEigen::new(&real_to_complex(u.matrix())).values;
                for (a, b) in u.eigenvalues().iter().zip(&numeric) {
                    assert!((a - b).abs() <= 1e-10, "k={k} n={n}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn expected_gram_examples() {
        let g = expected_gram(&jammer_spec(0.0));
        assert!(frobenius(&(g - CMatrix::identity(4, 4).scale(4.0))) < 1e-14);
        let g = expected_gram(&jammer_spec(10.0));
        let e = HermitianEigen::new(&g).values;
        let expected = [164.0 / 11.0, 4.0 / 11.0, 4.0 / 11.0, 4.0 / 11.0];
        for (a, b) in e.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        let u = real_to_complex(upsilon(4, 10.0).unwrap().matrix()).scale(4.0);
        assert!(frobenius(&(expected_gram(&jammer_spec(10.0)) - u)) < 1e-12);
    }

    #[test]
    fn expected_sandwich_examples() {
        let spec = jammer_spec(0.0);
        let s = expected_sandwich(&spec, &CMatrix::identity(4, 4)).unwrap();
        assert!(frobenius(&(s - CMatrix::identity(4, 4).scale(4.0))) < 1e-14);
        let s = expected_sandwich(&jammer_spec(10.0), &CMatrix::zeros(4, 4)).unwrap();
        assert_eq!(s, CMatrix::zeros(4, 4));
    }

    #[test]
    fn expected_sandwich_rejects_bad_q() {
        let spec = jammer_spec(1.0);
        let mut q = CMatrix::identity(4, 4);
        q[(2, 2)] = C64::new(-0.5, 0.0);
        assert!(matches!(expected_sandwich(&spec, &q), Err(Error::NotPositiveSemidefinite(_))));
        assert!(matches!(
            expected_sandwich(&spec, &CMatrix::identity(3, 3)),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn sandwich_trace_grows_with_power() {
        let spec = jammer_spec(10.0);
        let direction = CMatrix::from_fn(4, 4, |i, j| C64::new(1.0 / (1 + i + j) as f64, 0.0));
        let mut last = -1.0;
        for p in [0.0, 0.5, 1.0, 2.0, 4.0] {
            let t = trace_re(&expected_sandwich(&spec, &direction.scale(p)).unwrap());
            assert!(t >= last);
            last = t;
        }
    }
}
