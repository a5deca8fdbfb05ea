//! Small dense complex linear-algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Eigenvalue floor, relative to the largest eigenvalue, used when inverting
/// covariance matrices.
pub const EIGEN_FLOOR: f64 = 1e-12;

/// Smallest entry magnitude used as a phase reference for eigenvectors.
pub const PHASE_PIVOT: f64 = 1e-8;

/// Eigendecomposition of a Hermitian matrix with eigenvalues sorted in
/// descending order. Ties keep the solver's native order.
///
/// Each eigenvector is rotated so that its first entry of magnitude above
/// `PHASE_PIVOT` is real and positive, which makes the vectors independent of
/// the solver's phase choices.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the same order as `values`.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn new(m: &CMatrix) -> Self {
        let sym = hermitian_part(m);
        let eig = sym.symmetric_eigen();
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let n = m.nrows();
        let mut vectors = CMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            let col = eig.eigenvectors.column(src);
            let phase = col
                .iter()
                .find(|z| z.norm() > PHASE_PIVOT)
                .map_or(C64::new(1.0, 0.0), |z| z.conj() / z.norm());
            vectors.set_column(dst, &(col * phase));
        }
        Self {
            values: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
            vectors,
        }
    }

    /// Rebuilds `V f(Λ) V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (j, &lambda) in self.values.iter().enumerate() {
            let s = f(lambda);
            scaled.column_mut(j).scale_mut(s);
        }
        &scaled * self.vectors.adjoint()
    }
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Largest entrywise deviation from Hermitian symmetry.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let d = m - m.adjoint();
    d.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn trace_re(m: &CMatrix) -> f64 {
    m.diagonal().iter().map(|z| z.re).sum()
}

/// Fails unless `m` is square, Hermitian to `herm_tol` and has no eigenvalue
/// below `-psd_tol`.
pub fn check_psd(m: &CMatrix, herm_tol: f64, psd_tol: f64) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let defect = hermitian_defect(m);
    if defect > herm_tol {
        return Err(Error::NotHermitian(defect));
    }
    if m.nrows() == 0 {
        return Ok(());
    }
    let min = HermitianEigen::new(m).values.last().copied().unwrap_or(0.0);
    if min < -psd_tol {
        return Err(Error::NotPositiveSemidefinite(min));
    }
    Ok(())
}

/// `R^{-1/2}` for a Hermitian PSD matrix, flooring eigenvalues at
/// `EIGEN_FLOOR * λ_max`.
pub fn inverse_sqrt(m: &CMatrix) -> CMatrix {
    let eig = HermitianEigen::new(m);
    let floor = floored(&eig);
    eig.map(|l| 1.0 / l.max(floor).sqrt())
}

pub fn inverse(m: &CMatrix) -> CMatrix {
    let eig = HermitianEigen::new(m);
    let floor = floored(&eig);
    eig.map(|l| 1.0 / l.max(floor))
}

fn floored(eig: &HermitianEigen) -> f64 {
    let max = eig.values.first().copied().unwrap_or(0.0).max(0.0);
    // An all-zero matrix has no scale; fall back to the smallest normal.
    (EIGEN_FLOOR * max).max(f64::MIN_POSITIVE)
}

/// Lower-triangular `L` with `L L† = Q` for a Hermitian PSD `Q`.
///
/// Pivots that vanish (relative to the largest diagonal entry) produce an
/// all-zero column, so coordinates with zero variance stay exactly zero.
pub fn psd_factor(q: &CMatrix) -> CMatrix {
    let n = q.nrows();
    let scale = (0..n).map(|i| q[(i, i)].re).fold(0.0, f64::max);
    let tol = 1e-14 * scale.max(f64::MIN_POSITIVE);
    let mut l = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = q[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if d <= tol {
            continue;
        }
        let pivot = d.sqrt();
        l[(j, j)] = C64::new(pivot, 0.0);
        for i in (j + 1)..n {
            let mut s = q[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / pivot;
        }
    }
    l
}

pub fn real_to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| C64::new(x, 0.0))
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
