//! Empirical spectra of sample covariance matrices.
//!
//! The pipeline is: masked data matrix -> covariance B = X X^T / n ->
//! eigenvalues -> comparison against a Marchenko-Pastur law via the
//! Kolmogorov-Smirnov distance. Eigenvalues of B are nonnegative up to
//! roundoff; tiny negative values are clamped to zero and anything worse
//! is reported as a numerical failure rather than silently kept.

pub mod eigen;

use crate::error::{Error, Result};
use crate::freelimits::{mp_cdf, MPLaw};
use crate::linalg::Matrix;

pub use eigen::{eigenvalues_symmetric, symmetric_eigen};

/// Largest roundoff-negative eigenvalue tolerated (clamped to zero).
const NEG_EIG_CLAMP: f64 = 1e-8;

/// Relative mismatch allowed between the eigenvalue sum and the trace.
const TRACE_CHECK_REL: f64 = 1e-6;

/// Sample covariance B = X X^T / n of a p x n data matrix. The result is
/// exactly symmetric.
pub fn covariance_matrix(x: &Matrix) -> Result<Matrix> {
    if x.rows() == 0 || x.cols() == 0 {
        return Err(Error::domain("covariance of an empty matrix"));
    }
    Ok(x.gram_scaled(1.0 / x.cols() as f64))
}

/// Eigenvalues of one sample covariance matrix, with shape metadata.
#[derive(Debug, Clone)]
pub struct SpectralSample {
    eigenvalues: Vec<f64>,
    p: usize,
    n: usize,
}

impl SpectralSample {
    /// Wraps precomputed covariance eigenvalues. Values are sorted;
    /// negatives above the roundoff clamp are zeroed, worse ones error.
    pub fn from_eigenvalues(mut eigenvalues: Vec<f64>, p: usize, n: usize) -> Result<Self> {
        if p == 0 || n == 0 {
            return Err(Error::domain("spectral sample needs positive dimensions"));
        }
        if eigenvalues.len() != p {
            return Err(Error::domain(format!(
                "expected {p} eigenvalues, got {}",
                eigenvalues.len()
            )));
        }
        for v in eigenvalues.iter_mut() {
            if !v.is_finite() {
                return Err(Error::numerical("non-finite eigenvalue"));
            }
            if *v < 0.0 {
                if *v < -NEG_EIG_CLAMP {
                    return Err(Error::numerical(format!(
                        "covariance eigenvalue {v:e} is negative beyond roundoff"
                    )));
                }
                *v = 0.0;
            }
        }
        eigenvalues.sort_by(f64::total_cmp);
        Ok(Self { eigenvalues, p, n })
    }

    /// Eigendecomposes the p x p covariance matrix `b` built from n
    /// observation columns and checks the eigenvalue sum against its
    /// trace.
    pub fn from_covariance(b: &Matrix, n: usize) -> Result<Self> {
        let vals = eigenvalues_symmetric(b)?;
        let sum: f64 = vals.iter().sum();
        let tr = b.trace()?;
        if (sum - tr).abs() > TRACE_CHECK_REL * tr.abs().max(1.0) {
            return Err(Error::numerical(format!(
                "eigenvalue sum {sum} disagrees with trace {tr}"
            )));
        }
        Self::from_eigenvalues(vals, b.rows(), n)
    }

    /// Covariance spectrum straight from the masked p x n data matrix.
    pub fn from_data(x: &Matrix) -> Result<Self> {
        Self::from_covariance(&covariance_matrix(x)?, x.cols())
    }

    /// Ascending, clamped eigenvalues.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Aspect ratio p/n, the y parameter the limiting law should carry.
    pub fn y(&self) -> f64 {
        self.p as f64 / self.n as f64
    }

    /// Fraction of eigenvalues at most `cutoff`; with a small cutoff this
    /// is the empirical mass of the atom at zero.
    pub fn mass_at_zero(&self, cutoff: f64) -> f64 {
        let k = self.eigenvalues.partition_point(|&v| v <= cutoff);
        k as f64 / self.p as f64
    }
}

/// Kolmogorov-Smirnov comparison of an empirical spectrum against a
/// Marchenko-Pastur law.
#[derive(Debug, Clone, Copy)]
pub struct KsReport {
    /// sup_x |F_emp(x) - F(x)|.
    pub distance: f64,
    /// |p/n - y| between the sample shape and the law parameter.
    pub y_mismatch: f64,
}

/// KS distance between the sample's empirical distribution and the law.
/// The supremum is attained at an eigenvalue, approaching from the left
/// or the right; ties are grouped so repeated eigenvalues count once with
/// their full jump. The law's only discontinuity is its atom at zero, so
/// the left limit of its cdf is 0 at zero and equals the cdf elsewhere.
pub fn ks_distance(sample: &SpectralSample, law: &MPLaw) -> Result<KsReport> {
    let eigs = sample.eigenvalues();
    let total = eigs.len() as f64;
    let mut dist = 0.0f64;
    let mut i = 0usize;
    while i < eigs.len() {
        let v = eigs[i];
        let mut j = i;
        while j < eigs.len() && eigs[j] == v {
            j += 1;
        }
        let below = i as f64 / total;
        let upto = j as f64 / total;
        let cdf = mp_cdf(v, law);
        let cdf_minus = if v <= 0.0 { 0.0 } else { cdf };
        dist = dist.max((upto - cdf).abs()).max((below - cdf_minus).abs());
        i = j;
    }
    Ok(KsReport { distance: dist, y_mismatch: (sample.y() - law.y()).abs() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{EnsembleSpec, EntryDist};

    fn rect_sample(p: usize, n: usize, seed: u64) -> Matrix {
        EnsembleSpec::rect_elliptic(p, n, EntryDist::Gaussian, 0.0)
            .unwrap()
            .sample(seed, 0, 0)
            .matrix()
            .clone()
    }

    #[test]
    fn covariance_shape_and_symmetry() {
        let x = rect_sample(6, 10, 3);
        let b = covariance_matrix(&x).unwrap();
        assert_eq!((b.rows(), b.cols()), (6, 6));
        assert_eq!(b.max_asymmetry().unwrap(), 0.0);
        // diagonal entries are row mean squares
        let want = x.row(0).iter().map(|v| v * v).sum::<f64>() / 10.0;
        assert!((b.get(0, 0) - want).abs() < 1e-14);
    }

    #[test]
    fn rank_deficient_covariance_counts_zeros() {
        let x = rect_sample(30, 10, 5);
        let s = SpectralSample::from_data(&x).unwrap();
        assert_eq!(s.p(), 30);
        assert_eq!(s.n(), 10);
        assert_eq!(s.y(), 3.0);
        // rank is at most 10, so at least 20 eigenvalues vanish
        let zeros = s.eigenvalues().iter().filter(|&&v| v <= 1e-8).count();
        assert_eq!(zeros, 20);
        assert_eq!(s.mass_at_zero(1e-8), 20.0 / 30.0);
        assert!(s.eigenvalues().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn from_eigenvalues_validates_and_clamps() {
        let s = SpectralSample::from_eigenvalues(vec![0.5, -1e-9, 2.0], 3, 3).unwrap();
        assert_eq!(s.eigenvalues(), &[0.0, 0.5, 2.0]);
        assert!(SpectralSample::from_eigenvalues(vec![-1e-3], 1, 1).is_err());
        assert!(SpectralSample::from_eigenvalues(vec![f64::NAN], 1, 1).is_err());
        assert!(SpectralSample::from_eigenvalues(vec![1.0], 2, 1).is_err());
    }

    #[test]
    fn degenerate_spectrum_ks_is_exact() {
        let law = MPLaw::new(1.0).unwrap();
        let s = SpectralSample::from_eigenvalues(vec![2.0; 40], 40, 40).unwrap();
        let report = ks_distance(&s, &law).unwrap();
        let cdf2 = mp_cdf(2.0, &law);
        let expected = (1.0 - cdf2).max(cdf2);
        assert!((report.distance - expected).abs() < 1e-12);
        assert_eq!(report.y_mismatch, 0.0);
    }

    #[test]
    fn ks_handles_the_atom_at_zero() {
        // all mass at zero vs a law with atom 1/2: the gap away from the
        // atom is what the distance must see, giving 1 - 1/2
        let law = MPLaw::new(2.0).unwrap();
        let s = SpectralSample::from_eigenvalues(vec![0.0; 10], 10, 5).unwrap();
        let report = ks_distance(&s, &law).unwrap();
        assert!((report.distance - 0.5).abs() < 1e-12, "distance {}", report.distance);
    }

    #[test]
    fn ks_input_order_does_not_matter() {
        let law = MPLaw::new(0.5).unwrap();
        let a = SpectralSample::from_eigenvalues(vec![0.3, 1.2, 0.9, 2.0], 4, 8).unwrap();
        let b = SpectralSample::from_eigenvalues(vec![2.0, 0.3, 0.9, 1.2], 4, 8).unwrap();
        let da = ks_distance(&a, &law).unwrap().distance;
        let db = ks_distance(&b, &law).unwrap().distance;
        assert_eq!(da.to_bits(), db.to_bits());
    }

    #[test]
    fn moderate_sample_tracks_its_own_law() {
        // p = n = 200 should already be close in KS distance
        let x = rect_sample(200, 200, 11);
        let s = SpectralSample::from_data(&x).unwrap();
        let law = MPLaw::new(1.0).unwrap();
        let report = ks_distance(&s, &law).unwrap();
        assert!(report.distance < 0.08, "distance {}", report.distance);
        // and be visibly far from a very different aspect ratio
        let far = ks_distance(&s, &MPLaw::new(4.0).unwrap()).unwrap();
        assert!(far.distance > report.distance + 0.1);
    }
}
