//! Monte Carlo estimation of matrix word moments.
//!
//! A "word moment" is the expected normalized trace of a product of
//! masked, scaled sample matrices and their transposes, one matrix per
//! label. A "covariance moment" is the normalized trace of a power (or a
//! mixed product) of sample covariance matrices built from rectangular
//! masked samples. Both estimators report a mean and a standard error
//! over independent trials. Trials use per-trial substreams, so results
//! are bit-identical for any rayon thread count.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::ensembles::EnsembleSpec;
use crate::error::{Error, Result};
use crate::freelimits::{free_family_mixed_moment, Word};
use crate::linalg::Matrix;
use crate::masks::MaskMatrix;

/// One labelled matrix source: how to draw it and what to zero out.
#[derive(Debug, Clone)]
pub struct LabelSetup {
    ensemble: EnsembleSpec,
    mask: MaskMatrix,
}

impl LabelSetup {
    pub fn new(ensemble: EnsembleSpec, mask: MaskMatrix) -> Result<Self> {
        if mask.rows() != ensemble.rows() || mask.cols() != ensemble.cols() {
            return Err(Error::config(format!(
                "mask shape {}x{} does not match ensemble shape {}x{}",
                mask.rows(),
                mask.cols(),
                ensemble.rows(),
                ensemble.cols()
            )));
        }
        Ok(Self { ensemble, mask })
    }

    pub fn ensemble(&self) -> &EnsembleSpec {
        &self.ensemble
    }

    pub fn mask(&self) -> &MaskMatrix {
        &self.mask
    }
}

/// Result of a Monte Carlo moment estimate.
#[derive(Debug, Clone)]
pub struct MomentEstimate {
    /// Sample mean over trials.
    pub mean: f64,
    /// sqrt(sample variance / trials); 0 when trials < 2.
    pub std_error: f64,
    pub trials: usize,
    /// Dimension normalizing the trace (n for words, p for covariances).
    pub n: usize,
    /// Human-readable description of what was estimated.
    pub quantity: String,
}

fn summarize(values: &[f64], n: usize, quantity: String) -> MomentEstimate {
    let trials = values.len();
    let mean = values.iter().sum::<f64>() / trials as f64;
    let std_error = if trials < 2 {
        0.0
    } else {
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
            / (trials as f64 - 1.0);
        (var / trials as f64).sqrt()
    };
    MomentEstimate { mean, std_error, trials, n, quantity }
}

/// Normalized trace of the word product: Tr(M_1^(e1) ... M_L^(eL)) / n,
/// where each factor is the matrix of the letter's label, transposed when
/// the letter is starred. All matrices must be square of one size.
pub fn word_trace(word: &Word, mats: &BTreeMap<usize, Matrix>) -> Result<f64> {
    let letters = word.letters();
    let lookup = |label: usize| -> Result<&Matrix> {
        mats.get(&label)
            .ok_or_else(|| Error::config(format!("no matrix for label {label}")))
    };
    let n = lookup(letters[0].label)?.rows();
    for l in letters {
        let m = lookup(l.label)?;
        if !m.is_square() || m.rows() != n {
            return Err(Error::config(format!(
                "word traces need square matrices of one size, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
    }
    if letters.len() == 1 {
        // transpose does not change the trace
        return Ok(lookup(letters[0].label)?.trace()? / n as f64);
    }
    let head = lookup(letters[0].label)?;
    let mut acc = if letters[0].star { head.transpose() } else { head.clone() };
    for l in &letters[1..letters.len() - 1] {
        let m = lookup(l.label)?;
        acc = if l.star { acc.matmul_transb(m)? } else { acc.matmul(m)? };
    }
    let last = &letters[letters.len() - 1];
    let m = lookup(last.label)?;
    let tr = if last.star { acc.trace_product_transb(m)? } else { acc.trace_product(m)? };
    Ok(tr / n as f64)
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::config("trial count must be positive"));
    }
    Ok(())
}

/// Draws the masked, 1/sqrt(n)-scaled matrix for one (trial, label).
fn draw_word_matrix(setup: &LabelSetup, seed: u64, trial: u64, label: usize) -> Result<Matrix> {
    let s = setup.ensemble.sample(seed, trial, label as u64);
    s.masked_normalized(&setup.mask)
}

/// Estimates the word moment phi(word) by averaging normalized traces
/// over independent trials. Repeated labels inside one trial reuse the
/// same drawn matrix.
pub fn estimate_word_moment(
    word: &Word,
    setups: &BTreeMap<usize, LabelSetup>,
    trials: usize,
    master_seed: u64,
) -> Result<MomentEstimate> {
    check_trials(trials)?;
    let labels: BTreeSet<usize> = word.labels();
    let mut n = 0usize;
    for &label in &labels {
        let setup = setups
            .get(&label)
            .ok_or_else(|| Error::config(format!("no setup for label {label}")))?;
        if !setup.ensemble.is_square() {
            return Err(Error::config("word moments need square ensembles"));
        }
        if n == 0 {
            n = setup.ensemble.rows();
        } else if setup.ensemble.rows() != n {
            return Err(Error::config("all word ensembles must share one size"));
        }
    }
    let values: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut mats = BTreeMap::new();
            for &label in &labels {
                let m = draw_word_matrix(&setups[&label], master_seed, trial, label)?;
                mats.insert(label, m);
            }
            word_trace(word, &mats)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(summarize(&values, n, format!("phi({word})")))
}

/// Estimates the mixed covariance moment
/// E[ Tr(B_{t1} B_{t2} ... B_{tK}) / p ] where B_t = X_t X_t^T / n is the
/// sample covariance of the masked matrix for label t. All labels must
/// share one p x n shape; repeated labels reuse the drawn matrix.
pub fn estimate_covariance_mixed_moment(
    labels: &[usize],
    setups: &BTreeMap<usize, LabelSetup>,
    trials: usize,
    master_seed: u64,
) -> Result<MomentEstimate> {
    check_trials(trials)?;
    if labels.is_empty() {
        return Err(Error::config("covariance moment needs at least one factor"));
    }
    let distinct: BTreeSet<usize> = labels.iter().copied().collect();
    let (mut p, mut n) = (0usize, 0usize);
    for &label in &distinct {
        let setup = setups
            .get(&label)
            .ok_or_else(|| Error::config(format!("no setup for label {label}")))?;
        if p == 0 {
            p = setup.ensemble.rows();
            n = setup.ensemble.cols();
        } else if setup.ensemble.rows() != p || setup.ensemble.cols() != n {
            return Err(Error::config("all covariance ensembles must share one shape"));
        }
    }
    let inv_n = 1.0 / n as f64;
    let values: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut covs: BTreeMap<usize, Matrix> = BTreeMap::new();
            for &label in &distinct {
                let setup = &setups[&label];
                let x = setup.ensemble.sample(master_seed, trial, label as u64);
                let masked = x.masked(&setup.mask)?;
                covs.insert(label, masked.gram_scaled(inv_n));
            }
            let tr = if labels.len() == 1 {
                covs[&labels[0]].trace()?
            } else {
                let mut acc = covs[&labels[0]].clone();
                for &label in &labels[1..labels.len() - 1] {
                    acc = acc.matmul(&covs[&label])?;
                }
                acc.trace_product(&covs[&labels[labels.len() - 1]])?
            };
            Ok(tr / p as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    let tags: Vec<String> = labels.iter().map(|l| l.to_string()).collect();
    Ok(summarize(&values, p, format!("cov({})", tags.join(","))))
}

/// Estimates E[ Tr(B^k) / p ] for the single label's sample covariance.
pub fn estimate_covariance_moment(
    k: usize,
    label: usize,
    setups: &BTreeMap<usize, LabelSetup>,
    trials: usize,
    master_seed: u64,
) -> Result<MomentEstimate> {
    if k == 0 {
        return Err(Error::config("covariance moment order must be positive"));
    }
    estimate_covariance_mixed_moment(&vec![label; k], setups, trials, master_seed)
}

/// One word's comparison of a Monte Carlo estimate against the limit
/// predicted by treating the labelled family as free.
#[derive(Debug, Clone)]
pub struct FreenessRow {
    pub word: Word,
    pub estimate: MomentEstimate,
    pub limit: f64,
    pub gap: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Runs the freeness check for each word: estimate the moment, compare to
/// the free-family prediction from the labels' mirror correlations, pass
/// when |estimate - limit| <= se_multiplier * SE + extra_tol. The
/// prediction ignores masks, so use masks of full density (or density
/// tending to one) when interpreting failures.
pub fn freeness_test(
    words: &[Word],
    setups: &BTreeMap<usize, LabelSetup>,
    trials: usize,
    master_seed: u64,
    se_multiplier: f64,
    extra_tol: f64,
) -> Result<Vec<FreenessRow>> {
    let rho: BTreeMap<usize, f64> =
        setups.iter().map(|(&l, s)| (l, s.ensemble.rho())).collect();
    words
        .iter()
        .map(|word| {
            let estimate = estimate_word_moment(word, setups, trials, master_seed)?;
            let limit = free_family_mixed_moment(word, &rho)?;
            let gap = (estimate.mean - limit).abs();
            let tolerance = se_multiplier * estimate.std_error + extra_tol;
            Ok(FreenessRow { word: word.clone(), estimate, limit, gap, tolerance, pass: gap <= tolerance })
        })
        .collect()
}
