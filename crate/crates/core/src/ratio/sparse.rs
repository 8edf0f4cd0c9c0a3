//! Randomized `k`-term spectral approximation: draw lines `λ_i` with
//! probability `‖E_λ f‖/‖f‖_{ℓ̂¹}` and average the rescaled projections.
//!
//! Everything is done on line norms: with `c_λ` draws of line `λ` the
//! approximant is `P = Σ_λ (c_λ S / (k n_λ)) E_λ f` (`S = ‖f‖_{ℓ̂¹}`,
//! `n_λ = ‖E_λ f‖`), so `‖P - f‖₂² = Σ_λ (c_λ S/k - n_λ)²`.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::exec::Executor;
use crate::numeric::pairwise_sum;
use crate::rng::Stream;
use crate::spectrum::CoefficientSet;
use crate::{Error, Result};

const TRIALS_PER_CHUNK: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct SparseApprox {
    pub k: usize,
    pub trials: usize,
    pub fr: f64,
    pub l1_hat: f64,
    pub l2: f64,
    pub best: CoefficientSet,
    pub best_trial: usize,
    /// `‖P - f‖₂` of the best trial.
    pub best_error: f64,
    /// `‖P - f‖₂²` per trial.
    pub errors_sq: Vec<f64>,
    pub mean_error_sq: f64,
    /// Standard error of `mean_error_sq`.
    pub stderr: f64,
    /// `E‖P - f‖₂²` summed directly over the sampling law.
    pub expected_direct: f64,
    /// `(1/k)‖f‖₂²(FR² - 1)`.
    pub expected_identity: f64,
    /// Per active line: trial mean of the scale `c_λ S/(k n_λ)` (one for an
    /// unbiased estimator) and its standard error.
    pub scale_means: Vec<f64>,
    pub scale_stderrs: Vec<f64>,
    /// Largest `|mean - 1| / stderr` over lines with nonzero spread.
    pub max_bias_z: f64,
}

struct Alphabet {
    /// Table index of each active line.
    lines: Vec<usize>,
    norms: Vec<f64>,
    cumulative: Vec<f64>,
    total: f64,
}

impl Alphabet {
    fn new(f: &CoefficientSet) -> Self {
        let mut lines = Vec::new();
        let mut norms = Vec::new();
        for (i, n) in f.line_norms().into_iter().enumerate() {
            if n > 0.0 {
                lines.push(i);
                norms.push(n);
            }
        }
        let mut cumulative = Vec::with_capacity(norms.len());
        let mut acc = 0.0;
        for n in &norms {
            acc += n;
            cumulative.push(acc);
        }
        Alphabet {
            lines,
            norms,
            total: acc,
            cumulative,
        }
    }

    fn draw(&self, rng: &mut Stream) -> usize {
        let u = rng.uniform() * self.total;
        self.cumulative.partition_point(|c| *c <= u).min(self.norms.len() - 1)
    }

    /// Draw counts of one trial, as sorted `(alphabet index, count)`.
    fn trial(&self, seed: u64, trial: usize, k: usize) -> Vec<(usize, u32)> {
        let mut rng = Stream::new(seed, trial as u64);
        let mut picks: Vec<usize> = (0..k).map(|_| self.draw(&mut rng)).collect();
        picks.sort_unstable();
        let mut out: Vec<(usize, u32)> = Vec::new();
        for p in picks {
            match out.last_mut() {
                Some((q, c)) if *q == p => *c += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }

    fn error_sq(&self, counts: &[(usize, u32)], k: usize, l2_sq: f64) -> f64 {
        let mut e = l2_sq;
        for (i, c) in counts {
            let n = self.norms[*i];
            let a = *c as f64 * self.total / k as f64;
            e += (a - n) * (a - n) - n * n;
        }
        e.max(0.0)
    }
}

/// `(1/k) Σ_λ p_λ ‖(S/n_λ) E_λ f - f‖₂²`, the exact mean of the
/// approximation error, summed over the sampling law.
pub fn analytic_expected_error(f: &CoefficientSet, k: usize) -> Result<f64> {
    let a = Alphabet::new(f);
    if a.norms.is_empty() {
        return Err(Error::UndefinedRatio("f vanishes on the table"));
    }
    let l2_sq = pairwise_sum(&a.norms.iter().map(|n| n * n).collect::<Vec<_>>());
    let s = a.total;
    let terms: Vec<f64> = a
        .norms
        .iter()
        .map(|n| (n / s) * ((s - n) * (s - n) + l2_sq - n * n))
        .collect();
    Ok(pairwise_sum(&terms) / k as f64)
}

pub fn sparse_approx<E: Executor>(
    f: &CoefficientSet,
    k: usize,
    trials: usize,
    seed: u64,
    exec: &E,
) -> Result<SparseApprox> {
    if k < 1 {
        return Err(Error::arg("k", "need at least one term"));
    }
    if trials < 1 {
        return Err(Error::arg("trials", "need at least one trial"));
    }
    let alphabet = Alphabet::new(f);
    if alphabet.norms.is_empty() {
        return Err(Error::UndefinedRatio("f vanishes on the table"));
    }
    let m = alphabet.norms.len();
    let l2_sq = pairwise_sum(&alphabet.norms.iter().map(|n| n * n).collect::<Vec<_>>());
    let l2 = l2_sq.sqrt();
    let s = alphabet.total;
    let fr = s / l2;
    let n_chunks = trials.div_ceil(TRIALS_PER_CHUNK);
    let chunks: Vec<(Vec<f64>, Vec<f64>, Vec<f64>)> = exec.map(n_chunks, |c| {
        let lo = c * TRIALS_PER_CHUNK;
        let hi = (lo + TRIALS_PER_CHUNK).min(trials);
        let mut errs = Vec::with_capacity(hi - lo);
        let mut sum = alloc::vec![0.0; m];
        let mut sum_sq = alloc::vec![0.0; m];
        for t in lo..hi {
            let counts = alphabet.trial(seed, t, k);
            errs.push(alphabet.error_sq(&counts, k, l2_sq));
            for (i, cnt) in counts {
                let c = cnt as f64;
                sum[i] += c;
                sum_sq[i] += c * c;
            }
        }
        (errs, sum, sum_sq)
    });
    let mut errors_sq = Vec::with_capacity(trials);
    let mut count_sum = alloc::vec![0.0; m];
    let mut count_sq = alloc::vec![0.0; m];
    for (e, a, b) in &chunks {
        errors_sq.extend_from_slice(e);
        for i in 0..m {
            count_sum[i] += a[i];
            count_sq[i] += b[i];
        }
    }
    let tf = trials as f64;
    let mean_error_sq = pairwise_sum(&errors_sq) / tf;
    let var = if trials > 1 {
        pairwise_sum(
            &errors_sq
                .iter()
                .map(|e| (e - mean_error_sq).powi(2))
                .collect::<Vec<_>>(),
        ) / (tf - 1.0)
    } else {
        0.0
    };
    let mut scale_means = Vec::with_capacity(m);
    let mut scale_stderrs = Vec::with_capacity(m);
    let mut max_bias_z: f64 = 0.0;
    for i in 0..m {
        let factor = s / (k as f64 * alphabet.norms[i]);
        let mean_c = count_sum[i] / tf;
        let var_c = if trials > 1 {
            ((count_sq[i] - tf * mean_c * mean_c) / (tf - 1.0)).max(0.0)
        } else {
            0.0
        };
        let mean = factor * mean_c;
        let se = factor * (var_c / tf).sqrt();
        if se > 0.0 {
            max_bias_z = max_bias_z.max((mean - 1.0).abs() / se);
        }
        scale_means.push(mean);
        scale_stderrs.push(se);
    }
    let (best_trial, best_sq) =
        errors_sq
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |b, (i, e)| if *e < b.1 { (i, *e) } else { b });
    let mut factors = alloc::vec![0.0; f.table().len()];
    for (i, c) in alphabet.trial(seed, best_trial, k) {
        factors[alphabet.lines[i]] = c as f64 * s / (k as f64 * alphabet.norms[i]);
    }
    Ok(SparseApprox {
        k,
        trials,
        fr,
        l1_hat: s,
        l2,
        best: f.scale_lines(&factors),
        best_trial,
        best_error: best_sq.sqrt(),
        errors_sq,
        mean_error_sq,
        stderr: (var / tf).sqrt(),
        expected_direct: analytic_expected_error(f, k)?,
        expected_identity: l2_sq * (fr * fr - 1.0) / k as f64,
        scale_means,
        scale_stderrs,
        max_bias_z,
    })
}
