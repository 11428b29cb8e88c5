//! Asymptotic variance of the walk sum, the exact finite-`t` variance, and the
//! inverse map from a target variance to a sticky chain.
//!
//! For a stationary chain with weights `pi`, the lag-`i` covariance term is
//! `(val - p1)^T G^i (pi * (val - p1))`; for a regular graph this is
//! `(1/n)(val - p1)^T G^i val`.  Terms are built by repeated matrix-vector
//! products and never form `G^i`.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::{sticky_lambda_min, spectral_expansion, LabeledChain};

pub const DEFAULT_TOL: f64 = 1e-12;
/// Expansion at or above `1 - DIVERGENCE_GAP` is treated as non-mixing.
pub const DIVERGENCE_GAP: f64 = 1e-9;
/// Slack added to the convergence-rate bound.
pub const CHECK_SLACK: f64 = 1e-9;
/// Largest |lambda| admitted by the discrete-normal variance window.
pub const WINDOW_LAMBDA: f64 = 0.01;

/// Truncated series value together with its certified truncation error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub sigma2: f64,
    pub error_bound: f64,
    pub truncation_index: usize,
    pub lambda: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceRow {
    pub t: usize,
    pub var_over_t: f64,
    pub gap: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceReport {
    pub sigma2: f64,
    pub error_bound: f64,
    pub truncation_index: usize,
    pub lambda: f64,
    pub rows: Vec<VarianceRow>,
}

impl VarianceReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

/// Iterates `x_i = G^i (pi * (val - p1))` and yields `(val - p1) . x_i` for `i = 1, 2, ...`.
struct LagCovariances<'a> {
    chain: &'a LabeledChain,
    centered: DVector<f64>,
    state: DVector<f64>,
}

impl<'a> LagCovariances<'a> {
    fn new(chain: &'a LabeledChain) -> Self {
        let (_, p1) = chain.label_weights();
        let centered = DVector::from_iterator(chain.n(), chain.labels().iter().map(|&l| l as f64 - p1));
        let state = DVector::from_iterator(
            chain.n(),
            centered.iter().zip(chain.weights()).map(|(c, w)| c * w),
        );
        Self { chain, centered, state }
    }
}

impl Iterator for LagCovariances<'_> {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        self.state = self.chain.matrix() * &self.state;
        Some(self.centered.dot(&self.state))
    }
}

fn truncation_index(lambda: f64, q: f64, tol: f64) -> usize {
    if lambda == 0.0 || q == 0.0 {
        return 0;
    }
    let k = ((tol * (1.0 - lambda) / (2.0 * q)).ln() / lambda.ln()).ceil();
    k.max(0.0) as usize
}

/// `sigma^2 = p0 p1 + 2 sum_{i>=1} cov_i`, truncated once the geometric tail
/// bound `2 p0 p1 lambda^{K+1} / (1 - lambda)` drops to `tol`.
pub fn asymptotic_variance_series(chain: &LabeledChain, tol: f64) -> Result<SeriesValue> {
    if tol.is_nan() || tol <= 0.0 {
        return invalid(format!("tolerance must be positive, got {tol}"));
    }
    let lambda = spectral_expansion(chain)?;
    if lambda >= 1.0 - DIVERGENCE_GAP {
        return Err(Error::Divergence(format!("spectral expansion {lambda} is not below 1")));
    }
    let (p0, p1) = chain.label_weights();
    let q = p0 * p1;
    let k = truncation_index(lambda, q, tol);
    let tail: f64 = LagCovariances::new(chain).take(k).sum();
    Ok(SeriesValue {
        sigma2: q + 2.0 * tail,
        error_bound: 2.0 * q * lambda.powi(k as i32 + 1) / (1.0 - lambda),
        truncation_index: k,
        lambda,
    })
}

/// Closed form `p0 p1 (1 + lambda) / (1 - lambda)` for the sticky chain.
pub fn sticky_asymptotic_variance(lambda: f64, p: (f64, f64)) -> Result<f64> {
    if lambda >= 1.0 {
        return Err(Error::Divergence(format!("sticky walk with lambda = {lambda} does not mix")));
    }
    if lambda.is_nan() || lambda < sticky_lambda_min(p) - 1e-15 {
        return Err(Error::NegativeProbability(format!("lambda = {lambda} is below the admissible range")));
    }
    Ok(p.0 * p.1 * (1.0 + lambda) / (1.0 - lambda))
}

/// `Var = p0 p1 t + 2 sum_{l=1}^{t-1} (t - l) cov_l`.
pub fn exact_variance_formula(chain: &LabeledChain, t: usize) -> Result<f64> {
    if t == 0 {
        return invalid("walk length must be at least 1");
    }
    let (p0, p1) = chain.label_weights();
    let lagged: f64 = LagCovariances::new(chain)
        .take(t - 1)
        .enumerate()
        .map(|(i, cov)| (t - 1 - i) as f64 * cov)
        .sum();
    Ok(p0 * p1 * t as f64 + 2.0 * lagged)
}

/// Checks `|Var(t)/t - sigma^2| <= 2 lambda p0 p1 / ((1 - lambda)^2 t)` for each `t`.
/// Returns the report, or a bound-violation error naming the first failing `t`.
pub fn variance_convergence_check(chain: &LabeledChain, t_list: &[usize]) -> Result<VarianceReport> {
    let report = variance_convergence_report(chain, t_list, DEFAULT_TOL)?;
    if let Some(bad) = report.rows.iter().find(|r| !r.pass) {
        return Err(Error::BoundViolation {
            t: bad.t,
            detail: format!("|Var/t - sigma^2| = {} exceeds {}", bad.gap, bad.bound),
        });
    }
    Ok(report)
}

/// Same as [`variance_convergence_check`] but keeps failing rows in the report.
pub fn variance_convergence_report(chain: &LabeledChain, t_list: &[usize], tol: f64) -> Result<VarianceReport> {
    if t_list.is_empty() {
        return invalid("t_list must be nonempty");
    }
    let series = asymptotic_variance_series(chain, tol)?;
    let (p0, p1) = chain.label_weights();
    let lambda = series.lambda;
    let rows = t_list
        .iter()
        .map(|&t| {
            let var_over_t = exact_variance_formula(chain, t)? / t as f64;
            let gap = (var_over_t - series.sigma2).abs();
            let bound = 2.0 * lambda * p0 * p1 / ((1.0 - lambda).powi(2) * t as f64);
            Ok(VarianceRow {
                t,
                var_over_t,
                gap,
                bound,
                pass: gap <= bound + CHECK_SLACK,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VarianceReport {
        sigma2: series.sigma2,
        error_bound: series.error_bound,
        truncation_index: series.truncation_index,
        lambda,
        rows,
    })
}

/// Admissible `sigma^2` range for the sticky discrete normal family.
pub fn sigma2_window(p: (f64, f64)) -> (f64, f64) {
    let q = p.0 * p.1;
    let m = (p.0 / p.1).min(p.1 / p.0).min(WINDOW_LAMBDA);
    ((1.0 - m) / (1.0 + m) * q, (1.0 + WINDOW_LAMBDA) / (1.0 - WINDOW_LAMBDA) * q)
}

/// Inverts the sticky variance: `lambda = (sigma^2 - p0 p1) / (sigma^2 + p0 p1)`.
pub fn sigma_to_lambda(sigma2: f64, p: (f64, f64)) -> Result<f64> {
    let (lo, hi) = sigma2_window(p);
    // Relative slack so that endpoints recomputed from a lambda still qualify.
    let slack = 1e-14 * hi;
    if !(sigma2 >= lo - slack && sigma2 <= hi + slack) {
        return Err(Error::OutOfRange(format!(
            "sigma^2 = {sigma2} is outside the window [{lo}, {hi}]"
        )));
    }
    let q = p.0 * p.1;
    Ok((sigma2 - q) / (sigma2 + q))
}
