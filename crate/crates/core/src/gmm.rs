//! Diagonal-covariance Gaussian mixtures fitted by Expectation-Maximization.
//!
//! Every M-step adds `reg_covar` to each per-dimension variance, so no
//! component can collapse onto a single point. Densities are evaluated in
//! log space; with 32 dimensions the raw Gaussian products underflow.
//!
//! EM starts from a K-Means partition seeded with k-means++, repeated
//! `n_init` times; the run with the best final likelihood wins. Iteration stops
//! once the mean per-observation log-likelihood improves by less than `tol`.
//! The variance floor means an M-step is not an exact maximizer, so a step
//! that would lower the likelihood is rejected and the previous parameters
//! are kept.

use std::f64::consts::PI;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::clustering::{lloyd, KMeansOptions};
use crate::dataset::NormalizedPanel;
use crate::error::{Error, Result};
use crate::serde_matrix;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GmmConfig {
    pub components: usize,
    pub reg_covar: f64,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
    /// Independent k-means++ initializations; the fit with the highest
    /// final log-likelihood is kept.
    #[serde(default = "default_n_init")]
    pub n_init: usize,
}

fn default_n_init() -> usize {
    10
}

impl Default for GmmConfig {
    fn default() -> Self {
        Self {
            components: 5,
            reg_covar: 0.1,
            max_iter: 200,
            tol: 1e-4,
            seed: 0,
            n_init: default_n_init(),
        }
    }
}

impl GmmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_init == 0 {
            return Err(Error::InvalidConfig("n_init must be at least 1".into()));
        }
        if self.components == 0 {
            return Err(Error::InvalidConfig("at least one mixture component is required".into()));
        }
        if !(self.reg_covar >= 0.0 && self.reg_covar.is_finite()) {
            return Err(Error::InvalidConfig(format!("reg_covar must be >= 0, got {}", self.reg_covar)));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::InvalidConfig(format!("tol must be > 0, got {}", self.tol)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GmmModel {
    #[serde(with = "serde_matrix::vector")]
    pub weights: Array1<f64>,
    #[serde(with = "serde_matrix::rows")]
    pub means: Array2<f64>,
    #[serde(with = "serde_matrix::rows")]
    pub variances: Array2<f64>,
    pub config: GmmConfig,
    /// Mean per-observation log-likelihood of the training data.
    pub final_log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RatioStatus {
    Ok10to1,
    Ok5to1,
    Insufficient,
}

/// Observation-to-variable ratio rule: 10:1 ideal, 5:1 minimum.
pub fn check_ratio(n: usize, b: usize) -> RatioStatus {
    if n >= 10 * b {
        RatioStatus::Ok10to1
    } else if n >= 5 * b {
        RatioStatus::Ok5to1
    } else {
        RatioStatus::Insufficient
    }
}

pub(crate) fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || max.is_infinite() {
        return max;
    }
    max + values.map(|v| (v - max).exp()).sum::<f64>().ln()
}

fn log_normal_diag(x: ArrayView1<'_, f64>, mean: ArrayView1<'_, f64>, var: ArrayView1<'_, f64>) -> f64 {
    let mut acc = 0.0;
    for ((&xi, &mi), &vi) in x.iter().zip(mean).zip(var) {
        let d = xi - mi;
        acc += (2.0 * PI * vi).ln() + d * d / vi;
    }
    -0.5 * acc
}

struct Params {
    weights: Array1<f64>,
    means: Array2<f64>,
    variances: Array2<f64>,
}

impl Params {
    fn log_weighted(&self, x: ArrayView1<'_, f64>) -> Vec<f64> {
        (0..self.weights.len())
            .map(|m| self.weights[m].ln() + log_normal_diag(x, self.means.row(m), self.variances.row(m)))
            .collect()
    }

    /// Responsibilities and mean log-likelihood.
    fn e_step(&self, data: ArrayView2<'_, f64>) -> (Array2<f64>, f64) {
        let (n, m) = (data.nrows(), self.weights.len());
        let mut resp = Array2::zeros((n, m));
        let mut total = 0.0;
        for (i, row) in data.outer_iter().enumerate() {
            let logs = self.log_weighted(row);
            let lse = log_sum_exp(logs.iter().copied());
            total += lse;
            for (c, l) in logs.iter().enumerate() {
                resp[[i, c]] = (l - lse).exp();
            }
        }
        (resp, total / n as f64)
    }

    fn m_step(data: ArrayView2<'_, f64>, resp: &Array2<f64>, reg_covar: f64) -> Self {
        let (n, b) = data.dim();
        let m = resp.ncols();
        // Guards empty components against division by zero.
        let counts = resp.sum_axis(Axis(0)) + 10.0 * f64::EPSILON;
        let mut means = Array2::zeros((m, b));
        let mut variances = Array2::zeros((m, b));
        for c in 0..m {
            let mut mean = means.row_mut(c);
            for i in 0..n {
                mean.scaled_add(resp[[i, c]], &data.row(i));
            }
            mean /= counts[c];
            let mut var = variances.row_mut(c);
            for i in 0..n {
                let r = resp[[i, c]];
                for j in 0..b {
                    let d = data[[i, j]] - mean[j];
                    var[j] += r * d * d;
                }
            }
            var /= counts[c];
            var += reg_covar;
        }
        let weights = &counts / counts.sum();
        Self {
            weights,
            means,
            variances,
        }
    }
}

/// Fits the mixture and also returns the accepted log-likelihood trace.
pub fn fit_with_trace(panel: &NormalizedPanel, config: &GmmConfig) -> Result<(GmmModel, Vec<f64>)> {
    fit_data(panel.z().view(), config)
}

pub fn fit(panel: &NormalizedPanel, config: &GmmConfig) -> Result<GmmModel> {
    Ok(fit_with_trace(panel, config)?.0)
}

pub(crate) fn fit_data(data: ArrayView2<'_, f64>, config: &GmmConfig) -> Result<(GmmModel, Vec<f64>)> {
    config.validate()?;
    let (n, b) = data.dim();
    let m = config.components;
    if n < m || n == 0 {
        return Err(Error::TooFewObservations { n, components: m });
    }
    if b == 0 {
        return Err(Error::ShapeMismatch { expected: 1, found: 0 });
    }

    // Restart 0 uses the configured seed so n_init = 1 is a plain single fit.
    let mut seeds = ChaCha8Rng::seed_from_u64(config.seed);
    let mut best: Option<EmRun> = None;
    for restart in 0..config.n_init {
        let seed = if restart == 0 { config.seed } else { seeds.next_u64() };
        let labels = if m == 1 {
            vec![0; n]
        } else {
            lloyd(data, m, seed, &KMeansOptions::default()).labels
        };
        let run = em(data, &labels, m, config);
        if best.as_ref().is_none_or(|b| run.ll > b.ll) {
            best = Some(run);
        }
        if m == 1 {
            break;
        }
    }
    let EmRun { params, ll, trace, iterations, converged } = best.expect("n_init >= 1");

    let model = GmmModel {
        weights: params.weights,
        means: params.means,
        variances: params.variances,
        config: *config,
        final_log_likelihood: ll,
        iterations,
        converged,
    };
    Ok((model, trace))
}

struct EmRun {
    params: Params,
    ll: f64,
    trace: Vec<f64>,
    iterations: usize,
    converged: bool,
}

fn em(data: ArrayView2<'_, f64>, labels: &[usize], m: usize, config: &GmmConfig) -> EmRun {
    let mut hard = Array2::zeros((data.nrows(), m));
    for (i, &l) in labels.iter().enumerate() {
        hard[[i, l]] = 1.0;
    }

    let mut params = Params::m_step(data, &hard, config.reg_covar);
    let (mut resp, mut ll) = params.e_step(data);
    let mut trace = vec![ll];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < config.max_iter {
        iterations += 1;
        let candidate = Params::m_step(data, &resp, config.reg_covar);
        let (next_resp, next_ll) = candidate.e_step(data);
        if next_ll < ll {
            converged = true;
            break;
        }
        let gain = next_ll - ll;
        params = candidate;
        resp = next_resp;
        ll = next_ll;
        trace.push(ll);
        if gain < config.tol {
            converged = true;
            break;
        }
    }
    EmRun { params, ll, trace, iterations, converged }
}

impl GmmModel {
    pub fn n_components(&self) -> usize {
        self.weights.len()
    }

    pub fn dim(&self) -> usize {
        self.means.ncols()
    }

    fn params(&self) -> Params {
        Params {
            weights: self.weights.clone(),
            means: self.means.clone(),
            variances: self.variances.clone(),
        }
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::ShapeMismatch {
                expected: self.dim(),
                found: len,
            });
        }
        Ok(())
    }

    pub fn log_density(&self, x: ArrayView1<'_, f64>) -> Result<f64> {
        self.check_dim(x.len())?;
        Ok(log_sum_exp(self.params().log_weighted(x).into_iter()))
    }

    pub fn density(&self, x: ArrayView1<'_, f64>) -> Result<f64> {
        Ok(self.log_density(x)?.exp())
    }

    /// Mean per-row log-likelihood.
    pub fn mean_log_likelihood(&self, data: ArrayView2<'_, f64>) -> Result<f64> {
        self.check_dim(data.ncols())?;
        Ok(self.params().e_step(data).1)
    }

    /// Most responsible component for each row.
    pub fn predict(&self, data: ArrayView2<'_, f64>) -> Result<Vec<usize>> {
        self.check_dim(data.ncols())?;
        let (resp, _) = self.params().e_step(data);
        Ok(resp
            .outer_iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .fold((0, f64::NEG_INFINITY), |best, (c, &p)| if p > best.1 { (c, p) } else { best })
                    .0
            })
            .collect())
    }

    /// Draws `count` rows: component from the weights, then each coordinate
    /// from its own normal. Returns the rows and their source components.
    pub fn sample(&self, count: usize, seed: u64) -> (Array2<f64>, Vec<usize>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = self.dim();
        let mut rows = Array2::zeros((count, b));
        let mut labels = Vec::with_capacity(count);
        let last = self.n_components() - 1;
        for i in 0..count {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut comp = last;
            for (c, &w) in self.weights.iter().enumerate() {
                acc += w;
                if u < acc {
                    comp = c;
                    break;
                }
            }
            labels.push(comp);
            for j in 0..b {
                let e: f64 = rng.sample(StandardNormal);
                rows[[i, j]] = self.means[[comp, j]] + self.variances[[comp, j]].sqrt() * e;
            }
        }
        (rows, labels)
    }
}
