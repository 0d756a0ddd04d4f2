//! Seeded Monte Carlo comparison of model-selection schemes on orthogonal
//! designs with Cauchy-drawn coefficients.
//!
//! Reproducibility contract: every random quantity is drawn from a ChaCha8
//! stream whose 64-bit seed is derived with SplitMix64 from
//! (base_seed, purpose tag, K_true, replicate index). Uniforms come from the
//! top 53 bits of the next u64; normal deviates go through the inverse CDF
//! and Cauchy deviates through scale·tan(π(u−½)). Replicates are independent
//! work units and the aggregation runs in replicate order, so reports are
//! bit-identical across thread counts.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::ContinuousCDF;

use crate::error::{Error, Result};
use crate::model::{DesignMatrix, Scenario, SufficientStats};
use crate::selection::{self, CandidateValue, CriterionScheme, ScenarioKind};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Seed-derivation purpose tags.
const TAG_DESIGN: u64 = 0xD511;
const TAG_REPLICATE: u64 = 0x5EED;

/// Whether the Zellner-Siow scheme uses its exact series evidence or the
/// asymptotic criterion (the default; the series is far slower).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZsMode {
    Exact,
    Asymptotic,
}

/// Candidate-set construction; nested prefixes of the design columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateStrategy {
    Nested,
}

/// Experiment configuration. Field names are the configuration-file schema.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    pub n: usize,
    pub k_max: usize,
    pub reps: usize,
    pub signal_scale: f64,
    pub base_seed: u64,
    pub schemes: Vec<String>,
    pub hyper_g_a: f64,
    pub zs_mode: ZsMode,
    pub candidate_strategy: CandidateStrategy,
    pub redraw_design_per_replicate: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n: 100,
            k_max: 16,
            reps: 1000,
            signal_scale: 1.0,
            base_seed: 20140601,
            schemes: vec![
                "aic".into(),
                "aicc".into(),
                "bic".into(),
                "zs".into(),
                "hyperg".into(),
                "parabolic".into(),
            ],
            hyper_g_a: 3.0,
            zs_mode: ZsMode::Asymptotic,
            candidate_strategy: CandidateStrategy::Nested,
            redraw_design_per_replicate: false,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.k_max == 0 || self.k_max > self.n {
            return Err(Error::domain(format!(
                "need 1 <= k_max <= n, got k_max = {}, n = {}",
                self.k_max, self.n
            )));
        }
        if self.reps == 0 {
            return Err(Error::domain("reps must be at least 1"));
        }
        if !(self.signal_scale.is_finite() && self.signal_scale > 0.0) {
            return Err(Error::domain(format!(
                "signal_scale must be positive, got {}",
                self.signal_scale
            )));
        }
        if self.schemes.is_empty() {
            return Err(Error::domain("at least one scheme is required"));
        }
        for token in &self.schemes {
            self.resolve_scheme(token)?;
        }
        Ok(())
    }

    /// Map a scheme token to the criterion it denotes under this config
    /// (fixed-dispersion panel).
    fn resolve_scheme(&self, token: &str) -> Result<CriterionScheme> {
        let token = if token == "zs" {
            match self.zs_mode {
                ZsMode::Exact => "zs",
                ZsMode::Asymptotic => "zs-asym",
            }
        } else {
            token
        };
        selection::parse_scheme_token(token, ScenarioKind::FixedSigma, self.hyper_g_a)
    }

    fn resolved_schemes(&self) -> Result<Vec<(String, CriterionScheme)>> {
        self.schemes
            .iter()
            .map(|t| Ok((t.clone(), self.resolve_scheme(t)?)))
            .collect()
    }
}

/// One aggregated table cell: mean MSE for a scheme at a true model size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MseRow {
    pub k_true: usize,
    pub scheme: String,
    pub mean_mse: f64,
    /// Monte Carlo standard error of the mean; absent for a single replicate.
    pub std_err: Option<f64>,
    /// Number of replicates that contributed (failures excluded).
    pub reps: usize,
}

/// Numerical failures tallied per scheme, with one example message.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FailureTally {
    pub scheme: String,
    pub count: usize,
    pub example: String,
}

/// Everything `run_experiment` produces.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub rows: Vec<MseRow>,
    pub config: SimConfig,
    pub failures: Vec<FailureTally>,
    pub wall_time_s: f64,
}

// --- deterministic random streams -----------------------------------------

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    let mut s = splitmix64(base);
    for &p in parts {
        s = splitmix64(s ^ p);
    }
    s
}

/// A seeded stream of doubles built on ChaCha8.
pub struct RandomStream {
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn from_seed(seed: u64) -> Self {
        RandomStream {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Uniform on the open interval (0, 1): top 53 bits, half-offset.
    pub fn uniform_open(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Standard normal by inverse CDF.
    pub fn standard_normal(&mut self) -> f64 {
        std_normal_quantile(self.uniform_open())
    }

    /// Cauchy(0, scale) by inverse transform.
    pub fn cauchy(&mut self, scale: f64) -> f64 {
        scale * (std::f64::consts::PI * (self.uniform_open() - 0.5)).tan()
    }
}

fn std_normal_quantile(p: f64) -> f64 {
    use std::sync::OnceLock;
    static NORMAL: OnceLock<statrs::distribution::Normal> = OnceLock::new();
    NORMAL
        .get_or_init(|| statrs::distribution::Normal::new(0.0, 1.0).unwrap())
        .inverse_cdf(p)
}

// --- operations ------------------------------------------------------------

/// An N×k_max design with orthonormal columns, built by twice-iterated
/// modified Gram-Schmidt on a seeded standard-normal matrix.
pub fn make_orthogonal_design(n: usize, k_max: usize, seed: u64) -> Result<DesignMatrix> {
    if k_max == 0 || k_max > n {
        return Err(Error::domain(format!(
            "need 1 <= k_max <= n, got k_max = {k_max}, n = {n}"
        )));
    }
    let mut stream = RandomStream::from_seed(seed);
    let mut cols: Vec<Vec<f64>> = (0..k_max)
        .map(|_| (0..n).map(|_| stream.standard_normal()).collect())
        .collect();
    for j in 0..k_max {
        for _pass in 0..2 {
            for i in 0..j {
                let dot: f64 = cols[i].iter().zip(&cols[j]).map(|(a, b)| a * b).sum();
                let (head, tail) = cols.split_at_mut(j);
                for (a, b) in head[i].iter().zip(tail[0].iter_mut()) {
                    *b -= dot * a;
                }
            }
        }
        let norm = cols[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-8 {
            return Err(Error::numerical(format!(
                "orthonormalization collapsed at column {}",
                j + 1
            )));
        }
        for v in &mut cols[j] {
            *v /= norm;
        }
    }
    DesignMatrix::from_columns(cols)
}

/// First k_true coefficients i.i.d. Cauchy(0, scale); the rest exactly zero.
pub fn draw_coefficients(
    k_true: usize,
    k_max: usize,
    scale: f64,
    stream: &mut RandomStream,
) -> Result<Vec<f64>> {
    if k_true == 0 || k_true > k_max {
        return Err(Error::domain(format!(
            "need 1 <= k_true <= k_max, got k_true = {k_true}, k_max = {k_max}"
        )));
    }
    let mut beta = vec![0.0; k_max];
    for b in beta.iter_mut().take(k_true) {
        *b = stream.cauchy(scale);
    }
    Ok(beta)
}

/// Per-scheme squared fitted-mean error for one simulated dataset, plus the
/// Oracle entry (least squares on the true columns).
pub struct ReplicateOutcome {
    /// MSE per configured scheme; None where the scheme failed numerically.
    pub mse: Vec<Option<f64>>,
    pub oracle_mse: f64,
    pub failures: Vec<(usize, String)>,
}

/// Simulate y = Xβ + ε and score every scheme over the nested candidates.
///
/// The design columns are orthonormal by precondition, so the least-squares
/// coefficients of the first-K candidate are the projections Xₖᵀy and the
/// whole candidate sweep shares one projection pass.
pub fn run_replicate(
    config: &SimConfig,
    schemes: &[(String, CriterionScheme)],
    k_true: usize,
    design: &DesignMatrix,
    stream: &mut RandomStream,
) -> Result<ReplicateOutcome> {
    let n = config.n;
    let k_max = config.k_max;
    let beta = draw_coefficients(k_true, k_max, config.signal_scale, stream)?;

    // y = Xβ + ε
    let cols = design.columns();
    let mut y = vec![0.0; n];
    for (k, b) in beta.iter().enumerate() {
        if *b != 0.0 {
            for i in 0..n {
                y[i] += b * cols[k][i];
            }
        }
    }
    for yi in y.iter_mut() {
        *yi += stream.standard_normal();
    }

    // Shared projection pass.
    let nf = n as f64;
    let proj: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().zip(&y).map(|(x, yy)| x * yy).sum::<f64>())
        .collect();
    let mean_sq = y.iter().map(|v| v * v).sum::<f64>() / nf;
    let ln_c_sigma = -0.5 * nf * LN_2PI;

    let mut stats_by_k: Vec<SufficientStats> = Vec::with_capacity(k_max);
    let mut cum = 0.0;
    for k in 0..k_max {
        cum += proj[k] * proj[k];
        let bhat_sq = (cum / nf).min(mean_sq);
        stats_by_k.push(SufficientStats::from_summary(
            n,
            k + 1,
            mean_sq,
            bhat_sq,
            Scenario::FixedSigma { ln_c_sigma },
        )?);
    }

    // Fitted-mean squared error for the first-k least squares fit.
    let mse_for = |k_fit: usize| -> f64 {
        let mut err = 0.0;
        for i in 0..n {
            let mut d = 0.0;
            for (k, b) in beta.iter().enumerate() {
                let coef = if k < k_fit { proj[k] } else { 0.0 };
                d += (b - coef) * cols[k][i];
            }
            err += d * d;
        }
        err
    };

    let oracle_mse = mse_for(k_true);

    let mut mse = Vec::with_capacity(schemes.len());
    let mut failures = Vec::new();
    for (idx, (_, scheme)) in schemes.iter().enumerate() {
        let mut cands = Vec::with_capacity(k_max);
        let mut failed: Option<String> = None;
        for (k, stats) in stats_by_k.iter().enumerate() {
            match selection::criterion_value(stats, scheme) {
                Ok(v) => cands.push(CandidateValue {
                    id: format!("K={:02}", k + 1),
                    k: k + 1,
                    value: v,
                }),
                Err(e) => {
                    failed = Some(e.to_string());
                    break;
                }
            }
        }
        match failed {
            Some(msg) => {
                failures.push((idx, msg));
                mse.push(None);
            }
            None => {
                let best = selection::select_best(&cands)?;
                mse.push(Some(mse_for(cands[best].k)));
            }
        }
    }

    Ok(ReplicateOutcome {
        mse,
        oracle_mse,
        failures,
    })
}

/// Run the full experiment: `reps` replicates for every true size 1..k_max,
/// aggregated into the MSE-versus-K table.
pub fn run_experiment(config: &SimConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let started = std::time::Instant::now();
    let schemes = config.resolved_schemes()?;
    let shared_design = if config.redraw_design_per_replicate {
        None
    } else {
        Some(make_orthogonal_design(
            config.n,
            config.k_max,
            derive_seed(config.base_seed, &[TAG_DESIGN]),
        )?)
    };

    let mut rows = Vec::new();
    let mut fail_counts: Vec<(usize, String)> = Vec::new();

    for k_true in 1..=config.k_max {
        let outcomes: Vec<Result<ReplicateOutcome>> = (0..config.reps)
            .into_par_iter()
            .map(|rep| {
                let design = match &shared_design {
                    Some(d) => d.clone(),
                    None => make_orthogonal_design(
                        config.n,
                        config.k_max,
                        derive_seed(config.base_seed, &[TAG_DESIGN, k_true as u64, rep as u64]),
                    )?,
                };
                let seed = derive_seed(
                    config.base_seed,
                    &[TAG_REPLICATE, k_true as u64, rep as u64],
                );
                let mut stream = RandomStream::from_seed(seed);
                run_replicate(config, &schemes, k_true, &design, &mut stream)
            })
            .collect();

        let mut oracle_samples = Vec::with_capacity(config.reps);
        let mut scheme_samples: Vec<Vec<f64>> =
            schemes.iter().map(|_| Vec::with_capacity(config.reps)).collect();
        for outcome in outcomes {
            let outcome = outcome?;
            oracle_samples.push(outcome.oracle_mse);
            for (idx, v) in outcome.mse.iter().enumerate() {
                if let Some(v) = v {
                    scheme_samples[idx].push(*v);
                }
            }
            for (idx, msg) in outcome.failures {
                fail_counts.push((idx, msg));
            }
        }

        rows.push(aggregate_row(k_true, "oracle", &oracle_samples));
        for (idx, (label, _)) in schemes.iter().enumerate() {
            rows.push(aggregate_row(k_true, label, &scheme_samples[idx]));
        }
    }

    let mut failures: Vec<FailureTally> = Vec::new();
    for (idx, msg) in fail_counts {
        let label = &schemes[idx].0;
        match failures.iter_mut().find(|f| &f.scheme == label) {
            Some(f) => f.count += 1,
            None => failures.push(FailureTally {
                scheme: label.clone(),
                count: 1,
                example: msg,
            }),
        }
    }

    Ok(ExperimentReport {
        rows,
        config: config.clone(),
        failures,
        wall_time_s: started.elapsed().as_secs_f64(),
    })
}

fn aggregate_row(k_true: usize, scheme: &str, samples: &[f64]) -> MseRow {
    let reps = samples.len();
    if reps == 0 {
        return MseRow {
            k_true,
            scheme: scheme.to_string(),
            mean_mse: f64::NAN,
            std_err: None,
            reps: 0,
        };
    }
    let mean = samples.iter().sum::<f64>() / reps as f64;
    let std_err = if reps >= 2 {
        let var = samples.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
            / ((reps - 1) as f64);
        Some((var / reps as f64).sqrt())
    } else {
        None
    };
    MseRow {
        k_true,
        scheme: scheme.to_string(),
        mean_mse: mean,
        std_err,
        reps,
    }
}
