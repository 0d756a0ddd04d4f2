//! Closed-form log evidences per prior family and scenario, the fixed-radius
//! conditional evidence they are all mixed from, and quadrature oracles that
//! realize the defining radius and dispersion integrals numerically.

use crate::error::{Error, Result};
use crate::model::{Scenario, SufficientStats};
use crate::priors::{self, PriorScheme};
use crate::quadrature::{integrate_log_halfline, LogQuad};
use crate::specfun;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Zellner-Siow evidence series: term cap and the argument size above which
/// the fixed-dispersion series is replaced by its asymptotic form.
pub const ZS_SERIES_CAP: usize = 10_000;
pub const ZS_ASYMPTOTIC_THRESHOLD: f64 = 1e4;

/// How a log evidence was produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    ClosedForm,
    Series { terms: usize },
    Quadrature { abs_err_estimate: f64 },
    Asymptotic,
}

/// A log evidence together with its provenance.
#[derive(Debug, Clone)]
pub struct EvidenceValue {
    pub log_evidence: f64,
    pub scheme: PriorScheme,
    pub scenario: Scenario,
    pub method: Method,
}

fn check_stats(stats: &SufficientStats) -> Result<()> {
    if stats.k == 0 || stats.n == 0 {
        return Err(Error::domain("statistics need N >= 1 and K >= 1"));
    }
    if !(stats.mean_sq.is_finite() && stats.mean_sq >= 0.0) {
        return Err(Error::domain(format!("mean_sq = {} invalid", stats.mean_sq)));
    }
    if !(stats.bhat_sq.is_finite() && stats.bhat_sq >= 0.0) {
        return Err(Error::domain(format!("bhat_sq = {} invalid", stats.bhat_sq)));
    }
    Ok(())
}

/// Log evidence conditional on the shell radius r.
///
/// Variable dispersion: −(N/2) ln(2πσ²) − N(⟨y²⟩+r²)/(2σ²)
///                      + ln ₀F₁(K/2; N²b̂²r²/(4σ⁴)).
/// Fixed dispersion uses the standardized statistics at σ = 1 and adds the
/// stored ln C_σ; the `sigma` argument is ignored there.
pub fn conditional_log_evidence(stats: &SufficientStats, r: f64, sigma: f64) -> Result<f64> {
    check_stats(stats)?;
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::domain(format!("r must be nonnegative, got {r}")));
    }
    let nf = stats.n as f64;
    let kf = stats.k as f64;
    match stats.scenario {
        Scenario::VariableSigma => {
            if !(sigma.is_finite() && sigma > 0.0) {
                return Err(Error::domain(format!("sigma must be positive, got {sigma}")));
            }
            let s2 = sigma * sigma;
            let z = nf * nf * stats.bhat_sq * r * r / (4.0 * s2 * s2);
            let f = specfun::log_0f1(kf / 2.0, z)?;
            Ok(-0.5 * nf * (LN_2PI + s2.ln()) - nf * (stats.mean_sq + r * r) / (2.0 * s2)
                + f.log_value)
        }
        Scenario::FixedSigma { ln_c_sigma } => {
            let z = nf * nf * stats.bhat_sq * r * r / 4.0;
            let f = specfun::log_0f1(kf / 2.0, z)?;
            Ok(ln_c_sigma - nf * (stats.mean_sq + r * r) / 2.0 + f.log_value)
        }
    }
}

/// Fixed-dispersion log evidence for the given prior family.
pub fn log_evidence_fixed_sigma(stats: &SufficientStats, scheme: &PriorScheme) -> Result<EvidenceValue> {
    check_stats(stats)?;
    scheme.validate()?;
    let ln_c_sigma = match stats.scenario {
        Scenario::FixedSigma { ln_c_sigma } => ln_c_sigma,
        Scenario::VariableSigma => {
            return Err(Error::mismatch(
                "log_evidence_fixed_sigma needs fixed-sigma statistics",
            ))
        }
    };
    let nf = stats.n as f64;
    let kf = stats.k as f64;
    let base = ln_c_sigma - nf * stats.mean_sq / 2.0;
    let arg = nf * stats.bhat_sq / 2.0;

    let (log_evidence, method) = match scheme {
        PriorScheme::ParabolicR => {
            // C_σ 2^{−K} e^{−N⟨z²⟩/2} ₁F₁((K+1)/2; K+1; Nb̂²/2)
            let f = specfun::log_1f1((kf + 1.0) / 2.0, kf + 1.0, arg)?;
            require_converged(&f, "parabolic fixed-sigma 1F1")?;
            (base - kf * 2.0f64.ln() + f.log_value, Method::ClosedForm)
        }
        PriorScheme::HyperG { a } => {
            // C_σ e^{−N⟨z²⟩/2} (a−2)/(K+a−2) ₁F₁(1; (K+a)/2; Nb̂²/2)
            let f = specfun::log_1f1(1.0, (kf + a) / 2.0, arg)?;
            require_converged(&f, "hyper-g fixed-sigma 1F1")?;
            (
                base + (a - 2.0).ln() - (kf + a - 2.0).ln() + f.log_value,
                Method::ClosedForm,
            )
        }
        PriorScheme::GPrior { g } => {
            // C_σ (1+g)^{−K/2} exp(−N⟨z²⟩/2 + gNb̂²/(2(1+g)))
            (
                base - 0.5 * kf * g.ln_1p() + g * arg / (1.0 + g),
                Method::ClosedForm,
            )
        }
        PriorScheme::ZellnerSiow => zs_fixed_sigma(stats, base)?,
    };
    Ok(EvidenceValue {
        log_evidence,
        scheme: *scheme,
        scenario: stats.scenario,
        method,
    })
}

/// Zellner-Siow, fixed dispersion: either the U-function series
///   C_σ e^{−N⟨z²⟩/2} Γ((K+1)/2)/√π Σ_j (N²b̂²/4)^j / j! U(K/2+j; 1/2+j; N/2)
/// or, for large N²b̂²/4 where the series is slow, the asymptotic form
///   C_σ Γ((K+1)/2) (2/N)^{K/2} e^{−NQ₀/2}.
fn zs_fixed_sigma(stats: &SufficientStats, base: f64) -> Result<(f64, Method)> {
    let nf = stats.n as f64;
    let kf = stats.k as f64;
    let x = nf * nf * stats.bhat_sq / 4.0;
    if x > ZS_ASYMPTOTIC_THRESHOLD {
        let ln_c_sigma = match stats.scenario {
            Scenario::FixedSigma { ln_c_sigma } => ln_c_sigma,
            Scenario::VariableSigma => unreachable!(),
        };
        let v = ln_c_sigma + specfun::ln_gamma((kf + 1.0) / 2.0)? + 0.5 * kf * (2.0 / nf).ln()
            - nf * stats.q0 / 2.0;
        return Ok((v, Method::Asymptotic));
    }
    let prefix = specfun::ln_gamma((kf + 1.0) / 2.0)? - 0.5 * std::f64::consts::PI.ln();
    let ln_x = if x > 0.0 { x.ln() } else { f64::NEG_INFINITY };
    let mut sum = LogSumStream::new();
    let mut ln_pow = 0.0; // ln(x^j / j!)
    let mut terms = 0usize;
    for j in 0..ZS_SERIES_CAP {
        let jf = j as f64;
        let u = specfun::log_u(kf / 2.0 + jf, 0.5 + jf, nf / 2.0)?;
        if !u.converged {
            return Err(Error::numerical(format!(
                "U(K/2+{j}, 1/2+{j}, N/2) did not converge in the Zellner-Siow series"
            )));
        }
        let ln_term = ln_pow + u.log_value;
        sum.push(ln_term);
        terms = j + 1;
        if ln_term - sum.ln_total() < specfun::SERIES_TOL.ln() && j >= 2 {
            break;
        }
        if x == 0.0 {
            break;
        }
        ln_pow += ln_x - (jf + 1.0).ln();
    }
    if terms == ZS_SERIES_CAP {
        return Err(Error::numerical(
            "Zellner-Siow fixed-sigma series hit the term cap",
        ));
    }
    Ok((base + prefix + sum.ln_total(), Method::Series { terms }))
}

/// Variable-dispersion log evidence for the given prior family, with the
/// single dispersion integrated out against the Jeffreys prior.
pub fn log_evidence_variable_sigma(
    stats: &SufficientStats,
    scheme: &PriorScheme,
) -> Result<EvidenceValue> {
    check_stats(stats)?;
    scheme.validate()?;
    if stats.scenario.is_fixed() {
        return Err(Error::mismatch(
            "log_evidence_variable_sigma needs variable-sigma statistics",
        ));
    }
    if stats.mean_sq <= 0.0 {
        return Err(Error::domain("variable-sigma evidence needs mean_sq > 0"));
    }
    let nf = stats.n as f64;
    let kf = stats.k as f64;
    let x = stats.fit_fraction();
    if !(0.0..1.0).contains(&x) {
        return Err(Error::domain(format!(
            "fit fraction b̂²/⟨y²⟩ = {x} outside [0, 1)"
        )));
    }
    let ln_scale = -0.5 * nf * (nf * std::f64::consts::PI * stats.mean_sq).ln();

    let (log_evidence, method) = match scheme {
        PriorScheme::ParabolicR => {
            // Γ(N/2) 2^{−(K+1)} (Nπ⟨y²⟩)^{−N/2} ₂F₁((K+1)/2; N/2; K+1; x)
            let f = specfun::log_2f1((kf + 1.0) / 2.0, nf / 2.0, kf + 1.0, x)?;
            require_converged(&f, "parabolic variable-sigma 2F1")?;
            (
                specfun::ln_gamma(nf / 2.0)? - (kf + 1.0) * 2.0f64.ln() + ln_scale + f.log_value,
                Method::ClosedForm,
            )
        }
        PriorScheme::HyperG { a } => {
            // (a−2)Γ(N/2)/(2(K+a−2)) (Nπ⟨y²⟩)^{−N/2} ₂F₁(1; N/2; (K+a)/2; x)
            let f = specfun::log_2f1(1.0, nf / 2.0, (kf + a) / 2.0, x)?;
            require_converged(&f, "hyper-g variable-sigma 2F1")?;
            (
                (a - 2.0).ln() + specfun::ln_gamma(nf / 2.0)? - 2.0f64.ln() - (kf + a - 2.0).ln()
                    + ln_scale
                    + f.log_value,
                Method::ClosedForm,
            )
        }
        PriorScheme::GPrior { g } => {
            // ½ Γ(N/2) (1+g)^{−K/2} (Nπ[⟨y²⟩ − g b̂²/(1+g)])^{−N/2}
            let reduced = stats.mean_sq - g * stats.bhat_sq / (1.0 + g);
            (
                specfun::ln_gamma(nf / 2.0)? - 2.0f64.ln() - 0.5 * kf * g.ln_1p()
                    - 0.5 * nf * (nf * std::f64::consts::PI * reduced).ln(),
                Method::ClosedForm,
            )
        }
        PriorScheme::ZellnerSiow => {
            // Σ_j (Nb̂²/2⟨y²⟩)^j Γ((1+K)/2)Γ(j+N/2)/((Nπ⟨y²⟩)^{N/2} j! 2√π)
            //     U(j+K/2; j+1/2; N/2)
            let w = nf * x / 2.0;
            let ln_w = if w > 0.0 { w.ln() } else { f64::NEG_INFINITY };
            let prefix = specfun::ln_gamma((1.0 + kf) / 2.0)?
                - 2.0f64.ln()
                - 0.5 * std::f64::consts::PI.ln()
                + ln_scale;
            let mut sum = LogSumStream::new();
            let mut ln_pow = specfun::ln_gamma(nf / 2.0)?; // ln(w^j Γ(j+N/2)/j!)
            let mut terms = 0usize;
            for j in 0..ZS_SERIES_CAP {
                let jf = j as f64;
                let u = specfun::log_u(kf / 2.0 + jf, 0.5 + jf, nf / 2.0)?;
                if !u.converged {
                    return Err(Error::numerical(format!(
                        "U(K/2+{j}, 1/2+{j}, N/2) did not converge in the Zellner-Siow series"
                    )));
                }
                let ln_term = ln_pow + u.log_value;
                sum.push(ln_term);
                terms = j + 1;
                if ln_term - sum.ln_total() < specfun::SERIES_TOL.ln() && j >= 2 {
                    break;
                }
                if w == 0.0 {
                    break;
                }
                ln_pow += ln_w + (jf + nf / 2.0).ln() - (jf + 1.0).ln();
            }
            if terms == ZS_SERIES_CAP {
                // Tail bound from the last term ratio, reported, not fatal.
                return Err(Error::numerical(
                    "Zellner-Siow variable-sigma series hit the term cap",
                ));
            }
            (prefix + sum.ln_total(), Method::Series { terms })
        }
    };
    Ok(EvidenceValue {
        log_evidence,
        scheme: *scheme,
        scenario: stats.scenario,
        method,
    })
}

/// Dispatch on the scenario recorded in the statistics.
pub fn log_evidence(stats: &SufficientStats, scheme: &PriorScheme) -> Result<EvidenceValue> {
    match stats.scenario {
        Scenario::FixedSigma { .. } => log_evidence_fixed_sigma(stats, scheme),
        Scenario::VariableSigma => log_evidence_variable_sigma(stats, scheme),
    }
}

fn require_converged(r: &specfun::EvalResult, what: &str) -> Result<()> {
    if r.converged {
        Ok(())
    } else {
        Err(Error::numerical(format!("{what} did not converge")))
    }
}

/// Minimal positive streaming log-sum-exp (local to the series loops here).
struct LogSumStream {
    max: f64,
    sum: f64,
}

impl LogSumStream {
    fn new() -> Self {
        LogSumStream {
            max: f64::NEG_INFINITY,
            sum: 0.0,
        }
    }
    fn push(&mut self, l: f64) {
        if l == f64::NEG_INFINITY {
            return;
        }
        if l > self.max {
            self.sum = self.sum * (self.max - l).exp() + 1.0;
            self.max = l;
        } else {
            self.sum += (l - self.max).exp();
        }
    }
    fn ln_total(&self) -> f64 {
        if self.sum == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.max + self.sum.ln()
        }
    }
}

/// Relative tolerances used by the quadrature oracles.
const QUAD_TOL_INNER: f64 = 1e-9;
const QUAD_TOL_OUTER: f64 = 1e-8;

/// Numerical realization of the defining evidence integral: the radius
/// mixture for fixed dispersion, plus an outer Jeffreys-weighted dispersion
/// integral for the variable scenario.
pub fn quadrature_log_evidence(stats: &SufficientStats, scheme: &PriorScheme) -> Result<EvidenceValue> {
    check_stats(stats)?;
    scheme.validate()?;
    let q = match stats.scenario {
        Scenario::FixedSigma { .. } => integrate_log_halfline(
            |r| {
                let c = conditional_log_evidence(stats, r, 1.0);
                let p = priors::r_prior_log_density(scheme, r, 1.0, stats.k, stats.n);
                match (c, p) {
                    (Ok(c), Ok(p)) => c + p,
                    _ => f64::NEG_INFINITY,
                }
            },
            QUAD_TOL_INNER,
        ),
        Scenario::VariableSigma => integrate_log_halfline(
            |sigma| {
                let inner = integrate_log_halfline(
                    |r| {
                        let c = conditional_log_evidence(stats, r, sigma);
                        let p = priors::r_prior_log_density(scheme, r, sigma, stats.k, stats.n);
                        match (c, p) {
                            (Ok(c), Ok(p)) => c + p,
                            _ => f64::NEG_INFINITY,
                        }
                    },
                    QUAD_TOL_INNER,
                );
                inner.log_value - sigma.ln()
            },
            QUAD_TOL_OUTER,
        ),
    };
    finish_quadrature(q, stats, scheme)
}

/// The alternative g-space route: the fixed-g evidence mixed against the
/// family's g density (and the Jeffreys dispersion integral in the variable
/// scenario). Defined for the mixture families only.
pub fn g_mixture_quadrature_log_evidence(
    stats: &SufficientStats,
    scheme: &PriorScheme,
) -> Result<EvidenceValue> {
    check_stats(stats)?;
    scheme.validate()?;
    if matches!(scheme, PriorScheme::GPrior { .. }) {
        return Err(Error::UnsupportedScheme(
            "the g-prior is a point mass in g; there is nothing to mix".into(),
        ));
    }
    let nf = stats.n as f64;
    let kf = stats.k as f64;
    let q = match stats.scenario {
        Scenario::FixedSigma { ln_c_sigma } => {
            // ∫ dg p(g) C_σ (1+g)^{−K/2} exp(−N⟨z²⟩/2 + gNb̂²/(2(1+g)))
            let base = ln_c_sigma - nf * stats.mean_sq / 2.0;
            integrate_log_halfline(
                |g| {
                    let cond = base - 0.5 * kf * g.ln_1p()
                        + g * nf * stats.bhat_sq / (2.0 * (1.0 + g));
                    match priors::g_prior_log_density(scheme, g, stats.k, stats.n) {
                        Ok(p) => cond + p,
                        Err(_) => f64::NEG_INFINITY,
                    }
                },
                QUAD_TOL_INNER,
            )
        }
        Scenario::VariableSigma => integrate_log_halfline(
            |sigma| {
                let s2 = sigma * sigma;
                let base = -0.5 * nf * (LN_2PI + s2.ln()) - nf * stats.mean_sq / (2.0 * s2);
                let inner = integrate_log_halfline(
                    |g| {
                        let cond = base - 0.5 * kf * g.ln_1p()
                            + g * nf * stats.bhat_sq / (2.0 * (1.0 + g) * s2);
                        match priors::g_prior_log_density(scheme, g, stats.k, stats.n) {
                            Ok(p) => cond + p,
                            Err(_) => f64::NEG_INFINITY,
                        }
                    },
                    QUAD_TOL_INNER,
                );
                inner.log_value - sigma.ln()
            },
            QUAD_TOL_OUTER,
        ),
    };
    finish_quadrature(q, stats, scheme)
}

fn finish_quadrature(q: LogQuad, stats: &SufficientStats, scheme: &PriorScheme) -> Result<EvidenceValue> {
    if !q.log_value.is_finite() {
        return Err(Error::numerical(format!(
            "quadrature for {} evidence returned {}",
            scheme.name(),
            q.log_value
        )));
    }
    Ok(EvidenceValue {
        log_evidence: q.log_value,
        scheme: *scheme,
        scenario: stats.scenario,
        method: Method::Quadrature {
            abs_err_estimate: q.rel_err,
        },
    })
}
