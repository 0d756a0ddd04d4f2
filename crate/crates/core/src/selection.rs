//! Model comparison: criterion values (exact evidences, their asymptotic
//! forms, and the classical information criteria), Bayes factors, posterior
//! model probabilities and best-model selection.
//!
//! Criterion values within one scheme drop K-independent constants, so they
//! are comparable only inside a single scheme's ranking.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evidence::{self, EvidenceValue};
use crate::model::{Scenario, SufficientStats};
use crate::priors::PriorScheme;
use crate::specfun;

/// Absolute tolerance inside which two criterion values count as tied;
/// ties resolve to the smaller K, then the lexicographically smaller id.
pub const TIE_TOL: f64 = 1e-12;

/// Scenario tag without the fixed-sigma constant payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    FixedSigma,
    VariableSigma,
}

impl From<&Scenario> for ScenarioKind {
    fn from(s: &Scenario) -> Self {
        match s {
            Scenario::FixedSigma { .. } => ScenarioKind::FixedSigma,
            Scenario::VariableSigma => ScenarioKind::VariableSigma,
        }
    }
}

/// The comparison criterion itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Criterion {
    /// −2 · exact log evidence from the `evidence` module.
    ExactEvidence(PriorScheme),
    /// Large-argument form of the parabolic-prior evidence.
    AsymptoticParabolic,
    /// Large-argument form of the hyper-g evidence.
    AsymptoticHyperG { a: f64 },
    /// Large-argument form of the Zellner-Siow evidence.
    AsymptoticZs,
    Aic,
    Aicc,
    Bic,
}

/// A criterion paired with the scenario whose formula panel applies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriterionScheme {
    pub criterion: Criterion,
    pub scenario: ScenarioKind,
}

impl CriterionScheme {
    pub fn new(criterion: Criterion, scenario: ScenarioKind) -> Self {
        CriterionScheme { criterion, scenario }
    }

    /// Whether the ranking carries exact evidences (and hence posteriors).
    pub fn is_exact(&self) -> bool {
        matches!(self.criterion, Criterion::ExactEvidence(_))
    }

    pub fn name(&self) -> String {
        match &self.criterion {
            Criterion::ExactEvidence(p) => p.name().to_string(),
            Criterion::AsymptoticParabolic => "parabolic-asym".into(),
            Criterion::AsymptoticHyperG { .. } => "hyperg-asym".into(),
            Criterion::AsymptoticZs => "zs-asym".into(),
            Criterion::Aic => "aic".into(),
            Criterion::Aicc => "aicc".into(),
            Criterion::Bic => "bic".into(),
        }
    }
}

/// Parse a scheme token as used by the command line and configuration files:
/// `gprior:<g>`, `hyperg[:<a>]`, `hyperg-asym[:<a>]`, `zs`, `zs-asym`,
/// `parabolic`, `parabolic-asym`, `aic`, `aicc`, `bic`.
pub fn parse_scheme_token(
    token: &str,
    scenario: ScenarioKind,
    default_hyper_a: f64,
) -> Result<CriterionScheme> {
    let token = token.trim();
    let (head, param) = match token.split_once(':') {
        Some((h, p)) => (h, Some(p)),
        None => (token, None),
    };
    let parse_param = |p: Option<&str>, what: &str| -> Result<Option<f64>> {
        match p {
            None => Ok(None),
            Some(s) => s
                .parse::<f64>()
                .map(Some)
                .map_err(|_| Error::domain(format!("cannot parse {what} parameter {s:?}"))),
        }
    };
    let criterion = match head.to_ascii_lowercase().as_str() {
        "gprior" => {
            let g = parse_param(param, "gprior")?
                .ok_or_else(|| Error::domain("gprior needs a value, e.g. gprior:1.0"))?;
            Criterion::ExactEvidence(PriorScheme::GPrior { g })
        }
        "hyperg" => Criterion::ExactEvidence(PriorScheme::HyperG {
            a: parse_param(param, "hyperg")?.unwrap_or(default_hyper_a),
        }),
        "hyperg-asym" => Criterion::AsymptoticHyperG {
            a: parse_param(param, "hyperg-asym")?.unwrap_or(default_hyper_a),
        },
        "zs" => Criterion::ExactEvidence(PriorScheme::ZellnerSiow),
        "zs-asym" => Criterion::AsymptoticZs,
        "parabolic" => Criterion::ExactEvidence(PriorScheme::ParabolicR),
        "parabolic-asym" => Criterion::AsymptoticParabolic,
        "aic" => Criterion::Aic,
        "aicc" => Criterion::Aicc,
        "bic" => Criterion::Bic,
        other => return Err(Error::domain(format!("unknown scheme {other:?}"))),
    };
    let scheme = CriterionScheme::new(criterion, scenario);
    if let Criterion::ExactEvidence(p) = &scheme.criterion {
        p.validate()?;
    }
    if let Criterion::AsymptoticHyperG { a } = &scheme.criterion {
        (PriorScheme::HyperG { a: *a }).validate()?;
    }
    Ok(scheme)
}

/// The −2·log-evidence criterion for one candidate, K-independent constants
/// omitted in the asymptotic and information-criterion rows.
pub fn criterion_value(stats: &SufficientStats, scheme: &CriterionScheme) -> Result<f64> {
    let stats_kind = ScenarioKind::from(&stats.scenario);
    if stats_kind != scheme.scenario {
        return Err(Error::mismatch(format!(
            "statistics are {stats_kind:?} but the criterion expects {:?}",
            scheme.scenario
        )));
    }
    let nf = stats.n as f64;
    let kf = stats.k as f64;
    let nq0 = nf * stats.q0;
    match (&scheme.criterion, scheme.scenario) {
        (Criterion::ExactEvidence(prior), _) => {
            Ok(-2.0 * evidence::log_evidence(stats, prior)?.log_evidence)
        }
        (Criterion::Aic, _) => Ok(nq0 + 2.0 * kf),
        (Criterion::Aicc, _) => {
            if stats.n <= stats.k + 1 {
                return Err(Error::domain(format!(
                    "AICc needs N > K + 1, got N = {}, K = {}",
                    stats.n, stats.k
                )));
            }
            Ok(nq0 + 2.0 * kf + 2.0 * kf * (kf + 1.0) / (nf - kf - 1.0))
        }
        (Criterion::Bic, _) => Ok(nq0 + kf * nf.ln()),
        (Criterion::AsymptoticParabolic, ScenarioKind::FixedSigma) => {
            Ok(nq0 + (kf + 1.0) * (nf * stats.bhat_sq / 2.0).ln()
                - 2.0 * specfun::ln_gamma(kf / 2.0 + 1.0)?)
        }
        (Criterion::AsymptoticHyperG { a }, ScenarioKind::FixedSigma) => {
            Ok(nq0 + (kf + a - 2.0) * (nf * stats.bhat_sq / 2.0).ln()
                - 2.0 * specfun::ln_gamma((kf + a - 2.0) / 2.0)?)
        }
        (Criterion::AsymptoticZs, ScenarioKind::FixedSigma) => {
            Ok(nq0 + kf * (nf / 2.0).ln() - 2.0 * specfun::ln_gamma((kf + 1.0) / 2.0)?)
        }
        (Criterion::AsymptoticParabolic, ScenarioKind::VariableSigma) => {
            let x = stats.fit_fraction();
            Ok(-nf * x + (kf + 1.0) * (nf * x / 2.0).ln()
                - 2.0 * specfun::ln_gamma(kf / 2.0 + 1.0)?)
        }
        (Criterion::AsymptoticHyperG { a }, ScenarioKind::VariableSigma) => {
            let x = stats.fit_fraction();
            Ok(-nf * x + (kf + a - 2.0) * (nf * x / 2.0).ln()
                - 2.0 * specfun::ln_gamma((kf + a - 2.0) / 2.0)?)
        }
        (Criterion::AsymptoticZs, ScenarioKind::VariableSigma) => {
            let x = stats.fit_fraction();
            Ok(nf * (-x).ln_1p() + kf * (nf / 2.0).ln()
                - 2.0 * specfun::ln_gamma((kf + 1.0) / 2.0)?)
        }
    }
}

/// Log Bayes factor between two evidences of the same family and scenario.
pub fn log_bayes_factor(ev_a: &EvidenceValue, ev_b: &EvidenceValue) -> Result<f64> {
    if ScenarioKind::from(&ev_a.scenario) != ScenarioKind::from(&ev_b.scenario) {
        return Err(Error::mismatch("Bayes factor across scenarios"));
    }
    if !ev_a.scheme.same_family(&ev_b.scheme) {
        return Err(Error::mismatch(format!(
            "Bayes factor across scheme families {} and {}",
            ev_a.scheme.name(),
            ev_b.scheme.name()
        )));
    }
    Ok(ev_a.log_evidence - ev_b.log_evidence)
}

/// Posterior model probabilities ∝ exp(log evidence + log prior), normalized
/// by log-sum-exp.
pub fn posterior_probabilities(
    evidences: &[EvidenceValue],
    model_log_priors: &[f64],
) -> Result<Vec<f64>> {
    if evidences.is_empty() {
        return Err(Error::domain("posterior over an empty model list"));
    }
    if evidences.len() != model_log_priors.len() {
        return Err(Error::mismatch(format!(
            "{} evidences but {} model priors",
            evidences.len(),
            model_log_priors.len()
        )));
    }
    let logs: Vec<f64> = evidences
        .iter()
        .zip(model_log_priors)
        .map(|(e, lp)| e.log_evidence + lp)
        .collect();
    let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return Err(Error::numerical("all posterior weights are zero"));
    }
    let mut w: Vec<f64> = logs.iter().map(|l| (l - m).exp()).collect();
    let total: f64 = w.iter().sum();
    for v in &mut w {
        *v /= total;
    }
    Ok(w)
}

/// One candidate entry for selection.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CandidateValue {
    pub id: String,
    pub k: usize,
    pub value: f64,
}

/// Index of the minimum criterion value; ties within `TIE_TOL` resolve to the
/// smallest K, then the smallest id.
pub fn select_best(candidates: &[CandidateValue]) -> Result<usize> {
    if candidates.is_empty() {
        return Err(Error::domain("select_best needs at least one candidate"));
    }
    let mut best = 0usize;
    for i in 1..candidates.len() {
        let c = &candidates[i];
        let b = &candidates[best];
        if c.value < b.value - TIE_TOL {
            best = i;
        } else if (c.value - b.value).abs() <= TIE_TOL {
            if c.k < b.k || (c.k == b.k && c.id < b.id) {
                best = i;
            }
        }
    }
    Ok(best)
}

/// Per-candidate results of a within-scheme comparison.
#[derive(Debug, Clone, Serialize)]
pub struct CandidateReport {
    pub id: String,
    pub k: usize,
    pub criterion: f64,
    pub log_evidence: Option<f64>,
}

/// A full ranking under one scheme: criterion values, posteriors for exact
/// schemes, and the selected model.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub scheme: String,
    pub candidates: Vec<CandidateReport>,
    pub posterior: Option<Vec<f64>>,
    pub best: String,
}

/// Rank the candidates under a single scheme (mixing schemes in one ranking
/// is not representable by construction).
pub fn compare_models(
    candidates: &[(String, SufficientStats)],
    scheme: &CriterionScheme,
) -> Result<ComparisonReport> {
    if candidates.is_empty() {
        return Err(Error::domain("compare_models needs at least one candidate"));
    }
    let mut reports = Vec::with_capacity(candidates.len());
    let mut values = Vec::with_capacity(candidates.len());
    let mut evidences: Vec<EvidenceValue> = Vec::new();
    for (id, stats) in candidates {
        let value = criterion_value(stats, scheme)?;
        let log_evidence = if let Criterion::ExactEvidence(prior) = &scheme.criterion {
            let ev = evidence::log_evidence(stats, prior)?;
            let le = ev.log_evidence;
            evidences.push(ev);
            Some(le)
        } else {
            None
        };
        reports.push(CandidateReport {
            id: id.clone(),
            k: stats.k,
            criterion: value,
            log_evidence,
        });
        values.push(CandidateValue {
            id: id.clone(),
            k: stats.k,
            value,
        });
    }
    let best_idx = select_best(&values)?;
    let posterior = if scheme.is_exact() {
        let priors = vec![0.0; evidences.len()];
        Some(posterior_probabilities(&evidences, &priors)?)
    } else {
        None
    };
    Ok(ComparisonReport {
        scheme: scheme.name(),
        candidates: reports,
        posterior,
        best: values[best_idx].id.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn stats_q0(n: usize, k: usize, q0: f64) -> SufficientStats {
        // mean_sq = 1, bhat_sq = 1 − q0 gives the requested q0.
        SufficientStats::from_summary(
            n,
            k,
            1.0,
            1.0 - q0,
            Scenario::FixedSigma { ln_c_sigma: 0.0 },
        )
        .unwrap()
    }

    #[test]
    fn table_values() {
        let s = stats_q0(100, 3, 0.5);
        let aic = CriterionScheme::new(Criterion::Aic, ScenarioKind::FixedSigma);
        assert_relative_eq!(criterion_value(&s, &aic).unwrap(), 56.0, epsilon = 1e-12);
        let bic = CriterionScheme::new(Criterion::Bic, ScenarioKind::FixedSigma);
        assert_relative_eq!(
            criterion_value(&s, &bic).unwrap(),
            50.0 + 3.0 * 100.0f64.ln(),
            epsilon = 1e-10
        );
        let s1 = stats_q0(100, 1, 0.5);
        let zs = CriterionScheme::new(Criterion::AsymptoticZs, ScenarioKind::FixedSigma);
        assert_relative_eq!(
            criterion_value(&s1, &zs).unwrap(),
            50.0 + 50.0f64.ln(),
            epsilon = 1e-10
        );
    }

    #[test]
    fn aicc_domain() {
        let s = stats_q0(4, 3, 0.5);
        let aicc = CriterionScheme::new(Criterion::Aicc, ScenarioKind::FixedSigma);
        assert!(criterion_value(&s, &aicc).is_err());
        let s = stats_q0(5, 3, 0.5);
        assert!(criterion_value(&s, &aicc).is_ok());
    }

    #[test]
    fn scenario_mismatch() {
        let s = stats_q0(10, 2, 0.5);
        let scheme = CriterionScheme::new(Criterion::Aic, ScenarioKind::VariableSigma);
        assert!(criterion_value(&s, &scheme).is_err());
    }

    fn ev(log_evidence: f64) -> EvidenceValue {
        EvidenceValue {
            log_evidence,
            scheme: PriorScheme::ParabolicR,
            scenario: Scenario::VariableSigma,
            method: crate::evidence::Method::ClosedForm,
        }
    }

    #[test]
    fn bayes_factor_basics() {
        let a = ev(-10.0);
        let b = ev(-10.0 - 3.0f64.ln());
        assert_eq!(log_bayes_factor(&a, &a).unwrap(), 0.0);
        assert_relative_eq!(log_bayes_factor(&a, &b).unwrap(), 3.0f64.ln(), epsilon = 1e-13);
        assert_relative_eq!(
            log_bayes_factor(&a, &b).unwrap(),
            -log_bayes_factor(&b, &a).unwrap()
        );
        let mut c = ev(-1.0);
        c.scenario = Scenario::FixedSigma { ln_c_sigma: 0.0 };
        assert!(log_bayes_factor(&a, &c).is_err());
        let mut d = ev(-1.0);
        d.scheme = PriorScheme::ZellnerSiow;
        assert!(log_bayes_factor(&a, &d).is_err());
    }

    #[test]
    fn posterior_basics() {
        // Equal evidences → uniform.
        let evs: Vec<_> = (0..4).map(|_| ev(-5.0)).collect();
        let p = posterior_probabilities(&evs, &[0.0; 4]).unwrap();
        for v in &p {
            assert_relative_eq!(*v, 0.25, epsilon = 1e-14);
        }
        // Single model → 1.
        let p = posterior_probabilities(&[ev(-300.0)], &[0.0]).unwrap();
        assert_eq!(p, vec![1.0]);
        // Gap of ln 3 → (0.75, 0.25).
        let p = posterior_probabilities(&[ev(-10.0), ev(-10.0 - 3.0f64.ln())], &[0.0, 0.0]).unwrap();
        assert_relative_eq!(p[0], 0.75, epsilon = 1e-12);
        assert_relative_eq!(p[1], 0.25, epsilon = 1e-12);
        assert!(posterior_probabilities(&[], &[]).is_err());
    }

    #[test]
    fn posterior_shift_invariance() {
        let evs = [ev(-1000.0), ev(-1001.0), ev(-998.5)];
        let shifted: Vec<_> = evs.iter().map(|e| ev(e.log_evidence + 750.0)).collect();
        let p1 = posterior_probabilities(&evs, &[0.0; 3]).unwrap();
        let p2 = posterior_probabilities(&shifted, &[0.0; 3]).unwrap();
        for (a, b) in p1.iter().zip(&p2) {
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
        assert_relative_eq!(p1.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    fn cand(id: &str, k: usize, value: f64) -> CandidateValue {
        CandidateValue {
            id: id.into(),
            k,
            value,
        }
    }

    #[test]
    fn select_best_rules() {
        let c = [cand("a", 1, 5.0), cand("b", 2, 3.0), cand("c", 3, 4.0)];
        assert_eq!(select_best(&c).unwrap(), 1);
        // Exact tie between K = 4 and K = 2 → the K = 2 model.
        let c = [cand("k4", 4, 7.0), cand("k2", 2, 7.0)];
        assert_eq!(select_best(&c).unwrap(), 1);
        // Tie at equal K → smaller id.
        let c = [cand("zz", 2, 7.0), cand("aa", 2, 7.0)];
        assert_eq!(select_best(&c).unwrap(), 1);
        // Single candidate.
        let c = [cand("only", 1, 0.0)];
        assert_eq!(select_best(&c).unwrap(), 0);
        assert!(select_best(&[]).is_err());
    }

    #[test]
    fn constant_shift_invariance() {
        let base = [cand("a", 1, 5.0), cand("b", 2, 3.0), cand("c", 3, 4.0)];
        let shifted: Vec<_> = base
            .iter()
            .map(|c| cand(&c.id, c.k, c.value + 123.456))
            .collect();
        assert_eq!(select_best(&base).unwrap(), select_best(&shifted).unwrap());
    }

    #[test]
    fn compare_models_exact_agrees_with_posterior() {
        let mk = |k: usize, bs: f64| {
            (
                format!("K={k}"),
                SufficientStats::from_summary(
                    30,
                    k,
                    1.0,
                    bs,
                    Scenario::FixedSigma {
                        ln_c_sigma: -15.0 * LN_2PI_TEST,
                    },
                )
                .unwrap(),
            )
        };
        let cands = vec![mk(1, 0.3), mk(2, 0.42), mk(3, 0.43)];
        let scheme = CriterionScheme::new(
            Criterion::ExactEvidence(PriorScheme::ParabolicR),
            ScenarioKind::FixedSigma,
        );
        let rep = compare_models(&cands, &scheme).unwrap();
        let posterior = rep.posterior.as_ref().unwrap();
        assert_relative_eq!(posterior.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        // argmin criterion = argmax posterior under equal model priors.
        let bi = posterior
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert_eq!(rep.best, rep.candidates[bi].id);
    }

    const LN_2PI_TEST: f64 = 1.837_877_066_409_345_5;
}
