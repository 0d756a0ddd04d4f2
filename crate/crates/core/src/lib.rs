//! Bayesian variable selection for canonical linear regression built on
//! spherically symmetric parameter priors.
//!
//! The crate diagonalises the Gaussian linear model into sufficient
//! statistics, evaluates closed-form model evidences for four prior families
//! (Zellner g-prior, hyper-g, Zellner-Siow, parabolic r-prior) in both the
//! known- and unknown-dispersion scenarios, ranks candidate models by exact
//! evidences or information criteria, and reproduces the orthogonal-design
//! Monte Carlo study comparing those schemes.
//!
//! Modules:
//! - [`specfun`]: overflow-safe log-space ₀F₁, ₁F₁, ₂F₁, Tricomi U, log-gamma.
//! - [`model`]: datasets, design matrices, standardization, diagonalisation.
//! - [`priors`]: r-space and g-space prior densities.
//! - [`evidence`]: closed-form log evidences plus quadrature oracles.
//! - [`selection`]: criteria, Bayes factors, posterior model probabilities.
//! - [`simulation`]: seeded, reproducible model-selection experiments.
//! - [`quadrature`]: adaptive log-space Gauss-Kronrod integration.

pub mod error;
pub mod evidence;
pub mod model;
pub mod priors;
pub mod quadrature;
pub mod selection;
pub mod simulation;
pub mod specfun;

pub use error::{Error, Result};
pub use evidence::{EvidenceValue, Method};
pub use model::{Dataset, DesignMatrix, Scenario, SigmaSpec, SufficientStats};
pub use priors::PriorScheme;
pub use selection::{ComparisonReport, Criterion, CriterionScheme, ScenarioKind};
pub use simulation::{ExperimentReport, SimConfig};
pub use specfun::{Branch, EvalResult};
