//! Densities of the radius priors and their equivalent g-space mixing
//! densities for the four supported families.
//!
//! The radius densities all scale as p(r | σ) = σ⁻¹ p(r/σ | 1): σ is a pure
//! scale parameter. Fixed-dispersion variants are the same formulas at σ = 1.

use crate::error::{Error, Result};
use crate::specfun::{self};

/// The supported prior families.
///
/// `GPrior` is Zellner's g-prior at a fixed g (a point mass in g-space);
/// `HyperG` mixes over g with density (a−2)/2 · (1+g)^{−a/2}; `ZellnerSiow`
/// is the multivariate Cauchy prior; `ParabolicR` is the parabolic-cylinder
/// radius prior interpolating r^{K−1} small-r and r^{−2} tail behaviour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PriorScheme {
    GPrior { g: f64 },
    HyperG { a: f64 },
    ZellnerSiow,
    ParabolicR,
}

/// Default hyper-g shape parameter; a = 3 tracks the Zellner-Siow tail most
/// closely.
pub const DEFAULT_HYPER_G_A: f64 = 3.0;

impl PriorScheme {
    pub fn validate(&self) -> Result<()> {
        match self {
            PriorScheme::GPrior { g } => {
                if !(g.is_finite() && *g > 0.0) {
                    return Err(Error::domain(format!("g-prior requires g > 0, got {g}")));
                }
            }
            PriorScheme::HyperG { a } => {
                if !(a.is_finite() && *a > 2.0) {
                    return Err(Error::domain(format!("hyper-g requires a > 2, got {a}")));
                }
            }
            PriorScheme::ZellnerSiow | PriorScheme::ParabolicR => {}
        }
        Ok(())
    }

    /// Short stable name used in reports and scheme tokens.
    pub fn name(&self) -> &'static str {
        match self {
            PriorScheme::GPrior { .. } => "gprior",
            PriorScheme::HyperG { .. } => "hyperg",
            PriorScheme::ZellnerSiow => "zs",
            PriorScheme::ParabolicR => "parabolic",
        }
    }

    /// Whether two schemes belong to the same family (parameters ignored).
    pub fn same_family(&self, other: &PriorScheme) -> bool {
        std::mem::discriminant(self) == std::mem::discriminant(other)
    }
}

fn check_args(r_or_g: f64, name: &str, k: usize, n: usize) -> Result<()> {
    if !(r_or_g.is_finite() && r_or_g > 0.0) {
        return Err(Error::domain(format!("{name} must be positive, got {r_or_g}")));
    }
    if k == 0 || n == 0 {
        return Err(Error::domain(format!("need K >= 1 and N >= 1, got K = {k}, N = {n}")));
    }
    Ok(())
}

/// Natural log of the radius density p(r | σ, K) for the given family.
pub fn r_prior_log_density(
    scheme: &PriorScheme,
    r: f64,
    sigma: f64,
    k: usize,
    n: usize,
) -> Result<f64> {
    scheme.validate()?;
    check_args(r, "r", k, n)?;
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::domain(format!("sigma must be positive, got {sigma}")));
    }
    let kf = k as f64;
    let nf = n as f64;
    let half_k = kf / 2.0;
    let w = nf * r * r / (2.0 * sigma * sigma);
    match scheme {
        PriorScheme::GPrior { g } => {
            // 2/(r Γ(K/2)) (Nr²/2σ²g)^{K/2} e^{−Nr²/2σ²g}
            let wg = w / g;
            Ok(2.0f64.ln() - r.ln() - specfun::ln_gamma(half_k)? + half_k * wg.ln() - wg)
        }
        PriorScheme::HyperG { a } => {
            // Γ((a+K)/2 − 1)/Γ(K/2) · (a−2)/r · w^{K/2} U((a+K−2)/2; K/2; w)
            let u = specfun::log_u((a + kf - 2.0) / 2.0, half_k, w)?;
            if !u.converged {
                return Err(Error::numerical(format!(
                    "U((a+K-2)/2, K/2, {w:.3e}) did not converge in hyper-g radius density"
                )));
            }
            Ok(specfun::ln_gamma((a + kf) / 2.0 - 1.0)? - specfun::ln_gamma(half_k)?
                + (a - 2.0).ln()
                - r.ln()
                + half_k * w.ln()
                + u.log_value)
        }
        PriorScheme::ZellnerSiow => {
            // Γ((K+1)/2)/(Γ(K/2)Γ(1/2)) · 2σ r^{K−1} (σ²+r²)^{−(1+K)/2}
            Ok(specfun::ln_gamma((kf + 1.0) / 2.0)? - specfun::ln_gamma(half_k)?
                - specfun::ln_gamma(0.5)?
                + 2.0f64.ln()
                + sigma.ln()
                + (kf - 1.0) * r.ln()
                - 0.5 * (1.0 + kf) * (sigma * sigma + r * r).ln())
        }
        PriorScheme::ParabolicR => {
            // K/(r√π) · w^{K/2} U((K+1)/2; 1/2; w)
            let u = specfun::log_u((kf + 1.0) / 2.0, 0.5, w)?;
            if !u.converged {
                return Err(Error::numerical(format!(
                    "U((K+1)/2, 1/2, {w:.3e}) did not converge in parabolic radius density"
                )));
            }
            Ok(kf.ln() - r.ln() - 0.5 * std::f64::consts::PI.ln() + half_k * w.ln() + u.log_value)
        }
    }
}

/// Natural log of the g-space mixing density p(g) for the mixture families.
///
/// The plain g-prior is a point mass in g and has no density here.
pub fn g_prior_log_density(scheme: &PriorScheme, g: f64, k: usize, n: usize) -> Result<f64> {
    scheme.validate()?;
    check_args(g, "g", k, n)?;
    let kf = k as f64;
    let nf = n as f64;
    match scheme {
        PriorScheme::GPrior { .. } => Err(Error::UnsupportedScheme(
            "the g-prior is a point mass in g and has no mixing density".into(),
        )),
        PriorScheme::HyperG { a } => {
            // (a−2)/2 · (1+g)^{−a/2}
            Ok((a - 2.0).ln() - 2.0f64.ln() - 0.5 * a * g.ln_1p())
        }
        PriorScheme::ZellnerSiow => {
            // √(N/2π) e^{−N/2g} g^{−3/2}
            Ok(0.5 * (nf / (2.0 * std::f64::consts::PI)).ln() - nf / (2.0 * g) - 1.5 * g.ln())
        }
        PriorScheme::ParabolicR => {
            // Γ(1+K/2)/(√π Γ((1+K)/2)) · g^{(K−1)/2} (1+g)^{−(K/2+1)}
            Ok(specfun::ln_gamma(1.0 + kf / 2.0)? - 0.5 * std::f64::consts::PI.ln()
                - specfun::ln_gamma((1.0 + kf) / 2.0)?
                + 0.5 * (kf - 1.0) * g.ln()
                - (kf / 2.0 + 1.0) * g.ln_1p())
        }
    }
}
