//! Data representation, fixed-dispersion standardization, and the
//! diagonalisation that reduces a Gaussian linear model to the sufficient
//! statistics feeding every evidence formula.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative eigenvalue threshold below which a design is rejected as
/// rank deficient rather than pseudo-inverted.
pub const RANK_REL_TOL: f64 = 1e-10;

/// Per-observation noise specification.
#[derive(Debug, Clone, PartialEq)]
pub enum SigmaSpec {
    /// A single unknown dispersion parameter (integrated out with a Jeffreys
    /// prior by the evidence formulas).
    UnknownScalar,
    /// Known positive standard deviations, one per observation.
    KnownVector(Vec<f64>),
}

/// Observed responses plus noise information; sample points are carried as
/// metadata only.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub responses: Vec<f64>,
    pub sample_points: Option<Vec<f64>>,
    pub sigma: SigmaSpec,
}

impl Dataset {
    pub fn new(responses: Vec<f64>, sample_points: Option<Vec<f64>>, sigma: SigmaSpec) -> Result<Self> {
        if responses.is_empty() {
            return Err(Error::domain("dataset needs at least one observation"));
        }
        if responses.iter().any(|y| !y.is_finite()) {
            return Err(Error::domain("non-finite response value"));
        }
        if let Some(c) = &sample_points {
            if c.len() != responses.len() {
                return Err(Error::mismatch(format!(
                    "sample_points length {} != responses length {}",
                    c.len(),
                    responses.len()
                )));
            }
        }
        if let SigmaSpec::KnownVector(s) = &sigma {
            if s.len() != responses.len() {
                return Err(Error::mismatch(format!(
                    "sigma length {} != responses length {}",
                    s.len(),
                    responses.len()
                )));
            }
            if let Some(bad) = s.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
                return Err(Error::domain(format!("sigma entries must be positive, got {bad}")));
            }
        }
        Ok(Dataset {
            responses,
            sample_points,
            sigma,
        })
    }

    pub fn len(&self) -> usize {
        self.responses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.responses.is_empty()
    }
}

/// Predictor columns evaluated at the sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    columns: Vec<Vec<f64>>,
    n: usize,
}

impl DesignMatrix {
    pub fn from_columns(columns: Vec<Vec<f64>>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::domain("design matrix needs at least one column"));
        }
        let n = columns[0].len();
        if n == 0 {
            return Err(Error::domain("design matrix columns are empty"));
        }
        for (k, col) in columns.iter().enumerate() {
            if col.len() != n {
                return Err(Error::mismatch(format!(
                    "column {} has length {}, expected {}",
                    k + 1,
                    col.len(),
                    n
                )));
            }
            if col.iter().any(|v| !v.is_finite()) {
                return Err(Error::domain(format!("column {} has a non-finite entry", k + 1)));
            }
        }
        if columns.len() > n {
            return Err(Error::domain(format!(
                "more predictors ({}) than observations ({})",
                columns.len(),
                n
            )));
        }
        Ok(DesignMatrix { columns, n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    /// The design restricted to its first `k` columns.
    pub fn leading_columns(&self, k: usize) -> Result<DesignMatrix> {
        if k == 0 || k > self.k() {
            return Err(Error::domain(format!(
                "leading_columns requires 1 <= k <= {}, got {k}",
                self.k()
            )));
        }
        Ok(DesignMatrix {
            columns: self.columns[..k].to_vec(),
            n: self.n,
        })
    }

    /// The design restricted to the given zero-based column indices.
    pub fn select_columns(&self, idx: &[usize]) -> Result<DesignMatrix> {
        if idx.is_empty() {
            return Err(Error::domain("column selection is empty"));
        }
        let mut cols = Vec::with_capacity(idx.len());
        for &i in idx {
            let col = self
                .columns
                .get(i)
                .ok_or_else(|| Error::domain(format!("column index {i} out of range")))?;
            cols.push(col.clone());
        }
        DesignMatrix::from_columns(cols)
    }

    fn as_dmatrix(&self) -> DMatrix<f64> {
        let k = self.k();
        DMatrix::from_fn(self.n, k, |i, j| self.columns[j][i])
    }
}

/// Which likelihood the statistics were built for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scenario {
    /// Known per-observation dispersions; carries the model-independent
    /// constant ln C_σ = −½ Σ ln(2π σₙ²).
    FixedSigma { ln_c_sigma: f64 },
    /// One unknown dispersion parameter.
    VariableSigma,
}

impl Scenario {
    pub fn is_fixed(&self) -> bool {
        matches!(self, Scenario::FixedSigma { .. })
    }
}

/// The diagonalisation output: everything an evidence formula needs.
///
/// `mean_sq` is ⟨y²⟩ in the variable-dispersion scenario and ⟨z²⟩ after
/// standardization; `bhat_sq` is the squared norm of the rotated-and-scaled
/// coefficient mode; `q0 = mean_sq − bhat_sq` is the normalized minimum
/// residual sum of squares.
#[derive(Debug, Clone)]
pub struct SufficientStats {
    pub n: usize,
    pub k: usize,
    pub mean_sq: f64,
    pub bhat_sq: f64,
    pub q0: f64,
    pub bhat: Vec<f64>,
    pub beta_hat: Vec<f64>,
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<f64>,
    pub scenario: Scenario,
}

impl SufficientStats {
    /// Statistics assembled directly from the scalar summaries, with a
    /// trivial diagonal frame (the mode along the first axis). The scalar
    /// summaries are the only inputs any evidence formula reads, so this is
    /// the natural constructor for synthetic grids and oracles.
    pub fn from_summary(
        n: usize,
        k: usize,
        mean_sq: f64,
        bhat_sq: f64,
        scenario: Scenario,
    ) -> Result<Self> {
        if n == 0 || k == 0 || k > n {
            return Err(Error::domain(format!(
                "need 1 <= K <= N, got K = {k}, N = {n}"
            )));
        }
        if !(mean_sq.is_finite() && mean_sq >= 0.0) || !(bhat_sq.is_finite() && bhat_sq >= 0.0) {
            return Err(Error::domain("mean_sq and bhat_sq must be nonnegative"));
        }
        if bhat_sq > mean_sq {
            return Err(Error::domain(format!(
                "bhat_sq = {bhat_sq} exceeds mean_sq = {mean_sq}"
            )));
        }
        let mut bhat = vec![0.0; k];
        bhat[0] = bhat_sq.sqrt();
        Ok(SufficientStats {
            n,
            k,
            mean_sq,
            bhat_sq,
            q0: mean_sq - bhat_sq,
            beta_hat: bhat.clone(),
            bhat,
            eigenvalues: vec![1.0; k],
            eigenvectors: DMatrix::identity(k, k),
            scenario,
        })
    }

    /// Fit-fraction b̂²/⟨y²⟩ ∈ [0, 1); the argument of the Gauss
    /// hypergeometric evidences.
    pub fn fit_fraction(&self) -> f64 {
        if self.mean_sq == 0.0 {
            0.0
        } else {
            self.bhat_sq / self.mean_sq
        }
    }
}

/// Scale responses and design by the known per-observation dispersions.
///
/// Returns the scaled responses z, the scaled design, and the
/// model-independent constant ln C_σ.
pub fn standardize(dataset: &Dataset, design: &DesignMatrix) -> Result<(Vec<f64>, DesignMatrix, f64)> {
    let sigmas = match &dataset.sigma {
        SigmaSpec::KnownVector(s) => s,
        SigmaSpec::UnknownScalar => {
            return Err(Error::domain(
                "standardize requires known per-observation sigmas",
            ))
        }
    };
    if design.n() != dataset.len() {
        return Err(Error::mismatch(format!(
            "design rows {} != observations {}",
            design.n(),
            dataset.len()
        )));
    }
    let z: Vec<f64> = dataset
        .responses
        .iter()
        .zip(sigmas)
        .map(|(y, s)| y / s)
        .collect();
    let scaled_cols: Vec<Vec<f64>> = design
        .columns()
        .iter()
        .map(|col| col.iter().zip(sigmas).map(|(x, s)| x / s).collect())
        .collect();
    let ln_c_sigma = -0.5
        * sigmas
            .iter()
            .map(|s| (2.0 * std::f64::consts::PI * s * s).ln())
            .sum::<f64>();
    Ok((z, DesignMatrix::from_columns(scaled_cols)?, ln_c_sigma))
}

/// Diagonalise ℍ = XᵀX/N, solve for the likelihood mode, and extract the
/// sufficient statistics.
///
/// Eigenvalues are sorted descending and each eigenvector's sign is fixed by
/// making its largest-magnitude component positive, so the frame is
/// reproducible. A smallest eigenvalue below `RANK_REL_TOL` times the largest
/// rejects the design.
pub fn diagonalize(design: &DesignMatrix, responses: &[f64], scenario: Scenario) -> Result<SufficientStats> {
    let n = design.n();
    let k = design.k();
    if responses.len() != n {
        return Err(Error::mismatch(format!(
            "responses length {} != design rows {n}",
            responses.len()
        )));
    }
    let x = design.as_dmatrix();
    let y = DVector::from_column_slice(responses);
    let nf = n as f64;

    let mean_sq = y.dot(&y) / nf;
    let h_mat = (x.transpose() * &x) / nf;
    let h_vec = (x.transpose() * &y) / nf;

    let eig = h_mat.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));

    let lambda_max = eig.eigenvalues[order[0]];
    let lambda_min = eig.eigenvalues[order[k - 1]];
    let threshold = RANK_REL_TOL * lambda_max;
    if !(lambda_min > threshold) || lambda_max <= 0.0 {
        return Err(Error::SingularDesign {
            eigenvalue: lambda_min,
            threshold,
            rel_tol: RANK_REL_TOL,
        });
    }

    let mut eigenvalues = Vec::with_capacity(k);
    let mut s_mat = DMatrix::zeros(k, k);
    for (pos, &src) in order.iter().enumerate() {
        eigenvalues.push(eig.eigenvalues[src]);
        let col = eig.eigenvectors.column(src);
        let mut max_idx = 0;
        for i in 1..k {
            if col[i].abs() > col[max_idx].abs() {
                max_idx = i;
            }
        }
        let flip = if col[max_idx] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..k {
            s_mat[(i, pos)] = flip * col[i];
        }
    }

    // β̂ = ℍ⁻¹h via the eigenframe; b̂ = 𝕃^{1/2} 𝕊ᵀ β̂.
    let st_h = s_mat.transpose() * &h_vec;
    let mut bhat = Vec::with_capacity(k);
    for i in 0..k {
        bhat.push(st_h[i] / eigenvalues[i].sqrt());
    }
    let mut beta_hat_v = DVector::zeros(k);
    for i in 0..k {
        beta_hat_v += s_mat.column(i) * (st_h[i] / eigenvalues[i]);
    }

    let bhat_sq: f64 = bhat.iter().map(|v| v * v).sum();

    // q0 from the algebraic decomposition, cross-checked against the direct
    // residual; on disagreement the residual wins (cancellation safety).
    let resid = &y - &x * &beta_hat_v;
    let q0_direct = resid.dot(&resid) / nf;
    let q0_alg = mean_sq - bhat_sq;
    let q0 = if (q0_alg - q0_direct).abs() > 1e-8 * mean_sq.max(f64::MIN_POSITIVE) {
        q0_direct
    } else {
        q0_alg
    };
    let q0 = if q0 < 0.0 {
        if q0 >= -1e-10 * mean_sq {
            0.0
        } else {
            return Err(Error::numerical(format!("negative residual sum q0 = {q0}")));
        }
    } else {
        q0
    };

    Ok(SufficientStats {
        n,
        k,
        mean_sq,
        bhat_sq: bhat_sq.min(mean_sq),
        q0,
        bhat,
        beta_hat: beta_hat_v.iter().copied().collect(),
        eigenvalues,
        eigenvectors: s_mat,
        scenario,
    })
}

/// Rotate and rescale a point of the diagonal frame back to the original
/// coefficient space: β = 𝕊 𝕃^{−1/2} b.
pub fn back_transform(stats: &SufficientStats, b: &[f64]) -> Result<Vec<f64>> {
    if b.len() != stats.k {
        return Err(Error::mismatch(format!(
            "b has length {}, expected {}",
            b.len(),
            stats.k
        )));
    }
    let k = stats.k;
    let mut beta = vec![0.0; k];
    for j in 0..k {
        let scaled = b[j] / stats.eigenvalues[j].sqrt();
        for i in 0..k {
            beta[i] += stats.eigenvectors[(i, j)] * scaled;
        }
    }
    Ok(beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn worked_example() -> SufficientStats {
        // N = 2, X = (1,1)ᵀ, y = (1,3): ⟨y²⟩ = 5, β̂ = 2, b̂² = 4, Q₀ = 1.
        // Oracle: direct least squares residual ‖y − Xβ̂‖²/N with β̂ = 2.
        let design = DesignMatrix::from_columns(vec![vec![1.0, 1.0]]).unwrap();
        diagonalize(&design, &[1.0, 3.0], Scenario::VariableSigma).unwrap()
    }

    #[test]
    fn diagonalize_worked_example() {
        let s = worked_example();
        assert_relative_eq!(s.mean_sq, 5.0, epsilon = 1e-14);
        assert_relative_eq!(s.beta_hat[0], 2.0, epsilon = 1e-14);
        assert_relative_eq!(s.bhat_sq, 4.0, epsilon = 1e-13);
        assert_relative_eq!(s.q0, 1.0, epsilon = 1e-13);
    }

    #[test]
    fn perfect_fit_and_orthogonal_response() {
        // y in the column space → Q₀ = 0, b̂² = ⟨y²⟩.
        let design =
            DesignMatrix::from_columns(vec![vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0]]).unwrap();
        let y = vec![2.0, -1.0, 1.0]; // 2·col1 + (−1)·col2
        let s = diagonalize(&design, &y, Scenario::VariableSigma).unwrap();
        assert_relative_eq!(s.q0, 0.0, epsilon = 1e-12);
        assert_relative_eq!(s.bhat_sq, s.mean_sq, epsilon = 1e-12);

        // y orthogonal to all columns → b̂² = 0, Q₀ = ⟨y²⟩.
        let design = DesignMatrix::from_columns(vec![vec![1.0, 1.0, 0.0]]).unwrap();
        let y = vec![1.0, -1.0, 5.0];
        let s = diagonalize(&design, &y, Scenario::VariableSigma).unwrap();
        assert_relative_eq!(s.bhat_sq, 0.0, epsilon = 1e-12);
        assert_relative_eq!(s.q0, s.mean_sq, epsilon = 1e-12);
    }

    #[test]
    fn stats_invariants() {
        let design = DesignMatrix::from_columns(vec![
            vec![1.0, 2.0, 0.5, -1.0, 0.3],
            vec![0.2, -0.7, 1.4, 2.2, -0.6],
            vec![1.1, 0.4, -0.9, 0.8, 1.7],
        ])
        .unwrap();
        let y = vec![0.7, 1.9, -2.4, 0.1, 1.3];
        let s = diagonalize(&design, &y, Scenario::VariableSigma).unwrap();

        assert!((s.q0 - (s.mean_sq - s.bhat_sq)).abs() <= 1e-10 * s.mean_sq);
        assert!(s.bhat_sq >= 0.0 && s.bhat_sq <= s.mean_sq);
        let norm_sq: f64 = s.bhat.iter().map(|v| v * v).sum();
        assert_relative_eq!(norm_sq, s.bhat_sq, max_relative = 1e-12);

        // 𝕊ᵀ𝕊 = I
        let sts = s.eigenvectors.transpose() * &s.eigenvectors;
        for i in 0..s.k {
            for j in 0..s.k {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((sts[(i, j)] - expect).abs() < 1e-10);
            }
        }
        // Eigenvalues sorted descending and positive.
        for w in s.eigenvalues.windows(2) {
            assert!(w[0] >= w[1]);
        }
        assert!(*s.eigenvalues.last().unwrap() > 0.0);
    }

    #[test]
    fn rank_deficiency_rejected() {
        let design =
            DesignMatrix::from_columns(vec![vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0]]).unwrap();
        let err = diagonalize(&design, &[1.0, 0.0, 1.0], Scenario::VariableSigma).unwrap_err();
        match err {
            Error::SingularDesign { eigenvalue, threshold, .. } => {
                assert!(eigenvalue <= threshold);
            }
            other => panic!("expected SingularDesign, got {other:?}"),
        }
    }

    #[test]
    fn standardize_examples() {
        let design = DesignMatrix::from_columns(vec![vec![1.0, 1.0]]).unwrap();
        // Unit sigmas: unchanged, ln C_σ = −(N/2) ln 2π.
        let d = Dataset::new(vec![2.0, 6.0], None, SigmaSpec::KnownVector(vec![1.0, 1.0])).unwrap();
        let (z, xs, ln_c) = standardize(&d, &design).unwrap();
        assert_eq!(z, vec![2.0, 6.0]);
        assert_eq!(xs.columns()[0], vec![1.0, 1.0]);
        assert_relative_eq!(ln_c, -(2.0 / 2.0) * (2.0 * std::f64::consts::PI).ln());

        // Uniform sigma 2 halves everything.
        let d = Dataset::new(vec![2.0, 6.0], None, SigmaSpec::KnownVector(vec![2.0, 2.0])).unwrap();
        let (z, xs, _) = standardize(&d, &design).unwrap();
        assert_eq!(z, vec![1.0, 3.0]);
        assert_eq!(xs.columns()[0], vec![0.5, 0.5]);

        // Elementwise: y = (2,6), σ = (1,2) → z = (2,3).
        let d = Dataset::new(vec![2.0, 6.0], None, SigmaSpec::KnownVector(vec![1.0, 2.0])).unwrap();
        let (z, _, _) = standardize(&d, &design).unwrap();
        assert_eq!(z, vec![2.0, 3.0]);
    }

    #[test]
    fn standardize_rejects_bad_sigma() {
        assert!(Dataset::new(vec![1.0], None, SigmaSpec::KnownVector(vec![0.0])).is_err());
        assert!(Dataset::new(vec![1.0], None, SigmaSpec::KnownVector(vec![-1.0])).is_err());
        let d = Dataset::new(vec![1.0, 2.0], None, SigmaSpec::UnknownScalar).unwrap();
        let design = DesignMatrix::from_columns(vec![vec![1.0, 1.0]]).unwrap();
        assert!(standardize(&d, &design).is_err());
    }

    #[test]
    fn back_transform_round_trip() {
        let design = DesignMatrix::from_columns(vec![
            vec![1.0, 2.0, 0.5, -1.0],
            vec![0.2, -0.7, 1.4, 2.2],
        ])
        .unwrap();
        let y = vec![0.7, 1.9, -2.4, 0.1];
        let s = diagonalize(&design, &y, Scenario::VariableSigma).unwrap();

        // b = b̂ → β̂ by construction.
        let beta = back_transform(&s, &s.bhat).unwrap();
        for (a, b) in beta.iter().zip(&s.beta_hat) {
            assert_relative_eq!(a, b, max_relative = 1e-12, epsilon = 1e-12);
        }

        // Quadratic-form oracle: βᵀℍβ = ‖b‖² for arbitrary b.
        let b = vec![0.37, -1.42];
        let beta = back_transform(&s, &b).unwrap();
        let x = DMatrix::from_fn(4, 2, |i, j| design.columns()[j][i]);
        let h = (x.transpose() * &x) / 4.0;
        let beta_v = DVector::from_column_slice(&beta);
        let quad = (beta_v.transpose() * h * beta_v)[(0, 0)];
        let b_sq: f64 = b.iter().map(|v| v * v).sum();
        assert_relative_eq!(quad, b_sq, max_relative = 1e-12);

        assert!(back_transform(&s, &[1.0]).is_err());
    }

    #[test]
    fn from_summary_validates() {
        assert!(SufficientStats::from_summary(10, 2, 1.0, 0.5, Scenario::VariableSigma).is_ok());
        assert!(SufficientStats::from_summary(10, 2, 1.0, 1.5, Scenario::VariableSigma).is_err());
        assert!(SufficientStats::from_summary(2, 3, 1.0, 0.5, Scenario::VariableSigma).is_err());
        assert!(SufficientStats::from_summary(10, 0, 1.0, 0.0, Scenario::VariableSigma).is_err());
    }
}
