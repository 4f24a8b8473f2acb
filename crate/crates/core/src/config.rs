use crate::error::{GateauxError, Result};

/// Numerical tolerances shared by every routine in the crate.
#[derive(Debug, Clone, PartialEq)]
pub struct ToleranceConfig {
    /// Jacobi stops once the off-diagonal Frobenius norm drops below
    /// `eig_offdiag * |M|_F`.
    pub eig_offdiag: f64,
    /// Eigenvalues `lambda >= lambda_max * (1 - cluster_rel)` belong to the top eigenspace.
    pub cluster_rel: f64,
    /// Feasibility tolerance on witness residuals.
    pub feas_eps: f64,
    /// The feasibility solver stalls (indeterminate) once the duality gap
    /// falls below this.
    pub fw_gap_eps: f64,
    /// Eigenvalue floor for PSD checks; eigenvalues at or below it are dropped
    /// from decompositions.
    pub psd_tol: f64,
    /// Strictly decreasing step sizes for the finite-difference oracle.
    pub fd_steps: Vec<f64>,
    /// Number of uniformly spaced angles sampled in `[0, 2pi)`.
    pub grid_phi: usize,
    /// Iteration cap for Jacobi sweeps and for the feasibility solvers.
    pub max_iter: usize,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            eig_offdiag: 1e-14,
            cluster_rel: 1e-8,
            feas_eps: 1e-6,
            fw_gap_eps: 1e-15,
            psd_tol: 1e-12,
            fd_steps: vec![1e-2, 1e-3, 1e-4, 1e-5, 1e-6],
            grid_phi: 256,
            max_iter: 20_000,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("eig_offdiag", self.eig_offdiag),
            ("cluster_rel", self.cluster_rel),
            ("feas_eps", self.feas_eps),
            ("fw_gap_eps", self.fw_gap_eps),
            ("psd_tol", self.psd_tol),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(GateauxError::InvalidTolerance(format!(
                    "{name} must be strictly positive, got {value}"
                )));
            }
        }
        if self.fd_steps.is_empty() {
            return Err(GateauxError::InvalidTolerance("fd_steps is empty".into()));
        }
        if self.fd_steps.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(GateauxError::InvalidTolerance(
                "fd_steps must be strictly positive".into(),
            ));
        }
        if self.fd_steps.windows(2).any(|w| w[1] >= w[0]) {
            return Err(GateauxError::InvalidTolerance(
                "fd_steps must be strictly decreasing".into(),
            ));
        }
        if self.grid_phi < 16 {
            return Err(GateauxError::InvalidTolerance(format!(
                "grid_phi must be at least 16, got {}",
                self.grid_phi
            )));
        }
        if self.max_iter == 0 {
            return Err(GateauxError::InvalidTolerance("max_iter must be positive".into()));
        }
        Ok(())
    }
}
