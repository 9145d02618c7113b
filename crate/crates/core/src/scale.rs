//! Tuning constants for one dyadic energy window.
//!
//! All scale-dependent quantities derive from a single validated record:
//! the operator exponent w, the perturbation order κ, the exponent chain
//! β < α₁ < ⋯ < α_d < ϑ < ς and the window anchor ρ_n. The slab widths
//! are L_j = ρ_n^{α_j}.

use crate::error::CoreError;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScaleParams {
    pub d: usize,
    /// Exponent of the unperturbed operator (−Δ)^w, w > 0.
    pub w: f64,
    /// Order bound of the perturbation, 0 ≤ κ < 2w.
    pub kappa: f64,
    pub beta: f64,
    /// α₁ < ⋯ < α_d, strictly between β and ϑ.
    pub alphas: Vec<f64>,
    /// ϑ, upper buffer exponent.
    pub theta_upper: f64,
    /// ς, outermost exponent, < 1.
    pub sigma: f64,
    /// Radial cut-off anchor: symbols take their homogeneous form for |ξ| > C₀.
    pub c0: f64,
    /// Lower admissible window anchor.
    pub r0: f64,
    /// Dyadic window anchor; the window is [ρ_n, 4ρ_n].
    pub rho_n: f64,
    /// Diophantine exponent parameter (drives the ρ^{±1/k} thresholds).
    pub k: u32,
    /// Gauge-transform depth.
    pub k_tilde: u32,
    /// Remainder-order target.
    pub m_order: f64,
}

impl ScaleParams {
    /// Validate the whole parameter chain. Returns the violated condition
    /// on failure.
    pub fn validate(&self) -> Result<(), CoreError> {
        let p = |msg: String| Err(CoreError::ParamChain(msg));
        if self.d == 0 {
            return p("d must be >= 1".into());
        }
        if !(self.w > 0.0) {
            return p(format!("w must be positive, got {}", self.w));
        }
        if !(0.0 <= self.kappa && self.kappa < 2.0 * self.w) {
            return p(format!(
                "kappa must satisfy 0 <= kappa < 2w, got kappa = {}, 2w = {}",
                self.kappa,
                2.0 * self.w
            ));
        }
        let beta_floor = (1.0 - self.w + self.kappa / 2.0).max(0.5);
        if !(self.beta > beta_floor) {
            return p(format!(
                "beta must exceed max(1 - w + kappa/2, 1/2) = {beta_floor}, got {}",
                self.beta
            ));
        }
        if self.alphas.len() != self.d {
            return p(format!(
                "need {} alpha exponents, got {}",
                self.d,
                self.alphas.len()
            ));
        }
        let mut prev = self.beta;
        for (j, &a) in self.alphas.iter().enumerate() {
            if !(a > prev) {
                return p(format!(
                    "exponent chain broken at alpha_{}: {} <= {}",
                    j + 1,
                    a,
                    prev
                ));
            }
            prev = a;
        }
        if !(self.theta_upper > prev) {
            return p(format!(
                "theta_upper must exceed alpha_{} = {prev}, got {}",
                self.d, self.theta_upper
            ));
        }
        if !(self.sigma > self.theta_upper && self.sigma < 1.0) {
            return p(format!(
                "sigma must lie in (theta_upper, 1), got {}",
                self.sigma
            ));
        }
        if !(self.c0 > 0.0) {
            return p("C0 must be positive".into());
        }
        if !(self.rho_n >= self.r0) {
            return p(format!(
                "rho_n = {} below the admissible anchor R0 = {}",
                self.rho_n, self.r0
            ));
        }
        if self.k == 0 {
            return p("k must be >= 1".into());
        }
        if self.k_tilde == 0 {
            return p("k_tilde must be >= 1".into());
        }
        Ok(())
    }

    /// Slab width at level j (1-based): L_j = ρ_n^{α_j}.
    pub fn slab_width(&self, j: usize) -> f64 {
        assert!(j >= 1 && j <= self.d, "slab level out of range");
        self.rho_n.powf(self.alphas[j - 1])
    }

    /// (w + κ)/2.
    pub fn w_tilde(&self) -> f64 {
        (self.w + self.kappa) / 2.0
    }

    /// Symbol-class order of the perturbation: κ/β.
    pub fn alpha_order(&self) -> f64 {
        self.kappa / self.beta
    }

    /// λ_n = ρ_n^{2w}.
    pub fn lambda_n(&self) -> f64 {
        self.rho_n.powf(2.0 * self.w)
    }

    /// Radius factor of the spectral contour: (8·max{(2w−2)/3, 1})⁻¹.
    pub fn contour_t(&self) -> f64 {
        1.0 / (8.0 * ((2.0 * self.w - 2.0) / 3.0).max(1.0))
    }

    /// A reasonable default chain for a given dimension and (w, κ).
    pub fn defaults(d: usize, w: f64, kappa: f64, rho_n: f64) -> Self {
        let beta_floor = (1.0 - w + kappa / 2.0).max(0.5);
        let beta = beta_floor + 0.02;
        let gap = (0.92 - beta) / (d as f64 + 2.0);
        let alphas: Vec<f64> = (1..=d).map(|j| beta + gap * j as f64).collect();
        let theta_upper = beta + gap * (d as f64 + 1.0);
        let sigma = beta + gap * (d as f64 + 2.0);
        ScaleParams {
            d,
            w,
            kappa,
            beta,
            alphas,
            theta_upper,
            sigma,
            c0: 4.0,
            r0: 1.0,
            rho_n,
            k: 2,
            k_tilde: 2,
            m_order: 2.0,
        }
    }
}
