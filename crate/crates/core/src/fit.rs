//! Least-squares fitting of N(ρ^{2w}) in the basis {ρ^γ ln^q ρ}.
//!
//! The admissible exponents are γ = d + (2 − 2w)h + ι₁ + ⋯ + ι_h − j for
//! h ≤ h_max, radial exponents ι from the operator, and integer j ≥ 0;
//! log powers run up to q_max (at most d − 1 for the operators treated
//! here, but probe log columns can be requested to confirm their absence).
//! Coinciding exponents are merged, keeping the representative with the
//! minimal h (then maximal j).

use crate::error::CoreError;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// One basis function ρ^γ ln^q ρ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisTerm {
    pub gamma: f64,
    pub q: u32,
}

/// Build the deduplicated exponent basis.
///
/// `iotas` are the radial exponents present in the operator (use `[0.0]`
/// for multiplication potentials), `j_max` the depth of inverse powers.
pub fn expansion_basis(
    d: usize,
    w: f64,
    iotas: &[f64],
    h_max: u32,
    j_max: u32,
    q_max: u32,
) -> Vec<BasisTerm> {
    // candidates keyed by (γ quantized, q), keeping minimal h then maximal j
    let mut best: Vec<(i64, u32, u32, u32, f64)> = Vec::new(); // (γkey, q, h, j, γ)
    let mut sums: Vec<f64> = vec![0.0]; // ι-sums for h = 0
    for h in 0..=h_max {
        if h > 0 {
            let mut next = Vec::new();
            for s in &sums {
                for &i in iotas {
                    next.push(s + i);
                }
            }
            next.sort_by(f64::total_cmp);
            next.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
            sums = next;
        }
        for s in &sums {
            for j in 0..=j_max {
                let gamma = d as f64 + (2.0 - 2.0 * w) * h as f64 + s - j as f64;
                let key = (gamma * 1e9).round() as i64;
                for q in 0..=q_max {
                    match best.iter_mut().find(|(k, qq, ..)| *k == key && *qq == q) {
                        Some(entry) => {
                            // minimal h wins; for equal h, maximal j
                            if h < entry.2 || (h == entry.2 && j > entry.3) {
                                entry.2 = h;
                                entry.3 = j;
                            }
                        }
                        None => best.push((key, q, h, j, gamma)),
                    }
                }
            }
        }
    }
    best.sort_by(|a, b| b.4.total_cmp(&a.4).then(a.1.cmp(&b.1)));
    best.into_iter()
        .map(|(_, q, _, _, gamma)| BasisTerm { gamma, q })
        .collect()
}

/// Result of a least-squares expansion fit.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExpansionFit {
    pub basis: Vec<BasisTerm>,
    pub coeffs: Vec<f64>,
    /// Per-coefficient standard errors from the residual variance.
    pub stderrs: Vec<f64>,
    /// ℓ² residual of the fit.
    pub residual: f64,
    /// Condition number of the scaled design matrix.
    pub cond: f64,
    /// [ρ_min, ρ_max] of the samples used.
    pub window: (f64, f64),
}

impl ExpansionFit {
    /// The coefficient of ρ^γ ln^q ρ, if that basis term is present.
    pub fn coeff(&self, gamma: f64, q: u32) -> Option<f64> {
        self.basis
            .iter()
            .position(|t| (t.gamma - gamma).abs() < 1e-9 && t.q == q)
            .map(|i| self.coeffs[i])
    }

    pub fn stderr(&self, gamma: f64, q: u32) -> Option<f64> {
        self.basis
            .iter()
            .position(|t| (t.gamma - gamma).abs() < 1e-9 && t.q == q)
            .map(|i| self.stderrs[i])
    }
}

pub const MAX_CONDITION_NUMBER: f64 = 1e12;

/// Fit samples (ρ, N) against the basis. Columns are normalized before
/// the solve; the condition number is reported for the normalized design
/// matrix and the fit refused above [`MAX_CONDITION_NUMBER`].
pub fn fit_expansion(
    samples: &[(f64, f64)],
    basis: &[BasisTerm],
) -> Result<ExpansionFit, CoreError> {
    let n = samples.len();
    let p = basis.len();
    if p == 0 {
        return Err(CoreError::Precondition("empty fit basis".into()));
    }
    if n < 3 * p {
        return Err(CoreError::Precondition(format!(
            "need at least 3× more samples than basis functions: {n} < {}",
            3 * p
        )));
    }
    let rho_min = samples.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let rho_max = samples.iter().map(|s| s.0).fold(0.0f64, f64::max);

    let raw = DMatrix::from_fn(n, p, |i, j| {
        let rho = samples[i].0;
        rho.powf(basis[j].gamma) * rho.ln().powi(basis[j].q as i32)
    });
    // column scaling for conditioning
    let scales: Vec<f64> = (0..p)
        .map(|j| {
            let s = raw.column(j).iter().map(|x| x * x).sum::<f64>().sqrt();
            if s > 0.0 {
                s
            } else {
                1.0
            }
        })
        .collect();
    let mut a = raw.clone();
    for j in 0..p {
        for i in 0..n {
            a[(i, j)] /= scales[j];
        }
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0f64, f64::max);
    let smin = svd
        .singular_values
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let cond = smax / smin.max(1e-300);
    if cond > MAX_CONDITION_NUMBER {
        return Err(CoreError::Precondition(format!(
            "design matrix condition number {cond:.3e} exceeds {MAX_CONDITION_NUMBER:.0e}: basis collapsed on this window"
        )));
    }
    let y = DVector::from_fn(n, |i, _| samples[i].1);
    let sol_scaled = svd
        .solve(&y, 1e-14)
        .map_err(|e| CoreError::NonConvergence(format!("SVD solve failed: {e}")))?;
    let coeffs: Vec<f64> = (0..p).map(|j| sol_scaled[j] / scales[j]).collect();

    let fitted = raw * DVector::from_vec(coeffs.clone());
    let residual = (&y - &fitted).norm();
    // standard errors: σ²(AᵀA)⁻¹ on the scaled system, mapped back
    let dof = (n as f64 - p as f64).max(1.0);
    let sigma2 = residual * residual / dof;
    let ata = a.transpose() * &a;
    let stderrs: Vec<f64> = match ata.try_inverse() {
        Some(inv) => (0..p)
            .map(|j| (sigma2 * inv[(j, j)]).max(0.0).sqrt() / scales[j])
            .collect(),
        None => vec![f64::NAN; p],
    };

    Ok(ExpansionFit {
        basis: basis.to_vec(),
        coeffs,
        stderrs,
        residual,
        cond,
        window: (rho_min, rho_max),
    })
}
