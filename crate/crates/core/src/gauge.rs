//! The order-by-order gauge transform.
//!
//! Conjugating H = H₀ + op(b) by e^{iΨ}, Ψ = Σ Ψ_l, and truncating at
//! depth k̃ leaves H₀ + Y_k̃ + (negligible remainder), with
//!
//! Y_k̃ = Σ_{l=1}^{k̃} B_l + Σ_{l=2}^{k̃} T_l,
//! B_l = Σ_{j=1}^{l−1} (1/j!) Σ_{k₁+⋯+k_j=l−1} ad(op(b); Ψ_{k₁}, …, Ψ_{k_j}),
//! T_l = Σ_{j=2}^{l}   (1/j!) Σ_{k₁+⋯+k_j=l}   ad(H₀;   Ψ_{k₁}, …, Ψ_{k_j}),
//!
//! where each Ψ_l kills the non-resonant part of its level:
//! ad(H₀; Ψ_l) + (B_l + T_l)^♮ = 0. The reduced symbol W_k̃ = Y_k̃ − Y_k̃^♮
//! is supported on resonant configurations only.

use crate::cutoff::{solve_commutator_equation, CutoffFamily, CutoffKind};
use crate::error::CoreError;
use crate::numeric::{RayPoint, SplitMix64};
use crate::regions::{sample_shell, RegionGeometry};
use crate::scale::ScaleParams;
use crate::symbol::Symbol;
use num_complex::Complex64;
use std::sync::Arc;

/// Output of the gauge recursion.
#[derive(Clone, Debug)]
pub struct GaugeResult {
    /// Ψ_1..Ψ_k̃.
    pub psi: Vec<Symbol>,
    /// B_1..B_k̃.
    pub b_terms: Vec<Symbol>,
    /// T_2..T_k̃ (empty for k̃ = 1).
    pub t_terms: Vec<Symbol>,
    /// Y_k̃ = Σ B + Σ T.
    pub y: Symbol,
    /// W_k̃ = Y_k̃ − Y_k̃^♮.
    pub w: Symbol,
    /// Per-level relative commutator-equation residuals on probe
    /// exponentials.
    pub residuals: Vec<f64>,
}

/// Ordered compositions (k₁, …, k_j) of `total` into `j` positive parts.
fn compositions(total: u32, j: u32) -> Vec<Vec<u32>> {
    if j == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(j - 1) {
        for rest in compositions(total - first, j - 1) {
            let mut c = vec![first];
            c.extend(rest);
            out.push(c);
        }
    }
    out
}

fn factorial(j: u32) -> f64 {
    (1..=j).map(|x| x as f64).product::<f64>().max(1.0)
}

/// Left-fold multiple commutator ad(A; Ψ_{k₁}, …, Ψ_{k_j}).
fn multi_ad(a: &Symbol, psis: &[&Symbol]) -> Result<Symbol, CoreError> {
    let mut acc = a.clone();
    for p in psis {
        acc = acc.commutator(p)?;
    }
    Ok(acc)
}

/// Probe exponentials in the shell where the commutator equation is
/// exercised.
fn shell_probes(sp: &ScaleParams, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = SplitMix64::new(seed);
    (0..count)
        .map(|_| sample_shell(sp.d, sp.rho_n / 3.0, 8.0 * sp.rho_n, &mut rng))
        .collect()
}

/// Relative residual of ad(H₀; Ψ) + a^♮ on probe exponentials.
pub fn commutator_residual(
    h0: &Symbol,
    psi: &Symbol,
    a: &Symbol,
    cf: &Arc<CutoffFamily>,
    probes: &[Vec<f64>],
) -> f64 {
    let a_nat = a.cutoff_mul(CutoffKind::Natural, cf);
    let lhs = h0
        .commutator(psi)
        .expect("commutator of gauge symbols")
        .add(&a_nat);
    let mut worst = 0.0f64;
    for nu in probes {
        let num: f64 = lhs
            .apply_to_exponential(nu)
            .iter()
            .map(|(_, c)| c.norm_sqr())
            .sum::<f64>()
            .sqrt();
        let den: f64 = a_nat
            .apply_to_exponential(nu)
            .iter()
            .map(|(_, c)| c.norm_sqr())
            .sum::<f64>()
            .sqrt();
        if den > 1e-300 {
            worst = worst.max(num / den);
        } else {
            worst = worst.max(num);
        }
    }
    worst
}

/// Run the gauge recursion to depth k̃ = sp.k_tilde.
pub fn gauge_recursion(b: &Symbol, cf: &Arc<CutoffFamily>) -> Result<GaugeResult, CoreError> {
    let sp = cf.params().clone();
    if sp.k_tilde < 1 {
        return Err(CoreError::Precondition("k_tilde must be >= 1".into()));
    }
    if !b.self_adjoint_flag() {
        return Err(CoreError::Precondition(
            "gauge recursion requires a self-adjoint symbol".into(),
        ));
    }
    let k_tilde = sp.k_tilde;
    let d = b.dim();
    let h0 = Symbol::free_energy(d, 2.0 * sp.w);
    let probes = shell_probes(&sp, 16, 0x9a6e);
    let prune_tol = 1e-14;

    let mut psi: Vec<Symbol> = Vec::new();
    let mut b_terms: Vec<Symbol> = vec![b.clone()];
    let mut t_terms: Vec<Symbol> = Vec::new();
    let mut residuals: Vec<f64> = Vec::new();

    // level 1
    let psi1 = solve_commutator_equation(b, cf)?;
    residuals.push(commutator_residual(&h0, &psi1, b, cf, &probes));
    psi.push(psi1);

    for l in 2..=k_tilde {
        // B_l
        let mut b_parts: Vec<(Complex64, Symbol)> = Vec::new();
        for j in 1..=(l - 1) {
            let wt = Complex64::new(1.0 / factorial(j), 0.0);
            for comp in compositions(l - 1, j) {
                let picked: Vec<&Symbol> =
                    comp.iter().map(|&k| &psi[(k - 1) as usize]).collect();
                b_parts.push((wt, multi_ad(b, &picked)?));
            }
        }
        let b_l = Symbol::linear(b_parts).pruned(&probes, prune_tol);

        // T_l
        let mut t_parts: Vec<(Complex64, Symbol)> = Vec::new();
        for j in 2..=l {
            let wt = Complex64::new(1.0 / factorial(j), 0.0);
            for comp in compositions(l, j) {
                if comp.iter().any(|&k| k as usize > psi.len()) {
                    continue; // needs Ψ's not yet constructed: impossible for k ≤ l−1
                }
                let picked: Vec<&Symbol> =
                    comp.iter().map(|&k| &psi[(k - 1) as usize]).collect();
                t_parts.push((wt, multi_ad(&h0, &picked)?));
            }
        }
        let t_l = Symbol::linear(t_parts).pruned(&probes, prune_tol);

        let a_l = b_l.add(&t_l);
        let psi_l = solve_commutator_equation(&a_l, cf)?;
        residuals.push(commutator_residual(&h0, &psi_l, &a_l, cf, &probes));
        psi.push(psi_l);
        b_terms.push(b_l);
        t_terms.push(t_l);
    }

    let mut y_parts: Vec<(Complex64, Symbol)> = Vec::new();
    for s in b_terms.iter().chain(t_terms.iter()) {
        y_parts.push((Complex64::new(1.0, 0.0), s.clone()));
    }
    let y = Symbol::linear(y_parts).pruned(&probes, prune_tol);
    let w = y.cutoff_mul(CutoffKind::NaturalComplement, cf);

    Ok(GaugeResult {
        psi,
        b_terms,
        t_terms,
        y,
        w,
        residuals,
    })
}

/// Max |ŵ(θ, ξ)| over sampled configurations that the support property
/// says must vanish: ξ ∈ 𝒜 with ξ ∉ Λ(θ) or ξ+θ ∉ Λ(θ).
pub fn w_support_check(
    gr: &GaugeResult,
    geom: &RegionGeometry,
    in_a: &dyn Fn(&[f64]) -> bool,
    samples: usize,
    seed: u64,
) -> f64 {
    let sp = &geom.sp;
    let mut rng = SplitMix64::new(seed);
    let mut worst = 0.0f64;
    let mut tested = 0usize;
    while tested < samples {
        let xi = sample_shell(sp.d, 5.0 * sp.rho_n / 6.0, 5.0 * sp.rho_n, &mut rng);
        if !in_a(&xi) {
            continue;
        }
        let pt = RayPoint::<Complex64>::real(&xi);
        for th in gr.w.freq_set().iter() {
            if th.is_zero() {
                continue;
            }
            let shifted: Vec<f64> = xi.iter().zip(&th.coords).map(|(a, b)| a + b).collect();
            let violating = !geom.in_slab(&xi, &th.coords) || !geom.in_slab(&shifted, &th.coords);
            if !violating {
                continue;
            }
            // stay strictly interior to the cut-off plateaus
            let tn: f64 = th.norm();
            let margin = (xi.iter().zip(&th.coords).map(|(x, t)| t * (x + t / 2.0)).sum::<f64>())
                .abs()
                / (sp.rho_n.powf(sp.beta) * tn);
            if margin < 1.1 {
                continue;
            }
            tested += 1;
            worst = worst.max(gr.w.fourier_coeff(&th.coords, &pt).norm());
        }
    }
    worst
}
