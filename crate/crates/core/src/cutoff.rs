//! Smooth cut-off functions and the five-way partition of a symbol.
//!
//! All cut-offs derive from one C^∞ step ϖ with ϖ = 1 on (−∞, 1] and
//! ϖ = 0 on [21/20, ∞). Per frequency θ:
//!
//! - e_θ selects the momentum shell ρ_n/3 ≲ |ξ + θ/2| ≲ 8ρ_n,
//! - ℓ^>_θ and ℓ^<_θ select the high- and low-energy complements,
//!   with e_θ + ℓ^>_θ + ℓ^<_θ = 1 pointwise,
//! - ζ_θ selects the resonant slab |⟨θ, ξ + θ/2⟩| ≲ ρ_n^β|θ| and
//!   φ_θ = 1 − ζ_θ its complement.
//!
//! χ̃_θ(ξ) = e_θ φ_θ / (|ξ+θ|^{2w} − |ξ|^{2w}) is the multiplier that
//! solves the commutator equation. The denominator is evaluated through
//! the complexified modulus so χ̃ extends to radial rays.

use crate::error::CoreError;
use crate::numeric::{RayPoint, Scalar};
use crate::scale::ScaleParams;
use crate::symbol::Symbol;
use std::sync::Arc;

/// exp(−1/t)-glued increasing step: 0 at t ≤ 0, 1 at t ≥ 1, C^∞.
pub fn rise_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let g = (-1.0 / t).exp();
        let h = (-1.0 / (1.0 - t)).exp();
        g / (g + h)
    }
}

/// ϖ: 1 on (−∞, 1], 0 on [21/20, ∞), strictly decreasing between.
pub fn smooth_step(z: f64) -> f64 {
    rise_step((21.0 / 20.0 - z) * 20.0)
}

/// Radial smoothing χ: r for r ≥ C₀, 0 for r ≤ C₀/2, smooth in between.
pub fn chi_taper(r: f64, c0: f64) -> f64 {
    if r >= c0 {
        r
    } else if r <= c0 / 2.0 {
        0.0
    } else {
        r * rise_step((r - c0 / 2.0) / (c0 / 2.0))
    }
}

/// Which per-frequency factor a `CutoffMul` node applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CutoffKind {
    /// ℓ^>_θ: high-energy part (0 at θ = 0).
    LGreater,
    /// ℓ^<_θ: low-energy part (0 at θ = 0).
    LLess,
    /// ζ_θ e_θ: resonant shell part (0 at θ = 0).
    Flat,
    /// φ_θ e_θ: non-resonant shell part (0 at θ = 0).
    Natural,
    /// 1 − e_θ φ_θ, and 1 at θ = 0: the reduced-symbol selector.
    NaturalComplement,
    /// Keep only the θ = 0 coefficient.
    ZeroOnly,
}

impl CutoffKind {
    /// All kinds here satisfy f_θ(ξ) = f_{−θ}(ξ+θ), so they preserve the
    /// self-adjointness symmetry.
    pub fn preserves_symmetry(&self) -> bool {
        true
    }
}

#[derive(Debug)]
pub struct CutoffFamily {
    sp: ScaleParams,
}

impl CutoffFamily {
    pub fn new(sp: ScaleParams) -> Arc<Self> {
        Arc::new(CutoffFamily { sp })
    }

    pub fn params(&self) -> &ScaleParams {
        &self.sp
    }

    fn shell_arg(&self, theta: &[f64], xi: &[f64]) -> f64 {
        // 2|2ξ + θ|/ρ_n
        let mut n2 = 0.0;
        for (x, t) in xi.iter().zip(theta) {
            let v = 2.0 * x + t;
            n2 += v * v;
        }
        2.0 * n2.sqrt() / self.sp.rho_n
    }

    /// e_θ(ξ) = ϖ(|2|2ξ+θ|/ρ_n − 15|/13).
    pub fn e_theta(&self, theta: &[f64], xi: &[f64]) -> f64 {
        smooth_step((self.shell_arg(theta, xi) - 15.0).abs() / 13.0)
    }

    /// ℓ^>_θ(ξ) = 1 − ϖ((2|2ξ+θ|/ρ_n − 15)/13).
    pub fn l_greater(&self, theta: &[f64], xi: &[f64]) -> f64 {
        1.0 - smooth_step((self.shell_arg(theta, xi) - 15.0) / 13.0)
    }

    /// ℓ^<_θ(ξ) = 1 − ϖ((15 − 2|2ξ+θ|/ρ_n)/13).
    pub fn l_less(&self, theta: &[f64], xi: &[f64]) -> f64 {
        1.0 - smooth_step((15.0 - self.shell_arg(theta, xi)) / 13.0)
    }

    /// ζ_θ(ξ) = ϖ(|⟨θ, ξ+θ/2⟩|/(ρ_n^β |θ|)).
    pub fn zeta(&self, theta: &[f64], xi: &[f64]) -> f64 {
        let tn: f64 = theta.iter().map(|t| t * t).sum::<f64>().sqrt();
        if tn == 0.0 {
            return 0.0;
        }
        let ip: f64 = theta
            .iter()
            .zip(xi)
            .map(|(t, x)| t * (x + t / 2.0))
            .sum();
        smooth_step(ip.abs() / (self.sp.rho_n.powf(self.sp.beta) * tn))
    }

    pub fn phi(&self, theta: &[f64], xi: &[f64]) -> f64 {
        1.0 - self.zeta(theta, xi)
    }

    fn is_zero_freq(theta: &[f64]) -> bool {
        theta.iter().all(|t| t.abs() < 1e-10)
    }

    /// The scalar factor for a given cut-off kind at (θ, ξ).
    pub fn factor(&self, kind: CutoffKind, theta: &[f64], xi: &[f64]) -> f64 {
        let zero = Self::is_zero_freq(theta);
        match kind {
            CutoffKind::ZeroOnly => {
                if zero {
                    1.0
                } else {
                    0.0
                }
            }
            CutoffKind::NaturalComplement => {
                if zero {
                    1.0
                } else {
                    1.0 - self.e_theta(theta, xi) * self.phi(theta, xi)
                }
            }
            _ if zero => 0.0,
            CutoffKind::LGreater => self.l_greater(theta, xi),
            CutoffKind::LLess => self.l_less(theta, xi),
            CutoffKind::Flat => self.zeta(theta, xi) * self.e_theta(theta, xi),
            CutoffKind::Natural => self.phi(theta, xi) * self.e_theta(theta, xi),
        }
    }

    /// χ̃_θ(ξ) = e_θ(ξ) φ_θ(ξ) (|ξ+θ|^{2w} − |ξ|^{2w})^{-1}, and 0 at θ = 0.
    ///
    /// The cut-off factors are locally constant along radial rays, so they
    /// enter as constants; the denominator uses the complexified modulus.
    pub fn chi_tilde<S: Scalar>(&self, theta: &[f64], xi: &RayPoint<S>) -> S {
        if Self::is_zero_freq(theta) {
            return S::zero();
        }
        let real = xi.real_part();
        let ef = self.e_theta(theta, &real) * self.phi(theta, &real);
        if ef == 0.0 {
            return S::zero();
        }
        let denom = xi.free_symbol_diff(theta, 2.0 * self.sp.w);
        S::from_f(ef) / denom
    }
}

/// The five-way split b = b^o + b^↓ + b^♭ + b^♮ + b^{LE}.
#[derive(Clone, Debug)]
pub struct SymbolSplit {
    pub o: Symbol,
    pub down: Symbol,
    pub flat: Symbol,
    pub natural: Symbol,
    pub le: Symbol,
}

impl SymbolSplit {
    pub fn parts(&self) -> [(&'static str, &Symbol); 5] {
        [
            ("o", &self.o),
            ("down", &self.down),
            ("flat", &self.flat),
            ("natural", &self.natural),
            ("le", &self.le),
        ]
    }
}

/// Split a symbol into its five cut-off parts.
pub fn partition_symbol(b: &Symbol, cf: &Arc<CutoffFamily>) -> SymbolSplit {
    SymbolSplit {
        o: b.cutoff_mul(CutoffKind::ZeroOnly, cf),
        down: b.cutoff_mul(CutoffKind::LLess, cf),
        flat: b.cutoff_mul(CutoffKind::Flat, cf),
        natural: b.cutoff_mul(CutoffKind::Natural, cf),
        le: b.cutoff_mul(CutoffKind::LGreater, cf),
    }
}

/// Lower bound check for the χ̃ denominator on supp(e_θ φ_θ): the claim
/// |denominator| ≳ ρ_n^{2w−2+β}·r(ρ_n) with r the smallest frequency norm.
pub fn chi_tilde_denominator_bound(sp: &ScaleParams, r_min: f64) -> f64 {
    // conservative prefactor; the point of the check is the scaling
    0.05 * sp.rho_n.powf(2.0 * sp.w - 2.0 + sp.beta) * r_min
}

/// Assert the partition identity Σ parts = b on sampled (θ, ξ);
/// returns the maximal defect.
pub fn partition_defect(b: &Symbol, split: &SymbolSplit, samples: &[Vec<f64>]) -> f64 {
    use num_complex::Complex64;
    let mut worst = 0.0f64;
    for s in samples {
        let pt = RayPoint::<Complex64>::real(s);
        for th in b.freq_set().iter() {
            let direct = b.fourier_coeff(&th.coords, &pt);
            let mut sum = Complex64::new(0.0, 0.0);
            for (_, part) in split.parts() {
                sum += part.fourier_coeff(&th.coords, &pt);
            }
            worst = worst.max((direct - sum).norm());
        }
    }
    worst
}

/// Solve ad(H₀; Ψ) + op(a^♮) = 0: ψ̂(θ, ξ) = i â(θ, ξ) χ̃_θ(ξ).
pub fn solve_commutator_equation(
    a: &Symbol,
    cf: &Arc<CutoffFamily>,
) -> Result<Symbol, CoreError> {
    if !a.self_adjoint_flag() {
        return Err(CoreError::Precondition(
            "commutator equation requires a self-adjoint symbol".into(),
        ));
    }
    Ok(a.chi_tilde_mul(cf))
}
