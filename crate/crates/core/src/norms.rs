//! Grid estimates of the symbol-class norms
//! Σ_θ ⟨θ⟩^l sup_ξ ⟨ξ⟩^{(−α+|s|)β} |D^s_ξ b̂(θ, ξ)|.
//!
//! The sup over ξ is approximated on a log-radial grid (these are
//! diagnostics, so the estimates are lower bounds by construction), and
//! D^s by nested central differences with step h ∝ ⟨ξ⟩.

use crate::numeric::RayPoint;
use crate::symbol::Symbol;
use num_complex::Complex64;

/// Grid used for the sup_ξ approximation.
#[derive(Clone, Debug)]
pub struct NormGrid {
    pub radii: usize,
    pub r_min: f64,
    pub r_max: f64,
    /// Extra refinement factor on the radial count (CLI-exposed).
    pub refine: usize,
}

impl NormGrid {
    /// 64 radii in [1, 32ρ_n], 2d+2 directions per sphere.
    pub fn standard(rho_n: f64) -> Self {
        NormGrid {
            radii: 64,
            r_min: 1.0,
            r_max: 32.0 * rho_n,
            refine: 1,
        }
    }

    fn points(&self, d: usize) -> Vec<Vec<f64>> {
        let n = self.radii * self.refine;
        let mut dirs: Vec<Vec<f64>> = Vec::with_capacity(2 * d + 2);
        for i in 0..d {
            let mut e = vec![0.0; d];
            e[i] = 1.0;
            dirs.push(e.clone());
            e[i] = -1.0;
            dirs.push(e);
        }
        let diag = 1.0 / (d as f64).sqrt();
        dirs.push(vec![diag; d]);
        dirs.push(vec![-diag; d]);

        let mut pts = Vec::with_capacity(n * dirs.len());
        for i in 0..n {
            let t = i as f64 / (n - 1).max(1) as f64;
            let r = self.r_min * (self.r_max / self.r_min).powf(t);
            for dir in &dirs {
                pts.push(dir.iter().map(|c| c * r).collect());
            }
        }
        pts
    }
}

pub const MAX_DERIVATIVE_ORDER: usize = 3;

/// All multi-indices 𝐬 ∈ N₀^d with |𝐬| ≤ s.
fn multi_indices(d: usize, s: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![0; d]];
    for _ in 0..s {
        let mut next = out.clone();
        for m in &out {
            for ax in 0..d {
                let mut m2 = m.clone();
                m2[ax] += 1;
                if !next.contains(&m2) {
                    next.push(m2);
                }
            }
        }
        out = next;
    }
    out
}

/// D^𝐬 b̂(θ, ·) at ξ by nested central differences, one axis at a time.
fn derivative(b: &Symbol, theta: &[f64], xi: &[f64], multi: &[usize], h: f64) -> Complex64 {
    fn recurse(
        b: &Symbol,
        theta: &[f64],
        xi: &[f64],
        multi: &[usize],
        axis: usize,
        h: f64,
    ) -> Complex64 {
        if axis == multi.len() {
            return b.fourier_coeff(theta, &RayPoint::<Complex64>::real(xi));
        }
        let order = multi[axis];
        if order == 0 {
            return recurse(b, theta, xi, multi, axis + 1, h);
        }
        let at = |offset: f64| {
            let mut p = xi.to_vec();
            p[axis] += offset;
            let mut rest = multi.to_vec();
            rest[axis] = 0;
            recurse(b, theta, &p, &rest, axis + 1, h)
        };
        match order {
            1 => (at(h) - at(-h)) / (2.0 * h),
            2 => (at(h) - 2.0 * at(0.0) + at(-h)) / (h * h),
            3 => (at(2.0 * h) - 2.0 * at(h) + 2.0 * at(-h) - at(-2.0 * h)) / (2.0 * h * h * h),
            _ => panic!("derivative order above supported maximum"),
        }
    }
    recurse(b, theta, xi, multi, 0, h)
}

/// Grid estimate of the symbol norm. `alpha` is the class order, `l` the
/// frequency weight, `s` the derivative order (≤ 3).
///
/// Any finite grid under-estimates the true sup; treat the result as a
/// lower bound.
pub fn symbol_norm(
    b: &Symbol,
    alpha: f64,
    l: f64,
    s: usize,
    beta: f64,
    grid: &NormGrid,
) -> Result<f64, crate::CoreError> {
    if s > MAX_DERIVATIVE_ORDER {
        return Err(crate::CoreError::Precondition(format!(
            "derivative order {s} exceeds supported maximum {MAX_DERIVATIVE_ORDER}"
        )));
    }
    let d = b.dim();
    let pts = grid.points(d);
    let mut best = 0.0f64;
    for multi in multi_indices(d, s) {
        let order: usize = multi.iter().sum();
        let mut total = 0.0;
        for th in b.freq_set().iter() {
            let wt = (1.0 + th.norm() * th.norm()).sqrt().powf(l);
            let mut sup = 0.0f64;
            for p in &pts {
                let xi_w = (1.0 + p.iter().map(|c| c * c).sum::<f64>()).sqrt();
                let h = 1e-4 * xi_w;
                let v = if order == 0 {
                    b.fourier_coeff(&th.coords, &RayPoint::<Complex64>::real(p))
                } else {
                    derivative(b, &th.coords, p, &multi, h)
                };
                sup = sup.max(xi_w.powf((-alpha + order as f64) * beta) * v.norm());
            }
            total += wt * sup;
        }
        best = best.max(total);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::cosine_symbol;
    use crate::Symbol;

    fn grid() -> NormGrid {
        NormGrid {
            radii: 32,
            r_min: 1.0,
            r_max: 1000.0,
            refine: 1,
        }
    }

    #[test]
    fn zero_symbol_norm_is_zero() {
        let z = Symbol::zero(2);
        let n = symbol_norm(&z, 0.0, 2.0, 1, 0.6, &grid()).unwrap();
        assert_eq!(n, 0.0);
    }

    #[test]
    fn cos_norm_is_one() {
        // two coefficients of 1/2, ⟨θ⟩⁰ = 1, s = 0
        let b = cosine_symbol(2, 0, 1.0, 4.0);
        let n = symbol_norm(&b, 0.0, 0.0, 0, 0.6, &grid()).unwrap();
        assert!((n - 1.0).abs() < 1e-12, "norm = {n}");
    }

    #[test]
    fn single_frequency_weighted_norm() {
        // b̂ ≡ 1 at θ₀ → contribution ⟨θ₀⟩^l
        use crate::symbol::{Frequency, FrequencySet, RadialTerm};
        use num_complex::Complex64;
        let d = 2;
        let fs = FrequencySet::new(
            d,
            vec![
                Frequency::new(vec![0.0, 0.0]),
                Frequency::new(vec![1.0, 2.0]),
                Frequency::new(vec![-1.0, -2.0]),
            ],
        )
        .unwrap();
        let idx = fs.find(&[1.0, 2.0]).unwrap();
        let term = RadialTerm {
            iota: 0.0,
            coeffs: vec![(idx, vec![0, 0], Complex64::new(1.0, 0.0))],
        };
        let b = Symbol::radial_classical(fs, vec![term], 4.0, 0.0, false);
        let l = 1.5;
        let n = symbol_norm(&b, 0.0, l, 0, 0.6, &grid()).unwrap();
        let expect = 6.0f64.sqrt().powf(l); // ⟨θ₀⟩ = √(1+5)
        assert!((n - expect).abs() < 1e-10 * expect);
    }

    #[test]
    fn monotone_in_l_and_refinement() {
        let b = cosine_symbol(2, 0, 1.0, 4.0);
        let g = grid();
        let n0 = symbol_norm(&b, 0.0, 0.0, 0, 0.6, &g).unwrap();
        let n2 = symbol_norm(&b, 0.0, 2.0, 0, 0.6, &g).unwrap();
        assert!(n2 >= n0 - 1e-12);
        let mut fine = g.clone();
        fine.refine = 2;
        let nf = symbol_norm(&b, 0.0, 0.0, 0, 0.6, &fine).unwrap();
        assert!(nf >= n0 - 1e-12);
    }

    #[test]
    fn rejects_high_derivative_order() {
        let b = cosine_symbol(2, 0, 1.0, 4.0);
        assert!(symbol_norm(&b, 0.0, 0.0, 4, 0.6, &grid()).is_err());
    }

    #[test]
    fn submultiplicative_within_fixed_constant() {
        // |||b∘g||| ≤ C·|||b|||·|||g||| with C ≤ 100 across a small suite
        let suite = [
            cosine_symbol(2, 0, 1.0, 4.0),
            cosine_symbol(2, 1, 2.0, 4.0),
            cosine_symbol(2, 0, 0.3, 4.0),
        ];
        let g = grid();
        for a in &suite {
            for b in &suite {
                let p = a.product(b).unwrap();
                let na = symbol_norm(a, 0.0, 1.0, 0, 0.6, &g).unwrap();
                let nb = symbol_norm(b, 0.0, 1.0, 0, 0.6, &g).unwrap();
                let np = symbol_norm(&p, 0.0, 1.0, 0, 0.6, &g).unwrap();
                assert!(np <= 100.0 * na * nb, "ratio {}", np / (na * nb));
            }
        }
    }
}
