//! Finite invariant blocks of H₂ = (−Δ)^w + W_k̃.
//!
//! On the span of {e_η : η ∈ Υ(ξ)} the operator acts through the matrix
//! H(η′, η) = |η|^{2w} δ_{η′η} + ŵ_k̃(η′ − η, η), with the basis ordered
//! by |η| and then lexicographically. Along a chart ray the members are
//! η_i(z) = X_i + a + zΦ, the entries extend analytically in z through
//! the complexified modulus, and d/dz comes from the same evaluation by
//! jet propagation.

use crate::error::CoreError;
use crate::numeric::{Jet, RayPoint, Scalar};
use crate::regions::{point_order, CongruenceClass};
use crate::symbol::Symbol;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// A family of block matrices parameterized by the radial coordinate.
#[derive(Clone, Debug)]
pub struct BlockFamily {
    /// Real anchors of the basis points (X_i + a; the full point for
    /// static blocks).
    pub bases: Vec<Vec<f64>>,
    /// Ray direction Φ (zero vector for static blocks evaluated at z = 0).
    pub dir: Vec<f64>,
    /// Reduced symbol W_k̃ (zero symbol for the free operator).
    pub w_symbol: Symbol,
    pub two_w: f64,
}

impl BlockFamily {
    /// Static block on a congruence class: basis Υ(ξ) in canonical order,
    /// evaluated at z = 0.
    pub fn from_class(cls: &CongruenceClass, w_symbol: Symbol, two_w: f64) -> BlockFamily {
        let d = cls.seed.len();
        BlockFamily {
            bases: cls.points.clone(),
            dir: vec![0.0; d],
            w_symbol,
            two_w,
        }
    }

    /// Ray block: members X_i + a (class projections plus apex), direction Φ.
    ///
    /// Members are sorted by the modulus-then-lex order of their anchors,
    /// which matches the order of the full points η_i(r) for every r > 0.
    pub fn along_ray(
        class_points: &[Vec<f64>],
        apex: &[f64],
        phi: &[f64],
        w_symbol: Symbol,
        two_w: f64,
    ) -> BlockFamily {
        let mut bases: Vec<Vec<f64>> = class_points
            .iter()
            .map(|x| x.iter().zip(apex).map(|(a, b)| a + b).collect())
            .collect();
        bases.sort_by(|a, b| point_order(a, b));
        BlockFamily {
            bases,
            dir: phi.to_vec(),
            w_symbol,
            two_w,
        }
    }

    pub fn size(&self) -> usize {
        self.bases.len()
    }

    pub fn basis_point<S: Scalar>(&self, i: usize, z: S) -> RayPoint<S> {
        RayPoint::on_ray(&self.bases[i], &self.dir, z)
    }

    fn entry<S: Scalar>(&self, i: usize, j: usize, z: S) -> S {
        let col = self.basis_point(j, z);
        let mut v = if i == j {
            col.norm_sq().powf(self.two_w / 2.0)
        } else {
            S::zero()
        };
        if !self.w_symbol.is_zero_node() {
            let theta: Vec<f64> = self.bases[i]
                .iter()
                .zip(&self.bases[j])
                .map(|(a, b)| a - b)
                .collect();
            v = v + self.w_symbol.fourier_coeff(&theta, &col);
        }
        v
    }

    /// The matrix at complex radial parameter z.
    pub fn matrix(&self, z: Complex64) -> DMatrix<Complex64> {
        let n = self.size();
        DMatrix::from_fn(n, n, |i, j| self.entry(i, j, z))
    }

    /// Matrix and its z-derivative in one pass.
    pub fn matrix_with_derivative(&self, z: Complex64) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
        let n = self.size();
        let mut m = DMatrix::zeros(n, n);
        let mut dm = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let jet = self.entry(i, j, Jet::variable(z));
                m[(i, j)] = jet.v;
                dm[(i, j)] = jet.d;
            }
        }
        (m, dm)
    }

    /// Max |H − H†| at real r (absolute).
    pub fn hermiticity_defect(&self, r: f64) -> f64 {
        let m = self.matrix(Complex64::new(r, 0.0));
        let mut worst = 0.0f64;
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Ascending eigenvalues at real r (Hermitian dense solve).
    pub fn eigenvalues(&self, r: f64) -> Result<Vec<f64>, CoreError> {
        let m = self.matrix(Complex64::new(r, 0.0));
        let scale = m.iter().map(|c| c.norm()).fold(0.0f64, f64::max).max(1.0);
        let defect = self.hermiticity_defect(r);
        if defect > 1e-10 * scale {
            return Err(CoreError::Precondition(format!(
                "block not Hermitian at r = {r}: defect {defect:.3e} vs scale {scale:.3e}"
            )));
        }
        // symmetrize away the float dust before the eigensolve
        let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = h.symmetric_eigen();
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(f64::total_cmp);
        Ok(vals)
    }

    /// Finite-difference monotonicity probe: smallest one-sided increment
    /// of any eigenvalue branch between r and r + δ (negative values
    /// signal a violation).
    pub fn monotonicity_margin(&self, r: f64, delta: f64) -> Result<f64, CoreError> {
        let a = self.eigenvalues(r)?;
        let b = self.eigenvalues(r + delta)?;
        Ok(a.iter()
            .zip(&b)
            .map(|(x, y)| y - x)
            .fold(f64::INFINITY, f64::min))
    }

    /// Invariance defect: applying H₂ to e_η for every member η must not
    /// leak amplitude outside the class (violating couplings carry
    /// ŵ(θ, η) = 0 by the support property).
    pub fn invariance_defect(&self, z_real: f64) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..self.size() {
            let col = self.basis_point(j, Complex64::new(z_real, 0.0));
            let nu = col.real_part();
            for (target, amp) in self.w_symbol.apply_to_exponential(&nu) {
                let inside = (0..self.size()).any(|i| {
                    let pt = self.basis_point(i, Complex64::new(z_real, 0.0)).real_part();
                    pt.iter().zip(&target).all(|(a, b)| (a - b).abs() < 1e-7)
                });
                if !inside {
                    worst = worst.max(amp.norm());
                }
            }
        }
        worst
    }
}

/// Assemble the static block of a congruence class, with the invariance
/// check demanded of every resonant block.
pub fn assemble_block(
    cls: &CongruenceClass,
    w_symbol: &Symbol,
    two_w: f64,
) -> Result<BlockFamily, CoreError> {
    let fam = BlockFamily::from_class(cls, w_symbol.clone(), two_w);
    let defect = fam.invariance_defect(0.0);
    if defect > 1e-10 {
        return Err(CoreError::Precondition(format!(
            "block invariance defect {defect:.3e} above tolerance (inconsistent parameters?)"
        )));
    }
    Ok(fam)
}
