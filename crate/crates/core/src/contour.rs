//! Contour-integral bookkeeping for block eigenvalues.
//!
//! For a block family H(z) analytic near the circle γ = {|z − ρ| = tρ_n},
//! whose only det(H(z) − ρ^{2w}) zeros inside γ are the radial crossings
//! τ, the residue identity gives
//!
//! Σ_τ τ^{K+1} = (1/2πi) ∮_γ z^{K+1} tr[H′(z)(H(z) − ρ^{2w}I)^{−1}] dz.
//!
//! Trapezoidal quadrature on the circle is spectrally accurate; the node
//! count doubles until the result settles.
//!
//! The module also carries the scalar series helpers: the coefficients
//! A_{lj} expanding (z^{2w} − ρ^{2w})^{−l} around z = ρ, and the
//! geometric-series form of the shifted free-symbol difference used to
//! expand χ̃ denominators.

use crate::error::CoreError;
use crate::numeric::SplitMix64;
use crate::scale::ScaleParams;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Generalized binomial coefficient: binom(p, 0) = 1,
/// binom(p, j) = p(p−1)⋯(p−j+1)/j!.
pub fn gen_binomial(p: f64, j: u32) -> f64 {
    let mut num = 1.0;
    for k in 0..j {
        num *= p - k as f64;
    }
    let mut den = 1.0;
    for k in 1..=j {
        den *= k as f64;
    }
    num / den
}

/// The circle |z − ρ| = tρ_n with its quadrature controls.
#[derive(Clone, Debug)]
pub struct ContourSpec {
    pub center: f64,
    pub radius: f64,
    pub min_nodes: usize,
    pub max_nodes: usize,
    pub rel_tol: f64,
}

impl ContourSpec {
    pub fn standard(sp: &ScaleParams, rho: f64) -> ContourSpec {
        ContourSpec {
            center: rho,
            radius: sp.contour_t() * sp.rho_n,
            min_nodes: 64,
            max_nodes: 4096,
            rel_tol: 1e-10,
        }
    }

    pub fn validate(&self, sp: &ScaleParams) -> Result<(), CoreError> {
        let expect = sp.contour_t() * sp.rho_n;
        if (self.radius - expect).abs() > 1e-12 * expect {
            return Err(CoreError::Precondition(format!(
                "contour radius {} differs from t·ρ_n = {expect}",
                self.radius
            )));
        }
        if self.min_nodes < 64 || !self.min_nodes.is_power_of_two() {
            return Err(CoreError::Precondition(
                "contour node count must be a power of two ≥ 64".into(),
            ));
        }
        Ok(())
    }
}

/// A_{l,0} = (2w)^{−l}; for j > 0,
/// A_{lj} = (2w)^{−l} Σ_{p=1}^{j} (2w)^{−p} binom(−l, p)
///          Σ_{q₁+⋯+q_p = j, q_i ≥ 1} Π_i binom(2w, q_i + 1).
///
/// The composition sum is the p-fold convolution power of the sequence
/// q ↦ binom(2w, q+1), built iteratively.
pub fn a_coefficients(l: u32, j: u32, w: f64) -> f64 {
    a_coefficient_table(l, j, w)[j as usize]
}

/// A_{l,0..=j_max} in one pass.
pub fn a_coefficient_table(l: u32, j_max: u32, w: f64) -> Vec<f64> {
    let tw = 2.0 * w;
    let lead = tw.powi(-(l as i32));
    let jm = j_max as usize;
    let mut out = vec![0.0; jm + 1];
    out[0] = lead;
    if jm == 0 {
        return out;
    }
    // s1[q] = binom(2w, q+1) for q ≥ 1 (index 0 unused)
    let s1: Vec<f64> = (0..=jm)
        .map(|q| if q == 0 { 0.0 } else { gen_binomial(tw, q as u32 + 1) })
        .collect();
    let mut sp = s1.clone();
    for p in 1..=jm {
        if p > 1 {
            // sp ← sp ⊛ s1 (supports start at p and p−1 resp.)
            let mut next = vec![0.0; jm + 1];
            for a in (p - 1)..=jm {
                if sp[a] == 0.0 {
                    continue;
                }
                for b in 1..=(jm - a) {
                    next[a + b] += sp[a] * s1[b];
                }
            }
            sp = next;
        }
        let outer = gen_binomial(-(l as f64), p as u32) / tw.powi(p as i32);
        for j in p..=jm {
            out[j] += lead * outer * sp[j];
        }
    }
    out
}

/// Relative error of the truncated A_{lj} series against the direct
/// (z^{2w} − ρ^{2w})^{−l} on a contour node.
pub fn a_series_relative_error(l: u32, j_max: u32, w: f64, rho: f64, z: Complex64) -> f64 {
    let tw = 2.0 * w;
    let direct = (z.powf(tw) - Complex64::from(rho.powf(tw))).powi(-(l as i32));
    let q = (z - rho) / rho;
    let table = a_coefficient_table(l, j_max, w);
    let mut series = Complex64::new(0.0, 0.0);
    for j in 0..=j_max {
        series += Complex64::from(table[j as usize]) * q.powi(j as i32 - l as i32);
    }
    series *= rho.powi(-(2 * l as i32)).powf(w); // ρ^{−2wl}
    ((series - direct) / direct).norm()
}

/// One evaluation geometry for the χ̃-denominator expansion: a chart point
/// ξ = X + a + rΦ together with the shift φ′ and step θ′.
#[derive(Clone, Debug)]
pub struct DenominatorProbe {
    pub x: Vec<f64>,
    pub apex: Vec<f64>,
    pub phi_dir: Vec<f64>,
    pub r: f64,
    pub shift: Vec<f64>,
    pub step: Vec<f64>,
}

impl DenominatorProbe {
    fn xi(&self) -> Vec<f64> {
        self.x
            .iter()
            .zip(&self.apex)
            .zip(&self.phi_dir)
            .map(|((x, a), p)| x + a + self.r * p)
            .collect()
    }
}

/// Expand (|ξ+φ′+θ′|^{2w} − |ξ+φ′|^{2w})^{−1} as
/// w^{−1} r^{2−2w} G^{−1} Σ_a (−D)^a and return the relative deviation
/// from the directly evaluated difference. Errors when |D| ≥ 1.
pub fn denominator_series_check(
    probe: &DenominatorProbe,
    w: f64,
    d_term_tol: f64,
) -> Result<f64, CoreError> {
    let xi = probe.xi();
    let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };
    let nrm2 = |a: &[f64]| -> f64 { dot(a, a) };
    let r = probe.r;

    // G = 2⟨ξ, θ′⟩ + 2⟨φ′, θ′⟩ + |θ′|²
    let g = 2.0 * dot(&xi, &probe.step) + 2.0 * dot(&probe.shift, &probe.step)
        + nrm2(&probe.step);
    // N = 2r⟨a, Φ⟩ + 2⟨ξ, φ′⟩ + |X|² + |a|² + |φ′|²
    let n = 2.0 * r * dot(&probe.apex, &probe.phi_dir)
        + 2.0 * dot(&xi, &probe.shift)
        + nrm2(&probe.x)
        + nrm2(&probe.apex)
        + nrm2(&probe.shift);
    debug_assert!(
        ((r * r + n) - nrm2(&xi.iter().zip(&probe.shift).map(|(a, b)| a + b).collect::<Vec<_>>()))
            .abs()
            < 1e-6 * (r * r + n).abs(),
        "chart bookkeeping broke: r² + N ≠ |ξ+φ′|²"
    );

    // D = w^{−1} Σ_{j≥2} binom(w, j) r^{2−2j} Σ_{k=0}^{j−1} binom(j,k) N^k G^{j−k−1}
    let mut d = 0.0;
    let mut j = 2u32;
    loop {
        let bj = gen_binomial(w, j);
        let mut inner = 0.0;
        for k in 0..j {
            inner += gen_binomial(j as f64, k) * n.powi(k as i32) * g.powi((j - k - 1) as i32);
        }
        let term = bj * r.powi(2 - 2 * j as i32) * inner / w;
        d += term;
        if term.abs() < d_term_tol * (1.0 + d.abs()) || bj == 0.0 {
            break;
        }
        j += 1;
        if j > 300 {
            return Err(CoreError::NonConvergence(
                "D-series did not settle within 300 terms".into(),
            ));
        }
    }
    if d.abs() >= 1.0 {
        return Err(CoreError::Precondition(format!(
            "|D| = {} ≥ 1: outside the expansion regime",
            d.abs()
        )));
    }

    // Σ_a (−D)^a truncated once |D|^{a+1} < 1e-14
    let mut geo = 0.0;
    let mut pw = 1.0;
    loop {
        geo += pw;
        pw *= -d;
        if pw.abs() < 1e-14 {
            break;
        }
    }
    let series = r.powf(2.0 - 2.0 * w) / (w * g) * geo;

    let shifted: Vec<f64> = xi.iter().zip(&probe.shift).map(|(a, b)| a + b).collect();
    let both: Vec<f64> = shifted
        .iter()
        .zip(&probe.step)
        .map(|(a, b)| a + b)
        .collect();
    let direct = nrm2(&both).powf(w) - nrm2(&shifted).powf(w);
    Ok((series * direct - 1.0).abs())
}

/// Result of one contour power-sum evaluation.
#[derive(Clone, Debug)]
pub struct ContourResult {
    /// Σ_τ τ^{K+1} (real part of the quadrature).
    pub value: f64,
    /// Residual imaginary part (diagnostic).
    pub imag_part: f64,
    /// min over nodes of |det(H(z) − ρ^{2w}I)|.
    pub min_abs_det: f64,
    pub nodes: usize,
    /// Relative change at the final node doubling.
    pub last_change: f64,
}

/// (1/2πi) ∮_γ z^{K+1} tr[H′(z)(H(z) − ρ^{2w}I)^{−1}] dz by the
/// trapezoidal rule, doubling nodes until `rel_tol`.
///
/// `mat` returns (H(z), H′(z)).
pub fn contour_power_sum(
    mat: &dyn Fn(Complex64) -> (DMatrix<Complex64>, DMatrix<Complex64>),
    two_w: f64,
    k_pow: u32,
    spec: &ContourSpec,
) -> Result<ContourResult, CoreError> {
    let rho_pow = Complex64::from(spec.center.powf(two_w));
    let eval = |n: usize| -> Result<(Complex64, f64), CoreError> {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut min_det = f64::INFINITY;
        for j in 0..n {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
            let e = Complex64::new(phi.cos(), phi.sin());
            let z = spec.center + spec.radius * e;
            let (h, dh) = mat(z);
            let dim = h.nrows();
            let mut shifted = h;
            for i in 0..dim {
                shifted[(i, i)] -= rho_pow;
            }
            let lu = shifted.lu();
            let det = lu.determinant();
            min_det = min_det.min(det.norm());
            if det.norm() == 0.0 {
                return Err(CoreError::Precondition(
                    "det(H(z) − ρ^{2w}) vanished on the contour".into(),
                ));
            }
            let x = lu.solve(&dh).ok_or_else(|| {
                CoreError::NonConvergence("contour linear solve failed".into())
            })?;
            let tr: Complex64 = (0..dim).map(|i| x[(i, i)]).sum();
            acc += z.powi(k_pow as i32 + 1) * tr * e;
        }
        Ok((acc * spec.radius / n as f64, min_det))
    };

    let mut n = spec.min_nodes;
    let (mut val, mut min_det) = eval(n)?;
    loop {
        let n2 = n * 2;
        if n2 > spec.max_nodes {
            return Err(CoreError::NonConvergence(format!(
                "contour quadrature still moving at {} nodes",
                n
            )));
        }
        let (val2, det2) = eval(n2)?;
        let change = (val2 - val).norm() / val2.norm().max(1e-300);
        min_det = min_det.min(det2);
        val = val2;
        n = n2;
        if change <= spec.rel_tol {
            return Ok(ContourResult {
                value: val.re,
                imag_part: val.im,
                min_abs_det: min_det,
                nodes: n,
                last_change: change,
            });
        }
        if n == spec.max_nodes {
            if change <= 1e-8 {
                return Ok(ContourResult {
                    value: val.re,
                    imag_part: val.im,
                    min_abs_det: min_det,
                    nodes: n,
                    last_change: change,
                });
            }
            return Err(CoreError::NonConvergence(format!(
                "contour quadrature changed by {change:.2e} at the node cap"
            )));
        }
    }
}

/// Synthetic analytic block family for exercising the contour identity:
/// H(z) = diag((z² + m_i²)^w) + V₀ + V₁·(ρ/z) with Hermitian V₀, V₁.
///
/// Eigenvalue crossings stay well inside the contour and well away from
/// it when the couplings are small against ρ^{2w−1}·t·ρ_n.
#[derive(Clone, Debug)]
pub struct SyntheticFamily {
    pub masses: Vec<f64>,
    pub v0: DMatrix<Complex64>,
    pub v1: DMatrix<Complex64>,
    pub w: f64,
    pub rho_ref: f64,
}

impl SyntheticFamily {
    pub fn random(size: usize, w: f64, rho: f64, coupling: f64, rng: &mut SplitMix64) -> Self {
        let masses: Vec<f64> = (0..size).map(|_| rng.range(0.0, 0.2 * rho)).collect();
        let mut herm = |scale: f64| -> DMatrix<Complex64> {
            let mut m = DMatrix::zeros(size, size);
            for i in 0..size {
                m[(i, i)] = Complex64::new(rng.range(-scale, scale), 0.0);
                for j in i + 1..size {
                    let v = Complex64::new(rng.range(-scale, scale), rng.range(-scale, scale));
                    m[(i, j)] = v;
                    m[(j, i)] = v.conj();
                }
            }
            m
        };
        let scale = coupling * rho.powf(2.0 * w - 1.0);
        SyntheticFamily {
            masses,
            v0: herm(scale),
            v1: herm(0.2 * scale),
            w,
            rho_ref: rho,
        }
    }

    pub fn size(&self) -> usize {
        self.masses.len()
    }

    pub fn matrices(&self, z: Complex64) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
        let n = self.size();
        let mut h = &self.v0 + &self.v1 * (self.rho_ref / z);
        let mut dh = &self.v1 * Complex64::from(-self.rho_ref) / (z * z);
        for i in 0..n {
            let base = z * z + self.masses[i] * self.masses[i];
            h[(i, i)] += base.powf(self.w);
            dh[(i, i)] += base.powf(self.w - 1.0) * 2.0 * z * self.w;
        }
        (h, dh)
    }

    /// Ascending eigenvalues at real r.
    pub fn eigenvalues(&self, r: f64) -> Vec<f64> {
        let (h, _) = self.matrices(Complex64::new(r, 0.0));
        let h = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
        let mut vals: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
        vals.sort_by(f64::total_cmp);
        vals
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(gen_binomial(5.0, 2), 10.0);
        assert_eq!(gen_binomial(-1.0, 1), -1.0);
        assert_eq!(gen_binomial(1.0, 3), 0.0); // (1)(0)(−1)/6
        assert!((gen_binomial(1.5, 2) - 0.375).abs() < 1e-15);
    }

    #[test]
    fn a_coefficient_values() {
        // A_{l,0} = (2w)^{−l}
        for &w in &[1.0, 1.5, 2.0] {
            for l in 1..=3 {
                let a = a_coefficients(l, 0, w);
                assert!((a - (2.0 * w).powi(-(l as i32))).abs() < 1e-15);
            }
            // A_{1,1} = −(2w−1)/(4w): the p = 1 term binom(−1,1)·binom(2w,2)/(2w)²
            let a11 = a_coefficients(1, 1, w);
            let expect = -(2.0 * w - 1.0) / (4.0 * w);
            assert!((a11 - expect).abs() < 1e-14, "w = {w}: {a11} vs {expect}");
        }
    }

    #[test]
    fn a_series_reproduces_resolvent_denominator() {
        let sp = ScaleParams::defaults(2, 1.5, 0.0, 200.0);
        let rho = 2.0 * sp.rho_n;
        let spec = ContourSpec::standard(&sp, rho);
        for &w in &[1.0, 1.5, 2.0] {
            for l in 1..=3u32 {
                for j in 0..128 {
                    let phi = 2.0 * std::f64::consts::PI * j as f64 / 128.0;
                    let z = Complex64::new(
                        spec.center + spec.radius * phi.cos(),
                        spec.radius * phi.sin(),
                    );
                    let err = a_series_relative_error(l, 40, w, rho, z);
                    assert!(err < 1e-10, "w={w} l={l} node {j}: err {err:.2e}");
                }
            }
        }
    }

    #[test]
    fn denominator_expansion_exact_at_w1() {
        // binom(1, j) = 0 for j ≥ 2 → D = 0 and the identity is exact
        let probe = DenominatorProbe {
            x: vec![3.0, 0.0],
            apex: vec![0.0, 19.0],
            phi_dir: vec![0.0, 1.0],
            r: 230.0,
            shift: vec![1.0, 0.0],
            step: vec![0.0, 1.0],
        };
        let defect = denominator_series_check(&probe, 1.0, 1e-18).unwrap();
        assert!(defect < 1e-14, "defect {defect:.2e}");
    }

    #[test]
    fn denominator_expansion_small_defect_at_w32() {
        let probe = DenominatorProbe {
            x: vec![5.0, 0.0],
            apex: vec![0.0, 21.0],
            phi_dir: vec![0.0, 1.0],
            r: 260.0,
            shift: vec![1.0, 1.0],
            step: vec![0.0, 1.0],
        };
        let defect = denominator_series_check(&probe, 1.5, 1e-18).unwrap();
        assert!(defect < 1e-10, "defect {defect:.2e}");
    }

    #[test]
    fn denominator_defect_shrinks_with_scale() {
        let mk = |r: f64| DenominatorProbe {
            x: vec![5.0, 0.0],
            apex: vec![0.0, 21.0],
            phi_dir: vec![0.0, 1.0],
            r,
            shift: vec![1.0, 1.0],
            step: vec![0.0, 1.0],
        };
        // truncate the geometric series early so the defect tracks |D|
        let d1 = denominator_series_check(&mk(200.0), 1.5, 1e-3).unwrap();
        let d2 = denominator_series_check(&mk(400.0), 1.5, 1e-3).unwrap();
        assert!(d2 < d1, "defect should shrink as ρ doubles: {d1:.2e} vs {d2:.2e}");
    }

    #[test]
    fn contour_on_free_scalar_block() {
        // H(z) = z^{2w}: single zero at z = ρ, power sum = ρ^{K+1}
        let sp = ScaleParams::defaults(2, 1.5, 0.0, 100.0);
        let rho = 1.7 * sp.rho_n;
        let spec = ContourSpec::standard(&sp, rho);
        spec.validate(&sp).unwrap();
        let two_w = 3.0;
        let mat = |z: Complex64| {
            let h = DMatrix::from_element(1, 1, z.powf(two_w));
            let dh = DMatrix::from_element(1, 1, z.powf(two_w - 1.0) * two_w);
            (h, dh)
        };
        for k_pow in 0..3u32 {
            let res = contour_power_sum(&mat, two_w, k_pow, &spec).unwrap();
            let expect = rho.powi(k_pow as i32 + 1);
            assert!(
                (res.value - expect).abs() < 1e-10 * expect,
                "K={k_pow}: {} vs {expect}",
                res.value
            );
            assert!(res.imag_part.abs() < 1e-8 * expect);
            assert!(res.min_abs_det > 0.0);
        }
    }

    #[test]
    fn contour_on_diagonal_block_sums_roots() {
        // diagonal entries (z² + m_i²)^w: roots τ_i = √(ρ² − m_i²)
        let sp = ScaleParams::defaults(2, 1.0, 0.0, 100.0);
        let rho = 2.0 * sp.rho_n;
        let spec = ContourSpec::standard(&sp, rho);
        let w = 1.0;
        let masses = [0.0, 7.0, 19.0];
        let mat = |z: Complex64| {
            let n = masses.len();
            let mut h = DMatrix::zeros(n, n);
            let mut dh = DMatrix::zeros(n, n);
            for i in 0..n {
                let b = z * z + masses[i] * masses[i];
                h[(i, i)] = b.powf(w);
                dh[(i, i)] = b.powf(w - 1.0) * 2.0 * z * w;
            }
            (h, dh)
        };
        let k_pow = 1u32;
        let res = contour_power_sum(&mat, 2.0 * w, k_pow, &spec).unwrap();
        let expect: f64 = masses
            .iter()
            .map(|m| (rho * rho - m * m).sqrt().powi(k_pow as i32 + 1))
            .sum();
        assert!((res.value - expect).abs() < 1e-9 * expect);
    }

    #[test]
    fn contour_matches_direct_roots_on_synthetic_family() {
        let sp = ScaleParams::defaults(2, 1.0, 0.0, 100.0);
        let rho = 2.0 * sp.rho_n;
        let spec = ContourSpec::standard(&sp, rho);
        let mut rng = SplitMix64::new(0xfeed);
        for trial in 0..5 {
            let size = 1 + (rng.next_u64() % 5) as usize;
            let fam = SyntheticFamily::random(size, 1.0, rho, 0.01, &mut rng);
            let res = contour_power_sum(&|z| fam.matrices(z), 2.0, 1, &spec).unwrap();
            // direct: bisect each eigenvalue branch to λ_t(r) = ρ^{2w}
            let target = rho.powf(2.0);
            let mut direct = 0.0;
            for t in 0..size {
                let mut lo = rho - 0.9 * spec.radius;
                let mut hi = rho + 0.9 * spec.radius;
                assert!(fam.eigenvalues(lo)[t] < target && fam.eigenvalues(hi)[t] > target);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if fam.eigenvalues(mid)[t] < target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                direct += (0.5 * (lo + hi)).powi(2);
            }
            assert!(
                (res.value - direct).abs() < 1e-8 * direct.abs(),
                "trial {trial}: contour {} vs direct {direct}",
                res.value
            );
        }
    }
}
