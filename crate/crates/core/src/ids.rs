//! Integrated density of states through sub-level volumes.
//!
//! N(λ) = (2π)^{−d} vol{ξ : g(ξ) ≤ λ}, where g equals |ξ|^{2w} away from
//! the resonant shell 𝒜 and pairs the points of each congruence class
//! with the eigenvalues of its block inside 𝒜. The volume splits as
//! ω_d ρ^d plus, per charted component, the integral of
//! (τ^{K+1} − τ₀^{K+1})/(K+1) over Ω(V) × M_p, with τ the block
//! eigenvalue crossing of ρ^{2w} along the chart ray and τ₀ its free
//! counterpart.
//!
//! Quadrature nodes are Halton points with a seed-keyed rotation, so runs
//! are deterministic for a fixed configuration.

use crate::blocks::BlockFamily;
use crate::charts::{enumerate_all_charts, Chart, ExcludedComponent, PhiSampler};
use crate::cutoff::CutoffFamily;
use crate::error::CoreError;
use crate::gauge::{gauge_recursion, GaugeResult};
use crate::numeric::SplitMix64;
use crate::regions::{congruence_class, CongruenceClass, RegionGeometry};
use crate::scale::ScaleParams;
use crate::symbol::Symbol;
use rayon::prelude::*;
use std::sync::Arc;

/// Deterministic low-discrepancy point set: Halton bases with a
/// Cranley–Patterson rotation derived from the seed.
#[derive(Clone, Debug)]
pub struct Halton {
    offsets: Vec<f64>,
}

const HALTON_BASES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

impl Halton {
    pub fn new(dims: usize, seed: u64) -> Halton {
        assert!(dims <= HALTON_BASES.len(), "too many quadrature dimensions");
        let mut rng = SplitMix64::new(seed);
        Halton {
            offsets: (0..dims).map(|_| rng.uniform()).collect(),
        }
    }

    fn radical_inverse(mut i: u64, base: u64) -> f64 {
        let mut f = 1.0;
        let mut r = 0.0;
        while i > 0 {
            f /= base as f64;
            r += f * (i % base) as f64;
            i /= base;
        }
        r
    }

    /// Point #i in [0,1)^dims.
    pub fn point(&self, i: usize) -> Vec<f64> {
        self.offsets
            .iter()
            .enumerate()
            .map(|(k, off)| {
                let h = Self::radical_inverse(i as u64 + 1, HALTON_BASES[k]);
                (h + off).fract()
            })
            .collect()
    }
}

/// Quadrature controls for the volume integrals.
#[derive(Clone, Debug)]
pub struct QuadratureOpts {
    pub seed: u64,
    /// Nodes per chart.
    pub nodes: usize,
    /// Relative tolerance of the τ bisection against ρ^{2w}.
    pub tau_rel_tol: f64,
    pub class_cap: usize,
}

impl Default for QuadratureOpts {
    fn default() -> Self {
        QuadratureOpts {
            seed: 0x1d05,
            nodes: 1 << 14,
            tau_rel_tol: 1e-10,
            class_cap: 100_000,
        }
    }
}

/// Free-operator closed form: N(λ) = (2π)^{−d} ω_d λ^{d/2w}.
pub fn ids_free(lambda: f64, d: usize, w: f64) -> f64 {
    crate::unit_ball_volume(d) * lambda.powf(d as f64 / (2.0 * w))
        / (2.0 * std::f64::consts::PI).powi(d as i32)
}

/// Everything needed to evaluate g and the sub-level volumes for one
/// operator at one dyadic window.
pub struct IdsEngine {
    pub sp: ScaleParams,
    pub cf: Arc<CutoffFamily>,
    pub geom: RegionGeometry,
    pub gauge: Option<GaugeResult>,
    pub w_symbol: Symbol,
    pub charts: Vec<Chart>,
    pub excluded: Vec<ExcludedComponent>,
    pub opts: QuadratureOpts,
}

impl IdsEngine {
    /// Build the whole pipeline: frequency closure, region geometry,
    /// gauge transform, charts.
    pub fn build(b: &Symbol, sp: &ScaleParams, opts: QuadratureOpts) -> Result<Self, CoreError> {
        sp.validate()?;
        let cf = CutoffFamily::new(sp.clone());
        let (gauge, w_symbol) = if b.is_zero_node() {
            (None, Symbol::zero(sp.d))
        } else {
            let gr = gauge_recursion(b, &cf)?;
            let w = gr.w.clone();
            (Some(gr), w)
        };
        let theta_k = if b.is_zero_node() {
            crate::symbol::FrequencySet::zero_only(sp.d)
        } else {
            b.freq_set().closure(sp.k_tilde, 100_000)?
        };
        let geom = RegionGeometry::build(&theta_k, sp, 10_000)?;
        let (charts, excluded) = enumerate_all_charts(&geom)?;
        Ok(IdsEngine {
            sp: sp.clone(),
            cf,
            geom,
            gauge,
            w_symbol,
            charts,
            excluded,
            opts,
        })
    }

    /// Is ξ inside 𝒜 (the congruence closure of the shell
    /// |η| ∈ [(5/6)ρ_n, 5ρ_n])?
    pub fn in_a(&self, xi: &[f64]) -> Result<bool, CoreError> {
        let cls = self.class_of(xi)?;
        let lo = 5.0 * self.sp.rho_n / 6.0;
        let hi = 5.0 * self.sp.rho_n;
        Ok(cls.points.iter().any(|p| {
            let r = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            (lo..=hi).contains(&r)
        }))
    }

    pub fn class_of(&self, xi: &[f64]) -> Result<CongruenceClass, CoreError> {
        let gens = self.geom.move_generators(None);
        congruence_class(xi, &gens, &self.sp, self.opts.class_cap)
    }

    /// The spectral pairing map g.
    pub fn g_of_xi(&self, xi: &[f64]) -> Result<f64, CoreError> {
        let r2: f64 = xi.iter().map(|x| x * x).sum();
        let free = r2.powf(self.sp.w);
        let cls = self.class_of(xi)?;
        let in_a = {
            let lo = 5.0 * self.sp.rho_n / 6.0;
            let hi = 5.0 * self.sp.rho_n;
            cls.points.iter().any(|p| {
                let r = p.iter().map(|x| x * x).sum::<f64>().sqrt();
                (lo..=hi).contains(&r)
            })
        };
        if !in_a {
            return Ok(free);
        }
        let rank = cls
            .rank_of(xi)
            .ok_or_else(|| CoreError::Geometry("seed missing from its own class".into()))?;
        let fam = BlockFamily::from_class(&cls, self.w_symbol.clone(), 2.0 * self.sp.w);
        let ev = fam.eigenvalues(0.0)?;
        Ok(ev[rank])
    }

    /// τ₀: the free crossing |ξ(X, τ₀, Φ)| = ρ for the anchor `base`.
    fn tau_free(base: &[f64], phi: &[f64], rho: f64) -> f64 {
        let bp: f64 = base.iter().zip(phi).map(|(a, b)| a * b).sum();
        let b2: f64 = base.iter().map(|x| x * x).sum();
        -bp + (bp * bp + rho * rho - b2).max(0.0).sqrt()
    }

    /// Bisection for the eigenvalue-branch crossing λ_t(H₂(r)) = ρ^{2w}.
    pub fn tau_solve(
        &self,
        fam: &BlockFamily,
        t: usize,
        rho: f64,
        tau0: f64,
    ) -> Result<f64, CoreError> {
        let target = rho.powf(2.0 * self.sp.w);
        let tol = self.opts.tau_rel_tol * target;
        let l_top = self.sp.slab_width(self.sp.d).max(1.0);
        let mut half = l_top;
        let branch = |r: f64| -> Result<f64, CoreError> { Ok(fam.eigenvalues(r)?[t]) };
        let (mut lo, mut hi) = (tau0 - half, tau0 + half);
        let mut tries = 0;
        while !(branch(lo)? < target && branch(hi)? > target) {
            half *= 2.0;
            lo = (tau0 - half).max(1e-6 * rho);
            hi = tau0 + half;
            tries += 1;
            if tries > 8 {
                return Err(CoreError::NonConvergence(format!(
                    "tau bracketing failed around τ₀ = {tau0} (monotonicity violated?)"
                )));
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let v = branch(mid)?;
            if (v - target).abs() < tol {
                return Ok(mid);
            }
            if v < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    fn phi_direction(&self, chart: &Chart, u: &[f64], rng_dim: usize) -> Option<Vec<f64>> {
        match &chart.phi {
            PhiSampler::SinglePoint(p) => Some(p.clone()),
            PhiSampler::Arc { u: bu, v: bv, a0, a1 } => {
                let t = a0 + u[rng_dim] * (a1 - a0);
                Some(
                    bu.iter()
                        .zip(bv)
                        .map(|(x, y)| t.cos() * x + t.sin() * y)
                        .collect(),
                )
            }
            PhiSampler::FullSphere | PhiSampler::Cone => {
                let n = chart.perp_basis.len();
                let dir = match n {
                    1 => vec![if u[rng_dim] < 0.5 { -1.0 } else { 1.0 }],
                    2 => {
                        let t = 2.0 * std::f64::consts::PI * u[rng_dim];
                        vec![t.cos(), t.sin()]
                    }
                    3 => {
                        let z = 2.0 * u[rng_dim] - 1.0;
                        let t = 2.0 * std::f64::consts::PI * u[rng_dim + 1];
                        let s = (1.0 - z * z).max(0.0).sqrt();
                        vec![s * t.cos(), s * t.sin(), z]
                    }
                    _ => return None,
                };
                // to ambient coordinates
                let mut amb = vec![0.0; chart.dim()];
                for (c, b) in dir.iter().zip(&chart.perp_basis) {
                    for (a, bi) in amb.iter_mut().zip(b) {
                        *a += c * bi;
                    }
                }
                if matches!(chart.phi, PhiSampler::Cone) && !chart.phi_in_simplex(&amb) {
                    return None;
                }
                Some(amb)
            }
        }
    }

    /// vol 𝒜⁺_p − vol 𝒜⁻_p for one chart at radius ρ, with a half-sample
    /// discrepancy estimate.
    pub fn volume_a_pm(&self, chart: &Chart, rho: f64) -> Result<(f64, f64), CoreError> {
        let m = chart.m;
        let kp1 = (chart.k_big + 1) as f64;
        let needs_phi = !matches!(chart.phi, PhiSampler::SinglePoint(_));
        let phi_dims = 2usize;
        let dims = m + phi_dims;
        let halton = Halton::new(dims.max(1), self.opts.seed);
        let l_m = if m > 0 { self.sp.slab_width(m) } else { 0.0 };
        let box_half = m as f64 * l_m;
        let x_measure = if m == 0 {
            1.0
        } else {
            (2.0 * box_half).powi(m as i32)
        };
        let phi_measure = chart.phi_measure();
        let gens = self.geom.move_generators(Some(chart.v_idx));
        let v_idx = chart.v_idx;

        let nodes = if m == 0 && !needs_phi {
            1
        } else {
            self.opts.nodes
        };

        let worker = |i: usize| -> Result<f64, CoreError> {
            let u = halton.point(i);
            // X sample in the V basis, mapped to ambient
            let mut x_amb = vec![0.0; chart.dim()];
            let mut x_coords = vec![0.0; m];
            for j in 0..m {
                x_coords[j] = (2.0 * u[j] - 1.0) * box_half;
                for (a, b) in x_amb.iter_mut().zip(&chart.v_basis[j]) {
                    *a += x_coords[j] * b;
                }
            }
            if m > 0 && !self.geom.in_xi1(&x_amb, v_idx) {
                return Ok(0.0); // outside Ω(V)
            }
            let Some(phi) = self.phi_direction(chart, &u, m) else {
                return Ok(0.0); // rejected cone sample
            };
            let cls = congruence_class(&x_amb, &gens, &self.sp, self.opts.class_cap)?;
            let fam = BlockFamily::along_ray(
                &cls.points,
                &chart.apex,
                &phi,
                self.w_symbol.clone(),
                2.0 * self.sp.w,
            );
            let mut acc = 0.0;
            for t in 0..fam.size() {
                let tau0 = Self::tau_free(&fam.bases[t], &phi, rho);
                let tau = if self.w_symbol.is_zero_node() {
                    tau0
                } else {
                    self.tau_solve(&fam, t, rho, tau0)?
                };
                acc += tau.powf(kp1) - tau0.powf(kp1);
            }
            Ok(acc / fam.size() as f64)
        };

        let results: Result<Vec<f64>, CoreError> =
            (0..nodes).into_par_iter().map(worker).collect();
        let vals = results?;
        let mean: f64 = vals.iter().sum::<f64>() / nodes as f64;
        let (mut even, mut odd) = (0.0, 0.0);
        for (i, v) in vals.iter().enumerate() {
            if i % 2 == 0 {
                even += *v;
            } else {
                odd += *v;
            }
        }
        let halves_gap = if nodes > 1 {
            (even / ((nodes + 1) / 2) as f64 - odd / (nodes / 2) as f64).abs() / 2.0
        } else {
            0.0
        };
        let scale = x_measure * phi_measure / kp1;
        Ok((mean * scale, halves_gap * scale))
    }

    /// Heuristic bound on the contribution of one excluded component:
    /// surface fraction × mean radial displacement |g − ρ^{2w}|/(2wρ^{2w−1}).
    fn excluded_budget(&self, exc: &ExcludedComponent, rho: f64) -> Result<f64, CoreError> {
        let d = self.sp.d;
        let halton = Halton::new(2.max(d), self.opts.seed ^ 0xe8c1);
        let samples = 128usize;
        let mut hits = 0usize;
        let mut disp = 0.0f64;
        for i in 0..samples {
            let u = halton.point(i);
            let dir: Vec<f64> = match d {
                1 => vec![if u[0] < 0.5 { -1.0 } else { 1.0 }],
                2 => {
                    let t = 2.0 * std::f64::consts::PI * u[0];
                    vec![t.cos(), t.sin()]
                }
                _ => {
                    let z = 2.0 * u[0] - 1.0;
                    let t = 2.0 * std::f64::consts::PI * u[1];
                    let s = (1.0 - z * z).max(0.0).sqrt();
                    vec![s * t.cos(), s * t.sin(), z]
                }
            };
            let xi: Vec<f64> = dir.iter().map(|x| x * rho).collect();
            if !self.geom.in_region(&xi, exc.v_idx) {
                continue;
            }
            hits += 1;
            let g = self.g_of_xi(&xi)?;
            disp += (g - rho.powf(2.0 * self.sp.w)).abs();
        }
        if hits == 0 {
            return Ok(0.0);
        }
        let mean_disp = disp / hits as f64 / (2.0 * self.sp.w * rho.powf(2.0 * self.sp.w - 1.0));
        let frac = hits as f64 / samples as f64;
        let area = d as f64 * crate::unit_ball_volume(d) * rho.powi(d as i32 - 1);
        Ok(frac * area * mean_disp)
    }

    /// N(λ) with an error estimate (quadrature half-sample gap plus the
    /// excluded-component budget).
    pub fn ids_gauge(&self, lambda: f64) -> Result<IdsPoint, CoreError> {
        let sp = &self.sp;
        let rho = lambda.powf(1.0 / (2.0 * sp.w));
        let slack = 1e-9 * sp.rho_n;
        if !(sp.rho_n - slack..=4.0 * sp.rho_n + slack).contains(&rho) {
            return Err(CoreError::Precondition(format!(
                "ρ = {rho} outside the window [ρ_n, 4ρ_n] = [{}, {}]",
                sp.rho_n,
                4.0 * sp.rho_n
            )));
        }
        let mut vol = crate::unit_ball_volume(sp.d) * rho.powi(sp.d as i32);
        let mut err = 0.0;
        for chart in &self.charts {
            let (v, e) = self.volume_a_pm(chart, rho)?;
            vol += v;
            err += e;
        }
        let mut budget = 0.0;
        for exc in &self.excluded {
            budget += self.excluded_budget(exc, rho)?;
        }
        let norm = (2.0 * std::f64::consts::PI).powi(sp.d as i32);
        Ok(IdsPoint {
            lambda,
            n: vol / norm,
            err_estimate: (err + budget) / norm,
        })
    }

    /// Sweep an ascending λ grid.
    pub fn sweep(&self, lambdas: &[f64]) -> Result<IdsResult, CoreError> {
        for w in lambdas.windows(2) {
            if w[1] <= w[0] {
                return Err(CoreError::Precondition(
                    "lambda grid must be strictly ascending".into(),
                ));
            }
        }
        let points: Result<Vec<IdsPoint>, CoreError> =
            lambdas.iter().map(|&l| self.ids_gauge(l)).collect();
        Ok(IdsResult {
            points: points?,
            method: "gauge-volume".into(),
            monotonicity_tol: 1e-8,
        })
    }
}

/// One computed N(λ) sample.
#[derive(Clone, Debug, PartialEq)]
pub struct IdsPoint {
    pub lambda: f64,
    pub n: f64,
    pub err_estimate: f64,
}

/// A sweep of N(λ) samples from one engine.
#[derive(Clone, Debug)]
pub struct IdsResult {
    pub points: Vec<IdsPoint>,
    /// "gauge-volume" | "floquet-oracle" | "free-closed-form".
    pub method: String,
    /// Tolerance used by [`IdsResult::check_monotone`].
    pub monotonicity_tol: f64,
}

impl IdsResult {
    pub fn free_closed_form(lambdas: &[f64], d: usize, w: f64) -> IdsResult {
        IdsResult {
            points: lambdas
                .iter()
                .map(|&l| IdsPoint {
                    lambda: l,
                    n: ids_free(l, d, w),
                    err_estimate: 0.0,
                })
                .collect(),
            method: "free-closed-form".into(),
            monotonicity_tol: 0.0,
        }
    }

    /// N must be nondecreasing in λ within the recorded tolerance.
    pub fn check_monotone(&self) -> Result<(), CoreError> {
        for w in self.points.windows(2) {
            if w[1].n < w[0].n - self.monotonicity_tol {
                return Err(CoreError::Precondition(format!(
                    "N decreased: N({}) = {} > N({}) = {}",
                    w[0].lambda, w[0].n, w[1].lambda, w[1].n
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::cosine_symbol;

    fn quick_opts(nodes: usize) -> QuadratureOpts {
        QuadratureOpts {
            nodes,
            ..QuadratureOpts::default()
        }
    }

    #[test]
    fn halton_is_deterministic_and_uniformish() {
        let h1 = Halton::new(2, 0x1d05);
        let h2 = Halton::new(2, 0x1d05);
        let mut mean = [0.0; 2];
        for i in 0..512 {
            assert_eq!(h1.point(i), h2.point(i));
            let p = h1.point(i);
            mean[0] += p[0];
            mean[1] += p[1];
        }
        assert!((mean[0] / 512.0 - 0.5).abs() < 0.02);
        assert!((mean[1] / 512.0 - 0.5).abs() < 0.02);
        // different seed shifts the points
        let h3 = Halton::new(2, 7);
        assert_ne!(h1.point(5), h3.point(5));
    }

    #[test]
    fn free_weyl_d2_w1() {
        // N(100) = 25/π for d = 2, w = 1
        let n = ids_free(100.0, 2, 1.0);
        assert!((n - 25.0 / std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn free_engine_matches_closed_form() {
        for &(d, w) in &[(1usize, 1.0f64), (2, 1.0), (1, 1.5), (2, 1.5)] {
            let sp = ScaleParams::defaults(d, w, 0.0, 100.0);
            let engine =
                IdsEngine::build(&Symbol::zero(d), &sp, quick_opts(256)).unwrap();
            for &rho in &[1.0f64, 2.0, 3.7] {
                let rho = rho * sp.rho_n;
                let lambda = rho.powf(2.0 * w);
                let pt = engine.ids_gauge(lambda).unwrap();
                let expect = ids_free(lambda, d, w);
                assert!(
                    (pt.n - expect).abs() < 1e-6 * expect,
                    "d={d} w={w} ρ={rho}: {} vs {expect}",
                    pt.n
                );
            }
        }
    }

    #[test]
    fn window_precondition_enforced() {
        let sp = ScaleParams::defaults(2, 1.0, 0.0, 100.0);
        let engine = IdsEngine::build(&Symbol::zero(2), &sp, quick_opts(64)).unwrap();
        assert!(engine.ids_gauge((0.5 * sp.rho_n).powi(2)).is_err());
        assert!(engine.ids_gauge((5.0 * sp.rho_n).powi(2)).is_err());
    }

    #[test]
    fn grid_must_ascend() {
        let sp = ScaleParams::defaults(2, 1.0, 0.0, 100.0);
        let engine = IdsEngine::build(&Symbol::zero(2), &sp, quick_opts(64)).unwrap();
        let l = sp.lambda_n();
        assert!(engine.sweep(&[4.0 * l, 2.0 * l]).is_err());
    }

    #[test]
    fn g_is_free_outside_a() {
        let sp = ScaleParams::defaults(2, 1.0, 0.0, 120.0);
        let b = cosine_symbol(2, 0, 1.0, sp.c0);
        let engine = IdsEngine::build(&b, &sp, quick_opts(64)).unwrap();
        let xi = [12.0 * sp.rho_n, 0.0];
        assert!(!engine.in_a(&xi).unwrap());
        let g = engine.g_of_xi(&xi).unwrap();
        let free: f64 = xi.iter().map(|x| x * x).sum::<f64>().powf(sp.w);
        assert!((g - free).abs() < 1e-12 * free);
    }

    #[test]
    fn g_multiset_matches_block_spectrum_on_class() {
        let sp = ScaleParams::defaults(2, 1.0, 0.0, 150.0);
        let b = cosine_symbol(2, 0, 2.0, sp.c0);
        let engine = IdsEngine::build(&b, &sp, quick_opts(64)).unwrap();
        // a resonant point: on the e₁ slab in the shell
        let xi = [0.0, 2.0 * sp.rho_n];
        assert!(engine.in_a(&xi).unwrap());
        let cls = engine.class_of(&xi).unwrap();
        assert!(cls.len() > 1);
        let fam = BlockFamily::from_class(&cls, engine.w_symbol.clone(), 2.0 * sp.w);
        let ev = fam.eigenvalues(0.0).unwrap();
        let mut gs: Vec<f64> = cls
            .points
            .iter()
            .map(|p| engine.g_of_xi(p).unwrap())
            .collect();
        gs.sort_by(f64::total_cmp);
        for (a, b) in gs.iter().zip(&ev) {
            assert!((a - b).abs() < 1e-9 * (1.0 + b.abs()), "{a} vs {b}");
        }
    }

    #[test]
    fn positive_shift_makes_negative_volume() {
        // ŵ(0, ξ) = c > 0 pushes g up, so τ < τ₀ and the A± difference is
        // negative.
        use crate::symbol::{FrequencySet, RadialTerm};
        use num_complex::Complex64;
        let sp = ScaleParams::defaults(2, 1.0, 0.0, 100.0);
        let fs = FrequencySet::zero_only(2);
        let shift = Symbol::radial_classical(
            fs,
            vec![RadialTerm {
                iota: 0.0,
                coeffs: vec![(0, vec![0, 0], Complex64::new(10.0, 0.0))],
            }],
            sp.c0,
            0.0,
            true,
        );
        let mut engine =
            IdsEngine::build(&Symbol::zero(2), &sp, quick_opts(128)).unwrap();
        engine.w_symbol = shift;
        let rho = 2.0 * sp.rho_n;
        let mut total = 0.0;
        for chart in engine.charts.clone() {
            let (v, _) = engine.volume_a_pm(&chart, rho).unwrap();
            total += v;
        }
        assert!(total < 0.0, "total = {total}");
        // magnitude ≈ surface × c/(2wρ^{2w−1}) = 2πρ·10/(2ρ) = 10π
        let expect = -10.0 * std::f64::consts::PI;
        assert!(
            (total - expect).abs() < 0.02 * expect.abs(),
            "total = {total} vs {expect}"
        );
    }

    #[test]
    fn monotonicity_check_fires() {
        let r = IdsResult {
            points: vec![
                IdsPoint {
                    lambda: 1.0,
                    n: 2.0,
                    err_estimate: 0.0,
                },
                IdsPoint {
                    lambda: 2.0,
                    n: 1.0,
                    err_estimate: 0.0,
                },
            ],
            method: "free-closed-form".into(),
            monotonicity_tol: 1e-8,
        };
        assert!(r.check_monotone().is_err());
    }
}
