//! Shifted cylindrical coordinates on the components of a resonance
//! region.
//!
//! A component of Ξ(V), dim V = m, is cut out by inequalities
//! ⟨ξ_{V^⊥}, μ̃_j⟩ > L_{m+1} for its minimal defining set of unit normals
//! {μ̃_j}. With K = d − m − 1 and J = K + 1 defining normals, the apex
//! a ∈ V^⊥ solves ⟨a, μ̃_j⟩ = L_{m+1} for all j, and the component is
//! parameterized as ξ = X + a + rΦ with X ∈ Ω(V), r > 0 and Φ in the
//! spherical simplex M_p = {Φ ∈ S_{V^⊥} : ⟨Φ, μ̃_j⟩ > 0}.
//!
//! Components whose minimal defining set is smaller than K + 1 cannot be
//! charted this way; they are reported as excluded and the caller accounts
//! for them in its error budget.

use crate::error::CoreError;
use crate::regions::RegionGeometry;
use nalgebra::{DMatrix, DVector};

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// How M_p is sampled.
#[derive(Clone, Debug)]
pub enum PhiSampler {
    /// K = 0: a single direction, no Φ integration.
    SinglePoint(Vec<f64>),
    /// K = 1: directions cos(ψ)u + sin(ψ)v for ψ ∈ (a0, a1).
    Arc {
        u: Vec<f64>,
        v: Vec<f64>,
        a0: f64,
        a1: f64,
    },
    /// No defining planes at all: the whole unit sphere of V^⊥.
    FullSphere,
    /// Simplicial cone in dim V^⊥ ≥ 3: rejection sampling against the
    /// defining normals.
    Cone,
}

/// Chart of one minimally-defined component.
#[derive(Clone, Debug)]
pub struct Chart {
    pub v_idx: usize,
    pub m: usize,
    /// K = d − m − 1.
    pub k_big: usize,
    /// Signed unit normals μ̃_j (ambient coordinates); empty for full
    /// spheres.
    pub defining: Vec<Vec<f64>>,
    /// Apex a ∈ V^⊥ (ambient coordinates; zero for full spheres).
    pub apex: Vec<f64>,
    /// Orthonormal basis of V.
    pub v_basis: Vec<Vec<f64>>,
    /// Orthonormal basis of V^⊥.
    pub perp_basis: Vec<Vec<f64>>,
    pub phi: PhiSampler,
}

/// A component that could not be charted (minimal defining set smaller
/// than K + 1, or unsupported general position).
#[derive(Clone, Debug)]
pub struct ExcludedComponent {
    pub v_idx: usize,
    /// A direction interior to the component (ambient coordinates).
    pub witness_dir: Vec<f64>,
    pub reason: String,
}

impl Chart {
    pub fn dim(&self) -> usize {
        self.v_basis.first().map(|b| b.len()).unwrap_or_else(|| {
            self.perp_basis
                .first()
                .map(|b| b.len())
                .expect("chart must have some basis")
        })
    }

    /// ξ = X + a + rΦ from chart coordinates (X given in the V basis).
    pub fn point(&self, x_coords: &[f64], r: f64, phi: &[f64]) -> Vec<f64> {
        let d = self.dim();
        let mut out = self.apex.clone();
        if out.len() != d {
            out = vec![0.0; d];
        }
        for (c, b) in x_coords.iter().zip(&self.v_basis) {
            for (o, bi) in out.iter_mut().zip(b) {
                *o += c * bi;
            }
        }
        for (o, p) in out.iter_mut().zip(phi) {
            *o += r * p;
        }
        out
    }

    /// Inverse chart map: ξ → (X-coords, r, Φ).
    pub fn coords(&self, xi: &[f64]) -> (Vec<f64>, f64, Vec<f64>) {
        let x_coords: Vec<f64> = self.v_basis.iter().map(|b| dot(xi, b)).collect();
        // η = ξ_{V^⊥} − a
        let mut eta = vec![0.0; xi.len()];
        for b in &self.perp_basis {
            let ip = dot(xi, b);
            for (e, bi) in eta.iter_mut().zip(b) {
                *e += ip * bi;
            }
        }
        for (e, a) in eta.iter_mut().zip(&self.apex) {
            *e -= a;
        }
        let r = norm(&eta);
        let phi: Vec<f64> = eta.iter().map(|e| e / r).collect();
        (x_coords, r, phi)
    }

    /// Vertices of the spherical simplex (K = 1 arcs only: the two
    /// endpoint directions).
    pub fn simplex_vertices(&self) -> Vec<Vec<f64>> {
        match &self.phi {
            PhiSampler::Arc { u, v, a0, a1 } => {
                let at = |t: f64| -> Vec<f64> {
                    u.iter()
                        .zip(v)
                        .map(|(ui, vi)| t.cos() * ui + t.sin() * vi)
                        .collect()
                };
                vec![at(*a0), at(*a1)]
            }
            PhiSampler::SinglePoint(p) => vec![p.clone()],
            _ => vec![],
        }
    }

    /// Is a direction Φ (ambient) inside M_p?
    pub fn phi_in_simplex(&self, phi: &[f64]) -> bool {
        self.defining.iter().all(|mu| dot(phi, mu) > 0.0)
    }

    /// Measure of M_p: counting measure for single points, arc length for
    /// K = 1, sphere area for full spheres. Cones report the enclosing
    /// sphere area (sampling multiplies by their indicator).
    pub fn phi_measure(&self) -> f64 {
        match &self.phi {
            PhiSampler::SinglePoint(_) => 1.0,
            PhiSampler::Arc { a0, a1, .. } => a1 - a0,
            PhiSampler::FullSphere | PhiSampler::Cone => {
                let n = self.perp_basis.len();
                sphere_area(n)
            }
        }
    }
}

/// Surface area of the unit sphere S^{n−1} ⊂ R^n.
pub fn sphere_area(n: usize) -> f64 {
    n as f64 * crate::unit_ball_volume(n)
}

/// Build a chart from an explicit minimal defining set (K + 1 unit
/// vectors in V^⊥); checks independence and solves for the apex.
pub fn build_chart(
    geom: &RegionGeometry,
    v_idx: usize,
    defining: Vec<Vec<f64>>,
) -> Result<Chart, CoreError> {
    let v = &geom.subspaces[v_idx];
    let d = geom.dim();
    let m = v.dim;
    let k_big = d - m - 1;
    if defining.len() != k_big + 1 {
        return Err(CoreError::Geometry(format!(
            "defining set of size {} but K+1 = {}",
            defining.len(),
            k_big + 1
        )));
    }
    for mu in &defining {
        if (norm(mu) - 1.0).abs() > 1e-9 {
            return Err(CoreError::Geometry("defining vectors must be unit".into()));
        }
        if norm(&v.project_onto(mu)) > 1e-9 {
            return Err(CoreError::Geometry(
                "defining vectors must lie in V^⊥".into(),
            ));
        }
    }
    let perp_basis = perp_basis_of(v, d);
    let n = perp_basis.len();
    debug_assert_eq!(n, k_big + 1);
    // solve ⟨a, μ̃_j⟩ = L_{m+1} in perp coordinates
    let l = geom.sp.slab_width(m + 1);
    let mat = DMatrix::from_fn(n, n, |i, j| dot(&defining[i], &perp_basis[j]));
    let rhs = DVector::from_element(n, l);
    let lu = mat.clone().lu();
    let sol = lu.solve(&rhs).ok_or_else(|| {
        CoreError::Geometry("defining set not linearly independent".into())
    })?;
    let mut apex = vec![0.0; d];
    for (c, b) in sol.iter().zip(&perp_basis) {
        for (a, bi) in apex.iter_mut().zip(b) {
            *a += c * bi;
        }
    }
    let phi = phi_sampler_for(&defining, &perp_basis)?;
    Ok(Chart {
        v_idx,
        m,
        k_big,
        defining,
        apex,
        v_basis: v.basis.clone(),
        perp_basis,
        phi,
    })
}

fn perp_basis_of(v: &crate::regions::Subspace, d: usize) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = v.basis.clone();
    let mut perp = Vec::new();
    for i in 0..d {
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        for b in &basis {
            let ip = dot(&e, b);
            for (x, bi) in e.iter_mut().zip(b) {
                *x -= ip * bi;
            }
        }
        let n = norm(&e);
        if n > 1e-9 {
            for x in e.iter_mut() {
                *x /= n;
            }
            basis.push(e.clone());
            perp.push(e);
        }
    }
    perp
}

fn phi_sampler_for(
    defining: &[Vec<f64>],
    perp_basis: &[Vec<f64>],
) -> Result<PhiSampler, CoreError> {
    match perp_basis.len() {
        1 => Ok(PhiSampler::SinglePoint(defining[0].clone())),
        2 => {
            // arc of directions with positive inner product against both
            let (u, v) = (&perp_basis[0], &perp_basis[1]);
            let ang = |mu: &Vec<f64>| dot(mu, v).atan2(dot(mu, u));
            let mut p1 = ang(&defining[0]);
            let mut p2 = ang(&defining[1]);
            // bring within π of each other
            if p2 - p1 > std::f64::consts::PI {
                p2 -= 2.0 * std::f64::consts::PI;
            }
            if p1 - p2 > std::f64::consts::PI {
                p1 -= 2.0 * std::f64::consts::PI;
            }
            let a0 = p1.max(p2) - std::f64::consts::FRAC_PI_2;
            let a1 = p1.min(p2) + std::f64::consts::FRAC_PI_2;
            if a1 <= a0 {
                return Err(CoreError::Geometry(
                    "defining normals subtend a degenerate arc".into(),
                ));
            }
            Ok(PhiSampler::Arc {
                u: u.clone(),
                v: v.clone(),
                a0,
                a1,
            })
        }
        _ => Ok(PhiSampler::Cone),
    }
}

/// Enumerate the charts (and non-chartable components) of Ξ(V).
pub fn enumerate_charts(
    geom: &RegionGeometry,
    v_idx: usize,
) -> Result<(Vec<Chart>, Vec<ExcludedComponent>), CoreError> {
    let v = &geom.subspaces[v_idx];
    let d = geom.dim();
    if v.dim == d {
        return Ok((vec![], vec![])); // the fully resonant region is never charted
    }
    let normals = &geom.ext_normals[v_idx];
    let perp_basis = perp_basis_of(v, d);
    let dim_perp = perp_basis.len();

    let mut charts = Vec::new();
    let mut excluded = Vec::new();

    if normals.is_empty() {
        // no extensions: Ξ(V) = Ξ₁(V), parameterized by plain spherical
        // coordinates in V^⊥ around a = 0
        if dim_perp == 1 {
            for sign in [1.0, -1.0] {
                let dir: Vec<f64> = perp_basis[0].iter().map(|x| x * sign).collect();
                charts.push(Chart {
                    v_idx,
                    m: v.dim,
                    k_big: 0,
                    defining: vec![],
                    apex: vec![0.0; d],
                    v_basis: v.basis.clone(),
                    perp_basis: perp_basis.clone(),
                    phi: PhiSampler::SinglePoint(dir),
                });
            }
        } else {
            charts.push(Chart {
                v_idx,
                m: v.dim,
                k_big: dim_perp - 1,
                defining: vec![],
                apex: vec![0.0; d],
                v_basis: v.basis.clone(),
                perp_basis: perp_basis.clone(),
                phi: PhiSampler::FullSphere,
            });
        }
        return Ok((charts, excluded));
    }

    match dim_perp {
        1 => {
            // a single ± pair of normals; two half-line components
            let mu = &normals[0];
            for sign in [1.0, -1.0] {
                let nu: Vec<f64> = mu.iter().map(|x| x * sign).collect();
                charts.push(build_chart(geom, v_idx, vec![nu])?);
            }
        }
        2 => {
            let (u, w) = (&perp_basis[0], &perp_basis[1]);
            let angles: Vec<f64> = normals
                .iter()
                .map(|mu| dot(mu, w).atan2(dot(mu, u)))
                .collect();
            // critical direction angles where some ⟨Φ, μ_j⟩ changes sign
            let tau = 2.0 * std::f64::consts::PI;
            let mut crit: Vec<(f64, usize)> = Vec::new();
            for (j, &p) in angles.iter().enumerate() {
                for off in [std::f64::consts::FRAC_PI_2, -std::f64::consts::FRAC_PI_2] {
                    crit.push(((p + off).rem_euclid(tau), j));
                }
            }
            crit.sort_by(|a, b| a.0.total_cmp(&b.0));
            let n = crit.len();
            for i in 0..n {
                let lo = crit[i];
                let hi = if i + 1 < n {
                    crit[i + 1]
                } else {
                    (crit[0].0 + tau, crit[0].1)
                };
                if hi.0 - lo.0 < 1e-9 {
                    continue;
                }
                let mid = 0.5 * (lo.0 + hi.0);
                let mid_dir: Vec<f64> = u
                    .iter()
                    .zip(w)
                    .map(|(ui, wi)| mid.cos() * ui + mid.sin() * wi)
                    .collect();
                if lo.1 == hi.1 {
                    excluded.push(ExcludedComponent {
                        v_idx,
                        witness_dir: mid_dir,
                        reason: format!(
                            "component bounded by a single normal; minimal defining set of size 1 < K+1 = 2"
                        ),
                    });
                    continue;
                }
                let signed = |j: usize| -> Vec<f64> {
                    let s = (mid - angles[j]).cos().signum();
                    normals[j].iter().map(|x| x * s).collect()
                };
                charts.push(build_chart(geom, v_idx, vec![signed(lo.1), signed(hi.1)])?);
            }
        }
        _ => {
            // only the simplicial case (exactly dim V^⊥ independent
            // normals) is charted in higher codimension
            if normals.len() == dim_perp {
                let mat = DMatrix::from_fn(dim_perp, dim_perp, |i, j| {
                    dot(&normals[i], &perp_basis[j])
                });
                if mat.lu().is_invertible() {
                    for mask in 0..(1u32 << dim_perp) {
                        let defs: Vec<Vec<f64>> = normals
                            .iter()
                            .enumerate()
                            .map(|(j, mu)| {
                                let s = if mask >> j & 1 == 1 { 1.0 } else { -1.0 };
                                mu.iter().map(|x| x * s).collect()
                            })
                            .collect();
                        charts.push(build_chart(geom, v_idx, defs)?);
                    }
                    return Ok((charts, excluded));
                }
            }
            excluded.push(ExcludedComponent {
                v_idx,
                witness_dir: normals[0].clone(),
                reason: format!(
                    "{} normals in a {}-dimensional orthogonal complement: general components are not charted",
                    normals.len(),
                    dim_perp
                ),
            });
        }
    }
    Ok((charts, excluded))
}

/// Charts and exclusions for the whole collection 𝒱 (all V with dim < d).
pub fn enumerate_all_charts(
    geom: &RegionGeometry,
) -> Result<(Vec<Chart>, Vec<ExcludedComponent>), CoreError> {
    let mut charts = Vec::new();
    let mut excluded = Vec::new();
    for v_idx in 0..geom.subspaces.len() {
        if geom.subspaces[v_idx].dim == geom.dim() {
            continue;
        }
        let (c, e) = enumerate_charts(geom, v_idx)?;
        charts.extend(c);
        excluded.extend(e);
    }
    Ok((charts, excluded))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::SplitMix64;
    use crate::scale::ScaleParams;
    use crate::symbol::{Frequency, FrequencySet};

    fn fs2(elems: &[[f64; 2]]) -> FrequencySet {
        FrequencySet::new(2, elems.iter().map(|e| Frequency::new(e.to_vec())).collect())
            .unwrap()
    }

    fn four_line_geom(rho: f64) -> RegionGeometry {
        let sp = ScaleParams::defaults(2, 1.0, 0.0, rho);
        RegionGeometry::build(
            &fs2(&[
                [0.0, 0.0],
                [1.0, 0.0],
                [-1.0, 0.0],
                [0.0, 1.0],
                [0.0, -1.0],
                [1.0, 1.0],
                [-1.0, -1.0],
                [1.0, -1.0],
                [-1.0, 1.0],
            ]),
            &sp,
            1000,
        )
        .unwrap()
    }

    #[test]
    fn sector_charts_of_the_nonresonant_region() {
        let geom = four_line_geom(100.0);
        let zero_idx = geom.subspaces.iter().position(|s| s.dim == 0).unwrap();
        let (charts, excluded) = enumerate_charts(&geom, zero_idx).unwrap();
        // four slab lines → eight sectors, all minimal
        assert_eq!(charts.len(), 8);
        assert!(excluded.is_empty());
        let l1 = geom.sp.slab_width(1);
        for ch in &charts {
            assert_eq!(ch.defining.len(), 2);
            // apex lands on both defining planes
            for mu in &ch.defining {
                assert!((dot(&ch.apex, mu) - l1).abs() < 1e-9 * l1);
            }
            // apex strictly beyond every non-defining constraint
            let perp = ch.apex.clone();
            for m in geom.ext_normals[zero_idx].iter() {
                assert!(dot(&perp, m).abs() >= l1 - 1e-9);
            }
            // simplex vertices separated by at least s(ρ_n)
            let verts = ch.simplex_vertices();
            assert_eq!(verts.len(), 2);
            let dist: f64 = verts[0]
                .iter()
                .zip(&verts[1])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let s = crate::regions::geometry_constants(&geom).s_min;
            assert!(dist >= s - 1e-9, "vertex separation {dist} < s = {s}");
        }
    }

    #[test]
    fn slab_end_charts_for_lines() {
        let geom = four_line_geom(100.0);
        for (i, v) in geom.subspaces.iter().enumerate() {
            if v.dim != 1 {
                continue;
            }
            let (charts, excluded) = enumerate_charts(&geom, i).unwrap();
            assert_eq!(charts.len(), 2, "two half-slab components per line");
            assert!(excluded.is_empty());
            for ch in &charts {
                assert_eq!(ch.k_big, 0);
                assert!(matches!(ch.phi, PhiSampler::SinglePoint(_)));
                // apex at distance L₂ along the defining direction
                let l2 = geom.sp.slab_width(2);
                assert!((norm(&ch.apex) - l2).abs() < 1e-9 * l2);
            }
        }
    }

    #[test]
    fn nonspanning_set_yields_excluded_halfplanes() {
        let sp = ScaleParams::defaults(2, 1.0, 0.0, 100.0);
        let geom = RegionGeometry::build(
            &fs2(&[[0.0, 0.0], [1.0, 0.0], [-1.0, 0.0]]),
            &sp,
            100,
        )
        .unwrap();
        let zero_idx = geom.subspaces.iter().position(|s| s.dim == 0).unwrap();
        let (charts, excluded) = enumerate_charts(&geom, zero_idx).unwrap();
        assert!(charts.is_empty());
        assert_eq!(excluded.len(), 2, "two half-planes, both non-minimal");
        // the line itself has no extensions (rank deficient): full-sphere
        // (two-ray) charts
        let line_idx = geom.subspaces.iter().position(|s| s.dim == 1).unwrap();
        let (charts, excluded) = enumerate_charts(&geom, line_idx).unwrap();
        assert_eq!(charts.len(), 2);
        assert!(excluded.is_empty());
        assert!(charts.iter().all(|c| norm(&c.apex) == 0.0));
    }

    #[test]
    fn free_operator_full_sphere() {
        let sp = ScaleParams::defaults(2, 1.0, 0.0, 100.0);
        let geom =
            RegionGeometry::build(&FrequencySet::zero_only(2), &sp, 100).unwrap();
        let (charts, excluded) = enumerate_all_charts(&geom).unwrap();
        assert_eq!(charts.len(), 1);
        assert!(excluded.is_empty());
        assert!(matches!(charts[0].phi, PhiSampler::FullSphere));
        assert!((charts[0].phi_measure() - 2.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn chart_round_trip() {
        let geom = four_line_geom(150.0);
        let (charts, _) = enumerate_all_charts(&geom).unwrap();
        let mut rng = SplitMix64::new(17);
        for ch in &charts {
            for _ in 0..100 {
                let x_coords: Vec<f64> = (0..ch.m).map(|_| rng.range(-5.0, 5.0)).collect();
                let r = rng.range(1.0, 400.0);
                let phi = match &ch.phi {
                    PhiSampler::SinglePoint(p) => p.clone(),
                    PhiSampler::Arc { u, v, a0, a1 } => {
                        let t = rng.range(*a0, *a1);
                        u.iter()
                            .zip(v)
                            .map(|(ui, vi)| t.cos() * ui + t.sin() * vi)
                            .collect()
                    }
                    _ => unreachable!("2-d charts only in this test"),
                };
                let xi = ch.point(&x_coords, r, &phi);
                let (x2, r2, phi2) = ch.coords(&xi);
                let xi2 = ch.point(&x2, r2, &phi2);
                for (a, b) in xi.iter().zip(&xi2) {
                    assert!((a - b).abs() < 1e-10 * (1.0 + a.abs()));
                }
                assert!((r - r2).abs() < 1e-10 * r);
            }
        }
    }

    #[test]
    fn apex_examples() {
        // d = 2, m = 0, defining {e₁, e₂} → a = L₁(1,1)
        let sp = ScaleParams::defaults(2, 1.0, 0.0, 100.0);
        let geom = RegionGeometry::build(
            &fs2(&[[0.0, 0.0], [1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]]),
            &sp,
            100,
        )
        .unwrap();
        let zero_idx = geom.subspaces.iter().position(|s| s.dim == 0).unwrap();
        let ch = build_chart(
            &geom,
            zero_idx,
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        )
        .unwrap();
        let l1 = sp.slab_width(1);
        assert!((ch.apex[0] - l1).abs() < 1e-9);
        assert!((ch.apex[1] - l1).abs() < 1e-9);
        assert!((norm(&ch.apex) - 2.0f64.sqrt() * l1).abs() < 1e-9);

        // non-unit defining vector rejected
        assert!(build_chart(&geom, zero_idx, vec![vec![2.0, 0.0], vec![0.0, 1.0]]).is_err());
        // dependent defining set rejected
        assert!(build_chart(
            &geom,
            zero_idx,
            vec![vec![1.0, 0.0], vec![-1.0, 0.0]]
        )
        .is_err());
    }
}
