//! Resonance-region geometry in momentum space.
//!
//! For the closure Θ_k̃ of the frequency set, a quasi-lattice subspace is
//! a span of elements of Θ_k̃. Momentum space decomposes into the disjoint
//! regions Ξ(V): ξ ∈ Ξ(V) when ξ lies in some flag slab stack of V
//! (Ξ₁(V)) but in no Ξ₁(W) for an extension W ⊃ V of one more dimension.
//! In Ξ(V) the perturbation only couples ξ to points of its resonant
//! congruence class Υ(ξ), a finite set reachable by integer frequency
//! steps that stay inside the slabs Λ(θ).

use crate::error::CoreError;
use crate::numeric::SplitMix64;
use crate::scale::ScaleParams;
use crate::symbol::FrequencySet;
use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

const PIVOT_TOL: f64 = 1e-10;

/// Orthonormalize `gens` (rows) with pivoting; returns the surviving basis.
fn gram_schmidt(gens: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for g in gens {
        let mut v = g.clone();
        for b in &basis {
            let ip: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= ip * bi;
            }
        }
        let n: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > PIVOT_TOL * (1.0 + g.iter().map(|x| x * x).sum::<f64>().sqrt()) {
            for vi in v.iter_mut() {
                *vi /= n;
            }
            basis.push(v);
        }
    }
    basis
}

fn project(basis: &[Vec<f64>], xi: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; xi.len()];
    for b in basis {
        let ip: f64 = xi.iter().zip(b).map(|(x, y)| x * y).sum();
        for (o, bi) in out.iter_mut().zip(b) {
            *o += ip * bi;
        }
    }
    out
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A quasi-lattice subspace: the span of some elements of Θ_k̃.
#[derive(Clone, Debug)]
pub struct Subspace {
    pub dim: usize,
    /// Orthonormal basis of the span.
    pub basis: Vec<Vec<f64>>,
    /// Indices into Θ_k̃ of a generating set.
    pub gens: Vec<usize>,
    /// Canonical key (quantized reduced row echelon form); two spans are
    /// equal iff their keys agree.
    canon: Vec<i64>,
}

impl Subspace {
    fn canon_key(basis: &[Vec<f64>], d: usize) -> Vec<i64> {
        // RREF of the basis matrix is unique for the row space.
        let mut rows: Vec<Vec<f64>> = basis.to_vec();
        let mut lead = 0usize;
        for r in 0..rows.len() {
            if lead >= d {
                break;
            }
            let mut piv = r;
            while rows[piv][lead].abs() < PIVOT_TOL {
                piv += 1;
                if piv == rows.len() {
                    piv = r;
                    lead += 1;
                    if lead == d {
                        break;
                    }
                }
            }
            if lead == d {
                break;
            }
            rows.swap(r, piv);
            let p = rows[r][lead];
            for c in 0..d {
                rows[r][c] /= p;
            }
            for rr in 0..rows.len() {
                if rr != r && rows[rr][lead].abs() > 0.0 {
                    let f = rows[rr][lead];
                    for c in 0..d {
                        rows[rr][c] -= f * rows[r][c];
                    }
                }
            }
            lead += 1;
        }
        let mut key = Vec::with_capacity(rows.len() * d);
        for row in rows {
            for v in row {
                key.push((v * 1e8).round() as i64);
            }
        }
        key
    }

    pub fn from_generators(d: usize, gens: Vec<usize>, vecs: &[Vec<f64>]) -> Option<Subspace> {
        let rows: Vec<Vec<f64>> = gens.iter().map(|&i| vecs[i].clone()).collect();
        let basis = gram_schmidt(&rows);
        if basis.len() != gens.len() {
            return None; // linearly dependent generators
        }
        let canon = Self::canon_key(&basis, d);
        Some(Subspace {
            dim: basis.len(),
            basis,
            gens,
            canon,
        })
    }

    pub fn zero(_d: usize) -> Subspace {
        Subspace {
            dim: 0,
            basis: vec![],
            gens: vec![],
            canon: vec![0; 0],
        }
    }

    pub fn contains_vector(&self, v: &[f64]) -> bool {
        let p = project(&self.basis, v);
        let mut res = 0.0;
        for (x, y) in v.iter().zip(&p) {
            res += (x - y) * (x - y);
        }
        res.sqrt() <= 1e-9 * (1.0 + norm(v))
    }

    pub fn project_onto(&self, xi: &[f64]) -> Vec<f64> {
        project(&self.basis, xi)
    }

    pub fn project_perp(&self, xi: &[f64]) -> Vec<f64> {
        let p = self.project_onto(xi);
        xi.iter().zip(&p).map(|(x, y)| x - y).collect()
    }

    pub fn same_span(&self, other: &Subspace) -> bool {
        self.dim == other.dim && self.canon == other.canon
    }
}

/// A flag V₁ ⊂ ⋯ ⊂ V_m with its unit vectors ν_j ∈ V_j ⊖ V_{j−1}.
#[derive(Clone, Debug)]
pub struct Flag {
    pub nus: Vec<Vec<f64>>,
}

/// The collection 𝒱 of all quasi-lattice subspaces, with per-subspace
/// flags and codimension-one extension normals.
#[derive(Debug)]
pub struct RegionGeometry {
    pub sp: ScaleParams,
    /// Θ_k̃ as float vectors (index space for generators).
    pub theta: Vec<Vec<f64>>,
    pub theta_set: FrequencySet,
    pub subspaces: Vec<Subspace>,
    /// For each subspace, flags generated by chains inside it.
    pub flags: Vec<Vec<Flag>>,
    /// For each subspace V, the unit normals n(θ_{V^⊥}) of extensions,
    /// deduplicated up to sign.
    pub ext_normals: Vec<Vec<Vec<f64>>>,
}

impl RegionGeometry {
    /// Enumerate 𝒱 and the derived flag/extension data.
    pub fn build(theta_k: &FrequencySet, sp: &ScaleParams, cap: usize) -> Result<Self, CoreError> {
        let d = theta_k.dim();
        let theta: Vec<Vec<f64>> = theta_k.iter().map(|f| f.coords.clone()).collect();
        let nonzero: Vec<usize> = (0..theta.len())
            .filter(|&i| norm(&theta[i]) > 1e-10)
            .collect();

        let mut subspaces = vec![Subspace::zero(d)];
        let mut frontier: Vec<usize> = vec![0];
        while let Some(vi) = frontier.pop() {
            if subspaces[vi].dim == d {
                continue;
            }
            for &ti in &nonzero {
                if subspaces[vi].contains_vector(&theta[ti]) {
                    continue;
                }
                let mut gens = subspaces[vi].gens.clone();
                gens.push(ti);
                if let Some(s) = Subspace::from_generators(d, gens, &theta) {
                    if !subspaces.iter().any(|t| t.same_span(&s)) {
                        subspaces.push(s);
                        frontier.push(subspaces.len() - 1);
                        if subspaces.len() > cap {
                            return Err(CoreError::CapExceeded(format!(
                                "subspace enumeration exceeded cap {cap}"
                            )));
                        }
                    }
                }
            }
        }
        subspaces.sort_by_key(|s| s.dim);

        // flags: chains through 𝒱 ending at V
        let mut flags: Vec<Vec<Flag>> = vec![Vec::new(); subspaces.len()];
        for (i, v) in subspaces.iter().enumerate() {
            flags[i] = enumerate_flags(v, &subspaces);
        }

        // extension normals: directions of θ projected off V
        let mut ext_normals: Vec<Vec<Vec<f64>>> = vec![Vec::new(); subspaces.len()];
        for (i, v) in subspaces.iter().enumerate() {
            if v.dim == d {
                continue;
            }
            let mut normals: Vec<Vec<f64>> = Vec::new();
            for &ti in &nonzero {
                if v.contains_vector(&theta[ti]) {
                    continue;
                }
                let perp = v.project_perp(&theta[ti]);
                let n = norm(&perp);
                let unit: Vec<f64> = perp.iter().map(|x| x / n).collect();
                let dup = normals.iter().any(|m| {
                    let ip = dot(m, &unit).abs();
                    (ip - 1.0).abs() < 1e-9
                });
                if !dup {
                    normals.push(unit);
                }
            }
            ext_normals[i] = normals;
        }

        Ok(RegionGeometry {
            sp: sp.clone(),
            theta,
            theta_set: theta_k.clone(),
            subspaces,
            flags,
            ext_normals,
        })
    }

    pub fn dim(&self) -> usize {
        self.sp.d
    }

    /// ξ ∈ Λ(θ): |⟨ξ, n(θ)⟩| ≤ L₁.
    pub fn in_slab(&self, xi: &[f64], theta: &[f64]) -> bool {
        let tn = norm(theta);
        debug_assert!(tn > 0.0);
        dot(xi, theta).abs() / tn <= self.sp.slab_width(1)
    }

    /// ξ ∈ Ξ₁(V): some flag of V has |⟨ξ, ν_j⟩| ≤ L_j for every level j.
    pub fn in_xi1(&self, xi: &[f64], v_idx: usize) -> bool {
        let v = &self.subspaces[v_idx];
        if v.dim == 0 {
            return true;
        }
        'flags: for flag in &self.flags[v_idx] {
            for (j, nu) in flag.nus.iter().enumerate() {
                if dot(xi, nu).abs() > self.sp.slab_width(j + 1) {
                    continue 'flags;
                }
            }
            return true;
        }
        false
    }

    /// ξ ∈ Ξ(V): in Ξ₁(V) and excluded from every one-dimension-up
    /// extension, tested through the perpendicular inner products.
    pub fn in_region(&self, xi: &[f64], v_idx: usize) -> bool {
        if !self.in_xi1(xi, v_idx) {
            return false;
        }
        let v = &self.subspaces[v_idx];
        if v.dim == self.dim() {
            return true;
        }
        let lm1 = self.sp.slab_width(v.dim + 1);
        let perp = v.project_perp(xi);
        for mu in &self.ext_normals[v_idx] {
            if dot(&perp, mu).abs() <= lm1 {
                return false;
            }
        }
        true
    }

    /// The unique subspace with ξ ∈ Ξ(V).
    pub fn classify(&self, xi: &[f64]) -> Result<usize, CoreError> {
        for (i, _) in self.subspaces.iter().enumerate() {
            if self.in_region(xi, i) {
                return Ok(i);
            }
        }
        Err(CoreError::Geometry(format!(
            "point {xi:?} not classified by any resonance region"
        )))
    }

    /// Count of regions containing ξ (should always be exactly one).
    pub fn membership_count(&self, xi: &[f64]) -> usize {
        (0..self.subspaces.len())
            .filter(|&i| self.in_region(xi, i))
            .count()
    }

    /// Nonzero θ-indices available as congruence moves (optionally those
    /// inside a subspace only).
    pub fn move_generators(&self, within: Option<usize>) -> Vec<Vec<f64>> {
        self.theta
            .iter()
            .filter(|t| norm(t) > 1e-10)
            .filter(|t| match within {
                None => true,
                Some(vi) => self.subspaces[vi].contains_vector(t),
            })
            .cloned()
            .collect()
    }
}

fn enumerate_flags(v: &Subspace, all: &[Subspace]) -> Vec<Flag> {
    if v.dim == 0 {
        return vec![Flag { nus: vec![] }];
    }
    // chains of subspaces from 𝒱 strictly inside V, one dim at a time
    let mut chains: Vec<Vec<&Subspace>> = vec![vec![]];
    for m in 1..=v.dim {
        let mut next = Vec::new();
        for chain in &chains {
            let prev: &[Vec<f64>] = chain.last().map(|s| s.basis.as_slice()).unwrap_or(&[]);
            for cand in all.iter().filter(|s| s.dim == m) {
                // candidate must contain the previous element and sit inside V
                let inside_v = cand.basis.iter().all(|b| v.contains_vector(b));
                if !inside_v {
                    continue;
                }
                let contains_prev = prev.iter().all(|b| cand.contains_vector(b));
                if !contains_prev {
                    continue;
                }
                if m == v.dim && !cand.same_span(v) {
                    continue;
                }
                let mut c2 = chain.clone();
                c2.push(cand);
                next.push(c2);
            }
        }
        chains = next;
    }
    chains
        .into_iter()
        .map(|chain| {
            let mut nus = Vec::with_capacity(chain.len());
            let mut prev_basis: Vec<Vec<f64>> = Vec::new();
            for s in chain {
                // unit vector in s ⊖ previous
                let mut nu = vec![0.0; s.basis[0].len()];
                for b in &s.basis {
                    let mut w = b.clone();
                    for p in &prev_basis {
                        let ip = dot(&w, p);
                        for (wi, pi) in w.iter_mut().zip(p) {
                            *wi -= ip * pi;
                        }
                    }
                    if norm(&w) > PIVOT_TOL {
                        nu = w;
                        break;
                    }
                }
                let n = norm(&nu);
                for x in nu.iter_mut() {
                    *x /= n;
                }
                prev_basis = s.basis.clone();
                nus.push(nu);
            }
            Flag { nus }
        })
        .collect()
}

/// A resonant congruence class with its reachability witnesses.
#[derive(Clone, Debug)]
pub struct CongruenceClass {
    pub seed: Vec<f64>,
    /// Members, sorted by |η| then lexicographically.
    pub points: Vec<Vec<f64>>,
    /// Per member (matching `points`): (index of the point it was reached
    /// from, the θ used, the integer step l). The seed has no witness.
    pub witnesses: Vec<Option<(usize, Vec<f64>, i64)>>,
}

impl CongruenceClass {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn diameter(&self) -> f64 {
        let mut best = 0.0f64;
        for i in 0..self.points.len() {
            for j in i + 1..self.points.len() {
                let d2: f64 = self.points[i]
                    .iter()
                    .zip(&self.points[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                best = best.max(d2.sqrt());
            }
        }
        best
    }

    /// Rank of a member in the |η|-then-lexicographic order.
    pub fn rank_of(&self, xi: &[f64]) -> Option<usize> {
        self.points
            .iter()
            .position(|p| p.iter().zip(xi).all(|(a, b)| (a - b).abs() < 1e-7))
    }
}

/// Total order on points: by modulus, ties broken lexicographically.
pub fn point_order(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    let na = norm(a);
    let nb = norm(b);
    if (na - nb).abs() > 1e-9 * (1.0 + na.max(nb)) {
        return na.total_cmp(&nb);
    }
    for (x, y) in a.iter().zip(b) {
        if (x - y).abs() > 1e-12 {
            return x.total_cmp(y);
        }
    }
    std::cmp::Ordering::Equal
}

/// BFS over moves ξ → ξ + lθ with both endpoints inside Λ(θ).
///
/// `gens` are the admissible nonzero frequencies. The step bound
/// |l| ≤ ⌈2L₁/|θ|⌉ comes from the slab width along θ.
pub fn congruence_class(
    seed: &[f64],
    gens: &[Vec<f64>],
    sp: &ScaleParams,
    cap: usize,
) -> Result<CongruenceClass, CoreError> {
    let l1 = sp.slab_width(1);
    let key = |p: &[f64]| -> Vec<i64> { p.iter().map(|x| (x * 1e7).round() as i64).collect() };
    let mut points: Vec<Vec<f64>> = vec![seed.to_vec()];
    let mut witnesses: Vec<Option<(usize, Vec<f64>, i64)>> = vec![None];
    let mut seen = std::collections::HashSet::new();
    seen.insert(key(seed));
    let mut frontier = vec![0usize];

    while let Some(cur) = frontier.pop() {
        let p = points[cur].clone();
        for th in gens {
            let tn = norm(th);
            // along-θ coordinate of both endpoints must stay within ±L₁
            let proj = dot(&p, th) / tn;
            if proj.abs() > l1 {
                continue;
            }
            let lmax = (2.0 * l1 / tn).ceil() as i64;
            for l in -lmax..=lmax {
                if l == 0 {
                    continue;
                }
                let endpoint = proj + l as f64 * tn;
                if endpoint.abs() > l1 {
                    continue;
                }
                let q: Vec<f64> = p
                    .iter()
                    .zip(th)
                    .map(|(x, t)| x + l as f64 * t)
                    .collect();
                if seen.insert(key(&q)) {
                    points.push(q);
                    witnesses.push(Some((cur, th.clone(), l)));
                    frontier.push(points.len() - 1);
                    if points.len() > cap {
                        return Err(CoreError::CapExceeded(format!(
                            "congruence class exceeded cap {cap} (seed too close to the fully resonant region?)"
                        )));
                    }
                }
            }
        }
    }

    // sort members by modulus-then-lex, carrying witnesses along
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| point_order(&points[a], &points[b]));
    let inv: Vec<usize> = {
        let mut inv = vec![0; order.len()];
        for (new, &old) in order.iter().enumerate() {
            inv[old] = new;
        }
        inv
    };
    let sorted_points: Vec<Vec<f64>> = order.iter().map(|&i| points[i].clone()).collect();
    let sorted_wits: Vec<Option<(usize, Vec<f64>, i64)>> = order
        .iter()
        .map(|&i| witnesses[i].clone().map(|(f, t, l)| (inv[f], t, l)))
        .collect();

    Ok(CongruenceClass {
        seed: seed.to_vec(),
        points: sorted_points,
        witnesses: sorted_wits,
    })
}

/// Geometric constants of the frequency closure: the minimal sine of an
/// angle between strongly distinct subspaces, the frequency norm range,
/// and the Diophantine-condition checks at ρ = 4ρ_n.
#[derive(Clone, Debug)]
pub struct GeometryConstants {
    pub s_min: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub card: usize,
    pub s_bound: f64,
    pub r_bound: f64,
    pub card_bound: f64,
    pub s_ok: bool,
    pub r_ok: bool,
    pub card_ok: bool,
    /// True when no strongly distinct pair exists (s reported as 1).
    pub s_vacuous: bool,
}

impl GeometryConstants {
    pub fn all_ok(&self) -> bool {
        self.s_ok && self.r_ok && self.card_ok
    }
}

/// First principal angle between A and B (spans given by orthonormal
/// bases): cos φ = σ_max(AᵀB).
fn min_angle_sin(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let m = DMatrix::from_fn(a.len(), b.len(), |i, j| dot(&a[i], &b[j]));
    let svd = m.svd(false, false);
    let cos = svd
        .singular_values
        .iter()
        .fold(0.0f64, |acc, &s| acc.max(s))
        .min(1.0);
    (1.0 - cos * cos).sqrt()
}

pub fn geometry_constants(geom: &RegionGeometry) -> GeometryConstants {
    let sp = &geom.sp;
    let mut s_min = f64::INFINITY;
    let mut found_pair = false;
    let subs = &geom.subspaces;
    for i in 0..subs.len() {
        for j in i + 1..subs.len() {
            let (v, u) = (&subs[i], &subs[j]);
            if v.dim == 0 || u.dim == 0 {
                continue;
            }
            // strongly distinct: neither contains the other
            let v_in_u = v.basis.iter().all(|b| u.contains_vector(b));
            let u_in_v = u.basis.iter().all(|b| v.contains_vector(b));
            if v_in_u || u_in_v {
                continue;
            }
            // W = V ∩ U via double projection residuals
            let mut w_basis: Vec<Vec<f64>> = Vec::new();
            for b in &v.basis {
                if u.contains_vector(b) {
                    w_basis.push(b.clone());
                }
            }
            // refine: directions of V also inside U but not along w_basis
            // (cheap variant adequate for quasi-lattice spans)
            let residual = |basis: &[Vec<f64>], w: &[Vec<f64>]| -> Vec<Vec<f64>> {
                let mut out = Vec::new();
                for b in basis {
                    let mut r = b.clone();
                    for wv in w {
                        let ip = dot(&r, wv);
                        for (ri, wi) in r.iter_mut().zip(wv) {
                            *ri -= ip * wi;
                        }
                    }
                    if norm(&r) > 1e-9 {
                        let n = norm(&r);
                        out.push(r.iter().map(|x| x / n).collect());
                    }
                }
                gram_schmidt(&out)
            };
            let av = residual(&v.basis, &w_basis);
            let bu = residual(&u.basis, &w_basis);
            if av.is_empty() || bu.is_empty() {
                continue;
            }
            found_pair = true;
            s_min = s_min.min(min_angle_sin(&av, &bu));
        }
    }
    let s_vacuous = !found_pair;
    let s_min = if found_pair { s_min } else { 1.0 };

    let r_min = geom.theta_set.min_nonzero_norm().unwrap_or(0.0);
    let r_max = geom.theta_set.max_norm();
    let card = geom.theta_set.len();

    let rho = 4.0 * sp.rho_n;
    let low = rho.powf(-1.0 / sp.k as f64);
    let high = rho.powf(1.0 / sp.k as f64);
    GeometryConstants {
        s_min,
        r_min,
        r_max,
        card,
        s_bound: low,
        r_bound: low,
        card_bound: high,
        s_ok: s_min >= low,
        r_ok: r_min >= low || card == 1,
        card_ok: (card as f64) <= high,
        s_vacuous,
    }
}

/// Outcome of the exact integer-relation check on d-subsets of the
/// frequency closure.
#[derive(Clone, Debug)]
pub struct ConditionAReport {
    pub checked_subsets: usize,
    pub dependent_subsets: usize,
    /// For each dependent subset: (member indices, integer relation).
    pub witnesses: Vec<(Vec<usize>, Vec<BigInt>)>,
    pub pass: bool,
}

/// Exact check that every d-subset of Θ_{k_max} is either linearly
/// independent or satisfies an integer relation Σ n_j θ_j = 0.
///
/// Requires exact rational coordinates on every frequency.
pub fn check_condition_a(
    theta: &FrequencySet,
    k_max: u32,
    cap: usize,
) -> Result<ConditionAReport, CoreError> {
    if !theta.has_rationals() {
        return Err(CoreError::RationalsMissing(
            "condition A needs exact rational coordinates on every frequency".into(),
        ));
    }
    let closure = theta.closure(k_max, cap)?;
    let d = theta.dim();
    let rats: Vec<Vec<BigRational>> = closure
        .iter()
        .map(|f| {
            f.rational
                .as_ref()
                .expect("closure preserves rationals")
                .iter()
                .map(|q| BigRational::new(BigInt::from(*q.numer()), BigInt::from(*q.denom())))
                .collect()
        })
        .collect();
    let nonzero: Vec<usize> = (0..rats.len())
        .filter(|&i| rats[i].iter().any(|q| !q.is_zero()))
        .collect();

    let mut report = ConditionAReport {
        checked_subsets: 0,
        dependent_subsets: 0,
        witnesses: vec![],
        pass: true,
    };

    let mut subset = vec![0usize; d];
    enumerate_subsets(&nonzero, d, &mut subset, 0, 0, &mut |chosen| {
        report.checked_subsets += 1;
        if report.checked_subsets > cap {
            return false;
        }
        let rows: Vec<Vec<BigRational>> = chosen.iter().map(|&i| rats[i].clone()).collect();
        if let Some(kernel) = exact_kernel(&rows, d) {
            report.dependent_subsets += 1;
            let ints = clear_denominators(&kernel);
            // verify Σ n_j θ_j = 0 exactly
            for c in 0..d {
                let mut acc = BigRational::zero();
                for (j, &i) in chosen.iter().enumerate() {
                    acc += BigRational::from(ints[j].clone()) * rats[i][c].clone();
                }
                assert!(acc.is_zero(), "integer relation failed to verify");
            }
            report.witnesses.push((chosen.to_vec(), ints));
        }
        true
    });
    Ok(report)
}

fn enumerate_subsets(
    pool: &[usize],
    k: usize,
    cur: &mut Vec<usize>,
    depth: usize,
    start: usize,
    f: &mut impl FnMut(&[usize]) -> bool,
) -> bool {
    if depth == k {
        return f(cur);
    }
    for i in start..pool.len() {
        cur[depth] = pool[i];
        if !enumerate_subsets(pool, k, cur, depth + 1, i + 1, f) {
            return false;
        }
    }
    true
}

/// Kernel vector of the d×d-ish system over Q, or None if rows are
/// independent.
fn exact_kernel(rows: &[Vec<BigRational>], d: usize) -> Option<Vec<BigRational>> {
    // Gaussian elimination on the transpose: find c with Σ c_j rows[j] = 0.
    let n = rows.len();
    let mut m: Vec<Vec<BigRational>> = (0..d)
        .map(|c| (0..n).map(|r| rows[r][c].clone()).collect())
        .collect();
    let mut pivot_col = vec![usize::MAX; d];
    let mut rank = 0usize;
    for col in 0..n {
        let mut piv = None;
        for r in rank..d {
            if !m[r][col].is_zero() {
                piv = Some(r);
                break;
            }
        }
        let Some(p) = piv else { continue };
        m.swap(rank, p);
        let pv = m[rank][col].clone();
        for c in 0..n {
            m[rank][c] = &m[rank][c] / &pv;
        }
        for r in 0..d {
            if r != rank && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..n {
                    let sub = &f * &m[rank][c];
                    m[r][c] = &m[r][c] - &sub;
                }
            }
        }
        pivot_col[rank] = col;
        rank += 1;
        if rank == d.min(n) {
            break;
        }
    }
    if rank == n {
        return None;
    }
    // free column: first col not a pivot
    let pivots: Vec<usize> = pivot_col[..rank].to_vec();
    let free = (0..n).find(|c| !pivots.contains(c))?;
    let mut sol = vec![BigRational::zero(); n];
    sol[free] = BigRational::one();
    for (r, &pc) in pivots.iter().enumerate() {
        sol[pc] = -m[r][free].clone();
    }
    Some(sol)
}

fn clear_denominators(v: &[BigRational]) -> Vec<BigInt> {
    let mut lcm = BigInt::one();
    for q in v {
        let den = q.denom();
        let g = num_integer::Integer::gcd(&lcm, den);
        lcm = lcm / g * den;
    }
    let ints: Vec<BigInt> = v.iter().map(|q| (q * BigRational::from(lcm.clone())).to_integer()).collect();
    let mut g = BigInt::zero();
    for i in &ints {
        g = num_integer::Integer::gcd(&g, i);
    }
    if g.is_zero() || g.is_one() {
        ints
    } else {
        ints.into_iter().map(|i| i / &g).collect()
    }
}

/// Random point in the shell r ∈ [r_lo, r_hi] (uniform direction, uniform
/// radius; adequate for sampling tests).
pub fn sample_shell(d: usize, r_lo: f64, r_hi: f64, rng: &mut SplitMix64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d)
            .map(|_| {
                // Box–Muller
                let u1: f64 = rng.uniform().max(1e-15);
                let u2: f64 = rng.uniform();
                (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
            })
            .collect();
        let n = norm(&v);
        if n > 1e-9 {
            let r = rng.range(r_lo, r_hi);
            return v.iter().map(|x| x * r / n).collect();
        }
    }
}
