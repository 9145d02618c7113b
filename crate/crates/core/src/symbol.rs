//! Almost-periodic symbols with finite frequency sets.
//!
//! A symbol b(x, ξ) = Σ_θ b̂(θ, ξ) e^{iθx} is stored as its map of Fourier
//! coefficients. Two layouts exist:
//!
//! - *radial-classical*: b̂(θ, ξ) = Σ_ι χ(|ξ|)^ι Σ_τ b̂_ι^{(τ)}(θ) (ξ/|ξ|)^τ,
//!   a finite table of radial exponents and direction monomials;
//! - *derived*: expression nodes produced by products, commutators, finite
//!   differences and cut-off multiplications, evaluated lazily so the
//!   calculus composes without committing to a grid.
//!
//! Evaluation is generic over [`Scalar`], so the same tree yields values and
//! d/dz derivatives along complexified radial rays.

use crate::cutoff::{CutoffFamily, CutoffKind};
use crate::error::CoreError;
use crate::numeric::{RayPoint, Scalar, SplitMix64};
use num_complex::Complex64;
use num_rational::Rational64;
use std::sync::Arc;

const FREQ_DEDUP_TOL: f64 = 1e-10;

/// One frequency θ, optionally with exact rational coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Frequency {
    pub coords: Vec<f64>,
    pub rational: Option<Vec<Rational64>>,
}

impl Frequency {
    pub fn new(coords: Vec<f64>) -> Self {
        Frequency {
            coords,
            rational: None,
        }
    }

    pub fn rational(r: Vec<Rational64>) -> Self {
        let coords = r
            .iter()
            .map(|q| *q.numer() as f64 / *q.denom() as f64)
            .collect();
        Frequency {
            coords,
            rational: Some(r),
        }
    }

    pub fn with_rational(coords: Vec<f64>, r: Vec<Rational64>) -> Result<Self, CoreError> {
        for (c, q) in coords.iter().zip(&r) {
            let qf = *q.numer() as f64 / *q.denom() as f64;
            if (c - qf).abs() > 1e-12 * (1.0 + c.abs()) {
                return Err(CoreError::FrequencySet(format!(
                    "rational coordinate {q} disagrees with float {c}"
                )));
            }
        }
        Ok(Frequency {
            coords,
            rational: Some(r),
        })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.norm() < FREQ_DEDUP_TOL
    }

    pub fn negated(&self) -> Frequency {
        Frequency {
            coords: self.coords.iter().map(|c| -c).collect(),
            rational: self.rational.as_ref().map(|r| r.iter().map(|q| -q).collect()),
        }
    }

    pub fn sum(&self, other: &Frequency) -> Frequency {
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a + b)
            .collect();
        let rational = match (&self.rational, &other.rational) {
            (Some(a), Some(b)) => Some(a.iter().zip(b).map(|(x, y)| x + y).collect()),
            _ => None,
        };
        Frequency { coords, rational }
    }

    fn close_to(&self, coords: &[f64]) -> bool {
        self.coords
            .iter()
            .zip(coords)
            .all(|(a, b)| (a - b).abs() <= FREQ_DEDUP_TOL)
    }
}

/// Finite symmetric frequency set containing 0.
#[derive(Clone, Debug)]
pub struct FrequencySet {
    d: usize,
    elems: Vec<Frequency>,
}

impl FrequencySet {
    /// Build and validate: 0 must be present, the set must be symmetric
    /// under negation. Duplicates are merged (1e-10 float tolerance,
    /// exact when rationals are present).
    pub fn new(d: usize, elems: Vec<Frequency>) -> Result<Self, CoreError> {
        let mut set = FrequencySet { d, elems: vec![] };
        for f in elems {
            if f.dim() != d {
                return Err(CoreError::FrequencySet(format!(
                    "frequency dimension {} != ambient {}",
                    f.dim(),
                    d
                )));
            }
            set.push_dedup(f);
        }
        if !set.elems.iter().any(|f| f.is_zero()) {
            return Err(CoreError::FrequencySet(
                "zero frequency absent from the set".into(),
            ));
        }
        for f in &set.elems {
            let neg = f.negated();
            if set.find(&neg.coords).is_none() {
                return Err(CoreError::FrequencySet(format!(
                    "set not symmetric: missing -θ for θ = {:?}",
                    f.coords
                )));
            }
        }
        Ok(set)
    }

    /// The set {0} in dimension d.
    pub fn zero_only(d: usize) -> Self {
        FrequencySet {
            d,
            elems: vec![Frequency::new(vec![0.0; d])],
        }
    }

    fn push_dedup(&mut self, f: Frequency) {
        if self.find(&f.coords).is_none() {
            self.elems.push(f);
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Frequency> {
        self.elems.iter()
    }

    pub fn get(&self, i: usize) -> &Frequency {
        &self.elems[i]
    }

    pub fn find(&self, coords: &[f64]) -> Option<usize> {
        self.elems.iter().position(|f| f.close_to(coords))
    }

    pub fn contains(&self, coords: &[f64]) -> bool {
        self.find(coords).is_some()
    }

    /// Rank of the element matrix (does the set span R^d?).
    pub fn rank(&self) -> usize {
        let mut rows: Vec<Vec<f64>> = self.elems.iter().map(|f| f.coords.clone()).collect();
        let mut rank = 0;
        for col in 0..self.d {
            let piv = (rank..rows.len())
                .max_by(|&a, &b| rows[a][col].abs().total_cmp(&rows[b][col].abs()));
            let Some(piv) = piv else { break };
            if rows[piv][col].abs() < 1e-9 {
                continue;
            }
            rows.swap(rank, piv);
            let p = rows[rank][col];
            for r in rank + 1..rows.len() {
                let f = rows[r][col] / p;
                for c in col..self.d {
                    rows[r][c] -= f * rows[rank][c];
                }
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rank
    }

    pub fn spans(&self) -> bool {
        self.rank() == self.d
    }

    pub fn has_rationals(&self) -> bool {
        self.elems.iter().all(|f| f.rational.is_some())
    }

    /// k-fold algebraic sum Θ + ⋯ + Θ, deduplicated.
    pub fn closure(&self, k: u32, cap: usize) -> Result<FrequencySet, CoreError> {
        let mut cur = self.clone();
        for _ in 1..k {
            let mut next = cur.clone();
            for a in &cur.elems {
                for b in &self.elems {
                    next.push_dedup(a.sum(b));
                    if next.elems.len() > cap {
                        return Err(CoreError::CapExceeded(format!(
                            "frequency closure exceeded cap {cap}"
                        )));
                    }
                }
            }
            cur = next;
        }
        Ok(cur)
    }

    /// Algebraic sum of two sets.
    pub fn sum_set(&self, other: &FrequencySet, cap: usize) -> Result<FrequencySet, CoreError> {
        let mut out = FrequencySet {
            d: self.d,
            elems: vec![],
        };
        for a in &self.elems {
            for b in &other.elems {
                out.push_dedup(a.sum(b));
                if out.elems.len() > cap {
                    return Err(CoreError::CapExceeded(format!(
                        "frequency sum set exceeded cap {cap}"
                    )));
                }
            }
        }
        Ok(out)
    }

    /// Largest |θ| in the set.
    pub fn max_norm(&self) -> f64 {
        self.elems.iter().map(|f| f.norm()).fold(0.0, f64::max)
    }

    /// Smallest |θ| over nonzero elements (None if only 0 present).
    pub fn min_nonzero_norm(&self) -> Option<f64> {
        self.elems
            .iter()
            .filter(|f| !f.is_zero())
            .map(|f| f.norm())
            .min_by(f64::total_cmp)
    }
}

/// One radial term: exponent ι and the table (θ, τ) → b̂_ι^{(τ)}(θ).
#[derive(Clone, Debug)]
pub struct RadialTerm {
    pub iota: f64,
    /// Entries (frequency index, multi-index τ, coefficient).
    pub coeffs: Vec<(usize, Vec<u32>, Complex64)>,
}

#[derive(Debug)]
enum Node {
    Zero,
    /// Radial-classical table. `c0` anchors the χ smoothing.
    Radial { terms: Vec<RadialTerm>, c0: f64 },
    /// The unperturbed symbol |ξ|^{2w} at frequency 0.
    FreeEnergy { two_w: f64 },
    /// Linear combination Σ c_i b_i.
    Sum(Vec<(Complex64, Symbol)>),
    /// Composition symbol b∘g of the operator product.
    Product(Symbol, Symbol),
    /// Finite difference ∇_θ: coefficient at (φ, ξ) is b̂(φ, ξ+θ) − b̂(φ, ξ).
    Nabla(Symbol, Vec<f64>),
    /// Commutator symbol ad(b, g) = i(b∘g − g∘b) in finite-difference form.
    Commutator(Symbol, Symbol),
    /// Per-frequency scalar cut-off factor.
    CutoffMul(Symbol, CutoffKind, Arc<CutoffFamily>),
    /// ψ̂(θ, ξ) = i â(θ, ξ) χ̃_θ(ξ): the commutator-equation solution.
    ChiTilde(Symbol, Arc<CutoffFamily>),
}

/// An almost-periodic symbol with finite frequency support.
///
/// Immutable after construction; all operations return new values, so
/// concurrent evaluation is safe.
#[derive(Clone, Debug)]
pub struct Symbol {
    freqs: FrequencySet,
    order: f64,
    self_adjoint: bool,
    node: Arc<Node>,
}

impl Symbol {
    pub fn zero(d: usize) -> Symbol {
        Symbol {
            freqs: FrequencySet::zero_only(d),
            order: 0.0,
            self_adjoint: true,
            node: Arc::new(Node::Zero),
        }
    }

    /// Radial-classical symbol from a table of terms.
    pub fn radial_classical(
        freqs: FrequencySet,
        terms: Vec<RadialTerm>,
        c0: f64,
        order: f64,
        self_adjoint: bool,
    ) -> Symbol {
        let node = if terms.is_empty() {
            Node::Zero
        } else {
            Node::Radial { terms, c0 }
        };
        Symbol {
            freqs,
            order,
            self_adjoint,
            node: Arc::new(node),
        }
    }

    /// |ξ|^{2w} as a single-frequency symbol.
    pub fn free_energy(d: usize, two_w: f64) -> Symbol {
        Symbol {
            freqs: FrequencySet::zero_only(d),
            order: two_w,
            self_adjoint: true,
            node: Arc::new(Node::FreeEnergy { two_w }),
        }
    }

    pub fn freq_set(&self) -> &FrequencySet {
        &self.freqs
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn self_adjoint_flag(&self) -> bool {
        self.self_adjoint
    }

    pub fn dim(&self) -> usize {
        self.freqs.dim()
    }

    pub fn is_zero_node(&self) -> bool {
        matches!(&*self.node, Node::Zero)
    }

    /// Fourier coefficient b̂(θ, ξ). Total: returns 0 for θ outside the
    /// frequency set.
    pub fn fourier_coeff<S: Scalar>(&self, theta: &[f64], xi: &RayPoint<S>) -> S {
        match self.freqs.find(theta) {
            None => S::zero(),
            Some(i) => {
                let th = self.freqs.get(i).coords.clone();
                self.coeff_inner(&th, xi)
            }
        }
    }

    fn coeff_inner<S: Scalar>(&self, theta: &[f64], xi: &RayPoint<S>) -> S {
        match &*self.node {
            Node::Zero => S::zero(),
            Node::Radial { terms, c0 } => radial_eval(terms, *c0, &self.freqs, theta, xi),
            Node::FreeEnergy { two_w } => {
                if theta.iter().all(|t| t.abs() <= FREQ_DEDUP_TOL) {
                    xi.norm_sq().powf(*two_w / 2.0)
                } else {
                    S::zero()
                }
            }
            Node::Sum(parts) => {
                let mut acc = S::zero();
                for (c, s) in parts {
                    acc = acc + S::from_c(*c) * s.fourier_coeff(theta, xi);
                }
                acc
            }
            Node::Product(b, g) => {
                // (b∘g)^(χ, ξ) = Σ_{θ'+φ=χ} b̂(θ', ξ+φ) ĝ(φ, ξ)
                let mut acc = S::zero();
                for tp in b.freqs.iter() {
                    let phi: Vec<f64> = theta
                        .iter()
                        .zip(&tp.coords)
                        .map(|(c, t)| c - t)
                        .collect();
                    let Some(pi) = g.freqs.find(&phi) else {
                        continue;
                    };
                    let phi = &g.freqs.get(pi).coords;
                    let bv = b.coeff_inner(&tp.coords, &xi.shifted(phi));
                    if bv.value().norm() == 0.0 {
                        continue;
                    }
                    let gv = g.coeff_inner(phi, xi);
                    acc = acc + bv * gv;
                }
                acc
            }
            Node::Nabla(inner, shift) => {
                inner.fourier_coeff(theta, &xi.shifted(shift)) - inner.fourier_coeff(theta, xi)
            }
            Node::Commutator(b, g) => {
                // i Σ_{θ'} [(∇_{χ−θ'} b)^(θ', ξ) ĝ(χ−θ', ξ) − b̂(θ', ξ)(∇_{θ'} g)^(χ−θ', ξ)]
                let mut acc = S::zero();
                for tp in b.freqs.iter() {
                    let rest: Vec<f64> = theta
                        .iter()
                        .zip(&tp.coords)
                        .map(|(c, t)| c - t)
                        .collect();
                    let Some(ri) = g.freqs.find(&rest) else {
                        continue;
                    };
                    let rest = &g.freqs.get(ri).coords;
                    let term1 = {
                        let db = b.coeff_inner(&tp.coords, &xi.shifted(rest))
                            - b.coeff_inner(&tp.coords, xi);
                        db * g.coeff_inner(rest, xi)
                    };
                    let term2 = {
                        let dg = g.coeff_inner(rest, &xi.shifted(&tp.coords))
                            - g.coeff_inner(rest, xi);
                        b.coeff_inner(&tp.coords, xi) * dg
                    };
                    acc = acc + (term1 - term2);
                }
                acc * S::from_c(Complex64::new(0.0, 1.0))
            }
            Node::CutoffMul(inner, kind, cf) => {
                let f = cf.factor(*kind, theta, &xi.real_part());
                if f == 0.0 {
                    S::zero()
                } else {
                    inner.fourier_coeff(theta, xi).scale(f)
                }
            }
            Node::ChiTilde(inner, cf) => {
                let chi = cf.chi_tilde(theta, xi);
                if chi.value().norm() == 0.0 {
                    S::zero()
                } else {
                    inner.fourier_coeff(theta, xi) * chi * S::from_c(Complex64::new(0.0, 1.0))
                }
            }
        }
    }

    /// op(b) e_ν = Σ_θ b̂(θ, ν) e_{ν+θ}: the non-vanishing amplitudes.
    pub fn apply_to_exponential(&self, nu: &[f64]) -> Vec<(Vec<f64>, Complex64)> {
        let pt = RayPoint::<Complex64>::real(nu);
        let mut out = Vec::new();
        for th in self.freqs.iter() {
            let amp = self.coeff_inner(&th.coords, &pt);
            if amp.norm() > 0.0 {
                let target: Vec<f64> = nu.iter().zip(&th.coords).map(|(a, b)| a + b).collect();
                out.push((target, amp));
            }
        }
        out
    }

    /// Composition symbol of op(b)·op(g).
    pub fn product(&self, g: &Symbol) -> Result<Symbol, CoreError> {
        let freqs = self.freqs.sum_set(&g.freqs, 100_000)?;
        Ok(Symbol {
            freqs,
            order: self.order + g.order,
            self_adjoint: false,
            node: Arc::new(Node::Product(self.clone(), g.clone())),
        })
    }

    /// ad(b, g) = i[b∘g − g∘b].
    pub fn commutator(&self, g: &Symbol) -> Result<Symbol, CoreError> {
        let freqs = self.freqs.sum_set(&g.freqs, 100_000)?;
        Ok(Symbol {
            freqs,
            order: self.order + g.order - 1.0,
            self_adjoint: self.self_adjoint && g.self_adjoint,
            node: Arc::new(Node::Commutator(self.clone(), g.clone())),
        })
    }

    /// Finite difference ∇_θ.
    pub fn nabla_theta(&self, theta: &[f64]) -> Symbol {
        Symbol {
            freqs: self.freqs.clone(),
            order: self.order - 1.0,
            self_adjoint: false,
            node: Arc::new(Node::Nabla(self.clone(), theta.to_vec())),
        }
    }

    /// Linear combination.
    pub fn linear(parts: Vec<(Complex64, Symbol)>) -> Symbol {
        assert!(!parts.is_empty());
        let d = parts[0].1.dim();
        let mut freqs = FrequencySet::zero_only(d);
        let mut order = f64::NEG_INFINITY;
        let mut sa = true;
        for (c, s) in &parts {
            for f in s.freqs.iter() {
                freqs.push_dedup(f.clone());
            }
            order = order.max(s.order);
            sa = sa && s.self_adjoint && c.im == 0.0;
        }
        Symbol {
            freqs,
            order,
            self_adjoint: sa,
            node: Arc::new(Node::Sum(parts)),
        }
    }

    pub fn add(&self, other: &Symbol) -> Symbol {
        Symbol::linear(vec![
            (Complex64::new(1.0, 0.0), self.clone()),
            (Complex64::new(1.0, 0.0), other.clone()),
        ])
    }

    pub fn scaled(&self, c: Complex64) -> Symbol {
        Symbol::linear(vec![(c, self.clone())])
    }

    /// Multiply every coefficient by the per-frequency cut-off factor `kind`.
    pub fn cutoff_mul(&self, kind: CutoffKind, cf: &Arc<CutoffFamily>) -> Symbol {
        Symbol {
            freqs: self.freqs.clone(),
            order: self.order,
            self_adjoint: self.self_adjoint && kind.preserves_symmetry(),
            node: Arc::new(Node::CutoffMul(self.clone(), kind, cf.clone())),
        }
    }

    /// ψ with ψ̂(θ, ξ) = i â(θ, ξ) χ̃_θ(ξ).
    pub fn chi_tilde_mul(&self, cf: &Arc<CutoffFamily>) -> Symbol {
        let sp = cf.params();
        let order = self.order - 1.0 - (2.0 * sp.w - 2.0) / sp.beta;
        Symbol {
            freqs: self.freqs.clone(),
            order,
            self_adjoint: self.self_adjoint,
            node: Arc::new(Node::ChiTilde(self.clone(), cf.clone())),
        }
    }

    /// Drop frequencies whose coefficient stays below `tol`·(largest seen)
    /// on the probe points. Bounds frequency-set blow-up in nested
    /// commutators.
    pub fn pruned(&self, probes: &[Vec<f64>], tol: f64) -> Symbol {
        let mut maxima = vec![0.0f64; self.freqs.len()];
        for p in probes {
            let pt = RayPoint::<Complex64>::real(p);
            for (i, th) in self.freqs.iter().enumerate() {
                maxima[i] = maxima[i].max(self.coeff_inner(&th.coords, &pt).norm());
            }
        }
        let global = maxima.iter().fold(0.0f64, |a, &b| a.max(b));
        let keep: Vec<Frequency> = self
            .freqs
            .iter()
            .zip(&maxima)
            .filter(|(f, &m)| f.is_zero() || m > tol * global)
            .map(|(f, _)| f.clone())
            .collect();
        let mut freqs = FrequencySet {
            d: self.dim(),
            elems: vec![],
        };
        // keep the set symmetric
        for f in keep {
            if freqs.find(&f.coords).is_none() {
                freqs.push_dedup(f.negated());
                freqs.push_dedup(f);
            }
        }
        Symbol {
            freqs,
            order: self.order,
            self_adjoint: self.self_adjoint,
            node: self.node.clone(),
        }
    }

    /// Max over sampled (θ, ξ) of |b̂(θ,ξ) − conj(b̂(−θ, ξ+θ))|.
    pub fn check_symmetry(&self, samples: usize, scale: f64, seed: u64) -> f64 {
        let d = self.dim();
        let mut rng = SplitMix64::new(seed ^ 0x5ca1_ab1e);
        let mut worst = 0.0f64;
        for _ in 0..samples {
            let xi: Vec<f64> = (0..d).map(|_| rng.range(-scale, scale)).collect();
            let pt = RayPoint::<Complex64>::real(&xi);
            for th in self.freqs.iter() {
                let lhs = self.fourier_coeff(&th.coords, &pt);
                let neg = th.negated();
                let shifted = pt.shifted(&th.coords);
                let rhs = self.fourier_coeff(&neg.coords, &shifted).conj();
                worst = worst.max((lhs - rhs).norm());
            }
        }
        worst
    }
}

fn radial_eval<S: Scalar>(
    terms: &[RadialTerm],
    c0: f64,
    freqs: &FrequencySet,
    theta: &[f64],
    xi: &RayPoint<S>,
) -> S {
    let Some(fi) = freqs.find(theta) else {
        return S::zero();
    };
    let real = xi.real_part();
    let real_norm = real.iter().map(|c| c * c).sum::<f64>().sqrt();
    let smooth = crate::cutoff::chi_taper(real_norm, c0);

    let mut acc = S::zero();
    for term in terms {
        let mut dir_sum = S::zero();
        let mut any = false;
        for (idx, tau, c) in &term.coeffs {
            if *idx != fi {
                continue;
            }
            any = true;
            let mono = if tau.iter().all(|&t| t == 0) {
                S::one()
            } else if real_norm <= c0 / 2.0 {
                // direction undefined at the origin; the radial taper kills
                // the term anyway
                S::zero()
            } else {
                let r = xi.norm();
                let mut m = S::one();
                for (i, &t) in tau.iter().enumerate() {
                    if t > 0 {
                        m = m * (xi.coord(i) / r).powi(t as i32);
                    }
                }
                m
            };
            dir_sum = dir_sum + mono.scale_c(*c);
        }
        if !any {
            continue;
        }
        // radial factor χ(|ξ|)^ι, smoothly tapered below C₀
        let radial: S = if term.iota == 0.0 {
            S::one()
        } else if real_norm >= c0 {
            xi.norm().powf(term.iota)
        } else if term.iota > 0.0 {
            S::from_f(smooth.powf(term.iota))
        } else if smooth > 0.0 {
            // negative exponents get an extra taper so the factor stays bounded
            let taper = crate::cutoff::rise_step((real_norm - c0 / 2.0) / (c0 / 2.0));
            S::from_f(smooth.powf(term.iota) * taper)
        } else {
            S::zero()
        };
        acc = acc + radial * dir_sum;
    }
    acc
}

trait ScaleC {
    fn scale_c(self, c: Complex64) -> Self;
}

impl<S: Scalar> ScaleC for S {
    fn scale_c(self, c: Complex64) -> S {
        self * S::from_c(c)
    }
}

/// Operator configuration for [`build_symbol`].
#[derive(Clone, Debug)]
pub struct OperatorSpec {
    pub d: usize,
    pub freqs: FrequencySet,
    pub terms: Vec<RadialTerm>,
    pub kappa: f64,
    pub c0: f64,
    pub require_span: bool,
}

/// Build a radial-classical symbol from a parsed operator config.
pub fn build_symbol(spec: &OperatorSpec) -> Result<Symbol, CoreError> {
    if spec.require_span && !spec.freqs.spans() {
        return Err(CoreError::Symbol(format!(
            "frequency set rank {} does not span R^{}",
            spec.freqs.rank(),
            spec.d
        )));
    }
    let mut order: f64 = 0.0;
    for t in &spec.terms {
        if t.iota > spec.kappa + 1e-12 {
            return Err(CoreError::Symbol(format!(
                "radial exponent {} exceeds kappa = {}",
                t.iota, spec.kappa
            )));
        }
        order = order.max(t.iota);
        for (idx, _, _) in &t.coeffs {
            if *idx >= spec.freqs.len() {
                return Err(CoreError::Symbol(format!(
                    "coefficient references frequency index {idx} out of range"
                )));
            }
        }
    }
    let sym = Symbol::radial_classical(spec.freqs.clone(), spec.terms.clone(), spec.c0, order, true);
    Ok(sym)
}

/// Convenience: the multiplication symbol 2c·cos(⟨e, x⟩) with e the given
/// integer frequency, i.e. coefficients c at ±e.
pub fn cosine_symbol(d: usize, axis: usize, amplitude: f64, c0: f64) -> Symbol {
    let mut e = vec![0.0; d];
    e[axis] = 1.0;
    let freqs = FrequencySet::new(
        d,
        vec![
            Frequency::new(vec![0.0; d]),
            Frequency::new(e.clone()),
            Frequency::new(e.iter().map(|x| -x).collect()),
        ],
    )
    .unwrap();
    let plus = freqs.find(&e).unwrap();
    let minus = freqs.find(&e.iter().map(|x| -x).collect::<Vec<_>>()).unwrap();
    let half = Complex64::new(amplitude / 2.0, 0.0);
    let term = RadialTerm {
        iota: 0.0,
        coeffs: vec![(plus, vec![0; d], half), (minus, vec![0; d], half)],
    };
    Symbol::radial_classical(freqs, vec![term], c0, 0.0, true)
}
