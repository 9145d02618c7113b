//! Brute-force Floquet–Bloch counting oracle for periodic coefficients.
//!
//! When every frequency lies in a common lattice Γ† (detected exactly
//! from rational coordinates), the operator fibers over quasi-momenta q
//! in a fundamental cell of Γ†. Each fiber is the matrix
//! ⟨γ′|H(q)|γ⟩ = |q+γ|^{2w} δ_{γ′γ} + b̂(γ′−γ, q+γ) over lattice points
//! |q+γ| ≤ R, and
//!
//! N(λ) = (2π)^{−d} ∫_cell #{eigenvalues of H(q) ≤ λ} dq,
//!
//! normalized so B = 0 reproduces the free IDS. Eigenvalues below λ are
//! counted by the inertia of H(q) − λI: an LDL-style banded elimination
//! whose negative-pivot count equals the count of eigenvalues under λ
//! (pivots are clamped away from zero, as in Sturm bisection).

use crate::error::CoreError;
use crate::numeric::RayPoint;
use crate::symbol::Symbol;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

/// Integer lattice basis recovered from the rational frequency set.
///
/// The lattice may have rank m < d (a potential constant along some
/// directions); the complement carries continuous momentum and is
/// integrated rather than folded.
#[derive(Clone, Debug)]
pub struct DualLattice {
    pub d: usize,
    /// Lattice rank m.
    pub rank: usize,
    /// Basis vectors of Γ† (m of them, in R^d).
    pub basis: Vec<Vec<f64>>,
    /// Orthonormal basis of the transverse directions (d − m vectors).
    pub perp: Vec<Vec<f64>>,
    /// m-dimensional volume of the fundamental cell.
    pub cell_volume: f64,
}

/// Hermite-style reduction of the group generated by rational vectors.
pub fn dual_lattice(freqs: &crate::symbol::FrequencySet) -> Result<DualLattice, CoreError> {
    if !freqs.has_rationals() {
        return Err(CoreError::RationalsMissing(
            "the oracle needs exact rational frequency coordinates".into(),
        ));
    }
    let d = freqs.dim();
    let rats: Vec<Vec<BigRational>> = freqs
        .iter()
        .map(|f| {
            f.rational
                .as_ref()
                .unwrap()
                .iter()
                .map(|q| BigRational::new(BigInt::from(*q.numer()), BigInt::from(*q.denom())))
                .collect()
        })
        .collect();
    // scale by the lcm of all denominators → integer vectors
    let mut lcm = BigInt::from(1);
    for r in &rats {
        for q in r {
            let den = q.denom();
            let g = num_integer::Integer::gcd(&lcm, den);
            lcm = lcm / g * den;
        }
    }
    let mut ints: Vec<Vec<BigInt>> = rats
        .iter()
        .map(|r| {
            r.iter()
                .map(|q| (q * BigRational::from(lcm.clone())).to_integer())
                .collect()
        })
        .filter(|v: &Vec<BigInt>| v.iter().any(|x| !x.is_zero()))
        .collect();
    if ints.is_empty() {
        return Err(CoreError::Precondition(
            "no nonzero frequencies: the operator is free".into(),
        ));
    }
    // column HNF by integer row reduction
    let mut basis: Vec<Vec<BigInt>> = Vec::new();
    for col in 0..d {
        // reduce all rows to a single pivot in this column
        loop {
            let mut nz: Vec<usize> = (0..ints.len()).filter(|&i| !ints[i][col].is_zero()).collect();
            if nz.len() <= 1 {
                break;
            }
            nz.sort_by_key(|&i| ints[i][col].abs());
            let (a, b) = (nz[0], nz[1]);
            let q = &ints[b][col] / &ints[a][col];
            for c in 0..d {
                let sub = &q * &ints[a][c];
                ints[b][c] = &ints[b][c] - sub;
            }
        }
        if let Some(p) = (0..ints.len()).find(|&i| !ints[i][col].is_zero()) {
            basis.push(ints.remove(p));
        }
    }
    if d > 3 {
        return Err(CoreError::Precondition("oracle supports d ≤ 3".into()));
    }
    let scale = lcm.to_f64().expect("lattice denominator overflow");
    let fbasis: Vec<Vec<f64>> = basis
        .iter()
        .map(|row| row.iter().map(|x| x.to_f64().unwrap() / scale).collect())
        .collect();
    let m = fbasis.len();
    // vol_m = √det(BᵀB)
    let gram = nalgebra::DMatrix::from_fn(m, m, |i, j| {
        fbasis[i].iter().zip(&fbasis[j]).map(|(a, b)| a * b).sum::<f64>()
    });
    let vol = gram.determinant().max(0.0).sqrt();
    // orthonormal complement by Gram–Schmidt against the lattice span
    let mut acc: Vec<Vec<f64>> = Vec::new();
    for b in &fbasis {
        let mut v = b.clone();
        for a in &acc {
            let ip: f64 = v.iter().zip(a).map(|(x, y)| x * y).sum();
            for (vi, ai) in v.iter_mut().zip(a) {
                *vi -= ip * ai;
            }
        }
        let n: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            acc.push(v.iter().map(|x| x / n).collect());
        }
    }
    let mut perp = Vec::new();
    for i in 0..d {
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        for a in &acc {
            let ip: f64 = e.iter().zip(a).map(|(x, y)| x * y).sum();
            for (ei, ai) in e.iter_mut().zip(a) {
                *ei -= ip * ai;
            }
        }
        let n: f64 = e.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-9 {
            let unit: Vec<f64> = e.iter().map(|x| x / n).collect();
            acc.push(unit.clone());
            perp.push(unit);
        }
    }
    Ok(DualLattice {
        d,
        rank: m,
        basis: fbasis,
        perp,
        cell_volume: vol,
    })
}

/// Banded Hermitian storage: `band[j][k]` holds entry (j, j+k), k ≤ bw.
struct BandedHermitian {
    n: usize,
    bw: usize,
    data: Vec<Complex64>,
}

impl BandedHermitian {
    fn new(n: usize, bw: usize) -> Self {
        BandedHermitian {
            n,
            bw,
            data: vec![Complex64::new(0.0, 0.0); n * (bw + 1)],
        }
    }

    #[inline]
    fn idx(&self, j: usize, k: usize) -> usize {
        j * (self.bw + 1) + k
    }

    fn set(&mut self, j: usize, k: usize, v: Complex64) {
        let i = self.idx(j, k);
        self.data[i] = v;
    }

    /// Count eigenvalues < shift via banded LDL^† elimination: the number
    /// of negative pivots (Sylvester inertia). Pivots too close to zero
    /// are clamped, as in scalar Sturm counting.
    fn count_below(&self, shift: f64) -> usize {
        let bw = self.bw;
        let n = self.n;
        // working copy of the upper band, rows eliminated in order
        let mut a = self.data.clone();
        let mut count = 0usize;
        for j in 0..n {
            let pivot = a[j * (bw + 1)].re - shift;
            let p = if pivot.abs() < 1e-280 {
                if pivot >= 0.0 {
                    1e-280
                } else {
                    -1e-280
                }
            } else {
                pivot
            };
            if p < 0.0 {
                count += 1;
            }
            let jmax = (j + bw).min(n - 1);
            for r in j + 1..=jmax {
                let lj = a[j * (bw + 1) + (r - j)].conj(); // entry (r, j) = conj of (j, r)
                if lj.norm_sqr() == 0.0 {
                    continue;
                }
                let f = lj / p;
                // row r update: A[r, c] -= A[r, j]·A[j, c]/p for c ≥ r in band
                let cmax = (j + bw).min(n - 1);
                for c in r..=cmax {
                    let ajc = a[j * (bw + 1) + (c - j)];
                    let cur = a[r * (bw + 1) + (c - r)];
                    a[r * (bw + 1) + (c - r)] = cur - f * ajc;
                }
            }
        }
        count
    }
}

/// Controls for the oracle.
#[derive(Clone, Debug)]
pub struct OracleOpts {
    /// Plane-wave truncation radius R; must be ≥ 3·λ^{1/2w}.
    pub truncation: f64,
    /// Brillouin-zone grid points per dimension (midpoint rule).
    pub bz_grid: usize,
}

/// N(λ) for a λ grid by Floquet–Bloch counting.
pub fn ids_oracle_floquet(
    b: &Symbol,
    w: f64,
    lambdas: &[f64],
    opts: &OracleOpts,
) -> Result<crate::ids::IdsResult, CoreError> {
    let lat = dual_lattice(b.freq_set())?;
    let d = lat.d;
    let two_w = 2.0 * w;
    let lambda_max = lambdas.iter().copied().fold(0.0f64, f64::max);
    let needed = 3.0 * lambda_max.powf(1.0 / two_w);
    if opts.truncation < needed {
        return Err(CoreError::Precondition(format!(
            "truncation radius {} under-resolved: need ≥ 3·λ^(1/2w) = {needed}",
            opts.truncation
        )));
    }
    for win in lambdas.windows(2) {
        if win[1] <= win[0] {
            return Err(CoreError::Precondition(
                "lambda grid must be strictly ascending".into(),
            ));
        }
    }

    // lattice points within the truncation ball (coefficients in the basis)
    let rank = lat.rank;
    let max_coeff: i64 = {
        let bmin = lat
            .basis
            .iter()
            .map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt())
            .fold(f64::INFINITY, f64::min);
        ((opts.truncation * 1.5) / bmin).ceil() as i64 + 2
    };
    let mut coeffs: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..rank {
        let mut next = Vec::new();
        for c in &coeffs {
            for v in -max_coeff..=max_coeff {
                let mut c2 = c.clone();
                c2.push(v);
                next.push(c2);
            }
        }
        coeffs = next;
    }
    let to_point = |c: &[i64]| -> Vec<f64> {
        let mut p = vec![0.0; d];
        for (ci, bv) in c.iter().zip(&lat.basis) {
            for (pi, bvi) in p.iter_mut().zip(bv) {
                *pi += *ci as f64 * bvi;
            }
        }
        p
    };
    // order lexicographically by coefficients: keeps couplings banded
    let margin = opts.truncation + lat.basis.iter().map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt()).fold(0.0f64, f64::max);
    let points: Vec<(Vec<i64>, Vec<f64>)> = coeffs
        .into_iter()
        .filter_map(|c| {
            let p = to_point(&c);
            let n: f64 = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            (n <= margin).then_some((c, p))
        })
        .collect();

    // coupling offsets in coefficient space
    let offsets: Vec<(Vec<i64>, Vec<f64>)> = b
        .freq_set()
        .iter()
        .filter(|f| !f.is_zero())
        .map(|f| {
            // solve integer coefficients of θ in the lattice basis
            let c = solve_integer_coeffs(&lat.basis, &f.coords)?;
            Some((c, f.coords.clone()))
        })
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| {
            CoreError::Precondition("a frequency escaped its own lattice".into())
        })?;

    // quasi-momentum sample points: midpoint grid over the cell in the
    // lattice directions, a midpoint quadrature over [−T, T] in each
    // transverse (continuous) direction
    let g = opts.bz_grid;
    let t_perp = lambda_max.powf(1.0 / two_w) + margin_of(&lat) + 1.0;
    let n_perp = ((2.0 * t_perp * g as f64).ceil() as usize).max(g);
    let h_perp = 2.0 * t_perp / n_perp as f64;
    let perp_weight = h_perp.powi((d - rank) as i32);
    let fibers: Vec<Vec<usize>> = {
        let mut multi: Vec<Vec<usize>> = vec![vec![]];
        for dim in 0..d {
            let extent = if dim < rank { g } else { n_perp };
            let mut next = Vec::new();
            for m in &multi {
                for i in 0..extent {
                    let mut m2 = m.clone();
                    m2.push(i);
                    next.push(m2);
                }
            }
            multi = next;
        }
        multi
    };

    let counts: Result<Vec<Vec<usize>>, CoreError> = fibers
        .par_iter()
        .map(|mi| {
            let q: Vec<f64> = {
                let mut q = vec![0.0; d];
                for (k, &i) in mi.iter().enumerate() {
                    if k < rank {
                        let t = (i as f64 + 0.5) / g as f64;
                        for (qi, bvi) in q.iter_mut().zip(&lat.basis[k]) {
                            *qi += t * bvi;
                        }
                    } else {
                        let t = -t_perp + (i as f64 + 0.5) * h_perp;
                        for (qi, pvi) in q.iter_mut().zip(&lat.perp[k - rank]) {
                            *qi += t * pvi;
                        }
                    }
                }
                q
            };
            // basis points for this fiber: |q + γ| ≤ truncation
            let keep: Vec<usize> = points
                .iter()
                .enumerate()
                .filter(|(_, (_, p))| {
                    let n: f64 = p
                        .iter()
                        .zip(&q)
                        .map(|(a, b)| (a + b) * (a + b))
                        .sum::<f64>()
                        .sqrt();
                    n <= opts.truncation
                })
                .map(|(i, _)| i)
                .collect();
            let n = keep.len();
            let index_of: std::collections::HashMap<&[i64], usize> = keep
                .iter()
                .enumerate()
                .map(|(row, &i)| (points[i].0.as_slice(), row))
                .collect();
            // bandwidth from actual offsets
            let mut bw = 0usize;
            let mut pairs: Vec<(usize, usize, Complex64)> = Vec::new();
            for (row, &i) in keep.iter().enumerate() {
                let (ci, p) = &points[i];
                
                for (oc, _) in &offsets {
                    let target: Vec<i64> = ci.iter().zip(oc).map(|(a, b)| a + b).collect();
                    if let Some(&row2) = index_of.get(target.as_slice()) {
                        if row2 > row {
                            // entry (row, row2) = b̂(γ_{row2} − γ_row, q + γ_row)
                            let theta: Vec<f64> = points[keep[row2]]
                                .1
                                .iter()
                                .zip(p)
                                .map(|(a, b)| a - b)
                                .collect();
                            // Hermitian upper part: ⟨row|H|row2⟩ = b̂(θ, q+γ_row2)
                            // wait: entry (γ′, γ) = b̂(γ′−γ, q+γ); upper = (row, row2):
                            // γ′ = γ_row, γ = γ_row2, θ = γ_row − γ_row2
                            let theta_up: Vec<f64> = theta.iter().map(|x| -x).collect();
                            let col2: Vec<f64> = points[keep[row2]]
                                .1
                                .iter()
                                .zip(&q)
                                .map(|(a, b)| a + b)
                                .collect();
                            let v = b.fourier_coeff(
                                &theta_up,
                                &RayPoint::<Complex64>::real(&col2),
                            );
                            if v.norm() > 0.0 {
                                pairs.push((row, row2, v));
                                bw = bw.max(row2 - row);
                            }
                        }
                    }
                }
            }
            let mut mat = BandedHermitian::new(n, bw);
            for (row, &i) in keep.iter().enumerate() {
                let p = &points[i].1;
                let n2: f64 = p.iter().zip(&q).map(|(a, b)| (a + b) * (a + b)).sum();
                let mut diag = Complex64::new(n2.powf(w), 0.0);
                // on-diagonal Fourier coefficient
                let col: Vec<f64> = p.iter().zip(&q).map(|(a, b)| a + b).collect();
                diag += b.fourier_coeff(&vec![0.0; d], &RayPoint::<Complex64>::real(&col));
                mat.set(row, 0, diag);
            }
            for (r, c, v) in pairs {
                mat.set(r, c - r, v);
            }
            Ok(lambdas.iter().map(|&l| mat.count_below(l)).collect())
        })
        .collect();
    let counts = counts?;

    let cell_fibers = (g as f64).powi(rank as i32);
    let norm = (2.0 * std::f64::consts::PI).powi(d as i32);
    let points_out: Vec<crate::ids::IdsPoint> = lambdas
        .iter()
        .enumerate()
        .map(|(li, &l)| {
            let total: f64 = counts.iter().map(|c| c[li] as f64).sum();
            crate::ids::IdsPoint {
                lambda: l,
                n: lat.cell_volume * perp_weight * total / cell_fibers / norm,
                // grid resolution heuristic: one boundary layer of cells
                err_estimate: lat.cell_volume
                    * (l.powf(1.0 / two_w).powi(d as i32 - 1) / g as f64)
                    / norm,
            }
        })
        .collect();
    Ok(crate::ids::IdsResult {
        points: points_out,
        method: "floquet-oracle".into(),
        monotonicity_tol: 1e-8,
    })
}

fn margin_of(lat: &DualLattice) -> f64 {
    lat.basis
        .iter()
        .map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt())
        .fold(0.0f64, f64::max)
}

fn solve_integer_coeffs(basis: &[Vec<f64>], target: &[f64]) -> Option<Vec<i64>> {
    // normal equations BᵀB c = Bᵀ t (exact for t in the lattice span)
    let m = basis.len();
    let gram = nalgebra::DMatrix::from_fn(m, m, |i, j| {
        basis[i].iter().zip(&basis[j]).map(|(a, b)| a * b).sum::<f64>()
    });
    let rhs = nalgebra::DVector::from_fn(m, |i, _| {
        basis[i].iter().zip(target).map(|(a, b)| a * b).sum::<f64>()
    });
    let sol = gram.lu().solve(&rhs)?;
    let mut out = Vec::with_capacity(m);
    for v in sol.iter() {
        let r = v.round();
        if (v - r).abs() > 1e-6 {
            return None;
        }
        out.push(r as i64);
    }
    // confirm the reconstruction (rejects targets off the span)
    let mut rec = vec![0.0; target.len()];
    for (c, b) in out.iter().zip(basis) {
        for (ri, bi) in rec.iter_mut().zip(b) {
            *ri += *c as f64 * bi;
        }
    }
    let err: f64 = rec
        .iter()
        .zip(target)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    (err < 1e-6).then_some(out)
}

/// Plateau detection on a computed N(λ) curve: the widest interval over
/// which N stays constant (within `flat_tol`).
pub fn widest_plateau(points: &[crate::ids::IdsPoint], flat_tol: f64) -> (f64, f64, f64) {
    let mut best = (0.0, 0.0, 0.0);
    let mut start = 0usize;
    for i in 1..points.len() {
        if (points[i].n - points[start].n).abs() > flat_tol {
            start = i;
        }
        let width = points[i].lambda - points[start].lambda;
        if width > best.0 {
            best = (width, points[start].lambda, points[i].lambda);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::{Frequency, FrequencySet, RadialTerm, Symbol};
    use num_rational::Rational64;

    fn cos_potential_1d(amplitude: f64) -> Symbol {
        let q = |n: i64| Rational64::new(n, 1);
        let freqs = FrequencySet::new(
            1,
            vec![
                Frequency::rational(vec![q(0)]),
                Frequency::rational(vec![q(1)]),
                Frequency::rational(vec![q(-1)]),
            ],
        )
        .unwrap();
        let p = freqs.find(&[1.0]).unwrap();
        let m = freqs.find(&[-1.0]).unwrap();
        let half = Complex64::new(amplitude / 2.0, 0.0);
        Symbol::radial_classical(
            freqs,
            vec![RadialTerm {
                iota: 0.0,
                coeffs: vec![(p, vec![0], half), (m, vec![0], half)],
            }],
            4.0,
            0.0,
            true,
        )
    }

    fn zero_potential_on_lattice(d: usize) -> Symbol {
        let q = |n: i64| Rational64::new(n, 1);
        let mut elems = vec![Frequency::rational(vec![q(0); d])];
        for ax in 0..d {
            for s in [1i64, -1] {
                let mut v = vec![q(0); d];
                v[ax] = q(s);
                elems.push(Frequency::rational(v));
            }
        }
        let freqs = FrequencySet::new(d, elems).unwrap();
        // zero coefficients: free operator but with a genuine lattice
        Symbol::radial_classical(freqs, vec![], 4.0, 0.0, true)
    }

    #[test]
    fn lattice_detection() {
        let b = cos_potential_1d(2.0);
        let lat = dual_lattice(b.freq_set()).unwrap();
        assert_eq!(lat.d, 1);
        assert!((lat.cell_volume - 1.0).abs() < 1e-12);

        // frequencies 1 and 1/3 generate the lattice (1/3)Z
        let q = |n: i64, den: i64| Rational64::new(n, den);
        let freqs = FrequencySet::new(
            1,
            vec![
                Frequency::rational(vec![q(0, 1)]),
                Frequency::rational(vec![q(1, 1)]),
                Frequency::rational(vec![q(-1, 1)]),
                Frequency::rational(vec![q(1, 3)]),
                Frequency::rational(vec![q(-1, 3)]),
            ],
        )
        .unwrap();
        let lat = dual_lattice(&freqs).unwrap();
        assert!((lat.cell_volume - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn oracle_rejects_float_frequencies_and_thin_truncation() {
        let b = crate::symbol::cosine_symbol(1, 0, 2.0, 4.0);
        let opts = OracleOpts {
            truncation: 100.0,
            bz_grid: 16,
        };
        assert!(matches!(
            ids_oracle_floquet(&b, 1.0, &[10.0], &opts),
            Err(CoreError::RationalsMissing(_))
        ));
        let b = cos_potential_1d(2.0);
        let opts = OracleOpts {
            truncation: 5.0,
            bz_grid: 16,
        };
        assert!(ids_oracle_floquet(&b, 1.0, &[25.0], &opts).is_err());
    }

    #[test]
    fn free_1d_ids() {
        // N(λ) = √λ/π; at λ = π² exactly 1
        let b = zero_potential_on_lattice(1);
        let lam = std::f64::consts::PI * std::f64::consts::PI;
        let opts = OracleOpts {
            truncation: 3.5 * lam.sqrt(),
            bz_grid: 256,
        };
        let res = ids_oracle_floquet(&b, 1.0, &[lam], &opts).unwrap();
        let expect = lam.sqrt() / std::f64::consts::PI;
        assert!(
            (res.points[0].n - expect).abs() < 0.01,
            "{} vs {expect}",
            res.points[0].n
        );
    }

    #[test]
    fn free_2d_ids() {
        // N(100) = 25/π within 1% on a 64² grid
        let b = zero_potential_on_lattice(2);
        let opts = OracleOpts {
            truncation: 31.0,
            bz_grid: 64,
        };
        let res = ids_oracle_floquet(&b, 1.0, &[100.0], &opts).unwrap();
        let expect = 25.0 / std::f64::consts::PI;
        assert!(
            (res.points[0].n - expect).abs() < 0.01 * expect,
            "{} vs {expect}",
            res.points[0].n
        );
    }

    #[test]
    fn mathieu_first_gap_plateau() {
        // −d²/dx² + 2cos x has its first spectral gap near λ ≈ 1: N is
        // constant on an interval of width > 0.1 inside [0.5, 1.5].
        let b = cos_potential_1d(2.0);
        let lambdas: Vec<f64> = (0..200).map(|i| 0.5 + i as f64 * 0.005).collect();
        let opts = OracleOpts {
            truncation: 3.0 * 1.5f64.powf(0.5).max(2.0) + 6.0,
            bz_grid: 512,
        };
        let res = ids_oracle_floquet(&b, 1.0, &lambdas, &opts).unwrap();
        res.check_monotone().unwrap();
        let (width, lo, hi) = widest_plateau(&res.points, 1e-9);
        assert!(
            width > 0.1,
            "first gap plateau too narrow: {width} on [{lo}, {hi}]"
        );
    }

    #[test]
    fn hermitian_band_counting_matches_dense() {
        // random small banded Hermitian vs nalgebra eigenvalues
        use crate::numeric::SplitMix64;
        let mut rng = SplitMix64::new(0xabc);
        for _ in 0..20 {
            let n = 2 + (rng.next_u64() % 14) as usize;
            let bw = 1 + (rng.next_u64() % 3) as usize;
            let mut band = BandedHermitian::new(n, bw);
            let mut dense = nalgebra::DMatrix::<Complex64>::zeros(n, n);
            for j in 0..n {
                let d = rng.range(-2.0, 2.0);
                band.set(j, 0, Complex64::new(d, 0.0));
                dense[(j, j)] = Complex64::new(d, 0.0);
                for k in 1..=bw.min(n - 1 - j) {
                    let v = Complex64::new(rng.range(-1.0, 1.0), rng.range(-1.0, 1.0));
                    band.set(j, k, v);
                    dense[(j, j + k)] = v;
                    dense[(j + k, j)] = v.conj();
                }
            }
            let mut evs: Vec<f64> = dense
                .symmetric_eigen()
                .eigenvalues
                .iter()
                .copied()
                .collect();
            evs.sort_by(f64::total_cmp);
            for &shift in &[-3.0, -1.0, 0.0, 0.7, 2.5] {
                let expect = evs.iter().filter(|&&e| e < shift).count();
                assert_eq!(band.count_below(shift), expect, "shift {shift}");
            }
        }
    }
}
