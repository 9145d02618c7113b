//! Complex scalar plumbing shared by the symbol calculus and the
//! contour machinery.
//!
//! Two scalar types flow through symbol evaluation:
//!
//! - [`Complex64`] for plain values,
//! - [`Jet`] for value + d/dz pairs, so that H₂′(z) comes out of the same
//!   evaluation pass by forward-mode differentiation of the entry formulas.
//!
//! Both implement [`Scalar`]. The helpers at the bottom ([`ln1p_c`],
//! [`expm1_c`], [`pow_diff`]) keep expressions like |ξ+θ|^{2w} − |ξ|^{2w}
//! accurate when the two powers nearly cancel.

use num_complex::Complex64;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Scalar for symbol evaluation: plain complex values or first-order jets.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_c(c: Complex64) -> Self;
    fn from_f(x: f64) -> Self;
    /// The payload value (derivative part dropped for jets).
    fn value(self) -> Complex64;
    /// Principal-branch power with a real exponent.
    fn powf(self, p: f64) -> Self;
    /// Integer power (exact for small exponents).
    fn powi(self, n: i32) -> Self;
    fn sqrt(self) -> Self;
    /// log(1 + self), accurate for small |self|.
    fn ln1p(self) -> Self;
    /// exp(self) − 1, accurate for small |self|.
    fn expm1(self) -> Self;

    fn zero() -> Self {
        Self::from_f(0.0)
    }
    fn one() -> Self {
        Self::from_f(1.0)
    }
    fn scale(self, x: f64) -> Self {
        self * Self::from_f(x)
    }
}

/// Stable complex log(1 + z).
pub fn ln1p_c(z: Complex64) -> Complex64 {
    // ln|1+z| = ln1p(2 Re z + |z|²) / 2 avoids cancellation for small z.
    let m = 2.0 * z.re + z.norm_sqr();
    let re = 0.5 * m.ln_1p();
    let im = z.im.atan2(1.0 + z.re);
    Complex64::new(re, im)
}

/// Stable complex exp(z) − 1.
pub fn expm1_c(z: Complex64) -> Complex64 {
    // expm1(x+iy) = expm1(x) cos y − 2 sin²(y/2) + i exp(x) sin y
    let ex = z.re.exp_m1();
    let s = (0.5 * z.im).sin();
    Complex64::new(ex * z.im.cos() - 2.0 * s * s, (z.re.exp()) * z.im.sin())
}

/// (y(1+δ))^w − y^w computed as y^w·expm1(w·ln1p(δ)).
///
/// Exact cancellation control for |δ| ≪ 1; falls back to the naive form
/// when δ is large.
pub fn pow_diff(y: Complex64, delta: Complex64, w: f64) -> Complex64 {
    if delta.norm() > 0.5 {
        return (y * (Complex64::new(1.0, 0.0) + delta)).powf(w) - y.powf(w);
    }
    y.powf(w) * expm1_c(ln1p_c(delta) * w)
}

impl Scalar for Complex64 {
    fn from_c(c: Complex64) -> Self {
        c
    }
    fn from_f(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn value(self) -> Complex64 {
        self
    }
    fn powf(self, p: f64) -> Self {
        num_complex::Complex::powf(self, p)
    }
    fn powi(self, n: i32) -> Self {
        num_complex::Complex::powi(&self, n)
    }
    fn sqrt(self) -> Self {
        num_complex::Complex::sqrt(self)
    }
    fn ln1p(self) -> Self {
        ln1p_c(self)
    }
    fn expm1(self) -> Self {
        expm1_c(self)
    }
}

/// First-order jet: value and derivative with respect to the radial
/// parameter z. Cut-off factors enter as constants (zero derivative),
/// matching their local constancy along the rays where blocks live.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub v: Complex64,
    pub d: Complex64,
}

impl Jet {
    pub fn constant(v: Complex64) -> Self {
        Jet {
            v,
            d: Complex64::new(0.0, 0.0),
        }
    }
    /// The evaluation variable itself: value z, derivative 1.
    pub fn variable(z: Complex64) -> Self {
        Jet {
            v: z,
            d: Complex64::new(1.0, 0.0),
        }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet {
            v: self.v + o.v,
            d: self.d + o.d,
        }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet {
            v: self.v - o.v,
            d: self.d - o.d,
        }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet {
            v: self.v * o.v,
            d: self.d * o.v + self.v * o.d,
        }
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        let v = self.v / o.v;
        Jet {
            v,
            d: (self.d - v * o.d) / o.v,
        }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet {
            v: -self.v,
            d: -self.d,
        }
    }
}

impl Scalar for Jet {
    fn from_c(c: Complex64) -> Self {
        Jet::constant(c)
    }
    fn from_f(x: f64) -> Self {
        Jet::constant(Complex64::new(x, 0.0))
    }
    fn value(self) -> Complex64 {
        self.v
    }
    fn powf(self, p: f64) -> Self {
        let v = self.v.powf(p);
        Jet {
            v,
            d: self.d * self.v.powf(p - 1.0) * p,
        }
    }
    fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Jet::from_f(1.0);
        }
        let v = self.v.powi(n);
        Jet {
            v,
            d: self.d * self.v.powi(n - 1) * f64::from(n),
        }
    }
    fn sqrt(self) -> Self {
        let v = self.v.sqrt();
        Jet {
            v,
            d: self.d / (v * 2.0),
        }
    }
    fn ln1p(self) -> Self {
        Jet {
            v: ln1p_c(self.v),
            d: self.d / (Complex64::new(1.0, 0.0) + self.v),
        }
    }
    fn expm1(self) -> Self {
        let e = expm1_c(self.v);
        Jet {
            v: e,
            d: self.d * (e + 1.0),
        }
    }
}

/// (y(1+δ))^w − y^w on jets.
pub fn pow_diff_s<S: Scalar>(y: S, delta: S, w: f64) -> S {
    if delta.value().norm() > 0.5 {
        return (y * (S::one() + delta)).powf(w) - y.powf(w);
    }
    y.powf(w) * (delta.ln1p().scale(w)).expm1()
}

/// Evaluation point ξ = base + z·dir with a complexified radial parameter.
///
/// `base` carries every real shift accumulated by products, commutators and
/// finite differences; `dir` is the (unit) ray direction, zero for plain
/// real points. The complexified squared modulus is
/// z² + 2z⟨base, dir⟩ + |base|², which agrees with |ξ|² for real z.
#[derive(Clone, Debug)]
pub struct RayPoint<S: Scalar> {
    pub base: Vec<f64>,
    pub dir: Vec<f64>,
    pub z: S,
}

impl<S: Scalar> RayPoint<S> {
    pub fn real(xi: &[f64]) -> Self {
        RayPoint {
            base: xi.to_vec(),
            dir: vec![0.0; xi.len()],
            z: S::zero(),
        }
    }

    pub fn on_ray(base: &[f64], dir: &[f64], z: S) -> Self {
        debug_assert_eq!(base.len(), dir.len());
        RayPoint {
            base: base.to_vec(),
            dir: dir.to_vec(),
            z,
        }
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    /// Shift by a real vector (frequency): ξ → ξ + η.
    pub fn shifted(&self, eta: &[f64]) -> Self {
        let mut base = self.base.clone();
        for (b, e) in base.iter_mut().zip(eta) {
            *b += e;
        }
        RayPoint {
            base,
            dir: self.dir.clone(),
            z: self.z,
        }
    }

    /// Complexified |ξ|².
    pub fn norm_sq(&self) -> S {
        let bb: f64 = self.base.iter().map(|b| b * b).sum();
        let bd: f64 = self.base.iter().zip(&self.dir).map(|(b, d)| b * d).sum();
        self.z * self.z + self.z.scale(2.0 * bd) + S::from_f(bb)
    }

    /// Complexified |ξ| (principal square root).
    pub fn norm(&self) -> S {
        self.norm_sq().sqrt()
    }

    /// Complexified |ξ + η|² − |ξ|², free of cancellation.
    pub fn shift_norm_sq_diff(&self, eta: &[f64]) -> S {
        let be: f64 = self.base.iter().zip(eta).map(|(b, e)| b * e).sum();
        let de: f64 = self.dir.iter().zip(eta).map(|(d, e)| d * e).sum();
        let ee: f64 = eta.iter().map(|e| e * e).sum();
        self.z.scale(2.0 * de) + S::from_f(2.0 * be + ee)
    }

    /// |ξ + η|^{2w} − |ξ|^{2w}, stable when the shift is small against |ξ|.
    pub fn free_symbol_diff(&self, eta: &[f64], two_w: f64) -> S {
        let y = self.norm_sq();
        let delta = self.shift_norm_sq_diff(eta) / y;
        pow_diff_s(y, delta, two_w / 2.0)
    }

    /// The real-part point, used for (locally constant) cut-off arguments.
    pub fn real_part(&self) -> Vec<f64> {
        let zr = self.z.value().re;
        self.base
            .iter()
            .zip(&self.dir)
            .map(|(b, d)| b + zr * d)
            .collect()
    }

    /// Coordinates of ξ as complexified scalars.
    pub fn coord(&self, i: usize) -> S {
        self.z.scale(self.dir[i]) + S::from_f(self.base[i])
    }
}

/// SplitMix64: the deterministic seed expander used by every randomized
/// routine in the crate.
#[derive(Clone, Debug)]
pub struct SplitMix64(pub u64);

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in [lo, hi).
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pow_diff_matches_naive_for_moderate_delta() {
        let y = Complex64::new(4.0e4, 1.0);
        let delta = Complex64::new(0.3, 0.05);
        let w = 1.5;
        let naive = (y * (Complex64::new(1.0, 0.0) + delta)).powf(w) - y.powf(w);
        let stable = pow_diff(y, delta, w);
        assert!((naive - stable).norm() < 1e-9 * naive.norm());
    }

    #[test]
    fn pow_diff_accurate_for_tiny_delta() {
        // y^w((1+δ)^w − 1) ≈ y^w·w·δ for tiny δ; the naive form loses most digits.
        let y = Complex64::new(1.0e8, 0.0);
        let delta = Complex64::new(1.0e-12, 0.0);
        let w = 1.5;
        let expected = y.powf(w) * delta * w;
        let stable = pow_diff(y, delta, w);
        assert!((stable - expected).norm() < 1e-10 * expected.norm());
    }

    #[test]
    fn jet_derivative_of_power() {
        // d/dz (z² + 3)^{1.5} = 1.5·(z²+3)^{0.5}·2z
        let z = Complex64::new(1.2, 0.3);
        let jz = Jet::variable(z);
        let f = (jz * jz + Jet::from_f(3.0)).powf(1.5);
        let expect = 1.5 * (z * z + 3.0).powf(0.5) * 2.0 * z;
        assert!((f.d - expect).norm() < 1e-12 * expect.norm());
    }

    #[test]
    fn ray_point_norm_matches_real_geometry() {
        let p = RayPoint::<Complex64>::on_ray(
            &[3.0, 4.0],
            &[0.6, 0.8],
            Complex64::new(2.0, 0.0),
        );
        // ξ = (3,4) + 2·(0.6,0.8) = (4.2, 5.6), |ξ| = 7
        assert!((p.norm().re - 7.0).abs() < 1e-12);
        let d = p.shift_norm_sq_diff(&[1.0, 0.0]);
        // |ξ+e₁|² − |ξ|² = 2ξ₁ + 1 = 9.4
        assert!((d.re - 9.4).abs() < 1e-12);
    }

    #[test]
    fn free_symbol_diff_matches_direct() {
        let p = RayPoint::<Complex64>::real(&[30.0, 40.0]);
        let d = p.free_symbol_diff(&[1.0, 2.0], 3.0);
        let direct = (31.0f64 * 31.0 + 42.0 * 42.0).powf(1.5) - 50.0f64.powf(3.0);
        assert!((d.re - direct).abs() < 1e-9 * direct.abs());
    }

    #[test]
    fn jet_through_free_symbol_diff() {
        // Derivative in z of |base + z·dir + η|^{2w} − |base + z·dir|^{2w}
        // checked against a central difference.
        let base = [5.0, 1.0];
        let dir = [1.0, 0.0];
        let eta = [0.5, 0.5];
        let two_w = 3.0;
        let z0 = 7.0;
        let f = |z: f64| {
            RayPoint::<Complex64>::on_ray(&base, &dir, Complex64::new(z, 0.0))
                .free_symbol_diff(&eta, two_w)
                .re
        };
        let h = 1e-5;
        let fd = (f(z0 + h) - f(z0 - h)) / (2.0 * h);
        let jet = RayPoint::<Jet>::on_ray(&base, &dir, Jet::variable(Complex64::new(z0, 0.0)))
            .free_symbol_diff(&eta, two_w);
        assert!((jet.d.re - fd).abs() < 1e-5 * fd.abs().max(1.0));
    }
}
