//! Spectral toolkit for almost-periodic pseudo-differential operators
//! H = (−Δ)^w + B at desk scale.
//!
//! The crate provides, bottom to top:
//!
//! - [`symbol`]: finite-frequency almost-periodic symbols and their
//!   calculus (products, commutators, finite differences, norms);
//! - [`cutoff`]: the smooth cut-off family and the five-way partition of
//!   a perturbation;
//! - [`gauge`]: the order-by-order gauge transform that removes the
//!   non-resonant part of the perturbation;
//! - [`regions`]: resonance-region geometry, congruence classes and the
//!   checkable frequency conditions;
//! - [`charts`]: shifted cylindrical coordinates on the components of
//!   each resonance region;
//! - [`blocks`] / [`contour`]: finite invariant blocks, their spectra,
//!   and the contour-integral power sums;
//! - [`ids`]: the integrated density of states via sub-level volumes;
//! - [`floquet`]: a brute-force Floquet–Bloch counting oracle for
//!   periodic coefficients;
//! - [`fit`]: least-squares fitting of N(ρ^{2w}) in a ρ^γ ln^q ρ basis.

pub mod blocks;
pub mod charts;
pub mod contour;
pub mod cutoff;
pub mod error;
pub mod fit;
pub mod floquet;
pub mod gauge;
pub mod ids;
pub mod norms;
pub mod numeric;
pub mod regions;
pub mod scale;
pub mod symbol;

pub use error::CoreError;
pub use scale::ScaleParams;
pub use symbol::{build_symbol, Frequency, FrequencySet, OperatorSpec, RadialTerm, Symbol};

/// Volume of the unit ball in R^d.
pub fn unit_ball_volume(d: usize) -> f64 {
    // π^{d/2}/Γ(d/2+1) via the two-step recurrence ω_d = 2π ω_{d−2}/d
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI * unit_ball_volume(d - 2) / d as f64,
    }
}
