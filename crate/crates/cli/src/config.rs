//! Run configuration: a single TOML file describing the operator, the
//! scale parameters and per-command options.
//!
//! Frequencies accept exact rationals ("1/3") or decimals ("0.25") per
//! coordinate; rational forms are kept whenever every coordinate of every
//! frequency parses exactly, which the lattice-exact checks require.

use apids_core::scale::ScaleParams;
use apids_core::symbol::{build_symbol, Frequency, FrequencySet, OperatorSpec, RadialTerm, Symbol};
use num_complex::Complex64;
use num_rational::Rational64;
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("config read error: {0}")]
    Io(#[from] std::io::Error),
    #[error("config invalid: {0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] apids_core::CoreError),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub operator: OperatorSection,
    #[serde(default)]
    pub scales: ScalesSection,
    #[serde(default)]
    pub ids: IdsSection,
    #[serde(default)]
    pub fit: FitSection,
    #[serde(default)]
    pub validate: ValidateSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSection {
    pub d: usize,
    pub w: f64,
    #[serde(default)]
    pub kappa: f64,
    /// Each frequency: coordinates as strings ("p/q" or decimal).
    pub frequencies: Vec<Vec<String>>,
    #[serde(default)]
    pub terms: Vec<TermSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSection {
    pub iota: f64,
    pub entries: Vec<EntrySection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntrySection {
    /// Frequency this coefficient attaches to (same syntax as above).
    pub theta: Vec<String>,
    /// Direction monomial exponents τ (defaults to all zeros).
    #[serde(default)]
    pub tau: Vec<u32>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalesSection {
    pub rho_n: Option<f64>,
    pub beta: Option<f64>,
    pub alphas: Option<Vec<f64>>,
    pub theta_upper: Option<f64>,
    pub sigma: Option<f64>,
    pub c0: Option<f64>,
    pub r0: Option<f64>,
    pub k: Option<u32>,
    pub k_tilde: Option<u32>,
    pub m_order: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdsSection {
    /// Explicit ascending λ grid…
    #[serde(default)]
    pub lambdas: Vec<f64>,
    /// …or a (ρ_lo, ρ_hi, count) geometric grid in ρ units of ρ_n.
    pub rho_window: Option<[f64; 2]>,
    #[serde(default = "default_grid_count")]
    pub grid_count: usize,
    /// Engines: any of "gauge", "oracle", "free".
    #[serde(default = "default_engines")]
    pub engines: Vec<String>,
    #[serde(default = "default_nodes")]
    pub nodes: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_bz_grid")]
    pub bz_grid: usize,
    /// 0 → automatic 3·λ_max^{1/2w}.
    #[serde(default)]
    pub truncation: f64,
    #[serde(default = "default_tau_tol")]
    pub tau_rel_tol: f64,
}

fn default_grid_count() -> usize {
    20
}
fn default_engines() -> Vec<String> {
    vec!["gauge".into()]
}
fn default_nodes() -> usize {
    1 << 14
}
fn default_seed() -> u64 {
    0x1d05
}
fn default_bz_grid() -> usize {
    32
}
fn default_tau_tol() -> f64 {
    1e-10
}

impl Default for IdsSection {
    fn default() -> Self {
        IdsSection {
            lambdas: vec![],
            rho_window: None,
            grid_count: default_grid_count(),
            engines: default_engines(),
            nodes: default_nodes(),
            seed: default_seed(),
            bz_grid: default_bz_grid(),
            truncation: 0.0,
            tau_rel_tol: default_tau_tol(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSection {
    #[serde(default = "default_h_max")]
    pub h_max: u32,
    #[serde(default = "default_j_max")]
    pub j_max: u32,
    pub q_max: Option<u32>,
    /// ρ window restriction for the samples (defaults to everything).
    pub window: Option<[f64; 2]>,
    /// Input CSV (defaults to <out>/ids.csv).
    pub input: Option<String>,
    /// Restrict the fit to rows with this method tag.
    pub method: Option<String>,
}

fn default_h_max() -> u32 {
    1
}
fn default_j_max() -> u32 {
    3
}

impl Default for FitSection {
    fn default() -> Self {
        FitSection {
            h_max: default_h_max(),
            j_max: default_j_max(),
            q_max: None,
            window: None,
            input: None,
            method: None,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateSection {
    #[serde(default = "default_ka_kmax")]
    pub condition_a_kmax: u32,
    #[serde(default = "default_cap")]
    pub cap: usize,
}

fn default_ka_kmax() -> u32 {
    2
}
fn default_cap() -> usize {
    100_000
}

impl Default for ValidateSection {
    fn default() -> Self {
        ValidateSection {
            condition_a_kmax: default_ka_kmax(),
            cap: default_cap(),
        }
    }
}

/// Parsed, semantically valid configuration.
pub struct RunConfig {
    pub raw: RawConfig,
    pub scales: ScaleParams,
    pub symbol: Symbol,
    pub freqs: FrequencySet,
}

fn parse_coord(s: &str) -> Result<(f64, Option<Rational64>), ConfigError> {
    let t = s.trim();
    if let Some((num, den)) = t.split_once('/') {
        let n: i64 = num
            .trim()
            .parse()
            .map_err(|_| ConfigError::Invalid(format!("bad rational numerator in {s:?}")))?;
        let d: i64 = den
            .trim()
            .parse()
            .map_err(|_| ConfigError::Invalid(format!("bad rational denominator in {s:?}")))?;
        if d == 0 {
            return Err(ConfigError::Invalid(format!("zero denominator in {s:?}")));
        }
        let q = Rational64::new(n, d);
        return Ok((*q.numer() as f64 / *q.denom() as f64, Some(q)));
    }
    let f: f64 = t
        .parse()
        .map_err(|_| ConfigError::Invalid(format!("bad coordinate {s:?}")))?;
    // integers and exact halves etc. stay exact when written as decimals
    let q = if f.fract() == 0.0 && f.abs() < 1e15 {
        Some(Rational64::new(f as i64, 1))
    } else {
        None
    };
    Ok((f, q))
}

fn parse_frequency(coords: &[String], d: usize) -> Result<Frequency, ConfigError> {
    if coords.len() != d {
        return Err(ConfigError::Invalid(format!(
            "frequency {coords:?} has {} coordinates, expected {d}",
            coords.len()
        )));
    }
    let mut floats = Vec::with_capacity(d);
    let mut rats = Vec::with_capacity(d);
    let mut all_rational = true;
    for c in coords {
        let (f, q) = parse_coord(c)?;
        floats.push(f);
        match q {
            Some(q) => rats.push(q),
            None => all_rational = false,
        }
    }
    Ok(if all_rational {
        Frequency::with_rational(floats, rats).map_err(ConfigError::Core)?
    } else {
        Frequency::new(floats)
    })
}

impl RunConfig {
    pub fn from_str_strict(text: &str) -> Result<RunConfig, ConfigError> {
        let raw: RawConfig = toml::from_str(text)?;
        Self::assemble(raw, true)
    }

    /// Lenient load for `validate`: structural parse only, the parameter
    /// chain becomes a reported check instead of a load error.
    pub fn from_str_lenient(text: &str) -> Result<RunConfig, ConfigError> {
        let raw: RawConfig = toml::from_str(text)?;
        Self::assemble(raw, false)
    }

    pub fn load(path: &std::path::Path, strict: bool) -> Result<RunConfig, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        let raw: RawConfig = toml::from_str(&text)?;
        Self::assemble(raw, strict)
    }

    fn assemble(raw: RawConfig, strict: bool) -> Result<RunConfig, ConfigError> {
        let d = raw.operator.d;
        let freqs_vec: Result<Vec<Frequency>, ConfigError> = raw
            .operator
            .frequencies
            .iter()
            .map(|c| parse_frequency(c, d))
            .collect();
        let freqs = FrequencySet::new(d, freqs_vec?).map_err(ConfigError::Core)?;

        let mut sp = ScaleParams::defaults(
            d,
            raw.operator.w,
            raw.operator.kappa,
            raw.scales.rho_n.unwrap_or(200.0),
        );
        let s = &raw.scales;
        if let Some(v) = s.beta {
            sp.beta = v;
        }
        if let Some(v) = &s.alphas {
            sp.alphas = v.clone();
        }
        if let Some(v) = s.theta_upper {
            sp.theta_upper = v;
        }
        if let Some(v) = s.sigma {
            sp.sigma = v;
        }
        sp.c0 = s.c0.unwrap_or_else(|| {
            let m = freqs.max_norm();
            if m > 0.0 {
                4.0 * m
            } else {
                4.0
            }
        });
        if let Some(v) = s.r0 {
            sp.r0 = v;
        }
        if let Some(v) = s.k {
            sp.k = v;
        }
        if let Some(v) = s.k_tilde {
            sp.k_tilde = v;
        }
        if let Some(v) = s.m_order {
            sp.m_order = v;
        }
        if strict {
            sp.validate().map_err(ConfigError::Core)?;
        }

        let mut terms = Vec::new();
        for t in &raw.operator.terms {
            let mut coeffs = Vec::new();
            for e in &t.entries {
                let f = parse_frequency(&e.theta, d)?;
                let idx = freqs.find(&f.coords).ok_or_else(|| {
                    ConfigError::Invalid(format!(
                        "term coefficient at {:?} references a frequency outside the set",
                        e.theta
                    ))
                })?;
                let mut tau = e.tau.clone();
                if tau.is_empty() {
                    tau = vec![0; d];
                }
                if tau.len() != d {
                    return Err(ConfigError::Invalid(format!(
                        "tau {:?} has wrong arity (need {d})",
                        e.tau
                    )));
                }
                coeffs.push((idx, tau, Complex64::new(e.re, e.im)));
            }
            terms.push(RadialTerm {
                iota: t.iota,
                coeffs,
            });
        }
        let spec = OperatorSpec {
            d,
            freqs: freqs.clone(),
            terms,
            kappa: raw.operator.kappa,
            c0: sp.c0,
            require_span: false,
        };
        let symbol = build_symbol(&spec).map_err(ConfigError::Core)?;
        if strict {
            let defect = symbol.check_symmetry(64, 8.0 * sp.rho_n, 0x5e1f);
            if defect > 1e-10 {
                return Err(ConfigError::Invalid(format!(
                    "operator symbol violates the self-adjointness symmetry: defect {defect:.3e}"
                )));
            }
        }
        Ok(RunConfig {
            raw,
            scales: sp,
            symbol,
            freqs,
        })
    }

    /// The λ grid: explicit list, or geometric in ρ over the window.
    pub fn lambda_grid(&self) -> Result<Vec<f64>, ConfigError> {
        if !self.raw.ids.lambdas.is_empty() {
            let l = self.raw.ids.lambdas.clone();
            for w in l.windows(2) {
                if w[1] <= w[0] {
                    return Err(ConfigError::Invalid(
                        "lambda grid must be strictly ascending".into(),
                    ));
                }
            }
            return Ok(l);
        }
        let [lo, hi] = self.raw.ids.rho_window.unwrap_or([1.0, 4.0]);
        let n = self.raw.ids.grid_count.max(2);
        let tw = 2.0 * self.scales.w;
        Ok((0..n)
            .map(|i| {
                let rho =
                    self.scales.rho_n * lo * (hi / lo).powf(i as f64 / (n - 1) as f64);
                rho.powf(tw)
            })
            .collect())
    }
}
