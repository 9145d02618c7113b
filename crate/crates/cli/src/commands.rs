//! Command implementations behind the CLI surface.
//!
//! Exit-code contract: 0 ok, 2 config error, 3 precondition failure,
//! 4 numerical non-convergence.

use crate::config::{ConfigError, RunConfig};
use crate::output;
use apids_core::charts::enumerate_all_charts;
use apids_core::cutoff::{partition_defect, partition_symbol, CutoffFamily};
use apids_core::fit::{expansion_basis, fit_expansion};
use apids_core::floquet::{ids_oracle_floquet, OracleOpts};
use apids_core::gauge::{gauge_recursion, w_support_check};
use apids_core::ids::{IdsEngine, IdsResult, QuadratureOpts};
use apids_core::norms::{symbol_norm, NormGrid};
use apids_core::numeric::SplitMix64;
use apids_core::regions::{
    check_condition_a, congruence_class, geometry_constants, sample_shell, RegionGeometry,
};
use apids_core::CoreError;
use std::path::Path;

#[derive(Debug)]
pub struct CliFailure {
    pub exit_code: i32,
    pub message: String,
}

impl std::fmt::Display for CliFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for CliFailure {}

impl From<ConfigError> for CliFailure {
    fn from(e: ConfigError) -> Self {
        CliFailure {
            exit_code: 2,
            message: format!("config error: {e}"),
        }
    }
}

impl From<CoreError> for CliFailure {
    fn from(e: CoreError) -> Self {
        let exit_code = match e {
            CoreError::NonConvergence(_) => 4,
            _ => 3,
        };
        CliFailure {
            exit_code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliFailure {
    fn from(e: std::io::Error) -> Self {
        CliFailure {
            exit_code: 2,
            message: format!("io error: {e}"),
        }
    }
}

pub type CliResult<T> = Result<T, CliFailure>;

/// One validation check with its outcome and witness text.
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            s.push_str(&format!(
                "{} {} — {}\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            ));
        }
        s
    }
}

/// Run every checkable condition and report witnesses.
pub fn cmd_validate(cfg: &RunConfig) -> CliResult<ValidationReport> {
    let mut checks = Vec::new();

    // parameter chain
    match cfg.scales.validate() {
        Ok(()) => checks.push(Check {
            name: "parameter-chain",
            pass: true,
            detail: format!(
                "max(1-w+kappa/2, 1/2) < beta={} < alphas={:?} < theta_upper={} < sigma={} < 1",
                cfg.scales.beta, cfg.scales.alphas, cfg.scales.theta_upper, cfg.scales.sigma
            ),
        }),
        Err(e) => checks.push(Check {
            name: "parameter-chain",
            pass: false,
            detail: e.to_string(),
        }),
    }

    // frequency set structure
    checks.push(Check {
        name: "frequency-set",
        pass: true,
        detail: format!(
            "{} frequencies, rank {} of d = {}",
            cfg.freqs.len(),
            cfg.freqs.rank(),
            cfg.scales.d
        ),
    });

    // symmetry of the operator symbol
    let defect = cfg
        .symbol
        .check_symmetry(64, 8.0 * cfg.scales.rho_n, 0x5e1f);
    checks.push(Check {
        name: "symbol-symmetry",
        pass: defect < 1e-10,
        detail: format!("max defect {defect:.3e}"),
    });

    // Condition A (needs exact rationals)
    match check_condition_a(&cfg.freqs, cfg.raw.validate.condition_a_kmax, cfg.raw.validate.cap) {
        Ok(rep) => checks.push(Check {
            name: "condition-A",
            pass: rep.pass,
            detail: format!(
                "{} subsets checked, {} dependent with integer relations",
                rep.checked_subsets, rep.dependent_subsets
            ),
        }),
        Err(e) => checks.push(Check {
            name: "condition-A",
            pass: false,
            detail: e.to_string(),
        }),
    }

    // geometry constants + Condition C thresholds
    if cfg.scales.validate().is_ok() {
        let theta_k = cfg
            .freqs
            .closure(cfg.scales.k_tilde, cfg.raw.validate.cap)
            .map_err(CliFailure::from)?;
        let geom = RegionGeometry::build(&theta_k, &cfg.scales, 10_000)?;
        let gc = geometry_constants(&geom);
        checks.push(Check {
            name: "condition-C",
            pass: gc.all_ok(),
            detail: format!(
                "s={:.4}{} (bound {:.4}), r={:.4} (bound {:.4}), card={} (bound {:.1})",
                gc.s_min,
                if gc.s_vacuous { " [vacuous]" } else { "" },
                gc.s_bound,
                gc.r_min,
                gc.r_bound,
                gc.card,
                gc.card_bound
            ),
        });
    }

    Ok(ValidationReport { checks })
}

/// Norm table, symmetry and partition diagnostics.
pub fn cmd_symbols(cfg: &RunConfig, refine: usize) -> CliResult<String> {
    let sp = &cfg.scales;
    let mut grid = NormGrid::standard(sp.rho_n);
    grid.refine = refine.max(1);
    let mut out = String::new();
    let alpha = sp.alpha_order();
    out.push_str("norm estimates (grid lower bounds):\n");
    for l in [0.0, 1.0, 2.0] {
        for s in [0usize, 1] {
            let n = symbol_norm(&cfg.symbol, alpha, l, s, sp.beta, &grid)?;
            out.push_str(&format!("  l={l} s={s}: {n:.6e}\n"));
        }
    }
    let defect = cfg.symbol.check_symmetry(128, 8.0 * sp.rho_n, 0xd1ce);
    out.push_str(&format!("symmetry defect: {defect:.3e}\n"));

    let cf = CutoffFamily::new(sp.clone());
    let split = partition_symbol(&cfg.symbol, &cf);
    let mut rng = SplitMix64::new(0x9d);
    let samples: Vec<Vec<f64>> = (0..128)
        .map(|_| sample_shell(sp.d, 1.0, 9.0 * sp.rho_n, &mut rng))
        .collect();
    let pd = partition_defect(&cfg.symbol, &split, &samples);
    out.push_str(&format!("five-way partition defect: {pd:.3e}\n"));
    Ok(out)
}

/// Gauge recursion: residual table, symmetry defects, support check.
pub fn cmd_gauge(cfg: &RunConfig, out_dir: &Path) -> CliResult<String> {
    let sp = &cfg.scales;
    if sp.k_tilde < 1 {
        return Err(CoreError::Precondition("k_tilde must be >= 1".into()).into());
    }
    let cf = CutoffFamily::new(sp.clone());
    let gr = gauge_recursion(&cfg.symbol, &cf)?;
    let scale = 5.0 * sp.rho_n;
    let rows: Vec<(usize, f64, f64)> = gr
        .residuals
        .iter()
        .enumerate()
        .map(|(i, r)| (i + 1, *r, gr.psi[i].check_symmetry(32, scale, 77 + i as u64)))
        .collect();

    let theta_k = cfg.freqs.closure(sp.k_tilde, 100_000)?;
    let geom = RegionGeometry::build(&theta_k, sp, 10_000)?;
    let opts = QuadratureOpts::default();
    let gens = geom.move_generators(None);
    let in_a = |xi: &[f64]| -> bool {
        congruence_class(xi, &gens, sp, opts.class_cap)
            .map(|cls| {
                cls.points.iter().any(|p| {
                    let r = p.iter().map(|x| x * x).sum::<f64>().sqrt();
                    (5.0 * sp.rho_n / 6.0..=5.0 * sp.rho_n).contains(&r)
                })
            })
            .unwrap_or(false)
    };
    let support_max = w_support_check(&gr, &geom, &in_a, 200, 0xa11);

    std::fs::create_dir_all(out_dir)?;
    output::write_gauge_csv(&out_dir.join("gauge_residuals.csv"), &rows, support_max)?;

    let mut s = String::new();
    s.push_str("level residual symmetry_defect\n");
    for (l, r, d) in &rows {
        s.push_str(&format!("{l} {r:.3e} {d:.3e}\n"));
    }
    s.push_str(&format!("support check max: {support_max:.3e}\n"));
    Ok(s)
}

/// Region geometry summary plus a classification/congruence sample sweep.
pub fn cmd_regions(cfg: &RunConfig, samples: usize) -> CliResult<String> {
    let sp = &cfg.scales;
    let theta_k = cfg.freqs.closure(sp.k_tilde, 100_000)?;
    let geom = RegionGeometry::build(&theta_k, sp, 10_000)?;
    let gc = geometry_constants(&geom);
    let (charts, excluded) = enumerate_all_charts(&geom)?;

    let mut counts = vec![0usize; sp.d + 1];
    let mut rng = SplitMix64::new(0xbe7a);
    let gens = geom.move_generators(None);
    let mut max_class = 0usize;
    for _ in 0..samples {
        let xi = sample_shell(sp.d, 2.0 * sp.rho_n / 3.0, 6.0 * sp.rho_n, &mut rng);
        let vi = geom.classify(&xi)?;
        counts[geom.subspaces[vi].dim] += 1;
        let cls = congruence_class(&xi, &gens, sp, 100_000)?;
        max_class = max_class.max(cls.len());
    }

    let mut s = String::new();
    s.push_str(&format!(
        "theta closure: {} frequencies; subspaces: {}\n",
        theta_k.len(),
        geom.subspaces.len()
    ));
    s.push_str(&format!(
        "s = {:.6}{}, r = {:.6}, R = {:.6}\n",
        gc.s_min,
        if gc.s_vacuous { " (vacuous)" } else { "" },
        gc.r_min,
        gc.r_max
    ));
    s.push_str(&format!(
        "condition C: s {} r {} card {}\n",
        if gc.s_ok { "ok" } else { "FAIL" },
        if gc.r_ok { "ok" } else { "FAIL" },
        if gc.card_ok { "ok" } else { "FAIL" }
    ));
    s.push_str(&format!(
        "charts: {} minimal components, {} excluded\n",
        charts.len(),
        excluded.len()
    ));
    for (dim, c) in counts.iter().enumerate() {
        if *c > 0 {
            s.push_str(&format!("  dim {dim}: {c} samples\n"));
        }
    }
    s.push_str(&format!("largest congruence class: {max_class}\n"));
    Ok(s)
}

/// IDS sweep over the configured λ grid with the configured engines.
pub fn cmd_ids(cfg: &RunConfig, out_dir: &Path) -> CliResult<String> {
    let sp = &cfg.scales;
    let lambdas = cfg.lambda_grid()?;
    let mut results: Vec<IdsResult> = Vec::new();
    let engines = &cfg.raw.ids.engines;

    for engine in engines {
        match engine.as_str() {
            "gauge" => {
                let opts = QuadratureOpts {
                    seed: cfg.raw.ids.seed,
                    nodes: cfg.raw.ids.nodes,
                    tau_rel_tol: cfg.raw.ids.tau_rel_tol,
                    class_cap: 100_000,
                };
                let eng = IdsEngine::build(&cfg.symbol, sp, opts)?;
                results.push(eng.sweep(&lambdas)?);
            }
            "oracle" => {
                let lambda_max = lambdas.iter().copied().fold(0.0f64, f64::max);
                let auto = 3.0 * lambda_max.powf(1.0 / (2.0 * sp.w));
                let opts = OracleOpts {
                    truncation: if cfg.raw.ids.truncation > 0.0 {
                        cfg.raw.ids.truncation
                    } else {
                        auto
                    },
                    bz_grid: cfg.raw.ids.bz_grid,
                };
                results.push(ids_oracle_floquet(&cfg.symbol, sp.w, &lambdas, &opts)?);
            }
            "free" => {
                results.push(IdsResult::free_closed_form(&lambdas, sp.d, sp.w));
            }
            other => {
                return Err(CliFailure {
                    exit_code: 2,
                    message: format!("unknown engine {other:?} (use gauge|oracle|free)"),
                })
            }
        }
    }

    let discrepancy: Option<Vec<f64>> = {
        let g = results.iter().find(|r| r.method == "gauge-volume");
        let o = results.iter().find(|r| r.method == "floquet-oracle");
        match (g, o) {
            (Some(g), Some(o)) => Some(
                g.points
                    .iter()
                    .zip(&o.points)
                    .map(|(a, b)| (a.n - b.n).abs())
                    .collect(),
            ),
            _ => None,
        }
    };

    std::fs::create_dir_all(out_dir)?;
    let path = out_dir.join("ids.csv");
    output::write_ids_csv(&path, &results, discrepancy.as_deref())?;

    let mut s = String::new();
    for r in &results {
        r.check_monotone()?;
        s.push_str(&format!(
            "{}: {} lambdas, N({}) = {:.6}\n",
            r.method,
            r.points.len(),
            r.points.last().unwrap().lambda,
            r.points.last().unwrap().n
        ));
    }
    s.push_str(&format!("wrote {}\n", path.display()));
    Ok(s)
}

/// Fit the expansion basis to a previously computed ids.csv.
pub fn cmd_fit(cfg: &RunConfig, out_dir: &Path) -> CliResult<String> {
    let sp = &cfg.scales;
    let input = cfg
        .raw
        .fit
        .input
        .clone()
        .unwrap_or_else(|| out_dir.join("ids.csv").to_string_lossy().into_owned());
    let rows = output::read_ids_csv(Path::new(&input))?;
    if rows.is_empty() {
        return Err(CliFailure {
            exit_code: 3,
            message: format!("no samples in {input}"),
        });
    }
    let method = cfg
        .raw
        .fit
        .method
        .clone()
        .unwrap_or_else(|| rows[0].2.clone());
    let tw = 2.0 * sp.w;
    let mut samples: Vec<(f64, f64)> = rows
        .iter()
        .filter(|(_, _, m)| *m == method)
        .map(|(l, n, _)| (l.powf(1.0 / tw), *n))
        .collect();
    if let Some([lo, hi]) = cfg.raw.fit.window {
        samples.retain(|(r, _)| (lo..=hi).contains(r));
        if samples.is_empty() {
            return Err(CliFailure {
                exit_code: 3,
                message: format!("fit window [{lo}, {hi}] excludes every sample"),
            });
        }
    }
    let mut iotas: Vec<f64> = cfg
        .raw
        .operator
        .terms
        .iter()
        .map(|t| t.iota)
        .collect();
    if iotas.is_empty() {
        iotas.push(0.0);
    }
    iotas.sort_by(f64::total_cmp);
    iotas.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let q_max = cfg
        .raw
        .fit
        .q_max
        .unwrap_or_else(|| sp.d.saturating_sub(1) as u32);
    let basis = expansion_basis(sp.d, sp.w, &iotas, cfg.raw.fit.h_max, cfg.raw.fit.j_max, q_max);
    let fit = fit_expansion(&samples, &basis)?;

    std::fs::create_dir_all(out_dir)?;
    let path = out_dir.join("fit.json");
    output::write_fit_json(&path, &fit)?;

    let mut s = String::new();
    s.push_str(&format!(
        "fitted {} samples ({} basis terms, cond {:.3e}, residual {:.3e})\n",
        samples.len(),
        fit.basis.len(),
        fit.cond,
        fit.residual
    ));
    let lead = fit.coeff(sp.d as f64, 0).unwrap_or(f64::NAN);
    s.push_str(&format!("leading coefficient (gamma=d, q=0): {lead:.8}\n"));
    s.push_str(&format!("wrote {}\n", path.display()));
    Ok(s)
}
