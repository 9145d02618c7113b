//! Deterministic emission of the fixed CSV and JSON formats.
//!
//! Floats print through Rust's shortest round-trip formatting, so a fixed
//! configuration and seed reproduce byte-identical files.

use apids_core::fit::ExpansionFit;
use apids_core::ids::IdsResult;
use std::io::Write;
use std::path::Path;

/// ids.csv: lambda,n,method,err_estimate[,discrepancy].
///
/// When both spectral engines ran, every row carries the per-λ absolute
/// discrepancy |N_gauge − N_oracle|.
pub fn write_ids_csv(
    path: &Path,
    results: &[IdsResult],
    discrepancy: Option<&[f64]>,
) -> std::io::Result<()> {
    let mut f = std::fs::File::create(path)?;
    if discrepancy.is_some() {
        writeln!(f, "lambda,n,method,err_estimate,discrepancy")?;
    } else {
        writeln!(f, "lambda,n,method,err_estimate")?;
    }
    for res in results {
        for (i, p) in res.points.iter().enumerate() {
            match discrepancy {
                Some(d) => writeln!(
                    f,
                    "{},{},{},{},{}",
                    p.lambda, p.n, res.method, p.err_estimate, d[i]
                )?,
                None => writeln!(f, "{},{},{},{}", p.lambda, p.n, res.method, p.err_estimate)?,
            }
        }
    }
    Ok(())
}

/// Parse an ids.csv back into (lambda, n, method) rows.
pub fn read_ids_csv(path: &Path) -> std::io::Result<Vec<(f64, f64, String)>> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 || line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() < 4 {
            return Err(std::io::Error::new(
                std::io::ErrorKind::InvalidData,
                format!("bad CSV row: {line}"),
            ));
        }
        let l: f64 = cols[0].parse().map_err(|e| {
            std::io::Error::new(std::io::ErrorKind::InvalidData, format!("{e}"))
        })?;
        let n: f64 = cols[1].parse().map_err(|e| {
            std::io::Error::new(std::io::ErrorKind::InvalidData, format!("{e}"))
        })?;
        out.push((l, n, cols[2].to_string()));
    }
    Ok(out)
}

/// fit.json with the fixed schema
/// {basis: [[gamma, q]…], coeffs, stderrs, residual, cond, window}.
pub fn write_fit_json(path: &Path, fit: &ExpansionFit) -> std::io::Result<()> {
    #[derive(serde::Serialize)]
    struct FitJson<'a> {
        basis: Vec<(f64, u32)>,
        coeffs: &'a [f64],
        stderrs: &'a [f64],
        residual: f64,
        cond: f64,
        window: (f64, f64),
    }
    let j = FitJson {
        basis: fit.basis.iter().map(|t| (t.gamma, t.q)).collect(),
        coeffs: &fit.coeffs,
        stderrs: &fit.stderrs,
        residual: fit.residual,
        cond: fit.cond,
        window: fit.window,
    };
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "{}", serde_json::to_string_pretty(&j)?)?;
    Ok(())
}

/// gauge_residuals.csv: level,residual,symmetry_defect.
pub fn write_gauge_csv(
    path: &Path,
    rows: &[(usize, f64, f64)],
    support_max: f64,
) -> std::io::Result<()> {
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "level,residual,symmetry_defect")?;
    for (l, r, s) in rows {
        writeln!(f, "{l},{r},{s}")?;
    }
    writeln!(f, "# support_check_max,{support_max}")?;
    Ok(())
}
