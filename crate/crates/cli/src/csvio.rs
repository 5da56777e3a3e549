//! CSV formats: radial profiles (r,value), continuation traces, scan tables.
//! All numbers carry 17 significant digits so equal runs emit equal bytes.

use std::fs;
use std::path::Path;

use resbratu_core::continuation::{ContinuationTrace, ScanRow};
use resbratu_core::grid::{RadialField, RadialGrid};

/// 17 significant digits, scientific.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write a radial profile as `r,value` rows, one per node.
pub fn write_profile(path: &Path, grid: &RadialGrid, field: &RadialField) -> std::io::Result<()> {
    let mut out = String::from("r,value\n");
    for (r, v) in grid.nodes().iter().zip(field.values()) {
        out.push_str(&sig17(*r));
        out.push(',');
        out.push_str(&sig17(*v));
        out.push('\n');
    }
    fs::write(path, out)
}

/// Read a `r,value` profile written for exactly this grid; the radii must
/// match the nodes to 1e-12.
pub fn read_profile(path: &Path, grid: &RadialGrid) -> Result<Vec<f64>, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read profile {}: {e}", path.display()))?;
    let mut values = Vec::with_capacity(grid.len());
    let mut radii = Vec::with_capacity(grid.len());
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let (Some(r_str), Some(v_str), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(format!(
                "{}:{}: expected two comma-separated columns",
                path.display(),
                lineno + 1
            ));
        };
        if lineno == 0 && r_str.trim() == "r" {
            continue;
        }
        let parse = |s: &str| -> Result<f64, String> {
            s.trim()
                .parse::<f64>()
                .map_err(|_| format!("{}:{}: cannot parse '{s}'", path.display(), lineno + 1))
        };
        radii.push(parse(r_str)?);
        values.push(parse(v_str)?);
    }
    if values.len() != grid.len() {
        return Err(format!(
            "profile {} has {} rows, grid expects {}",
            path.display(),
            values.len(),
            grid.len()
        ));
    }
    for (i, (&r, &node)) in radii.iter().zip(grid.nodes()).enumerate() {
        if (r - node).abs() > 1e-12 {
            return Err(format!(
                "profile {} row {} has r = {r}, grid node is {node}",
                path.display(),
                i + 1
            ));
        }
    }
    Ok(values)
}

/// Trace CSV: t, step, newton_iters, residual_norm, T, omega_norm,
/// sup_norm, exp_mass, identity_residual, peak_radius.
pub fn write_trace(path: &Path, trace: &ContinuationTrace) -> std::io::Result<()> {
    let mut out = String::from(
        "t,step,newton_iters,residual_norm,T,omega_norm,sup_norm,exp_mass,identity_residual,peak_radius\n",
    );
    for st in &trace.states {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            sig17(st.t),
            sig17(st.step),
            st.newton_iters,
            sig17(st.residual_norm),
            sig17(st.phi1_coeff),
            sig17(st.omega_norm),
            sig17(st.sup_norm),
            sig17(st.exp_mass),
            sig17(st.identity_residual),
            sig17(st.peak_radius),
        ));
    }
    fs::write(path, out)
}

/// Scan CSV: mass, verdict, sup_norm, exp_mass, peak_radius, steps.
pub fn write_scan(path: &Path, rows: &[ScanRow]) -> std::io::Result<()> {
    let mut out = String::from("mass,verdict,sup_norm,exp_mass,peak_radius,steps\n");
    for row in rows {
        let verdict = row.verdict.map(|v| v.as_str()).unwrap_or("rejected");
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            sig17(row.mass),
            verdict,
            sig17(row.sup_norm),
            sig17(row.exp_mass),
            sig17(row.peak_radius),
            row.steps,
        ));
    }
    fs::write(path, out)
}
