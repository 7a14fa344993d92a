use std::io::Write;

use super::run::{ConvergenceTable, RunReport};
use crate::error::Result;

const AXES: [&str; 3] = ["x", "y", "z"];
const COMPONENTS: [&str; 3] = ["u", "v", "w"];

pub fn csv_header(rank: usize) -> String {
    let mut cols: Vec<String> = AXES[..rank].iter().map(|s| s.to_string()).collect();
    cols.push("t".into());
    cols.extend(COMPONENTS[..rank].iter().map(|c| format!("{c}_num")));
    cols.extend(COMPONENTS[..rank].iter().map(|c| format!("{c}_ref")));
    cols.push("abs_err".into());
    cols.push("oracle".into());
    cols.join(",")
}

/// Table rows in node order within each sample time.
pub fn write_csv<W: Write>(mut w: W, report: &RunReport) -> Result<()> {
    writeln!(w, "{}", csv_header(report.config.rank()))?;
    for row in &report.rows {
        let mut fields: Vec<String> = row.point.iter().map(|x| format!("{x:.16e}")).collect();
        fields.push(format!("{:.16e}", row.t));
        fields.extend(row.numeric.iter().map(|v| format!("{v:.16e}")));
        fields.extend(row.reference.iter().map(|v| format!("{v:.16e}")));
        fields.push(format!("{:.16e}", row.abs_err));
        fields.push(row.oracle.as_str().into());
        writeln!(w, "{}", fields.join(","))?;
    }
    Ok(())
}

pub fn write_summary<W: Write>(mut w: W, report: &RunReport) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, report)?;
    writeln!(w)?;
    Ok(())
}

pub fn write_convergence_csv<W: Write>(mut w: W, table: &ConvergenceTable) -> Result<()> {
    writeln!(w, "n,h,linf_u,linf,l2,order,floor")?;
    for r in &table.rows {
        let order = r.order.map_or(String::new(), |o| format!("{o:.6}"));
        writeln!(
            w,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{},{}",
            r.n, r.h, r.linf_u, r.linf, r.l2, order, r.floor
        )?;
    }
    Ok(())
}

/// One line per sample: time, velocity errors and the smallest potential value.
pub fn format_report(report: &RunReport) -> String {
    let mut s = format!(
        "example {} (omega = {}, n = {:?}, tau = {}, oracle {})\n",
        report.config.example_id,
        report.config.omega(),
        report.config.n,
        report.config.tau,
        report.oracle.as_str()
    );
    for sample in &report.samples {
        // runs without a potential (the plain heat problem) leave phi_min as NaN
        let phi_min = if sample.phi_min.is_nan() {
            "-".to_string()
        } else {
            format!("{:.3e}", sample.phi_min)
        };
        s += &format!(
            "  t = {:<6} linf = {:.3e}  l2 = {:.3e}  phi_min = {phi_min}\n",
            sample.t, sample.combined.linf, sample.combined.l2
        );
    }
    for p in &report.probes {
        s += &format!(
            "  probe {:?} t = {}: err = {:.3e}\n",
            p.point, p.t, p.abs_err
        );
    }
    for a in &report.assertions {
        s += &format!(
            "  {} {}: {:.3e} <= {:.1e}\n",
            if a.passed { "PASS" } else { "FAIL" },
            a.name,
            a.value,
            a.limit
        );
    }
    s
}
