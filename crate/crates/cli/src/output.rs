//! CSV output: `#` metadata lines, then header and records through the
//! `csv` writer, probabilities with six significant digits. Nothing time-dependent is written unless asked for,
//! so the same inputs give the same bytes.

use std::io::Write;

use fasris_core::SystemParams;

use crate::config::SweepSpec;
use crate::sweep::{CeilingReport, Check, KsRow, Row, RowError};

/// `%g`-style rendering with six significant digits.
pub fn sig6(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{v:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: String| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if (-5..6).contains(&exp) {
        trim(format!("{v:.*}", (5 - exp) as usize))
    } else {
        format!("{}e{exp}", trim(mantissa.to_string()))
    }
}

/// Axis values: twelve significant digits, shortest form, so grid
/// arithmetic noise does not reach the file.
pub fn axis_value(v: f64) -> String {
    let rounded: f64 = format!("{v:.11e}").parse().unwrap_or(v);
    format!("{rounded}")
}

fn opt(v: Option<f64>) -> String {
    v.map(sig6).unwrap_or_default()
}

/// The parameter set in config-file syntax.
pub fn params_line(p: &SystemParams) -> String {
    let opt_u = |v: Option<u32>| v.map_or("none".to_string(), |b| b.to_string());
    let opt_f = |v: Option<f64>| v.map_or("none".to_string(), |k| k.to_string());
    format!(
        "P={}, a_C={}, a_E={}, rho2_C={}, rho2_E={}, sigma2={}, alpha={}, d_SR1={}, d_R1C={}, d_SR2={}, d_R2E={}, \
         eps1_C={}, eps2_C={}, eps1_E={}, eps2_E={}, M={}, L={}, W={}, N_c={}, N_e={}, m_block={}, delta={}, \
         zeta={}, b_quant={}, rician_K={}",
        p.p_mw,
        p.a_c,
        p.a_e,
        p.rho2_c,
        p.rho2_e,
        p.sigma2,
        p.alpha,
        p.d_sr1,
        p.d_r1c,
        p.d_sr2,
        p.d_r2e,
        p.eps1_c,
        p.eps2_c,
        p.eps1_e,
        p.eps2_e,
        p.m_ris,
        p.ports,
        p.fas_size,
        p.n_c,
        p.n_e,
        p.m_block,
        p.delta,
        p.zeta,
        opt_u(p.b_quant),
        opt_f(p.rician_k),
    )
}

fn metadata(
    out: &mut dyn Write,
    command: &str,
    spec: &SweepSpec,
    samples: Option<usize>,
) -> std::io::Result<()> {
    writeln!(out, "# fasris {}", env!("CARGO_PKG_VERSION"))?;
    writeln!(out, "# command = {command}")?;
    writeln!(out, "# seed = {}", spec.seed)?;
    if let Some(n) = samples {
        writeln!(out, "# mc_samples = {n}")?;
    }
    let o = spec.orders;
    writeln!(
        out,
        "# orders = cdf {}, outer_phi {}, outer_psi_phi {}, outer_psi_xi {}, inner {}",
        o.cdf, o.outer_phi, o.outer_psi_phi, o.outer_psi_xi, o.inner
    )?;
    if let Some(note) = &spec.note {
        writeln!(out, "# note = {note}")?;
    }
    writeln!(out, "# base = {}", params_line(&spec.base))
}

fn records(out: &mut dyn Write) -> csv::Writer<&mut dyn Write> {
    csv::WriterBuilder::new().flexible(false).from_writer(out)
}

fn message(e: &Option<RowError>) -> String {
    e.as_ref().map(|e| e.message.clone()).unwrap_or_default()
}

pub fn write_sweep(
    out: &mut dyn Write,
    spec: &SweepSpec,
    rows: &[Row],
    timing: bool,
) -> csv::Result<()> {
    let samples = spec
        .mode
        .montecarlo()
        .then(|| spec.mc_samples.unwrap_or(crate::sweep::DEFAULT_MC_SAMPLES));
    metadata(out, "sweep", spec, samples)?;
    writeln!(out, "# axis = {}", spec.axis)?;
    writeln!(out, "# mode = {}", spec.mode.name())?;
    let mut w = records(out);
    let mut header = vec![
        spec.axis.name(),
        "analytic",
        "e_phi",
        "e_psi_phi",
        "e_psi_xi",
        "mc_mean",
        "mc_std_error",
    ];
    if timing {
        header.push("time_ms");
    }
    header.push("error");
    w.write_record(&header)?;
    for r in rows {
        let a = r.analytic;
        let mut record = vec![
            axis_value(r.value),
            opt(a.map(|b| b.total)),
            opt(a.map(|b| b.e_phi)),
            opt(a.map(|b| b.e_psi_phi)),
            opt(a.map(|b| b.e_psi_xi)),
            opt(r.mc.map(|m| m.mean)),
            opt(r.mc.map(|m| m.std_error)),
        ];
        if timing {
            record.push(format!("{:.3}", r.elapsed.as_secs_f64() * 1e3));
        }
        record.push(message(&r.error));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_validation(
    out: &mut dyn Write,
    spec: &SweepSpec,
    checks: &[Result<Check, RowError>],
    values: &[f64],
) -> csv::Result<()> {
    metadata(
        out,
        "validate",
        spec,
        Some(spec.mc_samples.unwrap_or(crate::sweep::DEFAULT_MC_SAMPLES)),
    )?;
    writeln!(out, "# axis = {}", spec.axis)?;
    let mut w = records(out);
    w.write_record([
        spec.axis.name(),
        "analytic",
        "mc_mean",
        "mc_std_error",
        "ratio",
        "status",
        "error",
    ])?;
    for (c, v) in checks.iter().zip(values) {
        match c {
            Ok(c) => {
                let ratio = if c.mc.mean > 0.0 {
                    sig6(c.analytic / c.mc.mean)
                } else {
                    String::new()
                };
                w.write_record([
                    axis_value(c.value),
                    sig6(c.analytic),
                    sig6(c.mc.mean),
                    sig6(c.mc.std_error),
                    ratio,
                    (if c.pass { "PASS" } else { "FAIL" }).to_string(),
                    String::new(),
                ])?;
            }
            Err(e) => {
                let blank = String::new;
                w.write_record([
                    axis_value(*v),
                    blank(),
                    blank(),
                    blank(),
                    blank(),
                    "ERROR".into(),
                    e.message.clone(),
                ])?
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_ks(out: &mut dyn Write, spec: &SweepSpec, rows: &[KsRow]) -> csv::Result<()> {
    metadata(
        out,
        "ks",
        spec,
        Some(spec.mc_samples.unwrap_or(crate::sweep::DEFAULT_KS_SAMPLES)),
    )?;
    let mut w = records(out);
    w.write_record(["M", "statistic", "reference", "status"])?;
    for r in rows {
        let status = match r.within_tolerance() {
            Some(true) => "PASS",
            Some(false) => "FAIL",
            None => "",
        };
        w.write_record([
            r.m_ris.to_string(),
            sig6(r.statistic),
            opt(r.reference),
            status.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_ceiling(
    out: &mut dyn Write,
    spec: &SweepSpec,
    report: &CeilingReport,
) -> csv::Result<()> {
    metadata(out, "ceiling", spec, None)?;
    writeln!(out, "# gamma_CC ceiling = {}", sig6(report.gamma_cc))?;
    writeln!(out, "# gamma_EC ceiling = {}", sig6(report.gamma_ec))?;
    let mut w = records(out);
    w.write_record(["P", "hi_ceiling", "analytic", "relative_gap"])?;
    for r in &report.rows {
        w.write_record([
            axis_value(r.p_mw),
            sig6(r.ceiling),
            sig6(r.analytic),
            sig6(r.gap),
        ])?;
    }
    w.flush()?;
    Ok(())
}
