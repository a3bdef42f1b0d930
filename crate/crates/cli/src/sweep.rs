//! Parallel evaluation of sweeps, validation, K-S and ceiling studies.

use std::time::{Duration, Instant};

use fasris_core::analytic::{average_secure_bler_with, ceiling_sinrs, hi_ceiling, BlerBreakdown};
use fasris_core::montecarlo::{ks_clt, mc_average_secure_bler, McEstimate};
use fasris_core::SystemParams;
use rayon::prelude::*;

use crate::config::{Axis, SweepSpec};
use crate::error::{CliError, CliResult};

pub const DEFAULT_MC_SAMPLES: usize = 100_000;
pub const DEFAULT_KS_SAMPLES: usize = 200_000;

/// K-S statistics of the CLT gain model reported for the reference
/// element counts.
pub const KS_REFERENCE: [(usize, f64); 5] = [
    (4, 0.054),
    (8, 0.039),
    (16, 0.029),
    (20, 0.023),
    (32, 0.019),
];
pub const KS_TOLERANCE: f64 = 0.01;

/// Relative band and standard-error multiple of the validation check.
pub const VALIDATION_FACTOR: f64 = 1.5;
pub const VALIDATION_FLOOR: f64 = 1e-4;
pub const VALIDATION_SE: f64 = 3.0;

#[derive(Debug, Clone)]
pub struct RowError {
    pub message: String,
    pub numerical: bool,
}

impl From<CliError> for RowError {
    fn from(e: CliError) -> Self {
        Self {
            numerical: e.is_numerical(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Row {
    pub value: f64,
    pub analytic: Option<BlerBreakdown>,
    pub mc: Option<McEstimate>,
    pub elapsed: Duration,
    pub error: Option<RowError>,
}

/// Checks every point before any work starts.
fn points(spec: &SweepSpec) -> CliResult<Vec<(f64, SystemParams)>> {
    spec.check()?;
    let values = spec.points();
    if values.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(CliError::Input(format!(
            "values for axis {} must be strictly ascending",
            spec.axis
        )));
    }
    values
        .into_iter()
        .map(|v| {
            let p = spec.axis.apply(&spec.base, v)?;
            p.validate()
                .map_err(|e| CliError::Input(format!("{} = {v}: {e}", spec.axis)))?;
            Ok((v, p))
        })
        .collect()
}

fn samples(spec: &SweepSpec) -> usize {
    spec.mc_samples.unwrap_or(DEFAULT_MC_SAMPLES)
}

fn evaluate(spec: &SweepSpec, value: f64, params: &SystemParams) -> Row {
    let start = Instant::now();
    let mut row = Row {
        value,
        analytic: None,
        mc: None,
        elapsed: Duration::ZERO,
        error: None,
    };
    let result: CliResult<()> = (|| {
        if spec.mode.analytic() {
            row.analytic = Some(average_secure_bler_with(params, spec.orders)?);
        }
        if spec.mode.montecarlo() {
            row.mc = Some(mc_average_secure_bler(params, samples(spec), spec.seed)?);
        }
        Ok(())
    })();
    row.error = result.err().map(RowError::from);
    row.elapsed = start.elapsed();
    row
}

/// One row per axis value, in axis order. A point that fails keeps its row
/// with the error attached; every Monte Carlo point shares the seed.
pub fn run_sweep(spec: &SweepSpec) -> CliResult<Vec<Row>> {
    let pts = points(spec)?;
    if spec.mode.montecarlo() && samples(spec) < fasris_core::montecarlo::MIN_SAMPLES {
        return Err(fasris_core::Error::TooFewSamples {
            got: samples(spec),
            min: fasris_core::montecarlo::MIN_SAMPLES,
        }
        .into());
    }
    Ok(pts.par_iter().map(|(v, p)| evaluate(spec, *v, p)).collect())
}

/// Analytic against Monte Carlo at one point.
#[derive(Debug, Clone)]
pub struct Check {
    pub value: f64,
    pub analytic: f64,
    pub mc: McEstimate,
    pub pass: bool,
}

/// Agreement test: within a factor of 1.5 where the simulated mean is at
/// least 1e-4, else within three standard errors.
pub fn agrees(analytic: f64, mc: &McEstimate) -> bool {
    if mc.mean >= VALIDATION_FLOOR {
        analytic <= VALIDATION_FACTOR * mc.mean && mc.mean <= VALIDATION_FACTOR * analytic
    } else {
        (analytic - mc.mean).abs() <= VALIDATION_SE * mc.std_error
    }
}

/// Runs both routes on every point; rows that fail are returned as errors
/// in place.
pub fn run_validation(spec: &SweepSpec) -> CliResult<Vec<Result<Check, RowError>>> {
    let both = SweepSpec {
        mode: crate::config::Mode::Both,
        ..spec.clone()
    };
    let rows = run_sweep(&both)?;
    Ok(rows
        .into_iter()
        .map(|r| match (r.error, r.analytic, r.mc) {
            (Some(e), _, _) => Err(e),
            (None, Some(a), Some(mc)) => Ok(Check {
                value: r.value,
                analytic: a.total,
                pass: agrees(a.total, &mc),
                mc,
            }),
            _ => unreachable!("both routes ran"),
        })
        .collect())
}

#[derive(Debug, Clone)]
pub struct KsRow {
    pub m_ris: usize,
    pub statistic: f64,
    pub reference: Option<f64>,
}

impl KsRow {
    pub fn within_tolerance(&self) -> Option<bool> {
        self.reference
            .map(|r| (self.statistic - r).abs() <= KS_TOLERANCE)
    }
}

/// K-S distance of the CLT gain model for each element count: the `M`
/// axis values when the sweep runs over `M`, else the reference counts.
pub fn run_ks(spec: &SweepSpec) -> CliResult<Vec<KsRow>> {
    spec.check()?;
    let m_values: Vec<usize> = if spec.axis == Axis::M && !spec.values.is_empty() {
        points(spec)?.iter().map(|(_, p)| p.m_ris).collect()
    } else {
        KS_REFERENCE.iter().map(|&(m, _)| m).collect()
    };
    let n = spec.mc_samples.unwrap_or(DEFAULT_KS_SAMPLES);
    let stats = ks_clt(&spec.base, &m_values, n, spec.seed)?;
    Ok(stats
        .into_iter()
        .map(|k| KsRow {
            m_ris: k.m_ris,
            statistic: k.statistic,
            reference: KS_REFERENCE.iter().find(|r| r.0 == k.m_ris).map(|r| r.1),
        })
        .collect())
}

#[derive(Debug, Clone)]
pub struct CeilingRow {
    pub p_mw: f64,
    pub ceiling: f64,
    pub analytic: f64,
    pub gap: f64,
}

#[derive(Debug, Clone)]
pub struct CeilingReport {
    pub gamma_cc: f64,
    pub gamma_ec: f64,
    pub rows: Vec<CeilingRow>,
}

pub const CEILING_POWER: f64 = 1e6;

/// High-power limit against the full pipeline at the `P` axis values, or
/// at 1e6 mW.
pub fn run_ceiling(spec: &SweepSpec) -> CliResult<CeilingReport> {
    spec.check()?;
    let ceiling = hi_ceiling(&spec.base)?;
    let powers: Vec<(f64, SystemParams)> = if spec.axis == Axis::P && !spec.values.is_empty() {
        points(spec)?
    } else {
        vec![(CEILING_POWER, Axis::P.apply(&spec.base, CEILING_POWER)?)]
    };
    let rows = powers
        .par_iter()
        .map(|(pw, p)| {
            let analytic = average_secure_bler_with(p, spec.orders)?.total;
            Ok(CeilingRow {
                p_mw: *pw,
                ceiling,
                analytic,
                gap: (analytic - ceiling).abs() / ceiling,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let s = ceiling_sinrs(&spec.base);
    Ok(CeilingReport {
        gamma_cc: s.gamma_cc,
        gamma_ec: s.gamma_ec,
        rows,
    })
}
