//! Plain-text experiment files: one `key = value` per line, `#` comments.
//!
//! Keys are the physical parameter names (`P`, `a_C`, `rho2_E`, `N_c`, ...)
//! plus the sweep keys `axis`, `values`, `mode`, `mc_samples`, `seed`,
//! `order` and `note`. `values` takes a comma-separated list or one of
//! `linspace(a, b, n)` / `logspace(a, b, n)`.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use fasris_core::analytic::QuadratureOrders;
use fasris_core::SystemParams;

use crate::error::{CliError, CliResult};

/// Parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    P,
    M,
    L,
    MBlock,
    AC,
    Rho2,
    W,
    Delta,
    NC,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::P => "P",
            Axis::M => "M",
            Axis::L => "L",
            Axis::MBlock => "m_block",
            Axis::AC => "a_C",
            Axis::Rho2 => "rho2",
            Axis::W => "W",
            Axis::Delta => "delta",
            Axis::NC => "N_c",
        }
    }

    fn is_integer(self) -> bool {
        matches!(self, Axis::M | Axis::L | Axis::MBlock | Axis::NC)
    }

    /// Current value of this axis in `p`.
    pub fn get(self, p: &SystemParams) -> f64 {
        match self {
            Axis::P => p.p_mw,
            Axis::M => p.m_ris as f64,
            Axis::L => p.ports as f64,
            Axis::MBlock => p.m_block as f64,
            Axis::AC => p.a_c,
            Axis::Rho2 => p.rho2_c,
            Axis::W => p.fas_size,
            Axis::Delta => p.delta,
            Axis::NC => p.n_c as f64,
        }
    }

    /// `base` with this axis set to `v`. A power split keeps `a_E = 1 - a_C`
    /// and `rho2` sets both users.
    pub fn apply(self, base: &SystemParams, v: f64) -> CliResult<SystemParams> {
        if self.is_integer() && !(v.fract() == 0.0 && v >= 0.0 && v <= u32::MAX as f64) {
            return Err(CliError::Input(format!(
                "axis {} needs non-negative integers, got {v}",
                self.name()
            )));
        }
        let mut p = base.clone();
        match self {
            Axis::P => p.p_mw = v,
            Axis::M => p.m_ris = v as usize,
            Axis::L => p.ports = v as usize,
            Axis::MBlock => p.m_block = v as u32,
            Axis::AC => {
                p.a_c = v;
                p.a_e = 1.0 - v;
            }
            Axis::Rho2 => {
                p.rho2_c = v;
                p.rho2_e = v;
            }
            Axis::W => p.fas_size = v,
            Axis::Delta => p.delta = v,
            Axis::NC => p.n_c = v as u32,
        }
        Ok(p)
    }
}

impl FromStr for Axis {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        Ok(match s {
            "P" => Axis::P,
            "M" => Axis::M,
            "L" => Axis::L,
            "m_block" => Axis::MBlock,
            "a_C" => Axis::AC,
            "rho2" => Axis::Rho2,
            "W" => Axis::W,
            "delta" => Axis::Delta,
            "N_c" => Axis::NC,
            _ => {
                return Err(CliError::Input(format!(
                    "unknown axis {s:?} (expected P, M, L, m_block, a_C, rho2, W, delta or N_c)"
                )))
            }
        })
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which route(s) a sweep evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    Analytic,
    Montecarlo,
    Both,
}

impl Mode {
    pub fn analytic(self) -> bool {
        self != Mode::Montecarlo
    }

    pub fn montecarlo(self) -> bool {
        self != Mode::Analytic
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::Analytic => "analytic",
            Mode::Montecarlo => "montecarlo",
            Mode::Both => "both",
        }
    }
}

impl FromStr for Mode {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "analytic" => Ok(Mode::Analytic),
            "montecarlo" => Ok(Mode::Montecarlo),
            "both" => Ok(Mode::Both),
            _ => Err(CliError::Input(format!(
                "unknown mode {s:?} (expected analytic, montecarlo or both)"
            ))),
        }
    }
}

/// Everything a sweep needs.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: SystemParams,
    pub axis: Axis,
    /// Ascending axis values; empty means the base value alone.
    pub values: Vec<f64>,
    pub mode: Mode,
    /// `None` lets each command pick its own default.
    pub mc_samples: Option<usize>,
    pub seed: u64,
    pub orders: QuadratureOrders,
    pub note: Option<String>,
}

pub const DEFAULT_SEED: u64 = 2024;

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            base: SystemParams::default(),
            axis: Axis::P,
            values: Vec::new(),
            mode: Mode::Analytic,
            mc_samples: None,
            seed: DEFAULT_SEED,
            orders: QuadratureOrders::default(),
            note: None,
        }
    }
}

impl SweepSpec {
    /// Axis values to evaluate, falling back to the base value.
    pub fn points(&self) -> Vec<f64> {
        if self.values.is_empty() {
            vec![self.axis.get(&self.base)]
        } else {
            self.values.clone()
        }
    }

    /// Input checks shared by every command.
    pub fn check(&self) -> CliResult<()> {
        self.base.validate()?;
        let o = self.orders;
        if [o.cdf, o.outer_phi, o.outer_psi_phi, o.outer_psi_xi, o.inner].contains(&0) {
            return Err(CliError::Input("quadrature orders must be positive".into()));
        }
        Ok(())
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        parse(&text).map_err(|e| match e {
            CliError::Parse { line, msg, .. } => CliError::Parse {
                source_name: path.display().to_string(),
                line,
                msg,
            },
            other => other,
        })
    }
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("{key}: cannot parse {value:?}"))
}

fn optional<T: FromStr>(key: &str, value: &str) -> Result<Option<T>, String> {
    if value == "none" {
        Ok(None)
    } else {
        num(key, value).map(Some)
    }
}

fn parse_values(value: &str) -> Result<Vec<f64>, String> {
    for (name, log) in [("linspace", false), ("logspace", true)] {
        let Some(inner) = value.strip_prefix(name) else {
            continue;
        };
        let inner = inner
            .trim()
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| format!("values: expected {name}(a, b, n)"))?;
        let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
        let [a, b, n] = parts[..] else {
            return Err(format!("values: {name} takes three arguments"));
        };
        let (a, b): (f64, f64) = (num("values", a)?, num("values", b)?);
        let n: usize = num("values", n)?;
        if n == 0 || (log && !(a > 0.0 && b > 0.0)) {
            return Err(format!("values: bad {name} arguments"));
        }
        return Ok((0..n)
            .map(|i| {
                let t = if n == 1 {
                    0.0
                } else {
                    i as f64 / (n - 1) as f64
                };
                if log {
                    10f64.powf(a.log10() + t * (b.log10() - a.log10()))
                } else {
                    a + t * (b - a)
                }
            })
            .collect());
    }
    value.split(',').map(|v| num("values", v.trim())).collect()
}

/// Parses a config text; keys not given keep their defaults.
pub fn parse(text: &str) -> CliResult<SweepSpec> {
    let mut spec = SweepSpec::default();
    let mut seen = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let fail = |msg: String| CliError::Parse {
            source_name: "<config>".into(),
            line: i + 1,
            msg,
        };
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| fail(format!("expected key = value, got {line:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        if !seen.insert(key.to_string()) {
            return Err(fail(format!("duplicate key {key}")));
        }
        let p = &mut spec.base;
        let r: Result<(), String> = (|| {
            match key {
                "P" => p.p_mw = num(key, value)?,
                "a_C" => p.a_c = num(key, value)?,
                "a_E" => p.a_e = num(key, value)?,
                "rho2_C" => p.rho2_c = num(key, value)?,
                "rho2_E" => p.rho2_e = num(key, value)?,
                "sigma2" => p.sigma2 = num(key, value)?,
                "alpha" => p.alpha = num(key, value)?,
                "d_SR1" => p.d_sr1 = num(key, value)?,
                "d_R1C" => p.d_r1c = num(key, value)?,
                "d_SR2" => p.d_sr2 = num(key, value)?,
                "d_R2E" => p.d_r2e = num(key, value)?,
                "eps1_C" => p.eps1_c = num(key, value)?,
                "eps2_C" => p.eps2_c = num(key, value)?,
                "eps1_E" => p.eps1_e = num(key, value)?,
                "eps2_E" => p.eps2_e = num(key, value)?,
                "M" => p.m_ris = num(key, value)?,
                "L" => p.ports = num(key, value)?,
                "W" => p.fas_size = num(key, value)?,
                "N_c" => p.n_c = num(key, value)?,
                "N_e" => p.n_e = num(key, value)?,
                "m_block" => p.m_block = num(key, value)?,
                "delta" => p.delta = num(key, value)?,
                "zeta" => p.zeta = num(key, value)?,
                "b_quant" => p.b_quant = optional(key, value)?,
                "rician_K" => p.rician_k = optional(key, value)?,
                "axis" => spec.axis = value.parse().map_err(|e: CliError| e.to_string())?,
                "values" => spec.values = parse_values(value)?,
                "mode" => spec.mode = value.parse().map_err(|e: CliError| e.to_string())?,
                "mc_samples" => spec.mc_samples = Some(num(key, value)?),
                "seed" => spec.seed = num(key, value)?,
                "order" => spec.orders = QuadratureOrders::uniform(num(key, value)?),
                "note" => spec.note = Some(value.to_string()),
                _ => return Err(format!("unknown key {key:?}")),
            }
            Ok(())
        })();
        r.map_err(fail)?;
    }
    Ok(spec)
}
