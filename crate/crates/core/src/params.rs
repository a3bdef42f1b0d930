//! Link parameters and the SINR maps they induce.

use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::numerics::sinc;

/// Which receiver a quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum User {
    /// Central user: the legitimate receiver of the confidential message.
    Central,
    /// Eavesdropping user.
    Eavesdropper,
}

/// Physical and protocol parameters of the two-user downlink.
///
/// Powers are in mW, distances in metres, message sizes in bits and the
/// blocklength in channel uses.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    pub p_mw: f64,
    pub a_c: f64,
    pub a_e: f64,
    pub rho2_c: f64,
    pub rho2_e: f64,
    pub sigma2: f64,
    pub alpha: f64,
    pub d_sr1: f64,
    pub d_r1c: f64,
    pub d_sr2: f64,
    pub d_r2e: f64,
    pub eps1_c: f64,
    pub eps2_c: f64,
    pub eps1_e: f64,
    pub eps2_e: f64,
    /// RIS elements per surface.
    pub m_ris: usize,
    /// Fluid-antenna ports per user.
    pub ports: usize,
    /// Normalized fluid-antenna aperture in wavelengths.
    pub fas_size: f64,
    pub n_c: u32,
    pub n_e: u32,
    pub m_block: u32,
    /// Information leakage budget.
    pub delta: f64,
    /// Residual fraction of the EU signal left after SIC at the CU.
    pub zeta: f64,
    /// RIS phase resolution in bits; `None` means continuous phases.
    pub b_quant: Option<u32>,
    /// Rician factor of the BS-RIS links (Monte Carlo only); `None` is Rayleigh.
    pub rician_k: Option<f64>,
}

impl Default for SystemParams {
    /// Reference scenario: 10 mW, 20 RIS elements, 5 ports, 300/150 bit
    /// messages in 200 channel uses, leakage 0.01, 5% distortion at both users.
    fn default() -> Self {
        Self {
            p_mw: 10.0,
            a_c: 0.2,
            a_e: 0.8,
            rho2_c: 0.05,
            rho2_e: 0.05,
            sigma2: 0.001,
            alpha: 2.0,
            d_sr1: 20.0,
            d_r1c: 10.0,
            d_sr2: 40.0,
            d_r2e: 20.0,
            eps1_c: 0.5,
            eps2_c: 0.5,
            eps1_e: 0.5,
            eps2_e: 0.05,
            m_ris: 20,
            ports: 5,
            fas_size: 5.0,
            n_c: 300,
            n_e: 150,
            m_block: 200,
            delta: 0.01,
            zeta: 0.0,
            b_quant: None,
            rician_k: None,
        }
    }
}

fn positive(field: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(
            field,
            format!("must be positive and finite, got {v}"),
        ))
    }
}

fn non_negative(field: &'static str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(
            field,
            format!("must be non-negative and finite, got {v}"),
        ))
    }
}

impl SystemParams {
    /// Checks every field invariant, returning the first violation.
    pub fn validate(&self) -> Result<()> {
        positive("P", self.p_mw)?;
        positive("a_C", self.a_c)?;
        positive("a_E", self.a_e)?;
        if (self.a_c + self.a_e - 1.0).abs() > 1e-12 {
            return Err(invalid(
                "a_C",
                format!("a_C + a_E must equal 1, got {}", self.a_c + self.a_e),
            ));
        }
        if self.a_c >= self.a_e {
            return Err(invalid(
                "a_C",
                format!("need a_C < a_E, got {} >= {}", self.a_c, self.a_e),
            ));
        }
        non_negative("rho2_C", self.rho2_c)?;
        non_negative("rho2_E", self.rho2_e)?;
        positive("sigma2", self.sigma2)?;
        positive("alpha", self.alpha)?;
        positive("d_SR1", self.d_sr1)?;
        positive("d_R1C", self.d_r1c)?;
        positive("d_SR2", self.d_sr2)?;
        positive("d_R2E", self.d_r2e)?;
        positive("eps1_C", self.eps1_c)?;
        positive("eps2_C", self.eps2_c)?;
        positive("eps1_E", self.eps1_e)?;
        positive("eps2_E", self.eps2_e)?;
        if self.m_ris == 0 {
            return Err(invalid("M", "need at least one RIS element"));
        }
        if self.ports == 0 {
            return Err(invalid("L", "need at least one port"));
        }
        positive("W", self.fas_size)?;
        if self.n_c == 0 {
            return Err(invalid("N_c", "must be positive"));
        }
        if self.n_e == 0 {
            return Err(invalid("N_e", "must be positive"));
        }
        if self.m_block < 2 {
            return Err(invalid(
                "m_block",
                format!("must be at least 2, got {}", self.m_block),
            ));
        }
        if !(self.delta > 0.0 && self.delta <= 0.5) {
            return Err(invalid(
                "delta",
                format!("must lie in (0, 0.5], got {}", self.delta),
            ));
        }
        if !(0.0..=1.0).contains(&self.zeta) {
            return Err(invalid(
                "zeta",
                format!("must lie in [0, 1], got {}", self.zeta),
            ));
        }
        if self.b_quant == Some(0) {
            return Err(invalid("b_quant", "must be at least 1 bit"));
        }
        if let Some(k) = self.rician_k {
            non_negative("rician_K", k)?;
        }
        Ok(())
    }

    /// Power loss factor sinc(pi/2^b)^2 of b-bit RIS phases (1 when continuous).
    pub fn phase_loss(&self) -> f64 {
        match self.b_quant {
            Some(b) => sinc(PI / 2f64.powi(b as i32)).powi(2),
            None => 1.0,
        }
    }

    /// Received power per unit squared gain: P (d1 d2)^-alpha times the phase loss.
    pub fn gain_scale(&self, user: User) -> f64 {
        let (d1, d2) = match user {
            User::Central => (self.d_sr1, self.d_r1c),
            User::Eavesdropper => (self.d_sr2, self.d_r2e),
        };
        self.p_mw * (d1 * d2).powf(-self.alpha) * self.phase_loss()
    }

    /// Cascaded channel variances (eps1, eps2) of a user.
    pub fn variances(&self, user: User) -> (f64, f64) {
        match user {
            User::Central => (self.eps1_c, self.eps2_c),
            User::Eavesdropper => (self.eps1_e, self.eps2_e),
        }
    }

    /// CU decoding the EU's message.
    pub fn map_ce(&self) -> SinrMap {
        self.map(User::Central, self.a_e, self.a_c + self.rho2_c)
    }

    /// CU decoding its own message after SIC.
    pub fn map_cc(&self) -> SinrMap {
        self.map(User::Central, self.a_c, self.zeta * self.a_e + self.rho2_c)
    }

    /// CU decoding its own message with the EU signal still present.
    pub fn map_cce(&self) -> SinrMap {
        self.map(User::Central, self.a_c, self.a_e + self.rho2_c)
    }

    /// EU decoding its own message.
    pub fn map_ee(&self) -> SinrMap {
        self.map(User::Eavesdropper, self.a_e, self.a_c + self.rho2_e)
    }

    /// EU wiretapping the CU's message.
    pub fn map_ec(&self) -> SinrMap {
        self.map(User::Eavesdropper, self.a_c, self.rho2_e)
    }

    fn map(&self, user: User, b: f64, c: f64) -> SinrMap {
        SinrMap {
            b,
            c,
            scale: self.gain_scale(user),
            noise: self.sigma2,
        }
    }
}

/// SINR as a function of squared gain z: `b s z / (c s z + sigma2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrMap {
    pub b: f64,
    pub c: f64,
    pub scale: f64,
    pub noise: f64,
}

impl SinrMap {
    pub fn eval(&self, z: f64) -> f64 {
        let s = self.scale * z;
        self.b * s / (self.c * s + self.noise)
    }

    /// Limit of [`eval`](Self::eval) as z grows; infinite when c = 0.
    pub fn ceiling(&self) -> f64 {
        if self.c > 0.0 {
            self.b / self.c
        } else {
            f64::INFINITY
        }
    }

    /// Squared gain at which the SINR reaches `t`: +inf at or above the
    /// ceiling, 0 for t <= 0.
    pub fn critical_gain(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let den = self.b - self.c * t;
        if den <= 0.0 {
            return f64::INFINITY;
        }
        self.noise * t / (den * self.scale)
    }

    /// Derivative of [`critical_gain`](Self::critical_gain) below the ceiling.
    pub fn critical_gain_slope(&self, t: f64) -> f64 {
        let den = self.b - self.c * t;
        self.noise * self.b / (den * den * self.scale)
    }
}
