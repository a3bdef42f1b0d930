//! Closed-form average secure BLER built from the piecewise-linear
//! surrogates and the CLT gain distributions.
//!
//! `E[eps] = E[Phi_hat] - E[Psi_hat Phi_hat] + E[Psi_hat Xi_hat]`, where
//!
//! * `E[Phi_hat]` integrates, over the EU SINR density, the closed form
//!   `k_t * int_{max(v_t, 0)}^{u_t} F_CC(x) dx` of the conditional mean;
//! * the two products are integrated over the EU squared gain, panel by
//!   panel of the [`CaseLayout`], with the case resolved at every node.

mod cases;
mod critical;

pub use cases::{cond_exp_psi_phi, cond_exp_psi_xi, CASE_TOLERANCE};
pub use critical::{
    classify, ordering, ordering_holds, threshold_roots, Branch, Breakpoint, BreakpointKind,
    CaseLayout, CriticalValues, Interval, SkippedRoot,
};

use crate::bler::{sinr_set, BlerModel, PiecewiseBler, SinrSet};
use crate::channel::{GainDistribution, DEFAULT_CDF_ORDER};
use crate::error::{Error, Result};
use crate::numerics::ChebyshevRule;
use crate::params::{SinrMap, SystemParams, User};

/// Gauss-Chebyshev orders of every integral in the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureOrders {
    /// Common-component integral inside the gain CDF.
    pub cdf: usize,
    /// Outer EU SINR integral of `E[Phi_hat]`.
    pub outer_phi: usize,
    /// Outer EU gain integral of `E[Psi_hat Phi_hat]`.
    pub outer_psi_phi: usize,
    /// Outer EU gain integral of `E[Psi_hat Xi_hat]`.
    pub outer_psi_xi: usize,
    /// Integrals over the CU side for a fixed EU SINR.
    pub inner: usize,
}

impl Default for QuadratureOrders {
    fn default() -> Self {
        Self::uniform(DEFAULT_CDF_ORDER)
    }
}

impl QuadratureOrders {
    pub fn uniform(order: usize) -> Self {
        Self {
            cdf: order,
            outer_phi: order,
            outer_psi_phi: order,
            outer_psi_xi: order,
            inner: order,
        }
    }

    /// Every order multiplied by `factor`.
    pub fn scaled(&self, factor: usize) -> Self {
        Self {
            cdf: self.cdf * factor,
            outer_phi: self.outer_phi * factor,
            outer_psi_phi: self.outer_psi_phi * factor,
            outer_psi_xi: self.outer_psi_xi * factor,
            inner: self.inner * factor,
        }
    }
}

/// Average secure BLER and its three components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlerBreakdown {
    pub total: f64,
    pub e_phi: f64,
    pub e_psi_phi: f64,
    pub e_psi_xi: f64,
}

/// Everything the analytic pipeline needs for one parameter point.
#[derive(Debug, Clone)]
pub struct AnalyticModel {
    pub params: SystemParams,
    pub orders: QuadratureOrders,
    pub bler: BlerModel,
    pub psi_lin: PiecewiseBler,
    pub map_ce: SinrMap,
    pub map_cc: SinrMap,
    pub map_cce: SinrMap,
    pub map_ec: SinrMap,
    pub dist_c: GainDistribution,
    pub dist_e: GainDistribution,
    inner: ChebyshevRule,
    outer_phi: ChebyshevRule,
    outer_psi_phi: ChebyshevRule,
    outer_psi_xi: ChebyshevRule,
}

impl AnalyticModel {
    pub fn new(params: &SystemParams, orders: QuadratureOrders) -> Result<Self> {
        params.validate()?;
        let bler = BlerModel::new(params)?;
        Ok(Self {
            params: params.clone(),
            orders,
            bler,
            psi_lin: bler.linear_psi(),
            map_ce: params.map_ce(),
            map_cc: params.map_cc(),
            map_cce: params.map_cce(),
            map_ec: params.map_ec(),
            dist_c: GainDistribution::for_user(params, User::Central, orders.cdf)?,
            dist_e: GainDistribution::for_user(params, User::Eavesdropper, orders.cdf)?,
            inner: ChebyshevRule::new(orders.inner)?,
            outer_phi: ChebyshevRule::new(orders.outer_phi)?,
            outer_psi_phi: ChebyshevRule::new(orders.outer_psi_phi)?,
            outer_psi_xi: ChebyshevRule::new(orders.outer_psi_xi)?,
        })
    }

    /// `E[Phi_hat | gamma_EC = y]`: `k_t` times the integral of the CU SINR
    /// CDF over the secure ramp.
    pub fn cond_exp_phi(&self, y: f64) -> Result<f64> {
        let sec = self.bler.linear_secure(y);
        let lo = sec.alpha_low().max(0.0);
        let hi = sec.alpha_up();
        let ceiling = self.map_cc.ceiling();
        let cdf = |x: f64| self.dist_c.cdf_sinr(&self.map_cc, x);
        let mut area = 0.0;
        if lo < ceiling {
            let top = hi.min(ceiling);
            area += self.inner.integrate(lo, top, cdf)?;
        }
        if hi > ceiling {
            area += hi - lo.max(ceiling);
        }
        Ok((sec.kappa * area).clamp(0.0, 1.0))
    }

    /// `E[Phi_hat]` over the EU SINR, on the panels of `layout`.
    pub fn expected_phi(&self, layout: &CaseLayout) -> Result<f64> {
        let mut total = self.dist_e.atom() * self.cond_exp_phi(0.0)?;
        for iv in &layout.intervals {
            let (ya, yb) = (self.map_ec.eval(iv.a), self.map_ec.eval(iv.b));
            total += self.outer_phi.try_integrate(ya, yb, |y| {
                let density = self.dist_e.pdf_sinr(&self.map_ec, y);
                if density == 0.0 {
                    return Ok::<f64, Error>(0.0);
                }
                Ok(density * self.cond_exp_phi(y)?)
            })?;
        }
        Ok(total.clamp(0.0, 1.0))
    }

    /// `E[Psi_hat S_hat]` over the EU squared gain for the branch of `layout`.
    pub fn expected_product(&self, layout: &CaseLayout) -> Result<f64> {
        let rule = match layout.branch {
            Branch::Cancelled => &self.outer_psi_phi,
            Branch::Uncancelled => &self.outer_psi_xi,
        };
        let branch = layout.branch;
        let mut total = self.dist_e.atom() * self.cond_exp(branch, 0.0, None)?;
        for iv in &layout.intervals {
            total += rule.try_integrate(iv.a, iv.b, |z| {
                let density = self.dist_e.pdf_sq_at(z);
                if density == 0.0 {
                    return Ok::<f64, Error>(0.0);
                }
                Ok(density * self.cond_exp(branch, self.map_ec.eval(z), None)?)
            })?;
        }
        Ok(total.clamp(0.0, 1.0))
    }

    pub fn expected_psi_phi(&self) -> Result<f64> {
        self.expected_product(&self.critical_points(Branch::Cancelled)?)
    }

    pub fn expected_psi_xi(&self) -> Result<f64> {
        self.expected_product(&self.critical_points(Branch::Uncancelled)?)
    }

    pub fn average(&self) -> Result<BlerBreakdown> {
        let cancelled = self.critical_points(Branch::Cancelled)?;
        let uncancelled = self.critical_points(Branch::Uncancelled)?;
        let e_phi = self.expected_phi(&cancelled)?;
        let e_psi_phi = self.expected_product(&cancelled)?;
        let e_psi_xi = self.expected_product(&uncancelled)?;
        Ok(BlerBreakdown {
            total: (e_phi - e_psi_phi + e_psi_xi).clamp(0.0, 1.0),
            e_phi,
            e_psi_phi,
            e_psi_xi,
        })
    }
}

/// Analytic average secure BLER at default quadrature orders.
pub fn average_secure_bler(params: &SystemParams) -> Result<BlerBreakdown> {
    AnalyticModel::new(params, QuadratureOrders::default())?.average()
}

/// Analytic average secure BLER at the given orders.
pub fn average_secure_bler_with(
    params: &SystemParams,
    orders: QuadratureOrders,
) -> Result<BlerBreakdown> {
    AnalyticModel::new(params, orders)?.average()
}

/// SINRs reached by every link once transmit power dominates the noise.
pub fn ceiling_sinrs(params: &SystemParams) -> SinrSet {
    SinrSet {
        gain_sq_c: f64::INFINITY,
        gain_sq_e: f64::INFINITY,
        gamma_ce: params.map_ce().ceiling(),
        gamma_cc: params.map_cc().ceiling(),
        gamma_cce: params.map_cce().ceiling(),
        gamma_ee: params.map_ee().ceiling(),
        gamma_ec: params.map_ec().ceiling(),
    }
}

/// High-power limit of the average secure BLER under hardware impairments:
/// the exact secure BLER at the ceiling SINRs.
pub fn hi_ceiling(params: &SystemParams) -> Result<f64> {
    params.validate()?;
    if params.rho2_c == 0.0 && params.rho2_e == 0.0 {
        return Err(Error::NoCeiling);
    }
    let model = BlerModel::new(params)?;
    Ok(model.secure_bler(&ceiling_sinrs(params), false))
}

/// Exact secure BLER at finite gains, re-exported for convenience.
pub fn secure_bler_at(params: &SystemParams, gain_sq_c: f64, gain_sq_e: f64) -> Result<f64> {
    Ok(BlerModel::new(params)?.secure_bler(&sinr_set(gain_sq_c, gain_sq_e, params), false))
}
