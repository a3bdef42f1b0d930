//! Finite-blocklength error probabilities, their piecewise-linear
//! surrogates, and the instantaneous secure BLER of the central user.

use std::f64::consts::{LOG2_E, PI};

use crate::error::Result;
use crate::numerics::{q_func, q_inv};
use crate::params::SystemParams;

/// Upper bound of [`dispersion`]: `(log2 e)^2`.
pub const DISPERSION_LIMIT: f64 = LOG2_E * LOG2_E;

/// All five SINRs produced by one pair of squared gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrSet {
    pub gain_sq_c: f64,
    pub gain_sq_e: f64,
    /// CU decoding the EU message (SIC step).
    pub gamma_ce: f64,
    /// CU decoding its own message after SIC.
    pub gamma_cc: f64,
    /// CU decoding its own message with the EU signal uncancelled.
    pub gamma_cce: f64,
    /// EU decoding its own message.
    pub gamma_ee: f64,
    /// EU wiretapping the CU message.
    pub gamma_ec: f64,
}

/// Evaluates every SINR map at the given squared gains.
pub fn sinr_set(gain_sq_c: f64, gain_sq_e: f64, params: &SystemParams) -> SinrSet {
    SinrSet {
        gain_sq_c,
        gain_sq_e,
        gamma_ce: params.map_ce().eval(gain_sq_c),
        gamma_cc: params.map_cc().eval(gain_sq_c),
        gamma_cce: params.map_cce().eval(gain_sq_c),
        gamma_ee: params.map_ee().eval(gain_sq_e),
        gamma_ec: params.map_ec().eval(gain_sq_e),
    }
}

/// Channel dispersion `(log2 e)^2 (1 - (1 + gamma)^-2)`.
pub fn dispersion(gamma: f64) -> f64 {
    let r = 1.0 / (1.0 + gamma);
    DISPERSION_LIMIT * (1.0 - r * r)
}

/// Piecewise-linear stand-in for a Q-shaped error curve:
/// 1 below `alpha_low`, 0 above `alpha_up`, slope `-kappa` between.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiecewiseBler {
    pub alpha_th: f64,
    pub kappa: f64,
}

impl PiecewiseBler {
    pub fn alpha_low(&self) -> f64 {
        self.alpha_th - 0.5 / self.kappa
    }

    pub fn alpha_up(&self) -> f64 {
        self.alpha_th + 0.5 / self.kappa
    }

    pub fn eval(&self, gamma: f64) -> f64 {
        if gamma <= self.alpha_low() {
            1.0
        } else if gamma >= self.alpha_up() {
            0.0
        } else {
            (0.5 - self.kappa * (gamma - self.alpha_th)).clamp(0.0, 1.0)
        }
    }
}

/// Slope `sqrt(m) / sqrt(2 pi x (x + 2))` of the surrogate centred at `x`.
pub fn surrogate_slope(threshold: f64, m_block: f64) -> f64 {
    m_block.sqrt() / (2.0 * PI * threshold * (threshold + 2.0)).sqrt()
}

/// Packet-level constants shared by every BLER evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlerModel {
    /// Blocklength.
    pub m: f64,
    /// `N_c / m`.
    pub rate_c: f64,
    /// `N_e / m`.
    pub rate_e: f64,
    /// `Q^{-1}(delta)`.
    pub mu: f64,
}

impl BlerModel {
    pub fn new(params: &SystemParams) -> Result<Self> {
        let m = params.m_block as f64;
        Ok(Self {
            m,
            rate_c: params.n_c as f64 / m,
            rate_e: params.n_e as f64 / m,
            mu: q_inv(params.delta)?,
        })
    }

    /// Error probability of the SIC step.
    pub fn psi(&self, gamma_ce: f64) -> f64 {
        if gamma_ce <= 0.0 {
            return 1.0;
        }
        let v = dispersion(gamma_ce);
        q_func((gamma_ce.ln_1p() * LOG2_E - self.rate_e) / (v / self.m).sqrt())
    }

    /// Secure error probability of the CU message at SINR `gamma` against an
    /// eavesdropper at `gamma_ec`.
    pub fn secure(&self, gamma: f64, gamma_ec: f64) -> f64 {
        if gamma <= gamma_ec {
            return 1.0;
        }
        let sqrt_m = self.m.sqrt();
        let gap = (gamma.ln_1p() - gamma_ec.ln_1p()) * LOG2_E
            - self.mu * dispersion(gamma_ec).sqrt() / sqrt_m
            - self.rate_c;
        q_func(sqrt_m / dispersion(gamma).sqrt() * gap)
    }

    /// SIC threshold `2^{N_e/m} - 1`.
    pub fn beta(&self) -> f64 {
        self.rate_e.exp2() - 1.0
    }

    /// Security threshold: the CU SINR at which [`secure`](Self::secure)
    /// crosses one half.
    pub fn beta_tilde(&self, gamma_ec: f64) -> f64 {
        let exponent = self.mu * dispersion(gamma_ec).sqrt() / self.m.sqrt() + self.rate_c;
        (1.0 + gamma_ec) * exponent.exp2() - 1.0
    }

    pub fn linear_psi(&self) -> PiecewiseBler {
        let beta = self.beta();
        PiecewiseBler {
            alpha_th: beta,
            kappa: surrogate_slope(beta, self.m),
        }
    }

    pub fn linear_secure(&self, gamma_ec: f64) -> PiecewiseBler {
        let bt = self.beta_tilde(gamma_ec);
        PiecewiseBler {
            alpha_th: bt,
            kappa: surrogate_slope(bt, self.m),
        }
    }

    /// `1 - [(1 - Psi)(1 - Phi) + Psi (1 - Xi)]` at one SINR set.
    pub fn secure_bler(&self, s: &SinrSet, use_linear: bool) -> f64 {
        let (psi, phi, xi) = if use_linear {
            let sec = self.linear_secure(s.gamma_ec);
            (
                self.linear_psi().eval(s.gamma_ce),
                sec.eval(s.gamma_cc),
                sec.eval(s.gamma_cce),
            )
        } else {
            (
                self.psi(s.gamma_ce),
                self.secure(s.gamma_cc, s.gamma_ec),
                self.secure(s.gamma_cce, s.gamma_ec),
            )
        };
        combine(psi, phi, xi)
    }
}

/// Secure BLER from its three stage probabilities, clamped to [0, 1].
pub fn combine(psi: f64, phi: f64, xi: f64) -> f64 {
    (1.0 - ((1.0 - psi) * (1.0 - phi) + psi * (1.0 - xi))).clamp(0.0, 1.0)
}

/// Error probability of the CU's SIC step at `gamma_ce`.
pub fn bler_psi_exact(gamma_ce: f64, params: &SystemParams) -> Result<f64> {
    Ok(BlerModel::new(params)?.psi(gamma_ce))
}

/// Security threshold at eavesdropper SINR `gamma_ec`.
pub fn beta_tilde(gamma_ec: f64, params: &SystemParams) -> Result<f64> {
    Ok(BlerModel::new(params)?.beta_tilde(gamma_ec))
}

/// Secure error probability after perfect or residual SIC.
pub fn bler_phi_exact(gamma_cc: f64, gamma_ec: f64, params: &SystemParams) -> Result<f64> {
    Ok(BlerModel::new(params)?.secure(gamma_cc, gamma_ec))
}

/// Secure error probability with the EU signal left in place.
pub fn bler_xi_exact(gamma_cce: f64, gamma_ec: f64, params: &SystemParams) -> Result<f64> {
    Ok(BlerModel::new(params)?.secure(gamma_cce, gamma_ec))
}

pub fn linearize_psi(params: &SystemParams) -> Result<PiecewiseBler> {
    Ok(BlerModel::new(params)?.linear_psi())
}

pub fn linearize_secure(gamma_ec: f64, params: &SystemParams) -> Result<PiecewiseBler> {
    Ok(BlerModel::new(params)?.linear_secure(gamma_ec))
}

/// Secure BLER of the CU for one pair of squared gains.
pub fn secure_bler_instantaneous(
    gain_sq_c: f64,
    gain_sq_e: f64,
    params: &SystemParams,
    use_linear: bool,
) -> Result<f64> {
    let model = BlerModel::new(params)?;
    Ok(model.secure_bler(&sinr_set(gain_sq_c, gain_sq_e, params), use_linear))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::norm_pdf;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn defaults() -> SystemParams {
        SystemParams::default()
    }

    fn model() -> BlerModel {
        BlerModel::new(&defaults()).unwrap()
    }

    /// Q by trapezoid integration of the normal density, independent of erfc.
    fn q_oracle(x: f64) -> f64 {
        let (a, b) = if x >= 0.0 {
            (x, x + 40.0)
        } else {
            (-x, -x + 40.0)
        };
        let n = 400_000;
        let h = (b - a) / n as f64;
        let mut s = 0.5 * (norm_pdf(a) + norm_pdf(b));
        for i in 1..n {
            s += norm_pdf(a + i as f64 * h);
        }
        let tail = s * h;
        if x >= 0.0 {
            tail
        } else {
            1.0 - tail
        }
    }

    #[test]
    fn sinr_set_limits() {
        let p = defaults();
        let s = sinr_set(0.0, 0.0, &p);
        for g in [s.gamma_ce, s.gamma_cc, s.gamma_cce, s.gamma_ee, s.gamma_ec] {
            assert_eq!(g, 0.0);
        }
        let s = sinr_set(1e12, 1e12, &SystemParams { p_mw: 100.0, ..p });
        assert_relative_eq!(s.gamma_cc, 4.0, max_relative = 1e-6);
    }

    #[test]
    fn sinr_set_hand_computation() {
        let p = SystemParams {
            p_mw: 100.0,
            ..defaults()
        };
        let s = sinr_set(50.0, 50.0, &p);
        // CU: 100 * 200^-2 * 50 = 0.125
        let rx_c = 100.0 / (200.0f64 * 200.0) * 50.0;
        assert_relative_eq!(
            s.gamma_ce,
            0.8 * rx_c / (0.25 * rx_c + 0.001),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            s.gamma_cc,
            0.2 * rx_c / (0.05 * rx_c + 0.001),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            s.gamma_cce,
            0.2 * rx_c / (0.85 * rx_c + 0.001),
            max_relative = 1e-14
        );
        // EU: 100 * 800^-2 * 50
        let rx_e = 100.0 / (800.0f64 * 800.0) * 50.0;
        assert_relative_eq!(
            s.gamma_ee,
            0.8 * rx_e / (0.25 * rx_e + 0.001),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            s.gamma_ec,
            0.2 * rx_e / (0.05 * rx_e + 0.001),
            max_relative = 1e-14
        );
        assert_abs_diff_eq!(s.gamma_cc, 3.448_276, epsilon = 1e-6);
    }

    #[test]
    fn dispersion_values() {
        assert_eq!(dispersion(0.0), 0.0);
        assert_abs_diff_eq!(dispersion(1e12), 2.0814, epsilon = 1e-4);
        assert_abs_diff_eq!(dispersion(1e12), DISPERSION_LIMIT, epsilon = 1e-6);
        assert_abs_diff_eq!(dispersion(1.0), 1.5610, epsilon = 1e-4);
    }

    #[test]
    fn psi_values() {
        let m = model();
        assert_abs_diff_eq!(m.beta(), 0.681_79, epsilon = 1e-5);
        assert_abs_diff_eq!(m.psi(m.beta()), 0.5, epsilon = 1e-12);
        assert_eq!(m.psi(0.0), 1.0);
        let v = m.psi(2.0);
        let x = (3f64.log2() - 0.75) / (dispersion(2.0) / 200.0).sqrt();
        assert!(v > 0.0 && v < 0.5);
        assert_relative_eq!(v, q_oracle(x), max_relative = 1e-6);
    }

    #[test]
    fn beta_tilde_values() {
        let m = model();
        assert_abs_diff_eq!(m.beta_tilde(0.0), 1.5f64.exp2() - 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m.beta_tilde(0.0), 1.8284, epsilon = 1e-4);
        let half = BlerModel::new(&SystemParams {
            delta: 0.5,
            ..defaults()
        })
        .unwrap();
        assert_eq!(half.mu, 0.0);
        assert_relative_eq!(
            half.beta_tilde(0.7),
            1.7 * 1.5f64.exp2() - 1.0,
            max_relative = 1e-8
        );
    }

    #[test]
    fn phi_values() {
        let m = model();
        assert_eq!(m.secure(3.0, 3.0), 1.0);
        for g in [0.0, 0.3, 1.0, 3.9] {
            assert_abs_diff_eq!(m.secure(m.beta_tilde(g), g), 0.5, epsilon = 1e-9);
        }
        let v = m.secure(10.0, 0.5);
        let mu = 2.326_347_874_040_841;
        let gap = (11.0f64 / 1.5).log2() - mu * dispersion(0.5).sqrt() / 200f64.sqrt() - 1.5;
        let x = 200f64.sqrt() / dispersion(10.0).sqrt() * gap;
        assert!(v > 0.0 && v < 0.5);
        assert_relative_eq!(v, q_oracle(x), max_relative = 1e-6);
    }

    #[test]
    fn linear_surrogates() {
        let m = model();
        let psi = m.linear_psi();
        assert_abs_diff_eq!(psi.kappa, 4.1724, epsilon = 1e-4);
        let k_alt = (2.0 * PI * (1.5f64.exp2() - 1.0) / 200.0).powf(-0.5);
        assert_relative_eq!(psi.kappa, k_alt, max_relative = 1e-12);
        assert_eq!(psi.eval(psi.alpha_th), 0.5);
        assert_eq!(psi.eval(psi.alpha_low()), 1.0);
        assert_eq!(psi.eval(psi.alpha_up()), 0.0);

        let beta = m.beta();
        let gap = (0..=10_000)
            .map(|i| 4.0 * beta * i as f64 / 10_000.0)
            .map(|g| (psi.eval(g) - m.psi(g)).abs())
            .fold(0.0, f64::max);
        // A tangent ramp clamped to [0, 1] misses a Gaussian tail by
        // Q(sqrt(pi/2)) ~ 0.105 where it reaches 0; skew adds a little.
        let floor = crate::numerics::q_func((PI / 2.0).sqrt());
        assert!(gap > floor - 0.01 && gap < floor + 0.025, "sup gap {gap}");

        let sec = m.linear_secure(0.4);
        assert_eq!(sec.alpha_th, m.beta_tilde(0.4));
        assert_relative_eq!(
            sec.kappa,
            surrogate_slope(sec.alpha_th, 200.0),
            max_relative = 0.0
        );
    }

    #[test]
    fn instantaneous_reference_points() {
        let p = defaults();
        assert_eq!(secure_bler_instantaneous(0.0, 0.0, &p, false).unwrap(), 1.0);
        assert_eq!(secure_bler_instantaneous(0.0, 0.0, &p, true).unwrap(), 1.0);

        // silent eavesdropper, near-ideal hardware, saturated CU
        let q = SystemParams {
            rho2_c: 1e-4,
            p_mw: 1e4,
            ..p.clone()
        };
        let m = BlerModel::new(&q).unwrap();
        let eps = secure_bler_instantaneous(1e12, 0.0, &q, false).unwrap();
        assert_abs_diff_eq!(eps, m.secure(q.map_cc().eval(1e12), 0.0), epsilon = 1e-9);

        // mean gains: term by term
        let stats_mean_sq = (20.0 * PI * 0.5 / 4.0f64).powi(2);
        let e_mean_sq = (20.0 * PI * (0.025f64).sqrt() / 4.0).powi(2);
        let s = sinr_set(stats_mean_sq, e_mean_sq, &p);
        let m = model();
        let (psi, phi, xi) = (
            m.psi(s.gamma_ce),
            m.secure(s.gamma_cc, s.gamma_ec),
            m.secure(s.gamma_cce, s.gamma_ec),
        );
        let eps = secure_bler_instantaneous(stats_mean_sq, e_mean_sq, &p, false).unwrap();
        assert_abs_diff_eq!(eps, phi * (1.0 - psi) + psi * xi, epsilon = 1e-14);
    }

    proptest! {
        #[test]
        fn beta_tilde_increasing(g in 0.0f64..4.0, h in 1e-6f64..1.0) {
            let m = model();
            prop_assert!(m.beta_tilde(g + h) > m.beta_tilde(g));
        }

        #[test]
        fn threshold_identity(g in 0.0f64..4.0) {
            let m = model();
            prop_assert!((m.secure(m.beta_tilde(g), g) - 0.5).abs() < 1e-9);
        }

        #[test]
        fn xi_not_below_phi(z in 0.0f64..1e4, ze in 0.0f64..1e3, p in 1e-1f64..1e4) {
            let q = SystemParams { p_mw: p, ..defaults() };
            let m = BlerModel::new(&q).unwrap();
            let s = sinr_set(z, ze, &q);
            prop_assert!(s.gamma_cce <= s.gamma_cc);
            prop_assert!(m.secure(s.gamma_cce, s.gamma_ec) >= m.secure(s.gamma_cc, s.gamma_ec));
        }

        #[test]
        fn sinrs_respect_ceilings(z in 0.0f64..1e12, ze in 0.0f64..1e12, zeta in 0.0f64..1.0) {
            let q = SystemParams { zeta, ..defaults() };
            let s = sinr_set(z, ze, &q);
            prop_assert!(s.gamma_cc <= q.a_c / (zeta * q.a_e + q.rho2_c));
            prop_assert!(s.gamma_ce <= q.a_e / (q.a_c + q.rho2_c));
            prop_assert!(s.gamma_ec <= q.a_c / q.rho2_e);
        }

        #[test]
        fn surrogate_shape(th in 0.01f64..10.0, kappa in 0.1f64..20.0, g in -5.0f64..20.0) {
            let s = PiecewiseBler { alpha_th: th, kappa };
            let v = s.eval(g);
            prop_assert!((0.0..=1.0).contains(&v));
            if g > s.alpha_low() && g < s.alpha_up() {
                prop_assert!((v - (0.5 - kappa * (g - th))).abs() < 1e-12);
            }
        }

        #[test]
        fn eps_non_increasing_in_cu_gain(ze in 0.0f64..100.0, z in 0.0f64..1e4, dz in 0.0f64..1e3) {
            let p = SystemParams { p_mw: 100.0, ..defaults() };
            let a = secure_bler_instantaneous(z, ze, &p, false).unwrap();
            let b = secure_bler_instantaneous(z + dz, ze, &p, false).unwrap();
            prop_assert!(b <= a + 1e-12);
        }

        #[test]
        fn cu_distortion_never_helps(z in 0.0f64..1e4, ze in 0.0f64..1e4, p in 1e-1f64..1e4) {
            let hi = SystemParams { p_mw: p, ..defaults() };
            let ideal = SystemParams { rho2_c: 0.0, ..hi.clone() };
            let a = secure_bler_instantaneous(z, ze, &hi, false).unwrap();
            let b = secure_bler_instantaneous(z, ze, &ideal, false).unwrap();
            prop_assert!(a >= b - 1e-12);
        }

        #[test]
        fn residual_sic_never_helps(z in 0.0f64..1e4, ze in 0.0f64..1e4, zeta in 0.0f64..1.0) {
            let base = SystemParams { p_mw: 100.0, ..defaults() };
            let worse = SystemParams { zeta, ..base.clone() };
            let a = secure_bler_instantaneous(z, ze, &worse, false).unwrap();
            let b = secure_bler_instantaneous(z, ze, &base, false).unwrap();
            prop_assert!(a >= b - 1e-12);
        }
    }
}
