//! Conditional expectations of the surrogate products given the EU SINR.
//!
//! For a fixed EU SINR, the SIC surrogate falls from 1 to 0 on the CU gain
//! interval `[p_lo, p_hi]` and the secure surrogate does the same on
//! `[s_lo, s_hi]`. Each ordering of the two intervals splits the CU gain
//! axis into a region where the product is 1, at most two ramp segments,
//! and a region where it vanishes:
//!
//! | ordering | product is 1 below | segments |
//! |---|---|---|
//! | 1: `s_lo <= s_hi <= p_lo <= p_hi` | `s_lo` | `S` on `[s_lo, s_hi]` |
//! | 2: `s_lo <= p_lo <= s_hi <= p_hi` | `s_lo` | `S` on `[s_lo, p_lo]`, `S Psi` on `[p_lo, s_hi]` |
//! | 3: `s_lo <= p_lo <= p_hi <= s_hi` | `s_lo` | `S` on `[s_lo, p_lo]`, `S Psi` on `[p_lo, p_hi]` |
//! | 4: `p_lo <= s_lo <= s_hi <= p_hi` | `p_lo` | `Psi` on `[p_lo, s_lo]`, `S Psi` on `[s_lo, s_hi]` |
//! | 5: `p_lo <= s_lo <= p_hi <= s_hi` | `p_lo` | `Psi` on `[p_lo, s_lo]`, `S Psi` on `[s_lo, p_hi]` |
//! | 6: `p_lo <= p_hi <= s_lo <= s_hi` | `p_lo` | `Psi` on `[p_lo, p_hi]` |
//!
//! Segments are integrated against the CU squared-gain density with the
//! model's inner Gauss-Chebyshev rule, clipped to the CU gain support.

use crate::error::{Error, Result};

use super::critical::{ordering_holds, Branch, CriticalValues};
use super::AnalyticModel;

/// Relative slack allowed when checking a requested case against the
/// actual critical-value ordering.
pub const CASE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Factor {
    Secure,
    Sic,
    Both,
}

impl AnalyticModel {
    /// `E[Psi_hat * S_hat | gamma_EC]` for the secure surrogate of `branch`.
    ///
    /// With `case_id = None` the case is read off the critical values; with
    /// `Some(id)` the id must match them, else a classification error.
    pub fn cond_exp(&self, branch: Branch, gamma_ec: f64, case_id: Option<u8>) -> Result<f64> {
        let cv = self.critical_values(gamma_ec);
        let actual = super::critical::classify(branch, &cv);
        let id = match case_id {
            None => actual,
            Some(id) => {
                let k = id.wrapping_sub(branch.case_offset());
                let (s_lo, s_hi) = cv.secure(branch);
                let (p_lo, p_hi) = cv.sic();
                if !(1..=6).contains(&k)
                    || !ordering_holds(k, s_lo, s_hi, p_lo, p_hi, CASE_TOLERANCE)
                {
                    return Err(Error::Classification {
                        gamma_ec,
                        requested: id,
                        actual,
                    });
                }
                id
            }
        };
        self.case_value(branch, gamma_ec, &cv, id - branch.case_offset())
    }

    fn case_value(&self, branch: Branch, gamma_ec: f64, cv: &CriticalValues, k: u8) -> Result<f64> {
        let (s_lo, s_hi) = cv.secure(branch);
        let (p_lo, p_hi) = cv.sic();
        use Factor::*;
        let (one_until, segments): (f64, [(f64, f64, Factor); 2]) = match k {
            1 => (s_lo, [(s_lo, s_hi, Secure), (0.0, 0.0, Both)]),
            2 => (s_lo, [(s_lo, p_lo, Secure), (p_lo, s_hi, Both)]),
            3 => (s_lo, [(s_lo, p_lo, Secure), (p_lo, p_hi, Both)]),
            4 => (p_lo, [(p_lo, s_lo, Sic), (s_lo, s_hi, Both)]),
            5 => (p_lo, [(p_lo, s_lo, Sic), (s_lo, p_hi, Both)]),
            _ => (p_lo, [(p_lo, p_hi, Sic), (0.0, 0.0, Both)]),
        };

        let sec = self.bler.linear_secure(gamma_ec);
        let secure_map = match branch {
            Branch::Cancelled => self.map_cc,
            Branch::Uncancelled => self.map_cce,
        };
        let psi = |z: f64| self.psi_lin.eval(self.map_ce.eval(z));
        let secure = |z: f64| sec.eval(secure_map.eval(z));

        let atom = self.dist_c.atom();
        let mut value = self.dist_c.cdf_sq_at(one_until) - atom + atom * psi(0.0) * secure(0.0);
        let (z_lo, z_hi) = self.dist_c.support();
        for (a, b, factor) in segments {
            let (a, b) = (a.max(z_lo), b.min(z_hi));
            if !(b > a) {
                continue;
            }
            value += self.inner.integrate(a, b, |z| {
                let g = match factor {
                    Secure => secure(z),
                    Sic => psi(z),
                    Both => secure(z) * psi(z),
                };
                g * self.dist_c.pdf_sq_at(z)
            })?;
        }
        Ok(value.clamp(0.0, 1.0))
    }
}

/// `E[Psi_hat Phi_hat | gamma_EC]` under the requested case (1 to 6).
pub fn cond_exp_psi_phi(gamma_ec: f64, case_id: u8, model: &AnalyticModel) -> Result<f64> {
    model.cond_exp(Branch::Cancelled, gamma_ec, Some(case_id))
}

/// `E[Psi_hat Xi_hat | gamma_EC]` under the requested case (7 to 12).
pub fn cond_exp_psi_xi(gamma_ec: f64, case_id: u8, model: &AnalyticModel) -> Result<f64> {
    model.cond_exp(Branch::Uncancelled, gamma_ec, Some(case_id))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::critical::classify;
    use crate::analytic::QuadratureOrders;
    use crate::params::SystemParams;

    fn model(p: f64) -> AnalyticModel {
        let params = SystemParams {
            p_mw: p,
            ..SystemParams::default()
        };
        AnalyticModel::new(&params, QuadratureOrders::default()).unwrap()
    }

    /// Midpoint Riemann sum of the surrogate product over the CU gain support.
    fn riemann(m: &AnalyticModel, branch: Branch, gamma_ec: f64) -> f64 {
        let sec = m.bler.linear_secure(gamma_ec);
        let map = match branch {
            Branch::Cancelled => m.map_cc,
            Branch::Uncancelled => m.map_cce,
        };
        let prod = |z: f64| m.psi_lin.eval(m.map_ce.eval(z)) * sec.eval(map.eval(z));
        let (lo, hi) = m.dist_c.support();
        let n = 200_000;
        let h = (hi - lo) / n as f64;
        let mut acc = m.dist_c.atom() * prod(0.0);
        for i in 0..n {
            let z = lo + (i as f64 + 0.5) * h;
            acc += prod(z) * m.dist_c.pdf_sq_at(z) * h;
        }
        acc
    }

    #[test]
    fn rejects_wrong_case() {
        let m = model(10.0);
        let actual = classify(Branch::Cancelled, &m.critical_values(0.1));
        let wrong = if actual == 1 { 6 } else { 1 };
        let err = cond_exp_psi_phi(0.1, wrong, &m).unwrap_err();
        assert!(matches!(err, Error::Classification { actual: a, .. } if a == actual));
        assert!(cond_exp_psi_xi(0.1, actual, &m).is_err());
        assert!(cond_exp_psi_phi(0.1, actual, &m).is_ok());
    }

    #[test]
    fn matches_riemann_oracle() {
        for p in [1.0, 10.0, 40.0, 100.0, 1000.0] {
            let m = model(p);
            for branch in [Branch::Cancelled, Branch::Uncancelled] {
                for g in [0.0, 0.01, 0.1, 0.5, 1.0, 2.0, 3.5] {
                    let got = m.cond_exp(branch, g, None).unwrap();
                    let want = riemann(&m, branch, g);
                    assert!(
                        (got - want).abs() <= 0.01 * want + 1e-9,
                        "P={p} {branch:?} g={g}: {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn bounded_and_ordered() {
        for p in [3.0, 30.0, 300.0] {
            let m = model(p);
            for g in [0.0, 0.2, 1.0, 3.0] {
                let phi = m.cond_exp(Branch::Cancelled, g, None).unwrap();
                let xi = m.cond_exp(Branch::Uncancelled, g, None).unwrap();
                assert!((0.0..=1.0).contains(&phi) && (0.0..=1.0).contains(&xi));
                assert!(xi >= phi - 1e-12, "P={p} g={g}: {xi} < {phi}");
            }
        }
    }
}
