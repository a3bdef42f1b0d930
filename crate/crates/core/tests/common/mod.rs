//! Brute-force references shared by the integration tests and the
//! acceptance harness.
#![allow(dead_code)]

use fasris_core::analytic::AnalyticModel;
use fasris_core::SystemParams;

/// Eight log-spaced powers from 1 to 1000 mW.
pub fn power_grid() -> Vec<f64> {
    (0..8).map(|i| 10f64.powf(3.0 * i as f64 / 7.0)).collect()
}

pub fn at_power(p_mw: f64) -> SystemParams {
    SystemParams {
        p_mw,
        ..SystemParams::default()
    }
}

/// `|got - want| <= rel * |want| + floor`.
pub fn close(got: f64, want: f64, rel: f64, floor: f64) -> bool {
    (got - want).abs() <= rel * want.abs() + floor
}

#[derive(Debug, Clone, Copy)]
pub struct Components {
    pub phi: f64,
    pub psi_phi: f64,
    pub psi_xi: f64,
}

/// Midpoint Riemann sums of the three surrogate expectations on an `n x n`
/// grid over both users' squared-gain supports, plus the zero-gain atoms.
pub fn riemann_components(m: &AnalyticModel, n: usize) -> Components {
    let axis = |lo: f64, hi: f64| -> (Vec<f64>, f64) {
        let h = (hi - lo) / n as f64;
        ((0..n).map(|i| lo + (i as f64 + 0.5) * h).collect(), h)
    };
    let (c_lo, c_hi) = m.dist_c.support();
    let (e_lo, e_hi) = m.dist_e.support();
    let (mut zc, hc) = axis(c_lo, c_hi);
    let (mut ze, he) = axis(e_lo, e_hi);
    let mut wc: Vec<f64> = zc
        .iter()
        .map(|&z| m.dist_c.pdf_sq(z).unwrap() * hc)
        .collect();
    let mut we: Vec<f64> = ze
        .iter()
        .map(|&z| m.dist_e.pdf_sq(z).unwrap() * he)
        .collect();
    zc.push(0.0);
    wc.push(m.dist_c.atom());
    ze.push(0.0);
    we.push(m.dist_e.atom());

    let psi: Vec<f64> = zc
        .iter()
        .map(|&z| m.psi_lin.eval(m.map_ce.eval(z)))
        .collect();
    let g_cc: Vec<f64> = zc.iter().map(|&z| m.map_cc.eval(z)).collect();
    let g_cce: Vec<f64> = zc.iter().map(|&z| m.map_cce.eval(z)).collect();

    let (mut phi, mut psi_phi, mut psi_xi) = (0.0, 0.0, 0.0);
    for (&z, &w) in ze.iter().zip(&we) {
        let sec = m.bler.linear_secure(m.map_ec.eval(z));
        let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
        for i in 0..zc.len() {
            let s = sec.eval(g_cc[i]);
            a += s * wc[i];
            b += psi[i] * s * wc[i];
            c += psi[i] * sec.eval(g_cce[i]) * wc[i];
        }
        phi += w * a;
        psi_phi += w * b;
        psi_xi += w * c;
    }
    Components {
        phi,
        psi_phi,
        psi_xi,
    }
}
