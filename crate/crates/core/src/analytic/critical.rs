//! Critical gains of the surrogate ramps and the case layout on the EU
//! squared-gain axis.

use crate::error::Result;
use crate::numerics::{bisect_monotone, solve_quadratic_increasing_roots};

use super::AnalyticModel;

/// Which secure error term a quantity belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// CU decodes its message after cancelling the EU signal (Phi).
    Cancelled,
    /// CU decodes with the EU signal still present (Xi).
    Uncancelled,
}

impl Branch {
    /// Offset added to an ordering index to form the case id.
    pub fn case_offset(self) -> u8 {
        match self {
            Branch::Cancelled => 0,
            Branch::Uncancelled => 6,
        }
    }
}

/// CU squared gains at which the surrogate ramps start and stop, for a fixed
/// EU SINR. Each is `+inf` when the SINR level sits at or above the ceiling of
/// its map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalValues {
    /// Secure ramp start on the post-SIC SINR.
    pub phi_vt: f64,
    /// Secure ramp end on the post-SIC SINR.
    pub phi_ut: f64,
    /// SIC ramp start.
    pub phi_v: f64,
    /// SIC ramp end.
    pub phi_u: f64,
    /// Secure ramp start on the interference-limited SINR.
    pub phibar_vt: f64,
    /// Secure ramp end on the interference-limited SINR.
    pub phibar_ut: f64,
}

impl CriticalValues {
    /// `(secure start, secure end)` for a branch.
    pub fn secure(&self, branch: Branch) -> (f64, f64) {
        match branch {
            Branch::Cancelled => (self.phi_vt, self.phi_ut),
            Branch::Uncancelled => (self.phibar_vt, self.phibar_ut),
        }
    }

    /// `(SIC start, SIC end)`.
    pub fn sic(&self) -> (f64, f64) {
        (self.phi_v, self.phi_u)
    }
}

/// Ordering of the secure ramp `[s_lo, s_hi]` against the SIC ramp
/// `[p_lo, p_hi]`, numbered 1 to 6.
pub fn ordering(s_lo: f64, s_hi: f64, p_lo: f64, p_hi: f64) -> u8 {
    if s_hi <= p_lo {
        1
    } else if p_hi <= s_lo {
        6
    } else if s_lo <= p_lo {
        if s_hi <= p_hi {
            2
        } else {
            3
        }
    } else if s_hi <= p_hi {
        4
    } else {
        5
    }
}

fn le(a: f64, b: f64, rel: f64) -> bool {
    if a <= b {
        return true;
    }
    if a.is_infinite() || b.is_infinite() {
        return false;
    }
    a - b <= rel * a.abs().max(b.abs())
}

/// Whether ordering `k` holds for the four values, allowing ties within
/// relative tolerance `rel`.
pub fn ordering_holds(k: u8, s_lo: f64, s_hi: f64, p_lo: f64, p_hi: f64, rel: f64) -> bool {
    let chain = |xs: [f64; 4]| xs.windows(2).all(|w| le(w[0], w[1], rel));
    match k {
        1 => chain([s_lo, s_hi, p_lo, p_hi]),
        2 => chain([s_lo, p_lo, s_hi, p_hi]),
        3 => chain([s_lo, p_lo, p_hi, s_hi]),
        4 => chain([p_lo, s_lo, s_hi, p_hi]),
        5 => chain([p_lo, s_lo, p_hi, s_hi]),
        6 => chain([p_lo, p_hi, s_lo, s_hi]),
        _ => false,
    }
}

/// Case id (1-6 for [`Branch::Cancelled`], 7-12 for [`Branch::Uncancelled`]).
pub fn classify(branch: Branch, cv: &CriticalValues) -> u8 {
    let (s_lo, s_hi) = cv.secure(branch);
    let (p_lo, p_hi) = cv.sic();
    branch.case_offset() + ordering(s_lo, s_hi, p_lo, p_hi)
}

/// Why a breakpoint sits where it does.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BreakpointKind {
    /// Zero gain.
    Origin,
    /// Lower end of the EU gain support.
    SupportStart,
    /// Upper end of the EU gain support.
    SupportEnd,
    /// A secure ramp end meets the SIC ramp start.
    MeetsSicStart,
    /// A secure ramp end meets the SIC ramp end.
    MeetsSicEnd,
    /// A secure ramp end reaches the ceiling of its SINR map.
    Saturation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Breakpoint {
    /// EU squared gain.
    pub tau: f64,
    pub kind: BreakpointKind,
    /// Security threshold at `tau` (NaN for support markers).
    pub beta_tilde: f64,
}

/// A quadratic root that does not correspond to any reachable EU gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkippedRoot {
    pub kind: BreakpointKind,
    pub target: f64,
    pub root: f64,
}

/// Panel of constant case id on the EU squared-gain axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
    pub case_id: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseLayout {
    pub branch: Branch,
    /// Ascending, deduplicated.
    pub breakpoints: Vec<Breakpoint>,
    pub intervals: Vec<Interval>,
    pub skipped: Vec<SkippedRoot>,
}

/// Roots of `(2m - pi) x^2 - (4 m s + 2 pi) x + 2 m s^2 = 0`: the security
/// thresholds whose ramp start or end equals `s`.
pub fn threshold_roots(target: f64, m: f64) -> Result<Vec<f64>> {
    use std::f64::consts::PI;
    Ok(solve_quadratic_increasing_roots(
        2.0 * m - PI,
        -(4.0 * m * target + 2.0 * PI),
        2.0 * m * target * target,
    )?)
}

impl AnalyticModel {
    pub fn critical_values(&self, gamma_ec: f64) -> CriticalValues {
        let sec = self.bler.linear_secure(gamma_ec);
        let (vt, ut) = (sec.alpha_low(), sec.alpha_up());
        let (v, u) = (self.psi_lin.alpha_low(), self.psi_lin.alpha_up());
        CriticalValues {
            phi_vt: self.map_cc.critical_gain(vt),
            phi_ut: self.map_cc.critical_gain(ut),
            phi_v: self.map_ce.critical_gain(v),
            phi_u: self.map_ce.critical_gain(u),
            phibar_vt: self.map_cce.critical_gain(vt),
            phibar_ut: self.map_cce.critical_gain(ut),
        }
    }

    /// Security threshold as a function of the EU squared gain.
    pub fn beta_tilde_at(&self, tau: f64) -> f64 {
        self.bler.beta_tilde(self.map_ec.eval(tau))
    }

    /// Breakpoints where the case ordering of `branch` can change, and the
    /// intervals between them.
    pub fn critical_points(&self, branch: Branch) -> Result<CaseLayout> {
        let secure_map = match branch {
            Branch::Cancelled => self.map_cc,
            Branch::Uncancelled => self.map_cce,
        };
        let (p_lo, p_hi) = self.critical_values(0.0).sic();
        let (_, z_hi) = self.dist_e.support();

        let mut targets = Vec::new();
        for (kind, p) in [
            (BreakpointKind::MeetsSicStart, p_lo),
            (BreakpointKind::MeetsSicEnd, p_hi),
        ] {
            if p.is_finite() {
                targets.push((kind, secure_map.eval(p)));
            }
        }
        let ceiling = secure_map.ceiling();
        if ceiling.is_finite() {
            targets.push((BreakpointKind::Saturation, ceiling));
        }

        let bt_min = self.beta_tilde_at(0.0);
        let bt_max = self.beta_tilde_at(z_hi);
        let mut breakpoints = vec![
            Breakpoint {
                tau: 0.0,
                kind: BreakpointKind::Origin,
                beta_tilde: bt_min,
            },
            Breakpoint {
                tau: self.dist_e.support().0,
                kind: BreakpointKind::SupportStart,
                beta_tilde: f64::NAN,
            },
            Breakpoint {
                tau: z_hi,
                kind: BreakpointKind::SupportEnd,
                beta_tilde: f64::NAN,
            },
        ];
        let mut skipped = Vec::new();
        for (kind, target) in targets {
            for root in threshold_roots(target, self.bler.m)? {
                if !(root >= bt_min && root < bt_max) {
                    skipped.push(SkippedRoot { kind, target, root });
                    continue;
                }
                let tau = bisect_monotone(|z| self.beta_tilde_at(z), root, 0.0, z_hi, 1e-13)?;
                breakpoints.push(Breakpoint {
                    tau,
                    kind,
                    beta_tilde: root,
                });
            }
        }
        breakpoints.sort_by(|a, b| a.tau.total_cmp(&b.tau));
        breakpoints.dedup_by(|b, a| (b.tau - a.tau).abs() <= 1e-12 * a.tau.abs().max(1e-300));

        let intervals = breakpoints
            .windows(2)
            .filter(|w| w[1].tau > w[0].tau)
            .map(|w| {
                let (a, b) = (w[0].tau, w[1].tau);
                let cv = self.critical_values(self.map_ec.eval(0.5 * (a + b)));
                Interval {
                    a,
                    b,
                    case_id: classify(branch, &cv),
                }
            })
            .collect();
        Ok(CaseLayout {
            branch,
            breakpoints,
            intervals,
            skipped,
        })
    }
}
