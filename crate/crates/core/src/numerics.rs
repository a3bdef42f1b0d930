//! Special functions, fixed-order Gauss-Chebyshev quadrature and the two
//! root finders used throughout the crate.
//!
//! Everything here is pure and allocation-free after construction, so the
//! same [`ChebyshevRule`] can be shared across threads and sweep points.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use thiserror::Error;

/// 1/sqrt(2*pi)
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Failures raised by the numerical primitives.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("{what} outside its domain: {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("quadrature order must be at least 1")]
    ZeroOrder,

    #[error("integrand is not finite at x = {node} (value {value})")]
    NonFinite { node: f64, value: f64 },

    #[error("degenerate quadratic: both leading coefficients are zero")]
    DegenerateQuadratic,

    #[error("target {target} not bracketed: g({lo}) = {g_lo}, g({hi}) = {g_hi}")]
    Bracket {
        target: f64,
        lo: f64,
        hi: f64,
        g_lo: f64,
        g_hi: f64,
    },
}

/// Gaussian tail probability Q(x) = P(N(0,1) > x).
pub fn q_func(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// Standard normal CDF, accurate in both tails.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Standard normal density.
pub fn norm_pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Inverse of [`q_func`]: returns x with Q(x) = p.
///
/// Starts from Acklam's rational approximation of the normal quantile and
/// polishes with Newton steps on Q itself.
pub fn q_inv(p: f64) -> Result<f64, NumericsError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(NumericsError::Domain {
            what: "probability",
            value: p,
        });
    }
    // Q(x) = p  <=>  x = -Phi^{-1}(p)
    let mut x = -acklam_quantile(p);
    for _ in 0..3 {
        let density = norm_pdf(x);
        if density <= 0.0 {
            break;
        }
        let step = (q_func(x) - p) / density;
        x += step;
        if step.abs() <= 1e-15 * x.abs().max(1.0) {
            break;
        }
    }
    Ok(x)
}

fn acklam_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.024_25;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

/// sin(x)/x with sinc(0) = 1.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        // sin x / x = 1 - x^2/6 + O(x^4)
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Gauss-Chebyshev rule of the first kind, used on plain integrals through
/// the `sqrt(1 - t^2)` weight correction.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl ChebyshevRule {
    pub fn new(order: usize) -> Result<Self, NumericsError> {
        if order == 0 {
            return Err(NumericsError::ZeroOrder);
        }
        let u = order as f64;
        let nodes: Vec<f64> = (1..=order)
            .map(|p| ((2 * p - 1) as f64 * PI / (2.0 * u)).cos())
            .collect();
        let weights = nodes
            .iter()
            .map(|t| PI / u * (1.0 - t * t).max(0.0).sqrt())
            .collect();
        Ok(Self { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes t_p in (-1, 1), strictly decreasing.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// `(pi/U) * sqrt(1 - t_p^2)` for each node.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Iterates `(t_p, w_p)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// Approximates the integral of `f` over `[a, b]`.
    pub fn integrate<F>(&self, a: f64, b: f64, mut f: F) -> Result<f64, NumericsError>
    where
        F: FnMut(f64) -> f64,
    {
        self.try_integrate(a, b, |x| Ok::<f64, NumericsError>(f(x)))
    }

    /// Like [`integrate`](Self::integrate) for fallible integrands.
    pub fn try_integrate<F, E>(&self, a: f64, b: f64, mut f: F) -> Result<f64, E>
    where
        F: FnMut(f64) -> Result<f64, E>,
        E: From<NumericsError>,
    {
        if a == b {
            return Ok(0.0);
        }
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (t, w) in self.iter() {
            let x = half * t + mid;
            let value = f(x)?;
            if !value.is_finite() {
                return Err(NumericsError::NonFinite { node: x, value }.into());
            }
            acc += w * value;
        }
        Ok(half * acc)
    }
}

/// Convenience constructor mirroring [`ChebyshevRule::new`].
pub fn chebyshev_rule(order: usize) -> Result<ChebyshevRule, NumericsError> {
    ChebyshevRule::new(order)
}

/// Free-function form of [`ChebyshevRule::integrate`].
pub fn integrate_chebyshev<F>(
    f: F,
    a: f64,
    b: f64,
    rule: &ChebyshevRule,
) -> Result<f64, NumericsError>
where
    F: FnMut(f64) -> f64,
{
    rule.integrate(a, b, f)
}

/// Real roots of `a2 x^2 + a1 x + a0` in ascending order.
///
/// Uses the citardauq pairing so neither root suffers cancellation.
pub fn solve_quadratic_increasing_roots(
    a2: f64,
    a1: f64,
    a0: f64,
) -> Result<Vec<f64>, NumericsError> {
    if a2 == 0.0 {
        if a1 == 0.0 {
            return Err(NumericsError::DegenerateQuadratic);
        }
        return Ok(vec![-a0 / a1]);
    }
    let disc = a1 * a1 - 4.0 * a2 * a0;
    if disc < 0.0 {
        return Ok(Vec::new());
    }
    if disc == 0.0 {
        return Ok(vec![-a1 / (2.0 * a2)]);
    }
    let q = -0.5 * (a1 + a1.signum() * disc.sqrt());
    let (r1, r2) = if q == 0.0 {
        // a1 == 0 and a0 == 0 would give disc == 0, so here a1 == 0, a0 != 0
        let r = (-a0 / a2).sqrt();
        (-r, r)
    } else {
        (q / a2, a0 / q)
    };
    Ok(if r1 <= r2 { vec![r1, r2] } else { vec![r2, r1] })
}

/// Solves `g(y) = target` for a non-decreasing `g` on `[lo, hi]`.
///
/// Stops once the residual drops below `tol` or the bracket is narrower than
/// `tol * max(1, |y|)`; at most 200 halvings.
pub fn bisect_monotone<G>(
    mut g: G,
    target: f64,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64, NumericsError>
where
    G: FnMut(f64) -> f64,
{
    let g_lo = g(lo);
    let g_hi = g(hi);
    if !(g_lo <= target && target <= g_hi) {
        return Err(NumericsError::Bracket {
            target,
            lo,
            hi,
            g_lo,
            g_hi,
        });
    }
    if g_lo == target {
        return Ok(lo);
    }
    if g_hi == target {
        return Ok(hi);
    }
    let (mut lo, mut hi) = (lo, hi);
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let value = g(mid);
        if (value - target).abs() < tol {
            return Ok(mid);
        }
        if value < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < tol * mid.abs().max(1.0) {
            return Ok(0.5 * (lo + hi));
        }
    }
    Ok(mid)
}
