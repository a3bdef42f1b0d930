//! Port correlation, block-correlation approximation (BCA) and the
//! CLT-based distribution of the selected-port gain.
//!
//! The cascaded gain of every port is approximated as Gaussian with the
//! closed-form RIS moments. Ports inside one BCA block are treated as
//! identical, and blocks share a common component with correlation `rho0`:
//!
//! ```text
//! gamma_k = E + sqrt(1 - rho0) d_k + sqrt(rho0) d_0,   d ~ N(0, V)
//! ```
//!
//! so the maximum over `B` blocks has CDF
//! `int phi_V(tau) Phi((y - E - sqrt(rho0) tau) / sqrt(V (1 - rho0)))^B dtau`,
//! evaluated with a Gauss-Chebyshev rule on `[-H, H]`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{invalid, Error, Result};
use crate::numerics::{bisect_monotone, norm_cdf, norm_pdf, sinc, ChebyshevRule};
use crate::params::{SinrMap, SystemParams, User};

/// Intra-block coefficient used by [`fit_bca`] throughout the pipeline.
pub const BCA_MU: f64 = 0.97;

/// Share of the correlation trace the BCA blocks must capture.
pub const BCA_ENERGY: f64 = 0.999;

/// Eigenvalue floor applied before factorization.
pub const EIGEN_FLOOR: f64 = 1e-10;

/// Mass left outside [`GainDistribution::support`] on each side.
pub const SUPPORT_TAIL: f64 = 1e-10;

/// Default Gauss-Chebyshev order of the gain CDF.
pub const DEFAULT_CDF_ORDER: usize = 30;

/// Half-width of the common-component integral in standard deviations.
pub const MIXTURE_HALF_WIDTH: f64 = 8.0;

/// `pi (4 - pi) / (16 - pi^2)`: correlation between blocks.
pub fn rho0() -> f64 {
    PI * (4.0 - PI) / (16.0 - PI * PI)
}

/// Spatial correlation of the fluid-antenna ports.
#[derive(Debug, Clone, PartialEq)]
pub struct PortCorrelation {
    matrix: DMatrix<f64>,
    eigenvalues: Vec<f64>,
    factor: DMatrix<f64>,
    min_eigenvalue: f64,
    clipped: bool,
}

impl PortCorrelation {
    /// Builds the correlation from an explicit symmetric unit-diagonal matrix.
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        let n = matrix.nrows();
        if n == 0 || matrix.ncols() != n {
            return Err(invalid(
                "correlation",
                "matrix must be square and non-empty",
            ));
        }
        for i in 0..n {
            if (matrix[(i, i)] - 1.0).abs() > 1e-12 {
                return Err(invalid(
                    "correlation",
                    format!("diagonal entry {i} is not 1"),
                ));
            }
            for j in 0..i {
                if (matrix[(i, j)] - matrix[(j, i)]).abs() > 1e-12 {
                    return Err(invalid("correlation", "matrix is not symmetric"));
                }
            }
        }
        let eig = SymmetricEigen::new(matrix.clone());
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let min_eigenvalue = eig
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eigenvalue < -1e-8 {
            return Err(invalid(
                "correlation",
                format!("matrix is not positive semidefinite (eigenvalue {min_eigenvalue})"),
            ));
        }
        let clipped = min_eigenvalue < EIGEN_FLOOR;
        let eigenvalues: Vec<f64> = order
            .iter()
            .map(|&k| eig.eigenvalues[k].max(EIGEN_FLOOR))
            .collect();
        let mut factor = DMatrix::zeros(n, n);
        for (col, &k) in order.iter().enumerate() {
            let scale = eigenvalues[col].sqrt();
            for row in 0..n {
                factor[(row, col)] = eig.eigenvectors[(row, k)] * scale;
            }
        }
        Ok(Self {
            matrix,
            eigenvalues,
            factor,
            min_eigenvalue,
            clipped,
        })
    }

    /// The trivial 1x1 correlation of a single port.
    pub fn single() -> Self {
        Self::from_matrix(DMatrix::from_element(1, 1, 1.0)).expect("1x1 identity")
    }

    /// Port count.
    pub fn len(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Eigenvalues after clipping, in descending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `A` with `A A^T` equal to the clipped matrix.
    pub fn factor(&self) -> &DMatrix<f64> {
        &self.factor
    }

    /// Smallest eigenvalue before clipping.
    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    /// Whether any eigenvalue was raised to [`EIGEN_FLOOR`].
    pub fn clipped(&self) -> bool {
        self.clipped
    }
}

/// Sinc correlation of `ports` equally spaced ports over `w` wavelengths.
pub fn port_correlation(ports: usize, w: f64) -> Result<PortCorrelation> {
    if ports < 2 {
        return Err(invalid(
            "L",
            format!("port correlation needs at least 2 ports, got {ports}"),
        ));
    }
    if !(w > 0.0 && w.is_finite()) {
        return Err(invalid("W", format!("must be positive, got {w}")));
    }
    let step = 2.0 * PI * w / (ports - 1) as f64;
    let matrix = DMatrix::from_fn(ports, ports, |i, j| sinc(step * (i as f64 - j as f64)));
    PortCorrelation::from_matrix(matrix)
}

/// Correlation for a user's port count; a single port needs no matrix.
pub fn correlation_for(params: &SystemParams) -> Result<PortCorrelation> {
    if params.ports == 1 {
        Ok(PortCorrelation::single())
    } else {
        port_correlation(params.ports, params.fas_size)
    }
}

/// Block-diagonal constant-correlation fit of a port correlation matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct BcaModel {
    pub block_sizes: Vec<usize>,
    pub mu: f64,
    /// Frobenius distance between the matrix and its block approximation.
    pub distance: f64,
}

impl BcaModel {
    pub fn blocks(&self) -> usize {
        self.block_sizes.len()
    }

    /// The block-diagonal matrix the fit stands for.
    pub fn approximation(&self) -> DMatrix<f64> {
        let n: usize = self.block_sizes.iter().sum();
        let mut m = DMatrix::zeros(n, n);
        let mut start = 0;
        for &size in &self.block_sizes {
            for i in start..start + size {
                for j in start..start + size {
                    m[(i, j)] = if i == j { 1.0 } else { self.mu };
                }
            }
            start += size;
        }
        m
    }
}

/// Fits a BCA model with intra-block coefficient `mu`.
///
/// The block count is the number of leading eigenvalues holding
/// [`BCA_ENERGY`] of the trace. Among all contiguous partitions into that many
/// blocks, the one closest in Frobenius norm is chosen by dynamic programming.
pub fn fit_bca(corr: &PortCorrelation, mu: f64) -> Result<BcaModel> {
    if !(mu > 0.9 && mu < 1.0) {
        return Err(invalid("mu", format!("must lie in (0.9, 1), got {mu}")));
    }
    let n = corr.len();
    let trace: f64 = corr.eigenvalues().iter().sum();
    let mut acc = 0.0;
    let mut blocks = n;
    for (k, &lambda) in corr.eigenvalues().iter().enumerate() {
        acc += lambda;
        if acc >= BCA_ENERGY * trace {
            blocks = k + 1;
            break;
        }
    }

    let s = corr.matrix();
    let mut offdiag = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                offdiag += s[(i, j)] * s[(i, j)];
            }
        }
    }
    // Replacing the in-block entries of the zero matrix by mu changes the
    // squared error by this much.
    let block_cost = |start: usize, end: usize| -> f64 {
        let mut c = 0.0;
        for i in start..end {
            for j in start..end {
                if i != j {
                    let v = s[(i, j)];
                    c += (v - mu) * (v - mu) - v * v;
                }
            }
        }
        c
    };

    // best[k][j]: cheapest split of the first j ports into k blocks
    let inf = f64::INFINITY;
    let mut best = vec![vec![inf; n + 1]; blocks + 1];
    let mut prev = vec![vec![0usize; n + 1]; blocks + 1];
    best[0][0] = 0.0;
    for k in 1..=blocks {
        for j in k..=n {
            for i in (k - 1)..j {
                if best[k - 1][i].is_finite() {
                    let c = best[k - 1][i] + block_cost(i, j);
                    if c < best[k][j] {
                        best[k][j] = c;
                        prev[k][j] = i;
                    }
                }
            }
        }
    }
    let mut sizes = Vec::with_capacity(blocks);
    let mut j = n;
    for k in (1..=blocks).rev() {
        let i = prev[k][j];
        sizes.push(j - i);
        j = i;
    }
    sizes.reverse();
    let distance = (offdiag + best[blocks][n]).max(0.0).sqrt();
    Ok(BcaModel {
        block_sizes: sizes,
        mu,
        distance,
    })
}

/// Gaussian moments of one port's cascaded amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CltStats {
    pub mean: f64,
    pub variance: f64,
    pub rho0: f64,
    pub blocks: usize,
    pub user: User,
}

/// CLT moments for `user`, with the block count taken from `bca`.
pub fn clt_stats(params: &SystemParams, user: User, bca: &BcaModel) -> CltStats {
    let (e1, e2) = params.variances(user);
    let m = params.m_ris as f64;
    CltStats {
        mean: m * PI * (e1 * e2).sqrt() / 4.0,
        variance: m * e1 * e2 * (1.0 - PI * PI / 16.0),
        rho0: rho0(),
        blocks: bca.blocks(),
        user,
    }
}

/// Distribution of the selected-port amplitude and its square.
///
/// Negative amplitudes carry about `1e-10` or less of the mass at realistic
/// RIS sizes; in the squared-gain view they form an atom at zero, so
/// `cdf_sq(0) = cdf_amp(0)`.
#[derive(Debug, Clone)]
pub struct GainDistribution {
    stats: CltStats,
    half_width: f64,
    sd_cond: f64,
    shift: Vec<f64>,
    weight: Vec<f64>,
    support: (f64, f64),
}

impl GainDistribution {
    /// Builds the distribution with Chebyshev order `order` on `[-H, H]`.
    pub fn new(stats: CltStats, order: usize, half_width: f64) -> Result<Self> {
        if order == 0 {
            return Err(invalid("rule_order", "must be positive"));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(invalid("H", format!("must be positive, got {half_width}")));
        }
        let rule = ChebyshevRule::new(order)?;
        let sd = stats.variance.sqrt();
        let sqrt_rho0 = stats.rho0.sqrt();
        let mut shift = Vec::with_capacity(order);
        let mut weight = Vec::with_capacity(order);
        for (q, w) in rule.iter() {
            let tau = half_width * q;
            shift.push(stats.mean + sqrt_rho0 * tau);
            weight.push(half_width * w * norm_pdf(tau / sd) / sd);
        }
        let mut dist = Self {
            stats,
            half_width,
            sd_cond: (stats.variance * (1.0 - stats.rho0)).sqrt(),
            shift,
            weight,
            support: (0.0, 0.0),
        };
        dist.support = dist.find_support()?;
        Ok(dist)
    }

    /// Default construction: order [`DEFAULT_CDF_ORDER`], `H = 8 sqrt(V)`.
    pub fn with_defaults(stats: CltStats) -> Result<Self> {
        Self::new(
            stats,
            DEFAULT_CDF_ORDER,
            MIXTURE_HALF_WIDTH * stats.variance.sqrt(),
        )
    }

    /// Full chain for one user: port correlation, BCA fit, CLT moments.
    pub fn for_user(params: &SystemParams, user: User, order: usize) -> Result<Self> {
        let corr = correlation_for(params)?;
        let bca = fit_bca(&corr, BCA_MU)?;
        let stats = clt_stats(params, user, &bca);
        Self::new(stats, order, MIXTURE_HALF_WIDTH * stats.variance.sqrt())
    }

    pub fn stats(&self) -> &CltStats {
        &self.stats
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Sum of the mixture weights; equals 1 up to quadrature error.
    pub fn weight_sum(&self) -> f64 {
        self.weight.iter().sum()
    }

    /// CDF of the selected-port amplitude.
    pub fn cdf_amp(&self, y: f64) -> f64 {
        let b = self.stats.blocks as i32;
        let mut acc = 0.0;
        for (s, w) in self.shift.iter().zip(&self.weight) {
            acc += w * norm_cdf((y - s) / self.sd_cond).powi(b);
        }
        acc.clamp(0.0, 1.0)
    }

    /// Density of the selected-port amplitude.
    pub fn pdf_amp(&self, y: f64) -> f64 {
        let b = self.stats.blocks as i32;
        let mut acc = 0.0;
        for (s, w) in self.shift.iter().zip(&self.weight) {
            let x = (y - s) / self.sd_cond;
            acc += w * norm_cdf(x).powi(b - 1) * norm_pdf(x);
        }
        (acc * b as f64 / self.sd_cond).max(0.0)
    }

    /// CDF of the squared gain.
    pub fn cdf_sq(&self, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(Error::NegativeArgument {
                what: "squared gain",
                value: t,
            });
        }
        Ok(self.cdf_sq_at(t))
    }

    /// Density of the squared gain (continuous part; 0 at z = 0).
    pub fn pdf_sq(&self, z: f64) -> Result<f64> {
        if z < 0.0 {
            return Err(Error::NegativeArgument {
                what: "squared gain",
                value: z,
            });
        }
        Ok(self.pdf_sq_at(z))
    }

    /// Probability that the squared gain is exactly zero.
    pub fn atom(&self) -> f64 {
        self.cdf_amp(0.0)
    }

    pub(crate) fn cdf_sq_at(&self, t: f64) -> f64 {
        if t == f64::INFINITY {
            return 1.0;
        }
        self.cdf_amp(t.max(0.0).sqrt())
    }

    pub(crate) fn pdf_sq_at(&self, z: f64) -> f64 {
        if z <= 0.0 || !z.is_finite() {
            return 0.0;
        }
        let r = z.sqrt();
        self.pdf_amp(r) / (2.0 * r)
    }

    /// Squared-gain interval outside which each tail holds [`SUPPORT_TAIL`].
    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    fn find_support(&self) -> Result<(f64, f64)> {
        let sd = self.stats.variance.sqrt();
        let lo = self.stats.mean - 12.0 * sd;
        let hi = self.stats.mean + 12.0 * sd;
        let cdf = |y: f64| self.cdf_amp(y);
        let y_lo = bisect_monotone(cdf, SUPPORT_TAIL, lo, hi, 1e-13)?;
        let y_hi = bisect_monotone(cdf, 1.0 - SUPPORT_TAIL, lo, hi, 1e-13)?;
        Ok((y_lo.max(0.0).powi(2), y_hi.max(0.0).powi(2)))
    }

    /// CDF of `map(z)`: exactly 1 at and above the map's ceiling.
    pub fn cdf_sinr(&self, map: &SinrMap, t: f64) -> f64 {
        self.cdf_sq_at(map.critical_gain(t))
    }

    /// Density of `map(z)`, zero outside `[0, ceiling)`.
    pub fn pdf_sinr(&self, map: &SinrMap, y: f64) -> f64 {
        if y <= 0.0 || y >= map.ceiling() {
            return 0.0;
        }
        let z = map.critical_gain(y);
        self.pdf_sq_at(z) * map.critical_gain_slope(y)
    }
}

/// CDF of the selected-port amplitude at `y`.
pub fn cdf_opt_gain(y: f64, stats: &CltStats, rule_order: usize, half_width: f64) -> Result<f64> {
    Ok(GainDistribution::new(*stats, rule_order, half_width)?.cdf_amp(y))
}

/// Density of the selected-port amplitude at `y`.
pub fn pdf_opt_gain(y: f64, stats: &CltStats, rule_order: usize, half_width: f64) -> Result<f64> {
    Ok(GainDistribution::new(*stats, rule_order, half_width)?.pdf_amp(y))
}

/// CDF of the squared gain.
pub fn cdf_sq_gain(t: f64, dist: &GainDistribution) -> Result<f64> {
    dist.cdf_sq(t)
}

/// Density of the squared gain.
pub fn pdf_sq_gain(z: f64, dist: &GainDistribution) -> Result<f64> {
    dist.pdf_sq(z)
}

/// CDF of the CU's post-SIC SINR.
pub fn cdf_sinr_cc(t: f64, params: &SystemParams, dist_c: &GainDistribution) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::NegativeArgument {
            what: "SINR",
            value: t,
        });
    }
    Ok(dist_c.cdf_sinr(&params.map_cc(), t))
}

/// Density of the EU's SINR on the CU message.
pub fn pdf_sinr_ec(y: f64, params: &SystemParams, dist_e: &GainDistribution) -> Result<f64> {
    if y < 0.0 {
        return Err(Error::NegativeArgument {
            what: "SINR",
            value: y,
        });
    }
    Ok(dist_e.pdf_sinr(&params.map_ec(), y))
}
