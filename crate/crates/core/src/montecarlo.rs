//! Monte Carlo reference: correlated port gains behind a co-phased RIS,
//! port selection, and the exact secure BLER averaged over draws.
//!
//! Draws are split into fixed-size chunks, each with its own ChaCha8 stream,
//! and per-chunk statistics are merged in chunk order. Results therefore do
//! not depend on the number of worker threads.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::bler::{sinr_set, BlerModel};
use crate::channel::{correlation_for, PortCorrelation};
use crate::error::{Error, Result};
use crate::numerics::norm_cdf;
use crate::params::{SystemParams, User};

/// Draws per RNG stream.
pub const CHUNK: usize = 4096;

/// Smallest accepted sample count for averages.
pub const MIN_SAMPLES: usize = 1_000;

/// Smallest accepted sample count for the CLT goodness-of-fit study.
pub const MIN_KS_SAMPLES: usize = 100_000;

/// One draw of both users' port amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub gains_c: Vec<f64>,
    pub gains_e: Vec<f64>,
    pub selected_c: usize,
    pub selected_e: usize,
    pub gain_sq_c: f64,
    pub gain_sq_e: f64,
}

/// Per-user generator state: factorized port covariance and link variances.
#[derive(Debug, Clone)]
struct UserChannel {
    factor: DMatrix<f64>,
    /// Deterministic part of |h| (Rician line of sight).
    los: f64,
    /// Standard deviation of each real component of the scattered part.
    scatter_sd: f64,
    /// sqrt(eps2 / 2): standard deviation of each real component of v.
    v_sd: f64,
}

impl UserChannel {
    fn new(params: &SystemParams, user: User, corr: &PortCorrelation) -> Self {
        let (e1, e2) = params.variances(user);
        let (los_power, scatter_power) = match params.rician_k {
            Some(k) => (k / (k + 1.0) * e1, e1 / (k + 1.0)),
            None => (0.0, e1),
        };
        Self {
            factor: corr.factor().clone(),
            los: los_power.sqrt(),
            scatter_sd: (scatter_power / 2.0).sqrt(),
            v_sd: (e2 / 2.0).sqrt(),
        }
    }

    /// Fills `gains` with the co-phased cascade sum of every port.
    fn draw<R: Rng>(&self, rng: &mut R, elements: usize, z: &mut [(f64, f64)], gains: &mut [f64]) {
        let ports = gains.len();
        gains.iter_mut().for_each(|g| *g = 0.0);
        for _ in 0..elements {
            let hr: f64 = rng.sample::<f64, _>(StandardNormal) * self.scatter_sd + self.los;
            let hi: f64 = rng.sample::<f64, _>(StandardNormal) * self.scatter_sd;
            let h = hr.hypot(hi);
            for zk in z.iter_mut() {
                *zk = (rng.sample(StandardNormal), rng.sample(StandardNormal));
            }
            for (l, g) in gains.iter_mut().enumerate() {
                let (mut re, mut im) = (0.0, 0.0);
                for k in 0..ports {
                    let a = self.factor[(l, k)];
                    re += a * z[k].0;
                    im += a * z[k].1;
                }
                *g += h * self.v_sd * re.hypot(im);
            }
        }
    }
}

/// Index and value of the largest entry; the lowest index wins ties.
fn argmax(xs: &[f64]) -> (usize, f64) {
    let mut best = (0, xs[0]);
    for (i, &x) in xs.iter().enumerate().skip(1) {
        if x > best.1 {
            best = (i, x);
        }
    }
    best
}

/// Reusable sampler for one parameter point.
#[derive(Debug, Clone)]
pub struct ChannelSampler {
    elements: usize,
    ports: usize,
    central: UserChannel,
    eavesdropper: UserChannel,
}

impl ChannelSampler {
    pub fn new(params: &SystemParams) -> Result<Self> {
        params.validate()?;
        let corr = correlation_for(params)?;
        Ok(Self::with_correlation(params, &corr, &corr))
    }

    /// Sampler with explicit port correlations for each user.
    pub fn with_correlation(
        params: &SystemParams,
        corr_c: &PortCorrelation,
        corr_e: &PortCorrelation,
    ) -> Self {
        Self {
            elements: params.m_ris,
            ports: corr_c.len(),
            central: UserChannel::new(params, User::Central, corr_c),
            eavesdropper: UserChannel::new(params, User::Eavesdropper, corr_e),
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> ChannelRealization {
        let mut z = vec![(0.0, 0.0); self.ports];
        let mut gains_c = vec![0.0; self.ports];
        let mut gains_e = vec![0.0; self.ports];
        self.central.draw(rng, self.elements, &mut z, &mut gains_c);
        self.eavesdropper
            .draw(rng, self.elements, &mut z, &mut gains_e);
        let (selected_c, max_c) = argmax(&gains_c);
        let (selected_e, max_e) = argmax(&gains_e);
        ChannelRealization {
            gains_c,
            gains_e,
            selected_c,
            selected_e,
            gain_sq_c: max_c * max_c,
            gain_sq_e: max_e * max_e,
        }
    }

    /// Selected amplitude of one user, without allocating.
    fn selected<R: Rng>(
        &self,
        rng: &mut R,
        user: User,
        z: &mut [(f64, f64)],
        gains: &mut [f64],
    ) -> f64 {
        let ch = match user {
            User::Central => &self.central,
            User::Eavesdropper => &self.eavesdropper,
        };
        ch.draw(rng, self.elements, z, gains);
        argmax(gains).1
    }
}

/// One realization drawn from `rng`.
pub fn sample_realization<R: Rng>(
    params: &SystemParams,
    corr_c: &PortCorrelation,
    corr_e: &PortCorrelation,
    rng: &mut R,
) -> ChannelRealization {
    ChannelSampler::with_correlation(params, corr_c, corr_e).sample(rng)
}

/// RNG of chunk `chunk` in the family identified by `(seed, salt)`.
pub fn chunk_rng(seed: u64, salt: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    rng.set_stream(chunk);
    rng
}

/// Running mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(self, other: Self) -> Self {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let n = self.count + other.count;
        let d = other.mean - self.mean;
        Self {
            count: n,
            mean: self.mean + d * other.count as f64 / n as f64,
            m2: self.m2 + other.m2 + d * d * self.count as f64 * other.count as f64 / n as f64,
        }
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }
}

/// Merges in a fixed balanced tree so the rounding pattern is reproducible.
fn merge_pairwise(mut parts: Vec<Moments>) -> Moments {
    while parts.len() > 1 {
        parts = parts
            .chunks(2)
            .map(|c| if c.len() == 2 { c[0].merge(c[1]) } else { c[0] })
            .collect();
    }
    parts.pop().unwrap_or_default()
}

/// Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl From<Moments> for McEstimate {
    fn from(m: Moments) -> Self {
        Self {
            mean: m.mean,
            std_error: (m.variance() / m.count as f64).sqrt(),
            samples: m.count as usize,
        }
    }
}

/// Averages `f(gain_sq_c, gain_sq_e)` over `n` realizations.
pub fn mc_expectation<F>(params: &SystemParams, n: usize, seed: u64, f: F) -> Result<McEstimate>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    if n < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            got: n,
            min: MIN_SAMPLES,
        });
    }
    let sampler = ChannelSampler::new(params)?;
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(seed, 0, c as u64);
            let len = CHUNK.min(n - c * CHUNK);
            let mut z = vec![(0.0, 0.0); sampler.ports];
            let mut gains = vec![0.0; sampler.ports];
            let mut acc = Moments::default();
            for _ in 0..len {
                let a_c = sampler.selected(&mut rng, User::Central, &mut z, &mut gains);
                let a_e = sampler.selected(&mut rng, User::Eavesdropper, &mut z, &mut gains);
                acc.push(f(a_c * a_c, a_e * a_e));
            }
            acc
        })
        .collect();
    Ok(merge_pairwise(parts).into())
}

/// Average of the exact secure BLER over `n` channel draws.
pub fn mc_average_secure_bler(params: &SystemParams, n: usize, seed: u64) -> Result<McEstimate> {
    mc_average_secure_bler_mode(params, n, seed, false)
}

/// As [`mc_average_secure_bler`], optionally with the linear surrogates.
pub fn mc_average_secure_bler_mode(
    params: &SystemParams,
    n: usize,
    seed: u64,
    use_linear: bool,
) -> Result<McEstimate> {
    let model = BlerModel::new(params)?;
    mc_expectation(params, n, seed, |zc, ze| {
        model.secure_bler(&sinr_set(zc, ze, params), use_linear)
    })
}

/// Selected-port amplitudes of `user` for `n` draws.
pub fn sample_selected_gains(
    params: &SystemParams,
    user: User,
    n: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let sampler = ChannelSampler::new(params)?;
    let salt = match user {
        User::Central => 1,
        User::Eavesdropper => 2,
    };
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(seed, salt, c as u64);
            let len = CHUNK.min(n - c * CHUNK);
            let mut z = vec![(0.0, 0.0); sampler.ports];
            let mut gains = vec![0.0; sampler.ports];
            (0..len)
                .map(|_| sampler.selected(&mut rng, user, &mut z, &mut gains))
                .collect()
        })
        .collect();
    Ok(parts.concat())
}

/// Kolmogorov-Smirnov distance between the sample and `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsPoint {
    pub m_ris: usize,
    pub statistic: f64,
}

/// K-S distance between a single port's cascaded amplitude and the Gaussian
/// with the closed-form moments, for each RIS size in `m_values`.
pub fn ks_clt(
    params: &SystemParams,
    m_values: &[usize],
    n: usize,
    seed: u64,
) -> Result<Vec<KsPoint>> {
    if n < MIN_KS_SAMPLES {
        return Err(Error::TooFewSamples {
            got: n,
            min: MIN_KS_SAMPLES,
        });
    }
    m_values
        .iter()
        .map(|&m| {
            let p = SystemParams {
                m_ris: m,
                ports: 1,
                rician_k: None,
                ..params.clone()
            };
            let (e1, e2) = p.variances(User::Central);
            let mean = m as f64 * std::f64::consts::PI * (e1 * e2).sqrt() / 4.0;
            let var = m as f64 * e1 * e2 * (1.0 - std::f64::consts::PI.powi(2) / 16.0);
            let xs = sample_selected_gains(&p, User::Central, n, seed ^ ((m as u64) << 32))?;
            let statistic = ks_statistic(&xs, |x| norm_cdf((x - mean) / var.sqrt()));
            Ok(KsPoint {
                m_ris: m,
                statistic,
            })
        })
        .collect()
}
