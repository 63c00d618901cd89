//! Homogeneous interference from a Poisson field of interferers.
//!
//! Interferers outside a disc of radius `R0` form a PPP of density `ρ` with
//! unit-mean exponential (Rayleigh) power marks and path loss
//! `l(r) = (r/λ)^α`. The total received interference `I` is replaced by a
//! Gamma law with the same mean and variance, and rates are averaged over
//! that law.
//!
//! `I` is a power (W) spread over the signalling band, so it enters the SNR
//! as the flat density `I / BW` added to `N0`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, Poisson};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};
use crate::matching::{solve_for_size, SolverOptions};
use crate::model::Link;
use crate::numerics::{gamma_rule, integrate_band, QuadratureSpec};
use crate::rate::{rate_integral, shannon_rate, snr_unchecked};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InterferenceField {
    /// Interferer density, 1/m².
    pub density: f64,
    pub alpha: f64,
    /// Exclusion radius, m.
    pub r0: f64,
    /// Interferer transmit power, W.
    pub pt: f64,
    /// Wavelength, m.
    pub lambda_c: f64,
}

impl InterferenceField {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 2.0) {
            return Err(Error::Domain(format!(
                "path-loss exponent must exceed 2 for a finite mean, got {}",
                self.alpha
            )));
        }
        if !(self.density >= 0.0 && self.r0 > 0.0 && self.pt > 0.0 && self.lambda_c > 0.0) {
            return Err(Error::Domain(format!("invalid interference field {self:?}")));
        }
        Ok(())
    }

    /// One interferer per disc of radius `r0`: `ρ = 1/(π r0²)`.
    pub fn one_per_cell(r0: f64, alpha: f64, pt: f64, lambda_c: f64) -> Self {
        Self {
            density: 1.0 / (PI * r0 * r0),
            alpha,
            r0,
            pt,
            lambda_c,
        }
    }

    /// Received power from an interferer at distance `r` with mark `p`.
    #[inline]
    fn power_at(&self, r: f64, p: f64) -> f64 {
        self.pt * p * (self.lambda_c / r).powf(self.alpha)
    }
}

/// Mean (W) and variance (W²) of the total interference power.
pub fn interference_moments(field: &InterferenceField) -> Result<(f64, f64)> {
    field.validate()?;
    let InterferenceField {
        density: rho,
        alpha,
        r0,
        pt,
        lambda_c: lam,
    } = *field;
    let mean = 2.0 * PI * rho / (alpha - 2.0) * pt * lam.powf(alpha) * r0.powf(2.0 - alpha);
    let var = 2.0 * pt * pt * PI * rho / (alpha - 1.0) * lam.powf(2.0 * alpha) * r0.powf(2.0 * (1.0 - alpha));
    Ok((mean, var))
}

/// Gamma law of the interference power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaModel {
    pub k: f64,
    /// Scale, W.
    pub theta: f64,
}

impl GammaModel {
    pub fn new(k: f64, theta: f64) -> Result<Self> {
        if !(k > 0.0 && theta > 0.0 && k.is_finite() && theta.is_finite()) {
            return Err(Error::Domain(format!(
                "Gamma shape and scale must be positive (k={k}, θ={theta})"
            )));
        }
        Ok(Self { k, theta })
    }

    /// Gamma law with the given mean and variance.
    pub fn from_moments(mean: f64, variance: f64) -> Result<Self> {
        Self::new(mean * mean / variance, variance / mean)
    }

    pub fn mean(&self) -> f64 {
        self.k * self.theta
    }

    pub fn variance(&self) -> f64 {
        self.k * self.theta * self.theta
    }

    /// `σ² / E[I]² = 1/k`; the closed-form rate is trusted below 0.01.
    pub fn dispersion(&self) -> f64 {
        1.0 / self.k
    }

    /// Quadrature nodes `(I_j, w_j)` for expectations over this law.
    pub fn nodes(&self, n: usize) -> Result<Vec<(f64, f64)>> {
        Ok(gamma_rule(self.k, n)?
            .into_iter()
            .map(|(x, w)| (x * self.theta, w))
            .collect())
    }
}

pub fn gamma_match(field: &InterferenceField) -> Result<GammaModel> {
    let (mean, var) = interference_moments(field)?;
    if mean == 0.0 {
        return Err(Error::Domain("zero interference has no Gamma match".into()));
    }
    GammaModel::from_moments(mean, var)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PppEstimate {
    pub mean: f64,
    pub variance: f64,
    pub mean_stderr: f64,
    pub variance_stderr: f64,
    /// Mean contribution of interferers beyond the simulated disc, already
    /// included in `mean`.
    pub tail_mean: f64,
    pub realizations: usize,
}

const PPP_CHUNK: usize = 1024;

/// Monte Carlo moments of the interference power.
///
/// Interferers are drawn on the annulus `[r0, r_max]`. The mean of the part
/// beyond `r_max` decays only like `(r0/r_max)^(α-2)`, so it is added back
/// analytically; its variance share, `(r0/r_max)^(2α-2)`, is ignored.
/// Realisations are split into fixed chunks, each with its own ChaCha stream
/// derived from `seed`, so results do not depend on the thread count.
pub fn ppp_oracle(field: &InterferenceField, n: usize, r_max: f64, seed: u64) -> Result<PppEstimate> {
    field.validate()?;
    if n < 2 {
        return Err(Error::Domain(format!("need at least two realisations, got {n}")));
    }
    if !(r_max > field.r0) {
        return Err(Error::Domain(format!("r_max {r_max} must exceed r0 {}", field.r0)));
    }
    let (r0sq, rmsq) = (field.r0 * field.r0, r_max * r_max);
    let expected_count = field.density * PI * (rmsq - r0sq);
    let poisson = if expected_count > 0.0 {
        Some(Poisson::new(expected_count).map_err(|e| Error::Domain(e.to_string()))?)
    } else {
        None
    };
    let chunks = n.div_ceil(PPP_CHUNK);
    let samples: Vec<f64> = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = PPP_CHUNK.min(n - c * PPP_CHUNK);
            (0..len)
                .map(|_| {
                    let count = match poisson {
                        Some(p) => rng.sample(p) as u64,
                        None => 0,
                    };
                    (0..count)
                        .map(|_| {
                            let u: f64 = rng.random();
                            let r = (r0sq + u * (rmsq - r0sq)).sqrt();
                            let p: f64 = rng.sample(Exp1);
                            field.power_at(r, p)
                        })
                        .sum::<f64>()
                })
                .collect::<Vec<_>>()
        })
        .collect();

    let nf = n as f64;
    let sim_mean = samples.iter().sum::<f64>() / nf;
    let (m2, m4) = samples.iter().fold((0.0, 0.0), |(a, b), &x| {
        let d = x - sim_mean;
        (a + d * d, b + d.powi(4))
    });
    let variance = m2 / (nf - 1.0);
    let m4 = m4 / nf;
    let tail_mean = 2.0 * PI * field.density / (field.alpha - 2.0)
        * field.pt
        * field.lambda_c.powf(field.alpha)
        * r_max.powf(2.0 - field.alpha);
    Ok(PppEstimate {
        mean: sim_mean + tail_mean,
        variance,
        mean_stderr: (variance / nf).sqrt(),
        variance_stderr: ((m4 - variance * variance).max(0.0) / nf).sqrt(),
        tail_mean,
        realizations: n,
    })
}

/// Flat noise density equivalent to an in-band interference power.
#[inline]
fn interference_psd(link: &Link, power: f64) -> f64 {
    power / link.cfg.bw
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedFormRate {
    pub rate_bps: f64,
    /// Set when `σ² > 0.01 E[I]²`, where the expansion is not trusted.
    pub dispersion_warning: bool,
}

/// Second-order expansion of the interference-averaged rate for a
/// transmission that does not adapt to `I`.
///
/// Per frequency, with `X = I T / BW`, `A = (N0 + S) T + N_LNA + E[X]` and
/// `B = N0 T + N_LNA + E[X]`:
///
/// ```text
/// E[log2(1 + SNR)] ≈ log2(A/B) - Var[X] / (2 ln 2) (A⁻² - B⁻²)
/// ```
pub fn rate_fixed_antenna_closed_form<F>(
    link: &Link,
    t_of_f: F,
    gm: &GammaModel,
    spec: &QuadratureSpec,
) -> Result<ClosedFormRate>
where
    F: Fn(f64) -> f64,
{
    let mean_psd = interference_psd(link, gm.mean());
    let var_psd = gm.variance() / (link.cfg.bw * link.cfg.bw);
    let v = integrate_band(
        |f| {
            let t = t_of_f(f);
            let s = link.received_psd(f);
            if t <= 0.0 || s == 0.0 {
                return 0.0;
            }
            let b = (link.n0 + mean_psd) * t + link.n_lna;
            let a = b + s * t;
            (a / b).log2() - t * t * var_psd / (2.0 * LN_2) * (a.powi(-2) - b.powi(-2))
        },
        link.band(),
        spec,
    )?;
    Ok(ClosedFormRate {
        rate_bps: v,
        dispersion_warning: gm.dispersion() > 0.01,
    })
}

/// Options for rates averaged over the Gamma law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AveragingOptions {
    pub quad: QuadratureSpec,
    /// Nodes for the fixed-antenna expectation.
    pub nodes: usize,
    /// Nodes for the adaptive antenna, each one a full matching solve.
    pub adaptive_nodes: usize,
    /// Largest tolerated share of failed adaptive nodes.
    pub max_failed_share: f64,
    pub solver: SolverOptions,
}

impl Default for AveragingOptions {
    fn default() -> Self {
        Self {
            quad: QuadratureSpec::default(),
            nodes: 64,
            adaptive_nodes: 16,
            max_failed_share: 0.1,
            solver: SolverOptions::default(),
        }
    }
}

/// `E_I[∫ log2(1 + SNR) df]` for a transmission that ignores `I`.
pub fn rate_fixed_antenna_numeric<F>(
    link: &Link,
    t_of_f: F,
    gm: &GammaModel,
    opts: &AveragingOptions,
) -> Result<f64>
where
    F: Fn(f64) -> f64 + Sync,
{
    let nodes = gm.nodes(opts.nodes)?;
    let rates = nodes
        .par_iter()
        .map(|&(i, _)| {
            let l = link.with_extra_noise(interference_psd(link, i));
            rate_integral(&l, &t_of_f, &opts.quad)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(nodes.iter().zip(&rates).map(|(&(_, w), r)| w * r).sum())
}

/// Interference-averaged rate with `T ≡ 1`.
pub fn shannon_rate_averaged(link: &Link, gm: &GammaModel, opts: &AveragingOptions) -> Result<f64> {
    rate_fixed_antenna_numeric(link, |_| 1.0, gm, opts)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdaptiveRate {
    pub rate_bps: f64,
    /// Interference powers of the nodes whose matching solve failed.
    pub excluded: Vec<f64>,
    pub nodes: usize,
}

/// Rate of an antenna whose matching network is re-optimised for every
/// interference level, averaged over the Gamma law.
pub fn rate_adaptive_antenna(link: &Link, gm: &GammaModel, opts: &AveragingOptions) -> Result<AdaptiveRate> {
    let nodes = gm.nodes(opts.adaptive_nodes)?;
    let a = link.cfg.radius;
    let per_node: Vec<Result<Option<f64>>> = nodes
        .par_iter()
        .map(|&(i, _)| {
            let l = link.with_extra_noise(interference_psd(link, i));
            match solve_for_size(&l, a, &opts.solver) {
                Ok(sol) => rate_integral(&l, |f| sol.transmission(&l, f), &opts.quad).map(Some),
                Err(Error::Infeasible { .. } | Error::IterationLimit(_) | Error::Bracket { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect();
    let mut excluded = Vec::new();
    let mut total = 0.0;
    let mut weight = 0.0;
    for (&(i, w), r) in nodes.iter().zip(per_node) {
        match r? {
            Some(rate) => {
                total += w * rate;
                weight += w;
            }
            None => excluded.push(i),
        }
    }
    let share = excluded.len() as f64 / nodes.len() as f64;
    if share > opts.max_failed_share {
        return Err(Error::Infeasible {
            reason: format!(
                "{} of {} interference nodes have no matching solution",
                excluded.len(),
                nodes.len()
            ),
            scan: excluded.iter().map(|&i| (i, f64::NAN)).collect(),
        });
    }
    Ok(AdaptiveRate {
        rate_bps: total / weight,
        excluded,
        nodes: nodes.len(),
    })
}

/// Interference-free rate for comparison in tests and reports.
pub fn deterministic_rate<F>(link: &Link, t_of_f: F, interference: f64, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let l = link.with_extra_noise(interference_psd(link, interference));
    rate_integral(&l, t_of_f, spec)
}

/// Per-frequency SNR at a fixed interference power.
pub fn snr_with_interference(link: &Link, f: f64, t: f64, interference: f64) -> f64 {
    snr_unchecked(&link.with_extra_noise(interference_psd(link, interference)), f, t)
}

/// Shannon rate at a fixed interference power.
pub fn shannon_with_interference(link: &Link, interference: f64, spec: &QuadratureSpec) -> Result<f64> {
    shannon_rate(&link.with_extra_noise(interference_psd(link, interference)), spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field() -> InterferenceField {
        InterferenceField::one_per_cell(1000.0, 2.5, 6.0, 0.5)
    }

    #[test]
    fn one_user_per_cell_shape() {
        let g = gamma_match(&field()).unwrap();
        assert!((g.k - 12.0).abs() < 1e-12);
    }

    #[test]
    fn moment_identities() {
        for f in [
            field(),
            InterferenceField {
                density: 3e-7,
                alpha: 3.7,
                r0: 250.0,
                pt: 0.2,
                lambda_c: 0.06,
            },
        ] {
            let (m, v) = interference_moments(&f).unwrap();
            let g = gamma_match(&f).unwrap();
            assert!((g.mean() - m).abs() <= 2.0 * f64::EPSILON * m);
            assert!((g.variance() - v).abs() <= 4.0 * f64::EPSILON * v);
            let k = 2.0 * PI * f.density * f.r0 * f.r0 * (f.alpha - 1.0) / (f.alpha - 2.0).powi(2);
            let theta = (f.alpha - 2.0) / (f.alpha - 1.0) * f.pt * (f.lambda_c / f.r0).powf(f.alpha);
            assert!((g.k / k - 1.0).abs() < 1e-14);
            assert!((g.theta / theta - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn moments_linear_in_density() {
        let f1 = field();
        let f2 = InterferenceField {
            density: 2.0 * f1.density,
            ..f1
        };
        let (m1, v1) = interference_moments(&f1).unwrap();
        let (m2, v2) = interference_moments(&f2).unwrap();
        assert!((m2 / m1 - 2.0).abs() < 1e-15);
        assert!((v2 / v1 - 2.0).abs() < 1e-15);
    }

    #[test]
    fn steep_path_loss_kills_interference() {
        let f = InterferenceField {
            alpha: 60.0,
            ..field()
        };
        let (m, v) = interference_moments(&f).unwrap();
        assert!(m < 1e-150 && v < 1e-300);
    }

    #[test]
    fn divergent_mean_rejected() {
        let f = InterferenceField { alpha: 2.0, ..field() };
        assert!(matches!(interference_moments(&f), Err(Error::Domain(_))));
    }

    #[test]
    fn empty_field_is_silent() {
        let f = InterferenceField {
            density: 0.0,
            ..field()
        };
        let e = ppp_oracle(&f, 100, 1e5, 1).unwrap();
        assert_eq!(e.mean, 0.0);
        assert_eq!(e.variance, 0.0);
    }

    #[test]
    fn oracle_is_seeded() {
        let f = InterferenceField {
            density: 0.02 / (PI * 1e6),
            ..field()
        };
        let a = ppp_oracle(&f, 3000, 1e5, 7).unwrap();
        let b = ppp_oracle(&f, 3000, 1e5, 7).unwrap();
        let c = ppp_oracle(&f, 3000, 1e5, 8).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_ne!(a.mean.to_bits(), c.mean.to_bits());
    }

    #[test]
    fn gamma_nodes_reproduce_moments() {
        let g = GammaModel::new(12.0, 3e-9).unwrap();
        let nodes = g.nodes(32).unwrap();
        let m: f64 = nodes.iter().map(|(x, w)| w * x).sum();
        let v: f64 = nodes.iter().map(|(x, w)| w * (x - m).powi(2)).sum();
        assert!((m / g.mean() - 1.0).abs() < 1e-12);
        assert!((v / g.variance() - 1.0).abs() < 1e-10);
    }
}
