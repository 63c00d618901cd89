//! Rate integrals: per-frequency SNR behind a matching network, the
//! achievable rate over the band, and capacity fractions against the
//! perfectly matched (`T ≡ 1`) baseline.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chu::ChuCircuit;
use crate::error::{Error, Result};
use crate::matching::{solve_for_size, MatchingSolution, SolverOptions};
use crate::model::{Link, SystemConfig};
use crate::numerics::{integrate_band, QuadratureSpec};

/// Power transmission of the antenna interface as a function of frequency.
#[derive(Debug, Clone)]
pub enum Transmission {
    /// Optimal matching network for the given multipliers.
    Optimal(MatchingSolution),
    /// Bare Chu circuit, `|T̃(f)|²`.
    Unmatched(ChuCircuit),
    /// Perfect match, `T ≡ 1`; the Shannon baseline.
    Ideal,
}

impl Transmission {
    /// Transmission for `link`'s antenna under the given matching mode.
    pub fn for_link(link: &Link, matching: Matching, solver: &SolverOptions) -> Result<Self> {
        let a = link.cfg.radius;
        Ok(match matching {
            Matching::Optimal => Transmission::Optimal(solve_for_size(link, a, solver)?),
            Matching::None => Transmission::Unmatched(ChuCircuit::new(a, link.cfg.constants.c)?),
            Matching::Shannon => Transmission::Ideal,
        })
    }

    pub fn at(&self, link: &Link, f: f64) -> f64 {
        match self {
            Transmission::Optimal(sol) => sol.transmission(link, f),
            Transmission::Unmatched(chu) => chu.transmission_power(f),
            Transmission::Ideal => 1.0,
        }
    }
}

/// Matching mode of a sweep row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Matching {
    Optimal,
    None,
    Shannon,
}

impl fmt::Display for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Matching::Optimal => "optimal",
            Matching::None => "none",
            Matching::Shannon => "shannon",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateReport {
    pub rate_bps: f64,
    pub shannon_bps: f64,
    pub fraction: f64,
    pub snr_trace: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateOptions {
    pub quad: QuadratureSpec,
    /// Uniform in-band points in the SNR trace.
    pub trace_points: usize,
    pub solver: SolverOptions,
}

impl Default for RateOptions {
    fn default() -> Self {
        Self {
            quad: QuadratureSpec::default(),
            trace_points: 512,
            solver: SolverOptions::default(),
        }
    }
}

/// `P_t(f) |H(f)|² T / (N0 T + N_LNA)`.
pub fn snr_at(link: &Link, f: f64, t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("transmission must lie in [0, 1], got {t}")));
    }
    if !(f > 0.0) {
        return Err(Error::Domain(format!("frequency must be positive, got {f}")));
    }
    Ok(snr_unchecked(link, f, t))
}

#[inline]
pub(crate) fn snr_unchecked(link: &Link, f: f64, t: f64) -> f64 {
    let s = link.received_psd(f);
    if s == 0.0 || t == 0.0 {
        return 0.0;
    }
    s * t / (link.n0 * t + link.n_lna)
}

/// `∫ log2(1 + SNR(f)) df` over the band for the transmission `t_of_f`.
pub fn rate_integral<F>(link: &Link, t_of_f: F, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let mut bad = None;
    let v = integrate_band(
        |f| {
            let t = t_of_f(f);
            if !(0.0..=1.0).contains(&t) {
                bad.get_or_insert((f, t));
                return 0.0;
            }
            snr_unchecked(link, f, t).ln_1p()
        },
        link.band(),
        spec,
    )?;
    if let Some((f, t)) = bad {
        return Err(Error::Domain(format!(
            "transmission {t} outside [0, 1] at f = {f:e}"
        )));
    }
    Ok(v / std::f64::consts::LN_2)
}

/// Rate with `T ≡ 1`, evaluated by the same quadrature as every other rate.
pub fn shannon_rate(link: &Link, spec: &QuadratureSpec) -> Result<f64> {
    rate_integral(link, |_| 1.0, spec)
}

/// Achievable rate, Shannon baseline, their ratio and an SNR trace.
pub fn achievable_rate<F>(link: &Link, t_of_f: F, opts: &RateOptions) -> Result<RateReport>
where
    F: Fn(f64) -> f64,
{
    let rate_bps = rate_integral(link, &t_of_f, &opts.quad)?;
    let shannon_bps = shannon_rate(link, &opts.quad)?;
    let (lo, hi) = link.band();
    let n = opts.trace_points.max(2);
    let snr_trace = (0..n)
        .map(|i| {
            let f = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            snr_at(link, f, t_of_f(f)).map(|s| (f, s))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RateReport {
        rate_bps,
        shannon_bps,
        fraction: if shannon_bps > 0.0 { rate_bps / shannon_bps } else { 0.0 },
        snr_trace,
    })
}

/// Outcome of one sweep row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    Infeasible,
    Excluded,
}

impl fmt::Display for RowStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RowStatus::Ok => "ok",
            RowStatus::Infeasible => "infeasible",
            RowStatus::Excluded => "excluded",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FractionRow {
    pub lambda_over_a: f64,
    pub matching: Matching,
    pub status: RowStatus,
    /// `NaN` unless `status` is ok.
    pub rate_bps: f64,
    pub shannon_bps: f64,
    pub fraction: f64,
}

/// Rate of `cfg` under one matching mode.
pub fn rate_for_mode(cfg: &SystemConfig, matching: Matching, opts: &RateOptions) -> Result<RateReport> {
    let link = Link::new(*cfg)?;
    let t = Transmission::for_link(&link, matching, &opts.solver)?;
    achievable_rate(&link, |f| t.at(&link, f), opts)
}

/// Capacity fraction for each `λ/a` in `ratios`. Rows run in parallel and
/// come back in input order; a solver infeasibility marks its row and the
/// sweep carries on.
pub fn capacity_fraction_sweep(
    template: &SystemConfig,
    ratios: &[f64],
    matching: Matching,
    opts: &RateOptions,
) -> Result<Vec<FractionRow>> {
    if let Some(r) = ratios.iter().find(|r| !(**r > 0.0)) {
        return Err(Error::Domain(format!("λ/a must be positive, got {r}")));
    }
    template.validate()?;
    ratios
        .par_iter()
        .map(|&ratio| {
            let cfg = template.with_lambda_over_a(ratio);
            match rate_for_mode(&cfg, matching, opts) {
                Ok(r) => Ok(FractionRow {
                    lambda_over_a: ratio,
                    matching,
                    status: RowStatus::Ok,
                    rate_bps: r.rate_bps,
                    shannon_bps: r.shannon_bps,
                    fraction: r.fraction,
                }),
                Err(Error::Infeasible { .. }) => Ok(FractionRow {
                    lambda_over_a: ratio,
                    matching,
                    status: RowStatus::Infeasible,
                    rate_bps: f64::NAN,
                    shannon_bps: f64::NAN,
                    fraction: f64::NAN,
                }),
                Err(e) => Err(e),
            }
        })
        .collect()
}
