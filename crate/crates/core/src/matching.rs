//! Optimal matching network for a size-constrained TM1 antenna.
//!
//! The power transmission `T(f) = 1 - |Γ(f)|²` of the matching network is
//! chosen to maximise the rate integral subject to the two realisability
//! integrals of the Chu circuit:
//!
//! ```text
//! ∫ f⁻² ln 1/(1-T) df = K1 = 2π² (2a/c - 2/γ)
//! ∫ f⁻⁴ ln 1/(1-T) df = K2 = 8π⁴ (4a³/3c³ + 2/(3γ³))
//! ```
//!
//! Stationarity of the Lagrangian gives, at every frequency, a quadratic
//! `c1 T² + c2 T + c3 = 0` whose coefficients depend on the multipliers
//! `μ1 = -m1` and `μ2 = -m2` (both non-positive). The reflection zero is
//! `γ = 2π sqrt(m2/m1)`.
//!
//! For a fixed pair `(m1, m2)` the first constraint fixes the size `a`; the
//! second is a scalar equation between `m1` and `m2`. [`solve_for_size`]
//! nests two bracketed solves: for fixed `m1` it finds the `m2` that
//! satisfies the second constraint, and around that it adjusts `m1` until
//! the implied size equals the target.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::chu::{ChuCircuit, ReflectionZero};
use crate::error::{Error, Result};
use crate::model::Link;
use crate::numerics::{find_root, integrate_band, scan_for_sign_change, QuadratureSpec, RootBracket};
use crate::rate::rate_integral;

/// Upper cap on the transmission. The optimum is strictly below one; the
/// cap only matters for the multiplier-free limit `m1 = m2 = 0`.
pub const T_STAR_CAP: f64 = 1.0 - 1e-12;

/// Magnitudes of the two (non-positive) Fano multipliers, in Hz² and Hz⁴.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Multipliers {
    pub m1: f64,
    pub m2: f64,
}

impl Multipliers {
    pub fn new(m1: f64, m2: f64) -> Result<Self> {
        if !(m1 >= 0.0 && m2 >= 0.0 && m1.is_finite() && m2.is_finite()) {
            return Err(Error::Domain(format!(
                "multiplier magnitudes must be finite and non-negative (m1={m1}, m2={m2})"
            )));
        }
        Ok(Self { m1, m2 })
    }

    /// Signed multipliers `(μ1, μ2) = (-m1, -m2)`.
    pub fn signed(&self) -> (f64, f64) {
        (-self.m1, -self.m2)
    }

    /// `m1 f⁻² + m2 f⁻⁴`, i.e. minus the multiplier weight at `f`.
    #[inline]
    pub fn penalty(&self, f: f64) -> f64 {
        let inv2 = 1.0 / (f * f);
        inv2 * (self.m1 + self.m2 * inv2)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            m1: self.m1 * s,
            m2: self.m2 * s,
        }
    }
}

/// Coefficients of `c1 T² + c2 T + c3 = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticCoeffs {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl QuadraticCoeffs {
    pub fn discriminant(&self) -> f64 {
        self.c2 * self.c2 - 4.0 * self.c1 * self.c3
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.c1 * t + self.c2) * t + self.c3
    }
}

pub fn quadratic_coeffs(link: &Link, f: f64, mult: &Multipliers) -> Result<QuadraticCoeffs> {
    if !(f > 0.0) {
        return Err(Error::Domain(format!("frequency must be positive, got {f}")));
    }
    let s = link.received_psd(f);
    let (n0, nl) = (link.n0, link.n_lna);
    let w = -mult.penalty(f);
    Ok(QuadraticCoeffs {
        c1: (n0 + s) * n0 * w,
        c2: (2.0 * n0 * nl + nl * s) * w - s * nl,
        c3: s * nl + nl * nl * w,
    })
}

/// Minus-root of the stationarity quadratic, clamped to `[0, T_STAR_CAP]`,
/// together with its complement `1 - T*` and the relative discriminant.
///
/// Works on coefficients normalised by `N_LNA²`. With `c2 <= 0` the
/// minus-root equals `c3 / q` with `q = (-c2 + sqrt(D)) / 2`. Near `T* = 1`
/// the complement is taken from the quadratic in `U = 1 - T`, whose
/// constant term `w (n0 + 1)(n0 + s + 1)` carries no cancellation.
#[inline]
fn minus_root(link: &Link, f: f64, mult: &Multipliers) -> (f64, f64, f64) {
    let nl = link.n_lna;
    let s = link.received_psd(f);
    if nl <= 0.0 || s <= 0.0 {
        // no signal, or an amplifier that adds nothing: nothing to gain from T
        return (0.0, 1.0, 0.0);
    }
    let sn = s / nl;
    let n0 = link.n0 / nl;
    let w = -mult.penalty(f);
    let c1 = (n0 + sn) * n0 * w;
    let c2 = (2.0 * n0 + sn) * w - sn;
    let c3 = sn + w;
    if c1 == 0.0 {
        let t = if c2 != 0.0 { -c3 / c2 } else { 0.0 };
        let t = t.clamp(0.0, T_STAR_CAP);
        return (t, 1.0 - t, 0.0);
    }
    let mut disc = c2 * c2 - 4.0 * c1 * c3;
    let scale = c2 * c2 + (4.0 * c1 * c3).abs();
    let rel = disc / scale;
    if disc < 0.0 {
        disc = 0.0;
    }
    let sq = disc.sqrt();
    let root = if c2 <= 0.0 {
        let q = 0.5 * (-c2 + sq);
        if q > 0.0 {
            c3 / q
        } else {
            0.0
        }
    } else {
        (-c2 - sq) / (2.0 * c1)
    };
    if root <= 0.0 {
        return (0.0, 1.0, rel);
    }
    let mut u = 1.0 - root;
    if root > 0.5 {
        // products of roots: T T' = c3/c1 and U U' = e/c1 with U' = 1 - T'
        let other = c3 / (c1 * root);
        let e = w * (n0 + 1.0) * (n0 + sn + 1.0);
        let u_alt = e / (c1 * (1.0 - other));
        if u_alt.is_finite() && u_alt > 0.0 && (other - 1.0).abs() > 0.5 {
            u = u_alt;
        }
    }
    let u = u.max(f64::MIN_POSITIVE);
    (root.min(T_STAR_CAP), u, rel)
}

/// Optimal power transmission `T*(f)` for the given multipliers.
pub fn optimal_transmission(link: &Link, f: f64, mult: &Multipliers) -> Result<f64> {
    if !(f > 0.0) {
        return Err(Error::Domain(format!("frequency must be positive, got {f}")));
    }
    let (t, _, rel) = minus_root(link, f, mult);
    if rel < -1e-12 {
        return Err(Error::Numerical(format!(
            "negative discriminant ({rel:e} relative) at f = {f:e}"
        )));
    }
    Ok(t)
}

#[inline]
pub(crate) fn t_star(link: &Link, f: f64, mult: &Multipliers) -> f64 {
    minus_root(link, f, mult).0
}

/// `ln 1/(1 - T*)`: through `ln_1p` for small `T*`, through the complement
/// near `T* = 1`.
#[inline]
pub(crate) fn return_loss(link: &Link, f: f64, mult: &Multipliers) -> f64 {
    let (t, u, _) = minus_root(link, f, mult);
    if t <= 0.5 {
        -(-t).ln_1p()
    } else {
        -u.ln()
    }
}

/// Optimal reflection zero `γ = 2π sqrt(m2/m1)`, rad/s.
pub fn gamma_opt(mult: &Multipliers) -> Result<f64> {
    if !(mult.m1 > 0.0 && mult.m2 > 0.0) {
        return Err(Error::Domain(format!(
            "reflection zero needs both multipliers non-zero (m1={}, m2={})",
            mult.m1, mult.m2
        )));
    }
    Ok(2.0 * PI * (mult.m2 / mult.m1).sqrt())
}

/// `∫ f⁻² ln 1/(1-T*) df` and `∫ f⁻⁴ ln 1/(1-T*) df`.
///
/// `T*` vanishes wherever the transmit PSD does, so only the signalling band
/// is integrated.
pub fn fano_integrals(link: &Link, mult: &Multipliers, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    let band = link.band();
    let loss = |f: f64| return_loss(link, f, mult);
    let i1 = integrate_band(|f| loss(f) / (f * f), band, spec)?;
    let i2 = integrate_band(|f| loss(f) / (f * f * f * f), band, spec)?;
    Ok((i1, i2))
}

fn size_from_integral(c: f64, i1: f64, mult: &Multipliers) -> f64 {
    c / (4.0 * PI * PI) * i1 + c / (2.0 * PI) * (mult.m1 / mult.m2).sqrt()
}

/// Right-hand side of the second constraint, `4a³/3c³ + (m1/m2)^{3/2} / 12π³`.
fn second_budget(c: f64, a: f64, mult: &Multipliers) -> f64 {
    4.0 * a.powi(3) / (3.0 * c.powi(3)) + (mult.m1 / mult.m2).powf(1.5) / (12.0 * PI.powi(3))
}

/// Antenna radius implied by the first constraint, m.
pub fn size_of_multipliers(link: &Link, mult: &Multipliers, spec: &QuadratureSpec) -> Result<f64> {
    check_positive(mult)?;
    let (i1, _) = fano_integrals(link, mult, spec)?;
    Ok(size_from_integral(link.cfg.constants.c, i1, mult))
}

/// Relative residual `(LHS - RHS) / RHS` of the second constraint with the
/// size taken from [`size_of_multipliers`].
pub fn constraint_residual(link: &Link, mult: &Multipliers, spec: &QuadratureSpec) -> Result<f64> {
    check_positive(mult)?;
    Ok(evaluate(link, mult, spec)?.residual)
}

fn check_positive(mult: &Multipliers) -> Result<()> {
    if mult.m1 > 0.0 && mult.m2 > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "both multipliers must be positive (m1={}, m2={})",
            mult.m1, mult.m2
        )))
    }
}

#[derive(Debug, Clone, Copy)]
struct Evaluation {
    i2: f64,
    size: f64,
    residual: f64,
}

fn evaluate(link: &Link, mult: &Multipliers, spec: &QuadratureSpec) -> Result<Evaluation> {
    let c = link.cfg.constants.c;
    let (i1, i2) = fano_integrals(link, mult, spec)?;
    let size = size_from_integral(c, i1, mult);
    let rhs = second_budget(c, size, mult);
    let lhs = i2 / (8.0 * PI.powi(4));
    Ok(Evaluation {
        i2,
        size,
        residual: (lhs - rhs) / rhs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Quadrature used inside the nested solve.
    pub quad: QuadratureSpec,
    /// Number of uniform in-band samples of `T*` stored in the solution.
    pub samples: usize,
    /// Scan range for the scaled multipliers `m1/fc²` and `m2/fc⁴`, log10.
    pub log_min: f64,
    pub log_max: f64,
    pub points_per_decade: usize,
    /// Stopping tolerance on `|ln(a / target)|`.
    pub size_tol: f64,
    /// Stopping tolerance on the relative constraint residual.
    pub residual_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            quad: QuadratureSpec::with_rel_tol(1e-9),
            samples: 512,
            log_min: -40.0,
            log_max: 10.0,
            points_per_decade: 8,
            size_tol: 1e-12,
            residual_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// `achieved_a - target_a`, m.
    pub size_eq: f64,
    /// Relative residual of the second constraint.
    pub constraint_eq: f64,
}

/// Where the optimal reflection zero sits.
///
/// Along the interior family the zero is `γ = 2π sqrt(m2/m1)`. As the target
/// radius grows, `m1 -> 0` and `γ -> ∞`; beyond that point the zero stays at
/// infinity, the `γ` stationarity condition relaxes to `m1 >= 0`, and the
/// constraints are solved with `1/γ = 0`. For large enough radii the second
/// one becomes slack and `m2 = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroRegime {
    Interior,
    AtInfinity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchingSolution {
    pub multipliers: Multipliers,
    /// Reflection zero, rad/s (`f64::INFINITY` in the boundary regime).
    pub gamma: f64,
    pub regime: ZeroRegime,
    pub target_a: f64,
    pub achieved_a: f64,
    pub band: (f64, f64),
    /// `(f, T*(f))` on a uniform in-band grid.
    pub t_star: Vec<(f64, f64)>,
    pub residuals: Residuals,
}

impl MatchingSolution {
    /// `T*` at an arbitrary frequency (zero outside the band).
    pub fn transmission(&self, link: &Link, f: f64) -> f64 {
        t_star(link, f, &self.multipliers)
    }

    pub fn to_document(&self) -> SolutionDocument {
        SolutionDocument {
            m1: self.multipliers.m1,
            m2: self.multipliers.m2,
            gamma: self.gamma.is_finite().then_some(self.gamma),
            achieved_a: self.achieved_a,
            band: [self.band.0, self.band.1],
            t_star_samples: self.t_star.iter().map(|&(f, t)| [f, t]).collect(),
        }
    }
}

/// JSON form of a [`MatchingSolution`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionDocument {
    pub m1: f64,
    pub m2: f64,
    /// `None` when the reflection zero is at infinity.
    pub gamma: Option<f64>,
    pub achieved_a: f64,
    pub band: [f64; 2],
    pub t_star_samples: Vec<[f64; 2]>,
}

/// Nested solver state: the carrier used to scale multipliers and the last
/// converged inner solution, used as a warm start.
struct Nested<'a> {
    link: &'a Link,
    opts: &'a SolverOptions,
    fc: f64,
    target: f64,
    regime: ZeroRegime,
    last: Option<(f64, f64)>,
}

impl<'a> Nested<'a> {
    fn mult(&self, lp1: f64, lp2: f64) -> Multipliers {
        Multipliers {
            m1: 10f64.powf(lp1) * self.fc * self.fc,
            m2: 10f64.powf(lp2) * self.fc.powi(4),
        }
    }

    /// Inner residual, negative below the root in `m2` for both regimes.
    fn eval(&self, lp1: f64, lp2: f64) -> Result<Evaluation> {
        let mult = self.mult(lp1, lp2);
        match self.regime {
            ZeroRegime::Interior => evaluate(self.link, &mult, &self.opts.quad),
            ZeroRegime::AtInfinity => {
                let c = self.link.cfg.constants.c;
                let (i1, i2) = fano_integrals(self.link, &mult, &self.opts.quad)?;
                let rhs = 4.0 * self.target.powi(3) / (3.0 * c.powi(3));
                Ok(Evaluation {
                    i2,
                    size: c / (4.0 * PI * PI) * i1,
                    residual: (rhs - i2 / (8.0 * PI.powi(4))) / rhs,
                })
            }
        }
    }

    /// With `m2 -> 0`, `T*` is non-zero somewhere iff `m1/f² < S(f)/N_LNA`
    /// somewhere in the band. Otherwise no `m2` can satisfy the constraint.
    fn admits_transmission(&self, lp1: f64) -> bool {
        let m1 = 10f64.powf(lp1) * self.fc * self.fc;
        let (lo, hi) = self.link.band();
        let nl = self.link.n_lna;
        (0..=64).any(|i| {
            let f = lo + (hi - lo) * i as f64 / 64.0;
            m1 / (f * f) * nl < self.link.received_psd(f)
        })
    }

    /// Solve the second constraint for `log10(m2/fc⁴)` at fixed `m1`.
    /// `None` means no root exists for this `m1`.
    fn inner(&mut self, lp1: f64) -> Result<Option<f64>> {
        if !self.admits_transmission(lp1) {
            return Ok(None);
        }
        if self.regime == ZeroRegime::AtInfinity && self.eval(lp1, f64::NEG_INFINITY)?.residual >= 0.0 {
            // second constraint slack even without m2
            return Ok(Some(f64::NEG_INFINITY));
        }
        if let Some((p1, p2)) = self.last {
            let guess = p2 + (lp1 - p1) - 0.5;
            if let Some(root) = self.inner_from(lp1, guess)? {
                return Ok(Some(root));
            }
        }
        // cold start at sqrt(m1/m2) = 1000/fc, far below the root
        self.inner_from(lp1, lp1 - 6.0)
    }

    fn inner_from(&mut self, lp1: f64, start: f64) -> Result<Option<f64>> {
        let opts = self.opts;
        let mut lp2 = start.max(opts.log_min);
        // walk down until the residual is negative with some transmission left
        loop {
            if lp2 < opts.log_min {
                return Ok(None);
            }
            let e = self.eval(lp1, lp2)?;
            if e.i2 > 0.0 && e.residual < 0.0 {
                break;
            }
            lp2 -= 1.0;
        }
        let step = 1.0 / opts.points_per_decade as f64;
        let max_steps = ((opts.log_max - lp2) / step).ceil().max(0.0) as usize;
        let mut trace = Vec::new();
        let bracket = scan_for_sign_change(
            |x| {
                let e = self.eval(lp1, x)?;
                // all transmission gone: we passed every admissible m2
                let lost = e.i2 == 0.0 && self.regime == ZeroRegime::Interior;
                Ok(if lost { f64::NAN } else { e.residual })
            },
            lp2,
            step,
            max_steps,
            &mut trace,
        );
        let bracket = match bracket {
            Ok(Some(b)) if !b.f_hi.is_nan() => b,
            Ok(_) => return Ok(None),
            Err(e) => return Err(e),
        };
        let mut failure = None;
        let root = find_root(
            |x| match self.eval(lp1, x) {
                Ok(e) => e.residual,
                Err(err) => {
                    failure.get_or_insert(err);
                    f64::NAN
                }
            },
            bracket,
            opts.residual_tol,
        );
        if let Some(err) = failure {
            return Err(err);
        }
        let root = root?;
        self.last = Some((lp1, root));
        Ok(Some(root))
    }

    /// `ln(a(m1) / target)` after solving the inner problem; `None` when no
    /// inner root exists. In the boundary regime `a` is `c I1 / 4π²`, so this
    /// is also `ln(I1 / K1)`.
    fn outer(&mut self, lp1: f64) -> Result<Option<(f64, f64)>> {
        match self.inner(lp1)? {
            None => Ok(None),
            Some(lp2) => {
                let e = self.eval(lp1, lp2)?;
                Ok(Some(((e.size / self.target).ln(), lp2)))
            }
        }
    }
}

/// Find the multipliers (and hence `T*`) of the optimal matching network for
/// an antenna of radius `target_a`.
///
/// Both the interior stationary point in `γ` and the boundary `γ = ∞` are
/// solved; the one with the larger rate wins. The interior family does not
/// reach every radius (it stops at a largest radius as `m1 -> 0`, and for
/// very wide bands at a smallest one), while the boundary problem is always
/// feasible because the bare antenna satisfies it.
pub fn solve_for_size(link: &Link, target_a: f64, opts: &SolverOptions) -> Result<MatchingSolution> {
    let interior = solve_in_regime(link, target_a, ZeroRegime::Interior, opts);
    let boundary = solve_in_regime(link, target_a, ZeroRegime::AtInfinity, opts);
    match (interior, boundary) {
        (Ok(i), Ok(b)) => {
            let rate = |s: &MatchingSolution| rate_integral(link, |f| s.transmission(link, f), &opts.quad);
            Ok(if rate(&i)? >= rate(&b)? { i } else { b })
        }
        (Ok(s), Err(Error::Infeasible { .. })) | (Err(Error::Infeasible { .. }), Ok(s)) => Ok(s),
        (Err(Error::Infeasible { reason, mut scan }), Err(Error::Infeasible { reason: r2, scan: s2 })) => {
            scan.extend(s2);
            Err(Error::Infeasible {
                reason: format!("{reason}; at γ = ∞: {r2}"),
                scan,
            })
        }
        (Err(e), _) | (_, Err(e)) => Err(e),
    }
}

/// Solve with the reflection zero restricted to one regime.
pub fn solve_in_regime(
    link: &Link,
    target_a: f64,
    regime: ZeroRegime,
    opts: &SolverOptions,
) -> Result<MatchingSolution> {
    if !(target_a > 0.0 && target_a.is_finite()) {
        return Err(Error::Domain(format!("target radius must be positive, got {target_a}")));
    }
    let mut nested = Nested {
        link,
        opts,
        fc: link.cfg.fc,
        target: target_a,
        regime,
        last: None,
    };
    let mut scan: Vec<(f64, f64)> = Vec::new();
    let step = 1.0 / opts.points_per_decade as f64;
    let infeasible = |reason: String, scan: Vec<(f64, f64)>| Error::Infeasible { reason, scan };

    // a(m1) decreases with m1: find lp1 values on either side of the target.
    // Large m1 leave no admissible m2 at all, so first walk down to a point
    // where the inner problem has a root.
    let mut x = 0.0;
    let (x0, g0) = loop {
        if let Some((g, _)) = nested.outer(x)? {
            scan.push((x, g));
            break (x, g);
        }
        scan.push((x, f64::NAN));
        x -= step;
        if x < opts.log_min {
            return Err(infeasible("no admissible multipliers in scan range".into(), scan));
        }
    };
    enum Start {
        Bracket(RootBracket),
        /// `m1 = 0`, with `log10(m2/fc⁴)` already solved.
        Slack(f64),
    }
    let start = if g0 > 0.0 {
        let (mut lo, mut g_lo) = (x0, g0);
        loop {
            let x = lo + step;
            if x > opts.log_max {
                return Err(infeasible("size stays above target".into(), scan));
            }
            match nested.outer(x)? {
                Some((gx, _)) => {
                    scan.push((x, gx));
                    if gx <= 0.0 {
                        break Start::Bracket(RootBracket { lo, hi: x, f_lo: g_lo, f_hi: gx });
                    }
                    lo = x;
                    g_lo = gx;
                }
                None => {
                    scan.push((x, f64::NAN));
                    // the size tends to zero at the edge of the admissible
                    // region; bisect towards it
                    let mut bad = x;
                    let mut found = None;
                    for _ in 0..80 {
                        let mid = 0.5 * (lo + bad);
                        match nested.outer(mid)? {
                            Some((gm, _)) if gm <= 0.0 => {
                                found = Some((mid, gm));
                                break;
                            }
                            Some((gm, _)) => {
                                lo = mid;
                                g_lo = gm;
                            }
                            None => bad = mid,
                        }
                    }
                    match found {
                        Some((hi, g_hi)) => break Start::Bracket(RootBracket { lo, hi, f_lo: g_lo, f_hi: g_hi }),
                        None => {
                            return Err(infeasible(
                                "target radius below the smallest reachable size".into(),
                                scan,
                            ))
                        }
                    }
                }
            }
        }
    } else {
        let (mut hi, mut g_hi) = (x0, g0);
        loop {
            let x = hi - step;
            if x < opts.log_min {
                if regime == ZeroRegime::AtInfinity {
                    // first constraint slack all the way down: m1 = 0
                    if let Some((g, lp2)) = nested.outer(f64::NEG_INFINITY)? {
                        // g = -inf: nothing is transmitted at all
                        if g <= 0.0 && g.is_finite() {
                            break Start::Slack(lp2);
                        }
                    }
                }
                return Err(infeasible("size stays below target".into(), scan));
            }
            match nested.outer(x)? {
                Some((gx, _)) => {
                    scan.push((x, gx));
                    if gx >= 0.0 {
                        break Start::Bracket(RootBracket { lo: x, hi, f_lo: gx, f_hi: g_hi });
                    }
                    hi = x;
                    g_hi = gx;
                }
                None => {
                    scan.push((x, f64::NAN));
                    return Err(infeasible("inner problem lost its root below an admissible m1".into(), scan));
                }
            }
        }
    };

    let (lp1, lp2) = match start {
        Start::Slack(lp2) => (f64::NEG_INFINITY, lp2),
        Start::Bracket(bracket) => {
            let mut failure = None;
            let lp1 = find_root(
                |x| match nested.outer(x) {
                    Ok(Some((g, _))) => g,
                    Ok(None) => {
                        failure.get_or_insert(Error::Numerical(format!(
                            "inner solve lost its root at log10(m1/fc²) = {x}"
                        )));
                        f64::NAN
                    }
                    Err(e) => {
                        failure.get_or_insert(e);
                        f64::NAN
                    }
                },
                bracket,
                opts.size_tol,
            );
            if let Some(err) = failure {
                return Err(err);
            }
            let lp1 = lp1?;
            let lp2 = nested
                .inner(lp1)?
                .ok_or_else(|| Error::Numerical("inner solve failed at the converged m1".into()))?;
            (lp1, lp2)
        }
    };
    let multipliers = nested.mult(lp1, lp2);
    let e = nested.eval(lp1, lp2)?;
    let (lo, hi) = link.band();
    let n = opts.samples.max(2);
    let t_star = (0..n)
        .map(|i| {
            let f = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            (f, t_star(link, f, &multipliers))
        })
        .collect();
    let (gamma, constraint_eq) = match regime {
        ZeroRegime::Interior => (gamma_opt(&multipliers)?, e.residual),
        ZeroRegime::AtInfinity => (f64::INFINITY, -e.residual),
    };
    Ok(MatchingSolution {
        multipliers,
        gamma,
        regime,
        target_a,
        achieved_a: e.size,
        band: (lo, hi),
        t_star,
        residuals: Residuals {
            size_eq: e.size - target_a,
            constraint_eq,
        },
    })
}

/// One numbered optimality condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KktCheck {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    /// Worst violation found (relative where that makes sense).
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KktReport {
    pub checks: Vec<KktCheck>,
    /// Fano integrals of `T*` and their budgets at the solution.
    pub integrals: (f64, f64),
    pub budgets: (f64, f64),
}

impl KktReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, id: u8) -> &KktCheck {
        &self.checks[usize::from(id) - 1]
    }
}

/// Tolerances used by [`verify_kkt`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktTolerances {
    pub stationarity: f64,
    pub slackness: f64,
    pub gamma: f64,
    pub grid: usize,
}

impl Default for KktTolerances {
    fn default() -> Self {
        Self {
            stationarity: 1e-9,
            slackness: 1e-6,
            gamma: 1e-12,
            grid: 2048,
        }
    }
}

/// Check the nine optimality conditions of the matching problem at `sol`.
///
/// `T*` is recomputed from the stored multipliers; the budgets use the
/// target radius and the reflection zero implied by the multipliers.
pub fn verify_kkt(
    link: &Link,
    sol: &MatchingSolution,
    spec: &QuadratureSpec,
    tol: &KktTolerances,
) -> Result<KktReport> {
    let mult = sol.multipliers;
    let c = link.cfg.constants.c;
    let (lo, hi) = link.band();
    let nl = link.n_lna;

    let mut stationarity: f64 = 0.0;
    let mut mu3_t: f64 = 0.0;
    let mut mu3_min = f64::INFINITY;
    let mut t_min = f64::INFINITY;
    let mut t_max: f64 = 0.0;
    let n = tol.grid.max(2);
    for i in 0..n {
        let f = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let t = t_star(link, f, &mult);
        t_min = t_min.min(t);
        t_max = t_max.max(t);
        let q = quadratic_coeffs(link, f, &mult)?;
        // μ3 from the gradient condition: zero where T* > 0, and
        // penalty - S/N_LNA where the lower bound is active
        let mu3 = if t > 0.0 {
            let scale = q.c1.abs() * t * t + q.c2.abs() * t + q.c3.abs();
            stationarity = stationarity.max(q.eval(t).abs() / scale);
            0.0
        } else {
            mult.penalty(f) - link.received_psd(f) / nl
        };
        mu3_min = mu3_min.min(mu3);
        mu3_t = mu3_t.max((mu3 * t).abs());
    }

    let (i1, i2) = fano_integrals(link, &mult, spec)?;
    // ⑨: interior solutions satisfy γ = 2π sqrt(m2/m1); at the boundary the
    // γ condition is the inequality m1 >= 0 with γ = ∞
    let (zero, gamma_err) = match sol.regime {
        ZeroRegime::Interior => {
            let gamma = gamma_opt(&mult)?;
            (ReflectionZero::Finite(gamma), (sol.gamma - gamma).abs() / gamma)
        }
        ZeroRegime::AtInfinity => {
            let ok = sol.gamma == f64::INFINITY && mult.m1 >= 0.0;
            (ReflectionZero::Infinite, if ok { 0.0 } else { f64::INFINITY })
        }
    };
    let budget = ChuCircuit::new(sol.target_a, c)?.fano_budget(zero)?;
    // an active multiplier needs equality; an inactive one only feasibility
    let slackness = |m: f64, i: f64, k: f64| {
        let gap = (i - k) / k.abs();
        if m > 0.0 {
            gap.abs()
        } else {
            gap.max(0.0)
        }
    };
    let slack1 = slackness(mult.m1, i1, budget.k1);
    let slack2 = slackness(mult.m2, i2, budget.k2);
    let (mu1, mu2) = mult.signed();

    let checks = vec![
        KktCheck {
            id: 1,
            name: "stationarity on the active set",
            passed: stationarity <= tol.stationarity,
            magnitude: stationarity,
        },
        KktCheck {
            id: 2,
            name: "first Fano constraint: complementary slackness",
            passed: slack1 <= tol.slackness,
            magnitude: slack1,
        },
        KktCheck {
            id: 3,
            name: "second Fano constraint: complementary slackness",
            passed: slack2 <= tol.slackness,
            magnitude: slack2,
        },
        KktCheck {
            id: 4,
            name: "lower-bound complementary slackness",
            passed: mu3_t == 0.0,
            magnitude: mu3_t,
        },
        KktCheck {
            id: 5,
            name: "upper bound inactive",
            passed: t_max < 1.0,
            magnitude: t_max,
        },
        KktCheck {
            id: 6,
            name: "multiplier signs",
            passed: mu1 <= 0.0 && mu2 <= 0.0 && mu1 + mu2 < 0.0,
            magnitude: mu1.max(mu2),
        },
        KktCheck {
            id: 7,
            name: "lower-bound multiplier non-negative",
            passed: mu3_min >= -1e-9,
            magnitude: mu3_min,
        },
        KktCheck {
            id: 8,
            name: "0 <= T* < 1",
            passed: t_min >= 0.0 && t_max < 1.0,
            magnitude: t_max,
        },
        KktCheck {
            id: 9,
            name: "reflection zero condition",
            passed: gamma_err <= tol.gamma,
            magnitude: gamma_err,
        },
    ];
    Ok(KktReport {
        checks,
        integrals: (i1, i2),
        budgets: (budget.k1, budget.k2),
    })
}
