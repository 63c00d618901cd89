//! Bracketed root finding (Brent–Dekker).

use crate::error::{Error, Result};

const MAX_ITER: usize = 200;

/// An interval known to contain a sign change of some residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootBracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

impl RootBracket {
    /// Evaluate `residual` at both ends and check the bracket.
    pub fn from_fn<F: FnMut(f64) -> f64>(mut residual: F, lo: f64, hi: f64) -> Result<Self> {
        let b = Self {
            lo,
            hi,
            f_lo: residual(lo),
            f_hi: residual(hi),
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        let straddles = self.f_lo * self.f_hi <= 0.0;
        if !(self.lo < self.hi) || !straddles || self.f_lo.is_nan() || self.f_hi.is_nan() {
            return Err(Error::Bracket {
                lo: self.lo,
                hi: self.hi,
                f_lo: self.f_lo,
                f_hi: self.f_hi,
            });
        }
        Ok(())
    }
}

/// Find a zero of `residual` inside `bracket`.
///
/// Stops when `|residual(x)| <= tol` or the bracket has shrunk to a few ulps
/// around `x`.
pub fn find_root<F>(mut residual: F, bracket: RootBracket, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    bracket.validate()?;
    let (mut a, mut fa) = (bracket.lo, bracket.f_lo);
    let (mut b, mut fb) = (bracket.hi, bracket.f_hi);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;

    for _ in 0..MAX_ITER {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let width_tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * f64::MIN_POSITIVE;
        let half = 0.5 * (c - b);
        if fb.abs() <= tol || half.abs() <= width_tol {
            return Ok(b);
        }
        if e.abs() >= width_tol && fa.abs() > fb.abs() {
            // inverse quadratic interpolation, or secant when only two points
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * half * s, 1.0 - s)
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * half * qa * (qa - r) - (b - a) * (r - 1.0)),
                    (qa - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * half * q - (width_tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = half;
                e = d;
            }
        } else {
            d = half;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > width_tol {
            d
        } else {
            width_tol.copysign(half)
        };
        fb = residual(b);
        if fb.is_nan() {
            return Err(Error::Numerical(format!("residual is NaN at {b:e}")));
        }
    }
    Err(Error::IterationLimit(MAX_ITER))
}

/// Walk the lattice `start, start + step, ...` (at most `max_steps` moves)
/// and return the first adjacent pair whose residuals change sign.
///
/// Every visited `(x, residual)` pair is appended to `trace`.
pub fn scan_for_sign_change<F>(
    mut residual: F,
    start: f64,
    step: f64,
    max_steps: usize,
    trace: &mut Vec<(f64, f64)>,
) -> Result<Option<RootBracket>>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut x = start;
    let mut fx = residual(x)?;
    trace.push((x, fx));
    for _ in 0..max_steps {
        let nx = x + step;
        let fnx = residual(nx)?;
        trace.push((nx, fnx));
        if fx * fnx <= 0.0 {
            let (lo, hi, f_lo, f_hi) = if step > 0.0 {
                (x, nx, fx, fnx)
            } else {
                (nx, x, fnx, fx)
            };
            return Ok(Some(RootBracket { lo, hi, f_lo, f_hi }));
        }
        x = nx;
        fx = fnx;
    }
    Ok(None)
}
