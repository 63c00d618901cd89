//! Adaptive Gauss–Kronrod (10/21-point) quadrature.
//!
//! Panels are refined by bisecting the one with the largest error estimate
//! until the summed error estimate meets `max(abs_tol, rel_tol * |I|)`.
//! Everything is evaluated sequentially, and the final sum runs over the
//! panels in left-to-right order, so results are bit-reproducible.

use crate::error::{Error, Result};

/// Kronrod abscissae on [-1, 1] (non-negative half, descending; the last is
/// the centre). Odd indices are the embedded 10-point Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_208_292_764,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

/// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

/// Tolerances and refinement budget for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-300,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSpec {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "quadrature tolerances must be positive (rel {}, abs {})",
                self.rel_tol, self.abs_tol
            )));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::InvalidConfig(
                "max_subdivisions must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

fn kronrod_panel<F: FnMut(f64) -> f64>(f: &mut F, lo: f64, hi: f64) -> Panel {
    let centre = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(centre);
    let mut kronrod = WGK[10] * fc;
    let mut gauss = 0.0;
    let mut abs_sum = kronrod.abs();
    let mut fv = [(0.0, 0.0); 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(centre - dx);
        let f2 = f(centre + dx);
        fv[j] = (f1, f2);
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        asc += WGK[j] * ((fv[j].0 - mean).abs() + (fv[j].1 - mean).abs());
    }
    let value = kronrod * half;
    let abs_val = abs_sum * half.abs();
    let asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    // QUADPACK error rescaling
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    if abs_val > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * abs_val);
    }
    if !value.is_finite() {
        error = f64::INFINITY;
    }
    Panel { lo, hi, value, error }
}

/// Integrate `f` over `[lo, hi]` without checking the sign of the endpoints.
pub(crate) fn integrate_interval<F>(mut f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    spec.validate()?;
    if lo == hi {
        return Ok(0.0);
    }
    let mut panels = vec![kronrod_panel(&mut f, lo, hi)];
    loop {
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.error).sum();
        if !total.is_finite() {
            return Err(Error::Numerical(format!(
                "non-finite integrand on [{lo:e}, {hi:e}]"
            )));
        }
        if err <= spec.abs_tol.max(spec.rel_tol * total.abs()) {
            return Ok(ordered_sum(&mut panels));
        }
        // bisect the worst panel; ties go to the leftmost so the sequence is fixed
        let (idx, worst) = panels
            .iter()
            .enumerate()
            .fold((0, panels[0]), |(bi, bp), (i, p)| {
                if p.error > bp.error {
                    (i, *p)
                } else {
                    (bi, bp)
                }
            });
        let mid = 0.5 * (worst.lo + worst.hi);
        if panels.len() >= spec.max_subdivisions || mid <= worst.lo || mid >= worst.hi {
            return Err(Error::Convergence {
                estimate: ordered_sum(&mut panels),
                error: err,
                subdivisions: panels.len(),
            });
        }
        panels[idx] = kronrod_panel(&mut f, worst.lo, mid);
        panels.push(kronrod_panel(&mut f, mid, worst.hi));
    }
}

fn ordered_sum(panels: &mut [Panel]) -> f64 {
    panels.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    panels.iter().map(|p| p.value).sum()
}

/// Integrate over a frequency band `[f1, f2]` with `0 < f1 < f2`.
///
/// Callers are responsible for declaring the support of their integrand:
/// anything that vanishes off the band must be integrated only over it.
pub fn integrate_band<F>(integrand: F, band: (f64, f64), spec: &QuadratureSpec) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (f1, f2) = band;
    if !(f1 > 0.0 && f2 > f1 && f2.is_finite()) {
        return Err(Error::Domain(format!(
            "band must satisfy 0 < f1 < f2, got [{f1:e}, {f2:e}]"
        )));
    }
    integrate_interval(integrand, f1, f2, spec)
}

/// Integrate over `[0, ∞)` through the map `x = t / (1 - t)`.
pub fn integrate_semi_infinite<F>(mut integrand: F, spec: &QuadratureSpec) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    integrate_interval(
        |t| {
            let one_minus = 1.0 - t;
            let x = t / one_minus;
            let v = integrand(x) / (one_minus * one_minus);
            // the Kronrod nodes never touch t = 1, but x may still overflow
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        spec,
    )
}
