//! Physical constants, link configuration, line-of-sight channel and noise.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lowest frequency ever integrated over. Friis gain diverges at DC, so a
/// band that nominally starts at 0 Hz is clipped here.
pub const MIN_BAND_EDGE_HZ: f64 = 1e3;

/// Speed of light used by default (round value).
pub const C_ROUND: f64 = 3e8;
/// Exact speed of light, m/s.
pub const C_EXACT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// Speed of light, m/s.
    pub c: f64,
    /// Boltzmann constant, J/K.
    pub kb: f64,
    /// Vacuum permeability, H/m.
    pub mu0: f64,
    /// Vacuum permittivity, F/m.
    pub eps0: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            c: C_ROUND,
            kb: 1.380_649e-23,
            mu0: 1.256_637_062_12e-6,
            eps0: 8.854_187_812_8e-12,
        }
    }
}

impl PhysicalConstants {
    /// CODATA values throughout, including the exact speed of light.
    pub fn exact() -> Self {
        Self {
            c: C_EXACT,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if [self.c, self.kb, self.mu0, self.eps0]
            .iter()
            .all(|v| *v > 0.0 && v.is_finite())
        {
            Ok(())
        } else {
            Err(Error::InvalidConfig(
                "physical constants must be positive".into(),
            ))
        }
    }
}

/// Parameters of the single-input single-output link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    /// Carrier frequency, Hz.
    pub fc: f64,
    /// Absolute signalling bandwidth, Hz.
    pub bw: f64,
    /// Transmit PSD ceiling, W/Hz.
    pub emax: f64,
    /// Tx–Rx distance, m.
    pub distance: f64,
    pub gain_tx: f64,
    pub gain_rx: f64,
    /// Noise temperature, K.
    pub temperature: f64,
    /// LNA noise factor (linear, ≥ 1).
    pub noise_factor: f64,
    /// Radius of the sphere enclosing the receive antenna, m.
    pub radius: f64,
    pub constants: PhysicalConstants,
}

impl SystemConfig {
    /// Baseline link used throughout the examples: 600 MHz carrier,
    /// 20 % bandwidth, 4 W over 1 km, 3 dB noise factor, λ/a = 20.
    pub fn baseline() -> Self {
        let fc = 600e6;
        let bw = 0.2 * fc;
        Self {
            fc,
            bw,
            emax: 4.0 / bw,
            distance: 1000.0,
            gain_tx: 1.5,
            gain_rx: 1.5,
            temperature: 300.0,
            noise_factor: 2.0,
            radius: C_ROUND / fc / 20.0,
            constants: PhysicalConstants::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.constants.validate()?;
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")))
            }
        };
        positive("carrier frequency", self.fc)?;
        positive("bandwidth", self.bw)?;
        positive("distance", self.distance)?;
        positive("radius", self.radius)?;
        positive("temperature", self.temperature)?;
        positive("tx gain", self.gain_tx)?;
        positive("rx gain", self.gain_rx)?;
        if !(self.emax >= 0.0 && self.emax.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "transmit PSD must be non-negative, got {}",
                self.emax
            )));
        }
        if self.fc - 0.5 * self.bw < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "band [{:e}, {:e}] extends below 0 Hz",
                self.fc - 0.5 * self.bw,
                self.fc + 0.5 * self.bw
            )));
        }
        if !(self.noise_factor >= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "noise factor must be >= 1, got {}",
                self.noise_factor
            )));
        }
        Ok(())
    }

    /// Carrier wavelength, m.
    pub fn wavelength(&self) -> f64 {
        self.constants.c / self.fc
    }

    pub fn lambda_over_a(&self) -> f64 {
        self.wavelength() / self.radius
    }

    /// Total transmit power, W.
    pub fn power(&self) -> f64 {
        self.emax * self.bw
    }

    /// Signalling band centred on the carrier. The lower edge is clipped to
    /// [`MIN_BAND_EDGE_HZ`].
    pub fn band(&self) -> (f64, f64) {
        (
            (self.fc - 0.5 * self.bw).max(MIN_BAND_EDGE_HZ),
            self.fc + 0.5 * self.bw,
        )
    }

    pub fn in_band(&self, f: f64) -> bool {
        let (lo, hi) = self.band();
        f >= lo && f <= hi
    }

    pub fn with_power(mut self, power_w: f64) -> Self {
        self.emax = power_w / self.bw;
        self
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = radius;
        self
    }

    pub fn with_lambda_over_a(mut self, ratio: f64) -> Self {
        self.radius = self.wavelength() / ratio;
        self
    }

    /// Change the bandwidth while keeping the total power fixed.
    pub fn with_bandwidth_keep_power(mut self, bw: f64) -> Self {
        let p = self.power();
        self.bw = bw;
        self.emax = p / bw;
        self
    }

    /// `|H(f)|^2` from the Friis equation.
    pub fn channel_gain(&self, f: f64) -> Result<f64> {
        if !(f > 0.0) {
            return Err(Error::Domain(format!(
                "channel gain needs a positive frequency, got {f}"
            )));
        }
        Ok(self.channel_gain_unchecked(f))
    }

    #[inline]
    pub(crate) fn channel_gain_unchecked(&self, f: f64) -> f64 {
        let r = self.constants.c / (4.0 * PI * f * self.distance);
        self.gain_tx * self.gain_rx * r * r
    }

    /// Ambient noise PSD `N0 = kb T` and amplifier noise PSD
    /// `N_LNA = kb T (Nf - 1)`, both W/Hz.
    ///
    /// The LNA gain and input resistance cancel out of the received SNR and
    /// are not modelled.
    pub fn noise_densities(&self) -> Result<NoiseDensities> {
        if !(self.temperature > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "temperature must be positive, got {}",
                self.temperature
            )));
        }
        if !(self.noise_factor >= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "noise factor must be >= 1, got {}",
                self.noise_factor
            )));
        }
        let n0 = self.constants.kb * self.temperature;
        Ok(NoiseDensities {
            n0,
            n_lna: n0 * (self.noise_factor - 1.0),
        })
    }

    /// Flat transmit allocation: `emax` inside the band, zero outside.
    pub fn transmit_psd(&self, f: f64) -> f64 {
        if self.in_band(f) {
            self.emax
        } else {
            0.0
        }
    }

    /// Received signal PSD `P_t(f) |H(f)|^2`.
    #[inline]
    pub fn received_psd(&self, f: f64) -> f64 {
        let p = self.transmit_psd(f);
        if p == 0.0 {
            0.0
        } else {
            p * self.channel_gain_unchecked(f)
        }
    }

    /// Ratio `|Y12| / |Y11|` of the two-port channel admittance matrix at
    /// frequency `f`, with the transmit resistance `r1` and the radiation
    /// resistance `r2` in ohms.
    pub fn admittance_ratio(&self, f: f64, r1: f64, r2: f64) -> Complex64 {
        let c = self.constants.c;
        let a = self.radius;
        let s = Complex64::new(0.0, 2.0 * PI * f);
        let g = (self.gain_tx * self.gain_rx).sqrt();
        let path = c / (4.0 * PI * f * self.distance);
        let sa = s * a;
        let den = (sa * r2).powi(2) + (c * r2) * (c * r2) + sa * c * r2 * r2;
        let y11 = (den - 4.0 * path * path * sa * c * r2 * r2 * g) / (den * r1);
        let y12 = -2.0 * c * sa * sa * g / (4.0 * PI * f * self.distance * den)
            * (r2.powi(3) / r1).sqrt();
        y12 / y11
    }

    /// Far-field check for neglecting the reverse coupling of the channel.
    pub fn unilateral_check(&self, f: f64, opts: UnilateralOptions) -> UnilateralCheck {
        let ratio = self.admittance_ratio(f, opts.r1, opts.r2).norm();
        UnilateralCheck {
            ratio12_11: ratio,
            ok: ratio < opts.threshold,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseDensities {
    pub n0: f64,
    pub n_lna: f64,
}

/// A validated configuration together with its resolved noise densities.
///
/// `n0` is the ambient density seen at the antenna and includes any extra
/// frequency-flat interference added with [`Link::with_extra_noise`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    pub cfg: SystemConfig,
    pub n0: f64,
    pub n_lna: f64,
}

impl Link {
    pub fn new(cfg: SystemConfig) -> Result<Self> {
        cfg.validate()?;
        let n = cfg.noise_densities()?;
        Ok(Self {
            cfg,
            n0: n.n0,
            n_lna: n.n_lna,
        })
    }

    /// Add a flat noise density (W/Hz) to the ambient term.
    pub fn with_extra_noise(mut self, psd: f64) -> Self {
        self.n0 += psd;
        self
    }

    pub fn band(&self) -> (f64, f64) {
        self.cfg.band()
    }

    #[inline]
    pub fn received_psd(&self, f: f64) -> f64 {
        self.cfg.received_psd(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnilateralOptions {
    pub r1: f64,
    pub r2: f64,
    pub threshold: f64,
}

impl Default for UnilateralOptions {
    fn default() -> Self {
        Self {
            r1: 1.0,
            r2: 1.0,
            threshold: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnilateralCheck {
    pub ratio12_11: f64,
    pub ok: bool,
}

/// How the points of a [`FrequencyGrid`] were laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridScheme {
    Uniform,
    Log,
    QuadratureNodes,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    samples: Vec<f64>,
    scheme: GridScheme,
}

impl FrequencyGrid {
    pub fn uniform(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Self::new(vec![lo], GridScheme::Uniform);
        }
        let step = (hi - lo) / (n - 1) as f64;
        let mut samples: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
        samples[n - 1] = hi;
        Self::new(samples, GridScheme::Uniform)
    }

    pub fn log(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo > 0.0) {
            return Err(Error::Domain("log grid needs a positive lower edge".into()));
        }
        if n < 2 {
            return Self::new(vec![lo], GridScheme::Log);
        }
        let (l0, l1) = (lo.ln(), hi.ln());
        let step = (l1 - l0) / (n - 1) as f64;
        let mut samples: Vec<f64> = (0..n).map(|i| (l0 + step * i as f64).exp()).collect();
        samples[0] = lo;
        samples[n - 1] = hi;
        Self::new(samples, GridScheme::Log)
    }

    pub fn new(samples: Vec<f64>, scheme: GridScheme) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Domain("frequency grid is empty".into()));
        }
        if samples.iter().any(|f| !(*f > 0.0 && f.is_finite())) {
            return Err(Error::Domain("grid frequencies must be positive".into()));
        }
        if samples.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("grid must be strictly increasing".into()));
        }
        Ok(Self { samples, scheme })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn scheme(&self) -> GridScheme {
        self.scheme
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Flat key/value form of [`SystemConfig`] as read from a JSON file.
///
/// `power_w` takes precedence over `emax_w_per_hz`, and `radius_m` over
/// `lambda_over_a`. Missing keys fall back to [`SystemConfig::baseline`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fc_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bw_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power_w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emax_w_per_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gain_tx: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gain_rx: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature_k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_factor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_over_a: Option<f64>,
    /// Use 299792458 m/s instead of 3e8.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_c: Option<bool>,
}

impl ConfigDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Overlay the document on `base`.
    pub fn apply(&self, base: SystemConfig) -> Result<SystemConfig> {
        let mut cfg = base;
        if self.exact_c == Some(true) {
            cfg.constants = PhysicalConstants::exact();
        }
        let power = base.power();
        if let Some(v) = self.fc_hz {
            cfg.fc = v;
        }
        if let Some(v) = self.bw_hz {
            cfg.bw = v;
            cfg.emax = power / v;
        }
        if let Some(v) = self.emax_w_per_hz {
            cfg.emax = v;
        }
        if let Some(p) = self.power_w {
            cfg.emax = p / cfg.bw;
        }
        if let Some(v) = self.distance_m {
            cfg.distance = v;
        }
        if let Some(v) = self.gain_tx {
            cfg.gain_tx = v;
        }
        if let Some(v) = self.gain_rx {
            cfg.gain_rx = v;
        }
        if let Some(v) = self.temperature_k {
            cfg.temperature = v;
        }
        if let Some(v) = self.noise_factor {
            cfg.noise_factor = v;
        }
        if let Some(r) = self.lambda_over_a {
            cfg.radius = cfg.wavelength() / r;
        }
        if let Some(a) = self.radius_m {
            cfg.radius = a;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn into_config(&self) -> Result<SystemConfig> {
        self.apply(SystemConfig::baseline())
    }
}
