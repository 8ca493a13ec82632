//! Validated domain types shared across the crate.
//!
//! All powers are stored in watts. dBm only appears at the interface
//! through [`dbm_to_watts`] and [`watts_to_dbm`].

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Converts a power in dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> Result<f64> {
    if !dbm.is_finite() {
        return Err(Error::domain(format!("power in dBm must be finite, got {dbm}")));
    }
    Ok(10f64.powf((dbm - 30.0) / 10.0))
}

/// Converts a power in watts to dBm.
pub fn watts_to_dbm(watts: f64) -> Result<f64> {
    if !(watts > 0.0 && watts.is_finite()) {
        return Err(Error::domain(format!("power in watts must be positive, got {watts}")));
    }
    Ok(10.0 * watts.log10() + 30.0)
}

/// Converts an uncertainty given in dB to the linear ratio ρ.
pub fn rho_from_db(db: f64) -> Result<f64> {
    if !(db > 0.0 && db.is_finite()) {
        return Err(Error::domain(format!(
            "noise uncertainty in dB must be positive, got {db}"
        )));
    }
    Ok(10f64.powf(db / 10.0))
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::domain(format!("{name} must be positive and finite, got {v}")))
    }
}

fn open_unit(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(Error::domain(format!("{name} must lie in (0, 1), got {v}")))
    }
}

/// Antenna counts at source, relay (receive and transmit side) and destination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AntennaConfig {
    n_s: u32,
    n_rr: u32,
    n_rt: u32,
    n_d: u32,
}

impl AntennaConfig {
    pub fn new(n_s: u32, n_rr: u32, n_rt: u32, n_d: u32) -> Result<Self> {
        for (name, n) in [("n_s", n_s), ("n_rr", n_rr), ("n_rt", n_rt), ("n_d", n_d)] {
            if n == 0 {
                return Err(Error::domain(format!("antenna count {name} must be at least 1")));
            }
        }
        Ok(Self { n_s, n_rr, n_rt, n_d })
    }

    /// One antenna everywhere.
    pub const fn single() -> Self {
        Self {
            n_s: 1,
            n_rr: 1,
            n_rt: 1,
            n_d: 1,
        }
    }

    /// `n_t` transmit antennas at S and R, `n_r` receive antennas at R and D.
    pub fn symmetric(n_t: u32, n_r: u32) -> Result<Self> {
        Self::new(n_t, n_r, n_t, n_r)
    }

    pub fn n_s(&self) -> u32 {
        self.n_s
    }

    pub fn n_rr(&self) -> u32 {
        self.n_rr
    }

    pub fn n_rt(&self) -> u32 {
        self.n_rt
    }

    pub fn n_d(&self) -> u32 {
        self.n_d
    }

    /// (transmit, receive) antenna counts of the first hop.
    pub fn hop1(&self) -> (u32, u32) {
        (self.n_s, self.n_rr)
    }

    /// (transmit, receive) antenna counts of the second hop.
    pub fn hop2(&self) -> (u32, u32) {
        (self.n_rt, self.n_d)
    }

    pub fn is_single(&self) -> bool {
        *self == Self::single()
    }
}

impl Default for AntennaConfig {
    fn default() -> Self {
        Self::single()
    }
}

/// Physical configuration of the two-hop link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    p_s: f64,
    p_r: f64,
    sigma_n2: f64,
    rho: f64,
    antennas: AntennaConfig,
}

impl SystemParams {
    pub fn new(p_s: f64, p_r: f64, sigma_n2: f64, rho: f64, antennas: AntennaConfig) -> Result<Self> {
        positive("p_s", p_s)?;
        positive("p_r", p_r)?;
        positive("sigma_n2", sigma_n2)?;
        if !(rho > 1.0 && rho.is_finite()) {
            return Err(Error::domain(format!("rho must be greater than 1, got {rho}")));
        }
        let (mu1, mu2) = (sigma_n2 / rho, sigma_n2 * rho);
        if !(mu1 > 0.0 && mu1 < mu2 && mu2.is_finite()) {
            return Err(Error::domain(format!(
                "noise bounds ({mu1}, {mu2}) are not ordered for sigma_n2 = {sigma_n2}, rho = {rho}"
            )));
        }
        Ok(Self {
            p_s,
            p_r,
            sigma_n2,
            rho,
            antennas,
        })
    }

    /// Builds parameters from a nominal noise level in dBm.
    pub fn from_dbm(p_s: f64, p_r: f64, sigma_n_dbm: f64, rho: f64, antennas: AntennaConfig) -> Result<Self> {
        Self::new(p_s, p_r, dbm_to_watts(sigma_n_dbm)?, rho, antennas)
    }

    pub fn p_s(&self) -> f64 {
        self.p_s
    }

    pub fn p_r(&self) -> f64 {
        self.p_r
    }

    pub fn sigma_n2(&self) -> f64 {
        self.sigma_n2
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn antennas(&self) -> AntennaConfig {
        self.antennas
    }

    /// `(μ₁, μ₂) = (σ_n²/ρ, ρσ_n²)`.
    pub fn noise_bounds(&self) -> (f64, f64) {
        (self.sigma_n2 / self.rho, self.sigma_n2 * self.rho)
    }

    pub fn with_powers(&self, p_s: f64, p_r: f64) -> Result<Self> {
        Self::new(p_s, p_r, self.sigma_n2, self.rho, self.antennas)
    }

    pub fn with_rho(&self, rho: f64) -> Result<Self> {
        Self::new(self.p_s, self.p_r, self.sigma_n2, rho, self.antennas)
    }

    pub fn with_sigma_n2(&self, sigma_n2: f64) -> Result<Self> {
        Self::new(self.p_s, self.p_r, sigma_n2, self.rho, self.antennas)
    }

    pub fn with_antennas(&self, antennas: AntennaConfig) -> Self {
        Self { antennas, ..*self }
    }
}

/// Free-function form of [`SystemParams::noise_bounds`].
pub fn noise_bounds(params: &SystemParams) -> (f64, f64) {
    params.noise_bounds()
}

/// Covertness budget ε, reliability budget δ and power cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintSet {
    epsilon: f64,
    delta: f64,
    p_max: f64,
}

impl ConstraintSet {
    pub fn new(epsilon: f64, delta: f64, p_max: f64) -> Result<Self> {
        open_unit("epsilon", epsilon)?;
        open_unit("delta", delta)?;
        positive("p_max", p_max)?;
        Ok(Self { epsilon, delta, p_max })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    /// Smallest admissible two-hop detection error probability, `1 - ε`.
    pub fn min_dep(&self) -> f64 {
        1.0 - self.epsilon
    }
}

/// Target rate in bit/s/Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateParams {
    t: f64,
}

impl RateParams {
    pub fn new(t: f64) -> Result<Self> {
        if t >= 0.0 && t.is_finite() {
            Ok(Self { t })
        } else {
            Err(Error::domain(format!("target rate must be finite and >= 0, got {t}")))
        }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// SNR threshold `κ = 2^(2t) - 1`.
    pub fn kappa(&self) -> f64 {
        (2.0 * self.t * std::f64::consts::LN_2).exp_m1()
    }
}

/// Default configuration values used by the CLI and the examples.
pub mod defaults {
    pub const SIGMA_N_DBM: f64 = -5.0;
    pub const RHO: f64 = 1.5;
    pub const P_MAX: f64 = 5.0;
    pub const EPSILON: f64 = 0.15;
    pub const DELTA: f64 = 0.1;
    pub const SEED: u64 = 42;
}

/// Parsed `key = value` configuration file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues {
    entries: BTreeMap<String, String>,
}

impl KeyValues {
    /// Parses lines of `key = value`. Blank lines and text after `#` are
    /// ignored. Keys are case-sensitive; `-` and `_` are interchangeable.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::domain(format!(
                    "config line {}: expected `key = value`, got `{raw}`",
                    lineno + 1
                ))
            })?;
            let key = normalize_key(key.trim());
            let value = value.trim();
            if key.is_empty() || value.is_empty() {
                return Err(Error::domain(format!("config line {}: empty key or value", lineno + 1)));
            }
            if entries.insert(key.clone(), value.to_string()).is_some() {
                return Err(Error::domain(format!(
                    "config line {}: duplicate key `{key}`",
                    lineno + 1
                )));
            }
        }
        Ok(Self { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(&normalize_key(key)).map(String::as_str)
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>> {
        self.get(key)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| Error::domain(format!("config key `{key}`: `{v}` is not a number")))
            })
            .transpose()
    }

    pub fn get_u64(&self, key: &str) -> Result<Option<u64>> {
        self.get(key)
            .map(|v| {
                v.parse::<u64>()
                    .map_err(|_| Error::domain(format!("config key `{key}`: `{v}` is not a non-negative integer")))
            })
            .transpose()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl fmt::Display for KeyValues {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

fn normalize_key(key: &str) -> String {
    key.replace('-', "_")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dbm_conversion_examples() {
        assert_eq!(dbm_to_watts(30.0).unwrap(), 1.0);
        assert!((dbm_to_watts(0.0).unwrap() - 1e-3).abs() < 1e-18);
        assert!((dbm_to_watts(-5.0).unwrap() - 10f64.powf(-3.5)).abs() < 1e-18);
        assert!(dbm_to_watts(f64::NAN).is_err());
        assert!(watts_to_dbm(0.0).is_err());
    }

    #[test]
    fn noise_bound_examples() {
        let p = SystemParams::new(1.0, 1.0, 1.0, 2.0, AntennaConfig::single()).unwrap();
        assert_eq!(p.noise_bounds(), (0.5, 2.0));

        let p = SystemParams::new(1.0, 1.0, 1.0, 1.0 + 1e-9, AntennaConfig::single()).unwrap();
        let (a, b) = p.noise_bounds();
        assert!(b - a <= 2.1e-9);

        let p = SystemParams::from_dbm(1.0, 1.0, -5.0, 1.5, AntennaConfig::single()).unwrap();
        let (a, b) = noise_bounds(&p);
        assert!((a - 2.108e-4).abs() < 1e-7);
        assert!((b - 4.743e-4).abs() < 1e-7);
    }

    #[test]
    fn invalid_construction_is_rejected() {
        let ant = AntennaConfig::single();
        assert!(SystemParams::new(0.0, 1.0, 1.0, 1.5, ant).is_err());
        assert!(SystemParams::new(1.0, -1.0, 1.0, 1.5, ant).is_err());
        assert!(SystemParams::new(1.0, 1.0, 0.0, 1.5, ant).is_err());
        assert!(SystemParams::new(1.0, 1.0, 1.0, 1.0, ant).is_err());
        assert!(SystemParams::new(1.0, 1.0, 1.0, f64::INFINITY, ant).is_err());
        assert!(AntennaConfig::new(1, 0, 1, 1).is_err());
        assert!(ConstraintSet::new(0.0, 0.1, 5.0).is_err());
        assert!(ConstraintSet::new(0.1, 1.0, 5.0).is_err());
        assert!(ConstraintSet::new(0.1, 0.1, 0.0).is_err());
        assert!(RateParams::new(-0.1).is_err());
    }

    #[test]
    fn kappa_matches_definition() {
        let r = RateParams::new(1.5).unwrap();
        assert!((r.kappa() - 7.0).abs() < 1e-14);
        assert_eq!(RateParams::new(0.0).unwrap().kappa(), 0.0);
    }

    #[test]
    fn rho_from_db_converts() {
        assert!((rho_from_db(10f64.log10() * 10.0).unwrap() - 10.0).abs() < 1e-12);
        assert!(rho_from_db(0.0).is_err());
    }

    #[test]
    fn key_values_parse() {
        let kv = KeyValues::parse("# comment\nrho = 1.5\nsigma-n-dbm = -5 # trailing\n\nseed=7\n").unwrap();
        assert_eq!(kv.get_f64("rho").unwrap(), Some(1.5));
        assert_eq!(kv.get_f64("sigma_n_dbm").unwrap(), Some(-5.0));
        assert_eq!(kv.get_u64("seed").unwrap(), Some(7));
        assert_eq!(kv.get("missing"), None);
        assert!(KeyValues::parse("novalue").is_err());
        assert!(KeyValues::parse("a = 1\na = 2").is_err());
        assert!(KeyValues::parse("rho = abc").unwrap().get_f64("rho").is_err());
    }
}
