//! Data behind the performance figures: minimum DEP against power, noise
//! uncertainty and the power pair; throughput against rate, antenna
//! counts and the covertness budget.
//!
//! Throughput figures operate at the equal-power covertness boundary
//! `p_sym` (capped at `P_max`), the largest power the warden budget allows
//! when both hops transmit alike.

use crate::detection::min_dep_two_hop;
use crate::error::{Error, Result};
use crate::model::{defaults, AntennaConfig, ConstraintSet, RateParams, SystemParams};
use crate::optimize::{optimize_multi, optimize_single, rate_at_outage, symmetric_covert_power, MultiSearch};
use crate::table::{Cell, Table};
use crate::throughput::{throughput, Scenario};

/// Figure numbers with data.
pub const FIGURES: [u8; 6] = [3, 4, 5, 6, 7, 8];

/// Inputs shared by the figures.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureConfig {
    /// Nominal noise levels of the DEP curves, dBm.
    pub sigma_levels_dbm: Vec<f64>,
    /// Nominal noise of the throughput figures and the power-pair map, dBm.
    pub sigma_n_dbm: f64,
    pub rho: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub p_max: f64,
    /// Equal power of the noise-uncertainty sweep, W.
    pub p_rho_sweep: f64,
    /// Antennas `(n_t, n_r)` of the multi-antenna curves.
    pub antennas: (u32, u32),
    /// Rate of the antenna-count figure.
    pub t_antennas: f64,
    /// Rate of the non-optimized throughput in the covertness-budget figure.
    pub t_base: f64,
}

impl Default for FigureConfig {
    fn default() -> Self {
        Self {
            sigma_levels_dbm: vec![-10.0, -5.0, 3.0],
            sigma_n_dbm: defaults::SIGMA_N_DBM,
            rho: defaults::RHO,
            epsilon: defaults::EPSILON,
            delta: defaults::DELTA,
            p_max: defaults::P_MAX,
            p_rho_sweep: 3.0,
            antennas: (2, 8),
            t_antennas: 1.5,
            t_base: 1.0,
        }
    }
}

impl FigureConfig {
    fn params(&self, sigma_dbm: f64, antennas: AntennaConfig) -> Result<SystemParams> {
        SystemParams::from_dbm(1.0, 1.0, sigma_dbm, self.rho, antennas)
    }

    fn constraints(&self, epsilon: f64) -> Result<ConstraintSet> {
        ConstraintSet::new(epsilon, self.delta, self.p_max)
    }

    fn multi(&self) -> Result<AntennaConfig> {
        AntennaConfig::symmetric(self.antennas.0, self.antennas.1)
    }

    fn stamp(&self, t: &mut Table, which: u8) {
        let levels: Vec<String> = self.sigma_levels_dbm.iter().map(|v| v.to_string()).collect();
        t.param("figure", which)
            .param("sigma_levels_dbm", levels.join("|"))
            .param("sigma_n_dbm", self.sigma_n_dbm)
            .param("rho", self.rho)
            .param("epsilon", self.epsilon)
            .param("delta", self.delta)
            .param("p_max", self.p_max)
            .param("p_rho_sweep", self.p_rho_sweep)
            .param("n_t", self.antennas.0)
            .param("n_r", self.antennas.1)
            .param("t_antennas", self.t_antennas)
            .param("t_base", self.t_base);
    }
}

/// `n` points from `a` to `b`, evenly spaced in `ln`.
pub fn log_space(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// `n` points from `a` to `b`, evenly spaced.
pub fn lin_space(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// Equal power on the covertness boundary, or `P_max` if every power up
/// to `P_max` is covert.
pub fn boundary_power(constraints: &ConstraintSet, params: &SystemParams) -> Result<f64> {
    Ok(symmetric_covert_power(constraints, params, constraints.p_max())?.unwrap_or(constraints.p_max()))
}

/// Data of one figure.
pub fn figure(which: u8, cfg: &FigureConfig) -> Result<Table> {
    let mut table = match which {
        3 => dep_vs_power(cfg)?,
        4 => dep_vs_rho(cfg)?,
        5 => dep_vs_power_pair(cfg)?,
        6 => eta_vs_rate(cfg)?,
        7 => eta_vs_antennas(cfg)?,
        8 => eta_vs_epsilon(cfg)?,
        _ => {
            return Err(Error::domain(format!(
                "figure {which} has no data; choose one of 3, 4, 5, 6, 7, 8"
            )))
        }
    };
    cfg.stamp(&mut table, which);
    Ok(table)
}

fn dep_vs_power(cfg: &FigureConfig) -> Result<Table> {
    let mut t = Table::new(["sigma_n_dbm", "p_watts", "xi_star"]);
    t.param("p_grid", "log 1e-6..10 W x50");
    for &sigma in &cfg.sigma_levels_dbm {
        let sp = cfg.params(sigma, AntennaConfig::single())?;
        for p in log_space(1e-6, 10.0, 50) {
            let xi = min_dep_two_hop(&sp.with_powers(p, p)?)?;
            t.push(vec![sigma.into(), p.into(), xi.into()])?;
        }
    }
    Ok(t)
}

fn dep_vs_rho(cfg: &FigureConfig) -> Result<Table> {
    let mut t = Table::new(["sigma_n_dbm", "rho", "xi_star"]);
    t.param("rho_grid", "linear 1.01..3 x50");
    for &sigma in &cfg.sigma_levels_dbm {
        let sp = cfg.params(sigma, AntennaConfig::single())?;
        for rho in lin_space(1.01, 3.0, 50) {
            let p = cfg.p_rho_sweep;
            let xi = min_dep_two_hop(&sp.with_rho(rho)?.with_powers(p, p)?)?;
            t.push(vec![sigma.into(), rho.into(), xi.into()])?;
        }
    }
    Ok(t)
}

fn dep_vs_power_pair(cfg: &FigureConfig) -> Result<Table> {
    let mut t = Table::new(["p_s", "p_r", "xi_star"]);
    t.param("p_grid", "log 1e-5..1e-1 W x30");
    let sp = cfg.params(cfg.sigma_n_dbm, AntennaConfig::single())?;
    let axis = log_space(1e-5, 1e-1, 30);
    for &p_s in &axis {
        for &p_r in &axis {
            let xi = min_dep_two_hop(&sp.with_powers(p_s, p_r)?)?;
            t.push(vec![p_s.into(), p_r.into(), xi.into()])?;
        }
    }
    Ok(t)
}

/// Points of the rate grid in the throughput-versus-rate figure.
pub const RATE_POINTS: usize = 200;

fn eta_vs_rate(cfg: &FigureConfig) -> Result<Table> {
    let mut t = Table::new(["scenario", "p_watts", "t", "p_out", "eta"]);
    let c = cfg.constraints(cfg.epsilon)?;
    for (label, scenario, ant) in [
        ("single", Scenario::Single, AntennaConfig::single()),
        ("multi", Scenario::Multi, cfg.multi()?),
    ] {
        let sp = cfg.params(cfg.sigma_n_dbm, ant)?;
        let p = boundary_power(&c, &sp)?;
        let sp = sp.with_powers(p, p)?;
        let t_max = rate_at_outage(p, 0.999, scenario, &sp)?;
        for rate in lin_space(0.0, t_max, RATE_POINTS) {
            let out = throughput(&sp, RateParams::new(rate)?, scenario)?;
            t.push(vec![
                label.into(),
                p.into(),
                rate.into(),
                out.p_out.into(),
                out.eta.into(),
            ])?;
        }
    }
    Ok(t)
}

fn eta_vs_antennas(cfg: &FigureConfig) -> Result<Table> {
    let mut t = Table::new(["n_t", "n_r", "p_watts", "eta"]);
    let c = cfg.constraints(cfg.epsilon)?;
    let sp = cfg.params(cfg.sigma_n_dbm, AntennaConfig::single())?;
    let p = boundary_power(&c, &sp)?;
    let rate = RateParams::new(cfg.t_antennas)?;
    for n_t in 1..=4u32 {
        for n_r in 1..=8u32 {
            let spm = sp
                .with_antennas(AntennaConfig::symmetric(n_t, n_r)?)
                .with_powers(p, p)?;
            let eta = throughput(&spm, rate, Scenario::Multi)?.eta;
            t.push(vec![n_t.into(), n_r.into(), p.into(), eta.into()])?;
        }
    }
    Ok(t)
}

/// The four throughputs compared in the covertness-budget figure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputComparison {
    pub p_boundary: f64,
    /// Single-antenna, boundary power, rate `t_base`.
    pub eta_s: f64,
    /// Single-antenna optimum.
    pub eta_s_star: f64,
    /// Multi-antenna, boundary power, rate `t_base`.
    pub eta_m: f64,
    /// Multi-antenna optimum.
    pub eta_m_star: f64,
}

/// Baseline and optimized throughput of both scenarios at budget `epsilon`.
pub fn compare_throughput(cfg: &FigureConfig, epsilon: f64) -> Result<ThroughputComparison> {
    let c = cfg.constraints(epsilon)?;
    let sp = cfg.params(cfg.sigma_n_dbm, AntennaConfig::single())?;
    let spm = sp.with_antennas(cfg.multi()?);
    let p = boundary_power(&c, &sp)?;
    let rate = RateParams::new(cfg.t_base)?;
    let eta_s = throughput(&sp.with_powers(p, p)?, rate, Scenario::Single)?.eta;
    let eta_m = throughput(&spm.with_powers(p, p)?, rate, Scenario::Multi)?.eta;
    let eta_s_star = optimize_single(&c, &sp)?.eta;
    let eta_m_star = optimize_multi(&c, &spm, &MultiSearch::default_for(&c, &spm)?)?.eta;
    Ok(ThroughputComparison {
        p_boundary: p,
        eta_s,
        eta_s_star,
        eta_m,
        eta_m_star,
    })
}

fn eta_vs_epsilon(cfg: &FigureConfig) -> Result<Table> {
    let mut t = Table::new(["epsilon", "p_boundary", "eta_s", "eta_s_star", "eta_m", "eta_m_star"]);
    t.param("epsilon_grid", "linear 0.05..0.5 x10");
    for eps in lin_space(0.05, 0.5, 10) {
        let cmp = compare_throughput(cfg, eps)?;
        t.push(vec![
            Cell::from(eps),
            cmp.p_boundary.into(),
            cmp.eta_s.into(),
            cmp.eta_s_star.into(),
            cmp.eta_m.into(),
            cmp.eta_m_star.into(),
        ])?;
    }
    Ok(t)
}
