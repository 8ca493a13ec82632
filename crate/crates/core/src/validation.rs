//! Monte-Carlo validation campaign: every analytic evaluator against its
//! simulated counterpart on a fixed grid.

use crate::channel::RngSpec;
use crate::detection::{mc_dep_two_hop, min_dep_two_hop, optimal_threshold};
use crate::error::Result;
use crate::model::{AntennaConfig, RateParams, SystemParams};
use crate::montecarlo::McEstimate;
use crate::table::{Cell, Table};
use crate::throughput::{
    mc_outage_hop, mc_throughput, outage_hop_multi_reference, outage_hop_single, throughput_single, Scenario,
};

/// Agreement radius in standard errors.
pub const SIGMA_RADIUS: f64 = 3.0;

/// Powers (W) and nominal noise levels (dBm) of the DEP checks.
pub const DEP_POWERS_W: [f64; 3] = [1.0, 3.0, 5.0];
pub const DEP_SIGMA_DBM: [f64; 3] = [-10.0, -5.0, 3.0];
/// Rates of the single-antenna outage and throughput checks.
pub const SINGLE_RATES: [f64; 3] = [0.5, 1.0, 1.5];
/// Antenna pairs of the multi-antenna outage checks, run at 1 W and `T = 1.5`.
pub const MULTI_ANTENNAS: [(u32, u32); 4] = [(1, 1), (2, 2), (2, 8), (4, 4)];

/// One analytic-versus-simulated comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub params: String,
    pub analytic: f64,
    pub mc: McEstimate,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.mc.agrees_with(self.analytic, SIGMA_RADIUS)
    }
}

/// Sample count, seed and worker count of a campaign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Campaign {
    pub samples: u64,
    pub seed: u64,
    pub workers: u32,
    /// Nominal noise of the outage and throughput checks, dBm.
    pub sigma_n_dbm: f64,
    pub rho: f64,
}

impl Campaign {
    // Each check draws from its own stream so adding a check never shifts
    // the samples of another.
    fn rng(&self, index: u64) -> RngSpec {
        RngSpec::new(self.seed, index)
    }
}

/// Minimum two-hop DEP at `τ*` on the power by noise grid.
pub fn dep_checks(c: &Campaign) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (si, &sigma) in DEP_SIGMA_DBM.iter().enumerate() {
        for (pi, &p) in DEP_POWERS_W.iter().enumerate() {
            let sp = SystemParams::from_dbm(p, p, sigma, c.rho, AntennaConfig::single())?;
            let tau = optimal_threshold(&sp);
            let mc = mc_dep_two_hop(tau, &sp, c.samples, c.rng((si * 3 + pi) as u64), c.workers)?;
            out.push(Check {
                name: "min_dep_two_hop",
                params: format!("p={p};sigma_n_dbm={sigma};rho={}", c.rho),
                analytic: min_dep_two_hop(&sp)?,
                mc,
            });
        }
    }
    Ok(out)
}

/// Single-antenna hop outage and throughput on the power by rate grid.
pub fn single_checks(c: &Campaign) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (pi, &p) in DEP_POWERS_W.iter().enumerate() {
        let sp = SystemParams::from_dbm(p, p, c.sigma_n_dbm, c.rho, AntennaConfig::single())?;
        for (ti, &t) in SINGLE_RATES.iter().enumerate() {
            let rate = RateParams::new(t)?;
            let params = format!("p={p};t={t};sigma_n_dbm={};rho={}", c.sigma_n_dbm, c.rho);
            let idx = 100 + 2 * (pi * 3 + ti) as u64;
            out.push(Check {
                name: "outage_hop_single",
                params: params.clone(),
                analytic: outage_hop_single(p, rate, &sp)?,
                mc: mc_outage_hop(p, rate, &sp, 1, 1, c.samples, c.rng(idx), c.workers)?,
            });
            out.push(Check {
                name: "throughput_single",
                params,
                analytic: throughput_single(&sp, rate)?.eta,
                mc: mc_throughput(&sp, rate, Scenario::Single, c.samples, c.rng(idx + 1), c.workers)?,
            });
        }
    }
    Ok(out)
}

/// Multi-antenna hop outage for each antenna pair at 1 W, `T = 1.5`.
pub fn multi_checks(c: &Campaign) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let (p, t) = (1.0, 1.5);
    let rate = RateParams::new(t)?;
    let sp = SystemParams::from_dbm(p, p, c.sigma_n_dbm, c.rho, AntennaConfig::single())?;
    for (i, &(n_t, n_r)) in MULTI_ANTENNAS.iter().enumerate() {
        out.push(Check {
            name: "outage_hop_multi",
            params: format!(
                "p={p};t={t};n_t={n_t};n_r={n_r};sigma_n_dbm={};rho={}",
                c.sigma_n_dbm, c.rho
            ),
            analytic: outage_hop_multi_reference(p, rate, &sp, n_t, n_r)?,
            mc: mc_outage_hop(p, rate, &sp, n_t, n_r, c.samples, c.rng(200 + i as u64), c.workers)?,
        });
    }
    Ok(out)
}

/// The full campaign.
pub fn run_campaign(c: &Campaign) -> Result<Vec<Check>> {
    let mut checks = dep_checks(c)?;
    checks.extend(single_checks(c)?);
    checks.extend(multi_checks(c)?);
    Ok(checks)
}

/// Campaign results as a table.
pub fn checks_table(c: &Campaign, checks: &[Check]) -> Result<Table> {
    let mut t = Table::new([
        "check",
        "params",
        "analytic",
        "mc_mean",
        "mc_stderr",
        "z_score",
        "samples",
        "passed",
    ]);
    t.param("samples", c.samples)
        .param("seed", c.seed)
        .param("workers", c.workers)
        .param("sigma_n_dbm", c.sigma_n_dbm)
        .param("rho", c.rho)
        .param("radius_se", SIGMA_RADIUS);
    for ch in checks {
        t.push(vec![
            Cell::from(ch.name),
            Cell::from(ch.params.clone()),
            ch.analytic.into(),
            ch.mc.mean.into(),
            ch.mc.stderr.into(),
            ch.mc.z_score(ch.analytic).into(),
            Cell::Int(ch.mc.n as i64),
            Cell::from(if ch.passed() { "true" } else { "false" }),
        ])?;
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_campaign_passes() {
        let c = Campaign {
            samples: 200_000,
            seed: 7,
            workers: 4,
            sigma_n_dbm: -5.0,
            rho: 1.5,
        };
        let checks = run_campaign(&c).unwrap();
        assert_eq!(checks.len(), 9 + 18 + 4);
        for ch in &checks {
            assert!(ch.passed(), "{ch:?}");
        }
        assert_eq!(checks_table(&c, &checks).unwrap().rows().len(), checks.len());
    }
}
