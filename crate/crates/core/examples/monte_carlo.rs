//! Seeded Monte-Carlo estimates next to their closed forms.

use covert_relay::channel::RngSpec;
use covert_relay::detection::{mc_dep_two_hop, min_dep_two_hop, optimal_threshold};
use covert_relay::model::{AntennaConfig, RateParams, SystemParams};
use covert_relay::montecarlo::default_workers;
use covert_relay::throughput::{mc_throughput, throughput, Scenario};

fn main() -> covert_relay::Result<()> {
    let n = 1_000_000;
    let workers = default_workers();
    let sp = SystemParams::from_dbm(1e-3, 1e-3, -5.0, 1.5, AntennaConfig::symmetric(2, 4)?)?;

    let xi = min_dep_two_hop(&sp)?;
    let mc = mc_dep_two_hop(optimal_threshold(&sp), &sp, n, RngSpec::new(42, 0), workers)?;
    println!(
        "xi*: analytic {xi:.6}, simulated {:.6} ± {:.1e} (z = {:.2})",
        mc.mean,
        mc.stderr,
        mc.z_score(xi)
    );

    let rate = RateParams::new(1.0)?;
    let eta = throughput(&sp, rate, Scenario::Multi)?.eta;
    let mc = mc_throughput(&sp, rate, Scenario::Multi, n, RngSpec::new(42, 1), workers)?;
    println!(
        "eta: analytic {eta:.6}, simulated {:.6} ± {:.1e} (z = {:.2})",
        mc.mean,
        mc.stderr,
        mc.z_score(eta)
    );
    Ok(())
}
