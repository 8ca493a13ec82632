//! Outage and throughput of the single- and multi-antenna relay at a
//! fixed operating point.

use covert_relay::model::{AntennaConfig, RateParams, SystemParams};
use covert_relay::throughput::{throughput, Scenario};

fn main() -> covert_relay::Result<()> {
    let rate = RateParams::new(1.5)?;
    let single = SystemParams::from_dbm(1e-3, 1e-3, -5.0, 1.5, AntennaConfig::single())?;
    let s = throughput(&single, rate, Scenario::Single)?;
    println!(
        "single: hop outages ({:.4}, {:.4}), p_out {:.4}, eta {:.4}",
        s.p_out_hop1, s.p_out_hop2, s.p_out, s.eta
    );
    for (n_t, n_r) in [(1, 1), (2, 2), (2, 8), (4, 4)] {
        let sp = single.with_antennas(AntennaConfig::symmetric(n_t, n_r)?);
        let m = throughput(&sp, rate, Scenario::Multi)?;
        println!("({n_t}, {n_r}): p_out {:.4e}, eta {:.4}", m.p_out, m.eta);
    }
    Ok(())
}
