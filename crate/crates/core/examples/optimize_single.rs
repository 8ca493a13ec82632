//! Single-antenna throughput maximization under covertness, reliability
//! and power limits.

use covert_relay::model::{AntennaConfig, ConstraintSet, SystemParams};
use covert_relay::optimize::{optimize_single_report, SingleOptions};

fn main() -> covert_relay::Result<()> {
    let c = ConstraintSet::new(0.15, 0.1, 5.0)?;
    let sp = SystemParams::from_dbm(1.0, 1.0, -5.0, 1.5, AntennaConfig::single())?;
    let report = optimize_single_report(&c, &sp, &SingleOptions::default())?;
    let o = &report.optimum;
    println!(
        "P_S = {:.4e} W, P_R = {:.4e} W, T = {:.4}, eta = {:.6}",
        o.p_s, o.p_r, o.t, o.eta
    );
    let active: Vec<_> = o.active_constraints.iter().map(|c| c.name()).collect();
    println!("method {}, active constraints {active:?}", o.method.name());
    if let Some(best) = report.dense.best {
        println!(
            "dense grid best eta {:.6} (cell variation {:.2e})",
            best.eta, report.dense.cell_variation
        );
    }
    Ok(())
}
