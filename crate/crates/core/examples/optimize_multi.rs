//! Multi-antenna throughput maximization by grid search.

use covert_relay::model::{AntennaConfig, ConstraintSet, SystemParams};
use covert_relay::optimize::{optimize_multi_traced, MultiSearch};

fn main() -> covert_relay::Result<()> {
    let c = ConstraintSet::new(0.15, 0.1, 5.0)?;
    let sp = SystemParams::from_dbm(1.0, 1.0, -5.0, 1.5, AntennaConfig::symmetric(2, 8)?)?;
    let search = MultiSearch::default_for(&c, &sp)?;
    let out = optimize_multi_traced(&c, &sp, &search)?;
    let o = &out.optimum;
    println!(
        "P_S = {:.4e} W, P_R = {:.4e} W, T = {:.2}, eta = {:.6}",
        o.p_s, o.p_r, o.t, o.eta
    );
    println!("{} points evaluated", out.evaluations);
    Ok(())
}
