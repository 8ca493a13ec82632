//! Warden detection error: the threshold curve of one slot and the
//! two-hop minimum at the optimal threshold.

use covert_relay::detection::{dep_slot_reference, min_detection, optimal_threshold};
use covert_relay::model::{AntennaConfig, SystemParams};

fn main() -> covert_relay::Result<()> {
    let sp = SystemParams::from_dbm(1e-3, 2e-3, -5.0, 1.5, AntennaConfig::single())?;
    let (mu1, mu2) = sp.noise_bounds();
    println!(
        "noise support [{mu1:.4e}, {mu2:.4e}] W, tau* = {:.4e} W",
        optimal_threshold(&sp)
    );
    for k in 0..=8 {
        let tau = mu1 + (2.0 * mu2 - mu1) * f64::from(k) / 8.0;
        println!(
            "  tau = {tau:.4e}  DEP = {:.6}",
            dep_slot_reference(sp.p_s(), tau, &sp)?
        );
    }
    let d = min_detection(&sp)?;
    println!("pe1* = {:.6}, pe2* = {:.6}, xi* = {:.6}", d.pe1, d.pe2, d.xi);
    Ok(())
}
