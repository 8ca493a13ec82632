//! A reduced Monte-Carlo validation campaign printed as CSV.

use covert_relay::montecarlo::default_workers;
use covert_relay::validation::{checks_table, run_campaign, Campaign};

fn main() -> covert_relay::Result<()> {
    let c = Campaign {
        samples: 200_000,
        seed: 42,
        workers: default_workers(),
        sigma_n_dbm: -5.0,
        rho: 1.5,
    };
    let checks = run_campaign(&c)?;
    print!("{}", checks_table(&c, &checks)?.to_csv_string());
    let failed = checks.iter().filter(|ch| !ch.passed()).count();
    eprintln!("{} checks, {failed} outside 3 standard errors", checks.len());
    Ok(())
}
