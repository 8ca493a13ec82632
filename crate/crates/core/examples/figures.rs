//! Writes the data of every figure as CSV into a directory (default
//! `figures/`).

use covert_relay::figures::{figure, FigureConfig, FIGURES};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "figures".into());
    std::fs::create_dir_all(&dir)?;
    let cfg = FigureConfig::default();
    for which in FIGURES {
        let table = figure(which, &cfg)?;
        let path = std::path::Path::new(&dir).join(format!("fig{which}.csv"));
        table.write(std::fs::File::create(&path)?)?;
        println!("{} ({} rows)", path.display(), table.rows().len());
    }
    Ok(())
}
