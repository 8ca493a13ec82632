//! Largest gap between each printed closed form and its reference
//! evaluation over the validation grid.

use covert_relay::discrepancy::{build_report, formula};

fn main() -> covert_relay::Result<()> {
    let report = build_report()?;
    for id in formula::ALL {
        let rows: Vec<_> = report.by_formula(id).collect();
        let violations = rows.iter().filter(|r| r.paper.is_violation()).count();
        let worst = report
            .max_abs_diff(id)
            .map_or("n/a".to_string(), |d| format!("{d:.3e}"));
        println!(
            "{id:<20} rows {:>3}  domain violations {violations:>3}  max |diff| {worst}",
            rows.len()
        );
    }
    Ok(())
}
