//! Comparison of the printed closed forms against the
//! validated evaluators.
//!
//! Each printed expression is evaluated term by term as written. Where a
//! sub-expression is undefined (a logarithm of zero, an incomplete gamma
//! at a negative argument, a non-finite result) the evaluation yields a
//! [`PaperValue::Violation`] instead of a number. The report pairs every
//! printed value with its reference value and writes `discrepancies.csv`.

use std::fmt;

use crate::detection::{dep_slot_paper, dep_slot_reference, min_dep_slot, min_dep_slot_paper};
use crate::error::Result;
use crate::model::{AntennaConfig, ConstraintSet, RateParams, SystemParams};
use crate::optimize::{lagrangian_gradient, Multipliers};
use crate::specfun::expint_ei;
use crate::table::{Cell, Table};
use crate::throughput::{
    eta_single_product_form, outage_hop_multi_paper, outage_hop_multi_reference, throughput_single, GammaDomain,
    LnRhoSquared,
};

/// Result of evaluating a printed expression.
#[derive(Debug, Clone, PartialEq)]
pub enum PaperValue {
    Value(f64),
    /// The expression is undefined at these inputs; the message names the
    /// offending term.
    Violation(String),
}

impl PaperValue {
    pub fn is_violation(&self) -> bool {
        matches!(self, PaperValue::Violation(_))
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            PaperValue::Value(v) => Some(*v),
            PaperValue::Violation(_) => None,
        }
    }
}

impl fmt::Display for PaperValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PaperValue::Value(v) => f.write_str(&crate::table::format_float(*v)),
            PaperValue::Violation(msg) => write!(f, "formula-domain-violation: {msg}"),
        }
    }
}

/// Formula identifiers used in the report.
pub mod formula {
    pub const DEP_CASE_II: &str = "dep_slot_case_ii";
    pub const DEP_CASE_III: &str = "dep_slot_case_iii";
    pub const MIN_DEP: &str = "min_dep_slot";
    pub const OUTAGE_MULTI: &str = "outage_hop_multi";
    pub const ETA_PRODUCT: &str = "eta_single_product";
    pub const STATIONARITY_PS: &str = "stationarity_p_s";
    pub const STATIONARITY_T: &str = "stationarity_t";

    pub const ALL: [&str; 7] = [
        DEP_CASE_II,
        DEP_CASE_III,
        MIN_DEP,
        OUTAGE_MULTI,
        ETA_PRODUCT,
        STATIONARITY_PS,
        STATIONARITY_T,
    ];
}

/// One printed-versus-reference comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscrepancyRecord {
    pub formula_id: &'static str,
    pub params: Vec<(&'static str, String)>,
    pub paper: PaperValue,
    pub reference: f64,
}

impl DiscrepancyRecord {
    /// `|paper - reference|`, or `None` for a violation.
    pub fn abs_diff(&self) -> Option<f64> {
        self.paper.value().map(|v| (v - self.reference).abs())
    }

    pub fn params_string(&self) -> String {
        let parts: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        parts.join(";")
    }
}

/// Powers and nominal noise levels of the validation grid.
pub const GRID_POWERS_W: [f64; 3] = [1.0, 3.0, 5.0];
pub const GRID_SIGMA_DBM: [f64; 3] = [-10.0, -5.0, 3.0];
pub const GRID_RHO: f64 = 1.5;
/// Antenna pairs `(n_t, n_r)` of the multi-antenna rows.
pub const GRID_ANTENNAS: [(u32, u32); 4] = [(1, 1), (2, 2), (2, 8), (4, 4)];
/// Target rates of the outage rows.
pub const GRID_RATES: [f64; 3] = [0.0, 0.5, 1.5];
/// Positions of `τ` inside `(μ₁, μ₂]` for the middle-case rows.
pub const CASE_II_FRACTIONS: [f64; 3] = [0.25, 0.5, 0.75];
/// Multiples of `μ₂` used as `τ` for the upper-case rows.
pub const CASE_III_MULTIPLES: [f64; 3] = [1.5, 2.0, 4.0];

/// The full set of comparisons.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DiscrepancyReport {
    records: Vec<DiscrepancyRecord>,
}

impl DiscrepancyReport {
    pub fn records(&self) -> &[DiscrepancyRecord] {
        &self.records
    }

    pub fn push(&mut self, record: DiscrepancyRecord) {
        self.records.push(record);
    }

    pub fn by_formula<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a DiscrepancyRecord> + 'a {
        self.records.iter().filter(move |r| r.formula_id == id)
    }

    /// Largest `abs_diff` for a formula, ignoring violations.
    pub fn max_abs_diff(&self, id: &str) -> Option<f64> {
        self.by_formula(id)
            .filter_map(DiscrepancyRecord::abs_diff)
            .reduce(f64::max)
    }

    pub fn to_table(&self) -> Result<Table> {
        let mut t = Table::new([
            "formula_id",
            "params",
            "paper_value_or_violation",
            "reference_value",
            "abs_diff",
        ]);
        t.param("powers_w", "1|3|5")
            .param("sigma_n_dbm", "-10|-5|3")
            .param("rho", GRID_RHO)
            .param("antennas", "1x1|2x2|2x8|4x4")
            .param("rates", "0|0.5|1.5");
        for r in &self.records {
            t.push(vec![
                Cell::from(r.formula_id),
                Cell::from(r.params_string()),
                Cell::from(r.paper.to_string()),
                Cell::from(r.reference),
                match r.abs_diff() {
                    Some(d) => Cell::from(d),
                    None => Cell::from(""),
                },
            ])?;
        }
        Ok(t)
    }
}

fn grid_params(p: f64, sigma_dbm: f64) -> Result<SystemParams> {
    SystemParams::from_dbm(p, p, sigma_dbm, GRID_RHO, AntennaConfig::single())
}

fn fmt_param(v: f64) -> String {
    format!("{v}")
}

/// Builds the report over the validation grid.
pub fn build_report() -> Result<DiscrepancyReport> {
    let mut report = DiscrepancyReport::default();
    dep_rows(&mut report)?;
    outage_rows(&mut report)?;
    eta_rows(&mut report)?;
    stationarity_rows(&mut report)?;
    Ok(report)
}

fn dep_rows(report: &mut DiscrepancyReport) -> Result<()> {
    for &sigma in &GRID_SIGMA_DBM {
        for &p in &GRID_POWERS_W {
            let sp = grid_params(p, sigma)?;
            let (mu1, mu2) = sp.noise_bounds();
            let base = |tau: f64| {
                vec![
                    ("p", fmt_param(p)),
                    ("sigma_n_dbm", fmt_param(sigma)),
                    ("rho", fmt_param(GRID_RHO)),
                    ("tau", fmt_param(tau)),
                ]
            };
            let case_ii = CASE_II_FRACTIONS.iter().map(|f| mu1 + f * (mu2 - mu1)).chain([mu2]);
            for tau in case_ii {
                report.push(DiscrepancyRecord {
                    formula_id: formula::DEP_CASE_II,
                    params: base(tau),
                    paper: dep_slot_paper(p, tau, &sp)?,
                    reference: dep_slot_reference(p, tau, &sp)?,
                });
            }
            for &m in &CASE_III_MULTIPLES {
                let tau = m * mu2;
                report.push(DiscrepancyRecord {
                    formula_id: formula::DEP_CASE_III,
                    params: base(tau),
                    paper: dep_slot_paper(p, tau, &sp)?,
                    reference: dep_slot_reference(p, tau, &sp)?,
                });
            }
            report.push(DiscrepancyRecord {
                formula_id: formula::MIN_DEP,
                params: base(mu2),
                paper: min_dep_slot_paper(p, &sp)?,
                reference: min_dep_slot(p, &sp)?,
            });
        }
    }
    Ok(())
}

fn outage_rows(report: &mut DiscrepancyReport) -> Result<()> {
    for &sigma in &GRID_SIGMA_DBM {
        for &p in &GRID_POWERS_W {
            let sp = grid_params(p, sigma)?;
            for &(n_t, n_r) in &GRID_ANTENNAS {
                for &t in &GRID_RATES {
                    let rate = RateParams::new(t)?;
                    let reference = outage_hop_multi_reference(p, rate, &sp, n_t, n_r)?;
                    for ln in [LnRhoSquared::LogOfSquare, LnRhoSquared::SquareOfLog] {
                        for domain in [GammaDomain::Strict, GammaDomain::Continuation] {
                            report.push(DiscrepancyRecord {
                                formula_id: formula::OUTAGE_MULTI,
                                params: vec![
                                    ("p", fmt_param(p)),
                                    ("sigma_n_dbm", fmt_param(sigma)),
                                    ("rho", fmt_param(GRID_RHO)),
                                    ("n_t", n_t.to_string()),
                                    ("n_r", n_r.to_string()),
                                    ("t", fmt_param(t)),
                                    ("ln_rho_sq", ln.label().to_owned()),
                                    ("gamma", domain.label().to_owned()),
                                ],
                                paper: outage_hop_multi_paper(p, rate, &sp, n_t, n_r, ln, domain)?,
                                reference,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn eta_rows(report: &mut DiscrepancyReport) -> Result<()> {
    for &sigma in &GRID_SIGMA_DBM {
        for &p_s in &GRID_POWERS_W {
            for &p_r in &GRID_POWERS_W {
                let sp = SystemParams::from_dbm(p_s, p_r, sigma, GRID_RHO, AntennaConfig::single())?;
                for &t in &GRID_RATES {
                    let rate = RateParams::new(t)?;
                    report.push(DiscrepancyRecord {
                        formula_id: formula::ETA_PRODUCT,
                        params: vec![
                            ("p_s", fmt_param(p_s)),
                            ("p_r", fmt_param(p_r)),
                            ("sigma_n_dbm", fmt_param(sigma)),
                            ("rho", fmt_param(GRID_RHO)),
                            ("t", fmt_param(t)),
                        ],
                        paper: PaperValue::Value(eta_single_product_form(&sp, rate)?),
                        reference: throughput_single(&sp, rate)?.eta,
                    });
                }
            }
        }
    }
    Ok(())
}

/// Multipliers at which the printed stationarity expressions are compared.
pub const STATIONARITY_MULTIPLIERS: Multipliers = Multipliers {
    k1: 0.5,
    k2: 0.2,
    k3: 0.1,
    k4: 0.1,
};

fn stationarity_rows(report: &mut DiscrepancyReport) -> Result<()> {
    let m = STATIONARITY_MULTIPLIERS;
    let constraints = ConstraintSet::new(0.15, 0.1, 5.0)?;
    for &sigma in &GRID_SIGMA_DBM {
        let sp = grid_params(1.0, sigma)?;
        for &p_s in &GRID_POWERS_W {
            for &p_r in &GRID_POWERS_W {
                for &t in &GRID_RATES[1..] {
                    let grad = lagrangian_gradient(p_s, p_r, t, &m, &constraints, &sp)?;
                    let params = vec![
                        ("p_s", fmt_param(p_s)),
                        ("p_r", fmt_param(p_r)),
                        ("sigma_n_dbm", fmt_param(sigma)),
                        ("rho", fmt_param(GRID_RHO)),
                        ("t", fmt_param(t)),
                        ("k1", fmt_param(m.k1)),
                        ("k2", fmt_param(m.k2)),
                        ("k3", fmt_param(m.k3)),
                        ("k4", fmt_param(m.k4)),
                        ("delta", fmt_param(constraints.delta())),
                    ];
                    report.push(DiscrepancyRecord {
                        formula_id: formula::STATIONARITY_PS,
                        params: params.clone(),
                        paper: stationarity_p_s_paper(p_s, p_r, t, &m, &sp),
                        reference: grad[0],
                    });
                    report.push(DiscrepancyRecord {
                        formula_id: formula::STATIONARITY_T,
                        params,
                        paper: stationarity_t_paper(p_s, p_r, t, m.k2, constraints.delta(), &sp),
                        reference: grad[2],
                    });
                }
            }
        }
    }
    Ok(())
}

fn ei(x: f64) -> std::result::Result<f64, PaperValue> {
    expint_ei(x).map_err(|e| PaperValue::Violation(format!("Ei({x:e}): {e}")))
}

fn finite(v: f64, what: &str) -> PaperValue {
    if v.is_finite() {
        PaperValue::Value(v)
    } else {
        PaperValue::Violation(format!("{what} is not finite"))
    }
}

/// The printed `∂L/∂P_S`, evaluated as written (including its
/// `(1 - ρ²)μ₁` exponent).
pub fn stationarity_p_s_paper(p_s: f64, p_r: f64, t: f64, m: &Multipliers, params: &SystemParams) -> PaperValue {
    let eval = || -> std::result::Result<PaperValue, PaperValue> {
        let (mu1, mu2) = params.noise_bounds();
        let rho = params.rho();
        let ln_rho = rho.ln();
        let kappa = RateParams::new(t)
            .map_err(|e| PaperValue::Violation(e.to_string()))?
            .kappa();
        let outage = -(t + m.k2) / (4.0 * p_s * ln_rho * ln_rho)
            * (ei(-kappa * mu2 / p_r)? - ei(-kappa * mu1 / p_r)?)
            * ((-kappa * mu1 / p_s).exp() - (-kappa * mu2 / p_s).exp());
        let covert = m.k1
            * (-mu2 / p_r).exp()
            * (ei(mu1 / p_r)? - ei(mu2 / p_r)?)
            * (mu2 / (p_s * p_s) * (-mu2 / p_s).exp() * (ei(mu1 / p_s)? - ei(mu2 / p_s)?)
                + (1.0 - (-(1.0 - rho * rho) * mu1 / p_s).exp()) / p_s);
        Ok(finite(outage + covert + m.k3, "stationarity in P_S"))
    };
    eval().unwrap_or_else(|v| v)
}

/// The printed rate stationarity condition, evaluated as written.
pub fn stationarity_t_paper(p_s: f64, p_r: f64, t: f64, k2: f64, delta: f64, params: &SystemParams) -> PaperValue {
    let eval = || -> std::result::Result<PaperValue, PaperValue> {
        let (mu1, mu2) = params.noise_bounds();
        let ln_rho = params.rho().ln();
        let kappa = RateParams::new(t)
            .map_err(|e| PaperValue::Violation(e.to_string()))?
            .kappa();
        if kappa == 0.0 {
            return Err(PaperValue::Violation("division by kappa = 0".into()));
        }
        let lead = 2f64.powf(2.0 * t + 1.0) * std::f64::consts::LN_2 / kappa;
        let a = |p: f64| lead * (-kappa * mu2 / p).exp() - (-kappa * mu1 / p).exp();
        let diff =
            |p: f64| -> std::result::Result<f64, PaperValue> { Ok(ei(-kappa * mu2 / p)? - ei(-kappa * mu1 / p)?) };
        let bracket = a(p_s) * diff(p_r)? + a(p_r) * diff(p_s)?;
        let v = t * (1.0 - delta) + (t - k2) / (4.0 * ln_rho * ln_rho) * bracket;
        Ok(finite(v, "stationarity in T"))
    };
    eval().unwrap_or_else(|v| v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn violation_rendering() {
        let v = PaperValue::Violation("ln(0)".into());
        assert!(v.is_violation());
        assert_eq!(v.value(), None);
        assert_eq!(v.to_string(), "formula-domain-violation: ln(0)");
        assert_eq!(PaperValue::Value(0.5).value(), Some(0.5));
    }

    #[test]
    fn report_covers_grid() {
        let report = build_report().unwrap();
        let count = |id| report.by_formula(id).count();
        assert_eq!(count(formula::DEP_CASE_II), 9 * 4);
        assert_eq!(count(formula::DEP_CASE_III), 9 * 3);
        assert_eq!(count(formula::MIN_DEP), 9);
        assert_eq!(count(formula::OUTAGE_MULTI), 9 * 4 * 3 * 4);
        assert_eq!(count(formula::ETA_PRODUCT), 27 * 3);
        assert_eq!(count(formula::STATIONARITY_PS), 27 * 2);
        assert_eq!(count(formula::STATIONARITY_T), 27 * 2);
        for r in report.records() {
            assert!(r.reference.is_finite(), "{r:?}");
        }
        assert!(report.max_abs_diff(formula::ETA_PRODUCT).unwrap() < 1e-12);
    }

    #[test]
    fn strict_gamma_is_reported_as_violation() {
        let report = build_report().unwrap();
        let strict_nontrivial = report
            .by_formula(formula::OUTAGE_MULTI)
            .filter(|r| r.params.iter().any(|(k, v)| *k == "gamma" && v == "strict"))
            .filter(|r| r.params.iter().any(|(k, v)| *k == "t" && v != "0"));
        for r in strict_nontrivial {
            assert!(r.paper.is_violation(), "{r:?}");
        }
    }

    #[test]
    fn table_has_one_row_per_record() {
        let report = build_report().unwrap();
        let table = report.to_table().unwrap();
        assert_eq!(table.rows().len(), report.records().len());
        assert_eq!(
            table.columns(),
            [
                "formula_id",
                "params",
                "paper_value_or_violation",
                "reference_value",
                "abs_diff"
            ]
        );
    }
}
