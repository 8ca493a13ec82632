use log::{debug, warn};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::grid::{dense_grid_single, GridScan};
use super::{
    evaluate_point, lagrangian_gradient, power_scan_limit, rate_at_outage, Constraint, KktPoint, Method, Multipliers,
    Optimum,
};
use crate::error::{Error, Result};
use crate::model::{ConstraintSet, SystemParams};
use crate::throughput::Scenario;

/// Controls for [`optimize_single_report`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleOptions {
    /// Points per axis of the feasibility scan that seeds the root finder.
    pub coarse: usize,
    /// Points per axis of the dominance-check grid.
    pub dense: usize,
    /// Newton iteration cap.
    pub max_iter: usize,
    /// Largest accepted residual norm.
    pub tol: f64,
}

impl Default for SingleOptions {
    fn default() -> Self {
        Self {
            coarse: 20,
            dense: 100,
            max_iter: 200,
            tol: 1e-8,
        }
    }
}

/// Everything computed by the single-antenna optimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleReport {
    pub optimum: Optimum,
    /// Converged, feasible candidates with non-negative multipliers.
    pub candidates: Vec<(Vec<Constraint>, KktPoint, f64)>,
    pub coarse: GridScan,
    pub dense: GridScan,
}

/// Maximizes single-antenna throughput. See [`optimize_single_report`].
pub fn optimize_single(constraints: &ConstraintSet, params: &SystemParams) -> Result<Optimum> {
    Ok(optimize_single_report(constraints, params, &SingleOptions::default())?.optimum)
}

/// Maximizes single-antenna throughput from its KKT conditions.
///
/// 1. A coarse grid over `(0, U]² × (0, T_hi]` checks feasibility and picks
///    a starting point; `U = min(P_max, 4 p_sym)` and `T_hi` is the rate at
///    which equal powers `U` reach outage `δ`.
/// 2. For each of the 16 active-constraint patterns, damped Newton solves
///    stationarity plus the active equalities in `(ln P_S, ln P_R, ln T,
///    active multipliers)`.
/// 3. The best converged candidate that is feasible with non-negative
///    multipliers is returned if it is within one grid cell of the dense
///    grid maximum; otherwise the dense grid maximum is returned with
///    method `grid`.
pub fn optimize_single_report(
    constraints: &ConstraintSet,
    params: &SystemParams,
    options: &SingleOptions,
) -> Result<SingleReport> {
    let p_upper = power_scan_limit(constraints, params)?;
    let t_upper = rate_at_outage(p_upper, constraints.delta(), Scenario::Single, params)?;
    if !(t_upper > 0.0) {
        return Err(Error::Infeasible(format!(
            "reliability: outage exceeds delta = {} at every positive rate",
            constraints.delta()
        )));
    }
    let coarse = dense_grid_single(constraints, params, options.coarse, p_upper, t_upper)?;
    let Some(start) = coarse.best else {
        return Err(Error::Infeasible(format!(
            "no feasible point on the {0}x{0}x{0} scan of powers up to {p_upper:e} W and rates up to {t_upper}",
            options.coarse
        )));
    };

    let solved: Vec<Option<(Vec<Constraint>, KktPoint, f64)>> = (0u8..16)
        .into_par_iter()
        .map(|mask| {
            let pattern: Vec<Constraint> = Constraint::ALL
                .into_iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, c)| c)
                .collect();
            let system = KktSystem::new(&pattern, constraints, params);
            match system.solve([start.p_s, start.p_r, start.t], options) {
                Ok(Some(point)) => {
                    let eta = evaluate_point(point.p_s, point.p_r, point.t, Scenario::Single, params)
                        .ok()?
                        .eta;
                    debug!(
                        "KKT pattern {pattern:?}: eta = {eta}, residual = {:e}",
                        point.residual_norm
                    );
                    Some((pattern, point, eta))
                }
                Ok(None) => None,
                Err(e) => {
                    debug!("KKT pattern {pattern:?} failed: {e}");
                    None
                }
            }
        })
        .collect();
    let candidates: Vec<_> = solved.into_iter().flatten().collect();

    let dense = dense_grid_single(constraints, params, options.dense, p_upper, t_upper)?;
    let grid_floor = dense.best.map(|b| b.eta - dense.cell_variation);

    let mut best: Option<&(Vec<Constraint>, KktPoint, f64)> = None;
    for c in &candidates {
        if best.is_none_or(|b| c.2 > b.2) {
            best = Some(c);
        }
    }

    let optimum = match best {
        Some((pattern, point, eta)) if grid_floor.is_none_or(|f| *eta >= f) => Optimum::new(
            point.p_s,
            point.p_r,
            point.t,
            Scenario::Single,
            constraints,
            params,
            pattern.clone(),
            Method::Kkt,
            Some(*point),
        )?,
        other => {
            if other.is_some() {
                warn!("best KKT candidate falls short of the dense grid maximum; using the grid point");
            } else {
                warn!("no KKT candidate converged; using the dense grid maximum");
            }
            let b = dense.best.unwrap_or(start);
            Optimum::new(
                b.p_s,
                b.p_r,
                b.t,
                Scenario::Single,
                constraints,
                params,
                Vec::new(),
                Method::Grid,
                None,
            )?
        }
    };
    Ok(SingleReport {
        optimum,
        candidates,
        coarse,
        dense,
    })
}

struct KktSystem<'a> {
    active: [bool; 4],
    constraints: &'a ConstraintSet,
    params: &'a SystemParams,
}

impl<'a> KktSystem<'a> {
    fn new(pattern: &[Constraint], constraints: &'a ConstraintSet, params: &'a SystemParams) -> Self {
        let mut active = [false; 4];
        for (slot, c) in active.iter_mut().zip(Constraint::ALL) {
            *slot = pattern.contains(&c);
        }
        Self {
            active,
            constraints,
            params,
        }
    }

    fn dim(&self) -> usize {
        3 + self.active.iter().filter(|&&a| a).count()
    }

    // Power-constraint multipliers are carried as K·P_max so every unknown
    // is of order one.
    fn unpack(&self, z: &DVector<f64>) -> (f64, f64, f64, Multipliers) {
        let mut k = [0.0; 4];
        let mut idx = 3;
        for (i, slot) in k.iter_mut().enumerate() {
            if self.active[i] {
                *slot = z[idx];
                idx += 1;
            }
        }
        let pmax = self.constraints.p_max();
        (
            z[0].exp(),
            z[1].exp(),
            z[2].exp(),
            Multipliers {
                k1: k[0],
                k2: k[1],
                k3: k[2] / pmax,
                k4: k[3] / pmax,
            },
        )
    }

    fn constraint_values(&self, p_s: f64, p_r: f64, t: f64) -> Result<[f64; 4]> {
        let ev = evaluate_point(p_s, p_r, t, Scenario::Single, self.params)?;
        let c = self.constraints;
        Ok([
            c.min_dep() - ev.xi,
            ev.p_out - c.delta(),
            p_s / c.p_max() - 1.0,
            p_r / c.p_max() - 1.0,
        ])
    }

    fn stationarity(&self, p_s: f64, p_r: f64, t: f64, m: &Multipliers) -> Result<[f64; 3]> {
        let g = lagrangian_gradient(p_s, p_r, t, m, self.constraints, self.params)?;
        Ok([p_s * g[0], p_r * g[1], t * g[2]])
    }

    fn residual(&self, z: &DVector<f64>) -> Result<DVector<f64>> {
        let (p_s, p_r, t, m) = self.unpack(z);
        let s = self.stationarity(p_s, p_r, t, &m)?;
        let cv = self.constraint_values(p_s, p_r, t)?;
        let mut r = Vec::with_capacity(self.dim());
        r.extend_from_slice(&s);
        for i in 0..4 {
            if self.active[i] {
                r.push(cv[i]);
            }
        }
        let r = DVector::from_vec(r);
        if r.iter().all(|v| v.is_finite()) {
            Ok(r)
        } else {
            Err(Error::numeric("non-finite KKT residual"))
        }
    }

    fn jacobian(&self, z: &DVector<f64>) -> Result<DMatrix<f64>> {
        let n = self.dim();
        let mut jac = DMatrix::zeros(n, n);
        for col in 0..n {
            let h = 1e-7 * z[col].abs().max(1.0);
            let mut zp = z.clone();
            let mut zm = z.clone();
            zp[col] += h;
            zm[col] -= h;
            let d = (self.residual(&zp)? - self.residual(&zm)?) / (2.0 * h);
            jac.set_column(col, &d);
        }
        Ok(jac)
    }

    // Least-squares multipliers for the stationarity rows at a fixed point.
    fn initial_multipliers(&self, p_s: f64, p_r: f64, t: f64) -> Result<Vec<f64>> {
        let base = self.stationarity(p_s, p_r, t, &Multipliers::default())?;
        let pmax = self.constraints.p_max();
        let unit = [
            Multipliers {
                k1: 1.0,
                ..Default::default()
            },
            Multipliers {
                k2: 1.0,
                ..Default::default()
            },
            Multipliers {
                k3: 1.0 / pmax,
                ..Default::default()
            },
            Multipliers {
                k4: 1.0 / pmax,
                ..Default::default()
            },
        ];
        let mut columns = Vec::new();
        for i in 0..4 {
            if self.active[i] {
                let s = self.stationarity(p_s, p_r, t, &unit[i])?;
                columns.push([s[0] - base[0], s[1] - base[1], s[2] - base[2]]);
            }
        }
        if columns.is_empty() {
            return Ok(Vec::new());
        }
        let a = DMatrix::from_fn(3, columns.len(), |r, c| columns[c][r]);
        let b = DVector::from_row_slice(&[-base[0], -base[1], -base[2]]);
        let k = a
            .svd(true, true)
            .solve(&b, 1e-14)
            .map_err(|e| Error::numeric(format!("multiplier least squares failed: {e}")))?;
        Ok(k.iter().map(|&v| v.max(0.0)).collect())
    }

    fn residual_norm(&self, z: &DVector<f64>) -> Result<f64> {
        let (p_s, p_r, t, m) = self.unpack(z);
        let s = self.stationarity(p_s, p_r, t, &m)?;
        let cv = self.constraint_values(p_s, p_r, t)?;
        let ks = [
            m.k1,
            m.k2,
            m.k3 * self.constraints.p_max(),
            m.k4 * self.constraints.p_max(),
        ];
        let mut norm = s.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for i in 0..4 {
            norm = norm.max((ks[i] * cv[i]).abs());
            if self.active[i] {
                norm = norm.max(cv[i].abs());
            }
        }
        Ok(norm)
    }

    fn solve(&self, start: [f64; 3], options: &SingleOptions) -> Result<Option<KktPoint>> {
        let [p_s, p_r, t] = start;
        let mut z = vec![p_s.ln(), p_r.ln(), t.ln()];
        z.extend(self.initial_multipliers(p_s, p_r, t)?);
        let mut z = DVector::from_vec(z);
        let mut r = self.residual(&z)?;
        let mut merit = r.norm();

        for _ in 0..options.max_iter {
            if r.amax() <= 1e-14 {
                break;
            }
            let jac = self.jacobian(&z)?;
            let Some(mut step) = jac.lu().solve(&(-&r)) else {
                return Ok(None);
            };
            let big = step.rows(0, 3).amax();
            if big > 1.0 {
                step /= big;
            }
            let mut alpha = 1.0;
            let mut accepted = false;
            for _ in 0..40 {
                let trial = &z + alpha * &step;
                if let Ok(rt) = self.residual(&trial) {
                    let m = rt.norm();
                    if m < merit {
                        z = trial;
                        r = rt;
                        merit = m;
                        accepted = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if !accepted {
                break;
            }
        }

        let norm = self.residual_norm(&z)?;
        let (p_s, p_r, t, m) = self.unpack(&z);
        if norm > options.tol {
            return Ok(None);
        }
        if [m.k1, m.k2, m.k3, m.k4].iter().any(|&k| k < -1e-10) {
            return Ok(None);
        }
        let ev = evaluate_point(p_s, p_r, t, Scenario::Single, self.params)?;
        if !super::violated_constraints(p_s, p_r, &ev, self.constraints).is_empty() {
            return Ok(None);
        }
        Ok(Some(KktPoint {
            p_s,
            p_r,
            t,
            k1: m.k1,
            k2: m.k2,
            k3: m.k3,
            k4: m.k4,
            residual_norm: norm,
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::AntennaConfig;

    #[test]
    fn default_case_converges_with_kkt() {
        let c = ConstraintSet::new(0.15, 0.1, 5.0).unwrap();
        let sp = SystemParams::from_dbm(1.0, 1.0, -5.0, 1.5, AntennaConfig::single()).unwrap();
        let report = optimize_single_report(&c, &sp, &SingleOptions::default()).unwrap();
        assert_eq!(report.optimum.method, Method::Kkt, "{report:?}");
        let k = report.optimum.kkt.unwrap();
        assert!(k.residual_norm <= 1e-8);
        assert!((report.optimum.p_s - report.optimum.p_r).abs() <= 1e-6 * report.optimum.p_s);
    }
}
