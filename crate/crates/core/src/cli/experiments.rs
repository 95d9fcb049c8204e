//! The three table-producing experiments: negativity dynamics, bound-state
//! spectrum and negativity map.

use super::config::RunConfig;
use super::output::{Cell, Table};
use crate::boundstate::spectrum_scan;
use crate::entanglement::evolved_negativity;
use crate::sweep::{self, Execution};
use crate::Result;

pub const DYNAMICS_COLUMNS: [&str; 6] = ["t", "n_atoms", "theta", "gamma0", "lambda", "negativity"];
pub const SPECTRUM_COLUMNS: [&str; 8] = [
    "gamma0",
    "n_atoms",
    "theta",
    "lambda",
    "energy",
    "log_depth",
    "residual",
    "status",
];
pub const MAP_COLUMNS: [&str; 6] = ["gamma0", "theta", "n_atoms", "lambda", "t", "negativity"];

#[derive(Debug, Clone, Copy)]
struct Point {
    gamma0: f64,
    theta: f64,
    n_atoms: u32,
    t: f64,
}

impl Point {
    fn label(&self) -> String {
        format!(
            "gamma0={}, theta={}, n_atoms={}, t={}",
            self.gamma0, self.theta, self.n_atoms, self.t
        )
    }
}

/// Evaluates the negativity at every point, failing on the first point (in
/// grid order) whose evaluation fails.
fn negativities(cfg: &RunConfig, points: &[Point], exec: Execution) -> Result<Vec<f64>> {
    sweep::map(exec, points, |p| {
        cfg.params(p.gamma0, p.theta, p.n_atoms)
            .and_then(|params| evolved_negativity(&params, p.t))
            .map_err(|e| e.at(p.label()))
    })
    .into_iter()
    .collect()
}

/// Negativity of the initially maximally entangled pair over time, one curve
/// per `(θ, N)`. Rows are ordered θ, then N, then t.
pub fn negativity_dynamics(cfg: &RunConfig, exec: Execution) -> Result<Table> {
    let mut points = Vec::new();
    for &theta in &cfg.theta_grid {
        for &n_atoms in &cfg.n_list {
            for &t in &cfg.t_grid {
                points.push(Point {
                    gamma0: cfg.gamma0,
                    theta,
                    n_atoms,
                    t,
                });
            }
        }
    }
    let values = negativities(cfg, &points, exec)?;
    let mut table = Table::new(&DYNAMICS_COLUMNS);
    for (p, v) in points.iter().zip(values) {
        table.push(vec![
            Cell::Real(p.t),
            Cell::Int(p.n_atoms.into()),
            Cell::Real(p.theta),
            Cell::Real(p.gamma0),
            Cell::Real(cfg.lambda),
            Cell::Real(v),
        ]);
    }
    Ok(table)
}

/// Bound-state energy over `γ₀ × N` for each θ. Rows are ordered θ, then
/// γ₀, then N. A failed root solve is reported in `status` and the scan goes
/// on.
pub fn bound_spectrum(cfg: &RunConfig, exec: Execution) -> Result<Table> {
    let mut table = Table::new(&SPECTRUM_COLUMNS);
    for &theta in &cfg.theta_grid {
        let base = cfg
            .params(cfg.gamma0_grid[0], theta, cfg.n_list[0])
            .map_err(|e| e.at(format!("theta={theta}")))?;
        let rows = spectrum_scan(&base, &cfg.gamma0_grid, &cfg.n_list, exec)
            .map_err(|e| e.at(format!("theta={theta}")))?;
        for row in rows {
            let head = [
                Cell::Real(row.gamma0),
                Cell::Int(row.n_atoms.into()),
                Cell::Real(row.theta),
                Cell::Real(row.lambda),
            ];
            let tail = match row.result {
                Ok(r) => [
                    Cell::Real(r.energy),
                    Cell::Real(r.log_depth),
                    Cell::Real(r.residual),
                    Cell::Text("ok".into()),
                ],
                Err(msg) => [
                    Cell::Missing,
                    Cell::Missing,
                    Cell::Missing,
                    Cell::Text(format!("failed: {msg}")),
                ],
            };
            table.push(head.into_iter().chain(tail).collect());
        }
    }
    Ok(table)
}

/// Negativity at the fixed time `t_eval` over `γ₀ × θ × N`. Rows are ordered
/// γ₀, then θ, then N.
pub fn negativity_map(cfg: &RunConfig, exec: Execution) -> Result<Table> {
    let mut points = Vec::new();
    for &gamma0 in &cfg.gamma0_grid {
        for &theta in &cfg.theta_grid {
            for &n_atoms in &cfg.n_list {
                points.push(Point {
                    gamma0,
                    theta,
                    n_atoms,
                    t: cfg.t_eval,
                });
            }
        }
    }
    let values = negativities(cfg, &points, exec)?;
    let mut table = Table::new(&MAP_COLUMNS);
    for (p, v) in points.iter().zip(values) {
        table.push(vec![
            Cell::Real(p.gamma0),
            Cell::Real(p.theta),
            Cell::Int(p.n_atoms.into()),
            Cell::Real(cfg.lambda),
            Cell::Real(p.t),
            Cell::Real(v),
        ]);
    }
    Ok(table)
}
