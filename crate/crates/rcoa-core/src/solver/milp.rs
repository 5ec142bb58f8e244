//! Branch-and-bound for mixed-integer linear programs.
//!
//! Depth-first search with deterministic branching: the lowest-index
//! fractional integer variable is selected and its floor branch is explored
//! first. Each node solves the LP relaxation with the interior-point method;
//! a snap heuristic rounds near-slack integer variables to produce
//! incumbents early, which matters for the big-M avoidance programs whose
//! relaxations are highly degenerate.

use super::lp::{lp_solve, LpParams};
use super::{SolveError, SolveReport, SolveStatus};
use crate::program::ConvexProgram;
use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone)]
pub struct MilpParams {
    pub lp: LpParams,
    /// Integrality tolerance on the LP relaxation values.
    pub int_tol: f64,
    /// Branch-and-bound node budget.
    pub node_limit: usize,
    /// Optional full-length assignment used to seed the incumbent: integer
    /// entries are rounded and fixed, the continuous rest is re-solved.
    pub incumbent_hint: Option<Vec<f64>>,
}

impl Default for MilpParams {
    fn default() -> Self {
        MilpParams {
            lp: LpParams::default(),
            int_tol: 1e-6,
            node_limit: 20_000,
            incumbent_hint: None,
        }
    }
}

struct Incumbent {
    x: Vec<f64>,
    obj: f64,
}

/// Solves a [`ConvexProgram`] with integrality constraints. With an empty
/// mask this is exactly [`lp_solve`].
pub fn milp_solve(
    p: &ConvexProgram,
    params: &MilpParams,
) -> Result<(Vec<f64>, SolveReport), SolveError> {
    let int_vars: Vec<usize> = p.integer_vars().collect();
    if int_vars.is_empty() {
        return lp_solve(p, &params.lp);
    }
    if int_vars.len() > 4096 {
        return Err(SolveError::BadProgram(
            "more than 4096 integer variables; out of the supported desk scale",
        ));
    }

    let mut nodes_solved = 0usize;
    let mut incumbent: Option<Incumbent> = None;

    // LP relaxation template: branching happens through bounds alone
    let mut relax = p.clone();
    relax.integrality.iter_mut().for_each(|b| *b = false);

    // seed from the hint: fix integers to their rounded hint values
    if let Some(hint) = &params.incumbent_hint {
        if hint.len() == p.n_vars() {
            let mut fixed = relax.clone();
            let mut ok = true;
            for &j in &int_vars {
                let v = hint[j].round();
                let (lo, hi) = fixed.var_bounds[j];
                if v < lo - 1e-9 || v > hi + 1e-9 {
                    ok = false;
                    break;
                }
                fixed.fix_var(j, v.clamp(lo, hi));
            }
            if ok {
                if let Ok((x, rep)) = lp_solve(&fixed, &params.lp) {
                    nodes_solved += 1;
                    if rep.status == SolveStatus::Optimal {
                        incumbent = Some(Incumbent {
                            obj: rep.objective,
                            x,
                        });
                    }
                }
            }
        }
    }

    // column structure for the snap heuristic
    let n = p.n_vars();
    let mut cols: Vec<Vec<(usize, f64, bool)>> = vec![Vec::new(); n]; // (row, coef, is_eq)
    for (i, row) in p.eq_rows.iter().enumerate() {
        for &(j, a) in &row.coeffs {
            cols[j].push((i, a, true));
        }
    }
    for (i, row) in p.ineq_rows.iter().enumerate() {
        for &(j, a) in &row.coeffs {
            cols[j].push((i, a, false));
        }
    }

    let mut stack: Vec<Vec<(f64, f64)>> = vec![p.var_bounds.clone()];
    let mut status = SolveStatus::Optimal;

    while let Some(bounds) = stack.pop() {
        if nodes_solved >= params.node_limit {
            status = SolveStatus::NodeLimit;
            break;
        }
        let mut node = relax.clone();
        node.var_bounds = bounds;
        let (x, rep) = lp_solve(&node, &params.lp)?;
        nodes_solved += 1;
        match rep.status {
            SolveStatus::Infeasible => continue,
            SolveStatus::Optimal => {}
            _ => {
                // unresolved relaxation: treat conservatively as a dead end
                continue;
            }
        }

        let frac = int_vars
            .iter()
            .copied()
            .find(|&j| (x[j] - x[j].round()).abs() > params.int_tol);
        match frac {
            None => {
                // integral relaxation: accept on ties so the deterministic
                // DFS order decides between equal-cost assignments
                let better = match &incumbent {
                    None => true,
                    Some(inc) => rep.objective <= inc.obj + 1e-9,
                };
                if better {
                    incumbent = Some(Incumbent {
                        obj: rep.objective,
                        x,
                    });
                }
            }
            Some(j) => {
                if let Some(inc) = &incumbent {
                    if rep.objective >= inc.obj - 1e-9 {
                        continue; // bound cannot strictly improve
                    }
                }
                // snap heuristic: greedy integer rounding under row slack
                if let Some((xs, obj)) = snap_rounding(p, &node, &cols, &int_vars, &x, params) {
                    let strictly_better = match &incumbent {
                        None => true,
                        Some(inc) => obj < inc.obj - 1e-9,
                    };
                    if strictly_better {
                        incumbent = Some(Incumbent { x: xs, obj });
                    }
                }
                let v = x[j];
                let floor = v.floor();
                let (lo, hi) = node.var_bounds[j];
                // ceil branch pushed first so the floor branch pops first
                let mut up = node.var_bounds.clone();
                up[j] = ((floor + 1.0).max(lo), hi);
                stack.push(up);
                let mut down = node.var_bounds.clone();
                down[j] = (lo, floor.min(hi));
                stack.push(down);
            }
        }
    }

    match incumbent {
        Some(inc) => {
            let report = SolveReport::with_status(status, inc.obj, nodes_solved);
            Ok((inc.x, report))
        }
        None => {
            let st = if status == SolveStatus::NodeLimit {
                SolveStatus::NodeLimit
            } else {
                SolveStatus::Infeasible
            };
            let report = SolveReport::with_status(st, f64::INFINITY, nodes_solved);
            Ok((vec![0.0; p.n_vars()], report))
        }
    }
}

/// Rounds integer variables toward feasible integer values while keeping all
/// rows satisfied, then verifies the result. Returns the rounded point and
/// its objective when every integer variable lands on an integer.
fn snap_rounding(
    p: &ConvexProgram,
    node: &ConvexProgram,
    cols: &[Vec<(usize, f64, bool)>],
    int_vars: &[usize],
    x: &[f64],
    params: &MilpParams,
) -> Option<(Vec<f64>, f64)> {
    let mut xs = x.to_vec();
    let mut eq_act: Vec<f64> = p.eq_rows.iter().map(|r| r.dot(&xs)).collect();
    let mut ineq_act: Vec<f64> = p.ineq_rows.iter().map(|r| r.dot(&xs)).collect();
    let tol = 1e-7;

    for &j in int_vars {
        if (xs[j] - xs[j].round()).abs() <= params.int_tol {
            continue;
        }
        let (lo, hi) = node.var_bounds[j];
        let near = xs[j].round().clamp(lo.ceil(), hi.floor());
        let far = if near > xs[j] {
            xs[j].floor()
        } else {
            xs[j].ceil()
        }
        .clamp(lo.ceil(), hi.floor());
        let mut snapped = false;
        for cand in [near, far] {
            if cand < lo - 1e-9 || cand > hi + 1e-9 {
                continue;
            }
            let dv = cand - xs[j];
            if dv == 0.0 && !snapped {
                snapped = true;
                break;
            }
            let mut feasible = true;
            for &(row, a, is_eq) in &cols[j] {
                if is_eq {
                    if (eq_act[row] + a * dv - p.eq_rows[row].rhs).abs() > tol {
                        feasible = false;
                        break;
                    }
                } else if ineq_act[row] + a * dv > p.ineq_rows[row].rhs + tol {
                    feasible = false;
                    break;
                }
            }
            if feasible {
                for &(row, a, is_eq) in &cols[j] {
                    if is_eq {
                        eq_act[row] += a * dv;
                    } else {
                        ineq_act[row] += a * dv;
                    }
                }
                xs[j] = cand;
                snapped = true;
                break;
            }
        }
        if !snapped {
            return None;
        }
    }
    // all integer vars integral; double-check global feasibility
    if node.max_violation(&xs) > 1e-6 {
        return None;
    }
    Some((xs.clone(), p.objective(&xs)))
}
