//! Successive convexification with an elastic subproblem and trust region,
//! the mixed-integer variant (MILP subproblems), and the two-phase hybrid
//! route for mixed-integer nonlinear problems.
//!
//! Each iteration linearizes the nonlinear blocks about the reference,
//! appends L1-penalized slacks, bounds the step in the infinity norm, and
//! solves the resulting LP or MILP. The acceptance ratio uses absolute
//! values of the predicted and actual cost reductions, which avoids
//! rejecting steps when elastic phantom solutions flip the predicted sign;
//! a repeated-solution detector inflates the trust region to escape stalls.

use super::milp::{milp_solve, MilpParams};
use super::{lp_solve, IterRecord, LpParams, SolveError, SolveReport, SolveStatus};
use crate::nlp::{LinearizeOptions, NlpProblem};
use alloc::vec::Vec;

/// Tuning parameters for the successive solvers.
#[derive(Debug, Clone)]
pub struct ScvxParams {
    /// Initial trust radius (infinity norm on the decision vector).
    pub delta0: f64,
    pub delta_min: f64,
    pub delta_max: f64,
    pub shrink: f64,
    pub grow: f64,
    /// Acceptance thresholds `rho0 < rho1 < rho2`.
    pub rho0: f64,
    pub rho1: f64,
    pub rho2: f64,
    /// L1 weight on elastic slacks in the subproblems.
    pub elastic_weight: f64,
    /// L1 violation weight in the merit function driving acceptance; kept
    /// moderate so second-order linearization error does not drown true
    /// cost differences.
    pub merit_weight: f64,
    /// Exit tolerance on the largest per-node state step (L2 per node).
    pub eps: f64,
    /// Worst admissible nonlinear violation for an Optimal exit.
    pub slack_tol: f64,
    /// Step size under which a repeated solution counts as a stall.
    pub stall_tol: f64,
    /// Trust-region inflation applied on a detected stall.
    pub stall_factor: f64,
    pub max_iter: usize,
    /// Restore textbook signed acceptance ratios (ablation switch).
    pub signed_ratio: bool,
    /// Node budget of each MILP subproblem (SMILP route).
    pub node_limit: usize,
    pub lp: LpParams,
}

impl Default for ScvxParams {
    fn default() -> Self {
        ScvxParams {
            delta0: 5.0,
            delta_min: 1e-9,
            delta_max: 1e4,
            shrink: 0.5,
            grow: 2.0,
            rho0: 0.0,
            rho1: 0.25,
            rho2: 0.7,
            elastic_weight: 1e5,
            merit_weight: 30.0,
            eps: 0.02,
            slack_tol: 1e-6,
            stall_tol: 1e-9,
            stall_factor: 10.0,
            max_iter: 100,
            signed_ratio: false,
            node_limit: 20_000,
            lp: LpParams::default(),
        }
    }
}

impl ScvxParams {
    /// Tightened copy used by the hybrid refinement phase.
    pub fn tightened(&self) -> Self {
        let mut p = self.clone();
        p.eps /= 10.0;
        p
    }
}

/// Successive convexification on a continuous problem.
pub fn scvx_solve(
    nlp: &NlpProblem,
    x_ref: &[f64],
    params: &ScvxParams,
) -> Result<(Vec<f64>, SolveReport), SolveError> {
    successive(nlp, x_ref, params, false, &[])
}

/// Successive convexification preserving the integrality mask: every
/// subproblem is a MILP. With an empty mask the iterate trajectory is
/// identical to [`scvx_solve`].
pub fn smilp_solve(
    nlp: &NlpProblem,
    x_ref: &[f64],
    params: &ScvxParams,
) -> Result<(Vec<f64>, SolveReport), SolveError> {
    successive(nlp, x_ref, params, true, &[])
}

/// Two-phase route for mixed-integer nonlinear problems: SMILP to pick the
/// binaries, then a fixed-binary continuous refinement from the phase-1
/// trajectory at a tenfold tighter exit tolerance.
pub fn hybrid_solve(
    nlp: &NlpProblem,
    x_ref: &[f64],
    params: &ScvxParams,
) -> Result<(Vec<f64>, SolveReport), SolveError> {
    let (x1, rep1) = successive(nlp, x_ref, params, true, &[])?;
    if rep1.status == SolveStatus::Infeasible {
        return Ok((x1, rep1));
    }
    // fix the binaries for the refinement phase; the problem-aware
    // assignment heuristic keeps them consistent with the phase-1 positions
    let assignment = match &nlp.int_hint {
        Some(f) => f(&x1),
        None => x1.clone(),
    };
    let pins: Vec<(usize, f64, f64)> = nlp
        .integrality
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(j, _)| {
            let v = assignment[j].round();
            (j, v, v)
        })
        .collect();
    let tight = params.tightened();
    let (x2, rep2) = successive(nlp, &x1, &tight, false, &pins)?;
    let mut log = rep1.log.clone();
    log.extend(rep2.log.iter().copied());
    let final_tr = rep2.final_trust_radius;
    let status = if rep2.status == SolveStatus::Infeasible {
        SolveStatus::Phase2Infeasible
    } else {
        rep2.status
    };
    let (solution, objective) = if status == SolveStatus::Phase2Infeasible {
        (x1, rep1.objective)
    } else {
        (x2, rep2.objective)
    };
    Ok((
        solution,
        SolveReport {
            status,
            objective,
            iterations: rep1.iterations + rep2.iterations,
            log,
            wall_time: 0.0,
            final_trust_radius: final_tr,
        },
    ))
}

fn successive(
    nlp: &NlpProblem,
    x_start: &[f64],
    params: &ScvxParams,
    integral: bool,
    pins: &[(usize, f64, f64)],
) -> Result<(Vec<f64>, SolveReport), SolveError> {
    if x_start.len() != nlp.n_vars {
        return Err(SolveError::Dimension("reference trajectory length"));
    }
    let mut x_ref = x_start.to_vec();
    nlp.clamp_into_bounds(&mut x_ref);
    for &(j, lo, hi) in pins {
        x_ref[j] = x_ref[j].clamp(lo, hi);
    }
    let w = params.elastic_weight;
    let mut wm = params.merit_weight;
    let (mut j_ref, mut viol_ref) = nlp.penalized_objective(&x_ref, wm);
    let mut delta = params.delta0;
    let mut log: Vec<IterRecord> = Vec::new();
    let mut status = SolveStatus::IterLimit;
    let mut infeasible_grows = 0usize;
    let mut consecutive_rejects = 0usize;
    let mut reject_escapes = 0usize;

    for _iter in 0..params.max_iter {
        // relax an escalated merit weight once the reference is feasible:
        // the escalation exists to price feasibility restoration, and
        // keeping it inflates the quadratic-error term that throttles steps
        if wm > params.merit_weight && viol_ref <= 1e-4 {
            wm = params.merit_weight;
            let re = nlp.penalized_objective(&x_ref, wm);
            j_ref = re.0;
            viol_ref = re.1;
        }
        let opts = LinearizeOptions {
            elastic_weight: w,
            keep_integrality: integral,
            trust_radius: Some(delta),
            bound_overrides: pins.to_vec(),
            elastic_linear: integral,
        };
        let lin = nlp
            .linearize(&x_ref, &opts)
            .map_err(|_| SolveError::NumericalBreakdown("jacobian evaluation failed"))?;
        let (sol, sub) = if integral && lin.prog.has_integers() {
            let milp = MilpParams {
                lp: params.lp,
                node_limit: params.node_limit,
                incumbent_hint: Some(current_int_hint(nlp, &x_ref, lin.prog.n_vars())),
                ..Default::default()
            };
            milp_solve(&lin.prog, &milp)?
        } else {
            lp_solve(&lin.prog, &params.lp)?
        };
        match sub.status {
            SolveStatus::Optimal => {}
            // a node-limited tree with an incumbent still yields a usable
            // integral step; without one it is handled as infeasible below
            SolveStatus::NodeLimit if sub.objective.is_finite() => {}
            SolveStatus::Infeasible | SolveStatus::NodeLimit => {
                // exact linear rows plus pins can exclude the trust box;
                // widen and retry before declaring the problem infeasible
                infeasible_grows += 1;
                delta *= params.grow;
                if delta > params.delta_max || infeasible_grows > 60 {
                    status = SolveStatus::Infeasible;
                    break;
                }
                continue;
            }
            _ => {
                status = SolveStatus::Stalled;
                break;
            }
        }
        let x_new = sol[..nlp.n_vars].to_vec();
        if x_new.iter().any(|v| !v.is_finite()) {
            // numerical failure in the subproblem: treat as a rejected step
            delta = (delta * params.shrink).max(params.delta_min);
            consecutive_rejects += 1;
            if delta <= params.delta_min {
                status = SolveStatus::Stalled;
                break;
            }
            continue;
        }
        // predicted value under the merit weight: slack columns are priced
        // at the elastic weight inside the LP, so reprice them
        let slack_cost: f64 = sol[lin.slack_start..]
            .iter()
            .map(|s| s.max(0.0))
            .sum();
        let l_new = sub.objective - w * slack_cost + wm * slack_cost;
        let (j_new, viol_new) = nlp.penalized_objective(&x_new, wm);
        let d_j = j_ref - j_new;
        let d_l = j_ref - l_new;
        let rho = if d_l.abs() < 1e-12 * (1.0 + j_ref.abs()) {
            1.0
        } else if params.signed_ratio {
            d_j / d_l
        } else {
            d_j.abs() / d_l.abs()
        };
        // bounded non-monotone acceptance: objective increases are tolerated
        // in proportion to the predicted improvement (so the allowance
        // vanishes near convergence), or when the step at least halves the
        // worst constraint violation (phantom-solution escapes)
        // stationarity: a feasible reference whose subproblem predicts no
        // improvement at a healthy radius is converged
        if viol_ref <= params.slack_tol
            && d_l.abs() <= 1e-9 * (1.0 + j_ref.abs())
            && delta >= 1e-3 * params.delta0
        {
            status = SolveStatus::Optimal;
            break;
        }
        let allowed = j_ref + 0.1 * d_l.abs() + 1e-6 * (1.0 + j_ref.abs());
        let accept = rho >= params.rho0
            && (j_new <= allowed
                || (viol_ref > params.slack_tol && viol_new <= 0.5 * viol_ref));
        // model agreement: with absolute-value ratios a trustworthy model
        // has rho near one; the signed variant keeps the classic reading
        let (model_poor, model_good) = if params.signed_ratio {
            (rho < params.rho1, rho > params.rho2)
        } else {
            let agreement = (rho - 1.0).abs();
            (agreement > 1.0 - params.rho1, agreement < 1.0 - params.rho2)
        };
        // merit steering: a model-faithful step rejected while the reference
        // still carries violation means the penalty underprices
        // feasibility; escalate and re-price instead of shrinking
        if !accept
            && model_good
            && viol_ref > 1e-3
            && viol_new >= 0.5 * viol_ref
            && wm < params.elastic_weight
        {
            wm = (wm * 3.0).min(params.elastic_weight);
            let re = nlp.penalized_objective(&x_ref, wm);
            j_ref = re.0;
            viol_ref = re.1;
            log.push(IterRecord {
                trust_radius: delta,
                rho,
                slack_inf: viol_new,
                accepted: false,
                objective: j_new,
                predicted: d_l,
                merit_weight: wm,
            });
            continue;
        }
        if accept {
            consecutive_rejects = 0;
            let step_state = nlp.layout.max_node_state_distance(&x_new, &x_ref);
            let step_inf = x_new
                .iter()
                .zip(&x_ref)
                .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
            x_ref = x_new;
            j_ref = j_new;
            log.push(IterRecord {
                trust_radius: delta,
                rho,
                slack_inf: viol_new,
                accepted: true,
                objective: j_new,
                predicted: d_l,
                merit_weight: wm,
            });
            // step agreement only counts when the trust region is inactive,
            // otherwise the radius itself is what kept the step small
            let tr_inactive = step_inf < 0.95 * delta;
            let settled = delta <= params.eps && d_j.abs() <= 1e-5 * (1.0 + j_new.abs());
            if (tr_inactive || settled) && step_state <= params.eps && viol_new <= params.slack_tol
            {
                status = SolveStatus::Optimal;
                break;
            }
            let feasibility_ok = viol_new <= viol_ref.max(params.slack_tol) * 1.05;
            if step_inf < params.stall_tol && viol_new > params.slack_tol {
                // repeated elastic solution with residual infeasibility:
                // enlarge the region to escape the stagnation
                delta = (delta * params.stall_factor).min(params.delta_max);
            } else if model_poor {
                delta = (delta * params.shrink).max(params.delta_min);
            } else if (model_good || !tr_inactive) && feasibility_ok {
                // grow on good agreement or a clipped step, but never while
                // the step is degrading feasibility
                delta = (delta * params.grow).min(params.delta_max);
            }
            viol_ref = viol_new;
            // a radius below the residual scale can never restore
            // feasibility; keep it at least as large as the violation
            if viol_ref > 10.0 * params.slack_tol {
                delta = delta.max(viol_ref.min(params.delta_max));
            }
        } else {
            log.push(IterRecord {
                trust_radius: delta,
                rho,
                slack_inf: viol_new,
                accepted: false,
                objective: j_new,
                predicted: d_l,
                merit_weight: wm,
            });
            consecutive_rejects += 1;
            if consecutive_rejects >= 12 {
                // repeated rejections: enlarge the region to escape
                consecutive_rejects = 0;
                reject_escapes += 1;
                if reject_escapes > 6 {
                    status = SolveStatus::Stalled;
                    break;
                }
                delta = (delta * params.stall_factor).min(params.delta_max);
            } else {
                delta *= params.shrink;
                if delta < params.delta_min {
                    status = SolveStatus::Stalled;
                    break;
                }
            }
        }
    }

    let iterations = log.len();
    Ok((
        x_ref,
        SolveReport {
            status,
            objective: j_ref,
            iterations,
            log,
            wall_time: 0.0,
            final_trust_radius: delta,
        },
    ))
}

/// Integer-variable hint padded to the subproblem width (slack columns are
/// continuous, their hint values are ignored). Uses the problem-supplied
/// assignment heuristic when available, plain rounding otherwise.
fn current_int_hint(nlp: &NlpProblem, x_ref: &[f64], width: usize) -> Vec<f64> {
    let base = match &nlp.int_hint {
        Some(f) => f(x_ref),
        None => x_ref.to_vec(),
    };
    let mut hint = Vec::with_capacity(width);
    hint.extend_from_slice(&base);
    hint.resize(width, 0.0);
    for (j, &int) in nlp.integrality.iter().enumerate() {
        if int {
            hint[j] = hint[j].round();
        }
    }
    hint
}
