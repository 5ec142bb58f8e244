//! Closed-loop problem builders for the intersection scenario.
//!
//! The avoidance phase carries the full state
//! `(vx, vy, q, Xv, Yv, psi, s, e, psi_bar, Xo, Yo)` with inputs
//! `(delta, kappa_f, kappa_r)`, relaxed avoidance rows around the moving
//! obstacle, and first/second-order finite-difference limits on the
//! steering. The tracking phase drops the avoidance rows and rate limits
//! and adds a terminal cost pulling the speed back to the cruise target.

use super::{position_box, rk4_total, scenario_big_m, TranscribeError};
use crate::nlp::{NlBlock, NlCost, NlpProblem, VarLayout};
use crate::oa::{self, Direction, RelativeNode};
use crate::obstacle::{Obstacle, RectObstacle};
use crate::program::{SparseRow, DEFAULT_BOUND};
use crate::scenario::ScenarioConfig;
use crate::vehicle::{eom_nonlinear, BodyState, EomOptions, LateralTireModel, SlipModel};
use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

/// State dimension of the closed-loop model.
pub const MPC_NX: usize = 11;
/// Input dimension.
pub const MPC_NU: usize = 3;

/// Controller phase: avoid the oncoming obstacle, or track the path once it
/// has passed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MpcPhase {
    Avoidance,
    Tracking,
}

/// Current plant state and the previously applied inputs (pinned as the
/// input initial condition).
#[derive(Debug, Clone, Copy)]
pub struct MpcStepInput {
    pub state: [f64; MPC_NX],
    pub prev_inputs: [f64; MPC_NU],
}

/// Transcribed one-step problem.
pub struct MpcProblem {
    pub nlp: NlpProblem,
    pub h: f64,
    pub phase: MpcPhase,
}

fn moving_obstacle(cfg: &ScenarioConfig) -> Result<(RectObstacle, (f64, f64)), TranscribeError> {
    for spec in &cfg.obstacles {
        if let Ok(Obstacle::Moving(m)) = spec.to_obstacle() {
            return Ok((m.local, m.velocity));
        }
    }
    Err(TranscribeError::Config(String::from(
        "closed-loop scenario requires a moving obstacle",
    )))
}

/// Total dynamics of the closed-loop model; shared verbatim by the
/// transcription defects and the plant integration.
pub fn mpc_dynamics(
    cfg: &ScenarioConfig,
) -> Result<Arc<dyn Fn(&[f64], &[f64], &mut [f64]) + Send + Sync>, TranscribeError> {
    let p = cfg.vehicle;
    let path = Arc::new(
        cfg.path
            .build()
            .map_err(|e| TranscribeError::Config(format!("path: {e}")))?,
    );
    let (_, velocity) = moving_obstacle(cfg)?;
    let opts = EomOptions {
        slip: if cfg.small_angle {
            SlipModel::SmallAngle
        } else {
            SlipModel::Exact
        },
        tire: LateralTireModel::Brush,
    };
    Ok(Arc::new(move |x, u, out| {
        let body = BodyState {
            vx: x[0].max(0.1),
            vy: x[1],
            q: x[2],
            x: x[3],
            y: x[4],
            psi: x[5],
        };
        let kf = u[1].max(-0.95);
        let kr = u[2].max(-0.95);
        let dx = eom_nonlinear(&body, u[0], kf, kr, &p, opts).expect("slip and speed floored");
        out[..6].copy_from_slice(&dx);
        // path-error block
        let (s, e, psi_bar) = (x[6], x[7], x[8]);
        let kappa_fs = path.curvature(s);
        let (sp, cp) = (crate::math::sin(psi_bar), crate::math::cos(psi_bar));
        let mut denom = 1.0 - e * kappa_fs;
        if denom.abs() < 1e-6 {
            denom = if denom < 0.0 { -1e-6 } else { 1e-6 };
        }
        let s_dot = (body.vx * cp - body.vy * sp) / denom;
        out[6] = s_dot;
        out[7] = body.vx * sp + body.vy * cp;
        out[8] = body.q - kappa_fs * s_dot;
        // obstacle block
        out[9] = velocity.0;
        out[10] = velocity.1;
    }))
}

struct Slots {
    layout: VarLayout,
    gammas: usize,
}

impl Slots {
    fn state(&self, k: usize) -> usize {
        self.layout.node_state[k].start
    }
    fn input(&self, k: usize) -> usize {
        self.layout.node_input[k].start
    }
    fn gamma(&self, k: usize, i: usize) -> usize {
        self.layout.node_gamma[k].start + i
    }
    fn aux(&self, k: usize, i: usize) -> usize {
        self.layout.node_aux[k].start + i
    }
}

fn layout(n: usize, gammas: usize) -> Slots {
    let mut node_state = Vec::with_capacity(n);
    let mut node_input = Vec::with_capacity(n - 1);
    let mut node_gamma = Vec::with_capacity(n);
    let mut node_aux = Vec::with_capacity(n);
    let mut cursor = 0usize;
    for k in 0..n {
        node_state.push(cursor..cursor + MPC_NX);
        cursor += MPC_NX;
        let interior = k + 1 < n;
        if interior {
            node_input.push(cursor..cursor + MPC_NU);
            cursor += MPC_NU;
        }
        node_gamma.push(cursor..cursor + gammas);
        cursor += gammas;
        // |e| always; |kappa_f| and |delta| on interval nodes
        let na = if interior { 3 } else { 1 };
        node_aux.push(cursor..cursor + na);
        cursor += na;
    }
    Slots {
        layout: VarLayout {
            n_vars: cursor,
            node_state,
            node_input,
            node_gamma,
            node_aux,
        },
        gammas,
    }
}

/// Builds the one-step closed-loop problem for the requested phase.
pub fn build_mpc_step(
    cfg: &ScenarioConfig,
    phase: MpcPhase,
    step: &MpcStepInput,
) -> Result<MpcProblem, TranscribeError> {
    let n = cfg.horizon.n;
    let h = cfg.horizon.step();
    let gammas = match phase {
        MpcPhase::Avoidance => 2,
        MpcPhase::Tracking => 0,
    };
    let slots = layout(n, gammas);
    let mut nlp = NlpProblem::empty(slots.layout.n_vars);
    nlp.layout = slots.layout.clone();

    let (local_box, _) = moving_obstacle(cfg)?;
    let big_m = scenario_big_m(cfg);
    let (bx0, bx1, by0, by1) = position_box(cfg);
    let path_len = cfg
        .path
        .build()
        .map_err(|e| TranscribeError::Config(format!("path: {e}")))?
        .total_length();
    let w = cfg.weights;
    let lim = cfg.bounds;
    let xo0 = step.state[9];
    let yo0 = step.state[10];

    for k in 0..n {
        let s = slots.state(k);
        nlp.var_bounds[s] = (lim.u_min, lim.u_max);
        nlp.var_bounds[s + 1] = (-10.0, 10.0);
        nlp.var_bounds[s + 2] = (-6.0, 6.0);
        nlp.var_bounds[s + 3] = (bx0, bx1);
        nlp.var_bounds[s + 4] = (by0, by1);
        nlp.var_bounds[s + 5] = (-1.2, 2.8);
        nlp.var_bounds[s + 6] = (-2.0, path_len + 15.0);
        nlp.var_bounds[s + 7] = (-8.0, 8.0);
        nlp.var_bounds[s + 8] = (-2.0, 2.0);
        nlp.var_bounds[s + 9] = (xo0 - 80.0, xo0 + 10.0);
        nlp.var_bounds[s + 10] = (yo0 - 2.0, yo0 + 2.0);

        let interior = k + 1 < n;
        if interior {
            let u = slots.input(k);
            nlp.var_bounds[u] = (-lim.delta_max, lim.delta_max);
            nlp.var_bounds[u + 1] = (-lim.kappa_f_max, lim.kappa_f_max);
            nlp.var_bounds[u + 2] = (-lim.kappa_r_max, 0.0);
            // braking regularization is linear because kappa_r <= 0
            nlp.linear_cost[u + 2] += -w.kappa_r;
        }

        // |e| epigraph
        let te = slots.aux(k, 0);
        nlp.var_bounds[te] = (0.0, DEFAULT_BOUND);
        nlp.linear_cost[te] = w.path_error;
        nlp.lin_ineq
            .push(SparseRow::new(vec![(s + 7, 1.0), (te, -1.0)], 0.0));
        nlp.lin_ineq
            .push(SparseRow::new(vec![(s + 7, -1.0), (te, -1.0)], 0.0));
        if interior {
            let u = slots.input(k);
            let tkf = slots.aux(k, 1);
            nlp.var_bounds[tkf] = (0.0, DEFAULT_BOUND);
            nlp.linear_cost[tkf] = w.kappa_f;
            nlp.lin_ineq
                .push(SparseRow::new(vec![(u + 1, 1.0), (tkf, -1.0)], 0.0));
            nlp.lin_ineq
                .push(SparseRow::new(vec![(u + 1, -1.0), (tkf, -1.0)], 0.0));
            let td = slots.aux(k, 2);
            nlp.var_bounds[td] = (0.0, DEFAULT_BOUND);
            nlp.linear_cost[td] = w.steering;
            nlp.lin_ineq
                .push(SparseRow::new(vec![(u, 1.0), (td, -1.0)], 0.0));
            nlp.lin_ineq
                .push(SparseRow::new(vec![(u, -1.0), (td, -1.0)], 0.0));
        }
    }

    // pins: current state and previously applied inputs
    for i in 0..MPC_NX {
        nlp.var_bounds[slots.state(0) + i] = (step.state[i], step.state[i]);
    }
    for i in 0..MPC_NU {
        let u0 = slots.input(0) + i;
        let v = step.prev_inputs[i];
        nlp.var_bounds[u0] = (v, v);
    }

    if phase == MpcPhase::Avoidance {
        // steering rate and acceleration limits by finite differences
        let n_u = n - 1;
        for k in 0..n_u - 1 {
            let (d0, d1) = (slots.input(k), slots.input(k + 1));
            let lim_step = lim.delta_rate_max * h;
            nlp.lin_ineq
                .push(SparseRow::new(vec![(d1, 1.0), (d0, -1.0)], lim_step));
            nlp.lin_ineq
                .push(SparseRow::new(vec![(d1, -1.0), (d0, 1.0)], lim_step));
        }
        for k in 1..n_u - 1 {
            let (dm, d0, d1) = (slots.input(k - 1), slots.input(k), slots.input(k + 1));
            let lim_acc = lim.delta_accel_max * h * h;
            nlp.lin_ineq.push(SparseRow::new(
                vec![(d1, 1.0), (d0, -2.0), (dm, 1.0)],
                lim_acc,
            ));
            nlp.lin_ineq.push(SparseRow::new(
                vec![(d1, -1.0), (d0, 2.0), (dm, -1.0)],
                lim_acc,
            ));
        }

        // relaxed avoidance rows around the moving obstacle
        let nodes: Vec<RelativeNode> = (0..n)
            .map(|k| {
                let s = slots.state(k);
                RelativeNode {
                    xv: s + 3,
                    yv: s + 4,
                    xo: s + 9,
                    yo: s + 10,
                    g1: slots.gamma(k, 0),
                    g2: slots.gamma(k, 1),
                }
            })
            .collect();
        let rows = oa::rcoa_relative(&local_box, Direction::Below, &big_m, w.gamma_mpc, &nodes)
            .map_err(|e| TranscribeError::Config(format!("{e}")))?;
        for &(g, lo, hi) in &rows.gamma_bounds {
            nlp.var_bounds[g] = (lo, hi);
        }
        for &(g, pw) in &rows.penalty {
            nlp.linear_cost[g] += pw;
        }
        for row in rows.rows {
            nlp.lin_ineq.push(row);
        }
    } else {
        // terminal cost recovering the cruise speed
        let vx_last = slots.state(n - 1);
        let u_des = lim.u_des;
        nlp.nl_cost.push(NlCost {
            vars: vec![vx_last],
            eval: Box::new(move |x| {
                let d = u_des - x[0];
                d * d
            }),
        });
    }

    // dynamics defects
    let dynamics = mpc_dynamics(cfg)?;
    let substeps = cfg.horizon.substeps;
    for k in 0..n - 1 {
        let mut vars: Vec<usize> = (slots.state(k)..slots.state(k) + MPC_NX).collect();
        vars.extend(slots.input(k)..slots.input(k) + MPC_NU);
        vars.extend(slots.state(k + 1)..slots.state(k + 1) + MPC_NX);
        let f = dynamics.clone();
        nlp.nl_eq.push(NlBlock {
            rows: MPC_NX,
            vars,
            eval: Box::new(move |g, out| {
                let next = rk4_total(&*f, &g[..MPC_NX], &g[MPC_NX..MPC_NX + MPC_NU], h, substeps);
                for i in 0..MPC_NX {
                    out[i] = g[MPC_NX + MPC_NU + i] - next[i];
                }
            }),
        });
    }

    // combined-slip magnitude limits per tire
    let p = cfg.vehicle;
    let sigma_sl_f = p.sigma_sl_front();
    let sigma_sl_r = p.sigma_sl_rear();
    let small = cfg.small_angle;
    for k in 0..n - 1 {
        let s = slots.state(k);
        let u = slots.input(k);
        let vars = vec![s, s + 1, s + 2, u, u + 1, u + 2];
        let params = p;
        nlp.nl_ineq.push(NlBlock {
            rows: 2,
            vars,
            eval: Box::new(move |g, out| {
                let (vx, vy, q) = (g[0].max(0.1), g[1], g[2]);
                let (delta, kf, kr) = (g[3], g[4].max(-0.95), g[5].max(-0.95));
                let zf = (vy + params.a * q) / vx;
                let zr = (vy - params.b * q) / vx;
                let (af, ar) = if small {
                    (zf - delta, zr)
                } else {
                    (crate::math::atan(zf) - delta, crate::math::atan(zr))
                };
                let sf = sigma_norm(af, kf, small);
                let sr = sigma_norm(ar, kr, small);
                out[0] = sf - sigma_sl_f;
                out[1] = sr - sigma_sl_r;
            }),
        });
    }

    Ok(MpcProblem {
        nlp,
        h,
        phase,
    })
}

/// Smoothed slip-vector norm; the epsilon keeps the gradient defined at the
/// rolling trim.
fn sigma_norm(alpha: f64, kappa: f64, small_angle: bool) -> f64 {
    let sy = if small_angle {
        alpha
    } else {
        crate::math::tan(alpha)
    } / (1.0 + kappa);
    let sx = kappa / (1.0 + kappa);
    crate::math::sqrt(sx * sx + sy * sy + 1e-12)
}

/// Reference trajectory for one controller step: roll the plant forward
/// under an input plan and fill switches and epigraph auxiliaries
/// consistently.
pub fn mpc_reference(
    cfg: &ScenarioConfig,
    prob: &MpcProblem,
    state0: &[f64; MPC_NX],
    plan: &[[f64; MPC_NU]],
) -> Result<Vec<f64>, TranscribeError> {
    let n = cfg.horizon.n;
    let h = prob.h;
    let dynamics = mpc_dynamics(cfg)?;
    let (local_box, _) = moving_obstacle(cfg)?;
    let big_m = scenario_big_m(cfg);
    let slots = layout(n, prob.nlp.layout.node_gamma[0].len());
    let mut x = vec![0.0; slots.layout.n_vars];
    let mut state = state0.to_vec();
    for k in 0..n {
        let s = slots.state(k);
        x[s..s + MPC_NX].copy_from_slice(&state);
        let interior = k + 1 < n;
        let u = if interior {
            let u = plan.get(k).copied().unwrap_or([0.0; MPC_NU]);
            let base = slots.input(k);
            x[base..base + MPC_NU].copy_from_slice(&u);
            u
        } else {
            [0.0; MPC_NU]
        };
        if slots.gammas == 2 {
            // minimal switch values demanded by the activation rows
            let (xv, yv, xo, yo) = (state[3], state[4], state[9], state[10]);
            let g1 = ((xo + local_box.x_min - xv) / big_m.m1).clamp(0.0, 1.0);
            let mut g2 = ((xv - xo - local_box.x_max) / big_m.m2).clamp(0.0, 1.0);
            let need = (yv - yo - local_box.y_min) / big_m.m3 - g1 - g2;
            if need > 0.0 {
                g2 = (g2 + need).clamp(0.0, 1.0 - g1.min(1.0));
            }
            x[slots.gamma(k, 0)] = g1;
            x[slots.gamma(k, 1)] = g2;
        }
        x[slots.aux(k, 0)] = state[7].abs();
        if interior {
            x[slots.aux(k, 1)] = u[1].abs();
            x[slots.aux(k, 2)] = u[0].abs();
        }
        if interior {
            state = rk4_total(&*dynamics, &state, &u, h, cfg.horizon.substeps);
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::sim1;

    fn step0(cfg: &ScenarioConfig) -> MpcStepInput {
        let mut state = [0.0; MPC_NX];
        state[0] = cfg.initial.vx;
        state[9] = 50.0;
        state[10] = 3.6576;
        MpcStepInput {
            state,
            prev_inputs: [0.0; MPC_NU],
        }
    }

    #[test]
    fn avoidance_problem_shape() {
        let cfg = sim1();
        let prob = build_mpc_step(&cfg, MpcPhase::Avoidance, &step0(&cfg)).unwrap();
        let n = cfg.horizon.n;
        assert_eq!(prob.nlp.layout.n_nodes(), n);
        assert_eq!(prob.nlp.nl_eq.len(), n - 1);
        // two slip blocks... one block of two rows per interval
        assert_eq!(prob.nlp.nl_ineq.len(), n - 1);
        // gamma bounds are [0,1]
        let g0 = prob.nlp.layout.node_gamma[0].clone();
        assert_eq!(g0.len(), 2);
        assert_eq!(prob.nlp.var_bounds[g0.start], (0.0, 1.0));
        // activation band from the vehicle geometry
        let local = match cfg.obstacles[0] {
            crate::scenario::ObstacleSpec::Moving { v_ll, v_ur, .. } => (v_ll.0, v_ur.0),
            _ => unreachable!(),
        };
        assert!((local.0 + 1.4803).abs() < 1e-12);
        assert!((local.1 - 1.653).abs() < 1e-12);
    }

    #[test]
    fn tracking_problem_drops_avoidance_machinery() {
        let cfg = sim1();
        let avoid = build_mpc_step(&cfg, MpcPhase::Avoidance, &step0(&cfg)).unwrap();
        let track = build_mpc_step(&cfg, MpcPhase::Tracking, &step0(&cfg)).unwrap();
        assert!(track.nlp.n_vars < avoid.nlp.n_vars);
        assert!(track.nlp.lin_ineq.len() < avoid.nlp.lin_ineq.len());
        assert_eq!(track.nlp.layout.node_gamma[0].len(), 0);
        assert_eq!(track.nlp.nl_cost.len(), 1);
    }

    #[test]
    fn second_difference_rows_use_interior_nodes() {
        let cfg = sim1();
        let prob = build_mpc_step(&cfg, MpcPhase::Avoidance, &step0(&cfg)).unwrap();
        let n_u = cfg.horizon.n - 1;
        // count rate rows: |e|,|kf|,|d| epigraphs are 2 rows each; rate rows:
        // 2 (n_u - 1) first order + 2 (n_u - 2) second order + 4 OA rows/node
        let epigraph = 2 * cfg.horizon.n + 4 * n_u;
        let rates = 2 * (n_u - 1) + 2 * (n_u - 2);
        let oa_rows = 4 * cfg.horizon.n;
        assert_eq!(prob.nlp.lin_ineq.len(), epigraph + rates + oa_rows);
    }

    #[test]
    fn reference_rollout_is_defect_free() {
        let cfg = sim1();
        let prob = build_mpc_step(&cfg, MpcPhase::Avoidance, &step0(&cfg)).unwrap();
        let plan = vec![[0.0, 0.0, 0.0]; cfg.horizon.n - 1];
        let x_ref = mpc_reference(&cfg, &prob, &step0(&cfg).state, &plan).unwrap();
        let (_, viol) = prob.nlp.penalized_objective(&x_ref, 1.0);
        assert!(viol < 1e-9, "viol = {viol}");
    }

    #[test]
    fn input_pins_match_previous_controls() {
        let cfg = sim1();
        let mut step = step0(&cfg);
        step.prev_inputs = [0.05, 0.1, -0.02];
        let prob = build_mpc_step(&cfg, MpcPhase::Avoidance, &step).unwrap();
        let u0 = prob.nlp.layout.node_input[0].start;
        assert_eq!(prob.nlp.var_bounds[u0], (0.05, 0.05));
        assert_eq!(prob.nlp.var_bounds[u0 + 1], (0.1, 0.1));
        assert_eq!(prob.nlp.var_bounds[u0 + 2], (-0.02, -0.02));
    }
}
