//! Open-loop trajectory problem builder for the cluttered environments.
//!
//! Decision variables per node: state block, steering (all but the last
//! node), avoidance switches, and the path-error epigraph auxiliary. The
//! dynamics enter as RK4 multiple-shooting defects; slip-angle limits and
//! elliptical keep-out rows are nonlinear blocks; the avoidance rows of the
//! relaxed and mixed-integer families are exact linear rows.

use super::{rk4_total, scenario_big_m, position_box, TranscribeError};
use crate::nlp::{NlBlock, NlpProblem, VarLayout};
use crate::oa::{self, BigM, MioaNode, RcoaNode};
use crate::obstacle::Obstacle;
use crate::program::DEFAULT_BOUND;
use crate::scenario::{DynamicsMode, Formulation, ScenarioConfig};
use crate::vehicle::{
    eom_nonlinear, linear_ab, slip_angles, BodyState, EomOptions, LateralTireModel, SlipModel,
    VehicleParams,
};
use alloc::boxed::Box;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

/// Transcribed open-loop problem plus everything the harness needs to
/// simulate and score the solution.
pub struct OpenLoopProblem {
    pub nlp: NlpProblem,
    /// Initial reference trajectory (straight rolling with zero steering).
    pub x_ref: Vec<f64>,
    /// Node interval (s).
    pub h: f64,
    /// State dimension of the transcribed model (6 nonlinear, 5 linear).
    pub nx: usize,
    /// Switches per node across all obstacles.
    pub gammas_per_node: usize,
    /// Obstacles as the formulation sees them.
    pub obstacles: Vec<Obstacle>,
    pub big_m: BigM,
}

/// Total dynamics of the nonlinear free-rolling model; the speed is floored
/// away from zero so finite-difference probes stay defined.
pub fn plant_dynamics(
    p: VehicleParams,
    small_angle: bool,
) -> Arc<dyn Fn(&[f64], &[f64], &mut [f64]) + Send + Sync> {
    let opts = EomOptions {
        slip: if small_angle {
            SlipModel::SmallAngle
        } else {
            SlipModel::Exact
        },
        tire: LateralTireModel::Brush,
    };
    Arc::new(move |x, u, out| {
        let s = BodyState {
            vx: x[0].max(0.1),
            vy: x[1],
            q: x[2],
            x: x[3],
            y: x[4],
            psi: x[5],
        };
        let dx = eom_nonlinear(&s, u[0], 0.0, 0.0, &p, opts).expect("speed floored");
        out.copy_from_slice(&dx);
    })
}

/// Constant-speed linear model with the nonlinear pose map appended; state
/// `(vy, q, psi, X, Y)`.
fn reduced_dynamics(
    p: &VehicleParams,
    speed: f64,
) -> Result<Arc<dyn Fn(&[f64], &[f64], &mut [f64]) + Send + Sync>, TranscribeError> {
    let (a, b) = linear_ab(p, speed)
        .map_err(|e| TranscribeError::Config(format!("linear model: {e}")))?;
    Ok(Arc::new(move |x, u, out| {
        let (vy, q, psi) = (x[0], x[1], x[2]);
        for r in 0..3 {
            out[r] = a[r][0] * vy + a[r][1] * q + a[r][2] * psi + b[r] * u[0];
        }
        out[3] = speed * crate::math::cos(psi) - vy * crate::math::sin(psi);
        out[4] = speed * crate::math::sin(psi) + vy * crate::math::cos(psi);
    }))
}

struct Indexer {
    layout: VarLayout,
    n_nodes: usize,
}

impl Indexer {
    fn state(&self, k: usize) -> core::ops::Range<usize> {
        self.layout.node_state[k].clone()
    }
    fn steering(&self, k: usize) -> usize {
        self.layout.node_input[k].start
    }
    fn gamma(&self, k: usize, i: usize) -> usize {
        self.layout.node_gamma[k].start + i
    }
    fn aux(&self, k: usize, i: usize) -> usize {
        self.layout.node_aux[k].start + i
    }
}

fn build_layout(n_nodes: usize, nx: usize, gammas_per_node: usize) -> Indexer {
    let mut node_state = Vec::with_capacity(n_nodes);
    let mut node_input = Vec::with_capacity(n_nodes.saturating_sub(1));
    let mut node_gamma = Vec::with_capacity(n_nodes);
    let mut node_aux = Vec::with_capacity(n_nodes);
    let mut cursor = 0usize;
    for k in 0..n_nodes {
        node_state.push(cursor..cursor + nx);
        cursor += nx;
        let interior = k + 1 < n_nodes;
        if interior {
            node_input.push(cursor..cursor + 1);
            cursor += 1;
        }
        node_gamma.push(cursor..cursor + gammas_per_node);
        cursor += gammas_per_node;
        // |Y| epigraph everywhere, |delta| epigraph on interval nodes
        let na = if interior { 2 } else { 1 };
        node_aux.push(cursor..cursor + na);
        cursor += na;
    }
    Indexer {
        layout: VarLayout {
            n_vars: cursor,
            node_state,
            node_input,
            node_gamma,
            node_aux,
        },
        n_nodes,
    }
}

/// Builds the open-loop problem for a scenario under its configured
/// formulation and dynamics mode.
pub fn build_open_loop(cfg: &ScenarioConfig) -> Result<OpenLoopProblem, TranscribeError> {
    cfg.validate().map_err(TranscribeError::from)?;
    let n = cfg.horizon.n;
    let h = cfg.horizon.step();
    let nx = match cfg.dynamics {
        DynamicsMode::P1 => 6,
        DynamicsMode::P2 => 5,
    };
    let obstacles = cfg.effective_obstacles().map_err(TranscribeError::from)?;
    let gammas_per_obstacle = match cfg.formulation {
        Formulation::Rcoa => 2,
        Formulation::Mioa => 4,
        Formulation::Eoa => 0,
    };
    let gammas_per_node = gammas_per_obstacle * obstacles.len();
    let idx = build_layout(n, nx, gammas_per_node);
    let mut nlp = NlpProblem::empty(idx.layout.n_vars);
    nlp.layout = idx.layout.clone();

    let big_m = scenario_big_m(cfg);
    let (bx0, bx1, by0, by1) = position_box(cfg);
    let p = cfg.vehicle;

    // bounds and cost
    for k in 0..n {
        let s = idx.state(k);
        match cfg.dynamics {
            DynamicsMode::P1 => {
                nlp.var_bounds[s.start] = (0.3, cfg.bounds.u_max.max(cfg.initial.vx + 5.0));
                nlp.var_bounds[s.start + 1] = (-25.0, 25.0);
                nlp.var_bounds[s.start + 2] = (-8.0, 8.0);
                nlp.var_bounds[s.start + 3] = (bx0, bx1);
                nlp.var_bounds[s.start + 4] = (by0, by1);
                nlp.var_bounds[s.start + 5] = (-2.5, 2.5);
            }
            DynamicsMode::P2 => {
                nlp.var_bounds[s.start] = (-25.0, 25.0);
                nlp.var_bounds[s.start + 1] = (-8.0, 8.0);
                nlp.var_bounds[s.start + 2] = (-2.5, 2.5);
                nlp.var_bounds[s.start + 3] = (bx0, bx1);
                nlp.var_bounds[s.start + 4] = (by0, by1);
            }
        }
        if k + 1 < n {
            let d = idx.steering(k);
            nlp.var_bounds[d] = (-cfg.bounds.delta_max, cfg.bounds.delta_max);
        }
        let t = idx.aux(k, 0);
        nlp.var_bounds[t] = (0.0, DEFAULT_BOUND);
        nlp.linear_cost[t] = cfg.weights.path_error;
        if k + 1 < n {
            // light steering regularization; keeps the open-loop problems
            // from dissipating speed through slip chatter
            let d = idx.steering(k);
            let ts = idx.aux(k, 1);
            nlp.var_bounds[ts] = (0.0, DEFAULT_BOUND);
            nlp.linear_cost[ts] = cfg.weights.steering;
            nlp.lin_ineq.push(crate::program::SparseRow::new(
                vec![(d, 1.0), (ts, -1.0)],
                0.0,
            ));
            nlp.lin_ineq.push(crate::program::SparseRow::new(
                vec![(d, -1.0), (ts, -1.0)],
                0.0,
            ));
        }
        // epigraph rows t >= |Y|
        let y_var = match cfg.dynamics {
            DynamicsMode::P1 => s.start + 4,
            DynamicsMode::P2 => s.start + 4,
        };
        nlp.lin_ineq.push(crate::program::SparseRow::new(
            vec![(y_var, 1.0), (t, -1.0)],
            0.0,
        ));
        nlp.lin_ineq.push(crate::program::SparseRow::new(
            vec![(y_var, -1.0), (t, -1.0)],
            0.0,
        ));
    }

    // initial-state pin
    let init = match cfg.dynamics {
        DynamicsMode::P1 => vec![
            cfg.initial.vx,
            cfg.initial.vy,
            cfg.initial.q,
            cfg.initial.x,
            cfg.initial.y,
            cfg.initial.psi,
        ],
        DynamicsMode::P2 => vec![
            cfg.initial.vy,
            cfg.initial.q,
            cfg.initial.psi,
            cfg.initial.x,
            cfg.initial.y,
        ],
    };
    for (i, v) in init.iter().enumerate() {
        nlp.var_bounds[idx.state(0).start + i] = (*v, *v);
    }

    // avoidance rows
    let node_times: Vec<f64> = (0..n).map(|k| h * k as f64).collect();
    for (oi, obs) in obstacles.iter().enumerate() {
        match (cfg.formulation, obs) {
            (Formulation::Rcoa, Obstacle::Rect(r)) => {
                let nodes: Vec<RcoaNode> = (0..n)
                    .map(|k| {
                        let s = idx.state(k).start;
                        RcoaNode {
                            x: s + 3,
                            y: s + 4,
                            g1: idx.gamma(k, 2 * oi),
                            g2: idx.gamma(k, 2 * oi + 1),
                            t: node_times[k],
                        }
                    })
                    .collect();
                let rows = oa::rcoa_constraints(
                    r,
                    cfg.directions[oi],
                    &big_m,
                    cfg.weights.gamma,
                    &nodes,
                )
                .map_err(|e| TranscribeError::Config(format!("{e}")))?;
                apply_oa_rows(&mut nlp, rows);
            }
            (Formulation::Rcoa, Obstacle::Moving(m)) => {
                let nodes: Vec<RcoaNode> = (0..n)
                    .map(|k| {
                        let s = idx.state(k).start;
                        RcoaNode {
                            x: s + 3,
                            y: s + 4,
                            g1: idx.gamma(k, 2 * oi),
                            g2: idx.gamma(k, 2 * oi + 1),
                            t: node_times[k],
                        }
                    })
                    .collect();
                let rows =
                    oa::rcoa_moving(m, cfg.directions[oi], &big_m, cfg.weights.gamma, &nodes)
                        .map_err(|e| TranscribeError::Config(format!("{e}")))?;
                apply_oa_rows(&mut nlp, rows);
            }
            (Formulation::Mioa, Obstacle::Rect(r)) => {
                let nodes: Vec<MioaNode> = (0..n)
                    .map(|k| {
                        let s = idx.state(k).start;
                        MioaNode {
                            x: s + 3,
                            y: s + 4,
                            g: [
                                idx.gamma(k, 4 * oi),
                                idx.gamma(k, 4 * oi + 1),
                                idx.gamma(k, 4 * oi + 2),
                                idx.gamma(k, 4 * oi + 3),
                            ],
                        }
                    })
                    .collect();
                let rows = oa::mioa_constraints(r, &big_m, &nodes)
                    .map_err(|e| TranscribeError::Config(format!("{e}")))?;
                for &(g, lo, hi) in &rows.gamma_bounds {
                    nlp.var_bounds[g] = (lo, hi);
                    nlp.integrality[g] = true;
                }
                for row in rows.rows {
                    nlp.lin_ineq.push(row);
                }
            }
            (Formulation::Eoa, Obstacle::Ellipse(e)) => {
                for k in 0..n {
                    let s = idx.state(k).start;
                    nlp.nl_ineq.push(oa::eoa_block(e, s + 3, s + 4));
                }
            }
            (f, o) => {
                return Err(TranscribeError::Config(format!(
                    "unsupported obstacle {o:?} under formulation {f:?}"
                )))
            }
        }
    }

    // dynamics defects and slip limits
    let dynamics: Arc<dyn Fn(&[f64], &[f64], &mut [f64]) + Send + Sync> = match cfg.dynamics {
        DynamicsMode::P1 => plant_dynamics(p, cfg.small_angle),
        DynamicsMode::P2 => reduced_dynamics(&p, cfg.initial.vx)?,
    };
    let substeps = cfg.horizon.substeps;
    for k in 0..n - 1 {
        let mut vars: Vec<usize> = idx.state(k).collect();
        vars.push(idx.steering(k));
        vars.extend(idx.state(k + 1));
        let f = dynamics.clone();
        let nxl = nx;
        nlp.nl_eq.push(NlBlock {
            rows: nx,
            vars,
            eval: Box::new(move |g, out| {
                let next = rk4_total(&*f, &g[..nxl], &g[nxl..nxl + 1], h, substeps);
                for i in 0..nxl {
                    out[i] = g[nxl + 1 + i] - next[i];
                }
            }),
        });
    }

    match cfg.dynamics {
        DynamicsMode::P1 => {
            // |alpha_i| <= alpha_sl,i as nonlinear rows over (state, steering)
            let a_sl_f = p.alpha_sl_front();
            let a_sl_r = p.alpha_sl_rear();
            let slip_mode = if cfg.small_angle {
                SlipModel::SmallAngle
            } else {
                SlipModel::Exact
            };
            for k in 0..n - 1 {
                let mut vars: Vec<usize> = idx.state(k).collect();
                vars.push(idx.steering(k));
                let params = p;
                nlp.nl_ineq.push(NlBlock {
                    rows: 4,
                    vars,
                    eval: Box::new(move |g, out| {
                        let s = BodyState {
                            vx: g[0].max(0.1),
                            vy: g[1],
                            q: g[2],
                            x: g[3],
                            y: g[4],
                            psi: g[5],
                        };
                        let (af, ar) =
                            slip_angles(&s, g[6], &params, slip_mode).expect("speed floored");
                        out[0] = af - a_sl_f;
                        out[1] = -af - a_sl_f;
                        out[2] = ar - a_sl_r;
                        out[3] = -ar - a_sl_r;
                    }),
                });
            }
        }
        DynamicsMode::P2 => {
            // |C alpha| <= mu Fz / 2 is linear at constant speed
            let u = cfg.initial.vx;
            let f_lim = p.mu * p.fz_front() / 2.0;
            let r_lim = p.mu * p.fz_rear() / 2.0;
            for k in 0..n - 1 {
                let s = idx.state(k).start;
                let d = idx.steering(k);
                let (vy, q) = (s, s + 1);
                // front: |C_f ((vy + a q)/u - delta)| <= f_lim
                let cf = p.c_f;
                nlp.lin_ineq.push(crate::program::SparseRow::new(
                    vec![(vy, cf / u), (q, cf * p.a / u), (d, -cf)],
                    f_lim,
                ));
                nlp.lin_ineq.push(crate::program::SparseRow::new(
                    vec![(vy, -cf / u), (q, -cf * p.a / u), (d, cf)],
                    f_lim,
                ));
                // rear: |C_r (vy - b q)/u| <= r_lim
                let cr = p.c_r;
                nlp.lin_ineq.push(crate::program::SparseRow::new(
                    vec![(vy, cr / u), (q, -cr * p.b / u)],
                    r_lim,
                ));
                nlp.lin_ineq.push(crate::program::SparseRow::new(
                    vec![(vy, -cr / u), (q, cr * p.b / u)],
                    r_lim,
                ));
            }
        }
    }

    // problem-aware integral assignment for the mixed-integer route:
    // activate the consistent nearest face per obstacle from the iterate's
    // node positions
    if cfg.formulation == Formulation::Mioa {
        let layout = idx.layout.clone();
        let boxes: Vec<crate::obstacle::RectObstacle> = obstacles
            .iter()
            .filter_map(|o| match o {
                Obstacle::Rect(r) => Some(*r),
                _ => None,
            })
            .collect();
        nlp.int_hint = Some(Box::new(move |x: &[f64]| {
            let mut out = x.to_vec();
            for (k, sr) in layout.node_state.iter().enumerate() {
                // both state layouts keep (X, Y) at slots 3 and 4
                let px = x[sr.start + 3];
                let py = x[sr.start + 4];
                let g0 = layout.node_gamma[k].start;
                for (oi, r) in boxes.iter().enumerate() {
                    let face = if px <= r.x_min + 1e-6 {
                        0
                    } else if px >= r.x_max - 1e-6 {
                        1
                    } else if (r.y_max - py).abs() < (py - r.y_min).abs() {
                        3
                    } else {
                        2
                    };
                    for i in 0..4 {
                        out[g0 + 4 * oi + i] = if i == face { 0.0 } else { 1.0 };
                    }
                }
            }
            out
        }));
    }

    // initial reference: straight rolling with zero steering
    let x_ref = initial_reference(cfg, &idx, &dynamics, &init, h, substeps, &obstacles, &big_m);

    Ok(OpenLoopProblem {
        nlp,
        x_ref,
        h,
        nx,
        gammas_per_node,
        obstacles,
        big_m,
    })
}

fn apply_oa_rows(nlp: &mut NlpProblem, rows: oa::OaRows) {
    for &(g, lo, hi) in &rows.gamma_bounds {
        nlp.var_bounds[g] = (lo, hi);
    }
    for &(g, w) in &rows.penalty {
        nlp.linear_cost[g] += w;
    }
    for row in rows.rows {
        nlp.lin_ineq.push(row);
    }
}

#[allow(clippy::too_many_arguments)]
fn initial_reference(
    cfg: &ScenarioConfig,
    idx: &Indexer,
    dynamics: &Arc<dyn Fn(&[f64], &[f64], &mut [f64]) + Send + Sync>,
    init: &[f64],
    h: f64,
    substeps: usize,
    obstacles: &[Obstacle],
    big_m: &BigM,
) -> Vec<f64> {
    let mut x = vec![0.0; idx.layout.n_vars];
    let mut state = init.to_vec();
    for k in 0..idx.n_nodes {
        x[idx.state(k)].copy_from_slice(&state);
        let (px, py) = match cfg.dynamics {
            DynamicsMode::P1 => (state[3], state[4]),
            DynamicsMode::P2 => (state[3], state[4]),
        };
        x[idx.aux(k, 0)] = py.abs();
        // steering-aux entries stay zero for the zero-steering rollout
        // minimal switch values demanded by the x rows
        let t = h * k as f64;
        match cfg.formulation {
            Formulation::Rcoa => {
                for (oi, obs) in obstacles.iter().enumerate() {
                    let world = match obs {
                        Obstacle::Rect(r) => *r,
                        Obstacle::Moving(m) => m.world_box(t),
                        Obstacle::Ellipse(_) => continue,
                    };
                    let mut g1 = ((world.x_min - px) / big_m.m1).clamp(0.0, 1.0);
                    let mut g2 = ((px - world.x_max) / big_m.m2).clamp(0.0, 1.0);
                    // cover the directional row as well so the reference
                    // satisfies every avoidance row
                    let need = match cfg.directions[oi] {
                        crate::oa::Direction::Above => (world.y_max - py) / big_m.m3,
                        crate::oa::Direction::Below => (py - world.y_min) / big_m.m3,
                    } - g1
                        - g2;
                    if need > 0.0 {
                        let room = (1.0 - g1 - g2).max(0.0);
                        let add = need.min(room);
                        if g1 >= g2 {
                            g1 = (g1 + add).min(1.0);
                        } else {
                            g2 = (g2 + add).min(1.0);
                        }
                    }
                    x[idx.gamma(k, 2 * oi)] = g1;
                    x[idx.gamma(k, 2 * oi + 1)] = g2;
                }
            }
            Formulation::Mioa => {
                for (oi, obs) in obstacles.iter().enumerate() {
                    if let Obstacle::Rect(r) = obs {
                        // activate exactly one face: the x face when the
                        // node sits clear of the band, otherwise the nearer
                        // y face; everything else is switched off
                        let face = if px <= r.x_min + 1e-6 {
                            0
                        } else if px >= r.x_max - 1e-6 {
                            1
                        } else if (r.y_max - py).abs() < (py - r.y_min).abs() {
                            3
                        } else {
                            2
                        };
                        for i in 0..4 {
                            x[idx.gamma(k, 4 * oi + i)] = if i == face { 0.0 } else { 1.0 };
                        }
                    }
                }
            }
            Formulation::Eoa => {}
        }
        if k + 1 < idx.n_nodes {
            state = rk4_total(&**dynamics, &state, &[0.0], h, substeps);
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{e1, e2, Formulation, SolveRoute};

    #[test]
    fn e1_rcoa_p1_shape() {
        let cfg = e1(Formulation::Rcoa, SolveRoute::Scvx);
        let prob = build_open_loop(&cfg).unwrap();
        let n = cfg.horizon.n;
        assert_eq!(prob.nx, 6);
        assert_eq!(prob.gammas_per_node, 6); // 3 obstacles x 2 switches
        assert_eq!(prob.nlp.layout.n_nodes(), n);
        // vars: 6 states + 6 gammas + |Y| aux per node, plus steering and
        // its epigraph aux on interval nodes
        assert_eq!(prob.nlp.n_vars, n * (6 + 6 + 1) + 2 * (n - 1));
        // 4 rows per obstacle per node + |Y| epigraph rows + |delta| rows
        assert_eq!(prob.nlp.lin_ineq.len(), n * 3 * 4 + n * 2 + 2 * (n - 1));
        assert_eq!(prob.nlp.nl_eq.len(), n - 1);
        assert_eq!(prob.nlp.nl_ineq.len(), n - 1); // slip blocks
        assert_eq!(prob.x_ref.len(), prob.nlp.n_vars);
        // defect residual of the straight-rolling reference is zero
        let (_, viol) = prob.nlp.penalized_objective(&prob.x_ref, 1.0);
        assert!(viol < 1e-9, "viol = {viol}");
    }

    #[test]
    fn e1_eoa_uses_quadratic_blocks_and_75_nodes() {
        let cfg = e1(Formulation::Eoa, SolveRoute::Scvx);
        let prob = build_open_loop(&cfg).unwrap();
        let n = cfg.horizon.n;
        assert_eq!(n, 75);
        assert_eq!(prob.gammas_per_node, 0);
        // 3 ellipse rows per node + slip blocks
        assert_eq!(prob.nlp.nl_ineq.len(), n * 3 + (n - 1));
        assert!(!prob.nlp.integrality.iter().any(|&b| b));
    }

    #[test]
    fn e1_mioa_marks_integer_switches() {
        let cfg = e1(Formulation::Mioa, SolveRoute::Hybrid);
        let prob = build_open_loop(&cfg).unwrap();
        let n_int = prob.nlp.integrality.iter().filter(|&&b| b).count();
        assert_eq!(n_int, 30 * 3 * 4);
        // switches carry no cost in the mixed-integer family
        for (j, &int) in prob.nlp.integrality.iter().enumerate() {
            if int {
                assert_eq!(prob.nlp.linear_cost[j], 0.0);
            }
        }
    }

    #[test]
    fn zero_obstacle_problem_is_pure_tracking() {
        let mut cfg = e1(Formulation::Rcoa, SolveRoute::Scvx);
        cfg.obstacles.clear();
        cfg.directions.clear();
        let prob = build_open_loop(&cfg).unwrap();
        assert_eq!(prob.gammas_per_node, 0);
        // only epigraph rows remain
        assert_eq!(
            prob.nlp.lin_ineq.len(),
            cfg.horizon.n * 2 + 2 * (cfg.horizon.n - 1)
        );
    }

    #[test]
    fn p2_uses_five_states_and_linear_slip_rows() {
        let mut cfg = e2(Formulation::Rcoa, SolveRoute::Scvx);
        cfg.dynamics = crate::scenario::DynamicsMode::P2;
        let prob = build_open_loop(&cfg).unwrap();
        let n = cfg.horizon.n;
        assert_eq!(prob.nx, 5);
        // slip-force rows are linear: 4 per interval on top of OA + epigraph
        assert_eq!(
            prob.nlp.lin_ineq.len(),
            n * 2 * 4 + n * 2 + 2 * (n - 1) + (n - 1) * 4
        );
        assert_eq!(prob.nlp.nl_ineq.len(), 0);
        assert_eq!(prob.nlp.nl_eq.len(), n - 1);
    }

    #[test]
    fn initial_state_is_pinned() {
        let cfg = e1(Formulation::Rcoa, SolveRoute::Scvx);
        let prob = build_open_loop(&cfg).unwrap();
        let s0 = prob.nlp.layout.node_state[0].clone();
        assert_eq!(prob.nlp.var_bounds[s0.start], (15.0, 15.0));
        assert_eq!(prob.nlp.var_bounds[s0.start + 3], (-15.0, -15.0));
    }
}
