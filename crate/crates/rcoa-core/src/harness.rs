//! Scenario harness: open-loop benchmark runs, the feasibility-correction
//! pipeline, the closed-loop controller simulation, and direction
//! enumeration, together with trajectory containers and intrusion metrics.
//!
//! Everything here is pure computation; wall-clock timing is injected
//! through [`TimeSource`] so reports carry timings without the crate
//! touching a clock.

use crate::nlp::NlpProblem;
use crate::oa::{correction_flags, enumerate_subproblems, Direction};
use crate::obstacle::{Obstacle, PositionTrace};
use crate::scenario::{Formulation, ScenarioConfig, SolveRoute};
use crate::solver::{
    hybrid_solve, scvx_solve, smilp_solve, ScvxParams, SolveError, SolveReport, SolveStatus,
};
use crate::transcribe::{
    build_mpc_step, build_open_loop, mpc_dynamics, mpc_reference, rk4_total, MpcPhase,
    MpcStepInput, OpenLoopProblem, TranscribeError, MPC_NU, MPC_NX,
};
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use thiserror::Error;

/// Monotonic clock injected by the caller; the default reports zeros.
pub trait TimeSource {
    /// Seconds since an arbitrary fixed origin.
    fn now(&self) -> f64;
}

/// Clock stub for timing-free runs.
pub struct NoClock;

impl TimeSource for NoClock {
    fn now(&self) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("solver error: {0}")]
    Solver(#[from] SolveError),
    #[error("plant integration diverged at step {0}")]
    PlantBlowup(usize),
    #[error("controller infeasible at step {0}")]
    ControllerInfeasible(usize),
    #[error("no obstacle-free trajectory exists under the pinned switches")]
    CorrectedInfeasible,
    #[error("every direction assignment was infeasible")]
    AllInfeasible,
}

impl From<TranscribeError> for HarnessError {
    fn from(e: TranscribeError) -> Self {
        HarnessError::Config(format!("{e}"))
    }
}

impl From<crate::scenario::ValidationError> for HarnessError {
    fn from(e: crate::scenario::ValidationError) -> Self {
        HarnessError::Config(format!("{e}"))
    }
}

/// Time-stamped plant trajectory: states at controller nodes, applied
/// inputs, solver switch values, and the dense resample between nodes.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// Plant state at each node (6 entries open loop, 11 closed loop).
    pub states: Vec<Vec<f64>>,
    /// Applied input per interval.
    pub inputs: Vec<Vec<f64>>,
    /// Switch values per node as reported by the solver (may be empty).
    pub gammas: Vec<Vec<f64>>,
    /// Dense plant samples including the nodes.
    pub dense: Vec<(f64, Vec<f64>)>,
}

impl Trajectory {
    /// Planar position trace using the state layout's X/Y slots.
    pub fn position_trace(&self, x_idx: usize, y_idx: usize) -> PositionTrace {
        PositionTrace {
            nodes: self
                .times
                .iter()
                .zip(&self.states)
                .map(|(&t, s)| (t, (s[x_idx], s[y_idx])))
                .collect(),
            dense: self
                .dense
                .iter()
                .map(|(t, s)| (*t, (s[x_idx], s[y_idx])))
                .collect(),
        }
    }
}

/// Outcome of a harness run.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RunReport {
    #[cfg_attr(feature = "serde", serde(skip))]
    pub solves: Vec<SolveReport>,
    pub status: SolveStatus,
    pub objective: f64,
    pub solver_iterations: usize,
    pub node_penetration: f64,
    pub intersample_penetration: f64,
    pub min_clearance: f64,
    /// L1 path error accumulated over the nodes.
    pub tracking_cost: f64,
    /// Seconds spent inside solver calls.
    pub solve_time: f64,
    /// End-to-end seconds for the run.
    pub total_time: f64,
}

impl RunReport {
    fn from_solves(solves: Vec<SolveReport>) -> Self {
        let status = solves.last().map(|r| r.status).unwrap_or(SolveStatus::Optimal);
        let objective = solves.last().map(|r| r.objective).unwrap_or(f64::NAN);
        let iters = solves.iter().map(|r| r.iterations).sum();
        RunReport {
            solves,
            status,
            objective,
            solver_iterations: iters,
            node_penetration: 0.0,
            intersample_penetration: 0.0,
            min_clearance: f64::INFINITY,
            tracking_cost: 0.0,
            solve_time: 0.0,
            total_time: 0.0,
        }
    }

    fn score(
        &mut self,
        traj: &Trajectory,
        obstacles: &[Obstacle],
        x_idx: usize,
        y_idx: usize,
        err_idx: usize,
    ) {
        let trace = traj.position_trace(x_idx, y_idx);
        self.node_penetration = trace.node_penetration(obstacles);
        self.intersample_penetration = trace.intersample_penetration(obstacles);
        self.min_clearance =
            crate::obstacle::min_clearance(trace.dense.iter().copied(), obstacles);
        self.tracking_cost = traj.states.iter().map(|s| s[err_idx].abs()).sum();
    }
}

fn dense_rollout(
    f: &(dyn Fn(&[f64], &[f64], &mut [f64]) + Sync),
    x0: &[f64],
    inputs: &[Vec<f64>],
    h: f64,
    substeps: usize,
    t0: f64,
) -> Result<(Vec<Vec<f64>>, Vec<(f64, Vec<f64>)>), HarnessError> {
    let hs = h / substeps as f64;
    let mut nodes = Vec::with_capacity(inputs.len() + 1);
    let mut dense = Vec::with_capacity(inputs.len() * substeps + 1);
    let mut state = x0.to_vec();
    nodes.push(state.clone());
    dense.push((t0, state.clone()));
    for (k, u) in inputs.iter().enumerate() {
        for j in 0..substeps {
            state = rk4_total(f, &state, u, hs, 1);
            if state.iter().any(|v| !v.is_finite() || v.abs() > 1e9) {
                return Err(HarnessError::PlantBlowup(k));
            }
            let t = t0 + h * k as f64 + hs * (j + 1) as f64;
            dense.push((t, state.clone()));
        }
        nodes.push(state.clone());
    }
    Ok((nodes, dense))
}

fn solve_route(
    nlp: &NlpProblem,
    x_ref: &[f64],
    params: &ScvxParams,
    route: SolveRoute,
) -> Result<(Vec<f64>, SolveReport), SolveError> {
    match route {
        SolveRoute::Scvx => scvx_solve(nlp, x_ref, params),
        SolveRoute::Smilp => smilp_solve(nlp, x_ref, params),
        SolveRoute::Hybrid => hybrid_solve(nlp, x_ref, params),
    }
}

fn check_route(cfg: &ScenarioConfig, route: SolveRoute) -> Result<(), HarnessError> {
    match (cfg.formulation, route) {
        (Formulation::Mioa, SolveRoute::Scvx) => Err(HarnessError::Config(String::from(
            "the mixed-integer formulation needs the smilp or hybrid route",
        ))),
        _ => Ok(()),
    }
}

/// Solves an open-loop scenario and forward-simulates the full nonlinear
/// plant under the optimal steering, reporting intrusion metrics.
pub fn run_open_loop(
    cfg: &ScenarioConfig,
    route: SolveRoute,
    clock: &dyn TimeSource,
) -> Result<(Trajectory, RunReport), HarnessError> {
    check_route(cfg, route)?;
    let t_start = clock.now();
    let prob = build_open_loop(cfg)?;
    let (traj, mut report) = solve_and_simulate(cfg, &prob, route, clock)?;
    report.total_time = clock.now() - t_start;
    Ok((traj, report))
}

fn solve_and_simulate(
    cfg: &ScenarioConfig,
    prob: &OpenLoopProblem,
    route: SolveRoute,
    clock: &dyn TimeSource,
) -> Result<(Trajectory, RunReport), HarnessError> {
    let params = cfg.solver.to_params();
    let t0 = clock.now();
    let (sol, mut solve_report) = solve_route(&prob.nlp, &prob.x_ref, &params, route)?;
    solve_report.wall_time = clock.now() - t0;
    let usable = matches!(
        solve_report.status,
        SolveStatus::Optimal | SolveStatus::IterLimit | SolveStatus::Stalled
    );
    let mut report = RunReport::from_solves(vec![solve_report]);
    report.solve_time = report.solves.iter().map(|r| r.wall_time).sum();
    if !usable {
        return Ok((Trajectory::default(), report));
    }

    let traj = simulate_open_loop(cfg, prob, &sol)?;
    report.score(&traj, &prob.obstacles, 3, 4, 4);
    Ok((traj, report))
}

/// Rolls the full nonlinear plant forward under the solved steering
/// sequence and packages the trajectory.
fn simulate_open_loop(
    cfg: &ScenarioConfig,
    prob: &OpenLoopProblem,
    sol: &[f64],
) -> Result<Trajectory, HarnessError> {
    let n = cfg.horizon.n;
    let h = prob.h;
    let unpacked = prob.nlp.layout.unpack(sol);
    let inputs: Vec<Vec<f64>> = unpacked.inputs.clone();
    let f = crate::transcribe::openloop_plant(cfg);
    let x0 = vec![
        cfg.initial.vx,
        cfg.initial.vy,
        cfg.initial.q,
        cfg.initial.x,
        cfg.initial.y,
        cfg.initial.psi,
    ];
    let (states, dense) = dense_rollout(&*f, &x0, &inputs, h, cfg.horizon.substeps, 0.0)?;
    Ok(Trajectory {
        times: (0..n).map(|k| h * k as f64).collect(),
        states,
        inputs,
        gammas: unpacked.gammas,
        dense,
    })
}

/// Feasibility correction: the soft avoidance run is re-solved with the
/// switches pinned to zero at every node inside an activation band,
/// converting the conditional statements into hard rows. The flag set is
/// iterated to a fixed point so nodes that drift into a band during the
/// re-solve are pinned as well.
pub fn run_correction(
    cfg: &ScenarioConfig,
    clock: &dyn TimeSource,
) -> Result<((Trajectory, RunReport), (Trajectory, RunReport)), HarnessError> {
    if cfg.formulation != Formulation::Rcoa {
        return Err(HarnessError::Config(String::from(
            "feasibility correction applies to the relaxed formulation",
        )));
    }
    let (initial_traj, initial_report) = run_open_loop(cfg, SolveRoute::Scvx, clock)?;
    if !matches!(
        initial_report.status,
        SolveStatus::Optimal | SolveStatus::IterLimit
    ) {
        return Err(HarnessError::CorrectedInfeasible);
    }

    let raw = cfg.raw_obstacles()?;
    let mut flagged: Vec<(usize, usize)> = Vec::new();
    let mut current = initial_traj.clone();
    let mut warm: Option<Vec<f64>> = None;
    let mut corrected: Option<(Trajectory, RunReport)> = None;

    for _pass in 0..6 {
        let trace = current.position_trace(3, 4);
        let mut flags = correction_flags(&trace.nodes, &raw);
        flags.extend(flagged.iter().copied());
        flags.sort_unstable();
        flags.dedup();
        if flags == flagged && corrected.is_some() {
            break;
        }
        flagged = flags;

        let mut prob = build_open_loop(cfg)?;
        for &(node, obs) in &flagged {
            let g = prob.nlp.layout.node_gamma[node].clone();
            let base = g.start + 2 * obs;
            prob.nlp.var_bounds[base] = (0.0, 0.0);
            prob.nlp.var_bounds[base + 1] = (0.0, 0.0);
        }
        let params = cfg.solver.to_params();
        let x_ref: Vec<f64> = warm.clone().unwrap_or_else(|| initial_solution_ref(&prob));
        let t0 = clock.now();
        let (sol, mut rep) = scvx_solve(&prob.nlp, &x_ref, &params)?;
        rep.wall_time = clock.now() - t0;
        if rep.status == SolveStatus::Infeasible {
            return Err(HarnessError::CorrectedInfeasible);
        }
        let traj = simulate_open_loop(cfg, &prob, &sol)?;
        let mut report = RunReport::from_solves(vec![rep]);
        report.solve_time = report.solves.iter().map(|r| r.wall_time).sum();
        report.score(&traj, &prob.obstacles, 3, 4, 4);
        warm = Some(sol);
        current = traj.clone();
        corrected = Some((traj, report));
    }

    Ok((
        (initial_traj, initial_report),
        corrected.ok_or(HarnessError::CorrectedInfeasible)?,
    ))
}

fn initial_solution_ref(prob: &OpenLoopProblem) -> Vec<f64> {
    prob.x_ref.clone()
}

/// Closed-loop simulation: solve the avoidance problem, apply the first
/// free input for one period, refresh the state from the plant, and pin the
/// applied input as the next initial input condition. Switches permanently
/// to the tracking problem once the obstacle has passed.
pub fn run_mpc(
    cfg: &ScenarioConfig,
    clock: &dyn TimeSource,
) -> Result<(Trajectory, RunReport), HarnessError> {
    let mpc_cfg = cfg
        .mpc
        .ok_or_else(|| HarnessError::Config(String::from("scenario has no mpc block")))?;
    let t_start = clock.now();
    let h = cfg.horizon.step();
    let params = cfg.solver.to_params();
    let dynamics = mpc_dynamics(cfg)?;
    let obstacles = cfg.effective_obstacles()?;
    let (local_box, _velocity, pose0) = match cfg
        .obstacles
        .iter()
        .find_map(|s| match s.to_obstacle() {
            Ok(Obstacle::Moving(m)) => Some(m),
            _ => None,
        }) {
        Some(m) => (m.local, m.velocity, m.pose0),
        None => {
            return Err(HarnessError::Config(String::from(
                "closed-loop scenario requires a moving obstacle",
            )))
        }
    };

    let mut state = [0.0; MPC_NX];
    state[0] = cfg.initial.vx;
    state[1] = cfg.initial.vy;
    state[2] = cfg.initial.q;
    state[3] = cfg.initial.x;
    state[4] = cfg.initial.y;
    state[5] = cfg.initial.psi;
    state[6] = mpc_cfg.frenet0.0;
    state[7] = mpc_cfg.frenet0.1;
    state[8] = mpc_cfg.frenet0.2;
    state[9] = pose0.0;
    state[10] = pose0.1;
    let mut prev_u = [
        mpc_cfg.inputs0.0,
        mpc_cfg.inputs0.1,
        mpc_cfg.inputs0.2,
    ];

    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![state.to_vec()],
        inputs: Vec::new(),
        gammas: Vec::new(),
        dense: vec![(0.0, state.to_vec())],
    };
    let mut solves: Vec<SolveReport> = Vec::new();
    let mut solve_time = 0.0;
    let mut plan: Vec<[f64; MPC_NU]> = vec![[0.0; MPC_NU]; cfg.horizon.n - 1];
    let mut phase = MpcPhase::Avoidance;
    let max_steps = (mpc_cfg.t_max / h) as usize;

    for step in 0..max_steps {
        if phase == MpcPhase::Avoidance && state[9] + local_box.x_max < state[3] - mpc_cfg.passed_margin
        {
            phase = MpcPhase::Tracking;
        }
        let step_input = MpcStepInput {
            state,
            prev_inputs: prev_u,
        };
        let prob = build_mpc_step(cfg, phase, &step_input)?;
        let x_ref = mpc_reference(cfg, &prob, &state, &plan)?;
        let t0 = clock.now();
        let (sol, rep) = scvx_solve(&prob.nlp, &x_ref, &params)?;
        solve_time += clock.now() - t0;
        let usable = matches!(rep.status, SolveStatus::Optimal | SolveStatus::IterLimit);
        solves.push(rep);
        if !usable {
            return Err(HarnessError::ControllerInfeasible(step));
        }
        let unpacked = prob.nlp.layout.unpack(&sol);
        // apply the first free input (index 0 is pinned to the previous one)
        let u_next = &unpacked.inputs[1];
        let u_apply = [u_next[0], u_next[1], u_next[2]];
        let (nodes, dense) = dense_rollout(
            &*dynamics,
            &state,
            &[u_apply.to_vec()],
            h,
            cfg.horizon.substeps,
            h * step as f64,
        )?;
        state.copy_from_slice(&nodes[1]);
        traj.times.push(h * (step + 1) as f64);
        traj.states.push(state.to_vec());
        traj.inputs.push(u_apply.to_vec());
        traj.gammas.push(unpacked.gammas.first().cloned().unwrap_or_default());
        traj.dense.extend(dense.into_iter().skip(1));
        prev_u = u_apply;
        // shift the plan for the next warm start
        plan.clear();
        plan.extend(
            unpacked
                .inputs
                .iter()
                .skip(2)
                .map(|u| [u[0], u[1], u[2]]),
        );
        let tail = *plan.last().unwrap_or(&[0.0; MPC_NU]);
        plan.push(tail);
        plan.push(tail);

        if state[6] >= mpc_cfg.stop_s {
            break;
        }
    }

    let mut report = RunReport::from_solves(solves);
    report.solve_time = solve_time;
    report.score(&traj, &obstacles, 3, 4, 7);
    report.total_time = clock.now() - t_start;
    Ok((traj, report))
}

/// Solves every above/below assignment and returns the best feasible run
/// plus the per-subproblem table. Ties within `1e-6` relative cost resolve
/// to the lexicographically smallest tuple.
pub fn run_direction_enumeration(
    cfg: &ScenarioConfig,
    clock: &dyn TimeSource,
) -> Result<(Trajectory, RunReport, Vec<(Vec<Direction>, SolveReport)>), HarnessError> {
    if cfg.formulation != Formulation::Rcoa {
        return Err(HarnessError::Config(String::from(
            "direction enumeration applies to the relaxed formulation",
        )));
    }
    if cfg.obstacles.len() > 8 {
        return Err(HarnessError::Config(String::from(
            "enumeration supports at most 8 obstacles",
        )));
    }
    let assignments = enumerate_subproblems(cfg.obstacles.len());
    let mut table: Vec<(Vec<Direction>, SolveReport)> = Vec::new();
    let mut best: Option<(usize, f64)> = None;
    for (i, dirs) in assignments.iter().enumerate() {
        let mut sub = cfg.clone();
        sub.directions = dirs.clone();
        let prob = build_open_loop(&sub)?;
        let params = sub.solver.to_params();
        let t0 = clock.now();
        let (_, mut rep) = scvx_solve(&prob.nlp, &prob.x_ref, &params)?;
        rep.wall_time = clock.now() - t0;
        let candidate = rep.status == SolveStatus::Optimal;
        let obj = rep.objective;
        table.push((dirs.clone(), rep));
        if candidate {
            best = match best {
                None => Some((i, obj)),
                Some((bi, bobj)) => {
                    let tol = 1e-6 * bobj.abs().max(1.0);
                    if obj < bobj - tol {
                        Some((i, obj))
                    } else {
                        // ties keep the earlier (lexicographically smaller) tuple
                        Some((bi, bobj))
                    }
                }
            };
        }
    }
    let (winner, _) = best.ok_or(HarnessError::AllInfeasible)?;
    let mut win_cfg = cfg.clone();
    win_cfg.directions = assignments[winner].clone();
    let (traj, report) = run_open_loop(&win_cfg, SolveRoute::Scvx, clock)?;
    Ok((traj, report, table))
}

/// Plant dynamics accessor shared with the transcription (re-exported for
/// the CLI crate).
pub fn open_loop_plant(
    cfg: &ScenarioConfig,
) -> Arc<dyn Fn(&[f64], &[f64], &mut [f64]) + Send + Sync> {
    crate::transcribe::openloop_plant(cfg)
}
