//! Scenario configuration: vehicle, path, obstacles, horizon, formulation,
//! weights, bounds and solver tuning, plus the named built-in scenarios
//! used by the benchmark suite.
//!
//! The structure mirrors the scenario file schema one-to-one; the companion
//! CLI crate (de)serializes it as JSON with unknown keys rejected.

use crate::frenet::PathSegment;
use crate::oa::Direction;
use crate::obstacle::{ellipse_from_rect, MovingObstacle, Obstacle, RectObstacle};
use crate::solver::{LpParams, ScvxParams};
use crate::vehicle::VehicleParams;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

/// Obstacle-avoidance constraint family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Formulation {
    /// Relaxed convex rows with penalized switches.
    Rcoa,
    /// Mixed-integer exclusion rows.
    Mioa,
    /// Elliptical keep-out rows.
    Eoa,
}

/// Dynamics fidelity of the transcribed problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum DynamicsMode {
    /// Nonlinear 3-DOF bicycle with brush tires.
    P1,
    /// Constant-speed linear single-track model plus the nonlinear pose map.
    P2,
}

/// Solver route for a scenario run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SolveRoute {
    Scvx,
    Smilp,
    Hybrid,
}

/// Prediction horizon: length, node count, and RK4 substeps per interval.
/// The node step is `t / n`; the same substep count drives the plant
/// integration so defects and simulation agree exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct Horizon {
    pub t: f64,
    pub n: usize,
    pub substeps: usize,
}

impl Horizon {
    pub fn step(&self) -> f64 {
        self.t / self.n as f64
    }
}

/// Initial body state.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct InitialState {
    pub vx: f64,
    pub vy: f64,
    pub q: f64,
    pub x: f64,
    pub y: f64,
    pub psi: f64,
}

/// Cost weights. `gamma` is the open-loop switch penalty; the remaining
/// fields weight the closed-loop objective terms.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct Weights {
    /// Open-loop penalty on the relaxed switches.
    pub gamma: f64,
    /// Path-error weight (closed loop).
    pub path_error: f64,
    /// Switch penalty (closed loop).
    pub gamma_mpc: f64,
    /// Front slip-ratio regularization.
    pub kappa_f: f64,
    /// Rear slip-ratio regularization.
    pub kappa_r: f64,
    /// Steering regularization.
    pub steering: f64,
}

impl Default for Weights {
    fn default() -> Self {
        Weights {
            gamma: 1e3,
            path_error: 10.0,
            gamma_mpc: 1e3,
            kappa_f: 1.0,
            kappa_r: 1.0,
            steering: 0.1,
        }
    }
}

/// Input and speed limits.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct Limits {
    pub u_min: f64,
    pub u_max: f64,
    /// Desired cruise speed restored by the tracking controller.
    pub u_des: f64,
    /// Steering magnitude bound (rad).
    pub delta_max: f64,
    /// Steering rate bound (rad/s).
    pub delta_rate_max: f64,
    /// Steering acceleration bound (rad/s^2).
    pub delta_accel_max: f64,
    /// Front slip-ratio magnitude bound.
    pub kappa_f_max: f64,
    /// Rear slip-ratio magnitude bound (braking only: kappa_r <= 0).
    pub kappa_r_max: f64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            u_min: 0.5,
            u_max: 20.0,
            u_des: 15.0,
            delta_max: 35.0 * core::f64::consts::PI / 180.0,
            delta_rate_max: 60.0 * core::f64::consts::PI / 180.0,
            delta_accel_max: 600.0 * core::f64::consts::PI / 180.0,
            kappa_f_max: 0.3,
            kappa_r_max: 0.3,
        }
    }
}

/// Reference path: origin pose plus segments.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct PathSpec {
    pub origin: (f64, f64, f64),
    pub segments: Vec<PathSegment>,
}

impl PathSpec {
    pub fn straight_x(length: f64) -> Self {
        PathSpec {
            origin: (0.0, 0.0, 0.0),
            segments: vec![PathSegment::Straight { length }],
        }
    }

    pub fn build(&self) -> Result<crate::frenet::ReferencePath, crate::frenet::FrenetError> {
        crate::frenet::ReferencePath::new(self.origin, &self.segments)
    }
}

/// Serializable obstacle description.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "type", rename_all = "snake_case"))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub enum ObstacleSpec {
    Rect {
        v_ll: (f64, f64),
        v_ur: (f64, f64),
    },
    Ellipse {
        center: (f64, f64),
        radii: (f64, f64),
    },
    /// Rectangle in the obstacle-local frame, translating at constant
    /// velocity from `pose0`.
    Moving {
        v_ll: (f64, f64),
        v_ur: (f64, f64),
        pose0: (f64, f64),
        velocity: (f64, f64),
    },
}

impl ObstacleSpec {
    pub fn to_obstacle(&self) -> Result<Obstacle, ValidationError> {
        match *self {
            ObstacleSpec::Rect { v_ll, v_ur } => RectObstacle::from_vertices(v_ll, v_ur)
                .map(Obstacle::Rect)
                .map_err(|e| ValidationError::new("obstacles", format!("{e}"))),
            ObstacleSpec::Ellipse { center, radii } => {
                crate::obstacle::EllipseObstacle::axis_aligned(center, radii.0, radii.1)
                    .map(Obstacle::Ellipse)
                    .map_err(|e| ValidationError::new("obstacles", format!("{e}")))
            }
            ObstacleSpec::Moving {
                v_ll,
                v_ur,
                pose0,
                velocity,
            } => RectObstacle::from_vertices(v_ll, v_ur)
                .map(|local| {
                    Obstacle::Moving(MovingObstacle {
                        local,
                        pose0,
                        velocity,
                    })
                })
                .map_err(|e| ValidationError::new("obstacles", format!("{e}"))),
        }
    }

    /// Obstacle as seen by a formulation: the elliptical family inscribes
    /// rectangles into ellipses with radii equal to the half extents.
    pub fn effective(&self, formulation: Formulation) -> Result<Obstacle, ValidationError> {
        let obs = self.to_obstacle()?;
        Ok(match (formulation, obs) {
            (Formulation::Eoa, Obstacle::Rect(r)) => Obstacle::Ellipse(ellipse_from_rect(&r)),
            (_, o) => o,
        })
    }
}

/// Serializable solver tuning mirroring [`ScvxParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct SolverConfig {
    pub delta0: f64,
    pub shrink: f64,
    pub grow: f64,
    pub rho0: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub elastic_weight: f64,
    pub merit_weight: f64,
    pub eps: f64,
    pub slack_tol: f64,
    pub stall_factor: f64,
    pub max_iter: usize,
    pub signed_ratio: bool,
    pub node_limit: usize,
    pub lp_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let p = ScvxParams::default();
        SolverConfig {
            delta0: p.delta0,
            shrink: p.shrink,
            grow: p.grow,
            rho0: p.rho0,
            rho1: p.rho1,
            rho2: p.rho2,
            elastic_weight: p.elastic_weight,
            merit_weight: p.merit_weight,
            eps: p.eps,
            slack_tol: p.slack_tol,
            stall_factor: p.stall_factor,
            max_iter: p.max_iter,
            signed_ratio: p.signed_ratio,
            node_limit: p.node_limit,
            lp_tol: p.lp.tol,
        }
    }
}

impl SolverConfig {
    pub fn to_params(&self) -> ScvxParams {
        ScvxParams {
            delta0: self.delta0,
            shrink: self.shrink,
            grow: self.grow,
            rho0: self.rho0,
            rho1: self.rho1,
            rho2: self.rho2,
            elastic_weight: self.elastic_weight,
            merit_weight: self.merit_weight,
            eps: self.eps,
            slack_tol: self.slack_tol,
            stall_factor: self.stall_factor,
            max_iter: self.max_iter,
            signed_ratio: self.signed_ratio,
            node_limit: self.node_limit,
            lp: LpParams {
                tol: self.lp_tol,
                ..LpParams::default()
            },
            ..ScvxParams::default()
        }
    }
}

/// Closed-loop simulation settings.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct MpcConfig {
    /// Frenet initial condition `(s, e, psi_bar)`.
    pub frenet0: (f64, f64, f64),
    /// Input initial condition `(delta, kappa_f, kappa_r)`.
    pub inputs0: (f64, f64, f64),
    /// Margin (m) behind the vehicle at which the obstacle counts as
    /// passed and the controller switches to pure tracking.
    pub passed_margin: f64,
    /// Arc length at which the run ends (vehicle has cleared the exit).
    pub stop_s: f64,
    /// Hard wall-clock cap on simulated time (s).
    pub t_max: f64,
}

impl Default for MpcConfig {
    fn default() -> Self {
        MpcConfig {
            frenet0: (0.0, 0.0, 0.0),
            inputs0: (0.0, 0.0, 0.0),
            passed_margin: 1.0,
            stop_s: 33.0,
            t_max: 8.0,
        }
    }
}

/// Field-path diagnostics for scenario validation.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationError {
    pub path: String,
    pub message: String,
}

impl ValidationError {
    pub fn new(path: &str, message: String) -> Self {
        ValidationError {
            path: String::from(path),
            message,
        }
    }
}

impl core::fmt::Display for ValidationError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

/// Complete description of a runnable scenario.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct ScenarioConfig {
    pub name: String,
    /// Free-form remarks carried in scenario files (for example which
    /// values are toolkit defaults rather than measured data).
    #[cfg_attr(feature = "serde", serde(default))]
    pub notes: Vec<String>,
    pub vehicle: VehicleParams,
    pub path: PathSpec,
    pub obstacles: Vec<ObstacleSpec>,
    /// Per-obstacle avoidance side for the relaxed formulation.
    pub directions: Vec<Direction>,
    pub horizon: Horizon,
    pub dynamics: DynamicsMode,
    pub formulation: Formulation,
    pub initial: InitialState,
    pub weights: Weights,
    pub bounds: Limits,
    pub solver: SolverConfig,
    /// Apply the small-angle slip kinematics.
    pub small_angle: bool,
    /// Big-M override; auto-sized from the position range when absent.
    #[cfg_attr(feature = "serde", serde(default))]
    pub big_m: Option<f64>,
    /// Present for closed-loop scenarios.
    #[cfg_attr(feature = "serde", serde(default))]
    pub mpc: Option<MpcConfig>,
}

impl ScenarioConfig {
    /// Structural and cross-field validation with field paths.
    pub fn validate(&self) -> Result<(), ValidationError> {
        self.vehicle
            .validate()
            .map_err(|e| ValidationError::new("vehicle", format!("{e}")))?;
        if !(self.horizon.t > 0.0) {
            return Err(ValidationError::new("horizon.t", String::from("must be positive")));
        }
        if self.horizon.n < 2 {
            return Err(ValidationError::new("horizon.n", String::from("need at least 2 nodes")));
        }
        if self.horizon.substeps < 1 {
            return Err(ValidationError::new(
                "horizon.substeps",
                String::from("need at least 1 substep"),
            ));
        }
        for (i, spec) in self.obstacles.iter().enumerate() {
            spec.to_obstacle().map_err(|e| {
                ValidationError::new(&format!("obstacles[{i}]"), e.message)
            })?;
        }
        if self.formulation == Formulation::Rcoa && self.directions.len() != self.obstacles.len() {
            return Err(ValidationError::new(
                "directions",
                format!(
                    "expected one direction per obstacle ({}), got {}",
                    self.obstacles.len(),
                    self.directions.len()
                ),
            ));
        }
        if !(self.bounds.u_min < self.bounds.u_max) {
            return Err(ValidationError::new(
                "bounds.u_min",
                String::from("u_min must be below u_max"),
            ));
        }
        if !(self.initial.vx > 0.0) {
            return Err(ValidationError::new(
                "initial.vx",
                String::from("initial speed must be positive"),
            ));
        }
        if !(self.bounds.delta_max > 0.0) {
            return Err(ValidationError::new(
                "bounds.delta_max",
                String::from("must be positive"),
            ));
        }
        let weight_fields = [
            (self.weights.gamma, "weights.gamma"),
            (self.weights.path_error, "weights.path_error"),
            (self.weights.gamma_mpc, "weights.gamma_mpc"),
            (self.weights.kappa_f, "weights.kappa_f"),
            (self.weights.kappa_r, "weights.kappa_r"),
            (self.weights.steering, "weights.steering"),
        ];
        for (w, path) in weight_fields {
            if !(w >= 0.0) || !w.is_finite() {
                return Err(ValidationError::new(path, String::from("must be nonnegative")));
            }
        }
        if let Some(m) = self.big_m {
            if !(m > 0.0) {
                return Err(ValidationError::new("big_m", String::from("must be positive")));
            }
        }
        self.path
            .build()
            .map_err(|e| ValidationError::new("path", format!("{e}")))?;
        Ok(())
    }

    /// Effective obstacle list under the configured formulation.
    pub fn effective_obstacles(&self) -> Result<Vec<Obstacle>, ValidationError> {
        self.obstacles
            .iter()
            .map(|s| s.effective(self.formulation))
            .collect()
    }

    /// Raw (rectangular) obstacle list regardless of formulation.
    pub fn raw_obstacles(&self) -> Result<Vec<Obstacle>, ValidationError> {
        self.obstacles.iter().map(|s| s.to_obstacle()).collect()
    }
}

fn e1_obstacles() -> Vec<ObstacleSpec> {
    vec![
        ObstacleSpec::Rect {
            v_ll: (-1.0, -4.0),
            v_ur: (1.0, 1.25),
        },
        ObstacleSpec::Rect {
            v_ll: (11.0, 0.0),
            v_ur: (13.0, 8.0),
        },
        ObstacleSpec::Rect {
            v_ll: (25.0, -4.0),
            v_ur: (27.0, 1.75),
        },
    ]
}

/// Node counts per environment and formulation for the successive routes.
fn cluttered_nodes(env: &str, formulation: Formulation) -> usize {
    match (env, formulation) {
        ("E1", Formulation::Eoa) => 75,
        ("E1", _) => 30,
        _ => 34, // E2 family
    }
}

fn cluttered_base(name: &str, formulation: Formulation, t: f64, x0: f64) -> ScenarioConfig {
    ScenarioConfig {
        name: String::from(name),
        notes: vec![String::from(
            "friction, axle loads, switch penalty and solver tuning are toolkit defaults",
        )],
        vehicle: VehicleParams::default(),
        path: PathSpec::straight_x(80.0),
        obstacles: Vec::new(),
        directions: Vec::new(),
        horizon: Horizon {
            t,
            n: 30,
            substeps: 50,
        },
        dynamics: DynamicsMode::P1,
        formulation,
        initial: InitialState {
            vx: 15.0,
            x: x0,
            ..Default::default()
        },
        weights: Weights {
            path_error: 1.0,
            // switch-penalty slope must clearly dominate the per-meter path
            // cost for hard avoidance at the auto-sized big-M scale
            gamma: 4e3,
            steering: 2.0,
            ..Default::default()
        },
        bounds: Limits {
            u_max: 40.0,
            ..Default::default()
        },
        solver: SolverConfig {
            max_iter: 400,
            ..Default::default()
        },
        small_angle: true,
        big_m: None,
        mpc: None,
    }
}

/// Cluttered environment with tall, narrow obstacles.
pub fn e1(formulation: Formulation, _route: SolveRoute) -> ScenarioConfig {
    let mut cfg = cluttered_base("E1", formulation, 3.5, -15.0);
    cfg.obstacles = e1_obstacles();
    cfg.directions = vec![Direction::Above, Direction::Below, Direction::Above];
    cfg.horizon.n = cluttered_nodes("E1", formulation);
    if formulation == Formulation::Mioa {
        // budgeted trees: each subproblem keeps its best incumbent, and the
        // fixed-binary refinement phase polishes the positions
        cfg.solver.node_limit = 60;
        cfg.solver.max_iter = 24;
    }
    cfg
}

/// Near-infeasible variant of the first environment: obstacle 1 grows to
/// the same height as obstacle 3.
pub fn c2(formulation: Formulation, route: SolveRoute) -> ScenarioConfig {
    let mut cfg = e1(formulation, route);
    cfg.name = String::from("C2");
    cfg.obstacles[0] = ObstacleSpec::Rect {
        v_ll: (-1.0, -4.0),
        v_ur: (1.0, 1.75),
    };
    cfg
}

/// Cluttered environment with short, wide obstacles.
pub fn e2(formulation: Formulation, _route: SolveRoute) -> ScenarioConfig {
    let mut cfg = cluttered_base("E2", formulation, 4.0, -20.0);
    cfg.obstacles = vec![
        ObstacleSpec::Rect {
            v_ll: (-5.0, -2.0),
            v_ur: (5.0, 1.5),
        },
        ObstacleSpec::Rect {
            v_ll: (20.0, -0.5),
            v_ur: (27.0, 3.0),
        },
    ];
    cfg.directions = vec![Direction::Above, Direction::Below];
    cfg.horizon.n = cluttered_nodes("E2", formulation);
    // wide activation bands: several nodes sit inside each band, so the
    // conditional rows need a steeper slope to pin them to the faces
    cfg.weights.gamma = 6e3;
    if formulation == Formulation::Mioa {
        cfg.solver.node_limit = 60;
        cfg.solver.max_iter = 24;
    }
    cfg
}

const LANE_WIDTH: f64 = 3.6576;

fn intersection_sim(name: &str, vx0: f64) -> ScenarioConfig {
    let turn_radius = LANE_WIDTH + LANE_WIDTH / 2.0;
    ScenarioConfig {
        name: String::from(name),
        notes: vec![
            String::from("obstacle speed, turn geometry, weights and limits are toolkit defaults"),
            String::from("lane width 3.6576 m; left turn joins the crossing lane tangentially"),
        ],
        vehicle: VehicleParams::default(),
        path: PathSpec {
            origin: (0.0, 0.0, 0.0),
            segments: vec![
                PathSegment::Straight { length: 15.0 },
                PathSegment::Arc {
                    radius: turn_radius,
                    angle: core::f64::consts::FRAC_PI_2,
                },
                PathSegment::Straight { length: 12.0 },
            ],
        },
        obstacles: vec![ObstacleSpec::Moving {
            v_ll: (-(0.9803 + 0.5), -1.0),
            v_ur: (1.153 + 0.5, 1.0),
            pose0: (50.0, LANE_WIDTH),
            velocity: (-15.0, 0.0),
        }],
        directions: vec![Direction::Below],
        horizon: Horizon {
            t: 2.0,
            n: 75,
            substeps: 10,
        },
        dynamics: DynamicsMode::P1,
        formulation: Formulation::Rcoa,
        initial: InitialState {
            vx: vx0,
            ..Default::default()
        },
        weights: Weights::default(),
        bounds: Limits {
            u_des: vx0,
            ..Default::default()
        },
        solver: SolverConfig {
            delta0: 2.0,
            max_iter: 40,
            ..Default::default()
        },
        small_angle: true,
        big_m: None,
        mpc: Some(MpcConfig::default()),
    }
}

/// Intersection left turn against oncoming traffic, approach at 15 m/s.
pub fn sim1() -> ScenarioConfig {
    intersection_sim("Sim1", 15.0)
}

/// Intersection left turn against oncoming traffic, approach at 10 m/s.
pub fn sim2() -> ScenarioConfig {
    intersection_sim("Sim2", 10.0)
}

/// Resolves a named built-in scenario. Formulation and route select the
/// node count for the cluttered environments.
pub fn by_name(name: &str, formulation: Formulation, route: SolveRoute) -> Option<ScenarioConfig> {
    match name.to_ascii_lowercase().as_str() {
        "e1" => Some(e1(formulation, route)),
        "e2" => Some(e2(formulation, route)),
        "c2" => Some(c2(formulation, route)),
        "sim1" => Some(sim1()),
        "sim2" => Some(sim2()),
        _ => None,
    }
}

/// Names of all built-in scenarios.
pub fn builtin_names() -> [&'static str; 5] {
    ["E1", "E2", "C2", "Sim1", "Sim2"]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn e1_builtin_matches_tables() {
        let cfg = e1(Formulation::Rcoa, SolveRoute::Scvx);
        assert_eq!(cfg.obstacles.len(), 3);
        assert_eq!(
            cfg.obstacles[0],
            ObstacleSpec::Rect {
                v_ll: (-1.0, -4.0),
                v_ur: (1.0, 1.25)
            }
        );
        assert_eq!(cfg.horizon.n, 30);
        assert_eq!(cfg.horizon.t, 3.5);
        assert_eq!(cfg.initial.x, -15.0);
        assert_eq!(cfg.initial.vx, 15.0);
        assert_eq!(
            cfg.directions,
            vec![Direction::Above, Direction::Below, Direction::Above]
        );
        assert_eq!(e1(Formulation::Eoa, SolveRoute::Scvx).horizon.n, 75);
        assert_eq!(e1(Formulation::Mioa, SolveRoute::Hybrid).horizon.n, 30);
        cfg.validate().unwrap();
    }

    #[test]
    fn c2_grows_first_obstacle() {
        let cfg = c2(Formulation::Rcoa, SolveRoute::Scvx);
        match cfg.obstacles[0] {
            ObstacleSpec::Rect { v_ur, .. } => assert_eq!(v_ur.1, 1.75),
            _ => panic!("expected rect"),
        }
        match cfg.obstacles[1] {
            ObstacleSpec::Rect { v_ll, v_ur } => {
                assert_eq!(v_ll, (11.0, 0.0));
                assert_eq!(v_ur, (13.0, 8.0));
            }
            _ => panic!("expected rect"),
        }
    }

    #[test]
    fn e2_and_sims_match_initial_conditions() {
        let cfg = e2(Formulation::Rcoa, SolveRoute::Scvx);
        assert_eq!(cfg.horizon.t, 4.0);
        assert_eq!(cfg.horizon.n, 34);
        assert_eq!(cfg.initial.x, -20.0);

        let s1 = sim1();
        assert_eq!(s1.initial.vx, 15.0);
        let s2 = sim2();
        assert_eq!(s2.initial.vx, 10.0);
        for cfg in [s1, s2] {
            assert_eq!(cfg.horizon.n, 75);
            assert_eq!(cfg.horizon.t, 2.0);
            match cfg.obstacles[0] {
                ObstacleSpec::Moving { pose0, v_ll, v_ur, .. } => {
                    assert_eq!(pose0, (50.0, 3.6576));
                    assert!((v_ll.0 + 1.4803).abs() < 1e-12);
                    assert!((v_ur.0 - 1.653).abs() < 1e-12);
                }
                _ => panic!("expected moving obstacle"),
            }
            cfg.validate().unwrap();
        }
    }

    #[test]
    fn eoa_effective_obstacles_are_ellipses() {
        let cfg = e1(Formulation::Eoa, SolveRoute::Scvx);
        let obs = cfg.effective_obstacles().unwrap();
        match obs[0] {
            Obstacle::Ellipse(e) => {
                assert!((e.c.1 + 1.375).abs() < 1e-12);
            }
            _ => panic!("expected ellipse"),
        }
    }

    #[test]
    fn validation_reports_field_paths() {
        let mut cfg = e1(Formulation::Rcoa, SolveRoute::Scvx);
        cfg.bounds.u_min = 50.0;
        let err = cfg.validate().unwrap_err();
        assert_eq!(err.path, "bounds.u_min");

        let mut cfg = e1(Formulation::Rcoa, SolveRoute::Scvx);
        cfg.obstacles[1] = ObstacleSpec::Rect {
            v_ll: (1.0, 0.0),
            v_ur: (0.0, 1.0),
        };
        let err = cfg.validate().unwrap_err();
        assert!(err.path.starts_with("obstacles[1]"));

        let mut cfg = e1(Formulation::Rcoa, SolveRoute::Scvx);
        cfg.directions.pop();
        assert_eq!(cfg.validate().unwrap_err().path, "directions");
    }

    #[test]
    fn unknown_name_is_none() {
        assert!(by_name("E9", Formulation::Rcoa, SolveRoute::Scvx).is_none());
        assert!(by_name("sim1", Formulation::Rcoa, SolveRoute::Scvx).is_some());
    }
}
