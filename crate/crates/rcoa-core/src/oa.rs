//! Obstacle-avoidance constraint generators.
//!
//! Three families share the node-variable handles:
//!
//! - relaxed convex rows (rectangular big-M conditional logic, binaries
//!   relaxed to `[0,1]`, L1 penalty on the switches), including generalized
//!   time-varying bounds, a unit-step reduction, and a relative form whose
//!   obstacle pose enters through state variables;
//! - mixed-integer exclusion rows (four big-M rows, binary switches);
//! - the elliptical keep-out row for nonlinear formulations.
//!
//! All generators emit `<=` rows for [`ConvexProgram`](crate::program::ConvexProgram);
//! gamma bounds are returned separately so callers can set them as variable
//! bounds.

use crate::nlp::NlBlock;
use crate::obstacle::{EllipseObstacle, Obstacle, RectObstacle};
use crate::program::SparseRow;
use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OaError {
    #[error("big-M constants must be strictly positive")]
    BadBigM,
}

/// Per-obstacle avoidance side: pass above the top face or below the bottom
/// face while inside the obstacle's x band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Direction {
    Above,
    Below,
}

/// Big-M deactivation constants, units of meters.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BigM {
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    pub m4: f64,
}

impl BigM {
    pub fn uniform(m: f64) -> Self {
        BigM {
            m1: m,
            m2: m,
            m3: m,
            m4: m,
        }
    }

    /// Auto-sizing rule: 1.5 times the diagonal of the reachable position
    /// box, applied uniformly per axis.
    pub fn from_position_range(diag: f64) -> Self {
        BigM::uniform(1.5 * diag)
    }

    pub fn validate(&self) -> Result<(), OaError> {
        if self.m1 > 0.0 && self.m2 > 0.0 && self.m3 > 0.0 && self.m4 > 0.0 {
            Ok(())
        } else {
            Err(OaError::BadBigM)
        }
    }
}

/// Decision-variable handles of one trajectory node for the relaxed rows.
#[derive(Debug, Clone, Copy)]
pub struct RcoaNode {
    pub x: usize,
    pub y: usize,
    pub g1: usize,
    pub g2: usize,
    /// Node time, used to evaluate moving bounds.
    pub t: f64,
}

/// Node handles for the unit-step reduction (single switch).
#[derive(Debug, Clone, Copy)]
pub struct UnitStepNode {
    pub x: usize,
    pub y: usize,
    pub g: usize,
    pub t: f64,
}

/// Node handles for the mixed-integer rows.
#[derive(Debug, Clone, Copy)]
pub struct MioaNode {
    pub x: usize,
    pub y: usize,
    pub g: [usize; 4],
}

/// Node handles when the obstacle pose is itself a pair of state variables.
#[derive(Debug, Clone, Copy)]
pub struct RelativeNode {
    pub xv: usize,
    pub yv: usize,
    pub xo: usize,
    pub yo: usize,
    pub g1: usize,
    pub g2: usize,
}

/// Generator output: inequality rows, L1 penalty coefficients on the
/// switches, and `[0,1]` bounds for every switch referenced.
#[derive(Debug, Clone, Default)]
pub struct OaRows {
    pub rows: Vec<SparseRow>,
    pub penalty: Vec<(usize, f64)>,
    pub gamma_bounds: Vec<(usize, f64, f64)>,
}

impl OaRows {
    fn push_gamma(&mut self, g: usize, w: f64) {
        self.penalty.push((g, w));
        self.gamma_bounds.push((g, 0.0, 1.0));
    }
}

/// Time-varying activation and vertical bounds for the generalized rows.
#[derive(Debug, Clone, Copy)]
pub struct GeneralBounds {
    pub g_min: f64,
    pub g_max: f64,
    pub h_min: f64,
    pub h_max: f64,
}

/// Relaxed convex rows for a static rectangle.
///
/// Per node: `-X <= -x_min + M1 g1`, `X <= x_max + M2 g2`, the directional
/// row (`Y >= y_max - M3 (g1+g2)` above or `Y <= y_min + M3 (g1+g2)` below),
/// `g1 + g2 <= 1`, `0 <= g <= 1`, plus the penalty `w (g1 + g2)`.
pub fn rcoa_constraints(
    obs: &RectObstacle,
    dir: Direction,
    m: &BigM,
    w: f64,
    nodes: &[RcoaNode],
) -> Result<OaRows, OaError> {
    let bounds = GeneralBounds {
        g_min: obs.x_min,
        g_max: obs.x_max,
        h_min: obs.y_min,
        h_max: obs.y_max,
    };
    rcoa_generalized(|_| bounds, dir, m, w, nodes)
}

/// Relaxed convex rows for a rectangle translating at constant velocity:
/// the static bounds are offset by the pose at each node time.
pub fn rcoa_moving(
    obs: &crate::obstacle::MovingObstacle,
    dir: Direction,
    m: &BigM,
    w: f64,
    nodes: &[RcoaNode],
) -> Result<OaRows, OaError> {
    let o = *obs;
    rcoa_generalized(
        move |t| {
            let b = o.world_box(t);
            GeneralBounds {
                g_min: b.x_min,
                g_max: b.x_max,
                h_min: b.y_min,
                h_max: b.y_max,
            }
        },
        dir,
        m,
        w,
        nodes,
    )
}

/// Generalized relaxed rows with activation and vertical bounds given as
/// functions of node time.
pub fn rcoa_generalized(
    bounds_at: impl Fn(f64) -> GeneralBounds,
    dir: Direction,
    m: &BigM,
    w: f64,
    nodes: &[RcoaNode],
) -> Result<OaRows, OaError> {
    m.validate()?;
    let mut out = OaRows::default();
    for node in nodes {
        let b = bounds_at(node.t);
        out.rows.push(SparseRow::new(
            vec![(node.x, -1.0), (node.g1, -m.m1)],
            -b.g_min,
        ));
        out.rows
            .push(SparseRow::new(vec![(node.x, 1.0), (node.g2, -m.m2)], b.g_max));
        match dir {
            Direction::Above => out.rows.push(SparseRow::new(
                vec![(node.y, -1.0), (node.g1, -m.m3), (node.g2, -m.m3)],
                -b.h_max,
            )),
            Direction::Below => out.rows.push(SparseRow::new(
                vec![(node.y, 1.0), (node.g1, -m.m3), (node.g2, -m.m3)],
                b.h_min,
            )),
        }
        out.rows
            .push(SparseRow::new(vec![(node.g1, 1.0), (node.g2, 1.0)], 1.0));
        out.push_gamma(node.g1, w);
        out.push_gamma(node.g2, w);
    }
    Ok(out)
}

/// Unit-step reduction: a single activation edge and a single switch, for
/// obstacles known only through one vertex.
pub fn rcoa_unit_step(
    edge_at: impl Fn(f64) -> (f64, f64, f64), // (x_min, y_min, y_max)
    dir: Direction,
    m: &BigM,
    w: f64,
    nodes: &[UnitStepNode],
) -> Result<OaRows, OaError> {
    m.validate()?;
    let mut out = OaRows::default();
    for node in nodes {
        let (x_min, y_min, y_max) = edge_at(node.t);
        out.rows
            .push(SparseRow::new(vec![(node.x, -1.0), (node.g, -m.m1)], -x_min));
        match dir {
            Direction::Above => out
                .rows
                .push(SparseRow::new(vec![(node.y, -1.0), (node.g, -m.m3)], -y_max)),
            Direction::Below => out
                .rows
                .push(SparseRow::new(vec![(node.y, 1.0), (node.g, -m.m3)], y_min)),
        }
        out.push_gamma(node.g, w);
    }
    Ok(out)
}

/// Relaxed rows referencing the obstacle pose as state variables, with the
/// box given in the obstacle-local frame. Only the below direction is
/// generated with `h` bounds; above mirrors by the same pattern.
pub fn rcoa_relative(
    local: &RectObstacle,
    dir: Direction,
    m: &BigM,
    w: f64,
    nodes: &[RelativeNode],
) -> Result<OaRows, OaError> {
    m.validate()?;
    let mut out = OaRows::default();
    for node in nodes {
        // (Xo + x_min) - Xv <= M1 g1
        out.rows.push(SparseRow::new(
            vec![(node.xo, 1.0), (node.xv, -1.0), (node.g1, -m.m1)],
            -local.x_min,
        ));
        // Xv - (Xo + x_max) <= M2 g2
        out.rows.push(SparseRow::new(
            vec![(node.xv, 1.0), (node.xo, -1.0), (node.g2, -m.m2)],
            local.x_max,
        ));
        match dir {
            Direction::Below => out.rows.push(SparseRow::new(
                vec![
                    (node.yv, 1.0),
                    (node.yo, -1.0),
                    (node.g1, -m.m3),
                    (node.g2, -m.m3),
                ],
                local.y_min,
            )),
            Direction::Above => out.rows.push(SparseRow::new(
                vec![
                    (node.yv, -1.0),
                    (node.yo, 1.0),
                    (node.g1, -m.m3),
                    (node.g2, -m.m3),
                ],
                -local.y_max,
            )),
        }
        out.rows
            .push(SparseRow::new(vec![(node.g1, 1.0), (node.g2, 1.0)], 1.0));
        out.push_gamma(node.g1, w);
        out.push_gamma(node.g2, w);
    }
    Ok(out)
}

/// Mixed-integer exclusion rows: four big-M rows, binary switches, and the
/// `sum g <= 3` row forcing at least one face condition.
pub fn mioa_constraints(obs: &RectObstacle, m: &BigM, nodes: &[MioaNode]) -> Result<OaRows, OaError> {
    m.validate()?;
    let mut out = OaRows::default();
    for node in nodes {
        out.rows
            .push(SparseRow::new(vec![(node.x, 1.0), (node.g[0], -m.m1)], obs.x_min));
        out.rows.push(SparseRow::new(
            vec![(node.x, -1.0), (node.g[1], -m.m2)],
            -obs.x_max,
        ));
        out.rows
            .push(SparseRow::new(vec![(node.y, 1.0), (node.g[2], -m.m3)], obs.y_min));
        out.rows.push(SparseRow::new(
            vec![(node.y, -1.0), (node.g[3], -m.m4)],
            -obs.y_max,
        ));
        out.rows.push(SparseRow::new(
            node.g.iter().map(|&g| (g, 1.0)).collect(),
            3.0,
        ));
        for &g in &node.g {
            out.gamma_bounds.push((g, 0.0, 1.0));
        }
    }
    Ok(out)
}

/// Elliptical keep-out value `1 - (p - c)^T P (p - c)`; nonpositive outside.
pub fn eoa_violation(e: &EllipseObstacle, p: (f64, f64)) -> f64 {
    1.0 - e.quad(p)
}

/// Nonlinear inequality block `1 - (p - c)^T P (p - c) <= 0` over the two
/// position variables of one node. The linearization gradient on the
/// quadratic is `-2 P (p - c)`.
pub fn eoa_block(e: &EllipseObstacle, x_var: usize, y_var: usize) -> NlBlock {
    let e = *e;
    NlBlock {
        rows: 1,
        vars: vec![x_var, y_var],
        eval: Box::new(move |p, out| out[0] = 1.0 - e.quad((p[0], p[1]))),
    }
}

/// Nodes whose x position falls inside an obstacle's activation band at the
/// node time. These are the nodes where the conditional statement must hold,
/// and whose switches the feasibility correction pins to zero.
pub fn correction_flags(
    nodes: &[(f64, (f64, f64))],
    obstacles: &[Obstacle],
) -> Vec<(usize, usize)> {
    let mut flags = Vec::new();
    for (k, &(t, (x, _))) in nodes.iter().enumerate() {
        for (oi, obs) in obstacles.iter().enumerate() {
            let band = match obs {
                Obstacle::Rect(r) => Some((r.x_min, r.x_max)),
                Obstacle::Moving(m) => {
                    let b = m.world_box(t);
                    Some((b.x_min, b.x_max))
                }
                Obstacle::Ellipse(_) => None,
            };
            if let Some((lo, hi)) = band {
                if x >= lo && x <= hi {
                    flags.push((k, oi));
                }
            }
        }
    }
    flags
}

/// All `2^n` above/below assignments in lexicographic order
/// (`Above < Below`).
pub fn enumerate_subproblems(n_obs: usize) -> Vec<Vec<Direction>> {
    let count = 1usize << n_obs;
    let mut out = Vec::with_capacity(count);
    for mask in 0..count {
        let mut dirs = Vec::with_capacity(n_obs);
        for bit in (0..n_obs).rev() {
            dirs.push(if (mask >> bit) & 1 == 0 {
                Direction::Above
            } else {
                Direction::Below
            });
        }
        out.push(dirs);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::obstacle::MovingObstacle;
    use crate::program::ConvexProgram;
    use crate::solver::{lp_solve, LpParams, SolveStatus};

    fn e1_ob1() -> RectObstacle {
        RectObstacle::from_vertices((-1.0, -4.0), (1.0, 1.25)).unwrap()
    }

    fn rows_hold(rows: &[SparseRow], vals: &[f64]) -> bool {
        rows.iter().all(|r| r.dot(vals) <= r.rhs + 1e-12)
    }

    /// Conditional statement for a direction choice: inside the x band the
    /// point must be past the chosen face.
    fn logic_holds(obs: &RectObstacle, dir: Direction, x: f64, y: f64) -> bool {
        if x >= obs.x_min && x <= obs.x_max {
            match dir {
                Direction::Above => y >= obs.y_max,
                Direction::Below => y <= obs.y_min,
            }
        } else {
            true
        }
    }

    #[test]
    fn inside_band_with_zero_gammas_forces_face() {
        let obs = e1_ob1();
        let m = BigM::uniform(50.0);
        let nodes = [RcoaNode { x: 0, y: 1, g1: 2, g2: 3, t: 0.0 }];
        let out = rcoa_constraints(&obs, Direction::Above, &m, 1.0, &nodes).unwrap();
        // X inside band, gammas zero: feasible iff Y >= y_max
        assert!(rows_hold(&out.rows, &[0.0, 1.25, 0.0, 0.0]));
        assert!(rows_hold(&out.rows, &[0.0, 3.0, 0.0, 0.0]));
        assert!(!rows_hold(&out.rows, &[0.0, 1.2, 0.0, 0.0]));
    }

    #[test]
    fn big_m_deactivates_left_of_band() {
        let obs = e1_ob1();
        let m = BigM::uniform(50.0);
        let nodes = [RcoaNode { x: 0, y: 1, g1: 2, g2: 3, t: 0.0 }];
        let out = rcoa_constraints(&obs, Direction::Above, &m, 1.0, &nodes).unwrap();
        for y in [-20.0, -4.0, 0.0, 5.0, 20.0] {
            assert!(rows_hold(&out.rows, &[-10.0, y, 1.0, 0.0]));
        }
    }

    #[test]
    fn binary_corner_logic_matches_conditional_statements() {
        // hard mode: the switches take their indicator values (forced to 1
        // exactly when the x rows demand it); feasibility of the remaining
        // rows at that corner must reproduce the conditional statement.
        // Checked by brute force over a position grid and all gamma corners:
        // the minimal-penalty feasible corner is the indicator corner and it
        // is feasible exactly on the logic set.
        let obs = e1_ob1();
        let m = BigM::from_position_range((10.0f64 * 10.0 + 10.0 * 10.0).sqrt());
        let nodes = [RcoaNode { x: 0, y: 1, g1: 2, g2: 3, t: 0.0 }];
        for dir in [Direction::Above, Direction::Below] {
            let out = rcoa_constraints(&obs, dir, &m, 1.0, &nodes).unwrap();
            for i in 0..40 {
                for j in 0..40 {
                    let x = -5.0 + 10.0 * (i as f64) / 39.0;
                    let y = -5.0 + 10.0 * (j as f64) / 39.0;
                    let ind = (
                        if x < obs.x_min { 1.0 } else { 0.0 },
                        if x > obs.x_max { 1.0 } else { 0.0 },
                    );
                    // indicator corner is the cheapest feasible corner
                    let min_sum = [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0)]
                        .iter()
                        .filter(|&&(g1, g2)| rows_hold(&out.rows, &[x, y, g1, g2]))
                        .map(|&(g1, g2)| g1 + g2)
                        .fold(f64::INFINITY, f64::min);
                    let feasible = rows_hold(&out.rows, &[x, y, ind.0, ind.1]);
                    if feasible {
                        assert_eq!(min_sum, ind.0 + ind.1, "at ({x}, {y}) dir {dir:?}");
                    }
                    assert_eq!(
                        feasible,
                        logic_holds(&obs, dir, x, y),
                        "mismatch at ({x}, {y}) dir {dir:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn relaxation_keeps_binary_feasible_points() {
        // any point feasible with binary switches stays feasible after
        // relaxing them to [0,1] (same witness values)
        let obs = e1_ob1();
        let m = BigM::uniform(40.0);
        let nodes = [RcoaNode { x: 0, y: 1, g1: 2, g2: 3, t: 0.0 }];
        let out = rcoa_constraints(&obs, Direction::Above, &m, 1.0, &nodes).unwrap();
        for &(x, y, g1, g2) in &[(-3.0, 0.0, 1.0, 0.0), (2.0, -2.0, 0.0, 1.0), (0.0, 2.0, 0.0, 0.0)] {
            assert!(rows_hold(&out.rows, &[x, y, g1, g2]));
            for (_, lo, hi) in &out.gamma_bounds {
                assert!(*lo <= g1 && g1 <= *hi && *lo <= g2 && g2 <= *hi);
            }
        }
    }

    #[test]
    fn minimal_penalty_is_zero_iff_face_satisfied() {
        // LP oracle on the 3-variable subproblem (Y fixed per case)
        let obs = e1_ob1();
        let m = BigM::uniform(40.0);
        let w = 7.0;
        for (y, expect_zero) in [(1.25, true), (2.0, true), (1.0, false), (-1.0, false)] {
            let mut p = ConvexProgram::with_vars(0);
            let x = p.add_var(0.0, 0.0, 0.0); // pinned inside the band
            let yv = p.add_var(0.0, y, y);
            let g1 = p.add_var(0.0, 0.0, 1.0);
            let g2 = p.add_var(0.0, 0.0, 1.0);
            let nodes = [RcoaNode { x, y: yv, g1, g2, t: 0.0 }];
            let out = rcoa_constraints(&obs, Direction::Above, &m, w, &nodes).unwrap();
            for row in &out.rows {
                p.add_ineq(row.coeffs.clone(), row.rhs);
            }
            for &(g, pw) in &out.penalty {
                p.cost[g] += pw;
            }
            let (_, rep) = lp_solve(&p, &LpParams::default()).unwrap();
            assert_eq!(rep.status, SolveStatus::Optimal);
            if expect_zero {
                assert!(rep.objective.abs() < 1e-7, "y = {y}: {}", rep.objective);
            } else {
                assert!(rep.objective > 1e-4, "y = {y}: {}", rep.objective);
            }
        }
    }

    #[test]
    fn active_set_relation_between_approach_and_height() {
        // with the first and third rows active and g2 = 0:
        // g1 = (x_min - X)/M1 and Y = y_max - (M3/M1)(x_min - X)
        let obs = e1_ob1();
        let m = BigM { m1: 37.0, m2: 37.0, m3: 53.0, m4: 53.0 };
        let nodes = [RcoaNode { x: 0, y: 1, g1: 2, g2: 3, t: 0.0 }];
        let out = rcoa_constraints(&obs, Direction::Above, &m, 1.0, &nodes).unwrap();
        let row_x = &out.rows[0]; // -X - M1 g1 <= -x_min
        let row_y = &out.rows[2]; // -Y - M3(g1+g2) <= -y_max
        let coef = |r: &SparseRow, var: usize| r.coeffs.iter().find(|&&(j, _)| j == var).unwrap().1;
        let m1 = -coef(row_x, 2);
        let m3 = -coef(row_y, 2);
        for k in 0..20 {
            let x = obs.x_min - 0.5 - (k as f64) * 0.9;
            // activity: coef_x * x + coef_g1 * g1 = rhs
            let g1 = (row_x.rhs - coef(row_x, 0) * x) / coef(row_x, 2);
            // activity: -y - m3 g1 = -y_max  =>  y = y_max - m3 g1
            let y = -(row_y.rhs) - m3 * g1;
            let expected = obs.y_max - (m3 / m1) * (obs.x_min - x);
            assert!((y - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn generalized_constant_bounds_reduce_to_static_rows() {
        let obs = e1_ob1();
        let m = BigM::uniform(40.0);
        let nodes = [RcoaNode { x: 4, y: 5, g1: 6, g2: 7, t: 1.3 }];
        let a = rcoa_constraints(&obs, Direction::Below, &m, 2.0, &nodes).unwrap();
        let b = rcoa_generalized(
            |_| GeneralBounds {
                g_min: obs.x_min,
                g_max: obs.x_max,
                h_min: obs.y_min,
                h_max: obs.y_max,
            },
            Direction::Below,
            &m,
            2.0,
            &nodes,
        )
        .unwrap();
        assert_eq!(a.rows.len(), b.rows.len());
        for (ra, rb) in a.rows.iter().zip(&b.rows) {
            assert_eq!(ra, rb);
        }
    }

    #[test]
    fn moving_bounds_shift_with_velocity() {
        // g(t) = x_min - Uo t: the time-indexed rows carry the translated
        // activation band
        let local = RectObstacle::from_vertices((-1.0, -1.0), (1.0, 1.0)).unwrap();
        let mobs = MovingObstacle {
            local,
            pose0: (50.0, 3.0),
            velocity: (-10.0, 0.0),
        };
        let m = BigM::uniform(80.0);
        let t = 2.0;
        let nodes = [RcoaNode { x: 0, y: 1, g1: 2, g2: 3, t }];
        let out = rcoa_moving(&mobs, Direction::Below, &m, 1.0, &nodes).unwrap();
        // row 0: -X - M1 g1 <= -(x_min + 50 - 10 t)
        assert!((out.rows[0].rhs - (-(50.0 - 10.0 * t - 1.0))).abs() < 1e-12);
        // row 1: X - M2 g2 <= x_max + 50 - 10 t
        assert!((out.rows[1].rhs - (50.0 - 10.0 * t + 1.0)).abs() < 1e-12);
        // below row rhs: y_min + pose_y
        assert!((out.rows[2].rhs - (3.0 - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn unit_step_emits_three_constraints_per_node() {
        let m = BigM::uniform(30.0);
        let nodes = [
            UnitStepNode { x: 0, y: 1, g: 2, t: 0.0 },
            UnitStepNode { x: 3, y: 4, g: 5, t: 0.1 },
        ];
        let out = rcoa_unit_step(|_| (4.0, -1.0, 1.0), Direction::Above, &m, 1.0, &nodes).unwrap();
        // two inequality rows plus one switch bound per node
        assert_eq!(out.rows.len(), 4);
        assert_eq!(out.gamma_bounds.len(), 2);
        assert_eq!(out.rows.len() / nodes.len() + out.gamma_bounds.len() / nodes.len(), 3);
    }

    #[test]
    fn mioa_corner_cases() {
        let obs = e1_ob1();
        let m = BigM::uniform(50.0);
        let nodes = [MioaNode { x: 0, y: 1, g: [2, 3, 4, 5] }];
        let out = mioa_constraints(&obs, &m, &nodes).unwrap();
        // point left of the obstacle with g = (0,1,1,1): feasible
        assert!(rows_hold(&out.rows, &[-3.0, 0.0, 0.0, 1.0, 1.0, 1.0]));
        // all switches on violates the sum row
        assert!(!rows_hold(&out.rows, &[-3.0, 0.0, 1.0, 1.0, 1.0, 1.0]));
        // interior point: every corner with sum <= 3 fails some row
        for mask in 0..16u32 {
            let g: Vec<f64> = (0..4).map(|b| ((mask >> b) & 1) as f64).collect();
            if g.iter().sum::<f64>() <= 3.0 {
                assert!(!rows_hold(&out.rows, &[0.0, 0.5, g[0], g[1], g[2], g[3]]));
            }
        }
    }

    #[test]
    fn eoa_values() {
        let e = EllipseObstacle::axis_aligned((0.0, 0.0), 1.0, 1.0).unwrap();
        assert!((eoa_violation(&e, (0.0, 0.0)) - 1.0).abs() < 1e-15);
        assert!(eoa_violation(&e, (1.0, 0.0)).abs() < 1e-15);
        assert!((eoa_violation(&e, (2.0, 0.0)) + 3.0).abs() < 1e-15);
        let block = eoa_block(&e, 0, 1);
        let mut out = [0.0];
        block.eval_at(&[2.0, 0.0], &mut out);
        assert!((out[0] + 3.0).abs() < 1e-15);
    }

    #[test]
    fn correction_flags_match_band_membership() {
        // synthetic 30-node trajectory whose 1-indexed nodes 9, 17, 27, 28
        // fall inside the three activation bands
        let obstacles = [
            Obstacle::Rect(RectObstacle::from_vertices((-1.0, -4.0), (1.0, 1.25)).unwrap()),
            Obstacle::Rect(RectObstacle::from_vertices((11.0, 0.0), (13.0, 8.0)).unwrap()),
            Obstacle::Rect(RectObstacle::from_vertices((25.0, -4.0), (27.0, 1.75)).unwrap()),
        ];
        let mut nodes: Vec<(f64, (f64, f64))> = Vec::new();
        for k in 0..30 {
            // everything far left of the field except the intended nodes
            let x = match k {
                8 => 0.0,
                16 => 12.0,
                26 => 25.4,
                27 => 26.7,
                _ => -60.0 + k as f64,
            };
            nodes.push((0.1 * k as f64, (x, 2.0)));
        }
        let flags = correction_flags(&nodes, &obstacles);
        assert_eq!(flags, alloc::vec![(8, 0), (16, 1), (26, 2), (27, 2)]);
        let one_indexed: Vec<usize> = flags.iter().map(|&(k, _)| k + 1).collect();
        assert_eq!(one_indexed, alloc::vec![9, 17, 27, 28]);
    }

    #[test]
    fn correction_flags_empty_when_bands_missed() {
        let obstacles = [Obstacle::Rect(e1_ob1())];
        let nodes = [(0.0, (5.0, 0.0)), (1.0, (9.0, 0.0))];
        assert!(correction_flags(&nodes, &obstacles).is_empty());
    }

    #[test]
    fn subproblem_enumeration() {
        assert_eq!(enumerate_subproblems(0), alloc::vec![Vec::<Direction>::new()]);
        assert_eq!(enumerate_subproblems(2).len(), 4);
        let three = enumerate_subproblems(3);
        assert_eq!(three.len(), 8);
        let mut sorted = three.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 8);
        assert_eq!(sorted, three, "enumeration must already be lexicographic");
        assert_eq!(
            three[0],
            alloc::vec![Direction::Above, Direction::Above, Direction::Above]
        );
        assert_eq!(
            three[7],
            alloc::vec![Direction::Below, Direction::Below, Direction::Below]
        );
    }

    #[test]
    fn bad_big_m_rejected() {
        let obs = e1_ob1();
        let m = BigM::uniform(-1.0);
        assert!(matches!(
            rcoa_constraints(&obs, Direction::Above, &m, 1.0, &[]),
            Err(OaError::BadBigM)
        ));
    }
}
