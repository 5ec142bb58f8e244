//! Obstacle geometry and trajectory intrusion metrics.
//!
//! Obstacles are axis-aligned rectangles, ellipses, or rectangles translating
//! at constant velocity. Penetration depth is measured along the y axis for
//! every shape so that rectangular and elliptical results stay comparable.

use crate::math;
use alloc::vec::Vec;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ObstacleError {
    #[error("degenerate rectangle: lower-left vertex must be strictly below upper-right")]
    DegenerateRect,
    #[error("ellipse shape matrix must be symmetric positive definite")]
    BadShapeMatrix,
}

/// Axis-aligned rectangular obstacle.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RectObstacle {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl RectObstacle {
    /// Builds a rectangle from its lower-left and upper-right vertices.
    pub fn from_vertices(v_ll: (f64, f64), v_ur: (f64, f64)) -> Result<Self, ObstacleError> {
        if !(v_ll.0 < v_ur.0 && v_ll.1 < v_ur.1) {
            return Err(ObstacleError::DegenerateRect);
        }
        Ok(RectObstacle {
            x_min: v_ll.0,
            y_min: v_ll.1,
            x_max: v_ur.0,
            y_max: v_ur.1,
        })
    }

    pub fn center(&self) -> (f64, f64) {
        (
            0.5 * (self.x_min + self.x_max),
            0.5 * (self.y_min + self.y_max),
        )
    }

    pub fn half_extents(&self) -> (f64, f64) {
        (
            0.5 * (self.x_max - self.x_min),
            0.5 * (self.y_max - self.y_min),
        )
    }

    /// Closed-boundary membership.
    pub fn contains(&self, p: (f64, f64)) -> bool {
        p.0 >= self.x_min && p.0 <= self.x_max && p.1 >= self.y_min && p.1 <= self.y_max
    }

    /// Euclidean distance from a point to the rectangle (zero inside).
    pub fn clearance(&self, p: (f64, f64)) -> f64 {
        let dx = (self.x_min - p.0).max(0.0).max(p.0 - self.x_max);
        let dy = (self.y_min - p.1).max(0.0).max(p.1 - self.y_max);
        math::hypot(dx, dy)
    }

    /// Depth of intrusion along y: distance to the nearer horizontal face for
    /// points inside, zero otherwise (boundary contact does not penetrate).
    pub fn y_penetration(&self, p: (f64, f64)) -> f64 {
        if !self.contains(p) {
            return 0.0;
        }
        (self.y_max - p.1).min(p.1 - self.y_min).max(0.0)
    }
}

/// Elliptical obstacle `(y - c)^T P (y - c) < 1` with P positive definite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseObstacle {
    /// Center (m).
    pub c: (f64, f64),
    /// Shape matrix rows `[[pxx, pxy], [pxy, pyy]]` (1/m^2).
    pub p: [[f64; 2]; 2],
}

impl EllipseObstacle {
    pub fn new(c: (f64, f64), p: [[f64; 2]; 2]) -> Result<Self, ObstacleError> {
        let sym = (p[0][1] - p[1][0]).abs() <= 1e-12 * (1.0 + p[0][1].abs());
        let det = p[0][0] * p[1][1] - p[0][1] * p[1][0];
        if !sym || p[0][0] <= 0.0 || det <= 0.0 {
            return Err(ObstacleError::BadShapeMatrix);
        }
        Ok(EllipseObstacle { c, p })
    }

    /// Axis-aligned ellipse with the given radii.
    pub fn axis_aligned(c: (f64, f64), rx: f64, ry: f64) -> Result<Self, ObstacleError> {
        if !(rx > 0.0 && ry > 0.0) {
            return Err(ObstacleError::BadShapeMatrix);
        }
        EllipseObstacle::new(c, [[1.0 / (rx * rx), 0.0], [0.0, 1.0 / (ry * ry)]])
    }

    /// Quadratic form `(p - c)^T P (p - c)`.
    pub fn quad(&self, pt: (f64, f64)) -> f64 {
        let d = (pt.0 - self.c.0, pt.1 - self.c.1);
        d.0 * (self.p[0][0] * d.0 + self.p[0][1] * d.1)
            + d.1 * (self.p[1][0] * d.0 + self.p[1][1] * d.1)
    }

    /// Open-interior membership.
    pub fn contains(&self, pt: (f64, f64)) -> bool {
        self.quad(pt) < 1.0
    }

    /// Depth along y to the nearer boundary crossing for interior points.
    pub fn y_penetration(&self, pt: (f64, f64)) -> f64 {
        if !self.contains(pt) {
            return 0.0;
        }
        // roots of quad(pt + t*e_y) = 1 bracket the interior point
        let d = (pt.0 - self.c.0, pt.1 - self.c.1);
        let a = self.p[1][1];
        let b = 2.0 * (self.p[1][0] * d.0 + self.p[1][1] * d.1);
        let c = self.quad(pt) - 1.0;
        let disc = b * b - 4.0 * a * c;
        if disc <= 0.0 {
            return 0.0;
        }
        let sq = math::sqrt(disc);
        let t_hi = (-b + sq) / (2.0 * a);
        let t_lo = (-b - sq) / (2.0 * a);
        t_hi.min(-t_lo).max(0.0)
    }
}

/// Rectangle translating at constant velocity; the box is given in the
/// obstacle-local frame around `pose0`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MovingObstacle {
    /// Body box in the obstacle frame (m).
    pub local: RectObstacle,
    /// Position of the obstacle frame at t = 0 (m).
    pub pose0: (f64, f64),
    /// Constant velocity (m/s).
    pub velocity: (f64, f64),
}

impl MovingObstacle {
    /// Obstacle frame position at time `t`.
    pub fn pose(&self, t: f64) -> (f64, f64) {
        (
            self.pose0.0 + t * self.velocity.0,
            self.pose0.1 + t * self.velocity.1,
        )
    }

    /// World-frame box at time `t`.
    pub fn world_box(&self, t: f64) -> RectObstacle {
        let (px, py) = self.pose(t);
        RectObstacle {
            x_min: self.local.x_min + px,
            y_min: self.local.y_min + py,
            x_max: self.local.x_max + px,
            y_max: self.local.y_max + py,
        }
    }
}

/// Any obstacle shape known to the toolkit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Obstacle {
    Rect(RectObstacle),
    Ellipse(EllipseObstacle),
    Moving(MovingObstacle),
}

impl Obstacle {
    /// Membership test at time `t` (closed for rectangles, open for
    /// ellipses).
    pub fn contains(&self, p: (f64, f64), t: f64) -> bool {
        match self {
            Obstacle::Rect(r) => r.contains(p),
            Obstacle::Ellipse(e) => e.contains(p),
            Obstacle::Moving(m) => m.world_box(t).contains(p),
        }
    }

    /// Intrusion depth along y at time `t`; zero outside.
    pub fn y_penetration(&self, p: (f64, f64), t: f64) -> f64 {
        match self {
            Obstacle::Rect(r) => r.y_penetration(p),
            Obstacle::Ellipse(e) => e.y_penetration(p),
            Obstacle::Moving(m) => m.world_box(t).y_penetration(p),
        }
    }

    /// Distance to the obstacle boundary at time `t` (zero inside).
    pub fn clearance(&self, p: (f64, f64), t: f64) -> f64 {
        match self {
            Obstacle::Rect(r) => r.clearance(p),
            Obstacle::Moving(m) => m.world_box(t).clearance(p),
            Obstacle::Ellipse(e) => {
                // conservative radial estimate; exact only for circles
                let q = e.quad(p);
                if q <= 1.0 {
                    return 0.0;
                }
                let r = math::sqrt(q);
                let dist = math::hypot(p.0 - e.c.0, p.1 - e.c.1);
                dist * (1.0 - 1.0 / r)
            }
        }
    }
}

/// Builds the inscribed ellipse of a rectangle: center at the rectangle
/// center, radii equal to the half extents.
pub fn ellipse_from_rect(r: &RectObstacle) -> EllipseObstacle {
    let (rx, ry) = r.half_extents();
    EllipseObstacle::axis_aligned(r.center(), rx, ry).expect("valid rect implies valid ellipse")
}

/// Maximum y penetration over a set of timestamped points.
pub fn max_penetration<'a, I>(samples: I, obstacles: &[Obstacle]) -> f64
where
    I: IntoIterator<Item = (f64, (f64, f64))>,
{
    let mut depth: f64 = 0.0;
    for (t, p) in samples {
        for obs in obstacles {
            depth = depth.max(obs.y_penetration(p, t));
        }
    }
    depth
}

/// Minimum clearance to any obstacle over a set of timestamped points.
pub fn min_clearance<I>(samples: I, obstacles: &[Obstacle]) -> f64
where
    I: IntoIterator<Item = (f64, (f64, f64))>,
{
    let mut clearance = f64::INFINITY;
    for (t, p) in samples {
        for obs in obstacles {
            clearance = clearance.min(obs.clearance(p, t));
        }
    }
    clearance
}

/// Timestamped planar samples split into controller nodes and the dense
/// plant resample between them.
pub struct PositionTrace {
    /// `(t, (x, y))` at controller nodes.
    pub nodes: Vec<(f64, (f64, f64))>,
    /// `(t, (x, y))` for all dense samples, including the nodes.
    pub dense: Vec<(f64, (f64, f64))>,
}

impl PositionTrace {
    /// Maximum intrusion depth over the controller nodes.
    pub fn node_penetration(&self, obstacles: &[Obstacle]) -> f64 {
        max_penetration(self.nodes.iter().copied(), obstacles)
    }

    /// Maximum intrusion depth over dense samples strictly between nodes.
    pub fn intersample_penetration(&self, obstacles: &[Obstacle]) -> f64 {
        let node_times: Vec<f64> = self.nodes.iter().map(|(t, _)| *t).collect();
        let strictly_between = self.dense.iter().copied().filter(|(t, _)| {
            !node_times
                .iter()
                .any(|tn| (tn - t).abs() <= 1e-12 * (1.0 + tn.abs()))
        });
        max_penetration(strictly_between, obstacles)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn e1_obstacle_1() -> RectObstacle {
        RectObstacle::from_vertices((-1.0, -4.0), (1.0, 1.25)).unwrap()
    }

    #[test]
    fn rect_from_vertices_stores_bounds() {
        let r = e1_obstacle_1();
        assert_eq!((r.x_min, r.y_min, r.x_max, r.y_max), (-1.0, -4.0, 1.0, 1.25));
        let unit = RectObstacle::from_vertices((0.0, 0.0), (1.0, 1.0)).unwrap();
        assert_eq!(unit.center(), (0.5, 0.5));
    }

    #[test]
    fn inverted_bounds_rejected() {
        assert!(matches!(
            RectObstacle::from_vertices((1.0, 0.0), (0.0, 1.0)),
            Err(ObstacleError::DegenerateRect)
        ));
    }

    #[test]
    fn ellipse_from_rect_midpoint_arithmetic() {
        let e = ellipse_from_rect(&e1_obstacle_1());
        assert_abs_diff_eq!(e.c.0, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.c.1, -1.375, epsilon = 1e-15);
        assert_abs_diff_eq!(e.p[0][0], 1.0, epsilon = 1e-15); // rx = 1
        assert_abs_diff_eq!(e.p[1][1], 1.0 / (2.625 * 2.625), epsilon = 1e-15);
    }

    #[test]
    fn unit_box_ellipse() {
        let r = RectObstacle::from_vertices((0.0, 0.0), (1.0, 1.0)).unwrap();
        let e = ellipse_from_rect(&r);
        assert_eq!(e.c, (0.5, 0.5));
        assert_eq!(e.p[0][0], 4.0);
        assert_eq!(e.p[1][1], 4.0);
    }

    #[test]
    fn square_rect_gives_circle() {
        let r = RectObstacle::from_vertices((-2.0, 1.0), (2.0, 5.0)).unwrap();
        let e = ellipse_from_rect(&r);
        assert_eq!(e.p[0][0], e.p[1][1]);
    }

    #[test]
    fn contains_inside_e1_obstacle_2() {
        let r = Obstacle::Rect(RectObstacle::from_vertices((11.0, 0.0), (13.0, 8.0)).unwrap());
        assert!(r.contains((12.0, 4.0), 0.0));
        assert!(!r.contains((1e18, 0.0), 0.0));
    }

    #[test]
    fn moving_box_membership_at_time() {
        let m = Obstacle::Moving(MovingObstacle {
            local: RectObstacle::from_vertices((-1.4803, -1.0), (1.653, 1.0)).unwrap(),
            pose0: (50.0, 3.6576),
            velocity: (-10.0, 0.0),
        });
        assert!(m.contains((40.0, 3.6576), 1.0));
        assert!(!m.contains((40.0, 3.6576), 0.0));
    }

    #[test]
    fn moving_pose_is_affine_in_time() {
        let m = MovingObstacle {
            local: RectObstacle::from_vertices((-1.0, -1.0), (1.0, 1.0)).unwrap(),
            pose0: (5.0, -2.0),
            velocity: (-3.0, 0.5),
        };
        for i in 0..50 {
            let t = -4.0 + 0.37 * i as f64;
            let p = m.pose(t);
            assert_eq!(p.0, 5.0 - 3.0 * t);
            assert_eq!(p.1, -2.0 + 0.5 * t);
        }
    }

    #[test]
    fn node_penetration_of_single_point() {
        let obs = [Obstacle::Rect(e1_obstacle_1())];
        let trace = PositionTrace {
            nodes: alloc::vec![(0.0, (0.0, 1.0))],
            dense: alloc::vec![(0.0, (0.0, 1.0))],
        };
        assert_abs_diff_eq!(trace.node_penetration(&obs), 0.25, epsilon = 1e-12);
    }

    #[test]
    fn boundary_contact_does_not_penetrate() {
        let obs = [Obstacle::Rect(e1_obstacle_1())];
        assert_eq!(obs[0].y_penetration((0.0, 1.25), 0.0), 0.0);
        let empty = PositionTrace {
            nodes: alloc::vec![(0.0, (100.0, 100.0))],
            dense: alloc::vec![],
        };
        assert_eq!(empty.node_penetration(&obs), 0.0);
    }

    #[test]
    fn intersample_skips_nodes() {
        let obs = [Obstacle::Rect(e1_obstacle_1())];
        let trace = PositionTrace {
            nodes: alloc::vec![(0.0, (-3.0, 0.0)), (1.0, (3.0, 0.0))],
            dense: alloc::vec![
                (0.0, (-3.0, 0.0)),
                (0.5, (0.0, 1.15)), // depth 0.10 to the top face
                (1.0, (3.0, 0.0)),
            ],
        };
        assert_eq!(trace.node_penetration(&obs), 0.0);
        assert_abs_diff_eq!(trace.intersample_penetration(&obs), 0.10, epsilon = 1e-12);
    }

    #[test]
    fn ellipse_y_penetration_depth() {
        let e = EllipseObstacle::axis_aligned((0.0, 0.0), 2.0, 1.0).unwrap();
        // at center: nearer crossing is ry
        assert_abs_diff_eq!(e.y_penetration((0.0, 0.0)), 1.0, epsilon = 1e-12);
        // interior off-center point
        let d = e.y_penetration((0.0, 0.6));
        assert_abs_diff_eq!(d, 0.4, epsilon = 1e-12);
        assert_eq!(e.y_penetration((5.0, 0.0)), 0.0);
    }

    #[test]
    fn inscribed_ellipse_stays_in_rect() {
        let r = e1_obstacle_1();
        let e = ellipse_from_rect(&r);
        let mut seed = 42u64;
        let mut rnd = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            (seed >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut inside = 0;
        for _ in 0..10_000 {
            let p = (-2.0 + 4.0 * rnd(), -6.0 + 9.0 * rnd());
            if e.quad(p) <= 1.0 {
                inside += 1;
                assert!(r.contains(p));
            }
        }
        assert!(inside > 100, "sampling must actually hit the ellipse");
    }

    #[test]
    fn containment_monotone_under_inflation() {
        let r = e1_obstacle_1();
        let mut seed = 7u64;
        let mut rnd = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            (seed >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..2000 {
            let p = (-4.0 + 8.0 * rnd(), -8.0 + 12.0 * rnd());
            let delta = 3.0 * rnd();
            let inflated = RectObstacle {
                x_min: r.x_min - delta,
                y_min: r.y_min - delta,
                x_max: r.x_max + delta,
                y_max: r.y_max + delta,
            };
            if r.contains(p) {
                assert!(inflated.contains(p));
            }
        }
    }

    #[test]
    fn clearance_zero_inside_positive_outside() {
        let r = e1_obstacle_1();
        assert_eq!(r.clearance((0.0, 0.0)), 0.0);
        assert_abs_diff_eq!(r.clearance((3.0, 0.0)), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.clearance((2.0, 2.25)), 2f64.sqrt(), epsilon = 1e-12);
    }
}
