//! Frenet-Serret path-error kinematics and piecewise reference paths.
//!
//! The path error state is `(s, e, psi_bar)`: arc length along the
//! reference, lateral deviation, and heading error between the body frame
//! and the path tangent. The error rates solve `FS(e, k) * e_dot = R(psi_bar) * p`
//! in closed form, where `p = (vx, vy, psi_dot)` are the body rates.

use crate::math;
use alloc::vec::Vec;
use thiserror::Error;

/// Tolerance on `1 - e*kappa` below which the FS matrix is singular.
pub const FRENET_SINGULARITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrenetError {
    /// The vehicle sits at the instantaneous curvature center of the path.
    #[error("frenet frame singular: |1 - e*kappa| = {0:e}")]
    FrenetSingularity(f64),
    /// Path description is not geometrically meaningful.
    #[error("bad path geometry: {0}")]
    BadGeometry(&'static str),
}

/// Path-error state relative to a reference path.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PathError {
    /// Arc length along the path (m).
    pub s: f64,
    /// Lateral deviation (m), positive along the path normal.
    pub e: f64,
    /// Heading error psi_B - psi_FS (rad).
    pub psi_bar: f64,
}

/// Closed-form solution of the path-error rate equations.
///
/// `s_dot = (vx cos(pb) - vy sin(pb)) / (1 - e k)`,
/// `e_dot = vx sin(pb) + vy cos(pb)`,
/// `psi_bar_dot = psi_dot - k * s_dot`.
pub fn error_rates(
    err: &PathError,
    kappa_fs: f64,
    body_rates: (f64, f64, f64),
) -> Result<(f64, f64, f64), FrenetError> {
    let denom = 1.0 - err.e * kappa_fs;
    if denom.abs() <= FRENET_SINGULARITY_TOL {
        return Err(FrenetError::FrenetSingularity(denom.abs()));
    }
    let (vx, vy, psi_dot) = body_rates;
    let (sp, cp) = (math::sin(err.psi_bar), math::cos(err.psi_bar));
    let s_dot = (vx * cp - vy * sp) / denom;
    let e_dot = vx * sp + vy * cp;
    let psi_bar_dot = psi_dot - kappa_fs * s_dot;
    Ok((s_dot, e_dot, psi_bar_dot))
}

/// One piece of a reference path.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum PathSegment {
    /// Straight stretch of the given length (m).
    Straight { length: f64 },
    /// Circular arc: positive `angle` turns left, negative turns right.
    Arc { radius: f64, angle: f64 },
}

impl PathSegment {
    fn curvature(&self) -> f64 {
        match *self {
            PathSegment::Straight { .. } => 0.0,
            PathSegment::Arc { radius, angle } => angle.signum() / radius,
        }
    }
}

/// Piecewise straight/arc reference path with continuous position and
/// heading. Curvature is piecewise constant in arc length.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferencePath {
    segments: Vec<PathSegment>,
    /// Pose (x, y, heading) at the start of each segment, plus the endpoint.
    knots: Vec<(f64, f64, f64)>,
    /// Cumulative arc length at each knot.
    breaks: Vec<f64>,
}

impl ReferencePath {
    /// Builds a path starting at `origin = (x, y, heading)`.
    pub fn new(origin: (f64, f64, f64), segments: &[PathSegment]) -> Result<Self, FrenetError> {
        let mut knots = Vec::with_capacity(segments.len() + 1);
        let mut breaks = Vec::with_capacity(segments.len() + 1);
        let (mut x, mut y, mut h) = origin;
        let mut s = 0.0;
        knots.push((x, y, h));
        breaks.push(0.0);
        for seg in segments {
            match *seg {
                PathSegment::Straight { length } => {
                    if !(length > 0.0) {
                        return Err(FrenetError::BadGeometry("straight length must be positive"));
                    }
                    x += length * math::cos(h);
                    y += length * math::sin(h);
                    s += length;
                }
                PathSegment::Arc { radius, angle } => {
                    if !(radius > 0.0) {
                        return Err(FrenetError::BadGeometry("arc radius must be positive"));
                    }
                    if angle == 0.0 {
                        return Err(FrenetError::BadGeometry("arc angle must be nonzero"));
                    }
                    // center sits on the normal, left for a left turn
                    let side = angle.signum();
                    let (cx, cy) = (x - radius * side * math::sin(h), y + radius * side * math::cos(h));
                    let h_new = h + angle;
                    x = cx + radius * side * math::sin(h_new);
                    y = cy - radius * side * math::cos(h_new);
                    h = h_new;
                    s += radius * angle.abs();
                }
            }
            knots.push((x, y, h));
            breaks.push(s);
        }
        Ok(ReferencePath {
            segments: segments.to_vec(),
            knots,
            breaks,
        })
    }

    /// Straight path along the inertial X axis (zero curvature, zero heading).
    pub fn straight_x(length: f64) -> Self {
        ReferencePath::new((0.0, 0.0, 0.0), &[PathSegment::Straight { length }])
            .expect("positive length")
    }

    /// Total arc length (m).
    pub fn total_length(&self) -> f64 {
        *self.breaks.last().unwrap_or(&0.0)
    }

    pub fn segments(&self) -> &[PathSegment] {
        &self.segments
    }

    fn segment_index(&self, s: f64) -> usize {
        if self.segments.is_empty() {
            return 0;
        }
        let mut i = 0;
        while i + 1 < self.segments.len() && s >= self.breaks[i + 1] {
            i += 1;
        }
        i
    }

    /// Path curvature at arc length `s`. Constant extrapolation beyond the
    /// ends.
    pub fn curvature(&self, s: f64) -> f64 {
        if self.segments.is_empty() {
            return 0.0;
        }
        if s <= 0.0 {
            return self.segments[0].curvature();
        }
        self.segments[self.segment_index(s)].curvature()
    }

    /// Inertial pose `(X, Y, psi_FS)` of the path point at arc length `s`.
    /// Extrapolates along the first/last tangent beyond the ends.
    pub fn pose(&self, s: f64) -> (f64, f64, f64) {
        if self.segments.is_empty() {
            let (x, y, h) = self.knots[0];
            return (x, y, h);
        }
        let (s_clamped, overshoot) = if s < 0.0 {
            (0.0, s)
        } else if s > self.total_length() {
            (self.total_length(), s - self.total_length())
        } else {
            (s, 0.0)
        };
        let i = self.segment_index(s_clamped);
        let ds = s_clamped - self.breaks[i];
        let (x0, y0, h0) = self.knots[i];
        let (mut x, mut y, h) = match self.segments[i] {
            PathSegment::Straight { .. } => (x0 + ds * math::cos(h0), y0 + ds * math::sin(h0), h0),
            PathSegment::Arc { radius, angle } => {
                let side = angle.signum();
                let (cx, cy) = (
                    x0 - radius * side * math::sin(h0),
                    y0 + radius * side * math::cos(h0),
                );
                let h_new = h0 + side * ds / radius;
                (
                    cx + radius * side * math::sin(h_new),
                    cy - radius * side * math::cos(h_new),
                    h_new,
                )
            }
        };
        if overshoot != 0.0 {
            x += overshoot * math::cos(h);
            y += overshoot * math::sin(h);
        }
        (x, y, h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use core::f64::consts::FRAC_PI_2;

    #[test]
    fn straight_aligned_rates() {
        let err = PathError::default();
        let (s_dot, e_dot, pb_dot) = error_rates(&err, 0.0, (15.0, 0.0, 0.0)).unwrap();
        assert_eq!((s_dot, e_dot, pb_dot), (15.0, 0.0, 0.0));
    }

    #[test]
    fn perpendicular_heading_rates() {
        let err = PathError {
            psi_bar: FRAC_PI_2,
            ..Default::default()
        };
        let (s_dot, e_dot, pb_dot) = error_rates(&err, 0.0, (10.0, 0.0, 0.2)).unwrap();
        assert_abs_diff_eq!(s_dot, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e_dot, 10.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pb_dot, 0.2, epsilon = 1e-12);
    }

    #[test]
    fn curved_path_rates_by_hand() {
        // 9/(1 - 0.1*1) = 10; psi_bar_dot = 0 - 0.1*10 = -1
        let err = PathError {
            e: 1.0,
            ..Default::default()
        };
        let (s_dot, e_dot, pb_dot) = error_rates(&err, 0.1, (9.0, 0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(s_dot, 10.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e_dot, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pb_dot, -1.0, epsilon = 1e-12);
    }

    #[test]
    fn singularity_detected() {
        let err = PathError {
            e: 10.0,
            ..Default::default()
        };
        assert!(matches!(
            error_rates(&err, 0.1, (1.0, 0.0, 0.0)),
            Err(FrenetError::FrenetSingularity(_))
        ));
    }

    #[test]
    fn rates_solve_the_linear_system() {
        // Residual ||FS * e_dot - R * p|| must vanish for random samples.
        let mut seed = 0x9e3779b97f4a7c15u64;
        let mut rnd = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((seed >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        for _ in 0..200 {
            let err = PathError {
                s: rnd() * 50.0,
                e: rnd() * 2.0,
                psi_bar: rnd() * 1.5,
            };
            let kappa = rnd() * 0.2;
            if (1.0 - err.e * kappa).abs() <= 1e-3 {
                continue;
            }
            let p = (5.0 + rnd().abs() * 20.0, rnd() * 3.0, rnd());
            let (s_dot, e_dot, pb_dot) = error_rates(&err, kappa, p).unwrap();
            let (sp, cp) = (err.psi_bar.sin(), err.psi_bar.cos());
            let rp = [p.0 * cp - p.1 * sp, p.0 * sp + p.1 * cp, p.2];
            let fs_edot = [
                (1.0 - err.e * kappa) * s_dot,
                e_dot,
                kappa * s_dot + pb_dot,
            ];
            for i in 0..3 {
                assert!((fs_edot[i] - rp[i]).abs() < 1e-12 * (1.0 + rp[i].abs()));
            }
        }
    }

    #[test]
    fn straight_path_map() {
        let p = ReferencePath::straight_x(100.0);
        assert_eq!(p.curvature(12.0), 0.0);
        let (x, y, h) = p.pose(12.0);
        assert_eq!((x, y, h), (12.0, 0.0, 0.0));
    }

    #[test]
    fn quarter_circle_curvature() {
        let p = ReferencePath::new(
            (0.0, 0.0, 0.0),
            &[PathSegment::Arc {
                radius: 6.0,
                angle: FRAC_PI_2,
            }],
        )
        .unwrap();
        assert_abs_diff_eq!(p.curvature(1.0), 1.0 / 6.0, epsilon = 1e-15);
    }

    #[test]
    fn composed_path_endpoint() {
        // straight 10, left quarter circle R=6, straight 5: heading pi/2,
        // endpoint from composed rigid transforms: (16, 11).
        let p = ReferencePath::new(
            (0.0, 0.0, 0.0),
            &[
                PathSegment::Straight { length: 10.0 },
                PathSegment::Arc {
                    radius: 6.0,
                    angle: FRAC_PI_2,
                },
                PathSegment::Straight { length: 5.0 },
            ],
        )
        .unwrap();
        let (x, y, h) = p.pose(p.total_length());
        assert_abs_diff_eq!(h, FRAC_PI_2, epsilon = 1e-12);
        assert_abs_diff_eq!(x, 16.0, epsilon = 1e-12);
        assert_abs_diff_eq!(y, 11.0, epsilon = 1e-12);
    }

    #[test]
    fn arc_length_consistency() {
        // integrating ||d(X,Y)/ds|| across the path returns its length
        let p = ReferencePath::new(
            (1.0, -2.0, 0.3),
            &[
                PathSegment::Straight { length: 7.0 },
                PathSegment::Arc {
                    radius: 4.0,
                    angle: -1.1,
                },
                PathSegment::Straight { length: 3.0 },
            ],
        )
        .unwrap();
        let total = p.total_length();
        let n = 20000;
        let mut len = 0.0;
        let mut prev = p.pose(0.0);
        for i in 1..=n {
            let s = total * (i as f64) / (n as f64);
            let cur = p.pose(s);
            len += ((cur.0 - prev.0).powi(2) + (cur.1 - prev.1).powi(2)).sqrt();
            prev = cur;
        }
        assert!((len - total).abs() / total < 1e-6);
    }

    #[test]
    fn bad_geometry_rejected() {
        assert!(ReferencePath::new(
            (0.0, 0.0, 0.0),
            &[PathSegment::Arc {
                radius: -1.0,
                angle: 1.0
            }]
        )
        .is_err());
        assert!(
            ReferencePath::new((0.0, 0.0, 0.0), &[PathSegment::Straight { length: 0.0 }]).is_err()
        );
    }

    #[test]
    fn matches_pose_rows_on_straight_path() {
        // kappa = 0 and psi_bar = psi_B: the error rates coincide with the
        // inertial pose rows of the vehicle EOM.
        use crate::vehicle::{eom_nonlinear, BodyState, EomOptions, VehicleParams};
        let p = VehicleParams::default();
        let s = BodyState {
            vx: 12.0,
            vy: -0.8,
            q: 0.25,
            psi: 0.4,
            ..Default::default()
        };
        let dx = eom_nonlinear(&s, 0.02, 0.0, 0.0, &p, EomOptions::default()).unwrap();
        let err = PathError {
            psi_bar: s.psi,
            ..Default::default()
        };
        let (s_dot, e_dot, pb_dot) = error_rates(&err, 0.0, (s.vx, s.vy, s.q)).unwrap();
        assert_abs_diff_eq!(s_dot, dx[3], epsilon = 1e-12);
        assert_abs_diff_eq!(e_dot, dx[4], epsilon = 1e-12);
        assert_abs_diff_eq!(pb_dot, dx[5], epsilon = 1e-12);
    }
}
