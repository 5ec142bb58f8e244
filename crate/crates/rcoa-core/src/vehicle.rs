//! Single-track (bicycle) vehicle dynamics with a brush tire model.
//!
//! The 3-DOF rigid-body model tracks body-frame velocities `(vx, vy)`, yaw
//! rate `q`, and the inertial pose `(X, Y, psi)`. Tire forces come from the
//! brush model, either pure lateral slip (free rolling) or combined
//! longitudinal/lateral slip when slip-ratio inputs are present. A linear
//! constant-speed state-space model is available for the reduced problems.

use crate::math;
use thiserror::Error;

/// Errors from dynamics evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum VehicleError {
    /// Slip angles and the EOM are only defined for forward motion.
    #[error("longitudinal speed must be positive, got {0}")]
    NonPositiveSpeed(f64),
    /// Slip ratio at or below -1 makes the slip vector degenerate.
    #[error("slip ratio must be greater than -1, got {0}")]
    DegenerateSlip(f64),
    /// Parameter record failed validation.
    #[error("invalid vehicle parameter: {0}")]
    BadParameter(&'static str),
}

/// Mass, geometry and tire parameters of the single-track model.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VehicleParams {
    /// Mass (kg).
    pub m: f64,
    /// Yaw moment of inertia (kg m^2).
    pub iz: f64,
    /// CG-to-front-axle distance (m).
    pub a: f64,
    /// CG-to-rear-axle distance (m).
    pub b: f64,
    /// Front cornering stiffness (N/rad).
    pub c_f: f64,
    /// Rear cornering stiffness (N/rad).
    pub c_r: f64,
    /// Tire-road friction coefficient.
    pub mu: f64,
    /// Gravitational acceleration (m/s^2).
    pub g: f64,
}

impl Default for VehicleParams {
    /// Mid-size sedan parameters used by the bundled scenarios.
    fn default() -> Self {
        VehicleParams {
            m: 1636.364,
            iz: 925.02,
            a: 0.9803,
            b: 1.153,
            c_f: 59649.0,
            c_r: 61138.0,
            mu: 0.9,
            g: 9.81,
        }
    }
}

impl VehicleParams {
    /// Checks that every parameter is strictly positive.
    pub fn validate(&self) -> Result<(), VehicleError> {
        let fields = [
            (self.m, "m"),
            (self.iz, "iz"),
            (self.a, "a"),
            (self.b, "b"),
            (self.c_f, "c_f"),
            (self.c_r, "c_r"),
            (self.mu, "mu"),
            (self.g, "g"),
        ];
        for (v, name) in fields {
            if !(v > 0.0) || !v.is_finite() {
                return Err(VehicleError::BadParameter(name));
            }
        }
        Ok(())
    }

    /// Static front axle load (no load transfer).
    pub fn fz_front(&self) -> f64 {
        self.m * self.g * self.b / (self.a + self.b)
    }

    /// Static rear axle load (no load transfer).
    pub fn fz_rear(&self) -> f64 {
        self.m * self.g * self.a / (self.a + self.b)
    }

    /// Brush stiffness factor theta = C / (3 mu Fz) for the front tire.
    pub fn theta_front(&self) -> f64 {
        self.c_f / (3.0 * self.mu * self.fz_front())
    }

    /// Brush stiffness factor for the rear tire.
    pub fn theta_rear(&self) -> f64 {
        self.c_r / (3.0 * self.mu * self.fz_rear())
    }

    /// Sliding-onset slip angle alpha_sl = atan(1/theta) for the front tire.
    pub fn alpha_sl_front(&self) -> f64 {
        math::atan(1.0 / self.theta_front())
    }

    /// Sliding-onset slip angle for the rear tire.
    pub fn alpha_sl_rear(&self) -> f64 {
        math::atan(1.0 / self.theta_rear())
    }

    /// Sliding threshold sigma_sl = 1/theta of the combined-slip model.
    pub fn sigma_sl_front(&self) -> f64 {
        1.0 / self.theta_front()
    }

    /// Rear-tire sliding threshold.
    pub fn sigma_sl_rear(&self) -> f64 {
        1.0 / self.theta_rear()
    }
}

/// Continuous body state: velocities in the body frame, pose in the inertial
/// frame.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BodyState {
    /// Longitudinal velocity (m/s); must stay positive for slip evaluation.
    pub vx: f64,
    /// Lateral velocity (m/s).
    pub vy: f64,
    /// Yaw rate (rad/s).
    pub q: f64,
    /// Inertial X position (m).
    pub x: f64,
    /// Inertial Y position (m).
    pub y: f64,
    /// Heading (rad).
    pub psi: f64,
}

impl BodyState {
    pub fn from_array(v: [f64; 6]) -> Self {
        BodyState {
            vx: v[0],
            vy: v[1],
            q: v[2],
            x: v[3],
            y: v[4],
            psi: v[5],
        }
    }

    pub fn to_array(self) -> [f64; 6] {
        [self.vx, self.vy, self.q, self.x, self.y, self.psi]
    }
}

/// Planar tire force in the wheel frame (N).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TireForce {
    pub fx: f64,
    pub fy: f64,
}

impl TireForce {
    pub fn magnitude(&self) -> f64 {
        math::hypot(self.fx, self.fy)
    }
}

/// Slip-angle kinematics: exact arctangent or the small-angle approximation
/// `tan(x) ~ x` applied to both the slip angles and the tire slip components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SlipModel {
    #[default]
    Exact,
    SmallAngle,
}

/// Lateral tire force law used by the free-rolling EOM.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LateralTireModel {
    /// Cubic brush law saturating at mu Fz.
    #[default]
    Brush,
    /// Linear law Fy = -C alpha (no saturation).
    Linear,
}

/// Options for [`eom_nonlinear`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EomOptions {
    pub slip: SlipModel,
    pub tire: LateralTireModel,
}

/// Front and rear slip angles of a front-steered vehicle.
///
/// `alpha_f = atan((vy + a q)/vx) - delta`, `alpha_r = atan((vy - b q)/vx)`;
/// with [`SlipModel::SmallAngle`] the arctangent is dropped.
pub fn slip_angles(
    s: &BodyState,
    delta: f64,
    p: &VehicleParams,
    slip: SlipModel,
) -> Result<(f64, f64), VehicleError> {
    if !(s.vx > 0.0) {
        return Err(VehicleError::NonPositiveSpeed(s.vx));
    }
    let zf = (s.vy + p.a * s.q) / s.vx;
    let zr = (s.vy - p.b * s.q) / s.vx;
    let (af, ar) = match slip {
        SlipModel::Exact => (math::atan(zf), math::atan(zr)),
        SlipModel::SmallAngle => (zf, zr),
    };
    Ok((af - delta, ar))
}

fn sigma_y(alpha: f64, slip: SlipModel) -> f64 {
    match slip {
        SlipModel::Exact => math::tan(alpha),
        SlipModel::SmallAngle => alpha,
    }
}

/// Pure lateral brush tire force, sign opposing slip.
///
/// Below the sliding onset the magnitude follows the cubic brush law
/// `3 mu Fz theta sy (1 - |theta sy| + (theta sy)^2 / 3)` with
/// `sy = tan(alpha)`; beyond it the force saturates at `mu Fz`.
pub fn brush_lateral(alpha: f64, fz: f64, mu: f64, c_alpha: f64) -> f64 {
    brush_lateral_with(alpha, fz, mu, c_alpha, SlipModel::Exact)
}

/// [`brush_lateral`] with a selectable slip linearization.
pub fn brush_lateral_with(alpha: f64, fz: f64, mu: f64, c_alpha: f64, slip: SlipModel) -> f64 {
    let theta = c_alpha / (3.0 * mu * fz);
    let alpha_sl = math::atan(1.0 / theta);
    if alpha.abs() > alpha_sl {
        return -mu * fz * alpha.signum();
    }
    let ts = theta * sigma_y(alpha, slip);
    let mag = 3.0 * mu * fz * ts * (1.0 - ts.abs() + ts * ts / 3.0);
    -mag
}

/// Combined-slip brush tire force for an isotropic tire.
///
/// The slip vector is `sigma = (kappa, tan(alpha)) / (1 + kappa)`; the force
/// magnitude follows the cubic law up to `sigma_sl = 1/theta` and saturates
/// at `mu Fz` beyond it. The force direction opposes the slip vector.
pub fn brush_combined(
    alpha: f64,
    kappa: f64,
    fz: f64,
    mu: f64,
    c: f64,
) -> Result<TireForce, VehicleError> {
    brush_combined_with(alpha, kappa, fz, mu, c, SlipModel::Exact)
}

/// [`brush_combined`] with a selectable slip linearization.
pub fn brush_combined_with(
    alpha: f64,
    kappa: f64,
    fz: f64,
    mu: f64,
    c: f64,
    slip: SlipModel,
) -> Result<TireForce, VehicleError> {
    if kappa <= -1.0 {
        return Err(VehicleError::DegenerateSlip(kappa));
    }
    let sx = kappa / (1.0 + kappa);
    let sy = sigma_y(alpha, slip) / (1.0 + kappa);
    let norm = math::hypot(sx, sy);
    if norm == 0.0 {
        return Ok(TireForce { fx: 0.0, fy: 0.0 });
    }
    let theta = c / (3.0 * mu * fz);
    let sigma_sl = 1.0 / theta;
    let mag = if norm <= sigma_sl {
        let ts = theta * norm;
        mu * fz * (3.0 * ts - 3.0 * ts * ts + ts * ts * ts)
    } else {
        mu * fz
    };
    Ok(TireForce {
        fx: -mag * sx / norm,
        fy: -mag * sy / norm,
    })
}

/// Front/rear tire forces for the current state and inputs.
///
/// With `kappa_f = kappa_r = 0` the wheels are free rolling: longitudinal
/// force is identically zero and the lateral force follows the configured
/// lateral model. Otherwise the combined-slip brush model applies.
pub fn tire_forces(
    s: &BodyState,
    delta: f64,
    kappa_f: f64,
    kappa_r: f64,
    p: &VehicleParams,
    opts: EomOptions,
) -> Result<(TireForce, TireForce), VehicleError> {
    let (af, ar) = slip_angles(s, delta, p, opts.slip)?;
    let free_rolling = kappa_f == 0.0 && kappa_r == 0.0;
    if free_rolling {
        let fyf = match opts.tire {
            LateralTireModel::Brush => {
                brush_lateral_with(af, p.fz_front(), p.mu, p.c_f, opts.slip)
            }
            LateralTireModel::Linear => -p.c_f * af,
        };
        let fyr = match opts.tire {
            LateralTireModel::Brush => brush_lateral_with(ar, p.fz_rear(), p.mu, p.c_r, opts.slip),
            LateralTireModel::Linear => -p.c_r * ar,
        };
        Ok((TireForce { fx: 0.0, fy: fyf }, TireForce { fx: 0.0, fy: fyr }))
    } else {
        let front = brush_combined_with(af, kappa_f, p.fz_front(), p.mu, p.c_f, opts.slip)?;
        let rear = brush_combined_with(ar, kappa_r, p.fz_rear(), p.mu, p.c_r, opts.slip)?;
        Ok((front, rear))
    }
}

/// Nonlinear 3-DOF equations of motion plus pose kinematics.
///
/// Returns `(vx_dot, vy_dot, q_dot, X_dot, Y_dot, psi_dot)`. Front-wheel
/// forces act through the steering angle `delta`; the pose rows rotate the
/// body velocities into the inertial frame.
pub fn eom_nonlinear(
    s: &BodyState,
    delta: f64,
    kappa_f: f64,
    kappa_r: f64,
    p: &VehicleParams,
    opts: EomOptions,
) -> Result<[f64; 6], VehicleError> {
    let (front, rear) = tire_forces(s, delta, kappa_f, kappa_r, p, opts)?;
    let (sd, cd) = (math::sin(delta), math::cos(delta));
    let vx_dot = (front.fx * cd + rear.fx - front.fy * sd) / p.m + s.q * s.vy;
    let vy_dot = (front.fy * cd + rear.fy + front.fx * sd) / p.m - s.q * s.vx;
    let q_dot = (p.a * (front.fy * cd + front.fx * sd) - p.b * rear.fy) / p.iz;
    let (sp, cp) = (math::sin(s.psi), math::cos(s.psi));
    Ok([
        vx_dot,
        vy_dot,
        q_dot,
        s.vx * cp - s.vy * sp,
        s.vx * sp + s.vy * cp,
        s.q,
    ])
}

/// Constant-speed linear single-track model `xL_dot = A xL + B delta` with
/// state `xL = (vy, q, psi)`.
///
/// The heading row integrates the yaw rate: `psi_dot = q`.
pub fn linear_ab(p: &VehicleParams, u: f64) -> Result<([[f64; 3]; 3], [f64; 3]), VehicleError> {
    if !(u > 0.0) {
        return Err(VehicleError::NonPositiveSpeed(u));
    }
    let a = [
        [
            -(p.c_f + p.c_r) / (p.m * u),
            (p.b * p.c_r - p.a * p.c_f) / (p.m * u) - u,
            0.0,
        ],
        [
            -(p.a * p.c_f - p.b * p.c_r) / (p.iz * u),
            -(p.a * p.a * p.c_f + p.b * p.b * p.c_r) / (p.iz * u),
            0.0,
        ],
        [0.0, 1.0, 0.0],
    ];
    let b = [p.c_f / p.m, p.a * p.c_f / p.iz, 0.0];
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn params() -> VehicleParams {
        VehicleParams::default()
    }

    #[test]
    fn static_axle_loads_sum_to_weight() {
        let p = params();
        let total = p.fz_front() + p.fz_rear();
        assert!((total - p.m * p.g).abs() / (p.m * p.g) < 1e-9);
    }

    #[test]
    fn slip_angles_straight_rolling_is_zero() {
        let p = params();
        let s = BodyState {
            vx: 15.0,
            ..Default::default()
        };
        let (af, ar) = slip_angles(&s, 0.0, &p, SlipModel::Exact).unwrap();
        assert_eq!((af, ar), (0.0, 0.0));
    }

    #[test]
    fn slip_angles_match_direct_evaluation() {
        // atan((1 + 0.9803*0.1)/15) and atan((1 - 1.153*0.1)/15), frozen from
        // scalar arithmetic.
        let p = params();
        let s = BodyState {
            vx: 15.0,
            vy: 1.0,
            q: 0.1,
            ..Default::default()
        };
        let (af, ar) = slip_angles(&s, 0.0, &p, SlipModel::Exact).unwrap();
        assert_abs_diff_eq!(af, 0.073072, epsilon = 1e-6);
        assert_abs_diff_eq!(ar, 0.058912, epsilon = 1e-6);
    }

    #[test]
    fn slip_angles_pure_steering_offset() {
        let p = params();
        let s = BodyState {
            vx: 15.0,
            ..Default::default()
        };
        let (af, ar) = slip_angles(&s, 0.1, &p, SlipModel::Exact).unwrap();
        assert_abs_diff_eq!(af, -0.1, epsilon = 1e-12);
        assert_eq!(ar, 0.0);
    }

    #[test]
    fn slip_angles_reject_nonpositive_speed() {
        let p = params();
        let s = BodyState::default();
        assert!(matches!(
            slip_angles(&s, 0.0, &p, SlipModel::Exact),
            Err(VehicleError::NonPositiveSpeed(_))
        ));
    }

    #[test]
    fn brush_lateral_zero_slip() {
        assert_eq!(brush_lateral(0.0, 8000.0, 0.9, 59649.0), 0.0);
    }

    #[test]
    fn brush_lateral_cubic_value() {
        // theta = 1 (c = 3 mu fz), tan(alpha) = 0.5 so theta*sigma = 0.5:
        // 3*0.5*(1 - 0.5 + 0.25/3) = 0.875.
        let alpha = math::atan(0.5);
        let fy = brush_lateral(alpha, 1.0, 1.0, 3.0);
        assert_abs_diff_eq!(fy.abs(), 0.875, epsilon = 1e-12);
        assert!(fy < 0.0, "force must oppose positive slip");
    }

    #[test]
    fn brush_lateral_saturates_past_onset() {
        let theta: f64 = 1.0;
        let alpha_sl = math::atan(1.0 / theta);
        let fy = brush_lateral(alpha_sl + 1e-6, 1.0, 1.0, 3.0);
        assert_eq!(fy, -1.0);
    }

    #[test]
    fn brush_combined_zero_slip_vector() {
        let f = brush_combined(0.0, 0.0, 1.0, 1.0, 3.0).unwrap();
        assert_eq!((f.fx, f.fy), (0.0, 0.0));
    }

    #[test]
    fn brush_combined_pure_lateral_reduction_value() {
        let alpha = math::atan(0.5);
        let f = brush_combined(alpha, 0.0, 1.0, 1.0, 3.0).unwrap();
        assert_eq!(f.fx, 0.0);
        assert_abs_diff_eq!(f.fy.abs(), 0.875, epsilon = 1e-12);
    }

    #[test]
    fn brush_combined_full_sliding() {
        // theta = 1 so sigma_sl = 1; kappa = 4 and tan(1.4)/5 ~ 1.16 give
        // ||sigma|| ~ 1.41, well past the threshold.
        let f = brush_combined(1.4, 4.0, 1.0, 1.0, 3.0).unwrap();
        assert_abs_diff_eq!(f.magnitude(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn brush_combined_rejects_degenerate_slip() {
        assert!(matches!(
            brush_combined(0.0, -1.0, 1.0, 1.0, 3.0),
            Err(VehicleError::DegenerateSlip(_))
        ));
    }

    #[test]
    fn friction_circle_holds_on_grid() {
        let p = params();
        let (fz, mu, c) = (p.fz_front(), p.mu, p.c_f);
        for i in 0..60 {
            for j in 0..60 {
                let alpha = -0.6 + 1.2 * (i as f64) / 59.0;
                let kappa = -0.8 + 1.6 * (j as f64) / 59.0;
                let f = brush_combined(alpha, kappa, fz, mu, c).unwrap();
                assert!(f.magnitude() <= mu * fz + 1e-9);
            }
        }
    }

    #[test]
    fn force_is_continuous_at_sliding_onset() {
        let p = params();
        let (fz, mu, c) = (p.fz_front(), p.mu, p.c_f);
        let theta = p.theta_front();
        let sigma_sl = 1.0 / theta;
        let eps = 1e-6;
        // alpha with |sigma| = sigma_sl - eps, kappa = 0
        let alpha = math::atan(sigma_sl - eps);
        let f = brush_combined(alpha, 0.0, fz, mu, c).unwrap();
        assert!((f.magnitude() - mu * fz).abs() < 1e-4 * mu * fz);
    }

    #[test]
    fn combined_reduces_to_pure_lateral_below_onset() {
        let p = params();
        let (fz, mu, c) = (p.fz_front(), p.mu, p.c_f);
        let alpha_sl = p.alpha_sl_front();
        for i in 0..50 {
            let alpha = -0.95 * alpha_sl + 1.9 * alpha_sl * (i as f64) / 49.0;
            let f = brush_combined(alpha, 0.0, fz, mu, c).unwrap();
            let fy = brush_lateral(alpha, fz, mu, c);
            assert!((f.fy.abs() - fy.abs()).abs() < 1e-9 * mu * fz);
        }
    }

    #[test]
    fn small_slip_slope_equals_minus_cornering_stiffness() {
        let p = params();
        let (fz, mu, c) = (p.fz_front(), p.mu, p.c_f);
        let h = 1e-7;
        let slope = (brush_lateral(h, fz, mu, c) - brush_lateral(-h, fz, mu, c)) / (2.0 * h);
        assert!((slope + c).abs() / c < 1e-3);
    }

    #[test]
    fn eom_straight_line_symmetry() {
        let p = params();
        let s = BodyState {
            vx: 15.0,
            ..Default::default()
        };
        let dx = eom_nonlinear(&s, 0.0, 0.0, 0.0, &p, EomOptions::default()).unwrap();
        assert_eq!(dx[1], 0.0);
        assert_eq!(dx[2], 0.0);
        assert_eq!(dx[3], 15.0);
    }

    #[test]
    fn eom_matches_hand_composed_tire_forces() {
        // Free rolling, delta = 0.05: recompute the tire forces with the
        // scalar formulas and push them through the rigid-body equations.
        let p = params();
        let s = BodyState {
            vx: 15.0,
            ..Default::default()
        };
        let delta = 0.05;
        let af = math::atan(0.0 / 15.0) - delta;
        let theta_f = p.c_f / (3.0 * p.mu * p.fz_front());
        let ts = theta_f * math::tan(af);
        let fyf = -(3.0 * p.mu * p.fz_front() * ts * (1.0 - ts.abs() + ts * ts / 3.0));
        let fyr = 0.0; // rear slip angle is zero at this trim
        let vy_dot = (fyf * math::cos(delta) + fyr) / p.m - 0.0 * 15.0;
        let q_dot = (p.a * fyf * math::cos(delta) - p.b * fyr) / p.iz;

        let dx = eom_nonlinear(&s, delta, 0.0, 0.0, &p, EomOptions::default()).unwrap();
        assert_abs_diff_eq!(dx[1], vy_dot, epsilon = 1e-9);
        assert_abs_diff_eq!(dx[2], q_dot, epsilon = 1e-9);
        // vx row only carries the -Fyf sin(delta) term when free rolling
        assert_abs_diff_eq!(dx[0], -fyf * math::sin(delta) / p.m, epsilon = 1e-9);
    }

    #[test]
    fn pose_rows_rotate_by_heading() {
        let p = params();
        let s = BodyState {
            vx: 10.0,
            psi: core::f64::consts::FRAC_PI_2,
            ..Default::default()
        };
        let dx = eom_nonlinear(&s, 0.0, 0.0, 0.0, &p, EomOptions::default()).unwrap();
        assert_abs_diff_eq!(dx[3], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(dx[4], 10.0, epsilon = 1e-12);
    }

    #[test]
    fn linear_ab_matches_direct_arithmetic() {
        let p = params();
        let (a, b) = linear_ab(&p, 15.0).unwrap();
        assert_abs_diff_eq!(b[0], 36.452, epsilon = 1e-3);
        assert_abs_diff_eq!(b[1], 63.214, epsilon = 1e-3);
        assert_eq!(b[2], 0.0);
        assert_abs_diff_eq!(a[0][0], -(p.c_f + p.c_r) / (p.m * 15.0), epsilon = 1e-12);
        assert_abs_diff_eq!(a[0][0], -4.9210, epsilon = 1e-3);
        assert_eq!(a[2], [0.0, 1.0, 0.0]);
    }

    #[test]
    fn linear_ab_rejects_nonpositive_speed() {
        assert!(linear_ab(&params(), 0.0).is_err());
    }

    #[test]
    fn nonlinear_jacobian_matches_linear_model() {
        // Linear-tire, free-rolling EOM restricted to (vy, q) about the
        // symmetric trim must reproduce the constant-speed A-block.
        let p = params();
        let u = 15.0;
        let (a_lin, b_lin) = linear_ab(&p, u).unwrap();
        let opts = EomOptions {
            slip: SlipModel::SmallAngle,
            tire: LateralTireModel::Linear,
        };
        let f = |vy: f64, q: f64, delta: f64| -> [f64; 2] {
            let s = BodyState {
                vx: u,
                vy,
                q,
                ..Default::default()
            };
            let dx = eom_nonlinear(&s, delta, 0.0, 0.0, &p, opts).unwrap();
            [dx[1], dx[2]]
        };
        let h = 1e-6;
        for (col, idx) in [(0usize, 0usize), (1, 1)] {
            let (mut lo, mut hi) = ([0.0, 0.0, 0.0], [0.0, 0.0, 0.0]);
            lo[idx] = -h;
            hi[idx] = h;
            let fp = f(hi[0], hi[1], hi[2]);
            let fm = f(lo[0], lo[1], lo[2]);
            for row in 0..2 {
                let d = (fp[row] - fm[row]) / (2.0 * h);
                assert_abs_diff_eq!(d, a_lin[row][col], epsilon = 1e-6);
            }
        }
        // Input column against B
        let fp = f(0.0, 0.0, h);
        let fm = f(0.0, 0.0, -h);
        for row in 0..2 {
            let d = (fp[row] - fm[row]) / (2.0 * h);
            assert_abs_diff_eq!(d, b_lin[row], epsilon = 1e-5);
        }
    }
}
