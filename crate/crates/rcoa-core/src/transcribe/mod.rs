//! Multiple-shooting transcription: RK4 integration, L1 epigraph rows,
//! big-M sizing, and the open-loop / closed-loop problem builders.

mod mpc;
mod openloop;

pub use mpc::{
    build_mpc_step, mpc_dynamics, mpc_reference, MpcPhase, MpcProblem, MpcStepInput, MPC_NU,
    MPC_NX,
};
pub use openloop::{build_open_loop, OpenLoopProblem};

use alloc::sync::Arc;

/// Full nonlinear plant dynamics for a scenario (free rolling, brush tire).
pub fn openloop_plant(
    cfg: &crate::scenario::ScenarioConfig,
) -> Arc<dyn Fn(&[f64], &[f64], &mut [f64]) + Send + Sync> {
    openloop::plant_dynamics(cfg.vehicle, cfg.small_angle)
}

use crate::oa::BigM;
use crate::program::{ConvexProgram, DEFAULT_BOUND};
use crate::scenario::ScenarioConfig;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TranscribeError {
    #[error("configuration error: {0}")]
    Config(String),
}

impl From<crate::scenario::ValidationError> for TranscribeError {
    fn from(e: crate::scenario::ValidationError) -> Self {
        TranscribeError::Config(alloc::format!("{e}"))
    }
}

/// Classical fourth-order Runge-Kutta step applied `substeps` times with
/// stride `h / substeps`; the input is held constant over the interval.
pub fn rk4_step<E>(
    f: &mut dyn FnMut(&[f64], &[f64], &mut [f64]) -> Result<(), E>,
    x: &[f64],
    u: &[f64],
    h: f64,
    substeps: usize,
) -> Result<Vec<f64>, E> {
    let n = x.len();
    let hs = h / substeps as f64;
    let mut state = x.to_vec();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    for _ in 0..substeps {
        f(&state, u, &mut k1)?;
        for i in 0..n {
            tmp[i] = state[i] + 0.5 * hs * k1[i];
        }
        f(&tmp, u, &mut k2)?;
        for i in 0..n {
            tmp[i] = state[i] + 0.5 * hs * k2[i];
        }
        f(&tmp, u, &mut k3)?;
        for i in 0..n {
            tmp[i] = state[i] + hs * k3[i];
        }
        f(&tmp, u, &mut k4)?;
        for i in 0..n {
            state[i] += hs / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    Ok(state)
}

/// [`rk4_step`] over a total dynamics function.
pub fn rk4_total(
    f: &(dyn Fn(&[f64], &[f64], &mut [f64]) + Sync),
    x: &[f64],
    u: &[f64],
    h: f64,
    substeps: usize,
) -> Vec<f64> {
    let mut g = |x: &[f64], u: &[f64], out: &mut [f64]| -> Result<(), core::convert::Infallible> {
        f(x, u, out);
        Ok(())
    };
    match rk4_step(&mut g, x, u, h, substeps) {
        Ok(v) => v,
    }
}

/// One affine term entering an L1 objective: `weight * |coeffs . x + offset|`.
#[derive(Debug, Clone)]
pub struct L1Term {
    pub coeffs: Vec<(usize, f64)>,
    pub offset: f64,
    pub weight: f64,
}

/// Epigraph reformulation of a weighted L1 sum: per term a new variable `t`
/// with `t >= z` and `t >= -z` and cost `weight * t`. Returns the indices of
/// the auxiliary variables.
pub fn l1_epigraph(prog: &mut ConvexProgram, terms: &[L1Term]) -> Vec<usize> {
    let mut aux = Vec::with_capacity(terms.len());
    for term in terms {
        let t = prog.add_var(term.weight, 0.0, DEFAULT_BOUND);
        let mut up: Vec<(usize, f64)> = term.coeffs.clone();
        up.push((t, -1.0));
        prog.add_ineq(up, -term.offset);
        let mut down: Vec<(usize, f64)> = term.coeffs.iter().map(|&(j, a)| (j, -a)).collect();
        down.push((t, -1.0));
        prog.add_ineq(down, term.offset);
        aux.push(t);
    }
    aux
}

/// Axis-aligned bounding box of everything a scenario can reach: initial
/// position, obstacle extents, path extent, plus the distance covered at the
/// speed limit over the horizon.
pub fn position_box(cfg: &ScenarioConfig) -> (f64, f64, f64, f64) {
    let mut xs = vec![cfg.initial.x];
    let mut ys = vec![cfg.initial.y];
    let reach = cfg.bounds.u_max.max(cfg.initial.vx) * cfg.horizon.t * 1.2 + 5.0;
    xs.push(cfg.initial.x + reach);
    xs.push(cfg.initial.x - 5.0);
    for spec in &cfg.obstacles {
        if let Ok(obs) = spec.to_obstacle() {
            match obs {
                crate::obstacle::Obstacle::Rect(r) => {
                    xs.push(r.x_min);
                    xs.push(r.x_max);
                    ys.push(r.y_min);
                    ys.push(r.y_max);
                }
                crate::obstacle::Obstacle::Ellipse(e) => {
                    xs.push(e.c.0 - 5.0);
                    xs.push(e.c.0 + 5.0);
                    ys.push(e.c.1 - 5.0);
                    ys.push(e.c.1 + 5.0);
                }
                crate::obstacle::Obstacle::Moving(m) => {
                    for t in [0.0, cfg.horizon.t, 2.0 * cfg.horizon.t, 8.0] {
                        let b = m.world_box(t);
                        xs.push(b.x_min);
                        xs.push(b.x_max);
                        ys.push(b.y_min);
                        ys.push(b.y_max);
                    }
                }
            }
        }
    }
    if let Ok(path) = cfg.path.build() {
        let len = path.total_length();
        for i in 0..=20 {
            let (x, y, _) = path.pose(len * i as f64 / 20.0);
            xs.push(x);
            ys.push(y);
        }
    }
    let fmin = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    let fmax = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (
        fmin(&xs) - 10.0,
        fmax(&xs) + 10.0,
        fmin(&ys) - 10.0,
        fmax(&ys) + 10.0,
    )
}

/// Big-M constants for a scenario: explicit override, or auto-sized from
/// the position-box diagonal. The x-activation constants are kept much
/// larger than the vertical ones: every node left (right) of a band pays
/// the switch ramp `(x_min - X)/M1`, so a small `M1` turns the activation
/// rows into a potential pulling the trajectory toward the obstacles, while
/// `M3` directly sets the strength of the vertical conditional.
pub fn scenario_big_m(cfg: &ScenarioConfig) -> BigM {
    if let Some(m) = cfg.big_m {
        return BigM::uniform(m);
    }
    let (x0, x1, y0, y1) = position_box(cfg);
    // The x constants stay proportional to the reachable x span so the
    // activation ramps (and the cost pull they exert on every node) stay
    // shallow. The vertical constants are floored at a fifth of the x
    // constants: M3/M1 is the release slope of the conditional, and a slope
    // of 0.2 keeps one obstacle's approach ramp from cutting through
    // another's face in the bundled geometries.
    let mx = 1.5 * (x1 - x0);
    let my = (1.5 * (y1 - y0)).max(0.2 * mx);
    BigM {
        m1: mx,
        m2: mx,
        m3: my,
        m4: my,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::ConvexProgram;
    use crate::solver::{lp_solve, LpParams, SolveStatus};
    use approx::assert_abs_diff_eq;

    #[test]
    fn rk4_zero_field_is_identity() {
        let x = rk4_total(&|_x, _u, out| out.fill(0.0), &[1.0, -2.0], &[], 0.5, 3);
        assert_eq!(x, alloc::vec![1.0, -2.0]);
    }

    #[test]
    fn rk4_matches_closed_form_polynomial() {
        // x' = -x, h = 0.1: single step multiplies by
        // 1 - h + h^2/2 - h^3/6 + h^4/24 = 0.9048375
        let x = rk4_total(&|x, _u, out| out[0] = -x[0], &[1.0], &[], 0.1, 1);
        assert_abs_diff_eq!(x[0], 0.9048375, epsilon = 1e-12);
    }

    #[test]
    fn rk4_substeps_shrink_error_by_fourth_order() {
        let exact = (-0.4f64).exp();
        let one = rk4_total(&|x, _u, out| out[0] = -x[0], &[1.0], &[], 0.4, 1)[0];
        let four = rk4_total(&|x, _u, out| out[0] = -x[0], &[1.0], &[], 0.4, 4)[0];
        let ratio = (one - exact).abs() / (four - exact).abs();
        assert!(
            ratio > 4.0f64.powi(4) * 0.5 && ratio < 4.0f64.powi(4) * 2.0,
            "ratio = {ratio}"
        );
    }

    #[test]
    fn rk4_order_four_convergence_slope() {
        // global error on x' = -x over [0,1] scales as h^4
        let exact = (-1.0f64).exp();
        let mut errs = alloc::vec::Vec::new();
        for steps in [5usize, 10, 20] {
            let mut x = alloc::vec![1.0];
            for _ in 0..steps {
                x = rk4_total(&|x, _u, out| out[0] = -x[0], &x, &[], 1.0 / steps as f64, 1);
            }
            errs.push((1.0 / steps as f64, (x[0] - exact).abs()));
        }
        let slope = ((errs[0].1 / errs[2].1).ln()) / ((errs[0].0 / errs[2].0).ln());
        assert!((slope - 4.0).abs() < 0.4, "slope = {slope}");
    }

    #[test]
    fn rk4_propagates_dynamics_errors() {
        #[derive(Debug, PartialEq)]
        struct Boom;
        let mut f = |x: &[f64], _u: &[f64], out: &mut [f64]| -> Result<(), Boom> {
            if x[0] < 0.0 {
                return Err(Boom);
            }
            out[0] = -10.0;
            Ok(())
        };
        assert!(rk4_step(&mut f, &[0.1], &[], 1.0, 4).is_err());
    }

    #[test]
    fn epigraph_minimizes_absolute_values() {
        // min |x| over x in [-5, 5]
        let mut p = ConvexProgram::with_vars(1);
        p.var_bounds[0] = (-5.0, 5.0);
        l1_epigraph(
            &mut p,
            &[L1Term {
                coeffs: alloc::vec![(0, 1.0)],
                offset: 0.0,
                weight: 1.0,
            }],
        );
        let (x, rep) = lp_solve(&p, &LpParams::default()).unwrap();
        assert_eq!(rep.status, SolveStatus::Optimal);
        assert!(rep.objective.abs() < 1e-7);
        assert!(x[0].abs() < 1e-6);

        // min |x - 3|
        let mut p = ConvexProgram::with_vars(1);
        p.var_bounds[0] = (-5.0, 5.0);
        l1_epigraph(
            &mut p,
            &[L1Term {
                coeffs: alloc::vec![(0, 1.0)],
                offset: -3.0,
                weight: 1.0,
            }],
        );
        let (x, rep) = lp_solve(&p, &LpParams::default()).unwrap();
        assert!(rep.objective.abs() < 1e-7);
        assert!((x[0] - 3.0).abs() < 1e-6);

        // min |x| + |x - 2|: optimal value 2 anywhere on [0, 2]
        let mut p = ConvexProgram::with_vars(1);
        p.var_bounds[0] = (-5.0, 5.0);
        l1_epigraph(
            &mut p,
            &[
                L1Term {
                    coeffs: alloc::vec![(0, 1.0)],
                    offset: 0.0,
                    weight: 1.0,
                },
                L1Term {
                    coeffs: alloc::vec![(0, 1.0)],
                    offset: -2.0,
                    weight: 1.0,
                },
            ],
        );
        let (x, rep) = lp_solve(&p, &LpParams::default()).unwrap();
        assert!((rep.objective - 2.0).abs() < 1e-7);
        assert!(x[0] > -1e-6 && x[0] < 2.0 + 1e-6);
    }

    #[test]
    fn epigraph_is_tight_at_optima() {
        let mut p = ConvexProgram::with_vars(2);
        p.var_bounds = alloc::vec![(-4.0, 4.0), (-4.0, 4.0)];
        p.add_eq(alloc::vec![(0, 1.0), (1, 1.0)], 1.5);
        let aux = l1_epigraph(
            &mut p,
            &[
                L1Term {
                    coeffs: alloc::vec![(0, 1.0)],
                    offset: 0.0,
                    weight: 2.0,
                },
                L1Term {
                    coeffs: alloc::vec![(1, 1.0)],
                    offset: 0.5,
                    weight: 1.0,
                },
            ],
        );
        let (x, rep) = lp_solve(&p, &LpParams::default()).unwrap();
        assert_eq!(rep.status, SolveStatus::Optimal);
        assert!((x[aux[0]] - x[0].abs()).abs() < 1e-8);
        assert!((x[aux[1]] - (x[1] + 0.5).abs()).abs() < 1e-8);
    }

    #[test]
    fn big_m_covers_scenario_box() {
        let cfg = crate::scenario::e1(
            crate::scenario::Formulation::Rcoa,
            crate::scenario::SolveRoute::Scvx,
        );
        let m = scenario_big_m(&cfg);
        let (x0, x1, y0, y1) = position_box(&cfg);
        assert!(m.m1 >= (x1 - x0).max(y1 - y0));
        assert!(x0 < -15.0 && x1 > 27.0);
        assert!(y0 < -4.0 && y1 > 8.0);
    }
}
