//! Nonlinear program container consumed by the successive-convexification
//! solvers.
//!
//! Cost and constraints are split into an exact linear part (carried through
//! to every subproblem unchanged) and nonlinear blocks (dynamics defects,
//! slip limits, ellipse rows, terminal costs) that are linearized about a
//! reference point. Block sparsity is explicit: each block names the
//! variables it reads, and Jacobians come from central finite differences
//! with step `1e-6 * (1 + |x|)`.

use crate::math;
use crate::program::{ConvexProgram, SparseRow, DEFAULT_BOUND};
use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;
use thiserror::Error;

/// Violations below this floor are ignored by the L1 merit term; they sit at
/// the interior-point feasibility tolerance and would otherwise swamp true
/// cost differences once multiplied by the elastic weight.
pub const MERIT_FLOOR: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NlpError {
    #[error("jacobian evaluation produced a non-finite value in block {0}")]
    JacobianFailure(usize),
    #[error("reference point has wrong dimension: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
}

/// A block of nonlinear constraint rows sharing a variable support.
/// `eval` receives the gathered support values and writes `rows` outputs.
pub struct NlBlock {
    pub rows: usize,
    pub vars: Vec<usize>,
    pub eval: Box<dyn Fn(&[f64], &mut [f64]) + Send + Sync>,
}

impl NlBlock {
    pub fn eval_at(&self, x: &[f64], out: &mut [f64]) {
        let gathered: Vec<f64> = self.vars.iter().map(|&j| x[j]).collect();
        (self.eval)(&gathered, out);
    }
}

/// Scalar nonlinear cost term over a variable support.
pub struct NlCost {
    pub vars: Vec<usize>,
    pub eval: Box<dyn Fn(&[f64]) -> f64 + Send + Sync>,
}

/// Per-node variable ranges of a transcribed trajectory problem.
#[derive(Debug, Clone, Default)]
pub struct VarLayout {
    pub n_vars: usize,
    pub node_state: Vec<Range<usize>>,
    pub node_input: Vec<Range<usize>>,
    pub node_gamma: Vec<Range<usize>>,
    pub node_aux: Vec<Range<usize>>,
}

/// Decision vector split back into its per-node components.
#[derive(Debug, Clone, PartialEq)]
pub struct Unpacked {
    pub states: Vec<Vec<f64>>,
    pub inputs: Vec<Vec<f64>>,
    pub gammas: Vec<Vec<f64>>,
    pub aux: Vec<Vec<f64>>,
}

impl VarLayout {
    pub fn n_nodes(&self) -> usize {
        self.node_state.len()
    }

    pub fn unpack(&self, x: &[f64]) -> Unpacked {
        let slice = |r: &Range<usize>| x[r.clone()].to_vec();
        Unpacked {
            states: self.node_state.iter().map(slice).collect(),
            inputs: self.node_input.iter().map(slice).collect(),
            gammas: self.node_gamma.iter().map(slice).collect(),
            aux: self.node_aux.iter().map(slice).collect(),
        }
    }

    /// Inverse of [`Self::unpack`]; entries outside the ranges are zero.
    pub fn pack(&self, u: &Unpacked) -> Vec<f64> {
        let mut x = vec![0.0; self.n_vars];
        let fill = |x: &mut [f64], r: &Range<usize>, v: &[f64]| {
            x[r.clone()].copy_from_slice(v);
        };
        for (r, v) in self.node_state.iter().zip(&u.states) {
            fill(&mut x, r, v);
        }
        for (r, v) in self.node_input.iter().zip(&u.inputs) {
            fill(&mut x, r, v);
        }
        for (r, v) in self.node_gamma.iter().zip(&u.gammas) {
            fill(&mut x, r, v);
        }
        for (r, v) in self.node_aux.iter().zip(&u.aux) {
            fill(&mut x, r, v);
        }
        x
    }

    /// Largest per-node L2 distance between the state blocks of two points.
    pub fn max_node_state_distance(&self, a: &[f64], b: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for r in &self.node_state {
            let mut acc = 0.0;
            for j in r.clone() {
                let d = a[j] - b[j];
                acc += d * d;
            }
            worst = worst.max(math::sqrt(acc));
        }
        worst
    }
}

/// Nonlinear trajectory-optimization problem.
pub struct NlpProblem {
    pub n_vars: usize,
    pub var_bounds: Vec<(f64, f64)>,
    pub integrality: Vec<bool>,
    /// Problem-aware integer assignment heuristic: maps an iterate to a
    /// consistent integral assignment used to seed branch-and-bound.
    pub int_hint: Option<Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>>,
    pub linear_cost: Vec<f64>,
    pub cost_offset: f64,
    pub lin_eq: Vec<SparseRow>,
    pub lin_ineq: Vec<SparseRow>,
    /// Nonlinear equalities `c(x) = 0` (dynamics defects).
    pub nl_eq: Vec<NlBlock>,
    /// Nonlinear inequalities `g(x) <= 0`.
    pub nl_ineq: Vec<NlBlock>,
    pub nl_cost: Vec<NlCost>,
    pub layout: VarLayout,
}

/// Options for [`NlpProblem::linearize`].
#[derive(Debug, Clone, Default)]
pub struct LinearizeOptions {
    /// L1 weight on the elastic slacks of linearized rows.
    pub elastic_weight: f64,
    /// Keep the integrality mask in the subproblem (SMILP route).
    pub keep_integrality: bool,
    /// Infinity-norm trust radius about the reference; integer variables are
    /// exempt so branching stays meaningful.
    pub trust_radius: Option<f64>,
    /// Bound replacements applied after the trust region (variable pins).
    pub bound_overrides: Vec<(usize, f64, f64)>,
    /// Also attach elastic slacks to the exact linear inequality rows.
    /// The mixed-integer route needs this: its avoidance rows demand jumps
    /// the trust region cannot cover in one step.
    pub elastic_linear: bool,
}

/// Linearization product: the convex subproblem plus slack bookkeeping.
pub struct Linearized {
    pub prog: ConvexProgram,
    /// First slack column; everything from here on is elastic.
    pub slack_start: usize,
}

impl NlpProblem {
    pub fn empty(n_vars: usize) -> Self {
        NlpProblem {
            n_vars,
            var_bounds: vec![(-DEFAULT_BOUND, DEFAULT_BOUND); n_vars],
            integrality: vec![false; n_vars],
            int_hint: None,
            linear_cost: vec![0.0; n_vars],
            cost_offset: 0.0,
            lin_eq: Vec::new(),
            lin_ineq: Vec::new(),
            nl_eq: Vec::new(),
            nl_ineq: Vec::new(),
            nl_cost: Vec::new(),
            layout: VarLayout {
                n_vars,
                ..Default::default()
            },
        }
    }

    /// True augmented objective: linear + nonlinear cost plus `penalty *`
    /// the L1 norm of all constraint violations (both the linearized-exact
    /// rows and the nonlinear blocks, so merit comparisons stay consistent
    /// when a reference point is not yet row-feasible). Also returns the
    /// worst single violation.
    pub fn penalized_objective(&self, x: &[f64], penalty: f64) -> (f64, f64) {
        let mut j = self.cost_offset;
        for (c, v) in self.linear_cost.iter().zip(x) {
            j += c * v;
        }
        for cost in &self.nl_cost {
            let gathered: Vec<f64> = cost.vars.iter().map(|&i| x[i]).collect();
            j += (cost.eval)(&gathered);
        }
        let mut viol_l1 = 0.0;
        let mut viol_inf: f64 = 0.0;
        let mut tally = |v: f64| {
            // shifted hinge: continuous in v, exactly zero at solver-clean
            // residual levels
            if v > MERIT_FLOOR {
                viol_l1 += v - MERIT_FLOOR;
            }
            if v > viol_inf {
                viol_inf = v;
            }
        };
        for row in &self.lin_eq {
            tally((row.dot(x) - row.rhs).abs());
        }
        for row in &self.lin_ineq {
            tally((row.dot(x) - row.rhs).max(0.0));
        }
        let mut buf = Vec::new();
        for block in &self.nl_eq {
            buf.clear();
            buf.resize(block.rows, 0.0);
            block.eval_at(x, &mut buf);
            for v in &buf {
                tally(v.abs());
            }
        }
        for block in &self.nl_ineq {
            buf.clear();
            buf.resize(block.rows, 0.0);
            block.eval_at(x, &mut buf);
            for v in &buf {
                tally(v.max(0.0));
            }
        }
        (j + penalty * viol_l1, viol_inf)
    }

    /// Central finite-difference Jacobian of a block at the gathered
    /// reference values; row-major `rows x vars`.
    fn fd_jacobian(
        block: &NlBlock,
        gathered: &[f64],
        block_idx: usize,
    ) -> Result<Vec<f64>, NlpError> {
        let rows = block.rows;
        let cols = gathered.len();
        let mut jac = vec![0.0; rows * cols];
        let mut xp = gathered.to_vec();
        let mut fp = vec![0.0; rows];
        let mut fm = vec![0.0; rows];
        for c in 0..cols {
            let h = 1e-6 * (1.0 + gathered[c].abs());
            xp[c] = gathered[c] + h;
            (block.eval)(&xp, &mut fp);
            xp[c] = gathered[c] - h;
            (block.eval)(&xp, &mut fm);
            xp[c] = gathered[c];
            for r in 0..rows {
                let d = (fp[r] - fm[r]) / (2.0 * h);
                if !d.is_finite() {
                    return Err(NlpError::JacobianFailure(block_idx));
                }
                jac[r * cols + c] = d;
            }
        }
        Ok(jac)
    }

    /// First-order expansion about `x_ref` with elastic slacks appended.
    ///
    /// Nonlinear equality rows become `J x + s+ - s- = J x_ref - c(x_ref)`;
    /// nonlinear inequality rows become `J x - t <= J x_ref - g(x_ref)`;
    /// slack columns carry the elastic weight in the cost. Exact linear rows
    /// pass through without slacks.
    pub fn linearize(&self, x_ref: &[f64], opts: &LinearizeOptions) -> Result<Linearized, NlpError> {
        if x_ref.len() != self.n_vars {
            return Err(NlpError::Dimension {
                expected: self.n_vars,
                got: x_ref.len(),
            });
        }
        let mut prog = ConvexProgram::with_vars(self.n_vars);
        prog.cost.copy_from_slice(&self.linear_cost);
        prog.cost_offset = self.cost_offset;
        prog.var_bounds.copy_from_slice(&self.var_bounds);
        if opts.keep_integrality {
            prog.integrality.copy_from_slice(&self.integrality);
        }
        if let Some(delta) = opts.trust_radius {
            for j in 0..self.n_vars {
                if self.integrality[j] {
                    continue;
                }
                let (lo, hi) = prog.var_bounds[j];
                prog.var_bounds[j] = (lo.max(x_ref[j] - delta), hi.min(x_ref[j] + delta));
            }
        }
        for &(j, lo, hi) in &opts.bound_overrides {
            prog.var_bounds[j] = (lo, hi);
        }

        // linearized nonlinear cost terms
        for (ci, cost) in self.nl_cost.iter().enumerate() {
            let gathered: Vec<f64> = cost.vars.iter().map(|&i| x_ref[i]).collect();
            let f0 = (cost.eval)(&gathered);
            let mut xp = gathered.clone();
            for (c, &var) in cost.vars.iter().enumerate() {
                let h = 1e-6 * (1.0 + gathered[c].abs());
                xp[c] = gathered[c] + h;
                let fp = (cost.eval)(&xp);
                xp[c] = gathered[c] - h;
                let fm = (cost.eval)(&xp);
                xp[c] = gathered[c];
                let g = (fp - fm) / (2.0 * h);
                if !g.is_finite() {
                    return Err(NlpError::JacobianFailure(usize::MAX - ci));
                }
                prog.cost[var] += g;
                prog.cost_offset -= g * x_ref[var];
            }
            prog.cost_offset += f0;
        }

        prog.eq_rows = self.lin_eq.clone();
        let slack_start;
        if opts.elastic_linear {
            let w = opts.elastic_weight;
            slack_start = prog.n_vars();
            for row in &self.lin_ineq {
                let mut coeffs = row.coeffs.clone();
                let t = prog.add_var(w, 0.0, DEFAULT_BOUND);
                coeffs.push((t, -1.0));
                prog.add_ineq(coeffs, row.rhs);
            }
        } else {
            prog.ineq_rows = self.lin_ineq.clone();
            slack_start = prog.n_vars();
        }
        let w = opts.elastic_weight;
        debug_assert!(slack_start <= prog.n_vars());
        let mut c0 = Vec::new();
        for (bi, block) in self.nl_eq.iter().enumerate() {
            let gathered: Vec<f64> = block.vars.iter().map(|&i| x_ref[i]).collect();
            c0.clear();
            c0.resize(block.rows, 0.0);
            (block.eval)(&gathered, &mut c0);
            let jac = Self::fd_jacobian(block, &gathered, bi)?;
            for r in 0..block.rows {
                let mut coeffs: Vec<(usize, f64)> = Vec::with_capacity(block.vars.len() + 2);
                let mut rhs = -c0[r];
                for (c, &var) in block.vars.iter().enumerate() {
                    let a = jac[r * block.vars.len() + c];
                    if a != 0.0 {
                        coeffs.push((var, a));
                        rhs += a * x_ref[var];
                    }
                }
                let sp = prog.add_var(w, 0.0, DEFAULT_BOUND);
                let sm = prog.add_var(w, 0.0, DEFAULT_BOUND);
                coeffs.push((sp, 1.0));
                coeffs.push((sm, -1.0));
                prog.add_eq(coeffs, rhs);
            }
        }
        for (bi, block) in self.nl_ineq.iter().enumerate() {
            let gathered: Vec<f64> = block.vars.iter().map(|&i| x_ref[i]).collect();
            c0.clear();
            c0.resize(block.rows, 0.0);
            (block.eval)(&gathered, &mut c0);
            let jac = Self::fd_jacobian(block, &gathered, self.nl_eq.len() + bi)?;
            for r in 0..block.rows {
                let mut coeffs: Vec<(usize, f64)> = Vec::with_capacity(block.vars.len() + 1);
                let mut rhs = -c0[r];
                for (c, &var) in block.vars.iter().enumerate() {
                    let a = jac[r * block.vars.len() + c];
                    if a != 0.0 {
                        coeffs.push((var, a));
                        rhs += a * x_ref[var];
                    }
                }
                let t = prog.add_var(w, 0.0, DEFAULT_BOUND);
                coeffs.push((t, -1.0));
                prog.add_ineq(coeffs, rhs);
            }
        }
        Ok(Linearized { prog, slack_start })
    }

    /// Clamps a candidate reference into the variable bounds.
    pub fn clamp_into_bounds(&self, x: &mut [f64]) {
        for (j, v) in x.iter_mut().enumerate() {
            let (lo, hi) = self.var_bounds[j];
            *v = v.clamp(lo, hi);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn pack_unpack_roundtrip() {
        let layout = VarLayout {
            n_vars: 10,
            node_state: vec![0..3, 5..8],
            node_input: vec![3..4],
            node_gamma: vec![4..5, 8..9],
            node_aux: vec![9..10],
        };
        let x: Vec<f64> = (0..10).map(|i| i as f64 * 1.5 - 3.0).collect();
        let u = layout.unpack(&x);
        assert_eq!(u.states[1], vec![4.5, 6.0, 7.5]);
        let back = layout.pack(&u);
        assert_eq!(back, x);
    }

    #[test]
    fn node_state_distance() {
        let layout = VarLayout {
            n_vars: 4,
            node_state: vec![0..2, 2..4],
            ..Default::default()
        };
        let a = [0.0, 0.0, 1.0, 1.0];
        let b = [3.0, 4.0, 1.0, 1.0];
        assert_abs_diff_eq!(layout.max_node_state_distance(&a, &b), 5.0, epsilon = 1e-15);
    }

    #[test]
    fn linearize_affine_block_is_reference_independent() {
        // affine c(x) = 2x0 - x1 + 1: rows must not depend on the reference
        let mut nlp = NlpProblem::empty(2);
        nlp.nl_eq.push(NlBlock {
            rows: 1,
            vars: vec![0, 1],
            eval: Box::new(|x, out| out[0] = 2.0 * x[0] - x[1] + 1.0),
        });
        let opts = LinearizeOptions {
            elastic_weight: 10.0,
            ..Default::default()
        };
        let lin_a = nlp.linearize(&[0.0, 0.0], &opts).unwrap();
        let lin_b = nlp.linearize(&[3.0, -2.0], &opts).unwrap();
        let ra = &lin_a.prog.eq_rows[0];
        let rb = &lin_b.prog.eq_rows[0];
        for (ca, cb) in ra.coeffs.iter().zip(rb.coeffs.iter()) {
            assert_eq!(ca.0, cb.0);
            assert_abs_diff_eq!(ca.1, cb.1, epsilon = 1e-9);
        }
        assert_abs_diff_eq!(ra.rhs, rb.rhs, epsilon = 1e-8);
    }

    #[test]
    fn quadratic_gradient_matches_finite_differences() {
        // g(x) = 1 - (x-c)^T P (x-c) with P = diag(1, 4): gradient row is
        // -2P(x-c); checked against an independent FD oracle with step 1e-5
        let mut nlp = NlpProblem::empty(2);
        let c = (0.5, -1.0);
        let quad = move |x: &[f64]| {
            1.0 - ((x[0] - c.0) * (x[0] - c.0) + 4.0 * (x[1] - c.1) * (x[1] - c.1))
        };
        nlp.nl_ineq.push(NlBlock {
            rows: 1,
            vars: vec![0, 1],
            eval: Box::new(move |x, out| out[0] = quad(x)),
        });
        let p0 = [2.0, 1.5];
        let lin = nlp
            .linearize(&p0, &LinearizeOptions { elastic_weight: 1.0, ..Default::default() })
            .unwrap();
        let row = &lin.prog.ineq_rows[0];
        let h = 1e-5;
        let g0 = (quad(&[p0[0] + h, p0[1]]) - quad(&[p0[0] - h, p0[1]])) / (2.0 * h);
        let g1 = (quad(&[p0[0], p0[1] + h]) - quad(&[p0[0], p0[1] - h])) / (2.0 * h);
        let coef = |var: usize| row.coeffs.iter().find(|&&(j, _)| j == var).unwrap().1;
        assert!((coef(0) - g0).abs() / g0.abs().max(1.0) < 1e-6);
        assert!((coef(1) - g1).abs() / g1.abs().max(1.0) < 1e-6);
        // analytic: -2P(p-c)
        assert!((coef(0) - (-2.0 * (p0[0] - c.0))).abs() < 1e-6);
        assert!((coef(1) - (-8.0 * (p0[1] - c.1))).abs() < 1e-5);
    }

    #[test]
    fn penalized_objective_counts_violations() {
        let mut nlp = NlpProblem::empty(1);
        nlp.linear_cost[0] = 2.0;
        nlp.nl_eq.push(NlBlock {
            rows: 1,
            vars: vec![0],
            eval: Box::new(|x, out| out[0] = x[0] - 1.0),
        });
        let (j, viol) = nlp.penalized_objective(&[3.0], 10.0);
        // the merit hinge shaves MERIT_FLOOR off each violated term
        assert_abs_diff_eq!(j, 6.0 + 10.0 * 2.0, epsilon = 1e-4);
        assert_abs_diff_eq!(viol, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn trust_region_respects_integer_exemption() {
        let mut nlp = NlpProblem::empty(2);
        nlp.integrality[1] = true;
        nlp.var_bounds = vec![(-10.0, 10.0), (0.0, 1.0)];
        let lin = nlp
            .linearize(
                &[5.0, 0.3],
                &LinearizeOptions {
                    trust_radius: Some(0.5),
                    keep_integrality: true,
                    ..Default::default()
                },
            )
            .unwrap();
        assert_eq!(lin.prog.var_bounds[0], (4.5, 5.5));
        assert_eq!(lin.prog.var_bounds[1], (0.0, 1.0));
        assert!(lin.prog.integrality[1]);
    }
}
