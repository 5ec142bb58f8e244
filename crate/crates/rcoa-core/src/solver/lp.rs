//! Dense-scale primal-dual interior-point method for linear programs with
//! general variable bounds.
//!
//! Inequality rows receive slack variables so the core iteration works on
//! `min c.x  s.t.  A x = b, lo <= x <= hi`. Each Newton step solves the
//! regularized normal equations `(A Theta^-1 A^T + rho I) dy = r` with an
//! envelope LDL^T factorization after reverse Cuthill-McKee ordering, which
//! keeps multiple-shooting programs banded. Mehrotra predictor-corrector
//! steps drive the complementarity products; infeasibility is certified by a
//! phase-1 elastic problem.

use super::linalg::{reverse_cuthill_mckee, Envelope};
use super::{SolveError, SolveReport, SolveStatus};
use crate::program::ConvexProgram;
use alloc::vec;
use alloc::vec::Vec;

/// Interior-point parameters.
#[derive(Debug, Clone, Copy)]
pub struct LpParams {
    /// Relative feasibility and duality-gap tolerance.
    pub tol: f64,
    /// Acceptable fallback tolerance when the target is not reached.
    pub tol_soft: f64,
    pub max_iter: usize,
}

impl Default for LpParams {
    fn default() -> Self {
        LpParams {
            tol: 1e-9,
            tol_soft: 1e-8,
            max_iter: 200,
        }
    }
}

/// One interior-point iterate, exposed for diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct LpIterate {
    pub primal_obj: f64,
    pub dual_obj: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub mu: f64,
}

const FIX_TOL: f64 = 1e-11;

/// Standardized problem: equality rows only, bounds on every variable
/// (possibly infinite), fixed variables eliminated.
struct StdForm {
    n: usize,
    m: usize,
    rows: Vec<Vec<(u32, f64)>>,
    rhs: Vec<f64>,
    cost: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    /// Original variable -> standardized index (None = fixed).
    var_map: Vec<Option<usize>>,
    fixed_vals: Vec<f64>,
    col_scale: Vec<f64>,
    /// Set when standardization already proves the program infeasible.
    trivially_infeasible: bool,
}

fn standardize(p: &ConvexProgram) -> StdForm {
    let n0 = p.n_vars();
    let mut var_map = vec![None; n0];
    let mut fixed_vals = vec![0.0; n0];
    let mut n = 0usize;
    for j in 0..n0 {
        let (lo, hi) = p.var_bounds[j];
        if hi - lo <= FIX_TOL * (1.0 + lo.abs()) {
            fixed_vals[j] = 0.5 * (lo + hi);
        } else {
            var_map[j] = Some(n);
            n += 1;
        }
    }
    let mut cost = vec![0.0; n];
    let mut lo = vec![0.0; n];
    let mut hi = vec![0.0; n];
    for j in 0..n0 {
        if let Some(k) = var_map[j] {
            cost[k] = p.cost[j];
            lo[k] = p.var_bounds[j].0;
            hi[k] = p.var_bounds[j].1;
        }
    }

    let mut rows: Vec<Vec<(u32, f64)>> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    let mut trivially_infeasible = false;
    let feas = 1e-9;

    for row in &p.eq_rows {
        let mut r: Vec<(u32, f64)> = Vec::with_capacity(row.coeffs.len());
        let mut b = row.rhs;
        for &(j, a) in &row.coeffs {
            match var_map[j] {
                Some(k) => r.push((k as u32, a)),
                None => b -= a * fixed_vals[j],
            }
        }
        if r.is_empty() {
            if b.abs() > feas * (1.0 + row.rhs.abs()) {
                trivially_infeasible = true;
            }
            continue;
        }
        rows.push(r);
        rhs.push(b);
    }
    for row in &p.ineq_rows {
        let mut r: Vec<(u32, f64)> = Vec::with_capacity(row.coeffs.len() + 1);
        let mut b = row.rhs;
        for &(j, a) in &row.coeffs {
            match var_map[j] {
                Some(k) => r.push((k as u32, a)),
                None => b -= a * fixed_vals[j],
            }
        }
        if r.is_empty() {
            if b < -feas * (1.0 + row.rhs.abs()) {
                trivially_infeasible = true;
            }
            continue;
        }
        // slack: a.x + s = b, s >= 0
        let s = n;
        n += 1;
        cost.push(0.0);
        lo.push(0.0);
        hi.push(f64::INFINITY);
        r.push((s as u32, 1.0));
        rows.push(r);
        rhs.push(b);
    }
    let m = rows.len();

    // Ruiz equilibration
    let mut row_scale = vec![1.0f64; m];
    let mut col_scale = vec![1.0f64; n];
    for _ in 0..8 {
        let mut rmax = vec![0.0f64; m];
        let mut cmax = vec![0.0f64; n];
        for (i, row) in rows.iter().enumerate() {
            for &(j, a) in row {
                let v = a.abs();
                rmax[i] = rmax[i].max(v);
                cmax[j as usize] = cmax[j as usize].max(v);
            }
        }
        let mut done = true;
        for (i, row) in rows.iter_mut().enumerate() {
            let s = if rmax[i] > 0.0 { rmax[i].sqrt() } else { 1.0 };
            if (s - 1.0).abs() > 1e-2 {
                done = false;
            }
            for (_, a) in row.iter_mut() {
                *a /= s;
            }
            row_scale[i] *= s;
        }
        for row in rows.iter_mut() {
            for (j, a) in row.iter_mut() {
                let s = if cmax[*j as usize] > 0.0 {
                    cmax[*j as usize].sqrt()
                } else {
                    1.0
                };
                *a /= s;
            }
        }
        for j in 0..n {
            let s = if cmax[j] > 0.0 { cmax[j].sqrt() } else { 1.0 };
            col_scale[j] *= s;
        }
        if done {
            break;
        }
    }
    for i in 0..m {
        rhs[i] /= row_scale[i];
    }
    // x' = col_scale * x
    for j in 0..n {
        cost[j] /= col_scale[j];
        lo[j] *= col_scale[j];
        hi[j] *= col_scale[j];
    }
    let cost_scale = cost.iter().fold(0.0f64, |acc, c| acc.max(c.abs())).max(1.0);
    for c in cost.iter_mut() {
        *c /= cost_scale;
    }

    StdForm {
        n,
        m,
        rows,
        rhs,
        cost,
        lo,
        hi,
        var_map,
        fixed_vals,
        col_scale,
        trivially_infeasible,
    }
}

impl StdForm {
    fn recover(&self, x_std: &[f64]) -> Vec<f64> {
        let mut out = self.fixed_vals.clone();
        for (j, map) in self.var_map.iter().enumerate() {
            if let Some(k) = *map {
                out[j] = x_std[k] / self.col_scale[k];
            }
        }
        out
    }
}

/// Normal-equations workspace: RCM-permuted envelope plus precomputed
/// assembly triples.
struct Normal {
    env: Envelope,
    /// (envelope position, column, a_ik * a_jk) for off-diagonal entries.
    off: Vec<(u32, u32, f64)>,
    /// (permuted row, column, a_ik^2) for diagonal entries.
    diag: Vec<(u32, u32, f64)>,
    /// Copy of assembled values for residual refinement.
    vals_copy: Vec<f64>,
    diag_copy: Vec<f64>,
    perm: Vec<usize>,
}

impl Normal {
    fn new(std: &StdForm) -> Self {
        let m = std.m;
        let mut cols: Vec<Vec<(u32, f64)>> = vec![Vec::new(); std.n];
        for (i, row) in std.rows.iter().enumerate() {
            for &(j, a) in row {
                cols[j as usize].push((i as u32, a));
            }
        }
        // row-adjacency graph via shared columns
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); m];
        for col in &cols {
            for a in 0..col.len() {
                for b in (a + 1)..col.len() {
                    adj[col[a].0 as usize].push(col[b].0 as usize);
                    adj[col[b].0 as usize].push(col[a].0 as usize);
                }
            }
        }
        for l in adj.iter_mut() {
            l.sort_unstable();
            l.dedup();
        }
        let perm = reverse_cuthill_mckee(&adj);
        let mut inv = vec![0usize; m];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first: Vec<usize> = (0..m).collect();
        for col in &cols {
            for a in 0..col.len() {
                for b in (a + 1)..col.len() {
                    let (pi, pj) = (inv[col[a].0 as usize], inv[col[b].0 as usize]);
                    let (hi_i, lo_j) = if pi > pj { (pi, pj) } else { (pj, pi) };
                    if lo_j < first[hi_i] {
                        first[hi_i] = lo_j;
                    }
                }
            }
        }
        let env = Envelope::symbolic(first);
        let mut off: Vec<(u32, u32, f64)> = Vec::new();
        let mut diag: Vec<(u32, u32, f64)> = Vec::new();
        for (k, col) in cols.iter().enumerate() {
            for a in 0..col.len() {
                let (ra, va) = col[a];
                diag.push((inv[ra as usize] as u32, k as u32, va * va));
                for b in (a + 1)..col.len() {
                    let (rb, vb) = col[b];
                    let (pi, pj) = (inv[ra as usize], inv[rb as usize]);
                    let (hi_i, lo_j) = if pi > pj { (pi, pj) } else { (pj, pi) };
                    off.push((env.position(hi_i, lo_j) as u32, k as u32, va * vb));
                }
            }
        }
        let vals_len = env.envelope_size();
        Normal {
            env,
            off,
            diag,
            vals_copy: vec![0.0; vals_len],
            diag_copy: vec![0.0; m],
            perm,
        }
    }

    /// Assembles `A diag(w) A^T + rho I` and factors it. Returns false on a
    /// failed pivot.
    fn assemble_factor(&mut self, w: &[f64], rho: f64) -> bool {
        self.env.clear();
        for &(row, k, prod) in &self.diag {
            self.env.add_diag(row as usize, prod * w[k as usize]);
        }
        for &(pos, k, prod) in &self.off {
            self.env.add_at(pos as usize, prod * w[k as usize]);
        }
        for i in 0..self.env.n() {
            self.env.add_diag(i, rho);
        }
        self.env.snapshot(&mut self.vals_copy, &mut self.diag_copy);
        self.env.factor(1e-300)
    }

    /// Solves the permuted system for `b` given in original row order,
    /// with one step of iterative refinement.
    fn solve(&self, b: &[f64], out: &mut Vec<f64>) {
        let m = b.len();
        let mut pb: Vec<f64> = (0..m).map(|i| b[self.perm[i]]).collect();
        self.env.solve(&mut pb);
        // refinement against the assembled copy
        let mut res = vec![0.0; m];
        self.matvec_copy(&pb, &mut res);
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for i in 0..m {
            res[i] = b[self.perm[i]] - res[i];
            worst = worst.max(res[i].abs());
            scale = scale.max(b[self.perm[i]].abs());
        }
        if worst > 1e-14 * (1.0 + scale) {
            self.env.solve(&mut res);
            for i in 0..m {
                pb[i] += res[i];
            }
        }
        out.clear();
        out.resize(m, 0.0);
        for i in 0..m {
            out[self.perm[i]] = pb[i];
        }
    }

    fn matvec_copy(&self, x: &[f64], y: &mut [f64]) {
        self.env.matvec_from(&self.vals_copy, &self.diag_copy, x, y);
    }
}

struct Iterates {
    x: Vec<f64>,
    y: Vec<f64>,
    zl: Vec<f64>,
    zu: Vec<f64>,
}

fn residuals(std: &StdForm, it: &Iterates) -> (Vec<f64>, Vec<f64>) {
    let mut rp = std.rhs.clone();
    for (i, row) in std.rows.iter().enumerate() {
        for &(j, a) in row {
            rp[i] -= a * it.x[j as usize];
        }
    }
    let mut rd = std.cost.clone();
    for (i, row) in std.rows.iter().enumerate() {
        for &(j, a) in row {
            rd[j as usize] -= a * it.y[i];
        }
    }
    for j in 0..std.n {
        rd[j] -= it.zl[j];
        rd[j] += it.zu[j];
    }
    (rp, rd)
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

/// Solves a continuous [`ConvexProgram`].
///
/// Returns the solution in original variable order together with a report.
/// `status` is `Optimal`, `Infeasible` (certified via phase-1), or
/// `IterLimit`.
pub fn lp_solve(
    p: &ConvexProgram,
    params: &LpParams,
) -> Result<(Vec<f64>, SolveReport), SolveError> {
    let (sol, report, _) = lp_solve_traced(p, params)?;
    Ok((sol, report))
}

/// [`lp_solve`] with the per-iterate trace attached.
pub fn lp_solve_traced(
    p: &ConvexProgram,
    params: &LpParams,
) -> Result<(Vec<f64>, SolveReport, Vec<LpIterate>), SolveError> {
    p.validate().map_err(|_| SolveError::BadProgram("validation failed"))?;
    if p.has_integers() {
        return Err(SolveError::BadProgram("integrality mask must be empty for lp_solve"));
    }
    let std = standardize(p);
    if std.trivially_infeasible {
        let report = SolveReport::with_status(SolveStatus::Infeasible, f64::INFINITY, 0);
        return Ok((std.recover(&vec![0.0; std.n]), report, Vec::new()));
    }
    if std.m == 0 {
        // bound-constrained linear objective: minimize coordinatewise
        let mut x = vec![0.0; std.n];
        for j in 0..std.n {
            let (lo, hi) = (std.lo[j], std.hi[j]);
            x[j] = if std.cost[j] > 0.0 {
                lo
            } else if std.cost[j] < 0.0 {
                hi
            } else if lo.is_finite() {
                lo.max(hi.min(0.0))
            } else {
                0.0
            };
            if !x[j].is_finite() {
                return Err(SolveError::NumericalBreakdown("unbounded variable with nonzero cost"));
            }
        }
        let sol = std.recover(&x);
        let obj = p.objective(&sol);
        let report = SolveReport::with_status(SolveStatus::Optimal, obj, 0);
        return Ok((sol, report, Vec::new()));
    }

    match ipm(&std, params, true) {
        IpmOutcome::Optimal { x, iters, trace } => {
            let sol = std.recover(&x);
            let obj = p.objective(&sol);
            let report = SolveReport::with_status(SolveStatus::Optimal, obj, iters);
            Ok((sol, report, trace))
        }
        IpmOutcome::Infeasible { iters } => {
            let report = SolveReport::with_status(SolveStatus::Infeasible, f64::INFINITY, iters);
            Ok((std.recover(&vec![0.0; std.n]), report, Vec::new()))
        }
        IpmOutcome::Stuck { x, iters, trace } => {
            let sol = std.recover(&x);
            let obj = p.objective(&sol);
            let report = SolveReport::with_status(SolveStatus::IterLimit, obj, iters);
            Ok((sol, report, trace))
        }
        IpmOutcome::Breakdown(msg) => Err(SolveError::NumericalBreakdown(msg)),
    }
}

enum IpmOutcome {
    Optimal {
        x: Vec<f64>,
        iters: usize,
        trace: Vec<LpIterate>,
    },
    Infeasible {
        iters: usize,
    },
    Stuck {
        x: Vec<f64>,
        iters: usize,
        trace: Vec<LpIterate>,
    },
    Breakdown(&'static str),
}

/// Least-squares starting point: `x` solves `min ||x||` over `A x = b`
/// (via the unit-weight normal equations), shifted well inside the bounds;
/// duals start from the corresponding least-squares multipliers.
fn start_point(std: &StdForm, normal: &mut Normal) -> Iterates {
    let n = std.n;
    let m = std.m;
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; m];
    if normal.assemble_factor(&vec![1.0; n], 1e-8) {
        // x = A^T (A A^T)^-1 b
        let mut lam = Vec::new();
        normal.solve(&std.rhs, &mut lam);
        for (i, row) in std.rows.iter().enumerate() {
            for &(j, a) in row {
                x[j as usize] += a * lam[i];
            }
        }
        // y = (A A^T)^-1 A c
        let mut ac = vec![0.0; m];
        for (i, row) in std.rows.iter().enumerate() {
            for &(j, a) in row {
                ac[i] += a * std.cost[j as usize];
            }
        }
        let mut y0 = Vec::new();
        normal.solve(&ac, &mut y0);
        y = y0;
    }
    // dual estimate z = c - A^T y split into the bound multipliers
    let mut z = std.cost.clone();
    for (i, row) in std.rows.iter().enumerate() {
        for &(j, a) in row {
            z[j as usize] -= a * y[i];
        }
    }
    let mut zl = vec![0.0; n];
    let mut zu = vec![0.0; n];
    for j in 0..n {
        let (lo, hi) = (std.lo[j], std.hi[j]);
        let span = if lo.is_finite() && hi.is_finite() {
            (hi - lo).min(1e4)
        } else {
            1e4
        };
        let margin = (0.1 * span).clamp(1.0, 100.0);
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => {
                let m2 = margin.min(0.4 * (hi - lo));
                x[j] = x[j].clamp(lo + m2, hi - m2);
                zl[j] = z[j].max(1.0);
                zu[j] = (-z[j]).max(1.0);
            }
            (true, false) => {
                x[j] = x[j].max(lo + margin);
                zl[j] = z[j].max(1.0);
            }
            (false, true) => {
                x[j] = x[j].min(hi - margin);
                zu[j] = (-z[j]).max(1.0);
            }
            (false, false) => {}
        }
    }
    Iterates { x, y, zl, zu }
}

fn ipm(std: &StdForm, params: &LpParams, allow_phase1: bool) -> IpmOutcome {
    let n = std.n;
    let m = std.m;
    let mut normal = Normal::new(std);
    let mut it = start_point(std, &mut normal);
    let mut trace: Vec<LpIterate> = Vec::new();

    let b_norm = 1.0 + inf_norm(&std.rhs);
    let c_norm = 1.0 + inf_norm(&std.cost);
    let nb: usize = (0..n)
        .map(|j| std.lo[j].is_finite() as usize + std.hi[j].is_finite() as usize)
        .sum();
    if nb == 0 {
        return IpmOutcome::Breakdown("no finite bounds; feasible set unbounded");
    }

    let mut delta_p = 1e-10;
    let mut rho = 1e-10;
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut best_metric = f64::INFINITY;

    let mut theta = vec![0.0; n];
    let mut rhat = vec![0.0; n];
    let mut rhs_y = vec![0.0; m];
    let mut dy = vec![0.0; m];
    let mut dx = vec![0.0; n];
    let mut dzl = vec![0.0; n];
    let mut dzu = vec![0.0; n];
    let mut dx_aff = vec![0.0; n];
    let mut dzl_aff = vec![0.0; n];
    let mut dzu_aff = vec![0.0; n];

    for iter in 0..params.max_iter {
        let (rp, rd) = residuals(std, &it);
        let mut compl = 0.0;
        for j in 0..n {
            if std.lo[j].is_finite() {
                compl += (it.x[j] - std.lo[j]) * it.zl[j];
            }
            if std.hi[j].is_finite() {
                compl += (std.hi[j] - it.x[j]) * it.zu[j];
            }
        }
        let mu = compl / nb as f64;
        let pobj: f64 = std.cost.iter().zip(&it.x).map(|(c, x)| c * x).sum();
        let dobj: f64 = std
            .rhs
            .iter()
            .zip(&it.y)
            .map(|(b, y)| b * y)
            .sum::<f64>()
            + (0..n)
                .map(|j| {
                    let mut v = 0.0;
                    if std.lo[j].is_finite() {
                        v += std.lo[j] * it.zl[j];
                    }
                    if std.hi[j].is_finite() {
                        v -= std.hi[j] * it.zu[j];
                    }
                    v
                })
                .sum::<f64>();
        let rp_rel = inf_norm(&rp) / b_norm;
        let rd_rel = inf_norm(&rd) / c_norm;
        let gap_rel = (pobj - dobj).abs() / (1.0 + pobj.abs());
        trace.push(LpIterate {
            primal_obj: pobj,
            dual_obj: dobj,
            primal_residual: rp_rel,
            dual_residual: rd_rel,
            mu,
        });

        let metric = rp_rel.max(rd_rel).max(gap_rel);
        if metric < best_metric {
            best_metric = metric;
            best = Some((pobj, it.x.clone()));
        }
        if rp_rel <= params.tol && rd_rel <= params.tol && gap_rel <= params.tol {
            return IpmOutcome::Optimal {
                x: it.x,
                iters: iter,
                trace,
            };
        }

        // infeasibility suspicion: complementarity collapsed but the primal
        // residual is stuck, or duals explode
        let suspicious = (mu < 1e-10 && rp_rel > 1e3 * params.tol)
            || inf_norm(&it.y) > 1e11
            || (iter + 1 == params.max_iter && rp_rel > 1e-6);
        if suspicious && allow_phase1 {
            return match certify_infeasible(std, params) {
                Some(true) => IpmOutcome::Infeasible { iters: iter },
                _ => finish_stuck(std, params, best, best_metric, iter, trace),
            };
        }

        for j in 0..n {
            let mut t = delta_p;
            if std.lo[j].is_finite() {
                t += it.zl[j] / (it.x[j] - std.lo[j]).max(1e-300);
            }
            if std.hi[j].is_finite() {
                t += it.zu[j] / (std.hi[j] - it.x[j]).max(1e-300);
            }
            theta[j] = 1.0 / t;
        }
        let mut factored = normal.assemble_factor(&theta, rho);
        let mut escalations = 0;
        while !factored && escalations < 3 {
            delta_p *= 100.0;
            rho *= 100.0;
            for j in 0..n {
                theta[j] = 1.0 / (1.0 / theta[j] + delta_p);
            }
            factored = normal.assemble_factor(&theta, rho);
            escalations += 1;
        }
        if !factored {
            return IpmOutcome::Breakdown("normal equations factorization failed");
        }

        // affine predictor
        let solve_step = |normal: &Normal,
                          rhat: &mut [f64],
                          rhs_y: &mut [f64],
                          dy: &mut Vec<f64>,
                          dx: &mut [f64],
                          dzl: &mut [f64],
                          dzu: &mut [f64],
                          rcl: &dyn Fn(usize) -> f64,
                          rcu: &dyn Fn(usize) -> f64,
                          it: &Iterates,
                          rp: &[f64],
                          rd: &[f64]| {
            for j in 0..n {
                let mut v = rd[j];
                if std.lo[j].is_finite() {
                    v -= rcl(j) / (it.x[j] - std.lo[j]).max(1e-300);
                }
                if std.hi[j].is_finite() {
                    v += rcu(j) / (std.hi[j] - it.x[j]).max(1e-300);
                }
                rhat[j] = v;
            }
            for i in 0..m {
                rhs_y[i] = rp[i];
            }
            for (i, row) in std.rows.iter().enumerate() {
                for &(j, a) in row {
                    rhs_y[i] += a * theta[j as usize] * rhat[j as usize];
                }
            }
            normal.solve(rhs_y, dy);
            // dx = Theta (A^T dy - rhat)
            for j in 0..n {
                dx[j] = -rhat[j];
            }
            for (i, row) in std.rows.iter().enumerate() {
                for &(j, a) in row {
                    dx[j as usize] += a * dy[i];
                }
            }
            for j in 0..n {
                dx[j] *= theta[j];
            }
            for j in 0..n {
                dzl[j] = if std.lo[j].is_finite() {
                    (rcl(j) - it.zl[j] * dx[j]) / (it.x[j] - std.lo[j]).max(1e-300)
                } else {
                    0.0
                };
                dzu[j] = if std.hi[j].is_finite() {
                    (rcu(j) + it.zu[j] * dx[j]) / (std.hi[j] - it.x[j]).max(1e-300)
                } else {
                    0.0
                };
            }
        };

        {
            let rcl_aff = |j: usize| -(it.x[j] - std.lo[j]) * it.zl[j];
            let rcu_aff = |j: usize| -(std.hi[j] - it.x[j]) * it.zu[j];
            solve_step(
                &normal, &mut rhat, &mut rhs_y, &mut dy, &mut dx_aff, &mut dzl_aff, &mut dzu_aff,
                &rcl_aff, &rcu_aff, &it, &rp, &rd,
            );
        }
        let (ap_aff, ad_aff) = step_lengths(std, &it, &dx_aff, &dzl_aff, &dzu_aff, 1.0);
        let mut compl_aff = 0.0;
        for j in 0..n {
            if std.lo[j].is_finite() {
                compl_aff +=
                    (it.x[j] + ap_aff * dx_aff[j] - std.lo[j]) * (it.zl[j] + ad_aff * dzl_aff[j]);
            }
            if std.hi[j].is_finite() {
                compl_aff +=
                    (std.hi[j] - it.x[j] - ap_aff * dx_aff[j]) * (it.zu[j] + ad_aff * dzu_aff[j]);
            }
        }
        let mu_aff = compl_aff / nb as f64;
        let sigma = if mu > 0.0 {
            (mu_aff / mu).powi(3).clamp(1e-8, 1.0 - 1e-8)
        } else {
            1e-8
        };

        {
            let target = sigma * mu;
            let rcl_cor = |j: usize| {
                target - (it.x[j] - std.lo[j]) * it.zl[j] - dx_aff[j] * dzl_aff[j]
            };
            let rcu_cor = |j: usize| {
                target - (std.hi[j] - it.x[j]) * it.zu[j] + dx_aff[j] * dzu_aff[j]
            };
            solve_step(
                &normal, &mut rhat, &mut rhs_y, &mut dy, &mut dx, &mut dzl, &mut dzu, &rcl_cor,
                &rcu_cor, &it, &rp, &rd,
            );
        }
        let tau = if mu > 1e-6 { 0.995 } else { 0.9995 };
        let (ap, ad) = step_lengths(std, &it, &dx, &dzl, &dzu, tau);
        for j in 0..n {
            it.x[j] += ap * dx[j];
            it.zl[j] += ad * dzl[j];
            it.zu[j] += ad * dzu[j];
        }
        for i in 0..m {
            it.y[i] += ad * dy[i];
        }
    }

    if allow_phase1 {
        // iteration budget exhausted; certify before giving up
        if let Some(true) = certify_infeasible(std, params) {
            return IpmOutcome::Infeasible {
                iters: params.max_iter,
            };
        }
    }
    finish_stuck(std, params, best, best_metric, params.max_iter, trace)
}

fn finish_stuck(
    _std: &StdForm,
    params: &LpParams,
    best: Option<(f64, Vec<f64>)>,
    best_metric: f64,
    iters: usize,
    trace: Vec<LpIterate>,
) -> IpmOutcome {
    match best {
        Some((_, x)) if best_metric <= params.tol_soft => IpmOutcome::Optimal { x, iters, trace },
        Some((_, x)) => IpmOutcome::Stuck { x, iters, trace },
        None => IpmOutcome::Breakdown("no iterate available"),
    }
}

fn step_lengths(
    std: &StdForm,
    it: &Iterates,
    dx: &[f64],
    dzl: &[f64],
    dzu: &[f64],
    tau: f64,
) -> (f64, f64) {
    let mut ap = 1.0f64;
    let mut ad = 1.0f64;
    for j in 0..std.n {
        if std.lo[j].is_finite() {
            if dx[j] < 0.0 {
                ap = ap.min(-tau * (it.x[j] - std.lo[j]) / dx[j]);
            }
            if dzl[j] < 0.0 {
                ad = ad.min(-tau * it.zl[j] / dzl[j]);
            }
        }
        if std.hi[j].is_finite() {
            if dx[j] > 0.0 {
                ap = ap.min(tau * (std.hi[j] - it.x[j]) / dx[j]);
            }
            if dzu[j] < 0.0 {
                ad = ad.min(-tau * it.zu[j] / dzu[j]);
            }
        }
    }
    (ap.max(0.0), ad.max(0.0))
}

/// Phase-1 feasibility certificate: minimize the L1 norm of equality
/// violations with elastic variables. Returns `Some(true)` when the optimum
/// is bounded away from zero (primal infeasible), `Some(false)` when a
/// feasible point exists, `None` when phase-1 itself failed to converge.
fn certify_infeasible(std: &StdForm, params: &LpParams) -> Option<bool> {
    let n1 = std.n + 2 * std.m;
    let mut rows = Vec::with_capacity(std.m);
    for (i, row) in std.rows.iter().enumerate() {
        let mut r = row.clone();
        r.push(((std.n + 2 * i) as u32, 1.0));
        r.push(((std.n + 2 * i + 1) as u32, -1.0));
        rows.push(r);
    }
    let mut cost = vec![0.0; n1];
    let mut lo = std.lo.clone();
    let mut hi = std.hi.clone();
    for _ in 0..(2 * std.m) {
        lo.push(0.0);
        hi.push(f64::INFINITY);
    }
    for c in cost.iter_mut().skip(std.n) {
        *c = 1.0;
    }
    let phase1 = StdForm {
        n: n1,
        m: std.m,
        rows,
        rhs: std.rhs.clone(),
        cost,
        lo,
        hi,
        var_map: Vec::new(),
        fixed_vals: Vec::new(),
        col_scale: vec![1.0; n1],
        trivially_infeasible: false,
    };
    let mut p = *params;
    p.max_iter = 150;
    p.tol = 1e-9;
    match ipm(&phase1, &p, false) {
        IpmOutcome::Optimal { x, .. } | IpmOutcome::Stuck { x, .. } => {
            let viol: f64 = x.iter().skip(std.n).sum();
            Some(viol > 1e-7 * (1.0 + inf_norm(&std.rhs)))
        }
        _ => None,
    }
}
