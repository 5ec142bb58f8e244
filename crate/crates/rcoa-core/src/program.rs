//! Canonical convex program: linear cost, sparse linear equality and
//! inequality rows, variable bounds, and an integrality mask.
//!
//! Transcription lowers optimal-control problems into this form; the solve
//! kernel consumes it directly (LP when the mask is empty, MILP otherwise).

use alloc::vec;
use alloc::vec::Vec;
use thiserror::Error;

/// Default magnitude used when a variable has no natural bound. Finite
/// bounds keep the interior-point scaling well behaved.
pub const DEFAULT_BOUND: f64 = 1e7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProgramError {
    #[error("row references variable {var} but the program has {n_vars}")]
    BadVariableRef { var: usize, n_vars: usize },
    #[error("variable {0} has inverted bounds")]
    InvertedBounds(usize),
    #[error("non-finite coefficient in {0}")]
    NonFinite(&'static str),
}

/// One sparse linear row `sum(coeffs) (=|<=) rhs`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseRow {
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
}

impl SparseRow {
    pub fn new(coeffs: Vec<(usize, f64)>, rhs: f64) -> Self {
        SparseRow { coeffs, rhs }
    }

    /// Row activity at `x`.
    pub fn dot(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }
}

/// Canonical form: minimize `cost . x` subject to `eq_rows`, `ineq_rows`
/// (`<=`), `var_bounds`, and integrality on masked variables.
#[derive(Debug, Clone, Default)]
pub struct ConvexProgram {
    pub cost: Vec<f64>,
    /// Constant added to the reported objective.
    pub cost_offset: f64,
    pub eq_rows: Vec<SparseRow>,
    pub ineq_rows: Vec<SparseRow>,
    pub var_bounds: Vec<(f64, f64)>,
    pub integrality: Vec<bool>,
}

impl ConvexProgram {
    pub fn with_vars(n: usize) -> Self {
        ConvexProgram {
            cost: vec![0.0; n],
            cost_offset: 0.0,
            eq_rows: Vec::new(),
            ineq_rows: Vec::new(),
            var_bounds: vec![(-DEFAULT_BOUND, DEFAULT_BOUND); n],
            integrality: vec![false; n],
        }
    }

    pub fn n_vars(&self) -> usize {
        self.cost.len()
    }

    /// Appends a variable and returns its index.
    pub fn add_var(&mut self, cost: f64, lo: f64, hi: f64) -> usize {
        self.cost.push(cost);
        self.var_bounds.push((lo, hi));
        self.integrality.push(false);
        self.cost.len() - 1
    }

    pub fn add_integer_var(&mut self, cost: f64, lo: f64, hi: f64) -> usize {
        let j = self.add_var(cost, lo, hi);
        self.integrality[j] = true;
        j
    }

    pub fn add_eq(&mut self, coeffs: Vec<(usize, f64)>, rhs: f64) {
        self.eq_rows.push(SparseRow::new(coeffs, rhs));
    }

    /// Adds `coeffs . x <= rhs`.
    pub fn add_ineq(&mut self, coeffs: Vec<(usize, f64)>, rhs: f64) {
        self.ineq_rows.push(SparseRow::new(coeffs, rhs));
    }

    /// Fixes a variable by collapsing its bounds.
    pub fn fix_var(&mut self, var: usize, value: f64) {
        self.var_bounds[var] = (value, value);
    }

    pub fn has_integers(&self) -> bool {
        self.integrality.iter().any(|&b| b)
    }

    pub fn integer_vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.integrality
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(j, _)| j)
    }

    /// Objective value at `x`, including the constant offset.
    pub fn objective(&self, x: &[f64]) -> f64 {
        self.cost_offset + self.cost.iter().zip(x).map(|(c, v)| c * v).sum::<f64>()
    }

    /// Structural validation: index ranges, bound ordering, finiteness.
    pub fn validate(&self) -> Result<(), ProgramError> {
        let n = self.n_vars();
        if self.var_bounds.len() != n || self.integrality.len() != n {
            return Err(ProgramError::NonFinite("inconsistent field lengths"));
        }
        for (j, &(lo, hi)) in self.var_bounds.iter().enumerate() {
            if lo > hi || lo.is_nan() || hi.is_nan() {
                return Err(ProgramError::InvertedBounds(j));
            }
        }
        for c in &self.cost {
            if !c.is_finite() {
                return Err(ProgramError::NonFinite("cost"));
            }
        }
        for row in self.eq_rows.iter().chain(self.ineq_rows.iter()) {
            if !row.rhs.is_finite() {
                return Err(ProgramError::NonFinite("rhs"));
            }
            for &(j, a) in &row.coeffs {
                if j >= n {
                    return Err(ProgramError::BadVariableRef { var: j, n_vars: n });
                }
                if !a.is_finite() {
                    return Err(ProgramError::NonFinite("row coefficient"));
                }
            }
        }
        Ok(())
    }

    /// Worst violation of the rows and bounds at `x` (infinity norm).
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut v: f64 = 0.0;
        for row in &self.eq_rows {
            v = v.max((row.dot(x) - row.rhs).abs());
        }
        for row in &self.ineq_rows {
            v = v.max(row.dot(x) - row.rhs);
        }
        for (j, &(lo, hi)) in self.var_bounds.iter().enumerate() {
            v = v.max(lo - x[j]).max(x[j] - hi);
        }
        v.max(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builder_roundtrip() {
        let mut p = ConvexProgram::with_vars(0);
        let x = p.add_var(1.0, 0.0, 2.0);
        let g = p.add_integer_var(0.0, 0.0, 1.0);
        p.add_ineq(vec![(x, 1.0), (g, -3.0)], 1.5);
        p.add_eq(vec![(x, 2.0)], 1.0);
        assert_eq!(p.n_vars(), 2);
        assert!(p.has_integers());
        assert_eq!(p.integer_vars().collect::<Vec<_>>(), vec![g]);
        p.validate().unwrap();
        assert_eq!(p.objective(&[0.5, 1.0]), 0.5);
        assert!(p.max_violation(&[0.5, 0.0]) < 1e-12);
        assert!(p.max_violation(&[3.0, 0.0]) > 0.9);
    }

    #[test]
    fn validate_catches_bad_reference() {
        let mut p = ConvexProgram::with_vars(1);
        p.add_ineq(vec![(3, 1.0)], 0.0);
        assert!(matches!(
            p.validate(),
            Err(ProgramError::BadVariableRef { var: 3, .. })
        ));
    }

    #[test]
    fn validate_catches_inverted_bounds() {
        let mut p = ConvexProgram::with_vars(1);
        p.var_bounds[0] = (1.0, 0.0);
        assert!(matches!(p.validate(), Err(ProgramError::InvertedBounds(0))));
    }
}
