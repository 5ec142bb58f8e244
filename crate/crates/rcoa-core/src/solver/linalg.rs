//! Envelope (skyline) LDL^T factorization with reverse Cuthill-McKee
//! ordering.
//!
//! The normal-equations matrices arising from multiple-shooting programs are
//! banded once rows are ordered along the horizon; RCM recovers that band
//! automatically and the envelope factorization then runs in O(n * bw^2).

use alloc::vec;
use alloc::vec::Vec;

/// Reverse Cuthill-McKee ordering of an undirected graph given as adjacency
/// lists. Returns `perm` with `perm[new] = old`.
pub fn reverse_cuthill_mckee(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut order = Vec::with_capacity(n);
    let mut visited = vec![false; n];
    let degree: Vec<usize> = adj.iter().map(|a| a.len()).collect();

    // queue-based BFS restarted at the unvisited vertex of minimum degree
    let mut queue: Vec<usize> = Vec::new();
    loop {
        let start = match (0..n).filter(|&v| !visited[v]).min_by_key(|&v| (degree[v], v)) {
            Some(v) => v,
            None => break,
        };
        visited[start] = true;
        queue.push(start);
        let mut head = 0;
        while head < queue.len() {
            let v = queue[head];
            head += 1;
            order.push(v);
            let mut nbrs: Vec<usize> = adj[v].iter().copied().filter(|&u| !visited[u]).collect();
            nbrs.sort_unstable_by_key(|&u| (degree[u], u));
            for u in nbrs {
                if !visited[u] {
                    visited[u] = true;
                    queue.push(u);
                }
            }
        }
        queue.clear();
    }
    order.reverse();
    order
}

/// Symmetric matrix stored by its lower envelope: row `i` holds columns
/// `first[i]..=i` contiguously.
pub struct Envelope {
    n: usize,
    first: Vec<usize>,
    start: Vec<usize>,
    vals: Vec<f64>,
    diag: Vec<f64>,
}

impl Envelope {
    /// Builds the symbolic envelope from the column span of each row:
    /// `first[i]` is the smallest column index with a structural entry in
    /// row `i` (clamped to `<= i`).
    pub fn symbolic(first: Vec<usize>) -> Self {
        let n = first.len();
        let mut start = Vec::with_capacity(n + 1);
        let mut acc = 0usize;
        for (i, &f) in first.iter().enumerate() {
            debug_assert!(f <= i);
            start.push(acc);
            acc += i - f;
        }
        start.push(acc);
        Envelope {
            n,
            first,
            start,
            vals: vec![0.0; acc],
            diag: vec![0.0; n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored off-diagonal entries.
    pub fn envelope_size(&self) -> usize {
        self.vals.len()
    }

    pub fn clear(&mut self) {
        self.vals.iter_mut().for_each(|v| *v = 0.0);
        self.diag.iter_mut().for_each(|v| *v = 0.0);
    }

    /// Adds to entry `(i, j)` with `j <= i`; the entry must lie inside the
    /// symbolic envelope.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        if i == j {
            self.diag[i] += v;
        } else {
            debug_assert!(j >= self.first[i]);
            let pos = self.start[i] + (j - self.first[i]);
            self.vals[pos] += v;
        }
    }

    /// Flat value-array position for `(i, j)`, `j < i`.
    #[inline]
    pub fn position(&self, i: usize, j: usize) -> usize {
        debug_assert!(j >= self.first[i] && j < i);
        self.start[i] + (j - self.first[i])
    }

    #[inline]
    pub fn add_at(&mut self, pos: usize, v: f64) {
        self.vals[pos] += v;
    }

    #[inline]
    pub fn add_diag(&mut self, i: usize, v: f64) {
        self.diag[i] += v;
    }

    /// Copies the currently assembled values out (before factoring).
    pub fn snapshot(&self, vals_out: &mut Vec<f64>, diag_out: &mut Vec<f64>) {
        vals_out.clear();
        vals_out.extend_from_slice(&self.vals);
        diag_out.clear();
        diag_out.extend_from_slice(&self.diag);
    }

    /// Symmetric matrix-vector product using the envelope pattern with the
    /// supplied value arrays (e.g. a pre-factorization snapshot).
    pub fn matvec_from(&self, vals: &[f64], diag: &[f64], x: &[f64], y: &mut [f64]) {
        for (i, out) in y.iter_mut().enumerate() {
            *out = diag[i] * x[i];
        }
        for i in 0..self.n {
            let fi = self.first[i];
            let pi = self.start[i];
            for k in 0..(i - fi) {
                let v = vals[pi + k];
                y[i] += v * x[fi + k];
                y[fi + k] += v * x[i];
            }
        }
    }

    /// In-place LDL^T factorization. Returns `false` when a pivot falls
    /// below `pivot_floor` in magnitude (matrix effectively singular).
    pub fn factor(&mut self, pivot_floor: f64) -> bool {
        let n = self.n;
        for i in 0..n {
            let fi = self.first[i];
            // strictly-lower row i
            for j in fi..i {
                let fj = self.first[j];
                let lo = fi.max(fj);
                let mut sum = 0.0;
                // dot over columns lo..j of rows i and j, weighted by D
                let pi = self.start[i] + (lo - fi);
                let pj = self.start[j] + (lo - fj);
                for k in 0..(j - lo) {
                    sum += self.vals[pi + k] * self.vals[pj + k] * self.diag[lo + k];
                }
                let pos = self.start[i] + (j - fi);
                self.vals[pos] = (self.vals[pos] - sum) / self.diag[j];
            }
            let mut sum = 0.0;
            let pi = self.start[i];
            for k in 0..(i - fi) {
                let l = self.vals[pi + k];
                sum += l * l * self.diag[fi + k];
            }
            let d = self.diag[i] - sum;
            if d.abs() <= pivot_floor {
                return false;
            }
            self.diag[i] = d;
        }
        true
    }

    /// Solves `L D L^T x = b` in place after [`Self::factor`].
    pub fn solve(&self, b: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let fi = self.first[i];
            let pi = self.start[i];
            let mut sum = b[i];
            for k in 0..(i - fi) {
                sum -= self.vals[pi + k] * b[fi + k];
            }
            b[i] = sum;
        }
        for i in 0..n {
            b[i] /= self.diag[i];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let pi = self.start[i];
            let bi = b[i];
            for k in 0..(i - fi) {
                b[fi + k] -= self.vals[pi + k] * bi;
            }
        }
    }
}
