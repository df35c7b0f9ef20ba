//! Sparse Cholesky factorization A = P'LL'P with nested dissection
//! orderings: geometric when node coordinates are known, otherwise from
//! BFS level structures.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::sparse::CsrMatrix;

const NONE: usize = usize::MAX;
const LEAF: usize = 64;

struct Graph<'a> {
    a: &'a CsrMatrix,
    /// Membership stamp of the current subgraph.
    mark: Vec<usize>,
    stamp: usize,
    /// BFS visit stamp and level.
    seen: Vec<usize>,
    bfs_stamp: usize,
    level: Vec<usize>,
}

impl Graph<'_> {
    fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.a.row(v).map(|(j, _)| j).filter(move |&j| j != v)
    }

    /// BFS inside the marked set; returns the visit order.
    fn bfs(&mut self, start: usize) -> Vec<usize> {
        self.bfs_stamp += 1;
        let mut order = vec![start];
        self.seen[start] = self.bfs_stamp;
        self.level[start] = 0;
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            let next = self.level[v] + 1;
            let nbrs: Vec<usize> = self.neighbors(v).collect();
            for j in nbrs {
                if self.mark[j] == self.stamp && self.seen[j] != self.bfs_stamp {
                    self.seen[j] = self.bfs_stamp;
                    self.level[j] = next;
                    order.push(j);
                }
            }
        }
        order
    }

    fn dissect(&mut self, nodes: Vec<usize>, out: &mut Vec<usize>) {
        if nodes.len() <= LEAF {
            out.extend(nodes);
            return;
        }
        self.stamp += 1;
        for &v in &nodes {
            self.mark[v] = self.stamp;
        }
        let mut order = self.bfs(nodes[0]);
        if order.len() < nodes.len() {
            let stamp = self.bfs_stamp;
            let rest: Vec<usize> = nodes.iter().copied().filter(|&v| self.seen[v] != stamp).collect();
            self.dissect(order, out);
            self.dissect(rest, out);
            return;
        }
        // pseudo-peripheral start node
        let mut depth = self.level[*order.last().unwrap()];
        for _ in 0..4 {
            let far = *order.last().unwrap();
            let candidate = self.bfs(far);
            let d = self.level[*candidate.last().unwrap()];
            order = candidate;
            if d <= depth {
                break;
            }
            depth = d;
        }
        if depth < 2 {
            out.extend(order);
            return;
        }
        let mut counts = vec![0usize; depth + 1];
        for &v in &order {
            counts[self.level[v]] += 1;
        }
        let half = order.len() / 2;
        let mut acc = 0;
        let mut cut = 1;
        for (l, &c) in counts.iter().enumerate() {
            acc += c;
            if acc > half {
                cut = l.clamp(1, depth - 1);
                break;
            }
        }
        let (mut left, mut right, mut sep) = (Vec::new(), Vec::new(), Vec::new());
        for &v in &order {
            match self.level[v].cmp(&cut) {
                core::cmp::Ordering::Less => left.push(v),
                core::cmp::Ordering::Greater => right.push(v),
                core::cmp::Ordering::Equal => sep.push(v),
            }
        }
        self.dissect(left, out);
        self.dissect(right, out);
        out.extend(sep);
    }
}

/// Elimination order (new index → old index) for a symmetric pattern.
pub fn nested_dissection(a: &CsrMatrix) -> Vec<usize> {
    let n = a.dim();
    let mut g = Graph {
        a,
        mark: vec![0; n],
        stamp: 0,
        seen: vec![0; n],
        bfs_stamp: 0,
        level: vec![0; n],
    };
    let mut out = Vec::with_capacity(n);
    g.dissect((0..n).collect(), &mut out);
    out
}

/// Cut positions tried along each axis, as fractions of the node count.
const CUTS: [f64; 5] = [0.3, 0.4, 0.5, 0.6, 0.7];

struct GeometricGraph<'a> {
    a: &'a CsrMatrix,
    coords: &'a [[f64; 2]],
    mark: Vec<usize>,
    stamp: usize,
    rank: Vec<usize>,
}

impl GeometricGraph<'_> {
    /// Nodes of `sorted[s..]` adjacent to `sorted[..s]`, with ranks set.
    fn separator(&self, sorted: &[usize], s: usize) -> Vec<usize> {
        sorted[s..]
            .iter()
            .copied()
            .filter(|&v| {
                self.a
                    .row(v)
                    .any(|(j, _)| j != v && self.mark[j] == self.stamp && self.rank[j] < s)
            })
            .collect()
    }

    fn dissect(&mut self, nodes: Vec<usize>, out: &mut Vec<usize>) {
        if nodes.len() <= LEAF {
            out.extend(nodes);
            return;
        }
        self.stamp += 1;
        for &v in &nodes {
            self.mark[v] = self.stamp;
        }
        let sorted_by = |axis: usize, coords: &[[f64; 2]]| {
            let mut sorted = nodes.clone();
            sorted.sort_by(|&p, &q| coords[p][axis].total_cmp(&coords[q][axis]).then(p.cmp(&q)));
            sorted
        };
        let mut best: Option<(usize, usize, usize)> = None;
        for axis in 0..2 {
            let sorted = sorted_by(axis, self.coords);
            for (r, &v) in sorted.iter().enumerate() {
                self.rank[v] = r;
            }
            for q in CUTS {
                let s = ((q * sorted.len() as f64) as usize).clamp(1, sorted.len() - 1);
                let size = self.separator(&sorted, s).len();
                if best.map_or(true, |b| size < b.0) {
                    best = Some((size, axis, s));
                }
            }
        }
        let (_, axis, s) = best.expect("at least one candidate");
        let sorted = sorted_by(axis, self.coords);
        for (r, &v) in sorted.iter().enumerate() {
            self.rank[v] = r;
        }
        let sep = self.separator(&sorted, s);
        self.stamp += 1;
        for &v in &sep {
            self.mark[v] = self.stamp;
        }
        let in_sep = self.stamp;
        let left = sorted[..s].to_vec();
        let right: Vec<usize> = sorted[s..].iter().copied().filter(|&v| self.mark[v] != in_sep).collect();
        self.dissect(left, out);
        self.dissect(right, out);
        out.extend(sep);
    }
}

/// Elimination order from recursive coordinate cuts; each cut is the
/// candidate with the smallest vertex separator.
pub fn geometric_dissection(a: &CsrMatrix, coords: &[[f64; 2]]) -> Vec<usize> {
    let n = a.dim();
    assert_eq!(coords.len(), n, "one coordinate per unknown");
    let mut g = GeometricGraph {
        a,
        coords,
        mark: vec![0; n],
        stamp: 0,
        rank: vec![0; n],
    };
    let mut out = Vec::with_capacity(n);
    g.dissect((0..n).collect(), &mut out);
    out
}

/// Lower-triangular factor stored by columns, diagonal entry first.
#[derive(Debug, Clone)]
pub struct SparseCholesky {
    perm: Vec<usize>,
    col_ptr: Vec<usize>,
    row_idx: Vec<u32>,
    values: Vec<f64>,
}

impl SparseCholesky {
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        Self::factor_ordered(a, nested_dissection(a))
    }

    /// Factors with a given elimination order (new index → old index).
    pub fn factor_ordered(a: &CsrMatrix, perm: Vec<usize>) -> Result<Self> {
        let n = a.dim();
        if n > u32::MAX as usize {
            return Err(Error::InvalidConfig("matrix too large for the factorization"));
        }
        if perm.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: perm.len(),
            });
        }
        let mut inv = vec![0; n];
        for (k, &old) in perm.iter().enumerate() {
            inv[old] = k;
        }
        // strictly lower rows of the permuted matrix, plus its diagonal
        let mut lower_ptr = vec![0; n + 1];
        let mut lower: Vec<(usize, f64)> = Vec::with_capacity(a.nnz() / 2 + n);
        let mut diag = vec![0.0; n];
        for k in 0..n {
            let start = lower.len();
            for (j, v) in a.row(perm[k]) {
                let i = inv[j];
                if i < k {
                    lower.push((i, v));
                } else if i == k {
                    diag[k] = v;
                }
            }
            lower[start..].sort_unstable_by_key(|e| e.0);
            lower_ptr[k + 1] = lower.len();
        }
        let row = |k: usize| &lower[lower_ptr[k]..lower_ptr[k + 1]];

        let mut parent = vec![NONE; n];
        let mut ancestor = vec![NONE; n];
        for k in 0..n {
            for &(mut i, _) in row(k) {
                while i != NONE && i < k {
                    let next = ancestor[i];
                    ancestor[i] = k;
                    if next == NONE {
                        parent[i] = k;
                    }
                    i = next;
                }
            }
        }

        let mut stack = vec![0; n];
        let mut flag = vec![NONE; n];
        let reach = |k: usize, flag: &mut [usize], stack: &mut [usize]| -> usize {
            let mut top = n;
            flag[k] = k;
            for &(i0, _) in row(k) {
                let mut i = i0;
                let mut len = 0;
                while flag[i] != k {
                    stack[len] = i;
                    len += 1;
                    flag[i] = k;
                    i = parent[i];
                }
                while len > 0 {
                    top -= 1;
                    len -= 1;
                    stack[top] = stack[len];
                }
            }
            top
        };

        let mut counts = vec![1usize; n];
        for k in 0..n {
            let top = reach(k, &mut flag, &mut stack);
            for &j in &stack[top..] {
                counts[j] += 1;
            }
        }
        let mut col_ptr = vec![0; n + 1];
        for j in 0..n {
            col_ptr[j + 1] = col_ptr[j] + counts[j];
        }
        let nnz = col_ptr[n];
        let mut row_idx = vec![0u32; nnz];
        let mut values = vec![0.0; nnz];
        let mut next = col_ptr.clone();
        let mut x = vec![0.0; n];
        flag.iter_mut().for_each(|f| *f = NONE);
        for k in 0..n {
            let top = reach(k, &mut flag, &mut stack);
            for &(i, v) in row(k) {
                x[i] = v;
            }
            let mut d = diag[k];
            for &i in &stack[top..] {
                let lki = x[i] / values[col_ptr[i]];
                x[i] = 0.0;
                for p in col_ptr[i] + 1..next[i] {
                    x[row_idx[p] as usize] -= values[p] * lki;
                }
                d -= lki * lki;
                let p = next[i];
                next[i] += 1;
                row_idx[p] = k as u32;
                values[p] = lki;
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::NotPositiveDefinite(perm[k]));
            }
            let p = next[k];
            next[k] += 1;
            row_idx[p] = k as u32;
            values[p] = math::sqrt(d);
        }
        Ok(SparseCholesky {
            perm,
            col_ptr,
            row_idx,
            values,
        })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    /// Number of stored entries of L.
    pub fn factor_nnz(&self) -> usize {
        self.values.len()
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut x: Vec<f64> = self.perm.iter().map(|&old| rhs[old]).collect();
        for j in 0..n {
            let (s, e) = (self.col_ptr[j], self.col_ptr[j + 1]);
            x[j] /= self.values[s];
            let xj = x[j];
            for p in s + 1..e {
                x[self.row_idx[p] as usize] -= self.values[p] * xj;
            }
        }
        for j in (0..n).rev() {
            let (s, e) = (self.col_ptr[j], self.col_ptr[j + 1]);
            let mut acc = x[j];
            for p in s + 1..e {
                acc -= self.values[p] * x[self.row_idx[p] as usize];
            }
            x[j] = acc / self.values[s];
        }
        let mut out = vec![0.0; n];
        for (k, &old) in self.perm.iter().enumerate() {
            out[old] = x[k];
        }
        out
    }
}
