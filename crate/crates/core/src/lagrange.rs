//! Lagrange shape functions of degree m on a triangle in barycentric form.
//!
//! Node α = (α₀, α₁, α₂) with |α| = m sits at λ = α/m and carries the
//! Silvester product φ_α(λ) = Π_a R_{α_a}(λ_a), where
//! R_i(s) = Π_{l<i} (m s − l)/(l + 1).

use alloc::vec::Vec;

use crate::quadrature::QuadratureRule;

/// Values and first/second barycentric derivatives of one shape function.
#[derive(Debug, Clone, Copy, Default)]
pub struct ShapeEval {
    pub value: f64,
    pub d1: [f64; 3],
    pub d2: [[f64; 3]; 3],
}

#[derive(Debug, Clone)]
pub struct LagrangeElement {
    degree: usize,
    nodes: Vec<[usize; 3]>,
}

fn silvester(m: usize, i: usize, s: f64) -> (f64, f64, f64) {
    let (mut p, mut dp, mut ddp) = (1.0, 0.0, 0.0);
    for l in 0..i {
        let denom = (l + 1) as f64;
        let g = (m as f64 * s - l as f64) / denom;
        let dg = m as f64 / denom;
        ddp = ddp * g + 2.0 * dp * dg;
        dp = dp * g + p * dg;
        p *= g;
    }
    (p, dp, ddp)
}

impl LagrangeElement {
    /// Local node order: the three vertices, then the m−1 nodes of each local
    /// edge (edge i runs from vertex i to vertex i+1), then interior nodes.
    pub fn new(degree: usize) -> Self {
        let m = degree;
        let mut nodes = Vec::new();
        for a in 0..3 {
            let mut n = [0; 3];
            n[a] = m;
            nodes.push(n);
        }
        for e in 0..3 {
            for p in 1..m {
                let mut n = [0; 3];
                n[e] = m - p;
                n[(e + 1) % 3] = p;
                nodes.push(n);
            }
        }
        for i in 1..m {
            for j in 1..m {
                if i + j < m {
                    nodes.push([m - i - j, i, j]);
                }
            }
        }
        LagrangeElement { degree, nodes }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_interior(&self) -> usize {
        let m = self.degree;
        if m < 3 {
            0
        } else {
            (m - 1) * (m - 2) / 2
        }
    }

    pub fn nodes(&self) -> &[[usize; 3]] {
        &self.nodes
    }

    /// Barycentric coordinates of local node `j`.
    pub fn node_barycentric(&self, j: usize) -> [f64; 3] {
        let m = self.degree as f64;
        let n = self.nodes[j];
        [n[0] as f64 / m, n[1] as f64 / m, n[2] as f64 / m]
    }

    /// Values only.
    pub fn values(&self, lambda: [f64; 3], out: &mut [f64]) {
        let m = self.degree;
        for (o, n) in out.iter_mut().zip(&self.nodes) {
            *o = (0..3).map(|a| silvester(m, n[a], lambda[a]).0).product();
        }
    }

    /// Values with first and second derivatives in the barycentric variables.
    pub fn evaluate(&self, lambda: [f64; 3], out: &mut [ShapeEval]) {
        let m = self.degree;
        for (o, n) in out.iter_mut().zip(&self.nodes) {
            let r: [(f64, f64, f64); 3] = core::array::from_fn(|a| silvester(m, n[a], lambda[a]));
            let val = r[0].0 * r[1].0 * r[2].0;
            let mut d1 = [0.0; 3];
            let mut d2 = [[0.0; 3]; 3];
            for a in 0..3 {
                let (b, c) = ((a + 1) % 3, (a + 2) % 3);
                d1[a] = r[a].1 * r[b].0 * r[c].0;
                d2[a][a] = r[a].2 * r[b].0 * r[c].0;
                d2[a][b] = r[a].1 * r[b].1 * r[c].0;
                d2[b][a] = d2[a][b];
            }
            *o = ShapeEval { value: val, d1, d2 };
        }
    }
}

/// Shape functions tabulated at the points of a quadrature rule.
#[derive(Debug, Clone)]
pub struct Tabulation {
    pub rule: QuadratureRule,
    pub num_nodes: usize,
    /// `shapes[q * num_nodes + j]`
    pub shapes: Vec<ShapeEval>,
}

impl Tabulation {
    pub fn new(element: &LagrangeElement, rule: QuadratureRule) -> Self {
        let nn = element.num_nodes();
        let mut shapes = alloc::vec![ShapeEval::default(); nn * rule.len()];
        for (q, &p) in rule.points.iter().enumerate() {
            element.evaluate(p, &mut shapes[q * nn..(q + 1) * nn]);
        }
        Tabulation {
            rule,
            num_nodes: nn,
            shapes,
        }
    }

    #[inline]
    pub fn at(&self, q: usize) -> &[ShapeEval] {
        &self.shapes[q * self.num_nodes..(q + 1) * self.num_nodes]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_counts() {
        for m in 1..=4 {
            let el = LagrangeElement::new(m);
            assert_eq!(el.num_nodes(), (m + 1) * (m + 2) / 2);
            assert_eq!(el.num_nodes(), 3 + 3 * (m - 1) + el.num_interior());
        }
    }

    #[test]
    fn kronecker_and_partition_of_unity() {
        for m in 1..=4 {
            let el = LagrangeElement::new(m);
            let n = el.num_nodes();
            let mut v = alloc::vec![0.0; n];
            for i in 0..n {
                el.values(el.node_barycentric(i), &mut v);
                for (j, &x) in v.iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((x - want).abs() < 1e-13, "m={m} i={i} j={j}");
                }
            }
            let mut ev = alloc::vec![ShapeEval::default(); n];
            el.evaluate([0.2, 0.3, 0.5], &mut ev);
            let s: f64 = ev.iter().map(|e| e.value).sum();
            assert!((s - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let el = LagrangeElement::new(4);
        let n = el.num_nodes();
        let lam = [0.21, 0.33, 0.46];
        let h = 1e-5;
        let mut ev = alloc::vec![ShapeEval::default(); n];
        let mut ep = ev.clone();
        let mut em = ev.clone();
        el.evaluate(lam, &mut ev);
        for a in 0..3 {
            let mut lp = lam;
            let mut lm = lam;
            lp[a] += h;
            lm[a] -= h;
            el.evaluate(lp, &mut ep);
            el.evaluate(lm, &mut em);
            for j in 0..n {
                let fd = (ep[j].value - em[j].value) / (2.0 * h);
                assert!((fd - ev[j].d1[a]).abs() < 1e-6);
                for b in 0..3 {
                    let fd2 = (ep[j].d1[b] - em[j].d1[b]) / (2.0 * h);
                    assert!((fd2 - ev[j].d2[a][b]).abs() < 1e-5);
                }
            }
        }
    }
}
