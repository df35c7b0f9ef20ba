//! Lagrange finite element spaces with homogeneous Dirichlet conditions.
//!
//! Global dofs are numbered vertices first, then `m − 1` nodes per edge
//! (counted from the endpoint with the smaller vertex index), then the
//! element-interior nodes. Only dofs off the boundary are unknowns; a
//! [`DiscreteFunction`] stores exactly those.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lagrange::{LagrangeElement, ShapeEval, Tabulation};
use crate::mesh::{Triangulation, NONE};
use crate::quadrature::QuadratureRule;
use crate::sparse::CsrMatrix;

/// Choice of the X inner product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormVariant {
    /// ⟨v, w⟩ = ε(∇v, ∇w)
    Energy { epsilon: f64 },
    /// ⟨v, w⟩ = ε(∇v, ∇w) + (v, w)
    EpsWeightedH1 { epsilon: f64 },
}

impl NormVariant {
    pub fn epsilon(self) -> f64 {
        match self {
            NormVariant::Energy { epsilon } | NormVariant::EpsWeightedH1 { epsilon } => epsilon,
        }
    }

    /// Coefficient of the L² part.
    pub fn mass(self) -> f64 {
        match self {
            NormVariant::Energy { .. } => 0.0,
            NormVariant::EpsWeightedH1 { .. } => 1.0,
        }
    }
}

#[derive(Debug)]
pub struct FeSpace {
    mesh: Arc<Triangulation>,
    element: LagrangeElement,
    /// `element_dofs[t * nloc + j]`: global dof of local node j.
    element_dofs: Vec<usize>,
    /// Same layout, unknown index or [`NONE`] for boundary nodes.
    local_unknowns: Vec<usize>,
    num_global: usize,
    dimension: usize,
    area: Vec<f64>,
    grad_lambda: Vec<[[f64; 2]; 3]>,
    tab: Tabulation,
    ref_stiffness: [[Vec<f64>; 3]; 3],
    ref_mass: Vec<f64>,
    pattern: CsrMatrix,
}

/// Quadrature order used for load, nonlinear terms and the energy.
pub fn nonlinear_order(m: usize) -> usize {
    (2 * m + 2).max(3 * m + 1)
}

pub fn build_space(mesh: Arc<Triangulation>, degree: usize) -> Result<Arc<FeSpace>> {
    FeSpace::new(mesh, degree).map(Arc::new)
}

impl FeSpace {
    pub fn new(mesh: Arc<Triangulation>, degree: usize) -> Result<Self> {
        if !(1..=4).contains(&degree) {
            return Err(Error::UnsupportedDegree(degree));
        }
        let m = degree;
        let element = LagrangeElement::new(m);
        let nloc = element.num_nodes();
        let ni = element.num_interior();
        let nv = mesh.num_vertices();
        let edges = mesh.edges();
        let ne = edges.len();
        let nt = mesh.num_elements();
        let num_global = nv + ne * (m - 1) + nt * ni;

        let mut element_dofs = Vec::with_capacity(nt * nloc);
        for (t, el) in mesh.elements().iter().enumerate() {
            element_dofs.extend_from_slice(el);
            for e in 0..3 {
                let id = edges.element_edges[t][e];
                let forward = el[e] == edges.endpoints[id][0];
                for p in 1..m {
                    let gp = if forward { p } else { m - p };
                    element_dofs.push(nv + id * (m - 1) + gp - 1);
                }
            }
            for k in 0..ni {
                element_dofs.push(nv + ne * (m - 1) + t * ni + k);
            }
        }

        let mut on_boundary = vec![false; num_global];
        for (id, ends) in edges.endpoints.iter().enumerate() {
            if edges.is_boundary(id) {
                on_boundary[ends[0]] = true;
                on_boundary[ends[1]] = true;
                for p in 0..m - 1 {
                    on_boundary[nv + id * (m - 1) + p] = true;
                }
            }
        }
        let mut unknown = vec![NONE; num_global];
        let mut dimension = 0;
        for g in 0..num_global {
            if !on_boundary[g] {
                unknown[g] = dimension;
                dimension += 1;
            }
        }
        let local_unknowns: Vec<usize> = element_dofs.iter().map(|&g| unknown[g]).collect();

        let mut area = Vec::with_capacity(nt);
        let mut grad_lambda = Vec::with_capacity(nt);
        for t in 0..nt {
            let a = mesh.area(t);
            if !(a > 0.0) {
                return Err(Error::DegenerateElement(t, a));
            }
            let p = mesh.element_vertices(t);
            let s = 1.0 / (2.0 * a);
            let g: [[f64; 2]; 3] = core::array::from_fn(|i| {
                let (b, c) = (p[(i + 1) % 3], p[(i + 2) % 3]);
                [(b[1] - c[1]) * s, (c[0] - b[0]) * s]
            });
            area.push(a);
            grad_lambda.push(g);
        }

        let tab = Tabulation::new(&element, QuadratureRule::triangle(nonlinear_order(m)));
        let mut ref_stiffness: [[Vec<f64>; 3]; 3] = Default::default();
        for (a, row) in ref_stiffness.iter_mut().enumerate() {
            for (b, s) in row.iter_mut().enumerate() {
                *s = vec![0.0; nloc * nloc];
                for (q, &w) in tab.rule.weights.iter().enumerate() {
                    let sh = tab.at(q);
                    for i in 0..nloc {
                        for j in 0..nloc {
                            s[i * nloc + j] += w * sh[i].d1[a] * sh[j].d1[b];
                        }
                    }
                }
            }
        }
        let mut ref_mass = vec![0.0; nloc * nloc];
        for (q, &w) in tab.rule.weights.iter().enumerate() {
            let sh = tab.at(q);
            for i in 0..nloc {
                for j in 0..nloc {
                    ref_mass[i * nloc + j] += w * sh[i].value * sh[j].value;
                }
            }
        }

        let pattern = build_pattern(dimension, nt, nloc, &local_unknowns);

        Ok(FeSpace {
            mesh,
            element,
            element_dofs,
            local_unknowns,
            num_global,
            dimension,
            area,
            grad_lambda,
            tab,
            ref_stiffness,
            ref_mass,
            pattern,
        })
    }

    pub fn mesh(&self) -> &Arc<Triangulation> {
        &self.mesh
    }

    pub fn degree(&self) -> usize {
        self.element.degree()
    }

    pub fn element(&self) -> &LagrangeElement {
        &self.element
    }

    /// Number of unknowns (interior Lagrange nodes).
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn num_global_dofs(&self) -> usize {
        self.num_global
    }

    pub fn nodes_per_element(&self) -> usize {
        self.element.num_nodes()
    }

    pub fn element_dofs(&self, t: usize) -> &[usize] {
        let n = self.nodes_per_element();
        &self.element_dofs[t * n..(t + 1) * n]
    }

    /// Unknown index of each local node of `t`, [`NONE`] on the boundary.
    pub fn local_unknowns(&self, t: usize) -> &[usize] {
        let n = self.nodes_per_element();
        &self.local_unknowns[t * n..(t + 1) * n]
    }

    pub fn area(&self, t: usize) -> f64 {
        self.area[t]
    }

    /// Position of every unknown's Lagrange node.
    pub fn unknown_coordinates(&self) -> Vec<[f64; 2]> {
        let mut out = vec![[0.0; 2]; self.dimension];
        for t in 0..self.mesh.num_elements() {
            for (j, &k) in self.local_unknowns(t).iter().enumerate() {
                if k != NONE {
                    out[k] = self.map_point(t, self.element.node_barycentric(j));
                }
            }
        }
        out
    }

    pub fn grad_lambda(&self, t: usize) -> &[[f64; 2]; 3] {
        &self.grad_lambda[t]
    }

    /// Tabulation on the rule of order [`nonlinear_order`].
    pub fn tabulation(&self) -> &Tabulation {
        &self.tab
    }

    /// Zero matrix with the sparsity pattern of the unknowns.
    pub fn zero_matrix(&self) -> CsrMatrix {
        self.pattern.clone()
    }

    /// Coefficients of the local basis on `t` (zero for boundary nodes).
    pub fn gather(&self, t: usize, coefficients: &[f64], out: &mut [f64]) {
        for (o, &i) in out.iter_mut().zip(self.local_unknowns(t)) {
            *o = if i == NONE { 0.0 } else { coefficients[i] };
        }
    }

    /// Physical point of barycentric coordinates `lambda` in `t`.
    pub fn map_point(&self, t: usize, lambda: [f64; 3]) -> [f64; 2] {
        let p = self.mesh.element_vertices(t);
        [
            lambda[0] * p[0][0] + lambda[1] * p[1][0] + lambda[2] * p[2][0],
            lambda[0] * p[0][1] + lambda[1] * p[1][1] + lambda[2] * p[2][1],
        ]
    }

    /// Physical gradient of a local shape function.
    #[inline]
    pub fn shape_gradient(&self, t: usize, s: &ShapeEval) -> [f64; 2] {
        let g = &self.grad_lambda[t];
        [
            s.d1[0] * g[0][0] + s.d1[1] * g[1][0] + s.d1[2] * g[2][0],
            s.d1[0] * g[0][1] + s.d1[1] * g[1][1] + s.d1[2] * g[2][1],
        ]
    }

    /// Physical Laplacian of a local shape function.
    #[inline]
    pub fn shape_laplacian(&self, t: usize, s: &ShapeEval) -> f64 {
        let g = &self.grad_lambda[t];
        let mut lap = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                lap += s.d2[a][b] * (g[a][0] * g[b][0] + g[a][1] * g[b][1]);
            }
        }
        lap
    }

    fn scatter_matrix(&self, t: usize, local: &[f64], matrix: &mut CsrMatrix) {
        let nloc = self.nodes_per_element();
        let ids = self.local_unknowns(t);
        for (i, &gi) in ids.iter().enumerate() {
            if gi == NONE {
                continue;
            }
            for (j, &gj) in ids.iter().enumerate() {
                if gj != NONE {
                    matrix.add(gi, gj, local[i * nloc + j]);
                }
            }
        }
    }

    fn scatter_vector(&self, t: usize, local: &[f64], vector: &mut [f64]) {
        for (&g, &v) in self.local_unknowns(t).iter().zip(local) {
            if g != NONE {
                vector[g] += v;
            }
        }
    }
}

fn build_pattern(n: usize, nt: usize, nloc: usize, local_unknowns: &[usize]) -> CsrMatrix {
    // unknown -> incident elements
    let mut count = vec![0usize; n + 1];
    for &g in local_unknowns {
        if g != NONE {
            count[g + 1] += 1;
        }
    }
    for i in 0..n {
        count[i + 1] += count[i];
    }
    let mut fill = count.clone();
    let mut incident = vec![0usize; count[n]];
    for t in 0..nt {
        for &g in &local_unknowns[t * nloc..(t + 1) * nloc] {
            if g != NONE {
                incident[fill[g]] = t;
                fill[g] += 1;
            }
        }
    }
    let mut row_ptr = Vec::with_capacity(n + 1);
    row_ptr.push(0);
    let mut col_idx = Vec::new();
    let mut row = Vec::new();
    for g in 0..n {
        row.clear();
        for &t in &incident[count[g]..count[g + 1]] {
            row.extend(local_unknowns[t * nloc..(t + 1) * nloc].iter().copied().filter(|&c| c != NONE));
        }
        row.sort_unstable();
        row.dedup();
        col_idx.extend_from_slice(&row);
        row_ptr.push(col_idx.len());
    }
    CsrMatrix::from_rows(row_ptr, col_idx)
}

/// ε(∇·, ∇·) + μ(·, ·) on the unknowns, integrated exactly.
pub fn assemble_inner_product(space: &FeSpace, norm: NormVariant) -> CsrMatrix {
    let eps = norm.epsilon();
    let mu = norm.mass();
    let nloc = space.nodes_per_element();
    let mut matrix = space.zero_matrix();
    let mut local = vec![0.0; nloc * nloc];
    for t in 0..space.mesh.num_elements() {
        let g = space.grad_lambda(t);
        let area = space.area(t);
        local.iter_mut().for_each(|v| *v = 0.0);
        for a in 0..3 {
            for b in 0..3 {
                let c = eps * area * (g[a][0] * g[b][0] + g[a][1] * g[b][1]);
                for (l, r) in local.iter_mut().zip(&space.ref_stiffness[a][b]) {
                    *l += c * r;
                }
            }
        }
        if mu != 0.0 {
            for (l, r) in local.iter_mut().zip(&space.ref_mass) {
                *l += mu * area * r;
            }
        }
        for i in 0..nloc {
            for j in 0..i {
                local[i * nloc + j] = local[j * nloc + i];
            }
        }
        space.scatter_matrix(t, &local, &mut matrix);
    }
    matrix
}

pub fn assemble_mass(space: &FeSpace) -> CsrMatrix {
    let nloc = space.nodes_per_element();
    let mut matrix = space.zero_matrix();
    let mut local = vec![0.0; nloc * nloc];
    for t in 0..space.mesh.num_elements() {
        let area = space.area(t);
        for (l, r) in local.iter_mut().zip(&space.ref_mass) {
            *l = area * r;
        }
        space.scatter_matrix(t, &local, &mut matrix);
    }
    matrix
}

/// Entries (f, φ_i) + (**f**, ∇φ_i).
pub fn assemble_load(
    space: &FeSpace,
    f: impl Fn([f64; 2]) -> f64,
    vecf: impl Fn([f64; 2]) -> [f64; 2],
) -> Vec<f64> {
    let nloc = space.nodes_per_element();
    let tab = space.tabulation();
    let mut out = vec![0.0; space.dimension()];
    let mut local = vec![0.0; nloc];
    for t in 0..space.mesh.num_elements() {
        let area = space.area(t);
        local.iter_mut().for_each(|v| *v = 0.0);
        for (q, (&lam, &w)) in tab.rule.points.iter().zip(&tab.rule.weights).enumerate() {
            let x = space.map_point(t, lam);
            let fx = f(x) * w * area;
            let gx = vecf(x);
            let sh = tab.at(q);
            for (l, s) in local.iter_mut().zip(sh) {
                let gr = space.shape_gradient(t, s);
                *l += fx * s.value + w * area * (gx[0] * gr[0] + gx[1] * gr[1]);
            }
        }
        space.scatter_vector(t, &local, &mut out);
    }
    out
}

/// Entries (b(u), φ_i) together with ∫ B(u).
pub fn assemble_semilinear_with_antiderivative(
    space: &FeSpace,
    b: impl Fn(f64) -> f64,
    big_b: impl Fn(f64) -> f64,
    u: &DiscreteFunction,
) -> Result<(Vec<f64>, f64)> {
    let nloc = space.nodes_per_element();
    let tab = space.tabulation();
    let mut out = vec![0.0; space.dimension()];
    let mut integral = 0.0;
    let mut coeffs = vec![0.0; nloc];
    let mut local = vec![0.0; nloc];
    for t in 0..space.mesh.num_elements() {
        let area = space.area(t);
        space.gather(t, &u.coefficients, &mut coeffs);
        local.iter_mut().for_each(|v| *v = 0.0);
        for (q, &w) in tab.rule.weights.iter().enumerate() {
            let sh = tab.at(q);
            let uq: f64 = sh.iter().zip(&coeffs).map(|(s, c)| s.value * c).sum();
            let bq = b(uq);
            if !bq.is_finite() {
                return Err(Error::NonFinite("semilinear term"));
            }
            integral += w * area * big_b(uq);
            for (l, s) in local.iter_mut().zip(sh) {
                *l += w * area * bq * s.value;
            }
        }
        space.scatter_vector(t, &local, &mut out);
    }
    if !integral.is_finite() {
        return Err(Error::NonFinite("antiderivative integral"));
    }
    Ok((out, integral))
}

/// Entries (b(u), φ_i).
pub fn assemble_semilinear_term(space: &FeSpace, b: impl Fn(f64) -> f64, u: &DiscreteFunction) -> Result<Vec<f64>> {
    assemble_semilinear_with_antiderivative(space, b, |_| 0.0, u).map(|(v, _)| v)
}

/// Matrix (c(u) φ_j, φ_i) for a pointwise coefficient c.
pub fn assemble_weighted_mass(space: &FeSpace, u: &DiscreteFunction, c: impl Fn(f64) -> f64) -> CsrMatrix {
    let nloc = space.nodes_per_element();
    let tab = space.tabulation();
    let mut matrix = space.zero_matrix();
    let mut coeffs = vec![0.0; nloc];
    let mut local = vec![0.0; nloc * nloc];
    for t in 0..space.mesh.num_elements() {
        let area = space.area(t);
        space.gather(t, &u.coefficients, &mut coeffs);
        local.iter_mut().for_each(|v| *v = 0.0);
        for (q, &w) in tab.rule.weights.iter().enumerate() {
            let sh = tab.at(q);
            let uq: f64 = sh.iter().zip(&coeffs).map(|(s, c)| s.value * c).sum();
            let cq = w * area * c(uq);
            for i in 0..nloc {
                for j in 0..nloc {
                    local[i * nloc + j] += cq * sh[i].value * sh[j].value;
                }
            }
        }
        space.scatter_matrix(t, &local, &mut matrix);
    }
    matrix
}

/// A finite element function; boundary values are implicitly zero.
#[derive(Debug, Clone)]
pub struct DiscreteFunction {
    space: Arc<FeSpace>,
    pub coefficients: Vec<f64>,
}

impl DiscreteFunction {
    pub fn new(space: Arc<FeSpace>, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.len() != space.dimension() {
            return Err(Error::DimensionMismatch {
                expected: space.dimension(),
                got: coefficients.len(),
            });
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("coefficients"));
        }
        Ok(DiscreteFunction { space, coefficients })
    }

    pub fn zero(space: Arc<FeSpace>) -> Self {
        let n = space.dimension();
        DiscreteFunction {
            space,
            coefficients: vec![0.0; n],
        }
    }

    /// Lagrange interpolant of `g` (boundary nodes dropped).
    pub fn interpolate(space: Arc<FeSpace>, g: impl Fn([f64; 2]) -> f64) -> Self {
        let mut c = vec![0.0; space.dimension()];
        for t in 0..space.mesh.num_elements() {
            for (j, &i) in space.local_unknowns(t).iter().enumerate() {
                if i != NONE {
                    c[i] = g(space.map_point(t, space.element.node_barycentric(j)));
                }
            }
        }
        DiscreteFunction { space, coefficients: c }
    }

    pub fn space(&self) -> &Arc<FeSpace> {
        &self.space
    }

    /// Value and gradient at barycentric coordinates `lambda` of element `t`.
    pub fn eval_in_element(&self, t: usize, lambda: [f64; 3]) -> (f64, [f64; 2]) {
        let sp = &*self.space;
        let n = sp.nodes_per_element();
        let mut sh = vec![ShapeEval::default(); n];
        let mut c = vec![0.0; n];
        sp.element.evaluate(lambda, &mut sh);
        sp.gather(t, &self.coefficients, &mut c);
        let mut v = 0.0;
        let mut g = [0.0; 2];
        for (s, &ci) in sh.iter().zip(&c) {
            v += ci * s.value;
            let gr = sp.shape_gradient(t, s);
            g[0] += ci * gr[0];
            g[1] += ci * gr[1];
        }
        (v, g)
    }

    /// Values and gradients at physical points.
    pub fn evaluate(&self, points: &[[f64; 2]]) -> Result<Vec<(f64, [f64; 2])>> {
        let mesh = self.space.mesh();
        points
            .iter()
            .map(|&x| {
                let t = mesh.locate(x)?;
                Ok(self.eval_in_element(t, mesh.barycentric(t, x)))
            })
            .collect()
    }
}

/// ‖v − u‖ in the given inner product for a smooth `v` given with its gradient.
pub fn error_norm(u: &DiscreteFunction, exact: impl Fn([f64; 2]) -> (f64, [f64; 2]), norm: NormVariant) -> f64 {
    let sp = u.space();
    let tab = sp.tabulation();
    let nloc = sp.nodes_per_element();
    let (eps, mu) = (norm.epsilon(), norm.mass());
    let mut c = vec![0.0; nloc];
    let mut sum = 0.0;
    for t in 0..sp.mesh().num_elements() {
        sp.gather(t, &u.coefficients, &mut c);
        let area = sp.area(t);
        for (q, (&lam, &w)) in tab.rule.points.iter().zip(&tab.rule.weights).enumerate() {
            let mut v = 0.0;
            let mut g = [0.0; 2];
            for (s, &ci) in tab.at(q).iter().zip(&c) {
                v += ci * s.value;
                let gr = sp.shape_gradient(t, s);
                g[0] += ci * gr[0];
                g[1] += ci * gr[1];
            }
            let (ev, eg) = exact(sp.map_point(t, lam));
            let (d0, d1) = (eg[0] - g[0], eg[1] - g[1]);
            sum += w * area * (eps * (d0 * d0 + d1 * d1) + mu * (ev - v) * (ev - v));
        }
    }
    crate::math::sqrt(sum)
}

/// Re-represents `u` on a space over a refinement of its mesh.
pub fn prolongate(u: &DiscreteFunction, fine: &Arc<FeSpace>) -> Result<DiscreteFunction> {
    let coarse = u.space();
    if coarse.degree() != fine.degree() {
        return Err(Error::UnrelatedMeshes);
    }
    let cm = coarse.mesh();
    let fm = fine.mesh();
    let parents = fm.parents();
    if parents.len() != fm.num_elements() {
        return Err(Error::UnrelatedMeshes);
    }
    let nloc = fine.nodes_per_element();
    let mut sh = vec![0.0; nloc];
    let mut cc = vec![0.0; nloc];
    let mut out = vec![0.0; fine.dimension()];
    for (t, &p) in parents.iter().enumerate() {
        if p >= cm.num_elements() || cm.barycentric(p, fm.centroid(t)).iter().any(|&l| l < -1e-10) {
            return Err(Error::UnrelatedMeshes);
        }
        coarse.gather(p, &u.coefficients, &mut cc);
        for (j, &i) in fine.local_unknowns(t).iter().enumerate() {
            if i == NONE {
                continue;
            }
            let x = fine.map_point(t, fine.element.node_barycentric(j));
            coarse.element.values(cm.barycentric(p, x), &mut sh);
            out[i] = sh.iter().zip(&cc).map(|(s, c)| s * c).sum();
        }
    }
    DiscreteFunction::new(fine.clone(), out)
}
