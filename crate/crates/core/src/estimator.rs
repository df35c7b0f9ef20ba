//! Residual a posteriori error indicators. The local mesh size is
//! h_T = |T|^{1/2}.

use alloc::vec;
use alloc::vec::Vec;

use crate::lagrange::{ShapeEval, Tabulation};
use crate::math;
use crate::problem::{EstimatorVariant, ModelProblem};
use crate::quadrature::{gauss_legendre, QuadratureRule};
use crate::space::{DiscreteFunction, FeSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndicatorKind {
    Residual,
    EpsRobust,
    Dual,
}

/// Squared local contributions η_T².
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorField {
    pub values: Vec<f64>,
    pub kind: IndicatorKind,
}

impl IndicatorField {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// (Σ η_T²)^{1/2} over all elements.
    pub fn total(&self) -> f64 {
        total(self, None)
    }
}

/// (Σ_{T ∈ subset} η_T²)^{1/2}; `None` sums over all elements.
pub fn total(field: &IndicatorField, subset: Option<&[usize]>) -> f64 {
    let s: f64 = match subset {
        None => field.values.iter().sum(),
        Some(ids) => ids.iter().map(|&t| field.values[t]).sum(),
    };
    math::sqrt(s)
}

/// Relative distance used to evaluate piecewise data on one side of an edge.
const PULL: f64 = 1e-9;

struct Kernel<'a> {
    space: &'a FeSpace,
    u: &'a [f64],
    aux: Option<&'a [f64]>,
    /// Diffusion scale multiplying Δu and ∇u.
    eps: f64,
    /// Everything in the volume residual except ε Δu.
    source: &'a dyn Fn([f64; 2], f64, f64) -> f64,
    /// Field subtracted from ε∇u in the flux.
    field: &'a dyn Fn([f64; 2]) -> [f64; 2],
    /// Weight of the volume term; the jump term uses its square root.
    volume_weight: &'a dyn Fn(usize) -> f64,
}

impl Kernel<'_> {
    fn run(&self) -> Vec<f64> {
        let sp = self.space;
        let mesh = sp.mesh();
        let nt = mesh.num_elements();
        let nloc = sp.nodes_per_element();
        let m = sp.degree();
        let mut out = vec![0.0; nt];

        let tab = Tabulation::new(sp.element(), QuadratureRule::triangle(2 * m));
        let mut cu = vec![0.0; nloc];
        let mut ca = vec![0.0; nloc];
        for (t, o) in out.iter_mut().enumerate() {
            sp.gather(t, self.u, &mut cu);
            if let Some(a) = self.aux {
                sp.gather(t, a, &mut ca);
            }
            let area = sp.area(t);
            let mut vol = 0.0;
            for (q, (&lam, &w)) in tab.rule.points.iter().zip(&tab.rule.weights).enumerate() {
                let sh = tab.at(q);
                let mut uq = 0.0;
                let mut lap = 0.0;
                let mut aq = 0.0;
                for (j, s) in sh.iter().enumerate() {
                    uq += cu[j] * s.value;
                    aq += ca[j] * s.value;
                    if m > 1 {
                        lap += cu[j] * sp.shape_laplacian(t, s);
                    }
                }
                let x = sp.map_point(t, lam);
                let r = self.eps * lap + (self.source)(x, uq, aq);
                vol += w * area * r * r;
            }
            *o = (self.volume_weight)(t) * vol;
        }

        // jumps over interior edges, charged to both neighbours
        let (gx, gw) = gauss_legendre(m + 1);
        let ng = gx.len();
        let mut edge_tab: [Vec<ShapeEval>; 3] = Default::default();
        for (i, et) in edge_tab.iter_mut().enumerate() {
            *et = vec![ShapeEval::default(); ng * nloc];
            for (q, &s) in gx.iter().enumerate() {
                let mut lam = [0.0; 3];
                lam[i] = 1.0 - s;
                lam[(i + 1) % 3] = s;
                sp.element().evaluate(lam, &mut et[q * nloc..(q + 1) * nloc]);
            }
        }
        let edges = mesh.edges();
        let mut c1 = vec![0.0; nloc];
        let mut c2 = vec![0.0; nloc];
        for e in 0..edges.len() {
            if edges.is_boundary(e) {
                continue;
            }
            let [t1, t2] = edges.adjacent[e];
            let i1 = local_edge(mesh.edges().element_edges[t1], e);
            let i2 = local_edge(mesh.edges().element_edges[t2], e);
            let el1 = mesh.elements()[t1];
            let el2 = mesh.elements()[t2];
            // t2 traverses the shared edge in the opposite direction when consistently oriented
            let reversed = el2[i2] == el1[(i1 + 1) % 3];
            let n1 = mesh.outward_normal(t1, i1);
            let p = mesh.vertices()[el1[i1]];
            let qv = mesh.vertices()[el1[(i1 + 1) % 3]];
            let len = math::hypot(qv[0] - p[0], qv[1] - p[1]);
            let (cen1, cen2) = (mesh.centroid(t1), mesh.centroid(t2));
            sp.gather(t1, self.u, &mut c1);
            sp.gather(t2, self.u, &mut c2);
            let mut jump2 = 0.0;
            for q in 0..ng {
                let q2 = if reversed { ng - 1 - q } else { q };
                let s = gx[q];
                let x = [p[0] + s * (qv[0] - p[0]), p[1] + s * (qv[1] - p[1])];
                let g1 = grad(sp, t1, &c1, &edge_tab[i1][q * nloc..(q + 1) * nloc]);
                let g2 = grad(sp, t2, &c2, &edge_tab[i2][q2 * nloc..(q2 + 1) * nloc]);
                let f1 = (self.field)(toward(x, cen1));
                let f2 = (self.field)(toward(x, cen2));
                let flux1 = [self.eps * g1[0] - f1[0], self.eps * g1[1] - f1[1]];
                let flux2 = [self.eps * g2[0] - f2[0], self.eps * g2[1] - f2[1]];
                let j = (flux1[0] - flux2[0]) * n1[0] + (flux1[1] - flux2[1]) * n1[1];
                jump2 += gw[q] * len * j * j;
            }
            out[t1] += math::sqrt((self.volume_weight)(t1)) * jump2;
            out[t2] += math::sqrt((self.volume_weight)(t2)) * jump2;
        }
        out
    }
}

fn local_edge(ids: [usize; 3], e: usize) -> usize {
    ids.iter().position(|&x| x == e).expect("edge not on element")
}

fn toward(x: [f64; 2], c: [f64; 2]) -> [f64; 2] {
    [x[0] + PULL * (c[0] - x[0]), x[1] + PULL * (c[1] - x[1])]
}

fn grad(sp: &FeSpace, t: usize, c: &[f64], sh: &[ShapeEval]) -> [f64; 2] {
    let mut g = [0.0; 2];
    for (s, &ci) in sh.iter().zip(c) {
        let gr = sp.shape_gradient(t, s);
        g[0] += ci * gr[0];
        g[1] += ci * gr[1];
    }
    g
}

fn residual_with_weight(problem: &ModelProblem, u: &DiscreteFunction, weight: &dyn Fn(usize) -> f64) -> Vec<f64> {
    let f = problem.f;
    let source = |x: [f64; 2], v: f64, _: f64| f(x) - problem.reaction(v);
    Kernel {
        space: u.space(),
        u: &u.coefficients,
        aux: None,
        eps: problem.epsilon(),
        source: &source,
        field: &problem.vecf,
        volume_weight: weight,
    }
    .run()
}

/// h_T²‖f + εΔu − μu − b(u)‖²_T + h_T‖[[(ε∇u − **f**)·n]]‖²_{∂T∩Ω}
pub fn residual_indicators(problem: &ModelProblem, u: &DiscreteFunction) -> IndicatorField {
    let mesh = u.space().mesh().clone();
    let weight = |t: usize| {
        let h = math::sqrt(mesh.area(t));
        h * h
    };
    IndicatorField {
        values: residual_with_weight(problem, u, &weight),
        kind: IndicatorKind::Residual,
    }
}

/// As [`residual_indicators`] with h_T replaced by ℏ_T = min(ε^{-1/2} h_T, 1).
pub fn eps_robust_indicators(problem: &ModelProblem, u: &DiscreteFunction) -> IndicatorField {
    let mesh = u.space().mesh().clone();
    let scale = 1.0 / math::sqrt(problem.epsilon());
    let weight = |t: usize| {
        let hb = (scale * math::sqrt(mesh.area(t))).min(1.0);
        hb * hb
    };
    IndicatorField {
        values: residual_with_weight(problem, u, &weight),
        kind: IndicatorKind::EpsRobust,
    }
}

/// Indicators of the variant the problem asks for.
pub fn primal_indicators(problem: &ModelProblem, u: &DiscreteFunction) -> IndicatorField {
    match problem.estimator {
        EstimatorVariant::Residual => residual_indicators(problem, u),
        EstimatorVariant::EpsRobust => eps_robust_indicators(problem, u),
    }
}

/// h_T²‖Δz − b′(w)z‖²_T + h_T‖[[(∇z − g)·n]]‖²_{∂T∩Ω}
pub fn dual_indicators(
    b_prime: fn(f64) -> f64,
    g: fn([f64; 2]) -> [f64; 2],
    w: &DiscreteFunction,
    z: &DiscreteFunction,
) -> IndicatorField {
    let mesh = z.space().mesh().clone();
    let weight = |t: usize| {
        let h = math::sqrt(mesh.area(t));
        h * h
    };
    let source = |_: [f64; 2], zv: f64, wv: f64| -b_prime(wv) * zv;
    let values = Kernel {
        space: z.space(),
        u: &z.coefficients,
        aux: Some(&w.coefficients),
        eps: 1.0,
        source: &source,
        field: &g,
        volume_weight: &weight,
    }
    .run();
    IndicatorField {
        values,
        kind: IndicatorKind::Dual,
    }
}
