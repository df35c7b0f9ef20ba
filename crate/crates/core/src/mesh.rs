//! Conforming triangulations of planar domains and newest vertex bisection.
//!
//! Elements are stored as vertex triples `[v0, v1, v2]` in counter-clockwise
//! order, normalised so that the reference (refinement) edge is always the
//! local edge 0, i.e. `(v0, v1)`, and `v2` is the newest vertex. Local edge
//! `i` runs from `v[i]` to `v[(i + 1) % 3]`.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Sentinel for "no element" in adjacency tables.
pub const NONE: usize = usize::MAX;

/// Built-in initial triangulations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// (0,1)² split by both diagonals into four triangles around the centre.
    UnitSquare,
    /// (0,1)² split by the diagonal from (0,0) to (1,1).
    UnitSquareDiagonal,
    /// (0,1)² with edges along x₁+x₂ = 1/2 and x₁+x₂ = 3/2.
    GoalAligned,
}

impl Domain {
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "unit_square" => Ok(Domain::UnitSquare),
            "unit_square_diagonal" => Ok(Domain::UnitSquareDiagonal),
            "goal" | "goal_aligned" => Ok(Domain::GoalAligned),
            other => Err(Error::UnknownDomain(other.to_string())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Domain::UnitSquare => "unit_square",
            Domain::UnitSquareDiagonal => "unit_square_diagonal",
            Domain::GoalAligned => "goal",
        }
    }
}

/// Edge connectivity, rebuilt for every mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeTable {
    /// Sorted vertex pair of every edge.
    pub endpoints: Vec<[usize; 2]>,
    /// The (one or two) elements sharing the edge; second slot is [`NONE`] on the boundary.
    pub adjacent: Vec<[usize; 2]>,
    /// Global edge id of each local edge of each element.
    pub element_edges: Vec<[usize; 3]>,
}

impl EdgeTable {
    fn build(elements: &[[usize; 3]]) -> Self {
        let mut keys: Vec<(usize, usize, usize, usize)> = Vec::with_capacity(3 * elements.len());
        for (t, el) in elements.iter().enumerate() {
            for i in 0..3 {
                let (p, q) = (el[i], el[(i + 1) % 3]);
                keys.push((p.min(q), p.max(q), t, i));
            }
        }
        keys.sort_unstable();
        let mut endpoints = Vec::new();
        let mut adjacent: Vec<[usize; 2]> = Vec::new();
        let mut element_edges = vec![[NONE; 3]; elements.len()];
        let mut prev: Option<(usize, usize)> = None;
        for (p, q, t, i) in keys {
            if prev == Some((p, q)) {
                let e = endpoints.len() - 1;
                debug_assert_eq!(adjacent[e][1], NONE, "edge shared by more than two elements");
                adjacent[e][1] = t;
                element_edges[t][i] = e;
            } else {
                endpoints.push([p, q]);
                adjacent.push([t, NONE]);
                element_edges[t][i] = endpoints.len() - 1;
                prev = Some((p, q));
            }
        }
        EdgeTable {
            endpoints,
            adjacent,
            element_edges,
        }
    }

    pub fn len(&self) -> usize {
        self.endpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.endpoints.is_empty()
    }

    pub fn is_boundary(&self, e: usize) -> bool {
        self.adjacent[e][1] == NONE
    }
}

/// Per-element closed-form geometry.
#[derive(Debug, Clone)]
pub struct Geometry {
    pub area: Vec<f64>,
    /// Element diameter (longest edge), used as the local mesh size h_T.
    pub diameter: Vec<f64>,
    pub edge_length: Vec<[f64; 3]>,
    pub outward_normal: Vec<[[f64; 2]; 3]>,
    pub neighbors: Vec<[Option<usize>; 3]>,
}

/// A conforming triangulation with NVB bookkeeping.
#[derive(Debug, Clone)]
pub struct Triangulation {
    vertices: Vec<[f64; 2]>,
    elements: Vec<[usize; 3]>,
    generation: Vec<u32>,
    parent: Vec<usize>,
    edges: EdgeTable,
    /// Boundary segments of the initial mesh; every later boundary edge lies on one of them.
    outer_boundary: Vec<[[f64; 2]; 2]>,
}

fn signed_area(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    math::hypot(b[0] - a[0], b[1] - a[1])
}

fn midpoint(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
}

impl Triangulation {
    /// Builds an initial mesh. Elements are re-oriented counter-clockwise and
    /// the longest edge becomes the reference edge (ties: lowest global edge id).
    pub fn new(vertices: Vec<[f64; 2]>, mut elements: Vec<[usize; 3]>) -> Result<Self> {
        for (t, el) in elements.iter_mut().enumerate() {
            let a = signed_area(vertices[el[0]], vertices[el[1]], vertices[el[2]]);
            if a.abs() <= 1e-14 {
                return Err(Error::DegenerateElement(t, a));
            }
            if a < 0.0 {
                el.swap(1, 2);
            }
        }
        let edges = EdgeTable::build(&elements);
        for (t, el) in elements.iter_mut().enumerate() {
            let ee = edges.element_edges[t];
            let mut best = 0;
            let mut best_len = -1.0;
            let mut best_id = NONE;
            for i in 0..3 {
                let len = dist(vertices[el[i]], vertices[el[(i + 1) % 3]]);
                if len > best_len + 1e-12 || ((len - best_len).abs() <= 1e-12 && ee[i] < best_id) {
                    best = i;
                    best_len = len;
                    best_id = ee[i];
                }
            }
            el.rotate_left(best);
        }
        Self::assemble_initial(vertices, elements)
    }

    /// Builds a mesh from explicit reference-edge indices (local edge `r`
    /// runs from `v[r]` to `v[(r+1)%3]`). Used when reading mesh dumps.
    pub fn with_reference_edges(vertices: Vec<[f64; 2]>, elements: &[([usize; 3], usize)]) -> Result<Self> {
        let mut els = Vec::with_capacity(elements.len());
        for (t, &(mut el, r)) in elements.iter().enumerate() {
            if r > 2 {
                return Err(Error::OutOfRange {
                    name: "ref_edge",
                    value: r as f64,
                    range: "{0,1,2}",
                });
            }
            let a = signed_area(vertices[el[0]], vertices[el[1]], vertices[el[2]]);
            if a <= 1e-14 {
                return Err(Error::DegenerateElement(t, a));
            }
            el.rotate_left(r);
            els.push(el);
        }
        Self::assemble_initial(vertices, els)
    }

    fn assemble_initial(vertices: Vec<[f64; 2]>, elements: Vec<[usize; 3]>) -> Result<Self> {
        let edges = EdgeTable::build(&elements);
        let outer_boundary = (0..edges.len())
            .filter(|&e| edges.is_boundary(e))
            .map(|e| {
                let [p, q] = edges.endpoints[e];
                [vertices[p], vertices[q]]
            })
            .collect();
        let n = elements.len();
        Ok(Triangulation {
            vertices,
            elements,
            generation: vec![0; n],
            parent: Vec::new(),
            edges,
            outer_boundary,
        })
    }

    /// The built-in initial triangulation T₀ for a domain.
    pub fn initial(domain: Domain) -> Self {
        let (v, e): (Vec<[f64; 2]>, Vec<[usize; 3]>) = match domain {
            Domain::UnitSquare => (
                vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5]],
                vec![[0, 1, 4], [1, 2, 4], [2, 3, 4], [3, 0, 4]],
            ),
            Domain::UnitSquareDiagonal => (
                vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
                vec![[0, 1, 2], [0, 2, 3]],
            ),
            Domain::GoalAligned => (
                vec![
                    [0.0, 0.0],
                    [0.5, 0.0],
                    [1.0, 0.0],
                    [1.0, 0.5],
                    [1.0, 1.0],
                    [0.5, 1.0],
                    [0.0, 1.0],
                    [0.0, 0.5],
                    [0.5, 0.5],
                ],
                vec![
                    [0, 1, 7],
                    [8, 1, 2],
                    [8, 2, 3],
                    [8, 3, 5],
                    [4, 5, 3],
                    [8, 5, 6],
                    [8, 6, 7],
                    [8, 7, 1],
                ],
            ),
        };
        Self::new(v, e).expect("built-in meshes are valid")
    }

    pub fn from_domain_name(name: &str) -> Result<Self> {
        Ok(Self::initial(Domain::from_name(name)?))
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn elements(&self) -> &[[usize; 3]] {
        &self.elements
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn edges(&self) -> &EdgeTable {
        &self.edges
    }

    pub fn generation(&self, t: usize) -> u32 {
        self.generation[t]
    }

    /// Index of the element of the previous mesh containing element `t`
    /// (empty for an initial mesh).
    pub fn parents(&self) -> &[usize] {
        &self.parent
    }

    pub fn reference_edge(&self, t: usize) -> (usize, usize) {
        let el = self.elements[t];
        (el[0], el[1])
    }

    pub fn element_vertices(&self, t: usize) -> [[f64; 2]; 3] {
        let el = self.elements[t];
        [self.vertices[el[0]], self.vertices[el[1]], self.vertices[el[2]]]
    }

    pub fn area(&self, t: usize) -> f64 {
        let [a, b, c] = self.element_vertices(t);
        signed_area(a, b, c)
    }

    pub fn diameter(&self, t: usize) -> f64 {
        let [a, b, c] = self.element_vertices(t);
        dist(a, b).max(dist(b, c)).max(dist(c, a))
    }

    pub fn centroid(&self, t: usize) -> [f64; 2] {
        let [a, b, c] = self.element_vertices(t);
        [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0]
    }

    /// Outward unit normal of local edge `i` of element `t`.
    pub fn outward_normal(&self, t: usize, i: usize) -> [f64; 2] {
        let el = self.elements[t];
        let p = self.vertices[el[i]];
        let q = self.vertices[el[(i + 1) % 3]];
        let len = dist(p, q);
        [(q[1] - p[1]) / len, -(q[0] - p[0]) / len]
    }

    /// Neighbour across local edge `i` of element `t`.
    pub fn neighbor(&self, t: usize, i: usize) -> Option<usize> {
        let e = self.edges.element_edges[t][i];
        let [a, b] = self.edges.adjacent[e];
        let other = if a == t { b } else { a };
        (other != NONE).then_some(other)
    }

    pub fn geometry(&self) -> Result<Geometry> {
        let n = self.num_elements();
        let mut g = Geometry {
            area: Vec::with_capacity(n),
            diameter: Vec::with_capacity(n),
            edge_length: Vec::with_capacity(n),
            outward_normal: Vec::with_capacity(n),
            neighbors: Vec::with_capacity(n),
        };
        for t in 0..n {
            let area = self.area(t);
            if area <= 0.0 {
                return Err(Error::DegenerateElement(t, area));
            }
            let [a, b, c] = self.element_vertices(t);
            let lens = [dist(a, b), dist(b, c), dist(c, a)];
            g.area.push(area);
            g.diameter.push(lens[0].max(lens[1]).max(lens[2]));
            g.edge_length.push(lens);
            g.outward_normal
                .push([self.outward_normal(t, 0), self.outward_normal(t, 1), self.outward_normal(t, 2)]);
            g.neighbors
                .push([self.neighbor(t, 0), self.neighbor(t, 1), self.neighbor(t, 2)]);
        }
        Ok(g)
    }

    /// Smallest interior angle (radians) over all elements.
    pub fn min_angle(&self) -> f64 {
        let mut best = f64::INFINITY;
        for t in 0..self.num_elements() {
            let p = self.element_vertices(t);
            for i in 0..3 {
                let a = p[i];
                let b = p[(i + 1) % 3];
                let c = p[(i + 2) % 3];
                let u = [b[0] - a[0], b[1] - a[1]];
                let v = [c[0] - a[0], c[1] - a[1]];
                let cosang = (u[0] * v[0] + u[1] * v[1]) / (math::hypot(u[0], u[1]) * math::hypot(v[0], v[1]));
                best = best.min(libm::acos(cosang.clamp(-1.0, 1.0)));
            }
        }
        best
    }

    /// Every edge has at most two elements, and every boundary edge lies on
    /// the outer boundary of the initial mesh (no hanging nodes).
    pub fn is_conforming(&self) -> bool {
        if self.elements.iter().enumerate().any(|(t, _)| self.area(t) <= 0.0) {
            return false;
        }
        for e in 0..self.edges.len() {
            if !self.edges.is_boundary(e) {
                continue;
            }
            let [p, q] = self.edges.endpoints[e];
            let (p, q) = (self.vertices[p], self.vertices[q]);
            let on_outer = self.outer_boundary.iter().any(|&[a, b]| {
                signed_area(a, b, p).abs() <= 1e-13 && signed_area(a, b, q).abs() <= 1e-13 && {
                    let len2 = (b[0] - a[0]) * (b[0] - a[0]) + (b[1] - a[1]) * (b[1] - a[1]);
                    let s = |x: [f64; 2]| ((x[0] - a[0]) * (b[0] - a[0]) + (x[1] - a[1]) * (b[1] - a[1])) / len2;
                    (-1e-12..=1.0 + 1e-12).contains(&s(p)) && (-1e-12..=1.0 + 1e-12).contains(&s(q))
                }
            });
            if !on_outer {
                return false;
            }
        }
        true
    }

    /// Coarsest conforming NVB refinement in which every marked element is bisected.
    pub fn refine_nvb(&self, marked: &[usize]) -> Result<Triangulation> {
        self.refine_marked(marked, false)
    }

    /// Conforming NVB refinement in which all three edges of every marked
    /// element are bisected (four children per marked element).
    pub fn refine_bisec3(&self, marked: &[usize]) -> Result<Triangulation> {
        self.refine_marked(marked, true)
    }

    fn refine_marked(&self, marked: &[usize], all_edges: bool) -> Result<Triangulation> {
        let n = self.num_elements();
        if let Some(&bad) = marked.iter().find(|&&t| t >= n) {
            return Err(Error::ElementOutOfRange(bad, n));
        }
        let mut edge_mark = vec![false; self.edges.len()];
        let mut queue = Vec::new();
        let per_element = if all_edges { 3 } else { 1 };
        for &t in marked {
            for &e in &self.edges.element_edges[t][..per_element] {
                if !edge_mark[e] {
                    edge_mark[e] = true;
                    queue.extend(self.edges.adjacent[e].iter().copied().filter(|&s| s != NONE));
                }
            }
        }
        // Closure: an element with any bisected edge must bisect its reference edge.
        let cap = 10 * n + 16;
        let mut sweeps = 0;
        while let Some(t) = queue.pop() {
            sweeps += 1;
            if sweeps > cap {
                return Err(Error::ClosureDiverged(cap));
            }
            let ee = self.edges.element_edges[t];
            if !edge_mark[ee[0]] && (edge_mark[ee[1]] || edge_mark[ee[2]]) {
                edge_mark[ee[0]] = true;
                queue.extend(self.edges.adjacent[ee[0]].iter().copied().filter(|&s| s != NONE));
            }
        }
        Ok(self.bisect_marked_edges(&edge_mark))
    }

    /// Bisects every element twice (all edges halved, four children each).
    pub fn uniform_refine(&self) -> Triangulation {
        self.bisect_marked_edges(&vec![true; self.edges.len()])
    }

    /// Marks every element for NVB (one bisection each plus closure).
    pub fn refine_all(&self) -> Result<Triangulation> {
        let all: Vec<usize> = (0..self.num_elements()).collect();
        self.refine_nvb(&all)
    }

    fn bisect_marked_edges(&self, edge_mark: &[bool]) -> Triangulation {
        let mut vertices = self.vertices.clone();
        let mut mid = vec![NONE; self.edges.len()];
        for (e, &m) in edge_mark.iter().enumerate() {
            if m {
                let [p, q] = self.edges.endpoints[e];
                mid[e] = vertices.len();
                vertices.push(midpoint(self.vertices[p], self.vertices[q]));
            }
        }
        let mut elements = Vec::with_capacity(self.elements.len() * 2);
        let mut generation = Vec::with_capacity(self.elements.len() * 2);
        let mut parent = Vec::with_capacity(self.elements.len() * 2);
        for (t, &[a, b, c]) in self.elements.iter().enumerate() {
            let ee = self.edges.element_edges[t];
            let g = self.generation[t];
            let m = mid[ee[0]];
            if m == NONE {
                elements.push([a, b, c]);
                generation.push(g);
                parent.push(t);
                continue;
            }
            // Children inherit the old edges (c,a) and (b,c) as reference edges.
            for (child, e) in [([c, a, m], ee[2]), ([b, c, m], ee[1])] {
                let m2 = mid[e];
                if m2 == NONE {
                    elements.push(child);
                    generation.push(g + 1);
                    parent.push(t);
                } else {
                    let [p, q, r] = child;
                    elements.push([r, p, m2]);
                    elements.push([q, r, m2]);
                    generation.extend([g + 2, g + 2]);
                    parent.extend([t, t]);
                }
            }
        }
        let edges = EdgeTable::build(&elements);
        Triangulation {
            vertices,
            elements,
            generation,
            parent,
            edges,
            outer_boundary: self.outer_boundary.clone(),
        }
    }

    /// Total area Σ|T|.
    pub fn total_area(&self) -> f64 {
        (0..self.num_elements()).map(|t| self.area(t)).sum()
    }

    /// Barycentric coordinates of `x` with respect to element `t`.
    pub fn barycentric(&self, t: usize, x: [f64; 2]) -> [f64; 3] {
        let [a, b, c] = self.element_vertices(t);
        let area = signed_area(a, b, c);
        [
            signed_area(x, b, c) / area,
            signed_area(a, x, c) / area,
            signed_area(a, b, x) / area,
        ]
    }

    /// Some element containing `x` (brute force).
    pub fn locate(&self, x: [f64; 2]) -> Result<usize> {
        (0..self.num_elements())
            .find(|&t| self.barycentric(t, x).iter().all(|&l| l >= -1e-12))
            .ok_or(Error::PointOutsideMesh(x[0], x[1]))
    }
}
