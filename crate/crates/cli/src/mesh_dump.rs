//! JSON dump of a triangulation. Each element lists its vertices with the
//! reference edge between the first two.

use ailfem_core::mesh::Triangulation;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshDump {
    pub vertices: Vec<[f64; 2]>,
    pub elements: Vec<[usize; 3]>,
    pub boundary_edges: Vec<[usize; 2]>,
}

impl MeshDump {
    pub fn from_mesh(mesh: &Triangulation) -> Self {
        let edges = mesh.edges();
        MeshDump {
            vertices: mesh.vertices().to_vec(),
            elements: mesh.elements().to_vec(),
            boundary_edges: (0..edges.len())
                .filter(|&e| edges.is_boundary(e))
                .map(|e| edges.endpoints[e])
                .collect(),
        }
    }

    pub fn to_mesh(&self) -> ailfem_core::Result<Triangulation> {
        let els: Vec<([usize; 3], usize)> = self.elements.iter().map(|&e| (e, 0)).collect();
        Triangulation::with_reference_edges(self.vertices.clone(), &els)
    }
}
