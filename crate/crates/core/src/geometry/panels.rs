use nalgebra::Vector3;

use super::mesh::SurfaceMesh;

/// One flat triangular panel carrying a constant density.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub vertices: [Vector3<f64>; 3],
    pub area: f64,
    pub centroid: Vector3<f64>,
}

impl Panel {
    pub fn new(vertices: [Vector3<f64>; 3]) -> Self {
        let [a, b, c] = vertices;
        Self {
            vertices,
            area: 0.5 * (b - a).cross(&(c - a)).norm(),
            centroid: (a + b + c) / 3.0,
        }
    }
}

/// Per-panel geometry of a surface together with its total area |S|.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelSystem {
    panels: Vec<Panel>,
    total_area: f64,
}

impl PanelSystem {
    /// Builds panels from raw triangles without mesh validation.
    pub fn from_triangles(triangles: impl IntoIterator<Item = [Vector3<f64>; 3]>) -> Self {
        let panels: Vec<Panel> = triangles.into_iter().map(Panel::new).collect();
        // fixed summation order keeps |S| reproducible
        let mut total_area = 0.0;
        for p in &panels {
            total_area += p.area;
        }
        Self { panels, total_area }
    }

    pub fn panels(&self) -> &[Panel] {
        &self.panels
    }

    pub fn len(&self) -> usize {
        self.panels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.panels.is_empty()
    }

    pub fn total_area(&self) -> f64 {
        self.total_area
    }

    pub fn areas(&self) -> Vec<f64> {
        self.panels.iter().map(|p| p.area).collect()
    }

    pub fn centroids(&self) -> Vec<Vector3<f64>> {
        self.panels.iter().map(|p| p.centroid).collect()
    }
}

/// Splits a mesh into panels: area from half the cross-product magnitude,
/// centroid as the vertex average.
pub fn build_panels(mesh: &SurfaceMesh) -> PanelSystem {
    PanelSystem::from_triangles((0..mesh.num_triangles()).map(|i| mesh.triangle(i)))
}
