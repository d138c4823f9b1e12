//! Quadrature rules on triangles and boundary edges.

use crate::mesh::{Point, TriMesh};

/// A quadrature point with its weight and the values of the linear basis
/// functions of the owning element at that point.
#[derive(Debug, Clone, Copy)]
pub struct QuadPoint<const N: usize> {
    pub x: Point,
    pub weight: f64,
    pub basis: [f64; N],
}

/// Edge-midpoint rule, exact for polynomials of degree 2.
pub fn triangle_rule(v: [Point; 3], area: f64) -> [QuadPoint<3>; 3] {
    let mid = |a: usize, b: usize| [0.5 * (v[a][0] + v[b][0]), 0.5 * (v[a][1] + v[b][1])];
    let w = area / 3.0;
    [
        QuadPoint { x: mid(0, 1), weight: w, basis: [0.5, 0.5, 0.0] },
        QuadPoint { x: mid(1, 2), weight: w, basis: [0.0, 0.5, 0.5] },
        QuadPoint { x: mid(2, 0), weight: w, basis: [0.5, 0.0, 0.5] },
    ]
}

/// Two-point Gauss rule on a segment, exact for polynomials of degree 3.
pub fn edge_rule(a: Point, b: Point) -> [QuadPoint<2>; 2] {
    let len = (b[0] - a[0]).hypot(b[1] - a[1]);
    let g = 0.5 / 3f64.sqrt();
    let at = |t: f64| QuadPoint {
        x: [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])],
        weight: 0.5 * len,
        basis: [1.0 - t, t],
    };
    [at(0.5 - g), at(0.5 + g)]
}

/// Every interior quadrature point of the mesh with its region tag and weight.
pub fn interior_points(mesh: &TriMesh) -> Vec<(Point, u32, f64)> {
    let mut out = Vec::with_capacity(3 * mesh.triangle_count());
    for t in 0..mesh.triangle_count() {
        let tag = mesh.region_tags()[t];
        for q in triangle_rule(mesh.triangle_vertices(t), mesh.triangle_area(t)) {
            out.push((q.x, tag, q.weight));
        }
    }
    out
}

/// Every boundary quadrature point of the mesh with its boundary tag and weight.
pub fn boundary_points(mesh: &TriMesh) -> Vec<(Point, u32, f64)> {
    let nodes = mesh.nodes();
    let mut out = Vec::with_capacity(2 * mesh.boundary_edges().len());
    for e in mesh.boundary_edges() {
        for q in edge_rule(nodes[e.nodes[0]], nodes[e.nodes[1]]) {
            out.push((q.x, e.tag, q.weight));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_rule_integrates_quadratics() {
        let v = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let q = triangle_rule(v, 0.5);
        let integral: f64 = q.iter().map(|p| p.weight * p.x[0] * p.x[1]).sum();
        assert!((integral - 1.0 / 24.0).abs() < 1e-15);
        let integral: f64 = q.iter().map(|p| p.weight * p.x[0] * p.x[0]).sum();
        assert!((integral - 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn edge_rule_integrates_cubics() {
        let q = edge_rule([0.0, 0.0], [2.0, 0.0]);
        let integral: f64 = q.iter().map(|p| p.weight * p.x[0].powi(3)).sum();
        assert!((integral - 4.0).abs() < 1e-14);
    }
}
