//! Conforming 2D triangulations with tagged boundary edges.

use std::collections::HashMap;
use std::fmt::Write as _;

pub type Point = [f64; 2];

/// An edge that belongs to exactly one triangle.
///
/// `nodes` follow the counter-clockwise orientation of the owning triangle, so
/// the domain lies to the left of `nodes[0] → nodes[1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub nodes: [usize; 2],
    pub triangle: usize,
    pub tag: u32,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MeshError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{what} references node {index} but the mesh has {node_count} nodes")]
    IndexOutOfRange { what: String, index: usize, node_count: usize },
    #[error("triangle {triangle} is not counter-clockwise (signed area {area:e})")]
    Orientation { triangle: usize, area: f64 },
    #[error("mesh is not conforming: {0}")]
    NonConforming(String),
    #[error("node {0} does not belong to any triangle")]
    UnreferencedNode(usize),
    #[error("declared boundary edge ({0}, {1}) is not a boundary edge of the triangulation")]
    NotABoundaryEdge(usize, usize),
    #[error("boundary edge ({0}, {1}) has no declared tag")]
    UntaggedBoundaryEdge(usize, usize),
    #[error("mesh has no triangles")]
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    nodes: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    region_tags: Vec<u32>,
    boundary_edges: Vec<BoundaryEdge>,
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

pub fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

fn distance(a: Point, b: Point) -> f64 {
    (b[0] - a[0]).hypot(b[1] - a[1])
}

impl TriMesh {
    /// Validates the triangulation and derives its boundary edges.
    ///
    /// `declared` carries boundary tags by node pair (either order). When empty
    /// every boundary edge gets tag 1; otherwise it must name exactly the
    /// boundary edges of the triangulation.
    pub fn new(
        nodes: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        region_tags: Vec<u32>,
        declared: &[([usize; 2], u32)],
    ) -> Result<Self, MeshError> {
        assert_eq!(triangles.len(), region_tags.len(), "one region tag per triangle");
        if triangles.is_empty() {
            return Err(MeshError::Empty);
        }
        let n = nodes.len();
        let mut used = vec![false; n];
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                if v >= n {
                    return Err(MeshError::IndexOutOfRange {
                        what: format!("triangle {t}"),
                        index: v,
                        node_count: n,
                    });
                }
                used[v] = true;
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(MeshError::NonConforming(format!("triangle {t} repeats a node")));
            }
            let area = signed_area(nodes[tri[0]], nodes[tri[1]], nodes[tri[2]]);
            if !(area > 0.0) {
                return Err(MeshError::Orientation { triangle: t, area });
            }
        }
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(MeshError::UnreferencedNode(v));
        }
        for (e, &([a, b], _)) in declared.iter().enumerate() {
            for v in [a, b] {
                if v >= n {
                    return Err(MeshError::IndexOutOfRange {
                        what: format!("boundary edge {e}"),
                        index: v,
                        node_count: n,
                    });
                }
            }
        }

        // Edge census: (directed edge, owning triangle) per undirected edge.
        let mut census: HashMap<(usize, usize), Vec<([usize; 2], usize)>> = HashMap::new();
        let mut order: Vec<(usize, usize)> = Vec::new();
        for (t, tri) in triangles.iter().enumerate() {
            for l in 0..3 {
                let a = tri[l];
                let b = tri[(l + 1) % 3];
                let entry = census.entry(edge_key(a, b)).or_default();
                if entry.is_empty() {
                    order.push(edge_key(a, b));
                }
                entry.push(([a, b], t));
            }
        }
        let mut boundary = Vec::new();
        for key in &order {
            let owners = &census[key];
            match owners.len() {
                1 => boundary.push((owners[0].0, owners[0].1)),
                2 => {
                    if owners[0].0 == owners[1].0 {
                        return Err(MeshError::NonConforming(format!(
                            "triangles {} and {} overlap along edge ({}, {})",
                            owners[0].1, owners[1].1, key.0, key.1
                        )));
                    }
                }
                m => {
                    return Err(MeshError::NonConforming(format!(
                        "edge ({}, {}) is shared by {m} triangles",
                        key.0, key.1
                    )))
                }
            }
        }

        // A hanging node shows up as a node in the interior of a boundary edge.
        let mut boundary_nodes: Vec<usize> = boundary.iter().flat_map(|(e, _)| *e).collect();
        boundary_nodes.sort_unstable();
        boundary_nodes.dedup();
        for &([a, b], _) in &boundary {
            let (pa, pb) = (nodes[a], nodes[b]);
            let len = distance(pa, pb);
            for &v in &boundary_nodes {
                if v == a || v == b {
                    continue;
                }
                let p = nodes[v];
                let cross = signed_area(pa, pb, p).abs() * 2.0;
                let along = (p[0] - pa[0]) * (pb[0] - pa[0]) + (p[1] - pa[1]) * (pb[1] - pa[1]);
                if cross <= 1e-12 * len * len && along > 0.0 && along < len * len {
                    return Err(MeshError::NonConforming(format!(
                        "node {v} lies inside edge ({a}, {b})"
                    )));
                }
            }
        }

        let mut tags: HashMap<(usize, usize), u32> = HashMap::new();
        for &([a, b], tag) in declared {
            if !census.get(&edge_key(a, b)).is_some_and(|o| o.len() == 1) {
                return Err(MeshError::NotABoundaryEdge(a, b));
            }
            tags.insert(edge_key(a, b), tag);
        }
        let mut boundary_edges = Vec::with_capacity(boundary.len());
        for ([a, b], t) in boundary {
            let tag = if declared.is_empty() {
                1
            } else {
                *tags.get(&edge_key(a, b)).ok_or(MeshError::UntaggedBoundaryEdge(a, b))?
            };
            boundary_edges.push(BoundaryEdge { nodes: [a, b], triangle: t, tag });
        }
        Ok(TriMesh { nodes, triangles, region_tags, boundary_edges })
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn region_tags(&self) -> &[u32] {
        &self.region_tags
    }

    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary_edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle_vertices(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.nodes[a], self.nodes[b], self.nodes[c]]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_vertices(t);
        signed_area(a, b, c)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangle_count()).map(|t| self.triangle_area(t)).sum()
    }

    pub fn edge_length(&self, e: &BoundaryEdge) -> f64 {
        distance(self.nodes[e.nodes[0]], self.nodes[e.nodes[1]])
    }

    pub fn boundary_length(&self) -> f64 {
        self.boundary_edges.iter().map(|e| self.edge_length(e)).sum()
    }

    /// Sorted indices of nodes on the boundary.
    pub fn boundary_nodes(&self) -> Vec<usize> {
        let mut on = vec![false; self.node_count()];
        for e in &self.boundary_edges {
            on[e.nodes[0]] = true;
            on[e.nodes[1]] = true;
        }
        (0..self.node_count()).filter(|&i| on[i]).collect()
    }

    pub fn interior_node_count(&self) -> usize {
        self.node_count() - self.boundary_nodes().len()
    }

    /// Longest edge of the triangulation.
    pub fn max_edge_length(&self) -> f64 {
        let mut h = 0.0_f64;
        for t in 0..self.triangle_count() {
            let v = self.triangle_vertices(t);
            for l in 0..3 {
                h = h.max(distance(v[l], v[(l + 1) % 3]));
            }
        }
        h
    }

    /// Text serialization in the `trimesh 1` format.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str("trimesh 1\n");
        let _ = writeln!(
            s,
            "{} {} {}",
            self.node_count(),
            self.triangle_count(),
            self.boundary_edges.len()
        );
        for p in &self.nodes {
            let _ = writeln!(s, "{} {}", p[0], p[1]);
        }
        for (tri, tag) in self.triangles.iter().zip(&self.region_tags) {
            let _ = writeln!(s, "{} {} {} {}", tri[0], tri[1], tri[2], tag);
        }
        for e in &self.boundary_edges {
            let _ = writeln!(s, "{} {} {}", e.nodes[0], e.nodes[1], e.tag);
        }
        s
    }
}

/// Structured mesh of the unit square, each cell split along its (0,0)-(1,1)
/// diagonal. Sides are tagged 1 (bottom), 2 (right), 3 (top), 4 (left).
pub fn unit_square_mesh(nx: usize, ny: usize) -> TriMesh {
    assert!(nx >= 1 && ny >= 1, "unit_square_mesh needs nx, ny >= 1");
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            nodes.push([i as f64 / nx as f64, j as f64 / ny as f64]);
        }
    }
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    let mut declared = Vec::with_capacity(2 * (nx + ny));
    for i in 0..nx {
        declared.push(([id(i, 0), id(i + 1, 0)], 1));
        declared.push(([id(i, ny), id(i + 1, ny)], 3));
    }
    for j in 0..ny {
        declared.push(([id(nx, j), id(nx, j + 1)], 2));
        declared.push(([id(0, j), id(0, j + 1)], 4));
    }
    let tags = vec![0; triangles.len()];
    TriMesh::new(nodes, triangles, tags, &declared).expect("structured square mesh is valid")
}

pub const MAX_DISK_LEVEL: u32 = 8;

/// Polygonal unit disk: a six-triangle fan refined `level` times, with boundary
/// nodes projected back onto the unit circle after each refinement.
pub fn unit_disk_mesh(level: u32) -> TriMesh {
    assert!(level <= MAX_DISK_LEVEL, "unit_disk_mesh level must be <= {MAX_DISK_LEVEL}");
    let mut nodes = vec![[0.0, 0.0]];
    for k in 0..6 {
        let angle = std::f64::consts::PI * k as f64 / 3.0;
        nodes.push([angle.cos(), angle.sin()]);
    }
    let triangles: Vec<[usize; 3]> = (0..6).map(|k| [0, 1 + k, 1 + (k + 1) % 6]).collect();
    let mut mesh = TriMesh::new(nodes, triangles, vec![0; 6], &[]).expect("fan is valid");
    project_boundary_to_circle(&mut mesh);
    for _ in 0..level {
        mesh = refine_uniform(&mesh);
        project_boundary_to_circle(&mut mesh);
    }
    mesh
}

fn project_boundary_to_circle(mesh: &mut TriMesh) {
    for v in mesh.boundary_nodes() {
        let p = mesh.nodes[v];
        let r = p[0].hypot(p[1]);
        mesh.nodes[v] = [p[0] / r, p[1] / r];
    }
}

/// Splits every triangle into four through its edge midpoints.
pub fn refine_uniform(mesh: &TriMesh) -> TriMesh {
    let mut nodes = mesh.nodes.clone();
    let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
    let mut mid = |a: usize, b: usize, nodes: &mut Vec<Point>| -> usize {
        *midpoint.entry(edge_key(a, b)).or_insert_with(|| {
            let (pa, pb) = (nodes[a], nodes[b]);
            nodes.push([0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]);
            nodes.len() - 1
        })
    };
    let mut triangles = Vec::with_capacity(4 * mesh.triangle_count());
    let mut region_tags = Vec::with_capacity(4 * mesh.triangle_count());
    for (&[a, b, c], &tag) in mesh.triangles.iter().zip(&mesh.region_tags) {
        let ab = mid(a, b, &mut nodes);
        let bc = mid(b, c, &mut nodes);
        let ca = mid(c, a, &mut nodes);
        triangles.extend_from_slice(&[[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
        region_tags.extend_from_slice(&[tag; 4]);
    }
    let mut declared = Vec::with_capacity(2 * mesh.boundary_edges.len());
    for e in &mesh.boundary_edges {
        let [a, b] = e.nodes;
        let m = mid(a, b, &mut nodes);
        declared.push(([a, m], e.tag));
        declared.push(([m, b], e.tag));
    }
    TriMesh::new(nodes, triangles, region_tags, &declared)
        .expect("uniform refinement of a conforming mesh is conforming")
}

/// Parses the `trimesh 1` text format.
pub fn load_mesh(text: &str) -> Result<TriMesh, MeshError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let mut next = |expect: &str| -> Result<(usize, Vec<&str>), MeshError> {
        match lines.next() {
            Some((no, l)) => Ok((no, l.split_whitespace().collect())),
            None => Err(MeshError::Parse {
                line: text.lines().count() + 1,
                message: format!("unexpected end of file, expected {expect}"),
            }),
        }
    };
    let (no, magic) = next("header")?;
    if magic != ["trimesh", "1"] {
        return Err(MeshError::Parse { line: no, message: "expected header `trimesh 1`".into() });
    }
    let (no, counts) = next("counts")?;
    let counts: Vec<usize> = parse_fields(no, &counts, 3)?;
    let (node_count, tri_count, edge_count) = (counts[0], counts[1], counts[2]);

    let mut nodes = Vec::with_capacity(node_count);
    for _ in 0..node_count {
        let (no, f) = next("node coordinates")?;
        let xy: Vec<f64> = parse_fields(no, &f, 2)?;
        if !xy.iter().all(|v| v.is_finite()) {
            return Err(MeshError::Parse { line: no, message: "non-finite coordinate".into() });
        }
        nodes.push([xy[0], xy[1]]);
    }
    let mut triangles = Vec::with_capacity(tri_count);
    let mut region_tags = Vec::with_capacity(tri_count);
    for _ in 0..tri_count {
        let (no, f) = next("triangle")?;
        let v: Vec<usize> = parse_fields(no, &f, 4)?;
        triangles.push([v[0], v[1], v[2]]);
        region_tags.push(to_tag(no, v[3])?);
    }
    let mut declared = Vec::with_capacity(edge_count);
    for _ in 0..edge_count {
        let (no, f) = next("boundary edge")?;
        let v: Vec<usize> = parse_fields(no, &f, 3)?;
        declared.push(([v[0], v[1]], to_tag(no, v[2])?));
    }
    if let Ok((no, _)) = next("") {
        return Err(MeshError::Parse { line: no, message: "trailing content after mesh".into() });
    }
    TriMesh::new(nodes, triangles, region_tags, &declared)
}

fn to_tag(line: usize, v: usize) -> Result<u32, MeshError> {
    u32::try_from(v).map_err(|_| MeshError::Parse { line, message: format!("tag {v} too large") })
}

fn parse_fields<T: std::str::FromStr>(
    line: usize,
    fields: &[&str],
    count: usize,
) -> Result<Vec<T>, MeshError> {
    if fields.len() != count {
        return Err(MeshError::Parse {
            line,
            message: format!("expected {count} fields, found {}", fields.len()),
        });
    }
    fields
        .iter()
        .map(|f| {
            f.parse::<T>()
                .map_err(|_| MeshError::Parse { line, message: format!("cannot parse `{f}`") })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn smallest_square() {
        let m = unit_square_mesh(1, 1);
        assert_eq!(m.node_count(), 4);
        assert_eq!(m.triangle_count(), 2);
        assert_eq!(m.boundary_edges().len(), 4);
        let tags: HashSet<u32> = m.boundary_edges().iter().map(|e| e.tag).collect();
        assert_eq!(tags, HashSet::from([1, 2, 3, 4]));
    }

    #[test]
    fn square_counts_and_area() {
        let m = unit_square_mesh(2, 3);
        assert_eq!(m.node_count(), 12);
        assert_eq!(m.triangle_count(), 12);
        for (nx, ny) in [(1, 1), (3, 7), (10, 10)] {
            assert!((unit_square_mesh(nx, ny).total_area() - 1.0).abs() <= 1e-14);
        }
    }

    #[test]
    fn square_boundary_orientation_keeps_domain_left() {
        let m = unit_square_mesh(3, 2);
        for e in m.boundary_edges() {
            let [a, b] = e.nodes;
            let tri = m.triangles()[e.triangle];
            let third = tri.iter().copied().find(|&v| v != a && v != b).unwrap();
            assert!(signed_area(m.nodes()[a], m.nodes()[b], m.nodes()[third]) > 0.0);
        }
    }

    #[test]
    fn interior_edges_shared_by_two() {
        let m = unit_square_mesh(4, 3);
        let mut count: HashMap<(usize, usize), usize> = HashMap::new();
        for tri in m.triangles() {
            for l in 0..3 {
                *count.entry(edge_key(tri[l], tri[(l + 1) % 3])).or_default() += 1;
            }
        }
        let boundary: HashSet<(usize, usize)> =
            m.boundary_edges().iter().map(|e| edge_key(e.nodes[0], e.nodes[1])).collect();
        for (k, c) in count {
            assert_eq!(c, if boundary.contains(&k) { 1 } else { 2 });
        }
    }

    #[test]
    fn refine_two_triangle_square() {
        let m = refine_uniform(&unit_square_mesh(1, 1));
        assert_eq!(m.triangle_count(), 8);
        assert_eq!(m.node_count(), 9);
        assert_eq!(m.boundary_edges().len(), 8);
        assert!((m.total_area() - 1.0).abs() <= 1e-14);
    }

    #[test]
    fn disk_level_zero_on_circle() {
        let m = unit_disk_mesh(0);
        for v in m.boundary_nodes() {
            let p = m.nodes()[v];
            assert!((p[0].hypot(p[1]) - 1.0).abs() <= 1e-14);
        }
        assert!(m.boundary_edges().iter().all(|e| e.tag == 1));
    }

    #[test]
    fn disk_area_matches_inscribed_polygon() {
        let mut prev = 0.0;
        for level in 0..5 {
            let m = unit_disk_mesh(level);
            let sides = 6.0 * 2f64.powi(level as i32);
            let polygon = 0.5 * sides * (2.0 * std::f64::consts::PI / sides).sin();
            assert!((m.total_area() - polygon).abs() < 1e-12, "level {level}");
            assert!(m.total_area() > prev && m.total_area() < std::f64::consts::PI);
            assert!(m.boundary_edges().iter().all(|e| e.tag == 1));
            prev = m.total_area();
        }
    }

    #[test]
    fn text_roundtrip() {
        let m = unit_disk_mesh(2);
        let back = load_mesh(&m.to_text()).unwrap();
        assert_eq!(back, m);
        let small = load_mesh(&unit_square_mesh(1, 1).to_text()).unwrap();
        assert_eq!(small.triangle_count(), 2);
    }

    #[test]
    fn clockwise_triangle_rejected() {
        let text = "trimesh 1\n4 2 0\n0 0\n1 0\n1 1\n0 1\n0 1 2 0\n0 3 2 0\n";
        match load_mesh(text) {
            Err(MeshError::Orientation { triangle, .. }) => assert_eq!(triangle, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn node_out_of_range_rejected() {
        let text = "trimesh 1\n4 2 0\n0 0\n1 0\n1 1\n0 1\n0 1 2 0\n0 2 99 0\n";
        match load_mesh(text) {
            Err(MeshError::IndexOutOfRange { index, node_count, .. }) => {
                assert_eq!((index, node_count), (99, 4));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_error_reports_line() {
        let text = "trimesh 1\n# comment\n4 2 0\n0 0\n1 zero\n";
        match load_mesh(text) {
            Err(MeshError::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn declared_tags_are_cross_checked() {
        let text = "trimesh 1\n4 2 1\n0 0\n1 0\n1 1\n0 1\n0 1 2 0\n0 2 3 0\n0 2 5\n";
        assert_eq!(load_mesh(text), Err(MeshError::NotABoundaryEdge(0, 2)));
        let partial = "trimesh 1\n4 2 1\n0 0\n1 0\n1 1\n0 1\n0 1 2 0\n0 2 3 0\n1 0 5\n";
        assert!(matches!(load_mesh(partial), Err(MeshError::UntaggedBoundaryEdge(..))));
    }

    #[test]
    fn hanging_node_rejected() {
        // Left triangle's vertical edge (1,0)-(1,2) is split by node 4 on the right.
        let nodes = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 2.0], [2.0, 0.0], [1.0, 1.0], [2.0, 2.0]];
        let tris = vec![[0, 1, 2], [1, 3, 4], [4, 3, 5], [4, 5, 2]];
        let err = TriMesh::new(nodes, tris, vec![0; 4], &[]).unwrap_err();
        assert!(matches!(err, MeshError::NonConforming(_)), "{err:?}");
    }
}
