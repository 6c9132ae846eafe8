//! Oriented triangular cellular complexes on polygonal domains.
//!
//! A [`Mesh`] stores vertices, CCW triangles, and oriented edges. Every edge
//! carries the co-boundary pair (K, L): the unit normal points from K towards
//! L and the pair (n, S→N) is direct, so K is the triangle in which the edge
//! appears as S→N in counter-clockwise order. Boundary edges have no L and an
//! outward normal.

use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::io::{BufRead, Write};

/// 2D point / vector.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub fn new(x: f64, y: f64) -> Vec2 {
        Vec2 { x, y }
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the cross product self × o.
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }
}

impl std::ops::Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl std::ops::Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

#[derive(Debug, Clone)]
pub struct Vertex {
    pub id: usize,
    pub position: Vec2,
}

#[derive(Debug, Clone)]
pub struct Triangle {
    pub id: usize,
    /// Counter-clockwise vertex ids.
    pub vertex_ids: [usize; 3],
    pub area: f64,
    pub centroid: Vec2,
    /// Diameter h_K (longest side).
    pub diameter: f64,
    /// Inscribed-circle diameter ρ_K = 4·area/perimeter. The stored quantity
    /// is the diameter (not the radius) so that θ = max h_K/ρ_K.
    pub inradius_diameter: f64,
}

#[derive(Debug, Clone)]
pub struct Edge {
    pub id: usize,
    /// Tail vertex S.
    pub tail: usize,
    /// Head vertex N.
    pub head: usize,
    /// Left triangle K; the edge runs S→N in K's CCW order.
    pub left_cell: usize,
    /// Right triangle L; absent for boundary edges.
    pub right_cell: Option<usize>,
    /// Unit normal pointing from K to L (outward on the boundary).
    pub unit_normal: Vec2,
    pub length: f64,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.right_cell.is_none()
    }
}

/// Provenance of a generated mesh, kept for reproducibility.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenMetadata {
    pub n: usize,
    pub perturbation: f64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct Mesh {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub triangles: Vec<Triangle>,
    /// triangle id → its 3 edges with outward-sign flags (+1 when the
    /// triangle is K of the edge, −1 when it is L).
    pub triangle_edges: Vec<[(usize, f64); 3]>,
    /// vertex id → incident edge ids.
    pub vertex_edges: Vec<Vec<usize>>,
    pub metadata: Option<GenMetadata>,
}

/// The six-triangle support of an interior edge's stencil, with the eight
/// labeled vertices: K = (S,N,W), L = (N,S,E); M lies across edge EN from L,
/// P across WN from K, Q across WS from K, R across SE from L; A, B, C, D are
/// the apexes of M, P, Q, R opposite the shared edges; O is the midpoint of SN.
#[derive(Debug, Clone, Copy)]
pub struct Vicinity {
    pub edge: usize,
    pub k: usize,
    pub l: usize,
    pub m: usize,
    pub p: usize,
    pub q: usize,
    pub r: usize,
    pub s: usize,
    pub n: usize,
    pub w: usize,
    pub e: usize,
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
    pub midpoint: Vec2,
}

fn triangle_geometry(p: [Vec2; 3]) -> (f64, Vec2, f64, f64) {
    let signed_area = 0.5 * (p[1] - p[0]).cross(p[2] - p[0]);
    let centroid = (p[0] + p[1] + p[2]) * (1.0 / 3.0);
    let sides = [(p[1] - p[0]).norm(), (p[2] - p[1]).norm(), (p[0] - p[2]).norm()];
    let perimeter = sides[0] + sides[1] + sides[2];
    let diameter = sides.iter().cloned().fold(0.0f64, f64::max);
    let inradius_diameter = 4.0 * signed_area.abs() / perimeter;
    (signed_area, centroid, diameter, inradius_diameter)
}

impl Mesh {
    /// Builds a mesh from vertex positions and CCW vertex triples, deriving
    /// edges, orientation, and incidence deterministically: edges are sorted
    /// by their (min, max) vertex-id pair, and K is the lower-id co-boundary
    /// triangle.
    pub fn from_cells(
        positions: Vec<Vec2>,
        cells: Vec<[usize; 3]>,
        metadata: Option<GenMetadata>,
    ) -> Result<Mesh> {
        let n_vertices = positions.len();
        for (t, cell) in cells.iter().enumerate() {
            for &v in cell {
                if v >= n_vertices {
                    return Err(Error::MeshQuality(format!(
                        "triangle {t} references vertex {v} out of range 0..{n_vertices}"
                    )));
                }
            }
        }
        for p in &positions {
            if !p.x.is_finite() || !p.y.is_finite() {
                return Err(Error::MeshQuality("non-finite vertex position".into()));
            }
        }

        let vertices: Vec<Vertex> = positions
            .iter()
            .enumerate()
            .map(|(id, &position)| Vertex { id, position })
            .collect();

        let mut triangles = Vec::with_capacity(cells.len());
        for (id, cell) in cells.iter().enumerate() {
            let p = [positions[cell[0]], positions[cell[1]], positions[cell[2]]];
            let (signed_area, centroid, diameter, inradius_diameter) = triangle_geometry(p);
            if signed_area <= 0.0 {
                return Err(Error::MeshQuality(format!(
                    "triangle {id} has non-positive signed area {signed_area:.3e} (must be CCW)"
                )));
            }
            triangles.push(Triangle {
                id,
                vertex_ids: *cell,
                area: signed_area,
                centroid,
                diameter,
                inradius_diameter,
            });
        }

        // Collect the co-boundary of each undirected vertex pair. The triangle
        // that traverses the pair as (S, N) in CCW order is K.
        let mut by_pair: HashMap<(usize, usize), Vec<(usize, bool)>> = HashMap::new();
        for tri in &triangles {
            let v = tri.vertex_ids;
            for (a, b) in [(v[0], v[1]), (v[1], v[2]), (v[2], v[0])] {
                let key = (a.min(b), a.max(b));
                // forward == true: the triangle walks the pair from key.0 to key.1.
                by_pair.entry(key).or_default().push((tri.id, a == key.0));
            }
        }

        let mut keys: Vec<(usize, usize)> = by_pair.keys().copied().collect();
        keys.sort();

        let mut edges = Vec::with_capacity(keys.len());
        for (id, key) in keys.iter().enumerate() {
            let cob = &by_pair[key];
            if cob.len() > 2 {
                return Err(Error::MeshQuality(format!(
                    "edge ({}, {}) has {} incident triangles",
                    key.0,
                    key.1,
                    cob.len()
                )));
            }
            let mut cob = cob.clone();
            cob.sort();
            // K = lower-id co-boundary triangle; S→N is K's traversal direction.
            let (k, forward) = cob[0];
            let l = cob.get(1).map(|&(t, f)| {
                debug_assert!(f != forward, "both triangles traverse the edge the same way");
                t
            });
            let (tail, head) = if forward { *key } else { (key.1, key.0) };
            let s = positions[tail];
            let n_pos = positions[head];
            let dir = n_pos - s;
            let length = dir.norm();
            if length <= 0.0 {
                return Err(Error::MeshQuality(format!("edge ({}, {}) has zero length", key.0, key.1)));
            }
            // Rotate S→N by -90°: outward normal of K along this edge, which
            // makes (n, S→N) direct and points K → L.
            let unit_normal = Vec2::new(dir.y / length, -dir.x / length);
            edges.push(Edge {
                id,
                tail,
                head,
                left_cell: k,
                right_cell: l,
                unit_normal,
                length,
            });
        }

        let mut triangle_edges: Vec<Vec<(usize, f64)>> = vec![Vec::new(); triangles.len()];
        let mut vertex_edges: Vec<Vec<usize>> = vec![Vec::new(); n_vertices];
        for e in &edges {
            triangle_edges[e.left_cell].push((e.id, 1.0));
            if let Some(l) = e.right_cell {
                triangle_edges[l].push((e.id, -1.0));
            }
            vertex_edges[e.tail].push(e.id);
            vertex_edges[e.head].push(e.id);
        }
        let triangle_edges: Vec<[(usize, f64); 3]> = triangle_edges
            .into_iter()
            .enumerate()
            .map(|(t, v)| {
                <[(usize, f64); 3]>::try_from(v).map_err(|_| {
                    Error::MeshQuality(format!("triangle {t} does not have exactly 3 edges"))
                })
            })
            .collect::<Result<_>>()?;

        Ok(Mesh { vertices, edges, triangles, triangle_edges, vertex_edges, metadata })
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn interior_edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(|e| !e.is_boundary())
    }

    pub fn boundary_edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(|e| e.is_boundary())
    }

    pub fn position(&self, vertex: usize) -> Vec2 {
        self.vertices[vertex].position
    }

    /// Vertex positions of a triangle, in CCW order.
    pub fn triangle_points(&self, t: usize) -> [Vec2; 3] {
        let v = self.triangles[t].vertex_ids;
        [self.position(v[0]), self.position(v[1]), self.position(v[2])]
    }

    /// The vertex of triangle `t` that is not an endpoint of edge `e`.
    pub fn opposite_vertex(&self, t: usize, e: usize) -> usize {
        let edge = &self.edges[e];
        *self.triangles[t]
            .vertex_ids
            .iter()
            .find(|&&v| v != edge.tail && v != edge.head)
            .expect("edge not incident to triangle")
    }

    /// Max over triangles of h_K / ρ_K.
    pub fn shape_regularity(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| t.diameter / t.inradius_diameter)
            .fold(0.0f64, f64::max)
    }

    pub fn max_diameter(&self) -> f64 {
        self.triangles.iter().map(|t| t.diameter).fold(0.0f64, f64::max)
    }

    pub fn total_area(&self) -> f64 {
        self.triangles.iter().map(|t| t.area).sum()
    }

    /// Finds the edge of triangle `t` joining vertices `a` and `b`.
    fn edge_between(&self, t: usize, a: usize, b: usize) -> usize {
        self.triangle_edges[t]
            .iter()
            .map(|&(e, _)| e)
            .find(|&e| {
                let ed = &self.edges[e];
                (ed.tail == a && ed.head == b) || (ed.tail == b && ed.head == a)
            })
            .expect("triangle has no edge between the given vertices")
    }

    /// The triangle on the other side of edge `e` from triangle `t`, if any.
    fn neighbor_across(&self, t: usize, e: usize) -> Option<usize> {
        let edge = &self.edges[e];
        if edge.left_cell == t {
            edge.right_cell
        } else {
            Some(edge.left_cell)
        }
    }

    /// Extracts the six-triangle vicinity of an interior edge. Returns `None`
    /// when any of the four outer triangles is missing or the six triangles
    /// are not pairwise distinct. Calling this on a boundary edge is a usage
    /// error.
    pub fn edge_vicinity(&self, edge_id: usize) -> Result<Option<Vicinity>> {
        let edge = &self.edges[edge_id];
        let Some(l) = edge.right_cell else {
            return Err(Error::Usage(format!("edge_vicinity called on boundary edge {edge_id}")));
        };
        let k = edge.left_cell;
        let s = edge.tail;
        let n = edge.head;
        let w = self.opposite_vertex(k, edge_id);
        let e = self.opposite_vertex(l, edge_id);

        let edge_en = self.edge_between(l, e, n);
        let edge_wn = self.edge_between(k, w, n);
        let edge_ws = self.edge_between(k, w, s);
        let edge_se = self.edge_between(l, s, e);

        let (Some(m), Some(p), Some(q), Some(r)) = (
            self.neighbor_across(l, edge_en),
            self.neighbor_across(k, edge_wn),
            self.neighbor_across(k, edge_ws),
            self.neighbor_across(l, edge_se),
        ) else {
            return Ok(None);
        };

        let six = [k, l, m, p, q, r];
        for i in 0..6 {
            for j in i + 1..6 {
                if six[i] == six[j] {
                    return Ok(None);
                }
            }
        }

        let a = self.opposite_vertex(m, edge_en);
        let b = self.opposite_vertex(p, edge_wn);
        let c = self.opposite_vertex(q, edge_ws);
        let d = self.opposite_vertex(r, edge_se);
        let midpoint = (self.position(s) + self.position(n)) * 0.5;

        Ok(Some(Vicinity { edge: edge_id, k, l, m, p, q, r, s, n, w, e, a, b, c, d, midpoint }))
    }

    /// Circumcenter of triangle `t`.
    pub fn circumcenter(&self, t: usize) -> Vec2 {
        let [a, b, c] = self.triangle_points(t);
        let d = 2.0 * ((b - a).cross(c - a));
        let a2 = a.dot(a);
        let b2 = b.dot(b);
        let c2 = c.dot(c);
        Vec2::new(
            (a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d,
            (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d,
        )
    }
}

/// Builds an n×n structured triangulation of the unit square, each cell split
/// by its positive-slope diagonal. Interior vertices are displaced by
/// `perturbation·(h/√2)` in a seeded random direction.
pub fn build_structured_mesh(n: usize, perturbation: f64, seed: u64) -> Result<Mesh> {
    if n < 1 {
        return Err(Error::Usage("subdivision count must be at least 1".into()));
    }
    if !(0.0..0.5).contains(&perturbation) {
        return Err(Error::Usage(format!(
            "perturbation {perturbation} outside [0, 0.5)"
        )));
    }
    let h = 1.0 / n as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = perturbation * h / std::f64::consts::SQRT_2;

    let mut positions = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            let mut p = Vec2::new(i as f64 * h, j as f64 * h);
            let interior = i > 0 && i < n && j > 0 && j < n;
            if interior && perturbation > 0.0 {
                let angle = rng.gen_range(0.0..std::f64::consts::TAU);
                p = p + Vec2::new(angle.cos(), angle.sin()) * radius;
            }
            positions.push(p);
        }
    }

    let vid = |i: usize, j: usize| j * (n + 1) + i;
    let mut cells = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let a = vid(i, j);
            let b = vid(i + 1, j);
            let c = vid(i + 1, j + 1);
            let d = vid(i, j + 1);
            cells.push([a, b, c]);
            cells.push([a, c, d]);
        }
    }

    Mesh::from_cells(positions, cells, Some(GenMetadata { n, perturbation, seed }))
}

const MESH_HEADER: &str = "PGFV-MESH 1";

/// Writes the mesh in the plain text format: header line, optional `# key
/// value` metadata comments, vertex count and coordinates, triangle count and
/// CCW vertex triples. Coordinates carry 17 significant digits.
pub fn write_mesh<W: Write>(mesh: &Mesh, sink: &mut W) -> Result<()> {
    writeln!(sink, "{MESH_HEADER}")?;
    if let Some(meta) = &mesh.metadata {
        writeln!(sink, "# generated n {} perturbation {:.16e} seed {}", meta.n, meta.perturbation, meta.seed)?;
    }
    writeln!(sink, "{}", mesh.n_vertices())?;
    for v in &mesh.vertices {
        writeln!(sink, "{:.16e} {:.16e}", v.position.x, v.position.y)?;
    }
    writeln!(sink, "{}", mesh.n_triangles())?;
    for t in &mesh.triangles {
        writeln!(sink, "{} {} {}", t.vertex_ids[0], t.vertex_ids[1], t.vertex_ids[2])?;
    }
    Ok(())
}

/// Reads a mesh from the text format; edges and orientation are recomputed
/// canonically. Parse errors carry the 1-based line number.
pub fn read_mesh<R: BufRead>(source: R) -> Result<Mesh> {
    let mut lines = Vec::new();
    for (idx, line) in source.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim().to_string();
        if trimmed.starts_with('#') || trimmed.is_empty() {
            continue;
        }
        lines.push((idx + 1, trimmed));
    }
    let mut it = lines.into_iter();

    let (line_no, header) = it
        .next()
        .ok_or(Error::Parse { line: 1, msg: "empty file".into() })?;
    if header != MESH_HEADER {
        return Err(Error::Parse {
            line: line_no,
            msg: format!("expected header `{MESH_HEADER}`, found `{header}`"),
        });
    }

    let parse_count = |entry: Option<(usize, String)>, what: &str| -> Result<(usize, usize)> {
        let (line, text) = entry.ok_or(Error::Parse { line: 0, msg: format!("missing {what} count") })?;
        let count = text
            .parse::<usize>()
            .map_err(|_| Error::Parse { line, msg: format!("invalid {what} count `{text}`") })?;
        Ok((line, count))
    };

    let (_, n_vertices) = parse_count(it.next(), "vertex")?;
    let mut positions = Vec::with_capacity(n_vertices);
    for _ in 0..n_vertices {
        let (line, text) = it
            .next()
            .ok_or(Error::Parse { line: 0, msg: "unexpected end of file in vertex block".into() })?;
        let mut parts = text.split_whitespace();
        let mut coord = || -> Result<f64> {
            parts
                .next()
                .ok_or(Error::Parse { line, msg: "expected two coordinates".into() })?
                .parse::<f64>()
                .map_err(|_| Error::Parse { line, msg: format!("invalid coordinate in `{text}`") })
        };
        let x = coord()?;
        let y = coord()?;
        positions.push(Vec2::new(x, y));
    }

    let (_, n_triangles) = parse_count(it.next(), "triangle")?;
    let mut cells = Vec::with_capacity(n_triangles);
    for t in 0..n_triangles {
        let (line, text) = it
            .next()
            .ok_or(Error::Parse { line: 0, msg: "unexpected end of file in triangle block".into() })?;
        let ids: Vec<usize> = text
            .split_whitespace()
            .map(|s| {
                s.parse::<usize>()
                    .map_err(|_| Error::Parse { line, msg: format!("invalid vertex id `{s}`") })
            })
            .collect::<Result<_>>()?;
        if ids.len() != 3 {
            return Err(Error::Parse { line, msg: format!("triangle needs 3 vertex ids, found {}", ids.len()) });
        }
        for &v in &ids {
            if v >= n_vertices {
                return Err(Error::Parse { line, msg: format!("vertex id {v} out of range 0..{n_vertices}") });
            }
        }
        let cell = [ids[0], ids[1], ids[2]];
        let p = [positions[cell[0]], positions[cell[1]], positions[cell[2]]];
        let (signed_area, ..) = triangle_geometry(p);
        if signed_area <= 0.0 {
            return Err(Error::Parse {
                line,
                msg: format!("triangle {t} is clockwise or degenerate (signed area {signed_area:.3e})"),
            });
        }
        cells.push(cell);
    }

    Mesh::from_cells(positions, cells, None)
}
