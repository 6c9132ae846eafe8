//! Lowest-order Raviart-Thomas basis on triangular meshes.
//!
//! The basis function of edge a is s·(x − opp)/(2|T|) on each co-boundary
//! triangle T, where opp is the vertex of T opposite the edge and s is the
//! outward-sign flag (+1 on K, −1 on L), and zero elsewhere. Its degrees of
//! freedom are total normal fluxes: ∫_b φ_a·n dγ = δ_ab.

use crate::linalg::SparseMatrix;
use crate::mesh::{Mesh, Vec2};
use crate::quadrature::{edge_gauss2, tri_midpoint_rule};

/// Restriction of an RT0 basis function to one triangle of its support.
#[derive(Debug, Clone, Copy)]
pub struct Rt0Piece {
    pub triangle: usize,
    pub opposite: Vec2,
    pub sign: f64,
    pub area: f64,
}

impl Rt0Piece {
    pub fn eval(&self, x: Vec2) -> Vec2 {
        (x - self.opposite) * (self.sign / (2.0 * self.area))
    }
}

/// The two (or one, on the boundary) pieces of φ_a.
pub fn pieces(mesh: &Mesh, edge: usize) -> Vec<Rt0Piece> {
    let e = &mesh.edges[edge];
    let mut out = Vec::with_capacity(2);
    for (t, sign) in [(Some(e.left_cell), 1.0), (e.right_cell, -1.0)] {
        if let Some(t) = t {
            out.push(Rt0Piece {
                triangle: t,
                opposite: mesh.position(mesh.opposite_vertex(t, edge)),
                sign,
                area: mesh.triangles[t].area,
            });
        }
    }
    out
}

fn barycentric(p: [Vec2; 3], x: Vec2) -> [f64; 3] {
    let area2 = (p[1] - p[0]).cross(p[2] - p[0]);
    [
        (p[2] - p[1]).cross(x - p[1]) / area2,
        (p[0] - p[2]).cross(x - p[2]) / area2,
        (p[1] - p[0]).cross(x - p[0]) / area2,
    ]
}

/// Evaluates φ_a at x; returns the zero vector outside the support. Points on
/// shared boundaries are resolved with 1e-12 barycentric slack.
pub fn eval_rt0(mesh: &Mesh, edge: usize, x: Vec2) -> Vec2 {
    for piece in pieces(mesh, edge) {
        let bary = barycentric(mesh.triangle_points(piece.triangle), x);
        if bary.iter().all(|&l| l >= -1e-12) {
            return piece.eval(x);
        }
    }
    Vec2::default()
}

/// Max over edge pairs of |∫_b φ_a·n dγ − δ_ab|, computed by 2-point Gauss
/// quadrature on every edge b within the support of a.
pub fn flux_matrix_check(mesh: &Mesh) -> f64 {
    let mut worst = 0.0f64;
    for a in 0..mesh.n_edges() {
        for piece in pieces(mesh, a) {
            for &(b, _) in &mesh.triangle_edges[piece.triangle] {
                // For b = a both co-boundary pieces give the same trace; count
                // only the K-side one.
                if b == a && piece.sign < 0.0 {
                    continue;
                }
                let eb = &mesh.edges[b];
                let flux: f64 = edge_gauss2(mesh.position(eb.tail), mesh.position(eb.head))
                    .iter()
                    .map(|&(x, w)| w * piece.eval(x).dot(eb.unit_normal))
                    .sum();
                let delta = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((flux - delta).abs());
            }
        }
    }
    worst
}

/// Assembles the RT0 mass matrix M_ab = (φ_a, φ_b) with the 3-point
/// edge-midpoint rule (the integrand is quadratic, so the rule is exact).
pub fn assemble_mass(mesh: &Mesh) -> SparseMatrix {
    let mut triplets = Vec::new();
    for tri in &mesh.triangles {
        let points = mesh.triangle_points(tri.id);
        let rule = tri_midpoint_rule(points);
        let local: Vec<(usize, Rt0Piece)> = mesh.triangle_edges[tri.id]
            .iter()
            .map(|&(e, sign)| {
                (
                    e,
                    Rt0Piece {
                        triangle: tri.id,
                        opposite: mesh.position(mesh.opposite_vertex(tri.id, e)),
                        sign,
                        area: tri.area,
                    },
                )
            })
            .collect();
        for (a, pa) in &local {
            for (b, pb) in &local {
                let val: f64 = rule.iter().map(|&(x, w)| w * pa.eval(x).dot(pb.eval(x))).sum();
                triplets.push((*a, *b, val));
            }
        }
    }
    SparseMatrix::from_triplets(mesh.n_edges(), mesh.n_edges(), &triplets)
}

/// Assembles the divergence matrix B[K, a] = ∫_K div φ_a dx. By the
/// divergence theorem and the flux DOF property the integral is exactly the
/// outward-sign flag, so no quadrature is involved.
pub fn assemble_div(mesh: &Mesh) -> SparseMatrix {
    let mut triplets = Vec::new();
    for tri in &mesh.triangles {
        for &(e, sign) in &mesh.triangle_edges[tri.id] {
            triplets.push((tri.id, e, sign));
        }
    }
    SparseMatrix::from_triplets(mesh.n_triangles(), mesh.n_edges(), &triplets)
}
