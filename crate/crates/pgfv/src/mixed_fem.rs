//! Classical lowest-order mixed finite element solver via the saddle-point
//! system, global flux recovery from cell means, and the lumped two-point
//! finite-volume baseline.
//!
//! Flux degrees of freedom are TOTAL normal fluxes through edges (∫_a ∇u·n dτ),
//! oriented by each edge's K→L normal; the two-point difference is scaled by
//! |a| accordingly so all three schemes share one convention.

use crate::linalg::{solve_general, solve_spd, spmv, SparseMatrix};
use crate::mesh::{Mesh, Vec2};
use crate::quadrature::tri_midpoint_rule;
use crate::rt0::{assemble_div, assemble_mass};
use crate::{Error, Result};

/// Piecewise-constant scalar field plus edge fluxes.
#[derive(Debug, Clone)]
pub struct DiscreteSolution {
    /// One cell mean per triangle.
    pub u: Vec<f64>,
    /// One total normal flux per edge, oriented by the edge normal.
    pub p: Vec<f64>,
}

/// Distance rule for the two-point flux model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceRule {
    /// d_a = (x_L − x_K)·n with x the centroid (edge midpoint on the boundary).
    CentroidNormal,
    /// d_a = signed distance between circumcenters along n. Edges whose
    /// circumcenters coincide (zero distance) are treated as infinitely
    /// transmissive: the two cells are merged into one control volume.
    Circumcenter,
}

/// Per-cell integrals of the source term, 3-point midpoint rule.
pub fn cell_source_integrals(mesh: &Mesh, f: &dyn Fn(f64, f64) -> f64) -> Vec<f64> {
    mesh.triangles
        .iter()
        .map(|t| {
            tri_midpoint_rule(mesh.triangle_points(t.id))
                .iter()
                .map(|&(x, w)| w * f(x.x, x.y))
                .sum()
        })
        .collect()
}

/// Solves the mixed system [M Bᵀ; B 0]·[p; u] = [0; −F] with homogeneous
/// Dirichlet conditions natural in the formulation (boundary edges keep their
/// flux DOF).
pub fn solve_mixed(mesh: &Mesh, f: &dyn Fn(f64, f64) -> f64) -> Result<DiscreteSolution> {
    let m = assemble_mass(mesh);
    let b = assemble_div(mesh);
    let f_cells = cell_source_integrals(mesh, f);
    solve_mixed_from_parts(mesh, &m, &b, &f_cells)
}

/// Saddle solve from pre-assembled parts.
pub fn solve_mixed_from_parts(
    mesh: &Mesh,
    m: &SparseMatrix,
    b: &SparseMatrix,
    f_cells: &[f64],
) -> Result<DiscreteSolution> {
    let n_e = mesh.n_edges();
    let n_t = mesh.n_triangles();
    let mut triplets = Vec::new();
    for r in 0..n_e {
        for (c, v) in m.row(r) {
            triplets.push((r, c, v));
        }
    }
    for r in 0..n_t {
        for (c, v) in b.row(r) {
            triplets.push((n_e + r, c, v)); // B block
            triplets.push((c, n_e + r, v)); // Bᵀ block
        }
    }
    let a = SparseMatrix::from_triplets(n_e + n_t, n_e + n_t, &triplets);
    let mut rhs = vec![0.0; n_e + n_t];
    for (i, fk) in f_cells.iter().enumerate() {
        rhs[n_e + i] = -fk;
    }
    let x = solve_general(&a, &rhs, 1e-10)?;
    Ok(DiscreteSolution { p: x[..n_e].to_vec(), u: x[n_e..].to_vec() })
}

/// Global flux recovery p = −M⁻¹Bᵀu. Because M⁻¹ is full this couples every
/// edge to every cell mean, which is the defect the Petrov-Galerkin stencils
/// remove.
pub fn recover_flux_from_means(
    m: &SparseMatrix,
    b: &SparseMatrix,
    u: &[f64],
) -> Result<Vec<f64>> {
    let bt = b.transpose();
    let btu = spmv(&bt, u);
    let rhs: Vec<f64> = btu.iter().map(|v| -v).collect();
    solve_spd(m, &rhs, 1e-12)
}

/// Transmissibility distance of an edge under the given rule. For interior
/// edges the sign follows the K→L normal; nonpositive distances under the
/// centroid rule (or negative under the circumcenter rule) make the mesh
/// inadmissible.
pub fn edge_distance(mesh: &Mesh, edge: usize, rule: DistanceRule) -> f64 {
    let e = &mesh.edges[edge];
    let mid = (mesh.position(e.tail) + mesh.position(e.head)) * 0.5;
    let (xk, xl): (Vec2, Vec2) = match rule {
        DistanceRule::CentroidNormal => (
            mesh.triangles[e.left_cell].centroid,
            e.right_cell.map_or(mid, |l| mesh.triangles[l].centroid),
        ),
        DistanceRule::Circumcenter => (
            mesh.circumcenter(e.left_cell),
            e.right_cell.map_or(mid, |l| mesh.circumcenter(l)),
        ),
    };
    (xl - xk).dot(e.unit_normal)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        self.0[ra] = rb;
    }
}

/// Two-point finite-volume solve: edge fluxes F_a = |a|(u_L − u_K)/d_a
/// (boundary: |a|(0 − u_K)/d_a), cell balances Σ s_{K,a} F_a = −F_K.
///
/// Under the circumcenter rule, interior edges with coincident circumcenters
/// (d_a = 0 within tolerance) carry an infinite transmissibility; the exact
/// limit is enforced by merging the two cells into one control volume and
/// recovering the merged-edge flux from the per-triangle balances afterwards.
pub fn solve_two_point_fv(
    mesh: &Mesh,
    f: &dyn Fn(f64, f64) -> f64,
    rule: DistanceRule,
) -> Result<DiscreteSolution> {
    let n_t = mesh.n_triangles();
    let f_cells = cell_source_integrals(mesh, f);
    let h = mesh.max_diameter();
    let merge_tol = 1e-12 * h;

    // Classify edges and merge zero-distance pairs (circumcenter rule only).
    let mut uf = UnionFind::new(n_t);
    let mut merged_edges = Vec::new();
    let mut distances = vec![0.0; mesh.n_edges()];
    for e in &mesh.edges {
        let d = edge_distance(mesh, e.id, rule);
        distances[e.id] = d;
        if let Some(l) = e.right_cell {
            if rule == DistanceRule::Circumcenter && d.abs() <= merge_tol {
                uf.union(e.left_cell, l);
                merged_edges.push(e.id);
                continue;
            }
        }
        if d <= 0.0 {
            return Err(Error::Admissibility { edge: e.id, distance: d });
        }
    }

    // Compact control-volume indices.
    let mut cv_of = vec![usize::MAX; n_t];
    let mut n_cv = 0;
    for t in 0..n_t {
        let root = uf.find(t);
        if cv_of[root] == usize::MAX {
            cv_of[root] = n_cv;
            n_cv += 1;
        }
        cv_of[t] = cv_of[root];
    }

    let mut triplets = Vec::new();
    let mut rhs = vec![0.0; n_cv];
    for (t, fk) in f_cells.iter().enumerate() {
        rhs[cv_of[t]] += fk;
    }
    for e in &mesh.edges {
        if merged_edges.contains(&e.id) {
            continue;
        }
        let t = e.length / distances[e.id];
        let k = cv_of[e.left_cell];
        match e.right_cell {
            Some(l) => {
                let l = cv_of[l];
                if k == l {
                    continue; // internal to a merged control volume with d > 0
                }
                triplets.push((k, k, t));
                triplets.push((k, l, -t));
                triplets.push((l, l, t));
                triplets.push((l, k, -t));
            }
            None => {
                triplets.push((k, k, t));
            }
        }
    }
    // Assembled as Σ t (u_K − u_L) = F_K, the negated balance, so the system
    // is SPD.
    let a = SparseMatrix::from_triplets(n_cv, n_cv, &triplets);
    let u_cv = solve_spd(&a, &rhs, 1e-10)?;
    let u: Vec<f64> = (0..n_t).map(|t| u_cv[cv_of[t]]).collect();

    // Edge fluxes from the two-point model.
    let mut p = vec![f64::NAN; mesh.n_edges()];
    for e in &mesh.edges {
        if merged_edges.contains(&e.id) {
            continue;
        }
        let uk = u[e.left_cell];
        let ul = e.right_cell.map_or(0.0, |l| u[l]);
        p[e.id] = e.length * (ul - uk) / distances[e.id];
    }

    // Recover merged-edge fluxes by peeling triangles with one unknown edge:
    // Σ_a s_{K,a} p_a = −F_K determines the remaining flux.
    let mut unknown: Vec<usize> = merged_edges.clone();
    while !unknown.is_empty() {
        let before = unknown.len();
        for t in 0..n_t {
            let open: Vec<(usize, f64)> = mesh.triangle_edges[t]
                .iter()
                .copied()
                .filter(|&(e, _)| p[e].is_nan())
                .collect();
            if open.len() == 1 {
                let (e, sign) = open[0];
                let known: f64 = mesh.triangle_edges[t]
                    .iter()
                    .filter(|&&(a, _)| a != e)
                    .map(|&(a, s)| s * p[a])
                    .sum();
                p[e] = (-f_cells[t] - known) / sign;
            }
        }
        unknown.retain(|&e| p[e].is_nan());
        if unknown.len() == before {
            return Err(Error::MeshQuality(
                "cannot recover fluxes inside a cyclically merged control volume".into(),
            ));
        }
    }

    Ok(DiscreteSolution { u, p })
}

/// Per-cell conservation residual max_K |Σ_a s_{K,a} p_a + F_K|.
pub fn conservation_residual(mesh: &Mesh, solution: &DiscreteSolution, f_cells: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for t in 0..mesh.n_triangles() {
        let balance: f64 =
            mesh.triangle_edges[t].iter().map(|&(e, s)| s * solution.p[e]).sum::<f64>()
                + f_cells[t];
        worst = worst.max(balance.abs());
    }
    worst
}
