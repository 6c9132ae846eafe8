//! Six-point Petrov-Galerkin flux stencils.
//!
//! For an interior edge SN with a complete six-triangle vicinity, the five
//! flux weights (η, α, β, γ, δ) must satisfy three scalar constraints: the
//! vector relation η·KL + α·LM + β·PK + γ·QK + δ·LR = |SN|·n between triangle
//! barycenters (which makes the reconstructed flux exact for affine fields)
//! and one scalar relation tying the outer weights to apex-vertex vectors.
//! The two remaining degrees of freedom are fixed by a solution strategy.

use crate::linalg::{least_squares_min_norm, norm2, DenseMatrix};
use crate::mesh::{Mesh, Vicinity};
use crate::mixed_fem::{edge_distance, DistanceRule};
use crate::{Error, Result};
use std::collections::BTreeMap;

/// Strategy for the two free parameters of the constraint system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Minimum-Euclidean-norm weights (deterministic, basis independent).
    MinNorm,
    /// Weights closest to the two-point weight w₀ = (|SN|/d_a, 0, 0, 0, 0).
    AnchorTwoPoint,
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Strategy::MinNorm => write!(f, "minnorm"),
            Strategy::AnchorTwoPoint => write!(f, "anchor"),
        }
    }
}

/// Flux weights of one interior edge.
#[derive(Debug, Clone)]
pub struct StencilWeights {
    pub edge: usize,
    pub eta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub strategy: Strategy,
    /// ‖A·w − b‖ of the 3×5 constraint system.
    pub residual: f64,
}

impl StencilWeights {
    pub fn as_array(&self) -> [f64; 5] {
        [self.eta, self.alpha, self.beta, self.gamma, self.delta]
    }

    /// Residual bound scale |SN|·(1 + Σ|w|).
    pub fn scale(&self, edge_length: f64) -> f64 {
        edge_length * (1.0 + self.as_array().iter().map(|w| w.abs()).sum::<f64>())
    }
}

/// The 3×5 constraint system of one vicinity.
#[derive(Debug, Clone)]
pub struct ConstraintSystem {
    pub a: DenseMatrix,
    pub b: [f64; 3],
    pub edge: usize,
    pub edge_length: f64,
}

/// Assembles the constraints from a complete vicinity. Rows 1-2 are the two
/// components of the barycenter relation; row 3 couples the outer weights to
/// the apex vectors WA, EB, EC, WD (the η coefficient is zero there).
pub fn build_constraints(mesh: &Mesh, vic: &Vicinity) -> Result<ConstraintSystem> {
    let c = |t: usize| mesh.triangles[t].centroid;
    let v = |id: usize| mesh.position(id);

    let kl = c(vic.l) - c(vic.k);
    let lm = c(vic.m) - c(vic.l);
    let pk = c(vic.k) - c(vic.p);
    let qk = c(vic.k) - c(vic.q);
    let lr = c(vic.r) - c(vic.l);

    let wa = v(vic.a) - v(vic.w);
    let eb = v(vic.b) - v(vic.e);
    let ec = v(vic.c) - v(vic.e);
    let wd = v(vic.d) - v(vic.w);

    let edge = &mesh.edges[vic.edge];
    let n = edge.unit_normal;
    let len = edge.length;
    let o = vic.midpoint;
    let ol = c(vic.l) - o;
    let ok = c(vic.k) - o;

    let a = DenseMatrix::from_rows(&[
        &[kl.x, lm.x, pk.x, qk.x, lr.x],
        &[kl.y, lm.y, pk.y, qk.y, lr.y],
        &[0.0, lm.dot(wa), pk.dot(eb), qk.dot(ec), lr.dot(wd)],
    ]);
    let b = [len * n.x, len * n.y, -3.0 * len * n.dot(ol + ok)];

    // Rows 1-2 must span the plane; otherwise every barycenter vector is
    // parallel and the geometry is degenerate.
    let mut rank2 = false;
    for i in 0..5 {
        for j in i + 1..5 {
            let det = a.get(0, i) * a.get(1, j) - a.get(0, j) * a.get(1, i);
            if det.abs() > 1e-12 * len * len {
                rank2 = true;
            }
        }
    }
    if !rank2 {
        return Err(Error::ConstraintRank { edge: vic.edge });
    }

    Ok(ConstraintSystem { a, b, edge: vic.edge, edge_length: len })
}

/// Solves the underdetermined constraint system under the given strategy.
pub fn solve_weights(
    mesh: &Mesh,
    system: &ConstraintSystem,
    strategy: Strategy,
) -> Result<StencilWeights> {
    let w = match strategy {
        Strategy::MinNorm => least_squares_min_norm(&system.a, &system.b)
            .map_err(|_| Error::ConstraintRank { edge: system.edge })?,
        Strategy::AnchorTwoPoint => {
            let d = edge_distance(mesh, system.edge, DistanceRule::CentroidNormal);
            let w0 = [system.edge_length / d, 0.0, 0.0, 0.0, 0.0];
            let aw0 = system.a.matvec(&w0);
            let res: Vec<f64> = system.b.iter().zip(&aw0).map(|(bi, ai)| bi - ai).collect();
            let dw = least_squares_min_norm(&system.a, &res)
                .map_err(|_| Error::ConstraintRank { edge: system.edge })?;
            w0.iter().zip(&dw).map(|(a, b)| a + b).collect()
        }
    };
    let aw = system.a.matvec(&w);
    let res: Vec<f64> = system.b.iter().zip(&aw).map(|(bi, ai)| bi - ai).collect();
    Ok(StencilWeights {
        edge: system.edge,
        eta: w[0],
        alpha: w[1],
        beta: w[2],
        gamma: w[3],
        delta: w[4],
        strategy,
        residual: norm2(&res),
    })
}

/// Six-point flux reconstruction through edge SN in the direction of its
/// normal: η(u_L−u_K) + α(u_M−u_L) + β(u_K−u_P) + γ(u_K−u_Q) + δ(u_R−u_L).
pub fn reconstruct_flux(
    w: &StencilWeights,
    u_k: f64,
    u_l: f64,
    u_m: f64,
    u_p: f64,
    u_q: f64,
    u_r: f64,
) -> f64 {
    w.eta * (u_l - u_k)
        + w.alpha * (u_m - u_l)
        + w.beta * (u_k - u_p)
        + w.gamma * (u_k - u_q)
        + w.delta * (u_r - u_l)
}

/// Flux closure of one edge: either a Petrov-Galerkin stencil over a complete
/// vicinity or the two-point fallback (centroid-normal rule; boundary edges
/// use the homogeneous Dirichlet value at the edge midpoint).
#[derive(Debug, Clone)]
pub enum EdgeClosure {
    Pg { weights: StencilWeights, vicinity: Vicinity },
    TwoPoint { transmissibility: f64 },
    Boundary { transmissibility: f64 },
}

/// Per-edge stencil map for a whole mesh, keyed by edge id.
#[derive(Debug, Clone)]
pub struct StencilMap {
    pub closures: BTreeMap<usize, EdgeClosure>,
    pub strategy: Strategy,
}

impl StencilMap {
    pub fn n_pg(&self) -> usize {
        self.closures
            .values()
            .filter(|c| matches!(c, EdgeClosure::Pg { .. }))
            .count()
    }

    /// Fraction of interior edges carrying a PG stencil.
    pub fn coverage(&self, mesh: &Mesh) -> f64 {
        let interior = mesh.interior_edges().count();
        if interior == 0 {
            0.0
        } else {
            self.n_pg() as f64 / interior as f64
        }
    }
}

/// Builds stencils for every edge: PG weights where a complete vicinity
/// exists, two-point fallback elsewhere. Set `force_fallback` to bypass every
/// PG stencil (used for baseline-equivalence checks).
pub fn build_all_stencils(
    mesh: &Mesh,
    strategy: Strategy,
    force_fallback: bool,
) -> Result<StencilMap> {
    let mut closures = BTreeMap::new();
    for e in &mesh.edges {
        let closure = if e.is_boundary() {
            let d = edge_distance(mesh, e.id, DistanceRule::CentroidNormal);
            if d <= 0.0 {
                return Err(Error::Admissibility { edge: e.id, distance: d });
            }
            EdgeClosure::Boundary { transmissibility: e.length / d }
        } else {
            let vicinity = if force_fallback { None } else { mesh.edge_vicinity(e.id)? };
            match vicinity {
                Some(vic) => {
                    let system = build_constraints(mesh, &vic)?;
                    let weights = solve_weights(mesh, &system, strategy)?;
                    EdgeClosure::Pg { weights, vicinity: vic }
                }
                None => {
                    let d = edge_distance(mesh, e.id, DistanceRule::CentroidNormal);
                    if d <= 0.0 {
                        return Err(Error::Admissibility { edge: e.id, distance: d });
                    }
                    EdgeClosure::TwoPoint { transmissibility: e.length / d }
                }
            }
        };
        closures.insert(e.id, closure);
    }
    Ok(StencilMap { closures, strategy })
}

/// Evaluates the flux of a closure at the given cell values.
pub fn closure_flux(mesh: &Mesh, edge: usize, closure: &EdgeClosure, u: &[f64]) -> f64 {
    match closure {
        EdgeClosure::Pg { weights, vicinity } => reconstruct_flux(
            weights,
            u[vicinity.k],
            u[vicinity.l],
            u[vicinity.m],
            u[vicinity.p],
            u[vicinity.q],
            u[vicinity.r],
        ),
        EdgeClosure::TwoPoint { transmissibility } => {
            let e = &mesh.edges[edge];
            transmissibility * (u[e.right_cell.expect("interior closure")] - u[e.left_cell])
        }
        EdgeClosure::Boundary { transmissibility } => {
            let e = &mesh.edges[edge];
            transmissibility * (0.0 - u[e.left_cell])
        }
    }
}

/// CSV dump of the stencil table: edge id, vertex ids, weights, residual,
/// strategy.
pub fn dump_stencils_csv(mesh: &Mesh, map: &StencilMap) -> String {
    let mut out = String::from("# pgfv-stencil-csv 1\nedge,s,n,eta,alpha,beta,gamma,delta,residual,strategy\n");
    for (edge, closure) in &map.closures {
        if let EdgeClosure::Pg { weights, .. } = closure {
            let e = &mesh.edges[*edge];
            out.push_str(&format!(
                "{},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.3e},{}\n",
                edge,
                e.tail,
                e.head,
                weights.eta,
                weights.alpha,
                weights.beta,
                weights.gamma,
                weights.delta,
                weights.residual,
                weights.strategy
            ));
        }
    }
    out
}
