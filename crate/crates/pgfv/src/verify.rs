//! Manufactured solutions, error norms, convergence studies, and the affine
//! exactness suite.

use crate::fv_solver::solve_pgfv;
use crate::mesh::{build_structured_mesh, Mesh, Vec2};
use crate::mixed_fem::{solve_mixed, solve_two_point_fv, DiscreteSolution, DistanceRule};
use crate::pg_stencil::{build_all_stencils, closure_flux, EdgeClosure, Strategy};
use crate::quadrature::tri_degree5_rule;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

/// An exact solution of −Δu = f on the unit square with u = 0 on the boundary.
pub struct ManufacturedCase {
    pub name: &'static str,
    pub u: fn(f64, f64) -> f64,
    pub grad: fn(f64, f64) -> Vec2,
    pub f: fn(f64, f64) -> f64,
}

/// Looks a manufactured case up by name (`sinsin` or `bubble`).
pub fn manufactured(name: &str) -> Result<ManufacturedCase> {
    match name {
        "sinsin" => Ok(ManufacturedCase {
            name: "sinsin",
            u: |x, y| (PI * x).sin() * (PI * y).sin(),
            grad: |x, y| {
                Vec2::new(
                    PI * (PI * x).cos() * (PI * y).sin(),
                    PI * (PI * x).sin() * (PI * y).cos(),
                )
            },
            f: |x, y| 2.0 * PI * PI * (PI * x).sin() * (PI * y).sin(),
        }),
        "bubble" => Ok(ManufacturedCase {
            name: "bubble",
            u: |x, y| x * (1.0 - x) * y * (1.0 - y),
            grad: |x, y| {
                Vec2::new((1.0 - 2.0 * x) * y * (1.0 - y), x * (1.0 - x) * (1.0 - 2.0 * y))
            },
            f: |x, y| 2.0 * (x * (1.0 - x) + y * (1.0 - y)),
        }),
        other => Err(Error::UnknownCase(other.into())),
    }
}

/// L² error norms of a discrete solution against the exact case, degree-5
/// quadrature: e_u for the cell means, e_p for the RT0 flux expansion against
/// the exact gradient, e_div for div p_T + f.
pub fn error_norms(mesh: &Mesh, solution: &DiscreteSolution, case: &ManufacturedCase) -> (f64, f64, f64) {
    let mut eu2 = 0.0;
    let mut ep2 = 0.0;
    let mut ediv2 = 0.0;
    for tri in &mesh.triangles {
        let points = mesh.triangle_points(tri.id);
        let rule = tri_degree5_rule(points);
        let uk = solution.u[tri.id];
        // div p_T is piecewise constant.
        let div_p: f64 = mesh.triangle_edges[tri.id]
            .iter()
            .map(|&(e, s)| s * solution.p[e])
            .sum::<f64>()
            / tri.area;
        let local: Vec<(usize, f64)> = mesh.triangle_edges[tri.id].to_vec();
        for &(x, w) in &rule {
            eu2 += w * (uk - (case.u)(x.x, x.y)).powi(2);
            let mut p_t = Vec2::default();
            for &(e, s) in &local {
                let opp = mesh.position(mesh.opposite_vertex(tri.id, e));
                p_t = p_t + (x - opp) * (s * solution.p[e] / (2.0 * tri.area));
            }
            let diff = p_t - (case.grad)(x.x, x.y);
            ep2 += w * diff.dot(diff);
            ediv2 += w * (div_p + (case.f)(x.x, x.y)).powi(2);
        }
    }
    (eu2.sqrt(), ep2.sqrt(), ediv2.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Mixed,
    TwoPoint,
    Pgfv,
}

impl std::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Scheme> {
        match s {
            "mixed" => Ok(Scheme::Mixed),
            "twopoint" => Ok(Scheme::TwoPoint),
            "pgfv" => Ok(Scheme::Pgfv),
            other => Err(Error::Usage(format!("unknown scheme `{other}`"))),
        }
    }
}

/// One refinement level of a convergence study.
#[derive(Debug, Clone, Serialize)]
pub struct LevelResult {
    pub n: usize,
    pub h: f64,
    pub e_u: Option<f64>,
    pub e_p: Option<f64>,
    pub e_div: Option<f64>,
    /// Fraction of interior edges with a PG stencil (PG-FV scheme only).
    pub coverage: Option<f64>,
    /// Failure text when the level's solve failed.
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub scheme: Scheme,
    pub case: String,
    pub perturbation: f64,
    pub seed: u64,
    pub levels: Vec<LevelResult>,
    /// Rates between consecutive successful levels, for (e_u, e_p, e_div,
    /// e_p + e_div).
    pub rates: Vec<RateEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RateEntry {
    pub from_n: usize,
    pub to_n: usize,
    pub rate_u: f64,
    pub rate_p: f64,
    pub rate_div: f64,
    pub rate_hdiv: f64,
}

/// rate = log(e_prev/e_next) / log(h_prev/h_next).
pub fn estimate_rate(e_prev: f64, e_next: f64, h_prev: f64, h_next: f64) -> f64 {
    (e_prev / e_next).ln() / (h_prev / h_next).ln()
}

/// Runs one scheme at one level.
pub fn solve_scheme(
    mesh: &Mesh,
    scheme: Scheme,
    f: &dyn Fn(f64, f64) -> f64,
    strategy: Strategy,
    rule: DistanceRule,
) -> Result<(DiscreteSolution, Option<f64>)> {
    match scheme {
        Scheme::Mixed => Ok((solve_mixed(mesh, f)?, None)),
        Scheme::TwoPoint => Ok((solve_two_point_fv(mesh, f, rule)?, None)),
        Scheme::Pgfv => {
            let stencils = build_all_stencils(mesh, strategy, false)?;
            let coverage = stencils.coverage(mesh);
            Ok((solve_pgfv(mesh, &stencils, f)?, Some(coverage)))
        }
    }
}

/// Runs a scheme over a list of refinement levels and estimates rates.
/// A failed level is recorded and skipped by the rate estimator; remaining
/// levels still run.
pub fn convergence_study(
    scheme: Scheme,
    case: &ManufacturedCase,
    levels: &[usize],
    perturbation: f64,
    seed: u64,
    strategy: Strategy,
    rule: DistanceRule,
) -> ConvergenceReport {
    let mut out_levels = Vec::new();
    for &n in levels {
        let level = match build_structured_mesh(n, perturbation, seed)
            .and_then(|mesh| {
                let f = case.f;
                let sol = solve_scheme(&mesh, scheme, &move |x, y| f(x, y), strategy, rule)?;
                Ok((mesh, sol))
            }) {
            Ok((mesh, (solution, coverage))) => {
                let (e_u, e_p, e_div) = error_norms(&mesh, &solution, case);
                LevelResult {
                    n,
                    h: mesh.max_diameter(),
                    e_u: Some(e_u),
                    e_p: Some(e_p),
                    e_div: Some(e_div),
                    coverage,
                    error: None,
                }
            }
            Err(err) => LevelResult {
                n,
                h: 2.0f64.sqrt() / n as f64,
                e_u: None,
                e_p: None,
                e_div: None,
                coverage: None,
                error: Some(err.to_string()),
            },
        };
        out_levels.push(level);
    }

    let mut rates = Vec::new();
    let ok: Vec<&LevelResult> = out_levels.iter().filter(|l| l.error.is_none()).collect();
    for pair in ok.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        rates.push(RateEntry {
            from_n: a.n,
            to_n: b.n,
            rate_u: estimate_rate(a.e_u.unwrap(), b.e_u.unwrap(), a.h, b.h),
            rate_p: estimate_rate(a.e_p.unwrap(), b.e_p.unwrap(), a.h, b.h),
            rate_div: estimate_rate(a.e_div.unwrap(), b.e_div.unwrap(), a.h, b.h),
            rate_hdiv: estimate_rate(
                a.e_p.unwrap() + a.e_div.unwrap(),
                b.e_p.unwrap() + b.e_div.unwrap(),
                a.h,
                b.h,
            ),
        });
    }

    ConvergenceReport {
        scheme,
        case: case.name.to_string(),
        perturbation,
        seed,
        levels: out_levels,
        rates,
    }
}

impl ConvergenceReport {
    /// One row per level; rate columns refer to the step ending at the row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "# pgfv-convergence-csv 1: scheme,case,n,h,e_u,e_p,e_div,coverage,rate_u,rate_p,rate_div,rate_hdiv,error\n",
        );
        out.push_str("scheme,case,n,h,e_u,e_p,e_div,coverage,rate_u,rate_p,rate_div,rate_hdiv,error\n");
        for level in &self.levels {
            let rate = self.rates.iter().find(|r| r.to_n == level.n);
            let fmt_opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.16e}"));
            let fmt_rate = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.6}"));
            out.push_str(&format!(
                "{:?},{},{},{:.16e},{},{},{},{},{},{},{},{},{}\n",
                self.scheme,
                self.case,
                level.n,
                level.h,
                fmt_opt(level.e_u),
                fmt_opt(level.e_p),
                fmt_opt(level.e_div),
                fmt_opt(level.coverage),
                fmt_rate(rate.map(|r| r.rate_u)),
                fmt_rate(rate.map(|r| r.rate_p)),
                fmt_rate(rate.map(|r| r.rate_div)),
                fmt_rate(rate.map(|r| r.rate_hdiv)),
                level.error.clone().unwrap_or_default()
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// Max relative deviation of the six-point flux from the exact affine flux
/// |SN|·(g·n), over `trials` random affine fields and all PG stencil edges.
pub fn affine_exactness_suite(mesh: &Mesh, strategy: Strategy, trials: usize) -> Result<f64> {
    let map = build_all_stencils(mesh, strategy, false)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x_aff1_4e);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let g = Vec2::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let a0: f64 = rng.gen_range(-1.0..1.0);
        let u: Vec<f64> = mesh.triangles.iter().map(|t| a0 + g.dot(t.centroid)).collect();
        for (edge, closure) in &map.closures {
            if matches!(closure, EdgeClosure::Pg { .. }) {
                let e = &mesh.edges[*edge];
                let flux = closure_flux(mesh, *edge, closure, &u);
                let exact = e.length * g.dot(e.unit_normal);
                let rel = (flux - exact).abs() / ((1.0 + g.norm()) * e.length);
                worst = worst.max(rel);
            }
        }
    }
    Ok(worst)
}

/// Exact-solution injection: cell means of u and exact edge fluxes ∫_a ∇u·n.
pub fn inject_exact(mesh: &Mesh, case: &ManufacturedCase) -> DiscreteSolution {
    use crate::quadrature::edge_gauss4;
    let u: Vec<f64> = mesh
        .triangles
        .iter()
        .map(|t| {
            tri_degree5_rule(mesh.triangle_points(t.id))
                .iter()
                .map(|&(x, w)| w * (case.u)(x.x, x.y))
                .sum::<f64>()
                / t.area
        })
        .collect();
    let p: Vec<f64> = mesh
        .edges
        .iter()
        .map(|e| {
            edge_gauss4(mesh.position(e.tail), mesh.position(e.head))
                .iter()
                .map(|&(x, w)| w * (case.grad)(x.x, x.y).dot(e.unit_normal))
                .sum()
        })
        .collect();
    DiscreteSolution { u, p }
}
