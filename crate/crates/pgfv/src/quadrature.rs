//! Quadrature rules on triangles and segments.
//!
//! The 3-point edge-midpoint rule is exact for quadratics and is the assembly
//! rule for the mass matrix; the 7-point rule (degree 5) measures error norms;
//! Gauss rules on segments handle edge fluxes.

use crate::mesh::Vec2;

/// Edge-midpoint rule: exact for polynomials of degree ≤ 2.
pub fn tri_midpoint_rule(v: [Vec2; 3]) -> [(Vec2, f64); 3] {
    let area = 0.5 * (v[1] - v[0]).cross(v[2] - v[0]).abs();
    let w = area / 3.0;
    [
        ((v[0] + v[1]) * 0.5, w),
        ((v[1] + v[2]) * 0.5, w),
        ((v[2] + v[0]) * 0.5, w),
    ]
}

/// 7-point rule, exact for polynomials of degree ≤ 5.
pub fn tri_degree5_rule(v: [Vec2; 3]) -> [(Vec2, f64); 7] {
    let area = 0.5 * (v[1] - v[0]).cross(v[2] - v[0]).abs();
    let s15 = 15.0f64.sqrt();
    let a = (6.0 - s15) / 21.0;
    let b = (6.0 + s15) / 21.0;
    let wa = (155.0 - s15) / 1200.0;
    let wb = (155.0 + s15) / 1200.0;
    let bary = |l0: f64, l1: f64, l2: f64| v[0] * l0 + v[1] * l1 + v[2] * l2;
    [
        (bary(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0), area * 9.0 / 40.0),
        (bary(a, a, 1.0 - 2.0 * a), area * wa),
        (bary(a, 1.0 - 2.0 * a, a), area * wa),
        (bary(1.0 - 2.0 * a, a, a), area * wa),
        (bary(b, b, 1.0 - 2.0 * b), area * wb),
        (bary(b, 1.0 - 2.0 * b, b), area * wb),
        (bary(1.0 - 2.0 * b, b, b), area * wb),
    ]
}

/// 2-point Gauss rule on the segment [p0, p1], exact for cubics.
pub fn edge_gauss2(p0: Vec2, p1: Vec2) -> [(Vec2, f64); 2] {
    let mid = (p0 + p1) * 0.5;
    let half = (p1 - p0) * 0.5;
    let len = (p1 - p0).norm();
    let t = 1.0 / 3.0f64.sqrt();
    [
        (mid + half * (-t), 0.5 * len),
        (mid + half * t, 0.5 * len),
    ]
}

/// 4-point Gauss rule on the segment [p0, p1], exact for degree ≤ 7.
pub fn edge_gauss4(p0: Vec2, p1: Vec2) -> [(Vec2, f64); 4] {
    let mid = (p0 + p1) * 0.5;
    let half = (p1 - p0) * 0.5;
    let len = (p1 - p0).norm();
    const T1: f64 = 0.339981043584856_3;
    const T2: f64 = 0.861136311594052_6;
    const W1: f64 = 0.652145154862546_1;
    const W2: f64 = 0.347854845137453_9;
    [
        (mid + half * (-T2), 0.5 * len * W2),
        (mid + half * (-T1), 0.5 * len * W1),
        (mid + half * T1, 0.5 * len * W1),
        (mid + half * T2, 0.5 * len * W2),
    ]
}
