//! Self-contained SVG emitters: solution heatmaps over a triangulation and
//! log-log convergence plots with slope annotations. No plotting dependency.

use crate::mesh::Mesh;

fn color(t: f64) -> String {
    // Blue (low) to red (high) through white.
    let t = t.clamp(0.0, 1.0);
    let (r, g, b) = if t < 0.5 {
        let s = t / 0.5;
        (255.0 * s, 255.0 * s, 255.0)
    } else {
        let s = (t - 0.5) / 0.5;
        (255.0, 255.0 * (1.0 - s), 255.0 * (1.0 - s))
    };
    format!("rgb({},{},{})", r as u8, g as u8, b as u8)
}

/// Heatmap of a cell-wise constant field over the triangulation.
pub fn heatmap(mesh: &Mesh, u: &[f64], title: &str) -> String {
    let size = 600.0;
    let margin = 30.0;
    let (min_x, max_x, min_y, max_y) = mesh.vertices.iter().fold(
        (f64::MAX, f64::MIN, f64::MAX, f64::MIN),
        |(ax, bx, ay, by), v| {
            (ax.min(v.position.x), bx.max(v.position.x), ay.min(v.position.y), by.max(v.position.y))
        },
    );
    let span = (max_x - min_x).max(max_y - min_y).max(1e-30);
    let sx = |x: f64| margin + (x - min_x) / span * (size - 2.0 * margin);
    let sy = |y: f64| size - margin - (y - min_y) / span * (size - 2.0 * margin);

    let lo = u.iter().cloned().fold(f64::MAX, f64::min);
    let hi = u.iter().cloned().fold(f64::MIN, f64::max);
    let range = (hi - lo).max(1e-30);

    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">\n"
    );
    out.push_str(&format!(
        "<text x=\"{margin}\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">{title} (min {lo:.3e}, max {hi:.3e})</text>\n"
    ));
    for tri in &mesh.triangles {
        let pts = mesh.triangle_points(tri.id);
        let fill = color((u[tri.id] - lo) / range);
        out.push_str(&format!(
            "<polygon points=\"{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}\" fill=\"{fill}\" stroke=\"#777\" stroke-width=\"0.3\"/>\n",
            sx(pts[0].x), sy(pts[0].y), sx(pts[1].x), sy(pts[1].y), sx(pts[2].x), sy(pts[2].y)
        ));
    }
    out.push_str("</svg>\n");
    out
}

/// Log-log error-versus-h plot. Each series is a label plus (h, error) pairs;
/// the slope of the last segment is annotated at the curve's end.
pub fn loglog_plot(series: &[(String, Vec<(f64, f64)>)], title: &str) -> String {
    let (width, height, margin) = (640.0, 480.0, 60.0);
    let points: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|(_, pts)| pts.iter().filter(|(h, e)| *h > 0.0 && *e > 0.0))
        .map(|&(h, e)| (h.log10(), e.log10()))
        .collect();
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
    );
    out.push_str(&format!(
        "<text x=\"{margin}\" y=\"25\" font-family=\"sans-serif\" font-size=\"14\">{title}</text>\n"
    ));
    if points.is_empty() {
        out.push_str("<text x=\"50%\" y=\"50%\" font-family=\"sans-serif\">no data</text>\n</svg>\n");
        return out;
    }
    let (min_x, max_x) = points.iter().fold((f64::MAX, f64::MIN), |(a, b), p| (a.min(p.0), b.max(p.0)));
    let (min_y, max_y) = points.iter().fold((f64::MAX, f64::MIN), |(a, b), p| (a.min(p.1), b.max(p.1)));
    let (span_x, span_y) = ((max_x - min_x).max(1e-12), (max_y - min_y).max(1e-12));
    let sx = |x: f64| margin + (x - min_x) / span_x * (width - 2.0 * margin);
    let sy = |y: f64| height - margin - (y - min_y) / span_y * (height - 2.0 * margin);

    // Axes with decade tick labels.
    out.push_str(&format!(
        "<rect x=\"{margin}\" y=\"{margin}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
        width - 2.0 * margin,
        height - 2.0 * margin
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">log10 h in [{min_x:.2}, {max_x:.2}]</text>\n",
        margin,
        height - margin / 3.0
    ));
    out.push_str(&format!(
        "<text x=\"10\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 10 {})\">log10 error in [{min_y:.2}, {max_y:.2}]</text>\n",
        height / 2.0,
        height / 2.0
    ));

    let palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];
    for (i, (label, pts)) in series.iter().enumerate() {
        let pts: Vec<(f64, f64)> = pts
            .iter()
            .filter(|(h, e)| *h > 0.0 && *e > 0.0)
            .map(|&(h, e)| (h.log10(), e.log10()))
            .collect();
        if pts.is_empty() {
            continue;
        }
        let color = palette[i % palette.len()];
        let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        out.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
            path.join(" ")
        ));
        for &(x, y) in &pts {
            out.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{color}\"/>\n",
                sx(x),
                sy(y)
            ));
        }
        let slope = if pts.len() >= 2 {
            let (a, b) = (pts[pts.len() - 2], pts[pts.len() - 1]);
            (b.1 - a.1) / (b.0 - a.0)
        } else {
            f64::NAN
        };
        let last = pts[pts.len() - 1];
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"{color}\">{label} (slope {slope:.2})</text>\n",
            sx(last.0) + 6.0,
            sy(last.1) - 6.0
        ));
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_structured_mesh;

    #[test]
    fn heatmap_contains_all_cells() {
        let mesh = build_structured_mesh(2, 0.0, 0).unwrap();
        let u: Vec<f64> = (0..mesh.n_triangles()).map(|i| i as f64).collect();
        let svg = heatmap(&mesh, &u, "test");
        assert_eq!(svg.matches("<polygon").count(), mesh.n_triangles());
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn loglog_annotates_slope() {
        let series = vec![(
            "e_u".to_string(),
            vec![(0.25, 0.1), (0.125, 0.05), (0.0625, 0.025)],
        )];
        let svg = loglog_plot(&series, "convergence");
        assert!(svg.contains("slope 1.00"));
    }
}
