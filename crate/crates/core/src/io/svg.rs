//! Standalone SVG rendering of level curves over a planar mesh outline.

use std::fmt::Write as _;
use std::io::{self, Write};

use crate::io::contour::ContourSet;
use crate::mesh::EmbeddedMesh;

fn fmt(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

/// Boundary loops of the mesh as point lists.
pub fn mesh_outline(mesh: &EmbeddedMesh) -> Vec<Vec<[f64; 2]>> {
    mesh.surface
        .boundary_loops()
        .into_iter()
        .map(|lp| lp.into_iter().map(|v| mesh.xy(v)).collect())
        .collect()
}

/// Renders `contours` over `outline`. The viewBox covers the mesh with a 5%
/// margin; `y` points up.
pub fn render_svg(contours: &ContourSet, mesh: &EmbeddedMesh) -> String {
    let outline = mesh_outline(mesh);
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for v in 0..mesh.surface.vertex_count() {
        let [x, y] = mesh.xy(v);
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let extent = (x1 - x0).max(y1 - y0).max(f64::MIN_POSITIVE);
    let margin = 0.05 * extent;
    let (w, h) = (x1 - x0 + 2.0 * margin, y1 - y0 + 2.0 * margin);
    let stroke = extent / 400.0;

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="800" height="{}">"#,
        fmt(x0 - margin),
        fmt(-y1 - margin),
        fmt(w),
        fmt(h),
        (800.0 * h / w).round() as i64
    );
    let _ = writeln!(
        out,
        r#"<rect x="{}" y="{}" width="{}" height="{}" fill="white"/>"#,
        fmt(x0 - margin),
        fmt(-y1 - margin),
        fmt(w),
        fmt(h)
    );
    let _ = writeln!(
        out,
        r##"<g fill="none" stroke="#b0b0b0" stroke-width="{}">"##,
        fmt(2.0 * stroke)
    );
    for lp in &outline {
        let _ = writeln!(out, r#"<path d="{}"/>"#, path_data(lp, true));
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(
        out,
        r##"<g fill="none" stroke="#1f3b73" stroke-width="{}" stroke-linejoin="round">"##,
        fmt(stroke)
    );
    for (level, lines) in contours.levels.iter().zip(&contours.lines) {
        for line in lines {
            let _ = writeln!(
                out,
                r#"<path data-level="{}" d="{}"/>"#,
                fmt(*level),
                path_data(&line.points, line.closed)
            );
        }
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, "</svg>");
    out
}

fn path_data(points: &[[f64; 2]], closed: bool) -> String {
    let mut d = String::new();
    for (k, p) in points.iter().enumerate() {
        let _ = write!(d, "{}{} {}", if k == 0 { "M" } else { " L" }, fmt(p[0]), fmt(-p[1]));
    }
    if closed {
        d.push_str(" Z");
    }
    d
}

pub fn write_svg<W: Write>(contours: &ContourSet, mesh: &EmbeddedMesh, mut w: W) -> io::Result<()> {
    w.write_all(render_svg(contours, mesh).as_bytes())
}
