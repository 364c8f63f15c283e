use dcvortex::fixtures;
use dcvortex::io::contour::{default_levels, extract_contours};
use dcvortex::io::obj::{parse_obj, write_obj};
use dcvortex::io::output::SolutionFile;
use dcvortex::io::svg::render_svg;
use dcvortex::solver::SolverOptions;
use dcvortex::vortex::{self, VortexCenter, VortexKind, VortexSpec};

#[test]
fn generated_meshes_survive_obj() {
    for mesh in [
        fixtures::disk(4.0, 6),
        fixtures::square(1.0, 6),
        fixtures::icosphere(2),
        fixtures::torus(6, 8, 2.0, 0.5),
    ] {
        let mut buf = Vec::new();
        write_obj(&mesh, &mut buf).unwrap();
        let back = parse_obj(&buf).unwrap();
        assert_eq!(back.surface.faces(), mesh.surface.faces());
        assert_eq!(back.positions, mesh.positions);
        assert_eq!(back.surface.euler_characteristic(), mesh.surface.euler_characteristic());
    }
}

#[test]
fn linear_field_has_straight_contours() {
    let mesh = fixtures::square(2.0, 8);
    let field: Vec<f64> = (0..mesh.surface.vertex_count()).map(|v| mesh.xy(v)[0]).collect();
    let levels = [-0.55, 0.0, 0.3];
    let set = extract_contours(&mesh, &field, &levels).unwrap();
    for (k, lines) in set.lines.iter().enumerate() {
        assert_eq!(lines.len(), 1, "level {}", levels[k]);
        let line = &lines[0];
        assert!(!line.closed);
        assert!(line.points.iter().all(|p| (p[0] - levels[k]).abs() < 1e-12));
        // spans the square from bottom to top
        let ys: Vec<f64> = line.points.iter().map(|p| p[1]).collect();
        let (lo, hi) = ys.iter().fold((f64::MAX, f64::MIN), |(a, b), &y| (a.min(y), b.max(y)));
        assert!((lo + 1.0).abs() < 1e-12 && (hi - 1.0).abs() < 1e-12);
    }
}

#[test]
fn vortex_contours_are_closed_loops() {
    let mesh = fixtures::disk(4.0, 12);
    let spec = VortexSpec::new(VortexKind::Taubes, vec![VortexCenter { vertex: 0, n: 1 }]);
    let sol = vortex::run(
        mesh.surface.clone(),
        &mesh.edge_lengths(),
        &spec,
        &SolverOptions::default(),
    )
    .unwrap();
    let levels = default_levels(&sol.higgs_amplitude, 6);
    let set = extract_contours(&mesh, &sol.higgs_amplitude, &levels).unwrap();
    for lines in &set.lines {
        assert_eq!(lines.len(), 1);
        assert!(lines[0].closed);
    }
    let svg = render_svg(&set, &mesh);
    assert_eq!(svg.matches("data-level=").count(), 6);
}

#[test]
fn solution_json_round_trips_exactly() {
    let mesh = fixtures::disk(4.0, 6);
    let spec = VortexSpec::new(VortexKind::Bradlow, vec![VortexCenter { vertex: 0, n: 2 }]);
    let sol = vortex::run(
        mesh.surface.clone(),
        &mesh.edge_lengths(),
        &spec,
        &SolverOptions::default(),
    )
    .unwrap();
    let file = SolutionFile::from_vortex(&sol);
    let back = SolutionFile::from_json(file.to_json().as_bytes()).unwrap();
    assert_eq!(back, file);
    assert_eq!(back.global.total_vortex_number, Some(2));
    assert!(back.u().iter().zip(sol.u()).all(|(a, b)| a.to_bits() == b.to_bits()));
}
