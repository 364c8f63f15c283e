//! Writes the sample meshes and problem files under `data/`.
//!
//! cargo run --release -p dcvortex --example generate_data [-- OUT_DIR]

use std::fs;
use std::path::PathBuf;

use dcvortex::fixtures;
use dcvortex::io::obj::write_obj;
use dcvortex::mesh::EmbeddedMesh;

fn nearest(mesh: &EmbeddedMesh, x: f64, y: f64) -> usize {
    (0..mesh.surface.vertex_count())
        .min_by(|&a, &b| {
            let d = |v: usize| (mesh.positions[v][0] - x).hypot(mesh.positions[v][1] - y);
            d(a).total_cmp(&d(b))
        })
        .unwrap()
}

fn main() -> std::io::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("data"));
    fs::create_dir_all(&out)?;
    let write =
        |name: &str, mesh: &EmbeddedMesh| -> std::io::Result<()> { write_obj(mesh, fs::File::create(out.join(name))?) };

    let disk = fixtures::disk(4.0, 25);
    write("disk.obj", &disk)?;
    let square = fixtures::square(1.0, 40);
    write("square.obj", &square)?;
    write("tetrahedron.obj", &fixtures::tetrahedron())?;
    write("icosphere.obj", &fixtures::icosphere(1))?;

    fs::write(
        out.join("taubes_single.json"),
        r#"{"mode": "vortex", "preset": "taubes", "vortices": [{"vertex": 0, "n": 1}], "boundary": "dirichlet_zero", "scale": 1.0}
"#,
    )?;
    let (a, b) = (nearest(&disk, -1.0, 0.0), nearest(&disk, 1.0, 0.0));
    fs::write(
        out.join("taubes_two_disk.json"),
        format!(
            "{{\"mode\": \"vortex\", \"preset\": \"taubes\", \"vortices\": [{{\"vertex\": {a}, \"n\": 1}}, {{\"vertex\": {b}, \"n\": 1}}]}}\n"
        ),
    )?;
    let (a, b) = (nearest(&square, -0.25, 0.0), nearest(&square, 0.25, 0.0));
    fs::write(
        out.join("taubes_two_square.json"),
        format!(
            "{{\"mode\": \"vortex\", \"preset\": \"taubes\", \"vortices\": [{{\"vertex\": {a}, \"n\": 1}}, {{\"vertex\": {b}, \"n\": 1}}]}}\n"
        ),
    )?;
    fs::write(
        out.join("identity_hyperbolic.json"),
        r#"{"mode": "mapping", "source_geometry": "hyperbolic", "target_geometry": "hyperbolic"}
"#,
    )?;
    Ok(())
}
