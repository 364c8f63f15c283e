//! Command-line front end.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::geometry::{DiscreteMetric, Geometry};
use crate::io::contour::{default_levels, extract_contours};
use crate::io::obj::parse_obj;
use crate::io::output::SolutionFile;
use crate::io::problem::{parse_problem, ProblemFile};
use crate::io::svg::render_svg;
use crate::mesh::EmbeddedMesh;
use crate::solver::{solve, SolverOptions};
use crate::vortex::{build_problem, solve_problem};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "dcvortex",
    version,
    about = "Discrete conformal maps and vortex solutions on triangle meshes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a mesh and its edge lengths in a given geometry.
    Validate {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long, default_value = "euclidean")]
        geometry: Geometry,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
    },
    /// Solve a mapping (or vortex) problem and write solution.json/.csv.
    Solve {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long = "max-iter")]
        max_iter: Option<usize>,
    },
    /// Solve a vortex problem and also render level curves of e^u.
    Vortex {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 10)]
        levels: usize,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long = "max-iter")]
        max_iter: Option<usize>,
    },
    /// Render level curves of the Higgs amplitude from a solution file.
    Contour {
        #[arg(long)]
        solution: PathBuf,
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 10)]
        levels: usize,
    },
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load_mesh(path: &Path) -> Result<EmbeddedMesh, Failure> {
    parse_obj(&read(path)?).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn options(tol: Option<f64>, max_iter: Option<usize>) -> Result<SolverOptions, Failure> {
    let mut o = SolverOptions::default();
    if let Some(t) = tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(Failure(format!("--tol must be positive, got {t}")));
        }
        o.grad_tol = t;
    }
    if let Some(k) = max_iter {
        o.max_iterations = k;
    }
    Ok(o)
}

/// Parses `argv` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            EXIT_FAILURE
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32, Failure> {
    match cmd {
        Command::Validate { mesh, geometry, scale } => validate(&mesh, geometry, scale),
        Command::Solve {
            mesh,
            problem,
            out,
            tol,
            max_iter,
        } => solve_cmd(&mesh, &problem, &out, options(tol, max_iter)?, None),
        Command::Vortex {
            mesh,
            problem,
            out,
            levels,
            tol,
            max_iter,
        } => solve_cmd(&mesh, &problem, &out, options(tol, max_iter)?, Some(levels)),
        Command::Contour {
            solution,
            mesh,
            out,
            levels,
        } => contour(&solution, &mesh, &out, levels),
    }
}

fn validate(path: &Path, geometry: Geometry, scale: f64) -> Result<i32, Failure> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Failure(format!("--scale must be positive, got {scale}")));
    }
    let mesh = load_mesh(path)?;
    let s = &mesh.surface;
    println!("vertices: {}", s.vertex_count());
    println!("edges: {}", s.edge_count());
    println!("faces: {}", s.face_count());
    println!("euler characteristic: {}", s.euler_characteristic());
    println!("boundary loops: {}", s.boundary_loops().len());
    let lengths = mesh.edge_lengths().iter().map(|l| l * scale).collect();
    let metric = DiscreteMetric::new(s.clone(), geometry, lengths)?;
    let report = metric.validate();
    println!("geometry: {geometry}");
    if report.is_admissible() {
        println!("admissible: yes");
        if s.is_closed() {
            println!("gauss-bonnet residual: {:e}", metric.gauss_bonnet_residual()?);
        }
        Ok(EXIT_OK)
    } else {
        println!("admissible: no");
        print!("{report}");
        eprintln!("error: {} violation(s) in {geometry} geometry", report.violations.len());
        Ok(EXIT_FAILURE)
    }
}

fn solve_cmd(
    mesh_path: &Path,
    problem_path: &Path,
    out: &Path,
    opts: SolverOptions,
    contour_levels: Option<usize>,
) -> Result<i32, Failure> {
    let mesh = load_mesh(mesh_path)?;
    let file = parse_problem(&read(problem_path)?).map_err(|e| Failure(format!("{}: {e}", problem_path.display())))?;
    let (solution_file, converged) = match &file {
        ProblemFile::Vortex(input) => {
            let spec = input.to_spec()?;
            let vp = build_problem(mesh.surface.clone(), &mesh.edge_lengths(), &spec)?;
            let sol = solve_problem(&vp, &opts)?;
            eprintln!(
                "{}: N = {}, status {}, {} iterations, |grad| = {:e}",
                sol.kind,
                sol.total_vortex_number,
                sol.solution.status,
                sol.solution.iterations,
                sol.solution.final_grad_norm
            );
            (SolutionFile::from_vortex(&sol), sol.solution.converged())
        }
        ProblemFile::Mapping(input) => {
            if contour_levels.is_some() {
                return Err(Failure(
                    "`vortex` needs a problem file with \"mode\": \"vortex\"".into(),
                ));
            }
            let (problem, u0) = input.build(&mesh)?;
            let sol = solve(
                &problem,
                &u0,
                &SolverOptions {
                    gauge: input.gauge,
                    ..opts
                },
            )?;
            eprintln!(
                "mapping: status {}, {} iterations, |grad| = {:e}",
                sol.status, sol.iterations, sol.final_grad_norm
            );
            (SolutionFile::from_mapping(&problem, &sol), sol.converged())
        }
    };
    let (json, _) = solution_file.write_to_dir(out)?;
    println!("{}", json.display());
    if let Some(levels) = contour_levels {
        if mesh.is_planar() {
            let path = out.join("contours.svg");
            write_contours(&mesh, &solution_file, levels, &path)?;
            println!("{}", path.display());
        } else {
            eprintln!("note: mesh is not planar, no contour plot written");
        }
    }
    if converged {
        Ok(EXIT_OK)
    } else {
        eprintln!("error: solver status {}", solution_file.global.status);
        Ok(EXIT_FAILURE)
    }
}

fn write_contours(mesh: &EmbeddedMesh, sol: &SolutionFile, levels: usize, path: &Path) -> Result<(), Failure> {
    let field = sol.higgs_amplitude();
    let lv = default_levels(&field, levels);
    let set = extract_contours(mesh, &field, &lv)?;
    fs::write(path, render_svg(&set, mesh)).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    Ok(())
}

fn contour(solution: &Path, mesh_path: &Path, out: &Path, levels: usize) -> Result<i32, Failure> {
    let mesh = load_mesh(mesh_path)?;
    let sol = SolutionFile::from_json(&read(solution)?).map_err(|e| Failure(format!("{}: {e}", solution.display())))?;
    if sol.vertices.len() != mesh.surface.vertex_count() {
        return Err(Failure(format!(
            "solution has {} vertices, mesh has {}",
            sol.vertices.len(),
            mesh.surface.vertex_count()
        )));
    }
    write_contours(&mesh, &sol, levels, out)?;
    println!("{}", out.display());
    Ok(EXIT_OK)
}
