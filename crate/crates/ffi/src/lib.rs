//! C ABI for `dcvortex`.
//!
//! Meshes and solutions are opaque handles created by `dcv_*` constructors
//! and released with the matching `*_free`. Every fallible call returns a
//! `DcvStatus`; on failure a message is available from
//! `dcv_last_error_message` until the next failing call on the same thread.
//! Panics are caught at the boundary and reported as `DCV_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::sync::Arc;

use dcvortex::io::contour::{default_levels, extract_contours};
use dcvortex::io::obj::parse_obj;
use dcvortex::io::output::SolutionFile;
use dcvortex::io::problem::{parse_problem, ProblemFile};
use dcvortex::io::svg::render_svg;
use dcvortex::mesh::EmbeddedMesh;
use dcvortex::solver::{solve, SolveStatus, SolverOptions};
use dcvortex::surface::TriangulatedSurface;
use dcvortex::vortex::{self, VortexCenter, VortexKind, VortexSpec};

#[repr(C)]
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum DcvStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Malformed OBJ, JSON or UTF-8 input.
    Parse = 3,
    /// Non-manifold or otherwise invalid triangulation.
    InvalidMesh = 4,
    /// Problem could not be set up (bad vertices, excluded constants,
    /// inadmissible source metric, ...).
    Problem = 5,
    BufferTooSmall = 6,
    Io = 7,
    Panic = 8,
}

/// Outcome of a Newton solve, mirroring the library status.
#[repr(C)]
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum DcvSolveStatus {
    Converged = 0,
    MaxIter = 1,
    InfeasibleStart = 2,
    LineSearchStall = 3,
}

impl From<SolveStatus> for DcvSolveStatus {
    fn from(s: SolveStatus) -> Self {
        match s {
            SolveStatus::Converged => DcvSolveStatus::Converged,
            SolveStatus::MaxIter => DcvSolveStatus::MaxIter,
            SolveStatus::InfeasibleStart => DcvSolveStatus::InfeasibleStart,
            SolveStatus::LineSearchStall => DcvSolveStatus::LineSearchStall,
        }
    }
}

#[repr(C)]
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct DcvSolverOptions {
    pub grad_tol: f64,
    pub max_iterations: u32,
}

/// Opaque triangle mesh with vertex positions.
pub struct DcvMesh {
    inner: EmbeddedMesh,
}

/// Opaque solver result.
pub struct DcvSolution {
    inner: SolutionFile,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Failure(DcvStatus, String);

fn fail(status: DcvStatus, msg: impl ToString) -> Failure {
    Failure(status, msg.to_string())
}

/// Runs `f`, turning errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> DcvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DcvStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            DcvStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(fail(DcvStatus::NullPointer, format!("`{name}` is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(DcvStatus::Parse, format!("`{name}` is not valid UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| fail(DcvStatus::NullPointer, format!("`{name}` is null")))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, name: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(DcvStatus::NullPointer, format!("`{name}` is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn out_arg<T>(p: *mut T, name: &str) -> Result<&'static mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| fail(DcvStatus::NullPointer, format!("`{name}` is null")))
}

fn options(opts: Option<&DcvSolverOptions>) -> Result<SolverOptions, Failure> {
    let mut o = SolverOptions::default();
    if let Some(c) = opts {
        if !(c.grad_tol.is_finite() && c.grad_tol > 0.0) {
            return Err(fail(DcvStatus::InvalidArgument, "grad_tol must be positive"));
        }
        o.grad_tol = c.grad_tol;
        o.max_iterations = c.max_iterations as usize;
    }
    Ok(o)
}

/// Copies `bytes` plus a NUL terminator into `buf`. `needed` (optional)
/// receives the required capacity including the terminator.
unsafe fn write_string(bytes: &[u8], buf: *mut c_char, capacity: usize, needed: *mut usize) -> Result<(), Failure> {
    if let Some(n) = needed.as_mut() {
        *n = bytes.len() + 1;
    }
    if buf.is_null() {
        return if capacity == 0 {
            Ok(())
        } else {
            Err(fail(DcvStatus::NullPointer, "`buf` is null"))
        };
    }
    if capacity < bytes.len() + 1 {
        return Err(fail(
            DcvStatus::BufferTooSmall,
            format!("buffer holds {capacity} bytes, {} needed", bytes.len() + 1),
        ));
    }
    ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, bytes.len());
    *buf.add(bytes.len()) = 0;
    Ok(())
}

// ---------------------------------------------------------------------------

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dcv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dcv_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[no_mangle]
pub extern "C" fn dcv_solver_options_default() -> DcvSolverOptions {
    let o = SolverOptions::default();
    DcvSolverOptions {
        grad_tol: o.grad_tol,
        max_iterations: o.max_iterations as u32,
    }
}

/// Milnor's Lobachevsky function.
#[no_mangle]
pub extern "C" fn dcv_lobachevsky(x: f64) -> f64 {
    dcvortex::lobachevsky(x)
}

// ---------------------------------------------------------------------------
// Meshes

/// Parses an OBJ document of `len` bytes.
///
/// # Safety
/// `data` must point to `len` readable bytes and `out` to writable storage
/// for one pointer.
#[no_mangle]
pub unsafe extern "C" fn dcv_mesh_from_obj(data: *const u8, len: usize, out: *mut *mut DcvMesh) -> DcvStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let bytes = slice_arg(data, len, "data")?;
        let mesh = parse_obj(bytes).map_err(|e| fail(DcvStatus::Parse, e))?;
        *out = Box::into_raw(Box::new(DcvMesh { inner: mesh }));
        Ok(())
    })
}

/// Reads an OBJ file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dcv_mesh_load_obj(path: *const c_char, out: *mut *mut DcvMesh) -> DcvStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let path = str_arg(path, "path")?;
        let bytes = std::fs::read(path).map_err(|e| fail(DcvStatus::Io, format!("{path}: {e}")))?;
        let mesh = parse_obj(&bytes).map_err(|e| fail(DcvStatus::Parse, format!("{path}: {e}")))?;
        *out = Box::into_raw(Box::new(DcvMesh { inner: mesh }));
        Ok(())
    })
}

/// Builds a mesh from `3 * vertex_count` coordinates and `3 * face_count`
/// zero-based vertex indices.
///
/// # Safety
/// The arrays must have the stated lengths and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dcv_mesh_from_arrays(
    positions: *const f64,
    vertex_count: usize,
    faces: *const u32,
    face_count: usize,
    out: *mut *mut DcvMesh,
) -> DcvStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let pos = slice_arg(positions, 3 * vertex_count, "positions")?;
        let idx = slice_arg(faces, 3 * face_count, "faces")?;
        if pos.iter().any(|x| !x.is_finite()) {
            return Err(fail(DcvStatus::InvalidArgument, "non-finite vertex coordinate"));
        }
        let faces = idx
            .chunks_exact(3)
            .map(|f| [f[0] as usize, f[1] as usize, f[2] as usize])
            .collect();
        let surface = TriangulatedSurface::new(vertex_count, faces).map_err(|e| fail(DcvStatus::InvalidMesh, e))?;
        let positions = pos.chunks_exact(3).map(|p| [p[0], p[1], p[2]]).collect();
        *out = Box::into_raw(Box::new(DcvMesh {
            inner: EmbeddedMesh::new(Arc::new(surface), positions),
        }));
        Ok(())
    })
}

/// # Safety
/// `mesh` must be NULL or a handle from a `dcv_mesh_*` constructor that has
/// not been freed.
#[no_mangle]
pub unsafe extern "C" fn dcv_mesh_free(mesh: *mut DcvMesh) {
    if !mesh.is_null() {
        drop(Box::from_raw(mesh));
    }
}

/// Number of vertices, or 0 for a NULL handle.
///
/// # Safety
/// `mesh` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dcv_mesh_vertex_count(mesh: *const DcvMesh) -> usize {
    mesh.as_ref().map_or(0, |m| m.inner.surface.vertex_count())
}

/// # Safety
/// `mesh` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dcv_mesh_face_count(mesh: *const DcvMesh) -> usize {
    mesh.as_ref().map_or(0, |m| m.inner.surface.face_count())
}

/// # Safety
/// `mesh` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dcv_mesh_edge_count(mesh: *const DcvMesh) -> usize {
    mesh.as_ref().map_or(0, |m| m.inner.surface.edge_count())
}

/// # Safety
/// `mesh` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dcv_mesh_euler_characteristic(mesh: *const DcvMesh) -> i64 {
    mesh.as_ref().map_or(0, |m| m.inner.surface.euler_characteristic())
}

// ---------------------------------------------------------------------------
// Solving

fn solve_file(mesh: &EmbeddedMesh, file: &ProblemFile, opts: SolverOptions) -> Result<SolutionFile, Failure> {
    let problem = |e: &dyn std::fmt::Display| fail(DcvStatus::Problem, e);
    match file {
        ProblemFile::Vortex(input) => {
            let spec = input.to_spec().map_err(|e| problem(&e))?;
            let sol = vortex::run(mesh.surface.clone(), &mesh.edge_lengths(), &spec, &opts).map_err(|e| problem(&e))?;
            Ok(SolutionFile::from_vortex(&sol))
        }
        ProblemFile::Mapping(input) => {
            let (p, u0) = input.build(mesh).map_err(|e| problem(&e))?;
            let sol = solve(
                &p,
                &u0,
                &SolverOptions {
                    gauge: input.gauge,
                    ..opts
                },
            )
            .map_err(|e| problem(&e))?;
            Ok(SolutionFile::from_mapping(&p, &sol))
        }
    }
}

/// Solves a problem given as a JSON document (vortex or mapping mode).
/// A solve that stops without converging still returns `DCV_STATUS_OK`;
/// query `dcv_solution_status`.
///
/// # Safety
/// `mesh` must be a live handle, `problem_json` a NUL-terminated string,
/// `options` NULL (defaults) or valid, and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dcv_solve_json(
    mesh: *const DcvMesh,
    problem_json: *const c_char,
    options: *const DcvSolverOptions,
    out: *mut *mut DcvSolution,
) -> DcvStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let mesh = ref_arg(mesh, "mesh")?;
        let text = str_arg(problem_json, "problem_json")?;
        let file = parse_problem(text.as_bytes()).map_err(|e| fail(DcvStatus::Parse, e))?;
        let sol = solve_file(&mesh.inner, &file, self::options(options.as_ref())?)?;
        *out = Box::into_raw(Box::new(DcvSolution { inner: sol }));
        Ok(())
    })
}

/// Solves a vortex problem with the named preset (`"taubes"`, `"bradlow"`,
/// `"ambjorn-olesen"`, `"jackiw-pi"`, `"popov"`), `count` centers at
/// `vertices` with multiplicities `multiplicities`, boundary pinned at zero.
///
/// # Safety
/// `preset` must be a NUL-terminated string, both arrays must hold `count`
/// entries, `options` NULL or valid, and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dcv_vortex_solve(
    mesh: *const DcvMesh,
    preset: *const c_char,
    vertices: *const usize,
    multiplicities: *const u32,
    count: usize,
    length_scale: f64,
    options: *const DcvSolverOptions,
    out: *mut *mut DcvSolution,
) -> DcvStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let mesh = &ref_arg(mesh, "mesh")?.inner;
        let kind: VortexKind = str_arg(preset, "preset")?
            .parse()
            .map_err(|e| fail(DcvStatus::InvalidArgument, e))?;
        let vs = slice_arg(vertices, count, "vertices")?;
        let ns = slice_arg(multiplicities, count, "multiplicities")?;
        let centers = vs
            .iter()
            .zip(ns)
            .map(|(&vertex, &n)| VortexCenter { vertex, n })
            .collect();
        let mut spec = VortexSpec::new(kind, centers);
        spec.length_scale = length_scale;
        let sol = vortex::run(
            mesh.surface.clone(),
            &mesh.edge_lengths(),
            &spec,
            &self::options(options.as_ref())?,
        )
        .map_err(|e| fail(DcvStatus::Problem, e))?;
        *out = Box::into_raw(Box::new(DcvSolution {
            inner: SolutionFile::from_vortex(&sol),
        }));
        Ok(())
    })
}

/// # Safety
/// `solution` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dcv_solution_free(solution: *mut DcvSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// # Safety
/// `solution` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dcv_solution_status(solution: *const DcvSolution, out: *mut DcvSolveStatus) -> DcvStatus {
    guard(|| {
        *out_arg(out, "out")? = ref_arg(solution, "solution")?.inner.global.status.into();
        Ok(())
    })
}

/// Newton iterations taken, or 0 for a NULL handle.
///
/// # Safety
/// `solution` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dcv_solution_iterations(solution: *const DcvSolution) -> usize {
    solution.as_ref().map_or(0, |s| s.inner.global.iterations)
}

/// Max-norm of the final gradient; NaN for a NULL handle or an infeasible start.
///
/// # Safety
/// `solution` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dcv_solution_grad_norm(solution: *const DcvSolution) -> f64 {
    solution.as_ref().map_or(f64::NAN, |s| s.inner.global.final_grad_norm)
}

/// # Safety
/// `solution` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dcv_solution_vertex_count(solution: *const DcvSolution) -> usize {
    solution.as_ref().map_or(0, |s| s.inner.vertices.len())
}

unsafe fn copy_field(
    solution: *const DcvSolution,
    out: *mut f64,
    len: usize,
    field: impl Fn(&SolutionFile) -> Vec<f64>,
) -> DcvStatus {
    guard(|| {
        let values = field(&ref_arg(solution, "solution")?.inner);
        if len < values.len() {
            return Err(fail(
                DcvStatus::BufferTooSmall,
                format!("buffer holds {len} values, {} needed", values.len()),
            ));
        }
        if out.is_null() {
            return Err(fail(DcvStatus::NullPointer, "`out` is null"));
        }
        ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
        Ok(())
    })
}

/// Copies the scale factors `u` (one per vertex) into `out`.
///
/// # Safety
/// `solution` must be a live handle and `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn dcv_solution_u(solution: *const DcvSolution, out: *mut f64, len: usize) -> DcvStatus {
    copy_field(solution, out, len, SolutionFile::u)
}

/// Copies the Higgs amplitude `e^u` (one per vertex) into `out`.
///
/// # Safety
/// `solution` must be a live handle and `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn dcv_solution_higgs_amplitude(
    solution: *const DcvSolution,
    out: *mut f64,
    len: usize,
) -> DcvStatus {
    copy_field(solution, out, len, SolutionFile::higgs_amplitude)
}

/// Writes the solution JSON into `buf`. Call with `buf = NULL` and
/// `capacity = 0` to learn the size through `needed`.
///
/// # Safety
/// `solution` must be a live handle, `buf` NULL or writable for `capacity`
/// bytes, and `needed` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn dcv_solution_to_json(
    solution: *const DcvSolution,
    buf: *mut c_char,
    capacity: usize,
    needed: *mut usize,
) -> DcvStatus {
    guard(|| {
        let json = ref_arg(solution, "solution")?.inner.to_json();
        write_string(json.as_bytes(), buf, capacity, needed)
    })
}

/// Writes `solution.json` and `solution.csv` into the directory `dir`.
///
/// # Safety
/// `solution` must be a live handle and `dir` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn dcv_solution_write(solution: *const DcvSolution, dir: *const c_char) -> DcvStatus {
    guard(|| {
        let sol = ref_arg(solution, "solution")?;
        let dir = str_arg(dir, "dir")?;
        sol.inner
            .write_to_dir(Path::new(dir))
            .map_err(|e| fail(DcvStatus::Io, format!("{dir}: {e}")))?;
        Ok(())
    })
}

/// Renders `levels` level curves of `e^u` over a planar mesh as SVG.
/// Sizing works as in `dcv_solution_to_json`.
///
/// # Safety
/// Handles must be live, `buf` NULL or writable for `capacity` bytes, and
/// `needed` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn dcv_contours_svg(
    mesh: *const DcvMesh,
    solution: *const DcvSolution,
    levels: usize,
    buf: *mut c_char,
    capacity: usize,
    needed: *mut usize,
) -> DcvStatus {
    guard(|| {
        let mesh = &ref_arg(mesh, "mesh")?.inner;
        let sol = &ref_arg(solution, "solution")?.inner;
        if sol.vertices.len() != mesh.surface.vertex_count() {
            return Err(fail(
                DcvStatus::InvalidArgument,
                "solution and mesh differ in vertex count",
            ));
        }
        let field = sol.higgs_amplitude();
        let set = extract_contours(mesh, &field, &default_levels(&field, levels))
            .map_err(|e| fail(DcvStatus::InvalidArgument, e))?;
        write_string(render_svg(&set, mesh).as_bytes(), buf, capacity, needed)
    })
}
