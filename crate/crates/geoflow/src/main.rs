//! Command-line driver: configured runs with CSV output, verification
//! suites, and the model catalog.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use geoflow::config::RunConfig;
use geoflow::integrate::integrate;
use geoflow::models::{ModelId, ModelState, CATALOG};
use geoflow::spectral1d::{hs_reconstruct, Spectrum1D};
use geoflow::spectral2d::Field2D;
use geoflow::verify;
use geoflow::TWO_PI;

#[derive(Parser)]
#[command(
    name = "geoflow",
    version,
    about = "Geodesic-flow equations of ideal continuum mechanics"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate a configured model; writes series.csv and snapshots.
    Run {
        config: PathBuf,
        /// Echo the parsed configuration and exit.
        #[arg(long)]
        dump_config: bool,
    },
    /// Run a verification suite: oracle, conservation, convergence,
    /// monitors or all.
    Verify { suite: String },
    /// Print the model catalog.
    ListModels,
}

fn main() -> ExitCode {
    match Cli::parse().cmd {
        Cmd::Run {
            config,
            dump_config,
        } => cmd_run(&config, dump_config),
        Cmd::Verify { suite } => cmd_verify(&suite),
        Cmd::ListModels => cmd_list_models(),
    }
}

fn fail(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(1)
}

fn cmd_run(path: &Path, dump_config: bool) -> ExitCode {
    let cfg = match RunConfig::from_path(path) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    if dump_config {
        print!("{}", cfg.to_toml());
        return ExitCode::SUCCESS;
    }
    let (spec, s0, stepper) = match cfg.build() {
        Ok(t) => t,
        Err(e) => return fail(e),
    };
    if let Err(e) = validate_fields(&cfg.output.fields, &s0) {
        return fail(e);
    }
    let dir = PathBuf::from(cfg.output.directory.as_deref().unwrap_or("."));
    if let Err(e) = std::fs::create_dir_all(&dir) {
        return fail(e);
    }
    let run = match integrate(&spec, &s0, &stepper) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let traj = &run.trajectory;
    if let Err(e) = write_series(&dir.join("series.csv"), traj) {
        return fail(e);
    }
    for (i, state) in traj.states.iter().enumerate() {
        for field in &cfg.output.fields {
            let name = format!("snapshot_t{:.4}_{}.csv", traj.times[i], field);
            if let Err(e) = write_snapshot(&dir.join(name), field, spec.id, state) {
                return fail(e);
            }
        }
    }
    match run.diverged_at {
        Some(t) => {
            eprintln!("blow-up detected at t = {t:.6}; partial output written");
            ExitCode::from(2)
        }
        None => ExitCode::SUCCESS,
    }
}

/// Snapshot field names available for a state shape.
fn field_names(s: &ModelState) -> &'static [&'static str] {
    match s {
        ModelState::Wave1 { .. } => &["u"],
        ModelState::Pair1 { .. } => &["u", "f"],
        ModelState::Vort2 { .. } => &["omega"],
        ModelState::VortScalar2 { .. } => &["omega", "scalar"],
        ModelState::VecPair2 { .. } => &["ux", "uy", "bx", "by"],
        ModelState::VecScalar2 { .. } => &["ux", "uy", "rho"],
        ModelState::Vec2 { .. } => &["ux", "uy"],
    }
}

fn validate_fields(fields: &[String], s: &ModelState) -> Result<(), String> {
    let legal = field_names(s);
    for f in fields {
        if !legal.contains(&f.as_str()) {
            return Err(format!(
                "unknown output field `{f}` (available: {})",
                legal.join(", ")
            ));
        }
    }
    Ok(())
}

/// RFC 4180: CRLF-terminated records, header row first.
fn write_csv(path: &Path, header: &str, rows: impl Iterator<Item = String>) -> std::io::Result<()> {
    let mut out = String::new();
    out.push_str(header);
    out.push_str("\r\n");
    for row in rows {
        out.push_str(&row);
        out.push_str("\r\n");
    }
    std::fs::write(path, out)
}

fn write_series(path: &Path, traj: &geoflow::integrate::Trajectory) -> std::io::Result<()> {
    let mut header = String::from("time,energy");
    for (name, _) in &traj.invariants[0] {
        write!(header, ",{name}").unwrap();
    }
    let rows = (0..traj.times.len()).map(|i| {
        let mut row = format!("{:.12e},{:.12e}", traj.times[i], traj.energies[i]);
        for (_, v) in &traj.invariants[i] {
            write!(row, ",{v:.12e}").unwrap();
        }
        row
    });
    write_csv(path, &header, rows)
}

fn spectrum_of<'a>(field: &str, s: &'a ModelState) -> Option<&'a Spectrum1D> {
    match (field, s) {
        ("u", ModelState::Wave1 { u }) | ("u", ModelState::Pair1 { u, .. }) => Some(u),
        ("f", ModelState::Pair1 { f, .. }) => Some(f),
        _ => None,
    }
}

fn plane_of(field: &str, s: &ModelState) -> Option<(Field2D, f64)> {
    let from_vec = |v: &geoflow::spectral2d::VecField2D, comp: usize| {
        if comp == 0 {
            (v.x.clone(), v.mean[0])
        } else {
            (v.y.clone(), v.mean[1])
        }
    };
    match (field, s) {
        ("omega", ModelState::Vort2 { omega, .. })
        | ("omega", ModelState::VortScalar2 { omega, .. }) => Some((omega.clone(), 0.0)),
        ("scalar", ModelState::VortScalar2 { scalar, .. }) => Some((scalar.clone(), 0.0)),
        ("rho", ModelState::VecScalar2 { rho, .. }) => Some((rho.clone(), 0.0)),
        ("ux", ModelState::VecPair2 { u, .. })
        | ("ux", ModelState::VecScalar2 { u, .. })
        | ("ux", ModelState::Vec2 { u }) => Some(from_vec(u, 0)),
        ("uy", ModelState::VecPair2 { u, .. })
        | ("uy", ModelState::VecScalar2 { u, .. })
        | ("uy", ModelState::Vec2 { u }) => Some(from_vec(u, 1)),
        ("bx", ModelState::VecPair2 { b, .. }) => Some(from_vec(b, 0)),
        ("by", ModelState::VecPair2 { b, .. }) => Some(from_vec(b, 1)),
        _ => None,
    }
}

fn write_snapshot(
    path: &Path,
    field: &str,
    id: ModelId,
    s: &ModelState,
) -> std::io::Result<()> {
    // Hunter-Saxton stores v = u''; dump the reconstructed velocity.
    let hs_u;
    let s = if let (ModelId::HunterSaxton, ModelState::Wave1 { u }) = (id, s) {
        hs_u = ModelState::Wave1 {
            u: hs_reconstruct(u),
        };
        &hs_u
    } else {
        s
    };
    if let Some(u) = spectrum_of(field, s) {
        let m = u.grid_len();
        let vals = u.sample(m);
        let rows = (0..m).map(|j| {
            format!("{:.12e},{:.12e}", TWO_PI * j as f64 / m as f64, vals[j])
        });
        return write_csv(path, &format!("x,{field}"), rows);
    }
    if let Some((f, mean)) = plane_of(field, s) {
        let (nx, ny) = f.shape();
        let vals = f.sample();
        let rows = (0..nx * ny).map(|idx| {
            let (i, j) = (idx % nx, idx / nx);
            format!(
                "{:.12e},{:.12e},{:.12e}",
                TWO_PI * i as f64 / nx as f64,
                TWO_PI * j as f64 / ny as f64,
                vals[idx] + mean
            )
        });
        return write_csv(path, &format!("x,y,{field}"), rows);
    }
    unreachable!("fields validated before the run")
}

fn cmd_verify(suite: &str) -> ExitCode {
    match verify::run_suite(suite) {
        Ok(checks) => {
            print!("{}", verify::render(&checks));
            if checks.iter().all(|c| c.pass) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => fail(e),
    }
}

fn cmd_list_models() -> ExitCode {
    for id in CATALOG {
        let params = id.parameters();
        println!("{}", id.name());
        println!("    state:  {}", id.state_shape());
        println!("    form:   {}", id.structure());
        println!(
            "    params: {}",
            if params.is_empty() {
                "none".to_string()
            } else {
                params.join(", ")
            }
        );
    }
    ExitCode::SUCCESS
}
