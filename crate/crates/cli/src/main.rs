//! `cloak`: scattering solves, differentials and invisibility continuation
//! driven by a TOML configuration.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cloak_core::fem::vtk::{lattice_csv, nodal_rho, structured_grid};
use cloak_core::invisibility::{
    continuation_run, legendre_seed, ontoness_diagnostic, select_relative_functional, FunctionalSpec,
};
use cloak_core::model::{propagating_mode_count, Direction, MaterialField, ModeBasis, ScatteringMatrix};
use cloak_core::oracles::slab_scattering_1d;
use cloak_core::scattering::{verify_structure, FieldBundle, Scatterer};
use cloak_core::{Error, Result};
use num_complex::Complex64;
use serde_json::{json, Value};

use config::{FunctionalChoice, RunConfig};

const OUTPUT_ENV: &str = "CLOAK_OUTPUT_DIR";
const DEFAULT_OUTPUT: &str = "cloak-output";

#[derive(Parser)]
#[command(name = "cloak", version, about = "Invisible obstacles in a 2D acoustic waveguide")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration
    #[arg(short, long)]
    config: PathBuf,
    /// Output directory (overrides CLOAK_OUTPUT_DIR)
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Number of propagating modes and the β_n table
    Modes {
        #[arg(long)]
        k: Option<f64>,
        #[arg(short, long)]
        config: Option<PathBuf>,
        /// Evanescent modes listed after the propagating ones
        #[arg(long, default_value_t = 2)]
        evanescent: usize,
    },
    /// S(ρ₀) as CSV and the total fields as VTK
    Scatter(RunArgs),
    /// dS(ρ₀)(μ) with a central finite-difference check
    Differential(RunArgs),
    /// Continuation run with per-step snapshots and a JSON log
    Cloak(RunArgs),
    /// Structure residuals and ontoness diagnostics at ρ₀
    Verify(RunArgs),
    /// Reflection and transmission of a 1D slab
    Oracle {
        #[arg(long)]
        k: f64,
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        b: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = exit_code(&e);
            eprintln!("{}", json!({ "error": e.kind(), "message": e.to_string(), "exit_code": code }));
            ExitCode::from(code)
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidConfig(_)
        | Error::Cutoff { .. }
        | Error::Resolution(_)
        | Error::Dimension(_)
        | Error::ZeroAreaCell { .. }
        | Error::Io(_) => 2,
        Error::Divergence(_) => 4,
        _ => 3,
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Modes { k, config, evanescent } => modes(k, config.as_deref(), evanescent),
        Command::Scatter(a) => scatter(&a),
        Command::Differential(a) => differential(&a),
        Command::Cloak(a) => cloak(&a),
        Command::Verify(a) => verify(&a),
        Command::Oracle { k, rho, a, b } => {
            let (r, t) = slab_scattering_1d(k, rho, a, b)?;
            print_json(&json!({ "k": k, "rho": rho, "a": a, "b": b, "r": complex(r), "t": complex(t) }));
            Ok(())
        }
    }
}

fn print_json(v: &Value) {
    use std::io::Write;
    // a closed pipe downstream is not an error for us
    let _ = writeln!(std::io::stdout().lock(), "{}", serde_json::to_string_pretty(v).expect("json"));
}

fn complex(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn matrix_json(s: &ScatteringMatrix) -> Value {
    let e = s.entries();
    Value::Array((0..e.nrows()).map(|i| Value::Array((0..e.ncols()).map(|j| complex(e[(i, j)])).collect())).collect())
}

fn output_dir(flag: Option<&Path>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUTPUT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT))
}

struct Context {
    config: RunConfig,
    scatterer: Scatterer,
    rho0: MaterialField,
    out: PathBuf,
}

impl Context {
    fn load(args: &RunArgs) -> Result<Self> {
        let config = RunConfig::load(&args.config)?;
        let scatterer = Scatterer::new(&config.waveguide(), config.discretization())?;
        let rho0 = config.rho0(scatterer.quadrature(), &scatterer.config().obstacle);
        let out = output_dir(args.output.as_deref());
        std::fs::create_dir_all(&out)?;
        Ok(Context { config, scatterer, rho0, out })
    }

    fn write(&self, name: &str, contents: &str) -> Result<()> {
        std::fs::write(self.out.join(name), contents)?;
        Ok(())
    }
}

fn field_name(n: usize, alpha: usize) -> String {
    if alpha < n { format!("u_plus_{alpha}") } else { format!("u_minus_{}", alpha - n) }
}

fn write_fields(ctx: &Context, bundle: &FieldBundle, prefix: &str) -> Result<()> {
    let mesh = bundle.mesh();
    let rho = nodal_rho(mesh, bundle.quadrature(), bundle.rho());
    for (alpha, f) in bundle.fields().iter().enumerate() {
        let name = format!("{prefix}{}", field_name(bundle.n(), alpha));
        let dir = if f.direction == Direction::Plus { "+" } else { "-" };
        let title = format!("total field mode {} direction {dir} k {}", f.mode, bundle.k());
        ctx.write(&format!("{name}.vtk"), &structured_grid(&title, mesh, &rho, &f.coeffs))?;
        ctx.write(&format!("{name}.csv"), &lattice_csv(mesh, &rho, &f.coeffs))?;
    }
    Ok(())
}

fn rho_csv(bundle: &FieldBundle, rho: &MaterialField) -> String {
    let quad = bundle.quadrature();
    let mut s = String::from("x,y,rho\n");
    for (q, p) in quad.points().iter().enumerate() {
        if quad.inside()[q] {
            s.push_str(&format!("{:.12e},{:.12e},{:.17e}\n", p[0], p[1], rho.values()[q]));
        }
    }
    s
}

fn modes(k: Option<f64>, config: Option<&Path>, evanescent: usize) -> Result<()> {
    let k = match (k, config) {
        (Some(k), _) => k,
        (None, Some(p)) => RunConfig::load(p)?.k,
        (None, None) => return Err(Error::InvalidConfig("modes needs --k or --config".into())),
    };
    let n = propagating_mode_count(k)?;
    let basis = ModeBasis::new(k)?;
    let table: Vec<Value> = (0..n + evanescent)
        .map(|m| json!({ "n": m, "beta": complex(basis.beta(m)), "propagating": m < n }))
        .collect();
    print_json(&json!({ "k": k, "N": n, "modes": table }));
    Ok(())
}

fn scatter(args: &RunArgs) -> Result<()> {
    let ctx = Context::load(args)?;
    let bundle = ctx.scatterer.scattering_matrix(&ctx.rho0)?;
    ctx.write("s.csv", &bundle.s().to_csv())?;
    ctx.write("s_trace.csv", &bundle.s_trace().to_csv())?;
    ctx.write("rho.csv", &rho_csv(&bundle, &ctx.rho0))?;
    write_fields(&ctx, &bundle, "")?;
    print_json(&json!({
        "k": bundle.k(),
        "N": bundle.n(),
        "s": matrix_json(bundle.s()),
        "symmetry": bundle.s().symmetry_residual(),
        "unitarity": bundle.s().unitarity_residual(),
        "extraction_mismatch": bundle.extraction_mismatch(),
        "output": ctx.out.display().to_string(),
    }));
    Ok(())
}

fn differential(args: &RunArgs) -> Result<()> {
    let ctx = Context::load(args)?;
    let p = &ctx.config.perturbation;
    if !(p.h > 0.0) {
        return Err(Error::InvalidConfig(format!("perturbation.h must be positive, got {}", p.h)));
    }
    let sc = &ctx.scatterer;
    let mu = legendre_seed(sc.quadrature(), &sc.config().obstacle, p.seed);
    let bundle = sc.scattering_matrix(&ctx.rho0)?;
    let ds = bundle.differential(&mu);
    let mut plus = ctx.rho0.clone();
    plus.axpy(p.h, &mu);
    let mut minus = ctx.rho0.clone();
    minus.axpy(-p.h, &mu);
    let sp = sc.scattering_matrix(&plus)?;
    let sm = sc.scattering_matrix(&minus)?;
    let fd = ScatteringMatrix::new(
        bundle.n(),
        (sp.s().entries() - sm.s().entries()) / Complex64::new(2.0 * p.h, 0.0),
    );
    ctx.write("ds.csv", &ds.to_csv())?;
    ctx.write("ds_fd.csv", &fd.to_csv())?;
    ctx.write("mu.csv", &rho_csv(&bundle, &mu))?;
    let scale = ds.entries().iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let err = ds.max_abs_diff(&fd);
    print_json(&json!({
        "h": p.h,
        "ds": matrix_json(&ds),
        "max_abs_error": err,
        "max_relative_error": if scale > 0.0 { err / scale } else { err },
        "output": ctx.out.display().to_string(),
    }));
    Ok(())
}

fn functional(ctx: &Context, s0: &ScatteringMatrix) -> Result<FunctionalSpec> {
    let c = &ctx.config.continuation;
    match c.choice()? {
        FunctionalChoice::AutoRelative => select_relative_functional(s0, c.selection_threshold),
        FunctionalChoice::Fixed(v) if v.is_relative() => FunctionalSpec::relative(v, s0),
        FunctionalChoice::Fixed(v) => FunctionalSpec::new(v, s0.n()),
    }
}

fn cloak(args: &RunArgs) -> Result<()> {
    let ctx = Context::load(args)?;
    let sc = &ctx.scatterer;
    let options = ctx.config.continuation.options()?;
    let partition = ctx.config.partition(sc.quadrature())?;
    let aleph = ctx.config.continuation.aleph;
    let b0 = sc.scattering_matrix(&ctx.rho0)?;
    let spec = functional(&ctx, b0.s())?;
    let run = continuation_run(sc, &ctx.rho0, &spec, aleph, &options, partition.as_ref())?;
    for (i, rho) in run.snapshots.iter().enumerate() {
        let n = i + 1;
        let b = if n == run.snapshots.len() { run.final_bundle().clone() } else { sc.scattering_matrix(rho)? };
        ctx.write(&format!("rho_step_{n}.csv"), &rho_csv(&b, rho))?;
        ctx.write(&format!("s_step_{n}.csv"), &b.s().to_csv())?;
        let mesh = b.mesh();
        let title = format!("step {n} rho and total field u_plus_0");
        ctx.write(
            &format!("rho_step_{n}.vtk"),
            &structured_grid(&title, mesh, &nodal_rho(mesh, b.quadrature(), rho), &b.fields()[0].coeffs),
        )?;
        if let Some(p) = &partition {
            ctx.write(&format!("cells_step_{n}.csv"), &p.cells_csv(rho, sc.quadrature()))?;
        }
    }
    // independent re-solve at the final snapshot
    let check = sc.scattering_matrix(run.final_rho())?;
    let f = spec.evaluate(check.s())?;
    let residual = f.iter().zip(&run.target).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let report = run.report(&spec, aleph);
    let log = json!({
        "k": sc.config().k,
        "N": sc.n(),
        "functional": spec.variant().name(),
        "partition_cells": partition.as_ref().map(|p| p.len()),
        "report": report,
        "ontoness": ontoness_diagnostic(&spec, &check),
        "final_check": {
            "f_residual": residual,
            "s": matrix_json(check.s()),
            "s0": matrix_json(b0.s()),
            "rho_norm_inf": run.final_rho().norm_inf(),
        },
    });
    ctx.write("run.json", &serde_json::to_string_pretty(&log).expect("json"))?;
    print_json(&json!({
        "accepted_steps": run.state.n,
        "requested_steps": aleph,
        "final_residual": residual,
        "output": ctx.out.display().to_string(),
    }));
    match run.aborted {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn verify(args: &RunArgs) -> Result<()> {
    let ctx = Context::load(args)?;
    let sc = &ctx.scatterer;
    let bundle = sc.scattering_matrix(&ctx.rho0)?;
    let probes: Vec<MaterialField> =
        (0..10).map(|i| legendre_seed(sc.quadrature(), &sc.config().obstacle, 1000 + i)).collect();
    let report = verify_structure(&bundle, &probes);
    let spec = functional(&ctx, bundle.s())?;
    let ontoness = ontoness_diagnostic(&spec, &bundle);
    let out = json!({
        "k": bundle.k(),
        "N": bundle.n(),
        "background_transparency": sc.raw_background().distance_to_transparent(),
        "structure": report,
        "functional": spec.variant().name(),
        "ontoness": ontoness,
    });
    ctx.write("verify.json", &serde_json::to_string_pretty(&out).expect("json"))?;
    print_json(&out);
    Ok(())
}
