//! Command-line front end: JSON file IO, command dispatch, report and plot
//! emission.
//!
//! Every command is a pure function of its input files and flags; reports are
//! rendered canonically (sorted keys, floats at 12 significant digits) so
//! reruns are byte-identical. Exit code 0 means every verification in the
//! invoked pipeline passed, 1 is a verification failure (the report carries
//! the witness), 2 is a usage or input error.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::asdim::{
    colored_to_plain, promote_refiner, reduce_dimension, search_refinement, verify_ostrand,
    RefinerOracle,
};
use crate::cover::{brick_cover_grid, brick_cover_line, Cover};
use crate::extension::{
    check_lipschitz, mcshane_extend, refine_via_extension, simplex_extend, sphere_extend,
    SphereExtender,
};
use crate::io::{
    self, cover_to_value, function_to_value, leb_value_json, load_cover, load_function,
    load_space, render_report, space_to_value, write_text, LoadedCover, LoadedFunction,
};
use crate::metric::FiniteMetricSpace;
use crate::nerve::{barycentric_map, nerve_of};
use crate::oscillation::{
    annulus_extend, continuity_check, oscillation_witness, squares_instance, variation_profile,
    BoundedExtender,
};
use crate::plot::{cover_svg, profile_svg};

/// Outcome of one CLI invocation.
#[derive(Debug)]
pub struct CommandResult {
    pub exit_code: i32,
    pub report: Value,
    pub artifacts: Vec<PathBuf>,
}

enum CliErr {
    /// Bad flags or unreadable/invalid input: exit 2.
    Usage(String),
    /// A pipeline verification failed: exit 1, report carries the witness.
    Pipeline(String),
}

impl From<io::IoError> for CliErr {
    fn from(e: io::IoError) -> Self {
        CliErr::Usage(e.to_string())
    }
}

macro_rules! pipeline_err {
    ($($ty:ty),*) => {$(
        impl From<$ty> for CliErr {
            fn from(e: $ty) -> Self {
                CliErr::Pipeline(e.to_string())
            }
        }
    )*};
}
pipeline_err!(
    crate::cover::CoverError,
    crate::extension::ExtensionError,
    crate::asdim::AsdimError,
    crate::oscillation::OscillationError,
    crate::nerve::NerveError,
    crate::function::FunctionError,
    crate::metric::MetricError
);

#[derive(Parser)]
#[command(name = "coarse-ext", version, about = "Cover statistics and verified extension algorithms on finite metric spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct IoArgs {
    /// Space file (JSON)
    #[arg(long)]
    space: Option<PathBuf>,
    /// Cover file (JSON)
    #[arg(long)]
    cover: Option<PathBuf>,
    /// Function file (JSON)
    #[arg(long)]
    function: Option<PathBuf>,
    /// Parameters: path to a JSON file, or inline JSON starting with '{'
    #[arg(long)]
    params: Option<String>,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit an SVG diagram here
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Args)]
struct CounterexampleArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Largest integer whose square enters the instance
    #[arg(long)]
    nmax: usize,
    /// Built-in extender: "linear" or "nearest"
    #[arg(long)]
    extender: String,
    /// Required image gap
    #[arg(long)]
    epsilon: f64,
    /// Pair distance bound
    #[arg(long)]
    radius: f64,
    /// Both witness points must sit at least this far from the basepoint
    #[arg(long)]
    beyond: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Lebesgue number of a cover, with the critical point
    Leb(IoArgs),
    /// Multiplicity and dimension of a cover
    Mult(IoArgs),
    /// Mesh (largest member diameter) of a cover
    Mesh(IoArgs),
    /// Nerve complex of a cover
    Nerve(IoArgs),
    /// Barycentric map of a cover, with its Lipschitz bound
    Barymap(IoArgs),
    /// Largest Lipschitz extension of scalar data
    Mcshane(IoArgs),
    /// Simplex-valued extension with constant (m+2) lambda
    #[command(name = "simplex-extend")]
    SimplexExtend(IoArgs),
    /// Boundary-valued extension pipeline with certified bounds
    #[command(name = "sphere-extend")]
    SphereExtend(IoArgs),
    /// Refine a cover through a boundary-valued extension
    #[command(name = "refine-via-extension")]
    RefineViaExtension(IoArgs),
    /// Promote a refiner to one more cover member and apply it
    Promote(IoArgs),
    /// Reduce cover dimension through a colored cover
    #[command(name = "reduce-dim")]
    ReduceDim(IoArgs),
    /// Verify an r-disjoint-family witness
    #[command(name = "ostrand-verify")]
    OstrandVerify(IoArgs),
    /// Generate a verified brick witness on a line or grid window
    Brick(IoArgs),
    /// Search for a refinement with multiplicity and Lebesgue targets
    #[command(name = "search-refine")]
    SearchRefine(IoArgs),
    /// Variation profile of a function over basepoint annuli
    #[command(name = "so-profile")]
    SoProfile(IoArgs),
    /// Witness pairs against extensions of the squares instance
    Counterexample(CounterexampleArgs),
    /// Exhaustive affine-Lipschitz check
    #[command(name = "check-lip")]
    CheckLip(IoArgs),
    /// Extend partial data by annulus pasting
    #[command(name = "annulus-extend")]
    AnnulusExtend(IoArgs),
}

/// Parses and runs a command line (without the program name). Writes `--out`
/// and `--plot` artifacts; the report also comes back in the result.
pub fn run<I>(args: I) -> CommandResult
where
    I: IntoIterator,
    I::Item: Into<std::ffi::OsString> + Clone,
{
    let mut argv: Vec<std::ffi::OsString> = vec!["coarse-ext".into()];
    argv.extend(args.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap help/version are not errors
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            eprint!("{e}");
            return CommandResult { exit_code: code, report: Value::Null, artifacts: vec![] };
        }
    };
    let io_args = io_args_of(&cli.command).clone();
    match dispatch(cli.command) {
        Ok((report, code)) => {
            let mut artifacts = Vec::new();
            if let Some(out) = &io_args.out {
                if let Err(e) = write_text(out, &render_report(&report)) {
                    eprintln!("{e}");
                    return CommandResult { exit_code: 2, report, artifacts };
                }
                artifacts.push(out.clone());
            }
            if let Some(plot) = &io_args.plot {
                artifacts.push(plot.clone());
            }
            CommandResult { exit_code: code, report, artifacts }
        }
        Err(CliErr::Usage(message)) => {
            eprintln!("{message}");
            CommandResult { exit_code: 2, report: Value::Null, artifacts: vec![] }
        }
        Err(CliErr::Pipeline(message)) => {
            eprintln!("{message}");
            CommandResult {
                exit_code: 1,
                report: json!({"passed": false, "error": message}),
                artifacts: vec![],
            }
        }
    }
}

fn io_args_of(command: &Command) -> &IoArgs {
    match command {
        Command::Leb(io)
        | Command::Mult(io)
        | Command::Mesh(io)
        | Command::Nerve(io)
        | Command::Barymap(io)
        | Command::Mcshane(io)
        | Command::SimplexExtend(io)
        | Command::SphereExtend(io)
        | Command::RefineViaExtension(io)
        | Command::Promote(io)
        | Command::ReduceDim(io)
        | Command::OstrandVerify(io)
        | Command::Brick(io)
        | Command::SearchRefine(io)
        | Command::SoProfile(io)
        | Command::CheckLip(io)
        | Command::AnnulusExtend(io) => io,
        Command::Counterexample(args) => &args.io,
    }
}

fn dispatch(command: Command) -> Result<(Value, i32), CliErr> {
    match command {
        Command::Leb(io) => cmd_leb(&io),
        Command::Mult(io) => cmd_mult(&io),
        Command::Mesh(io) => cmd_mesh(&io),
        Command::Nerve(io) => cmd_nerve(&io),
        Command::Barymap(io) => cmd_barymap(&io),
        Command::Mcshane(io) => cmd_mcshane(&io),
        Command::SimplexExtend(io) => cmd_simplex_extend(&io),
        Command::SphereExtend(io) => cmd_sphere_extend(&io),
        Command::RefineViaExtension(io) => cmd_refine_via_extension(&io),
        Command::Promote(io) => cmd_promote(&io),
        Command::ReduceDim(io) => cmd_reduce_dim(&io),
        Command::OstrandVerify(io) => cmd_ostrand_verify(&io),
        Command::Brick(io) => cmd_brick(&io),
        Command::SearchRefine(io) => cmd_search_refine(&io),
        Command::SoProfile(io) => cmd_so_profile(&io),
        Command::Counterexample(args) => cmd_counterexample(&args),
        Command::CheckLip(io) => cmd_check_lip(&io),
        Command::AnnulusExtend(io) => cmd_annulus_extend(&io),
    }
}

// ---------- argument plumbing ----------

fn need_cover(io: &IoArgs) -> Result<LoadedCover, CliErr> {
    let path = io
        .cover
        .as_ref()
        .ok_or_else(|| CliErr::Usage("--cover is required".into()))?;
    let fallback = match &io.space {
        Some(p) => Some(load_space(p)?),
        None => None,
    };
    Ok(load_cover(path, fallback)?)
}

fn need_function(io: &IoArgs) -> Result<LoadedFunction, CliErr> {
    let path = io
        .function
        .as_ref()
        .ok_or_else(|| CliErr::Usage("--function is required".into()))?;
    let fallback = match &io.space {
        Some(p) => Some(load_space(p)?),
        None => None,
    };
    Ok(load_function(path, fallback)?)
}

fn params_of(io: &IoArgs) -> Result<Value, CliErr> {
    match &io.params {
        None => Ok(json!({})),
        Some(text) if text.trim_start().starts_with('{') => serde_json::from_str(text)
            .map_err(|e| CliErr::Usage(format!("inline --params is not valid JSON: {e}"))),
        Some(path) => Ok(io::read_json(Path::new(path))?),
    }
}

fn p_f64(params: &Value, key: &str) -> Result<f64, CliErr> {
    params
        .get(key)
        .and_then(Value::as_f64)
        .ok_or_else(|| CliErr::Usage(format!("params need a number \"{key}\"")))
}

fn p_f64_or(params: &Value, key: &str, default: f64) -> f64 {
    params.get(key).and_then(Value::as_f64).unwrap_or(default)
}

fn p_usize(params: &Value, key: &str) -> Result<usize, CliErr> {
    params
        .get(key)
        .and_then(Value::as_u64)
        .map(|v| v as usize)
        .ok_or_else(|| CliErr::Usage(format!("params need an integer \"{key}\"")))
}

fn p_usize_or(params: &Value, key: &str, default: usize) -> usize {
    params
        .get(key)
        .and_then(Value::as_u64)
        .map(|v| v as usize)
        .unwrap_or(default)
}

/// Refiner specs: {"name": "search", "s", "t", "mult", "budget"?, "seed"?},
/// {"name": "brick", "s", "t"}, or {"name": "promoted:<inner>", "n",
/// "inner": {...}}.
fn refiner_from_value(spec: &Value) -> Result<RefinerOracle, CliErr> {
    let name = spec
        .get("name")
        .and_then(Value::as_str)
        .ok_or_else(|| CliErr::Usage("refiner spec needs a \"name\"".into()))?;
    if name == "search" {
        let s = p_f64(spec, "s")?;
        let t = p_f64(spec, "t")?;
        let mult = p_usize(spec, "mult")?;
        let budget = p_usize_or(spec, "budget", 16);
        let seed = spec.get("seed").and_then(Value::as_u64).unwrap_or(0);
        return Ok(RefinerOracle::search(s, t, mult, budget, seed));
    }
    if name == "brick" {
        let s = p_f64(spec, "s")?;
        let t = p_f64(spec, "t")?;
        return Ok(RefinerOracle::brick_line(s, t)?);
    }
    if name == "promoted" || name.starts_with("promoted:") {
        let n = p_usize(spec, "n")?;
        let inner = spec
            .get("inner")
            .ok_or_else(|| CliErr::Usage("promoted refiner spec needs \"inner\"".into()))?;
        let inner = refiner_from_value(inner)?;
        return Ok(promote_refiner(Arc::new(inner), n)?);
    }
    Err(CliErr::Usage(format!(
        "unknown refiner \"{name}\"; use \"search\", \"brick\", or \"promoted:<inner>\""
    )))
}

fn cover_stats(cover: &Cover) -> Value {
    let leb = cover.lebesgue_number();
    json!({
        "members": cover.member_count(),
        "multiplicity": cover.multiplicity(),
        "dimension": cover.dimension(),
        "mesh": cover.mesh(),
        "lebesgue": leb_value_json(&leb.value),
    })
}

fn id_of(space: &FiniteMetricSpace, p: usize) -> Value {
    serde_json::to_value(space.id(p)).expect("point id serializes")
}

fn maybe_plot_cover(io: &IoArgs, cover: &Cover) -> Result<(), CliErr> {
    if let Some(path) = &io.plot {
        write_text(path, &cover_svg(cover))?;
    }
    Ok(())
}

// ---------- commands ----------

fn cmd_leb(io: &IoArgs) -> Result<(Value, i32), CliErr> {
    let loaded = need_cover(io)?;
    let report = loaded.cover.lebesgue_number();
    maybe_plot_cover(io, &loaded.cover)?;
    let witness = report.critical_point.map(|p| id_of(&loaded.space, p));
    Ok((
        json!({
            "value": leb_value_json(&report.value),
            "witness": witness,
        }),
        0,
    ))
}

fn cmd_mult(io: &IoArgs) -> Result<(Value, i32), CliErr> {
    let loaded = need_cover(io)?;
    let (mult, witness) = loaded.cover.multiplicity_witness();
    maybe_plot_cover(io, &loaded.cover)?;
    Ok((
        json!({
            "multiplicity": mult,
            "dimension": mult.saturating_sub(1),
            "witness": id_of(&loaded.space, witness),
        }),
        0,
    ))
}

fn cmd_mesh(io: &IoArgs) -> Result<(Value, i32), CliErr> {
    let loaded = need_cover(io)?;
    maybe_plot_cover(io, &loaded.cover)?;
    Ok((json!({"mesh": loaded.cover.mesh()}), 0))
}

fn cmd_nerve(io: &IoArgs) -> Result<(Value, i32), CliErr> {
    let loaded = need_cover(io)?;
    let nerve = nerve_of(&loaded.cover);
    Ok((
        json!({
            "vertices": nerve.vertices,
            "simplices": nerve.simplices,
            "dimension": nerve.dimension,
        }),
        0,
    ))
}

fn cmd_barymap(io: &IoArgs) -> Result<(Value, i32), CliErr> {
    let loaded = need_cover(io)?;
    let phi = barycentric_map(&loaded.cover)?;
    let leb = loaded.cover.lebesgue_number();
    let m = loaded.cover.multiplicity() as f64;
    let measured = check_lipschitz(&phi, f64::INFINITY, 0.0).worst_ratio;
    let (bound, ok) = match leb.value {
        crate::cover::LebValue::Finite(v) => {
            let bound = 4.0 * m * m / v;
            (json!(bound), measured <= bound + crate::metric::TOL)
        }
        crate::cover::LebValue::Infinite => (Value::Null, true),
    };
    let mut report = function_to_value(&phi);
    report["space"] = space_to_value(&loaded.space);
    report["lipschitz"] = json!({"measured": measured, "bound": bound});
    Ok((report, if ok { 0 } else { 1 }))
}

fn cmd_mcshane(io: &IoArgs) -> Result<(Value, i32), CliErr> {
    let f = need_function(io)?;
    let params = params_of(io)?;
    let lambda = p_f64(&params, "lambda")?;
    let clamp = params.get("clamp").and_then(|v| {
        let lo = v.get(0)?.as_f64()?;
        let hi = v.get(1)?.as_f64()?;
        Some((lo, hi))
    });
    let values = f.scalar_values()?;
    let g = mcshane_extend(&f.space, &f.points, &values, lambda, clamp)?;
    let verification = check_lipschitz(&g, lambda, 0.0);
    let mut report = function_to_value(&g);
    report["space"] = space_to_value(&f.space);
    report["lambda"] = json!(lambda);
    report["verified_lipschitz"] = json!(verification.satisfied);
    Ok((report, if verification.satisfied { 0 } else { 1 }))
}

fn cmd_simplex_extend(io: &IoArgs) -> Result<(Value, i32), CliErr> {
    let f = need_function(io)?;
    let params = params_of(io)?;
    let lambda = p_f64(&params, "lambda")?;
    let values = f.simplex_values()?;
    let g = simplex_extend(&f.space, &f.points, &values, lambda)?;
    let dim = g.value_dim() as f64;
    let measured = check_lipschitz(&g, dim * lambda, 0.0);
    let mut report = function_to_value(&g);
    report["space"] = space_to_value(&f.space);
    report["lipschitz"] = json!({
        "lambda": lambda,
        "constant": dim,
        "bound": dim * lambda,
        "measured": measured.worst_ratio,
    });
    Ok((report, 0))
}

fn cmd_sphere_extend(io: &IoArgs) -> Result<(Value, i32), CliErr> {
    let f = need_function(io)?;
    let params = params_of(io)?;
    let delta = p_f64(&params, "delta")?;
    let refiner_spec = params
        .get("refiner")
        .cloned()
        .unwrap_or(json!({"name": "search", "s": 1.0, "t": 1.0, "mult": 2}));
    let refiner = refiner_from_value(&refiner_spec)?;
    let values = f.simplex_values()?;
    let identity = f.points.len() == f.space.len();
    let (h, cert) = sphere_extend(&f.space, &f.points, &values, delta, &refiner)?;
    let mut report = function_to_value(&h);
    report["space"] = space_to_value(&f.space);
    report["certificate"] = serde_json::to_value(&cert).expect("cert serializes");
    if identity {
        report["identity_extension"] = json!(true);
    }
    Ok((report, 0))
}

fn cmd_refine_via_extension(io: &IoArgs) -> Result<(Value, i32), CliErr> {
    let loaded = need_cover(io)?;
    let params = params_of(io)?;
    let epsilon = p_f64(&params, "epsilon")?;
    let refiner_spec = params
        .get("refiner")
        .cloned()
        .unwrap_or(json!({"name": "search", "s": 1.0, "t": 1.0, "mult": 2}));
    let refiner = Arc::new(refiner_from_value(&refiner_spec)?);
    let extender = SphereExtender::from_refiner(refiner);
    let refined = refine_via_extension(&loaded.cover, &extender, epsilon)?;
    maybe_plot_cover(io, &refined)?;
    let m = loaded.cover.member_count() - 2;
    let mut report = cover_to_value(&refined, None, None);
    report["stats"] = cover_stats(&refined);
    report["epsilon"] = json!(epsilon);
    report["target_lebesgue"] = json!(1.0 / (2.0 * epsilon * (m as f64 + 1.0)));
    Ok((report, 0))
}

fn cmd_promote(io: &IoArgs) -> Result<(Value, i32), CliErr> {
    let loaded = need_cover(io)?;
    let params = params_of(io)?;
    let n = p_usize(&params, "n")?;
    let inner_spec = params
        .get("inner")
        .ok_or_else(|| CliErr::Usage("params need an \"inner\" refiner spec".into()))?;
    let inner = Arc::new(refiner_from_value(inner_spec)?);
    let promoted = promote_refiner(inner, n)?;
    let out = promoted.refine(&loaded.cover)?;
    maybe_plot_cover(io, &out)?;
    let mut report = cover_to_value(&out, None, None);
    report["stats"] = cover_stats(&out);
    report["q"] = json!(promoted.s());
    report["r"] = json!(promoted.t());
    Ok((report, 0))
}

fn cmd_reduce_dim(io: &IoArgs) -> Result<(Value, i32), CliErr> {
    let loaded = need_cover(io)?;
    let colored = loaded.colored()?;
    let params = params_of(io)?;
    let n = p_usize(&params, "n")?;
    let refiner_spec = params
        .get("refiner")
        .ok_or_else(|| CliErr::Usage("params need a \"refiner\" spec".into()))?;
    let refiner = refiner_from_value(refiner_spec)?;
    let out = reduce_dimension(&colored, n, &refiner)?;
    maybe_plot_cover(io, &out)?;
    let mut report = cover_to_value(&out, None, None);
    report["stats"] = cover_stats(&out);
    Ok((report, 0))
}

fn cmd_ostrand_verify(io: &IoArgs) -> Result<(Value, i32), CliErr> {
    let loaded = need_cover(io)?;
    let colored = loaded.colored()?;
    let params = params_of(io)?;
    let r = p_f64(&params, "r")?;
    let n = p_usize(&params, "n")?;
    let report = verify_ostrand(&colored, r, n)?;
    let verdict = report.verdict;
    let mut value = serde_json::to_value(&report).expect("report serializes");
    value["plain_cover_lebesgue"] =
        leb_value_json(&colored_to_plain(&colored).lebesgue_number().value);
    Ok((value, if verdict { 0 } else { 1 }))
}

fn cmd_brick(io: &IoArgs) -> Result<(Value, i32), CliErr> {
    let params = params_of(io)?;
    let kind = params
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| CliErr::Usage("params need \"kind\": \"line\" or \"grid\"".into()))?;
    let l = p_usize(&params, "l")? as i64;
    let window = params
        .get("window")
        .and_then(|v| {
            let a = v.get(0)?.as_i64()?;
            let b = v.get(1)?.as_i64()?;
            Some((a, b))
        })
        .ok_or_else(|| CliErr::Usage("params need \"window\": [start, end]".into()))?;
    let colored = match kind {
        "line" => brick_cover_line(window, l)?,
        "grid" => brick_cover_grid(window, l)?,
        other => return Err(CliErr::Usage(format!("unknown brick kind \"{other}\""))),
    };
    maybe_plot_cover(io, colored.cover())?;
    let mut report = cover_to_value(colored.cover(), Some(colored.families()), Some(colored.r()));
    report["stats"] = cover_stats(colored.cover());
    Ok((report, 0))
}

fn cmd_search_refine(io: &IoArgs) -> Result<(Value, i32), CliErr> {
    let loaded = need_cover(io)?;
    let params = params_of(io)?;
    let target_leb = p_f64(&params, "target_leb")?;
    let target_mult = p_usize(&params, "target_mult")?;
    let budget = p_usize_or(&params, "budget", 16);
    let seed = params.get("seed").and_then(Value::as_u64).unwrap_or(0);
    match search_refinement(&loaded.cover, target_leb, target_mult, budget, seed) {
        Some(found) => {
            maybe_plot_cover(io, &found)?;
            let mut report = cover_to_value(&found, None, None);
            report["found"] = json!(true);
            report["stats"] = cover_stats(&found);
            Ok((report, 0))
        }
        None => Ok((
            json!({"found": false, "target_leb": target_leb, "target_mult": target_mult}),
            1,
        )),
    }
}

fn cmd_so_profile(io: &IoArgs) -> Result<(Value, i32), CliErr> {
    let f = need_function(io)?;
    let total = f.as_total()?;
    let params = params_of(io)?;
    let r = p_f64(&params, "r")?;
    let ns: Vec<f64> = params
        .get("ns")
        .and_then(|v| serde_json::from_value(v.clone()).ok())
        .ok_or_else(|| CliErr::Usage("params need \"ns\": [numbers]".into()))?;
    let profile = variation_profile(&total, r, &ns)?;
    if let Some(path) = &io.plot {
        write_text(path, &profile_svg(&profile))?;
    }
    Ok((serde_json::to_value(&profile).expect("profile serializes"), 0))
}

fn cmd_counterexample(args: &CounterexampleArgs) -> Result<(Value, i32), CliErr> {
    let inst = squares_instance(args.nmax)?;
    let g = match args.extender.as_str() {
        "linear" => inst.extend_linear(),
        "nearest" => inst.extend_nearest(),
        other => return Err(CliErr::Usage(format!("unknown extender \"{other}\""))),
    };
    let witness = oscillation_witness(&g, args.epsilon, args.radius, args.beyond)?;
    let report = match witness {
        Some((x, y)) => json!({
            "witness": [id_of(&inst.space, x), id_of(&inst.space, y)],
            "image_gap": g.target_distance(x, y),
            "extender": args.extender,
            "epsilon": args.epsilon,
            "radius": args.radius,
            "beyond": args.beyond,
        }),
        None => json!({
            "witness": Value::Null,
            "extender": args.extender,
            "epsilon": args.epsilon,
            "radius": args.radius,
            "beyond": args.beyond,
        }),
    };
    let code = if report["witness"].is_null() { 1 } else { 0 };
    Ok((report, code))
}

fn cmd_check_lip(io: &IoArgs) -> Result<(Value, i32), CliErr> {
    let f = need_function(io)?;
    let total = f.as_total()?;
    let params = params_of(io)?;
    let lambda = p_f64(&params, "lambda")?;
    let c = p_f64_or(&params, "c", 0.0);
    let report = check_lipschitz(&total, lambda, c);
    let worst = report
        .worst_pair
        .map(|(a, b)| json!([id_of(&f.space, a), id_of(&f.space, b)]));
    Ok((
        json!({
            "lambda": lambda,
            "c": c,
            "satisfied": report.satisfied,
            "worst_pair": worst,
            "worst_ratio": report.worst_ratio,
        }),
        if report.satisfied { 0 } else { 1 },
    ))
}

fn cmd_annulus_extend(io: &IoArgs) -> Result<(Value, i32), CliErr> {
    let f = need_function(io)?;
    let params = params_of(io)?;
    let r = p_f64(&params, "r")?;
    let mu = p_f64(&params, "mu")?;
    let s = p_f64(&params, "s")?;
    let epsilon = p_f64(&params, "epsilon")?;
    let m = p_f64(&params, "m")?;
    let values = f.scalar_values()?;
    let a: BTreeSet<usize> = f.points.clone();
    let extender = BoundedExtender::mcshane_unit_interval();
    let out = annulus_extend(&f.space, &a, &values, r, mu, s, epsilon, m, &extender)?;
    let continuity = continuity_check(&out, epsilon, m);
    let mut report = function_to_value(&out);
    report["space"] = space_to_value(&f.space);
    report["continuity"] = json!({
        "epsilon": epsilon,
        "m": m,
        "continuous": continuity.continuous,
    });
    Ok((report, if continuity.continuous { 0 } else { 1 }))
}

/// Applies the COARSE_EXT_THREADS cap to the global thread pool. Call once,
/// before any parallel work.
pub fn configure_threads() {
    if let Ok(raw) = std::env::var("COARSE_EXT_THREADS") {
        if let Ok(n) = raw.trim().parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}
