//! `dunkl` — command-line front end for the exact reflection-group
//! toolkit: group inspection, the intertwining transform, moment
//! polynomials, truncated kernel evaluation, bilinear pairings, and the
//! verification suites.
//!
//! Exit codes: 0 = success / all checks pass, 1 = a check failed,
//! 2 = usage or configuration error.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use dunkl_core::harness::{positivity_scan, run_all, run_suite, Config, Mode};
use dunkl_core::{
    build_vk, gaussian_pairing_quadrature, gram_psd_check, load_table, pairing, parse_polynomial,
    save_table, Cplx, DunklError, KernelTruncation, Rat, Report, Result, Scalar,
};

#[derive(Parser)]
#[command(
    name = "dunkl",
    version,
    about = "Exact polynomial computation with finite reflection groups",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Path to the run configuration JSON
    #[arg(long)]
    config: PathBuf,
    /// Write output to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect the configured reflection group
    Group {
        #[command(subcommand)]
        action: GroupAction,
    },
    /// Build, cache, or apply the intertwining transform
    Vk {
        #[command(subcommand)]
        action: VkAction,
    },
    /// Print the moment polynomials (transform images of monomials)
    Moments {
        #[command(flatten)]
        common: Common,
        /// Largest total degree
        #[arg(long, default_value_t = 4)]
        order: usize,
    },
    /// Evaluate the truncated kernel or test a kernel Gram matrix
    Kernel {
        #[command(subcommand)]
        action: KernelAction,
    },
    /// Bilinear pairing of two polynomials
    Pairing {
        #[command(flatten)]
        common: Common,
        /// First polynomial, e.g. "x1^2 + 2*x2"
        #[arg(long)]
        p: String,
        /// Second polynomial
        #[arg(long)]
        q: String,
        /// Also compute the Gaussian-integral form and the difference
        #[arg(long)]
        gaussian: bool,
    },
    /// Run verification suites and emit a report
    Verify {
        /// Suite name: identities, positivity, semigroup, numeric, or all
        suite: String,
        #[command(flatten)]
        common: Common,
        /// Working degree for the exact suites
        #[arg(long, default_value_t = 6)]
        order: usize,
        /// Seed for the generated polynomial families
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Record wall-clock times (reports are then no longer
        /// byte-for-byte reproducible)
        #[arg(long)]
        timings: bool,
    },
    /// Targeted scans
    Scan {
        #[command(subcommand)]
        action: ScanAction,
    },
}

#[derive(Subcommand)]
enum GroupAction {
    /// Print order, orbits, and positive roots as JSON
    Describe {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand)]
enum VkAction {
    /// Build the transform table and write it as JSON
    Build {
        #[command(flatten)]
        common: Common,
        /// Largest total degree
        #[arg(long, default_value_t = 6)]
        order: usize,
    },
    /// Apply the transform to a polynomial
    Apply {
        #[command(flatten)]
        common: Common,
        /// Polynomial to transform, e.g. "x1^2"
        #[arg(long)]
        poly: String,
        /// Working degree (defaults to the degree of the polynomial)
        #[arg(long)]
        order: Option<usize>,
        /// Reuse a table previously written by `vk build`
        #[arg(long)]
        table: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum KernelAction {
    /// Evaluate the truncated kernel at one point pair
    Eval {
        #[command(flatten)]
        common: Common,
        /// First argument: comma-separated rational coordinates, e.g. "1,1/2"
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// Second argument: comma-separated complex coordinates, e.g. "i" or "1/2+2i"
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        /// Truncation order
        #[arg(long, default_value_t = 30)]
        order: usize,
    },
    /// Check positive-semidefiniteness of the kernel Gram matrix
    Gram {
        #[command(flatten)]
        common: Common,
        /// Points, semicolon-separated coordinate lists, e.g. "1;1/2;-1"
        #[arg(long, allow_hyphen_values = true)]
        points: String,
        /// Second argument (the Gram matrix uses it imaginary), e.g. "1"
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        /// Truncation order
        #[arg(long, default_value_t = 30)]
        order: usize,
        /// Eigenvalue tolerance
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
}

#[derive(Subcommand)]
enum ScanAction {
    /// Exact nonnegativity scan of transform images on a rational grid
    Positivity {
        #[command(flatten)]
        common: Common,
        /// Working degree
        #[arg(long, default_value_t = 6)]
        order: usize,
        /// Seed for the polynomial family
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Family size
        #[arg(long, default_value_t = 50)]
        count: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(all_pass) => {
            if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Run one command. `Ok(true)` = exit 0, `Ok(false)` = a check failed
/// (exit 1), `Err` = usage/config error (exit 2).
fn dispatch(command: Command) -> Result<bool> {
    match command {
        Command::Group {
            action: GroupAction::Describe { common },
        } => group_describe(&common),
        Command::Vk { action } => match action {
            VkAction::Build { common, order } => vk_build(&common, order),
            VkAction::Apply {
                common,
                poly,
                order,
                table,
            } => with_mode(&common, |cfg| vk_apply(cfg, &common, &poly, order, &table)),
        },
        Command::Moments { common, order } => {
            with_mode(&common, |cfg| moments(cfg, &common, order))
        }
        Command::Kernel { action } => match action {
            KernelAction::Eval {
                common,
                x,
                y,
                order,
            } => with_mode(&common, |cfg| kernel_eval_cmd(cfg, &common, &x, &y, order)),
            KernelAction::Gram {
                common,
                points,
                y,
                order,
                tol,
            } => with_mode(&common, |cfg| {
                kernel_gram_cmd(cfg, &common, &points, &y, order, tol)
            }),
        },
        Command::Pairing {
            common,
            p,
            q,
            gaussian,
        } => with_mode(&common, |cfg| pairing_cmd(cfg, &common, &p, &q, gaussian)),
        Command::Verify {
            suite,
            common,
            order,
            seed,
            timings,
        } => verify(&common, &suite, order, seed, timings),
        Command::Scan {
            action:
                ScanAction::Positivity {
                    common,
                    order,
                    seed,
                    count,
                },
        } => {
            let config = Config::from_path(&common.config)?;
            let report = positivity_scan(&config, order, seed, count)?;
            emit(&common, &report.to_json())?;
            Ok(report.pass)
        }
    }
}

/// Load the config and run the command body with the scalar type the
/// configured mode selects.
fn with_mode<F>(common: &Common, body: F) -> Result<bool>
where
    F: FnOnce(ModeConfig<'_>) -> Result<bool>,
{
    let config = Config::from_path(&common.config)?;
    let mode = config.mode;
    body(ModeConfig {
        config: &config,
        mode,
    })
}

/// A loaded config plus the mode tag commands dispatch on.
struct ModeConfig<'a> {
    config: &'a Config,
    mode: Mode,
}

fn emit(common: &Common, text: &str) -> Result<()> {
    match &common.out {
        Some(path) => {
            std::fs::write(path, text)?;
            Ok(())
        }
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn invalid(msg: impl Into<String>) -> DunklError {
    DunklError::InvalidArgument(msg.into())
}

// ---------------------------------------------------------------------------
// group describe
// ---------------------------------------------------------------------------

fn group_describe(common: &Common) -> Result<bool> {
    let config = Config::from_path(&common.config)?;
    // group structure is scalar-independent; describe it exactly
    let ctx = config.build_context::<Rat>(0)?;
    let rs = ctx.root_system();
    let group = ctx.group();
    let roots: Vec<String> = rs
        .positive_roots()
        .iter()
        .map(|r| {
            let coords: Vec<String> = r.0.iter().map(Scalar::render).collect();
            format!("({})", coords.join(", "))
        })
        .collect();
    let orbits: Vec<usize> = rs.orbits().iter().map(Vec::len).collect();
    let ks: Vec<String> = ctx
        .multiplicity()
        .orbit_values()
        .iter()
        .map(Scalar::render)
        .collect();
    let doc = json!({
        "dimension": rs.nvars(),
        "group_order": group.elements().len(),
        "num_positive_roots": rs.num_positive_roots(),
        "positive_roots": roots,
        "orbit_sizes": orbits,
        "multiplicity": ks,
    });
    emit(common, &format!("{:#}\n", doc))?;
    Ok(true)
}

// ---------------------------------------------------------------------------
// vk build / apply
// ---------------------------------------------------------------------------

fn vk_build(common: &Common, order: usize) -> Result<bool> {
    let config = Config::from_path(&common.config)?;
    if config.mode == Mode::Float {
        return Err(invalid(
            "table caching stores exact entries; use exact mode",
        ));
    }
    let ctx = config.build_context::<Rat>(order)?;
    let table = build_vk(&ctx, order)?;
    let out = common
        .out
        .as_ref()
        .ok_or_else(|| invalid("vk build needs --out <path> for the table file"))?;
    save_table(&table, &ctx, out)?;
    println!("wrote table of order {order} to {}", out.display());
    Ok(true)
}

fn vk_apply(
    mc: ModeConfig<'_>,
    common: &Common,
    poly: &str,
    order: Option<usize>,
    table_path: &Option<PathBuf>,
) -> Result<bool> {
    match mc.mode {
        Mode::Exact => vk_apply_typed::<Rat>(mc.config, common, poly, order, table_path),
        Mode::Float => vk_apply_typed::<f64>(mc.config, common, poly, order, table_path),
    }
}

fn vk_apply_typed<S: Scalar>(
    config: &Config,
    common: &Common,
    poly: &str,
    order: Option<usize>,
    table_path: &Option<PathBuf>,
) -> Result<bool> {
    let probe = config.build_context::<S>(0)?;
    let p = parse_polynomial::<S>(poly, probe.nvars())?;
    let order = order.unwrap_or_else(|| p.total_degree().unwrap_or(0));
    let ctx = config.build_context::<S>(order)?;
    let table = match table_path {
        Some(path) => load_table(&ctx, order, path)?,
        None => build_vk(&ctx, order)?,
    };
    let image = table.apply(&p)?;
    emit(common, &format!("{image}\n"))?;
    Ok(true)
}

// ---------------------------------------------------------------------------
// moments
// ---------------------------------------------------------------------------

fn moments(mc: ModeConfig<'_>, common: &Common, order: usize) -> Result<bool> {
    match mc.mode {
        Mode::Exact => moments_typed::<Rat>(mc.config, common, order),
        Mode::Float => moments_typed::<f64>(mc.config, common, order),
    }
}

fn moments_typed<S: Scalar>(config: &Config, common: &Common, order: usize) -> Result<bool> {
    let ctx = config.build_context::<S>(order)?;
    let table = build_vk(&ctx, order)?;
    let mut rows = Vec::new();
    for nu in dunkl_core::monomials_up_to(ctx.nvars(), order) {
        let image = table.image_of_monomial(&nu)?;
        rows.push(json!({
            "monomial": format!("{nu}"),
            "moment_polynomial": format!("{image}"),
        }));
    }
    let doc = json!({ "order": order, "moments": rows });
    emit(common, &format!("{:#}\n", doc))?;
    Ok(true)
}

// ---------------------------------------------------------------------------
// kernel eval / gram
// ---------------------------------------------------------------------------

/// Parse one complex coordinate: `a`, `bi`, `a+bi`, `a-bi`, with each of
/// `a`, `b` an integer, fraction, or decimal; a bare `i` means `1i`.
fn parse_complex<S: Scalar>(src: &str) -> Result<Cplx<S>> {
    let s: String = src.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(invalid("empty coordinate"));
    }
    // split into sign-prefixed terms
    let mut terms: Vec<String> = Vec::new();
    let mut current = String::new();
    for (i, ch) in s.chars().enumerate() {
        if (ch == '+' || ch == '-') && i > 0 {
            let prev = s.chars().nth(i - 1).unwrap();
            // a sign inside a fraction/decimal never follows a digit or 'i';
            // exponents like 1e-3 are not accepted here
            if prev.is_ascii_digit() || prev == 'i' || prev == '.' {
                terms.push(std::mem::take(&mut current));
            }
        }
        current.push(ch);
    }
    terms.push(current);
    let mut re = S::zero();
    let mut im = S::zero();
    for term in &terms {
        if let Some(body) = term.strip_suffix('i') {
            let val = match body {
                "" | "+" => S::one(),
                "-" => S::zero().sub_ref(&S::one()),
                other => S::parse(other)?,
            };
            im = im.add_ref(&val);
        } else {
            re = re.add_ref(&S::parse(term)?);
        }
    }
    Ok(Cplx::new(re, im))
}

fn parse_real_list<S: Scalar>(src: &str, expected: usize, what: &str) -> Result<Vec<S>> {
    let coords: Result<Vec<S>> = src.split(',').map(|c| S::parse(c.trim())).collect();
    let coords = coords?;
    if coords.len() != expected {
        return Err(invalid(format!(
            "{what} needs {expected} coordinates, got {}",
            coords.len()
        )));
    }
    Ok(coords)
}

fn kernel_eval_cmd(
    mc: ModeConfig<'_>,
    common: &Common,
    x: &str,
    y: &str,
    order: usize,
) -> Result<bool> {
    match mc.mode {
        Mode::Exact => kernel_eval_typed::<Rat>(mc.config, common, x, y, order),
        Mode::Float => kernel_eval_typed::<f64>(mc.config, common, x, y, order),
    }
}

fn kernel_eval_typed<S: Scalar>(
    config: &Config,
    common: &Common,
    x: &str,
    y: &str,
    order: usize,
) -> Result<bool> {
    let ctx = config.build_context::<S>(order)?;
    let nv = ctx.nvars();
    let xs = parse_real_list::<S>(x, nv, "--x")?;
    let ys: Result<Vec<Cplx<S>>> = y.split(',').map(parse_complex::<S>).collect();
    let ys = ys?;
    if ys.len() != nv {
        return Err(invalid(format!(
            "--y needs {nv} coordinates, got {}",
            ys.len()
        )));
    }
    let tr = KernelTruncation::from_context(&ctx, order)?;
    let value = tr.eval(&xs, &ys)?;
    let y_render: Vec<String> = ys
        .iter()
        .map(|c| format!("{} + {}i", c.re.render(), c.im.render()))
        .collect();
    let doc = json!({
        "point": {
            "x": xs.iter().map(Scalar::render).collect::<Vec<_>>(),
            "y": y_render,
        },
        "value_re": value.value.re.to_f64(),
        "value_im": value.value.im.to_f64(),
        "tail_bound": value.tail_bound,
        "order": order,
    });
    emit(common, &format!("{:#}\n", doc))?;
    Ok(true)
}

fn kernel_gram_cmd(
    mc: ModeConfig<'_>,
    common: &Common,
    points: &str,
    y: &str,
    order: usize,
    tol: f64,
) -> Result<bool> {
    match mc.mode {
        Mode::Exact => kernel_gram_typed::<Rat>(mc.config, common, points, y, order, tol),
        Mode::Float => kernel_gram_typed::<f64>(mc.config, common, points, y, order, tol),
    }
}

fn kernel_gram_typed<S: Scalar>(
    config: &Config,
    common: &Common,
    points: &str,
    y: &str,
    order: usize,
    tol: f64,
) -> Result<bool> {
    let ctx = config.build_context::<S>(order)?;
    let nv = ctx.nvars();
    let pts: Result<Vec<Vec<S>>> = points
        .split(';')
        .map(|p| parse_real_list::<S>(p, nv, "each point"))
        .collect();
    let pts = pts?;
    let ys = parse_real_list::<S>(y, nv, "--y")?;
    let tr = KernelTruncation::from_context(&ctx, order)?;
    let verdict = gram_psd_check(&tr, &pts, &ys, tol)?;
    let doc = json!({
        "points": pts.len(),
        "order": order,
        "min_eigenvalue": verdict.min_eigenvalue,
        "tail": verdict.tail,
        "threshold": verdict.threshold,
        "pass": verdict.pass,
    });
    emit(common, &format!("{:#}\n", doc))?;
    Ok(verdict.pass)
}

// ---------------------------------------------------------------------------
// pairing
// ---------------------------------------------------------------------------

fn pairing_cmd(
    mc: ModeConfig<'_>,
    common: &Common,
    p: &str,
    q: &str,
    gaussian: bool,
) -> Result<bool> {
    match mc.mode {
        Mode::Exact => pairing_typed::<Rat>(mc.config, common, p, q, gaussian),
        Mode::Float => pairing_typed::<f64>(mc.config, common, p, q, gaussian),
    }
}

fn pairing_typed<S: Scalar>(
    config: &Config,
    common: &Common,
    p: &str,
    q: &str,
    gaussian: bool,
) -> Result<bool> {
    let probe = config.build_context::<S>(0)?;
    let nv = probe.nvars();
    let pp = parse_polynomial::<S>(p, nv)?;
    let qq = parse_polynomial::<S>(q, nv)?;
    let order = pp
        .total_degree()
        .unwrap_or(0)
        .max(qq.total_degree().unwrap_or(0));
    let ctx = config.build_context::<S>(order)?;
    let value = pairing(&ctx, &pp, &qq)?;
    let mut doc = json!({ "value": value.render() });
    if gaussian {
        let numeric = gaussian_pairing_quadrature(&ctx, &pp, &qq, &config.quad_spec())?;
        doc["gaussian_integral"] = json!(numeric);
        doc["difference"] = json!((numeric - value.to_f64()).abs());
    }
    emit(common, &format!("{:#}\n", doc))?;
    Ok(true)
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn verify(common: &Common, suite: &str, order: usize, seed: u64, timings: bool) -> Result<bool> {
    let config = Config::from_path(&common.config)?;
    let mut reports: Vec<Report> = if suite == "all" {
        if timings {
            // time each suite individually
            let mut out = Vec::new();
            for name in ["identities", "positivity", "semigroup", "numeric"] {
                out.push(run_timed(name, &config, order, seed)?);
            }
            out
        } else {
            run_all(&config, order, seed)?
        }
    } else if timings {
        vec![run_timed(suite, &config, order, seed)?]
    } else {
        vec![run_suite(suite, &config, order, seed)?]
    };

    let all_pass = reports.iter().all(|r| r.pass);
    let text = if reports.len() == 1 {
        reports.pop().unwrap().to_json()
    } else {
        let docs: Vec<serde_json::Value> = reports
            .iter()
            .map(|r| serde_json::from_str(&r.to_json()).expect("report emits valid JSON"))
            .collect();
        format!("{:#}\n", serde_json::Value::Array(docs))
    };
    emit(common, &text)?;
    Ok(all_pass)
}

fn run_timed(name: &str, config: &Config, order: usize, seed: u64) -> Result<Report> {
    let start = Instant::now();
    let mut report = run_suite(name, config, order, seed)?;
    report.wall_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}
