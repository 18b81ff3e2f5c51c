//! Argument parsing and command dispatch.

use std::f64::consts::{PI, TAU};
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use phasekit::apps::CkParams;
use phasekit::gadget::{j_gadget, GadgetPlan, GadgetVariant};
use phasekit::random::random_state;
use phasekit::state::{equal_up_to_global_phase, C64};
use phasekit::ANCILLA;
use serde_json::{json, Value};

use crate::bench;
use crate::demo::{self, parse_angle, AncillaKind, TableSource};
use crate::error::CliError;
use crate::json::{to_line, to_pretty, value_of};
use crate::report::{Tolerances, VerificationReport};
use crate::suites::{run_suite, Ctx, SUITES};

#[derive(Debug, Parser)]
#[command(
    name = "phasekit",
    version,
    about = "Phase transforms with uninitialized ancillas: verification, demos and benchmarks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write JSON output to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,

    /// JSON only; suppress the summary on stderr.
    #[arg(long, global = true)]
    pub json: bool,

    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,

    /// Gadget variant: comm-a, comm-b, comm-c, comm-d or sform.
    #[arg(long, global = true, default_value = "comm-a", value_parser = parse_variant)]
    pub variant: GadgetVariant,
}

fn parse_variant(s: &str) -> Result<GadgetVariant, String> {
    s.parse().map_err(|e: phasekit::Error| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a verification suite and emit a JSON report.
    Verify {
        /// One of primitives, gadget, phase-transform, mixed, optimality, apps, all.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Override a tolerance, e.g. --tol eigen=1e-8. Repeatable.
        #[arg(long, value_name = "NAME=VALUE")]
        tol: Vec<String>,
    },
    /// Run an application demo.
    Demo {
        #[command(subcommand)]
        app: DemoApp,
    },
    /// Apply one gadget to a random state and report its global phase.
    Gadget {
        /// Ancilla dimension M.
        #[arg(long)]
        m: usize,
        #[arg(long, allow_negative_numbers = true)]
        k: i64,
        #[arg(long, allow_negative_numbers = true)]
        z: i64,
    },
    /// Time phase_transform for N = 2^1..2^max_n and M = 2^1..2^max_m.
    Bench {
        #[arg(long, default_value_t = 10)]
        max_n: u32,
        #[arg(long, default_value_t = 4)]
        max_m: u32,
        #[arg(long, default_value_t = 3)]
        reps: usize,
        /// Amplitude budget; defaults to $PHASEKIT_MEM_BUDGET or 2^24.
        #[arg(long)]
        mem_budget: Option<u64>,
    },
}

#[derive(Debug, Args)]
pub struct DemoInput {
    /// Function table file.
    #[arg(long, value_name = "FILE")]
    pub table: Option<PathBuf>,
    /// Generate a table on N = 2^n points instead of reading one.
    #[arg(long)]
    pub n: Option<u32>,
    /// Initial ancilla contents.
    #[arg(long, value_enum, default_value_t = AncillaKind::Random)]
    pub ancilla: AncillaKind,
}

#[derive(Debug, Subcommand)]
pub enum DemoApp {
    /// Deutsch-Jozsa constant-vs-balanced.
    Dj {
        #[command(flatten)]
        input: DemoInput,
        /// Generate the constant table with this value (default: seeded balanced).
        #[arg(long)]
        constant: Option<usize>,
    },
    /// Grover search.
    Grover {
        #[command(flatten)]
        input: DemoInput,
        #[arg(long)]
        target: Option<usize>,
        /// Number of seeded marked points.
        #[arg(long)]
        solutions: Option<usize>,
        /// Iterations (default: the optimal count).
        #[arg(long)]
        iters: Option<usize>,
    },
    /// Single-query search with phases gamma and beta.
    Ck {
        #[command(flatten)]
        input: DemoInput,
        #[arg(long)]
        target: Option<usize>,
        #[arg(long)]
        solutions: Option<usize>,
        #[arg(long, default_value = "pi", allow_hyphen_values = true)]
        gamma: String,
        #[arg(long, default_value = "pi", allow_hyphen_values = true)]
        beta: String,
        /// Phase quantization bits; the ancilla has 2^mbits levels.
        #[arg(long, default_value_t = 4)]
        mbits: u32,
        #[arg(long, default_value_t = 0)]
        pivot: usize,
    },
}

/// What a command produced: JSON for stdout/--out, a stderr summary, and
/// whether its checks passed.
struct Output {
    body: String,
    summary: String,
    pass: bool,
}

fn wrap_angle(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(TAU) - PI;
    if w <= -PI {
        w + TAU
    } else {
        w
    }
}

fn verify(cli: &Cli, suite: &str, tol: &[String]) -> Result<Output, CliError> {
    if !SUITES.contains(&suite) {
        return Err(CliError::Usage(format!(
            "unknown suite '{suite}' (expected one of: {})",
            SUITES.join(", ")
        )));
    }
    let tolerances = Tolerances::default().with_overrides(tol)?;
    let mut ctx = Ctx::new(cli.seed, tolerances.clone());
    run_suite(suite, &mut ctx)?;
    let report = VerificationReport::new(suite, cli.seed, tolerances, ctx.into_cases());
    let mut summary = format!(
        "verify {suite} (seed {}): {} cases, {} failed: {}",
        cli.seed,
        report.case_count,
        report.failed.len(),
        if report.pass { "PASS" } else { "FAIL" }
    );
    for name in &report.failed {
        summary.push_str(&format!("\n  failed: {name}"));
    }
    Ok(Output {
        body: to_pretty(&value_of(&report)),
        summary,
        pass: report.pass,
    })
}

fn gadget(cli: &Cli, m: usize, k: i64, z: i64) -> Result<Output, CliError> {
    let plan = GadgetPlan::new(cli.variant, k, m)?;
    let input = random_state(m, cli.seed)?;
    let out = j_gadget(&input, ANCILLA, &plan, z)?;
    let matrix = phasekit::tol::MATRIX;
    let matched = equal_up_to_global_phase(&input, &out.state, matrix);
    let expected = wrap_angle(TAU * (k as f64) * (z as f64) / m as f64);
    let phase_error = wrap_angle(matched.phase - expected).abs();
    let factor = C64::from_polar(1.0, expected);
    let amplitude_error = input
        .amplitudes()
        .iter()
        .zip(out.state.amplitudes())
        .map(|(a, b)| (a * factor - b).norm())
        .fold(0.0, f64::max);
    let pass = matched.equal && phase_error <= matrix && amplitude_error <= matrix;
    let body = json!({
        "M": m,
        "k": k,
        "z": z,
        "variant": cli.variant.name(),
        "seed": cli.seed,
        "measured_phase": matched.phase,
        "expected_phase": expected,
        "phase_error": phase_error,
        "max_amplitude_error": amplitude_error,
        "translations": out.translations,
        "pass": pass,
    });
    Ok(Output {
        body: to_pretty(&body),
        summary: format!(
            "gadget {} M={m} k={k} z={z}: phase {:.12} (expected {:.12}): {}",
            cli.variant,
            matched.phase,
            expected,
            if pass { "PASS" } else { "FAIL" }
        ),
        pass,
    })
}

fn demo_output(v: Value) -> Output {
    let fidelity = v["ancilla_restoration_fidelity"]
        .as_f64()
        .unwrap_or(f64::NAN);
    let headline = match v["app"].as_str() {
        Some("dj") => format!(
            "verdict {}, p_zero {:.12}",
            v["verdict"].as_str().unwrap_or("?"),
            v["p_zero"].as_f64().unwrap_or(f64::NAN)
        ),
        _ => format!(
            "success probability {:.12}",
            v["success_probability"].as_f64().unwrap_or(f64::NAN)
        ),
    };
    Output {
        summary: format!(
            "demo {}: {headline}, oracle calls {}, ancilla restoration fidelity {fidelity:.12}",
            v["app"].as_str().unwrap_or("?"),
            v["oracle_calls"]
        ),
        body: to_pretty(&v),
        pass: true,
    }
}

fn demo(cli: &Cli, app: &DemoApp) -> Result<Output, CliError> {
    fn src(input: &DemoInput, seed: u64) -> TableSource<'_> {
        TableSource {
            table: input.table.as_deref(),
            n: input.n,
            seed,
        }
    }
    let v = match app {
        DemoApp::Dj { input, constant } => {
            demo::dj(&src(input, cli.seed), *constant, input.ancilla, cli.variant)?
        }
        DemoApp::Grover {
            input,
            target,
            solutions,
            iters,
        } => demo::grover_demo(
            &src(input, cli.seed),
            *target,
            *solutions,
            *iters,
            input.ancilla,
            cli.variant,
        )?,
        DemoApp::Ck {
            input,
            target,
            solutions,
            gamma,
            beta,
            mbits,
            pivot,
        } => {
            let params = CkParams {
                gamma: parse_angle(gamma)?,
                beta: parse_angle(beta)?,
                pivot: *pivot,
            };
            demo::ck_demo(
                &src(input, cli.seed),
                *target,
                *solutions,
                params,
                *mbits,
                input.ancilla,
                cli.variant,
            )?
        }
    };
    Ok(demo_output(v))
}

fn bench_cmd(
    cli: &Cli,
    max_n: u32,
    max_m: u32,
    reps: usize,
    mem_budget: Option<u64>,
) -> Result<Output, CliError> {
    let budget = bench::resolve_budget(mem_budget)?;
    let records = bench::run(max_n, max_m, reps, cli.variant, cli.seed, budget)?;
    let mut body = String::new();
    for r in &records {
        body.push_str(&to_line(&value_of(r)));
        body.push('\n');
    }
    body.pop();
    let total: f64 = records.iter().map(|r| r.wall_time).sum();
    Ok(Output {
        body,
        summary: format!(
            "bench: {} records, {total:.6} s total (min over {reps} reps)",
            records.len()
        ),
        pass: true,
    })
}

fn emit(cli: &Cli, out: &Output) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => std::fs::write(path, format!("{}\n", out.body))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{}", out.body)?;
        }
    }
    if !cli.json {
        eprintln!("{}", out.summary);
    }
    Ok(())
}

/// Runs a parsed command line and returns the process exit code:
/// 0 all checks pass, 1 a verification failed, 2 usage or input error.
pub fn run(cli: &Cli) -> i32 {
    let result = match &cli.command {
        Command::Verify { suite, tol } => verify(cli, suite, tol),
        Command::Demo { app } => demo(cli, app),
        Command::Gadget { m, k, z } => gadget(cli, *m, *k, *z),
        Command::Bench {
            max_n,
            max_m,
            reps,
            mem_budget,
        } => bench_cmd(cli, *max_n, *max_m, *reps, *mem_budget),
    };
    match result.and_then(|out| emit(cli, &out).map(|_| out.pass)) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("phasekit: {e}");
            e.exit_code()
        }
    }
}
