//! Command-line front end.
//!
//! Three batch commands: `interpret` runs the full pipeline on one scene,
//! `check` validates a rule pack against a domain model, and `render`
//! draws a scene (optionally overlaying one interpretation from a saved
//! report) as SVG.
//!
//! Exit codes: 0 on success, 1 for I/O and input parse errors, 2 for
//! validation and semantic errors (bad rules, cyclic hierarchies, scenes
//! that fail validation, ranks out of range).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::domain::DomainModel;
use crate::engine::DEFAULT_MAX_NODES;
use crate::pipeline::{self, InterpretationReport, PipelineError};
use crate::render;
use crate::report::ReportDoc;
use crate::rules::{self, RuleSet};
use crate::scene::{InputScene, SceneError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Parser)]
#[command(
    name = "scene-interp",
    version,
    about = "Rule-driven interpretation of classified bounding boxes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate, rank, and print the interpretations of a scene.
    Interpret(InterpretArgs),
    /// Parse a rule pack and a domain model and report diagnostics.
    Check(CheckArgs),
    /// Draw a scene as SVG, optionally overlaying one interpretation.
    Render(RenderArgs),
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    /// Ranked one-line renderings.
    Text,
    /// The full JSON report document.
    Structured,
}

#[derive(Args)]
struct InterpretArgs {
    /// Scene file; `.json` is read as structured input, anything else as
    /// facts.
    #[arg(long)]
    scene: PathBuf,
    /// Rule pack file.
    #[arg(long)]
    rules: PathBuf,
    /// Domain model file.
    #[arg(long)]
    domain: PathBuf,
    /// List only interpretations not derivable from another one.
    #[arg(long)]
    filtered: bool,
    /// Accepted for compatibility; interpretations are always distinct.
    #[arg(long)]
    distinct: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Abort if the scene graph grows beyond this many nodes.
    #[arg(long, default_value_t = DEFAULT_MAX_NODES)]
    max_nodes: usize,
    /// Write the output here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    /// Rule pack file.
    #[arg(long)]
    rules: PathBuf,
    /// Domain model file.
    #[arg(long)]
    domain: PathBuf,
}

#[derive(Args)]
struct RenderArgs {
    /// Scene file; `.json` is read as structured input, anything else as
    /// facts.
    #[arg(long)]
    scene: PathBuf,
    /// Report produced by `interpret --format structured`; enables the
    /// interpretation overlay.
    #[arg(long)]
    report: Option<PathBuf>,
    /// 1-based rank of the interpretation to draw from the report.
    #[arg(long, default_value_t = 1)]
    rank: usize,
    /// Write the SVG here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Entry point for `main`: real process arguments and streams.
pub fn run() -> i32 {
    let args: Vec<String> = std::env::args().collect();
    run_with(&args, &mut std::io::stdout(), &mut std::io::stderr())
}

/// Runs the CLI against explicit arguments and output streams, returning
/// the exit code. `args[0]` is the program name.
pub fn run_with<O: Write, E: Write>(args: &[String], stdout: &mut O, stderr: &mut E) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err)
            if matches!(
                err.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) =>
        {
            let _ = write!(stdout, "{err}");
            return EXIT_OK;
        }
        Err(err) => {
            let _ = write!(stderr, "{err}");
            return EXIT_INVALID;
        }
    };
    match cli.command {
        Command::Interpret(args) => cmd_interpret(&args, stdout, stderr),
        Command::Check(args) => cmd_check(&args, stdout, stderr),
        Command::Render(args) => cmd_render(&args, stdout, stderr),
    }
}

fn cmd_interpret<O: Write, E: Write>(args: &InterpretArgs, stdout: &mut O, stderr: &mut E) -> i32 {
    if args.distinct {
        let _ = writeln!(
            stderr,
            "note: --distinct has no effect, interpretations are always distinct"
        );
    }
    let (domain, pack) = match load_domain_and_rules(&args.domain, &args.rules, stderr) {
        Ok(loaded) => loaded,
        Err(code) => return code,
    };
    let scene = match load_scene(&args.scene, stderr) {
        Ok(scene) => scene,
        Err(code) => return code,
    };
    let report = match pipeline::interpret_scene(&scene, &domain, &pack, args.max_nodes) {
        Ok(report) => report,
        Err(PipelineError::Scene(e)) => return fail_invalid(stderr, &args.scene, &e),
        Err(e) => return fail_invalid(stderr, &args.rules, &e),
    };
    let output = match args.format {
        Format::Text => text_output(&report, args.filtered),
        Format::Structured => ReportDoc::from_report(&report).to_json_string(),
    };
    emit(&output, args.out.as_deref(), stdout, stderr)
}

fn cmd_check<O: Write, E: Write>(args: &CheckArgs, stdout: &mut O, stderr: &mut E) -> i32 {
    let (domain, pack) = match load_domain_and_rules(&args.domain, &args.rules, stderr) {
        Ok(loaded) => loaded,
        Err(code) => return code,
    };
    let warnings =
        domain.warnings.len() + pack.warnings.len() + rules::validate_rules(&pack, &domain).len();
    let _ = writeln!(
        stdout,
        "ok: {} rules, {} taxonomy facts, {} warnings",
        pack.rules.len(),
        domain.subclass_facts().len() + domain.interpretation_facts().len(),
        warnings
    );
    EXIT_OK
}

fn cmd_render<O: Write, E: Write>(args: &RenderArgs, stdout: &mut O, stderr: &mut E) -> i32 {
    let scene = match load_scene(&args.scene, stderr) {
        Ok(scene) => scene,
        Err(code) => return code,
    };
    let svg = match &args.report {
        None => render::render_scene_svg(&scene),
        Some(report_path) => {
            let text = match read(report_path, stderr) {
                Ok(text) => text,
                Err(code) => return code,
            };
            let doc = match ReportDoc::parse(&text) {
                Ok(doc) => doc,
                Err(e) => return fail_io(stderr, report_path, &e),
            };
            match doc.interpretations.get(args.rank.wrapping_sub(1)) {
                Some(entry) => render::render_interpretation_svg(entry),
                None => {
                    let _ = writeln!(
                        stderr,
                        "error: {}: rank {} is out of range, the report holds {} interpretations",
                        report_path.display(),
                        args.rank,
                        doc.interpretations.len()
                    );
                    return EXIT_INVALID;
                }
            }
        }
    };
    emit(&svg, args.out.as_deref(), stdout, stderr)
}

fn load_domain_and_rules<E: Write>(
    domain_path: &Path,
    rules_path: &Path,
    stderr: &mut E,
) -> Result<(DomainModel, RuleSet), i32> {
    let domain_text = read(domain_path, stderr)?;
    let domain =
        DomainModel::parse(&domain_text).map_err(|e| fail_invalid(stderr, domain_path, &e))?;
    for warning in &domain.warnings {
        let _ = writeln!(stderr, "warning: {}: {warning}", domain_path.display());
    }
    let rules_text = read(rules_path, stderr)?;
    let pack = rules::parse_rules(&rules_text).map_err(|e| fail_invalid(stderr, rules_path, &e))?;
    for warning in &pack.warnings {
        let _ = writeln!(stderr, "warning: {}: {warning}", rules_path.display());
    }
    for warning in rules::validate_rules(&pack, &domain) {
        let _ = writeln!(stderr, "warning: {}: {warning}", rules_path.display());
    }
    Ok((domain, pack))
}

fn load_scene<E: Write>(path: &Path, stderr: &mut E) -> Result<InputScene, i32> {
    let text = read(path, stderr)?;
    let is_json = path
        .extension()
        .is_some_and(|ext| ext.eq_ignore_ascii_case("json"));
    let parsed = if is_json {
        InputScene::parse_json(&text)
    } else {
        InputScene::parse_facts(&text)
    };
    parsed.map_err(|e| match e {
        SceneError::Syntax(_) | SceneError::Json(_) => fail_io(stderr, path, &e),
        other => fail_invalid(stderr, path, &other),
    })
}

fn read<E: Write>(path: &Path, stderr: &mut E) -> Result<String, i32> {
    fs::read_to_string(path).map_err(|e| fail_io(stderr, path, &e))
}

fn emit<O: Write, E: Write>(
    output: &str,
    out: Option<&Path>,
    stdout: &mut O,
    stderr: &mut E,
) -> i32 {
    match out {
        None => {
            let _ = stdout.write_all(output.as_bytes());
            EXIT_OK
        }
        Some(path) => match fs::write(path, output) {
            Ok(()) => EXIT_OK,
            Err(e) => fail_io(stderr, path, &e),
        },
    }
}

fn fail_io<E: Write>(stderr: &mut E, path: &Path, err: &dyn std::fmt::Display) -> i32 {
    let _ = writeln!(stderr, "error: {}: {err}", path.display());
    EXIT_IO
}

fn fail_invalid<E: Write>(stderr: &mut E, path: &Path, err: &dyn std::fmt::Display) -> i32 {
    let _ = writeln!(stderr, "error: {}: {err}", path.display());
    EXIT_INVALID
}

fn text_output(report: &InterpretationReport, filtered_only: bool) -> String {
    let mut out = format!(
        "all: {}, filtered: {}\n",
        report.all.len(),
        report.filtered_count()
    );
    for interp in &report.all {
        if filtered_only && !interp.filtered {
            continue;
        }
        out.push_str(&format!(
            "{}. (weight {}) {}\n",
            interp.rank,
            interp.weight,
            report.rendering_of(interp)
        ));
    }
    out
}
