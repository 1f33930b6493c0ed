//! The `respnet` command line: check, analyze, ness, render and explain over
//! `.resp` files.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use respnet::analysis::{self, AnalysisConfig, LayerOrder};
use respnet::causal::{self, Literal, NessConfig, DEFAULT_MAX_VARS};
use respnet::diagnostic::{Code, Diagnostic, Severity};
use respnet::dsl;
use respnet::model::{Scenario, Sense, SenseFamily};
use respnet::render::{self, RenderOptions};

pub const EXIT_CLEAN: i32 = 0;
pub const EXIT_ERRORS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const MAX_VARS_ENV: &str = "RESPNET_MAX_VARS";

#[derive(Debug, Parser)]
#[command(
    name = "respnet",
    version,
    about = "Analyze responsibility networks described in .resp files"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse, build and check entailments; diagnostics go to standard error.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        strict_warnings: bool,
        #[command(flatten)]
        cap: Cap,
    },
    /// Run the layered analysis and the detectors.
    Analyze {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = SenseArg::All)]
        sense: SenseArg,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long, value_enum, default_value_t = OrderArg::CausalFirst)]
        order: OrderArg,
        #[arg(long)]
        strict_warnings: bool,
        #[command(flatten)]
        cap: Cap,
    },
    /// Test one literal as a NESS cause and a but-for cause of another.
    Ness {
        file: PathBuf,
        /// VAR or VAR=true|false
        #[arg(long)]
        cause: String,
        /// VAR or VAR=true|false
        #[arg(long)]
        effect: String,
        #[command(flatten)]
        cap: Cap,
    },
    /// Write the network as a DOT graph.
    Render {
        file: PathBuf,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
        /// Comma-separated subset of causal, role, liability, moral
        #[arg(long, value_delimiter = ',', value_enum)]
        senses: Vec<SenseArg>,
        #[arg(long)]
        no_candidates: bool,
        #[arg(long)]
        no_legend: bool,
        #[command(flatten)]
        cap: Cap,
    },
    /// Print the condition ledger for one triple.
    Explain {
        file: PathBuf,
        #[arg(long)]
        subject: String,
        #[arg(long)]
        occurrence: String,
        /// e.g. causal, role(task), liability(civil:negligence)
        #[arg(long)]
        sense: String,
        #[command(flatten)]
        cap: Cap,
    },
}

#[derive(Debug, Args)]
struct Cap {
    /// Largest model the NESS search accepts; overrides RESPNET_MAX_VARS.
    #[arg(long, value_name = "N")]
    max_vars: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SenseArg {
    Causal,
    Role,
    Liability,
    Moral,
    All,
}

impl SenseArg {
    fn families(self) -> Vec<SenseFamily> {
        match self {
            SenseArg::Causal => vec![SenseFamily::Causal],
            SenseArg::Role => vec![SenseFamily::Role],
            SenseArg::Liability => vec![SenseFamily::Liability],
            SenseArg::Moral => vec![SenseFamily::Moral],
            SenseArg::All => SenseFamily::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OrderArg {
    CausalFirst,
    RoleFirst,
}

/// A failure that ends the command.
enum Failure {
    /// Findings were printed; exit 1.
    Findings,
    /// Bad arguments, environment or IO; exit 2.
    Usage(String),
}

type Outcome = Result<i32, Failure>;

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn diagnostics(&mut self, file: &str, diagnostics: &[Diagnostic]) {
        for d in diagnostics {
            let _ = writeln!(self.err, "{}", d.render(file));
        }
    }
}

fn ness_config(cap: &Cap) -> Result<NessConfig, Failure> {
    if let Some(n) = cap.max_vars {
        return Ok(NessConfig::with_max_vars(n));
    }
    match std::env::var(MAX_VARS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(NessConfig::with_max_vars)
            .map_err(|_| Failure::Usage(format!("{MAX_VARS_ENV} must be a non-negative integer, got `{v}`"))),
        Err(_) => Ok(NessConfig::with_max_vars(DEFAULT_MAX_VARS)),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| {
        Failure::Usage(Diagnostic::new(Code::Io, format!("cannot read file: {e}")).render(&path.display().to_string()))
    })
}

fn scenario_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scenario".into())
}

fn exit_for(diagnostics: &[Diagnostic], strict_warnings: bool) -> i32 {
    let fails = |d: &Diagnostic| match d.severity {
        Severity::Error => true,
        Severity::Warning => strict_warnings,
        Severity::Info => false,
    };
    if diagnostics.iter().any(fails) {
        EXIT_ERRORS
    } else {
        EXIT_CLEAN
    }
}

/// Loads a scenario that must build cleanly; otherwise prints the
/// diagnostics.
fn load(io: &mut Io, path: &Path) -> Result<Scenario, Failure> {
    let file = path.display().to_string();
    let source = read(path)?;
    let (scenario, diagnostics) = dsl::load(&file, &source);
    match scenario {
        Some(s) => Ok(s),
        None => {
            io.diagnostics(&file, &diagnostics);
            Err(Failure::Findings)
        }
    }
}

fn check(io: &mut Io, files: &[PathBuf], strict_warnings: bool, cap: &Cap) -> Outcome {
    let config = ness_config(cap)?;
    let mut code = EXIT_CLEAN;
    for path in files {
        let file = path.display().to_string();
        let source = read(path)?;
        let (_, diagnostics) = analysis::check_source(&file, &source, config);
        io.diagnostics(&file, &diagnostics);
        code = code.max(exit_for(&diagnostics, strict_warnings));
    }
    Ok(code)
}

fn analyze(
    io: &mut Io,
    files: &[PathBuf],
    sense: SenseArg,
    format: Format,
    order: OrderArg,
    strict_warnings: bool,
    cap: &Cap,
) -> Outcome {
    let config = AnalysisConfig {
        ness: ness_config(cap)?,
        order: match order {
            OrderArg::CausalFirst => LayerOrder::CausalFirst,
            OrderArg::RoleFirst => LayerOrder::RoleFirst,
        },
    };
    let families = sense.families();
    let mut code = EXIT_CLEAN;
    for path in files {
        let file = path.display().to_string();
        let source = read(path)?;
        match analysis::analyze_source(&file, &scenario_name(path), &source, config) {
            Ok((_, report)) => {
                let text = match format {
                    Format::Json => analysis::to_json(&report, &families),
                    Format::Text => analysis::to_text(&report, &families, &file),
                };
                let _ = io.out.write_all(text.as_bytes());
                code = code.max(exit_for(&report.diagnostics, strict_warnings));
            }
            Err(diagnostics) => {
                match format {
                    Format::Json => {
                        let text = analysis::failure_json(&scenario_name(path), config.order, &diagnostics);
                        let _ = io.out.write_all(text.as_bytes());
                    }
                    Format::Text => io.diagnostics(&file, &diagnostics),
                }
                code = EXIT_ERRORS;
            }
        }
    }
    Ok(code)
}

fn parse_literal(text: &str) -> Result<Literal, Failure> {
    let (var, value) = match text.split_once('=') {
        None => (text, true),
        Some((var, "true")) => (var, true),
        Some((var, "false")) => (var, false),
        Some(_) => return Err(Failure::Usage(format!("expected VAR or VAR=true|false, got `{text}`"))),
    };
    let var = var.trim();
    if var.is_empty() {
        return Err(Failure::Usage(format!("missing variable name in `{text}`")));
    }
    Ok(Literal::new(var, value))
}

fn ness(io: &mut Io, path: &Path, cause: &str, effect: &str, cap: &Cap) -> Outcome {
    let config = ness_config(cap)?;
    let candidate = parse_literal(cause)?;
    let effect = parse_literal(effect)?;
    let scenario = load(io, path)?;
    let file = path.display().to_string();
    let report = |io: &mut Io, d: Diagnostic| {
        io.diagnostics(&file, &[d]);
        Err(Failure::Findings)
    };
    let Some(model) = scenario.model() else {
        return report(io, Diagnostic::new(Code::Model, "the scenario has no model block"));
    };
    let verdict = match causal::ness_cause(model, &candidate, &effect, config) {
        Ok(v) => v,
        Err(e) => return report(io, Diagnostic::new(e.code(), e.to_string())),
    };
    let counterfactual = match causal::but_for(model, &candidate, &effect) {
        Ok(v) => v,
        Err(e) => return report(io, Diagnostic::new(e.code(), e.to_string())),
    };
    let yes_no = |b: bool| if b { "yes" } else { "no" };
    let _ = writeln!(io.out, "NESS: {}", yes_no(verdict.is_cause));
    match &verdict.witness {
        Some(w) => {
            let items: Vec<String> = w.iter().map(Literal::to_string).collect();
            let _ = writeln!(io.out, "witness: {{{}}}", items.join(", "));
        }
        None => {
            let _ = writeln!(io.out, "witness: none");
        }
    }
    let _ = writeln!(io.out, "but-for: {}", yes_no(counterfactual));
    Ok(EXIT_CLEAN)
}

#[allow(clippy::too_many_arguments)]
fn render_cmd(
    io: &mut Io,
    path: &Path,
    output: Option<&Path>,
    senses: &[SenseArg],
    no_candidates: bool,
    no_legend: bool,
    cap: &Cap,
) -> Outcome {
    let config = AnalysisConfig {
        ness: ness_config(cap)?,
        ..AnalysisConfig::default()
    };
    let families: Vec<SenseFamily> = if senses.is_empty() {
        SenseFamily::ALL.to_vec()
    } else {
        senses.iter().flat_map(|s| s.families()).collect()
    };
    let mut options = RenderOptions::with_senses(families).expect("at least one sense");
    options.include_candidates = !no_candidates;
    options.legend = !no_legend;
    let scenario = load(io, path)?;
    let report = analysis::layered_analysis(&scenario, &scenario_name(path), config);
    let dot = match render::to_dot(&scenario, &report, &options) {
        Ok(dot) => dot,
        Err(d) => {
            io.diagnostics(&path.display().to_string(), &[d]);
            return Err(Failure::Findings);
        }
    };
    match output {
        Some(out) => std::fs::write(out, dot).map_err(|e| {
            Failure::Usage(
                Diagnostic::new(Code::Io, format!("cannot write file: {e}")).render(&out.display().to_string()),
            )
        })?,
        None => {
            let _ = io.out.write_all(dot.as_bytes());
        }
    }
    Ok(EXIT_CLEAN)
}

fn explain(io: &mut Io, path: &Path, subject: &str, occurrence: &str, sense: &str, cap: &Cap) -> Outcome {
    let config = AnalysisConfig {
        ness: ness_config(cap)?,
        ..AnalysisConfig::default()
    };
    let sense: Sense = sense.parse().map_err(|e| Failure::Usage(format!("{e}")))?;
    let scenario = load(io, path)?;
    let file = path.display().to_string();
    for id in [subject, occurrence] {
        if !scenario.ids().contains(&id) {
            io.diagnostics(
                &file,
                &[Diagnostic::new(Code::Unresolved, format!("unknown id `{id}`"))],
            );
            return Err(Failure::Findings);
        }
    }
    let report = analysis::layered_analysis(&scenario, &scenario_name(path), config);
    let text = analysis::explain(&scenario, &report, subject, occurrence, sense);
    let _ = io.out.write_all(text.as_bytes());
    Ok(EXIT_CLEAN)
}

/// Runs the command line `argv` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                EXIT_USAGE
            } else {
                let _ = out.write_all(text.as_bytes());
                EXIT_CLEAN
            };
        }
    };
    let mut io = Io { out, err };
    let outcome = match &cli.command {
        Command::Check {
            files,
            strict_warnings,
            cap,
        } => check(&mut io, files, *strict_warnings, cap),
        Command::Analyze {
            files,
            sense,
            format,
            order,
            strict_warnings,
            cap,
        } => analyze(&mut io, files, *sense, *format, *order, *strict_warnings, cap),
        Command::Ness {
            file,
            cause,
            effect,
            cap,
        } => ness(&mut io, file, cause, effect, cap),
        Command::Render {
            file,
            output,
            senses,
            no_candidates,
            no_legend,
            cap,
        } => render_cmd(
            &mut io,
            file,
            output.as_deref(),
            senses,
            *no_candidates,
            *no_legend,
            cap,
        ),
        Command::Explain {
            file,
            subject,
            occurrence,
            sense,
            cap,
        } => explain(&mut io, file, subject, occurrence, sense, cap),
    };
    let code = match outcome {
        Ok(code) => code,
        Err(Failure::Findings) => EXIT_ERRORS,
        Err(Failure::Usage(message)) => {
            let _ = writeln!(io.err, "respnet: {message}");
            EXIT_USAGE
        }
    };
    let _ = io.out.flush();
    code
}
