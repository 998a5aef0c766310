//! The `speechtone` command line.
//!
//! Exit status: 0 on success, 1 on spec or data errors, 2 on I/O or usage
//! errors. Diagnostics go to stderr, artifacts to stdout or `--output`.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::compiler::compile;
use crate::data::{load_dataset, DataSourceRef};
use crate::diagnostic::{Code, Diagnostic, Diagnostics};
use crate::emit::{emit_schedule_json, emit_ssml, emit_trace, SsmlOptions, VoiceMap};
use crate::spec::parse_spec;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_IO: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "speechtone", version, about = "Compile speech sonification specs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a spec and print its diagnostics.
    Validate {
        spec: PathBuf,
    },
    /// Compile a spec and its data into a schedule, SSML or trace.
    Compile(CompileArgs),
}

#[derive(Debug, Args)]
pub struct CompileArgs {
    pub spec: PathBuf,
    /// Data file to use instead of the spec's data source (.csv or .json).
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Schedule)]
    pub format: OutputFormat,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// JSON object mapping voice IDs to engine voice names (SSML only).
    #[arg(long)]
    pub voice_map: Option<PathBuf>,
    /// Announce the mappings before the data, even if the spec does not ask to.
    #[arg(long)]
    pub prelude: bool,
    /// Pause between utterances in SSML output, in milliseconds.
    #[arg(long, default_value_t = 300)]
    pub break_ms: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Schedule,
    Ssml,
    Trace,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_IO } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Validate { spec } => cmd_validate(&spec, stderr),
        Command::Compile(args) => cmd_compile(&args, stdout, stderr),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(failure) => {
            report(stderr, &failure.diagnostics);
            failure.exit_code
        }
    }
}

struct Failure {
    exit_code: i32,
    diagnostics: Vec<Diagnostic>,
}

impl From<Diagnostics> for Failure {
    fn from(d: Diagnostics) -> Self {
        let io = d.contains(Code::E_DATA_UNREADABLE);
        Failure { exit_code: if io { EXIT_IO } else { EXIT_INVALID }, diagnostics: d.0 }
    }
}

impl From<Diagnostic> for Failure {
    fn from(d: Diagnostic) -> Self {
        Diagnostics(vec![d]).into()
    }
}

fn io_failure(message: String) -> Failure {
    Failure { exit_code: EXIT_IO, diagnostics: vec![Diagnostic::new(Code::E_DATA_UNREADABLE, "", message)] }
}

fn report(stderr: &mut dyn Write, diags: &[Diagnostic]) {
    for d in diags {
        let _ = writeln!(stderr, "{d}");
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| io_failure(format!("cannot read {}: {e}", path.display())))
}

fn cmd_validate(spec_path: &Path, stderr: &mut dyn Write) -> Result<(), Failure> {
    let parsed = parse_spec(&read(spec_path)?)?;
    report(stderr, &parsed.warnings);
    Ok(())
}

fn cmd_compile(args: &CompileArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    let parsed = parse_spec(&read(&args.spec)?)?;
    report(stderr, &parsed.warnings);
    let mut spec = parsed.document;
    spec.prelude_enabled |= args.prelude;

    let source = match (&args.data, &spec.data_source) {
        (Some(path), _) => DataSourceRef::from_path(path),
        (None, Some(src)) => src.relative_to(args.spec.parent().unwrap_or(Path::new(""))),
        (None, None) => {
            return Err(Diagnostic::new(Code::E_MISSING_DATA, "data", "spec has no data source; pass --data").into())
        }
    };
    let dataset = load_dataset(&source)?;
    let compiled = compile(&spec, &dataset)?;
    report(stderr, &compiled.warnings);

    let artifact = match args.format {
        OutputFormat::Schedule => emit_schedule_json(&compiled.schedule),
        OutputFormat::Trace => emit_trace(&compiled.schedule),
        OutputFormat::Ssml => {
            let voices = match &args.voice_map {
                Some(path) => VoiceMap::from_json(&read(path)?).map_err(|d| d.under("voiceMap"))?,
                None => {
                    report(
                        stderr,
                        &[Diagnostic::new(
                            Code::W_DEFAULT_VOICE_MAP,
                            "",
                            "no voice map given; every voice ID uses the default voice",
                        )],
                    );
                    VoiceMap::builtin()
                }
            };
            let options = SsmlOptions { break_ms: args.break_ms, ..SsmlOptions::default() };
            let out = emit_ssml(&compiled.schedule, &voices, &options);
            if args.voice_map.is_some() {
                report(stderr, &out.warnings);
            }
            out.document
        }
    };

    match &args.output {
        Some(path) => write_atomic(path, artifact.as_bytes())
            .map_err(|e| io_failure(format!("cannot write {}: {e}", path.display()))),
        None => stdout
            .write_all(artifact.as_bytes())
            .map_err(|e| io_failure(format!("cannot write to stdout: {e}"))),
    }
}

/// Writes through a temporary file in the target directory, then renames.
fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture(name: &str) -> String {
        format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
    }

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("speechtone").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn validate_demo1_is_silent() {
        let (code, out, err) = run_args(&["validate", &fixture("demo1.json")]);
        assert_eq!((code, out.as_str(), err.as_str()), (0, "", ""));
    }

    #[test]
    fn missing_file_is_io_error() {
        let (code, _, err) = run_args(&["validate", "/nonexistent/spec.json"]);
        assert_eq!(code, EXIT_IO);
        assert!(err.contains("cannot read"));
    }

    #[test]
    fn usage_error_exits_2() {
        assert_eq!(run_args(&["frobnicate"]).0, EXIT_IO);
        assert_eq!(run_args(&["compile", "x.json", "--format", "mp3"]).0, EXIT_IO);
        assert_eq!(run_args(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn ssml_without_voice_map_warns() {
        let (code, out, err) =
            run_args(&["compile", &fixture("demo1.json"), "--data", &fixture("table1.csv"), "--format", "ssml"]);
        assert_eq!(code, 0, "{err}");
        assert!(err.contains("W_DEFAULT_VOICE_MAP"));
        assert!(!err.contains("W_VOICE_UNMAPPED"));
        assert!(out.starts_with("<?xml"));
    }

    #[test]
    fn data_override_and_prelude_flag() {
        let (code, out, _) = run_args(&[
            "compile",
            &fixture("demo1.json"),
            "--data",
            &fixture("table1.json"),
            "--format",
            "trace",
            "--prelude",
        ]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert!(lines[0].starts_with("P#0 \"Pitch represents count of records per Origin"));
        assert_eq!(lines.len(), 4);
    }

    #[test]
    fn failed_compile_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let spec = dir.path().join("spec.json");
        fs::write(
            &spec,
            r#"{"tone": {"type": "speechtone"}, "data": {"values": [{"a": 1}]},
                "encoding": {"time": {"field": "missing"}}}"#,
        )
        .unwrap();
        let out = dir.path().join("out.json");
        let (code, _, err) = run_args(&["compile", spec.to_str().unwrap(), "-o", out.to_str().unwrap()]);
        assert_eq!(code, EXIT_INVALID);
        assert!(err.contains("E_UNKNOWN_FIELD"), "{err}");
        assert!(!out.exists());
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
