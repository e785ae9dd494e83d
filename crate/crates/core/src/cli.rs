//! Command-line front end. Exit codes: 0 success or true, 1 false, no
//! solution or violations found, 2 usage, input or parse error.
//!
//! Every file starts with a header line `# betweenness <kind> v1`; a
//! missing header is accepted on input, a wrong kind or version is not.
//! Outputs go to `-o` via write-then-rename, or to stdout.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::defgen::{self, DefgenError};
use crate::folang::{eval_sentence, parse_with_constants, EvalError, FiniteStructure, ParseError, StructureError};
use crate::frames::{
    extract_torus, relevant_closure, synthesize_frame, validate_frame, FiniteCartesianFrame, FrameError,
};
use crate::interp::InterpError;
use crate::tiling::{
    build_grid, build_torus, expand_with_labels, is_valid_tiling, recurrent_sentence, solve_torus,
    tiling_sentence, Labelling, TileSet, TilingError,
};
use crate::verify::{self, SuiteReport};

/// Largest closure whose betweenness table `frame closure` writes out.
pub const MAX_CLOSURE_TABLE: usize = 200;

const VERSION: &str = "v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Formula,
    Scheme,
    Structure,
    Tiles,
    Labelling,
    Frame,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Formula => "formula",
            Kind::Scheme => "scheme",
            Kind::Structure => "structure",
            Kind::Tiles => "tiles",
            Kind::Labelling => "labelling",
            Kind::Frame => "frame",
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: expected a `{expected}` {VERSION} file, found header `{found}`")]
    Header {
        path: PathBuf,
        expected: &'static str,
        found: String,
    },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Tiling(#[from] TilingError),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Defgen(#[from] DefgenError),
    #[error(transparent)]
    Interp(#[from] InterpError),
}

/// `body` under its header line, newline-terminated.
pub fn with_header(kind: Kind, body: &str) -> String {
    format!("# betweenness {} {VERSION}\n{}\n", kind.name(), body.trim_end())
}

/// The body of `text` after an optional header of the given kind.
pub fn strip_header<'t>(kind: Kind, text: &'t str, path: &Path) -> Result<&'t str, CliError> {
    let Some(rest) = text.strip_prefix("# betweenness ") else {
        return Ok(text);
    };
    let (line, body) = rest.split_once('\n').unwrap_or((rest, ""));
    if line.trim() != format!("{} {VERSION}", kind.name()) {
        return Err(CliError::Header {
            path: path.to_path_buf(),
            expected: kind.name(),
            found: line.trim().to_string(),
        });
    }
    Ok(body)
}

fn read(kind: Kind, path: &Path) -> Result<String, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(strip_header(kind, &text, path)?.to_string())
}

/// Writes to a sibling temporary file, then renames it over `path`.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let name = path
        .file_name()
        .ok_or_else(|| CliError::Usage(format!("{} is not a file path", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    fs::write(&tmp, contents).map_err(io)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io(e)
    })
}

#[derive(Parser, Debug)]
#[command(name = "betweenness", version, about = "Betweenness geometry, tilings and frames")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a generated sentence or interpretation scheme.
    Compile {
        what: Compiled,
        #[arg(long)]
        tiles: Option<PathBuf>,
        /// Dimension for `finiteness`.
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Position in the tile file of the recurring tile for `recurrent`.
        #[arg(long, default_value_t = 0)]
        recurring: usize,
        #[arg(short = 'o')]
        out: Option<PathBuf>,
    },
    /// Evaluate a sentence on a structure, or on a frame's relevant closure.
    Mc {
        #[arg(long)]
        formula: PathBuf,
        #[arg(long, conflicts_with = "frame", required_unless_present = "frame")]
        structure: Option<PathBuf>,
        #[arg(long)]
        frame: Option<PathBuf>,
    },
    Tiles {
        #[command(subcommand)]
        command: TilesCommand,
    },
    Frame {
        #[command(subcommand)]
        command: FrameCommand,
    },
    /// Run a property suite; exits 0 only if every case passes.
    Verify {
        suite: Suite,
        #[arg(long)]
        tiles: Option<PathBuf>,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
        max: u64,
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
        cases: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Compiled {
    Tiling,
    Recurrent,
    FrameInf,
    FrameFin,
    ReductionGrid,
    ReductionTorus,
    Omega,
    Finiteness,
    SchemeGrid,
    SchemeTorus,
    SchemeRecurrence,
}

#[derive(Subcommand, Debug)]
enum TilesCommand {
    /// Find the smallest torus the tiles cover.
    Solve {
        #[arg(long)]
        tiles: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        max: u64,
        #[arg(short = 'o')]
        out: Option<PathBuf>,
    },
    /// Check a labelled torus (or grid); `-o` writes the labelled structure.
    Check {
        #[arg(long)]
        tiles: PathBuf,
        #[arg(long)]
        torus: PathBuf,
        #[arg(long)]
        grid: bool,
        #[arg(short = 'o')]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum FrameCommand {
    /// Build the S-labelled frame of a labelled torus.
    Synth {
        #[arg(long)]
        tiles: PathBuf,
        #[arg(long)]
        torus: PathBuf,
        #[arg(short = 'o')]
        out: Option<PathBuf>,
    },
    /// Read the labelled torus back off a frame.
    Extract {
        #[arg(long)]
        tiles: PathBuf,
        #[arg(long)]
        frame: PathBuf,
        #[arg(short = 'o')]
        out: Option<PathBuf>,
    },
    /// List violations of the finite frame conditions and labelling.
    Validate {
        #[arg(long)]
        tiles: PathBuf,
        #[arg(long)]
        frame: PathBuf,
    },
    /// Write the relevant closure as a structure.
    Closure {
        #[arg(long)]
        frame: PathBuf,
        #[arg(short = 'o')]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Suite {
    Roundtrip,
    Lemma1,
    Dualpath,
}

struct Io<'a> {
    out: &'a mut dyn Write,
}

impl Io<'_> {
    fn emit(&mut self, dest: Option<&Path>, kind: Kind, body: &str) -> Result<(), CliError> {
        let text = with_header(kind, body);
        match dest {
            Some(p) => write_atomic(p, &text),
            None => self.say(text.trim_end()),
        }
    }

    fn say(&mut self, line: &str) -> Result<(), CliError> {
        writeln!(self.out, "{line}").map_err(|source| CliError::Io {
            path: PathBuf::from("<stdout>"),
            source,
        })
    }
}

fn tiles_at(path: &Path) -> Result<TileSet, CliError> {
    Ok(TileSet::from_json(&read(Kind::Tiles, path)?)?)
}

fn need_tiles(tiles: &Option<PathBuf>, what: &str) -> Result<TileSet, CliError> {
    let path = tiles
        .as_ref()
        .ok_or_else(|| CliError::Usage(format!("`{what}` needs --tiles")))?;
    tiles_at(path)
}

/// Parses `argv` (including the program name) and runs it.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match execute(cli.command, &mut Io { out }) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn execute(command: Command, io: &mut Io<'_>) -> Result<i32, CliError> {
    match command {
        Command::Compile {
            what,
            tiles,
            dim,
            recurring,
            out,
        } => compile(what, &tiles, dim, recurring, out.as_deref(), io),
        Command::Mc {
            formula,
            structure,
            frame,
        } => {
            let s = match (structure, frame) {
                (Some(p), _) => FiniteStructure::from_json(&read(Kind::Structure, &p)?)?,
                (None, Some(p)) => {
                    relevant_closure(&FiniteCartesianFrame::from_json(&read(Kind::Frame, &p)?)?)?.structure
                }
                (None, None) => unreachable!("clap requires one"),
            };
            let constants = s.constants().keys().cloned().collect();
            let f = parse_with_constants(&read(Kind::Formula, &formula)?, &constants)?;
            let holds = eval_sentence(&s, &f)?;
            io.say(if holds { "true" } else { "false" })?;
            Ok(if holds { 0 } else { 1 })
        }
        Command::Tiles { command } => tiles_command(command, io),
        Command::Frame { command } => frame_command(command, io),
        Command::Verify {
            suite,
            tiles,
            max,
            cases,
            seed,
        } => {
            let tiles = tiles.as_deref().map(tiles_at).transpose()?;
            let (max, cases) = (max as usize, cases as usize);
            let report = match suite {
                Suite::Roundtrip => verify::roundtrip(&verify::frame_cases(tiles.as_ref(), max, cases, seed)),
                Suite::Dualpath => verify::dualpath(&verify::frame_cases(tiles.as_ref(), max, cases, seed)),
                Suite::Lemma1 => verify::lemma1(cases, 3, max.max(1), seed),
            };
            report_suite(&report, io)
        }
    }
}

fn report_suite(report: &SuiteReport, io: &mut Io<'_>) -> Result<i32, CliError> {
    for f in &report.failures {
        io.say(&format!("FAIL {f}"))?;
    }
    let passed = report.passed();
    io.say(&format!(
        "{} {} cases, {} failed",
        if passed { "PASS" } else { "FAIL" },
        report.cases,
        report.failures.len()
    ))?;
    Ok(if passed { 0 } else { 1 })
}

fn compile(
    what: Compiled,
    tiles: &Option<PathBuf>,
    dim: usize,
    recurring: usize,
    out: Option<&Path>,
    io: &mut Io<'_>,
) -> Result<i32, CliError> {
    let name = format!("{what:?}");
    let formula = match what {
        Compiled::Omega => defgen::omega_sentence(),
        Compiled::Finiteness => defgen::finiteness_sentence(dim)?,
        Compiled::SchemeGrid | Compiled::SchemeTorus | Compiled::SchemeRecurrence => {
            let s = need_tiles(tiles, &name)?;
            let scheme = match what {
                Compiled::SchemeGrid => defgen::scheme_grid(&s)?,
                Compiled::SchemeTorus => defgen::scheme_torus(&s)?,
                _ => defgen::scheme_recurrence(&s)?,
            };
            io.emit(out, Kind::Scheme, &scheme.to_text())?;
            return Ok(0);
        }
        _ => {
            let s = need_tiles(tiles, &name)?;
            match what {
                Compiled::Tiling => tiling_sentence(&s),
                Compiled::Recurrent => {
                    let t = s
                        .tiles()
                        .get(recurring)
                        .ok_or_else(|| CliError::Usage(format!("no tile at position {recurring}")))?;
                    recurrent_sentence(t, &s)?
                }
                Compiled::FrameInf => defgen::frame_sentence_infinite(&s)?,
                Compiled::FrameFin => defgen::frame_sentence_finite(&s)?,
                Compiled::ReductionGrid => defgen::reduction_sentence_grid(&s)?,
                _ => defgen::reduction_sentence_torus(&s)?,
            }
        }
    };
    io.emit(out, Kind::Formula, &formula.to_string())?;
    Ok(0)
}

fn tiles_command(command: TilesCommand, io: &mut Io<'_>) -> Result<i32, CliError> {
    match command {
        TilesCommand::Solve { tiles, max, out } => {
            let s = tiles_at(&tiles)?;
            match solve_torus(&s, max as usize, max as usize) {
                Some((m, k, l)) => {
                    io.say(&format!("({m},{k})"))?;
                    io.emit(out.as_deref(), Kind::Labelling, &l.to_json(&s)?)?;
                    Ok(0)
                }
                None => {
                    io.say("no solution")?;
                    Ok(1)
                }
            }
        }
        TilesCommand::Check {
            tiles,
            torus,
            grid,
            out,
        } => {
            let s = tiles_at(&tiles)?;
            let l = Labelling::from_json(&read(Kind::Labelling, &torus)?, &s)?;
            let m = if grid {
                build_grid(l.m(), l.n())?
            } else {
                build_torus(l.m(), l.n())?
            };
            let labels = l.by_id();
            if let Some(p) = out {
                let expanded = expand_with_labels(&m, &s, &labels)?;
                write_atomic(&p, &with_header(Kind::Structure, &expanded.to_json(0)?))?;
            }
            let valid = is_valid_tiling(&m, &s, &labels)?;
            io.say(if valid { "valid" } else { "invalid" })?;
            Ok(if valid { 0 } else { 1 })
        }
    }
}

fn frame_command(command: FrameCommand, io: &mut Io<'_>) -> Result<i32, CliError> {
    let frame_at = |p: &Path| -> Result<FiniteCartesianFrame, CliError> {
        Ok(FiniteCartesianFrame::from_json(&read(Kind::Frame, p)?)?)
    };
    match command {
        FrameCommand::Synth { tiles, torus, out } => {
            let s = tiles_at(&tiles)?;
            let l = Labelling::from_json(&read(Kind::Labelling, &torus)?, &s)?;
            let f = synthesize_frame(l.m(), l.n(), &l, &s)?;
            io.emit(out.as_deref(), Kind::Frame, &f.to_json())?;
            Ok(0)
        }
        FrameCommand::Extract { tiles, frame, out } => {
            let s = tiles_at(&tiles)?;
            let f = frame_at(&frame)?;
            match extract_torus(&f, &s) {
                Ok((_, l)) => {
                    io.emit(out.as_deref(), Kind::Labelling, &l.to_json(&s)?)?;
                    Ok(0)
                }
                Err(e @ (FrameError::Invalid(_) | FrameError::UnknownLabel { .. })) => {
                    io.say(&e.to_string())?;
                    Ok(1)
                }
                Err(e) => Err(e.into()),
            }
        }
        FrameCommand::Validate { tiles, frame } => {
            let s = tiles_at(&tiles)?;
            let violations = validate_frame(&frame_at(&frame)?, &s);
            for v in &violations {
                io.say(&v.to_string())?;
            }
            if violations.is_empty() {
                io.say("valid")?;
            }
            Ok(if violations.is_empty() { 0 } else { 1 })
        }
        FrameCommand::Closure { frame, out } => {
            let c = relevant_closure(&frame_at(&frame)?)?;
            io.emit(out.as_deref(), Kind::Structure, &c.structure.to_json(MAX_CLOSURE_TABLE)?)?;
            Ok(0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("betweenness").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn headers() {
        let p = Path::new("x");
        let text = with_header(Kind::Tiles, "{}");
        assert_eq!(text, "# betweenness tiles v1\n{}\n");
        assert_eq!(strip_header(Kind::Tiles, &text, p).unwrap(), "{}\n");
        assert_eq!(strip_header(Kind::Tiles, "{}", p).unwrap(), "{}");
        assert!(strip_header(Kind::Frame, &text, p).is_err());
        assert!(strip_header(Kind::Tiles, "# betweenness tiles v2\n{}", p).is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_args(&[]).0, 2);
        assert_eq!(run_args(&["compile", "nonsense"]).0, 2);
        assert_eq!(run_args(&["compile", "tiling"]).0, 2);
        assert_eq!(run_args(&["verify", "roundtrip", "--max", "0"]).0, 2);
        assert_eq!(run_args(&["--help"]).0, 0);
    }

    #[test]
    fn compile_to_stdout() {
        let (code, out, _) = run_args(&["compile", "finiteness", "--dim", "1"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("# betweenness formula v1\n"));
        let (code, out, _) = run_args(&["compile", "omega"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 2);
        assert_eq!(run_args(&["compile", "finiteness", "--dim", "0"]).0, 2);
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.txt");
        write_atomic(&p, "one").unwrap();
        write_atomic(&p, "two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
