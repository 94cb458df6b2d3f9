//! Command-line front end. Exit codes: 0 success, 1 internal failure or a
//! violated law, 2 bad input, 3 law-suite budget exceeded.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::laws::{run_suite, Caps, Outcome, SuiteReport, SUITES};
use crate::metric::{ExtReal, FinMetricSpace, FnTable, Subset};
use crate::metricgames::sel_distance;
use crate::opengame::{nash_tensor_game, seq_compose, t_eps_game, OpenGame};
use crate::selection::{t_eps, SelectionFunction};
use crate::specio::{display_value, k_key, parse, serialize, Body, SelectionDoc, SpecDocument};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Records,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ComposeMode {
    Seq,
    Tensor,
}

#[derive(Debug, Parser)]
#[command(name = "agt", version, about = "Approximate equilibria of finite selection functions and open games")]
pub struct Cli {
    /// Approximation radius in grid units, or "inf".
    #[arg(long, global = true, default_value = "0")]
    pub eps: ExtReal,
    #[arg(long, global = true, default_value_t = 3)]
    pub max_x: usize,
    /// Largest utility value of the law-suite grids.
    #[arg(long, global = true, default_value_t = 4)]
    pub max_v: u64,
    #[arg(long, global = true, default_value_t = 2)]
    pub max_sigma: usize,
    #[arg(long, global = true, default_value_t = 2)]
    pub eps_steps: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Wall-clock limit for law suites.
    #[arg(long, global = true)]
    pub budget_secs: Option<u64>,
    /// Run law suites on one thread.
    #[arg(long, global = true)]
    pub sequential: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the selected actions or equilibrium contexts of a document.
    Solve { path: PathBuf },
    /// The same listing after approximation by --eps, with the added contexts.
    Approx { path: PathBuf },
    /// Distance between two selection documents over the same object.
    Distance { a: PathBuf, b: PathBuf },
    /// Run a law suite, or "all".
    Laws { suite: String },
    /// Compose two documents; seq plays A first, then B.
    Compose { mode: ComposeMode, a: PathBuf, b: PathBuf, out: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub caps: Caps,
    pub eps: ExtReal,
    pub format: Format,
    pub budget: Option<Duration>,
}

impl Cli {
    pub fn config(&self) -> Result<RunConfig> {
        if self.max_x == 0 || self.max_v == 0 || self.max_sigma == 0 || self.eps_steps == 0 {
            return Err(Error::invalid("--max-x, --max-v, --max-sigma and --eps-steps must be positive"));
        }
        if self.max_x > 6 {
            return Err(Error::invalid("--max-x above 6 is out of reach"));
        }
        let exec = if self.sequential { Exec::Sequential } else { Exec::default() };
        Ok(RunConfig {
            caps: Caps {
                max_x: self.max_x,
                max_v: self.max_v,
                max_sigma: self.max_sigma,
                eps_steps: self.eps_steps,
                seed: self.seed,
                exec,
            },
            eps: self.eps,
            format: self.format,
            budget: self.budget_secs.map(Duration::from_secs),
        })
    }
}

enum Failure {
    Input(String),
    Internal(String),
    Laws,
    Budget(Duration),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn internal(e: std::io::Error) -> Failure {
    Failure::Internal(e.to_string())
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    let result = cli.config().map_err(Failure::from).and_then(|config| execute(&cli.command, &config, out));
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Input(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_INPUT
        }
        Err(Failure::Internal(m)) => {
            let _ = writeln!(err, "internal error: {m}");
            EXIT_INTERNAL
        }
        Err(Failure::Laws) => EXIT_INTERNAL,
        Err(Failure::Budget(d)) => {
            let _ = writeln!(err, "error: law suite exceeded the {}s budget; coverage incomplete", d.as_secs());
            EXIT_BUDGET
        }
    }
}

fn execute(command: &Command, config: &RunConfig, out: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Solve { path } => {
            let doc = read_document(path)?;
            out.write_all(listing(&doc, ExtReal::ZERO, config.format)?.as_bytes()).map_err(internal)
        }
        Command::Approx { path } => {
            let doc = read_document(path)?;
            out.write_all(listing(&doc, config.eps, config.format)?.as_bytes()).map_err(internal)
        }
        Command::Distance { a, b } => {
            let (da, db) = (read_document(a)?, read_document(b)?);
            let (sa, sb) = (selection_of(&da, a)?, selection_of(&db, b)?);
            if da.unit != db.unit {
                return Err(Failure::Input(format!("documents use different units ({} and {})", da.unit, db.unit)));
            }
            let d = sel_distance(&sa.function, &sb.function)?;
            let shown = display_value(d.value, &da.unit);
            let text = match (config.format, d.witnessed) {
                (Format::Text, true) => format!("distance {} units = {shown} (unit {})\n", d.value, da.unit),
                (Format::Text, false) => "distance inf: no radius relates the two\n".to_string(),
                (Format::Records, _) => format!("distance\t{}\t{shown}\t{}\n", d.value, d.witnessed),
            };
            out.write_all(text.as_bytes()).map_err(internal)
        }
        Command::Laws { suite } => run_laws(suite, config, out),
        Command::Compose { mode, a, b, out: path } => {
            let (da, db) = (read_document(a)?, read_document(b)?);
            if da.unit != db.unit {
                return Err(Failure::Input(format!("documents use different units ({} and {})", da.unit, db.unit)));
            }
            let body = compose(*mode, &da.body, &db.body)?;
            let text = serialize(&SpecDocument { unit: da.unit, body });
            std::fs::write(path, text).map_err(|e| Failure::Internal(format!("{}: {e}", path.display())))
        }
    }
}

fn read_document(path: &Path) -> Result<SpecDocument, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn selection_of<'a>(doc: &'a SpecDocument, path: &Path) -> Result<&'a SelectionDoc, Failure> {
    match &doc.body {
        Body::Selection(s) => Ok(s),
        other => Err(Failure::Input(format!("{}: expected a selection document, found {}", path.display(), other.kind()))),
    }
}

fn compose(mode: ComposeMode, a: &Body, b: &Body) -> Result<Body, Failure> {
    match (mode, a, b) {
        (ComposeMode::Seq, Body::OpenGame(g), Body::OpenGame(h)) => Ok(Body::OpenGame(seq_compose(h, g)?)),
        (ComposeMode::Tensor, Body::OpenGame(g), Body::OpenGame(h)) => Ok(Body::OpenGame(nash_tensor_game(g, h)?)),
        (ComposeMode::Tensor, Body::Selection(s), Body::Selection(t)) => {
            Ok(Body::Selection(SelectionDoc::tensor(s.clone(), t.clone())?))
        }
        (ComposeMode::Seq, _, _) => {
            Err(Failure::Input(format!("seq composes two open games, found {} and {}", a.kind(), b.kind())))
        }
        (ComposeMode::Tensor, _, _) => Err(Failure::Input(format!(
            "tensor composes two selection functions or two open games, found {} and {}",
            a.kind(),
            b.kind()
        ))),
    }
}

// --------------------------------------------------------------- listings

fn k_labels(k: &FnTable, space: &FinMetricSpace) -> String {
    let labels: Vec<&str> = k.entries().iter().map(|&v| space.label(v)).collect();
    format!("[{}]", labels.join(", "))
}

fn set_labels(set: Subset, space: &FinMetricSpace) -> String {
    let labels: Vec<&str> = set.iter().map(|x| space.label(x)).collect();
    format!("{{{}}}", labels.join(", "))
}

/// One line per fact; the same facts in either format.
trait Lines {
    fn lines(&self, format: Format, added: bool) -> Vec<String>;
}

struct Selected<'a> {
    function: &'a SelectionFunction,
    k: FnTable,
    set: Subset,
}

impl Lines for Selected<'_> {
    fn lines(&self, format: Format, added: bool) -> Vec<String> {
        let obj = self.function.object();
        match format {
            Format::Text => vec![format!("k={}  {}", k_labels(&self.k, obj.bwd()), set_labels(self.set, obj.fwd()))],
            Format::Records if self.set.is_empty() && !added => vec![format!("selected\t{}\t-", k_key(&self.k))],
            Format::Records => {
                let tag = if added { "added" } else { "selected" };
                self.set.iter().map(|x| format!("{tag}\t{}\t{}", k_key(&self.k), obj.fwd().label(x))).collect()
            }
        }
    }
}

struct Member<'a> {
    game: &'a OpenGame,
    sigma: usize,
    x: usize,
    k: FnTable,
}

impl Lines for Member<'_> {
    fn lines(&self, format: Format, added: bool) -> Vec<String> {
        let g = self.game;
        let (name, x) = (&g.strategies()[self.sigma], g.domain().fwd().label(self.x));
        match format {
            Format::Text => vec![format!("strategy={name}  x={x}  k={}", k_labels(&self.k, g.codomain().bwd()))],
            Format::Records => {
                let tag = if added { "added" } else { "equilibrium" };
                vec![format!("{tag}\t{name}\t{x}\t{}", k_key(&self.k))]
            }
        }
    }
}

fn render(items: &[impl Lines], added: &[impl Lines], eps: ExtReal, format: Format) -> String {
    let mut lines: Vec<String> = items.iter().flat_map(|i| i.lines(format, false)).collect();
    if !added.is_empty() {
        if format == Format::Text {
            lines.push(format!("added at eps={eps}:"));
        }
        lines.extend(added.iter().flat_map(|i| i.lines(format, true)));
    }
    lines.iter().map(|l| format!("{l}\n")).collect()
}

/// The listing of `doc` after `T_eps`, followed by what `T_eps` added.
/// At `eps = 0` nothing is added and the output is the plain listing.
pub fn listing(doc: &SpecDocument, eps: ExtReal, format: Format) -> Result<String> {
    match &doc.body {
        Body::Selection(sel) => {
            let s = &sel.function;
            let approx = t_eps(eps, s);
            let space = s.space();
            let ks: Vec<FnTable> = if sel.queries.is_empty() { space.tables().collect() } else { sel.queries.clone() };
            let items: Vec<Selected> =
                ks.iter().map(|k| Selected { function: s, k: k.clone(), set: approx.select(k) }).collect();
            let added: Vec<Selected> = ks
                .iter()
                .map(|k| Selected { function: s, k: k.clone(), set: approx.select(k) & !s.select(k) })
                .filter(|a| !a.set.is_empty())
                .collect();
            Ok(render(&items, &added, eps, format))
        }
        Body::OpenGame(g) => {
            let approx = t_eps_game(eps, g);
            let space = g.space();
            let mut items = Vec::new();
            let mut added = Vec::new();
            for sigma in 0..g.strategies().len() {
                for x in 0..g.domain().fwd().len() {
                    for (ki, k) in space.tables().enumerate() {
                        if approx.equilibrium(sigma)[ki].contains(x) {
                            items.push(Member { game: g, sigma, x, k: k.clone() });
                            if !g.equilibrium(sigma)[ki].contains(x) {
                                added.push(Member { game: g, sigma, x, k });
                            }
                        }
                    }
                }
            }
            Ok(render(&items, &added, eps, format))
        }
        other => Err(Error::invalid(format!("nothing to solve in a {} document", other.kind()))),
    }
}

// ------------------------------------------------------------------- laws

fn suite_names(suite: &str) -> Result<Vec<&'static str>, Failure> {
    if suite == "all" {
        return Ok(SUITES.to_vec());
    }
    SUITES.iter().find(|s| **s == suite).map(|s| vec![*s]).ok_or_else(|| {
        Failure::Input(format!("unknown suite {suite:?}; expected one of {} or all", SUITES.join(", ")))
    })
}

fn report_text(r: &SuiteReport, format: Format) -> String {
    let mut s = String::new();
    match format {
        Format::Text => {
            s.push_str(&format!("== {} ==\n", r.suite));
            for sec in &r.sections {
                s.push_str(&format!("  {sec}\n"));
            }
            s.push_str(&format!("  {}: {}\n", r.suite, if r.passed() { "pass" } else { "FAIL" }));
        }
        Format::Records => {
            for sec in &r.sections {
                let (status, detail) = match &sec.outcome {
                    Outcome::Holds => ("holds", ""),
                    Outcome::Violated(w) => ("violated", w.as_str()),
                    Outcome::Recorded(w) => ("recorded", w.as_str()),
                };
                let mode = if sec.exhaustive { "exhaustive" } else { "sampled" };
                s.push_str(&format!(
                    "law\t{}\t{}\t{mode}\t{}\t{}\t{status}\t{detail}\n",
                    r.suite, sec.title, sec.instances, sec.skipped
                ));
            }
        }
    }
    s
}

fn run_laws(suite: &str, config: &RunConfig, out: &mut dyn Write) -> Result<(), Failure> {
    let names = suite_names(suite)?;
    let caps = config.caps;
    let (tx, rx) = mpsc::channel();
    std::thread::spawn(move || {
        for name in names {
            let r = run_suite(name, &caps);
            let stop = r.is_err();
            if tx.send(r).is_err() || stop {
                return;
            }
        }
    });
    let deadline = config.budget.map(|d| (d, std::time::Instant::now() + d));
    let mut passed = true;
    loop {
        let next = match deadline {
            Some((d, at)) => match rx.recv_timeout(at.saturating_duration_since(std::time::Instant::now())) {
                Ok(r) => Some(r),
                Err(mpsc::RecvTimeoutError::Timeout) => {
                    let _ = out.flush();
                    return Err(Failure::Budget(d));
                }
                Err(mpsc::RecvTimeoutError::Disconnected) => None,
            },
            None => rx.recv().ok(),
        };
        let Some(report) = next else { break };
        let report = report?;
        passed &= report.passed();
        out.write_all(report_text(&report, config.format).as_bytes()).map_err(internal)?;
    }
    if passed {
        Ok(())
    } else {
        Err(Failure::Laws)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("agt").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn bad_flags_and_suites() {
        assert_eq!(run_args(&["laws", "nope"]).0, EXIT_INPUT);
        assert_eq!(run_args(&["--max-x", "0", "laws", "graded"]).0, EXIT_INPUT);
        assert_eq!(run_args(&["--eps", "x", "solve", "f"]).0, EXIT_INPUT);
        assert_eq!(run_args(&["solve", "/nonexistent/doc.json"]).0, EXIT_INPUT);
        assert_eq!(run_args(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn eps_flag_accepts_infinity() {
        let cli = Cli::try_parse_from(["agt", "--eps", "inf", "laws", "graded"]).unwrap();
        assert_eq!(cli.config().unwrap().eps, ExtReal::INFINITY);
    }
}
