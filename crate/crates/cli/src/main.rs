use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hexinline::bench::{format_text, run_bench, write_csv, BenchSpec, Problem, Shape};
use hexinline::equivalence::{find_witness, sigma_models, witness_to_counterexample, HBContext};
use hexinline::eval::{EvalContext, FamilyResolver, StrategyRegistry};
use hexinline::family::{derive_family, minimize_family, Sigma, FAMILY_CAP};
use hexinline::inconsistency::{persistently_inconsistent, persistently_inconsistent_ufs};
use hexinline::inliner::inline_all;
use hexinline::oracle::OracleRegistry;
use hexinline::parser::{parse_atom_list, parse_family_file, parse_hb, parse_program_with, print_family, ParseOptions};
use hexinline::program::{show_set, AtomSet, Program};
use hexinline::semantics::answer_sets_brute;
use hexinline::{HexError, Result};

#[derive(Parser)]
#[command(name = "hexinline", version, about = "Evaluate, inline and compare ground HEX-programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute answer sets.
    Eval(EvalArgs),
    /// Replace external atoms by ordinary rules.
    Inline(InlineArgs),
    /// Decide ⟨H,B⟩-equivalence of two programs.
    Equiv(EquivArgs),
    /// Decide persistent inconsistency relative to H.
    PersistInc(PersistArgs),
    /// Derive support families for every external atom.
    DeriveFamily(DeriveArgs),
    /// Run a graph benchmark under several modes.
    Bench(BenchArgs),
}

#[derive(Args)]
struct Source {
    /// Program file.
    #[arg(value_name = "FILE")]
    file: Option<PathBuf>,
    #[arg(long = "program", value_name = "FILE", conflicts_with = "file")]
    program: Option<PathBuf>,
    /// Extra atoms, comma separated.
    #[arg(long, value_name = "ATOMS")]
    universe: Option<String>,
    /// Accept aux__ predicates in the input.
    #[arg(long)]
    allow_aux: bool,
}

impl Source {
    fn load(&self) -> Result<(Program, AtomSet)> {
        let path =
            self.program.as_ref().or(self.file.as_ref()).ok_or_else(|| HexError::Io("no program given".into()))?;
        let p = parse_program_with(&read(path)?, ParseOptions { allow_aux: self.allow_aux })?;
        Ok((p, universe(&self.universe)?))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Out {
    Text,
    Csv,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    src: Source,
    /// Support-family file.
    #[arg(long, value_name = "FILE")]
    families: Option<PathBuf>,
    #[arg(long, default_value = "traditional")]
    mode: String,
    /// Compute all answer sets (default).
    #[arg(long, conflicts_with = "first")]
    all: bool,
    /// Stop at the first answer set.
    #[arg(long)]
    first: bool,
    #[arg(long, value_enum, default_value = "text")]
    out: Out,
}

#[derive(Args)]
struct InlineArgs {
    #[command(flatten)]
    src: Source,
    #[arg(long, value_name = "FILE")]
    families: Option<PathBuf>,
    /// Write the inlined program here instead of stdout.
    #[arg(short = 'o', long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EquivArgs {
    /// The programs P and Q.
    #[arg(num_args = 2, value_names = ["P", "Q"], required = true)]
    programs: Vec<PathBuf>,
    #[arg(long, value_name = "FILE")]
    hb: PathBuf,
    #[arg(long, value_name = "ATOMS")]
    universe: Option<String>,
    /// Write a separating program here when not equivalent.
    #[arg(long, value_name = "FILE")]
    emit_counterexample: Option<PathBuf>,
    /// Also print the σ-models of both programs.
    #[arg(long)]
    show_models: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Reduct,
    Ufs,
    Both,
}

#[derive(Args)]
struct PersistArgs {
    #[command(flatten)]
    src: Source,
    #[arg(long, value_name = "FILE")]
    hb: PathBuf,
    #[arg(long, value_enum, default_value = "reduct")]
    method: Method,
}

#[derive(Clone, Copy, ValueEnum)]
enum SigmaArg {
    T,
    F,
}

#[derive(Args)]
struct DeriveArgs {
    #[command(flatten)]
    src: Source,
    #[arg(long, value_enum, default_value = "t")]
    sigma: SigmaArg,
    /// Keep only subset-minimal members.
    #[arg(long)]
    minimize: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// non3col or vertexcover.
    #[arg(long)]
    problem: String,
    /// random, random:<density>, complete, cycle or edgeless.
    #[arg(long, default_value = "random")]
    shape: String,
    #[arg(long)]
    nodes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cover size bound L for vertexcover.
    #[arg(long, default_value_t = 1)]
    limit: usize,
    /// Modes to run, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "traditional,supsets,inlining")]
    mode: Vec<String>,
    #[arg(long, conflicts_with = "first")]
    all: bool,
    #[arg(long)]
    first: bool,
    #[arg(long, value_enum, default_value = "text")]
    out: Out,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| HexError::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| HexError::Io(format!("{}: {e}", path.display())))
}

fn universe(arg: &Option<String>) -> Result<AtomSet> {
    match arg {
        Some(s) if !s.trim().is_empty() => parse_atom_list(s),
        _ => Ok(AtomSet::new()),
    }
}

fn families(path: &Option<PathBuf>) -> Result<Vec<hexinline::family::SupportFamily>> {
    match path {
        Some(p) => parse_family_file(&read(p)?),
        None => Ok(Vec::new()),
    }
}

fn hb(path: &Path) -> Result<HBContext> {
    let (h, b) = parse_hb(&read(path)?)?;
    Ok(HBContext::new(h, b))
}

fn stdout(text: &str) -> Result<()> {
    io::stdout().write_all(text.as_bytes()).map_err(|e| HexError::Io(e.to_string()))
}

fn eval(a: &EvalArgs) -> Result<ExitCode> {
    let (p, u) = a.src.load()?;
    let reg = OracleRegistry::with_builtins();
    let fams = families(&a.families)?;
    let ctx = EvalContext { program: &p, universe: &u, reg: &reg, families: &fams, first_only: a.first };
    let out = StrategyRegistry::with_builtins().get(&a.mode)?.evaluate(&ctx)?;
    match a.out {
        Out::Text => {
            let mut s = String::new();
            for y in &out.answer_sets {
                s.push_str(&show_set(y));
                s.push('\n');
            }
            let st = out.stats;
            s.push_str(&format!(
                "% {} answer set(s); oracle calls {}, setup calls {}, candidates {}, minimality checks {}\n",
                out.answer_sets.len(),
                st.oracle_calls,
                st.setup_oracle_calls,
                st.candidates_checked,
                st.minimality_checks
            ));
            for n in &out.notes {
                s.push_str(&format!("% note: {n}\n"));
            }
            stdout(&s)?;
        }
        Out::Csv => {
            let mut w = csv::Writer::from_writer(io::stdout());
            let io_err = |e: csv::Error| HexError::Io(e.to_string());
            w.write_record(["index", "answer_set"]).map_err(io_err)?;
            for (i, y) in out.answer_sets.iter().enumerate() {
                w.write_record([(i + 1).to_string(), show_set(y)]).map_err(io_err)?;
            }
            w.flush().map_err(|e| HexError::Io(e.to_string()))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn inline(a: &InlineArgs) -> Result<ExitCode> {
    let (p, u) = a.src.load()?;
    let reg = OracleRegistry::with_builtins();
    let user = families(&a.families)?;
    let mut all = u.clone();
    all.extend(p.ordinary_atoms());
    let mut resolver = FamilyResolver::new(&reg, &user);
    let fams = resolver.resolve_occurrences(&p, &all)?;
    let res = inline_all(&p, &fams, Some(&reg))?;
    let mut text = res.header();
    for n in &resolver.notes {
        text.push_str(&format!("% note: {n}\n"));
    }
    text.push_str(&res.program.to_string());
    match &a.output {
        Some(path) => write(path, &text)?,
        None => stdout(&text)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn equiv(a: &EquivArgs) -> Result<ExitCode> {
    let reg = OracleRegistry::with_builtins();
    let p = parse_program_with(&read(&a.programs[0])?, ParseOptions::default())?;
    let q = parse_program_with(&read(&a.programs[1])?, ParseOptions::default())?;
    let ctx = hb(&a.hb)?;
    let mut u = universe(&a.universe)?;
    u.extend(p.ordinary_atoms());
    u.extend(q.ordinary_atoms());
    u.extend(ctx.atoms());
    let mut s = String::new();
    if a.show_models {
        for (name, prog) in [("P", &p), ("Q", &q)] {
            let ms: Vec<String> = sigma_models(prog, &ctx, &u, &reg)?.iter().map(|m| m.to_string()).collect();
            s.push_str(&format!("σ({name}) = {{{}}}\n", ms.join(", ")));
        }
    }
    let found = match find_witness(&p, &q, &ctx, &u, &reg)? {
        Some(w) => Some((w, &p, &q, "P", "Q")),
        None => find_witness(&q, &p, &ctx, &u, &reg)?.map(|w| (w, &q, &p, "Q", "P")),
    };
    let Some((w, first, second, n1, n2)) = found else {
        s.push_str("equivalent\n");
        stdout(&s)?;
        return Ok(ExitCode::SUCCESS);
    };
    let r = witness_to_counterexample(&w, first, second, &ctx, &u, &reg)?;
    s.push_str(&format!("not equivalent\nwitness {w} for {n1} not contained in {n2}\n"));
    s.push_str(&format!("answer set {} of {n1} ∪ R is not one of {n2} ∪ R for R:\n{r}", show_set(&w.y)));
    let check = |prog: &Program| answer_sets_brute(&prog.union(&r), &u, &reg);
    if let (Ok(a1), Ok(a2)) = (check(first), check(second)) {
        let ok = a1.contains(&w.y) && !a2.contains(&w.y);
        s.push_str(&format!("separation checked by enumeration: {}\n", if ok { "yes" } else { "no" }));
    }
    if let Some(path) = &a.emit_counterexample {
        write(path, &format!("% separates {n1} from {n2} at {}\n{r}", show_set(&w.y)))?;
    }
    stdout(&s)?;
    Ok(ExitCode::from(1))
}

fn persist(a: &PersistArgs) -> Result<ExitCode> {
    let (p, u) = a.src.load()?;
    let reg = OracleRegistry::with_builtins();
    let ctx = hb(&a.hb)?;
    let mut verdicts = Vec::new();
    let mut s = String::new();
    if a.method != Method::Ufs {
        let r = persistently_inconsistent(&p, &ctx, &u, &reg)?;
        s.push_str(&format!("[reduct] {r}"));
        verdicts.push(r.verdict);
    }
    if a.method != Method::Reduct {
        let r = persistently_inconsistent_ufs(&p, &ctx, &u, &reg)?;
        s.push_str(&format!("[ufs] {r}"));
        verdicts.push(r.verdict);
    }
    stdout(&s)?;
    if verdicts.windows(2).any(|v| v[0] != v[1]) {
        return Err(HexError::Io("the two criteria disagree".into()));
    }
    Ok(if verdicts[0] { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn derive(a: &DeriveArgs) -> Result<ExitCode> {
    let (p, u) = a.src.load()?;
    let reg = OracleRegistry::with_builtins();
    let mut all = u;
    all.extend(p.ordinary_atoms());
    let sigma = match a.sigma {
        SigmaArg::T => Sigma::T,
        SigmaArg::F => Sigma::F,
    };
    let mut s = String::new();
    for e in p.externals() {
        let mut f = derive_family(&reg, &e, &e.input_atoms(&all), sigma, FAMILY_CAP)?;
        if a.minimize {
            f = minimize_family(&f)?;
        }
        s.push_str(&print_family(&f));
    }
    stdout(&s)?;
    Ok(ExitCode::SUCCESS)
}

fn bench(a: &BenchArgs) -> Result<ExitCode> {
    let spec = BenchSpec::new(Problem::parse(&a.problem)?, Shape::parse(&a.shape)?, a.nodes, a.seed, a.limit);
    let modes: Vec<&str> = a.mode.iter().map(|m| m.trim()).filter(|m| !m.is_empty()).collect();
    let rows = run_bench(&spec, &modes, a.first)?;
    match a.out {
        Out::Text => stdout(&format_text(&rows))?,
        Out::Csv => write_csv(&rows, io::stdout())?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Eval(a) => eval(a),
        Command::Inline(a) => inline(a),
        Command::Equiv(a) => equiv(a),
        Command::PersistInc(a) => persist(a),
        Command::DeriveFamily(a) => derive(a),
        Command::Bench(a) => bench(a),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_cap() { 3 } else { 2 })
        }
    }
}
