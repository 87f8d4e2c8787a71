use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use consfree::engine::search_with_threads;
use consfree::format::{encode_input, parse_tm};
use consfree::tm::{compile_tm, gen_module, module_selftest, simulate_tm, CompileError, ModuleExpr, Outcome};
use consfree::{parse_atrs, parse_term, print_term, Atrs, Mode, SearchBudget, SolveError, SolverConfig, Strategy, Term};

const OK: u8 = 0;
const INVALID: u8 = 1;
const BUDGET: u8 = 2;
const USAGE: u8 = 3;

#[derive(Parser)]
#[command(name = "consfree", version, about = "Cons-free term rewriting toolkit")]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for search and solving.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Requirement {
    ConsFree,
    ProductConsFree,
}

#[derive(Subcommand)]
enum Cmd {
    /// Report the syntactic classes of a system.
    Check {
        file: PathBuf,
        #[arg(long, value_enum)]
        require: Option<Requirement>,
    },
    /// Breadth-first search for the normal forms of a term.
    Run {
        file: PathBuf,
        #[arg(long, conflicts_with = "input")]
        term: Option<String>,
        /// Run `decide` on this input string instead of a term.
        #[arg(long)]
        input: Option<String>,
        #[arg(long, default_value = "free")]
        strategy: Strategy,
        #[arg(long, default_value_t = 10_000)]
        max_steps: usize,
        #[arg(long, default_value_t = 100_000)]
        max_terms: usize,
        #[arg(long, default_value_t = 10_000)]
        max_term_size: usize,
        /// Print a reduction to every normal form.
        #[arg(long)]
        trace: bool,
    },
    /// Exact data normal forms of a basic term.
    Solve {
        file: PathBuf,
        #[arg(long, conflicts_with = "input")]
        basic: Option<String>,
        /// Solve `decide` on this input string instead of a term.
        #[arg(long)]
        input: Option<String>,
        /// Largest representation space allowed, as a power of two.
        #[arg(long, default_value_t = 20)]
        repr_budget: u32,
        #[arg(long, default_value = "auto")]
        mode: Mode,
    },
    /// Compile a Turing machine to a system deciding its language.
    CompileTm {
        tmfile: PathBuf,
        #[arg(long)]
        module: String,
        /// Allow modules built on pairs.
        #[arg(long)]
        pairing: bool,
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
    },
    /// Emit the rules of a counting module.
    GenModule {
        #[arg(long)]
        module: String,
        #[arg(long)]
        pairing: bool,
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
    },
    /// Check that a counting module counts to its bound.
    SelftestModule {
        #[arg(long)]
        module: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        pairing: bool,
        #[arg(long, default_value_t = 20)]
        repr_budget: u32,
    },
    /// Run a Turing machine directly.
    Simulate {
        tmfile: PathBuf,
        #[arg(long)]
        input: String,
        #[arg(long, default_value_t = 10_000)]
        max_steps: usize,
    },
}

/// A failure with its exit code.
struct Fail(u8, String);

impl Fail {
    fn usage(msg: impl ToString) -> Fail {
        Fail(USAGE, msg.to_string())
    }
}

fn read(path: &Path) -> Result<String, Fail> {
    std::fs::read_to_string(path).map_err(|e| Fail::usage(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Atrs, Fail> {
    parse_atrs(&read(path)?).map_err(|e| Fail::usage(format!("{}:{e}", path.display())))
}

fn term_arg(atrs: &Atrs, term: Option<&str>, input: Option<&str>) -> Result<Term, Fail> {
    match (term, input) {
        (Some(t), _) => parse_term(atrs, t).map_err(|e| Fail::usage(format!("term: {e}"))),
        (None, Some(x)) => {
            let arg = encode_input(atrs, x).map_err(Fail::usage)?;
            let decide = atrs.symbol("decide").ok_or_else(|| Fail::usage("the system has no `decide` symbol"))?;
            Term::app(decide, vec![arg]).map_err(|_| Fail::usage("`decide` does not take a list"))
        }
        (None, None) => Err(Fail::usage("give a term or --input")),
    }
}

fn module_arg(s: &str) -> Result<ModuleExpr, Fail> {
    s.parse().map_err(|e: CompileError| Fail::usage(e))
}

fn compile_fail(e: CompileError) -> Fail {
    match e {
        CompileError::BadModuleExpr(_) => Fail::usage(e),
        CompileError::Solve(s) => solve_fail(s),
        other => Fail(INVALID, other.to_string()),
    }
}

fn solve_fail(e: SolveError) -> Fail {
    match e {
        SolveError::ReprSpaceTooLarge { .. } | SolveError::TooManyStatements(_) => Fail(BUDGET, e.to_string()),
        other => Fail(INVALID, other.to_string()),
    }
}

fn write_out(out: Option<&Path>, text: &str) -> Result<String, Fail> {
    match out {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| Fail::usage(format!("{}: {e}", p.display())))?;
            Ok(String::new())
        }
        None => Ok(text.to_string()),
    }
}

fn run(cli: Cli) -> Result<(u8, String), Fail> {
    let mut out = String::new();
    match cli.cmd {
        Cmd::Check { file, require } => {
            let atrs = load(&file)?;
            let v = atrs.verdict();
            let pcf = v.product_cons_free.map_or("n/a".to_string(), |b| b.to_string());
            if cli.json {
                let viol: Vec<String> = v.violations.iter().map(|x| x.to_string()).collect();
                let j = json!({
                    "constructor_system": v.constructor_system,
                    "left_linear": v.left_linear,
                    "cons_free": v.cons_free,
                    "product_cons_free": v.product_cons_free,
                    "type_order": v.type_order,
                    "violations": viol,
                });
                writeln!(out, "{j}").unwrap();
            } else {
                writeln!(out, "constructor-system: {}", v.constructor_system).unwrap();
                writeln!(out, "left-linear: {}", v.left_linear).unwrap();
                writeln!(out, "cons-free: {}", v.cons_free).unwrap();
                writeln!(out, "product-cons-free: {pcf}").unwrap();
                writeln!(out, "type-order: {}", v.type_order).unwrap();
                for x in &v.violations {
                    writeln!(out, "violation: {x}").unwrap();
                }
            }
            let ok = match require {
                None => true,
                Some(Requirement::ConsFree) => v.cons_free,
                Some(Requirement::ProductConsFree) => v.product_cons_free.unwrap_or(v.cons_free),
            };
            Ok((if ok { OK } else { INVALID }, out))
        }
        Cmd::Run { file, term, input, strategy, max_steps, max_terms, max_term_size, trace } => {
            let atrs = load(&file)?;
            let s = term_arg(&atrs, term.as_deref(), input.as_deref())?;
            let budget = SearchBudget { max_steps, max_terms, max_term_size };
            let r = search_with_threads(&atrs, &s, strategy, budget, cli.threads.max(1))
                .map_err(|e| Fail(BUDGET, e.to_string()))?;
            if cli.json {
                let nfs: Vec<String> = r.normal_forms.keys().map(print_term).collect();
                let j = json!({
                    "normal_forms": nfs,
                    "exhausted": r.exhausted,
                    "visited": r.visited,
                    "depth": r.depth,
                    "steps": null,
                    "statements": null,
                });
                writeln!(out, "{j}").unwrap();
            } else {
                for (nf, tr) in &r.normal_forms {
                    writeln!(out, "{}", print_term(nf)).unwrap();
                    if trace {
                        for step in &tr.steps {
                            writeln!(out, "  {step}").unwrap();
                        }
                    }
                }
                writeln!(out, "exhausted={} visited={} depth={}", r.exhausted, r.visited, r.depth).unwrap();
            }
            Ok((if r.exhausted { BUDGET } else { OK }, out))
        }
        Cmd::Solve { file, basic, input, repr_budget, mode } => {
            let atrs = load(&file)?;
            let s = term_arg(&atrs, basic.as_deref(), input.as_deref())?;
            let config = SolverConfig { repr_budget_log2: repr_budget, mode, threads: cli.threads.max(1), ..SolverConfig::default() };
            let sol = consfree::solve(&atrs, &s, config).map_err(solve_fail)?;
            let nfs: Vec<String> = sol.normal_forms().iter().map(print_term).collect();
            if cli.json {
                let j = json!({
                    "normal_forms": nfs,
                    "exhausted": false,
                    "steps": sol.steps,
                    "statements": sol.statements,
                    "mode": sol.mode.to_string(),
                    "monotone": sol.monotone,
                });
                writeln!(out, "{j}").unwrap();
            } else {
                for nf in &nfs {
                    writeln!(out, "{nf}").unwrap();
                }
                writeln!(out, "steps={} statements={}", sol.steps, sol.statements).unwrap();
            }
            Ok((OK, out))
        }
        Cmd::CompileTm { tmfile, module, pairing, out: dest } => {
            let tm = parse_tm(&read(&tmfile)?).map_err(|e| Fail::usage(format!("{}:{e}", tmfile.display())))?;
            let expr = module_arg(&module)?;
            let c = compile_tm(&tm, &expr, pairing).map_err(compile_fail)?;
            Ok((OK, write_out(dest.as_deref(), &c.to_text())?))
        }
        Cmd::GenModule { module, pairing, out: dest } => {
            let expr = module_arg(&module)?;
            let g = gen_module(&expr, pairing).map_err(compile_fail)?;
            Ok((OK, write_out(dest.as_deref(), &g.to_text())?))
        }
        Cmd::SelftestModule { module, n, pairing, repr_budget } => {
            let expr = module_arg(&module)?;
            let config = SolverConfig { repr_budget_log2: repr_budget, threads: cli.threads.max(1), ..SolverConfig::default() };
            match module_selftest(&expr, n, pairing, config) {
                Ok(r) => {
                    writeln!(out, "{r}").unwrap();
                    Ok((OK, out))
                }
                Err(CompileError::SelfTestFailure(r)) => {
                    write!(out, "{r}").unwrap();
                    Ok((INVALID, out))
                }
                Err(e) => Err(compile_fail(e)),
            }
        }
        Cmd::Simulate { tmfile, input, max_steps } => {
            let tm = parse_tm(&read(&tmfile)?).map_err(|e| Fail::usage(format!("{}:{e}", tmfile.display())))?;
            let r = simulate_tm(&tm, &input, max_steps).map_err(Fail::usage)?;
            let outcome = match r.outcome {
                Outcome::Accept => "accept",
                Outcome::Reject => "reject",
                Outcome::Timeout => "timeout",
            };
            if cli.json {
                writeln!(out, "{}", json!({"outcome": outcome, "steps": r.steps, "state": r.state, "head": r.head, "tape": r.tape}))
                    .unwrap();
            } else {
                writeln!(out, "{outcome} steps={} head={} tape={}", r.steps, r.head, r.tape.join("")).unwrap();
            }
            Ok((if r.outcome == Outcome::Timeout { BUDGET } else { OK }, out))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok((code, text)) => {
            print!("{text}");
            ExitCode::from(code)
        }
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
