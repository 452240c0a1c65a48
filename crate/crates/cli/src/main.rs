use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use beyondnp_core::apps::{
    clique_extension_check_with, coloring_extension_leaves_with, dnf_min_core_with, dnf_min_reduction_with,
    format_precoloring, gen_robust_csp_hard, implicant_core_with, parse_csp, parse_graph, parse_qbf,
    qbf_universal_expand, robust_csp_check_with, robust_csp_source, write_csp,
};
use beyondnp_core::asp::{
    brute_force_answer_sets_with, comp_and_cont, gen_contrules_hard, gen_disjrules_hard, limit_atom_occurrences,
    parse_program, solve_asp, write_program, AspStrategy, AtomSet,
};
use beyondnp_core::logic::format::{parse_dimacs_cnf, parse_dimacs_dnf, parse_wqdimacs, write_dimacs_cnf, write_wqdimacs};
use beyondnp_core::logic::{Dnf, Literal, Term, VarId, WeightSpec, WqbfInstance};
use beyondnp_core::reductions::{
    atleast_inner_to_plain_qbf, atleast_outer_to_plain_qbf, atmost_to_exact, collapse_to_3dnf, complement_outer_weight,
    doubly_weighted_to_kstar, doubly_weighted_to_stark, exact_to_atmost, fo_mc_to_wqbf, monotonize_universal,
    pad_exact_offweight, parse_fo, qsat2_block_split,
};
use beyondnp_core::sat::{Backend, SatResult};
use beyondnp_core::wqbf::{brute_force_wqbf_with, solve_wqbf_with};
use beyondnp_core::{Engine, Error};
use clap::{Args, Parser, Subcommand, ValueEnum};

const EXIT_YES: u8 = 10;
const EXIT_NO: u8 = 20;

/// Decides weighted quantified Boolean formulas, disjunctive answer set
/// programs and related problems by compilation to SAT.
#[derive(Parser)]
#[command(name = "beyondnp", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Largest instance size the exhaustive checkers accept
    #[arg(long, global = true, value_name = "N")]
    oracle_bound: Option<usize>,
    /// Largest candidate count an enumeration may visit
    #[arg(long, global = true, value_name = "N")]
    ceiling: Option<u64>,
    /// External DIMACS SAT solver used instead of the built-in one
    #[arg(long, global = true, value_name = "PATH")]
    sat_exec: Option<PathBuf>,
    /// Seed for the SAT solver's decision heuristic
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Output file (stdout when absent)
    #[arg(short = 'o', long = "output", global = true, value_name = "OUT")]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Decide a DIMACS CNF
    Sat { input: PathBuf },
    /// Weighted two-block QBF (WQDIMACS)
    #[command(subcommand)]
    Wqbf(WqbfCmd),
    /// Disjunctive answer set programs
    #[command(subcommand)]
    Asp(AspCmd),
    /// First-order model checking of an ∃*∀* sentence via a weighted instance
    FoMc { input: PathBuf },
    /// Robust constraint satisfaction
    #[command(subcommand)]
    RobustCsp(RobustCmd),
    /// DNF minimization (DIMACS `p dnf`)
    #[command(subcommand)]
    Dnfmin(DnfminCmd),
    /// Shortest implicant core of a DNF (DIMACS `p dnf`)
    ImplicantCore {
        input: PathBuf,
        /// The implicant C as DIMACS literals, e.g. "1 -2 3"
        #[arg(long, allow_hyphen_values = true)]
        term: String,
        #[arg(long)]
        m: usize,
    },
    /// Small clique extension: every clique inside V′ extends by k vertices
    CliqueExt {
        input: PathBuf,
        /// Comma-separated vertex names forming V′
        #[arg(long, value_delimiter = ',')]
        subset: Vec<String>,
        #[arg(long)]
        k: usize,
    },
    /// 3-coloring extension: every pre-coloring of m leaves extends
    ColoringExt {
        input: PathBuf,
        #[arg(long)]
        m: usize,
    },
    /// Prenex QBF (QDIMACS)
    #[command(subcommand)]
    Qbf(QbfCmd),
}

#[derive(Subcommand)]
enum WqbfCmd {
    /// Decide a WQDIMACS instance by compilation to SAT
    Solve { input: PathBuf },
    /// Decide by exhaustive enumeration
    Brute { input: PathBuf },
    /// Apply a reduction and write the resulting instance
    Reduce {
        input: PathBuf,
        #[arg(long)]
        to: Reduction,
    },
    /// Turn an unweighted ∃∀ 3DNF instance into a doubly weighted one
    GenBlocksplit {
        input: PathBuf,
        /// Group size
        #[arg(long)]
        r: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Reduction {
    /// Collapse to a 3DNF matrix
    #[value(name = "3dnf")]
    Dnf3,
    /// Remove negated universal inputs
    Monotone,
    /// Make off-weight leading assignments decide the answer
    Pad,
    AtmostToExact,
    ExactToAtmost,
    /// Complement weight to exact weight
    Complement,
    /// At-least weight on the leading block to a plain QBF
    AtleastOuter,
    /// At-least weight on the inner block to a plain QBF
    AtleastInner,
    /// Doubly weighted to leading-weighted
    Kstar,
    /// Doubly weighted to inner-weighted
    Stark,
}

#[derive(Subcommand)]
enum AspCmd {
    /// Decide consistency
    Solve {
        input: PathBuf,
        #[arg(long, default_value = "auto")]
        strategy: AspStrategy,
    },
    /// Print Comp(P), Cont(P) and the structural parameters
    Params { input: PathBuf },
    /// Program with k contingent rules from a ∃^k∀* instance
    GenContrules { input: PathBuf },
    /// Program with k disjunctive rules from a ∃*∀^k instance monotone in the universal block
    GenDisjrules { input: PathBuf },
    /// Bound the number of occurrences of every atom
    LimitOcc {
        input: PathBuf,
        #[arg(long, default_value_t = 3)]
        bound: usize,
    },
    /// List all answer sets by enumeration
    Brute { input: PathBuf },
}

#[derive(Subcommand)]
enum RobustCmd {
    /// Decide k-robust satisfiability
    Solve {
        input: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Boolean CSP from a ∀^k∃* WQDIMACS instance
    Gen { input: PathBuf },
}

#[derive(Subcommand)]
enum DnfminCmd {
    /// Can k literal occurrences be deleted without changing the formula?
    Reduction {
        input: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Is there an equivalent DNF of size exactly k?
    Core {
        input: PathBuf,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Subcommand)]
enum QbfCmd {
    /// Decide a prenex QBF by expanding its universal variables
    Expand { input: PathBuf },
}

enum Outcome {
    Decided { yes: bool, lines: Vec<String> },
    Written(String),
}

fn decided(yes: bool, witness: Option<String>) -> Outcome {
    Outcome::Decided { yes, lines: witness.map(|w| format!("witness: {w}")).into_iter().collect() }
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn engine(g: &Global) -> Engine {
    let mut e = Engine::from_env();
    if let Some(path) = &g.sat_exec {
        let timeout = match &e.backend {
            Backend::External { timeout, .. } => *timeout,
            Backend::Builtin => Duration::from_secs(60),
        };
        e.backend = Backend::External { path: path.clone(), timeout };
    }
    if let Some(c) = g.ceiling {
        e.ceiling = c;
    }
    if let Some(b) = g.oracle_bound {
        e.oracle_bound = b;
    }
    if let Some(s) = g.seed {
        e.seed = s;
    }
    e
}

fn wqbf(path: &Path) -> Result<WqbfInstance, String> {
    parse_wqdimacs(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn dnf(path: &Path) -> Result<Dnf, String> {
    parse_dimacs_dnf(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn parse_term(s: &str) -> Result<Term, String> {
    let lits = s
        .split_whitespace()
        .filter(|t| *t != "0")
        .map(|t| {
            let n: i64 = t.parse().map_err(|_| format!("bad literal `{t}`"))?;
            Ok(Literal::new(VarId::new(&n.abs().to_string()), n > 0))
        })
        .collect::<Result<Vec<_>, String>>()?;
    Term::new(lits).map_err(|e| e.to_string())
}

fn dimacs_literals(lits: &[Literal]) -> String {
    let v: Vec<String> = lits.iter().map(|l| format!("{}{}", if l.positive { "" } else { "-" }, l.var)).collect();
    v.join(" ")
}

fn show_dnf(d: &Dnf) -> String {
    let v: Vec<String> = d.terms.iter().map(|t| format!("({})", dimacs_literals(t.literals()))).collect();
    v.join(" | ")
}

fn show_atoms(m: &AtomSet) -> String {
    let v: Vec<&str> = m.iter().map(VarId::name).collect();
    format!("{{{}}}", v.join(", "))
}

fn warn_hardness(inst: &WqbfInstance) {
    if matches!(inst.outer_weight, WeightSpec::AtLeast(_)) {
        eprintln!(
            "warning: at-least weight on the leading block is para-Σ2p-complete; \
             no reduction to SAT applies, enumerating every feasible weight"
        );
    }
}

fn reduce(inst: &WqbfInstance, to: Reduction) -> Result<WqbfInstance, Error> {
    match to {
        Reduction::Dnf3 => collapse_to_3dnf(inst),
        Reduction::Monotone => monotonize_universal(inst),
        Reduction::Pad => pad_exact_offweight(inst),
        Reduction::AtmostToExact => atmost_to_exact(inst),
        Reduction::ExactToAtmost => exact_to_atmost(inst),
        Reduction::Complement => complement_outer_weight(inst),
        Reduction::AtleastOuter => atleast_outer_to_plain_qbf(inst),
        Reduction::AtleastInner => atleast_inner_to_plain_qbf(inst),
        Reduction::Kstar => doubly_weighted_to_kstar(inst),
        Reduction::Stark => doubly_weighted_to_stark(inst),
    }
}

fn run(cli: &Cli) -> Result<Outcome, String> {
    let e = engine(&cli.global);
    let err = |x: Error| x.to_string();
    Ok(match &cli.command {
        Command::Sat { input } => {
            let f = parse_dimacs_cnf(&read(input)?).map_err(err)?;
            match e.solve(&f).map_err(err)? {
                SatResult::Sat(model) => {
                    let mut lits: Vec<(u64, bool)> =
                        model.iter().filter_map(|(v, b)| v.name().parse().ok().map(|n| (n, b))).collect();
                    lits.sort();
                    let w: Vec<String> = lits.iter().map(|(n, b)| if *b { n.to_string() } else { format!("-{n}") }).collect();
                    decided(true, Some(w.join(" ")))
                }
                SatResult::Unsat => decided(false, None),
            }
        }
        Command::Wqbf(WqbfCmd::Solve { input }) => {
            let inst = wqbf(input)?;
            warn_hardness(&inst);
            let report = solve_wqbf_with(&e, &inst).map_err(err)?;
            let mut lines = vec![format!("strategy: {}", report.strategy), format!("candidates: {}", report.candidates)];
            if let Some(w) = report.answer.witness() {
                lines.push(format!("witness: {w}"));
            }
            Outcome::Decided { yes: report.answer.is_yes(), lines }
        }
        Command::Wqbf(WqbfCmd::Brute { input }) => {
            let answer = brute_force_wqbf_with(&e, &wqbf(input)?).map_err(err)?;
            decided(answer.is_yes(), answer.witness().map(ToString::to_string))
        }
        Command::Wqbf(WqbfCmd::Reduce { input, to }) => {
            Outcome::Written(write_wqdimacs(&reduce(&wqbf(input)?, *to).map_err(err)?))
        }
        Command::Wqbf(WqbfCmd::GenBlocksplit { input, r }) => {
            Outcome::Written(write_wqdimacs(&qsat2_block_split(&wqbf(input)?, *r).map_err(err)?.instance))
        }
        Command::Asp(cmd) => asp(&e, cmd)?,
        Command::FoMc { input } => {
            let (s, phi) = parse_fo(&read(input)?).map_err(err)?;
            let inst = fo_mc_to_wqbf(&s, &phi).map_err(err)?;
            let report = solve_wqbf_with(&e, &inst).map_err(err)?;
            decided(report.answer.is_yes(), report.answer.witness().map(ToString::to_string))
        }
        Command::RobustCsp(RobustCmd::Solve { input, k }) => {
            let csp = parse_csp(&read(input)?).map_err(err)?;
            let report = robust_csp_check_with(&e, &csp, *k).map_err(err)?;
            let cex = report.counterexample.map(|c| {
                let v: Vec<String> =
                    c.iter().map(|&(x, d)| format!("{}={}", csp.variables[x], csp.domain[d])).collect();
                v.join(" ")
            });
            decided(report.robust, cex)
        }
        Command::RobustCsp(RobustCmd::Gen { input }) => {
            let hard = gen_robust_csp_hard(&robust_csp_source(&wqbf(input)?).map_err(err)?).map_err(err)?;
            Outcome::Written(format!("# k = {}\n{}", hard.k, write_csp(&hard.csp)))
        }
        Command::Dnfmin(DnfminCmd::Reduction { input, k }) => {
            let found = dnf_min_reduction_with(&e, &dnf(input)?, *k).map_err(err)?;
            decided(found.is_some(), found.as_ref().map(show_dnf))
        }
        Command::Dnfmin(DnfminCmd::Core { input, k }) => {
            let found = dnf_min_core_with(&e, &dnf(input)?, *k).map_err(err)?;
            decided(found.is_some(), found.as_ref().map(show_dnf))
        }
        Command::ImplicantCore { input, term, m } => {
            let found = implicant_core_with(&e, &dnf(input)?, &parse_term(term)?, *m).map_err(err)?;
            decided(found.is_some(), found.map(|t| dimacs_literals(t.literals())))
        }
        Command::CliqueExt { input, subset, k } => {
            let g = parse_graph(&read(input)?).map_err(err)?;
            let vprime = subset
                .iter()
                .filter(|s| !s.is_empty())
                .map(|s| g.vertex(s).ok_or_else(|| format!("unknown vertex `{s}`")))
                .collect::<Result<Vec<_>, _>>()?;
            let report = clique_extension_check_with(&e, &g, &vprime, *k).map_err(err)?;
            let cex = report.counterexample.map(|c| {
                let v: Vec<&str> = c.iter().map(|&x| g.vertices[x].as_str()).collect();
                format!("{{{}}}", v.join(", "))
            });
            decided(report.holds, cex)
        }
        Command::ColoringExt { input, m } => {
            let g = parse_graph(&read(input)?).map_err(err)?;
            let report = coloring_extension_leaves_with(&e, &g, *m).map_err(err)?;
            let mut lines = vec![format!("candidates: {}", report.candidates)];
            if let Some(c) = &report.counterexample {
                lines.push(format!("witness: {}", format_precoloring(&g, c)));
            }
            Outcome::Decided { yes: report.holds, lines }
        }
        Command::Qbf(QbfCmd::Expand { input }) => {
            let phi = parse_qbf(&read(input)?).map_err(err)?;
            let (cnf, stats) = qbf_universal_expand(&e, &phi).map_err(err)?;
            if let Some(out) = &cli.global.output {
                write_out(Some(out), &write_dimacs_cnf(&cnf).0)?;
            }
            let yes = e.solve(&cnf).map_err(err)?.is_sat();
            let lines = vec![
                format!("universals: {}", stats.universals),
                format!("clauses: {} -> {} (factor {:.3})", stats.matrix_clauses, stats.expanded_clauses, stats.factor),
            ];
            Outcome::Decided { yes, lines }
        }
    })
}

fn asp(e: &Engine, cmd: &AspCmd) -> Result<Outcome, String> {
    let err = |x: Error| x.to_string();
    let program = |p: &Path| parse_program(&read(p)?).map_err(|x| format!("{}: {x}", p.display()));
    Ok(match cmd {
        AspCmd::Solve { input, strategy } => {
            let (found, used) = solve_asp(e, &program(input)?, *strategy).map_err(err)?;
            let mut lines = vec![format!("strategy: {used}")];
            if let Some(m) = &found {
                lines.push(format!("witness: {}", show_atoms(m)));
            }
            Outcome::Decided { yes: found.is_some(), lines }
        }
        AspCmd::Brute { input } => {
            let all = brute_force_answer_sets_with(e, &program(input)?).map_err(err)?;
            let mut lines = vec![format!("answer sets: {}", all.len())];
            lines.extend(all.iter().map(|m| format!("answer: {}", show_atoms(m))));
            Outcome::Decided { yes: !all.is_empty(), lines }
        }
        AspCmd::Params { input } => {
            let p = program(input)?;
            let r = comp_and_cont(&p);
            Outcome::Written(format!(
                "comp: {}\ncont: {}\ncont-atoms: {}\ncont-rules: {}\ndisj-rules: {}\nmax-occurrence: {}\n",
                show_atoms(&r.comp),
                show_atoms(&r.cont),
                r.cont.len(),
                r.contingent_rules.len(),
                r.disjunctive_rules.len(),
                r.max_atom_occurrence,
            ))
        }
        AspCmd::GenContrules { input } => Outcome::Written(write_program(&gen_contrules_hard(&wqbf(input)?).map_err(err)?)),
        AspCmd::GenDisjrules { input } => Outcome::Written(write_program(&gen_disjrules_hard(&wqbf(input)?).map_err(err)?)),
        AspCmd::LimitOcc { input, bound } => {
            Outcome::Written(write_program(&limit_atom_occurrences(&program(input)?, *bound).map_err(err)?))
        }
    })
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), String> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let outcome = run(&cli).and_then(|o| match o {
        Outcome::Decided { yes, lines } => {
            println!("result: {}", if yes { "yes" } else { "no" });
            for l in lines {
                println!("{l}");
            }
            Ok(if yes { EXIT_YES } else { EXIT_NO })
        }
        Outcome::Written(text) => write_out(cli.global.output.as_deref(), &text).map(|()| 0),
    });
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
