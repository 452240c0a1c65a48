use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use beyondnp_core::apps::{parse_csp, parse_qbf, solve_qbf_expand};
use beyondnp_core::asp::parse_program;
use beyondnp_core::logic::format::{parse_dimacs_cnf, parse_wqdimacs};
use beyondnp_core::wqbf::brute_force_wqbf;
use beyondnp_core::Engine;
use tempfile::TempDir;

/// `∃^1 {x1,x2} ∀ y: (x1 ∨ y) ∧ (x2 ∨ ¬y)`, false.
const EXISTS_CNF: &str = "p cnf 3 2\ne 1 2 0\na 3 0\nw 1 exact 1\nw 2 free 0\n1 3 0\n2 -3 0\n";
/// `∃^1 x ∀ y: x ∨ y`, true.
const TRIVIAL: &str = "p cnf 2 1\ne 1 0\na 2 0\nw 1 exact 1\nw 2 free 0\n1 2 0\n";
/// `∃^1 {x1,x2} ∀ y: (x1 ∧ y) ∨ (x1 ∧ ¬y) ∨ (x2 ∧ ¬x1)`, true.
const EXISTS_DNF: &str = "p dnf 3 3\ne 1 2 0\na 3 0\nw 1 exact 1\nw 2 free 0\n1 3 0\n1 -3 0\n2 -1 0\n";

struct Dir(TempDir);

impl Dir {
    fn new() -> Self {
        Dir(tempfile::tempdir().unwrap())
    }

    fn file(&self, name: &str, text: &str) -> PathBuf {
        let p = self.0.path().join(name);
        fs::write(&p, text).unwrap();
        p
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_beyondnp")).args(args).output().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Exit code of a decision, after checking that it matches the verdict line.
fn verdict(o: &Output) -> bool {
    let out = stdout(o);
    match o.status.code() {
        Some(10) => assert!(out.starts_with("result: yes\n"), "{out}"),
        Some(20) => assert!(out.starts_with("result: no\n"), "{out}"),
        c => panic!("exit {c:?}: {}{}", out, String::from_utf8_lossy(&o.stderr)),
    }
    o.status.code() == Some(10)
}

fn written(o: &Output) {
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn asp_cont_atoms_on_self_blocking_rule() {
    let d = Dir::new();
    let f = d.file("p.lp", "w :- not w.\n");
    let o = run(&["asp", "solve", "--strategy", "cont-atoms", p(&f)]);
    assert_eq!(o.status.code(), Some(20));
    assert!(!verdict(&o));
}

#[test]
fn asp_strategies_agree_and_print_witnesses() {
    let d = Dir::new();
    let f = d.file("p.lp", "a | b.\nc :- a.\n:- b.\n");
    for s in ["auto", "cont-atoms", "cont-rules", "disj-rules", "brute"] {
        let o = run(&["asp", "solve", "--strategy", s, p(&f)]);
        assert!(verdict(&o), "{s}");
        assert!(stdout(&o).contains("witness: {a, c}"), "{s}: {}", stdout(&o));
    }
    let o = run(&["asp", "brute", p(&f)]);
    assert!(verdict(&o));
    assert!(stdout(&o).contains("answer sets: 1"));
    let o = run(&["asp", "params", p(&f)]);
    written(&o);
    assert!(stdout(&o).contains("disj-rules: 1"));
}

#[test]
fn wqbf_solve_trivially_true() {
    let d = Dir::new();
    let f = d.file("t.wq", TRIVIAL);
    let o = run(&["wqbf", "solve", p(&f)]);
    assert_eq!(o.status.code(), Some(10));
    assert!(stdout(&o).contains("witness: 1=1"));
}

#[test]
fn wqbf_solve_and_brute_agree_with_library() {
    let d = Dir::new();
    for (i, text) in [EXISTS_CNF, TRIVIAL, EXISTS_DNF].iter().enumerate() {
        let f = d.file(&format!("i{i}.wq"), text);
        let expected = brute_force_wqbf(&parse_wqdimacs(text).unwrap()).unwrap().is_yes();
        assert_eq!(verdict(&run(&["wqbf", "solve", p(&f)])), expected);
        assert_eq!(verdict(&run(&["wqbf", "brute", p(&f)])), expected);
    }
}

#[test]
fn reduce_to_3dnf_writes_a_3dnf_instance() {
    let d = Dir::new();
    let f = d.file("i.wq", EXISTS_CNF);
    let out = d.path("out.wq");
    written(&run(&["wqbf", "reduce", "--to", "3dnf", p(&f), "-o", p(&out)]));
    let inst = parse_wqdimacs(&fs::read_to_string(&out).unwrap()).unwrap();
    assert!(inst.matrix.to_dnf().unwrap().max_width() <= 3);
    assert!(!verdict(&run(&["wqbf", "solve", p(&out)])));
}

#[test]
fn every_reduction_reparses_and_preserves_the_answer() {
    let d = Dir::new();
    let cases = [
        ("3dnf", EXISTS_DNF),
        ("pad", EXISTS_CNF),
        ("pad", TRIVIAL),
        ("exact-to-atmost", EXISTS_DNF),
        ("atmost-to-exact", "p cnf 3 2\ne 1 2 0\na 3 0\nw 1 atmost 1\nw 2 free 0\n1 3 0\n2 -3 0\n"),
        ("complement", "p cnf 3 2\ne 1 2 0\na 3 0\nw 1 complement 1\nw 2 free 0\n1 3 0\n2 -3 0\n"),
        ("atleast-outer", "p cnf 3 2\ne 1 2 0\na 3 0\nw 1 atleast 2\nw 2 free 0\n1 3 0\n2 -3 0\n"),
        ("atleast-inner", "p cnf 3 2\ne 1 0\na 2 3 0\nw 1 free 0\nw 2 atleast 1\n1 2 0\n1 3 0\n"),
        ("kstar", "p cnf 4 2\ne 1 2 0\na 3 4 0\nw 1 exact 1\nw 2 exact 1\n1 3 0\n2 4 0\n"),
        ("stark", "p cnf 4 2\ne 1 2 0\na 3 4 0\nw 1 exact 1\nw 2 exact 1\n1 -3 0\n2 4 0\n"),
        ("monotone", "p cnf 4 2\ne 1 2 0\na 3 4 0\nw 1 free 0\nw 2 exact 1\n1 -3 0\n2 -4 0\n"),
    ];
    for (i, (to, text)) in cases.iter().enumerate() {
        let f = d.file(&format!("in{i}.wq"), text);
        let out = d.path(&format!("out{i}.wq"));
        written(&run(&["wqbf", "reduce", "--to", to, p(&f), "-o", p(&out)]));
        parse_wqdimacs(&fs::read_to_string(&out).unwrap()).unwrap();
        let expected = brute_force_wqbf(&parse_wqdimacs(text).unwrap()).unwrap().is_yes();
        assert_eq!(verdict(&run(&["wqbf", "solve", p(&out)])), expected, "{to}");
    }
}

#[test]
fn hardness_warning_for_leading_atleast() {
    let d = Dir::new();
    let f = d.file("i.wq", "p cnf 3 2\ne 1 2 0\na 3 0\nw 1 atleast 2\nw 2 free 0\n1 3 0\n2 -3 0\n");
    let o = run(&["wqbf", "solve", p(&f)]);
    assert!(verdict(&o));
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning: at-least weight"));
}

#[test]
fn generators_reparse() {
    let d = Dir::new();
    let dnf = d.file("d.wq", EXISTS_DNF);
    let out = d.path("c.lp");
    written(&run(&["asp", "gen-contrules", p(&dnf), "-o", p(&out)]));
    let prog = parse_program(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(verdict(&run(&["asp", "solve", p(&out)])), true);
    let out2 = d.path("l.lp");
    written(&run(&["asp", "limit-occ", "--bound", "3", p(&out), "-o", p(&out2)]));
    let limited = parse_program(&fs::read_to_string(&out2).unwrap()).unwrap();
    assert!(limited.rules.len() >= prog.rules.len());
    assert!(verdict(&run(&["asp", "solve", p(&out2)])));

    let mono = d.file("m.wq", "p cnf 4 2\ne 1 2 0\na 3 4 0\nw 1 free 0\nw 2 exact 1\n1 3 0\n2 4 0\n");
    let out = d.path("dj.lp");
    written(&run(&["asp", "gen-disjrules", p(&mono), "-o", p(&out)]));
    parse_program(&fs::read_to_string(&out).unwrap()).unwrap();
    let expected = brute_force_wqbf(&parse_wqdimacs(&fs::read_to_string(&mono).unwrap()).unwrap()).unwrap().is_yes();
    assert_eq!(verdict(&run(&["asp", "solve", p(&out)])), expected);

    let split = d.file("s.wq", "p dnf 4 2\ne 1 2 0\na 3 4 0\n1 3 0\n2 -4 0\n");
    let out = d.path("bs.wq");
    written(&run(&["wqbf", "gen-blocksplit", "--r", "1", p(&split), "-o", p(&out)]));
    let inst = parse_wqdimacs(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(
        brute_force_wqbf(&inst).unwrap().is_yes(),
        brute_force_wqbf(&parse_wqdimacs(&fs::read_to_string(&split).unwrap()).unwrap()).unwrap().is_yes()
    );

    let forall = d.file("r.wq", "p cnf 3 2\na 1 2 0\ne 3 0\nw 1 exact 1\nw 2 free 0\n1 3 0\n2 -3 0\n");
    let out = d.path("r.csp");
    written(&run(&["robust-csp", "gen", p(&forall), "-o", p(&out)]));
    parse_csp(&fs::read_to_string(&out).unwrap()).unwrap();
    let expected = brute_force_wqbf(&parse_wqdimacs(&fs::read_to_string(&forall).unwrap()).unwrap()).unwrap().is_yes();
    assert_eq!(verdict(&run(&["robust-csp", "solve", "--k", "1", p(&out)])), expected);
}

#[test]
fn identical_invocations_write_identical_files() {
    let d = Dir::new();
    let f = d.file("i.wq", EXISTS_CNF);
    let dnf = d.file("d.wq", EXISTS_DNF);
    let runs: [&[&str]; 3] = [
        &["wqbf", "reduce", "--to", "3dnf", p(&f)],
        &["wqbf", "reduce", "--to", "pad", p(&f)],
        &["asp", "gen-contrules", p(&dnf)],
    ];
    for (i, args) in runs.iter().enumerate() {
        let a = d.path(&format!("a{i}"));
        let b = d.path(&format!("b{i}"));
        for out in [&a, &b] {
            let mut argv = args.to_vec();
            argv.extend(["--seed", "7", "-o", p(out)]);
            written(&run(&argv));
        }
        assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    }
    let x = stdout(&run(&["wqbf", "solve", "--seed", "3", p(&f)]));
    assert_eq!(x, stdout(&run(&["wqbf", "solve", "--seed", "3", p(&f)])));
}

#[test]
fn sat_subcommand() {
    let d = Dir::new();
    let f = d.file("f.cnf", "p cnf 2 2\n1 2 0\n-1 0\n");
    let o = run(&["sat", p(&f)]);
    assert!(verdict(&o));
    assert!(stdout(&o).contains("witness: -1 2"));
    let g = d.file("g.cnf", "p cnf 1 2\n1 0\n-1 0\n");
    assert!(!verdict(&run(&["sat", p(&g)])));
    parse_dimacs_cnf(&fs::read_to_string(&g).unwrap()).unwrap();
}

#[test]
fn application_subcommands() {
    let d = Dir::new();
    let csp = d.file("c.csp", "var x y\ndom 0 1\ncon (x,y) : (0,1) (1,0)\n");
    assert!(verdict(&run(&["robust-csp", "solve", "--k", "1", p(&csp)])));
    let clash = d.file(
        "x.csp",
        "var x y z\ndom 0 1\ncon (y,x) : (0,0) (1,1)\ncon (z,x) : (0,0) (1,1)\ncon (y,z) : (0,1) (1,0)\n",
    );
    let o = run(&["robust-csp", "solve", "--k", "1", p(&clash)]);
    assert!(!verdict(&o));
    assert!(stdout(&o).contains("witness: "));

    let tri = d.file("t.g", "v a b c d\ne a b\ne b c\ne a c\ne c d\n");
    assert!(verdict(&run(&["clique-ext", "--subset", "a,b", "--k", "1", p(&tri)])));
    let apart = d.file("a.g", "v a b c\ne a b\n");
    assert!(!verdict(&run(&["clique-ext", "--subset", "c", "--k", "1", p(&apart)])));
    let edge = d.file("e.g", "v a b\ne a b\n");
    assert!(verdict(&run(&["coloring-ext", "--m", "1", p(&edge)])));
    let o = run(&["coloring-ext", "--m", "2", p(&edge)]);
    assert!(!verdict(&o));
    assert!(stdout(&o).contains("witness: "));

    // (1 ∧ 2) ∨ (1 ∧ ¬2) is equivalent to the single literal 1.
    let phi = d.file("p.dnf", "p dnf 2 2\n1 2 0\n1 -2 0\n");
    assert!(verdict(&run(&["dnfmin", "reduction", "--k", "3", p(&phi)])));
    assert!(!verdict(&run(&["dnfmin", "reduction", "--k", "5", p(&phi)])));
    assert!(verdict(&run(&["dnfmin", "core", "--k", "1", p(&phi)])));
    assert!(!verdict(&run(&["dnfmin", "core", "--k", "0", p(&phi)])));
    let o = run(&["implicant-core", "--term", "1 -2", "--m", "1", p(&phi)]);
    assert!(verdict(&o));
    assert!(stdout(&o).contains("witness: 1\n"));
    assert!(!verdict(&run(&["implicant-core", "--term", "1 -2", "--m", "0", p(&phi)])));

    let fo = d.file("s.fo", "dom a b\nrel E/2 (a,b) (b,b)\nsentence exists x1 forall y1 : E(y1,x1)\n");
    assert!(verdict(&run(&["fo-mc", p(&fo)])));
}

#[test]
fn qbf_expand_matches_library() {
    let d = Dir::new();
    for text in ["p cnf 2 1\ne 1 0\na 2 0\n1 2 0\n", "p cnf 2 2\na 2 0\ne 1 0\n1 2 0\n-1 -2 0\n", "p cnf 2 2\ne 1 0\na 2 0\n1 2 0\n-1 -2 0\n"] {
        let f = d.file("q.qdimacs", text);
        let out = d.path("q.cnf");
        let o = run(&["qbf", "expand", p(&f), "-o", p(&out)]);
        let expected = solve_qbf_expand(&Engine::default(), &parse_qbf(text).unwrap()).unwrap();
        assert_eq!(verdict(&o), expected, "{text}");
        assert!(stdout(&o).contains("factor"));
        parse_dimacs_cnf(&fs::read_to_string(&out).unwrap()).unwrap();
    }
}

#[test]
fn errors_exit_one() {
    let d = Dir::new();
    let bad = d.file("bad.wq", "p cnf 2 1\ne 1 0\nnonsense\n");
    let o = run(&["wqbf", "solve", p(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: "));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["sat", p(&d.path("missing.cnf"))]).status.code(), Some(1));
    let big = d.file(
        "big.wq",
        "p cnf 8 1\ne 1 2 3 4 5 6 7 0\na 8 0\nw 1 exact 3\nw 2 free 0\n1 2 3 4 5 6 7 8 0\n",
    );
    let o = run(&["--ceiling", "10", "wqbf", "solve", p(&big)]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["--oracle-bound", "2", "wqbf", "brute", p(&big)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(verdict(&run(&["--oracle-bound", "10", "wqbf", "brute", p(&big)])));
}
