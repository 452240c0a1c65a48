//! Propositional disjunctive answer set programming: semantics, parameters,
//! parameterized consistency solvers and hard-instance generators.

mod gen;
mod program;
mod semantics;
mod solve;

pub use gen::{gen_contrules_hard, gen_disjrules_hard, limit_atom_occurrences};
pub use program::{parse_program, write_program, Program, Rule};
pub use semantics::{
    atom_occurrences, brute_force_answer_sets, brute_force_answer_sets_with, comp_and_cont, compulsory_atoms,
    contingent_representation, gl_reduct, is_answer_set, is_answer_set_with, is_model, minimality_cnf, models_reduct,
    AtomSet, ParamReport,
};
pub use solve::{
    choose_strategy, cont_atoms_formula, cont_rules_encoding, solve_asp, solve_cont_atoms, solve_cont_atoms_with,
    solve_cont_rules, solve_cont_rules_with, solve_disj_rules, solve_disj_rules_with, AspStrategy, CandidateSearch,
    ENUMERATION_LIMIT,
};
