//! Problems solved through the weighted QBF pipeline or through enumeration
//! plus SAT: robust CSP, clique and coloring extension, DNF minimization,
//! implicant cores and QBF with few universal variables.

mod csp;
mod dnf;
mod graph;
mod qbf;

pub use csp::{
    gen_robust_csp_hard, parse_csp, robust_csp_check, robust_csp_check_with, robust_csp_instance, robust_csp_source,
    write_csp, Constraint, CspInstance, RobustCspHard, RobustReport,
};
pub use dnf::{
    delete_occurrences, dnf_min_core, dnf_min_core_with, dnf_min_reduction, dnf_min_reduction_instance,
    dnf_min_reduction_with, equivalent, implicant_core, implicant_core_instance, implicant_core_with, is_implicant,
    Occurrences,
};
pub use graph::{
    clique_extension_check, clique_extension_check_with, clique_extension_instance, coloring_extension_cnf,
    coloring_extension_formula, coloring_extension_leaves, coloring_extension_leaves_with, format_precoloring,
    leaf_precolorings, parse_graph, write_graph, CliqueExtReport, ColoringReport, Graph, PreColoring,
};
pub use qbf::{parse_qbf, qbf_universal_expand, solve_qbf_expand, write_qbf, ExpansionStats, PrenexQbf};
