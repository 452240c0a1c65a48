//! Instance transformations: normalization, weight bridges, monotonization,
//! doubly weighted bridges, the QSat₂ block split and the first-order
//! encoding.
//!
//! Every variable a reduction introduces carries the reserved `_` prefix and
//! avoids the names already used by the input instance.

pub mod bridges;
pub mod collapse;
pub mod fo;
pub mod monotone;
pub mod threshold;
pub mod weights;

pub use bridges::{doubly_weighted_to_kstar, doubly_weighted_to_stark, qsat2_block_split, BlockSplit};
pub use collapse::collapse_to_3dnf;
pub use fo::{fo_mc_to_wqbf, fo_model_check, parse_fo, write_fo, FoFormula, FoSentence, FoStructure};
pub use monotone::{is_monotone_in, monotonize_universal};
pub use weights::{
    atleast_inner_to_plain_qbf, atleast_outer_to_plain_qbf, atmost_to_exact, complement_outer_weight, exact_to_atmost,
    pad_exact_offweight,
};

use crate::error::Error;
use crate::logic::{Fresh, WqbfInstance};

pub(crate) fn fresh_for(inst: &WqbfInstance) -> Fresh {
    let mut f = Fresh::avoiding(inst.all_vars().iter());
    for v in inst.matrix.inputs() {
        f.avoid(&v);
    }
    f
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
