//! Molecular graphs, SELFIES and SMILES grammars, valence checking and
//! canonical labeling.

mod canon;
mod element;
mod graph;
mod selfies;
mod smiles;
mod valence;

use thiserror::Error;

pub use canon::{canonical_form, canonical_labels, canonical_labels_with};
pub use element::{ChargeRule, Element, ElementSpec, ElementTable};
pub use graph::{Atom, Bond, BondOrder, MolecularGraph};
pub use selfies::{
    bonding_capacity, decode_selfies, decode_selfies_with, encode_selfies, encode_selfies_with,
    parse_selfies, SelfiesString, INDEX_ALPHABET,
};
pub use smiles::{parse_smiles, parse_smiles_with, write_smiles};
pub use valence::{
    check_valence, check_valence_with, implicit_hydrogens, kekulize, kekulize_with, ValenceReport,
    Violation, ViolationKind,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MolError {
    #[error("empty input")]
    EmptyInput,
    #[error("unbalanced bracket at byte {position}")]
    UnbalancedBracket { position: usize },
    #[error("character {ch:?} outside brackets at byte {position}")]
    CharacterOutsideBracket { position: usize, ch: char },
    #[error("unknown SELFIES token {token} at position {position}")]
    UnknownToken { token: String, position: usize },
    #[error("SMILES syntax error at byte {position}: {message}")]
    SmilesSyntax { position: usize, message: String },
    #[error("unclosed branch opened at byte {position}")]
    UnclosedBranch { position: usize },
    #[error("unclosed ring bond {label}")]
    UnclosedRing { label: u32 },
    #[error("unsupported feature at byte {position}: {feature}")]
    UnsupportedFeature { position: usize, feature: String },
    #[error("unsupported element {0}")]
    UnsupportedElement(String),
    #[error("formal charge {0} outside [-4, 4]")]
    ChargeOutOfRange(i8),
    #[error("{coordinates} coordinates for {atoms} atoms")]
    CoordinateCount { atoms: usize, coordinates: usize },
    #[error("atom index {0} out of range")]
    InvalidAtomIndex(usize),
    #[error("bond from atom {0} to itself")]
    SelfBond(usize),
    #[error("duplicate bond between atoms {0} and {1}")]
    DuplicateBond(usize, usize),
    #[error("no Kekulé structure satisfies atom {0}")]
    Kekulization(usize),
    #[error("graph has more than one fragment")]
    Disconnected,
    #[error("ring or branch index {0} needs more than three index tokens")]
    IndexOverflow(usize),
    #[error("atom {atom} uses {used} bonds and hydrogens but SELFIES allows {capacity}")]
    SelfiesCapacity {
        atom: usize,
        used: u32,
        capacity: u8,
    },
}
