//! Phoneme inventories, tonal expansion, rule-based G2P and pronunciation
//! dictionaries.

mod dictionary;
mod g2p;
mod inventory;

pub use dictionary::{validate_lexicon, LexEntry, Lexicon, LexiconViolation};
pub use g2p::{apply_g2p, G2PRule, G2PRuleSet};
pub use inventory::{expand_tonal, load_inventory, PhoneClass, PhonemeInventory, PhonemeUnit, ToneSet};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LexiconError {
    #[error("empty inventory")]
    EmptyInventory,
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("duplicate phoneme symbol {0:?}")]
    DuplicateSymbol(String),
    #[error("unknown phonetic class {0:?}")]
    UnknownClass(String),
    #[error("inventory is already tone-expanded")]
    AlreadyExpanded,
    #[error("duplicate tone label {0:?}")]
    DuplicateTone(String),
    #[error("invalid symbol {0:?}")]
    InvalidSymbol(String),
    #[error("no G2P rule matches {ch:?} at position {position}")]
    UnmatchedGrapheme { position: usize, ch: char },
    #[error("empty word")]
    EmptyWord,
    #[error("G2P rule {rule} outputs {symbol:?}, which is not in the inventory")]
    RuleSymbolNotInInventory { rule: usize, symbol: String },
}
