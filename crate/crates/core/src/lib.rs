//! Speech recognition building blocks for low-resource, tonal languages.

pub mod corpus;
pub mod decoder;
pub mod frontend;
pub mod lexicon;
pub mod lm;
pub mod scoring;
pub mod server;
