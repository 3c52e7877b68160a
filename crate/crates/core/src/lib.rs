pub mod error;
pub mod par;
pub mod script;

pub use error::{Error, Result};
pub mod corpus;
pub mod subword;
pub mod volt;
pub mod overlap;
pub mod bleu;
pub mod synth;
pub mod nmt;
pub mod harness;
