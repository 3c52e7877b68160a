//! A small transformer translation model written from scratch.

pub mod checkpoint;
pub mod decode;
pub mod gradcheck;
pub mod model;
pub mod tensor;
pub mod train;

pub use checkpoint::{Checkpoint, CheckpointConfig};
pub use decode::{beam_search, greedy, Hypothesis, Translator};
pub use gradcheck::{gradient_check, GradCheckReport};
pub use model::{AttentionMap, Batch, DecoderStart, Example, LossStats, ModelConfig, Slot, Transformer};
pub use tensor::Float;
pub use train::{train, EarlyStopping, EpochRecord, History, TrainConfig, Verdict};
