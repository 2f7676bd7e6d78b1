//! Depth-optimal layout synthesis for quantum circuits via incremental SAT.

pub mod circuit;
pub mod coupling;
pub mod encoder;
pub mod extract;
pub mod oracle;
pub mod par;
pub mod pipeline;
pub mod satcore;

pub use pipeline::{synthesize, Report, Status, Synthesis, SynthesisError, SynthesisOptions};
