//! RV32EC instruction-set simulator with a memory-coupled Montgomery
//! multiplication (MMUL) instruction, cycle accounting and an energy model.

pub mod encoding;
pub mod engine;
pub mod guest;
pub mod isa;
pub mod machine;
pub mod perf;

pub use engine::{MmulEngine, MmulError};
pub use machine::{Machine, MachineConfig};
pub use perf::{Config, RunStats};
