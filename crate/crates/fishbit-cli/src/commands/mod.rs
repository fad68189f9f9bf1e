pub mod analyze;
pub mod process;
pub mod simulate;
pub mod synth;
