pub mod analyze;
pub mod region;
pub mod simulate;
pub mod sweep;
