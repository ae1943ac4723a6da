//! Independent checks of a solved value function.

mod characterization;
mod discrete;

pub use characterization::{check_characterization, CharReport, CharTolerances};
pub use discrete::{compare_to_oracle, discrete_oracle_value, OracleGrid, OracleOptions};
