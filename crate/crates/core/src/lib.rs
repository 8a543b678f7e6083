pub mod error;
pub mod intertwiner;
pub mod io;
pub mod optimizer;
pub mod qsim;
pub mod spinfoam;
pub mod su2;

pub use error::{FoamError, Result};
