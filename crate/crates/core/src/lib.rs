pub mod acceptance;
pub mod bending;
pub mod certificate;
pub mod certify;
pub mod config;
pub mod error;
pub mod field;
pub mod forms;
pub mod interval;
pub mod io;
pub mod matrix;
pub mod numfield;
pub mod par;
pub mod pipeline;
pub mod poly;
pub mod projgeom;
pub mod rational;
pub mod units;

pub use error::{Error, Result};
