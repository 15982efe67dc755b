pub mod coinv;
pub mod derham;
pub mod error;
pub mod exactla;
pub mod graphcalc;
pub mod models;
pub mod oracle;
pub mod ring;

pub use error::{Error, Result};
