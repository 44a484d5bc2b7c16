pub mod adjoint;
pub mod dist;
pub mod error;
pub mod finmod;
pub mod modsym;
pub mod padic;
pub mod pairing;
pub mod polyrep;
pub mod ring;
pub mod scenario;
pub mod slope;
pub mod weightspace;
pub mod zeta;

pub use error::{Error, Result};
