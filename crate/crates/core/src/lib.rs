pub mod bounds;
pub mod cli;
pub mod error;
pub mod extreal;
pub mod io;
pub mod leakage;
pub mod mechanisms;
pub mod oracles;
pub mod prob;
pub mod props;
pub mod random;
pub mod scalar;

pub use error::{Error, Result};
pub use extreal::{ExtReal, Nats};
pub use prob::{Channel, Joint, Pmf};
pub use scalar::Scalar;
