pub mod bits;
pub mod error;
pub mod exact;
pub mod family;
pub mod frankl;
pub mod generate;
pub mod io;
pub mod measures;
pub mod regularity;
pub mod scalar;
pub mod search;
pub mod shadows;
pub mod shifting;

pub use bits::Mask;
pub use error::{Error, Result};
pub use family::{Family, Mode, UniformFamily};
pub use scalar::{Bias, Scalar, Value};
