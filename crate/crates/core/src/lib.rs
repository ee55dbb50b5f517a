pub mod classify;
pub mod cli;
pub mod config;
pub mod error;
pub mod fingerprint;
pub mod invariant;
pub mod linalg;
pub mod map;
pub mod render;
pub mod roots;
pub mod scan;
pub mod symbolic;

pub use error::{Error, Result};
pub use linalg::{eigen2, EigenData, EigenKind, Mat2, Slope};
pub use map::{MapParams, ParamId, Partition, Point2};
pub use symbolic::SymbolicSequence;
