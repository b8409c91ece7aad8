pub mod bipoly;
pub mod interval;
pub mod poly;
pub mod quadext;
pub mod rational;
pub mod scalar;

pub use bipoly::BiPoly;
pub use interval::Interval;
pub use poly::Poly;
pub use quadext::QuadExt;
pub use rational::{fmt_rational, parse_rational, q, qi, Q};
pub use scalar::{Complex, Scalar};
