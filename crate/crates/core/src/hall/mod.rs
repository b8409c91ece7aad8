//! Hall-type algebra over rational functions in `q`, its logarithm and
//! exponential over a ray, and the transformation of invariants across a wall.

pub mod algebra;
pub mod expr;
pub mod formal;
pub mod ratfunc;
pub mod transform;

use thiserror::Error;

pub use algebra::{delta_bar, AlgebraElement, ITable};
pub use expr::{parse_value, ExprError};
pub use formal::FormalPoly;
pub use ratfunc::{LambdaElement, RatFunc};
pub use transform::*;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HallError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("central charge vanishes on {0}")]
    ZeroCharge(String),
    #[error("charge of {0} leaves the phase window")]
    OutsideWindow(String),
    #[error("class {0} is outside the transform scope")]
    ScopeExceeded(String),
    #[error("the on-wall point does not align the declared pair")]
    NotOnWall,
    #[error(transparent)]
    Expr(#[from] ExprError),
}
