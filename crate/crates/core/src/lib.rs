//! Integral points on Mordell curves `Y^2 = X^3 + k` through binary cubic
//! forms of discriminant `-108k` and the Thue equations `F(x, y) = 1`.

pub mod arith;
pub mod cli;
pub mod error;
pub mod forms;
pub mod oracle;
pub mod pipeline;
pub mod reducible;
pub mod reduction;
pub mod report;
pub mod thue;

pub use error::{Error, Result};
pub use forms::{BinaryCubicForm, CubicCovariant, HessianForm, UnimodularMap};
