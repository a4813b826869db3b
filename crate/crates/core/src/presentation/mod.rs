//! The textual presentation language for dg quiver algebras and modules.

mod ast;
mod lexer;
mod normalize;
mod parser;

pub use ast::*;
pub use normalize::normalize;
pub use parser::{parse, parse_algebra, parse_designator, parse_module};
