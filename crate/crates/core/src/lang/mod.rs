//! Generator circuits and the `.opt` text format.

mod ast;
mod syntax;

pub use ast::{evaluate, typecheck, CircuitNode, TypeError, TypedNode};
pub use syntax::{parse, CircuitSource, DeclKind, Emitter, Expr, ExprKind, LangError, LangResult, Span, SystemDecl, TestDecl};
