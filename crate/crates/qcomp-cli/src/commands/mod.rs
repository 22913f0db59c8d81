//! Subcommand implementations. Each returns a [`Report`](crate::report::Report).

pub mod codes;
pub mod distill;
pub mod qkd;
pub mod uncertainty;
