//! File formats, terminal stepper and HTTP service over `revccs-core`.

pub mod check;
pub mod export;
pub mod repl;
pub mod server;
pub mod session;
