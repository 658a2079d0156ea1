//! Placeholder.

/// CLI entry; returns the process exit code.
pub fn cli_main() -> i32 {
    0
}
