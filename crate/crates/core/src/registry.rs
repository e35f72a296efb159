//! Executable catalog of worked examples and claim checks.
