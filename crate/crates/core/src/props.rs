//! Decision procedures for ring and extension properties.
