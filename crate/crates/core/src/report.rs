//! Machine-readable report schema.
