//! Holds no code. The suite lives in `tests/acceptance.rs` and prints one
//! PASS/FAIL line per acceptance criterion.
