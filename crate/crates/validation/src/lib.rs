//! Holds the `acceptance` test target; there is no library code.
//!
//! Kept in its own package so that it runs after every other test target
//! of the workspace: it exits non-zero when any criterion fails.
