//! Documents, fixtures and report serialization.

pub mod document;
pub mod fixtures;
pub mod json;
pub mod reports;

pub use document::{
    assembly_from_json, assembly_to_json, corpus_files, load_assembly, load_corpus, save_assembly, write_atomic,
    DocumentError, LoadFailure, SCHEMA_VERSION,
};
pub use fixtures::{all_fixtures, generate_fixture, FixtureParams, FIXTURE_NAMES};
pub use json::{to_canonical_string, write_canonical};
