//! Newform data: labels, Nebentypus codes and validated coefficient packages.

pub mod character;
pub mod label;
pub mod package;
pub mod store;

pub use character::{CharComponent, CharacterError, DirichletCharacterCode};
pub use label::{EigenformLabel, LabelError};
pub use package::{EigenformPackage, PackageError, PackageFile};
pub use store::{ingest_dir, ingest_files, FixtureStore, IngestEntry, StoreError, FIXTURE_ENV};
