//! Spec files, reports and the `meanmap` command line on top of
//! [`meanmap_core`].

pub mod cli;
pub mod fixtures;
pub mod format;
pub mod spec_file;
pub mod verify;

pub use spec_file::{load_spec, parse_spec, LoadedSpec, MappingSpecFile, SpecError};
